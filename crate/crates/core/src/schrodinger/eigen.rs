//! Smallest eigenpairs of sparse symmetric matrices.
//!
//! Two routes: a dense symmetric QR solve for small matrices, and
//! shift-invert subspace iteration with Rayleigh-Ritz for large ones. The
//! shift sits below the Gershgorin bound so the shifted matrix is positive
//! definite and is factored once with a band Cholesky. Block iteration
//! resolves degenerate eigenvalues, which single-vector Krylov methods miss.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sparse::{BandCholesky, CsrMatrix};
use crate::error::{Error, Result};

/// Matrices at or above this size use the iterative route under [`Solver::Auto`].
pub const DENSE_LIMIT: usize = 4096;

/// Relative residual `‖Av - λv‖ / ‖A‖` every returned pair must meet.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Convergence target of the iterative route, tighter than [`RESIDUAL_TOL`].
const ITERATIVE_TOL: f64 = 1e-11;
const MAX_ITERATIONS: usize = 2000;
const START_SEED: u64 = 0x5eed_1e55;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    #[default]
    Auto,
    Dense,
    Iterative,
}

#[derive(Clone, Debug)]
pub struct Eigenpairs {
    /// Nondecreasing eigenvalues.
    pub values: Vec<f64>,
    /// Unit eigenvectors, one per value.
    pub vectors: Vec<Vec<f64>>,
    /// `‖Av - λv‖ / ‖A‖` per pair, with `‖A‖` the max-row-sum norm.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub solver: Solver,
}

/// `k` smallest eigenpairs of a symmetric matrix.
pub fn smallest(a: &CsrMatrix, k: usize, solver: Solver) -> Result<Eigenpairs> {
    let n = a.size();
    if k == 0 || k > n {
        return Err(Error::config(format!(
            "requested {k} eigenvalues of a {n}x{n} matrix"
        )));
    }
    let asym = a.asymmetry();
    if asym != 0.0 {
        return Err(Error::domain(format!(
            "matrix is not symmetric (max |A - A^T| = {asym:e})"
        )));
    }
    let solver = match solver {
        Solver::Auto if n < DENSE_LIMIT => Solver::Dense,
        Solver::Auto => Solver::Iterative,
        s => s,
    };
    let pairs = match solver {
        Solver::Dense => dense(a, k)?,
        _ => subspace_iteration(a, k)?,
    };
    let worst = pairs.residuals.iter().copied().fold(0.0, f64::max);
    if worst > RESIDUAL_TOL {
        return Err(Error::NoConvergence {
            iterations: pairs.iterations,
            residual: worst,
        });
    }
    Ok(pairs)
}

fn dense(a: &CsrMatrix, k: usize) -> Result<Eigenpairs> {
    let eig = SymmetricEigen::new(a.to_dense());
    let mut order: Vec<usize> = (0..a.size()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let norm = a.inf_norm().max(f64::MIN_POSITIVE);
    let mut values = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for &idx in order.iter().take(k) {
        let v: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
        let lambda = rayleigh_quotient(a, &v);
        residuals.push(residual(a, lambda, &v) / norm);
        values.push(lambda);
        vectors.push(v);
    }
    Ok(Eigenpairs {
        values,
        vectors,
        residuals,
        iterations: 1,
        solver: Solver::Dense,
    })
}

// The QR eigenvalues carry absolute error of order eps·‖A‖; the quotient
// of the sparse product is far more accurate for the low end of the spectrum.
fn rayleigh_quotient(a: &CsrMatrix, v: &[f64]) -> f64 {
    let av = a.apply(v);
    let num: f64 = av.iter().zip(v).map(|(x, y)| x * y).sum();
    let den: f64 = v.iter().map(|x| x * x).sum();
    num / den
}

fn residual(a: &CsrMatrix, lambda: f64, v: &[f64]) -> f64 {
    let av = a.apply(v);
    av.iter()
        .zip(v)
        .map(|(x, y)| (x - lambda * y).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn subspace_iteration(a: &CsrMatrix, k: usize) -> Result<Eigenpairs> {
    let n = a.size();
    let block = n.min((2 * k).max(k + 8));
    let norm = a.inf_norm().max(f64::MIN_POSITIVE);
    let mut shift = a.gershgorin_lower() - 1.0;
    let chol = loop {
        if let Some(c) = BandCholesky::factor(a, shift) {
            break c;
        }
        shift -= norm;
    };

    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut x = DMatrix::from_fn(n, block, |_, _| rng.random_range(-1.0..1.0));
    let mut worst = f64::INFINITY;
    for it in 1..=MAX_ITERATIONS {
        for j in 0..block {
            chol.solve_in_place(&mut x.as_mut_slice()[j * n..(j + 1) * n]);
        }
        let q = x.qr().q();
        let mut aq = DMatrix::zeros(n, block);
        for j in 0..block {
            a.matvec(
                &q.as_slice()[j * n..(j + 1) * n],
                &mut aq.as_mut_slice()[j * n..(j + 1) * n],
            );
        }
        let h = q.transpose() * &aq;
        let h = (&h + h.transpose()) * 0.5;
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..block).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let w = DMatrix::from_fn(block, block, |r, c| eig.eigenvectors[(r, order[c])]);
        let ritz: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        x = &q * &w;
        let ax = &aq * &w;

        let residuals: Vec<f64> = (0..k)
            .map(|j| {
                let xv = x.column(j);
                let axv = ax.column(j);
                (axv - xv * ritz[j]).norm() / norm
            })
            .collect();
        worst = residuals.iter().copied().fold(0.0, f64::max);
        if worst <= ITERATIVE_TOL {
            let vectors = (0..k).map(|j| x.column(j).iter().copied().collect()).collect();
            return Ok(Eigenpairs {
                values: ritz[..k].to_vec(),
                vectors,
                residuals,
                iterations: it,
                solver: Solver::Iterative,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        residual: worst,
    })
}
