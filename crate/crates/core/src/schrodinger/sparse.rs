use nalgebra::DMatrix;

/// Compressed sparse row matrix. Both triangles are stored, so symmetry is
/// a property of the stored entries rather than an assumption.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    size: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Build from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(size: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0; size + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < size && c < size, "triplet ({r}, {c}) outside {size}x{size}");
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
                continue;
            }
            row_ptr[r + 1] += 1;
            cols.push(c);
            vals.push(v);
            last = Some((r, c));
        }
        for i in 0..size {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            size,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn identity(size: usize) -> Self {
        Self::from_triplets(size, (0..size).map(|i| (i, i, 1.0)).collect())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[range.clone()].iter().copied().zip(self.vals[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(c, v)| v * x[c]).sum();
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.size];
        self.matvec(x, &mut y);
        y
    }

    /// `max |A - Aᵀ|` over stored entries.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.size {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Maximum absolute row sum; bounds the spectral norm from above.
    pub fn inf_norm(&self) -> f64 {
        (0..self.size)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Gershgorin lower bound on the spectrum.
    pub fn gershgorin_lower(&self) -> f64 {
        (0..self.size)
            .map(|i| {
                let (diag, off) = self.row(i).fold((0.0, 0.0), |(d, o), (c, v)| {
                    if c == i {
                        (d + v, o)
                    } else {
                        (d, o + v.abs())
                    }
                });
                diag - off
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `|i - j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.size)
            .flat_map(|i| self.row(i).map(move |(j, _)| i.abs_diff(j)))
            .max()
            .unwrap_or(0)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.size, self.size);
        for i in 0..self.size {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Add `delta` to the stored entry `(i, j)` only, leaving `(j, i)` alone.
    ///
    /// Returns `false` if the entry is not stored.
    pub fn perturb_entry(&mut self, i: usize, j: usize, delta: f64) -> bool {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[range.clone()].iter().position(|&c| c == j) {
            Some(pos) => {
                self.vals[range.start + pos] += delta;
                true
            }
            None => false,
        }
    }
}

/// Lower Cholesky factor of a symmetric positive-definite band matrix.
pub(crate) struct BandCholesky {
    size: usize,
    band: usize,
    // row i holds L[i][i-band ..= i] at offsets 0 ..= band
    rows: Vec<f64>,
}

impl BandCholesky {
    /// Factor `A - shift·I`. Returns `None` if the shifted matrix is not positive definite.
    pub(crate) fn factor(a: &CsrMatrix, shift: f64) -> Option<Self> {
        let n = a.size();
        let b = a.bandwidth();
        let w = b + 1;
        let mut rows = vec![0.0; n * w];
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i {
                    rows[i * w + b - (i - j)] += v;
                }
            }
            rows[i * w + b] -= shift;
        }
        for i in 0..n {
            let lo = i.saturating_sub(b);
            for j in lo..=i {
                let klo = lo.max(j.saturating_sub(b));
                let mut s = rows[i * w + b - (i - j)];
                for k in klo..j {
                    s -= rows[i * w + b - (i - k)] * rows[j * w + b - (j - k)];
                }
                if i == j {
                    if !(s > 0.0) {
                        return None;
                    }
                    rows[i * w + b] = s.sqrt();
                } else {
                    rows[i * w + b - (i - j)] = s / rows[j * w + b];
                }
            }
        }
        Some(Self {
            size: n,
            band: b,
            rows,
        })
    }

    /// Overwrite `x` with `(L Lᵀ)⁻¹ x`.
    pub(crate) fn solve_in_place(&self, x: &mut [f64]) {
        let (n, b) = (self.size, self.band);
        let w = b + 1;
        for i in 0..n {
            let lo = i.saturating_sub(b);
            let mut s = x[i];
            for k in lo..i {
                s -= self.rows[i * w + b - (i - k)] * x[k];
            }
            x[i] = s / self.rows[i * w + b];
        }
        for i in (0..n).rev() {
            let hi = (i + b).min(n - 1);
            let mut s = x[i];
            for k in (i + 1)..=hi {
                s -= self.rows[k * w + b - (k - i)] * x[k];
            }
            x[i] = s / self.rows[i * w + b];
        }
    }
}
