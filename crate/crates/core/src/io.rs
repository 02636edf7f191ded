//! CSV formats shared by the command-line front end.
//!
//! Grid samples (fields and potentials):
//!
//! ```text
//! dim,n,length
//! 2,64,1
//! v(0,0),v(1,0),...,v(n-1,0)
//! v(0,1),...
//! ```
//!
//! Values are row-major with `x` fastest; any row layout is accepted on
//! read as long as the total count is `n^dim`. Lines starting with `#` are
//! ignored.
//!
//! Output tables start with `# key=value` metadata lines followed by a
//! header row. Floats are printed with 17 significant digits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridHeader {
    pub dim: usize,
    pub n: usize,
    pub length: f64,
}

/// Fixed-width scientific format with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn read_grid_csv(path: &Path) -> Result<(GridHeader, Vec<f64>)> {
    let parse_err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| parse_err(e.to_string()))?;
    let names: Vec<String> = reader
        .headers()
        .map_err(|e| parse_err(e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    if names != ["dim", "n", "length"] {
        return Err(parse_err(format!("expected header `dim,n,length`, found {names:?}")));
    }
    let mut records = reader.records();
    let first = records
        .next()
        .ok_or_else(|| parse_err("missing grid description row".into()))?
        .map_err(|e| parse_err(e.to_string()))?;
    if first.len() != 3 {
        return Err(parse_err("grid description row needs three entries".into()));
    }
    let dim: usize = first[0].parse().map_err(|_| parse_err(format!("bad dim `{}`", &first[0])))?;
    let n: usize = first[1].parse().map_err(|_| parse_err(format!("bad n `{}`", &first[1])))?;
    let length: f64 = first[2]
        .parse()
        .map_err(|_| parse_err(format!("bad length `{}`", &first[2])))?;
    let mut values = Vec::new();
    for (line, rec) in records.enumerate() {
        let rec = rec.map_err(|e| parse_err(e.to_string()))?;
        for cell in rec.iter().filter(|c| !c.is_empty()) {
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_err(format!("bad value `{cell}` in data row {}", line + 1)))?;
            values.push(v);
        }
    }
    let want = n.checked_pow(dim as u32).unwrap_or(usize::MAX);
    if values.len() != want {
        return Err(parse_err(format!(
            "expected {want} samples for dim={dim}, n={n}; found {}",
            values.len()
        )));
    }
    Ok((GridHeader { dim, n, length }, values))
}

pub fn write_grid_csv(path: &Path, header: GridHeader, values: &[f64]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "dim,n,length")?;
    writeln!(w, "{},{},{}", header.dim, header.n, header.length)?;
    let row_len = if header.dim == 1 { values.len() } else { header.n };
    for row in values.chunks(row_len.max(1)) {
        let cells: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Write a table with `# key=value` metadata lines, a header row, and rows of floats.
pub fn write_table(
    path: &Path,
    metadata: &[(String, String)],
    columns: &[&str],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> Result<()> {
    write_records(
        path,
        metadata,
        columns,
        rows.into_iter().map(|r| r.into_iter().map(fmt_f64).collect()),
    )
}

/// Like [`write_table`] with preformatted cells.
pub fn write_records(
    path: &Path,
    metadata: &[(String, String)],
    columns: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for (k, v) in metadata {
        for line in v.lines() {
            writeln!(w, "# {k}={line}")?;
        }
        if v.is_empty() {
            writeln!(w, "# {k}=")?;
        }
    }
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(columns).map_err(csv_io)?;
    for row in rows {
        csv.write_record(&row).map_err(csv_io)?;
    }
    csv.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}
