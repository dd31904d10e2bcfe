//! Transition matrices of discrete-time walks and their eigenvalue spectra.
//!
//! Matrices follow the transposed stochastic convention: entries are
//! nonnegative and every *column* sums to one. Spectra come either from the
//! closed form on the torus ([`torus_spectrum`]) or from dense symmetric
//! diagonalization ([`hermitian_eigenvalues`]).

mod jacobi;
mod torus;

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use jacobi::{symmetric_eigen, SymmetricEigen};
pub use torus::{
    build_torus_transition, cos_two_pi_ratio, grid_sum, torus_eigenvalues, torus_spectrum,
    MomentumGrid, MomentumIndex, TorusSpec, MAX_MATRIX_VERTICES, MAX_SPECTRUM_VERTICES,
};

/// Column sums must equal one within this tolerance.
pub const COLUMN_SUM_TOL: f64 = 1e-12;
/// `P` is treated as symmetric iff `max |P_ij - P_ji|` is at most this.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// An `n × n` transposed stochastic matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    n: usize,
    entries: Vec<f64>,
    asymmetry: f64,
}

impl TransitionMatrix {
    /// Validates and wraps a row-major `n × n` entry buffer.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Size("transition matrix needs n ≥ 1".into()));
        }
        if entries.len() != n * n {
            return Err(Error::Size(format!(
                "expected {} entries for n = {n}, got {}",
                n * n,
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix(format!(
                "non-finite entry at ({}, {})",
                pos / n,
                pos % n
            )));
        }
        if let Some(pos) = entries.iter().position(|&v| v < 0.0) {
            return Err(Error::InvalidMatrix(format!(
                "negative entry {} at ({}, {})",
                entries[pos],
                pos / n,
                pos % n
            )));
        }

        let mut worst = (0usize, 0.0f64);
        for col in 0..n {
            let sum: f64 = (0..n).map(|row| entries[row * n + col]).sum();
            let dev = (sum - 1.0).abs();
            if dev > worst.1 {
                worst = (col, dev);
            }
        }
        if worst.1 > COLUMN_SUM_TOL {
            return Err(Error::InvalidMatrix(format!(
                "column {} sums to 1 {:+.3e} (worst column; tolerance {COLUMN_SUM_TOL:.0e})",
                worst.0,
                (0..n).map(|row| entries[row * n + worst.0]).sum::<f64>() - 1.0
            )));
        }

        let mut asymmetry = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                asymmetry = asymmetry.max((entries[i * n + j] - entries[j * n + i]).abs());
            }
        }

        Ok(Self {
            n,
            entries,
            asymmetry,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.n + col]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetry <= SYMMETRY_TOL
    }

    /// `max |P_ij - P_ji|`.
    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    pub(crate) fn require_symmetric(&self) -> Result<()> {
        if self.is_symmetric() {
            Ok(())
        } else {
            Err(Error::SymmetryRequired {
                asymmetry: self.asymmetry,
            })
        }
    }

    /// Parses the dense CSV format: a line holding `n`, then `n` lines of `n`
    /// comma-separated entries.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut records = rdr.records();

        let header = records
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))?
            .map_err(|e| Error::Parse(e.to_string()))?;
        if header.len() != 1 {
            return Err(Error::Parse(format!(
                "first line must hold n alone, found {} fields",
                header.len()
            )));
        }
        let n: usize = header[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad dimension {:?}", &header[0])))?;

        let mut entries = Vec::with_capacity(n * n);
        for row in 0..n {
            let rec = records
                .next()
                .ok_or_else(|| Error::Parse(format!("expected {n} rows, found {row}")))?
                .map_err(|e| Error::Parse(e.to_string()))?;
            if rec.len() != n {
                return Err(Error::Parse(format!(
                    "row {row} has {} entries, expected {n}",
                    rec.len()
                )));
            }
            for (col, field) in rec.iter().enumerate() {
                let v: f64 = field.parse().map_err(|_| {
                    Error::Parse(format!("bad number {field:?} at ({row}, {col})"))
                })?;
                entries.push(v);
            }
        }
        if let Some(extra) = records.next() {
            let extra = extra.map_err(|e| Error::Parse(e.to_string()))?;
            if extra.iter().any(|f| !f.is_empty()) {
                return Err(Error::Parse(format!("trailing data after {n} rows")));
            }
        }
        Self::new(n, entries)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_csv_reader(std::io::BufReader::new(file))
    }

    /// Writes the dense CSV format with round-trip exact decimals.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", self.n)?;
        for row in self.entries.chunks(self.n) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Eigenvalue multiset of a transition matrix, stored sorted descending
/// (by real part, then imaginary part).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(mut values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Size("spectrum must be nonempty".into()));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite eigenvalue".into()));
        }
        values.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
        Ok(Self { values })
    }

    pub fn from_real(values: impl IntoIterator<Item = f64>) -> Result<Self> {
        Self::new(values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// True when every imaginary part is at most `tol` in magnitude.
    pub fn is_real(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.im.abs() <= tol)
    }
}

/// All eigenvalues of a symmetric transition matrix, sorted descending.
pub fn hermitian_eigenvalues(m: &TransitionMatrix) -> Result<Spectrum> {
    let eig = symmetric_eigen(m)?;
    Spectrum::from_real(eig.values)
}

/// `Σ_j cos(w_j)`.
pub fn e_cos(w: &[f64]) -> Result<f64> {
    if w.is_empty() {
        return Err(Error::Size("e_cos needs at least one angle".into()));
    }
    Ok(w.iter().map(|x| x.cos()).sum())
}
