//! Dense complex matrices: products, determinant, exponential, and the
//! continuous-time evolution `exp(e^{iξ} t (P - I))`.

use std::f64::consts::FRAC_PI_2;
use std::ops::Mul;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectra::{Spectrum, TransitionMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Interpolation angle `ξ ∈ [0, π/2]` and time `t ≥ 0`.
///
/// `ξ = 0` is the classical continuous-time walk, `ξ = π/2` the quantum one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionParams {
    xi: f64,
    t: f64,
}

impl EvolutionParams {
    pub fn new(xi: f64, t: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&xi) {
            return Err(Error::InvalidParams(format!("ξ = {xi} outside [0, π/2]")));
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidParams(format!("t = {t} must be finite and ≥ 0")));
        }
        Ok(Self { xi, t })
    }

    pub fn classical(t: f64) -> Result<Self> {
        Self::new(0.0, t)
    }

    pub fn quantum(t: f64) -> Result<Self> {
        Self::new(FRAC_PI_2, t)
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `e^{iξ}`, exact at both endpoints.
    pub fn phase(&self) -> Complex64 {
        if self.xi == 0.0 {
            ONE
        } else if self.xi == FRAC_PI_2 {
            Complex64::new(0.0, 1.0)
        } else {
            Complex64::from_polar(1.0, self.xi)
        }
    }

    /// `cos ξ`, exact at both endpoints.
    pub fn cos_xi(&self) -> f64 {
        self.phase().re
    }

    /// `exp(e^{iξ} · scale · (λ - 1))`: the evolution eigenvalue paired with a
    /// transition eigenvalue `λ` (`scale` is `t` or `r·t`).
    pub fn evolve_eigenvalue(&self, lambda: Complex64, scale: f64) -> Complex64 {
        (self.phase() * scale * (lambda - ONE)).exp()
    }
}

/// Square matrix of complex entries, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::Size(format!(
                "need {} entries for a {n}×{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite complex entry".into()));
        }
        Ok(Self { n, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            data[i * n + i] = ONE;
        }
        Self { n, data }
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self {
            n,
            data: vec![ZERO; n * n],
        };
        for (i, &z) in diag.iter().enumerate() {
            m.data[i * n + i] = z;
        }
        m
    }

    pub fn from_transition(p: &TransitionMatrix) -> Self {
        Self {
            n: p.n(),
            data: p.entries().iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.n + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, z: Complex64) {
        self.data[row * self.n + col] = z;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.data
            .chunks(self.n)
            .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entry modulus.
    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn conj_transpose(&self) -> Self {
        let n = self.n;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        Self { n, data }
    }

    /// Matrix product. Output rows are computed in parallel; within a row the
    /// contraction index is accumulated in ascending order, so the result does
    /// not depend on the thread count.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut data = vec![ZERO; n * n];
        let fill = |(i, out_row): (usize, &mut [Complex64])| {
            let a_row = &self.data[i * n..(i + 1) * n];
            for (k, &a) in a_row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (c, &b) in out_row.iter_mut().zip(b_row) {
                    *c += a * b;
                }
            }
        };
        if n >= 64 {
            data.par_chunks_mut(n).enumerate().for_each(fill);
        } else {
            data.chunks_mut(n).enumerate().for_each(fill);
        }
        Self { n, data }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

const TAYLOR_SCALE_TARGET: f64 = 0.5;
const TAYLOR_REL_TOL: f64 = 1e-18;
const TAYLOR_MAX_TERMS: usize = 30;

/// Matrix exponential by scaling and squaring around a truncated Taylor series.
///
/// `A` is scaled by `2^-s` so that `‖A/2^s‖_∞ ≤ 1/2`; Taylor terms are summed
/// until a term's norm falls below `1e-18` of the partial sum (at most 30
/// terms), and the result is squared `s` times.
pub fn expm(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.n();
    let norm = a.norm_inf();
    let squarings = if norm > TAYLOR_SCALE_TARGET {
        (norm / TAYLOR_SCALE_TARGET).log2().ceil() as i32
    } else {
        0
    };
    let x = a.scale(Complex64::new((-squarings as f64).exp2(), 0.0));

    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=TAYLOR_MAX_TERMS {
        term = term.matmul(&x).scale(Complex64::new(1.0 / k as f64, 0.0));
        sum.add_assign(&term);
        if term.norm_inf() < TAYLOR_REL_TOL * sum.norm_inf() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    sum
}

/// `exp(e^{iξ} t (P - I))`.
///
/// Any `ξ > 0` requires a symmetric `P`; `t = 0` returns the identity exactly.
pub fn evolution_matrix(p: &TransitionMatrix, params: EvolutionParams) -> Result<ComplexMatrix> {
    if params.xi() > 0.0 {
        p.require_symmetric()?;
    }
    let n = p.n();
    if params.t() == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    let mut generator = ComplexMatrix::from_transition(p);
    for i in 0..n {
        let z = generator.get(i, i) - ONE;
        generator.set(i, i, z);
    }
    let generator = generator.scale(params.phase() * params.t());
    Ok(expm(&generator))
}

/// Determinant via LU factorization with partial pivoting. Singular input
/// gives exactly zero.
pub fn lu_determinant(m: &ComplexMatrix) -> Complex64 {
    let n = m.n();
    let mut a = m.data().to_vec();
    let mut det = ONE;
    for col in 0..n {
        let (pivot_row, pivot_abs) = (col..n)
            .map(|r| (r, a[r * n + col].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs == 0.0 {
            return ZERO;
        }
        if pivot_row != col {
            for j in 0..n {
                a.swap(col * n + j, pivot_row * n + j);
            }
            det = -det;
        }
        let pivot = a[col * n + col];
        det *= pivot;
        let inv = pivot.inv();
        for r in (col + 1)..n {
            let factor = a[r * n + col] * inv;
            if factor == ZERO {
                continue;
            }
            for j in (col + 1)..n {
                let upd = factor * a[col * n + j];
                a[r * n + j] -= upd;
            }
        }
    }
    det
}

/// `tr(M^r)`; `r = 0` yields `n`.
pub fn matrix_power_trace(m: &ComplexMatrix, r: u32) -> Complex64 {
    if r == 0 {
        return Complex64::new(m.n() as f64, 0.0);
    }
    let power = if r <= 8 {
        let mut acc = m.clone();
        for _ in 1..r {
            acc = acc.matmul(m);
        }
        acc
    } else {
        let mut result: Option<ComplexMatrix> = None;
        let mut base = m.clone();
        let mut e = r;
        loop {
            if e & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(acc) => acc.matmul(&base),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.matmul(&base);
        }
        result.expect("r ≥ 1")
    };
    power.trace()
}

/// `ρ = max_j |exp(e^{iξ} t (λ_j - 1))|` over an explicit spectrum.
pub fn spectral_bound(spectrum: &Spectrum, params: EvolutionParams) -> f64 {
    spectrum
        .values()
        .iter()
        .map(|&lam| params.evolve_eigenvalue(lam, params.t()).norm())
        .fold(0.0, f64::max)
}

/// `ρ = max_j |exp(e^{iξ} t (λ_j - 1))|` for a transition matrix, without
/// diagonalizing it.
///
/// Every stochastic `P` has `1` in its spectrum and all `|λ| ≤ 1`, hence
/// `Re(λ - 1) ≤ 0`. That pins `ρ = 1` whenever `ξ = 0`, and for every `ξ`
/// when `P` is symmetric (real spectrum). Non-symmetric `P` with `ξ > 0` may
/// have `ρ > 1` and is reported as unsupported.
pub fn max_abs_eigenvalue_bound(p: &TransitionMatrix, params: EvolutionParams) -> Result<f64> {
    if p.is_symmetric() || params.xi() == 0.0 {
        Ok(1.0)
    } else {
        Err(Error::Unsupported(format!(
            "no eigenvalue bound for non-symmetric P at ξ = {} > 0",
            params.xi()
        )))
    }
}
