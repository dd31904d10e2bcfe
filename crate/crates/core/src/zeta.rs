//! Zeta functions and their log-series coefficients.
//!
//! For an evolution matrix `M` with eigenvalues `μ_j`,
//!
//! ```text
//! ζ(u)^{-1}  = det(I - uM)^{1/n} = exp[(1/n) Σ_j Log(1 - u μ_j)]
//! -log ζ^{-1} = Σ_{r≥1} C_r u^r / r,   C_r = (1/n) Σ_j μ_j^r
//! ```
//!
//! The `n`-th root of the determinant is multivalued; the termwise principal
//! logarithm on the right is the normative value. Determinant-based results
//! are therefore compared at the `n`-th power, `det(I - uM)`, and never
//! through an `n`-th root.
//!
//! Continuous-time models use `μ_j = exp(e^{iξ} t (λ_j - 1))`; the
//! discrete-time model uses `μ_j = λ_j`. Torus variants evaluate the same
//! sums on the momentum grid without building a matrix, and the `N → ∞`
//! limits are the same grid sums at a user-chosen resolution (the periodic
//! trapezoid rule on `[0, 2π)^d`).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    evolution_matrix, lu_determinant, matrix_power_trace, max_abs_eigenvalue_bound,
    spectral_bound, ComplexMatrix, EvolutionParams,
};
use crate::numeric::compensated_sum;
use crate::spectra::{grid_sum, Spectrum, TorusSpec, TransitionMatrix};
use crate::special::{bessel_i, BesselOrder, MAX_ARGUMENT};

/// Default resolution for the `N → ∞` quadratures.
pub const DEFAULT_LIMIT_GRID: usize = 256;
/// Smallest resolution accepted by the limit quadratures.
pub const MIN_LIMIT_GRID: usize = 16;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Series variable and coefficient index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaQuery {
    pub u: Complex64,
    pub r: u32,
}

impl ZetaQuery {
    pub fn new(u: Complex64, r: u32) -> Result<Self> {
        check_order(r)?;
        Ok(Self { u, r })
    }

    /// Checks `|u| · ρ < 1`.
    pub fn check_radius(&self, rho: f64) -> Result<()> {
        check_radius(self.u, rho)
    }
}

/// `ζ^{-1}` together with its (normative) logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaValue {
    pub zeta_inverse: Complex64,
    pub log_zeta_inverse: Complex64,
}

impl ZetaValue {
    pub fn from_log(log_zeta_inverse: Complex64) -> Self {
        Self {
            zeta_inverse: log_zeta_inverse.exp(),
            log_zeta_inverse,
        }
    }

    /// `exp(n · log ζ^{-1})`, the quantity comparable with `det(I - uM)`.
    pub fn determinant_power(&self, n: usize) -> Complex64 {
        (self.log_zeta_inverse * n as f64).exp()
    }
}

/// A coefficient `C_r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffValue {
    pub c: Complex64,
}

/// A grid quadrature result with a two-grid convergence estimate: the
/// distance to the same quadrature on `coarse_grid`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridEstimate<T> {
    pub value: T,
    pub grid: usize,
    pub coarse_grid: usize,
    pub two_grid_delta: f64,
}

fn check_radius(u: Complex64, rho: f64) -> Result<()> {
    let product = u.norm() * rho;
    if product < 1.0 {
        Ok(())
    } else {
        Err(Error::Radius { rho, product })
    }
}

fn check_order(r: u32) -> Result<()> {
    if r == 0 {
        Err(Error::Size("coefficient index r must be ≥ 1".into()))
    } else {
        Ok(())
    }
}

fn check_limit_grid(grid: usize) -> Result<()> {
    if grid < MIN_LIMIT_GRID {
        Err(Error::Size(format!(
            "limit grid {grid} below minimum {MIN_LIMIT_GRID}"
        )))
    } else {
        Ok(())
    }
}

fn mean_log(values: impl Iterator<Item = Complex64>, u: Complex64, n: usize) -> Complex64 {
    compensated_sum(values.map(|mu| (ONE - u * mu).ln())) / n as f64
}

// ---------------------------------------------------------------------------
// general spectra and matrices, continuous time

/// `ζ^{-1}` from the spectrum of `P` (principal logarithm termwise).
pub fn ctm_zeta_inverse_spectral(
    s: &Spectrum,
    params: EvolutionParams,
    u: Complex64,
) -> Result<ZetaValue> {
    check_radius(u, spectral_bound(s, params))?;
    let mus = s
        .values()
        .iter()
        .map(|&lam| params.evolve_eigenvalue(lam, params.t()));
    Ok(ZetaValue::from_log(mean_log(mus, u, s.len())))
}

/// `det(I - u P_t)`, the `n`-th power of `ζ^{-1}`.
pub fn ctm_zeta_inverse_determinant(
    p: &TransitionMatrix,
    params: EvolutionParams,
    u: Complex64,
) -> Result<Complex64> {
    let m = evolution_matrix(p, params)?;
    check_radius(u, max_abs_eigenvalue_bound(p, params)?)?;
    Ok(det_identity_minus(&m, u))
}

fn det_identity_minus(m: &ComplexMatrix, u: Complex64) -> Complex64 {
    let n = m.n();
    let mut a = m.scale(-u);
    for i in 0..n {
        a.set(i, i, a.get(i, i) + ONE);
    }
    lu_determinant(&a)
}

/// `C_r = (1/n) Σ_j exp(e^{iξ} r t (λ_j - 1))`.
pub fn ctm_coeff(s: &Spectrum, params: EvolutionParams, r: u32) -> Result<CoeffValue> {
    check_order(r)?;
    let scale = r as f64 * params.t();
    let sum = compensated_sum(
        s.values()
            .iter()
            .map(|&lam| params.evolve_eigenvalue(lam, scale)),
    );
    Ok(CoeffValue {
        c: sum / s.len() as f64,
    })
}

/// `C_r = tr(P_t^r) / n` from the evolution matrix itself.
pub fn ctm_coeff_trace(p: &TransitionMatrix, params: EvolutionParams, r: u32) -> Result<CoeffValue> {
    check_order(r)?;
    let m = evolution_matrix(p, params)?;
    Ok(CoeffValue {
        c: matrix_power_trace(&m, r) / p.n() as f64,
    })
}

// ---------------------------------------------------------------------------
// torus, continuous time

fn ctm_log_integrand(params: EvolutionParams, u: Complex64) -> impl Fn(f64) -> Complex64 + Sync {
    let factor = params.phase() * params.t();
    move |lam| (ONE - u * (factor * (lam - 1.0)).exp()).ln()
}

/// `ζ^{-1}(T^d_N, u)` as a sum over the momentum grid.
pub fn torus_zeta_inverse_finite(
    spec: &TorusSpec,
    params: EvolutionParams,
    u: Complex64,
) -> Result<ZetaValue> {
    // λ = 1 sits at k = 0 and cos ξ ≥ 0, so ρ = 1
    check_radius(u, 1.0)?;
    let total = grid_sum(spec, ctm_log_integrand(params, u));
    Ok(ZetaValue::from_log(total / spec.vertex_count() as f64))
}

/// `lim_{N→∞} ζ^{-1}(T^d_N, u)` by the periodic trapezoid rule on a
/// `grid^d` lattice, with a two-grid estimate against `grid/2`.
pub fn torus_zeta_inverse_limit(
    d: usize,
    params: EvolutionParams,
    u: Complex64,
    grid: usize,
) -> Result<GridEstimate<ZetaValue>> {
    check_limit_grid(grid)?;
    let fine = torus_zeta_inverse_finite(&TorusSpec::new(d, grid)?, params, u)?;
    let coarse_grid = grid / 2;
    let coarse = torus_zeta_inverse_finite(&TorusSpec::new(d, coarse_grid)?, params, u)?;
    Ok(GridEstimate {
        value: fine,
        grid,
        coarse_grid,
        two_grid_delta: (fine.zeta_inverse - coarse.zeta_inverse).norm(),
    })
}

/// `C_r` on `T^d_N` as a sum over the momentum grid.
pub fn torus_coeff_finite(spec: &TorusSpec, params: EvolutionParams, r: u32) -> Result<CoeffValue> {
    check_order(r)?;
    let factor = params.phase() * (r as f64 * params.t());
    let total = grid_sum(spec, move |lam| (factor * (lam - 1.0)).exp());
    Ok(CoeffValue {
        c: total / spec.vertex_count() as f64,
    })
}

/// `lim_{N→∞} C_r` by grid quadrature, with a two-grid estimate.
pub fn torus_coeff_limit_quadrature(
    d: usize,
    params: EvolutionParams,
    r: u32,
    grid: usize,
) -> Result<GridEstimate<CoeffValue>> {
    check_limit_grid(grid)?;
    let fine = torus_coeff_finite(&TorusSpec::new(d, grid)?, params, r)?;
    let coarse_grid = grid / 2;
    let coarse = torus_coeff_finite(&TorusSpec::new(d, coarse_grid)?, params, r)?;
    Ok(GridEstimate {
        value: fine,
        grid,
        coarse_grid,
        two_grid_delta: (fine.c - coarse.c).norm(),
    })
}

/// `lim_{N→∞} C_r = exp(-e^{iξ} r t) · I_0(e^{iξ} r t / d)^d`.
///
/// Evaluated as `(e^{-z} I_0(z))^d` with `z = e^{iξ} r t / d`, which keeps
/// the intermediate values bounded.
pub fn torus_coeff_limit_bessel(d: usize, params: EvolutionParams, r: u32) -> Result<CoeffValue> {
    check_order(r)?;
    if d == 0 {
        return Err(Error::Size("dimension d must be ≥ 1".into()));
    }
    let rt = r as f64 * params.t();
    if rt > MAX_ARGUMENT * d as f64 {
        return Err(Error::Envelope(format!(
            "r·t = {rt} exceeds {MAX_ARGUMENT}·d for the Bessel closed form"
        )));
    }
    let z = params.phase() * (rt / d as f64);
    let per_axis = (-z).exp() * bessel_i(BesselOrder::new(0)?, z)?;
    Ok(CoeffValue {
        c: per_axis.powu(d as u32),
    })
}

// ---------------------------------------------------------------------------
// discrete time

/// `ζ^{-1}` of the discrete-time model from the spectrum of `P`.
pub fn dtm_zeta_inverse(s: &Spectrum, u: Complex64) -> Result<ZetaValue> {
    check_radius(u, s.max_modulus())?;
    Ok(ZetaValue::from_log(mean_log(
        s.values().iter().copied(),
        u,
        s.len(),
    )))
}

/// `det(I - uP)`, the `n`-th power of the discrete-time `ζ^{-1}`.
pub fn dtm_zeta_inverse_determinant(p: &TransitionMatrix, u: Complex64) -> Result<Complex64> {
    // a stochastic matrix has spectral radius 1
    check_radius(u, 1.0)?;
    Ok(det_identity_minus(&ComplexMatrix::from_transition(p), u))
}

/// `C_r = (1/n) Σ_j λ_j^r`.
pub fn dtm_coeff(s: &Spectrum, r: u32) -> Result<CoeffValue> {
    check_order(r)?;
    let sum = compensated_sum(s.values().iter().map(|lam| lam.powu(r)));
    Ok(CoeffValue {
        c: sum / s.len() as f64,
    })
}

/// Discrete-time `ζ^{-1}(T^d_N, u)` on the momentum grid.
pub fn torus_dtm_zeta_inverse_finite(spec: &TorusSpec, u: Complex64) -> Result<ZetaValue> {
    check_radius(u, 1.0)?;
    let total = grid_sum(spec, move |lam| (ONE - u * lam).ln());
    Ok(ZetaValue::from_log(total / spec.vertex_count() as f64))
}

/// Discrete-time `C_r` on `T^d_N`: `(1/N^d) Σ_k λ_k^r`.
pub fn torus_dtm_coeff_finite(spec: &TorusSpec, r: u32) -> Result<CoeffValue> {
    check_order(r)?;
    let total = grid_sum(spec, move |lam| Complex64::new(lam.powi(r as i32), 0.0));
    Ok(CoeffValue {
        c: total / spec.vertex_count() as f64,
    })
}

/// `binom(r, r/2) / 2^r` for even `r`, zero for odd `r`: the probability that
/// the simple walk on ℤ is back at the origin after `r` steps.
pub fn central_binomial_probability(r: u32) -> f64 {
    if r % 2 == 1 {
        return 0.0;
    }
    if r <= 60 {
        let half = r / 2;
        let mut binom: u128 = 1;
        for k in 0..half as u128 {
            binom = binom * (r as u128 - k) / (k + 1);
        }
        binom as f64 / 2f64.powi(r as i32)
    } else {
        // p_{2m} = p_{2m-2} · (2m-1)/(2m); no overflow for any r
        (1..=r / 2).fold(1.0, |p, m| p * (2 * m - 1) as f64 / (2 * m) as f64)
    }
}

/// Return probability of the discrete-time walk on ℤ^d at time `r`, i.e.
/// `lim_{N→∞} C^{DTM}_r` on `T^d_N`.
///
/// `d = 1` and `d = 2` use closed forms (`two_grid_delta = 0`). For `d ≥ 3`
/// the grid quadrature at resolution `grid` is returned; it is exact once
/// `grid > r`, and the reported delta compares against a coarser grid that
/// also exceeds `r`.
pub fn dtrw_return_probability(d: usize, r: u32, grid: usize) -> Result<GridEstimate<f64>> {
    check_order(r)?;
    match d {
        0 => Err(Error::Size("dimension d must be ≥ 1".into())),
        1 | 2 => {
            let p = central_binomial_probability(r);
            Ok(GridEstimate {
                value: if d == 1 { p } else { p * p },
                grid,
                coarse_grid: grid,
                two_grid_delta: 0.0,
            })
        }
        _ => {
            if grid <= r as usize {
                return Err(Error::GridTooCoarse { grid, r });
            }
            let fine = torus_dtm_coeff_finite(&TorusSpec::new(d, grid)?, r)?.c.re;
            let coarse_grid = (grid / 2).max(r as usize + 1);
            let coarse = if coarse_grid == grid {
                fine
            } else {
                torus_dtm_coeff_finite(&TorusSpec::new(d, coarse_grid)?, r)?.c.re
            };
            Ok(GridEstimate {
                value: fine,
                grid,
                coarse_grid,
                two_grid_delta: (fine - coarse).abs(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{build_torus_transition, torus_spectrum};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn torus(d: usize, side: usize) -> TorusSpec {
        TorusSpec::new(d, side).unwrap()
    }

    fn two_cycle() -> Spectrum {
        Spectrum::from_real([1.0, -1.0]).unwrap()
    }

    #[test]
    fn spectral_zeta_examples() {
        let s = torus_spectrum(&torus(2, 3));
        let z = ctm_zeta_inverse_spectral(&s, EvolutionParams::classical(0.0).unwrap(), c(0.5, 0.0))
            .unwrap();
        assert!((z.zeta_inverse - c(0.5, 0.0)).norm() < 1e-15);
        let z = ctm_zeta_inverse_spectral(&s, EvolutionParams::quantum(2.0).unwrap(), c(0.0, 0.0))
            .unwrap();
        assert_eq!(z.zeta_inverse, ONE);

        // two-term hand evaluation: exp(½[log 0.5 + log(1 − 0.5e^{−2})])
        let z = ctm_zeta_inverse_spectral(
            &two_cycle(),
            EvolutionParams::classical(1.0).unwrap(),
            c(0.5, 0.0),
        )
        .unwrap();
        let hand = (0.5 * (0.5f64.ln() + (1.0 - 0.5 * (-2.0f64).exp()).ln())).exp();
        assert!((z.zeta_inverse.re - hand).abs() < 1e-15);
        assert!((z.zeta_inverse.re - 0.682_763_633_471_237_9).abs() < 1e-15);
        assert!((z.zeta_inverse - z.log_zeta_inverse.exp()).norm() < 1e-15);
    }

    #[test]
    fn radius_errors() {
        let s = two_cycle();
        let err = ctm_zeta_inverse_spectral(&s, EvolutionParams::classical(1.0).unwrap(), c(1.0, 0.0))
            .unwrap_err();
        assert!(matches!(err, Error::Radius { rho, .. } if rho == 1.0));
        assert!(dtm_zeta_inverse(&s, c(0.0, -1.2)).is_err());
        assert!(torus_zeta_inverse_finite(&torus(1, 4), EvolutionParams::classical(1.0).unwrap(), c(1.0, 0.0)).is_err());
        let p = build_torus_transition(&torus(1, 4)).unwrap();
        assert!(ctm_zeta_inverse_determinant(&p, EvolutionParams::quantum(1.0).unwrap(), c(0.0, 1.0)).is_err());
    }

    #[test]
    fn determinant_examples() {
        let p = build_torus_transition(&torus(1, 3)).unwrap();
        let det = ctm_zeta_inverse_determinant(&p, EvolutionParams::classical(0.0).unwrap(), c(0.5, 0.0))
            .unwrap();
        assert!((det - c(0.125, 0.0)).norm() < 1e-15);
        let det = ctm_zeta_inverse_determinant(&p, EvolutionParams::new(0.3, 1.0).unwrap(), c(0.0, 0.0))
            .unwrap();
        assert_eq!(det, ONE);

        let spec = torus(1, 4);
        let p = build_torus_transition(&spec).unwrap();
        let params = EvolutionParams::quantum(1.0).unwrap();
        let det = ctm_zeta_inverse_determinant(&p, params, c(0.3, 0.0)).unwrap();
        let spectral = ctm_zeta_inverse_spectral(&torus_spectrum(&spec), params, c(0.3, 0.0))
            .unwrap()
            .determinant_power(4);
        assert!((det - spectral).norm() <= 1e-9 * det.norm());
    }

    #[test]
    fn coeff_examples() {
        let s = torus_spectrum(&torus(2, 4));
        for r in [1, 2, 7] {
            let v = ctm_coeff(&s, EvolutionParams::new(0.9, 0.0).unwrap(), r).unwrap();
            assert!((v.c - ONE).norm() < 1e-15);
        }
        let v = ctm_coeff(&two_cycle(), EvolutionParams::classical(1.0).unwrap(), 1).unwrap();
        assert!((v.c.re - (1.0 + (-2.0f64).exp()) / 2.0).abs() < 1e-16);
        assert!((v.c.re - 0.5676676).abs() < 1e-7);
        assert!(ctm_coeff(&s, EvolutionParams::classical(1.0).unwrap(), 0).is_err());
    }

    #[test]
    fn coeff_matches_trace_oracle() {
        for (d, side) in [(1, 5), (2, 3), (1, 8), (3, 2)] {
            let spec = torus(d, side);
            let p = build_torus_transition(&spec).unwrap();
            let s = torus_spectrum(&spec);
            for xi in [0.0, 0.6, FRAC_PI_2] {
                let params = EvolutionParams::new(xi, 1.3).unwrap();
                for r in 1..=6 {
                    let a = ctm_coeff(&s, params, r).unwrap().c;
                    let b = ctm_coeff_trace(&p, params, r).unwrap().c;
                    let g = torus_coeff_finite(&spec, params, r).unwrap().c;
                    assert!((a - b).norm() < 1e-9, "trace d={d} N={side} r={r}");
                    assert!((a - g).norm() < 1e-12, "grid d={d} N={side} r={r}");
                }
            }
        }
    }

    #[test]
    fn torus_finite_examples() {
        let spec = torus(1, 4);
        let params = EvolutionParams::classical(1.0).unwrap();
        assert_eq!(
            torus_zeta_inverse_finite(&spec, params, c(0.0, 0.0)).unwrap().zeta_inverse,
            ONE
        );
        let z = torus_zeta_inverse_finite(&torus(2, 5), EvolutionParams::quantum(0.0).unwrap(), c(0.25, 0.0))
            .unwrap();
        assert!((z.zeta_inverse - c(0.75, 0.0)).norm() < 1e-15);

        let grid = torus_zeta_inverse_finite(&spec, params, c(0.5, 0.0)).unwrap();
        let s = Spectrum::from_real([1.0, 0.0, -1.0, 0.0]).unwrap();
        let spectral = ctm_zeta_inverse_spectral(&s, params, c(0.5, 0.0)).unwrap();
        assert!((grid.zeta_inverse - spectral.zeta_inverse).norm() < 1e-12);
    }

    #[test]
    fn limit_examples() {
        for xi in [0.0, FRAC_PI_4, FRAC_PI_2] {
            let params = EvolutionParams::new(xi, 1.0).unwrap();
            let v = torus_zeta_inverse_limit(2, params, c(0.0, 0.0), 16).unwrap();
            assert_eq!(v.value.zeta_inverse, ONE);
        }
        let u = c(0.3, -0.2);
        let v = torus_zeta_inverse_limit(3, EvolutionParams::new(0.4, 0.0).unwrap(), u, 16).unwrap();
        assert!((v.value.zeta_inverse - (ONE - u)).norm() < 1e-15);

        let params = EvolutionParams::classical(1.0).unwrap();
        let a = torus_zeta_inverse_limit(1, params, c(0.4, 0.0), 128).unwrap();
        let b = torus_zeta_inverse_limit(1, params, c(0.4, 0.0), 256).unwrap();
        assert!((a.value.zeta_inverse - b.value.zeta_inverse).norm() <= 1e-12);
        assert!(b.two_grid_delta <= 1e-12);
        assert!(torus_zeta_inverse_limit(1, params, c(0.4, 0.0), 8).is_err());
    }

    #[test]
    fn coeff_bessel_examples() {
        let v = torus_coeff_limit_bessel(2, EvolutionParams::classical(0.0).unwrap(), 3).unwrap();
        assert_eq!(v.c, ONE);
        let v = torus_coeff_limit_bessel(1, EvolutionParams::classical(1.0).unwrap(), 1).unwrap();
        assert!((v.c.re - 0.465_759_607_593_640_4).abs() < 1e-15);
        let v = torus_coeff_limit_bessel(1, EvolutionParams::quantum(1.0).unwrap(), 1).unwrap();
        assert!((v.c.norm() - 0.765_197_686_557_966_6).abs() < 1e-15);
        // e^{-i} J0(1)
        let expect = c(0.0, -1.0).exp() * 0.765_197_686_557_966_6;
        assert!((v.c - expect).norm() < 1e-15);

        let fin = torus_coeff_finite(&torus(1, 2), EvolutionParams::classical(1.0).unwrap(), 1).unwrap();
        assert!((fin.c.re - (1.0 + (-2.0f64).exp()) / 2.0).abs() < 1e-16);
        let fin = torus_coeff_finite(&torus(1, 256), EvolutionParams::classical(1.0).unwrap(), 1).unwrap();
        assert!((fin.c.re - 0.465_759_607_593_640_4).abs() < 1e-12);

        assert!(matches!(
            torus_coeff_limit_bessel(1, EvolutionParams::classical(50.0).unwrap(), 3),
            Err(Error::Envelope(_))
        ));
        assert!(torus_coeff_limit_bessel(3, EvolutionParams::classical(50.0).unwrap(), 3).is_ok());
    }

    #[test]
    fn dtm_examples() {
        assert_eq!(dtm_zeta_inverse(&two_cycle(), c(0.0, 0.0)).unwrap().zeta_inverse, ONE);
        let z = dtm_zeta_inverse(&two_cycle(), c(0.5, 0.0)).unwrap();
        assert!((z.zeta_inverse.re - 0.75f64.sqrt()).abs() < 1e-15);

        let spec = torus(1, 8);
        let p = build_torus_transition(&spec).unwrap();
        let u = c(0.3, 0.0);
        let det = dtm_zeta_inverse_determinant(&p, u).unwrap();
        let spectral = dtm_zeta_inverse(&torus_spectrum(&spec), u).unwrap().determinant_power(8);
        assert!((det - spectral).norm() < 1e-10);
        let grid = torus_dtm_zeta_inverse_finite(&spec, u).unwrap();
        assert!((grid.zeta_inverse - dtm_zeta_inverse(&torus_spectrum(&spec), u).unwrap().zeta_inverse).norm() < 1e-14);
    }

    #[test]
    fn dtm_coeff_examples() {
        for (d, side) in [(1, 3), (1, 10), (2, 5), (3, 4)] {
            let v = dtm_coeff(&torus_spectrum(&torus(d, side)), 1).unwrap();
            assert!(v.c.norm() < 1e-14, "d={d} N={side}");
        }
        assert!((dtm_coeff(&two_cycle(), 2).unwrap().c - ONE).norm() < 1e-15);
        let v = dtm_coeff(&torus_spectrum(&torus(1, 16)), 2).unwrap();
        assert!((v.c.re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn return_probability_examples() {
        assert_eq!(dtrw_return_probability(1, 2, 64).unwrap().value, 0.5);
        assert_eq!(dtrw_return_probability(1, 3, 64).unwrap().value, 0.0);
        assert_eq!(dtrw_return_probability(2, 2, 64).unwrap().value, 0.25);
        assert!(matches!(
            dtrw_return_probability(3, 6, 6),
            Err(Error::GridTooCoarse { .. })
        ));
        // d = 3, r = 2: the walk returns iff the second step undoes the first
        let v = dtrw_return_probability(3, 2, 8).unwrap();
        assert!((v.value - 1.0 / 6.0).abs() < 1e-15);
        assert!(v.two_grid_delta < 1e-15);
    }

    #[test]
    fn central_binomial_paths_agree() {
        // exact integer path vs. product recurrence across the switch at 60
        let product = |r: u32| (1..=r / 2).fold(1.0, |p, m| p * (2 * m - 1) as f64 / (2 * m) as f64);
        for r in (0..=60).step_by(2) {
            let a = central_binomial_probability(r);
            assert!((a - product(r)).abs() <= 1e-15 * a, "r={r}");
        }
        assert_eq!(central_binomial_probability(4), 6.0 / 16.0);
        let big = central_binomial_probability(1000);
        // Stirling: ~ 1/sqrt(π·500)
        assert!((big * (std::f64::consts::PI * 500.0).sqrt() - 1.0).abs() < 1e-3);
    }
}
