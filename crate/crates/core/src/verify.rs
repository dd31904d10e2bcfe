//! Self-checks behind `ctm-zeta verify`: each suite compares two independent
//! routes to the same quantity and reports the worst discrepancy against a
//! fixed tolerance.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;

use crate::error::Result;
use crate::lattice::{ctqw_pmf, ctrw_pmf, kernel, pde_residual};
use crate::linalg::{evolution_matrix, ComplexMatrix, EvolutionParams};
use crate::numeric::compensated_sum;
use crate::spectra::{build_torus_transition, hermitian_eigenvalues, torus_spectrum, TorusSpec};
use crate::special::{bessel_i_int, bessel_j_int};
use crate::zeta::{
    central_binomial_probability, ctm_coeff, ctm_coeff_trace, ctm_zeta_inverse_determinant,
    ctm_zeta_inverse_spectral, torus_coeff_finite, torus_coeff_limit_bessel,
    torus_dtm_coeff_finite,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub note: String,
}

impl CheckOutcome {
    fn new(name: &'static str, worst: f64, tolerance: f64) -> Self {
        Self {
            name,
            worst,
            tolerance,
            passed: worst <= tolerance,
            note: String::new(),
        }
    }

    fn failed(name: &'static str, tolerance: f64, note: String) -> Self {
        Self {
            name,
            worst: f64::INFINITY,
            tolerance,
            passed: false,
            note,
        }
    }

    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!(
            "{status} {:<28} worst {:.3e} (tolerance {:.0e})",
            self.name, self.worst, self.tolerance
        );
        if !self.note.is_empty() {
            s.push(' ');
            s.push_str(&self.note);
        }
        s
    }
}

const XIS: [f64; 3] = [0.0, FRAC_PI_4, FRAC_PI_2];

fn tori(level: Level) -> Vec<TorusSpec> {
    let sizes: &[(usize, usize)] = match level {
        Level::Quick => &[(1, 4), (2, 2), (1, 16), (2, 4)],
        Level::Full => &[(1, 4), (2, 2), (1, 16), (2, 4), (1, 64), (2, 8), (3, 4), (1, 128)],
    };
    sizes
        .iter()
        .map(|&(d, n)| TorusSpec::new(d, n).expect("valid torus"))
        .collect()
}

fn run_check(
    name: &'static str,
    tolerance: f64,
    body: impl FnOnce() -> Result<f64>,
) -> CheckOutcome {
    match body() {
        Ok(worst) => CheckOutcome::new(name, worst, tolerance),
        Err(e) => CheckOutcome::failed(name, tolerance, format!("error: {e}")),
    }
}

/// Runs every suite at the given level.
pub fn run(level: Level) -> Vec<CheckOutcome> {
    let tori = tori(level);
    vec![
        run_check("spectrum-jacobi-vs-closed", 1e-10, || spectrum_agreement(&tori)),
        run_check("zeta-determinant-vs-spectral", 1e-8, || oracle_triangle(&tori)),
        run_check("coeff-closed-trace-grid", 1e-9, || coeff_triple(&tori)),
        run_check("series-identity", 1e-10, series_identity),
        run_check("bessel-limit", 1e-10, || bessel_limit(level)),
        run_check("dtrw-return-probability", 1e-12, return_probabilities),
        run_check("unitarity", 1e-10, || unitarity(&tori)),
        run_check("stochasticity", 1e-12, || stochasticity(&tori)),
        run_check("lattice-conservation", 1e-10, lattice_conservation),
        run_check("pde-residual", 1e-6, pde_residuals),
        run_check("kernel-origin-vs-limit", 1e-12, kernel_origin),
        run_check("rotation-identity", 1e-11, rotation_identity),
    ]
}

fn spectrum_agreement(tori: &[TorusSpec]) -> Result<f64> {
    let mut worst = 0.0f64;
    for spec in tori.iter().filter(|s| s.vertex_count() <= 64) {
        let jac = hermitian_eigenvalues(&build_torus_transition(spec)?)?;
        let closed = torus_spectrum(spec);
        for (a, b) in jac.values().iter().zip(closed.values()) {
            worst = worst.max((a - b).norm());
        }
    }
    Ok(worst)
}

fn oracle_triangle(tori: &[TorusSpec]) -> Result<f64> {
    let us = [
        Complex64::new(0.3, 0.0),
        Complex64::new(0.0, 0.5),
        Complex64::new(-0.25, 0.25),
    ];
    let mut worst = 0.0f64;
    for spec in tori {
        let p = build_torus_transition(spec)?;
        let s = torus_spectrum(spec);
        for xi in XIS {
            for t in [0.0, 0.5, 2.0] {
                let params = EvolutionParams::new(xi, t)?;
                for u in us {
                    let det = ctm_zeta_inverse_determinant(&p, params, u)?;
                    let via_log = ctm_zeta_inverse_spectral(&s, params, u)?
                        .determinant_power(spec.vertex_count());
                    worst = worst.max((det - via_log).norm() / (1.0 + det.norm()));
                }
            }
        }
    }
    Ok(worst)
}

fn coeff_triple(tori: &[TorusSpec]) -> Result<f64> {
    let mut worst = 0.0f64;
    for spec in tori.iter().filter(|s| s.vertex_count() <= 64) {
        let p = build_torus_transition(spec)?;
        let s = torus_spectrum(spec);
        for xi in XIS {
            let params = EvolutionParams::new(xi, 0.7)?;
            for r in 1..=6 {
                let closed = ctm_coeff(&s, params, r)?.c;
                let trace = ctm_coeff_trace(&p, params, r)?.c;
                let grid = torus_coeff_finite(spec, params, r)?.c;
                worst = worst.max((closed - trace).norm()).max((closed - grid).norm());
            }
        }
    }
    Ok(worst)
}

fn series_identity() -> Result<f64> {
    let s = torus_spectrum(&TorusSpec::new(1, 8)?);
    let mut worst = 0.0f64;
    for xi in XIS {
        let params = EvolutionParams::new(xi, 1.0)?;
        let coeffs: Vec<Complex64> = (1..=60)
            .map(|r| ctm_coeff(&s, params, r).map(|c| c.c))
            .collect::<Result<_>>()?;
        for u in [
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, -0.5),
            Complex64::new(-0.3, 0.35),
        ] {
            let lhs = -ctm_zeta_inverse_spectral(&s, params, u)?.log_zeta_inverse;
            let rhs = compensated_sum(
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c * u.powu(i as u32 + 1) / (i as f64 + 1.0)),
            );
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}

fn bessel_limit(level: Level) -> Result<f64> {
    let dims: &[usize] = match level {
        Level::Quick => &[1, 2],
        Level::Full => &[1, 2, 3],
    };
    let mut worst = 0.0f64;
    for &d in dims {
        let spec = TorusSpec::new(d, 128)?;
        for xi in [0.0, FRAC_PI_2] {
            for (r, t) in [(1, 1.0), (2, 2.5), (5, 2.0)] {
                let params = EvolutionParams::new(xi, t)?;
                let grid = torus_coeff_finite(&spec, params, r)?.c;
                let closed = torus_coeff_limit_bessel(d, params, r)?.c;
                worst = worst.max((grid - closed).norm());
            }
        }
    }
    Ok(worst)
}

fn return_probabilities() -> Result<f64> {
    let mut worst = 0.0f64;
    let line = TorusSpec::new(1, 128)?;
    let plane = TorusSpec::new(2, 128)?;
    for r in 1..=20u32 {
        let p = central_binomial_probability(r);
        worst = worst.max((torus_dtm_coeff_finite(&line, r)?.c.re - p).abs());
        worst = worst.max((torus_dtm_coeff_finite(&plane, r)?.c.re - p * p).abs());
    }
    Ok(worst)
}

fn unitarity(tori: &[TorusSpec]) -> Result<f64> {
    let mut worst = 0.0f64;
    for spec in tori {
        let p = build_torus_transition(spec)?;
        for t in [0.5, 2.0] {
            let m = evolution_matrix(&p, EvolutionParams::quantum(t)?)?;
            let gram = m.conj_transpose().matmul(&m);
            worst = worst.max(gram.sub(&ComplexMatrix::identity(m.n())).norm_max());
        }
    }
    Ok(worst)
}

fn stochasticity(tori: &[TorusSpec]) -> Result<f64> {
    let mut worst = 0.0f64;
    for spec in tori {
        let p = build_torus_transition(spec)?;
        for t in [0.5, 2.0] {
            let m = evolution_matrix(&p, EvolutionParams::classical(t)?)?;
            let n = m.n();
            for col in 0..n {
                let sum: f64 = (0..n).map(|row| m.get(row, col).re).sum();
                worst = worst.max((sum - 1.0).abs());
            }
            let min = m.data().iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
            if min < -1e-14 {
                return Ok(f64::INFINITY);
            }
        }
    }
    Ok(worst)
}

fn lattice_conservation() -> Result<f64> {
    let mut worst = 0.0f64;
    for t in [0.5, 1.0, 2.0, 5.0, 10.0] {
        let classical: f64 = (-80..=80).map(|x| ctrw_pmf(t, x)).sum::<Result<f64>>()?;
        let quantum: f64 = (-80..=80).map(|x| ctqw_pmf(t, x)).sum::<Result<f64>>()?;
        worst = worst.max((classical - 1.0).abs()).max((quantum - 1.0).abs());
    }
    Ok(worst)
}

fn pde_residuals() -> Result<f64> {
    let mut worst = 0.0f64;
    for xi in XIS {
        let params = EvolutionParams::new(xi, 1.0)?;
        let coarse = pde_residual(params, 1e-3, 12)?;
        let fine = pde_residual(params, 5e-4, 12)?;
        let ratio = coarse / fine;
        if !(3.0..=5.0).contains(&ratio) {
            return Ok(f64::INFINITY);
        }
        worst = worst.max(coarse);
    }
    Ok(worst)
}

fn kernel_origin() -> Result<f64> {
    let mut worst = 0.0f64;
    for xi in XIS {
        for t in [0.5, 1.0, 2.0] {
            let params = EvolutionParams::new(xi, t)?;
            let k = kernel(params, 1)?;
            let limit = torus_coeff_limit_bessel(1, params, 1)?;
            worst = worst.max((k.value(0) - limit.c).norm());
        }
    }
    Ok(worst)
}

fn rotation_identity() -> Result<f64> {
    let mut worst = 0.0f64;
    for t in [0.5, 1.0, 2.0, 3.5, 5.0] {
        for x in -20i64..=20 {
            let lhs = bessel_i_int(x, Complex64::new(0.0, t))?;
            let rhs = Complex64::i().powi(x as i32) * bessel_j_int(x, Complex64::new(t, 0.0))?;
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        for outcome in run(Level::Quick) {
            assert!(outcome.passed, "{}", outcome.line());
        }
    }
}
