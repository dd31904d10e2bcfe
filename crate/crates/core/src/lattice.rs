//! Walks on ℤ: the discrete Laplacian, the fundamental solutions
//! `g_{e^{iξ}t}(x) = e^{-e^{iξ}t} I_x(e^{iξ}t)` of
//! `∂ψ/∂t = e^{iξ} · ½Δψ`, convolution evolution of finitely supported
//! initial data, and the classical/quantum walk distributions.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::EvolutionParams;
use crate::numeric::compensated_sum;
use crate::special::{bessel_i_int, bessel_j_int};

/// Largest time accepted by the kernel and the walk distributions.
pub const MAX_TIME: f64 = 50.0;
/// Largest site `|x|` accepted by the walk distributions.
pub const MAX_SITE: i64 = 512;
/// Auto-widening of a kernel stops at this radius.
pub const RADIUS_CAP: usize = 512;
/// Truncation target for kernel normalization residuals.
pub const KERNEL_RESIDUAL: f64 = 1e-12;

const PROBABILITY_TOL: f64 = 1e-10;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A finitely supported complex function on ℤ: `values[i]` sits at site
/// `offset + i`; every other site holds zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    offset: i64,
    values: Vec<Complex64>,
    probability: bool,
}

impl LatticeState {
    pub fn new(offset: i64, values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Size("lattice state needs at least one site".into()));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParams("non-finite lattice value".into()));
        }
        Ok(Self {
            offset,
            values,
            probability: false,
        })
    }

    /// A probability mass function: nonnegative reals summing to one.
    pub fn probability(offset: i64, masses: Vec<f64>) -> Result<Self> {
        if masses.iter().any(|&m| m.is_nan() || m < 0.0) {
            return Err(Error::InvalidParams("probabilities must be ≥ 0".into()));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_TOL {
            return Err(Error::InvalidParams(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let mut state = Self::new(offset, masses.into_iter().map(|m| Complex64::new(m, 0.0)).collect())?;
        state.probability = true;
        Ok(state)
    }

    /// Unit mass at `site`.
    pub fn delta(site: i64) -> Self {
        Self {
            offset: site,
            values: vec![ONE],
            probability: true,
        }
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_probability(&self) -> bool {
        self.probability
    }

    /// First and last stored site.
    pub fn window(&self) -> (i64, i64) {
        (self.offset, self.offset + self.values.len() as i64 - 1)
    }

    pub fn get(&self, site: i64) -> Complex64 {
        let idx = site - self.offset;
        if idx < 0 {
            return ZERO;
        }
        self.values.get(idx as usize).copied().unwrap_or(ZERO)
    }

    pub fn total(&self) -> Complex64 {
        compensated_sum(self.values.iter().copied())
    }

    /// `|ψ(x)|²` at every site, flagged as a distribution when it sums to one.
    pub fn squared_modulus(&self) -> Self {
        let values: Vec<Complex64> = self
            .values
            .iter()
            .map(|z| Complex64::new(z.norm_sqr(), 0.0))
            .collect();
        let total = compensated_sum(values.iter().copied()).re;
        Self {
            offset: self.offset,
            values,
            probability: (total - 1.0).abs() <= PROBABILITY_TOL,
        }
    }
}

/// `ΔF(x) = F(x-1) + F(x+1) - 2F(x)` on the window widened by one site on
/// each side.
pub fn discrete_laplacian(state: &LatticeState) -> LatticeState {
    let (lo, hi) = state.window();
    let values = ((lo - 1)..=(hi + 1))
        .map(|x| state.get(x - 1) + state.get(x + 1) - state.get(x) * 2.0)
        .collect();
    LatticeState {
        offset: lo - 1,
        values,
        probability: false,
    }
}

/// Tabulated fundamental solution `g_{e^{iξ}t}(x)` for `|x| ≤ radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    params: EvolutionParams,
    radius: usize,
    values: Vec<Complex64>,
}

impl Kernel {
    pub fn params(&self) -> EvolutionParams {
        self.params
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Values for sites `-radius..=radius`.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, x: i64) -> Complex64 {
        if x.unsigned_abs() as usize > self.radius {
            ZERO
        } else {
            self.values[(x + self.radius as i64) as usize]
        }
    }

    /// `|1 - Σ_x g(x)|`.
    pub fn mass_residual(&self) -> f64 {
        (ONE - compensated_sum(self.values.iter().copied())).norm()
    }

    /// `|1 - Σ_x |g(x)|²|`; meaningful at `ξ = π/2`.
    pub fn unitary_residual(&self) -> f64 {
        let s = compensated_sum(self.values.iter().map(|z| Complex64::new(z.norm_sqr(), 0.0)));
        (1.0 - s.re).abs()
    }

    /// `|g(-R)| + |g(R)|`.
    pub fn edge_magnitude(&self) -> f64 {
        self.values[0].norm() + self.values[self.values.len() - 1].norm()
    }

    /// The largest of the residuals the truncation policy controls.
    pub fn truncation_residual(&self) -> f64 {
        let mut r = self.mass_residual().max(self.edge_magnitude());
        if self.params.xi() == std::f64::consts::FRAC_PI_2 {
            r = r.max(self.unitary_residual());
        }
        r
    }

    pub fn as_state(&self) -> LatticeState {
        LatticeState {
            offset: -(self.radius as i64),
            values: self.values.clone(),
            probability: self.params.xi() == 0.0,
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > MAX_TIME {
        Err(Error::Envelope(format!("t = {t} exceeds {MAX_TIME}")))
    } else {
        Ok(())
    }
}

/// `g_{e^{iξ}t}(x) = e^{-z} I_x(z)` with `z = e^{iξ} t`.
pub fn kernel_value(params: EvolutionParams, x: i64) -> Result<Complex64> {
    check_time(params.t())?;
    let z = params.phase() * params.t();
    Ok((-z).exp() * bessel_i_int(x, z)?)
}

/// Tabulates `g_{e^{iξ}t}` on `|x| ≤ radius`, widening one site at a time
/// until the truncation residual is at most `1e-12`.
///
/// The residual is the largest of `|1 - Σ g|` (the generating function gives
/// `Σ_x g(x) = 1` for every `ξ`), the edge magnitude `|g(±R)|`, and at
/// `ξ = π/2` also `|1 - Σ |g|²|`. Widening stops at radius 512.
pub fn kernel(params: EvolutionParams, radius: usize) -> Result<Kernel> {
    check_time(params.t())?;
    if params.t() == 0.0 {
        let mut values = vec![ZERO; 2 * radius + 1];
        values[radius] = ONE;
        return Ok(Kernel {
            params,
            radius,
            values,
        });
    }

    let half: Vec<Complex64> = (0..=radius as i64)
        .map(|x| kernel_value(params, x))
        .collect::<Result<_>>()?;
    let mut kernel = Kernel {
        params,
        radius,
        values: mirror(&half),
    };
    let mut half = half;
    while kernel.truncation_residual() > KERNEL_RESIDUAL {
        if kernel.radius >= RADIUS_CAP {
            return Err(Error::Truncation {
                residual: kernel.truncation_residual(),
                target: KERNEL_RESIDUAL,
                cap: RADIUS_CAP,
            });
        }
        let next = kernel.radius + 1;
        half.push(kernel_value(params, next as i64)?);
        kernel.radius = next;
        kernel.values = mirror(&half);
    }
    Ok(kernel)
}

/// `[h_R, …, h_1, h_0, h_1, …, h_R]`; `g` is even in `x` since `I_{-x} = I_x`.
fn mirror(half: &[Complex64]) -> Vec<Complex64> {
    half.iter().rev().chain(half.iter().skip(1)).copied().collect()
}

/// `ψ(t, ·) = g_{e^{iξ}t} ∗ f`. The output window is the Minkowski sum of the
/// kernel and initial windows; `t = 0` returns the initial state unchanged.
pub fn evolve(
    initial: &LatticeState,
    params: EvolutionParams,
    radius: usize,
) -> Result<LatticeState> {
    if params.t() == 0.0 {
        return Ok(initial.clone());
    }
    let k = kernel(params, radius)?;
    let r = k.radius() as i64;
    let f = initial.values();
    let len = f.len() + 2 * k.radius();
    let offset = initial.offset() - r;
    let values = (0..len as i64)
        .map(|i| {
            // out[x] = Σ_j f_j g(x - (offset_f + j)), j ascending
            let x = offset + i;
            let lo = (x - r - initial.offset()).max(0) as usize;
            let hi = ((x + r - initial.offset()) as usize).min(f.len() - 1);
            (lo..=hi)
                .map(|j| f[j] * k.value(x - initial.offset() - j as i64))
                .sum()
        })
        .collect();
    Ok(LatticeState {
        offset,
        values,
        probability: initial.is_probability() && params.xi() == 0.0,
    })
}

fn check_site(x: i64) -> Result<()> {
    if x.abs() > MAX_SITE {
        Err(Error::Envelope(format!("|x| = {} exceeds {MAX_SITE}", x.abs())))
    } else {
        Ok(())
    }
}

fn check_walk_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParams(format!("t = {t} must be ≥ 0")));
    }
    check_time(t)
}

/// `P(S_t = x) = e^{-t} I_x(t)` for the continuous-time random walk.
pub fn ctrw_pmf(t: f64, x: i64) -> Result<f64> {
    check_walk_time(t)?;
    check_site(x)?;
    Ok(((-t).exp() * bessel_i_int(x, Complex64::new(t, 0.0))?.re).max(0.0))
}

/// `P(X_t = x) = J_x(t)²` for the continuous-time quantum walk.
pub fn ctqw_pmf(t: f64, x: i64) -> Result<f64> {
    check_walk_time(t)?;
    check_site(x)?;
    Ok(bessel_j_int(x, Complex64::new(t, 0.0))?.re.powi(2))
}

/// Central-difference residual of `∂ψ/∂t = e^{iξ} · ½Δψ` for the
/// delta-initialized solution `ψ(t, x) = g_{e^{iξ}t}(x)`, maximized over
/// `|x| ≤ radius`, at time `params.t()` with step `h`.
pub fn pde_residual(params: EvolutionParams, h: f64, radius: usize) -> Result<f64> {
    let t = params.t();
    if !(h > 0.0 && h < t) {
        return Err(Error::InvalidParams(format!("need 0 < h < t (h = {h}, t = {t})")));
    }
    let at = |time: f64, x: i64| -> Result<Complex64> {
        kernel_value(EvolutionParams::new(params.xi(), time)?, x)
    };
    let phase = params.phase();
    let r = radius as i64;
    let mut worst = 0.0f64;
    for x in -r..=r {
        let dt = (at(t + h, x)? - at(t - h, x)?) / (2.0 * h);
        let lap = at(t, x - 1)? + at(t, x + 1)? - at(t, x)? * 2.0;
        worst = worst.max((dt - phase * 0.5 * lap).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn laplacian_examples() {
        let ones = LatticeState::new(-10, vec![ONE; 21]).unwrap();
        let lap = discrete_laplacian(&ones);
        assert_eq!(lap.window(), (-11, 11));
        for x in -9..=9 {
            assert_eq!(lap.get(x), ZERO);
        }
        let d = discrete_laplacian(&LatticeState::delta(0));
        assert_eq!(d.values(), &[ONE, c(-2.0, 0.0), ONE]);
        assert_eq!(d.offset(), -1);
        let lin = LatticeState::new(-5, (-5..=5).map(|x| c(x as f64, 0.0)).collect()).unwrap();
        let lap = discrete_laplacian(&lin);
        for x in -4..=4 {
            assert_eq!(lap.get(x), ZERO);
        }
    }

    #[test]
    fn kernel_examples() {
        for xi in [0.0, 0.9, FRAC_PI_2] {
            let k = kernel(EvolutionParams::new(xi, 0.0).unwrap(), 3).unwrap();
            assert_eq!(k.value(0), ONE);
            assert_eq!(k.values().iter().filter(|z| **z != ZERO).count(), 1);
        }
        let k = kernel(EvolutionParams::classical(1.0).unwrap(), 4).unwrap();
        assert!((k.value(0).re - 0.465_759_607_593_640_4).abs() < 1e-15);
        assert!(k.mass_residual() <= 1e-12);
        let q = kernel(EvolutionParams::quantum(1.0).unwrap(), 4).unwrap();
        assert!((q.value(0).norm_sqr() - 0.585_527_499_513_664_0).abs() < 1e-15);
        let expect = c(0.0, -1.0).exp() * 0.765_197_686_557_966_6;
        assert!((q.value(0) - expect).norm() < 1e-15);
        assert!(q.unitary_residual() <= 1e-10);
    }

    #[test]
    fn kernel_widens_and_respects_cap() {
        let k = kernel(EvolutionParams::classical(10.0).unwrap(), 1).unwrap();
        assert!(k.radius() > 10);
        assert!(k.truncation_residual() <= KERNEL_RESIDUAL);
        // a narrower kernel would not meet the target
        let half: Vec<Complex64> = (0..k.radius() as i64)
            .map(|x| kernel_value(k.params(), x).unwrap())
            .collect();
        let narrow = Kernel {
            params: k.params(),
            radius: k.radius() - 1,
            values: mirror(&half),
        };
        assert!(narrow.truncation_residual() > KERNEL_RESIDUAL);
        assert!(matches!(
            kernel(EvolutionParams::classical(51.0).unwrap(), 1),
            Err(Error::Envelope(_))
        ));
    }

    #[test]
    fn evolve_examples() {
        let params = EvolutionParams::new(FRAC_PI_4, 1.5).unwrap();
        let k = kernel(params, 1).unwrap();
        let out = evolve(&LatticeState::delta(0), params, 1).unwrap();
        assert_eq!(out.values(), k.values());
        assert_eq!(out.offset(), -(k.radius() as i64));

        let f = LatticeState::new(3, vec![c(1.0, 2.0), c(-0.5, 0.0)]).unwrap();
        assert_eq!(evolve(&f, EvolutionParams::quantum(0.0).unwrap(), 4).unwrap(), f);

        let pmf = evolve(&LatticeState::delta(0), EvolutionParams::classical(2.0).unwrap(), 1).unwrap();
        assert!(pmf.is_probability());
        assert!((pmf.total().re - 1.0).abs() < 1e-10);
        assert!(pmf.values().iter().all(|z| z.re >= 0.0 && z.im == 0.0));
    }

    #[test]
    fn evolve_shifted_initial_data() {
        // convolution commutes with translation
        let params = EvolutionParams::new(0.7, 0.8).unwrap();
        let base = evolve(&LatticeState::delta(0), params, 1).unwrap();
        let shifted = evolve(&LatticeState::delta(5), params, 1).unwrap();
        for x in -20..=20 {
            assert_eq!(base.get(x), shifted.get(x + 5));
        }
    }

    #[test]
    fn quantum_distribution_is_normalized() {
        let psi = evolve(&LatticeState::delta(0), EvolutionParams::quantum(3.0).unwrap(), 1).unwrap();
        assert!(!psi.is_probability());
        let dist = psi.squared_modulus();
        assert!(dist.is_probability());
        for x in -5..=5 {
            assert!((dist.get(x).re - ctqw_pmf(3.0, x).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn pmf_examples() {
        assert_eq!(ctrw_pmf(0.0, 0).unwrap(), 1.0);
        assert_eq!(ctrw_pmf(0.0, 3).unwrap(), 0.0);
        assert!((ctrw_pmf(1.0, 0).unwrap() - 0.465_759_607_593_640_4).abs() < 1e-15);
        assert_eq!(ctqw_pmf(0.0, 0).unwrap(), 1.0);
        assert_eq!(ctqw_pmf(0.0, 1).unwrap(), 0.0);
        assert!((ctqw_pmf(1.0, 0).unwrap() - 0.585_527_499_513_664_0).abs() < 1e-15);
        assert!(ctrw_pmf(60.0, 0).is_err());
        assert!(ctqw_pmf(1.0, 513).is_err());
        assert!(ctqw_pmf(-1.0, 0).is_err());
        for t in [0.3, 4.0] {
            for x in 1..30 {
                assert_eq!(ctrw_pmf(t, x).unwrap(), ctrw_pmf(t, -x).unwrap());
                assert_eq!(ctqw_pmf(t, x).unwrap(), ctqw_pmf(t, -x).unwrap());
            }
        }
    }

    #[test]
    fn state_validation() {
        assert!(LatticeState::new(0, vec![]).is_err());
        assert!(LatticeState::probability(0, vec![0.5, 0.4]).is_err());
        assert!(LatticeState::probability(0, vec![1.5, -0.5]).is_err());
        assert!(LatticeState::probability(-1, vec![0.25, 0.5, 0.25]).unwrap().is_probability());
    }

    #[test]
    fn pde_residual_is_second_order() {
        for xi in [0.0, FRAC_PI_4, FRAC_PI_2] {
            let params = EvolutionParams::new(xi, 1.0).unwrap();
            let r1 = pde_residual(params, 1e-3, 10).unwrap();
            let r2 = pde_residual(params, 5e-4, 10).unwrap();
            assert!(r1 <= 1e-6, "ξ={xi}: {r1:e}");
            let ratio = r1 / r2;
            assert!((3.0..=5.0).contains(&ratio), "ξ={xi}: ratio {ratio}");
        }
        assert!(pde_residual(EvolutionParams::classical(1.0).unwrap(), 2.0, 3).is_err());
    }
}
