//! The d-dimensional torus `(ℤ mod N)^d` with nearest-neighbour walks.
//!
//! Vertices and momenta are both indexed by `k ∈ {0,…,N-1}^d` in row-major
//! order (`k_1` most significant). Every grid sum in the crate goes through
//! [`grid_sum`], so the enumeration and reduction order are fixed.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::{pairwise_sum, NeumaierSum};

use super::{Spectrum, TransitionMatrix};

/// Largest vertex count accepted when a dense matrix is built.
pub const MAX_MATRIX_VERTICES: u64 = 1 << 20;
/// Largest vertex count accepted by the closed-form spectrum and grid sums.
pub const MAX_SPECTRUM_VERTICES: u64 = 1 << 28;

/// `T^d_N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusSpec {
    d: usize,
    side: usize,
}

impl TorusSpec {
    pub fn new(d: usize, side: usize) -> Result<Self> {
        if d == 0 || side == 0 {
            return Err(Error::Size(format!(
                "torus needs d ≥ 1 and N ≥ 1 (got d = {d}, N = {side})"
            )));
        }
        let count = checked_pow(side, d);
        match count {
            Some(c) if c <= MAX_SPECTRUM_VERTICES => Ok(Self { d, side }),
            _ => Err(Error::Size(format!(
                "N^d = {side}^{d} exceeds the limit {MAX_SPECTRUM_VERTICES}"
            ))),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn vertex_count(&self) -> usize {
        self.side.pow(self.d as u32)
    }

    /// Momentum points in row-major order.
    pub fn momenta(&self) -> MomentumGrid {
        MomentumGrid {
            spec: *self,
            next: Some(vec![0; self.d]),
        }
    }
}

fn checked_pow(base: usize, exp: usize) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u64)?;
        if acc > MAX_SPECTRUM_VERTICES {
            return None;
        }
    }
    Some(acc)
}

/// A point `k` of the momentum grid, with `k̃_j = 2πk_j/N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentumIndex {
    pub k: Vec<usize>,
    pub side: usize,
}

impl MomentumIndex {
    pub fn tilde(&self) -> Vec<f64> {
        self.k
            .iter()
            .map(|&kj| 2.0 * PI * kj as f64 / self.side as f64)
            .collect()
    }

    /// `(1/d) Σ_j cos k̃_j`, the eigenvalue of the torus walk at this momentum.
    pub fn eigenvalue(&self) -> f64 {
        let sum: f64 = self.k.iter().map(|&kj| cos_two_pi_ratio(kj, self.side)).sum();
        sum / self.k.len() as f64
    }
}

pub struct MomentumGrid {
    spec: TorusSpec,
    next: Option<Vec<usize>>,
}

impl Iterator for MomentumGrid {
    type Item = MomentumIndex;

    fn next(&mut self) -> Option<MomentumIndex> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut pos = succ.len();
        let mut done = true;
        while pos > 0 {
            pos -= 1;
            succ[pos] += 1;
            if succ[pos] < self.spec.side {
                done = false;
                break;
            }
            succ[pos] = 0;
        }
        if !done {
            self.next = Some(succ);
        }
        Some(MomentumIndex {
            k: current,
            side: self.spec.side,
        })
    }
}

/// `cos(2πk/N)` evaluated on the reduced angle, so that `cos(2πk/N)` and
/// `cos(2π(N-k)/N)` are bitwise equal and quarter/half turns are exact.
pub fn cos_two_pi_ratio(k: usize, side: usize) -> f64 {
    let k = k % side;
    let k = k.min(side - k);
    if k == 0 {
        1.0
    } else if 2 * k == side {
        -1.0
    } else if 4 * k == side {
        0.0
    } else if 4 * k < side {
        (2.0 * PI * k as f64 / side as f64).cos()
    } else {
        // cos(x) = -cos(π - x) keeps the argument below π/2
        -(PI * (side - 2 * k) as f64 / side as f64).cos()
    }
}

fn cos_table(side: usize) -> Vec<f64> {
    (0..side).map(|k| cos_two_pi_ratio(k, side)).collect()
}

/// Torus eigenvalues `(1/d) Σ_j cos(2πk_j/N)` in row-major `k` order.
pub fn torus_eigenvalues(spec: &TorusSpec) -> Vec<f64> {
    let table = cos_table(spec.side);
    let d = spec.d;
    let mut out = Vec::with_capacity(spec.vertex_count());
    let mut k = vec![0usize; d];
    loop {
        let s: f64 = k.iter().map(|&kj| table[kj]).sum();
        out.push(s / d as f64);
        if !advance(&mut k, spec.side) {
            break;
        }
    }
    out
}

/// Closed-form spectrum of the torus walk, stored sorted descending.
pub fn torus_spectrum(spec: &TorusSpec) -> Spectrum {
    Spectrum::from_real(torus_eigenvalues(spec)).expect("torus spectrum is nonempty and finite")
}

fn advance(k: &mut [usize], side: usize) -> bool {
    for pos in (0..k.len()).rev() {
        k[pos] += 1;
        if k[pos] < side {
            return true;
        }
        k[pos] = 0;
    }
    false
}

/// `Σ_k f(λ_k)` over the momentum grid of `spec`, where
/// `λ_k = (1/d) Σ_j cos(2πk_j/N)`.
///
/// Work is split by the leading index `k_1`; each slice is summed in
/// row-major order with compensation, and the `N` partial sums are combined
/// by a fixed pairwise tree. The result is independent of the thread count.
pub fn grid_sum<F>(spec: &TorusSpec, f: F) -> Complex64
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let table = cos_table(spec.side);
    let d = spec.d;
    let partials: Vec<Complex64> = (0..spec.side)
        .into_par_iter()
        .map(|k1| {
            let mut acc = NeumaierSum::default();
            let mut rest = vec![0usize; d - 1];
            loop {
                let mut s = table[k1];
                for &kj in &rest {
                    s += table[kj];
                }
                acc.add(f(s / d as f64));
                if !advance(&mut rest, spec.side) {
                    break;
                }
            }
            acc.total()
        })
        .collect();
    pairwise_sum(&partials)
}

/// Dense transition matrix of the simple random walk on `T^d_N`.
///
/// Entry `(x, y)` is the number of `x`'s `2d` neighbour slots that land on
/// `y`, divided by `2d`. For `N ≤ 2` the neighbour slots coincide (multigraph
/// convention); `N = 1` gives the `1 × 1` matrix `[1]`.
pub fn build_torus_transition(spec: &TorusSpec) -> Result<TransitionMatrix> {
    let n = spec.vertex_count();
    if n as u64 > MAX_MATRIX_VERTICES {
        return Err(Error::Size(format!(
            "N^d = {n} exceeds the dense-matrix limit {MAX_MATRIX_VERTICES}"
        )));
    }
    let (d, side) = (spec.d, spec.side);
    let weight = 1.0 / (2 * d) as f64;
    let mut strides = vec![1usize; d];
    for j in (0..d.saturating_sub(1)).rev() {
        strides[j] = strides[j + 1] * side;
    }

    let mut entries = vec![0.0; n * n];
    let mut coords = vec![0usize; d];
    for x in 0..n {
        for j in 0..d {
            for step in [1, side - 1] {
                let shifted = (coords[j] + step) % side;
                let y = x - coords[j] * strides[j] + shifted * strides[j];
                entries[x * n + y] += weight;
            }
        }
        advance(&mut coords, side);
    }
    TransitionMatrix::new(n, entries)
}
