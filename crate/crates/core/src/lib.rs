//! Zeta functions of continuous-time walks on finite graphs.
//!
//! For a transposed stochastic matrix `P` the continuous-time evolution is
//! `P_t = exp(e^{iξ} t (P - I))`, interpolating between the classical random
//! walk (`ξ = 0`) and the quantum walk (`ξ = π/2`). The zeta function is
//! `det(I - u P_t)^{-1/n}`; its logarithm expands in the averaged traces
//! `C_r = tr(P_t^r)/n`.
//!
//! * [`spectra`]: transition matrices, torus spectra, symmetric eigensolver.
//! * [`linalg`]: dense complex kernels and the evolution matrix.
//! * [`special`]: Bessel functions `I_α`, `J_α` of complex argument.
//! * [`zeta`]: zeta values and coefficients by spectrum, determinant, trace,
//!   grid quadrature and Bessel closed forms.
//! * [`lattice`]: kernels, evolution and walk distributions on ℤ.
//! * [`cli`]: the `ctm-zeta` command-line front end.

pub mod cli;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod numeric;
pub mod spectra;
pub mod special;
pub mod verify;
pub mod zeta;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, EvolutionParams};
pub use num_complex::Complex64;
pub use spectra::{Spectrum, TorusSpec, TransitionMatrix};
