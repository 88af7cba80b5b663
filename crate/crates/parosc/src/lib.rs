//! Spectral calculus for the partial harmonic oscillator
//! `H = -d^2/drho^2 - Laplacian_x + |x|^2` on functions of `(rho, x)`.
//!
//! The operator is diagonalized by a Fourier transform in `rho` crossed with
//! Hermite expansions in `x`; its joint spectrum is parameterized by a real
//! frequency `tau` and a Hermite level `k`, with eigenvalue
//! `lambda = tau^2 + 2k + d`. This crate provides:
//!
//! * [`hermite`] — Hermite functions, projection kernels, the Mehler form;
//! * [`grids`] — sampling grids, Gauss and trapezoid quadrature, the
//!   unitary `rho`-DFT;
//! * [`transform`] — the mixed analysis/synthesis pair between grid samples
//!   and Fourier-Hermite coefficients;
//! * [`kernels`] — the closed-form heat kernel, polylogarithm-based
//!   derivative formulas, and multiplier kernels with bound probes;
//! * [`symbols`] — multiplier symbols `m(tau, k)`, Mikhlin-type
//!   certification, and Littlewood-Paley blocks;
//! * [`squarefn`] — the `g_N` and `g*_N` square functions and the
//!   associated empirical probes;
//! * [`verify`] — named verification suites behind the `parosc verify`
//!   subcommand;
//! * [`config`], [`report`], [`cli`] — driver plumbing.
//!
//! See the `examples/` directory for one runnable walkthrough per major
//! capability.

pub mod cli;
pub mod config;
pub mod error;
mod fft;
pub mod grids;
pub mod hermite;
pub mod kernels;
pub mod report;
pub mod squarefn;
pub mod symbols;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
pub use grids::{GridSpec, QuadratureRule, XRule};
pub use hermite::{HermiteTable, MultiIndex};
pub use kernels::{BDecomposition, HeatKernelParams, PolylogValue};
pub use squarefn::{GProfile, TimeQuadrature};
pub use symbols::{MikhlinCertificate, Symbol};
pub use transform::{GridFunction, MixedSpectrum};
