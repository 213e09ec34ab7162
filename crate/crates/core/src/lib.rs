#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(a > b)` also rejects NaN
#![allow(clippy::excessive_precision)] // reference tables kept verbatim

//! Exact and approximated dynamics of single-mode Gaussian quantum channels
//! and their non-Markovianity, quantified by the violation of divisibility of
//! the dynamical map.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: exponential integral `Ei` and the hyperbolic integrals
//!   `Shi`/`Chi`.
//! * [`bath`]: Ohmic-family spectral densities and the high-temperature
//!   frequency kernels.
//! * [`coeffs`]: time-dependent damping and diffusion coefficients of the
//!   quantum Brownian motion master equation, tabulated on a uniform grid.
//! * [`gchannel`]: the `(X, Y)` covariance maps, the `W̄` noise matrix,
//!   intermediate maps and the `Z` matrix whose negativity certifies
//!   non-divisibility.
//! * [`nonmark`]: punctual, integrated and asymptotic measures, plus the
//!   state-distance witness.
//!
//! All quantities are dimensionless: frequencies in units of the bath cutoff
//! `ω_c`, time as `τ = ω_c t`, temperature as `θ = k_B T / (ħ ω_c)`, and the
//! system frequency is `ω_0 = 1 / x`.

pub mod bath;
pub mod coeffs;
pub mod error;
pub mod gchannel;
pub mod nonmark;
pub mod quad;
pub mod specfun;

pub use bath::{KernelMethod, KernelSample, SpectralDensity};
pub use coeffs::{
    build_table, AsymptoticCoefficients, ChannelParams, CoefficientTable, Coefficients,
};
pub use error::{Error, Result};
pub use gchannel::{ChannelMap, GaussianState, QbmChannel, WBar, ZMatrix, ZSpectrum};
pub use nonmark::{Channel, PunctualNM, StateDistance, WitnessResult};
pub use specfun::SpecFunResult;
