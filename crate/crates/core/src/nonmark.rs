//! Non-Markovianity quantifiers built on the negativity of the intermediate
//! `Z` matrix, plus a state-distance witness.
//!
//! The punctual measure is `N_p = μ/ν`, where `μ = ½ Σ(|λ| − λ)` is the
//! negative spectral weight of `Z(τ+ε, τ)` and `ν = Σ|λ|`, in the limit
//! `ε → 0`. Three channels are supported:
//!
//! * exact QBM: `N_p = ½ [1 − Δ / √(Δ² + γ² + Π²)]`
//! * its rotating-wave form: `N_p = ½ [1 − 2Δ / (|Δ + γ| + |Δ − γ|)]`
//! * pure damping: `N_p = ½ [1 − γ / |γ|]`

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix2;
use rayon::prelude::*;

use crate::coeffs::{CoefficientTable, Coefficients};
use crate::error::{Error, Result};
use crate::gchannel::{hermitian_eigenvalues, z_eigenvalues, z_first_order, GaussianState, QbmChannel, ZSpectrum};
use crate::specfun::expint_ei;

/// `|γ|` below this is treated as zero by the pure-damping measure.
pub const PD_GAMMA_TOLERANCE: f64 = 1e-12;

/// The dynamics whose divisibility is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    QbmExact,
    QbmRwa,
    Pd,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::QbmExact, Channel::QbmRwa, Channel::Pd];

    pub fn name(&self) -> &'static str {
        match self {
            Channel::QbmExact => "qbm_exact",
            Channel::QbmRwa => "qbm_rwa",
            Channel::Pd => "pd",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Channel::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown channel '{s}' (expected qbm_exact, qbm_rwa or pd)")))
    }
}

/// Punctual measure at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PunctualNM {
    pub tau: f64,
    pub value: f64,
    pub channel: Channel,
}

/// `μ/ν` of a spectrum; 0 when the spectrum vanishes.
pub fn np_from_spectrum(spec: &ZSpectrum) -> f64 {
    let l = [spec.plus, spec.minus];
    let nu: f64 = l.iter().map(|v| v.abs()).sum();
    if nu == 0.0 {
        return 0.0;
    }
    let mu: f64 = 0.5 * l.iter().map(|v| v.abs() - v).sum::<f64>();
    mu / nu
}

/// First-order spectrum of `Z/ε` for each channel:
/// exact `Δ ± √(Δ² + γ² + Π²)`, RWA `Δ ± γ`, PD `{2γ, 0}`.
pub fn channel_spectrum(channel: Channel, c: &Coefficients) -> Result<ZSpectrum> {
    match channel {
        Channel::QbmExact => z_eigenvalues(&z_first_order(c)),
        Channel::QbmRwa => Ok(hermitian_eigenvalues(c.delta, c.delta, c.gamma.abs())),
        Channel::Pd => Ok(hermitian_eigenvalues(c.gamma, c.gamma, c.gamma.abs())),
    }
}

/// Closed-form punctual measure of `channel` at the given coefficients.
pub fn np_value(channel: Channel, c: &Coefficients) -> f64 {
    let v = match channel {
        Channel::QbmExact => {
            let r = c.delta.hypot(c.gamma).hypot(c.pi);
            if r == 0.0 {
                0.0
            } else {
                0.5 * (1.0 - c.delta / r)
            }
        }
        Channel::QbmRwa => {
            // (|Δ+γ| + |Δ−γ|)/2 = max(|Δ|, |γ|); this form is exactly binary when |Δ| ≥ |γ|.
            let den = c.delta.abs().max(c.gamma.abs());
            if den == 0.0 {
                0.0
            } else {
                0.5 * (1.0 - c.delta / den)
            }
        }
        Channel::Pd => {
            if c.gamma.abs() < PD_GAMMA_TOLERANCE {
                0.0
            } else {
                0.5 * (1.0 - c.gamma.signum())
            }
        }
    };
    // Rounding can push Δ/r a few ulps past 1.
    v.clamp(0.0, 1.0)
}

/// Punctual measure of `channel` at `τ`.
pub fn np_punctual(table: &CoefficientTable, channel: Channel, tau: f64) -> Result<PunctualNM> {
    Ok(PunctualNM {
        tau,
        value: np_value(channel, &table.at(tau)?),
        channel,
    })
}

pub fn np_qbm_exact(table: &CoefficientTable, tau: f64) -> Result<PunctualNM> {
    np_punctual(table, Channel::QbmExact, tau)
}

pub fn np_rwa(table: &CoefficientTable, tau: f64) -> Result<PunctualNM> {
    np_punctual(table, Channel::QbmRwa, tau)
}

pub fn np_pd(table: &CoefficientTable, tau: f64) -> Result<PunctualNM> {
    np_punctual(table, Channel::Pd, tau)
}

/// Long-time exact-QBM measure for an Ohmic bath:
/// `½ − θπx / √(4θ²x² [(Ei(1/x) − e^{2/x} Ei(−1/x))² + π²] + π²)`.
pub fn np_asymptotic(x: f64, theta: f64) -> Result<f64> {
    if !(x > 0.0) || !(theta > 0.0) || !x.is_finite() || !theta.is_finite() {
        return Err(Error::Domain {
            function: "np_asymptotic",
            reason: format!("x and θ must be finite and > 0, got x = {x}, θ = {theta}"),
        });
    }
    let z = 1.0 / x;
    let e = expint_ei(z)?.value - (2.0 * z).exp() * expint_ei(-z)?.value;
    if !e.is_finite() {
        return Err(Error::Overflow {
            function: "np_asymptotic",
            argument: x,
        });
    }
    let tx = theta * x;
    Ok(0.5 - tx * PI / (4.0 * tx * tx * (e * e + PI * PI) + PI * PI).sqrt())
}

/// Time-averaged measure `∫ N_p / ∫ f(N_p)` over `[a, b]`, with `f(y) = 1` for
/// `y ≠ 0`, by the trapezoidal rule on the grid nodes inside the interval
/// plus its endpoints. Returns 0 if `N_p` vanishes on the whole interval.
pub fn np_integrated(table: &CoefficientTable, channel: Channel, a: f64, b: f64) -> Result<f64> {
    if !(a < b) {
        return Err(Error::Range {
            tau: a,
            tau_max: b,
        });
    }
    let mut ts = vec![a];
    ts.extend(table.tau_grid().iter().copied().filter(|&t| t > a && t < b));
    ts.push(b);
    let values = ts
        .iter()
        .map(|&t| Ok(np_value(channel, &table.at(t)?)))
        .collect::<Result<Vec<f64>>>()?;
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..ts.len() - 1 {
        let h = ts[k + 1] - ts[k];
        num += 0.5 * h * (values[k] + values[k + 1]);
        let ind = |v: f64| if v != 0.0 { 1.0 } else { 0.0 };
        den += 0.5 * h * (ind(values[k]) + ind(values[k + 1]));
    }
    Ok(if den == 0.0 { 0.0 } else { num / den })
}

/// Contractive distances between Gaussian states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StateDistance {
    /// `√(2 (1 − √F))`.
    #[default]
    Bures,
    /// `√(1 − F)`.
    Sine,
}

/// Fidelity `F = (Tr √(√ρ₁ ρ₂ √ρ₁))²` of two single-mode Gaussian states.
pub fn gaussian_fidelity(a: &GaussianState, b: &GaussianState) -> f64 {
    let sum = a.cov + b.cov;
    let d = sum.determinant();
    let delta = (4.0 * (a.det() - 0.25) * (b.det() - 0.25)).max(0.0);
    let u = a.mean - b.mean;
    let inv = Matrix2::new(sum[(1, 1)], -sum[(0, 1)], -sum[(1, 0)], sum[(0, 0)]) / d;
    let gauss = (-0.5 * u.dot(&(inv * u))).exp();
    (gauss / ((d + delta).sqrt() - delta.sqrt())).clamp(0.0, 1.0)
}

impl StateDistance {
    pub fn eval(&self, a: &GaussianState, b: &GaussianState) -> f64 {
        let f = gaussian_fidelity(a, b);
        match self {
            StateDistance::Bures => (2.0 * (1.0 - f.sqrt())).max(0.0).sqrt(),
            StateDistance::Sine => (1.0 - f).max(0.0).sqrt(),
        }
    }
}

/// Input pair families for the witness. `standard` is the union of the others.
pub fn named_pairs(name: &str) -> Option<Vec<(GaussianState, GaussianState)>> {
    let coherent = || {
        [0.0, 60.0, 120.0]
            .iter()
            .map(|deg: &f64| {
                let (s, c) = deg.to_radians().sin_cos();
                (GaussianState::coherent(c, s), GaussianState::coherent(-c, -s))
            })
            .collect::<Vec<_>>()
    };
    let squeezed = || vec![(GaussianState::squeezed(0.5, 0.0), GaussianState::squeezed(0.5, 0.5 * PI))];
    let thermal = || vec![(GaussianState::vacuum(), GaussianState::thermal(1.0))];
    let mixed = || vec![(GaussianState::coherent(1.0, 0.0), GaussianState::squeezed(0.5, 0.0))];
    Some(match name {
        "coherent" => coherent(),
        "squeezed" => squeezed(),
        "thermal" => thermal(),
        "mixed" => mixed(),
        "standard" => [coherent(), squeezed(), thermal(), mixed()].concat(),
        _ => return None,
    })
}

/// Coherent, squeezed, thermal and mixed-type pairs (six in total).
pub fn standard_pair_family() -> Vec<(GaussianState, GaussianState)> {
    named_pairs("standard").expect("built-in family")
}

/// Distances, their time derivatives and the clamped witness
/// `max(0, min_pairs dD/dτ)` on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessResult {
    pub tau_grid: Vec<f64>,
    /// `distances[p][k]`: pair `p` at `tau_grid[k]`.
    pub distances: Vec<Vec<f64>>,
    pub derivatives: Vec<Vec<f64>>,
    pub min_derivative: Vec<f64>,
    pub witness: Vec<f64>,
}

/// Evolves every pair under the exact QBM channel and evaluates the witness.
/// Derivatives are central differences on `tau_grid`, one-sided at the ends.
pub fn distance_witness(
    channel: &QbmChannel<'_>,
    pairs: &[(GaussianState, GaussianState)],
    tau_grid: &[f64],
    distance: StateDistance,
) -> Result<WitnessResult> {
    if pairs.is_empty() {
        return Err(Error::Config("witness needs at least one input pair".into()));
    }
    if tau_grid.len() < 2 {
        return Err(Error::Config("witness needs at least two time points".into()));
    }
    if tau_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config("witness time grid must be strictly increasing".into()));
    }
    for (a, b) in pairs {
        a.validate()?;
        b.validate()?;
    }
    let per_time: Vec<Vec<f64>> = tau_grid
        .par_iter()
        .map(|&t| {
            let map = channel.channel_map(t)?;
            Ok(pairs.iter().map(|(a, b)| distance.eval(&map.apply(a), &map.apply(b))).collect())
        })
        .collect::<Result<_>>()?;
    let n = tau_grid.len();
    let distances: Vec<Vec<f64>> = (0..pairs.len()).map(|p| per_time.iter().map(|row| row[p]).collect()).collect();
    let derivatives: Vec<Vec<f64>> = distances
        .iter()
        .map(|d| {
            (0..n)
                .map(|k| {
                    let (i, j) = (k.saturating_sub(1), (k + 1).min(n - 1));
                    (d[j] - d[i]) / (tau_grid[j] - tau_grid[i])
                })
                .collect()
        })
        .collect();
    let min_derivative: Vec<f64> = (0..n)
        .map(|k| derivatives.iter().map(|d| d[k]).fold(f64::INFINITY, f64::min))
        .collect();
    let witness = min_derivative.iter().map(|&v| v.max(0.0)).collect();
    Ok(WitnessResult {
        tau_grid: tau_grid.to_vec(),
        distances,
        derivatives,
        min_derivative,
        witness,
    })
}
