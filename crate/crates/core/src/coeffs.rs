//! Time-dependent coefficients of the quantum Brownian motion master
//! equation in the high-temperature limit:
//!
//! * damping `γ(τ) = α² ∫_0^τ K_sin(u) sin(u/x) du`
//! * direct diffusion `Δ(τ) = α² ∫_0^τ K_cos(u, θ) cos(u/x) du`
//! * anomalous diffusion `Π(τ) = α² ∫_0^τ K_cos(u, θ) sin(u/x) du`
//! * cumulative damping `Γ(τ) = 2 ∫_0^τ γ(s) ds`
//!
//! The integrands ("rates") are sampled once at the 8-point Gauss–Legendre
//! nodes of every cell of a uniform grid. Grid values are cumulative sums of
//! the cell integrals; off-grid values integrate the degree-7 interpolant of
//! the cell's samples, so lookups cost no further kernel evaluations.
//! `Γ` follows from exchanging the order of integration,
//! `Γ(τ) = 2 [τ γ(τ) − α² ∫_0^τ u K_sin(u) sin(u/x) du]`.

use std::f64::consts::PI;
use std::io::Write;

use log::warn;
use rayon::prelude::*;

use crate::bath::{kernel_cos_thermal, kernel_sin, SpectralDensity};
use crate::error::{Error, Result};
use crate::quad::{gauss_legendre8, GL8_NODES, GL8_WEIGHTS};
use crate::specfun;

/// Weak-coupling default for `α`.
pub const DEFAULT_ALPHA: f64 = 0.1;
/// Smallest admitted `x`.
pub const MIN_X: f64 = 0.05;
/// Below this `x` the high-temperature closed forms lose validity.
pub const RECOMMENDED_MIN_X: f64 = 0.1;
/// Target number of grid points per oscillation period `2πx`.
pub const POINTS_PER_PERIOD: f64 = 40.0;
/// Fewer points per period than this is rejected.
pub const MIN_POINTS_PER_PERIOD: f64 = 20.0;
/// Upper bound on the automatic grid step (resolves the unit-scale kernels).
pub const MAX_STEP: f64 = 0.05;

/// Dimensionless simulation parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// `ω_c / ω_0`.
    pub x: f64,
    /// `k_B T / (ħ ω_c)`.
    pub theta: f64,
    /// System–bath coupling.
    pub alpha: f64,
    pub sd: SpectralDensity,
    pub tau_max: f64,
    /// Number of grid points including `τ = 0`; `None` picks
    /// `h = min(2πx/40, 0.05)`.
    pub n_grid: Option<usize>,
}

impl ChannelParams {
    /// Ohmic bath, `α = 0.1`, `τ_max = 50`, automatic grid.
    pub fn new(x: f64, theta: f64) -> Self {
        Self {
            x,
            theta,
            alpha: DEFAULT_ALPHA,
            sd: SpectralDensity::ohmic(),
            tau_max: 50.0,
            n_grid: None,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_spectral_density(mut self, sd: SpectralDensity) -> Self {
        self.sd = sd;
        self
    }

    pub fn with_tau_max(mut self, tau_max: f64) -> Self {
        self.tau_max = tau_max;
        self
    }

    pub fn with_n_grid(mut self, n_grid: usize) -> Self {
        self.n_grid = Some(n_grid);
        self
    }

    /// `ω_0 = 1/x`.
    pub fn omega0(&self) -> f64 {
        1.0 / self.x
    }

    /// Checks bounds and returns the number of grid points to use.
    pub fn validate(&self) -> Result<usize> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be finite and > 0, got {v}")))
            }
        };
        positive("x", self.x)?;
        positive("theta", self.theta)?;
        positive("alpha", self.alpha)?;
        positive("tau_max", self.tau_max)?;
        if self.x < MIN_X {
            return Err(Error::Config(format!(
                "x = {} is below the admitted minimum {MIN_X}",
                self.x
            )));
        }
        if self.x < RECOMMENDED_MIN_X {
            warn!(
                "x = {} < {RECOMMENDED_MIN_X}: the high-temperature closed forms are outside their validity range",
                self.x
            );
        }
        let period = 2.0 * PI * self.x;
        let n = match self.n_grid {
            Some(n) => {
                if n < 2 {
                    return Err(Error::Config(format!("n_grid must be >= 2, got {n}")));
                }
                n
            }
            None => {
                let h = (period / POINTS_PER_PERIOD).min(MAX_STEP);
                (self.tau_max / h).ceil() as usize + 1
            }
        };
        let h = self.tau_max / (n - 1) as f64;
        if period / h < MIN_POINTS_PER_PERIOD {
            return Err(Error::Config(format!(
                "grid step {h} resolves the period 2πx = {period} with only {:.1} points (need >= {MIN_POINTS_PER_PERIOD})",
                period / h
            )));
        }
        Ok(n)
    }
}

/// Coefficient values at one time.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Coefficients {
    pub gamma: f64,
    pub delta: f64,
    pub pi: f64,
    /// Cumulative damping `Γ(τ)`.
    pub damping: f64,
}

/// Long-time limits of `γ`, `Δ`, `Π` for an Ohmic bath at high temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticCoefficients {
    pub gamma: f64,
    pub delta: f64,
    pub pi: f64,
}

// Per-cell samples of the rates γ', Δ', Π' and u·γ' at the GL nodes.
type CellSamples = [[f64; 8]; 4];

/// Coefficients tabulated on a uniform grid `τ_k = k h`, `k = 0..n`.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    params: ChannelParams,
    step: f64,
    tau: Vec<f64>,
    // Cumulative integrals of the four rates at the grid nodes.
    cum: [Vec<f64>; 4],
    damping: Vec<f64>,
    cells: Vec<CellSamples>,
}

/// Builds the coefficient table for the given parameters.
pub fn build_table(params: &ChannelParams) -> Result<CoefficientTable> {
    let a2 = params.alpha * params.alpha;
    let w0 = params.omega0();
    let sd = params.sd;
    let theta = params.theta;
    CoefficientTable::from_rates(params, move |u| {
        let ks = kernel_sin(&sd, u)?.value;
        let kc = kernel_cos_thermal(&sd, u, theta)?.value;
        let (sn, cs) = (u * w0).sin_cos();
        Ok([a2 * ks * sn, a2 * kc * cs, a2 * kc * sn])
    })
}

impl CoefficientTable {
    /// Builds a table from arbitrary rate functions `u ↦ [γ'(u), Δ'(u), Π'(u)]`.
    /// The grid is taken from `params`; its bath fields are not used.
    pub fn from_rates<F>(params: &ChannelParams, rates: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<[f64; 3]> + Sync,
    {
        let n = params.validate()?;
        let step = params.tau_max / (n - 1) as f64;
        let cells: Vec<CellSamples> = (0..n - 1)
            .into_par_iter()
            .map(|k| {
                let t0 = k as f64 * step;
                let mut s: CellSamples = [[0.0; 8]; 4];
                for (j, xj) in GL8_NODES.iter().enumerate() {
                    let u = t0 + 0.5 * step * (1.0 + xj);
                    let r = rates(u)?;
                    s[0][j] = r[0];
                    s[1][j] = r[1];
                    s[2][j] = r[2];
                    s[3][j] = u * r[0];
                }
                for row in &s {
                    if row.iter().any(|v| !v.is_finite()) {
                        return Err(Error::Numerical(format!(
                            "non-finite coefficient rate in cell starting at τ = {t0}"
                        )));
                    }
                }
                Ok(s)
            })
            .collect::<Result<_>>()?;

        let tau: Vec<f64> = (0..n).map(|k| k as f64 * step).collect();
        let mut cum: [Vec<f64>; 4] = std::array::from_fn(|_| Vec::with_capacity(n));
        for c in cum.iter_mut() {
            c.push(0.0);
        }
        for cell in &cells {
            for q in 0..4 {
                let inc: f64 = cell[q].iter().zip(GL8_WEIGHTS.iter()).map(|(v, w)| v * w).sum();
                let last = *cum[q].last().expect("seeded with 0");
                cum[q].push(last + 0.5 * step * inc);
            }
        }
        let damping = tau
            .iter()
            .zip(cum[0].iter().zip(cum[3].iter()))
            .map(|(t, (g, m))| 2.0 * (t * g - m))
            .collect();
        Ok(Self {
            params: *params,
            step,
            tau,
            cum,
            damping,
            cells,
        })
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn tau_max(&self) -> f64 {
        *self.tau.last().expect("at least two nodes")
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    pub fn tau_grid(&self) -> &[f64] {
        &self.tau
    }

    pub fn gamma(&self) -> &[f64] {
        &self.cum[0]
    }

    pub fn delta(&self) -> &[f64] {
        &self.cum[1]
    }

    pub fn pi(&self) -> &[f64] {
        &self.cum[2]
    }

    pub fn damping(&self) -> &[f64] {
        &self.damping
    }

    /// Coefficients at grid node `k`.
    pub fn node(&self, k: usize) -> Coefficients {
        Coefficients {
            gamma: self.cum[0][k],
            delta: self.cum[1][k],
            pi: self.cum[2][k],
            damping: self.damping[k],
        }
    }

    pub(crate) fn check_range(&self, tau: f64) -> Result<()> {
        let tau_max = self.tau_max();
        if !(tau >= 0.0 && tau <= tau_max * (1.0 + 1e-12)) {
            return Err(Error::Range { tau, tau_max });
        }
        Ok(())
    }

    /// Index of the cell containing `tau` and the local coordinate in `[0, 1]`.
    pub(crate) fn locate(&self, tau: f64) -> (usize, f64) {
        let cells = self.cells.len();
        let k = ((tau / self.step).floor() as usize).min(cells - 1);
        let t = ((tau - self.tau[k]) / self.step).clamp(0.0, 1.0);
        (k, t)
    }

    /// Coefficients at an arbitrary `τ ∈ [0, τ_max]`.
    pub fn at(&self, tau: f64) -> Result<Coefficients> {
        self.check_range(tau)?;
        let (k, t) = self.locate(tau);
        if t == 0.0 {
            return Ok(self.node(k));
        }
        let w = partial_weights(t);
        let cell = &self.cells[k];
        let mut v = [0.0; 4];
        for q in 0..4 {
            let partial: f64 = cell[q].iter().zip(w.iter()).map(|(s, w)| s * w).sum();
            v[q] = self.cum[q][k] + self.step * partial;
        }
        Ok(Coefficients {
            gamma: v[0],
            delta: v[1],
            pi: v[2],
            damping: 2.0 * (tau * v[0] - v[3]),
        })
    }

    /// `Γ(τ+ε, τ) = 2 ∫_τ^{τ+ε} γ(s) ds`.
    pub fn gamma_increment(&self, tau: f64, eps: f64) -> Result<f64> {
        if !(eps >= 0.0) {
            return Err(Error::Domain {
                function: "gamma_increment",
                reason: format!("ε must be >= 0, got {eps}"),
            });
        }
        self.check_range(tau)?;
        self.check_range(tau + eps)?;
        let mut total = 0.0;
        for (a, b) in self.pieces(tau, tau + eps) {
            let mut err = None;
            total += gauss_legendre8(
                |s| match self.at(s) {
                    Ok(c) => c.gamma,
                    Err(e) => {
                        err = Some(e);
                        0.0
                    }
                },
                a,
                b,
            );
            if let Some(e) = err {
                return Err(e);
            }
        }
        Ok(2.0 * total)
    }

    /// Splits `[a, b]` at the grid nodes so each piece lies inside one cell.
    pub(crate) fn pieces(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        if b <= a {
            return out;
        }
        let mut lo = a;
        let mut k = (a / self.step).floor() as usize + 1;
        while k < self.tau.len() && self.tau[k] < b {
            if self.tau[k] > lo {
                out.push((lo, self.tau[k]));
                lo = self.tau[k];
            }
            k += 1;
        }
        out.push((lo, b));
        out
    }

    /// Writes the grid values as CSV with header `tau,gamma,Delta,Pi,Gamma`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["tau", "gamma", "Delta", "Pi", "Gamma"])?;
        for k in 0..self.len() {
            let c = self.node(k);
            w.write_record([
                self.tau[k].to_string(),
                c.gamma.to_string(),
                c.delta.to_string(),
                c.pi.to_string(),
                c.damping.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `W_j(t) = ∫_0^t ℓ_j(s) ds` for the Lagrange basis on the GL nodes mapped
/// to `[0, 1]`, evaluated exactly by GL quadrature on `[0, t]`.
fn partial_weights(t: f64) -> [f64; 8] {
    let nodes: [f64; 8] = std::array::from_fn(|j| 0.5 * (1.0 + GL8_NODES[j]));
    let mut w = [0.0; 8];
    for (xm, wm) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
        let s = t * 0.5 * (1.0 + xm);
        for j in 0..8 {
            let mut l = 1.0;
            for m in 0..8 {
                if m != j {
                    l *= (s - nodes[m]) / (nodes[j] - nodes[m]);
                }
            }
            w[j] += 0.5 * wm * l;
        }
    }
    for v in w.iter_mut() {
        *v *= t;
    }
    w
}

/// Closed-form long-time coefficients (Ohmic bath only):
/// `γ_as = (πα²/2x) e^{−1/x}`, `Δ_as = πα²θ e^{−1/x}`,
/// `Π_as = 2α²θ [Shi(1/x) cosh(1/x) − Chi(1/x) sinh(1/x)]`.
pub fn asymptotic_coeffs(params: &ChannelParams) -> Result<AsymptoticCoefficients> {
    if !params.sd.is_ohmic() {
        return Err(Error::Unsupported(format!(
            "asymptotic coefficients are available only for s = 1, got s = {}",
            params.sd.exponent()
        )));
    }
    if !(params.x > 0.0) || !(params.theta > 0.0) {
        return Err(Error::Config("x and theta must be > 0".into()));
    }
    let a2 = params.alpha * params.alpha;
    let z = 1.0 / params.x;
    let decay = (-z).exp();
    Ok(AsymptoticCoefficients {
        gamma: 0.5 * PI * a2 * z * decay,
        delta: PI * a2 * params.theta * decay,
        pi: 2.0 * a2 * params.theta * specfun::shi_cosh_minus_chi_sinh(z)?.value,
    })
}
