//! Single-mode Gaussian states and the covariance maps `(X, Y)` generated by
//! the quantum Brownian motion master equation.
//!
//! Conventions: quadratures `(q, p)`, symplectic form `Ω = [[0, 1], [−1, 0]]`,
//! vacuum covariance `σ = I/2`, and characteristic function
//! `χ(Λ) = exp(−½ Λᵀ σ Λ + i meanᵀ Ωᵀ Λ)`. With these, the master-equation
//! solution `χ_τ(Λ) = χ_0(e^{−Γ/2} R⁻¹ Λ) exp(−Λᵀ W̄ Λ)` is the map
//! `σ ↦ X σ Xᵀ + Y` with `X = e^{−Γ/2} R(τ)` and `Y = 2 W̄(τ)`.
//!
//! The noise term is never formed from `e^{Γ}`-weighted integrals. Instead,
//! for `a ≤ b`,
//!
//! ```text
//! Y(b, a) = 2 ∫_a^b e^{−(Γ(b) − Γ(s))} R(b − s) M(s) Rᵀ(b − s) ds
//! 2W̄(b)  = Y(b, a) + X(b, a) 2W̄(a) Xᵀ(b, a)
//! ```
//!
//! with `M = [[Δ, −Π/2], [−Π/2, 0]]`, evaluated by Gauss–Legendre quadrature
//! on each grid cell and chained across the grid.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::coeffs::{CoefficientTable, Coefficients};
use crate::error::{Error, Result};
use crate::quad::gauss_legendre8;

/// Tolerance on Hermiticity of `Z`, relative to its largest entry.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
/// Slack allowed on `det σ ≥ 1/4` when validating input states.
pub const PHYSICALITY_TOLERANCE: f64 = 1e-12;

/// The symplectic form `Ω`.
pub fn omega() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, -1.0, 0.0)
}

/// Free rotation `R(τ)` by the angle `ω_0 τ = τ/x`.
pub fn rotation(tau: f64, x: f64) -> Matrix2<f64> {
    let (s, c) = (tau / x).sin_cos();
    Matrix2::new(c, s, -s, c)
}

/// A single-mode Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub mean: Vector2<f64>,
    pub cov: Matrix2<f64>,
}

impl GaussianState {
    /// Validated constructor: `cov` must be symmetric and satisfy
    /// `σ + (i/2)Ω ≥ 0`.
    pub fn new(mean: Vector2<f64>, cov: Matrix2<f64>) -> Result<Self> {
        let state = Self { mean, cov };
        state.validate()?;
        Ok(state)
    }

    pub fn vacuum() -> Self {
        Self {
            mean: Vector2::zeros(),
            cov: Matrix2::identity() * 0.5,
        }
    }

    /// Coherent state with mean quadratures `(q, p)`.
    pub fn coherent(q: f64, p: f64) -> Self {
        Self {
            mean: Vector2::new(q, p),
            ..Self::vacuum()
        }
    }

    /// Squeezed vacuum with squeezing `r` along the direction at angle `phi`.
    pub fn squeezed(r: f64, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        let rot = Matrix2::new(c, -s, s, c);
        let d = Matrix2::new((-2.0 * r).exp(), 0.0, 0.0, (2.0 * r).exp()) * 0.5;
        Self {
            mean: Vector2::zeros(),
            cov: rot * d * rot.transpose(),
        }
    }

    /// Thermal state with mean occupation `n`.
    pub fn thermal(n: f64) -> Self {
        Self {
            mean: Vector2::zeros(),
            cov: Matrix2::identity() * (n + 0.5),
        }
    }

    /// Same covariance, displaced to `(q, p)`.
    pub fn displaced(mut self, q: f64, p: f64) -> Self {
        self.mean = Vector2::new(q, p);
        self
    }

    pub fn det(&self) -> f64 {
        self.cov.determinant()
    }

    /// `σ + (i/2)Ω ≥ 0` up to `tol`, i.e. `σ_11 > 0` and `det σ ≥ 1/4 − tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        let symmetric = (self.cov[(0, 1)] - self.cov[(1, 0)]).abs()
            <= tol * self.cov.amax().max(1.0);
        symmetric && self.cov[(0, 0)] > 0.0 && self.det() >= 0.25 - tol
    }

    pub fn validate(&self) -> Result<()> {
        if self.mean.iter().chain(self.cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Validation("state has non-finite entries".into()));
        }
        if !self.is_physical(PHYSICALITY_TOLERANCE) {
            return Err(Error::Validation(format!(
                "covariance {:?} is not a physical single-mode covariance (det = {})",
                self.cov.as_slice(),
                self.det()
            )));
        }
        Ok(())
    }
}

/// Characteristic function `χ(Λ) = exp(−½ Λᵀ σ Λ + i meanᵀ Ωᵀ Λ)`.
pub fn char_function(state: &GaussianState, lambda: &Vector2<f64>) -> Complex64 {
    let quad = lambda.dot(&(state.cov * lambda));
    let phase = state.mean.dot(&(omega().transpose() * lambda));
    Complex64::new(-0.5 * quad, phase).exp()
}

/// Covariance map `σ ↦ X σ Xᵀ + Y`, `mean ↦ X mean`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelMap {
    pub x: Matrix2<f64>,
    pub y: Matrix2<f64>,
}

impl ChannelMap {
    pub fn identity() -> Self {
        Self {
            x: Matrix2::identity(),
            y: Matrix2::zeros(),
        }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &ChannelMap) -> ChannelMap {
        ChannelMap {
            x: next.x * self.x,
            y: next.x * self.y * next.x.transpose() + next.y,
        }
    }

    /// Applies the map without validating the input.
    pub fn apply(&self, state: &GaussianState) -> GaussianState {
        let cov = self.x * state.cov * self.x.transpose() + self.y;
        GaussianState {
            mean: self.x * state.mean,
            cov: 0.5 * (cov + cov.transpose()),
        }
    }
}

/// Evolves a physical state through `map`.
pub fn evolve_cov(map: &ChannelMap, state: &GaussianState) -> Result<GaussianState> {
    state.validate()?;
    Ok(map.apply(state))
}

/// The noise matrix `W̄(τ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WBar {
    pub value: Matrix2<f64>,
}

/// Whether a [`ZMatrix`] is the raw finite-step matrix or divided by the step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZScale {
    Step(f64),
    Rescaled,
}

/// `Z(τ+ε, τ) = Y − (i/2)Ω + (i/2) X Ω Xᵀ` of an intermediate map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZMatrix {
    pub matrix: Matrix2<Complex64>,
    pub scale: ZScale,
}

impl ZMatrix {
    /// Divides a finite-step matrix by its step.
    pub fn rescaled(&self) -> ZMatrix {
        match self.scale {
            ZScale::Rescaled => *self,
            ZScale::Step(eps) => ZMatrix {
                matrix: self.matrix.map(|z| z / eps),
                scale: ZScale::Rescaled,
            },
        }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (self.matrix - self.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        let scale = self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max);
        self.hermiticity_defect() <= rel_tol * scale.max(f64::MIN_POSITIVE)
    }
}

/// Eigenvalues `λ₊ ≥ λ₋` of a Hermitian `Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZSpectrum {
    pub plus: f64,
    pub minus: f64,
}

/// `Z` of an arbitrary map, using `X Ω Xᵀ = det(X) Ω` for one mode.
pub fn z_from_map(map: &ChannelMap, scale: ZScale) -> ZMatrix {
    z_with_det_defect(map, map.x.determinant() - 1.0, scale)
}

fn z_with_det_defect(map: &ChannelMap, det_minus_one: f64, scale: ZScale) -> ZMatrix {
    let om = omega();
    let matrix = Matrix2::from_fn(|i, j| Complex64::new(map.y[(i, j)], 0.5 * om[(i, j)] * det_minus_one));
    ZMatrix { matrix, scale }
}

/// First-order `Z(τ+ε, τ)/ε = [[2Δ, −Π − iγ], [−Π + iγ, 0]]`.
pub fn z_first_order(c: &Coefficients) -> ZMatrix {
    let off = Complex64::new(-c.pi, -c.gamma);
    ZMatrix {
        matrix: Matrix2::new(Complex64::new(2.0 * c.delta, 0.0), off, off.conj(), Complex64::new(0.0, 0.0)),
        scale: ZScale::Rescaled,
    }
}

/// Closed-form eigenvalues of a Hermitian 2×2 matrix.
pub fn z_eigenvalues(z: &ZMatrix) -> Result<ZSpectrum> {
    if !z.is_hermitian(HERMITIAN_TOLERANCE) {
        return Err(Error::Validation(format!(
            "Z is not Hermitian (defect {:e})",
            z.hermiticity_defect()
        )));
    }
    let a = z.matrix[(0, 0)].re;
    let d = z.matrix[(1, 1)].re;
    let b = 0.5 * (z.matrix[(0, 1)] + z.matrix[(1, 0)].conj());
    Ok(hermitian_eigenvalues(a, d, b.norm()))
}

/// Eigenvalues of `[[a, b], [b̄, d]]` given `|b|`, without cancellation in the
/// smaller one.
pub(crate) fn hermitian_eigenvalues(a: f64, d: f64, b_abs: f64) -> ZSpectrum {
    let m = 0.5 * (a + d);
    let r = (0.5 * (a - d)).hypot(b_abs);
    if r == 0.0 {
        return ZSpectrum { plus: m, minus: m };
    }
    let big = if m >= 0.0 { m + r } else { m - r };
    let small = if big == 0.0 { 0.0 } else { (a * d - b_abs * b_abs) / big };
    ZSpectrum {
        plus: big.max(small),
        minus: big.min(small),
    }
}

/// The exact QBM channel over a coefficient table, with `2W̄` precomputed at
/// the grid nodes.
#[derive(Debug, Clone)]
pub struct QbmChannel<'a> {
    table: &'a CoefficientTable,
    w2_nodes: Vec<Matrix2<f64>>,
}

impl<'a> QbmChannel<'a> {
    pub fn new(table: &'a CoefficientTable) -> Result<Self> {
        let tau = table.tau_grid();
        let x = table.params().x;
        let steps: Vec<(Matrix2<f64>, Matrix2<f64>)> = (0..tau.len() - 1)
            .into_par_iter()
            .map(|k| {
                let (a, b) = (tau[k], tau[k + 1]);
                let y = noise_integral(|s| table.at(s), x, &[(a, b)], b)?;
                let shrink = (-0.5 * (table.damping()[k + 1] - table.damping()[k])).exp();
                Ok((shrink * rotation(b - a, x), y))
            })
            .collect::<Result<_>>()?;
        let mut w2_nodes = Vec::with_capacity(tau.len());
        w2_nodes.push(Matrix2::zeros());
        for (xk, yk) in &steps {
            let prev = w2_nodes.last().expect("seeded");
            w2_nodes.push(symmetrize(yk + xk * prev * xk.transpose()));
        }
        Ok(Self { table, w2_nodes })
    }

    pub fn table(&self) -> &CoefficientTable {
        self.table
    }

    fn x_param(&self) -> f64 {
        self.table.params().x
    }

    fn w2(&self, tau: f64) -> Result<Matrix2<f64>> {
        self.table.check_range(tau)?;
        let (k, t) = self.table.locate(tau);
        if t == 0.0 {
            return Ok(self.w2_nodes[k]);
        }
        let a = self.table.tau_grid()[k];
        let step = self.intermediate_map(a, tau - a)?;
        Ok(symmetrize(step.y + step.x * self.w2_nodes[k] * step.x.transpose()))
    }

    /// `W̄(τ)`.
    pub fn wbar(&self, tau: f64) -> Result<WBar> {
        Ok(WBar {
            value: 0.5 * self.w2(tau)?,
        })
    }

    /// `X(τ) = e^{−Γ(τ)/2} R(τ)`, `Y(τ) = 2W̄(τ)`.
    pub fn channel_map(&self, tau: f64) -> Result<ChannelMap> {
        let c = self.table.at(tau)?;
        Ok(ChannelMap {
            x: (-0.5 * c.damping).exp() * rotation(tau, self.x_param()),
            y: self.w2(tau)?,
        })
    }

    /// The map from `τ` to `τ + ε`:
    /// `X = e^{−Γ(τ+ε,τ)/2} R(ε)` and `Y = 2W̄(τ+ε) − X 2W̄(τ) Xᵀ`, the latter
    /// integrated directly over `[τ, τ+ε]`.
    pub fn intermediate_map(&self, tau: f64, eps: f64) -> Result<ChannelMap> {
        let inc = self.table.gamma_increment(tau, eps)?;
        let x = self.x_param();
        let pieces = self.table.pieces(tau, tau + eps);
        Ok(ChannelMap {
            x: (-0.5 * inc).exp() * rotation(eps, x),
            y: noise_integral(|s| self.table.at(s), x, &pieces, tau + eps)?,
        })
    }

    /// Finite-step `Z(τ+ε, τ)`.
    pub fn z_matrix(&self, tau: f64, eps: f64) -> Result<ZMatrix> {
        if !(eps > 0.0) {
            return Err(Error::Domain {
                function: "z_matrix",
                reason: format!("ε must be > 0, got {eps}"),
            });
        }
        let map = self.intermediate_map(tau, eps)?;
        let inc = self.table.gamma_increment(tau, eps)?;
        Ok(z_with_det_defect(&map, (-inc).exp_m1(), ZScale::Step(eps)))
    }

    /// `lim_{ε→0} Z(τ+ε, τ)/ε`.
    pub fn z_matrix_firstorder(&self, tau: f64) -> Result<ZMatrix> {
        Ok(z_first_order(&self.table.at(tau)?))
    }

    /// Evolves a physical state from 0 to `τ`.
    pub fn evolve(&self, state: &GaussianState, tau: f64) -> Result<GaussianState> {
        evolve_cov(&self.channel_map(tau)?, state)
    }
}

fn symmetrize(m: Matrix2<f64>) -> Matrix2<f64> {
    0.5 * (m + m.transpose())
}

/// `2 ∫ e^{−(Γ(b) − Γ(s))} R(b − s) M(s) Rᵀ(b − s) ds` over the given pieces,
/// each integrated with 8-point Gauss–Legendre. `coeff(s)` supplies `Γ`, `Δ`
/// and `Π`; the pieces must lie inside `[0, b]`.
pub(crate) fn noise_integral<F>(coeff: F, x: f64, pieces: &[(f64, f64)], b: f64) -> Result<Matrix2<f64>>
where
    F: Fn(f64) -> Result<Coefficients>,
{
    if pieces.is_empty() {
        return Ok(Matrix2::zeros());
    }
    let damping_b = coeff(b)?.damping;
    let mut total = Matrix2::zeros();
    let mut failure = None;
    for &(lo, hi) in pieces {
        for (i, j) in [(0, 0), (0, 1), (1, 1)] {
            total[(i, j)] += gauss_legendre8(
                |s| match coeff(s) {
                    Ok(c) => {
                        let m = Matrix2::new(c.delta, -0.5 * c.pi, -0.5 * c.pi, 0.0);
                        let r = rotation(b - s, x);
                        (-(damping_b - c.damping)).exp() * (r * m * r.transpose())[(i, j)]
                    }
                    Err(e) => {
                        failure = Some(e);
                        0.0
                    }
                },
                lo,
                hi,
            );
        }
    }
    if let Some(e) = failure {
        return Err(e);
    }
    total[(1, 0)] = total[(0, 1)];
    Ok(2.0 * total)
}
