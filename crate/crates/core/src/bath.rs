//! Ohmic-family spectral densities `J_s(ω) = ω^s e^{−ω}` (cutoff `ω_c = 1`)
//! and the frequency integrals that feed the master-equation coefficients.
//!
//! Two kernels are needed, both functions of the inner time lag `u`:
//!
//! * `K_sin(u) = ∫_0^∞ J_s(ω) sin(ωu) dω` (damping)
//! * `K_cos(u, θ) = ∫_0^∞ J_s(ω) (2θ/ω) cos(ωu) dω` (diffusion, with the
//!   high-temperature occupation `2N(ω) + 1 ≈ 2θ/ω`)
//!
//! For the Ohmic case `s = 1` both have elementary closed forms; other
//! exponents are integrated numerically.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};

/// Absolute tolerance for the numerical kernels.
pub const KERNEL_TOLERANCE: f64 = 1e-10;

/// Ohmic-like spectral density with exponent `s > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDensity {
    exponent: f64,
}

impl SpectralDensity {
    pub fn new(exponent: f64) -> Result<Self> {
        if !(exponent > 0.0) || !exponent.is_finite() {
            return Err(Error::Domain {
                function: "SpectralDensity",
                reason: format!("exponent s must be finite and > 0, got {exponent}"),
            });
        }
        Ok(Self { exponent })
    }

    /// The Ohmic density, `s = 1`.
    pub fn ohmic() -> Self {
        Self { exponent: 1.0 }
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn is_ohmic(&self) -> bool {
        self.exponent == 1.0
    }

    /// `J_s(ω)`.
    pub fn eval(&self, omega: f64) -> Result<f64> {
        j_eval(self, omega)
    }

    /// Frequency beyond which the exponential tail is dropped.
    fn cutoff(&self) -> f64 {
        40f64.max(30.0 + 10.0 * self.exponent)
    }
}

/// How a kernel value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMethod {
    ClosedForm,
    Quadrature,
}

/// A kernel evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSample {
    pub value: f64,
    pub abs_error: f64,
    pub method: KernelMethod,
}

/// `J_s(ω) = ω^s e^{−ω}` for `ω ≥ 0`.
pub fn j_eval(sd: &SpectralDensity, omega: f64) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::Domain {
            function: "J_s",
            reason: format!("frequency must be >= 0, got {omega}"),
        });
    }
    if omega == 0.0 {
        return Ok(0.0);
    }
    Ok(omega.powf(sd.exponent) * (-omega).exp())
}

fn check_lag(function: &'static str, u: f64) -> Result<()> {
    if !(u >= 0.0) || !u.is_finite() {
        return Err(Error::Domain {
            function,
            reason: format!("time lag must be finite and >= 0, got {u}"),
        });
    }
    Ok(())
}

fn check_temperature(theta: f64) -> Result<()> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::Domain {
            function: "K_cos",
            reason: format!("temperature θ must be finite and > 0, got {theta}"),
        });
    }
    Ok(())
}

/// `∫_0^∞ J_s(ω) sin(ωu) dω`.
pub fn kernel_sin(sd: &SpectralDensity, u: f64) -> Result<KernelSample> {
    check_lag("K_sin", u)?;
    if sd.is_ohmic() {
        let d = 1.0 + u * u;
        return Ok(KernelSample {
            value: 2.0 * u / (d * d),
            abs_error: 0.0,
            method: KernelMethod::ClosedForm,
        });
    }
    kernel_sin_quadrature(sd, u)
}

/// `∫_0^∞ J_s(ω) (2θ/ω) cos(ωu) dω`.
pub fn kernel_cos_thermal(sd: &SpectralDensity, u: f64, theta: f64) -> Result<KernelSample> {
    check_lag("K_cos", u)?;
    check_temperature(theta)?;
    if sd.is_ohmic() {
        return Ok(KernelSample {
            value: 2.0 * theta / (1.0 + u * u),
            abs_error: 0.0,
            method: KernelMethod::ClosedForm,
        });
    }
    kernel_cos_thermal_quadrature(sd, u, theta)
}

/// Quadrature path of [`kernel_sin`], available for every `s` (including 1).
pub fn kernel_sin_quadrature(sd: &SpectralDensity, u: f64) -> Result<KernelSample> {
    check_lag("K_sin", u)?;
    if u == 0.0 {
        return Ok(KernelSample {
            value: 0.0,
            abs_error: 0.0,
            method: KernelMethod::Quadrature,
        });
    }
    let s = sd.exponent;
    // After ω = v^p on the first panel the weight ω^s dω becomes p v^{p s + p - 1} dv.
    oscillatory_integral(
        sd,
        u,
        |w| w.powf(s) * (-w).exp() * (w * u).sin(),
        |v, p| p * v.powf(p * s + p - 1.0) * (-v.powf(p)).exp() * (v.powf(p) * u).sin(),
    )
}

/// Quadrature path of [`kernel_cos_thermal`].
pub fn kernel_cos_thermal_quadrature(sd: &SpectralDensity, u: f64, theta: f64) -> Result<KernelSample> {
    check_lag("K_cos", u)?;
    check_temperature(theta)?;
    let s = sd.exponent;
    let r = oscillatory_integral(
        sd,
        u,
        |w| w.powf(s - 1.0) * (-w).exp() * (w * u).cos(),
        |v, p| p * v.powf(p * s - 1.0) * (-v.powf(p)).exp() * (v.powf(p) * u).cos(),
    )?;
    Ok(KernelSample {
        value: 2.0 * theta * r.value,
        abs_error: 2.0 * theta * r.abs_error,
        method: KernelMethod::Quadrature,
    })
}

/// Integrates over `[0, cutoff]` in panels of one half-period of the
/// oscillation (at most unit width). The first panel is mapped by `ω = v^p`
/// with `p = max(1, 1/s)` so that the `ω^{s-1}` endpoint behaviour becomes
/// smooth; `first(v, p)` is the transformed integrand.
fn oscillatory_integral<F, G>(sd: &SpectralDensity, u: f64, f: F, first: G) -> Result<KernelSample>
where
    F: Fn(f64) -> f64,
    G: Fn(f64, f64) -> f64,
{
    let cutoff = sd.cutoff();
    let width = if u > 0.0 { (PI / u).min(1.0) } else { 1.0 };
    let panels = (cutoff / width).ceil() as usize;
    let opts = QuadOptions {
        abs_tol: KERNEL_TOLERANCE / panels as f64,
        rel_tol: 1e-13,
        max_intervals: 200,
    };
    let p = (1.0 / sd.exponent).max(1.0);
    let head = integrate(|v| first(v, p), 0.0, width.powf(1.0 / p), opts)?;
    let mut value = head.value;
    let mut abs_error = head.abs_error;
    for k in 1..panels {
        let a = k as f64 * width;
        let b = ((k + 1) as f64 * width).min(cutoff);
        let r = integrate(&f, a, b, opts)?;
        value += r.value;
        abs_error += r.abs_error;
    }
    if abs_error > KERNEL_TOLERANCE.max(1e-12 * value.abs()) * 10.0 {
        return Err(Error::Numerical(format!(
            "kernel quadrature for s = {} at u = {u}: error estimate {abs_error:e} exceeds tolerance",
            sd.exponent
        )));
    }
    Ok(KernelSample {
        value,
        abs_error,
        method: KernelMethod::Quadrature,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Γ(z) via Lanczos (g = 7, n = 9); test-only oracle.
    fn gamma_fn(z: f64) -> f64 {
        const G: [f64; 9] = [
            0.999_999_999_999_809_93,
            676.520_368_121_885_1,
            -1_259.139_216_722_402_8,
            771.323_428_777_653_13,
            -176.615_029_162_140_59,
            12.507_343_278_686_905,
            -0.138_571_095_265_720_12,
            9.984_369_578_019_571_6e-6,
            1.505_632_735_149_311_6e-7,
        ];
        if z < 0.5 {
            return PI / ((PI * z).sin() * gamma_fn(1.0 - z));
        }
        let z = z - 1.0;
        let mut a = G[0];
        let t = z + 7.5;
        for (i, g) in G.iter().enumerate().skip(1) {
            a += g / (z + i as f64);
        }
        (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * a
    }

    /// ∫ω^{a-1} e^{-(1-iu)ω} dω = Γ(a) (1 - iu)^{-a}; returns (Re, Im).
    fn laplace_power(a: f64, u: f64) -> (f64, f64) {
        let modulus = (1.0 + u * u).powf(-a / 2.0);
        let phase = a * u.atan();
        let g = gamma_fn(a);
        (g * modulus * phase.cos(), g * modulus * phase.sin())
    }

    #[test]
    fn spectral_density_values() {
        let ohm = SpectralDensity::ohmic();
        assert_eq!(j_eval(&ohm, 0.0).unwrap(), 0.0);
        assert!((j_eval(&ohm, 1.0).unwrap() - (-1f64).exp()).abs() < 1e-16);
        let s3 = SpectralDensity::new(3.0).unwrap();
        assert!((j_eval(&s3, 2.0).unwrap() - 8.0 * (-2f64).exp()).abs() < 1e-15);
        assert!(matches!(j_eval(&ohm, -1.0), Err(Error::Domain { .. })));
        assert!(SpectralDensity::new(0.0).is_err());
        assert!(SpectralDensity::new(-0.5).is_err());
    }

    #[test]
    fn ohmic_closed_forms() {
        let ohm = SpectralDensity::ohmic();
        let k = kernel_sin(&ohm, 0.0).unwrap();
        assert_eq!((k.value, k.method), (0.0, KernelMethod::ClosedForm));
        assert!((kernel_sin(&ohm, 1.0).unwrap().value - 0.5).abs() < 1e-16);
        assert_eq!(kernel_cos_thermal(&ohm, 0.0, 100.0).unwrap().value, 200.0);
        assert!((kernel_cos_thermal(&ohm, 1.0, 100.0).unwrap().value - 100.0).abs() < 1e-13);
        assert!(kernel_sin(&ohm, 51.0).unwrap().value.abs() < 1e-3);
    }

    #[test]
    fn ohmic_quadrature_agrees_with_closed_form() {
        let ohm = SpectralDensity::ohmic();
        for u in [0.0, 0.3, 1.0, 2.5, 7.0, 20.0, 55.0, 100.0] {
            let qs = kernel_sin_quadrature(&ohm, u).unwrap();
            let cs = kernel_sin(&ohm, u).unwrap();
            assert_eq!(qs.method, KernelMethod::Quadrature);
            assert!((qs.value - cs.value).abs() < 1e-8, "sin u={u}: {} vs {}", qs.value, cs.value);
            let qc = kernel_cos_thermal_quadrature(&ohm, u, 1.0).unwrap();
            let cc = kernel_cos_thermal(&ohm, u, 1.0).unwrap();
            assert!((qc.value - cc.value).abs() < 1e-8, "cos u={u}: {} vs {}", qc.value, cc.value);
        }
    }

    #[test]
    fn non_ohmic_against_gamma_oracle() {
        for s in [0.5, 3.0] {
            let sd = SpectralDensity::new(s).unwrap();
            for u in [0.5, 1.0, 4.0, 12.0] {
                let ks = kernel_sin(&sd, u).unwrap();
                assert_eq!(ks.method, KernelMethod::Quadrature);
                let (_, im) = laplace_power(s + 1.0, u);
                assert!((ks.value - im).abs() < 1e-9, "s={s} u={u}: {} vs {im}", ks.value);
                let kc = kernel_cos_thermal(&sd, u, 100.0).unwrap();
                let (re, _) = laplace_power(s, u);
                assert!((kc.value - 200.0 * re).abs() < 1e-7 * 200.0, "s={s} u={u}: {} vs {}", kc.value, 200.0 * re);
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let ohm = SpectralDensity::ohmic();
        assert!(kernel_sin(&ohm, -1.0).is_err());
        assert!(kernel_cos_thermal(&ohm, 1.0, 0.0).is_err());
        assert!(kernel_cos_thermal(&ohm, f64::NAN, 1.0).is_err());
    }
}
