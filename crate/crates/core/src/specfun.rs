//! Real-argument exponential and hyperbolic integrals.
//!
//! * `Ei(z) = -PV ∫_{-z}^∞ e^{-t}/t dt`
//! * `Shi(z) = ∫_0^z sinh(t)/t dt`
//! * `Chi(z) = γ_E + ln z + ∫_0^z (cosh t - 1)/t dt`
//!
//! Small arguments use the power series; large positive `Ei` switches to the
//! asymptotic expansion and negative `Ei` to the continued fraction of `E1`.

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;

const EPS: f64 = f64::EPSILON;
const MAX_TERMS: usize = 1000;
// Above this Ei(z) uses the asymptotic series; its smallest term is ~e^{-z}.
const EI_ASYMPTOTIC_FROM: f64 = 40.0;
// Shi/Chi switch from their own series to the Ei combination.
const HYPERBOLIC_SERIES_UP_TO: f64 = 8.0;
// Beyond this Shi cosh - Chi sinh is rebuilt from Ei to avoid cancellation.
const COMBINATION_DIRECT_UP_TO: f64 = 10.0;

/// A function value with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecFunResult {
    pub value: f64,
    pub est_abs_error: f64,
}

impl SpecFunResult {
    fn new(value: f64, est_abs_error: f64) -> Self {
        debug_assert!(est_abs_error >= 0.0);
        Self {
            value,
            est_abs_error,
        }
    }
}

fn overflow_check(function: &'static str, z: f64, r: SpecFunResult) -> Result<SpecFunResult> {
    if r.value.is_finite() {
        Ok(r)
    } else {
        Err(Error::Overflow {
            function,
            argument: z,
        })
    }
}

/// Σ_{k≥1} z^k / (k·k!), together with the largest |term| seen.
fn ei_series_sum(z: f64) -> (f64, f64, usize) {
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut largest: f64 = 0.0;
    for k in 1..MAX_TERMS {
        term *= z / k as f64;
        let contrib = term / k as f64;
        sum += contrib;
        largest = largest.max(contrib.abs());
        if contrib.abs() <= EPS * sum.abs() {
            return (sum, largest, k);
        }
    }
    (sum, largest, MAX_TERMS)
}

fn ei_series(z: f64) -> SpecFunResult {
    let (sum, largest, n) = ei_series_sum(z);
    let log = z.abs().ln();
    let value = EULER_GAMMA + log + sum;
    let scale = largest.max(log.abs()).max(EULER_GAMMA);
    SpecFunResult::new(value, (n as f64 + 4.0) * EPS * scale)
}

fn ei_asymptotic(z: f64) -> SpecFunResult {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 1;
    for k in 1..MAX_TERMS {
        let next = term * k as f64 / z;
        if next >= term || next < EPS * sum {
            break;
        }
        term = next;
        sum += term;
        n = k;
    }
    let prefactor = z.exp() / z;
    let value = prefactor * sum;
    SpecFunResult::new(value, (term + (n as f64 + 2.0) * EPS * sum) * prefactor.abs())
}

/// E1(x) for x > 1 by the modified-Lentz continued fraction.
fn e1_continued_fraction(x: f64) -> SpecFunResult {
    let tiny = f64::MIN_POSITIVE / EPS;
    let mut b = x + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    let mut n = 1;
    for i in 1..MAX_TERMS {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        n = i;
        if (del - 1.0).abs() <= EPS {
            break;
        }
    }
    let value = h * (-x).exp();
    SpecFunResult::new(value, (n as f64 + 4.0) * EPS * value.abs())
}

/// Exponential integral `Ei(z)` for real `z ≠ 0` (principal value for z > 0).
pub fn expint_ei(z: f64) -> Result<SpecFunResult> {
    if z == 0.0 || z.is_nan() {
        return Err(Error::Domain {
            function: "Ei",
            reason: format!("logarithmic singularity at z = {z}"),
        });
    }
    let r = if z > 0.0 {
        if z <= EI_ASYMPTOTIC_FROM {
            ei_series(z)
        } else {
            ei_asymptotic(z)
        }
    } else if z >= -1.0 {
        ei_series(z)
    } else {
        let e1 = e1_continued_fraction(-z);
        SpecFunResult::new(-e1.value, e1.est_abs_error)
    };
    overflow_check("Ei", z, r)
}

/// Hyperbolic sine integral `Shi(z)`; odd in `z`.
pub fn shi(z: f64) -> Result<SpecFunResult> {
    if z.is_nan() {
        return Err(Error::Domain {
            function: "Shi",
            reason: "NaN argument".into(),
        });
    }
    let a = z.abs();
    if a == 0.0 {
        return Ok(SpecFunResult::new(0.0, 0.0));
    }
    let r = if a <= HYPERBOLIC_SERIES_UP_TO {
        let z2 = a * a;
        let mut term = a;
        let mut sum = a;
        let mut n = 0;
        for k in 1..MAX_TERMS {
            let m = (2 * k) as f64;
            term *= z2 / (m * (m + 1.0));
            let contrib = term / (m + 1.0);
            sum += contrib;
            n = k;
            if contrib <= EPS * sum {
                break;
            }
        }
        SpecFunResult::new(sum, (n as f64 + 2.0) * EPS * sum)
    } else {
        let p = expint_ei(a)?;
        let m = expint_ei(-a)?;
        SpecFunResult::new(
            0.5 * (p.value - m.value),
            0.5 * (p.est_abs_error + m.est_abs_error) + EPS * p.value.abs(),
        )
    };
    let signed = SpecFunResult::new(r.value.copysign(z), r.est_abs_error);
    overflow_check("Shi", z, signed)
}

/// Hyperbolic cosine integral `Chi(z)` for `z > 0`.
pub fn chi(z: f64) -> Result<SpecFunResult> {
    if z.is_nan() || z <= 0.0 {
        return Err(Error::Domain {
            function: "Chi",
            reason: format!("requires z > 0, got {z}"),
        });
    }
    let r = if z <= HYPERBOLIC_SERIES_UP_TO {
        let z2 = z * z;
        let mut term = 1.0;
        let mut sum = 0.0;
        let mut n = 0;
        for k in 1..MAX_TERMS {
            let m = (2 * k) as f64;
            term *= z2 / ((m - 1.0) * m);
            let contrib = term / m;
            sum += contrib;
            n = k;
            if contrib <= EPS * sum {
                break;
            }
        }
        let log = z.ln();
        let value = EULER_GAMMA + log + sum;
        let scale = sum.max(log.abs()).max(EULER_GAMMA);
        SpecFunResult::new(value, (n as f64 + 4.0) * EPS * scale)
    } else {
        let p = expint_ei(z)?;
        let m = expint_ei(-z)?;
        SpecFunResult::new(
            0.5 * (p.value + m.value),
            0.5 * (p.est_abs_error + m.est_abs_error) + EPS * p.value.abs(),
        )
    };
    overflow_check("Chi", z, r)
}

/// `Shi(z)cosh(z) − Chi(z)sinh(z)` for `z > 0`.
///
/// Evaluated literally from `Shi`/`Chi` for `z ≤ 10`; for larger `z` the two
/// products cancel to ~`1/z` out of ~`e^{2z}/z`, so the equivalent form
/// `½[e^{−z}Ei(z) − e^{z}Ei(−z)]` is used instead.
pub fn shi_cosh_minus_chi_sinh(z: f64) -> Result<SpecFunResult> {
    if z.is_nan() || z <= 0.0 {
        return Err(Error::Domain {
            function: "Shi·cosh − Chi·sinh",
            reason: format!("requires z > 0, got {z}"),
        });
    }
    if z <= COMBINATION_DIRECT_UP_TO {
        let s = shi(z)?;
        let c = chi(z)?;
        let (ch, sh) = (z.cosh(), z.sinh());
        let value = s.value * ch - c.value * sh;
        let err = s.est_abs_error * ch + c.est_abs_error * sh + 4.0 * EPS * s.value.abs() * ch;
        Ok(SpecFunResult::new(value, err))
    } else {
        exponential_integral_combination(z)
    }
}

/// `½[e^{−z}Ei(z) − e^{z}Ei(−z)]` for `z > 0`.
pub fn exponential_integral_combination(z: f64) -> Result<SpecFunResult> {
    if z.is_nan() || z <= 0.0 {
        return Err(Error::Domain {
            function: "½[e^{−z}Ei(z) − e^{z}Ei(−z)]",
            reason: format!("requires z > 0, got {z}"),
        });
    }
    let p = expint_ei(z)?;
    let m = expint_ei(-z)?;
    let (ez, emz) = (z.exp(), (-z).exp());
    let value = 0.5 * (emz * p.value - ez * m.value);
    let err = 0.5 * (emz * p.est_abs_error + ez * m.est_abs_error) + 4.0 * EPS * value.abs();
    overflow_check("½[e^{−z}Ei(z) − e^{z}Ei(−z)]", z, SpecFunResult::new(value, err))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from 30-digit evaluations of the defining series.
    const EI_REF: &[(f64, f64)] = &[
        (0.001, -6.329_539_364_025_038_196_7),
        (-0.001, -6.331_539_364_136_149_311_2),
        (0.5, 0.454_219_904_863_173_579_92),
        (-0.5, -0.559_773_594_776_160_811_75),
        (2.0, 4.954_234_356_001_890_163_4),
        (3.0, 9.933_832_570_625_416_558_0),
        (-3.0, -0.013_048_381_094_197_037_413),
        (5.0, 40.185_275_355_803_177_455),
        (8.0, 440.379_899_534_838_268_997),
        (10.0, 2_492.228_976_241_877_759_1),
        (-10.0, -4.156_968_929_685_324_277_4e-6),
        (20.0, 25_615_652.664_056_588_820),
        (36.0, 123_285_207_991_209.768_54),
        (40.0, 6_039_718_263_611_241.578_4),
        (50.0, 1.058_563_689_713_169_096_3e20),
        (-50.0, -3.783_264_029_550_459_018_7e-24),
    ];

    #[test]
    fn ei_matches_reference() {
        for &(z, want) in EI_REF {
            let got = expint_ei(z).unwrap();
            let rel = ((got.value - want) / want).abs();
            assert!(rel < 1e-13, "Ei({z}) = {} want {want} (rel {rel:e})", got.value);
            assert!(got.est_abs_error >= 0.0);
            assert!(got.est_abs_error <= 1e-12 * want.abs(), "Ei({z}) error estimate {}", got.est_abs_error);
        }
    }

    #[test]
    fn ei_unit_arguments() {
        assert!((expint_ei(1.0).unwrap().value - 1.895_117_816_355_936_8).abs() < 1e-15);
        assert!((expint_ei(-1.0).unwrap().value + 0.219_383_934_395_520_27).abs() < 1e-15);
    }

    #[test]
    fn ei_small_argument_limit() {
        for z in [1e-6, 1e-9, 1e-12] {
            let v = expint_ei(z).unwrap().value - z.ln();
            assert!((v - EULER_GAMMA).abs() < 2.0 * z + 1e-15, "z = {z}: {v}");
        }
    }

    #[test]
    fn ei_errors() {
        assert!(matches!(expint_ei(0.0), Err(Error::Domain { .. })));
        assert!(matches!(expint_ei(800.0), Err(Error::Overflow { .. })));
        // far negative underflows quietly to zero
        assert_eq!(expint_ei(-800.0).unwrap().value, 0.0);
    }

    #[test]
    fn shi_chi_basics() {
        assert_eq!(shi(0.0).unwrap().value, 0.0);
        assert!((shi(1.0).unwrap().value - 1.057_250_875_375_728_5).abs() < 1e-15);
        assert_eq!(shi(-1.0).unwrap().value, -shi(1.0).unwrap().value);
        assert!((chi(1.0).unwrap().value - 0.837_866_940_980_208_24).abs() < 1e-15);
        assert!(matches!(chi(0.0), Err(Error::Domain { .. })));
        assert!(matches!(chi(-2.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn series_to_ei_switch_is_continuous() {
        let below = HYPERBOLIC_SERIES_UP_TO * (1.0 - 1e-12);
        let above = HYPERBOLIC_SERIES_UP_TO * (1.0 + 1e-12);
        let dz = above - below;
        let z = HYPERBOLIC_SERIES_UP_TO;
        // Subtract the true change over the gap, sinh(z)/z and cosh(z)/z times dz.
        let ds = shi(above).unwrap().value - shi(below).unwrap().value - z.sinh() / z * dz;
        let dc = chi(above).unwrap().value - chi(below).unwrap().value - z.cosh() / z * dz;
        assert!(ds.abs() < 1e-10 && dc.abs() < 1e-10, "{ds:e} {dc:e}");
    }

    #[test]
    fn combination_forms_agree_at_switch() {
        let z = COMBINATION_DIRECT_UP_TO;
        let a = shi_cosh_minus_chi_sinh(z).unwrap().value;
        let b = exponential_integral_combination(z).unwrap().value;
        assert!((a - b).abs() < 1e-9);
        // 1/z + 2/z^3 + 24/z^5 + ... for large z
        let big = exponential_integral_combination(60.0).unwrap().value;
        let asym = 1.0 / 60.0 + 2.0 / 60f64.powi(3) + 24.0 / 60f64.powi(5) + 720.0 / 60f64.powi(7);
        assert!((big - asym).abs() < 1e-11);
    }
}
