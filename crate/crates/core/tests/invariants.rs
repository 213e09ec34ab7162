use gaussnm::coeffs::asymptotic_coeffs;
use gaussnm::nonmark::{channel_spectrum, np_from_spectrum, np_value};
use gaussnm::{build_table, Channel, ChannelParams, CoefficientTable, SpectralDensity};
use proptest::prelude::*;
use std::sync::OnceLock;

fn table_01() -> &'static CoefficientTable {
    static T: OnceLock<CoefficientTable> = OnceLock::new();
    T.get_or_init(|| build_table(&ChannelParams::new(0.1, 100.0)).unwrap())
}

#[test]
fn coefficients_approach_asymptotic_values() {
    for x in [0.1, 0.3, 0.5] {
        let p = ChannelParams::new(x, 100.0);
        let t = build_table(&p).unwrap();
        let a = asymptotic_coeffs(&p).unwrap();
        let c = t.at(50.0).unwrap();
        let rel = |v: f64, r: f64| (v - r).abs() / r.abs();
        println!(
            "x = {x}: rel. gaps at τ = 50: γ {:.2e}, Δ {:.2e}, Π {:.2e}",
            rel(c.gamma, a.gamma),
            rel(c.delta, a.delta),
            rel(c.pi, a.pi)
        );
        assert!(rel(c.gamma, a.gamma) < 0.01);
        assert!(rel(c.pi, a.pi) < 0.01);
        // The Δ tail decays only like 2α²θx/τ², comparable to Δ_as = πα²θe^{−1/x} for small x.
        let envelope = 2.0 * 0.01 * 100.0 * x / (50.0f64 * 50.0);
        assert!((c.delta - a.delta).abs() < 1.1 * envelope);
    }
}

#[test]
fn gamma_settles_to_constant_positive_value() {
    // The tail γ − γ_as oscillates with an envelope ~ 2α²x/τ³; at x = 0.1 it
    // is still 1.02% of γ_as at τ ≈ 30.2 and below 1% from τ ≈ 30.3 on.
    let t = table_01();
    let a = asymptotic_coeffs(t.params()).unwrap();
    for k in 0..t.len() {
        let tau = t.tau_grid()[k];
        let g = t.node(k).gamma;
        if tau >= 30.0 {
            assert!(g > 0.0);
            assert!((g - a.gamma).abs() / a.gamma < 0.011, "τ = {tau}");
        }
        if tau >= 30.5 {
            assert!((g - a.gamma).abs() / a.gamma < 0.01, "τ = {tau}");
        }
    }
}

#[test]
fn exact_measure_positive_where_rwa_vanishes() {
    let t = table_01();
    let mut rwa_zero = 0;
    for k in 1..t.len() {
        let c = t.node(k);
        assert!(np_value(Channel::QbmExact, &c) > 0.0);
        if np_value(Channel::QbmRwa, &c) == 0.0 {
            rwa_zero += 1;
        }
    }
    assert!(rwa_zero > t.len() / 4);
}

#[test]
fn sign_of_direct_diffusion_is_reported_not_assumed() {
    // Δ dips below zero during the first oscillations for small x and stays positive for x = 0.5.
    for (x, expect_negative) in [(0.1, true), (0.3, true), (0.5, false)] {
        let t = build_table(&ChannelParams::new(x, 100.0)).unwrap();
        let min = t.delta()[1..].iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(min < 0.0, expect_negative, "x = {x}: min Δ = {min}");
    }
}

#[test]
fn non_ohmic_tables() {
    for s in [0.5, 3.0] {
        let p = ChannelParams::new(0.3, 100.0)
            .with_spectral_density(SpectralDensity::new(s).unwrap())
            .with_tau_max(3.0);
        let t = build_table(&p).unwrap();
        assert!(t.gamma().iter().chain(t.delta()).chain(t.pi()).all(|v| v.is_finite()));
        assert!(asymptotic_coeffs(&p).is_err());
        assert!(t.node(1).delta > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn punctual_values_in_range_and_spectral(tau in 0.0..50.0f64) {
        let c = table_01().at(tau).unwrap();
        for ch in Channel::ALL {
            let v = np_value(ch, &c);
            prop_assert!((0.0..=1.0).contains(&v));
            let s = np_from_spectrum(&channel_spectrum(ch, &c).unwrap());
            prop_assert!((v - s).abs() <= 1e-12);
        }
        if c.delta >= 0.0 {
            prop_assert!(np_value(Channel::QbmExact, &c) <= 0.5);
        }
    }
}
