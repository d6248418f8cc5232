use proptest::prelude::*;
use rheight::numerics::{loglog_fit, OscillatoryQuadrature};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// `∫_a^b e^{iλαs} ds` in closed form.
    #[test]
    fn linear_phase_matches_closed_form(lambda in 1.0f64..2e4, alpha in 0.5f64..3.0, a in -2.0f64..0.0, len in 0.1f64..3.0) {
        let b = a + len;
        let q = OscillatoryQuadrature::default();
        let got = q.integrate(&|s: f64| alpha * s, &|_| 1.0, lambda, a, b).unwrap();
        let k = lambda * alpha;
        let re = ((k * b).sin() - (k * a).sin()) / k;
        let im = ((k * a).cos() - (k * b).cos()) / k;
        let err = ((got.re - re).powi(2) + (got.im - im).powi(2)).sqrt();
        prop_assert!(err < 1e-10 * (1.0 + len), "err {err}");
    }
}

/// Stationary point of order `M` at the origin under a bump: `|I(λ)| ~ λ^{-1/M}`.
#[test]
fn monomial_phase_decays_at_van_der_corput_rate() {
    let q = OscillatoryQuadrature::default();
    let bump = |s: f64| if s.abs() < 1.0 { (-1.0 / (1.0 - s * s)).exp() } else { 0.0 };
    let lambdas: Vec<f64> = (0..10).map(|k| 10f64.powf(3.0 + 0.2 * k as f64)).collect();
    for m in 2..=4 {
        let mags: Vec<f64> = lambdas
            .iter()
            .map(|&l| q.integrate(&|s: f64| s.powi(m), &bump, l, -1.0, 1.0).unwrap().norm())
            .collect();
        assert!(mags.windows(2).all(|w| w[1] < w[0]), "M {m}: {mags:?}");
        let fit = loglog_fit(&lambdas, &mags).unwrap();
        assert!((fit.slope + 1.0 / m as f64).abs() < 0.02, "M {m} slope {}", fit.slope);
    }
}
