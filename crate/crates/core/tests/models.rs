use qes_core::conditional::{admissible_a, series_coefficients, termination_energy};
use qes_core::exact::exact_eigenvalue;
use qes_core::models::{
    mustafa_energy, mustafa_hft_partials, refute, to_canonical, ConfinedPdmModel, KgOscillatorModel, Model,
    PseudoConfinedModel,
};
use qes_core::oracle::{solve_potential, solve_spectrum, OracleConfig};
use qes_core::exponent;

fn model2() -> Model {
    Model::PseudoConfined(PseudoConfinedModel { omega: 1.0, beta_t: 0.5, eta: 1.0, a_t: 1.0, b_t: 1.0, n_r: 0 })
}

fn model3() -> Model {
    Model::ConfinedPdm(ConfinedPdmModel { omega1: 1.0, gamma1: 0.0, m: 1.0, A: 1.0, B: 0.5, n_r: 0 })
}

#[test]
fn oscillator_claim_is_the_exact_spectrum() {
    for (omega, g, n_r) in [(1.0, 0.5, 0), (3.0, 1.5, 2), (0.25, -2.0, 5)] {
        let m = Model::KgOscillator(KgOscillatorModel { omega, gamma_t: g, n_r });
        let (_, scale) = to_canonical(&m).unwrap();
        assert_eq!(mustafa_energy(&m) / scale, exact_eigenvalue(i64::from(n_r), &g).unwrap());
    }
}

#[test]
fn pseudo_confined_claim_is_refuted() {
    let report = refute(&model2(), None).unwrap();
    assert_eq!(report.mustafa_value, 2.75);
    assert_eq!(report.mustafa_partials["dE/db_t"], 0.0);
    assert!(report.oracle_partials["<1/rho>"] > 0.3);
    assert!(report.verdicts["hft_violated"]);
    assert!(report.verdicts["coulomb_partial_violated"]);
    assert!(!report.verdicts["in_spectrum"]);
    assert!(!report.verdicts["second_condition_satisfied"]);
    // oracle regression value
    assert!((report.gap - 2.493034251931628).abs() <= 1e-6, "{}", report.gap);
}

#[test]
fn confined_pdm_claim_is_refuted() {
    let report = refute(&model3(), None).unwrap();
    assert_eq!(report.canonical.b, 2.0);
    assert_eq!(report.mustafa_partials["dlambda1/dB"], 0.0);
    assert!(report.oracle_partials["<1/rho>"] > 0.3);
    assert!(report.verdicts["hft_violated"]);
    assert!(!report.verdicts["in_spectrum"]);
    assert!((report.gap - 4.462911614396337).abs() <= 1e-6, "{}", report.gap);
}

#[test]
fn verdicts_follow_from_stored_numbers() {
    for report in [refute(&model2(), None).unwrap(), refute(&model3(), None).unwrap()] {
        assert_eq!(report.verdicts["in_spectrum"], report.gap <= report.gap_tolerance);
        assert_eq!(report.gap, (report.mustafa_scaled - report.oracle_nearest_eigenvalue).abs());
        assert_eq!(report.mustafa_scaled, report.mustafa_value / report.scale);
    }
}

/// `b > 0` with `c_{n+1}(a = 0, b) = 0`, by bisection on the recurrence.
fn coulomb_free_root(n: usize, gamma: f64) -> f64 {
    let s = exponent(&gamma);
    let f = |b: f64| {
        let w = termination_energy(n as i64, &gamma, &b).unwrap();
        series_coefficients(n + 1, &s, &0.0, &b, &w)[n + 1]
    };
    let mut lo = 0.05;
    while f(lo).signum() == f(lo + 0.05).signum() {
        lo += 0.05;
        assert!(lo < 20.0, "no sign change");
    }
    let mut hi = lo + 0.05;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == f(lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn tuned_confined_pdm_lands_on_an_eigenvalue() {
    // n_r = 1 so the claimed energy has the form of W^(2); B = 0 and b on the curve c_3(0, b) = 0
    let b = coulomb_free_root(2, 0.0);
    let roots = admissible_a(2, 0.0, b).unwrap().roots;
    let index = roots.iter().position(|a| a.abs() < 1e-8).expect("a = 0 is admissible");
    let m = Model::ConfinedPdm(ConfinedPdmModel { omega1: 1.0, gamma1: 0.0, m: 1.0, A: b / 2.0, B: 0.0, n_r: 1 });
    let report = refute(&m, None).unwrap();
    assert!(report.verdicts["second_condition_satisfied"]);
    assert!(report.verdicts["in_spectrum"], "{report:?}");
    assert_eq!(report.oracle_nearest_index, index);
    // the claimed derivative in B is still wrong
    assert!(report.verdicts["coulomb_partial_violated"]);
}

#[test]
fn model_partials_are_analytic() {
    let m = Model::ConfinedPdm(ConfinedPdmModel { omega1: 2.0, gamma1: 0.0, m: 1.5, A: 0.4, B: 0.5, n_r: 0 });
    let p = mustafa_hft_partials(&m);
    assert_eq!(p["dlambda1/dB"], 0.0);
    // d/dA of -m²A²/ω² = -2m²A/ω²
    assert!((p["dlambda1/dA"] + 2.0 * 1.5 * 1.5 * 0.4 / 4.0).abs() < 1e-15);
}

#[test]
fn canonical_and_unscaled_spectra_agree() {
    let m = Model::PseudoConfined(PseudoConfinedModel { omega: 2.0, beta_t: 0.5, eta: 1.2, a_t: 0.7, b_t: 1.1, n_r: 0 });
    let (canonical, scale) = to_canonical(&m).unwrap();
    let config = OracleConfig::for_problem(&canonical);
    let scaled = solve_spectrum(&canonical, &config).unwrap();
    let (gamma, potential) = m.unscaled();
    let unscaled_config = OracleConfig::new(config.rho_max / scale.sqrt(), config.num_points, config.num_states).unwrap();
    let unscaled = solve_potential(gamma, &potential, &unscaled_config).unwrap();
    for (w, e) in scaled.eigenvalues.iter().zip(&unscaled) {
        assert!((scale * w - e).abs() <= 1e-6);
    }
}

#[test]
fn generic_couplings_always_violate_hft() {
    for (b_t, eta, a_t) in [(0.3, 1.0, 2.0), (2.0, -0.5, 1.0), (0.7, 1.5, -0.4)] {
        let m = Model::PseudoConfined(PseudoConfinedModel { omega: 1.3, beta_t: 1.0, eta, a_t, b_t, n_r: 1 });
        let report = refute(&m, None).unwrap();
        assert!(report.verdicts["hft_violated"], "{report:?}");
    }
}
