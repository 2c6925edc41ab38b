//! Physical radial models that reduce to the canonical equation, the
//! closed-form energies claimed for them, and numerical checks of those
//! claims.
//!
//! With `ρ = ω^{1/2} r` every model becomes the canonical problem with
//! `W = energy/ω`:
//!
//! | model | γ | a | b |
//! |---|---|---|---|
//! | KG oscillator | γ̃ | 0 | 0 |
//! | pseudo-confined PDM | β̃ | b̃/ω^{1/2} | ηã/ω^{3/2} |
//! | confined PDM | γ̃₁ | 2B/ω₁^{1/2} | 2mA/ω₁^{3/2} |
//!
//! The claimed energies have no dependence on the Coulomb coupling, while
//! the Hellmann-Feynman theorem requires `∂E/∂(coupling) ∝ ⟨1/r⟩ > 0`.
//! (The Coulomb limit `ω → 0` is a further inconsistency; it falls outside
//! the scaled canonical form and is not checked here.)

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::conditional::admissible_a;
use crate::error::{Error, Result};
use crate::oracle::{hft_check, solve_spectrum, spectrum_vs_formula, OracleConfig};
use crate::radial::RadialProblem;

/// `U'' + [λ̃ + (1/4 − γ̃²)/r² − ω̃²r²] U = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KgOscillatorModel {
    pub omega: f64,
    pub gamma_t: f64,
    pub n_r: u32,
}

/// `U'' + [E + (1/4 − β̃²)/r² − ω̃²r² − ηãr − b̃/r] U = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PseudoConfinedModel {
    pub omega: f64,
    pub beta_t: f64,
    pub eta: f64,
    pub a_t: f64,
    pub b_t: f64,
    pub n_r: u32,
}

/// `U'' + [λ̃₁ + (1/4 − γ̃₁²)/r² − ω̃₁²r² − 2mAr − 2B/r] U = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct ConfinedPdmModel {
    pub omega1: f64,
    pub gamma1: f64,
    pub m: f64,
    pub A: f64,
    pub B: f64,
    pub n_r: u32,
}

/// Model record as stored in JSON, tagged by `"model"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    KgOscillator(KgOscillatorModel),
    PseudoConfined(PseudoConfinedModel),
    ConfinedPdm(ConfinedPdmModel),
}

impl Model {
    pub fn id(&self) -> &'static str {
        match self {
            Model::KgOscillator(_) => "kg_oscillator",
            Model::PseudoConfined(_) => "pseudo_confined",
            Model::ConfinedPdm(_) => "confined_pdm",
        }
    }

    pub fn omega(&self) -> f64 {
        match self {
            Model::KgOscillator(m) => m.omega,
            Model::PseudoConfined(m) => m.omega,
            Model::ConfinedPdm(m) => m.omega1,
        }
    }

    pub fn n_r(&self) -> u32 {
        match self {
            Model::KgOscillator(m) => m.n_r,
            Model::PseudoConfined(m) => m.n_r,
            Model::ConfinedPdm(m) => m.n_r,
        }
    }

    fn check(&self) -> Result<()> {
        let omega = self.omega();
        if !omega.is_finite() || omega <= 0.0 {
            return Err(Error::argument(format!("{}: omega must be positive, got {omega}", self.id())));
        }
        Ok(())
    }

    /// Unscaled potential `ω²r² + c/r + l r` and the centrifugal parameter.
    pub fn unscaled(&self) -> (f64, crate::oracle::Potential) {
        use crate::oracle::Potential;
        match self {
            Model::KgOscillator(m) => {
                (m.gamma_t, Potential { quadratic: m.omega * m.omega, coulomb: 0.0, linear: 0.0 })
            }
            Model::PseudoConfined(m) => (
                m.beta_t,
                Potential { quadratic: m.omega * m.omega, coulomb: m.b_t, linear: m.eta * m.a_t },
            ),
            Model::ConfinedPdm(m) => (
                m.gamma1,
                Potential { quadratic: m.omega1 * m.omega1, coulomb: 2.0 * m.B, linear: 2.0 * m.m * m.A },
            ),
        }
    }
}

/// Canonical `(γ, a, b)` and the energy scale `ω` (`energy = ω·W`).
pub fn to_canonical(model: &Model) -> Result<(RadialProblem<f64>, f64)> {
    model.check()?;
    let omega = model.omega();
    let root = omega.sqrt();
    let problem = match model {
        Model::KgOscillator(m) => RadialProblem::oscillator(m.gamma_t),
        Model::PseudoConfined(m) => RadialProblem::new(m.beta_t, m.b_t / root, m.eta * m.a_t / (omega * root)),
        Model::ConfinedPdm(m) => RadialProblem::new(m.gamma1, 2.0 * m.B / root, 2.0 * m.m * m.A / (omega * root)),
    };
    Ok((problem, omega))
}

/// The claimed closed-form energy, evaluated as published.
pub fn mustafa_energy(model: &Model) -> f64 {
    match model {
        Model::KgOscillator(m) => 2.0 * m.omega * (2.0 * f64::from(m.n_r) + m.gamma_t.abs() + 1.0),
        Model::PseudoConfined(m) => {
            2.0 * m.omega * (2.0 * f64::from(m.n_r) + m.beta_t.abs() + 1.0)
                - m.a_t * m.a_t * m.eta * m.eta / (4.0 * m.omega * m.omega)
        }
        Model::ConfinedPdm(m) => {
            2.0 * m.omega1 * (2.0 * f64::from(m.n_r) + m.gamma1.abs() + 1.0)
                - m.m * m.m * m.A * m.A / (m.omega1 * m.omega1)
        }
    }
}

/// Analytic partial derivatives of [`mustafa_energy`] with respect to the
/// Coulomb and linear couplings. Empty for the oscillator.
pub fn mustafa_hft_partials(model: &Model) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    match model {
        Model::KgOscillator(_) => {}
        Model::PseudoConfined(m) => {
            out.insert("dE/db_t".into(), 0.0);
            out.insert("dE/deta".into(), -m.a_t * m.a_t * m.eta / (2.0 * m.omega * m.omega));
        }
        Model::ConfinedPdm(m) => {
            out.insert("dlambda1/dB".into(), 0.0);
            out.insert("dlambda1/dA".into(), -2.0 * m.m * m.m * m.A / (m.omega1 * m.omega1));
        }
    }
    out
}

/// Hellmann-Feynman values of the same partials for state `n_r`:
/// model 2 `∂E/∂b̃ = ⟨1/r⟩`, `∂E/∂η = ã⟨r⟩`;
/// model 3 `∂λ̃₁/∂B = 2⟨1/r⟩`, `∂λ̃₁/∂A = 2m⟨r⟩`,
/// with `⟨1/r⟩ = ω^{1/2}⟨1/ρ⟩` and `⟨r⟩ = ⟨ρ⟩/ω^{1/2}`.
fn hft_partials(model: &Model, inv_rho: f64, rho: f64) -> BTreeMap<String, f64> {
    let root = model.omega().sqrt();
    let (inv_r, r) = (root * inv_rho, rho / root);
    let mut out = BTreeMap::new();
    out.insert("<1/rho>".into(), inv_rho);
    out.insert("<rho>".into(), rho);
    match model {
        Model::KgOscillator(_) => {}
        Model::PseudoConfined(m) => {
            out.insert("dE/db_t".into(), inv_r);
            out.insert("dE/deta".into(), m.a_t * r);
        }
        Model::ConfinedPdm(m) => {
            out.insert("dlambda1/dB".into(), 2.0 * inv_r);
            out.insert("dlambda1/dA".into(), 2.0 * m.m * r);
        }
    }
    out
}

/// Relative mismatch above which a claimed partial derivative is declared
/// inconsistent with the Hellmann-Feynman value.
pub const PARTIAL_MISMATCH: f64 = 1e-3;
/// `|a − a^(n,i)|` below which the second condition counts as satisfied.
pub const SECOND_CONDITION_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefutationReport {
    pub model: String,
    pub parameters: Model,
    pub canonical: RadialProblem<f64>,
    pub scale: f64,
    pub mustafa_value: f64,
    /// `mustafa_value / scale`, comparable to canonical eigenvalues.
    pub mustafa_scaled: f64,
    pub mustafa_partials: BTreeMap<String, f64>,
    pub oracle_partials: BTreeMap<String, f64>,
    /// Finite-difference Hellmann-Feynman check of the oracle itself.
    pub oracle_hft_max_rel_error: f64,
    pub oracle_eigenvalue_n_r: f64,
    pub oracle_nearest_eigenvalue: f64,
    pub oracle_nearest_index: usize,
    pub gap: f64,
    pub gap_tolerance: f64,
    /// Degree `n = 2 n_r` whose termination energy has the claimed form.
    pub matching_degree: usize,
    /// Admissible `a^(n,i)(b)` for that degree.
    pub admissible_a: Vec<f64>,
    pub second_condition_residual: f64,
    pub verdicts: BTreeMap<String, bool>,
    pub notes: Vec<String>,
}

pub fn refute(model: &Model, config: Option<&OracleConfig>) -> Result<RefutationReport> {
    let (canonical, scale) = to_canonical(model)?;
    if canonical.is_exactly_solvable() {
        return Err(Error::argument(format!(
            "{}: exactly solvable (a = b = 0); nothing to refute",
            model.id()
        )));
    }
    let n_r = model.n_r() as usize;
    let config = config
        .cloned()
        .unwrap_or_else(|| OracleConfig::for_problem(&canonical))
        .with_states(n_r + 2);

    let mustafa_value = mustafa_energy(model);
    let mustafa_scaled = mustafa_value / scale;
    let mustafa_partials = mustafa_hft_partials(model);

    let hft = hft_check(&canonical, n_r, 1e-3, &config)?;
    let oracle_partials = hft_partials(model, hft.expect_inv_rho, hft.expect_rho);
    let spectrum = solve_spectrum(&canonical, &config)?;
    let formula = spectrum_vs_formula(&canonical, mustafa_scaled, &config)?;

    let matching_degree = 2 * n_r;
    let roots = admissible_a(matching_degree as i64, canonical.gamma, canonical.b)?;
    let second_condition_residual = roots
        .roots
        .iter()
        .map(|r| (r - canonical.a).abs())
        .fold(f64::INFINITY, f64::min);

    let mut verdicts = BTreeMap::new();
    let mismatched: Vec<bool> = mustafa_partials
        .iter()
        .map(|(name, claimed)| {
            let hft_value = oracle_partials[name];
            (claimed - hft_value).abs() > PARTIAL_MISMATCH * hft_value.abs().max(1e-12)
        })
        .collect();
    let coulomb_key = match model {
        Model::PseudoConfined(_) => "dE/db_t",
        _ => "dlambda1/dB",
    };
    verdicts.insert(
        "coulomb_partial_violated".to_string(),
        mustafa_partials[coulomb_key] == 0.0 && oracle_partials[coulomb_key] > 0.0,
    );
    verdicts.insert("hft_violated".to_string(), mismatched.iter().any(|m| *m));
    verdicts.insert("in_spectrum".to_string(), formula.in_spectrum);
    verdicts.insert(
        "second_condition_satisfied".to_string(),
        second_condition_residual <= SECOND_CONDITION_TOL * canonical.a.abs().max(1.0),
    );
    verdicts.insert("oracle_hft_consistent".to_string(), hft.valid && hft.max_rel_error <= 1e-3);

    let mut notes = vec![format!(
        "termination energy of degree n = 2 n_r = {matching_degree} has the claimed form; \
         the polynomial degree and the radial index differ in general"
    )];
    if formula.in_spectrum && formula.nearest_index != n_r {
        notes.push(format!(
            "claimed energy coincides with state {} rather than n_r = {n_r}",
            formula.nearest_index
        ));
    }

    Ok(RefutationReport {
        model: model.id().to_string(),
        parameters: model.clone(),
        canonical,
        scale,
        mustafa_value,
        mustafa_scaled,
        mustafa_partials,
        oracle_partials,
        oracle_hft_max_rel_error: hft.max_rel_error,
        oracle_eigenvalue_n_r: spectrum.eigenvalues[n_r],
        oracle_nearest_eigenvalue: formula.nearest_eigenvalue,
        oracle_nearest_index: formula.nearest_index,
        gap: formula.gap,
        gap_tolerance: formula.tolerance,
        matching_degree,
        admissible_a: roots.roots,
        second_condition_residual,
        verdicts,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model2() -> Model {
        Model::PseudoConfined(PseudoConfinedModel { omega: 1.0, beta_t: 0.5, eta: 1.0, a_t: 1.0, b_t: 1.0, n_r: 0 })
    }

    #[test]
    fn canonical_mappings() {
        let m1 = Model::KgOscillator(KgOscillatorModel { omega: 4.0, gamma_t: 0.5, n_r: 0 });
        assert_eq!(to_canonical(&m1).unwrap(), (RadialProblem::new(0.5, 0.0, 0.0), 4.0));
        assert_eq!(to_canonical(&model2()).unwrap(), (RadialProblem::new(0.5, 1.0, 1.0), 1.0));
        let m3 = Model::ConfinedPdm(ConfinedPdmModel { omega1: 1.0, gamma1: 0.0, m: 1.0, A: 0.5, B: 0.5, n_r: 0 });
        assert_eq!(to_canonical(&m3).unwrap(), (RadialProblem::new(0.0, 1.0, 1.0), 1.0));
        let m = Model::PseudoConfined(PseudoConfinedModel { omega: 4.0, beta_t: 1.0, eta: 2.0, a_t: 3.0, b_t: 5.0, n_r: 0 });
        assert_eq!(to_canonical(&m).unwrap().0, RadialProblem::new(1.0, 2.5, 0.75));
        let bad = Model::KgOscillator(KgOscillatorModel { omega: 0.0, gamma_t: 0.5, n_r: 0 });
        assert!(matches!(to_canonical(&bad), Err(Error::Argument(_))));
    }

    #[test]
    fn claimed_energies() {
        let m1 = Model::KgOscillator(KgOscillatorModel { omega: 1.0, gamma_t: 0.5, n_r: 0 });
        assert_eq!(mustafa_energy(&m1), 3.0);
        assert_eq!(mustafa_energy(&model2()), 2.75);
        let m3 = Model::ConfinedPdm(ConfinedPdmModel { omega1: 1.0, gamma1: 0.0, m: 1.0, A: 1.0, B: 0.3, n_r: 1 });
        assert_eq!(mustafa_energy(&m3), 5.0);
    }

    #[test]
    fn claimed_partials() {
        assert!(mustafa_hft_partials(&Model::KgOscillator(KgOscillatorModel { omega: 1.0, gamma_t: 0.0, n_r: 0 }))
            .is_empty());
        let m = Model::PseudoConfined(PseudoConfinedModel { omega: 1.0, beta_t: 0.5, eta: 2.0, a_t: 1.0, b_t: 1.0, n_r: 0 });
        let p = mustafa_hft_partials(&m);
        assert_eq!(p["dE/db_t"], 0.0);
        assert_eq!(p["dE/deta"], -1.0);
        let m3 = Model::ConfinedPdm(ConfinedPdmModel { omega1: 1.0, gamma1: 0.0, m: 1.0, A: 1.0, B: 0.5, n_r: 0 });
        assert_eq!(mustafa_hft_partials(&m3)["dlambda1/dB"], 0.0);
    }

    #[test]
    fn json_field_names() {
        let json = r#"{"model":"confined_pdm","omega1":1.0,"gamma1":0.0,"m":1.0,"A":1.0,"B":0.5,"n_r":0}"#;
        let m: Model = serde_json::from_str(json).unwrap();
        assert_eq!(m.id(), "confined_pdm");
        let back = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<Model>(&back).unwrap(), m);
        assert!(serde_json::from_str::<Model>(r#"{"model":"kg_oscillator","omega":1,"gamma_t":0,"n_r":0,"x":1}"#).is_err());
    }

    #[test]
    fn oscillator_cannot_be_refuted() {
        let m1 = Model::KgOscillator(KgOscillatorModel { omega: 2.0, gamma_t: 1.5, n_r: 3 });
        assert!(matches!(refute(&m1, None), Err(Error::Argument(msg)) if msg.contains("exactly solvable")));
    }
}
