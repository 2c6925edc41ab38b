//! Independent numerical spectrum of the radial equation.
//!
//! The equation is rewritten for `φ = F/ρ^s` in self-adjoint form
//!
//! ```text
//! −(ρ^{2s} φ')' + ρ^{2s} V(ρ) φ = W ρ^{2s} φ,   V = qρ² + c/ρ + lρ
//! ```
//!
//! and discretized by cell-centred finite volumes on a uniform grid over
//! `(0, ρ_max]`, with exact cell integrals of the power weights and
//! `φ(ρ_max) = 0`. `F(0) = 0` is carried by the `ρ^s` factor, which keeps the
//! scheme second order even for `γ = 0` where `F ~ ρ^{1/2}`. Symmetrizing
//! with the diagonal mass matrix gives a symmetric tridiagonal eigenproblem;
//! two resolutions are combined by Richardson extrapolation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::{count_nodes, GridFunction, RadialProblem};
use crate::tridiag::SymTridiagonal;

/// Extrapolated and fine-grid eigenvalues further apart than this raise a warning.
pub const EXTRAPOLATION_WARN: f64 = 1e-4;
/// A formula value is declared in the spectrum when its gap is within this
/// many times the eigenvalue accuracy estimate.
pub const GAP_FACTOR: f64 = 50.0;
/// Floor for the accuracy estimate, roughly the bisection noise level.
pub const ACCURACY_FLOOR: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub rho_max: f64,
    /// Cells on the coarse grid; the fine grid has twice as many.
    pub num_points: usize,
    pub num_states: usize,
}

impl OracleConfig {
    pub fn new(rho_max: f64, num_points: usize, num_states: usize) -> Result<Self> {
        let config = OracleConfig { rho_max, num_points, num_states };
        config.validate()?;
        Ok(config)
    }

    /// `ρ_max = 12 + |b| + |a|/2`, 4000 cells, 4 states.
    pub fn for_problem(problem: &RadialProblem<f64>) -> Self {
        OracleConfig {
            rho_max: 12.0 + problem.b.abs() + problem.a.abs() / 2.0,
            num_points: 4000,
            num_states: 4,
        }
    }

    pub fn with_states(mut self, num_states: usize) -> Self {
        self.num_states = num_states;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.rho_max.is_finite() || self.rho_max <= 0.0 {
            return Err(Error::argument(format!("rho_max must be positive, got {}", self.rho_max)));
        }
        if self.num_points < 100 {
            return Err(Error::argument(format!("num_points must be >= 100, got {}", self.num_points)));
        }
        if self.num_states == 0 {
            return Err(Error::argument("num_states must be >= 1"));
        }
        if self.num_states > self.num_points / 10 {
            return Err(Error::argument(format!(
                "{} states cannot be resolved on {} cells (limit {})",
                self.num_states,
                self.num_points,
                self.num_points / 10
            )));
        }
        Ok(())
    }
}

/// `q ρ² + c/ρ + l ρ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    pub quadratic: f64,
    pub coulomb: f64,
    pub linear: f64,
}

impl Potential {
    pub fn canonical(problem: &RadialProblem<f64>) -> Self {
        Potential { quadratic: 1.0, coulomb: problem.a, linear: problem.b }
    }
}

/// `∫_{x0}^{x1} ρ^k dρ` for `k ≥ 0`, without cancellation for `x0 ≈ x1`.
fn power_integral(k: f64, x0: f64, x1: f64) -> f64 {
    let m = k + 1.0;
    if x0 == 0.0 {
        return x1.powf(m) / m;
    }
    x0.powf(m) * (m * ((x1 - x0) / x0).ln_1p()).exp_m1() / m
}

struct Discretization {
    matrix: SymTridiagonal,
    centers: Vec<f64>,
    weights: Vec<f64>,
}

fn discretize(gamma: f64, potential: &Potential, rho_max: f64, cells: usize) -> Discretization {
    let s = gamma.abs() + 0.5;
    let p = 2.0 * s;
    let h = rho_max / cells as f64;
    let mut centers = Vec::with_capacity(cells);
    let mut weights = Vec::with_capacity(cells);
    let mut diag = Vec::with_capacity(cells);
    for i in 0..cells {
        let (x0, x1) = (i as f64 * h, (i + 1) as f64 * h);
        centers.push(x0 + 0.5 * h);
        weights.push(power_integral(p, x0, x1));
        let volume = potential.quadratic * power_integral(p + 2.0, x0, x1)
            + potential.coulomb * power_integral(p - 1.0, x0, x1)
            + potential.linear * power_integral(p + 1.0, x0, x1);
        let left = if i == 0 { 0.0 } else { x0.powf(p) / h };
        // last face sits on the Dirichlet boundary, half a cell away
        let right = if i + 1 == cells { 2.0 * x1.powf(p) / h } else { x1.powf(p) / h };
        diag.push(left + right + volume);
    }
    let off: Vec<f64> = (0..cells - 1)
        .map(|i| -(((i + 1) as f64) * h).powf(p) / h / (weights[i] * weights[i + 1]).sqrt())
        .collect();
    for (d, w) in diag.iter_mut().zip(&weights) {
        *d /= w;
    }
    Discretization { matrix: SymTridiagonal::new(diag, off), centers, weights }
}

struct RawSpectrum {
    extrapolated: Vec<f64>,
    fine: Vec<f64>,
    coarse: Vec<f64>,
    fine_grid: Discretization,
}

fn raw_spectrum(gamma: f64, potential: &Potential, config: &OracleConfig) -> Result<RawSpectrum> {
    config.validate()?;
    let coarse_grid = discretize(gamma, potential, config.rho_max, config.num_points);
    let fine_grid = discretize(gamma, potential, config.rho_max, 2 * config.num_points);
    let coarse = coarse_grid.matrix.lowest_eigenvalues(config.num_states);
    let fine = fine_grid.matrix.lowest_eigenvalues(config.num_states);
    let extrapolated = fine.iter().zip(&coarse).map(|(f, c)| (4.0 * f - c) / 3.0).collect();
    Ok(RawSpectrum { extrapolated, fine, coarse, fine_grid })
}

/// Extrapolated eigenvalues of `−U'' + [(γ²−1/4)/r² + V(r)]U = E U`
/// for an arbitrary [`Potential`].
pub fn solve_potential(gamma: f64, potential: &Potential, config: &OracleConfig) -> Result<Vec<f64>> {
    Ok(raw_spectrum(gamma, potential, config)?.extrapolated)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimate {
    pub problem: RadialProblem<f64>,
    pub config: OracleConfig,
    /// Richardson-extrapolated, ascending.
    pub eigenvalues: Vec<f64>,
    /// Fine-grid (unextrapolated) eigenvalues.
    pub fine_eigenvalues: Vec<f64>,
    pub coarse_eigenvalues: Vec<f64>,
    /// `max(|extrapolated − fine|, ACCURACY_FLOOR)` per state.
    pub accuracy: Vec<f64>,
    /// Normalized `F` on the fine grid (cell centres plus `ρ_max`).
    pub states: Vec<GridFunction>,
    pub node_counts: Vec<usize>,
    pub warnings: Vec<String>,
}

pub fn solve_spectrum(problem: &RadialProblem<f64>, config: &OracleConfig) -> Result<SpectrumEstimate> {
    let potential = Potential::canonical(problem);
    let raw = raw_spectrum(problem.gamma, &potential, config)?;
    let s = problem.gamma.abs() + 0.5;
    let disc = &raw.fine_grid;
    let mut nodes = disc.centers.clone();
    nodes.push(config.rho_max);

    let mut states = Vec::with_capacity(raw.fine.len());
    let mut node_counts = Vec::with_capacity(raw.fine.len());
    for &lambda in &raw.fine {
        let y = disc.matrix.eigenvector(lambda);
        let mut values: Vec<f64> = y
            .iter()
            .zip(&disc.weights)
            .zip(&disc.centers)
            .map(|((yi, wi), r)| r.powf(s) * yi / wi.sqrt())
            .collect();
        values.push(0.0);
        let peak = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        // sign convention: positive near the origin
        if let Some(first) = values.iter().find(|v| v.abs() > 1e-8 * peak) {
            if *first < 0.0 {
                values.iter_mut().for_each(|v| *v = -*v);
            }
        }
        let state = GridFunction::new(nodes.clone(), values)?.normalized()?;
        // tail samples at rounding level would add spurious sign changes
        let threshold = 1e-10 * state.values().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let cleaned: Vec<f64> =
            state.values().iter().map(|v| if v.abs() < threshold { 0.0 } else { *v }).collect();
        node_counts.push(count_nodes(&GridFunction::new(nodes.clone(), cleaned)?));
        states.push(state);
    }

    let accuracy: Vec<f64> = raw
        .extrapolated
        .iter()
        .zip(&raw.fine)
        .map(|(e, f)| (e - f).abs().max(ACCURACY_FLOOR))
        .collect();
    let warnings = accuracy
        .iter()
        .enumerate()
        .filter(|(_, acc)| **acc > EXTRAPOLATION_WARN)
        .map(|(k, acc)| format!("state {k}: extrapolation disagreement {acc:e} exceeds {EXTRAPOLATION_WARN:e}"))
        .collect();
    Ok(SpectrumEstimate {
        problem: problem.clone(),
        config: config.clone(),
        eigenvalues: raw.extrapolated,
        fine_eigenvalues: raw.fine,
        coarse_eigenvalues: raw.coarse,
        accuracy,
        states,
        node_counts,
        warnings,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    InvRho,
    Rho,
}

/// `∫ F² w(ρ) dρ` by the trapezoidal rule for a normalized state.
pub fn expectation(state: &GridFunction, weight: Weight) -> Result<f64> {
    if !state.is_normalized(1e-10) {
        return Err(Error::argument(format!("state is not normalized (norm {})", state.norm())));
    }
    Ok(match weight {
        Weight::InvRho => state.weighted_integral(|r| 1.0 / r),
        Weight::Rho => state.weighted_integral(|r| r),
    })
}

/// Finite-difference `∂W/∂a`, `∂W/∂b` against `⟨1/ρ⟩`, `⟨ρ⟩`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HftReport {
    pub problem: RadialProblem<f64>,
    pub nu: usize,
    pub delta: f64,
    pub eigenvalue: f64,
    pub dw_da_fd: f64,
    pub expect_inv_rho: f64,
    pub dw_db_fd: f64,
    pub expect_rho: f64,
    pub max_rel_error: f64,
    /// False if the tracked state changed node count under a perturbation.
    pub valid: bool,
}

impl HftReport {
    pub fn derivatives_positive(&self) -> bool {
        self.dw_da_fd > 0.0 && self.dw_db_fd > 0.0
    }
}

pub fn hft_check(
    problem: &RadialProblem<f64>,
    nu: usize,
    delta: f64,
    config: &OracleConfig,
) -> Result<HftReport> {
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::argument(format!("delta must be positive, got {delta}")));
    }
    let config = config.clone().with_states(config.num_states.max(nu + 1));
    let centre = solve_spectrum(problem, &config)?;
    let shifted = |da: f64, db: f64| {
        let p = RadialProblem::new(problem.gamma, problem.a + da, problem.b + db);
        solve_spectrum(&p, &config)
    };
    let (a_plus, a_minus) = (shifted(delta, 0.0)?, shifted(-delta, 0.0)?);
    let (b_plus, b_minus) = (shifted(0.0, delta)?, shifted(0.0, -delta)?);
    let dw_da_fd = (a_plus.eigenvalues[nu] - a_minus.eigenvalues[nu]) / (2.0 * delta);
    let dw_db_fd = (b_plus.eigenvalues[nu] - b_minus.eigenvalues[nu]) / (2.0 * delta);
    let expect_inv_rho = expectation(&centre.states[nu], Weight::InvRho)?;
    let expect_rho = expectation(&centre.states[nu], Weight::Rho)?;
    let max_rel_error = ((dw_da_fd - expect_inv_rho) / expect_inv_rho)
        .abs()
        .max(((dw_db_fd - expect_rho) / expect_rho).abs());
    let nodes = centre.node_counts[nu];
    let valid = nodes == nu
        && [&a_plus, &a_minus, &b_plus, &b_minus].iter().all(|s| s.node_counts[nu] == nodes);
    Ok(HftReport {
        problem: problem.clone(),
        nu,
        delta,
        eigenvalue: centre.eigenvalues[nu],
        dw_da_fd,
        expect_inv_rho,
        dw_db_fd,
        expect_rho,
        max_rel_error,
        valid,
    })
}

/// Where a closed-form energy lands relative to the numerical spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormulaCheck {
    pub problem: RadialProblem<f64>,
    pub formula_w: f64,
    pub nearest_index: usize,
    pub nearest_eigenvalue: f64,
    pub gap: f64,
    /// `GAP_FACTOR` times the accuracy estimate of the nearest eigenvalue.
    pub tolerance: f64,
    pub in_spectrum: bool,
    pub eigenvalues: Vec<f64>,
}

pub fn spectrum_vs_formula(
    problem: &RadialProblem<f64>,
    formula_w: f64,
    config: &OracleConfig,
) -> Result<FormulaCheck> {
    config.validate()?;
    // enough states to bracket formula_w from above
    let fine = discretize(problem.gamma, &Potential::canonical(problem), config.rho_max, 2 * config.num_points);
    let needed = fine.matrix.count_below(formula_w) + 2;
    let limit = config.num_points / 10;
    let config = config.clone().with_states(config.num_states.max(needed).min(limit));
    let spectrum = solve_spectrum(problem, &config)?;
    let (nearest_index, nearest_eigenvalue) = spectrum
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .min_by(|x, y| (x.1 - formula_w).abs().total_cmp(&(y.1 - formula_w).abs()))
        .expect("at least one state");
    let gap = (nearest_eigenvalue - formula_w).abs();
    let tolerance = GAP_FACTOR * spectrum.accuracy[nearest_index];
    Ok(FormulaCheck {
        problem: problem.clone(),
        formula_w,
        nearest_index,
        nearest_eigenvalue,
        gap,
        tolerance,
        in_spectrum: gap <= tolerance,
        eigenvalues: spectrum.eigenvalues,
    })
}
