//! The canonical radial eigenvalue problem
//!
//! ```text
//! F''(ρ) + [W + (1/4 − γ²)/ρ² − ρ² − a/ρ − bρ] F(ρ) = 0
//! ```
//!
//! together with the polynomial-times-envelope solution form used by both the
//! exact and the conditional solvers, residual evaluation and node counting.

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Parameter triple `(γ, a, b)`. γ is stored as given; only `|γ|` enters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProblem<T = f64> {
    pub gamma: T,
    pub a: T,
    pub b: T,
}

impl<T: Scalar> RadialProblem<T> {
    pub fn new(gamma: T, a: T, b: T) -> Self {
        RadialProblem { gamma, a, b }
    }

    /// The pure oscillator `a = b = 0`.
    pub fn oscillator(gamma: T) -> Self {
        RadialProblem::new(gamma, T::zero(), T::zero())
    }

    pub fn exponent(&self) -> T {
        exponent(&self.gamma)
    }

    pub fn is_exactly_solvable(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl RadialProblem<f64> {
    /// Effective potential `(γ² − 1/4)/ρ² + ρ² + a/ρ + bρ`.
    pub fn potential(&self, rho: f64) -> f64 {
        let g = self.gamma.abs();
        (g - 0.5) * (g + 0.5) / (rho * rho) + rho * rho + self.a / rho + self.b * rho
    }
}

/// Frobenius exponent `s = |γ| + 1/2`.
pub fn exponent<T: Scalar>(gamma: &T) -> T {
    gamma.abs() + T::half()
}

/// Candidate solution
/// `F(ρ) = ρ^s · exp(−b_half·ρ − ρ²/2) · Σ_j c_j ρ^(step·j)`
/// paired with the eigenvalue `W` it is meant to satisfy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialSolution<T = f64> {
    pub s: T,
    pub b_half: T,
    pub coeffs: Vec<T>,
    pub w: T,
    pub step: usize,
}

impl<T: Scalar> PolynomialSolution<T> {
    /// Polynomial degree in ρ.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1) * self.step
    }

    /// Same solution with the series rewritten in plain powers of ρ.
    pub fn to_unit_step(&self) -> Self {
        if self.step == 1 {
            return self.clone();
        }
        let mut dense = vec![T::zero(); self.degree() + 1];
        for (j, c) in self.coeffs.iter().enumerate() {
            dense[j * self.step] = c.clone();
        }
        PolynomialSolution {
            s: self.s.clone(),
            b_half: self.b_half.clone(),
            coeffs: dense,
            w: self.w.clone(),
            step: 1,
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> PolynomialSolution<U> {
        PolynomialSolution {
            s: f(&self.s),
            b_half: f(&self.b_half),
            coeffs: self.coeffs.iter().map(&f).collect(),
            w: f(&self.w),
            step: self.step,
        }
    }
}

impl<T: Scalar> PolynomialSolution<T> {
    /// Value of the polynomial factor and its first two ρ-derivatives.
    fn polynomial_jet(&self, rho: &T) -> (T, T, T) {
        let step = self.step as u32;
        let x = pow(rho, step);
        // P(ρ) = Q(x), x = ρ^step
        let (mut q, mut dq, mut ddq) = (T::zero(), T::zero(), T::zero());
        for c in self.coeffs.iter().rev() {
            ddq = ddq * x.clone() + dq.clone() + dq.clone();
            dq = dq * x.clone() + q.clone();
            q = q * x.clone() + c.clone();
        }
        if step == 1 {
            return (q, dq, ddq);
        }
        // dx/dρ = step·ρ^(step-1), d²x/dρ² = step(step-1)ρ^(step-2)
        let k = T::from_i64(i64::from(step));
        let dx = k.clone() * pow(rho, step - 1);
        let ddx = k.clone() * (k - T::one()) * pow(rho, step - 2);
        (q, dq.clone() * dx.clone(), ddq * dx.clone() * dx + dq * ddx)
    }

    /// Residual divided by the positive envelope `ρ^s e^{−b_half ρ − ρ²/2}`.
    ///
    /// Writing `F = e^φ P`, `F'' = e^φ [P'' + 2φ'P' + (φ'' + φ'²)P]`; the
    /// centrifugal pieces are grouped as `(s − 1/2 − |γ|)(s − 1/2 + |γ|)/ρ²`
    /// so they cancel without rounding when `s` is the Frobenius exponent.
    /// Needs no transcendental functions, so with exact scalars a true
    /// solution gives exactly zero.
    pub fn residual_bracket(&self, problem: &RadialProblem<T>, rho: &T) -> T {
        let (p, dp, ddp) = self.polynomial_jet(rho);
        let half = T::half();
        let one = T::one();
        let two = T::from_i64(2);
        let g = problem.gamma.abs();
        let s = self.s.clone();
        let beta = self.b_half.clone();
        let r = rho.clone();
        let dphi = s.clone() / r.clone() - beta.clone() - r.clone();
        let inv_sq = (s.clone() - half.clone() - g.clone()) * (s.clone() - half + g);
        let inv = -(two.clone() * s.clone() * beta.clone() + problem.a.clone());
        let constant = beta.clone() * beta.clone() - two.clone() * s - one + self.w.clone();
        let linear = two.clone() * beta - problem.b.clone();
        let k = inv_sq / (r.clone() * r.clone()) + inv / r.clone() + constant + linear * r;
        ddp + two * dphi * dp + k * p
    }
}

fn pow<T: Scalar>(x: &T, n: u32) -> T {
    (0..n).fold(T::one(), |acc, _| acc * x.clone())
}

impl<T: Scalar + Float> PolynomialSolution<T> {
    fn envelope(&self, rho: T) -> T {
        rho.powf(self.s) * (-self.b_half * rho - rho * rho * T::half()).exp()
    }

    pub fn eval(&self, rho: T) -> T {
        self.envelope(rho) * self.polynomial_jet(&rho).0
    }

    /// Left-hand side of the radial equation at `rho` for `problem`,
    /// with all derivatives taken analytically.
    pub fn residual_at(&self, problem: &RadialProblem<T>, rho: T) -> T {
        self.envelope(rho) * self.residual_bracket(problem, &rho)
    }
}

/// Maximum absolute residual of `solution` over `grid`.
pub fn ode_residual<T: Scalar + Float>(
    solution: &PolynomialSolution<T>,
    problem: &RadialProblem<T>,
    grid: &[T],
) -> Result<T> {
    if let Some(bad) = grid.iter().find(|r| **r <= T::zero() || r.is_nan()) {
        return Err(Error::domain(format!(
            "residual grid must be strictly positive, found {}",
            Scalar::to_f64(bad)
        )));
    }
    Ok(grid
        .iter()
        .map(|&r| solution.residual_at(problem, r).abs())
        .fold(T::zero(), Float::max))
}

/// `count` log-spaced points in `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..count)
        .map(|k| (l0 + (l1 - l0) * k as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Default residual grid: 200 log-spaced points in `[1e-3, 8]`.
pub fn default_residual_grid() -> Vec<f64> {
    log_grid(1e-3, 8.0, 200)
}

/// Samples of a radial function on a strictly increasing grid in `(0, ρ_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    nodes: Vec<f64>,
    values: Vec<f64>,
    norm: f64,
}

impl GridFunction {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(Error::argument("nodes and values differ in length"));
        }
        if nodes.len() < 2 {
            return Err(Error::argument("grid function needs at least two nodes"));
        }
        if nodes[0] <= 0.0 {
            return Err(Error::domain("grid nodes must lie in (0, rho_max]"));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::argument("grid nodes must be strictly increasing"));
        }
        let norm = trapezoid(&nodes, values.iter().map(|v| v * v)).sqrt();
        Ok(GridFunction { nodes, values, norm })
    }

    /// Samples `f` at `nodes`.
    pub fn sample(nodes: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = nodes.iter().map(|&r| f(r)).collect();
        GridFunction::new(nodes, values)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Trapezoidal L² norm.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm - 1.0).abs() <= tol
    }

    /// Rescaled copy with unit trapezoidal norm.
    pub fn normalized(&self) -> Result<Self> {
        if !self.norm.is_finite() || self.norm <= 0.0 {
            return Err(Error::argument("cannot normalize a zero or non-finite function"));
        }
        let values: Vec<f64> = self.values.iter().map(|v| v / self.norm).collect();
        GridFunction::new(self.nodes.clone(), values)
    }

    /// `∫ f(ρ)² w(ρ) dρ` by the trapezoidal rule.
    pub fn weighted_integral(&self, weight: impl Fn(f64) -> f64) -> f64 {
        trapezoid(
            &self.nodes,
            self.nodes.iter().zip(&self.values).map(|(&r, v)| v * v * weight(r)),
        )
    }
}

/// Trapezoidal rule over the nodes, plus the head interval `[0, x_0]`
/// integrated as a power law `g ~ ρ^k` fitted to the first two samples
/// (radial integrands behave like powers of ρ at the origin).
fn trapezoid(nodes: &[f64], integrand: impl Iterator<Item = f64>) -> f64 {
    let samples: Vec<f64> = integrand.collect();
    let body: f64 = nodes
        .windows(2)
        .zip(samples.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum();
    body + head_integral(nodes, &samples)
}

fn head_integral(nodes: &[f64], samples: &[f64]) -> f64 {
    let (x0, x1, g0, g1) = (nodes[0], nodes[1], samples[0], samples[1]);
    if g0 == 0.0 {
        return 0.0;
    }
    let ratio = g1 / g0;
    let power = if ratio > 0.0 { ratio.ln() / (x1 / x0).ln() } else { 1.0 };
    if !power.is_finite() || power <= -1.0 {
        return 0.5 * x0 * g0;
    }
    g0 * x0 / (power + 1.0)
}

/// Number of strict sign changes in the samples.
///
/// An exact zero inherits the sign of the previous sample, so a root that
/// lands on a grid point is counted once. Leading zeros are skipped.
pub fn count_nodes(f: &GridFunction) -> usize {
    count_sign_changes(f.values())
}

pub(crate) fn count_sign_changes(values: &[f64]) -> usize {
    let mut changes = 0;
    let mut previous: Option<bool> = None;
    for &v in values {
        if v == 0.0 || v.is_nan() {
            continue;
        }
        let positive = v > 0.0;
        if previous.is_some_and(|p| p != positive) {
            changes += 1;
        }
        previous = Some(positive);
    }
    changes
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ground_state_half() -> PolynomialSolution<f64> {
        // ρ·e^{-ρ²/2}, W = 3 for γ = 1/2
        PolynomialSolution { s: 1.0, b_half: 0.0, coeffs: vec![1.0], w: 3.0, step: 2 }
    }

    #[test]
    fn exponent_examples() {
        assert_eq!(exponent(&0.0), 0.5);
        assert_eq!(exponent(&0.5), 1.0);
        assert_eq!(exponent(&-1.5), 2.0);
    }

    #[test]
    fn ground_state_residual_vanishes() {
        let p = RadialProblem::oscillator(0.5);
        let r = ode_residual(&ground_state_half(), &p, &[0.5, 1.0, 2.0]).unwrap();
        assert!(r <= 1e-12, "residual {r}");
    }

    #[test]
    fn perturbed_energy_shows_up_in_residual() {
        let p = RadialProblem::oscillator(0.5);
        let mut sol = ground_state_half();
        sol.w += 0.1;
        let r = ode_residual(&sol, &p, &[0.5, 1.0, 2.0]).unwrap();
        assert!(r > 1e-3);
        // residual is exactly ΔW·F
        assert_relative_eq!(sol.residual_at(&p, 1.0), 0.1 * sol.eval(1.0), max_relative = 1e-12);
    }

    #[test]
    fn residual_rejects_nonpositive_grid() {
        let p = RadialProblem::oscillator(0.5);
        let err = ode_residual(&ground_state_half(), &p, &[1.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn step_two_derivatives_match_unit_step() {
        let sol = PolynomialSolution { s: 1.5, b_half: 0.0, coeffs: vec![1.0, -0.4, 0.03], w: 9.0, step: 2 };
        let dense = sol.to_unit_step();
        assert_eq!(dense.coeffs, vec![1.0, 0.0, -0.4, 0.0, 0.03]);
        for rho in [0.1, 0.7, 2.3] {
            let a = sol.polynomial_jet(&rho);
            let b = dense.polynomial_jet(&rho);
            assert_relative_eq!(a.0, b.0, max_relative = 1e-13);
            assert_relative_eq!(a.1, b.1, max_relative = 1e-13);
            assert_relative_eq!(a.2, b.2, max_relative = 1e-13);
        }
    }

    #[test]
    fn residual_works_in_single_precision() {
        let p = RadialProblem::<f32>::oscillator(0.5);
        let sol = ground_state_half().map(|v| *v as f32);
        let r = ode_residual(&sol, &p, &[0.5f32, 1.0, 2.0]).unwrap();
        assert!(r < 1e-5);
    }

    #[test]
    fn node_count_examples() {
        let nodes = log_grid(1e-3, 8.0, 400);
        let positive = GridFunction::sample(nodes.clone(), |r| r * (-r * r / 2.0).exp()).unwrap();
        assert_eq!(count_nodes(&positive), 0);
        let two = GridFunction::sample(nodes, |r| r.sin()).unwrap();
        assert_eq!(count_nodes(&two), 2);
    }

    #[test]
    fn zero_samples_inherit_previous_sign() {
        let f = GridFunction::new(vec![1.0, 2.0, 3.0, 4.0, 5.0], vec![0.0, 1.0, 0.0, -1.0, 0.0]).unwrap();
        assert_eq!(count_nodes(&f), 1);
        let g = GridFunction::new(vec![1.0, 2.0, 3.0, 4.0], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(count_nodes(&g), 0);
    }

    #[test]
    fn head_interval_uses_local_power() {
        // ∫_0^2 ρ² dρ = 8/3: head [0,1] fitted exactly as ρ², body by trapezoid
        let f = GridFunction::new(vec![1.0, 2.0], vec![1.0, 2.0]).unwrap();
        assert!((f.weighted_integral(|_| 1.0) - (1.0 / 3.0 + 2.5)).abs() < 1e-14);
        // constant integrand: head contributes g·x0
        let g = GridFunction::new(vec![0.5, 1.0], vec![1.0, 1.0]).unwrap();
        assert!((g.weighted_integral(|_| 1.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn normalization() {
        let f = GridFunction::sample(log_grid(1e-3, 10.0, 2000), |r| r * (-r * r / 2.0).exp())
            .unwrap()
            .normalized()
            .unwrap();
        assert!(f.is_normalized(1e-12));
        assert!(GridFunction::new(vec![2.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(GridFunction::new(vec![1.0, 2.0], vec![0.0, 0.0]).unwrap().normalized().is_err());
    }
}
