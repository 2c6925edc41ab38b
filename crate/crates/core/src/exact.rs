//! Exactly solvable case `a = b = 0`: two-term recurrence in powers of ρ².

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::{exponent, PolynomialSolution};
use crate::scalar::Scalar;

/// Bound state `ν` of the pure oscillator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactState<T = f64> {
    pub nu: usize,
    pub gamma: T,
    pub w: T,
    /// Series in powers of ρ² (`step = 2`), `c_0 = 1`.
    pub solution: PolynomialSolution<T>,
}

fn check_index(nu: i64) -> Result<usize> {
    usize::try_from(nu).map_err(|_| Error::argument(format!("radial index must be >= 0, got {nu}")))
}

/// `W_{ν,γ} = 2(2ν + |γ| + 1)`.
pub fn exact_eigenvalue<T: Scalar>(nu: i64, gamma: &T) -> Result<T> {
    let nu = check_index(nu)?;
    Ok(T::from_i64(2) * (T::from_i64(2 * nu as i64) + gamma.abs() + T::one()))
}

/// Eigenfunction coefficients for state `nu`, from
/// `c_{j+1} = 2(j − ν) / [(j+1)(2j+2s+1)] · c_j`.
pub fn exact_state<T: Scalar>(nu: i64, gamma: &T) -> Result<ExactState<T>> {
    let w = exact_eigenvalue(nu, gamma)?;
    let nu = nu as usize;
    let s = exponent(gamma);
    let two = T::from_i64(2);
    let mut coeffs = Vec::with_capacity(nu + 1);
    coeffs.push(T::one());
    for j in 0..nu {
        let jj = T::from_i64(j as i64);
        let num = two.clone() * (jj.clone() - T::from_i64(nu as i64));
        let den = (jj.clone() + T::one()) * (two.clone() * jj + two.clone() * s.clone() + T::one());
        let next = coeffs[j].clone() * num / den;
        coeffs.push(next);
    }
    Ok(ExactState {
        nu,
        gamma: gamma.clone(),
        w: w.clone(),
        solution: PolynomialSolution { s, b_half: T::zero(), coeffs, w, step: 2 },
    })
}

/// First `count` coefficients of the power series for an arbitrary `W`,
/// `c_{j+1} = (4j + 2s − W + 1) / [2(j+1)(2j+2s+1)] · c_j`.
///
/// Off the spectrum the series never terminates and the resulting
/// function is not square integrable.
pub fn general_series_coefficients<T: Scalar>(w: &T, gamma: &T, count: usize) -> Vec<T> {
    let s = exponent(gamma);
    let two = T::from_i64(2);
    let mut coeffs: Vec<T> = Vec::with_capacity(count);
    if count == 0 {
        return coeffs;
    }
    coeffs.push(T::one());
    for j in 0..count - 1 {
        let jj = T::from_i64(j as i64);
        let num = T::from_i64(4) * jj.clone() + two.clone() * s.clone() - w.clone() + T::one();
        let den = two.clone()
            * (jj.clone() + T::one())
            * (two.clone() * jj + two.clone() * s.clone() + T::one());
        let next = coeffs[j].clone() * num / den;
        coeffs.push(next);
    }
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{default_residual_grid, ode_residual, RadialProblem};
    use crate::scalar::Rational;
    use num_traits::Zero;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(exact_eigenvalue(0, &0.5).unwrap(), 3.0);
        assert_eq!(exact_eigenvalue(0, &0.0).unwrap(), 2.0);
        assert_eq!(exact_eigenvalue(2, &1.0).unwrap(), 12.0);
        assert_eq!(exact_eigenvalue(1, &-0.5).unwrap(), 7.0);
        assert!(matches!(exact_eigenvalue(-1, &0.5), Err(Error::Argument(_))));
        assert!(exact_state(-3, &0.5).is_err());
    }

    #[test]
    fn state_coefficients() {
        assert_eq!(exact_state(0, &q(1, 2)).unwrap().solution.coeffs, vec![q(1, 1)]);
        assert_eq!(exact_state(1, &q(1, 2)).unwrap().solution.coeffs, vec![q(1, 1), q(-2, 3)]);
        assert_eq!(exact_state(1, &q(0, 1)).unwrap().solution.coeffs, vec![q(1, 1), q(-1, 1)]);
    }

    #[test]
    fn general_series_examples() {
        let c = general_series_coefficients(&q(0, 1), &q(1, 2), 3);
        assert_eq!(c, vec![q(1, 1), q(1, 2), q(7, 40)]);
        let w0 = exact_eigenvalue(0, &q(1, 3)).unwrap();
        assert!(general_series_coefficients(&w0, &q(1, 3), 2)[1].is_zero());
        let c = general_series_coefficients(&q(6, 1), &q(0, 1), 3);
        assert_eq!(c, vec![q(1, 1), q(-1, 1), q(0, 1)]);
        assert!(general_series_coefficients(&1.0, &0.0, 0).is_empty());
    }

    #[test]
    fn terminating_series_matches_state() {
        for nu in 0..6 {
            let g = q(5, 2);
            let w = exact_eigenvalue(nu, &g).unwrap();
            let series = general_series_coefficients(&w, &g, nu as usize + 3);
            let state = exact_state(nu, &g).unwrap();
            assert_eq!(&series[..=nu as usize], &state.solution.coeffs[..]);
            assert!(series[nu as usize + 1].is_zero());
            assert!(series[nu as usize + 2].is_zero());
        }
    }

    #[test]
    fn states_solve_the_equation() {
        let grid = default_residual_grid();
        for &g in &[0.0, 1.0 / 3.0, 0.5, 1.0, 2.5] {
            for nu in 0..=6 {
                let st = exact_state(nu, &g).unwrap();
                let r = ode_residual(&st.solution, &RadialProblem::oscillator(g), &grid).unwrap();
                assert!(r <= 1e-10, "γ={g} ν={nu} residual {r}");
            }
        }
    }
}
