//! Conditionally solvable case: three-term recurrence, termination energy,
//! the second condition `c_{n+1}(a, b) = 0` and the resulting polynomial
//! solutions.
//!
//! Roots of the second condition are indexed by descending `a`; root `i`
//! (1-based) gives the state with `i − 1` nodes; the tests check this
//! against an independent node count.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::radial::{exponent, PolynomialSolution};
use crate::scalar::{Rational, Scalar};
use crate::tridiag::SymTridiagonal;

/// Relative distance Newton polishing may move an eigenvalue.
pub const POLISH_WINDOW: f64 = 1e-6;
/// Roots closer than this are reported as a multiplicity.
pub const ROOT_SEPARATION: f64 = 1e-8;
/// Relative size of `c_{n+1}`, `c_{n+2}` accepted as zero when a family is assembled.
pub const TRUNCATION_TOL: f64 = 1e-9;

/// `A_j`, `B_j` of `c_{j+2} = A_j c_{j+1} + B_j c_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceCoeffs<T> {
    pub a_j: T,
    pub b_j: T,
}

fn denominator<T: Scalar>(j: i64, s: &T) -> T {
    T::from_i64(j + 2) * (T::from_i64(j + 1) + T::from_i64(2) * s.clone())
}

/// ```text
/// A_j = [a + b(j+s+1)] / [(j+2)(j+2s+1)]
/// B_j = [4(2j+2s−W+1) − b²] / [4(j+2)(j+2s+1)]
/// ```
/// Valid for `j ≥ −1`, where the denominator is positive for `s ≥ 1/2`.
pub fn recurrence_step<T: Scalar>(j: i64, s: &T, a: &T, b: &T, w: &T) -> RecurrenceCoeffs<T> {
    let den = denominator(j, s);
    let four = T::from_i64(4);
    let a_j = (a.clone() + b.clone() * (T::from_i64(j + 1) + s.clone())) / den.clone();
    let b_j = (four.clone() * (T::from_i64(2 * j + 1) + T::from_i64(2) * s.clone() - w.clone())
        - b.clone() * b.clone())
        / (four * den);
    RecurrenceCoeffs { a_j, b_j }
}

/// Energy that makes `B_n` vanish: `W^(n) = 2(n + |γ| + 1) − b²/4`.
pub fn termination_energy<T: Scalar>(n: i64, gamma: &T, b: &T) -> Result<T> {
    if n < 0 {
        return Err(Error::argument(format!("polynomial degree must be >= 0, got {n}")));
    }
    Ok(T::from_i64(2) * (T::from_i64(n + 1) + gamma.abs())
        - b.clone() * b.clone() / T::from_i64(4))
}

/// `B_j` at `W = W^(n)`: `2(j − n) / [(j+2)(j+2s+1)]`, independent of `a`.
pub fn simplified_b<T: Scalar>(j: i64, n: i64, s: &T) -> T {
    T::from_i64(2 * (j - n)) / denominator(j, s)
}

/// Runs the recurrence at fixed numeric `a` and returns `c_0 ..= c_last`.
pub fn series_coefficients<T: Scalar>(last: usize, s: &T, a: &T, b: &T, w: &T) -> Vec<T> {
    let mut c = Vec::with_capacity(last + 1);
    let (mut prev, mut cur) = (T::zero(), T::one());
    c.push(cur.clone());
    for j in -1..(last as i64 - 1) {
        let r = recurrence_step(j, s, a, b, w);
        let next = r.a_j * cur.clone() + r.b_j * prev;
        prev = cur;
        cur = next;
        c.push(cur.clone());
    }
    c
}

/// `c_{n+1}` at `W = W^(n)` as a polynomial in `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientPolynomial<T> {
    pub n: usize,
    pub gamma: T,
    pub b: T,
    pub poly: Poly<T>,
}

/// Builds `c_{n+1}(a)` by running the recurrence with symbolic `a`.
///
/// With exact scalars the coefficients are exact; the degree is `n + 1` and
/// the leading coefficient is `∏ 1/[(j+2)(j+2s+1)] > 0`.
pub fn coefficient_polynomial<T: Scalar>(n: usize, gamma: &T, b: &T) -> CoefficientPolynomial<T> {
    let s = exponent(gamma);
    let w = termination_energy(n as i64, gamma, b).expect("n is non-negative");
    let mut prev = Poly::<T>::zero();
    let mut cur = Poly::constant(T::one());
    for j in -1..(n as i64) {
        let den = denominator(j, &s);
        let a_j = Poly::linear(
            b.clone() * (T::from_i64(j + 1) + s.clone()) / den.clone(),
            T::one() / den,
        );
        let b_j = recurrence_step(j, &s, &T::zero(), b, &w).b_j;
        let next = a_j.mul(&cur).add(&prev.scale(&b_j));
        prev = cur;
        cur = next;
    }
    CoefficientPolynomial { n, gamma: gamma.clone(), b: b.clone(), poly: cur }
}

/// `c_{n+1}(a)` and `dc_{n+1}/da` in floating point, straight from the
/// recurrence (better conditioned than the expanded polynomial).
fn truncation_value(n: usize, s: f64, a: f64, b: f64, w: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (0.0, 1.0);
    let (mut dprev, mut dcur) = (0.0, 0.0);
    for j in -1..(n as i64) {
        let r = recurrence_step(j, &s, &a, &b, &w);
        let da = 1.0 / denominator(j, &s);
        let next = r.a_j * cur + r.b_j * prev;
        let dnext = da * cur + r.a_j * dcur + r.b_j * dprev;
        prev = cur;
        cur = next;
        dprev = dcur;
        dcur = dnext;
    }
    (cur, dcur)
}

/// Two roots closer than [`ROOT_SEPARATION`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootWarning {
    /// 1-based indices into the descending root list.
    pub indices: (usize, usize),
    pub separation: f64,
}

/// Real roots `a^(n,i)(b)` of the second condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleRoots {
    /// Descending.
    pub roots: Vec<f64>,
    /// Distinct real roots certified in exact arithmetic.
    pub certified_real_count: usize,
    pub warnings: Vec<RootWarning>,
}

fn exact(v: f64, name: &str) -> Result<Rational> {
    Rational::from_f64_exact(v).ok_or_else(|| Error::argument(format!("{name} must be finite")))
}

/// At `W = W^(n)` the recurrence rows `k = 0..=n` read
///
/// ```text
/// a c_k = (k+1)(k+2s) c_{k+1} − b(k+s) c_k + 2(n−k+1) c_{k−1},   c_{n+1} = 0,
/// ```
///
/// so the admissible `a` are the eigenvalues of a tridiagonal matrix whose
/// off-diagonal products `2(k+1)(k+2s)(n−k)` are positive. It is similar to
/// the symmetric matrix returned here, hence `n + 1` simple real roots.
fn jacobi_matrix(n: usize, s: f64, b: f64) -> SymTridiagonal {
    let diag = (0..=n).map(|k| -b * (k as f64 + s)).collect();
    let off = (0..n)
        .map(|k| {
            let k = k as f64;
            (2.0 * (k + 1.0) * (k + 2.0 * s) * (n as f64 - k)).sqrt()
        })
        .collect();
    SymTridiagonal::new(diag, off)
}

/// Number of distinct real roots guaranteed by the Jacobi structure, checked
/// in exact arithmetic: every off-diagonal product must be positive.
fn certify_jacobi(n: usize, s: &Rational) -> usize {
    let positive = (0..n as i64).all(|k| {
        let product = Rational::from_i64(2 * (k + 1) * (n as i64 - k))
            * (Rational::from_i64(k) + Rational::from_i64(2) * s.clone());
        product > Rational::from_i64(0)
    });
    if positive {
        n + 1
    } else {
        0
    }
}

/// The `n + 1` real values of `a` for which a degree-`n` polynomial solution
/// exists at the given `b`, sorted descending.
pub fn admissible_a(n: i64, gamma: f64, b: f64) -> Result<AdmissibleRoots> {
    if n < 0 {
        return Err(Error::argument(format!("polynomial degree must be >= 0, got {n}")));
    }
    let n = n as usize;
    let certified_real_count = certify_jacobi(n, &exponent(&exact(gamma, "gamma")?));
    exact(b, "b")?;

    let s = exponent(&gamma);
    let w = termination_energy(n as i64, &gamma, &b)?;
    let eigenvalues = jacobi_matrix(n, s, b).lowest_eigenvalues(n + 1);
    if eigenvalues.len() != n + 1 || eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::consistency(format!(
            "expected {} finite roots of c_{}(a), eigensolver gave {:?}",
            n + 1,
            n + 1,
            eigenvalues
        )));
    }
    let mut roots: Vec<f64> = eigenvalues.iter().map(|&x| polish(n, s, b, w, x)).collect();
    roots.sort_by(|x, y| y.total_cmp(x));

    let warnings: Vec<RootWarning> = roots
        .windows(2)
        .enumerate()
        .filter(|(_, pair)| (pair[0] - pair[1]).abs() <= ROOT_SEPARATION)
        .map(|(k, pair)| RootWarning { indices: (k + 1, k + 2), separation: pair[0] - pair[1] })
        .collect();
    if certified_real_count != n + 1 {
        return Err(Error::consistency(format!(
            "exact check certifies {certified_real_count} distinct real roots, expected {}",
            n + 1
        )));
    }
    Ok(AdmissibleRoots { roots, certified_real_count, warnings })
}

/// Newton iterations on the recurrence value, confined to a small window
/// around the eigenvalue so a neighbouring root is never picked up.
fn polish(n: usize, s: f64, b: f64, w: f64, start: f64) -> f64 {
    let window = POLISH_WINDOW * (1.0 + start.abs());
    let mut best = start;
    let mut best_val = truncation_value(n, s, start, b, w).0.abs();
    let mut x = start;
    for _ in 0..12 {
        let (f, df) = truncation_value(n, s, x, b, w);
        if df == 0.0 || !df.is_finite() {
            break;
        }
        let step = f / df;
        x -= step;
        if (x - start).abs() > window {
            break;
        }
        let val = truncation_value(n, s, x, b, w).0.abs();
        if val < best_val {
            best = x;
            best_val = val;
        }
        if step.abs() <= 2.0 * f64::EPSILON * x.abs().max(1.0) {
            break;
        }
    }
    best
}

/// All degree-`n` polynomial solutions available at `(γ, b)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalFamily {
    pub n: usize,
    pub gamma: f64,
    pub b: f64,
    pub w: f64,
    /// `a^(n,1) > … > a^(n,n+1)`.
    pub roots: Vec<f64>,
    /// One solution per root, same order.
    pub solutions: Vec<PolynomialSolution<f64>>,
    pub certified_real_count: usize,
    pub warnings: Vec<RootWarning>,
}

impl ConditionalFamily {
    pub fn members(&self) -> impl Iterator<Item = (f64, &PolynomialSolution<f64>)> {
        self.roots.iter().copied().zip(&self.solutions)
    }
}

pub fn conditional_family(n: i64, gamma: f64, b: f64) -> Result<ConditionalFamily> {
    let found = admissible_a(n, gamma, b)?;
    let n = n as usize;
    let s = exponent(&gamma);
    let w = termination_energy(n as i64, &gamma, &b)?;
    let mut solutions = Vec::with_capacity(found.roots.len());
    for &a in &found.roots {
        let mut coeffs = series_coefficients(n + 2, &s, &a, &b, &w);
        let scale = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        let tail = coeffs[n + 1].abs().max(coeffs[n + 2].abs());
        if tail > TRUNCATION_TOL * scale {
            return Err(Error::consistency(format!(
                "series does not truncate at degree {n} for a={a}: |c_(n+1)|, |c_(n+2)| = {tail:e}"
            )));
        }
        coeffs.truncate(n + 1);
        solutions.push(PolynomialSolution { s, b_half: b / 2.0, coeffs, w, step: 1 });
    }
    Ok(ConditionalFamily {
        n,
        gamma,
        b,
        w,
        roots: found.roots,
        solutions,
        certified_real_count: found.certified_real_count,
        warnings: found.warnings,
    })
}

/// Comparison of the general solver against the closed forms for `n = 0, 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormReport {
    pub gamma: f64,
    pub b: f64,
    pub checks: Vec<ClosedFormCheck>,
    pub all_match: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormCheck {
    pub quantity: String,
    pub closed_form: f64,
    pub computed: f64,
    pub matches: bool,
}

pub const CLOSED_FORM_TOL: f64 = 1e-12;

/// Closed-form values for `n = 0, 1`:
/// `a^(0) = −bs`, `a^(1,1/2) = (±√(b²+16s) − b(2s+1))/2`,
/// `c_1^(1,1/2) = (±√(b²+16s) − b)/(4s)`, and the quadratic
/// `4s(2s+1)c_2 = a² + ab(2s+1) + b²s(s+1) − 4s`.
pub fn closed_form_check_n01(gamma: f64, b: f64) -> Result<ClosedFormReport> {
    let s = exponent(&gamma);
    let root = (b * b + 16.0 * s).sqrt();
    let mut checks = Vec::new();
    let mut push = |quantity: &str, closed_form: f64, computed: f64| {
        let matches = (closed_form - computed).abs() <= CLOSED_FORM_TOL * closed_form.abs().max(1.0);
        checks.push(ClosedFormCheck { quantity: quantity.to_string(), closed_form, computed, matches });
    };

    let fam0 = conditional_family(0, gamma, b)?;
    push("a(0)", -b * s, fam0.roots[0]);
    push("c0(0)", 1.0, fam0.solutions[0].coeffs[0]);
    push("len(0)", 1.0, fam0.solutions[0].coeffs.len() as f64);

    let gq = exact(gamma, "gamma")?;
    let bq = exact(b, "b")?;
    let sq = exponent(&gq);
    let norm = Rational::from_i64(4) * sq.clone() * (Rational::from_i64(2) * sq + Rational::from_i64(1));
    let quad = coefficient_polynomial(1, &gq, &bq).poly.scale(&norm).to_f64();
    let expected = [b * b * s * (s + 1.0) - 4.0 * s, b * (2.0 * s + 1.0), 1.0];
    for (k, e) in expected.iter().enumerate() {
        push(&format!("quadratic[{k}]"), *e, quad.coeffs().get(k).copied().unwrap_or(0.0));
    }

    let fam1 = conditional_family(1, gamma, b)?;
    push("a(1,1)", (root - b * (2.0 * s + 1.0)) / 2.0, fam1.roots[0]);
    push("a(1,2)", -(root + b * (2.0 * s + 1.0)) / 2.0, fam1.roots[1]);
    push("c1(1,1)", (root - b) / (4.0 * s), fam1.solutions[0].coeffs[1]);
    push("c1(1,2)", -(root + b) / (4.0 * s), fam1.solutions[1].coeffs[1]);

    let all_match = checks.iter().all(|c| c.matches);
    Ok(ClosedFormReport { gamma, b, checks, all_match })
}
