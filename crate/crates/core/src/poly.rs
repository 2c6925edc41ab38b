//! Dense univariate polynomials, Sturm root counting and companion-matrix
//! root extraction.

use nalgebra::{Complex, DMatrix};
use num_traits::{Signed, Zero};

use crate::scalar::Scalar;

/// Dense polynomial with coefficients stored lowest degree first.
///
/// Trailing zero coefficients are trimmed, so the zero polynomial has an
/// empty coefficient list and no degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    /// `c0 + c1·x`
    pub fn linear(c0: T, c1: T) -> Self {
        Poly::new(vec![c0, c1])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * T::from_i64(k as i64))
                .collect(),
        )
    }

    pub fn scale(&self, factor: &T) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.clone() * factor.clone()).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..len)
                .map(|k| {
                    let lhs = self.coeffs.get(k).cloned().unwrap_or_else(T::zero);
                    let rhs = other.coeffs.get(k).cloned().unwrap_or_else(T::zero);
                    lhs + rhs
                })
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, lhs) in self.coeffs.iter().enumerate() {
            for (j, rhs) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + lhs.clone() * rhs.clone();
            }
        }
        Poly::new(out)
    }

    /// Remainder of polynomial long division. Panics on a zero divisor.
    pub fn rem(&self, divisor: &Self) -> Self {
        let div_deg = divisor.degree().expect("division by zero polynomial");
        let lead = divisor.coeffs[div_deg].clone();
        let mut rem = self.coeffs.clone();
        while rem.len() > div_deg && !rem.is_empty() {
            let top = rem.len() - 1;
            let factor = rem[top].clone() / lead.clone();
            let shift = top - div_deg;
            for (k, d) in divisor.coeffs.iter().enumerate() {
                rem[shift + k] = rem[shift + k].clone() - factor.clone() * d.clone();
            }
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        Poly::new(rem)
    }

    pub fn to_f64(&self) -> Poly<f64> {
        Poly::new(self.coeffs.iter().map(Scalar::to_f64).collect())
    }
}

/// Number of distinct real roots, by Sturm's theorem over the whole line.
///
/// Only meaningful in exact arithmetic; with floating point the remainder
/// chain picks up rounding noise.
pub fn count_distinct_real_roots<T: Scalar>(p: &Poly<T>) -> usize {
    if p.degree().unwrap_or(0) == 0 {
        return 0;
    }
    let mut chain = vec![p.clone(), p.derivative()];
    loop {
        let len = chain.len();
        let next = chain[len - 2].rem(&chain[len - 1]).scale(&-T::one());
        if next.is_zero() {
            break;
        }
        chain.push(next);
    }
    let variations = |signs: Vec<bool>| signs.windows(2).filter(|w| w[0] != w[1]).count();
    let at_pos_inf: Vec<bool> = chain
        .iter()
        .map(|q| q.leading().is_some_and(Signed::is_positive))
        .collect();
    let at_neg_inf: Vec<bool> = chain
        .iter()
        .map(|q| {
            let positive = q.leading().is_some_and(Signed::is_positive);
            if q.degree().unwrap_or(0) % 2 == 0 {
                positive
            } else {
                !positive
            }
        })
        .collect();
    variations(at_neg_inf).saturating_sub(variations(at_pos_inf))
}

/// All complex roots of `p` as eigenvalues of its companion matrix.
///
/// The variable is rescaled first so the companion entries are of
/// comparable magnitude.
pub fn companion_roots(p: &Poly<f64>) -> Vec<Complex<f64>> {
    let Some(deg) = p.degree() else {
        return Vec::new();
    };
    if deg == 0 {
        return Vec::new();
    }
    let lead = p.coeffs()[deg];
    let monic: Vec<f64> = p.coeffs().iter().map(|c| c / lead).collect();
    // Fujiwara-style magnitude bound used as the scale
    let scale = (0..deg)
        .map(|k| monic[k].abs().powf(1.0 / (deg - k) as f64))
        .fold(0.0_f64, f64::max);
    let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
    // q(x) = p(scale·x)/(lead·scale^deg), monic in x
    let scaled: Vec<f64> = (0..deg)
        .map(|k| monic[k] / scale.powi((deg - k) as i32))
        .collect();
    let mut companion = DMatrix::<f64>::zeros(deg, deg);
    for row in 1..deg {
        companion[(row, row - 1)] = 1.0;
    }
    for (row, c) in scaled.iter().enumerate() {
        companion[(row, deg - 1)] = -c;
    }
    companion
        .complex_eigenvalues()
        .iter()
        .map(|z| z * scale)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn trims_trailing_zeros() {
        let p = Poly::new(vec![1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), Some(1));
        assert!(Poly::<f64>::new(vec![0.0]).is_zero());
    }

    #[test]
    fn horner_and_derivative() {
        // 1 - 3x + 2x^2
        let p = Poly::new(vec![1.0, -3.0, 2.0]);
        assert_eq!(p.eval(&2.0), 3.0);
        assert_eq!(p.derivative().coeffs(), &[-3.0, 4.0]);
    }

    #[test]
    fn exact_product_and_remainder() {
        let x_minus_1 = Poly::linear(q(-1, 1), q(1, 1));
        let x_plus_half = Poly::linear(q(1, 2), q(1, 1));
        let prod = x_minus_1.mul(&x_plus_half);
        assert_eq!(prod.coeffs(), &[q(-1, 2), q(-1, 2), q(1, 1)]);
        assert!(prod.rem(&x_minus_1).is_zero());
        let r = prod.add(&Poly::constant(q(3, 1))).rem(&x_plus_half);
        assert_eq!(r.coeffs(), &[q(3, 1)]);
    }

    #[test]
    fn sturm_counts() {
        // x^2 - 4: two roots
        let p = Poly::new(vec![q(-4, 1), q(0, 1), q(1, 1)]);
        assert_eq!(count_distinct_real_roots(&p), 2);
        // x^2 + 1: none
        let p = Poly::new(vec![q(1, 1), q(0, 1), q(1, 1)]);
        assert_eq!(count_distinct_real_roots(&p), 0);
        // (x-1)^2 (x+2): two distinct
        let p = Poly::linear(q(-1, 1), q(1, 1))
            .mul(&Poly::linear(q(-1, 1), q(1, 1)))
            .mul(&Poly::linear(q(2, 1), q(1, 1)));
        assert_eq!(count_distinct_real_roots(&p), 2);
        // x^3 - x: three
        let p = Poly::new(vec![q(0, 1), q(-1, 1), q(0, 1), q(1, 1)]);
        assert_eq!(count_distinct_real_roots(&p), 3);
    }

    #[test]
    fn companion_recovers_known_roots() {
        // (x-2)(x+2)(x-1e3)
        let p = Poly::new(vec![4000.0, -4.0, -1000.0, 1.0]);
        let mut roots: Vec<f64> = companion_roots(&p).iter().map(|z| z.re).collect();
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((roots[0] + 2.0).abs() < 1e-9);
        assert!((roots[1] - 2.0).abs() < 1e-9);
        assert!((roots[2] - 1000.0).abs() < 1e-7);
    }

    #[test]
    fn companion_reports_complex_pairs() {
        let p = Poly::new(vec![1.0, 0.0, 1.0]);
        let roots = companion_roots(&p);
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|z| (z.im.abs() - 1.0).abs() < 1e-12));
    }
}
