//! Dense univariate polynomials and Newton interpolation.

use std::ops::{Add, Mul, Sub};

use crate::scalar::Scalar;

/// Polynomial with coefficients in ascending order of power.
///
/// Trailing zero coefficients are trimmed, so the zero polynomial has no
/// coefficients and [`Polynomial::degree`] returns `None` for it.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn new(coeffs: Vec<S>) -> Self {
        let mut poly = Polynomial { coeffs };
        poly.trim();
        poly
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: S) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c * x^power`.
    pub fn monomial(c: S, power: usize) -> Self {
        let mut coeffs = vec![S::zero(); power + 1];
        coeffs[power] = c;
        Self::new(coeffs)
    }

    /// The falling factorial `(x - shift)(x - shift - 1)...(x - shift - len + 1)`.
    pub fn falling_factorial(shift: u64, len: usize) -> Self {
        (0..len as u64).fold(Self::constant(S::one()), |acc, i| {
            acc * Self::new(vec![-S::from_u64(shift + i), S::one()])
        })
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Coefficient of `x^power` (zero beyond the degree).
    pub fn coeff(&self, power: usize) -> S {
        self.coeffs.get(power).cloned().unwrap_or_else(S::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn scale(&self, factor: &S) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * factor.clone()).collect())
    }

    /// Interpolating polynomial through `(x_i, y_i)` using Newton divided
    /// differences. Nodes must be distinct.
    pub fn interpolate(points: &[(S, S)]) -> Self {
        let xs: Vec<S> = points.iter().map(|(x, _)| x.clone()).collect();
        let mut table: Vec<S> = points.iter().map(|(_, y)| y.clone()).collect();
        let len = table.len();
        for level in 1..len {
            for i in (level..len).rev() {
                let num = table[i].clone() - table[i - 1].clone();
                let den = xs[i].clone() - xs[i - level].clone();
                table[i] = num / den;
            }
        }
        // Newton form to monomial form, innermost term first.
        let mut result = Self::zero();
        for i in (0..len).rev() {
            let factor = Self::new(vec![-xs[i].clone(), S::one()]);
            result = result * factor + Self::constant(table[i].clone());
        }
        result
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }
}

impl<S: Scalar> Add for Polynomial<S> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<S: Scalar> Sub for Polynomial<S> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<S: Scalar> Mul for Polynomial<S> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![S::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn falling_factorial_matches_product() {
        let p: Polynomial<Rational> = Polynomial::falling_factorial(0, 3);
        // x^3 - 3x^2 + 2x
        assert_eq!(p.coeffs(), &[q(0), q(2), q(-3), q(1)]);
        assert_eq!(p.eval(&q(5)), q(60));
        assert_eq!(p.eval(&q(2)), q(0));
        let shifted: Polynomial<Rational> = Polynomial::falling_factorial(4, 2);
        assert_eq!(shifted.eval(&q(10)), q(6 * 5));
    }

    #[test]
    fn zero_polynomial_has_no_degree() {
        let p = Polynomial::new(vec![q(0), q(0)]);
        assert!(p.is_zero());
        assert_eq!(p.degree(), None);
        assert_eq!(p.eval(&q(7)), q(0));
    }

    #[test]
    fn interpolation_in_floats() {
        let pts: Vec<(f64, f64)> = (0..4).map(|x| (x as f64, (x * x) as f64 + 1.0)).collect();
        let p = Polynomial::interpolate(&pts);
        assert!((p.coeff(2) - 1.0).abs() < 1e-12);
        assert!((p.coeff(0) - 1.0).abs() < 1e-12);
        assert!(p.coeff(3).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn interpolation_recovers_integer_polynomials(
            coeffs in prop::collection::vec(-50i64..50, 1..7),
            start in -5i64..5,
        ) {
            let p = Polynomial::new(coeffs.iter().map(|&c| q(c)).collect());
            let pts: Vec<_> = (0..coeffs.len() as i64)
                .map(|i| (q(start + i), p.eval(&q(start + i))))
                .collect();
            prop_assert_eq!(Polynomial::interpolate(&pts), p);
        }
    }
}
