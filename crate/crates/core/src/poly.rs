//! Dense univariate polynomials with arbitrary-precision integer coefficients.
//!
//! Every polynomial met here is dense in every other coefficient, so a plain
//! coefficient vector is used. Multiplication is schoolbook `O(d^2)`: degrees
//! stay below a few hundred, where GMP's integer products dominate and a
//! sub-quadratic scheme would not pay for itself.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::float::Round;
use rug::{Float, Integer, Rational};

use crate::real::check_precision;
use crate::Result;

/// `coeffs[k]` is the coefficient of `X^k`; the highest stored coefficient is
/// nonzero, and the zero polynomial has no coefficients at all.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<Integer>,
}

impl IntPolynomial {
    pub fn new(coeffs: Vec<Integer>) -> Self {
        let mut p = IntPolynomial { coeffs };
        p.normalize();
        p
    }

    pub fn from_coeffs(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Integer::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Integer::from(1))
    }

    /// The indeterminate `X`.
    pub fn x() -> Self {
        Self::monomial(Integer::from(1), 1)
    }

    pub fn constant(c: Integer) -> Self {
        Self::new(vec![c])
    }

    /// `c * X^k`.
    pub fn monomial(c: Integer, k: usize) -> Self {
        let mut coeffs = vec![Integer::new(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| *c == 0) {
            self.coeffs.pop();
        }
    }

    /// Degree, with `-1` for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    /// Coefficient of `X^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> Integer {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<&Integer> {
        self.coeffs.last()
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| Integer::from(c * k as u64))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Integer) -> Self {
        Self::new(self.coeffs.iter().map(|a| Integer::from(a * c)).collect())
    }

    /// `X * self`.
    pub fn mul_x(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Integer::new());
        coeffs.extend(self.coeffs.iter().cloned());
        IntPolynomial { coeffs }
    }

    /// True when every nonzero coefficient sits at an exponent congruent to
    /// `parity` mod 2.
    pub fn has_parity(&self, parity: usize) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(k, c)| *c == 0 || k % 2 == parity % 2)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| *c >= 0)
    }

    pub fn eval_integer(&self, x: &Integer) -> Integer {
        let mut acc = Integer::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// Exact Horner evaluation.
    pub fn eval_rational(&self, x: &Rational) -> Rational {
        // Horner over the common denominator: sum c_k p^k q^(d-k), then divide by q^d.
        let (num, den) = (x.numer(), x.denom());
        let mut acc = Integer::new();
        let mut den_pow = Integer::from(1);
        for c in self.coeffs.iter().rev() {
            acc *= num;
            acc += Integer::from(c * &den_pow);
            den_pow *= den;
        }
        if self.coeffs.is_empty() {
            return Rational::new();
        }
        // den_pow is now q^(d+1); one factor too many.
        den_pow /= den;
        Rational::from((acc, den_pow))
    }

    /// Horner evaluation with every operation rounded to `precision_bits`.
    pub fn eval_real(&self, x: &Float, precision_bits: u32) -> Result<Float> {
        Ok(self.eval_real_with_bound(x, precision_bits)?.0)
    }

    /// Horner evaluation returning `(value, bound)` where `bound` dominates
    /// the rounding error: `gamma_{2d+2} * sum |c_k| |x|^k` with
    /// `gamma_k = k u / (1 - k u)` and `u = 2^-precision_bits`. The extra
    /// two steps account for coefficients that do not fit the precision.
    pub fn eval_real_with_bound(&self, x: &Float, precision_bits: u32) -> Result<(Float, Float)> {
        check_precision(precision_bits)?;
        let prec = precision_bits;
        let mut acc = Float::new(prec);
        let mut abs_acc = Float::new(prec);
        let abs_x = Float::with_val_round(prec, x.abs_ref(), Round::Up).0;
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
            abs_acc = mul_add_up(&abs_acc, &abs_x, c);
        }
        let steps = 2 * self.coeffs.len() as u32 + 2;
        let mut gamma = Float::with_val(64, steps);
        gamma >>= prec as i32;
        let denom = Float::with_val_round(64, 1 - Float::with_val(64, &gamma), Round::Down).0;
        gamma = Float::with_val_round(64, &gamma / &denom, Round::Up).0;
        let bound = Float::with_val_round(64, &gamma * &abs_acc, Round::Up).0;
        Ok((acc, bound))
    }
}

/// `acc * |x| + |c|`, rounded upward at both steps.
fn mul_add_up(acc: &Float, abs_x: &Float, c: &Integer) -> Float {
    let prec = acc.prec();
    let product = Float::with_val_round(prec, acc * abs_x, Round::Up).0;
    Float::with_val_round(prec, product + &*c.as_abs(), Round::Up).0
}

fn zip_with(a: &IntPolynomial, b: &IntPolynomial, f: impl Fn(&mut Integer, &Integer)) -> IntPolynomial {
    let mut coeffs = a.coeffs.clone();
    if coeffs.len() < b.coeffs.len() {
        coeffs.resize(b.coeffs.len(), Integer::new());
    }
    for (slot, c) in coeffs.iter_mut().zip(&b.coeffs) {
        f(slot, c);
    }
    IntPolynomial::new(coeffs)
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        zip_with(self, rhs, |a, b| *a += b)
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        zip_with(self, rhs, |a, b| *a -= b)
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut coeffs = vec![Integer::new(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        IntPolynomial::new(coeffs)
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        IntPolynomial {
            coeffs: self.coeffs.iter().map(|c| Integer::from(-c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for IntPolynomial {
            type Output = IntPolynomial;
            fn $method(self, rhs: IntPolynomial) -> IntPolynomial {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&IntPolynomial> for IntPolynomial {
            type Output = IntPolynomial;
            fn $method(self, rhs: &IntPolynomial) -> IntPolynomial {
                (&self).$method(rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        -&self
    }
}

/// Descending powers, e.g. `x^5 + 10*x^3 + 15*x`, `x^2 - 1`, `-x`, `0`.
impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let negative = *c < 0;
            match (first, negative) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            let magnitude = Integer::from(c.abs_ref());
            let monomial = match k {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{k}"),
            };
            if k == 0 {
                write!(f, "{magnitude}")?;
            } else if magnitude == 1 {
                f.write_str(&monomial)?;
            } else {
                write!(f, "{magnitude}*{monomial}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::real;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_coeffs(c)
    }

    #[test]
    fn addition() {
        assert_eq!(&p(&[1, 0, 1]) + &p(&[0, 3, 0, 1]), p(&[1, 3, 1, 1]));
        let q = p(&[4, 0, -2, 7]);
        assert_eq!(&q + &IntPolynomial::zero(), q);
        let cancelled = &p(&[0, 1]) + &p(&[0, -1]);
        assert!(cancelled.is_zero());
        assert_eq!(cancelled.degree(), -1);
        assert!(cancelled.coeffs().is_empty());
    }

    #[test]
    fn multiplication() {
        // (X^2+1)(X^4+6X^2+3) = X^6+7X^4+9X^2+3
        assert_eq!(&p(&[1, 0, 1]) * &p(&[3, 0, 6, 0, 1]), p(&[3, 0, 9, 0, 7, 0, 1]));
        let q = p(&[5, -1, 2]);
        assert_eq!(&q * &IntPolynomial::one(), q);
        assert!((&q * &IntPolynomial::zero()).is_zero());
        assert_eq!((&q * &q).degree(), 4);
    }

    #[test]
    fn derivatives() {
        assert_eq!(p(&[0, 3, 0, 1]).derivative(), p(&[3, 0, 3]));
        assert!(p(&[7]).derivative().is_zero());
        assert_eq!(p(&[3, 0, 6, 0, 1]).derivative(), p(&[0, 12, 0, 4]));
    }

    #[test]
    fn rational_evaluation() {
        let half = Rational::from((1, 2));
        assert_eq!(p(&[1, 0, 1]).eval_rational(&half), Rational::from((5, 4)));
        assert_eq!(p(&[-7, 4, 2]).eval_rational(&Rational::new()), Rational::from(-7));
        assert_eq!(
            p(&[-9, 0, 9, 0, 3, 0, 1]).eval_rational(&Rational::from(1)),
            Rational::from(4)
        );
        assert_eq!(IntPolynomial::zero().eval_rational(&half), Rational::new());
        // 2x^3 - 4x at -3/2: -27/4 + 6 = -3/4
        assert_eq!(
            p(&[0, -4, 0, 2]).eval_rational(&Rational::from((-3, 2))),
            Rational::from((-3, 4))
        );
    }

    #[test]
    fn real_evaluation() {
        assert_eq!(p(&[1, 0, 1]).eval_real(&real(128, 1.0), 128).unwrap(), 2.0);
        assert_eq!(p(&[3, 0, 0, 0, 1]).eval_real(&real(128, 0.0), 128).unwrap(), 3.0);
        assert_eq!(p(&[0, 3, 0, 1]).eval_real(&real(128, 2.0), 128).unwrap(), 14.0);
        assert!(p(&[1]).eval_real(&real(128, 1.0), 32).is_err());
    }

    #[test]
    fn horner_bound_dominates_error() {
        let poly = p(&[-9, 0, 9, 0, 3, 0, 1]);
        let x = Float::with_val(64, Rational::from((8713, 10000)));
        let (value, bound) = poly.eval_real_with_bound(&x, 64).unwrap();
        let exact = poly.eval_rational(&x.to_rational().unwrap());
        let err = Float::with_val(256, &exact - value.to_rational().unwrap()).abs();
        assert!(err <= bound, "{err} > {bound}");
        assert!(bound > 0);
    }

    #[test]
    fn rendering() {
        assert_eq!(p(&[0, 15, 0, 10, 0, 1]).to_string(), "x^5 + 10*x^3 + 15*x");
        assert_eq!(p(&[8, 0, 9, 0, 1]).to_string(), "x^4 + 9*x^2 + 8");
        assert_eq!(p(&[-1, 0, 1]).to_string(), "x^2 - 1");
        assert_eq!(p(&[0, -1]).to_string(), "-x");
        assert_eq!(p(&[48, 0, 4]).to_string(), "4*x^2 + 48");
        assert_eq!(p(&[0, -4, 0, 2]).to_string(), "2*x^3 - 4*x");
        assert_eq!(p(&[-1]).to_string(), "-1");
        assert_eq!(IntPolynomial::zero().to_string(), "0");
    }

    #[test]
    fn parity_and_sign_helpers() {
        assert!(p(&[0, 15, 0, 10, 0, 1]).has_parity(1));
        assert!(!p(&[1, 1]).has_parity(0));
        assert!(IntPolynomial::zero().has_parity(0));
        assert!(p(&[3, 0, 6]).is_nonnegative());
        assert!(!p(&[-1, 0, 1]).is_nonnegative());
        assert_eq!(p(&[1, 2]).mul_x(), p(&[0, 1, 2]));
        assert_eq!(p(&[0, 1, 0, 1]).coeff(10), 0);
        assert_eq!(p(&[1, 0, 1]).eval_integer(&Integer::from(3)), 10);
    }
}
