//! The polynomial families attached to the Mills ratio.
//!
//! For every `n >= 0` there are unique integer polynomials `P_n`, `Q_n` with
//!
//! ```text
//! phi^(n)(x) = P_n(x) phi(x) - Q_n(x)
//! ```
//!
//! Starting from `(P_0, Q_0) = (1, 0)` and `(P_1, Q_1) = (X, 1)` both satisfy
//! `U_{n+1} = X U_n + n U_{n-1}`. `P_n` has the parity of `n` and the closed
//! form `sum_k n! / (2^k k! (n-2k)!) X^(n-2k)`.
//!
//! `P_n` is a rescaled Hermite polynomial. The commonly quoted relation
//! `P_n(X) = (-i/sqrt 2) H_n(i X / sqrt 2)` is missing the exponent on the
//! prefactor; with `(-i/sqrt 2)^n` the degrees and leading coefficients
//! match. Nothing here depends on that relation: the closed form above pins
//! every coefficient and is checked by [`MillsPolys::verify_identities`].
//!
//! The quadratic-form coefficients
//!
//! ```text
//! A_n = P_n P_{n+2} - P_{n+1}^2
//! B_n = P_n Q_{n+2} + P_{n+2} Q_n - 2 P_{n+1} Q_{n+1}
//! C_n = Q_n Q_{n+2} - Q_{n+1}^2
//! ```
//!
//! satisfy `A_n phi^2 - B_n phi + C_n > 0` and have the discriminant
//! `B_n^2 - 4 A_n C_n = (n!)^2 (X^2 + 4n + 4)`.

use std::sync::{Arc, OnceLock, RwLock};

use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::error::{MillsError, Result};
use crate::poly::IntPolynomial;
use crate::real::check_precision;

/// `P_n` and `Q_n` for one order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PQPair {
    pub n: usize,
    pub p: IntPolynomial,
    pub q: IntPolynomial,
}

/// `A_n`, `B_n`, `C_n` for one order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticTriple {
    pub n: usize,
    pub a: IntPolynomial,
    pub b: IntPolynomial,
    pub c: IntPolynomial,
}

fn grow_only<T: Clone>(cache: &RwLock<Vec<T>>, n: usize, mut extend: impl FnMut(&mut Vec<T>)) -> T {
    if let Some(v) = cache.read().expect("cache lock").get(n) {
        return v.clone();
    }
    let mut table = cache.write().expect("cache lock");
    while table.len() <= n {
        extend(&mut table);
    }
    table[n].clone()
}

/// `n!`, cached.
pub fn factorial(n: usize) -> Integer {
    static CACHE: OnceLock<RwLock<Vec<Integer>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(vec![Integer::from(1)]));
    grow_only(cache, n, |t| {
        let k = t.len();
        let next = Integer::from(&t[k - 1] * k as u64);
        t.push(next);
    })
}

/// `1 * 3 * 5 * ... * (2n - 1)`, cached (1 for `n = 0`).
pub fn odd_double_factorial(n: usize) -> Integer {
    static CACHE: OnceLock<RwLock<Vec<Integer>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(vec![Integer::from(1)]));
    grow_only(cache, n, |t| {
        let k = t.len();
        let next = Integer::from(&t[k - 1] * (2 * k as u64 - 1));
        t.push(next);
    })
}

pub fn binomial(n: usize, k: usize) -> Integer {
    if k > n {
        return Integer::new();
    }
    Integer::from(Integer::binomial_u(n as u32, k as u32))
}

/// Grow-only memo of `(P_n, Q_n)`; concurrent readers, serialized extension.
#[derive(Debug)]
pub struct MillsPolys {
    table: RwLock<Vec<Arc<PQPair>>>,
    corruption: Option<usize>,
}

impl Default for MillsPolys {
    fn default() -> Self {
        Self::new()
    }
}

impl MillsPolys {
    pub fn new() -> Self {
        MillsPolys {
            table: RwLock::new(Vec::new()),
            corruption: None,
        }
    }

    /// Shared table used by the free functions of this crate.
    pub fn global() -> &'static MillsPolys {
        static GLOBAL: OnceLock<MillsPolys> = OnceLock::new();
        GLOBAL.get_or_init(MillsPolys::new)
    }

    /// Negative-control table: `P_order` gets an extra `+1` constant term
    /// and every later order is built from the damaged value.
    #[doc(hidden)]
    pub fn corrupted(order: usize) -> Self {
        MillsPolys {
            table: RwLock::new(Vec::new()),
            corruption: Some(order),
        }
    }

    pub fn is_corrupted(&self) -> bool {
        self.corruption.is_some()
    }

    pub fn pq_pair(&self, n: usize) -> Arc<PQPair> {
        grow_only(&self.table, n, |t| {
            let k = t.len();
            let (mut p, q) = match k {
                0 => (IntPolynomial::one(), IntPolynomial::zero()),
                1 => (IntPolynomial::x(), IntPolynomial::one()),
                _ => {
                    let (prev, prev2) = (&t[k - 1], &t[k - 2]);
                    let m = Integer::from(k - 1);
                    (
                        &prev.p.mul_x() + &prev2.p.scale(&m),
                        &prev.q.mul_x() + &prev2.q.scale(&m),
                    )
                }
            };
            if self.corruption == Some(k) {
                p = &p + &IntPolynomial::one();
            }
            t.push(Arc::new(PQPair { n: k, p, q }));
        })
    }

    pub fn p(&self, n: usize) -> IntPolynomial {
        self.pq_pair(n).p.clone()
    }

    pub fn q(&self, n: usize) -> IntPolynomial {
        self.pq_pair(n).q.clone()
    }

    pub fn quadratic_triple(&self, n: usize) -> QuadraticTriple {
        let (u0, u1, u2) = (self.pq_pair(n), self.pq_pair(n + 1), self.pq_pair(n + 2));
        let a = &(&u0.p * &u2.p) - &(&u1.p * &u1.p);
        let cross = &(&u0.p * &u2.q) + &(&u2.p * &u0.q);
        let b = &cross - &(&u1.p * &u1.q).scale(&Integer::from(2));
        let c = &(&u0.q * &u2.q) - &(&u1.q * &u1.q);
        QuadraticTriple { n, a, b, c }
    }

    /// `B_n^2 - 4 A_n C_n`, checked against `(n!)^2 (X^2 + 4n + 4)`.
    pub fn discriminant(&self, n: usize) -> Result<IntPolynomial> {
        let t = self.quadratic_triple(n);
        let computed = &(&t.b * &t.b) - &(&t.a * &t.c).scale(&Integer::from(4));
        let expected = discriminant_closed_form(n);
        if computed != expected {
            return Err(MillsError::IdentityViolation {
                identity: "discriminant".into(),
                n,
            });
        }
        Ok(expected)
    }

    /// Check every polynomial identity for `0 <= n <= n_max` exactly.
    pub fn verify_identities(&self, n_max: usize) -> Vec<IdentityCheck> {
        let mut out = Vec::new();
        let mut record = |identity: &'static str, n: usize, ok: bool| {
            out.push(IdentityCheck {
                identity,
                n,
                status: if ok { Status::Pass } else { Status::Fail },
            });
        };
        let x = IntPolynomial::x();
        for n in 0..=n_max {
            let cur = self.pq_pair(n);
            let next = self.pq_pair(n + 1);
            let next2 = self.pq_pair(n + 2);
            let sign_fact = if n % 2 == 0 {
                factorial(n)
            } else {
                -factorial(n)
            };

            record("p_step_derivative", n, next.p == &cur.p.mul_x() + &cur.p.derivative());
            record("q_step_derivative", n, next.q == &cur.p + &cur.q.derivative());
            if n >= 1 {
                let prev = self.pq_pair(n - 1);
                let m = Integer::from(n);
                record("p_three_term", n, next.p == &cur.p.mul_x() + &prev.p.scale(&m));
                record("q_three_term", n, next.q == &cur.q.mul_x() + &prev.q.scale(&m));
                record("p_derivative", n, cur.p.derivative() == prev.p.scale(&m));
                record("q_from_p", n, q_closed_form(n).is_ok_and(|q| q == cur.q));
                record("q_expanded", n, q_expanded_form(n).is_ok_and(|q| q == cur.q));
            }
            record("p_closed_form", n, p_closed_form(n) == cur.p);
            let det1 = &(&next.q * &cur.p) - &(&next.p * &cur.q);
            record("determinant_1", n, det1 == IntPolynomial::constant(sign_fact.clone()));
            let det2 = &(&next2.q * &cur.p) - &(&next2.p * &cur.q);
            record("determinant_2", n, det2 == x.scale(&sign_fact));
            record("discriminant", n, self.discriminant(n).is_ok());
            let a = self.quadratic_triple(n).a;
            record("a_closed_form", n, a_closed_form(n).is_ok_and(|closed| closed == a));
        }
        out
    }

    /// `sum_{n < terms} A_n(x) y^n / n!` as an exact rational.
    pub fn generating_partial_sum(&self, x: &Rational, y: &Rational, terms: usize) -> Rational {
        let mut sum = Rational::new();
        let mut y_pow = Rational::from(1);
        for n in 0..terms {
            let a = self.quadratic_triple(n).a.eval_rational(x);
            sum += a * &y_pow / factorial(n);
            y_pow *= y;
        }
        sum
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One line of the identity report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub identity: &'static str,
    pub n: usize,
    pub status: Status,
}

pub fn pq_pair(n: usize) -> Arc<PQPair> {
    MillsPolys::global().pq_pair(n)
}

pub fn quadratic_triple(n: usize) -> QuadraticTriple {
    MillsPolys::global().quadratic_triple(n)
}

pub fn discriminant(n: usize) -> Result<IntPolynomial> {
    MillsPolys::global().discriminant(n)
}

pub fn verify_identities(n_max: usize) -> Vec<IdentityCheck> {
    MillsPolys::global().verify_identities(n_max)
}

/// `(n!)^2 (X^2 + 4n + 4)`.
pub fn discriminant_closed_form(n: usize) -> IntPolynomial {
    let f2 = factorial(n).square();
    IntPolynomial::new(vec![
        Integer::from(&f2 * (4 * n as u64 + 4)),
        Integer::new(),
        f2,
    ])
}

/// `P_n = sum_{k <= n/2} n! / (2^k k! (n-2k)!) X^(n-2k)`.
pub fn p_closed_form(n: usize) -> IntPolynomial {
    let mut coeffs = vec![Integer::new(); n + 1];
    let nf = factorial(n);
    for k in 0..=n / 2 {
        let den = (factorial(k) * factorial(n - 2 * k)) << k as u32;
        coeffs[n - 2 * k] = Integer::from(nf.div_exact_ref(&den));
    }
    IntPolynomial::new(coeffs)
}

/// `Q_n` from `Q_{m+1} = sum_{k <= m/2} (m-k)!/(m-2k)! P_{m-2k}` with `m = n - 1`.
pub fn q_closed_form(n: usize) -> Result<IntPolynomial> {
    if n == 0 {
        return Err(MillsError::domain("q_closed_form needs n >= 1"));
    }
    let m = n - 1;
    let mut q = IntPolynomial::zero();
    for k in 0..=m / 2 {
        let w = Integer::from(factorial(m - k).div_exact_ref(&factorial(m - 2 * k)));
        q = &q + &p_closed_form(m - 2 * k).scale(&w);
    }
    Ok(q)
}

/// `Q_{m+1} = sum_k [sum_{j <= k} (m-k+j)! / (2^j j!)] / (m-2k)! X^(m-2k)`,
/// the fully expanded coefficient formula.
pub fn q_expanded_form(n: usize) -> Result<IntPolynomial> {
    if n == 0 {
        return Err(MillsError::domain("q_expanded_form needs n >= 1"));
    }
    let m = n - 1;
    let mut coeffs = vec![Integer::new(); m + 1];
    for k in 0..=m / 2 {
        let inner: Rational = (0..=k)
            .map(|j| Rational::from((factorial(m - k + j), factorial(j) << j as u32)))
            .sum();
        let c = inner / factorial(m - 2 * k);
        if *c.denom() != 1 {
            return Err(MillsError::NonIntegral { n, power: m - 2 * k });
        }
        coeffs[m - 2 * k] = c.into_numer_denom().0;
    }
    Ok(IntPolynomial::new(coeffs))
}

/// `A_n` assembled from its coefficient formulas:
///
/// ```text
/// A_n = n! * sum_m a_{n,m} / m! * X^(2m)
/// a_{n,0} = (-1)^n (n+1) / 2^n * C(n, floor(n/2))
/// a_{n,1} = (1 - (-1)^n) / 2^n * n * C(n-1, floor(n/2))
/// a_{n,m} = sum_{k <= (n-m)/2} (2k+1)! / (2^{2k} (k!)^2) * C(n-2k-2, m-2)   (m >= 2)
/// ```
///
/// Everything is scaled by `2^n` so the sum is assembled in integers; the
/// final division by `2^n m!` must be exact.
pub fn a_closed_form(n: usize) -> Result<IntPolynomial> {
    let scale = n as u32;
    let nf = factorial(n);
    let mut coeffs = vec![Integer::new(); 2 * n + 1];
    for m in 0..=n {
        let scaled_a: Integer = match m {
            0 => {
                let v = Integer::from(n + 1) * binomial(n, n / 2);
                if n.is_multiple_of(2) {
                    v
                } else {
                    -v
                }
            }
            1 => {
                if n.is_multiple_of(2) {
                    Integer::new()
                } else {
                    Integer::from(2 * n) * binomial(n - 1, n / 2)
                }
            }
            _ => (0..=(n - m) / 2)
                .map(|k| {
                    // (2k+1)! / (2^{2k} (k!)^2) = (2k+1) C(2k, k) / 4^k
                    let central = Integer::from(2 * k + 1) * binomial(2 * k, k);
                    let weight = central << (scale - 2 * k as u32);
                    weight * binomial(n - 2 * k - 2, m - 2)
                })
                .sum(),
        };
        let numerator = scaled_a * &nf;
        let denominator = factorial(m) << scale;
        if !numerator.is_divisible(&denominator) {
            return Err(MillsError::NonIntegral { n, power: 2 * m });
        }
        coeffs[2 * m] = numerator.div_exact(&denominator);
    }
    Ok(IntPolynomial::new(coeffs))
}

/// `|sum_{n < terms} A_n(x) y^n / n!  -  exp(y x^2 / (1 - y)) / ((1 + y) sqrt(1 - y^2))|`
/// at `precision_bits`.
pub fn generating_function_residual(
    x: &Rational,
    y: &Rational,
    terms: usize,
    precision_bits: u32,
) -> Result<Float> {
    check_precision(precision_bits)?;
    if terms == 0 {
        return Err(MillsError::domain("terms must be at least 1"));
    }
    if Rational::from(y.abs_ref()) >= 1 {
        return Err(MillsError::domain("|y| must be below 1"));
    }
    let partial = MillsPolys::global().generating_partial_sum(x, y, terms);
    let prec = precision_bits + 32;
    let one_minus_y = Rational::from(1 - y);
    let exponent = Float::with_val(prec, y * x.clone().square() / &one_minus_y);
    let radicand = Float::with_val(prec, 1 - y.clone().square());
    let denom = radicand.sqrt() * Float::with_val(prec, Rational::from(1 + y));
    let closed = exponent.exp() / denom;
    let diff = Float::with_val(prec, &partial) - closed;
    Ok(Float::with_val(precision_bits, diff.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_coeffs(c)
    }

    #[test]
    fn low_orders() {
        let t = MillsPolys::new();
        assert_eq!(t.p(0), p(&[1]));
        assert!(t.q(0).is_zero());
        assert_eq!(t.p(1), p(&[0, 1]));
        assert_eq!(t.q(1), p(&[1]));
        assert_eq!(t.p(2), p(&[1, 0, 1]));
        assert_eq!(t.q(2), p(&[0, 1]));
        assert_eq!(t.p(3), p(&[0, 3, 0, 1]));
        assert_eq!(t.q(3), p(&[2, 0, 1]));
        assert_eq!(t.p(4), p(&[3, 0, 6, 0, 1]));
        assert_eq!(t.q(4), p(&[0, 5, 0, 1]));
        assert_eq!(t.p(5), p(&[0, 15, 0, 10, 0, 1]));
        assert_eq!(t.q(5), p(&[8, 0, 9, 0, 1]));
    }

    #[test]
    fn pq_invariants() {
        for n in 0..40 {
            let pair = pq_pair(n);
            assert_eq!(pair.n, n);
            assert_eq!(pair.p.degree(), n as isize);
            assert_eq!(*pair.p.leading().unwrap(), 1);
            assert!(pair.p.is_nonnegative() && pair.q.is_nonnegative());
            assert!(pair.p.has_parity(n));
            if n >= 1 {
                assert_eq!(pair.q.degree(), n as isize - 1);
                assert_eq!(*pair.q.leading().unwrap(), 1);
                assert!(pair.q.has_parity(n + 1));
            }
        }
    }

    #[test]
    fn closed_forms() {
        assert_eq!(p_closed_form(0), p(&[1]));
        assert_eq!(p_closed_form(4), p(&[3, 0, 6, 0, 1]));
        assert_eq!(p_closed_form(6), p(&[15, 0, 45, 0, 15, 0, 1]));
        assert_eq!(q_closed_form(1).unwrap(), p(&[1]));
        assert_eq!(q_closed_form(4).unwrap(), p(&[0, 5, 0, 1]));
        assert_eq!(q_closed_form(5).unwrap(), p(&[8, 0, 9, 0, 1]));
        assert_eq!(q_expanded_form(5).unwrap(), p(&[8, 0, 9, 0, 1]));
        assert!(q_closed_form(0).is_err());
    }

    #[test]
    fn quadratic_triples() {
        let t0 = quadratic_triple(0);
        assert_eq!((t0.a, t0.b, t0.c), (p(&[1]), p(&[0, -1]), p(&[-1])));
        let t1 = quadratic_triple(1);
        assert_eq!((t1.a, t1.b, t1.c), (p(&[-1, 0, 1]), p(&[0, 3]), p(&[2])));
        let t2 = quadratic_triple(2);
        assert_eq!(t2.a, p(&[3, 0, 0, 0, 1]));
        assert_eq!(t2.b, p(&[0, -4, 0, 2]));
        // the n = 3 upper bound reads (x^4+x^2+16) / (x^5+2x^3+12x + 3 sqrt(x^2+16)),
        // which is 2 C_3 / (B_3 + 3! sqrt(x^2 + 16)).
        let t3 = quadratic_triple(3);
        assert_eq!(t3.c, p(&[16, 0, 1, 0, 1]));
        assert_eq!(t3.b, p(&[0, 24, 0, 4, 0, 2]));
    }

    #[test]
    fn a_closed_form_matches_products() {
        assert_eq!(a_closed_form(0).unwrap(), p(&[1]));
        assert_eq!(a_closed_form(1).unwrap(), p(&[-1, 0, 1]));
        assert_eq!(a_closed_form(2).unwrap(), p(&[3, 0, 0, 0, 1]));
        assert_eq!(a_closed_form(3).unwrap(), p(&[-9, 0, 9, 0, 3, 0, 1]));
        for n in 0..25 {
            assert_eq!(a_closed_form(n).unwrap(), quadratic_triple(n).a, "n = {n}");
        }
    }

    #[test]
    fn a_structure() {
        for n in 0..12 {
            let even = quadratic_triple(2 * n).a;
            assert!(even.has_parity(0) && even.is_nonnegative());
            assert_eq!(even.degree(), 4 * n as isize);
            let c0 = Integer::from(2 * n + 1) * odd_double_factorial(n).square();
            assert_eq!(even.coeff(0), c0);

            let odd = quadratic_triple(2 * n + 1).a;
            let c0 = -odd_double_factorial(n + 1).square();
            assert_eq!(odd.coeff(0), c0);
            let rest = &odd - &IntPolynomial::constant(c0);
            assert!(rest.has_parity(0) && rest.is_nonnegative());
            assert_eq!(odd.degree(), 4 * n as isize + 2);
        }
    }

    #[test]
    fn discriminants() {
        assert_eq!(discriminant(0).unwrap(), p(&[4, 0, 1]));
        assert_eq!(discriminant(1).unwrap(), p(&[8, 0, 1]));
        assert_eq!(discriminant(2).unwrap(), p(&[48, 0, 4]));
    }

    #[test]
    fn identity_report_small() {
        let report = verify_identities(1);
        assert!(report.iter().all(|c| c.status == Status::Pass));
        let eq13: Vec<_> = report.iter().filter(|c| c.identity == "determinant_1").collect();
        assert_eq!(eq13.len(), 2);
        let report0 = verify_identities(0);
        assert!(report0
            .iter()
            .any(|c| c.identity == "determinant_1" && c.n == 0 && c.status == Status::Pass));
    }

    #[test]
    fn corrupted_table_is_detected() {
        let bad = MillsPolys::corrupted(3);
        let report = bad.verify_identities(5);
        assert!(report.iter().any(|c| c.status == Status::Fail));
        assert!(report
            .iter()
            .filter(|c| c.n < 1)
            .all(|c| c.status == Status::Pass));
    }

    #[test]
    fn factorial_caches() {
        assert_eq!(factorial(0), 1);
        assert_eq!(factorial(10), 3_628_800);
        assert_eq!(odd_double_factorial(3), 15);
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(2, 3), 0);
    }

    #[test]
    fn generating_function_trivial_point() {
        let r = generating_function_residual(&Rational::new(), &Rational::new(), 1, 128).unwrap();
        assert_eq!(r, 0);
        assert!(generating_function_residual(&Rational::new(), &Rational::from(1), 3, 128).is_err());
        assert!(generating_function_residual(&Rational::new(), &Rational::new(), 0, 128).is_err());
    }
}
