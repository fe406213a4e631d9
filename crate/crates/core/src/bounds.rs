//! Certified bounds for `phi`.
//!
//! First-order bounds are the convergents `Q_n(x)/P_n(x)`: even orders lie
//! below `phi(x)`, odd orders above, and the gap to `phi` is less than
//! `n! / (P_n(x) P_{n+1}(x))`.
//!
//! Second-order bounds are roots of `A_n T^2 - B_n T + C_n`:
//!
//! ```text
//! Z_n^(+/-)(x) = (B_n(x) +/- n! sqrt(x^2 + 4n + 4)) / (2 A_n(x))
//! ```
//!
//! `Z^+_{2m}` is a lower bound on the whole real line and `Z^-_{2m+1}` an
//! upper bound for `x > -beta_m`, with `beta_m` the root of `A_{2m+1}` in
//! `]0, 1]`. Order 0 gives `2/(x + sqrt(x^2 + 4))` (Komatsu) and order 1
//! gives `4/(3x + sqrt(x^2 + 8))` (Szarek and Werner).
//!
//! Polynomials are evaluated exactly at the (dyadic or rational) argument,
//! so the only rounding in a bound comes from the square root and the final
//! conversion. The roots are formed without cancellation: whichever of
//! `(B +/- s)/(2A)` and `2C/(B -/+ s)` adds quantities of equal sign is used.

use std::cmp::Ordering;

use rayon::prelude::*;
use rug::float::Round;
use rug::{Float, Rational};
use serde::{Serialize, Serializer};

use crate::error::{MillsError, Result};
use crate::mills::{factorial, MillsPolys, Status};
use crate::oracle::{phi_at_rational, phi_series, Estimate, OracleValue, MAX_ESCALATION_BITS};
use crate::real::{check_precision, exact, format_decimal, format_rational, pow2, round_rational, ulp};

/// Ceiling for precision escalation inside [`certify_grid`].
pub const MAX_CERTIFY_BITS: u32 = 2048;

/// Default bracket width for [`beta`]: `2^-40`.
pub fn default_beta_tolerance() -> Float {
    pow2(64, -40)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Lower => "lower",
            Side::Upper => "upper",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootSign {
    Plus,
    Minus,
}

/// Which inequality family produced a bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub family: String,
    pub order: usize,
}

#[derive(Clone, Debug)]
pub struct Enclosure {
    pub x: Float,
    pub lower: Float,
    pub upper: Float,
    pub lower_source: Provenance,
    pub upper_source: Provenance,
    pub precision_bits: u32,
}

#[derive(Clone, Debug)]
pub struct SecondOrderBound {
    pub n: usize,
    pub value: Float,
    pub side: Side,
}

/// Root of `A_{2m+1}` in `]0, 1]` with an exactly certified bracket.
#[derive(Clone, Debug)]
pub struct BetaRoot {
    pub m: usize,
    /// Midpoint of the bracket.
    pub value: Float,
    pub low: Rational,
    pub high: Rational,
    /// Exact signs of `A_{2m+1}` at `low` and `high`.
    pub sign_low: i32,
    pub sign_high: i32,
    /// The root was hit exactly; then `low == high == value`.
    pub exact: bool,
}

/// Inequality families accepted by [`certify_grid`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Even and odd convergents enclose `phi`.
    Eq15,
    /// Distance to a convergent, and its strict decrease in `n`.
    Eq16,
    /// `A_n phi^2 - B_n phi + C_n > 0`.
    Eq17,
    /// Komatsu lower bound.
    Eq18,
    /// Szarek-Werner upper bound.
    Eq19,
    /// `Z^+_{2m}` below / `Z^-_{2m+1}` above, plus sharpness against the
    /// convergent of the same order.
    SecondOrder,
}

impl Family {
    pub fn id(&self) -> &'static str {
        match self {
            Family::Eq15 => "Eq15",
            Family::Eq16 => "Eq16",
            Family::Eq17 => "Eq17",
            Family::Eq18 => "Eq18",
            Family::Eq19 => "Eq19",
            Family::SecondOrder => "I_n",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = MillsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "eq15" => Ok(Family::Eq15),
            "eq16" => Ok(Family::Eq16),
            "eq17" => Ok(Family::Eq17),
            "eq18" => Ok(Family::Eq18),
            "eq19" => Ok(Family::Eq19),
            "i" | "i_n" | "second" => Ok(Family::SecondOrder),
            _ => Err(MillsError::Parse(format!("unknown family {s:?}"))),
        }
    }
}

/// Outcome of one inequality at one `(n, x)`.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub family: String,
    pub n: usize,
    #[serde(serialize_with = "serialize_rational")]
    pub x: Rational,
    /// Signed distance from violation; positive means the inequality holds
    /// at the computed values.
    #[serde(serialize_with = "serialize_margin")]
    pub margin: Float,
    pub precision_bits: u32,
    pub verdict: Status,
    /// Bound on the error of `margin`; `pass` needs `margin > error_bound`.
    #[serde(skip)]
    pub error_bound: Float,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.verdict == Status::Pass
    }
}

fn serialize_rational<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(x))
}

fn serialize_margin<S: Serializer>(m: &Float, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_decimal(m, 20))
}

// ---------------------------------------------------------------------------
// exact building blocks

fn positive_x(x: &Rational) -> Result<()> {
    if *x <= 0 {
        return Err(MillsError::domain(format!(
            "x must be positive, got {}",
            format_rational(x)
        )));
    }
    Ok(())
}

fn ratio_with(polys: &MillsPolys, n: usize, x: &Rational) -> Option<Rational> {
    let pair = polys.pq_pair(n);
    let p = pair.p.eval_rational(x);
    if p == 0 {
        return None;
    }
    Some(pair.q.eval_rational(x) / p)
}

fn error_bound_with(polys: &MillsPolys, n: usize, x: &Rational) -> Option<Rational> {
    let den = polys.p(n).eval_rational(x) * polys.p(n + 1).eval_rational(x);
    if den == 0 {
        return None;
    }
    Some(Rational::from(factorial(n)) / den)
}

/// `Q_n(x) / P_n(x)` for `x > 0`.
pub fn convergent_exact(n: usize, x: &Rational) -> Result<Rational> {
    positive_x(x)?;
    Ok(ratio_with(MillsPolys::global(), n, x).expect("P_n > 0 for x > 0"))
}

/// `n! / (P_n(x) P_{n+1}(x))` for `x > 0`.
pub fn first_order_error_bound_exact(n: usize, x: &Rational) -> Result<Rational> {
    positive_x(x)?;
    Ok(error_bound_with(MillsPolys::global(), n, x).expect("P_n > 0 for x > 0"))
}

/// `n! / (P_n(x) P_{n+1}(x))` rounded to nearest at the precision of `x`
/// (at least 64 bits).
pub fn first_order_error_bound(n: usize, x: &Float) -> Result<Float> {
    let prec = x.prec().max(crate::real::MIN_PRECISION);
    let q = first_order_error_bound_exact(n, &exact(x))?;
    Ok(Float::with_val(prec, &q))
}

/// `Q_{2n}(x)/P_{2n}(x) < phi(x) < Q_{2n+1}(x)/P_{2n+1}(x)`, lower end rounded
/// down and upper end rounded up.
pub fn first_order_enclosure(n: usize, x: &Float, precision_bits: u32) -> Result<Enclosure> {
    check_precision(precision_bits)?;
    let xq = exact(x);
    positive_x(&xq)?;
    let lower = convergent_exact(2 * n, &xq)?;
    let upper = convergent_exact(2 * n + 1, &xq)?;
    Ok(Enclosure {
        x: x.clone(),
        lower: round_rational(&lower, precision_bits, Round::Down),
        upper: round_rational(&upper, precision_bits, Round::Up),
        lower_source: Provenance {
            family: "Eq15".into(),
            order: 2 * n,
        },
        upper_source: Provenance {
            family: "Eq15".into(),
            order: 2 * n + 1,
        },
        precision_bits,
    })
}

/// `sqrt(r)` computed 32 bits beyond `prec`, as an exact rational.
fn sqrt_exact(r: &Rational, prec: u32) -> Rational {
    exact(&Float::with_val(prec + 32, r).sqrt())
}

fn komatsu_exact(x: &Rational, prec: u32) -> Float {
    let s = sqrt_exact(&(Rational::from(x.square_ref()) + 4u32), prec);
    let q = if *x >= 0 {
        Rational::from(2) / (s + x)
    } else {
        (s - x) / 2u32
    };
    Float::with_val(prec, &q)
}

fn szarek_werner_exact(x: &Rational, prec: u32) -> Result<Float> {
    if *x <= -1 {
        return Err(MillsError::domain("x must exceed -1"));
    }
    let s = sqrt_exact(&(Rational::from(x.square_ref()) + 8u32), prec);
    let q = if *x >= 0 {
        Rational::from(4) / (s + Rational::from(x * 3u32))
    } else {
        let den = (1 - Rational::from(x.square_ref())) * 2u32;
        (s - Rational::from(x * 3u32)) / den
    };
    Ok(Float::with_val(prec, &q))
}

/// `2/(x + sqrt(x^2 + 4))` at the precision of `x` (at least 64 bits).
pub fn komatsu_lower(x: &Float) -> Float {
    komatsu_exact(&exact(x), x.prec().max(crate::real::MIN_PRECISION))
}

pub fn komatsu_lower_at(x: &Rational, precision_bits: u32) -> Result<Float> {
    check_precision(precision_bits)?;
    Ok(komatsu_exact(x, precision_bits))
}

/// `4/(3x + sqrt(x^2 + 8))` for `x > -1`, at the precision of `x` (at least
/// 64 bits).
pub fn szarek_werner_upper(x: &Float) -> Result<Float> {
    szarek_werner_exact(&exact(x), x.prec().max(crate::real::MIN_PRECISION))
}

pub fn szarek_werner_upper_at(x: &Rational, precision_bits: u32) -> Result<Float> {
    check_precision(precision_bits)?;
    szarek_werner_exact(x, precision_bits)
}

struct Quadratic {
    a: Rational,
    b: Rational,
    c: Rational,
    /// `n! sqrt(x^2 + 4n + 4)`, rounded 32 bits beyond the target precision.
    s: Rational,
}

fn quadratic_at(polys: &MillsPolys, n: usize, x: &Rational, prec: u32) -> Quadratic {
    let t = polys.quadratic_triple(n);
    let radicand = Rational::from(x.square_ref()) + 4 * n as u64 + 4;
    let s = sqrt_exact(&radicand, prec) * factorial(n);
    Quadratic {
        a: t.a.eval_rational(x),
        b: t.b.eval_rational(x),
        c: t.c.eval_rational(x),
        s,
    }
}

fn stable_root(q: &Quadratic, sign: RootSign, prec: u32) -> Option<Float> {
    let b_nonneg = q.b >= 0;
    let via_a = matches!((sign, b_nonneg), (RootSign::Plus, true) | (RootSign::Minus, false));
    let value = if via_a {
        if q.a == 0 {
            return None;
        }
        let num = match sign {
            RootSign::Plus => Rational::from(&q.b + &q.s),
            RootSign::Minus => Rational::from(&q.b - &q.s),
        };
        num / Rational::from(&q.a * 2u32)
    } else {
        let den = match sign {
            RootSign::Plus => Rational::from(&q.b - &q.s),
            RootSign::Minus => Rational::from(&q.b + &q.s),
        };
        if den == 0 {
            return None;
        }
        Rational::from(&q.c * 2u32) / den
    };
    Some(Float::with_val(prec, &value))
}

fn singular(n: usize, x: &Rational) -> MillsError {
    MillsError::Singular {
        n,
        x: format_rational(x),
    }
}

/// Root `Z_n^+` or `Z_n^-` of `A_n T^2 - B_n T + C_n`. Reports a singularity
/// when `|A_n(x)|` does not exceed its Horner rounding bound at
/// `precision_bits`.
pub fn second_order_root(n: usize, x: &Float, sign: RootSign, precision_bits: u32) -> Result<Float> {
    check_precision(precision_bits)?;
    let polys = MillsPolys::global();
    let a = polys.quadratic_triple(n).a;
    let (a_val, a_err) = a.eval_real_with_bound(x, precision_bits)?;
    let xq = exact(x);
    if Float::with_val(64, a_val.abs_ref()) <= a_err {
        return Err(singular(n, &xq));
    }
    let q = quadratic_at(polys, n, &xq, precision_bits);
    stable_root(&q, sign, precision_bits).ok_or_else(|| singular(n, &xq))
}

// For odd n and x < 0, x > -beta_m exactly when A_n(x) < 0.
fn in_domain(polys: &MillsPolys, n: usize, x: &Rational) -> bool {
    n.is_multiple_of(2) || *x >= 0 || polys.quadratic_triple(n).a.eval_rational(x) < 0
}

fn odd_domain(polys: &MillsPolys, n: usize, x: &Rational) -> Result<()> {
    if !in_domain(polys, n, x) {
        let b = beta_with(polys, n / 2, &default_beta_tolerance())?;
        return Err(MillsError::domain(format!(
            "x must exceed -{}",
            format_decimal(&b.value, 6)
        )));
    }
    Ok(())
}

/// Whether `x` lies in the domain of the order-`n` second-order bound.
pub fn second_order_in_domain(n: usize, x: &Rational) -> bool {
    in_domain(MillsPolys::global(), n, x)
}

pub fn second_order_in_domain_with(polys: &MillsPolys, n: usize, x: &Rational) -> bool {
    in_domain(polys, n, x)
}

fn second_order_value(polys: &MillsPolys, n: usize, x: &Rational, prec: u32) -> Result<Float> {
    odd_domain(polys, n, x)?;
    let q = quadratic_at(polys, n, x, prec);
    let sign = if n.is_multiple_of(2) { RootSign::Plus } else { RootSign::Minus };
    stable_root(&q, sign, prec).ok_or_else(|| singular(n, x))
}

/// `Z^+_{2m}(x)` (a lower bound, any real `x`) or `Z^-_{2m+1}(x)` (an upper
/// bound, `x > -beta_m`). At `x = beta_m`, where `A_{2m+1}` vanishes, the
/// value is the continuous extension `2 C / (B + s)`.
pub fn second_order_bound(n: usize, x: &Float, precision_bits: u32) -> Result<SecondOrderBound> {
    second_order_bound_at(n, &exact(x), precision_bits)
}

/// [`second_order_bound`] at an exact rational argument.
pub fn second_order_bound_at(n: usize, x: &Rational, precision_bits: u32) -> Result<SecondOrderBound> {
    check_precision(precision_bits)?;
    let value = second_order_value(MillsPolys::global(), n, x, precision_bits)?;
    Ok(SecondOrderBound {
        n,
        value,
        side: if n.is_multiple_of(2) { Side::Lower } else { Side::Upper },
    })
}

fn sign_of(q: &Rational) -> i32 {
    match q.cmp0() {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

/// Root of `A_{2m+1}` in `]0, 1]` by bisection on exact rational signs.
pub fn beta(m: usize, tolerance: &Float) -> Result<BetaRoot> {
    beta_with(MillsPolys::global(), m, tolerance)
}

pub fn beta_with(polys: &MillsPolys, m: usize, tolerance: &Float) -> Result<BetaRoot> {
    if tolerance.is_nan() || *tolerance <= 0 {
        return Err(MillsError::domain("tolerance must be positive"));
    }
    let tol = if tolerance.is_infinite() {
        Rational::from(1)
    } else {
        exact(tolerance)
    };
    let a = polys.quadratic_triple(2 * m + 1).a;
    let bits = tolerance
        .get_exp()
        .map_or(64, |e| (8 - e).max(64) as u32)
        .max(64);
    let mut low = Rational::new();
    let mut high = Rational::from(1);
    let sign_low = sign_of(&a.eval_rational(&low));
    let mut sign_high = sign_of(&a.eval_rational(&high));
    if sign_high == 0 {
        return Ok(BetaRoot {
            m,
            value: Float::with_val(bits, 1),
            low: high.clone(),
            high,
            sign_low: 0,
            sign_high: 0,
            exact: true,
        });
    }
    while Rational::from(&high - &low) >= tol {
        let mid = Rational::from(&low + &high) / 2u32;
        match sign_of(&a.eval_rational(&mid)) {
            0 => {
                return Ok(BetaRoot {
                    m,
                    value: Float::with_val(bits, &mid),
                    low: mid.clone(),
                    high: mid,
                    sign_low: 0,
                    sign_high: 0,
                    exact: true,
                });
            }
            s if s == sign_low => low = mid,
            s => {
                sign_high = s;
                high = mid;
            }
        }
    }
    let mid = Rational::from(&low + &high) / 2u32;
    Ok(BetaRoot {
        m,
        value: Float::with_val(bits, &mid),
        low,
        high,
        sign_low,
        sign_high,
        exact: false,
    })
}

fn log_convexity_margin(
    a: &Rational,
    b: &Rational,
    c: &Rational,
    phi: &Float,
    phi_err: &Float,
) -> (Rational, Float) {
    let f = exact(phi);
    let value = (a * Rational::from(f.square_ref())) - Rational::from(b * &f) + c;
    // |d/dT (A T^2 - B T + C)| = |2 A T - B|; the quadratic remainder is |A| e^2.
    let slope = (Rational::from(a * &f) * 2u32) - b;
    let slope = Float::with_val_round(64, slope.abs(), Round::Up).0;
    let curv = Float::with_val_round(64, a.clone().abs(), Round::Up).0;
    let err = slope * phi_err + curv * Float::with_val(64, phi_err.square_ref());
    (value, err)
}

/// `A_n(x) phi(x)^2 - B_n(x) phi(x) + C_n(x)` with the oracle value of `phi`.
/// The oracle precision is raised until the propagated error is below
/// `2^-precision_bits` of the result.
pub fn log_convexity_check(n: usize, x: &Float, precision_bits: u32) -> Result<Estimate> {
    check_precision(precision_bits)?;
    let xq = exact(x);
    let t = MillsPolys::global().quadratic_triple(n);
    let (a, b, c) = (t.a.eval_rational(&xq), t.b.eval_rational(&xq), t.c.eval_rational(&xq));
    let mut wp = precision_bits + 32;
    loop {
        let phi = phi_series(x, wp)?;
        let (value, err) = log_convexity_margin(&a, &b, &c, &phi.value, &phi.error_bound);
        let rounded = Float::with_val(precision_bits, &value);
        let target = Float::with_val(64, rounded.abs_ref()) * pow2(64, -(precision_bits as i32));
        if err <= target || wp >= MAX_ESCALATION_BITS {
            return Ok(Estimate {
                value: rounded,
                error_bound: err + target,
            });
        }
        wp = (wp * 2).min(MAX_ESCALATION_BITS);
    }
}

// ---------------------------------------------------------------------------
// grid certification

struct Check {
    id: String,
    rank: u8,
    n: usize,
    margin: Rational,
    error: Float,
}

impl Check {
    fn new(id: impl Into<String>, rank: u8, n: usize, margin: Rational, error: Float) -> Self {
        Check {
            id: id.into(),
            rank,
            n,
            margin,
            error,
        }
    }

    /// A failed evaluation (zero denominator in a damaged table).
    fn broken(id: impl Into<String>, rank: u8, n: usize) -> Self {
        Check::new(id, rank, n, Rational::new(), Float::with_val(64, 0))
    }

    fn undecided(&self) -> bool {
        !self.error.is_zero() && Float::with_val(64, &self.margin).abs() <= self.error
    }

    fn passed(&self) -> bool {
        self.margin > 0 && self.error < self.margin
    }
}

fn check_domain(polys: &MillsPolys, family: Family, n: usize, x: &Rational) -> Result<()> {
    match family {
        Family::Eq15 | Family::Eq16 => positive_x(x),
        Family::Eq19 if *x <= -1 => Err(MillsError::domain("x must exceed -1")),
        Family::SecondOrder => odd_domain(polys, n, x),
        _ => Ok(()),
    }
}

fn evaluate_checks(
    polys: &MillsPolys,
    family: Family,
    n: usize,
    x: &Rational,
    phi: &OracleValue,
    prec: u32,
) -> Result<Vec<Check>> {
    let f = exact(&phi.value);
    let e = phi.error_bound.clone();
    let mut out = Vec::new();
    match family {
        Family::Eq15 => {
            let id = "Eq15";
            match (ratio_with(polys, 2 * n, x), ratio_with(polys, 2 * n + 1, x)) {
                (Some(lo), Some(hi)) => {
                    let below = Rational::from(&f - &lo);
                    let above = hi - &f;
                    out.push(Check::new(id, 0, n, below.min(above), e));
                }
                _ => out.push(Check::broken(id, 0, n)),
            }
        }
        Family::Eq16 => {
            match (ratio_with(polys, n, x), error_bound_with(polys, n, x)) {
                (Some(r), Some(bound)) => {
                    let dist = Rational::from(&f - &r).abs();
                    out.push(Check::new("Eq16", 1, n, bound - dist, e));
                }
                _ => out.push(Check::broken("Eq16", 1, n)),
            }
            match (error_bound_with(polys, n, x), error_bound_with(polys, n + 1, x)) {
                (Some(b0), Some(b1)) => {
                    out.push(Check::new("Eq16_decrease", 2, n, b0 - b1, Float::with_val(64, 0)))
                }
                _ => out.push(Check::broken("Eq16_decrease", 2, n)),
            }
        }
        Family::Eq17 => {
            let t = polys.quadratic_triple(n);
            let (a, b, c) = (t.a.eval_rational(x), t.b.eval_rational(x), t.c.eval_rational(x));
            let (value, err) = log_convexity_margin(&a, &b, &c, &phi.value, &e);
            out.push(Check::new("Eq17", 3, n, value, err));
        }
        Family::Eq18 => {
            let k = komatsu_exact(x, prec);
            let err = Float::with_val(64, &e + &ulp(&k));
            out.push(Check::new("Eq18", 4, 0, f - exact(&k), err));
        }
        Family::Eq19 => {
            let s = szarek_werner_exact(x, prec)?;
            let err = Float::with_val(64, &e + &ulp(&s));
            out.push(Check::new("Eq19", 5, 1, exact(&s) - f, err));
        }
        Family::SecondOrder => {
            let id = format!("I_{n}");
            let sharp_id = format!("I_{n}_sharp");
            let z = match second_order_value(polys, n, x, prec) {
                Ok(z) => z,
                Err(MillsError::Singular { .. }) => {
                    out.push(Check::broken(id, 6, n));
                    return Ok(out);
                }
                Err(err) => return Err(err),
            };
            let zq = exact(&z);
            let z_err = Float::with_val(64, ulp(&z) * 2u32);
            let margin = if n.is_multiple_of(2) {
                Rational::from(&f - &zq)
            } else {
                Rational::from(&zq - &f)
            };
            out.push(Check::new(id, 6, n, margin, Float::with_val(64, &e + &z_err)));
            if *x > 0 {
                match ratio_with(polys, n, x) {
                    Some(r) => {
                        let margin = if n.is_multiple_of(2) { zq - r } else { r - zq };
                        out.push(Check::new(sharp_id, 7, n, margin, z_err));
                    }
                    None => out.push(Check::broken(sharp_id, 7, n)),
                }
            }
        }
    }
    Ok(out)
}

fn certify_point(
    polys: &MillsPolys,
    family: Family,
    n: usize,
    x: &Rational,
    base: &OracleValue,
    precision_bits: u32,
) -> Result<Vec<(u8, Certificate)>> {
    let mut wp = precision_bits;
    let mut phi = base.clone();
    loop {
        let checks = evaluate_checks(polys, family, n, x, &phi, wp)?;
        if wp >= MAX_CERTIFY_BITS || !checks.iter().any(Check::undecided) {
            return Ok(checks
                .into_iter()
                .map(|c| {
                    let verdict = if c.passed() { Status::Pass } else { Status::Fail };
                    let cert = Certificate {
                        family: c.id,
                        n: c.n,
                        x: x.clone(),
                        margin: Float::with_val(wp, &c.margin),
                        precision_bits: wp,
                        verdict,
                        error_bound: c.error,
                    };
                    (c.rank, cert)
                })
                .collect());
        }
        wp = (wp * 2).min(MAX_CERTIFY_BITS);
        phi = phi_at_rational(x, wp)?;
    }
}

/// Certify `family` at every `(n, x)` against the oracle.
///
/// Each certificate carries the margin (distance from violation) and the
/// precision it was decided at: when a margin does not clear its error bound
/// the point is re-evaluated at twice the precision, up to
/// [`MAX_CERTIFY_BITS`]. `Eq18` and `Eq19` ignore `orders`. Results are
/// sorted by family, order and `x`.
pub fn certify_grid(
    family: Family,
    orders: &[usize],
    xs: &[Rational],
    precision_bits: u32,
) -> Result<Vec<Certificate>> {
    certify_grid_with(MillsPolys::global(), family, orders, xs, precision_bits)
}

pub fn certify_grid_with(
    polys: &MillsPolys,
    family: Family,
    orders: &[usize],
    xs: &[Rational],
    precision_bits: u32,
) -> Result<Vec<Certificate>> {
    check_precision(precision_bits)?;
    let orders: Vec<usize> = match family {
        Family::Eq18 => vec![0],
        Family::Eq19 => vec![1],
        _ => orders.to_vec(),
    };
    for x in xs {
        for &n in &orders {
            check_domain(polys, family, n, x)?;
        }
    }
    let base: Vec<OracleValue> = xs
        .par_iter()
        .map(|x| phi_at_rational(x, precision_bits))
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = (0..xs.len())
        .flat_map(|i| orders.iter().map(move |&n| (i, n)))
        .collect();
    let nested: Vec<Vec<(u8, Certificate)>> = jobs
        .par_iter()
        .map(|&(i, n)| certify_point(polys, family, n, &xs[i], &base[i], precision_bits))
        .collect::<Result<_>>()?;
    let mut all: Vec<(u8, Certificate)> = nested.into_iter().flatten().collect();
    all.sort_by(|(ra, a), (rb, b)| {
        ra.cmp(rb)
            .then(a.n.cmp(&b.n))
            .then_with(|| a.x.cmp(&b.x))
    });
    Ok(all.into_iter().map(|(_, c)| c).collect())
}
