//! Two independent high-precision evaluators of the Mills ratio
//! `phi(x) = e^{x^2/2} int_x^inf e^{-t^2/2} dt`, each with an absolute error
//! bound.
//!
//! * [`phi_series`] sums the entire series
//!   `phi(x) = sqrt(pi/2) e^{x^2/2} - sum_k x^{2k+1} / (2k+1)!!`,
//!   which is `e^{x^2/2} sqrt(pi/2) erfc(x/sqrt 2)` with the error function
//!   expanded in its Kummer form. Every term has the sign of `x`, so the sum
//!   itself is free of cancellation; for `x > 0` the final subtraction
//!   cancels about `x^2 log2(e)` bits, which the working precision absorbs.
//! * [`phi_quadrature`] integrates `phi(x) = int_0^inf e^{-xt - t^2/2} dt`
//!   with tanh-sinh quadrature after truncating the range at
//!   `T = -x + sqrt(x^2 + 2L)`, `L = (p + 16) ln 2`.
//!
//! Neither route touches the polynomial or continued-fraction machinery, so
//! the bound certificates never test that machinery against itself.

use rug::float::Constant;
use rug::{Float, Rational};
use serde::Serialize;

use crate::error::{MillsError, Result};
use crate::mills::pq_pair;
use crate::quadrature::TanhSinh;
use crate::real::{check_precision, exact, pow2};

/// Largest `|x|` accepted by the oracle.
pub const ENVELOPE: u32 = 30;

/// Precision ceiling for automatic escalation.
pub const MAX_ESCALATION_BITS: u32 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Series,
    Quadrature,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Series => "series",
            Method::Quadrature => "quadrature",
        })
    }
}

#[derive(Clone, Debug)]
pub struct OracleValue {
    pub value: Float,
    /// Absolute: `|value - phi(x)| <= error_bound`.
    pub error_bound: Float,
    pub method: Method,
}

/// A value with an absolute error bound.
#[derive(Clone, Debug)]
pub struct Estimate {
    pub value: Float,
    pub error_bound: Float,
}

fn check_envelope(x: &Float) -> Result<()> {
    if x.is_nan() || Float::with_val(64, x.abs_ref()) > ENVELOPE {
        return Err(MillsError::Envelope {
            x: x.to_string(),
            limit: ENVELOPE,
        });
    }
    Ok(())
}

fn bits_of(count: usize) -> u32 {
    usize::BITS - count.leading_zeros()
}

/// Series evaluation. The error bound is absolute and at most
/// `2^(8 - precision_bits) * max(1, phi(x))`.
pub fn phi_series(x: &Float, precision_bits: u32) -> Result<OracleValue> {
    check_precision(precision_bits)?;
    check_envelope(x)?;
    let p = precision_bits;
    let xf = x.to_f64();
    // The term ratio x^2/(2k+3) drops below 1/2 after about x^2 terms; at
    // most x^2 log2(e) bits cancel in the final subtraction.
    let guard = if xf > 0.0 {
        (xf * xf * std::f64::consts::LOG2_E).ceil() as u32
    } else {
        0
    };
    let max_terms = (2.0 * xf * xf) as usize + p as usize + guard as usize + 8;
    let wp = (p + guard + 64 + bits_of(max_terms)).max(x.prec());
    let xw = Float::with_val(wp, x);
    let x2 = Float::with_val(wp, xw.square_ref());

    let mut term = xw.clone();
    let mut sum = xw.clone();
    let mut k: u64 = 0;
    let mut tail = Float::with_val(64, 0);
    if !xw.is_zero() {
        loop {
            k += 1;
            term *= &x2;
            term /= 2 * k + 1;
            sum += &term;
            // next ratio x^2/(2k+3) <= 1/2 bounds the tail by |term|
            let ratio_small = 2.0 * xf * xf <= (2 * k + 3) as f64;
            if ratio_small {
                let t = Float::with_val(64, term.abs_ref());
                let s = Float::with_val(64, sum.abs_ref()) * pow2(64, -(wp as i32));
                if t <= s {
                    tail = t;
                    break;
                }
            }
        }
    }

    let mut half_x2 = x2.clone();
    half_x2 >>= 1;
    let scale = (Float::with_val(wp, Constant::Pi) / 2u32).sqrt();
    let expo = half_x2.exp() * scale;
    let value_w = Float::with_val(wp, &expo - &sum);

    let u = pow2(64, -(wp as i32));
    let abs_sum = Float::with_val(64, sum.abs_ref());
    let err_sum = Float::with_val(64, &abs_sum * &u) * (3 * k + 2) + tail;
    let err_exp =
        Float::with_val(64, expo.abs_ref()) * &u * (Float::with_val(64, x2.abs_ref()) / 2u32 + 6u32);
    let err_sub = Float::with_val(64, value_w.abs_ref()) * &u;
    let err_w = (err_sum + err_exp + err_sub) * 2u32;

    let value = Float::with_val(p, &value_w);
    let err_round = Float::with_val(64, value.abs_ref()) * pow2(64, -(p as i32));
    Ok(OracleValue {
        value,
        error_bound: err_w + err_round,
        method: Method::Series,
    })
}

/// Quadrature evaluation of the Laplace-type integral.
pub fn phi_quadrature(x: &Float, precision_bits: u32) -> Result<OracleValue> {
    check_precision(precision_bits)?;
    check_envelope(x)?;
    let p = precision_bits;
    let wp = (p + 48).max(x.prec());
    let xw = Float::with_val(wp, x);

    let ln2 = Float::with_val(wp, Constant::Log2);
    let budget = Float::with_val(wp, &ln2 * (p + 16));
    let t_end = (Float::with_val(wp, xw.square_ref()) + Float::with_val(wp, &budget * 2u32))
        .sqrt()
        - &xw;
    // x T + T^2/2 = budget, so the tail is e^{-budget} max(1, 1/(x + T))
    let reach = Float::with_val(64, &xw + &t_end);
    let tail = (-Float::with_val(64, &budget)).exp() * reach.recip().max(&Float::with_val(64, 1));

    let integrand = |t: &Float| -> Float {
        let mut e = Float::with_val(wp, t / 2u32);
        e += &xw;
        e *= t;
        (-e).exp()
    };
    let rule = TanhSinh::new(wp, p + 8);
    let zero = Float::with_val(wp, 0);
    let pieces = if xw < 0 {
        // the integrand peaks at t = -x
        let peak = Float::with_val(wp, -&xw);
        vec![(zero, peak.clone()), (peak, t_end)]
    } else {
        vec![(zero, t_end)]
    };
    let mut value_w = Float::with_val(wp, 0);
    let mut err = tail;
    for (a, b) in &pieces {
        let r = rule.integrate(integrand, a, b);
        value_w += &r.value;
        err += r.error_estimate;
    }
    err += Float::with_val(64, value_w.abs_ref()) * pow2(64, -(wp as i32) + 2);

    let value = Float::with_val(p, &value_w);
    let err_round = Float::with_val(64, value.abs_ref()) * pow2(64, -(p as i32));
    Ok(OracleValue {
        value,
        error_bound: err + err_round,
        method: Method::Quadrature,
    })
}

/// `phi` at an exact rational argument.
///
/// The argument is rounded to `precision_bits + 64` bits and the series is
/// evaluated there; the shift is covered by `|phi'| <= |x| phi + 1`.
pub fn phi_at_rational(x: &Rational, precision_bits: u32) -> Result<OracleValue> {
    check_precision(precision_bits)?;
    let xr = Float::with_val(precision_bits + 64, x);
    let mut ov = phi_series(&xr, precision_bits)?;
    let shift = (x - exact(&xr)).abs();
    if shift != 0 {
        let shift = Float::with_val(64, &shift);
        let phi_max = Float::with_val(64, ov.value.abs_ref()) * 2u32 + &ov.error_bound;
        let slope = Float::with_val(64, xr.abs_ref()) * phi_max + 2u32;
        ov.error_bound += slope * shift;
    }
    Ok(ov)
}

/// `phi^(n)(x) = P_n(x) phi(x) - Q_n(x)`, escalating the oracle precision
/// until the propagated error is below `2^-precision_bits` relative to the
/// result (or the escalation ceiling is reached).
pub fn phi_derivative(n: usize, x: &Float, precision_bits: u32) -> Result<Estimate> {
    check_precision(precision_bits)?;
    check_envelope(x)?;
    let pair = pq_pair(n);
    let xq = exact(x);
    let p_val = pair.p.eval_rational(&xq);
    let q_val = pair.q.eval_rational(&xq);
    let mut wp = precision_bits + 32;
    loop {
        let ov = phi_series(x, wp)?;
        let phi_q = exact(&ov.value);
        let deriv = Rational::from(&p_val * &phi_q) - &q_val;
        let value = Float::with_val(precision_bits, &deriv);
        let p_abs = Float::with_val(64, &p_val).abs();
        let propagated = p_abs * &ov.error_bound;
        let err_round = Float::with_val(64, value.abs_ref()) * pow2(64, -(precision_bits as i32));
        let target = Float::with_val(64, value.abs_ref()) * pow2(64, -(precision_bits as i32));
        if propagated <= target || wp >= MAX_ESCALATION_BITS {
            return Ok(Estimate {
                value,
                error_bound: propagated + err_round,
            });
        }
        wp = (wp * 2).min(MAX_ESCALATION_BITS);
    }
}

/// `sqrt(pi/2)` at the given precision, rounded to nearest.
pub fn phi_at_zero(precision_bits: u32) -> Float {
    (Float::with_val(precision_bits, Constant::Pi) / 2u32).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::real;

    fn close(a: &Float, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol
    }

    #[test]
    fn series_known_values() {
        let v = phi_series(&real(128, 0.0), 128).unwrap();
        let diff = Float::with_val(128, &v.value - phi_at_zero(128)).abs();
        assert!(diff <= v.error_bound);
        assert!(close(&phi_series(&real(128, 1.0), 128).unwrap().value, 0.6556795424187985, 1e-15));
        assert!(close(&phi_series(&real(128, -2.0), 128).unwrap().value, 18.100_247_711_126_15, 1e-13));
        assert!(close(&phi_series(&real(128, 10.0), 128).unwrap().value, 0.09902859647173192, 1e-16));
    }

    #[test]
    fn quadrature_matches_series() {
        for x in [-5.0, -0.5, 0.0, 1.0, 10.0] {
            let s = phi_series(&real(192, x), 192).unwrap();
            let q = phi_quadrature(&real(192, x), 192).unwrap();
            let diff = Float::with_val(192, &s.value - &q.value).abs();
            assert!(diff <= Float::with_val(64, &s.error_bound + &q.error_bound), "x = {x}");
        }
    }

    #[test]
    fn envelope() {
        assert!(matches!(
            phi_series(&real(128, 31.0), 128),
            Err(MillsError::Envelope { .. })
        ));
        assert!(phi_quadrature(&real(128, -30.5), 128).is_err());
        assert!(phi_series(&real(128, 30.0), 128).is_ok());
        assert!(phi_series(&real(128, 1.0), 32).is_err());
    }

    #[test]
    fn derivative_small_orders() {
        let d1 = phi_derivative(1, &real(128, 0.0), 128).unwrap();
        assert_eq!(d1.value, -1);
        let d2 = phi_derivative(2, &real(128, 0.0), 128).unwrap();
        let diff = Float::with_val(128, &d2.value - phi_at_zero(128)).abs();
        assert!(diff <= Float::with_val(64, &d2.error_bound) * 2u32 + 1e-37);
    }

    #[test]
    fn rational_argument() {
        let third = Rational::from((1, 3));
        let v = phi_at_rational(&third, 128).unwrap();
        let q = phi_quadrature(&Float::with_val(256, &third), 256).unwrap();
        let diff = Float::with_val(128, &v.value - &q.value).abs();
        assert!(diff <= Float::with_val(64, &v.error_bound + &q.error_bound));
    }
}
