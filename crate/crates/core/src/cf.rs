//! Continued-fraction expansion of `phi(x)` for `x > 0`.
//!
//! With `a_{2n} = (2n)! / (2^n n!)`, `a_{2n+1} = 2^n n!` and `b_n = a_n / a_{n+1}`,
//! the rescaled polynomials `P_n / a_n`, `Q_n / a_n` obey
//! `U_{n+1} = b_n X U_n + U_{n-1}`, so
//!
//! ```text
//! Q_n / P_n = [0; b_0 x, b_1 x, ..., b_{n-1} x]
//! ```
//!
//! The equivalent ladder `1/(x + 1/(x + 2/(x + 3/(x + ...))))` truncated after
//! the numerator `depth` equals the convergent of order `depth + 1`.

use rug::{Float, Rational};

use crate::error::{MillsError, Result};
use crate::mills::binomial;
use crate::real::{check_precision, format_rational};

/// One partial-quotient coefficient `b_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfCoefficient {
    pub n: usize,
    pub value: Rational,
}

/// `b_{2k} = C(2k, k) / 4^k`, `b_{2k+1} = 1 / ((2k+1) b_{2k})`.
pub fn cf_b(n: usize) -> Rational {
    let k = n / 2;
    let even = Rational::from((binomial(2 * k, k), rug::Integer::from(1) << (2 * k as u32)));
    if n.is_multiple_of(2) {
        even
    } else {
        (even * (2 * k as u64 + 1)).recip()
    }
}

pub fn cf_coefficients(count: usize) -> Vec<CfCoefficient> {
    (0..count)
        .map(|n| CfCoefficient { n, value: cf_b(n) })
        .collect()
}

fn require_positive(x: &Rational) -> Result<()> {
    if *x <= 0 {
        return Err(MillsError::domain(format!(
            "x must be positive, got {}",
            format_rational(x)
        )));
    }
    Ok(())
}

/// `[0; b_0 x, ..., b_{n-1} x]` through the rescaled three-term recurrences.
pub fn cf_convergent(n: usize, x: &Rational) -> Result<Rational> {
    require_positive(x)?;
    if n == 0 {
        return Err(MillsError::domain("convergent order must be at least 1"));
    }
    // (num, den) hold (Q~_k, P~_k); start at k = 1 with (Q~_0, P~_0) = (0, 1).
    let (mut num_prev, mut den_prev) = (Rational::new(), Rational::from(1));
    let (mut num, mut den) = (Rational::from(1), x.clone());
    for k in 1..n {
        let step = cf_b(k) * x;
        let next_num = Rational::from(&step * &num) + &num_prev;
        let next_den = Rational::from(&step * &den) + &den_prev;
        num_prev = std::mem::replace(&mut num, next_num);
        den_prev = std::mem::replace(&mut den, next_den);
    }
    Ok(num / den)
}

/// Tail-first evaluation of `1/(x + 1/(x + 2/(x + ... + depth/x)))`.
pub fn cf_ladder_eval(depth: usize, x: &Float, precision_bits: u32) -> Result<Float> {
    check_precision(precision_bits)?;
    if *x <= 0 {
        return Err(MillsError::domain(format!("x must be positive, got {x}")));
    }
    if depth == 0 {
        return Err(MillsError::domain("ladder depth must be at least 1"));
    }
    let prec = precision_bits;
    let mut tail = Float::with_val(prec, depth) / x;
    for k in (1..depth).rev() {
        tail = Float::with_val(prec, k) / (tail + x);
    }
    Ok((tail + x).recip())
}

/// `[0; b0*x, b1*x, ...]` with exact rational coefficients.
pub fn render_expansion(terms: usize) -> String {
    let body: Vec<String> = cf_coefficients(terms)
        .iter()
        .map(|c| format!("{}*x", format_rational(&c.value)))
        .collect();
    if body.is_empty() {
        "[0]".to_string()
    } else {
        format!("[0; {}]", body.join(", "))
    }
}
