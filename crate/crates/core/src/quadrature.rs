//! Tanh-sinh (double-exponential) quadrature in multi-precision arithmetic.
//!
//! The substitution `t -> (a+b)/2 + (b-a)/2 * tanh(pi/2 sinh s)` turns a
//! smooth integrand on `[a, b]` into one decaying double-exponentially in `s`,
//! where the trapezoidal rule converges roughly doubling the correct digits
//! each time the step halves. Abscissas near the endpoints are formed as
//! distances from the endpoint so no precision is lost to `1 - tanh`.
//!
//! The reported error is the difference between the last two levels, plus
//! the truncation of the `s` range and an accumulated rounding term. The
//! difference of two levels over-estimates the error of the finer one once
//! the iteration is in its doubly-exponential regime.

use rug::float::Constant;
use rug::Float;

use crate::real::pow2;

#[derive(Clone, Debug)]
pub struct TanhSinh {
    /// Working precision of every node, weight and partial sum.
    pub precision_bits: u32,
    /// Stop once two successive levels agree to this many relative bits.
    pub target_bits: u32,
    pub max_level: u32,
}

#[derive(Clone, Debug)]
pub struct QuadratureResult {
    pub value: Float,
    pub error_estimate: Float,
    pub evaluations: usize,
    pub levels: u32,
    pub converged: bool,
}

impl TanhSinh {
    pub fn new(precision_bits: u32, target_bits: u32) -> Self {
        TanhSinh {
            precision_bits,
            target_bits,
            max_level: 14,
        }
    }

    pub fn integrate<F>(&self, f: F, a: &Float, b: &Float) -> QuadratureResult
    where
        F: Fn(&Float) -> Float,
    {
        let prec = self.precision_bits;
        let width = Float::with_val(prec, b - a);
        let half = Float::with_val(prec, &width / 2u32);
        let mid = Float::with_val(prec, a + &half);
        let half_pi = Float::with_val(prec, Constant::Pi) / 2u32;

        // beyond s_max every weight is below 2^-(prec + 64) relative to the
        // central one
        let s_max = Float::with_val(64, 0.25 * f64::from(prec + 64)).asinh() + 0.5f64;
        let s_max = s_max.to_f64();
        let threshold = pow2(64, -(self.target_bits as i32) - 24);

        let mut evaluations = 1usize;
        let mut abs_total = Float::with_val(prec, 0);
        // Sum of weight * f over all nodes visited so far, without the step.
        let centre = Float::with_val(prec, &half_pi * &half) * f(&mid);
        abs_total += centre.clone().abs();
        let mut raw = centre;
        let mut truncation = Float::with_val(64, 0);

        let node_pair = |s: f64, raw: &mut Float, abs_total: &mut Float| -> Float {
            let s = Float::with_val(prec, s);
            let u = Float::with_val(prec, s.sinh_ref()) * &half_pi;
            let cosh_u = Float::with_val(prec, u.cosh_ref());
            let e2u = Float::with_val(prec, &u * 2u32).exp();
            let delta = Float::with_val(prec, &width / (e2u + 1u32));
            let weight = Float::with_val(prec, s.cosh_ref()) * &half_pi * &half
                / cosh_u.square();
            let left = f(&Float::with_val(prec, a + &delta));
            let right = f(&Float::with_val(prec, b - &delta));
            let contribution = weight * (left + right);
            *abs_total += contribution.clone().abs();
            *raw += &contribution;
            contribution
        };

        let level_value = |raw: &Float, level: u32| -> Float {
            let mut v = raw.clone();
            v >>= level as i32;
            v
        };

        // Level 0: unit step.
        let mut k = 1u32;
        loop {
            let s = f64::from(k);
            if s > s_max {
                break;
            }
            let c = node_pair(s, &mut raw, &mut abs_total);
            evaluations += 2;
            if s >= 1.0 && is_negligible(&c, &raw, &threshold) {
                truncation = Float::with_val(64, c.abs_ref());
                break;
            }
            k += 1;
        }
        let mut previous = level_value(&raw, 0);
        let mut difference = Float::with_val(64, f64::INFINITY);
        let mut converged = false;
        let mut level = 0;

        while level < self.max_level {
            level += 1;
            let h = 0.5f64.powi(level as i32);
            let mut j = 1u32;
            loop {
                let s = f64::from(j) * h;
                if s > s_max {
                    break;
                }
                let c = node_pair(s, &mut raw, &mut abs_total);
                evaluations += 2;
                if s >= 1.0 && is_negligible(&c, &raw, &threshold) {
                    let tail = Float::with_val(64, c.abs_ref());
                    if tail > truncation {
                        truncation = tail;
                    }
                    break;
                }
                j += 2;
            }
            let current = level_value(&raw, level);
            difference = Float::with_val(64, &current - &previous).abs();
            previous = current;
            let scale = Float::with_val(64, previous.abs_ref());
            if difference <= Float::with_val(64, &scale * &threshold) * (1u64 << 24) {
                converged = true;
                break;
            }
        }

        let step = pow2(64, -(level as i32));
        // Dropped tail terms decay double-exponentially: twice the last one
        // kept covers the rest of the series.
        let truncation = truncation * 2u32 * &step;
        let rounding = Float::with_val(64, &abs_total * &step)
            * (evaluations as f64 * 8.0)
            * pow2(64, -(prec as i32));
        let error_estimate = difference + truncation + rounding;
        QuadratureResult {
            value: previous,
            error_estimate,
            evaluations,
            levels: level,
            converged,
        }
    }
}

fn is_negligible(contribution: &Float, raw: &Float, threshold: &Float) -> bool {
    let scale = Float::with_val(64, raw.abs_ref()) * threshold;
    Float::with_val(64, contribution.abs_ref()) <= scale
}
