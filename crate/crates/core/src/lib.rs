//! Exact and certified computations around the Mills ratio
//!
//! ```text
//! phi(x) = exp(x^2 / 2) * integral_x^inf exp(-t^2 / 2) dt
//! ```
//!
//! The crate is organised bottom-up:
//!
//! * [`poly`]: dense integer polynomials and exact rational evaluation.
//! * [`mills`]: the polynomial families `P_n`, `Q_n` (with `phi^(n) = P_n phi - Q_n`),
//!   the quadratic-form coefficients `A_n`, `B_n`, `C_n` and an exact identity checker.
//! * [`cf`]: the continued-fraction expansion of `phi` for `x > 0`.
//! * [`oracle`]: two independent multi-precision evaluators of `phi`.
//! * [`bounds`]: rational and square-root bounds, the thresholds `beta_m`, and
//!   certificates comparing each bound with the oracle.

pub mod bounds;
pub mod cf;
pub mod error;
pub mod mills;
pub mod oracle;
pub mod poly;
pub mod quadrature;
pub mod real;

pub use error::{MillsError, Result};
pub use poly::IntPolynomial;
pub use real::{BigInt, BigRational, PrecReal};
