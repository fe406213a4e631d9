use mills_core::bounds::{first_order_enclosure, first_order_error_bound_exact, komatsu_lower, second_order_bound, szarek_werner_upper};
use mills_core::cf::cf_convergent;
use mills_core::mills::{factorial, pq_pair, quadratic_triple};
use mills_core::oracle::{phi_series, phi_quadrature};
use mills_core::real::{format_rational, parse_rational, ulp};
use mills_core::IntPolynomial;
use proptest::prelude::*;
use rug::{Float, Integer, Rational};

fn small_poly() -> impl Strategy<Value = IntPolynomial> {
    prop::collection::vec(-50i64..50, 0..7).prop_map(|c| IntPolynomial::from_coeffs(&c))
}

fn rational() -> impl Strategy<Value = Rational> {
    (-200i64..200, 1i64..60).prop_map(|(n, d)| Rational::from((n, d)))
}

fn positive_rational() -> impl Strategy<Value = Rational> {
    (1i64..400, 1i64..40).prop_map(|(n, d)| Rational::from((n, d)))
}

proptest! {
    #[test]
    fn ring_axioms(a in small_poly(), b in small_poly(), c in small_poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(-(-a.clone()), a);
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in small_poly(), b in small_poly(), x in rational()) {
        let sum = (&a + &b).eval_rational(&x);
        prop_assert_eq!(sum, a.eval_rational(&x) + b.eval_rational(&x));
        let prod = (&a * &b).eval_rational(&x);
        prop_assert_eq!(prod, a.eval_rational(&x) * b.eval_rational(&x));
    }

    #[test]
    fn product_rule(a in small_poly(), b in small_poly()) {
        let lhs = (&a * &b).derivative();
        let rhs = &(&a.derivative() * &b) + &(&a * &b.derivative());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn degree_of_product(a in small_poly(), b in small_poly()) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        prop_assert_eq!((&a * &b).degree(), a.degree() + b.degree());
    }

    #[test]
    fn determinant_at_points(n in 0usize..40, x in rational()) {
        let cur = pq_pair(n);
        let next = pq_pair(n + 1);
        let det = next.q.eval_rational(&x) * cur.p.eval_rational(&x)
            - next.p.eval_rational(&x) * cur.q.eval_rational(&x);
        let expected = if n % 2 == 0 { factorial(n) } else { -factorial(n) };
        prop_assert_eq!(det, Rational::from(expected));
    }

    #[test]
    fn p_structure(n in 0usize..60) {
        let p = pq_pair(n).p.clone();
        prop_assert_eq!(p.degree(), n as isize);
        prop_assert!(p.has_parity(n % 2));
        prop_assert!(p.is_nonnegative());
        prop_assert_eq!(p.leading().cloned(), Some(Integer::from(1)));
        let q = pq_pair(n).q.clone();
        prop_assert!(n == 0 || q.has_parity((n + 1) % 2));
    }

    #[test]
    fn discriminant_at_points(n in 0usize..25, x in rational()) {
        let t = quadratic_triple(n);
        let (a, b, c) = (t.a.eval_rational(&x), t.b.eval_rational(&x), t.c.eval_rational(&x));
        let disc = b.clone() * b - a * c * 4u32;
        let f = Rational::from(factorial(n).square());
        let expected = f * (x.clone().square() + 4 * n as u64 + 4);
        prop_assert_eq!(disc, expected);
    }

    #[test]
    fn convergents_are_polynomial_ratios(n in 1usize..30, x in positive_rational()) {
        let pair = pq_pair(n);
        let ratio = pair.q.eval_rational(&x) / pair.p.eval_rational(&x);
        prop_assert_eq!(cf_convergent(n, &x).unwrap(), ratio);
    }

    #[test]
    fn enclosure_ordered_and_bound_decreasing(n in 0usize..12, x in positive_rational()) {
        let xf = Float::with_val(128, &x);
        let e = first_order_enclosure(n, &xf, 128).unwrap();
        prop_assert!(e.lower < e.upper);
        let b0 = first_order_error_bound_exact(n, &x).unwrap();
        let b1 = first_order_error_bound_exact(n + 1, &x).unwrap();
        prop_assert!(b1 < b0);
    }

    #[test]
    fn classical_specializations(k in -300i64..300) {
        let x = Float::with_val(128, k) / 30u32;
        let z0 = second_order_bound(0, &x, 128).unwrap().value;
        let kom = komatsu_lower(&x);
        prop_assert!(Float::with_val(128, &z0 - &kom).abs() <= ulp(&kom) * 4u32);
        if x > -1 {
            let z1 = second_order_bound(1, &x, 128).unwrap().value;
            let sw = szarek_werner_upper(&x).unwrap();
            prop_assert!(Float::with_val(128, &z1 - &sw).abs() <= ulp(&sw) * 4u32);
        }
    }

    #[test]
    fn rational_text_round_trip(q in rational()) {
        prop_assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn oracles_agree(k in -250i64..250) {
        let x = Float::with_val(160, k) / 10u32;
        let s = phi_series(&x, 160).unwrap();
        let q = phi_quadrature(&x, 160).unwrap();
        let diff = Float::with_val(160, &s.value - &q.value).abs();
        prop_assert!(diff <= Float::with_val(64, &s.error_bound + &q.error_bound));
    }

    #[test]
    fn error_bound_shrinks_with_precision(k in -250i64..250) {
        let x = Float::with_val(64, k) / 10u32;
        let low = phi_series(&x, 128).unwrap();
        let high = phi_series(&x, 256).unwrap();
        prop_assert!(high.error_bound <= low.error_bound);
        let bound = Float::with_val(64, 1) >> 120u32;
        let scale = Float::with_val(64, low.value.abs_ref()).max(&Float::with_val(64, 1));
        prop_assert!(low.error_bound <= bound * scale);
    }

    #[test]
    fn ode_residual(k in -60i64..60) {
        // phi' = x phi - 1, checked with a central difference
        let prec = 192u32;
        let x = Float::with_val(prec, k) / 8u32;
        let h = Float::with_val(prec, 1) >> (prec / 3);
        let plus = phi_series(&Float::with_val(prec, &x + &h), prec).unwrap();
        let minus = phi_series(&Float::with_val(prec, &x - &h), prec).unwrap();
        let centre = phi_series(&x, prec).unwrap();
        let diff = Float::with_val(prec, &plus.value - &minus.value) / Float::with_val(prec, &h * 2u32);
        let expected = Float::with_val(prec, &x * &centre.value) - 1u32;
        let residual = Float::with_val(prec, &diff - &expected).abs();
        // h^2 |phi'''| / 6 + (e_+ + e_-)/(2h) + |x| e_0, with |phi'''| < 4 (1 + |x|)^3 phi
        let ax = Float::with_val(64, x.abs_ref());
        let third = Float::with_val(64, &ax + 1u32).square() * (Float::with_val(64, &ax + 1u32)) * 4u32
            * Float::with_val(64, centre.value.abs_ref()) * 2u32;
        let h64 = Float::with_val(64, &h);
        let tol = Float::with_val(64, h64.square_ref()) * third / 6u32
            + Float::with_val(64, &plus.error_bound + &minus.error_bound) / (h64 * 2u32)
            + ax * &centre.error_bound;
        prop_assert!(residual <= tol, "residual {} > {}", residual, tol);
    }
}
