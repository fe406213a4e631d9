use mills_core::bounds::{
    beta, certify_grid, certify_grid_with, default_beta_tolerance, first_order_enclosure,
    log_convexity_check, second_order_bound, Family,
};
use mills_core::mills::{quadratic_triple, MillsPolys, Status};
use mills_core::oracle::{phi_derivative, phi_series};
use mills_core::real::real;
use mills_core::MillsError;
use rug::{Float, Rational};

fn r(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

#[test]
fn thin_margins_escalate_precision() {
    // Q_60/P_60 and Q_61/P_61 pinch phi(10) far below 128-bit resolution.
    let c = certify_grid(Family::Eq15, &[30], &[r(10, 1)], 128).unwrap();
    assert!(c[0].passed());
    assert!(c[0].precision_bits > 128, "decided at {}", c[0].precision_bits);
    assert!(c[0].margin > c[0].error_bound);
    let c = certify_grid(Family::Eq15, &[20], &[r(10, 1)], 128).unwrap();
    assert!(c[0].passed());
    assert!(c[0].margin.to_f64() < 1e-38);
}

#[test]
fn example_certificates() {
    let c = certify_grid(Family::Eq15, &[1], &[r(1, 1)], 128).unwrap();
    // min(phi - 1/2, 3/4 - phi) = 0.75 - 0.6556795...
    assert!((c[0].margin.to_f64() - 0.0943204575812015).abs() < 1e-15);
    let c = certify_grid(Family::SecondOrder, &[2], &[r(0, 1)], 128).unwrap();
    assert_eq!(c.len(), 1, "no sharpness check at x = 0");
    assert!((c[0].margin.to_f64() - (1.2533141373155003 - 1.1547005383792515)).abs() < 1e-15);
    let c = certify_grid(Family::Eq18, &[7], &[r(0, 1)], 128).unwrap();
    assert_eq!((c[0].family.as_str(), c[0].n), ("Eq18", 0));
    assert!((c[0].margin.to_f64() - 0.2533141373155003).abs() < 1e-15);
}

#[test]
fn sharpness_and_decrease_are_reported() {
    let c = certify_grid(Family::SecondOrder, &[3], &[r(1, 2), r(2, 1)], 128).unwrap();
    let ids: Vec<&str> = c.iter().map(|c| c.family.as_str()).collect();
    assert_eq!(ids, ["I_3", "I_3", "I_3_sharp", "I_3_sharp"]);
    assert!(c.iter().all(|c| c.passed()));
    let c = certify_grid(Family::Eq16, &[0, 1], &[r(1, 1)], 128).unwrap();
    let ids: Vec<(&str, usize)> = c.iter().map(|c| (c.family.as_str(), c.n)).collect();
    assert_eq!(
        ids,
        [("Eq16", 0), ("Eq16", 1), ("Eq16_decrease", 0), ("Eq16_decrease", 1)]
    );
}

#[test]
fn results_are_sorted_and_deterministic() {
    let xs = [r(3, 1), r(1, 10), r(2, 1)];
    let a = certify_grid(Family::Eq15, &[2, 0], &xs, 128).unwrap();
    let b = certify_grid(Family::Eq15, &[2, 0], &xs, 128).unwrap();
    let key: Vec<(usize, Rational)> = a.iter().map(|c| (c.n, c.x.clone())).collect();
    let mut sorted = key.clone();
    sorted.sort();
    assert_eq!(key, sorted);
    let ma: Vec<String> = a.iter().map(|c| c.margin.to_string()).collect();
    let mb: Vec<String> = b.iter().map(|c| c.margin.to_string()).collect();
    assert_eq!(ma, mb);
}

#[test]
fn corrupted_table_fails_certification() {
    let polys = MillsPolys::corrupted(3);
    let xs: Vec<Rational> = (1..=20).map(|k| r(k, 2)).collect();
    let c = certify_grid_with(&polys, Family::Eq15, &[1, 2], &xs, 128).unwrap();
    assert!(c.iter().any(|c| c.verdict == Status::Fail));
    let clean = certify_grid(Family::Eq15, &[1, 2], &xs, 128).unwrap();
    assert!(clean.iter().all(|c| c.passed()));
}

#[test]
fn domain_errors() {
    assert!(matches!(
        certify_grid(Family::Eq15, &[1], &[r(0, 1)], 128),
        Err(MillsError::Domain(_))
    ));
    let e = certify_grid(Family::Eq19, &[], &[r(-1, 1)], 128).unwrap_err();
    assert_eq!(e.to_string(), "x must exceed -1");
    let e = certify_grid(Family::SecondOrder, &[3], &[r(-9, 10)], 128).unwrap_err();
    assert!(e.to_string().starts_with("x must exceed -0.87133"), "{e}");
    assert!(certify_grid(Family::SecondOrder, &[2], &[r(-9, 10)], 128).is_ok());
    assert!(certify_grid(Family::Eq15, &[1], &[r(1, 1)], 32).is_err());
}

#[test]
fn odd_bound_between_roots_of_a() {
    // on (0, beta_m) the chain phi < Z^- < Q/P holds as well
    for m in 1..=5usize {
        let b = beta(m, &default_beta_tolerance()).unwrap();
        let x = Rational::from(&b.low / 2u32);
        let c = certify_grid(Family::SecondOrder, &[2 * m + 1], &[x], 128).unwrap();
        assert_eq!(c.len(), 2);
        assert!(c.iter().all(|c| c.passed()), "m = {m}");
    }
}

#[test]
fn beta_brackets_are_exact() {
    for m in 0..=5usize {
        let b = beta(m, &default_beta_tolerance()).unwrap();
        let a = quadratic_triple(2 * m + 1).a;
        if b.exact {
            assert_eq!(a.eval_rational(&b.low), 0);
            continue;
        }
        assert!(a.eval_rational(&b.low) < 0);
        assert!(a.eval_rational(&b.high) > 0);
        assert!(Rational::from(&b.high - &b.low) < 1e-12);
        assert!(b.value > 0 && b.value < 1);
        assert!(b.value >= Float::with_val(128, &b.low) && b.value <= Float::with_val(128, &b.high));
    }
}

#[test]
fn beta_tolerance_controls_width() {
    let coarse = beta(2, &real(64, 0.01)).unwrap();
    assert!(Rational::from(&coarse.high - &coarse.low) < 0.01);
    assert!(Rational::from(&coarse.high - &coarse.low) >= 0.005);
}

#[test]
fn second_order_tighter_than_first_order() {
    for k in 1..=40 {
        let x = real(128, f64::from(k) / 4.0);
        for m in 0..=5usize {
            let lower = second_order_bound(2 * m, &x, 128).unwrap().value;
            let upper = second_order_bound(2 * m + 1, &x, 128).unwrap().value;
            let enc = first_order_enclosure(m, &x, 128).unwrap();
            assert!(enc.lower < lower, "x = {x}, m = {m}");
            let conv_odd = mills_core::bounds::convergent_exact(2 * m + 1, &mills_core::real::exact(&x)).unwrap();
            assert!(upper < Float::with_val(256, &conv_odd), "x = {x}, m = {m}");
        }
    }
}

#[test]
fn derivative_signs_alternate() {
    for k in 1..=30 {
        let x = real(128, f64::from(k) / 3.0);
        let phi = phi_series(&x, 256).unwrap();
        for n in 0..=12usize {
            let d = phi_derivative(n, &x, 128).unwrap();
            let signed = if n % 2 == 0 { d.value.clone() } else { -d.value.clone() };
            assert!(signed > d.error_bound, "n = {n}, x = {x}, phi = {}", phi.value);
        }
    }
}

#[test]
fn log_convexity_positive_with_error() {
    for k in -20..=20 {
        let x = real(128, f64::from(k) / 2.0);
        for n in 0..=6 {
            let v = log_convexity_check(n, &x, 128).unwrap();
            assert!(v.value > v.error_bound, "n = {n}, x = {x}");
        }
    }
}
