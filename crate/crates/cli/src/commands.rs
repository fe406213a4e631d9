use mills_core::bounds::{
    beta, certify_grid, certify_grid_with, convergent_exact, default_beta_tolerance,
    first_order_error_bound_exact, komatsu_lower_at, second_order_bound_at,
    second_order_in_domain_with, szarek_werner_upper_at, Certificate, Family,
};
use mills_core::cf::{cf_b, cf_convergent, cf_ladder_eval};
use mills_core::mills::{discriminant, pq_pair, quadratic_triple, MillsPolys, Status};
use mills_core::oracle::{phi_at_rational, phi_quadrature, phi_series};
use mills_core::real::{format_decimal, format_rational, parse_rational};
use mills_core::{BigRational, PrecReal};
use serde_json::{Map, Value};

use crate::output::{Output, Table};
use crate::{Cli, CliError, Command, Global, PhiMethod, Verdict, Which};

type Result<T> = std::result::Result<T, CliError>;

/// Points used for the series/quadrature agreement check.
const AGREEMENT_POINTS: [&str; 11] = ["-5", "-2", "-1", "-1/2", "0", "1/2", "1", "2", "5", "10", "20"];

pub fn run(cli: &Cli) -> Result<(Output, Verdict)> {
    let g = &cli.global;
    match &cli.command {
        Command::Poly { which, n } => poly(g, *which, *n),
        Command::Bounds { family, n, x } => bounds(g, family, *n, x),
        Command::Verify {
            n_max,
            grid,
            corrupt_order,
        } => verify(g, *n_max, grid, *corrupt_order),
        Command::Beta { m, tolerance } => beta_cmd(g, *m, tolerance.as_deref()),
        Command::Cf { x, depth } => cf(g, x, *depth),
        Command::Phi { x, method } => phi(g, x, *method),
    }
}

fn config(g: &Global, command: &str, extra: Vec<(&str, Value)>) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), Value::from(command));
    for (k, v) in extra {
        m.insert(k.into(), v);
    }
    m.insert("precision_bits".into(), Value::from(g.precision));
    m.insert("digits".into(), Value::from(g.digits));
    m.insert("format".into(), Value::from(g.format.name()));
    m
}

fn parse_x(text: &str) -> Result<BigRational> {
    parse_rational(text).map_err(|_| CliError::Usage(format!("cannot parse {text:?} as a rational")))
}

fn parse_grid(text: &str) -> Result<Vec<BigRational>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!("grid must be start:stop:step, got {text:?}")));
    }
    let (start, stop, step) = (parse_x(parts[0])?, parse_x(parts[1])?, parse_x(parts[2])?);
    if step <= 0 {
        return Err(CliError::Usage("grid step must be positive".into()));
    }
    let mut xs = Vec::new();
    let mut x = start;
    while x <= stop {
        xs.push(x.clone());
        x += &step;
    }
    Ok(xs)
}

fn dec(g: &Global, x: &PrecReal) -> Value {
    Value::from(format_decimal(x, g.digits))
}

fn dec_q(g: &Global, q: &BigRational) -> Value {
    dec(g, &PrecReal::with_val(g.precision, q))
}

fn rat(q: &BigRational) -> Value {
    Value::from(format_rational(q))
}

fn verdict(pass: bool) -> Value {
    Value::from(if pass { "pass" } else { "fail" })
}

fn certificate_table(g: &Global, certs: &[Certificate]) -> Table {
    let mut t = Table::new(&["family", "n", "x", "margin", "precision_bits", "verdict"]);
    for c in certs {
        t.push(vec![
            Value::from(c.family.clone()),
            Value::from(c.n),
            rat(&c.x),
            dec(g, &c.margin),
            Value::from(c.precision_bits),
            verdict(c.passed()),
        ]);
    }
    t
}

fn poly(g: &Global, which: Which, n: usize) -> Result<(Output, Verdict)> {
    let (name, p) = match which {
        Which::P => ("P", pq_pair(n).p.clone()),
        Which::Q => ("Q", pq_pair(n).q.clone()),
        Which::A => ("A", quadratic_triple(n).a),
        Which::B => ("B", quadratic_triple(n).b),
        Which::C => ("C", quadratic_triple(n).c),
        Which::Delta => ("Delta", discriminant(n)?),
    };
    let rendered = p.to_string();
    let mut t = Table::new(&["which", "n", "degree", "polynomial"]);
    t.push(vec![
        Value::from(name),
        Value::from(n),
        Value::from(p.degree()),
        Value::from(rendered.clone()),
    ]);
    let cfg = config(g, "poly", vec![("which", Value::from(name)), ("n", Value::from(n))]);
    let mut out = Output::new(cfg).single("result", t);
    out.text = Some(format!("{rendered}\n"));
    Ok((out, true))
}

fn parse_family(text: &str, n: usize) -> Result<(Family, usize)> {
    let lower = text.to_ascii_lowercase();
    if let Some(rest) = lower.strip_prefix('i') {
        let rest = rest.trim_start_matches('_');
        if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
            let k = rest
                .parse()
                .map_err(|_| CliError::Usage(format!("bad order in {text:?}")))?;
            return Ok((Family::SecondOrder, k));
        }
    }
    let family: Family = lower
        .parse()
        .map_err(|_| CliError::Usage(format!("unknown family {text:?}")))?;
    let n = match family {
        Family::Eq18 => 0,
        Family::Eq19 => 1,
        _ => n,
    };
    Ok((family, n))
}

fn bounds(g: &Global, family_text: &str, n: usize, x_text: &str) -> Result<(Output, Verdict)> {
    let (family, n) = parse_family(family_text, n)?;
    let x = parse_x(x_text)?;
    let prec = g.precision;
    let certs = certify_grid(family, &[n], std::slice::from_ref(&x), prec)?;
    let phi = phi_at_rational(&x, prec)?;

    let id = match family {
        Family::SecondOrder => format!("I_{n}"),
        other => other.id().to_string(),
    };
    let mut cols: Vec<&'static str> = vec!["family", "n", "x"];
    let mut vals: Vec<Value> = vec![Value::from(id.clone()), Value::from(n), rat(&x)];
    match family {
        Family::Eq15 => {
            let lower = convergent_exact(2 * n, &x)?;
            let upper = convergent_exact(2 * n + 1, &x)?;
            cols.extend(["lower", "upper", "lower_exact", "upper_exact"]);
            vals.extend([dec_q(g, &lower), dec_q(g, &upper), rat(&lower), rat(&upper)]);
        }
        Family::Eq16 => {
            let conv = convergent_exact(n, &x)?;
            let bound = first_order_error_bound_exact(n, &x)?;
            cols.extend(["convergent", "error_bound", "convergent_exact", "error_bound_exact"]);
            vals.extend([dec_q(g, &conv), dec_q(g, &bound), rat(&conv), rat(&bound)]);
        }
        Family::Eq17 => {}
        Family::Eq18 => {
            cols.push("lower");
            vals.push(dec(g, &komatsu_lower_at(&x, prec)?));
        }
        Family::Eq19 => {
            cols.push("upper");
            vals.push(dec(g, &szarek_werner_upper_at(&x, prec)?));
        }
        Family::SecondOrder => {
            let b = second_order_bound_at(n, &x, prec)?;
            cols.push(if n % 2 == 0 { "lower" } else { "upper" });
            vals.push(dec(g, &b.value));
        }
    }
    let main = certs
        .iter()
        .find(|c| c.family == id)
        .unwrap_or(&certs[0]);
    let passed = certs.iter().all(Certificate::passed);
    cols.extend(["phi", "phi_error_bound", "margin", "precision_bits", "verdict"]);
    vals.extend([
        dec(g, &phi.value),
        Value::from(format_decimal(&phi.error_bound, 3)),
        dec(g, &main.margin),
        Value::from(main.precision_bits),
        verdict(passed),
    ]);
    let mut result = Table::new(&cols);
    result.push(vals);
    let cfg = config(
        g,
        "bounds",
        vec![
            ("family", Value::from(family_text)),
            ("n", Value::from(n)),
            ("x", rat(&x)),
        ],
    );
    let out = Output::new(cfg)
        .single("result", result)
        .rows("certificates", certificate_table(g, &certs));
    Ok((out, passed))
}

fn verify(g: &Global, n_max: usize, grid: &str, corrupt: Option<usize>) -> Result<(Output, Verdict)> {
    let prec = g.precision;
    let damaged;
    let polys: &MillsPolys = match corrupt {
        Some(k) => {
            damaged = MillsPolys::corrupted(k);
            &damaged
        }
        None => MillsPolys::global(),
    };
    let xs = parse_grid(grid)?;
    let identities = polys.verify_identities(n_max);

    let orders: Vec<usize> = (0..=n_max).collect();
    let positive: Vec<BigRational> = xs.iter().filter(|x| **x > 0).cloned().collect();
    let above_minus_one: Vec<BigRational> = xs.iter().filter(|x| **x > -1).cloned().collect();
    let mut certs = Vec::new();
    if !positive.is_empty() {
        certs.extend(certify_grid_with(polys, Family::Eq15, &orders, &positive, prec)?);
        certs.extend(certify_grid_with(polys, Family::Eq16, &orders, &positive, prec)?);
    }
    certs.extend(certify_grid_with(polys, Family::Eq17, &orders, &xs, prec)?);
    certs.extend(certify_grid_with(polys, Family::Eq18, &[], &xs, prec)?);
    certs.extend(certify_grid_with(polys, Family::Eq19, &[], &above_minus_one, prec)?);
    for &n in &orders {
        let domain: Vec<BigRational> = xs
            .iter()
            .filter(|x| second_order_in_domain_with(polys, n, x))
            .cloned()
            .collect();
        certs.extend(certify_grid_with(polys, Family::SecondOrder, &[n], &domain, prec)?);
    }

    let mut agreement = Table::new(&["x", "series", "quadrature", "difference", "allowed", "verdict"]);
    let mut csv = Table::new(&["family", "n", "x", "margin", "precision_bits", "verdict"]);
    let mut oracle_failed = 0;
    for text in AGREEMENT_POINTS {
        let x = parse_x(text)?;
        let xf = PrecReal::with_val(prec, &x);
        let s = phi_series(&xf, prec)?;
        let q = phi_quadrature(&xf, prec)?;
        let diff = PrecReal::with_val(prec, &s.value - &q.value).abs();
        let allowed = PrecReal::with_val(64, &s.error_bound + &q.error_bound);
        let ok = diff <= allowed;
        if !ok {
            oracle_failed += 1;
        }
        let slack = PrecReal::with_val(64, &allowed - &diff);
        agreement.push(vec![
            rat(&x),
            dec(g, &s.value),
            dec(g, &q.value),
            Value::from(format_decimal(&diff, 3)),
            Value::from(format_decimal(&allowed, 3)),
            verdict(ok),
        ]);
        csv.push(vec![
            Value::from("oracle_agreement"),
            Value::Null,
            rat(&x),
            Value::from(format_decimal(&slack, 3)),
            Value::from(prec),
            verdict(ok),
        ]);
    }

    let mut id_table = Table::new(&["identity", "n", "verdict"]);
    let mut id_failed = Vec::new();
    for c in &identities {
        let ok = c.status == Status::Pass;
        if !ok {
            id_failed.push(format!("{} n={}", c.identity, c.n));
        }
        id_table.push(vec![Value::from(c.identity), Value::from(c.n), verdict(ok)]);
        csv.push(vec![
            Value::from(format!("identity:{}", c.identity)),
            Value::from(c.n),
            Value::Null,
            Value::Null,
            Value::Null,
            verdict(ok),
        ]);
    }
    let cert_table = certificate_table(g, &certs);
    csv.rows.extend(cert_table.rows.iter().cloned());

    let failed_certs: Vec<&Certificate> = certs.iter().filter(|c| !c.passed()).collect();
    let passed = id_failed.is_empty() && failed_certs.is_empty() && oracle_failed == 0;
    let mut summary = Map::new();
    summary.insert("identities".into(), Value::from(identities.len()));
    summary.insert("identities_failed".into(), Value::from(id_failed.len()));
    summary.insert("certificates".into(), Value::from(certs.len()));
    summary.insert("certificates_failed".into(), Value::from(failed_certs.len()));
    summary.insert("oracle_checks".into(), Value::from(AGREEMENT_POINTS.len()));
    summary.insert("oracle_failed".into(), Value::from(oracle_failed));
    summary.insert("status".into(), verdict(passed));

    let mut text = format!(
        "mills {} verify: n_max={} grid={} precision_bits={}\n",
        env!("CARGO_PKG_VERSION"),
        n_max,
        grid,
        prec
    );
    if let Some(k) = corrupt {
        text.push_str(&format!("corrupted table: P_{k}\n"));
    }
    text.push_str(&format!(
        "identities: {} checked, {} failed\n",
        identities.len(),
        id_failed.len()
    ));
    for f in &id_failed {
        text.push_str(&format!("  FAIL {f}\n"));
    }
    text.push_str(&format!(
        "certificates: {} checked, {} failed\n",
        certs.len(),
        failed_certs.len()
    ));
    for c in &failed_certs {
        text.push_str(&format!(
            "  FAIL {} n={} x={} margin={}\n",
            c.family,
            c.n,
            format_rational(&c.x),
            format_decimal(&c.margin, g.digits)
        ));
    }
    text.push_str(&format!(
        "oracle agreement: {} checked, {} failed\n",
        AGREEMENT_POINTS.len(),
        oracle_failed
    ));
    text.push_str(&format!("status: {}\n", if passed { "pass" } else { "fail" }));

    let mut extra = vec![("n_max", Value::from(n_max)), ("grid", Value::from(grid))];
    if let Some(k) = corrupt {
        extra.push(("corrupt_order", Value::from(k)));
    }
    let mut out = Output::new(config(g, "verify", extra))
        .rows("identities", id_table)
        .rows("certificates", cert_table)
        .rows("oracle_agreement", agreement);
    out.summary = Some(summary);
    out.text = Some(text);
    out.csv = Some(csv);
    Ok((out, passed))
}

fn beta_cmd(g: &Global, m: usize, tolerance: Option<&str>) -> Result<(Output, Verdict)> {
    let tol = match tolerance {
        Some(text) => {
            let q = parse_x(text)?;
            if q <= 0 {
                return Err(CliError::Usage("tolerance must be positive".into()));
            }
            PrecReal::with_val(g.precision, &q)
        }
        None => default_beta_tolerance(),
    };
    let b = beta(m, &tol)?;
    let sign = |s: i32, at: &str| -> Value {
        let rel = match s {
            -1 => "< 0",
            0 => "= 0",
            _ => "> 0",
        };
        Value::from(format!("A_{}({at}) {rel}", 2 * m + 1))
    };
    let width = BigRational::from(&b.high - &b.low);
    let mut t = Table::new(&[
        "m", "value", "low", "high", "low_decimal", "high_decimal", "width", "sign_low", "sign_high", "exact",
    ]);
    t.push(vec![
        Value::from(m),
        dec(g, &b.value),
        rat(&b.low),
        rat(&b.high),
        dec_q(g, &b.low),
        dec_q(g, &b.high),
        Value::from(format_decimal(&PrecReal::with_val(64, &width), 3)),
        sign(b.sign_low, "low"),
        sign(b.sign_high, "high"),
        Value::from(b.exact),
    ]);
    let cfg = config(
        g,
        "beta",
        vec![
            ("m", Value::from(m)),
            ("tolerance", Value::from(format_decimal(&tol, 6))),
        ],
    );
    Ok((Output::new(cfg).single("result", t), true))
}

fn cf(g: &Global, x_text: &str, depth: usize) -> Result<(Output, Verdict)> {
    let x = parse_x(x_text)?;
    if x <= 0 {
        return Err(CliError::Usage(format!("x must be positive, got {x_text}")));
    }
    if depth == 0 {
        return Err(CliError::Usage("depth must be at least 1".into()));
    }
    let prec = g.precision;
    let xf = PrecReal::with_val(prec, &x);
    let phi = phi_at_rational(&x, prec)?;
    let mut t = Table::new(&[
        "k",
        "b",
        "convergent",
        "convergent_decimal",
        "convergent_error",
        "ladder",
        "ladder_error",
    ]);
    for k in 1..=depth {
        let conv = cf_convergent(k, &x)?;
        let conv_f = PrecReal::with_val(prec, &conv);
        // a ladder with k - 1 rungs evaluates the k-th convergent
        let ladder = match k {
            1 => PrecReal::with_val(prec, xf.recip_ref()),
            _ => cf_ladder_eval(k - 1, &xf, prec)?,
        };
        let conv_err = PrecReal::with_val(prec, &conv_f - &phi.value);
        let ladder_err = PrecReal::with_val(prec, &ladder - &phi.value);
        t.push(vec![
            Value::from(k),
            rat(&cf_b(k - 1)),
            rat(&conv),
            dec(g, &conv_f),
            Value::from(format_decimal(&conv_err, 6)),
            dec(g, &ladder),
            Value::from(format_decimal(&ladder_err, 6)),
        ]);
    }
    let cfg = config(g, "cf", vec![("x", rat(&x)), ("depth", Value::from(depth))]);
    let mut phi_t = Table::new(&["x", "phi", "phi_error_bound"]);
    phi_t.push(vec![rat(&x), dec(g, &phi.value), Value::from(format_decimal(&phi.error_bound, 3))]);
    let out = Output::new(cfg).single("oracle", phi_t).rows("rows", t);
    Ok((out, true))
}

fn phi(g: &Global, x_text: &str, method: PhiMethod) -> Result<(Output, Verdict)> {
    let x = parse_x(x_text)?;
    let prec = g.precision;
    let mut t = Table::new(&["method", "x", "value", "error_bound"]);
    let mut values = Vec::new();
    if matches!(method, PhiMethod::Series | PhiMethod::Both) {
        values.push(phi_at_rational(&x, prec)?);
    }
    if matches!(method, PhiMethod::Quadrature | PhiMethod::Both) {
        let xf = PrecReal::with_val(prec + 64, &x);
        let mut q = phi_quadrature(&xf, prec)?;
        if &x - mills_core::real::exact(&xf) != 0 {
            // rounding of x is far below the quadrature tolerance; account for it
            let shift = PrecReal::with_val(64, &xf).abs() + 2u32;
            let delta = mills_core::real::pow2(64, -(prec as i32) - 60);
            q.error_bound += shift * delta * PrecReal::with_val(64, &q.value).abs().max(&PrecReal::with_val(64, 1));
        }
        values.push(q);
    }
    for v in &values {
        t.push(vec![
            Value::from(v.method.to_string()),
            rat(&x),
            dec(g, &v.value),
            Value::from(format_decimal(&v.error_bound, 3)),
        ]);
    }
    let agree = match values.as_slice() {
        [a, b] => {
            let diff = PrecReal::with_val(prec, &a.value - &b.value).abs();
            diff <= PrecReal::with_val(64, &a.error_bound + &b.error_bound)
        }
        _ => true,
    };
    let method_name = match method {
        PhiMethod::Series => "series",
        PhiMethod::Quadrature => "quadrature",
        PhiMethod::Both => "both",
    };
    let cfg = config(g, "phi", vec![("x", rat(&x)), ("method", Value::from(method_name))]);
    Ok((Output::new(cfg).rows("values", t), agree))
}
