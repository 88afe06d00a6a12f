//! Acceptance run: one PASS/FAIL line per criterion. Built without the
//! libtest harness so the lines always reach stdout.

mod common;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use kkit::algebra::{DependenceRelation, ExpMonomial, ExpPolynomial, KhovanskiiSystem, Shape};
use kkit::certify::{certify_regular_zero, check_certificate, Budget, Certificate};
use kkit::enclose::{exp_fin_enclosure, Dyadic, Interval, IntervalBox};
use kkit::formula::{normalize_complexity, parse_formula};
use kkit::reduce::{eliminate_dependence, regularize_augment};
use kkit::search::{solve_formula, solve_square, SearchConfig, Status};

type Outcome = Result<String, String>;

fn iv_q(i: &Interval) -> (Q, Q) {
    (i.lo().to_rational(), i.hi().to_rational())
}

/// Both endpoints of `i` within `tol` of `x`.
fn within(i: &Interval, x: &Q, tol: &Q) -> bool {
    let (lo, hi) = iv_q(i);
    lo <= *x && *x <= hi && (x - &lo) <= *tol && (&hi - x) <= *tol
}

fn certify_text(sys: &str, b: &str) -> Result<(KhovanskiiSystem, Certificate), String> {
    let s = KhovanskiiSystem::parse(sys).map_err(|e| e.to_string())?;
    let b = IntervalBox::parse(b, 128).map_err(|e| e.to_string())?;
    let c = certify_regular_zero(&s, &b, Budget::default()).map_err(|e| e.to_string())?;
    Ok((s, c))
}

// 1. Alternating partial sums bracket Exp(-1).
fn exp_minus_one_brackets() -> Outcome {
    let e = exp_fin_enclosure(&Interval::from_i64(-1), 128);
    let (lo, hi) = iv_q(&e);
    let mut sum = Q::zero();
    let mut fact = Q::one();
    let mut partial = Vec::new();
    for k in 0..=10i64 {
        if k > 0 {
            fact *= qi(k);
        }
        let t = Q::one() / &fact;
        sum += if k % 2 == 0 { t } else { -t };
        partial.push(sum.clone());
    }
    for n in [1usize, 3, 5, 7, 9] {
        if !(partial[n] < lo && hi < partial[n + 1]) {
            return Err(format!("n = {n}: enclosure {e} not strictly between the partial sums"));
        }
    }
    Ok(format!("enclosure width {:.2e}", to_f64(&(hi - lo))))
}

// 2. exp(x) >= x + 1 on a grid, and exp(x) > x^n at the growth points.
fn growth_inequalities() -> Outcome {
    for k in -80..=80i64 {
        let x = q(k, 8);
        let e = exp_fin_enclosure(&Interval::from_rational(&x, 128), 128);
        if e.lo().to_rational() < &x + Q::one() {
            return Err(format!("lower endpoint below x + 1 at x = {x}"));
        }
    }
    let mut checked = 0;
    for n in 1..=3i64 {
        for x in [4 * n * n + 1, 8 * n * n, 100] {
            let e = exp_fin_enclosure(&Interval::from_i64(x), 128);
            let xn = num_traits::pow(qi(x), n as usize);
            if e.lo().to_rational() <= xn {
                return Err(format!("Exp({x}) not above {x}^{n}"));
            }
            checked += 1;
        }
    }
    Ok(format!("161 grid points, {checked} power bounds"))
}

// 3. ln 2 and the omega constant, against series/Newton oracles.
fn certified_constants() -> Outcome {
    let tol = q(1, 1_000_000_000_000);
    let ln2 = ln_q(&qi(2), 256);
    let omega = omega_q(256);
    // cross-check the oracles against the published 50-digit values
    let tiny = dec("1e-45");
    if (&ln2 - dec("0.69314718055994530941723212145817656807550013436026")).abs() > tiny
        || (&omega - dec("0.56714329040978387299996866221035554975381578718651")).abs() > tiny
    {
        return Err("oracle disagrees with the reference digits".into());
    }
    for (sys, b, want, name) in [("E(x1) - 2", "[0.6, 0.8]", &ln2, "ln 2"), ("x1 * E(x1) - 1", "[0.5, 0.6]", &omega, "omega")] {
        let t = Instant::now();
        let (_, c) = certify_text(sys, b)?;
        if !within(c.zero_enclosure().coord(0), want, &tol) {
            return Err(format!("{name}: enclosure {} misses the oracle", c.zero_enclosure()));
        }
        if t.elapsed() > Duration::from_secs(2) {
            return Err(format!("{name}: took {:?}", t.elapsed()));
        }
    }
    Ok("both within 1e-12".into())
}

/// Random texp-polynomial of total degree at most 3.
fn random_poly(rng: &mut ChaCha8Rng, shape: Shape) -> ExpPolynomial {
    let (ell, n) = (shape.ell(), shape.n());
    let terms = (0..rng.gen_range(1..=4)).map(|_| {
        let mut xpow = vec![0u32; n];
        let mut ypow = vec![0u32; ell];
        for _ in 0..rng.gen_range(0..=3) {
            let slot = rng.gen_range(0..n + ell);
            if slot < n {
                xpow[slot] += 1;
            } else {
                ypow[slot - n] += 1;
            }
        }
        let mut c = rng.gen_range(-5..=5i64);
        if c == 0 {
            c = 1;
        }
        ExpMonomial {
            coeff: q(c, rng.gen_range(1..=4)),
            xpow,
            ypow,
        }
    });
    ExpPolynomial::from_terms(shape, terms).expect("well-shaped terms")
}

// 4. Formal Jacobians against central differences.
fn jacobian_matches_differences() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let h = q(1, 10_000_000);
    let mut worst = 0f64;
    for _ in 0..100 {
        let n = rng.gen_range(1..=3usize);
        let ell = rng.gen_range(0..=n);
        let shape = Shape::new(ell, n).unwrap();
        let eqs: Vec<ExpPolynomial> = (0..n).map(|_| random_poly(&mut rng, shape)).collect();
        let sys = KhovanskiiSystem::new(shape, eqs).map_err(|e| e.to_string())?;
        let pt: Vec<Q> = (0..n)
            .map(|i| if i < ell { q(rng.gen_range(-899..=899), 1000) } else { q(rng.gen_range(-5000..=5000), 1000) })
            .collect();
        let b = IntervalBox::from_rationals(&pt, 300);
        for i in 0..n {
            for j in 0..n {
                let formal = sys.jacobian()[i][j].evaluate(&b, 256).map_err(|e| e.to_string())?;
                let exact = formal.midpoint().to_rational();
                let mut up = pt.clone();
                let mut down = pt.clone();
                up[j] += &h;
                down[j] -= &h;
                let p = &sys.equations()[i];
                let fd = (eval_poly_q(p, &up) - eval_poly_q(p, &down)) / (qi(2) * &h);
                let scale = exact.abs().max(Q::one());
                let rel = to_f64(&((fd - &exact).abs() / scale));
                worst = worst.max(rel);
                if rel > 1e-6 {
                    return Err(format!("{} at {:?}: entry ({i},{j}) relative error {rel:.3e}", sys, pt));
                }
            }
        }
    }
    Ok(format!("worst relative error {worst:.2e}"))
}

fn random_univariate(rng: &mut ChaCha8Rng) -> UPoly {
    loop {
        let deg = rng.gen_range(1..=6usize);
        let mut c: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-6..=6)).collect();
        if c[deg] == 0 {
            c[deg] = 1;
        }
        let p = UPoly::from_ints(&c);
        if p.is_squarefree() && !p.eval(&qi(8)).is_zero() && !p.eval(&qi(-8)).is_zero() {
            return p;
        }
    }
}

fn upoly_text(p: &UPoly) -> String {
    let parts: Vec<String> = p.0.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| format!("({c}) * x1^{i}")).collect();
    parts.join(" + ")
}

// 5. Certified roots agree with Sturm isolation.
fn sturm_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cfg = SearchConfig {
        workers: 4,
        ..SearchConfig::default()
    };
    let region = IntervalBox::new(vec![Interval::from_i64_pair(-8, 8)]);
    let mut roots = 0;
    for _ in 0..50 {
        let p = random_univariate(&mut rng);
        let sys = KhovanskiiSystem::parse(&format!("shape: 0 1\n{}", upoly_text(&p))).map_err(|e| e.to_string())?;
        let r = solve_square(&sys, &region, &cfg).map_err(|e| e.to_string())?;
        let expected = sturm_count(&p, &qi(-8), &qi(8));
        if r.status == Status::Unknown || r.certificates.len() != expected {
            return Err(format!("{sys}: {} certificates, status {}, Sturm count {expected}", r.certificates.len(), r.status));
        }
        let encl: Vec<(Q, Q)> = r.certificates.iter().map(|c| iv_q(c.zero_enclosure().coord(0))).collect();
        for (k, (lo, hi)) in encl.iter().enumerate() {
            if sturm_count(&p, lo, hi) != 1 {
                return Err(format!("{sys}: enclosure [{lo}, {hi}] does not isolate one root"));
            }
            if encl[..k].iter().any(|(a, b)| !(hi < a || b < lo)) {
                return Err(format!("{sys}: overlapping enclosures"));
            }
        }
        roots += expected;
    }
    Ok(format!("{roots} roots over 50 polynomials"))
}

const VARS: [&str; 3] = ["x", "y", "z"];

fn random_term(rng: &mut ChaCha8Rng, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..3) {
            0 => VARS[rng.gen_range(0..3)].to_string(),
            1 => format!("E({})", VARS[rng.gen_range(0..3)]),
            _ => format!("{}/{}", rng.gen_range(-4..=4), rng.gen_range(1..=3)),
        };
    }
    let a = random_term(rng, depth - 1);
    let b = random_term(rng, depth - 1);
    let op = ["+", "-", "*"][rng.gen_range(0..3)];
    format!("({a} {op} {b})")
}

fn random_formula(rng: &mut ChaCha8Rng, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.4) {
        let op = ["=", "!=", "<", "<=", ">", ">="][rng.gen_range(0..6)];
        return format!("{} {op} {}", random_term(rng, 2), random_term(rng, 2));
    }
    let a = random_formula(rng, depth - 1);
    let b = random_formula(rng, depth - 1);
    let c = if rng.gen_bool(0.5) { "&" } else { "|" };
    if rng.gen_bool(0.2) {
        format!("!({a}) {c} ({b})")
    } else {
        format!("({a}) {c} ({b})")
    }
}

/// Rational in `[-2, 2]` at least 1/16 away from ±1.
fn random_coordinate(rng: &mut ChaCha8Rng) -> Q {
    loop {
        let d = rng.gen_range(1..=16i64);
        let x = q(rng.gen_range(-2 * d..=2 * d), d);
        if (x.abs() - Q::one()).abs() >= q(1, 16) {
            return x;
        }
    }
}

// 6. The split into complexity-ℓ disjuncts preserves truth.
fn normalization_semantics() -> Outcome {
    let worked = parse_formula("x + y > 2 & E(x) = z").map_err(|e| e.to_string())?;
    let d = normalize_complexity(&worked).map_err(|e| e.to_string())?;
    let texts: Vec<String> = d.iter().map(|d| d.to_string()).collect();
    let want = ["-1 < x < 1 & x + y > 2 & E(x) = z", "(x <= -1 | x >= 1) & x + y > 2 & 0 = z"];
    if texts != want {
        return Err(format!("worked split came out as {texts:?}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut disjuncts = 0;
    for _ in 0..200 {
        let text = random_formula(&mut rng, 2);
        let f = parse_formula(&text).map_err(|e| format!("{text}: {e}"))?;
        let ds = normalize_complexity(&f).map_err(|e| format!("{text}: {e}"))?;
        disjuncts += ds.len();
        for _ in 0..50 {
            let point: BTreeMap<&str, Q> = VARS.iter().map(|v| (*v, random_coordinate(&mut rng))).collect();
            let env = |v: &str| point[v].clone();
            let direct = oracle_holds(&f.body, &env);
            let mut any_true = false;
            let mut all_false = true;
            for d in &ds {
                let at: Vec<Q> = d.vars.iter().map(|v| point[v.as_str()].clone()).collect();
                match d.holds_at(&at).map_err(|e| e.to_string())? {
                    Some(true) => {
                        any_true = true;
                        all_false = false;
                    }
                    Some(false) => {}
                    None => all_false = false,
                }
            }
            let split = if any_true {
                Some(true)
            } else if all_false {
                Some(false)
            } else {
                None
            };
            if split != Some(direct) {
                return Err(format!("{text} at {point:?}: direct {direct}, disjunction {split:?}"));
            }
        }
    }
    Ok(format!("10000 evaluations over {disjuncts} disjuncts"))
}

// 7. Eliminating the dependence x1 = 2 x2.
fn elimination_round_trip() -> Outcome {
    let (s, c) = certify_text("shape: 2 2\n2*x2 - x1\nE(x1) - 2", "[[0.6, 0.8], [0.3, 0.4]]")?;
    let rel: DependenceRelation = "2;1;0".parse().map_err(|e: kkit::algebra::AlgebraError| e.to_string())?;
    let r = eliminate_dependence(&s, &rel, &c, Budget::default()).map_err(|e| e.to_string())?;
    if r.system.equations().len() != 1 {
        return Err(format!("reduced to {} equations", r.system.equations().len()));
    }
    let half_ln2 = ln_q(&qi(2), 256) / qi(2);
    let z = r.certificate.zero_enclosure();
    if !within(z.coord(0), &half_ln2, &q(1, 10_000_000_000)) {
        return Err(format!("X1 enclosure {z} misses ln 2 / 2"));
    }
    if !check_certificate(&r.certificate) {
        return Err("reduced certificate does not re-verify".into());
    }
    let lifted = r.lift_box(z, 128);
    if !lifted.is_subset(&c.region) {
        return Err(format!("lifted box {lifted} leaves {}", c.region));
    }
    Ok(format!("reduced system {}", r.system.equations()[0]))
}

// 8. Augmented system for E(x1) - 2.
fn augmentation() -> Outcome {
    let (s, c) = certify_text("E(x1) - 2", "[0.6, 0.8]")?;
    let aug = regularize_augment(&s, 0).map_err(|e| e.to_string())?;
    let ext = aug.certify_extension(&c, Budget::default()).map_err(|e| e.to_string())?;
    let (lo, hi) = iv_q(ext.zero_enclosure().coord(1));
    // 1/sqrt(2) lies in [lo, hi] and within 1e-10 of both ends, decided by squaring
    let tol = q(1, 10_000_000_000);
    let half = q(1, 2);
    let sq = |x: &Q| x * x;
    let ok = lo.is_positive()
        && sq(&lo) <= half
        && half <= sq(&hi)
        && sq(&(&lo + &tol)) >= half
        && sq(&(&hi - &tol)) <= half;
    if !ok {
        return Err(format!("x2 enclosure [{lo}, {hi}] misses 1/sqrt(2)"));
    }
    if !ext.zero_enclosure().project(&[0]).is_subset(&c.region) {
        return Err("projection leaves the original certificate box".into());
    }
    if !check_certificate(&ext) {
        return Err("extended certificate does not re-verify".into());
    }
    Ok(format!("extended shape ({}, {})", aug.system.ell(), aug.system.n()))
}

fn scratch_dir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("kkit-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn kkit(args: &[&str]) -> Result<(i32, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_kkit")).args(args).output().map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned()))
}

fn check_in_fresh_process(dir: &std::path::Path, name: &str, cert: &serde_json::Value) -> Result<bool, String> {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(cert).unwrap()).map_err(|e| e.to_string())?;
    let (code, out) = kkit(&["check", "--cert", path.to_str().unwrap()])?;
    Ok(code == 0 && out.trim() == "valid")
}

fn negate_pair(v: &mut serde_json::Value) {
    let lo: Dyadic = v[0].as_str().unwrap().parse().unwrap();
    let hi: Dyadic = v[1].as_str().unwrap().parse().unwrap();
    *v = serde_json::json!([hi.neg(), lo.neg()]);
}

/// The box scaled by 10 about its midpoint.
fn widen(cert: &mut serde_json::Value) {
    for c in cert["box"].as_array_mut().unwrap() {
        let lo: Dyadic = c[0].as_str().unwrap().parse().unwrap();
        let hi: Dyadic = c[1].as_str().unwrap().parse().unwrap();
        let mid = lo.add(&hi).half();
        let r = hi.sub(&lo).mul(&Dyadic::from_i64(5));
        *c = serde_json::json!([mid.sub(&r), mid.add(&r)]);
    }
}

/// Linear systems keep contracting on any box, so widening proves nothing
/// about them.
fn is_linear(system_text: &str) -> bool {
    let s = KhovanskiiSystem::parse(system_text).unwrap();
    s.equations().iter().all(|p| p.is_pure_polynomial() && p.degree() <= 1)
}

// 9. Certificates re-verify in a separate process; mutated ones do not.
fn certificate_audit() -> Outcome {
    let dir = scratch_dir();
    let systems = [
        ("E(x1) - 2", "[0.6, 0.8]"),
        ("x1 * E(x1) - 1", "[0.5, 0.6]"),
        ("x1^2 + x2^2 - 1; x1 - x2", "[[0.6, 0.8], [0.6, 0.8]]"),
        ("shape: 2 2\nE(x1) + E(x2) - 3\nx1 - x2^2", "[[0.2, 0.35], [0.45, 0.6]]"),
        ("x1^3 - 2", "[1.2, 1.3]"),
        ("shape: 1 2\nx2 - E(x1)\nx1^2 + x2^2 - 2", "[[0.2, 0.45], [1.2, 1.6]]"),
    ];
    let mut certs = Vec::new();
    for (k, (sys, b)) in systems.iter().enumerate() {
        let path = dir.join(format!("sys{k}.txt"));
        std::fs::write(&path, sys).unwrap();
        let (code, out) = kkit(&["certify", "--system", path.to_str().unwrap(), "--box", b])?;
        if code != 0 {
            return Err(format!("certify failed on {sys:?} with exit code {code}"));
        }
        certs.push(serde_json::from_str::<serde_json::Value>(&out).map_err(|e| e.to_string())?);
    }
    for (k, f) in ["E(x) = 2 & x > 0", "x^2 + y^2 = 1 & x = y & x > 0", "x * E(x) = 1", "x > 1/2 & x < 3/4"].iter().enumerate() {
        let path = dir.join(format!("f{k}.txt"));
        std::fs::write(&path, f).unwrap();
        let (_, out) = kkit(&["solve", "--formula", path.to_str().unwrap(), "--workers", "2"])?;
        let v: serde_json::Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
        for d in v["disjuncts"].as_array().unwrap() {
            let c = &d["witness"]["certificate"];
            if c.is_object() {
                certs.push(c.clone());
            }
        }
    }
    let (mut passed, mut mutants) = (0, 0);
    for (k, c) in certs.iter().enumerate() {
        if !check_in_fresh_process(&dir, &format!("c{k}.json"), c)? {
            return Err(format!("certificate {k} rejected:\n{c}"));
        }
        passed += 1;
        let mut flipped = c.clone();
        let entries = flipped["jacobian"]["entries"].as_array_mut().unwrap();
        let entry = entries
            .iter_mut()
            .flat_map(|r| r.as_array_mut().unwrap().iter_mut())
            .find(|e| e[0] != "0*2^0" || e[1] != "0*2^0");
        if let Some(e) = entry {
            negate_pair(e);
            if check_in_fresh_process(&dir, &format!("c{k}-flip.json"), &flipped)? {
                return Err(format!("sign-flipped certificate {k} accepted"));
            }
            mutants += 1;
        }
        if !is_linear(c["system"].as_str().unwrap()) {
            let mut wide = c.clone();
            widen(&mut wide);
            if check_in_fresh_process(&dir, &format!("c{k}-wide.json"), &wide)? {
                return Err(format!("widened certificate {k} accepted"));
            }
            mutants += 1;
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{passed} certificates valid, {mutants} mutants rejected"))
}

const CORPUS: [&str; 10] = [
    "x + y > 2 & E(x) = z",
    "E(x) = 2",
    "x * E(x) = 1",
    "x^2 + y^2 = 1 & x = y",
    "E(E(x)) = 2",
    "E(x) = x",
    "x^2 < 2 & x > 1",
    "E(x) + E(y) = 3 & x = y^2",
    "x^3 - 2*x + 1 = 0 | E(x) < 1/2",
    "x * y = 1 & E(x) > y",
];

// 10. Reports do not depend on the worker count.
fn determinism() -> Outcome {
    let mut statuses = Vec::new();
    for f in CORPUS {
        let qf = parse_formula(f).map_err(|e| e.to_string())?;
        let mut reports = Vec::new();
        for workers in [1, 4, 8] {
            let cfg = SearchConfig {
                workers,
                ..SearchConfig::default()
            };
            let r = solve_formula(&qf, &cfg).map_err(|e| e.to_string())?;
            if workers == 1 {
                statuses.push(r.status.to_string());
            }
            reports.push(serde_json::to_string_pretty(&r.to_json_value(&cfg)).unwrap());
        }
        if reports[0] != reports[1] || reports[0] != reports[2] {
            return Err(format!("{f}: reports differ between worker counts"));
        }
    }
    Ok(format!("statuses {}", statuses.join(" ")))
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 10] = [
        (1, "Exp(-1) bracketing", Duration::from_secs(1), exp_minus_one_brackets),
        (2, "growth inequalities", Duration::from_secs(5), growth_inequalities),
        (3, "certified constants", Duration::from_secs(4), certified_constants),
        (4, "Jacobian correctness", Duration::from_secs(30), jacobian_matches_differences),
        (5, "Sturm oracle equivalence", Duration::from_secs(60), sturm_equivalence),
        (6, "normalization semantics", Duration::from_secs(120), normalization_semantics),
        (7, "dependence elimination", Duration::from_secs(2), elimination_round_trip),
        (8, "augmentation", Duration::from_secs(2), augmentation),
        (9, "certificate audit", Duration::from_secs(30), certificate_audit),
        (10, "determinism", Duration::from_secs(120), determinism),
    ];
    let only: Option<u32> = std::env::var("KKIT_CRITERION").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (n, name, limit, run) in criteria {
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let t = Instant::now();
        let res = run();
        let el = t.elapsed();
        let res = match res {
            Ok(m) if el > limit => Err(format!("{m}; took {el:.2?}, limit {limit:?}")),
            r => r,
        };
        match res {
            Ok(m) => println!("criterion {n} ({name}): PASS [{el:.2?}] {m}"),
            Err(m) => {
                failed += 1;
                println!("criterion {n} ({name}): FAIL [{el:.2?}] {m}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
