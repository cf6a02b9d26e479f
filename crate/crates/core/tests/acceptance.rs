//! Acceptance criteria, one printed PASS/FAIL line each. Runs without the
//! libtest harness so the lines always reach the output.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dyndeg::cli::commands::cmd_degrees;
use dyndeg::cli::job::{JobSpec, Overrides};
use dyndeg::cli::report::Report;
use dyndeg::cli::suite::{draw_matrices, Draw};
use dyndeg::cohomology::{alpha, alpha_window, CohClass, Space};
use dyndeg::degrees::{
    distinct_consecutive, log_concavity, lower_bound_check, product_formula, DegreeProfile,
    DegreeSequence, Quantity, Verdict, ESTIMATE_TOL, ORACLE_TOL,
};
use dyndeg::matrix::IntMatrix;
use dyndeg::monomial::{compound, subsets, validate_fibration, MonomialMap};
use dyndeg::oracle::{leibniz_minor, pair_oracle, ring_expand_oracle, RingExpr};
use dyndeg::profile::{engine_profile, oracle_profile, rational_profile};
use dyndeg::rational::{fiber_degree, iterate_multidegrees, IterateOptions, Poly, RationalMapDesc};

const SEED: u64 = 20_240_601;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rows(a: &IntMatrix) -> String {
    format!("{:?}", a.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn big_draws() -> Vec<Draw> {
    draw_matrices(SEED, 150, 6).0
}

fn small_draws() -> Vec<Draw> {
    draw_matrices(SEED, 100, 4).0
}

fn splits(d: &Draw) -> Vec<usize> {
    (1..d.k).filter(|&l| validate_fibration(&d.matrix, l)).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn product_formula_oracle() -> Check {
    let draws = big_draws();
    let mut checked = 0;
    for d in &draws {
        for l in splits(d) {
            let o = oracle_profile(&d.matrix, Some(l)).map_err(|e| format!("{}: {e}", rows(&d.matrix)))?;
            let r = product_formula(&o, ORACLE_TOL).map_err(|e| e.to_string())?;
            ensure(r.verdict == Verdict::Pass && r.skipped.is_empty(), || {
                format!("{} l = {l}: {:?}", rows(&d.matrix), r.rows)
            })?;
            checked += 1;
        }
    }
    ensure(draws.len() >= 100, || "too few matrices".into())?;
    Ok(format!("{} matrices, {checked} splits, k <= 6, rel 1e-9", draws.len()))
}

fn engine_matches(e: &DegreeProfile, o: &DegreeProfile) -> (bool, Option<String>) {
    let mut all_reliable = true;
    for (fam, (ev, ov)) in [
        ("d(f)", (&e.degrees, &o.degrees)),
        ("d(g)", (&e.base, &o.base)),
        ("d(f|pi)", (&e.relative, &o.relative)),
    ] {
        for (p, (x, y)) in ev.iter().zip(ov.iter()).enumerate() {
            let (Some(x), Some(y)) = (x, y) else {
                return (false, Some(format!("{fam} p = {p} missing")));
            };
            if !x.is_reliable() {
                all_reliable = false;
            } else if rel(x.value, y.value) > ESTIMATE_TOL {
                return (false, Some(format!("{fam} p = {p}: {} vs {}", x.value, y.value)));
            }
        }
    }
    (all_reliable, None)
}

fn product_formula_engine() -> Check {
    let mut reproduced = 0;
    let draws = small_draws();
    for d in &draws {
        let f = MonomialMap::fibred(d.matrix.clone(), d.l).map_err(|e| e.to_string())?;
        let e = engine_profile(&f, 60, ESTIMATE_TOL).map_err(|e| e.to_string())?;
        let o = oracle_profile(&d.matrix, Some(d.l)).map_err(|e| e.to_string())?;
        let (full, mismatch) = engine_matches(&e.profile, &o);
        if let Some(m) = mismatch {
            return Err(format!("{}: {m}", rows(&d.matrix)));
        }
        let r = product_formula(&e.profile, ESTIMATE_TOL).map_err(|e| e.to_string())?;
        ensure(r.verdict != Verdict::Fail, || format!("{}: {:?}", rows(&d.matrix), r.rows))?;
        if full && r.verdict == Verdict::Pass {
            reproduced += 1;
        }
    }
    ensure(reproduced >= 25, || format!("only {reproduced} matrices fully reproduced"))?;
    Ok(format!(
        "{reproduced} of {} matrices (k <= 4) reproduced at N = 60; the rest have unconverged estimates",
        draws.len()
    ))
}

fn b_lambda_roots(f: &MonomialMap, p: u32, n: u32) -> Result<(f64, f64), String> {
    let lam = DegreeSequence::new(Quantity::Lambda { p }, f.lambda_values(p, n).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let b = DegreeSequence::new(Quantity::B { p }, f.b_values(p, n).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    Ok((b.root_at(n as usize), lam.root_at(n as usize)))
}

fn b_convergence() -> Check {
    // worked instance: lambda_1(n) = 2 * 3^n, b_1(n) = 3^{n+1}
    let f = MonomialMap::fibred(IntMatrix::from_rows(&[vec![2i64, 0], vec![1, 3]]).unwrap(), 1).unwrap();
    let lam = f.lambda_values(1, 40).map_err(|e| e.to_string())?;
    let b = f.b_values(1, 40).map_err(|e| e.to_string())?;
    for n in 0..=40u32 {
        let three = num_traits::pow(BigInt::from(3), n as usize);
        ensure(lam[n as usize] == BigInt::from(2) * &three && b[n as usize] == three * 3, || {
            format!("closed form breaks at n = {n}")
        })?;
    }
    let (x, y) = b_lambda_roots(&f, 1, 40)?;
    ensure((x - y).abs() < ESTIMATE_TOL, || format!("worked instance gap {}", (x - y).abs()))?;

    let mut failures = Vec::new();
    let mut total = 0;
    let mut worst_rel: f64 = 0.0;
    for d in &small_draws() {
        let f = MonomialMap::fibred(d.matrix.clone(), d.l).map_err(|e| e.to_string())?;
        for p in 0..=d.k as u32 {
            let (x, y) = b_lambda_roots(&f, p, 40)?;
            total += 1;
            worst_rel = worst_rel.max(rel(x, y));
            if (x - y).abs() >= ESTIMATE_TOL {
                failures.push((x - y).abs());
            }
        }
    }
    let worst = failures.iter().copied().fold(0.0, f64::max);
    // The absolute gap scales like d_p ln(b_p / lambda_p) / N; the relative gap is
    // reported alongside for context.
    ensure(failures.is_empty(), || {
        format!(
            "|b^(1/N) - lambda^(1/N)| >= 5e-2 at N = 40 for {} of {total} (matrix, p) pairs, worst {worst:.3}; largest relative gap {worst_rel:.4}",
            failures.len()
        )
    })?;
    Ok(format!("{total} (matrix, p) pairs at N = 40"))
}

fn a_pp_identity() -> Check {
    let mut checked = 0;
    for d in &big_draws() {
        for l in splits(d) {
            let f = MonomialMap::fibred(d.matrix.clone(), l).map_err(|e| e.to_string())?;
            for p in 0..=(d.k - l) as u32 {
                let a = f.a_values(p, p, 20).map_err(|e| e.to_string())?;
                let r = f.relative_values(p, 20).map_err(|e| e.to_string())?;
                ensure(a == r, || format!("{} l = {l} p = {p}", rows(&d.matrix)))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (map, p) sequences, n <= 20, exact"))
}

fn log_concavity_check() -> Check {
    let mut oracle_profiles = 0;
    for d in &big_draws() {
        let o = oracle_profile(&d.matrix, None).map_err(|e| e.to_string())?;
        let r = log_concavity(&o, ORACLE_TOL).map_err(|e| e.to_string())?;
        ensure(r.verdict == Verdict::Pass, || format!("oracle {}: p {:?}", rows(&d.matrix), r.failing))?;
        oracle_profiles += 1;
    }
    let (mut pass, mut inconclusive) = (0, 0);
    for d in &small_draws() {
        let f = MonomialMap::fibred(d.matrix.clone(), d.l).map_err(|e| e.to_string())?;
        let e = engine_profile(&f, 60, ESTIMATE_TOL).map_err(|e| e.to_string())?;
        let r = log_concavity(&e.profile, ESTIMATE_TOL).map_err(|e| e.to_string())?;
        match r.verdict {
            Verdict::Pass => pass += 1,
            Verdict::Inconclusive => inconclusive += 1,
            Verdict::Fail => return Err(format!("engine {}: p {:?}", rows(&d.matrix), r.failing)),
        }
    }
    Ok(format!(
        "{oracle_profiles} oracle profiles; engine profiles {pass} pass, {inconclusive} unconverged"
    ))
}

fn endpoints() -> Check {
    let mut checked = 0;
    for d in big_draws().iter().chain(&small_draws()) {
        let f = MonomialMap::new(d.matrix.clone()).map_err(|e| e.to_string())?;
        let k = d.k;
        let all: Vec<usize> = (0..k).collect();
        let det = leibniz_minor(&d.matrix, &all, &all).abs();
        let fact: BigInt = (1..=k).map(BigInt::from).product();
        let l0 = f.lambda_values(0, 20).map_err(|e| e.to_string())?;
        let lk = f.lambda_values(k as u32, 20).map_err(|e| e.to_string())?;
        for n in 0..=20 {
            ensure(l0[n] == fact, || format!("{} lambda_0({n})", rows(&d.matrix)))?;
            ensure(lk[n] == &fact * num_traits::pow(det.clone(), n), || {
                format!("{} lambda_k({n})", rows(&d.matrix))
            })?;
        }
        let e = engine_profile(&f, 20, ESTIMATE_TOL).map_err(|e| e.to_string())?;
        ensure(e.profile.degrees[0].map(|x| x.value) == Some(1.0), || "d_0 != 1".into())?;
        checked += 1;
    }
    Ok(format!("{checked} maps, n <= 20, exact"))
}

fn alpha_monotone() -> Check {
    let mut classes = 0;
    let mut draws = big_draws();
    draws.extend(small_draws());
    for d in &draws {
        for l in splits(d) {
            let f = MonomialMap::fibred(d.matrix.clone(), l).map_err(|e| e.to_string())?;
            for p in 0..=d.k as u32 {
                let (lo, hi) = alpha_window(f.space(), p).map_err(|e| e.to_string())?;
                for c in f.pullback_classes(p, 20).map_err(|e| e.to_string())? {
                    ensure(c.is_effective(), || "pullback class not effective".into())?;
                    for j in lo..hi {
                        let (x, y) = (alpha(&c, j), alpha(&c, j + 1));
                        ensure(matches!((&x, &y), (Ok(x), Ok(y)) if x <= y), || {
                            format!("{} l = {l} p = {p} j = {j}: {x:?} > {y:?}", rows(&d.matrix))
                        })?;
                    }
                    classes += 1;
                }
            }
        }
    }
    Ok(format!("{classes} effective pullback classes, n <= 20"))
}

fn poly(nvars: usize, terms: &[(&[u32], i64)]) -> Poly {
    Poly::from_terms(nvars, terms.iter().map(|(e, c)| (e.to_vec(), BigInt::from(*c))))
}

fn rational_classics() -> Check {
    let err = |e: dyndeg::rational::RationalError| e.to_string();
    let cremona = RationalMapDesc::new(
        Space::new(vec![2]).map_err(|e| e.to_string())?,
        vec![vec![
            poly(3, &[(&[0, 1, 1], 1)]),
            poly(3, &[(&[1, 0, 1], 1)]),
            poly(3, &[(&[1, 1, 0], 1)]),
        ]],
    )
    .map_err(err)?;
    let it = iterate_multidegrees(&cremona, 8, &IterateOptions::default()).map_err(err)?;
    let row: Vec<u32> = it.multidegrees.iter().map(|m| m[0][0]).collect();
    ensure(row == [2, 1, 2, 1, 2, 1, 2, 1], || format!("Cremona row {row:?}"))?;
    for n in [2, 4, 6, 8] {
        let r = rational_profile(&cremona, n, &IterateOptions::default(), ESTIMATE_TOL).map_err(|e| e.to_string())?;
        let d1 = r.profile.degrees[1].map(|d| d.value);
        ensure(d1 == Some(1.0), || format!("Cremona d_1 at N = {n}: {d1:?}"))?;
    }

    let p1 = Space::new(vec![1]).map_err(|e| e.to_string())?;
    let maps = [
        (2u32, vec![poly(2, &[(&[2, 0], 1)]), poly(2, &[(&[1, 1], 1), (&[0, 2], 1)])]),
        (3, vec![poly(2, &[(&[3, 0], 1), (&[0, 3], 1)]), poly(2, &[(&[1, 2], 1)])]),
    ];
    for (deg, comps) in maps {
        let g = RationalMapDesc::new(p1.clone(), vec![comps]).map_err(err)?;
        let it = iterate_multidegrees(&g, 5, &IterateOptions::default()).map_err(err)?;
        for n in 1..=5 {
            let got = it.multidegrees[n - 1][0][0];
            ensure(got == deg.pow(n as u32), || format!("deg {deg}: n = {n} gives {got}"))?;
        }
    }

    let skew = RationalMapDesc::new(
        Space::fibred(vec![1, 1], 1).map_err(|e| e.to_string())?,
        vec![
            vec![poly(4, &[(&[3, 0, 0, 0], 1)]), poly(4, &[(&[0, 3, 0, 0], 1)])],
            vec![poly(4, &[(&[1, 0, 2, 0], 1)]), poly(4, &[(&[1, 0, 0, 2], 1), (&[0, 1, 2, 0], 1)])],
        ],
    )
    .map_err(err)?;
    let opts = IterateOptions { degree_cap: 4000 };
    let it = iterate_multidegrees(&skew, 2, &opts).map_err(err)?;
    ensure(it.lambda[1] == BigInt::from(6) && it.lambda[2] == BigInt::from(16), || {
        format!("skew lambda_1 {:?}", it.lambda)
    })?;
    for n in 1..=5u32 {
        let fd = fiber_degree(&skew, n).map_err(err)?;
        ensure(fd == BigInt::one() << n, || format!("fiber degree at n = {n}: {fd}"))?;
    }
    let r = rational_profile(&skew, 7, &opts, ESTIMATE_TOL).map_err(|e| e.to_string())?;
    ensure(!r.iterates.truncated, || "skew iteration truncated".into())?;
    let lb = lower_bound_check(&r.profile, ESTIMATE_TOL).map_err(|e| e.to_string())?;
    let pf = product_formula(&r.profile, ESTIMATE_TOL).map_err(|e| e.to_string())?;
    let d1 = r.profile.degrees[1].map_or(f64::NAN, |d| d.value);
    ensure(lb.verdict == Verdict::Pass && pf.verdict == Verdict::Pass, || {
        format!("skew checks {} / {}", lb.verdict, pf.verdict)
    })?;
    ensure(rel(d1, 3.0) <= ESTIMATE_TOL, || format!("skew d_1 = {d1}"))?;
    Ok(format!("Cremona 2,1,...; P^1 degrees 2^n, 3^n; skew 6, 16, fiber 2^n, d_1 = {d1:.4} at N = 7"))
}

fn distinct_implication() -> Check {
    let (mut profiles, mut distinct) = (0, 0);
    for d in big_draws().iter().chain(&small_draws()) {
        for l in splits(d) {
            let o = oracle_profile(&d.matrix, Some(l)).map_err(|e| e.to_string())?;
            let r = distinct_consecutive(&o, ESTIMATE_TOL).map_err(|e| e.to_string())?;
            ensure(r.verdict == Verdict::Pass, || format!("{} l = {l}: {r:?}", rows(&d.matrix)))?;
            profiles += 1;
            distinct += usize::from(r.f_distinct);
        }
    }
    for d in &small_draws() {
        let f = MonomialMap::fibred(d.matrix.clone(), d.l).map_err(|e| e.to_string())?;
        let e = engine_profile(&f, 60, ESTIMATE_TOL).map_err(|e| e.to_string())?;
        let r = distinct_consecutive(&e.profile, ESTIMATE_TOL).map_err(|e| e.to_string())?;
        ensure(r.verdict != Verdict::Fail, || format!("engine {}: {r:?}", rows(&d.matrix)))?;
    }
    Ok(format!("{profiles} oracle profiles ({distinct} with distinct d(f)), zero counterexamples"))
}

fn random_matrix(rng: &mut ChaCha8Rng, k: usize) -> IntMatrix {
    let rows: Vec<Vec<i64>> = (0..k).map(|_| (0..k).map(|_| rng.gen_range(-5..=5)).collect()).collect();
    IntMatrix::from_rows(&rows).unwrap()
}

fn compositions(total: u32) -> Vec<Vec<u32>> {
    if total == 0 {
        return vec![Vec::new()];
    }
    (1..=total)
        .flat_map(|first| {
            compositions(total - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn random_class(rng: &mut ChaCha8Rng, space: &Space, degree: u32) -> CohClass {
    let m = space.num_factors();
    let mut terms = Vec::new();
    for _ in 0..3 {
        let mut e = vec![0u32; m];
        let mut left = degree;
        let mut guard = 0;
        while left > 0 && guard < 100 {
            let i = rng.gen_range(0..m);
            if e[i] < space.factors()[i] {
                e[i] += 1;
                left -= 1;
            }
            guard += 1;
        }
        if left == 0 {
            terms.push((e, BigInt::from(rng.gen_range(-4i64..=4))));
        }
    }
    CohClass::from_terms(space, degree, terms).unwrap()
}

fn determinism() -> Result<(), String> {
    let bin = env!("CARGO_BIN_EXE_dyndeg");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let jobs = [
        ("monomial.json", r#"{"type": "monomial", "matrix": [[2, 0, 0], [1, 3, 1], [0, -1, 2]], "fibration_dim": 1}"#),
        ("rational.json", r#"{"type": "rational", "factors": [2], "n_max": 6, "components": [[
            {"coeffs": [[[0, 1, 1], 1]]}, {"coeffs": [[[1, 0, 1], 1]]}, {"coeffs": [[[1, 1, 0], 1]]}]]}"#),
        ("suite.json", r#"{"suite_size": 30, "max_k": 4, "seed": 11}"#),
    ];
    for (name, text) in jobs {
        let path = dir.path().join(name);
        std::fs::write(&path, text).map_err(|e| e.to_string())?;
        let cmds: &[&str] = if name == "suite.json" { &["suite"] } else { &["degrees", "sequence", "verify-product"] };
        for cmd in cmds {
            if name == "rational.json" && *cmd == "verify-product" {
                continue;
            }
            let run = || {
                Command::new(bin)
                    .args([cmd, "--format", "json", "--input"])
                    .arg(&path)
                    .output()
                    .map_err(|e| e.to_string())
            };
            let (a, b) = (run()?, run()?);
            ensure(a.status.success(), || format!("{cmd} {name}: {}", String::from_utf8_lossy(&a.stderr)))?;
            ensure(a.stdout == b.stdout, || format!("{cmd} {name}: reports differ"))?;
            let parsed: Report = serde_json::from_slice(&a.stdout).map_err(|e| e.to_string())?;
            let again = serde_json::to_string_pretty(&parsed).map_err(|e| e.to_string())? + "\n";
            ensure(again.as_bytes() == a.stdout, || format!("{cmd} {name}: round trip changed bytes"))?;
        }
    }
    let job = JobSpec::parse(jobs[0].1).unwrap().validate(&Overrides::default()).unwrap();
    ensure(cmd_degrees(&job) == cmd_degrees(&job), || "in-process reports differ".into())
}

fn infrastructure() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for pair in 0..100 {
        let k = 2 + pair % 4;
        let (a, b) = (random_matrix(&mut rng, k), random_matrix(&mut rng, k));
        let ab = a.mul(&b).unwrap();
        for p in 1..=k as u32 {
            let c = |m: &IntMatrix| compound(m, p).unwrap().matrix;
            ensure(c(&a).mul(&c(&b)).unwrap() == c(&ab), || format!("Cauchy-Binet pair {pair} p = {p}"))?;
            let subs = subsets(k, p as usize);
            let ca = c(&a);
            for (i, s) in subs.iter().enumerate() {
                for (j, t) in subs.iter().enumerate() {
                    ensure(*ca.get(i, j) == leibniz_minor(&a, s, t), || {
                        format!("compound entry ({i}, {j}) of pair {pair} p = {p}")
                    })?;
                }
            }
        }
    }

    let mut spaces = 0;
    for k in 1..=6 {
        for factors in compositions(k) {
            let space = Space::new(factors).map_err(|e| e.to_string())?;
            for p in 0..=k {
                for q in 0..=k - p {
                    let (x, y) = (random_class(&mut rng, &space, p), random_class(&mut rng, &space, q));
                    let expr = RingExpr::from_class(&x).times(&RingExpr::from_class(&y));
                    let want = ring_expand_oracle(&space, p + q, &expr).map_err(|e| e.to_string())?;
                    ensure(x.mul(&y).unwrap() == want, || format!("mul on {space} ({p}, {q})"))?;
                    if p + q == k {
                        ensure(x.pair(&y).unwrap() == pair_oracle(&x, &y).unwrap(), || {
                            format!("pair on {space}")
                        })?;
                    }
                    let sum = x.add(&random_class(&mut rng, &space, p)).unwrap();
                    ensure(!sum.is_zero() || sum.terms().next().is_none(), || "zero class keeps terms".into())?;
                }
            }
            spaces += 1;
        }
    }
    determinism()?;
    Ok(format!(
        "100 Cauchy-Binet pairs; ring ops on {spaces} spaces (k <= 6) match expansion; byte-identical reports"
    ))
}

fn main() {
    type Criterion = (&'static str, fn() -> Check);
    let criteria: [Criterion; 10] = [
        ("product formula, eigenvalue oracle", product_formula_oracle),
        ("product formula, monomial engine", product_formula_engine),
        ("b_p roots approach lambda_p roots", b_convergence),
        ("a_pp equals relative degree", a_pp_identity),
        ("log-concavity", log_concavity_check),
        ("endpoint degrees", endpoints),
        ("alpha monotonicity", alpha_monotone),
        ("rational engine classics", rational_classics),
        ("distinct degrees pass to base and fiber", distinct_implication),
        ("infrastructure identities", infrastructure),
    ];
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(ToString::to_string))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {title}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {title}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
