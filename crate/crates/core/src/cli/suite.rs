//! Seeded randomized checks over block lower-triangular integer matrices.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::job::SuiteJob;
use super::report::{PropertyCount, Report, SuiteReport};
use crate::cohomology::{alpha, alpha_window};
use crate::degrees::{
    distinct_consecutive, log_concavity, product_formula, DegreeProfile, Quantity, Verdict,
    ESTIMATE_TOL, ORACLE_TOL,
};
use crate::matrix::IntMatrix;
use crate::monomial::{compound, MonomialMap};
use crate::oracle::{abs_det, compound_vs_minors};
use crate::profile::{engine_profile, oracle_profile, EngineProfile};

pub const ENTRY_BOUND: i64 = 5;
/// Exact identities are checked for `n` up to this bound.
pub const EXACT_N: u32 = 20;
const ALPHA_N: u32 = 10;

pub const PROPERTIES: [&str; 12] = [
    "oracle_product_formula",
    "oracle_log_concavity",
    "top_degree_is_abs_det",
    "cauchy_binet",
    "compound_matches_minors",
    "a_pp_equals_relative",
    "alpha_monotonicity",
    "b_root_agreement",
    "distinct_degrees_implication",
    "engine_matches_oracle",
    "engine_product_formula",
    "engine_log_concavity",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Draw {
    pub index: usize,
    pub k: usize,
    pub l: usize,
    /// Nonsingular, block lower-triangular over the first `l` coordinates.
    pub matrix: IntMatrix,
    /// Unconstrained partner for the Cauchy-Binet check.
    pub partner: IntMatrix,
}

fn random_matrix(rng: &mut ChaCha8Rng, k: usize, l: Option<usize>) -> IntMatrix {
    let mut a = IntMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            if l.is_some_and(|l| i < l && j >= l) {
                continue;
            }
            a.set(i, j, BigInt::from(rng.gen_range(-ENTRY_BOUND..=ENTRY_BOUND)));
        }
    }
    a
}

pub fn matrix_text(a: &IntMatrix) -> String {
    let rows: Vec<String> = a
        .to_rows()
        .iter()
        .map(|r| {
            let v: Vec<String> = r.iter().map(ToString::to_string).collect();
            format!("[{}]", v.join(","))
        })
        .collect();
    format!("[{}]", rows.join(","))
}

/// `size` draws cycling through all `(k, l)` with `2 <= k <= max_k` and
/// `1 <= l < k`. Singular draws are replaced; the log records each one.
pub fn draw_matrices(seed: u64, size: usize, max_k: usize) -> (Vec<Draw>, Vec<String>) {
    let shapes: Vec<(usize, usize)> = (2..=max_k)
        .flat_map(|k| (1..k).map(move |l| (k, l)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log = Vec::new();
    let mut draws = Vec::with_capacity(size);
    for index in 0..size {
        let (k, l) = shapes[index % shapes.len()];
        let matrix = loop {
            let a = random_matrix(&mut rng, k, Some(l));
            if !a.det().map_or(true, |d| d.is_zero()) {
                break a;
            }
            log.push(format!("draw {index}: {} has det 0", matrix_text(&a)));
        };
        let partner = random_matrix(&mut rng, k, None);
        draws.push(Draw {
            index,
            k,
            l,
            matrix,
            partner,
        });
    }
    (draws, log)
}

struct Outcome {
    property: &'static str,
    verdict: Verdict,
    detail: String,
}

fn outcome(property: &'static str, verdict: Verdict, detail: impl Into<String>) -> Outcome {
    Outcome {
        property,
        verdict,
        detail: detail.into(),
    }
}

fn pass_or(property: &'static str, failure: Option<String>) -> Outcome {
    match failure {
        None => outcome(property, Verdict::Pass, ""),
        Some(d) => outcome(property, Verdict::Fail, d),
    }
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn cauchy_binet(d: &Draw) -> Option<String> {
    let ab = d.matrix.mul(&d.partner).ok()?;
    for p in 1..=d.k as u32 {
        let lhs = compound(&ab, p).ok()?.matrix;
        let ca = compound(&d.matrix, p).ok()?.matrix;
        let cb = compound(&d.partner, p).ok()?.matrix;
        if ca.mul(&cb).ok()? != lhs {
            return Some(format!("C_{p}(AB) differs from C_{p}(A) C_{p}(B)"));
        }
    }
    None
}

fn exact_checks(f: &MonomialMap, d: &Draw, n_max: u32, out: &mut Vec<Outcome>) {
    let k = d.k as u32;
    let l = d.l as u32;
    let n = n_max.min(EXACT_N);

    let mut fail = None;
    for p in 1..=k {
        match compound_vs_minors(&d.matrix, p, 2) {
            Ok(true) => {}
            Ok(false) => fail = Some(format!("p = {p}")),
            Err(e) => fail = Some(e.to_string()),
        }
    }
    out.push(pass_or("compound_matches_minors", fail));

    let mut fail = None;
    for p in 0..=k - l {
        let (a, r) = (f.a_values(p, p, n), f.relative_values(p, n));
        if a.is_err() || a != r {
            fail = Some(format!("p = {p}"));
        }
    }
    out.push(pass_or("a_pp_equals_relative", fail));

    let mut fail = None;
    'outer: for p in 0..=k {
        let Ok(classes) = f.pullback_classes(p, n_max.min(ALPHA_N)) else {
            fail = Some(format!("p = {p}: no pullback classes"));
            break;
        };
        for (m, c) in classes.iter().enumerate() {
            let Ok((lo, hi)) = alpha_window(f.space(), p) else { continue };
            for j in lo..hi {
                match (alpha(c, j), alpha(c, j + 1)) {
                    (Ok(x), Ok(y)) if x <= y => {}
                    _ => {
                        fail = Some(format!("p = {p}, n = {m}, j = {j}"));
                        break 'outer;
                    }
                }
            }
        }
    }
    out.push(pass_or("alpha_monotonicity", fail));
}

fn b_root_agreement(eng: &EngineProfile, k: u32, tol: f64) -> Outcome {
    let name = "b_root_agreement";
    let mut verdicts = Vec::new();
    let mut detail = String::new();
    for p in 0..=k {
        let (Some(b), Some(lam)) = (
            eng.sequence(Quantity::B { p }).and_then(|s| s.as_sequence()),
            eng.sequence(Quantity::Lambda { p }).and_then(|s| s.as_sequence()),
        ) else {
            verdicts.push(Verdict::Inconclusive);
            continue;
        };
        let n = lam.n_max();
        let settled = eng
            .sequence(Quantity::Lambda { p })
            .and_then(|s| s.estimate)
            .is_some_and(|e| e.converged);
        if n < 1 || !settled {
            verdicts.push(Verdict::Inconclusive);
            continue;
        }
        let (x, y) = (b.root_at(n), lam.root_at(n));
        if rel_gap(x, y) <= tol {
            verdicts.push(Verdict::Pass);
        } else {
            verdicts.push(Verdict::Fail);
            detail = format!("p = {p}: b^(1/N) = {x}, lambda^(1/N) = {y}");
        }
    }
    outcome(name, Verdict::combine(verdicts), detail)
}

fn compare_family(
    eng: &[Option<crate::degrees::Degree>],
    ora: &[Option<crate::degrees::Degree>],
    tol: f64,
    label: &str,
    verdicts: &mut Vec<Verdict>,
    detail: &mut String,
) {
    for (p, (e, o)) in eng.iter().zip(ora).enumerate() {
        let (Some(e), Some(o)) = (e, o) else {
            verdicts.push(Verdict::Inconclusive);
            continue;
        };
        if !e.is_reliable() {
            verdicts.push(Verdict::Inconclusive);
        } else if rel_gap(e.value, o.value) <= tol {
            verdicts.push(Verdict::Pass);
        } else {
            verdicts.push(Verdict::Fail);
            *detail = format!("{label} p = {p}: engine {} vs oracle {}", e.value, o.value);
        }
    }
}

fn engine_matches_oracle(eng: &DegreeProfile, ora: &DegreeProfile, tol: f64) -> Outcome {
    let mut verdicts = Vec::new();
    let mut detail = String::new();
    compare_family(&eng.degrees, &ora.degrees, tol, "d(f)", &mut verdicts, &mut detail);
    compare_family(&eng.base, &ora.base, tol, "d(g)", &mut verdicts, &mut detail);
    compare_family(&eng.relative, &ora.relative, tol, "d(f|pi)", &mut verdicts, &mut detail);
    outcome("engine_matches_oracle", Verdict::combine(verdicts), detail)
}

fn from_result<T, E: std::fmt::Display>(
    property: &'static str,
    r: Result<T, E>,
    verdict: impl Fn(&T) -> (Verdict, String),
) -> Outcome {
    match r {
        Ok(v) => {
            let (verdict, detail) = verdict(&v);
            outcome(property, verdict, detail)
        }
        Err(e) => outcome(property, Verdict::Inconclusive, e.to_string()),
    }
}

fn evaluate(d: &Draw, n_max: u32, tol: f64) -> Vec<Outcome> {
    let mut out = Vec::new();
    let f = match MonomialMap::fibred(d.matrix.clone(), d.l) {
        Ok(f) => f,
        Err(e) => {
            return PROPERTIES
                .iter()
                .map(|p| outcome(p, Verdict::Fail, e.to_string()))
                .collect()
        }
    };
    let k = d.k as u32;
    let oracle = oracle_profile(&d.matrix, Some(d.l));
    let ora = oracle.as_ref().ok();

    out.push(from_result("oracle_product_formula", oracle.clone(), |o| {
        match product_formula(o, ORACLE_TOL) {
            Ok(r) => (r.verdict, format!("{:?}", r.rows.iter().map(|r| r.rel_error).collect::<Vec<_>>())),
            Err(e) => (Verdict::Fail, e.to_string()),
        }
    }));
    out.push(from_result("oracle_log_concavity", oracle.clone(), |o| {
        match log_concavity(o, ORACLE_TOL) {
            Ok(r) => (r.verdict, format!("failing p {:?}", r.failing)),
            Err(e) => (Verdict::Fail, e.to_string()),
        }
    }));
    out.push(from_result("top_degree_is_abs_det", oracle.clone(), |o| {
        let top = o.degrees[d.k].map(|x| x.value).unwrap_or(f64::NAN);
        let det = abs_det(&d.matrix).unwrap_or(f64::NAN);
        let ok = (top - det).abs() <= 1e-8 * det;
        (if ok { Verdict::Pass } else { Verdict::Fail }, format!("d_k = {top}, |det| = {det}"))
    }));
    out.push(pass_or("cauchy_binet", cauchy_binet(d)));
    exact_checks(&f, d, n_max, &mut out);

    let eng = engine_profile(&f, n_max, tol);
    match &eng {
        Ok(e) => out.push(b_root_agreement(e, k, tol)),
        Err(err) => out.push(outcome("b_root_agreement", Verdict::Fail, err.to_string())),
    }
    out.push(match ora.map(|o| distinct_consecutive(o, ESTIMATE_TOL)) {
        Some(Ok(r)) => outcome(
            "distinct_degrees_implication",
            r.verdict,
            format!("f {}, g {}, f|pi {}", r.f_distinct, r.g_distinct, r.relative_distinct),
        ),
        Some(Err(e)) => outcome("distinct_degrees_implication", Verdict::Fail, e.to_string()),
        None => outcome("distinct_degrees_implication", Verdict::Inconclusive, "no oracle profile"),
    });
    match (&eng, ora) {
        (Ok(e), Some(o)) => out.push(engine_matches_oracle(&e.profile, o, tol)),
        (Ok(_), None) => out.push(outcome("engine_matches_oracle", Verdict::Inconclusive, "no oracle profile")),
        (Err(err), _) => out.push(outcome("engine_matches_oracle", Verdict::Fail, err.to_string())),
    }
    let eng_profile = eng.as_ref().map(|e| e.profile.clone()).map_err(ToString::to_string);
    out.push(from_result("engine_product_formula", eng_profile.clone(), |p| {
        match product_formula(p, tol) {
            Ok(r) => (r.verdict, format!("{:?}", r.rows.iter().map(|r| r.rel_error).collect::<Vec<_>>())),
            Err(e) => (Verdict::Inconclusive, e.to_string()),
        }
    }));
    out.push(from_result("engine_log_concavity", eng_profile, |p| {
        match log_concavity(p, tol) {
            Ok(r) => (r.verdict, format!("failing p {:?}", r.failing)),
            Err(e) => (Verdict::Inconclusive, e.to_string()),
        }
    }));
    out
}

/// Endpoint identities `lambda_0 = k!` and `lambda_k(n) = k! |det A|^n`.
pub fn endpoint_failure(f: &MonomialMap, n_max: u32) -> Option<String> {
    let k = f.dim();
    let fact: BigInt = (1..=k).map(BigInt::from).product();
    let det = f.matrix().det().ok()?.abs();
    let l0 = f.lambda_values(0, n_max).ok()?;
    let lk = f.lambda_values(k, n_max).ok()?;
    for n in 0..=n_max as usize {
        if l0[n] != fact {
            return Some(format!("lambda_0({n}) = {}", l0[n]));
        }
        if lk[n] != &fact * num_traits::pow(det.clone(), n) {
            return Some(format!("lambda_k({n}) = {}", lk[n]));
        }
    }
    None
}

pub fn cmd_suite(job: &SuiteJob) -> Report {
    let (draws, resampled) = draw_matrices(job.seed, job.size, job.max_k);
    let results: Vec<Vec<Outcome>> = draws
        .par_iter()
        .map(|d| {
            let mut out = evaluate(d, job.n_max, job.tolerance);
            let endpoint = MonomialMap::new(d.matrix.clone())
                .ok()
                .and_then(|f| endpoint_failure(&f, job.n_max.min(EXACT_N)));
            out.push(pass_or("endpoint_degrees", endpoint));
            out
        })
        .collect();

    let names: Vec<&str> = PROPERTIES.iter().copied().chain(["endpoint_degrees"]).collect();
    let mut properties: Vec<PropertyCount> = names
        .iter()
        .map(|n| PropertyCount {
            name: n.to_string(),
            pass: 0,
            fail: 0,
            inconclusive: 0,
        })
        .collect();
    let mut failures = Vec::new();
    for (d, outs) in draws.iter().zip(&results) {
        for o in outs {
            let Some(count) = properties.iter_mut().find(|c| c.name == o.property) else {
                continue;
            };
            match o.verdict {
                Verdict::Pass => count.pass += 1,
                Verdict::Inconclusive => count.inconclusive += 1,
                Verdict::Fail => {
                    count.fail += 1;
                    failures.push(format!(
                        "draw {} (k = {}, l = {}, A = {}): {}: {}",
                        d.index,
                        d.k,
                        d.l,
                        matrix_text(&d.matrix),
                        o.property,
                        o.detail
                    ));
                }
            }
        }
    }
    // A property that never passed has not been exercised.
    let verdict = if !failures.is_empty() {
        Verdict::Fail
    } else if properties.iter().any(|p| p.pass == 0) {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    Report::Suite(SuiteReport {
        seed: job.seed,
        size: job.size,
        max_k: job.max_k,
        n_max: job.n_max,
        tolerance: job.tolerance,
        resampled,
        properties,
        failures,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(size: usize, n_max: u32) -> SuiteJob {
        SuiteJob {
            seed: 7,
            size,
            max_k: 4,
            n_max,
            tolerance: ESTIMATE_TOL,
        }
    }

    #[test]
    fn draws_are_block_triangular_and_nonsingular() {
        let (draws, _) = draw_matrices(3, 40, 5);
        for d in &draws {
            assert!(crate::monomial::validate_fibration(&d.matrix, d.l));
            assert!(!d.matrix.det().unwrap().is_zero());
            assert!(d.matrix.entries().all(|x| x.abs() <= BigInt::from(ENTRY_BOUND)));
        }
        assert_eq!(draws, draw_matrices(3, 40, 5).0);
    }

    #[test]
    fn singular_draws_are_logged() {
        let logged = (0..20u64).any(|s| !draw_matrices(s, 30, 3).1.is_empty());
        assert!(logged);
    }

    #[test]
    fn small_suite_passes() {
        let Report::Suite(r) = cmd_suite(&job(12, 40)) else { panic!() };
        assert!(r.failures.is_empty(), "{:?}", r.failures);
        assert_eq!(r.properties.len(), PROPERTIES.len() + 1);
    }

    #[test]
    fn short_sequences_are_inconclusive_not_failing() {
        let Report::Suite(r) = cmd_suite(&job(6, 2)) else { panic!() };
        assert_ne!(r.verdict, Verdict::Fail, "{:?}", r.failures);
        let eng = r.properties.iter().find(|p| p.name == "engine_matches_oracle").unwrap();
        assert_eq!(eng.pass, 0);
        assert!(eng.inconclusive > 0);
    }
}
