//! Degree estimates from exact sequences, and verdicts built on them.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const ESTIMATE_TOL: f64 = 5e-2;
pub const ORACLE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DegreeError {
    #[error("value at n = {0} is not positive")]
    NonPositive(usize),
    #[error("sequence has N = {0}; estimation needs N >= 2")]
    TooShort(usize),
    #[error("profile is missing {0}")]
    Incomplete(String),
}

/// Which sequence a list of values represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Quantity {
    Lambda { p: u32 },
    Relative { p: u32 },
    A { q: u32, p: u32 },
    B { p: u32 },
    C { p: u32 },
}

impl Quantity {
    pub fn p(&self) -> u32 {
        match *self {
            Quantity::Lambda { p }
            | Quantity::Relative { p }
            | Quantity::A { p, .. }
            | Quantity::B { p }
            | Quantity::C { p } => p,
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Lambda { p } => write!(f, "lambda_{p}"),
            Quantity::Relative { p } => write!(f, "lambda_rel_{p}"),
            Quantity::A { q, p } => write!(f, "a_{q}_{p}"),
            Quantity::B { p } => write!(f, "b_{p}"),
            Quantity::C { p } => write!(f, "c_{p}"),
        }
    }
}

/// Exact positive values for `n = 0..=N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    quantity: Quantity,
    values: Vec<BigInt>,
}

impl DegreeSequence {
    pub fn new(quantity: Quantity, values: Vec<BigInt>) -> Result<Self, DegreeError> {
        if let Some(n) = values.iter().position(|v| !v.is_positive()) {
            return Err(DegreeError::NonPositive(n));
        }
        Ok(DegreeSequence { quantity, values })
    }

    pub fn quantity(&self) -> Quantity {
        self.quantity
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    /// Largest index `N`.
    pub fn n_max(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    /// `lambda(n)^{1/n}`; `n >= 1`.
    pub fn root_at(&self, n: usize) -> f64 {
        (ln_big(&self.values[n]) / n as f64).exp()
    }

    /// `lambda(n) / lambda(n-1)`; `n >= 1`.
    pub fn ratio_at(&self, n: usize) -> f64 {
        ratio(&self.values[n], &self.values[n - 1])
    }

    /// `(lambda(n) / lambda(m))^{1/(n-m)}`; `m < n`.
    pub fn span_ratio_at(&self, m: usize, n: usize) -> f64 {
        ((ln_big(&self.values[n]) - ln_big(&self.values[m])) / (n - m) as f64).exp()
    }

    pub fn estimate(&self, tol: f64) -> Result<DegreeEstimate, DegreeError> {
        estimate(self, tol)
    }
}

/// Natural log of a positive big integer without overflowing `f64`.
pub fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().expect("64-bit value").ln() + shift as f64 * std::f64::consts::LN_2
}

/// `a / b` as a float; exact when `b` divides `a` and the quotient is small.
pub fn ratio(a: &BigInt, b: &BigInt) -> f64 {
    let (q, r) = a.div_rem(b);
    let whole = if q.bits() <= 1000 {
        q.to_f64().expect("fits in f64")
    } else {
        return (ln_big(a) - ln_big(b)).exp();
    };
    if r.is_zero() {
        return whole;
    }
    let bits = b.bits();
    let shift = bits.saturating_sub(64);
    let rf = (&r >> shift).to_f64().expect("fits in f64");
    let bf = (b >> shift).to_f64().expect("fits in f64");
    whole + rf / bf
}

/// Estimates of `lim lambda(n)^{1/n}` at the last index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeEstimate {
    pub root_estimate: f64,
    pub ratio_estimate: f64,
    pub converged: bool,
    /// The ratio estimate when converged, otherwise the root estimate.
    pub chosen: f64,
}

fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Both estimators at `N`. Converged iff the ratio estimates at `N`, `N-1` and
/// `N-2` pairwise agree within `tol` relatively, and the ratio at `N` agrees
/// within `tol / 2` with the averaged ratio over `N/2 ..= N`. The second test
/// catches slow oscillation (complex dominant eigenvalues) whose amplitude is
/// below `tol`. The ratio at `n = 1` involves the `n = 0` value and is never
/// used.
pub fn estimate(seq: &DegreeSequence, tol: f64) -> Result<DegreeEstimate, DegreeError> {
    let n = seq.n_max();
    if n < 2 {
        return Err(DegreeError::TooShort(n));
    }
    let root_estimate = seq.root_at(n);
    let ratio_estimate = seq.ratio_at(n);
    let converged = n >= 4 && {
        let r = [seq.ratio_at(n), seq.ratio_at(n - 1), seq.ratio_at(n - 2)];
        rel_diff(r[0], r[1]) < tol
            && rel_diff(r[0], r[2]) < tol
            && rel_diff(r[1], r[2]) < tol
            && rel_diff(r[0], seq.span_ratio_at(n / 2, n)) < tol / 2.0
    };
    let chosen = if converged { ratio_estimate } else { root_estimate };
    Ok(DegreeEstimate {
        root_estimate,
        ratio_estimate,
        converged,
        chosen,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    /// Oracle value or an exact identity such as `d_0 = 1`.
    Exact,
    Estimated { converged: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Degree {
    pub value: f64,
    pub source: Source,
}

impl Degree {
    pub fn exact(value: f64) -> Self {
        Degree {
            value,
            source: Source::Exact,
        }
    }

    pub fn estimated(est: &DegreeEstimate) -> Self {
        Degree {
            value: est.chosen,
            source: Source::Estimated {
                converged: est.converged,
            },
        }
    }

    /// False only for an estimate whose sequence did not converge.
    pub fn is_reliable(&self) -> bool {
        !matches!(self.source, Source::Estimated { converged: false })
    }
}

/// `d_p(f)` for `p = 0..=k`, `d_j(g)` for `j = 0..=l`, `d_q(f|pi)` for
/// `q = 0..=k-l`. Missing entries are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeProfile {
    pub k: u32,
    pub l: Option<u32>,
    pub degrees: Vec<Option<Degree>>,
    pub base: Vec<Option<Degree>>,
    pub relative: Vec<Option<Degree>>,
}

impl DegreeProfile {
    /// Profile with `d_0 = 1` in each family and everything else missing.
    pub fn empty(k: u32, l: Option<u32>) -> Self {
        let family = |len: u32| {
            let mut v = vec![None; len as usize + 1];
            v[0] = Some(Degree::exact(1.0));
            v
        };
        DegreeProfile {
            k,
            l,
            degrees: family(k),
            base: l.map_or_else(Vec::new, family),
            relative: l.map_or_else(Vec::new, |l| family(k - l)),
        }
    }

    /// All-exact profile from plain values.
    pub fn exact(degrees: &[f64], base: &[f64], relative: &[f64]) -> Self {
        let wrap = |v: &[f64]| v.iter().map(|&x| Some(Degree::exact(x))).collect();
        let k = degrees.len() as u32 - 1;
        DegreeProfile {
            k,
            l: (!base.is_empty()).then(|| base.len() as u32 - 1),
            degrees: wrap(degrees),
            base: wrap(base),
            relative: wrap(relative),
        }
    }

    fn require_full(family: &[Option<Degree>], name: &str) -> Result<Vec<Degree>, DegreeError> {
        if family.is_empty() {
            return Err(DegreeError::Incomplete(name.to_string()));
        }
        family
            .iter()
            .enumerate()
            .map(|(i, d)| d.ok_or_else(|| DegreeError::Incomplete(format!("{name}[{i}]"))))
            .collect()
    }

    fn require_fibration(&self) -> Result<u32, DegreeError> {
        self.l
            .ok_or_else(|| DegreeError::Incomplete("fibration".to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// Fail dominates, then inconclusive.
    pub fn combine<I: IntoIterator<Item = Verdict>>(it: I) -> Verdict {
        let mut out = Verdict::Pass;
        for v in it {
            match v {
                Verdict::Fail => return Verdict::Fail,
                Verdict::Inconclusive => out = Verdict::Inconclusive,
                Verdict::Pass => {}
            }
        }
        out
    }

    fn judge(ok: bool, reliable: bool) -> Verdict {
        match (reliable, ok) {
            (false, _) => Verdict::Inconclusive,
            (true, true) => Verdict::Pass,
            (true, false) => Verdict::Fail,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogConcavityReport {
    pub failing: Vec<u32>,
    pub verdict: Verdict,
}

/// `d_p^2 >= d_{p-1} d_{p+1} (1 - tol)` for `1 <= p <= k-1`.
pub fn log_concavity(profile: &DegreeProfile, tol: f64) -> Result<LogConcavityReport, DegreeError> {
    let d = DegreeProfile::require_full(&profile.degrees, "degrees")?;
    let mut failing = Vec::new();
    let mut verdicts = Vec::new();
    for p in 1..d.len().saturating_sub(1) {
        let ok = d[p].value * d[p].value >= d[p - 1].value * d[p + 1].value * (1.0 - tol);
        let reliable = d[p - 1].is_reliable() && d[p].is_reliable() && d[p + 1].is_reliable();
        let v = Verdict::judge(ok, reliable);
        if v == Verdict::Fail {
            failing.push(p as u32);
        }
        verdicts.push(v);
    }
    Ok(LogConcavityReport {
        failing,
        verdict: Verdict::combine(verdicts),
    })
}

/// Consecutive entries differ by more than `tol` relatively.
pub fn is_distinct(values: &[f64], tol: f64) -> bool {
    values.windows(2).all(|w| rel_diff(w[0], w[1]) > tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistinctReport {
    pub f_distinct: bool,
    pub g_distinct: bool,
    pub relative_distinct: bool,
    pub verdict: Verdict,
}

/// If the degrees of `f` are pairwise distinct at consecutive orders, so are
/// those of the base map and of the relative degrees.
pub fn distinct_consecutive(
    profile: &DegreeProfile,
    tol: f64,
) -> Result<DistinctReport, DegreeError> {
    profile.require_fibration()?;
    let f = DegreeProfile::require_full(&profile.degrees, "degrees")?;
    let g = DegreeProfile::require_full(&profile.base, "base degrees")?;
    let r = DegreeProfile::require_full(&profile.relative, "relative degrees")?;
    let vals = |v: &[Degree]| v.iter().map(|d| d.value).collect::<Vec<_>>();
    let f_distinct = is_distinct(&vals(&f), tol);
    let g_distinct = is_distinct(&vals(&g), tol);
    let relative_distinct = is_distinct(&vals(&r), tol);
    let reliable = f.iter().chain(&g).chain(&r).all(Degree::is_reliable);
    let ok = !f_distinct || (g_distinct && relative_distinct);
    Ok(DistinctReport {
        f_distinct,
        g_distinct,
        relative_distinct,
        verdict: Verdict::judge(ok, reliable),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductRow {
    pub p: u32,
    pub lhs: f64,
    pub rhs: f64,
    /// Every admissible `j` whose term is within `tol` of the maximum.
    pub argmax: Vec<u32>,
    pub rel_error: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductReport {
    pub rows: Vec<ProductRow>,
    /// Orders skipped because some needed degree is missing.
    pub skipped: Vec<u32>,
    pub verdict: Verdict,
}

/// Admissible `j`: `max(0, p-(k-l)) ..= min(p, l)`.
pub fn product_window(k: u32, l: u32, p: u32) -> (u32, u32) {
    (p.saturating_sub(k - l), p.min(l))
}

fn product_rows(
    profile: &DegreeProfile,
    tol: f64,
    accept: impl Fn(f64, f64) -> bool,
) -> Result<ProductReport, DegreeError> {
    let l = profile.require_fibration()?;
    let k = profile.k;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for p in 0..=k {
        let (lo, hi) = product_window(k, l, p);
        let lhs = profile.degrees.get(p as usize).copied().flatten();
        let terms: Option<Vec<(u32, Degree, Degree)>> = (lo..=hi)
            .map(|j| {
                let g = profile.base.get(j as usize).copied().flatten()?;
                let r = profile.relative.get((p - j) as usize).copied().flatten()?;
                Some((j, g, r))
            })
            .collect();
        let (Some(lhs), Some(terms)) = (lhs, terms) else {
            skipped.push(p);
            continue;
        };
        let values: Vec<f64> = terms.iter().map(|(_, g, r)| g.value * r.value).collect();
        let rhs = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let argmax = terms
            .iter()
            .zip(&values)
            .filter(|(_, &v)| rel_diff(v, rhs) <= tol)
            .map(|((j, _, _), _)| *j)
            .collect();
        let reliable = lhs.is_reliable()
            && terms
                .iter()
                .all(|(_, g, r)| g.is_reliable() && r.is_reliable());
        let rel_error = (lhs.value - rhs).abs() / rhs;
        rows.push(ProductRow {
            p,
            lhs: lhs.value,
            rhs,
            argmax,
            rel_error,
            verdict: Verdict::judge(accept(lhs.value, rhs), reliable),
        });
    }
    if rows.is_empty() {
        return Err(DegreeError::Incomplete(
            "every order lacks a degree needed by the product formula".to_string(),
        ));
    }
    let verdict = Verdict::combine(rows.iter().map(|r| r.verdict));
    Ok(ProductReport {
        rows,
        skipped,
        verdict,
    })
}

/// `d_p(f) = max_j d_j(g) d_{p-j}(f|pi)` within relative `tol`, per order `p`.
pub fn product_formula(profile: &DegreeProfile, tol: f64) -> Result<ProductReport, DegreeError> {
    product_rows(profile, tol, |lhs, rhs| (lhs - rhs).abs() <= tol * rhs)
}

/// The one-sided bound `d_p(f) >= max_j d_j(g) d_{p-j}(f|pi) (1 - tol)`.
pub fn lower_bound_check(profile: &DegreeProfile, tol: f64) -> Result<ProductReport, DegreeError> {
    product_rows(profile, tol, |lhs, rhs| lhs >= rhs * (1.0 - tol))
}
