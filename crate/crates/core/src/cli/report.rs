//! Machine reports and their renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::job::MapKind;
use super::CliError;
use crate::degrees::{Degree, DegreeProfile, ProductReport, Source, Verdict};
use crate::profile::EstimatedSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSummary {
    pub kind: MapKind,
    pub space: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multidegrees: Option<Vec<Vec<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fibration_dim: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreesReport {
    pub map: MapSummary,
    pub n_max: u32,
    pub computed: u32,
    pub truncated: bool,
    pub tolerance: f64,
    pub profile: DegreeProfile,
    pub oracle: Option<DegreeProfile>,
    pub sequences: Vec<EstimatedSequence>,
    pub multidegrees: Option<Vec<Vec<Vec<u32>>>>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub map: MapSummary,
    pub n_max: u32,
    pub tolerance: f64,
    pub estimate: ProductReport,
    pub lower_bound: ProductReport,
    pub oracle: Option<ProductReport>,
    pub verdict: Verdict,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceReport {
    pub map: MapSummary,
    pub n_max: u32,
    pub truncated: bool,
    pub tolerance: f64,
    pub sequences: Vec<EstimatedSequence>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyCount {
    pub name: String,
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub size: usize,
    pub max_k: usize,
    pub n_max: u32,
    pub tolerance: f64,
    pub resampled: Vec<String>,
    pub properties: Vec<PropertyCount>,
    pub failures: Vec<String>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "report", rename_all = "kebab-case")]
pub enum Report {
    Degrees(DegreesReport),
    VerifyProduct(VerifyReport),
    Sequence(SequenceReport),
    Suite(SuiteReport),
}

impl Report {
    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Table => Ok(self.table()),
            Format::Json => serde_json::to_string_pretty(self)
                .map(|s| s + "\n")
                .map_err(|e| CliError::Engine(e.to_string())),
            Format::Csv => self.csv(),
        }
    }

    pub fn table(&self) -> String {
        match self {
            Report::Degrees(r) => degrees_table(r),
            Report::VerifyProduct(r) => verify_table(r),
            Report::Sequence(r) => sequence_table(r),
            Report::Suite(r) => suite_table(r),
        }
    }

    fn csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Engine(e.to_string());
        match self {
            Report::Degrees(DegreesReport { sequences, .. })
            | Report::Sequence(SequenceReport { sequences, .. }) => {
                w.write_record(["quantity", "p", "n", "lambda_p", "root_est", "ratio_est"])
                    .map_err(io)?;
                for s in sequences {
                    for (n, v) in s.values.iter().enumerate() {
                        let (root, ratio) = per_n_estimates(s, n);
                        w.write_record([
                            s.quantity.to_string(),
                            s.quantity.p().to_string(),
                            n.to_string(),
                            v.to_string(),
                            root,
                            ratio,
                        ])
                        .map_err(io)?;
                    }
                }
            }
            Report::VerifyProduct(r) => {
                w.write_record(["check", "p", "lhs", "rhs", "argmax", "rel_error", "verdict"])
                    .map_err(io)?;
                let mut checks = vec![("estimate", &r.estimate), ("lower_bound", &r.lower_bound)];
                if let Some(o) = &r.oracle {
                    checks.push(("oracle", o));
                }
                for (name, rep) in checks {
                    for row in &rep.rows {
                        w.write_record([
                            name.to_string(),
                            row.p.to_string(),
                            row.lhs.to_string(),
                            row.rhs.to_string(),
                            argmax_text(&row.argmax),
                            row.rel_error.to_string(),
                            row.verdict.to_string(),
                        ])
                        .map_err(io)?;
                    }
                }
            }
            Report::Suite(r) => {
                w.write_record(["property", "pass", "fail", "inconclusive"])
                    .map_err(io)?;
                for p in &r.properties {
                    w.write_record([
                        p.name.clone(),
                        p.pass.to_string(),
                        p.fail.to_string(),
                        p.inconclusive.to_string(),
                    ])
                    .map_err(io)?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| CliError::Engine(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Engine(e.to_string()))
    }
}

fn per_n_estimates(s: &EstimatedSequence, n: usize) -> (String, String) {
    match s.as_sequence() {
        Some(seq) if n >= 1 => (
            format!("{:.12}", seq.root_at(n)),
            format!("{:.12}", seq.ratio_at(n)),
        ),
        _ => (String::new(), String::new()),
    }
}

fn argmax_text(j: &[u32]) -> String {
    let parts: Vec<String> = j.iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

fn header(map: &MapSummary) -> String {
    let mut s = match map.kind {
        MapKind::Monomial => {
            let rows: Vec<String> = map
                .matrix
                .iter()
                .flatten()
                .map(|r| format!("[{}]", r.join(", ")))
                .collect();
            format!("monomial map [{}] on {}", rows.join(", "), map.space)
        }
        MapKind::Rational => format!("rational map on {}", map.space),
    };
    if let Some(l) = map.fibration_dim {
        let _ = write!(s, ", fibration_dim {l}");
    }
    s
}

fn status(d: &Degree) -> &'static str {
    match d.source {
        Source::Exact => "EXACT",
        Source::Estimated { converged: true } => "CONVERGED",
        Source::Estimated { converged: false } => "NOT CONVERGED",
    }
}

fn family_rows(out: &mut String, label: &str, est: &[Option<Degree>], oracle: Option<&[Option<Degree>]>) {
    for (p, d) in est.iter().enumerate() {
        let value = d.map_or("-".to_string(), |d| format!("{:.10}", d.value));
        let flag = d.as_ref().map_or("MISSING", status);
        let _ = write!(out, "  {label:<10} {p:>2}  {value:>16}  {flag:<13}");
        if let Some(o) = oracle.and_then(|o| o.get(p).copied().flatten()) {
            let _ = write!(out, "  {:>16.10}", o.value);
        }
        out.push('\n');
    }
}

fn degrees_table(r: &DegreesReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", header(&r.map));
    let _ = writeln!(
        out,
        "N = {} (computed {}{}), tol = {}",
        r.n_max,
        r.computed,
        if r.truncated { ", TRUNCATED" } else { "" },
        r.tolerance
    );
    if let Some(md) = &r.multidegrees {
        let lam = r.sequences.first();
        let _ = writeln!(out, "  {:>3}  {:<28}  lambda_1", "n", "multidegrees");
        for (n, d) in md.iter().enumerate() {
            let rows: Vec<String> = d
                .iter()
                .map(|row| format!("[{}]", row.iter().map(u32::to_string).collect::<Vec<_>>().join(", ")))
                .collect();
            let value = lam
                .and_then(|s| s.values.get(n + 1))
                .map_or(String::new(), ToString::to_string);
            let _ = writeln!(out, "  {:>3}  {:<28}  {}", n + 1, format!("[{}]", rows.join(", ")), value);
        }
    }
    let _ = writeln!(
        out,
        "  {:<10} {:>2}  {:>16}  {:<13}{}",
        "degree",
        "p",
        "estimate",
        "status",
        if r.oracle.is_some() { "            oracle" } else { "" }
    );
    let oracle = r.oracle.as_ref();
    family_rows(&mut out, "d_p(f)", &r.profile.degrees, oracle.map(|o| o.degrees.as_slice()));
    if r.profile.l.is_some() {
        family_rows(&mut out, "d_j(g)", &r.profile.base, oracle.map(|o| o.base.as_slice()));
        family_rows(&mut out, "d_q(f|pi)", &r.profile.relative, oracle.map(|o| o.relative.as_slice()));
    }
    for w in &r.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

fn product_table(out: &mut String, title: &str, rep: &ProductReport) {
    let _ = writeln!(out, "{title}: {}", rep.verdict);
    let _ = writeln!(
        out,
        "  {:>2}  {:>16}  {:>16}  {:<10}  {:>10}  verdict",
        "p", "lhs", "rhs", "argmax j", "rel_error"
    );
    for row in &rep.rows {
        let _ = writeln!(
            out,
            "  {:>2}  {:>16.10}  {:>16.10}  {:<10}  {:>10.3e}  {}",
            row.p,
            row.lhs,
            row.rhs,
            argmax_text(&row.argmax),
            row.rel_error,
            row.verdict
        );
    }
    if !rep.skipped.is_empty() {
        let _ = writeln!(out, "  skipped p (degrees not computed): {:?}", rep.skipped);
    }
}

fn verify_table(r: &VerifyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", header(&r.map));
    let _ = writeln!(out, "N = {}, tol = {}", r.n_max, r.tolerance);
    product_table(&mut out, "product formula (estimates)", &r.estimate);
    product_table(&mut out, "lower bound (estimates)", &r.lower_bound);
    if let Some(o) = &r.oracle {
        product_table(&mut out, "product formula (oracle)", o);
    }
    for w in &r.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    let _ = writeln!(out, "verdict: {}", r.verdict);
    out
}

fn sequence_table(r: &SequenceReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", header(&r.map));
    let _ = writeln!(
        out,
        "N = {}{}, tol = {}",
        r.n_max,
        if r.truncated { " (TRUNCATED)" } else { "" },
        r.tolerance
    );
    for s in &r.sequences {
        let _ = write!(out, "{}:", s.quantity);
        for v in &s.values {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
        if let Some(e) = &s.estimate {
            let _ = writeln!(
                out,
                "  root {:.10}  ratio {:.10}  {}",
                e.root_estimate,
                e.ratio_estimate,
                if e.converged { "CONVERGED" } else { "NOT CONVERGED" }
            );
        }
    }
    out
}

fn suite_table(r: &SuiteReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "suite: seed {}, {} matrices, k <= {}, N = {}, tol = {}",
        r.seed, r.size, r.max_k, r.n_max, r.tolerance
    );
    for line in &r.resampled {
        let _ = writeln!(out, "  resampled: {line}");
    }
    let _ = writeln!(out, "  {:<30} {:>6} {:>6} {:>13}", "property", "pass", "fail", "inconclusive");
    for p in &r.properties {
        let _ = writeln!(
            out,
            "  {:<30} {:>6} {:>6} {:>13}",
            p.name, p.pass, p.fail, p.inconclusive
        );
    }
    for f in &r.failures {
        let _ = writeln!(out, "  failure: {f}");
    }
    let _ = writeln!(out, "verdict: {}", r.verdict);
    out
}
