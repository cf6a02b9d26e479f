//! The `degrees`, `verify-product` and `sequence` commands.

use super::job::{JobMap, MapKind, ValidJob};
use super::report::{DegreesReport, MapSummary, Report, SequenceReport, VerifyReport};
use super::CliError;
use crate::degrees::{lower_bound_check, product_formula, Verdict, ORACLE_TOL};
use crate::profile::{
    engine_profile, monomial_sequences, oracle_profile, rational_profile, EstimatedSequence,
};
use crate::rational::RationalMapDesc;

fn summary(map: &JobMap) -> MapSummary {
    match map {
        JobMap::Monomial(f) => MapSummary {
            kind: MapKind::Monomial,
            space: f.space().to_string(),
            matrix: Some(
                f.matrix()
                    .to_rows()
                    .iter()
                    .map(|r| r.iter().map(ToString::to_string).collect())
                    .collect(),
            ),
            multidegrees: None,
            fibration_dim: f.fibration_dim(),
        },
        JobMap::Rational(f) => MapSummary {
            kind: MapKind::Rational,
            space: f.space().to_string(),
            matrix: None,
            multidegrees: Some(f.multidegrees().to_vec()),
            fibration_dim: f.space().base_factors(),
        },
    }
}

fn in_range(job: &ValidJob, s: &EstimatedSequence) -> bool {
    job.p_range
        .is_none_or(|(lo, hi)| (lo..=hi).contains(&s.quantity.p()))
}

fn engine<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Engine(e.to_string())
}

fn rational_warnings(f: &RationalMapDesc, seed: u64, truncated: bool, cap: u32) -> Vec<String> {
    let mut w = Vec::new();
    if !f.is_dominant(seed) {
        w.push("dominance check found no full-rank Jacobian at random points".to_string());
    }
    if truncated {
        w.push(format!(
            "iteration stopped early: a composite would exceed total degree {cap}"
        ));
    }
    w
}

pub fn cmd_degrees(job: &ValidJob) -> Result<Report, CliError> {
    let map = summary(&job.map);
    let report = match &job.map {
        JobMap::Monomial(f) => {
            let eng = engine_profile(f, job.n_max, job.tolerance).map_err(engine)?;
            let l = f.fibration_dim();
            let oracle = oracle_profile(f.matrix(), l).map_err(engine)?;
            let sequences = eng
                .sequences
                .into_iter()
                .filter(|s| {
                    matches!(s.quantity, crate::degrees::Quantity::Lambda { .. }) && in_range(job, s)
                })
                .collect();
            DegreesReport {
                map,
                n_max: job.n_max,
                computed: job.n_max,
                truncated: false,
                tolerance: job.tolerance,
                profile: eng.profile,
                oracle: Some(oracle),
                sequences,
                multidegrees: None,
                warnings: Vec::new(),
            }
        }
        JobMap::Rational(f) => {
            let r = rational_profile(f, job.n_max, &job.iterate, job.tolerance).map_err(engine)?;
            let warnings = rational_warnings(f, job.seed, r.iterates.truncated, job.iterate.degree_cap);
            DegreesReport {
                map,
                n_max: job.n_max,
                computed: r.iterates.computed(),
                truncated: r.iterates.truncated,
                tolerance: job.tolerance,
                profile: r.profile,
                oracle: None,
                sequences: r.sequences,
                multidegrees: Some(r.iterates.multidegrees),
                warnings,
            }
        }
    };
    Ok(Report::Degrees(report))
}

pub fn cmd_verify_product(job: &ValidJob) -> Result<Report, CliError> {
    let map = summary(&job.map);
    let no_fibration = || {
        CliError::Validation(
            "field `fibration_dim`: verify-product needs a fibred map (block lower-triangular matrix, or base components free of fiber variables)"
                .to_string(),
        )
    };
    let report = match &job.map {
        JobMap::Monomial(f) => {
            let l = f.fibration_dim().ok_or_else(no_fibration)?;
            let eng = engine_profile(f, job.n_max, job.tolerance).map_err(engine)?;
            let oracle = oracle_profile(f.matrix(), Some(l)).map_err(engine)?;
            let estimate = product_formula(&eng.profile, job.tolerance).map_err(engine)?;
            let lower_bound = lower_bound_check(&eng.profile, job.tolerance).map_err(engine)?;
            let oracle = product_formula(&oracle, ORACLE_TOL).map_err(engine)?;
            let verdict = Verdict::combine([estimate.verdict, lower_bound.verdict, oracle.verdict]);
            VerifyReport {
                map,
                n_max: job.n_max,
                tolerance: job.tolerance,
                estimate,
                lower_bound,
                oracle: Some(oracle),
                verdict,
                warnings: Vec::new(),
            }
        }
        JobMap::Rational(f) => {
            f.space().base_factors().ok_or_else(no_fibration)?;
            if !f.validate_skew().map_err(engine)? {
                return Err(CliError::Validation(
                    "field `components`: the base components use fiber variables, so the map is not a skew product"
                        .to_string(),
                ));
            }
            let r = rational_profile(f, job.n_max, &job.iterate, job.tolerance).map_err(engine)?;
            let estimate = product_formula(&r.profile, job.tolerance).map_err(engine)?;
            let lower_bound = lower_bound_check(&r.profile, job.tolerance).map_err(engine)?;
            let verdict = Verdict::combine([estimate.verdict, lower_bound.verdict]);
            VerifyReport {
                map,
                n_max: job.n_max,
                tolerance: job.tolerance,
                estimate,
                lower_bound,
                oracle: None,
                verdict,
                warnings: rational_warnings(f, job.seed, r.iterates.truncated, job.iterate.degree_cap),
            }
        }
    };
    Ok(Report::VerifyProduct(report))
}

pub fn cmd_sequence(job: &ValidJob) -> Result<Report, CliError> {
    let map = summary(&job.map);
    let (sequences, truncated) = match &job.map {
        JobMap::Monomial(f) => (
            monomial_sequences(f, job.n_max, job.tolerance).map_err(engine)?,
            false,
        ),
        JobMap::Rational(f) => {
            let r = rational_profile(f, job.n_max, &job.iterate, job.tolerance).map_err(engine)?;
            (r.sequences, r.iterates.truncated)
        }
    };
    Ok(Report::Sequence(SequenceReport {
        map,
        n_max: job.n_max,
        truncated,
        tolerance: job.tolerance,
        sequences: sequences.into_iter().filter(|s| in_range(job, s)).collect(),
    }))
}
