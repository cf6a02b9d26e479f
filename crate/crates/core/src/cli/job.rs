//! Job documents: one JSON schema for both engines.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::cohomology::Space;
use crate::degrees::ESTIMATE_TOL;
use crate::matrix::IntMatrix;
use crate::monomial::{MonomialError, MonomialMap};
use crate::rational::{
    IterateOptions, MultiHomPoly, RationalMapDesc, DEFAULT_DEGREE_CAP, DEFAULT_ITERATES,
};

pub const DEFAULT_MONOMIAL_N: u32 = 40;
pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_SUITE_SIZE: usize = 100;
pub const DEFAULT_SUITE_MAX_K: usize = 5;
pub const DEFAULT_SUITE_N: u32 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Monomial,
    Rational,
}

/// An integer given either as a JSON number or as a decimal string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntValue {
    Small(i64),
    Text(String),
}

impl IntValue {
    fn to_bigint(&self) -> Option<BigInt> {
        match self {
            IntValue::Small(v) => Some(BigInt::from(*v)),
            IntValue::Text(s) => s.trim().parse().ok(),
        }
    }
}

/// `{"coeffs": [[[exponents...], value], ...]}`; exponents run over all
/// homogeneous variables, factor by factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolySpec {
    pub coeffs: Vec<(Vec<u32>, IntValue)>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<MapKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<Vec<PolySpec>>>,
    /// Monomial maps: number of base coordinates. Rational maps: number of
    /// base factors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fibration_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_range: Option<(u32, u32)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_cap: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_k: Option<usize>,
}

/// Command-line values that take precedence over the document.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n_max: Option<u32>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub enum JobMap {
    Monomial(MonomialMap),
    Rational(RationalMapDesc),
}

#[derive(Debug, Clone)]
pub struct ValidJob {
    pub map: JobMap,
    pub n_max: u32,
    pub tolerance: f64,
    pub p_range: Option<(u32, u32)>,
    pub seed: u64,
    pub iterate: IterateOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteJob {
    pub seed: u64,
    pub size: usize,
    pub max_k: usize,
    pub n_max: u32,
    pub tolerance: f64,
}

fn field(name: &str, msg: impl Into<String>) -> CliError {
    CliError::Validation(format!("field `{name}`: {}", msg.into()))
}

impl JobSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            CliError::Validation(format!(
                "line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })
    }

    fn tolerance_with(&self, o: &Overrides) -> Result<f64, CliError> {
        let tol = o.tolerance.or(self.tolerance).unwrap_or(ESTIMATE_TOL);
        if !(tol.is_finite() && tol > 0.0 && tol < 1.0) {
            return Err(field("tolerance", format!("{tol} must lie in (0, 1)")));
        }
        Ok(tol)
    }

    /// Check the document against the owning engine before any computation.
    pub fn validate(&self, o: &Overrides) -> Result<ValidJob, CliError> {
        let kind = self
            .kind
            .ok_or_else(|| field("type", "missing; expected \"monomial\" or \"rational\""))?;
        let tolerance = self.tolerance_with(o)?;
        let seed = o.seed.or(self.seed).unwrap_or(DEFAULT_SEED);
        let default_n = match kind {
            MapKind::Monomial => DEFAULT_MONOMIAL_N,
            MapKind::Rational => DEFAULT_ITERATES,
        };
        let n_max = o.n_max.or(self.n_max).unwrap_or(default_n);
        if n_max < 1 {
            return Err(field("n_max", "must be at least 1"));
        }
        let degree_cap = self.degree_cap.unwrap_or(DEFAULT_DEGREE_CAP);
        if degree_cap == 0 {
            return Err(field("degree_cap", "must be positive"));
        }
        let map = match kind {
            MapKind::Monomial => JobMap::Monomial(self.monomial()?),
            MapKind::Rational => JobMap::Rational(self.rational()?),
        };
        let dim = match &map {
            JobMap::Monomial(f) => f.dim(),
            JobMap::Rational(f) => f.space().dim(),
        };
        if let Some((lo, hi)) = self.p_range {
            if lo > hi || hi > dim {
                return Err(field(
                    "p_range",
                    format!("[{lo}, {hi}] must satisfy lo <= hi <= {dim}"),
                ));
            }
        }
        Ok(ValidJob {
            map,
            n_max,
            tolerance,
            p_range: self.p_range,
            seed,
            iterate: IterateOptions { degree_cap },
        })
    }

    fn monomial(&self) -> Result<MonomialMap, CliError> {
        if self.components.is_some() {
            return Err(field("components", "not allowed for a monomial job"));
        }
        let rows = self
            .matrix
            .as_ref()
            .ok_or_else(|| field("matrix", "missing for a monomial job"))?;
        let k = rows.len();
        if let Some(f) = &self.factors {
            if f.len() != k || f.iter().any(|&n| n != 1) {
                return Err(field(
                    "factors",
                    format!("monomial maps live on (P^1)^{k}; expected {k} ones"),
                ));
            }
        }
        let a = IntMatrix::from_rows(rows).map_err(|e| field("matrix", e.to_string()))?;
        let res = match self.fibration_dim {
            Some(l) => MonomialMap::fibred(a, l),
            None => MonomialMap::new(a),
        };
        res.map_err(|e| match e {
            MonomialError::NotFibred(_) | MonomialError::InvalidFibrationDim { .. } => field(
                "fibration_dim",
                format!(
                    "{e}; a fibred monomial map needs A[i][j] = 0 for every base row i and fiber column j"
                ),
            ),
            other => field("matrix", other.to_string()),
        })
    }

    fn rational(&self) -> Result<RationalMapDesc, CliError> {
        if self.matrix.is_some() {
            return Err(field("matrix", "not allowed for a rational job"));
        }
        let factors = self
            .factors
            .clone()
            .ok_or_else(|| field("factors", "missing for a rational job"))?;
        let space = match self.fibration_dim {
            Some(l) => Space::fibred(factors, l),
            None => Space::new(factors),
        }
        .map_err(|e| field(if self.fibration_dim.is_some() { "fibration_dim" } else { "factors" }, e.to_string()))?;
        let comps = self
            .components
            .as_ref()
            .ok_or_else(|| field("components", "missing for a rational job"))?;
        let mut tuples = Vec::with_capacity(comps.len());
        for (i, tuple) in comps.iter().enumerate() {
            let mut polys = Vec::with_capacity(tuple.len());
            for (j, spec) in tuple.iter().enumerate() {
                let terms = spec
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(t, (e, v))| {
                        v.to_bigint().map(|c| (e.clone(), c)).ok_or_else(|| {
                            field(
                                &format!("components[{i}][{j}].coeffs[{t}]"),
                                "value is not an integer",
                            )
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let h = MultiHomPoly::from_terms(&space, terms)
                    .map_err(|e| field(&format!("components[{i}][{j}]"), e.to_string()))?;
                polys.push(h.poly().clone());
            }
            tuples.push(polys);
        }
        RationalMapDesc::new(space, tuples).map_err(|e| field("components", e.to_string()))
    }

    pub fn suite(&self, o: &Overrides) -> Result<SuiteJob, CliError> {
        let tolerance = self.tolerance_with(o)?;
        let max_k = self.max_k.unwrap_or(DEFAULT_SUITE_MAX_K);
        if !(2..=6).contains(&max_k) {
            return Err(field("max_k", format!("{max_k} must lie in 2..=6")));
        }
        let size = self.suite_size.unwrap_or(DEFAULT_SUITE_SIZE);
        if size == 0 {
            return Err(field("suite_size", "must be positive"));
        }
        let n_max = o.n_max.or(self.n_max).unwrap_or(DEFAULT_SUITE_N);
        if n_max < 1 {
            return Err(field("n_max", "must be at least 1"));
        }
        Ok(SuiteJob {
            seed: o.seed.or(self.seed).unwrap_or(DEFAULT_SEED),
            size,
            max_k,
            n_max,
            tolerance,
        })
    }
}

/// Job document for a polynomial map, e.g. to hand a map to the command line.
pub fn rational_job(f: &RationalMapDesc) -> JobSpec {
    let comps = f
        .components()
        .iter()
        .map(|t| {
            t.iter()
                .map(|h| PolySpec {
                    coeffs: h
                        .poly()
                        .terms()
                        .map(|(e, c)| (e.clone(), int_value(c)))
                        .collect(),
                })
                .collect()
        })
        .collect();
    JobSpec {
        kind: Some(MapKind::Rational),
        factors: Some(f.space().factors().to_vec()),
        components: Some(comps),
        fibration_dim: f.space().base_factors(),
        ..JobSpec::default()
    }
}

fn int_value(c: &BigInt) -> IntValue {
    i64::try_from(c).map_or_else(|_| IntValue::Text(c.to_string()), IntValue::Small)
}
