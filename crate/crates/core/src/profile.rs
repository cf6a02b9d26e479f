//! Degree profiles assembled from the engines and from the oracle.

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::degrees::{Degree, DegreeError, DegreeEstimate, DegreeProfile, DegreeSequence, Quantity};
use crate::matrix::IntMatrix;
use crate::monomial::{MonomialError, MonomialMap};
use crate::oracle::{eigen_degrees, OracleError};
use crate::rational::{iterate_multidegrees, IterateOptions, IterateResult, RationalError, RationalMapDesc};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error(transparent)]
    Monomial(#[from] MonomialError),
    #[error(transparent)]
    Rational(#[from] RationalError),
    #[error(transparent)]
    Degree(#[from] DegreeError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// A computed sequence with its estimate when one exists (all values positive
/// and `N >= 2`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatedSequence {
    pub quantity: Quantity,
    #[serde(with = "bigint_strings")]
    pub values: Vec<BigInt>,
    pub estimate: Option<DegreeEstimate>,
}

impl EstimatedSequence {
    pub fn new(quantity: Quantity, values: Vec<BigInt>, tol: f64) -> Self {
        let estimate = DegreeSequence::new(quantity, values.clone())
            .ok()
            .and_then(|s| s.estimate(tol).ok());
        EstimatedSequence {
            quantity,
            values,
            estimate,
        }
    }

    pub fn as_sequence(&self) -> Option<DegreeSequence> {
        DegreeSequence::new(self.quantity, self.values.clone()).ok()
    }

    fn degree(&self) -> Option<Degree> {
        self.estimate.as_ref().map(Degree::estimated)
    }
}

/// Big integers travel as decimal strings so reports survive any JSON reader.
pub mod bigint_strings {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(ToString::to_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|x| x.parse().map_err(D::Error::custom))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineProfile {
    pub profile: DegreeProfile,
    pub sequences: Vec<EstimatedSequence>,
}

impl EngineProfile {
    pub fn sequence(&self, q: Quantity) -> Option<&EstimatedSequence> {
        self.sequences.iter().find(|s| s.quantity == q)
    }
}

/// Every sequence the monomial engine offers for `n = 0..=n_max`: `lambda_p`,
/// and on fibred maps also relative degrees, `a_{q,p}`, `b_p` and `c_p`.
pub fn monomial_sequences(
    f: &MonomialMap,
    n_max: u32,
    tol: f64,
) -> Result<Vec<EstimatedSequence>, ProfileError> {
    let k = f.dim();
    let mut out = Vec::new();
    for p in 0..=k {
        out.push(EstimatedSequence::new(
            Quantity::Lambda { p },
            f.lambda_values(p, n_max)?,
            tol,
        ));
    }
    if let Some(l) = f.space().base_dim() {
        for p in 0..=k - l {
            out.push(EstimatedSequence::new(
                Quantity::Relative { p },
                f.relative_values(p, n_max)?,
                tol,
            ));
        }
        for p in 0..=k {
            let (lo, hi) = f.q_window(p)?;
            for q in lo..=hi {
                out.push(EstimatedSequence::new(
                    Quantity::A { q, p },
                    f.a_values(q, p, n_max)?,
                    tol,
                ));
            }
            out.push(EstimatedSequence::new(
                Quantity::B { p },
                f.b_values(p, n_max)?,
                tol,
            ));
        }
        for p in 0..=l {
            out.push(EstimatedSequence::new(
                Quantity::C { p },
                f.c_values(p, n_max)?,
                tol,
            ));
        }
    }
    Ok(out)
}

/// Estimated profile of a monomial map from its exact degree sequences.
pub fn engine_profile(f: &MonomialMap, n_max: u32, tol: f64) -> Result<EngineProfile, ProfileError> {
    let sequences = monomial_sequences(f, n_max, tol)?;
    let k = f.dim();
    let l = f.space().base_dim();
    let mut profile = DegreeProfile::empty(k, l);
    for s in &sequences {
        match s.quantity {
            Quantity::Lambda { p } => profile.degrees[p as usize] = s.degree(),
            Quantity::Relative { p } => profile.relative[p as usize] = s.degree(),
            Quantity::C { p } => profile.base[p as usize] = s.degree(),
            _ => {}
        }
    }
    Ok(EngineProfile { profile, sequences })
}

/// Exact profile from eigenvalue moduli of `A` and, when fibred over the first
/// `l` coordinates, of its diagonal blocks.
pub fn oracle_profile(a: &IntMatrix, l: Option<usize>) -> Result<DegreeProfile, ProfileError> {
    let k = a.rows();
    let exact = |d: Vec<f64>| d.into_iter().map(|x| Some(Degree::exact(x))).collect();
    let degrees = exact(eigen_degrees(a)?.degrees);
    let (base, relative) = match l {
        Some(l) => {
            let b: Vec<usize> = (0..l).collect();
            let c: Vec<usize> = (l..k).collect();
            (
                exact(eigen_degrees(&a.submatrix(&b, &b))?.degrees),
                exact(eigen_degrees(&a.submatrix(&c, &c))?.degrees),
            )
        }
        None => (Vec::new(), Vec::new()),
    };
    Ok(DegreeProfile {
        k: k as u32,
        l: l.map(|l| l as u32),
        degrees,
        base,
        relative,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RationalProfile {
    pub profile: DegreeProfile,
    pub sequences: Vec<EstimatedSequence>,
    pub iterates: IterateResult,
}

/// Order-one profile of a rational map: `d_1(f)`, and on skew products
/// `d_1(g)` and `d_1(f|pi)`. Higher orders stay missing.
pub fn rational_profile(
    f: &RationalMapDesc,
    n_max: u32,
    opts: &IterateOptions,
    tol: f64,
) -> Result<RationalProfile, ProfileError> {
    let iterates = iterate_multidegrees(f, n_max, opts)?;
    let space = f.space();
    let skew = iterates.relative.is_some();
    let l = if skew { space.base_dim() } else { None };
    let mut profile = DegreeProfile::empty(space.dim(), l);
    let mut sequences = vec![EstimatedSequence::new(
        Quantity::Lambda { p: 1 },
        iterates.lambda.clone(),
        tol,
    )];
    profile.degrees[1] = sequences[0].degree();
    if let (Some(rel), Some(base)) = (&iterates.relative, &iterates.base) {
        let r = EstimatedSequence::new(Quantity::Relative { p: 1 }, rel.clone(), tol);
        let c = EstimatedSequence::new(Quantity::C { p: 1 }, base.clone(), tol);
        if profile.relative.len() > 1 {
            profile.relative[1] = r.degree();
        }
        if profile.base.len() > 1 {
            profile.base[1] = c.degree();
        }
        sequences.push(r);
        sequences.push(c);
    }
    Ok(RationalProfile {
        profile,
        sequences,
        iterates,
    })
}

/// `|det A|` as an exact integer.
pub fn topological_degree(a: &IntMatrix) -> Option<BigInt> {
    a.det().ok().map(|d| d.abs())
}
