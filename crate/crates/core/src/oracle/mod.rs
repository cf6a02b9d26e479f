//! Ground truth computed without the main engines: eigenvalue products for
//! monomial maps, brute-force ring expansion, and minors by permutation sums.

pub mod ring;
pub mod roots;
pub mod upoly;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cohomology::CohomologyError;
use crate::matrix::IntMatrix;
use crate::monomial::{compound, subsets};

pub use ring::{pair_oracle, ring_expand_oracle, LinearForm, RingExpr};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("matrix must be square and nonsingular")]
    Singular,
    #[error("root finder did not reach 1e-10 relative accuracy (degree {degree})")]
    NoConvergence { degree: usize },
    #[error("characteristic polynomial coefficient outside f64 range")]
    CoefficientRange,
    #[error("expansion exceeds the size cap: {0}")]
    SizeCap(String),
    #[error("expression mixes products of different lengths")]
    MixedDegree,
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
}

/// Moduli of the eigenvalues (descending) and their prefix products.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenDegrees {
    pub moduli: Vec<f64>,
    /// `degrees[p]` = product of the `p` largest moduli.
    pub degrees: Vec<f64>,
}

impl EigenDegrees {
    fn from_moduli(mut moduli: Vec<f64>) -> Self {
        moduli.sort_by(|a, b| b.total_cmp(a));
        let mut degrees = Vec::with_capacity(moduli.len() + 1);
        let mut acc = 1.0;
        degrees.push(acc);
        for m in &moduli {
            acc *= m;
            degrees.push(acc);
        }
        EigenDegrees { moduli, degrees }
    }
}

/// Eigenvalue moduli of an integer matrix from its exact characteristic
/// polynomial, split into squarefree parts before root finding.
pub fn eigen_degrees(a: &IntMatrix) -> Result<EigenDegrees, OracleError> {
    if !a.is_square() || a.det().map_or(true, |d| d.is_zero()) {
        return Err(OracleError::Singular);
    }
    let cp = upoly::charpoly(a);
    let mut moduli = Vec::with_capacity(a.rows());
    for (factor, mult) in upoly::squarefree(&cp) {
        for z in roots::roots(&factor)? {
            moduli.extend(std::iter::repeat_n(z.norm(), mult));
        }
    }
    debug_assert_eq!(moduli.len(), a.rows());
    Ok(EigenDegrees::from_moduli(moduli))
}

fn permutations(p: usize) -> Vec<(Vec<usize>, i32)> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<(Vec<usize>, i32)>) {
        let p = used.len();
        if cur.len() == p {
            let inversions = (0..p)
                .flat_map(|i| (i + 1..p).map(move |j| (i, j)))
                .filter(|&(i, j)| cur[i] > cur[j])
                .count();
            out.push((cur.clone(), if inversions % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for v in 0..p {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; p], &mut out);
    out
}

/// Minor `det M[rows, cols]` as a signed sum over permutations.
pub fn leibniz_minor(m: &IntMatrix, rows: &[usize], cols: &[usize]) -> BigInt {
    permutations(rows.len())
        .into_iter()
        .map(|(perm, sign)| {
            let prod: BigInt = rows
                .iter()
                .zip(&perm)
                .map(|(&r, &c)| m.get(r, cols[c]).clone())
                .product();
            prod * sign
        })
        .sum()
}

/// Whether the `p`-th compound of `A^n`, taken minor by minor from the integer
/// matrix `A^n`, equals the `n`-th power of the compound of `A`.
pub fn compound_vs_minors(a: &IntMatrix, p: u32, n: u32) -> Result<bool, OracleError> {
    if !a.is_square() {
        return Err(OracleError::Singular);
    }
    let an = a.pow(n).map_err(|_| OracleError::Singular)?;
    let rhs = compound(a, p)
        .map_err(|_| OracleError::Singular)?
        .matrix
        .pow(n)
        .map_err(|_| OracleError::Singular)?;
    let subs = subsets(a.rows(), p as usize);
    Ok(subs.iter().enumerate().all(|(i, s)| {
        subs.iter()
            .enumerate()
            .all(|(j, t)| leibniz_minor(&an, s, t) == *rhs.get(i, j))
    }))
}

/// `|det A|` as a float, for cross-checking `d_k`.
pub fn abs_det(a: &IntMatrix) -> Option<f64> {
    a.det().ok().and_then(|d| num_traits::Signed::abs(&d).to_f64())
}
