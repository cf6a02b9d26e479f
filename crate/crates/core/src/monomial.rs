//! Monomial self-maps of `(P^1)^k`.
//!
//! A map `x -> (x^{A_1}, ..., x^{A_k})` with integer exponent matrix `A` acts on
//! `H^{p,p}` through the `p`-th compound matrix of `A`; `(f^n)^*` is modelled by
//! the entrywise absolute value of `C_p(A)^n` in the basis of `p`-subsets
//! (lexicographic order). Every degree quantity below is an exact integer.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::cohomology::{
    base_pullback_power, kaehler_power, CohClass, CohomologyError, Space,
};
use crate::matrix::{IntMatrix, MatrixError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonomialError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error("exponent matrix is singular (det = 0): the map is not dominant")]
    Singular,
    #[error("degree p = {0} outside 0..={1}")]
    DegreeOutOfRange(u32, u32),
    #[error("fibration dimension {l} must satisfy 0 < l < {k}")]
    InvalidFibrationDim { l: usize, k: usize },
    #[error("matrix is not block lower-triangular for l = {0}: some base coordinate depends on a fiber coordinate")]
    NotFibred(usize),
    #[error("map has no fibration")]
    NoFibration,
    #[error("relative degree order {p} outside 0..={max}")]
    RelativeOutOfRange { p: u32, max: u32 },
    #[error("q = {q} outside the admissible window {lo}..={hi}")]
    QOutOfWindow { q: u32, lo: u32, hi: u32 },
}

/// All `p`-subsets of `0..k` in lexicographic order.
pub fn subsets(k: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, k: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            if k - i < p - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, k, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if p <= k {
        rec(0, k, p, &mut Vec::with_capacity(p), &mut out);
    }
    out
}

/// The `p`-th compound matrix together with its subset indexing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompoundOperator {
    pub p: u32,
    pub subsets: Vec<Vec<usize>>,
    pub matrix: IntMatrix,
}

/// Matrix of all `p x p` minors of a square matrix.
pub fn compound(a: &IntMatrix, p: u32) -> Result<CompoundOperator, MonomialError> {
    if !a.is_square() {
        return Err(MatrixError::NotSquare(a.rows(), a.cols()).into());
    }
    let k = a.rows();
    if p as usize > k {
        return Err(MonomialError::DegreeOutOfRange(p, k as u32));
    }
    let subs = subsets(k, p as usize);
    let n = subs.len();
    let mut m = IntMatrix::zeros(n, n);
    for (i, s) in subs.iter().enumerate() {
        for (j, t) in subs.iter().enumerate() {
            m.set(i, j, a.submatrix(s, t).det()?);
        }
    }
    Ok(CompoundOperator {
        p,
        subsets: subs,
        matrix: m,
    })
}

/// `A_{ij} = 0` for every base row `i < l` and fiber column `j >= l`.
pub fn validate_fibration(a: &IntMatrix, l: usize) -> bool {
    (0..l).all(|i| (l..a.cols()).all(|j| a.get(i, j).is_zero()))
}

/// A dominant monomial self-map of `(P^1)^k`, optionally fibred over the
/// first `l` coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialMap {
    matrix: IntMatrix,
    det: BigInt,
    space: Space,
}

impl MonomialMap {
    pub fn new(matrix: IntMatrix) -> Result<Self, MonomialError> {
        if !matrix.is_square() {
            return Err(MatrixError::NotSquare(matrix.rows(), matrix.cols()).into());
        }
        let det = matrix.det()?;
        if det.is_zero() {
            return Err(MonomialError::Singular);
        }
        let space = Space::lines(matrix.rows())?;
        Ok(MonomialMap { matrix, det, space })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, MonomialError> {
        MonomialMap::new(IntMatrix::from_rows(rows)?)
    }

    /// Fibred map; the first `l` coordinates form the base.
    pub fn fibred(matrix: IntMatrix, l: usize) -> Result<Self, MonomialError> {
        let mut f = MonomialMap::new(matrix)?;
        let k = f.dim() as usize;
        if l == 0 || l >= k {
            return Err(MonomialError::InvalidFibrationDim { l, k });
        }
        if !validate_fibration(&f.matrix, l) {
            return Err(MonomialError::NotFibred(l));
        }
        f.space = Space::fibred(vec![1; k], l)?;
        Ok(f)
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn dim(&self) -> u32 {
        self.matrix.rows() as u32
    }

    pub fn fibration_dim(&self) -> Option<usize> {
        self.space.base_factors()
    }

    pub fn topological_degree(&self) -> BigInt {
        self.det.abs()
    }

    /// Diagonal block acting on the base, i.e. the induced map `g`.
    pub fn base_block(&self) -> Result<IntMatrix, MonomialError> {
        let l = self.fibration_dim().ok_or(MonomialError::NoFibration)?;
        let idx: Vec<usize> = (0..l).collect();
        Ok(self.matrix.submatrix(&idx, &idx))
    }

    /// Diagonal block acting along the fibers.
    pub fn fiber_block(&self) -> Result<IntMatrix, MonomialError> {
        let l = self.fibration_dim().ok_or(MonomialError::NoFibration)?;
        let idx: Vec<usize> = (l..self.matrix.rows()).collect();
        Ok(self.matrix.submatrix(&idx, &idx))
    }

    /// The induced base map `g` as a monomial map of its own.
    pub fn base_map(&self) -> Result<MonomialMap, MonomialError> {
        MonomialMap::new(self.base_block()?)
    }

    fn check_p(&self, p: u32) -> Result<(), MonomialError> {
        if p > self.dim() {
            return Err(MonomialError::DegreeOutOfRange(p, self.dim()));
        }
        Ok(())
    }

    fn base_dim(&self) -> Result<u32, MonomialError> {
        self.space.base_dim().ok_or(MonomialError::NoFibration)
    }

    /// `(f^n)^*(omega^p)` for `n = 0..=n_max`.
    pub fn pullback_classes(&self, p: u32, n_max: u32) -> Result<Vec<CohClass>, MonomialError> {
        self.check_p(p)?;
        let comp = compound(&self.matrix, p)?;
        let omega_p = kaehler_power(&self.space, p)?;
        let weights: Vec<BigInt> = comp
            .subsets
            .iter()
            .map(|s| omega_p.coeff(&indicator(self.matrix.rows(), s)))
            .collect();
        let mut power = IntMatrix::identity(comp.subsets.len());
        let mut out = Vec::with_capacity(n_max as usize + 1);
        for n in 0..=n_max {
            if n > 0 {
                power = comp.matrix.mul(&power)?;
            }
            out.push(class_from_operator(&self.space, p, &comp.subsets, &weights, &power)?);
        }
        Ok(out)
    }

    pub fn pullback_class(&self, p: u32, n: u32) -> Result<CohClass, MonomialError> {
        self.check_p(p)?;
        let comp = compound(&self.matrix, p)?;
        let omega_p = kaehler_power(&self.space, p)?;
        let weights: Vec<BigInt> = comp
            .subsets
            .iter()
            .map(|s| omega_p.coeff(&indicator(self.matrix.rows(), s)))
            .collect();
        let power = comp.matrix.pow(n)?;
        class_from_operator(&self.space, p, &comp.subsets, &weights, &power)
    }

    /// `lambda_p(f^n) = ||(f^n)^*(omega^p)||`.
    pub fn lambda_p(&self, p: u32, n: u32) -> Result<BigInt, MonomialError> {
        Ok(self.pullback_class(p, n)?.mass()?)
    }

    pub fn lambda_values(&self, p: u32, n_max: u32) -> Result<Vec<BigInt>, MonomialError> {
        self.pullback_classes(p, n_max)?
            .iter()
            .map(|c| c.mass().map_err(Into::into))
            .collect()
    }

    fn check_relative_p(&self, p: u32) -> Result<u32, MonomialError> {
        let l = self.base_dim()?;
        let max = self.dim() - l;
        if p > max {
            return Err(MonomialError::RelativeOutOfRange { p, max });
        }
        Ok(l)
    }

    /// `lambda_p(f^n | pi) = <(f^n)^*(omega^p) . pi^*(omega_Y^l), omega^{k-l-p}>`.
    pub fn lambda_relative(&self, p: u32, n: u32) -> Result<BigInt, MonomialError> {
        let l = self.check_relative_p(p)?;
        let c = self.pullback_class(p, n)?;
        relative_from_class(&c, l, self.dim())
    }

    pub fn relative_values(&self, p: u32, n_max: u32) -> Result<Vec<BigInt>, MonomialError> {
        let l = self.check_relative_p(p)?;
        self.pullback_classes(p, n_max)?
            .iter()
            .map(|c| relative_from_class(c, l, self.dim()))
            .collect()
    }

    /// Admissible `q` for `a_{q,p}`: `max(0, p-l) ..= min(p, k-l)`.
    pub fn q_window(&self, p: u32) -> Result<(u32, u32), MonomialError> {
        self.check_p(p)?;
        let l = self.base_dim()?;
        Ok((p.saturating_sub(l), p.min(self.dim() - l)))
    }

    fn a_test_class(&self, q: u32, p: u32) -> Result<CohClass, MonomialError> {
        let (lo, hi) = self.q_window(p)?;
        if q < lo || q > hi {
            return Err(MonomialError::QOutOfWindow { q, lo, hi });
        }
        let l = self.base_dim()?;
        let k = self.dim();
        Ok(base_pullback_power(&self.space, l + q - p)?.mul(&kaehler_power(&self.space, k - l - q)?)?)
    }

    /// `a_{q,p}(n) = <(f^n)^*(omega^p), pi^*(omega_Y^{l-p+q}) . omega^{k-l-q}>`.
    pub fn a_qp(&self, q: u32, p: u32, n: u32) -> Result<BigInt, MonomialError> {
        let test = self.a_test_class(q, p)?;
        Ok(self.pullback_class(p, n)?.pair(&test)?)
    }

    pub fn a_values(&self, q: u32, p: u32, n_max: u32) -> Result<Vec<BigInt>, MonomialError> {
        let test = self.a_test_class(q, p)?;
        self.pullback_classes(p, n_max)?
            .iter()
            .map(|c| c.pair(&test).map_err(Into::into))
            .collect()
    }

    /// `b_p(n) = sum_q a_{q,p}(n)` over the admissible window.
    pub fn b_p(&self, p: u32, n: u32) -> Result<BigInt, MonomialError> {
        let (lo, hi) = self.q_window(p)?;
        let c = self.pullback_class(p, n)?;
        let mut total = BigInt::zero();
        for q in lo..=hi {
            total += c.pair(&self.a_test_class(q, p)?)?;
        }
        Ok(total)
    }

    pub fn b_values(&self, p: u32, n_max: u32) -> Result<Vec<BigInt>, MonomialError> {
        let (lo, hi) = self.q_window(p)?;
        let tests = (lo..=hi)
            .map(|q| self.a_test_class(q, p))
            .collect::<Result<Vec<_>, _>>()?;
        self.pullback_classes(p, n_max)?
            .iter()
            .map(|c| {
                tests
                    .iter()
                    .try_fold(BigInt::zero(), |acc, t| Ok(acc + c.pair(t)?))
            })
            .collect()
    }

    /// `c_p(n) = lambda_p(g^n)` for the induced base map.
    pub fn c_values(&self, p: u32, n_max: u32) -> Result<Vec<BigInt>, MonomialError> {
        self.base_map()?.lambda_values(p, n_max)
    }
}

/// `c_p(n) = lambda_p(g^n)` for a monomial map `g` given by its matrix.
pub fn c_p(g_block: &IntMatrix, p: u32, n: u32) -> Result<BigInt, MonomialError> {
    MonomialMap::new(g_block.clone())?.lambda_p(p, n)
}

fn indicator(k: usize, s: &[usize]) -> Vec<u32> {
    let mut e = vec![0; k];
    for &i in s {
        e[i] = 1;
    }
    e
}

fn class_from_operator(
    space: &Space,
    p: u32,
    subs: &[Vec<usize>],
    weights: &[BigInt],
    power: &IntMatrix,
) -> Result<CohClass, MonomialError> {
    let k = space.num_factors();
    let mut coeffs: Vec<BigInt> = vec![BigInt::zero(); subs.len()];
    for (si, w) in weights.iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        for (ti, acc) in coeffs.iter_mut().enumerate() {
            let m = power.get(si, ti);
            if !m.is_zero() {
                *acc += w * m.abs();
            }
        }
    }
    Ok(CohClass::from_terms(
        space,
        p,
        subs.iter()
            .zip(coeffs)
            .map(|(t, v)| (indicator(k, t), v)),
    )?)
}

fn relative_from_class(c: &CohClass, l: u32, k: u32) -> Result<BigInt, MonomialError> {
    let space = c.space();
    let wedge = c.mul(&base_pullback_power(space, l)?)?;
    Ok(wedge.pair(&kaehler_power(space, k - l - c.degree())?)?)
}
