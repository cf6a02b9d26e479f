//! Multihomogeneous rational self-maps and their iterates.
//!
//! Factor `i` of the space contributes the `n_i + 1` homogeneous variables
//! `offset_i .. offset_i + n_i + 1`. A map is one tuple of `n_i + 1` polynomials
//! per factor; all entries of a tuple share a multidegree and, after reduction,
//! have no common factor. Degree drops under iteration come only from that
//! cancellation.

use std::ops::Range;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::gcd::gcd_many;
use super::poly::{inv_mod, mul_mod, sub_mod, Poly};
use crate::cohomology::{
    base_pullback_power, kaehler_power, CohClass, CohomologyError, Space,
};
use crate::monomial::MonomialMap;

pub const DEFAULT_DEGREE_CAP: u32 = 400;
pub const DEFAULT_ITERATES: u32 = 8;

const DOMINANCE_PRIME: u64 = (1 << 61) - 1;
const DOMINANCE_POINTS: usize = 3;
const DOMINANCE_DRAWS: usize = 30;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RationalError {
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error("polynomial has {got} variables, the space needs {expected}")]
    VariableCount { expected: usize, got: usize },
    #[error("polynomial is not homogeneous in the variables of factor {factor}")]
    NotHomogeneous { factor: usize },
    #[error("expected {expected} component tuples (one per factor), got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("component {factor} needs {expected} polynomials, got {got}")]
    TupleLength {
        factor: usize,
        expected: usize,
        got: usize,
    },
    #[error("polynomials of component {factor} have different multidegrees")]
    MixedMultidegree { factor: usize },
    #[error("component {factor} is identically zero")]
    ZeroComponent { factor: usize },
    #[error("composition collapsed component {factor} to zero (degenerate composite)")]
    Collapse { factor: usize },
    #[error("maps live on different spaces")]
    SpaceMismatch,
    #[error("map has no fibration")]
    NoFibration,
    #[error("map is not a skew product over its first {0} factors")]
    NotSkew(usize),
}

/// Variable ranges of each factor.
pub fn variable_blocks(space: &Space) -> Vec<Range<usize>> {
    let mut start = 0;
    space
        .factors()
        .iter()
        .map(|&n| {
            let r = start..start + n as usize + 1;
            start = r.end;
            r
        })
        .collect()
}

pub fn variable_count(space: &Space) -> usize {
    space.factors().iter().map(|&n| n as usize + 1).sum()
}

/// A polynomial homogeneous in each factor's block of variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiHomPoly {
    space: Space,
    poly: Poly,
    multidegree: Vec<u32>,
}

impl MultiHomPoly {
    pub fn new(space: &Space, poly: Poly) -> Result<Self, RationalError> {
        let expected = variable_count(space);
        if poly.nvars() != expected {
            return Err(RationalError::VariableCount {
                expected,
                got: poly.nvars(),
            });
        }
        let multidegree = if poly.is_zero() {
            Vec::new()
        } else {
            variable_blocks(space)
                .into_iter()
                .enumerate()
                .map(|(factor, r)| {
                    poly.block_degree(r)
                        .ok_or(RationalError::NotHomogeneous { factor })
                })
                .collect::<Result<_, _>>()?
        };
        Ok(MultiHomPoly {
            space: space.clone(),
            poly,
            multidegree,
        })
    }

    pub fn from_terms<I>(space: &Space, terms: I) -> Result<Self, RationalError>
    where
        I: IntoIterator<Item = (Vec<u32>, BigInt)>,
    {
        let expected = variable_count(space);
        let terms: Vec<_> = terms.into_iter().collect();
        if let Some((e, _)) = terms.iter().find(|(e, _)| e.len() != expected) {
            return Err(RationalError::VariableCount {
                expected,
                got: e.len(),
            });
        }
        MultiHomPoly::new(space, Poly::from_terms(expected, terms))
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    /// Degree in each factor; empty for the zero polynomial.
    pub fn multidegree(&self) -> &[u32] {
        &self.multidegree
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }
}

/// Options bounding symbolic iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterateOptions {
    /// Largest total degree a component may reach, judged on the degree of the
    /// composite before cancellation.
    pub degree_cap: u32,
}

impl Default for IterateOptions {
    fn default() -> Self {
        IterateOptions {
            degree_cap: DEFAULT_DEGREE_CAP,
        }
    }
}

/// Degree data of `f^n` for `n = 1..=computed`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterateResult {
    /// `multidegrees[n-1][i][j]`: degree of component `i` of `f^n` in factor `j`.
    pub multidegrees: Vec<Vec<Vec<u32>>>,
    /// `lambda_1(f^n)` for `n = 0..=computed`.
    pub lambda: Vec<BigInt>,
    /// Fiber degrees `lambda_1(f^n | pi)` for `n = 0..=computed` on skew products.
    pub relative: Option<Vec<BigInt>>,
    /// `lambda_1(g^n)` of the induced base map on skew products.
    pub base: Option<Vec<BigInt>>,
    pub requested: u32,
    pub truncated: bool,
}

impl IterateResult {
    pub fn computed(&self) -> u32 {
        self.multidegrees.len() as u32
    }
}

/// A rational self-map in reduced form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMapDesc {
    space: Space,
    components: Vec<Vec<MultiHomPoly>>,
    degrees: Vec<Vec<u32>>,
}

impl RationalMapDesc {
    /// Validate and reduce. `space` carries the optional fibration.
    pub fn new(space: Space, components: Vec<Vec<Poly>>) -> Result<Self, RationalError> {
        let m = space.num_factors();
        if components.len() != m {
            return Err(RationalError::ComponentCount {
                expected: m,
                got: components.len(),
            });
        }
        let mut checked = Vec::with_capacity(m);
        for (factor, tuple) in components.into_iter().enumerate() {
            let expected = space.factors()[factor] as usize + 1;
            if tuple.len() != expected {
                return Err(RationalError::TupleLength {
                    factor,
                    expected,
                    got: tuple.len(),
                });
            }
            let mut md: Option<Vec<u32>> = None;
            for p in &tuple {
                let h = MultiHomPoly::new(&space, p.clone())?;
                if h.is_zero() {
                    continue;
                }
                match &md {
                    None => md = Some(h.multidegree.clone()),
                    Some(d) if *d != h.multidegree => {
                        return Err(RationalError::MixedMultidegree { factor })
                    }
                    _ => {}
                }
            }
            if md.is_none() {
                return Err(RationalError::ZeroComponent { factor });
            }
            checked.push(tuple);
        }
        RationalMapDesc::from_tuples(space, checked, |factor| RationalError::ZeroComponent {
            factor,
        })
    }

    fn from_tuples(
        space: Space,
        tuples: Vec<Vec<Poly>>,
        on_zero: impl Fn(usize) -> RationalError,
    ) -> Result<Self, RationalError> {
        let mut components = Vec::with_capacity(tuples.len());
        let mut degrees = Vec::with_capacity(tuples.len());
        for (factor, tuple) in tuples.into_iter().enumerate() {
            let reduced = reduce_tuple(tuple).ok_or_else(|| on_zero(factor))?;
            let entries = reduced
                .into_iter()
                .map(|p| MultiHomPoly::new(&space, p))
                .collect::<Result<Vec<_>, _>>()?;
            let md = entries
                .iter()
                .find(|e| !e.is_zero())
                .map(|e| e.multidegree.clone())
                .expect("reduced tuple has a nonzero entry");
            components.push(entries);
            degrees.push(md);
        }
        Ok(RationalMapDesc {
            space,
            components,
            degrees,
        })
    }

    pub fn identity(space: Space) -> Self {
        let n = variable_count(&space);
        let tuples = variable_blocks(&space)
            .into_iter()
            .map(|r| r.map(|v| Poly::var(n, v)).collect())
            .collect();
        RationalMapDesc::new(space, tuples).expect("identity is a valid map")
    }

    /// Polynomial form of a monomial map on `(P^1)^k`, with affine coordinate
    /// `x_j = t_j / s_j` on factor `j`.
    pub fn from_monomial(f: &MonomialMap) -> Self {
        let a = f.matrix();
        let k = a.rows();
        let n = 2 * k;
        let tuples = (0..k)
            .map(|i| {
                let mut num = vec![0u32; n];
                let mut den = vec![0u32; n];
                for j in 0..k {
                    let e = a.get(i, j);
                    let mag = u32::try_from(e.abs()).expect("exponent fits in u32");
                    if e.is_positive() {
                        num[2 * j + 1] += mag;
                        den[2 * j] += mag;
                    } else {
                        num[2 * j] += mag;
                        den[2 * j + 1] += mag;
                    }
                }
                vec![
                    Poly::monomial(n, den, BigInt::one()),
                    Poly::monomial(n, num, BigInt::one()),
                ]
            })
            .collect();
        RationalMapDesc::new(f.space().clone(), tuples).expect("monomial tuples are valid")
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn components(&self) -> &[Vec<MultiHomPoly>] {
        &self.components
    }

    /// `d[i][j]`: degree of component `i` in factor `j`.
    pub fn multidegrees(&self) -> &[Vec<u32>] {
        &self.degrees
    }

    /// `f ∘ g`: substitute the components of `g` into `f`, then reduce.
    pub fn compose(&self, g: &RationalMapDesc) -> Result<RationalMapDesc, RationalError> {
        if self.space != g.space {
            return Err(RationalError::SpaceMismatch);
        }
        let images: Vec<Poly> = g
            .components
            .iter()
            .flat_map(|t| t.iter().map(|h| h.poly.clone()))
            .collect();
        let tuples = self
            .components
            .iter()
            .map(|t| t.iter().map(|h| h.poly.substitute(&images)).collect())
            .collect();
        RationalMapDesc::from_tuples(self.space.clone(), tuples, |factor| {
            RationalError::Collapse { factor }
        })
    }

    /// Multidegrees of `f ∘ g` before any cancellation.
    pub fn naive_composite_degrees(&self, g: &RationalMapDesc) -> Vec<Vec<u32>> {
        let m = self.degrees.len();
        (0..m)
            .map(|i| {
                (0..m)
                    .map(|k| (0..m).map(|j| self.degrees[i][j] * g.degrees[j][k]).sum())
                    .collect()
            })
            .collect()
    }

    /// Whether the first `l` components omit every fiber variable.
    pub fn validate_skew(&self) -> Result<bool, RationalError> {
        let l = self.space.base_factors().ok_or(RationalError::NoFibration)?;
        let blocks = variable_blocks(&self.space);
        let fiber_vars = blocks[l].start..blocks.last().expect("nonempty").end;
        Ok(self.components[..l]
            .iter()
            .flatten()
            .all(|h| fiber_vars.clone().all(|v| !h.poly.involves(v))))
    }

    /// `f^*(omega_X) = sum_i sum_j d_ij h_j`.
    pub fn pullback_class(&self) -> Result<CohClass, RationalError> {
        Ok(class_from_degrees(&self.space, &self.degrees)?)
    }

    /// `lambda_1 = mass(f^*(omega_X))`.
    pub fn lambda_1(&self) -> Result<BigInt, RationalError> {
        Ok(self.pullback_class()?.mass()?)
    }

    /// Degree along a generic fiber:
    /// `<f^*(omega_X) . pi^*(omega_Y^{dim Y}), omega^{k - dim Y - 1}>`.
    pub fn relative_lambda_1(&self) -> Result<BigInt, RationalError> {
        if !self.validate_skew()? {
            return Err(RationalError::NotSkew(
                self.space.base_factors().expect("validated"),
            ));
        }
        relative_from_degrees(&self.space, &self.degrees)
    }

    /// `lambda_1` of the induced base map.
    pub fn base_lambda_1(&self) -> Result<BigInt, RationalError> {
        if !self.validate_skew()? {
            return Err(RationalError::NotSkew(
                self.space.base_factors().expect("validated"),
            ));
        }
        base_from_degrees(&self.space, &self.degrees)
    }

    /// Probabilistic dominance test: the affine-chart Jacobian has full rank
    /// modulo a large prime at one of a few random points. `false` means no
    /// witness was found, not a proof of degeneracy.
    pub fn is_dominant(&self, seed: u64) -> bool {
        let blocks = variable_blocks(&self.space);
        let nv = variable_count(&self.space);
        // Chart: the first variable of each block is 1.
        let chart: Vec<usize> = blocks.iter().flat_map(|r| r.start + 1..r.end).collect();
        let dim = chart.len();
        if self.components.iter().flatten().any(MultiHomPoly::is_zero) {
            return false;
        }
        let mut rows: Vec<(&Poly, &Poly)> = Vec::with_capacity(dim);
        for t in &self.components {
            for h in &t[1..] {
                rows.push((&t[0].poly, &h.poly));
            }
        }
        let derivs: Vec<Vec<(Poly, Poly)>> = rows
            .iter()
            .map(|(den, num)| {
                chart
                    .iter()
                    .map(|&v| (den.derivative(v), num.derivative(v)))
                    .collect()
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut good = 0;
        for _ in 0..DOMINANCE_DRAWS {
            if good == DOMINANCE_POINTS {
                break;
            }
            let mut point: Vec<u64> = (0..nv)
                .map(|_| rng.gen_range(1..DOMINANCE_PRIME))
                .collect();
            for r in &blocks {
                point[r.start] = 1;
            }
            let p = DOMINANCE_PRIME;
            if rows.iter().any(|(den, _)| den.eval_mod(&point, p) == 0) {
                continue;
            }
            good += 1;
            let jac: Vec<Vec<u64>> = rows
                .iter()
                .zip(&derivs)
                .map(|((den, num), ds)| {
                    let d0 = den.eval_mod(&point, p);
                    let n0 = num.eval_mod(&point, p);
                    ds.iter()
                        .map(|(dd, dn)| {
                            sub_mod(
                                mul_mod(d0, dn.eval_mod(&point, p), p),
                                mul_mod(n0, dd.eval_mod(&point, p), p),
                                p,
                            )
                        })
                        .collect()
                })
                .collect();
            if rank_mod(jac, p) == dim {
                return true;
            }
        }
        false
    }
}

fn rank_mod(mut m: Vec<Vec<u64>>, p: u64) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = inv_mod(m[rank][c], p);
        let pivot = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[c] != 0 {
                let factor = mul_mod(row[c], inv, p);
                for (x, &y) in row[c..].iter_mut().zip(&pivot[c..]) {
                    *x = sub_mod(*x, mul_mod(factor, y, p), p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Remove monomial, integer and polynomial content from a tuple and fix the
/// sign. `None` if every entry is zero.
fn reduce_tuple(tuple: Vec<Poly>) -> Option<Vec<Poly>> {
    let nvars = tuple.first()?.nvars();
    let nonzero: Vec<&Poly> = tuple.iter().filter(|p| !p.is_zero()).collect();
    if nonzero.is_empty() {
        return None;
    }
    let mut mono = nonzero[0].monomial_content();
    for p in &nonzero[1..] {
        for (a, b) in mono.iter_mut().zip(p.monomial_content()) {
            *a = (*a).min(b);
        }
    }
    let content = nonzero
        .iter()
        .fold(BigInt::zero(), |acc, p| num_integer::Integer::gcd(&acc, &p.content()));
    let mut tuple: Vec<Poly> = tuple
        .iter()
        .map(|p| p.div_monomial(&mono).div_integer(&content))
        .collect();
    let g = gcd_many(tuple.iter().filter(|p| !p.is_zero()), nvars);
    if !g.is_constant() {
        tuple = tuple
            .iter()
            .map(|p| p.exact_div(&g).expect("gcd divides every entry"))
            .collect();
    }
    let flip = tuple
        .iter()
        .find(|p| !p.is_zero())
        .and_then(|p| p.leading())
        .is_some_and(|(_, c)| c.is_negative());
    if flip {
        tuple = tuple.iter().map(Poly::neg).collect();
    }
    Some(tuple)
}

fn class_from_degrees(space: &Space, d: &[Vec<u32>]) -> Result<CohClass, CohomologyError> {
    let m = space.num_factors();
    let terms = (0..m).map(|j| {
        let mut e = vec![0; m];
        e[j] = 1;
        let total: u64 = d.iter().map(|row| row[j] as u64).sum();
        (e, BigInt::from(total))
    });
    CohClass::from_terms(space, 1, terms)
}

fn relative_from_degrees(space: &Space, d: &[Vec<u32>]) -> Result<BigInt, RationalError> {
    let dim_y = space.base_dim().ok_or(RationalError::NoFibration)?;
    let c = class_from_degrees(space, d)?;
    let wedge = c.mul(&base_pullback_power(space, dim_y)?)?;
    Ok(wedge.pair(&kaehler_power(space, space.dim() - dim_y - 1)?)?)
}

fn base_from_degrees(space: &Space, d: &[Vec<u32>]) -> Result<BigInt, RationalError> {
    let l = space.base_factors().ok_or(RationalError::NoFibration)?;
    let base = space.base_space().ok_or(RationalError::NoFibration)?;
    let block: Vec<Vec<u32>> = d[..l].iter().map(|row| row[..l].to_vec()).collect();
    Ok(class_from_degrees(&base, &block)?.mass()?)
}

/// Iterate `f` up to `n` times, recording reduced multidegrees and the
/// `p = 1` degree sequences. Stops early, flagging truncation, once a composite
/// would exceed the degree cap.
pub fn iterate_multidegrees(
    f: &RationalMapDesc,
    n: u32,
    opts: &IterateOptions,
) -> Result<IterateResult, RationalError> {
    let space = &f.space;
    let skew = match space.base_factors() {
        Some(_) => f.validate_skew()?,
        None => false,
    };
    let identity_degrees: Vec<Vec<u32>> = (0..space.num_factors())
        .map(|i| (0..space.num_factors()).map(|j| u32::from(i == j)).collect())
        .collect();
    let mut lambda = vec![class_from_degrees(space, &identity_degrees)?.mass()?];
    let mut relative = skew
        .then(|| relative_from_degrees(space, &identity_degrees).map(|v| vec![v]))
        .transpose()?;
    let mut base = skew
        .then(|| base_from_degrees(space, &identity_degrees).map(|v| vec![v]))
        .transpose()?;
    let mut multidegrees = Vec::new();
    let mut truncated = false;
    let mut current: Option<RationalMapDesc> = None;
    for _ in 1..=n {
        let next = match &current {
            None => {
                if exceeds_cap(&f.degrees, opts.degree_cap) {
                    truncated = true;
                    break;
                }
                f.clone()
            }
            Some(prev) => {
                if exceeds_cap(&f.naive_composite_degrees(prev), opts.degree_cap) {
                    truncated = true;
                    break;
                }
                f.compose(prev)?
            }
        };
        lambda.push(next.lambda_1()?);
        if let Some(r) = relative.as_mut() {
            r.push(relative_from_degrees(space, &next.degrees)?);
        }
        if let Some(b) = base.as_mut() {
            b.push(base_from_degrees(space, &next.degrees)?);
        }
        multidegrees.push(next.degrees.clone());
        current = Some(next);
    }
    Ok(IterateResult {
        multidegrees,
        lambda,
        relative,
        base,
        requested: n,
        truncated,
    })
}

fn exceeds_cap(d: &[Vec<u32>], cap: u32) -> bool {
    d.iter().any(|row| row.iter().map(|&x| x as u64).sum::<u64>() > cap as u64)
}

/// `lambda_1(f^n | pi)`: the degree of `f^n` along a generic fiber.
pub fn fiber_degree(f: &RationalMapDesc, n: u32) -> Result<BigInt, RationalError> {
    if !f.validate_skew()? {
        return Err(RationalError::NotSkew(
            f.space.base_factors().expect("validated"),
        ));
    }
    let opts = IterateOptions {
        degree_cap: u32::MAX,
    };
    let res = iterate_multidegrees(f, n, &opts)?;
    Ok(res
        .relative
        .expect("skew map has relative degrees")
        .pop()
        .expect("nonempty"))
}
