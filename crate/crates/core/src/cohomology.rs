//! Intersection ring of a multiprojective space `P^{n_1} x ... x P^{n_m}`.
//!
//! The even cohomology is `Z[h_1, ..., h_m] / (h_i^{n_i + 1})`, graded by total
//! degree. A [`CohClass`] of degree `p` is stored in the monomial basis
//! `h^e = h_1^{e_1} ... h_m^{e_m}` with `0 <= e_i <= n_i`, `sum e_i = p`.
//! The Kaehler class is `omega = h_1 + ... + h_m`, and when the space carries a
//! fibration over its first `l` factors, `pi^*(omega_Y) = h_1 + ... + h_l`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CohomologyError {
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("classes live on different spaces")]
    SpaceMismatch,
    #[error("product degree {0} + {1} exceeds dimension {2}")]
    DegreeOverflow(u32, u32, u32),
    #[error("degree {0} outside 0..={1}")]
    DegreeOutOfRange(u32, u32),
    #[error("pairing needs complementary degrees, got {0} + {1} != {2}")]
    NotComplementary(u32, u32, u32),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(u32, u32),
    #[error("exponent vector {0:?} is not valid for degree {1}")]
    InvalidExponent(Vec<u32>, u32),
    #[error("space has no fibration")]
    NoFibration,
    #[error("power {0} of the base class exceeds the base dimension {1}")]
    BasePowerTooLarge(u32, u32),
    #[error("alpha index {j} outside the admissible window {lo}..={hi}")]
    AlphaOutOfRange { j: u32, lo: u32, hi: u32 },
}

/// A multiprojective space, optionally fibred by projection onto its first
/// `base_factors` factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Space {
    factors: Vec<u32>,
    base_factors: Option<usize>,
}

impl Space {
    pub fn new(factors: Vec<u32>) -> Result<Self, CohomologyError> {
        if factors.is_empty() {
            return Err(CohomologyError::InvalidSpace("no factors".into()));
        }
        if factors.contains(&0) {
            return Err(CohomologyError::InvalidSpace(
                "every factor must have positive dimension".into(),
            ));
        }
        Ok(Space {
            factors,
            base_factors: None,
        })
    }

    /// Space fibred over the product of its first `l` factors. Both base and
    /// fiber must be nontrivial.
    pub fn fibred(factors: Vec<u32>, l: usize) -> Result<Self, CohomologyError> {
        let mut s = Space::new(factors)?;
        if l == 0 || l >= s.factors.len() {
            return Err(CohomologyError::InvalidSpace(format!(
                "base must consist of 0 < l < {} factors, got l = {l}",
                s.factors.len()
            )));
        }
        s.base_factors = Some(l);
        Ok(s)
    }

    /// `(P^1)^k`.
    pub fn lines(k: usize) -> Result<Self, CohomologyError> {
        Space::new(vec![1; k])
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    /// Total dimension `k`.
    pub fn dim(&self) -> u32 {
        self.factors.iter().sum()
    }

    pub fn base_factors(&self) -> Option<usize> {
        self.base_factors
    }

    /// Dimension of the base `Y` (sum of the first `l` factor dimensions).
    pub fn base_dim(&self) -> Option<u32> {
        self.base_factors
            .map(|l| self.factors[..l].iter().sum::<u32>())
    }

    /// The base `Y` as a space of its own.
    pub fn base_space(&self) -> Option<Space> {
        self.base_factors.map(|l| Space {
            factors: self.factors[..l].to_vec(),
            base_factors: None,
        })
    }

    /// The same space with the fibration forgotten.
    pub fn without_fibration(&self) -> Space {
        Space {
            factors: self.factors.clone(),
            base_factors: None,
        }
    }

    fn top_exponent(&self) -> Vec<u32> {
        self.factors.clone()
    }

    fn check_exponent(&self, e: &[u32], p: u32) -> bool {
        e.len() == self.factors.len()
            && e.iter().zip(&self.factors).all(|(a, n)| a <= n)
            && e.iter().sum::<u32>() == p
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" x ")?;
            }
            write!(f, "P^{n}")?;
        }
        if let Some(l) = self.base_factors {
            write!(f, " (base: first {l})")?;
        }
        Ok(())
    }
}

/// A class of pure degree `p` in the intersection ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohClass {
    space: Space,
    degree: u32,
    coeffs: BTreeMap<Vec<u32>, BigInt>,
}

impl CohClass {
    pub fn zero(space: &Space, degree: u32) -> Result<Self, CohomologyError> {
        if degree > space.dim() {
            return Err(CohomologyError::DegreeOutOfRange(degree, space.dim()));
        }
        Ok(CohClass {
            space: space.clone(),
            degree,
            coeffs: BTreeMap::new(),
        })
    }

    pub fn unit(space: &Space) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(vec![0; space.num_factors()], BigInt::one());
        CohClass {
            space: space.clone(),
            degree: 0,
            coeffs,
        }
    }

    /// The hyperplane class `h_i` (0-based factor index).
    pub fn hyperplane(space: &Space, i: usize) -> Self {
        let mut e = vec![0; space.num_factors()];
        e[i] = 1;
        let mut coeffs = BTreeMap::new();
        coeffs.insert(e, BigInt::one());
        CohClass {
            space: space.clone(),
            degree: 1,
            coeffs,
        }
    }

    /// Build a class from `(exponent, coefficient)` terms; repeated exponents
    /// are summed.
    pub fn from_terms<I>(space: &Space, degree: u32, terms: I) -> Result<Self, CohomologyError>
    where
        I: IntoIterator<Item = (Vec<u32>, BigInt)>,
    {
        let mut c = CohClass::zero(space, degree)?;
        for (e, v) in terms {
            if !space.check_exponent(&e, degree) {
                return Err(CohomologyError::InvalidExponent(e, degree));
            }
            c.add_term(e, v);
        }
        Ok(c)
    }

    fn add_term(&mut self, e: Vec<u32>, v: BigInt) {
        if v.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(v);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += v;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coeff(&self, e: &[u32]) -> BigInt {
        self.coeffs.get(e).cloned().unwrap_or_default()
    }

    /// Nonzero terms in lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficientwise nonnegative in the monomial basis.
    pub fn is_effective(&self) -> bool {
        self.coeffs.values().all(|v| !v.is_negative())
    }

    /// `self <= other`, i.e. `other - self` is effective.
    pub fn le(&self, other: &CohClass) -> Result<bool, CohomologyError> {
        let diff = other.sub(self)?;
        Ok(diff.is_effective())
    }

    pub fn add(&self, other: &CohClass) -> Result<CohClass, CohomologyError> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (e, v) in &other.coeffs {
            out.add_term(e.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &CohClass) -> Result<CohClass, CohomologyError> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (e, v) in &other.coeffs {
            out.add_term(e.clone(), -v);
        }
        Ok(out)
    }

    pub fn scale(&self, s: &BigInt) -> CohClass {
        let mut out = CohClass {
            space: self.space.clone(),
            degree: self.degree,
            coeffs: BTreeMap::new(),
        };
        if !s.is_zero() {
            out.coeffs = self.coeffs.iter().map(|(e, v)| (e.clone(), v * s)).collect();
        }
        out
    }

    fn same_shape(&self, other: &CohClass) -> Result<(), CohomologyError> {
        if self.space != other.space {
            return Err(CohomologyError::SpaceMismatch);
        }
        if self.degree != other.degree {
            return Err(CohomologyError::DegreeMismatch(self.degree, other.degree));
        }
        Ok(())
    }

    /// Cup product with the truncation `h_i^{n_i + 1} = 0`.
    pub fn mul(&self, other: &CohClass) -> Result<CohClass, CohomologyError> {
        if self.space != other.space {
            return Err(CohomologyError::SpaceMismatch);
        }
        let k = self.space.dim();
        let degree = self.degree + other.degree;
        if degree > k {
            return Err(CohomologyError::DegreeOverflow(self.degree, other.degree, k));
        }
        let bounds = &self.space.factors;
        let mut out = CohClass::zero(&self.space, degree)?;
        for (e1, v1) in &self.coeffs {
            'terms: for (e2, v2) in &other.coeffs {
                let mut e = Vec::with_capacity(e1.len());
                for ((a, b), n) in e1.iter().zip(e2).zip(bounds) {
                    if a + b > *n {
                        continue 'terms;
                    }
                    e.push(a + b);
                }
                out.add_term(e, v1 * v2);
            }
        }
        Ok(out)
    }

    /// Top-degree pairing `<self, other> = deg(self . other)`.
    pub fn pair(&self, other: &CohClass) -> Result<BigInt, CohomologyError> {
        if self.space != other.space {
            return Err(CohomologyError::SpaceMismatch);
        }
        let k = self.space.dim();
        if self.degree + other.degree != k {
            return Err(CohomologyError::NotComplementary(self.degree, other.degree, k));
        }
        let top = self.space.top_exponent();
        let mut total = BigInt::zero();
        for (e, v) in &self.coeffs {
            let comp: Vec<u32> = top.iter().zip(e).map(|(n, a)| n - a).collect();
            if let Some(w) = other.coeffs.get(&comp) {
                total += v * w;
            }
        }
        Ok(total)
    }

    /// Mass `<c, omega^{k-p}>`.
    pub fn mass(&self) -> Result<BigInt, CohomologyError> {
        let k = self.space.dim();
        self.pair(&kaehler_power(&self.space, k - self.degree)?)
    }
}

impl fmt::Display for CohClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0 (deg {})", self.degree);
        }
        let mut first = true;
        for (e, v) in &self.coeffs {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{v}")?;
            for (i, a) in e.iter().enumerate() {
                match a {
                    0 => {}
                    1 => write!(f, "*h{}", i + 1)?,
                    _ => write!(f, "*h{}^{a}", i + 1)?,
                }
            }
        }
        Ok(())
    }
}

fn power_of(base: &CohClass, p: u32) -> Result<CohClass, CohomologyError> {
    let mut acc = CohClass::unit(base.space());
    for _ in 0..p {
        acc = acc.mul(base)?;
    }
    Ok(acc)
}

/// `omega_X`.
pub fn kaehler_class(space: &Space) -> CohClass {
    let terms = (0..space.num_factors()).map(|i| {
        let mut e = vec![0; space.num_factors()];
        e[i] = 1;
        (e, BigInt::one())
    });
    CohClass::from_terms(space, 1, terms).expect("unit vectors are valid degree-1 exponents")
}

/// `omega_X^p`.
pub fn kaehler_power(space: &Space, p: u32) -> Result<CohClass, CohomologyError> {
    if p > space.dim() {
        return Err(CohomologyError::DegreeOutOfRange(p, space.dim()));
    }
    power_of(&kaehler_class(space), p)
}

/// `pi^*(omega_Y)` for the coordinate projection onto the base factors.
pub fn base_class(space: &Space) -> Result<CohClass, CohomologyError> {
    let l = space.base_factors().ok_or(CohomologyError::NoFibration)?;
    let terms = (0..l).map(|i| {
        let mut e = vec![0; space.num_factors()];
        e[i] = 1;
        (e, BigInt::one())
    });
    CohClass::from_terms(space, 1, terms)
}

/// `pi^*(omega_Y^j)`. Powers beyond `dim Y` vanish geometrically; they are
/// rejected here so callers handle that case explicitly.
pub fn base_pullback_power(space: &Space, j: u32) -> Result<CohClass, CohomologyError> {
    let dim_y = space.base_dim().ok_or(CohomologyError::NoFibration)?;
    if j > dim_y {
        return Err(CohomologyError::BasePowerTooLarge(j, dim_y));
    }
    power_of(&base_class(space)?, j)
}

/// Admissible index window `max(0, p-k+l) ..= min(p, l)` for `alpha_j`.
pub fn alpha_window(space: &Space, p: u32) -> Result<(u32, u32), CohomologyError> {
    let l = space.base_dim().ok_or(CohomologyError::NoFibration)?;
    let k = space.dim();
    let lo = (p + l).saturating_sub(k);
    Ok((lo, p.min(l)))
}

/// `alpha_j(c) = <c, pi^*(omega_Y^{l-j}) . omega_X^{k-l-p+j}>`.
pub fn alpha(c: &CohClass, j: u32) -> Result<BigInt, CohomologyError> {
    let space = c.space();
    let (lo, hi) = alpha_window(space, c.degree())?;
    if j < lo || j > hi {
        return Err(CohomologyError::AlphaOutOfRange { j, lo, hi });
    }
    let l = space.base_dim().expect("window computed above");
    let k = space.dim();
    let p = c.degree();
    let test = base_pullback_power(space, l - j)?.mul(&kaehler_power(space, k + j - l - p)?)?;
    c.pair(&test)
}
