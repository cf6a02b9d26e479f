//! Term-by-term expansion of sums of products of linear forms in the
//! hyperplane classes, truncated by `h_i^{n_i+1} = 0`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::OracleError;
use crate::cohomology::{CohClass, Space};

pub const MAX_FACTORS: usize = 8;
pub const MAX_EXPANSION: u128 = 20_000_000;

/// `sum_i coeffs[i] h_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearForm(pub Vec<BigInt>);

impl LinearForm {
    pub fn generator(m: usize, i: usize) -> Self {
        let mut c = vec![BigInt::zero(); m];
        c[i] = BigInt::one();
        LinearForm(c)
    }

    pub fn kaehler(m: usize) -> Self {
        LinearForm(vec![BigInt::one(); m])
    }
}

/// `sum_t scalar_t * prod_s form_{t,s}`; every product has the same length.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RingExpr {
    pub terms: Vec<(BigInt, Vec<LinearForm>)>,
}

impl RingExpr {
    pub fn product(forms: Vec<LinearForm>) -> Self {
        RingExpr {
            terms: vec![(BigInt::one(), forms)],
        }
    }

    /// Rewrite a class as a sum of products of generators.
    pub fn from_class(c: &CohClass) -> Self {
        let m = c.space().num_factors();
        let terms = c
            .terms()
            .map(|(e, v)| {
                let forms = e
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &a)| (0..a).map(move |_| LinearForm::generator(m, i)))
                    .collect();
                (v.clone(), forms)
            })
            .collect();
        RingExpr { terms }
    }

    /// Product of two expressions, distributing over both sums.
    pub fn times(&self, other: &RingExpr) -> RingExpr {
        let mut terms = Vec::new();
        for (a, fa) in &self.terms {
            for (b, fb) in &other.terms {
                let mut forms = fa.clone();
                forms.extend(fb.iter().cloned());
                terms.push((a * b, forms));
            }
        }
        RingExpr { terms }
    }
}

/// Expand `expr` of uniform degree `degree` in the ring of `space`.
pub fn ring_expand_oracle(
    space: &Space,
    degree: u32,
    expr: &RingExpr,
) -> Result<CohClass, OracleError> {
    let m = space.num_factors();
    if m > MAX_FACTORS {
        return Err(OracleError::SizeCap(format!("{m} factors > {MAX_FACTORS}")));
    }
    let mut acc: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
    for (scalar, forms) in &expr.terms {
        if forms.len() != degree as usize {
            return Err(OracleError::MixedDegree);
        }
        let work = (m as u128).checked_pow(forms.len() as u32);
        if work.is_none_or(|w| w > MAX_EXPANSION) {
            return Err(OracleError::SizeCap(format!(
                "{m}^{} expansion terms",
                forms.len()
            )));
        }
        // odometer over one generator choice per form
        let mut choice = vec![0usize; forms.len()];
        'outer: loop {
            let mut e = vec![0u32; m];
            let mut coeff = scalar.clone();
            for (form, &i) in forms.iter().zip(&choice) {
                e[i] += 1;
                coeff *= &form.0[i];
            }
            let fits = e.iter().zip(space.factors()).all(|(a, n)| a <= n);
            if fits && !coeff.is_zero() {
                *acc.entry(e).or_insert_with(BigInt::zero) += coeff;
            }
            for slot in choice.iter_mut() {
                *slot += 1;
                if *slot < m {
                    continue 'outer;
                }
                *slot = 0;
            }
            break;
        }
    }
    Ok(CohClass::from_terms(space, degree, acc)?)
}

/// Intersection number of two classes of complementary degree, read off
/// the expanded product.
pub fn pair_oracle(a: &CohClass, b: &CohClass) -> Result<BigInt, OracleError> {
    let space = a.space();
    let prod = RingExpr::from_class(a).times(&RingExpr::from_class(b));
    let top = ring_expand_oracle(space, a.degree() + b.degree(), &prod)?;
    Ok(top.coeff(space.factors()))
}
