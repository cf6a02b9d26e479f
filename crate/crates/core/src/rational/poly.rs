//! Sparse multivariate polynomials over the integers.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vectors, so iteration is in
//! lexicographic order and the last entry is the lex-leading term.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, BigInt::one())
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        Poly::monomial(nvars, vec![0; nvars], c)
    }

    pub fn monomial(nvars: usize, e: Vec<u32>, c: BigInt) -> Self {
        assert_eq!(e.len(), nvars, "exponent length must match variable count");
        let mut p = Poly::zero(nvars);
        p.add_term(e, c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Poly::monomial(nvars, e, BigInt::one())
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, BigInt)>,
    {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length must match variable count");
            p.add_term(e, c);
        }
        p
    }

    pub(crate) fn add_term(&mut self, e: Vec<u32>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for nonzero constants and for zero.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&a| a == 0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Lex-leading term.
    pub fn leading(&self) -> Option<(&Vec<u32>, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn degree_in(&self, v: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[v]).max()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Sum of exponents over the variables in `range`, if that sum is the same
    /// for every term.
    pub fn block_degree(&self, range: std::ops::Range<usize>) -> Option<u32> {
        let mut it = self.terms.keys().map(|e| e[range.clone()].iter().sum::<u32>());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn involves(&self, v: usize) -> bool {
        self.terms.keys().any(|e| e[v] > 0)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, s: &BigInt) -> Poly {
        if s.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    /// Multiply by the monomial `x^e`.
    pub fn shift(&self, e: &[u32]) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (t.iter().zip(e).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, mut n: u32) -> Poly {
        let mut result = Poly::one(self.nvars);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Positive gcd of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    /// Componentwise minimum exponent over all terms.
    pub fn monomial_content(&self) -> Vec<u32> {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return vec![0; self.nvars];
        };
        let mut m = first.clone();
        for e in it {
            for (a, b) in m.iter_mut().zip(e) {
                *a = (*a).min(*b);
            }
        }
        m
    }

    /// Divide every coefficient by `d`, which must divide all of them.
    pub fn div_integer(&self, d: &BigInt) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    debug_assert!((c % d).is_zero());
                    (e.clone(), c / d)
                })
                .collect(),
        }
    }

    /// Divide by `x^e`, which must divide every term.
    pub fn div_monomial(&self, e: &[u32]) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (t.iter().zip(e).map(|(a, b)| a - b).collect(), c.clone()))
                .collect(),
        }
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        let (de, dc) = d.leading()?;
        let (de, dc) = (de.clone(), dc.clone());
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while let Some((re, rc)) = rem.leading() {
            if re.iter().zip(&de).any(|(a, b)| a < b) {
                return None;
            }
            let (q, r) = rc.div_rem(&dc);
            if !r.is_zero() {
                return None;
            }
            let shift: Vec<u32> = re.iter().zip(&de).map(|(a, b)| a - b).collect();
            for (e, c) in &d.terms {
                let t: Vec<u32> = e.iter().zip(&shift).map(|(a, b)| a + b).collect();
                rem.add_term(t, -(c * &q));
            }
            quot.add_term(shift, q);
        }
        Some(quot)
    }

    /// Coefficient of `x_v^d`, as a polynomial not involving `x_v`.
    pub fn coeff_in(&self, v: usize, d: u32) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[v] == d {
                let mut t = e.clone();
                t[v] = 0;
                out.terms.insert(t, c.clone());
            }
        }
        out
    }

    /// Coefficients with respect to `x_v`, indexed by power.
    pub fn to_univariate(&self, v: usize) -> Vec<Poly> {
        let deg = self.degree_in(v).unwrap_or(0) as usize;
        let mut out = vec![Poly::zero(self.nvars); deg + 1];
        for (e, c) in &self.terms {
            let mut t = e.clone();
            let d = t[v] as usize;
            t[v] = 0;
            out[d].terms.insert(t, c.clone());
        }
        out
    }

    /// Replace variable `i` by `images[i]`; all images share one ring.
    pub fn substitute(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.nvars);
        let target = images.first().map_or(0, |p| p.nvars);
        let mut cache: Vec<Vec<Poly>> = vec![vec![Poly::one(target)]; self.nvars];
        let mut out = Poly::zero(target);
        for (e, c) in &self.terms {
            let mut term = Poly::constant(target, c.clone());
            for (v, &a) in e.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let powers = &mut cache[v];
                while powers.len() <= a as usize {
                    let next = powers.last().expect("nonempty").mul(&images[v]);
                    powers.push(next);
                }
                term = term.mul(&powers[a as usize]);
            }
            for (t, tc) in term.terms {
                out.add_term(t, tc);
            }
        }
        out
    }

    pub fn derivative(&self, v: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[v] > 0 {
                let mut t = e.clone();
                t[v] -= 1;
                out.add_term(t, c * BigInt::from(e[v]));
            }
        }
        out
    }

    /// Value modulo the prime `modulus` at `point` (residues).
    pub fn eval_mod(&self, point: &[u64], modulus: u64) -> u64 {
        let m = BigInt::from(modulus);
        let mut acc = 0u64;
        for (e, c) in &self.terms {
            let mut t = bigint_mod(c, &m);
            for (x, &a) in point.iter().zip(e) {
                if a > 0 {
                    t = mul_mod(t, pow_mod(*x, a as u64, modulus), modulus);
                }
            }
            acc = add_mod(acc, t, modulus);
        }
        acc
    }

    /// Negate if the lex-leading coefficient is negative.
    pub fn normalize_sign(self) -> Poly {
        match self.leading() {
            Some((_, c)) if c.is_negative() => self.neg(),
            _ => self,
        }
    }
}

pub(crate) fn bigint_mod(c: &BigInt, m: &BigInt) -> u64 {
    let r = c.mod_floor(m);
    u64::try_from(r).expect("residue fits in u64")
}

pub(crate) fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

pub(crate) fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + m as u128 - b as u128) % m as u128) as u64
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

pub(crate) fn inv_mod(a: u64, m: u64) -> u64 {
    // m is prime
    pow_mod(a, m - 2, m)
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            let a = c.abs();
            let is_const = e.iter().all(|&x| x == 0);
            if !a.is_one() || is_const {
                write!(f, "{a}")?;
            }
            let mut first = a.is_one();
            for (v, &x) in e.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                if x == 1 {
                    write!(f, "x{v}")?;
                } else {
                    write!(f, "x{v}^{x}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(nvars: usize, terms: &[(&[u32], i64)]) -> Poly {
        Poly::from_terms(nvars, terms.iter().map(|(e, c)| (e.to_vec(), BigInt::from(*c))))
    }

    #[test]
    fn arithmetic() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let s = x.add(&y);
        let sq = s.mul(&s);
        assert_eq!(sq, p(2, &[(&[2, 0], 1), (&[1, 1], 2), (&[0, 2], 1)]));
        assert_eq!(s.pow(2), sq);
        assert!(sq.sub(&sq).is_zero());
        assert_eq!(sq.total_degree(), Some(2));
        assert_eq!(sq.block_degree(0..2), Some(2));
        assert_eq!(sq.block_degree(0..1), None);
    }

    #[test]
    fn exact_division() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let a = x.add(&y);
        let b = x.sub(&y).scale(&BigInt::from(3));
        let prod = a.mul(&b);
        assert_eq!(prod.exact_div(&a), Some(b.clone()));
        assert_eq!(prod.exact_div(&b), Some(a.clone()));
        assert_eq!(a.exact_div(&b), None);
        assert_eq!(x.exact_div(&Poly::constant(2, BigInt::from(2))), None);
    }

    #[test]
    fn substitution() {
        // f(x, y) = x^2 + y with x -> y, y -> x + 1
        let f = p(2, &[(&[2, 0], 1), (&[0, 1], 1)]);
        let images = vec![Poly::var(2, 1), Poly::var(2, 0).add(&Poly::one(2))];
        assert_eq!(
            f.substitute(&images),
            p(2, &[(&[0, 2], 1), (&[1, 0], 1), (&[0, 0], 1)])
        );
    }

    #[test]
    fn contents() {
        let f = p(2, &[(&[2, 1], 6), (&[1, 3], -4)]);
        assert_eq!(f.content(), BigInt::from(2));
        assert_eq!(f.monomial_content(), vec![1, 1]);
        assert_eq!(
            f.div_monomial(&[1, 1]).div_integer(&BigInt::from(2)),
            p(2, &[(&[1, 0], 3), (&[0, 2], -2)])
        );
    }

    #[test]
    fn modular_evaluation() {
        let f = p(2, &[(&[2, 0], -3), (&[0, 1], 5)]);
        // -3*4 + 5*7 = 23
        assert_eq!(f.eval_mod(&[2, 7], 101), 23);
        assert_eq!(f.eval_mod(&[10, 0], 101), 101 - 300 % 101);
    }

    #[test]
    fn display() {
        let f = p(2, &[(&[2, 0], -3), (&[0, 1], 1), (&[0, 0], 4)]);
        assert_eq!(f.to_string(), "-3*x0^2 + x1 + 4");
    }
}
