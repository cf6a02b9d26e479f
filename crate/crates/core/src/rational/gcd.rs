//! Multivariate gcd over the integers.
//!
//! Integer and monomial contents are split off first. A cheap modular test then
//! tries to certify coprimality: for each shared variable `v`, the remaining
//! variables are specialised to random residues modulo a prime at which both
//! leading coefficients in `v` survive, and the univariate gcd is computed over
//! `F_p`. The true gcd's degree in `v` is bounded by that image degree, so a
//! zero image degree in every variable proves the gcd is constant. Anything the
//! test cannot certify goes through a recursive primitive remainder sequence.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::{add_mod, bigint_mod, inv_mod, mul_mod, pow_mod, sub_mod, Poly};

const PRIME: u64 = (1 << 61) - 1;
const EVAL_TRIES: usize = 6;

/// Greatest common divisor, normalised to a positive lex-leading coefficient.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.clone().normalize_sign();
    }
    if b.is_zero() {
        return a.clone().normalize_sign();
    }
    let (ca, cb) = (a.content(), b.content());
    let c = ca.gcd(&cb);
    let (ma, mb) = (a.monomial_content(), b.monomial_content());
    let m: Vec<u32> = ma.iter().zip(&mb).map(|(x, y)| *x.min(y)).collect();
    let a1 = a.div_integer(&ca).div_monomial(&ma);
    let b1 = b.div_integer(&cb).div_monomial(&mb);
    let g = primitive_gcd(&a1, &b1);
    g.scale(&c).shift(&m).normalize_sign()
}

/// Gcd of a list; zero for an empty or all-zero list.
pub fn gcd_many<'a, I>(polys: I, nvars: usize) -> Poly
where
    I: IntoIterator<Item = &'a Poly>,
{
    let mut g = Poly::zero(nvars);
    for p in polys {
        g = gcd(&g, p);
        if g.is_constant() && !g.is_zero() && g.content().is_one() {
            break;
        }
    }
    g
}

/// Gcd of two polynomials with unit integer content and no monomial content.
fn primitive_gcd(a: &Poly, b: &Poly) -> Poly {
    let n = a.nvars();
    if a.is_constant() || b.is_constant() {
        return Poly::one(n);
    }
    if coprime_by_evaluation(a, b) {
        return Poly::one(n);
    }
    let v = (0..n)
        .find(|&v| a.involves(v) || b.involves(v))
        .expect("non-constant polynomial involves a variable");
    match (a.involves(v), b.involves(v)) {
        (false, _) => gcd(a, &content_in(b, v)),
        (_, false) => gcd(&content_in(a, v), b),
        _ => {
            let ca = content_in(a, v);
            let cb = content_in(b, v);
            let cont = gcd(&ca, &cb);
            let pa = a.exact_div(&ca).expect("content divides");
            let pb = b.exact_div(&cb).expect("content divides");
            let g = prs_gcd(pa, pb, v);
            cont.mul(&g).normalize_sign()
        }
    }
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `x_v`.
fn content_in(p: &Poly, v: usize) -> Poly {
    let coeffs = p.to_univariate(v);
    gcd_many(coeffs.iter().filter(|c| !c.is_zero()), p.nvars())
}

fn primitive_part_in(p: &Poly, v: usize) -> Poly {
    let c = content_in(p, v);
    p.exact_div(&c).expect("content divides").normalize_sign()
}

/// Pseudo-remainder of `a` by `b` with respect to `x_v`.
fn prem(a: &Poly, b: &Poly, v: usize) -> Poly {
    let db = b.degree_in(v).expect("nonzero divisor");
    let lcb = b.coeff_in(v, db);
    let mut r = a.clone();
    while let Some(dr) = r.degree_in(v) {
        if dr < db || r.is_zero() {
            break;
        }
        let lcr = r.coeff_in(v, dr);
        let mut shift = vec![0; a.nvars()];
        shift[v] = dr - db;
        r = r.mul(&lcb).sub(&lcr.mul(b).shift(&shift));
    }
    r
}

/// Primitive remainder sequence in `x_v` for inputs primitive in `x_v`.
fn prs_gcd(mut a: Poly, mut b: Poly, v: usize) -> Poly {
    let n = a.nvars();
    if a.degree_in(v) < b.degree_in(v) {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        let r = prem(&a, &b, v);
        if r.is_zero() {
            return primitive_part_in(&b, v);
        }
        if r.degree_in(v) == Some(0) {
            return Poly::one(n);
        }
        a = b;
        b = primitive_part_in(&r, v);
    }
}

/// True only when the gcd of `a` and `b` is provably a constant.
pub fn coprime_by_evaluation(a: &Poly, b: &Poly) -> bool {
    let n = a.nvars();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_9cd0);
    for v in 0..n {
        if !(a.involves(v) && b.involves(v)) {
            continue;
        }
        let da = a.degree_in(v).expect("involves v");
        let db = b.degree_in(v).expect("involves v");
        let lca = a.coeff_in(v, da);
        let lcb = b.coeff_in(v, db);
        let mut certified = false;
        for _ in 0..EVAL_TRIES {
            let point: Vec<u64> = (0..n).map(|_| rng.gen_range(1..PRIME)).collect();
            if lca.eval_mod(&point, PRIME) == 0 || lcb.eval_mod(&point, PRIME) == 0 {
                continue;
            }
            let ua = univariate_image(a, v, &point);
            let ub = univariate_image(b, v, &point);
            if univariate_gcd_degree(ua, ub) == 0 {
                certified = true;
            }
            // a good evaluation point gives a valid bound either way
            break;
        }
        if !certified {
            return false;
        }
    }
    true
}

fn univariate_image(p: &Poly, v: usize, point: &[u64]) -> Vec<u64> {
    let m = BigInt::from(PRIME);
    let deg = p.degree_in(v).unwrap_or(0) as usize;
    let mut out = vec![0u64; deg + 1];
    for (e, c) in p.terms() {
        let mut t = bigint_mod(c, &m);
        for (w, &a) in e.iter().enumerate() {
            if w != v && a > 0 {
                t = mul_mod(t, pow_mod(point[w], a as u64, PRIME), PRIME);
            }
        }
        let d = e[v] as usize;
        out[d] = add_mod(out[d], t, PRIME);
    }
    out
}

fn trim(p: &mut Vec<u64>) {
    while p.len() > 1 && *p.last().expect("nonempty") == 0 {
        p.pop();
    }
}

fn univariate_gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    trim(&mut a);
    trim(&mut b);
    loop {
        if b.len() == 1 && b[0] == 0 {
            return a.len() - 1;
        }
        if b.len() == 1 {
            return 0;
        }
        // a <- a mod b
        let lead_inv = inv_mod(*b.last().expect("nonempty"), PRIME);
        while a.len() >= b.len() && !(a.len() == 1 && a[0] == 0) {
            let shift = a.len() - b.len();
            let factor = mul_mod(*a.last().expect("nonempty"), lead_inv, PRIME);
            for (i, &bc) in b.iter().enumerate() {
                a[shift + i] = sub_mod(a[shift + i], mul_mod(factor, bc, PRIME), PRIME);
            }
            a.pop();
            trim(&mut a);
            if a.is_empty() {
                a.push(0);
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
}
