//! Dense univariate integer polynomials, coefficients lowest degree first.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::IntMatrix;

pub type UPoly = Vec<BigInt>;

pub fn trim(mut p: UPoly) -> UPoly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

/// Degree; `None` for the zero polynomial.
pub fn degree(p: &[BigInt]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn derivative(p: &[BigInt]) -> UPoly {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect(),
    )
}

pub fn sub(a: &[BigInt], b: &[BigInt]) -> UPoly {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z))
            .collect(),
    )
}

pub fn content(p: &[BigInt]) -> BigInt {
    p.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
}

/// Divide out the content and make the leading coefficient positive.
pub fn primitive(p: &[BigInt]) -> UPoly {
    let p = trim(p.to_vec());
    let Some(lead) = p.last() else {
        return p;
    };
    let mut c = content(&p);
    if lead.is_negative() {
        c = -c;
    }
    p.iter().map(|x| x / &c).collect()
}

/// Pseudo-remainder of `a` by nonzero `b`.
pub fn prem(a: &[BigInt], b: &[BigInt]) -> UPoly {
    let db = degree(b).expect("nonzero divisor");
    let lb = b[db].clone();
    let mut r = trim(a.to_vec());
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c *= &lb;
        }
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] -= &lr * bc;
        }
        r = trim(r);
    }
    r
}

/// Primitive gcd with positive leading coefficient.
pub fn gcd(a: &[BigInt], b: &[BigInt]) -> UPoly {
    let mut a = primitive(a);
    let mut b = primitive(b);
    if degree(&a) < degree(&b) {
        std::mem::swap(&mut a, &mut b);
    }
    while degree(&b).is_some() {
        let r = prem(&a, &b);
        a = b;
        b = primitive(&r);
    }
    a
}

/// Exact quotient `a / b`, or `None` if it is not integral.
pub fn exact_div(a: &[BigInt], b: &[BigInt]) -> Option<UPoly> {
    let db = degree(b)?;
    let mut r = trim(a.to_vec());
    let Some(da) = degree(&r) else {
        return Some(Vec::new());
    };
    if da < db {
        return None;
    }
    let mut q = vec![BigInt::zero(); da - db + 1];
    while let Some(dr) = degree(&r) {
        if dr < db {
            return None;
        }
        let (c, rem) = r[dr].div_rem(&b[db]);
        if !rem.is_zero() {
            return None;
        }
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] -= &c * bc;
        }
        q[shift] = c;
        r = trim(r);
    }
    Some(trim(q))
}

/// Squarefree decomposition `p = c * prod_i f_i^i` (Yun); returns the
/// non-constant `(f_i, i)`.
pub fn squarefree(p: &[BigInt]) -> Vec<(UPoly, usize)> {
    let a = primitive(p);
    if degree(&a).unwrap_or(0) == 0 {
        return Vec::new();
    }
    let b = derivative(&a);
    let c = gcd(&a, &b);
    let mut w = exact_div(&a, &c).expect("gcd divides");
    let mut y = exact_div(&b, &c).expect("gcd divides");
    let mut z = sub(&y, &derivative(&w));
    let mut out = Vec::new();
    let mut i = 1;
    while degree(&w).unwrap_or(0) > 0 {
        let g = gcd(&w, &z);
        if degree(&g).unwrap_or(0) > 0 {
            out.push((g.clone(), i));
        }
        w = exact_div(&w, &g).expect("gcd divides");
        y = exact_div(&z, &g).expect("gcd divides");
        z = sub(&y, &derivative(&w));
        i += 1;
    }
    out
}

/// `det(t I - A)` by the Faddeev-LeVerrier recurrence; every division is exact.
pub fn charpoly(a: &IntMatrix) -> UPoly {
    let n = a.rows();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut m = IntMatrix::zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = a.mul(&m).expect("square");
        for i in 0..n {
            let v = next.get(i, i) + &coeffs[n - k + 1];
            next.set(i, i, v);
        }
        let am = a.mul(&next).expect("square");
        let trace: BigInt = (0..n).map(|i| am.get(i, i).clone()).sum();
        coeffs[n - k] = -(trace / BigInt::from(k));
        m = next;
    }
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(v: &[i64]) -> UPoly {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn charpoly_examples() {
        let a = IntMatrix::from_rows(&[vec![2i64, 1], vec![1, 1]]).unwrap();
        assert_eq!(charpoly(&a), u(&[1, -3, 1]));
        let b = IntMatrix::from_rows(&[vec![2i64, 0, 0], vec![1, 3, 0], vec![4, -1, 3]]).unwrap();
        // (t - 2)(t - 3)^2
        assert_eq!(charpoly(&b), u(&[-18, 21, -8, 1]));
    }

    #[test]
    fn charpoly_constant_term_is_signed_det() {
        let a = IntMatrix::from_rows(&[vec![0i64, 1, 2], vec![1, 0, 3], vec![4, -3, 8]]).unwrap();
        let cp = charpoly(&a);
        // det(-A) = -det(A) for odd size
        assert_eq!(cp[0], -a.det().unwrap());
    }

    #[test]
    fn squarefree_split() {
        // (t - 2)(t - 3)^2
        let parts = squarefree(&u(&[-18, 21, -8, 1]));
        assert_eq!(parts, vec![(u(&[-2, 1]), 1), (u(&[-3, 1]), 2)]);
        // (t^2 + 1)^3
        let parts = squarefree(&u(&[1, 0, 3, 0, 3, 0, 1]));
        assert_eq!(parts, vec![(u(&[1, 0, 1]), 3)]);
        assert!(squarefree(&u(&[5])).is_empty());
    }

    #[test]
    fn division_and_gcd() {
        let a = u(&[-1, 0, 1]); // t^2 - 1
        let b = u(&[2, 2]); // 2t + 2
        assert_eq!(gcd(&a, &b), u(&[1, 1]));
        assert_eq!(exact_div(&a, &u(&[1, 1])), Some(u(&[-1, 1])));
        assert_eq!(exact_div(&a, &u(&[1, 2])), None);
    }
}
