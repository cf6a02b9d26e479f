//! Simultaneous root finding (Aberth-Ehrlich) for squarefree polynomials.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;

use super::OracleError;

const MAX_ITER: usize = 1000;
const TARGET: f64 = 1e-10;

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All complex roots of a squarefree integer polynomial (lowest degree first).
pub fn roots(poly: &[BigInt]) -> Result<Vec<Complex64>, OracleError> {
    let deg = poly.len().saturating_sub(1);
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = poly[deg].to_f64().ok_or(OracleError::CoefficientRange)?;
    let c: Vec<Complex64> = poly
        .iter()
        .map(|x| x.to_f64().map(|v| Complex64::new(v / lead, 0.0)))
        .collect::<Option<_>>()
        .ok_or(OracleError::CoefficientRange)?;
    if deg == 1 {
        return Ok(vec![-c[0]]);
    }
    // Cauchy bound on root moduli
    let radius = 1.0 + c[..deg].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|i| {
            let theta = 2.0 * std::f64::consts::PI * (i as f64 + 0.25) / deg as f64 + 0.4;
            Complex64::from_polar(radius * 0.5, theta)
        })
        .collect();
    let mut worst = f64::INFINITY;
    for _ in 0..MAX_ITER {
        worst = 0.0;
        for i in 0..deg {
            let (p, dp) = horner(&c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let newton = p / dp;
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let w = newton / (Complex64::new(1.0, 0.0) - newton * repulsion);
            z[i] -= w;
            worst = worst.max(w.norm() / z[i].norm().max(1e-300));
        }
        if worst < 1e-15 {
            break;
        }
    }
    // Newton polish; the last step size bounds the error for simple roots.
    let mut step: f64 = 0.0;
    for zi in z.iter_mut() {
        let mut last = f64::INFINITY;
        for _ in 0..3 {
            let (p, dp) = horner(&c, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            let w = p / dp;
            *zi -= w;
            last = w.norm() / zi.norm().max(1e-300);
        }
        step = step.max(if last.is_finite() { last } else { 0.0 });
    }
    if worst >= TARGET || step >= TARGET {
        return Err(OracleError::NoConvergence { degree: deg });
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn sorted_moduli(mut z: Vec<Complex64>) -> Vec<f64> {
        let mut m: Vec<f64> = z.drain(..).map(|x| x.norm()).collect();
        m.sort_by(|a, b| b.partial_cmp(a).unwrap());
        m
    }

    #[test]
    fn quadratic() {
        let m = sorted_moduli(roots(&u(&[1, -3, 1])).unwrap());
        let phi2 = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((m[0] - phi2).abs() < 1e-12);
        assert!((m[1] - 1.0 / phi2).abs() < 1e-12);
    }

    #[test]
    fn complex_pair_and_real() {
        // (t^2 + 4)(t - 5)
        let m = sorted_moduli(roots(&u(&[-20, 4, -5, 1])).unwrap());
        assert!((m[0] - 5.0).abs() < 1e-12);
        assert!((m[1] - 2.0).abs() < 1e-12);
        assert!((m[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn degree_six() {
        // prod (t - i) for i = 1..6
        let m = sorted_moduli(roots(&u(&[720, -1764, 1624, -735, 175, -21, 1])).unwrap());
        for (i, v) in m.iter().enumerate() {
            assert!((v - (6 - i) as f64).abs() < 1e-9, "{m:?}");
        }
    }
}
