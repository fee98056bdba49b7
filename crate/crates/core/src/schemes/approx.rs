//! Anisotropic four-directional box splines and the approximating family built on them.

use num::Zero;

use crate::error::{Error, Result};
use crate::linalg::solve;
use crate::mask::{Dilation, Family, Mask};
use crate::poly::LaurentPoly;
use crate::rational::{frac, int, Rational};

fn bi(terms: &[([i64; 2], Rational)]) -> LaurentPoly {
    LaurentPoly::from_terms(2, terms.iter().cloned())
}

/// First direction (1+z1)^2/(4 z1), second direction (1+z2+z2^2)^2/(9 z2^2),
/// and the product of the third and fourth directions.
pub fn direction_factors() -> (LaurentPoly, LaurentPoly, LaurentPoly) {
    let d1 = bi(&[([-1, 0], frac(1, 4)), ([0, 0], frac(1, 2)), ([1, 0], frac(1, 4))]);
    let t = bi(&[([0, 0], int(1)), ([0, 1], int(1)), ([0, 2], int(1))]);
    let d2 = t.mul(&t).unwrap().mul(&bi(&[([0, -2], frac(1, 9))])).unwrap();
    let f3 = bi(&[([0, 0], int(2)), ([0, 1], int(1)), ([1, 1], int(1)), ([1, 2], int(2))]);
    let f4 = bi(&[([1, 0], int(2)), ([0, 1], int(1)), ([1, 1], int(1)), ([0, 2], int(2))]);
    let q = f3.mul(&f4).unwrap().mul(&bi(&[([-1, -2], frac(1, 36))])).unwrap();
    (d1, d2, q)
}

/// B_n for M = diag(2, 3).
pub fn box_spline_symbol(n: u32) -> Result<Mask> {
    if n < 1 {
        return Err(Error::Param("box spline order must be >= 1".into()));
    }
    let (d1, d2, q) = direction_factors();
    let p = d1
        .mul(&d2)?
        .pow(n.div_ceil(2))
        .mul(&q.pow(n / 2))?
        .scale(&int(6));
    Ok(Mask::new(p, Dilation::aniso(3)?, Family::BoxSpline { n }))
}

/// -(1 - z1^2)^2 / (16 z1^2)
pub fn delta1() -> LaurentPoly {
    bi(&[([-2, 0], frac(-1, 16)), ([0, 0], frac(2, 16)), ([2, 0], frac(-1, 16))])
}

/// -(1 - z2^3)^2 / (27 z2^3)
pub fn delta2() -> LaurentPoly {
    bi(&[([0, -3], frac(-1, 27)), ([0, 0], frac(2, 27)), ([0, 3], frac(-1, 27))])
}

/// B_{n,ell}: B_n corrected level by level so that the even derivatives of
/// order 2i vanish at (1,1) for i = 1..ell.
pub fn approx_symbol(n: u32, ell: u32) -> Result<Mask> {
    if n < 1 || ell >= n {
        return Err(Error::Param(format!("approx_symbol needs 0 <= ell < n, got n={n}, ell={ell}")));
    }
    let (d1, d2) = (delta1(), delta2());
    let mut b = box_spline_symbol(n)?.symbol;
    for i in 1..=ell {
        let base = box_spline_symbol(n - i)?.symbol;
        let terms: Vec<LaurentPoly> = (0..=i)
            .map(|j| base.mul(&d1.pow(i - j)).and_then(|t| t.mul(&d2.pow(j))))
            .collect::<Result<_>>()?;
        let mus: Vec<[u32; 2]> = (0..=i).map(|j| [2 * (i - j), 2 * j]).collect();
        let a: Vec<Vec<Rational>> = mus
            .iter()
            .map(|&mu| terms.iter().map(|t| t.derivative(mu).value_at_one()).collect())
            .collect();
        let rhs: Vec<Rational> = mus.iter().map(|&mu| -b.derivative(mu).value_at_one()).collect();
        let c = solve(&a, &rhs).map_err(|e| Error::Singular(format!("level {i}: {e}")))?;
        for (cj, t) in c.iter().zip(&terms) {
            if !cj.is_zero() {
                b = b.add(&t.scale(cj))?;
            }
        }
    }
    Ok(Mask::new(b, Dilation::aniso(3)?, Family::Approx { n, ell }))
}
