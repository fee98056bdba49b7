//! Minimally supported symmetric interpolatory masks built coset by coset
//! from the interpolatory sum rules.

use num::{BigInt, One, Zero};

use crate::error::{Error, Result};
use crate::linalg::solve_bareiss;
use crate::mask::{Dilation, Family, Mask};
use crate::poly::LaurentPoly;
use crate::rational::Rational;

pub fn minimal_interp_mask(m: i64, n: u32) -> Result<Mask> {
    let dil = Dilation::aniso(m)?;
    if n < 1 {
        return Err(Error::Param("n must be >= 1".into()));
    }
    let nn = n as i64;
    let mut p = LaurentPoly::zero(2);
    p.add_term([0, 0], Rational::one());

    let put = |p: &mut LaurentPoly, a: [i64; 2], c: &Rational| {
        let mut seen = Vec::with_capacity(4);
        for s1 in [1, -1] {
            for s2 in [1, -1] {
                let e = [s1 * a[0], s2 * a[1]];
                if !seen.contains(&e) {
                    seen.push(e);
                    p.add_term(e, c.clone());
                }
            }
        }
    };

    // cosets (k, j), j = 1..(m-1)/2; the cosets m - j follow by reflection
    for k in 0..2i64 {
        for j in 1..=(m - 1) / 2 {
            let idx: Vec<[i64; 2]> = (0..nn)
                .flat_map(|a1| (a1 - nn..=nn - a1 - 1).map(move |a2| [a1, a2]))
                .collect();
            let moments: Vec<[u32; 2]> = (0..nn)
                .flat_map(|u1| (0..=(2 * nn - 1 - 2 * u1)).map(move |u2| [u1 as u32, u2 as u32]))
                .collect();
            debug_assert_eq!(idx.len(), moments.len());
            let pos = |a: &[i64; 2]| [k + 2 * a[0], j + m * a[1]];
            let weight = |a: &[i64; 2]| if pos(a)[0] == 0 { 1 } else { 2 };
            let rows: Vec<Vec<BigInt>> = moments
                .iter()
                .map(|mu| {
                    idx.iter()
                        .map(|a| {
                            let x = pos(a);
                            BigInt::from(weight(a)) * BigInt::from(x[0]).pow(2 * mu[0]) * BigInt::from(x[1]).pow(mu[1])
                        })
                        .collect()
                })
                .collect();
            let rhs: Vec<BigInt> = moments
                .iter()
                .map(|mu| if mu[0] == 0 && mu[1] == 0 { BigInt::one() } else { BigInt::zero() })
                .collect();
            let sol = solve_bareiss(&rows, &rhs).map_err(|e| Error::Singular(format!("coset ({k},{j}): {e}")))?;
            for (a, c) in idx.iter().zip(&sol) {
                put(&mut p, pos(a), c);
            }
        }
    }

    // coset (1, 0)
    let idx: Vec<[i64; 2]> = (0..nn).flat_map(|a1| (0..nn - a1).map(move |a2| [a1, a2])).collect();
    let moments: Vec<[u32; 2]> = (0..nn)
        .flat_map(|u1| (0..nn - u1).map(move |u2| [u1 as u32, u2 as u32]))
        .filter(|mu| 2 * mu[0] + 2 * mu[1] <= 2 * n - 1)
        .collect();
    let pos = |a: &[i64; 2]| [1 + 2 * a[0], m * a[1]];
    let weight = |a: &[i64; 2]| if a[1] == 0 { 2 } else { 4 };
    let rows: Vec<Vec<BigInt>> = moments
        .iter()
        .map(|mu| {
            idx.iter()
                .map(|a| {
                    let x = pos(a);
                    BigInt::from(weight(a)) * BigInt::from(x[0]).pow(2 * mu[0]) * BigInt::from(x[1]).pow(2 * mu[1])
                })
                .collect()
        })
        .collect();
    let rhs: Vec<BigInt> =
        moments.iter().map(|mu| if mu[0] == 0 && mu[1] == 0 { BigInt::one() } else { BigInt::zero() }).collect();
    let sol = solve_bareiss(&rows, &rhs).map_err(|e| Error::Singular(format!("coset (1,0): {e}")))?;
    for (a, c) in idx.iter().zip(&sol) {
        put(&mut p, pos(a), c);
    }

    Ok(Mask::new(p, dil, Family::MinimalInterp { n }))
}
