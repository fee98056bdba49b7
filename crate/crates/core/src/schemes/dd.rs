use num::{One, Zero};

use crate::error::{Error, Result};
use crate::mask::{Dilation, Family, Mask};
use crate::poly::LaurentPoly;
use crate::rational::{binomial, factorial, frac, int, pochhammer, Rational};

/// Univariate (2n)-point Dubuc-Deslauriers symbol of arity m.
pub fn dd_symbol(m: i64, n: u32) -> Result<Mask> {
    if m < 2 || n < 1 {
        return Err(Error::Param(format!("dd_symbol needs m >= 2 and n >= 1, got m={m}, n={n}")));
    }
    let nn = n as i64;
    let mut p = LaurentPoly::one(1);
    let scale = factorial(2 * n as u64 - 1);
    for eps in 1..m {
        let t = frac(eps, m);
        let poch = pochhammer(&(int(1 - nn) - &t), 2 * n);
        for beta in (1 - nn)..=nn {
            let sign = if (beta + nn) % 2 == 0 { Rational::one() } else { -Rational::one() };
            let c = sign / (&scale * (&t - int(beta))) * binomial(2 * n as u64 - 1, (nn - beta) as u64) * &poch;
            p.add_term([-m * beta + eps, 0], c);
        }
    }
    Ok(Mask::new(p, Dilation::univariate(m)?, Family::Dd { m, n }))
}

/// Lagrange fundamental polynomial on the nodes -n+1..n, node `beta`, evaluated at `x`.
/// Used as an independent check of the closed Dubuc-Deslauriers formula.
pub fn lagrange_coefficient(n: u32, beta: i64, x: &Rational) -> Rational {
    let nn = n as i64;
    let mut acc = Rational::one();
    for k in (1 - nn)..=nn {
        if k != beta {
            acc *= (x - int(k)) / int(beta - k);
        }
    }
    if acc.is_zero() { Rational::zero() } else { acc }
}
