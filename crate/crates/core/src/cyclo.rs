//! Exact evaluation of Laurent polynomials at roots of unity.
//!
//! Values live in Q(zeta_L) and are stored as coefficient vectors reduced
//! modulo the L-th cyclotomic polynomial, so zero tests are exact.

use num::{One, Zero};

use crate::poly::LaurentPoly;
use crate::rational::Rational;

/// The root of unity exp(-2 pi i k / order).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Root {
    pub k: i64,
    pub order: u64,
}

impl Root {
    pub fn new(k: i64, order: u64) -> Self {
        assert!(order >= 1);
        Self { k: k.rem_euclid(order as i64), order }
    }

    pub fn one() -> Self {
        Self { k: 0, order: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycloValue {
    order: u64,
    coeffs: Vec<Rational>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Coefficients of the n-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic(n: u64) -> Vec<Rational> {
    let mut num = vec![Rational::zero(); n as usize + 1];
    num[0] = -Rational::one();
    num[n as usize] = Rational::one();
    for d in 1..n {
        if n % d == 0 {
            num = divide_exact(&num, &cyclotomic(d));
        }
    }
    num
}

fn divide_exact(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db].clone();
    let mut q = vec![Rational::zero(); a.len() - db];
    for i in (0..q.len()).rev() {
        let c = &rem[i + db] / &lead;
        for (j, bj) in b.iter().enumerate() {
            rem[i + j] -= &c * bj;
        }
        q[i] = c;
    }
    debug_assert!(rem.iter().all(|x| x.is_zero()));
    q
}

fn reduce(mut v: Vec<Rational>, phi: &[Rational]) -> Vec<Rational> {
    let d = phi.len() - 1;
    for i in (d..v.len()).rev() {
        if v[i].is_zero() {
            continue;
        }
        let c = v[i].clone();
        for (j, pj) in phi.iter().enumerate() {
            v[i - d + j] -= &c * pj;
        }
    }
    v.truncate(d);
    v.resize(d, Rational::zero());
    v
}

impl CycloValue {
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Reduced coordinates in the power basis 1, zeta, zeta^2, ...
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn from_rational(r: Rational) -> Self {
        Self { order: 1, coeffs: vec![r] }
    }

    /// The value as a rational, if it lies in Q.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coeffs.first().cloned().unwrap_or_else(Rational::zero))
        } else {
            None
        }
    }

    fn from_powers(order: u64, powers: Vec<Rational>) -> Self {
        let phi = cyclotomic(order);
        Self { order, coeffs: reduce(powers, &phi) }
    }

    /// Re-expresses the value in Q(zeta_order) where `order` is a multiple of the current one.
    fn lift_to(&self, order: u64) -> Self {
        assert_eq!(order % self.order, 0);
        let step = (order / self.order) as usize;
        let mut powers = vec![Rational::zero(); order as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            powers[(i * step) % order as usize] += c;
        }
        Self::from_powers(order, powers)
    }

    pub fn add(&self, other: &Self) -> Self {
        let l = lcm(self.order, other.order);
        let (a, b) = (self.lift_to(l), other.lift_to(l));
        Self { order: l, coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let l = lcm(self.order, other.order);
        let (a, b) = (self.lift_to(l), other.lift_to(l));
        let mut prod = vec![Rational::zero(); a.coeffs.len() + b.coeffs.len()];
        for (i, x) in a.coeffs.iter().enumerate() {
            for (j, y) in b.coeffs.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        Self::from_powers(l, prod)
    }

    pub fn to_complex(&self) -> (f64, f64) {
        let w = 2.0 * std::f64::consts::PI / self.order as f64;
        self.coeffs.iter().enumerate().fold((0.0, 0.0), |(re, im), (i, c)| {
            let c = crate::rational::to_f64(c);
            (re + c * (w * i as f64).cos(), im + c * (w * i as f64).sin())
        })
    }
}

/// Exact value of `p` at the point whose coordinates are the given roots of unity.
pub fn eval(p: &LaurentPoly, point: &[Root]) -> CycloValue {
    assert_eq!(point.len(), p.arity(), "point dimension must match arity");
    let l = point.iter().fold(1, |acc, r| lcm(acc, r.order));
    let mut powers = vec![Rational::zero(); l as usize];
    for (e, c) in p.terms() {
        // z_i = zeta_L^(-k_i L / m_i)
        let mut s: i64 = 0;
        for (i, r) in point.iter().enumerate() {
            s -= e[i] * r.k * (l / r.order) as i64;
        }
        powers[s.rem_euclid(l as i64) as usize] += c;
    }
    CycloValue::from_powers(l, powers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic(1), vec![int(-1), int(1)]);
        assert_eq!(cyclotomic(3), vec![int(1), int(1), int(1)]);
        assert_eq!(cyclotomic(6), vec![int(1), int(-1), int(1)]);
        assert_eq!(cyclotomic(10), vec![int(1), int(-1), int(1), int(-1), int(1)]);
    }

    #[test]
    fn one_plus_z_plus_z2_vanishes() {
        let p = LaurentPoly::univariate([(0, int(1)), (1, int(1)), (2, int(1))]);
        assert!(eval(&p, &[Root::new(1, 3)]).is_zero());
        assert!(eval(&p, &[Root::new(2, 3)]).is_zero());
        assert_eq!(eval(&p, &[Root::one()]).as_rational(), Some(int(3)));
    }

    #[test]
    fn minus_one() {
        let p = LaurentPoly::univariate([(-1, frac(1, 2)), (0, int(1)), (1, frac(1, 2))]);
        assert!(eval(&p, &[Root::new(1, 2)]).is_zero());
    }

    #[test]
    fn complex_value() {
        let p = LaurentPoly::univariate([(1, int(1))]);
        let (re, im) = eval(&p, &[Root::new(1, 4)]).to_complex();
        assert!(re.abs() < 1e-12 && (im + 1.0).abs() < 1e-12);
    }
}
