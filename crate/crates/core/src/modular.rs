//! Linear algebra modulo the Mersenne prime 2^61 - 1 and rational reconstruction.

use num::{BigInt, Integer, ToPrimitive, Zero};

use crate::rational::Rational;

pub const P: u64 = (1 << 61) - 1;

pub fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

pub fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P { s - P } else { s }
}

pub fn sub(a: u64, b: u64) -> u64 {
    if a >= b { a - b } else { a + P - b }
}

pub fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    r
}

pub fn inv(a: u64) -> u64 {
    pow(a, P - 2)
}

fn big_mod(x: &BigInt) -> u64 {
    x.mod_floor(&BigInt::from(P)).to_u64().expect("reduced below P")
}

/// x mod P, or None when the denominator is divisible by P.
pub fn reduce(x: &Rational) -> Option<u64> {
    let d = big_mod(x.denom());
    if d == 0 {
        return None;
    }
    Some(mul(big_mod(x.numer()), inv(d)))
}

pub fn reduce_vec(v: &[Rational]) -> Option<Vec<u64>> {
    v.iter().map(reduce).collect()
}

/// The rational n/d with |n|, d <= sqrt(P/2) congruent to `a`, if any.
pub fn reconstruct(a: u64) -> Option<Rational> {
    let bound = ((P / 2) as f64).sqrt() as i128;
    let (mut r0, mut r1) = (P as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 > bound {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if t1 == 0 || t1.abs() > bound {
        return None;
    }
    let (n, d) = if t1 < 0 { (-r1, -t1) } else { (r1, t1) };
    Some(Rational::new(BigInt::from(n), BigInt::from(d)))
}

/// Row echelon form with unit pivots, built one vector at a time.
#[derive(Clone, Debug, Default)]
pub struct ModSpan {
    rows: Vec<(usize, Vec<u64>)>,
}

impl ModSpan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn residual(&self, v: &[u64]) -> Vec<u64> {
        let mut r = v.to_vec();
        for (p, b) in &self.rows {
            let c = r[*p];
            if c != 0 {
                for (x, y) in r.iter_mut().zip(b) {
                    if *y != 0 {
                        *x = sub(*x, mul(c, *y));
                    }
                }
            }
        }
        r
    }

    /// Adds `v` if independent and returns whether it was.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        let mut r = self.residual(v);
        let Some(p) = r.iter().position(|x| *x != 0) else { return false };
        let s = inv(r[p]);
        r.iter_mut().for_each(|x| *x = mul(*x, s));
        self.rows.push((p, r));
        true
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.residual(v).iter().all(|x| *x == 0)
    }

    /// Reduced row echelon form of the span: pivot columns and rows.
    pub fn rref(&self) -> (Vec<usize>, Vec<Vec<u64>>) {
        let mut rows: Vec<(usize, Vec<u64>)> = self.rows.clone();
        rows.sort_by_key(|(p, _)| *p);
        for i in (0..rows.len()).rev() {
            let (pi, ri) = rows[i].clone();
            for (_, rj) in rows.iter_mut().take(i) {
                let c = rj[pi];
                if c != 0 {
                    for (x, y) in rj.iter_mut().zip(&ri) {
                        if *y != 0 {
                            *x = sub(*x, mul(c, *y));
                        }
                    }
                }
            }
        }
        rows.into_iter().unzip()
    }

    /// Basis of {w : w . v = 0 for every v in the span}.
    pub fn annihilator(&self, n: usize) -> Vec<Vec<u64>> {
        let (pivots, rows) = self.rref();
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut w = vec![0u64; n];
                w[f] = 1;
                for (p, r) in pivots.iter().zip(&rows) {
                    w[*p] = sub(0, r[f]);
                }
                w
            })
            .collect()
    }
}

/// Sparse integer-free view of a rational matrix modulo P.
pub type ModMat = Vec<Vec<(usize, u64)>>;

pub fn reduce_mat(m: &[Vec<Rational>]) -> Option<ModMat> {
    m.iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(j, x)| reduce(x).map(|v| (j, v)))
                .collect()
        })
        .collect()
}

pub fn matvec(a: &ModMat, v: &[u64]) -> Vec<u64> {
    a.iter()
        .map(|row| row.iter().fold(0u64, |acc, (j, x)| if v[*j] == 0 { acc } else { add(acc, mul(*x, v[*j])) }))
        .collect()
}

/// Arithmetic modulo an arbitrary odd prime below 2^63.
mod field {
    pub fn mul(a: u64, b: u64, q: u64) -> u64 {
        ((a as u128 * b as u128) % q as u128) as u64
    }

    pub fn pow(mut a: u64, mut e: u64, q: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, a, q);
            }
            a = mul(a, a, q);
            e >>= 1;
        }
        r
    }

    pub fn is_prime(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
            if n % p == 0 {
                return n == p;
            }
        }
        let s = (n - 1).trailing_zeros();
        let d = (n - 1) >> s;
        [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37].iter().all(|&a| {
            let mut x = pow(a, d, n);
            if x == 1 || x == n - 1 {
                return true;
            }
            for _ in 1..s {
                x = mul(x, x, n);
                if x == n - 1 {
                    return true;
                }
            }
            false
        })
    }
}

/// Primes just below 2^62, largest first.
pub fn primes() -> impl Iterator<Item = u64> {
    ((1u64 << 61)..(1u64 << 62)).rev().filter(|n| n % 2 == 1).filter(|&n| field::is_prime(n))
}

fn residue(x: &Rational, q: u64) -> Option<u64> {
    let qb = BigInt::from(q);
    let d = x.denom().mod_floor(&qb).to_u64()?;
    if d == 0 {
        return None;
    }
    let n = x.numer().mod_floor(&qb).to_u64()?;
    Some(field::mul(n, field::pow(d, q - 2, q), q))
}

/// Solves the consistent system a x = b modulo q when a has full column rank.
fn solve_mod(a: &[Vec<Rational>], b: &[Rational], q: u64) -> Option<Vec<u64>> {
    let cols = a.first()?.len();
    let mut m: Vec<Vec<u64>> = a
        .iter()
        .zip(b)
        .map(|(row, r)| row.iter().chain(std::iter::once(r)).map(|x| residue(x, q)).collect())
        .collect::<Option<_>>()?;
    let mut rank = 0;
    for c in 0..cols {
        let p = (rank..m.len()).find(|&i| m[i][c] != 0)?;
        m.swap(rank, p);
        let s = field::pow(m[rank][c], q - 2, q);
        m[rank].iter_mut().for_each(|x| *x = field::mul(*x, s, q));
        let pivot = m[rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            let f = row[c];
            if i != rank && f != 0 {
                for (x, y) in row.iter_mut().zip(&pivot).skip(c) {
                    if *y != 0 {
                        *x = (*x + q - field::mul(f, *y, q)) % q;
                    }
                }
            }
        }
        rank += 1;
    }
    if m[rank..].iter().any(|row| row[cols] != 0) {
        return None;
    }
    Some(m[..cols].iter().map(|row| row[cols]).collect())
}

/// The rational n/d with |n|, d <= sqrt(m/2) congruent to `a` modulo `m`, if any.
pub fn reconstruct_big(a: &BigInt, m: &BigInt) -> Option<Rational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::from(1));
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        (r0, r1) = (r1, r2);
        (t0, t1) = (t1, t2);
    }
    if t1.is_zero() || t1.magnitude() > bound.magnitude() {
        return None;
    }
    Some(Rational::new(r1, t1))
}

/// Rational solution of a x = b for a full column rank system, by Chinese
/// remaindering over word-sized primes. `accept` vets each candidate; the
/// search gives up after `max_primes` primes.
pub fn solve_multimodular(
    a: &[Vec<Rational>],
    b: &[Rational],
    max_primes: usize,
    accept: impl Fn(&[Rational]) -> bool,
) -> Option<Vec<Rational>> {
    let mut modulus = BigInt::from(1);
    let mut acc: Vec<BigInt> = Vec::new();
    let mut used = 0;
    for q in primes() {
        if used == max_primes {
            return None;
        }
        used += 1;
        let Some(x) = solve_mod(a, b, q) else { continue };
        let qb = BigInt::from(q);
        if acc.is_empty() {
            acc = x.iter().map(|&v| BigInt::from(v)).collect();
        } else {
            // x = acc + modulus * ((r - acc) * modulus^-1 mod q)
            let minv = BigInt::from(field::pow(modulus.mod_floor(&qb).to_u64()?, q - 2, q));
            for (c, r) in acc.iter_mut().zip(&x) {
                let k = ((BigInt::from(*r) - &*c) * &minv).mod_floor(&qb);
                *c += &modulus * k;
            }
        }
        modulus *= qb;
        let cand: Option<Vec<Rational>> = acc.iter().map(|c| reconstruct_big(c, &modulus)).collect();
        if let Some(cand) = cand {
            if accept(&cand) {
                return Some(cand);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn reduce_and_reconstruct() {
        for (n, d) in [(1, 3), (-7, 12), (0, 1), (123456, 7919), (-1, 1)] {
            let q = frac(n, d);
            assert_eq!(reconstruct(reduce(&q).unwrap()), Some(q));
        }
    }

    #[test]
    fn span_and_annihilator() {
        let mut s = ModSpan::new();
        assert!(s.insert(&[1, 2, 3]));
        assert!(!s.insert(&[2, 4, 6]));
        assert!(s.insert(&[0, 1, 1]));
        let w = s.annihilator(3);
        assert_eq!(w.len(), 1);
        let dot = |a: &[u64], b: &[u64]| a.iter().zip(b).fold(0, |acc, (x, y)| add(acc, mul(*x, *y)));
        assert_eq!(dot(&w[0], &[1, 2, 3]), 0);
        assert_eq!(dot(&w[0], &[0, 1, 1]), 0);
        assert!(s.contains(&[1, 3, 4]));
        assert_eq!(mul(inv(12345), 12345), 1);
    }

    #[test]
    fn multimodular_solve_recovers_large_fractions() {
        let big = Rational::new(BigInt::from(3).pow(90u32), BigInt::from(7).pow(40u32) + 1);
        let a = vec![
            vec![frac(1, 1), frac(2, 3)],
            vec![frac(0, 1), frac(5, 1)],
            vec![frac(1, 1), frac(1, 1)],
        ];
        let x = [big.clone(), frac(-4, 9)];
        let b: Vec<Rational> = a.iter().map(|r| &r[0] * &x[0] + &r[1] * &x[1]).collect();
        let got = solve_multimodular(&a, &b, 16, |v| v[0] == big).unwrap();
        assert_eq!(got, x.to_vec());
        assert!(primes().take(3).all(|q| q < 1 << 62 && q > 1 << 61));
    }
}
