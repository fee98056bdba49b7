//! Exact linear algebra over the rationals and fraction-free elimination over the integers.

use num::{BigInt, Integer, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub type QVec = Vec<Rational>;
pub type QMat = Vec<Vec<Rational>>;

pub fn zeros(n: usize) -> QVec {
    vec![Rational::zero(); n]
}

pub fn matvec(a: &QMat, v: &[Rational]) -> QVec {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .filter(|(x, y)| !x.is_zero() && !y.is_zero())
                .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
        })
        .collect()
}

pub fn matmul(a: &QMat, b: &QMat) -> QMat {
    let k = b.len();
    let m = b.first().map(|r| r.len()).unwrap_or(0);
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| (0..k).fold(Rational::zero(), |acc, t| acc + &row[t] * &b[t][j]))
                .collect()
        })
        .collect()
}

pub fn transpose(a: &QMat) -> QMat {
    let m = a.first().map(|r| r.len()).unwrap_or(0);
    (0..m).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Solves `a x = b` by fraction-free (Bareiss) elimination on integer data.
pub fn solve_bareiss(a: &[Vec<BigInt>], b: &[BigInt]) -> Result<QVec> {
    let n = a.len();
    if b.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::Dims(format!("bareiss needs a square system, got {n} rows")));
    }
    let mut m: Vec<Vec<BigInt>> = a.iter().zip(b).map(|(r, bi)| {
        let mut row = r.clone();
        row.push(bi.clone());
        row
    }).collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        let p = (k..n).find(|&r| !m[r][k].is_zero()).ok_or_else(|| Error::Singular(format!("column {k}")))?;
        m.swap(k, p);
        for i in k + 1..n {
            for j in k + 1..=n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let mut x = zeros(n);
    for i in (0..n).rev() {
        let mut s = Rational::from_integer(m[i][n].clone());
        for j in i + 1..n {
            s -= Rational::from_integer(m[i][j].clone()) * &x[j];
        }
        x[i] = s / Rational::from_integer(m[i][i].clone());
    }
    Ok(x)
}

/// Solves `a x = b` by Gaussian elimination in exact rationals.
pub fn solve(a: &QMat, b: &[Rational]) -> Result<QVec> {
    let n = a.len();
    if b.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::Dims(format!("solve needs a square system, got {n} rows")));
    }
    let mut m: QMat = a.iter().zip(b).map(|(r, bi)| {
        let mut row = r.clone();
        row.push(bi.clone());
        row
    }).collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero()).ok_or_else(|| Error::Singular(format!("column {c}")))?;
        m.swap(c, p);
        let piv = m[c][c].clone();
        for j in c..=n {
            m[c][j] = &m[c][j] / &piv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for j in c..=n {
                    let t = &f * &m[c][j];
                    m[r][j] -= t;
                }
            }
        }
    }
    Ok(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

pub fn inverse(a: &QMat) -> Result<QMat> {
    let n = a.len();
    let cols: Result<Vec<QVec>> = (0..n)
        .map(|j| {
            let mut e = zeros(n);
            e[j] = Rational::one();
            solve(a, &e)
        })
        .collect();
    Ok(transpose(&cols?))
}

/// Incrementally maintained echelon basis of a subspace of Q^n.
/// Scales `v` to an integer vector with coprime entries and a positive leading entry.
pub fn primitive(v: &[Rational]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    normalize_int(ints)
}

/// Nonzero pattern of an integer matrix, row by row.
pub type SparseIntMat = Vec<Vec<(usize, BigInt)>>;

/// Integer matrices proportional to `mats`, each scaled by the lcm of its
/// denominators, in sparse row form.
pub fn scaled_integer(mats: &[QMat]) -> Vec<SparseIntMat> {
    mats.iter()
        .map(|m| {
            let l = m.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            m.iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(_, x)| !x.is_zero())
                        .map(|(j, x)| (j, x.numer() * (&l / x.denom())))
                        .collect()
                })
                .collect()
        })
        .collect()
}

pub fn sparse_matvec(a: &SparseIntMat, v: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|row| row.iter().filter(|(j, _)| !v[*j].is_zero()).fold(BigInt::zero(), |acc, (j, x)| acc + x * &v[*j]))
        .collect()
}

/// `primitive` as a rational vector.
pub fn primitive_q(v: &[Rational]) -> QVec {
    primitive(v).into_iter().map(Rational::from_integer).collect()
}

/// Divides out the content and makes the leading entry positive.
pub fn normalize_int(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v;
    }
    let neg = v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    let g = if neg { -g } else { g };
    if !g.is_one() {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
    v
}

/// Incrementally built subspace of Q^n, kept as fraction-free echelon rows of
/// primitive integer vectors.
#[derive(Clone, Debug, Default)]
pub struct Span {
    rows: Vec<(usize, Vec<BigInt>)>,
    originals: Vec<QVec>,
}

impl Span {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_vectors<'a, I: IntoIterator<Item = &'a QVec>>(vs: I) -> Self {
        let mut s = Self::new();
        for v in vs {
            s.insert(v);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn residual(&self, v: &[Rational]) -> Vec<BigInt> {
        self.residual_int(primitive(v))
    }

    fn residual_int(&self, mut r: Vec<BigInt>) -> Vec<BigInt> {
        for (piv, b) in &self.rows {
            if !r[*piv].is_zero() {
                let g = r[*piv].gcd(&b[*piv]);
                let (sb, sr) = (&b[*piv] / &g, &r[*piv] / &g);
                for (x, y) in r.iter_mut().zip(b) {
                    *x = &*x * &sb - y * &sr;
                }
                r = normalize_int(r);
            }
        }
        r
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.residual(v).iter().all(|x| x.is_zero())
    }

    /// Adds `v` if it is independent; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        self.insert_reduced(v).is_some()
    }

    /// Integer form of `insert`; `v` need not be primitive.
    pub fn insert_int(&mut self, v: &[BigInt]) -> bool {
        let r = self.residual_int(normalize_int(v.to_vec()));
        match r.iter().position(|x| !x.is_zero()) {
            Some(p) => {
                self.rows.push((p, r));
                self.originals.push(v.iter().cloned().map(Rational::from_integer).collect());
                true
            }
            None => false,
        }
    }

    pub fn contains_int(&self, v: &[BigInt]) -> bool {
        self.residual_int(normalize_int(v.to_vec())).iter().all(|x| x.is_zero())
    }

    /// Like `insert`, but returns the echelon row added for `v`: its
    /// primitive integer residual against the current rows.
    pub fn insert_reduced(&mut self, v: &[Rational]) -> Option<QVec> {
        let r = self.residual(v);
        let p = r.iter().position(|x| !x.is_zero())?;
        let q: QVec = r.iter().map(|x| Rational::from_integer(x.clone())).collect();
        self.rows.push((p, r));
        self.originals.push(v.to_vec());
        Some(q)
    }

    /// Echelon rows in insertion order; they span the same space as `basis`.
    pub fn echelon(&self) -> Vec<QVec> {
        self.rows.iter().map(|(_, r)| r.iter().map(|x| Rational::from_integer(x.clone())).collect()).collect()
    }

    /// The inserted vectors that were independent, in insertion order.
    pub fn basis(&self) -> &[QVec] {
        &self.originals
    }
}

/// Basis of the null space {x : a x = 0}.
pub fn nullspace(a: &QMat, ncols: usize) -> Vec<QVec> {
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let piv = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x / &piv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..ncols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = zeros(ncols);
            v[f] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -m[i][f].clone();
            }
            v
        })
        .collect()
}

pub fn rank(a: &QMat) -> usize {
    Span::from_vectors(a.iter()).dim()
}

pub fn max_abs(v: &[Rational]) -> Rational {
    v.iter().map(|x| x.abs()).fold(Rational::zero(), |a, b| if b > a { b } else { a })
}
