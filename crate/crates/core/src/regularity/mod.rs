//! Hölder regularity of bivariate subdivision with diagonal dilation:
//! covering set, transition matrices, difference subspaces and the joint
//! spectral radius of the restricted families.

mod jsr;

pub use jsr::{jsr_bounds, jsr_bounds_with_floor, spectral_norm, spectral_radius, JsrEstimate};

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use nalgebra::DMatrix;
use num::{BigInt, One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, QMat, QVec, Span};
use crate::mask::Mask;
use crate::modular::{self, ModSpan};
use crate::poly::Exp;
use crate::rational::{self, int, Rational};

#[derive(Clone, Debug)]
pub struct TransitionSet {
    pub omega: Vec<Exp>,
    pub gamma: Vec<Exp>,
    pub matrices: Vec<QMat>,
}

impl TransitionSet {
    pub fn index_of(&self, w: Exp) -> Option<usize> {
        self.omega.iter().position(|x| *x == w)
    }

    pub fn matrix(&self, g: Exp) -> Option<&QMat> {
        self.gamma.iter().position(|x| *x == g).map(|i| &self.matrices[i])
    }

    pub fn dim(&self) -> usize {
        self.omega.len()
    }
}

#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    pub u: Vec<QVec>,
    pub u1: Vec<QVec>,
    pub u2: Vec<QVec>,
}

impl SubspaceBasis {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.u.len(), self.u1.len(), self.u2.len())
    }
}

fn bivariate(mask: &Mask) -> Result<[i64; 2]> {
    if mask.arity() != 2 {
        return Err(Error::Arity(mask.arity(), 2));
    }
    Ok([mask.dilation.m1, mask.dilation.m2])
}

/// Minimal set of unit cells whose closures cover the attractor of the
/// support under the digit map.
pub fn compute_omega(mask: &Mask) -> Result<Vec<Exp>> {
    let m = bivariate(mask)?;
    let supp: Vec<Exp> = mask.symbol.terms().map(|(e, _)| *e).collect();
    if supp.is_empty() {
        return Err(Error::Domain("empty mask".into()));
    }
    let mut range = [(0i64, 0i64); 2];
    for i in 0..2 {
        let lo = supp.iter().map(|a| a[i]).min().unwrap() as f64 / (m[i] - 1) as f64;
        let hi = supp.iter().map(|a| a[i]).max().unwrap() as f64 / (m[i] - 1) as f64;
        let a = lo.floor() as i64;
        let b = (hi.ceil() as i64 - 1).max(a);
        range[i] = (a, b);
    }
    let mut cells: BTreeSet<Exp> = BTreeSet::new();
    for x in range[0].0..=range[0].1 {
        for y in range[1].0..=range[1].1 {
            cells.insert([x, y]);
        }
    }
    // Open boxes M(w + (0,1)^2) and a + w' + (0,1)^2 overlap.
    let meets = |w: &Exp, a: &Exp, v: &Exp| {
        (0..2).all(|i| m[i] * w[i] < a[i] + v[i] + 1 && a[i] + v[i] < m[i] * w[i] + m[i])
    };
    loop {
        let keep: BTreeSet<Exp> = cells
            .iter()
            .filter(|w| supp.iter().any(|a| cells.iter().any(|v| meets(w, a, v))))
            .copied()
            .collect();
        if keep == cells {
            return Ok(cells.into_iter().collect());
        }
        cells = keep;
    }
}

/// T_g[a][b] = p(M a - b + g) for a, b in omega.
pub fn transition_matrices(mask: &Mask, omega: &[Exp]) -> Result<TransitionSet> {
    let m = bivariate(mask)?;
    let gamma = mask.dilation.gamma();
    let matrices = gamma
        .iter()
        .map(|g| {
            omega
                .iter()
                .map(|a| {
                    omega
                        .iter()
                        .map(|b| mask.coeff([m[0] * a[0] - b[0] + g[0], m[1] * a[1] - b[1] + g[1]]))
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(TransitionSet { omega: omega.to_vec(), gamma, matrices })
}

/// Smallest subspace containing `seeds` and invariant under every T_g.
///
/// The subspace is found modulo a large prime and certified over the
/// rationals through its annihilator; `closure_exact` is used when the
/// certificate cannot be built.
pub fn closure(ts: &TransitionSet, seeds: &[QVec]) -> Vec<QVec> {
    certified_closure(ts, seeds).unwrap_or_else(|| closure_exact(ts, seeds))
}

/// Closure by fraction-free elimination over the integers, breadth first.
pub fn closure_exact(ts: &TransitionSet, seeds: &[QVec]) -> Vec<QVec> {
    let mats = linalg::scaled_integer(&ts.matrices);
    let mut span = Span::new();
    let mut queue: VecDeque<Vec<BigInt>> = VecDeque::new();
    for s in seeds {
        let s = linalg::primitive(s);
        if span.insert_int(&s) {
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for t in &mats {
            let w = linalg::normalize_int(linalg::sparse_matvec(t, &v));
            if span.insert_int(&w) {
                queue.push_back(w);
            }
        }
    }
    span.basis().to_vec()
}

/// Rational annihilator, in reduced echelon form, of a subspace given mod P.
struct Annihilator {
    pivots: Vec<usize>,
    rows: Vec<QVec>,
}

impl Annihilator {
    fn from_mod_span(span: &ModSpan, n: usize) -> Option<Self> {
        let mut w = ModSpan::new();
        for v in span.annihilator(n) {
            w.insert(&v);
        }
        let (pivots, rows) = w.rref();
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|x| modular::reconstruct(*x)).collect::<Option<QVec>>())
            .collect::<Option<Vec<QVec>>>()?;
        Some(Self { pivots, rows })
    }

    fn kills(&self, v: &[Rational]) -> bool {
        self.rows.iter().all(|w| dot(w, v).is_zero())
    }

    /// Row vectors w T stay in the row space for every w and T.
    fn invariant_under(&self, ts: &TransitionSet) -> bool {
        ts.matrices.iter().all(|t| {
            self.rows.iter().all(|w| {
                let mut v = linalg::zeros(t.first().map_or(0, |r| r.len()));
                for (wi, row) in w.iter().zip(t) {
                    if wi.is_zero() {
                        continue;
                    }
                    for (x, y) in v.iter_mut().zip(row) {
                        if !y.is_zero() {
                            *x += wi * y;
                        }
                    }
                }
                let mut rest = v.clone();
                for (p, r) in self.pivots.iter().zip(&self.rows) {
                    let c = v[*p].clone();
                    if !c.is_zero() {
                        for (x, y) in rest.iter_mut().zip(r) {
                            if !y.is_zero() {
                                *x -= &c * y;
                            }
                        }
                    }
                }
                rest.iter().all(|x| x.is_zero())
            })
        })
    }

    /// Basis of the kernel, one vector per non-pivot column.
    fn kernel(&self, n: usize) -> Vec<QVec> {
        (0..n)
            .filter(|c| !self.pivots.contains(c))
            .map(|f| {
                let mut u = linalg::zeros(n);
                u[f] = Rational::one();
                for (p, r) in self.pivots.iter().zip(&self.rows) {
                    u[*p] = -r[f].clone();
                }
                u
            })
            .collect()
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

fn reduce_family(ts: &TransitionSet) -> Option<Vec<modular::ModMat>> {
    ts.matrices.iter().map(|m| modular::reduce_mat(m)).collect()
}

/// The closure is the kernel K of the certified annihilator: K contains the
/// seeds and is invariant, so it contains the closure, and the closure has
/// dimension at least the rank found modulo P, which equals dim K.
fn certified_closure(ts: &TransitionSet, seeds: &[QVec]) -> Option<Vec<QVec>> {
    let n = ts.dim();
    let mats = reduce_family(ts)?;
    let mut span = ModSpan::new();
    let mut queue: VecDeque<Vec<u64>> = VecDeque::new();
    for s in seeds {
        let s = modular::reduce_vec(s)?;
        if span.insert(&s) {
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for t in &mats {
            let w = modular::matvec(t, &v);
            if span.insert(&w) {
                queue.push_back(w);
            }
        }
    }
    let ann = Annihilator::from_mod_span(&span, n)?;
    let ok = seeds.iter().all(|s| ann.kills(s)) && ann.invariant_under(ts);
    ok.then(|| ann.kernel(n))
}

fn unit(n: usize, i: usize) -> QVec {
    let mut v = linalg::zeros(n);
    v[i] = Rational::one();
    v
}

fn sub(a: &[Rational], b: &[Rational]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Eigenvector of T_(0,0) for eigenvalue 1 normalized to unit sum.
pub fn fixed_vector(ts: &TransitionSet) -> Result<QVec> {
    let t0 = ts.matrix([0, 0]).ok_or_else(|| Error::Domain("missing T_(0,0)".into()))?;
    if let Some(v) = certified_fixed_vector(t0) {
        return Ok(v);
    }
    fixed_vector_exact(t0)
}

/// Solution of (T - I) v = 0, sum v = 1 by multimodular elimination, checked exactly.
fn certified_fixed_vector(t0: &QMat) -> Option<QVec> {
    let n = t0.len();
    let mut a: QMat = t0
        .iter()
        .enumerate()
        .map(|(i, row)| row.iter().enumerate().map(|(j, x)| if i == j { x - int(1) } else { x.clone() }).collect())
        .collect();
    a.push(vec![Rational::one(); n]);
    let mut b = linalg::zeros(n);
    b.push(Rational::one());
    let check = |v: &[Rational]| {
        linalg::matvec(t0, v) == v && v.iter().fold(Rational::zero(), |a, b| a + b) == Rational::one()
    };
    modular::solve_multimodular(&a, &b, 64, check)
}

fn fixed_vector_exact(t0: &QMat) -> Result<QVec> {
    let n = t0.len();
    let shifted: QMat = (0..n)
        .map(|i| (0..n).map(|j| if i == j { &t0[i][j] - int(1) } else { t0[i][j].clone() }).collect())
        .collect();
    let ns = linalg::nullspace(&shifted, n);
    let v = ns
        .into_iter()
        .find(|v| !v.iter().fold(Rational::zero(), |a, b| a + b).is_zero())
        .ok_or_else(|| Error::Domain("T_(0,0) has no eigenvalue 1 with nonzero-sum eigenvector".into()))?;
    let s = v.iter().fold(Rational::zero(), |a, b| a + b);
    Ok(v.iter().map(|x| x / &s).collect())
}

/// U from the fixed vector; U1, U2 from the interpolatory seeds
/// e_(-1,0) - e_(0,0) and e_(0,-1) - e_(0,0).
pub fn invariant_subspaces(ts: &TransitionSet) -> Result<SubspaceBasis> {
    let n = ts.dim();
    let v0 = fixed_vector(ts)?;
    if n == 1 {
        // The sum-zero subspace of a single cell is trivial.
        return Ok(SubspaceBasis { u: Vec::new(), u1: Vec::new(), u2: Vec::new() });
    }
    let seeds: Vec<QVec> = ts
        .gamma
        .iter()
        .zip(&ts.matrices)
        .filter(|(g, _)| **g != [0, 0])
        .map(|(_, t)| sub(&linalg::matvec(t, &v0), &v0))
        .collect();
    let u = closure(ts, &seeds);
    let diff = |w: Exp| -> Result<QVec> {
        match (ts.index_of(w), ts.index_of([0, 0])) {
            (Some(i), Some(o)) => Ok(sub(&unit(n, i), &unit(n, o))),
            _ => Err(Error::Domain(format!("covering set lacks {w:?} or the origin"))),
        }
    };
    let u1 = closure(ts, &[diff([-1, 0])?]);
    let u2 = closure(ts, &[diff([0, -1])?]);
    Ok(SubspaceBasis { u, u1, u2 })
}

/// Exact check that span(basis) is invariant under every T_g. The span is
/// identified with the kernel of a certified annihilator when possible.
pub fn is_invariant(ts: &TransitionSet, basis: &[QVec]) -> bool {
    let n = ts.dim();
    let certified = (|| {
        let mut span = ModSpan::new();
        for b in basis {
            span.insert(&modular::reduce_vec(b)?);
        }
        let ann = Annihilator::from_mod_span(&span, n)?;
        basis.iter().all(|b| ann.kills(b)).then_some(ann)
    })();
    match certified {
        Some(ann) => ann.invariant_under(ts),
        None => is_invariant_exact(ts, basis),
    }
}

/// Membership of every T_g u in span(basis) by exact elimination.
pub fn is_invariant_exact(ts: &TransitionSet, basis: &[QVec]) -> bool {
    let span = Span::from_vectors(basis.iter());
    let mats = linalg::scaled_integer(&ts.matrices);
    basis.iter().map(|u| linalg::primitive(u)).all(|u| mats.iter().all(|t| span.contains_int(&linalg::sparse_matvec(t, &u))))
}

/// Completes `basis` with greedily chosen unit vectors.
pub fn extension_matrix(basis: &[QVec], n: usize) -> QMat {
    let mut span = Span::from_vectors(basis.iter());
    let mut cols: Vec<QVec> = basis.to_vec();
    for i in 0..n {
        let e = unit(n, i);
        if span.insert(&e) {
            cols.push(e);
        }
    }
    linalg::transpose(&cols)
}

/// Upper-left d x d blocks of S^{-1} T_g S, where the first d columns of S
/// span an invariant subspace.
pub fn restrict_with_s(ts: &TransitionSet, s: &QMat, d: usize) -> Result<Vec<QMat>> {
    let sinv = linalg::inverse(s)?;
    Ok(ts
        .matrices
        .iter()
        .map(|t| {
            let full = linalg::matmul(&sinv, &linalg::matmul(t, s));
            full.into_iter().take(d).map(|r| r.into_iter().take(d).collect()).collect()
        })
        .collect())
}

pub fn restrict(ts: &TransitionSet, basis: &[QVec]) -> Result<Vec<QMat>> {
    let s = extension_matrix(basis, ts.dim());
    restrict_with_s(ts, &s, basis.len())
}

/// Matrices of one diagonal block of the restricted family.
#[derive(Clone, Debug)]
pub struct Block {
    /// Polynomial degree of the quotient, or None for the residual block.
    pub degree: Option<u32>,
    pub matrices: Vec<DMatrix<f64>>,
}

fn monomial_row(omega: &[Exp], mu: [u32; 2]) -> QVec {
    omega
        .iter()
        .map(|w| rational::pow(&int(w[0]), mu[0]) * rational::pow(&int(w[1]), mu[1]))
        .collect()
}

fn combine(vs: &[QVec], coef: &[Rational]) -> QVec {
    let mut out = linalg::zeros(vs.first().map_or(0, |v| v.len()));
    for (v, c) in vs.iter().zip(coef) {
        if !c.is_zero() {
            for (o, x) in out.iter_mut().zip(v) {
                *o += c * x;
            }
        }
    }
    out
}

fn to_dmatrix(a: &QMat) -> DMatrix<f64> {
    let n = a.len();
    let m = a.first().map_or(0, |r| r.len());
    DMatrix::from_fn(n, m, |i, j| rational::to_f64(&a[i][j]))
}

/// Splits the family restricted to an invariant subspace along the flag
/// W_k = {u : sum_w u(w) w^mu = 0 for 1 <= |mu| <= k}, k = 1..max_degree.
/// Returns the quotient blocks W_{k-1}/W_k in exact dual coordinates and the
/// residual block on W_max in an orthonormal basis.
pub fn flag_blocks(ts: &TransitionSet, basis: &[QVec], max_degree: u32) -> Result<Vec<Block>> {
    let mut blocks = Vec::new();
    let mut w: Vec<QVec> = basis.to_vec();
    for k in 1..=max_degree {
        if w.is_empty() {
            break;
        }
        let funcs: Vec<QVec> = (0..=k).map(|a| monomial_row(&ts.omega, [k - a, a])).collect();
        let c: QMat = funcs.iter().map(|f| w.iter().map(|v| dot(f, v)).collect()).collect();
        let mut row_span = Span::new();
        let sel: Vec<usize> = (0..c.len()).filter(|&i| row_span.insert(&c[i])).collect();
        if sel.is_empty() {
            continue;
        }
        let csel: QMat = sel.iter().map(|&i| c[i].clone()).collect();
        let mut col_span = Span::new();
        let cols_t = linalg::transpose(&csel);
        let piv: Vec<usize> = (0..cols_t.len()).filter(|&j| col_span.insert(&cols_t[j])).collect();
        let sq: QMat = csel.iter().map(|r| piv.iter().map(|&j| r[j].clone()).collect()).collect();
        let sq_inv = linalg::inverse(&sq)?;
        let r = sel.len();
        let reps: Vec<QVec> = (0..r)
            .map(|j| {
                let mut coef = linalg::zeros(w.len());
                for (t, &p) in piv.iter().enumerate() {
                    coef[p] = sq_inv[t][j].clone();
                }
                combine(&w, &coef)
            })
            .collect();
        let quotient: Vec<DMatrix<f64>> = ts
            .matrices
            .iter()
            .map(|t| {
                let q: QMat = sel
                    .iter()
                    .map(|&i| reps.iter().map(|u| dot(&funcs[i], &linalg::matvec(t, u))).collect())
                    .collect();
                to_dmatrix(&q)
            })
            .collect();
        blocks.push(Block { degree: Some(k), matrices: quotient });
        let ns = linalg::nullspace(&csel, w.len());
        let next: Vec<QVec> = ns.iter().map(|coef| combine(&w, coef)).collect();
        if !is_invariant(ts, &next) {
            return Err(Error::Domain(format!("degree-{k} flag space is not invariant")));
        }
        w = next;
    }
    if !w.is_empty() {
        let n = ts.dim();
        let b = DMatrix::from_fn(n, w.len(), |i, j| rational::to_f64(&w[j][i]));
        let q = b.qr().q();
        let matrices = ts.matrices.iter().map(|t| q.transpose() * to_dmatrix(t) * &q).collect();
        blocks.push(Block { degree: None, matrices });
    }
    Ok(blocks)
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
}

/// JSR of a block-triangular family as the maximum over its diagonal blocks.
pub fn block_jsr(blocks: &[Block], depth: usize) -> Result<Bracket> {
    let mut lower = 0.0f64;
    let mut upper = 0.0f64;
    let mut order: Vec<&Block> = blocks.iter().collect();
    order.sort_by_key(|b| b.matrices.first().map_or(0, |m| m.nrows()));
    for b in order {
        let e = jsr_bounds_with_floor(&b.matrices, depth, lower)?;
        lower = lower.max(e.lower);
        upper = upper.max(e.upper);
    }
    Ok(Bracket { lower, upper: upper.max(lower) })
}

#[derive(Clone, Debug, Serialize)]
pub struct HolderReport {
    pub family: String,
    pub dilation: String,
    pub omega_size: usize,
    pub dims: (usize, usize, usize),
    pub rho: Bracket,
    pub rho1: Bracket,
    pub rho2: Bracket,
    /// Some(true) if the upper bound of rho is below 1, Some(false) if the
    /// lower bound reaches 1, None when the bracket straddles 1.
    pub continuous: Option<bool>,
    pub alpha: Bracket,
    pub depth: usize,
}

fn log_inv(base: f64, x: f64) -> f64 {
    if x <= 0.0 {
        f64::INFINITY
    } else {
        -x.ln() / base.ln()
    }
}

pub fn holder_exponent(mask: &Mask, depth: usize) -> Result<HolderReport> {
    let m = bivariate(mask)?;
    let omega = compute_omega(mask)?;
    let ts = transition_matrices(mask, &omega)?;
    let sub = invariant_subspaces(&ts)?;
    let g = crate::analysis::generation_degree(mask).max(0) as u32;
    let bracket = |basis: &[QVec]| -> Result<Bracket> {
        if basis.is_empty() {
            return Ok(Bracket { lower: 0.0, upper: 0.0 });
        }
        block_jsr(&flag_blocks(&ts, basis, g)?, depth)
    };
    let rho = bracket(&sub.u)?;
    let rho1 = bracket(&sub.u1)?;
    let rho2 = bracket(&sub.u2)?;
    let continuous = if rho.upper < 1.0 {
        Some(true)
    } else if rho.lower >= 1.0 {
        Some(false)
    } else {
        None
    };
    let (b1, b2) = (m[0] as f64, m[1] as f64);
    let alpha = Bracket {
        lower: log_inv(b1, rho1.upper).min(log_inv(b2, rho2.upper)),
        upper: log_inv(b1, rho1.lower).min(log_inv(b2, rho2.lower)),
    };
    Ok(HolderReport {
        family: mask.family.to_string(),
        dilation: mask.dilation.to_string(),
        omega_size: omega.len(),
        dims: sub.dims(),
        rho,
        rho1,
        rho2,
        continuous,
        alpha,
        depth,
    })
}

/// Column sums of every transition matrix, keyed by coset.
pub fn column_sums(ts: &TransitionSet) -> BTreeMap<Exp, Vec<Rational>> {
    ts.gamma
        .iter()
        .zip(&ts.matrices)
        .map(|(g, t)| {
            let n = t.len();
            (*g, (0..n).map(|j| t.iter().fold(Rational::zero(), |a, r| a + &r[j])).collect())
        })
        .collect()
}
