//! Matrix-free geometric V-cycle on rectangular grids with multilevel
//! Toeplitz system matrices and subdivision-based grid transfer.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mask::Mask;
use crate::rational;

pub type Dims = (usize, usize);

/// Finitely many Fourier coefficients of a bivariate trigonometric polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct Stencil {
    coeffs: Vec<([i64; 2], f64)>,
}

impl Stencil {
    pub fn new<I: IntoIterator<Item = ([i64; 2], f64)>>(it: I) -> Self {
        let mut map: BTreeMap<[i64; 2], f64> = BTreeMap::new();
        for (k, v) in it {
            *map.entry(k).or_insert(0.0) += v;
        }
        map.retain(|_, v| *v != 0.0);
        Self { coeffs: map.into_iter().collect() }
    }

    /// Bivariate masks map directly; univariate ones are placed along the
    /// first axis.
    pub fn from_mask(mask: &Mask) -> Self {
        Self::new(mask.symbol.terms().map(|(e, c)| (*e, rational::to_f64(c))))
    }

    pub fn coeffs(&self) -> &[([i64; 2], f64)] {
        &self.coeffs
    }

    pub fn get(&self, a: [i64; 2]) -> f64 {
        self.coeffs.iter().find(|(k, _)| *k == a).map_or(0.0, |(_, v)| *v)
    }

    pub fn center(&self) -> f64 {
        self.get([0, 0])
    }

    pub fn radius(&self) -> [i64; 2] {
        let mut r = [0, 0];
        for (k, _) in &self.coeffs {
            r[0] = r[0].max(k[0].abs());
            r[1] = r[1].max(k[1].abs());
        }
        r
    }

    /// c(a) = c(-a), which makes the Toeplitz operator symmetric.
    pub fn is_symmetric(&self) -> bool {
        self.coeffs.iter().all(|(k, v)| (self.get([-k[0], -k[1]]) - v).abs() <= 1e-14 * v.abs().max(1.0))
    }

    pub fn sum(&self) -> f64 {
        self.coeffs.iter().map(|x| x.1).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|(k, v)| (*k, v * s)).collect() }
    }
}

/// Five-point stencil of -eps d^2/dx1^2 - d^2/dx2^2.
pub fn laplacian_stencil(eps: f64, h1: f64, h2: f64) -> Stencil {
    let (a, b) = (eps / (h1 * h1), 1.0 / (h2 * h2));
    Stencil::new([
        ([0, 0], 2.0 * a + 2.0 * b),
        ([1, 0], -a),
        ([-1, 0], -a),
        ([0, 1], -b),
        ([0, -1], -b),
    ])
}

/// Values on an n1 x n2 grid, second index fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridVec {
    pub dims: Dims,
    pub values: Vec<f64>,
}

impl GridVec {
    pub fn zeros(dims: Dims) -> Self {
        Self { dims, values: vec![0.0; dims.0 * dims.1] }
    }

    pub fn from_values(dims: Dims, values: Vec<f64>) -> Result<Self> {
        if values.len() != dims.0 * dims.1 {
            return Err(Error::Dims(format!("{} values for a {}x{} grid", values.len(), dims.0, dims.1)));
        }
        Ok(Self { dims, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn idx(&self, i1: usize, i2: usize) -> usize {
        i1 * self.dims.1 + i2
    }

    pub fn at(&self, i1: usize, i2: usize) -> f64 {
        self.values[self.idx(i1, i2)]
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }

    pub fn axpy(&mut self, a: f64, other: &Self) {
        for (x, y) in self.values.iter_mut().zip(&other.values) {
            *x += a * y;
        }
    }
}

fn check_same(a: Dims, b: Dims) -> Result<()> {
    if a != b {
        return Err(Error::Dims(format!("{a:?} vs {b:?}")));
    }
    Ok(())
}

/// y(a) = sum_b s(a - b) x(b) over b inside the grid.
pub fn toeplitz_apply(s: &Stencil, x: &GridVec) -> Result<GridVec> {
    let (n1, n2) = x.dims;
    let r = s.radius();
    if r[0] as usize > n1.max(1) * 2 || r[1] as usize > n2.max(1) * 2 {
        return Err(Error::Dims(format!("stencil radius {r:?} exceeds grid {n1}x{n2}")));
    }
    let mut y = GridVec::zeros(x.dims);
    apply_into(s, x, &mut y.values);
    Ok(y)
}

fn apply_into(s: &Stencil, x: &GridVec, out: &mut [f64]) {
    let (n1, n2) = (x.dims.0 as i64, x.dims.1 as i64);
    out.iter_mut().for_each(|v| *v = 0.0);
    for &([a1, a2], c) in s.coeffs() {
        let lo1 = a1.max(0);
        let hi1 = (n1 + a1).min(n1);
        let lo2 = a2.max(0);
        let hi2 = (n2 + a2).min(n2);
        for i1 in lo1..hi1 {
            let row_out = (i1 * n2) as usize;
            let row_in = ((i1 - a1) * n2) as usize;
            for i2 in lo2..hi2 {
                out[row_out + i2 as usize] += c * x.values[row_in + (i2 - a2) as usize];
            }
        }
    }
}

/// Residual b - T(s) x.
pub fn residual(s: &Stencil, b: &GridVec, x: &GridVec) -> GridVec {
    let mut r = GridVec::zeros(x.dims);
    apply_into(s, x, &mut r.values);
    for (ri, bi) in r.values.iter_mut().zip(&b.values) {
        *ri = bi - *ri;
    }
    r
}

/// Coarse dims ((n_i + 1)/m_i - 1), or an error when the division is not exact.
pub fn coarse_dims(fine: Dims, factor: (usize, usize)) -> Result<Dims> {
    let f = |n: usize, m: usize| -> Result<usize> {
        if m < 2 || (n + 1) % m != 0 || (n + 1) / m < 2 {
            return Err(Error::Dims(format!("grid size {n} cannot be coarsened by {m}")));
        }
        Ok((n + 1) / m - 1)
    };
    Ok((f(fine.0, factor.0)?, f(fine.1, factor.1)?))
}

fn image(r: usize, m: usize, shift: i64) -> i64 {
    (m * r + m - 1) as i64 - shift
}

/// P = T(p) K^T: coarse node r sits at fine index m r + m - 1 - shift.
pub fn prolongate(p: &Stencil, coarse: &GridVec, factor: (usize, usize), fine_dims: Dims, shift: i64) -> Result<GridVec> {
    check_same(coarse_dims(fine_dims, factor)?, coarse.dims)?;
    let mut fine = GridVec::zeros(fine_dims);
    let (n1, n2) = (fine_dims.0 as i64, fine_dims.1 as i64);
    for r1 in 0..coarse.dims.0 {
        let c1 = image(r1, factor.0, shift);
        for r2 in 0..coarse.dims.1 {
            let v = coarse.at(r1, r2);
            if v == 0.0 {
                continue;
            }
            let c2 = image(r2, factor.1, shift);
            for &([a1, a2], c) in p.coeffs() {
                let (i1, i2) = (c1 + a1, c2 + a2);
                if (0..n1).contains(&i1) && (0..n2).contains(&i2) {
                    fine.values[(i1 * n2 + i2) as usize] += c * v;
                }
            }
        }
    }
    Ok(fine)
}

/// (1 / (m1 m2)) P^T r.
pub fn restrict(p: &Stencil, fine: &GridVec, factor: (usize, usize), coarse: Dims, shift: i64) -> Result<GridVec> {
    check_same(coarse_dims(fine.dims, factor)?, coarse)?;
    let scale = 1.0 / (factor.0 * factor.1) as f64;
    let mut out = GridVec::zeros(coarse);
    let (n1, n2) = (fine.dims.0 as i64, fine.dims.1 as i64);
    for r1 in 0..coarse.0 {
        let c1 = image(r1, factor.0, shift);
        for r2 in 0..coarse.1 {
            let c2 = image(r2, factor.1, shift);
            let mut acc = 0.0;
            for &([a1, a2], c) in p.coeffs() {
                let (i1, i2) = (c1 + a1, c2 + a2);
                if (0..n1).contains(&i1) && (0..n2).contains(&i2) {
                    acc += c * fine.values[(i1 * n2 + i2) as usize];
                }
            }
            out.values[r1 * coarse.1 + r2] = scale * acc;
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
pub enum SweepOrder {
    /// Storage order.
    #[default]
    Forward,
    Backward,
    /// Forward then backward.
    Symmetric,
}

impl std::str::FromStr for SweepOrder {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forward" => Ok(Self::Forward),
            "backward" => Ok(Self::Backward),
            "symmetric" => Ok(Self::Symmetric),
            _ => Err(Error::Parse(format!("unknown sweep order '{s}'"))),
        }
    }
}

fn sweep(s: &Stencil, b: &GridVec, x: &mut GridVec, backward: bool) {
    let (n1, n2) = (x.dims.0 as i64, x.dims.1 as i64);
    let d = s.center();
    let off: Vec<([i64; 2], f64)> = s.coeffs().iter().filter(|(k, _)| *k != [0, 0]).copied().collect();
    let mut visit = |i1: i64, i2: i64| {
        let mut acc = b.values[(i1 * n2 + i2) as usize];
        for &([a1, a2], c) in &off {
            let (j1, j2) = (i1 - a1, i2 - a2);
            if (0..n1).contains(&j1) && (0..n2).contains(&j2) {
                acc -= c * x.values[(j1 * n2 + j2) as usize];
            }
        }
        x.values[(i1 * n2 + i2) as usize] = acc / d;
    };
    if backward {
        for i1 in (0..n1).rev() {
            for i2 in (0..n2).rev() {
                visit(i1, i2);
            }
        }
    } else {
        for i1 in 0..n1 {
            for i2 in 0..n2 {
                visit(i1, i2);
            }
        }
    }
}

pub fn gauss_seidel(s: &Stencil, b: &GridVec, x: &mut GridVec, sweeps: usize, order: SweepOrder) -> Result<()> {
    check_same(b.dims, x.dims)?;
    if s.center() == 0.0 {
        return Err(Error::Singular("zero diagonal in Gauss-Seidel".into()));
    }
    for _ in 0..sweeps {
        match order {
            SweepOrder::Forward => sweep(s, b, x, false),
            SweepOrder::Backward => sweep(s, b, x, true),
            SweepOrder::Symmetric => {
                sweep(s, b, x, false);
                sweep(s, b, x, true);
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct Transfer {
    pub stencil: Stencil,
    pub factor: (usize, usize),
    pub label: String,
}

#[derive(Clone, Debug)]
pub struct Level {
    pub dims: Dims,
    pub system: Stencil,
    /// Anisotropy of the rescaled symbol on this grid.
    pub eps: f64,
    /// Transfer to the next coarser level; None on the coarsest.
    pub transfer: Option<Transfer>,
    pub pre: usize,
    pub post: usize,
}

#[derive(Clone, Debug)]
pub struct LevelPlan {
    pub levels: Vec<Level>,
    pub order: SweepOrder,
    /// Debug shift of the coarse-node image, 0 for the default embedding.
    pub shift: i64,
}

impl LevelPlan {
    pub fn validate(&self) -> Result<()> {
        let Some(last) = self.levels.last() else {
            return Err(Error::Param("empty level plan".into()));
        };
        if last.transfer.is_some() {
            return Err(Error::Param("coarsest level must not carry a transfer".into()));
        }
        for w in self.levels.windows(2) {
            let t = w[0].transfer.as_ref().ok_or_else(|| Error::Param("missing transfer".into()))?;
            check_same(coarse_dims(w[0].dims, t.factor)?, w[1].dims)?;
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }
}

fn dense_matrix(s: &Stencil, dims: Dims) -> DMatrix<f64> {
    let n = dims.0 * dims.1;
    let mut a = DMatrix::zeros(n, n);
    let mut e = GridVec::zeros(dims);
    for j in 0..n {
        e.values[j] = 1.0;
        let col = toeplitz_apply(s, &e).expect("stencil fits");
        for i in 0..n {
            a[(i, j)] = col.values[i];
        }
        e.values[j] = 0.0;
    }
    a
}

/// Dense matrix of T(s) on a grid, for oracles and small direct solves.
pub fn assemble(s: &Stencil, dims: Dims) -> DMatrix<f64> {
    dense_matrix(s, dims)
}

const DENSE_LIMIT: usize = 2500;

enum Coarse {
    Cholesky(nalgebra::linalg::Cholesky<f64, nalgebra::Dyn>),
    Lu(nalgebra::linalg::LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
    Cg,
}

/// A validated plan with its coarsest-level factorization.
pub struct Multigrid {
    pub plan: LevelPlan,
    coarse: Coarse,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveStats {
    pub iters: usize,
    pub conv_rate: f64,
    pub converged: bool,
    pub history: Vec<f64>,
}

impl Multigrid {
    pub fn new(plan: LevelPlan) -> Result<Self> {
        plan.validate()?;
        let last = plan.levels.last().unwrap();
        let n = last.dims.0 * last.dims.1;
        let coarse = if n <= DENSE_LIMIT {
            let a = dense_matrix(&last.system, last.dims);
            match a.clone().cholesky() {
                Some(c) => Coarse::Cholesky(c),
                None => Coarse::Lu(a.lu()),
            }
        } else {
            Coarse::Cg
        };
        Ok(Self { plan, coarse })
    }

    fn coarse_solve(&self, b: &GridVec) -> Result<GridVec> {
        let last = self.plan.levels.last().unwrap();
        let rhs = DVector::from_column_slice(&b.values);
        let x = match &self.coarse {
            Coarse::Cholesky(c) => c.solve(&rhs),
            Coarse::Lu(lu) => lu.solve(&rhs).ok_or_else(|| Error::Singular("coarsest system".into()))?,
            Coarse::Cg => return conjugate_gradient(&last.system, b, 1e-14, 100_000),
        };
        GridVec::from_values(b.dims, x.as_slice().to_vec())
    }

    /// One V-cycle starting at `level`.
    pub fn v_cycle(&self, b: &GridVec, x: GridVec, level: usize) -> Result<GridVec> {
        let lv = self.plan.levels.get(level).ok_or_else(|| Error::Param(format!("no level {level}")))?;
        check_same(lv.dims, b.dims)?;
        let Some(t) = &lv.transfer else {
            return self.coarse_solve(b);
        };
        let mut x = x;
        gauss_seidel(&lv.system, b, &mut x, lv.pre, self.plan.order)?;
        let r = residual(&lv.system, b, &x);
        let next = &self.plan.levels[level + 1];
        let rc = restrict(&t.stencil, &r, t.factor, next.dims, self.plan.shift)?;
        let ec = self.v_cycle(&rc, GridVec::zeros(next.dims), level + 1)?;
        let e = prolongate(&t.stencil, &ec, t.factor, lv.dims, self.plan.shift)?;
        x.axpy(1.0, &e);
        gauss_seidel(&lv.system, b, &mut x, lv.post, self.plan.order)?;
        Ok(x)
    }

    /// V-cycles from x = 0 until ||r_s|| / ||r_0|| < tol.
    pub fn solve(&self, b: &GridVec, tol: f64, max_iter: usize) -> Result<(GridVec, SolveStats)> {
        let a = &self.plan.levels[0].system;
        let mut x = GridVec::zeros(b.dims);
        let r0 = b.norm();
        let mut history = vec![1.0];
        if r0 == 0.0 {
            return Ok((x, SolveStats { iters: 0, conv_rate: 0.0, converged: true, history }));
        }
        for s in 1..=max_iter {
            x = self.v_cycle(b, x, 0)?;
            let ratio = residual(a, b, &x).norm() / r0;
            history.push(ratio);
            if ratio < tol {
                let rate = ratio.powf(1.0 / s as f64);
                return Ok((x, SolveStats { iters: s, conv_rate: rate, converged: true, history }));
            }
        }
        let last = *history.last().unwrap();
        let stats = SolveStats { iters: max_iter, conv_rate: last.powf(1.0 / max_iter as f64), converged: false, history };
        Ok((x, stats))
    }
}

/// Plain CG on the symmetric system T(s) x = b.
pub fn conjugate_gradient(s: &Stencil, b: &GridVec, tol: f64, max_iter: usize) -> Result<GridVec> {
    let mut x = GridVec::zeros(b.dims);
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rr = r.dot(&r);
    let stop = tol * tol * rr;
    let mut ap = GridVec::zeros(b.dims);
    for _ in 0..max_iter {
        if rr <= stop {
            return Ok(x);
        }
        apply_into(s, &p, &mut ap.values);
        let alpha = rr / p.dot(&ap);
        x.axpy(alpha, &p);
        r.axpy(-alpha, &ap);
        let next = r.dot(&r);
        let beta = next / rr;
        rr = next;
        for (pi, ri) in p.values.iter_mut().zip(&r.values) {
            *pi = ri + beta * *pi;
        }
    }
    if rr <= stop {
        Ok(x)
    } else {
        Err(Error::Domain("conjugate gradient did not converge".into()))
    }
}
