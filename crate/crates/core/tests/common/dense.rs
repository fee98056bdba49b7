//! Dense reference implementations of the grid operators.

use anisomg::multigrid::{laplacian_stencil, Dims, GridVec, Stencil};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};

pub fn rng() -> rand::rngs::StdRng {
    rand::rngs::StdRng::seed_from_u64(2024)
}

pub fn random_grid(dims: Dims, r: &mut impl Rng) -> GridVec {
    GridVec::from_values(dims, (0..dims.0 * dims.1).map(|_| r.gen_range(-1.0..1.0)).collect()).unwrap()
}

/// T[(i1,i2),(j1,j2)] = s(i1 - j1, i2 - j2).
pub fn dense_toeplitz(s: &Stencil, d: Dims) -> DMatrix<f64> {
    let n = d.0 * d.1;
    DMatrix::from_fn(n, n, |i, j| {
        let (i1, i2) = ((i / d.1) as i64, (i % d.1) as i64);
        let (j1, j2) = ((j / d.1) as i64, (j % d.1) as i64);
        s.get([i1 - j1, i2 - j2])
    })
}

/// Kronecker product of the 1D downsampling matrices with rows 0_{m-1} 1 0_{m-1}.
pub fn dense_k(fine: Dims, f: (usize, usize)) -> DMatrix<f64> {
    let k1d = |n: usize, m: usize| {
        let nc = (n + 1) / m - 1;
        DMatrix::from_fn(nc, n, |r, c| if c == m * r + m - 1 { 1.0 } else { 0.0 })
    };
    k1d(fine.0, f.0).kronecker(&k1d(fine.1, f.1))
}

pub fn dense_p(p: &Stencil, fine: Dims, f: (usize, usize)) -> DMatrix<f64> {
    dense_toeplitz(p, fine) * dense_k(fine, f).transpose()
}

pub fn vecof(g: &GridVec) -> DVector<f64> {
    DVector::from_column_slice(&g.values)
}

pub fn rel(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

pub fn lap(d: Dims) -> Stencil {
    laplacian_stencil(1.0, 1.0 / (d.0 + 1) as f64, 1.0 / (d.1 + 1) as f64)
}

pub fn dense_gs(a: &DMatrix<f64>, b: &DVector<f64>, x: &DVector<f64>) -> DVector<f64> {
    let lower = a.lower_triangle();
    let upper = a - &lower;
    lower.solve_lower_triangular(&(b - upper * x)).unwrap()
}

