//! Joint spectral radius bounds by product enumeration.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Products kept per level before deepening stops.
const MAX_LEVEL_NODES: usize = 400_000;

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct JsrEstimate {
    pub lower: f64,
    pub upper: f64,
    /// Product length reached.
    pub depth: usize,
}

const EIG_EPS: f64 = 1e-14;
const EIG_MAX_ITER: usize = 5_000;

/// Largest singular value; the Frobenius norm stands in if the SVD does not converge.
pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    if a.nrows() == 1 && a.ncols() == 1 {
        return a[(0, 0)].abs();
    }
    match nalgebra::SVD::try_new(a.clone(), false, false, EIG_EPS, EIG_MAX_ITER) {
        Some(svd) => svd.singular_values.max(),
        None => a.norm(),
    }
}

/// Spectral radius; |trace| / n stands in if the Schur iteration does not converge.
pub fn spectral_radius(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    if a.nrows() == 1 {
        return a[(0, 0)].abs();
    }
    match nalgebra::linalg::Schur::try_new(a.clone(), EIG_EPS, EIG_MAX_ITER) {
        Some(schur) => schur.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max),
        None => a.trace().abs() / a.nrows() as f64,
    }
}

pub fn jsr_bounds(mats: &[DMatrix<f64>], depth: usize) -> Result<JsrEstimate> {
    jsr_bounds_with_floor(mats, depth, 0.0)
}

struct Node {
    prod: DMatrix<f64>,
    bound: f64,
}

/// Bounds where branches whose running bound drops to `floor` are cut early.
/// The upper value is then only certified up to `max(floor, upper)`, which is
/// what a maximum over several blocks needs.
pub fn jsr_bounds_with_floor(mats: &[DMatrix<f64>], depth: usize, floor: f64) -> Result<JsrEstimate> {
    let Some(first) = mats.first() else {
        return Err(Error::Dims("empty matrix set".into()));
    };
    let n = first.nrows();
    if mats.iter().any(|a| a.nrows() != n || a.ncols() != n) {
        return Err(Error::Dims("matrices must be square and of equal size".into()));
    }
    if depth == 0 {
        return Err(Error::Param("depth must be at least 1".into()));
    }
    if n == 0 {
        return Ok(JsrEstimate { lower: 0.0, upper: 0.0, depth });
    }

    let mut lower = mats.iter().map(spectral_radius).fold(0.0, f64::max);
    let mut level: Vec<Node> = mats
        .iter()
        .map(|a| Node { prod: a.clone(), bound: spectral_norm(a) })
        .collect();
    let mut upper = level.iter().map(|x| x.bound).fold(lower, f64::max);
    let mut reached = 1;

    for k in 2..=depth {
        let cut = lower.max(floor);
        level.retain(|x| x.bound > cut * (1.0 + 1e-12));
        if level.is_empty() || level.len() * mats.len() > MAX_LEVEL_NODES {
            break;
        }
        let inv = 1.0 / k as f64;
        let next: Vec<(Node, f64)> = level
            .par_iter()
            .flat_map_iter(|node| {
                mats.iter().map(move |a| {
                    let prod = a * &node.prod;
                    let bound = node.bound.min(spectral_norm(&prod).powf(inv));
                    let rho = spectral_radius(&prod).powf(inv);
                    (Node { prod, bound }, rho)
                })
            })
            .collect();
        lower = next.iter().map(|x| x.1).fold(lower, f64::max);
        level = next.into_iter().map(|x| x.0).collect();
        let cut = lower.max(floor);
        let top = level.iter().map(|x| x.bound).fold(cut, f64::max);
        upper = upper.min(top).max(lower);
        reached = k;
    }
    Ok(JsrEstimate { lower, upper: upper.max(lower), depth: reached })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_scalar() {
        let e = jsr_bounds(&[DMatrix::from_element(1, 1, 0.5)], 1).unwrap();
        assert!((e.lower - 0.5).abs() < 1e-12 && (e.upper - 0.5).abs() < 1e-12);
    }

    #[test]
    fn commuting_diagonal_pair_is_exact() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.5, 0.25]));
        let b = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.1, 0.4]));
        let e = jsr_bounds(&[a, b], 6).unwrap();
        assert!((e.lower - 0.5).abs() < 1e-12);
        assert!((e.upper - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_mismatched_sizes() {
        let a = DMatrix::zeros(2, 2);
        let b = DMatrix::zeros(3, 3);
        assert!(jsr_bounds(&[a, b], 2).is_err());
    }
}
