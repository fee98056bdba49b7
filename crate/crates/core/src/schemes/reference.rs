//! Standard isotropic reference stencils for dilation diag(2,2).

use crate::mask::{Dilation, Family, Mask};
use crate::poly::LaurentPoly;
use crate::rational::frac;

fn tensor(w: &[i64], den: i64, name: &str) -> Mask {
    let r = (w.len() / 2) as i64;
    let mut p = LaurentPoly::zero(2);
    for (i, a) in w.iter().enumerate() {
        for (j, b) in w.iter().enumerate() {
            p.add_term([i as i64 - r, j as i64 - r], frac(a * b, den));
        }
    }
    Mask::new(p, Dilation { m1: 2, m2: 2 }, Family::External(name.into()))
}

/// Bilinear interpolation, (1/4) [1 2 1] x [1 2 1].
pub fn p1() -> Mask {
    tensor(&[1, 2, 1], 4, "P1")
}

/// Bicubic B-spline, (1/64) [1 4 6 4 1] x [1 4 6 4 1].
pub fn p2() -> Mask {
    tensor(&[1, 4, 6, 4, 1], 64, "P2")
}

/// Tensor-product four-point scheme, (1/256) [-1 0 9 16 9 0 -1] x [-1 0 9 16 9 0 -1].
pub fn kobbelt() -> Mask {
    tensor(&[-1, 0, 9, 16, 9, 0, -1], 256, "K")
}
