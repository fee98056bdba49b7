//! Constructors for the mask families.

mod approx;
mod dd;
mod interp;
mod minimal;
mod reference;

pub use approx::{approx_symbol, box_spline_symbol, delta1, delta2, direction_factors};
pub use dd::{dd_symbol, lagrange_coefficient};
pub use interp::aniso_interp_symbol;
pub use minimal::minimal_interp_mask;
pub use reference::{kobbelt, p1, p2};

use crate::mask::Mask;

/// Lattice-diamond bound m|a1| + 2|a2| <= 2mn - 2 + m for diag(2,m) interpolatory masks.
pub fn in_diamond(m: i64, n: u32, a: [i64; 2]) -> bool {
    m * a[0].abs() + 2 * a[1].abs() <= 2 * m * n as i64 - 2 + m
}

/// Identifies a mask family for command-line and config use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    Dd,
    Interp,
    Minimal,
    Box,
    Approx,
    P1,
    P2,
    Kobbelt,
}

impl std::str::FromStr for FamilyKind {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "dd" => Self::Dd,
            "interp" => Self::Interp,
            "minimal" => Self::Minimal,
            "box" => Self::Box,
            "approx" => Self::Approx,
            "p1" => Self::P1,
            "p2" => Self::P2,
            "k" | "kobbelt" => Self::Kobbelt,
            _ => return Err(crate::error::Error::Param(format!("unknown family {s:?}"))),
        })
    }
}

/// Builds a mask by family name. `m` is the dilation parameter where relevant.
pub fn build(kind: FamilyKind, m: i64, n: u32, ell: u32) -> crate::error::Result<Mask> {
    match kind {
        FamilyKind::Dd => dd_symbol(m, n),
        FamilyKind::Interp => aniso_interp_symbol(m, n),
        FamilyKind::Minimal => minimal_interp_mask(m, n),
        FamilyKind::Box => box_spline_symbol(n),
        FamilyKind::Approx => approx_symbol(n, ell),
        FamilyKind::P1 => Ok(p1()),
        FamilyKind::P2 => Ok(p2()),
        FamilyKind::Kobbelt => Ok(kobbelt()),
    }
}
