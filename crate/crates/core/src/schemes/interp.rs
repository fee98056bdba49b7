use crate::error::Result;
use crate::mask::{Dilation, Family, Mask};
use crate::poly::LaurentPoly;

use super::dd_symbol;

/// Anisotropic interpolatory symbol a_{M,n} for M = diag(2, m).
pub fn aniso_interp_symbol(m: i64, n: u32) -> Result<Mask> {
    let dil = Dilation::aniso(m)?;
    if n < 1 {
        return Err(crate::error::Error::Param("n must be >= 1".into()));
    }
    let a2 = |k: u32| -> Result<LaurentPoly> { dd_symbol(2, k)?.symbol.lift(0) };
    let am = |k: u32| -> Result<LaurentPoly> { dd_symbol(m, k)?.symbol.lift(1) };
    let mut p = LaurentPoly::zero(2);
    for k in 0..n {
        p = p.add(&a2(n - k)?.mul(&am(k + 1)?)?)?;
    }
    for k in 0..n.saturating_sub(1) {
        p = p.sub(&a2(n - k - 1)?.mul(&am(k + 1)?)?)?;
    }
    Ok(Mask::new(p, dil, Family::AnisoInterp { n }))
}
