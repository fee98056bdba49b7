//! Dilation matrices and subdivision masks.

use std::fmt;

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Exp, LaurentPoly};
use crate::rational::{self, Rational};

/// diag(m1, m2). Univariate masks use `m1` only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dilation {
    pub m1: i64,
    pub m2: i64,
}

impl Dilation {
    pub fn new(m1: i64, m2: i64) -> Result<Self> {
        if m1 < 2 || m2 < 2 {
            return Err(Error::Param(format!("dilation entries must be >= 2, got diag({m1},{m2})")));
        }
        Ok(Self { m1, m2 })
    }

    pub fn univariate(m: i64) -> Result<Self> {
        Self::new(m, m)
    }

    /// diag(2, m) with m odd, as required by the anisotropic constructors.
    pub fn aniso(m: i64) -> Result<Self> {
        if m < 3 || m % 2 == 0 {
            return Err(Error::Param(format!("anisotropic dilation needs odd m >= 3, got {m}")));
        }
        Self::new(2, m)
    }

    pub fn det(&self) -> i64 {
        self.m1 * self.m2
    }

    pub fn get(&self, i: usize) -> i64 {
        if i == 0 { self.m1 } else { self.m2 }
    }

    /// Coset representatives {0..m1-1} x {0..m2-1}, first coordinate slowest.
    pub fn gamma(&self) -> Vec<Exp> {
        let mut v = Vec::with_capacity(self.det() as usize);
        for k in 0..self.m1 {
            for j in 0..self.m2 {
                v.push([k, j]);
            }
        }
        v
    }
}

impl fmt::Display for Dilation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "diag({},{})", self.m1, self.m2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Dd { m: i64, n: u32 },
    AnisoInterp { n: u32 },
    MinimalInterp { n: u32 },
    BoxSpline { n: u32 },
    Approx { n: u32, ell: u32 },
    External(String),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Dd { m, n } => write!(f, "a_{{{m},{n}}}"),
            Family::AnisoInterp { n } => write!(f, "a_{{M,{n}}}"),
            Family::MinimalInterp { n } => write!(f, "c_{{M,{n}}}"),
            Family::BoxSpline { n } => write!(f, "B_{n}"),
            Family::Approx { n, ell } => write!(f, "B_{{{n},{ell}}}"),
            Family::External(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mask {
    pub symbol: LaurentPoly,
    pub dilation: Dilation,
    pub family: Family,
}

impl Mask {
    pub fn new(symbol: LaurentPoly, dilation: Dilation, family: Family) -> Self {
        Self { symbol, dilation, family }
    }

    pub fn arity(&self) -> usize {
        self.symbol.arity()
    }

    pub fn coeff(&self, e: Exp) -> Rational {
        self.symbol.coeff(e)
    }

    /// |det M| for bivariate masks, m for univariate ones.
    pub fn det(&self) -> i64 {
        if self.arity() == 1 { self.dilation.m1 } else { self.dilation.det() }
    }

    /// p(a1, a2) = p(+-a1, +-a2).
    pub fn is_symmetric(&self) -> bool {
        let s = &self.symbol;
        if s.arity() == 1 {
            return s.reflect([true, false]) == *s;
        }
        s.reflect([true, false]) == *s && s.reflect([false, true]) == *s
    }

    /// Dense matrix view: rows follow the first exponent, columns the second,
    /// both ascending over the support box.
    pub fn to_matrix(&self) -> Vec<Vec<Rational>> {
        let Some((lo, hi)) = self.symbol.support_box() else {
            return vec![vec![Rational::zero()]];
        };
        (lo[0]..=hi[0])
            .map(|a| (lo[1]..=hi[1]).map(|b| self.symbol.coeff([a, b])).collect())
            .collect()
    }

    /// Matrix view over the symmetric box [-r1, r1] x [-r2, r2] centered at the origin.
    pub fn to_centered_matrix(&self) -> Vec<Vec<Rational>> {
        let Some((lo, hi)) = self.symbol.support_box() else {
            return vec![vec![Rational::zero()]];
        };
        let r1 = lo[0].abs().max(hi[0].abs());
        let r2 = lo[1].abs().max(hi[1].abs());
        (-r1..=r1).map(|a| (-r2..=r2).map(|b| self.symbol.coeff([a, b])).collect()).collect()
    }

    pub fn to_csv(&self) -> String {
        self.to_centered_matrix()
            .iter()
            .map(|row| row.iter().map(rational::render).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Builds a bivariate mask from a centered matrix (rows = first exponent).
    pub fn from_centered_matrix(rows: &[Vec<Rational>], dilation: Dilation, family: Family) -> Result<Self> {
        let h = rows.len() as i64;
        let w = rows.first().map(|r| r.len()).unwrap_or(0) as i64;
        if h % 2 == 0 || w % 2 == 0 || rows.iter().any(|r| r.len() as i64 != w) {
            return Err(Error::Dims(format!("centered matrix must be odd-sized and rectangular, got {h}x{w}")));
        }
        let mut p = LaurentPoly::zero(2);
        for (i, row) in rows.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                p.add_term([i as i64 - h / 2, j as i64 - w / 2], c.clone());
            }
        }
        Ok(Self::new(p, dilation, family))
    }
}

/// Exact-rational JSON form of a mask, as read by `--mask-file`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskFile {
    pub family: String,
    pub dilation: [i64; 2],
    pub terms: Vec<crate::poly::Term>,
}

impl MaskFile {
    pub fn from_mask(mask: &Mask) -> Self {
        Self {
            family: mask.family.to_string(),
            dilation: [mask.dilation.m1, mask.dilation.m2],
            terms: mask.symbol.to_json_terms(),
        }
    }

    pub fn into_mask(self) -> Result<Mask> {
        let dilation = Dilation::new(self.dilation[0], self.dilation[1])?;
        let symbol = LaurentPoly::from_json_terms(&self.terms)?;
        Ok(Mask::new(symbol, dilation, Family::External(self.family)))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
