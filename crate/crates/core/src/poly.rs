//! Sparse Laurent polynomials in one or two variables over exact rationals.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, int, Rational};

/// Exponent vector. Univariate polynomials keep the second slot at zero.
pub type Exp = [i64; 2];

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    arity: usize,
    terms: BTreeMap<Exp, Rational>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Term {
    pub exp: Vec<i64>,
    pub num: String,
    pub den: String,
}

impl LaurentPoly {
    pub fn zero(arity: usize) -> Self {
        assert!(arity == 1 || arity == 2, "arity must be 1 or 2");
        Self { arity, terms: BTreeMap::new() }
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, Rational::one())
    }

    pub fn constant(arity: usize, c: Rational) -> Self {
        let mut p = Self::zero(arity);
        p.add_term([0, 0], c);
        p
    }

    pub fn monomial(arity: usize, exp: Exp, c: Rational) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(exp, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Exp, Rational)>>(arity: usize, it: I) -> Self {
        let mut p = Self::zero(arity);
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    /// Univariate polynomial from `(exponent, coefficient)` pairs.
    pub fn univariate<I: IntoIterator<Item = (i64, Rational)>>(it: I) -> Self {
        Self::from_terms(1, it.into_iter().map(|(e, c)| ([e, 0], c)))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: Exp) -> Rational {
        self.terms.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeff_ref(&self, e: &Exp) -> Option<&Rational> {
        self.terms.get(e)
    }

    pub fn add_term(&mut self, e: Exp, c: Rational) {
        if self.arity == 1 {
            assert_eq!(e[1], 0, "univariate exponent with nonzero second slot");
        }
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero(self.arity);
        }
        Self { arity: self.arity, terms: self.terms.iter().map(|(e, c)| (*e, c * s)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = Self::zero(self.arity);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term([e1[0] + e2[0], e1[1] + e2[1]], c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.arity);
        for _ in 0..k {
            acc = acc.mul(self).expect("same arity");
        }
        acc
    }

    /// Lifts a univariate polynomial into variable `var` (0 or 1) of a bivariate one.
    pub fn lift(&self, var: usize) -> Result<Self> {
        if self.arity != 1 {
            return Err(Error::Arity(self.arity, 1));
        }
        let terms = self.terms.iter().map(|(e, c)| {
            let exp = if var == 0 { [e[0], 0] } else { [0, e[0]] };
            (exp, c.clone())
        });
        Ok(Self::from_terms(2, terms))
    }

    /// Formal partial derivative D^mu with respect to the complex variables.
    pub fn derivative(&self, mu: [u32; 2]) -> Self {
        let mut out = Self::zero(self.arity);
        for (e, c) in &self.terms {
            let f = falling(e[0], mu[0]) * falling(e[1], mu[1]);
            if f != 0 {
                out.add_term([e[0] - mu[0] as i64, e[1] - mu[1] as i64], c * int(f));
            }
        }
        out
    }

    /// Sum of all coefficients, i.e. the value at (1, 1).
    pub fn value_at_one(&self) -> Rational {
        self.terms.values().fold(Rational::zero(), |a, c| a + c)
    }

    /// Componentwise min and max exponents. `None` for the zero polynomial.
    pub fn support_box(&self) -> Option<(Exp, Exp)> {
        let mut it = self.terms.keys();
        let first = *it.next()?;
        let (mut lo, mut hi) = (first, first);
        for e in it {
            for i in 0..2 {
                lo[i] = lo[i].min(e[i]);
                hi[i] = hi[i].max(e[i]);
            }
        }
        Some((lo, hi))
    }

    pub fn reflect(&self, flip: [bool; 2]) -> Self {
        let s = |b: bool| if b { -1 } else { 1 };
        Self::from_terms(
            self.arity,
            self.terms.iter().map(|(e, c)| ([s(flip[0]) * e[0], s(flip[1]) * e[1]], c.clone())),
        )
    }

    pub fn to_f64_terms(&self) -> Vec<(Exp, f64)> {
        self.terms.iter().map(|(e, c)| (*e, rational::to_f64(c))).collect()
    }

    pub fn to_json_terms(&self) -> Vec<Term> {
        self.terms
            .iter()
            .map(|(e, c)| Term {
                exp: e[..self.arity].to_vec(),
                num: c.numer().to_string(),
                den: c.denom().to_string(),
            })
            .collect()
    }

    pub fn from_json_terms(terms: &[Term]) -> Result<Self> {
        let arity = terms.first().map(|t| t.exp.len()).unwrap_or(2);
        if arity != 1 && arity != 2 {
            return Err(Error::Parse(format!("exponent length {arity}")));
        }
        let mut p = Self::zero(arity);
        for t in terms {
            if t.exp.len() != arity {
                return Err(Error::Arity(arity, t.exp.len()));
            }
            let e = if arity == 1 { [t.exp[0], 0] } else { [t.exp[0], t.exp[1]] };
            p.add_term(e, rational::from_parts(&t.num, &t.den)?);
        }
        Ok(p)
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::Arity(self.arity, other.arity));
        }
        Ok(())
    }
}

/// a (a-1) ... (a-k+1)
fn falling(a: i64, k: u32) -> i64 {
    (0..k as i64).map(|i| a - i).product()
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", rational::render(c))?;
            for (i, &k) in e[..self.arity].iter().enumerate() {
                if k != 0 {
                    write!(f, " * z{}^{}", i + 1, k)?;
                }
            }
        }
        Ok(())
    }
}
