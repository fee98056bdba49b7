//! Algebraic properties of subdivision symbols: interpolation, polynomial
//! generation and reproduction, sum rules, and the subdivision operator.

use std::collections::BTreeMap;

use num::{One, Zero};
use serde::Serialize;

use crate::cyclo::{self, CycloValue, Root};
use crate::error::{Error, Result};
use crate::mask::Mask;
use crate::poly::Exp;
use crate::rational::{self, int, Rational};

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SchemeReport {
    pub family: String,
    pub dilation: String,
    pub is_interpolatory: bool,
    pub generation_degree: i64,
    pub reproduction_degree: Option<i64>,
    pub support_box: Option<(Exp, Exp)>,
    pub symmetric: bool,
    pub nonzeros: usize,
    pub coefficient_sum: String,
}

pub fn report(mask: &Mask) -> SchemeReport {
    SchemeReport {
        family: mask.family.to_string(),
        dilation: mask.dilation.to_string(),
        is_interpolatory: check_interpolatory(mask),
        generation_degree: generation_degree(mask),
        reproduction_degree: reproduction_degree(mask).ok(),
        support_box: mask.symbol.support_box(),
        symmetric: mask.is_symmetric(),
        nonzeros: mask.symbol.len(),
        coefficient_sum: rational::render(&mask.symbol.value_at_one()),
    }
}

fn dil(mask: &Mask, i: usize) -> i64 {
    mask.dilation.get(i)
}

fn in_lattice(mask: &Mask, e: &Exp) -> bool {
    (0..mask.arity()).all(|i| e[i].rem_euclid(dil(mask, i)) == 0)
}

/// p(0) = 1 and p(M a) = 0 for every a != 0.
pub fn check_interpolatory(mask: &Mask) -> bool {
    if mask.coeff([0, 0]) != Rational::one() {
        return false;
    }
    mask.symbol.terms().all(|(e, _)| *e == [0, 0] || !in_lattice(mask, e))
}

/// Points of E_M, with the all-ones point first.
pub fn e_m_points(mask: &Mask) -> Vec<Vec<Root>> {
    let m1 = dil(mask, 0) as u64;
    if mask.arity() == 1 {
        return (0..m1 as i64).map(|k| vec![Root::new(k, m1)]).collect();
    }
    let m2 = dil(mask, 1) as u64;
    mask.dilation
        .gamma()
        .into_iter()
        .map(|g| vec![Root::new(g[0], m1), Root::new(g[1], m2)])
        .collect()
}

/// Checks sum_{xi in E_M} p(xi . z) = |det M| as a polynomial identity,
/// one monomial at a time.
pub fn e_m_sum_criterion(mask: &Mask) -> bool {
    let pts = e_m_points(mask);
    let det = CycloValue::from_rational(int(mask.det()));
    let mut constant_ok = false;
    for (e, c) in mask.symbol.terms() {
        let mono = crate::poly::LaurentPoly::monomial(mask.arity(), *e, c.clone());
        let total = pts.iter().fold(CycloValue::from_rational(Rational::zero()), |acc, pt| {
            acc.add(&cyclo::eval(&mono, pt))
        });
        if *e == [0, 0] {
            if total.add(&CycloValue::from_rational(-det.as_rational().unwrap())).is_zero() {
                constant_ok = true;
            } else {
                return false;
            }
        } else if !total.is_zero() {
            return false;
        }
    }
    constant_ok
}

fn multi_indices(arity: usize, total: u32) -> Vec<[u32; 2]> {
    if arity == 1 {
        return vec![[total, 0]];
    }
    (0..=total).map(|a| [total - a, a]).collect()
}

fn degree_cap(mask: &Mask) -> u32 {
    match mask.symbol.support_box() {
        Some((lo, hi)) => ((hi[0] - lo[0]) + (hi[1] - lo[1]) + 2) as u32,
        None => 0,
    }
}

/// Largest n such that all derivatives of order <= n vanish on E_M \ {1};
/// -1 if the symbol itself does not vanish there.
pub fn generation_degree(mask: &Mask) -> i64 {
    let pts: Vec<Vec<Root>> = e_m_points(mask).into_iter().skip(1).collect();
    let cap = degree_cap(mask);
    for n in 0..=cap {
        for mu in multi_indices(mask.arity(), n) {
            let d = mask.symbol.derivative(mu);
            if pts.iter().any(|pt| !cyclo::eval(&d, pt).is_zero()) {
                return n as i64 - 1;
            }
        }
    }
    cap as i64
}

/// Reproduction degree for the parameter shift tau = 0, valid for symmetric
/// or interpolatory masks.
pub fn reproduction_degree(mask: &Mask) -> Result<i64> {
    if !mask.is_symmetric() && !check_interpolatory(mask) {
        return Err(Error::Domain(
            "reproduction degree with tau = 0 needs a symmetric or interpolatory mask".into(),
        ));
    }
    if mask.symbol.value_at_one() != int(mask.det()) {
        return Ok(-1);
    }
    let gen = generation_degree(mask);
    let cap = degree_cap(mask);
    let mut at_one = cap as i64;
    'outer: for n in 1..=cap {
        for mu in multi_indices(mask.arity(), n) {
            if !mask.symbol.derivative(mu).value_at_one().is_zero() {
                at_one = n as i64 - 1;
                break 'outer;
            }
        }
    }
    Ok(gen.min(at_one))
}

/// Sum rules of the given order: every coset carries the same moments for all
/// monomials of total degree < order.
pub fn check_sum_rules(mask: &Mask, order: u32) -> bool {
    let arity = mask.arity();
    let cosets: Vec<Exp> = if arity == 1 {
        (0..dil(mask, 0)).map(|k| [k, 0]).collect()
    } else {
        mask.dilation.gamma()
    };
    let coset_of = |e: &Exp| -> Exp {
        if arity == 1 {
            [e[0].rem_euclid(dil(mask, 0)), 0]
        } else {
            [e[0].rem_euclid(dil(mask, 0)), e[1].rem_euclid(dil(mask, 1))]
        }
    };
    for deg in 0..order {
        for mu in multi_indices(arity, deg) {
            let mut moments: BTreeMap<Exp, Rational> = cosets.iter().map(|g| (*g, Rational::zero())).collect();
            for (e, c) in mask.symbol.terms() {
                let v = rational::pow(&int(e[0]), mu[0]) * rational::pow(&int(e[1]), mu[1]) * c;
                *moments.get_mut(&coset_of(e)).unwrap() += v;
            }
            let first = moments.values().next().unwrap().clone();
            if moments.values().any(|v| *v != first) {
                return false;
            }
        }
    }
    true
}

/// One or more subdivision steps: (S c)(a) = sum_b p(a - M b) c(b).
pub fn subdivide(mask: &Mask, data: &BTreeMap<Exp, Rational>, steps: u32) -> BTreeMap<Exp, Rational> {
    let m = [dil(mask, 0), if mask.arity() == 1 { 1 } else { dil(mask, 1) }];
    let mut cur = data.clone();
    for _ in 0..steps {
        let mut next: BTreeMap<Exp, Rational> = BTreeMap::new();
        for (b, cb) in &cur {
            if cb.is_zero() {
                continue;
            }
            for (e, pe) in mask.symbol.terms() {
                let a = [e[0] + m[0] * b[0], e[1] + m[1] * b[1]];
                *next.entry(a).or_insert_with(Rational::zero) += pe * cb;
            }
        }
        next.retain(|_, v| !v.is_zero());
        cur = next;
    }
    cur
}

/// Refined indices whose every contributing coarse index lies in the box [lo, hi].
pub fn interior_points(mask: &Mask, lo: Exp, hi: Exp) -> Vec<Exp> {
    let m = [dil(mask, 0), if mask.arity() == 1 { 1 } else { dil(mask, 1) }];
    let Some((slo, shi)) = mask.symbol.support_box() else { return Vec::new() };
    let mut out = Vec::new();
    for a0 in (m[0] * lo[0] + slo[0])..=(m[0] * hi[0] + shi[0]) {
        for a1 in (m[1] * lo[1] + slo[1])..=(m[1] * hi[1] + shi[1]) {
            let ok = mask.symbol.terms().all(|(e, _)| {
                let (d0, d1) = (a0 - e[0], a1 - e[1]);
                if d0.rem_euclid(m[0]) != 0 || d1.rem_euclid(m[1]) != 0 {
                    return true;
                }
                let b = [d0 / m[0], d1 / m[1]];
                (lo[0]..=hi[0]).contains(&b[0]) && (lo[1]..=hi[1]).contains(&b[1])
            });
            if ok {
                out.push([a0, a1]);
            }
        }
    }
    out
}
