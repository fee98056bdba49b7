#![allow(dead_code)]

pub mod dense;

use std::collections::BTreeMap;

use anisomg::linalg::QMat;
use anisomg::{Dilation, Family, Mask};
use anisomg::rational::{frac, parse, Rational};

pub fn q(s: &str) -> Rational {
    parse(s).unwrap()
}

/// `scale` times an integer matrix.
pub fn scaled(num: i64, den: i64, rows: &[&[i64]]) -> QMat {
    rows.iter().map(|r| r.iter().map(|&x| frac(x * num, den)).collect()).collect()
}

/// Printed mask matrices keyed by family and parameters, e.g. interp_m3_n2, approx_n3_l1.
pub fn fixtures() -> BTreeMap<String, Vec<Vec<String>>> {
    serde_json::from_str(include_str!("../fixtures/masks.json")).unwrap()
}

pub fn fixture_mask(name: &str, m: i64) -> Mask {
    let rows = &fixtures()[name];
    let rows: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|c| q(c)).collect()).collect();
    Mask::from_centered_matrix(&rows, Dilation::aniso(m).unwrap(), Family::External(name.into())).unwrap()
}
