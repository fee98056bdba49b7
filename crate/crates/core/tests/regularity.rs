mod common;

use std::collections::BTreeSet;

use anisomg::linalg::{self, QMat};
use anisomg::poly::LaurentPoly;
use anisomg::rational::{int, Rational};
use anisomg::regularity::*;
use anisomg::schemes::aniso_interp_symbol;
use anisomg::{Dilation, Family, Mask};
use common::scaled;
use rand::{Rng, SeedableRng};

fn sixth(rows: &[&[i64]]) -> QMat {
    scaled(1, 6, rows)
}

fn setup(m: i64, n: u32) -> (Mask, TransitionSet) {
    let mask = aniso_interp_symbol(m, n).unwrap();
    let omega = compute_omega(&mask).unwrap();
    let ts = transition_matrices(&mask, &omega).unwrap();
    (mask, ts)
}

fn dirac() -> Mask {
    Mask::new(LaurentPoly::one(2), Dilation::new(2, 3).unwrap(), Family::External("dirac".into()))
}

#[test]
fn omega_of_first_scheme() {
    let (_, ts) = setup(3, 1);
    assert_eq!(ts.omega, vec![[-1, -1], [-1, 0], [0, -1], [0, 0]]);
}

#[test]
fn omega_of_dirac_is_origin() {
    assert_eq!(compute_omega(&dirac()).unwrap(), vec![[0, 0]]);
}

#[test]
fn dirac_transition_and_subspaces() {
    let mask = dirac();
    let ts = transition_matrices(&mask, &compute_omega(&mask).unwrap()).unwrap();
    for (g, t) in ts.gamma.iter().zip(&ts.matrices) {
        let want = if *g == [0, 0] { int(1) } else { int(0) };
        assert_eq!(t, &vec![vec![want]]);
    }
    assert_eq!(invariant_subspaces(&ts).unwrap().u.len(), 0);
}

#[test]
fn transition_matrices_of_first_scheme() {
    let (_, ts) = setup(3, 1);
    let want = [
        ([0, 0], sixth(&[&[1, 0, 0, 0], &[2, 3, 0, 0], &[1, 0, 2, 0], &[2, 3, 4, 6]])),
        ([0, 1], sixth(&[&[2, 1, 0, 0], &[1, 2, 0, 0], &[2, 1, 4, 2], &[1, 2, 2, 4]])),
        ([0, 2], sixth(&[&[3, 2, 0, 0], &[0, 1, 0, 0], &[3, 2, 6, 4], &[0, 1, 0, 2]])),
        ([1, 0], sixth(&[&[2, 0, 1, 0], &[4, 6, 2, 3], &[0, 0, 1, 0], &[0, 0, 2, 3]])),
        ([1, 1], sixth(&[&[4, 2, 2, 1], &[2, 4, 1, 2], &[0, 0, 2, 1], &[0, 0, 1, 2]])),
        ([1, 2], sixth(&[&[6, 4, 3, 2], &[0, 2, 0, 1], &[0, 0, 3, 2], &[0, 0, 0, 1]])),
    ];
    for (g, t) in want {
        assert_eq!(ts.matrix(g).unwrap(), &t, "gamma {g:?}");
    }
}

#[test]
fn subspaces_of_first_scheme() {
    let (_, ts) = setup(3, 1);
    let sub = invariant_subspaces(&ts).unwrap();
    assert_eq!(sub.dims(), (3, 2, 2));
    let v = |x: [i64; 4]| x.iter().map(|&a| int(a)).collect::<Vec<Rational>>();
    let same = |a: &[Vec<Rational>], b: &[Vec<Rational>]| {
        let sa = linalg::Span::from_vectors(a.iter());
        a.len() == b.len() && b.iter().all(|x| sa.contains(x))
    };
    assert!(same(&sub.u, &[v([1, 0, 0, -1]), v([0, 1, 0, -1]), v([0, 0, 1, -1])]));
    assert!(same(&sub.u1, &[v([1, 0, -1, 0]), v([0, 1, 0, -1])]));
    assert!(same(&sub.u2, &[v([1, -1, 0, 0]), v([0, 0, 1, -1])]));
}

#[test]
fn restriction_with_the_printed_basis_change() {
    let (_, ts) = setup(3, 1);
    let s: QMat = [[1, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0], [-1, -1, -1, 0]]
        .iter()
        .map(|r| r.iter().map(|&x| int(x)).collect())
        .collect();
    let got = restrict_with_s(&ts, &s, 3).unwrap();
    let want = [
        sixth(&[&[1, 0, 0], &[2, 3, 0], &[1, 0, 2]]),
        sixth(&[&[2, 1, 0], &[1, 2, 0], &[0, -1, 2]]),
        sixth(&[&[3, 2, 0], &[0, 1, 0], &[-1, -2, 2]]),
        sixth(&[&[2, 0, 1], &[1, 3, -1], &[0, 0, 1]]),
        sixth(&[&[3, 1, 1], &[0, 2, -1], &[-1, -1, 1]]),
        sixth(&[&[4, 2, 1], &[-1, 1, -1], &[-2, -2, 1]]),
    ];
    assert_eq!(got, want);
}

#[test]
fn restrictions_to_directional_subspaces() {
    let (_, ts) = setup(3, 1);
    let v = |x: [i64; 4]| x.iter().map(|&a| int(a)).collect::<Vec<Rational>>();
    let v1: BTreeSet<QMat> = restrict(&ts, &[v([1, 0, -1, 0]), v([0, 1, 0, -1])]).unwrap().into_iter().collect();
    let want1: BTreeSet<QMat> = [
        sixth(&[&[1, 0], &[2, 3]]),
        sixth(&[&[2, 1], &[1, 2]]),
        sixth(&[&[3, 2], &[0, 1]]),
    ]
    .into_iter()
    .collect();
    assert_eq!(v1, want1);
    let v2: BTreeSet<QMat> = restrict(&ts, &[v([1, -1, 0, 0]), v([0, 0, 1, -1])]).unwrap().into_iter().collect();
    let want2: BTreeSet<QMat> = [sixth(&[&[1, 0], &[1, 2]]), sixth(&[&[2, 1], &[0, 1]])].into_iter().collect();
    assert_eq!(v2, want2);
}

#[test]
fn second_scheme_subspaces_are_invariant() {
    for m in [3, 5] {
        let (_, ts) = setup(m, 2);
        let sub = invariant_subspaces(&ts).unwrap();
        for b in [&sub.u, &sub.u1, &sub.u2] {
            assert!(is_invariant(&ts, b));
        }
        let u = linalg::Span::from_vectors(sub.u.iter());
        assert!(sub.u1.iter().chain(&sub.u2).all(|x| u.contains(x)));
    }
    let (_, ts) = setup(3, 2);
    assert_eq!(invariant_subspaces(&ts).unwrap().dims(), (31, 26, 26));
}

/// Random points of the attractor sum_j M^-j a_j lie in the closed cells of
/// omega, and every cell of omega has sample points in its interior.
#[test]
fn omega_covers_sampled_attractor() {
    for n in [1, 2] {
        let (mask, ts) = setup(3, n);
        let supp: Vec<[i64; 2]> = mask.symbol.terms().map(|(e, _)| *e).collect();
        let mut rng = rand::rngs::StdRng::seed_from_u64(7 + n as u64);
        let cells: BTreeSet<[i64; 2]> = ts.omega.iter().copied().collect();
        let mut hit: BTreeSet<[i64; 2]> = BTreeSet::new();
        let tail = [1.0 / 2f64.powi(30), 1.0 / 3f64.powi(30)];
        for _ in 0..200_000 {
            let mut x = [0.0f64; 2];
            let mut s = [1.0f64; 2];
            for _ in 0..30 {
                let a = supp[rng.gen_range(0..supp.len())];
                s = [s[0] / 2.0, s[1] / 3.0];
                x = [x[0] + s[0] * a[0] as f64, x[1] + s[1] * a[1] as f64];
            }
            let covered = (0..4).any(|c| {
                let w = [x[0].floor() as i64 - (c & 1) as i64, x[1].floor() as i64 - (c >> 1) as i64];
                cells.contains(&w)
                    && (0..2).all(|i| x[i] >= w[i] as f64 - 4.0 * tail[i] && x[i] <= (w[i] + 1) as f64 + 4.0 * tail[i])
            });
            assert!(covered, "sample {x:?} outside omega");
            let w = [x[0].floor() as i64, x[1].floor() as i64];
            if (0..2).all(|i| x[i] - w[i] as f64 > 1e-6 && (w[i] + 1) as f64 - x[i] > 1e-6) {
                hit.insert(w);
            }
        }
        assert_eq!(hit, cells, "n = {n}");
    }
}

#[test]
fn column_sums_are_one() {
    for (m, n) in [(3, 1), (3, 2), (5, 1), (5, 2)] {
        let (_, ts) = setup(m, n);
        for (_, sums) in column_sums(&ts) {
            assert!(sums.iter().all(|s| *s == int(1)));
        }
    }
}

#[test]
fn holder_first_schemes() {
    for (m, rho2) in [(3, 1.0 / 3.0), (5, 0.2)] {
        let mask = aniso_interp_symbol(m, 1).unwrap();
        let r = holder_exponent(&mask, 8).unwrap();
        for (b, want) in [(r.rho, 0.5), (r.rho1, 0.5), (r.rho2, rho2)] {
            assert!(b.lower >= want - 1e-3 && b.upper <= want + 1e-3, "{b:?} vs {want}");
        }
        assert_eq!(r.continuous, Some(true));
        assert!(r.alpha.lower <= 1.0 + 1e-9 && r.alpha.upper >= 1.0 - 1e-9);
        assert!(r.alpha.upper - r.alpha.lower <= 0.02);
    }
}

#[test]
fn holder_second_schemes() {
    for (m, rho2) in [(3, (0.325, 0.345)), (5, (0.19, 0.21))] {
        let mask = aniso_interp_symbol(m, 2).unwrap();
        let r = holder_exponent(&mask, 8).unwrap();
        for (b, (lo, hi)) in [(r.rho, (0.49, 0.51)), (r.rho1, (0.49, 0.51)), (r.rho2, rho2)] {
            assert!(b.lower >= lo && b.upper <= hi, "m = {m}: {b:?} outside [{lo}, {hi}]");
        }
        assert_eq!(r.continuous, Some(true));
    }
}

#[test]
fn jsr_bounds_monotone_in_depth() {
    let (_, ts) = setup(3, 1);
    let sub = invariant_subspaces(&ts).unwrap();
    let mats: Vec<nalgebra::DMatrix<f64>> = restrict(&ts, &sub.u)
        .unwrap()
        .iter()
        .map(|a| nalgebra::DMatrix::from_fn(3, 3, |i, j| anisomg::rational::to_f64(&a[i][j])))
        .collect();
    let mut prev = jsr_bounds(&mats, 1).unwrap();
    for d in 2..=6 {
        let e = jsr_bounds(&mats, d).unwrap();
        assert!(e.lower >= prev.lower - 1e-12 && e.upper <= prev.upper + 1e-12);
        assert!(e.lower <= e.upper);
        prev = e;
    }
    assert!(prev.lower <= 0.5 + 1e-9 && prev.upper >= 0.5 - 1e-9);
}

fn same_span(a: &[linalg::QVec], b: &[linalg::QVec]) -> bool {
    let sa = linalg::Span::from_vectors(a.iter());
    let sb = linalg::Span::from_vectors(b.iter());
    sa.dim() == sb.dim() && a.iter().all(|v| sb.contains(v)) && b.iter().all(|v| sa.contains(v))
}

#[test]
fn modular_closure_agrees_with_exact_closure() {
    let masks = [
        aniso_interp_symbol(3, 2).unwrap(),
        aniso_interp_symbol(5, 1).unwrap(),
        anisomg::schemes::box_spline_symbol(2).unwrap(),
        anisomg::schemes::approx_symbol(2, 1).unwrap(),
    ];
    for mask in &masks {
        let omega = compute_omega(mask).unwrap();
        let ts = transition_matrices(mask, &omega).unwrap();
        let v0 = fixed_vector(&ts).unwrap();
        assert_eq!(linalg::matvec(ts.matrix([0, 0]).unwrap(), &v0), v0);
        let n = ts.dim();
        let mut seeds = vec![v0.clone()];
        let mut e = linalg::zeros(n);
        e[0] = int(1);
        e[1] = int(-1);
        seeds.push(e);
        assert!(same_span(&closure(&ts, &seeds), &closure_exact(&ts, &seeds)));
        let sub = invariant_subspaces(&ts).unwrap();
        for b in [&sub.u, &sub.u1, &sub.u2] {
            assert!(is_invariant(&ts, b) && is_invariant_exact(&ts, b));
        }
    }
}

#[test]
fn non_invariant_subspace_is_rejected() {
    let (_, ts) = setup(3, 2);
    let n = ts.dim();
    let mut e = linalg::zeros(n);
    e[0] = int(1);
    let line = vec![e];
    assert!(!is_invariant(&ts, &line));
    assert!(!is_invariant_exact(&ts, &line));
    let sub = invariant_subspaces(&ts).unwrap();
    let half = sub.u1[..sub.u1.len() / 2].to_vec();
    assert_eq!(is_invariant(&ts, &half), is_invariant_exact(&ts, &half));
}
