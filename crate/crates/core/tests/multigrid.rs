mod common;

use anisomg::experiments::{build_rhs, exact_solution, mixed_schedule, uniform_schedule};
use anisomg::multigrid::*;
use anisomg::schemes::{aniso_interp_symbol, p1};
use approx::assert_relative_eq;
use common::dense::*;
use nalgebra::DVector;

#[test]
fn toeplitz_first_column() {
    let s = Stencil::new([([-1, 0], -1.0), ([0, 0], 2.0), ([1, 0], -1.0)]);
    let x = GridVec::from_values((3, 1), vec![1.0, 0.0, 0.0]).unwrap();
    assert_eq!(toeplitz_apply(&s, &x).unwrap().values, vec![2.0, -1.0, 0.0]);
}

#[test]
fn toeplitz_matches_dense() {
    let mut r = rng();
    let stencils = [lap((4, 4)), Stencil::from_mask(&aniso_interp_symbol(3, 2).unwrap()), Stencil::from_mask(&p1())];
    for s in &stencils {
        for d in [(4, 4), (12, 12), (7, 11), (12, 3)] {
            let x = random_grid(d, &mut r);
            let y = toeplitz_apply(s, &x).unwrap();
            assert!(rel(&vecof(&y), &(dense_toeplitz(s, d) * vecof(&x))) < 1e-12);
        }
    }
}

#[test]
fn laplacian_annihilates_constants_inside() {
    let x = GridVec::from_values((5, 5), vec![1.0; 25]).unwrap();
    let y = toeplitz_apply(&lap((5, 5)), &x).unwrap();
    assert!(y.at(2, 2).abs() < 1e-9);
    let s = laplacian_stencil(1.0, 1.0, 1.0);
    assert_eq!(s.center(), 4.0);
    assert_eq!(s.get([1, 0]), -1.0);
    let h = 0.125;
    assert_relative_eq!(laplacian_stencil(1e-2, h, h).center(), 2.0 * (1.0 + 1e-2) / (h * h), max_relative = 1e-14);
}

#[test]
fn laplacian_symbol_vanishes_to_second_order() {
    let s = lap((7, 7));
    let f = |x: f64, y: f64| s.coeffs().iter().map(|(k, c)| c * (k[0] as f64 * x + k[1] as f64 * y).cos()).sum::<f64>();
    assert!(f(0.0, 0.0).abs() < 1e-9);
    for t in [1e-1, 1e-2] {
        assert!(f(t, 0.0) > 0.0 && f(0.0, t) > 0.0);
        let ratio = f(t, t) / f(t / 2.0, t / 2.0);
        assert!((ratio - 4.0).abs() < 1e-2);
    }
}

#[test]
fn prolongation_matches_dense_and_restriction_is_adjoint() {
    let mut r = rng();
    let cases: Vec<(Stencil, (usize, usize), Dims)> = vec![
        (Stencil::from_mask(&p1()), (2, 2), (15, 15)),
        (Stencil::from_mask(&aniso_interp_symbol(3, 1).unwrap()), (2, 3), (15, 8)),
        (Stencil::from_mask(&aniso_interp_symbol(3, 2).unwrap()), (2, 3), (7, 8)),
        (Stencil::from_mask(&aniso_interp_symbol(5, 1).unwrap()), (2, 5), (15, 14)),
    ];
    for (p, f, fine) in cases {
        let cd = coarse_dims(fine, f).unwrap();
        let pd = dense_p(&p, fine, f);
        let v = random_grid(cd, &mut r);
        let u = random_grid(fine, &mut r);
        let pv = prolongate(&p, &v, f, fine, 0).unwrap();
        assert!(rel(&vecof(&pv), &(&pd * vecof(&v))) < 1e-12);
        let ru = restrict(&p, &u, f, cd, 0).unwrap();
        let scale = (f.0 * f.1) as f64;
        assert!(rel(&(vecof(&ru) * scale), &(pd.transpose() * vecof(&u))) < 1e-12);
        let lhs = ru.dot(&v) * scale;
        let rhs = u.dot(&pv);
        assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }
}

#[test]
fn prolongation_of_a_centered_dirac_copies_the_mask() {
    let p = Stencil::from_mask(&p1());
    let mut c = GridVec::zeros((3, 3));
    c.values[4] = 1.0;
    let f = prolongate(&p, &c, (2, 2), (7, 7), 0).unwrap();
    for a in -1..=1i64 {
        for b in -1..=1i64 {
            assert_eq!(f.at((3 + a) as usize, (3 + b) as usize), p.get([a, b]));
        }
    }
    assert_eq!(f.values.iter().filter(|v| **v != 0.0).count(), 9);
    assert!(prolongate(&p, &GridVec::zeros((3, 3)), (2, 2), (7, 7), 0).unwrap().values.iter().all(|v| *v == 0.0));
}

#[test]
fn prolongation_reproduces_constants_inside() {
    let mask = aniso_interp_symbol(3, 1).unwrap();
    let p = Stencil::from_mask(&mask);
    let fine = (15, 26);
    let cd = coarse_dims(fine, (2, 3)).unwrap();
    let c = GridVec::from_values(cd, vec![1.0; cd.0 * cd.1]).unwrap();
    let f = prolongate(&p, &c, (2, 3), fine, 0).unwrap();
    let r = p.radius();
    for i1 in r[0] as usize + 1..fine.0 - r[0] as usize - 1 {
        for i2 in r[1] as usize + 2..fine.1 - r[1] as usize - 2 {
            assert!((f.at(i1, i2) - 1.0).abs() < 1e-14, "({i1},{i2})");
        }
    }
}

#[test]
fn restriction_of_constants_and_diracs() {
    let p = Stencil::from_mask(&p1());
    let u = GridVec::from_values((15, 15), vec![2.0; 225]).unwrap();
    let rc = restrict(&p, &u, (2, 2), (7, 7), 0).unwrap();
    assert!((rc.at(3, 3) - 2.0).abs() < 1e-14);
    let mut d = GridVec::zeros((15, 15));
    d.values[7 * 15 + 7] = 1.0;
    let rc = restrict(&p, &d, (2, 2), (7, 7), 0).unwrap();
    assert!((rc.at(3, 3) - p.center() / 4.0).abs() < 1e-15);
}

#[test]
fn gauss_seidel_two_by_two() {
    let s = Stencil::new([([-1, 0], -1.0), ([0, 0], 2.0), ([1, 0], -1.0)]);
    let b = GridVec::from_values((2, 1), vec![1.0, 1.0]).unwrap();
    let mut x = GridVec::zeros((2, 1));
    gauss_seidel(&s, &b, &mut x, 1, SweepOrder::Forward).unwrap();
    assert_eq!(x.values, vec![0.5, 0.75]);
    let mut exact = GridVec::from_values((2, 1), vec![1.0, 1.0]).unwrap();
    gauss_seidel(&s, &b, &mut exact, 3, SweepOrder::Symmetric).unwrap();
    assert!(exact.values.iter().all(|v| (v - 1.0).abs() < 1e-15));
}

#[test]
fn gauss_seidel_decreases_residual() {
    let d = (15, 15);
    let s = lap(d);
    let b = random_grid(d, &mut rng());
    let mut x = GridVec::zeros(d);
    let mut prev = residual(&s, &b, &x).norm();
    for _ in 0..10 {
        gauss_seidel(&s, &b, &mut x, 1, SweepOrder::Forward).unwrap();
        let now = residual(&s, &b, &x).norm();
        assert!(now < prev);
        prev = now;
    }
    assert!(gauss_seidel(&Stencil::new([([1, 0], 1.0)]), &b, &mut x, 1, SweepOrder::Forward).is_err());
}

#[test]
fn two_grid_cycle_matches_dense_iteration() {
    let fine = (7, 7);
    let mut plan = uniform_schedule(fine, (2, 2), &Stencil::from_mask(&p1()), "P1", 1.0, 1, 1).unwrap();
    plan.levels.truncate(2);
    plan.levels[1].transfer = None;
    let mg = Multigrid::new(plan.clone()).unwrap();
    let a = dense_toeplitz(&plan.levels[0].system, fine);
    let ac = dense_toeplitz(&plan.levels[1].system, plan.levels[1].dims);
    let pd = dense_p(&plan.levels[0].transfer.as_ref().unwrap().stencil, fine, (2, 2));
    let mut r = rng();
    let b = random_grid(fine, &mut r);
    let mut x = GridVec::zeros(fine);
    let mut xd = DVector::zeros(49);
    let bd = vecof(&b);
    for _ in 0..4 {
        x = mg.v_cycle(&b, x, 0).unwrap();
        let y = dense_gs(&a, &bd, &xd);
        let rc = pd.transpose() * (&bd - &a * &y) / 4.0;
        let y = y + &pd * ac.clone().lu().solve(&rc).unwrap();
        xd = dense_gs(&a, &bd, &y);
        assert!(rel(&vecof(&x), &xd) < 1e-12);
    }
}

#[test]
fn single_level_plan_solves_directly() {
    let d = (9, 9);
    let s = lap(d);
    let plan = LevelPlan {
        levels: vec![Level { dims: d, system: s.clone(), eps: 1.0, transfer: None, pre: 1, post: 1 }],
        order: SweepOrder::Forward,
        shift: 0,
    };
    let mg = Multigrid::new(plan).unwrap();
    let b = random_grid(d, &mut rng());
    let (x, stats) = mg.solve(&b, 1e-10, 5).unwrap();
    assert_eq!(stats.iters, 1);
    assert!(residual(&s, &b, &x).norm() < 1e-12 * b.norm());
    let (_, zero) = mg.solve(&GridVec::zeros(d), 1e-7, 5).unwrap();
    assert_eq!(zero.iters, 0);
}

#[test]
fn solver_is_invariant_to_joint_scaling() {
    let n0 = (31, 31);
    let p = Stencil::from_mask(&p1());
    let plan = uniform_schedule(n0, (2, 2), &p, "P1", 1.0, 1, 1).unwrap();
    let b = build_rhs(&plan.levels[0].system, n0).unwrap();
    let (_, s1) = Multigrid::new(plan.clone()).unwrap().solve(&b, 1e-7, 100).unwrap();
    let mut scaled = plan;
    for l in &mut scaled.levels {
        l.system = l.system.scaled(1e-3);
    }
    let mut b2 = b.clone();
    b2.values.iter_mut().for_each(|v| *v *= 1e-3);
    let (_, s2) = Multigrid::new(scaled).unwrap().solve(&b2, 1e-7, 100).unwrap();
    assert_eq!(s1.iters, s2.iters);
    assert!((s1.conv_rate - s2.conv_rate).abs() < 1e-9);
}

#[test]
fn schedules_follow_the_grid_chain() {
    let p = Stencil::from_mask(&p1());
    let u = uniform_schedule((127, 127), (2, 2), &p, "P1", 1.0, 1, 1).unwrap();
    assert_eq!(u.levels.len(), 7);
    assert_eq!(u.levels.last().unwrap().dims, (1, 1));
    let a = Stencil::from_mask(&aniso_interp_symbol(3, 1).unwrap());
    let u = uniform_schedule((127, 80), (2, 3), &a, "a", 1.0, 1, 1).unwrap();
    let dims: Vec<Dims> = u.levels.iter().map(|l| l.dims).collect();
    assert_eq!(dims, vec![(127, 80), (63, 26), (31, 8), (15, 2)]);
    let single = uniform_schedule((1, 1), (2, 2), &p, "P1", 1.0, 1, 1).unwrap();
    assert_eq!(single.levels.len(), 1);
    let mx = mixed_schedule((127, 71), 3, 2, &a, "a", 1e-2, 2, 1).unwrap();
    let dims: Vec<Dims> = mx.levels.iter().map(|l| l.dims).collect();
    assert_eq!(dims, vec![(127, 71), (63, 23), (31, 7), (15, 3), (7, 1)]);
    let factors: Vec<(usize, usize)> = mx.levels.iter().filter_map(|l| l.transfer.as_ref().map(|t| t.factor)).collect();
    assert_eq!(factors, vec![(2, 3), (2, 3), (2, 2), (2, 2)]);
    assert!((mx.levels[1].eps / mx.levels[0].eps - 9.0 / 4.0).abs() < 0.05);
    let plain = mixed_schedule((127, 127), 3, 0, &a, "a", 1e-2, 2, 1).unwrap();
    assert!(plain.levels.iter().filter_map(|l| l.transfer.as_ref()).all(|t| t.factor == (2, 2) && t.label == "P1"));
    assert!(uniform_schedule((100, 80), (2, 3), &a, "a", 1.0, 1, 1).is_err());
}

#[test]
fn exact_solution_corners_and_recovery() {
    let n0 = (15, 15);
    let x = exact_solution(n0);
    assert_eq!(x.at(0, 0), 0.0);
    assert!(x.at(0, 14).abs() < 1e-12);
    let s = lap(n0);
    let b = build_rhs(&s, n0).unwrap();
    let plan = uniform_schedule(n0, (2, 2), &Stencil::from_mask(&p1()), "P1", 1.0, 1, 1).unwrap();
    let (sol, _) = Multigrid::new(plan).unwrap().solve(&b, 1e-10, 200).unwrap();
    let err = sol.values.iter().zip(&x.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let top = x.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    assert!(err <= 1e-6 * top);
}

#[test]
fn bilinear_first_cycle_reduction() {
    let n0 = (127, 127);
    let plan = uniform_schedule(n0, (2, 2), &Stencil::from_mask(&p1()), "P1", 1.0, 1, 1).unwrap();
    let b = build_rhs(&plan.levels[0].system, n0).unwrap();
    let (_, stats) = Multigrid::new(plan).unwrap().solve(&b, 1e-7, 50).unwrap();
    assert_eq!(stats.iters, 9);
    assert!((stats.conv_rate - 0.1432).abs() < 0.01);
    assert!(stats.history.windows(2).all(|w| w[1] < w[0]));
}
