mod common;

use anisomg::analysis::{check_interpolatory, generation_degree, reproduction_degree};
use anisomg::rational::{frac, int, Rational};
use anisomg::schemes::{
    aniso_interp_symbol, approx_symbol, box_spline_symbol, dd_symbol, in_diamond, minimal_interp_mask,
};
use anisomg::Mask;
use common::fixture_mask;
use num::{One, Zero};

fn assert_same_symbol(built: &Mask, name: &str, m: i64) {
    let expected = fixture_mask(name, m);
    assert_eq!(built.symbol, expected.symbol, "{name} differs");
}

#[test]
fn interp_masks_match_printed_matrices() {
    for (m, n) in [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2)] {
        let built = aniso_interp_symbol(m, n).unwrap();
        assert_same_symbol(&built, &format!("interp_m{m}_n{n}"), m);
    }
}

#[test]
fn box_splines_match_printed_matrices() {
    for n in [1, 2] {
        assert_same_symbol(&box_spline_symbol(n).unwrap(), &format!("box_n{n}"), 3);
    }
}

#[test]
fn approx_masks_match_printed_matrices() {
    for (n, l) in [(1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (3, 2)] {
        assert_same_symbol(&approx_symbol(n, l).unwrap(), &format!("approx_n{n}_l{l}"), 3);
    }
}

#[test]
fn interp_mask_rendering() {
    let csv = aniso_interp_symbol(3, 1).unwrap().to_csv();
    assert_eq!(csv, "1/6,1/3,1/2,1/3,1/6\n1/3,2/3,1,2/3,1/3\n1/6,1/3,1/2,1/3,1/6");
}

#[test]
fn four_point_scheme() {
    let p = dd_symbol(2, 2).unwrap();
    let expect = [(-3, frac(-1, 16)), (-1, frac(9, 16)), (0, int(1)), (1, frac(9, 16)), (3, frac(-1, 16))];
    assert_eq!(p.symbol.len(), expect.len());
    for (e, c) in expect {
        assert_eq!(p.coeff([e, 0]), c);
    }
}

/// Lagrange basis on -n+1..n evaluated directly.
fn lagrange(n: i64, beta: i64, x: &Rational) -> Rational {
    let mut num = Rational::one();
    let mut den = Rational::one();
    for k in (1 - n)..=n {
        if k != beta {
            num *= x - int(k);
            den *= int(beta - k);
        }
    }
    num / den
}

#[test]
fn dd_coefficients_are_lagrange_values() {
    for m in 2..=5 {
        for n in 1..=4u32 {
            let p = dd_symbol(m, n).unwrap();
            let nn = n as i64;
            let mut count = 0;
            for eps in 0..m {
                for beta in (1 - nn)..=nn {
                    let want = if eps == 0 { if beta == 0 { int(1) } else { int(0) } } else { lagrange(nn, beta, &frac(eps, m)) };
                    assert_eq!(p.coeff([eps - m * beta, 0]), want, "m={m} n={n} eps={eps} beta={beta}");
                    if !want.is_zero() {
                        count += 1;
                    }
                }
            }
            assert_eq!(p.symbol.len(), count, "m={m} n={n} has stray terms");
        }
    }
}

#[test]
fn dd_is_interpolatory_and_reproduces() {
    for m in 2..=5 {
        for n in 1..=3u32 {
            let p = dd_symbol(m, n).unwrap();
            assert!(check_interpolatory(&p));
            assert_eq!(p.symbol.value_at_one(), int(m));
            assert_eq!(generation_degree(&p), 2 * n as i64 - 1, "m={m} n={n}");
            assert_eq!(reproduction_degree(&p).unwrap(), 2 * n as i64 - 1, "m={m} n={n}");
        }
    }
}

#[test]
fn minimal_mask_equals_interp_mask() {
    for (m, max_n) in [(3, 4u32), (5, 3)] {
        for n in 1..=max_n {
            let a = aniso_interp_symbol(m, n).unwrap();
            let c = minimal_interp_mask(m, n).unwrap();
            assert_eq!(a.symbol, c.symbol, "m={m} n={n}");
        }
    }
}

#[test]
fn interp_support_lies_in_diamond() {
    for (m, max_n) in [(3, 4u32), (5, 3), (7, 2)] {
        for n in 1..=max_n {
            let a = aniso_interp_symbol(m, n).unwrap();
            for (e, _) in a.symbol.terms() {
                assert!(in_diamond(m, n, *e), "m={m} n={n} exponent {e:?}");
            }
        }
    }
}

#[test]
fn interp_degrees() {
    for (m, max_n) in [(3, 4u32), (5, 3)] {
        for n in 1..=max_n {
            let a = aniso_interp_symbol(m, n).unwrap();
            let d = 2 * n as i64 - 1;
            assert!(check_interpolatory(&a));
            assert!(a.is_symmetric());
            assert_eq!(a.symbol.value_at_one(), int(2 * m));
            assert_eq!(generation_degree(&a), d, "m={m} n={n}");
            assert_eq!(reproduction_degree(&a).unwrap(), d, "m={m} n={n}");
        }
    }
}

#[test]
fn box_spline_degrees() {
    for n in 1..=4u32 {
        let b = box_spline_symbol(n).unwrap();
        // B_1 is the tensor hat, which coincides with a_{M,1}.
        assert_eq!(check_interpolatory(&b), n == 1, "n={n}");
        assert!(b.is_symmetric());
        assert_eq!(b.symbol.value_at_one(), int(6));
        assert_eq!(generation_degree(&b), 2 * n as i64 - 1, "n={n}");
        assert_eq!(reproduction_degree(&b).unwrap(), 1, "n={n}");
    }
}

#[test]
fn approx_degrees() {
    for n in 1..=4u32 {
        for l in 0..n {
            let b = approx_symbol(n, l).unwrap();
            assert!(b.is_symmetric());
            assert_eq!(b.symbol.value_at_one(), int(6));
            assert_eq!(generation_degree(&b), 2 * n as i64 - 1, "n={n} l={l}");
            assert_eq!(reproduction_degree(&b).unwrap(), 2 * l as i64 + 1, "n={n} l={l}");
        }
    }
}

#[test]
fn approx_without_correction_is_box_spline() {
    for n in 1..=3 {
        assert_eq!(approx_symbol(n, 0).unwrap().symbol, box_spline_symbol(n).unwrap().symbol);
    }
}

#[test]
fn bad_parameters_rejected() {
    assert!(aniso_interp_symbol(4, 1).is_err());
    assert!(aniso_interp_symbol(3, 0).is_err());
    assert!(approx_symbol(2, 2).is_err());
    assert!(box_spline_symbol(0).is_err());
    assert!(dd_symbol(1, 1).is_err());
}
