use ncsphere::geometry::{ricci_closed, scalar_r};
use ncsphere::jet::c;
use ncsphere::modes::{p_mode_residuals, ModeSet, ModeSetSpec, ModeSpec};
use ncsphere::starprod::{star_lattice, star_series, Deformation, TrigPoly};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn small_poly() -> impl Strategy<Value = TrigPoly> {
    prop::collection::vec(((-2i32..=2, -2i32..=2), -1.0f64..1.0, -1.0f64..1.0), 1..5)
        .prop_map(|t| TrigPoly::from_terms(t.into_iter().map(|(ab, re, im)| (ab, C64::new(re, im)))))
}

/// Real-valued polynomial: each term paired with its conjugate.
fn real_poly() -> impl Strategy<Value = TrigPoly> {
    small_poly().prop_map(|p| {
        let conj = TrigPoly::from_terms(p.terms().map(|(&(a, b), v)| ((-a, -b), v.conj())));
        &p + &conj
    })
}

fn trig_spec() -> impl Strategy<Value = ModeSpec> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2).prop_map(|ab| {
        let mut terms = vec![(0, ab[0].0, 0.0)];
        terms.push((1, 0.5 * ab[1].0, -0.5 * ab[1].1));
        terms.push((-1, 0.5 * ab[1].0, 0.5 * ab[1].1));
        ModeSpec::Trigpoly { terms }
    })
}

fn mode_set(n: usize) -> impl Strategy<Value = ModeSet> {
    (prop::collection::vec(trig_spec(), 2), prop::collection::vec(trig_spec(), 4 * n)).prop_map(move |(v0, rest)| {
        let mut it = rest.into_iter();
        let mut take = || (0..2).map(|_| (0..n).map(|_| it.next().unwrap()).collect()).collect();
        let vc = take();
        let vs = take();
        ModeSet::from_spec(&ModeSetSpec { n, v0, vc, vs }).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn star_is_associative(f in small_poly(), g in small_poly(), k in small_poly(), h in -0.5f64..0.5) {
        let d = Deformation::real(h);
        let l = star_lattice(&star_lattice(&f, &g, &d), &k, &d);
        let r = star_lattice(&f, &star_lattice(&g, &k, &d), &d);
        prop_assert!((&l - &r).norm() < 1e-10 * (1.0 + l.norm()));
    }

    #[test]
    fn zero_deformation_is_pointwise(f in small_poly(), g in small_poly()) {
        let d = Deformation::real(0.0);
        prop_assert!((&star_lattice(&f, &g, &d) - &f.mul(&g)).norm() < 1e-15);
    }

    #[test]
    fn real_inputs_give_real_products(f in real_poly(), g in real_poly(), h in -0.5f64..0.5) {
        let p = star_lattice(&f, &g, &Deformation::real(h));
        prop_assert!(p.is_real(1e-12 * (1.0 + p.norm())));
    }

    #[test]
    fn reversed_order_flips_h(f in small_poly(), g in small_poly(), h in -0.5f64..0.5) {
        let d = Deformation::real(h);
        let a = star_lattice(&f, &g, &d);
        let b = star_lattice(&g, &f, &d.negated());
        prop_assert!((&a - &b).norm() < 1e-13 * (1.0 + a.norm()));
    }

    #[test]
    fn series_converges(f in small_poly(), g in small_poly(), h in -0.3f64..0.3) {
        let d = Deformation::real(h);
        let s = star_series(&f, &g, &d, 30);
        let l = star_lattice(&f, &g, &d);
        prop_assert!((&s - &l).norm() < 1e-10 * (1.0 + l.norm()));
    }

    #[test]
    fn scalar_curvature_is_even_and_reflection_symmetric(x in 0.05f64..(PI - 0.05), a in -0.7f64..0.7) {
        prop_assume!(ncsphere::geometry::singularity_locus(a).iter().all(|s| (x - s).abs() > 1e-2));
        let r = scalar_r(x, a).unwrap();
        prop_assert!((r - scalar_r(x, -a).unwrap()).abs() < 1e-9 * (1.0 + r.abs()));
        prop_assert!((r - scalar_r(PI - x, a).unwrap()).abs() < 1e-9 * (1.0 + r.abs()));
    }

    #[test]
    fn off_diagonal_ricci_is_odd(x in 0.1f64..3.0, a in -0.5f64..0.5) {
        prop_assume!(ncsphere::geometry::singularity_locus(a).iter().all(|s| (x - s).abs() > 1e-2));
        let (p, _) = ricci_closed(x, a).unwrap();
        let (m, _) = ricci_closed(x, -a).unwrap();
        prop_assert!((p[(0, 1)] + m[(0, 1)]).abs() < 1e-10 * (1.0 + p[(0, 1)].abs()));
        prop_assert!((p[(1, 0)] + m[(1, 0)]).abs() < 1e-10 * (1.0 + p[(1, 0)].abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn residuals_are_quadratic(ms in mode_set(2), k in 0.2f64..3.0, x in 0.3f64..2.8, p in 1usize..4) {
        let d = Deformation::from_alpha(0.2).unwrap();
        let a = p_mode_residuals(&ms, &d, x, p).unwrap();
        let b = p_mode_residuals(&ms.scaled(k), &d, x, p).unwrap();
        for j in 0..6 {
            prop_assert!((b[j] - a[j] * (k * k)).norm() < 1e-11 * (1.0 + b[j].norm()));
        }
    }

    #[test]
    fn padding_leaves_residuals_unchanged(ms in mode_set(1), x in 0.3f64..2.8, p in 1usize..4) {
        let d = Deformation::from_alpha(0.15).unwrap();
        let a = p_mode_residuals(&ms, &d, x, p).unwrap();
        let b = p_mode_residuals(&ms.padded(3).unwrap(), &d, x, p).unwrap();
        for j in 0..6 {
            prop_assert!((b[j] - a[j]).norm() < 1e-12 * (1.0 + a[j].norm()));
        }
    }

    #[test]
    fn real_fields_give_real_residuals(ms in mode_set(1), x in 0.3f64..2.8) {
        // Real data and real h keep every equation real.
        let d = Deformation::from_alpha(0.2).unwrap();
        let e = p_mode_residuals(&ms, &d, x, 1).unwrap();
        for v in e {
            prop_assert!(v.im.abs() < 1e-10 * (1.0 + v.norm()));
        }
        prop_assert!(e[0] != c(0.0));
    }
}
