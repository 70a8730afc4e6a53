use ncsphere::geometry::*;
use ncsphere::jet::c;
use ncsphere::starprod::{Deformation, TrigPoly};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

fn grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| PI * i as f64 / (n + 1) as f64).collect()
}

fn away_from_singularities(alpha: f64) -> impl Fn(&f64) -> bool {
    let locus = singularity_locus(alpha);
    move |x| locus.iter().all(|s| (x - s).abs() > 1e-3)
}

#[test]
fn embedding_coefficients() {
    let e = build_embedding(&Deformation::real(0.0)).unwrap();
    assert_eq!((e.a, e.b), (1.0, 1.0));
    let e = build_embedding(&Deformation::real(0.5)).unwrap();
    assert!((e.a - 0.886_818_883_970_073_9).abs() < 1e-12);
    assert!((e.b - e.a * 1f64.cosh().sqrt()).abs() < 1e-15);
}

#[test]
fn embedding_identities_exact() {
    for &h in &[0.1, 0.3, 0.5] {
        let d = Deformation::real(h);
        let e = build_embedding(&d).unwrap();
        let basis = e.tangent_basis();
        let unit = &e.dot(&e.lambda, &e.lambda) - &TrigPoly::constant(c(1.0));
        assert!(unit.norm() < 1e-15, "h={h}: {}", unit.norm());
        assert!(e.dot(&e.lambda, &basis[0]).norm() < 1e-15);
        assert!(e.dot(&basis[0], &e.lambda).norm() < 1e-15);
        let s2 = TrigPoly::sin_x(2).scale(c(d.alpha.re));
        assert!((&e.dot(&e.lambda, &basis[1]) + &s2).norm() < 1e-15);
        assert!((&e.dot(&basis[1], &e.lambda) - &s2).norm() < 1e-15);
    }
}

#[test]
fn broken_orthogonality_point_value() {
    let d = Deformation::real(0.3);
    let e = build_embedding(&d).unwrap();
    let v = e.dot(&e.lambda, &e.tangent_basis()[1]).eval_real(0.8, 0.4);
    assert!((v.re + 0.3f64.tanh() * 1.6f64.sin()).abs() < 1e-13);
}

#[test]
fn metric_closed_values() {
    let g = metric_closed(0.7, 0.0);
    assert_eq!(g[(0, 1)], 0.0);
    assert!((g[(1, 1)] - 0.7f64.sin().powi(2)).abs() < 1e-15);
    let g = metric_closed(0.6, 0.75);
    assert!((g[(0, 1)] + 0.75 * 1.2f64.cos()).abs() < 1e-15);
    assert!((g[(1, 0)] - 0.75 * 1.2f64.cos()).abs() < 1e-15);
    assert_eq!(g[(0, 1)] + g[(1, 0)], 0.0);
}

#[test]
fn metric_from_basis_is_y_independent_and_closed() {
    for &h in &[0.2, 0.5] {
        let d = Deformation::real(h);
        let e = build_embedding(&d).unwrap();
        for &x in &[0.6, 1.3, 2.2] {
            let closed = metric_closed(x, d.alpha.re);
            for &y in &[0.0, 1.0, 2.5, 4.0] {
                let g = metric_from_basis(&e, x, y);
                assert!((g - closed).abs().max() < 1e-13, "h={h} x={x} y={y}");
            }
        }
    }
}

#[test]
fn inverse_metric_values() {
    let (gi, d) = inverse_metric(1.0, 0.2).unwrap();
    let id = metric_closed(1.0, 0.2) * gi;
    assert!((id - nalgebra::Matrix2::identity()).abs().max() < 1e-13);
    assert!(d > 0.0);
    let (_, d) = inverse_metric(PI / 2.0, 0.75).unwrap();
    assert!((d - 0.64).abs() < 1e-14);
    let (gi, _) = inverse_metric(0.9, 0.0).unwrap();
    assert!((gi[(1, 1)] - 1.0 / 0.9f64.sin().powi(2)).abs() < 1e-13);
    assert!(inverse_metric(0.0, 0.0).is_err());
}

#[test]
fn classical_christoffels() {
    let x = 0.8;
    let con = connections(x, 0.0).unwrap();
    assert!((con.upper[1][0][1] - 1.0 / x.tan()).abs() < 1e-14);
    assert!((con.upper[0][1][1] + x.sin() * x.cos()).abs() < 1e-14);
    assert_eq!(con.lower[0][0][0], 0.0);
    let con = connections(0.7, 0.3).unwrap();
    let (_, d) = inverse_metric(0.7, 0.3).unwrap();
    assert!((con.upper[0][0][0] + 0.045 * d * 2.8f64.sin()).abs() < 1e-14);
    assert_eq!(con.lower[0][1][0], -con.lower[0][0][1]);
}

#[test]
fn gamma_consistency_with_lattice_torsion() {
    for &a in &[0.0, 0.3, -0.3, 0.6] {
        let d = Deformation::from_alpha(a).unwrap();
        for &(x, y) in &[(0.9, 0.3), (1.7, 2.0), (2.5, 5.1)] {
            let r = gamma_consistency(x, y, &d).unwrap();
            assert!(r.max() < 1e-12, "alpha={a} x={x}: {r:?}");
        }
    }
    let r = gamma_consistency(0.9, 0.0, &Deformation::real(0.0)).unwrap();
    assert_eq!(r.upper, 0.0);
}

#[test]
fn torsion_vanishes_classically() {
    let e = build_embedding(&Deformation::real(0.0)).unwrap();
    let t = e.torsion_split_at(0.7, 1.2);
    assert!(t.torsion.iter().flatten().flatten().all(|v| v.abs() < 1e-15));
}

#[test]
fn ricci_assembly_matches_closed() {
    for &a in &[0.0, 0.2, -0.2, 0.5, -0.5, 0.75, -0.75] {
        for x in grid(50).into_iter().filter(away_from_singularities(a)) {
            let (ra, sa) = riemann_ricci(x, a).unwrap();
            let (rc, sc) = ricci_closed(x, a).unwrap();
            let scale = 1.0 + rc.abs().max();
            assert!((ra - rc).abs().max() < 1e-10 * scale, "alpha={a} x={x}");
            assert!((sa - sc).abs() < 1e-10 * (1.0 + sc.abs()));
        }
    }
}

#[test]
fn ricci_limits() {
    let (r, s) = ricci_closed(1.1, 0.0).unwrap();
    assert!((r[(0, 0)] - 1.0).abs() < 1e-15);
    assert!((r[(1, 1)] - 1.1f64.sin().powi(2)).abs() < 1e-15);
    assert!((s - 2.0).abs() < 1e-14);
    for &a in &[1.0, -1.0] {
        assert_eq!(scalar_r(0.3, a).unwrap(), 0.0);
    }
    let (ra, sa) = riemann_ricci(1.1, 0.3).unwrap();
    let (rc, sc) = ricci_closed(1.1, 0.3).unwrap();
    assert!((sa - sc).abs() < 1e-10 && (ra - rc).abs().max() < 1e-10);
}

#[test]
fn off_diagonal_ricci_is_odd_in_alpha() {
    // R₁₂(−α) = −R₁₂(α) and R₂₁(−α) = −R₂₁(α); the two are not exchanged.
    let (p, _) = ricci_closed(0.9, 0.4).unwrap();
    let (m, _) = ricci_closed(0.9, -0.4).unwrap();
    assert!((p[(0, 1)] + m[(0, 1)]).abs() < 1e-14);
    assert!((p[(1, 0)] + m[(1, 0)]).abs() < 1e-14);
    assert!((p[(0, 0)] - m[(0, 0)]).abs() < 1e-14);
    assert!((p[(0, 1)] - m[(1, 0)]).abs() > 1e-2);
}

#[test]
fn exact_gamma_derivative_matches_richardson() {
    for &(x, a) in &[(0.7, 0.2), (1.4, -0.5), (2.0, 0.4)] {
        let ex = gamma_upper_derivative(x, a);
        let fd = gamma_upper_derivative_fd(x, a, 1e-5);
        for s in 0..2 {
            for m in 0..2 {
                for n in 0..2 {
                    assert!((ex[s][m][n] - fd[s][m][n]).abs() < 1e-7 * (1.0 + ex[s][m][n].abs()));
                }
            }
        }
    }
}

#[test]
fn imaginary_h_curvature() {
    for x in grid(20) {
        assert!((scalar_r_imaginary(x, 0.0).unwrap() - 2.0).abs() < 1e-14);
        for &hb in &[0.1, 0.3] {
            let rb = scalar_r_imaginary(x, hb).unwrap();
            let d = Deformation::imaginary(hb);
            let (_, rc) = ricci_closed_c(c(x), d.alpha).unwrap();
            assert!((rc - C64::new(rb, 0.0)).norm() < 1e-12);
            let (_, ra) = riemann_ricci_c(c(x), d.alpha).unwrap();
            assert!((ra - C64::new(rb, 0.0)).norm() < 1e-10);
        }
    }
    assert!(scalar_r_imaginary(0.3, PI / 2.0).is_err());
}

#[test]
fn singularity_locus_cases() {
    let l = singularity_locus(0.75);
    let x0 = 0.5 * (7.0f64 / 18.0).acos();
    assert!((l[0] - x0).abs() < 1e-12 && (l[1] - (PI - x0)).abs() < 1e-12);
    assert!((x0 - 0.58569).abs() < 1e-5);
    assert!(singularity_locus(0.2).is_empty());
    let l = singularity_locus(1.0);
    assert!((l[0] - PI / 4.0).abs() < 1e-15 && (l[1] - 3.0 * PI / 4.0).abs() < 1e-15);
    for &x in &l {
        assert!(ricci_closed(x, 1.0).is_err());
    }
}

#[test]
fn sign_scan_at_three_quarters() {
    assert!(scalar_r(0.1, 0.75).unwrap() < 0.0);
    assert!(scalar_r(PI - 0.1, 0.75).unwrap() < 0.0);
    assert!(scalar_r(PI / 2.0, 0.75).unwrap() > 0.0);
    let scan = curvature_sign_scan(0.75, 400).unwrap();
    assert_eq!(sign_changes(&scan).len(), 2);
    let flat = curvature_sign_scan(0.0, 100).unwrap();
    assert!(flat.iter().all(|s| s.sign == 1 && (s.r - 2.0).abs() < 1e-12));
    assert!(curvature_sign_scan(0.5, 1).is_err());
}

#[test]
fn geometry_at_bundle() {
    let g = GeometryAt::new(1.2, 0.3).unwrap();
    assert!((g.g * g.ginv - nalgebra::Matrix2::identity()).abs().max() < 1e-12);
    assert_eq!(g.gamma_lower[0][0][0], 0.0);
}
