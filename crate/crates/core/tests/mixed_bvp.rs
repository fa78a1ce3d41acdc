use std::f64::consts::{FRAC_PI_2, PI, TAU};

use convex_utm::geometry::BoundaryCurve;
use convex_utm::mixed_bvp::*;
use convex_utm::quadrature::Quadrature;
use convex_utm::{Complex64, Error};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Composite Simpson rule with n (even) intervals.
fn simpson<F: Fn(f64) -> Complex64>(f: F, lo: f64, hi: f64, n: usize) -> Complex64 {
    let h = (hi - lo) / n as f64;
    let mut s = f(lo) + f(hi);
    for k in 1..n {
        s += f(lo + h * k as f64) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn polar_zeta(a: f64, b: f64, th: f64) -> (Complex64, Complex64, f64) {
    let q = (b * th.cos()).powi(2) + (a * th.sin()).powi(2);
    let rho = a * b / q.sqrt();
    let drho = -a * b * (a * a - b * b) * th.sin() * th.cos() / q.powf(1.5);
    let e = Complex64::from_polar(1.0, th);
    (rho * e, c(drho, rho) * e, rho)
}

#[test]
fn blocks_at_zero_match_closed_forms() {
    let z = c(0.0, 0.0);
    assert!((disc_block_a(0, z).unwrap() - c(-2.0, 0.0)).norm() < 1e-13);
    assert!((disc_block_a(2, z).unwrap() - c(2.0 / 3.0, 0.0)).norm() < 1e-13);
    assert!(disc_block_a(1, z).unwrap().norm() < 1e-13);
    assert!((disc_block_b(0, z).unwrap() - c(0.0, -2.0)).norm() < 1e-13);
    assert!((disc_block_b(2, z).unwrap() - c(0.0, 2.0 / 3.0)).norm() < 1e-13);
    assert!((disc_rhs(2, z).unwrap() - c(0.0, 2.0 / 3.0)).norm() < 1e-13);
    assert!((disc_rhs(0, z).unwrap() - c(0.0, -2.0)).norm() < 1e-13);
    assert!((ellipse_block_a(0, z, 2.0, 1.0).unwrap() - c(-2.0, 0.0)).norm() < 1e-13);
    assert!((ellipse_block_b(0, z, 2.0, 1.0).unwrap() - c(0.0, -2.0)).norm() < 1e-13);
    assert!((ellipse_rhs(0, z, 2.0, 1.0).unwrap() - c(0.0, -2.0)).norm() < 1e-13);
    assert!((ellipse_rhs(0, z, 3.0, 0.5).unwrap() - c(0.0, -1.0)).norm() < 1e-13);
}

#[test]
fn disc_blocks_match_brute_force() {
    for &t in &[c(0.7, -1.3), c(-2.0, 0.4), c(0.0, 3.0)] {
        for n in [-4, 0, 3] {
            let nf = n as f64;
            let a = -simpson(|th| (-I * t * Complex64::from_polar(1.0, th)).exp() * Complex64::from_polar(1.0, (nf + 1.0) * th), -FRAC_PI_2, FRAC_PI_2, 20000);
            let b = I * simpson(|th| (-I * t * Complex64::from_polar(1.0, th)).exp() * Complex64::from_polar(1.0, (nf + 1.0) * th), FRAC_PI_2, 1.5 * PI, 20000);
            assert!((disc_block_a(n, t).unwrap() - a).norm() < 1e-10 * a.norm().max(1.0));
            assert!((disc_block_b(n, t).unwrap() - b).norm() < 1e-10 * b.norm().max(1.0));
        }
        let m = 3.0;
        let r = -simpson(|th| (m * th).sin() * (-I * t * Complex64::from_polar(1.0, th)).exp() * Complex64::from_polar(1.0, th), FRAC_PI_2, 1.5 * PI, 20000)
            - I * simpson(|th| (m * th).cos() * (-I * t * Complex64::from_polar(1.0, th)).exp() * Complex64::from_polar(1.0, th), -FRAC_PI_2, FRAC_PI_2, 20000);
        assert!((disc_rhs(3, t).unwrap() - r).norm() < 1e-10 * r.norm().max(1.0));
    }
}

#[test]
fn ellipse_blocks_match_brute_force() {
    let (a, b) = (2.0, 1.0);
    for &t in &[c(0.5, 0.5), c(-1.0, -0.8)] {
        for n in [-2, 0, 4] {
            let g = |th: f64| {
                let (z, dz, _) = polar_zeta(a, b, th);
                (-I * t * z).exp() * Complex64::from_polar(1.0, n as f64 * th) * dz
            };
            let ea = I * simpson(g, -FRAC_PI_2, FRAC_PI_2, 40000);
            let eb = simpson(g, FRAC_PI_2, 1.5 * PI, 40000);
            assert!((ellipse_block_a(n, t, a, b).unwrap() - ea).norm() < 1e-10 * ea.norm().max(1.0));
            assert!((ellipse_block_b(n, t, a, b).unwrap() - eb).norm() < 1e-10 * eb.norm().max(1.0));
        }
        let m = 2;
        let k = |th: f64| {
            let (z, dz, rho) = polar_zeta(a, b, th);
            (-I * t * z).exp() * dz * rho.powi(m)
        };
        let r = -simpson(|th| k(th) * (2.0 * th).cos(), -FRAC_PI_2, FRAC_PI_2, 40000)
            + I * simpson(|th| k(th) * (2.0 * th).sin(), FRAC_PI_2, 1.5 * PI, 40000);
        assert!((ellipse_rhs(2, t, a, b).unwrap() - r).norm() < 1e-10 * r.norm().max(1.0));
    }
}

#[test]
fn unit_ellipse_blocks_equal_disc_blocks() {
    for &t in &[c(0.3, 0.1), c(-1.5, 2.5)] {
        for n in [-6, -1, 0, 5] {
            let d = disc_block_a(n, t).unwrap() - ellipse_block_a(n, t, 1.0, 1.0).unwrap();
            assert!(d.norm() < 1e-13);
        }
        assert!((disc_rhs(4, t).unwrap() - ellipse_rhs(4, t, 1.0, 1.0).unwrap()).norm() < 1e-13);
    }
}

#[test]
fn collocation_points_lie_on_rings() {
    let d = BoundaryCurve::unit_circle();
    let ts = collocation_points(&d, 1, 1).unwrap();
    assert_eq!(ts.len(), 2);
    assert!((ts[1] - c(0.0, 1.0)).norm() < 1e-15);
    let ts = collocation_points(&d, 2, 4).unwrap();
    assert_eq!(ts.len(), 9);
    assert_eq!(ts[0], c(0.0, 0.0));
    for (i, t) in ts[1..].iter().enumerate() {
        assert!((t.norm() - (1 + i / 4) as f64).abs() < 1e-14);
    }
    let e = BoundaryCurve::ellipse(2.0, 1.0).unwrap();
    let ts = collocation_points(&e, 1, 8).unwrap();
    assert!((ts[1] - c(0.0, 1.0)).norm() < 1e-15);
    assert!(collocation_points(&d, 0, 4).is_err());
}

#[test]
fn companion_row_gives_the_same_real_equations() {
    let p = MixedBvpProblem::ellipse(2.0, 1.0, 2, 4).unwrap();
    let row = collocation_row(&p, c(0.8, -1.1)).unwrap();
    let [(r1, y1), (i1, z1)] = row.realify(4);
    let [(r2, y2), (i2, z2)] = row.companion().realify(4);
    assert_eq!(r1.len(), p.unknowns());
    for k in 0..r1.len() {
        assert!((r1[k] - r2[k]).abs() < 1e-15 * r1[k].abs().max(1.0));
        assert!((i1[k] + i2[k]).abs() < 1e-15 * i1[k].abs().max(1.0));
    }
    assert_eq!(y1, y2);
    assert_eq!(z1, -z2);
}

#[test]
fn rows_agree_with_individual_blocks() {
    let p = MixedBvpProblem::disc(2, 3);
    let t = c(-0.4, 1.7);
    let row = collocation_row(&p, t).unwrap();
    assert!((row.pairs[0].0 - disc_block_a(0, t).unwrap()).norm() < 1e-12);
    assert!((row.pairs[2].0 - disc_block_a(4, t).unwrap()).norm() < 1e-12);
    assert!((row.pairs[2].1 - disc_block_a(-4, t).unwrap()).norm() < 1e-12);
    assert!((row.pairs[4].0 - disc_block_b(0, t).unwrap()).norm() < 1e-12);
    assert!((row.pairs[7].1 - disc_block_b(-6, t).unwrap()).norm() < 1e-12);
    assert!((row.rhs - disc_rhs(2, t).unwrap()).norm() < 1e-12);
}

fn assert_constant_solution(tr: &FourierTrace) {
    assert!((tr.b[0].re - 1.0).abs() < 1e-8);
    for v in tr.a.iter().chain(&tr.b[1..]) {
        assert!(v.norm() < 1e-8, "{v}");
    }
}

#[test]
fn mode_zero_gives_constant_on_disc_and_ellipse() {
    let (tr, rep) = assemble_and_solve(&MixedBvpProblem::disc(0, 16)).unwrap();
    assert_constant_solution(&tr);
    assert!(rep.sigma_min > 1e-12 * rep.sigma_max);
    let (tr, _) = assemble_and_solve(&MixedBvpProblem::ellipse(2.0, 1.0, 0, 16).unwrap()).unwrap();
    assert_constant_solution(&tr);
    for th in [-1.0, 0.0, 2.0, 4.0] {
        assert!((trace_value(&tr, th) - c(1.0, 0.0)).norm() < 1e-8);
    }
}

#[test]
fn four_rings_are_rank_deficient_at_n16() {
    let p = MixedBvpProblem::disc(0, 16).with_collocation(4, 64);
    assert!(matches!(assemble_and_solve(&p), Err(Error::RankDeficient { .. })));
}

#[test]
fn solved_trace_reproduces_data_exactly() {
    let (tr, _) = assemble_and_solve(&MixedBvpProblem::disc(2, 16)).unwrap();
    assert_eq!(trace_value(&tr, 0.0).re, 1.0);
    assert_eq!(trace_value(&tr, PI).im, -(2.0 * PI).sin());
    for th in [-1.2, -0.3, 0.9, 1.5] {
        assert_eq!(tr.value(th).re, (2.0 * th).cos());
    }
    for th in [1.7, 2.5, 3.9, 4.6] {
        assert!((tr.value(th).im + (2.0 * th).sin()).abs() < 1e-15);
    }
    // Wrapping and the junction convention.
    assert_eq!(tr.value(FRAC_PI_2), tr.value(FRAC_PI_2 - TAU));
    assert_eq!(tr.value(FRAC_PI_2).re, (PI).cos());
    assert_eq!(tr.value(-FRAC_PI_2), tr.value(1.5 * PI));
}

#[test]
fn ellipse_trace_follows_polar_radius() {
    let (tr, _) = assemble_and_solve(&MixedBvpProblem::ellipse(2.0, 1.0, 2, 8).unwrap()).unwrap();
    for th in [-1.0, 0.0, 0.6] {
        let (_, _, rho) = polar_zeta(2.0, 1.0, th);
        assert!((tr.value(th).re - rho * rho * (2.0 * th).cos()).abs() < 1e-13);
    }
    let s: f64 = 0.4;
    let polar = (s.sin()).atan2(2.0 * s.cos());
    assert_eq!(tr.value_at_parameter(s), tr.value(polar));
}

#[test]
fn global_relation_holds_at_fresh_points_for_constant_data() {
    let (tr, _) = assemble_and_solve(&MixedBvpProblem::ellipse(2.0, 1.0, 0, 16).unwrap()).unwrap();
    let q = Quadrature::default();
    for k in 0..20 {
        let t = Complex64::from_polar(0.37 + 0.41 * k as f64, 0.9 * k as f64 + 0.2);
        assert!(tr.global_relation(t, &q).unwrap().norm() < 1e-6);
    }
}

#[test]
fn interior_values_for_constant_data() {
    let p = MixedBvpProblem::disc(0, 16);
    assert!((solve_interior(&p, c(0.3, -0.2)).unwrap() - c(1.0, 0.0)).norm() < 1e-6);
    let p = MixedBvpProblem::ellipse(2.0, 1.0, 0, 16).unwrap();
    assert!((solve_interior(&p, c(0.0, 0.5)).unwrap() - c(1.0, 0.0)).norm() < 1e-6);
    assert!(matches!(solve_interior(&p, c(0.0, 0.9999)), Err(Error::PointNotInterior { .. })));
}

#[test]
fn invalid_problems_are_rejected() {
    assert!(MixedBvpProblem::disc(0, 0).validate().is_err());
    assert!(MixedBvpProblem::disc(0, 16).with_collocation(0, 64).validate().is_err());
    assert!(MixedBvpProblem::disc(0, 16).with_collocation(1, 4).validate().is_err());
    assert!(MixedBvpProblem::ellipse(-1.0, 1.0, 0, 4).is_err());
}
