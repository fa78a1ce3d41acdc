use convex_utm::vortex::*;
use convex_utm::{Complex64, Error};
use core::f64::consts::{PI, TAU};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn reference_problem() -> VortexProblem {
    VortexProblem::new(2.0, 1.0, c(0.3, 0.2), 1.0)
}

#[test]
fn singular_potential_examples() {
    assert!(singular_potential(c(1.0, 0.0), c(0.0, 0.0), TAU).unwrap().norm() < 1e-15);
    let v = singular_potential(c(0.5, 1.0), c(0.5, 0.0), TAU).unwrap();
    assert!((v - c(PI / 2.0, 0.0)).norm() < 1e-15);
    let v = singular_potential(c(3.5, 0.0), c(0.5, 0.0), TAU).unwrap();
    assert!((v.im + 3.0f64.ln()).abs() < 1e-15);
    assert!(matches!(singular_potential(c(0.2, 0.1), c(0.2, 0.1), 1.0), Err(Error::SingularPoint)));
}

#[test]
fn block_p_at_zero() {
    assert!(vortex_block_p(0, c(0.0, 0.0), 2.0, 1.0).unwrap().norm() < 1e-14);
    assert!((vortex_block_p(1, c(0.0, 0.0), 2.0, 1.0).unwrap() - c(0.0, -PI)).norm() < 1e-13);
    for n in 2..6 {
        assert!(vortex_block_p(n, c(0.0, 0.0), 2.0, 1.0).unwrap().norm() < 1e-13);
    }
}

#[test]
fn rhs_r_examples() {
    let p = VortexProblem::new(2.0, 1.0, c(0.5, 0.0), 0.0);
    assert_eq!(vortex_rhs_r(c(0.7, -0.3), &p).unwrap(), c(0.0, 0.0));
    let p = VortexProblem::new(1.0, 1.0, c(0.0, 0.0), 1.0);
    assert!(vortex_rhs_r(c(0.0, 0.0), &p).unwrap().norm() < 1e-15);
    let p = VortexProblem::new(2.0, 1.0, c(0.5, 0.0), 1.0);
    let n = 100_000;
    let mut s = c(0.0, 0.0);
    for k in 0..n {
        let th = TAU * k as f64 / n as f64;
        let z = c(2.0 * th.cos(), th.sin());
        let dz = c(-2.0 * th.sin(), th.cos());
        s += dz * (-(z - c(0.5, 0.0)).norm().ln() / TAU);
    }
    let oracle = Complex64::i() * s * (TAU / n as f64);
    assert!((vortex_rhs_r(c(0.0, 0.0), &p).unwrap() - oracle).norm() < 1e-12);
}

#[test]
fn validation_errors() {
    assert!(VortexProblem::new(2.0, 1.0, c(2.0, 0.0), 1.0).validate().is_err());
    assert!(VortexProblem::new(2.0, 1.0, c(0.0, 0.0), f64::NAN).validate().is_err());
    assert!(VortexProblem::new(-2.0, 1.0, c(0.0, 0.0), 1.0).validate().is_err());
    assert!(matches!(ConformalMap::new(1.0, 2.0), Err(Error::OracleDomain)));
    assert!(matches!(ConformalMap::new(1.0, 1.0), Err(Error::OracleDomain)));
}

#[test]
fn zero_circulation_is_trivial() {
    let p = VortexProblem::new(2.0, 1.0, c(0.3, 0.2), 0.0);
    let sol = solve_vortex(&p).unwrap();
    assert!(sol.coefficients.iter().all(|a| a.norm() == 0.0));
    let grid = streamfunction_grid(&sol, 9, 5).unwrap();
    assert!(grid.iter().filter_map(|g| g.psi).all(|v| v == 0.0));
    assert!(grid.iter().any(|g| g.psi.is_some()));
}

#[test]
fn centred_vortex_in_disc_needs_no_correction() {
    let p = VortexProblem::new(1.0, 1.0, c(0.0, 0.0), 1.0).with_truncation(8);
    let sol = solve_vortex(&p).unwrap();
    assert!(sol.coefficients.iter().all(|a| a.norm() < 1e-12));
    let z = c(0.3, -0.4);
    let h = complex_potential(&sol, z).unwrap();
    let expected = z.ln() / (Complex64::i() * TAU);
    assert!((h - expected).norm() < 1e-10);
}

#[test]
fn conformal_map_sends_boundary_to_circle() {
    for (a, b) in [(2.0, 1.0), (3.0, 1.0), (1.5, 1.0)] {
        let m = ConformalMap::new(a, b).unwrap();
        for k in 0..100 {
            let th = TAU * k as f64 / 100.0;
            let w = m.map(c(a * th.cos(), b * th.sin()));
            assert!((w.norm() - 1.0).abs() < 1e-8, "{a} {b} {th} {}", w.norm());
        }
        assert!(m.map(c(0.0, 0.0)).norm() < 1e-15);
        for x in [-0.9 * a, -0.3 * a, 0.5 * a] {
            assert!(m.map(c(x, 0.0)).im.abs() < 1e-14);
        }
    }
}

#[test]
fn oracle_streamfunction_is_constant_on_boundary() {
    let p = reference_problem();
    let ex = ExactVortex::new(&p).unwrap();
    let level = -(ex.w0.norm().ln()) / TAU;
    for k in 0..64 {
        let th = TAU * k as f64 / 64.0 + 0.01;
        let h = ex.potential(c(2.0 * th.cos(), th.sin()));
        assert!((h.im - level).abs() < 1e-8);
    }
}

#[test]
fn oracle_velocity_matches_difference_quotient() {
    let ex = ExactVortex::new(&reference_problem()).unwrap();
    for z in [c(-1.0, 0.3), c(1.2, -0.5), c(0.1, 0.6)] {
        let h = 1e-5;
        let d = (ex.potential(z + h) - ex.potential(z - h)) / (2.0 * h);
        assert!((d - ex.velocity(z)).norm() < 1e-7);
    }
}

#[test]
fn reference_configuration_matches_oracle() {
    let p = reference_problem();
    let sol = solve_vortex(&p).unwrap();
    let ex = ExactVortex::new(&p).unwrap();
    let max_im = (0..256)
        .map(|k| sol.boundary_potential(TAU * k as f64 / 256.0).unwrap().im.abs())
        .fold(0.0, f64::max);
    assert!(max_im < 1e-12);
    let probes: Vec<Complex64> = (0..25)
        .map(|k| {
            let (i, j) = (k % 5, k / 5);
            c(-1.2 + 0.6 * i as f64, -0.5 + 0.25 * j as f64)
        })
        .filter(|z| (z - c(0.3, 0.2)).norm() > 0.1)
        .collect();
    let vel = sol.complex_velocity_many(&probes, &Default::default()).unwrap();
    let err = probes.iter().zip(&vel).map(|(z, v)| (v - ex.velocity(*z)).norm()).fold(0.0, f64::max);
    assert!(err < 1e-3, "velocity error {err}");
    let h = sol.complex_potential_many(&probes, &Default::default()).unwrap();
    let shift = h[0] - ex.potential(probes[0]);
    for (z, v) in probes.iter().zip(&h) {
        // Re h is defined modulo Γ across branch cuts.
        let mut d = v - ex.potential(*z) - shift;
        d.re -= d.re.round();
        assert!(d.norm() < 1e-4);
    }
}

#[test]
fn grid_symmetric_for_real_vortex() {
    let p = VortexProblem::new(2.0, 1.0, c(0.4, 0.0), 1.0).with_truncation(12);
    let sol = solve_vortex(&p).unwrap();
    let (nx, ny) = (9, 7);
    let grid = streamfunction_grid(&sol, nx, ny).unwrap();
    for j in 0..ny {
        for i in 0..nx {
            let (u, l) = (grid[j * nx + i], grid[(ny - 1 - j) * nx + i]);
            match (u.psi, l.psi) {
                (Some(x), Some(y)) => assert!((x - y).abs() < 1e-8),
                (None, None) => {}
                _ => panic!("mask not symmetric"),
            }
        }
    }
}

#[test]
fn grid_mask_excludes_vortex_core() {
    let p = reference_problem();
    let nodes = grid_nodes(&p, 41, 21).unwrap();
    for (z, keep) in nodes {
        if (z - p.zeta0).norm() < 0.05 {
            assert!(!keep);
        }
        if (z.re / 2.0).powi(2) + z.im.powi(2) > 1.0 {
            assert!(!keep);
        }
    }
    assert!(grid_nodes(&p, 1, 4).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn block_p_conjugate_symmetry(n in -6i32..6, x in -2.0..2.0f64) {
        // ζ(−θ) = conj ζ(θ) gives P(n, t) = −conj P(n, −t̄).
        let p = vortex_block_p(n, c(x, 0.0), 2.0, 1.0).unwrap();
        let q = vortex_block_p(n, c(-x, 0.0), 2.0, 1.0).unwrap();
        prop_assert!((p + q.conj()).norm() < 1e-10 * (1.0 + p.norm()));
    }
}
