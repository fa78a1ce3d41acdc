//! Subcommand implementations.

use std::f64::consts::{PI, TAU};

use convex_utm::geometry::{inscribe_trapezoid, BoundaryCurve};
use convex_utm::helmholtz::{
    greens_identity_eval, helmholtz_global_residual, helmholtz_reconstruct, HelmholtzBoundaryData,
    HelmholtzParameter,
};
use convex_utm::laplace::{reconstruct_points, SpectralEvaluator};
use convex_utm::mixed_bvp::{assemble_and_solve, FourierTrace, MixedBvpProblem, SolveReport};
use convex_utm::quadrature::{Quadrature, QuadratureConfig};
use convex_utm::vortex::{
    grid_nodes, impermeability_error, solve_vortex, velocity_error, velocity_probes, VortexProblem,
};
use convex_utm::Complex64;
use rayon::prelude::*;

use crate::output::{write_grid_csv, write_trace_csv, GridRow, Report};
use crate::{
    CliError, Command, Common, DomainKind, EllipseArgs, HelmholtzArgs, MixedArgs, ReconstructArgs, VortexArgs,
};

/// Boundary samples in trace files.
pub const TRACE_SAMPLES: usize = 512;
/// Points per parallel work item; fixed so output does not depend on the
/// number of workers.
pub const CHUNK: usize = 1024;

pub fn dispatch(cmd: &Command) -> Result<(), CliError> {
    match cmd {
        Command::SolveDisc(args) => solve_mixed(MixedBvpProblem::disc(args.m, args.n), args),
        Command::SolveEllipse(EllipseArgs { a, b, mixed }) => {
            solve_mixed(MixedBvpProblem::ellipse(*a, *b, mixed.m, mixed.n)?, mixed)
        }
        Command::Vortex(args) => vortex(args),
        Command::Reconstruct(args) => reconstruct(args),
        Command::HelmholtzCheck(args) => helmholtz_check(args),
    }
}

fn quadrature(common: &Common) -> Result<Quadrature, CliError> {
    Ok(Quadrature::new(QuadratureConfig { abs_tol: common.tol, ..QuadratureConfig::default() })?)
}

/// Spectral points used for residual reports: |t| ∈ {0.5, 1, 2, 4} at four
/// angles offset from the axes.
pub fn probe_spectral_points() -> Vec<Complex64> {
    let mut v = Vec::new();
    for r in [0.5, 1.0, 2.0, 4.0] {
        for k in 0..4 {
            v.push(Complex64::from_polar(r, PI / 8.0 + k as f64 * PI / 2.0));
        }
    }
    v
}

fn mixed_report(trace: &FourierTrace, rep: &SolveReport, quad: &Quadrature) -> Result<Report, CliError> {
    let gr: Vec<f64> = probe_spectral_points()
        .par_iter()
        .map(|&t| trace.global_relation(t, quad).map(|v| v.norm()))
        .collect::<Result<_, _>>()?;
    let mut r = Report::default();
    r.real("residual_lsq", rep.residual_lsq);
    r.real("global_relation_residual_max", gr.into_iter().fold(0.0, f64::max));
    r.real("coeff_decay_ratio", trace.coefficient_decay());
    r.real("sigma_min", rep.sigma_min);
    r.real("sigma_max", rep.sigma_max);
    r.int("rows", rep.rows);
    r.int("cols", rep.cols);
    for (n, a) in trace.a.iter().enumerate() {
        r.complex(&format!("a_{n}"), *a);
    }
    for (n, b) in trace.b.iter().enumerate() {
        r.complex(&format!("b_{n}"), *b);
    }
    Ok(r)
}

fn solve_mixed(problem: MixedBvpProblem, args: &MixedArgs) -> Result<(), CliError> {
    let problem = problem.with_collocation(args.rings, args.thetas_per_ring);
    problem.validate()?;
    let quad = quadrature(&args.common)?;
    let (trace, rep) = assemble_and_solve(&problem)?;
    let rows: Vec<(f64, Complex64)> = (0..TRACE_SAMPLES)
        .map(|k| {
            let th = TAU * k as f64 / TRACE_SAMPLES as f64;
            (th, trace.value(th))
        })
        .collect();
    let report = mixed_report(&trace, &rep, &quad)?;
    write_trace_csv(&args.common.out, &rows)?;
    report.write(&args.common.report_path())?;
    Ok(())
}

/// Evaluates `eval` on fixed-size chunks in parallel, preserving order.
fn chunked<F>(points: &[Complex64], eval: F) -> Result<Vec<Complex64>, CliError>
where
    F: Fn(&[Complex64]) -> convex_utm::Result<Vec<Complex64>> + Sync,
{
    let parts: Vec<Vec<Complex64>> = points.par_chunks(CHUNK).map(&eval).collect::<Result<_, _>>()?;
    Ok(parts.into_iter().flatten().collect())
}

fn vortex(args: &VortexArgs) -> Result<(), CliError> {
    let problem = VortexProblem::new(args.a, args.b, args.zeta0, args.gamma)
        .with_truncation(args.n)
        .with_collocation(args.rings, args.thetas_per_ring);
    problem.validate()?;
    let (nx, ny) = args.grid;
    let nodes = grid_nodes(&problem, nx, ny)?;
    let quad = quadrature(&args.common)?;
    let sol = solve_vortex(&problem)?;
    let inside: Vec<Complex64> = nodes.iter().filter(|(_, k)| *k).map(|(z, _)| *z).collect();
    let values = if problem.gamma == 0.0 {
        vec![Complex64::new(0.0, 0.0); inside.len()]
    } else {
        chunked(&inside, |c| sol.complex_potential_many(c, &quad))?
    };
    let mut it = values.into_iter();
    let rows: Vec<GridRow> = nodes
        .iter()
        .map(|&(z, keep)| GridRow { x: z.re, y: z.im, values: if keep { it.next().map(|h| vec![h.im]) } else { None } })
        .collect();
    let gr: Vec<f64> = probe_spectral_points()
        .par_iter()
        .map(|&t| sol.global_relation(t).map(|v| v.norm()))
        .collect::<Result<_, _>>()?;
    let mut report = Report::default();
    report.real("residual_lsq", sol.residual_lsq);
    report.real("global_relation_residual_max", gr.into_iter().fold(0.0, f64::max));
    report.real("coeff_decay_ratio", sol.coefficient_decay());
    if args.a > args.b && problem.gamma != 0.0 {
        report.real("oracle_max_error", velocity_error(&sol, &velocity_probes(&problem), &quad)?);
    }
    report.real("impermeability_max", impermeability_error(&sol, 256)?);
    for (n, a) in sol.coefficients.iter().enumerate() {
        report.complex(&format!("a_{n}"), *a);
    }
    write_grid_csv(&args.common.out, &["psi"], &rows)?;
    report.write(&args.common.report_path())?;
    Ok(())
}

fn domain_of(kind: DomainKind, a: f64, b: f64) -> Result<BoundaryCurve, CliError> {
    Ok(match kind {
        DomainKind::Disc => BoundaryCurve::unit_circle(),
        DomainKind::Ellipse => BoundaryCurve::ellipse(a, b)?,
    })
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &k| acc * z + k)
}

fn reconstruct(args: &ReconstructArgs) -> Result<(), CliError> {
    let domain = domain_of(args.domain, args.a, args.b)?;
    let coeffs = args.coeffs.0.clone();
    if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(CliError::Usage("coefficients must be finite".into()));
    }
    let (nx, ny) = args.grid;
    if nx < 2 || ny < 2 {
        return Err(CliError::Usage("grid needs at least 2 x 2 nodes".into()));
    }
    let quad = quadrature(&args.common)?;
    let (p_lo, p_hi) = domain.vertical_extremes();
    let (y0, y1) = (domain.position(p_lo).im, domain.position(p_hi).im);
    let x_half = (0..720).map(|k| domain.position(TAU * k as f64 / 720.0).re.abs()).fold(0.0, f64::max);
    let margin = 1e-3 * domain.diameter();
    let mut nodes = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = y0 + (y1 - y0) * j as f64 / (ny - 1) as f64;
        for i in 0..nx {
            let x = -x_half + 2.0 * x_half * i as f64 / (nx - 1) as f64;
            let z = Complex64::new(x, y);
            nodes.push((z, domain.contains(z) && domain.distance_to_boundary(z) >= margin));
        }
    }
    let inside: Vec<Complex64> = nodes.iter().filter(|(_, k)| *k).map(|(z, _)| *z).collect();
    let d2 = domain.clone();
    let c2 = coeffs.clone();
    let trace = move |th: f64| horner(&c2, d2.position(th));
    let values = chunked(&inside, |c| reconstruct_points(trace.clone(), &domain, &quad, &[], c, false))?;
    let mut worst = 0.0f64;
    let mut it = inside.iter().zip(values);
    let rows: Vec<GridRow> = nodes
        .iter()
        .map(|&(z, keep)| {
            let values = if keep {
                it.next().map(|(&w, f)| {
                    let err = (f - horner(&coeffs, w)).norm();
                    worst = worst.max(err);
                    vec![f.re, f.im, err]
                })
            } else {
                None
            };
            GridRow { x: z.re, y: z.im, values }
        })
        .collect();
    let trap = inscribe_trapezoid(&domain, Complex64::new(0.0, 0.0))?;
    let ev = SpectralEvaluator::new(trace.clone(), domain.clone(), trap, quad.clone(), &[])?;
    let mut gr = 0.0f64;
    for t in probe_spectral_points() {
        for j in 1..=4 {
            gr = gr.max(ev.global_relation_residual(j, t)?.norm());
        }
    }
    let mut report = Report::default();
    report.real("global_relation_residual_max", gr);
    report.real("oracle_max_error", worst);
    report.int("points", inside.len());
    write_grid_csv(&args.common.out, &["re_f", "im_f", "abs_error"], &rows)?;
    report.write(&args.common.report_path())?;
    Ok(())
}

fn helmholtz_check(args: &HelmholtzArgs) -> Result<(), CliError> {
    let p = HelmholtzParameter::new(args.sigma)?;
    let domain = domain_of(args.domain, args.a, args.b)?;
    if args.t0.norm() == 0.0 || !(args.t0.re.is_finite() && args.t0.im.is_finite()) {
        return Err(CliError::Usage("t0 must be finite and nonzero".into()));
    }
    if args.points == 0 {
        return Err(CliError::Usage("points must be positive".into()));
    }
    let (t0, sigma) = (args.t0, p.sigma);
    let mode = move |z: Complex64| (-Complex64::i() * t0 * z + Complex64::i() * sigma * z.conj() / t0).exp();
    let r = 0.4 * domain.distance_to_boundary(Complex64::new(0.0, 0.0));
    let probes: Vec<Complex64> = (0..args.points)
        .map(|k| Complex64::from_polar(r, 0.3 + TAU * k as f64 / args.points as f64))
        .collect();
    let data_at = |z: Complex64| -> convex_utm::Result<_> {
        let (d1, d2) = (domain.clone(), domain.clone());
        HelmholtzBoundaryData::new(
            move |th: f64| mode(d1.position(th)),
            move |th: f64| -Complex64::i() * t0 * mode(d2.position(th)),
            domain.clone(),
            inscribe_trapezoid(&domain, z)?,
        )
    };
    let results: Vec<(Complex64, Complex64)> = probes
        .par_iter()
        .map(|&z| {
            let data = data_at(z)?;
            Ok((helmholtz_reconstruct(&data, &p, z)?, greens_identity_eval(&data, &p, z)?))
        })
        .collect::<Result<_, convex_utm::Error>>()?;
    let data = data_at(Complex64::new(0.0, 0.0))?;
    let mut gr = 0.0f64;
    for k in 0..20 {
        let t = Complex64::from_polar(0.4 + 0.1 * k as f64, 0.9 * k as f64);
        gr = gr.max(helmholtz_global_residual(&data, &p, t)?.norm());
    }
    let mut oracle = 0.0f64;
    let mut green = 0.0f64;
    let rows: Vec<GridRow> = probes
        .iter()
        .zip(&results)
        .map(|(&z, &(v, g))| {
            let e = mode(z);
            oracle = oracle.max((v - e).norm());
            green = green.max((v - g).norm());
            GridRow { x: z.re, y: z.im, values: Some(vec![v.re, v.im, e.re, e.im]) }
        })
        .collect();
    let mut report = Report::default();
    report.real("global_relation_residual_max", gr);
    report.real("oracle_max_error", oracle);
    report.real("greens_identity_max_difference", green);
    write_grid_csv(&args.common.out, &["re_phi", "im_phi", "re_exact", "im_exact"], &rows)?;
    report.write(&args.common.report_path())?;
    Ok(())
}
