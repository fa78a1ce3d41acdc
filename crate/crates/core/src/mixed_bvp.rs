//! Mixed Dirichlet problems on the unit disc and on ellipses.
//!
//! The boundary is split at the polar angles ±π/2 into
//! C₁ = (−π/2, π/2), where Re f = ρ(θ)^m cos mθ is prescribed, and
//! C₂ = (π/2, 3π/2), where Im f = −ρ(θ)^m sin mθ is prescribed. The unknown
//! halves are expanded as
//!   Im f = a₀ + Σ (a_n e^{2inθ} + ā_n e^{−2inθ})   on C₁,
//!   Re f = b₀ + Σ (b_n e^{2inθ} + b̄_n e^{−2inθ})   on C₂,
//! and the coefficients are fitted by least squares to the global relation
//! ∮ f e^{−itζ} dζ = 0 collocated at t on concentric rings.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryCurve, CurveKind};
use crate::laplace::reconstruct_points;
use crate::lsq::solve_row_scaled;
use crate::quadrature::Quadrature;

pub const DEFAULT_RINGS: usize = 32;
pub const DEFAULT_THETAS_PER_RING: usize = 64;
pub const RANK_TOLERANCE: f64 = 1e-12;

const C1: (f64, f64) = (-FRAC_PI_2, FRAC_PI_2);
const C2: (f64, f64) = (FRAC_PI_2, 1.5 * PI);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Semi-axes of a disc or ellipse.
pub(crate) fn semi_axes(domain: &BoundaryCurve) -> Result<(f64, f64)> {
    match *domain.kind() {
        CurveKind::UnitCircle => Ok((1.0, 1.0)),
        CurveKind::Ellipse { a, b } => Ok((a, b)),
        CurveKind::GeneralConvex(_) => {
            Err(Error::InvalidParameter("mixed problems need a disc or an ellipse"))
        }
    }
}

/// Polar parametrization ζ(θ) = ρ(θ)e^{iθ} of the ellipse and ζ′(θ).
#[derive(Clone, Copy, Debug)]
struct Polar {
    a: f64,
    b: f64,
}

impl Polar {
    fn rho(&self, th: f64) -> f64 {
        let (s, co) = th.sin_cos();
        self.a * self.b / ((self.b * co).powi(2) + (self.a * s).powi(2)).sqrt()
    }

    fn zeta(&self, th: f64) -> Complex64 {
        Complex64::from_polar(self.rho(th), th)
    }

    fn dzeta(&self, th: f64) -> Complex64 {
        let (s, co) = th.sin_cos();
        let (a, b) = (self.a, self.b);
        let q = (b * co).powi(2) + (a * s).powi(2);
        let rho = a * b / q.sqrt();
        let drho = -a * b * (a * a - b * b) * s * co / (q * q.sqrt());
        c(drho, rho) * Complex64::from_polar(1.0, th)
    }
}

fn arc_width(t: Complex64, p: &Polar) -> f64 {
    let speed = p.a.max(p.b) * p.a.max(p.b) / p.a.min(p.b);
    let tn = t.norm();
    if tn > 0.0 {
        (3.0 * TAU / (tn * speed)).min(FRAC_PI_2)
    } else {
        FRAC_PI_2
    }
}

fn half_arc_integral<G: Fn(f64) -> Complex64>(g: G, arc: (f64, f64), t: Complex64, p: &Polar) -> Result<Complex64> {
    let q = Quadrature::default();
    Ok(q.integrate_arc_with(g, arc.0, arc.1, &[], arc_width(t, p), q.config().abs_tol)?.value)
}

/// 𝒜(n, t) = i∫_{C₁} e^{−itζ} e^{inθ} ζ′ dθ on the ellipse (a, b).
pub fn ellipse_block_a(n: i32, t: Complex64, a: f64, b: f64) -> Result<Complex64> {
    let p = polar(a, b)?;
    let v = half_arc_integral(
        |th| (-Complex64::i() * t * p.zeta(th)).exp() * Complex64::from_polar(1.0, n as f64 * th) * p.dzeta(th),
        C1,
        t,
        &p,
    )?;
    Ok(Complex64::i() * v)
}

/// ℬ(n, t) = ∫_{C₂} e^{−itζ} e^{inθ} ζ′ dθ on the ellipse (a, b).
pub fn ellipse_block_b(n: i32, t: Complex64, a: f64, b: f64) -> Result<Complex64> {
    let p = polar(a, b)?;
    half_arc_integral(
        |th| (-Complex64::i() * t * p.zeta(th)).exp() * Complex64::from_polar(1.0, n as f64 * th) * p.dzeta(th),
        C2,
        t,
        &p,
    )
}

/// r(t) = −∫_{C₁} ρ^m cos mθ e^{−itζ} ζ′ dθ + i∫_{C₂} ρ^m sin mθ e^{−itζ} ζ′ dθ.
pub fn ellipse_rhs(m: u32, t: Complex64, a: f64, b: f64) -> Result<Complex64> {
    let p = polar(a, b)?;
    let mf = m as f64;
    let k = |th: f64| (-Complex64::i() * t * p.zeta(th)).exp() * p.dzeta(th) * p.rho(th).powi(m as i32);
    let r1 = half_arc_integral(|th| k(th) * (mf * th).cos(), C1, t, &p)?;
    let r2 = half_arc_integral(|th| k(th) * (mf * th).sin(), C2, t, &p)?;
    Ok(-r1 + Complex64::i() * r2)
}

/// 𝒜(n, t) = −∫_{C₁} e^{−ite^{iθ}} e^{i(n+1)θ} dθ.
pub fn disc_block_a(n: i32, t: Complex64) -> Result<Complex64> {
    ellipse_block_a(n, t, 1.0, 1.0)
}

/// ℬ(n, t) = i∫_{C₂} e^{−ite^{iθ}} e^{i(n+1)θ} dθ.
pub fn disc_block_b(n: i32, t: Complex64) -> Result<Complex64> {
    ellipse_block_b(n, t, 1.0, 1.0)
}

/// r(t) for the disc.
pub fn disc_rhs(m: u32, t: Complex64) -> Result<Complex64> {
    ellipse_rhs(m, t, 1.0, 1.0)
}

fn polar(a: f64, b: f64) -> Result<Polar> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter("ellipse semi-axes must be positive"));
    }
    Ok(Polar { a, b })
}

/// The origin and the rings t = −j/ζ′(θ_s), j = 1..rings, with
/// ζ(θ) = a cos θ + i b sin θ and θ_s equispaced.
pub fn collocation_points(domain: &BoundaryCurve, rings: usize, thetas_per_ring: usize) -> Result<Vec<Complex64>> {
    if rings == 0 || thetas_per_ring == 0 {
        return Err(Error::InvalidParameter("rings and thetas per ring must be positive"));
    }
    semi_axes(domain)?;
    let mut ts = Vec::with_capacity(1 + rings * thetas_per_ring);
    ts.push(c(0.0, 0.0));
    for j in 1..=rings {
        for s in 0..thetas_per_ring {
            let th = TAU * s as f64 / thetas_per_ring as f64;
            ts.push(-(j as f64) / domain.derivative(th));
        }
    }
    Ok(ts)
}

/// Mixed problem with data of mode m.
#[derive(Clone, Debug)]
pub struct MixedBvpProblem {
    pub domain: BoundaryCurve,
    pub m: u32,
    pub n: usize,
    pub rings: usize,
    pub thetas_per_ring: usize,
}

impl MixedBvpProblem {
    /// Problem with default collocation controls.
    pub fn new(domain: BoundaryCurve, m: u32, n: usize) -> Self {
        MixedBvpProblem { domain, m, n, rings: DEFAULT_RINGS, thetas_per_ring: DEFAULT_THETAS_PER_RING }
    }

    pub fn disc(m: u32, n: usize) -> Self {
        Self::new(BoundaryCurve::unit_circle(), m, n)
    }

    pub fn ellipse(a: f64, b: f64, m: u32, n: usize) -> Result<Self> {
        Ok(Self::new(BoundaryCurve::ellipse(a, b)?, m, n))
    }

    pub fn with_collocation(mut self, rings: usize, thetas_per_ring: usize) -> Self {
        self.rings = rings;
        self.thetas_per_ring = thetas_per_ring;
        self
    }

    /// Number of real unknowns: a₀, b₀ and the real and imaginary parts of
    /// a_n, b_n for n = 1..N.
    pub fn unknowns(&self) -> usize {
        4 * self.n + 2
    }

    pub fn validate(&self) -> Result<()> {
        semi_axes(&self.domain)?;
        if self.n == 0 {
            return Err(Error::InvalidParameter("truncation N must be at least 1"));
        }
        if self.rings == 0 || self.thetas_per_ring == 0 {
            return Err(Error::InvalidParameter("rings and thetas per ring must be positive"));
        }
        let rows = 2 * (1 + self.rings * self.thetas_per_ring);
        if rows < 2 * (2 * self.n + 2) {
            return Err(Error::InvalidParameter("too few collocation points for N"));
        }
        Ok(())
    }
}

/// One global-relation row: coefficients of (u, ū) for each unknown
/// u ∈ [a₀..a_N, b₀..b_N] and the right-hand side.
#[derive(Clone, Debug)]
pub struct CollocationRow {
    pub t: Complex64,
    pub pairs: Vec<(Complex64, Complex64)>,
    pub rhs: Complex64,
}

impl CollocationRow {
    /// The complex-conjugate equation, with the roles of u and ū swapped.
    pub fn companion(&self) -> CollocationRow {
        CollocationRow {
            t: self.t,
            pairs: self.pairs.iter().map(|&(p, q)| (q.conj(), p.conj())).collect(),
            rhs: self.rhs.conj(),
        }
    }

    /// Two real equations in the unknowns x₀, (Re u_n, Im u_n), …
    pub fn realify(&self, n: usize) -> [(Vec<f64>, f64); 2] {
        let mut re = Vec::with_capacity(4 * n + 2);
        let mut im = Vec::with_capacity(4 * n + 2);
        for (idx, &(p, q)) in self.pairs.iter().enumerate() {
            let x = p + q;
            re.push(x.re);
            im.push(x.im);
            if idx % (n + 1) != 0 {
                let y = Complex64::i() * (p - q);
                re.push(y.re);
                im.push(y.im);
            }
        }
        [(re, self.rhs.re), (im, self.rhs.im)]
    }
}

/// Assembled real least-squares system.
#[derive(Clone, Debug)]
pub struct CollocationSystem {
    pub rows: Vec<CollocationRow>,
    pub n_rows: usize,
    pub n_cols: usize,
    /// Row-major real matrix, two rows per collocation point.
    pub matrix: Vec<f64>,
    pub rhs: Vec<f64>,
}

/// Global-relation row at t: all blocks for one t in two vector integrals.
pub fn collocation_row(problem: &MixedBvpProblem, t: Complex64) -> Result<CollocationRow> {
    let (a, b) = semi_axes(&problem.domain)?;
    let p = Polar { a, b };
    let n = problem.n;
    let m = problem.m as i32;
    let mf = m as f64;
    let dim = 2 * n + 2;
    let q = Quadrature::default();
    // out[k] = ∫ e^{−itζ} e^{2i(k−N)θ} ζ′ dθ for k = 0..2N, out[2N+1] = data part.
    let fill = |th: f64, out: &mut [Complex64], data: &dyn Fn(f64) -> f64| {
        let base = (-Complex64::i() * t * p.zeta(th)).exp() * p.dzeta(th);
        let step = Complex64::from_polar(1.0, 2.0 * th);
        let mut e = base * Complex64::from_polar(1.0, -2.0 * n as f64 * th);
        for v in out.iter_mut().take(2 * n + 1) {
            *v = e;
            e *= step;
        }
        out[2 * n + 1] = base * p.rho(th).powi(m) * data(th);
    };
    let width = arc_width(t, &p);
    let i1 = q.integrate_arc_vec(|th, out| fill(th, out, &|x| (mf * x).cos()), dim, C1.0, C1.1, &[], width)?;
    let i2 = q.integrate_arc_vec(|th, out| fill(th, out, &|x| (mf * x).sin()), dim, C2.0, C2.1, &[], width)?;
    let block_a = |k: i64| Complex64::i() * i1[(k + n as i64) as usize];
    let block_b = |k: i64| i2[(k + n as i64) as usize];
    let mut pairs = Vec::with_capacity(2 * n + 2);
    pairs.push((block_a(0), c(0.0, 0.0)));
    for k in 1..=n as i64 {
        pairs.push((block_a(k), block_a(-k)));
    }
    pairs.push((block_b(0), c(0.0, 0.0)));
    for k in 1..=n as i64 {
        pairs.push((block_b(k), block_b(-k)));
    }
    let rhs = -i1[2 * n + 1] + Complex64::i() * i2[2 * n + 1];
    Ok(CollocationRow { t, pairs, rhs })
}

/// Builds the real overdetermined system for all collocation points.
pub fn assemble(problem: &MixedBvpProblem) -> Result<CollocationSystem> {
    problem.validate()?;
    let ts = collocation_points(&problem.domain, problem.rings, problem.thetas_per_ring)?;
    let mut rows = Vec::with_capacity(ts.len());
    for &t in &ts {
        rows.push(collocation_row(problem, t)?);
    }
    Ok(realify_rows(rows, problem.n))
}

/// Packs complex rows into the real system.
pub fn realify_rows(rows: Vec<CollocationRow>, n: usize) -> CollocationSystem {
    let n_cols = 4 * n + 2;
    let mut matrix = Vec::with_capacity(2 * rows.len() * n_cols);
    let mut rhs = Vec::with_capacity(2 * rows.len());
    for row in &rows {
        for (r, y) in row.realify(n) {
            matrix.extend_from_slice(&r);
            rhs.push(y);
        }
    }
    CollocationSystem { n_rows: rhs.len(), n_cols, rows, matrix, rhs }
}

/// Least-squares diagnostics of a solve.
#[derive(Clone, Copy, Debug)]
pub struct SolveReport {
    /// ‖Mx − y‖₂ of the row-scaled system.
    pub residual_lsq: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub rows: usize,
    pub cols: usize,
}

/// Solved boundary trace.
#[derive(Clone, Debug)]
pub struct FourierTrace {
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub m: u32,
    domain: BoundaryCurve,
}

/// Solves an assembled system.
pub fn solve_system(problem: &MixedBvpProblem, sys: &CollocationSystem) -> Result<(FourierTrace, SolveReport)> {
    let ls = solve_row_scaled(sys.n_rows, sys.n_cols, &sys.matrix, &sys.rhs, RANK_TOLERANCE)?;
    let n = problem.n;
    let x = &ls.solution;
    let unpack = |off: usize| {
        let mut v = vec![c(x[off], 0.0)];
        for k in 0..n {
            v.push(c(x[off + 1 + 2 * k], x[off + 2 + 2 * k]));
        }
        v
    };
    let trace = FourierTrace { a: unpack(0), b: unpack(2 * n + 1), m: problem.m, domain: problem.domain.clone() };
    let report = SolveReport {
        residual_lsq: ls.residual,
        sigma_min: ls.sigma_min,
        sigma_max: ls.sigma_max,
        rows: sys.n_rows,
        cols: sys.n_cols,
    };
    Ok((trace, report))
}

/// Assembles and solves the collocation system.
pub fn assemble_and_solve(problem: &MixedBvpProblem) -> Result<(FourierTrace, SolveReport)> {
    let sys = assemble(problem)?;
    solve_system(problem, &sys)
}

/// Wraps an angle into [−π/2, 3π/2).
fn wrap_polar(theta: f64) -> f64 {
    if (-FRAC_PI_2..1.5 * PI).contains(&theta) {
        return theta;
    }
    let r = theta + FRAC_PI_2;
    let r = r - TAU * (r / TAU).floor();
    if r >= TAU {
        -FRAC_PI_2
    } else {
        r - FRAC_PI_2
    }
}

impl FourierTrace {
    pub fn domain(&self) -> &BoundaryCurve {
        &self.domain
    }

    pub fn truncation(&self) -> usize {
        self.a.len() - 1
    }

    fn series(coeffs: &[Complex64], theta: f64) -> f64 {
        let mut s = coeffs[0].re;
        for (k, v) in coeffs.iter().enumerate().skip(1) {
            s += 2.0 * (v * Complex64::from_polar(1.0, 2.0 * k as f64 * theta)).re;
        }
        s
    }

    /// f at polar angle θ; θ = ±π/2 is taken from the C₁ branch.
    pub fn value(&self, theta: f64) -> Complex64 {
        let th = wrap_polar(theta);
        let (a, b) = semi_axes(&self.domain).unwrap_or((1.0, 1.0));
        let rm = Polar { a, b }.rho(th).powi(self.m as i32);
        let mf = self.m as f64;
        if th <= FRAC_PI_2 {
            c(rm * (mf * th).cos(), Self::series(&self.a, th))
        } else {
            c(Self::series(&self.b, th), -rm * (mf * th).sin())
        }
    }

    /// f at the domain's own boundary parameter (the eccentric angle for
    /// ellipses).
    pub fn value_at_parameter(&self, s: f64) -> Complex64 {
        let (a, b) = semi_axes(&self.domain).unwrap_or((1.0, 1.0));
        let (sn, cs) = s.sin_cos();
        self.value((b * sn).atan2(a * cs))
    }

    /// max(|a_N|, |b_N|) / max_n(|a_n|, |b_n|).
    pub fn coefficient_decay(&self) -> f64 {
        let n = self.truncation();
        let last = self.a[n].norm().max(self.b[n].norm());
        let max = self.a.iter().chain(&self.b).map(|v| v.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            0.0
        } else {
            last / max
        }
    }

    /// ∮ f e^{−itζ} dζ over the whole boundary.
    pub fn global_relation(&self, t: Complex64, quad: &Quadrature) -> Result<Complex64> {
        let (a, b) = semi_axes(&self.domain)?;
        let p = Polar { a, b };
        let width = arc_width(t, &p);
        let g = |th: f64| self.value(th) * (-Complex64::i() * t * p.zeta(th)).exp() * p.dzeta(th);
        let abs_tol = quad.config().abs_tol;
        let r1 = quad.integrate_arc_with(&g, C1.0, C1.1, &[], width, abs_tol)?.value;
        let r2 = quad.integrate_arc_with(&g, C2.0, C2.1, &[], width, abs_tol)?.value;
        Ok(r1 + r2)
    }

    /// Interior values by the transform pair.
    pub fn interior(&self, zs: &[Complex64], quad: &Quadrature) -> Result<Vec<Complex64>> {
        let me = self.clone();
        reconstruct_points(
            move |s| me.value_at_parameter(s),
            &self.domain,
            quad,
            &[-FRAC_PI_2, FRAC_PI_2],
            zs,
            false,
        )
    }
}

/// f(θ) of a solved trace.
pub fn trace_value(trace: &FourierTrace, theta: f64) -> Complex64 {
    trace.value(theta)
}

/// Solves the problem and evaluates the solution at an interior point.
pub fn solve_interior(problem: &MixedBvpProblem, z: Complex64) -> Result<Complex64> {
    semi_axes(&problem.domain)?;
    let d = problem.domain.distance_to_boundary(z);
    if !problem.domain.contains(z) || d < 1e-3 * problem.domain.diameter() {
        return Err(Error::PointNotInterior { re: z.re, im: z.im, distance: d });
    }
    let (trace, _) = assemble_and_solve(problem)?;
    Ok(trace.interior(&[z], &Quadrature::default())?[0])
}
