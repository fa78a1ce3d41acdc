//! Point vortex inside an ellipse.
//!
//! The complex potential is split as h = f_s + f with the singular part
//! f_s(ζ) = (Γ/2πi) log(ζ − ζ₀). On the boundary ζ(θ) = a cos θ + i b sin θ
//! the correction has the trace
//!   f(ζ(θ)) = Σ_{n=1}^N (a_n e^{inθ} + ā_n e^{−inθ}) − i Im f_s(ζ(θ)),
//! so Im h = 0 there; the a_n are fitted to the global relation.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::BoundaryCurve;
use crate::laplace::reconstruct_points;
use crate::lsq::solve_row_scaled;
use crate::mixed_bvp::{collocation_points, RANK_TOLERANCE};
use crate::quadrature::{periodic_trapezoid_vec, Quadrature};
use crate::special::{elliptic_k, jacobi_complex, modulus_from_nome};

const PERIODIC_MAX_NODES: usize = 1 << 16;

/// f_s(ζ) = (Γ/2πi) log(ζ − ζ₀), principal branch with the cut along
/// ζ − ζ₀ ∈ (−∞, 0].
pub fn singular_potential(zeta: Complex64, zeta0: Complex64, gamma: f64) -> Result<Complex64> {
    let d = zeta - zeta0;
    if d.norm() == 0.0 {
        return Err(Error::SingularPoint);
    }
    Ok(d.ln() * gamma / (Complex64::i() * TAU))
}

/// Im f_s(ζ) = −(Γ/2π) ln|ζ − ζ₀|.
fn im_singular(zeta: Complex64, zeta0: Complex64, gamma: f64) -> f64 {
    -gamma / TAU * (zeta - zeta0).norm().ln()
}

/// Vortex configuration and collocation controls.
#[derive(Clone, Debug)]
pub struct VortexProblem {
    pub a: f64,
    pub b: f64,
    pub zeta0: Complex64,
    pub gamma: f64,
    pub n: usize,
    pub rings: usize,
    pub thetas_per_ring: usize,
}

impl VortexProblem {
    pub fn new(a: f64, b: f64, zeta0: Complex64, gamma: f64) -> Self {
        VortexProblem {
            a,
            b,
            zeta0,
            gamma,
            n: 16,
            rings: crate::mixed_bvp::DEFAULT_RINGS,
            thetas_per_ring: crate::mixed_bvp::DEFAULT_THETAS_PER_RING,
        }
    }

    pub fn with_truncation(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_collocation(mut self, rings: usize, thetas_per_ring: usize) -> Self {
        self.rings = rings;
        self.thetas_per_ring = thetas_per_ring;
        self
    }

    pub fn domain(&self) -> Result<BoundaryCurve> {
        BoundaryCurve::ellipse(self.a, self.b)
    }

    pub fn validate(&self) -> Result<()> {
        self.domain()?;
        let r = (self.zeta0.re / self.a).powi(2) + (self.zeta0.im / self.b).powi(2);
        if !(r < 1.0) {
            return Err(Error::InvalidParameter("vortex must lie strictly inside the ellipse"));
        }
        if !self.gamma.is_finite() {
            return Err(Error::InvalidParameter("circulation must be finite"));
        }
        if self.n == 0 {
            return Err(Error::InvalidParameter("truncation N must be at least 1"));
        }
        if self.rings == 0 || self.thetas_per_ring == 0 {
            return Err(Error::InvalidParameter("rings and thetas per ring must be positive"));
        }
        if 2 * (1 + self.rings * self.thetas_per_ring) < 2 * self.n {
            return Err(Error::InvalidParameter("too few collocation points for N"));
        }
        Ok(())
    }

    fn zeta(&self, th: f64) -> Complex64 {
        Complex64::new(self.a * th.cos(), self.b * th.sin())
    }

    fn dzeta(&self, th: f64) -> Complex64 {
        Complex64::new(-self.a * th.sin(), self.b * th.cos())
    }
}

/// P(n, t) = ∫₀^{2π} e^{inθ} e^{−itζ} ζ′ dθ.
pub fn vortex_block_p(n: i32, t: Complex64, a: f64, b: f64) -> Result<Complex64> {
    let p = VortexProblem::new(a, b, Complex64::new(0.0, 0.0), 0.0);
    p.domain()?;
    let v = periodic_trapezoid_vec(
        |th, out| out[0] = Complex64::from_polar(1.0, n as f64 * th) * (-Complex64::i() * t * p.zeta(th)).exp() * p.dzeta(th),
        1,
        1e-14,
        1e-15,
        PERIODIC_MAX_NODES,
    )?;
    Ok(v[0])
}

/// R(t) = i∫₀^{2π} Im f_s(ζ) e^{−itζ} ζ′ dθ.
pub fn vortex_rhs_r(t: Complex64, problem: &VortexProblem) -> Result<Complex64> {
    problem.validate()?;
    let p = problem;
    let v = periodic_trapezoid_vec(
        |th, out| {
            let z = p.zeta(th);
            out[0] = (-Complex64::i() * t * z).exp() * p.dzeta(th) * im_singular(z, p.zeta0, p.gamma);
        },
        1,
        1e-14,
        1e-15,
        PERIODIC_MAX_NODES,
    )?;
    Ok(Complex64::i() * v[0])
}

/// Solved correction coefficients a₀..a_N (a₀ = 0).
#[derive(Clone, Debug)]
pub struct VortexSolution {
    pub coefficients: Vec<Complex64>,
    pub problem: VortexProblem,
    pub residual_lsq: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

/// Fits a₁..a_N by least squares; the real constant a₀ is pinned to 0.
pub fn solve_vortex(problem: &VortexProblem) -> Result<VortexSolution> {
    problem.validate()?;
    let p = problem;
    let n = p.n;
    let ts = collocation_points(&p.domain()?, p.rings, p.thetas_per_ring)?;
    let cols = 2 * n;
    let mut matrix = Vec::with_capacity(2 * ts.len() * cols);
    let mut rhs = Vec::with_capacity(2 * ts.len());
    // out[k] = ∫ e^{i(k−N)θ} e^{−itζ} ζ′ dθ for k = 0..2N, out[2N+1] = R(t)/i.
    let dim = 2 * n + 2;
    for &t in &ts {
        let v = periodic_trapezoid_vec(
            |th, out| {
                let z = p.zeta(th);
                let base = (-Complex64::i() * t * z).exp() * p.dzeta(th);
                let step = Complex64::from_polar(1.0, th);
                let mut e = base * Complex64::from_polar(1.0, -(n as f64) * th);
                for o in out.iter_mut().take(2 * n + 1) {
                    *o = e;
                    e *= step;
                }
                out[2 * n + 1] = base * im_singular(z, p.zeta0, p.gamma);
            },
            dim,
            1e-14,
            1e-300,
            PERIODIC_MAX_NODES,
        )?;
        let mut re = Vec::with_capacity(cols);
        let mut im = Vec::with_capacity(cols);
        for k in 1..=n {
            let (pp, pm) = (v[n + k], v[n - k]);
            let x = pp + pm;
            let y = Complex64::i() * (pp - pm);
            re.extend_from_slice(&[x.re, y.re]);
            im.extend_from_slice(&[x.im, y.im]);
        }
        let r = Complex64::i() * v[2 * n + 1];
        matrix.extend_from_slice(&re);
        matrix.extend_from_slice(&im);
        rhs.push(r.re);
        rhs.push(r.im);
    }
    let rows = rhs.len();
    if p.gamma == 0.0 {
        return Ok(VortexSolution {
            coefficients: vec![Complex64::new(0.0, 0.0); n + 1],
            problem: p.clone(),
            residual_lsq: 0.0,
            sigma_min: f64::NAN,
            sigma_max: f64::NAN,
        });
    }
    let ls = solve_row_scaled(rows, cols, &matrix, &rhs, RANK_TOLERANCE)?;
    let mut coefficients = vec![Complex64::new(0.0, 0.0)];
    for k in 0..n {
        coefficients.push(Complex64::new(ls.solution[2 * k], ls.solution[2 * k + 1]));
    }
    Ok(VortexSolution {
        coefficients,
        problem: p.clone(),
        residual_lsq: ls.residual,
        sigma_min: ls.sigma_min,
        sigma_max: ls.sigma_max,
    })
}

impl VortexSolution {
    /// Boundary trace of the correction f at parameter θ.
    pub fn correction_trace(&self, th: f64) -> Complex64 {
        let p = &self.problem;
        let mut s = 2.0 * self.coefficients[0].re;
        for (k, a) in self.coefficients.iter().enumerate().skip(1) {
            s += 2.0 * (a * Complex64::from_polar(1.0, k as f64 * th)).re;
        }
        Complex64::new(s, -im_singular(p.zeta(th), p.zeta0, p.gamma))
    }

    /// h = f_s + f on the boundary at parameter θ.
    pub fn boundary_potential(&self, th: f64) -> Result<Complex64> {
        let p = &self.problem;
        Ok(singular_potential(p.zeta(th), p.zeta0, p.gamma)? + self.correction_trace(th))
    }

    /// max |a_N| / max_n |a_n|.
    pub fn coefficient_decay(&self) -> f64 {
        let max = self.coefficients.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            0.0
        } else {
            self.coefficients.last().map_or(0.0, |v| v.norm()) / max
        }
    }

    /// ∮ f e^{−itζ} dζ for the solved trace.
    pub fn global_relation(&self, t: Complex64) -> Result<Complex64> {
        let p = &self.problem;
        let v = periodic_trapezoid_vec(
            |th, out| out[0] = self.correction_trace(th) * (-Complex64::i() * t * p.zeta(th)).exp() * p.dzeta(th),
            1,
            1e-14,
            1e-15,
            PERIODIC_MAX_NODES,
        )?;
        Ok(v[0])
    }

    fn check_points(&self, zs: &[Complex64]) -> Result<BoundaryCurve> {
        let p = &self.problem;
        let domain = p.domain()?;
        for &z in zs {
            if z == p.zeta0 {
                return Err(Error::SingularPoint);
            }
            let d = domain.distance_to_boundary(z);
            if !domain.contains(z) || d < 1e-3 * domain.diameter() {
                return Err(Error::PointNotInterior { re: z.re, im: z.im, distance: d });
            }
        }
        Ok(domain)
    }

    /// h(z) at interior points.
    pub fn complex_potential_many(&self, zs: &[Complex64], quad: &Quadrature) -> Result<Vec<Complex64>> {
        let domain = self.check_points(zs)?;
        let me = self.clone();
        let f = reconstruct_points(move |th| me.correction_trace(th), &domain, quad, &[], zs, false)?;
        let p = &self.problem;
        zs.iter()
            .zip(f)
            .map(|(&z, fz)| Ok(singular_potential(z, p.zeta0, p.gamma)? + fz))
            .collect()
    }

    /// dh/dz = u − iv at interior points.
    pub fn complex_velocity_many(&self, zs: &[Complex64], quad: &Quadrature) -> Result<Vec<Complex64>> {
        let domain = self.check_points(zs)?;
        let me = self.clone();
        let df = reconstruct_points(move |th| me.correction_trace(th), &domain, quad, &[], zs, true)?;
        let p = &self.problem;
        Ok(zs
            .iter()
            .zip(df)
            .map(|(&z, d)| p.gamma / (Complex64::i() * TAU * (z - p.zeta0)) + d)
            .collect())
    }
}

/// h(z) = f_s(z) + f(z).
pub fn complex_potential(sol: &VortexSolution, z: Complex64) -> Result<Complex64> {
    Ok(sol.complex_potential_many(&[z], &Quadrature::default())?[0])
}

/// dh/dz at z.
pub fn complex_velocity(sol: &VortexSolution, z: Complex64) -> Result<Complex64> {
    Ok(sol.complex_velocity_many(&[z], &Quadrature::default())?[0])
}

/// One lattice node of a streamfunction grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridNode {
    pub x: f64,
    pub y: f64,
    /// ψ = Im h, or None outside the evaluation region.
    pub psi: Option<f64>,
}

/// Lattice nodes of an nx × ny grid over [−a, a] × [−b, b] with the
/// evaluation mask: inside the ellipse by at least 1e−3·diameter and at
/// least 0.05·b away from the vortex.
pub fn grid_nodes(problem: &VortexProblem, nx: usize, ny: usize) -> Result<Vec<(Complex64, bool)>> {
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidParameter("grid needs at least 2 x 2 nodes"));
    }
    let domain = problem.domain()?;
    let margin = 1e-3 * domain.diameter();
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = -problem.b + 2.0 * problem.b * j as f64 / (ny - 1) as f64;
        for i in 0..nx {
            let x = -problem.a + 2.0 * problem.a * i as f64 / (nx - 1) as f64;
            let z = Complex64::new(x, y);
            let keep = domain.contains(z)
                && domain.distance_to_boundary(z) >= margin
                && (z - problem.zeta0).norm() >= 0.05 * problem.b;
            out.push((z, keep));
        }
    }
    Ok(out)
}

/// ψ = Im h over an nx × ny lattice (row-major, y outer).
pub fn streamfunction_grid(sol: &VortexSolution, nx: usize, ny: usize) -> Result<Vec<GridNode>> {
    let nodes = grid_nodes(&sol.problem, nx, ny)?;
    let inside: Vec<Complex64> = nodes.iter().filter(|(_, k)| *k).map(|(z, _)| *z).collect();
    let values = if sol.problem.gamma == 0.0 {
        vec![Complex64::new(0.0, 0.0); inside.len()]
    } else {
        sol.complex_potential_many(&inside, &Quadrature::default())?
    };
    let mut it = values.into_iter();
    Ok(nodes
        .into_iter()
        .map(|(z, keep)| GridNode { x: z.re, y: z.im, psi: if keep { it.next().map(|h| h.im) } else { None } })
        .collect())
}

/// Exact conformal map Φ of the ellipse (a > b) onto the unit disc:
/// Φ(ζ) = √k sn((2K/π) arcsin(ζ/c), k), c² = a² − b², with modulus k of
/// nome q = ((a − b)/(a + b))².
#[derive(Clone, Copy, Debug)]
pub struct ConformalMap {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub k: f64,
    pub big_k: f64,
}

impl ConformalMap {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > b && b > 0.0 && a.is_finite()) {
            return Err(Error::OracleDomain);
        }
        let q = ((a - b) / (a + b)).powi(2);
        let k = modulus_from_nome(q);
        Ok(ConformalMap { a, b, c: (a * a - b * b).sqrt(), k, big_k: elliptic_k(k) })
    }

    fn argument(&self, z: Complex64) -> Complex64 {
        (z / self.c).asin() * (2.0 * self.big_k / PI)
    }

    pub fn map(&self, z: Complex64) -> Complex64 {
        jacobi_complex(self.argument(z), self.k).sn * self.k.sqrt()
    }

    /// Φ′(ζ) = √k cn dn · (2K/π) / √(c² − ζ²).
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let j = jacobi_complex(self.argument(z), self.k);
        let du = (2.0 * self.big_k / PI) / (Complex64::new(self.c * self.c, 0.0) - z * z).sqrt();
        j.cn * j.dn * du * self.k.sqrt()
    }
}

/// Exact potential H(ζ) = (Γ/2πi) log((w − w₀)/(w − 1/w̄₀)), w = Φ(ζ).
#[derive(Clone, Copy, Debug)]
pub struct ExactVortex {
    pub map: ConformalMap,
    pub w0: Complex64,
    pub gamma: f64,
}

impl ExactVortex {
    pub fn new(problem: &VortexProblem) -> Result<Self> {
        problem.validate()?;
        let map = ConformalMap::new(problem.a, problem.b)?;
        Ok(ExactVortex { map, w0: map.map(problem.zeta0), gamma: problem.gamma })
    }

    fn image(&self) -> Complex64 {
        if self.w0.norm() == 0.0 {
            Complex64::new(f64::INFINITY, 0.0)
        } else {
            self.w0.conj().inv()
        }
    }

    pub fn potential(&self, z: Complex64) -> Complex64 {
        let w = self.map.map(z);
        let ratio = if self.w0.norm() == 0.0 { w } else { (w - self.w0) / (w - self.image()) };
        ratio.ln() * self.gamma / (Complex64::i() * TAU)
    }

    /// dH/dζ.
    pub fn velocity(&self, z: Complex64) -> Complex64 {
        let w = self.map.map(z);
        let dw = self.map.derivative(z);
        let g = if self.w0.norm() == 0.0 {
            w.inv()
        } else {
            (w - self.w0).inv() - (w - self.image()).inv()
        };
        g * dw * self.gamma / (Complex64::i() * TAU)
    }
}

/// H(z) for the problem's configuration.
pub fn exact_oracle(z: Complex64, problem: &VortexProblem) -> Result<Complex64> {
    Ok(ExactVortex::new(problem)?.potential(z))
}

/// 25 interior probes on a 5 × 5 lattice spanning 60% of each semi-axis;
/// probes within 0.1·b of the vortex are moved up by 0.15·b.
pub fn velocity_probes(problem: &VortexProblem) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(25);
    for j in 0..5 {
        for i in 0..5 {
            let u = -1.0 + 0.5 * i as f64;
            let v = -1.0 + 0.5 * j as f64;
            let mut z = Complex64::new(0.6 * problem.a * u, 0.6 * problem.b * v);
            if (z - problem.zeta0).norm() < 0.1 * problem.b {
                z += Complex64::new(0.0, 0.15 * problem.b);
            }
            out.push(z);
        }
    }
    out
}

/// Largest |dh/dz − dH/dz| over the probes.
pub fn velocity_error(sol: &VortexSolution, probes: &[Complex64], quad: &Quadrature) -> Result<f64> {
    let exact = ExactVortex::new(&sol.problem)?;
    let v = sol.complex_velocity_many(probes, quad)?;
    Ok(probes
        .iter()
        .zip(v)
        .map(|(&z, w)| (w - exact.velocity(z)).norm())
        .fold(0.0, f64::max))
}

/// Largest |Im h| over `samples` equispaced boundary parameters.
pub fn impermeability_error(sol: &VortexSolution, samples: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for k in 0..samples {
        let h = sol.boundary_potential(TAU * k as f64 / samples as f64)?;
        worst = worst.max(h.im.abs());
    }
    Ok(worst)
}
