//! Transform pair for the complex Helmholtz equation Δφ = 4σφ.
//!
//! With the kernel K(t; d) = e^{itd − iσd̄/t}, d = z − ζ, the Green's function
//! is G = −(1/4π)∫_L K dt/t = −K₀(2√σ|d|)/(2π), the spectral functions are
//!   ρ_j(t) = ∫_{I_j} e^{−itζ + iσζ̄/t}[φ (iσ/t) dζ̄ + φ_z dζ],
//! and the reconstruction is
//!   φ(z) = (1/2πi) Σ_j ∫_{L_{β_j}} e^{itz − iσz̄/t} ρ_j(t) dt/t.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{ContourEnd, Error, Result};
use crate::geometry::{separation_margin, BoundaryCurve, Trapezoid};
use crate::quadrature::{Quadrature, QuadratureConfig, RayContour, Segment};
use crate::special::{bessel_k0, bessel_k1};

/// Drop arc pieces where the kernel is below e^{−WINDOW} of its peak.
const WINDOW: f64 = 40.0;
const WINDOW_SAMPLES: usize = 256;
/// Largest |2√σ d| evaluated by the Bessel series.
const SERIES_LIMIT: f64 = 8.0;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Angle reduced to [0, 2π).
fn turn(x: f64) -> f64 {
    let r = x % TAU;
    let r = if r < 0.0 { r + TAU } else { r };
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Spectral parameter σ with 0 < Arg σ < π.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HelmholtzParameter {
    pub sigma: Complex64,
    pub sqrt_sigma: Complex64,
}

impl HelmholtzParameter {
    pub fn new(sigma: Complex64) -> Result<Self> {
        let arg = sigma.arg();
        if !(sigma.re.is_finite() && sigma.im.is_finite()) || !(arg > 0.0 && arg < PI) {
            return Err(Error::InvalidParameter("sigma must satisfy 0 < Arg(sigma) < pi"));
        }
        Ok(HelmholtzParameter { sigma, sqrt_sigma: sigma.sqrt() })
    }

    pub fn arg(&self) -> f64 {
        self.sigma.arg()
    }
}

/// Ray–arc–ray contour L_χ^(σ): a segment from 0 at angle Arg σ − χ, an arc
/// of radius `radius` to angle −χ, then a ray at angle −χ.
#[derive(Clone, Debug, PartialEq)]
pub struct HelmholtzContour {
    pub sigma: Complex64,
    pub chi: f64,
    pub theta0: f64,
    pub theta_inf: f64,
    pub radius: f64,
    pub contour: RayContour,
}

impl HelmholtzContour {
    /// True when K(t; d) decays at both ends for arg d = `arg`.
    pub fn admits(&self, arg: f64) -> bool {
        let x = turn(arg - self.chi);
        x > 0.0 && x < PI
    }

    /// Copy of the contour carrying decay rates for a displacement whose
    /// distance from the sector's edge line is `margin`.
    fn rated(&self, margin: f64, frequency: f64) -> RayContour {
        let mut r = self.contour.clone();
        r.decay_estimate = margin;
        r.decay_at_origin = self.sigma.norm() * margin;
        r.frequency = frequency;
        r
    }
}

/// Contour with unit mid-radius.
pub fn make_contour(p: &HelmholtzParameter, chi: f64) -> Result<HelmholtzContour> {
    make_contour_with_radius(p, chi, 1.0)
}

/// Contour with an explicit mid-radius.
pub fn make_contour_with_radius(p: &HelmholtzParameter, chi: f64, radius: f64) -> Result<HelmholtzContour> {
    if !(0.0..TAU).contains(&chi) {
        return Err(Error::InvalidParameter("contour angle must lie in [0, 2pi)"));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter("contour radius must be positive"));
    }
    let theta0 = p.arg() - chi;
    let theta_inf = -chi;
    let start = Complex64::from_polar(radius, theta0);
    let contour = RayContour {
        segments: vec![
            Segment::Line { from: c(0.0, 0.0), to: start },
            Segment::Arc { radius, from_angle: theta0, to_angle: theta_inf },
            Segment::Ray { from: Complex64::from_polar(radius, theta_inf), angle: theta_inf },
        ],
        decay_estimate: 1.0,
        decay_at_origin: p.sigma.norm(),
        frequency: 0.0,
    };
    let hc = HelmholtzContour { sigma: p.sigma, chi, theta0, theta_inf, radius, contour };
    for frac in [0.05, 0.5, 0.95] {
        let d = Complex64::from_polar(1.0, chi + PI * frac);
        let near = Complex64::from_polar(1e-6, theta0);
        let origin = (-Complex64::i() * p.sigma * d.conj() / near).re;
        if !(origin < 0.0) {
            return Err(Error::DecayCheckFailed { end: ContourEnd::Origin, value: origin });
        }
        let far = Complex64::from_polar(1e6, theta_inf);
        let infinity = (Complex64::i() * far * d).re;
        if !(infinity < 0.0) {
            return Err(Error::DecayCheckFailed { end: ContourEnd::Infinity, value: infinity });
        }
    }
    Ok(hc)
}

fn outer_quadrature() -> Quadrature {
    Quadrature::new(QuadratureConfig { rel_tol: 1e-11, abs_tol: 1e-13, max_panels: 20_000, panel_order: 16 })
        .expect("valid quadrature config")
}

fn displacement(zeta: Complex64, z: Complex64, contour: &HelmholtzContour) -> Result<(Complex64, f64)> {
    let d = z - zeta;
    if d.norm() == 0.0 {
        return Err(Error::SingularPoint);
    }
    if !contour.admits(d.arg()) {
        return Err(Error::ArgumentOutOfSector { arg: d.arg(), chi: contour.chi });
    }
    let margin = (Complex64::from_polar(1.0, -contour.chi) * d).im;
    Ok((d, margin))
}

fn kernel_integral(
    zeta: Complex64,
    z: Complex64,
    p: &HelmholtzParameter,
    contour: &HelmholtzContour,
    dbar: bool,
) -> Result<Complex64> {
    if contour.sigma != p.sigma {
        return Err(Error::InvalidParameter("contour was built for a different sigma"));
    }
    let (d, margin) = displacement(zeta, z, contour)?;
    let rated = contour.rated(margin, d.norm() * (1.0 + p.sigma.norm()));
    let sigma = p.sigma;
    let h = |t: Complex64| {
        let k = (Complex64::i() * t * d - Complex64::i() * sigma * d.conj() / t).exp() / t;
        if dbar {
            k * Complex64::i() * sigma / t
        } else {
            k
        }
    };
    let r = outer_quadrature().integrate_ray_contour(h, &rated)?;
    Ok(-r.value / (2.0 * TAU))
}

/// G(ζ, z) by the contour integral −(1/4π)∫ e^{it(z−ζ) − iσ conj(z−ζ)/t} dt/t.
pub fn greens_function(
    zeta: Complex64,
    z: Complex64,
    p: &HelmholtzParameter,
    contour: &HelmholtzContour,
) -> Result<Complex64> {
    kernel_integral(zeta, z, p, contour, false)
}

/// ∂G/∂ζ̄ by the contour integral with the extra factor iσ/t.
pub fn greens_dbar(
    zeta: Complex64,
    z: Complex64,
    p: &HelmholtzParameter,
    contour: &HelmholtzContour,
) -> Result<Complex64> {
    kernel_integral(zeta, z, p, contour, true)
}

fn centred_contour(d: Complex64, p: &HelmholtzParameter) -> Result<HelmholtzContour> {
    make_contour(p, turn(d.arg() - PI / 2.0))
}

/// G = −K₀(2√σ|z − ζ|)/(2π); series for small arguments, contour otherwise.
pub fn greens_function_closed(zeta: Complex64, z: Complex64, p: &HelmholtzParameter) -> Result<Complex64> {
    let d = z - zeta;
    if d.norm() == 0.0 {
        return Err(Error::SingularPoint);
    }
    let x = p.sqrt_sigma * (2.0 * d.norm());
    if x.norm() <= SERIES_LIMIT {
        Ok(-bessel_k0(x) / TAU)
    } else {
        greens_function(zeta, z, p, &centred_contour(d, p)?)
    }
}

/// ∂G/∂ζ̄ = −(1/2π) K₁(2√σ|d|) √σ d/|d|, d = z − ζ.
pub fn greens_dbar_closed(zeta: Complex64, z: Complex64, p: &HelmholtzParameter) -> Result<Complex64> {
    let d = z - zeta;
    if d.norm() == 0.0 {
        return Err(Error::SingularPoint);
    }
    let x = p.sqrt_sigma * (2.0 * d.norm());
    if x.norm() <= SERIES_LIMIT {
        Ok(-bessel_k1(x) * p.sqrt_sigma * d / (d.norm() * TAU))
    } else {
        greens_dbar(zeta, z, p, &centred_contour(d, p)?)
    }
}

/// Traces of φ and ∂φ/∂z on ∂Ω with a trapezoid partitioning the boundary.
#[derive(Clone, Debug)]
pub struct HelmholtzBoundaryData<P, D> {
    pub phi: P,
    pub dphi_dz: D,
    pub domain: BoundaryCurve,
    pub trapezoid: Trapezoid,
}

impl<P: Fn(f64) -> Complex64, D: Fn(f64) -> Complex64> HelmholtzBoundaryData<P, D> {
    pub fn new(phi: P, dphi_dz: D, domain: BoundaryCurve, trapezoid: Trapezoid) -> Result<Self> {
        let scale = domain.diameter().max(1.0);
        for (v, &s) in trapezoid.vertices().iter().zip(trapezoid.vertex_params()) {
            if (domain.position(s) - v).norm() > 1e-12 * scale {
                return Err(Error::InvalidParameter("trapezoid does not belong to this domain"));
            }
        }
        Ok(HelmholtzBoundaryData { phi, dphi_dz, domain, trapezoid })
    }

    fn arc(&self, j: usize) -> Result<(f64, f64)> {
        if !(1..=4).contains(&j) {
            return Err(Error::InvalidIndex(j));
        }
        Ok(self.trapezoid.arcs()[j - 1])
    }

    fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut v = Vec::new();
        for &b in self.domain.breakpoints() {
            for shift in [-TAU, 0.0, TAU, 2.0 * TAU] {
                let x = b + shift;
                if x > lo && x < hi {
                    v.push(x);
                }
            }
        }
        v
    }

    /// ∫ over [lo, hi] of e^{E(θ)}[φ (iσ/t) conj ζ′ + φ_z ζ′] with
    /// E = it(z − ζ) − iσ conj(z − ζ)/t, windowed around the peak of Re E.
    fn folded_arc(&self, lo: f64, hi: f64, p: &HelmholtzParameter, t: Complex64, z: Complex64) -> Result<Complex64> {
        let sigma = p.sigma;
        let expo = |th: f64| {
            let d = z - self.domain.position(th);
            Complex64::i() * t * d - Complex64::i() * sigma * d.conj() / t
        };
        let n = WINDOW_SAMPLES;
        let h = (hi - lo) / n as f64;
        let re: Vec<f64> = (0..=n).map(|i| expo(lo + h * i as f64).re).collect();
        let peak = re.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(peak > -700.0) {
            return Ok(c(0.0, 0.0));
        }
        let keep: Vec<bool> = (0..=n)
            .map(|i| {
                let a = i.saturating_sub(1);
                let b = (i + 1).min(n);
                re[a..=b].iter().any(|&v| v >= peak - WINDOW)
            })
            .collect();
        let speed = self.domain.max_speed();
        let freq = speed * (t.norm() + sigma.norm() / t.norm());
        let width = (3.0 * TAU / freq).min(PI / 4.0);
        let quad = Quadrature::default();
        let abs_tol = (quad.config().abs_tol * peak.exp()).max(1e-18);
        let g = |th: f64| {
            let zeta_p = self.domain.derivative(th);
            let w = (self.phi)(th) * Complex64::i() * sigma / t * zeta_p.conj() + (self.dphi_dz)(th) * zeta_p;
            expo(th).exp() * w
        };
        let mut total = c(0.0, 0.0);
        let mut i = 0;
        while i < n {
            if !keep[i] && !keep[i + 1] {
                i += 1;
                continue;
            }
            let start = i;
            while i < n && (keep[i] || keep[i + 1]) {
                i += 1;
            }
            let (a, b) = (lo + h * start as f64, if i == n { hi } else { lo + h * i as f64 });
            let bps = self.breakpoints(a, b);
            total += quad.integrate_arc_with(g, a, b, &bps, width, abs_tol)?.value;
        }
        Ok(total)
    }
}

/// ρ_j(t) for arc I_j, j ∈ 1..=4.
pub fn helmholtz_spectral<P, D>(
    data: &HelmholtzBoundaryData<P, D>,
    p: &HelmholtzParameter,
    j: usize,
    t: Complex64,
) -> Result<Complex64>
where
    P: Fn(f64) -> Complex64,
    D: Fn(f64) -> Complex64,
{
    let (lo, hi) = data.arc(j)?;
    if t.norm() == 0.0 {
        return Err(Error::ZeroSpectralParameter);
    }
    let sigma = p.sigma;
    let speed = data.domain.max_speed();
    let width = (3.0 * TAU / (speed * (t.norm() + sigma.norm() / t.norm()))).min(PI / 4.0);
    let g = |th: f64| {
        let zeta = data.domain.position(th);
        let zp = data.domain.derivative(th);
        let e = (-Complex64::i() * t * zeta + Complex64::i() * sigma * zeta.conj() / t).exp();
        e * ((data.phi)(th) * Complex64::i() * sigma / t * zp.conj() + (data.dphi_dz)(th) * zp)
    };
    let quad = Quadrature::default();
    let bps = data.breakpoints(lo, hi);
    Ok(quad.integrate_arc_with(g, lo, hi, &bps, width, quad.config().abs_tol)?.value)
}

/// Σ_j ρ_j(t); vanishes for traces of Helmholtz solutions.
pub fn helmholtz_global_residual<P, D>(
    data: &HelmholtzBoundaryData<P, D>,
    p: &HelmholtzParameter,
    t: Complex64,
) -> Result<Complex64>
where
    P: Fn(f64) -> Complex64,
    D: Fn(f64) -> Complex64,
{
    let mut s = c(0.0, 0.0);
    for j in 1..=4 {
        s += helmholtz_spectral(data, p, j, t)?;
    }
    Ok(s)
}

/// φ(z) for z inside the data's trapezoid.
pub fn helmholtz_reconstruct<P, D>(data: &HelmholtzBoundaryData<P, D>, p: &HelmholtzParameter, z: Complex64) -> Result<Complex64>
where
    P: Fn(f64) -> Complex64,
    D: Fn(f64) -> Complex64,
{
    separation_margin(&data.trapezoid, &data.domain, z)?;
    let margins = data.trapezoid.side_margins(z);
    let quad = outer_quadrature();
    let freq = data.domain.diameter() * (1.0 + p.sigma.norm());
    let mut total = c(0.0, 0.0);
    for j in 0..4 {
        let chi = turn(data.trapezoid.betas()[j]);
        let contour = make_contour(p, chi)?;
        let rated = contour.rated(margins[j], freq);
        let (lo, hi) = data.trapezoid.arcs()[j];
        let mut err = None;
        let h = |t: Complex64| match data.folded_arc(lo, hi, p, t, z) {
            Ok(v) => v / t,
            Err(e) => {
                err.get_or_insert(e);
                c(0.0, 0.0)
            }
        };
        let r = quad.integrate_ray_contour(h, &rated)?;
        if let Some(e) = err {
            return Err(e);
        }
        total += r.value;
    }
    Ok(total / (Complex64::i() * TAU))
}

/// φ(z) = 2i∮[φ ∂G/∂ζ̄ dζ̄ + G φ_ζ dζ].
pub fn greens_identity_eval<P, D>(data: &HelmholtzBoundaryData<P, D>, p: &HelmholtzParameter, z: Complex64) -> Result<Complex64>
where
    P: Fn(f64) -> Complex64,
    D: Fn(f64) -> Complex64,
{
    let d = data.domain.distance_to_boundary(z);
    if !data.domain.contains(z) || !(d > data.domain.tolerance()) {
        return Err(Error::PointNotInterior { re: z.re, im: z.im, distance: d });
    }
    let mut err = None;
    let g = |th: f64| {
        let zeta = data.domain.position(th);
        let zp = data.domain.derivative(th);
        match (greens_dbar_closed(zeta, z, p), greens_function_closed(zeta, z, p)) {
            (Ok(gd), Ok(gf)) => (data.phi)(th) * gd * zp.conj() + gf * (data.dphi_dz)(th) * zp,
            (Err(e), _) | (_, Err(e)) => {
                err.get_or_insert(e);
                c(0.0, 0.0)
            }
        }
    };
    let quad = Quadrature::default();
    let bps = data.breakpoints(0.0, TAU);
    let width = (TAU * d / (4.0 * data.domain.max_speed())).min(PI / 4.0);
    let r = quad.integrate_arc_with(g, 0.0, TAU, &bps, width, quad.config().abs_tol)?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(2.0 * Complex64::i() * r.value)
}
