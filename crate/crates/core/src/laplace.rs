//! Transform pair for functions analytic in a convex domain.
//!
//! Spectral functions
//!   ρ_jk(t) = ∫_{I_k} f(ζ) e^{−i t e^{−iβ_j} ζ} dζ,
//! global relations Σ_k ρ_jk(t) = 0, and the reconstruction
//!   f(z) = (1/2π) Σ_j ∫₀^∞ ρ_jj(t) e^{−iβ_j} e^{i t e^{−iβ_j} z} dt.
//!
//! Inside reconstruction the factor e^{i t e^{−iβ_j} z} is folded into the
//! arc integral, so every exponential that is evaluated is bounded by one.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryCurve, Trapezoid};
use crate::quadrature::{halfline_cutoff, GaussLegendre, Quadrature};

/// Exponent budget: arc pieces where the kernel is below e^{−WINDOW} times
/// its largest value are dropped.
const WINDOW: f64 = 40.0;
const PROFILE_SAMPLES: usize = 128;

#[derive(Clone, Debug)]
struct SideProfile {
    lo: f64,
    hi: f64,
    /// Ψ_j(ζ) at equispaced samples of the arc.
    psi: Vec<Complex64>,
    /// Parameter of the point of I_j farthest from the side line.
    peak: f64,
    /// min and max of −Im Ψ_j(ζ) over I_j.
    c_min: f64,
    c_peak: f64,
    ends_are_min: bool,
    /// max |ζ′| over I_j.
    speed: f64,
    /// ∫_{I_j} |f| |dζ|.
    l1: f64,
}

/// Spectral data of a boundary trace for one inscribed trapezoid.
#[derive(Clone, Debug)]
pub struct SpectralEvaluator<F> {
    boundary_values: F,
    domain: BoundaryCurve,
    trapezoid: Trapezoid,
    quad: Quadrature,
    breakpoints: Vec<f64>,
    speed: f64,
    sides: [SideProfile; 4],
}

fn side_index(j: usize) -> Result<usize> {
    if (1..=4).contains(&j) {
        Ok(j - 1)
    } else {
        Err(Error::InvalidIndex(j))
    }
}

impl SideProfile {
    fn new(domain: &BoundaryCurve, trapezoid: &Trapezoid, k: usize) -> Self {
        let scale = domain.diameter().max(1.0);
        let (lo, hi) = trapezoid.arcs()[k];
        let psi: Vec<Complex64> = (0..=PROFILE_SAMPLES)
            .map(|i| {
                let t = lo + (hi - lo) * i as f64 / PROFILE_SAMPLES as f64;
                trapezoid.psi(k, domain.position(t))
            })
            .collect();
        let c_min = -trapezoid.arc_sup(k);
        let (mut arg, mut c_peak) = (0, f64::NEG_INFINITY);
        for (i, p) in psi.iter().enumerate() {
            if -p.im > c_peak {
                c_peak = -p.im;
                arg = i;
            }
        }
        let peak = lo + (hi - lo) * arg as f64 / PROFILE_SAMPLES as f64;
        let ends_are_min = (-psi[0].im - c_min).abs() <= 1e-12 * scale
            && (-psi[PROFILE_SAMPLES].im - c_min).abs() <= 1e-12 * scale;
        let speed = (0..=PROFILE_SAMPLES)
            .map(|i| domain.derivative(lo + (hi - lo) * i as f64 / PROFILE_SAMPLES as f64).norm())
            .fold(0.0, f64::max)
            * 1.05;
        SideProfile { lo, hi, psi, peak, c_min, c_peak, ends_are_min, speed, l1: 0.0 }
    }

    fn windowed(&self, t: f64) -> bool {
        self.ends_are_min && t * (self.c_peak - self.c_min) > WINDOW
    }

    /// Largest |Re Ψ_j(z) − Re Ψ_j(ζ)| over the windowed arc at t, for
    /// Ψ_j(z) ranging over the box with corners lo, hi.
    fn frequency(&self, lo: Complex64, hi: Complex64, t: f64, floor: f64) -> f64 {
        let spread = |p: &Complex64| {
            let re = (hi.re - p.re).abs().max((lo.re - p.re).abs());
            let im = (hi.im - p.im).abs().max((lo.im - p.im).abs());
            re.hypot(im)
        };
        let f = self.kept(t).map(|i| spread(&self.psi[i])).fold(0.0, f64::max);
        f.max(floor)
    }

    /// Indices of profile samples inside the window at t, padded by one.
    fn kept(&self, t: f64) -> impl Iterator<Item = usize> + '_ {
        let n = self.psi.len();
        let all = !self.windowed(t);
        let level = WINDOW / t;
        let inside = move |i: usize| all || -self.psi[i].im - self.c_min <= level;
        (0..n).filter(move |&i| inside(i) || (i > 0 && inside(i - 1)) || (i + 1 < n && inside(i + 1)))
    }

    /// Rough count of arc panels needed at t.
    fn arc_panels(&self, t: f64) -> f64 {
        let h = (self.hi - self.lo) / PROFILE_SAMPLES as f64;
        let len = self.kept(t).count() as f64 * h;
        1.0 + t * self.speed * len / (3.0 * TAU)
    }

    /// Initial t-panels on [0, t_max], each at most `cycles` oscillations
    /// and 8/decay long.
    fn panels(&self, lo: Complex64, hi: Complex64, t_max: f64, decay: f64, cycles: f64, floor: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut t = 0.0;
        while t < t_max {
            let w = (cycles * TAU / self.frequency(lo, hi, t, floor)).min(8.0 / decay);
            let next = if t + w >= t_max * (1.0 - 1e-12) { t_max } else { t + w };
            out.push((t, next));
            t = next;
        }
        out
    }
}

impl<F: Fn(f64) -> Complex64> SpectralEvaluator<F> {
    /// `boundary_values(θ)` is the trace f(ζ(θ)) in the domain's
    /// parametrization. Extra breakpoints are merged with the domain's.
    pub fn new(
        boundary_values: F,
        domain: BoundaryCurve,
        trapezoid: Trapezoid,
        quad: Quadrature,
        extra_breakpoints: &[f64],
    ) -> Result<Self> {
        let scale = domain.diameter();
        for (v, &p) in trapezoid.vertices().iter().zip(trapezoid.vertex_params()) {
            if (domain.position(p) - v).norm() > 1e-12 * scale.max(1.0) {
                return Err(Error::InvalidParameter("trapezoid does not belong to this domain"));
            }
        }
        let mut breakpoints: Vec<f64> = domain
            .breakpoints()
            .iter()
            .copied()
            .chain(extra_breakpoints.iter().map(|&b| crate::geometry::wrap_angle(b)))
            .collect();
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        let speed = domain.max_speed();
        let sides = core::array::from_fn(|k| SideProfile::new(&domain, &trapezoid, k));
        let mut ev = SpectralEvaluator {
            boundary_values,
            domain,
            trapezoid,
            quad,
            breakpoints,
            speed,
            sides,
        };
        for k in 0..4 {
            let (lo, hi) = (ev.sides[k].lo, ev.sides[k].hi);
            let bps = ev.arc_breakpoints(lo, hi);
            let l1 = ev
                .quad
                .integrate_arc_with(
                    |t| {
                        let v = (ev.boundary_values)(t).norm() * ev.domain.derivative(t).norm();
                        Complex64::new(v, 0.0)
                    },
                    lo,
                    hi,
                    &bps,
                    f64::INFINITY,
                    ev.quad.config().abs_tol,
                )?
                .value
                .re;
            if !l1.is_finite() {
                return Err(Error::InvalidParameter("boundary values are not integrable"));
            }
            ev.sides[k].l1 = l1;
        }
        Ok(ev)
    }

    pub fn domain(&self) -> &BoundaryCurve {
        &self.domain
    }

    pub fn trapezoid(&self) -> &Trapezoid {
        &self.trapezoid
    }

    pub fn boundary_value(&self, theta: f64) -> Complex64 {
        (self.boundary_values)(theta)
    }

    fn arc_breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut v = Vec::new();
        for &b in &self.breakpoints {
            for shift in [-TAU, 0.0, TAU, 2.0 * TAU] {
                let x = b + shift;
                if x > lo && x < hi {
                    v.push(x);
                }
            }
        }
        v
    }

    /// ρ_jk(t) for sides j, k ∈ 1..=4.
    pub fn spectral_function(&self, j: usize, k: usize, t: Complex64) -> Result<Complex64> {
        let j = side_index(j)?;
        let k = side_index(k)?;
        let (lo, hi) = self.trapezoid.arcs()[k];
        let rot = Complex64::from_polar(1.0, -self.trapezoid.betas()[j]);
        let tr = t * rot;
        let width = if t.norm() > 0.0 { TAU / (4.0 * t.norm() * self.speed) } else { f64::INFINITY };
        let bps = self.arc_breakpoints(lo, hi);
        let g = |th: f64| {
            let zeta = self.domain.position(th);
            (self.boundary_values)(th) * (-Complex64::i() * tr * zeta).exp() * self.domain.derivative(th)
        };
        Ok(self
            .quad
            .integrate_arc_with(g, lo, hi, &bps, width, self.quad.config().abs_tol)?
            .value)
    }

    /// Σ_k ρ_jk(t).
    pub fn global_relation_residual(&self, j: usize, t: Complex64) -> Result<Complex64> {
        let mut s = Complex64::new(0.0, 0.0);
        for k in 1..=4 {
            s += self.spectral_function(j, k, t)?;
        }
        Ok(s)
    }

    /// Sub-intervals of I_j carrying the kernel e^{−t(c(θ) − c_min)} above
    /// e^{−WINDOW}, where c = −Im Ψ_j(ζ).
    fn window(&self, j: usize, t: f64) -> ([(f64, f64); 2], usize) {
        let s = &self.sides[j];
        if !s.ends_are_min || t * (s.c_peak - s.c_min) <= WINDOW {
            return ([(s.lo, s.hi), (0.0, 0.0)], 1);
        }
        let level = s.c_min + WINDOW / t;
        let c = |th: f64| -self.trapezoid.psi(j, self.domain.position(th)).im - level;
        // c < 0 near the ends, c > 0 at the peak.
        let a = crate::geometry::bisect(c, s.lo, s.peak);
        let b = crate::geometry::bisect(|th| -c(th), s.peak, s.hi);
        ([(s.lo, a), (b, s.hi)], 2)
    }

    fn frequency_floor(&self) -> f64 {
        1e-3 * self.domain.diameter()
    }

    /// ∫_{I_j} f(ζ) e^{it(s − Ψ_j(ζ))} dζ for real t ≥ 0. With s = Ψ_j(z)
    /// this is ρ_jj(t)·e^{it e^{−iβ_j} z}; with s = 0 it is the α-centred
    /// spectral function.
    fn shifted_arc(&self, j: usize, t: f64, shift: Complex64) -> Result<Complex64> {
        let (pieces, n) = self.window(j, t);
        let rot = Complex64::from_polar(1.0, -self.trapezoid.betas()[j]);
        let alpha = self.trapezoid.alpha();
        let width = if t > 0.0 { 3.0 * TAU / (t * self.speed) } else { f64::INFINITY };
        let side = &self.sides[j];
        let bound = side.l1 * (-t * (shift.im + side.c_min)).exp();
        let abs_tol = (self.quad.config().abs_tol * 1e-2).max(256.0 * f64::EPSILON * bound);
        let mut s = Complex64::new(0.0, 0.0);
        for &(lo, hi) in &pieces[..n] {
            if !(hi > lo) {
                continue;
            }
            let bps = self.arc_breakpoints(lo, hi);
            let g = |th: f64| {
                let zeta = self.domain.position(th);
                let w = shift - rot * (zeta - alpha);
                (self.boundary_values)(th) * (Complex64::i() * w * t).exp() * self.domain.derivative(th)
            };
            s += self.quad.integrate_arc_with(g, lo, hi, &bps, width, abs_tol)?.value;
        }
        Ok(s)
    }

    /// Fixed rule (e, g) with ρ̃_jj(t) ≈ Σ g·e^{e·t} for t in [t_lo, t_hi]:
    /// panels refined against the trace, then capped at three oscillations
    /// at t_hi.
    fn arc_rule(&self, j: usize, t_lo: f64, t_hi: f64) -> Result<Vec<(Complex64, Complex64)>> {
        let (pieces, n) = self.window(j, t_lo.max(1e-300));
        let rot = Complex64::from_polar(1.0, -self.trapezoid.betas()[j]);
        let alpha = self.trapezoid.alpha();
        let width = 3.0 * TAU / (t_hi * self.sides[j].speed);
        let gl = GaussLegendre::new(16);
        let tol = self.quad.config().abs_tol * 1e-2;
        let eval = |a: f64, b: f64, out: &mut Vec<(Complex64, Complex64)>| -> Complex64 {
            let c = 0.5 * (a + b);
            let h = 0.5 * (b - a);
            let mut s = Complex64::new(0.0, 0.0);
            for (x, w) in gl.nodes().iter().zip(gl.weights()) {
                let th = c + h * x;
                let g = (self.boundary_values)(th) * self.domain.derivative(th) * (w * h);
                out.push((-Complex64::i() * rot * (self.domain.position(th) - alpha), g));
                s += g;
            }
            s
        };
        let mut out = Vec::new();
        let mut scratch = Vec::with_capacity(48);
        for &(lo, hi) in &pieces[..n] {
            if !(hi > lo) {
                continue;
            }
            let bps = self.arc_breakpoints(lo, hi);
            let mut stack = crate::quadrature::split_interval(lo, hi, &bps, width);
            let mut panels = 0usize;
            while let Some((a, b)) = stack.pop() {
                panels += 1;
                if panels > self.quad.config().max_panels {
                    return Err(Error::NoConvergence { panels, error: f64::NAN, tolerance: tol });
                }
                let m = 0.5 * (a + b);
                scratch.clear();
                let whole = eval(a, b, &mut scratch);
                scratch.clear();
                let halves = eval(a, m, &mut scratch) + eval(m, b, &mut scratch);
                let share = (b - a) / (hi - lo);
                if (whole - halves).norm() <= tol.max(1e-13 * halves.norm()) * share.max(1e-3)
                    || b - a <= 1e-12 * (hi - lo)
                {
                    out.extend_from_slice(&scratch);
                } else {
                    stack.push((a, m));
                    stack.push((m, b));
                }
            }
        }
        Ok(out)
    }

    fn check_inside(&self, z: Complex64) -> Result<[f64; 4]> {
        let tol = self.domain.tolerance();
        let m = self.trapezoid.side_margins(z);
        if !self.trapezoid.contains(z, tol) || m.iter().any(|&e| !(e > tol)) {
            let margin = m.iter().copied().fold(f64::INFINITY, f64::min);
            return Err(Error::NotInTrapezoid { re: z.re, im: z.im, margin });
        }
        Ok(m)
    }

    /// f(z) for z inside the trapezoid.
    pub fn reconstruct(&self, z: Complex64) -> Result<Complex64> {
        self.reconstruct_order(z, 0)
    }

    /// f′(z) for z inside the trapezoid.
    pub fn reconstruct_derivative(&self, z: Complex64) -> Result<Complex64> {
        self.reconstruct_order(z, 1)
    }

    fn reconstruct_order(&self, z: Complex64, order: u32) -> Result<Complex64> {
        let margins = self.check_inside(z)?;
        let mut total = Complex64::new(0.0, 0.0);
        for j in 0..4 {
            let eps = margins[j];
            let rot = Complex64::from_polar(1.0, -self.trapezoid.betas()[j]);
            let shift = self.trapezoid.psi(j, z);
            let l1 = self.sides[j].l1;
            if l1 == 0.0 {
                continue;
            }
            let (decay, envelope) = match order {
                0 => (eps, l1),
                _ => (0.5 * eps, l1 * 2.0 / (core::f64::consts::E * eps)),
            };
            let floor = self.frequency_floor();
            let side = &self.sides[j];
            let mut err = None;
            let h = |t: f64| match self.shifted_arc(j, t, shift) {
                Ok(v) => {
                    if order == 0 {
                        v
                    } else {
                        v * Complex64::i() * rot * t
                    }
                }
                Err(e) => {
                    err.get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            };
            let r = self.quad.integrate_halfline_graded(h, decay, Some(envelope), |t| {
                3.0 * TAU / side.frequency(shift, shift, t, floor)
            })?;
            if let Some(e) = err {
                return Err(e);
            }
            total += rot * r.value;
        }
        Ok(total / TAU)
    }

    /// Reconstructs f (and optionally f′) at many points inside the
    /// trapezoid, sharing the spectral functions between points.
    pub fn reconstruct_many(&self, zs: &[Complex64], derivative: bool) -> Result<Vec<Complex64>> {
        let mut margins = Vec::with_capacity(zs.len());
        for &z in zs {
            margins.push(self.check_inside(z)?);
        }
        let mut out = alloc::vec![Complex64::new(0.0, 0.0); zs.len()];
        if zs.is_empty() {
            return Ok(out);
        }
        let abs_tol = self.quad.config().abs_tol;
        let rule = GaussLegendre::new(16);
        for j in 0..4 {
            let l1 = self.sides[j].l1;
            if l1 == 0.0 {
                continue;
            }
            let eps_min = margins.iter().map(|m| m[j]).fold(f64::INFINITY, f64::min);
            let inf = Complex64::new(f64::INFINITY, f64::INFINITY);
            let (lo, hi) = zs.iter().fold((inf, -inf), |(a, b), &z| {
                let p = self.trapezoid.psi(j, z);
                (Complex64::new(a.re.min(p.re), a.im.min(p.im)), Complex64::new(b.re.max(p.re), b.im.max(p.im)))
            });
            let eps_use = if derivative { 0.5 * eps_min } else { eps_min };
            let envelope = if derivative {
                l1 * 2.0 / (core::f64::consts::E * eps_min)
            } else {
                l1
            };
            let t_of = |eps: f64| halfline_cutoff(envelope, eps, abs_tol);
            let t_max = t_of(eps_use);
            let panels = self.sides[j].panels(lo, hi, t_max, eps_use, 2.0, self.frequency_floor());
            let rot = Complex64::from_polar(1.0, -self.trapezoid.betas()[j]);
            let mut nodes: Vec<(f64, Complex64)> = Vec::with_capacity(panels.len() * 16);
            let mut start = 0;
            while start < panels.len() {
                // Octave [t_lo, 2·t_lo] shares one arc rule.
                let t_lo = panels[start].0;
                let mut end = start;
                while end < panels.len() && (t_lo == 0.0 && panels[end].1 <= t_max / 4096.0 || panels[end].1 <= 2.0 * t_lo) {
                    end += 1;
                }
                end = end.max(start + 1);
                let t_hi = panels[end - 1].1;
                let arc = self.arc_rule(j, t_lo, t_hi)?;
                for &(a, b) in &panels[start..end] {
                    let c = 0.5 * (a + b);
                    let h = 0.5 * (b - a);
                    for (x, w) in rule.nodes().iter().zip(rule.weights()) {
                        let t = c + h * x;
                        let rho: Complex64 = arc.iter().map(|&(e, g)| g * (e * t).exp()).sum();
                        nodes.push((t, rho * (w * h)));
                    }
                }
                start = end;
            }
            for (i, &z) in zs.iter().enumerate() {
                let eps = if derivative { 0.5 * margins[i][j] } else { margins[i][j] };
                let t_stop = t_of(eps);
                let pz = self.trapezoid.psi(j, z);
                let mut s = Complex64::new(0.0, 0.0);
                for &(t, wr) in &nodes {
                    if t > t_stop {
                        break;
                    }
                    let k = (Complex64::i() * pz * t).exp();
                    s += if derivative { wr * k * Complex64::i() * rot * t } else { wr * k };
                }
                out[i] += rot * s / TAU;
            }
        }
        Ok(out)
    }
}

/// Reconstructs f at arbitrary interior points of `domain` by grouping the
/// points under a small number of trapezoids.
pub fn reconstruct_points<F: Fn(f64) -> Complex64 + Clone>(
    boundary_values: F,
    domain: &BoundaryCurve,
    quad: &Quadrature,
    extra_breakpoints: &[f64],
    zs: &[Complex64],
    derivative: bool,
) -> Result<Vec<Complex64>> {
    let mut out = alloc::vec![Complex64::new(0.0, 0.0); zs.len()];
    let dist: Vec<f64> = zs.iter().map(|&z| domain.distance_to_boundary(z)).collect();
    let tol = domain.tolerance();
    for (i, &z) in zs.iter().enumerate() {
        if !domain.contains(z) || !(dist[i] > tol) {
            return Err(Error::PointNotInterior { re: z.re, im: z.im, distance: dist[i] });
        }
    }
    let mut order: Vec<usize> = (0..zs.len()).collect();
    order.sort_by(|&a, &b| dist[b].total_cmp(&dist[a]).then(a.cmp(&b)));
    let mut done = alloc::vec![false; zs.len()];
    for &seed in &order {
        if done[seed] {
            continue;
        }
        let trap = cheapest_trapezoid(domain, zs[seed], dist[seed])?;
        let seed_m = trap.side_margins(zs[seed]);
        let group: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&i| {
                !done[i] && trap.contains(zs[i], tol) && {
                    let m = trap.side_margins(zs[i]);
                    (0..4).all(|k| m[k] >= 0.5 * seed_m[k])
                }
            })
            .collect();
        let ev = SpectralEvaluator::new(
            boundary_values.clone(),
            domain.clone(),
            trap,
            quad.clone(),
            extra_breakpoints,
        )?;
        let pts: Vec<Complex64> = group.iter().map(|&i| zs[i]).collect();
        let vals = ev.reconstruct_many(&pts, derivative)?;
        for (&i, v) in group.iter().zip(vals) {
            out[i] = v;
            done[i] = true;
        }
    }
    Ok(out)
}

const LINE_FRACTIONS: [f64; 11] = [0.03, 0.08, 0.15, 0.3, 0.5, 0.7, 0.85, 0.95, 0.985, 0.995, 0.999];

/// Among trapezoids cut by pairs of horizontal lines around z, the one
/// needing the fewest t-panels to reconstruct at z.
fn cheapest_trapezoid(domain: &BoundaryCurve, z: Complex64, dist: f64) -> Result<Trapezoid> {
    let (p_lo, p_hi) = domain.vertical_extremes();
    let y_min = domain.position(p_lo).im;
    let y_max = domain.position(p_hi).im;
    let (up, down) = (y_max - z.im, z.im - y_min);
    let floor = 1e-3 * domain.diameter();
    let tol = domain.tolerance();
    let mut best: Option<(f64, Trapezoid)> = None;
    let mut consider = |y_lo: f64, y_hi: f64| {
        let Ok(t) = Trapezoid::from_lines(domain, y_lo, y_hi, z) else { return };
        let m = t.side_margins(z);
        if !t.contains(z, tol) || m.iter().any(|&e| !(e > tol)) {
            return;
        }
        let mut cost = 0.0;
        for (k, &mk) in m.iter().enumerate() {
            let side = SideProfile::new(domain, &t, k);
            let pz = t.psi(k, z);
            for (a, b) in side.panels(pz, pz, 32.0 / mk, mk, 2.0, floor) {
                cost += side.arc_panels(0.5 * (a + b));
            }
        }
        if best.as_ref().map_or(true, |(c, _)| cost < *c) {
            best = Some((cost, t));
        }
    };
    consider(z.im - 0.5 * dist, z.im + 0.5 * dist);
    for &a in &LINE_FRACTIONS {
        for &b in &LINE_FRACTIONS {
            consider(z.im - a * down, z.im + b * up);
        }
    }
    best.map(|(_, t)| t)
        .ok_or(Error::PointNotInterior { re: z.re, im: z.im, distance: dist })
}
