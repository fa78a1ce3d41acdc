//! Numerical integration primitives.
//!
//! Everything is built on one global-adaptive composite Gauss–Legendre
//! scheme: each panel carries a whole-panel estimate and the sum of its two
//! halves, and the panel with the largest discrepancy is split next.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{ContourEnd, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
    pub panel_order: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_panels: 20_000,
            panel_order: 16,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidParameter("rel_tol must be positive"));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidParameter("abs_tol must be positive"));
        }
        if self.panel_order < 4 {
            return Err(Error::InvalidParameter("panel_order must be at least 4"));
        }
        if self.max_panels < 1 {
            return Err(Error::InvalidParameter("max_panels must be at least 1"));
        }
        Ok(())
    }
}

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Value and estimated absolute error of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
}

/// Controls for [`Quadrature::integrate_halfline_damped`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HalflineOptions {
    /// Known bound C with |h(t)| ≤ C·e^{−εt}; sampled when absent.
    pub envelope: Option<f64>,
    /// Largest angular frequency of the integrand in t, 0 if unknown.
    pub frequency: f64,
}

/// Piece of a spectral-plane contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Line { from: Complex64, to: Complex64 },
    Arc { radius: f64, from_angle: f64, to_angle: f64 },
    Ray { from: Complex64, angle: f64 },
}

impl Segment {
    pub fn start(&self) -> Complex64 {
        match *self {
            Segment::Line { from, .. } | Segment::Ray { from, .. } => from,
            Segment::Arc { radius, from_angle, .. } => Complex64::from_polar(radius, from_angle),
        }
    }

    pub fn end(&self) -> Option<Complex64> {
        match *self {
            Segment::Line { to, .. } => Some(to),
            Segment::Arc { radius, to_angle, .. } => Some(Complex64::from_polar(radius, to_angle)),
            Segment::Ray { .. } => None,
        }
    }
}

/// Contour from the origin to infinity made of connected segments.
#[derive(Debug, Clone, PartialEq)]
pub struct RayContour {
    pub segments: Vec<Segment>,
    /// Rate a with |h(t)| ~ e^{−a|t|} along the final ray.
    pub decay_estimate: f64,
    /// Rate b with |h(t)| ~ e^{−b/|t|} near the origin, 0 if unknown.
    pub decay_at_origin: f64,
    /// Largest angular frequency of the integrand along the rays, 0 if unknown.
    pub frequency: f64,
}

impl RayContour {
    pub fn validate(&self) -> Result<()> {
        let n = self.segments.len();
        if n == 0 {
            return Err(Error::InvalidParameter("contour has no segments"));
        }
        if self.segments[0].start().norm() > 1e-14 {
            return Err(Error::InvalidParameter("contour must start at the origin"));
        }
        if !matches!(self.segments[n - 1], Segment::Ray { .. }) {
            return Err(Error::InvalidParameter("contour must end with a ray"));
        }
        for w in self.segments.windows(2) {
            let end = w[0]
                .end()
                .ok_or(Error::InvalidParameter("ray before the final segment"))?;
            if (end - w[1].start()).norm() > 1e-12 * (1.0 + end.norm()) {
                return Err(Error::InvalidParameter("contour segments are not connected"));
            }
        }
        if !(self.decay_estimate > 0.0 && self.decay_estimate.is_finite()) {
            return Err(Error::InvalidParameter("decay estimate must be positive"));
        }
        Ok(())
    }
}

struct Panel {
    a: f64,
    b: f64,
    left: Complex64,
    right: Complex64,
    mag: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

const ROUNDOFF: f64 = 64.0 * f64::EPSILON;

#[derive(Debug, Clone)]
pub struct Quadrature {
    cfg: QuadratureConfig,
    rule: GaussLegendre,
}

impl Default for Quadrature {
    fn default() -> Self {
        let cfg = QuadratureConfig::default();
        Quadrature { rule: GaussLegendre::new(cfg.panel_order), cfg }
    }
}

impl Quadrature {
    pub fn new(cfg: QuadratureConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Quadrature { rule: GaussLegendre::new(cfg.panel_order), cfg })
    }

    pub fn config(&self) -> &QuadratureConfig {
        &self.cfg
    }

    fn apply<F: FnMut(f64) -> Complex64>(&self, f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = Complex64::new(0.0, 0.0);
        let mut m = 0.0;
        for (x, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let v = f(c + h * x);
            s += v * *w;
            m += v.norm() * w;
        }
        (s * h, m * h.abs())
    }

    fn make_panel<F: FnMut(f64) -> Complex64>(
        &self,
        f: &mut F,
        a: f64,
        b: f64,
        whole: Complex64,
    ) -> Panel {
        let m = 0.5 * (a + b);
        let (left, ml) = self.apply(f, a, m);
        let (right, mr) = self.apply(f, m, b);
        Panel { a, b, left, right, mag: ml + mr, err: (whole - left - right).norm() }
    }

    /// Global-adaptive integration over a list of abutting intervals.
    pub fn adaptive<F: FnMut(f64) -> Complex64>(
        &self,
        mut f: F,
        intervals: &[(f64, f64)],
        abs_tol: f64,
    ) -> Result<Integral> {
        let mut heap = BinaryHeap::with_capacity(intervals.len() * 2);
        let mut total = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        let mut mag = 0.0;
        for &(a, b) in intervals {
            if b <= a {
                continue;
            }
            let (whole, _) = self.apply(&mut f, a, b);
            let p = self.make_panel(&mut f, a, b, whole);
            total += p.left + p.right;
            err += p.err;
            mag += p.mag;
            heap.push(p);
        }
        let mut count = heap.len();
        let mut since_resum = 0;
        loop {
            let tol = abs_tol.max(self.cfg.rel_tol * total.norm()).max(ROUNDOFF * mag);
            if err <= tol {
                return Ok(Integral { value: total, error: err });
            }
            let Some(p) = heap.pop() else {
                return Ok(Integral { value: total, error: err });
            };
            let mid = 0.5 * (p.a + p.b);
            if !(mid > p.a && mid < p.b) || (p.b - p.a) < 1e-15 * (p.a.abs() + p.b.abs()) {
                // Panel cannot be split further; keep it out of the queue.
                err -= p.err;
                continue;
            }
            if count + 1 > self.cfg.max_panels {
                return Err(Error::NoConvergence { panels: count, error: err, tolerance: tol });
            }
            let l = self.make_panel(&mut f, p.a, mid, p.left);
            let r = self.make_panel(&mut f, mid, p.b, p.right);
            total += l.left + l.right + r.left + r.right - p.left - p.right;
            err += l.err + r.err - p.err;
            mag += l.mag + r.mag - p.mag;
            heap.push(l);
            heap.push(r);
            count += 1;
            since_resum += 1;
            if since_resum >= 64 {
                since_resum = 0;
                total = heap.iter().map(|p| p.left + p.right).sum();
                err = heap.iter().map(|p| p.err).sum();
                mag = heap.iter().map(|p| p.mag).sum();
            }
        }
    }

    /// Integral of `g` over [lo, hi]; panels never straddle a breakpoint.
    pub fn integrate_arc<G: FnMut(f64) -> Complex64>(
        &self,
        g: G,
        lo: f64,
        hi: f64,
        breakpoints: &[f64],
    ) -> Result<Integral> {
        self.integrate_arc_with(g, lo, hi, breakpoints, f64::INFINITY, self.cfg.abs_tol)
    }

    /// As [`integrate_arc`](Self::integrate_arc) with a maximum initial panel
    /// width and an explicit absolute tolerance.
    pub fn integrate_arc_with<G: FnMut(f64) -> Complex64>(
        &self,
        g: G,
        lo: f64,
        hi: f64,
        breakpoints: &[f64],
        max_width: f64,
        abs_tol: f64,
    ) -> Result<Integral> {
        if !(lo < hi) {
            if lo == hi {
                return Ok(Integral { value: Complex64::new(0.0, 0.0), error: 0.0 });
            }
            return Err(Error::InvalidParameter("integration interval must have lo < hi"));
        }
        let iv = split_interval(lo, hi, breakpoints, max_width);
        self.adaptive(g, &iv, abs_tol)
    }

    /// Vector-valued adaptive integration. `g(θ, out)` fills `out` with the
    /// integrand components; the error test uses the largest component.
    pub fn integrate_arc_vec<G: FnMut(f64, &mut [Complex64])>(
        &self,
        g: G,
        dim: usize,
        lo: f64,
        hi: f64,
        breakpoints: &[f64],
        max_width: f64,
    ) -> Result<Vec<Complex64>> {
        if !(lo < hi) {
            return Err(Error::InvalidParameter("integration interval must have lo < hi"));
        }
        let mut st = VecAdaptive {
            rule: &self.rule,
            g,
            dim,
            buf: vec![Complex64::new(0.0, 0.0); dim],
            bounds: Vec::new(),
            halves: Vec::new(),
            errs: Vec::new(),
            mags: Vec::new(),
            live: Vec::new(),
        };
        let mut whole = vec![Complex64::new(0.0, 0.0); dim];
        for (a, b) in split_interval(lo, hi, breakpoints, max_width) {
            st.apply(a, b, &mut whole);
            st.push(a, b, &whole);
        }
        let mut total = vec![Complex64::new(0.0, 0.0); dim];
        loop {
            total.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            let mut err = 0.0;
            let mut mag = 0.0f64;
            let mut worst = None;
            let mut worst_err = -1.0;
            let mut live_count = 0;
            for i in 0..st.bounds.len() {
                if !st.live[i] {
                    continue;
                }
                live_count += 1;
                let base = 2 * dim * i;
                for d in 0..dim {
                    total[d] += st.halves[base + d] + st.halves[base + dim + d];
                }
                err += st.errs[i];
                mag = mag.max(st.mags[i]);
                if st.errs[i] > worst_err {
                    worst_err = st.errs[i];
                    worst = Some(i);
                }
            }
            let scale = total.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let tol = self
                .cfg
                .abs_tol
                .max(self.cfg.rel_tol * scale)
                .max(ROUNDOFF * mag * live_count as f64);
            let Some(i) = worst else { return Ok(total) };
            if err <= tol {
                return Ok(total);
            }
            if live_count + 1 > self.cfg.max_panels {
                return Err(Error::NoConvergence { panels: live_count, error: err, tolerance: tol });
            }
            let (a, b) = st.bounds[i];
            let m = 0.5 * (a + b);
            if !(m > a && m < b) {
                st.errs[i] = 0.0;
                continue;
            }
            st.live[i] = false;
            let base = 2 * dim * i;
            let lw: Vec<Complex64> = st.halves[base..base + dim].to_vec();
            let rw: Vec<Complex64> = st.halves[base + dim..base + 2 * dim].to_vec();
            st.push(a, m, &lw);
            st.push(m, b, &rw);
        }
    }

    /// ∫₀^∞ h(t) dt for integrands with |h(t)| ≤ C·e^{−εt}.
    pub fn integrate_halfline_damped<H: FnMut(f64) -> Complex64>(
        &self,
        h: H,
        decay: f64,
        opts: HalflineOptions,
    ) -> Result<Integral> {
        let freq = opts.frequency;
        self.integrate_halfline_graded(h, decay, opts.envelope, |_| {
            if freq > 0.0 {
                3.0 * TAU / freq
            } else {
                f64::INFINITY
            }
        })
    }

    /// As [`integrate_halfline_damped`](Self::integrate_halfline_damped) with
    /// the initial panel width at t given by `width(t)`.
    pub fn integrate_halfline_graded<H: FnMut(f64) -> Complex64, W: FnMut(f64) -> f64>(
        &self,
        mut h: H,
        decay: f64,
        envelope: Option<f64>,
        mut width: W,
    ) -> Result<Integral> {
        if !(decay > 0.0 && decay.is_finite()) {
            return Err(Error::InvalidParameter("decay rate must be positive"));
        }
        let abs_tol = self.cfg.abs_tol;
        let c = match envelope {
            Some(c) => c,
            None => (0..=8).map(|k| h(k as f64 / 8.0).norm()).fold(0.0, f64::max),
        };
        if c == 0.0 {
            return Ok(Integral { value: Complex64::new(0.0, 0.0), error: 0.0 });
        }
        let t_max = halfline_cutoff(c, decay, abs_tol);
        let envelope = c * (-decay * t_max).exp();
        let sampled = h(t_max).norm();
        if sampled > 10.0 * envelope && sampled > abs_tol {
            return Err(Error::NonDecayingIntegrand { t: t_max, sampled, envelope });
        }
        let cap = 20.0 / decay;
        let mut iv = Vec::new();
        let mut t = 0.0;
        while t < t_max {
            let w = width(t).min(cap).max(1e-6 * t_max);
            let next = if t + w >= t_max * (1.0 - 1e-12) { t_max } else { t + w };
            iv.push((t, next));
            t = next;
        }
        let mut r = self.adaptive(h, &iv, abs_tol)?;
        r.error += envelope / decay;
        Ok(r)
    }

    /// ∫ h(t) dt along a contour from 0 to ∞.
    pub fn integrate_ray_contour<H: FnMut(Complex64) -> Complex64>(
        &self,
        mut h: H,
        contour: &RayContour,
    ) -> Result<Integral> {
        contour.validate()?;
        let abs_tol = self.cfg.abs_tol;
        let nseg = contour.segments.len() as f64;
        let seg_tol = abs_tol / nseg;
        let mut total = Integral { value: Complex64::new(0.0, 0.0), error: 0.0 };
        for (idx, seg) in contour.segments.iter().enumerate() {
            let r = match *seg {
                Segment::Line { from, to } => {
                    let d = to - from;
                    let mut g = |s: f64| h(from + d * s) * d;
                    if idx == 0 {
                        let r_min = 1e-8 / d.norm().max(1e-300);
                        check_origin(&mut g, r_min.min(1e-2))?;
                        let iv = graded_intervals(r_min.min(0.5), 1.0);
                        self.adaptive(g, &iv, seg_tol)?
                    } else {
                        let width = line_width(d.norm(), contour.frequency);
                        let iv = split_interval(0.0, 1.0, &[], width);
                        self.adaptive(g, &iv, seg_tol)?
                    }
                }
                Segment::Arc { radius, from_angle, to_angle } => {
                    let (lo, hi, sign) = if to_angle >= from_angle {
                        (from_angle, to_angle, 1.0)
                    } else {
                        (to_angle, from_angle, -1.0)
                    };
                    let g = |phi: f64| {
                        let t = Complex64::from_polar(radius, phi);
                        h(t) * Complex64::i() * t * sign
                    };
                    let width = if contour.frequency > 0.0 {
                        (3.0 * TAU / (contour.frequency * radius)).min(PI / 4.0)
                    } else {
                        PI / 4.0
                    };
                    let iv = split_interval(lo, hi, &[], width);
                    self.adaptive(g, &iv, seg_tol)?
                }
                Segment::Ray { from, angle } => {
                    let dir = Complex64::from_polar(1.0, angle);
                    let mut g = |s: f64| h(from + dir * s) * dir;
                    if idx == 0 && from.norm() <= 1e-14 {
                        check_origin(&mut g, 1e-8)?;
                        let head = graded_intervals(1e-8, 1.0);
                        let a = self.adaptive(&mut g, &head, seg_tol)?;
                        let b = self.ray_tail(&mut g, 1.0, contour, seg_tol)?;
                        Integral { value: a.value + b.value, error: a.error + b.error }
                    } else {
                        self.ray_tail(&mut g, 0.0, contour, seg_tol)?
                    }
                }
            };
            total.value += r.value;
            total.error += r.error;
        }
        Ok(total)
    }

    fn ray_tail<G: FnMut(f64) -> Complex64>(
        &self,
        g: &mut G,
        s0: f64,
        contour: &RayContour,
        abs_tol: f64,
    ) -> Result<Integral> {
        let a = contour.decay_estimate;
        let c = (0..=8).map(|k| g(s0 + k as f64 / 8.0).norm()).fold(0.0, f64::max);
        if c == 0.0 {
            return Ok(Integral { value: Complex64::new(0.0, 0.0), error: 0.0 });
        }
        let len = ((c / (abs_tol * a.min(1.0))).ln() / a).max(1.0);
        let s1 = s0 + len;
        let samples = [g(s1 - 0.2 * len).norm(), g(s1 - 0.1 * len).norm(), g(s1).norm()];
        let floor = abs_tol.max(1e-12 * c);
        if samples[2] > floor && !(samples[2] <= samples[1] && samples[1] <= samples[0]) {
            return Err(Error::EndpointNotDecaying { end: ContourEnd::Infinity, samples });
        }
        let width = line_width(1.0, contour.frequency).min(20.0 / a);
        let iv = split_interval(s0, s1, &[], width);
        let mut r = self.adaptive(g, &iv, abs_tol)?;
        r.error += samples[2] / a;
        Ok(r)
    }
}

struct VecAdaptive<'r, G> {
    rule: &'r GaussLegendre,
    g: G,
    dim: usize,
    buf: Vec<Complex64>,
    bounds: Vec<(f64, f64)>,
    halves: Vec<Complex64>,
    errs: Vec<f64>,
    mags: Vec<f64>,
    live: Vec<bool>,
}

impl<G: FnMut(f64, &mut [Complex64])> VecAdaptive<'_, G> {
    fn apply(&mut self, a: f64, b: f64, out: &mut [Complex64]) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        let mut m = 0.0f64;
        for (x, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            (self.g)(c + h * x, &mut self.buf);
            for (o, v) in out.iter_mut().zip(&self.buf) {
                *o += *v * (*w * h);
                m = m.max(v.norm() * w * h.abs());
            }
        }
        m
    }

    fn push(&mut self, a: f64, b: f64, whole: &[Complex64]) {
        let m = 0.5 * (a + b);
        let mut left = vec![Complex64::new(0.0, 0.0); self.dim];
        let mut right = vec![Complex64::new(0.0, 0.0); self.dim];
        let mag = self.apply(a, m, &mut left).max(self.apply(m, b, &mut right));
        let err = whole
            .iter()
            .zip(left.iter().zip(&right))
            .map(|(w, (l, r))| (w - l - r).norm())
            .fold(0.0, f64::max);
        self.bounds.push((a, b));
        self.halves.extend_from_slice(&left);
        self.halves.extend_from_slice(&right);
        self.errs.push(err);
        self.mags.push(mag);
        self.live.push(true);
    }
}

/// Truncation point T with C·e^{−εT}/min(ε, 1) = abs_tol.
pub fn halfline_cutoff(envelope: f64, decay: f64, abs_tol: f64) -> f64 {
    ((envelope / (abs_tol * decay.min(1.0))).ln() / decay).max(1.0)
}

fn line_width(len: f64, frequency: f64) -> f64 {
    if frequency > 0.0 {
        (3.0 * TAU / (frequency * len)).min(1.0)
    } else {
        0.25
    }
}

fn check_origin<G: FnMut(f64) -> Complex64>(g: &mut G, s_min: f64) -> Result<()> {
    let samples = [g(100.0 * s_min).norm(), g(10.0 * s_min).norm(), g(s_min).norm()];
    let scale = g(1.0).norm().max(1.0);
    let floor = 1e-12 * scale;
    if samples[2] > floor && !(samples[2] <= samples[1] && samples[1] <= samples[0]) {
        return Err(Error::EndpointNotDecaying { end: ContourEnd::Origin, samples });
    }
    Ok(())
}

/// Panels [r/2, r] from `hi` down to `lo`, ratio 0.5.
fn graded_intervals(lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut iv = Vec::new();
    let mut b = hi;
    while b > lo {
        let a = (0.5 * b).max(lo);
        iv.push((a, b));
        b = a;
    }
    iv.reverse();
    iv
}

/// Splits [lo, hi] at the breakpoints lying strictly inside, then caps the
/// width of each piece.
pub fn split_interval(lo: f64, hi: f64, breakpoints: &[f64], max_width: f64) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&b| b > lo && b < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut out = Vec::new();
    let mut a = lo;
    for b in cuts.into_iter().chain(core::iter::once(hi)) {
        let len = b - a;
        let n = if max_width.is_finite() && max_width > 0.0 {
            (len / max_width).ceil().max(1.0) as usize
        } else {
            1
        };
        for k in 0..n {
            let x0 = a + len * k as f64 / n as f64;
            let x1 = if k + 1 == n { b } else { a + len * (k + 1) as f64 / n as f64 };
            out.push((x0, x1));
        }
        a = b;
    }
    out
}

/// Equispaced trapezoid rule for a 2π-periodic integrand.
pub fn periodic_trapezoid<G: FnMut(f64) -> Complex64>(mut g: G, n: usize) -> Complex64 {
    let h = TAU / n as f64;
    let mut s = Complex64::new(0.0, 0.0);
    for k in 0..n {
        s += g(h * k as f64);
    }
    s * h
}

/// Periodic trapezoid rule with node doubling until every component settles.
pub fn periodic_trapezoid_vec<G: FnMut(f64, &mut [Complex64])>(
    mut g: G,
    dim: usize,
    rel_tol: f64,
    abs_tol: f64,
    max_nodes: usize,
) -> Result<Vec<Complex64>> {
    let mut buf = vec![Complex64::new(0.0, 0.0); dim];
    let mut sum = vec![Complex64::new(0.0, 0.0); dim];
    let mut n = 32usize;
    let mut peak = 0.0f64;
    for k in 0..n {
        g(TAU * k as f64 / n as f64, &mut buf);
        for (s, v) in sum.iter_mut().zip(&buf) {
            *s += *v;
            peak = peak.max(v.norm());
        }
    }
    let mut prev: Vec<Complex64> = sum.iter().map(|s| s * (TAU / n as f64)).collect();
    loop {
        if 2 * n > max_nodes {
            return Err(Error::NoConvergence { panels: n, error: f64::NAN, tolerance: rel_tol });
        }
        for k in 0..n {
            g(TAU * (2 * k + 1) as f64 / (2 * n) as f64, &mut buf);
            for (s, v) in sum.iter_mut().zip(&buf) {
                *s += *v;
                peak = peak.max(v.norm());
            }
        }
        n *= 2;
        let cur: Vec<Complex64> = sum.iter().map(|s| s * (TAU / n as f64)).collect();
        let scale = cur.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let diff = cur
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let roundoff = 64.0 * f64::EPSILON * TAU * peak;
        if diff <= abs_tol.max(rel_tol * scale).max(roundoff) && n >= 64 {
            return Ok(cur);
        }
        prev = cur;
    }
}
