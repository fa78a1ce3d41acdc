//! Convex boundary curves and inscribed trapezoids.
//!
//! A trapezoid with two horizontal sides is inscribed in the domain; its
//! vertices split the boundary into four arcs, and side k subtends arc I_k.
//! The rotation Ψ_k(w) = e^{−iβ_k}(w − α) sends side k to a horizontal line
//! with the interior above it and the arc below it.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// User-supplied parametrization of a convex Jordan curve, 2π-periodic and
/// counterclockwise.
pub trait ConvexCurve: Send + Sync {
    fn position(&self, theta: f64) -> Complex64;
    fn derivative(&self, theta: f64) -> Complex64;
}

#[derive(Clone)]
pub enum CurveKind {
    UnitCircle,
    Ellipse { a: f64, b: f64 },
    GeneralConvex(Arc<dyn ConvexCurve>),
}

impl fmt::Debug for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveKind::UnitCircle => f.write_str("UnitCircle"),
            CurveKind::Ellipse { a, b } => write!(f, "Ellipse {{ a: {a}, b: {b} }}"),
            CurveKind::GeneralConvex(_) => f.write_str("GeneralConvex(..)"),
        }
    }
}

/// Parametrized boundary ζ(θ), θ ∈ [0, 2π). The ellipse uses
/// ζ(θ) = a cos θ + i b sin θ.
#[derive(Clone, Debug)]
pub struct BoundaryCurve {
    kind: CurveKind,
    breakpoints: Vec<f64>,
    diameter: f64,
}

/// Maps an angle into [0, 2π).
pub fn wrap_angle(theta: f64) -> f64 {
    let r = theta - TAU * (theta / TAU).floor();
    if r >= TAU {
        0.0
    } else {
        r
    }
}

const SAMPLES: usize = 256;

impl BoundaryCurve {
    pub fn unit_circle() -> Self {
        BoundaryCurve { kind: CurveKind::UnitCircle, breakpoints: Vec::new(), diameter: 2.0 }
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidParameter("ellipse semi-axes must be positive"));
        }
        Ok(BoundaryCurve {
            kind: CurveKind::Ellipse { a, b },
            breakpoints: Vec::new(),
            diameter: 2.0 * a.max(b),
        })
    }

    pub fn general(curve: Arc<dyn ConvexCurve>) -> Result<Self> {
        let mut c = BoundaryCurve {
            kind: CurveKind::GeneralConvex(curve),
            breakpoints: Vec::new(),
            diameter: 0.0,
        };
        let pts: Vec<Complex64> = (0..SAMPLES).map(|i| c.position(sample_theta(i))).collect();
        let mut d = 0.0f64;
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i + 1..] {
                d = d.max((p - q).norm());
            }
        }
        c.diameter = d;
        c.validate()?;
        Ok(c)
    }

    /// Replaces the breakpoint list; angles are wrapped into [0, 2π).
    pub fn with_breakpoints(mut self, breakpoints: &[f64]) -> Self {
        let mut b: Vec<f64> = breakpoints.iter().map(|&t| wrap_angle(t)).collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        self.breakpoints = b;
        self
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Geometric tolerance used for interior tests.
    pub fn tolerance(&self) -> f64 {
        1e-9 * self.diameter
    }

    pub fn position(&self, theta: f64) -> Complex64 {
        match &self.kind {
            CurveKind::UnitCircle => Complex64::new(theta.cos(), theta.sin()),
            CurveKind::Ellipse { a, b } => Complex64::new(a * theta.cos(), b * theta.sin()),
            CurveKind::GeneralConvex(c) => c.position(theta),
        }
    }

    pub fn derivative(&self, theta: f64) -> Complex64 {
        match &self.kind {
            CurveKind::UnitCircle => Complex64::new(-theta.sin(), theta.cos()),
            CurveKind::Ellipse { a, b } => Complex64::new(-a * theta.sin(), b * theta.cos()),
            CurveKind::GeneralConvex(c) => c.derivative(theta),
        }
    }

    pub fn second_derivative(&self, theta: f64) -> Complex64 {
        match &self.kind {
            CurveKind::UnitCircle | CurveKind::Ellipse { .. } => -self.position(theta),
            CurveKind::GeneralConvex(c) => {
                let h = 1e-4;
                (c.derivative(theta + h) - c.derivative(theta - h)) / (2.0 * h)
            }
        }
    }

    /// Largest |ζ′| over a dense sample.
    pub fn max_speed(&self) -> f64 {
        match &self.kind {
            CurveKind::UnitCircle => 1.0,
            CurveKind::Ellipse { a, b } => a.max(*b),
            CurveKind::GeneralConvex(_) => (0..SAMPLES)
                .map(|i| self.derivative(sample_theta(i)).norm())
                .fold(0.0, f64::max),
        }
    }

    /// Checks periodicity, counterclockwise orientation and convexity.
    pub fn validate(&self) -> Result<()> {
        if let CurveKind::Ellipse { a, b } = self.kind {
            if !(a > 0.0 && b > 0.0) {
                return Err(Error::InvalidParameter("ellipse semi-axes must be positive"));
            }
        }
        let scale = self.diameter.max(f64::MIN_POSITIVE);
        if (self.position(0.0) - self.position(TAU)).norm() > 1e-9 * scale {
            return Err(Error::InvalidParameter("boundary parametrization is not 2π-periodic"));
        }
        let mut area = 0.0;
        for i in 0..SAMPLES {
            let t = sample_theta(i);
            let z = self.position(t);
            let d = self.derivative(t);
            area += 0.5 * (z.conj() * d).im * TAU / SAMPLES as f64;
            let curv = (d.conj() * self.second_derivative(t)).im;
            if curv < -1e-6 * d.norm().powi(3).max(1e-300) {
                return Err(Error::InvalidParameter("boundary is not convex"));
            }
        }
        if !(area > 0.0) {
            return Err(Error::InvalidParameter("boundary is not counterclockwise"));
        }
        Ok(())
    }

    /// Parameter of the boundary point nearest to z.
    pub fn nearest_parameter(&self, z: Complex64) -> f64 {
        match self.kind {
            CurveKind::UnitCircle => wrap_angle(z.im.atan2(z.re)),
            _ => {
                let dist2 = |t: f64| (self.position(t) - z).norm_sqr();
                let mut best = 0;
                let mut best_d = f64::INFINITY;
                for i in 0..SAMPLES {
                    let d = dist2(sample_theta(i));
                    if d < best_d {
                        best_d = d;
                        best = i;
                    }
                }
                let h = TAU / SAMPLES as f64;
                let t0 = sample_theta(best);
                wrap_angle(golden_min(dist2, t0 - h, t0 + h))
            }
        }
    }

    pub fn distance_to_boundary(&self, z: Complex64) -> f64 {
        match self.kind {
            CurveKind::UnitCircle => (1.0 - z.norm()).abs(),
            _ => (self.position(self.nearest_parameter(z)) - z).norm(),
        }
    }

    /// Strict interior test.
    pub fn contains(&self, z: Complex64) -> bool {
        match self.kind {
            CurveKind::UnitCircle => z.norm_sqr() < 1.0,
            CurveKind::Ellipse { a, b } => (z.re / a).powi(2) + (z.im / b).powi(2) < 1.0,
            CurveKind::GeneralConvex(_) => {
                let t = self.nearest_parameter(z);
                (self.derivative(t).conj() * (z - self.position(t))).im > 0.0
            }
        }
    }

    /// Parameters of the lowest and highest boundary points.
    pub fn vertical_extremes(&self) -> (f64, f64) {
        match self.kind {
            CurveKind::UnitCircle | CurveKind::Ellipse { .. } => (1.5 * PI, FRAC_PI_2),
            CurveKind::GeneralConvex(_) => {
                let h = TAU / SAMPLES as f64;
                let (mut lo, mut hi) = (0, 0);
                let mut ylo = f64::INFINITY;
                let mut yhi = f64::NEG_INFINITY;
                for i in 0..SAMPLES {
                    let y = self.position(sample_theta(i)).im;
                    if y < ylo {
                        ylo = y;
                        lo = i;
                    }
                    if y > yhi {
                        yhi = y;
                        hi = i;
                    }
                }
                let tl = sample_theta(lo);
                let th = sample_theta(hi);
                let tl = golden_min(|t| self.position(t).im, tl - h, tl + h);
                let th = golden_min(|t| -self.position(t).im, th - h, th + h);
                (wrap_angle(tl), wrap_angle(th))
            }
        }
    }

    /// Parameters (right, left) where the horizontal line Im ζ = y meets the
    /// boundary, or None if the line misses the interior.
    pub fn horizontal_crossings(&self, y: f64) -> Option<(f64, f64)> {
        match self.kind {
            CurveKind::UnitCircle | CurveKind::Ellipse { .. } => {
                let b = match self.kind {
                    CurveKind::Ellipse { b, .. } => b,
                    _ => 1.0,
                };
                let s = y / b;
                if !(s > -1.0 && s < 1.0) {
                    return None;
                }
                let r = s.asin();
                Some((wrap_angle(r), wrap_angle(PI - r)))
            }
            CurveKind::GeneralConvex(_) => {
                let (tlo, thi) = self.vertical_extremes();
                let ylo = self.position(tlo).im;
                let yhi = self.position(thi).im;
                if !(y > ylo && y < yhi) {
                    return None;
                }
                let thi_u = if thi > tlo { thi } else { thi + TAU };
                let right = bisect(|t| self.position(t).im - y, tlo, thi_u);
                let right_end = tlo + TAU;
                let left = bisect(|t| y - self.position(t).im, thi_u, right_end);
                Some((wrap_angle(right), wrap_angle(left)))
            }
        }
    }
}

fn sample_theta(i: usize) -> f64 {
    TAU * i as f64 / SAMPLES as f64
}

pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    // f(a) < 0 < f(b)
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if b - a <= 1e-15 * (1.0 + m.abs()) {
            break;
        }
        if f(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() < 1e-14 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Inscribed trapezoid with horizontal sides 1 (bottom) and 3 (top).
///
/// Vertices are v₁ (lower left), v₂ (lower right), v₃ (upper right),
/// v₄ (upper left); side k joins v_k to v_{k+1}.
#[derive(Clone, Debug, PartialEq)]
pub struct Trapezoid {
    vertices: [Complex64; 4],
    vertex_params: [f64; 4],
    betas: [f64; 4],
    alpha: Complex64,
    arcs: [(f64, f64); 4],
    arc_sup: [f64; 4],
    margin: f64,
}

impl Trapezoid {
    /// Trapezoid cut by the horizontal lines y = y_lo and y = y_hi, with
    /// reference point α.
    pub fn from_lines(domain: &BoundaryCurve, y_lo: f64, y_hi: f64, alpha: Complex64) -> Result<Self> {
        if !(y_lo < y_hi) {
            return Err(Error::InvalidParameter("trapezoid needs y_lo < y_hi"));
        }
        let tol = domain.tolerance();
        let (r_lo, l_lo) = domain
            .horizontal_crossings(y_lo)
            .ok_or(Error::DegenerateArc { side: 1, gap: 0.0 })?;
        let (r_hi, l_hi) = domain
            .horizontal_crossings(y_hi)
            .ok_or(Error::DegenerateArc { side: 3, gap: 0.0 })?;
        let vertex_params = [l_lo, r_lo, r_hi, l_hi];
        let vertices = vertex_params.map(|t| domain.position(t));
        for (side, (i, j)) in [(1, (0, 1)), (3, (2, 3))] {
            let gap = (vertices[i] - vertices[j]).norm();
            if gap <= 1e3 * tol {
                return Err(Error::DegenerateArc { side, gap });
            }
        }
        let mut betas = [0.0; 4];
        for k in 0..4 {
            let d = vertices[(k + 1) % 4] - vertices[k];
            betas[k] = wrap_angle(d.im.atan2(d.re));
        }
        // Horizontal sides are exact by construction.
        betas[0] = 0.0;
        betas[2] = PI;
        let mut t = Trapezoid {
            vertices,
            vertex_params,
            betas,
            alpha,
            arcs: [(0.0, 0.0); 4],
            arc_sup: [0.0; 4],
            margin: 0.0,
        };
        t.arcs = partition_boundary(domain, &t)?;
        for k in 0..4 {
            t.arc_sup[k] = t.sup_on_arc(domain, k);
        }
        let m = separation_margin(&t, domain, alpha)?;
        t.margin = m;
        Ok(t)
    }

    pub fn vertices(&self) -> &[Complex64; 4] {
        &self.vertices
    }

    pub fn vertex_params(&self) -> &[f64; 4] {
        &self.vertex_params
    }

    pub fn betas(&self) -> &[f64; 4] {
        &self.betas
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    /// Parameter intervals (start, end) with start ∈ [0, 2π) and end > start.
    pub fn arcs(&self) -> &[(f64, f64); 4] {
        &self.arcs
    }

    /// Separation margin at α.
    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// Ψ_k(w) = e^{−iβ_k}(w − α), k = 0..4.
    pub fn psi(&self, k: usize, w: Complex64) -> Complex64 {
        Complex64::from_polar(1.0, -self.betas[k]) * (w - self.alpha)
    }

    /// Signed distance from z to the line of side k, positive inside.
    pub fn side_distance(&self, k: usize, z: Complex64) -> f64 {
        self.psi(k, z).im - self.psi(k, self.vertices[k]).im
    }

    /// Largest Im Ψ_k(ζ) over arc I_k (attained at the vertices for convex
    /// arcs).
    pub fn arc_sup(&self, k: usize) -> f64 {
        self.arc_sup[k]
    }

    /// Im Ψ_k(z) − sup_{I_k} Im Ψ_k(ζ) for each side.
    pub fn side_margins(&self, z: Complex64) -> [f64; 4] {
        core::array::from_fn(|k| self.psi(k, z).im - self.arc_sup[k])
    }

    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        (0..4).all(|k| self.side_distance(k, z) > tol)
    }

    fn sup_on_arc(&self, domain: &BoundaryCurve, k: usize) -> f64 {
        let (lo, hi) = self.arcs[k];
        let f = |t: f64| self.psi(k, domain.position(t)).im;
        let n = 256;
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        for i in 0..=n {
            let v = f(lo + (hi - lo) * i as f64 / n as f64);
            if v > best {
                best = v;
                arg = i;
            }
        }
        if arg > 0 && arg < n {
            let h = (hi - lo) / n as f64;
            let t0 = lo + h * arg as f64;
            let t = golden_min(|t| -f(t), t0 - h, t0 + h);
            best = best.max(f(t));
        }
        best
    }
}

/// Rectangle-style trapezoid for z0 with half-height δ = dist(z0, ∂Ω)/2.
pub fn inscribe_trapezoid(domain: &BoundaryCurve, z0: Complex64) -> Result<Trapezoid> {
    let d = interior_distance(domain, z0)?;
    inscribe_trapezoid_with_half_height(domain, z0, 0.5 * d)
}

/// As [`inscribe_trapezoid`] with an explicit half-height δ.
pub fn inscribe_trapezoid_with_half_height(
    domain: &BoundaryCurve,
    z0: Complex64,
    delta: f64,
) -> Result<Trapezoid> {
    interior_distance(domain, z0)?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter("half-height must be positive"));
    }
    Trapezoid::from_lines(domain, z0.im - delta, z0.im + delta, z0)
}

fn interior_distance(domain: &BoundaryCurve, z0: Complex64) -> Result<f64> {
    let d = domain.distance_to_boundary(z0);
    if !domain.contains(z0) || !(d > domain.tolerance()) {
        return Err(Error::PointNotInterior { re: z0.re, im: z0.im, distance: d });
    }
    Ok(d)
}

/// Parameter intervals I₁..I₄, I_k subtended by side k.
pub fn partition_boundary(domain: &BoundaryCurve, t: &Trapezoid) -> Result<[(f64, f64); 4]> {
    let tol = domain.tolerance();
    let p = t.vertex_params;
    let mut arcs = [(0.0, 0.0); 4];
    let mut total = 0.0;
    for k in 0..4 {
        let start = wrap_angle(p[k]);
        let mut end = wrap_angle(p[(k + 1) % 4]);
        if end <= start {
            end += TAU;
        }
        let gap = (t.vertices[k] - t.vertices[(k + 1) % 4]).norm();
        if gap <= tol || end - start <= 1e-12 {
            return Err(Error::DegenerateArc { side: k + 1, gap });
        }
        arcs[k] = (start, end);
        total += end - start;
    }
    if (total - TAU).abs() > 1e-9 {
        return Err(Error::InvalidParameter("trapezoid vertices are not in counterclockwise order"));
    }
    // Each arc lies on the far side of its side's line.
    for (k, &(lo, hi)) in arcs.iter().enumerate() {
        let line = t.psi(k, t.vertices[k]).im;
        for i in 1..64 {
            let z = domain.position(lo + (hi - lo) * i as f64 / 64.0);
            if t.psi(k, z).im > line + 1e3 * tol {
                return Err(Error::InvalidParameter("arc crosses the line of its side"));
            }
        }
    }
    Ok(arcs)
}

/// min over k of inf_{ζ∈I_k} [Im Ψ_k(z) − Im Ψ_k(ζ)].
pub fn separation_margin(t: &Trapezoid, domain: &BoundaryCurve, z: Complex64) -> Result<f64> {
    let tol = domain.tolerance();
    let dmin = (0..4).map(|k| t.side_distance(k, z)).fold(f64::INFINITY, f64::min);
    if !(dmin > tol) {
        return Err(Error::NotInTrapezoid { re: z.re, im: z.im, margin: dmin });
    }
    let m = t.side_margins(z).into_iter().fold(f64::INFINITY, f64::min);
    if !(m > 0.0) {
        return Err(Error::NotInTrapezoid { re: z.re, im: z.im, margin: m });
    }
    Ok(m)
}
