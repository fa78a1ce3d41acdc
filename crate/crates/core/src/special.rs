//! Modified Bessel functions of the second kind and Jacobi elliptic
//! functions.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_TERMS: usize = 200;

/// Power series for K₀(x), principal branch of the logarithm. Accurate for
/// |x| ≲ 8 with Re x > 0; cancellation grows like e^{2|x|} beyond that.
pub fn bessel_k0(x: Complex64) -> Complex64 {
    let q = x * x * 0.25;
    let log_term = (x * 0.5).ln() + EULER_GAMMA;
    let mut term = Complex64::new(1.0, 0.0);
    let mut i0 = term;
    let mut tail = Complex64::new(0.0, 0.0);
    let mut harmonic = 0.0;
    for k in 1..SERIES_TERMS {
        let kf = k as f64;
        term *= q / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail += term * harmonic;
        if term.norm() * harmonic.max(1.0) <= 1e-18 * (i0.norm() + tail.norm()) {
            break;
        }
    }
    tail - log_term * i0
}

/// Power series for K₁(x).
pub fn bessel_k1(x: Complex64) -> Complex64 {
    let q = x * x * 0.25;
    // ψ(k+1) + ψ(k+2) with ψ(1) = −γ.
    let mut psi_sum = -2.0 * EULER_GAMMA + 1.0;
    let mut term = Complex64::new(1.0, 0.0); // (x²/4)^k / (k!(k+1)!)
    let mut i1 = term;
    let mut tail = term * psi_sum;
    for k in 1..SERIES_TERMS {
        let kf = k as f64;
        term *= q / (kf * (kf + 1.0));
        psi_sum += 1.0 / kf + 1.0 / (kf + 1.0);
        i1 += term;
        tail += term * psi_sum;
        if term.norm() * psi_sum.abs().max(1.0) <= 1e-18 * (i1.norm() + tail.norm()) {
            break;
        }
    }
    let half = x * 0.5;
    x.inv() + half.ln() * half * i1 - half * 0.5 * tail
}

/// Arithmetic–geometric mean of two positive reals.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 1e-15 * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    0.5 * (a + b)
}

/// Complete elliptic integral of the first kind K(k), modulus 0 ≤ k < 1.
pub fn elliptic_k(k: f64) -> f64 {
    PI / (2.0 * agm(1.0, (1.0 - k * k).sqrt()))
}

/// Modulus k = θ₂²(q)/θ₃²(q) of the elliptic functions with nome q.
pub fn modulus_from_nome(q: f64) -> f64 {
    if q <= 0.0 {
        return 0.0;
    }
    let mut t2 = 0.0;
    let mut t3 = 1.0;
    for n in 0..64 {
        let nf = n as f64;
        let a = q.powf(nf * (nf + 1.0));
        t2 += a;
        if n > 0 {
            t3 += 2.0 * q.powf(nf * nf);
        }
        if a < 1e-18 {
            break;
        }
    }
    t2 *= 2.0 * q.powf(0.25);
    (t2 / t3) * (t2 / t3)
}

/// Values of the three Jacobi elliptic functions at one argument.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jacobi<T> {
    pub sn: T,
    pub cn: T,
    pub dn: T,
}

/// sn, cn, dn for real u and modulus 0 ≤ k < 1 by the descending AGM scheme.
pub fn jacobi_real(u: f64, k: f64) -> Jacobi<f64> {
    if k == 0.0 {
        return Jacobi { sn: u.sin(), cn: u.cos(), dn: 1.0 };
    }
    let mut a = [0.0f64; 32];
    let mut c = [0.0f64; 32];
    a[0] = 1.0;
    let mut b = (1.0 - k * k).sqrt();
    c[0] = k;
    let mut n = 0;
    while c[n].abs() > 1e-15 && n + 1 < a.len() {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        n += 1;
    }
    let mut phi = (1u64 << n) as f64 * a[n] * u;
    let mut prev = phi;
    for i in (1..=n).rev() {
        prev = phi;
        phi = 0.5 * (phi + (c[i] / a[i] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    let dn = if n == 0 {
        1.0
    } else if cn.abs() > 0.1 {
        cn / (prev - phi).cos()
    } else {
        (1.0 - k * k * sn * sn).sqrt()
    };
    Jacobi { sn, cn, dn }
}

/// sn, cn, dn at complex u = x + iy via the addition theorem, combining
/// the functions at (x, k) and (y, k′).
pub fn jacobi_complex(u: Complex64, k: f64) -> Jacobi<Complex64> {
    let kp = (1.0 - k * k).sqrt();
    let Jacobi { sn: s, cn: c, dn: d } = jacobi_real(u.re, k);
    let Jacobi { sn: s1, cn: c1, dn: d1 } = jacobi_real(u.im, kp);
    let den = c1 * c1 + k * k * s * s * s1 * s1;
    let sn = Complex64::new(s * d1, c * d * s1 * c1) / den;
    let cn = Complex64::new(c * c1, -s * d * s1 * d1) / den;
    let dn = Complex64::new(d * c1 * d1, -k * k * s * c * s1) / den;
    Jacobi { sn, cn, dn }
}
