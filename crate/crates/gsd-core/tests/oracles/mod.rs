//! Independent reference computations for tests.
//!
//! Nothing here calls into the library's algorithms. Each oracle rebuilds
//! its quantity from first principles: analytic continuation, numerical
//! quadrature, numerical ODE integration or dense linear algebra.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// `k(z) = c⁻¹√(z² − c⁴/4)` by analytic continuation.
///
/// The path starts at `z = iH` for large `H`, where `k ≈ z/c` fixes the sign.
/// It then walks to the target in small steps without touching the cuts
/// `|Re z| ≥ c²/2` on the real axis. At each step it keeps the root closest
/// to the previous value. A target in ℂ₋ is reached through the gap on the
/// imaginary axis.
pub fn k_continuation(z: C64, c: f64) -> C64 {
    let c4 = c.powi(4) / 4.0;
    let roots = |w: C64| {
        let r = (w * w - c4).sqrt() / c;
        (r, -r)
    };
    let scale = 10.0 * (c * c + z.norm() + 1.0);
    let start = C64::new(0.0, scale);
    let mut k = {
        let (a, b) = roots(start);
        let guess = start / c;
        if (a - guess).norm() < (b - guess).norm() {
            a
        } else {
            b
        }
    };
    let walk = |from: C64, to: C64, k: &mut C64| {
        let steps = 4000;
        for i in 1..=steps {
            let w = from + (to - from) * (i as f64 / steps as f64);
            let (a, b) = roots(w);
            *k = if (a - *k).norm() <= (b - *k).norm() { a } else { b };
        }
    };
    if z.im > 0.0 {
        let corner = C64::new(z.re, scale);
        walk(start, corner, &mut k);
        walk(corner, z, &mut k);
    } else {
        let down = C64::new(0.0, -scale);
        walk(start, down, &mut k);
        let corner = C64::new(z.re, -scale);
        walk(down, corner, &mut k);
        walk(corner, z, &mut k);
    }
    k
}

/// Adaptive Simpson quadrature of a complex integrand on `[a, b]`.
pub fn integrate<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, tol: f64) -> C64 {
    fn rec<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, fa: C64, fm: C64, fb: C64, whole: C64, tol: f64, depth: u32) -> C64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.norm() <= 15.0 * tol.max(1e-15 * (left + right).norm()) {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 30)
}

/// Symmetric tridiagonal eigenvalues by implicit QL with Wilkinson shifts.
pub fn tridiagonal_ql(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e: Vec<f64> = off.iter().copied().chain(std::iter::once(0.0)).collect();
    e.truncate(n);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 200, "QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    d
}

/// Dense symmetric eigenvalues through nalgebra.
pub fn dense_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i];
        if i + 1 < n {
            m[(i, i + 1)] = off[i];
            m[(i + 1, i)] = off[i];
        }
    }
    let mut v: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Kind of point interaction.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Jump {
    Delta,
    DeltaPrime,
}

/// Chain description for the RK4 shooting oracle (finite interval only).
#[derive(Clone, Debug)]
pub struct Chain {
    /// `None` ⇒ Schrödinger.
    pub c: Option<f64>,
    pub gaps: Vec<f64>,
    /// Finite strengths at the interior nodes.
    pub strengths: Vec<f64>,
    pub jump: Jump,
    /// `true`: f₂(a) = 0 (resp. f′(a) = 0); `false`: f₁(a) = 0 (resp. f(a) = 0).
    pub left_f2_zero: bool,
    /// `true`: f₁(b) = 0 (resp. f(b) = 0); `false`: f₂(b) = 0 (resp. f′(b) = 0).
    pub right_f1_zero: bool,
}

/// Right-boundary functional from RK4 integration of the first-order system.
///
/// Dirac: with `f₂ = i g`, `f₁′ = −((λ + c²/2)/c) g` and
/// `g′ = ((λ − c²/2)/c) f₁`. Schrödinger: `f″ = −λ f`.
pub fn rk4_functional(ch: &Chain, lambda: f64, steps_per_unit: usize) -> f64 {
    let (p, q) = match ch.c {
        Some(c) => ((lambda + 0.5 * c * c) / c, (lambda - 0.5 * c * c) / c),
        None => (-1.0, -lambda),
    };
    // y = (f₁, g) [Dirac] or (f, f′) [Schrödinger]; y′ = (−p y₂, q y₁).
    let rhs = |y: [f64; 2]| [-p * y[1], q * y[0]];
    let mut y = if ch.left_f2_zero { [1.0, 0.0] } else { [0.0, 1.0] };
    for (i, &d) in ch.gaps.iter().enumerate() {
        let n = ((d * steps_per_unit as f64).ceil() as usize).max(16);
        let h = d / n as f64;
        for _ in 0..n {
            let k1 = rhs(y);
            let k2 = rhs([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
            let k3 = rhs([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
            let k4 = rhs([y[0] + h * k3[0], y[1] + h * k3[1]]);
            y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
            y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        }
        if i < ch.strengths.len() {
            let s = ch.strengths[i];
            match (ch.c, ch.jump) {
                // f₂ jump −(iα/c) f₁ ⇒ g jump −(α/c) f₁
                (Some(c), Jump::Delta) => y[1] -= s / c * y[0],
                // f₁ jump iβc f₂ = −βc g
                (Some(c), Jump::DeltaPrime) => y[0] -= s * c * y[1],
                (None, Jump::Delta) => y[1] += s * y[0],
                (None, Jump::DeltaPrime) => y[0] += s * y[1],
            }
        }
        let m = y[0].abs().max(y[1].abs());
        y = [y[0] / m, y[1] / m];
    }
    if ch.right_f1_zero {
        y[0]
    } else {
        y[1]
    }
}

/// Roots of a real function by a sign scan and bisection.
pub fn scan_roots<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).ceil() as usize;
    let h = (hi - lo) / n as f64;
    let mut out = Vec::new();
    let mut xa = lo;
    let mut fa = f(xa);
    for i in 1..=n {
        let xb = lo + i as f64 * h;
        let fb = f(xb);
        if fa == 0.0 {
            out.push(xa);
        } else if fa * fb < 0.0 {
            let (mut a, mut b, mut fl) = (xa, xb, fa);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let fm = f(m);
                if fm * fl <= 0.0 {
                    b = m;
                } else {
                    a = m;
                    fl = fm;
                }
            }
            out.push(0.5 * (a + b));
        }
        xa = xb;
        fa = fb;
    }
    out
}

/// Central finite difference.
pub fn central_difference<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}
