//! Branch-correct dispersion functions.
//!
//! The Dirac momentum is `k(z) = c⁻¹√(z² − c⁴/4)` on the branch holomorphic off
//! `(−∞,−c²/2] ∪ [c²/2,∞)` with `k(x) > 0` for `x > c²/2`. It is realised in
//! closed form as `(i/c)·psqrt(c⁴/4 − z²)`. Real points on the cuts are
//! evaluated as limits from the upper half-plane.
//!
//! Near `z = c²/2` every quantity is better expressed through the offset
//! `μ = z − c²/2`. [`Dispersion::at_offset`] keeps that offset exact, which
//! is what the non-relativistic limit needs.

use crate::error::{GsdError, Result};
use num_complex::Complex64 as C64;

const I: C64 = C64::new(0.0, 1.0);

/// `sin(w)/w`, entire, with a series near the origin.
pub fn sinc(w: C64) -> C64 {
    if w.norm() < 0.1 {
        let w2 = w * w;
        C64::new(1.0, 0.0) - w2 / 6.0 + w2 * w2 / 120.0 - w2 * w2 * w2 / 5040.0
            + w2 * w2 * w2 * w2 / 362_880.0
    } else {
        w.sin() / w
    }
}

/// `k` as a function of the offset `μ = z − c²/2`.
pub fn k_offset(mu: C64, c: f64) -> C64 {
    let c2 = c * c;
    // c⁴/4 − z² = −μ(μ + c²), free of cancellation near z = c²/2.
    let w = -(mu * (mu + c2));
    if mu.im == 0.0 && w.re < 0.0 {
        // Upper-half-plane limit on the cuts: Im w → ∓0 as Re z ≷ 0.
        let re_z = mu.re + 0.5 * c2;
        let s = if re_z > 0.0 { 1.0 } else { -1.0 };
        return C64::new(s * (-w.re).sqrt() / c, 0.0);
    }
    I * w.sqrt() / c
}

/// Dirac momentum `k(z)` (branch described in the module docs).
pub fn k(z: C64, c: f64) -> C64 {
    k_offset(z - 0.5 * c * c, c)
}

/// `k₁(z) = c·k(z)/(z + c²/2)`; pole at `z = −c²/2`.
pub fn k1(z: C64, c: f64) -> Result<C64> {
    Dispersion::at(z, c).k1()
}

/// `ν(x) = (1 + 1/(c²x²))^{-1/2}`, strictly increasing in `x` and `c`.
pub fn nu(x: f64, c: f64) -> Result<f64> {
    if !(x > 0.0) || !(c > 0.0) {
        return Err(GsdError::Domain(format!("nu requires x > 0 and c > 0 (x = {x}, c = {c})")));
    }
    // cx/√(1 + c²x²), written to stay accurate for tiny and huge cx.
    let t = c * x;
    Ok(t / t.hypot(1.0))
}

/// Square root with `Im ≥ 0`; the positive real axis is the limit from ℂ₊.
pub fn sqrt_up(z: C64) -> C64 {
    let s = z.sqrt();
    if s.im < 0.0 || (s.im == 0.0 && s.re < 0.0) {
        -s
    } else {
        s
    }
}

/// Dispersion data at one spectral point, parametrised by `μ = z − c²/2`.
#[derive(Debug, Clone, Copy)]
pub struct Dispersion {
    pub c: f64,
    /// Offset from the upper gap edge, `μ = z − c²/2`.
    pub mu: C64,
    pub k: C64,
}

impl Dispersion {
    pub fn at(z: C64, c: f64) -> Self {
        Self::at_offset(z - 0.5 * c * c, c)
    }

    pub fn at_offset(mu: C64, c: f64) -> Self {
        Dispersion { c, mu, k: k_offset(mu, c) }
    }

    pub fn z(&self) -> C64 {
        self.mu + 0.5 * self.c * self.c
    }

    /// `z + c²/2 = μ + c²`.
    pub fn z_plus(&self) -> C64 {
        self.mu + self.c * self.c
    }

    pub fn k1(&self) -> Result<C64> {
        let zp = self.z_plus();
        if zp.norm() <= 1e-300 {
            return Err(GsdError::Domain(format!(
                "k1 has a pole at z = -c^2/2 = {}",
                -0.5 * self.c * self.c
            )));
        }
        Ok(self.c * self.k / zp)
    }

    pub fn cos_kd(&self, d: f64) -> C64 {
        (self.k * d).cos()
    }

    /// `sin(kd)/k`, entire in `z`.
    pub fn sin_over_k(&self, d: f64) -> C64 {
        sinc(self.k * d) * d
    }

    /// `c·k₁·sin(kd) = μ·sin(kd)/k`, entire in `z`.
    pub fn ck1_sin(&self, d: f64) -> C64 {
        self.mu * self.sin_over_k(d)
    }

    /// `sin(kd)/(c·k₁) = (μ + c²)/c² · sin(kd)/k`, entire in `z`.
    pub fn sin_over_ck1(&self, d: f64) -> C64 {
        self.z_plus() / (self.c * self.c) * self.sin_over_k(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn k_examples() {
        assert!(close(k(C64::new(0.5, 0.0), 1.0), C64::new(0.0, 0.0), 1e-15));
        assert!(close(k(C64::new(1.0, 0.0), 1.0), C64::new(0.75f64.sqrt(), 0.0), 1e-15));
        assert!(close(k(C64::new(0.0, 0.0), 1.0), C64::new(0.0, 0.5), 1e-15));
        // Lower cut: negative value as the upper-half-plane limit.
        assert!(close(k(C64::new(-1.0, 0.0), 1.0), C64::new(-(0.75f64.sqrt()), 0.0), 1e-15));
        let near = k(C64::new(1.0, 1e-9), 1.0);
        assert!(close(near, k(C64::new(1.0, 0.0), 1.0), 1e-8));
    }

    #[test]
    fn k1_examples() {
        let v = k1(C64::new(1.0, 0.0), 1.0).unwrap();
        assert!(close(v, C64::new((1.0f64 / 3.0).sqrt(), 0.0), 1e-15));
        let v = k1(C64::new(0.0, 1.0), 1.0).unwrap();
        assert!(close(v, C64::new(0.894_427_190_999_916, 0.447_213_595_499_958), 1e-13));
        assert!(k1(C64::new(-0.5, 0.0), 1.0).is_err());
        assert_eq!(k1(C64::new(0.5, 0.0), 1.0).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn nu_examples() {
        assert!((nu(1.0, 1.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((nu(1e-3, 1.0).unwrap() - 9.999_995_000_003_75e-4).abs() < 1e-16);
        assert!((nu(1.0, 1e8).unwrap() - 1.0).abs() < 1e-15);
        assert!(nu(0.0, 1.0).is_err());
        assert!(nu(1.0, -1.0).is_err());
    }

    #[test]
    fn sqrt_up_examples() {
        assert!(close(sqrt_up(C64::new(4.0, 0.0)), C64::new(2.0, 0.0), 1e-15));
        assert!(close(sqrt_up(C64::new(-1.0, 0.0)), C64::new(0.0, 1.0), 1e-15));
        assert!(close(sqrt_up(C64::new(-1.0, -0.0)), C64::new(0.0, 1.0), 1e-15));
        let h = 0.5f64.sqrt();
        assert!(close(sqrt_up(C64::new(0.0, 1.0)), C64::new(h, h), 1e-15));
    }

    #[test]
    fn entire_helpers_match_direct_formulas() {
        let c = 1.3;
        let z = C64::new(0.7, 0.4);
        let d = 0.9;
        let disp = Dispersion::at(z, c);
        let k1 = disp.k1().unwrap();
        let s = (disp.k * d).sin();
        assert!(close(disp.ck1_sin(d), c * k1 * s, 1e-13));
        assert!(close(disp.sin_over_ck1(d), s / (c * k1), 1e-13));
        // Exactly at the branch point the entire forms stay finite.
        let at = Dispersion::at_offset(C64::new(0.0, 0.0), c);
        assert_eq!(at.ck1_sin(d), C64::new(0.0, 0.0));
        assert!(close(at.sin_over_ck1(d), C64::new(d, 0.0), 1e-15));
    }
}
