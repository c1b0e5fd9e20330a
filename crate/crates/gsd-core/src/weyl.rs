//! Weyl functions, γ-fields, regularizers and block spectra.
//!
//! Interval blocks use the entire forms `c·k₁·sin(kd) = μ·sin(kd)/k` and
//! `sin(kd)/(c·k₁) = (μ + c²)/c² · sin(kd)/k` with `μ = z − c²/2`. As a
//! result the only singularities of `M̃_n` are the zeros of `cos(kd)`.

use crate::dispersion::{sqrt_up, Dispersion};
use crate::error::{invalid, GsdError, Result};
use crate::states::{regularizer_diag, sin_over, ExpPoly, Model, Piece, State};
use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const ZERO: C64 = C64::new(0.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// `|cos(dk)|` below this is reported as a pole.
pub const POLE_TOL: f64 = 1e-12;

/// Kind of building block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BlockKind {
    DiracInterval { d: f64 },
    DiracHalflineLeft,
    DiracHalflineRight,
    SchrodingerInterval { d: f64 },
    SchrodingerHalflineLeft,
    SchrodingerHalflineRight,
}

impl BlockKind {
    pub fn is_dirac(&self) -> bool {
        matches!(
            self,
            BlockKind::DiracInterval { .. } | BlockKind::DiracHalflineLeft | BlockKind::DiracHalflineRight
        )
    }

    pub fn is_interval(&self) -> bool {
        matches!(self, BlockKind::DiracInterval { .. } | BlockKind::SchrodingerInterval { .. })
    }

    /// Size of `M(z)`: 2 for intervals, 1 for half-lines.
    pub fn dim(&self) -> usize {
        if self.is_interval() {
            2
        } else {
            1
        }
    }
}

/// A block together with its evaluation conventions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylBlock {
    pub kind: BlockKind,
    /// Use `M_n = R⁻¹(M̃_n − Q)R⁻¹` (interval kinds only).
    pub regularized: bool,
    /// Velocity of light (ignored for Schrödinger kinds).
    pub c: f64,
    /// Left end of an interval, or the finite end of a half-line.
    #[serde(default)]
    pub origin: f64,
}

impl WeylBlock {
    pub fn new(kind: BlockKind, regularized: bool, c: f64) -> Self {
        WeylBlock { kind, regularized, c, origin: 0.0 }
    }

    pub fn at(mut self, origin: f64) -> Self {
        self.origin = origin;
        self
    }

    pub fn model(&self) -> Model {
        if self.kind.is_dirac() {
            Model::Dirac { c: self.c }
        } else {
            Model::Schrodinger
        }
    }

    fn validate(&self) -> Result<()> {
        if self.kind.is_dirac() && !(self.c > 0.0 && self.c.is_finite()) {
            return invalid("c must be a positive real");
        }
        match self.kind {
            BlockKind::DiracInterval { d } | BlockKind::SchrodingerInterval { d } if !(d > 0.0 && d.is_finite()) => {
                invalid("interval length must be a positive real")
            }
            _ => Ok(()),
        }
    }

    /// Offset used for evaluation: `μ = z − c²/2` (Dirac), `z` (Schrödinger).
    pub fn offset(&self, z: C64) -> C64 {
        if self.kind.is_dirac() {
            z - 0.5 * self.c * self.c
        } else {
            z
        }
    }
}

/// Nearest pole of an interval block to `Re z`.
fn nearest_pole(block: &WeylBlock, z_re: f64) -> f64 {
    let ev = match block_spectrum(block, 64) {
        BlockSpectrum::Discrete(v) => v,
        BlockSpectrum::Essential { .. } => return f64::NAN,
    };
    ev.into_iter()
        .min_by(|a, b| (a - z_re).abs().total_cmp(&(b - z_re).abs()))
        .unwrap_or(f64::NAN)
}

/// Raw interval entries `(cos, M̃₁₁·cos, M̃₂₂·cos)` at offset `mu`.
pub(crate) fn interval_parts(block: &WeylBlock, mu: C64) -> (C64, C64, C64) {
    match block.kind {
        BlockKind::DiracInterval { d } => {
            let disp = Dispersion::at_offset(mu, block.c);
            (disp.cos_kd(d), disp.ck1_sin(d), disp.sin_over_ck1(d))
        }
        BlockKind::SchrodingerInterval { d } => {
            let s = sqrt_up(mu);
            let so = sin_over(s, d);
            ((s * d).cos(), mu * so, so)
        }
        _ => unreachable!("interval kinds only"),
    }
}

/// `M(z)` of a block.
pub fn weyl_eval(block: &WeylBlock, z: C64) -> Result<DMatrix<C64>> {
    weyl_eval_offset(block, block.offset(z))
}

/// `M` as a function of the offset (`μ = z − c²/2` for Dirac, `z` for
/// Schrödinger). Useful for large `c`, where `z` itself would lose digits.
pub fn weyl_eval_offset(block: &WeylBlock, mu: C64) -> Result<DMatrix<C64>> {
    block.validate()?;
    let c = block.c;
    match block.kind {
        BlockKind::DiracInterval { d } | BlockKind::SchrodingerInterval { d } => {
            let (cs, m11, m22) = interval_parts(block, mu);
            if cs.norm() < POLE_TOL {
                let z_re = if block.kind.is_dirac() { mu.re + 0.5 * c * c } else { mu.re };
                return Err(GsdError::Pole { nearest: nearest_pole(block, z_re) });
            }
            let raw = Matrix2::new(m11 / cs, 1.0 / cs, 1.0 / cs, m22 / cs);
            let m = if block.regularized { regularize_matrix(block, d, raw)? } else { raw };
            Ok(DMatrix::from_iterator(2, 2, m.iter().copied()))
        }
        BlockKind::DiracHalflineLeft | BlockKind::DiracHalflineRight => {
            let disp = Dispersion::at_offset(mu, c);
            let scale = (c * c).max(1.0);
            let left = block.kind == BlockKind::DiracHalflineLeft;
            if left && mu.norm() < POLE_TOL * scale {
                return Err(GsdError::Pole { nearest: 0.5 * c * c });
            }
            if (mu + c * c).norm() < POLE_TOL * scale {
                return Err(GsdError::Pole { nearest: -0.5 * c * c });
            }
            let ck1 = c * disp.k1()?;
            let v = if left { I / ck1 } else { I * ck1 };
            Ok(DMatrix::from_element(1, 1, v))
        }
        BlockKind::SchrodingerHalflineLeft | BlockKind::SchrodingerHalflineRight => {
            let s = sqrt_up(mu);
            if block.kind == BlockKind::SchrodingerHalflineLeft {
                if s.norm() < POLE_TOL {
                    return Err(GsdError::Pole { nearest: 0.0 });
                }
                Ok(DMatrix::from_element(1, 1, I / s))
            } else {
                Ok(DMatrix::from_element(1, 1, I * s))
            }
        }
    }
}

fn regularize_matrix(block: &WeylBlock, d: f64, m: Matrix2<C64>) -> Result<Matrix2<C64>> {
    let rp = regularizer(d, block.c, if block.kind.is_dirac() { Flavor::Dirac } else { Flavor::Schrodinger })?;
    let (r1, r2) = (rp.r[0], rp.r[1]);
    let q = rp.q_matrix().map(|x| C64::new(x, 0.0));
    let diff = m - q;
    Ok(Matrix2::new(
        diff[(0, 0)] / (r1 * r1),
        diff[(0, 1)] / (r1 * r2),
        diff[(1, 0)] / (r1 * r2),
        diff[(1, 1)] / (r2 * r2),
    ))
}

/// Block-diagonal `⊕ M_j(z)`.
pub fn assemble(blocks: &[WeylBlock], z: C64) -> Result<DMatrix<C64>> {
    let n: usize = blocks.iter().map(|b| b.kind.dim()).sum();
    let mut out = DMatrix::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        let m = weyl_eval(b, z)?;
        let k = m.nrows();
        out.view_mut((off, off), (k, k)).copy_from(&m);
        off += k;
    }
    Ok(out)
}

/// `γ(z)v`: the element of `ker(A* − z)` on the block with `Γ₀(γ(z)v) = v`.
pub fn gamma_apply(block: &WeylBlock, z: C64, v: &[C64]) -> Result<State> {
    gamma_apply_offset(block, block.offset(z), v)
}

/// [`gamma_apply`] in the offset parametrisation.
pub fn gamma_apply_offset(block: &WeylBlock, mu: C64, v: &[C64]) -> Result<State> {
    block.validate()?;
    if v.len() != block.kind.dim() {
        return invalid(format!("boundary vector must have length {}", block.kind.dim()));
    }
    let model = block.model();
    if v.iter().all(|x| *x == ZERO) {
        return Ok(State::zero(model));
    }
    let c = block.c;
    let o = block.origin;
    let piece = match block.kind {
        BlockKind::DiracInterval { d } | BlockKind::SchrodingerInterval { d } => {
            let (mut v1, mut v2) = (v[0], v[1]);
            if block.regularized {
                let (r1, r2) = regularizer_diag(model, d)?;
                v1 /= r1;
                v2 /= r2;
            }
            let (cs, _, _) = interval_parts(block, mu);
            if cs.norm() < POLE_TOL {
                let z_re = if block.kind.is_dirac() { mu.re + 0.5 * c * c } else { mu.re };
                return Err(GsdError::Pole { nearest: nearest_pole(block, z_re) });
            }
            if block.kind.is_dirac() {
                let disp = Dispersion::at_offset(mu, c);
                let q = mu / c;
                let y0 = (-v2 / c - q * v1 * disp.sin_over_k(d)) / cs;
                State::dirac_solution(c, o, d, &disp, v1, y0)
            } else {
                let s = sqrt_up(mu);
                let y0 = (v2 + v1 * mu * sin_over(s, d)) / cs;
                State::schrodinger_solution(o, d, s, v1, y0)
            }
        }
        BlockKind::DiracHalflineLeft | BlockKind::DiracHalflineRight => {
            let disp = Dispersion::at_offset(mu, c);
            if disp.k.im <= 0.0 {
                return invalid("half-line γ-field requires z off the essential spectrum");
            }
            let k1 = disp.k1()?;
            let ik = I * disp.k;
            if block.kind == BlockKind::DiracHalflineLeft {
                if k1 == ZERO {
                    return Err(GsdError::Pole { nearest: 0.5 * c * c });
                }
                let a = v[0] * I / (c * k1);
                Piece {
                    left: f64::NEG_INFINITY,
                    right: o,
                    comps: vec![ExpPoly::exp(a, -ik), ExpPoly::exp(-k1 * a, -ik)],
                }
            } else {
                Piece { left: o, right: f64::INFINITY, comps: vec![ExpPoly::exp(v[0], ik), ExpPoly::exp(k1 * v[0], ik)] }
            }
        }
        BlockKind::SchrodingerHalflineLeft | BlockKind::SchrodingerHalflineRight => {
            let s = sqrt_up(mu);
            if s.im <= 0.0 {
                return invalid("half-line γ-field requires z off [0, ∞)");
            }
            let is = I * s;
            if block.kind == BlockKind::SchrodingerHalflineLeft {
                Piece { left: f64::NEG_INFINITY, right: o, comps: vec![ExpPoly::exp(v[0] / (-is), -is)] }
            } else {
                Piece { left: o, right: f64::INFINITY, comps: vec![ExpPoly::exp(v[0], is)] }
            }
        }
    };
    Ok(State { model, pieces: vec![piece] })
}

/// Regularizer flavor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Dirac,
    Schrodinger,
}

/// `R = diag(r₁, r₂)` and `Q = [[0,1],[1,d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegularizerPair {
    pub r: [f64; 2],
    pub q: [[f64; 2]; 2],
}

impl RegularizerPair {
    pub fn r_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.r[0], 0.0, 0.0, self.r[1])
    }

    pub fn q_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.q[0][0], self.q[0][1], self.q[1][0], self.q[1][1])
    }
}

/// `R_n = diag(d^{1/2}, d^{3/2}√(1 + 1/(c²d²)))` (Dirac) or
/// `diag(d^{1/2}, d^{3/2})` (Schrödinger), with `Q_n = [[0,1],[1,d]]`.
pub fn regularizer(d: f64, c: f64, flavor: Flavor) -> Result<RegularizerPair> {
    if !(d > 0.0 && d.is_finite()) {
        return invalid("d must be a positive real");
    }
    let model = match flavor {
        Flavor::Dirac => Model::Dirac { c },
        Flavor::Schrodinger => Model::Schrodinger,
    };
    let (r1, r2) = regularizer_diag(model, d)?;
    Ok(RegularizerPair { r: [r1, r2], q: [[0.0, 1.0], [1.0, d]] })
}

/// Closed form of `M_n′(c²/2)` for the regularized Dirac block.
pub fn weyl_derivative_gap_center(d: f64, c: f64) -> Result<Matrix2<f64>> {
    if !(d > 0.0) || !(c > 0.0) {
        return invalid("d and c must be positive");
    }
    let nu = crate::dispersion::nu(d, c)?;
    let cd2 = (c * d).powi(2);
    let off = 0.5 * nu;
    Ok(Matrix2::new(1.0, off, off, (3.0 + cd2) / (3.0 * (1.0 + cd2))))
}

/// Spectrum of the block's reference operator.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BlockSpectrum {
    /// Sorted eigenvalues.
    Discrete(Vec<f64>),
    /// Purely absolutely continuous spectrum, multiplicity one, on these
    /// closed intervals (±∞ allowed).
    Essential { intervals: Vec<(f64, f64)> },
}

/// Eigenvalues for `j = 0..=j_max` (both signs for Dirac), or the
/// essential-spectrum descriptor for half-lines.
pub fn block_spectrum(block: &WeylBlock, j_max: usize) -> BlockSpectrum {
    let c = block.c;
    match block.kind {
        BlockKind::DiracInterval { d } => {
            let mut v = Vec::with_capacity(2 * (j_max + 1));
            for j in 0..=j_max {
                let w = c * PI / d * (j as f64 + 0.5);
                let e = w.hypot(0.5 * c * c);
                v.push(e);
                v.push(-e);
            }
            v.sort_by(f64::total_cmp);
            BlockSpectrum::Discrete(v)
        }
        BlockKind::SchrodingerInterval { d } => {
            BlockSpectrum::Discrete((0..=j_max).map(|j| (PI / d * (j as f64 + 0.5)).powi(2)).collect())
        }
        BlockKind::DiracHalflineLeft | BlockKind::DiracHalflineRight => BlockSpectrum::Essential {
            intervals: vec![(f64::NEG_INFINITY, -0.5 * c * c), (0.5 * c * c, f64::INFINITY)],
        },
        BlockKind::SchrodingerHalflineLeft | BlockKind::SchrodingerHalflineRight => {
            BlockSpectrum::Essential { intervals: vec![(0.0, f64::INFINITY)] }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{boundary_map, BoundaryFlavor};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn gap_center_values() {
        for &(d, cc) in &[(1.0, 1.0), (0.3, 2.5), (4.0, 0.7)] {
            let raw = WeylBlock::new(BlockKind::DiracInterval { d }, false, cc);
            let m = weyl_eval(&raw, c(0.5 * cc * cc, 0.0)).unwrap();
            assert!((m[(0, 0)]).norm() < 1e-15 && (m[(0, 1)] - 1.0).norm() < 1e-15);
            assert!((m[(1, 1)] - d).norm() < 1e-14);
            let reg = WeylBlock { regularized: true, ..raw };
            let m = weyl_eval(&reg, c(0.5 * cc * cc, 0.0)).unwrap();
            assert!(m.iter().all(|x| x.norm() < 1e-14));
        }
    }

    #[test]
    fn halfline_right_example() {
        let b = WeylBlock::new(BlockKind::DiracHalflineRight, false, 1.0);
        let m = weyl_eval(&b, c(0.0, 1.0)).unwrap()[(0, 0)];
        assert!((m - c(-0.447_213_595_499_958, 0.894_427_190_999_916)).norm() < 1e-13);
    }

    #[test]
    fn regularizer_examples() {
        let r = regularizer(1.0, 1.0, Flavor::Dirac).unwrap();
        assert!((r.r[0] - 1.0).abs() < 1e-15 && (r.r[1] - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(r.q, [[0.0, 1.0], [1.0, 1.0]]);
        let r = regularizer(4.0, 1.0, Flavor::Dirac).unwrap();
        assert!((r.r[1] - 68f64.sqrt()).abs() < 1e-13);
        let r = regularizer(1.0, 1e9, Flavor::Dirac).unwrap();
        assert!((r.r[1] - 1.0).abs() < 1e-15);
        assert!(regularizer(0.0, 1.0, Flavor::Dirac).is_err());
    }

    #[test]
    fn derivative_example() {
        let m = weyl_derivative_gap_center(1.0, 1.0).unwrap();
        assert!((m[(0, 1)] - 0.353_553_390_593_273_8).abs() < 1e-15);
        assert!((m[(1, 1)] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn block_spectrum_examples() {
        let b = WeylBlock::new(BlockKind::DiracInterval { d: 1.0 }, false, 1.0);
        let BlockSpectrum::Discrete(v) = block_spectrum(&b, 0) else { panic!() };
        let e = (PI * PI / 4.0 + 0.25f64).sqrt();
        assert!((v[1] - e).abs() < 1e-15 && (v[0] + e).abs() < 1e-15);
        assert!((e - 1.648_454_154_737_807_5).abs() < 1e-15);
        let s = WeylBlock::new(BlockKind::SchrodingerInterval { d: 1.0 }, false, 1.0);
        let BlockSpectrum::Discrete(v) = block_spectrum(&s, 0) else { panic!() };
        assert!((v[0] - 2.467_401_1).abs() < 1e-7);
        let h = WeylBlock::new(BlockKind::DiracHalflineLeft, false, 1.0);
        assert!(matches!(block_spectrum(&h, 3), BlockSpectrum::Essential { .. }));
        assert!(matches!(weyl_eval(&b, c(e, 0.0)), Err(GsdError::Pole { .. })));
    }

    #[test]
    fn gamma_field_is_right_inverse_and_gives_m() {
        let z = c(0.3, 0.8);
        let v = [c(1.0, -0.5), c(0.2, 0.7)];
        let cases = [
            (BlockKind::DiracInterval { d: 0.8 }, false, BoundaryFlavor::Tilde),
            (BlockKind::DiracInterval { d: 0.8 }, true, BoundaryFlavor::Regularized),
            (BlockKind::DiracHalflineLeft, false, BoundaryFlavor::HalfLineLeft),
            (BlockKind::DiracHalflineRight, false, BoundaryFlavor::HalfLineRight),
            (BlockKind::SchrodingerInterval { d: 0.8 }, false, BoundaryFlavor::SchrodingerTilde),
            (BlockKind::SchrodingerInterval { d: 0.8 }, true, BoundaryFlavor::SchrodingerRegularized),
            (BlockKind::SchrodingerHalflineLeft, false, BoundaryFlavor::SchrodingerHalfLineLeft),
            (BlockKind::SchrodingerHalflineRight, false, BoundaryFlavor::SchrodingerHalfLineRight),
        ];
        for (kind, reg, flavor) in cases {
            let b = WeylBlock::new(kind, reg, 1.3).at(0.4);
            let n = kind.dim();
            let m = weyl_eval(&b, z).unwrap();
            for j in 0..n {
                let mut e = vec![C64::new(0.0, 0.0); n];
                e[j] = v[j];
                let st = gamma_apply(&b, z, &e).unwrap();
                let bd = boundary_map(&st, flavor).unwrap();
                for i in 0..n {
                    assert!((bd.u[i] - e[i]).norm() < 1e-12, "{kind:?} Γ₀");
                    assert!((bd.v[i] - m[(i, j)] * v[j]).norm() < 1e-11, "{kind:?} Γ₁");
                }
            }
        }
    }
}
