//! Jacobi boundary operators and a Sturm-bisection eigensolver.
//!
//! Rows are flattened from `ℓ²(ℕ) ⊗ ℂ²`: for the `m`-th interval (1-based),
//! row `2m − 2` is its first and row `2m − 1` its second component. Entries
//! (0-based row `i`, `ν_m = ν(d_m)`):
//!
//! | entry              | α flavor                         | β flavor                          |
//! |--------------------|----------------------------------|-----------------------------------|
//! | `diag[0]`          | `0`                              | `0`                               |
//! | `diag[2m − 1]`     | `−ν_m²/d_m²`                     | `−ν_m²(β_m + d_m)/d_m³`           |
//! | `diag[2m]`         | `α_m/d_{m+1}`                    | `0`                               |
//! | `off[2m − 2]`      | `−ν_m/d_m²`                      | same                              |
//! | `off[2m − 1]`      | `ν_m/(d_m^{3/2} d_{m+1}^{1/2})`  | same                              |
//!
//! Schrödinger flavors set `ν ≡ 1`. These are exactly the entries of
//! `R_X⁻¹(B̃ − Q_X)R_X⁻¹`.

use crate::dispersion::nu;
use crate::error::{invalid, Result};
use crate::model::{Lattice, SequenceRule, StrengthKind, StrengthSeq};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Which Jacobi matrix a [`TridiagonalOperator`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JacobiFlavor {
    AlphaDirac,
    BetaDirac,
    AlphaSchrodinger,
    BetaSchrodinger,
    Custom,
}

impl JacobiFlavor {
    pub const LATTICE_FLAVORS: [JacobiFlavor; 4] = [
        JacobiFlavor::AlphaDirac,
        JacobiFlavor::BetaDirac,
        JacobiFlavor::AlphaSchrodinger,
        JacobiFlavor::BetaSchrodinger,
    ];

    pub fn is_beta(&self) -> bool {
        matches!(self, JacobiFlavor::BetaDirac | JacobiFlavor::BetaSchrodinger)
    }

    pub fn is_dirac(&self) -> bool {
        matches!(self, JacobiFlavor::AlphaDirac | JacobiFlavor::BetaDirac)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Source {
    Lattice { lattice: Lattice, strengths: SequenceRule, c: f64 },
    Explicit { diag: Vec<f64>, off: Vec<f64> },
}

/// Symmetric tridiagonal operator given by entry generators.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    pub flavor: JacobiFlavor,
    source: Source,
    abs_off: bool,
}

/// Build the Jacobi matrix of a GS realization.
pub fn build(flavor: JacobiFlavor, lattice: &Lattice, strengths: &StrengthSeq, c: f64) -> Result<TridiagonalOperator> {
    if flavor == JacobiFlavor::Custom {
        return invalid("use TridiagonalOperator::explicit for custom operators");
    }
    let want = if flavor.is_beta() { StrengthKind::Beta } else { StrengthKind::Alpha };
    if strengths.kind != want {
        return invalid(format!("{flavor:?} expects {want:?} strengths"));
    }
    if flavor.is_dirac() && !(c > 0.0 && c.is_finite()) {
        return invalid("c must be a positive real");
    }
    let rule = &strengths.rule;
    if rule.tail_is_infinite() {
        return invalid("+inf strengths decouple the operator; use the classifier or the transfer oracle");
    }
    let listed = match rule {
        SequenceRule::Explicit { values } => values.clone(),
        SequenceRule::CustomTail { prefix, .. } => prefix.clone(),
        _ => Vec::new(),
    };
    if listed.iter().any(|v| !v.is_finite()) {
        return invalid("+inf strengths decouple the operator; use the classifier or the transfer oracle");
    }
    if let (Some(n), Some(len)) = (lattice.len(), rule.len()) {
        if len + 1 < n {
            return invalid(format!("{n} intervals need at least {} strengths, got {len}", n - 1));
        }
    }
    if lattice.is_infinite() && rule.len().is_some() {
        return invalid("an infinite lattice needs an infinite strength rule");
    }
    Ok(TridiagonalOperator {
        flavor,
        source: Source::Lattice { lattice: lattice.clone(), strengths: rule.clone(), c },
        abs_off: false,
    })
}

impl TridiagonalOperator {
    /// Finite operator from explicit entries (`off.len() + 1 == diag.len()`).
    pub fn explicit(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return invalid("need diag.len() = off.len() + 1 ≥ 1");
        }
        if diag.iter().chain(&off).any(|v| !v.is_finite()) {
            return invalid("entries must be finite");
        }
        Ok(TridiagonalOperator { flavor: JacobiFlavor::Custom, source: Source::Explicit { diag, off }, abs_off: false })
    }

    /// Largest admissible truncation (`None` = semi-infinite).
    pub fn max_rows(&self) -> Option<usize> {
        match &self.source {
            Source::Explicit { diag, .. } => Some(diag.len()),
            Source::Lattice { lattice, .. } => lattice.len().map(|n| 2 * n),
        }
    }

    fn nu_of(&self, d: f64, c: f64) -> f64 {
        if self.flavor.is_dirac() {
            nu(d, c).expect("validated lattice")
        } else {
            1.0
        }
    }

    /// Diagonal entry `i` (0-based).
    pub fn diag(&self, i: usize) -> f64 {
        match &self.source {
            Source::Explicit { diag, .. } => diag[i],
            Source::Lattice { lattice, strengths, c } => {
                if i == 0 {
                    return 0.0;
                }
                let m = i.div_ceil(2);
                if i % 2 == 1 {
                    let d = lattice.d(m);
                    let nu = self.nu_of(d, *c);
                    if self.flavor.is_beta() {
                        -nu * nu * (strengths.term(m) + d) / (d * d * d)
                    } else {
                        -nu * nu / (d * d)
                    }
                } else if self.flavor.is_beta() {
                    0.0
                } else {
                    strengths.term(m) / lattice.d(m + 1)
                }
            }
        }
    }

    /// Off-diagonal entry between rows `i` and `i + 1`.
    pub fn off(&self, i: usize) -> f64 {
        let v = match &self.source {
            Source::Explicit { off, .. } => off[i],
            Source::Lattice { lattice, c, .. } => {
                let m = i / 2 + 1;
                let d = lattice.d(m);
                let nu = self.nu_of(d, *c);
                if i % 2 == 0 {
                    -nu / (d * d)
                } else {
                    nu / (d.powf(1.5) * lattice.d(m + 1).sqrt())
                }
            }
        };
        if self.abs_off {
            v.abs()
        } else {
            v
        }
    }

    /// Leading `n × n` section as `(diag, off)`.
    pub fn truncate(&self, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        if n == 0 {
            return invalid("truncation size must be positive");
        }
        if let Some(max) = self.max_rows() {
            if n > max {
                return invalid(format!("operator has only {max} rows"));
            }
        }
        Ok(((0..n).map(|i| self.diag(i)).collect(), (0..n - 1).map(|i| self.off(i)).collect()))
    }

    /// Leading section as a dense matrix.
    pub fn dense(&self, n: usize) -> Result<DMatrix<f64>> {
        let (d, o) = self.truncate(n)?;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = d[i];
        }
        for i in 0..n - 1 {
            m[(i, i + 1)] = o[i];
            m[(i + 1, i)] = o[i];
        }
        Ok(m)
    }
}

/// `B′`: the same operator with `|off|` entries (unitarily equivalent via a
/// diagonal sign flip).
pub fn sign_normalize(op: &TridiagonalOperator) -> TridiagonalOperator {
    TridiagonalOperator { abs_off: true, ..op.clone() }
}

/// `max |B − R⁻¹(B̃ − Q)R⁻¹| / max(1, |R⁻¹(B̃ − Q)R⁻¹|)` entrywise over the
/// leading `rows × rows` section.
pub fn factorization_residual(op: &TridiagonalOperator, rows: usize) -> Result<f64> {
    if rows < 2 {
        return invalid("need at least 2 rows");
    }
    let Source::Lattice { lattice, strengths, c } = &op.source else {
        return invalid("factorization applies to lattice operators only");
    };
    let built = op.dense(rows)?;
    let blocks = rows.div_ceil(2);
    let mut r = vec![0.0; 2 * blocks];
    let mut q = DMatrix::<f64>::zeros(2 * blocks, 2 * blocks);
    for m in 1..=blocks {
        let d = lattice.d(m);
        let nu = op.nu_of(d, *c);
        r[2 * m - 2] = d.sqrt();
        r[2 * m - 1] = d.powf(1.5) / nu;
        q[(2 * m - 2, 2 * m - 1)] = 1.0;
        q[(2 * m - 1, 2 * m - 2)] = 1.0;
        q[(2 * m - 1, 2 * m - 1)] = d;
    }
    let mut bt = DMatrix::<f64>::zeros(2 * blocks, 2 * blocks);
    for m in 1..=blocks {
        let s = strengths.term(m);
        if op.flavor.is_beta() {
            bt[(2 * m - 1, 2 * m - 1)] = -s;
        }
        if m < blocks {
            bt[(2 * m - 1, 2 * m)] = 1.0;
            bt[(2 * m, 2 * m - 1)] = 1.0;
            if !op.flavor.is_beta() {
                bt[(2 * m, 2 * m)] = s;
            }
        }
    }
    let mut worst: f64 = 0.0;
    for i in 0..rows {
        for j in 0..rows {
            let f = (bt[(i, j)] - q[(i, j)]) / (r[i] * r[j]);
            let mut b = built[(i, j)];
            if op.abs_off && i != j {
                b = if f < 0.0 { -b.abs() } else { b };
            }
            worst = worst.max((b - f).abs() / f.abs().max(1.0));
        }
    }
    Ok(worst)
}

/// Number of eigenvalues `< x` of the tridiagonal matrix (Sturm count).
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    let tiny = f64::MIN_POSITIVE.sqrt();
    for i in 0..diag.len() {
        if i > 0 {
            let b = off[i - 1];
            q = diag[i] - x - b * b / q;
        }
        if q == 0.0 {
            // Perturb exact zero pivots; keeps the count consistent.
            q = -tiny * (1.0 + x.abs());
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin bounds of the tridiagonal matrix.
pub fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

/// Which eigenvalues to compute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Which {
    All,
    /// The `k` smallest.
    Lowest(usize),
    /// 0-based indices `start..end` in ascending order.
    Indices(usize, usize),
    /// Eigenvalues in `[lo, hi)`.
    Window(f64, f64),
}

/// `k`-th smallest eigenvalue (0-based) by bisection.
fn bisect(diag: &[f64], off: &[f64], k: usize, lo: f64, hi: f64, tol: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if sturm_count(diag, off, m) > k {
            b = m;
        } else {
            a = m;
        }
    }
    0.5 * (a + b)
}

/// Eigenvalues of the leading `n × n` section, ascending, to absolute
/// tolerance `1e−12·(1 + spectral-radius bound)`. Parallel over indices;
/// results do not depend on the schedule.
pub fn eigenvalues_truncated(op: &TridiagonalOperator, n: usize, which: Which) -> Result<Vec<f64>> {
    let (diag, off) = op.truncate(n)?;
    Ok(tridiagonal_eigenvalues(&diag, &off, which))
}

/// Sturm-bisection eigenvalues of explicit tridiagonal entries.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64], which: Which) -> Vec<f64> {
    let n = diag.len();
    if n == 1 {
        let inside = match which {
            Which::Window(a, b) => a <= diag[0] && diag[0] < b,
            Which::Lowest(k) => k > 0,
            Which::Indices(s, e) => s == 0 && e > 0,
            Which::All => true,
        };
        return if inside { vec![diag[0]] } else { Vec::new() };
    }
    let (glo, ghi) = gershgorin(diag, off);
    let radius = glo.abs().max(ghi.abs());
    let tol = 1e-12 * (1.0 + radius);
    let pad = tol + f64::EPSILON * radius;
    let (lo, hi) = (glo - pad, ghi + pad);
    let (start, end) = match which {
        Which::All => (0, n),
        Which::Lowest(k) => (0, k.min(n)),
        Which::Indices(s, e) => (s.min(n), e.min(n)),
        Which::Window(a, b) => (sturm_count(diag, off, a), sturm_count(diag, off, b)),
    };
    (start..end).into_par_iter().map(|k| bisect(diag, off, k, lo, hi, tol)).collect()
}

/// Lowest `k` eigenvalues for each truncation size; a convergence-in-`N`
/// diagnostic for the semi-infinite operator (a window, not a certificate).
pub fn truncation_window(op: &TridiagonalOperator, sizes: &[usize], k: usize) -> Result<Vec<(usize, Vec<f64>)>> {
    sizes.iter().map(|&n| Ok((n, eigenvalues_truncated(op, n, Which::Lowest(k))?))).collect()
}
