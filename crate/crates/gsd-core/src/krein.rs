//! Finite configurations: Krein-formula eigenvalues, transfer-matrix oracles,
//! the Krein correction term and the non-relativistic limit.
//!
//! A finite configuration is a chain of blocks: an optional left half-line,
//! `M ≥ 1` intervals and an optional right half-line. Each block carries the
//! unregularized triplet. Boundary values at a node are described by the
//! pair `(F, G)`. For Dirac, `F = f₁` and `G = ic·f₂`. For Schrödinger,
//! `F = f` and `G = f′`. In this notation both models share the same
//! interface rows:
//!
//! | strength | rows                                     |
//! |----------|------------------------------------------|
//! | α finite | `F₊ = F₋`, `G₊ − G₋ = α F`               |
//! | β finite | `G₊ = G₋`, `F₊ − F₋ = β G`               |
//! | α = +∞   | `F₋ = 0`, `F₊ = 0` (decoupling)          |
//! | β = +∞   | `G₋ = 0`, `G₊ = 0` (decoupling)          |
//!
//! A realization is the relation `AΓ̃₀ + BΓ̃₁ = 0`. When `B` is invertible this
//! is `Γ̃₁ = Θ̃Γ̃₀`. The secular function is the pole-cleared determinant
//! `S(λ) = det(Θ̃ − M̃(λ)) · Π cos(d_n k(λ))`. It is evaluated through a column
//! transform that is entire in `λ`, so it never divides by `cos`.

use crate::error::{invalid, GsdError, Result};
use crate::model::{Count, Lattice, SequenceRule, StrengthKind, StrengthSeq};
use crate::states::{inner_product, Model, State};
use crate::weyl::{gamma_apply_offset, interval_parts, weyl_eval_offset, BlockKind, WeylBlock};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Minimum distance of a window end from a branch point.
pub const BRANCH_MARGIN: f64 = 1e-9;
/// Radius of the windows around `σ(A₀)` that the oracle re-adjudicates.
pub const A0_RADIUS: f64 = 1e-6;
/// Roots closer than this within one scan are merged.
pub const DEDUP: f64 = 1e-9;

/// Boundary condition at a finite end, or a half-line continuation.
///
/// For Schrödinger data `f1_zero` reads `f(·) = 0` and `f2_zero` reads `f′(·) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum End {
    F1Zero,
    F2Zero,
    HalfLine,
}

/// A finite Gesztesy–Šeba configuration (or its Schrödinger analogue).
///
/// Strengths are consumed in node order. Each interior node takes one. When
/// the left (right) end is a half-line, the node `x₀` (`x_M`) also takes one.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizationSpec {
    pub model: Model,
    pub lattice: Lattice,
    pub strengths: StrengthSeq,
    pub left: End,
    pub right: End,
}

/// Internal node-by-node description.
#[derive(Debug, Clone, PartialEq)]
struct Layout {
    model: Model,
    kind: StrengthKind,
    origin: f64,
    gaps: Vec<f64>,
    left: End,
    right: End,
    /// Strength at every node `x₀..x_M`; `None` where the node is a plain end.
    nodes: Vec<Option<f64>>,
}

impl RealizationSpec {
    pub fn new(model: Model, lattice: Lattice, strengths: StrengthSeq, left: End, right: End) -> Result<Self> {
        let spec = RealizationSpec { model, lattice, strengths, left, right };
        spec.layout()?;
        Ok(spec)
    }

    pub fn dirac(c: f64, lattice: Lattice, strengths: StrengthSeq, left: End, right: End) -> Result<Self> {
        Self::new(Model::Dirac { c }, lattice, strengths, left, right)
    }

    pub fn schrodinger(lattice: Lattice, strengths: StrengthSeq, left: End, right: End) -> Result<Self> {
        Self::new(Model::Schrodinger, lattice, strengths, left, right)
    }

    /// Same data on another model (boundary conditions map one-to-one).
    pub fn with_model(&self, model: Model) -> Result<Self> {
        Self::new(model, self.lattice.clone(), self.strengths.clone(), self.left, self.right)
    }

    /// `c` of a Dirac spec.
    pub fn c(&self) -> Option<f64> {
        match self.model {
            Model::Dirac { c } => Some(c),
            Model::Schrodinger => None,
        }
    }

    /// `λ − offset`: `c²/2` for Dirac, 0 for Schrödinger.
    pub fn shift(&self) -> f64 {
        self.c().map_or(0.0, |c| 0.5 * c * c)
    }

    pub fn has_half_line(&self) -> bool {
        self.left == End::HalfLine || self.right == End::HalfLine
    }

    /// Number of interaction nodes (strengths consumed).
    pub fn interaction_count(&self) -> usize {
        let m = self.lattice.len().unwrap_or(0);
        m - 1 + usize::from(self.left == End::HalfLine) + usize::from(self.right == End::HalfLine)
    }

    fn layout(&self) -> Result<Layout> {
        if let Model::Dirac { c } = self.model {
            if !(c > 0.0 && c.is_finite()) {
                return invalid("c must be a positive real");
            }
        }
        let Some(m) = self.lattice.len() else {
            return invalid("finite configurations need a finite lattice");
        };
        let gaps = self.lattice.gaps(m);
        let mut nodes = vec![None; m + 1];
        let mut next = 1;
        let mut take = |node: usize, nodes: &mut Vec<Option<f64>>| -> Result<()> {
            let v = self
                .strengths
                .rule
                .term_at(next)
                .ok_or_else(|| GsdError::InvalidInput(format!("strength #{next} is missing")))?;
            if v.is_nan() || v == f64::NEG_INFINITY {
                return invalid(format!("strength #{next} = {v} is not admissible"));
            }
            nodes[node] = Some(v);
            next += 1;
            Ok(())
        };
        if self.left == End::HalfLine {
            take(0, &mut nodes)?;
        }
        for n in 1..m {
            take(n, &mut nodes)?;
        }
        if self.right == End::HalfLine {
            take(m, &mut nodes)?;
        }
        Ok(Layout {
            model: self.model,
            kind: self.strengths.kind,
            origin: self.lattice.a,
            gaps,
            left: self.left,
            right: self.right,
            nodes,
        })
    }
}

impl Layout {
    fn m(&self) -> usize {
        self.gaps.len()
    }

    fn node_x(&self, k: usize) -> f64 {
        self.origin + self.gaps[..k].iter().sum::<f64>()
    }

    fn has_half_line(&self) -> bool {
        self.left == End::HalfLine || self.right == End::HalfLine
    }

    fn blocks(&self) -> Vec<WeylBlock> {
        let (c, dirac) = match self.model {
            Model::Dirac { c } => (c, true),
            Model::Schrodinger => (0.0, false),
        };
        let mut out = Vec::new();
        if self.left == End::HalfLine {
            let k = if dirac { BlockKind::DiracHalflineLeft } else { BlockKind::SchrodingerHalflineLeft };
            out.push(WeylBlock::new(k, false, c).at(self.origin));
        }
        let mut x = self.origin;
        for &d in &self.gaps {
            let k = if dirac { BlockKind::DiracInterval { d } } else { BlockKind::SchrodingerInterval { d } };
            out.push(WeylBlock::new(k, false, c).at(x));
            x += d;
        }
        if self.right == End::HalfLine {
            let k = if dirac { BlockKind::DiracHalflineRight } else { BlockKind::SchrodingerHalflineRight };
            out.push(WeylBlock::new(k, false, c).at(x));
        }
        out
    }

    fn dim(&self) -> usize {
        2 * self.m() + usize::from(self.left == End::HalfLine) + usize::from(self.right == End::HalfLine)
    }

    /// Split at `+∞` strengths into independent chains. Half-lines cut off
    /// by an infinite strength carry no gap eigenvalues and are dropped.
    fn segments(&self) -> Vec<Layout> {
        let cut = match self.kind {
            StrengthKind::Alpha => End::F1Zero,
            StrengthKind::Beta => End::F2Zero,
        };
        let m = self.m();
        let mut out = Vec::new();
        let mut start = 0;
        let mut left = self.left;
        if self.nodes[0] == Some(f64::INFINITY) {
            left = cut;
        }
        for k in 1..m {
            if self.nodes[k] == Some(f64::INFINITY) {
                out.push(self.slice(start, k, left, cut));
                start = k;
                left = cut;
            }
        }
        let right = if self.nodes[m] == Some(f64::INFINITY) { cut } else { self.right };
        out.push(self.slice(start, m, left, right));
        out
    }

    fn slice(&self, from: usize, to: usize, left: End, right: End) -> Layout {
        let mut nodes: Vec<Option<f64>> = self.nodes[from..=to].to_vec();
        if left != End::HalfLine {
            nodes[0] = None;
        }
        if right != End::HalfLine {
            *nodes.last_mut().unwrap() = None;
        }
        Layout {
            model: self.model,
            kind: self.kind,
            origin: self.node_x(from),
            gaps: self.gaps[from..to].to_vec(),
            left,
            right,
            nodes,
        }
    }

    /// Points of `σ(A₀)` (offset frame) within `[lo, hi]`.
    fn a0_points(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for &d in &self.gaps {
            for j in 0.. {
                let w = PI / d * (j as f64 + 0.5);
                match self.model {
                    Model::Dirac { c } => {
                        let cw = c * w;
                        let e = cw.hypot(0.5 * c * c);
                        let up = cw * cw / (e + 0.5 * c * c);
                        let down = -e - 0.5 * c * c;
                        if up > hi && down < lo {
                            break;
                        }
                        for p in [up, down] {
                            if p >= lo && p <= hi {
                                out.push(p);
                            }
                        }
                    }
                    Model::Schrodinger => {
                        let p = w * w;
                        if p > hi {
                            break;
                        }
                        if p >= lo {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }
}

/// Coordinates of the boundary value `F` or `G` at one side of a node.
#[derive(Clone, Copy)]
enum Slot {
    G0(usize),
    G1(usize),
}

struct Rows {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    row: usize,
}

impl Rows {
    fn push(&mut self, terms: &[(Slot, f64)]) {
        for &(s, v) in terms {
            match s {
                Slot::G0(i) => self.a[(self.row, i)] += v,
                Slot::G1(i) => self.b[(self.row, i)] += v,
            }
        }
        self.row += 1;
    }
}

/// `(F, G)` slots on the left (`−`) and right (`+`) of node `k`.
fn node_slots(l: &Layout, k: usize) -> (Option<(Slot, Slot)>, Option<(Slot, Slot)>) {
    let hl = usize::from(l.left == End::HalfLine);
    let m = l.m();
    let minus = if k == 0 {
        (l.left == End::HalfLine).then_some((Slot::G1(0), Slot::G0(0)))
    } else {
        let o = hl + 2 * (k - 1);
        Some((Slot::G1(o + 1), Slot::G0(o + 1)))
    };
    let plus = if k == m {
        (l.right == End::HalfLine).then(|| {
            let h = hl + 2 * m;
            (Slot::G0(h), Slot::G1(h))
        })
    } else {
        let o = hl + 2 * k;
        Some((Slot::G0(o), Slot::G1(o)))
    };
    (minus, plus)
}

fn relation(l: &Layout) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = l.dim();
    let mut r = Rows { a: DMatrix::zeros(n, n), b: DMatrix::zeros(n, n), row: 0 };
    let m = l.m();
    for k in 0..=m {
        let (minus, plus) = node_slots(l, k);
        match (minus, plus, l.nodes[k]) {
            (Some((fl, gl)), Some((fr, gr)), Some(s)) => match (l.kind, s.is_finite()) {
                (StrengthKind::Alpha, true) => {
                    r.push(&[(fr, 1.0), (fl, -1.0)]);
                    r.push(&[(gr, 1.0), (gl, -1.0), (fr, -s)]);
                }
                (StrengthKind::Beta, true) => {
                    r.push(&[(gr, 1.0), (gl, -1.0)]);
                    r.push(&[(fl, 1.0), (fr, -1.0), (gl, s)]);
                }
                (StrengthKind::Alpha, false) => {
                    r.push(&[(fl, 1.0)]);
                    r.push(&[(fr, 1.0)]);
                }
                (StrengthKind::Beta, false) => {
                    r.push(&[(gl, 1.0)]);
                    r.push(&[(gr, 1.0)]);
                }
            },
            (None, Some((f, g)), None) | (Some((f, g)), None, None) => {
                let end = if k == 0 { l.left } else { l.right };
                match end {
                    End::F1Zero => r.push(&[(f, 1.0)]),
                    End::F2Zero => r.push(&[(g, 1.0)]),
                    End::HalfLine => unreachable!("half-line ends always carry a strength"),
                }
            }
            _ => unreachable!("inconsistent layout"),
        }
    }
    debug_assert_eq!(r.row, n);
    // Bring to (Θ̃, −I) form when the relation is an operator.
    if let Some(binv) = r.b.clone().try_inverse() {
        let theta = -(&binv * &r.a);
        return (theta, -DMatrix::identity(n, n));
    }
    (r.a, r.b)
}

/// Boundary operator of a finite configuration in the unregularized
/// direct-sum triplet.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryOperator {
    /// Relation `AΓ̃₀ + BΓ̃₁ = 0`.
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    /// `Θ̃` with `Γ̃₁ = Θ̃Γ̃₀`, when the relation is an operator.
    pub theta: Option<DMatrix<f64>>,
    /// Blocks in Γ-coordinate order.
    pub blocks: Vec<WeylBlock>,
}

/// Boundary relation (and matrix, if any) of a finite configuration.
pub fn boundary_operator_finite(spec: &RealizationSpec) -> Result<BoundaryOperator> {
    let l = spec.layout()?;
    let (a, b) = relation(&l);
    let n = a.nrows();
    let theta = (b == -DMatrix::<f64>::identity(n, n)).then(|| a.clone());
    Ok(BoundaryOperator { a, b, theta, blocks: l.blocks() })
}

/// Pole-cleared secular determinant at offset `t`.
fn secular_layout(l: &Layout, rel: &(DMatrix<f64>, DMatrix<f64>), blocks: &[WeylBlock], t: C64) -> Result<C64> {
    let (a, b) = rel;
    let n = a.nrows();
    let mut k = DMatrix::<C64>::zeros(n, n);
    let col = |m: &DMatrix<f64>, j: usize| m.column(j).map(|x| C64::new(x, 0.0));
    let mut o = 0;
    let mut sign = 1.0;
    for blk in blocks {
        if blk.kind.is_interval() {
            let (cs, m11, m22) = interval_parts(blk, t);
            let (aa, ab, ba, bb) = (col(a, o), col(a, o + 1), col(b, o), col(b, o + 1));
            k.set_column(o, &(ab.map(|x| x * m11) - &aa - bb.map(|x| x * cs)));
            k.set_column(o + 1, &(ab.map(|x| x * cs) + &ba + bb.map(|x| x * m22)));
            sign = -sign;
            o += 2;
        } else {
            let m = weyl_eval_offset(blk, t)?[(0, 0)];
            k.set_column(o, &(col(a, o) + col(b, o).map(|x| x * m)));
            o += 1;
        }
    }
    debug_assert_eq!(o, l.dim());
    Ok(k.determinant() * sign)
}

/// `S(λ)` for the full configuration (infinite strengths included as rows).
pub fn secular_value(spec: &RealizationSpec, lambda: C64) -> Result<C64> {
    secular_value_offset(spec, lambda - spec.shift())
}

/// `S` at offset `t = λ − c²/2` (Dirac) or `t = λ` (Schrödinger).
pub fn secular_value_offset(spec: &RealizationSpec, t: C64) -> Result<C64> {
    let l = spec.layout()?;
    secular_layout(&l, &relation(&l), &l.blocks(), t)
}

/// How a root was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Secular,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub value: f64,
    /// `|S(λ)|` relative to the bracketing values.
    pub residual: f64,
    pub method: Method,
}

/// Eigenvalues found in a window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Sorted; equal values from decoupled segments are listed once per segment.
    pub roots: Vec<Root>,
    /// Windows around `σ(A₀)` adjudicated by the oracle.
    pub excluded_windows: Vec<(f64, f64)>,
    /// Largest `|Im S| / |S|` seen on the scan grid (secular runs).
    pub max_imag_ratio: f64,
}

impl SpectrumResult {
    pub fn values(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.value).collect()
    }

    fn shifted(mut self, s: f64) -> Self {
        if s != 0.0 {
            for r in &mut self.roots {
                r.value += s;
            }
            for w in &mut self.excluded_windows {
                *w = (w.0 + s, w.1 + s);
            }
        }
        self
    }
}

/// Validate a window given in the offset frame.
fn check_window(l: &Layout, lo: f64, hi: f64, resolution: f64) -> Result<()> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return invalid("window must be a finite interval (lo < hi)");
    }
    if !(resolution > 0.0) || (hi - lo) / resolution > 1e8 {
        return invalid("resolution must be positive and at most 1e8 cells per window");
    }
    let (branch, gap): (Vec<f64>, (f64, f64)) = match l.model {
        Model::Dirac { c } => (vec![0.0, -c * c], (-c * c, 0.0)),
        Model::Schrodinger => (vec![0.0], (f64::NEG_INFINITY, 0.0)),
    };
    let scale = |p: f64| BRANCH_MARGIN * p.abs().max(1.0);
    for p in branch {
        for e in [lo, hi] {
            if (e - p).abs() < scale(p) {
                return Err(GsdError::Domain(format!("window end {e} touches a branch point")));
            }
        }
    }
    if l.has_half_line() && !(lo > gap.0 && hi < gap.1) {
        return Err(GsdError::Domain("half-line configurations need a window inside the spectral gap".into()));
    }
    Ok(())
}

/// Sign-change scan plus bisection (to adjacent floats) of a real function.
fn find_roots<F>(f: F, lo: f64, hi: f64, resolution: f64, method: Method) -> Result<Vec<Root>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let cells = ((hi - lo) / resolution).ceil().max(1.0) as usize;
    let h = (hi - lo) / cells as f64;
    let xs: Vec<f64> = (0..=cells).map(|i| if i == cells { hi } else { lo + i as f64 * h }).collect();
    let vals: Vec<f64> = xs.par_iter().map(|&x| f(x)).collect::<Result<_>>()?;
    let mut brackets = Vec::new();
    let mut exact = Vec::new();
    for i in 0..cells {
        if vals[i] == 0.0 {
            exact.push(Root { value: xs[i], residual: 0.0, method });
        } else if vals[i] * vals[i + 1] < 0.0 {
            brackets.push(i);
        }
    }
    if vals[cells] == 0.0 {
        exact.push(Root { value: hi, residual: 0.0, method });
    }
    let refined: Vec<Root> = brackets
        .par_iter()
        .map(|&i| {
            let (mut a, mut b) = (xs[i], xs[i + 1]);
            let (mut fa, fb) = (vals[i], vals[i + 1]);
            let scale = fa.abs().max(fb.abs());
            loop {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let fm = f(mid)?;
                if fm == 0.0 {
                    return Ok(Root { value: mid, residual: 0.0, method });
                }
                if fm * fa < 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            let x = if f(a)?.abs() <= f(b)?.abs() { a } else { b };
            Ok(Root { value: x, residual: f(x)?.abs() / scale, method })
        })
        .collect::<Result<_>>()?;
    let mut all: Vec<Root> = exact.into_iter().chain(refined).collect();
    all.sort_by(|a, b| a.value.total_cmp(&b.value));
    all.dedup_by(|b, a| (b.value - a.value).abs() < DEDUP);
    Ok(all)
}

/// Real transfer-matrix functional of a chain without infinite strengths,
/// in `(F, G)` variables. Zero exactly at eigenvalues.
fn oracle_functional(l: &Layout, t: f64) -> f64 {
    // On each interval (F, G) evolves by [[cos, g·S], [−t·S, cos]], with
    // k² = t(t + c²)/c², g = (t + c²)/c² (Dirac) or k² = t, g = 1.
    let (k2, g, decay) = match l.model {
        Model::Dirac { c } => {
            let c2 = c * c;
            let k2 = t * (t + c2) / c2;
            // e^{∓κx} tails: G = ±(c²κ/(t + c²))F.
            (k2, (t + c2) / c2, if k2 < 0.0 { c2 * (-k2).sqrt() / (t + c2) } else { f64::NAN })
        }
        Model::Schrodinger => (t, 1.0, if t < 0.0 { (-t).sqrt() } else { f64::NAN }),
    };
    let jump = |v: [f64; 2], s: f64| match l.kind {
        StrengthKind::Alpha => [v[0], v[1] + s * v[0]],
        StrengthKind::Beta => [v[0] + s * v[1], v[1]],
    };
    let normalize = |v: [f64; 2]| {
        let m = v[0].abs().max(v[1].abs());
        if m > 0.0 {
            [v[0] / m, v[1] / m]
        } else {
            v
        }
    };
    let mut v = match l.left {
        End::F2Zero => [1.0, 0.0],
        End::F1Zero => [0.0, 1.0],
        End::HalfLine => jump([1.0, decay], l.nodes[0].expect("half-line node strength")),
    };
    let m = l.m();
    for (i, &d) in l.gaps.iter().enumerate() {
        let (cs, s) = trig(k2, d);
        v = normalize([cs * v[0] + g * s * v[1], -t * s * v[0] + cs * v[1]]);
        if i + 1 < m {
            v = jump(v, l.nodes[i + 1].expect("interior strength"));
        }
    }
    match l.right {
        End::F1Zero => v[0],
        End::F2Zero => v[1],
        End::HalfLine => {
            let w = jump(v, l.nodes[m].expect("half-line node strength"));
            w[1] + decay * w[0]
        }
    }
}

/// `(cos(qd), sin(qd)/q)` for `q² = k2`; for `k2 < 0` both are divided by
/// `cosh(|q|d) > 0`, which leaves signs intact and avoids overflow.
fn trig(k2: f64, d: f64) -> (f64, f64) {
    let q = k2.abs().sqrt();
    let x = q * d;
    let sinc = |x: f64| if x < 1e-4 { 1.0 - x * x / 6.0 } else { x.sin() / x };
    if k2 >= 0.0 {
        (x.cos(), d * sinc(x))
    } else if x < 1e-4 {
        (1.0, d * (1.0 - x * x / 3.0))
    } else {
        (1.0, x.tanh() / q)
    }
}

/// Solver selection.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Solver {
    Secular,
    Oracle,
}

fn solve_offset(spec: &RealizationSpec, lo: f64, hi: f64, resolution: f64, solver: Solver) -> Result<SpectrumResult> {
    let full = spec.layout()?;
    check_window(&full, lo, hi, resolution)?;
    let mut roots = Vec::new();
    let mut excluded = Vec::new();
    let mut max_imag: f64 = 0.0;
    for seg in full.segments() {
        match solver {
            Solver::Oracle => {
                roots.extend(find_roots(|t| Ok(oracle_functional(&seg, t)), lo, hi, resolution, Method::Oracle)?);
            }
            Solver::Secular => {
                let rel = relation(&seg);
                let blocks = seg.blocks();
                let imag = std::sync::Mutex::new(0.0f64);
                let f = |t: f64| {
                    let s = secular_layout(&seg, &rel, &blocks, C64::new(t, 0.0))?;
                    if s.norm() > 0.0 {
                        let r = s.im.abs() / s.norm();
                        let mut m = imag.lock().unwrap();
                        *m = m.max(r);
                    }
                    Ok(s.re)
                };
                let mut found = find_roots(f, lo, hi, resolution, Method::Secular)?;
                max_imag = max_imag.max(imag.into_inner().unwrap());
                // Near σ(A₀) the Krein criterion does not apply; ask the oracle.
                for p in seg.a0_points(lo - A0_RADIUS, hi + A0_RADIUS) {
                    let (a, b) = ((p - A0_RADIUS).max(lo), (p + A0_RADIUS).min(hi));
                    if a >= b {
                        continue;
                    }
                    found.retain(|r| r.value < a || r.value > b);
                    excluded.push((a, b));
                    let fine = (b - a) / 200.0;
                    for r in find_roots(|t| Ok(oracle_functional(&seg, t)), a, b, fine, Method::Oracle)? {
                        found.push(r);
                    }
                }
                roots.extend(found);
            }
        }
    }
    roots.sort_by(|a, b| a.value.total_cmp(&b.value));
    excluded.sort_by(|a, b| a.0.total_cmp(&b.0));
    excluded.dedup();
    Ok(SpectrumResult { roots, excluded_windows: excluded, max_imag_ratio: max_imag })
}

/// Eigenvalues in `window` from zeros of the secular function.
pub fn eigenvalues_secular(spec: &RealizationSpec, window: (f64, f64), resolution: f64) -> Result<SpectrumResult> {
    let s = spec.shift();
    Ok(eigenvalues_secular_offset(spec, (window.0 - s, window.1 - s), resolution)?.shifted(s))
}

/// [`eigenvalues_secular`] in the offset frame (`λ − c²/2` for Dirac).
pub fn eigenvalues_secular_offset(spec: &RealizationSpec, window: (f64, f64), resolution: f64) -> Result<SpectrumResult> {
    solve_offset(spec, window.0, window.1, resolution, Solver::Secular)
}

/// Transfer-matrix shooting for either model.
pub fn transfer_oracle(spec: &RealizationSpec, window: (f64, f64), resolution: f64) -> Result<SpectrumResult> {
    let s = spec.shift();
    Ok(transfer_oracle_offset(spec, (window.0 - s, window.1 - s), resolution)?.shifted(s))
}

/// [`transfer_oracle`] in the offset frame.
pub fn transfer_oracle_offset(spec: &RealizationSpec, window: (f64, f64), resolution: f64) -> Result<SpectrumResult> {
    solve_offset(spec, window.0, window.1, resolution, Solver::Oracle)
}

pub fn transfer_oracle_dirac(spec: &RealizationSpec, window: (f64, f64), resolution: f64) -> Result<SpectrumResult> {
    if spec.c().is_none() {
        return invalid("expected a Dirac configuration");
    }
    transfer_oracle(spec, window, resolution)
}

pub fn transfer_oracle_schrodinger(
    spec: &RealizationSpec,
    window: (f64, f64),
    resolution: f64,
) -> Result<SpectrumResult> {
    if spec.c().is_some() {
        return invalid("expected a Schrödinger configuration");
    }
    transfer_oracle(spec, window, resolution)
}

/// Value of the Krein correction term with the conditioning of `Θ̃ − M̃(z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KreinElement {
    pub value: C64,
    /// 2-norm condition number of `A + BM̃(z)`.
    pub condition: f64,
}

/// `⟨γ(z)(Θ̃ − M̃(z))⁻¹γ(z̄)* u, v⟩`, linear in `u`.
pub fn krein_correction_element(spec: &RealizationSpec, z: C64, u: &State, v: &State) -> Result<KreinElement> {
    krein_correction_element_offset(spec, z - spec.shift(), u, v)
}

/// [`krein_correction_element`] at offset `t`.
pub fn krein_correction_element_offset(spec: &RealizationSpec, t: C64, u: &State, v: &State) -> Result<KreinElement> {
    if t.im == 0.0 {
        return invalid("the correction term needs a non-real spectral parameter");
    }
    let l = spec.layout()?;
    let (a, b) = relation(&l);
    let blocks = l.blocks();
    let n = a.nrows();
    let mut m = DMatrix::<C64>::zeros(n, n);
    let mut o = 0;
    for blk in &blocks {
        let mb = weyl_eval_offset(blk, t)?;
        let k = mb.nrows();
        m.view_mut((o, o), (k, k)).copy_from(&mb);
        o += k;
    }
    let ac = a.map(|x| C64::new(x, 0.0));
    let bc = b.map(|x| C64::new(x, 0.0));
    let lhs = &ac + &bc * &m;
    let sv = lhs.clone().singular_values();
    let cond = sv.max() / sv.min();
    let singular = || GsdError::Singular { re: t.re + spec.shift(), im: t.im };
    if !cond.is_finite() || cond > 1e14 {
        return Err(singular());
    }
    // γ(z̄)* u, coordinate by coordinate.
    let mut w = nalgebra::DVector::<C64>::zeros(n);
    let mut gz = Vec::with_capacity(n);
    let mut o = 0;
    for blk in &blocks {
        let k = blk.kind.dim();
        for j in 0..k {
            let mut e = vec![ZERO; k];
            e[j] = C64::new(1.0, 0.0);
            w[o + j] = inner_product(u, &gamma_apply_offset(blk, t.conj(), &e)?)?;
            gz.push(gamma_apply_offset(blk, t, &e)?);
        }
        o += k;
    }
    let y = -lhs.lu().solve(&(&bc * w)).ok_or_else(singular)?;
    let mut value = ZERO;
    for (j, g) in gz.iter().enumerate() {
        if y[j] != ZERO {
            value += y[j] * inner_product(g, v)?;
        }
    }
    Ok(KreinElement { value, condition: cond })
}

/// `‖M_{d,c}(z + c²/2) − M_{d,H}(z)‖₂` for the regularized interval blocks.
pub fn weyl_limit_error(d: f64, z: C64, c: f64) -> Result<f64> {
    let dirac = WeylBlock::new(BlockKind::DiracInterval { d }, true, c);
    let schr = WeylBlock::new(BlockKind::SchrodingerInterval { d }, true, 0.0);
    let diff = weyl_eval_offset(&dirac, z)? - weyl_eval_offset(&schr, z)?;
    Ok(diff.singular_values().max())
}

/// Non-relativistic comparison target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonrelTarget {
    /// Non-real `z` for the Weyl comparison.
    pub z: C64,
    /// Window of Schrödinger eigenvalues to track.
    pub window: (f64, f64),
    pub resolution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonrelRow {
    pub c: f64,
    /// Maximum over interval blocks of the Weyl-block error.
    pub weyl_error: f64,
    /// `λ_j(c) − c²/2` for each tracked index.
    pub shifted_eigenvalues: Vec<f64>,
    /// `|λ_j(c) − c²/2 − μ_j|`.
    pub eigen_errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonrelTable {
    /// Schrödinger eigenvalues `μ_j` (transfer oracle).
    pub schrodinger_eigenvalues: Vec<f64>,
    pub rows: Vec<NonrelRow>,
    pub weyl_monotone: bool,
    pub eigen_monotone: bool,
    /// `log(e_i/e_{i+1}) / log(c_{i+1}/c_i)` between consecutive rows.
    pub weyl_order: Vec<f64>,
    /// Same for the largest eigenvalue error.
    pub eigen_order: Vec<f64>,
}

fn orders(cs: &[f64], errs: &[f64]) -> Vec<f64> {
    cs.windows(2)
        .zip(errs.windows(2))
        .map(|(c, e)| (e[0] / e[1]).ln() / (c[1] / c[0]).ln())
        .collect()
}

/// Drive `D^c` towards its Schrödinger limit over `c_list`. The matched
/// Schrödinger spec keeps the lattice, strengths and boundary pattern.
pub fn nonrel_harness(spec: &RealizationSpec, c_list: &[f64], target: &NonrelTarget) -> Result<NonrelTable> {
    if c_list.is_empty() {
        return invalid("c_list must not be empty");
    }
    let h = spec.with_model(Model::Schrodinger)?;
    let (lo, hi) = target.window;
    let mu = transfer_oracle_offset(&h, (lo, hi), target.resolution)?.values();
    let gaps = spec.layout()?.gaps;
    let margin = (0.25 * (hi - lo)).max(1.0);
    let rows: Vec<NonrelRow> = c_list
        .iter()
        .map(|&c| {
            let mut weyl_error: f64 = 0.0;
            for &d in &gaps {
                weyl_error = weyl_error.max(weyl_limit_error(d, target.z, c)?);
            }
            let dspec = spec.with_model(Model::Dirac { c })?;
            let found = eigenvalues_secular_offset(&dspec, (lo - margin, hi + margin), target.resolution)?.values();
            let mut shifted = Vec::with_capacity(mu.len());
            let mut errs = Vec::with_capacity(mu.len());
            for &m in &mu {
                let best = found
                    .iter()
                    .copied()
                    .min_by(|a, b| (a - m).abs().total_cmp(&(b - m).abs()))
                    .unwrap_or(f64::NAN);
                shifted.push(best);
                errs.push((best - m).abs());
            }
            Ok(NonrelRow { c, weyl_error, shifted_eigenvalues: shifted, eigen_errors: errs })
        })
        .collect::<Result<_>>()?;
    let we: Vec<f64> = rows.iter().map(|r| r.weyl_error).collect();
    let ee: Vec<f64> = rows.iter().map(|r| r.eigen_errors.iter().copied().fold(0.0, f64::max)).collect();
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    Ok(NonrelTable {
        schrodinger_eigenvalues: mu,
        weyl_monotone: decreasing(&we),
        eigen_monotone: decreasing(&ee),
        weyl_order: orders(c_list, &we),
        eigen_order: orders(c_list, &ee),
        rows,
    })
}

/// Convenience: configuration on `[a, a + Σd]` with explicit gaps.
pub fn explicit_lattice(a: f64, gaps: Vec<f64>) -> Result<Lattice> {
    let n = gaps.len();
    crate::model::build_lattice(a, SequenceRule::explicit(gaps), Count::Finite(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(v: Vec<f64>) -> StrengthSeq {
        StrengthSeq::alpha(SequenceRule::explicit(v)).unwrap()
    }

    fn single_delta(a: f64) -> RealizationSpec {
        let l = explicit_lattice(0.0, vec![1.0, 1.0]).unwrap();
        RealizationSpec::dirac(1.0, l, alpha(vec![a]), End::F2Zero, End::F1Zero).unwrap()
    }

    #[test]
    fn theta_single_point() {
        let op = boundary_operator_finite(&single_delta(2.5)).unwrap();
        let th = op.theta.unwrap();
        let expect = DMatrix::from_row_slice(
            4,
            4,
            &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 2.5, 0.0, 0.0, 0.0, 0.0, 0.0],
        );
        assert_eq!(th, expect);
    }

    #[test]
    fn theta_free_two_point() {
        let l = explicit_lattice(0.0, vec![1.0]).unwrap();
        let spec = RealizationSpec::dirac(1.0, l, alpha(vec![0.0, 0.0]), End::HalfLine, End::HalfLine).unwrap();
        let th = boundary_operator_finite(&spec).unwrap().theta.unwrap();
        let s1 = [0.0, 1.0, 1.0, 0.0];
        for i in 0..4 {
            for j in 0..4 {
                let e = if i / 2 == j / 2 { s1[2 * (i % 2) + j % 2] } else { 0.0 };
                assert_eq!(th[(i, j)], e);
            }
        }
    }

    #[test]
    fn infinite_strength_rows() {
        let op = boundary_operator_finite(&single_delta(f64::INFINITY)).unwrap();
        assert!(op.theta.is_none());
        // f₁(x₁−) = 0 and f₁(x₁+) = 0
        assert_eq!(op.b[(1, 1)], 1.0);
        assert_eq!(op.a[(2, 2)], 1.0);
    }

    #[test]
    fn theta_zero_gives_minus_cos() {
        let l = explicit_lattice(0.0, vec![1.3]).unwrap();
        let spec = RealizationSpec::dirac(2.0, l, StrengthSeq::alpha(SequenceRule::constant(0.0)).unwrap(), End::F2Zero, End::F1Zero).unwrap();
        for t in [-3.0, 0.4, 7.0] {
            let s = secular_value_offset(&spec, C64::new(t, 0.0)).unwrap();
            let cs = crate::dispersion::Dispersion::at_offset(C64::new(t, 0.0), 2.0).cos_kd(1.3);
            assert!((s + cs).norm() < 1e-13);
        }
    }

    #[test]
    fn reference_block_spectrum() {
        let l = explicit_lattice(0.0, vec![1.0]).unwrap();
        let spec = RealizationSpec::dirac(1.0, l, StrengthSeq::alpha(SequenceRule::constant(0.0)).unwrap(), End::F2Zero, End::F1Zero).unwrap();
        let r = transfer_oracle(&spec, (0.6, 20.0), 1e-3).unwrap().values();
        for (j, v) in r.iter().enumerate() {
            let e = ((PI * (j as f64 + 0.5)).powi(2) + 0.25).sqrt();
            assert!((v - e).abs() < 1e-10, "{v} vs {e}");
        }
        assert_eq!(r.len(), 6);
    }

    #[test]
    fn secular_matches_oracle_single_delta() {
        let spec = single_delta(1.0);
        let s = eigenvalues_secular(&spec, (0.0, 6.0), 1e-3).unwrap();
        let o = transfer_oracle(&spec, (0.0, 6.0), 1e-3).unwrap();
        assert_eq!(s.roots.len(), o.roots.len());
        assert!(!s.roots.is_empty());
        for (a, b) in s.values().iter().zip(o.values()) {
            assert!((a - b).abs() < 1e-8);
        }
        assert!(s.max_imag_ratio < 1e-10);
    }

    #[test]
    fn schrodinger_reference() {
        let l = explicit_lattice(0.0, vec![1.0]).unwrap();
        let spec = RealizationSpec::schrodinger(l, StrengthSeq::alpha(SequenceRule::constant(0.0)).unwrap(), End::F2Zero, End::F1Zero).unwrap();
        let r = transfer_oracle_schrodinger(&spec, (0.1, 100.0), 1e-3).unwrap().values();
        for (j, v) in r.iter().enumerate() {
            assert!((v - (PI * (j as f64 + 0.5)).powi(2)).abs() < 1e-9);
        }
    }

    #[test]
    fn branch_point_window_rejected() {
        let spec = single_delta(1.0);
        assert!(eigenvalues_secular(&spec, (0.5, 3.0), 1e-3).is_err());
    }

    #[test]
    fn weyl_limit_rate() {
        let errs: Vec<f64> =
            [10.0, 100.0, 1000.0].iter().map(|&c| weyl_limit_error(1.0, C64::new(0.0, 1.0), c).unwrap()).collect();
        for w in errs.windows(2) {
            let r = w[0] / w[1];
            assert!((50.0..=200.0).contains(&r), "{r}");
        }
    }
}
