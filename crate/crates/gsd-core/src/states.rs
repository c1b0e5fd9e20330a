//! Closed-form piecewise states, boundary maps and Green identities.
//!
//! A state is a list of pieces, one per interval (or half-line). On each piece
//! every component is an exponential polynomial `Σ (c₀ + c₁t)e^{κt}` in the
//! local variable `t = x − origin`, where the origin is the finite endpoint.
//! That class is closed under differentiation, and products of its members
//! integrate in closed form. Inner products, operator applications and traces
//! are therefore exact.

use crate::dispersion::{sinc, Dispersion};
use crate::error::{invalid, GsdError, Result};
use crate::model::Lattice;
use num_complex::Complex64 as C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// `(c₀ + c₁t)·e^{κt}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTerm {
    pub kappa: C64,
    pub c0: C64,
    pub c1: C64,
}

/// Finite sum of [`ExpTerm`]s.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpPoly {
    pub terms: Vec<ExpTerm>,
}

impl ExpPoly {
    pub fn zero() -> Self {
        ExpPoly { terms: Vec::new() }
    }

    pub fn exp(coef: C64, kappa: C64) -> Self {
        ExpPoly { terms: vec![ExpTerm { kappa, c0: coef, c1: ZERO }] }
    }

    pub fn affine(c0: C64, c1: C64) -> Self {
        ExpPoly { terms: vec![ExpTerm { kappa: ZERO, c0, c1 }] }
    }

    pub fn eval(&self, t: f64) -> C64 {
        self.terms.iter().map(|e| (e.c0 + e.c1 * t) * (e.kappa * t).exp()).sum()
    }

    pub fn derivative(&self) -> ExpPoly {
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|e| ExpTerm { kappa: e.kappa, c0: e.c1 + e.kappa * e.c0, c1: e.kappa * e.c1 })
                .collect(),
        }
    }

    pub fn scale(&self, s: C64) -> ExpPoly {
        ExpPoly {
            terms: self.terms.iter().map(|e| ExpTerm { kappa: e.kappa, c0: e.c0 * s, c1: e.c1 * s }).collect(),
        }
    }

    pub fn add(&self, o: &ExpPoly) -> ExpPoly {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&o.terms);
        ExpPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|e| e.c0 == ZERO && e.c1 == ZERO)
    }
}

/// `E_j(w) = ∫₀¹ u^j e^{wu} du` for `j ≤ 2`.
fn unit_moment(j: usize, w: C64) -> C64 {
    if w.norm() < 1.0 {
        // Σ w^m / (m! (m + j + 1))
        let mut term = ONE;
        let mut sum = ZERO;
        for m in 0..30 {
            sum += term / (m + j + 1) as f64;
            term *= w / (m + 1) as f64;
        }
        return sum;
    }
    let ew = w.exp();
    let e0 = (ew - ONE) / w;
    if j == 0 {
        return e0;
    }
    let e1 = (ew - e0) / w;
    if j == 1 {
        return e1;
    }
    (ew - 2.0 * e1) / w
}

/// Extent of a piece in its local variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Span {
    /// `t ∈ [0, d]`.
    Finite(f64),
    /// `t ∈ [0, ∞)`: right half-line.
    Right,
    /// `t ∈ (−∞, 0]`: left half-line.
    Left,
}

/// `∫ t^j e^{st} dt` over the span.
fn moment(j: usize, s: C64, span: Span) -> Result<C64> {
    let fact = [1.0, 1.0, 2.0][j];
    match span {
        Span::Finite(d) => Ok(unit_moment(j, s * d) * d.powi(j as i32 + 1)),
        Span::Right => {
            if s.re >= 0.0 {
                return Err(GsdError::Domain("integrand is not integrable on the right half-line".into()));
            }
            Ok(fact / (-s).powi(j as i32 + 1))
        }
        Span::Left => {
            if s.re <= 0.0 {
                return Err(GsdError::Domain("integrand is not integrable on the left half-line".into()));
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            Ok(sign * fact / s.powi(j as i32 + 1))
        }
    }
}

/// `∫ p · conj(q)` over the span.
pub fn integrate_product(p: &ExpPoly, q: &ExpPoly, span: Span) -> Result<C64> {
    let mut acc = ZERO;
    for a in &p.terms {
        for b in &q.terms {
            let (b0, b1) = (b.c0.conj(), b.c1.conj());
            let s = a.kappa + b.kappa.conj();
            let w0 = a.c0 * b0;
            let w1 = a.c0 * b1 + a.c1 * b0;
            let w2 = a.c1 * b1;
            if w0 != ZERO {
                acc += w0 * moment(0, s, span)?;
            }
            if w1 != ZERO {
                acc += w1 * moment(1, s, span)?;
            }
            if w2 != ZERO {
                acc += w2 * moment(2, s, span)?;
            }
        }
    }
    Ok(acc)
}

/// Differential expression a state belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    /// `−ic d/dx ⊗ σ₁ + (c²/2) ⊗ σ₃`, two components.
    Dirac { c: f64 },
    /// `−d²/dx²`, one component.
    Schrodinger,
}

impl Model {
    pub fn dim(&self) -> usize {
        match self {
            Model::Dirac { .. } => 2,
            Model::Schrodinger => 1,
        }
    }
}

/// One interval or half-line with its components.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    /// Left end (`−∞` for a left half-line).
    pub left: f64,
    /// Right end (`+∞` for a right half-line).
    pub right: f64,
    pub comps: Vec<ExpPoly>,
}

impl Piece {
    pub fn span(&self) -> Span {
        match (self.left.is_finite(), self.right.is_finite()) {
            (true, true) => Span::Finite(self.right - self.left),
            (true, false) => Span::Right,
            _ => Span::Left,
        }
    }

    pub fn origin(&self) -> f64 {
        if self.left.is_finite() {
            self.left
        } else {
            self.right
        }
    }

    /// Component values at the left (`x_{n−1}+`) end.
    pub fn left_trace(&self) -> Vec<C64> {
        assert!(self.left.is_finite(), "no left trace on a left half-line");
        self.comps.iter().map(|p| p.eval(0.0)).collect()
    }

    /// Component values at the right (`x_n−`) end.
    pub fn right_trace(&self) -> Vec<C64> {
        match self.span() {
            Span::Finite(d) => self.comps.iter().map(|p| p.eval(d)).collect(),
            Span::Left => self.comps.iter().map(|p| p.eval(0.0)).collect(),
            Span::Right => panic!("no right trace on a right half-line"),
        }
    }

    pub fn eval(&self, x: f64) -> Vec<C64> {
        let t = x - self.origin();
        self.comps.iter().map(|p| p.eval(t)).collect()
    }
}

/// Piecewise state of a Dirac or Schrödinger expression.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub model: Model,
    pub pieces: Vec<Piece>,
}

/// Two-component Dirac state.
pub type DiracState = State;
/// Scalar Schrödinger state.
pub type SchrodingerState = State;

/// Building block on which defect elements live.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Block {
    /// `[left, left + d]`.
    Interval { left: f64, d: f64 },
    /// `(−∞, a]`.
    HalfLineLeft { a: f64 },
    /// `[b, ∞)`.
    HalfLineRight { b: f64 },
}

impl Block {
    fn bounds(&self) -> (f64, f64) {
        match *self {
            Block::Interval { left, d } => (left, left + d),
            Block::HalfLineLeft { a } => (f64::NEG_INFINITY, a),
            Block::HalfLineRight { b } => (b, f64::INFINITY),
        }
    }
}

impl State {
    pub fn zero(model: Model) -> Self {
        State { model, pieces: Vec::new() }
    }

    pub fn c(&self) -> Option<f64> {
        match self.model {
            Model::Dirac { c } => Some(c),
            Model::Schrodinger => None,
        }
    }

    /// Dirac solution of `Df = zf` on `[left, left + d]` with
    /// `f₁(left) = x0` and `−i f₂(left) = y0`.
    pub fn dirac_solution(c: f64, left: f64, d: f64, disp: &Dispersion, x0: C64, y0: C64) -> Piece {
        let (p, q) = (disp.z_plus() / c, disp.mu / c);
        let k = disp.k;
        let (f1, f2) = if k == ZERO {
            // k = 0: f₁ = x0 − p·y0·t, f₂ = i(y0 + q·x0·t) with q = 0.
            (ExpPoly::affine(x0, -p * y0), ExpPoly::affine(I * y0, I * q * x0))
        } else {
            let ik = I * k;
            let h = 0.5;
            let f1 = ExpPoly {
                terms: vec![
                    ExpTerm { kappa: ik, c0: h * x0 - p * y0 / (2.0 * ik), c1: ZERO },
                    ExpTerm { kappa: -ik, c0: h * x0 + p * y0 / (2.0 * ik), c1: ZERO },
                ],
            };
            let f2 = ExpPoly {
                terms: vec![
                    ExpTerm { kappa: ik, c0: I * (h * y0 + q * x0 / (2.0 * ik)), c1: ZERO },
                    ExpTerm { kappa: -ik, c0: I * (h * y0 - q * x0 / (2.0 * ik)), c1: ZERO },
                ],
            };
            (f1, f2)
        };
        Piece { left, right: left + d, comps: vec![f1, f2] }
    }

    /// Schrödinger solution of `−f'' = zf` on `[left, left + d]` with
    /// `f(left) = x0`, `f'(left) = y0`.
    pub fn schrodinger_solution(left: f64, d: f64, s: C64, x0: C64, y0: C64) -> Piece {
        let f = if s == ZERO {
            ExpPoly::affine(x0, y0)
        } else {
            let is = I * s;
            ExpPoly {
                terms: vec![
                    ExpTerm { kappa: is, c0: 0.5 * x0 + y0 / (2.0 * is), c1: ZERO },
                    ExpTerm { kappa: -is, c0: 0.5 * x0 - y0 / (2.0 * is), c1: ZERO },
                ],
            }
        };
        Piece { left, right: left + d, comps: vec![f] }
    }

    /// Sum of two states on identical piece layouts (or either empty).
    pub fn add(&self, o: &State) -> Result<State> {
        if self.model != o.model {
            return invalid("cannot add states of different models");
        }
        if self.pieces.is_empty() {
            return Ok(o.clone());
        }
        if o.pieces.is_empty() {
            return Ok(self.clone());
        }
        if self.pieces.len() != o.pieces.len() {
            return invalid("states have different piece layouts");
        }
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for (a, b) in self.pieces.iter().zip(&o.pieces) {
            if a.left != b.left || a.right != b.right {
                return invalid("states have different piece layouts");
            }
            pieces.push(Piece {
                left: a.left,
                right: a.right,
                comps: a.comps.iter().zip(&b.comps).map(|(p, q)| p.add(q)).collect(),
            });
        }
        Ok(State { model: self.model, pieces })
    }

    pub fn scale(&self, s: C64) -> State {
        State {
            model: self.model,
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece { left: p.left, right: p.right, comps: p.comps.iter().map(|e| e.scale(s)).collect() })
                .collect(),
        }
    }

    /// Apply the differential expression piecewise (`D*` resp. `H*`).
    pub fn apply(&self) -> State {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let comps = match self.model {
                    Model::Dirac { c } => {
                        let h = 0.5 * c * c;
                        let mic = C64::new(0.0, -c);
                        vec![
                            p.comps[1].derivative().scale(mic).add(&p.comps[0].scale(h.into())),
                            p.comps[0].derivative().scale(mic).add(&p.comps[1].scale((-h).into())),
                        ]
                    }
                    Model::Schrodinger => vec![p.comps[0].derivative().derivative().scale((-1.0).into())],
                };
                Piece { left: p.left, right: p.right, comps }
            })
            .collect();
        State { model: self.model, pieces }
    }

    /// Piecewise `L²` norm squared.
    pub fn norm_sq(&self) -> Result<f64> {
        Ok(inner_product(self, self)?.re)
    }
}

/// Element of `ker(D* − z)` (or `ker(H* − z)`) on one block.
///
/// `weights = (w₋, w₊)` multiply `f^∓(x, z) = (e^{∓ikx}, ∓k₁e^{∓ikx})` on
/// intervals (with `√z` and scalar `e^{∓i√z x}` in the Schrödinger case). On
/// half-lines only the square-integrable element is available:
/// `f_a⁻ = f^−` on `(−∞, a]` and `f_b⁺ = f^+` on `[b, ∞)`, scaled by the
/// single relevant weight (`w₋` resp. `w₊`).
pub fn defect_state(model: Model, block: Block, z: C64, weights: (C64, C64)) -> Result<State> {
    let (w_m, w_p) = weights;
    let (left, right) = block.bounds();
    let origin = if left.is_finite() { left } else { right };
    let (kk, k1) = match model {
        Model::Dirac { c } => {
            let disp = Dispersion::at(z, c);
            (disp.k, disp.k1()?)
        }
        Model::Schrodinger => {
            let s = crate::dispersion::sqrt_up(z);
            (s, s)
        }
    };
    let decays = kk.im > 0.0;
    let (w_m, w_p) = match block {
        Block::Interval { .. } => (w_m, w_p),
        Block::HalfLineLeft { .. } => {
            if !decays && w_m != ZERO {
                return invalid("f_a^- is not square-integrable at this z");
            }
            (w_m, ZERO)
        }
        Block::HalfLineRight { .. } => {
            if !decays && w_p != ZERO {
                return invalid("f_b^+ is not square-integrable at this z");
            }
            (ZERO, w_p)
        }
    };
    if w_m == ZERO && w_p == ZERO {
        return Ok(State::zero(model));
    }
    // Fold e^{±ik·origin} into the coefficients.
    let ik = I * kk;
    let em = w_m * (-ik * origin).exp();
    let ep = w_p * (ik * origin).exp();
    let mut f1 = ExpPoly::zero();
    let mut f2 = ExpPoly::zero();
    if em != ZERO {
        f1 = f1.add(&ExpPoly::exp(em, -ik));
        f2 = f2.add(&ExpPoly::exp(-k1 * em, -ik));
    }
    if ep != ZERO {
        f1 = f1.add(&ExpPoly::exp(ep, ik));
        f2 = f2.add(&ExpPoly::exp(k1 * ep, ik));
    }
    let comps = match model {
        Model::Dirac { .. } => vec![f1, f2],
        Model::Schrodinger => vec![f1],
    };
    Ok(State { model, pieces: vec![Piece { left, right, comps }] })
}

/// Exact `L² ⊗ ℂ^m` inner product `⟨f, g⟩` (linear in `f`).
pub fn inner_product(f: &State, g: &State) -> Result<C64> {
    if f.model.dim() != g.model.dim() {
        return invalid("inner product of states with different component counts");
    }
    let mut acc = ZERO;
    for p in &f.pieces {
        for q in &g.pieces {
            if p.left == q.left && p.right == q.right {
                for (a, b) in p.comps.iter().zip(&q.comps) {
                    acc += integrate_product(a, b, p.span())?;
                }
            } else if p.right <= q.left || q.right <= p.left {
                continue;
            } else {
                return invalid("states live on mismatched lattices");
            }
        }
    }
    Ok(acc)
}

/// Which boundary triplet to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryFlavor {
    /// `Γ̃₀ = (f₁(l+), ic f₂(r−))`, `Γ̃₁ = (ic f₂(l+), f₁(r−))`.
    Tilde,
    /// `Γ₀ = RΓ̃₀`, `Γ₁ = R⁻¹(Γ̃₁ − QΓ̃₀)`.
    Regularized,
    /// `Γ₀ = ic f₂(a−)`, `Γ₁ = f₁(a−)`.
    HalfLineLeft,
    /// `Γ₀ = f₁(b+)`, `Γ₁ = ic f₂(b+)`.
    HalfLineRight,
    /// `Γ̃₀ = (f(l+), f'(r−))`, `Γ̃₁ = (f'(l+), f(r−))`.
    SchrodingerTilde,
    /// Schrödinger analogue of `Regularized` with `R_H = diag(d^{1/2}, d^{3/2})`.
    SchrodingerRegularized,
    /// `Γ₀ = f'(a−)`, `Γ₁ = f(a−)`.
    SchrodingerHalfLineLeft,
    /// `Γ₀ = f(b+)`, `Γ₁ = f'(b+)`.
    SchrodingerHalfLineRight,
}

impl BoundaryFlavor {
    pub const ALL: [BoundaryFlavor; 8] = [
        BoundaryFlavor::Tilde,
        BoundaryFlavor::Regularized,
        BoundaryFlavor::HalfLineLeft,
        BoundaryFlavor::HalfLineRight,
        BoundaryFlavor::SchrodingerTilde,
        BoundaryFlavor::SchrodingerRegularized,
        BoundaryFlavor::SchrodingerHalfLineLeft,
        BoundaryFlavor::SchrodingerHalfLineRight,
    ];

    pub fn is_dirac(&self) -> bool {
        matches!(
            self,
            BoundaryFlavor::Tilde
                | BoundaryFlavor::Regularized
                | BoundaryFlavor::HalfLineLeft
                | BoundaryFlavor::HalfLineRight
        )
    }

    fn accepts(&self, span: Span) -> bool {
        use BoundaryFlavor::*;
        match self {
            Tilde | Regularized | SchrodingerTilde | SchrodingerRegularized => matches!(span, Span::Finite(_)),
            HalfLineLeft | SchrodingerHalfLineLeft => span == Span::Left,
            HalfLineRight | SchrodingerHalfLineRight => span == Span::Right,
        }
    }
}

/// Boundary values `u = Γ₀f`, `v = Γ₁f`, concatenated over pieces
/// (two entries per interval, one per half-line).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub u: Vec<C64>,
    pub v: Vec<C64>,
}

/// Tilde data of one finite piece: `(Γ̃₀, Γ̃₁)`.
fn tilde_pair(model: Model, p: &Piece) -> ([C64; 2], [C64; 2]) {
    let (l, r) = (p.left_trace(), p.right_trace());
    match model {
        Model::Dirac { c } => {
            let ic = C64::new(0.0, c);
            ([l[0], ic * r[1]], [ic * l[1], r[0]])
        }
        Model::Schrodinger => {
            let dl = p.comps[0].derivative().eval(0.0);
            let d = p.right - p.left;
            let dr = p.comps[0].derivative().eval(d);
            ([l[0], dr], [dl, r[0]])
        }
    }
}

/// Regularizer entries `(R₁₁, R₂₂)` and `Q₂₂ = d` of a piece of length `d`.
pub(crate) fn regularizer_diag(model: Model, d: f64) -> Result<(f64, f64)> {
    let r22 = match model {
        Model::Dirac { c } => d.powf(1.5) / crate::dispersion::nu(d, c)?,
        Model::Schrodinger => d.powf(1.5),
    };
    Ok((d.sqrt(), r22))
}

/// Apply `Γ₀ = RΓ̃₀`, `Γ₁ = R⁻¹(Γ̃₁ − QΓ̃₀)` with `Q = [[0,1],[1,d]]`.
pub(crate) fn regularize(model: Model, d: f64, u: [C64; 2], v: [C64; 2]) -> Result<([C64; 2], [C64; 2])> {
    let (r1, r2) = regularizer_diag(model, d)?;
    let qv = [u[1], u[0] + d * u[1]];
    Ok(([u[0] * r1, u[1] * r2], [(v[0] - qv[0]) / r1, (v[1] - qv[1]) / r2]))
}

/// Boundary data of a state in the given flavor.
pub fn boundary_map(f: &State, flavor: BoundaryFlavor) -> Result<BoundaryData> {
    let dirac = matches!(f.model, Model::Dirac { .. });
    if dirac != flavor.is_dirac() && !f.pieces.is_empty() {
        return invalid(format!("flavor {flavor:?} does not apply to this state"));
    }
    let mut u = Vec::new();
    let mut v = Vec::new();
    for p in &f.pieces {
        if !flavor.accepts(p.span()) {
            return invalid(format!("flavor {flavor:?} does not apply to a piece on [{}, {}]", p.left, p.right));
        }
        use BoundaryFlavor::*;
        match flavor {
            Tilde | SchrodingerTilde => {
                let (a, b) = tilde_pair(f.model, p);
                u.extend(a);
                v.extend(b);
            }
            Regularized | SchrodingerRegularized => {
                let (a, b) = tilde_pair(f.model, p);
                let (a, b) = regularize(f.model, p.right - p.left, a, b)?;
                u.extend(a);
                v.extend(b);
            }
            HalfLineLeft | HalfLineRight => {
                let c = f.c().expect("dirac state");
                let t = p.right_trace_or_left();
                let ic = C64::new(0.0, c);
                if flavor == HalfLineLeft {
                    u.push(ic * t[1]);
                    v.push(t[0]);
                } else {
                    u.push(t[0]);
                    v.push(ic * t[1]);
                }
            }
            SchrodingerHalfLineLeft | SchrodingerHalfLineRight => {
                let val = p.comps[0].eval(0.0);
                let der = p.comps[0].derivative().eval(0.0);
                if flavor == SchrodingerHalfLineLeft {
                    u.push(der);
                    v.push(val);
                } else {
                    u.push(val);
                    v.push(der);
                }
            }
        }
    }
    Ok(BoundaryData { u, v })
}

impl Piece {
    /// Values at the finite end of a half-line (origin).
    fn right_trace_or_left(&self) -> Vec<C64> {
        self.comps.iter().map(|p| p.eval(0.0)).collect()
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// `|(Af, g) − (f, Ag) − [(Γ₁f, Γ₀g) − (Γ₀f, Γ₁g)]|` with exact integrals,
/// relative to `max(1, |(Af, g)| + |(f, Ag)|)`.
pub fn green_residual(f: &State, g: &State, flavor: BoundaryFlavor) -> Result<f64> {
    let (afg, fag) = (inner_product(&f.apply(), g)?, inner_product(f, &g.apply())?);
    let lhs = afg - fag;
    let bf = boundary_map(f, flavor)?;
    let bg = boundary_map(g, flavor)?;
    if bf.u.len() != bg.u.len() && !(bf.u.is_empty() || bg.u.is_empty()) {
        return invalid("states have different block counts");
    }
    let rhs = if bf.u.is_empty() || bg.u.is_empty() {
        ZERO
    } else {
        dot(&bf.v, &bg.u) - dot(&bf.u, &bg.v)
    };
    Ok((lhs - rhs).norm() / (afg.norm() + fag.norm()).max(1.0))
}

/// Piecewise affine scalar function on a finite run of lattice intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarState {
    /// Interval endpoints `x₀ < x₁ < … < x_N`.
    pub points: Vec<f64>,
    /// `g(x_{n−1}+) = a_n⁺`.
    pub a_plus: Vec<C64>,
    /// `g(x_n−) = a_n⁻`.
    pub a_minus: Vec<C64>,
    /// Function vanishes beyond `x_N` (compact support).
    pub compact: bool,
}

/// One-sided traces and jumps of a piecewise function.
#[derive(Debug, Clone, PartialEq)]
pub struct Traces {
    /// `π₊ = {f(x_{n−1}+)}`.
    pub plus: Vec<C64>,
    /// `π₋ = {f(x_n−)}`.
    pub minus: Vec<C64>,
    /// `f(x_n−) − f(x_{n−1}+)` per interval.
    pub jumps: Vec<C64>,
}

/// `g_n(x) = a_n⁺ + d_n⁻¹(x − x_{n−1})(a_n⁻ − a_n⁺)` on the first `N` intervals.
pub fn linear_interpolant(lattice: &Lattice, a_plus: &[C64], a_minus: &[C64]) -> Result<ScalarState> {
    if a_plus.len() != a_minus.len() {
        return invalid("a_plus and a_minus must have equal lengths");
    }
    if let Some(n) = lattice.len() {
        if a_plus.len() > n {
            return invalid(format!("{} values for a lattice with {n} intervals", a_plus.len()));
        }
    }
    Ok(ScalarState {
        points: lattice.points(a_plus.len()),
        a_plus: a_plus.to_vec(),
        a_minus: a_minus.to_vec(),
        compact: true,
    })
}

impl ScalarState {
    pub fn len(&self) -> usize {
        self.a_plus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a_plus.is_empty()
    }

    pub fn d(&self, n: usize) -> f64 {
        self.points[n + 1] - self.points[n]
    }

    /// Slope on interval `n` (0-based).
    pub fn slope(&self, n: usize) -> C64 {
        (self.a_minus[n] - self.a_plus[n]) / self.d(n)
    }

    /// `‖g_n‖² = (d/3)(|a⁺|² + |a⁻|² + Re a⁺ conj a⁻)`.
    pub fn norm_sq_piece(&self, n: usize) -> f64 {
        let (p, m) = (self.a_plus[n], self.a_minus[n]);
        self.d(n) / 3.0 * (p.norm_sqr() + m.norm_sqr() + (p * m.conj()).re)
    }

    pub fn norm_sq(&self) -> f64 {
        (0..self.len()).map(|n| self.norm_sq_piece(n)).sum()
    }

    /// `‖g′‖²` on interval `n`.
    pub fn deriv_norm_sq_piece(&self, n: usize) -> f64 {
        self.slope(n).norm_sqr() * self.d(n)
    }

    pub fn deriv_norm_sq(&self) -> f64 {
        (0..self.len()).map(|n| self.deriv_norm_sq_piece(n)).sum()
    }

    /// `‖g‖²_{W^{1,2}} = ‖g‖² + ‖g′‖²` (piecewise).
    pub fn w12_norm_sq(&self) -> f64 {
        self.norm_sq() + self.deriv_norm_sq()
    }

    /// `∫ |g|²/x² dx` (requires `x₀ = 0` and `g(0) = 0`, or `x₀ > 0`).
    pub fn hardy_integral(&self) -> Result<f64> {
        let mut acc = 0.0;
        for n in 0..self.len() {
            let (x0, x1) = (self.points[n], self.points[n + 1]);
            // g = a + b·x on [x0, x1]
            let b = self.slope(n);
            let a = self.a_plus[n] - b * x0;
            if x0 == 0.0 {
                if a.norm() > 1e-300 {
                    return invalid("hardy integral diverges unless g(0) = 0");
                }
                acc += b.norm_sqr() * x1;
            } else if x0 < 0.0 {
                return invalid("hardy integral requires a lattice in [0, ∞)");
            } else {
                acc += a.norm_sqr() * (1.0 / x0 - 1.0 / x1)
                    + 2.0 * (a * b.conj()).re * (x1 / x0).ln()
                    + b.norm_sqr() * (x1 - x0);
            }
        }
        Ok(acc)
    }

    pub fn traces(&self) -> Traces {
        trace_sequences_scalar(self)
    }
}

/// Traces of a piecewise-affine scalar function.
pub fn trace_sequences_scalar(g: &ScalarState) -> Traces {
    Traces {
        plus: g.a_plus.clone(),
        minus: g.a_minus.clone(),
        jumps: g.a_minus.iter().zip(&g.a_plus).map(|(m, p)| m - p).collect(),
    }
}

/// Traces of one component of a state on its finite pieces.
pub fn trace_sequences(f: &State, component: usize) -> Result<Traces> {
    if component >= f.model.dim() {
        return invalid(format!("component {component} out of range"));
    }
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for p in f.pieces.iter().filter(|p| matches!(p.span(), Span::Finite(_))) {
        plus.push(p.left_trace()[component]);
        minus.push(p.right_trace()[component]);
    }
    let jumps = minus.iter().zip(&plus).map(|(m, p)| m - p).collect();
    Ok(Traces { plus, minus, jumps })
}

/// `sin(wd)/w` as an entire function of `w`.
pub(crate) fn sin_over(w: C64, d: f64) -> C64 {
    sinc(w * d) * d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_lattice, Count, SequenceRule};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Composite Simpson on a fine grid; good enough for smooth integrands.
    fn simpson(f: impl Fn(f64) -> C64, a: f64, b: f64, n: usize) -> C64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn moments_match_quadrature() {
        for &s in &[c(0.3, -0.2), c(-4.0, 7.0), c(1e-9, 0.0), c(0.0, 0.0)] {
            for j in 0..3 {
                let exact = moment(j, s, Span::Finite(1.3)).unwrap();
                let num = simpson(|t| t.powi(j as i32) * (s * t).exp(), 0.0, 1.3, 2000);
                assert!((exact - num).norm() < 1e-10, "j={j} s={s}");
            }
        }
        let s = c(-2.0, 1.0);
        assert!((moment(1, s, Span::Right).unwrap() - 1.0 / (s * s)).norm() < 1e-15);
        assert!(moment(0, c(1.0, 0.0), Span::Right).is_err());
    }

    #[test]
    fn defect_residual_and_norm() {
        let m = Model::Dirac { c: 1.0 };
        let z = c(0.0, 1.0);
        let f = defect_state(m, Block::Interval { left: 0.0, d: 1.0 }, z, (ONE, ZERO)).unwrap();
        let df = f.apply();
        for i in 0..20 {
            let x = i as f64 / 19.0;
            let (a, b) = (df.pieces[0].eval(x), f.pieces[0].eval(x));
            assert!((a[0] - z * b[0]).norm() < 1e-12 && (a[1] - z * b[1]).norm() < 1e-12);
        }
        let g = defect_state(m, Block::HalfLineRight { b: 0.0 }, z, (ZERO, ONE)).unwrap();
        let disp = Dispersion::at(z, 1.0);
        let k1 = disp.k1().unwrap();
        let expect = (1.0 + k1.norm_sqr()) / (2.0 * disp.k.im);
        assert!((g.norm_sq().unwrap() - expect).abs() < 1e-13);
        let zero = defect_state(m, Block::Interval { left: 0.0, d: 1.0 }, z, (ZERO, ZERO)).unwrap();
        assert!(zero.pieces.is_empty());
        assert!(defect_state(m, Block::HalfLineRight { b: 0.0 }, c(2.0, 0.0), (ZERO, ONE)).is_err());
    }

    #[test]
    fn solution_matches_initial_data() {
        let cc = 1.7;
        let disp = Dispersion::at(c(0.4, 0.9), cc);
        let p = State::dirac_solution(cc, 0.5, 0.8, &disp, c(1.0, 2.0), c(-0.5, 0.3));
        let t = p.left_trace();
        assert!((t[0] - c(1.0, 2.0)).norm() < 1e-14);
        assert!((-I * t[1] - c(-0.5, 0.3)).norm() < 1e-14);
        let st = State { model: Model::Dirac { c: cc }, pieces: vec![p] };
        let a = st.apply();
        let x = 0.9;
        let (u, v) = (a.pieces[0].eval(x), st.pieces[0].eval(x));
        assert!((u[0] - disp.z() * v[0]).norm() < 1e-12);
        assert!((u[1] - disp.z() * v[1]).norm() < 1e-12);
    }

    #[test]
    fn green_identity_all_flavors() {
        let z1 = c(0.0, 1.0);
        let z2 = c(1.0, 2.0);
        let w1 = (c(0.3, -1.0), c(0.7, 0.2));
        let w2 = (c(-1.1, 0.4), c(0.1, 0.9));
        for flavor in BoundaryFlavor::ALL {
            let model = if flavor.is_dirac() { Model::Dirac { c: 1.3 } } else { Model::Schrodinger };
            let block = match flavor {
                BoundaryFlavor::HalfLineLeft | BoundaryFlavor::SchrodingerHalfLineLeft => Block::HalfLineLeft { a: 0.2 },
                BoundaryFlavor::HalfLineRight | BoundaryFlavor::SchrodingerHalfLineRight => {
                    Block::HalfLineRight { b: -0.4 }
                }
                _ => Block::Interval { left: 0.1, d: 0.9 },
            };
            let f = defect_state(model, block, z1, w1).unwrap();
            let g = defect_state(model, block, z2, w2).unwrap();
            let r = green_residual(&f, &g, flavor).unwrap();
            assert!(r < 1e-10, "{flavor:?}: {r}");
            assert!(green_residual(&f, &f, flavor).unwrap() < 1e-12);
        }
    }

    #[test]
    fn inner_product_matches_quadrature() {
        let m = Model::Dirac { c: 1.0 };
        let blk = Block::Interval { left: 0.0, d: 1.0 };
        let f = defect_state(m, blk, c(0.0, 1.0), (c(1.0, 0.5), c(-0.2, 1.0))).unwrap();
        let g = defect_state(m, blk, c(0.0, 2.0), (c(0.3, 0.0), c(0.8, -0.4))).unwrap();
        let exact = inner_product(&f, &g).unwrap();
        let num = simpson(
            |x| {
                let (a, b) = (f.pieces[0].eval(x), g.pieces[0].eval(x));
                a[0] * b[0].conj() + a[1] * b[1].conj()
            },
            0.0,
            1.0,
            4000,
        );
        assert!((exact - num).norm() < 1e-10);
        let far = defect_state(m, Block::Interval { left: 1.0, d: 1.0 }, c(0.0, 1.0), (ONE, ONE)).unwrap();
        assert_eq!(inner_product(&f, &far).unwrap(), ZERO);
        let overlap = defect_state(m, Block::Interval { left: 0.5, d: 1.0 }, c(0.0, 1.0), (ONE, ONE)).unwrap();
        assert!(inner_product(&f, &overlap).is_err());
    }

    #[test]
    fn interpolant_norms() {
        let l = build_lattice(0.0, SequenceRule::constant(1.0), Count::Infinite).unwrap();
        let g = linear_interpolant(&l, &[ONE], &[ONE]).unwrap();
        assert!((g.norm_sq() - 1.0).abs() < 1e-15);
        let g = linear_interpolant(&l, &[ONE], &[ZERO]).unwrap();
        assert!((g.norm_sq() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(g.traces().jumps, vec![c(-1.0, 0.0)]);
        let g = linear_interpolant(&l, &[ZERO], &[ONE]).unwrap();
        assert_eq!(g.traces().jumps, vec![ONE]);
        assert!(linear_interpolant(&l, &[ONE], &[]).is_err());
    }

    #[test]
    fn regularized_zero_at_gap_center_data() {
        // At z = c²/2 the γ̃-image of v has Γ̃₁ = Qv, so Γ₁ vanishes.
        let cc = 1.0;
        let d = 0.7;
        let disp = Dispersion::at_offset(ZERO, cc);
        // Γ̃₀ = (v1, v2): f₁(0) = v1, −c·g(d) = v2 with g constant = y0.
        let (v1, v2) = (c(0.4, 0.1), c(-0.3, 0.8));
        let y0 = -v2 / cc;
        let p = State::dirac_solution(cc, 0.0, d, &disp, v1, y0);
        let st = State { model: Model::Dirac { c: cc }, pieces: vec![p] };
        let b = boundary_map(&st, BoundaryFlavor::Regularized).unwrap();
        assert!(b.v.iter().all(|x| x.norm() < 1e-14), "{:?}", b.v);
    }
}
