//! Self-adjointness, deficiency, discreteness and spectral-type tests.
//!
//! Every test reads sequence tails through their [`Asym`] descriptors. When
//! a descriptor cannot settle a question, the verdict is `inconclusive` and
//! carries partial sums as diagnostics; the tests never guess from finite data.
//!
//! β data are reduced to α = c²β first; the two operators are unitarily
//! equivalent.

use crate::error::{GsdError, Result};
use crate::model::{
    beta_to_alpha, Asym, Lattice, Limit, ModelConfig, SequenceRule, SeriesValue, StrengthKind, StrengthSeq, Term,
};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

const RATIO_TOL: f64 = 1e-12;
const CHECKPOINTS: [usize; 4] = [10, 100, 1000, 10_000];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictValue {
    Yes,
    No,
    Inconclusive,
}

/// One piece of numeric or analytic evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Evidence {
    /// Analytic limit of a named sequence.
    Limit { name: String, limit: Limit },
    /// Analytic convergence of a named series (`None`: undetermined).
    Series { name: String, convergent: Option<bool> },
    /// Partial sums `Σ_{k ≤ n}` at checkpoints; nondecreasing by construction.
    PartialSums { name: String, n: Vec<usize>, sums: Vec<f64> },
    /// Free-form scalar.
    Value { name: String, value: f64 },
}

/// Outcome of one test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub value: VerdictValue,
    pub test: String,
    /// Always present for `inconclusive`.
    pub reason: Option<String>,
    pub evidence: Vec<Evidence>,
}

impl Verdict {
    fn new(value: VerdictValue, test: &str, reason: impl Into<String>, evidence: Vec<Evidence>) -> Self {
        Verdict { value, test: test.into(), reason: Some(reason.into()), evidence }
    }

    fn yes(test: &str, reason: impl Into<String>, evidence: Vec<Evidence>) -> Self {
        Self::new(VerdictValue::Yes, test, reason, evidence)
    }

    fn no(test: &str, reason: impl Into<String>, evidence: Vec<Evidence>) -> Self {
        Self::new(VerdictValue::No, test, reason, evidence)
    }

    fn inconclusive(test: &str, reason: impl Into<String>, evidence: Vec<Evidence>) -> Self {
        Self::new(VerdictValue::Inconclusive, test, reason, evidence)
    }

    pub fn is_yes(&self) -> bool {
        self.value == VerdictValue::Yes
    }

    pub fn is_no(&self) -> bool {
        self.value == VerdictValue::No
    }
}

fn limit_ev(name: &str, limit: Limit) -> Evidence {
    Evidence::Limit { name: name.into(), limit }
}

fn series_ev(name: &str, convergent: Option<bool>) -> Evidence {
    Evidence::Series { name: name.into(), convergent }
}

/// Partial sums of `|f(n)|` at the checkpoints within `max` terms.
fn partial_sums(name: &str, max: Option<usize>, f: impl Fn(usize) -> f64) -> Evidence {
    let limit = max.unwrap_or(CHECKPOINTS[CHECKPOINTS.len() - 1]);
    let mut n = Vec::new();
    let mut sums = Vec::new();
    let mut acc = 0.0;
    let mut next = 0;
    for k in 1..=limit {
        let v = f(k).abs();
        acc += if v.is_finite() { v } else { 0.0 };
        if next < CHECKPOINTS.len() && k == CHECKPOINTS[next] {
            n.push(k);
            sums.push(acc);
            next += 1;
        }
    }
    if n.last() != Some(&limit) {
        n.push(limit);
        sums.push(acc);
    }
    Evidence::PartialSums { name: name.into(), n, sums }
}

/// Tail descriptor of a strength rule, ignoring `+∞` entries in a prefix.
/// `Err(())` flags an identically infinite tail.
fn tail_asym(rule: &SequenceRule) -> std::result::Result<Option<Asym>, ()> {
    if rule.tail_is_infinite() {
        return Err(());
    }
    Ok(rule.asym())
}

/// Finite-valued strength term (`+∞ ↦ None`).
fn finite_term(rule: &SequenceRule, n: usize) -> Option<f64> {
    rule.term_at(n).filter(|v| v.is_finite())
}

fn as_alpha(s: &StrengthSeq, c: f64) -> Result<StrengthSeq> {
    match s.kind {
        StrengthKind::Alpha => Ok(s.clone()),
        StrengthKind::Beta => beta_to_alpha(s, c),
    }
}

/// Carleman: `Σ d_n = ∞` ⇒ self-adjoint for every strength sequence.
pub fn carleman_test(lattice: &Lattice, c: f64) -> Verdict {
    const T: &str = "carleman";
    let ps = partial_sums("sum d_n sqrt(1 + (c d_n)^2)", lattice.len(), |n| lattice.d(n) * (1.0 + (c * lattice.d(n)).powi(2)).sqrt());
    let Some(d) = lattice.asym() else {
        return Verdict::inconclusive(T, "finitely many gaps: Σ d_n < ∞", vec![ps]);
    };
    match d.summable_abs() {
        Some(false) => Verdict::yes(T, "Σ d_n = ∞: self-adjoint for any strengths", vec![series_ev("sum d_n", Some(false)), ps]),
        Some(true) => Verdict::inconclusive(T, "Σ d_n < ∞: Carleman's test is silent", vec![series_ev("sum d_n", Some(true)), ps]),
        None => Verdict::inconclusive(T, "tail descriptor cannot decide Σ d_n", vec![series_ev("sum d_n", None), ps]),
    }
}

/// `√(d_n d_{n+1})` as a descriptor.
fn geometric_mean_gaps(d: &Asym) -> Option<Asym> {
    d.mul(&d.shift()).powf(0.5)
}

/// Dennis–Wall: `Σ √(d_n d_{n+1})|α_n| = ∞` ⇒ self-adjoint (finite intervals).
pub fn dennis_wall_test(lattice: &Lattice, strengths: &StrengthSeq, c: f64) -> Result<Verdict> {
    const T: &str = "dennis_wall";
    let alpha = as_alpha(strengths, c)?;
    let ps = partial_sums("sum sqrt(d_n d_{n+1}) |alpha_n|", lattice.len().map(|n| n.saturating_sub(1)), |n| {
        finite_term(&alpha.rule, n).map_or(0.0, |a| (lattice.d(n) * lattice.d(n + 1)).sqrt() * a)
    });
    if lattice.right_end() == Some(f64::INFINITY) {
        return Ok(Verdict::inconclusive(T, "stated for finite intervals", vec![ps]));
    }
    let Some(d) = lattice.asym() else {
        return Ok(Verdict::inconclusive(T, "finitely many points: the series is a finite sum", vec![ps]));
    };
    let a = match tail_asym(&alpha.rule) {
        Err(()) => return Ok(Verdict::yes(T, "infinitely many +inf strengths: series diverges", vec![ps])),
        Ok(None) => return Ok(Verdict::inconclusive(T, "explicit strengths: no tail descriptor", vec![ps])),
        Ok(Some(a)) => a,
    };
    let Some(g) = geometric_mean_gaps(&d) else {
        return Ok(Verdict::inconclusive(T, "gap descriptor too coarse", vec![ps]));
    };
    let conv = g.mul(&a.abs()).summable_abs();
    let ev = vec![series_ev("sum sqrt(d_n d_{n+1}) |alpha_n|", conv), ps];
    Ok(match conv {
        Some(false) => Verdict::yes(T, "series diverges: self-adjoint", ev),
        Some(true) => Verdict::inconclusive(T, "series converges: Dennis–Wall is silent", ev),
        None => Verdict::inconclusive(T, "convergence undetermined by descriptors", ev),
    })
}

/// Convergence of the main series `Σ d_n Π_{k<n}(1 + |α_k|/c)²` from its
/// term ratio `ρ_n = (d_{n+1}/d_n)(1 + |α_n|/c)²`.
fn main_series(d: &Asym, a: &Asym, c: f64) -> (Option<bool>, Vec<Evidence>) {
    let Some(inv) = d.recip() else {
        return (None, vec![]);
    };
    let w = a.abs().scale(1.0 / c).add_const(1.0);
    let rho = d.shift().mul(&inv).mul(&w.mul(&w));
    let lim = rho.limit();
    let mut ev = vec![limit_ev("ratio (d_{n+1}/d_n)(1+|alpha_n|/c)^2", lim)];
    let verdict = match lim {
        Limit::Finite(r) if r < 1.0 - RATIO_TOL => Some(true),
        Limit::Finite(r) if r > 1.0 + RATIO_TOL => Some(false),
        Limit::PosInf => Some(false),
        Limit::Finite(_) => match rho.unit_expansion() {
            Some(g) => {
                ev.push(Evidence::Value { name: "gauss exponent".into(), value: g });
                if g < -1.0 - RATIO_TOL {
                    Some(true)
                } else if g > -1.0 + RATIO_TOL {
                    Some(false)
                } else {
                    None
                }
            }
            None => None,
        },
        _ => None,
    };
    ev.push(series_ev("sum d_n prod_{k<n} (1+|alpha_k|/c)^2", verdict));
    (verdict, ev)
}

/// Sufficient conditions for `n_±(D_{X,α}) = 1` on finite intervals:
/// `α ∈ ℓ¹`, or convergence of the main series (ratio or Gauss form).
/// `No` means a self-adjointness test fired instead.
pub fn deficiency_tests(lattice: &Lattice, strengths: &StrengthSeq, c: f64) -> Result<Verdict> {
    const T: &str = "deficiency";
    let alpha = as_alpha(strengths, c)?;
    let positive = positive_deficiency(lattice, &alpha, c);
    let carleman = carleman_test(lattice, c);
    let dw = dennis_wall_test(lattice, &alpha, c)?;
    let sa = if carleman.is_yes() { Some(&carleman) } else if dw.is_yes() { Some(&dw) } else { None };
    match (positive, sa) {
        (Some(p), Some(s)) => Err(GsdError::Contradiction(format!(
            "{} asserts n± = 1 while {} asserts self-adjointness",
            p.test, s.test
        ))),
        (Some(p), None) => Ok(p),
        (None, Some(s)) => Ok(Verdict::no(
            T,
            format!("{} yields self-adjointness (n± = 0)", s.test),
            s.evidence.clone(),
        )),
        (None, None) => {
            let mut ev = Vec::new();
            if let (Some(d), Ok(Some(a))) = (lattice.asym(), tail_asym(&alpha.rule)) {
                ev = main_series(&d, &a, c).1;
            }
            Ok(Verdict::inconclusive(T, "no sufficient condition holds analytically", ev))
        }
    }
}

/// The positive (n± = 1) tests alone.
fn positive_deficiency(lattice: &Lattice, alpha: &StrengthSeq, c: f64) -> Option<Verdict> {
    if lattice.right_end().is_none_or(|b| !b.is_finite()) {
        return None;
    }
    let Some(d) = lattice.asym() else {
        // Finitely many points: the endpoint b is regular.
        return Some(Verdict::yes(
            "l1_strengths",
            "finitely many interactions on a finite interval (α trivially in ℓ¹)",
            vec![],
        ));
    };
    let a = match tail_asym(&alpha.rule) {
        Ok(Some(a)) => a,
        _ => return None,
    };
    if a.summable_abs() == Some(true) {
        return Some(Verdict::yes("l1_strengths", "α ∈ ℓ¹ ⇒ n± = 1", vec![series_ev("sum |alpha_n|", Some(true))]));
    }
    let (conv, ev) = main_series(&d, &a, c);
    (conv == Some(true)).then(|| Verdict::yes("main_series", "main series converges ⇒ n± = 1", ev))
}

/// Defect coefficients of the recursion, stored as `mantissa · e^{scale}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefectCoefficients {
    pub a: Vec<C64>,
    pub b: Vec<C64>,
    /// `ln` of the common scale factor of `a_n`, `b_n`.
    pub log_scale: Vec<f64>,
    /// `ln Σ_{k ≤ n} (|a_k|² + |b_k|²) d_k`.
    pub log_weighted_sums: Vec<f64>,
    /// `ln` of the induction bound on `|a_n|`, `|b_n|`.
    pub log_bound: Vec<f64>,
    /// Every step respected the bound.
    pub bound_respected: bool,
    /// Majorant tail analytically summable ⇒ the weighted sum converges.
    pub certificate: bool,
}

impl DefectCoefficients {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `(a_n, b_n)` for 1-based `n` (may overflow to ∞).
    pub fn value(&self, n: usize) -> (C64, C64) {
        let s = self.log_scale[n - 1].exp();
        (self.a[n - 1] * s, self.b[n - 1] * s)
    }

    pub fn ln_abs(&self, n: usize) -> (f64, f64) {
        let s = self.log_scale[n - 1];
        (self.a[n - 1].norm().ln() + s, self.b[n - 1].norm().ln() + s)
    }
}

fn logaddexp(x: f64, y: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return y;
    }
    if y == f64::NEG_INFINITY {
        return x;
    }
    let m = x.max(y);
    m + ((x - m).exp() + (y - m).exp()).ln()
}

/// Run `a_{n+1} = (a_n − i(α_n/2c)(a_n+b_n))e^{d_{n+1}/c}`,
/// `b_{n+1} = (b_n + i(α_n/2c)(a_n+b_n))e^{−d_{n+1}/c}` from
/// `a₁ = e^{d₁/c}`, `b₁ = e^{−d₁/c}` up to `n = N`.
pub fn defect_recursion(lattice: &Lattice, strengths: &StrengthSeq, c: f64, n_max: usize) -> Result<DefectCoefficients> {
    if n_max == 0 {
        return Err(GsdError::InvalidInput("N must be at least 1".into()));
    }
    if let Some(len) = lattice.len() {
        if n_max > len {
            return Err(GsdError::InvalidInput(format!("lattice has only {len} gaps")));
        }
    }
    let alpha = as_alpha(strengths, c)?;
    let mut alphas = Vec::with_capacity(n_max);
    for n in 1..n_max {
        let a = alpha
            .rule
            .term_at(n)
            .ok_or_else(|| GsdError::InvalidInput(format!("strength α_{n} is not available")))?;
        if !a.is_finite() {
            return Err(GsdError::InvalidInput("the recursion requires finite strengths".into()));
        }
        alphas.push(a);
    }
    let d1 = lattice.d(1);
    let (mut a, mut b) = (C64::new((d1 / c).exp(), 0.0), C64::new((-d1 / c).exp(), 0.0));
    let mut scale = 0.0f64;
    let mut out = DefectCoefficients {
        a: vec![],
        b: vec![],
        log_scale: vec![],
        log_weighted_sums: vec![],
        log_bound: vec![],
        bound_respected: true,
        certificate: false,
    };
    let mut log_sum = f64::NEG_INFINITY;
    let mut log_bound = d1 / c;
    let mut push = |a: C64, b: C64, scale: f64, d: f64, log_bound: f64, out: &mut DefectCoefficients| {
        let w = (a.norm_sqr() + b.norm_sqr()).ln() + 2.0 * scale + d.ln();
        log_sum = logaddexp(log_sum, w);
        let tol = 1e-12 * log_bound.abs().max(1.0);
        let (la, lb) = (a.norm().ln() + scale, b.norm().ln() + scale);
        if la > log_bound + tol || lb > log_bound + tol {
            out.bound_respected = false;
        }
        out.a.push(a);
        out.b.push(b);
        out.log_scale.push(scale);
        out.log_weighted_sums.push(log_sum);
        out.log_bound.push(log_bound);
    };
    push(a, b, scale, d1, log_bound, &mut out);
    for (n, &al) in alphas.iter().enumerate() {
        let dn = lattice.d(n + 2);
        let g = C64::new(0.0, al / (2.0 * c));
        let s = a + b;
        let e = (dn / c).exp();
        a = (a - g * s) * e;
        b = (b + g * s) / e;
        let m = a.norm().max(b.norm());
        if m > 1e100 || (m < 1e-100 && m > 0.0) {
            scale += m.ln();
            a /= m;
            b /= m;
        }
        log_bound += dn / c + (1.0 + al.abs() / c).ln();
        push(a, b, scale, dn, log_bound, &mut out);
    }
    out.certificate = lattice.right_end().is_some_and(|b| b.is_finite()) && {
        match (lattice.asym(), tail_asym(&alpha.rule)) {
            (Some(d), Ok(Some(al))) => {
                al.summable_abs() == Some(true) || main_series(&d, &al, c).0 == Some(true)
            }
            (None, _) => true,
            _ => false,
        }
    };
    Ok(out)
}

/// Chihara-type discreteness test on the half-line.
pub fn chihara_discreteness(lattice: &Lattice, strengths: &StrengthSeq, c: f64) -> Result<Verdict> {
    const T: &str = "chihara";
    let alpha = as_alpha(strengths, c)?;
    if lattice.right_end() != Some(f64::INFINITY) {
        return Ok(Verdict::inconclusive(T, "stated for the half-line", vec![]));
    }
    let Some(d) = lattice.asym() else {
        return Ok(Verdict::inconclusive(T, "no gap descriptor", vec![]));
    };
    let dlim = d.limit();
    let mut ev = vec![limit_ev("d_n", dlim)];
    match dlim {
        Limit::Finite(v) if v == 0.0 => {}
        Limit::Unknown => return Ok(Verdict::inconclusive(T, "lim d_n undetermined", ev)),
        _ => return Ok(Verdict::no(T, "lim d_n ≠ 0: spectrum is not discrete", ev)),
    }
    let (ratio, cross) = match tail_asym(&alpha.rule) {
        Err(()) => (Limit::PosInf, Limit::Finite(0.0)),
        Ok(None) => return Ok(Verdict::inconclusive(T, "explicit strengths: no tail descriptor", ev)),
        Ok(Some(a)) => {
            let ratio = match d.recip() {
                Some(inv) => a.abs().mul(&inv).limit(),
                None => Limit::Unknown,
            };
            let cross = match a.limit() {
                Limit::PosInf | Limit::NegInf => Limit::Finite(0.0),
                Limit::Finite(v) if v != 0.0 => Limit::Finite(c / v),
                Limit::Finite(_) => match a.eventual_sign() {
                    Some(s) if s > 0.0 => Limit::PosInf,
                    Some(s) if s < 0.0 => Limit::NegInf,
                    _ => Limit::Unknown,
                },
                Limit::Unknown => Limit::Unknown,
            };
            (ratio, cross)
        }
    };
    ev.push(limit_ev("|alpha_n|/d_n", ratio));
    ev.push(limit_ev("c/alpha_n", cross));
    let ratio_ok = ratio == Limit::PosInf;
    let cross_ok = match cross {
        Limit::Finite(v) => v > -0.25,
        Limit::PosInf => true,
        _ => false,
    };
    Ok(if ratio_ok && cross_ok {
        Verdict::yes(T, "lim d_n = 0, lim |α_n|/d_n = ∞, lim c/α_n > −1/4", ev)
    } else if cross == Limit::Unknown {
        Verdict::inconclusive(T, "lim c/α_n does not exist or is undetermined", ev)
    } else {
        Verdict::inconclusive(T, "Chihara conditions not all satisfied", ev)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralTag {
    /// `σ_ess = ℝ ∖ (−c²/2, c²/2)`.
    EssentialGapComplement,
    /// `σ_ac = ℝ ∖ (−c²/2, c²/2)`, unitarily equivalent to the Neumann realization's ac part.
    AcGapComplement,
    PurelySingular,
    Unknown,
}

/// Spectral-type classification with evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralType {
    pub tags: Vec<SpectralTag>,
    pub verdict: Verdict,
}

/// `α_n/d_{n+1}` (or `α_n` when `d_* > 0`) as a descriptor.
fn comparison_ratio(lattice: &Lattice, a: &Asym) -> Option<(Asym, &'static str)> {
    if lattice.d_lower() > 0.0 {
        return Some((a.clone(), "alpha_n"));
    }
    let inv = lattice.asym()?.shift().recip()?;
    Some((a.mul(&inv), "alpha_n/d_{n+1}"))
}

/// Essential / ac / singular classification on the half-line.
pub fn spectral_type(lattice: &Lattice, strengths: &StrengthSeq, c: f64) -> Result<SpectralType> {
    const T: &str = "spectral_type";
    let alpha = as_alpha(strengths, c)?;
    let unknown = |v: Verdict| SpectralType { tags: vec![SpectralTag::Unknown], verdict: v };
    if lattice.right_end() != Some(f64::INFINITY) {
        return Ok(unknown(Verdict::inconclusive(T, "stated for the half-line", vec![])));
    }
    let a = match tail_asym(&alpha.rule) {
        Err(()) => {
            return Ok(SpectralType {
                tags: vec![SpectralTag::PurelySingular],
                verdict: Verdict::yes(T, "α_n = +∞ on the tail: limsup |α_n|/d_{n+1} = ∞", vec![]),
            })
        }
        Ok(None) => return Ok(unknown(Verdict::inconclusive(T, "explicit strengths: no tail descriptor", vec![]))),
        Ok(Some(a)) => a,
    };
    let Some((r, name)) = comparison_ratio(lattice, &a) else {
        return Ok(unknown(Verdict::inconclusive(T, "gap descriptor too coarse", vec![])));
    };
    let lim = r.abs().limit();
    let l1 = r.summable_abs();
    let mut ev = vec![limit_ev(&format!("|{name}|"), lim), series_ev(&format!("sum |{name}|"), l1)];
    ev.push(Evidence::Value { name: "d_*".into(), value: lattice.d_lower() });
    let mut tags = Vec::new();
    if lim.is_zero() {
        tags.push(SpectralTag::EssentialGapComplement);
    }
    if l1 == Some(true) {
        tags.push(SpectralTag::AcGapComplement);
    }
    if lim == Limit::PosInf {
        tags.push(SpectralTag::PurelySingular);
    }
    if tags.is_empty() {
        tags.push(SpectralTag::Unknown);
        return Ok(SpectralType { tags, verdict: Verdict::inconclusive(T, "no criterion applies", ev) });
    }
    Ok(SpectralType { tags, verdict: Verdict::yes(T, format!("classified by {name}"), ev) })
}

/// `{(α⁽¹⁾_n − α⁽²⁾_n)/d_{n+1}} ∈ ℓ^p` (plain differences if `d_* > 0`;
/// `p = ∞` means `c₀`). The operator-ideal conclusion is implied, not computed.
pub fn resolvent_comparability(
    s1: &StrengthSeq,
    s2: &StrengthSeq,
    lattice: &Lattice,
    p: f64,
    c: f64,
) -> Result<Verdict> {
    const T: &str = "resolvent_comparability";
    if !(p > 0.0) {
        return Err(GsdError::InvalidInput("p must lie in (0, ∞]".into()));
    }
    let (a1, a2) = (as_alpha(s1, c)?, as_alpha(s2, c)?);
    if a1.rule == a2.rule {
        return Ok(Verdict::yes(T, "identical strengths: zero difference", vec![]));
    }
    let (Ok(Some(x)), Ok(Some(y))) = (tail_asym(&a1.rule), tail_asym(&a2.rule)) else {
        return Ok(Verdict::inconclusive(T, "strength tails lack descriptors", vec![]));
    };
    let diff = x.sub(&y);
    let Some((r, name)) = comparison_ratio(lattice, &diff) else {
        return Ok(Verdict::inconclusive(T, "gap descriptor too coarse", vec![]));
    };
    let inside = r.in_lp(p);
    let ev = vec![
        limit_ev(&format!("|{name} difference|"), r.abs().limit()),
        Evidence::Value { name: "p".into(), value: if p.is_infinite() { f64::MAX } else { p } },
    ];
    Ok(match inside {
        Some(true) => Verdict::yes(T, format!("difference sequence in ℓ^{p}"), ev),
        Some(false) => Verdict::no(T, format!("difference sequence not in ℓ^{p}"), ev),
        None => Verdict::inconclusive(T, "membership undetermined", ev),
    })
}

/// Schrödinger companion report (δ interactions, finite interval).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchrodingerReport {
    pub self_adjoint: Verdict,
    pub deficiency_indices: Option<u8>,
}

/// Companion tests for `H_{X,α} = −d²/dx² + Σ α_n δ(x − x_n)` on a finite interval:
/// `Σ d_n² = ∞` ⇒ self-adjoint; a geometric lattice (`d_{n−1}d_{n+1} = d_n²`)
/// with `d ∈ ℓ²` and `Σ d_{n+1}|α_n + 1/d_n + 1/d_{n+1}| < ∞` ⇒ `n_±(H) = 1`.
pub fn schrodinger_companion(lattice: &Lattice, alpha: &StrengthSeq) -> SchrodingerReport {
    const T: &str = "schrodinger_companion";
    let undecided = |reason: &str| SchrodingerReport {
        self_adjoint: Verdict::inconclusive(T, reason, vec![]),
        deficiency_indices: None,
    };
    if alpha.kind != StrengthKind::Alpha {
        return undecided("companion test covers δ interactions only");
    }
    let Some(d) = lattice.asym() else {
        return undecided("finitely many points");
    };
    let d2 = d.mul(&d);
    match d2.summable_abs() {
        Some(false) => {
            return SchrodingerReport {
                self_adjoint: Verdict::yes(T, "Σ d_n² = ∞ ⇒ H self-adjoint", vec![series_ev("sum d_n^2", Some(false))]),
                deficiency_indices: Some(0),
            }
        }
        None => return undecided("Σ d_n² undetermined"),
        Some(true) => {}
    }
    let geometric = match &lattice.rule {
        SequenceRule::Geometric { .. } => true,
        SequenceRule::Term { power, factorial, .. } => *power == 0.0 && *factorial == 0.0,
        _ => false,
    };
    if !geometric {
        return undecided("lattice is not geometric (d_{n-1}d_{n+1} = d_n² required)");
    }
    let a = match tail_asym(&alpha.rule) {
        Ok(Some(a)) => a,
        _ => return undecided("strengths lack a finite tail descriptor"),
    };
    let (Some(inv), Some(inv_next)) = (d.recip(), d.shift().recip()) else {
        return undecided("gap descriptor too coarse");
    };
    let series = a.add(&inv).add(&inv_next).abs().mul(&d.shift());
    let conv = series.summable_abs();
    let ps = partial_sums("sum d_{n+1}|alpha_n + 1/d_n + 1/d_{n+1}|", None, |n| {
        let (dn, dn1) = (lattice.d(n), lattice.d(n + 1));
        finite_term(&alpha.rule, n).map_or(0.0, |al| dn1 * (al + 1.0 / dn + 1.0 / dn1).abs())
    });
    let ev = vec![series_ev("sum d_{n+1}|alpha_n + 1/d_n + 1/d_{n+1}|", conv), ps];
    if conv == Some(true) {
        SchrodingerReport {
            self_adjoint: Verdict::no(T, "geometric lattice, d ∈ ℓ², summable correction ⇒ n±(H) = 1", ev),
            deficiency_indices: Some(1),
        }
    } else {
        SchrodingerReport { self_adjoint: Verdict::inconclusive(T, "correction series not summable", ev), deficiency_indices: None }
    }
}

/// Full classification of a GS realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub self_adjoint: Verdict,
    /// `n₊ = n₋ ∈ {0, 1}` when determined.
    pub deficiency_indices: Option<u8>,
    pub discrete_spectrum: Verdict,
    pub spectral_type: SpectralType,
    /// Companion Schrödinger verdicts (δ data on finite intervals).
    pub schrodinger: Option<SchrodingerReport>,
    /// Every test that ran, in precedence order.
    pub trail: Vec<Verdict>,
}

/// Run the whole battery in precedence order.
pub fn classify_all(config: &ModelConfig, lattice: &Lattice, strengths: &StrengthSeq) -> Result<ClassificationReport> {
    config.validate()?;
    lattice.check_interval(&config.interval)?;
    let c = config.c;
    let alpha = as_alpha(strengths, c)?;
    let mut trail = Vec::new();

    let carleman = carleman_test(lattice, c);
    trail.push(carleman.clone());
    let dw = dennis_wall_test(lattice, &alpha, c)?;
    trail.push(dw.clone());
    let positive = positive_deficiency(lattice, &alpha, c);
    if let Some(p) = &positive {
        trail.push(p.clone());
    }
    let recursion = if positive.is_none() && !carleman.is_yes() && !dw.is_yes() && lattice.asym().is_some() {
        // Tie-breaker: the recursion certificate.
        match defect_recursion(lattice, &alpha, c, 200) {
            Ok(rec) => {
                let v = if rec.certificate {
                    Verdict::yes("defect_recursion", "majorant tail summable ⇒ defect element in L²", vec![])
                } else {
                    let n = rec.len();
                    Verdict::inconclusive(
                        "defect_recursion",
                        "majorant not analytically summable; raw partial sums only",
                        vec![Evidence::Value { name: format!("ln weighted sum (N={n})"), value: rec.log_weighted_sums[n - 1] }],
                    )
                };
                trail.push(v.clone());
                Some(v)
            }
            Err(_) => None,
        }
    } else {
        None
    };

    let sa_yes = if carleman.is_yes() {
        Some(carleman.clone())
    } else if dw.is_yes() {
        Some(dw.clone())
    } else {
        None
    };
    let n1 = positive.or(recursion.filter(|v| v.is_yes()));
    let (self_adjoint, deficiency_indices) = match (&sa_yes, &n1) {
        (Some(s), Some(p)) => {
            return Err(GsdError::Contradiction(format!(
                "{} asserts self-adjointness while {} asserts n± = 1",
                s.test, p.test
            )))
        }
        (Some(s), None) => (s.clone(), Some(0)),
        (None, Some(p)) => (
            Verdict::no(&p.test, p.reason.clone().unwrap_or_default(), p.evidence.clone()),
            Some(1),
        ),
        (None, None) => (Verdict::inconclusive("battery", "no sufficient condition fired", vec![]), None),
    };

    let discrete = chihara_discreteness(lattice, &alpha, c)?;
    trail.push(discrete.clone());
    let st = spectral_type(lattice, &alpha, c)?;
    trail.push(st.verdict.clone());

    let schrodinger = (strengths.kind == StrengthKind::Alpha
        && lattice.right_end().is_some_and(|b| b.is_finite()))
    .then(|| schrodinger_companion(lattice, strengths));

    Ok(ClassificationReport {
        self_adjoint,
        deficiency_indices,
        discrete_spectrum: discrete,
        spectral_type: st,
        schrodinger,
        trail,
    })
}

/// `Σ d_n` as an analytic series value (diagnostic helper).
pub fn total_length(lattice: &Lattice) -> SeriesValue {
    lattice.total_length()
}

/// Convenience: the constant term descriptor `c`.
pub fn constant_asym(c: f64) -> Asym {
    Asym::exact(Term::constant(c))
}
