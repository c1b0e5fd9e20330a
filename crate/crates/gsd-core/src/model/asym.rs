//! Asymptotic descriptors for sequence tails.
//!
//! A tail is a finite sum of exact terms `coef · rⁿ · nᵖ · (n!)ᶠ` plus an
//! optional `O(g_n)` remainder. This small algebra lets classifiers compute
//! limits, eventual signs and summability from rules, not from truncations.
//!
//! Exponents are identified up to a relative tolerance of `1e-12`. This
//! absorbs rounding in products such as `0.3 · (1/0.3)`.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

const EXP_TOL: f64 = 1e-12;
const CANCEL_TOL: f64 = 1e-13;

/// `coef · ratioⁿ · n^power · (n!)^fact`, with `ratio > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Term {
    pub coef: f64,
    pub ratio: f64,
    pub power: f64,
    pub fact: f64,
}

/// Growth class of a single term as `n → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Growth {
    ToZero,
    Bounded,
    Unbounded,
}

fn feq(a: f64, b: f64) -> bool {
    (a - b).abs() <= EXP_TOL * (1.0 + a.abs().max(b.abs()))
}

fn fcmp(a: f64, b: f64) -> Ordering {
    if feq(a, b) {
        Ordering::Equal
    } else if a < b {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

impl Term {
    pub fn new(coef: f64, ratio: f64, power: f64, fact: f64) -> Self {
        Term { coef, ratio, power, fact }
    }

    pub fn constant(coef: f64) -> Self {
        Term::new(coef, 1.0, 0.0, 0.0)
    }

    /// `coef · n^power`.
    pub fn power_law(coef: f64, power: f64) -> Self {
        Term::new(coef, 1.0, power, 0.0)
    }

    /// Compare the growth of `|self|` and `|other|`, ignoring coefficients.
    pub fn growth_cmp(&self, other: &Term) -> Ordering {
        fcmp(self.fact, other.fact)
            .then(fcmp(self.ratio.ln(), other.ratio.ln()))
            .then(fcmp(self.power, other.power))
    }

    pub fn same_class(&self, other: &Term) -> bool {
        self.growth_cmp(other) == Ordering::Equal
    }

    pub fn growth(&self) -> Growth {
        let one = Term::constant(1.0);
        match self.growth_cmp(&one) {
            Ordering::Less => Growth::ToZero,
            Ordering::Equal => Growth::Bounded,
            Ordering::Greater => Growth::Unbounded,
        }
    }

    /// Is `Σ |term_n|` finite?
    pub fn summable(&self) -> bool {
        if self.coef == 0.0 {
            return true;
        }
        match fcmp(self.fact, 0.0) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => match fcmp(self.ratio, 1.0) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => fcmp(self.power, -1.0) == Ordering::Less,
            },
        }
    }

    pub fn mul(&self, o: &Term) -> Term {
        Term::new(self.coef * o.coef, self.ratio * o.ratio, self.power + o.power, self.fact + o.fact)
    }

    pub fn recip(&self) -> Term {
        Term::new(1.0 / self.coef, 1.0 / self.ratio, -self.power, -self.fact)
    }

    pub fn powf(&self, e: f64) -> Term {
        Term::new(self.coef.powf(e), self.ratio.powf(e), self.power * e, self.fact * e)
    }

    pub fn scale(&self, s: f64) -> Term {
        Term::new(self.coef * s, self.ratio, self.power, self.fact)
    }

    /// Numeric value at index `n ≥ 1`.
    pub fn eval(&self, n: usize) -> f64 {
        if self.coef == 0.0 {
            return 0.0;
        }
        let nf = n as f64;
        let mut log = self.coef.abs().ln() + nf * self.ratio.ln() + self.power * nf.ln();
        if self.fact != 0.0 {
            log += self.fact * ln_factorial(n);
        }
        self.coef.signum() * log.exp()
    }
}

/// `ln(n!)`: exact summation for small `n`, Stirling series otherwise.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 64 {
        return (2..=n).map(|k| (k as f64).ln()).sum();
    }
    let x = n as f64 + 1.0;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
}

/// Limit of a sequence as determined by its descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Limit {
    Finite(f64),
    PosInf,
    NegInf,
    Unknown,
}

impl Limit {
    pub fn is_zero(&self) -> bool {
        matches!(self, Limit::Finite(v) if *v == 0.0)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Limit::PosInf | Limit::NegInf)
    }
}

/// Asymptotic descriptor: `Σ terms + O(rem)` for all large `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Asym {
    /// Exact terms, combined and sorted by decreasing growth.
    pub terms: Vec<Term>,
    /// Scale of the remainder (its coefficient is a magnitude only).
    pub rem: Option<Term>,
}

impl Asym {
    pub fn zero() -> Self {
        Asym { terms: vec![], rem: None }
    }

    pub fn exact(t: Term) -> Self {
        Asym::from_parts(vec![t], None)
    }

    pub fn constant(c: f64) -> Self {
        Asym::exact(Term::constant(c))
    }

    pub fn from_parts(terms: Vec<Term>, rem: Option<Term>) -> Self {
        let mut a = Asym { terms, rem: rem.map(|r| Term { coef: r.coef.abs(), ..r }) };
        a.normalize();
        a
    }

    /// Combine like terms, drop cancelled ones, absorb terms into the remainder.
    fn normalize(&mut self) {
        let mut out: Vec<(Term, f64)> = Vec::new();
        for t in self.terms.drain(..) {
            if t.coef == 0.0 {
                continue;
            }
            if let Some((acc, mag)) = out.iter_mut().find(|(acc, _)| acc.same_class(&t)) {
                acc.coef += t.coef;
                *mag += t.coef.abs();
            } else {
                out.push((t, t.coef.abs()));
            }
        }
        let mut terms: Vec<Term> = out
            .into_iter()
            .filter(|(t, mag)| t.coef.abs() > CANCEL_TOL * mag)
            .map(|(t, _)| t)
            .collect();
        if let Some(r) = self.rem {
            terms.retain(|t| t.growth_cmp(&r) == Ordering::Greater);
        }
        terms.sort_by(|a, b| b.growth_cmp(a));
        self.terms = terms;
    }

    /// Dominant element: the leading exact term, or the remainder scale.
    pub fn leading(&self) -> Option<(Term, bool)> {
        match (self.terms.first(), self.rem) {
            (Some(t), _) => Some((*t, true)),
            (None, Some(r)) => Some((r, false)),
            (None, None) => None,
        }
    }

    /// Second element in growth order: next exact term or the remainder.
    fn second(&self) -> Option<Term> {
        self.terms.get(1).copied().or(if self.terms.is_empty() { None } else { self.rem })
    }

    fn max_rem(a: Option<Term>, b: Option<Term>) -> Option<Term> {
        match (a, b) {
            (Some(x), Some(y)) => Some(if x.growth_cmp(&y) == Ordering::Less { y } else { x }),
            (x, None) => x,
            (None, y) => y,
        }
    }

    fn mag(t: Term) -> Term {
        Term { coef: t.coef.abs().max(f64::MIN_POSITIVE), ..t }
    }

    pub fn add(&self, o: &Asym) -> Asym {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&o.terms);
        Asym::from_parts(terms, Asym::max_rem(self.rem, o.rem))
    }

    pub fn neg(&self) -> Asym {
        self.scale(-1.0)
    }

    pub fn sub(&self, o: &Asym) -> Asym {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: f64) -> Asym {
        if s == 0.0 {
            return Asym::zero();
        }
        Asym::from_parts(
            self.terms.iter().map(|t| t.scale(s)).collect(),
            self.rem.map(|r| r.scale(s.abs())),
        )
    }

    pub fn add_const(&self, c: f64) -> Asym {
        self.add(&Asym::constant(c))
    }

    pub fn mul(&self, o: &Asym) -> Asym {
        let mut terms = Vec::with_capacity(self.terms.len() * o.terms.len());
        for a in &self.terms {
            for b in &o.terms {
                terms.push(a.mul(b));
            }
        }
        let mut rem = None;
        if let Some(rb) = o.rem {
            if let Some((la, _)) = self.leading() {
                rem = Asym::max_rem(rem, Some(Asym::mag(la).mul(&rb)));
            }
        }
        if let Some(ra) = self.rem {
            if let Some((lb, _)) = o.leading() {
                rem = Asym::max_rem(rem, Some(Asym::mag(lb).mul(&ra)));
            }
        }
        Asym::from_parts(terms, rem)
    }

    /// Reciprocal; requires an exact leading term.
    pub fn recip(&self) -> Option<Asym> {
        let l = *self.terms.first()?;
        let inv = l.recip();
        if self.terms.len() == 1 && self.rem.is_none() {
            return Some(Asym::exact(inv));
        }
        // 1/s = 1/L − (s − L)/L² + O(((s − L)/L)² / L)
        let inv2 = inv.mul(&inv);
        let terms: Vec<Term> = std::iter::once(inv)
            .chain(self.terms[1..].iter().map(|t| t.mul(&inv2).scale(-1.0)))
            .collect();
        let second = Asym::mag(self.second()?);
        let rel = second.mul(&Asym::mag(inv));
        let mut rem = Some(rel.mul(&rel).mul(&Asym::mag(inv)));
        if let Some(r) = self.rem {
            rem = Asym::max_rem(rem, Some(r.mul(&Asym::mag(inv2))));
        }
        Some(Asym::from_parts(terms, rem))
    }

    /// `s^e`; requires an exact positive leading term unless only a bound is known.
    pub fn powf(&self, e: f64) -> Option<Asym> {
        let Some(&l) = self.terms.first() else {
            return if e > 0.0 {
                Some(Asym { terms: vec![], rem: self.rem.map(|r| r.powf(e)) })
            } else {
                None
            };
        };
        let is_int = e.fract() == 0.0;
        if l.coef < 0.0 && !is_int {
            return None;
        }
        let le = Term::new(l.coef.powf(e), l.ratio.powf(e), l.power * e, l.fact * e);
        if self.terms.len() == 1 && self.rem.is_none() {
            return Some(Asym::exact(le));
        }
        let lem1 = le.mul(&l.recip());
        let terms: Vec<Term> = std::iter::once(le)
            .chain(self.terms[1..].iter().map(|t| t.mul(&lem1).scale(e)))
            .collect();
        let second = Asym::mag(self.second()?);
        let rel = second.mul(&Asym::mag(l.recip()));
        let mut rem = Some(rel.mul(&rel).mul(&Asym::mag(le)));
        if let Some(r) = self.rem {
            rem = Asym::max_rem(rem, Some(r.mul(&Asym::mag(lem1))));
        }
        Some(Asym::from_parts(terms, rem))
    }

    /// Eventual sign, when the leading term is exact.
    pub fn eventual_sign(&self) -> Option<f64> {
        match self.leading() {
            Some((t, true)) => Some(t.coef.signum()),
            Some((_, false)) => None,
            None => Some(0.0),
        }
    }

    /// `|s_n|`.
    pub fn abs(&self) -> Asym {
        match self.eventual_sign() {
            Some(s) if s < 0.0 => self.neg(),
            Some(_) => self.clone(),
            None => Asym { terms: vec![], rem: self.rem },
        }
    }

    /// Descriptor of the shifted sequence `s_{n+1}`.
    pub fn shift(&self) -> Asym {
        let mut terms = Vec::new();
        let mut rem = self.rem.map(|r| shift_leading(&r));
        for t in &self.terms {
            let (ts, r) = shift_term(t);
            terms.extend(ts);
            rem = Asym::max_rem(rem, r);
        }
        Asym::from_parts(terms, rem)
    }

    pub fn limit(&self) -> Limit {
        match self.leading() {
            None => Limit::Finite(0.0),
            Some((t, exact)) => match (t.growth(), exact) {
                (Growth::ToZero, _) => Limit::Finite(0.0),
                (Growth::Bounded, true) => Limit::Finite(t.coef),
                (Growth::Unbounded, true) => {
                    if t.coef > 0.0 {
                        Limit::PosInf
                    } else {
                        Limit::NegInf
                    }
                }
                (_, false) => Limit::Unknown,
            },
        }
    }

    /// Is `Σ |s_n|` finite? `None` when the descriptor cannot tell.
    pub fn summable_abs(&self) -> Option<bool> {
        match self.leading() {
            None => Some(true),
            Some((t, exact)) => {
                if t.summable() {
                    Some(true)
                } else if exact {
                    Some(false)
                } else {
                    None
                }
            }
        }
    }

    /// Is `{s_n} ∈ ℓ^p` (`p = ∞` means `c₀`)?
    pub fn in_lp(&self, p: f64) -> Option<bool> {
        if p.is_infinite() {
            return match self.limit() {
                Limit::Finite(v) => Some(v == 0.0),
                Limit::PosInf | Limit::NegInf => Some(false),
                Limit::Unknown => None,
            };
        }
        self.abs().powf(p)?.summable_abs()
    }

    /// Expansion `1 + a/n + O(n^{-1-δ})`: returns `a` when the descriptor
    /// has exactly this shape.
    pub fn unit_expansion(&self) -> Option<f64> {
        let one = Term::constant(1.0);
        let inv_n = Term::power_law(1.0, -1.0);
        let mut a = 0.0;
        let mut has_one = false;
        for t in &self.terms {
            if t.same_class(&one) {
                if !feq(t.coef, 1.0) {
                    return None;
                }
                has_one = true;
            } else if t.same_class(&inv_n) {
                a = t.coef;
            } else if t.growth_cmp(&inv_n) != Ordering::Less {
                return None;
            }
        }
        if let Some(r) = self.rem {
            if r.growth_cmp(&inv_n) != Ordering::Less {
                return None;
            }
        }
        has_one.then_some(a)
    }
}

/// Leading-order shift of a remainder scale.
fn shift_leading(t: &Term) -> Term {
    Term::new(t.coef * t.ratio, t.ratio, t.power + t.fact, t.fact)
}

/// `t_{n+1}` as exact terms plus an optional remainder.
fn shift_term(t: &Term) -> (Vec<Term>, Option<Term>) {
    // t_{n+1} = coef·r · rⁿ (n!)^f · n^q (1 + 1/n)^q,  q = p + f.
    let q = t.power + t.fact;
    let base = Term::new(t.coef * t.ratio, t.ratio, q, t.fact);
    let qi = q.round();
    if feq(q, qi) && qi >= 0.0 && qi <= 64.0 {
        let m = qi as i32;
        let mut out = Vec::new();
        let mut binom = 1.0;
        for j in 0..=m {
            out.push(Term::new(base.coef * binom, base.ratio, q - j as f64, base.fact));
            binom = binom * (m - j) as f64 / (j + 1) as f64;
        }
        return (out, None);
    }
    let out = vec![
        base,
        Term::new(base.coef * q, base.ratio, q - 1.0, base.fact),
        Term::new(base.coef * q * (q - 1.0) / 2.0, base.ratio, q - 2.0, base.fact),
    ];
    let rem = Term::new(base.coef.abs().max(f64::MIN_POSITIVE), base.ratio, q - 3.0, base.fact);
    (out, Some(rem))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_to_constant() {
        // −3·2ⁿ + 1 + 2ⁿ + 2ⁿ⁺¹ = 1
        let alpha = Asym::from_parts(vec![Term::new(-3.0, 2.0, 0.0, 0.0), Term::constant(1.0)], None);
        let inv_d = Asym::exact(Term::new(1.0, 2.0, 0.0, 0.0));
        let s = alpha.add(&inv_d).add(&inv_d.shift());
        assert_eq!(s.limit(), Limit::Finite(1.0));
        assert_eq!(s.terms.len(), 1);
    }

    #[test]
    fn shift_of_power_law() {
        let a = Asym::exact(Term::power_law(1.0, -1.0)).shift();
        // 1/(n+1) = 1/n − 1/n² + …
        assert!(feq(a.terms[0].coef, 1.0));
        assert!(feq(a.terms[1].coef, -1.0));
        assert!(a.rem.is_some());
        let ratio = a.mul(&Asym::exact(Term::power_law(1.0, 1.0)));
        assert!(feq(ratio.unit_expansion().unwrap(), -1.0));
    }

    #[test]
    fn summability_classes() {
        assert_eq!(Asym::exact(Term::power_law(1.0, -2.0)).summable_abs(), Some(true));
        assert_eq!(Asym::exact(Term::power_law(1.0, -1.0)).summable_abs(), Some(false));
        assert_eq!(Asym::exact(Term::new(1.0, 0.5, 3.0, 0.0)).summable_abs(), Some(true));
        assert_eq!(Asym::exact(Term::new(1.0, 10.0, 0.0, -1.0)).summable_abs(), Some(true));
        let bound_only = Asym::from_parts(vec![], Some(Term::power_law(1.0, -0.5)));
        assert_eq!(bound_only.summable_abs(), None);
        assert_eq!(bound_only.limit(), Limit::Finite(0.0));
    }

    #[test]
    fn recip_and_pow() {
        let d = Asym::from_parts(
            vec![Term::power_law(1.0, -1.0), Term::power_law(-0.5, -2.0)],
            Some(Term::power_law(1.0, -3.0)),
        );
        let inv = d.recip().unwrap();
        assert!(feq(inv.terms[0].power, 1.0));
        assert!(feq(inv.terms[1].coef, 0.5));
        let sq = d.powf(0.5).unwrap();
        assert!(feq(sq.terms[0].power, -0.5));
        assert_eq!(Asym::exact(Term::constant(-1.0)).powf(0.5), None);
    }

    #[test]
    fn eval_with_factorial() {
        let t = Term::new(1.0, 0.5, 0.0, 1.0);
        assert!((t.eval(5) - 120.0 / 32.0).abs() < 1e-12);
        assert!((ln_factorial(100) - 363.739_375_555_563_5).abs() < 1e-9);
    }

    #[test]
    fn lp_membership() {
        let s = Asym::exact(Term::power_law(1.0, -0.75));
        assert_eq!(s.in_lp(1.0), Some(false));
        assert_eq!(s.in_lp(2.0), Some(true));
        assert_eq!(s.in_lp(f64::INFINITY), Some(true));
        assert_eq!(Asym::constant(2.0).in_lp(f64::INFINITY), Some(false));
    }
}
