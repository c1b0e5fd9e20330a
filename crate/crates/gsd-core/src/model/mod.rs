//! Configuration types: constants, interval, lattice and strength sequences.
//!
//! Sequences are indexed from `n = 1`. Every rule can evaluate its terms and
//! partial sums. Rules that describe an infinite tail also expose an [`Asym`]
//! descriptor; classifiers take limits and test summability on it.

pub mod asym;

pub use asym::{Asym, Limit, Term};

use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

/// Serde helpers: reals that may be `+∞`, encoded as the string `"inf"`.
pub mod ext_real {
    use serde::de::{self, Deserializer, Visitor};
    use serde::{Deserialize, Serializer};
    use std::fmt;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*v)
        }
    }

    struct RealVisitor;

    impl<'de> Visitor<'de> for RealVisitor {
        type Value = f64;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a number or the string \"inf\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            match v {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(E::custom(format!("expected a number or \"inf\", found \"{other}\""))),
            }
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(RealVisitor)
    }

    /// Newtype used for lists of extended reals.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct Real(pub f64);

    impl serde::Serialize for Real {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            serialize(&self.0, s)
        }
    }

    impl<'de> Deserialize<'de> for Real {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            deserialize(d).map(Real)
        }
    }

    pub mod vec {
        use super::Real;
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            v.iter().map(|x| Real(*x)).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Ok(Vec::<Real>::deserialize(d)?.into_iter().map(|r| r.0).collect())
        }
    }
}

/// Kind of point interaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionKind {
    Delta,
    DeltaPrime,
}

/// `𝓘 = (left, right)`; `right` may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub left: f64,
    #[serde(with = "ext_real")]
    pub right: f64,
}

impl Interval {
    pub fn is_half_line(&self) -> bool {
        self.right.is_infinite()
    }

    pub fn length(&self) -> f64 {
        self.right - self.left
    }
}

/// Physical constants and geometry shared by every operation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub c: f64,
    pub interval: Interval,
    pub kind: InteractionKind,
}

impl ModelConfig {
    pub fn new(c: f64, interval: Interval, kind: InteractionKind) -> Result<Self> {
        let m = ModelConfig { c, interval, kind };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return invalid(format!("c must be a positive real, got {}", self.c));
        }
        if !self.interval.left.is_finite() {
            return invalid("left endpoint must be finite");
        }
        if !(self.interval.right > self.interval.left) || self.interval.right == f64::NEG_INFINITY {
            return invalid("right endpoint must exceed the left endpoint");
        }
        Ok(())
    }
}

/// Analytic generator of a real sequence `s_n`, `n ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SequenceRule {
    /// Finite list `s_1, …, s_N`; entries may be `"inf"` for strengths.
    Explicit {
        #[serde(with = "ext_real::vec")]
        values: Vec<f64>,
    },
    /// `s_n = value` (may be `"inf"`).
    Constant {
        #[serde(with = "ext_real")]
        value: f64,
    },
    /// `s_n = scale · ratio^{n−1}`.
    Geometric { scale: f64, ratio: f64 },
    /// `s_n = scale · n^{−exponent}`.
    Power { scale: f64, exponent: f64 },
    /// `s_n = coef · ratioⁿ · n^power · (n!)^factorial`.
    Term {
        coef: f64,
        #[serde(default = "one")]
        ratio: f64,
        #[serde(default)]
        power: f64,
        #[serde(default)]
        factorial: f64,
    },
    /// `s_n = scale · ln(1 + 1/n)`; the gaps of `x_n = x_0 + scale·ln(n+1)`.
    LogGap { scale: f64 },
    /// Termwise sum of sub-rules.
    Sum { parts: Vec<SequenceRule> },
    /// `prefix` for `n ≤ prefix.len()`, then `tail` evaluated at the absolute index.
    CustomTail {
        #[serde(with = "ext_real::vec")]
        prefix: Vec<f64>,
        tail: Box<SequenceRule>,
    },
}

fn one() -> f64 {
    1.0
}

/// Value of `Σ s_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum SeriesValue {
    Finite(f64),
    Divergent,
    Unknown,
}

impl SequenceRule {
    pub fn constant(v: f64) -> Self {
        SequenceRule::Constant { value: v }
    }

    pub fn explicit(values: Vec<f64>) -> Self {
        SequenceRule::Explicit { values }
    }

    pub fn geometric(scale: f64, ratio: f64) -> Self {
        SequenceRule::Geometric { scale, ratio }
    }

    pub fn power(scale: f64, exponent: f64) -> Self {
        SequenceRule::Power { scale, exponent }
    }

    pub fn general(coef: f64, ratio: f64, power: f64, factorial: f64) -> Self {
        SequenceRule::Term { coef, ratio, power, factorial }
    }

    pub fn sum(parts: Vec<SequenceRule>) -> Self {
        SequenceRule::Sum { parts }
    }

    pub fn with_prefix(prefix: Vec<f64>, tail: SequenceRule) -> Self {
        SequenceRule::CustomTail { prefix, tail: Box::new(tail) }
    }

    /// Check the variant invariants.
    pub fn validate(&self) -> Result<()> {
        match self {
            SequenceRule::Explicit { values } => {
                if values.is_empty() {
                    return invalid("explicit list must be nonempty");
                }
                if values.iter().any(|v| v.is_nan()) {
                    return invalid("explicit list contains NaN");
                }
            }
            SequenceRule::Constant { value } => {
                if value.is_nan() {
                    return invalid("constant is NaN");
                }
            }
            SequenceRule::Geometric { scale, ratio } => {
                if !(*ratio > 0.0) || !ratio.is_finite() || !scale.is_finite() {
                    return invalid("geometric rule requires finite scale and ratio > 0");
                }
            }
            SequenceRule::Power { scale, exponent } => {
                if !scale.is_finite() || !exponent.is_finite() {
                    return invalid("power rule requires finite scale and exponent");
                }
            }
            SequenceRule::Term { coef, ratio, power, factorial } => {
                if !(*ratio > 0.0) || ![*coef, *ratio, *power, *factorial].iter().all(|v| v.is_finite()) {
                    return invalid("term rule requires finite parameters and ratio > 0");
                }
            }
            SequenceRule::LogGap { scale } => {
                if !scale.is_finite() {
                    return invalid("log-gap scale must be finite");
                }
            }
            SequenceRule::Sum { parts } => {
                if parts.is_empty() {
                    return invalid("sum rule needs at least one part");
                }
                for p in parts {
                    p.validate()?;
                }
            }
            SequenceRule::CustomTail { prefix, tail } => {
                if prefix.iter().any(|v| v.is_nan()) {
                    return invalid("prefix contains NaN");
                }
                if matches!(**tail, SequenceRule::Explicit { .. }) {
                    return invalid("custom tail must be an analytic rule");
                }
                tail.validate()?;
            }
        }
        Ok(())
    }

    /// Number of available terms (`None` = infinitely many).
    pub fn len(&self) -> Option<usize> {
        match self {
            SequenceRule::Explicit { values } => Some(values.len()),
            SequenceRule::Sum { parts } => parts.iter().filter_map(|p| p.len()).min(),
            _ => None,
        }
    }

    /// `s_n` for `n ≥ 1`; `None` past the end of a finite list.
    pub fn term_at(&self, n: usize) -> Option<f64> {
        assert!(n >= 1, "sequences are indexed from 1");
        let nf = n as f64;
        Some(match self {
            SequenceRule::Explicit { values } => *values.get(n - 1)?,
            SequenceRule::Constant { value } => *value,
            SequenceRule::Geometric { scale, ratio } => scale * ratio.powi((n - 1) as i32),
            SequenceRule::Power { scale, exponent } => scale * nf.powf(-exponent),
            SequenceRule::Term { coef, ratio, power, factorial } => {
                Term::new(*coef, *ratio, *power, *factorial).eval(n)
            }
            SequenceRule::LogGap { scale } => scale * (1.0 / nf).ln_1p(),
            SequenceRule::Sum { parts } => {
                let mut acc = 0.0;
                for p in parts {
                    acc += p.term_at(n)?;
                }
                acc
            }
            SequenceRule::CustomTail { prefix, tail } => {
                if n <= prefix.len() {
                    prefix[n - 1]
                } else {
                    tail.term_at(n)?
                }
            }
        })
    }

    /// `s_n`; panics past the end of a finite list.
    pub fn term(&self, n: usize) -> f64 {
        self.term_at(n).unwrap_or_else(|| panic!("index {n} beyond the end of a finite list"))
    }

    /// First `n` terms.
    pub fn terms(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|k| self.term(k)).collect()
    }

    /// Compensated partial sum `Σ_{k ≤ n} s_k`.
    pub fn partial_sum(&self, n: usize) -> f64 {
        neumaier((1..=n).map(|k| self.term(k)))
    }

    /// Tail descriptor; `None` for finite lists.
    pub fn asym(&self) -> Option<Asym> {
        match self {
            SequenceRule::Explicit { .. } => None,
            SequenceRule::Constant { value } => {
                if value.is_finite() {
                    Some(Asym::constant(*value))
                } else {
                    None
                }
            }
            SequenceRule::Geometric { scale, ratio } => {
                Some(Asym::exact(Term::new(scale / ratio, *ratio, 0.0, 0.0)))
            }
            SequenceRule::Power { scale, exponent } => Some(Asym::exact(Term::power_law(*scale, -exponent))),
            SequenceRule::Term { coef, ratio, power, factorial } => {
                Some(Asym::exact(Term::new(*coef, *ratio, *power, *factorial)))
            }
            SequenceRule::LogGap { scale } => Some(Asym::from_parts(
                vec![
                    Term::power_law(*scale, -1.0),
                    Term::power_law(-scale / 2.0, -2.0),
                    Term::power_law(scale / 3.0, -3.0),
                ],
                Some(Term::power_law(scale.abs() / 4.0, -4.0)),
            )),
            SequenceRule::Sum { parts } => {
                let mut acc = Asym::zero();
                for p in parts {
                    acc = acc.add(&p.asym()?);
                }
                Some(acc)
            }
            SequenceRule::CustomTail { tail, .. } => tail.asym(),
        }
    }

    /// Is the tail identically `+∞` (e.g. `constant("inf")`)?
    pub fn tail_is_infinite(&self) -> bool {
        match self {
            SequenceRule::Constant { value } => value.is_infinite() && *value > 0.0,
            SequenceRule::CustomTail { tail, .. } => tail.tail_is_infinite(),
            SequenceRule::Sum { parts } => parts.iter().any(|p| p.tail_is_infinite()),
            _ => false,
        }
    }

    /// Termwise scaling `s_n ↦ f·s_n` (`+∞` stays `+∞` for `f > 0`).
    pub fn scaled(&self, f: f64) -> SequenceRule {
        let s = |v: &f64| v * f;
        match self {
            SequenceRule::Explicit { values } => SequenceRule::Explicit { values: values.iter().map(s).collect() },
            SequenceRule::Constant { value } => SequenceRule::Constant { value: value * f },
            SequenceRule::Geometric { scale, ratio } => SequenceRule::Geometric { scale: scale * f, ratio: *ratio },
            SequenceRule::Power { scale, exponent } => SequenceRule::Power { scale: scale * f, exponent: *exponent },
            SequenceRule::Term { coef, ratio, power, factorial } => SequenceRule::Term {
                coef: coef * f,
                ratio: *ratio,
                power: *power,
                factorial: *factorial,
            },
            SequenceRule::LogGap { scale } => SequenceRule::LogGap { scale: scale * f },
            SequenceRule::Sum { parts } => SequenceRule::Sum { parts: parts.iter().map(|p| p.scaled(f)).collect() },
            SequenceRule::CustomTail { prefix, tail } => SequenceRule::CustomTail {
                prefix: prefix.iter().map(s).collect(),
                tail: Box::new(tail.scaled(f)),
            },
        }
    }

    /// `Σ_{n ≥ 1} s_n`, analytic where the rule allows it.
    pub fn total(&self) -> SeriesValue {
        match self {
            SequenceRule::Explicit { values } => SeriesValue::Finite(neumaier(values.iter().copied())),
            SequenceRule::Constant { value } => {
                if *value == 0.0 {
                    SeriesValue::Finite(0.0)
                } else {
                    SeriesValue::Divergent
                }
            }
            SequenceRule::Geometric { scale, ratio } => {
                if *scale == 0.0 {
                    SeriesValue::Finite(0.0)
                } else if *ratio < 1.0 {
                    SeriesValue::Finite(scale / (1.0 - ratio))
                } else {
                    SeriesValue::Divergent
                }
            }
            SequenceRule::Power { scale, exponent } => {
                if *scale == 0.0 {
                    SeriesValue::Finite(0.0)
                } else if *exponent > 1.0 {
                    SeriesValue::Finite(scale * zeta(*exponent))
                } else {
                    SeriesValue::Divergent
                }
            }
            SequenceRule::Term { coef, ratio, power, factorial } => {
                let t = Term::new(*coef, *ratio, *power, *factorial);
                if *coef == 0.0 {
                    SeriesValue::Finite(0.0)
                } else if !t.summable() {
                    SeriesValue::Divergent
                } else if *factorial == 0.0 && (*ratio - 1.0).abs() <= 1e-15 {
                    SeriesValue::Finite(coef * zeta(-power))
                } else {
                    SeriesValue::Finite(sum_fast_decay(|n| t.eval(n)))
                }
            }
            SequenceRule::LogGap { scale } => {
                if *scale == 0.0 {
                    SeriesValue::Finite(0.0)
                } else {
                    SeriesValue::Divergent
                }
            }
            SequenceRule::Sum { parts } => {
                let mut acc = 0.0;
                let mut unknown = false;
                for p in parts {
                    match p.total() {
                        SeriesValue::Finite(v) => acc += v,
                        SeriesValue::Divergent => return SeriesValue::Divergent,
                        SeriesValue::Unknown => unknown = true,
                    }
                }
                if unknown {
                    SeriesValue::Unknown
                } else {
                    SeriesValue::Finite(acc)
                }
            }
            SequenceRule::CustomTail { prefix, tail } => match tail.total() {
                SeriesValue::Finite(t) => {
                    let head_tail = tail.partial_sum(prefix.len());
                    SeriesValue::Finite(neumaier(prefix.iter().copied()) + t - head_tail)
                }
                other => other,
            },
        }
    }
}

/// Neumaier-compensated summation.
pub fn neumaier(it: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in it {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn sum_fast_decay(f: impl Fn(usize) -> f64) -> f64 {
    let mut terms = Vec::new();
    let mut n = 1;
    loop {
        let v = f(n);
        terms.push(v);
        if n > 8 && v.abs() <= 1e-18 * terms.iter().map(|t| t.abs()).fold(0.0, f64::max) {
            break;
        }
        if n > 100_000 {
            break;
        }
        n += 1;
    }
    neumaier(terms)
}

/// Riemann zeta for `s > 1` by Euler–Maclaurin summation.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta requires s > 1");
    const N: usize = 16;
    // B_{2j}/(2j)! for j = 1..7
    const B: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1_209_600.0,
        1.0 / 47_900_160.0,
        -691.0 / 1_307_674_368_000.0,
        1.0 / 74_724_249_600.0,
    ];
    let nf = N as f64;
    let mut sum = neumaier((1..N).map(|k| (k as f64).powf(-s)));
    sum += nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    // Rising factorial s(s+1)…(s+2j−2) times N^{−s−2j+1}.
    let mut rising = s;
    let mut npow = nf.powf(-s - 1.0);
    for (j, b) in B.iter().enumerate() {
        sum += b * rising * npow;
        let m = 2.0 * j as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        npow /= nf * nf;
    }
    sum
}

/// Count of lattice points: finite or infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Count {
    Finite(usize),
    Infinite,
}

impl Serialize for Count {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Count::Finite(n) => s.serialize_u64(*n as u64),
            Count::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Count {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = ext_real::deserialize(d)?;
        if v.is_infinite() && v > 0.0 {
            Ok(Count::Infinite)
        } else if v >= 1.0 && v.fract() == 0.0 {
            Ok(Count::Finite(v as usize))
        } else {
            Err(serde::de::Error::custom("count must be a positive integer or \"inf\""))
        }
    }
}

/// Interaction points `x_0 = a < x_1 < …` with gaps `d_n = x_n − x_{n−1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lattice {
    pub a: f64,
    pub rule: SequenceRule,
    pub count: Count,
}

const SCAN: usize = 10_000;

/// Build and validate a lattice.
pub fn build_lattice(a: f64, rule: SequenceRule, count: Count) -> Result<Lattice> {
    if !a.is_finite() {
        return invalid("lattice origin must be finite");
    }
    rule.validate()?;
    let checked = match (count, rule.len()) {
        (Count::Finite(0), _) => return invalid("lattice count must be positive"),
        (Count::Finite(n), Some(len)) if n > len => {
            return invalid(format!("count {n} exceeds the {len} listed gaps"))
        }
        (Count::Infinite, Some(_)) => return invalid("an explicit gap list cannot generate an infinite lattice"),
        (Count::Finite(n), _) => n,
        (Count::Infinite, None) => SCAN,
    };
    let analytic_positive =
        count == Count::Infinite && rule.asym().and_then(|a| a.eventual_sign()).is_some_and(|s| s > 0.0);
    for n in 1..=checked {
        let d = rule.term(n);
        // Tails that decay below the smallest subnormal are positive analytically.
        if d == 0.0 && analytic_positive && n > 1 && rule.term(n - 1) < 1e-300 {
            break;
        }
        if !(d > 0.0) || !d.is_finite() {
            return invalid(format!("gap d_{n} = {d} is not a positive real"));
        }
    }
    if count == Count::Infinite {
        let asym = rule.asym().expect("analytic rule");
        if asym.eventual_sign().is_some_and(|s| s <= 0.0) {
            return invalid("gap rule is eventually nonpositive");
        }
    }
    Ok(Lattice { a, rule, count })
}

impl Lattice {
    pub fn is_infinite(&self) -> bool {
        self.count == Count::Infinite
    }

    /// Number of gaps (`None` if infinite).
    pub fn len(&self) -> Option<usize> {
        match self.count {
            Count::Finite(n) => Some(n),
            Count::Infinite => None,
        }
    }

    pub fn d(&self, n: usize) -> f64 {
        if let Count::Finite(m) = self.count {
            assert!(n <= m, "gap index {n} beyond lattice count {m}");
        }
        self.rule.term(n)
    }

    pub fn gaps(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|k| self.d(k)).collect()
    }

    /// `x_n = a + Σ_{k ≤ n} d_k`.
    pub fn x(&self, n: usize) -> f64 {
        self.a + self.rule.partial_sum(n)
    }

    /// `x_0, …, x_n`, with compensated running sums.
    pub fn points(&self, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        out.push(self.a);
        for k in 1..=n {
            let x = self.d(k);
            let t = sum + x;
            if sum.abs() >= x.abs() {
                comp += (sum - t) + x;
            } else {
                comp += (x - t) + sum;
            }
            sum = t;
            out.push(self.a + sum + comp);
        }
        out
    }

    /// `Σ d_n = |𝓘|`.
    pub fn total_length(&self) -> SeriesValue {
        match self.count {
            Count::Finite(n) => SeriesValue::Finite(self.rule.partial_sum(n)),
            Count::Infinite => self.rule.total(),
        }
    }

    /// Right end `x_∞ = a + Σ d_n` (`+∞` for divergent sums).
    pub fn right_end(&self) -> Option<f64> {
        match self.total_length() {
            SeriesValue::Finite(v) => Some(self.a + v),
            SeriesValue::Divergent => Some(f64::INFINITY),
            SeriesValue::Unknown => None,
        }
    }

    /// Check `Σ d_n = b − a` within `1e−12` relative.
    pub fn check_interval(&self, interval: &Interval) -> Result<()> {
        if (interval.left - self.a).abs() > 1e-12 * (1.0 + self.a.abs()) {
            return invalid("lattice origin differs from the interval's left endpoint");
        }
        match (self.total_length(), interval.is_half_line()) {
            (SeriesValue::Finite(s), false) => {
                let len = interval.length();
                if (s - len).abs() > 1e-12 * len {
                    return invalid(format!("gaps sum to {s}, interval length is {len}"));
                }
            }
            (SeriesValue::Divergent, true) => {}
            (SeriesValue::Finite(_), true) if !self.is_infinite() => {}
            (SeriesValue::Finite(s), true) => {
                return invalid(format!("gaps sum to {s} but the interval is a half-line"))
            }
            (SeriesValue::Divergent, false) => return invalid("gaps diverge but the interval is finite"),
            (SeriesValue::Unknown, _) => return invalid("total length of the lattice is not determinable"),
        }
        Ok(())
    }

    /// `d_*(X) = inf d_n`. Exact for the basic rules; otherwise scanned over
    /// the first 10⁴ gaps and combined with the tail limit.
    pub fn d_lower(&self) -> f64 {
        self.bound(true)
    }

    /// `d^*(X) = sup d_n` (same conventions as [`Lattice::d_lower`]).
    pub fn d_upper(&self) -> f64 {
        self.bound(false)
    }

    fn bound(&self, lower: bool) -> f64 {
        let pick = |a: f64, b: f64| if lower { a.min(b) } else { a.max(b) };
        if let Count::Finite(n) = self.count {
            return self.gaps(n).into_iter().fold(if lower { f64::INFINITY } else { 0.0 }, pick);
        }
        let scan = self.gaps(SCAN).into_iter().fold(if lower { f64::INFINITY } else { 0.0 }, pick);
        let lim = self.rule.asym().map(|a| a.limit()).unwrap_or(Limit::Unknown);
        let lim_val = match lim {
            Limit::Finite(v) => v,
            Limit::PosInf => f64::INFINITY,
            _ => return scan,
        };
        pick(scan, lim_val)
    }

    /// Tail descriptor of `d_n` (`None` for finite lattices).
    pub fn asym(&self) -> Option<Asym> {
        if self.is_infinite() {
            self.rule.asym()
        } else {
            None
        }
    }
}

/// Which strength family a sequence parametrises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrengthKind {
    Alpha,
    Beta,
}

/// Interaction strengths `α_n` or `β_n` in `ℝ ∪ {+∞}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrengthSeq {
    pub rule: SequenceRule,
    pub kind: StrengthKind,
}

impl StrengthSeq {
    pub fn new(rule: SequenceRule, kind: StrengthKind) -> Result<Self> {
        rule.validate()?;
        if let Some(n) = rule.len() {
            for k in 1..=n {
                if rule.term(k) == f64::NEG_INFINITY {
                    return invalid("strengths may be +inf but not -inf");
                }
            }
        }
        Ok(StrengthSeq { rule, kind })
    }

    pub fn alpha(rule: SequenceRule) -> Result<Self> {
        Self::new(rule, StrengthKind::Alpha)
    }

    pub fn beta(rule: SequenceRule) -> Result<Self> {
        Self::new(rule, StrengthKind::Beta)
    }

    pub fn term(&self, n: usize) -> f64 {
        self.rule.term(n)
    }
}

/// `α = c²β`, termwise; `+∞ ↦ +∞`.
pub fn beta_to_alpha(beta: &StrengthSeq, c: f64) -> Result<StrengthSeq> {
    if beta.kind != StrengthKind::Beta {
        return invalid("beta_to_alpha expects a beta-kind sequence");
    }
    if !(c > 0.0) {
        return invalid("c must be positive");
    }
    Ok(StrengthSeq { rule: beta.rule.scaled(c * c), kind: StrengthKind::Alpha })
}

/// Inverse of [`beta_to_alpha`]: `β = α/c²`.
pub fn alpha_to_beta(alpha: &StrengthSeq, c: f64) -> Result<StrengthSeq> {
    if alpha.kind != StrengthKind::Alpha {
        return invalid("alpha_to_beta expects an alpha-kind sequence");
    }
    if !(c > 0.0) {
        return invalid("c must be positive");
    }
    Ok(StrengthSeq { rule: alpha.rule.scaled(1.0 / (c * c)), kind: StrengthKind::Beta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_lattice() {
        let l = build_lattice(0.0, SequenceRule::geometric(0.5, 0.5), Count::Infinite).unwrap();
        for n in 1..=20 {
            assert!((l.x(n) - (1.0 - 0.5f64.powi(n as i32))).abs() < 1e-15);
            assert_eq!(l.d(n), 0.5f64.powi(n as i32));
        }
        assert_eq!(l.d_upper(), 0.5);
        assert_eq!(l.d_lower(), 0.0);
        assert_eq!(l.right_end(), Some(1.0));
        l.check_interval(&Interval { left: 0.0, right: 1.0 }).unwrap();
    }

    #[test]
    fn uniform_and_explicit() {
        let l = build_lattice(0.0, SequenceRule::constant(1.0), Count::Infinite).unwrap();
        assert_eq!(l.x(7), 7.0);
        assert_eq!((l.d_lower(), l.d_upper()), (1.0, 1.0));
        let e = build_lattice(0.0, SequenceRule::explicit(vec![0.3, 0.7]), Count::Finite(2)).unwrap();
        assert_eq!(e.x(1), 0.3);
        assert_eq!(e.x(2), 1.0);
        e.check_interval(&Interval { left: 0.0, right: 1.0 }).unwrap();
    }

    #[test]
    fn rejections() {
        assert!(build_lattice(0.0, SequenceRule::explicit(vec![0.3, -0.1]), Count::Finite(2)).is_err());
        assert!(build_lattice(0.0, SequenceRule::explicit(vec![f64::NAN]), Count::Finite(1)).is_err());
        assert!(build_lattice(0.0, SequenceRule::explicit(vec![]), Count::Finite(1)).is_err());
        assert!(build_lattice(0.0, SequenceRule::explicit(vec![1.0]), Count::Infinite).is_err());
        assert!(build_lattice(0.0, SequenceRule::geometric(1.0, -0.5), Count::Infinite).is_err());
        assert!(ModelConfig::new(0.0, Interval { left: 0.0, right: 1.0 }, InteractionKind::Delta).is_err());
        assert!(ModelConfig::new(1.0, Interval { left: 1.0, right: 1.0 }, InteractionKind::Delta).is_err());
    }

    #[test]
    fn beta_alpha_maps() {
        let b = StrengthSeq::beta(SequenceRule::constant(1.0)).unwrap();
        let a = beta_to_alpha(&b, 2.0).unwrap();
        assert_eq!(a.term(5), 4.0);
        let b = StrengthSeq::beta(SequenceRule::constant(f64::INFINITY)).unwrap();
        assert_eq!(beta_to_alpha(&b, 3.0).unwrap().term(1), f64::INFINITY);
        let b = StrengthSeq::beta(SequenceRule::power(1.0, 2.0)).unwrap();
        let a = beta_to_alpha(&b, 1.0).unwrap();
        assert_eq!(a.term(3), 1.0 / 9.0);
        let back = alpha_to_beta(&a, 1.0).unwrap();
        assert_eq!(back.term(3), b.term(3));
    }

    #[test]
    fn totals() {
        assert!((zeta(2.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
        assert!((zeta(4.0) - std::f64::consts::PI.powi(4) / 90.0).abs() < 1e-14);
        let r = SequenceRule::with_prefix(vec![0.25, 0.25], SequenceRule::geometric(0.5, 0.5));
        // 0.25 + 0.25 + Σ_{n≥3} 2^{-n} = 0.75
        assert_eq!(r.total(), SeriesValue::Finite(0.75));
        assert_eq!(SequenceRule::LogGap { scale: 1.0 }.total(), SeriesValue::Divergent);
    }

    #[test]
    fn log_gap_descriptor_matches_terms() {
        let r = SequenceRule::LogGap { scale: 1.0 };
        let a = r.asym().unwrap();
        for n in [100usize, 1000] {
            let approx: f64 = a.terms.iter().map(|t| t.eval(n)).sum();
            assert!((approx - r.term(n)).abs() < (n as f64).powi(-4));
        }
    }
}
