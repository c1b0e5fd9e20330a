//! Run configuration: one JSON document for every command.

use gsd_core::krein::{End, RealizationSpec};
use gsd_core::states::Model;
use gsd_core::{
    build_lattice, Count, InteractionKind, Interval, Lattice, ModelConfig, SequenceRule, StrengthKind, StrengthSeq,
};
use serde::Deserialize;
use std::fmt;
use std::path::Path;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub rule: SequenceRule,
    pub count: Count,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrengthSpec {
    pub rule: SequenceRule,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelChoice {
    #[default]
    Dirac,
    Schrodinger,
}

/// Command parameters; every field is optional and CLI flags take precedence.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandParams {
    #[serde(default)]
    pub model: ModelChoice,
    pub left: Option<End>,
    pub right: Option<End>,
    pub window: Option<(f64, f64)>,
    pub resolution: Option<f64>,
    pub truncation: Option<usize>,
    pub c_list: Option<Vec<f64>>,
    /// Sample points `[re, im]` (weyl) or the comparison point (limit, first entry).
    pub z: Option<Vec<(f64, f64)>>,
    /// Regularized interval blocks in `weyl`.
    #[serde(default)]
    pub regularized: bool,
    /// Number of leading interval blocks sampled by `weyl`.
    pub blocks: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub c: f64,
    pub interval: Interval,
    pub kind: InteractionKind,
    pub lattice: LatticeSpec,
    pub strengths: StrengthSpec,
    #[serde(default)]
    pub command: CommandParams,
}

/// Malformed or inconsistent configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Parse a configuration, reporting the offending field path and position.
pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        ConfigError(format!("field `{path}`: {inner}"))
    })?;
    cfg.model_config()?;
    cfg.build_lattice()?;
    cfg.strength_seq()?;
    Ok(cfg)
}

pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn model_config(&self) -> Result<ModelConfig, ConfigError> {
        ModelConfig::new(self.c, self.interval, self.kind).map_err(|e| ConfigError(format!("model: {e}")))
    }

    pub fn build_lattice(&self) -> Result<Lattice, ConfigError> {
        let l = build_lattice(self.interval.left, self.lattice.rule.clone(), self.lattice.count)
            .map_err(|e| ConfigError(format!("field `lattice`: {e}")))?;
        l.check_interval(&self.interval).map_err(|e| ConfigError(format!("field `lattice`: {e}")))?;
        Ok(l)
    }

    pub fn strength_kind(&self) -> StrengthKind {
        match self.kind {
            InteractionKind::Delta => StrengthKind::Alpha,
            InteractionKind::DeltaPrime => StrengthKind::Beta,
        }
    }

    pub fn strength_seq(&self) -> Result<StrengthSeq, ConfigError> {
        StrengthSeq::new(self.strengths.rule.clone(), self.strength_kind())
            .map_err(|e| ConfigError(format!("field `strengths.rule`: {e}")))
    }

    pub fn model(&self) -> Model {
        match self.command.model {
            ModelChoice::Dirac => Model::Dirac { c: self.c },
            ModelChoice::Schrodinger => Model::Schrodinger,
        }
    }

    /// Finite configuration for the eigenvalue solvers. A half-line interval
    /// continues past the last lattice point; a finite one defaults to
    /// `f₂(a) = 0`, `f₁(b) = 0`.
    pub fn realization(&self) -> Result<RealizationSpec, ConfigError> {
        let lattice = self.build_lattice()?;
        if lattice.is_infinite() {
            return Err(ConfigError("field `lattice.count`: eigenvalue solvers need a finite lattice".into()));
        }
        let left = self.command.left.unwrap_or(End::F2Zero);
        let right = self.command.right.unwrap_or(if self.interval.is_half_line() { End::HalfLine } else { End::F1Zero });
        if self.interval.is_half_line() != (right == End::HalfLine) {
            return Err(ConfigError("field `command.right`: half_line iff the interval is a half-line".into()));
        }
        if left == End::HalfLine {
            return Err(ConfigError("field `command.left`: the interval starts at a finite point".into()));
        }
        RealizationSpec::new(self.model(), lattice, self.strength_seq()?, left, right)
            .map_err(|e| ConfigError(format!("configuration: {e}")))
    }
}

/// `a,b` → `(a, b)`.
pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let v = parse_list(s)?;
    match v[..] {
        [a, b] if a < b => Ok((a, b)),
        [_, _] => Err("window must satisfy a < b".into()),
        _ => Err("expected two comma-separated numbers".into()),
    }
}

/// `x1,x2,...` → numbers.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "c": 1.0,
        "interval": {"left": 0.0, "right": 2.0},
        "kind": "delta",
        "lattice": {"rule": {"type": "explicit", "values": [1.0, 1.0]}, "count": 2},
        "strengths": {"rule": {"type": "explicit", "values": [0.5]}}
    }"#;

    #[test]
    fn parses_and_builds() {
        let cfg = parse(BASE).unwrap();
        let spec = cfg.realization().unwrap();
        assert_eq!((spec.left, spec.right), (End::F2Zero, End::F1Zero));
    }

    #[test]
    fn reports_field_path() {
        let bad = BASE.replace("\"delta\"", "\"delta_double_prime\"");
        let e = parse(&bad).unwrap_err();
        assert!(e.0.contains("kind"), "{e}");
        let bad = BASE.replace("\"count\": 2", "\"count\": -2");
        assert!(parse(&bad).unwrap_err().0.contains("lattice.count"));
    }

    #[test]
    fn inconsistent_length_rejected() {
        let bad = BASE.replace("\"right\": 2.0", "\"right\": 3.0");
        assert!(parse(&bad).unwrap_err().0.contains("lattice"));
    }

    #[test]
    fn pairs() {
        assert_eq!(parse_pair("-1, 2.5").unwrap(), (-1.0, 2.5));
        assert!(parse_pair("2,1").is_err());
        assert!(parse_pair("1").is_err());
    }
}
