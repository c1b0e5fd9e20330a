//! Command implementations. Each returns the text to emit.

use crate::config::RunConfig;
use crate::output::{spectrum_csv, to_json, CsvRow};
use gsd_core::classify::classify_all;
use gsd_core::jacobi::{build, eigenvalues_truncated, gershgorin, JacobiFlavor, Which};
use gsd_core::krein::{eigenvalues_secular, nonrel_harness, transfer_oracle, NonrelTarget, SpectrumResult};
use gsd_core::states::Model;
use gsd_core::weyl::{weyl_eval, BlockKind, WeylBlock};
use gsd_core::{GsdError, StrengthKind, C64};
use serde::Serialize;
use std::fmt;

/// Output format of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Failure classes, mapped to exit status by the binary.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or configuration (status 1).
    Usage(String),
    /// Sufficient conditions disagree, or a self-test failed (status 2).
    Contradiction(String),
    /// Numerical failure while running (status 1).
    Runtime(String),
}

impl CliError {
    pub fn status(&self) -> i32 {
        match self {
            CliError::Contradiction(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Contradiction(m) => write!(f, "contradiction: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<GsdError> for CliError {
    fn from(e: GsdError) -> Self {
        match e {
            GsdError::Contradiction(m) => CliError::Contradiction(m),
            GsdError::InvalidInput(_) => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<crate::config::ConfigError> for CliError {
    fn from(e: crate::config::ConfigError) -> Self {
        CliError::Usage(e.0)
    }
}

fn json<T: Serialize>(v: &T) -> Result<String, CliError> {
    to_json(v).map_err(|e| CliError::Runtime(e.to_string()))
}

/// Flag overrides merged over the config's `command` section.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub window: Option<(f64, f64)>,
    pub resolution: Option<f64>,
    pub truncation: Option<usize>,
    pub c_list: Option<Vec<f64>>,
}

fn window(cfg: &RunConfig, o: &Overrides) -> Result<(f64, f64), CliError> {
    o.window
        .or(cfg.command.window)
        .ok_or_else(|| CliError::Usage("a spectral window is required (--window a,b or command.window)".into()))
}

fn resolution(cfg: &RunConfig, o: &Overrides) -> Result<f64, CliError> {
    let r = o.resolution.or(cfg.command.resolution).unwrap_or(1e-3);
    if !(r > 0.0 && r.is_finite()) {
        return Err(CliError::Usage("resolution must be a positive real".into()));
    }
    Ok(r)
}

pub fn classify(cfg: &RunConfig) -> Result<String, CliError> {
    let report = classify_all(&cfg.model_config()?, &cfg.build_lattice()?, &cfg.strength_seq()?)?;
    json(&report)
}

#[derive(Debug, Serialize)]
pub struct SpectrumReport {
    pub window: (f64, f64),
    pub resolution: f64,
    pub secular: SpectrumResult,
    pub oracle: SpectrumResult,
    pub counts_match: bool,
    /// Largest pairwise distance of the sorted lists (`null` when counts differ).
    pub max_deviation: Option<f64>,
}

pub fn spectrum_report(cfg: &RunConfig, o: &Overrides) -> Result<SpectrumReport, CliError> {
    let spec = cfg.realization()?;
    let (w, res) = (window(cfg, o)?, resolution(cfg, o)?);
    let secular = eigenvalues_secular(&spec, w, res)?;
    let oracle = transfer_oracle(&spec, w, res)?;
    let (a, b) = (secular.values(), oracle.values());
    let counts_match = a.len() == b.len();
    let max_deviation = counts_match.then(|| a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));
    Ok(SpectrumReport { window: w, resolution: res, secular, oracle, counts_match, max_deviation })
}

pub fn spectrum_text(r: &SpectrumReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(r),
        Format::Csv => {
            let rows: Vec<CsvRow> = r
                .secular
                .roots
                .iter()
                .map(|x| CsvRow { value: x.value, residual: x.residual, method: "secular" })
                .chain(r.oracle.roots.iter().map(|x| CsvRow { value: x.value, residual: x.residual, method: "oracle" }))
                .collect();
            Ok(spectrum_csv(&rows))
        }
    }
}

pub fn jacobi_flavor(cfg: &RunConfig) -> JacobiFlavor {
    match (cfg.model(), cfg.strength_kind()) {
        (Model::Dirac { .. }, StrengthKind::Alpha) => JacobiFlavor::AlphaDirac,
        (Model::Dirac { .. }, StrengthKind::Beta) => JacobiFlavor::BetaDirac,
        (Model::Schrodinger, StrengthKind::Alpha) => JacobiFlavor::AlphaSchrodinger,
        (Model::Schrodinger, StrengthKind::Beta) => JacobiFlavor::BetaSchrodinger,
    }
}

#[derive(Debug, Serialize)]
struct JacobiReport {
    flavor: JacobiFlavor,
    truncation: usize,
    tolerance: f64,
    eigenvalues: Vec<f64>,
}

pub fn jacobi(cfg: &RunConfig, o: &Overrides, format: Format) -> Result<String, CliError> {
    let n = o.truncation.or(cfg.command.truncation).unwrap_or(100);
    let flavor = jacobi_flavor(cfg);
    let op = build(flavor, &cfg.build_lattice()?, &cfg.strength_seq()?, cfg.c)?;
    let (diag, off) = op.truncate(n)?;
    let (lo, hi) = gershgorin(&diag, &off);
    // bisection brackets are closed to this width
    let tolerance = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    let which = match o.window.or(cfg.command.window) {
        Some((a, b)) => Which::Window(a, b),
        None => Which::All,
    };
    let eigenvalues = eigenvalues_truncated(&op, n, which)?;
    match format {
        Format::Json => json(&JacobiReport { flavor, truncation: n, tolerance, eigenvalues }),
        Format::Csv => {
            let rows: Vec<CsvRow> =
                eigenvalues.iter().map(|&v| CsvRow { value: v, residual: tolerance, method: "sturm" }).collect();
            Ok(spectrum_csv(&rows))
        }
    }
}

#[derive(Debug, Serialize)]
struct WeylSample {
    block: usize,
    kind: BlockKind,
    origin: f64,
    z: (f64, f64),
    /// Row-major `[re, im]` entries, `null` at a pole.
    m: Option<Vec<Vec<(f64, f64)>>>,
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct WeylTable {
    regularized: bool,
    samples: Vec<WeylSample>,
}

pub fn weyl(cfg: &RunConfig) -> Result<String, CliError> {
    let lattice = cfg.build_lattice()?;
    let dirac = matches!(cfg.model(), Model::Dirac { .. });
    let available = lattice.len().unwrap_or(usize::MAX);
    let count = cfg.command.blocks.unwrap_or(4).min(available);
    let mut blocks = Vec::new();
    let xs = lattice.points(count);
    for n in 1..=count {
        let d = lattice.d(n);
        let kind = if dirac { BlockKind::DiracInterval { d } } else { BlockKind::SchrodingerInterval { d } };
        blocks.push((n, WeylBlock::new(kind, cfg.command.regularized, cfg.c).at(xs[n - 1])));
    }
    if cfg.interval.is_half_line() && !lattice.is_infinite() && count == available {
        let kind = if dirac { BlockKind::DiracHalflineRight } else { BlockKind::SchrodingerHalflineRight };
        blocks.push((count + 1, WeylBlock::new(kind, false, cfg.c).at(xs[count])));
    }
    let zs = cfg.command.z.clone().unwrap_or_else(|| vec![(0.0, 1.0)]);
    let mut samples = Vec::new();
    for (n, b) in &blocks {
        for &(re, im) in &zs {
            let (m, error) = match weyl_eval(b, C64::new(re, im)) {
                Ok(m) => {
                    let rows = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| (m[(i, j)].re, m[(i, j)].im)).collect());
                    (Some(rows.collect()), None)
                }
                Err(e @ GsdError::Pole { .. }) => (None, Some(e.to_string())),
                Err(e) => return Err(e.into()),
            };
            samples.push(WeylSample { block: *n, kind: b.kind, origin: b.origin, z: (re, im), m, error });
        }
    }
    json(&WeylTable { regularized: cfg.command.regularized, samples })
}

pub fn limit(cfg: &RunConfig, o: &Overrides) -> Result<String, CliError> {
    let c_list = o.c_list.clone().or(cfg.command.c_list.clone()).unwrap_or_else(|| vec![10.0, 100.0, 1000.0]);
    if c_list.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
        return Err(CliError::Usage("c-list entries must be positive reals".into()));
    }
    let z = cfg.command.z.as_ref().and_then(|v| v.first().copied()).unwrap_or((0.0, 1.0));
    let target = NonrelTarget { z: C64::new(z.0, z.1), window: window(cfg, o)?, resolution: resolution(cfg, o)? };
    let spec = cfg.realization()?;
    json(&nonrel_harness(&spec, &c_list, &target)?)
}
