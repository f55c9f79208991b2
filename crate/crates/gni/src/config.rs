//! Experiment configuration files.
//!
//! The format is line oriented:
//!
//! ```text
//! # comment
//! key = value          top-level setting
//! [solver <method>]    starts a section for one solver
//! key = value          solver setting
//! ```
//!
//! Top-level keys describe the game (`game` plus its size parameters), the
//! study (`name`, `seed`, `starts`, `init`, `output`, `svg`, `plot`,
//! `timing`), and may also carry any solver key, which then becomes the
//! default for every solver section. Later assignments replace earlier ones.
//! Overrides use the same keys; `method.key` targets one solver section.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use gni_core::games::{GameKind, GanCovariance, InitDistribution, QuadraticSpectrum};
use gni_core::solvers::QuadraticRule;
use gni_core::{Method, SolverConfig, StepSetting};

use crate::error::{Error, IoContext, Result};

/// Environment variable that replaces the configured seed.
pub const SEED_ENV: &str = "GNI_SEED";

/// Threshold on `‖∇f‖` that defines iterations-to-convergence in summaries.
pub const CONVERGENCE_TOL: f64 = 1e-5;

const GAME_KEYS: &[&str] = &[
    "n1", "n2", "blocks", "spectrum", "beta", "theta", "d", "mu_scale", "covariance", "m_samples", "n", "p",
];
const STUDY_KEYS: &[&str] = &["name", "game", "seed", "starts", "init", "output", "svg", "plot", "timing"];
const SOLVER_KEYS: &[&str] = &[
    "eta",
    "rho",
    "alpha",
    "max_iters",
    "grad_tol",
    "adam_beta1",
    "adam_beta2",
    "adam_eps",
    "secant_tau",
    "quadratic_rule",
];

/// Which per-iteration quantity the SVG plot shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotQuantity {
    GradNorm,
    Merit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub game: GameKind,
    pub solvers: Vec<SolverConfig>,
    pub starts: usize,
    pub init: InitDistribution,
    pub seed: u64,
    pub output: PathBuf,
    pub emit_svg: bool,
    pub plot: PlotQuantity,
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.solvers.is_empty() {
            return Err(Error::Experiment("at least one solver section is required".into()));
        }
        if self.starts == 0 {
            return Err(Error::Experiment("starts must be at least 1".into()));
        }
        for s in &self.solvers {
            s.validate()?;
        }
        let mut methods: Vec<Method> = self.solvers.iter().map(|s| s.method).collect();
        methods.sort();
        if methods.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Experiment("each method may appear only once".into()));
        }
        Ok(())
    }
}

/// One `key = value` assignment and where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub section: Option<Method>,
    pub key: String,
    pub value: String,
    pub origin: String,
}

/// A parsed but not yet interpreted configuration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Document {
    entries: Vec<Entry>,
    /// Solver sections in order of first appearance.
    sections: Vec<Method>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = Document::default();
        let mut section = None;
        for (idx, raw) in text.lines().enumerate() {
            let origin = format!("line {}", idx + 1);
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('[') {
                let inner = header
                    .strip_suffix(']')
                    .ok_or_else(|| config_error(&origin, "unterminated section header"))?;
                let mut words = inner.split_whitespace();
                let method = match (words.next(), words.next(), words.next()) {
                    (Some("solver"), Some(m), None) => parse_method(m, &origin)?,
                    _ => return Err(config_error(&origin, "expected '[solver <method>]'")),
                };
                if doc.sections.contains(&method) {
                    return Err(config_error(&origin, format!("duplicate section for '{}'", method)));
                }
                doc.sections.push(method);
                section = Some(method);
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_error(&origin, "expected 'key = value'"))?;
            doc.push(section, key.trim(), value.trim(), origin)?;
        }
        Ok(doc)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).at(path)?;
        Document::parse(&text)
    }

    /// Appends an override such as `seed=3` or `gni.rho=0.1`.
    pub fn set(&mut self, assignment: &str, origin: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| config_error(origin, format!("expected key=value, got '{}'", assignment)))?;
        let (section, key) = match key.trim().split_once('.') {
            Some((m, k)) => {
                let method = parse_method(m, origin)?;
                if !self.sections.contains(&method) {
                    self.sections.push(method);
                }
                (Some(method), k)
            }
            None => (None, key.trim()),
        };
        self.push(section, key.trim(), value.trim(), origin.to_string())
    }

    /// Applies `GNI_SEED` when it is set.
    pub fn apply_seed_env(&mut self) -> Result<()> {
        match std::env::var(SEED_ENV) {
            Ok(v) => self.push(None, "seed", v.trim(), format!("environment {}", SEED_ENV)),
            Err(std::env::VarError::NotPresent) => Ok(()),
            Err(e) => Err(config_error(SEED_ENV, e.to_string())),
        }
    }

    fn push(&mut self, section: Option<Method>, key: &str, value: &str, origin: String) -> Result<()> {
        let known = match section {
            Some(_) => SOLVER_KEYS.contains(&key),
            None => SOLVER_KEYS.contains(&key) || GAME_KEYS.contains(&key) || STUDY_KEYS.contains(&key),
        };
        if !known {
            return Err(config_error(&origin, format!("unknown key '{}'", key)));
        }
        if value.is_empty() {
            return Err(config_error(&origin, format!("empty value for '{}'", key)));
        }
        self.entries.push(Entry {
            section,
            key: key.to_string(),
            value: value.to_string(),
            origin,
        });
        Ok(())
    }

    /// Last top-level assignment of `key`.
    fn global(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().rev().find(|e| e.section.is_none() && e.key == key)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.global(key).map(|e| parse_value(e)).transpose()
    }

    pub fn build(&self) -> Result<ExperimentConfig> {
        let game_entry = self
            .global("game")
            .ok_or_else(|| config_error("file", "missing 'game'"))?;
        let game = self.game_kind(game_entry)?;
        let seed = self.get::<u64>("seed")?.unwrap_or(0);
        let mut solvers = Vec::with_capacity(self.sections.len());
        for &method in &self.sections {
            let mut s = SolverConfig::new(method);
            s.seed = seed;
            let applicable = self
                .entries
                .iter()
                .filter(|e| SOLVER_KEYS.contains(&e.key.as_str()))
                .filter(|e| e.section.is_none() || e.section == Some(method));
            // Section values beat top-level defaults regardless of order.
            let (defaults, specific): (Vec<&Entry>, Vec<&Entry>) = applicable.partition(|e| e.section.is_none());
            for e in defaults.into_iter().chain(specific) {
                apply_solver_key(&mut s, e)?;
            }
            solvers.push(s);
        }
        let name = self
            .global("name")
            .map_or_else(|| game.label().to_string(), |e| e.value.clone());
        let init = match self.global("init") {
            Some(e) => parse_init(e)?,
            None => InitDistribution::GameDefault,
        };
        let plot = match self.global("plot").map(|e| (e.value.as_str(), e)) {
            None | Some(("gradf", _)) => PlotQuantity::GradNorm,
            Some(("V", _)) => PlotQuantity::Merit,
            Some((_, e)) => return Err(config_error(&e.origin, "plot must be 'gradf' or 'V'")),
        };
        let config = ExperimentConfig {
            output: self
                .global("output")
                .map_or_else(|| PathBuf::from("out").join(&name), |e| PathBuf::from(&e.value)),
            name,
            game,
            solvers,
            starts: self.get("starts")?.unwrap_or(1),
            init,
            seed,
            emit_svg: self.get("svg")?.unwrap_or(false),
            plot,
            timing: self.get("timing")?.unwrap_or(false),
        };
        config.validate()?;
        Ok(config)
    }

    fn game_kind(&self, entry: &Entry) -> Result<GameKind> {
        let mut kind = GameKind::default_for(&entry.value)
            .ok_or_else(|| config_error(&entry.origin, format!("unknown game '{}'", entry.value)))?;
        let allowed: &[&str] = match kind {
            GameKind::Bilinear { .. } => &["n1", "n2"],
            GameKind::Quadratic { .. } => &["blocks", "spectrum", "beta"],
            GameKind::DiracDelta { .. } => &["theta"],
            GameKind::LinearGan { .. } => &["d", "mu_scale", "covariance", "m_samples"],
            GameKind::Covariance { .. } => &["n", "p"],
        };
        if let Some(e) = self
            .entries
            .iter()
            .find(|e| e.section.is_none() && GAME_KEYS.contains(&e.key.as_str()) && !allowed.contains(&e.key.as_str()))
        {
            return Err(config_error(
                &e.origin,
                format!("'{}' does not apply to game '{}'", e.key, entry.value),
            ));
        }
        match &mut kind {
            GameKind::Bilinear { n1, n2 } => {
                *n1 = self.get("n1")?.unwrap_or(*n1);
                *n2 = self.get("n2")?.unwrap_or(*n2);
            }
            GameKind::Quadratic { block_sizes, spectrum } => {
                if let Some(e) = self.global("blocks") {
                    *block_sizes = e
                        .value
                        .split(',')
                        .map(|v| parse_str(v.trim(), &e.origin))
                        .collect::<Result<_>>()?;
                }
                let beta = self.get::<f64>("beta")?;
                *spectrum = match (self.global("spectrum").map(|e| (e.value.as_str(), e)), beta) {
                    (None, None) | (Some(("definite", _)), None) => QuadraticSpectrum::Definite,
                    (Some(("indefinite", _)), None) => QuadraticSpectrum::Indefinite,
                    (Some(("strongly_monotone", _)), b) | (None, b @ Some(_)) => QuadraticSpectrum::StronglyMonotone {
                        beta: b.unwrap_or(0.5),
                    },
                    (Some((_, e)), _) => {
                        return Err(config_error(
                            &e.origin,
                            "spectrum must be definite, indefinite or strongly_monotone (beta only applies to the last)",
                        ))
                    }
                };
            }
            GameKind::DiracDelta { theta } => *theta = self.get("theta")?.unwrap_or(*theta),
            GameKind::LinearGan {
                d,
                mu_scale,
                covariance,
                m_samples,
            } => {
                *d = self.get("d")?.unwrap_or(*d);
                *mu_scale = self.get("mu_scale")?.unwrap_or(*mu_scale);
                *m_samples = self.get("m_samples")?.unwrap_or(*m_samples);
                if let Some(e) = self.global("covariance") {
                    *covariance = match e.value.as_str() {
                        "identity" => GanCovariance::Identity,
                        "random_diagonal" => GanCovariance::RandomDiagonal,
                        _ => return Err(config_error(&e.origin, "covariance must be identity or random_diagonal")),
                    };
                }
            }
            GameKind::Covariance { n, p } => {
                *n = self.get("n")?.unwrap_or(*n);
                *p = self.get("p")?.unwrap_or(*p);
            }
        }
        Ok(kind)
    }
}

fn apply_solver_key(s: &mut SolverConfig, e: &Entry) -> Result<()> {
    match e.key.as_str() {
        "eta" => s.eta = parse_step(e)?,
        "rho" => s.rho = parse_step(e)?,
        "alpha" => s.alpha = parse_value(e)?,
        "max_iters" => s.max_iters = parse_value(e)?,
        "grad_tol" => s.grad_tol = parse_value(e)?,
        "adam_beta1" => s.adam_beta1 = parse_value(e)?,
        "adam_beta2" => s.adam_beta2 = parse_value(e)?,
        "adam_eps" => s.adam_eps = parse_value(e)?,
        "secant_tau" => s.secant_tau = parse_value(e)?,
        "quadratic_rule" => {
            s.quadratic_rule = match e.value.as_str() {
                "theorem" => QuadraticRule::Theorem,
                "corollary" => QuadraticRule::Corollary,
                _ => return Err(config_error(&e.origin, "quadratic_rule must be theorem or corollary")),
            }
        }
        other => unreachable!("solver key '{other}' passed validation"),
    }
    Ok(())
}

fn parse_method(label: &str, origin: &str) -> Result<Method> {
    label.parse().map_err(|_| {
        let known: Vec<&str> = Method::ALL.iter().map(|m| m.label()).collect();
        config_error(origin, format!("unknown method '{}' (expected one of {})", label, known.join(", ")))
    })
}

fn parse_step(e: &Entry) -> Result<StepSetting> {
    if e.value == "auto" {
        Ok(StepSetting::Auto)
    } else {
        parse_value(e).map(StepSetting::Fixed)
    }
}

fn parse_init(e: &Entry) -> Result<InitDistribution> {
    let v = e.value.as_str();
    let args = |prefix: &str| -> Option<Result<Vec<f64>>> {
        v.strip_prefix(prefix)
            .and_then(|rest| rest.strip_suffix(')'))
            .map(|inner| inner.split(',').map(|t| parse_str(t.trim(), &e.origin)).collect())
    };
    match v {
        "default" => return Ok(InitDistribution::GameDefault),
        "normal" => return Ok(InitDistribution::StandardNormal),
        _ => {}
    }
    if let Some(a) = args("uniform(") {
        return match a?.as_slice() {
            &[lo, hi] if lo < hi => Ok(InitDistribution::UniformBox { lo, hi }),
            _ => Err(config_error(&e.origin, "uniform(lo, hi) needs lo < hi")),
        };
    }
    if let Some(a) = args("fixed(") {
        return Ok(InitDistribution::Fixed(a?));
    }
    Err(config_error(
        &e.origin,
        "init must be default, normal, uniform(lo, hi) or fixed(x1, ..., xn)",
    ))
}

fn parse_value<T: FromStr>(e: &Entry) -> Result<T> {
    parse_str(&e.value, &e.origin).map_err(|_| config_error(&e.origin, format!("bad value '{}' for '{}'", e.value, e.key)))
}

fn parse_str<T: FromStr>(v: &str, origin: &str) -> Result<T> {
    v.parse().map_err(|_| config_error(origin, format!("cannot parse '{}'", v)))
}

fn config_error(origin: &str, message: impl Into<String>) -> Error {
    Error::Config {
        origin: origin.to_string(),
        message: message.into(),
    }
}
