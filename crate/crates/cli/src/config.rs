//! Run configuration, read from a TOML file. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use apxgrp_core::covering::Side;
use apxgrp_core::dimcmp::VarietySpec;
use apxgrp_core::families::FamilySpec;
use apxgrp_core::setalg::ConjVariant;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub backend: Option<BackendBlock>,
    #[serde(default)]
    pub input: Option<InputSpec>,
    pub command: Command,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackendBlock {
    /// Backend descriptor, e.g. `sl2 p=5` or `modular n=35 d=1`.
    pub group: String,
}

/// Where a set comes from. Exactly one source must be given.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    /// A set file in the `# finset <backend>` text format.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    /// Element literals in the backend block's group.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<String>>,
}

impl InputSpec {
    fn validate(&self, what: &str, backend: Option<&BackendBlock>) -> CliResult<()> {
        let n = usize::from(self.family.is_some())
            + usize::from(self.file.is_some())
            + usize::from(self.elements.is_some());
        if n != 1 {
            return Err(CliError::Config(format!(
                "{what} needs exactly one of `family`, `file`, `elements` (found {n})"
            )));
        }
        if self.elements.is_some() && backend.is_none() {
            return Err(CliError::Config(format!("{what}: `elements` needs a [backend] block")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedFamilyName {
    #[default]
    Default,
    DerivedSquare,
    Dilates,
    CayleyBalls,
}

fn d_levels() -> usize {
    8
}
fn d_budget() -> usize {
    10_000
}
fn d_max_size() -> usize {
    1_000_000
}
fn d_samples() -> u64 {
    10_000
}
fn d_n_max() -> usize {
    16
}
fn d_word_cap() -> usize {
    apxgrp_core::probes::DEFAULT_WORD_CAP
}
fn d_e_budget() -> usize {
    64
}
fn d_epsilon() -> f64 {
    0.02
}
fn d_varieties() -> Vec<VarietySpec> {
    VarietySpec::built_ins()
}
fn d_max_p() -> u64 {
    apxgrp_core::dimcmp::DEFAULT_DICHOTOMY_PRIME
}
fn d_pair_budget() -> u64 {
    20_000_000
}
fn d_powers() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Command {
    /// `|XX|`, `|XX^-1X|` and the ratios.
    Tripling {},
    /// Greedy cover of the input by translates of `tile`, or a Ruzsa cover with `ruzsa = true`.
    Cover {
        tile: InputSpec,
        #[serde(default)]
        side: Side,
        #[serde(default)]
        ruzsa: bool,
        #[serde(default)]
        budget: Option<usize>,
    },
    Commens {
        other: InputSpec,
        #[serde(default = "d_budget")]
        budget: usize,
    },
    ApproxK {},
    Tower {
        #[serde(default = "d_levels")]
        levels: usize,
        #[serde(default = "d_pair_budget")]
        pair_budget: u64,
    },
    SeedSearch {
        #[serde(default = "d_levels")]
        levels: usize,
        #[serde(default)]
        family: SeedFamilyName,
        #[serde(default = "d_pair_budget")]
        pair_budget: u64,
    },
    Closure {
        #[serde(default = "d_max_size")]
        max_size: usize,
    },
    NearSubgroup {},
    Perfectness {
        l: usize,
        m: usize,
        #[serde(default = "d_samples")]
        samples: u64,
        #[serde(default)]
        variant: ConjVariant,
    },
    WordDepth {
        a: Vec<String>,
        #[serde(default = "d_n_max")]
        n_max: usize,
        #[serde(default = "d_word_cap")]
        cap: usize,
    },
    Freiman {
        #[serde(default = "d_e_budget")]
        e_budget: usize,
    },
    /// Exponent ratios on varieties; with `full = true` Γ is all of SL2(F_p) from the backend block.
    Dimcmp {
        #[serde(default = "d_epsilon")]
        epsilon: f64,
        #[serde(default = "d_varieties")]
        varieties: Vec<VarietySpec>,
        #[serde(default)]
        full: bool,
    },
    Dichotomy {
        #[serde(default = "d_max_p")]
        max_p: u64,
    },
    Gen {},
    /// Growth summary (`|X^k|` for k up to `powers`) of every spec in a registered corpus.
    CorpusRun {
        corpus: String,
        #[serde(default = "d_powers")]
        powers: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Tripling {} => "tripling",
            Command::Cover { .. } => "cover",
            Command::Commens { .. } => "commens",
            Command::ApproxK {} => "approx-k",
            Command::Tower { .. } => "tower",
            Command::SeedSearch { .. } => "seed-search",
            Command::Closure { .. } => "closure",
            Command::NearSubgroup {} => "near-subgroup",
            Command::Perfectness { .. } => "perfectness",
            Command::WordDepth { .. } => "word-depth",
            Command::Freiman { .. } => "freiman",
            Command::Dimcmp { .. } => "dimcmp",
            Command::Dichotomy { .. } => "dichotomy",
            Command::Gen {} => "gen",
            Command::CorpusRun { .. } => "corpus-run",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

fn d_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}
fn d_dir() -> PathBuf {
    PathBuf::from("apxgrp-out")
}
fn d_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default = "d_dir")]
    pub dir: PathBuf,
    #[serde(default = "d_formats")]
    pub formats: Vec<Format>,
    #[serde(default = "d_true")]
    pub cache: bool,
    /// Cache location; `APXGRP_CACHE_DIR` takes precedence, then `<dir>/.cache`.
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            dir: d_dir(),
            formats: d_formats(),
            cache: true,
            cache_dir: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> CliResult<RunConfig> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative input and output paths resolve against its directory.
    pub fn load(path: &Path) -> CliResult<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.rebase(base);
        Ok(cfg)
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(f) = self.input.as_mut().and_then(|i| i.file.as_mut()) {
            fix(f);
        }
        match &mut self.command {
            Command::Cover { tile: s, .. } | Command::Commens { other: s, .. } => {
                if let Some(f) = s.file.as_mut() {
                    fix(f);
                }
            }
            _ => {}
        }
        fix(&mut self.output.dir);
        if let Some(c) = self.output.cache_dir.as_mut() {
            fix(c);
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        let backend = self.backend.as_ref();
        if let Some(b) = backend {
            apxgrp_core::GroupCtx::from_descriptor(&b.group).map_err(|e| CliError::Config(format!("backend: {e}")))?;
        }
        let needs_input = !matches!(
            self.command,
            Command::CorpusRun { .. } | Command::Dimcmp { full: true, .. }
        );
        match (&self.input, needs_input) {
            (Some(i), true) => i.validate("input", backend)?,
            (None, true) => {
                return Err(CliError::Config(format!(
                    "`{}` needs an [input] block",
                    self.command.name()
                )))
            }
            (Some(_), false) => {
                return Err(CliError::Config(format!(
                    "`{}` takes no [input] block",
                    self.command.name()
                )));
            }
            (None, false) => {}
        }
        match &self.command {
            Command::Cover { tile, .. } => tile.validate("command.tile", backend)?,
            Command::Commens { other, .. } => other.validate("command.other", backend)?,
            Command::Tower { levels, .. } | Command::SeedSearch { levels, .. } if *levels == 0 => {
                return Err(CliError::Config("levels must be >= 1".into()));
            }
            Command::Perfectness { l, m, samples, .. } if *l == 0 || *m == 0 || *samples == 0 => {
                return Err(CliError::Config("l, m and samples must be >= 1".into()));
            }
            Command::WordDepth { a, n_max, .. } if a.is_empty() || *n_max == 0 => {
                return Err(CliError::Config(
                    "word-depth needs a nonempty `a` and n_max >= 1".into(),
                ));
            }
            Command::Dimcmp { epsilon, full, .. } => {
                if epsilon.is_nan() || *epsilon < 0.0 {
                    return Err(CliError::Config("epsilon must be >= 0".into()));
                }
                if *full && backend.is_none() {
                    return Err(CliError::Config(
                        "dimcmp with full = true needs a [backend] block".into(),
                    ));
                }
            }
            Command::CorpusRun { corpus, powers } => {
                apxgrp_core::families::corpus(corpus).map_err(|e| CliError::Config(e.to_string()))?;
                if *powers < 2 {
                    return Err(CliError::Config("powers must be >= 2".into()));
                }
            }
            _ => {}
        }
        if self.output.formats.is_empty() {
            return Err(CliError::Config("output.formats is empty".into()));
        }
        Ok(())
    }
}
