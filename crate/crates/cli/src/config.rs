use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use mcpcheck_core::SpaceTag;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Mcp,
    FLemma,
    LargeL,
    Diameter,
    CdFailure,
    Dimension,
    Tangent,
    Geodesicity,
}

impl CheckKind {
    pub const ALL: [CheckKind; 8] = [
        CheckKind::Mcp,
        CheckKind::FLemma,
        CheckKind::LargeL,
        CheckKind::Diameter,
        CheckKind::CdFailure,
        CheckKind::Dimension,
        CheckKind::Tangent,
        CheckKind::Geodesicity,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckKind::Mcp => "mcp",
            CheckKind::FLemma => "f-lemma",
            CheckKind::LargeL => "large-l",
            CheckKind::Diameter => "diameter",
            CheckKind::CdFailure => "cd-failure",
            CheckKind::Dimension => "dimension",
            CheckKind::Tangent => "tangent",
            CheckKind::Geodesicity => "geodesicity",
        }
    }

    /// The space a check belongs to; `None` means both.
    pub fn space(&self) -> Option<SpaceTag> {
        match self {
            CheckKind::FLemma | CheckKind::LargeL | CheckKind::Diameter | CheckKind::Tangent => Some(SpaceTag::Suspension),
            CheckKind::CdFailure => Some(SpaceTag::Cone),
            CheckKind::Mcp | CheckKind::Dimension | CheckKind::Geodesicity => None,
        }
    }

    pub fn applies_to(&self, tag: SpaceTag) -> bool {
        self.space().map_or(true, |s| s == tag)
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Everything a run needs. Unset numeric fields fall back to each check's
/// own default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub space: SpaceTag,
    /// Empty selects every check of the space.
    #[serde(default)]
    pub checks: Vec<CheckKind>,
    #[serde(default)]
    pub resolution: Option<f64>,
    /// Allowed excess of an MCP bin quotient over 1.
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub t_grid: Option<usize>,
    #[serde(default)]
    pub l_grid: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub svg: bool,
}

fn default_out() -> PathBuf {
    PathBuf::from("mcpcheck-out")
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed config {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("no space given (use --space or the config file)")]
    MissingSpace,
    #[error("check {check} does not apply to the {space} space")]
    WrongSpace { check: CheckKind, space: SpaceTag },
    #[error("{name} must be {rule}, got {value}")]
    Bad { name: &'static str, rule: &'static str, value: String },
}

/// Command-line overrides; every field left unset keeps the file value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub space: Option<SpaceTag>,
    pub checks: Vec<CheckKind>,
    pub resolution: Option<f64>,
    pub tolerance: Option<f64>,
    pub t_grid: Option<usize>,
    pub l_grid: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub svg: bool,
}

/// Fields of a config file, all optional so flags can fill the gaps.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialConfig {
    space: Option<SpaceTag>,
    #[serde(default)]
    checks: Vec<CheckKind>,
    resolution: Option<f64>,
    tolerance: Option<f64>,
    t_grid: Option<usize>,
    l_grid: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    #[serde(default)]
    svg: bool,
}

impl RunConfig {
    /// Reads an optional JSON file, applies the overrides and validates.
    pub fn resolve(file: Option<&Path>, flags: Overrides) -> Result<Self, ConfigError> {
        let base = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
                    path: path.to_path_buf(),
                    source,
                })?;
                serde_json::from_str::<PartialConfig>(&text).map_err(|source| ConfigError::Parse {
                    path: path.to_path_buf(),
                    source,
                })?
            }
            None => PartialConfig::default(),
        };
        let config = RunConfig {
            space: flags.space.or(base.space).ok_or(ConfigError::MissingSpace)?,
            checks: if flags.checks.is_empty() { base.checks } else { flags.checks },
            resolution: flags.resolution.or(base.resolution),
            tolerance: flags.tolerance.or(base.tolerance),
            t_grid: flags.t_grid.or(base.t_grid),
            l_grid: flags.l_grid.or(base.l_grid),
            seed: flags.seed.or(base.seed).unwrap_or(0),
            out: flags.out.or(base.out).unwrap_or_else(default_out),
            svg: flags.svg || base.svg,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |name, rule, value: String| Err(ConfigError::Bad { name, rule, value });
        if let Some(r) = self.resolution {
            if !(r > 0.0 && r < 0.1) {
                return bad("resolution", "in (0, 0.1)", r.to_string());
            }
        }
        if let Some(t) = self.tolerance {
            if !(t >= 0.0 && t.is_finite()) {
                return bad("tolerance", "a finite non-negative number", t.to_string());
            }
        }
        for (name, v) in [("t-grid", self.t_grid), ("l-grid", self.l_grid)] {
            if let Some(n) = v {
                if n < 2 {
                    return bad(name, "at least 2", n.to_string());
                }
            }
        }
        if let Some(&check) = self.checks.iter().find(|c| !c.applies_to(self.space)) {
            return Err(ConfigError::WrongSpace { check, space: self.space });
        }
        Ok(())
    }

    /// Selected checks in canonical order, without duplicates.
    pub fn selected(&self) -> Vec<CheckKind> {
        CheckKind::ALL
            .into_iter()
            .filter(|c| c.applies_to(self.space) && (self.checks.is_empty() || self.checks.contains(c)))
            .collect()
    }
}
