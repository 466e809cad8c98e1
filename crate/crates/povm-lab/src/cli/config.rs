//! Run configuration: declarative key-value file, flag overrides, and
//! provenance hashing.
//!
//! Precedence is flags > file > defaults. The file format is one
//! `key = value` pair per line; `#` starts a comment. Recognized keys:
//!
//! ```text
//! dim, s, gamma, rounds, seed, samples, shots, resolution,
//! state, out, rk_check, s_start, s_stop, s_step
//! ```
//!
//! `state` is one of `ground`, `mixed`, `min-negativity`, or a path to a
//! density-matrix JSON file. There is no wall-clock fallback for `seed`:
//! commands that consume randomness fail with a config error when it is
//! absent.

use std::fmt::Write as FmtWrite;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channels::{DensityMatrix, DensityMatrixJson};
use crate::{Error, Result};

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub s: f64,
    pub gamma: f64,
    pub rounds: u32,
    pub seed: Option<u64>,
    pub samples: usize,
    pub shots: usize,
    pub resolution: usize,
    pub state: StateSpec,
    pub out: Option<PathBuf>,
    pub rk_check: bool,
    pub s_start: f64,
    pub s_stop: f64,
    pub s_step: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dim: 2,
            s: 0.0,
            gamma: 1.0,
            rounds: 3,
            seed: None,
            samples: 1000,
            shots: 0,
            resolution: 256,
            state: StateSpec::Ground,
            out: None,
            rk_check: false,
            s_start: -3.0,
            s_stop: 1.0,
            s_step: 0.05,
        }
    }
}

/// Named initial state or a path to a density-matrix JSON file.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Ground,
    Mixed,
    /// Physical minimizer of W: the eigenvector of the reference kernel's
    /// smallest eigenvalue, which is |1⟩⟨1| for every N and s.
    MinNegativity,
    File(PathBuf),
}

impl StateSpec {
    pub fn parse(text: &str) -> Self {
        match text {
            "ground" => StateSpec::Ground,
            "mixed" => StateSpec::Mixed,
            "min-negativity" => StateSpec::MinNegativity,
            other => StateSpec::File(PathBuf::from(other)),
        }
    }

    fn as_value(&self) -> String {
        match self {
            StateSpec::Ground => "ground".into(),
            StateSpec::Mixed => "mixed".into(),
            StateSpec::MinNegativity => "min-negativity".into(),
            StateSpec::File(path) => path.display().to_string(),
        }
    }

    /// Builds the named density matrix.
    pub fn resolve(&self, dim: usize) -> Result<DensityMatrix> {
        match self {
            StateSpec::Ground => DensityMatrix::ground(dim),
            StateSpec::Mixed => DensityMatrix::maximally_mixed(dim),
            StateSpec::MinNegativity => DensityMatrix::basis_state(dim, 1),
            StateSpec::File(path) => {
                let text = std::fs::read_to_string(path)?;
                let json: DensityMatrixJson = serde_json::from_str(&text)?;
                let rho = DensityMatrix::from_json(&json)?;
                if rho.dim() != dim {
                    return Err(Error::Config(format!(
                        "state file has dim {} but config says {dim}",
                        rho.dim()
                    )));
                }
                Ok(rho)
            }
        }
    }
}

impl RunConfig {
    /// Parses the key-value file format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            config.set(key.trim(), value.trim(), lineno + 1)?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn set(&mut self, key: &str, value: &str, lineno: usize) -> Result<()> {
        let bad = |what: &str| Error::Config(format!("line {lineno}: bad {what}: {value}"));
        match key {
            "dim" => self.dim = value.parse().map_err(|_| bad("dim"))?,
            "s" => self.s = value.parse().map_err(|_| bad("s"))?,
            "gamma" => self.gamma = value.parse().map_err(|_| bad("gamma"))?,
            "rounds" => self.rounds = value.parse().map_err(|_| bad("rounds"))?,
            "seed" => self.seed = Some(value.parse().map_err(|_| bad("seed"))?),
            "samples" => self.samples = value.parse().map_err(|_| bad("samples"))?,
            "shots" => self.shots = value.parse().map_err(|_| bad("shots"))?,
            "resolution" => self.resolution = value.parse().map_err(|_| bad("resolution"))?,
            "state" => self.state = StateSpec::parse(value),
            "out" => self.out = Some(PathBuf::from(value)),
            "rk_check" => self.rk_check = value.parse().map_err(|_| bad("rk_check"))?,
            "s_start" => self.s_start = value.parse().map_err(|_| bad("s_start"))?,
            "s_stop" => self.s_stop = value.parse().map_err(|_| bad("s_stop"))?,
            "s_step" => self.s_step = value.parse().map_err(|_| bad("s_step"))?,
            other => return Err(Error::Config(format!("line {lineno}: unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Canonical serialization; `parse(serialize(c)) == c`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "dim = {}", self.dim);
        let _ = writeln!(out, "s = {:.16e}", self.s);
        let _ = writeln!(out, "gamma = {:.16e}", self.gamma);
        let _ = writeln!(out, "rounds = {}", self.rounds);
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "seed = {seed}");
        }
        let _ = writeln!(out, "samples = {}", self.samples);
        let _ = writeln!(out, "shots = {}", self.shots);
        let _ = writeln!(out, "resolution = {}", self.resolution);
        let _ = writeln!(out, "state = {}", self.state.as_value());
        if let Some(path) = &self.out {
            let _ = writeln!(out, "out = {}", path.display());
        }
        let _ = writeln!(out, "rk_check = {}", self.rk_check);
        let _ = writeln!(out, "s_start = {:.16e}", self.s_start);
        let _ = writeln!(out, "s_stop = {:.16e}", self.s_stop);
        let _ = writeln!(out, "s_step = {:.16e}", self.s_step);
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::Config(format!("dim must be >= 2, got {}", self.dim)));
        }
        if self.gamma.is_nan() || self.gamma <= 0.0 {
            return Err(Error::Config(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be positive".into()));
        }
        if self.resolution == 0 {
            return Err(Error::Config("resolution must be positive".into()));
        }
        if self.s_step.is_nan() || self.s_step <= 0.0 {
            return Err(Error::Config(format!(
                "s_step must be positive, got {}",
                self.s_step
            )));
        }
        Ok(())
    }

    /// Seed, or a config error naming the command that needed it.
    pub fn require_seed(&self, command: &str) -> Result<u64> {
        self.seed.ok_or_else(|| {
            Error::Config(format!(
                "{command} consumes randomness: set --seed (no wall-clock default)"
            ))
        })
    }

    /// Output path, or a config error.
    pub fn require_out(&self, command: &str) -> Result<&Path> {
        self.out
            .as_deref()
            .ok_or_else(|| Error::Config(format!("{command} writes a file: set --out")))
    }

    /// FNV-1a 64 hash of the canonical serialization, as fixed-width hex.
    pub fn hash(&self) -> String {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut hash = OFFSET;
        for byte in self.serialize().bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(PRIME);
        }
        format!("{hash:016x}")
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            tool: format!("povm-lab {}", env!("CARGO_PKG_VERSION")),
            config_hash: self.hash(),
            seed: self.seed,
        }
    }
}

/// Written into every output file: tool version, config hash, seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub config_hash: String,
    pub seed: Option<u64>,
}

impl Provenance {
    /// The `#` comment lines used by CSV outputs.
    pub fn comment_lines(&self) -> Vec<String> {
        vec![
            format!("tool: {}", self.tool),
            format!("config: {}", self.config_hash),
            format!(
                "seed: {}",
                self.seed.map_or("none".to_string(), |s| s.to_string())
            ),
        ]
    }
}
