//! Experiment configuration: a flat `key=value` file, overridable by flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{CliError, Result};

/// Largest `N` a sweep accepts.
pub const MAX_N: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Construction {
    Hermitian,
    Nonhermitian,
    /// Hermitian pairing with random, pair-symmetric weights.
    Weighted,
}

impl Construction {
    pub fn as_str(self) -> &'static str {
        match self {
            Construction::Hermitian => "hermitian",
            Construction::Nonhermitian => "nonhermitian",
            Construction::Weighted => "weighted",
        }
    }

    pub fn is_hermitian(self) -> bool {
        !matches!(self, Construction::Nonhermitian)
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Construction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "hermitian" => Ok(Construction::Hermitian),
            "nonhermitian" => Ok(Construction::Nonhermitian),
            "weighted" => Ok(Construction::Weighted),
            other => Err(format!("unknown construction `{other}` (hermitian, nonhermitian, weighted)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub construction: Construction,
    pub n_list: Vec<usize>,
    pub d: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    /// Walk length cap for the lower bound.
    pub m_max: usize,
    /// Record wall-clock time per run. Off makes the CSV byte-reproducible.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            construction: Construction::Hermitian,
            n_list: vec![20, 30, 50],
            d: 4,
            trials: 1,
            master_seed: 0,
            output_dir: PathBuf::from("."),
            m_max: 20,
            timing: true,
        }
    }
}

impl ExperimentConfig {
    /// Reads `key=value` lines; `#` starts a comment. Keys: `construction`,
    /// `N_list` (comma separated), `D`, `trials`, `master_seed`,
    /// `output_dir`, `m_max`, `timing`.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| CliError::Config { path: path.into(), line: i + 1, msg };
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected key=value".into()))?;
            cfg.set(key.trim(), value.trim()).map_err(|e| match e {
                CliError::Value { key, msg } => err(format!("{key}: {msg}")),
                other => other,
            })?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |msg: String| CliError::Value { key: key.into(), msg };
        fn num<T: FromStr>(v: &str) -> std::result::Result<T, String>
        where
            T::Err: fmt::Display,
        {
            v.parse::<T>().map_err(|e| format!("`{v}`: {e}"))
        }
        match key {
            "construction" => self.construction = value.parse().map_err(bad)?,
            "N_list" => {
                self.n_list = value
                    .split(',')
                    .map(|x| num::<usize>(x.trim()))
                    .collect::<std::result::Result<_, _>>()
                    .map_err(bad)?
            }
            "D" => self.d = num(value).map_err(bad)?,
            "trials" => self.trials = num(value).map_err(bad)?,
            "master_seed" => self.master_seed = num(value).map_err(bad)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "m_max" => self.m_max = num(value).map_err(bad)?,
            "timing" => self.timing = num(value).map_err(bad)?,
            _ => return Err(bad("unknown key".into())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: String| Err(CliError::Value { key: key.into(), msg });
        if self.trials < 1 {
            return bad("trials", "must be >= 1".into());
        }
        if self.n_list.is_empty() {
            return bad("N_list", "must not be empty".into());
        }
        if let Some(&n) = self.n_list.iter().find(|&&n| !(2..=MAX_N).contains(&n)) {
            return bad("N_list", format!("N = {n} outside 2..={MAX_N}"));
        }
        if self.construction.is_hermitian() && (self.d < 4 || self.d % 2 != 0) {
            return bad("D", format!("{} construction needs even D >= 4, got {}", self.construction, self.d));
        }
        if self.d < 2 {
            return bad("D", format!("must be >= 2, got {}", self.d));
        }
        if self.m_max < 2 || self.m_max % 2 != 0 || self.m_max > 64 {
            return bad("m_max", format!("must be even in 2..=64, got {}", self.m_max));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn parses_file() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# sweep\nconstruction = nonhermitian\nN_list=8, 16\nD=3\ntrials=2\nmaster_seed=99\nm_max=10 # shallow\ntiming=false").unwrap();
        let c = ExperimentConfig::from_file(f.path()).unwrap();
        assert_eq!(c.construction, Construction::Nonhermitian);
        assert_eq!(c.n_list, vec![8, 16]);
        assert_eq!((c.d, c.trials, c.master_seed, c.m_max, c.timing), (3, 2, 99, 10, false));
        c.validate().unwrap();
    }

    #[test]
    fn reports_line_of_bad_key() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "D=4\nbogus=1").unwrap();
        let err = ExperimentConfig::from_file(f.path()).unwrap_err();
        assert!(matches!(err, CliError::Config { line: 2, .. }), "{err}");
    }

    #[test]
    fn validation() {
        let mut c = ExperimentConfig { d: 3, ..Default::default() };
        assert!(c.validate().is_err());
        c.construction = Construction::Nonhermitian;
        assert!(c.validate().is_ok());
        c.n_list = vec![65];
        assert!(c.validate().is_err());
    }
}
