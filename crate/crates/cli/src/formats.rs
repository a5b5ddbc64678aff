//! File formats: channel JSON, spectrum and walk-count CSV.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use qexpander_core::cayley::WalkTable;
use qexpander_core::channel::{build_weighted, Channel};
use qexpander_core::matrix::ComplexMatrix;
use qexpander_core::spectrum::SuperopSpectrum;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Serialized channel. Unitaries are `[row][col] = [re, im]`. Floats are
/// written in shortest round-trip form, so a save/load cycle is exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelDoc {
    pub dim: usize,
    pub kraus_count: usize,
    pub hermitian: bool,
    pub weights: Vec<f64>,
    pub unitaries: Vec<Vec<Vec<[f64; 2]>>>,
}

impl ChannelDoc {
    pub fn from_channel(c: &Channel) -> Self {
        let unitaries = c
            .unitaries()
            .iter()
            .map(|u| {
                (0..u.rows())
                    .map(|i| (0..u.cols()).map(|j| [u.get(i, j).re, u.get(i, j).im]).collect())
                    .collect()
            })
            .collect();
        Self {
            dim: c.dim(),
            kraus_count: c.kraus_count(),
            hermitian: c.is_hermitian(),
            weights: c.weights().to_vec(),
            unitaries,
        }
    }

    /// Rebuilds the channel, re-running every validation.
    pub fn to_channel(&self) -> Result<Channel> {
        if self.unitaries.len() != self.kraus_count || self.weights.len() != self.kraus_count {
            return Err(CliError::Value {
                key: "kraus_count".into(),
                msg: format!(
                    "{} declared, {} unitaries and {} weights given",
                    self.kraus_count,
                    self.unitaries.len(),
                    self.weights.len()
                ),
            });
        }
        let mut us = Vec::with_capacity(self.kraus_count);
        for (s, rows) in self.unitaries.iter().enumerate() {
            if rows.len() != self.dim || rows.iter().any(|r| r.len() != self.dim) {
                return Err(CliError::Value {
                    key: "unitaries".into(),
                    msg: format!("U({}) is not {}x{}", s + 1, self.dim, self.dim),
                });
            }
            let entries = rows.iter().flatten().map(|&[re, im]| Complex64::new(re, im)).collect();
            us.push(ComplexMatrix::new(self.dim, self.dim, entries)?);
        }
        Ok(build_weighted(us, self.weights.clone(), self.hermitian)?)
    }
}

pub fn save_channel(c: &Channel, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(&ChannelDoc::from_channel(c)).expect("channel serializes");
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

pub fn load_channel(path: &Path) -> Result<Channel> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let doc: ChannelDoc = serde_json::from_str(&text).map_err(|e| CliError::Json { path: path.into(), source: e })?;
    doc.to_channel()
}

pub const SPECTRUM_HEADER: &str = "rank,a_over_N2,eig_re,eig_im,eig_abs";

/// Spectrum CSV, eigenvalues in the spectrum's own order (descending real
/// part when Hermitian, descending modulus otherwise).
pub fn write_spectrum_csv(s: &SuperopSpectrum, out: &mut (impl Write + ?Sized)) -> std::io::Result<()> {
    writeln!(out, "{SPECTRUM_HEADER}")?;
    for (rank, q, z) in s.ranked() {
        writeln!(out, "{rank},{q},{},{},{}", z.re, z.im, z.norm())?;
    }
    Ok(())
}

pub const CAYLEY_HEADER: &str = "D,m,l,count";

/// Every nonzero `N(l, m)` as `D,m,l,count` rows.
pub fn write_cayley_csv(t: &WalkTable, out: &mut (impl Write + ?Sized)) -> std::io::Result<()> {
    writeln!(out, "{CAYLEY_HEADER}")?;
    for m in 0..=t.m_max() {
        for (l, c) in t.row(m).iter().enumerate() {
            if l <= m && (m - l) % 2 == 0 {
                writeln!(out, "{},{m},{l},{c}", t.alphabet())?;
            }
        }
    }
    Ok(())
}
