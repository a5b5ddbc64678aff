//! Seeded sweeps over `(N, trial)`.

use std::io::Write;
use std::time::Instant;

use qexpander_core::cayley::{alon_boppana_lower_bound, alon_boppana_lower_bound_weighted};
use qexpander_core::channel::{build_hermitian_random, build_nonhermitian_random, build_weighted, Channel};
use qexpander_core::matrix::{splitmix64, SeededRng};
use qexpander_core::spectrum::{benchmark_values, eigen_spectrum, SuperopSpectrum};
use qexpander_core::Error;
use rand::RngCore;
use rayon::prelude::*;

use crate::config::{Construction, ExperimentConfig};
use crate::error::Result;

pub const SWEEP_HEADER: &str = "N,D,seed,construction,lambda2,lambda_H,lambda_nH,alon_boppana_lb,gap_ok,wall_ms";

/// Slack allowed when comparing `lambda2` with the lower bound.
pub const GAP_TOL: f64 = 1e-9;

/// One successful run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub construction: Construction,
    pub lambda2: f64,
    pub lambda_h: f64,
    pub lambda_nh: f64,
    /// Only defined for Hermitian constructions.
    pub alon_boppana_lb: Option<f64>,
    pub gap_ok: Option<bool>,
    pub wall_ms: Option<f64>,
}

/// A run that raised an error; the sweep carries on.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialFailure {
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub construction: Construction,
    pub error: Error,
}

#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub result: std::result::Result<ExperimentRecord, TrialFailure>,
    pub spectrum: Option<SuperopSpectrum>,
}

/// Seed of trial `trial` at dimension `n`. The channel of that run is
/// rebuilt by [`build_trial_channel`] from this seed alone.
pub fn trial_seed(master_seed: u64, n: usize, trial: usize) -> u64 {
    splitmix64(master_seed ^ splitmix64(((n as u64) << 32) | trial as u64))
}

/// Pair-symmetric weights: `D/2` draws from `[0.2, 1)`, normalized and
/// mirrored so that `P(s) = P(s + D/2)`.
pub fn random_paired_weights(d: usize, rng: &mut SeededRng) -> Vec<f64> {
    let half: Vec<f64> = (0..d / 2)
        .map(|_| 0.2 + 0.8 * (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64)
        .collect();
    let total: f64 = 2.0 * half.iter().sum::<f64>();
    let mut w: Vec<f64> = half.iter().map(|x| x / total).collect();
    w.extend_from_within(..);
    w
}

/// The channel of one run, from its seed.
pub fn build_trial_channel(construction: Construction, n: usize, d: usize, seed: u64) -> qexpander_core::Result<Channel> {
    let mut rng = SeededRng::new(seed, 0);
    match construction {
        Construction::Hermitian => build_hermitian_random(n, d, &mut rng),
        Construction::Nonhermitian => build_nonhermitian_random(n, d, &mut rng),
        Construction::Weighted => {
            let base = build_hermitian_random(n, d, &mut rng)?;
            let weights = random_paired_weights(d, &mut rng);
            Ok(build_weighted(base.unitaries().to_vec(), weights, true)?.with_seed(Some(seed)))
        }
    }
}

/// Lower bound on `|lambda_2|` for a Hermitian channel: the uniform-weight
/// bound, or the weighted-walk bound when the weights are not uniform.
pub fn channel_lower_bound(channel: &Channel, m_max: usize) -> qexpander_core::Result<f64> {
    let lb = if channel.has_uniform_weights() {
        alon_boppana_lower_bound(channel.dim(), channel.kraus_count(), m_max)?
    } else {
        alon_boppana_lower_bound_weighted(channel.dim(), channel.weights(), m_max)?
    };
    Ok(lb.value)
}

fn run_trial(cfg: &ExperimentConfig, n: usize, trial: usize) -> TrialOutcome {
    let seed = trial_seed(cfg.master_seed, n, trial);
    let start = Instant::now();
    let attempt = || -> qexpander_core::Result<(ExperimentRecord, SuperopSpectrum)> {
        let bench = benchmark_values(cfg.d)?;
        let channel = build_trial_channel(cfg.construction, n, cfg.d, seed)?;
        let spectrum = eigen_spectrum(&channel)?;
        let lb = if cfg.construction.is_hermitian() { Some(channel_lower_bound(&channel, cfg.m_max)?) } else { None };
        let record = ExperimentRecord {
            n,
            d: cfg.d,
            seed,
            construction: cfg.construction,
            lambda2: spectrum.lambda2,
            lambda_h: bench.lambda_h,
            lambda_nh: bench.lambda_nh,
            alon_boppana_lb: lb,
            gap_ok: lb.map(|b| spectrum.lambda2 >= b - GAP_TOL),
            wall_ms: cfg.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
        };
        Ok((record, spectrum))
    };
    match attempt() {
        Ok((record, spectrum)) => TrialOutcome { result: Ok(record), spectrum: Some(spectrum) },
        Err(error) => TrialOutcome {
            result: Err(TrialFailure { n, d: cfg.d, seed, construction: cfg.construction, error }),
            spectrum: None,
        },
    }
}

/// Runs every `(N, trial)` in parallel; outcomes come back ordered by `N`
/// as listed, then by trial.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<TrialOutcome>> {
    cfg.validate()?;
    let tasks: Vec<(usize, usize)> =
        cfg.n_list.iter().flat_map(|&n| (0..cfg.trials).map(move |t| (n, t))).collect();
    Ok(tasks.into_par_iter().map(|(n, t)| run_trial(cfg, n, t)).collect())
}

fn opt(x: Option<f64>, digits: usize) -> String {
    x.map(|v| format!("{v:.digits$}")).unwrap_or_default()
}

/// One CSV line (no newline). Values carry 12 decimals.
pub fn csv_row(outcome: &TrialOutcome) -> String {
    match &outcome.result {
        Ok(r) => format!(
            "{},{},{},{},{:.12},{:.12},{:.12},{},{},{}",
            r.n,
            r.d,
            r.seed,
            r.construction,
            r.lambda2,
            r.lambda_h,
            r.lambda_nh,
            opt(r.alon_boppana_lb, 12),
            r.gap_ok.map(|b| b.to_string()).unwrap_or_default(),
            opt(r.wall_ms, 3),
        ),
        Err(f) => format!("{},{},{},{},,,,,error,", f.n, f.d, f.seed, f.construction),
    }
}

pub fn write_sweep_csv(outcomes: &[TrialOutcome], out: &mut (impl Write + ?Sized)) -> std::io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for o in outcomes {
        writeln!(out, "{}", csv_row(o))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paired_weights_are_valid() {
        let w = random_paired_weights(6, &mut SeededRng::new(1, 0));
        assert_eq!(w.len(), 6);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for s in 0..3 {
            assert_eq!(w[s], w[s + 3]);
        }
    }

    #[test]
    fn trial_channels_reproduce() {
        for c in [Construction::Hermitian, Construction::Nonhermitian, Construction::Weighted] {
            let a = build_trial_channel(c, 4, 4, 77).unwrap();
            let b = build_trial_channel(c, 4, 4, 77).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn small_sweep_rows() {
        let cfg = ExperimentConfig {
            n_list: vec![4, 6],
            trials: 2,
            timing: false,
            master_seed: 3,
            ..Default::default()
        };
        let out = run_sweep(&cfg).unwrap();
        assert_eq!(out.len(), 4);
        let ns: Vec<usize> = out.iter().map(|o| o.result.as_ref().unwrap().n).collect();
        assert_eq!(ns, vec![4, 4, 6, 6]);
        for o in &out {
            let r = o.result.as_ref().unwrap();
            assert_eq!(r.gap_ok, Some(true));
            assert!(csv_row(o).ends_with(','));
        }
    }
}
