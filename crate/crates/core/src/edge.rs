//! Edge-expansion checks for Hermitian channels: the ratio
//! `tr(P E(P)) / tr(P)` for projectors `P`, its bound in terms of
//! `|lambda_2|`, and the chain of inequalities that bounds edge expansion
//! from below by the spectral gap.

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::matrix::{haar_unitary, ComplexMatrix, SeededRng, EIG_TOL};
use crate::spectrum::{from_hermitian_coords, real_superoperator};

/// Slack allowed by the inequality checks.
pub const CHECK_TOL: f64 = 1e-8;

/// Orthogonal projector of rank `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    matrix: ComplexMatrix,
    rank: usize,
}

impl Projector {
    /// Validates `P^2 = P`, `P = P^dagger` (within `1e-10`) and that
    /// `tr P` is an integer within `1e-8`.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::ShapeMismatch { expected: (matrix.rows(), matrix.rows()), found: (matrix.rows(), matrix.cols()) });
        }
        if !matrix.is_hermitian(EIG_TOL) {
            return Err(Error::InvalidParameter("projector is not Hermitian".into()));
        }
        let idem = matrix.mul(&matrix)?.max_abs_diff(&matrix)?;
        if idem > EIG_TOL {
            return Err(Error::InvalidParameter(format!("projector is not idempotent (residual {idem:e})")));
        }
        let t = matrix.trace().re;
        let rank = t.round();
        if (t - rank).abs() > CHECK_TOL || rank < 0.0 {
            return Err(Error::InvalidParameter(format!("projector trace {t} is not an integer")));
        }
        Ok(Self { matrix, rank: rank as usize })
    }

    /// Projector onto the span of the first `l` columns of a unitary.
    pub fn from_columns(u: &ComplexMatrix, l: usize) -> Result<Self> {
        let n = u.rows();
        if l > u.cols() {
            return Err(Error::InvalidParameter(format!("rank {l} exceeds {} columns", u.cols())));
        }
        let m = ComplexMatrix::from_fn(n, n, |i, j| (0..l).map(|k| u.get(i, k) * u.get(j, k).conj()).sum());
        Self::new(m)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// Rank-`l` projector onto the first `l` columns of a Haar unitary.
pub fn random_projector(n: usize, l: usize, rng: &mut SeededRng) -> Result<Projector> {
    Projector::from_columns(&haar_unitary(n, rng)?, l)
}

fn overlap(channel: &Channel, p: &Projector) -> Result<f64> {
    if p.dim() != channel.dim() {
        return Err(Error::ShapeMismatch { expected: (channel.dim(), channel.dim()), found: (p.dim(), p.dim()) });
    }
    Ok(p.matrix().mul(&channel.apply(p.matrix())?)?.trace().re)
}

/// `tr(P E(P)) / tr(P)`.
pub fn edge_ratio(channel: &Channel, p: &Projector) -> Result<f64> {
    if p.rank() == 0 {
        return Err(Error::InvalidParameter("edge ratio of a rank-0 projector".into()));
    }
    Ok(overlap(channel, p)? / p.rank() as f64)
}

/// One evaluation of `tr(P E(P)) <= |lambda_2| (l - l^2/N) + l^2/N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConverseOutcome {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub slack: f64,
    pub holds: bool,
}

/// Checks the converse bound for one projector with `rank <= N/2`, given
/// `lambda2` as the largest non-unit eigenvalue modulus.
pub fn converse_check(channel: &Channel, p: &Projector, lambda2: f64) -> Result<ConverseOutcome> {
    if !channel.is_hermitian() {
        return Err(Error::Precondition("converse bound is stated for hermitian channels".into()));
    }
    let n = channel.dim() as f64;
    let l = p.rank() as f64;
    if 2 * p.rank() > channel.dim() {
        return Err(Error::Precondition(format!("projector rank {} exceeds N/2 = {}", p.rank(), n / 2.0)));
    }
    let lhs = overlap(channel, p)?;
    let rhs = lambda2.abs() * (l - l * l / n) + l * l / n;
    let slack = rhs - lhs;
    Ok(ConverseOutcome { lhs, rhs, slack, holds: slack >= -CHECK_TOL })
}

/// Outcome of the spectral-gap-to-edge-expansion chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    /// Eigenvalue of the eigenvector `X` used: the largest eigenvalue after
    /// the unit one is removed.
    pub lambda2: f64,
    /// `f_1 >= ... >= f_m > 0`, normalized to unit sum of squares.
    pub f_values: Vec<f64>,
    /// `tr((1 - P_i) E(P_i))` for `i = 1..m`.
    pub ratios: Vec<f64>,
    pub lhs: f64,
    /// `sqrt(2 (1 - lambda2))`.
    pub rhs: f64,
    pub holds: bool,
    /// `|tr X|` for the normalized eigenvector.
    pub trace_residual: f64,
    /// Whether `-X` was used to keep `m <= N/2`.
    pub negated: bool,
}

/// Builds `X` from the top non-unit eigenvector, the nested projectors
/// `P_i` onto its top eigenvectors, and evaluates
/// `sum_i (f_i^2 - f_{i+1}^2) tr((1 - P_i) E(P_i)) <= sqrt(2 (1 - lambda2))`.
///
/// The eigenvalue must be positive; otherwise square the channel first.
pub fn tanner_chain_check(channel: &Channel) -> Result<ChainReport> {
    if !channel.is_hermitian() {
        return Err(Error::Precondition("chain check needs a hermitian channel".into()));
    }
    let n = channel.dim();
    let n2 = n * n;
    let r = real_superoperator(channel);
    // Shift the identity direction to -3 so the top eigenpair is the
    // largest one orthogonal to it, even when 1 is degenerate.
    let u = 1.0 / (n as f64).sqrt();
    let shifted = Mat::from_fn(n2, n2, |i, j| {
        let s = 0.5 * (r[(i, j)] + r[(j, i)]);
        if i < n && j < n {
            s - 4.0 * u * u
        } else {
            s
        }
    });
    let eig = shifted
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::Eigensolver { seed: channel.seed() })?;
    let top = n2 - 1;
    let lambda2 = eig.S().column_vector()[top];
    if !(lambda2 > 0.0) {
        return Err(Error::Precondition(format!(
            "top non-unit eigenvalue {lambda2} is not positive; check the squared channel"
        )));
    }
    let coords: Vec<f64> = (0..n2).map(|i| eig.U()[(i, top)]).collect();
    let x = from_hermitian_coords(n, &coords)?;
    let trace_residual = x.trace().norm();
    // Hermitian part, traceless
    let x = x.add(&x.adjoint())?.scale(Complex64::new(0.5, 0.0));
    let shift = Complex64::new(x.trace().re / n as f64, 0.0);
    let x = x.sub(&ComplexMatrix::identity(n).scale(shift))?;

    let xe = x
        .to_faer()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::Eigensolver { seed: channel.seed() })?;
    let values: Vec<f64> = (0..n).map(|i| xe.S().column_vector()[i].re).collect();
    let vectors = xe.U();
    // descending order; for -X the order of X reverses
    let positive = values.iter().filter(|&&e| e > 0.0).count();
    let negated = 2 * positive > n;
    let order: Vec<(f64, usize)> = if negated {
        (0..n).map(|i| (-values[i], i)).collect()
    } else {
        (0..n).rev().map(|i| (values[i], i)).collect()
    };
    let m = order.iter().filter(|(e, _)| *e > 0.0).count();
    let norm = order[..m].iter().map(|(e, _)| e * e).sum::<f64>().sqrt();
    let f_values: Vec<f64> = order[..m].iter().map(|(e, _)| e / norm).collect();

    let mut ratios = Vec::with_capacity(m);
    let mut p = ComplexMatrix::zeros(n, n);
    for (i, &(_, col)) in order[..m].iter().enumerate() {
        let v = ComplexMatrix::from_fn(n, n, |a, b| vectors[(a, col)] * vectors[(b, col)].conj());
        p = p.add(&v)?;
        let ep = channel.apply(&p)?;
        // tr((1 - P) E(P)) = tr E(P) - tr(P E(P))
        ratios.push(ep.trace().re - p.mul(&ep)?.trace().re);
        debug_assert!(i < m);
    }
    let lhs: f64 = (0..m)
        .map(|i| {
            let next = f_values.get(i + 1).copied().unwrap_or(0.0);
            (f_values[i] * f_values[i] - next * next) * ratios[i]
        })
        .sum();
    let rhs = (2.0 * (1.0 - lambda2)).max(0.0).sqrt();
    Ok(ChainReport { lambda2, f_values, ratios, lhs, rhs, holds: lhs <= rhs + CHECK_TOL, trace_residual, negated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_hermitian_random, identity_channel};
    use crate::spectrum::eigen_spectrum;

    #[test]
    fn projector_validation() {
        let mut rng = SeededRng::new(1, 0);
        let p = random_projector(6, 2, &mut rng).unwrap();
        assert_eq!(p.rank(), 2);
        let not_proj = ComplexMatrix::identity(3).scale(Complex64::new(0.5, 0.0));
        assert!(Projector::new(not_proj).is_err());
    }

    #[test]
    fn identity_channel_extremes() {
        let c = identity_channel(6, true).unwrap();
        let p = random_projector(6, 3, &mut SeededRng::new(2, 0)).unwrap();
        assert!((edge_ratio(&c, &p).unwrap() - 1.0).abs() < 1e-12);
        let out = converse_check(&c, &p, 1.0).unwrap();
        assert!(out.slack.abs() < 1e-9);
        let chain = tanner_chain_check(&c).unwrap();
        assert!((chain.lambda2 - 1.0).abs() < 1e-9);
        assert!(chain.lhs.abs() < 1e-9 && chain.rhs.abs() < 1e-4 && chain.holds);
    }

    #[test]
    fn converse_rank_limit() {
        let c = identity_channel(4, true).unwrap();
        let p = random_projector(4, 3, &mut SeededRng::new(3, 0)).unwrap();
        assert!(matches!(converse_check(&c, &p, 1.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn random_channel_chain_and_converse() {
        let mut rng = SeededRng::new(4, 0);
        let c = build_hermitian_random(8, 4, &mut rng).unwrap();
        let s = eigen_spectrum(&c).unwrap();
        let chain = tanner_chain_check(&c).unwrap();
        assert!(chain.holds, "{chain:?}");
        assert!(chain.trace_residual <= 1e-8);
        assert!((chain.lambda2 - s.top_non_unit().unwrap()).abs() < 1e-9);
        let sum_sq: f64 = chain.f_values.iter().map(|f| f * f).sum();
        assert!((sum_sq - 1.0).abs() < 1e-12);
        for _ in 0..20 {
            let p = random_projector(8, 1 + (rng.next_u32() % 4) as usize, &mut rng).unwrap();
            assert!(converse_check(&c, &p, s.lambda2).unwrap().holds);
            let e = edge_ratio(&c, &p).unwrap();
            assert!((-1e-10..=1.0 + 1e-9).contains(&e));
        }
    }

    use rand::RngCore;
}
