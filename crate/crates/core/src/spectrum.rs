//! The channel as a linear map on `N^2`-dimensional matrix space: its
//! matrix, eigenvalues, `lambda_2`, trace moments and reference constants.
//!
//! Two representations are used. [`superoperator`] is the complex matrix
//! acting on column-stacked `vec(M)`. [`real_superoperator`] is the same map
//! in an orthonormal basis of Hermitian matrices; since every channel here
//! maps Hermitian matrices to Hermitian matrices, it is a real matrix, and a
//! symmetric one for Hermitian channels. Eigenvalues and moments are taken
//! from the real form, which is several times cheaper to diagonalize.

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Largest `N` accepted by the dense eigensolvers by default.
pub const DEFAULT_MAX_DIM: usize = 64;

/// Eigenvalues of a channel's superoperator.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperopSpectrum {
    pub dim: usize,
    /// All `N^2` eigenvalues, by descending real part for Hermitian
    /// channels and by descending modulus otherwise.
    pub eigenvalues: Vec<Complex64>,
    pub hermitian: bool,
    /// Largest modulus left after removing the one eigenvalue closest to 1.
    pub lambda2: f64,
    /// Index in `eigenvalues` of the removed unit eigenvalue.
    pub unit_index: usize,
    /// `max |E(1/sqrt N) - 1/sqrt N|`.
    pub unit_eigvec_residual: f64,
}

impl SuperopSpectrum {
    /// Largest eigenvalue modulus.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest real eigenvalue other than the removed unit one. Only
    /// meaningful for Hermitian channels.
    pub fn top_non_unit(&self) -> Option<f64> {
        self.eigenvalues
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != self.unit_index)
            .map(|(_, z)| z.re)
            .reduce(f64::max)
    }

    /// `(rank, rank / N^2, eigenvalue)` rows, rank starting at 1.
    pub fn ranked(&self) -> impl Iterator<Item = (usize, f64, Complex64)> + '_ {
        let total = self.eigenvalues.len() as f64;
        self.eigenvalues.iter().enumerate().map(move |(i, &z)| (i + 1, (i + 1) as f64 / total, z))
    }
}

/// `D`-dependent reference values for `lambda_2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkConstants {
    pub d: usize,
    /// `2 sqrt(D - 1) / D`, the Hermitian value.
    pub lambda_h: f64,
    /// `1 / sqrt(D)`, the non-Hermitian value.
    pub lambda_nh: f64,
    /// `sqrt(lambda_H)`.
    pub lambda_loose: f64,
}

pub fn benchmark_values(d: usize) -> Result<BenchmarkConstants> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("benchmarks need D >= 2, got {d}")));
    }
    let df = d as f64;
    let lambda_h = 2.0 * (df - 1.0).sqrt() / df;
    Ok(BenchmarkConstants { d, lambda_h, lambda_nh: 1.0 / df.sqrt(), lambda_loose: lambda_h.sqrt() })
}

/// Complex `N^2 x N^2` matrix `S = sum_s P(s) (U(s)^T kron U(s)^dagger)`,
/// so that `S vec(M) = vec(E(M))` with column stacking.
pub fn superoperator(channel: &Channel) -> ComplexMatrix {
    let n = channel.dim();
    let n2 = n * n;
    let mut s = vec![Complex64::new(0.0, 0.0); n2 * n2];
    for (u, &p) in channel.unitaries().iter().zip(channel.weights()) {
        if p == 0.0 {
            continue;
        }
        // row r + c N, column r' + c' N: U[c', c] conj(U[r', r])
        for c in 0..n {
            for r in 0..n {
                let row = r + c * n;
                for cp in 0..n {
                    let a = u.get(cp, c) * p;
                    for rp in 0..n {
                        s[row * n2 + rp + cp * n] += a * u.get(rp, r).conj();
                    }
                }
            }
        }
    }
    ComplexMatrix::new(n2, n2, s).expect("sized above")
}

/// One element of the orthonormal Hermitian basis of `n x n` matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BasisElement {
    /// `M(i, i)`.
    Diagonal(usize),
    /// `(M(i, j) + M(j, i)) / sqrt 2`, `i < j`.
    Symmetric(usize, usize),
    /// `i (M(i, j) - M(j, i)) / sqrt 2`, `i < j`.
    Antisymmetric(usize, usize),
}

impl BasisElement {
    /// Nonzero entries `(row, col, value)`.
    fn entries(self) -> ([(usize, usize, Complex64); 2], usize) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        match self {
            BasisElement::Diagonal(i) => ([(i, i, Complex64::new(1.0, 0.0)), (0, 0, z)], 1),
            BasisElement::Symmetric(i, j) => ([(i, j, Complex64::new(h, 0.0)), (j, i, Complex64::new(h, 0.0))], 2),
            BasisElement::Antisymmetric(i, j) => ([(i, j, Complex64::new(0.0, h)), (j, i, Complex64::new(0.0, -h))], 2),
        }
    }
}

/// Basis order: the `N` diagonal units, then for each `i < j` the
/// symmetric and the antisymmetric combination.
fn hermitian_basis(n: usize) -> Vec<BasisElement> {
    let mut out: Vec<BasisElement> = (0..n).map(BasisElement::Diagonal).collect();
    for i in 0..n {
        for j in i + 1..n {
            out.push(BasisElement::Symmetric(i, j));
            out.push(BasisElement::Antisymmetric(i, j));
        }
    }
    out
}

/// Hermitian matrix `sum_k x_k B_k` from coordinates in the Hermitian basis.
pub fn from_hermitian_coords(n: usize, x: &[f64]) -> Result<ComplexMatrix> {
    if x.len() != n * n {
        return Err(Error::ShapeMismatch { expected: (n * n, 1), found: (x.len(), 1) });
    }
    let mut m = ComplexMatrix::zeros(n, n);
    for (b, &c) in hermitian_basis(n).into_iter().zip(x) {
        let (entries, len) = b.entries();
        for &(i, j, v) in &entries[..len] {
            m.set(i, j, m.get(i, j) + v * c);
        }
    }
    Ok(m)
}

/// Coordinates of the Hermitian part of `m` in the Hermitian basis.
pub fn hermitian_coords(m: &ComplexMatrix) -> Vec<f64> {
    hermitian_basis(m.rows())
        .into_iter()
        .map(|b| {
            let (entries, len) = b.entries();
            entries[..len].iter().map(|&(i, j, v)| (v.conj() * m.get(i, j)).re).sum()
        })
        .collect()
}

/// Real `N^2 x N^2` matrix `R_kl = tr(B_k E(B_l))` over the Hermitian basis.
///
/// Uses `tr(M(a,b) U^dagger M(c,d) U) = conj(U[c,b]) U[d,a]`.
pub fn real_superoperator(channel: &Channel) -> Mat<f64> {
    let n = channel.dim();
    let basis = hermitian_basis(n);
    let terms: Vec<(&ComplexMatrix, f64)> =
        channel.unitaries().iter().zip(channel.weights().iter().copied()).filter(|&(_, p)| p != 0.0).collect();
    Mat::from_fn(n * n, n * n, |k, l| {
        let (ek, lk) = basis[k].entries();
        let (el, ll) = basis[l].entries();
        let mut acc = Complex64::new(0.0, 0.0);
        for &(u, p) in &terms {
            let mut t = Complex64::new(0.0, 0.0);
            for &(a, b, alpha) in &ek[..lk] {
                for &(c, d, beta) in &el[..ll] {
                    t += alpha * beta * u.get(c, b).conj() * u.get(d, a);
                }
            }
            acc += t * p;
        }
        acc.re
    })
}

fn check_ceiling(channel: &Channel, max_dim: usize) -> Result<()> {
    if channel.dim() > max_dim {
        return Err(Error::InvalidParameter(format!(
            "N = {} exceeds the dense eigensolver ceiling N <= {max_dim}",
            channel.dim()
        )));
    }
    Ok(())
}

fn symmetrized(r: &Mat<f64>) -> Mat<f64> {
    Mat::from_fn(r.nrows(), r.ncols(), |i, j| 0.5 * (r[(i, j)] + r[(j, i)]))
}

/// Index of the eigenvalue closest to 1, ties to the larger real part.
fn unit_index(values: &[Complex64]) -> usize {
    let one = Complex64::new(1.0, 0.0);
    let mut best = 0;
    for (i, z) in values.iter().enumerate().skip(1) {
        let (d, db) = ((z - one).norm(), (values[best] - one).norm());
        if d < db || (d == db && z.re > values[best].re) {
            best = i;
        }
    }
    best
}

/// `max |E(1)/sqrt N - 1/sqrt N|`.
pub fn unit_eigvec_residual(channel: &Channel) -> Result<f64> {
    let n = channel.dim();
    let v = ComplexMatrix::identity(n).scale(Complex64::new(1.0 / (n as f64).sqrt(), 0.0));
    channel.apply(&v)?.max_abs_diff(&v)
}

/// All `N^2` eigenvalues and `lambda_2`, for `N <= 64`.
pub fn eigen_spectrum(channel: &Channel) -> Result<SuperopSpectrum> {
    eigen_spectrum_with(channel, DEFAULT_MAX_DIM)
}

pub fn eigen_spectrum_with(channel: &Channel, max_dim: usize) -> Result<SuperopSpectrum> {
    check_ceiling(channel, max_dim)?;
    let r = real_superoperator(channel);
    let failed = |_| Error::Eigensolver { seed: channel.seed() };
    let mut eigenvalues: Vec<Complex64> = if channel.is_hermitian() {
        let vals = symmetrized(&r).self_adjoint_eigenvalues(Side::Lower).map_err(failed)?;
        vals.into_iter().rev().map(|x| Complex64::new(x, 0.0)).collect()
    } else {
        let mut vals = r.eigenvalues().map_err(failed)?;
        vals.sort_by(|a, b| {
            b.norm()
                .total_cmp(&a.norm())
                .then(b.re.total_cmp(&a.re))
                .then(b.im.total_cmp(&a.im))
        });
        vals
    };
    if eigenvalues.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Eigensolver { seed: channel.seed() });
    }
    if channel.is_hermitian() {
        eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re));
    }
    let unit = unit_index(&eigenvalues);
    let lambda2 = eigenvalues
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != unit)
        .map(|(_, z)| z.norm())
        .fold(0.0, f64::max);
    Ok(SuperopSpectrum {
        dim: channel.dim(),
        eigenvalues,
        hermitian: channel.is_hermitian(),
        lambda2,
        unit_index: unit,
        unit_eigvec_residual: unit_eigvec_residual(channel)?,
    })
}

/// `a^k` by repeated squaring; `k >= 1`.
fn power(a: &Mat<f64>, k: usize) -> Mat<f64> {
    debug_assert!(k >= 1);
    let mut result: Option<Mat<f64>> = None;
    let mut base = a.clone();
    let mut k = k;
    loop {
        if k & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => &r * &base,
            });
        }
        k >>= 1;
        if k == 0 {
            break;
        }
        base = &base * &base;
    }
    result.expect("k >= 1")
}

fn frobenius_sq(a: &Mat<f64>) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            s += a[(i, j)] * a[(i, j)];
        }
    }
    s
}

/// `tr(S^m) = sum_a lambda_a^m` for a Hermitian channel and even `m`.
///
/// Computed as `||R^{m/2}||_F^2` with `R` the symmetric real form, using
/// repeated squaring.
pub fn moment_trace(channel: &Channel, m: usize) -> Result<f64> {
    if !channel.is_hermitian() {
        return Err(Error::InvalidParameter("moment_trace needs a hermitian channel".into()));
    }
    if m < 2 || m % 2 != 0 {
        return Err(Error::InvalidParameter(format!("moment order must be even and >= 2, got {m}")));
    }
    let r = symmetrized(&real_superoperator(channel));
    Ok(frobenius_sq(&power(&r, m / 2)))
}

/// `(tr(S^m) - 1)^{1/m}`, which is at least `lambda_2`.
pub fn estimate_lambda2_from_moments(channel: &Channel, m: usize) -> Result<f64> {
    let t = moment_trace(channel, m)?;
    if t <= 1.0 {
        return Err(Error::UndefinedEstimate { moment: t });
    }
    Ok((t - 1.0).powf(1.0 / m as f64))
}

/// `sum_{i,j} ||E^m(M(i,j))||^2 = tr((S^dagger)^m S^m)`, any channel, `m >= 1`.
pub fn frobenius_moment(channel: &Channel, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParameter("frobenius_moment needs m >= 1".into()));
    }
    Ok(frobenius_moments(channel, m)?[m - 1])
}

/// `frobenius_moment` for every order `1..=m_max`, sharing the powers.
pub fn frobenius_moments(channel: &Channel, m_max: usize) -> Result<Vec<f64>> {
    let r = real_superoperator(channel);
    let mut out = Vec::with_capacity(m_max);
    let mut p = r.clone();
    for k in 1..=m_max {
        if k > 1 {
            p = &p * &r;
        }
        out.push(frobenius_sq(&p));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_hermitian_random, build_nonhermitian_random, identity_channel};
    use crate::matrix::SeededRng;

    #[test]
    fn benchmark_constants() {
        let b = benchmark_values(4).unwrap();
        assert!((b.lambda_h - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(b.lambda_nh, 0.5);
        assert!(b.lambda_nh < b.lambda_h && b.lambda_h < b.lambda_loose && b.lambda_loose < 1.0);
        assert_eq!(benchmark_values(2).unwrap().lambda_h, 1.0);
        assert!(benchmark_values(1).is_err());
    }

    #[test]
    fn identity_spectrum() {
        for herm in [false, true] {
            let s = eigen_spectrum(&identity_channel(3, herm).unwrap()).unwrap();
            assert_eq!(s.eigenvalues.len(), 9);
            assert!(s.eigenvalues.iter().all(|z| (z - 1.0).norm() < 1e-12));
            assert!((s.lambda2 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn superoperator_matches_apply() {
        let mut rng = SeededRng::new(9, 0);
        let c = build_nonhermitian_random(4, 3, &mut rng).unwrap();
        let s = superoperator(&c).to_faer();
        let m = ComplexMatrix::from_fn(4, 4, |_, _| rng.complex_gaussian());
        let v = m.vec();
        let sv: Vec<Complex64> = (0..16).map(|i| (0..16).map(|j| s[(i, j)] * v[j]).sum()).collect();
        let want = c.apply(&m).unwrap().vec();
        let err = sv.iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err <= 1e-12, "{err}");
    }

    #[test]
    fn real_form_matches_apply() {
        let mut rng = SeededRng::new(10, 0);
        let c = build_nonhermitian_random(3, 2, &mut rng).unwrap();
        let r = real_superoperator(&c);
        let x: Vec<f64> = (0..9).map(|k| (k as f64).sin()).collect();
        let rx: Vec<f64> = (0..9).map(|i| (0..9).map(|j| r[(i, j)] * x[j]).sum()).collect();
        let m = from_hermitian_coords(3, &x).unwrap();
        assert!(m.is_hermitian(1e-15));
        let want = hermitian_coords(&c.apply(&m).unwrap());
        for (a, b) in rx.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn hermitian_real_form_is_symmetric() {
        let c = build_hermitian_random(4, 4, &mut SeededRng::new(12, 0)).unwrap();
        let r = real_superoperator(&c);
        for i in 0..16 {
            for j in 0..16 {
                assert!((r[(i, j)] - r[(j, i)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn moments_agree_with_eigenvalues() {
        let c = build_hermitian_random(5, 4, &mut SeededRng::new(13, 0)).unwrap();
        let s = eigen_spectrum(&c).unwrap();
        for m in [2usize, 4, 6] {
            let direct: f64 = s.eigenvalues.iter().map(|z| z.re.powi(m as i32)).sum();
            let t = moment_trace(&c, m).unwrap();
            assert!((t - direct).abs() <= 1e-9 * direct, "{m}: {t} vs {direct}");
        }
        let f = frobenius_moment(&c, 3).unwrap();
        assert!((f - moment_trace(&c, 6).unwrap()).abs() <= 1e-9 * f);
        assert!(estimate_lambda2_from_moments(&c, 10).unwrap() >= s.lambda2);
    }

    #[test]
    fn moment_preconditions() {
        let mut rng = SeededRng::new(14, 0);
        let h = build_hermitian_random(3, 4, &mut rng).unwrap();
        let nh = build_nonhermitian_random(3, 2, &mut rng).unwrap();
        assert!(moment_trace(&h, 3).is_err());
        assert!(moment_trace(&nh, 2).is_err());
        let id = identity_channel(3, true).unwrap();
        assert!((moment_trace(&id, 4).unwrap() - 9.0).abs() < 1e-12);
        assert!((estimate_lambda2_from_moments(&id, 2).unwrap() - 8f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn ceiling_enforced() {
        let c = identity_channel(5, false).unwrap();
        assert!(matches!(eigen_spectrum_with(&c, 4), Err(Error::InvalidParameter(_))));
    }
}
