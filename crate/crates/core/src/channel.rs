//! Unital CPTP maps with unitary Kraus factors,
//! `E(M) = sum_s P(s) U(s)^dagger M U(s)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{haar_unitary, ComplexMatrix, SeededRng, UNITARITY_TOL};

/// Tolerance on the weight sum and on Hermitian pairing.
pub const WEIGHT_TOL: f64 = 1e-12;

/// A channel given by unitaries `U(s)` and probabilities `P(s)`.
///
/// In a Hermitian channel `U(s + D/2) = U(s)^dagger` and
/// `P(s + D/2) = P(s)`, which makes the map self-adjoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    dim: usize,
    weights: Vec<f64>,
    unitaries: Vec<ComplexMatrix>,
    hermitian: bool,
    seed: Option<u64>,
}

impl Channel {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus_count(&self) -> usize {
        self.unitaries.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn unitaries(&self) -> &[ComplexMatrix] {
        &self.unitaries
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Master seed of the sampler that produced this channel, if any.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    /// True when every weight equals `1/D`.
    pub fn has_uniform_weights(&self) -> bool {
        let u = 1.0 / self.weights.len() as f64;
        self.weights.iter().all(|&p| (p - u).abs() <= WEIGHT_TOL)
    }

    /// `E(M) = sum_s P(s) U(s)^dagger M U(s)`, one triple product per term.
    pub fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.rows() != self.dim || m.cols() != self.dim {
            return Err(Error::ShapeMismatch { expected: (self.dim, self.dim), found: (m.rows(), m.cols()) });
        }
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for (u, &p) in self.unitaries.iter().zip(&self.weights) {
            if p == 0.0 {
                continue;
            }
            let term = u.adjoint().mul(m)?.mul(u)?;
            out = out.add(&term.scale(Complex64::new(p, 0.0)))?;
        }
        Ok(out)
    }

    /// The map applied twice, itself a Hermitian channel when `self` is.
    ///
    /// Kraus factors are `U(s) U(t)` with weight `P(s) P(t)`. They are laid
    /// out so that term `k + D^2/2` is the adjoint of term `k`: the pair
    /// `(s, t)` goes with `(inv t, inv s)`, and the identity terms
    /// `(s, inv s)` pair with `(inv s, s)`.
    pub fn square(&self) -> Result<Channel> {
        let d = self.kraus_count();
        if !self.hermitian {
            let mut unitaries = Vec::with_capacity(d * d);
            let mut weights = Vec::with_capacity(d * d);
            for s in 0..d {
                for t in 0..d {
                    unitaries.push(self.unitaries[s].mul(&self.unitaries[t])?);
                    weights.push(self.weights[s] * self.weights[t]);
                }
            }
            return Ok(Channel { dim: self.dim, weights, unitaries, hermitian: false, seed: self.seed });
        }
        let inv = |s: usize| (s + d / 2) % d;
        let mut seen = vec![false; d * d];
        let mut first = Vec::new();
        let mut second = Vec::new();
        for s in 0..d {
            for t in 0..d {
                if seen[s * d + t] {
                    continue;
                }
                let partner = if t == inv(s) { (t, s) } else { (inv(t), inv(s)) };
                seen[s * d + t] = true;
                seen[partner.0 * d + partner.1] = true;
                first.push((s, t));
                second.push(partner);
            }
        }
        let mut unitaries = Vec::with_capacity(d * d);
        let mut weights = Vec::with_capacity(d * d);
        for &(s, t) in first.iter().chain(&second) {
            unitaries.push(self.unitaries[s].mul(&self.unitaries[t])?);
            weights.push(self.weights[s] * self.weights[t]);
        }
        Ok(Channel { dim: self.dim, weights, unitaries, hermitian: true, seed: self.seed })
    }
}

/// Hermitian channel with `D/2` independent Haar unitaries and their
/// adjoints, uniform weights.
pub fn build_hermitian_random(n: usize, d: usize, rng: &mut SeededRng) -> Result<Channel> {
    if d < 4 || d % 2 != 0 {
        return Err(Error::InvalidParameter(format!("hermitian construction needs even D >= 4, got {d}")));
    }
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let half: Vec<ComplexMatrix> = (0..d / 2).map(|_| haar_unitary(n, rng)).collect::<Result<_>>()?;
    let mut unitaries = half.clone();
    unitaries.extend(half.iter().map(ComplexMatrix::adjoint));
    Ok(Channel {
        dim: n,
        weights: vec![1.0 / d as f64; d],
        unitaries,
        hermitian: true,
        seed: Some(rng.master_seed()),
    })
}

/// Channel with `D` independent Haar unitaries, uniform weights.
pub fn build_nonhermitian_random(n: usize, d: usize, rng: &mut SeededRng) -> Result<Channel> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("non-hermitian construction needs D >= 2, got {d}")));
    }
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let unitaries = (0..d).map(|_| haar_unitary(n, rng)).collect::<Result<_>>()?;
    Ok(Channel {
        dim: n,
        weights: vec![1.0 / d as f64; d],
        unitaries,
        hermitian: false,
        seed: Some(rng.master_seed()),
    })
}

/// Channel from explicit unitaries and weights, Kraus factors
/// `A(s) = sqrt(P(s)) U(s)`. Validates unitarity, the weights and, when
/// `hermitian` is set, the adjoint pairing.
pub fn build_weighted(unitaries: Vec<ComplexMatrix>, weights: Vec<f64>, hermitian: bool) -> Result<Channel> {
    let d = unitaries.len();
    if d == 0 {
        return Err(Error::EmptyInput);
    }
    if weights.len() != d {
        return Err(Error::ShapeMismatch { expected: (d, 1), found: (weights.len(), 1) });
    }
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|&p| !(p >= 0.0)) || (sum - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::WeightSum { sum });
    }
    let n = unitaries[0].rows();
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    for (s, u) in unitaries.iter().enumerate() {
        if u.rows() != n || u.cols() != n {
            return Err(Error::ShapeMismatch { expected: (n, n), found: (u.rows(), u.cols()) });
        }
        let r = u.unitarity_residual();
        if r > UNITARITY_TOL {
            return Err(Error::InvalidParameter(format!("U({}) is not unitary (residual {r:e})", s + 1)));
        }
    }
    if hermitian {
        if d < 4 || d % 2 != 0 {
            return Err(Error::InvalidParameter(format!("hermitian channel needs even D >= 4, got {d}")));
        }
        for s in 0..d / 2 {
            let t = s + d / 2;
            if (weights[s] - weights[t]).abs() > WEIGHT_TOL {
                return Err(Error::Pairing { index: s + 1, reason: "P(s) != P(s + D/2)".into() });
            }
            let gap = unitaries[t].max_abs_diff(&unitaries[s].adjoint())?;
            if gap > WEIGHT_TOL {
                return Err(Error::Pairing { index: s + 1, reason: format!("U(s + D/2) differs from U(s)^dagger by {gap:e}") });
            }
        }
    }
    Ok(Channel { dim: n, weights, unitaries, hermitian, seed: None })
}

/// The identity map on `n x n` matrices: one Kraus factor `1`, or with
/// `hermitian` the four factors `1, 1, 1, 1` so that it satisfies the
/// Hermitian constraints.
pub fn identity_channel(n: usize, hermitian: bool) -> Result<Channel> {
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let d = if hermitian { 4 } else { 1 };
    Ok(Channel {
        dim: n,
        weights: vec![1.0 / d as f64; d],
        unitaries: vec![ComplexMatrix::identity(n); d],
        hermitian,
        seed: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::hs_inner;

    fn random_matrix(n: usize, rng: &mut SeededRng) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| rng.complex_gaussian())
    }

    #[test]
    fn hermitian_builder_pairs_adjoints() {
        let c = build_hermitian_random(4, 4, &mut SeededRng::new(1, 0)).unwrap();
        assert_eq!(c.unitaries()[2], c.unitaries()[0].adjoint());
        assert_eq!(c.unitaries()[3], c.unitaries()[1].adjoint());
        assert!(c.is_hermitian());
        assert_eq!(c.seed(), Some(1));
    }

    #[test]
    fn builders_reject_bad_d() {
        let mut rng = SeededRng::new(1, 0);
        assert!(matches!(build_hermitian_random(4, 3, &mut rng), Err(Error::InvalidParameter(_))));
        assert!(matches!(build_hermitian_random(4, 2, &mut rng), Err(Error::InvalidParameter(_))));
        assert!(matches!(build_nonhermitian_random(8, 1, &mut rng), Err(Error::InvalidParameter(_))));
        assert!(build_nonhermitian_random(8, 2, &mut rng).is_ok());
    }

    #[test]
    fn weighted_validation() {
        let mut rng = SeededRng::new(2, 0);
        let u = haar_unitary(3, &mut rng).unwrap();
        let v = haar_unitary(3, &mut rng).unwrap();
        let us = vec![u.clone(), v.clone(), u.adjoint(), v.adjoint()];
        assert!(build_weighted(us.clone(), vec![0.25; 4], true).is_ok());
        assert!(matches!(
            build_weighted(us.clone(), vec![0.4, 0.1, 0.3, 0.2], true),
            Err(Error::Pairing { index: 1, .. })
        ));
        assert!(matches!(build_weighted(us.clone(), vec![0.5; 4], true), Err(Error::WeightSum { .. })));
        let bad = vec![u.clone(), v.clone(), u.clone(), v.adjoint()];
        assert!(matches!(build_weighted(bad, vec![0.25; 4], true), Err(Error::Pairing { index: 1, .. })));
        // the same list is fine when not flagged hermitian
        assert!(build_weighted(vec![u.clone(), v, u.clone(), u], vec![0.25; 4], false).is_ok());
    }

    #[test]
    fn point_mass_on_identity_is_identity_map() {
        let mut rng = SeededRng::new(3, 0);
        let us = vec![ComplexMatrix::identity(3), haar_unitary(3, &mut rng).unwrap()];
        let c = build_weighted(us, vec![1.0, 0.0], false).unwrap();
        let m = random_matrix(3, &mut rng);
        assert!(c.apply(&m).unwrap().max_abs_diff(&m).unwrap() <= 1e-15);
    }

    #[test]
    fn unital_and_trace_preserving() {
        let mut rng = SeededRng::new(4, 0);
        for c in [
            build_hermitian_random(5, 4, &mut rng).unwrap(),
            build_nonhermitian_random(5, 3, &mut rng).unwrap(),
        ] {
            let id = ComplexMatrix::identity(5);
            assert!(c.apply(&id).unwrap().max_abs_diff(&id).unwrap() <= 1e-10);
            let m = random_matrix(5, &mut rng);
            assert!((c.apply(&m).unwrap().trace() - m.trace()).norm() <= 1e-10);
        }
    }

    #[test]
    fn hermitian_map_is_self_adjoint() {
        let mut rng = SeededRng::new(5, 0);
        let c = build_hermitian_random(4, 6, &mut rng).unwrap();
        let a = random_matrix(4, &mut rng);
        let b = random_matrix(4, &mut rng);
        let lhs = hs_inner(&a, &c.apply(&b).unwrap()).unwrap();
        let rhs = hs_inner(&c.apply(&a).unwrap(), &b).unwrap();
        assert!((lhs - rhs).norm() <= 1e-9);
    }

    #[test]
    fn square_is_composition() {
        let mut rng = SeededRng::new(6, 0);
        let c = build_hermitian_random(3, 4, &mut rng).unwrap();
        let sq = c.square().unwrap();
        assert_eq!(sq.kraus_count(), 16);
        // the layout must pass the hermitian validation
        let rebuilt = build_weighted(sq.unitaries().to_vec(), sq.weights().to_vec(), true);
        assert!(rebuilt.is_ok(), "{rebuilt:?}");
        let m = random_matrix(3, &mut rng);
        let twice = c.apply(&c.apply(&m).unwrap()).unwrap();
        assert!(sq.apply(&m).unwrap().max_abs_diff(&twice).unwrap() <= 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let c = identity_channel(3, false).unwrap();
        assert!(matches!(c.apply(&ComplexMatrix::identity(2)), Err(Error::ShapeMismatch { .. })));
    }
}
