//! Word reduction over `D` letters paired as `s <-> s + D/2`, walk counts
//! on the Cayley tree, and the Alon-Boppana style lower bound on the
//! second eigenvalue of a Hermitian unitary-Kraus channel.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A sequence of letters `1..=alphabet`; letter `s` and `s + alphabet/2`
/// (indices mod `alphabet`) are mutual inverses.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LetterSeq {
    alphabet: usize,
    letters: Vec<usize>,
}

impl LetterSeq {
    pub fn new(alphabet: usize, letters: Vec<usize>) -> Result<Self> {
        if alphabet == 0 {
            return Err(Error::InvalidParameter("alphabet size must be positive".into()));
        }
        if let Some(&bad) = letters.iter().find(|&&s| s == 0 || s > alphabet) {
            return Err(Error::LetterOutOfRange { letter: bad, alphabet });
        }
        Ok(Self { alphabet, letters })
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Inverse partner of letter `s` (1-based).
    pub fn inverse_of(&self, s: usize) -> usize {
        inverse_letter(self.alphabet, s)
    }
}

#[inline]
pub(crate) fn inverse_letter(alphabet: usize, s: usize) -> usize {
    (s - 1 + alphabet / 2) % alphabet + 1
}

/// Free reduction: repeatedly cancel adjacent `U(s) U(s + D/2)` pairs.
pub fn reduce_word(seq: &LetterSeq) -> Result<LetterSeq> {
    let d = seq.alphabet;
    if d < 4 || d % 2 != 0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "word reduction needs an even alphabet >= 4, got {d}"
        )));
    }
    let mut out: Vec<usize> = Vec::with_capacity(seq.len());
    for &s in &seq.letters {
        match out.last() {
            Some(&top) if inverse_letter(d, top) == s => {
                out.pop();
            }
            _ => out.push(s),
        }
    }
    Ok(LetterSeq { alphabet: d, letters: out })
}

/// Largest `o` dividing the length such that a cyclic shift by `len / o`
/// maps the sequence onto itself. `o = 1` means no nontrivial symmetry.
pub fn shift_symmetry_period(seq: &LetterSeq) -> Result<usize> {
    let n = seq.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let w = &seq.letters;
    // smallest shift that fixes the word, among divisors of n
    let shift = (1..=n)
        .filter(|p| n % p == 0)
        .find(|&p| (0..n).all(|i| w[i] == w[(i + p) % n]))
        .unwrap_or(n);
    Ok(n / shift)
}

/// Exact counts `N(l, m)` of index sequences of length `m` whose free
/// reduction has length `l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkTable {
    alphabet: usize,
    m_max: usize,
    /// `rows[m][l]`, `l <= m`.
    rows: Vec<Vec<BigUint>>,
}

impl WalkTable {
    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    /// `N(l, m)`; zero outside the table's support.
    pub fn count(&self, l: usize, m: usize) -> BigUint {
        self.rows
            .get(m)
            .and_then(|row| row.get(l))
            .cloned()
            .unwrap_or_else(BigUint::zero)
    }

    /// Number of closed walks, `N(0, m)`.
    pub fn returns(&self, m: usize) -> BigUint {
        self.count(0, m)
    }

    pub fn row(&self, m: usize) -> &[BigUint] {
        &self.rows[m]
    }

    /// `N(0, m) / D^m` as a float.
    pub fn return_probability(&self, m: usize) -> f64 {
        let total = BigUint::from(self.alphabet).pow(m as u32);
        ratio_f64(&self.returns(m), &total)
    }

    /// `N(0,m) (m+1)^{3/2} / (2 sqrt(D-1))^m`, the empirical prefactor of
    /// the standard lower estimate on return counts.
    pub fn return_prefactor(&self, m: usize) -> f64 {
        let d = self.alphabet as f64;
        let n0 = self.returns(m).to_f64().unwrap_or(f64::INFINITY);
        let scale = 2.0 * libm_sqrt(d - 1.0);
        n0 * powf(m as f64 + 1.0, 1.5) / powf(scale, m as f64)
    }
}

/// Walk counts by the exact recursion
/// `N(l, m+1) = N(l-1, m) * (D-1 if l-1 > 0 else D) + N(l+1, m)`.
pub fn walk_counts(alphabet: usize, m_max: usize) -> Result<WalkTable> {
    if alphabet < 2 {
        return Err(Error::InvalidParameter(alloc::format!(
            "walk counts need D >= 2, got {alphabet}"
        )));
    }
    if m_max > 64 {
        return Err(Error::InvalidParameter(alloc::format!(
            "m_max must be <= 64, got {m_max}"
        )));
    }
    let root_branch = BigUint::from(alphabet);
    let branch = BigUint::from(alphabet - 1);
    let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(m_max + 1);
    rows.push(vec![BigUint::one()]);
    for m in 0..m_max {
        let prev = &rows[m];
        let next: Vec<BigUint> = (0..=m + 1)
            .map(|l| {
                let mut acc = BigUint::zero();
                if l >= 1 {
                    if let Some(c) = prev.get(l - 1) {
                        let factor = if l - 1 > 0 { &branch } else { &root_branch };
                        acc += c * factor;
                    }
                }
                if let Some(c) = prev.get(l + 1) {
                    acc += c;
                }
                acc
            })
            .collect();
        rows.push(next);
    }
    Ok(WalkTable { alphabet, m_max, rows })
}

/// Outcome of the lower-bound search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    pub value: f64,
    /// Even walk length attaining the maximum; `None` when no length
    /// qualified and `value` is 0.
    pub best_m: Option<usize>,
}

impl LowerBound {
    pub fn qualified(&self) -> bool {
        self.best_m.is_some()
    }
}

/// Lower bound on `|lambda_2|` valid for every Hermitian channel with `D`
/// uniformly weighted unitary Kraus factors:
/// the maximum over even `m <= m_max` with `N^2 N(0,m)/D^m > 1` of
/// `((N^2 N(0,m)/D^m - 1)/N^2)^{1/m}`.
pub fn alon_boppana_lower_bound(n: usize, alphabet: usize, m_max: usize) -> Result<LowerBound> {
    if alphabet < 4 || alphabet % 2 != 0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "lower bound needs even D >= 4, got {alphabet}"
        )));
    }
    if m_max < 2 || m_max % 2 != 0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "m_max must be even and >= 2, got {m_max}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidDimension(n));
    }
    let table = walk_counts(alphabet, m_max)?;
    let probs: Vec<f64> = (0..=m_max).map(|m| table.return_probability(m)).collect();
    Ok(bound_from_return_probabilities(n, &probs))
}

/// Same bound for a weighted Hermitian channel, using the exact return
/// probabilities of the weighted walk (see [`weighted_return_probabilities`]).
pub fn alon_boppana_lower_bound_weighted(
    n: usize,
    weights: &[f64],
    m_max: usize,
) -> Result<LowerBound> {
    if m_max < 2 || m_max % 2 != 0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "m_max must be even and >= 2, got {m_max}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidDimension(n));
    }
    let probs = weighted_return_probabilities(weights, m_max)?;
    Ok(bound_from_return_probabilities(n, &probs))
}

fn bound_from_return_probabilities(n: usize, probs: &[f64]) -> LowerBound {
    let n2 = (n as f64) * (n as f64);
    let mut best = LowerBound { value: 0.0, best_m: None };
    for m in (2..probs.len()).step_by(2) {
        let x = n2 * probs[m];
        if x <= 1.0 {
            continue;
        }
        let value = powf((x - 1.0) / n2, 1.0 / m as f64);
        if best.best_m.is_none() || value > best.value {
            best = LowerBound { value, best_m: Some(m) };
        }
    }
    best
}

/// Return probabilities `r_0..=r_{m_max}` of the walk on the free group that
/// steps by letter `s` with probability `weights[s-1]`, letters paired as
/// `s <-> s + D/2` with equal weight.
///
/// Computed from truncated first-passage generating functions:
/// `F_x = p_x z + z F_x sum_{t != x} p_t F_{inv t}` and
/// `G = 1 / (1 - z sum_t p_t F_{inv t})`.
pub fn weighted_return_probabilities(weights: &[f64], m_max: usize) -> Result<Vec<f64>> {
    let d = weights.len();
    if d < 2 || d % 2 != 0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "weighted walk needs an even number of letters, got {d}"
        )));
    }
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|&p| p < 0.0) || (sum - 1.0).abs() > 1e-12 {
        return Err(Error::WeightSum { sum });
    }
    for s in 0..d / 2 {
        if (weights[s] - weights[s + d / 2]).abs() > 1e-12 {
            return Err(Error::Pairing {
                index: s + 1,
                reason: "P(s) != P(s + D/2)".into(),
            });
        }
    }
    let len = m_max + 1;
    let inv = |x: usize| (x + d / 2) % d;
    let mut first = vec![vec![0.0f64; len]; d];
    // each sweep fixes one more order of every series
    for _ in 0..len {
        let mut next = vec![vec![0.0f64; len]; d];
        for x in 0..d {
            if len > 1 {
                next[x][1] = weights[x];
            }
            // loop part: sum_{t != x} p_t F_{inv t}
            let mut excursion = vec![0.0f64; len];
            for t in (0..d).filter(|&t| t != x) {
                for (k, c) in first[inv(t)].iter().enumerate() {
                    excursion[k] += weights[t] * c;
                }
            }
            let prod = mul_series(&excursion, &first[x], len);
            for k in 0..len - 1 {
                next[x][k + 1] += prod[k];
            }
        }
        first = next;
    }
    let mut loop_gf = vec![0.0f64; len];
    for t in 0..d {
        for k in 0..len - 1 {
            loop_gf[k + 1] += weights[t] * first[inv(t)][k];
        }
    }
    // G = 1 / (1 - loop_gf)
    let mut g = vec![0.0f64; len];
    g[0] = 1.0;
    for k in 1..len {
        g[k] = (1..=k).map(|j| loop_gf[j] * g[k - j]).sum();
    }
    Ok(g)
}

fn mul_series(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn ratio_f64(num: &BigUint, den: &BigUint) -> f64 {
    // scale both below f64 range before dividing
    let bits = num.bits().max(den.bits());
    let shift = bits.saturating_sub(1000);
    let n = (num >> shift).to_f64().unwrap_or(f64::INFINITY);
    let d = (den >> shift).to_f64().unwrap_or(f64::INFINITY);
    n / d
}

#[inline]
fn powf(x: f64, y: f64) -> f64 {
    num_traits::Float::powf(x, y)
}

#[inline]
fn libm_sqrt(x: f64) -> f64 {
    num_traits::Float::sqrt(x)
}
