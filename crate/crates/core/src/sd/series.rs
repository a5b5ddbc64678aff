use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::step::sd_step;
use super::word::{CanonicalKey, ExpectationQuery};
use crate::error::{Error, Result};
use crate::ratfn::RationalInN;

/// Controls for [`evaluate_series`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    /// Deepest level to expand.
    pub n_max: usize,
    /// Stop once the truncation bound drops to this value.
    pub tol: f64,
    /// Maximum number of distinct live terms held in a frontier.
    pub node_budget: usize,
    /// Expand even when `m_total > N`, where convergence is not guaranteed.
    pub allow_divergent: bool,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self { n_max: 40, tol: 1e-12, node_budget: 10_000_000, allow_divergent: false }
    }
}

/// Count of terminated terms sharing level, sign, `p` and `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Termination {
    pub level: usize,
    pub sign: i8,
    pub trivial_traces: usize,
    pub split_count: usize,
    pub count: u128,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesResult {
    /// Sum of the terms terminating at level `n`, index `n - 1`, as an
    /// exact Laurent polynomial in `N`.
    pub level_sums: Vec<RationalInN>,
    /// `level_sums` evaluated at the requested `N`.
    pub level_values: Vec<f64>,
    pub partial_total: f64,
    /// Bound on `|E - partial_total|` from the live terms left over.
    pub truncation_bound: f64,
    pub levels_computed: usize,
    /// Every terminated term, aggregated by `(level, sign, p, q)`.
    pub terminations: Vec<Termination>,
    /// Number of terms produced at each level (terminated and live).
    pub level_term_counts: Vec<u128>,
    /// Traces in the starting query, `k`.
    pub initial_traces: usize,
    pub m_total: usize,
}

impl SeriesResult {
    /// Largest `p` allowed at level `n` for the starting trace count `k`:
    /// `floor((k + n) / 3)`.
    pub fn trivial_trace_ceiling(&self, level: usize) -> usize {
        (self.initial_traces + level) / 3
    }
}

/// `(m_total - 1)^n N^{m_total - n}`: bound on the sum of terms still live
/// after `n` levels.
pub fn truncation_bound(m_total: usize, n: u64, levels: usize) -> f64 {
    let n = n as f64;
    let branching = m_total.saturating_sub(1) as f64;
    if branching == 0.0 {
        return 0.0;
    }
    let log = (levels as f64) * (libm_ln(branching) - libm_ln(n)) + (m_total as f64) * libm_ln(n);
    num_traits::Float::exp(log)
}

fn libm_ln(x: f64) -> f64 {
    num_traits::Float::ln(x)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct TermClass {
    key: CanonicalKey,
    sign: i8,
    trivial: usize,
    splits: usize,
}

/// Breadth-first level-wise expansion of `E[query]` at dimension `n`.
pub fn evaluate_series(query: &ExpectationQuery, n: u64, opts: SeriesOptions) -> Result<SeriesResult> {
    let m_total = query.m_total();
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if m_total as u64 > n && !opts.allow_divergent {
        return Err(Error::ConvergenceNotGuaranteed { m_total, n: n as usize });
    }
    let mut result = SeriesResult {
        level_sums: Vec::new(),
        level_values: Vec::new(),
        partial_total: 0.0,
        truncation_bound: 0.0,
        levels_computed: 0,
        terminations: Vec::new(),
        level_term_counts: Vec::new(),
        initial_traces: query.trace_count(),
        m_total,
    };
    if query.is_trivial() {
        // empty product: value 1 at level 0
        result.partial_total = 1.0;
        return Ok(result);
    }

    let n_big = BigRational::from_integer(BigInt::from(n));
    let mut children_memo: BTreeMap<CanonicalKey, Vec<(i8, usize, bool, CanonicalKey)>> = BTreeMap::new();
    let mut frontier: BTreeMap<TermClass, u128> = BTreeMap::new();
    frontier.insert(
        TermClass { key: query.canonical_key(), sign: 1, trivial: 0, splits: 0 },
        1,
    );
    let mut level = 0usize;
    while !frontier.is_empty() && level < opts.n_max {
        level += 1;
        let mut next: BTreeMap<TermClass, u128> = BTreeMap::new();
        let mut ended: BTreeMap<(i8, usize, usize), u128> = BTreeMap::new();
        let mut produced: u128 = 0;
        for (class, count) in &frontier {
            let kids = children_memo.entry(class.key.clone()).or_insert_with(|| {
                sd_step(&ExpectationQuery::from_key(&class.key))
                    .into_iter()
                    .map(|c| (c.sign, c.identity_traces, c.group.is_split(), c.query.canonical_key()))
                    .collect()
            });
            for (sign, identity, split, key) in kids.iter() {
                produced += count;
                let child = TermClass {
                    key: key.clone(),
                    sign: class.sign * sign,
                    trivial: class.trivial + identity,
                    splits: class.splits + usize::from(*split),
                };
                if ExpectationQuery::from_key(&child.key).is_trivial() {
                    *ended.entry((child.sign, child.trivial, child.splits)).or_insert(0) += count;
                } else {
                    *next.entry(child).or_insert(0) += count;
                }
            }
        }
        if next.len() > opts.node_budget {
            return Err(Error::BudgetExceeded { budget: opts.node_budget, level });
        }
        let mut sum = RationalInN::zero();
        for (&(sign, trivial, splits), &count) in &ended {
            let coeff = i64::try_from(count).expect("term count fits i64") * i64::from(sign);
            sum = &sum + &RationalInN::monomial(coeff, trivial as i32 - level as i32);
            result.terminations.push(Termination {
                level,
                sign,
                trivial_traces: trivial,
                split_count: splits,
                count,
            });
        }
        let value = sum
            .eval(&n_big)
            .and_then(|v| num_traits::ToPrimitive::to_f64(&v))
            .unwrap_or(f64::NAN);
        result.level_sums.push(sum);
        result.level_values.push(value);
        result.level_term_counts.push(produced);
        frontier = next;
        let bound = if frontier.is_empty() { 0.0 } else { truncation_bound(m_total, n, level) };
        result.truncation_bound = bound;
        if bound <= opts.tol {
            break;
        }
    }
    result.levels_computed = level;
    result.partial_total = result.level_values.iter().sum();
    if !frontier.is_empty() && level == 0 {
        result.truncation_bound = truncation_bound(m_total, n, 0);
    }
    Ok(result)
}
