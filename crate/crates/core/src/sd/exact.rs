use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use super::step::sd_step;
use super::word::{CanonicalKey, ExpectationQuery};
use crate::error::{Error, Result};
use crate::ratfn::RationalInN;

/// Default cap on `m_total` for exact evaluation.
pub const DEFAULT_SYMBOLIC_BUDGET: usize = 10;

/// One linear relation `x = constant + sum coeff * x_child`.
#[derive(Debug, Clone)]
struct Relation {
    constant: RationalInN,
    /// `(child index, coefficient)`; coefficients are `+-N^(p-1)`.
    terms: Vec<(usize, RationalInN)>,
}

/// Closed system of recursion relations over the canonical queries
/// reachable from a root.
#[derive(Debug, Clone)]
pub struct SdSystem {
    keys: Vec<CanonicalKey>,
    index: BTreeMap<CanonicalKey, usize>,
    relations: Vec<Relation>,
}

impl SdSystem {
    /// Explores every canonical query reachable from `root`, breadth first.
    pub fn build(root: &ExpectationQuery) -> Self {
        let mut sys = SdSystem { keys: Vec::new(), index: BTreeMap::new(), relations: Vec::new() };
        sys.intern(root.canonical_key());
        let mut i = 0;
        while i < sys.keys.len() {
            let query = ExpectationQuery::from_key(&sys.keys[i]);
            let mut constant = RationalInN::zero();
            let mut coeffs: BTreeMap<usize, RationalInN> = BTreeMap::new();
            for child in sd_step(&query) {
                let term = RationalInN::monomial(i64::from(child.sign), child.identity_traces as i32 - 1);
                if child.query.is_trivial() {
                    constant = &constant + &term;
                } else {
                    let j = sys.intern(child.query.canonical_key());
                    let c = coeffs.entry(j).or_insert_with(RationalInN::zero);
                    *c = &*c + &term;
                }
            }
            let terms = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            sys.relations.push(Relation { constant, terms });
            i += 1;
        }
        sys
    }

    fn intern(&mut self, key: CanonicalKey) -> usize {
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let i = self.keys.len();
        self.index.insert(key.clone(), i);
        self.keys.push(key);
        i
    }

    /// Number of distinct canonical queries in the system.
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Strongly connected components in dependency order: every component
    /// only refers to itself and to components listed before it.
    fn components(&self) -> Vec<Vec<usize>> {
        let n = self.keys.len();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack: Vec<usize> = Vec::new();
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut counter = 0usize;
        // iterative Tarjan: (node, next edge position)
        for start in 0..n {
            if index[start] != usize::MAX {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(start, 0)];
            index[start] = counter;
            low[start] = counter;
            counter += 1;
            stack.push(start);
            on_stack[start] = true;
            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                let edges = &self.relations[v].terms;
                if *pos < edges.len() {
                    let w = edges[*pos].0;
                    *pos += 1;
                    if index[w] == usize::MAX {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().expect("tarjan stack");
                            on_stack[w] = false;
                            comp.push(w);
                            if w == v {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        out.push(comp);
                    }
                }
            }
        }
        out
    }

    /// Solves every unknown; entry `i` is the value of the `i`-th query.
    pub fn solve(&self) -> Result<Vec<RationalInN>> {
        let mut values: Vec<Option<RationalInN>> = vec![None; self.keys.len()];
        for comp in self.components() {
            let local: BTreeMap<usize, usize> = comp.iter().enumerate().map(|(k, &g)| (g, k)).collect();
            let size = comp.len();
            // rows: [A | b] with A = I - C restricted to the component
            let mut rows: Vec<Vec<RationalInN>> = Vec::with_capacity(size);
            for &g in &comp {
                let rel = &self.relations[g];
                let mut row = vec![RationalInN::zero(); size + 1];
                row[local[&g]] = RationalInN::one();
                let mut rhs = rel.constant.clone();
                for (j, c) in &rel.terms {
                    match local.get(j) {
                        Some(&k) => row[k] = &row[k] - c,
                        None => {
                            let v = values[*j].as_ref().expect("dependencies solved first");
                            rhs = &rhs + &(c * v);
                        }
                    }
                }
                row[size] = rhs;
                rows.push(row);
            }
            let solved = eliminate(rows).map_err(|k| Error::SingularSystem {
                key: self.keys[comp[k]].to_string(),
            })?;
            for (k, v) in solved.into_iter().enumerate() {
                values[comp[k]] = Some(v);
            }
        }
        Ok(values.into_iter().map(|v| v.expect("all components solved")).collect())
    }

    pub fn keys(&self) -> &[CanonicalKey] {
        &self.keys
    }
}

/// Gauss-Jordan elimination on an augmented system; on a zero pivot
/// returns the offending local column.
fn eliminate(mut rows: Vec<Vec<RationalInN>>) -> core::result::Result<Vec<RationalInN>, usize> {
    let size = rows.len();
    for col in 0..size {
        let pivot = (col..size).find(|&r| !rows[r][col].is_zero()).ok_or(col)?;
        rows.swap(col, pivot);
        let inv = rows[col][col].recip();
        let pivot_row: Vec<RationalInN> = rows[col].iter().map(|x| if x.is_zero() { x.clone() } else { x * &inv }).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (k, p) in pivot_row.iter().enumerate().skip(col) {
                if !p.is_zero() {
                    row[k] = &row[k] - &(&factor * p);
                }
            }
        }
        rows[col] = pivot_row;
    }
    Ok(rows.into_iter().map(|mut r| r.pop().expect("augmented column")).collect())
}

/// Options for [`evaluate_exact`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactOptions {
    /// Largest `m_total` accepted.
    pub symbolic_budget: usize,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self { symbolic_budget: DEFAULT_SYMBOLIC_BUDGET }
    }
}

/// `E[query]` as an exact rational function of `N`, obtained by solving
/// the closed recursion system.
pub fn evaluate_exact(query: &ExpectationQuery) -> Result<RationalInN> {
    evaluate_exact_with(query, ExactOptions::default())
}

pub fn evaluate_exact_with(query: &ExpectationQuery, opts: ExactOptions) -> Result<RationalInN> {
    let letters = query.m_total();
    if letters > opts.symbolic_budget {
        return Err(Error::SymbolicBudget { letters, budget: opts.symbolic_budget });
    }
    if query.is_trivial() {
        return Ok(RationalInN::one());
    }
    let sys = SdSystem::build(query);
    let values = sys.solve()?;
    Ok(values.into_iter().next().expect("root is index 0"))
}
