use alloc::vec::Vec;

use super::word::{ExpectationQuery, TraceWord};

/// Which line of the recursion produced a child term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SdGroup {
    /// Same letter inside the pivot trace: split, sign `-`.
    SplitSame,
    /// Inverse letter inside the pivot trace: split dropping the pair, sign `+`.
    SplitInverse,
    /// Same letter in another trace: merge, sign `-`.
    MergeSame,
    /// Inverse letter in another trace: merge dropping the pair, sign `+`.
    MergeInverse,
}

impl SdGroup {
    pub fn sign(self) -> i8 {
        match self {
            SdGroup::SplitSame | SdGroup::MergeSame => -1,
            SdGroup::SplitInverse | SdGroup::MergeInverse => 1,
        }
    }

    /// Splits raise the trace count; they are the moves counted by `q`.
    pub fn is_split(self) -> bool {
        matches!(self, SdGroup::SplitSame | SdGroup::SplitInverse)
    }
}

/// One child of a single recursion step. Its value is
/// `sign * N^(identity_traces - 1) * E[query]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SdChild {
    pub group: SdGroup,
    pub sign: i8,
    /// Traces that reduced to `tr(1)` and were replaced by `N`.
    pub identity_traces: usize,
    pub query: ExpectationQuery,
}

/// A term of the level-wise expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SdTerm {
    pub sign: i8,
    /// Number of recursion steps taken, `n`.
    pub level: usize,
    /// Identity traces extracted so far, `p`.
    pub trivial_traces: usize,
    /// Split moves taken so far, `q`.
    pub split_count: usize,
    pub query: ExpectationQuery,
}

impl SdTerm {
    pub fn root(query: ExpectationQuery) -> Self {
        Self { sign: 1, level: 0, trivial_traces: 0, split_count: 0, query }
    }

    /// Applies one step to this term.
    pub fn expand(&self) -> Vec<SdTerm> {
        sd_step(&self.query)
            .into_iter()
            .map(|c| SdTerm {
                sign: self.sign * c.sign,
                level: self.level + 1,
                trivial_traces: self.trivial_traces + c.identity_traces,
                split_count: self.split_count + usize::from(c.group.is_split()),
                query: c.query,
            })
            .collect()
    }

    /// `sign * N^(p - n)` once the query is trivial.
    pub fn exponent(&self) -> i32 {
        self.trivial_traces as i32 - self.level as i32
    }
}

/// One application of the Schwinger-Dyson recursion, pivoting on the first
/// letter of the first trace of the canonical form.
///
/// With pivot trace `tr(a W)` the children are, for every other
/// occurrence of the pivot's generator:
/// `tr(a W1) tr(a W2)` (split, `-`), `tr(W1) tr(W2)` (split past `a^-1`, `+`),
/// `tr(a W b V)` (merge with `tr(b V)` at `b = a`, `-`) and `tr(W V)` (merge
/// with `tr(b V)` at `b = a^-1`, `+`), each weighted by `1/N`.
pub fn sd_step(query: &ExpectationQuery) -> Vec<SdChild> {
    let query = query.canonical();
    let traces = query.traces();
    let Some(pivot_trace) = traces.first() else {
        return Vec::new();
    };
    let w = pivot_trace.letters();
    let a = w[0];
    let rest = &traces[1..];
    let mut children = Vec::new();

    let emit = |group: SdGroup, new_traces: Vec<TraceWord>, skip: Option<usize>| {
        let mut identity = 0;
        let mut kept: Vec<TraceWord> = Vec::with_capacity(new_traces.len() + rest.len());
        for t in new_traces {
            if t.is_empty() {
                identity += 1;
            } else {
                kept.push(t);
            }
        }
        kept.extend(
            rest.iter()
                .enumerate()
                .filter(|(i, _)| Some(*i) != skip)
                .map(|(_, t)| t.clone()),
        );
        SdChild {
            group,
            sign: group.sign(),
            identity_traces: identity,
            query: ExpectationQuery::new(kept),
        }
    };

    for j in 1..w.len() {
        if w[j] == a {
            children.push(emit(
                SdGroup::SplitSame,
                alloc::vec![
                    TraceWord::reduced(w[..j].iter().copied()),
                    TraceWord::reduced(w[j..].iter().copied()),
                ],
                None,
            ));
        } else if w[j].is_inverse_of(a) {
            children.push(emit(
                SdGroup::SplitInverse,
                alloc::vec![
                    TraceWord::reduced(w[1..j].iter().copied()),
                    TraceWord::reduced(w[j + 1..].iter().copied()),
                ],
                None,
            ));
        }
    }
    for (li, other) in rest.iter().enumerate() {
        let v = other.letters();
        for j in 0..v.len() {
            if v[j] == a {
                let merged = w.iter().chain(&v[j..]).chain(&v[..j]).copied();
                children.push(emit(SdGroup::MergeSame, alloc::vec![TraceWord::reduced(merged)], Some(li)));
            } else if v[j].is_inverse_of(a) {
                let merged = w[1..].iter().chain(&v[j + 1..]).chain(&v[..j]).copied();
                children.push(emit(SdGroup::MergeInverse, alloc::vec![TraceWord::reduced(merged)], Some(li)));
            }
        }
    }
    children
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sd::parse_trace_expr;
    use alloc::string::ToString;

    fn query(text: &str) -> ExpectationQuery {
        parse_trace_expr(text).unwrap().query
    }

    #[test]
    fn squared_trace_example() {
        let kids = sd_step(&query("tr(U1 U1) tr(U1' U1')"));
        assert_eq!(kids.len(), 3);
        let split: Vec<_> = kids.iter().filter(|c| c.group == SdGroup::SplitSame).collect();
        assert_eq!(split.len(), 1);
        assert_eq!(split[0].sign, -1);
        assert_eq!(split[0].identity_traces, 0);
        assert_eq!(
            split[0].query.canonical_key(),
            query("tr(U1) tr(U1) tr(U1' U1')").canonical_key()
        );
        let merges: Vec<_> = kids.iter().filter(|c| c.group == SdGroup::MergeInverse).collect();
        assert_eq!(merges.len(), 2);
        for m in merges {
            assert_eq!(m.sign, 1);
            assert_eq!(m.identity_traces, 1);
            assert!(m.query.is_trivial());
        }
    }

    #[test]
    fn lone_letter_has_no_children() {
        assert!(sd_step(&query("tr(U1)")).is_empty());
    }

    #[test]
    fn two_generator_pair_terminates_at_once() {
        let kids = sd_step(&query("tr(U1 U2) tr(U2' U1')"));
        assert_eq!(kids.len(), 1);
        assert_eq!(kids[0].group, SdGroup::MergeInverse);
        assert_eq!(kids[0].identity_traces, 1);
        assert!(kids[0].query.is_trivial());
    }

    #[test]
    fn inverse_split_drops_pair() {
        // tr(U1 U2 U1' U2') -> tr(U2) tr(U2')
        let kids = sd_step(&query("tr(U1 U2 U1' U2')"));
        assert_eq!(kids.len(), 1);
        assert_eq!(kids[0].group, SdGroup::SplitInverse);
        assert_eq!(kids[0].query.canonical().to_string(), "tr(U1) tr(U1')");
    }

    #[test]
    fn child_count_bounded_by_letters() {
        for text in [
            "tr(U1 U1 U1) tr(U1' U1' U1')",
            "tr(U1 U2 U1 U2) tr(U2' U1' U2' U1')",
            "tr(U1 U1' U2) tr(U1) tr(U1')",
        ] {
            let q = query(text);
            assert!(sd_step(&q).len() < q.m_total(), "{text}");
        }
    }
}
