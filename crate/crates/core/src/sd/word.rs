use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// One factor `U_g` or its adjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub generator: u32,
    pub inverted: bool,
}

impl Letter {
    pub fn new(generator: u32, inverted: bool) -> Self {
        Self { generator, inverted }
    }

    pub fn inverse(self) -> Self {
        Self { generator: self.generator, inverted: !self.inverted }
    }

    pub fn is_inverse_of(self, other: Letter) -> bool {
        self.generator == other.generator && self.inverted != other.inverted
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U{}{}", self.generator, if self.inverted { "'" } else { "" })
    }
}

/// Trace of a cyclic word. Constructed words are cyclically reduced.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TraceWord {
    letters: Vec<Letter>,
}

impl TraceWord {
    /// Builds the trace of `letters`, cancelling inverse pairs including
    /// those that meet across the cyclic boundary.
    pub fn reduced(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for l in letters {
            match stack.last() {
                Some(&top) if top.is_inverse_of(l) => {
                    stack.pop();
                }
                _ => stack.push(l),
            }
        }
        let (mut lo, mut hi) = (0usize, stack.len());
        while hi - lo >= 2 && stack[lo].is_inverse_of(stack[hi - 1]) {
            lo += 1;
            hi -= 1;
        }
        Self { letters: stack[lo..hi].to_vec() }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    /// `tr(1)`.
    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

impl fmt::Display for TraceWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("tr(")?;
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str(")")
    }
}

/// Opaque canonical form of a query: equal for queries related by trace
/// rotation, trace reordering, generator renaming and per-generator
/// inversion.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(Vec<u16>);

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = ExpectationQuery::from_key(self);
        write!(f, "{q}")
    }
}

/// The expectation `E[L_1 L_2 ... L_k]` of a product of traces of words in
/// independent Haar unitaries.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExpectationQuery {
    traces: Vec<TraceWord>,
}

impl ExpectationQuery {
    /// Query from nonempty, reduced traces. Empty traces are dropped; the
    /// caller accounts for their factor `N`.
    pub fn new(traces: Vec<TraceWord>) -> Self {
        Self { traces: traces.into_iter().filter(|t| !t.is_empty()).collect() }
    }

    pub fn traces(&self) -> &[TraceWord] {
        &self.traces
    }

    pub fn trace_count(&self) -> usize {
        self.traces.len()
    }

    /// Total letter count `m_total`.
    pub fn m_total(&self) -> usize {
        self.traces.iter().map(TraceWord::len).sum()
    }

    /// True when every trace has been reduced to `tr(1)`.
    pub fn is_trivial(&self) -> bool {
        self.traces.is_empty()
    }

    /// Distinct generator indices in use.
    pub fn generators(&self) -> BTreeSet<u32> {
        self.traces
            .iter()
            .flat_map(|t| t.letters.iter().map(|l| l.generator))
            .collect()
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        canonicalize(&self.traces)
    }

    /// The representative of this query's class: generators labelled
    /// `1..g` by first occurrence, each first seen un-inverted.
    pub fn canonical(&self) -> ExpectationQuery {
        Self::from_key(&self.canonical_key())
    }

    pub fn from_key(key: &CanonicalKey) -> Self {
        let mut traces = Vec::new();
        let mut i = 0;
        let codes = &key.0;
        while i < codes.len() {
            let len = codes[i] as usize;
            let letters = codes[i + 1..i + 1 + len]
                .iter()
                .map(|&c| Letter::new(u32::from(c >> 1) + 1, c & 1 == 1))
                .collect();
            traces.push(TraceWord { letters });
            i += 1 + len;
        }
        Self { traces }
    }
}

impl fmt::Display for ExpectationQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.traces.is_empty() {
            return f.write_str("1");
        }
        for (i, t) in self.traces.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Relabelling built up while reading traces in some order: original
/// generator -> (label, flipped).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Relabel {
    map: Vec<(u32, u16, bool)>,
    next: u16,
}

impl Relabel {
    fn get(&self, g: u32) -> Option<(u16, bool)> {
        self.map.iter().find(|e| e.0 == g).map(|e| (e.1, e.2))
    }

    /// Encodes one rotation of a trace, extending the relabelling.
    fn encode(&mut self, word: &[Letter], start: usize, out: &mut Vec<u16>) {
        let n = word.len();
        out.push(n as u16);
        for k in 0..n {
            let l = word[(start + k) % n];
            let (label, flip) = match self.get(l.generator) {
                Some(x) => x,
                None => {
                    let label = self.next;
                    self.next += 1;
                    // first occurrence reads un-inverted
                    self.map.push((l.generator, label, l.inverted));
                    (label, l.inverted)
                }
            };
            out.push((label << 1) | u16::from(l.inverted ^ flip));
        }
    }

    /// Drop generators no longer needed by the unread traces.
    fn restrict(&mut self, live: &BTreeSet<u32>) {
        self.map.retain(|e| live.contains(&e.0));
        self.map.sort_unstable();
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct ReadState {
    unread: Vec<bool>,
    relabel: Relabel,
}

/// Lexicographically least encoding over all reading orders, rotations
/// and relabellings.
///
/// Traces are read one at a time; at each step every (trace, rotation)
/// candidate is encoded under the relabelling so far, and only states
/// achieving the least block survive. Shorter traces sort first, so the
/// pivot of the recursion sits in a shortest trace.
fn canonicalize(traces: &[TraceWord]) -> CanonicalKey {
    let mut out: Vec<u16> = Vec::with_capacity(traces.len() + traces.iter().map(|t| t.len()).sum::<usize>());
    let mut states: BTreeSet<ReadState> = BTreeSet::new();
    states.insert(ReadState {
        unread: vec![true; traces.len()],
        relabel: Relabel { map: Vec::new(), next: 0 },
    });
    for _ in 0..traces.len() {
        let mut best: Option<Vec<u16>> = None;
        let mut next_states: BTreeSet<ReadState> = BTreeSet::new();
        for st in &states {
            for (i, t) in traces.iter().enumerate() {
                if !st.unread[i] {
                    continue;
                }
                for start in 0..t.len() {
                    let mut relabel = st.relabel.clone();
                    let mut block = Vec::with_capacity(t.len() + 1);
                    relabel.encode(&t.letters, start, &mut block);
                    let ord = best.as_ref().map(|b| block.cmp(b));
                    match ord {
                        Some(core::cmp::Ordering::Greater) => continue,
                        Some(core::cmp::Ordering::Less) | None => {
                            best = Some(block);
                            next_states.clear();
                        }
                        Some(core::cmp::Ordering::Equal) => {}
                    }
                    let mut unread = st.unread.clone();
                    unread[i] = false;
                    let live: BTreeSet<u32> = traces
                        .iter()
                        .zip(&unread)
                        .filter(|(_, &u)| u)
                        .flat_map(|(t, _)| t.letters.iter().map(|l| l.generator))
                        .collect();
                    relabel.restrict(&live);
                    next_states.insert(ReadState { unread, relabel });
                }
            }
        }
        out.extend(best.expect("an unread trace remains"));
        states = next_states;
    }
    CanonicalKey(out)
}
