use qexpander_core::sd::{
    evaluate_exact, evaluate_series, parse_trace_expr, ExpectationQuery, Letter, SeriesOptions, SeriesResult,
    TraceWord,
};

const CORPUS: &str = include_str!("data/sd_corpus.txt");

fn corpus() -> Vec<(String, String)> {
    CORPUS
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let mut parts = l.split('|').map(str::trim);
            (parts.next().unwrap().to_string(), parts.next().unwrap().to_string())
        })
        .collect()
}

fn query(text: &str) -> ExpectationQuery {
    parse_trace_expr(text).unwrap().query
}

fn series(q: &ExpectationQuery, n: u64, levels: usize) -> SeriesResult {
    evaluate_series(q, n, SeriesOptions { n_max: levels, tol: 0.0, ..Default::default() }).unwrap()
}

fn power_trace_pair(k: usize) -> String {
    let u = vec!["U1"; k].join(" ");
    let v = vec!["U1'"; k].join(" ");
    format!("tr({u}) tr({v})")
}

#[test]
fn corpus_is_large_enough() {
    let c = corpus();
    assert!(c.len() >= 8);
    for (text, _) in &c {
        let q = query(text);
        assert_eq!(q.trace_count(), 2, "{text}");
        assert!(q.m_total() <= 8, "{text}");
    }
}

#[test]
fn exact_values_are_pinned() {
    for (text, expected) in corpus() {
        let v = evaluate_exact(&query(&text)).unwrap();
        assert_eq!(v.to_canonical_string(), expected, "{text}");
    }
}

#[test]
fn power_traces_follow_character_theory() {
    // E |tr U^k|^2 = min(k, N); the generic-N answer is k
    for k in 1..=4 {
        let v = evaluate_exact(&query(&power_trace_pair(k))).unwrap();
        assert_eq!(v.as_constant().unwrap(), num_rational::BigRational::from_integer(k.into()));
    }
    // power sums of different cycle type are orthogonal
    for text in ["tr(U1 U1) tr(U1') tr(U1')", "tr(U1) tr(U1' U1')", "tr(U1 U1 U1) tr(U1' U1') tr(U1')"] {
        assert!(evaluate_exact(&query(text)).unwrap().is_zero(), "{text}");
    }
    // E |tr U|^4 = 2 for N >= 2
    assert_eq!(evaluate_exact(&query("tr(U1) tr(U1) tr(U1') tr(U1')")).unwrap().to_canonical_string(), "2/1");
}

#[test]
fn single_word_commutator() {
    // integrate U: E tr(U V U' V') = E |tr V|^2 / N = 1/N
    assert_eq!(evaluate_exact(&query("tr(U1 U2 U1' U2')")).unwrap().to_canonical_string(), "1/N");
}

#[test]
fn series_agrees_with_exact() {
    for (text, _) in corpus() {
        let q = query(&text);
        let exact = evaluate_exact(&q).unwrap().eval_f64(16);
        let s = series(&q, 16, 9);
        assert!((s.partial_total - exact).abs() <= 1e-9, "{text}: {} vs {exact}", s.partial_total);
    }
}

#[test]
fn squared_trace_levels_vanish() {
    let s = series(&query("tr(U1 U1) tr(U1' U1')"), 16, 12);
    assert_eq!(s.levels_computed, 12);
    assert_eq!(s.level_sums[0].to_canonical_string(), "2/1");
    assert!(s.level_sums[1..].iter().all(|x| x.is_zero()));
    assert!(s.level_values[1..].iter().all(|&x| x == 0.0));
}

#[test]
fn commutator_has_nonvanishing_higher_levels() {
    let s = series(&query("tr(U1 U2 U1' U2') tr(U2 U1 U2' U1')"), 16, 9);
    let sums: Vec<String> = s.level_sums.iter().map(|x| x.to_canonical_string()).collect();
    assert_eq!(sums, ["1/1", "0/1", "0/1", "1/N^2", "1/N^4", "0/1", "1/N^6", "0/1", "1/N^8"]);
}

fn audit(s: &SeriesResult, two_trace_rule: bool) {
    for t in &s.terminations {
        assert!(t.trivial_traces <= s.trivial_trace_ceiling(t.level), "{t:?}");
        if two_trace_rule {
            assert_ne!(t.level, 2, "{t:?}");
        }
    }
    let branching = (s.m_total - 1) as u128;
    for (i, &c) in s.level_term_counts.iter().enumerate() {
        assert!(c <= branching.pow(i as u32 + 1), "level {} count {c}", i + 1);
    }
}

#[test]
fn corpus_invariants_to_level_nine() {
    for (text, _) in corpus() {
        let s = series(&query(&text), 16, 9);
        assert_eq!(s.initial_traces, 2);
        for t in &s.terminations {
            assert!(t.trivial_traces <= (2 + t.level) / 3, "{text}: {t:?}");
        }
        audit(&s, true);
    }
}

#[test]
fn other_trace_counts_respect_generalized_ceiling() {
    for text in [
        "tr(U1 U2 U1' U2')",
        "tr(U1 U1 U2 U2 U1' U2')",
        "tr(U1 U1) tr(U1') tr(U1')",
        "tr(U1 U2) tr(U1') tr(U2')",
        "tr(U1) tr(U1) tr(U1') tr(U1')",
    ] {
        audit(&series(&query(text), 16, 9), false);
    }
    // four traces close at level 2 with two trivial traces, above floor((2 + 2) / 3)
    let s = series(&query("tr(U1) tr(U1) tr(U1') tr(U1')"), 16, 4);
    assert!(s.terminations.iter().any(|t| t.level == 2 && t.trivial_traces == 2));
}

#[test]
fn parse_rejects_malformed_input() {
    for bad in ["", "tr(", "tr()", "tr(U)", "tr(U1 U1", "U1", "tr(U1) x", "tr(U0)"] {
        assert!(parse_trace_expr(bad).is_err(), "{bad:?}");
    }
    let p = parse_trace_expr("tr(U1 U1') tr(U2)").unwrap();
    assert_eq!(p.identity_traces, 1);
    assert_eq!(p.multiplier(16), 16.0);
}

mod canonical {
    use super::*;
    use proptest::prelude::*;

    fn letters() -> impl Strategy<Value = Vec<Vec<(u32, bool)>>> {
        prop::collection::vec(prop::collection::vec((1u32..=3, any::<bool>()), 1..=4), 1..=3)
    }

    fn build(raw: &[Vec<(u32, bool)>]) -> ExpectationQuery {
        ExpectationQuery::new(
            raw.iter().map(|t| TraceWord::reduced(t.iter().map(|&(g, i)| Letter::new(g, i)))).collect(),
        )
    }

    proptest! {
        #[test]
        fn key_ignores_presentation(
            raw in letters(),
            rot in 0usize..4,
            perm in prop::sample::select(vec![[1u32, 2, 3], [2, 3, 1], [3, 1, 2], [2, 1, 3]]),
            flip in prop::array::uniform3(any::<bool>()),
            swap in any::<bool>(),
        ) {
            let q = build(&raw);
            let mut moved: Vec<Vec<(u32, bool)>> = raw
                .iter()
                .map(|t| {
                    let r = rot % t.len();
                    t[r..].iter().chain(&t[..r])
                        .map(|&(g, i)| (perm[g as usize - 1], i ^ flip[g as usize - 1]))
                        .collect()
                })
                .collect();
            if swap {
                moved.reverse();
            }
            let q2 = build(&moved);
            prop_assert_eq!(q.canonical_key(), q2.canonical_key());
            prop_assert_eq!(q.m_total(), q2.m_total());
        }

        #[test]
        fn canonical_form_is_idempotent(raw in letters()) {
            let c = build(&raw).canonical();
            prop_assert_eq!(c.canonical(), c.clone());
            prop_assert_eq!(ExpectationQuery::from_key(&c.canonical_key()), c);
        }
    }
}
