use alloc::vec::Vec;

use super::word::{ExpectationQuery, Letter, TraceWord};
use crate::error::{Error, Result};

/// A parsed product of traces. Traces that reduce to `tr(1)` are pulled
/// out of the query; each contributes a factor `N` to the value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedExpr {
    pub query: ExpectationQuery,
    /// Number of traces that reduced to the identity.
    pub identity_traces: usize,
}

impl ParsedExpr {
    /// Constant multiplier `N^identity_traces` at a given `N`.
    pub fn multiplier(&self, n: u64) -> f64 {
        num_traits::Float::powi(n as f64, self.identity_traces as i32)
    }
}

/// Parses `tr(U1 U2') tr(U2 U1')`-style text.
///
/// Grammar: `expr := trace+`, `trace := "tr(" letter+ ")"`,
/// `letter := "U" integer ["'"]`, whitespace allowed between tokens.
pub fn parse_trace_expr(text: &str) -> Result<ParsedExpr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let mut traces = Vec::new();
    let mut identity_traces = 0;
    p.skip_ws();
    if p.at_end() {
        return Err(p.error("expected `tr(`"));
    }
    while !p.at_end() {
        let word = p.trace()?;
        if word.is_empty() {
            identity_traces += 1;
        } else {
            traces.push(word);
        }
        p.skip_ws();
    }
    Ok(ParsedExpr { query: ExpectationQuery::new(traces), identity_traces })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn error(&self, msg: &str) -> Error {
        let found = match self.peek() {
            Some(c) => alloc::format!("{msg}, found `{}`", c as char),
            None => alloc::format!("{msg}, found end of input"),
        };
        Error::Syntax { pos: self.pos, msg: found }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.src[self.pos..].starts_with(token.as_bytes()) {
            self.pos += token.len();
            Ok(())
        } else {
            Err(self.error(&alloc::format!("expected `{token}`")))
        }
    }

    fn trace(&mut self) -> Result<TraceWord> {
        let start = self.pos;
        self.expect("tr(")?;
        let mut letters = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b')') => {
                    self.pos += 1;
                    break;
                }
                Some(b'U') => letters.push(self.letter()?),
                _ => return Err(self.error("expected `U<index>` or `)`")),
            }
        }
        if letters.is_empty() {
            return Err(Error::EmptyTrace { pos: start });
        }
        Ok(TraceWord::reduced(letters))
    }

    fn letter(&mut self) -> Result<Letter> {
        self.expect("U")?;
        let digits_at = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits_at {
            return Err(self.error("expected generator index"));
        }
        let text = core::str::from_utf8(&self.src[digits_at..self.pos]).expect("ascii digits");
        let generator: u32 = text
            .parse()
            .ok()
            .filter(|&g| g >= 1)
            .ok_or_else(|| Error::Syntax {
                pos: digits_at,
                msg: alloc::format!("generator index must be a positive integer, got `{text}`"),
            })?;
        let inverted = self.peek() == Some(b'\'');
        if inverted {
            self.pos += 1;
        }
        Ok(Letter::new(generator, inverted))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn identity_trace_becomes_multiplier() {
        let e = parse_trace_expr("tr(U1 U1') ").unwrap();
        assert!(e.query.is_trivial());
        assert_eq!(e.identity_traces, 1);
        assert_eq!(e.multiplier(7), 7.0);
    }

    #[test]
    fn two_traces() {
        let e = parse_trace_expr("tr(U1 U2') tr(U2 U1')").unwrap();
        assert_eq!(e.query.trace_count(), 2);
        assert_eq!(e.query.m_total(), 4);
        assert_eq!(e.query.to_string(), "tr(U1 U2') tr(U2 U1')");
    }

    #[test]
    fn letters_without_spaces() {
        let e = parse_trace_expr("tr(U1U1)tr(U1'U1')").unwrap();
        assert_eq!(e.query.to_string(), "tr(U1 U1) tr(U1' U1')");
    }

    #[test]
    fn unterminated_trace() {
        let err = parse_trace_expr("tr(U1 U2").unwrap_err();
        assert!(matches!(err, Error::Syntax { pos: 8, .. }), "{err:?}");
    }

    #[test]
    fn empty_trace_rejected() {
        assert_eq!(parse_trace_expr("tr(U1) tr()").unwrap_err(), Error::EmptyTrace { pos: 7 });
    }

    #[test]
    fn other_syntax_errors() {
        assert!(matches!(parse_trace_expr(""), Err(Error::Syntax { pos: 0, .. })));
        assert!(matches!(parse_trace_expr("tr(U0)"), Err(Error::Syntax { pos: 4, .. })));
        assert!(matches!(parse_trace_expr("tr(V1)"), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(parse_trace_expr("tr(U)"), Err(Error::Syntax { pos: 4, .. })));
        assert!(matches!(parse_trace_expr("tr(U1) x"), Err(Error::Syntax { pos: 7, .. })));
    }
}
