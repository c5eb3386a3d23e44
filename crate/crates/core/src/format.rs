//! Text formats for terms and combinators.
//!
//! * De Bruijn: `term := NAT | "\" WS term | "(" term WS term ")"`
//! * S-expression: `n | (lam t) | (app t t)`
//! * JSON: `{"idx": n} | {"app": [t, t]} | {"abs": t}`
//! * Combinators: `"S" | "K" | "(" c " " c ")"`

use std::fmt;
use std::str::FromStr;

use serde_json::Value;

use crate::term::Term;
use crate::tree::Combinator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Format {
    DeBruijn,
    Sexp,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "debruijn" => Ok(Format::DeBruijn),
            "sexp" => Ok(Format::Sexp),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected debruijn, sexp or json)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the input.
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        ParseError {
            offset,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at offset {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for ParseError {}

enum Piece<'a> {
    Term(&'a Term),
    Text(&'static str),
}

pub fn render(t: &Term, format: Format) -> String {
    let mut out = String::new();
    render_into(t, format, &mut out);
    out
}

pub fn render_into(t: &Term, format: Format, out: &mut String) {
    use std::fmt::Write;
    let mut stack = vec![Piece::Term(t)];
    while let Some(piece) = stack.pop() {
        match piece {
            Piece::Text(s) => out.push_str(s),
            Piece::Term(Term::Index(k)) => match format {
                Format::Json => {
                    let _ = write!(out, "{{\"idx\":{k}}}");
                }
                _ => {
                    let _ = write!(out, "{k}");
                }
            },
            Piece::Term(Term::Abs(body)) => {
                match format {
                    Format::DeBruijn => out.push_str("\\ "),
                    Format::Sexp => {
                        out.push_str("(lam ");
                        stack.push(Piece::Text(")"));
                    }
                    Format::Json => {
                        out.push_str("{\"abs\":");
                        stack.push(Piece::Text("}"));
                    }
                }
                stack.push(Piece::Term(body));
            }
            Piece::Term(Term::App(l, r)) => {
                let (open, sep, close) = match format {
                    Format::DeBruijn => ("(", " ", ")"),
                    Format::Sexp => ("(app ", " ", ")"),
                    Format::Json => ("{\"app\":[", ",", "]}"),
                };
                out.push_str(open);
                stack.push(Piece::Text(close));
                stack.push(Piece::Term(r));
                stack.push(Piece::Text(sep));
                stack.push(Piece::Term(l));
            }
        }
    }
}

pub fn parse(text: &str, format: Format) -> Result<Term, ParseError> {
    match format {
        Format::DeBruijn => parse_debruijn(text),
        Format::Sexp => parse_sexp(text),
        Format::Json => parse_json(text),
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    /// Skips whitespace, returning how many bytes were skipped.
    fn skip_ws(&mut self) -> usize {
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
        self.pos - start
    }

    fn nat(&mut self) -> Result<u64, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        digits
            .parse()
            .map_err(|_| ParseError::new(start, "index out of range"))
    }

    fn starts_with(&self, s: &str) -> bool {
        self.bytes[self.pos..].starts_with(s.as_bytes())
    }

    fn describe(&self) -> String {
        match self.peek() {
            None => "end of input".to_string(),
            Some(b) => format!("`{}`", b as char),
        }
    }
}

pub fn parse_debruijn(text: &str) -> Result<Term, ParseError> {
    enum Frame {
        Abs,
        Open,
        Left(Term),
    }
    let mut cur = Cursor::new(text);
    let mut frames: Vec<Frame> = Vec::new();
    cur.skip_ws();
    loop {
        // read the start of a term
        let mut done = match cur.peek() {
            Some(b) if b.is_ascii_digit() => Term::Index(cur.nat()?),
            Some(b'\\') => {
                cur.pos += 1;
                cur.skip_ws();
                frames.push(Frame::Abs);
                continue;
            }
            _ if cur.starts_with("λ") => {
                cur.pos += "λ".len();
                cur.skip_ws();
                frames.push(Frame::Abs);
                continue;
            }
            Some(b'(') => {
                cur.pos += 1;
                cur.skip_ws();
                frames.push(Frame::Open);
                continue;
            }
            _ => return Err(ParseError::new(cur.pos, format!("expected a term, found {}", cur.describe()))),
        };
        // reduce the completed term against the pending frames
        loop {
            match frames.pop() {
                None => {
                    cur.skip_ws();
                    if cur.peek().is_some() {
                        return Err(ParseError::new(cur.pos, format!("trailing input {}", cur.describe())));
                    }
                    return Ok(done);
                }
                Some(Frame::Abs) => done = Term::abs(done),
                Some(Frame::Open) => {
                    if cur.skip_ws() == 0 {
                        return Err(ParseError::new(cur.pos, format!("expected whitespace, found {}", cur.describe())));
                    }
                    frames.push(Frame::Left(done));
                    break;
                }
                Some(Frame::Left(left)) => {
                    cur.skip_ws();
                    if cur.peek() != Some(b')') {
                        return Err(ParseError::new(cur.pos, format!("expected `)`, found {}", cur.describe())));
                    }
                    cur.pos += 1;
                    done = Term::app(left, done);
                }
            }
        }
    }
}

pub fn parse_sexp(text: &str) -> Result<Term, ParseError> {
    enum Frame {
        Lam,
        AppLeft,
        AppRight(Term),
    }
    let mut cur = Cursor::new(text);
    let mut frames: Vec<Frame> = Vec::new();
    loop {
        cur.skip_ws();
        let mut done = match cur.peek() {
            Some(b) if b.is_ascii_digit() => Term::Index(cur.nat()?),
            Some(b'(') => {
                cur.pos += 1;
                cur.skip_ws();
                let head_start = cur.pos;
                while matches!(cur.peek(), Some(b) if b.is_ascii_alphabetic()) {
                    cur.pos += 1;
                }
                match &cur.bytes[head_start..cur.pos] {
                    b"lam" => frames.push(Frame::Lam),
                    b"app" => frames.push(Frame::AppLeft),
                    _ => return Err(ParseError::new(head_start, "expected `lam` or `app`")),
                }
                continue;
            }
            _ => return Err(ParseError::new(cur.pos, format!("expected a term, found {}", cur.describe()))),
        };
        loop {
            match frames.pop() {
                None => {
                    cur.skip_ws();
                    if cur.peek().is_some() {
                        return Err(ParseError::new(cur.pos, format!("trailing input {}", cur.describe())));
                    }
                    return Ok(done);
                }
                Some(Frame::AppLeft) => {
                    frames.push(Frame::AppRight(done));
                    break;
                }
                Some(Frame::Lam) => {
                    close_paren(&mut cur)?;
                    done = Term::abs(done);
                }
                Some(Frame::AppRight(left)) => {
                    close_paren(&mut cur)?;
                    done = Term::app(left, done);
                }
            }
        }
    }
}

fn close_paren(cur: &mut Cursor) -> Result<(), ParseError> {
    cur.skip_ws();
    if cur.peek() != Some(b')') {
        return Err(ParseError::new(cur.pos, format!("expected `)`, found {}", cur.describe())));
    }
    cur.pos += 1;
    Ok(())
}

pub fn parse_json(text: &str) -> Result<Term, ParseError> {
    let mut de = serde_json::Deserializer::from_str(text);
    de.disable_recursion_limit();
    let value: Value = serde::Deserialize::deserialize(&mut de).map_err(json_error(text))?;
    de.end().map_err(json_error(text))?;
    term_from_json(&value).map_err(|m| ParseError::new(0, m))
}

fn json_error(text: &str) -> impl Fn(serde_json::Error) -> ParseError + '_ {
    move |e| {
        // serde_json reports 1-based line/column
        let offset = text
            .lines()
            .take(e.line().saturating_sub(1))
            .map(|l| l.len() + 1)
            .sum::<usize>()
            + e.column().saturating_sub(1);
        ParseError::new(offset, e.to_string())
    }
}

pub fn term_from_json(value: &Value) -> Result<Term, String> {
    let obj = value
        .as_object()
        .filter(|o| o.len() == 1)
        .ok_or_else(|| format!("expected a single-key object, found {value}"))?;
    let (key, inner) = obj.iter().next().unwrap();
    match key.as_str() {
        "idx" => inner
            .as_u64()
            .map(Term::Index)
            .ok_or_else(|| format!("index must be a natural number, found {inner}")),
        "abs" => Ok(Term::abs(term_from_json(inner)?)),
        "app" => match inner.as_array().map(Vec::as_slice) {
            Some([l, r]) => Ok(Term::app(term_from_json(l)?, term_from_json(r)?)),
            _ => Err(format!("`app` expects a two-element array, found {inner}")),
        },
        other => Err(format!("unknown constructor `{other}`")),
    }
}

pub fn render_combinator(c: &Combinator) -> String {
    enum Piece<'a> {
        Comb(&'a Combinator),
        Text(&'static str),
    }
    let mut out = String::new();
    let mut stack = vec![Piece::Comb(c)];
    while let Some(piece) = stack.pop() {
        match piece {
            Piece::Text(s) => out.push_str(s),
            Piece::Comb(Combinator::S) => out.push('S'),
            Piece::Comb(Combinator::K) => out.push('K'),
            Piece::Comb(Combinator::App(l, r)) => {
                out.push('(');
                stack.push(Piece::Text(")"));
                stack.push(Piece::Comb(r));
                stack.push(Piece::Text(" "));
                stack.push(Piece::Comb(l));
            }
        }
    }
    out
}

pub fn parse_combinator(text: &str) -> Result<Combinator, ParseError> {
    let mut cur = Cursor::new(text);
    let mut pending: Vec<Option<Combinator>> = Vec::new();
    cur.skip_ws();
    loop {
        let mut done = match cur.peek() {
            Some(b'S') => Combinator::S,
            Some(b'K') => Combinator::K,
            Some(b'(') => {
                cur.pos += 1;
                cur.skip_ws();
                pending.push(None);
                continue;
            }
            _ => return Err(ParseError::new(cur.pos, format!("expected a combinator, found {}", cur.describe()))),
        };
        cur.pos += 1;
        loop {
            match pending.pop() {
                None => {
                    cur.skip_ws();
                    if cur.peek().is_some() {
                        return Err(ParseError::new(cur.pos, format!("trailing input {}", cur.describe())));
                    }
                    return Ok(done);
                }
                Some(None) => {
                    if cur.skip_ws() == 0 {
                        return Err(ParseError::new(cur.pos, format!("expected whitespace, found {}", cur.describe())));
                    }
                    pending.push(Some(done));
                    break;
                }
                Some(Some(left)) => {
                    close_paren(&mut cur)?;
                    done = Combinator::app(left, done);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn debruijn_examples() {
        let t = Term::abs(Term::app(Term::var(0), Term::var(1)));
        assert_eq!(render(&t, Format::DeBruijn), "\\ (0 1)");
        assert_eq!(parse_debruijn("\\ \\ 1").unwrap(), Term::abs(Term::abs(Term::var(1))));
        let err = parse_debruijn("(0").unwrap_err();
        assert_eq!(err.offset, 2);
        assert_eq!(parse_debruijn("λ 0").unwrap(), Term::abs(Term::var(0)));
        assert_eq!(
            parse_debruijn("(\\ 0 1)").unwrap(),
            Term::app(Term::abs(Term::var(0)), Term::var(1))
        );
    }

    #[test]
    fn debruijn_errors() {
        assert_eq!(parse_debruijn("").unwrap_err().offset, 0);
        assert_eq!(parse_debruijn("(0 1").unwrap_err().offset, 4);
        assert_eq!(parse_debruijn("0 1").unwrap_err().offset, 2);
        assert_eq!(parse_debruijn("(0 x)").unwrap_err().offset, 3);
        assert_eq!(parse_debruijn("99999999999999999999999").unwrap_err().offset, 0);
    }

    #[test]
    fn sexp_and_json_examples() {
        let t = Term::abs(Term::app(Term::var(0), Term::var(1)));
        assert_eq!(render(&t, Format::Sexp), "(lam (app 0 1))");
        assert_eq!(render(&t, Format::Json), r#"{"abs":{"app":[{"idx":0},{"idx":1}]}}"#);
        assert_eq!(parse_sexp(" ( lam (app 0  1) ) ").unwrap(), t);
        assert_eq!(parse_json(r#"{ "abs" : {"app": [{"idx":0}, {"idx":1}]} }"#).unwrap(), t);
        assert!(parse_sexp("(lam 0").is_err());
        assert!(parse_sexp("(foo 0)").is_err());
        assert!(parse_json(r#"{"app":[{"idx":0}]}"#).is_err());
        assert!(parse_json(r#"{"idx":-1}"#).is_err());
    }

    #[test]
    fn combinator_format() {
        let c = parse_combinator("((S K) K)").unwrap();
        assert_eq!(render_combinator(&c), "((S K) K)");
        assert!(parse_combinator("(S K").is_err());
        assert!(parse_combinator("(SK)").is_err());
    }

    #[test]
    fn deep_terms_render_and_parse() {
        let t = Term::abs_n(200_000, Term::var(7));
        for format in [Format::DeBruijn, Format::Sexp] {
            let text = render(&t, format);
            let back = parse(&text, format).unwrap();
            assert_eq!(back.openness(), 0);
            assert_eq!(back.node_count(), 200_001);
        }
        // the JSON reader recurses through serde_json
        let t = Term::abs_n(2_000, Term::var(7));
        let back = parse(&render(&t, Format::Json), Format::Json).unwrap();
        assert_eq!(back.node_count(), 2_001);
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = (0u64..40).prop_map(Term::var);
        leaf.prop_recursive(10, 128, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Term::abs),
                (inner.clone(), inner).prop_map(|(l, r)| Term::app(l, r)),
            ]
        })
    }

    fn arb_combinator() -> impl Strategy<Value = Combinator> {
        prop_oneof![Just(Combinator::S), Just(Combinator::K)].prop_recursive(8, 64, 2, |inner| {
            (inner.clone(), inner).prop_map(|(l, r)| Combinator::app(l, r))
        })
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(t in arb_term()) {
            for format in [Format::DeBruijn, Format::Sexp, Format::Json] {
                prop_assert_eq!(&parse(&render(&t, format), format).unwrap(), &t);
            }
        }

        #[test]
        fn combinator_round_trip(c in arb_combinator()) {
            prop_assert_eq!(parse_combinator(&render_combinator(&c)).unwrap(), c);
        }
    }
}
