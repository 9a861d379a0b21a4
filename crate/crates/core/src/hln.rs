//! Front end for the high-level notation.
//!
//! A program is a `;`-separated sequence of actions, optionally terminated by
//! `()`:
//!
//! ```text
//! bind(Gd, Gbg, G, 1.0); bind(R, L, RL, 3.32e-6);
//! activateAnddissociate(G, RL, Ga, Gbg, 1.0e-5); dissociate(RL, R, L, 0.01);
//! hydrolyze(Ga, Gd, 0.11); degrade(R, 4e-4); degrade(RL, 4e-3)
//! ```
//!
//! Whitespace (including newlines) is insignificant between tokens. Keywords
//! are case-sensitive and species names may not collide with them.

use std::fmt;

use thiserror::Error;

use crate::error::{Error, Result};
use crate::species::{is_identifier, SpeciesName};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActionKind {
    Bind,
    Dimerize,
    Activate,
    ActivateAndDissociate,
    Phosphorylate,
    Dissociate,
    Degrade,
    Hydrolyze,
}

impl ActionKind {
    pub const ALL: [ActionKind; 8] = [
        ActionKind::Bind,
        ActionKind::Dimerize,
        ActionKind::Activate,
        ActionKind::ActivateAndDissociate,
        ActionKind::Phosphorylate,
        ActionKind::Dissociate,
        ActionKind::Degrade,
        ActionKind::Hydrolyze,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            ActionKind::Bind => "bind",
            ActionKind::Dimerize => "dimerize",
            ActionKind::Activate => "activate",
            ActionKind::ActivateAndDissociate => "activateAnddissociate",
            ActionKind::Phosphorylate => "phosphorylate",
            ActionKind::Dissociate => "dissociate",
            ActionKind::Degrade => "degrade",
            ActionKind::Hydrolyze => "hydrolyze",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.keyword() == word)
    }

    /// Number of species operands (the rate is not counted).
    pub fn arity(self) -> usize {
        match self {
            ActionKind::Degrade => 1,
            ActionKind::Hydrolyze => 2,
            ActionKind::ActivateAndDissociate => 4,
            ActionKind::Bind
            | ActionKind::Dimerize
            | ActionKind::Activate
            | ActionKind::Phosphorylate
            | ActionKind::Dissociate => 3,
        }
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

pub(crate) fn is_keyword(word: &str) -> bool {
    ActionKind::from_keyword(word).is_some()
}

/// One action of a program: a kind, its species operands and a discrete
/// rate in s⁻¹.
#[derive(Clone, Debug, PartialEq)]
pub struct Action {
    kind: ActionKind,
    operands: Vec<SpeciesName>,
    rate: f64,
}

impl Action {
    pub fn new(kind: ActionKind, operands: Vec<SpeciesName>, rate: f64) -> Result<Self> {
        if operands.len() != kind.arity() {
            return Err(Error::InvalidAction(format!(
                "{kind} takes {} species, got {}",
                kind.arity(),
                operands.len()
            )));
        }
        if let Some(bad) = operands.iter().find(|s| is_keyword(s.as_str())) {
            return Err(Error::InvalidAction(format!(
                "species name {bad} collides with an action keyword"
            )));
        }
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidAction(format!(
                "rate must be positive and finite, got {rate}"
            )));
        }
        Ok(Self {
            kind,
            operands,
            rate,
        })
    }

    pub fn kind(&self) -> ActionKind {
        self.kind
    }

    pub fn operands(&self) -> &[SpeciesName] {
        &self.operands
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.kind)?;
        for s in &self.operands {
            write!(f, "{s}, ")?;
        }
        write!(f, "{})", format_rate(self.rate))
    }
}

/// An ordered, possibly empty, sequence of actions.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Process {
    actions: Vec<Action>,
}

impl Process {
    pub fn new(actions: Vec<Action>) -> Self {
        Self { actions }
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Every species named by the program, in first-mention order.
    pub fn species(&self) -> Vec<SpeciesName> {
        let mut seen = Vec::new();
        for s in self.actions.iter().flat_map(|a| a.operands()) {
            if !seen.contains(s) {
                seen.push(s.clone());
            }
        }
        seen
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.actions.is_empty() {
            return f.write_str("()");
        }
        for (i, a) in self.actions.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Canonical text for a rate. Output is the shortest representation that
/// parses back to the same `f64`.
pub fn format_rate(rate: f64) -> String {
    let magnitude = rate.abs();
    if (1e-3..1e6).contains(&magnitude) {
        let s = rate.to_string();
        if s.contains('.') {
            s
        } else {
            format!("{s}.0")
        }
    } else {
        format!("{rate:e}")
    }
}

/// Canonical textual form. The trailing `()` terminator is omitted unless the
/// program is empty.
pub fn format_program(process: &Process) -> String {
    process.to_string()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnknownAction(String),
    Arity {
        action: ActionKind,
        expected: usize,
        found: usize,
    },
    NonNumericRate(String),
    NonPositiveRate(String),
    MalformedIdentifier(String),
    ReservedIdentifier(String),
    Unexpected {
        expected: &'static str,
        found: String,
    },
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnknownAction(w) => write!(f, "unknown action `{w}`"),
            ParseErrorKind::Arity {
                action,
                expected,
                found,
            } => write!(
                f,
                "`{action}` takes {expected} species and a rate ({} arguments), found {found}",
                expected + 1
            ),
            ParseErrorKind::NonNumericRate(w) => write!(f, "rate `{w}` is not a number"),
            ParseErrorKind::NonPositiveRate(w) => {
                write!(f, "rate `{w}` must be positive and finite")
            }
            ParseErrorKind::MalformedIdentifier(w) => write!(f, "malformed species name `{w}`"),
            ParseErrorKind::ReservedIdentifier(w) => {
                write!(f, "species name `{w}` collides with an action keyword")
            }
            ParseErrorKind::Unexpected { expected, found } => {
                write!(f, "expected {expected}, found {found}")
            }
        }
    }
}

/// Syntax error with a 1-based source position.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok<'a> {
    LParen,
    RParen,
    Comma,
    Semi,
    Word(&'a str),
    Eof,
}

impl Tok<'_> {
    fn describe(&self) -> String {
        match self {
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Word(w) => format!("`{w}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

fn tokenize(source: &str) -> Vec<(Tok<'_>, Pos)> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut column = 1;
    let mut word_start: Option<(usize, Pos)> = None;

    for (idx, ch) in source.char_indices() {
        let punct = match ch {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            _ => None,
        };
        let boundary = punct.is_some() || ch.is_whitespace();
        if boundary {
            if let Some((start, pos)) = word_start.take() {
                out.push((Tok::Word(&source[start..idx]), pos));
            }
            if let Some(tok) = punct {
                out.push((tok, Pos { line, column }));
            }
        } else if word_start.is_none() {
            word_start = Some((idx, Pos { line, column }));
        }
        if ch == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    if let Some((start, pos)) = word_start {
        out.push((Tok::Word(&source[start..]), pos));
    }
    out.push((Tok::Eof, Pos { line, column }));
    out
}

struct Parser<'a> {
    toks: Vec<(Tok<'a>, Pos)>,
    at: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok<'a> {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok<'a>, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error(pos: Pos, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: pos.line,
            column: pos.column,
            kind,
        }
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        Self::error(
            self.pos(),
            ParseErrorKind::Unexpected {
                expected,
                found: self.peek().describe(),
            },
        )
    }

    fn expect(&mut self, tok: Tok<'static>, expected: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn terminator(&mut self) -> Result<(), ParseError> {
        self.expect(Tok::LParen, "`()`")?;
        self.expect(Tok::RParen, "`)` closing the empty process")?;
        self.expect(Tok::Eof, "end of input after `()`")
    }

    fn program(&mut self) -> Result<Process, ParseError> {
        let mut actions = Vec::new();
        match self.peek() {
            Tok::Eof => return Ok(Process::default()),
            Tok::LParen => {
                self.terminator()?;
                return Ok(Process::default());
            }
            _ => {}
        }
        loop {
            actions.push(self.action()?);
            match self.peek() {
                Tok::Eof => break,
                Tok::Semi => {
                    self.bump();
                    match self.peek() {
                        Tok::Eof => break,
                        Tok::LParen => {
                            self.terminator()?;
                            break;
                        }
                        _ => {}
                    }
                }
                _ => return Err(self.unexpected("`;` or end of input")),
            }
        }
        Ok(Process::new(actions))
    }

    fn action(&mut self) -> Result<Action, ParseError> {
        let (tok, kw_pos) = self.bump();
        let word = match tok {
            Tok::Word(w) => w,
            other => {
                return Err(Self::error(
                    kw_pos,
                    ParseErrorKind::Unexpected {
                        expected: "an action",
                        found: other.describe(),
                    },
                ))
            }
        };
        let kind = ActionKind::from_keyword(word)
            .ok_or_else(|| Self::error(kw_pos, ParseErrorKind::UnknownAction(word.to_owned())))?;

        self.expect(Tok::LParen, "`(` after action name")?;
        let mut args: Vec<(&str, Pos)> = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                let pos = self.pos();
                match self.peek().clone() {
                    Tok::Word(w) => {
                        self.bump();
                        args.push((w, pos));
                    }
                    _ => return Err(self.unexpected("an argument")),
                }
                match self.peek() {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::RParen => break,
                    _ => return Err(self.unexpected("`,` or `)`")),
                }
            }
        }
        self.expect(Tok::RParen, "`)`")?;

        if args.len() != kind.arity() + 1 {
            return Err(Self::error(
                kw_pos,
                ParseErrorKind::Arity {
                    action: kind,
                    expected: kind.arity(),
                    found: args.len(),
                },
            ));
        }
        let (rate_text, rate_pos) = args.pop().expect("arity checked");
        let mut operands = Vec::with_capacity(args.len());
        for (w, pos) in args {
            if !is_identifier(w) {
                return Err(Self::error(
                    pos,
                    ParseErrorKind::MalformedIdentifier(w.to_owned()),
                ));
            }
            if is_keyword(w) {
                return Err(Self::error(
                    pos,
                    ParseErrorKind::ReservedIdentifier(w.to_owned()),
                ));
            }
            operands.push(SpeciesName::new(w).expect("identifier checked"));
        }
        let rate = parse_rate(rate_text).map_err(|kind| Self::error(rate_pos, kind))?;
        Ok(Action {
            kind,
            operands,
            rate,
        })
    }
}

fn parse_rate(text: &str) -> Result<f64, ParseErrorKind> {
    let numeric_start = text
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_digit() || matches!(c, '.' | '+' | '-'));
    // `str::parse::<f64>` also accepts "inf" and "NaN"; those are not numerals here.
    let value = if numeric_start && !text.to_ascii_lowercase().contains("inf") {
        text.parse::<f64>().ok().filter(|v| !v.is_nan())
    } else {
        None
    };
    match value {
        None => Err(ParseErrorKind::NonNumericRate(text.to_owned())),
        Some(v) if v.is_finite() && v > 0.0 => Ok(v),
        Some(_) => Err(ParseErrorKind::NonPositiveRate(text.to_owned())),
    }
}

/// Parses a program in the high-level notation.
pub fn parse_program(source: &str) -> Result<Process, ParseError> {
    let mut parser = Parser {
        toks: tokenize(source),
        at: 0,
    };
    parser.program()
}

impl std::str::FromStr for Process {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_program(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::species::sp;
    use proptest::prelude::*;

    const GPROTEIN: &str = "bind(Gd, Gbg, G, 1.0); bind(R, L, RL, 3.32e-6);
        activateAnddissociate(G, RL, Ga, Gbg,1.0e-5);  dissociate(RL, R, L, 0.01);
        hydrolyze(Ga, Gd, 0.11); degrade(R, 4e-4); degrade(RL, 4e-3)";

    fn err_kind(src: &str) -> ParseErrorKind {
        parse_program(src).unwrap_err().kind
    }

    #[test]
    fn single_degrade() {
        let p = parse_program("degrade(R, 4e-4)").unwrap();
        assert_eq!(
            p,
            Process::new(vec![
                Action::new(ActionKind::Degrade, vec![sp("R")], 4e-4).unwrap()
            ])
        );
    }

    #[test]
    fn empty_forms() {
        assert!(parse_program("()").unwrap().is_empty());
        assert!(parse_program("  \n ( ) ").unwrap().is_empty());
        assert!(parse_program("").unwrap().is_empty());
    }

    #[test]
    fn two_binds_in_order() {
        let p = parse_program("bind(Gd, Gbg, G, 1.0); bind(R, L, RL, 3.32e-6)").unwrap();
        let a = p.actions();
        assert_eq!(a.len(), 2);
        assert_eq!(a[0].kind(), ActionKind::Bind);
        assert_eq!(a[0].operands(), &[sp("Gd"), sp("Gbg"), sp("G")]);
        assert_eq!(a[0].rate(), 1.0);
        assert_eq!(a[1].operands(), &[sp("R"), sp("L"), sp("RL")]);
        assert_eq!(a[1].rate(), 3.32e-6);
    }

    #[test]
    fn terminator_is_optional() {
        let bare = parse_program("degrade(R, 4e-4); degrade(RL, 4e-3)").unwrap();
        let semi = parse_program("degrade(R, 4e-4); degrade(RL, 4e-3);").unwrap();
        let term = parse_program("degrade(R, 4e-4); degrade(RL, 4e-3); ()").unwrap();
        assert_eq!(bare, semi);
        assert_eq!(bare, term);
    }

    #[test]
    fn gprotein_program_parses() {
        let p = parse_program(GPROTEIN).unwrap();
        let kinds: Vec<_> = p.actions().iter().map(Action::kind).collect();
        assert_eq!(
            kinds,
            vec![
                ActionKind::Bind,
                ActionKind::Bind,
                ActionKind::ActivateAndDissociate,
                ActionKind::Dissociate,
                ActionKind::Hydrolyze,
                ActionKind::Degrade,
                ActionKind::Degrade,
            ]
        );
        assert_eq!(parse_program(&format_program(&p)).unwrap(), p);
    }

    #[test]
    fn formatting() {
        let p = parse_program("degrade(R, 4e-4)").unwrap();
        assert_eq!(format_program(&p), "degrade(R, 4e-4)");
        assert_eq!(format_program(&Process::default()), "()");
        let p = parse_program("bind(Gd, Gbg, G, 1.0); hydrolyze(Ga,Gd,0.11)").unwrap();
        assert_eq!(
            format_program(&p),
            "bind(Gd, Gbg, G, 1.0); hydrolyze(Ga, Gd, 0.11)"
        );
    }

    #[test]
    fn rate_notations() {
        for (text, v) in [("4e-4", 4e-4), ("0.01", 0.01), ("1.0E-5", 1e-5), ("2", 2.0)] {
            let p = parse_program(&format!("degrade(A, {text})")).unwrap();
            assert_eq!(p.actions()[0].rate(), v);
        }
    }

    #[test]
    fn arity_error() {
        let e = parse_program("bind(a, b)").unwrap_err();
        assert_eq!((e.line, e.column), (1, 1));
        assert_eq!(
            e.kind,
            ParseErrorKind::Arity {
                action: ActionKind::Bind,
                expected: 3,
                found: 2
            }
        );
        assert!(matches!(
            err_kind("degrade()"),
            ParseErrorKind::Arity { found: 0, .. }
        ));
    }

    #[test]
    fn unknown_action_reports_position() {
        let e = parse_program("degrade(R, 4e-4);\n  synthesize(R, 4.0)").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert_eq!(e.kind, ParseErrorKind::UnknownAction("synthesize".into()));
    }

    #[test]
    fn keywords_are_case_sensitive() {
        assert!(matches!(
            err_kind("Bind(a, b, c, 1)"),
            ParseErrorKind::UnknownAction(_)
        ));
        assert!(matches!(
            err_kind("activateAndDissociate(a, b, c, d, 1)"),
            ParseErrorKind::UnknownAction(_)
        ));
    }

    #[test]
    fn rate_errors() {
        assert!(matches!(
            err_kind("degrade(R, fast)"),
            ParseErrorKind::NonNumericRate(_)
        ));
        assert!(matches!(
            err_kind("degrade(R, inf)"),
            ParseErrorKind::NonNumericRate(_)
        ));
        assert!(matches!(
            err_kind("degrade(R, NaN)"),
            ParseErrorKind::NonNumericRate(_)
        ));
        assert!(matches!(
            err_kind("degrade(R, 1e-)"),
            ParseErrorKind::NonNumericRate(_)
        ));
        assert!(matches!(
            err_kind("degrade(R, 0)"),
            ParseErrorKind::NonPositiveRate(_)
        ));
        assert!(matches!(
            err_kind("degrade(R, -1.5)"),
            ParseErrorKind::NonPositiveRate(_)
        ));
        assert!(matches!(
            err_kind("degrade(R, 1e400)"),
            ParseErrorKind::NonPositiveRate(_)
        ));
    }

    #[test]
    fn identifier_errors() {
        let e = parse_program("hydrolyze(Ga, 9d, 0.11)").unwrap_err();
        assert_eq!(e.column, 15);
        assert_eq!(e.kind, ParseErrorKind::MalformedIdentifier("9d".into()));
        assert!(matches!(
            err_kind("degrade(R-L, 1)"),
            ParseErrorKind::MalformedIdentifier(_)
        ));
        assert!(matches!(
            err_kind("hydrolyze(bind, a, 1)"),
            ParseErrorKind::ReservedIdentifier(_)
        ));
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(
            err_kind("degrade(R, 1) degrade(L, 1)"),
            ParseErrorKind::Unexpected { .. }
        ));
        assert!(matches!(
            err_kind("degrade(R, 1); () degrade(L, 1)"),
            ParseErrorKind::Unexpected { .. }
        ));
        assert!(matches!(
            err_kind("degrade(R 1)"),
            ParseErrorKind::Unexpected { .. }
        ));
        assert!(matches!(
            err_kind("degrade(R, 1"),
            ParseErrorKind::Unexpected { .. }
        ));
        assert!(matches!(
            err_kind("; degrade(R, 1)"),
            ParseErrorKind::Unexpected { .. }
        ));
    }

    #[test]
    fn action_constructor_validates() {
        assert!(Action::new(ActionKind::Bind, vec![sp("a")], 1.0).is_err());
        assert!(Action::new(ActionKind::Degrade, vec![sp("a")], 0.0).is_err());
        assert!(Action::new(ActionKind::Degrade, vec![sp("a")], f64::NAN).is_err());
        assert!(Action::new(ActionKind::Degrade, vec![sp("degrade")], 1.0).is_err());
    }

    #[test]
    fn format_rate_round_trips_edge_values() {
        for v in [
            1.0,
            4e-4,
            4e-3,
            1e-3,
            999_999.9,
            1e6,
            3.32e-6,
            0.1 + 0.2,
            f64::MIN_POSITIVE,
        ] {
            assert_eq!(format_rate(v).parse::<f64>().unwrap(), v, "{v}");
        }
        assert_eq!(format_rate(1.0), "1.0");
        assert_eq!(format_rate(3.32e-6), "3.32e-6");
    }

    pub(crate) fn arb_action() -> impl Strategy<Value = Action> {
        let names = prop::sample::select(vec!["a", "b", "c", "Gd", "RL", "x_1"]);
        (
            prop::sample::select(ActionKind::ALL.to_vec()),
            prop::collection::vec(names, 4),
            1e-9f64..1e7,
        )
            .prop_map(|(kind, names, rate)| {
                let ops = names[..kind.arity()].iter().map(|n| sp(n)).collect();
                Action::new(kind, ops, rate).unwrap()
            })
    }

    proptest! {
        #[test]
        fn round_trip(actions in prop::collection::vec(arb_action(), 0..12)) {
            let p = Process::new(actions);
            prop_assert_eq!(parse_program(&format_program(&p)).unwrap(), p);
        }

        #[test]
        fn grammar_strings_parse(
            actions in prop::collection::vec(arb_action(), 1..6),
            term in any::<bool>(),
            sep in prop::sample::select(vec![";", " ;\n", ";\t "]),
        ) {
            let body: Vec<String> = actions.iter().map(|a| a.to_string()).collect();
            let mut src = body.join(sep);
            if term {
                src.push_str("; ()");
            }
            prop_assert_eq!(parse_program(&src).unwrap(), Process::new(actions));
        }

        #[test]
        fn unknown_keywords_rejected(word in "[a-z][a-zA-Z]{0,12}") {
            prop_assume!(ActionKind::from_keyword(&word).is_none());
            let src = format!("{word}(a, b, c, 1.0)");
            let rejected = matches!(
                parse_program(&src).unwrap_err().kind,
                ParseErrorKind::UnknownAction(_)
            );
            prop_assert!(rejected);
        }
    }
}
