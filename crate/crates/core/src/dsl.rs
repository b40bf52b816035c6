//! The expression language for principal series, and the canonical printers.
//!
//! ```text
//! series   := (factor ("x" factor)*)? "|x" anchor
//! factor   := atom ("*" atom)*
//! atom     := "nu" ("^" rational)? | "1" | sym ("^" int)?
//! rational := int | "{" int "/" int "}"
//! anchor   := "omega0" | "so1"
//! ```
//!
//! `x` is the induced product, `|x` the symplectic (or orthogonal) action on
//! the anchor. Whitespace is insignificant; symbol declarations are
//! out-of-band (one symbol table per session). Parse errors carry byte
//! offsets and the expected tokens.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::characters::{Character, SymbolTable};
use crate::irreducibility::{GroupKind, PrincipalSeries};
use crate::jacquet::JacquetExpansion;
use crate::ring::Word;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DslError {
    #[error("syntax error at byte {offset}: expected {expected}, found {found}")]
    Syntax {
        offset: usize,
        expected: String,
        found: String,
    },
    #[error("unknown symbol `{name}` at byte {offset}")]
    UnknownSymbol { offset: usize, name: String },
    #[error("malformed rational at byte {offset}")]
    MalformedRational { offset: usize },
}

impl DslError {
    pub fn offset(&self) -> usize {
        match self {
            DslError::Syntax { offset, .. }
            | DslError::UnknownSymbol { offset, .. }
            | DslError::MalformedRational { offset } => *offset,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Nu,
    Times,
    Rtimes,
    Star,
    Caret,
    LBrace,
    RBrace,
    Slash,
    Int(i64),
    Ident(String),
    Omega0,
    So1,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Nu => write!(f, "`nu`"),
            Tok::Times => write!(f, "`x`"),
            Tok::Rtimes => write!(f, "`|x`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Caret => write!(f, "`^`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::RBrace => write!(f, "`}}`"),
            Tok::Slash => write!(f, "`/`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Omega0 => write!(f, "`omega0`"),
            Tok::So1 => write!(f, "`so1`"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

fn lex(input: &str) -> Result<Vec<(Tok, usize)>, DslError> {
    let bytes = input.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'*' => {
                toks.push((Tok::Star, i));
                i += 1;
            }
            b'^' => {
                toks.push((Tok::Caret, i));
                i += 1;
            }
            b'{' => {
                toks.push((Tok::LBrace, i));
                i += 1;
            }
            b'}' => {
                toks.push((Tok::RBrace, i));
                i += 1;
            }
            b'/' => {
                toks.push((Tok::Slash, i));
                i += 1;
            }
            b'|' => {
                if bytes.get(i + 1) == Some(&b'x') {
                    toks.push((Tok::Rtimes, i));
                    i += 2;
                } else {
                    return Err(DslError::Syntax {
                        offset: i,
                        expected: "`|x`".to_string(),
                        found: "`|`".to_string(),
                    });
                }
            }
            b'-' | b'0'..=b'9' => {
                let start = i;
                if c == b'-' {
                    i += 1;
                    if !bytes.get(i).is_some_and(u8::is_ascii_digit) {
                        return Err(DslError::Syntax {
                            offset: start,
                            expected: "an integer".to_string(),
                            found: "`-`".to_string(),
                        });
                    }
                }
                while bytes.get(i).is_some_and(u8::is_ascii_digit) {
                    i += 1;
                }
                let text = &input[start..i];
                let n = text
                    .parse::<i64>()
                    .map_err(|_| DslError::MalformedRational { offset: start })?;
                toks.push((Tok::Int(n), start));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while bytes
                    .get(i)
                    .is_some_and(|&b| b.is_ascii_alphanumeric() || b == b'_')
                {
                    i += 1;
                }
                let word = &input[start..i];
                let tok = match word {
                    "nu" => Tok::Nu,
                    "x" => Tok::Times,
                    "omega0" => Tok::Omega0,
                    "so1" => Tok::So1,
                    _ => Tok::Ident(word.to_string()),
                };
                toks.push((tok, start));
            }
            _ => {
                return Err(DslError::Syntax {
                    offset: i,
                    expected: "`nu`, a symbol, `x`, `|x`, `*`, `^` or an integer".to_string(),
                    found: format!("`{}`", &input[i..i + 1]),
                });
            }
        }
    }
    toks.push((Tok::End, input.len()));
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    table: &'a Arc<SymbolTable>,
}

impl<'a> Parser<'a> {
    fn new(input: &str, table: &'a Arc<SymbolTable>) -> Result<Self, DslError> {
        Ok(Parser {
            toks: lex(input)?,
            pos: 0,
            table,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), DslError> {
        if self.peek() == &tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn unexpected(&self, expected: &str) -> DslError {
        DslError::Syntax {
            offset: self.offset(),
            expected: expected.to_string(),
            found: self.peek().to_string(),
        }
    }

    fn series(&mut self) -> Result<PrincipalSeries, DslError> {
        let mut chars = Vec::new();
        if self.peek() != &Tok::Rtimes {
            chars.push(self.factor()?);
            while self.eat(&Tok::Times) {
                chars.push(self.factor()?);
            }
        }
        self.expect(Tok::Rtimes)?;
        let group = match self.bump() {
            (Tok::Omega0, _) => GroupKind::Metaplectic,
            (Tok::So1, _) => GroupKind::SoOdd,
            (tok, offset) => {
                return Err(DslError::Syntax {
                    offset,
                    expected: "`omega0` or `so1`".to_string(),
                    found: tok.to_string(),
                })
            }
        };
        self.expect(Tok::End)?;
        Ok(PrincipalSeries::new(chars, group).expect("one table"))
    }

    fn factors(&mut self) -> Result<Vec<Character>, DslError> {
        let mut chars = Vec::new();
        if self.peek() != &Tok::End {
            chars.push(self.factor()?);
            while self.eat(&Tok::Times) {
                chars.push(self.factor()?);
            }
        }
        self.expect(Tok::End)?;
        Ok(chars)
    }

    fn factor(&mut self) -> Result<Character, DslError> {
        let mut c = self.atom()?;
        while self.eat(&Tok::Star) {
            let next = self.atom()?;
            c = c.mul(&next).expect("one table");
        }
        Ok(c)
    }

    fn atom(&mut self) -> Result<Character, DslError> {
        match self.bump() {
            (Tok::Nu, _) => {
                let e = if self.eat(&Tok::Caret) {
                    self.rational()?
                } else {
                    Rational64::one()
                };
                Ok(Character::nu(self.table, e))
            }
            (Tok::Int(1), _) => Ok(Character::trivial(self.table)),
            (Tok::Ident(name), offset) => {
                let sym = Character::symbol(self.table, &name)
                    .map_err(|_| DslError::UnknownSymbol { offset, name })?;
                if self.eat(&Tok::Caret) {
                    let k = self.int()?;
                    Ok(sym.pow(k))
                } else {
                    Ok(sym)
                }
            }
            (tok, offset) => Err(DslError::Syntax {
                offset,
                expected: "`nu`, a symbol or `1`".to_string(),
                found: tok.to_string(),
            }),
        }
    }

    fn int(&mut self) -> Result<i64, DslError> {
        match self.bump() {
            (Tok::Int(n), _) => Ok(n),
            (tok, offset) => Err(DslError::Syntax {
                offset,
                expected: "an integer".to_string(),
                found: tok.to_string(),
            }),
        }
    }

    fn rational(&mut self) -> Result<Rational64, DslError> {
        match self.bump() {
            (Tok::Int(n), _) => Ok(Rational64::from_integer(n)),
            (Tok::LBrace, brace) => {
                let n = self.int()?;
                self.expect(Tok::Slash)?;
                let d = self.int()?;
                self.expect(Tok::RBrace)?;
                if d == 0 {
                    return Err(DslError::MalformedRational { offset: brace });
                }
                Ok(Rational64::new(n, d))
            }
            (tok, offset) => Err(DslError::Syntax {
                offset,
                expected: "an integer or `{p/q}`".to_string(),
                found: tok.to_string(),
            }),
        }
    }
}

/// Parse a principal series, e.g. `nu^{1/2}*u x u |x omega0`.
pub fn parse_series(
    input: &str,
    table: &Arc<SymbolTable>,
) -> Result<PrincipalSeries, DslError> {
    Parser::new(input, table)?.series()
}

/// Parse a bare product of factors (no anchor) as a word with the given
/// genuineness. Empty input is the empty word.
pub fn parse_word(
    input: &str,
    table: &Arc<SymbolTable>,
    genuine: bool,
) -> Result<Word, DslError> {
    let chars = Parser::new(input, table)?.factors()?;
    Ok(Word::new(genuine, chars))
}

fn anchor_str(group: GroupKind) -> &'static str {
    match group {
        GroupKind::Metaplectic => "omega0",
        GroupKind::SoOdd => "so1",
    }
}

pub fn group_str(group: GroupKind) -> &'static str {
    match group {
        GroupKind::Metaplectic => "metaplectic",
        GroupKind::SoOdd => "so_odd",
    }
}

/// Canonical text form; `parse_series` of the output returns the input
/// series exactly (factor order preserved).
pub fn render_series(ps: &PrincipalSeries) -> String {
    let anchor = anchor_str(ps.group());
    if ps.chars().is_empty() {
        return format!("|x {anchor}");
    }
    let factors: Vec<String> = ps.chars().iter().map(|c| c.to_string()).collect();
    format!("{} |x {anchor}", factors.join(" x "))
}

/// Output format for renderings of expansions and verdicts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

fn coeff_json(c: &BigInt) -> serde_json::Value {
    match c.to_i64() {
        Some(n) => serde_json::Value::from(n),
        None => serde_json::Value::from(c.to_string()),
    }
}

#[derive(Serialize)]
struct TermJson {
    coeff: serde_json::Value,
    left: Vec<String>,
    right: Vec<String>,
}

#[derive(Serialize)]
struct ExpansionJson {
    series: String,
    group: &'static str,
    terms: Vec<TermJson>,
}

/// Render a Jacquet-module expansion, one term per line in text mode.
pub fn render_expansion(exp: &JacquetExpansion, format: OutputFormat) -> String {
    match format {
        OutputFormat::Text => {
            let mut lines = Vec::new();
            for (t, c) in exp.value().terms() {
                if c.is_one() {
                    lines.push(t.to_string());
                } else {
                    lines.push(format!("{c} {t}"));
                }
            }
            lines.join("\n")
        }
        OutputFormat::Json => {
            let terms = exp
                .value()
                .terms()
                .map(|(t, c)| TermJson {
                    coeff: coeff_json(c),
                    left: t.left.chars().iter().map(|ch| ch.to_string()).collect(),
                    right: t.right.chars().iter().map(|ch| ch.to_string()).collect(),
                })
                .collect();
            let out = ExpansionJson {
                series: render_series(exp.source()),
                group: group_str(exp.source().group()),
                terms,
            };
            serde_json::to_string(&out).expect("serializable")
        }
    }
}
