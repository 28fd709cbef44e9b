//! Text format for solids: one quadratic inequality per line or `;`.
//!
//! ```text
//! # the three solid hyperboloids
//! x^2 + y^2 - z^2 <= 1
//! y^2 + z^2 - x^2 <= 1; z^2 + x^2 - y^2 <= 1
//! ```
//!
//! Terms are products of decimal literals and the variables `x`, `y`, `z`
//! joined by `*`; a literal may be written directly before a variable
//! (`2x`). `xy` is rejected, write `x*y`. Either side of `<=` / `>=` may be
//! any polynomial of degree at most two.

use std::fmt;

use thiserror::Error;

use crate::quadric::{HalfSpace, ImplicitSolid, Polynomial, QuadricForm};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} (constraint {constraint}, line {line}, column {column})")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// 1-based index of the offending constraint, 0 when not tied to one.
    pub constraint: usize,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    Lexical(String),
    Degree(u32),
    Syntax(String),
    Empty,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Lexical(s) => write!(f, "lexical error: {s}"),
            ParseErrorKind::Degree(d) => write!(f, "term of degree {d} exceeds 2"),
            ParseErrorKind::Syntax(s) => write!(f, "syntax error: {s}"),
            ParseErrorKind::Empty => write!(f, "no constraints"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok {
    Num(f64),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    Le,
    Ge,
    Sep,
}

#[derive(Debug, Clone, Copy)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    for (li, line) in src.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        let at = |tok, i: usize| Spanned {
            tok,
            line: li + 1,
            column: i + 1,
        };
        let lex_err = |msg: String, i: usize| ParseError {
            kind: ParseErrorKind::Lexical(msg),
            constraint: 0,
            line: li + 1,
            column: i + 1,
        };
        while i < chars.len() {
            let c = chars[i];
            match c {
                _ if c.is_whitespace() => i += 1,
                '+' => {
                    out.push(at(Tok::Plus, i));
                    i += 1;
                }
                '-' => {
                    out.push(at(Tok::Minus, i));
                    i += 1;
                }
                '*' => {
                    out.push(at(Tok::Star, i));
                    i += 1;
                }
                '^' => {
                    out.push(at(Tok::Caret, i));
                    i += 1;
                }
                ';' => {
                    out.push(at(Tok::Sep, i));
                    i += 1;
                }
                '≤' => {
                    out.push(at(Tok::Le, i));
                    i += 1;
                }
                '≥' => {
                    out.push(at(Tok::Ge, i));
                    i += 1;
                }
                '<' | '>' => {
                    if chars.get(i + 1) != Some(&'=') {
                        return Err(lex_err(format!("expected '{c}=' (only closed inequalities)"), i));
                    }
                    out.push(at(if c == '<' { Tok::Le } else { Tok::Ge }, i));
                    i += 2;
                }
                _ if c.is_ascii_digit() || c == '.' => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                        i += 1;
                    }
                    // exponent only when digits follow, so `2e` is not swallowed
                    if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                        let mut j = i + 1;
                        if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                            j += 1;
                        }
                        if j < chars.len() && chars[j].is_ascii_digit() {
                            while j < chars.len() && chars[j].is_ascii_digit() {
                                j += 1;
                            }
                            i = j;
                        }
                    }
                    let text: String = chars[start..i].iter().collect();
                    let v: f64 = text
                        .parse()
                        .map_err(|_| lex_err(format!("bad number '{text}'"), start))?;
                    out.push(at(Tok::Num(v), start));
                }
                _ if c.is_alphabetic() => {
                    let start = i;
                    while i < chars.len() && chars[i].is_alphanumeric() && !chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let word: String = chars[start..i].iter().collect();
                    let var = match word.as_str() {
                        "x" => 0,
                        "y" => 1,
                        "z" => 2,
                        _ => return Err(lex_err(format!("unknown identifier '{word}'"), start)),
                    };
                    out.push(at(Tok::Var(var), start));
                }
                _ => return Err(lex_err(format!("unexpected character '{c}'"), i)),
            }
        }
        out.push(Spanned {
            tok: Tok::Sep,
            line: li + 1,
            column: chars.len() + 1,
        });
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    index: usize,
    end: (usize, usize),
}

impl Parser<'_> {
    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).map(|s| s.tok)
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        let (line, column) = self
            .toks
            .get(self.pos)
            .map(|s| (s.line, s.column))
            .unwrap_or(self.end);
        ParseError {
            kind,
            constraint: self.index,
            line,
            column,
        }
    }

    fn constraint(&mut self) -> Result<Polynomial, ParseError> {
        let lhs = self.poly()?;
        let cmp = self.peek();
        let ge = match cmp {
            Some(Tok::Le) => false,
            Some(Tok::Ge) => true,
            _ => return Err(self.err(ParseErrorKind::Syntax("expected '<=' or '>='".into()))),
        };
        self.pos += 1;
        let rhs = self.poly()?;
        if self.pos < self.toks.len() {
            return Err(self.err(ParseErrorKind::Syntax("unexpected token after polynomial".into())));
        }
        Ok(if ge { rhs - lhs } else { lhs - rhs })
    }

    /// Folds a run of `+` / `-` tokens into a sign.
    fn signs(&mut self, mut sign: f64) -> f64 {
        loop {
            match self.peek() {
                Some(Tok::Plus) => {}
                Some(Tok::Minus) => sign = -sign,
                _ => return sign,
            }
            self.pos += 1;
        }
    }

    fn poly(&mut self) -> Result<Polynomial, ParseError> {
        let mut p = Polynomial::default();
        let mut sign = self.signs(1.0);
        loop {
            self.term(sign, &mut p)?;
            match self.peek() {
                Some(Tok::Plus | Tok::Minus) => sign = self.signs(1.0),
                _ => return Ok(p),
            }
        }
    }

    fn term(&mut self, sign: f64, p: &mut Polynomial) -> Result<(), ParseError> {
        let start = self.pos;
        let mut coef = sign;
        let mut powers = [0u32; 3];
        loop {
            let after_number = match self.peek() {
                Some(Tok::Num(v)) => {
                    coef *= v;
                    self.pos += 1;
                    true
                }
                Some(Tok::Var(i)) => {
                    self.pos += 1;
                    let mut e = 1;
                    if self.peek() == Some(Tok::Caret) {
                        self.pos += 1;
                        match self.peek() {
                            Some(Tok::Num(v)) if v >= 0.0 && v.fract() == 0.0 && v < 1e6 => {
                                e = v as u32;
                                self.pos += 1;
                            }
                            _ => {
                                return Err(self.err(ParseErrorKind::Syntax(
                                    "exponent must be a nonnegative integer".into(),
                                )))
                            }
                        }
                    }
                    powers[i] += e;
                    false
                }
                _ => {
                    return Err(self.err(ParseErrorKind::Syntax(
                        "expected a number or a variable".into(),
                    )))
                }
            };
            match self.peek() {
                Some(Tok::Star) => self.pos += 1,
                Some(Tok::Var(_)) if after_number => {}
                _ => break,
            }
        }
        let degree: u32 = powers.iter().sum();
        if degree > 2 {
            self.pos = start;
            return Err(self.err(ParseErrorKind::Degree(degree)));
        }
        let slot = match powers {
            [0, 0, 0] => &mut p.c,
            [1, 0, 0] => &mut p.x,
            [0, 1, 0] => &mut p.y,
            [0, 0, 1] => &mut p.z,
            [2, 0, 0] => &mut p.xx,
            [0, 2, 0] => &mut p.yy,
            [0, 0, 2] => &mut p.zz,
            [1, 1, 0] => &mut p.xy,
            [1, 0, 1] => &mut p.xz,
            [0, 1, 1] => &mut p.yz,
            _ => unreachable!(),
        };
        *slot += coef;
        Ok(())
    }
}

/// Parses solid source text.
pub fn parse(src: &str) -> Result<ImplicitSolid, ParseError> {
    let toks = lex(src)?;
    let mut constraints = Vec::new();
    for chunk in toks.split(|s| s.tok == Tok::Sep) {
        if chunk.is_empty() {
            continue;
        }
        let mut parser = Parser {
            toks: chunk,
            pos: 0,
            index: constraints.len() + 1,
            end: chunk
                .last()
                .map(|s| (s.line, s.column + 1))
                .unwrap_or((0, 0)),
        };
        let poly = parser.constraint()?;
        constraints.push(HalfSpace::new(QuadricForm::from_polynomial(&poly)));
    }
    ImplicitSolid::new(constraints).map_err(|_| ParseError {
        kind: ParseErrorKind::Empty,
        constraint: 0,
        line: 1,
        column: 1,
    })
}

/// Canonical text for a polynomial, e.g. `x^2 + y^2 - z^2 - 1`.
pub fn format_polynomial(p: &Polynomial) -> String {
    let mut out = String::new();
    for (mono, c) in p.terms() {
        if c == 0.0 {
            continue;
        }
        let mag = c.abs();
        match (out.is_empty(), c < 0.0) {
            (true, true) => out.push('-'),
            (true, false) => {}
            (false, true) => out.push_str(" - "),
            (false, false) => out.push_str(" + "),
        }
        if mono.is_empty() {
            out.push_str(&mag.to_string());
        } else if mag == 1.0 {
            out.push_str(mono);
        } else {
            out.push_str(&format!("{mag}*{mono}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Canonical source: one `<poly> <= 0` line per constraint.
pub fn format(s: &ImplicitSolid) -> String {
    s.constraints()
        .iter()
        .map(|h| format!("{} <= 0\n", format_polynomial(&h.form.polynomial())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const REVENGE: &str = "x^2 + y^2 - z^2 <= 1; y^2 + z^2 - x^2 <= 1; z^2 + x^2 - y^2 <= 1";

    #[test]
    fn parses_the_three_hyperboloids() {
        let s = parse(REVENGE).unwrap();
        assert_eq!(s.constraints().len(), 3);
        for h in s.constraints() {
            assert_eq!(h.form.eval([1.0, 1.0, 1.0]), 0.0);
        }
    }

    #[test]
    fn point_solid() {
        let s = parse("x^2 + y^2 + z^2 <= 0").unwrap();
        assert!(s.contains([0.0, 0.0, 0.0]));
        assert!(!s.contains([0.0, 0.0, 1e-6]));
    }

    #[test]
    fn degree_error_reports_constraint() {
        let e = parse("x^3 <= 1").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Degree(3));
        assert_eq!(e.constraint, 1);

        let e = parse("x <= 1\nx^2*y >= 0").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Degree(3));
        assert_eq!((e.constraint, e.line, e.column), (2, 2, 1));
    }

    #[test]
    fn lexical_errors_carry_position() {
        let e = parse("x^2 + xy <= 1").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Lexical(_)));
        assert_eq!((e.line, e.column), (1, 7));

        let e = parse("x <= 1\n  y $ 2 <= 0").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Lexical(_)));
        assert_eq!((e.line, e.column), (2, 5));

        assert!(matches!(
            parse("x < 1").unwrap_err().kind,
            ParseErrorKind::Lexical(_)
        ));
    }

    #[test]
    fn empty_input() {
        for src in ["", "   \n# only a comment\n;;"] {
            assert_eq!(parse(src).unwrap_err().kind, ParseErrorKind::Empty);
        }
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(parse("x^2 + 1").unwrap_err().kind, ParseErrorKind::Syntax(_)));
        assert!(matches!(parse("x <= 1 <= 2").unwrap_err().kind, ParseErrorKind::Syntax(_)));
        assert!(matches!(parse("x 2 <= 1").unwrap_err().kind, ParseErrorKind::Syntax(_)));
        assert!(matches!(parse("x^y <= 1").unwrap_err().kind, ParseErrorKind::Syntax(_)));
    }

    #[test]
    fn implicit_coefficient_and_ge() {
        let a = parse("2x + 3*y*z >= x^2 - 1").unwrap();
        let b = parse("x^2 - 2*x - 3 * y * z - 1 <= 0").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rhs_polynomial_moves_left() {
        let a = parse("x^2+y^2 <= z^2+1").unwrap();
        let b = parse("x^2 + y^2 - z^2 - 1 <= 0").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn comments_and_separators() {
        let s = parse("# header\nx^2 <= 1 # trailing\n\n; y^2 <= 1;z^2<=1").unwrap();
        assert_eq!(s.constraints().len(), 3);
    }

    #[test]
    fn format_is_canonical() {
        let text = format(&parse(REVENGE).unwrap());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "x^2 + y^2 - z^2 - 1 <= 0");
        assert_eq!(lines[1], "-x^2 + y^2 + z^2 - 1 <= 0");

        let ge = parse("1 >= x^2 + 2.5*x*y + 0.1z").unwrap();
        assert_eq!(format(&ge), "x^2 + 2.5*x*y + 0.1*z - 1 <= 0\n");
        assert_eq!(format(&parse("0 <= 0").unwrap()), "0 <= 0\n");
    }

    #[test]
    fn repeated_signs_fold() {
        let a = parse("x + -2*y - -3 <= 0").unwrap();
        let b = parse("x - 2*y + 3 <= 0").unwrap();
        assert_eq!(a, b);
        assert_eq!(parse("--x <= 1").unwrap(), parse("x <= 1").unwrap());
    }
}
