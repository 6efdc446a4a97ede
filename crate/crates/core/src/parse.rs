//! Line-oriented metric file parser.
//!
//! ```text
//! file    := line*
//! line    := "dim" INT | "name" IDENT | "coords" IDENT+ | "param" IDENT REAL
//!          | "domain" IDENT REAL REAL | "g" INT INT EXPR
//! EXPR    := term (('+'|'-') term)*
//! term    := factor (('*'|'/') factor)*
//! factor  := unary ('^' factor)?
//! unary   := '-' unary | atom
//! atom    := REAL | IDENT | IDENT '(' EXPR ')' | '(' EXPR ')'
//! ```
//!
//! `#` starts a comment that runs to the end of the line.

use crate::error::{Error, Result};
use crate::expr::{BinOp, Expr, MathFn};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Lexeme {
    tok: Tok,
    col: usize,
}

fn lex_line(line: &str, line_no: usize) -> Result<Vec<Lexeme>> {
    let mut out = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() => {
                i += 1;
            }
            '+' => {
                out.push(Lexeme { tok: Tok::Plus, col });
                i += 1;
            }
            '-' => {
                out.push(Lexeme { tok: Tok::Minus, col });
                i += 1;
            }
            '*' => {
                out.push(Lexeme { tok: Tok::Star, col });
                i += 1;
            }
            '/' => {
                out.push(Lexeme { tok: Tok::Slash, col });
                i += 1;
            }
            '^' => {
                out.push(Lexeme { tok: Tok::Caret, col });
                i += 1;
            }
            '(' => {
                out.push(Lexeme { tok: Tok::LParen, col });
                i += 1;
            }
            ')' => {
                out.push(Lexeme { tok: Tok::RParen, col });
                i += 1;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && chars[i] == '.' {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mark = i;
                    i += 1;
                    if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                        i += 1;
                    }
                    if i < chars.len() && chars[i].is_ascii_digit() {
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    } else {
                        i = mark; // bare identifier after the literal, not an exponent
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let v: f64 = text.parse().map_err(|_| Error::Syntax {
                    line: line_no,
                    col,
                    msg: format!("malformed number `{text}`"),
                })?;
                out.push(Lexeme { tok: Tok::Num(v), col });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Lexeme {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    col,
                });
            }
            other => {
                return Err(Error::Syntax {
                    line: line_no,
                    col,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

struct ExprParser<'a> {
    toks: &'a [Lexeme],
    pos: usize,
    line: usize,
}

impl<'a> ExprParser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|l| &l.tok)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|l| l.col)
            .unwrap_or(1)
    }

    fn bump(&mut self) -> Option<&Lexeme> {
        let l = self.toks.get(self.pos);
        self.pos += 1;
        l
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.line,
            col: self.col(),
            msg: msg.into(),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut e = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    e = Expr::Bin(BinOp::Add, Box::new(e), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    e = Expr::Bin(BinOp::Sub, Box::new(e), Box::new(self.term()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut e = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    e = Expr::Bin(BinOp::Mul, Box::new(e), Box::new(self.factor()?));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    e = Expr::Bin(BinOp::Div, Box::new(e), Box::new(self.factor()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.unary()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let exp = self.factor()?; // right-associative
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr> {
        if let Some(Tok::Minus) = self.peek() {
            self.bump();
            let inner = self.unary()?;
            // fold a literal so Display round-trips structurally
            return Ok(match inner {
                Expr::Num(v) => Expr::Num(-v),
                other => Expr::Neg(Box::new(other)),
            });
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        let lexeme = match self.bump() {
            Some(l) => l.clone(),
            None => return Err(self.err("unexpected end of expression")),
        };
        match lexeme.tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Ident(name) => {
                if let Some(Tok::LParen) = self.peek() {
                    let fun = MathFn::from_name(&name).ok_or(Error::UnknownIdentifier {
                        name: name.clone(),
                        line: self.line,
                        col: lexeme.col,
                    })?;
                    self.bump();
                    let arg = self.expr()?;
                    match self.bump() {
                        Some(l) if l.tok == Tok::RParen => {}
                        _ => return Err(self.err("expected `)`")),
                    }
                    Ok(Expr::Call(fun, Box::new(arg)))
                } else {
                    Ok(Expr::Ident(name))
                }
            }
            Tok::LParen => {
                let e = self.expr()?;
                match self.bump() {
                    Some(l) if l.tok == Tok::RParen => {}
                    _ => return Err(self.err("expected `)`")),
                }
                Ok(e)
            }
            other => Err(Error::Syntax {
                line: self.line,
                col: lexeme.col,
                msg: format!("unexpected token {other:?}"),
            }),
        }
    }
}

/// Parse an expression from the given tokens; must consume everything.
fn parse_expr_toks(toks: &[Lexeme], line: usize) -> Result<Expr> {
    let mut p = ExprParser { toks, pos: 0, line };
    let e = p.expr()?;
    if p.pos != toks.len() {
        return Err(p.err("trailing tokens after expression"));
    }
    Ok(e)
}

/// Parse a standalone expression (used by tests and tools).
pub fn parse_expr(text: &str) -> Result<Expr> {
    parse_expr_toks(&lex_line(text, 1)?, 1)
}

/// One metric file, before semantic validation.
#[derive(Debug, Default)]
pub struct RawMetric {
    pub name: Option<String>,
    pub dim: Option<usize>,
    pub coords: Option<Vec<String>>,
    pub params: Vec<(String, f64, usize)>,
    pub domains: Vec<(String, f64, f64, usize)>,
    pub components: Vec<(usize, usize, Expr, usize)>,
}

pub fn parse_raw(text: &str) -> Result<RawMetric> {
    let mut raw = RawMetric::default();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks = lex_line(line, line_no)?;
        if toks.is_empty() {
            continue;
        }
        let head = match &toks[0].tok {
            Tok::Ident(s) => s.clone(),
            other => {
                return Err(Error::Syntax {
                    line: line_no,
                    col: toks[0].col,
                    msg: format!("expected a directive, found {other:?}"),
                })
            }
        };
        let rest = &toks[1..];
        let syntax = |col: usize, msg: String| Error::Syntax {
            line: line_no,
            col,
            msg,
        };
        match head.as_str() {
            "dim" => {
                let v = expect_int(rest, 0, line_no)?;
                raw.dim = Some(v);
            }
            "name" => {
                let n = expect_ident(rest, 0, line_no)?;
                expect_len(rest, 1, line_no)?;
                raw.name = Some(n);
            }
            "coords" => {
                if rest.is_empty() {
                    return Err(syntax(toks[0].col, "coords needs at least one name".into()));
                }
                let mut names = Vec::new();
                for l in rest {
                    match &l.tok {
                        Tok::Ident(s) => names.push(s.clone()),
                        other => {
                            return Err(syntax(l.col, format!("expected coordinate name, found {other:?}")))
                        }
                    }
                }
                raw.coords = Some(names);
            }
            "param" => {
                let args = fold_negatives(rest);
                let n = expect_ident(&args, 0, line_no)?;
                let v = expect_real(&args, 1, line_no)?;
                expect_len(&args, 2, line_no)?;
                raw.params.push((n, v, line_no));
            }
            "domain" => {
                let args = fold_negatives(rest);
                let n = expect_ident(&args, 0, line_no)?;
                let lo = expect_real(&args, 1, line_no)?;
                let hi = expect_real(&args, 2, line_no)?;
                expect_len(&args, 3, line_no)?;
                raw.domains.push((n, lo, hi, line_no));
            }
            "g" => {
                let i = expect_int(rest, 0, line_no)?;
                let j = expect_int(rest, 1, line_no)?;
                if rest.len() < 3 {
                    return Err(syntax(toks[0].col, "g needs a component expression".into()));
                }
                let e = parse_expr_toks(&rest[2..], line_no)?;
                raw.components.push((i, j, e, line_no));
            }
            other => {
                return Err(syntax(toks[0].col, format!("unknown directive `{other}`")))
            }
        }
    }
    Ok(raw)
}

/// Merge a `-` directly followed by a literal into a negative literal, for
/// directive arguments (expressions keep the raw token stream).
fn fold_negatives(toks: &[Lexeme]) -> Vec<Lexeme> {
    let mut out: Vec<Lexeme> = Vec::with_capacity(toks.len());
    let mut i = 0;
    while i < toks.len() {
        if let (Tok::Minus, Some(Lexeme { tok: Tok::Num(v), .. })) =
            (&toks[i].tok, toks.get(i + 1))
        {
            out.push(Lexeme {
                tok: Tok::Num(-v),
                col: toks[i].col,
            });
            i += 2;
        } else {
            out.push(toks[i].clone());
            i += 1;
        }
    }
    out
}

fn expect_len(toks: &[Lexeme], n: usize, line: usize) -> Result<()> {
    if toks.len() > n {
        return Err(Error::Syntax {
            line,
            col: toks[n].col,
            msg: "trailing tokens".into(),
        });
    }
    Ok(())
}

fn expect_ident(toks: &[Lexeme], at: usize, line: usize) -> Result<String> {
    match toks.get(at) {
        Some(Lexeme {
            tok: Tok::Ident(s), ..
        }) => Ok(s.clone()),
        other => Err(Error::Syntax {
            line,
            col: other.map(|l| l.col).unwrap_or(1),
            msg: "expected an identifier".into(),
        }),
    }
}

fn expect_real(toks: &[Lexeme], at: usize, line: usize) -> Result<f64> {
    // allow a leading minus before the literal
    match toks.get(at) {
        Some(Lexeme { tok: Tok::Num(v), .. }) => Ok(*v),
        Some(Lexeme {
            tok: Tok::Minus, ..
        }) => match toks.get(at + 1) {
            Some(Lexeme { tok: Tok::Num(v), .. }) => Ok(-v),
            other => Err(Error::Syntax {
                line,
                col: other.map(|l| l.col).unwrap_or(1),
                msg: "expected a number".into(),
            }),
        },
        other => Err(Error::Syntax {
            line,
            col: other.map(|l| l.col).unwrap_or(1),
            msg: "expected a number".into(),
        }),
    }
}

fn expect_int(toks: &[Lexeme], at: usize, line: usize) -> Result<usize> {
    let v = expect_real(toks, at, line)?;
    if v.fract() != 0.0 || v < 0.0 {
        return Err(Error::Syntax {
            line,
            col: toks.get(at).map(|l| l.col).unwrap_or(1),
            msg: format!("expected a non-negative integer, found {v}"),
        });
    }
    Ok(v as usize)
}
