use num_complex::Complex64;

use super::{Factor, OperatorExpr, ParseError, Term};
use crate::fock::Mode;

const MAX_DEPTH: usize = 256;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Dagger,
    /// Decimal literal; `imag` when suffixed with `i`. `integer` keeps the
    /// digits-only spelling so exponents can be read exactly.
    Number {
        value: f64,
        imag: bool,
        integer: Option<String>,
    },
    ImagUnit,
    Mode(Mode),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();

    while let Some(&(start, ch)) = chars.peek() {
        let simple = match ch {
            c if c.is_whitespace() => {
                chars.next();
                continue;
            }
            '+' => Some(Tok::Plus),
            '-' | '\u{2212}' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '\'' | '\u{2020}' => Some(Tok::Dagger),
            _ => None,
        };
        if let Some(tok) = simple {
            chars.next();
            out.push(Token { tok, offset: start });
            continue;
        }

        if ch.is_ascii_digit() || ch == '.' {
            let digits = |mut i: usize| {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                i
            };
            let mut end = digits(start);
            let mut is_integer = true;
            if end < bytes.len() && bytes[end] == b'.' {
                is_integer = false;
                end = digits(end + 1);
            }
            if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
                let mut j = end + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                let k = digits(j);
                if k == j {
                    return Err(ParseError::new(
                        start,
                        "malformed scalar: exponent has no digits",
                    ));
                }
                is_integer = false;
                end = k;
            }
            let literal = &text[start..end];
            let value: f64 = literal
                .parse()
                .map_err(|_| ParseError::new(start, format!("malformed scalar '{literal}'")))?;
            let mut imag = false;
            if end < bytes.len() && bytes[end] == b'i' {
                imag = true;
                end += 1;
            }
            if end < bytes.len()
                && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_' || bytes[end] == b'.')
            {
                let stop = text[end..]
                    .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '.'))
                    .map_or(text.len(), |k| end + k);
                return Err(ParseError::new(
                    start,
                    format!("malformed scalar '{}'", &text[start..stop]),
                ));
            }
            let integer = (is_integer && !imag).then(|| literal.to_string());
            out.push(Token {
                tok: Tok::Number {
                    value,
                    imag,
                    integer,
                },
                offset: start,
            });
            while chars.peek().is_some_and(|&(i, _)| i < end) {
                chars.next();
            }
            continue;
        }

        if ch.is_ascii_alphabetic() || ch == '_' {
            let stop = text[start..]
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                .map_or(text.len(), |k| start + k);
            let ident = &text[start..stop];
            let tok = match ident {
                "i" => Tok::ImagUnit,
                "g1" => Tok::Mode(Mode::G1),
                "g2" => Tok::Mode(Mode::G2),
                "b" => Tok::Mode(Mode::M),
                other => return Err(ParseError::new(start, format!("unknown mode {other}"))),
            };
            out.push(Token { tok, offset: start });
            while chars.peek().is_some_and(|&(i, _)| i < stop) {
                chars.next();
            }
            continue;
        }

        return Err(ParseError::new(
            start,
            format!("unexpected character '{ch}'"),
        ));
    }
    out.push(Token {
        tok: Tok::End,
        offset: text.len(),
    });
    Ok(out)
}

/// A parsed multiplicand: a scalar factor and at most one operator factor.
struct Piece {
    coeff: Complex64,
    factor: Option<Factor>,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn descend(&mut self, offset: usize) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError::new(offset, "expression nested too deeply"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<OperatorExpr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    let mut t = self.term()?;
                    t.coeff = -t.coeff;
                    terms.push(t);
                }
                _ => break,
            }
        }
        Ok(OperatorExpr { terms })
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut coeff = Complex64::new(1.0, 0.0);
        let mut factors = Vec::new();
        loop {
            let piece = self.unary()?;
            coeff *= piece.coeff;
            factors.extend(piece.factor);
            if self.peek().tok == Tok::Star {
                self.bump();
            } else {
                break;
            }
        }
        Ok(Term { coeff, factors })
    }

    fn unary(&mut self) -> Result<Piece, ParseError> {
        if self.peek().tok == Tok::Minus {
            let t = self.bump();
            self.descend(t.offset)?;
            let mut p = self.unary()?;
            self.depth -= 1;
            p.coeff = -p.coeff;
            return Ok(p);
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Piece, ParseError> {
        let mut piece = self.primary()?;
        while self.peek().tok == Tok::Caret {
            self.bump();
            let t = self.bump();
            let exponent = match &t.tok {
                Tok::Number {
                    integer: Some(digits),
                    ..
                } => digits
                    .parse::<u32>()
                    .map_err(|_| ParseError::new(t.offset, "exponent too large"))?,
                _ => {
                    return Err(ParseError::new(
                        t.offset,
                        "expected non-negative integer exponent",
                    ))
                }
            };
            piece = match piece.factor {
                None => Piece {
                    coeff: piece.coeff.powu(exponent),
                    factor: None,
                },
                Some(f) => Piece {
                    coeff: piece.coeff.powu(exponent),
                    factor: Some(Factor::Power(Box::new(f), exponent)),
                },
            };
        }
        Ok(piece)
    }

    fn primary(&mut self) -> Result<Piece, ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::Number { value, imag, .. } => Ok(Piece {
                coeff: if imag {
                    Complex64::new(0.0, value)
                } else {
                    Complex64::new(value, 0.0)
                },
                factor: None,
            }),
            Tok::ImagUnit => Ok(Piece {
                coeff: Complex64::new(0.0, 1.0),
                factor: None,
            }),
            Tok::Mode(mode) => {
                let dagger = if self.peek().tok == Tok::Dagger {
                    self.bump();
                    true
                } else {
                    false
                };
                Ok(Piece {
                    coeff: Complex64::new(1.0, 0.0),
                    factor: Some(Factor::Mode { mode, dagger }),
                })
            }
            Tok::LParen => {
                self.descend(t.offset)?;
                let inner = self.expr()?;
                self.depth -= 1;
                let close = self.bump();
                if close.tok != Tok::RParen {
                    return Err(ParseError::new(
                        close.offset,
                        format!(
                            "unbalanced parentheses: '(' at offset {} is never closed",
                            t.offset
                        ),
                    ));
                }
                if self.peek().tok == Tok::Dagger {
                    return Err(ParseError::new(
                        self.peek().offset,
                        "dagger applies only to mode symbols",
                    ));
                }
                // Pure-scalar groups fold into the coefficient.
                if inner.terms.iter().all(|t| t.factors.is_empty()) {
                    let coeff = inner.terms.iter().map(|t| t.coeff).sum();
                    return Ok(Piece {
                        coeff,
                        factor: None,
                    });
                }
                Ok(Piece {
                    coeff: Complex64::new(1.0, 0.0),
                    factor: Some(Factor::Group(inner)),
                })
            }
            Tok::RParen => Err(ParseError::new(
                t.offset,
                "unbalanced parentheses: unexpected ')'",
            )),
            Tok::End => Err(ParseError::new(t.offset, "unexpected end of input")),
            Tok::Dagger => Err(ParseError::new(
                t.offset,
                "dagger applies only to mode symbols",
            )),
            other => Err(ParseError::new(
                t.offset,
                format!("unexpected {}", describe(&other)),
            )),
        }
    }
}

fn describe(tok: &Tok) -> &'static str {
    match tok {
        Tok::Plus => "'+'",
        Tok::Minus => "'-'",
        Tok::Star => "'*'",
        Tok::Caret => "'^'",
        Tok::LParen => "'('",
        Tok::RParen => "')'",
        Tok::Dagger => "dagger",
        Tok::Number { .. } | Tok::ImagUnit => "scalar",
        Tok::Mode(_) => "mode symbol",
        Tok::End => "end of input",
    }
}

pub(super) fn parse(text: &str) -> Result<OperatorExpr, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        depth: 0,
    };
    let expr = p.expr()?;
    let t = p.peek();
    match t.tok {
        Tok::End => Ok(expr),
        Tok::RParen => Err(ParseError::new(
            t.offset,
            "unbalanced parentheses: unexpected ')'",
        )),
        ref other => Err(ParseError::new(
            t.offset,
            format!("expected operator, found {}", describe(other)),
        )),
    }
}
