use std::sync::Arc;

use num_complex::Complex64;

use crate::elliptic::Lattice;

use super::{Expr, ParseDiagnostic};

/// Parses an expression in `z` with conventional precedence
/// (`^` > unary minus > `*` `/` > `+` `-`), right-associative `^`,
/// `i` as the imaginary unit and `name(expr)` function calls.
pub fn parse(text: &str) -> Result<Expr, ParseDiagnostic> {
    parse_with_lattice(text, None)
}

/// Like [`parse`], but makes the Weierstrass functions `wp`, `wp_prime`,
/// `wzeta`, `wsigma` available on the given lattice.
pub fn parse_with_lattice(
    text: &str,
    lattice: Option<Arc<Lattice>>,
) -> Result<Expr, ParseDiagnostic> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        input_len: text.len(),
        lattice,
    };
    let e = p.expression()?;
    match p.peek() {
        None => Ok(e),
        Some(t) => Err(diag(t.offset, "unexpected trailing input")),
    }
}

fn diag(byte_offset: usize, message: impl Into<String>) -> ParseDiagnostic {
    ParseDiagnostic {
        byte_offset,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Number(f64, bool), // value, imaginary?
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseDiagnostic> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let offset = i;
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
            }
            b'+' => {
                tokens.push(Token { kind: TokenKind::Plus, offset });
                i += 1;
            }
            b'-' => {
                tokens.push(Token { kind: TokenKind::Minus, offset });
                i += 1;
            }
            b'*' => {
                tokens.push(Token { kind: TokenKind::Star, offset });
                i += 1;
            }
            b'/' => {
                tokens.push(Token { kind: TokenKind::Slash, offset });
                i += 1;
            }
            b'^' => {
                tokens.push(Token { kind: TokenKind::Caret, offset });
                i += 1;
            }
            b'(' => {
                tokens.push(Token { kind: TokenKind::LParen, offset });
                i += 1;
            }
            b')' => {
                tokens.push(Token { kind: TokenKind::RParen, offset });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                // Exponent only when a complete [eE][+-]?digits follows.
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let value: f64 = text[start..i]
                    .parse()
                    .map_err(|_| diag(start, format!("invalid number `{}`", &text[start..i])))?;
                let imaginary = if i < bytes.len() && bytes[i] == b'i' {
                    // `2i` is a literal, but `2if` would be number then ident.
                    let after = i + 1;
                    let next_alnum = after < bytes.len()
                        && (bytes[after].is_ascii_alphanumeric() || bytes[after] == b'_');
                    if next_alnum {
                        false
                    } else {
                        i += 1;
                        true
                    }
                } else {
                    false
                };
                tokens.push(Token {
                    kind: TokenKind::Number(value, imaginary),
                    offset: start,
                });
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Ident(text[start..i].to_string()),
                    offset: start,
                });
            }
            _ => {
                return Err(diag(
                    offset,
                    format!("unexpected character `{}`", &text[i..].chars().next().unwrap()),
                ))
            }
        }
    }
    if tokens.is_empty() {
        return Err(diag(0, "empty expression"));
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    input_len: usize,
    lattice: Option<Arc<Lattice>>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eof_offset(&self) -> usize {
        self.input_len
    }

    fn expression(&mut self) -> Result<Expr, ParseDiagnostic> {
        let mut acc = self.term()?;
        while let Some(t) = self.peek() {
            match t.kind {
                TokenKind::Plus => {
                    self.bump();
                    acc = Expr::add(acc, self.term()?);
                }
                TokenKind::Minus => {
                    self.bump();
                    acc = Expr::sub(acc, self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Expr, ParseDiagnostic> {
        let mut acc = self.unary()?;
        while let Some(t) = self.peek() {
            match t.kind {
                TokenKind::Star => {
                    self.bump();
                    acc = Expr::mul(acc, self.unary()?);
                }
                TokenKind::Slash => {
                    self.bump();
                    acc = Expr::div(acc, self.unary()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ParseDiagnostic> {
        if let Some(t) = self.peek() {
            if t.kind == TokenKind::Minus {
                self.bump();
                let inner = self.unary()?;
                return Ok(Expr::neg(inner));
            }
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseDiagnostic> {
        let base = self.atom()?;
        if let Some(t) = self.peek() {
            if t.kind == TokenKind::Caret {
                let caret_offset = t.offset;
                self.bump();
                let exponent = self.unary()?;
                return match exponent {
                    Expr::Const(k) => Ok(Expr::pow(base, k)),
                    _ => Err(diag(
                        caret_offset,
                        "exponent must be a constant (general f^g is not supported)",
                    )),
                };
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseDiagnostic> {
        let t = match self.bump() {
            Some(t) => t,
            None => return Err(diag(self.eof_offset(), "unexpected end of input")),
        };
        match t.kind {
            TokenKind::Number(v, imaginary) => Ok(Expr::Const(if imaginary {
                Complex64::new(0.0, v)
            } else {
                Complex64::new(v, 0.0)
            })),
            TokenKind::LParen => {
                let e = self.expression()?;
                match self.bump() {
                    Some(Token {
                        kind: TokenKind::RParen,
                        ..
                    }) => Ok(e),
                    Some(t) => Err(diag(t.offset, "expected `)`")),
                    None => Err(diag(self.eof_offset(), "missing closing `)`")),
                }
            }
            TokenKind::Ident(name) => match name.as_str() {
                "z" => Ok(Expr::Z),
                "i" => Ok(Expr::Const(Complex64::new(0.0, 1.0))),
                _ => self.function_call(&name, t.offset),
            },
            _ => Err(diag(t.offset, "expected a value")),
        }
    }

    fn function_call(&mut self, name: &str, offset: usize) -> Result<Expr, ParseDiagnostic> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::LParen => {
                self.bump();
            }
            _ => {
                return Err(diag(offset, format!("unknown identifier `{name}`")));
            }
        }
        let arg = self.expression()?;
        match self.bump() {
            Some(Token {
                kind: TokenKind::RParen,
                ..
            }) => {}
            Some(t) => return Err(diag(t.offset, "expected `)` after function argument")),
            None => return Err(diag(self.eof_offset(), "missing closing `)`")),
        }
        let arg = Box::new(arg);
        let e = match name {
            "exp" => Expr::Exp(arg),
            "log" | "ln" => Expr::Log(arg),
            "sin" => Expr::Sin(arg),
            "cos" => Expr::Cos(arg),
            "tan" => Expr::Tan(arg),
            "sinh" => Expr::Sinh(arg),
            "cosh" => Expr::Cosh(arg),
            "wp" | "wp_prime" | "wzeta" | "wsigma" => {
                let lattice = self.lattice.clone().ok_or_else(|| {
                    diag(offset, format!("`{name}` needs a lattice context"))
                })?;
                return Ok(match name {
                    "wp" => Expr::Wp(arg, lattice),
                    "wp_prime" => Expr::WpPrime(arg, lattice),
                    "wzeta" => Expr::WZeta(arg, lattice),
                    _ => Expr::WSigma(arg, lattice),
                });
            }
            _ => return Err(diag(offset, format!("unknown function `{name}`"))),
        };
        Ok(e)
    }
}
