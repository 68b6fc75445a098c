//! Minimal total expression grammar for scalar right-hand sides on the
//! command line: arithmetic over `x` and the delayed values `y0..yn` with
//! `+ - * / ^`, parentheses and the functions `sin`, `cos`, `exp`.
//!
//! `^` binds tightest and associates to the right; unary minus sits between
//! `^` and `*`, so `-y0^2` parses as `-(y0^2)`.

use crate::error::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Y(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn eval(&self, x: f64, ys: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Y(i) => ys[*i],
            Expr::Neg(e) => -e.eval(x, ys),
            Expr::Add(l, r) => l.eval(x, ys) + r.eval(x, ys),
            Expr::Sub(l, r) => l.eval(x, ys) - r.eval(x, ys),
            Expr::Mul(l, r) => l.eval(x, ys) * r.eval(x, ys),
            Expr::Div(l, r) => l.eval(x, ys) / r.eval(x, ys),
            Expr::Pow(l, r) => l.eval(x, ys).powf(r.eval(x, ys)),
            Expr::Sin(e) => e.eval(x, ys).sin(),
            Expr::Cos(e) => e.eval(x, ys).cos(),
            Expr::Exp(e) => e.eval(x, ys).exp(),
        }
    }

    /// Largest delayed-value index mentioned, if any.
    pub fn max_y_index(&self) -> Option<usize> {
        match self {
            Expr::Num(_) | Expr::X => None,
            Expr::Y(i) => Some(*i),
            Expr::Neg(e) | Expr::Sin(e) | Expr::Cos(e) | Expr::Exp(e) => e.max_y_index(),
            Expr::Add(l, r)
            | Expr::Sub(l, r)
            | Expr::Mul(l, r)
            | Expr::Div(l, r)
            | Expr::Pow(l, r) => match (l.max_y_index(), r.max_y_index()) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    tokens: Vec<(usize, Token)>,
}

impl<'a> Lexer<'a> {
    fn run(src: &'a str) -> Result<Vec<(usize, Token)>, Error> {
        let mut lx = Lexer {
            src: src.as_bytes(),
            pos: 0,
            tokens: Vec::new(),
        };
        while lx.pos < lx.src.len() {
            let start = lx.pos;
            let c = lx.src[lx.pos];
            match c {
                b' ' | b'\t' => {
                    lx.pos += 1;
                }
                b'+' => lx.push1(start, Token::Plus),
                b'-' => lx.push1(start, Token::Minus),
                b'*' => lx.push1(start, Token::Star),
                b'/' => lx.push1(start, Token::Slash),
                b'^' => lx.push1(start, Token::Caret),
                b'(' => lx.push1(start, Token::LParen),
                b')' => lx.push1(start, Token::RParen),
                b'0'..=b'9' | b'.' => {
                    while lx.pos < lx.src.len()
                        && matches!(lx.src[lx.pos], b'0'..=b'9' | b'.' | b'e' | b'E')
                    {
                        // accept a sign straight after an exponent marker
                        lx.pos += 1;
                        if lx.pos < lx.src.len()
                            && matches!(lx.src[lx.pos], b'+' | b'-')
                            && matches!(lx.src[lx.pos - 1], b'e' | b'E')
                        {
                            lx.pos += 1;
                        }
                    }
                    let text = &src[start..lx.pos];
                    let value: f64 = text.parse().map_err(|_| Error::Parse {
                        position: start,
                        message: format!("invalid number `{text}`"),
                    })?;
                    lx.tokens.push((start, Token::Num(value)));
                }
                b'a'..=b'z' | b'A'..=b'Z' => {
                    while lx.pos < lx.src.len()
                        && matches!(lx.src[lx.pos], b'a'..=b'z' | b'A'..=b'Z' | b'0'..=b'9')
                    {
                        lx.pos += 1;
                    }
                    lx.tokens
                        .push((start, Token::Ident(src[start..lx.pos].to_string())));
                }
                other => {
                    return Err(Error::Parse {
                        position: start,
                        message: format!("unexpected character `{}`", other as char),
                    })
                }
            }
        }
        Ok(lx.tokens)
    }

    fn push1(&mut self, start: usize, t: Token) {
        self.tokens.push((start, t));
        self.pos += 1;
    }
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

/// Parses an expression, reporting syntax errors with their byte offset.
pub fn parse(src: &str) -> Result<Expr, Error> {
    let tokens = Lexer::run(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: src.len(),
    };
    let e = p.sum()?;
    if let Some((at, _)) = p.peek() {
        return Err(Error::Parse {
            position: at,
            message: "trailing input after expression".into(),
        });
    }
    Ok(e)
}

impl Parser {
    fn peek(&self) -> Option<(usize, Token)> {
        self.tokens.get(self.pos).cloned()
    }

    fn next(&mut self) -> Option<(usize, Token)> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect_rparen(&mut self, open_at: usize) -> Result<(), Error> {
        match self.next() {
            Some((_, Token::RParen)) => Ok(()),
            Some((at, _)) => Err(Error::Parse {
                position: at,
                message: "expected `)`".into(),
            }),
            None => Err(Error::Parse {
                position: open_at,
                message: "unclosed `(`".into(),
            }),
        }
    }

    fn sum(&mut self) -> Result<Expr, Error> {
        let mut left = self.product()?;
        while let Some((_, tok)) = self.peek() {
            match tok {
                Token::Plus => {
                    self.pos += 1;
                    left = Expr::Add(Box::new(left), Box::new(self.product()?));
                }
                Token::Minus => {
                    self.pos += 1;
                    left = Expr::Sub(Box::new(left), Box::new(self.product()?));
                }
                _ => break,
            }
        }
        Ok(left)
    }

    fn product(&mut self) -> Result<Expr, Error> {
        let mut left = self.unary()?;
        while let Some((_, tok)) = self.peek() {
            match tok {
                Token::Star => {
                    self.pos += 1;
                    left = Expr::Mul(Box::new(left), Box::new(self.unary()?));
                }
                Token::Slash => {
                    self.pos += 1;
                    left = Expr::Div(Box::new(left), Box::new(self.unary()?));
                }
                _ => break,
            }
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Expr, Error> {
        if let Some((_, Token::Minus)) = self.peek() {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, Error> {
        let base = self.atom()?;
        if let Some((_, Token::Caret)) = self.peek() {
            self.pos += 1;
            // right-associative; unary minus allowed in the exponent
            let exponent = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, Error> {
        match self.next() {
            Some((_, Token::Num(v))) => Ok(Expr::Num(v)),
            Some((at, Token::LParen)) => {
                let inner = self.sum()?;
                self.expect_rparen(at)?;
                Ok(inner)
            }
            Some((at, Token::Ident(name))) => self.ident(at, name),
            Some((at, _)) => Err(Error::Parse {
                position: at,
                message: "expected a number, name or `(`".into(),
            }),
            None => Err(Error::Parse {
                position: self.end,
                message: "unexpected end of expression".into(),
            }),
        }
    }

    fn ident(&mut self, at: usize, name: String) -> Result<Expr, Error> {
        match name.as_str() {
            "x" => Ok(Expr::X),
            "sin" | "cos" | "exp" => {
                let open = match self.next() {
                    Some((open, Token::LParen)) => open,
                    _ => {
                        return Err(Error::Parse {
                            position: at + name.len(),
                            message: format!("`{name}` needs a parenthesized argument"),
                        })
                    }
                };
                let arg = self.sum()?;
                self.expect_rparen(open)?;
                let boxed = Box::new(arg);
                Ok(match name.as_str() {
                    "sin" => Expr::Sin(boxed),
                    "cos" => Expr::Cos(boxed),
                    _ => Expr::Exp(boxed),
                })
            }
            _ => {
                if let Some(rest) = name.strip_prefix('y') {
                    if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                        return Ok(Expr::Y(rest.parse().map_err(|_| Error::Parse {
                            position: at,
                            message: format!("delay index out of range in `{name}`"),
                        })?));
                    }
                }
                Err(Error::Parse {
                    position: at,
                    message: format!("unknown name `{name}` (expected x, y0..yn, sin, cos, exp)"),
                })
            }
        }
    }
}
