//! Recursive-descent parser for the component-expression DSL.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | primary
//! primary := number | ident | ident '(' args ')' | '(' expr ')'
//! number  := digits ['.' digits] [('e'|'E') ['+'|'-'] digits]
//! ident   := [a-zA-Z][a-zA-Z0-9]*
//! ```

use super::{BinOp, ExprError, Func, Node, Position};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Comma,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn error(&self, offset: usize, message: impl Into<String>) -> ExprError {
        ExprError::Syntax {
            at: Position::locate(self.src, offset),
            message: message.into(),
        }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize)>, ExprError> {
        let mut out = Vec::new();
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            let start = self.pos;
            let Some(&c) = self.bytes.get(self.pos) else {
                out.push((Tok::End, start));
                return Ok(out);
            };
            let tok = match c {
                b'+' => Tok::Plus,
                b'-' => Tok::Minus,
                b'*' => Tok::Star,
                b'/' => Tok::Slash,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b',' => Tok::Comma,
                b'0'..=b'9' | b'.' => {
                    out.push((self.number()?, start));
                    continue;
                }
                c if c.is_ascii_alphabetic() => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_alphanumeric() {
                        self.pos += 1;
                    }
                    out.push((Tok::Ident(self.src[start..self.pos].to_string()), start));
                    continue;
                }
                _ => {
                    let ch = self.src[start..].chars().next().unwrap_or('?');
                    return Err(self.error(start, format!("unexpected character '{ch}'")));
                }
            };
            self.pos += 1;
            out.push((tok, start));
        }
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.pos - start
    }

    fn number(&mut self) -> Result<Tok, ExprError> {
        let start = self.pos;
        let int_digits = self.digits();
        let mut frac_digits = 0;
        if self.bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            frac_digits = self.digits();
        }
        if int_digits == 0 && frac_digits == 0 {
            return Err(self.error(start, "malformed number"));
        }
        if matches!(self.bytes.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.bytes.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.digits() == 0 {
                return Err(self.error(save, "missing exponent digits"));
            }
        }
        self.src[start..self.pos]
            .parse::<f64>()
            .map(Tok::Num)
            .map_err(|_| self.error(start, "malformed number"))
    }
}

/// Name resolution for identifiers.
pub(super) struct Scope<'a> {
    pub vars: &'a [String],
    pub params: &'a [(String, f64)],
    pub substitute: bool,
}

pub(super) struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    scope: Scope<'a>,
}

impl<'a> Parser<'a> {
    pub fn new(src: &'a str, scope: Scope<'a>) -> Result<Self, ExprError> {
        let toks = Lexer::new(src).tokens()?;
        Ok(Self {
            src,
            toks,
            pos: 0,
            scope,
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

    fn error(&self, offset: usize, message: impl Into<String>) -> ExprError {
        ExprError::Syntax {
            at: Position::locate(self.src, offset),
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ExprError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(self.offset(), format!("expected {what}")))
        }
    }

    pub fn parse(mut self) -> Result<Node, ExprError> {
        if *self.peek() == Tok::End {
            return Err(self.error(0, "empty expression"));
        }
        let node = self.expr()?;
        if *self.peek() != Tok::End {
            return Err(self.error(self.offset(), "unexpected trailing input"));
        }
        Ok(node)
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            let inner = self.unary()?;
            return Ok(Node::Neg(Box::new(inner)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Node, ExprError> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Node::Const(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    self.bump();
                    self.call(&name, at)
                } else {
                    self.identifier(&name, at)
                }
            }
            Tok::End => Err(self.error(at, "unexpected end of input")),
            _ => Err(self.error(at, "expected a number, identifier or '('")),
        }
    }

    fn identifier(&self, name: &str, at: usize) -> Result<Node, ExprError> {
        if let Some(i) = self.scope.vars.iter().position(|v| v == name) {
            return Ok(Node::Var(i));
        }
        if let Some(i) = self.scope.params.iter().position(|(p, _)| p == name) {
            return Ok(if self.scope.substitute {
                Node::Const(self.scope.params[i].1)
            } else {
                Node::Param(i)
            });
        }
        Err(ExprError::UnknownIdentifier {
            name: name.to_string(),
            at: Position::locate(self.src, at),
        })
    }

    fn call(&mut self, name: &str, at: usize) -> Result<Node, ExprError> {
        let mut args = vec![self.expr()?];
        let mut arg_offsets = vec![at];
        while *self.peek() == Tok::Comma {
            self.bump();
            arg_offsets.push(self.offset());
            args.push(self.expr()?);
        }
        self.expect(Tok::RParen, "')' after arguments")?;

        let given = args.len();
        let arity = |n: usize| -> Result<(), ExprError> {
            if given == n {
                Ok(())
            } else {
                Err(self.error(at, format!("{name} takes {n} argument(s), got {given}")))
            }
        };
        let func = match name {
            "pow" => {
                arity(2)?;
                let exponent = args.pop().expect("two args");
                let base = args.pop().expect("two args");
                if !exponent.is_constant() {
                    return Err(ExprError::NonConstantExponent {
                        at: Position::locate(self.src, arg_offsets[1]),
                    });
                }
                return Ok(Node::Pow(Box::new(base), Box::new(exponent)));
            }
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            _ => {
                return Err(ExprError::UnknownFunction {
                    name: name.to_string(),
                    at: Position::locate(self.src, at),
                })
            }
        };
        arity(1)?;
        Ok(Node::Call(func, Box::new(args.pop().expect("one arg"))))
    }
}
