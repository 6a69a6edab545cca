//! Small arithmetic expression language for test functions.
//!
//! Variables `x`, `y`, `z` and `r` (distance to the origin), constants `pi`
//! and `e`, operators `+ - * / ^`, and the functions `min`, `max`, `abs`,
//! `exp`, `sqrt`.
//!
//! ```
//! use gmtlab::Expr;
//! let e = Expr::parse("max(0, 1 - (x*x + y*y))").unwrap();
//! assert_eq!(e.eval([0.5, 0.5, 0.0]), 0.5);
//! ```

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::lattice::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Func {
    Min,
    Max,
    Abs,
    Exp,
    Sqrt,
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    Var(usize),
    Radius,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

/// A parsed expression in `x`, `y`, `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    source: String,
    root: Node,
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl Expr {
    pub fn parse(source: &str) -> Result<Self> {
        let tokens = lex(source)?;
        let mut p = Parser { tokens, pos: 0 };
        let root = p.sum()?;
        if p.pos != p.tokens.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(Self { source: source.to_owned(), root })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, p: Point) -> f64 {
        eval(&self.root, p)
    }
}

fn eval(n: &Node, p: Point) -> f64 {
    match n {
        Node::Num(v) => *v,
        Node::Var(k) => p[*k],
        Node::Radius => (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt(),
        Node::Neg(a) => -eval(a, p),
        Node::Add(a, b) => eval(a, p) + eval(b, p),
        Node::Sub(a, b) => eval(a, p) - eval(b, p),
        Node::Mul(a, b) => eval(a, p) * eval(b, p),
        Node::Div(a, b) => eval(a, p) / eval(b, p),
        Node::Pow(a, b) => eval(a, p).powf(eval(b, p)),
        Node::Call(f, args) => {
            let mut vals = args.iter().map(|a| eval(a, p));
            match f {
                Func::Min => vals.fold(f64::INFINITY, f64::min),
                Func::Max => vals.fold(f64::NEG_INFINITY, f64::max),
                Func::Abs => vals.next().unwrap_or(f64::NAN).abs(),
                Func::Exp => vals.next().unwrap_or(f64::NAN).exp(),
                Func::Sqrt => vals.next().unwrap_or(f64::NAN).sqrt(),
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i].1 == 'e' || chars[i].1 == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j].1 == '+' || chars[j].1 == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].1.is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].1.is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let end = if i < chars.len() { chars[i].0 } else { s.len() };
            let text = &s[pos..end];
            let v: f64 = text
                .parse()
                .map_err(|_| Error::Parse(format!("bad number `{text}` at {}", chars[start].0)))?;
            out.push((Tok::Num(v), pos));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = pos;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let end = if i < chars.len() { chars[i].0 } else { s.len() };
            out.push((Tok::Ident(s[start..end].to_owned()), pos));
        } else {
            let op = match c {
                '\u{2212}' => '-',
                '\u{00b7}' => '*',
                other => other,
            };
            if !"+-*/^(),".contains(op) {
                return Err(Error::Parse(format!("unexpected character `{c}` at {pos}")));
            }
            out.push((Tok::Op(op), pos));
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn error(&self, msg: &str) -> Error {
        let at = self.tokens.get(self.pos).map(|t| t.1);
        match at {
            Some(at) => Error::Parse(format!("{msg} at {at}")),
            None => Error::Parse(format!("{msg} at end of input")),
        }
    }

    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some((Tok::Op(c), _)) => Some(*c),
            _ => None,
        }
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.peek_op() == Some(op) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{op}`")))
        }
    }

    fn sum(&mut self) -> Result<Node> {
        let mut lhs = self.product()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.product()?;
            lhs = if op == '+' {
                Node::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Node::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Node::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Node::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        let Some((tok, _)) = self.tokens.get(self.pos).cloned() else {
            return Err(self.error("unexpected end of expression"));
        };
        match tok {
            Tok::Num(v) => {
                self.pos += 1;
                Ok(Node::Num(v))
            }
            Tok::Op('(') => {
                self.pos += 1;
                let inner = self.sum()?;
                self.expect(')')?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.pos += 1;
                let func = match name.as_str() {
                    "x" => return Ok(Node::Var(0)),
                    "y" => return Ok(Node::Var(1)),
                    "z" => return Ok(Node::Var(2)),
                    "r" => return Ok(Node::Radius),
                    "pi" => return Ok(Node::Num(std::f64::consts::PI)),
                    "e" => return Ok(Node::Num(std::f64::consts::E)),
                    "min" => Func::Min,
                    "max" => Func::Max,
                    "abs" => Func::Abs,
                    "exp" => Func::Exp,
                    "sqrt" => Func::Sqrt,
                    _ => {
                        self.pos -= 1;
                        return Err(self.error(&format!("unknown name `{name}`")));
                    }
                };
                self.expect('(')?;
                let mut args = vec![self.sum()?];
                while self.peek_op() == Some(',') {
                    self.pos += 1;
                    args.push(self.sum()?);
                }
                self.expect(')')?;
                let unary = matches!(func, Func::Abs | Func::Exp | Func::Sqrt);
                if unary && args.len() != 1 {
                    return Err(self.error(&format!("`{name}` takes one argument")));
                }
                Ok(Node::Call(func, args))
            }
            Tok::Op(_) => Err(self.error("unexpected operator")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, p: Point) -> f64 {
        Expr::parse(s).unwrap().eval(p)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1 + 2 * 3", [0.0; 3]), 7.0);
        assert_eq!(ev("8 / 4 / 2", [0.0; 3]), 1.0);
        assert_eq!(ev("2 - 3 - 4", [0.0; 3]), -5.0);
        assert_eq!(ev("-2^2", [0.0; 3]), -4.0);
        assert_eq!(ev("2^3^2", [0.0; 3]), 512.0);
    }

    #[test]
    fn variables_and_functions() {
        let p = [3.0, 4.0, 0.0];
        assert_eq!(ev("r", p), 5.0);
        assert_eq!(ev("sqrt(x*x + y*y)", p), 5.0);
        assert_eq!(ev("min(x, y, 1)", p), 1.0);
        assert_eq!(ev("max(x, y)", p), 4.0);
        assert_eq!(ev("abs(x - y)", p), 1.0);
        assert_eq!(ev("exp(0)", p), 1.0);
        assert_eq!(ev("1e-3 * 2", p), 0.002);
        assert_eq!(ev("1 \u{2212} x", p), -2.0);
    }

    #[test]
    fn errors_name_the_problem() {
        assert!(Expr::parse("1 +").is_err());
        assert!(Expr::parse("foo(x)").unwrap_err().to_string().contains("foo"));
        assert!(Expr::parse("(x").is_err());
        assert!(Expr::parse("x y").is_err());
        assert!(Expr::parse("abs(x, y)").is_err());
        assert!(Expr::parse("x $ y").is_err());
    }
}
