//! Integer sequences `d(n)` written as small arithmetic expressions in `n`,
//! e.g. `3`, `n+2`, `2^n`, `2^(n+2)`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Const(f64),
    Var,
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
}

impl Node {
    fn eval(&self, n: f64) -> f64 {
        match self {
            Node::Const(c) => *c,
            Node::Var => n,
            Node::Add(a, b) => a.eval(n) + b.eval(n),
            Node::Sub(a, b) => a.eval(n) - b.eval(n),
            Node::Mul(a, b) => a.eval(n) * b.eval(n),
            Node::Pow(a, b) => a.eval(n).powf(b.eval(n)),
        }
    }
}

/// A parsed degree sequence `n -> d(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeExpr {
    source: String,
    root: Node,
}

impl DegreeExpr {
    pub fn parse(src: &str) -> Result<Self> {
        let tokens: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = Parser { tokens: &tokens, pos: 0 };
        let root = p.expr()?;
        if p.pos != tokens.len() {
            return Err(Error::Parse(format!(
                "unexpected `{}` in degree expression `{src}`",
                tokens[p.pos]
            )));
        }
        Ok(DegreeExpr { source: src.trim().to_string(), root })
    }

    /// `d(n)` as a float (exact for integer values below 2^53).
    pub fn eval(&self, n: usize) -> f64 {
        self.root.eval(n as f64)
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

impl fmt::Display for DegreeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

struct Parser<'a> {
    tokens: &'a [char],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.tokens.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' {
                Node::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Node::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.power()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            let rhs = self.power()?;
            lhs = Node::Mul(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    // right associative
    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let exp = self.power()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek() {
            Some('n') => {
                self.pos += 1;
                Ok(Node::Var)
            }
            Some(open @ ('(' | '{')) => {
                self.pos += 1;
                let inner = self.expr()?;
                let close = if open == '(' { ')' } else { '}' };
                if self.peek() != Some(close) {
                    return Err(Error::Parse(format!("expected `{close}` in degree expression")));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let digits: String = self.tokens[start..self.pos].iter().collect();
                let v: f64 = digits
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad integer `{digits}`")))?;
                Ok(Node::Const(v))
            }
            Some(c) => Err(Error::Parse(format!("unexpected `{c}` in degree expression"))),
            None => Err(Error::Parse("degree expression ended early".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_common_sequences() {
        let d = DegreeExpr::parse("n+2").unwrap();
        assert_eq!((0..4).map(|n| d.eval(n)).collect::<Vec<_>>(), vec![2.0, 3.0, 4.0, 5.0]);
        let d = DegreeExpr::parse("2^{n+2}").unwrap();
        assert_eq!(d.eval(0), 4.0);
        assert_eq!(d.eval(3), 32.0);
        let d = DegreeExpr::parse("2^n").unwrap();
        assert_eq!(d.eval(5), 32.0);
        let d = DegreeExpr::parse("3").unwrap();
        assert_eq!(d.eval(100), 3.0);
        let d = DegreeExpr::parse("2*n*n - n + 3").unwrap();
        assert_eq!(d.eval(3), 18.0);
    }

    #[test]
    fn power_is_right_associative() {
        let d = DegreeExpr::parse("2^2^n").unwrap();
        assert_eq!(d.eval(2), 16.0);
    }

    #[test]
    fn rejects_garbage() {
        assert!(DegreeExpr::parse("n+").is_err());
        assert!(DegreeExpr::parse("x").is_err());
        assert!(DegreeExpr::parse("(n").is_err());
        assert!(DegreeExpr::parse("n)").is_err());
    }
}
