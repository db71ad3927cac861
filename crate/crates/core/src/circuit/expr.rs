//! Infix expressions to formulas. Constant factors become arrow weights, and
//! subtraction becomes weight -1.

use super::{Circuit, CircuitBuilder, Output};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::poly::{is_ident_char, is_ident_start};

/// A parsed sub-expression: a bare constant, or `factor * gate`.
enum Node {
    Const(FieldElement),
    Gate(usize, FieldElement),
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    b: &'a mut CircuitBuilder,
}

impl Parser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::SyntaxError { pos: self.pos, msg: msg.to_string() })
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Node> {
        let mut acc = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            let sign = FieldElement::integer(if op == '+' { 1 } else { -1 });
            acc = self.add(acc, rhs, sign)?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Node> {
        let mut acc = self.factor()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = self.mul(acc, rhs)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Node> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some('-') => {
                self.pos += 1;
                let inner = self.factor()?;
                self.mul(Node::Const(FieldElement::integer(-1)), inner)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if is_ident_start(c) => {
                let start = self.pos;
                while self.chars.get(self.pos).is_some_and(|c| is_ident_char(*c)) {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                Ok(Node::Gate(self.b.input(&name), FieldElement::integer(1)))
            }
            Some(_) => self.err("unexpected character"),
            None => self.err("unexpected end of input"),
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.chars.get(p.pos).is_some_and(|c| c.is_ascii_digit()) {
                p.pos += 1;
            }
            p.pos > s
        };
        digits(self);
        if self.chars.get(self.pos) == Some(&'/') {
            self.pos += 1;
            if !digits(self) {
                return self.err("expected denominator");
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        let value = crate::field::parse_rational(&text).ok_or(Error::SyntaxError { pos: start, msg: "bad constant".into() })?;
        Ok(Node::Const(FieldElement::Rational(value)))
    }

    fn materialize(&mut self, n: Node) -> (usize, FieldElement) {
        match n {
            Node::Const(c) => (self.b.constant(c), FieldElement::integer(1)),
            Node::Gate(g, f) => (g, f),
        }
    }

    fn add(&mut self, l: Node, r: Node, sign: FieldElement) -> Result<Node> {
        if let (Node::Const(a), Node::Const(b)) = (&l, &r) {
            return Ok(Node::Const(a.checked_add(&b.checked_mul(&sign)?)?));
        }
        let (lg, lw) = self.materialize(l);
        let (rg, rw) = self.materialize(r);
        Ok(Node::Gate(self.b.add_weighted(lg, lw, rg, rw.checked_mul(&sign)?), FieldElement::integer(1)))
    }

    fn mul(&mut self, l: Node, r: Node) -> Result<Node> {
        Ok(match (l, r) {
            (Node::Const(a), Node::Const(b)) => Node::Const(a.checked_mul(&b)?),
            (Node::Const(c), Node::Gate(g, f)) | (Node::Gate(g, f), Node::Const(c)) => Node::Gate(g, f.checked_mul(&c)?),
            (Node::Gate(a, fa), Node::Gate(b, fb)) => Node::Gate(self.b.mul_weighted(a, fa, b, fb), FieldElement::integer(1)),
        })
    }
}

/// Parses `expr := term (('+'|'-') term)*`, `term := factor ('*' factor)*`,
/// `factor := const | var | '-' factor | '(' expr ')'` into a formula.
/// Each variable occurrence gets its own input gate.
pub fn parse_expression(text: &str) -> Result<Circuit> {
    let mut b = CircuitBuilder::new(Vec::new())?;
    let mut p = Parser { chars: text.chars().collect(), pos: 0, b: &mut b };
    let node = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    let (gate, scale) = p.materialize(node);
    b.finish(vec![Output { gate, scale }])
}
