//! Circuits for dense polynomials.

use std::collections::BTreeMap;

use rand::Rng;

use super::DensePolynomial;
use crate::circuit::{Circuit, CircuitBuilder, Output};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};

/// Either a constant or `factor * gate`.
enum Node {
    Const(FieldElement),
    Gate(usize, FieldElement),
}

struct Lowering<'a> {
    b: CircuitBuilder,
    vars: &'a [String],
}

impl Lowering<'_> {
    /// Homogeneous part of degree `delta` in `x0, v_1..v_k`, given by its
    /// exponent vectors over `v_1..v_k` (the power of `x0` is implicit).
    /// Splits as `v_k * Q1 + Q2` and substitutes `x0 = 1` at the leaves.
    fn lower(&mut self, terms: BTreeMap<Vec<u32>, FieldElement>, k: usize, delta: u32) -> Result<Option<Node>> {
        if terms.is_empty() {
            return Ok(None);
        }
        if k == 0 || delta == 0 {
            debug_assert_eq!(terms.len(), 1);
            return Ok(terms.into_values().next().map(Node::Const));
        }
        let mut with_var = BTreeMap::new();
        let mut without = BTreeMap::new();
        for (mut e, c) in terms {
            if e[k - 1] > 0 {
                e[k - 1] -= 1;
                with_var.insert(e, c);
            } else {
                e.truncate(k - 1);
                without.insert(e, c);
            }
        }
        let q1 = self.lower(with_var, k, delta - 1)?;
        let q2 = self.lower(without, k - 1, delta)?;
        let q1 = match q1 {
            None => None,
            Some(Node::Const(c)) => Some(Node::Gate(self.b.input(&self.vars[k - 1]), c)),
            Some(Node::Gate(g, f)) => {
                let x = self.b.input(&self.vars[k - 1]);
                Some(Node::Gate(self.b.mul_weighted(x, FieldElement::integer(1), g, f), FieldElement::integer(1)))
            }
        };
        Ok(match (q1, q2) {
            (None, other) | (other, None) => other,
            (Some(l), Some(r)) => {
                let (lg, lw) = self.materialize(l);
                let (rg, rw) = self.materialize(r);
                Some(Node::Gate(self.b.add_weighted(lg, lw, rg, rw), FieldElement::integer(1)))
            }
        })
    }

    fn materialize(&mut self, n: Node) -> (usize, FieldElement) {
        match n {
            Node::Const(c) => (self.b.constant(FieldElement::integer(1)), c),
            Node::Gate(g, f) => (g, f),
        }
    }
}

/// Weighted formula for `p` built from the split `p = x_n * P' + P''` of its
/// homogenization, with the homogenizing variable set to 1. Constants ride on
/// arrow weights and on inputs labelled 1.
pub fn poly_to_formula(p: &DensePolynomial) -> Result<Circuit> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let d = p.degree();
    let mut low = Lowering { b: CircuitBuilder::new(p.vars.clone())?, vars: &p.vars };
    let root = low.lower(p.terms.clone(), p.vars.len(), d)?.expect("nonzero polynomial");
    let (gate, scale) = match root {
        Node::Const(c) => (low.b.constant(c), FieldElement::integer(1)),
        Node::Gate(g, f) => (g, f),
    };
    low.b.finish_pruned(vec![Output { gate, scale }])
}

/// Skew circuit for the sum of all monomials of degree at most `d` in
/// `x1..xn`, via `M(k, δ) = x_k M(k, δ-1) + M(k-1, δ)` with `M(0, δ) = x0 M(0, δ-1)`.
/// The homogenizing `x0` is an input labelled by the constant 1.
pub fn monomial_sum_circuit(n: usize, d: usize) -> Circuit {
    assert!(n >= 1 && d >= 1, "need n, d >= 1");
    let vars: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let mut b = CircuitBuilder::new(vars.clone()).expect("distinct names");
    let fresh = |b: &mut CircuitBuilder, k: usize| {
        if k == 0 {
            b.constant(FieldElement::integer(1))
        } else {
            b.input(&vars[k - 1])
        }
    };
    // level[k] is the gate computing M(k, δ)
    let mut level: Vec<usize> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let x = fresh(&mut b, k);
        let g = if k == 0 { x } else { b.add(level[k - 1], x) };
        level.push(g);
    }
    for _ in 2..=d {
        let mut next: Vec<usize> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let x = fresh(&mut b, k);
            let prod = b.mul(x, level[k]);
            let g = if k == 0 { prod } else { b.add(prod, next[k - 1]) };
            next.push(g);
        }
        level = next;
    }
    b.finish_single(level[n]).expect("all gates feed the output")
}

/// All exponent vectors of total degree at most `d` in `n` variables.
pub(crate) fn monomials_up_to(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, budget: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for e in 0..=budget {
            prefix.push(e);
            rec(n, budget - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d, &mut Vec::new(), &mut out);
    out
}

/// Random polynomial in `x1..xn` of degree exactly `d`: each monomial of
/// degree at most `d` appears with probability `density`, with a nonzero
/// integer coefficient in `[-5, 5]`.
pub fn random_dense_polynomial<R: Rng>(n: usize, d: u32, density: f64, spec: &FieldSpec, rng: &mut R) -> DensePolynomial {
    let mut vars: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    vars.sort();
    let monos = monomials_up_to(n, d);
    loop {
        let mut terms = BTreeMap::new();
        for e in &monos {
            if rng.gen_bool(density) {
                let mut c = rng.gen_range(-5i64..=4);
                if c >= 0 {
                    c += 1;
                }
                terms.insert(e.clone(), spec.from_i64(c));
            }
        }
        terms.retain(|_, c: &mut FieldElement| !c.is_zero());
        let p = DensePolynomial { spec: spec.clone(), vars: vars.clone(), terms }.trimmed();
        if !p.is_zero() && p.degree() == d {
            return p;
        }
    }
}
