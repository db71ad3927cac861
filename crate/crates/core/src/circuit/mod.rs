//! Weighted arithmetic circuits with fan-in-two addition and multiplication.
//!
//! Gates are stored in topological order: every argument id is smaller than
//! the id of the gate using it. Each output carries a scale factor (default 1)
//! so that constant factors pulled out of the output need no extra gate.

mod classify;
mod expr;
mod random;

pub use classify::{classify, WsClassification};
pub use expr::parse_expression;
pub use random::{random_circuit, CircuitClass, RandomSpec};

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::poly::DensePolynomial;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GateKind {
    Var(String),
    Const(FieldElement),
    Add,
    Mul,
}

/// An argument of a computation gate: source gate and arrow weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arg {
    pub gate: usize,
    pub weight: FieldElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    /// Empty for inputs, exactly two entries for computation gates.
    pub args: Vec<Arg>,
}

impl Gate {
    pub fn is_input(&self) -> bool {
        self.args.is_empty()
    }

    pub fn is_computation(&self) -> bool {
        matches!(self.kind, GateKind::Add | GateKind::Mul)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub gate: usize,
    pub scale: FieldElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    gates: Vec<Gate>,
    outputs: Vec<Output>,
    vars: Vec<String>,
}

/// Gate counts of a circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeReport {
    /// Computation gates.
    pub skinny: usize,
    /// All gates.
    pub fat: usize,
    /// Inputs labelled by a variable.
    pub var_inputs: usize,
    /// Computation gates after minimization; `None` for constant circuits.
    pub green: Option<usize>,
}

impl Circuit {
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, id: usize) -> &Gate {
        &self.gates[id]
    }

    pub fn outputs(&self) -> &[Output] {
        &self.outputs
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// The single output, or `MultipleOutputs`.
    pub fn single_output(&self) -> Result<&Output> {
        match self.outputs.as_slice() {
            [out] => Ok(out),
            _ => Err(Error::MultipleOutputs),
        }
    }

    pub fn skinny_size(&self) -> usize {
        self.gates.iter().filter(|g| g.is_computation()).count()
    }

    pub fn fat_size(&self) -> usize {
        self.gates.len()
    }

    pub fn var_inputs(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g.kind, GateKind::Var(_))).count()
    }

    pub fn measure(&self) -> SizeReport {
        SizeReport {
            skinny: self.skinny_size(),
            fat: self.fat_size(),
            var_inputs: self.var_inputs(),
            green: crate::minimize::minimize(self).ok().map(|c| c.skinny_size()),
        }
    }

    /// For every gate, the gates it feeds, one entry per arrow.
    pub fn consumers(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.gates.len()];
        for (id, g) in self.gates.iter().enumerate() {
            for a in &g.args {
                out[a.gate].push(id);
            }
        }
        out
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        self.consumers().iter().map(Vec::len).collect()
    }

    pub fn is_output(&self, id: usize) -> bool {
        self.outputs.iter().any(|o| o.gate == id)
    }

    /// Gates from which `root` is reachable, including `root`.
    pub fn sub_circuit(&self, root: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![root];
        while let Some(g) = stack.pop() {
            if seen.insert(g) {
                stack.extend(self.gates[g].args.iter().map(|a| a.gate));
            }
        }
        seen
    }

    /// Structurally constant: no variable input feeds the gate.
    pub fn constant_gates(&self) -> Vec<bool> {
        let mut constant = vec![true; self.gates.len()];
        for (id, g) in self.gates.iter().enumerate() {
            constant[id] = match g.kind {
                GateKind::Var(_) => false,
                GateKind::Const(_) => true,
                _ => g.args.iter().all(|a| constant[a.gate]),
            };
        }
        constant
    }

    /// Values of every gate (unscaled) under weighted semantics.
    pub fn gate_values(&self, assignment: &HashMap<String, FieldElement>, spec: &FieldSpec) -> Result<Vec<FieldElement>> {
        let mut vals: Vec<FieldElement> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let v = match &g.kind {
                GateKind::Var(x) => {
                    assignment.get(x).ok_or_else(|| Error::MissingAssignment(x.clone()))?.embed(spec)?
                }
                GateKind::Const(c) => c.embed(spec)?,
                GateKind::Add | GateKind::Mul => {
                    let l = vals[g.args[0].gate].checked_mul(&g.args[0].weight.embed(spec)?)?;
                    let r = vals[g.args[1].gate].checked_mul(&g.args[1].weight.embed(spec)?)?;
                    if g.kind == GateKind::Add {
                        l.checked_add(&r)?
                    } else {
                        l.checked_mul(&r)?
                    }
                }
            };
            vals.push(v);
        }
        Ok(vals)
    }

    pub fn evaluate(&self, assignment: &HashMap<String, FieldElement>, spec: &FieldSpec) -> Result<Vec<FieldElement>> {
        let vals = self.gate_values(assignment, spec)?;
        self.outputs.iter().map(|o| vals[o.gate].checked_mul(&o.scale.embed(spec)?)).collect()
    }

    /// Evaluates a single-output circuit.
    pub fn evaluate_single(&self, assignment: &HashMap<String, FieldElement>, spec: &FieldSpec) -> Result<FieldElement> {
        self.single_output()?;
        Ok(self.evaluate(assignment, spec)?.remove(0))
    }

    /// Symbolic expansion of every output.
    pub fn expand(&self, spec: &FieldSpec) -> Result<Vec<DensePolynomial>> {
        let vals = self.gate_polynomials(spec)?;
        self.outputs.iter().map(|o| vals[o.gate].scale(&o.scale.embed(spec)?)).collect()
    }

    /// Symbolic expansion of every gate (unscaled).
    pub fn gate_polynomials(&self, spec: &FieldSpec) -> Result<Vec<DensePolynomial>> {
        let mut vals: Vec<DensePolynomial> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let v = match &g.kind {
                GateKind::Var(x) => DensePolynomial::var(x, spec),
                GateKind::Const(c) => DensePolynomial::constant(c.embed(spec)?),
                GateKind::Add | GateKind::Mul => {
                    let l = vals[g.args[0].gate].scale(&g.args[0].weight.embed(spec)?)?;
                    let r = vals[g.args[1].gate].scale(&g.args[1].weight.embed(spec)?)?;
                    if g.kind == GateKind::Add {
                        l.add(&r)?
                    } else {
                        l.mul(&r)?
                    }
                }
            };
            vals.push(v);
        }
        Ok(vals)
    }

    pub fn expand_single(&self, spec: &FieldSpec) -> Result<DensePolynomial> {
        self.single_output()?;
        Ok(self.expand(spec)?.remove(0))
    }

    /// Copy with the given output list; unreachable gates are dropped.
    pub fn with_outputs(&self, outputs: Vec<Output>) -> Result<Circuit> {
        let mut b = CircuitBuilder::new(self.vars.clone())?;
        b.gates = self.gates.clone();
        b.finish_pruned(outputs)
    }

    /// Text format: `vars ...`, one gate per line, then `output ...`.
    pub fn render(&self) -> String {
        let mut out = String::from("vars");
        for v in &self.vars {
            out.push(' ');
            out.push_str(v);
        }
        out.push('\n');
        for (id, g) in self.gates.iter().enumerate() {
            let _ = write!(out, "g{id} = ");
            match &g.kind {
                GateKind::Var(x) => out.push_str(&format!("input {x}")),
                GateKind::Const(c) => out.push_str(&format!("const {c}")),
                GateKind::Add | GateKind::Mul => {
                    out.push_str(if g.kind == GateKind::Add { "add" } else { "mul" });
                    for a in &g.args {
                        let _ = write!(out, " {}", weighted_ref(a.gate, &a.weight));
                    }
                }
            }
            out.push('\n');
        }
        out.push_str("output");
        for o in &self.outputs {
            let _ = write!(out, " {}", weighted_ref(o.gate, &o.scale));
        }
        out.push('\n');
        out
    }

    pub fn parse(text: &str) -> Result<Circuit> {
        Circuit::parse_with(text, &FieldSpec::Rational)
    }

    /// Parses the text format; constants are read in `spec`.
    pub fn parse_with(text: &str, spec: &FieldSpec) -> Result<Circuit> {
        let err = |line: usize, msg: &str| Error::SyntaxError { pos: line, msg: msg.to_string() };
        let mut vars: Option<Vec<String>> = None;
        let mut raw: Vec<RawGate> = Vec::new();
        let mut outputs: Option<Vec<(usize, FieldElement)>> = None;
        for (ln, line) in text.lines().enumerate() {
            let ln = ln + 1;
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            let head = words.next().unwrap();
            match head {
                "vars" => vars = Some(words.map(str::to_string).collect()),
                "output" => {
                    let outs = words.map(|w| parse_ref(w, spec, ln)).collect::<Result<Vec<_>>>()?;
                    outputs = Some(outs);
                }
                _ => {
                    let id = parse_id(head).ok_or_else(|| err(ln, "expected gate id `g<n>`"))?;
                    if words.next() != Some("=") {
                        return Err(err(ln, "expected `=`"));
                    }
                    let op = words.next().ok_or_else(|| err(ln, "missing gate kind"))?;
                    let rest: Vec<&str> = words.collect();
                    let (kind, args) = match op {
                        "input" => match rest.as_slice() {
                            [name] => (GateKind::Var(name.to_string()), Vec::new()),
                            _ => return Err(err(ln, "input takes one variable name")),
                        },
                        "const" => match rest.as_slice() {
                            [c] => (GateKind::Const(spec.parse(c)?), Vec::new()),
                            _ => return Err(err(ln, "const takes one constant")),
                        },
                        "add" | "mul" => {
                            let args = rest.iter().map(|w| parse_ref(w, spec, ln)).collect::<Result<Vec<_>>>()?;
                            if args.len() != 2 {
                                return Err(Error::BadArity(id));
                            }
                            (if op == "add" { GateKind::Add } else { GateKind::Mul }, args)
                        }
                        _ => return Err(err(ln, "unknown gate kind")),
                    };
                    raw.push((id, kind, args));
                }
            }
        }
        let vars = vars.ok_or_else(|| err(0, "missing `vars` line"))?;
        let outputs = outputs.ok_or(Error::NoOutput)?;
        assemble(vars, raw, outputs)
    }
}

fn weighted_ref(gate: usize, w: &FieldElement) -> String {
    if w.is_one() {
        format!("g{gate}")
    } else {
        format!("g{gate}*{w}")
    }
}

fn parse_id(word: &str) -> Option<usize> {
    word.strip_prefix('g')?.parse().ok()
}

fn parse_ref(word: &str, spec: &FieldSpec, ln: usize) -> Result<(usize, FieldElement)> {
    let (id, w) = match word.split_once('*') {
        Some((id, w)) => (id, spec.parse(w)?),
        None => (word, spec.one()),
    };
    let id = parse_id(id).ok_or(Error::SyntaxError { pos: ln, msg: format!("bad gate reference `{word}`") })?;
    Ok((id, w))
}

/// A parsed gate line: declared id, kind, and weighted argument ids.
type RawGate = (usize, GateKind, Vec<(usize, FieldElement)>);

/// Orders raw gates topologically and builds a validated circuit.
fn assemble(
    vars: Vec<String>,
    raw: Vec<RawGate>,
    outputs: Vec<(usize, FieldElement)>,
) -> Result<Circuit> {
    let mut index: HashMap<usize, usize> = HashMap::new();
    for (pos, (id, _, _)) in raw.iter().enumerate() {
        if index.insert(*id, pos).is_some() {
            return Err(Error::SyntaxError { pos: 0, msg: format!("gate g{id} defined twice") });
        }
    }
    for (_, _, args) in &raw {
        for (a, _) in args {
            if !index.contains_key(a) {
                return Err(Error::UnknownGate(*a));
            }
        }
    }
    for (o, _) in &outputs {
        if !index.contains_key(o) {
            return Err(Error::UnknownGate(*o));
        }
    }
    // iterative DFS; state 1 = on stack, 2 = done
    let mut state = vec![0u8; raw.len()];
    let mut order: Vec<usize> = Vec::with_capacity(raw.len());
    for start in 0..raw.len() {
        if state[start] != 0 {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        state[start] = 1;
        while let Some((pos, next)) = stack.pop() {
            let args = &raw[pos].2;
            if next < args.len() {
                stack.push((pos, next + 1));
                let child = index[&args[next].0];
                match state[child] {
                    0 => {
                        state[child] = 1;
                        stack.push((child, 0));
                    }
                    1 => return Err(Error::CyclicCircuit(raw[child].0)),
                    _ => {}
                }
            } else {
                state[pos] = 2;
                order.push(pos);
            }
        }
    }
    let mut new_id = vec![0usize; raw.len()];
    for (i, pos) in order.iter().enumerate() {
        new_id[*pos] = i;
    }
    let mut b = CircuitBuilder::new(vars)?;
    for pos in &order {
        let (_, kind, args) = &raw[*pos];
        let args = args.iter().map(|(a, w)| Arg { gate: new_id[index[a]], weight: w.clone() }).collect();
        b.gates.push(Gate { kind: kind.clone(), args });
    }
    let outputs = outputs.into_iter().map(|(o, s)| Output { gate: new_id[index[&o]], scale: s }).collect();
    b.finish(outputs).map_err(|e| match e {
        Error::UnreachableGate(g) => Error::UnreachableGate(raw[order[g]].0),
        other => other,
    })
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Appends gates in topological order; `finish` validates.
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    vars: Vec<String>,
    gates: Vec<Gate>,
}

impl CircuitBuilder {
    pub fn new(vars: Vec<String>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for v in &vars {
            if !seen.insert(v.clone()) {
                return Err(Error::DuplicateVariable(v.clone()));
            }
        }
        Ok(CircuitBuilder { vars, gates: Vec::new() })
    }

    pub fn with_vars(vars: &[&str]) -> Result<Self> {
        CircuitBuilder::new(vars.iter().map(|v| v.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Declares `name` if needed and adds an input gate for it.
    pub fn input(&mut self, name: &str) -> usize {
        if !self.vars.iter().any(|v| v == name) {
            self.vars.push(name.to_string());
        }
        self.push(Gate { kind: GateKind::Var(name.to_string()), args: Vec::new() })
    }

    pub fn constant(&mut self, c: FieldElement) -> usize {
        self.push(Gate { kind: GateKind::Const(c), args: Vec::new() })
    }

    pub fn add(&mut self, a: usize, b: usize) -> usize {
        self.add_weighted(a, FieldElement::integer(1), b, FieldElement::integer(1))
    }

    pub fn mul(&mut self, a: usize, b: usize) -> usize {
        self.mul_weighted(a, FieldElement::integer(1), b, FieldElement::integer(1))
    }

    pub fn add_weighted(&mut self, a: usize, wa: FieldElement, b: usize, wb: FieldElement) -> usize {
        self.binary(GateKind::Add, a, wa, b, wb)
    }

    pub fn mul_weighted(&mut self, a: usize, wa: FieldElement, b: usize, wb: FieldElement) -> usize {
        self.binary(GateKind::Mul, a, wa, b, wb)
    }

    fn binary(&mut self, kind: GateKind, a: usize, wa: FieldElement, b: usize, wb: FieldElement) -> usize {
        assert!(a < self.gates.len() && b < self.gates.len(), "arguments must already exist");
        self.push(Gate { kind, args: vec![Arg { gate: a, weight: wa }, Arg { gate: b, weight: wb }] })
    }

    fn push(&mut self, g: Gate) -> usize {
        self.gates.push(g);
        self.gates.len() - 1
    }

    /// Validates: arity, declared variables, nonempty outputs, every gate
    /// reachable from an output.
    pub fn finish(self, outputs: Vec<Output>) -> Result<Circuit> {
        if outputs.is_empty() {
            return Err(Error::NoOutput);
        }
        for (id, g) in self.gates.iter().enumerate() {
            let arity = if g.is_computation() { 2 } else { 0 };
            if g.args.len() != arity {
                return Err(Error::BadArity(id));
            }
            if g.args.iter().any(|a| a.gate >= id) {
                return Err(Error::CyclicCircuit(id));
            }
            if let GateKind::Var(x) = &g.kind {
                if !self.vars.contains(x) {
                    return Err(Error::UnknownVariable(x.clone()));
                }
            }
        }
        for o in &outputs {
            if o.gate >= self.gates.len() {
                return Err(Error::UnknownGate(o.gate));
            }
        }
        let live = live_gates(&self.gates, &outputs);
        if let Some(dead) = live.iter().position(|l| !l) {
            return Err(Error::UnreachableGate(dead));
        }
        Ok(Circuit { gates: self.gates, outputs, vars: self.vars })
    }

    /// Drops gates not reachable from an output, renumbers, then validates.
    pub fn finish_pruned(self, outputs: Vec<Output>) -> Result<Circuit> {
        for o in &outputs {
            if o.gate >= self.gates.len() {
                return Err(Error::UnknownGate(o.gate));
            }
        }
        let live = live_gates(&self.gates, &outputs);
        let mut new_id = vec![usize::MAX; self.gates.len()];
        let mut gates = Vec::new();
        for (id, g) in self.gates.into_iter().enumerate() {
            if live[id] {
                new_id[id] = gates.len();
                let args = g.args.into_iter().map(|a| Arg { gate: new_id[a.gate], weight: a.weight }).collect();
                gates.push(Gate { kind: g.kind, args });
            }
        }
        let outputs = outputs.into_iter().map(|o| Output { gate: new_id[o.gate], scale: o.scale }).collect();
        CircuitBuilder { vars: self.vars, gates }.finish(outputs)
    }

    /// Single output with scale 1.
    pub fn finish_single(self, out: usize) -> Result<Circuit> {
        self.finish(vec![Output { gate: out, scale: FieldElement::integer(1) }])
    }
}

fn live_gates(gates: &[Gate], outputs: &[Output]) -> Vec<bool> {
    let mut live = vec![false; gates.len()];
    for o in outputs {
        live[o.gate] = true;
    }
    for id in (0..gates.len()).rev() {
        if live[id] {
            for a in &gates[id].args {
                live[a.gate] = true;
            }
        }
    }
    live
}

pub(crate) fn q(n: i64) -> FieldElement {
    FieldElement::integer(n)
}

/// Circuits drawn in the worked example, all computing `(x+y)^2 + 2yz`.
pub mod examples {
    use super::*;

    /// A general circuit: `x (x+y) + y (x+y+2z)` with `x+y` shared by both
    /// products, so neither product has a closed argument.
    pub fn general() -> Circuit {
        let mut b = CircuitBuilder::with_vars(&["x", "y", "z"]).unwrap();
        let x = b.input("x");
        let y = b.input("y");
        let z = b.input("z");
        let a = b.add(x, y);
        let az = b.add_weighted(a, q(1), z, q(2));
        let m1 = b.mul(x, a);
        let m2 = b.mul(y, az);
        let out = b.add(m1, m2);
        b.finish_single(out).unwrap()
    }

    /// A weakly-skew circuit: `(x+y)` is reusable and feeds a product whose
    /// other argument is a closed copy of `x+y`; `z + z` is closed inside `y (z+z)`.
    pub fn weakly_skew() -> Circuit {
        let mut b = CircuitBuilder::with_vars(&["x", "y", "z"]).unwrap();
        let x = b.input("x");
        let y = b.input("y");
        let a = b.add(x, y);
        let x2 = b.input("x");
        let y2 = b.input("y");
        let a2 = b.add(x2, y2);
        let m1 = b.mul(a2, a);
        let z = b.input("z");
        let zz = b.add(z, z);
        let m2 = b.mul(y, zz);
        let out = b.add(m1, m2);
        b.finish_single(out).unwrap()
    }

    /// The formula `(x+y)*(x+y) + 2*y*z`.
    pub fn formula() -> Circuit {
        parse_expression("(x+y)*(x+y) + 2*y*z").unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn point(vals: &[(&str, i64)]) -> HashMap<String, FieldElement> {
        vals.iter().map(|(k, v)| (k.to_string(), q(*v))).collect()
    }

    #[test]
    fn single_input() {
        let mut b = CircuitBuilder::with_vars(&["x"]).unwrap();
        let x = b.input("x");
        let c = b.finish_single(x).unwrap();
        assert_eq!(c.fat_size(), 1);
        assert_eq!(c.skinny_size(), 0);
    }

    #[test]
    fn rejects_cycles_and_bad_arity() {
        let cyc = "vars x\ng0 = input x\ng1 = add g0 g1\noutput g1\n";
        assert_eq!(Circuit::parse(cyc), Err(Error::CyclicCircuit(1)));
        let arity = "vars x\ng0 = input x\ng1 = add g0\noutput g1\n";
        assert_eq!(Circuit::parse(arity), Err(Error::BadArity(1)));
        let dead = "vars x\ng0 = input x\ng1 = input x\noutput g0\n";
        assert_eq!(Circuit::parse(dead), Err(Error::UnreachableGate(1)));
        assert_eq!(Circuit::parse("vars x x\ng0 = input x\noutput g0\n"), Err(Error::DuplicateVariable("x".into())));
        assert_eq!(Circuit::parse("vars x\ng0 = input y\noutput g0\n"), Err(Error::UnknownVariable("y".into())));
        assert_eq!(Circuit::parse("vars x\ng0 = input x\n"), Err(Error::NoOutput));
        assert_eq!(Circuit::parse("vars x\ng0 = add g0 g7\noutput g0\n"), Err(Error::UnknownGate(7)));
    }

    #[test]
    fn example_circuits_evaluate_to_21() {
        let p = point(&[("x", 1), ("y", 2), ("z", 3)]);
        for c in [examples::general(), examples::weakly_skew(), examples::formula()] {
            assert_eq!(c.evaluate_single(&p, &FieldSpec::Rational).unwrap(), q(21));
        }
    }

    #[test]
    fn weighted_arrow_semantics() {
        let text = "vars x\ng0 = input x\ng1 = const 1\ng2 = add g0 g1*5\noutput g2\n";
        let c = Circuit::parse(text).unwrap();
        assert_eq!(c.evaluate_single(&point(&[("x", 0)]), &FieldSpec::Rational).unwrap(), q(5));
    }

    #[test]
    fn constant_circuit_ignores_assignment() {
        let c = Circuit::parse("vars x\ng0 = const 3\ng1 = const 4\ng2 = mul g0 g1\noutput g2\n").unwrap();
        for v in [0, 1, 9] {
            assert_eq!(c.evaluate_single(&point(&[("x", v)]), &FieldSpec::Rational).unwrap(), q(12));
        }
    }

    #[test]
    fn missing_assignment() {
        let c = examples::formula();
        let err = c.evaluate_single(&point(&[("x", 1)]), &FieldSpec::Rational).unwrap_err();
        assert!(matches!(err, Error::MissingAssignment(_)));
    }

    #[test]
    fn parser_reorders_and_round_trips() {
        let text = "vars x y\ng5 = add g1*-1 g2*1/2\ng1 = input x\ng2 = input y\noutput g5*3\n";
        let c = Circuit::parse(text).unwrap();
        assert_eq!(c.gate(2).kind, GateKind::Add);
        let again = Circuit::parse(&c.render()).unwrap();
        assert_eq!(again, c);
        let p = point(&[("x", 2), ("y", 4)]);
        assert_eq!(c.evaluate_single(&p, &FieldSpec::Rational).unwrap(), q(0));
    }

    #[test]
    fn sizes() {
        let c = parse_expression("x + y").unwrap();
        let r = c.measure();
        assert_eq!((r.skinny, r.fat, r.var_inputs, r.green), (1, 3, 2, Some(1)));
        assert_eq!(parse_expression("2*(x+y)").unwrap().measure().green, Some(1));
    }

    #[test]
    fn expansion_matches_evaluation_on_examples() {
        let expected = DensePolynomial::parse("x^2 + 2 * x y + y^2 + 2 * y z", &FieldSpec::Rational).unwrap();
        for c in [examples::general(), examples::weakly_skew(), examples::formula()] {
            assert_eq!(c.expand_single(&FieldSpec::Rational).unwrap(), expected);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn evaluate_agrees_with_expansion(seed in any::<u64>(), formula in any::<bool>()) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let class = if formula { CircuitClass::Formula } else { CircuitClass::WeaklySkew };
            let spec = RandomSpec { class, max_gates: 8, num_vars: 3, weighted: true, constants: true };
            let c = random_circuit(&spec, &mut rng);
            let f = FieldSpec::default_prime();
            let poly = c.expand_single(&f).unwrap();
            let p: HashMap<String, FieldElement> =
                c.vars().iter().map(|v| (v.clone(), f.sample_random(&mut rng).unwrap())).collect();
            prop_assert_eq!(c.evaluate_single(&p, &f).unwrap(), poly.eval(&p).unwrap());
            let again = Circuit::parse(&c.render()).unwrap();
            prop_assert_eq!(again.evaluate_single(&p, &f).unwrap(), c.evaluate_single(&p, &f).unwrap());
        }
    }
}
