//! Weight-pushing minimization: afterwards every constant input is labelled 1
//! and has out-degree 1, additions have at most one constant argument (an
//! input), and multiplications have no constant argument.
//!
//! The rewrite rules are applied in one topological pass. Each old gate maps
//! either to a constant value (folded into the weights of its consumers, which
//! replaces constant inputs and constant sub-computations by fresh 1-inputs,
//! one per arrow) or to `factor * new_gate` (a multiplication by a constant
//! argument disappears and its factor moves onto the outgoing arrows).

use crate::circuit::{Circuit, CircuitBuilder, GateKind, Output};
use crate::error::{Error, Result};
use crate::field::FieldElement;

#[derive(Clone)]
enum Image {
    Const(FieldElement),
    Scaled(usize, FieldElement),
}

pub fn minimize(c: &Circuit) -> Result<Circuit> {
    let constant = c.constant_gates();
    if c.outputs().iter().all(|o| constant[o.gate]) {
        return Err(Error::ConstantCircuit);
    }
    let one = || FieldElement::integer(1);
    let mut b = CircuitBuilder::new(c.vars().to_vec())?;
    let mut image: Vec<Image> = Vec::with_capacity(c.len());
    for g in c.gates() {
        let img = match &g.kind {
            GateKind::Var(x) => Image::Scaled(b.input(x), one()),
            GateKind::Const(v) => Image::Const(v.clone()),
            kind => {
                let mut parts = Vec::with_capacity(2);
                for a in &g.args {
                    parts.push(match &image[a.gate] {
                        Image::Const(v) => Image::Const(v.checked_mul(&a.weight)?),
                        Image::Scaled(id, f) => Image::Scaled(*id, f.checked_mul(&a.weight)?),
                    });
                }
                let is_add = *kind == GateKind::Add;
                match (&parts[0], &parts[1]) {
                    (Image::Const(l), Image::Const(r)) => {
                        Image::Const(if is_add { l.checked_add(r)? } else { l.checked_mul(r)? })
                    }
                    (Image::Const(k), Image::Scaled(id, f)) | (Image::Scaled(id, f), Image::Const(k)) if !is_add => {
                        Image::Scaled(*id, f.checked_mul(k)?)
                    }
                    _ => {
                        let (l, lw) = materialize(&mut b, &parts[0]);
                        let (r, rw) = materialize(&mut b, &parts[1]);
                        let id = if is_add { b.add_weighted(l, lw, r, rw) } else { b.mul_weighted(l, lw, r, rw) };
                        Image::Scaled(id, one())
                    }
                }
            }
        };
        image.push(img);
    }
    let mut outputs = Vec::new();
    for o in c.outputs() {
        let (gate, f) = materialize(&mut b, &image[o.gate]);
        outputs.push(Output { gate, scale: f.checked_mul(&o.scale)? });
    }
    // An output scale goes onto the arrows into the output gate when that
    // gate feeds nothing else.
    let mut gates = b.gates().to_vec();
    let mut consumers = vec![0usize; gates.len()];
    for g in &gates {
        for a in &g.args {
            consumers[a.gate] += 1;
        }
    }
    for o in &outputs {
        consumers[o.gate] += 1;
    }
    for o in outputs.iter_mut() {
        if o.scale.is_one() || consumers[o.gate] > 1 {
            continue;
        }
        let g = &mut gates[o.gate];
        match g.kind {
            GateKind::Add => {
                for a in g.args.iter_mut() {
                    a.weight = a.weight.checked_mul(&o.scale)?;
                }
            }
            GateKind::Mul => g.args[0].weight = g.args[0].weight.checked_mul(&o.scale)?,
            _ => continue,
        }
        o.scale = one();
    }
    let mut rebuilt = CircuitBuilder::new(c.vars().to_vec())?;
    for g in gates {
        match g.kind {
            GateKind::Var(x) => {
                rebuilt.input(&x);
            }
            GateKind::Const(v) => {
                rebuilt.constant(v);
            }
            GateKind::Add => {
                rebuilt.add_weighted(g.args[0].gate, g.args[0].weight.clone(), g.args[1].gate, g.args[1].weight.clone());
            }
            GateKind::Mul => {
                rebuilt.mul_weighted(g.args[0].gate, g.args[0].weight.clone(), g.args[1].gate, g.args[1].weight.clone());
            }
        }
    }
    rebuilt.finish_pruned(outputs)
}

/// A gate for `img`: a fresh 1-input carrying the constant, or the image gate.
fn materialize(b: &mut CircuitBuilder, img: &Image) -> (usize, FieldElement) {
    match img {
        Image::Const(v) => (b.constant(FieldElement::integer(1)), v.clone()),
        Image::Scaled(id, f) => (*id, f.clone()),
    }
}

/// Checks the three normal-form conditions.
pub fn is_minimized(c: &Circuit) -> bool {
    let constant = c.constant_gates();
    let degrees = c.out_degrees();
    let outputs: Vec<usize> = c.outputs().iter().map(|o| o.gate).collect();
    c.gates().iter().enumerate().all(|(id, g)| match &g.kind {
        GateKind::Var(_) => true,
        GateKind::Const(v) => v.is_one() && degrees[id] + outputs.iter().filter(|o| **o == id).count() == 1,
        GateKind::Add => {
            let consts: Vec<_> = g.args.iter().filter(|a| constant[a.gate]).collect();
            consts.len() <= 1 && consts.iter().all(|a| c.gate(a.gate).is_input())
        }
        GateKind::Mul => g.args.iter().all(|a| !constant[a.gate]),
    })
}
