use std::collections::{BTreeMap, BTreeSet};

use super::{Circuit, GateKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WsClassification {
    pub is_formula: bool,
    pub is_weakly_skew: bool,
    /// Multiplication gate -> (closed argument, gates of its closed sub-circuit).
    pub closed_subcircuit_of: BTreeMap<usize, (usize, BTreeSet<usize>)>,
    /// Gates lying in no closed sub-circuit.
    pub reusable: BTreeSet<usize>,
}

impl WsClassification {
    pub fn is_reusable(&self, gate: usize) -> bool {
        self.reusable.contains(&gate)
    }

    /// The closed argument of a multiplication gate and its other argument.
    pub fn split(&self, c: &Circuit, mul: usize) -> Option<(usize, usize)> {
        let (closed, _) = self.closed_subcircuit_of.get(&mul)?;
        let args = &c.gate(mul).args;
        let other = if args[0].gate == *closed { args[1].gate } else { args[0].gate };
        Some((*closed, other))
    }
}

/// Whether the sub-circuit of `arg` is attached to the rest of `c` only by
/// the single arrow `arg -> mul`.
fn is_closed(c: &Circuit, consumers: &[Vec<usize>], arg: usize, mul: usize) -> Option<BTreeSet<usize>> {
    if consumers[arg] != [mul] {
        return None;
    }
    let sub = c.sub_circuit(arg);
    for g in &sub {
        if c.is_output(*g) {
            return None;
        }
        if *g != arg && consumers[*g].iter().any(|u| !sub.contains(u)) {
            return None;
        }
    }
    Some(sub)
}

/// Classifies a validated circuit. When both arguments of a multiplication
/// are closed, the left one is recorded.
pub fn classify(c: &Circuit) -> WsClassification {
    let consumers = c.consumers();
    let mut closed_subcircuit_of = BTreeMap::new();
    let mut is_weakly_skew = true;
    for (id, g) in c.gates().iter().enumerate() {
        if g.kind != GateKind::Mul {
            continue;
        }
        let found = g
            .args
            .iter()
            .find_map(|a| is_closed(c, &consumers, a.gate, id).map(|sub| (a.gate, sub)));
        match found {
            Some(entry) => {
                closed_subcircuit_of.insert(id, entry);
            }
            None => is_weakly_skew = false,
        }
    }
    let mut reusable: BTreeSet<usize> = (0..c.len()).collect();
    for (_, sub) in closed_subcircuit_of.values() {
        for g in sub {
            reusable.remove(g);
        }
    }
    let is_formula = consumers
        .iter()
        .enumerate()
        .all(|(id, cons)| if c.is_output(id) { cons.is_empty() } else { cons.len() == 1 });
    WsClassification { is_formula, is_weakly_skew, closed_subcircuit_of, reusable }
}
