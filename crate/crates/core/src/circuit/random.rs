use rand::seq::SliceRandom;
use rand::Rng;

use super::{Circuit, CircuitBuilder, GateKind, Output};
use crate::field::FieldElement;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CircuitClass {
    Formula,
    WeaklySkew,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomSpec {
    pub class: CircuitClass,
    /// Upper bound on the number of computation gates.
    pub max_gates: usize,
    /// Variables are named `x1..xn`.
    pub num_vars: usize,
    /// Draw arrow weights other than 1.
    pub weighted: bool,
    /// Allow constant input gates.
    pub constants: bool,
}

const CONSTANTS: [(i64, i64); 5] = [(2, 1), (3, 1), (-1, 1), (1, 2), (5, 1)];
const WEIGHTS: [(i64, i64); 5] = [(-1, 1), (2, 1), (3, 1), (1, 2), (-2, 3)];

struct Gen<'a, R: Rng> {
    spec: &'a RandomSpec,
    rng: &'a mut R,
    b: CircuitBuilder,
}

impl<R: Rng> Gen<'_, R> {
    fn weight(&mut self) -> FieldElement {
        if self.spec.weighted && self.rng.gen_bool(0.3) {
            let (n, d) = *WEIGHTS.choose(self.rng).unwrap();
            FieldElement::rational(n, d)
        } else {
            FieldElement::integer(1)
        }
    }

    fn leaf(&mut self) -> usize {
        if self.spec.constants && self.rng.gen_bool(0.12) {
            let (n, d) = *CONSTANTS.choose(self.rng).unwrap();
            self.b.constant(FieldElement::rational(n, d))
        } else {
            let v = self.rng.gen_range(1..=self.spec.num_vars);
            self.b.input(&format!("x{v}"))
        }
    }

    fn binary(&mut self, mul: bool, a: usize, b: usize) -> usize {
        let (wa, wb) = (self.weight(), self.weight());
        if mul {
            self.b.mul_weighted(a, wa, b, wb)
        } else {
            self.b.add_weighted(a, wa, b, wb)
        }
    }

    /// A tree with exactly `size` computation gates.
    fn formula(&mut self, size: usize) -> usize {
        if size == 0 {
            return self.leaf();
        }
        let left = self.rng.gen_range(0..size);
        let l = self.formula(left);
        let r = self.formula(size - 1 - left);
        let mul = self.rng.gen_bool(0.45);
        self.binary(mul, l, r)
    }

    /// A region with at most `size` computation gates whose root is
    /// returned; its gates are never used outside the region.
    fn weakly_skew(&mut self, size: usize) -> usize {
        let mut pool = vec![self.leaf()];
        let mut used = 0;
        let mut root = pool[0];
        while used < size {
            let reusable = self.pick(&mut pool);
            if self.rng.gen_bool(0.5) {
                let other = self.pick(&mut pool);
                root = self.binary(false, reusable, other);
            } else {
                let budget = self.rng.gen_range(0..size - used);
                let closed = self.weakly_skew(budget);
                used += budget;
                root = if self.rng.gen_bool(0.5) {
                    self.binary(true, closed, reusable)
                } else {
                    self.binary(true, reusable, closed)
                };
            }
            used += 1;
            pool.push(root);
        }
        root
    }

    /// A pool member, or a fresh leaf added to the pool.
    fn pick(&mut self, pool: &mut Vec<usize>) -> usize {
        if self.rng.gen_bool(0.3) {
            let leaf = self.leaf();
            pool.push(leaf);
            leaf
        } else {
            *pool.choose(self.rng).unwrap()
        }
    }
}

/// Random single-output circuit of the requested class with at most
/// `max_gates` computation gates and at least one variable input.
/// Deterministic for a fixed generator state.
pub fn random_circuit<R: Rng>(spec: &RandomSpec, rng: &mut R) -> Circuit {
    assert!(spec.num_vars >= 1, "need at least one variable");
    let vars: Vec<String> = (1..=spec.num_vars).map(|i| format!("x{i}")).collect();
    loop {
        let size = rng.gen_range(0..=spec.max_gates);
        let mut g = Gen { spec, rng: &mut *rng, b: CircuitBuilder::new(vars.clone()).unwrap() };
        let root = match spec.class {
            CircuitClass::Formula => g.formula(size),
            CircuitClass::WeaklySkew => g.weakly_skew(size),
        };
        let out = Output { gate: root, scale: FieldElement::integer(1) };
        let c = g.b.finish_pruned(vec![out]).expect("generated circuits are valid");
        if c.gates().iter().any(|g| matches!(g.kind, GateKind::Var(_))) {
            return c;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::classify;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec(class: CircuitClass, max_gates: usize) -> RandomSpec {
        RandomSpec { class, max_gates, num_vars: 3, weighted: true, constants: true }
    }

    #[test]
    fn empty_budget_gives_single_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = RandomSpec { constants: false, ..spec(CircuitClass::Formula, 0) };
        let c = random_circuit(&s, &mut rng);
        assert_eq!(c.fat_size(), 1);
    }

    #[test]
    fn deterministic_per_seed() {
        for class in [CircuitClass::Formula, CircuitClass::WeaklySkew] {
            let a = random_circuit(&spec(class, 15), &mut ChaCha8Rng::seed_from_u64(9));
            let b = random_circuit(&spec(class, 15), &mut ChaCha8Rng::seed_from_u64(9));
            assert_eq!(a, b);
        }
    }

    #[test]
    fn classes_and_budgets_respected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let f = random_circuit(&spec(CircuitClass::Formula, 10), &mut rng);
            assert!(classify(&f).is_formula);
            assert!(f.skinny_size() <= 10);
            let w = random_circuit(&spec(CircuitClass::WeaklySkew, 12), &mut rng);
            assert!(classify(&w).is_weakly_skew);
            assert!(w.skinny_size() <= 12);
            assert!(w.fat_size() <= 2 * 12 + 1);
        }
    }
}
