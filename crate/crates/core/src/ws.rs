//! Determinantal representations of weakly-skew circuits.
//!
//! Reusable gates are lowered in topological order. An input or an addition
//! becomes a gadget with a fresh sink; a multiplication lowers its closed
//! sub-circuit starting from the sink of its other argument, so the two
//! factors are traversed one after the other. The same traversal produces an
//! undirected graph (symmetric matrix, odd paths through `v - t` pairs) or an
//! algebraic branching program (non-symmetric matrix).

use std::collections::{BTreeMap, BTreeSet};

use crate::circuit::{classify, Circuit, GateKind, WsClassification};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::graph::{SymbolicMatrix, Weight, WeightedDigraph, WeightedGraph};
use crate::minimize::minimize;
use crate::poly::DensePolynomial;

/// How circuit size is counted, and therefore which circuit is lowered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WsMode {
    /// The circuit as given; every input, constants included, gets a gadget.
    Fat,
    /// The minimized circuit; constant arguments of additions are free.
    Green,
}

fn one() -> FieldElement {
    FieldElement::integer(1)
}

/// Receives gadgets: each call adds a gadget whose sink collects the
/// weighted sum of the given sources and returns that sink.
trait Target {
    fn sum(&mut self, terms: &[(usize, Weight)]) -> usize;
}

/// Merges terms with the same source (possible when both arguments of an
/// addition are the same gate) and drops zero weights.
fn merged(terms: &[(usize, Weight)]) -> Result<Vec<(usize, Weight)>> {
    let mut out: Vec<(usize, Weight)> = Vec::with_capacity(terms.len());
    for (from, w) in terms {
        match out.iter_mut().find(|(f, _)| f == from) {
            Some((_, acc)) => {
                let (Some(a), Some(b)) = (acc.as_const(), w.as_const()) else {
                    unreachable!("only constant weights leave the same vertex twice");
                };
                *acc = Weight::Const(a.checked_add(b)?);
            }
            None => out.push((*from, w.clone())),
        }
    }
    out.retain(|(_, w)| !w.is_zero());
    Ok(out)
}

/// Gadget `sources - v - t` with `v - t` of weight -1.
struct SymTarget(WeightedGraph);

impl Target for SymTarget {
    fn sum(&mut self, terms: &[(usize, Weight)]) -> usize {
        let v = self.0.add_vertex();
        let t = self.0.add_vertex();
        for (from, w) in terms {
            self.0.set_edge(*from, v, w.clone());
        }
        self.0.set_edge(v, t, Weight::int(-1));
        t
    }
}

/// Gadget `sources -> t`.
struct AbpTarget(WeightedDigraph);

impl Target for AbpTarget {
    fn sum(&mut self, terms: &[(usize, Weight)]) -> usize {
        let t = self.0.add_vertex();
        for (from, w) in terms {
            self.0.set_arc(*from, t, w.clone());
        }
        t
    }
}

struct Lowering<'a, T> {
    c: &'a Circuit,
    k: &'a WsClassification,
    /// Constant inputs folded into the addition they feed.
    free_const: Vec<bool>,
    target: T,
}

type GateSinks = BTreeMap<usize, (usize, FieldElement)>;

impl<T: Target> Lowering<'_, T> {
    /// Lowers the gates of `members` that lie in no closed sub-circuit of a
    /// multiplication in `members`, starting from `source`. Returns, per
    /// lowered gate `g`, its sink `t_g` and constant `c_g`.
    fn scope(&mut self, members: &BTreeSet<usize>, source: usize) -> Result<GateSinks> {
        let mut nested = BTreeSet::new();
        for g in members {
            if let Some((_, closed)) = self.k.closed_subcircuit_of.get(g) {
                nested.extend(closed.iter().copied());
            }
        }
        let mut sinks = GateSinks::new();
        for &id in members.difference(&nested) {
            let gate = self.c.gate(id);
            let entry = match &gate.kind {
                GateKind::Var(x) => (self.target.sum(&[(source, Weight::var(x))]), one()),
                GateKind::Const(_) if self.free_const[id] => continue,
                GateKind::Const(k) => (self.target.sum(&[(source, Weight::Const(k.clone()))]), one()),
                GateKind::Add => {
                    let mut terms = Vec::with_capacity(2);
                    for a in &gate.args {
                        terms.push(match &self.c.gate(a.gate).kind {
                            GateKind::Const(k) if self.free_const[a.gate] => {
                                (source, Weight::Const(a.weight.checked_mul(k)?))
                            }
                            _ => {
                                let (t, c) = &sinks[&a.gate];
                                (*t, Weight::Const(a.weight.checked_mul(c)?))
                            }
                        });
                    }
                    (self.target.sum(&merged(&terms)?), one())
                }
                GateKind::Mul => {
                    let (closed, other) = self.k.split(self.c, id).ok_or(Error::NotWeaklySkew)?;
                    let weight_of = |g: usize| gate.args.iter().find(|a| a.gate == g).expect("argument").weight.clone();
                    let (t_other, c_other) = sinks[&other].clone();
                    let region = self.k.closed_subcircuit_of[&id].1.clone();
                    let inner = self.scope(&region, t_other)?;
                    let (t_closed, c_closed) = &inner[&closed];
                    let c = weight_of(closed).checked_mul(&weight_of(other))?.checked_mul(c_closed)?.checked_mul(&c_other)?;
                    (*t_closed, c)
                }
            };
            sinks.insert(id, entry);
        }
        Ok(sinks)
    }
}

/// The circuit to lower per `mode`, its classification, and the constants
/// that ride on addition gadgets.
fn prepare(c: &Circuit, mode: WsMode) -> Result<(Circuit, WsClassification, Vec<bool>)> {
    if !classify(c).is_weakly_skew {
        return Err(Error::NotWeaklySkew);
    }
    let source = match mode {
        WsMode::Fat => c.clone(),
        WsMode::Green => minimize(c)?,
    };
    let k = classify(&source);
    let consumers = source.consumers();
    let free_const = (0..source.len())
        .map(|id| {
            mode == WsMode::Green
                && matches!(source.gate(id).kind, GateKind::Const(_))
                && !source.is_output(id)
                && consumers[id].iter().all(|u| source.gate(*u).kind == GateKind::Add)
        })
        .collect();
    Ok((source, k, free_const))
}

fn lower<T: Target>(c: &Circuit, mode: WsMode, target: T) -> Result<(Circuit, GateSinks, T)> {
    let (source, k, free_const) = prepare(c, mode)?;
    let mut l = Lowering { c: &source, k: &k, free_const, target };
    let all: BTreeSet<usize> = (0..source.len()).collect();
    let sinks = l.scope(&all, 0)?;
    let target = l.target;
    Ok((source, sinks, target))
}

/// Graph with distinguished `s` and, per reusable gate, a sink and constant.
#[derive(Clone, Debug)]
pub struct WsCertificate {
    pub graph: WeightedGraph,
    pub s: usize,
    pub sinks: BTreeMap<usize, (usize, FieldElement)>,
    /// The circuit actually lowered (minimized in green mode).
    pub circuit: Circuit,
}

/// Outcome of the exhaustive certificate audit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WsAudit {
    pub odd_order: bool,
    pub cycles_even: bool,
    pub paths_odd: bool,
    /// `G - {s}` and `G - P` for every acceptable path `P` have a unique
    /// cycle cover, a perfect matching of weight 1.
    pub unique_matchings: bool,
    /// `c_a * sum over acceptable s-t_a paths of (-1)^((|P|-1)/2) w(P)` is the
    /// polynomial of `a` for every reusable gate.
    pub path_sums: bool,
}

impl WsAudit {
    pub fn holds(&self) -> bool {
        self.odd_order && self.cycles_even && self.paths_odd && self.unique_matchings && self.path_sums
    }
}

impl WsCertificate {
    /// Enumerates all paths to every sink; exponential, meant for small graphs.
    pub fn audit(&self, spec: &FieldSpec) -> Result<WsAudit> {
        let g = &self.graph;
        let n = g.num_vertices();
        let polys = self.circuit.gate_polynomials(spec)?;
        let mut removed = vec![false; n];
        removed[self.s] = true;
        let mut audit = WsAudit {
            odd_order: n % 2 == 1,
            cycles_even: g.is_bipartite(),
            paths_odd: true,
            unique_matchings: g.has_unique_unit_matching(&removed),
            path_sums: true,
        };
        for (gate, (t, c)) in &self.sinks {
            let mut sum = DensePolynomial::zero(spec);
            for p in g.paths(self.s, *t) {
                audit.paths_odd &= p.len() % 2 == 1;
                let mut removed = vec![false; n];
                for v in &p {
                    removed[*v] = true;
                }
                if g.cycle_covers(&removed, 1).is_empty() {
                    continue;
                }
                audit.unique_matchings &= g.has_unique_unit_matching(&removed);
                let w = g.path_weight(&p, spec)?;
                sum = if (p.len() / 2) % 2 == 0 { sum.add(&w)? } else { sum.sub(&w)? };
            }
            audit.path_sums &= sum.scale(&c.embed(spec)?)? == polys[*gate];
        }
        Ok(audit)
    }
}

/// Graph on at most `2m + 1` vertices (fat) or `2(e + i) + 1` (green).
/// Multiple outputs are allowed.
pub fn build_ws_graph(c: &Circuit, mode: WsMode) -> Result<WsCertificate> {
    let (circuit, sinks, target) = lower(c, mode, SymTarget(WeightedGraph::new(1)))?;
    let mut graph = target.0;
    graph.set_role("s", 0);
    for o in circuit.outputs() {
        graph.set_role(&format!("t{}", o.gate), sinks[&o.gate].0);
    }
    Ok(WsCertificate { graph, s: 0, sinks, circuit })
}

/// The certificate graph with the closing edge `t s` of weight
/// `c_out / 2 * (-1)^((|G| - 1)/2)`.
pub fn close_ws_graph(cert: &WsCertificate) -> Result<WeightedGraph> {
    let out = cert.circuit.single_output()?;
    let (t, c) = &cert.sinks[&out.gate];
    let mut g = cert.graph.clone();
    let sign = if (g.num_vertices() / 2).is_multiple_of(2) { one() } else { one().checked_neg() };
    let w = c.checked_mul(&out.scale)?.checked_mul(&FieldElement::rational(1, 2))?.checked_mul(&sign)?;
    g.set_edge(*t, cert.s, Weight::Const(w));
    Ok(g)
}

/// Symmetric matrix with determinant the circuit's polynomial.
pub fn ws_sym_matrix(c: &Circuit, mode: WsMode) -> Result<SymbolicMatrix> {
    c.single_output()?;
    Ok(close_ws_graph(&build_ws_graph(c, mode)?)?.adjacency())
}

/// Branching program from `s` to the output sink whose path-weight sum,
/// times the returned constant, is the polynomial.
pub fn build_ws_abp(c: &Circuit, mode: WsMode) -> Result<(WeightedDigraph, usize, FieldElement)> {
    c.single_output()?;
    let (circuit, sinks, target) = lower(c, mode, AbpTarget(WeightedDigraph::new(1)))?;
    let out = circuit.single_output()?;
    let (t, k) = &sinks[&out.gate];
    let mut g = target.0;
    g.set_role("s", 0);
    g.set_role("t", *t);
    Ok((g, *t, k.checked_mul(&out.scale)?))
}

/// Non-symmetric matrix of dimension at most `m + 1` (fat) or `e + i + 1`
/// (green): the program with its sink merged into `s` and a loop -1 on every
/// other vertex, so each cover is one path closed into a cycle plus loops and
/// the determinant is `(-1)^(V-1)` times the path sum on `V` vertices. A
/// final diagonal entry fixes sign and constant when they differ from 1.
pub fn ws_nonsym_matrix(c: &Circuit, mode: WsMode) -> Result<SymbolicMatrix> {
    let (g, t, k) = build_ws_abp(c, mode)?;
    let index = |u: usize| match u {
        u if u == t => 0,
        u if u > t => u - 1,
        u => u,
    };
    let v = g.num_vertices() - 1;
    let sign = if v % 2 == 1 { one() } else { one().checked_neg() };
    let fix = k.checked_mul(&sign)?;
    let dim = if fix.is_one() { v } else { v + 1 };
    let mut m = SymbolicMatrix::zeros(dim);
    for (a, b, w) in g.arcs() {
        m.entries[index(a)][index(b)] = w.clone();
    }
    for u in 1..v {
        m.entries[u][u] = Weight::int(-1);
    }
    if dim > v {
        m.entries[v][v] = Weight::Const(fix);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{examples, parse_expression, random_circuit, CircuitBuilder, CircuitClass, RandomSpec};
    use crate::poly::symbolic_det;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn q() -> FieldSpec {
        FieldSpec::Rational
    }

    fn single_input() -> Circuit {
        let mut b = CircuitBuilder::with_vars(&["x"]).unwrap();
        let x = b.input("x");
        b.finish_single(x).unwrap()
    }

    #[test]
    fn input_gadget() {
        let cert = build_ws_graph(&single_input(), WsMode::Fat).unwrap();
        assert_eq!(cert.graph.num_vertices(), 3);
        let (t, c) = &cert.sinks[&0];
        assert!(c.is_one());
        let v = cert.graph.neighbors(*t)[0];
        assert_eq!(cert.graph.edge(cert.s, v), Some(&Weight::var("x")));
        assert_eq!(cert.graph.edge(v, *t), Some(&Weight::int(-1)));
        assert!(cert.audit(&q()).unwrap().holds());
        let m = ws_sym_matrix(&single_input(), WsMode::Fat).unwrap();
        assert_eq!(m.dim(), 3);
        assert_eq!(symbolic_det(&m, &q()).unwrap(), DensePolynomial::var("x", &q()));
        let m = ws_nonsym_matrix(&single_input(), WsMode::Fat).unwrap();
        assert_eq!(m.entries, vec![vec![Weight::var("x")]]);
    }

    #[test]
    fn doubled_argument_merges_edges() {
        let mut b = CircuitBuilder::with_vars(&["z"]).unwrap();
        let z = b.input("z");
        let zz = b.add(z, z);
        let c = b.finish_single(zz).unwrap();
        let cert = build_ws_graph(&c, WsMode::Fat).unwrap();
        let (t_z, _) = cert.sinks[&z];
        let (t_zz, _) = cert.sinks[&zz];
        let v = cert.graph.neighbors(t_zz)[0];
        assert_eq!(cert.graph.edge(t_z, v), Some(&Weight::int(2)));
        assert!(cert.audit(&q()).unwrap().holds());
    }

    #[test]
    fn worked_example_circuit() {
        let c = examples::weakly_skew();
        let target = c.expand_single(&q()).unwrap();
        let cert = build_ws_graph(&c, WsMode::Fat).unwrap();
        // five inputs and four additions, two vertices each, plus s
        assert_eq!(cert.graph.num_vertices(), 19);
        assert!(cert.audit(&q()).unwrap().holds());
        let m = ws_sym_matrix(&c, WsMode::Fat).unwrap();
        assert!(m.dim() <= 2 * c.fat_size() + 1);
        let n = ws_nonsym_matrix(&c, WsMode::Fat).unwrap();
        assert!(n.dim() <= c.fat_size() + 1);
        assert_eq!(symbolic_det(&n, &q()).unwrap(), target);
        let f = FieldSpec::default_prime();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let point: HashMap<String, FieldElement> =
                c.vars().iter().map(|v| (v.clone(), f.sample_random(&mut rng).unwrap())).collect();
            let values = m.eval(&point, &f).unwrap();
            let det = crate::verify::det_values(values, &f).unwrap();
            assert_eq!(det, c.evaluate_single(&point, &f).unwrap());
        }
    }

    #[test]
    fn green_mode_frees_constants() {
        let c = parse_expression("3*x*y + 5").unwrap();
        let fat = ws_sym_matrix(&c, WsMode::Fat).unwrap();
        let green = ws_sym_matrix(&c, WsMode::Green).unwrap();
        assert!(green.dim() < fat.dim());
        let m = minimize(&c).unwrap();
        assert!(green.dim() <= 2 * (m.skinny_size() + m.var_inputs()) + 1);
        for mat in [&fat, &green] {
            assert_eq!(symbolic_det(mat, &q()).unwrap(), c.expand_single(&q()).unwrap());
        }
    }

    #[test]
    fn rejects_general_circuits() {
        let c = examples::general();
        assert_eq!(build_ws_graph(&c, WsMode::Fat).unwrap_err(), Error::NotWeaklySkew);
        assert_eq!(ws_nonsym_matrix(&c, WsMode::Green).unwrap_err(), Error::NotWeaklySkew);
    }

    fn ws_strategy(max_gates: usize) -> impl Strategy<Value = Circuit> {
        any::<u64>().prop_map(move |seed| {
            let spec = RandomSpec { class: CircuitClass::WeaklySkew, max_gates, num_vars: 3, weighted: true, constants: true };
            random_circuit(&spec, &mut ChaCha8Rng::seed_from_u64(seed))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn certificates_audit_and_bounds(c in ws_strategy(5), green in any::<bool>()) {
            let mode = if green { WsMode::Green } else { WsMode::Fat };
            prop_assume!(mode == WsMode::Fat || minimize(&c).is_ok());
            let cert = build_ws_graph(&c, mode).unwrap();
            let bound = match mode {
                WsMode::Fat => 2 * c.fat_size() + 1,
                WsMode::Green => {
                    let m = minimize(&c).unwrap();
                    2 * (m.skinny_size() + m.var_inputs()) + 1
                }
            };
            prop_assert!(cert.graph.num_vertices() <= bound);
            if cert.graph.num_vertices() <= 14 {
                let audit = cert.audit(&q()).unwrap();
                prop_assert!(audit.holds(), "{:?}", audit);
            }
        }

        #[test]
        fn matrices_have_the_right_determinant(c in ws_strategy(4), green in any::<bool>()) {
            let mode = if green { WsMode::Green } else { WsMode::Fat };
            prop_assume!(mode == WsMode::Fat || minimize(&c).is_ok());
            let target = c.expand_single(&q()).unwrap();
            let n = ws_nonsym_matrix(&c, mode).unwrap();
            prop_assert!(n.dim() <= c.fat_size() + 1);
            prop_assert_eq!(symbolic_det(&n, &q()).unwrap(), target.clone());
            let s = ws_sym_matrix(&c, mode).unwrap();
            prop_assert!(s.is_symmetric());
            if s.dim() <= crate::poly::SYMBOLIC_LIMIT {
                prop_assert_eq!(symbolic_det(&s, &q()).unwrap(), target);
            }
        }
    }
}
