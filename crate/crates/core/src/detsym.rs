//! Symmetric determinantal representation of the generic determinant.
//!
//! A layered branching program enumerates clow sequences: a state
//! `(parity, h, u)` after `i` arcs means the current clow has head `h` and
//! sits at vertex `u >= h`, with `parity` clows already closed. Closing a clow
//! moves to the head of the next one, which must be larger. The first clow
//! starts at head 1: the sign-reversing pairing of clow sequences preserves
//! the multiset of arcs, so sequences avoiding vertex 1 cancel among
//! themselves. Splitting every inner vertex into an `in - out` pair turns the
//! program into a bipartite graph, closed by one extra vertex into a
//! symmetric matrix.

use std::collections::{BTreeMap, HashMap};

use crate::error::Result;
use crate::field::{FieldElement, FieldSpec};
use crate::graph::{SymbolicMatrix, Weight, WeightedDigraph, WeightedGraph};
use crate::poly::DensePolynomial;

/// Name of the matrix entry in row `i`, column `j` (1-based).
pub fn entry_name(i: usize, j: usize) -> String {
    format!("x{i}_{j}")
}

/// The generic `n x n` matrix of entry variables.
pub fn generic_matrix(n: usize) -> SymbolicMatrix {
    let rows = (1..=n).map(|i| (1..=n).map(|j| Weight::Var(entry_name(i, j))).collect()).collect();
    SymbolicMatrix::from_rows(rows)
}

/// The determinant by the permutation expansion, signs from inversion counts.
pub fn leibniz_det(n: usize, spec: &FieldSpec) -> Result<DensePolynomial> {
    fn rec(n: usize, perm: &mut Vec<usize>, used: &mut Vec<bool>, spec: &FieldSpec, acc: &mut DensePolynomial) -> Result<()> {
        if perm.len() == n {
            let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|(i, j)| perm[*i] > perm[*j]).count();
            let mut term = DensePolynomial::one(spec);
            for (i, j) in perm.iter().enumerate() {
                term = term.mul(&DensePolynomial::var(&entry_name(i + 1, j + 1), spec))?;
            }
            *acc = if inversions % 2 == 0 { acc.add(&term)? } else { acc.sub(&term)? };
            return Ok(());
        }
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                perm.push(j);
                rec(n, perm, used, spec, acc)?;
                perm.pop();
                used[j] = false;
            }
        }
        Ok(())
    }
    let mut acc = DensePolynomial::zero(spec);
    rec(n, &mut Vec::new(), &mut vec![false; n], spec, &mut acc)?;
    Ok(acc)
}

/// Layered program for the determinant, with its final sink `t`.
#[derive(Clone, Debug)]
pub struct LayeredAbp {
    pub n: usize,
    pub digraph: WeightedDigraph,
    pub layer: Vec<usize>,
    pub s: usize,
    pub t_plus: usize,
    pub t_minus: usize,
    pub t: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum State {
    Source,
    /// `(parity, head, vertex)`, 1-based.
    Inner(usize, usize, usize),
    Plus,
    Minus,
}

/// Successors of a state sitting after `layer` arcs, with arc weights.
fn moves(n: usize, layer: usize, state: State) -> Vec<(State, Weight)> {
    let (parity, h, u) = match state {
        State::Source => (0, 1, 1),
        State::Inner(p, h, u) => (p, h, u),
        State::Plus | State::Minus => return Vec::new(),
    };
    let mut out = Vec::new();
    let last = layer + 1 == n;
    if !last {
        for v in h + 1..=n {
            out.push((State::Inner(parity, h, v), Weight::Var(entry_name(u, v))));
        }
    }
    let closed = parity + 1;
    let w = Weight::Var(entry_name(u, h));
    if last {
        // sign of a clow sequence is (-1)^(n + number of clows)
        out.push((if (n + closed).is_multiple_of(2) { State::Plus } else { State::Minus }, w));
    } else {
        for next in h + 1..=n {
            out.push((State::Inner(closed % 2, next, next), w.clone()));
        }
    }
    out
}

/// The program with states not on any source-sink path removed, plus the
/// sink `t` fed by `t+` (weight 1) and `t-` (weight -1).
pub fn build_det_abp(n: usize) -> LayeredAbp {
    assert!(n >= 1, "need n >= 1");
    // forward sweep: reachable states per layer
    let mut layers: Vec<Vec<State>> = vec![vec![State::Source]];
    let mut arcs: Vec<(usize, State, State, Weight)> = Vec::new();
    for i in 0..n {
        let mut next: Vec<State> = Vec::new();
        for &st in &layers[i] {
            for (to, w) in moves(n, i, st) {
                if !next.contains(&to) {
                    next.push(to);
                }
                arcs.push((i, st, to, w));
            }
        }
        next.sort();
        layers.push(next);
    }
    // backward sweep: keep states that reach a sink
    let mut alive: Vec<Vec<State>> = vec![Vec::new(); n + 1];
    alive[n] = layers[n].clone();
    for i in (0..n).rev() {
        alive[i] = layers[i]
            .iter()
            .copied()
            .filter(|st| arcs.iter().any(|(l, from, to, _)| *l == i && from == st && alive[i + 1].contains(to)))
            .collect();
    }
    let mut g = WeightedDigraph::new(0);
    let mut layer = Vec::new();
    let mut index: HashMap<(usize, State), usize> = HashMap::new();
    for (i, states) in alive.iter().enumerate() {
        for st in states {
            index.insert((i, *st), g.add_vertex());
            layer.push(i);
        }
    }
    for (i, from, to, w) in arcs {
        if let (Some(&a), Some(&b)) = (index.get(&(i, from)), index.get(&(i + 1, to))) {
            g.set_arc(a, b, w);
        }
    }
    let s = index[&(0, State::Source)];
    let sink = |st: State, g: &mut WeightedDigraph, layer: &mut Vec<usize>| {
        index.get(&(n, st)).copied().unwrap_or_else(|| {
            layer.push(n);
            g.add_vertex()
        })
    };
    let t_plus = sink(State::Plus, &mut g, &mut layer);
    let t_minus = sink(State::Minus, &mut g, &mut layer);
    let t = g.add_vertex();
    layer.push(n + 1);
    g.set_arc(t_plus, t, Weight::int(1));
    g.set_arc(t_minus, t, Weight::int(-1));
    for (a, b, _) in g.arcs() {
        assert_eq!(layer[b], layer[a] + 1, "arc ({a}, {b}) skips a layer");
    }
    for (role, v) in [("s", s), ("t+", t_plus), ("t-", t_minus), ("t", t)] {
        g.set_role(role, v);
    }
    LayeredAbp { n, digraph: g, layer, s, t_plus, t_minus, t }
}

impl LayeredAbp {
    /// Sum of path weights from `s` to `t`.
    pub fn path_sum(&self, spec: &FieldSpec) -> Result<DensePolynomial> {
        let mut total = DensePolynomial::zero(spec);
        for p in self.digraph.paths(self.s, self.t) {
            let mut w = DensePolynomial::one(spec);
            for pair in p.windows(2) {
                w = w.mul(&self.digraph.arc(pair[0], pair[1]).expect("path follows arcs").to_poly(spec)?)?;
            }
            total = total.add(&w)?;
        }
        Ok(total)
    }

    /// Path sum evaluated at a point by dynamic programming over layers.
    pub fn path_sum_at(&self, point: &HashMap<String, FieldElement>, spec: &FieldSpec) -> Result<FieldElement> {
        let nv = self.digraph.num_vertices();
        let mut order: Vec<usize> = (0..nv).collect();
        order.sort_by_key(|v| self.layer[*v]);
        let mut value = vec![spec.zero(); nv];
        value[self.s] = spec.one();
        for u in order {
            for (v, w) in self.digraph.out_arcs(u) {
                let add = value[u].checked_mul(&w.eval(point, spec)?)?;
                value[v] = value[v].checked_add(&add)?;
            }
        }
        Ok(value[self.t].clone())
    }
}

/// The program with inner vertices split into `in - out` pairs.
#[derive(Clone, Debug)]
pub struct SymmetrizedAbp {
    pub graph: WeightedGraph,
    pub s_out: usize,
    pub t_in: usize,
    /// Number of split vertices.
    pub inner: usize,
}

/// Every inner vertex `u` becomes `u_in - u_out` with weight 1 and every arc
/// `(u, v)` becomes the edge `u_out - v_in`.
pub fn symmetrize_abp(abp: &LayeredAbp) -> SymmetrizedAbp {
    let g = &abp.digraph;
    let mut graph = WeightedGraph::new(0);
    let mut ends: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    let mut order: Vec<usize> = (0..g.num_vertices()).collect();
    order.sort_by_key(|v| (abp.layer[*v], *v));
    for u in order {
        // the two ends stay whole; every other vertex splits into in/out
        let pair = if u == abp.s || u == abp.t {
            let v = graph.add_vertex();
            (v, v)
        } else {
            let a = graph.add_vertex();
            let b = graph.add_vertex();
            graph.set_edge(a, b, Weight::int(1));
            (a, b)
        };
        ends.insert(u, pair);
    }
    for (a, b, w) in g.arcs() {
        graph.set_edge(ends[&a].1, ends[&b].0, w.clone());
    }
    let s_out = ends[&abp.s].1;
    let t_in = ends[&abp.t].0;
    graph.set_role("s_out", s_out);
    graph.set_role("t_in", t_in);
    SymmetrizedAbp { graph, s_out, t_in, inner: g.num_vertices() - 2 }
}

/// Closing vertex `c` with edges `t_in c` of weight 1/2 and `c s_out` of
/// weight `(-1)^(k - n)`, `k` the number of split vertices: a cover through
/// `c` pairs the remaining `k - n` split vertices into 2-cycles.
pub fn close_symmetrized(sym: &SymmetrizedAbp, n: usize) -> WeightedGraph {
    let mut g = sym.graph.clone();
    let c = g.add_vertex();
    g.set_role("c", c);
    g.set_edge(sym.t_in, c, Weight::Const(FieldElement::rational(1, 2)));
    g.set_edge(c, sym.s_out, Weight::int(if (sym.inner - n).is_multiple_of(2) { 1 } else { -1 }));
    g
}

/// Symmetric matrix of dimension at most `4n^3 + 7` whose determinant is the
/// determinant of the generic `n x n` matrix.
pub fn det_sym_matrix(n: usize) -> SymbolicMatrix {
    let abp = build_det_abp(n);
    close_symmetrized(&symmetrize_abp(&abp), n).adjacency()
}

/// Sizes of the construction for one `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DetSymReport {
    pub n: usize,
    pub abp_vertices: usize,
    pub abp_arcs: usize,
    pub dim: usize,
    pub edges: usize,
    pub bound: usize,
}

pub fn det_sym_report(n: usize) -> DetSymReport {
    let abp = build_det_abp(n);
    let closed = close_symmetrized(&symmetrize_abp(&abp), n);
    DetSymReport {
        n,
        abp_vertices: abp.digraph.num_vertices(),
        abp_arcs: abp.digraph.num_arcs(),
        dim: closed.num_vertices(),
        edges: closed.num_edges(),
        bound: 4 * n * n * n + 7,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::symbolic_det;
    use crate::verify::det_eval;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q() -> FieldSpec {
        FieldSpec::Rational
    }

    #[test]
    fn leibniz_matches_the_oracle() {
        for n in 1..=4 {
            assert_eq!(leibniz_det(n, &q()).unwrap(), symbolic_det(&generic_matrix(n), &q()).unwrap());
        }
    }

    #[test]
    fn path_sums_are_determinants() {
        for n in 1..=4 {
            let abp = build_det_abp(n);
            assert_eq!(abp.path_sum(&q()).unwrap(), leibniz_det(n, &q()).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn layers_and_sizes() {
        for n in 1..=5 {
            let abp = build_det_abp(n);
            assert!(abp.digraph.num_vertices() <= 2 * n * n * n + 3);
            assert_eq!(abp.layer[abp.s], 0);
            assert_eq!(abp.layer[abp.t_plus], n);
            assert_eq!(abp.layer[abp.t_minus], n);
            for p in abp.digraph.paths(abp.s, abp.t_plus).into_iter().take(50) {
                assert_eq!(p.len(), n + 1);
            }
            let sym = symmetrize_abp(&abp);
            assert!(sym.graph.num_vertices() <= 4 * n * n * n + 6);
            assert!(sym.graph.is_bipartite());
        }
    }

    #[test]
    fn small_matrices_exact() {
        assert_eq!(symbolic_det(&det_sym_matrix(1), &q()).unwrap(), DensePolynomial::var("x1_1", &q()));
        let m = det_sym_matrix(2);
        assert!(m.is_symmetric() && m.in_strict_alphabet());
        assert_eq!(symbolic_det(&m, &q()).unwrap(), leibniz_det(2, &q()).unwrap());
    }

    #[test]
    fn larger_matrices_at_random_points() {
        let spec = FieldSpec::default_prime();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 3..=4 {
            let m = det_sym_matrix(n);
            assert!(m.dim() <= 4 * n * n * n + 7);
            let generic = generic_matrix(n);
            for _ in 0..3 {
                let point: HashMap<String, FieldElement> =
                    generic.variables().into_iter().map(|v| (v, spec.sample_random(&mut rng).unwrap())).collect();
                assert_eq!(det_eval(&m, &point, &spec).unwrap(), det_eval(&generic, &point, &spec).unwrap());
                assert_eq!(build_det_abp(n).path_sum_at(&point, &spec).unwrap(), det_eval(&generic, &point, &spec).unwrap());
            }
        }
    }
}
