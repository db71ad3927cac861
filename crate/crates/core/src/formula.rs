//! Determinantal representations of formulas.
//!
//! Two constructions are provided. The non-symmetric one builds a digraph
//! whose signed `s`-`t` path sum, `c0 * sum (-1)^|P| w(P)`, is the formula,
//! then closes it into a matrix of dimension at most `e + 1` (green size).
//! The symmetric one builds an undirected bipartite graph whose
//! `c0 * sum (-1)^(|P|/2 + 1) w(P)` is the formula and where the complement
//! of every `s`-`t` path has a unique cycle cover, a perfect matching of
//! weight 1; adding one vertex closes it into a symmetric matrix of
//! dimension at most `2e + 3`.

use num_traits::{Signed, Zero};

use crate::circuit::{classify, Circuit, GateKind};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::graph::{SymbolicMatrix, Weight, WeightedDigraph, WeightedGraph};
use crate::minimize::minimize;
use crate::poly::DensePolynomial;

/// How formula size is counted, and therefore which circuit is lowered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SizeMode {
    /// The formula as given; constants are leaves.
    Skinny,
    /// The minimized formula; constant factors ride on `c0` and edge weights.
    Green,
}

fn one() -> FieldElement {
    FieldElement::integer(1)
}

fn check_formula(f: &Circuit) -> Result<usize> {
    let out = f.single_output()?.gate;
    if !classify(f).is_formula {
        return Err(Error::NotAFormula);
    }
    Ok(out)
}

/// Leaf weight of an input gate.
fn leaf_weight(kind: &GateKind) -> Weight {
    match kind {
        GateKind::Var(x) => Weight::Var(x.clone()),
        GateKind::Const(k) => Weight::Const(k.clone()),
        _ => unreachable!("leaf_weight on a computation gate"),
    }
}

/// Signed path-sum certificate for the non-symmetric construction.
#[derive(Clone, Debug)]
pub struct ValiantCertificate {
    pub digraph: WeightedDigraph,
    pub s: usize,
    pub t: usize,
    pub c0: FieldElement,
    /// Sinks of right summands; each has exactly one out-arc, of constant weight.
    pub sum_sinks: Vec<usize>,
}

impl ValiantCertificate {
    /// `c0 * sum over s-t paths of (-1)^|P| w(P)`.
    pub fn path_sum(&self, spec: &FieldSpec) -> Result<DensePolynomial> {
        let mut total = DensePolynomial::zero(spec);
        for p in self.digraph.paths(self.s, self.t) {
            let mut w = DensePolynomial::one(spec);
            for pair in p.windows(2) {
                w = w.mul(&self.digraph.arc(pair[0], pair[1]).expect("path follows arcs").to_poly(spec)?)?;
            }
            total = if p.len() % 2 == 0 { total.add(&w)? } else { total.sub(&w)? };
        }
        total.scale(&self.c0.embed(spec)?)
    }
}

struct ValiantBuilder<'a> {
    f: &'a Circuit,
    /// Gate constant `c` with `c * (signed path sum) = gate value`.
    c: Vec<FieldElement>,
    g: WeightedDigraph,
    sum_sinks: Vec<usize>,
}

impl ValiantBuilder<'_> {
    fn build(&mut self, gate: usize, source: usize) -> Result<usize> {
        let gate_ref = self.f.gate(gate);
        match gate_ref.kind {
            GateKind::Var(_) | GateKind::Const(_) => {
                let t = self.g.add_vertex();
                self.g.set_arc(source, t, leaf_weight(&gate_ref.kind));
                Ok(t)
            }
            GateKind::Mul => {
                let t1 = self.build(gate_ref.args[0].gate, source)?;
                self.build(gate_ref.args[1].gate, t1)
            }
            GateKind::Add => {
                let [l, r] = [0, 1].map(|i| {
                    let a = &gate_ref.args[i];
                    a.weight.checked_mul(&self.c[a.gate])
                });
                let (l, r) = (l?, r?);
                if l.is_zero() {
                    return self.build(gate_ref.args[1].gate, source);
                }
                let t1 = self.build(gate_ref.args[0].gate, source)?;
                if r.is_zero() {
                    return Ok(t1);
                }
                let t2 = self.build(gate_ref.args[1].gate, source)?;
                self.g.set_arc(t2, t1, Weight::Const(r.checked_div(&l)?.checked_neg()));
                self.sum_sinks.push(t2);
                Ok(t1)
            }
        }
    }
}

/// Digraph with at most `gsize + 2` vertices whose signed path sum is `f`.
/// The formula is minimized first so that constants cost nothing.
pub fn build_valiant_digraph(f: &Circuit) -> Result<ValiantCertificate> {
    check_formula(f)?;
    let m = minimize(f)?;
    let out = m.single_output()?;
    let mut c = Vec::with_capacity(m.len());
    for g in m.gates() {
        let value = match g.kind {
            GateKind::Var(_) | GateKind::Const(_) => one(),
            GateKind::Mul => {
                let mut acc = one().checked_neg();
                for a in &g.args {
                    acc = acc.checked_mul(&a.weight)?.checked_mul(&c[a.gate])?;
                }
                acc
            }
            GateKind::Add => {
                let l = g.args[0].weight.checked_mul(&c[g.args[0].gate])?;
                if l.is_zero() {
                    g.args[1].weight.checked_mul(&c[g.args[1].gate])?
                } else {
                    l
                }
            }
        };
        c.push(value);
    }
    let c0 = c[out.gate].checked_mul(&out.scale)?;
    let mut b = ValiantBuilder { f: &m, c, g: WeightedDigraph::new(1), sum_sinks: Vec::new() };
    let t = b.build(out.gate, 0)?;
    b.g.set_role("s", 0);
    b.g.set_role("t", t);
    Ok(ValiantCertificate { digraph: b.g, s: 0, t, c0, sum_sinks: b.sum_sinks })
}

/// Non-symmetric matrix with determinant `f`.
///
/// With an addition the dimension is at most `gsize + 1`: `s` and `t` are
/// merged, the designated sink `v` of a right summand gets a loop `c0` and its
/// out-arc is multiplied by `c0`, and every other vertex but `s` gets a loop
/// of weight 1. A pure product is the diagonal of its path weights and the
/// signed constant, the constant omitted when it is 1.
pub fn valiant_matrix(f: &Circuit) -> Result<SymbolicMatrix> {
    let cert = build_valiant_digraph(f)?;
    let g = &cert.digraph;
    let Some(&v) = cert.sum_sinks.first() else {
        let path = g.paths(cert.s, cert.t).pop().expect("a product is one path");
        let mut diag: Vec<Weight> =
            path.windows(2).map(|p| g.arc(p[0], p[1]).expect("path follows arcs").clone()).collect();
        let sign = if path.len() % 2 == 0 { one() } else { one().checked_neg() };
        let last = cert.c0.checked_mul(&sign)?;
        if !last.is_one() {
            diag.push(Weight::Const(last));
        }
        let mut m = SymbolicMatrix::zeros(diag.len());
        for (i, w) in diag.into_iter().enumerate() {
            m.entries[i][i] = w;
        }
        return Ok(m);
    };
    // vertex t becomes s; later vertices shift down by one
    let index = |u: usize| match u {
        u if u == cert.t => cert.s,
        u if u > cert.t => u - 1,
        u => u,
    };
    let n = g.num_vertices() - 1;
    let mut m = SymbolicMatrix::zeros(n);
    for (a, b, w) in g.arcs() {
        let w = if a == v { w.scaled(&cert.c0)? } else { w.clone() };
        m.entries[index(a)][index(b)] = w;
    }
    for u in 0..g.num_vertices() {
        if u == cert.s || u == cert.t {
            continue;
        }
        m.entries[index(u)][index(u)] = if u == v { Weight::Const(cert.c0.clone()) } else { Weight::int(1) };
    }
    Ok(m)
}

/// Result of checking the structural conditions of a symmetric certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureCheck {
    pub even_order: bool,
    pub cycles_even: bool,
    pub paths_even: bool,
    /// `G - {s, t}` and every `G - P` have a unique cycle cover, a perfect
    /// matching of weight 1.
    pub unique_matchings: bool,
}

impl StructureCheck {
    pub fn holds(&self) -> bool {
        self.even_order && self.cycles_even && self.paths_even && self.unique_matchings
    }
}

/// Path-sum certificate for the symmetric construction.
#[derive(Clone, Debug)]
pub struct SymCertificate {
    pub graph: WeightedGraph,
    pub s: usize,
    pub t: usize,
    pub c0: FieldElement,
}

impl SymCertificate {
    /// `c0 * sum over s-t paths of (-1)^(|P|/2 + 1) w(P)`.
    pub fn path_sum(&self, spec: &FieldSpec) -> Result<DensePolynomial> {
        let mut total = DensePolynomial::zero(spec);
        for p in self.graph.paths(self.s, self.t) {
            let w = self.graph.path_weight(&p, spec)?;
            total = if (p.len() / 2) % 2 == 1 { total.add(&w)? } else { total.sub(&w)? };
        }
        total.scale(&self.c0.embed(spec)?)
    }

    /// Exhaustive check of the parity and matching conditions.
    pub fn check_structure(&self) -> StructureCheck {
        let g = &self.graph;
        let n = g.num_vertices();
        let paths = g.paths(self.s, self.t);
        let mut removed = vec![false; n];
        removed[self.s] = true;
        removed[self.t] = true;
        let mut unique_matchings = g.has_unique_unit_matching(&removed);
        for p in &paths {
            if !unique_matchings {
                break;
            }
            let mut removed = vec![false; n];
            for v in p {
                removed[*v] = true;
            }
            unique_matchings = g.has_unique_unit_matching(&removed);
        }
        StructureCheck {
            even_order: n.is_multiple_of(2),
            cycles_even: g.is_bipartite(),
            paths_even: paths.iter().all(|p| p.len() % 2 == 0),
            unique_matchings,
        }
    }

    /// Over the reals or complexes, merging `s` and `t` instead of adding a
    /// closing vertex saves one dimension when the formula has an addition,
    /// at the cost of weights `sqrt(|c0|/2)`. Over the reals this needs
    /// `(-1)^(|G|/2 + 1) c0 > 0`; otherwise a `-1` loop costs the vertex back.
    pub fn sharpening_note(&self, has_addition: bool) -> Option<String> {
        let n = self.graph.num_vertices();
        let c0 = self.c0.as_rational()?;
        if !has_addition || c0.is_zero() {
            return None;
        }
        let sign_positive = c0.is_positive() == (n / 2 + 1).is_multiple_of(2);
        let fields = if sign_positive { "R or C" } else { "C" };
        Some(format!("over {fields} a representation of dimension {} exists using sqrt(|c0|/2) weights; not built", n - 1))
    }
}

/// A symmetric graph under construction for one sub-formula.
struct Piece {
    g: WeightedGraph,
    s: usize,
    t: usize,
    c: FieldElement,
}

impl Piece {
    fn leaf(w: Weight) -> Piece {
        let mut g = WeightedGraph::new(2);
        g.set_edge(0, 1, w);
        Piece { g, s: 0, t: 1, c: one() }
    }

    /// Replaces the `s`-`t` edge of weight `x` by the path `s-u-v-t` with
    /// weights `x, 1, -1`, which has the same signed contribution.
    fn reroute_st_edge(&mut self) {
        let x = self.g.remove_edge(self.s, self.t).expect("edge present");
        let u = self.g.add_vertex();
        let v = self.g.add_vertex();
        self.g.set_edge(self.s, u, x);
        self.g.set_edge(u, v, Weight::int(1));
        self.g.set_edge(v, self.t, Weight::int(-1));
    }
}

fn sym_piece(f: &Circuit, gate: usize) -> Result<Piece> {
    let g = f.gate(gate);
    if g.is_input() {
        return Ok(Piece::leaf(leaf_weight(&g.kind)));
    }
    let mut p1 = sym_piece(f, g.args[0].gate)?;
    let mut p2 = sym_piece(f, g.args[1].gate)?;
    let l = p1.c.checked_mul(&g.args[0].weight)?;
    let r = p2.c.checked_mul(&g.args[1].weight)?;
    if g.kind == GateKind::Mul {
        let map = p1.g.absorb(&p2.g, &[]);
        p1.g.set_edge(p1.t, map[p2.s], Weight::int(-1));
        return Ok(Piece { g: p1.g, s: p1.s, t: map[p2.t], c: l.checked_mul(&r)? });
    }
    if l.is_zero() {
        p2.c = r;
        return Ok(p2);
    }
    if r.is_zero() {
        p1.c = l;
        return Ok(p1);
    }
    if l == r {
        if p1.g.edge(p1.s, p1.t).is_some() && p2.g.edge(p2.s, p2.t).is_some() {
            p1.reroute_st_edge();
        }
        p1.g.absorb(&p2.g, &[(p2.s, p1.s), (p2.t, p1.t)]);
    } else {
        let map = p1.g.absorb(&p2.g, &[(p2.s, p1.s)]);
        let u = p1.g.add_vertex();
        p1.g.set_edge(map[p2.t], u, Weight::int(1));
        p1.g.set_edge(u, p1.t, Weight::Const(r.checked_div(&l)?.checked_neg()));
    }
    p1.c = l;
    Ok(p1)
}

/// Symmetric certificate graph with at most `2e + 2` vertices, `e` the size
/// counted per `mode`.
pub fn build_sym_graph(f: &Circuit, mode: SizeMode) -> Result<SymCertificate> {
    check_formula(f)?;
    let source = match mode {
        SizeMode::Skinny => f.clone(),
        SizeMode::Green => minimize(f)?,
    };
    let out = source.single_output()?;
    let piece = sym_piece(&source, out.gate)?;
    let mut graph = piece.g;
    graph.set_role("s", piece.s);
    graph.set_role("t", piece.t);
    Ok(SymCertificate { graph, s: piece.s, t: piece.t, c0: piece.c.checked_mul(&out.scale)? })
}

/// Closes a symmetric certificate with a vertex `c`, edges `tc` of weight
/// `c0/2` and `cs` of weight `(-1)^(|G|/2 - 1)`.
pub fn close_sym_graph(cert: &SymCertificate) -> Result<WeightedGraph> {
    let mut g = cert.graph.clone();
    let c = g.add_vertex();
    g.set_role("c", c);
    g.set_edge(cert.t, c, Weight::Const(cert.c0.checked_mul(&FieldElement::rational(1, 2))?));
    let half_order = g.num_vertices() / 2;
    g.set_edge(c, cert.s, Weight::int(if half_order % 2 == 1 { 1 } else { -1 }));
    Ok(g)
}

/// Symmetric matrix of dimension at most `2e + 3` with determinant `f`.
pub fn sym_matrix(f: &Circuit, mode: SizeMode) -> Result<SymbolicMatrix> {
    Ok(close_sym_graph(&build_sym_graph(f, mode)?)?.adjacency())
}

/// The same matrix with every `-1` entry replaced by 1; for the symmetric
/// formula construction its permanent is the formula.
pub fn permanent_variant(m: &SymbolicMatrix) -> SymbolicMatrix {
    let minus_one = FieldElement::integer(-1);
    let mut out = m.clone();
    for w in out.entries.iter_mut().flatten() {
        if w.as_const() == Some(&minus_one) {
            *w = Weight::int(1);
        }
    }
    out
}
