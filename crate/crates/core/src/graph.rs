//! Weighted graphs and digraphs with symbolic weights, their adjacency
//! matrices, and brute-force cycle-cover oracles.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::poly::{is_ident_char, is_ident_start, DensePolynomial};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Weight {
    Var(String),
    Const(FieldElement),
    /// `c * x`; only legal in final matrices when linear entries are enabled.
    Scaled(String, FieldElement),
}

impl Weight {
    pub fn var(name: &str) -> Self {
        Weight::Var(name.to_string())
    }

    pub fn int(n: i64) -> Self {
        Weight::Const(FieldElement::integer(n))
    }

    pub fn zero() -> Self {
        Weight::int(0)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Weight::Const(c) | Weight::Scaled(_, c) => c.is_zero(),
            Weight::Var(_) => false,
        }
    }

    pub fn as_const(&self) -> Option<&FieldElement> {
        match self {
            Weight::Const(c) => Some(c),
            _ => None,
        }
    }

    /// Multiplies by a constant, collapsing `1 * x` to `x`.
    pub fn scaled(&self, c: &FieldElement) -> Result<Weight> {
        Ok(match self {
            Weight::Const(a) => Weight::Const(a.checked_mul(c)?),
            Weight::Var(x) if c.is_one() => Weight::Var(x.clone()),
            Weight::Var(x) if c.is_zero() => Weight::Const(c.clone()),
            Weight::Var(x) => Weight::Scaled(x.clone(), c.clone()),
            Weight::Scaled(x, a) => {
                let k = a.checked_mul(c)?;
                if k.is_one() {
                    Weight::Var(x.clone())
                } else if k.is_zero() {
                    Weight::Const(k)
                } else {
                    Weight::Scaled(x.clone(), k)
                }
            }
        })
    }

    pub fn to_poly(&self, spec: &FieldSpec) -> Result<DensePolynomial> {
        match self {
            Weight::Var(x) => Ok(DensePolynomial::var(x, spec)),
            Weight::Const(c) => Ok(DensePolynomial::constant(c.embed(spec)?)),
            Weight::Scaled(x, c) => DensePolynomial::var(x, spec).scale(&c.embed(spec)?),
        }
    }

    pub fn eval(
        &self,
        assignment: &std::collections::HashMap<String, FieldElement>,
        spec: &FieldSpec,
    ) -> Result<FieldElement> {
        let lookup = |x: &String| assignment.get(x).cloned().ok_or_else(|| Error::MissingAssignment(x.clone()));
        match self {
            Weight::Var(x) => lookup(x),
            Weight::Const(c) => c.embed(spec),
            Weight::Scaled(x, c) => lookup(x)?.checked_mul(&c.embed(spec)?),
        }
    }

    pub fn parse(text: &str, spec: &FieldSpec) -> Result<Weight> {
        let text = text.trim();
        if let Some((c, x)) = text.split_once('*') {
            let c = spec.parse(c)?;
            return Ok(Weight::Scaled(x.trim().to_string(), c));
        }
        let mut chars = text.chars();
        if chars.next().is_some_and(is_ident_start) && chars.all(is_ident_char) {
            Ok(Weight::Var(text.to_string()))
        } else {
            Ok(Weight::Const(spec.parse(text)?))
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Var(x) => write!(f, "{x}"),
            Weight::Const(c) => write!(f, "{c}"),
            Weight::Scaled(x, c) => write!(f, "{c}*{x}"),
        }
    }
}

/// Weighted digraph on vertices `0..n`; zero-weight arcs are never stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeightedDigraph {
    n: usize,
    arcs: BTreeMap<(usize, usize), Weight>,
    roles: BTreeMap<String, usize>,
}

impl WeightedDigraph {
    pub fn new(n: usize) -> Self {
        WeightedDigraph { n, ..Default::default() }
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn add_vertex(&mut self) -> usize {
        self.n += 1;
        self.n - 1
    }

    /// Sets the weight of arc `u -> v`, replacing any previous weight.
    pub fn set_arc(&mut self, u: usize, v: usize, w: Weight) {
        assert!(u < self.n && v < self.n, "arc endpoint out of range");
        if w.is_zero() {
            self.arcs.remove(&(u, v));
        } else {
            self.arcs.insert((u, v), w);
        }
    }

    pub fn arc(&self, u: usize, v: usize) -> Option<&Weight> {
        self.arcs.get(&(u, v))
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, &Weight)> {
        self.arcs.iter().map(|((u, v), w)| (*u, *v, w))
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn out_arcs(&self, u: usize) -> impl Iterator<Item = (usize, &Weight)> {
        self.arcs.range((u, 0)..(u + 1, 0)).map(|((_, v), w)| (*v, w))
    }

    pub fn set_role(&mut self, role: &str, v: usize) {
        self.roles.insert(role.to_string(), v);
    }

    pub fn role(&self, role: &str) -> Option<usize> {
        self.roles.get(role).copied()
    }

    pub fn roles(&self) -> &BTreeMap<String, usize> {
        &self.roles
    }

    pub fn adjacency(&self) -> SymbolicMatrix {
        let mut m = SymbolicMatrix::zeros(self.n);
        for ((u, v), w) in &self.arcs {
            m.entries[*u][*v] = w.clone();
        }
        m
    }

    /// All simple paths from `from` to `to` as vertex sequences.
    pub fn paths(&self, from: usize, to: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut path = vec![from];
        let mut on_path = vec![false; self.n];
        on_path[from] = true;
        self.paths_rec(to, &mut path, &mut on_path, &mut out);
        out
    }

    fn paths_rec(&self, to: usize, path: &mut Vec<usize>, on: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let u = *path.last().unwrap();
        if u == to {
            out.push(path.clone());
            return;
        }
        for (v, _) in self.out_arcs(u) {
            if !on[v] {
                on[v] = true;
                path.push(v);
                self.paths_rec(to, path, on, out);
                path.pop();
                on[v] = false;
            }
        }
    }

    pub fn export_dot(&self) -> String {
        export_dot_impl(self.n, &self.roles, self.arcs.iter().map(|((u, v), w)| (*u, *v, w)), true)
    }
}

/// Undirected weighted graph; edges are stored with `u <= v` and loops allowed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: BTreeMap<(usize, usize), Weight>,
    roles: BTreeMap<String, usize>,
}

impl WeightedGraph {
    pub fn new(n: usize) -> Self {
        WeightedGraph { n, ..Default::default() }
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn add_vertex(&mut self) -> usize {
        self.n += 1;
        self.n - 1
    }

    fn key(u: usize, v: usize) -> (usize, usize) {
        (u.min(v), u.max(v))
    }

    /// Sets the weight of edge `uv`, replacing any previous weight.
    pub fn set_edge(&mut self, u: usize, v: usize, w: Weight) {
        assert!(u < self.n && v < self.n, "edge endpoint out of range");
        if w.is_zero() {
            self.edges.remove(&Self::key(u, v));
        } else {
            self.edges.insert(Self::key(u, v), w);
        }
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> Option<Weight> {
        self.edges.remove(&Self::key(u, v))
    }

    pub fn edge(&self, u: usize, v: usize) -> Option<&Weight> {
        self.edges.get(&Self::key(u, v))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &Weight)> {
        self.edges.iter().map(|((u, v), w)| (*u, *v, w))
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, u: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .keys()
            .filter_map(|(a, b)| if *a == u { Some(*b) } else if *b == u { Some(*a) } else { None })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn set_role(&mut self, role: &str, v: usize) {
        self.roles.insert(role.to_string(), v);
    }

    pub fn role(&self, role: &str) -> Option<usize> {
        self.roles.get(role).copied()
    }

    pub fn roles(&self) -> &BTreeMap<String, usize> {
        &self.roles
    }

    /// Copies `other` into `self`, identifying vertex `i` of `other` with
    /// `map[i]` when given, or with a fresh vertex otherwise. Returns the
    /// full vertex map.
    pub fn absorb(&mut self, other: &WeightedGraph, fixed: &[(usize, usize)]) -> Vec<usize> {
        let mut map = vec![usize::MAX; other.n];
        for (from, to) in fixed {
            map[*from] = *to;
        }
        for slot in map.iter_mut() {
            if *slot == usize::MAX {
                *slot = self.add_vertex();
            }
        }
        for ((u, v), w) in &other.edges {
            self.set_edge(map[*u], map[*v], w.clone());
        }
        map
    }

    pub fn adjacency(&self) -> SymbolicMatrix {
        let mut m = SymbolicMatrix::zeros(self.n);
        for ((u, v), w) in &self.edges {
            m.entries[*u][*v] = w.clone();
            m.entries[*v][*u] = w.clone();
        }
        m.symmetric = true;
        m
    }

    /// All simple paths from `from` to `to` as vertex sequences.
    pub fn paths(&self, from: usize, to: usize) -> Vec<Vec<usize>> {
        self.as_digraph().paths(from, to)
    }

    /// The symmetric digraph with both orientations of every non-loop edge.
    pub fn as_digraph(&self) -> WeightedDigraph {
        let mut d = WeightedDigraph::new(self.n);
        for ((u, v), w) in &self.edges {
            d.set_arc(*u, *v, w.clone());
            d.set_arc(*v, *u, w.clone());
        }
        d.roles = self.roles.clone();
        d
    }

    /// Induced subgraph on the vertices not in `removed`, renumbered in order.
    pub fn without(&self, removed: &[usize]) -> (WeightedGraph, Vec<usize>) {
        let kept: Vec<usize> = (0..self.n).filter(|v| !removed.contains(v)).collect();
        let mut index = vec![usize::MAX; self.n];
        for (i, v) in kept.iter().enumerate() {
            index[*v] = i;
        }
        let mut g = WeightedGraph::new(kept.len());
        for ((u, v), w) in &self.edges {
            if index[*u] != usize::MAX && index[*v] != usize::MAX {
                g.set_edge(index[*u], index[*v], w.clone());
            }
        }
        (g, kept)
    }

    /// No loops and 2-colourable, i.e. every cycle is even.
    pub fn is_bipartite(&self) -> bool {
        if self.edges.keys().any(|(u, v)| u == v) {
            return false;
        }
        let adj = self.adjacency_lists();
        let mut colour = vec![u8::MAX; self.n];
        for start in 0..self.n {
            if colour[start] != u8::MAX {
                continue;
            }
            colour[start] = 0;
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if colour[v] == u8::MAX {
                        colour[v] = 1 - colour[u];
                        stack.push(v);
                    } else if colour[v] == colour[u] {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for (u, v) in self.edges.keys() {
            adj[*u].push(*v);
            if u != v {
                adj[*v].push(*u);
            }
        }
        adj
    }

    /// Up to `max` cycle covers of the subgraph induced by the vertices not
    /// in `removed`, as permutations (`perm[v]` is the successor of `v`;
    /// removed vertices map to themselves).
    pub fn cycle_covers(&self, removed: &[bool], max: usize) -> Vec<Vec<usize>> {
        let adj = self.adjacency_lists();
        let mut perm: Vec<usize> = (0..self.n).collect();
        let mut used = removed.to_vec();
        let rows: Vec<usize> = (0..self.n).filter(|v| !removed[*v]).collect();
        let mut out = Vec::new();
        covers_rec(&adj, &rows, 0, &mut perm, &mut used, max, &mut out);
        out
    }

    /// Whether the subgraph without `removed` is empty or has exactly one
    /// cycle cover, made of 2-cycles on edges of weight 1 or -1.
    pub fn has_unique_unit_matching(&self, removed: &[bool]) -> bool {
        let covers = self.cycle_covers(removed, 2);
        let [perm] = covers.as_slice() else {
            return false;
        };
        (0..self.n).filter(|v| !removed[*v]).all(|v| {
            let u = perm[v];
            u != v
                && perm[u] == v
                && self.edge(u, v).and_then(Weight::as_const).is_some_and(|w| {
                    w.is_one() || w.checked_neg().is_one()
                })
        })
    }

    /// All perfect matchings (no loops) as lists of edges.
    pub fn perfect_matchings(&self) -> Vec<Vec<(usize, usize)>> {
        fn rec(g: &WeightedGraph, covered: &mut Vec<bool>, current: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
            let Some(v) = covered.iter().position(|c| !c) else {
                out.push(current.clone());
                return;
            };
            covered[v] = true;
            for u in g.neighbors(v) {
                if u != v && !covered[u] {
                    covered[u] = true;
                    current.push((v.min(u), v.max(u)));
                    rec(g, covered, current, out);
                    current.pop();
                    covered[u] = false;
                }
            }
            covered[v] = false;
        }
        let mut out = Vec::new();
        rec(self, &mut vec![false; self.n], &mut Vec::new(), &mut out);
        out
    }

    /// Product of edge weights along a vertex sequence.
    pub fn path_weight(&self, path: &[usize], spec: &FieldSpec) -> Result<DensePolynomial> {
        let mut w = DensePolynomial::one(spec);
        for pair in path.windows(2) {
            let e = self.edge(pair[0], pair[1]).expect("path follows edges");
            w = w.mul(&e.to_poly(spec)?)?;
        }
        Ok(w)
    }

    pub fn export_dot(&self) -> String {
        export_dot_impl(self.n, &self.roles, self.edges.iter().map(|((u, v), w)| (*u, *v, w)), false)
    }
}

fn export_dot_impl<'a>(
    n: usize,
    roles: &BTreeMap<String, usize>,
    arcs: impl Iterator<Item = (usize, usize, &'a Weight)>,
    directed: bool,
) -> String {
    let mut names: Vec<Option<String>> = vec![None; n];
    for (role, v) in roles {
        if names[*v].is_none() {
            names[*v] = Some(role.clone());
        }
    }
    let name = |v: usize| match &names[v] {
        Some(r) => dot_id(r),
        None => format!("v{v}"),
    };
    let (kind, op) = if directed { ("digraph", "->") } else { ("graph", "--") };
    let mut out = format!("{kind} G {{\n");
    for (v, role) in names.iter().enumerate() {
        if role.is_some() {
            let _ = writeln!(out, "  {} [shape=doublecircle];", name(v));
        } else {
            let _ = writeln!(out, "  {};", name(v));
        }
    }
    for (u, v, w) in arcs {
        let _ = writeln!(out, "  {} {op} {} [label=\"{w}\"];", name(u), name(v));
    }
    out.push_str("}\n");
    out
}

fn dot_id(s: &str) -> String {
    if s.chars().all(is_ident_char) && s.chars().next().is_some_and(is_ident_start) {
        s.to_string()
    } else {
        format!("\"{}\"", s.replace('"', "\\\""))
    }
}

/// Dense square matrix of weights.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicMatrix {
    pub entries: Vec<Vec<Weight>>,
    pub symmetric: bool,
    /// Allows `c * x` entries (linear-form comparison mode).
    pub linear_entries: bool,
}

impl SymbolicMatrix {
    pub fn zeros(n: usize) -> Self {
        SymbolicMatrix { entries: vec![vec![Weight::zero(); n]; n], symmetric: false, linear_entries: false }
    }

    pub fn from_rows(rows: Vec<Vec<Weight>>) -> Self {
        let mut m = SymbolicMatrix { entries: rows, symmetric: false, linear_entries: false };
        m.symmetric = m.is_symmetric();
        m
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Weight {
        &self.entries[i][j]
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..i).all(|j| self.entries[i][j] == self.entries[j][i]))
    }

    pub fn variables(&self) -> Vec<String> {
        let mut vars: Vec<String> = self
            .entries
            .iter()
            .flatten()
            .filter_map(|w| match w {
                Weight::Var(x) | Weight::Scaled(x, _) => Some(x.clone()),
                Weight::Const(_) => None,
            })
            .collect();
        vars.sort();
        vars.dedup();
        vars
    }

    /// Every entry is a variable, one of `allowed`, or 0.
    pub fn entries_within(&self, allowed: &[FieldElement]) -> bool {
        self.entries.iter().flatten().all(|w| match w {
            Weight::Var(_) => true,
            Weight::Scaled(..) => self.linear_entries,
            Weight::Const(c) => c.is_zero() || allowed.contains(c),
        })
    }

    /// Every entry is a variable or one of 0, 1, -1, 1/2.
    pub fn in_strict_alphabet(&self) -> bool {
        self.entries_within(&strict_alphabet())
    }

    pub fn to_poly_rows(&self, spec: &FieldSpec) -> Result<Vec<Vec<DensePolynomial>>> {
        self.entries.iter().map(|row| row.iter().map(|w| w.to_poly(spec)).collect()).collect()
    }

    pub fn eval(
        &self,
        assignment: &std::collections::HashMap<String, FieldElement>,
        spec: &FieldSpec,
    ) -> Result<Vec<Vec<FieldElement>>> {
        self.entries.iter().map(|row| row.iter().map(|w| w.eval(assignment, spec)).collect()).collect()
    }

    /// Text format: `t [symmetric]` then `t` rows of entries.
    pub fn render(&self) -> String {
        let mut out = format!("{}{}\n", self.dim(), if self.symmetric { " symmetric" } else { "" });
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(|w| w.to_string()).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str, spec: &FieldSpec) -> Result<Self> {
        let err = |line: usize, msg: &str| Error::SyntaxError { pos: line, msg: msg.to_string() };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim().starts_with('#'));
        let (ln, header) = lines.next().ok_or_else(|| err(0, "empty matrix file"))?;
        let mut parts = header.split_whitespace();
        let dim: usize = parts.next().and_then(|t| t.parse().ok()).ok_or_else(|| err(ln + 1, "bad dimension"))?;
        let symmetric = match parts.next() {
            None => false,
            Some("symmetric") => true,
            Some(_) => return Err(err(ln + 1, "expected `symmetric`")),
        };
        let mut rows = Vec::with_capacity(dim);
        for (ln, line) in lines {
            let row: Vec<Weight> = line.split_whitespace().map(|t| Weight::parse(t, spec)).collect::<Result<_>>()?;
            if row.len() != dim {
                return Err(err(ln + 1, "row has the wrong length"));
            }
            rows.push(row);
        }
        if rows.len() != dim {
            return Err(err(0, "wrong number of rows"));
        }
        let mut m = SymbolicMatrix::from_rows(rows);
        if symmetric && !m.symmetric {
            return Err(err(0, "matrix declared symmetric is not"));
        }
        m.linear_entries = m.entries.iter().flatten().any(|w| matches!(w, Weight::Scaled(..)));
        Ok(m)
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Vec<String>> =
            self.entries.iter().map(|row| row.iter().map(|w| w.to_string()).collect()).collect();
        json!({ "dim": self.dim(), "symmetric": self.symmetric, "entries": rows })
    }
}

pub fn strict_alphabet() -> Vec<FieldElement> {
    vec![FieldElement::integer(1), FieldElement::integer(-1), FieldElement::rational(1, 2)]
}

/// Largest vertex count accepted by the permutation oracle.
pub const CYCLE_COVER_LIMIT: usize = 12;
/// Largest vertex count accepted by the loop/2-cycle oracle.
pub const SHORT_COVER_LIMIT: usize = 16;

/// Sum over all cycle covers (permutations) of the matrix's digraph of the
/// cover weight, signed by `(-1)^(number of even cycles)` when `signed`.
pub fn cycle_cover_sum(m: &SymbolicMatrix, signed: bool, spec: &FieldSpec) -> Result<DensePolynomial> {
    let n = m.dim();
    if n > CYCLE_COVER_LIMIT {
        return Err(Error::TooLarge(format!("{n} vertices")));
    }
    let polys = m.to_poly_rows(spec)?;
    let mut total = DensePolynomial::zero(spec);
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    cover_rec(&polys, 0, &mut perm, &mut used, &mut |perm| {
        let mut w = DensePolynomial::one(spec);
        for (i, j) in perm.iter().enumerate() {
            w = w.mul(&polys[i][*j])?;
        }
        if signed && even_cycles(perm) % 2 == 1 {
            w = w.neg();
        }
        total = total.add(&w)?;
        Ok(())
    })?;
    Ok(total)
}

fn cover_rec(
    polys: &[Vec<DensePolynomial>],
    row: usize,
    perm: &mut Vec<usize>,
    used: &mut Vec<bool>,
    visit: &mut dyn FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if row == polys.len() {
        return visit(perm);
    }
    for col in 0..polys.len() {
        if !used[col] && !polys[row][col].is_zero() {
            used[col] = true;
            perm[row] = col;
            cover_rec(polys, row + 1, perm, used, visit)?;
            used[col] = false;
        }
    }
    Ok(())
}

fn covers_rec(
    adj: &[Vec<usize>],
    rows: &[usize],
    i: usize,
    perm: &mut Vec<usize>,
    used: &mut Vec<bool>,
    max: usize,
    out: &mut Vec<Vec<usize>>,
) {
    if out.len() >= max {
        return;
    }
    let Some(&v) = rows.get(i) else {
        out.push(perm.clone());
        return;
    };
    for &u in &adj[v] {
        if !used[u] {
            used[u] = true;
            perm[v] = u;
            covers_rec(adj, rows, i + 1, perm, used, max, out);
            used[u] = false;
        }
    }
    perm[v] = v;
}

pub(crate) fn even_cycles(perm: &[usize]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut even = 0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut v = start;
        while !seen[v] {
            seen[v] = true;
            v = perm[v];
            len += 1;
        }
        if len % 2 == 0 {
            even += 1;
        }
    }
    even
}

/// Sum over covers made only of loops and 2-cycles; a 2-cycle on edge `uv`
/// contributes `w(uv)^2`. Equals the determinant in characteristic 2.
pub fn cycle_cover_sum_short(g: &WeightedGraph, spec: &FieldSpec) -> Result<DensePolynomial> {
    let n = g.num_vertices();
    if n > SHORT_COVER_LIMIT {
        return Err(Error::TooLarge(format!("{n} vertices")));
    }
    let m = g.adjacency();
    let polys = m.to_poly_rows(spec)?;
    let mut covered = vec![false; n];
    short_rec(&polys, &mut covered, spec)
}

fn short_rec(polys: &[Vec<DensePolynomial>], covered: &mut Vec<bool>, spec: &FieldSpec) -> Result<DensePolynomial> {
    let Some(v) = covered.iter().position(|c| !c) else {
        return Ok(DensePolynomial::one(spec));
    };
    let mut total = DensePolynomial::zero(spec);
    covered[v] = true;
    if !polys[v][v].is_zero() {
        total = total.add(&polys[v][v].mul(&short_rec(polys, covered, spec)?)?)?;
    }
    for u in v + 1..polys.len() {
        if !covered[u] && !polys[v][u].is_zero() {
            covered[u] = true;
            let sq = polys[v][u].mul(&polys[v][u])?;
            total = total.add(&sq.mul(&short_rec(polys, covered, spec)?)?)?;
            covered[u] = false;
        }
    }
    covered[v] = false;
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{ryser_permanent, symbolic_det};

    fn q() -> FieldSpec {
        FieldSpec::Rational
    }

    fn poly(text: &str) -> DensePolynomial {
        DensePolynomial::parse(text, &q()).unwrap()
    }

    fn matrix(text: &str) -> SymbolicMatrix {
        SymbolicMatrix::parse(text, &q()).unwrap()
    }

    #[test]
    fn graph_adjacency_is_symmetric() {
        let mut g = WeightedGraph::new(2);
        g.set_edge(0, 1, Weight::var("x"));
        let m = g.adjacency();
        assert!(m.symmetric);
        assert_eq!(m.entries, vec![vec![Weight::zero(), Weight::var("x")], vec![Weight::var("x"), Weight::zero()]]);
    }

    #[test]
    fn digraph_adjacency_is_not() {
        let mut d = WeightedDigraph::new(2);
        d.set_arc(0, 1, Weight::var("x"));
        let m = d.adjacency();
        assert!(!m.is_symmetric());
        assert_eq!(m.entries[0][1], Weight::var("x"));
        assert_eq!(m.entries[1][0], Weight::zero());
    }

    #[test]
    fn triangle_graph() {
        let mut g = WeightedGraph::new(3);
        g.set_edge(0, 1, Weight::var("x"));
        g.set_edge(0, 2, Weight::var("y"));
        g.set_edge(1, 2, Weight::var("z"));
        let m = g.adjacency();
        assert_eq!(m, matrix("3 symmetric\n0 x y\nx 0 z\ny z 0\n"));
        assert_eq!(cycle_cover_sum(&m, true, &q()).unwrap(), poly("2 * x y z"));
    }

    #[test]
    fn single_edge_covers() {
        let m = matrix("2\n0 x\nx 0");
        assert_eq!(cycle_cover_sum(&m, true, &q()).unwrap(), poly("-1 * x^2"));
        assert_eq!(cycle_cover_sum(&m, false, &q()).unwrap(), poly("x^2"));
        assert_eq!(symbolic_det(&m, &q()).unwrap(), poly("-1 * x^2"));
    }

    #[test]
    fn short_covers() {
        let mut g = WeightedGraph::new(2);
        g.set_edge(0, 0, Weight::int(1));
        g.set_edge(1, 1, Weight::int(1));
        g.set_edge(0, 1, Weight::var("b"));
        assert_eq!(cycle_cover_sum_short(&g, &q()).unwrap(), poly("1 + b^2"));
        let mut single = WeightedGraph::new(1);
        single.set_edge(0, 0, Weight::int(1));
        assert_eq!(cycle_cover_sum_short(&single, &q()).unwrap(), poly("1"));
    }

    #[test]
    fn short_covers_match_det_in_char_two() {
        let f = FieldSpec::gf2_16();
        let mut g = WeightedGraph::new(5);
        let names = ["a", "b", "c", "d", "e", "f", "g"];
        let pairs = [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3), (2, 2)];
        for ((u, v), x) in pairs.iter().zip(names) {
            g.set_edge(*u, *v, Weight::var(x));
        }
        let det = symbolic_det(&g.adjacency(), &f).unwrap();
        assert_eq!(cycle_cover_sum_short(&g, &f).unwrap(), det);
        let signed = cycle_cover_sum(&g.adjacency(), true, &f).unwrap();
        assert_eq!(signed, det);
    }

    #[test]
    fn reversing_cycles_preserves_weight() {
        // in a symmetric digraph a cover and its reversal have equal weight,
        // so unsigned sums over covers with a long cycle come in equal pairs
        let m = matrix("3 symmetric\n0 x y\nx 0 z\ny z 0");
        let per = cycle_cover_sum(&m, false, &q()).unwrap();
        assert_eq!(per, poly("2 * x y z"));
        assert_eq!(per, ryser_permanent(&m, &q()).unwrap());
    }

    #[test]
    fn too_large() {
        let m = SymbolicMatrix::zeros(13);
        assert!(matches!(cycle_cover_sum(&m, true, &q()), Err(Error::TooLarge(_))));
        assert!(matches!(cycle_cover_sum_short(&WeightedGraph::new(17), &q()), Err(Error::TooLarge(_))));
    }

    #[test]
    fn dot_export() {
        let mut g = WeightedGraph::new(2);
        g.set_edge(0, 1, Weight::var("x"));
        g.set_role("s", 0);
        g.set_role("t", 1);
        let dot = g.export_dot();
        assert!(dot.contains("s -- t [label=\"x\"]"));
        assert!(dot.contains("s [shape=doublecircle]"));
        assert_eq!(dot, g.export_dot());
        let mut d = WeightedDigraph::new(2);
        d.set_arc(0, 1, Weight::int(-1));
        assert!(d.export_dot().contains("v0 -> v1 [label=\"-1\"]"));
    }

    #[test]
    fn matrix_text_round_trip() {
        let text = "3 symmetric\n0 x 1/2\nx -1 3*y\n1/2 3*y 0\n";
        let m = matrix(text);
        assert!(m.symmetric && m.linear_entries);
        assert_eq!(m.render(), text);
        assert!(!m.in_strict_alphabet() || m.linear_entries);
        assert!(SymbolicMatrix::parse("2 symmetric\n0 x\ny 0", &q()).is_err());
        assert!(SymbolicMatrix::parse("2\n0 x", &q()).is_err());
        assert_eq!(m.to_json()["dim"], 3);
    }

    #[test]
    fn strict_alphabet_check() {
        assert!(matrix("2\nx 1/2\n-1 0").in_strict_alphabet());
        assert!(!matrix("2\nx 2\n-1 0").in_strict_alphabet());
    }
}
