//! Characteristic-2 constructions: a symmetric matrix whose determinant is
//! the square of a weakly-skew polynomial, and the partial permanent identity
//! `det(A + I) = per*(B)^2` for `A = [[0, B], [B^t, 0]]`.

use std::collections::HashMap;

use num_integer::Integer;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::graph::{SymbolicMatrix, Weight, WeightedGraph};
use crate::poly::{ryser_permanent, symbolic_det, DensePolynomial, SYMBOLIC_LIMIT};
use crate::verify::det_values;
use crate::ws::{ws_nonsym_matrix, WsMode};

/// Largest dimension for the symbolic partial permanent.
pub const PARTIAL_PERMANENT_LIMIT: usize = 8;

/// Integer constants reduced modulo 2; other weights unchanged.
fn reduce_mod_two(w: &Weight) -> Weight {
    match w {
        Weight::Const(FieldElement::Rational(r)) if r.is_integer() => {
            Weight::int(if r.numer().is_odd() { 1 } else { 0 })
        }
        other => other.clone(),
    }
}

/// A non-symmetric matrix `M` turned into the bipartite graph with an edge
/// `{u^s, v^t}` per nonzero entry `M[u][v]`, and its adjacency matrix
/// `[[0, M], [M^t, 0]]`.
#[derive(Clone, Debug)]
pub struct BipartiteDoubling {
    pub source: SymbolicMatrix,
    pub graph: WeightedGraph,
    pub matrix: SymbolicMatrix,
}

/// Doubles `m`; vertex `u^s` is `u` and `v^t` is `dim + v`.
pub fn double(m: &SymbolicMatrix) -> BipartiteDoubling {
    let t = m.dim();
    let mut graph = WeightedGraph::new(2 * t);
    for u in 0..t {
        for v in 0..t {
            let w = m.get(u, v);
            if !w.is_zero() {
                graph.set_edge(u, t + v, w.clone());
            }
        }
    }
    let matrix = graph.adjacency();
    BipartiteDoubling { source: m.clone(), graph, matrix }
}

/// Symmetric matrix of dimension at most `2m + 2` whose determinant over any
/// field of characteristic 2 is the square of the circuit's polynomial.
pub fn square_matrix_char2(c: &Circuit) -> Result<BipartiteDoubling> {
    let mut m = ws_nonsym_matrix(c, WsMode::Fat)?;
    for w in m.entries.iter_mut().flatten() {
        *w = reduce_mod_two(w);
    }
    Ok(double(&m))
}

/// Number of permutations `p` with every `m[i][p(i)]` nonzero: the cycle
/// covers of the digraph of `m`, loops included.
pub fn count_cycle_covers(m: &SymbolicMatrix) -> usize {
    fn rec(m: &SymbolicMatrix, row: usize, used: &mut Vec<bool>) -> usize {
        if row == m.dim() {
            return 1;
        }
        let mut total = 0;
        for col in 0..m.dim() {
            if !used[col] && !m.get(row, col).is_zero() {
                used[col] = true;
                total += rec(m, row + 1, used);
                used[col] = false;
            }
        }
        total
    }
    rec(m, 0, &mut vec![false; m.dim()])
}

/// Sum over injective partial maps `p` of the products `B[i][p(i)]`; the
/// empty map contributes 1. Rows are scanned in order with the set of used
/// columns as state.
pub fn partial_permanent(b: &SymbolicMatrix, spec: &FieldSpec) -> Result<DensePolynomial> {
    let n = b.dim();
    if n > PARTIAL_PERMANENT_LIMIT {
        return Err(Error::TooLarge(format!("{n}x{n} partial permanent")));
    }
    let rows = b.to_poly_rows(spec)?;
    let mut dp = vec![DensePolynomial::zero(spec); 1 << n];
    dp[0] = DensePolynomial::one(spec);
    for row in &rows {
        let mut next = dp.clone();
        for mask in 0..1usize << n {
            if dp[mask].is_zero() {
                continue;
            }
            for (j, entry) in row.iter().enumerate() {
                if mask & (1 << j) == 0 && !entry.is_zero() {
                    next[mask | 1 << j] = next[mask | 1 << j].add(&dp[mask].mul(entry)?)?;
                }
            }
        }
        dp = next;
    }
    dp.into_iter().try_fold(DensePolynomial::zero(spec), |acc, p| acc.add(&p))
}

/// The partial permanent of a matrix of field values.
pub fn partial_permanent_values(b: &[Vec<FieldElement>], spec: &FieldSpec) -> Result<FieldElement> {
    let n = b.len();
    if n > 20 {
        return Err(Error::TooLarge(format!("{n}x{n} partial permanent")));
    }
    let mut dp = vec![spec.zero(); 1 << n];
    dp[0] = spec.one();
    for row in b {
        let mut next = dp.clone();
        for mask in 0..1usize << n {
            if dp[mask].is_zero() {
                continue;
            }
            for (j, entry) in row.iter().enumerate() {
                if mask & (1 << j) == 0 {
                    let add = dp[mask].checked_mul(&entry.embed(spec)?)?;
                    next[mask | 1 << j] = next[mask | 1 << j].checked_add(&add)?;
                }
            }
        }
        dp = next;
    }
    dp.iter().try_fold(spec.zero(), |acc, v| acc.checked_add(v))
}

/// `[[I, B], [B^t, I]]`.
pub fn shifted_doubling(b: &SymbolicMatrix) -> SymbolicMatrix {
    let n = b.dim();
    let mut a = SymbolicMatrix::zeros(2 * n);
    for i in 0..n {
        a.entries[i][i] = Weight::int(1);
        a.entries[n + i][n + i] = Weight::int(1);
        for j in 0..n {
            a.entries[i][n + j] = b.get(i, j).clone();
            a.entries[n + j][i] = b.get(i, j).clone();
        }
    }
    a.symmetric = true;
    a
}

/// Outcome of checking `det(A + I) = per*(B)^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialPermVerdict {
    pub n: usize,
    /// Symbolic comparison rather than random points.
    pub exact: bool,
    pub holds: bool,
    /// Last compared values, rendered.
    pub lhs: String,
    pub rhs: String,
}

/// Checks the identity over `spec` (characteristic 2): symbolically for
/// `n <= 4`, otherwise at `trials` random points drawn from `seed`.
pub fn partial_perm_identity(b: &SymbolicMatrix, spec: &FieldSpec, trials: usize, seed: u64) -> Result<PartialPermVerdict> {
    if spec.characteristic() != 2 {
        return Err(Error::UnsupportedField);
    }
    let n = b.dim();
    let a = shifted_doubling(b);
    if 2 * n <= SYMBOLIC_LIMIT && n <= 4 {
        let lhs = symbolic_det(&a, spec)?;
        let p = partial_permanent(b, spec)?;
        let rhs = p.mul(&p)?;
        return Ok(PartialPermVerdict { n, exact: true, holds: lhs == rhs, lhs: lhs.to_string(), rhs: rhs.to_string() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut verdict = PartialPermVerdict { n, exact: false, holds: true, lhs: String::new(), rhs: String::new() };
    for _ in 0..trials.max(1) {
        let point: HashMap<String, FieldElement> =
            b.variables().into_iter().map(|v| Ok((v, spec.sample_random(&mut rng)?))).collect::<Result<_>>()?;
        let lhs = det_values(a.eval(&point, spec)?, spec)?;
        let p = partial_permanent_values(&b.eval(&point, spec)?, spec)?;
        let rhs = p.checked_mul(&p)?;
        verdict.lhs = lhs.to_string();
        verdict.rhs = rhs.to_string();
        if lhs != rhs {
            verdict.holds = false;
            break;
        }
    }
    Ok(verdict)
}

/// `sum over square submatrices M of B of per(M)^2`, the empty one counting 1.
pub fn squared_minor_permanents(b: &SymbolicMatrix, spec: &FieldSpec) -> Result<DensePolynomial> {
    let n = b.dim();
    if n > 4 {
        return Err(Error::TooLarge(format!("{n}x{n} minor enumeration")));
    }
    let mut total = DensePolynomial::zero(spec);
    for rows in 0usize..1 << n {
        for cols in 0usize..1 << n {
            if rows.count_ones() != cols.count_ones() {
                continue;
            }
            let r: Vec<usize> = (0..n).filter(|i| rows & (1 << i) != 0).collect();
            let c: Vec<usize> = (0..n).filter(|j| cols & (1 << j) != 0).collect();
            let sub = SymbolicMatrix::from_rows(r.iter().map(|i| c.iter().map(|j| b.get(*i, *j).clone()).collect()).collect());
            let p = if sub.dim() == 0 { DensePolynomial::one(spec) } else { ryser_permanent(&sub, spec)? };
            total = total.add(&p.mul(&p)?)?;
        }
    }
    Ok(total)
}

/// Whether `x` is `1` or `0` in GF(2) when reduced; helper for 0/1 inputs.
pub fn is_binary_constant(w: &Weight) -> bool {
    match w {
        Weight::Const(FieldElement::Rational(r)) => r.is_zero() || r.is_one(),
        _ => false,
    }
}
