//! Determinant evaluation and randomized identity testing between a circuit
//! and a matrix.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::graph::{SymbolicMatrix, Weight};
use crate::poly::symbolic_det;

/// Largest matrix dimension for the exact upgrade.
pub const EXACT_DIM: usize = 8;
/// Largest computation-gate count for the exact upgrade.
pub const EXACT_GATES: usize = 8;

/// Determinant of a matrix of field values by Bareiss elimination with row
/// pivoting. Every division is exact, so over the rationals intermediate
/// entries stay minors of the input.
pub fn det_values(mut a: Vec<Vec<FieldElement>>, spec: &FieldSpec) -> Result<FieldElement> {
    let n = a.len();
    if n == 0 {
        return Ok(spec.one());
    }
    let mut negate = false;
    let mut prev = spec.one();
    for k in 0..n - 1 {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Ok(spec.zero());
        };
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        let prev_inv = prev.inv()?;
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j].checked_mul(&a[k][k])?.checked_sub(&a[i][k].checked_mul(&a[k][j])?)?;
                a[i][j] = num.checked_mul(&prev_inv)?;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if negate { d.checked_neg() } else { d })
}

/// Determinant of `m` at `assignment`.
pub fn det_eval(m: &SymbolicMatrix, assignment: &HashMap<String, FieldElement>, spec: &FieldSpec) -> Result<FieldElement> {
    det_values(m.eval(assignment, spec)?, spec)
}

/// A point where the two sides differ, replayable from `seed` and `trial`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub seed: u64,
    pub trial: usize,
    pub point: BTreeMap<String, FieldElement>,
    pub lhs: FieldElement,
    pub rhs: FieldElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    VerifiedExact,
    VerifiedRandom { trials: usize, field: String },
    Failed(Witness),
}

/// A dimension bound and whether the matrix meets it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundCheck {
    pub name: String,
    pub bound: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub dim: usize,
    pub bounds: Vec<BoundCheck>,
}

impl Verdict {
    pub fn verified(&self) -> bool {
        !matches!(self.status, Status::Failed(_)) && self.bounds.iter().all(|b| b.holds)
    }

    pub fn with_bound(mut self, name: &str, bound: usize) -> Self {
        self.bounds.push(BoundCheck { name: name.to_string(), bound, holds: self.dim <= bound });
        self
    }

    pub fn to_json(&self) -> Value {
        let status = match &self.status {
            Status::VerifiedExact => json!({ "kind": "verified-exact" }),
            Status::VerifiedRandom { trials, field } => {
                json!({ "kind": "verified-random", "trials": trials, "field": field })
            }
            Status::Failed(w) => json!({
                "kind": "failed",
                "seed": w.seed,
                "trial": w.trial,
                "point": w.point.iter().map(|(k, v)| (k.clone(), Value::String(v.to_string()))).collect::<serde_json::Map<_, _>>(),
                "lhs": w.lhs.to_string(),
                "rhs": w.rhs.to_string(),
            }),
        };
        let bounds: Vec<Value> =
            self.bounds.iter().map(|b| json!({ "name": b.name, "bound": b.bound, "holds": b.holds })).collect();
        json!({ "status": status, "dim": self.dim, "bounds": bounds })
    }
}

/// Smallest admissible field: `2^16` in characteristic 2 (used with more
/// trials), `2^32` otherwise.
fn check_field(spec: &FieldSpec) -> Result<()> {
    let size = spec.size().ok_or(Error::UnsupportedField)?;
    let min = if spec.characteristic() == 2 { 1u128 << 16 } else { 1u128 << 32 };
    if size < min {
        return Err(Error::FieldTooSmall);
    }
    Ok(())
}

/// Default trial count for a field: 20, or 40 in characteristic 2.
pub fn default_trials(spec: &FieldSpec) -> usize {
    if spec.characteristic() == 2 {
        40
    } else {
        20
    }
}

/// Compares `det(m)` with the circuit's value at independent uniform points,
/// the circuit value squared when `squared`.
fn compare(c: &Circuit, m: &SymbolicMatrix, squared: bool, trials: usize, spec: &FieldSpec, seed: u64) -> Result<Verdict> {
    check_field(spec)?;
    c.single_output()?;
    let mut vars: Vec<String> = c.vars().to_vec();
    for v in m.variables() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    let lhs_at = |point: &HashMap<String, FieldElement>| -> Result<FieldElement> {
        let v = c.evaluate_single(point, spec)?;
        if squared {
            v.checked_mul(&v)
        } else {
            Ok(v)
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample = |trial: usize| -> Result<Option<Witness>> {
        let point: HashMap<String, FieldElement> =
            vars.iter().map(|v| Ok((v.clone(), spec.sample_random(&mut rng)?))).collect::<Result<_>>()?;
        let lhs = lhs_at(&point)?;
        let rhs = det_eval(m, &point, spec)?;
        Ok((lhs != rhs).then(|| Witness { seed, trial, point: point.into_iter().collect(), lhs, rhs }))
    };
    let verdict = |status| Verdict { status, dim: m.dim(), bounds: Vec::new() };
    for trial in 0..trials {
        if let Some(w) = sample(trial)? {
            return Ok(verdict(Status::Failed(w)));
        }
    }
    if m.dim() <= EXACT_DIM && c.skinny_size() <= EXACT_GATES {
        let mut lhs = c.expand_single(spec)?;
        if squared {
            lhs = lhs.mul(&lhs)?;
        }
        if symbolic_det(m, spec)? == lhs {
            return Ok(verdict(Status::VerifiedExact));
        }
        for trial in trials..trials + 1000 {
            if let Some(w) = sample(trial)? {
                return Ok(verdict(Status::Failed(w)));
            }
        }
    }
    Ok(verdict(Status::VerifiedRandom { trials, field: spec.to_string() }))
}

/// Schwartz-Zippel test of `det(m) = c` over a finite field with at least
/// `2^32` elements (`2^16` in characteristic 2). Small instances are
/// upgraded to an exact symbolic comparison.
pub fn identity_test(c: &Circuit, m: &SymbolicMatrix, trials: usize, spec: &FieldSpec, seed: u64) -> Result<Verdict> {
    compare(c, m, false, trials, spec, seed)
}

/// As [`identity_test`] for `det(m) = c^2`.
pub fn identity_test_squared(c: &Circuit, m: &SymbolicMatrix, trials: usize, spec: &FieldSpec, seed: u64) -> Result<Verdict> {
    compare(c, m, true, trials, spec, seed)
}

/// Replays a witness: recomputes both sides at its point.
pub fn replay(c: &Circuit, m: &SymbolicMatrix, squared: bool, w: &Witness, spec: &FieldSpec) -> Result<bool> {
    let point: HashMap<String, FieldElement> = w.point.clone().into_iter().collect();
    let mut lhs = c.evaluate_single(&point, spec)?;
    if squared {
        lhs = lhs.checked_mul(&lhs)?;
    }
    Ok(lhs == w.lhs && det_eval(m, &point, spec)? == w.rhs)
}

/// Changes one nonzero entry: a constant `k` becomes `-k` and a variable `x`
/// becomes `-x`. Returns `None` for the zero matrix.
pub fn perturb<R: Rng>(m: &SymbolicMatrix, rng: &mut R) -> Result<Option<SymbolicMatrix>> {
    let n = m.dim();
    let cells: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| !m.get(*i, *j).is_zero()).collect();
    let Some(&(i, j)) = cells.choose(rng) else {
        return Ok(None);
    };
    let mut out = m.clone();
    let flipped = m.get(i, j).scaled(&FieldElement::integer(-1))?;
    out.linear_entries |= matches!(flipped, Weight::Scaled(..));
    out.entries[i][j] = flipped;
    out.symmetric = out.is_symmetric();
    Ok(Some(out))
}

/// Tally of a perturbation run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PerturbationReport {
    pub mutations: usize,
    pub caught: usize,
}

impl PerturbationReport {
    pub fn rate(&self) -> f64 {
        self.caught as f64 / self.mutations.max(1) as f64
    }
}

/// Applies `mutations` random single-entry perturbations spread over the
/// given (circuit, matrix) pairs and counts how many the identity test
/// rejects.
pub fn perturbation_suite(pairs: &[(Circuit, SymbolicMatrix)], mutations: usize, spec: &FieldSpec, seed: u64) -> Result<PerturbationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = PerturbationReport { mutations: 0, caught: 0 };
    while report.mutations < mutations {
        let (c, m) = pairs.choose(&mut rng).ok_or(Error::NoOutput)?;
        let Some(bad) = perturb(m, &mut rng)? else {
            continue;
        };
        report.mutations += 1;
        let v = identity_test(c, &bad, default_trials(spec), spec, rng.gen())?;
        if matches!(v.status, Status::Failed(_)) {
            report.caught += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_expression;
    use crate::formula::{sym_matrix, SizeMode};

    fn q() -> FieldSpec {
        FieldSpec::Rational
    }

    fn matrix(text: &str) -> SymbolicMatrix {
        SymbolicMatrix::parse(text, &q()).unwrap()
    }

    fn point(pairs: &[(&str, i64)]) -> HashMap<String, FieldElement> {
        pairs.iter().map(|(k, v)| (k.to_string(), FieldElement::integer(*v))).collect()
    }

    #[test]
    fn identity_and_singular() {
        let id = matrix("3\n1 0 0\n0 1 0\n0 0 1");
        assert_eq!(det_eval(&id, &HashMap::new(), &q()).unwrap(), FieldElement::integer(1));
        let singular = matrix("2\n1 2\n2 4");
        assert!(det_eval(&singular, &HashMap::new(), &q()).unwrap().is_zero());
        assert_eq!(det_values(Vec::new(), &q()).unwrap(), FieldElement::integer(1));
    }

    #[test]
    fn intro_matrix_at_three_four() {
        let m = matrix("5\n0 x 0 y -1\nx 0 1 0 0\n0 1 0 -1 0\ny 0 -1 0 1/2\n-1 0 0 1/2 0");
        assert_eq!(det_eval(&m, &point(&[("x", 3), ("y", 4)]), &q()).unwrap(), FieldElement::integer(7));
    }

    #[test]
    fn pivoting_and_prime_fields() {
        let m = matrix("3\n0 2 1\n3 0 0\n1 1 1");
        // 0*(0-0) - 2*(3-0) + 1*(3-0)
        assert_eq!(det_eval(&m, &HashMap::new(), &q()).unwrap(), FieldElement::integer(-3));
        let p = FieldSpec::prime(7).unwrap();
        assert_eq!(det_eval(&m, &HashMap::new(), &p).unwrap(), p.from_i64(-3));
    }

    #[test]
    fn missing_assignment() {
        let m = matrix("1\nx");
        assert_eq!(det_eval(&m, &HashMap::new(), &q()), Err(Error::MissingAssignment("x".into())));
    }

    #[test]
    fn verdicts() {
        let c = parse_expression("x + y").unwrap();
        let m = sym_matrix(&c, SizeMode::Skinny).unwrap();
        let spec = FieldSpec::default_prime();
        let v = identity_test(&c, &m, 20, &spec, 3).unwrap();
        assert_eq!(v.status, Status::VerifiedExact);
        let big = parse_expression("x1*x2 + x3*x4 + x5*x6 + x7*x8 + x1").unwrap();
        let m = sym_matrix(&big, SizeMode::Skinny).unwrap();
        let v = identity_test(&big, &m, 20, &spec, 3).unwrap();
        assert!(matches!(v.status, Status::VerifiedRandom { trials: 20, .. }));
        assert!(v.with_bound("2e+3", 2 * big.skinny_size() + 3).verified());
    }

    #[test]
    fn failures_carry_replayable_witnesses() {
        let c = parse_expression("x + y").unwrap();
        let mut m = sym_matrix(&c, SizeMode::Skinny).unwrap();
        let minus_one = FieldElement::integer(-1);
        let (i, j) = (0..5)
            .flat_map(|i| (0..5).map(move |j| (i, j)))
            .find(|(i, j)| m.get(*i, *j).as_const() == Some(&minus_one))
            .unwrap();
        m.entries[i][j] = Weight::int(1);
        let spec = FieldSpec::default_prime();
        let v = identity_test(&c, &m, 20, &spec, 11).unwrap();
        let Status::Failed(w) = v.status else { panic!("perturbation not caught") };
        assert_eq!(w.seed, 11);
        assert!(replay(&c, &m, false, &w, &spec).unwrap());
        assert_ne!(w.lhs, w.rhs);
    }

    #[test]
    fn small_fields_rejected() {
        let c = parse_expression("x").unwrap();
        let m = matrix("1\nx");
        let small = FieldSpec::prime(65_537).unwrap();
        assert_eq!(identity_test(&c, &m, 20, &small, 0).unwrap_err(), Error::FieldTooSmall);
        assert_eq!(identity_test(&c, &m, 20, &FieldSpec::gf2(), 0).unwrap_err(), Error::FieldTooSmall);
        assert_eq!(identity_test(&c, &m, 20, &q(), 0).unwrap_err(), Error::UnsupportedField);
        assert!(identity_test(&c, &m, 40, &FieldSpec::gf2_16(), 0).unwrap().verified());
    }

    #[test]
    fn squared_test() {
        let c = parse_expression("x + y").unwrap();
        let m = matrix("2\nx y\ny x");
        // det = x^2 - y^2 = x^2 + y^2 = (x + y)^2 in characteristic 2
        let v = identity_test_squared(&c, &m, 40, &FieldSpec::gf2_16(), 5).unwrap();
        assert!(v.verified());
        let v = identity_test_squared(&c, &m, 20, &FieldSpec::default_prime(), 5).unwrap();
        assert!(!v.verified());
    }
}
