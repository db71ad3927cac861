//! Exact symbolic determinant and permanent oracles for small matrices.

use std::collections::HashMap;

use super::DensePolynomial;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::graph::SymbolicMatrix;

/// Largest dimension accepted by the symbolic permanent.
pub const SYMBOLIC_LIMIT: usize = 12;
/// Largest dimension accepted by the symbolic determinant. The memo holds
/// only column sets reachable through nonzero entries, so sparse matrices of
/// this size are cheap while dense ones are not.
pub const DET_LIMIT: usize = 24;

fn check_dim(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::TooLarge(format!("{n}x{n} matrix")));
    }
    Ok(())
}

/// Determinant by Laplace expansion along rows, memoized over the set of
/// used columns. After row `k`, `layer[mask]` is the signed sum over
/// injections of the first `k` rows onto `mask`; only reachable masks are stored.
pub fn symbolic_det(m: &SymbolicMatrix, spec: &FieldSpec) -> Result<DensePolynomial> {
    let n = m.dim();
    check_dim(n, DET_LIMIT)?;
    let rows = m.to_poly_rows(spec)?;
    let mut layer: HashMap<u32, DensePolynomial> = HashMap::from([(0, DensePolynomial::one(spec))]);
    for row in &rows {
        let mut next: HashMap<u32, DensePolynomial> = HashMap::new();
        for (mask, acc) in &layer {
            for (j, entry) in row.iter().enumerate() {
                if mask & (1 << j) != 0 || entry.is_zero() {
                    continue;
                }
                // columns already used to the right of j are inversions
                let mut term = acc.mul(entry)?;
                if (mask >> (j + 1)).count_ones() % 2 == 1 {
                    term = term.neg();
                }
                let slot = next.entry(mask | (1 << j)).or_insert_with(|| DensePolynomial::zero(spec));
                *slot = slot.add(&term)?;
            }
        }
        next.retain(|_, p| !p.is_zero());
        layer = next;
    }
    Ok(layer.remove(&((1u32 << n) - 1)).unwrap_or_else(|| DensePolynomial::zero(spec)))
}

/// Symbolic permanent by Ryser's inclusion-exclusion formula.
pub fn ryser_permanent(m: &SymbolicMatrix, spec: &FieldSpec) -> Result<DensePolynomial> {
    let n = m.dim();
    check_dim(n, SYMBOLIC_LIMIT)?;
    let rows = m.to_poly_rows(spec)?;
    let mut total = DensePolynomial::zero(spec);
    for subset in 1usize..(1 << n) {
        let mut prod = DensePolynomial::one(spec);
        for row in &rows {
            let mut s = DensePolynomial::zero(spec);
            for (j, entry) in row.iter().enumerate() {
                if subset & (1 << j) != 0 {
                    s = s.add(entry)?;
                }
            }
            prod = prod.mul(&s)?;
            if prod.is_zero() {
                break;
            }
        }
        if (n - subset.count_ones() as usize) % 2 == 1 {
            prod = prod.neg();
        }
        total = total.add(&prod)?;
    }
    Ok(total)
}

/// Permanent of a matrix of field values by Ryser's formula.
pub fn permanent_values(m: &[Vec<FieldElement>], spec: &FieldSpec) -> Result<FieldElement> {
    let n = m.len();
    if n > 20 {
        return Err(Error::TooLarge(format!("{n}x{n} matrix")));
    }
    let mut total = spec.zero();
    for subset in 0usize..(1 << n) {
        let mut prod = spec.one();
        for row in m {
            let mut s = spec.zero();
            for (j, entry) in row.iter().enumerate() {
                if subset & (1 << j) != 0 {
                    s = s.checked_add(&entry.embed(spec)?)?;
                }
            }
            prod = prod.checked_mul(&s)?;
        }
        if (n - subset.count_ones() as usize) % 2 == 1 {
            prod = prod.checked_neg();
        }
        total = total.checked_add(&prod)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::cycle_cover_sum;
    use proptest::prelude::*;

    fn q() -> FieldSpec {
        FieldSpec::Rational
    }

    fn matrix(text: &str) -> SymbolicMatrix {
        SymbolicMatrix::parse(text, &q()).unwrap()
    }

    fn poly(text: &str) -> DensePolynomial {
        DensePolynomial::parse(text, &q()).unwrap()
    }

    #[test]
    fn det_of_two_by_two_edge() {
        assert_eq!(symbolic_det(&matrix("2\n0 x\nx 0"), &q()).unwrap(), poly("-1 * x^2"));
    }

    #[test]
    fn det_of_four_by_four_sum_matrix() {
        // both surviving permutations are transpositions, so the sign is negative
        let m = matrix("4\nx 0 0 1\n0 y 0 1\n0 0 1 0\n1 1 0 0");
        assert_eq!(symbolic_det(&m, &q()).unwrap(), poly("-1 * x - y"));
    }

    #[test]
    fn det_of_triangle() {
        let m = matrix("3\n0 x y\nx 0 z\ny z 0");
        assert_eq!(symbolic_det(&m, &q()).unwrap(), poly("2 * x y z"));
    }

    #[test]
    fn det_of_generic_three_by_three() {
        let m = matrix("3\na b c\nd e f\ng h i");
        let leibniz = poly("a e i - a f h - b d i + b f g + c d h - c e g");
        assert_eq!(symbolic_det(&m, &q()).unwrap(), leibniz);
    }

    #[test]
    fn permanents() {
        assert_eq!(ryser_permanent(&matrix("2\na b\nc d"), &q()).unwrap(), poly("a d + b c"));
        assert_eq!(ryser_permanent(&matrix("3\n1 0 0\n0 1 0\n0 0 1"), &q()).unwrap(), poly("1"));
        let values = vec![
            vec![FieldElement::integer(1), FieldElement::integer(2)],
            vec![FieldElement::integer(3), FieldElement::integer(4)],
        ];
        assert_eq!(permanent_values(&values, &q()).unwrap(), FieldElement::integer(10));
    }

    #[test]
    fn limits() {
        assert!(matches!(symbolic_det(&SymbolicMatrix::zeros(25), &q()), Err(Error::TooLarge(_))));
        assert!(matches!(ryser_permanent(&SymbolicMatrix::zeros(13), &q()), Err(Error::TooLarge(_))));
    }

    fn random_matrix() -> impl Strategy<Value = SymbolicMatrix> {
        (1usize..=4).prop_flat_map(|n| {
            proptest::collection::vec(0u8..6, n * n).prop_map(move |cells| {
                let names = ["a", "b", "c"];
                let rows = cells
                    .chunks(n)
                    .map(|row| {
                        row.iter()
                            .map(|c| match c {
                                0..=2 => crate::graph::Weight::var(names[*c as usize]),
                                3 => crate::graph::Weight::int(-1),
                                4 => crate::graph::Weight::int(0),
                                _ => crate::graph::Weight::int(2),
                            })
                            .collect()
                    })
                    .collect();
                SymbolicMatrix::from_rows(rows)
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn oracles_agree_with_cycle_covers(m in random_matrix()) {
            prop_assert_eq!(symbolic_det(&m, &q()).unwrap(), cycle_cover_sum(&m, true, &q()).unwrap());
            prop_assert_eq!(ryser_permanent(&m, &q()).unwrap(), cycle_cover_sum(&m, false, &q()).unwrap());
        }
    }
}
