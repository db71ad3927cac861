//! Closed-form size bounds for dense polynomials.

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Binomial coefficient, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

fn saturating_sub(a: BigUint, b: BigUint) -> BigUint {
    if a > b {
        a - b
    } else {
        BigUint::zero()
    }
}

/// Formula size bound `C(n+d+1, n+1) - C(n+d-1, n+1) - 2` for a dense
/// polynomial of degree `d` in `n` variables.
pub fn formula_bound(n: u64, d: u64) -> BigUint {
    assert!(d >= 1, "degree must be positive");
    let sub = binomial(n + d - 1, n + 1) + BigUint::from(2u32);
    saturating_sub(binomial(n + d + 1, n + 1), sub)
}

/// Symmetric dimension when matrix entries may be linear forms.
pub fn linear_entry_sym_bound(n: u64, d: u64) -> BigUint {
    let sub = binomial(n + d - 1, n + 1) + binomial(n + d - 1, n - 1) + BigUint::one();
    saturating_sub(binomial(n + d + 1, n + 1), sub) * BigUint::from(2u32)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsReport {
    pub n: u64,
    pub d: u64,
    /// Formula size bound.
    pub formula: BigUint,
    /// Symmetric dimension bound `4 C(n+d-1, n) - 2`.
    pub symmetric: BigUint,
    /// Symmetric dimension with linear-form entries.
    pub symmetric_linear: BigUint,
    /// Quarez's dimension `2 C(n+d, n)` for degree `2d`.
    pub quarez: BigUint,
    /// Size `n C(n+d, n+1)` of the all-monomials formula.
    pub monomial_formula_size: BigUint,
}

pub fn bounds_report(n: u64, d: u64) -> BoundsReport {
    assert!(n >= 1 && d >= 1, "bounds need n, d >= 1");
    BoundsReport {
        n,
        d,
        formula: formula_bound(n, d),
        symmetric: binomial(n + d - 1, n) * BigUint::from(4u32) - BigUint::from(2u32),
        symmetric_linear: linear_entry_sym_bound(n, d),
        quarez: binomial(n + d, n) * BigUint::from(2u32),
        monomial_formula_size: binomial(n + d, n + 1) * BigUint::from(n),
    }
}

impl BoundsReport {
    pub const CSV_HEADER: &'static str = "n,d,F,S,S_linear,quarez,monomial_formula";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n,
            self.d,
            self.formula,
            self.symmetric,
            self.symmetric_linear,
            self.quarez,
            self.monomial_formula_size
        )
    }
}

/// Table of `G(N, d) = F(N - d - 1, d) + 2`, indexed as `[n][d]` with
/// `N = n + d + 1`, for `n = 0..=max_n` and `d = 1..=max_d` (column 0 unused).
/// The recursion's size analysis needs `G` to satisfy Pascal's rule.
pub fn pascal_table(max_n: u64, max_d: u64) -> Vec<Vec<BigUint>> {
    (0..=max_n)
        .map(|n| {
            (0..=max_d)
                .map(|d| if d == 0 { BigUint::zero() } else { formula_bound(n, d) + BigUint::from(2u32) })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), big(10));
        assert_eq!(binomial(1, 2), big(0));
        assert_eq!(binomial(7, 0), big(1));
        assert_eq!(binomial(60, 30), "118264581564861424".parse::<BigUint>().unwrap());
    }

    #[test]
    fn hand_computed_reports() {
        // F = C(n+d+1,n+1) - C(n+d-1,n+1) - 2; S = 4 C(n+d-1,n) - 2;
        // quarez = 2 C(n+d,n); monomial = n C(n+d,n+1)
        let r = bounds_report(1, 1);
        assert_eq!((r.formula.clone(), r.symmetric.clone(), r.quarez.clone()), (big(1), big(2), big(4)));
        assert_eq!(r.monomial_formula_size, big(1));
        let r = bounds_report(2, 2);
        assert_eq!((r.formula.clone(), r.symmetric.clone(), r.quarez.clone()), (big(7), big(10), big(12)));
        assert_eq!(r.monomial_formula_size, big(8));
        let r = bounds_report(3, 3);
        assert_eq!((r.formula.clone(), r.symmetric.clone(), r.quarez.clone()), (big(28), big(38), big(40)));
        assert_eq!(r.monomial_formula_size, big(45));
    }

    #[test]
    fn symmetric_bound_closed_form() {
        for n in 1..=10 {
            for d in 1..=10 {
                let r = bounds_report(n, d);
                assert_eq!(r.symmetric, r.symmetric_linear, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn base_cases() {
        for k in 1..=8 {
            assert_eq!(formula_bound(k, 1), big(k));
        }
        for delta in 1..=8 {
            assert_eq!(formula_bound(0, delta), big(0));
        }
    }

    #[test]
    fn pascal_recurrence() {
        // G(N, d) <= G(N-1, d) + G(N-1, d-1) with N = n + d + 1
        let g = pascal_table(10, 10);
        for n in 1..=10usize {
            for d in 2..=10usize {
                assert!(g[n][d] <= g[n - 1][d].clone() + g[n][d - 1].clone(), "n={n} d={d}");
            }
        }
    }
}
