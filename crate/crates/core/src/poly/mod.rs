//! Dense multivariate polynomials over any supported field.
//!
//! Variables are kept sorted by name so that two polynomials over the same
//! variables have identical exponent-vector layouts and compare structurally.

mod bounds;
mod build;
mod oracle;

pub use bounds::{binomial, bounds_report, formula_bound, linear_entry_sym_bound, pascal_table, BoundsReport};
pub use build::{monomial_sum_circuit, poly_to_formula, random_dense_polynomial};
pub use oracle::{permanent_values, ryser_permanent, symbolic_det, DET_LIMIT, SYMBOLIC_LIMIT};

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensePolynomial {
    spec: FieldSpec,
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, FieldElement>,
}

impl DensePolynomial {
    pub fn zero(spec: &FieldSpec) -> Self {
        DensePolynomial { spec: spec.clone(), vars: Vec::new(), terms: BTreeMap::new() }
    }

    pub fn constant(c: FieldElement) -> Self {
        let mut p = DensePolynomial::zero(&c.spec());
        if !c.is_zero() {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    pub fn one(spec: &FieldSpec) -> Self {
        DensePolynomial::constant(spec.one())
    }

    pub fn var(name: &str, spec: &FieldSpec) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![1], spec.one());
        DensePolynomial { spec: spec.clone(), vars: vec![name.to_string()], terms }
    }

    /// Builds from `(coefficient, [(variable, exponent)])` pairs.
    pub fn from_terms<'a, I>(spec: &FieldSpec, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (FieldElement, Vec<(&'a str, u32)>)>,
    {
        let mut acc = DensePolynomial::zero(spec);
        for (coef, mono) in terms {
            let mut t = DensePolynomial::constant(coef.embed(spec)?);
            for (name, e) in mono {
                t = t.mul(&DensePolynomial::var(name, spec).pow(e))?;
            }
            acc = acc.add(&t)?;
        }
        Ok(acc)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &FieldElement)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Coefficient of the monomial given as `(variable, exponent)` pairs.
    pub fn coefficient(&self, mono: &[(&str, u32)]) -> FieldElement {
        let mut exps = vec![0; self.vars.len()];
        for (name, e) in mono {
            match self.vars.iter().position(|v| v == name) {
                Some(i) => exps[i] += e,
                None if *e == 0 => {}
                None => return self.spec.zero(),
            }
        }
        self.terms.get(&exps).cloned().unwrap_or_else(|| self.spec.zero())
    }

    /// Re-expresses the polynomial over a sorted superset of its variables.
    fn widen(&self, vars: &[String]) -> BTreeMap<Vec<u32>, FieldElement> {
        let map: Vec<usize> = self.vars.iter().map(|v| vars.binary_search(v).unwrap()).collect();
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut w = vec![0; vars.len()];
                for (i, x) in e.iter().enumerate() {
                    w[map[i]] = *x;
                }
                (w, c.clone())
            })
            .collect()
    }

    fn union_vars(&self, other: &Self) -> Vec<String> {
        let mut vars: Vec<String> = self.vars.iter().chain(&other.vars).cloned().collect();
        vars.sort();
        vars.dedup();
        vars
    }

    /// Drops variables that no longer occur.
    fn trimmed(mut self) -> Self {
        let used: Vec<bool> =
            (0..self.vars.len()).map(|i| self.terms.keys().any(|e| e[i] > 0)).collect();
        if used.iter().all(|u| *u) {
            return self;
        }
        let keep: Vec<usize> = (0..self.vars.len()).filter(|i| used[*i]).collect();
        self.vars = keep.iter().map(|i| self.vars[*i].clone()).collect();
        self.terms = std::mem::take(&mut self.terms)
            .into_iter()
            .map(|(e, c)| (keep.iter().map(|i| e[*i]).collect(), c))
            .collect();
        self
    }

    fn check_spec(&self, other: &Self) -> Result<()> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(Error::MixedFields)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_spec(other)?;
        let vars = self.union_vars(other);
        let mut terms = self.widen(&vars);
        for (e, c) in other.widen(&vars) {
            match terms.get_mut(&e) {
                Some(existing) => {
                    *existing = existing.checked_add(&c)?;
                    if existing.is_zero() {
                        terms.remove(&e);
                    }
                }
                None => {
                    terms.insert(e, c);
                }
            }
        }
        Ok(DensePolynomial { spec: self.spec.clone(), vars, terms }.trimmed())
    }

    pub fn neg(&self) -> Self {
        let mut p = self.clone();
        for c in p.terms.values_mut() {
            *c = c.checked_neg();
        }
        p
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &FieldElement) -> Result<Self> {
        if c.is_zero() {
            return Ok(DensePolynomial::zero(&self.spec));
        }
        let mut p = self.clone();
        for v in p.terms.values_mut() {
            *v = v.checked_mul(c)?;
        }
        Ok(p)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_spec(other)?;
        let vars = self.union_vars(other);
        let a = self.widen(&vars);
        let b = other.widen(&vars);
        let mut terms: BTreeMap<Vec<u32>, FieldElement> = BTreeMap::new();
        for (ea, ca) in &a {
            for (eb, cb) in &b {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let c = ca.checked_mul(cb)?;
                match terms.get_mut(&e) {
                    Some(existing) => *existing = existing.checked_add(&c)?,
                    None => {
                        terms.insert(e, c);
                    }
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(DensePolynomial { spec: self.spec.clone(), vars, terms }.trimmed())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = DensePolynomial::one(&self.spec);
        for _ in 0..e {
            acc = acc.mul(self).expect("same field");
        }
        acc
    }

    pub fn eval(&self, assignment: &HashMap<String, FieldElement>) -> Result<FieldElement> {
        let values: Vec<&FieldElement> = self
            .vars
            .iter()
            .map(|v| assignment.get(v).ok_or_else(|| Error::MissingAssignment(v.clone())))
            .collect::<Result<_>>()?;
        let mut acc = self.spec.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, k) in values.iter().zip(e) {
                if *k > 0 {
                    t = t.checked_mul(&x.pow(*k as u64))?;
                }
            }
            acc = acc.checked_add(&t)?;
        }
        Ok(acc)
    }

    /// Maps every coefficient into another field (e.g. rationals into GF(2^k)).
    pub fn embed(&self, spec: &FieldSpec) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let c = c.embed(spec)?;
            if !c.is_zero() {
                terms.insert(e.clone(), c);
            }
        }
        Ok(DensePolynomial { spec: spec.clone(), vars: self.vars.clone(), terms }.trimmed())
    }

    /// Parses `coef * x1^e1 x2^e2 + ...`; a bare monomial has coefficient 1
    /// and `-` may separate terms.
    pub fn parse(text: &str, spec: &FieldSpec) -> Result<Self> {
        let err = |pos: usize, msg: &str| Error::SyntaxError { pos, msg: msg.to_string() };
        let mut acc = DensePolynomial::zero(spec);
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        let mut negate = false;
        let skip_ws = |i: &mut usize| {
            while *i < chars.len() && chars[*i].is_whitespace() {
                *i += 1;
            }
        };
        loop {
            skip_ws(&mut i);
            if i >= chars.len() {
                return Err(err(i, "expected a term"));
            }
            let mut term = DensePolynomial::one(spec);
            // optional coefficient
            let start = i;
            if chars[i].is_ascii_digit() || chars[i] == '-' {
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '/') {
                    j += 1;
                }
                let lit: String = chars[i..j].iter().collect();
                let c = spec.parse(&lit).map_err(|_| err(start, "bad coefficient"))?;
                term = DensePolynomial::constant(c);
                i = j;
                skip_ws(&mut i);
                if i < chars.len() && chars[i] == '*' {
                    i += 1;
                    skip_ws(&mut i);
                    if i >= chars.len() || !is_ident_start(chars[i]) {
                        return Err(err(i, "expected a variable after `*`"));
                    }
                }
            }
            while i < chars.len() && is_ident_start(chars[i]) {
                let s = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                let name: String = chars[s..i].iter().collect();
                let mut e = 1u32;
                if i < chars.len() && chars[i] == '^' {
                    i += 1;
                    let s = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let digits: String = chars[s..i].iter().collect();
                    e = digits.parse().map_err(|_| err(s, "bad exponent"))?;
                }
                term = term.mul(&DensePolynomial::var(&name, spec).pow(e))?;
                skip_ws(&mut i);
            }
            if i == start {
                return Err(err(i, "expected a term"));
            }
            acc = if negate { acc.sub(&term)? } else { acc.add(&term)? };
            skip_ws(&mut i);
            if i >= chars.len() {
                return Ok(acc);
            }
            negate = match chars[i] {
                '+' => false,
                '-' => true,
                _ => return Err(err(i, "expected `+` or `-`")),
            };
            i += 1;
        }
    }
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

impl fmt::Display for DensePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest total degree first, then lexicographic
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (k, (e, c)) in terms.into_iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let mono: Vec<String> = e
                .iter()
                .zip(&self.vars)
                .filter(|(x, _)| **x > 0)
                .map(|(x, v)| if *x == 1 { v.clone() } else { format!("{v}^{x}") })
                .collect();
            if mono.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{}", mono.join(" "))?;
            } else {
                write!(f, "{c} * {}", mono.join(" "))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> FieldSpec {
        FieldSpec::Rational
    }

    fn p(text: &str) -> DensePolynomial {
        DensePolynomial::parse(text, &q()).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let a = p("x + y");
        let b = p("x - y");
        assert_eq!(a.mul(&b).unwrap(), p("x^2 - y^2"));
    }

    #[test]
    fn evaluation() {
        let f = p("2 * x y z");
        let point: HashMap<String, FieldElement> =
            [("x", 1), ("y", 2), ("z", 3)].iter().map(|(k, v)| (k.to_string(), FieldElement::integer(*v))).collect();
        assert_eq!(f.eval(&point).unwrap(), FieldElement::integer(12));
        let missing: HashMap<String, FieldElement> = HashMap::new();
        assert_eq!(f.eval(&missing), Err(Error::MissingAssignment("x".into())));
    }

    #[test]
    fn cancellation_clears_terms() {
        let f = p("3 * x^2 y + 1/2");
        let z = f.sub(&f).unwrap();
        assert!(z.is_zero());
        assert!(z.vars().is_empty());
        assert_eq!(z.to_string(), "0");
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = DensePolynomial::var("x", &q());
        let b = DensePolynomial::var("x", &FieldSpec::gf2_16());
        assert_eq!(a.add(&b), Err(Error::MixedFields));
    }

    #[test]
    fn render_and_parse() {
        let f = p("x1^2 x2 - 1/3 * x2 + 4");
        assert_eq!(f.to_string(), "x1^2 x2 + -1/3 * x2 + 4");
        assert_eq!(p(&f.to_string()), f);
        assert!(DensePolynomial::parse("x +", &q()).is_err());
        assert!(DensePolynomial::parse("2 * ", &q()).is_err());
    }

    #[test]
    fn coefficients() {
        let f = p("5 * x^2 y + 7");
        assert_eq!(f.coefficient(&[("x", 2), ("y", 1)]), FieldElement::integer(5));
        assert_eq!(f.coefficient(&[]), FieldElement::integer(7));
        assert_eq!(f.coefficient(&[("w", 1)]), FieldElement::integer(0));
        assert_eq!(f.degree(), 3);
    }

    proptest! {
        #[test]
        fn ring_laws(a in -5i64..5, b in -5i64..5, c in -5i64..5) {
            let x = DensePolynomial::var("x", &q()).scale(&FieldElement::integer(a)).unwrap()
                .add(&DensePolynomial::constant(FieldElement::integer(b))).unwrap();
            let y = DensePolynomial::var("y", &q()).scale(&FieldElement::integer(c)).unwrap();
            let lhs = x.add(&y).unwrap().pow(2);
            let rhs = x.pow(2).add(&x.mul(&y).unwrap().scale(&FieldElement::integer(2)).unwrap()).unwrap()
                .add(&y.pow(2)).unwrap();
            prop_assert_eq!(&lhs, &rhs);
            prop_assert_eq!(p(&lhs.to_string()), lhs);
        }
    }
}
