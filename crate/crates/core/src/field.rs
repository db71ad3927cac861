//! Exact arithmetic over the rationals, prime fields and binary extension fields.
//!
//! Every element carries enough information to identify its field, so mixing
//! elements of two different fields is detected at the operation boundary.
//! Operator impls (`+`, `*`, ...) panic on mixed fields; the `checked_*`
//! methods return [`Error::MixedFields`] instead.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// 2^61 - 1.
pub const MERSENNE_61: u64 = (1u64 << 61) - 1;
/// x^16 + x^5 + x^3 + x + 1.
pub const GF2_16_MODULUS: u64 = (1 << 16) | (1 << 5) | (1 << 3) | (1 << 1) | 1;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rational,
    Prime(u64),
    /// GF(2^degree); `modulus` holds the irreducible polynomial including its leading bit.
    Binary { degree: u32, modulus: u64 },
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        Ok(FieldSpec::Prime(p))
    }

    pub fn binary(degree: u32, modulus: u64) -> Result<Self> {
        if degree == 0 || degree > 63 {
            return Err(Error::InvalidField(format!("unsupported degree {degree}")));
        }
        if modulus >> degree != 1 {
            return Err(Error::InvalidField(format!(
                "modulus {modulus:#x} does not have degree {degree}"
            )));
        }
        if !gf2_irreducible(modulus) {
            return Err(Error::InvalidField(format!("modulus {modulus:#x} is reducible")));
        }
        Ok(FieldSpec::Binary { degree, modulus })
    }

    pub fn default_prime() -> Self {
        FieldSpec::Prime(MERSENNE_61)
    }

    pub fn gf2_16() -> Self {
        FieldSpec::Binary { degree: 16, modulus: GF2_16_MODULUS }
    }

    pub fn gf2() -> Self {
        FieldSpec::Binary { degree: 1, modulus: 0b11 }
    }

    /// 0 for the rationals.
    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rational => 0,
            FieldSpec::Prime(p) => *p,
            FieldSpec::Binary { .. } => 2,
        }
    }

    /// Number of elements, `None` for the rationals.
    pub fn size(&self) -> Option<u128> {
        match self {
            FieldSpec::Rational => None,
            FieldSpec::Prime(p) => Some(*p as u128),
            FieldSpec::Binary { degree, .. } => Some(1u128 << degree),
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.from_i64(0)
    }

    pub fn one(&self) -> FieldElement {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> FieldElement {
        match self {
            FieldSpec::Rational => FieldElement::Rational(BigRational::from_integer(n.into())),
            FieldSpec::Prime(p) => FieldElement::Prime {
                value: (n as i128).rem_euclid(*p as i128) as u64,
                modulus: *p,
            },
            FieldSpec::Binary { modulus, .. } => FieldElement::Binary {
                bits: (n.rem_euclid(2)) as u64,
                modulus: *modulus,
            },
        }
    }

    /// The constant 1/2.
    pub fn half(&self) -> Result<FieldElement> {
        self.from_i64(2).inv().map_err(|_| Error::CharTwoHalf)
    }

    pub fn sample_random<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<FieldElement> {
        match self {
            FieldSpec::Rational => Err(Error::UnsupportedField),
            FieldSpec::Prime(p) => Ok(FieldElement::Prime { value: rng.gen_range(0..*p), modulus: *p }),
            FieldSpec::Binary { degree, modulus } => {
                let mask = (1u64 << degree) - 1;
                Ok(FieldElement::Binary { bits: rng.gen::<u64>() & mask, modulus: *modulus })
            }
        }
    }

    /// Parses a rendered constant: `a`, `a/b`, or `0x..` (binary fields only).
    pub fn parse(&self, text: &str) -> Result<FieldElement> {
        let text = text.trim();
        let bad = || Error::BadConstant(text.to_string());
        if let Some(hex) = text.strip_prefix("0x") {
            let FieldSpec::Binary { degree, modulus } = self else {
                return Err(bad());
            };
            let bits = u64::from_str_radix(hex, 16).map_err(|_| bad())?;
            if bits >> degree != 0 {
                return Err(bad());
            }
            return Ok(FieldElement::Binary { bits, modulus: *modulus });
        }
        let q = parse_rational(text).ok_or_else(bad)?;
        FieldElement::Rational(q).embed(self)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rational => write!(f, "Q"),
            FieldSpec::Prime(p) => write!(f, "Z_{p}"),
            FieldSpec::Binary { degree, modulus } => write!(f, "GF(2^{degree})[{modulus:#x}]"),
        }
    }
}

pub(crate) fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(text.parse().ok()?)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldElement {
    Rational(BigRational),
    /// Residue in `[0, modulus)`.
    Prime { value: u64, modulus: u64 },
    /// Polynomial over GF(2) of degree below that of `modulus`.
    Binary { bits: u64, modulus: u64 },
}

impl FieldElement {
    pub fn rational(n: i64, d: i64) -> Self {
        FieldElement::Rational(BigRational::new(n.into(), d.into()))
    }

    pub fn integer(n: i64) -> Self {
        FieldElement::rational(n, 1)
    }

    pub fn spec(&self) -> FieldSpec {
        match self {
            FieldElement::Rational(_) => FieldSpec::Rational,
            FieldElement::Prime { modulus, .. } => FieldSpec::Prime(*modulus),
            FieldElement::Binary { modulus, .. } => FieldSpec::Binary {
                degree: 63 - modulus.leading_zeros(),
                modulus: *modulus,
            },
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.spec().characteristic()
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Rational(q) => q.is_zero(),
            FieldElement::Prime { value, .. } => *value == 0,
            FieldElement::Binary { bits, .. } => *bits == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElement::Rational(q) => q.is_one(),
            FieldElement::Prime { value, .. } => *value == 1,
            FieldElement::Binary { bits, .. } => *bits == 1,
        }
    }

    pub fn zero_like(&self) -> Self {
        self.spec().zero()
    }

    pub fn one_like(&self) -> Self {
        self.spec().one()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FieldElement::Rational(q) => Some(q),
            _ => None,
        }
    }

    /// Maps this element into `spec`. Rationals embed into any field whose
    /// characteristic does not divide the denominator; other elements only
    /// embed into their own field.
    pub fn embed(&self, spec: &FieldSpec) -> Result<FieldElement> {
        match (self, spec) {
            (FieldElement::Rational(q), FieldSpec::Rational) => Ok(FieldElement::Rational(q.clone())),
            (FieldElement::Rational(q), _) => {
                let num = reduce_bigint(q.numer(), spec);
                let den = reduce_bigint(q.denom(), spec);
                num.checked_div(&den)
            }
            (other, spec) if &other.spec() == spec => Ok(other.clone()),
            _ => Err(Error::MixedFields),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => Ok(FieldElement::Rational(a + b)),
            (FieldElement::Prime { value: a, modulus: p }, FieldElement::Prime { value: b, modulus: q })
                if p == q =>
            {
                let s = (*a as u128 + *b as u128) % *p as u128;
                Ok(FieldElement::Prime { value: s as u64, modulus: *p })
            }
            (FieldElement::Binary { bits: a, modulus: m }, FieldElement::Binary { bits: b, modulus: n })
                if m == n =>
            {
                Ok(FieldElement::Binary { bits: a ^ b, modulus: *m })
            }
            _ => Err(Error::MixedFields),
        }
    }

    pub fn checked_neg(&self) -> Self {
        match self {
            FieldElement::Rational(a) => FieldElement::Rational(-a),
            FieldElement::Prime { value, modulus } => FieldElement::Prime {
                value: if *value == 0 { 0 } else { modulus - value },
                modulus: *modulus,
            },
            FieldElement::Binary { .. } => self.clone(),
        }
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.checked_neg())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => Ok(FieldElement::Rational(a * b)),
            (FieldElement::Prime { value: a, modulus: p }, FieldElement::Prime { value: b, modulus: q })
                if p == q =>
            {
                let s = (*a as u128 * *b as u128) % *p as u128;
                Ok(FieldElement::Prime { value: s as u64, modulus: *p })
            }
            (FieldElement::Binary { bits: a, modulus: m }, FieldElement::Binary { bits: b, modulus: n })
                if m == n =>
            {
                Ok(FieldElement::Binary { bits: gf2_mulmod(*a, *b, *m), modulus: *m })
            }
            _ => Err(Error::MixedFields),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            FieldElement::Rational(a) => FieldElement::Rational(a.recip()),
            FieldElement::Prime { value, modulus } => FieldElement::Prime {
                value: inv_mod(*value, *modulus),
                modulus: *modulus,
            },
            FieldElement::Binary { bits, modulus } => {
                let degree = 63 - modulus.leading_zeros();
                // a^(2^k - 2) = a^-1 in GF(2^k)
                let mut result = 1u64;
                let mut base = *bits;
                let mut e = (1u64 << degree) - 2;
                while e > 0 {
                    if e & 1 == 1 {
                        result = gf2_mulmod(result, base, *modulus);
                    }
                    base = gf2_mulmod(base, base, *modulus);
                    e >>= 1;
                }
                FieldElement::Binary { bits: result, modulus: *modulus }
            }
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.inv()?)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut result = self.one_like();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        result
    }

    /// Decimal, `a/b`, or `0x..` for binary fields.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Rational(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            FieldElement::Prime { value, .. } => write!(f, "{value}"),
            FieldElement::Binary { bits, .. } => write!(f, "{bits:#x}"),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.$checked(rhs).expect("field elements from different fields")
            }
        }
        impl $trait<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.checked_neg()
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.checked_neg()
    }
}

fn reduce_bigint(n: &BigInt, spec: &FieldSpec) -> FieldElement {
    match spec {
        FieldSpec::Rational => FieldElement::Rational(BigRational::from_integer(n.clone())),
        FieldSpec::Prime(p) => {
            let r = n.mod_floor(&BigInt::from(*p));
            FieldElement::Prime { value: r.to_u64().unwrap_or(0), modulus: *p }
        }
        FieldSpec::Binary { modulus, .. } => {
            let odd = n.abs().magnitude() % BigUint::from(2u8);
            FieldElement::Binary { bits: if odd.is_zero() { 0 } else { 1 }, modulus: *modulus }
        }
    }
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, p as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    old_s.rem_euclid(p as i128) as u64
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut result = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            result = mul_mod(result, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    result
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for b in BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn clmul(a: u64, b: u64) -> u128 {
    let mut acc = 0u128;
    let mut a = a as u128;
    let mut b = b;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        a <<= 1;
        b >>= 1;
    }
    acc
}

fn gf2_reduce(mut x: u128, modulus: u64) -> u64 {
    let deg = 127 - (modulus as u128).leading_zeros();
    while x != 0 {
        let top = 127 - x.leading_zeros();
        if top < deg {
            break;
        }
        x ^= (modulus as u128) << (top - deg);
    }
    x as u64
}

fn gf2_mulmod(a: u64, b: u64, modulus: u64) -> u64 {
    gf2_reduce(clmul(a, b), modulus)
}

fn gf2_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = gf2_reduce(a as u128, b);
        a = b;
        b = r;
    }
    a
}

/// Ben-Or test: f of degree k is irreducible iff gcd(x^(2^i) - x, f) = 1 for i <= k/2.
fn gf2_irreducible(modulus: u64) -> bool {
    let degree = 63 - modulus.leading_zeros();
    if degree == 1 {
        return true;
    }
    let x = 0b10u64;
    let mut power = x;
    for _ in 1..=degree / 2 {
        power = gf2_mulmod(power, power, modulus);
        if gf2_gcd(modulus, power ^ x) != 1 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z7() -> FieldSpec {
        FieldSpec::prime(7).unwrap()
    }

    #[test]
    fn inverse_of_two_mod_seven() {
        assert_eq!(z7().from_i64(2).inv().unwrap(), z7().from_i64(4));
    }

    #[test]
    fn rational_half() {
        assert_eq!(FieldSpec::Rational.half().unwrap(), FieldElement::rational(1, 2));
        assert_eq!(FieldSpec::Rational.half().unwrap().to_string(), "1/2");
    }

    #[test]
    fn binary_doubling_vanishes() {
        let f = FieldSpec::gf2_16();
        let a = f.parse("0xbeef").unwrap();
        assert!((&a + &a).is_zero());
        assert_eq!(f.characteristic(), 2);
        assert_eq!(f.half(), Err(Error::CharTwoHalf));
    }

    #[test]
    fn errors_are_reported() {
        assert_eq!(z7().zero().inv(), Err(Error::DivisionByZero));
        assert_eq!(z7().one().checked_add(&FieldSpec::Rational.one()), Err(Error::MixedFields));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(FieldSpec::Rational.sample_random(&mut rng), Err(Error::UnsupportedField));
    }

    #[test]
    fn field_validation() {
        assert!(FieldSpec::prime(15).is_err());
        assert!(FieldSpec::prime(MERSENNE_61).is_ok());
        assert!(FieldSpec::binary(16, GF2_16_MODULUS).is_ok());
        // x^2 + 1 = (x + 1)^2
        assert!(FieldSpec::binary(2, 0b101).is_err());
        assert!(FieldSpec::binary(2, 0b111).is_ok());
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2 has no roots but is reducible
        assert!(FieldSpec::binary(4, 0b10101).is_err());
        assert!(FieldSpec::binary(8, 0x11b).is_ok());
    }

    #[test]
    fn sampling_is_deterministic() {
        let f = FieldSpec::default_prime();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..5).map(|_| f.sample_random(&mut rng).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let e = FieldSpec::gf2().sample_random(&mut rng).unwrap();
            assert!(matches!(e, FieldElement::Binary { bits: 0 | 1, .. }));
        }
    }

    #[test]
    fn sampling_is_uniform_mod_seven() {
        let f = z7();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut counts = [0usize; 7];
        let draws = 100_000;
        for _ in 0..draws {
            match f.sample_random(&mut rng).unwrap() {
                FieldElement::Prime { value, .. } => counts[value as usize] += 1,
                _ => unreachable!(),
            }
        }
        let expected = draws as f64 / 7.0;
        for c in counts {
            assert!((c as f64 - expected).abs() <= 0.05 * expected, "{counts:?}");
        }
    }

    #[test]
    fn embedding_rationals() {
        let q = FieldElement::rational(-3, 4);
        let e = q.embed(&z7()).unwrap();
        // -3 * 4^-1 = -3 * 2 = -6 = 1 mod 7
        assert_eq!(e, z7().from_i64(1));
        assert_eq!(FieldElement::rational(1, 2).embed(&FieldSpec::gf2_16()), Err(Error::DivisionByZero));
        assert_eq!(FieldElement::integer(3).embed(&FieldSpec::gf2_16()).unwrap(), FieldSpec::gf2_16().one());
    }

    #[test]
    fn render_parse_examples() {
        let f = FieldSpec::Rational;
        for text in ["0", "-5", "7/3", "-1/2"] {
            assert_eq!(f.parse(text).unwrap().to_string(), text);
        }
        assert_eq!(f.parse("4/6").unwrap().to_string(), "2/3");
        assert_eq!(f.parse("3/-6").unwrap().to_string(), "-1/2");
        assert!(f.parse("1/0").is_err());
        assert!(f.parse("0x1").is_err());
        assert_eq!(FieldSpec::gf2_16().parse("0x1f").unwrap().to_string(), "0x1f");
        assert!(FieldSpec::gf2_16().parse("0x10000").is_err());
    }

    fn any_binary() -> impl Strategy<Value = FieldElement> {
        (0u64..1 << 16).prop_map(|bits| FieldElement::Binary { bits, modulus: GF2_16_MODULUS })
    }

    proptest! {
        #[test]
        fn prime_inverse(v in 1u64..MERSENNE_61) {
            let a = FieldElement::Prime { value: v, modulus: MERSENNE_61 };
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }

        #[test]
        fn binary_inverse(a in any_binary()) {
            prop_assume!(!a.is_zero());
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }

        #[test]
        fn rational_inverse(n in -1000i64..1000, d in 1i64..1000) {
            prop_assume!(n != 0);
            let a = FieldElement::rational(n, d);
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }

        #[test]
        fn frobenius(a in any_binary(), b in any_binary()) {
            let s = &a + &b;
            prop_assert_eq!(&s * &s, &(&a * &a) + &(&b * &b));
        }

        #[test]
        fn binary_distributive(a in any_binary(), b in any_binary(), c in any_binary()) {
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn rational_round_trip(n in any::<i64>(), d in 1i64..i64::MAX) {
            let q = FieldElement::rational(n, d);
            prop_assert_eq!(FieldSpec::Rational.parse(&q.render()).unwrap(), q);
        }

        #[test]
        fn binary_round_trip(a in any_binary()) {
            prop_assert_eq!(FieldSpec::gf2_16().parse(&a.render()).unwrap(), a);
        }
    }
}
