//! Exact rational arithmetic, the height ("size") function, canonical
//! enumeration of bounded-size rationals, and good linear forms.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ArithError;

/// An exact rational number in lowest terms with a positive denominator.
///
/// Zero is always `0/1`. Serializes as the string `"a/b"`, or `"a"` when the
/// denominator is one.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn reduce(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, ArithError> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(ArithError::ZeroDenominator);
        }
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// `max(|numerator|, denominator)`; `size(0) = 1`.
    pub fn size(&self) -> BigUint {
        let n = self.numer().magnitude();
        let d = self.denom().magnitude();
        if n > d {
            n.clone()
        } else {
            d.clone()
        }
    }

    pub fn size_at_most(&self, bound: u64) -> bool {
        let b = BigUint::from(bound);
        self.numer().magnitude() <= &b && self.denom().magnitude() <= &b
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Self, ArithError> {
        if rhs.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    pub fn pow(&self, exp: i32) -> Result<Self, ArithError> {
        if exp < 0 && self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Rational(num_traits::Pow::pow(&self.0, exp)))
    }

    /// The integer value, if this rational is an integer.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.numer().clone())
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.to_integer().and_then(|n| n.to_i64())
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom().is_one() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let parse = |t: &str| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| ArithError::Parse(s.to_string()))
        };
        match s.split_once('/') {
            Some((n, d)) => Rational::reduce(parse(n)?, parse(d)?),
            None => Ok(Rational::from_integer(parse(s)?)),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which rationals an enumeration or coefficient range covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RationalMode {
    /// Strictly positive rationals.
    PositiveOnly,
    /// All nonzero rationals.
    FullNonzero,
    /// All rationals, zero included.
    WithZero,
    /// Zero and the positive rationals.
    NonNegative,
}

impl RationalMode {
    fn includes_zero(self) -> bool {
        matches!(self, RationalMode::WithZero | RationalMode::NonNegative)
    }

    fn includes_negative(self) -> bool {
        matches!(self, RationalMode::FullNonzero | RationalMode::WithZero)
    }
}

/// Iterator over every rational of size at most a bound, in canonical order:
/// ascending size, then ascending `|numerator|`, then ascending denominator,
/// then positive before negative. Zero (when included) comes first.
#[derive(Clone, Debug)]
pub struct Rationals {
    bound: u64,
    mode: RationalMode,
    emitted_zero: bool,
    size: u64,
    // Position within the current size shell: first the fractions a/size
    // with a < size, then size/b with b <= size.
    phase: u8,
    cursor: u64,
    pending_negative: Option<(i64, u64)>,
}

/// Canonical enumeration of all rationals with size at most `bound`.
pub fn enumerate_rationals(bound: u64, mode: RationalMode) -> Rationals {
    Rationals {
        bound,
        mode,
        emitted_zero: !mode.includes_zero(),
        size: 1,
        phase: 0,
        cursor: 1,
        pending_negative: None,
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rationals {
    /// Next positive fraction `(numerator, denominator)` in canonical order.
    fn next_positive(&mut self) -> Option<(u64, u64)> {
        loop {
            if self.size > self.bound {
                return None;
            }
            let s = self.size;
            match self.phase {
                0 => {
                    // a/s, 1 <= a < s, gcd(a, s) = 1
                    while self.cursor < s {
                        let a = self.cursor;
                        self.cursor += 1;
                        if gcd_u64(a, s) == 1 {
                            return Some((a, s));
                        }
                    }
                    self.phase = 1;
                    self.cursor = 1;
                }
                _ => {
                    // s/b, 1 <= b < s (or s/1 when s = 1)
                    let limit = if s == 1 { 1 } else { s - 1 };
                    while self.cursor <= limit {
                        let b = self.cursor;
                        self.cursor += 1;
                        if gcd_u64(s, b) == 1 {
                            return Some((s, b));
                        }
                    }
                    self.size += 1;
                    self.phase = 0;
                    self.cursor = 1;
                }
            }
        }
    }

    /// Signed `(numerator, denominator)` pairs in canonical order, without
    /// allocating big integers.
    pub fn next_pair(&mut self) -> Option<(i64, u64)> {
        if !self.emitted_zero {
            self.emitted_zero = true;
            return Some((0, 1));
        }
        if let Some(p) = self.pending_negative.take() {
            return Some(p);
        }
        let (n, d) = self.next_positive()?;
        if self.mode.includes_negative() {
            self.pending_negative = Some((-(n as i64), d));
        }
        Some((n as i64, d))
    }
}

impl Iterator for Rationals {
    type Item = Rational;

    fn next(&mut self) -> Option<Rational> {
        self.next_pair().map(|(n, d)| {
            Rational::reduce(n, BigInt::from(d)).expect("enumerated denominators are positive")
        })
    }

    fn count(mut self) -> usize {
        let mut c = 0;
        while self.next_pair().is_some() {
            c += 1;
        }
        c
    }
}

/// A rational linear form `c0*x0 + c1*x1 + ... + cn*xn` with `c0 != 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Rational>", into = "Vec<Rational>")]
pub struct GoodPolynomial {
    coeffs: Vec<Rational>,
}

impl TryFrom<Vec<Rational>> for GoodPolynomial {
    type Error = ArithError;

    fn try_from(coeffs: Vec<Rational>) -> Result<Self, ArithError> {
        GoodPolynomial::new(coeffs)
    }
}

impl From<GoodPolynomial> for Vec<Rational> {
    fn from(p: GoodPolynomial) -> Self {
        p.coeffs
    }
}

impl GoodPolynomial {
    pub fn new(coeffs: Vec<Rational>) -> Result<Self, ArithError> {
        match coeffs.first() {
            None => Err(ArithError::EmptyPolynomial),
            Some(c0) if c0.is_zero() => Err(ArithError::ZeroLeadingCoefficient),
            Some(_) => Ok(GoodPolynomial { coeffs }),
        }
    }

    /// Number of non-leading variables.
    pub fn arity(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &Rational {
        &self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Maximum size over all coefficients.
    pub fn size(&self) -> BigUint {
        self.coeffs.iter().map(Rational::size).max().expect("nonempty")
    }

    /// `c0*x0 + sum(ci*args[i-1])`. The argument list must match the arity
    /// exactly.
    pub fn eval(&self, x0: &Rational, args: &[Rational]) -> Result<Rational, ArithError> {
        if args.len() != self.arity() {
            return Err(ArithError::ArityMismatch {
                expected: self.arity(),
                found: args.len(),
            });
        }
        let mut acc = self.leading() * x0;
        for (c, v) in self.coeffs[1..].iter().zip(args) {
            if !c.is_zero() {
                acc = acc + &(c * v);
            }
        }
        Ok(acc)
    }

    /// `P(x0) := P(x0, 0, ..., 0) = c0*x0`.
    pub fn eval_leading(&self, x0: &Rational) -> Rational {
        self.leading() * x0
    }
}

impl fmt::Display for GoodPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.coeffs[0])?;
        for (i, c) in self.coeffs[1..].iter().enumerate() {
            write!(f, "{}{}", if i == 0 { "; " } else { ", " }, c)?;
        }
        write!(f, ")")
    }
}

pub fn eval_good_poly(
    p: &GoodPolynomial,
    x0: &Rational,
    args: &[Rational],
) -> Result<Rational, ArithError> {
    p.eval(x0, args)
}

/// Sign convention for coefficient enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoeffMode {
    /// `c0 > 0`, other coefficients `>= 0`.
    Positive,
    /// `c0 != 0`, other coefficients arbitrary.
    Full,
}

impl CoeffMode {
    pub fn leading_mode(self) -> RationalMode {
        match self {
            CoeffMode::Positive => RationalMode::PositiveOnly,
            CoeffMode::Full => RationalMode::FullNonzero,
        }
    }

    pub fn other_mode(self) -> RationalMode {
        match self {
            CoeffMode::Positive => RationalMode::NonNegative,
            CoeffMode::Full => RationalMode::WithZero,
        }
    }
}

/// Every good polynomial of the given arity whose coefficients all have
/// size at most `bound`, in lexicographic order of the coefficient vector
/// (each slot in canonical rational order).
pub fn enumerate_good_polys(bound: u64, arity: usize, mode: CoeffMode) -> GoodPolys {
    let leading: Vec<Rational> = enumerate_rationals(bound, mode.leading_mode()).collect();
    let others: Vec<Rational> = enumerate_rationals(bound, mode.other_mode()).collect();
    GoodPolys {
        leading,
        others,
        idx: vec![0; arity + 1],
        done: false,
    }
}

#[derive(Clone, Debug)]
pub struct GoodPolys {
    leading: Vec<Rational>,
    others: Vec<Rational>,
    idx: Vec<usize>,
    done: bool,
}

impl GoodPolys {
    pub fn total(&self) -> usize {
        self.leading.len() * self.others.len().pow((self.idx.len() - 1) as u32)
    }
}

impl Iterator for GoodPolys {
    type Item = GoodPolynomial;

    fn next(&mut self) -> Option<GoodPolynomial> {
        if self.done || self.leading.is_empty() {
            return None;
        }
        let coeffs = self
            .idx
            .iter()
            .enumerate()
            .map(|(slot, &i)| {
                if slot == 0 {
                    self.leading[i].clone()
                } else {
                    self.others[i].clone()
                }
            })
            .collect();
        // odometer, last slot fastest
        let mut slot = self.idx.len();
        loop {
            if slot == 0 {
                self.done = true;
                break;
            }
            slot -= 1;
            let len = if slot == 0 {
                self.leading.len()
            } else {
                self.others.len()
            };
            self.idx[slot] += 1;
            if self.idx[slot] < len {
                break;
            }
            self.idx[slot] = 0;
        }
        Some(GoodPolynomial { coeffs })
    }
}

/// Canonical order key used by [`enumerate_rationals`].
pub fn canonical_cmp(a: &Rational, b: &Rational) -> Ordering {
    let key = |q: &Rational| {
        (
            q.size(),
            q.numer().magnitude().clone(),
            q.denom().magnitude().clone(),
            q.numer().sign() == Sign::Minus,
        )
    };
    key(a).cmp(&key(b))
}

/// `n!` as a big integer.
pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Greatest common divisor of two big integers (nonnegative).
pub fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(Rational::reduce(4, 6).unwrap().to_string(), "2/3");
        let z = Rational::reduce(0, 5).unwrap();
        assert_eq!((z.numer().clone(), z.denom().clone()), (0.into(), 1.into()));
        assert_eq!(Rational::reduce(3, -9).unwrap().to_string(), "-1/3");
        assert_eq!(Rational::reduce(1, 0), Err(ArithError::ZeroDenominator));
    }

    #[test]
    fn size_examples() {
        assert_eq!(q("2/3").size(), 3u32.into());
        assert_eq!(q("-5/2").size(), 5u32.into());
        assert_eq!(Rational::zero().size(), 1u32.into());
        assert!(q("-5/2").size_at_most(5));
        assert!(!q("-5/2").size_at_most(4));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(q("6/4").to_string(), "3/2");
        assert_eq!(q("-7").to_string(), "-7");
        assert_eq!(q("5/-10").to_string(), "-1/2");
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
        let json = serde_json::to_string(&vec![q("1/2"), q("3")]).unwrap();
        assert_eq!(json, r#"["1/2","3"]"#);
    }

    #[test]
    fn enumerate_small_sizes() {
        let v: Vec<String> = enumerate_rationals(1, RationalMode::PositiveOnly)
            .map(|r| r.to_string())
            .collect();
        assert_eq!(v, ["1"]);
        let v: Vec<String> = enumerate_rationals(3, RationalMode::PositiveOnly)
            .map(|r| r.to_string())
            .collect();
        assert_eq!(v, ["1", "1/2", "2", "1/3", "2/3", "3", "3/2"]);
        let v: Vec<String> = enumerate_rationals(2, RationalMode::WithZero)
            .map(|r| r.to_string())
            .collect();
        assert_eq!(v, ["0", "1", "-1", "1/2", "-1/2", "2", "-2"]);
    }

    #[test]
    fn enumerate_matches_gcd_double_loop() {
        // brute force: all a/b with 1 <= a, b <= S and gcd 1
        for s in 1..=40u64 {
            let mut brute = 0usize;
            for a in 1..=s {
                for b in 1..=s {
                    if gcd_u64(a, b) == 1 {
                        brute += 1;
                    }
                }
            }
            assert_eq!(enumerate_rationals(s, RationalMode::PositiveOnly).count(), brute);
            assert_eq!(
                enumerate_rationals(s, RationalMode::FullNonzero).count(),
                2 * brute
            );
            assert_eq!(
                enumerate_rationals(s, RationalMode::WithZero).count(),
                2 * brute + 1
            );
        }
    }

    #[test]
    fn enumeration_is_canonically_sorted() {
        let v: Vec<Rational> = enumerate_rationals(30, RationalMode::WithZero).collect();
        for w in v.windows(2) {
            assert_eq!(canonical_cmp(&w[0], &w[1]), Ordering::Less, "{:?}", w);
        }
    }

    #[test]
    fn good_poly_eval() {
        let p = GoodPolynomial::new(vec![q("2"), q("-1/2")]).unwrap();
        assert_eq!(p.eval(&q("3"), &[q("4")]).unwrap(), q("4"));
        let ones = GoodPolynomial::new(vec![q("1"); 4]).unwrap();
        let (a, b, c) = (q("5"), q("7"), q("1/3"));
        let bc = &b * &c;
        assert_eq!(
            ones.eval(&a, &[b.clone(), c.clone(), bc.clone()]).unwrap(),
            a.clone() + b.clone() + c.clone() + bc
        );
        let lead = GoodPolynomial::new(vec![q("-3/4"), q("0"), q("0")]).unwrap();
        assert_eq!(lead.eval(&a, &[q("0"), q("0")]).unwrap(), lead.eval_leading(&a));
        assert_eq!(
            p.eval(&a, &[]),
            Err(ArithError::ArityMismatch { expected: 1, found: 0 })
        );
        assert_eq!(
            GoodPolynomial::new(vec![q("0"), q("1")]),
            Err(ArithError::ZeroLeadingCoefficient)
        );
        assert_eq!(p.size(), 2u32.into());
    }

    #[test]
    fn good_poly_enumeration() {
        let full: Vec<_> = enumerate_good_polys(1, 0, CoeffMode::Full).collect();
        assert_eq!(full.len(), 2);
        assert_eq!(full[0].coeffs(), [q("1")]);
        assert_eq!(full[1].coeffs(), [q("-1")]);
        let pos: Vec<_> = enumerate_good_polys(1, 0, CoeffMode::Positive).collect();
        assert_eq!(pos.len(), 1);
        let pos1: Vec<String> = enumerate_good_polys(1, 1, CoeffMode::Positive)
            .map(|p| p.to_string())
            .collect();
        assert_eq!(pos1, ["(1; 0)", "(1; 1)"]);
        for m in 1..=3 {
            for arity in 0..=2 {
                let it = enumerate_good_polys(m, arity, CoeffMode::Full);
                let total = it.total();
                let all: Vec<_> = it.collect();
                assert_eq!(all.len(), total);
                assert!(all.iter().all(|p| !p.leading().is_zero() && p.size_at_most(m)));
                let uniq: std::collections::HashSet<_> = all.iter().collect();
                assert_eq!(uniq.len(), all.len());
            }
        }
    }

    impl GoodPolynomial {
        fn size_at_most(&self, m: u64) -> bool {
            self.coeffs.iter().all(|c| c.size_at_most(m))
        }
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-10_000i64..10_000, 1i64..10_000).prop_map(|(n, d)| Rational::reduce(n, d).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn reduce_round_trip(x in arb_rational()) {
            let back = Rational::reduce(x.numer().clone(), x.denom().clone()).unwrap();
            prop_assert_eq!(&back, &x);
            prop_assert_eq!(x.to_string().parse::<Rational>().unwrap(), x);
        }

        #[test]
        fn size_is_submultiplicative(x in arb_rational(), y in arb_rational()) {
            prop_assert!((&x * &y).size() <= x.size() * y.size());
        }

        #[test]
        fn eval_is_linear_in_coefficients(
            c in proptest::collection::vec(arb_rational(), 4),
            d in proptest::collection::vec(arb_rational(), 4),
            x0 in arb_rational(),
            args in proptest::collection::vec(arb_rational(), 3),
        ) {
            prop_assume!(!c[0].is_zero() && !d[0].is_zero() && !(&c[0] + &d[0]).is_zero());
            let p = GoodPolynomial::new(c.clone()).unwrap();
            let r = GoodPolynomial::new(d.clone()).unwrap();
            let sum = GoodPolynomial::new(c.iter().zip(&d).map(|(a, b)| a + b).collect()).unwrap();
            prop_assert_eq!(
                sum.eval(&x0, &args).unwrap(),
                p.eval(&x0, &args).unwrap() + r.eval(&x0, &args).unwrap()
            );
        }
    }
}
