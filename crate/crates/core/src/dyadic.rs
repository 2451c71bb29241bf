//! Exact arithmetic on binary rationals `mantissa * 2^exponent`.
//!
//! Every interval endpoint, cell measure and tag coordinate in this crate is
//! a [`DyadicScalar`], so non-overlap tests, measure sums and `|I ∩ J| > 0`
//! predicates are decided exactly, never through a floating tolerance.
//! Function values and Riemann sums stay in `f64`; only geometry is exact.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact binary rational.
///
/// Canonical form: the mantissa is odd or zero, and zero is stored with
/// exponent 0. Canonicalisation makes structural equality, `Ord` and `Hash`
/// agree with numeric equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DyadicScalar {
    mantissa: BigInt,
    exponent: i64,
}

impl DyadicScalar {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        let mut s = DyadicScalar { mantissa, exponent };
        s.canonicalize();
        s
    }

    pub fn zero() -> Self {
        DyadicScalar { mantissa: BigInt::zero(), exponent: 0 }
    }

    pub fn one() -> Self {
        DyadicScalar { mantissa: BigInt::from(1), exponent: 0 }
    }

    pub fn from_int(v: i64) -> Self {
        Self::new(BigInt::from(v), 0)
    }

    /// `2^k`.
    pub fn pow2(k: i64) -> Self {
        Self::new(BigInt::from(1), k)
    }

    /// Exact conversion: every finite `f64` is a dyadic rational.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Self::zero());
        }
        let bits = x.to_bits();
        let negative = bits >> 63 == 1;
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mag, exponent) = if exp_bits == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_bits - 1075)
        };
        let mut m = BigInt::from(mag);
        if negative {
            m = -m;
        }
        Some(Self::new(m, exponent))
    }

    /// Nearest `f64` (rounding only when the mantissa exceeds 63 bits or the
    /// exponent leaves the finite range).
    pub fn to_f64(&self) -> f64 {
        if self.mantissa.is_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits() as i64;
        if bits <= 63 {
            let m = self.mantissa.to_i64().expect("mantissa fits i64") as f64;
            m * pow2_f64(self.exponent)
        } else {
            let shift = bits - 63;
            let top = (&self.mantissa >> shift).to_i64().expect("shifted mantissa fits") as f64;
            top * pow2_f64(self.exponent + shift)
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn abs(&self) -> Self {
        DyadicScalar { mantissa: self.mantissa.abs(), exponent: self.exponent }
    }

    /// Exact halving (`exponent - 1`), used by bisection.
    pub fn half(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        DyadicScalar { mantissa: self.mantissa.clone(), exponent: self.exponent - 1 }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other { self } else { other }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other { self } else { other }
    }

    /// Exact midpoint of two dyadics.
    pub fn midpoint(a: &Self, b: &Self) -> Self {
        (a + b).half()
    }

    fn canonicalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exponent = 0;
            return;
        }
        let tz = self.mantissa.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mantissa >>= tz;
            self.exponent += tz as i64;
        }
    }

    /// Both operands re-expressed over the common (minimal) exponent.
    fn aligned(&self, other: &Self) -> (BigInt, BigInt, i64) {
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << (self.exponent - e) as u64;
        let b = &other.mantissa << (other.exponent - e) as u64;
        (a, b, e)
    }
}

fn pow2_f64(e: i64) -> f64 {
    if e < -1100 {
        0.0
    } else if e > 1100 {
        f64::INFINITY
    } else {
        libm::ldexp(1.0, e as i32)
    }
}

impl PartialOrd for DyadicScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.mantissa.sign(), other.mantissa.sign()) {
            (num_bigint::Sign::Minus, num_bigint::Sign::NoSign | num_bigint::Sign::Plus) => {
                return Ordering::Less
            }
            (num_bigint::Sign::NoSign | num_bigint::Sign::Plus, num_bigint::Sign::Minus) => {
                return Ordering::Greater
            }
            (num_bigint::Sign::NoSign, num_bigint::Sign::NoSign) => return Ordering::Equal,
            _ => {}
        }
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl Add for &DyadicScalar {
    type Output = DyadicScalar;
    fn add(self, rhs: &DyadicScalar) -> DyadicScalar {
        let (a, b, e) = self.aligned(rhs);
        DyadicScalar::new(a + b, e)
    }
}

impl Sub for &DyadicScalar {
    type Output = DyadicScalar;
    fn sub(self, rhs: &DyadicScalar) -> DyadicScalar {
        let (a, b, e) = self.aligned(rhs);
        DyadicScalar::new(a - b, e)
    }
}

impl Mul for &DyadicScalar {
    type Output = DyadicScalar;
    fn mul(self, rhs: &DyadicScalar) -> DyadicScalar {
        DyadicScalar::new(&self.mantissa * &rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Neg for &DyadicScalar {
    type Output = DyadicScalar;
    fn neg(self) -> DyadicScalar {
        DyadicScalar { mantissa: -&self.mantissa, exponent: self.exponent }
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for DyadicScalar {
            type Output = DyadicScalar;
            fn $method(self, rhs: DyadicScalar) -> DyadicScalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&DyadicScalar> for DyadicScalar {
            type Output = DyadicScalar;
            fn $method(self, rhs: &DyadicScalar) -> DyadicScalar {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl Neg for DyadicScalar {
    type Output = DyadicScalar;
    fn neg(self) -> DyadicScalar {
        -&self
    }
}

/// Exact decimal rendering. A dyadic `m / 2^k` is always a finite decimal
/// (`m * 5^k / 10^k`), so `Display` never rounds.
impl fmt::Display for DyadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mantissa.is_zero() {
            return write!(f, "0");
        }
        if self.exponent >= 0 {
            let v = &self.mantissa << self.exponent as u64;
            return write!(f, "{}", v);
        }
        let k = (-self.exponent) as u32;
        let scaled = (&self.mantissa * BigInt::from(5).pow(k)).abs();
        let digits = scaled.to_string();
        let (int_part, frac_part) = if digits.len() > k as usize {
            let split = digits.len() - k as usize;
            (digits[..split].to_string(), digits[split..].to_string())
        } else {
            ("0".to_string(), format!("{:0>width$}", digits, width = k as usize))
        };
        let frac_part = frac_part.trim_end_matches('0');
        let sign = if self.mantissa.is_negative() { "-" } else { "" };
        if frac_part.is_empty() {
            write!(f, "{}{}", sign, int_part)
        } else {
            write!(f, "{}{}.{}", sign, int_part, frac_part)
        }
    }
}

impl fmt::Debug for DyadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Parses a plain decimal literal, rejecting values that are not binary
/// rationals (`0.1` is `1/10`, which no finite dyadic represents).
impl FromStr for DyadicScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() {
            return Err(Error::Parse("empty numeric literal".into()));
        }
        let (sign, rest) = match t.as_bytes()[0] {
            b'-' => (-1, &t[1..]),
            b'+' => (1, &t[1..]),
            _ => (1, t),
        };
        let (int_part, frac_part) = match rest.split_once('.') {
            Some((i, fr)) => (i, fr),
            None => (rest, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(Error::Parse(format!("bad numeric literal: {s:?}")));
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(Error::Parse(format!("bad numeric literal: {s:?}")));
        }
        let k = frac_part.len() as u32;
        let digits = format!("{int_part}{frac_part}");
        let n: BigInt = digits.parse().map_err(|_| Error::Parse(format!("bad digits: {s:?}")))?;
        let five_k = BigInt::from(5).pow(k);
        let (q, r) = n.div_rem(&five_k);
        if !r.is_zero() {
            return Err(Error::Parse(format!(
                "{s:?} is not a dyadic rational (denominator has a factor of 5); \
                 use endpoints of the form k/2^n, e.g. 0.5, 0.125, 3.140625"
            )));
        }
        Ok(Self::new(BigInt::from(sign) * q, -(k as i64)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dy(m: i64, e: i64) -> DyadicScalar {
        DyadicScalar::new(BigInt::from(m), e)
    }

    #[test]
    fn canonical_form() {
        let a = dy(4, 0);
        assert_eq!(a.mantissa(), &BigInt::from(1));
        assert_eq!(a.exponent(), 2);
        let z = dy(0, 17);
        assert!(z.is_zero());
        assert_eq!(z.exponent(), 0);
    }

    #[test]
    fn arithmetic_is_exact() {
        let a = dy(1, -2); // 1/4
        let b = dy(3, -3); // 3/8
        assert_eq!(&a + &b, dy(5, -3));
        assert_eq!(&b - &a, dy(1, -3));
        assert_eq!(&a * &b, dy(3, -5));
        assert_eq!((&b - &a).to_f64(), 0.125);
    }

    #[test]
    fn f64_round_trip_is_exact() {
        for x in [0.5, -0.375, 3.140625, 1e-12, -7.25, 2f64.powi(-40)] {
            let d = DyadicScalar::from_f64(x).unwrap();
            assert_eq!(d.to_f64(), x);
        }
        assert!(DyadicScalar::from_f64(f64::NAN).is_none());
        assert!(DyadicScalar::from_f64(f64::INFINITY).is_none());
    }

    #[test]
    fn parse_accepts_dyadic_decimals_only() {
        assert_eq!("0.5".parse::<DyadicScalar>().unwrap(), dy(1, -1));
        assert_eq!("-1.25".parse::<DyadicScalar>().unwrap(), dy(-5, -2));
        assert_eq!("3.140625".parse::<DyadicScalar>().unwrap(), dy(201, -6));
        assert_eq!("16".parse::<DyadicScalar>().unwrap(), dy(16, 0));
        assert!("0.1".parse::<DyadicScalar>().is_err());
        assert!("1.3".parse::<DyadicScalar>().is_err());
        assert!("x".parse::<DyadicScalar>().is_err());
    }

    #[test]
    fn display_is_exact_decimal() {
        assert_eq!(dy(1, -3).to_string(), "0.125");
        assert_eq!(dy(-201, -6).to_string(), "-3.140625");
        assert_eq!(dy(5, 2).to_string(), "20");
        assert_eq!(dy(0, 0).to_string(), "0");
        // round-trips through the parser
        let v = dy(12345, -13);
        assert_eq!(v.to_string().parse::<DyadicScalar>().unwrap(), v);
    }

    proptest! {
        #[test]
        fn ring_ops_agree_with_rationals(m1 in -1000i64..1000, e1 in -20i64..20,
                                         m2 in -1000i64..1000, e2 in -20i64..20) {
            let a = dy(m1, e1);
            let b = dy(m2, e2);
            // commutativity and exactness against a common-denominator model
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            let lo = a.clone().min(b.clone());
            prop_assert!(lo <= a || lo <= b);
        }

        #[test]
        fn ordering_matches_f64(m1 in -4096i64..4096, e1 in -12i64..6,
                                m2 in -4096i64..4096, e2 in -12i64..6) {
            let a = dy(m1, e1);
            let b = dy(m2, e2);
            let (x, y) = (a.to_f64(), b.to_f64());
            // exact in this range, so the orders must agree
            prop_assert_eq!(a.cmp(&b), x.partial_cmp(&y).unwrap());
        }
    }
}
