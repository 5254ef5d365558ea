//! Rational scalars and the formal-constant ring used in limit data.
//!
//! `Rat` is an arbitrary-precision rational, always in lowest terms with
//! positive denominator (num-rational guarantees both).
//!
//! `FormalConstant` carries the two symbols that show up in limiting
//! period data:
//!   zeta3hat = zeta(3)/(2*pi*i)^3
//!   zeta2hat = zeta(2)/(2*pi*i)^2 = -1/24 as a numeric value, but kept
//! formal so limit entries can be reported in closed form.
//! Products of two non-rational symbols never occur in any formula here
//! and are rejected.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

pub type Rat = BigRational;

/// Rational from an i64.
pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational p/q from i64 parts.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Parse "p/q" or "n" into a rational.
pub fn rat_parse(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|e| format!("bad numerator {s:?}: {e}"))?;
            let q: BigInt = q.trim().parse().map_err(|e| format!("bad denominator {s:?}: {e}"))?;
            if q.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(Rat::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|e| format!("bad integer {s:?}: {e}"))?;
            Ok(Rat::from_integer(p))
        }
    }
}

/// Format a rational as "p" or "p/q".
pub fn rat_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Element of the coefficient ring Q + Q*zeta3hat + Q*zeta2hat.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalConstant {
    pub rational: Rat,
    pub zeta3: Rat,
    pub zeta2: Rat,
}

impl FormalConstant {
    pub fn zero() -> Self {
        FormalConstant { rational: Rat::zero(), zeta3: Rat::zero(), zeta2: Rat::zero() }
    }

    pub fn one() -> Self {
        FormalConstant::from_rat(Rat::one())
    }

    pub fn from_rat(r: Rat) -> Self {
        FormalConstant { rational: r, zeta3: Rat::zero(), zeta2: Rat::zero() }
    }

    pub fn zeta3hat(coeff: Rat) -> Self {
        FormalConstant { rational: Rat::zero(), zeta3: coeff, zeta2: Rat::zero() }
    }

    pub fn zeta2hat(coeff: Rat) -> Self {
        FormalConstant { rational: Rat::zero(), zeta3: Rat::zero(), zeta2: coeff }
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.zeta3.is_zero() && self.zeta2.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.zeta3.is_zero() && self.zeta2.is_zero()
    }

    pub fn scale(&self, r: &Rat) -> Self {
        FormalConstant {
            rational: &self.rational * r,
            zeta3: &self.zeta3 * r,
            zeta2: &self.zeta2 * r,
        }
    }

    /// Product; fails if both factors carry a non-rational symbol.
    pub fn try_mul(&self, other: &FormalConstant) -> Result<FormalConstant, String> {
        if !self.is_rational() && !other.is_rational() {
            return Err("product of two non-rational formal constants".to_string());
        }
        if self.is_rational() {
            Ok(other.scale(&self.rational))
        } else {
            Ok(self.scale(&other.rational))
        }
    }
}

impl Add for FormalConstant {
    type Output = FormalConstant;
    fn add(self, rhs: FormalConstant) -> FormalConstant {
        FormalConstant {
            rational: self.rational + rhs.rational,
            zeta3: self.zeta3 + rhs.zeta3,
            zeta2: self.zeta2 + rhs.zeta2,
        }
    }
}

impl Sub for FormalConstant {
    type Output = FormalConstant;
    fn sub(self, rhs: FormalConstant) -> FormalConstant {
        self + (-rhs)
    }
}

impl Neg for FormalConstant {
    type Output = FormalConstant;
    fn neg(self) -> FormalConstant {
        FormalConstant {
            rational: -self.rational,
            zeta3: -self.zeta3,
            zeta2: -self.zeta2,
        }
    }
}

impl Mul for FormalConstant {
    type Output = FormalConstant;
    fn mul(self, rhs: FormalConstant) -> FormalConstant {
        self.try_mul(&rhs).expect("formal constant product")
    }
}

impl fmt::Display for FormalConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        if !self.rational.is_zero() {
            parts.push(rat_string(&self.rational));
        }
        if !self.zeta3.is_zero() {
            parts.push(format!("{}*zeta3hat", rat_string(&self.zeta3)));
        }
        if !self.zeta2.is_zero() {
            parts.push(format!("{}*zeta2hat", rat_string(&self.zeta2)));
        }
        let mut out = String::new();
        for (i, p) in parts.iter().enumerate() {
            if i == 0 {
                out.push_str(p);
            } else if let Some(stripped) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(stripped);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        write!(f, "{out}")
    }
}

/// Factorial as a BigInt.
pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    acc
}

/// Double factorial n!! = n(n-2)(n-4)...
pub fn double_factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 1 {
        acc *= BigInt::from(k);
        k -= 2;
    }
    acc
}

/// Reduce r into the half-open interval [0, 1): r - floor(r).
pub fn frac_part(r: &Rat) -> Rat {
    r - r.floor()
}

pub fn rat_abs(r: &Rat) -> Rat {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        assert_eq!(rat_parse("3/4").unwrap(), rat(3, 4));
        assert_eq!(rat_parse("-6/8").unwrap(), rat(-3, 4));
        assert_eq!(rat_parse("7").unwrap(), rat_i(7));
        assert!(rat_parse("1/0").is_err());
        assert_eq!(rat_string(&rat(10, 4)), "5/2");
    }

    #[test]
    fn formal_constant_arithmetic() {
        let a = FormalConstant::from_rat(rat(1, 2)) + FormalConstant::zeta3hat(rat_i(3));
        let b = a.clone().scale(&rat_i(2));
        assert_eq!(b.rational, rat_i(1));
        assert_eq!(b.zeta3, rat_i(6));
        let c = a.try_mul(&FormalConstant::from_rat(rat_i(2))).unwrap();
        assert_eq!(c, b);
        assert!(FormalConstant::zeta3hat(rat_i(1))
            .try_mul(&FormalConstant::zeta2hat(rat_i(1)))
            .is_err());
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(double_factorial(5), BigInt::from(15));
        assert_eq!(double_factorial(15), BigInt::from(2027025u64));
    }
}
