//! Exact rational rewards.
//!
//! Rewards are kept exact so that maximiser ties and equilibrium-set
//! comparisons are decidable, with the order agreeing with integer
//! cross-multiplication.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

/// An exact rational number, always in lowest terms with positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(numer: i64, denom: i64) -> Rat {
        assert!(denom != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_int(n: i64) -> Rat {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Parses an integer (`-3`), fraction (`3/2`) or decimal (`1.25`) literal.
    /// Decimals convert exactly.
    pub fn parse(text: &str) -> Option<Rat> {
        let (sign, body) = match text.strip_prefix('-') {
            Some(rest) => (-1i64, rest),
            None => (1, text),
        };
        if body.is_empty() {
            return None;
        }
        let signed = |r: Rat| if sign < 0 { -&r } else { r };
        if let Some((n, d)) = body.split_once('/') {
            let n = BigInt::from_str(n).ok()?;
            let d = BigInt::from_str(d).ok()?;
            if d.is_zero() {
                return None;
            }
            return Some(signed(Rat(BigRational::new(n, d))));
        }
        if let Some((int, frac)) = body.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            let int = BigInt::from_str(int).ok()?;
            let frac_num = BigInt::from_str(frac).ok()?;
            let scale = BigInt::from(10u32).pow(frac.len() as u32);
            let value = BigRational::new(int * &scale + frac_num, scale);
            return Some(signed(Rat(value)));
        }
        if !body.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        Some(signed(Rat(BigRational::from_integer(
            BigInt::from_str(body).ok()?,
        ))))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Add for &Rat {
    type Output = Rat;
    fn add(self, rhs: Self) -> Rat {
        Rat(&self.0 + &rhs.0)
    }
}

impl Sub for &Rat {
    type Output = Rat;
    fn sub(self, rhs: Self) -> Rat {
        Rat(&self.0 - &rhs.0)
    }
}

impl Mul for &Rat {
    type Output = Rat;
    fn mul(self, rhs: Self) -> Rat {
        Rat(&self.0 * &rhs.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}
