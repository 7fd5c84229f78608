//! Exact arbitrary-precision rationals.
//!
//! [`Rational`] is always stored in canonical form (positive denominator,
//! coprime numerator and denominator), so structural equality coincides
//! with numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::DomainError;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, DomainError> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(DomainError::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    /// Convenience constructor for literals; panics on a zero denominator.
    pub fn frac(numer: i64, denom: i64) -> Self {
        Self::new(numer, denom).expect("zero denominator in literal")
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

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn checked_div(&self, other: &Rational) -> Result<Rational, DomainError> {
        if other.is_zero() {
            return Err(DomainError::DivisionByZero);
        }
        Ok(Rational(&self.0 / &other.0))
    }

    pub fn recip(&self) -> Result<Rational, DomainError> {
        Rational::one().checked_div(self)
    }

    /// `2^k` for any integer `k`.
    pub fn pow2(k: i64) -> Rational {
        let shift = k.unsigned_abs() as usize;
        let p = BigInt::one() << shift;
        if k >= 0 {
            Rational::from_integer(p)
        } else {
            Rational(BigRational::new_raw(BigInt::one(), p))
        }
    }

    pub fn half(&self) -> Rational {
        Rational(&self.0 / BigInt::from(2))
    }

    pub fn mul_int(&self, n: u64) -> Rational {
        Rational(&self.0 * BigInt::from(n))
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    /// Lossy conversion, for diagnostics only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal rendering rounded to `sig_figs` significant figures (round half
    /// away from zero). Magnitudes below `10^-1` or at least `10^4` use
    /// scientific notation, e.g. `4.9e-3`.
    pub fn to_decimal_string(&self, sig_figs: usize) -> String {
        let sig = sig_figs.max(1);
        if self.is_zero() {
            return "0.0".to_string();
        }
        let negative = self.is_negative();
        let mag = self.0.abs();
        let mut exp = decimal_exponent(&mag);
        let mut digits = round_to_digits(&mag, exp, sig);
        // rounding may carry into a new leading digit (9.96 -> 10.0)
        if digits.len() > sig {
            exp += 1;
            digits.truncate(sig);
        }
        let body = if !(-1..4).contains(&exp) {
            let mut s = String::new();
            s.push_str(&digits[..1]);
            if sig > 1 {
                s.push('.');
                s.push_str(&digits[1..]);
            }
            format!("{s}e{exp}")
        } else if exp >= 0 {
            let int_len = exp as usize + 1;
            if digits.len() <= int_len {
                let mut s = digits.clone();
                s.extend(std::iter::repeat_n('0', int_len - digits.len()));
                s
            } else {
                format!("{}.{}", &digits[..int_len], &digits[int_len..])
            }
        } else {
            let zeros = (-exp - 1) as usize;
            format!("0.{}{}", "0".repeat(zeros), digits)
        };
        if negative {
            format!("-{body}")
        } else {
            body
        }
    }
}

/// `floor(log10(mag))` for a positive rational.
fn decimal_exponent(mag: &BigRational) -> i64 {
    let n_len = mag.numer().to_string().len() as i64;
    let d_len = mag.denom().to_string().len() as i64;
    let mut e = n_len - d_len;
    // the digit-count estimate is off by at most one
    loop {
        let lower = pow10(e);
        if *mag < lower {
            e -= 1;
            continue;
        }
        if *mag >= pow10(e + 1) {
            e += 1;
            continue;
        }
        return e;
    }
}

fn pow10(e: i64) -> BigRational {
    let p = num_traits::pow(BigInt::from(10), e.unsigned_abs() as usize);
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new_raw(BigInt::one(), p)
    }
}

/// Leading `sig` digits of `mag / 10^exp * 10^(sig-1)`, rounded half up.
fn round_to_digits(mag: &BigRational, exp: i64, sig: usize) -> String {
    let scaled = mag * pow10(sig as i64 - 1 - exp);
    let (q, r) = scaled.numer().div_rem(scaled.denom());
    let twice_r: BigInt = r * 2;
    let rounded = if twice_r >= *scaled.denom() { q + 1 } else { q };
    rounded.to_string()
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = DomainError;

    /// Accepts `a`, `a/b` and finite decimals such as `-1.25`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DomainError::Parse(s.to_string());
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            return Rational::new(n, d);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let (negative, int) = match int.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, int),
            };
            if !int.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            let value = Rational::new(digits, scale)?;
            return Ok(if negative { -value } else { value });
        }
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Rational::from_integer(n))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
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
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl $tr<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

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

// num-rational compares through a recursive continued-fraction expansion,
// which overflows the stack on Newton iterates (thousands of partial
// quotients). Denominators are positive, so cross-multiplying is exact.
impl Ord for Rational {
    fn cmp(&self, other: &Rational) -> Ordering {
        if self.0.denom() == other.0.denom() {
            return self.0.numer().cmp(other.0.numer());
        }
        let (a, b) = (&self.0, &other.0);
        (a.numer() * b.denom()).cmp(&(b.numer() * a.denom()))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Rational) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Rational {
    pub fn sign(&self) -> Sign {
        self.0.numer().sign()
    }
}
