//! Exact rational scalars and rigorous enclosures for irrational powers.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number used for every distance and every φ value.
pub type Rational = BigRational;

/// Default number of significant decimal digits for enclosures.
pub const DEFAULT_PRECISION_DIGITS: u32 = 30;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"2.5"`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let malformed = || ParseRationalError::Malformed(text.into());
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| malformed())?;
        let den: BigInt = den.trim().parse().map_err(|_| malformed())?;
        if den.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(text.into()));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        let negative = whole.starts_with('-');
        let digits_ok = |s: &str| s.chars().all(|c| c.is_ascii_digit());
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !digits_ok(whole_digits)
            || !digits_ok(frac)
            || (whole_digits.is_empty() && frac.is_empty())
        {
            return Err(malformed());
        }
        let mut joined = String::from(whole_digits);
        joined.push_str(frac);
        let mut num: BigInt = if joined.is_empty() {
            BigInt::zero()
        } else {
            joined.parse().map_err(|_| malformed())?
        };
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10u32), frac.len());
        return Ok(Rational::new(num, den));
    }
    let num: BigInt = text.parse().map_err(|_| malformed())?;
    Ok(Rational::from_integer(num))
}

/// Renders `value` in decimal with `digits` fractional digits, rounded half away from zero.
pub fn to_decimal(value: &Rational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10u32), digits);
    let magnitude = value.abs();
    let doubled: BigInt = magnitude.numer() * &scale * 2 + magnitude.denom();
    let rounded = doubled.div_floor(&(magnitude.denom() * 2));
    let negative = value.is_negative() && !rounded.is_zero();
    let magnitude = rounded.to_string();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if digits == 0 {
        out.push_str(&magnitude);
        return out;
    }
    let padded = if magnitude.len() <= digits {
        let mut s = String::new();
        for _ in 0..(digits + 1 - magnitude.len()) {
            s.push('0');
        }
        s.push_str(&magnitude);
        s
    } else {
        magnitude
    };
    let split = padded.len() - digits;
    out.push_str(&padded[..split]);
    out.push('.');
    out.push_str(&padded[split..]);
    out
}

/// Closed rational interval `[lower, upper]` enclosing an irrational value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    lower: Rational,
    upper: Rational,
}

impl Interval {
    pub fn new(lower: Rational, upper: Rational) -> Self {
        assert!(lower <= upper, "interval bounds out of order");
        Self { lower, upper }
    }

    pub fn lower(&self) -> &Rational {
        &self.lower
    }

    pub fn upper(&self) -> &Rational {
        &self.upper
    }
}

/// Result of comparing two scalars when one of them may be an enclosure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Yes,
    No,
    /// The enclosures overlap; the comparison cannot be resolved at this precision.
    Indeterminate,
}

/// A distance-like value: exact, or an enclosure produced by irrational exponentiation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scalar {
    Exact(Rational),
    Approx(Interval),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(Rational::zero())
    }

    pub fn integer(value: i64) -> Self {
        Scalar::Exact(Rational::from_integer(value.into()))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Approx(_) => None,
        }
    }

    pub fn lower(&self) -> &Rational {
        match self {
            Scalar::Exact(r) => r,
            Scalar::Approx(i) => &i.lower,
        }
    }

    pub fn upper(&self) -> &Rational {
        match self {
            Scalar::Exact(r) => r,
            Scalar::Approx(i) => &i.upper,
        }
    }

    /// Half-width of the enclosure; zero for exact values.
    pub fn radius(&self) -> Rational {
        (self.upper() - self.lower()) / Rational::from_integer(2.into())
    }

    pub fn midpoint(&self) -> Rational {
        (self.upper() + self.lower()) / Rational::from_integer(2.into())
    }

    /// Decides `self <= other`.
    pub fn le(&self, other: &Scalar) -> Decision {
        if self.upper() <= other.lower() {
            Decision::Yes
        } else if self.lower() > other.upper() {
            Decision::No
        } else {
            Decision::Indeterminate
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            _ => Scalar::Approx(Interval::new(
                self.lower() + other.lower(),
                self.upper() + other.upper(),
            )),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a - b),
            _ => Scalar::Approx(Interval::new(
                self.lower() - other.upper(),
                self.upper() - other.lower(),
            )),
        }
    }

    pub fn scale(&self, factor: &Rational) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(a * factor),
            Scalar::Approx(i) => {
                let a = &i.lower * factor;
                let b = &i.upper * factor;
                if a <= b {
                    Scalar::Approx(Interval::new(a, b))
                } else {
                    Scalar::Approx(Interval::new(b, a))
                }
            }
        }
    }

    /// Larger of two scalars, taken bound-wise for enclosures.
    pub fn max(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                Scalar::Exact(if a >= b { a.clone() } else { b.clone() })
            }
            _ => Scalar::Approx(Interval::new(
                self.lower().max(other.lower()).clone(),
                self.upper().max(other.upper()).clone(),
            )),
        }
    }

    /// Ordering used when reducing margins: by lower bound, then upper bound.
    pub fn reduction_cmp(&self, other: &Scalar) -> Ordering {
        self.lower()
            .cmp(other.lower())
            .then_with(|| self.upper().cmp(other.upper()))
    }

    /// Decimal rendering; enclosures print as `[lo, hi]`.
    pub fn to_decimal(&self, digits: usize) -> String {
        match self {
            Scalar::Exact(r) => to_decimal(r, digits),
            Scalar::Approx(i) => {
                let mut s = String::from("[");
                s.push_str(&to_decimal(&i.lower, digits));
                s.push_str(", ");
                s.push_str(&to_decimal(&i.upper, digits));
                s.push(']');
                s
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Approx(i) => write!(f, "[{}, {}]", i.lower, i.upper),
        }
    }
}

impl From<Rational> for Scalar {
    fn from(value: Rational) -> Self {
        Scalar::Exact(value)
    }
}

fn to_biguint(value: &BigInt) -> BigUint {
    value.to_biguint().expect("nonnegative")
}

/// Encloses `∏ base_i ^ exponent_i` for nonnegative bases and positive rational exponents.
///
/// Exponents are brought to a common denominator `Q`, so the product is evaluated as a
/// single `Q`-th root of an exact rational. The result is exact whenever that rational is
/// a perfect `Q`-th power (in particular when any base is zero, or all bases are equal and
/// the exponents sum to an integer). Otherwise the result is an interval of relative width
/// at most `10^-digits` that provably contains the true value.
pub fn root_of_product(factors: &[(Rational, Rational)], digits: u32) -> Scalar {
    assert!(
        factors
            .iter()
            .all(|(b, e)| !b.is_negative() && e.is_positive()),
        "bases must be >= 0 and exponents > 0"
    );
    if factors.is_empty() {
        return Scalar::Exact(Rational::one());
    }
    if factors.iter().any(|(b, _)| b.is_zero()) {
        return Scalar::zero();
    }
    let common = factors
        .iter()
        .fold(BigInt::one(), |acc, (_, e)| acc.lcm(e.denom()));
    let mut numer = BigUint::one();
    let mut denom = BigUint::one();
    for (base, exponent) in factors {
        let power = (exponent.numer() * (&common / exponent.denom()))
            .to_u32()
            .expect("exponent numerator fits in u32");
        numer *= num_traits::pow(to_biguint(base.numer()), power as usize);
        denom *= num_traits::pow(to_biguint(base.denom()), power as usize);
    }
    let root = common.to_u32().expect("exponent denominator fits in u32");
    nth_root_enclosure(numer, denom, root, digits)
}

/// Encloses `(numer / denom)^(1/root)`.
fn nth_root_enclosure(numer: BigUint, denom: BigUint, root: u32, digits: u32) -> Scalar {
    let g = numer.gcd(&denom);
    let (numer, denom) = (numer / &g, denom / &g);
    if root == 1 {
        return Scalar::Exact(Rational::new(numer.into(), denom.into()));
    }
    let rn = numer.nth_root(root);
    let rd = denom.nth_root(root);
    if rn.pow(root) == numer && rd.pow(root) == denom {
        return Scalar::Exact(Rational::new(rn.into(), rd.into()));
    }
    // floor(y * 2^k) has at least `needed` bits, so 2^-k <= y * 2^(1-needed)
    let needed = (u64::from(digits) * 3322).div_ceil(1000) + 2;
    let mut shift = needed + (denom.bits().saturating_sub(numer.bits())) / u64::from(root) + 2;
    loop {
        let scaled = (&numer << (shift * u64::from(root))) / &denom;
        let floor = scaled.nth_root(root);
        if floor.bits() >= needed {
            let unit = BigInt::one() << shift;
            let lower = Rational::new(
                BigInt::from_biguint(Sign::Plus, floor.clone()),
                unit.clone(),
            );
            let upper = Rational::new(BigInt::from_biguint(Sign::Plus, floor + 1u32), unit);
            return Scalar::Approx(Interval::new(lower, upper));
        }
        shift += needed - floor.bits() + 1;
    }
}

/// Integer power with a rational base and a nonnegative exponent.
pub fn pow_exact(base: &Rational, exponent: u32) -> Rational {
    num_traits::pow(base.clone(), exponent as usize)
}

pub(crate) fn sort_dedup(values: &mut Vec<Rational>) {
    values.sort();
    values.dedup();
}
