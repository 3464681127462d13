//! Exact Gaussian-rational arithmetic for coefficient values.
//!
//! Coefficient values come in two exactness classes: Gaussian rationals
//! (both parts exact rationals, arithmetic is exact) and numeric complex
//! values produced when a construction leaves the rational domain (roots
//! of unity of order > 4, fractional roots of non-squares). The numeric
//! class taints everything it touches; the classifier downgrades its
//! certificates accordingly.

use num::complex::Complex64;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A Gaussian rational a + b i with exact rational parts.
///
/// `BigRational` keeps fractions reduced with positive denominators, so
/// equality and hashing are structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComplexRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl ComplexRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        ComplexRational { re, im }
    }

    pub fn from_integers(re: i64, im: i64) -> Self {
        ComplexRational {
            re: BigRational::from_integer(BigInt::from(re)),
            im: BigRational::from_integer(BigInt::from(im)),
        }
    }

    /// re/re_den + (im/im_den) i, denominators must be nonzero.
    pub fn from_ratios(re: (i64, i64), im: (i64, i64)) -> Self {
        ComplexRational {
            re: BigRational::new(BigInt::from(re.0), BigInt::from(re.1)),
            im: BigRational::new(BigInt::from(im.0), BigInt::from(im.1)),
        }
    }

    pub fn zero() -> Self {
        Self::from_integers(0, 0)
    }

    pub fn one() -> Self {
        Self::from_integers(1, 0)
    }

    pub fn i() -> Self {
        Self::from_integers(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        ComplexRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// |z|^2 = re^2 + im^2, exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Exact test |z| <= 1.
    pub fn magnitude_at_most_one(&self) -> bool {
        self.norm_sqr() <= BigRational::one()
    }

    /// Exact test |z| = 1.
    pub fn is_unit(&self) -> bool {
        self.norm_sqr() == BigRational::one()
    }

    /// True for 1, -1, i, -i: the Gaussian-rational roots of unity.
    pub fn is_fourth_root_of_unity(&self) -> bool {
        let one = BigRational::one();
        (self.im.is_zero() && (self.re == one || self.re == -one.clone()))
            || (self.re.is_zero() && (self.im == one || self.im == -one))
    }

    /// z^n by repeated squaring, exact.
    pub fn pow(&self, n: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            n >>= 1;
        }
        acc
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }

    /// Exact square root within Q(i), when one exists.
    ///
    /// Covers the cases reachable from the builtin coefficient domain:
    /// nonnegative rational squares (sqrt(x) = p/q), negative rational
    /// squares (sqrt(-x) = (p/q) i), and 0. Returns None otherwise.
    pub fn exact_sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        if !self.im.is_zero() {
            // Gaussian square roots of non-real values (e.g. sqrt(i))
            // leave Q(i) except in contrived cases; not needed here.
            return None;
        }
        let mag = self.re.abs();
        let num = rational_sqrt(&mag)?;
        if self.re.is_positive() {
            Some(ComplexRational {
                re: num,
                im: BigRational::zero(),
            })
        } else {
            Some(ComplexRational {
                re: BigRational::zero(),
                im: num,
            })
        }
    }
}

fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Rational to f64 with enough headroom for the magnitudes used here.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Falls back to a quotient of leading digits for huge fractions.
        let n = r.numer().to_f64().unwrap_or(f64::MAX);
        let d = r.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

impl Add for &ComplexRational {
    type Output = ComplexRational;
    fn add(self, rhs: Self) -> ComplexRational {
        ComplexRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &ComplexRational {
    type Output = ComplexRational;
    fn sub(self, rhs: Self) -> ComplexRational {
        ComplexRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &ComplexRational {
    type Output = ComplexRational;
    fn mul(self, rhs: Self) -> ComplexRational {
        ComplexRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &ComplexRational {
    type Output = ComplexRational;
    fn neg(self) -> ComplexRational {
        ComplexRational {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

impl fmt::Display for ComplexRational {
    /// Canonical literal form: "a/b+c/d i", with degenerate parts elided
    /// ("0", "1", "-i", "1/2-1/2 i", ...). `parse_complex_literal` accepts
    /// everything this produces.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        let im_part = |f: &mut fmt::Formatter<'_>, im: &BigRational, lead: bool| {
            let mag = im.abs();
            let sign = if im.is_negative() {
                "-"
            } else if lead {
                ""
            } else {
                "+"
            };
            if mag.is_one() {
                write!(f, "{}i", sign)
            } else {
                write!(f, "{}{} i", sign, mag)
            }
        };
        if self.re.is_zero() {
            im_part(f, &self.im, true)
        } else {
            write!(f, "{}", self.re)?;
            im_part(f, &self.im, false)
        }
    }
}

/// Parse an exact complex literal: `a/b`, `a/b+c/d i`, `i`, `-i`, `3/5-4/5i`.
/// Whitespace before the trailing `i` is optional.
pub fn parse_complex_literal(text: &str) -> Result<ComplexRational, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex literal".into());
    }
    // Split into at most two signed terms.
    let mut terms: Vec<String> = Vec::new();
    let mut cur = String::new();
    for (idx, ch) in s.char_indices() {
        if (ch == '+' || ch == '-') && idx != 0 {
            let prev = s[..idx].chars().last().unwrap();
            if prev != '/' && prev != '+' && prev != '-' {
                terms.push(std::mem::take(&mut cur));
            }
        }
        cur.push(ch);
    }
    terms.push(cur);
    if terms.len() > 2 {
        return Err(format!("too many terms in complex literal `{text}`"));
    }
    let mut re = BigRational::zero();
    let mut im = BigRational::zero();
    let mut seen_re = false;
    let mut seen_im = false;
    for term in &terms {
        if let Some(body) = term.strip_suffix('i') {
            if seen_im {
                return Err(format!("duplicate imaginary part in `{text}`"));
            }
            seen_im = true;
            im = match body {
                "" | "+" => BigRational::one(),
                "-" => -BigRational::one(),
                _ => parse_rational(body)?,
            };
        } else {
            if seen_re {
                return Err(format!("duplicate real part in `{text}`"));
            }
            seen_re = true;
            re = parse_rational(term)?;
        }
    }
    Ok(ComplexRational { re, im })
}

/// Parse `p/q` or `p` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational, String> {
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| format!("invalid integer `{num}` in rational `{text}`"))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| format!("invalid integer `{den}` in rational `{text}`"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in rational `{text}`"));
    }
    Ok(BigRational::new(n, d))
}

/// A coefficient value with its exactness class.
#[derive(Clone, Debug, PartialEq)]
pub enum CoefficientValue {
    /// Exact Gaussian rational, |v| <= 1 enforced at rule validation.
    Exact(ComplexRational),
    /// Positive real p^{-a} from a decay rule; sign and bound are known
    /// structurally even though the magnitude is carried as f64.
    PositiveReal(f64),
    /// Numeric complex with downgraded exactness.
    Numeric(Complex64),
}

impl CoefficientValue {
    pub fn to_complex64(&self) -> Complex64 {
        match self {
            CoefficientValue::Exact(v) => v.to_complex64(),
            CoefficientValue::PositiveReal(x) => Complex64::new(*x, 0.0),
            CoefficientValue::Numeric(z) => *z,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, CoefficientValue::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            CoefficientValue::Exact(v) => v.is_zero(),
            CoefficientValue::PositiveReal(x) => *x == 0.0,
            CoefficientValue::Numeric(z) => z.re == 0.0 && z.im == 0.0,
        }
    }
}
