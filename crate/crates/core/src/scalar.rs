//! Scalar abstraction shared by the exact and floating-point paths.
//!
//! Every algebraic routine in this crate is written once against [`Scalar`].
//! [`Rational`] gives the exact ground truth; `f64` (and `f32`) give the fast
//! path used for deep iterations where only limits matter.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number, always kept in lowest terms.
pub type Rational = BigRational;

/// Default absolute tolerance for floating-point comparisons.
pub const DEFAULT_FLOAT_TOL: f64 = 1e-12;

/// A field element usable by every routine in the crate.
pub trait Scalar: Clone + fmt::Debug + fmt::Display + PartialOrd + Num + Signed + Send + Sync + 'static {
    /// True when arithmetic never rounds.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    /// `num / den`; `den` must be nonzero.
    fn ratio(num: i64, den: i64) -> Self;

    /// Exact conversion of a finite float (the binary value, not a decimal guess).
    fn from_f64(v: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    /// Nearest representable value (identity for exact types).
    fn from_rational(r: &Rational) -> Self;

    /// A value `r` with `r <= sqrt(self)`; for floats this is just `sqrt`.
    ///
    /// Exact types return a rational lower bound with relative error below 2^-64,
    /// so inequalities of the form `x <= c * sqrt(y)` can be certified by
    /// checking `x <= c * y.sqrt_floor()`.
    fn sqrt_floor(&self) -> Self;

    /// Text form: `p/q` (or `p` when integral) for exact types, 17 significant
    /// digits for floats.
    fn to_text(&self) -> String;

    /// Equality up to `tol` (absolute) for floats, strict equality for exact types.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if Self::EXACT {
            self == other
        } else {
            (self.to_f64() - other.to_f64()).abs() <= tol
        }
    }

    /// `self^exp` by repeated squaring.
    fn powi(&self, exp: u32) -> Self {
        num_traits::pow(self.clone(), exp as usize)
    }
}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_i64(v: i64) -> Self {
                v as $t
            }

            fn ratio(num: i64, den: i64) -> Self {
                num as $t / den as $t
            }

            fn from_f64(v: f64) -> Option<Self> {
                v.is_finite().then_some(v as $t)
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn from_rational(r: &Rational) -> Self {
                rational_to_f64(r) as $t
            }

            fn sqrt_floor(&self) -> Self {
                self.max(0.0).sqrt()
            }

            fn to_text(&self) -> String {
                format_sig17(*self as f64)
            }
        }
    };
}

impl_float_scalar!(f64);
impl_float_scalar!(f32);

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(v: f64) -> Option<Self> {
        <Rational as FromPrimitive>::from_f64(v)
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn sqrt_floor(&self) -> Self {
        if !self.is_positive() {
            return Rational::zero();
        }
        // sqrt(p/q) = sqrt(p*q)/q >= floor(sqrt(p*q*4^k)) / (q*2^k)
        const EXTRA_BITS: usize = 64;
        let p = self.numer();
        let q = self.denom();
        let scaled: BigInt = (p * q) << (2 * EXTRA_BITS);
        let root = scaled.sqrt();
        Rational::new(root, q << EXTRA_BITS)
    }

    fn to_text(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

/// Correctly scaled conversion that survives numerators and denominators
/// far beyond the `f64` range.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    // bring both into ~60-bit range
    let shift_n = (nb - 60).max(0);
    let shift_d = (db - 60).max(0);
    let n = (r.numer().abs() >> shift_n as usize).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift_d as usize).to_f64().unwrap_or(1.0);
    let mag = n / d * 2f64.powi((shift_n - shift_d) as i32);
    if r.numer().sign() == Sign::Minus {
        -mag
    } else {
        mag
    }
}

/// 17-significant-digit scientific rendering used by every CSV writer.
pub fn format_sig17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x:.16e}")
}

/// Parse `p/q`, an integer, or a decimal literal into any scalar.
///
/// Decimals are parsed exactly (`0.1` becomes `1/10`) before conversion.
pub fn parse_scalar<T: Scalar>(text: &str) -> Option<T> {
    parse_rational(text).map(|r| T::from_rational(&r))
}

/// Parse `p/q`, an integer, or a plain decimal (optionally with exponent) exactly.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str_radix(p.trim(), 10).ok()?;
        let q = BigInt::from_str_radix(q.trim(), 10).ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str_radix(&digits, 10).ok()?);
    let scale = exp - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Some(if neg { -value } else { value })
}

/// Numeric evaluation mode selected by callers (CLI `--mode`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" | "float64" => Ok(Mode::Float),
            other => Err(format!("unknown mode `{other}` (expected exact|float)")),
        }
    }
}

/// Evaluation policy: mode plus the float comparison tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericPolicy {
    pub mode: Mode,
    pub tol: f64,
}

impl NumericPolicy {
    pub fn exact() -> Self {
        Self { mode: Mode::Exact, tol: 0.0 }
    }

    pub fn float() -> Self {
        Self { mode: Mode::Float, tol: DEFAULT_FLOAT_TOL }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self::exact()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_form() {
        assert_eq!(Rational::ratio(6, 4).to_text(), "3/2");
        assert_eq!(Rational::ratio(-4, 2).to_text(), "-2");
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), Rational::ratio(1, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), Rational::ratio(-1, 4));
        assert_eq!(parse_rational("1.5e2").unwrap(), <Rational as Scalar>::from_i64(150));
        assert_eq!(parse_rational("2e-1").unwrap(), Rational::ratio(1, 5));
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("abc").is_none());
        assert_eq!(parse_scalar::<f64>("1/4"), Some(0.25));
    }

    #[test]
    fn sqrt_floor_is_a_lower_bound() {
        for (p, q) in [(2i64, 1i64), (1, 3), (49, 4), (10_000_001, 7)] {
            let r = Rational::ratio(p, q);
            let s = r.sqrt_floor();
            assert!(&s * &s <= r);
            let err = (p as f64 / q as f64).sqrt() - Scalar::to_f64(&s);
            assert!((-1e-15..1e-12).contains(&err));
        }
        assert_eq!(Rational::ratio(9, 4).sqrt_floor(), Rational::ratio(3, 2));
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = Rational::new(BigInt::from(3) << 2000usize, BigInt::from(1) << 2000usize);
        assert!((rational_to_f64(&big) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn sig17_round_trips() {
        let x = 2.0 / 3.0;
        let s = format_sig17(x);
        assert_eq!(s.parse::<f64>().unwrap(), x);
    }
}
