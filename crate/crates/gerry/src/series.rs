//! Fixed-precision float arithmetic and series containers for the analysis
//! pipeline.
//!
//! The sequences under study are exact integers running to hundreds of
//! digits, and the estimator trails derived from them cancel almost all of
//! every term. Double precision destroys those trails, so all derived
//! arithmetic runs at 320 bits (around 96 decimal digits) behind ordinary
//! operator syntax.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::{BigInt, BigUint};
use thiserror::Error;

/// Working mantissa width in bits.
pub const PRECISION_BITS: usize = 320;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    // Cache of pi / e / ln(2) / ln(10) shared by transcendental calls.
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("series indices must increase strictly (offender at position {0})")]
    IndicesNotIncreasing(usize),
    #[error("term at index {0} is not positive; ratio analysis needs positive terms")]
    NonPositiveTerm(u32),
    #[error("value is not finite: {0}")]
    NotFinite(String),
}

/// One arbitrary-precision value. All operations round to `PRECISION_BITS`.
#[derive(Clone, Debug)]
pub struct HighPrec(BigFloat);

impl HighPrec {
    pub fn zero() -> HighPrec {
        HighPrec(BigFloat::from_i64(0, PRECISION_BITS))
    }

    pub fn one() -> HighPrec {
        HighPrec(BigFloat::from_i64(1, PRECISION_BITS))
    }

    pub fn from_i64(v: i64) -> HighPrec {
        HighPrec(BigFloat::from_i64(v, PRECISION_BITS))
    }

    pub fn from_u64(v: u64) -> HighPrec {
        HighPrec(BigFloat::from_u64(v, PRECISION_BITS))
    }

    pub fn from_f64(v: f64) -> HighPrec {
        HighPrec(BigFloat::from_f64(v, PRECISION_BITS))
    }

    pub fn from_biguint(v: &BigUint) -> HighPrec {
        HighPrec::parse(&v.to_string()).expect("decimal digits parse")
    }

    pub fn from_bigint(v: &BigInt) -> HighPrec {
        HighPrec::parse(&v.to_string()).expect("decimal digits parse")
    }

    /// Parses a decimal literal ("1.7445498", "2e-5"). None on malformed input.
    pub fn parse(s: &str) -> Option<HighPrec> {
        let v = with_consts(|cc| BigFloat::parse(s, Radix::Dec, PRECISION_BITS, RM, cc));
        if v.is_nan() || v.is_inf() {
            None
        } else {
            Some(HighPrec(v))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// The exact dyadic rational this float holds (mantissa times a power
    /// of two). None for NaN or infinities.
    pub fn to_rational(&self) -> Option<num_rational::BigRational> {
        use num_traits::One;
        let (words, _, sign, exp, _) = self.0.as_raw_parts()?;
        let mut m = BigUint::default();
        for (i, w) in words.iter().enumerate() {
            m |= BigUint::from(*w) << (astro_float::WORD_BIT_SIZE * i);
        }
        let mut num = BigInt::from(m);
        if sign.is_negative() {
            num = -num;
        }
        // The mantissa reads as a fraction in [1/2, 1), so the value is
        // num * 2^(exp - total mantissa bits).
        let shift = exp as i64 - (words.len() * astro_float::WORD_BIT_SIZE) as i64;
        Some(if shift >= 0 {
            num_rational::BigRational::from_integer(num << shift)
        } else {
            num_rational::BigRational::new(num, BigInt::one() << (-shift) as usize)
        })
    }

    pub fn is_finite(&self) -> bool {
        !self.0.is_nan() && !self.0.is_inf()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative() && !self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive() && !self.0.is_zero()
    }

    pub fn abs(&self) -> HighPrec {
        HighPrec(self.0.abs())
    }

    /// Integer power; exact for small exponents within precision.
    pub fn powi(&self, n: usize) -> HighPrec {
        HighPrec(self.0.powi(n, PRECISION_BITS, RM))
    }

    /// Real power. The base must be positive.
    pub fn pow(&self, exp: &HighPrec) -> HighPrec {
        debug_assert!(self.is_positive(), "real power of a non-positive base");
        HighPrec(with_consts(|cc| {
            self.0.pow(&exp.0, PRECISION_BITS, RM, cc)
        }))
    }

    /// Natural logarithm. The argument must be positive.
    pub fn ln(&self) -> HighPrec {
        debug_assert!(self.is_positive(), "logarithm of a non-positive value");
        HighPrec(with_consts(|cc| self.0.ln(PRECISION_BITS, RM, cc)))
    }

    pub fn exp(&self) -> HighPrec {
        HighPrec(with_consts(|cc| self.0.exp(PRECISION_BITS, RM, cc)))
    }

    pub fn sqrt(&self) -> HighPrec {
        HighPrec(self.0.sqrt(PRECISION_BITS, RM))
    }

    pub fn recip(&self) -> HighPrec {
        HighPrec::one() / self.clone()
    }

    /// Total order; the internal invariant is that no NaN ever enters a trail.
    pub fn total_cmp(&self, other: &HighPrec) -> Ordering {
        match self.0.cmp(&other.0) {
            Some(c) => c.cmp(&0),
            None => panic!("comparison with a non-finite value"),
        }
    }

    pub fn max(self, other: HighPrec) -> HighPrec {
        if self.total_cmp(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        let s = with_consts(|cc| self.0.format(Radix::Dec, RM, cc)).expect("format");
        // More digits than f64 resolves parse fine; clamp only on exponent
        // overflow, which str::parse maps to +-inf already.
        s.parse::<f64>().unwrap_or(f64::NAN)
    }

    /// Scientific notation with the given number of significant digits.
    pub fn to_sci(&self, digits: usize) -> String {
        let digits = digits.max(1);
        let s = with_consts(|cc| self.0.format(Radix::Dec, RM, cc)).expect("format");
        if self.0.is_zero() {
            return "0".into();
        }
        // Shape: -?d.ddd...e+xx. Trim the fraction, keep the exponent.
        let (mant, exp) = match s.find('e') {
            Some(i) => (&s[..i], &s[i..]),
            None => (&s[..], ""),
        };
        let keep = mant.len().min(
            digits + 1 + usize::from(mant.starts_with('-')), // dot, sign
        );
        let mut mant = mant[..keep].to_string();
        while mant.ends_with('0') {
            mant.pop();
        }
        if mant.ends_with('.') {
            mant.pop();
        }
        format!("{mant}{exp}")
    }
}

impl fmt::Display for HighPrec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sci(30))
    }
}

impl PartialEq for HighPrec {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp(&other.0) == Some(0)
    }
}

impl PartialOrd for HighPrec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait for &HighPrec {
            type Output = HighPrec;
            fn $method(self, rhs: &HighPrec) -> HighPrec {
                HighPrec(self.0.$method(&rhs.0, PRECISION_BITS, RM))
            }
        }
        impl $trait for HighPrec {
            type Output = HighPrec;
            fn $method(self, rhs: HighPrec) -> HighPrec {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&HighPrec> for HighPrec {
            type Output = HighPrec;
            fn $method(self, rhs: &HighPrec) -> HighPrec {
                (&self).$method(rhs)
            }
        }
        impl $trait<HighPrec> for &HighPrec {
            type Output = HighPrec;
            fn $method(self, rhs: HighPrec) -> HighPrec {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for &HighPrec {
    type Output = HighPrec;
    fn neg(self) -> HighPrec {
        HighPrec(self.0.clone().neg())
    }
}

impl Neg for HighPrec {
    type Output = HighPrec;
    fn neg(self) -> HighPrec {
        HighPrec(self.0.neg())
    }
}

/// A series c_n indexed by n, with strictly increasing indices. Gaps are
/// allowed; the estimators read true indices, not positions.
#[derive(Clone, Debug)]
pub struct SeriesSample {
    terms: Vec<(u32, HighPrec)>,
}

impl SeriesSample {
    pub fn new(terms: Vec<(u32, HighPrec)>) -> Result<SeriesSample, SeriesError> {
        for (i, w) in terms.windows(2).enumerate() {
            if w[0].0 >= w[1].0 {
                return Err(SeriesError::IndicesNotIncreasing(i + 1));
            }
        }
        Ok(SeriesSample { terms })
    }

    /// Consecutive indices starting at `start`.
    pub fn from_values(start: u32, values: Vec<HighPrec>) -> SeriesSample {
        SeriesSample {
            terms: values
                .into_iter()
                .enumerate()
                .map(|(i, v)| (start + i as u32, v))
                .collect(),
        }
    }

    pub fn from_biguints(start: u32, values: &[BigUint]) -> SeriesSample {
        SeriesSample::from_values(start, values.iter().map(HighPrec::from_biguint).collect())
    }

    pub fn terms(&self) -> &[(u32, HighPrec)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms ready for ratio work: leading zeros dropped (their count is
    /// returned), every remaining term strictly positive.
    pub fn positive_tail(&self) -> Result<(&[(u32, HighPrec)], usize), SeriesError> {
        let skip = self
            .terms
            .iter()
            .take_while(|(_, v)| v.is_zero())
            .count();
        let tail = &self.terms[skip..];
        for (n, v) in tail {
            if !v.is_positive() {
                return Err(SeriesError::NonPositiveTerm(*n));
            }
        }
        Ok((tail, skip))
    }

    /// Pointwise scaling; estimator invariance under this is property-tested.
    pub fn scaled(&self, factor: &HighPrec) -> SeriesSample {
        SeriesSample {
            terms: self
                .terms
                .iter()
                .map(|(n, v)| (*n, v * factor))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(s: &str) -> HighPrec {
        HighPrec::parse(s).unwrap()
    }

    #[test]
    fn arithmetic_round_trips_through_f64() {
        assert_eq!(HighPrec::from_f64(1.5).to_f64(), 1.5);
        assert_eq!((hp("2") + hp("3")).to_f64(), 5.0);
        assert_eq!((hp("2") * hp("3")).to_f64(), 6.0);
        assert_eq!((hp("1") / hp("4")).to_f64(), 0.25);
        assert_eq!((hp("2") - hp("3")).to_f64(), -1.0);
        assert_eq!((-hp("2")).to_f64(), -2.0);
    }

    #[test]
    fn precision_exceeds_fifty_digits() {
        // 1 + 1e-60 must stay distinct from 1.
        let one_plus = hp("1") + hp("1e-60");
        assert!(one_plus > hp("1"));
        let back = one_plus - hp("1");
        let rel = ((back.clone() - hp("1e-60")) / hp("1e-60")).abs();
        assert!(rel < hp("1e-30"), "residual {rel}");
    }

    #[test]
    fn big_integers_convert_exactly() {
        let big: BigUint = BigUint::from(10u32).pow(70) + BigUint::from(7u32);
        let v = HighPrec::from_biguint(&big);
        // 70 digits fit inside 96; the value is exact, so subtracting the
        // power of ten leaves exactly 7.
        let p70 = hp("1e70");
        assert_eq!((v - p70).to_f64(), 7.0);
    }

    #[test]
    fn transcendentals_match_known_values() {
        assert!((hp("2.718281828459045235360287").ln() - hp("1")).abs() < hp("1e-20"));
        assert!((hp("1").exp() - hp("2.718281828459045235360287")).abs() < hp("1e-20"));
        assert!((hp("2").sqrt() - hp("1.414213562373095048801689")).abs() < hp("1e-20"));
        assert!((hp("2").pow(&hp("10")) - hp("1024")).abs() < hp("1e-60"));
        assert_eq!(hp("3").powi(4).to_f64(), 81.0);
    }

    #[test]
    fn huge_magnitudes_survive() {
        // Growth-constant powers at large board sizes overflow f64 by far.
        let lambda = hp("1.7445498");
        let v = lambda.powi(1600);
        assert!(v.ln().to_f64() > 800.0);
        assert!(v.to_f64().is_infinite());
        let ratio = &v / &v;
        assert_eq!(ratio.to_f64(), 1.0);
    }

    #[test]
    fn sci_formatting_truncates_mantissa() {
        let v = hp("123456789");
        assert_eq!(v.to_sci(4), "1.234e+8");
        assert_eq!(HighPrec::zero().to_sci(5), "0");
        assert_eq!(hp("-0.5").to_sci(3), "-5e-1");
    }

    #[test]
    fn sample_validation_and_trimming() {
        assert!(SeriesSample::new(vec![(2, hp("1")), (2, hp("2"))]).is_err());
        let s = SeriesSample::from_values(
            1,
            vec![HighPrec::zero(), HighPrec::zero(), hp("4"), hp("16")],
        );
        let (tail, skip) = s.positive_tail().unwrap();
        assert_eq!(skip, 2);
        assert_eq!(tail.len(), 2);
        assert_eq!(tail[0].0, 3);
        let bad = SeriesSample::from_values(1, vec![hp("4"), hp("-1")]);
        assert!(bad.positive_tail().is_err());
    }
}
