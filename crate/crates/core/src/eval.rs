//! Certified evaluation of square-root sums.
//!
//! All enclosures are intervals with dyadic-rational endpoints, produced by
//! integer square roots of scaled integers. No floating point is involved,
//! so results are bit-for-bit reproducible across platforms.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Escalation starts here and doubles until the bit budget is exhausted.
pub const INITIAL_BITS: u32 = 64;
/// Default bit budget for precision escalation.
pub const DEFAULT_BIT_BUDGET: u32 = 4096;

/// A dyadic rational `mant * 2^exp`, kept in canonical form
/// (odd mantissa, or zero with exponent zero).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            mant: BigInt::one(),
            exp: 0,
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self::new(BigInt::from(v), 0)
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Self::new(v, 0)
    }

    /// 2^exp
    pub fn pow2(exp: i64) -> Self {
        Dyadic {
            mant: BigInt::one(),
            exp,
        }
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp += tz as i64;
        }
    }

    pub fn mant(&self) -> &BigInt {
        &self.mant
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as usize;
        let b = &other.mant << (other.exp - e) as usize;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mant * &other.mant, self.exp + other.exp)
    }

    pub fn mul_pow2(&self, k: i64) -> Dyadic {
        if self.mant.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    pub fn to_ratio(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as usize)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    /// Largest multiple of 2^-bits that is <= r.
    pub fn from_ratio_floor(r: &BigRational, bits: u32) -> Dyadic {
        let scaled = r * BigRational::from_integer(BigInt::one() << bits as usize);
        Dyadic::new(scaled.floor().to_integer(), -(bits as i64))
    }

    /// Smallest multiple of 2^-bits that is >= r.
    pub fn from_ratio_ceil(r: &BigRational, bits: u32) -> Dyadic {
        let scaled = r * BigRational::from_integer(BigInt::one() << bits as usize);
        Dyadic::new(scaled.ceil().to_integer(), -(bits as i64))
    }

    pub fn floor_int(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as usize
        } else {
            self.mant
                .div_floor(&(BigInt::one() << (-self.exp) as usize))
        }
    }

    /// Serialized form `m*2^e`.
    pub fn encode(&self) -> String {
        format!("{}*2^{}", self.mant, self.exp)
    }

    pub fn decode(s: &str) -> Result<Dyadic> {
        let (m, e) = s
            .split_once("*2^")
            .ok_or_else(|| Error::Parse(s.into(), "expected m*2^e".into()))?;
        let mant: BigInt = m
            .parse()
            .map_err(|e| Error::Parse(s.into(), format!("{e}")))?;
        let exp: i64 = e
            .parse()
            .map_err(|e| Error::Parse(s.into(), format!("{e}")))?;
        Ok(Dyadic::new(mant, exp))
    }

    /// Truncated decimal rendering with `digits` fractional digits.
    /// `RoundDir::Down` truncates toward -inf, `Up` toward +inf, so an
    /// interval rendered with (Down, Up) still encloses the value.
    pub fn to_decimal(&self, digits: u32, dir: RoundDir) -> String {
        let scale = BigInt::from(10u32).pow(digits);
        let scaled = if self.exp >= 0 {
            (&self.mant << self.exp as usize) * &scale
        } else {
            let num = &self.mant * &scale;
            let den: BigInt = BigInt::one() << (-self.exp) as usize;
            match dir {
                RoundDir::Down => num.div_floor(&den),
                RoundDir::Up => num.div_ceil(&den),
            }
        };
        let neg = scaled.is_negative();
        let digits_str = scaled.abs().to_string();
        let digits = digits as usize;
        let padded = if digits_str.len() <= digits {
            format!("0.{:0>width$}", digits_str, width = digits)
        } else {
            let (int_part, frac_part) = digits_str.split_at(digits_str.len() - digits);
            format!("{int_part}.{frac_part}")
        };
        if neg {
            format!("-{padded}")
        } else {
            padded
        }
    }

    /// Natural log as f64, valid far outside the f64 range.
    pub fn ln_f64(&self) -> f64 {
        assert!(self.mant.is_positive(), "ln of a non-positive dyadic");
        let bits = self.mant.bits() as i64;
        let top = if bits > 64 {
            (&self.mant >> (bits - 64) as usize).to_f64().unwrap()
        } else {
            self.mant.to_f64().unwrap()
        };
        let shift = if bits > 64 { bits - 64 } else { 0 };
        top.ln() + ((shift + self.exp) as f64) * std::f64::consts::LN_2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoundDir {
    Down,
    Up,
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.mant.sign(), other.mant.sign()) {
            (Sign::Minus, Sign::NoSign)
            | (Sign::Minus, Sign::Plus)
            | (Sign::NoSign, Sign::Plus) => return Ordering::Less,
            (Sign::Plus, Sign::NoSign)
            | (Sign::Plus, Sign::Minus)
            | (Sign::NoSign, Sign::Minus) => return Ordering::Greater,
            (Sign::NoSign, Sign::NoSign) => return Ordering::Equal,
            _ => {}
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as usize;
        let b = &other.mant << (other.exp - e) as usize;
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.encode())
    }
}

/// A certified enclosure `[lo, hi]` of a real number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicInterval {
    lo: Dyadic,
    hi: Dyadic,
}

impl DyadicInterval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        DyadicInterval { lo, hi }
    }

    pub fn point(v: Dyadic) -> Self {
        DyadicInterval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn zero() -> Self {
        Self::point(Dyadic::zero())
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn midpoint(&self) -> Dyadic {
        self.lo.add(&self.hi).mul_pow2(-1)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn add(&self, other: &DyadicInterval) -> DyadicInterval {
        DyadicInterval::new(self.lo.add(&other.lo), self.hi.add(&other.hi))
    }

    pub fn neg(&self) -> DyadicInterval {
        DyadicInterval::new(self.hi.neg(), self.lo.neg())
    }

    pub fn contains(&self, other: &DyadicInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn contains_ratio(&self, r: &BigRational) -> bool {
        self.lo.to_ratio() <= *r && *r <= self.hi.to_ratio()
    }

    /// Outward rounding of a rational interval to 2^-bits precision.
    pub fn from_ratio_bounds(lo: &BigRational, hi: &BigRational, bits: u32) -> DyadicInterval {
        DyadicInterval::new(
            Dyadic::from_ratio_floor(lo, bits),
            Dyadic::from_ratio_ceil(hi, bits),
        )
    }

    /// `[lo, hi]` entirely below `other`?
    pub fn strictly_below(&self, other: &DyadicInterval) -> bool {
        self.hi < other.lo
    }

    pub fn encode(&self) -> SerializedInterval {
        SerializedInterval {
            lo: self.lo.encode(),
            hi: self.hi.encode(),
            decimal: self.midpoint().to_decimal(24, RoundDir::Down),
        }
    }

    pub fn decode(s: &SerializedInterval) -> Result<DyadicInterval> {
        Ok(DyadicInterval::new(
            Dyadic::decode(&s.lo)?,
            Dyadic::decode(&s.hi)?,
        ))
    }
}

/// Wire form of an interval: exact endpoints plus a convenience decimal.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SerializedInterval {
    pub lo: String,
    pub hi: String,
    pub decimal: String,
}

/// Enclosure of sqrt(f) with width <= 2^-bits, from the integer square
/// root of f * 4^bits. Exact (a point) when f is a perfect square.
pub fn sqrt_enclosure(f: &BigUint, bits: u32) -> DyadicInterval {
    let scaled = f << (2 * bits as usize);
    let root = scaled.sqrt();
    let exact = &root * &root == scaled;
    let lo = Dyadic::new(BigInt::from(root.clone()), -(bits as i64));
    if exact {
        DyadicInterval::point(lo)
    } else {
        let hi = Dyadic::new(BigInt::from(root + 1u32), -(bits as i64));
        DyadicInterval::new(lo, hi)
    }
}

pub fn sqrt_enclosure_u64(f: u64, bits: u32) -> DyadicInterval {
    sqrt_enclosure(&BigUint::from(f), bits)
}

/// Enclosure of sqrt(r) for a nonnegative rational r: sqrt(p/q) = sqrt(pq)/q.
pub fn sqrt_ratio_enclosure(r: &BigRational, bits: u32) -> (BigRational, BigRational) {
    assert!(!r.is_negative(), "sqrt of a negative rational");
    let p = r.numer().to_biguint().unwrap();
    let q = r.denom().to_biguint().unwrap();
    let inner = sqrt_enclosure(&(&p * &q), bits);
    let den = BigRational::from_integer(BigInt::from(q));
    (
        inner.lo().to_ratio() / den.clone(),
        inner.hi().to_ratio() / den,
    )
}

/// A formal sum of terms `coeff * sqrt(radicand)` with rational coefficients
/// and nonnegative integer radicands. This is the common ground between
/// ring elements (radicands from the squarefree basis) and the verification
/// sums whose radicands are arbitrary integers.
#[derive(Clone, Debug)]
pub struct SqrtSum {
    terms: Vec<(BigRational, BigUint)>,
}

/// Floor plus a certified fractional enclosure.
#[derive(Clone, Debug)]
pub struct FracResult {
    pub int_part: BigInt,
    pub frac: DyadicInterval,
    /// True when the value is a rational integer, in which case `frac` is
    /// the exact point zero.
    pub exact: bool,
}

impl SqrtSum {
    pub fn new(terms: Vec<(BigRational, BigUint)>) -> Self {
        SqrtSum {
            terms: terms.into_iter().filter(|(c, _)| !c.is_zero()).collect(),
        }
    }

    pub fn terms(&self) -> &[(BigRational, BigUint)] {
        &self.terms
    }

    /// The exact rational value when every radicand is a perfect square.
    pub fn rational_value(&self) -> Option<BigRational> {
        let mut acc = BigRational::zero();
        for (c, f) in &self.terms {
            let root = f.sqrt();
            if &(&root * &root) != f {
                return None;
            }
            acc += c * BigRational::from_integer(BigInt::from(root));
        }
        Some(acc)
    }

    /// Exact rational enclosure at the given working precision.
    pub fn ratio_enclosure(&self, bits: u32) -> (BigRational, BigRational) {
        let mut lo = BigRational::zero();
        let mut hi = BigRational::zero();
        for (c, f) in &self.terms {
            let enc = sqrt_enclosure(f, bits);
            let (a, b) = (enc.lo().to_ratio(), enc.hi().to_ratio());
            if c.is_negative() {
                lo += c * b;
                hi += c * a;
            } else {
                lo += c * a;
                hi += c * b;
            }
        }
        (lo, hi)
    }

    /// Dyadic enclosure of the value; width shrinks like 2^-bits times the
    /// coefficient mass plus one rounding ulp per endpoint.
    pub fn eval_enclosure(&self, bits: u32) -> DyadicInterval {
        if self.terms.is_empty() {
            return DyadicInterval::zero();
        }
        let (lo, hi) = self.ratio_enclosure(bits);
        DyadicInterval::from_ratio_bounds(&lo, &hi, bits + 8)
    }

    /// Floor and fractional part, escalating precision until the floor is
    /// unambiguous and the fractional width is at most `target_width`.
    pub fn frac_enclosure(&self, target_width: &Dyadic, bit_budget: u32) -> Result<FracResult> {
        assert!(target_width.is_positive(), "target width must be positive");
        if let Some(v) = self.rational_value() {
            let fl = v.floor().to_integer();
            let frac = &v - BigRational::from_integer(fl.clone());
            if frac.is_zero() {
                return Ok(FracResult {
                    int_part: fl,
                    frac: DyadicInterval::zero(),
                    exact: true,
                });
            }
            // Choose precision fine enough for the requested width.
            let mut bits = INITIAL_BITS;
            loop {
                let enc = DyadicInterval::from_ratio_bounds(&frac, &frac, bits);
                if enc.width() <= *target_width {
                    return Ok(FracResult {
                        int_part: fl,
                        frac: enc,
                        exact: false,
                    });
                }
                bits *= 2;
            }
        }
        let mut bits = INITIAL_BITS;
        loop {
            let (lo, hi) = self.ratio_enclosure(bits);
            let fl_lo = lo.floor().to_integer();
            let fl_hi = hi.floor().to_integer();
            if fl_lo == fl_hi {
                let base = BigRational::from_integer(fl_lo.clone());
                let frac =
                    DyadicInterval::from_ratio_bounds(&(&lo - &base), &(&hi - &base), bits + 8);
                if frac.width() <= *target_width {
                    return Ok(FracResult {
                        int_part: fl_lo,
                        frac,
                        exact: false,
                    });
                }
            }
            if bits >= bit_budget {
                return Err(Error::PrecisionBudget { bits });
            }
            bits = (bits * 2).min(bit_budget);
        }
    }

    /// Certified distance to the nearest integer, width <= target_width.
    pub fn dist_to_int(&self, target_width: &Dyadic, bit_budget: u32) -> Result<DyadicInterval> {
        let fr = self.frac_enclosure(target_width, bit_budget)?;
        Ok(dist_from_frac(&fr.frac))
    }
}

/// Distance to the nearest integer given a fractional enclosure in [0, 1].
/// The tent map min(x, 1-x) is monotone on each half, so the image of an
/// interval is computed from its endpoints (capped at 1/2 when straddling).
pub fn dist_from_frac(frac: &DyadicInterval) -> DyadicInterval {
    let half = Dyadic::new(BigInt::one(), -1);
    let one = Dyadic::one();
    let g_lo = frac.lo().clone().min(one.sub(frac.lo()));
    let g_hi = frac.hi().clone().min(one.sub(frac.hi()));
    let (mut lo, mut hi) = if g_lo <= g_hi {
        (g_lo, g_hi)
    } else {
        (g_hi, g_lo)
    };
    if frac.lo() <= &half && &half <= frac.hi() {
        hi = half;
    }
    if lo.is_negative() {
        lo = Dyadic::zero();
    }
    DyadicInterval::new(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// |midpoint - v| <= width + 1e-6, i.e. the stated decimal is consistent
    /// with the enclosure.
    fn close(enc: &DyadicInterval, v: &BigRational) -> bool {
        let mid = enc.midpoint().to_ratio();
        let tol = enc.width().to_ratio() + rat(1, 1_000_000);
        (mid - v).abs() <= tol
    }

    #[test]
    fn sqrt_perfect_square_is_point() {
        let enc = sqrt_enclosure_u64(4, 13);
        assert!(enc.is_point());
        assert_eq!(enc.lo(), &Dyadic::from_int(2));
    }

    #[test]
    fn sqrt_two_enclosure() {
        let enc = sqrt_enclosure_u64(2, 20);
        let v = rat(141421356, 100000000); // 1.41421356
        assert!(enc.contains_ratio(&v));
        assert!(enc.width() <= Dyadic::pow2(-20));
    }

    #[test]
    fn sqrt_six_enclosure() {
        let enc = sqrt_enclosure_u64(6, 10);
        let v = rat(2449489, 1000000);
        assert!(enc.contains_ratio(&v));
        assert!(enc.width() <= Dyadic::pow2(-10));
    }

    #[test]
    fn frac_of_integer_is_exact() {
        let s = SqrtSum::new(vec![(rat(3, 1), BigUint::from(1u32))]);
        let fr = s
            .frac_enclosure(&Dyadic::pow2(-20), DEFAULT_BIT_BUDGET)
            .unwrap();
        assert!(fr.exact);
        assert_eq!(fr.int_part, BigInt::from(3));
        assert!(fr.frac.is_point() && fr.frac.lo().is_zero());
    }

    #[test]
    fn frac_of_non_integer_rational() {
        // 5/2: exact floor, point-like frac, but not flagged exact
        let s = SqrtSum::new(vec![(rat(5, 2), BigUint::from(1u32))]);
        let fr = s
            .frac_enclosure(&Dyadic::pow2(-20), DEFAULT_BIT_BUDGET)
            .unwrap();
        assert!(!fr.exact);
        assert_eq!(fr.int_part, BigInt::from(2));
        assert!(fr.frac.contains_ratio(&rat(1, 2)));
        assert!(!fr.frac.lo().is_negative());
    }

    #[test]
    fn frac_of_five_sqrt_two() {
        let s = SqrtSum::new(vec![(rat(5, 1), BigUint::from(2u32))]);
        let fr = s
            .frac_enclosure(&Dyadic::pow2(-20), DEFAULT_BIT_BUDGET)
            .unwrap();
        assert_eq!(fr.int_part, BigInt::from(7));
        assert!(close(&fr.frac, &rat(710678, 10000000)));
    }

    #[test]
    fn frac_of_negative_multiple() {
        // -2*sqrt(2) = -2.828..., floor -3, frac 0.1715729
        let s = SqrtSum::new(vec![(rat(-2, 1), BigUint::from(2u32))]);
        let fr = s
            .frac_enclosure(&Dyadic::pow2(-20), DEFAULT_BIT_BUDGET)
            .unwrap();
        assert_eq!(fr.int_part, BigInt::from(-3));
        assert!(close(&fr.frac, &rat(1715729, 10000000)));
    }

    #[test]
    fn dist_examples() {
        let w = Dyadic::pow2(-20);
        let s = SqrtSum::new(vec![(rat(3, 1), BigUint::from(1u32))]);
        let d = s.dist_to_int(&w, DEFAULT_BIT_BUDGET).unwrap();
        assert!(d.is_point() && d.lo().is_zero());

        let s = SqrtSum::new(vec![(rat(5, 1), BigUint::from(2u32))]);
        let d = s.dist_to_int(&w, DEFAULT_BIT_BUDGET).unwrap();
        assert!(close(&d, &rat(710678, 10000000)));

        let s = SqrtSum::new(vec![(rat(2, 1), BigUint::from(2u32))]);
        let d = s.dist_to_int(&w, DEFAULT_BIT_BUDGET).unwrap();
        assert!(close(&d, &rat(1715729, 10000000)));
    }

    #[test]
    fn decimal_rendering_truncates_outward() {
        let d = Dyadic::new(BigInt::from(3), -2); // 0.75
        assert_eq!(d.to_decimal(3, RoundDir::Down), "0.750");
        let d = Dyadic::new(BigInt::from(1), -6); // 0.015625
        assert_eq!(d.to_decimal(3, RoundDir::Down), "0.015");
        assert_eq!(d.to_decimal(3, RoundDir::Up), "0.016");
        let d = Dyadic::new(BigInt::from(-1), -6);
        assert_eq!(d.to_decimal(3, RoundDir::Down), "-0.016");
    }

    #[test]
    fn dyadic_roundtrip() {
        let d = Dyadic::new(BigInt::from(-12345), -17);
        assert_eq!(Dyadic::decode(&d.encode()).unwrap(), d);
    }

    proptest! {
        #[test]
        fn containment_under_refinement(
            coeffs in proptest::collection::vec(-50i64..50, 1..4),
            bits in 16u32..48,
        ) {
            let rads = [2u32, 3, 6];
            let terms: Vec<_> = coeffs
                .iter()
                .zip(rads.iter())
                .map(|(c, f)| (BigRational::from_i64(*c).unwrap(), BigUint::from(*f)))
                .collect();
            let n_terms = terms.len() as i64;
            let s = SqrtSum::new(terms);
            let coarse = s.eval_enclosure(bits);
            let fine = s.eval_enclosure(bits * 2);
            // widen the coarse interval by one bits-ulp per term + rounding
            let slack = Dyadic::pow2(-(bits as i64)).mul(&Dyadic::from_int(n_terms + 2));
            let widened = DyadicInterval::new(
                coarse.lo().sub(&slack),
                coarse.hi().add(&slack),
            );
            prop_assert!(widened.contains(&fine));
        }

        #[test]
        fn dist_is_symmetric(coeffs in proptest::collection::vec(-30i64..30, 3)) {
            let rads = [2u32, 3, 6];
            let terms: Vec<_> = coeffs
                .iter()
                .zip(rads.iter())
                .map(|(c, f)| (BigRational::from_i64(*c).unwrap(), BigUint::from(*f)))
                .collect();
            let neg_terms: Vec<_> = terms
                .iter()
                .map(|(c, f)| (-c.clone(), f.clone()))
                .collect();
            let w = Dyadic::pow2(-30);
            let d1 = SqrtSum::new(terms).dist_to_int(&w, DEFAULT_BIT_BUDGET).unwrap();
            let d2 = SqrtSum::new(neg_terms).dist_to_int(&w, DEFAULT_BIT_BUDGET).unwrap();
            // both enclose the same value, so they must overlap
            prop_assert!(d1.lo() <= d2.hi() && d2.lo() <= d1.hi());
        }

        #[test]
        fn frac_matches_eval(coeffs in proptest::collection::vec(-20i64..20, 3)) {
            let rads = [2u32, 3, 6];
            let terms: Vec<_> = coeffs
                .iter()
                .zip(rads.iter())
                .map(|(c, f)| (BigRational::from_i64(*c).unwrap(), BigUint::from(*f)))
                .collect();
            let s = SqrtSum::new(terms);
            let fr = s.frac_enclosure(&Dyadic::pow2(-40), DEFAULT_BIT_BUDGET).unwrap();
            let ev = s.eval_enclosure(64);
            let mid = fr.frac.midpoint().add(&Dyadic::from_bigint(fr.int_part.clone()));
            let diff = mid.sub(&ev.midpoint()).abs();
            prop_assert!(diff <= fr.frac.width().add(&ev.width()));
        }
    }
}
