//! Exact arithmetic in Z[sqrt(p_1), ..., sqrt(p_tau)] and its fraction field.
//!
//! Elements are coordinate vectors over the 2^tau square roots of the
//! squarefree divisors of p_1 * ... * p_tau. Those square roots are linearly
//! independent over Q, so the coordinates are unique and equality is
//! coefficientwise.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::SqrtSum;

/// Hard cap on the number of primes; searches downstream scale as
/// n^(2^tau - 1), so larger values are far beyond desk scale anyway.
pub const MAX_TAU: u32 = 6;

const PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

/// The first `tau` primes together with the 2^tau squarefree products that
/// index coordinates, plus the precomputed product table
/// sqrt(f) * sqrt(g) = gcd(f,g) * sqrt(fg / gcd(f,g)^2).
#[derive(Debug)]
pub struct Basis {
    tau: u32,
    primes: Vec<u64>,
    products: Vec<u64>,
    // mult[i * len + j] = (index of the product radicand, integer factor)
    mult: Vec<(u32, u64)>,
}

impl PartialEq for Basis {
    fn eq(&self, other: &Self) -> bool {
        self.tau == other.tau
    }
}

impl Basis {
    pub fn new(tau: u32) -> Result<Arc<Basis>> {
        if !(1..=MAX_TAU).contains(&tau) {
            return Err(Error::TauOutOfRange(tau));
        }
        let primes: Vec<u64> = PRIMES[..tau as usize].to_vec();
        let mut products = vec![1u64];
        for &p in &primes {
            let more: Vec<u64> = products.iter().map(|q| p * q).collect();
            products.extend(more);
        }
        products.sort_unstable();
        let len = products.len();
        let index_of = |f: u64| products.binary_search(&f).unwrap() as u32;
        let mut mult = Vec::with_capacity(len * len);
        for &f in &products {
            for &g in &products {
                let d = gcd(f, g);
                mult.push((index_of(f / d * (g / d)), d));
            }
        }
        Ok(Arc::new(Basis {
            tau,
            primes,
            products,
            mult,
        }))
    }

    pub fn tau(&self) -> u32 {
        self.tau
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// All squarefree divisors of p_1 ... p_tau, ascending; first entry is 1.
    pub fn products(&self) -> &[u64] {
        &self.products
    }

    /// The products without 1.
    pub fn starred(&self) -> &[u64] {
        &self.products[1..]
    }

    /// Number of coordinates, 2^tau.
    pub fn dim(&self) -> usize {
        self.products.len()
    }

    pub fn index_of(&self, f: u64) -> Option<usize> {
        self.products.binary_search(&f).ok()
    }

    pub fn radical(&self) -> u64 {
        self.primes.iter().product()
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Scalar abstraction shared by integer and rational coordinates.
pub trait Coeff:
    Clone + PartialEq + Eq + PartialOrd + Ord + Zero + One + Signed + fmt::Display + fmt::Debug
{
    fn from_u64(v: u64) -> Self;
    fn parse(s: &str) -> Result<Self>;
}

impl Coeff for BigInt {
    fn from_u64(v: u64) -> Self {
        BigInt::from(v)
    }
    fn parse(s: &str) -> Result<Self> {
        s.parse()
            .map_err(|e| Error::Parse(s.into(), format!("{e}")))
    }
}

impl Coeff for BigRational {
    fn from_u64(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn parse(s: &str) -> Result<Self> {
        s.parse()
            .map_err(|e| Error::Parse(s.into(), format!("{e}")))
    }
}

/// An element of the multiquadratic ring/field, stored as a dense
/// coordinate vector aligned with `basis.products()`.
#[derive(Clone)]
pub struct Elem<S: Coeff> {
    basis: Arc<Basis>,
    coeffs: Vec<S>,
}

pub type QuadInt = Elem<BigInt>;
pub type QuadRat = Elem<BigRational>;

impl<S: Coeff> PartialEq for Elem<S> {
    fn eq(&self, other: &Self) -> bool {
        self.basis.tau == other.basis.tau && self.coeffs == other.coeffs
    }
}

impl<S: Coeff> Eq for Elem<S> {}

impl<S: Coeff> fmt::Debug for Elem<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl<S: Coeff> fmt::Display for Elem<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let rad = self.basis.products[i];
            if rad == 1 {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})*sqrt({rad})")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<S: Coeff> Elem<S> {
    pub fn zero(basis: &Arc<Basis>) -> Self {
        Elem {
            basis: basis.clone(),
            coeffs: vec![S::zero(); basis.dim()],
        }
    }

    /// The element c * sqrt(f).
    pub fn from_term(basis: &Arc<Basis>, f: u64, c: S) -> Result<Self> {
        let idx = basis
            .index_of(f)
            .ok_or_else(|| Error::Usage(format!("{f} is not a basis radicand")))?;
        let mut e = Self::zero(basis);
        e.coeffs[idx] = c;
        Ok(e)
    }

    pub fn from_coeffs(basis: &Arc<Basis>, coeffs: Vec<S>) -> Result<Self> {
        if coeffs.len() != basis.dim() {
            return Err(Error::Usage(format!(
                "expected {} coordinates, got {}",
                basis.dim(),
                coeffs.len()
            )));
        }
        Ok(Elem {
            basis: basis.clone(),
            coeffs,
        })
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, f: u64) -> Option<&S> {
        self.basis.index_of(f).map(|i| &self.coeffs[i])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Zero coordinate on every irrational sqrt(f).
    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// Nonzero, and zero coordinate on 1 (the set S_tau^* of the search
    /// modules).
    pub fn is_pure_irrational(&self) -> bool {
        self.coeffs[0].is_zero() && !self.is_zero()
    }

    fn check_same_basis(&self, other: &Self) -> Result<()> {
        if self.basis.tau != other.basis.tau {
            return Err(Error::BasisMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_basis(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Ok(Elem {
            basis: self.basis.clone(),
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_basis(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        Ok(Elem {
            basis: self.basis.clone(),
            coeffs,
        })
    }

    pub fn neg(&self) -> Self {
        Elem {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        Elem {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_basis(other)?;
        let len = self.basis.dim();
        let mut out = vec![S::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let (k, factor) = self.basis.mult[i * len + j];
                let term = a.clone() * b.clone() * S::from_u64(factor);
                out[k as usize] = out[k as usize].clone() + term;
            }
        }
        Ok(Elem {
            basis: self.basis.clone(),
            coeffs: out,
        })
    }

    /// max_f |c_f|
    pub fn height(&self) -> S {
        let mut m = S::zero();
        for c in &self.coeffs {
            let a = c.abs();
            if a > m {
                m = a;
            }
        }
        m
    }

    /// Applies the field automorphism sending sqrt(p_j) to -sqrt(p_j) for
    /// each j with s[j] set.
    pub fn galois_conjugate(&self, s: &[bool]) -> Result<Self> {
        if s.len() != self.basis.tau as usize {
            return Err(Error::SignVectorLength {
                expected: self.basis.tau as usize,
                got: s.len(),
            });
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let f = self.basis.products[i];
                let flips = self
                    .basis
                    .primes
                    .iter()
                    .zip(s)
                    .filter(|(p, &b)| b && f.is_multiple_of(**p))
                    .count();
                if flips % 2 == 1 {
                    -c.clone()
                } else {
                    c.clone()
                }
            })
            .collect();
        Ok(Elem {
            basis: self.basis.clone(),
            coeffs,
        })
    }

    /// Flip the overall sign so the first nonzero coordinate is positive.
    /// Identity for zero.
    pub fn sign_canonical(&self) -> Self {
        for c in &self.coeffs {
            if c.is_zero() {
                continue;
            }
            return if c.is_negative() {
                self.neg()
            } else {
                self.clone()
            };
        }
        self.clone()
    }

    /// Lexicographic order on coordinate vectors (products ascending).
    pub fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.coeffs.cmp(&other.coeffs)
    }

    pub fn to_json(&self) -> ElemJson {
        let mut coeffs = BTreeMap::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                coeffs.insert(self.basis.products[i].to_string(), c.to_string());
            }
        }
        ElemJson {
            tau: self.basis.tau,
            coeffs,
        }
    }

    pub fn from_json(json: &ElemJson) -> Result<Self> {
        let basis = Basis::new(json.tau)?;
        let mut e = Self::zero(&basis);
        for (k, v) in &json.coeffs {
            let f: u64 = k
                .parse()
                .map_err(|err| Error::Parse(k.clone(), format!("{err}")))?;
            let idx = basis
                .index_of(f)
                .ok_or_else(|| Error::Parse(k.clone(), "not a basis radicand".into()))?;
            e.coeffs[idx] = S::parse(v)?;
        }
        Ok(e)
    }
}

/// Coefficientwise linear combination; all elements must share one basis.
pub fn linear_combine<S: Coeff>(terms: &[(S, &Elem<S>)]) -> Result<Elem<S>> {
    let first = terms
        .first()
        .ok_or_else(|| Error::Usage("empty linear combination".into()))?;
    let mut acc = Elem::zero(first.1.basis());
    for (s, e) in terms {
        acc = acc.add(&e.scale(s))?;
    }
    Ok(acc)
}

impl QuadInt {
    pub fn to_rat(&self) -> QuadRat {
        Elem {
            basis: self.basis.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        }
    }

    /// Product of all 2^tau Galois conjugates, computed in the ring. The
    /// result is Galois-invariant, hence a rational integer.
    pub fn field_norm(&self) -> Result<BigInt> {
        let tau = self.basis.tau;
        let mut acc: Option<QuadInt> = None;
        for mask in 0u32..(1 << tau) {
            let s: Vec<bool> = (0..tau).map(|j| mask >> j & 1 == 1).collect();
            let conj = self.galois_conjugate(&s)?;
            acc = Some(match acc {
                None => conj,
                Some(a) => a.mul(&conj)?,
            });
        }
        let prod = acc.unwrap();
        if !prod.is_rational() {
            return Err(Error::Internal(
                "conjugate product has an irrational coordinate".into(),
            ));
        }
        Ok(prod.coeffs[0].clone())
    }
}

impl QuadRat {
    /// Exact conversion when every coordinate is an integer.
    pub fn to_int(&self) -> Option<QuadInt> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            if !c.denom().is_one() {
                return None;
            }
            out.push(c.numer().clone());
        }
        Some(Elem {
            basis: self.basis.clone(),
            coeffs: out,
        })
    }

    /// Lower the element into the generic sqrt-sum evaluator.
    pub fn to_sqrt_sum(&self) -> SqrtSum {
        SqrtSum::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (c.clone(), self.basis.products[i].into()))
                .collect(),
        )
    }
}

/// Wire format: radicand -> decimal coefficient string, zeros omitted.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ElemJson {
    pub tau: u32,
    pub coeffs: BTreeMap<String, String>,
}
