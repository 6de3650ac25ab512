//! Exact rational asymptotic expansions in powers of 1/n.
//!
//! The objects here are finite maps degree -> coefficient covering degrees
//! -1..=T (so a series can carry an `l_{-1} * n` term), together with an
//! explicit truncation order: coefficients beyond degree T are dropped and
//! the represented function is exact up to O(n^{-T-1}).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::eval::sqrt_ratio_enclosure;

pub type Rat = BigRational;

/// l_{-1} n + l_0 + sum_{t=1..T} l_t / n^t, exact to O(n^{-T-1}).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    trunc: i64,
    coeffs: BTreeMap<i64, Rat>,
}

impl TruncatedSeries {
    pub fn zero(trunc: i64) -> Self {
        assert!(trunc >= 1);
        TruncatedSeries {
            trunc,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    /// The order of the first dropped term.
    pub fn tail_order(&self) -> i64 {
        self.trunc + 1
    }

    pub fn coeff(&self, degree: i64) -> Rat {
        self.coeffs.get(&degree).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn set_coeff(&mut self, degree: i64, value: Rat) {
        assert!((-1..=self.trunc).contains(&degree), "degree out of range");
        if value.is_zero() {
            self.coeffs.remove(&degree);
        } else {
            self.coeffs.insert(degree, value);
        }
    }

    pub fn add_coeff(&mut self, degree: i64, value: &Rat) {
        if degree > self.trunc {
            return; // beyond the tracked order, absorbed by the tail
        }
        let v = self.coeff(degree) + value;
        self.set_coeff(degree, v);
    }

    /// Degreewise sum; the result carries the weaker (smaller) truncation.
    pub fn add(&self, other: &Self) -> Self {
        let trunc = self.trunc.min(other.trunc);
        let mut out = TruncatedSeries::zero(trunc);
        for (d, c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            if *d <= trunc {
                out.add_coeff(*d, c);
            }
        }
        out
    }

    pub fn scale(&self, s: &Rat) -> Self {
        let mut out = TruncatedSeries::zero(self.trunc);
        for (d, c) in &self.coeffs {
            out.set_coeff(*d, c * s);
        }
        out
    }

    /// Evaluate the truncation at a concrete n, exactly.
    pub fn eval_at(&self, n: u64) -> Rat {
        let n = Rat::from_integer(BigInt::from(n));
        let mut acc = Rat::zero();
        for (d, c) in &self.coeffs {
            let pow = match *d {
                -1 => n.clone(),
                0 => Rat::one(),
                t => Rat::one() / pow_rat(&n, t as u32),
            };
            acc += c * pow;
        }
        acc
    }
}

pub(crate) fn pow_rat(x: &Rat, e: u32) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// Iterated forward difference of R(n) = 1/n:
/// the j-th difference at n, computed by the defining recursion.
pub fn delta_r(j: u32, n: u64) -> Rat {
    assert!(j >= 1 && n >= 1);
    let mut row: Vec<Rat> = (0..j)
        .map(|m| Rat::new(BigInt::one(), BigInt::from(n + m as u64)))
        .collect();
    while row.len() > 1 {
        row = row.windows(2).map(|w| &w[0] - &w[1]).collect();
    }
    row.pop().unwrap()
}

/// Closed form (j-1)! / prod_{m=0}^{j-1} (n+m); the independent check for
/// `delta_r` used by tests.
pub fn delta_r_closed(j: u32, n: u64) -> Rat {
    let mut num = BigInt::one();
    for i in 1..j as u64 {
        num *= BigInt::from(i);
    }
    let mut den = BigInt::one();
    for m in 0..j as u64 {
        den *= BigInt::from(n + m);
    }
    Rat::new(num, den)
}

/// Expansion coefficients of the j-th difference of 1/n:
/// (j-1)!/prod(n+m) = sum_t K(j,t) / n^{j+t} + O(n^{-j-T-1}).
/// Computed by multiplying the truncated geometric expansions of
/// (1 + m/n)^{-1}; K(j,0) = (j-1)!.
pub fn k_coeffs(j: u32, t_max: u32) -> Vec<Rat> {
    let t_max = t_max as usize;
    // polynomial in x = 1/n, truncated at degree t_max
    let mut poly = vec![Rat::zero(); t_max + 1];
    poly[0] = Rat::one();
    for m in 1..j as i64 {
        let mut next = vec![Rat::zero(); t_max + 1];
        for (a, ca) in poly.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            let mut mw = Rat::one();
            for w in 0..=(t_max - a) {
                next[a + w] += ca * &mw;
                mw *= Rat::from_integer(BigInt::from(-m));
            }
        }
        poly = next;
    }
    let mut fact = Rat::one();
    for i in 1..j as u64 {
        fact *= Rat::from_integer(BigInt::from(i));
    }
    poly.into_iter().map(|c| c * &fact).collect()
}

/// Generalized binomial coefficient binom(1/2, w): the w-th Taylor
/// coefficient of sqrt(1+x). C_0 = 1, C_1 = 1/2, C_2 = -1/8, ...
pub fn c_coeff(w: u32) -> Rat {
    let mut acc = Rat::one();
    for i in 0..w as i64 {
        let num = Rat::new(BigInt::one(), BigInt::from(2)) - Rat::from_integer(BigInt::from(i));
        acc *= num / Rat::from_integer(BigInt::from(i + 1));
    }
    acc
}

/// Recentering coefficients: 1/(n+d)^t = sum_q P(t,d,q)/n^{t+q} + O(...),
/// with P(t,d,q) = (-1)^q binom(t+q-1, q) d^q.
pub fn p_coeffs(t: u32, d: i64, h_max: u32) -> Vec<Rat> {
    (0..=h_max as u64)
        .map(|q| {
            let sign = if q % 2 == 1 { -1 } else { 1 };
            let mut c = Rat::from_integer(binomial(t as u64 + q - 1, q) * BigInt::from(sign));
            for _ in 0..q {
                c *= Rat::from_integer(BigInt::from(d));
            }
            c
        })
        .collect()
}

/// A single term a * sqrt((n + shift)^2 + offset) with rational a > 0 and
/// rational offset != 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqrtTerm {
    pub coeff: Rat,
    pub shift: u32,
    pub offset: Rat,
}

impl SqrtTerm {
    pub fn new(coeff: Rat, shift: u32, offset: Rat) -> Self {
        assert!(coeff.is_positive(), "outer coefficient must be positive");
        assert!(!offset.is_zero(), "offset must be nonzero");
        let at_one = Rat::from_integer(BigInt::from((1 + shift as u64) * (1 + shift as u64)))
            + offset.clone();
        assert!(
            !at_one.is_negative(),
            "radicand must be nonnegative for n >= 1"
        );
        SqrtTerm {
            coeff,
            shift,
            offset,
        }
    }

    /// Exact enclosure of the value at a concrete n (for faithfulness tests).
    pub fn eval_at(&self, n: u64, bits: u32) -> (Rat, Rat) {
        let base = Rat::from_integer(BigInt::from(n + self.shift as u64));
        let rad = &base * &base + self.offset.clone();
        let (lo, hi) = sqrt_ratio_enclosure(&rad, bits);
        (self.coeff.clone() * lo, self.coeff.clone() * hi)
    }
}

/// Exact truncated expansion of a*sqrt((n+d)^2+c) in powers of 1/n:
/// expand at n+d with the binomial series for sqrt(1+x), then recenter
/// every (n+d)^{-t} with `p_coeffs`, keeping degrees through `trunc`.
pub fn sqrt_term_series(term: &SqrtTerm, trunc: i64) -> TruncatedSeries {
    assert!(trunc >= 1);
    let mut out = TruncatedSeries::zero(trunc);
    let d = term.shift as i64;
    // a*(n+d) contributes exactly
    out.add_coeff(-1, &term.coeff);
    out.add_coeff(
        0,
        &(term.coeff.clone() * Rat::from_integer(BigInt::from(d))),
    );
    // a * C_w c^w (n+d)^{-(2w-1)} for 2w-1 <= trunc
    let mut c_pow = Rat::one();
    for w in 1..=((trunc + 1) / 2) as u32 {
        c_pow *= &term.offset;
        let t = 2 * w - 1;
        let outer = term.coeff.clone() * c_coeff(w) * &c_pow;
        let ps = p_coeffs(t, d, (trunc - t as i64) as u32);
        for (q, p) in ps.iter().enumerate() {
            out.add_coeff(t as i64 + q as i64, &(outer.clone() * p));
        }
    }
    out
}

/// Degreewise sum of the expansions of several terms.
pub fn series_sum(terms: &[SqrtTerm], trunc: i64) -> TruncatedSeries {
    let mut acc = TruncatedSeries::zero(trunc);
    for t in terms {
        acc = acc.add(&sqrt_term_series(t, trunc));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_r(1, 7), rat(1, 7));
        assert_eq!(delta_r(2, 3), rat(1, 12));
        assert_eq!(delta_r(3, 2), rat(1, 12));
    }

    #[test]
    fn delta_matches_closed_form() {
        for j in 1..=6 {
            for n in 1..=40 {
                assert_eq!(delta_r(j, n), delta_r_closed(j, n), "j={j} n={n}");
            }
        }
    }

    #[test]
    fn k_examples() {
        assert_eq!(
            k_coeffs(1, 3),
            vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1)]
        );
        assert_eq!(
            k_coeffs(2, 4),
            vec![rat(1, 1), rat(-1, 1), rat(1, 1), rat(-1, 1), rat(1, 1)]
        );
        let k3 = k_coeffs(3, 1);
        assert_eq!(k3[0], rat(2, 1));
        assert_eq!(k3[1], rat(-6, 1));
    }

    #[test]
    fn c_examples() {
        assert_eq!(c_coeff(0), rat(1, 1));
        assert_eq!(c_coeff(1), rat(1, 2));
        assert_eq!(c_coeff(2), rat(-1, 8));
        assert_eq!(c_coeff(3), rat(1, 16));
        assert_eq!(c_coeff(4), rat(-5, 128));
    }

    #[test]
    fn p_examples() {
        for t in 1..=5u32 {
            for d in -5..=5i64 {
                let ps = p_coeffs(t, d, 1);
                assert_eq!(ps[0], rat(1, 1));
                assert_eq!(ps[1], rat(-d * t as i64, 1));
            }
        }
        assert_eq!(p_coeffs(2, 1, 2)[2], rat(3, 1));
        assert_eq!(p_coeffs(3, 2, 1)[1], rat(-6, 1));
    }

    /// Expanding 1/prod(n+m) by repeated recentering multiplications must
    /// reproduce k_coeffs exactly.
    #[test]
    fn k_cross_check_via_p() {
        for j in 2..=5u32 {
            let t_max = 4usize;
            let mut poly = vec![Rat::zero(); t_max + 1];
            poly[0] = Rat::one();
            for m in 1..j as i64 {
                // 1/(n+m) = n^{-1} * sum_q P(1,m,q) n^{-q}; the leading
                // n^{-1} factors combine into the overall n^{-j}
                let ps = p_coeffs(1, m, t_max as u32);
                let mut next = vec![Rat::zero(); t_max + 1];
                for (a, ca) in poly.iter().enumerate() {
                    if ca.is_zero() {
                        continue;
                    }
                    for (b, cb) in ps.iter().enumerate() {
                        if a + b <= t_max {
                            next[a + b] += ca * cb;
                        }
                    }
                }
                poly = next;
            }
            let mut fact = Rat::one();
            for i in 1..j as u64 {
                fact *= Rat::from_integer(BigInt::from(i));
            }
            let expect = k_coeffs(j, t_max as u32);
            for (t, e) in expect.iter().enumerate() {
                assert_eq!(&(poly[t].clone() * &fact), e, "j={j} t={t}");
            }
        }
    }

    #[test]
    fn sqrt_series_examples() {
        // sqrt(n^2+1), T=3 -> n + (1/2)/n - (1/8)/n^3
        let t = SqrtTerm::new(rat(1, 1), 0, rat(1, 1));
        let s = sqrt_term_series(&t, 3);
        assert_eq!(s.coeff(-1), rat(1, 1));
        assert_eq!(s.coeff(0), rat(0, 1));
        assert_eq!(s.coeff(1), rat(1, 2));
        assert_eq!(s.coeff(2), rat(0, 1));
        assert_eq!(s.coeff(3), rat(-1, 8));

        // 2v*sqrt(n^2+1/v) with v=8 -> 16n + 1/n - (1/32)/n^3
        let t = SqrtTerm::new(rat(16, 1), 0, rat(1, 8));
        let s = sqrt_term_series(&t, 3);
        assert_eq!(s.coeff(-1), rat(16, 1));
        assert_eq!(s.coeff(1), rat(1, 1));
        assert_eq!(s.coeff(3), rat(-1, 32));

        // sqrt((n+1)^2+1), T=2 -> n + 1 + (1/2)/n - (1/2)/n^2
        let t = SqrtTerm::new(rat(1, 1), 1, rat(1, 1));
        let s = sqrt_term_series(&t, 2);
        assert_eq!(s.coeff(-1), rat(1, 1));
        assert_eq!(s.coeff(0), rat(1, 1));
        assert_eq!(s.coeff(1), rat(1, 2));
        assert_eq!(s.coeff(2), rat(-1, 2));
    }

    #[test]
    fn series_sum_examples() {
        let empty = series_sum(&[], 3);
        assert_eq!(empty, TruncatedSeries::zero(3));

        // sqrt(n^2+1) + sqrt(n^2-1) = 2n - (1/4)/n^3 + O(n^-5)
        let terms = [
            SqrtTerm::new(rat(1, 1), 0, rat(1, 1)),
            SqrtTerm::new(rat(1, 1), 0, rat(-1, 1)),
        ];
        let s = series_sum(&terms, 3);
        assert_eq!(s.coeff(-1), rat(2, 1));
        assert_eq!(s.coeff(1), rat(0, 1));
        assert_eq!(s.coeff(3), rat(-1, 4));

        let single = [SqrtTerm::new(rat(16, 1), 0, rat(1, 8))];
        assert_eq!(series_sum(&single, 3), sqrt_term_series(&single[0], 3));
    }

    /// Telescoping: the expansion of D_m(n) - D_m(n+1) equals the expansion
    /// of D_{m+1}(n) through the common order.
    #[test]
    fn telescoping_consistency() {
        let t_max = 4u32;
        for m in 1..=4u32 {
            let km = k_coeffs(m, t_max + 1);
            let km1 = k_coeffs(m + 1, t_max);
            let top = (m + t_max + 1) as i64;
            let mut diff: BTreeMap<i64, Rat> = BTreeMap::new();
            for (t, k) in km.iter().enumerate() {
                let deg0 = m as i64 + t as i64;
                // D_m(n) contributes at deg0; D_m(n+1) recentres onto n
                *diff.entry(deg0).or_insert_with(Rat::zero) += k;
                let ps = p_coeffs(deg0 as u32, 1, (top - deg0) as u32);
                for (q, p) in ps.iter().enumerate() {
                    *diff.entry(deg0 + q as i64).or_insert_with(Rat::zero) -= k * p;
                }
            }
            for (t, k) in km1.iter().enumerate() {
                let deg = (m + 1) as i64 + t as i64;
                let got = diff.get(&deg).cloned().unwrap_or_else(Rat::zero);
                assert_eq!(&got, k, "m={m} deg={deg}");
            }
        }
    }

    /// |true value - series(n)| * n^{T+1} must stay near |l_{T+1}|.
    #[test]
    fn series_faithfulness() {
        let cases = [
            SqrtTerm::new(rat(1, 1), 0, rat(1, 1)),
            SqrtTerm::new(rat(16, 1), 0, rat(1, 8)),
            SqrtTerm::new(rat(3, 2), 2, rat(-2, 3)),
        ];
        for term in &cases {
            let t_ord = 3i64;
            let s = sqrt_term_series(term, t_ord);
            let ext = sqrt_term_series(term, t_ord + 1);
            let lead = ext.coeff(t_ord + 1).abs();
            for n in [10u64, 20, 40, 80, 160] {
                let (lo, hi) = term.eval_at(n, 128);
                let approx = s.eval_at(n);
                let err_lo = (lo - &approx).abs();
                let err_hi = (hi - &approx).abs();
                let err = if err_lo > err_hi { err_lo } else { err_hi };
                let scaled = err * pow_rat(&Rat::from_integer(BigInt::from(n)), (t_ord + 1) as u32);
                let bound = lead.clone() * rat(2, 1) + rat(1, 1);
                assert!(scaled <= bound, "n={n} scaled={scaled} bound={bound}");
            }
        }
    }
}
