//! Matched plus/minus sums of perturbed square roots.
//!
//! A level-h pair is two sums of h terms a_j * sqrt((n+j-1)^2 +- 1/v) whose
//! expansions vanish through degree h-1, carry opposite leading
//! coefficients +-(h-1)! at degree h, and track the expansion of the h-th
//! difference of 1/n within eps through degree h+T. Pairs are built
//! recursively: interleaving a level-m pair at consecutive arguments
//! cancels one more degree, and an exact rescale restores the leading
//! coefficient. All checks are exact rational comparisons.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{Dyadic, DyadicInterval, SqrtSum};
use crate::series::{k_coeffs, series_sum, Rat, SqrtTerm, TruncatedSeries};

/// Which sign the leading perturbation takes: `Plus` means the j-th term
/// carries (-1)^(j-1)/v, `Minus` the opposite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignClass {
    Plus,
    Minus,
}

impl SignClass {
    fn offset(self, v: u64, index: usize) -> Rat {
        let base = Rat::new(BigInt::one(), BigInt::from(v));
        let flip = match self {
            SignClass::Plus => !index.is_multiple_of(2),
            SignClass::Minus => index.is_multiple_of(2),
        };
        if flip {
            -base
        } else {
            base
        }
    }
}

/// sum_j a_j sqrt((n+j-1)^2 + (+-1/v)) with shifts 0..h-1 determined by
/// position, so the shape invariants hold by construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqrtSumExpr {
    pub v: u64,
    pub sign: SignClass,
    /// Outer coefficients a_1..a_h, all positive.
    pub coeffs: Vec<Rat>,
}

impl SqrtSumExpr {
    pub fn new(v: u64, sign: SignClass, coeffs: Vec<Rat>) -> Self {
        assert!(v >= 1);
        assert!(!coeffs.is_empty());
        assert!(coeffs.iter().all(|a| a.is_positive()));
        SqrtSumExpr { v, sign, coeffs }
    }

    pub fn level(&self) -> usize {
        self.coeffs.len()
    }

    pub fn terms(&self) -> Vec<SqrtTerm> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, a)| SqrtTerm::new(a.clone(), j as u32, self.sign.offset(self.v, j)))
            .collect()
    }

    pub fn series(&self, trunc: i64) -> TruncatedSeries {
        series_sum(&self.terms(), trunc)
    }

    /// Exact enclosure of the value at n (all radicands are rational).
    pub fn eval_at(&self, n: u64, bits: u32) -> (Rat, Rat) {
        let mut lo = Rat::zero();
        let mut hi = Rat::zero();
        for t in self.terms() {
            let (a, b) = t.eval_at(n, bits);
            lo += a;
            hi += b;
        }
        (lo, hi)
    }
}

/// Exact margins of the four pair conditions.
#[derive(Clone, Debug)]
pub struct PairChecks {
    /// l_q = 0 for q = 1..h-1, on both elements.
    pub cancellation_ok: bool,
    /// l_h(plus) = (h-1)! = -l_h(minus), exactly.
    pub leading_ok: bool,
    /// |l_{h+q}(plus) - K(h,q)| for q = 1..T.
    pub margins_plus: Vec<Rat>,
    /// |l_{h+q}(minus) + K(h,q)| for q = 1..T.
    pub margins_minus: Vec<Rat>,
}

impl PairChecks {
    pub fn max_margin(&self) -> Rat {
        self.margins_plus
            .iter()
            .chain(self.margins_minus.iter())
            .cloned()
            .max()
            .unwrap_or_else(Rat::zero)
    }

    pub fn passed(&self, eps: &Rat) -> bool {
        self.cancellation_ok && self.leading_ok && self.max_margin() <= *eps
    }
}

/// A verified pair together with the series both conditions were read from.
#[derive(Clone, Debug)]
pub struct PairCert {
    pub plus: SqrtSumExpr,
    pub minus: SqrtSumExpr,
    pub t_order: u32,
    pub eps: Rat,
    pub level: u32,
    pub series_plus: TruncatedSeries,
    pub series_minus: TruncatedSeries,
    pub checks: PairChecks,
}

/// Outcome of the base construction: either a certificate or the exact
/// margin by which the candidate v fails.
#[derive(Clone, Debug)]
pub enum BasePairOutcome {
    Pair(Box<PairCert>),
    TooSmall { margin: Rat },
}

/// Evaluate the four pair conditions exactly.
pub fn is_pair(
    plus: &SqrtSumExpr,
    minus: &SqrtSumExpr,
    t_order: u32,
    eps: &Rat,
    level: u32,
) -> (bool, PairChecks) {
    let h = level as i64;
    let trunc = h + t_order as i64;
    let sp = plus.series(trunc);
    let sm = minus.series(trunc);
    let ks = k_coeffs(level, t_order);
    let cancellation_ok = (1..h).all(|q| sp.coeff(q).is_zero() && sm.coeff(q).is_zero());
    let leading_ok = sp.coeff(h) == ks[0] && sm.coeff(h) == -ks[0].clone();
    let margins_plus: Vec<Rat> = (1..=t_order as usize)
        .map(|q| (sp.coeff(h + q as i64) - &ks[q]).abs())
        .collect();
    let margins_minus: Vec<Rat> = (1..=t_order as usize)
        .map(|q| (sm.coeff(h + q as i64) + &ks[q]).abs())
        .collect();
    let checks = PairChecks {
        cancellation_ok,
        leading_ok,
        margins_plus,
        margins_minus,
    };
    (checks.passed(eps), checks)
}

/// The level-1 seed: 2v*sqrt(n^2 + 1/v) and 2v*sqrt(n^2 - 1/v).
pub fn base_pair(v: u64, t_order: u32, eps: &Rat) -> BasePairOutcome {
    let two_v = Rat::from_integer(BigInt::from(2 * v));
    let plus = SqrtSumExpr::new(v, SignClass::Plus, vec![two_v.clone()]);
    let minus = SqrtSumExpr::new(v, SignClass::Minus, vec![two_v]);
    let (ok, checks) = is_pair(&plus, &minus, t_order, eps, 1);
    if !ok {
        return BasePairOutcome::TooSmall {
            margin: checks.max_margin(),
        };
    }
    let trunc = 1 + t_order as i64;
    BasePairOutcome::Pair(Box::new(PairCert {
        series_plus: plus.series(trunc),
        series_minus: minus.series(trunc),
        plus,
        minus,
        t_order,
        eps: eps.clone(),
        level: 1,
        checks,
    }))
}

/// Interleave a level-m pair at consecutive arguments:
/// A_plus(n) = r_plus(n) + r_minus(n+1), A_minus(n) = r_plus(n+1) + r_minus(n).
/// Terms at equal shifts carry equal perturbations and merge by adding
/// their outer coefficients, so both results have exactly m+1 terms.
pub fn combine(plus: &SqrtSumExpr, minus: &SqrtSumExpr) -> (SqrtSumExpr, SqrtSumExpr) {
    assert_eq!(plus.level(), minus.level());
    assert_eq!(plus.v, minus.v);
    assert_eq!(plus.sign, SignClass::Plus);
    assert_eq!(minus.sign, SignClass::Minus);
    let m = plus.level();
    let interleave = |lead: &SqrtSumExpr, lag: &SqrtSumExpr| -> Vec<Rat> {
        let mut out = vec![Rat::zero(); m + 1];
        for (j, a) in lead.coeffs.iter().enumerate() {
            out[j] += a;
        }
        for (j, a) in lag.coeffs.iter().enumerate() {
            out[j + 1] += a;
        }
        out
    };
    let a_plus = SqrtSumExpr::new(plus.v, SignClass::Plus, interleave(plus, minus));
    let a_minus = SqrtSumExpr::new(plus.v, SignClass::Minus, interleave(minus, plus));
    (a_plus, a_minus)
}

/// Restore the leading coefficients at degree m+1 to +-m! exactly.
/// Both rescale ratios must be positive to preserve the sign class.
pub fn rescale_pair(
    a_plus: &SqrtSumExpr,
    a_minus: &SqrtSumExpr,
    m: u32,
    t_order: u32,
) -> Result<(SqrtSumExpr, SqrtSumExpr)> {
    let h = (m + 1) as i64;
    let trunc = h + t_order as i64;
    let sp = a_plus.series(trunc);
    let sm = a_minus.series(trunc);
    let lead = k_coeffs(m + 1, 0)[0].clone();
    let lp = sp.coeff(h);
    let lm = sm.coeff(h);
    if lp.is_zero() || lm.is_zero() {
        return Err(Error::Degenerate(format!(
            "vanishing degree-{h} coefficient during rescale"
        )));
    }
    if !lp.is_positive() || !lm.is_negative() {
        return Err(Error::Degenerate(format!(
            "degree-{h} coefficients have unusable signs during rescale"
        )));
    }
    let ratio_p = lead.clone() / lp;
    let ratio_m = -lead / lm;
    let scale = |e: &SqrtSumExpr, r: &Rat| {
        SqrtSumExpr::new(e.v, e.sign, e.coeffs.iter().map(|a| a * r).collect())
    };
    Ok((scale(a_plus, &ratio_p), scale(a_minus, &ratio_m)))
}

/// Powers of two from 2^4 to 2^20.
pub fn default_v_schedule() -> Vec<u64> {
    (4..=20).map(|e| 1u64 << e).collect()
}

/// Search the schedule for the first v whose (h-1)-fold interleave of the
/// base pair passes the exact pair check at (T, eps, h).
pub fn build_pair(level: u32, t_order: u32, eps: &Rat, schedule: &[u64]) -> Result<PairCert> {
    assert!(level >= 1);
    let mut best_margin: Option<Rat> = None;
    let note_margin = |best: &mut Option<Rat>, margin: Rat| {
        *best = Some(match best.take() {
            Some(b) if b <= margin => b,
            _ => margin,
        });
    };
    for &v in schedule {
        // the recursion consumes one tracked order per fold
        let base_order = t_order + level - 1;
        let seed = match base_pair(v, base_order, eps) {
            BasePairOutcome::Pair(c) => *c,
            BasePairOutcome::TooSmall { margin } => {
                note_margin(&mut best_margin, margin);
                continue;
            }
        };
        let (mut plus, mut minus) = (seed.plus, seed.minus);
        let mut degenerate = false;
        for m in 1..level {
            let (ap, am) = combine(&plus, &minus);
            match rescale_pair(&ap, &am, m, t_order + level - 1 - m) {
                Ok((p, q)) => {
                    plus = p;
                    minus = q;
                }
                Err(_) => {
                    degenerate = true;
                    break;
                }
            }
        }
        if degenerate {
            continue;
        }
        let (ok, checks) = is_pair(&plus, &minus, t_order, eps, level);
        if ok {
            let trunc = level as i64 + t_order as i64;
            return Ok(PairCert {
                series_plus: plus.series(trunc),
                series_minus: minus.series(trunc),
                plus,
                minus,
                t_order,
                eps: eps.clone(),
                level,
                checks,
            });
        }
        note_margin(&mut best_margin, checks.max_margin());
    }
    Err(Error::PairNotFound {
        t: t_order,
        eps: eps.to_string(),
        h: level,
        best_margin: best_margin
            .map(|m| m.to_string())
            .unwrap_or_else(|| "none".into()),
    })
}

/// An explicit integer-radicand witness: sum_i sqrt(a_i^2 (n+i-1)^2 + b_i)
/// has fractional part asymptotic to G0 / n^k.
#[derive(Clone, Debug)]
pub struct Theorem1Instance {
    pub k: u32,
    pub a: Vec<BigUint>,
    pub b: Vec<BigInt>,
    /// Leading fractional coefficient, as "p/q".
    pub g0: String,
    pub l_scale: BigUint,
    pub v: u64,
}

/// Wire form of an instance, everything big as decimal strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Theorem1InstanceJson {
    pub k: u32,
    pub a: Vec<String>,
    pub b: Vec<String>,
    #[serde(rename = "G0")]
    pub g0: String,
    pub v: u64,
    #[serde(rename = "L")]
    pub l_scale: String,
}

impl Theorem1Instance {
    pub fn g0_rat(&self) -> Rat {
        self.g0.parse().expect("stored rational")
    }

    pub fn to_json(&self) -> Theorem1InstanceJson {
        Theorem1InstanceJson {
            k: self.k,
            a: self.a.iter().map(|x| x.to_string()).collect(),
            b: self.b.iter().map(|x| x.to_string()).collect(),
            g0: self.g0.clone(),
            v: self.v,
            l_scale: self.l_scale.to_string(),
        }
    }

    pub fn from_json(js: &Theorem1InstanceJson) -> Result<Self> {
        let parse_u = |s: &String| -> Result<BigUint> {
            s.parse()
                .map_err(|e| Error::Parse(s.clone(), format!("{e}")))
        };
        let parse_i = |s: &String| -> Result<BigInt> {
            s.parse()
                .map_err(|e| Error::Parse(s.clone(), format!("{e}")))
        };
        Ok(Theorem1Instance {
            k: js.k,
            a: js.a.iter().map(&parse_u).collect::<Result<_>>()?,
            b: js.b.iter().map(&parse_i).collect::<Result<_>>()?,
            g0: js.g0.clone(),
            v: js.v,
            l_scale: parse_u(&js.l_scale)?,
        })
    }

    /// The radicands a_i^2 (n+i-1)^2 + b_i at a concrete n.
    pub fn radicands(&self, n: u64) -> Vec<BigUint> {
        self.a
            .iter()
            .zip(&self.b)
            .enumerate()
            .map(|(i, (a, b))| {
                let base = BigInt::from(a.clone()) * BigInt::from(n + i as u64);
                let r = &base * &base + b;
                r.to_biguint().expect("radicand is positive")
            })
            .collect()
    }

    pub fn sqrt_sum(&self, n: u64) -> SqrtSum {
        SqrtSum::new(
            self.radicands(n)
                .into_iter()
                .map(|r| (Rat::one(), r))
                .collect(),
        )
    }
}

/// Clear denominators of a level-k certificate's plus element: with
/// L = v * lcm(denominators), the scaled coefficients A_i = L a_i are
/// integers and b_i = +-A_i^2 / v are nonzero integers (v^2 divides A_i^2).
pub fn theorem1_instance(
    k: u32,
    cert: &PairCert,
    scale: Option<BigUint>,
) -> Result<Theorem1Instance> {
    if cert.level != k {
        return Err(Error::Usage(format!(
            "certificate level {} does not match k={k}",
            cert.level
        )));
    }
    let l_scale = match scale {
        Some(s) => s,
        None => {
            let mut lcm = BigInt::one();
            for a in &cert.plus.coeffs {
                lcm = lcm.lcm(a.denom());
            }
            (BigInt::from(cert.plus.v) * lcm)
                .to_biguint()
                .expect("positive scale")
        }
    };
    let l_int = BigInt::from(l_scale.clone());
    let mut a_out = Vec::new();
    let mut b_out = Vec::new();
    for (j, a) in cert.plus.coeffs.iter().enumerate() {
        let scaled = a * Rat::from_integer(l_int.clone());
        if !scaled.denom().is_one() {
            return Err(Error::Degenerate(
                "scale does not clear denominators".into(),
            ));
        }
        let a_i = scaled.numer().clone();
        let offset = cert.plus.sign.offset(cert.plus.v, j);
        let b_i_rat = Rat::from_integer(&a_i * &a_i) * offset;
        if !b_i_rat.denom().is_one() {
            return Err(Error::Degenerate(
                "scale does not make the perturbations integral".into(),
            ));
        }
        let b_i = b_i_rat.numer().clone();
        if b_i.is_zero() {
            return Err(Error::Internal("vanishing perturbation b_i".into()));
        }
        a_out.push(a_i.to_biguint().expect("positive coefficient"));
        b_out.push(b_i);
    }
    let g0 = Rat::from_integer(l_int) * cert.series_plus.coeff(k as i64);
    if g0.is_zero() {
        return Err(Error::Internal("vanishing leading coefficient G0".into()));
    }
    Ok(Theorem1Instance {
        k,
        a: a_out,
        b: b_out,
        g0: g0.to_string(),
        l_scale,
        v: cert.plus.v,
    })
}

/// One verification row: certified distance to the nearest integer of the
/// instance sum at n, and the stabilized product n^k * distance.
#[derive(Clone, Debug)]
pub struct VerifyRow {
    pub n: u64,
    pub dist: DyadicInterval,
    pub scaled_mid: f64,
}

/// Certified scan of an instance over ascending n, with the least-squares
/// slope of log(dist) against log(n).
pub fn theorem1_verify(
    inst: &Theorem1Instance,
    n_list: &[u64],
    bit_budget: u32,
) -> Result<(Vec<VerifyRow>, f64)> {
    if n_list.is_empty() {
        return Err(Error::Usage("empty n list".into()));
    }
    let mut rows = Vec::new();
    for &n in n_list {
        let sum = inst.sqrt_sum(n);
        // resolve well below the expected G0/n^k signal
        let g0 = inst.g0_rat().abs();
        let signal = g0
            / crate::series::pow_rat(&Rat::from_integer(BigInt::from(n)), inst.k)
            / Rat::from_integer(BigInt::from(1u64 << 20));
        let width = Dyadic::from_ratio_floor(&signal, 256).max(Dyadic::pow2(-(bit_budget as i64)));
        let dist = sum.dist_to_int(&width, bit_budget)?;
        let mid = dist.midpoint();
        let scaled_mid = if mid.is_positive() {
            (mid.ln_f64() + (inst.k as f64) * (n as f64).ln()).exp()
        } else {
            0.0
        };
        rows.push(VerifyRow {
            n,
            dist,
            scaled_mid,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.dist.midpoint().ln_f64()).collect();
    Ok((rows, fit_slope(&xs, &ys)))
}

/// Unweighted least squares slope.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let xb = xs.iter().sum::<f64>() / n;
    let yb = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xb) * (y - yb)).sum();
    let den: f64 = xs.iter().map(|x| (x - xb) * (x - xb)).sum();
    num / den
}
