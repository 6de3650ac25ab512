//! One-sided approximation of targets in [0,1) by fractional parts of
//! ring elements.
//!
//! The ladder holds, for each level j, a nonzero element of height at most
//! 2^j whose fractional part is positive and at most (2^j)^-(2^tau - 1).
//! The descent subtracts greedy multiples of those fractional parts from
//! the target, never overshooting, and finally keeps the longest prefix
//! whose accumulated element stays within the height budget; coordinate
//! cancellation between levels frequently makes deep prefixes feasible.
//!
//! At desk scale the same one-sided guarantee is obtained faster by
//! enumerating the admissible coefficient box outright, so the shift
//! operation dispatches on box size and only climbs the ladder when the
//! box is too large to enumerate.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{Dyadic, DyadicInterval, SerializedInterval};
use crate::pigeonhole::{box_target_search, certified_dist_lower_bound, dirichlet_search, BoxSpec};
use crate::ring::{Basis, ElemJson, QuadInt};
use crate::Config;

type Rat = BigRational;

/// One ladder level: an element of height <= 2^level whose fractional part
/// is certified inside (0, (2^level)^-(2^tau-1)].
#[derive(Clone, Debug)]
pub struct LadderEntry {
    pub level: u32,
    pub x: QuadInt,
    pub frac: DyadicInterval,
    pub lower_cert: Dyadic,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LadderEntryJson {
    pub level: u32,
    pub x: ElemJson,
    pub frac: SerializedInterval,
    pub lower_cert: String,
}

impl LadderEntry {
    pub fn to_json(&self) -> LadderEntryJson {
        LadderEntryJson {
            level: self.level,
            x: self.x.to_json(),
            frac: self.frac.encode(),
            lower_cert: self.lower_cert.encode(),
        }
    }

    pub fn from_json(js: &LadderEntryJson) -> Result<Self> {
        Ok(LadderEntry {
            level: js.level,
            x: QuadInt::from_json(&js.x)?,
            frac: DyadicInterval::decode(&js.frac)?,
            lower_cert: Dyadic::decode(&js.lower_cert)?,
        })
    }
}

/// Fractional enclosure of an element, refined to the requested width.
fn frac_of(x: &QuadInt, width: &Dyadic, bit_budget: u32) -> Result<DyadicInterval> {
    Ok(x.to_rat()
        .to_sqrt_sum()
        .frac_enclosure(width, bit_budget)?
        .frac)
}

/// Build levels 1..=levels. Each witness is sign-flipped, if needed, so
/// its fractional part equals its distance to the nearest integer.
pub fn build_ladder(basis: &Arc<Basis>, levels: u32, cfg: &Config) -> Result<Vec<LadderEntry>> {
    let exponent = (basis.dim() - 1) as u32;
    let mut out = Vec::with_capacity(levels as usize);
    for j in 1..=levels {
        let n = 1u64 << j;
        let witness = dirichlet_search(basis, n, cfg)?;
        // flip so that {x} = ||x||; the witness is irrational, so its
        // fractional part is never exactly 1/2 and refinement decides
        let half = Dyadic::new(BigInt::one(), -1);
        let mut width = Dyadic::pow2(-64);
        let x = loop {
            let fr = frac_of(&witness.w, &width, cfg.bit_budget)?;
            if *fr.hi() < half {
                break witness.w.clone();
            }
            if *fr.lo() > half {
                break witness.w.neg();
            }
            width = width.mul_pow2(-64);
        };
        // certify 0 < {x} <= (2^j)^-(2^tau - 1); both strict inequalities
        // hold for the true value, so escalation terminates
        let bound = Rat::new(BigInt::one(), BigInt::from(n).pow(exponent));
        let mut width = Dyadic::pow2(-48);
        let frac = loop {
            let fr = frac_of(&x, &width, cfg.bit_budget)?;
            if fr.lo().is_positive() && fr.hi().to_ratio() <= bound {
                break fr;
            }
            width = width.mul_pow2(-48);
        };
        let lower = certified_dist_lower_bound(&x, n, cfg)?;
        // both are valid lower bounds on {x}; keep the smaller so the
        // entry invariant lower_cert <= frac.lo holds verbatim
        let lower_cert = lower.min(frac.lo().clone());
        if !lower_cert.is_positive() {
            return Err(Error::Internal("ladder entry lost positivity".into()));
        }
        out.push(LadderEntry {
            level: j,
            x,
            frac,
            lower_cert,
        });
    }
    Ok(out)
}

/// Result of the greedy descent: the accumulated element, its digits, and
/// the certified leftover target mass.
#[derive(Clone, Debug)]
pub struct GreedyResult {
    pub omega: QuadInt,
    pub y: Vec<u64>,
    pub residual: DyadicInterval,
    pub depth: u32,
    pub height_used: BigInt,
}

/// Greedy digits against the ladder fractions, one-sided by construction:
/// y_h is the exact floor of (remaining target) / {x_h}, certified by
/// interval division with escalating precision. The returned prefix is the
/// longest one whose accumulated element has height within the cap.
pub fn greedy_descent(
    alpha: &Rat,
    ladder: &[LadderEntry],
    height_cap: u64,
    cfg: &Config,
) -> Result<GreedyResult> {
    if ladder.is_empty() {
        return Err(Error::Usage("empty ladder".into()));
    }
    if alpha.is_negative() || *alpha >= Rat::one() {
        return Err(Error::Usage("target must lie in [0,1)".into()));
    }

    // fractional enclosures per level, refined on demand
    let mut bits: i64 = -96;
    let refresh = |bits: i64| -> Result<Vec<(Rat, Rat)>> {
        ladder
            .iter()
            .map(|e| {
                let fr = frac_of(&e.x, &Dyadic::pow2(bits), cfg.bit_budget)?;
                Ok((fr.lo().to_ratio(), fr.hi().to_ratio()))
            })
            .collect()
    };
    let mut fracs = refresh(bits)?;

    // certified digits: replayed from scratch whenever precision escalates
    let digits = 'retry: loop {
        let mut ys: Vec<u64> = Vec::with_capacity(ladder.len());
        let mut rem_lo = alpha.clone();
        let mut rem_hi = alpha.clone();
        for (f_lo, f_hi) in &fracs {
            let q_lo = (&rem_lo / f_hi).floor();
            let q_hi = (&rem_hi / f_lo).floor();
            if q_lo != q_hi {
                if bits <= -(cfg.bit_budget as i64) {
                    return Err(Error::PrecisionBudget {
                        bits: cfg.bit_budget,
                    });
                }
                bits *= 2;
                fracs = refresh(bits)?;
                continue 'retry;
            }
            let y = q_lo
                .to_integer()
                .to_u64()
                .ok_or_else(|| Error::Internal("digit out of range".into()))?;
            let y_rat = Rat::from_integer(BigInt::from(y));
            rem_lo -= &y_rat * f_hi;
            rem_hi -= &y_rat * f_lo;
            if rem_lo.is_negative() {
                rem_lo = Rat::zero();
            }
            ys.push(y);
        }
        break ys;
    };

    // longest feasible prefix under the exact height of the running sum
    let cap = BigInt::from(height_cap);
    let mut omega = QuadInt::zero(ladder[0].x.basis());
    let mut best: Option<(u32, QuadInt)> = None;
    for (idx, (y, entry)) in digits.iter().zip(ladder).enumerate() {
        if *y > 0 {
            omega = omega.add(&entry.x.scale(&BigInt::from(*y)))?;
        }
        if omega.height() <= cap {
            best = Some((idx as u32 + 1, omega.clone()));
        }
    }
    let (depth, omega) = best.unwrap_or((0, QuadInt::zero(ladder[0].x.basis())));
    let kept = &digits[..depth as usize];

    // certified residual of the kept prefix
    let mut res_lo = alpha.clone();
    let mut res_hi = alpha.clone();
    for (y, (f_lo, f_hi)) in kept.iter().zip(&fracs) {
        let y_rat = Rat::from_integer(BigInt::from(*y));
        res_lo -= &y_rat * f_hi;
        res_hi -= &y_rat * f_lo;
    }
    if res_lo.is_negative() {
        res_lo = Rat::zero();
    }
    let residual = DyadicInterval::from_ratio_bounds(&res_lo, &res_hi, 192);
    Ok(GreedyResult {
        height_used: omega.height(),
        omega,
        y: kept.to_vec(),
        residual,
        depth,
    })
}

/// Output of the positive-coordinate shift: coefficients d_f in
/// [max(1, anchor-cap), anchor+cap] with anchor = floor(n/2) and
/// cap = floor(n/3), a certified distance of the resulting sum to the
/// target, and the one-sided certificate that produced it.
#[derive(Clone, Debug)]
pub struct ShiftResult {
    /// Coefficient per starred product, in products order.
    pub d: Vec<u64>,
    /// The one-sided selection relative to the anchor.
    pub kappa: QuadInt,
    /// Certified {alpha - w} of the one-sided selection (>= 0 by meaning).
    pub residual: DyadicInterval,
    /// Certified ||w - alpha|| of the returned coefficients.
    pub err: DyadicInterval,
    pub used_ladder: bool,
    pub depth: u32,
}

fn elem_from_d(basis: &Arc<Basis>, d: &[u64]) -> QuadInt {
    let mut coeffs = vec![BigInt::zero(); basis.dim()];
    for (i, &c) in d.iter().enumerate() {
        coeffs[i + 1] = BigInt::from(c);
    }
    QuadInt::from_coeffs(basis, coeffs).expect("aligned")
}

fn d_from_elem(w: &QuadInt) -> Vec<u64> {
    w.coeffs()[1..]
        .iter()
        .map(|c| c.to_u64().expect("positive coefficient"))
        .collect()
}

/// Certified ||sum d_f sqrt(f) - alpha||.
fn dist_to_target(
    basis: &Arc<Basis>,
    d: &[u64],
    alpha: &Rat,
    cfg: &Config,
) -> Result<DyadicInterval> {
    let mut terms = vec![(-alpha.clone(), num_bigint::BigUint::one())];
    for (i, &c) in d.iter().enumerate() {
        terms.push((
            Rat::from_integer(BigInt::from(c)),
            num_bigint::BigUint::from(basis.starred()[i]),
        ));
    }
    crate::eval::SqrtSum::new(terms).dist_to_int(&Dyadic::pow2(-48), cfg.bit_budget)
}

/// Certified {alpha - sum d_f sqrt(f)}.
fn residual_of_target(
    basis: &Arc<Basis>,
    d: &[u64],
    alpha: &Rat,
    cfg: &Config,
) -> Result<DyadicInterval> {
    let mut terms = vec![(alpha.clone(), num_bigint::BigUint::one())];
    for (i, &c) in d.iter().enumerate() {
        terms.push((
            Rat::from_integer(-BigInt::from(c)),
            num_bigint::BigUint::from(basis.starred()[i]),
        ));
    }
    Ok(crate::eval::SqrtSum::new(terms)
        .frac_enclosure(&Dyadic::pow2(-48), cfg.bit_budget)?
        .frac)
}

/// Approximate alpha by sum_f d_f sqrt(f) with all coefficients positive
/// and within floor(n/3) of floor(n/2). The admissible box is enumerated
/// outright whenever it fits the cap (the certified one-sided selection
/// and the best two-sided refinement come from the same sweep); otherwise
/// the dyadic ladder supplies the one-sided element.
pub fn shift_to_positive(
    alpha: &Rat,
    basis: &Arc<Basis>,
    n: u64,
    cfg: &Config,
) -> Result<ShiftResult> {
    if n < 2 {
        return Err(Error::Range(format!(
            "box size must be at least 2, got {n}"
        )));
    }
    let anchor = (n / 2) as i64;
    let cap = (n / 3) as i64;
    let dims = basis.dim() - 1;
    let lo = 1.max(anchor - cap);
    let hi = anchor + cap;
    let spec = BoxSpec::uniform(dims, lo, hi);
    let anchor_elem = elem_from_d(basis, &vec![anchor as u64; dims]);

    if spec.point_count() <= cfg.enum_cap as u128 {
        let best = box_target_search(basis, &spec, alpha, cfg)?;
        let kappa = best.below.0.sub(&anchor_elem)?;
        let d = d_from_elem(&best.nearest.0);
        return Ok(ShiftResult {
            err: best.nearest.1,
            residual: best.below.1,
            kappa,
            d,
            used_ladder: false,
            depth: 0,
        });
    }

    // ladder route for boxes beyond the enumeration cap
    let exponent = dims as u32;
    let mut j_max = 0u32;
    while (1u128 << ((j_max + 1) * exponent)) <= cfg.enum_cap as u128 {
        j_max += 1;
    }
    let levels = j_max.min(64 - (cap as u64).leading_zeros() + 2);
    let ladder = build_ladder(basis, levels, cfg)?;

    // exact rational lower bound on {alpha - rho}
    let mut terms = vec![(alpha.clone(), num_bigint::BigUint::one())];
    for &f in basis.starred() {
        terms.push((
            Rat::from_integer(BigInt::from(-anchor)),
            num_bigint::BigUint::from(f),
        ));
    }
    let fr =
        crate::eval::SqrtSum::new(terms).frac_enclosure(&Dyadic::pow2(-192), cfg.bit_budget)?;
    let alpha0 = fr.frac.lo().to_ratio();

    let descent = greedy_descent(&alpha0, &ladder, cap as u64, cfg)?;
    let kappa = descent.omega.clone();
    let shifted = anchor_elem.add(&kappa)?;
    let d = d_from_elem(&shifted);
    for &c in &d {
        assert!(c >= lo as u64 && c <= hi as u64);
    }
    let err = dist_to_target(basis, &d, alpha, cfg)?;
    let residual = residual_of_target(basis, &d, alpha, cfg)?;
    Ok(ShiftResult {
        d,
        kappa,
        residual,
        err,
        used_ladder: true,
        depth: descent.depth,
    })
}
