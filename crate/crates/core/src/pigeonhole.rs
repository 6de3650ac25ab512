//! Exhaustive searches for ring elements of bounded height whose distance
//! to the nearest integer is small.
//!
//! Enumeration runs in 96-bit fixed point (wrapping u128 arithmetic, so
//! fractional parts come for free), which is three orders of magnitude
//! below the smallest separations desk-scale boxes can produce. Winning
//! candidates are re-verified with exact interval arithmetic before
//! anything is returned, escalating precision until the order is certain.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eval::{Dyadic, DyadicInterval, SqrtSum};
use crate::ring::{Basis, QuadInt};
use crate::Config;

const FIX_BITS: u32 = 96;
const FIX_MASK: u128 = (1u128 << FIX_BITS) - 1;

/// Distance certification width required of returned witnesses.
pub const WITNESS_WIDTH_BITS: i64 = -40;

/// Per-coordinate ranges of a coefficient box over the starred products.
#[derive(Clone, Debug)]
pub struct BoxSpec {
    pub ranges: Vec<(i64, i64)>,
}

impl BoxSpec {
    pub fn uniform(dims: usize, lo: i64, hi: i64) -> Self {
        BoxSpec {
            ranges: vec![(lo, hi); dims],
        }
    }

    pub fn point_count(&self) -> u128 {
        self.ranges
            .iter()
            .map(|(lo, hi)| (hi - lo + 1) as u128)
            .product()
    }

    fn max_abs_coeff(&self) -> i64 {
        self.ranges
            .iter()
            .map(|(lo, hi)| lo.abs().max(hi.abs()))
            .max()
            .unwrap_or(0)
    }
}

/// sqrt(f) for the starred products, scaled by 2^96 and truncated.
fn fixed_roots(basis: &Basis) -> Vec<u128> {
    basis
        .starred()
        .iter()
        .map(|&f| {
            let enc = crate::eval::sqrt_enclosure_u64(f, FIX_BITS);
            let scaled = enc.lo().mant() << ((enc.lo().exp() + FIX_BITS as i64) as usize);
            scaled.to_u128().expect("fits in 96+5 bits")
        })
        .collect()
}

fn key_dist(key: u128) -> u128 {
    key.min((1u128 << FIX_BITS) - key)
}

/// The fixed-point error of one enumerated key, in ulps: one truncation
/// ulp per unit of coefficient mass plus slack for the target key.
fn key_slack(spec: &BoxSpec) -> u128 {
    let mass = spec.ranges.len() as u128 * spec.max_abs_coeff().unsigned_abs() as u128;
    2 * mass + 16
}

/// Walk every point of `spec` with an incrementally maintained key.
/// `first` fixes the leading coordinate (the parallel split axis).
fn walk_chunk(roots: &[u128], spec: &BoxSpec, first: i64, mut visit: impl FnMut(u128, &[i64])) {
    let dims = spec.ranges.len();
    let mut coords: Vec<i64> = spec.ranges.iter().map(|r| r.0).collect();
    coords[0] = first;
    // partial[i] = key of coords[0..=i]
    let mut partial = vec![0u128; dims];
    let recompute = |partial: &mut Vec<u128>, coords: &[i64], from: usize| {
        for i in from..dims {
            let prev = if i == 0 { 0 } else { partial[i - 1] };
            let term = (roots[i] as i128).wrapping_mul(coords[i] as i128) as u128;
            partial[i] = prev.wrapping_add(term) & FIX_MASK;
        }
    };
    recompute(&mut partial, &coords, 0);
    loop {
        visit(partial[dims - 1], &coords);
        // odometer increment over coords[1..], last coordinate fastest
        let mut i = dims;
        loop {
            if i == 1 {
                return; // leading coordinate is fixed per chunk
            }
            i -= 1;
            if coords[i] < spec.ranges[i].1 {
                coords[i] += 1;
                if i == dims - 1 {
                    // fast path: bump the last partial only
                    let prev = if i == 0 { 0 } else { partial[i - 1] };
                    let _ = prev;
                    partial[i] = partial[i].wrapping_add(roots[i]) & FIX_MASK;
                } else {
                    recompute(&mut partial, &coords, i);
                }
                break;
            }
            coords[i] = spec.ranges[i].0;
        }
        if dims == 1 {
            return;
        }
    }
}

fn first_axis_values(spec: &BoxSpec) -> Vec<i64> {
    (spec.ranges[0].0..=spec.ranges[0].1).collect()
}

fn check_capacity(count: u128, cap: u64) -> Result<()> {
    if count > cap as u128 {
        return Err(Error::Capacity {
            required: count,
            cap,
        });
    }
    Ok(())
}

fn elem_from_coords(basis: &Arc<Basis>, coords: &[i64]) -> QuadInt {
    let mut coeffs = vec![BigInt::zero(); basis.dim()];
    for (i, &c) in coords.iter().enumerate() {
        coeffs[i + 1] = BigInt::from(c);
    }
    QuadInt::from_coeffs(basis, coeffs).expect("aligned coordinates")
}

/// Certified distance of `w` to the nearest integer at the standard
/// witness width, escalating within the budget.
fn certify_dist(w: &QuadInt, width_bits: i64, bit_budget: u32) -> Result<DyadicInterval> {
    w.to_rat()
        .to_sqrt_sum()
        .dist_to_int(&Dyadic::pow2(width_bits), bit_budget)
}

/// Order two certified quantities by refining until they separate. Distinct
/// canonical elements always separate; equality can only mean a bug.
fn refine_until_ordered(a: &QuadInt, b: &QuadInt, bit_budget: u32) -> Result<std::cmp::Ordering> {
    let mut bits = WITNESS_WIDTH_BITS;
    loop {
        let da = certify_dist(a, bits, bit_budget)?;
        let db = certify_dist(b, bits, bit_budget)?;
        if da.hi() < db.lo() {
            return Ok(std::cmp::Ordering::Less);
        }
        if db.hi() < da.lo() {
            return Ok(std::cmp::Ordering::Greater);
        }
        if bits <= -(bit_budget as i64) {
            return Err(Error::Internal(
                "distinct witnesses failed to separate within the budget".into(),
            ));
        }
        bits *= 2;
    }
}

/// A nonzero element of bounded height with certified small distance to
/// the integers.
#[derive(Clone, Debug)]
pub struct SmallFracWitness {
    pub w: QuadInt,
    pub height_bound: u64,
    pub dist: DyadicInterval,
    pub certified_upper: Dyadic,
}

/// Enumerate the fractional parts of all sums over the starred products
/// with coefficients in 1..=n, plus zero, sort them on the circle, and
/// return the difference of the closest adjacent pair. With N+1 points in
/// N cells the minimal gap is below 1/(N+1), so the witness certifies
/// ||w|| <= n^-(2^tau - 1) with constant one.
pub fn dirichlet_search(basis: &Arc<Basis>, n: u64, cfg: &Config) -> Result<SmallFracWitness> {
    if n < 2 {
        return Err(Error::Range(format!("n must be at least 2, got {n}")));
    }
    let dims = basis.dim() - 1;
    let spec = BoxSpec::uniform(dims, 1, n as i64);
    let count = spec.point_count();
    check_capacity(count, cfg.enum_cap)?;
    let roots = fixed_roots(basis);

    // strides for linear indexing, last coordinate fastest
    let sizes: Vec<u64> = spec
        .ranges
        .iter()
        .map(|(lo, hi)| (hi - lo + 1) as u64)
        .collect();
    let mut strides = vec![1u64; dims];
    for i in (0..dims.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * sizes[i + 1];
    }

    let mut points: Vec<(u128, u64)> = Vec::with_capacity(count as usize + 1);
    points.push((0u128, u64::MAX)); // the zero element
    points.resize(count as usize + 1, (0, 0));
    let block = (count as usize) / sizes[0] as usize;
    let firsts = first_axis_values(&spec);
    points[1..]
        .par_chunks_mut(block)
        .zip(firsts.par_iter())
        .for_each(|(slice, &first)| {
            let mut i = 0usize;
            let base = (first - spec.ranges[0].0) as u64 * strides[0];
            walk_chunk(&roots, &spec, first, |key, coords| {
                let mut idx = base;
                for d in 1..dims {
                    idx += (coords[d] - spec.ranges[d].0) as u64 * strides[d];
                }
                slice[i] = (key, idx);
                i += 1;
            });
            debug_assert_eq!(i, slice.len());
        });

    points.par_sort_unstable();

    // minimal adjacent gap on the circle, then candidates within slack
    let slack = key_slack(&spec);
    let m = points.len();
    let gap_at = |i: usize| -> u128 {
        let a = points[i].0;
        let b = points[(i + 1) % m].0;
        b.wrapping_sub(a) & FIX_MASK
    };
    let mut min_gap = u128::MAX;
    for i in 0..m {
        min_gap = min_gap.min(gap_at(i));
    }
    let decode = |idx: u64| -> Vec<i64> {
        if idx == u64::MAX {
            return vec![0; dims];
        }
        let mut rest = idx;
        (0..dims)
            .map(|d| {
                let q = rest / strides[d];
                rest %= strides[d];
                spec.ranges[d].0 + q as i64
            })
            .collect()
    };
    let mut cand_vecs: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    for i in 0..m {
        if gap_at(i) <= min_gap.saturating_add(slack) {
            let a = decode(points[i].1);
            let b = decode(points[(i + 1) % m].1);
            let w = elem_from_coords(basis, &b)
                .sub(&elem_from_coords(basis, &a))
                .expect("same basis")
                .sign_canonical();
            cand_vecs.insert(w.coeffs().to_vec());
            if cand_vecs.len() > 64 {
                return Err(Error::Internal("candidate set exploded".into()));
            }
        }
    }
    let candidates: Vec<QuadInt> = cand_vecs
        .into_iter()
        .map(|v| QuadInt::from_coeffs(basis, v).expect("aligned"))
        .collect();
    let winner = select_min_dist(basis, candidates, cfg)?;

    // certify the pigeonhole bound n^-(2^tau - 1); the true gap is strictly
    // below it, so refinement terminates
    let exponent = (basis.dim() - 1) as u32;
    let bound = BigRational::new(BigInt::one(), BigInt::from(n).pow(exponent));
    let mut bits = WITNESS_WIDTH_BITS;
    let dist = loop {
        let d = certify_dist(&winner, bits, cfg.bit_budget)?;
        if d.hi().to_ratio() <= bound {
            break d;
        }
        if bits <= -(cfg.bit_budget as i64) {
            return Err(Error::PrecisionBudget {
                bits: cfg.bit_budget,
            });
        }
        bits *= 2;
    };
    Ok(SmallFracWitness {
        certified_upper: dist.hi().clone(),
        w: winner,
        height_bound: n,
        dist,
    })
}

/// Pick the candidate with the smallest certified distance; ties cannot
/// survive refinement between distinct canonical elements, so the lex
/// order only arbitrates exact duplicates upstream.
fn select_min_dist(_basis: &Arc<Basis>, candidates: Vec<QuadInt>, cfg: &Config) -> Result<QuadInt> {
    let mut iter = candidates.into_iter();
    let mut best = iter
        .next()
        .ok_or_else(|| Error::Internal("empty candidate set".into()))?;
    for c in iter {
        if refine_until_ordered(&c, &best, cfg.bit_budget)? == std::cmp::Ordering::Less {
            best = c;
        }
    }
    Ok(best)
}

/// Exact minimizer of the distance to the integers over all nonzero
/// elements with coefficients in -n..=n, certified to width 2^-40.
/// Ties resolve to the sign-canonical, lexicographically smallest vector.
pub fn brute_min_dist(
    basis: &Arc<Basis>,
    n: u64,
    cfg: &Config,
) -> Result<(QuadInt, DyadicInterval)> {
    if n < 1 {
        return Err(Error::Range("n must be positive".into()));
    }
    let dims = basis.dim() - 1;
    let spec = BoxSpec::uniform(dims, -(n as i64), n as i64);
    check_capacity(spec.point_count() - 1, cfg.enum_cap)?;
    let roots = fixed_roots(basis);
    let slack = key_slack(&spec);

    struct Partial {
        min_dist: u128,
        // (key distance, coords) pairs within slack of the local minimum
        cands: Vec<(u128, Vec<i64>)>,
    }
    let merged: Vec<Partial> = first_axis_values(&spec)
        .into_par_iter()
        .map(|first| {
            let mut p = Partial {
                min_dist: u128::MAX,
                cands: Vec::new(),
            };
            walk_chunk(&roots, &spec, first, |key, coords| {
                if coords.iter().all(|&c| c == 0) {
                    return;
                }
                let d = key_dist(key);
                if d <= p.min_dist.saturating_add(slack) {
                    if d < p.min_dist {
                        p.min_dist = d;
                        p.cands.retain(|(kd, _)| *kd <= d.saturating_add(slack));
                    }
                    p.cands.push((d, coords.to_vec()));
                    if p.cands.len() > 4096 {
                        let lim = p.min_dist.saturating_add(slack);
                        p.cands.retain(|(kd, _)| *kd <= lim);
                    }
                }
            });
            p
        })
        .collect();

    let global_min = merged.iter().map(|p| p.min_dist).min().unwrap();
    let mut cand_vecs: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    for p in &merged {
        for (kd, coords) in &p.cands {
            if *kd <= global_min.saturating_add(slack) {
                let w = elem_from_coords(basis, coords).sign_canonical();
                cand_vecs.insert(w.coeffs().to_vec());
                if cand_vecs.len() > 256 {
                    return Err(Error::Internal("candidate set exploded".into()));
                }
            }
        }
    }
    // lex order is the tie rule; BTreeSet already yields it, and
    // select_min_dist keeps the earliest among refinement-equal entries
    let candidates: Vec<QuadInt> = cand_vecs
        .into_iter()
        .map(|v| QuadInt::from_coeffs(basis, v).expect("aligned"))
        .collect();
    let winner = select_min_dist(basis, candidates, cfg)?;
    let dist = certify_dist(&winner, WITNESS_WIDTH_BITS, cfg.bit_budget)?;
    Ok((winner, dist))
}

/// A norm-product lower bound on the distance of `w` to the integers:
/// with d the nearest integer, |N(w - d)| >= 1 forces
/// |w - d| >= 1 / prod_{s != 0} |sigma_s(w - d)|.
pub fn certified_dist_lower_bound(w: &QuadInt, n: u64, cfg: &Config) -> Result<Dyadic> {
    if !w.is_pure_irrational() {
        return Err(Error::Usage(
            "the lower bound needs a nonzero element with no rational part".into(),
        ));
    }
    if w.height() > BigInt::from(n) {
        return Err(Error::Usage(format!("height exceeds the stated bound {n}")));
    }
    let basis = w.basis().clone();
    let fr = w
        .to_rat()
        .to_sqrt_sum()
        .frac_enclosure(&Dyadic::pow2(-64), cfg.bit_budget)?;
    // nearest integer: round the fractional enclosure's midpoint
    let half = Dyadic::new(BigInt::one(), -1);
    let d = if fr.frac.midpoint() <= half {
        fr.int_part.clone()
    } else {
        fr.int_part.clone() + BigInt::one()
    };
    let shifted = w.sub(&QuadInt::from_term(&basis, 1, d).expect("rational term"))?;
    let tau = basis.tau();
    let mut prod_hi = BigRational::one();
    for mask in 1u32..(1 << tau) {
        let s: Vec<bool> = (0..tau).map(|j| mask >> j & 1 == 1).collect();
        let conj = shifted.galois_conjugate(&s)?;
        let enc = conj.to_rat().to_sqrt_sum().ratio_enclosure(96);
        let abs_hi = enc.0.abs().max(enc.1.abs());
        prod_hi *= abs_hi;
    }
    if !prod_hi.is_positive() {
        return Err(Error::Internal(
            "conjugate product collapsed to zero".into(),
        ));
    }
    let lower = prod_hi.recip();
    let mut out = Dyadic::from_ratio_floor(&lower, 96);
    if !out.is_positive() {
        out = Dyadic::from_ratio_floor(&lower, 256);
    }
    if !out.is_positive() {
        return Err(Error::Internal("lower bound rounded to zero".into()));
    }
    Ok(out)
}

/// Best approximations to a target inside a coefficient box: the element
/// whose fractional part sits closest below the target on the circle, and
/// the element closest to it in either direction. Both winners carry
/// certified enclosures (of {alpha - w} and of ||w - alpha||).
#[derive(Clone, Debug)]
pub struct BoxTargetBest {
    pub below: (QuadInt, DyadicInterval),
    pub nearest: (QuadInt, DyadicInterval),
}

pub fn box_target_search(
    basis: &Arc<Basis>,
    spec: &BoxSpec,
    alpha: &BigRational,
    cfg: &Config,
) -> Result<BoxTargetBest> {
    let dims = basis.dim() - 1;
    if spec.ranges.len() != dims {
        return Err(Error::Usage("box dimensions do not match the basis".into()));
    }
    check_capacity(spec.point_count(), cfg.enum_cap)?;
    let roots = fixed_roots(basis);
    let slack = key_slack(spec);
    let alpha_key = {
        use num_integer::Integer;
        let num = alpha.numer() << FIX_BITS as usize;
        let q = num.div_floor(alpha.denom());
        q.to_biguint()
            .unwrap_or_else(BigUint::zero)
            .to_u128()
            .unwrap_or(0)
            & FIX_MASK
    };

    struct Partial {
        min_below: u128,
        below: Vec<(u128, Vec<i64>)>,
        min_near: u128,
        near: Vec<(u128, Vec<i64>)>,
    }
    let merged: Vec<Partial> = first_axis_values(spec)
        .into_par_iter()
        .map(|first| {
            let mut p = Partial {
                min_below: u128::MAX,
                below: Vec::new(),
                min_near: u128::MAX,
                near: Vec::new(),
            };
            walk_chunk(&roots, spec, first, |key, coords| {
                let resid = alpha_key.wrapping_sub(key) & FIX_MASK;
                // points with resid near the modulus are kept as well:
                // their true residual may sit just above zero inside the
                // fixed-point error band
                if resid <= p.min_below.saturating_add(slack)
                    || resid >= (1u128 << FIX_BITS) - slack
                {
                    if resid < p.min_below {
                        p.min_below = resid;
                        let lim = resid.saturating_add(slack);
                        p.below
                            .retain(|(r, _)| *r <= lim || *r >= (1u128 << FIX_BITS) - slack);
                    }
                    p.below.push((resid, coords.to_vec()));
                }
                let nd = key_dist(resid);
                if nd <= p.min_near.saturating_add(slack) {
                    if nd < p.min_near {
                        p.min_near = nd;
                        let lim = nd.saturating_add(slack);
                        p.near.retain(|(r, _)| *r <= lim);
                    }
                    p.near.push((nd, coords.to_vec()));
                }
                if p.below.len() > 4096 {
                    let lim = p.min_below.saturating_add(slack);
                    p.below
                        .retain(|(r, _)| *r <= lim || *r >= (1u128 << FIX_BITS) - slack);
                }
                if p.near.len() > 4096 {
                    let lim = p.min_near.saturating_add(slack);
                    p.near.retain(|(r, _)| *r <= lim);
                }
            });
            p
        })
        .collect();

    let min_below = merged.iter().map(|p| p.min_below).min().unwrap();
    let min_near = merged.iter().map(|p| p.min_near).min().unwrap();

    let mut below_set: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    let mut near_set: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    for p in &merged {
        for (r, coords) in &p.below {
            if *r <= min_below.saturating_add(slack) || *r >= (1u128 << FIX_BITS) - slack {
                below_set.insert(coords.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>());
            }
        }
        for (r, coords) in &p.near {
            if *r <= min_near.saturating_add(slack) {
                near_set.insert(coords.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>());
            }
        }
        if below_set.len() + near_set.len() > 8192 {
            return Err(Error::Internal("candidate set exploded".into()));
        }
    }

    let residual_of = |coords: &[BigInt], bits: i64| -> Result<DyadicInterval> {
        // {alpha - w}
        let mut terms = vec![(alpha.clone(), BigUint::one())];
        for (i, c) in coords.iter().enumerate() {
            let c_rat = BigRational::from_integer(-c.clone());
            terms.push((c_rat, BigUint::from(basis.starred()[i])));
        }
        Ok(SqrtSum::new(terms)
            .frac_enclosure(&Dyadic::pow2(bits), cfg.bit_budget)?
            .frac)
    };
    let dist_of = |coords: &[BigInt], bits: i64| -> Result<DyadicInterval> {
        let mut terms = vec![(-alpha.clone(), BigUint::one())];
        for (i, c) in coords.iter().enumerate() {
            let c_rat = BigRational::from_integer(c.clone());
            terms.push((c_rat, BigUint::from(basis.starred()[i])));
        }
        SqrtSum::new(terms).dist_to_int(&Dyadic::pow2(bits), cfg.bit_budget)
    };

    let pick = |set: &BTreeSet<Vec<BigInt>>,
                eval: &dyn Fn(&[BigInt], i64) -> Result<DyadicInterval>|
     -> Result<(QuadInt, DyadicInterval)> {
        let mut best: Option<(Vec<BigInt>, DyadicInterval)> = None;
        for coords in set {
            let mut bits = WITNESS_WIDTH_BITS;
            let mut cur = eval(coords, bits)?;
            loop {
                match &best {
                    None => break,
                    Some((_, b)) if cur.hi() < b.lo() || b.hi() < cur.lo() => break,
                    Some(_) if bits <= -(cfg.bit_budget as i64) => break,
                    Some((bc, _)) => {
                        bits *= 2;
                        cur = eval(coords, bits)?;
                        best = Some((bc.clone(), eval(bc, bits)?));
                    }
                }
            }
            match &best {
                None => best = Some((coords.clone(), cur)),
                // replace only on a certified strict improvement, so the
                // lexicographically first candidate wins unresolvable ties
                Some((_, b)) if cur.hi() < b.lo() => best = Some((coords.clone(), cur)),
                _ => {}
            }
        }
        let (coords, enc) = best.ok_or_else(|| Error::Internal("empty box".into()))?;
        Ok((
            QuadInt::from_coeffs(basis, {
                let mut v = vec![BigInt::zero(); basis.dim()];
                v[1..].clone_from_slice(&coords);
                v
            })
            .expect("aligned"),
            enc,
        ))
    };

    Ok(BoxTargetBest {
        below: pick(&below_set, &residual_of)?,
        nearest: pick(&near_set, &dist_of)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn close(enc: &DyadicInterval, v: &BigRational) -> bool {
        let mid = enc.midpoint().to_ratio();
        let tol = enc.width().to_ratio() + rat(1, 1_000_000);
        (mid - v).abs() <= tol
    }

    fn int_elem(basis: &Arc<Basis>, coeffs: &[i64]) -> QuadInt {
        QuadInt::from_coeffs(basis, coeffs.iter().map(|&c| BigInt::from(c)).collect()).unwrap()
    }

    /// The incremental walker must agree with a naive per-point evaluation
    /// on every visited key, over mixed-sign boxes.
    #[test]
    fn walker_matches_naive_keys() {
        let basis = Basis::new(2).unwrap();
        let roots = fixed_roots(&basis);
        let spec = BoxSpec {
            ranges: vec![(-2, 3), (1, 4), (-3, -1)],
        };
        let mut seen = Vec::new();
        for first in first_axis_values(&spec) {
            walk_chunk(&roots, &spec, first, |key, coords| {
                seen.push((coords.to_vec(), key));
            });
        }
        assert_eq!(seen.len() as u128, spec.point_count());
        let mut uniq: BTreeSet<Vec<i64>> = BTreeSet::new();
        for (coords, key) in &seen {
            let mut naive: i128 = 0;
            for (c, r) in coords.iter().zip(&roots) {
                naive = naive.wrapping_add((*c as i128).wrapping_mul(*r as i128));
            }
            assert_eq!((naive as u128) & FIX_MASK, *key, "coords {coords:?}");
            for (c, (lo, hi)) in coords.iter().zip(&spec.ranges) {
                assert!(c >= lo && c <= hi);
            }
            uniq.insert(coords.clone());
        }
        assert_eq!(uniq.len() as u128, spec.point_count());
    }

    #[test]
    fn dirichlet_tau1_examples() {
        let basis = Basis::new(1).unwrap();
        let cfg = Config::default();
        let w = dirichlet_search(&basis, 5, &cfg).unwrap();
        assert_eq!(w.w, int_elem(&basis, &[0, 5]));
        assert!(close(&w.dist, &rat(710678, 10000000)));
        assert!(w.certified_upper <= Dyadic::from_ratio_ceil(&rat(1, 5), 64));

        let w = dirichlet_search(&basis, 2, &cfg).unwrap();
        assert_eq!(w.w, int_elem(&basis, &[0, 2]));
        assert!(close(&w.dist, &rat(1715729, 10000000)));
    }

    #[test]
    fn dirichlet_tau2_n3() {
        let basis = Basis::new(2).unwrap();
        let cfg = Config::default();
        let w = dirichlet_search(&basis, 3, &cfg).unwrap();
        // frozen from an independent enumeration: 2*sqrt2 - sqrt3 + 2*sqrt6
        assert_eq!(w.w, int_elem(&basis, &[0, 2, -1, 2]));
        assert!(close(&w.dist, &rat(46441973, 10_000_000_000)));
        assert!(w.certified_upper.to_ratio() <= rat(1, 27));
        assert!(w.w.height() <= BigInt::from(3));
    }

    #[test]
    fn dirichlet_capacity_and_range_errors() {
        let basis = Basis::new(2).unwrap();
        let cfg = Config {
            enum_cap: 10,
            ..Config::default()
        };
        assert!(matches!(
            dirichlet_search(&basis, 4, &cfg),
            Err(Error::Capacity { required: 64, .. })
        ));
        assert!(dirichlet_search(&basis, 1, &Config::default()).is_err());
    }

    #[test]
    fn brute_tau1_examples() {
        let basis = Basis::new(1).unwrap();
        let cfg = Config::default();
        let (w, dist) = brute_min_dist(&basis, 1, &cfg).unwrap();
        assert_eq!(w, int_elem(&basis, &[0, 1])); // sign-canonical +sqrt2
        assert!(close(&dist, &rat(41421356, 100000000)));
        let (w, dist) = brute_min_dist(&basis, 5, &cfg).unwrap();
        assert_eq!(w, int_elem(&basis, &[0, 5]));
        assert!(close(&dist, &rat(710678, 10000000)));
    }

    #[test]
    fn brute_tau2_n1() {
        let basis = Basis::new(2).unwrap();
        let (w, dist) = brute_min_dist(&basis, 1, &Config::default()).unwrap();
        // sqrt2 - sqrt6, distance ~ 0.0352762
        assert_eq!(w, int_elem(&basis, &[0, 1, 0, -1]));
        assert!(close(&dist, &rat(352762, 10000000)));
    }

    #[test]
    fn lower_bound_examples() {
        let cfg = Config::default();
        let b1 = Basis::new(1).unwrap();
        let w = int_elem(&b1, &[0, 5]);
        let lb = certified_dist_lower_bound(&w, 5, &cfg).unwrap();
        // 1/(7 + 5*sqrt2) ~ 0.0710678, and the bound is tight here
        assert!(lb.to_ratio() > rat(70, 1000));
        let dist = certify_dist(&w, WITNESS_WIDTH_BITS, cfg.bit_budget).unwrap();
        // the bound is tight here, so compare against the upper endpoint
        assert!(lb <= *dist.hi());

        let w = int_elem(&b1, &[0, 1]);
        let lb = certified_dist_lower_bound(&w, 1, &cfg).unwrap();
        assert!(lb.to_ratio() > rat(41, 100));

        let b2 = Basis::new(2).unwrap();
        let w = int_elem(&b2, &[0, 1, 1, 0]);
        let lb = certified_dist_lower_bound(&w, 1, &cfg).unwrap();
        assert!(lb.to_ratio() >= rat(4, 1000));
        let dist = certify_dist(&w, WITNESS_WIDTH_BITS, cfg.bit_budget).unwrap();
        assert!(lb <= *dist.hi());
    }

    #[test]
    fn lower_bound_usage_errors() {
        let cfg = Config::default();
        let b1 = Basis::new(1).unwrap();
        assert!(certified_dist_lower_bound(&QuadInt::zero(&b1), 1, &cfg).is_err());
        let with_rational = int_elem(&b1, &[1, 1]);
        assert!(certified_dist_lower_bound(&with_rational, 2, &cfg).is_err());
    }

    #[test]
    fn witness_bound_scan_small() {
        // scale law on a small range; the acceptance suite covers 2..=300
        let basis = Basis::new(1).unwrap();
        let cfg = Config::default();
        for n in 2..=40u64 {
            let w = dirichlet_search(&basis, n, &cfg).unwrap();
            assert!(w.w.is_pure_irrational());
            assert!(w.w.height() <= BigInt::from(n));
            assert!(w.certified_upper.to_ratio() <= rat(1, n as i64));
            // oracle sandwich: the norm lower bound cannot exceed the
            // certified distance (tight cases meet at the upper endpoint)
            let lb = certified_dist_lower_bound(&w.w, n, &cfg).unwrap();
            assert!(lb <= *w.dist.hi());
        }
    }

    #[test]
    fn witness_bound_scan_tau2() {
        let basis = Basis::new(2).unwrap();
        let cfg = Config::default();
        for n in 2..=12u64 {
            let w = dirichlet_search(&basis, n, &cfg).unwrap();
            assert!(w.w.is_pure_irrational());
            assert!(w.w.height() <= BigInt::from(n));
            assert!(w.certified_upper.to_ratio() <= rat(1, (n * n * n) as i64));
            let lb = certified_dist_lower_bound(&w.w, n, &cfg).unwrap();
            assert!(lb.is_positive() && lb <= *w.dist.hi());
            // the brute minimizer over the same height is at most the witness
            let (bw, bdist) = brute_min_dist(&basis, n, &cfg).unwrap();
            assert!(bdist.lo() <= w.dist.hi());
            assert!(bw.height() <= BigInt::from(n));
            // certification width contract
            assert!(bdist.width() <= Dyadic::pow2(WITNESS_WIDTH_BITS));
        }
    }

    #[test]
    fn box_search_finds_target() {
        let basis = Basis::new(1).unwrap();
        let cfg = Config::default();
        // c in [2,8], alpha = 1/2: nearest is 6*sqrt2 (frac .48528),
        // best-below is also 6*sqrt2 with residual .01472
        let spec = BoxSpec::uniform(1, 2, 8);
        let best = box_target_search(&basis, &spec, &rat(1, 2), &cfg).unwrap();
        assert_eq!(best.nearest.0, int_elem(&basis, &[0, 6]));
        assert!(close(&best.nearest.1, &rat(1471863, 100000000)));
        assert_eq!(best.below.0, int_elem(&basis, &[0, 6]));
        assert!(close(&best.below.1, &rat(1471863, 100000000)));
    }

    #[test]
    fn box_search_one_sided_vs_nearest() {
        let basis = Basis::new(1).unwrap();
        let cfg = Config::default();
        // alpha = pi mod 1 ~ 0.14159: in [4,18] the nearest is c=10
        // (frac .14214, above target), best-below is c=5 (frac .07107)
        let alpha = rat(14159265358979, 100000000000000);
        let spec = BoxSpec::uniform(1, 4, 18);
        let best = box_target_search(&basis, &spec, &alpha, &cfg).unwrap();
        assert_eq!(best.nearest.0, int_elem(&basis, &[0, 10]));
        assert_eq!(best.below.0, int_elem(&basis, &[0, 5]));
        assert!(close(&best.below.1, &rat(7052484, 100000000)));
    }

    /// Soundness of the fixed-point sweep: the winners beat (within the
    /// certification width) every box point when each point is certified
    /// naively and independently.
    #[test]
    fn box_search_matches_naive_reference() {
        use num_traits::FromPrimitive;
        let basis = Basis::new(2).unwrap();
        let cfg = Config::default();
        let mut rng = 0x5eed_c0deu64;
        let mut next = move || {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            rng
        };
        for _ in 0..12 {
            let lo = (next() % 5) as i64 - 2;
            let hi = lo + (next() % 3) as i64 + 1;
            let spec = BoxSpec::uniform(3, lo, hi);
            let alpha = rat((next() % 1000) as i64, 1000).min(rat(999, 1000));
            let best = box_target_search(&basis, &spec, &alpha, &cfg).unwrap();
            let tol = rat(1, 1 << 38);
            let win_dist = best.nearest.1.midpoint().to_ratio();
            let win_res = best.below.1.midpoint().to_ratio();
            for a in lo..=hi {
                for b in lo..=hi {
                    for c in lo..=hi {
                        let mk = |v: i64| BigRational::from_i64(v).unwrap();
                        let terms = vec![
                            (-alpha.clone(), BigUint::from(1u32)),
                            (mk(a), BigUint::from(2u32)),
                            (mk(b), BigUint::from(3u32)),
                            (mk(c), BigUint::from(6u32)),
                        ];
                        let s = SqrtSum::new(terms);
                        let d = s
                            .dist_to_int(&Dyadic::pow2(-48), cfg.bit_budget)
                            .unwrap()
                            .midpoint()
                            .to_ratio();
                        assert!(
                            win_dist <= d.clone() + tol.clone(),
                            "nearest beaten at ({a},{b},{c})"
                        );
                        let terms = vec![
                            (alpha.clone(), BigUint::from(1u32)),
                            (mk(-a), BigUint::from(2u32)),
                            (mk(-b), BigUint::from(3u32)),
                            (mk(-c), BigUint::from(6u32)),
                        ];
                        let r = SqrtSum::new(terms)
                            .frac_enclosure(&Dyadic::pow2(-48), cfg.bit_budget)
                            .unwrap()
                            .frac
                            .midpoint()
                            .to_ratio();
                        assert!(
                            win_res <= r.clone() + tol.clone(),
                            "below beaten at ({a},{b},{c})"
                        );
                    }
                }
            }
        }
    }
}
