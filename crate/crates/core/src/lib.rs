//! Construction and certified verification of sums of square roots whose
//! fractional parts are provably tiny or provably close to a target.
//!
//! The crate is organized around one exact substrate and two search layers:
//!
//! * [`ring`] — exact arithmetic in Z[sqrt(p_1),...,sqrt(p_tau)] over the
//!   squarefree-product basis, with heights, Galois conjugation and field
//!   norms;
//! * [`eval`] — dyadic interval enclosures of square-root sums with
//!   automatic precision escalation (no floating point anywhere on the
//!   certified path);
//! * [`pigeonhole`] — exhaustive searches for ring elements of bounded
//!   height with small distance to the integers, plus norm-based certified
//!   lower bounds;
//! * [`greedy`] — the dyadic ladder and one-sided greedy descent used to
//!   approximate arbitrary targets from below, and the shift that makes
//!   all coordinates positive;
//! * [`series`] — exact rational asymptotic expansions of perturbed square
//!   roots;
//! * [`pairs`] — matched plus/minus sums of perturbed square roots whose
//!   expansions cancel to prescribed depth, and the integer instances they
//!   induce;
//! * [`driver`] — end-to-end solvers and exponent-scan harnesses.

pub mod driver;
pub mod error;
pub mod eval;
pub mod greedy;
pub mod pairs;
pub mod pigeonhole;
pub mod ring;
pub mod series;

pub use error::{Error, Result};
pub use ring::MAX_TAU;

/// Default cap on enumeration sizes (points held in memory at once).
pub const DEFAULT_ENUM_CAP: u64 = 8_000_000;

/// Runtime limits shared by the search modules.
#[derive(Clone, Copy, Debug)]
pub struct Config {
    pub enum_cap: u64,
    pub bit_budget: u32,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            enum_cap: DEFAULT_ENUM_CAP,
            bit_budget: eval::DEFAULT_BIT_BUDGET,
        }
    }
}
