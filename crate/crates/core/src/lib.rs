//! Exact lattice-point counting and effective discrepancy bounds for the rotational
//! ellipsoid `(u₁²+u₂²)/a + a²u₃² ≤ x`.
//!
//! The crate is organised around the quantities that enter the effective estimate
//!
//! ```text
//! |P(x)| ≤ 1237·a^{1/8}·x^{11/16}·ℒ^{3/8} + (terms of lower order in x),   ℒ = log(100x) + |log a|
//! ```
//!
//! - [`count`]: exact counts `N(x)`, the volume `V(x) = (4π/3)x^{3/2}` and `P(x) = N − V`.
//! - [`arith`]: `r(n)`, its cumulative sums and the cylinder-norm sums used for the constants.
//! - [`smoothing`]: the second iterated-integral operator `D⁽²⁾` and the sandwich bounds.
//! - [`fourier`]: closed-form Fourier transforms of the ellipsoid, truncated Poisson sums,
//!   the exponential sums `E_{N,M}` and the second-derivative test.
//! - [`bound`]: the six-term right-hand side, its parameters, and the certified series constants.
//! - [`verify`]: verification suites with extremal witnesses, used by the CLI.
//! - [`cli`]: the `ellipsoid-lattice` command-line front end.
//!
//! See the `examples/` directory of this crate for one runnable program per capability.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod bound;
pub mod cli;
pub mod count;
pub mod error;
pub mod fourier;
pub mod hp;
pub mod quad;
pub mod rational;
pub mod smoothing;
pub mod verify;

pub use count::{discrepancy, lattice_count, volume, DiscrepancyResult, EllipsoidParams};
pub use error::{Error, Result};
pub use hp::Hp;
pub use rational::{parse_rational, Rational};

/// Maximum number of enumeration work units a single call may spend.
///
/// A work unit is one inner-loop step of the enumeration at hand (one disc row, one
/// `(n, m₃)` column, one shell term).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Budget {
    pub const DEFAULT: Budget = Budget(100_000_000);

    pub fn check(self, needed: u128) -> Result<()> {
        if needed > self.0 as u128 {
            return Err(Error::BudgetExceeded { needed, budget: self.0 });
        }
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Direction of the smoothing step: `+u` looks ahead of `x`, `−u` behind it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn signum(self) -> i32 {
        match self {
            Side::Plus => 1,
            Side::Minus => -1,
        }
    }
}
