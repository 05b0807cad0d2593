//! Exact lattice-point counts in `(u₁²+u₂²)/a + a²u₃² ≤ x` and the discrepancy `N − V(x)`.
//!
//! With `a = p/q` and `x = X/D` the membership test clears to the integer inequality
//!
//! ```text
//! q³·D·(u₁²+u₂²) + p³·D·u₃² ≤ p·q²·X
//! ```
//!
//! so each `u₃`-slice is a disc `u₁²+u₂² ≤ F(u₃)` with an exactly computed integer
//! radius-squared `F(u₃)`. Slices are counted in parallel and summed; the sum of
//! integers is independent of scheduling.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hp::{Hp, Real};
use crate::rational::{self, Rational};
use crate::Budget;

pub use crate::rational::isqrt_rational_floor;

/// The ellipsoid parameter `a` and the dilation `x`, both positive rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EllipsoidParams {
    a: Rational,
    x: Rational,
}

impl EllipsoidParams {
    pub fn new(a: Rational, x: Rational) -> Result<Self> {
        if !a.is_positive() {
            return Err(Error::NonPositive { what: "a" });
        }
        if !x.is_positive() {
            return Err(Error::NonPositive { what: "x" });
        }
        Ok(Self { a, x })
    }

    /// Parses `a` and `x` from `"p/q"` or integer strings.
    pub fn parse(a: &str, x: &str) -> Result<Self> {
        Self::new(rational::parse_positive(a, "a")?, rational::parse_positive(x, "x")?)
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn x(&self) -> &Rational {
        &self.x
    }

    /// A copy with a different dilation.
    pub fn with_x(&self, x: Rational) -> Result<Self> {
        Self::new(self.a.clone(), x)
    }

    /// `1/x ≤ a ≤ x` and `x ≥ 15000`, decided exactly.
    pub fn precond_28(&self) -> bool {
        let one = Rational::from_integer(1.into());
        let lower = &one / &self.x;
        self.x >= Rational::from_integer(15000.into()) && lower <= self.a && self.a <= self.x
    }

    /// `1 ≤ y ≤ x/3` for the smoothing width `y`, evaluated in high precision.
    pub fn precond_27(&self, hp: &mut Hp) -> bool {
        crate::bound::params_yz(hp, &self.a, &self.x).precond_27
    }

    fn form(&self) -> MembershipForm {
        let (p, q) = (self.a.numer(), self.a.denom());
        let (xn, xd) = (self.x.numer(), self.x.denom());
        MembershipForm {
            planar: q * q * q * xd,
            axial: p * p * p * xd,
            rhs: p * q * q * xn,
        }
    }
}

/// `planar·(u₁²+u₂²) + axial·u₃² ≤ rhs`.
struct MembershipForm {
    planar: BigInt,
    axial: BigInt,
    rhs: BigInt,
}

impl MembershipForm {
    /// `⌊√(x/a²)⌋`, the largest admissible `|u₃|`.
    fn axial_extent(&self) -> u64 {
        let bound = &self.rhs / &self.axial;
        bound.sqrt().to_u64().expect("axial extent fits in u64")
    }

    /// `⌊a(x − a²u₃²)⌋`, or `None` if the slice is empty.
    fn slice_floor(&self, u3: i64) -> Option<u64> {
        let u3 = BigInt::from(u3);
        let rest = &self.rhs - &self.axial * &u3 * &u3;
        if rest.is_negative() {
            return None;
        }
        Some(rest.div_floor(&self.planar).to_u64().expect("slice radius fits in u64"))
    }
}

/// `#{(u₁,u₂) ∈ ℤ² : u₁²+u₂² ≤ f}` for an integer `f`.
///
/// Walks the quarter circle with a decreasing column pointer, so no square roots are
/// taken after the first.
pub fn disc_count_u64(f: u64) -> u64 {
    let s = f.isqrt();
    let mut v = s;
    let mut quarter = 0u64; // points with u₁ ≥ 1, u₂ ≥ 1
    for u1 in 1..=s {
        let rest = f - u1 * u1;
        while v * v > rest {
            v -= 1;
        }
        quarter += v;
    }
    4 * quarter + 4 * s + 1
}

/// `#{(u₁,u₂) ∈ ℤ² : u₁²+u₂² ≤ T}` for a nonnegative rational `T`.
pub fn disc_count(t: &Rational) -> Result<u64> {
    if t.is_negative() {
        return Err(Error::Domain("disc radius² must be nonnegative".into()));
    }
    let f = rational::floor_u64(t).ok_or(Error::Overflow("disc radius"))?;
    Ok(disc_count_u64(f))
}

/// Lattice points of the slice at height `u₃`.
pub fn slice_count(p: &EllipsoidParams, u3: i64) -> u64 {
    p.form().slice_floor(u3).map_or(0, disc_count_u64)
}

/// Work units (inner-loop steps) needed by [`lattice_count`].
pub fn lattice_work(p: &EllipsoidParams) -> u128 {
    let form = p.form();
    let m = form.axial_extent() as u128;
    let f0 = form.slice_floor(0).unwrap_or(0);
    (2 * m + 1) * (f0.isqrt() as u128 + 1)
}

/// Exact `#{u ∈ ℤ³ : (u₁²+u₂²)/a + a²u₃² ≤ x}`.
pub fn lattice_count(p: &EllipsoidParams, budget: Budget) -> Result<u64> {
    budget.check(lattice_work(p))?;
    let form = p.form();
    let m = form.axial_extent() as i64;
    Ok((-m..=m)
        .into_par_iter()
        .map(|u3| form.slice_floor(u3).map_or(0, disc_count_u64))
        .sum())
}

/// `V(x) = (4π/3)·x^{3/2}`.
pub fn volume(hp: &mut Hp, x: &Rational) -> Result<Real> {
    if !x.is_positive() {
        return Err(Error::NonPositive { what: "x" });
    }
    let xr = hp.rational(x);
    let root = hp.sqrt(&xr);
    let pi = hp.pi();
    let four_thirds = hp.div(&hp.int(4), &hp.int(3));
    let c = hp.mul(&four_thirds, &pi);
    Ok(hp.mul(&c, &hp.mul(&xr, &root)))
}

/// Count, volume and discrepancy at one `(a, x)`.
#[derive(Clone, Debug)]
pub struct DiscrepancyResult {
    pub n_count: u64,
    pub volume: Real,
    pub p_value: Real,
}

/// `P(x) = N(x) − V(x)`.
pub fn discrepancy(hp: &mut Hp, p: &EllipsoidParams, budget: Budget) -> Result<DiscrepancyResult> {
    let n_count = lattice_count(p, budget)?;
    let volume = volume(hp, p.x())?;
    let n = hp.big_int(&BigInt::from(n_count));
    let p_value = hp.sub(&n, &volume);
    Ok(DiscrepancyResult { n_count, volume, p_value })
}

impl DiscrepancyResult {
    /// `|P|` as a high-precision real.
    pub fn abs_p(&self) -> Real {
        self.p_value.abs()
    }
}

/// Whether the integer point `u` lies in the ellipsoid, by the cleared inequality.
pub fn contains(p: &EllipsoidParams, u: [i64; 3]) -> bool {
    let f = p.form();
    let planar = BigInt::from(u[0] * u[0] + u[1] * u[1]);
    let axial = BigInt::from(u[2]) * BigInt::from(u[2]);
    &f.planar * planar + &f.axial * axial <= f.rhs
}

/// `⌊x/a²⌋`-based axial extent, exposed for sizing auxiliary tables.
pub fn axial_extent(p: &EllipsoidParams) -> u64 {
    p.form().axial_extent()
}

/// `⌊a·x⌋`, the planar radius² of the central slice.
pub fn planar_extent(p: &EllipsoidParams) -> u64 {
    p.form().slice_floor(0).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: &str, x: &str) -> EllipsoidParams {
        EllipsoidParams::parse(a, x).unwrap()
    }

    fn brute(a: f64, x: f64) -> u64 {
        // float oracle only used on small, non-boundary-sensitive inputs
        let r = (a * x).sqrt().ceil() as i64 + 1;
        let h = (x.sqrt() / a).ceil() as i64 + 1;
        let mut n = 0;
        for u1 in -r..=r {
            for u2 in -r..=r {
                for u3 in -h..=h {
                    let q = ((u1 * u1 + u2 * u2) as f64) / a + a * a * (u3 * u3) as f64;
                    if q <= x + 1e-9 {
                        n += 1;
                    }
                }
            }
        }
        n
    }

    #[test]
    fn disc_examples() {
        let q = |n: i64, d: i64| Rational::new(n.into(), d.into());
        assert_eq!(disc_count(&q(0, 1)).unwrap(), 1);
        assert_eq!(disc_count(&q(1, 1)).unwrap(), 5);
        assert_eq!(disc_count(&q(2, 1)).unwrap(), 9);
        assert_eq!(disc_count(&q(5, 2)).unwrap(), 9);
        assert_eq!(disc_count(&q(25, 1)).unwrap(), 81);
    }

    #[test]
    fn lattice_examples() {
        let b = Budget::default();
        assert_eq!(lattice_count(&params("1", "1"), b).unwrap(), 7);
        assert_eq!(lattice_count(&params("4", "1"), b).unwrap(), 13);
        assert_eq!(lattice_count(&params("1/4", "1"), b).unwrap(), 9);
    }

    #[test]
    fn matches_float_oracle_off_boundary() {
        for (a, x) in [("1", "10"), ("2", "37/2"), ("1/3", "25"), ("3", "41")] {
            let p = params(a, x);
            let (af, xf) = (rational::to_f64(p.a()), rational::to_f64(p.x()));
            assert_eq!(lattice_count(&p, Budget::default()).unwrap(), brute(af, xf), "{a} {x}");
        }
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(EllipsoidParams::parse("1", "0").is_err());
        assert!(EllipsoidParams::parse("0", "1").is_err());
        assert!(EllipsoidParams::parse("1", "0.5").is_err());
    }

    #[test]
    fn volume_scaling() {
        let mut hp = Hp::new(40);
        let q = |n: i64| Rational::from_integer(n.into());
        let v1 = volume(&mut hp, &q(1)).unwrap();
        let v4 = volume(&mut hp, &q(4)).unwrap();
        let v100 = volume(&mut hp, &q(100)).unwrap();
        let f1 = hp.to_f64(&v1);
        assert!((f1 - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-15);
        assert!((hp.to_f64(&v4) / f1 - 8.0).abs() < 1e-14);
        assert!((hp.to_f64(&v100) / f1 - 1000.0).abs() < 1e-11);
    }

    #[test]
    fn discrepancy_at_unit_ball() {
        let mut hp = Hp::new(50);
        let d = discrepancy(&mut hp, &params("1", "1"), Budget::default()).unwrap();
        assert_eq!(d.n_count, 7);
        let p = hp.to_f64(&d.p_value);
        assert!((p - (7.0 - 4.0 * std::f64::consts::PI / 3.0)).abs() < 1e-14);
        assert!(p > 2.81120 && p < 2.81121);
    }

    #[test]
    fn precondition_28() {
        assert!(params("1", "15000").precond_28());
        assert!(!params("1", "14999").precond_28());
        assert!(params("1/15000", "15000").precond_28());
        assert!(!params("1/15001", "15000").precond_28());
    }

    #[test]
    fn budget_rejects_large_counts() {
        let err = lattice_count(&params("1", "1000000"), Budget(1000)).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }
}
