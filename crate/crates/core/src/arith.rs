//! Sums of two squares and the cylinder-norm lattice sums.
//!
//! `r(n)` is the number of pairs `(u, v) ∈ ℤ²` with `u² + v² = n`. The bulk table is
//! filled by sieving representations; [`r2`] enumerates directly and serves as the
//! per-value oracle.

use num_traits::Signed;

use crate::count::disc_count_u64;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::Budget;

/// `r(n)` by direct enumeration over `|u| ≤ √n`.
pub fn r2(n: u64) -> u64 {
    let s = n.isqrt();
    (0..=s)
        .map(|u| {
            let rest = n - u * u;
            let v = rest.isqrt();
            if v * v != rest {
                0
            } else {
                let su = if u == 0 { 1 } else { 2 };
                let sv = if v == 0 { 1 } else { 2 };
                su * sv
            }
        })
        .sum()
}

/// `r(n)` for `0 ≤ n ≤ limit`, with prefix sums of `r` and `r²`.
#[derive(Clone, Debug)]
pub struct RnTable {
    values: Vec<u32>,
    prefix: Vec<u64>,
    prefix_sq: Vec<u64>,
}

impl RnTable {
    /// Sieves all representations `u² + v² ≤ limit`.
    pub fn new(limit: u64) -> Self {
        let len = limit as usize + 1;
        let mut values = vec![0u32; len];
        let s = limit.isqrt();
        for u in 0..=s {
            let su: u32 = if u == 0 { 1 } else { 2 };
            let base = u * u;
            let mut v = 0u64;
            while base + v * v <= limit {
                let sv: u32 = if v == 0 { 1 } else { 2 };
                values[(base + v * v) as usize] += su * sv;
                v += 1;
            }
        }
        let mut prefix = Vec::with_capacity(len);
        let mut prefix_sq = Vec::with_capacity(len);
        let (mut acc, mut acc_sq) = (0u64, 0u64);
        for (n, &r) in values.iter().enumerate() {
            if n > 0 {
                acc += r as u64;
                acc_sq += (r as u64) * (r as u64);
            }
            prefix.push(acc);
            prefix_sq.push(acc_sq);
        }
        Self { values, prefix, prefix_sq }
    }

    pub fn limit(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// `r(n)`; panics if `n` exceeds the table.
    pub fn r(&self, n: u64) -> u64 {
        self.values[n as usize] as u64
    }

    fn check(&self, n: u64) -> Result<()> {
        if n > self.limit() {
            return Err(Error::TableRange { needed: n, limit: self.limit() });
        }
        Ok(())
    }

    /// `Σ_{1≤k≤n} r(k)`.
    pub fn r1_upto(&self, n: u64) -> Result<u64> {
        self.check(n)?;
        Ok(self.prefix[n as usize])
    }

    /// `Σ_{1≤k≤n} r(k)²`.
    pub fn r2_sq_upto(&self, n: u64) -> Result<u64> {
        self.check(n)?;
        Ok(self.prefix_sq[n as usize])
    }

    /// `R₁(x) = Σ_{1≤n≤x} r(n)`.
    pub fn big_r1(&self, x: &Rational) -> Result<u64> {
        let n = nonneg_floor(x)?;
        self.r1_upto(n)
    }

    /// `R₁,₂(x) = Σ_{x<n≤2x} r(n)`.
    pub fn big_r12(&self, x: &Rational) -> Result<u64> {
        if !x.is_positive() {
            return Err(Error::NonPositive { what: "x" });
        }
        let lo = nonneg_floor(x)?;
        let hi = nonneg_floor(&(x * Rational::from_integer(2.into())))?;
        Ok(self.r1_upto(hi)? - self.r1_upto(lo)?)
    }

    /// `R₂(x) = Σ_{x<n≤2x} r(n)²`, defined for `x ≥ 1`.
    pub fn big_r2(&self, x: &Rational) -> Result<u64> {
        if *x < Rational::from_integer(1.into()) {
            return Err(Error::Domain(format!("R2 needs x >= 1, got {x}")));
        }
        let lo = nonneg_floor(x)?;
        let hi = nonneg_floor(&(x * Rational::from_integer(2.into())))?;
        Ok(self.r2_sq_upto(hi)? - self.r2_sq_upto(lo)?)
    }

    /// `Σ_{d | n} r(d)·r(n/d)`.
    pub fn conv_r(&self, n: u64) -> Result<u64> {
        if n == 0 {
            return Err(Error::Domain("conv_r needs n >= 1".into()));
        }
        self.check(n)?;
        let mut total = 0;
        let mut d = 1;
        while d * d <= n {
            if n.is_multiple_of(d) {
                let e = n / d;
                let term = self.r(d) * self.r(e);
                total += if d == e { term } else { 2 * term };
            }
            d += 1;
        }
        Ok(total)
    }

    /// `Σ_{d | n} r(d)·r(n/d)` for every `1 ≤ n ≤ limit`, by a Dirichlet sieve. Index 0 is 0.
    pub fn conv_table(&self) -> Vec<u64> {
        let limit = self.limit() as usize;
        let mut out = vec![0u64; limit + 1];
        for d in 1..=limit {
            let rd = self.values[d] as u64;
            if rd == 0 {
                continue;
            }
            let mut k = 1;
            while d * k <= limit {
                out[d * k] += rd * self.values[k] as u64;
                k += 1;
            }
        }
        out
    }
}

fn nonneg_floor(x: &Rational) -> Result<u64> {
    if x.is_negative() {
        return Err(Error::Domain(format!("expected x >= 0, got {x}")));
    }
    rational::floor_u64(x).ok_or(Error::Overflow("floor of cutoff"))
}

/// An integer triple together with its squared cylinder norm `max(m₁²+m₂², m₃²)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CylinderNormIndex {
    pub m: [i64; 3],
    pub norm_sq: u64,
}

impl CylinderNormIndex {
    pub fn new(m: [i64; 3]) -> Self {
        let planar = (m[0] * m[0] + m[1] * m[1]) as u64;
        let axial = (m[2] * m[2]) as u64;
        Self { m, norm_sq: planar.max(axial) }
    }
}

/// `R₃*(x) = #{m ∈ ℤ³ : 0 < |m|_*² ≤ x}`.
pub fn r3_star(x: &Rational) -> Result<u64> {
    let f = nonneg_floor(x)?;
    let disc = disc_count_u64(f);
    let column = 2 * f.isqrt() + 1;
    Ok(disc * column - 1)
}

/// `g₀ = min(√a, 1/a)`.
pub fn g0(a: &Rational) -> f64 {
    let a = rational::to_f64(a);
    a.sqrt().min(1.0 / a)
}

/// `α₀ = max(a, 1/√a) = 1/g₀`.
pub fn alpha0(a: &Rational) -> f64 {
    let a = rational::to_f64(a);
    a.max(1.0 / a.sqrt())
}

/// Right-hand side `(42/g₀³)·log₊(1.4Z/g₀)` of the inner g*-sum inequality.
pub fn gstar_inner_bound(z: f64, a: &Rational) -> f64 {
    let g0 = g0(a);
    42.0 / g0.powi(3) * (1.4 * z / g0).ln().max(0.0)
}

/// Right-hand side `14α/((α−3)g₀³)·Z^{3−α}` of the g*-tail inequality.
pub fn gstar_tail_bound(z: f64, alpha: f64, a: &Rational) -> f64 {
    let g0 = g0(a);
    14.0 * alpha / ((alpha - 3.0) * g0.powi(3)) * z.powf(3.0 - alpha)
}

/// `Σ_{0<g*(m)≤Z} g*(m)⁻³` by exact enumeration, where `g*(m) = max(√(a(m₁²+m₂²)), |m₃|/a)`.
pub fn gstar_sum_inner(z: f64, a: &Rational, budget: Budget) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::NonPositive { what: "Z" });
    }
    gstar_power_sum(a, 3.0, None, z, budget)
}

/// Head/tail certificate for the g*-tail inequality.
#[derive(Clone, Copy, Debug)]
pub struct TailCertificate {
    /// `Σ_{Z<g*≤Z_max} g*^{-α}` by enumeration.
    pub enumerated: f64,
    /// The tail inequality applied at `Z_max`, bounding `Σ_{g*>Z_max}`.
    pub remainder: f64,
    /// The tail inequality's right-hand side at `Z`.
    pub bound: f64,
}

impl TailCertificate {
    pub fn certified(&self) -> bool {
        self.enumerated + self.remainder <= self.bound
    }

    pub fn slack(&self) -> f64 {
        self.bound - self.enumerated - self.remainder
    }
}

/// Enumerates `Σ_{Z<g*≤Z_max} g*^{-α}` and closes it with the tail bound at `Z_max`.
pub fn gstar_sum_tail(
    z: f64,
    alpha: f64,
    a: &Rational,
    z_max: f64,
    budget: Budget,
) -> Result<TailCertificate> {
    if !(alpha > 3.0) {
        return Err(Error::Domain(format!("tail exponent must exceed 3, got {alpha}")));
    }
    if !(z > 0.0) || !(z < z_max) {
        return Err(Error::InvalidRange(format!("need 0 < Z < Z_max, got Z={z}, Z_max={z_max}")));
    }
    let enumerated = gstar_power_sum(a, alpha, Some(z), z_max, budget)?;
    Ok(TailCertificate {
        enumerated,
        remainder: gstar_tail_bound(z_max, alpha, a),
        bound: gstar_tail_bound(z, alpha, a),
    })
}

/// `Σ g*(m)^{-α}` over `lower < g*(m) ≤ upper` (or `0 < g*(m) ≤ upper`).
///
/// Points are grouped into columns by `n = m₁²+m₂²` (weight `r(n)`). In a column, the
/// `|m₃| ≤ a·√(an)` part shares `g* = √(an)`; the rest has `g* = |m₃|/a` and is read off
/// suffix sums. All window and column boundaries are exact integer comparisons.
pub(crate) fn gstar_power_sum(
    a: &Rational,
    alpha: f64,
    lower: Option<f64>,
    upper: f64,
    budget: Budget,
) -> Result<f64> {
    if !a.is_positive() {
        return Err(Error::NonPositive { what: "a" });
    }
    let (pa, qa) = rational::parts_u128(a).ok_or(Error::Overflow("a numerator/denominator"))?;
    let upper_q = rational::from_f64_exact(upper)?;
    // n ≤ Z²/a and |m₃| ≤ aZ
    let n_cut = |z: &Rational| rational::floor_u64(&(z * z / a));
    let k_cut = |z: &Rational| rational::floor_u64(&(z * a));
    let n_up = n_cut(&upper_q).ok_or(Error::Overflow("planar cutoff"))?;
    let k_up = k_cut(&upper_q).ok_or(Error::Overflow("axial cutoff"))?;
    let (n_low, k_low) = match lower {
        Some(z) => {
            let zq = rational::from_f64_exact(z)?;
            (
                Some(n_cut(&zq).ok_or(Error::Overflow("planar cutoff"))?),
                k_cut(&zq).ok_or(Error::Overflow("axial cutoff"))?,
            )
        }
        None => (None, 0),
    };
    budget.check(n_up as u128 + k_up as u128)?;

    let af = rational::to_f64(a);
    // suffix[k] = Σ_{j=k}^{k_up} j^{-α}, summed from the small end.
    let mut suffix = vec![0.0f64; k_up as usize + 2];
    for k in (1..=k_up as usize).rev() {
        suffix[k] = suffix[k + 1] + (k as f64).powf(-alpha);
    }
    let axial_scale = af.powf(alpha);

    let table = RnTable::new(n_up);
    let p3 = pa.checked_pow(3).ok_or(Error::Overflow("a³"))?;
    let q3 = qa.checked_pow(3).ok_or(Error::Overflow("a³"))?;
    let mut c: u128 = 0;
    let mut total = 0.0f64;
    for n in 0..=n_up {
        let weight = table.r(n);
        if weight == 0 {
            continue;
        }
        // c = ⌊√(a³n)⌋: largest |m₃| with |m₃|/a ≤ √(an)
        let rhs = p3.checked_mul(n as u128).ok_or(Error::Overflow("a³n"))?;
        while (c + 1)
            .checked_mul(c + 1)
            .and_then(|s| s.checked_mul(q3))
            .ok_or(Error::Overflow("column split"))?
            <= rhs
        {
            c += 1;
        }
        let c = c.min(k_up as u128) as u64;
        let mut column = 0.0;
        if n > 0 && n_low.is_none_or(|nl| n > nl) {
            column += (2 * c + 1) as f64 * (af * n as f64).powf(-alpha / 2.0);
        }
        let start = (c + 1).max(k_low + 1);
        if start <= k_up {
            column += 2.0 * axial_scale * suffix[start as usize];
        }
        total += weight as f64 * column;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn r2_examples() {
        assert_eq!(r2(0), 1);
        assert_eq!(r2(1), 4);
        assert_eq!(r2(2), 4);
        assert_eq!(r2(3), 0);
        assert_eq!(r2(25), 12);
    }

    #[test]
    fn sieve_matches_enumeration() {
        let t = RnTable::new(10_000);
        for n in 0..=10_000 {
            assert_eq!(t.r(n), r2(n), "n={n}");
        }
    }

    #[test]
    fn table_invariants() {
        let t = RnTable::new(5000);
        assert_eq!(t.r(0), 1);
        assert!(t.values()[1..].iter().all(|&v| v % 4 == 0));
        let total: u64 = t.values().iter().map(|&v| v as u64).sum();
        assert!(total <= 4 * 5000 + 4);
    }

    #[test]
    fn cumulative_sums() {
        let t = RnTable::new(100);
        assert_eq!(t.big_r1(&q(1, 2)).unwrap(), 0);
        assert_eq!(t.big_r1(&q(1, 1)).unwrap(), 4);
        assert_eq!(t.big_r12(&q(2, 5)).unwrap(), 0);
        assert_eq!(t.big_r12(&q(1, 1)).unwrap(), 4);
        assert_eq!(t.big_r12(&q(5, 2)).unwrap(), 12);
        assert_eq!(t.big_r2(&q(1, 1)).unwrap(), 16);
        assert_eq!(t.big_r2(&q(2, 1)).unwrap(), 16);
        assert!(t.big_r2(&q(1, 2)).is_err());
        assert!(matches!(t.big_r1(&q(101, 1)), Err(Error::TableRange { .. })));
    }

    #[test]
    fn conv_examples_and_sieve() {
        let t = RnTable::new(2000);
        assert_eq!(t.conv_r(1).unwrap(), 16);
        assert_eq!(t.conv_r(2).unwrap(), 32);
        let table = t.conv_table();
        for n in 1..=2000 {
            assert_eq!(table[n as usize], t.conv_r(n).unwrap());
            assert!(t.r(n) * t.r(n) <= table[n as usize]);
        }
    }

    #[test]
    fn cylinder_counts() {
        assert_eq!(r3_star(&q(1, 2)).unwrap(), 0);
        assert_eq!(r3_star(&q(1, 1)).unwrap(), 14);
        assert_eq!(CylinderNormIndex::new([0, 0, 0]).norm_sq, 0);
        assert_eq!(CylinderNormIndex::new([1, 2, -2]).norm_sq, 5);
    }

    #[test]
    fn gstar_inner_examples() {
        let a = q(1, 1);
        assert_eq!(gstar_sum_inner(0.5, &a, Budget::default()).unwrap(), 0.0);
        let v = gstar_sum_inner(1.0, &a, Budget::default()).unwrap();
        assert!((v - 14.0).abs() < 1e-12);
        assert!(v <= gstar_inner_bound(1.0, &a));
        // below g₀ the sum is empty
        let a = q(4, 1);
        assert_eq!(gstar_sum_inner(g0(&a) / 2.0, &a, Budget::default()).unwrap(), 0.0);
    }

    #[test]
    fn gstar_tail_examples() {
        let a = q(1, 1);
        let c = gstar_sum_tail(1.0, 4.0, &a, 20.0, Budget::default()).unwrap();
        assert_eq!(c.bound, 56.0);
        assert!(c.certified());
        let c = gstar_sum_tail(2.0, 5.0, &a, 40.0, Budget::default()).unwrap();
        assert!((c.bound - 8.75).abs() < 1e-12);
        assert!(c.certified());
        assert!(matches!(
            gstar_sum_tail(2.0, 5.0, &a, 2.0, Budget::default()),
            Err(Error::InvalidRange(_))
        ));
        assert!(gstar_sum_tail(1.0, 3.0, &a, 2.0, Budget::default()).is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let err = gstar_sum_inner(1000.0, &q(1, 1), Budget(100)).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn power_sum_matches_pointwise_enumeration() {
        for (a, z, alpha) in [(q(1, 2), 3.5, 3.0), (q(3, 1), 4.0, 5.0), (q(2, 3), 2.25, 4.0)] {
            let af = rational::to_f64(&a);
            let mut brute = 0.0;
            let r = (z * z / af).sqrt().ceil() as i64 + 1;
            let k = (af * z).ceil() as i64 + 1;
            for m1 in -r..=r {
                for m2 in -r..=r {
                    for m3 in -k..=k {
                        if (m1, m2, m3) == (0, 0, 0) {
                            continue;
                        }
                        let g = (af * (m1 * m1 + m2 * m2) as f64).sqrt().max(m3.abs() as f64 / af);
                        if g <= z * (1.0 + 1e-12) {
                            brute += g.powf(-alpha);
                        }
                    }
                }
            }
            let fast = gstar_power_sum(&a, alpha, None, z, Budget::default()).unwrap();
            assert!((fast - brute).abs() < 1e-9 * brute.max(1.0), "{a} {z}: {fast} vs {brute}");
        }
    }
}
