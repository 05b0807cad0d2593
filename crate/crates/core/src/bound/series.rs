//! Certified upper bounds for the dyadic double series
//!
//! ```text
//! Σ 2^{−c_r·r − c_s·s} / (2^{−r} + 2^{−s})^p
//! ```
//!
//! over the quadrant `r, s ≥ 0` and over the three pieces of `min(r, s) ≤ 0`.
//!
//! Each region is reindexed by `i, j ≥ 0`. The head `i, j ≤ R` is summed in high
//! precision. On every region the summand is dominated by `2^{−κ_i·i − κ_j·j}` (weighted
//! AM-GM on the denominator, or dropping its smaller term), so everything outside the
//! head is at most the corresponding difference of geometric products.

use crate::hp::{Hp, Real};

/// Head cutoff in each index.
pub const HEAD: i64 = 200;

/// How a region index `i ≥ 0` maps onto `r` (or `s`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Axis {
    /// `r = i`, `i ≥ 0`
    NonNeg,
    /// `r = i`, `i ≥ 1`
    Pos,
    /// `r = −i`, `i ≥ 0`
    NonPos,
}

impl Axis {
    fn start(self) -> i64 {
        if self == Axis::Pos {
            1
        } else {
            0
        }
    }

    fn value(self, i: i64) -> i64 {
        if self == Axis::NonPos {
            -i
        } else {
            i
        }
    }
}

/// One double series restricted to one region; exponents are in twelfths.
#[derive(Clone, Copy, Debug)]
struct Region {
    name: &'static str,
    claim: &'static str,
    cr12: i64,
    cs12: i64,
    p12: i64,
    r: Axis,
    s: Axis,
    /// Decay of the dominating product, in twelfths.
    kappa12: (i64, i64),
}

const REGIONS: [Region; 8] = [
    Region { name: "S1: r,s>=0, 2^(-r-7s/12)/(2^-r+2^-s)^(17/12)", claim: "23.8", cr12: 12, cs12: 7, p12: 17, r: Axis::NonNeg, s: Axis::NonNeg, kappa12: (1, 1) },
    Region { name: "S2: r,s>=0, 2^(-r/2-5s/12)/(2^-r+2^-s)^(7/12)", claim: "27", cr12: 6, cs12: 5, p12: 7, r: Axis::NonNeg, s: Axis::NonNeg, kappa12: (2, 2) },
    Region { name: "A1: r,s<=0, p=29/12", claim: "4", cr12: 12, cs12: 7, p12: 29, r: Axis::NonPos, s: Axis::NonPos, kappa12: (5, 5) },
    Region { name: "A2: r>0,s<=0, p=29/12", claim: "1.4", cr12: 12, cs12: 7, p12: 29, r: Axis::Pos, s: Axis::NonPos, kappa12: (12, 22) },
    Region { name: "A3: r<=0,s>0, p=29/12", claim: "3.3", cr12: 12, cs12: 7, p12: 29, r: Axis::NonPos, s: Axis::Pos, kappa12: (17, 7) },
    Region { name: "B1: r,s<=0, p=19/12", claim: "8", cr12: 6, cs12: 5, p12: 19, r: Axis::NonPos, s: Axis::NonPos, kappa12: (4, 4) },
    Region { name: "B2: r>0,s<=0, p=19/12", claim: "4.4", cr12: 6, cs12: 5, p12: 19, r: Axis::Pos, s: Axis::NonPos, kappa12: (6, 14) },
    Region { name: "B3: r<=0,s>0, p=19/12", claim: "5.7", cr12: 6, cs12: 5, p12: 19, r: Axis::NonPos, s: Axis::Pos, kappa12: (13, 5) },
];

/// A certified upper bound `head + tail (+ rounding allowance)` for one series.
#[derive(Clone, Debug)]
pub struct SeriesCertificate {
    pub name: &'static str,
    /// The constant the series is claimed to stay below.
    pub claim: &'static str,
    pub head: Real,
    pub tail: Real,
    /// `head + tail`, inflated by a relative allowance for working-precision rounding.
    pub upper: Real,
    /// `claim − upper`.
    pub slack: Real,
}

impl SeriesCertificate {
    pub fn certified(&self) -> bool {
        self.slack.is_positive()
    }
}

/// Exponent in twelfths and `|r − s|` for the summand at `(r, s)`:
/// summand `= 2^{k/12} · (1 + 2^{−d})^{−p}`.
fn summand_shape(reg: &Region, r: i64, s: i64) -> (i64, u32) {
    let m = (-r).max(-s);
    let k = -reg.cr12 * r - reg.cs12 * s - reg.p12 * m;
    (k, (r - s).unsigned_abs() as u32)
}

struct Pow2 {
    /// `2^q` for `q ∈ [−range, range]`.
    int: Vec<Real>,
    /// `2^{j/12}`, `0 ≤ j < 12`.
    frac: Vec<Real>,
    range: i64,
}

impl Pow2 {
    fn new(hp: &mut Hp, range: i64) -> Self {
        let two = hp.int(2);
        let half = hp.div(&hp.int(1), &two);
        let mut int = vec![hp.int(1); (2 * range + 1) as usize];
        for q in 1..=range {
            int[(range + q) as usize] = hp.mul(&int[(range + q - 1) as usize], &two);
            int[(range - q) as usize] = hp.mul(&int[(range - q + 1) as usize], &half);
        }
        let frac = (0..12).map(|j| hp.pow_ratio(&two, j, 12)).collect();
        Self { int, frac, range }
    }

    /// `2^{k/12}`.
    fn twelfths(&self, hp: &Hp, k: i64) -> Real {
        let (q, j) = (k.div_euclid(12), k.rem_euclid(12));
        assert!(q.abs() <= self.range, "exponent table too small");
        hp.mul(&self.int[(self.range + q) as usize], &self.frac[j as usize])
    }
}

/// `Σ_{i ≥ i0} 2^{−κ i}` and `Σ_{i0 ≤ i ≤ R} 2^{−κ i}`.
fn geometric(hp: &mut Hp, kappa12: i64, i0: i64) -> (Real, Real) {
    let two = hp.int(2);
    let ratio = hp.pow_ratio(&two, -kappa12, 12);
    let denom = hp.sub(&hp.int(1), &ratio);
    let first = hp.pow_ratio(&two, -kappa12 * i0, 12);
    let after = hp.pow_ratio(&two, -kappa12 * (HEAD + 1), 12);
    let full = hp.div(&first, &denom);
    let head = hp.div(&hp.sub(&first, &after), &denom);
    (full, head)
}

fn certify(hp: &mut Hp, pow2: &Pow2, reg: &Region) -> SeriesCertificate {
    let one = hp.int(1);
    // (1 + 2^{-d})^{-p} for d = 0 ..= 2·HEAD
    let factor: Vec<Real> = (0..=2 * HEAD)
        .map(|d| {
            let b = hp.add(&one, &pow2.twelfths(hp, -12 * d));
            hp.pow_ratio(&b, -reg.p12, 12)
        })
        .collect();

    let mut head = hp.int(0);
    for i in reg.r.start()..=HEAD {
        let r = reg.r.value(i);
        let mut row = hp.int(0);
        for j in reg.s.start()..=HEAD {
            let s = reg.s.value(j);
            let (k, d) = summand_shape(reg, r, s);
            let term = hp.mul(&pow2.twelfths(hp, k), &factor[d as usize]);
            row = hp.add(&row, &term);
        }
        head = hp.add(&head, &row);
    }

    let (gi, gi_head) = geometric(hp, reg.kappa12.0, reg.r.start());
    let (gj, gj_head) = geometric(hp, reg.kappa12.1, reg.s.start());
    let tail = hp.sub(&hp.mul(&gi, &gj), &hp.mul(&gi_head, &gj_head));

    let sum = hp.add(&head, &tail);
    let eps = hp.decimal(&format!("1e-{}", hp.digits().saturating_sub(10).max(5)));
    let upper = hp.add(&sum, &hp.mul(&sum, &eps));
    let claim = hp.decimal(reg.claim);
    let slack = hp.sub(&claim, &upper);
    SeriesCertificate { name: reg.name, claim: reg.claim, head, tail, upper, slack }
}

/// Certificates for the two full-quadrant series and the six region sums, in that order.
pub fn series_constants(hp: &mut Hp) -> Vec<SeriesCertificate> {
    // |k/12| ≤ (12 + 7 + 29)·HEAD/12 < 5·HEAD
    let pow2 = Pow2::new(hp, 5 * HEAD);
    REGIONS.iter().map(|reg| certify(hp, &pow2, reg)).collect()
}

/// `f64` summand and its dominating product at region indices `(i, j)`, for tests.
#[cfg(test)]
fn summand_and_majorant(reg: &Region, i: i64, j: i64) -> (f64, f64) {
    let (r, s) = (reg.r.value(i) as f64, reg.s.value(j) as f64);
    let (cr, cs, p) = (reg.cr12 as f64 / 12.0, reg.cs12 as f64 / 12.0, reg.p12 as f64 / 12.0);
    let direct = (-cr * r - cs * s).exp2() / ((-r).exp2() + (-s).exp2()).powf(p);
    let maj = (-(reg.kappa12.0 as f64) / 12.0 * i as f64 - reg.kappa12.1 as f64 / 12.0 * j as f64).exp2();
    (direct, maj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn majorant_dominates_on_head() {
        for reg in &REGIONS {
            for i in reg.r.start()..=60 {
                for j in reg.s.start()..=60 {
                    let (v, m) = summand_and_majorant(reg, i, j);
                    assert!(v <= m * (1.0 + 1e-12), "{} at ({i},{j}): {v} > {m}", reg.name);
                }
            }
        }
    }

    #[test]
    fn shape_matches_direct_formula() {
        for reg in &REGIONS {
            for (i, j) in [(0, 0), (1, 3), (7, 2), (20, 20), (3, 40)] {
                let (i, j) = (i.max(reg.r.start()), j.max(reg.s.start()));
                let (r, s) = (reg.r.value(i), reg.s.value(j));
                let (k, d) = summand_shape(reg, r, s);
                let shaped = (k as f64 / 12.0).exp2() * (1.0 + (-(d as f64)).exp2()).powf(-(reg.p12 as f64) / 12.0);
                let (direct, _) = summand_and_majorant(reg, i, j);
                assert!((shaped / direct - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn certified_values_against_float_oracle() {
        // independent f64 summation to a generous cutoff
        let expected = [23.70333013684482, 26.89882312127426, 1.488018, 0.832960, 2.276909, 3.856645, 3.569352, 4.772795];
        let mut hp = Hp::new(30);
        let certs = series_constants(&mut hp);
        for (c, e) in certs.iter().zip(expected) {
            let up = hp.to_f64(&c.upper);
            let head = hp.to_f64(&c.head);
            assert!(c.certified(), "{}", c.name);
            assert!(head <= e + 1e-6 && up >= e - 1e-6, "{}: head {head}, upper {up}, expected {e}", c.name);
            assert!(up - e < 2e-2, "{}: tail too loose ({up} vs {e})", c.name);
        }
    }
}
