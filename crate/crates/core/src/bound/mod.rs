//! The six-term effective bound for `|P(x)|`, its parameters and preconditions.
//!
//! ```text
//! ℒ = log(100x) + |log a|
//! y = 73.6·a^{1/8}·x^{3/16}·ℒ^{3/8}        z = 0.3852/y · √(x + 2y)
//! ```
//!
//! The bound is stated under `1 ≤ y ≤ x/3`; `1/x ≤ a ≤ x, x ≥ 15000` is a sufficient
//! condition for it.

pub mod series;

use crate::count::{discrepancy, DiscrepancyResult, EllipsoidParams};
use crate::error::Result;
use crate::hp::{Hp, Real};
use crate::rational::Rational;
use crate::Budget;

pub use series::{series_constants, SeriesCertificate};

/// `ℒ = log(100x) + |log a|`.
pub fn l_factor(hp: &mut Hp, a: &Rational, x: &Rational) -> Real {
    let hundred_x = hp.rational(&(x * Rational::from_integer(100.into())));
    let ar = hp.rational(a);
    let l1 = hp.ln(&hundred_x);
    let l2 = hp.ln(&ar).abs();
    hp.add(&l1, &l2)
}

/// Smoothing width `y`, truncation point `z` and the two precondition verdicts.
#[derive(Clone, Debug)]
pub struct YzParams {
    pub l_factor: Real,
    pub y: Real,
    pub z: Real,
    /// `1 ≤ y ≤ x/3`.
    pub precond_27: bool,
    /// `1/x ≤ a ≤ x` and `x ≥ 15000`.
    pub precond_28: bool,
}

pub fn params_yz(hp: &mut Hp, a: &Rational, x: &Rational) -> YzParams {
    let l = l_factor(hp, a, x);
    let ar = hp.rational(a);
    let xr = hp.rational(x);
    let c = hp.decimal("73.6");
    let a18 = hp.pow_ratio(&ar, 1, 8);
    let x316 = hp.pow_ratio(&xr, 3, 16);
    let l38 = hp.pow_ratio(&l, 3, 8);
    let y = hp.mul(&hp.mul(&c, &a18), &hp.mul(&x316, &l38));
    let two_y = hp.mul(&hp.int(2), &y);
    let root = hp.sqrt(&hp.add(&xr, &two_y));
    let cz = hp.decimal("0.3852");
    let z = hp.mul(&hp.div(&cz, &y), &root);
    let third = hp.div(&xr, &hp.int(3));
    let precond_27 = y >= hp.int(1) && y <= third;
    let precond_28 = EllipsoidParams::new(a.clone(), x.clone()).is_ok_and(|p| p.precond_28());
    YzParams { l_factor: l, y, z, precond_27, precond_28 }
}

/// All six term groups of the right-hand side with the derived parameters.
#[derive(Clone, Debug)]
pub struct BoundBreakdown {
    pub l_factor: Real,
    pub y: Real,
    pub z: Real,
    pub alpha0: Real,
    pub g0: Real,
    /// `t1 … t6` in the order of the statement.
    pub terms: [Real; 6],
    pub total: Real,
    pub precond_27: bool,
    pub precond_28: bool,
}

impl BoundBreakdown {
    /// The bound is only asserted when `1 ≤ y ≤ x/3`.
    pub fn is_valid(&self) -> bool {
        self.precond_27
    }
}

/// Evaluates the right-hand side. Cells violating `1 ≤ y ≤ x/3` are returned with
/// `precond_27 = false` rather than rejected.
pub fn theorem_rhs(hp: &mut Hp, a: &Rational, x: &Rational) -> BoundBreakdown {
    let YzParams { l_factor: l, y, z, precond_27, precond_28 } = params_yz(hp, a, x);
    let ar = hp.rational(a);
    let xr = hp.rational(x);
    let one = hp.int(1);

    // α₀ = max(a, 1/√a), g₀ = 1/α₀
    let inv_sqrt_a = hp.div(&one, &hp.sqrt(&ar));
    let alpha0 = if ar > inv_sqrt_a { ar.clone() } else { inv_sqrt_a };
    let g0 = hp.div(&one, &alpha0);
    let alpha0_cubed = hp.mul(&alpha0, &hp.mul(&alpha0, &alpha0));

    let mut pw = |b: &Real, n: i64, d: i64| hp.pow_ratio(b, n, d);
    let a_1_8 = pw(&ar, 1, 8);
    let a_m69_64 = pw(&ar, -69, 64);
    let a_1_4 = pw(&ar, 1, 4);
    let a_m39_64 = pw(&ar, -39, 64);
    let x_11_16 = pw(&xr, 11, 16);
    let x_81_128 = pw(&xr, 81, 128);
    let x_5_8 = pw(&xr, 5, 8);
    let x_75_128 = pw(&xr, 75, 128);
    let x_1_2 = pw(&xr, 1, 2);
    let l_3_8 = pw(&l, 3, 8);
    let l_145_64 = pw(&l, 145, 64);
    let l_5_2 = pw(&l, 5, 2);
    let l_1_4 = pw(&l, 1, 4);
    let l_139_64 = pw(&l, 139, 64);

    let c = |hp: &mut Hp, s: &str| hp.decimal(s);
    let prod = |hp: &Hp, fs: &[&Real]| fs.iter().skip(1).fold(fs[0].clone(), |acc, f| hp.mul(&acc, f));

    let k1237 = c(hp, "1237");
    let t1 = prod(hp, &[&k1237, &a_1_8, &x_11_16, &l_3_8]);
    let k12 = c(hp, "12");
    let t2 = prod(hp, &[&k12, &a_m69_64, &x_81_128, &l_145_64]);

    let k134 = c(hp, "134");
    let k543 = c(hp, "543");
    let k20 = c(hp, "20");
    let inner = hp.add(&hp.mul(&k134, &l_5_2), &hp.mul(&k543, &l_1_4));
    let group = hp.add(&hp.mul(&a_1_4, &inner), &hp.div(&hp.mul(&k20, &l_5_2), &a_1_4));
    let t3 = hp.mul(&group, &x_5_8);

    let t4 = prod(hp, &[&k12, &a_m39_64, &x_75_128, &l_139_64]);

    let k268 = c(hp, "268");
    let k159 = c(hp, "159");
    let k2000 = c(hp, "2000");
    let group = hp.add(
        &hp.add(&hp.div(&hp.mul(&k268, &l), &ar), &hp.mul(&k159, &alpha0_cubed)),
        &k2000,
    );
    let t5 = hp.mul(&group, &x_1_2);

    let k44 = c(hp, "4.4");
    let k1045 = c(hp, "104.5");
    let t6 = hp.mul(&alpha0_cubed, &hp.add(&hp.mul(&k44, &l), &k1045));

    let terms = [t1, t2, t3, t4, t5, t6];
    let total = terms.iter().skip(1).fold(terms[0].clone(), |acc, t| hp.add(&acc, t));
    BoundBreakdown { l_factor: l, y, z, alpha0, g0, terms, total, precond_27, precond_28 }
}

/// Outcome of comparing `|P(x)|` with the evaluated right-hand side.
#[derive(Clone, Debug)]
pub struct TheoremCheck {
    pub breakdown: BoundBreakdown,
    /// `None` when the precondition fails; no count is attempted then.
    pub discrepancy: Option<DiscrepancyResult>,
    pub holds: Option<bool>,
    /// `rhs − |P|`.
    pub margin: Option<Real>,
}

impl TheoremCheck {
    pub fn precondition_failed(&self) -> bool {
        !self.breakdown.precond_27
    }
}

/// Counts exactly and compares `|P(x)|` with the right-hand side.
pub fn check_theorem(hp: &mut Hp, p: &EllipsoidParams, budget: Budget) -> Result<TheoremCheck> {
    let breakdown = theorem_rhs(hp, p.a(), p.x());
    if !breakdown.precond_27 {
        return Ok(TheoremCheck { breakdown, discrepancy: None, holds: None, margin: None });
    }
    let d = discrepancy(hp, p, budget)?;
    let margin = hp.sub(&breakdown.total, &d.abs_p());
    let holds = !margin.is_negative();
    Ok(TheoremCheck { breakdown, discrepancy: Some(d), holds: Some(holds), margin: Some(margin) })
}
