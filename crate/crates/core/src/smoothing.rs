//! The second iterated-integral smoothing `D⁽²⁾` and the sandwich bounds for the count.
//!
//! ```text
//! F₍₂₎(t)     = ∫₀ᵗ (t − s) F(s) ds
//! D⁽²⁾_{x,u}F = F₍₂₎(x+2u) − 2F₍₂₎(x+u) + F₍₂₎(x) = ∫_x^{x+u} ∫_{t₁}^{t₁+u} F(t₂) dt₂ dt₁
//! ```
//!
//! For the counting function `A(t) = #{m : Q(m) ≤ t}` each lattice point with `Q(m) = q`
//! contributes the second difference of `(t − q)₊²/2`, a piecewise quadratic in `q`. The
//! evaluation in [`d2_count_exact`] is therefore an exact rational.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::RnTable;
use crate::count::{lattice_count, lattice_work, EllipsoidParams};
use crate::error::{Error, Result};
use crate::hp::{Hp, Real};
use crate::quad::{integrate, QuadConfig};
use crate::rational::{self, Rational};
use crate::{Budget, Side};

/// High-precision value of `max_{|v|≤1/3} |φ'''(v)| = φ'''(1/3)`, recorded from the
/// oracle in [`max_phi_third`].
pub const M3_RECORDED: &str = "105.2435279848042383445439780160312199577";

/// `x`, a step length `u > 0` and the side, with `u ≤ x/3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothingParams {
    x: Rational,
    u: Rational,
    side: Side,
}

impl SmoothingParams {
    pub fn new(x: Rational, u: Rational, side: Side) -> Result<Self> {
        if !x.is_positive() {
            return Err(Error::NonPositive { what: "x" });
        }
        if !u.is_positive() {
            return Err(Error::NonPositive { what: "u" });
        }
        if &u * Rational::from_integer(3.into()) > x {
            return Err(Error::Domain(format!(
                "step u = {} exceeds x/3 for x = {}",
                rational::to_exact_string(&u),
                rational::to_exact_string(&x)
            )));
        }
        Ok(Self { x, u, side })
    }

    pub fn x(&self) -> &Rational {
        &self.x
    }

    pub fn u(&self) -> &Rational {
        &self.u
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// `±u`.
    pub fn step(&self) -> Rational {
        match self.side {
            Side::Plus => self.u.clone(),
            Side::Minus => -self.u.clone(),
        }
    }
}

/// `φ(w) = (1+2w)^{7/2} − 2(1+w)^{7/2} + 1`.
pub fn phi(hp: &mut Hp, w: &Real) -> Result<Real> {
    let one = hp.int(1);
    let two = hp.int(2);
    let a = hp.add(&one, &hp.mul(&two, w));
    if a.is_negative() {
        return Err(Error::Domain("φ(w) needs w ≥ −1/2".into()));
    }
    let b = hp.add(&one, w);
    let a72 = pow72(hp, &a);
    let b72 = pow72(hp, &b);
    Ok(hp.add(&hp.sub(&a72, &hp.mul(&two, &b72)), &one))
}

fn pow72(hp: &Hp, v: &Real) -> Real {
    let r = hp.sqrt(v);
    let v2 = hp.mul(v, v);
    hp.mul(&hp.mul(&v2, v), &r)
}

pub fn phi_f64(w: f64) -> f64 {
    (1.0 + 2.0 * w).powf(3.5) - 2.0 * (1.0 + w).powf(3.5) + 1.0
}

/// `φ'''(v) = 105√(1+2v) − (105/4)√(1+v)`.
pub fn phi_third(hp: &mut Hp, v: &Real) -> Real {
    let one = hp.int(1);
    let a = hp.sqrt(&hp.add(&one, &hp.mul(&hp.int(2), v)));
    let b = hp.sqrt(&hp.add(&one, v));
    let c = hp.div(&hp.int(105), &hp.int(4));
    hp.sub(&hp.mul(&hp.int(105), &a), &hp.mul(&c, &b))
}

/// Where `|φ'''|` peaks on `[−1/3, 1/3]` and why.
#[derive(Clone, Debug)]
pub struct M3Certificate {
    /// `φ'''(1/3)`.
    pub m3: Real,
    /// Largest `|φ'''|` seen on the grid, and where.
    pub grid_max: Real,
    pub grid_argmax: Real,
    pub grid_points: usize,
    /// `105/√(5/3) − (105/8)/√(2/3)`, a lower bound for `φ''''` on the interval.
    pub phi4_lower: Real,
    /// `φ'''(−1/3)`.
    pub phi3_left: Real,
}

impl M3Certificate {
    /// `φ''''` > 0 and `φ'''(−1/3) > 0` make `|φ'''| = φ'''` increasing, so the maximum is
    /// at `1/3`; the grid must agree.
    pub fn is_consistent(&self) -> bool {
        self.phi4_lower.is_positive() && self.phi3_left.is_positive() && self.grid_max <= self.m3
    }
}

/// `max_{|v|≤1/3} |φ'''(v)|`: dense grid plus the monotonicity argument.
pub fn max_phi_third(hp: &mut Hp, grid_points: usize) -> M3Certificate {
    let n = grid_points.max(2) as i64;
    let third = hp.div(&hp.int(1), &hp.int(3));
    let mut grid_max = hp.int(0);
    let mut grid_argmax = hp.int(0);
    for k in 0..=n {
        // v = (2k/n − 1)/3
        let v = hp.div(&hp.int(2 * k - n), &hp.int(3 * n));
        let f = phi_third(hp, &v).abs();
        if f > grid_max {
            grid_max = f;
            grid_argmax = v;
        }
    }
    let m3 = phi_third(hp, &third);
    let phi3_left = phi_third(hp, &third.neg());
    let five_thirds = hp.div(&hp.int(5), &hp.int(3));
    let two_thirds = hp.div(&hp.int(2), &hp.int(3));
    let lead = hp.div(&hp.int(105), &hp.sqrt(&five_thirds));
    let trail = hp.div(&hp.div(&hp.int(105), &hp.int(8)), &hp.sqrt(&two_thirds));
    let phi4_lower = hp.sub(&lead, &trail);
    M3Certificate { m3, grid_max, grid_argmax, grid_points: n as usize + 1, phi4_lower, phi3_left }
}

/// `(8π/315)·M₃`, the coefficient of `x^{1/2}·y` in the volume smoothing error.
pub fn volume_error_constant(hp: &mut Hp, m3: &Real) -> Real {
    let pi = hp.pi();
    let c = hp.div(&hp.mul(&hp.int(8), &pi), &hp.int(315));
    hp.mul(&c, m3)
}

/// `|φ(w) − (35/4)w²|` against its Taylor bound `(|w|³/6)·M₃`.
#[derive(Clone, Debug)]
pub struct TaylorDefect {
    pub defect: Real,
    pub bound: Real,
}

impl TaylorDefect {
    pub fn holds(&self) -> bool {
        self.defect <= self.bound
    }
}

pub fn phi_taylor_defect(hp: &mut Hp, w: &Real, m3: &Real) -> Result<TaylorDefect> {
    let third = hp.div(&hp.int(1), &hp.int(3));
    if w.abs() > third {
        return Err(Error::Domain("Taylor defect needs |w| ≤ 1/3".into()));
    }
    let f = phi(hp, w)?;
    let quad = hp.mul(&hp.div(&hp.int(35), &hp.int(4)), &hp.mul(w, w));
    let defect = hp.sub(&f, &quad).abs();
    let w3 = hp.mul(&hp.mul(w, w), w).abs();
    let bound = hp.mul(&hp.div(&w3, &hp.int(6)), m3);
    Ok(TaylorDefect { defect, bound })
}

/// `D⁽²⁾_{x,±u}(V) = (4π/3)·(4x^{7/2}/35)·φ(±u/x)`.
pub fn d2_volume(hp: &mut Hp, s: &SmoothingParams) -> Result<Real> {
    let xr = hp.rational(s.x());
    let w = hp.rational(&(s.step() / s.x()));
    let f = phi(hp, &w)?;
    let x72 = pow72(hp, &xr);
    let pi = hp.pi();
    let c = hp.div(&hp.mul(&hp.int(16), &pi), &hp.int(105));
    Ok(hp.mul(&hp.mul(&c, &x72), &f))
}

/// Floating-point `D⁽²⁾_{x,h}(V)` for a signed step `h`.
pub fn d2_volume_f64(x: f64, h: f64) -> f64 {
    16.0 * std::f64::consts::PI / 105.0 * x.powf(3.5) * phi_f64(h / x)
}

/// `∫_x^{x+h} ∫_{t₁}^{t₁+h} F(t₂) dt₂ dt₁` by nested adaptive quadrature (signed `h`).
pub fn d2_generic<F: Fn(f64) -> f64>(f: F, x: f64, h: f64, cfg: QuadConfig) -> Result<f64> {
    let span = h.abs().max(1.0);
    let inner_cfg = QuadConfig { abs_tol: cfg.abs_tol / (4.0 * span), ..cfg };
    let failure = std::cell::Cell::new(None);
    let outer = integrate(
        |t1| match integrate(&f, t1, t1 + h, inner_cfg) {
            Ok(v) => v,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        },
        x,
        x + h,
        cfg,
    )?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(outer),
    }
}

/// `F₍₂₎(t) = ∫₀ᵗ (t − s) F(s) ds` by adaptive quadrature.
pub fn primitive2<F: Fn(f64) -> f64>(f: F, t: f64, cfg: QuadConfig) -> Result<f64> {
    integrate(|s| (t - s) * f(s), 0.0, t, cfg)
}

/// `F₍₂₎(x+2h) − 2F₍₂₎(x+h) + F₍₂₎(x)`, the first form of the smoothing.
pub fn d2_from_primitive<F: Fn(f64) -> f64>(f: F, x: f64, h: f64, cfg: QuadConfig) -> Result<f64> {
    let p = |t| primitive2(&f, t, cfg);
    Ok(p(x + 2.0 * h)? - 2.0 * p(x + h)? + p(x)?)
}

/// Contribution of one lattice point with `Q(m) = q ≥ 0` to `D⁽²⁾_{x,h}(A)`:
/// `[(x+2h−q)₊² − 2(x+h−q)₊² + (x−q)₊²]/2`.
pub fn d2_point_kernel(q: &Rational, x: &Rational, h: &Rational) -> Rational {
    let sq = |t: Rational| if t.is_positive() { &t * &t } else { Rational::zero() };
    let two = Rational::from_integer(2.into());
    let a = sq(x + &two * h - q);
    let b = sq(x + h - q);
    let c = sq(x - q);
    (a - &two * b + c) / two
}

/// `Σ` of [`d2_point_kernel`] over explicit `Q`-values.
pub fn d2_points(qs: &[Rational], x: &Rational, h: &Rational) -> Rational {
    qs.iter().fold(Rational::zero(), |acc, q| acc + d2_point_kernel(q, x, h))
}

/// `D⁽²⁾_{x,±u}(A)` for the lattice counting function, exactly.
///
/// Points with `Q(m) ≤ min(x, x+2h)` each contribute `h²` and are counted in bulk; only
/// the shell `min < Q(m) < max` is enumerated, by columns `(m₁²+m₂² = n, m₃)` weighted by
/// `r(n)`. Shell arithmetic runs in `i128` over a common denominator.
pub fn d2_count_exact(p: &EllipsoidParams, s: &SmoothingParams, budget: Budget) -> Result<Rational> {
    if p.x() != s.x() {
        return Err(Error::Domain("smoothing x differs from the ellipsoid's x".into()));
    }
    let x = s.x().clone();
    let h = s.step();
    let two = Rational::from_integer(2.into());
    let far = &x + &two * &h;
    let (lo, hi) = if h.is_positive() { (x.clone(), far) } else { (far, x.clone()) };

    let a = p.a();
    let inner = p.with_x(lo.clone())?;
    let hi_params = p.with_x(hi.clone())?;
    let n_max = rational::floor_u64(&(a * &hi)).ok_or(Error::Overflow("planar shell bound"))?;
    let k_max = crate::count::axial_extent(&hi_params);
    let shell_work = (k_max as u128 + 1) * (n_max as u128 + 1);
    budget.check(lattice_work(&inner) + shell_work + n_max as u128)?;

    let bulk = lattice_count(&inner, budget)?;
    let bulk_value = Rational::from_integer(bulk.into()) * &h * &h;

    // Common denominator L: Q(n, m₃) = (q³n + p³m₃²)/(p q²), and x, h.
    let (pa, qa) = (a.numer().clone(), a.denom().clone());
    let q_den = &pa * &qa * &qa;
    let l = q_den.lcm(x.denom()).lcm(h.denom());
    let to_i128 = |v: &BigInt| v.to_i128().ok_or(Error::Overflow("shell scaling"));
    let scale = |r: &Rational| to_i128(&(r.numer() * (&l / r.denom())));
    let xs = scale(&x)?;
    let hs = scale(&h)?;
    let los = scale(&lo)?;
    let his = scale(&hi)?;
    let mult = to_i128(&(&l / &q_den))?;
    let c_planar = to_i128(&(&qa * &qa * &qa))?.checked_mul(mult).ok_or(Error::Overflow("shell scaling"))?;
    let c_axial = to_i128(&(&pa * &pa * &pa))?.checked_mul(mult).ok_or(Error::Overflow("shell scaling"))?;
    // every scaled value below stays under |x̃| + 2|h̃|; its square must fit
    let reach = xs.abs().checked_add(2 * hs.abs()).ok_or(Error::Overflow("shell scaling"))?;
    reach
        .checked_mul(reach)
        .and_then(|r| r.checked_mul(8))
        .ok_or(Error::Overflow("shell kernel"))?;

    let table = RnTable::new(n_max);
    let kernel2 = |qs: i128| -> i128 {
        let sq = |t: i128| if t > 0 { t * t } else { 0 };
        sq(xs + 2 * hs - qs) - 2 * sq(xs + hs - qs) + sq(xs - qs)
    };
    let shell: std::result::Result<Vec<i128>, Error> = (0..=k_max as i64)
        .into_par_iter()
        .map(|m3| {
            let axial = c_axial
                .checked_mul((m3 as i128) * (m3 as i128))
                .ok_or(Error::Overflow("shell axial term"))?;
            let mut col: i128 = 0;
            for n in 0..=n_max {
                let r = table.r(n);
                if r == 0 {
                    continue;
                }
                let qs = c_planar
                    .checked_mul(n as i128)
                    .and_then(|v| v.checked_add(axial))
                    .ok_or(Error::Overflow("shell planar term"))?;
                if qs <= los {
                    continue;
                }
                if qs >= his {
                    break;
                }
                col = col
                    .checked_add(kernel2(qs).checked_mul(r as i128).ok_or(Error::Overflow("shell sum"))?)
                    .ok_or(Error::Overflow("shell sum"))?;
            }
            let sym = if m3 == 0 { 1 } else { 2 };
            col.checked_mul(sym).ok_or(Error::Overflow("shell sum"))
        })
        .collect();
    let mut total: i128 = 0;
    for c in shell? {
        total = total.checked_add(c).ok_or(Error::Overflow("shell sum"))?;
    }
    let l2 = BigInt::from(2) * &l * &l;
    Ok(bulk_value + Rational::new(BigInt::from(total), l2))
}

/// `A(x)` bracketed by `u⁻²D⁽²⁾_{x,u}(A)` from above and `u⁻²D⁽²⁾_{x,−u}(A)` from below.
#[derive(Clone, Debug)]
pub struct SandwichCheck {
    pub count: u64,
    pub upper: Rational,
    pub lower: Rational,
}

impl SandwichCheck {
    pub fn holds(&self) -> bool {
        let c = Rational::from_integer(self.count.into());
        self.lower <= c && c <= self.upper
    }

    /// `min(upper − A, A − lower)`.
    pub fn slack(&self) -> Rational {
        let c = Rational::from_integer(self.count.into());
        let up = &self.upper - &c;
        let down = &c - &self.lower;
        if up < down {
            up
        } else {
            down
        }
    }
}

pub fn sandwich_check(p: &EllipsoidParams, u: &Rational, budget: Budget) -> Result<SandwichCheck> {
    let plus = SmoothingParams::new(p.x().clone(), u.clone(), Side::Plus)?;
    let minus = SmoothingParams::new(p.x().clone(), u.clone(), Side::Minus)?;
    let u2 = u * u;
    let upper = d2_count_exact(p, &plus, budget)? / &u2;
    let lower = d2_count_exact(p, &minus, budget)? / &u2;
    let count = lattice_count(p, budget)?;
    Ok(SandwichCheck { count, upper, lower })
}
