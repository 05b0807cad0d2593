//! Poisson-summation side: Fourier transforms of the ellipsoid, truncated smoothed
//! Poisson sums, the exponential sums `E_{N,M}` and the second-derivative test.
//!
//! With `g(m) = √(a(m₁²+m₂²) + m₃²/a²)` the transform of the indicator of `Q(u) ≤ t` is
//!
//! ```text
//! I(m,t)  = −√t·cos(2πg√t)/(πg²) + sin(2πg√t)/(2π²g³)
//! I₂(m,t) = t^{3/2}cos/(π³g⁴) − 3t·sin/(π⁴g⁵) − 15√t·cos/(4π⁵g⁶) + 15·sin/(8π⁶g⁷)
//! ```
//!
//! where `I₂(m,·)` is the second primitive of `I(m,·)` vanishing to first order at 0.
//! Phases `g√t` are formed in double-double arithmetic from the exact rational `g²` and
//! reduced mod 1 before any trigonometric call.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Signed;
use rayon::prelude::*;

use crate::arith::{self, RnTable};
use crate::count::EllipsoidParams;
use crate::error::{Error, Result};
use crate::quad::{integrate, QuadConfig};
use crate::rational::{self, Rational};
use crate::smoothing::{primitive2, SmoothingParams};
use crate::Budget;

mod dd {
    //! Minimal double-double arithmetic (value = hi + lo, |lo| ≤ ulp(hi)/2).

    #[derive(Clone, Copy, Debug)]
    pub struct Dd {
        pub hi: f64,
        pub lo: f64,
    }

    fn quick_two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd { hi: s, lo: b - (s - a) }
    }

    fn two_prod(a: f64, b: f64) -> (f64, f64) {
        let p = a * b;
        (p, a.mul_add(b, -p))
    }

    impl Dd {
        pub fn from_u128(v: u128) -> Dd {
            let hi = v as f64;
            let rest = v as i128 - hi as i128;
            quick_two_sum(hi, rest as f64)
        }

        pub fn from_f64(v: f64) -> Dd {
            Dd { hi: v, lo: 0.0 }
        }

        pub fn mul(self, o: Dd) -> Dd {
            let (p, e) = two_prod(self.hi, o.hi);
            quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi))
        }

        fn sub_mul_f64(self, b: Dd, q: f64) -> Dd {
            // self − b·q
            let (p, e) = two_prod(b.hi, q);
            let s = self.hi - p;
            let v = s - self.hi;
            let err = (self.hi - (s - v)) - (p + v);
            quick_two_sum(s, err + self.lo - e - b.lo * q)
        }

        pub fn div(self, o: Dd) -> Dd {
            let q1 = self.hi / o.hi;
            let r = self.sub_mul_f64(o, q1);
            let q2 = r.hi / o.hi;
            let r = r.sub_mul_f64(o, q2);
            let q3 = r.hi / o.hi;
            let s = quick_two_sum(q1, q2);
            quick_two_sum(s.hi, s.lo + q3)
        }

        pub fn sqrt(self) -> Dd {
            if self.hi <= 0.0 {
                return Dd { hi: 0.0, lo: 0.0 };
            }
            let x = self.hi.sqrt();
            let r = self.sub_mul_f64(Dd::from_f64(x), x);
            quick_two_sum(x, r.hi / (2.0 * x))
        }

        /// `self − round(self)`, in `[−1/2, 1/2]`.
        pub fn frac(self) -> f64 {
            let k = self.hi.round();
            (self.hi - k) + self.lo
        }
    }
}

use dd::Dd;

/// `e(w) = exp(2πiw)` for a phase already reduced mod 1.
pub fn unit_exp(reduced: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * reduced)
}

/// Exact `g²(√n, 0, m₃) = a·n + m₃²/a² = (p³n + q³m₃²)/(q·p²)` for `a = p/q`, as a
/// double-double.
fn g_squared(a: &Rational, n: u64, m3: u64) -> Result<Dd> {
    let (p, q) = rational::parts_u128(a).ok_or(Error::Overflow("a numerator/denominator"))?;
    let ovf = || Error::Overflow("g² numerator");
    let p3 = p.checked_pow(3).ok_or_else(ovf)?;
    let q3 = q.checked_pow(3).ok_or_else(ovf)?;
    let num = p3
        .checked_mul(n as u128)
        .and_then(|v| q3.checked_mul((m3 as u128) * (m3 as u128)).and_then(|w| v.checked_add(w)))
        .ok_or_else(ovf)?;
    let den = q.checked_mul(p * p).ok_or_else(ovf)?;
    Ok(Dd::from_u128(num).div(Dd::from_u128(den)))
}

/// A nonzero frequency `m ∈ ℤ³` with cached `g(m)` and `g*(m)`.
#[derive(Clone, Copy, Debug)]
pub struct FourierIndex {
    m: [i64; 3],
    g2: Dd,
    g: f64,
    g_star: f64,
}

impl FourierIndex {
    pub fn new(m: [i64; 3], a: &Rational) -> Result<Self> {
        if m == [0, 0, 0] {
            return Err(Error::Domain("Fourier index must be nonzero".into()));
        }
        let n = (m[0] * m[0] + m[1] * m[1]) as u64;
        let k = m[2].unsigned_abs();
        Self::from_column(m, n, k, a)
    }

    fn from_column(m: [i64; 3], n: u64, k: u64, a: &Rational) -> Result<Self> {
        let g2 = g_squared(a, n, k)?;
        let af = rational::to_f64(a);
        let g_star = (af * n as f64).sqrt().max(k as f64 / af);
        Ok(Self { m, g2, g: g2.hi.sqrt(), g_star })
    }

    pub fn m(&self) -> [i64; 3] {
        self.m
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn g_star(&self) -> f64 {
        self.g_star
    }

    /// `g√t` reduced mod 1.
    pub fn phase(&self, t: f64) -> f64 {
        self.g2.mul(Dd::from_f64(t)).sqrt().frac()
    }
}

/// `f(n, m) = √(a·n + m²/a²)`.
pub fn f_phase(n: f64, m: f64, a: &Rational) -> f64 {
    let a = rational::to_f64(a);
    (a * n + m * m / (a * a)).sqrt()
}

/// `I(m, t) = ∫_{Q(u)≤t} e(m·u) du` in closed form.
pub fn i_closed(m: &FourierIndex, t: f64) -> f64 {
    let (s, c) = (2.0 * PI * m.phase(t)).sin_cos();
    let g = m.g;
    -t.sqrt() * c / (PI * g * g) + s / (2.0 * PI * PI * g * g * g)
}

/// Second primitive `I₂(m, t)` of `I(m, ·)` in closed form.
pub fn i2_closed(m: &FourierIndex, t: f64) -> f64 {
    let (s, c) = (2.0 * PI * m.phase(t)).sin_cos();
    let cw = i2_coefficients(t);
    let g = m.g;
    let g4 = g.powi(4);
    cw[0] * c / g4 - cw[1] * s / (g4 * g) - cw[2] * c / (g4 * g * g) + cw[3] * s / (g4 * g * g * g)
}

/// `|I₂(m,t)| ≤ Σ_k c_k(t)·g^{−k}`, `k = 4..7`, with
/// `c = (t^{3/2}/π³, 3t/π⁴, 15√t/(4π⁵), 15/(8π⁶))`.
pub fn i2_coefficients(t: f64) -> [f64; 4] {
    let rt = t.sqrt();
    [
        t * rt / PI.powi(3),
        3.0 * t / PI.powi(4),
        15.0 * rt / (4.0 * PI.powi(5)),
        15.0 / (8.0 * PI.powi(6)),
    ]
}

/// `|I(m,t)| ≤ √t/(πg²) + 1/(2π²g³)`.
pub fn i_magnitude_bound(m: &FourierIndex, t: f64) -> f64 {
    let g = m.g;
    t.sqrt() / (PI * g * g) + 1.0 / (2.0 * PI * PI * g * g * g)
}

pub fn i2_magnitude_bound(m: &FourierIndex, t: f64) -> f64 {
    let c = i2_coefficients(t);
    (0..4).map(|k| c[k] / m.g.powi(k as i32 + 4)).sum()
}

/// Quadrature oracle for `I`: the transform of the ball after the volume-preserving
/// change of variables, `2π·t^{3/2} ∫₀¹ cos(2πg√t·v)(1 − v²) dv`.
pub fn i_quadrature(m: &FourierIndex, t: f64, cfg: QuadConfig) -> Result<f64> {
    let w = m.g * t.sqrt();
    let v = integrate(|v| (2.0 * PI * w * v).cos() * (1.0 - v * v), 0.0, 1.0, cfg)?;
    Ok(2.0 * PI * t.powf(1.5) * v)
}

/// Quadrature oracle for `I₂`: `∫₀ᵗ (t − s)·I(m, s) ds`.
pub fn i2_quadrature(m: &FourierIndex, t: f64, cfg: QuadConfig) -> Result<f64> {
    primitive2(|s| i_closed(m, s), t, cfg)
}

/// Truncated Poisson sum for `D⁽²⁾_{x,±u}(P)` with its certified tail.
#[derive(Clone, Copy, Debug)]
pub struct PoissonPartial {
    /// `Σ_{0<g*(m)≤Z} D⁽²⁾_{x,±u}(I(m,·))`.
    pub partial: f64,
    /// Bound on `Σ_{g*(m)>Z} |D⁽²⁾_{x,±u}(I(m,·))|`.
    pub tail: f64,
    /// Number of frequencies `m` in the partial sum.
    pub frequencies: u64,
}

impl PoissonPartial {
    pub fn band(&self) -> (f64, f64) {
        (self.partial - self.tail, self.partial + self.tail)
    }

    pub fn contains(&self, v: f64) -> bool {
        let (lo, hi) = self.band();
        lo <= v && v <= hi
    }
}

/// Enumerates `0 < g*(m) ≤ Z` by columns `(n = m₁²+m₂², |m₃|)` weighted by
/// `r(n)·(2 if m₃ ≠ 0)`; each term is `I₂(x+2h) − 2I₂(x+h) + I₂(x)`.
///
/// The tail uses `|I₂(m,t)| ≤ Σ_k c_k(t)g*^{−k}` with `c_k` at the largest of the three
/// arguments, and the cylinder-norm tail inequality with `α = k` for `k = 4..7`.
pub fn poisson_d2_partial(
    p: &EllipsoidParams,
    s: &SmoothingParams,
    z: f64,
    budget: Budget,
) -> Result<PoissonPartial> {
    if !(z > 0.0) {
        return Err(Error::NonPositive { what: "Z" });
    }
    let a = p.a();
    let x = rational::to_f64(s.x());
    let h = rational::to_f64(&s.step());
    let t_max = x.max(x + 2.0 * h);
    let g0 = arith::g0(a);
    let c = i2_coefficients(t_max);
    let tail = 4.0
        * (0..4)
            .map(|i| {
                let k = (i + 4) as f64;
                c[i] * 14.0 * k / ((k - 3.0) * g0.powi(3)) * z.powf(3.0 - k)
            })
            .sum::<f64>();

    let zq = rational::from_f64_exact(z)?;
    let n_max = rational::floor_u64(&(&zq * &zq / a)).ok_or(Error::Overflow("planar cutoff"))?;
    let k_max = rational::floor_u64(&(&zq * a)).ok_or(Error::Overflow("axial cutoff"))?;
    budget.check((n_max as u128 + 1) * (k_max as u128 + 1) + n_max as u128)?;
    let table = RnTable::new(n_max);

    let ts = [x + 2.0 * h, x + h, x];
    let columns: Vec<Result<(f64, u64)>> = (0..=k_max)
        .into_par_iter()
        .map(|k| {
            let mut acc = 0.0;
            let mut count = 0u64;
            let sym = if k == 0 { 1 } else { 2 };
            for n in 0..=n_max {
                let r = table.r(n);
                if r == 0 || (n == 0 && k == 0) {
                    continue;
                }
                let m = FourierIndex::from_column([0, 0, k as i64], n, k, a)?;
                let d2 = i2_closed(&m, ts[0]) - 2.0 * i2_closed(&m, ts[1]) + i2_closed(&m, ts[2]);
                let w = r * sym;
                acc += w as f64 * d2;
                count += w;
            }
            Ok((acc, count))
        })
        .collect();
    let mut partial = 0.0;
    let mut frequencies = 0;
    for col in columns {
        let (v, c) = col?;
        partial += v;
        frequencies += c;
    }
    Ok(PoissonPartial { partial, tail, frequencies })
}

/// Ranges and parameters of the double sum `E_{N,M}(U, W)`.
#[derive(Clone, Debug)]
pub struct ExpSumSpec {
    pub n: f64,
    pub m: f64,
    pub u: u64,
    pub w: u64,
    pub t: f64,
    pub a: Rational,
    /// Shift length of the differencing step.
    pub h: u64,
}

impl ExpSumSpec {
    /// `N, M ≥ 1`, `U ∈ [N, 2N]`, `W ∈ [M, √2·M]`, `t > 0`.
    pub fn validate(&self) -> Result<()> {
        if !(self.n >= 1.0 && self.m >= 1.0) {
            return Err(Error::Domain("need N, M ≥ 1".into()));
        }
        let (u, w) = (self.u as f64, self.w as f64);
        if !(u >= self.n && u <= 2.0 * self.n) {
            return Err(Error::InvalidRange(format!("U = {} outside [N, 2N]", self.u)));
        }
        if !(w >= self.m && w * w <= 2.0 * self.m * self.m) {
            return Err(Error::InvalidRange(format!("W = {} outside [M, √2·M]", self.w)));
        }
        if !(self.t > 0.0) {
            return Err(Error::NonPositive { what: "t" });
        }
        if !self.a.is_positive() {
            return Err(Error::NonPositive { what: "a" });
        }
        Ok(())
    }

    /// Integer `n` with `N < n ≤ U`.
    fn n_range(&self) -> std::ops::RangeInclusive<u64> {
        (self.n.floor() as u64 + 1)..=self.u
    }

    fn m_range(&self) -> std::ops::RangeInclusive<u64> {
        (self.m.floor() as u64 + 1)..=self.w
    }

    /// `10 ≤ H ≤ M/2`.
    pub fn weyl_admissible(&self) -> bool {
        self.h >= 10 && (self.h as f64) <= self.m / 2.0
    }
}

/// `E_{N,M}(U, W) = Σ_{N<n≤U} r(n) Σ_{M<m≤W} e(f(n,m)√t)`, summed directly.
pub fn exp_sum(spec: &ExpSumSpec) -> Result<Complex64> {
    spec.validate()?;
    let table = RnTable::new(spec.u);
    exp_sum_with(&table, spec)
}

pub fn exp_sum_with(table: &RnTable, spec: &ExpSumSpec) -> Result<Complex64> {
    if spec.u > table.limit() {
        return Err(Error::TableRange { needed: spec.u, limit: table.limit() });
    }
    let mut total = Complex64::new(0.0, 0.0);
    for n in spec.n_range() {
        let r = table.r(n);
        if r == 0 {
            continue;
        }
        let mut row = Complex64::new(0.0, 0.0);
        for m in spec.m_range() {
            let w = g_squared(&spec.a, n, m)?.mul(Dd::from_f64(spec.t)).sqrt();
            row += unit_exp(w.frac());
        }
        total += row * r as f64;
    }
    Ok(total)
}

/// `F(τ) = (f(τ, m+h) − f(τ, m))·√t`, written as a quotient to avoid cancellation.
pub fn f_difference(tau: f64, m: f64, h: f64, t: f64, a: f64) -> f64 {
    let a2 = a * a;
    let big = (a * tau + (m + h) * (m + h) / a2).sqrt();
    let small = (a * tau + m * m / a2).sqrt();
    ((2.0 * m + h) * h / a2) / (big + small) * t.sqrt()
}

/// `F''(τ) = (a²√t/4)·[(aτ+m²/a²)^{−3/2} − (aτ+(m+h)²/a²)^{−3/2}]`.
pub fn f_difference_second(tau: f64, m: f64, h: f64, t: f64, a: f64) -> f64 {
    let a2 = a * a;
    let lo = a * tau + m * m / a2;
    let hi = a * tau + (m + h) * (m + h) / a2;
    a2 * t.sqrt() / 4.0 * (lo.powf(-1.5) - hi.powf(-1.5))
}

/// `F''` from its integral representation `(3/4)√t ∫_m^{m+h} ξ dξ/(aτ+ξ²/a²)^{5/2}`.
pub fn f_difference_second_integral(tau: f64, m: f64, h: f64, t: f64, a: f64, cfg: QuadConfig) -> Result<f64> {
    let a2 = a * a;
    let v = integrate(|xi| xi / (a * tau + xi * xi / a2).powf(2.5), m, m + h, cfg)?;
    Ok(0.75 * t.sqrt() * v)
}

/// `Λ = (3/4)·h·M·√t/(2aN + 2M²/a²)^{5/2}` and `8Λ`.
pub fn lambda_bounds(h: u64, n: f64, m: f64, t: f64, a: &Rational) -> (f64, f64) {
    let a = rational::to_f64(a);
    let lam = 0.75 * h as f64 * m * t.sqrt() / (2.0 * a * n + 2.0 * m * m / (a * a)).powf(2.5);
    (lam, 8.0 * lam)
}

/// `|Σ_{N<n≤U} e(F(n))|` against `40(U−N)√Λ + 11/√Λ`.
#[derive(Clone, Copy, Debug)]
pub struct VdcCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub lambda: f64,
}

impl VdcCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }

    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

pub fn vdc_check(spec: &ExpSumSpec, h: u64, m: u64) -> Result<VdcCheck> {
    spec.validate()?;
    if h == 0 {
        return Err(Error::Domain("h must be ≥ 1".into()));
    }
    let (mf, top) = (m as f64, (m + h) as f64);
    if mf < spec.m || top > spec.w as f64 {
        return Err(Error::InvalidRange(format!("m = {m}, m + h = {} not inside [M, W]", m + h)));
    }
    let a = rational::to_f64(&spec.a);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in spec.n_range() {
        let f = f_difference(n as f64, mf, h as f64, spec.t, a);
        sum += unit_exp(f - f.round());
    }
    let (lambda, _) = lambda_bounds(h, spec.n, spec.m, spec.t, &spec.a);
    let width = spec.u as f64 - spec.n;
    let rhs = 40.0 * width.max(0.0) * lambda.sqrt() + 11.0 / lambda.sqrt();
    Ok(VdcCheck { lhs: sum.norm(), rhs, lambda })
}

/// Which branch the shift length falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeylCase {
    /// `10 ≤ H ≤ M/2`.
    I,
    /// The unfloored expression exceeds `M/2`.
    II,
    /// The unfloored expression is below 10.
    III,
}

#[derive(Clone, Copy, Debug)]
pub struct WeylChoice {
    /// `0.1·M^{−1/3}·f^{5/3}·t^{−1/6}`.
    pub expr: f64,
    pub h: i64,
    pub case: WeylCase,
}

/// `H = ⌊0.1·M^{−1/3}·f^{5/3}·t^{−1/6}⌋` and its case. Case I is tested first.
pub fn weyl_h(m: f64, f: f64, t: f64) -> WeylChoice {
    let expr = 0.1 * m.powf(-1.0 / 3.0) * f.powf(5.0 / 3.0) * t.powf(-1.0 / 6.0);
    weyl_classify(m, expr)
}

/// Classification of an already evaluated expression.
pub fn weyl_classify(m: f64, expr: f64) -> WeylChoice {
    let h = expr.floor() as i64;
    let case = if h >= 10 && (h as f64) <= m / 2.0 {
        WeylCase::I
    } else if expr > m / 2.0 {
        WeylCase::II
    } else {
        WeylCase::III
    };
    WeylChoice { expr, h, case }
}

/// `|S^{[j]}(N,M)|` against `(4/f^j(N,M))·sup|E_{N,M}(u,w)|`.
#[derive(Clone, Copy, Debug)]
pub struct PartialSummationCheck {
    pub s_abs: f64,
    pub sup_e: f64,
    /// `(u, w)` where the supremum is attained.
    pub argsup: (u64, u64),
    pub bound: f64,
}

impl PartialSummationCheck {
    pub fn holds(&self) -> bool {
        self.s_abs <= self.bound
    }
}

/// Evaluates `S^{[j]}` and every `E_{N,M}(u, w)` on the integer grid (2D prefix sums).
pub fn partial_summation_check(n: f64, m: f64, t: f64, a: &Rational, j: i32) -> Result<PartialSummationCheck> {
    if !(n >= 1.0 && m >= 1.0 && t > 0.0) {
        return Err(Error::Domain("need N, M ≥ 1 and t > 0".into()));
    }
    let u_top = (2.0 * n).floor() as u64;
    let w_top = (2.0f64.sqrt() * m).floor() as u64;
    let (n0, m0) = (n.floor() as u64 + 1, m.floor() as u64 + 1);
    let table = RnTable::new(u_top);
    let af = rational::to_f64(a);
    let rows = (u_top + 1).saturating_sub(n0) as usize;
    let cols = (w_top + 1).saturating_sub(m0) as usize;
    // prefix[i][k] = E(n0−1+i, m0−1+k)
    let mut prefix = vec![vec![Complex64::new(0.0, 0.0); cols + 1]; rows + 1];
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..rows {
        let nn = n0 + i as u64;
        let r = table.r(nn) as f64;
        let mut run = Complex64::new(0.0, 0.0);
        for k in 0..cols {
            let mm = m0 + k as u64;
            let w = g_squared(a, nn, mm)?.mul(Dd::from_f64(t)).sqrt();
            let e = unit_exp(w.frac()) * r;
            run += e;
            prefix[i + 1][k + 1] = prefix[i][k + 1] + run;
            s += e * f_phase(nn as f64, mm as f64, a).powi(-j);
        }
    }
    let mut sup_e = 0.0;
    let mut argsup = (n0.saturating_sub(1), m0.saturating_sub(1));
    for (i, row) in prefix.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            if v.norm() > sup_e {
                sup_e = v.norm();
                argsup = (n0 - 1 + i as u64, m0 - 1 + k as u64);
            }
        }
    }
    let f_nm = (af * n + m * m / (af * af)).sqrt();
    Ok(PartialSummationCheck { s_abs: s.norm(), sup_e, argsup, bound: 4.0 / f_nm.powi(j) * sup_e })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn double_double_phase() {
        // g² = 2, t = 10¹⁰: g√t = √2·10⁵
        let m = FourierIndex::new([1, 1, 0], &q("1")).unwrap();
        let ph = m.phase(1e10);
        let exact = 0.356_237_309_504_880_2_f64;
        let want = exact - exact.round();
        assert!((ph - want).abs() < 1e-16);
        assert!(m.g() >= m.g_star());
    }

    #[test]
    fn index_invariants() {
        assert!(FourierIndex::new([0, 0, 0], &q("1")).is_err());
        for a in ["1/4", "1/2", "1", "3", "7/2"] {
            let a = q(a);
            let g0 = arith::g0(&a);
            for m in [[1, 0, 0], [0, 0, 1], [2, -1, 3], [0, 5, -1]] {
                let i = FourierIndex::new(m, &a).unwrap();
                let norm = ((m[0] * m[0] + m[1] * m[1]) as f64).sqrt().max(m[2].abs() as f64);
                assert!(i.g() >= i.g_star() * (1.0 - 1e-15));
                assert!(i.g_star() >= g0 * norm * (1.0 - 1e-15));
            }
        }
    }

    #[test]
    fn i_closed_examples() {
        let m = FourierIndex::new([0, 0, 1], &q("1")).unwrap();
        assert!((i_closed(&m, 1.0) + 1.0 / PI).abs() < 1e-15);
        for t in [0.5, 2.0, 7.3] {
            assert!(i_closed(&m, t).abs() <= i_magnitude_bound(&m, t));
            assert!(i2_closed(&m, t).abs() <= i2_magnitude_bound(&m, t));
        }
    }

    #[test]
    fn i_closed_against_axis_slices() {
        // slices perpendicular to a coordinate axis, in the original coordinates
        let cfg = QuadConfig::with_tol(1e-12);
        for (a, t) in [(1.0f64, 2.0f64), (2.0, 1.0), (0.5, 5.0)] {
            let aq = rational::from_f64_exact(a).unwrap();
            // m = (0,0,1): disc of area π·a(t − a²u₃²), |u₃| ≤ √t/a
            let lim = t.sqrt() / a;
            let direct = integrate(|u| (2.0 * PI * u).cos() * PI * a * (t - a * a * u * u), -lim, lim, cfg).unwrap();
            let m = FourierIndex::new([0, 0, 1], &aq).unwrap();
            assert!((direct - i_closed(&m, t)).abs() < 1e-9);
            // m = (1,0,0): ellipse of area π(t − u₁²/a)/√a, |u₁| ≤ √(at)
            let lim = (a * t).sqrt();
            let direct = integrate(|u| (2.0 * PI * u).cos() * PI * (t - u * u / a) / a.sqrt(), -lim, lim, cfg).unwrap();
            let m = FourierIndex::new([1, 0, 0], &aq).unwrap();
            assert!((direct - i_closed(&m, t)).abs() < 1e-9);
        }
    }

    #[test]
    fn closed_forms_against_quadrature() {
        let cfg = QuadConfig::with_tol(1e-11);
        let m = FourierIndex::new([1, 0, 0], &q("1")).unwrap();
        assert!((i_quadrature(&m, 2.0, cfg).unwrap() - i_closed(&m, 2.0)).abs() < 1e-6);
        let m = FourierIndex::new([0, 0, 1], &q("1")).unwrap();
        let v = i2_quadrature(&m, 4.0, cfg).unwrap();
        assert!((v - i2_closed(&m, 4.0)).abs() < 1e-8);
    }

    #[test]
    fn poisson_empty_below_g0() {
        let p = EllipsoidParams::parse("1", "100").unwrap();
        let s = SmoothingParams::new(q("100"), q("5"), crate::Side::Plus).unwrap();
        let r = poisson_d2_partial(&p, &s, 0.5, Budget::default()).unwrap();
        assert_eq!(r.partial, 0.0);
        assert_eq!(r.frequencies, 0);
    }

    #[test]
    fn poisson_frequency_count_matches_enumeration() {
        let a = q("2");
        let p = EllipsoidParams::new(a.clone(), q("50")).unwrap();
        let s = SmoothingParams::new(q("50"), q("5"), crate::Side::Minus).unwrap();
        let r = poisson_d2_partial(&p, &s, 3.0, Budget::default()).unwrap();
        let mut count = 0;
        for m1 in -5i64..=5 {
            for m2 in -5i64..=5 {
                for m3 in -7i64..=7 {
                    if (m1, m2, m3) == (0, 0, 0) {
                        continue;
                    }
                    if FourierIndex::new([m1, m2, m3], &a).unwrap().g_star() <= 3.0 {
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(r.frequencies, count);
    }

    #[test]
    fn f_phase_matches_g() {
        assert!((f_phase(1.0, 1.0, &q("1")) - 2f64.sqrt()).abs() < 1e-15);
        assert!((f_phase(1.0, 2.0, &q("4")) - 4.25f64.sqrt()).abs() < 1e-15);
        for (n1, m3, a) in [(3i64, 4i64, "1/3"), (1, 9, "5/2"), (7, 1, "2")] {
            let a = q(a);
            let g = FourierIndex::new([n1, 0, m3], &a).unwrap().g();
            assert!((f_phase((n1 * n1) as f64, m3 as f64, &a) - g).abs() < 1e-13);
        }
    }

    #[test]
    fn exp_sum_examples() {
        let spec = ExpSumSpec { n: 1.0, m: 1.0, u: 2, w: 1, t: 1.0, a: q("1"), h: 1 };
        assert_eq!(exp_sum(&spec).unwrap(), Complex64::new(0.0, 0.0));
        let spec = ExpSumSpec { n: 2.0, m: 1.0, u: 2, w: 1, t: 1.0, a: q("1"), h: 1 };
        assert_eq!(exp_sum(&spec).unwrap(), Complex64::new(0.0, 0.0));
        // the single term n = 2, m = 2; M = 3/2 keeps W = 2 inside [M, √2·M]
        let spec = ExpSumSpec { n: 1.0, m: 1.5, u: 2, w: 2, t: 1.0, a: q("1"), h: 1 };
        let e = exp_sum(&spec).unwrap();
        let want = unit_exp(6f64.sqrt().fract()) * 4.0;
        assert!((e - want).norm() < 1e-13);
    }

    #[test]
    fn lambda_containment_and_second_derivative() {
        let a = q("1");
        let (lam, lam8) = lambda_bounds(1, 10.0, 10.0, 100.0, &a);
        let direct = 0.75 * 10.0 * 10.0 / (20.0f64 + 200.0).powf(2.5);
        assert!((lam - direct).abs() < 1e-18);
        assert_eq!(lam8, 8.0 * lam);
        let (l3, _) = lambda_bounds(3, 10.0, 10.0, 100.0, &a);
        assert!((l3 - 3.0 * lam).abs() < 1e-18);
        let cfg = QuadConfig::with_tol(1e-14);
        for (tau, m, h) in [(10.0, 10.0, 1.0), (15.0, 12.0, 2.0), (20.0, 13.0, 1.0)] {
            let closed = f_difference_second(tau, m, h, 100.0, 1.0);
            let integral = f_difference_second_integral(tau, m, h, 100.0, 1.0, cfg).unwrap();
            let e = 1e-2;
            let numeric = (f_difference(tau + e, m, h, 100.0, 1.0) - 2.0 * f_difference(tau, m, h, 100.0, 1.0)
                + f_difference(tau - e, m, h, 100.0, 1.0))
                / (e * e);
            assert!((closed / integral - 1.0).abs() < 1e-10);
            assert!((closed / numeric - 1.0).abs() < 1e-4);
            let (lo, hi) = lambda_bounds(h as u64, 10.0, 10.0, 100.0, &a);
            assert!(closed >= lo && closed <= hi);
        }
    }

    #[test]
    fn vdc_examples() {
        let spec = ExpSumSpec { n: 100.0, m: 50.0, u: 100, w: 70, t: 1e4, a: q("1"), h: 10 };
        let c = vdc_check(&spec, 1, 50).unwrap();
        assert_eq!(c.lhs, 0.0);
        assert!(c.holds());
        let spec = ExpSumSpec { u: 200, ..spec };
        let c = vdc_check(&spec, 1, 50).unwrap();
        assert!(c.holds(), "{c:?}");
        assert!(vdc_check(&spec, 30, 50).is_err());
    }

    #[test]
    fn weyl_cases() {
        assert_eq!(weyl_classify(40.0, 10.0).case, WeylCase::I);
        assert_eq!(weyl_classify(40.0, 10.0).h, 10);
        assert_eq!(weyl_classify(40.0, 25.0).case, WeylCase::II);
        assert_eq!(weyl_classify(40.0, 3.0).case, WeylCase::III);
        // f chosen so that the expression is 25 at M = 40, t = 1
        let f = (25.0 / 0.1 * 40f64.powf(1.0 / 3.0)).powf(0.6);
        let w = weyl_h(40.0, f, 1.0);
        assert!((w.expr - 25.0).abs() < 1e-9);
        assert_eq!(w.case, WeylCase::II);
    }

    #[test]
    fn partial_summation_small() {
        for j in [2, 4] {
            let c = partial_summation_check(30.0, 40.0, 5e3, &q("1"), j).unwrap();
            assert!(c.holds(), "{c:?}");
            assert!(c.sup_e > 0.0);
        }
    }
}
