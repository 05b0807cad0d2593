//! Verification suites for the explicit-constant inequalities.
//!
//! Every suite returns a [`Report`]: one [`Check`] per inequality with its extremal
//! witness and slack, so a failure can be diagnosed from the report alone.

use std::fmt;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{self, RnTable};
use crate::bound::series_constants;
use crate::count::{volume, EllipsoidParams};
use crate::error::{Error, Result};
use crate::fourier::{self, ExpSumSpec, FourierIndex};
use crate::hp::Hp;
use crate::quad::QuadConfig;
use crate::rational::{self, Rational};
use crate::smoothing::{self, SmoothingParams};
use crate::{Budget, Side};

/// The verification suites the CLI exposes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Lemma1,
    Lemma2,
    Series,
    Fourier,
    Smoothing,
    Vdc,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Lemma1, Suite::Lemma2, Suite::Series, Suite::Fourier, Suite::Smoothing, Suite::Vdc];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::Lemma2 => "lemma2",
            Suite::Series => "series",
            Suite::Fourier => "fourier",
            Suite::Smoothing => "smoothing",
            Suite::Vdc => "vdc",
        }
    }

    /// What `--limit` means for this suite when it is not given.
    ///
    /// lemma1: largest `n` (`R₁` runs to ten times this). lemma2: largest `x`.
    /// smoothing: largest `x` in the sandwich grid. vdc: number of random draws.
    /// series and fourier ignore it.
    pub fn default_limit(self) -> u64 {
        match self {
            Suite::Lemma1 => 100_000,
            Suite::Lemma2 => 10_000,
            Suite::Series | Suite::Fourier => 0,
            Suite::Smoothing => 500,
            Suite::Vdc => 100,
        }
    }
}

/// One verified inequality.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Check {
    pub name: String,
    pub holds: bool,
    /// Where the inequality is tightest (or first fails).
    pub witness: String,
    /// Distance to violation at the witness.
    pub slack: String,
}

impl Check {
    fn new(name: impl Into<String>, holds: bool, witness: impl Into<String>, slack: impl Into<String>) -> Self {
        Self { name: name.into(), holds, witness: witness.into(), slack: slack.into() }
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct Report {
    pub suite: &'static str,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.holds { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {}/{}: witness {}; slack {}", self.suite, c.name, c.witness, c.slack)?;
        }
        let n = self.checks.len();
        let ok = self.checks.iter().filter(|c| c.holds).count();
        write!(f, "{}: {ok}/{n} checks passed", self.suite)
    }
}

/// Runs a suite with `limit` (0 selects [`Suite::default_limit`]).
pub fn run(suite: Suite, limit: u64, hp: &mut Hp, budget: Budget) -> Result<Report> {
    let limit = if limit == 0 { suite.default_limit() } else { limit };
    let checks = match suite {
        Suite::Lemma1 => {
            let mut c = rsum_maxima();
            c.push(rsum_r1(limit.saturating_mul(10)));
            c.push(rsum_r12(limit));
            c.push(rsum_conv(limit));
            c.push(rsum_r2(limit)?);
            c
        }
        Suite::Lemma2 => {
            let mut c = vec![cylinder_equality()?, cylinder_r3(limit)?];
            c.extend(cylinder_inner(budget)?);
            c.extend(cylinder_tail(budget)?);
            c
        }
        Suite::Series => series(hp),
        Suite::Fourier => {
            let mut c = fourier_closed_forms()?;
            c.extend(fourier_poisson(budget)?);
            c.push(fourier_phase_identity());
            c
        }
        Suite::Smoothing => {
            let mut c = smoothing_constants(hp)?;
            c.push(smoothing_two_forms()?);
            c.extend(smoothing_sandwich(limit, budget)?);
            c
        }
        Suite::Vdc => {
            let mut c = vec![vdc_random(limit as usize, 0x5eed)?];
            c.push(lambda_containment(limit as usize, 0x1a3b)?);
            c
        }
    };
    Ok(Report { suite: suite.name(), checks })
}

/// Largest `num/den` seen so far, compared exactly.
#[derive(Clone, Copy, Debug)]
struct MaxRatio {
    num: u128,
    den: u128,
    at: u64,
}

impl MaxRatio {
    fn new() -> Self {
        Self { num: 0, den: 1, at: 0 }
    }

    fn offer(&mut self, num: u128, den: u128, at: u64) {
        if num * self.den > self.num * den {
            *self = Self { num, den, at };
        }
    }

    fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// `max_{1≤n≤29} R₁(n)/n = 4` and `max_{2≤n≤90} R₁,₂(n/2)/(n/2) = 4.8`, exactly.
pub fn rsum_maxima() -> Vec<Check> {
    let table = RnTable::new(90);
    let mut r1 = MaxRatio::new();
    for n in 1..=29u64 {
        r1.offer(table.r1_upto(n).expect("in table") as u128, n as u128, n);
    }
    let r1_ok = r1.num == 4 * r1.den;
    let mut r12 = MaxRatio::new();
    for n in 2..=90u64 {
        // R₁,₂(n/2) = R₁(n) − R₁(⌊n/2⌋); ratio = 2·R₁,₂/n
        let v = table.r1_upto(n).expect("in table") - table.r1_upto(n / 2).expect("in table");
        r12.offer(2 * v as u128, n as u128, n);
    }
    let r12_ok = 5 * r12.num == 24 * r12.den;
    vec![
        Check::new(
            "max R1(n)/n over n<=29 equals 4",
            r1_ok,
            format!("n={} ratio={}/{}", r1.at, r1.num, r1.den),
            format!("{}", 4.0 - r1.value()),
        ),
        Check::new(
            "max R12(n/2)/(n/2) over 2<=n<=90 equals 4.8",
            r12_ok,
            format!("x={}/2 ratio={}/{}", r12.at, r12.num, r12.den),
            format!("{}", 4.8 - r12.value()),
        ),
    ]
}

/// `R₁(x) ≤ 4x` for `x = n, n + 1/2`, `1 ≤ n ≤ limit`.
pub fn rsum_r1(limit: u64) -> Check {
    let table = RnTable::new(limit);
    let mut worst = MaxRatio::new();
    let mut violations = 0u64;
    for n in 1..=limit {
        let r = table.r1_upto(n).expect("in table") as u128;
        // x = n and x = n + 1/2 share R₁; R₁ ≤ 4x  ⇔  R₁ ≤ 2·(2x)
        for twice_x in [2 * n as u128, 2 * n as u128 + 1] {
            if r > 2 * twice_x {
                violations += 1;
            }
            worst.offer(2 * r, twice_x, n);
        }
    }
    Check::new(
        format!("R1(x) <= 4x, x = n, n+1/2, n <= {limit}"),
        violations == 0,
        format!("n={} R1/x={} violations={violations}", worst.at, worst.value()),
        format!("{}", 4.0 - worst.value()),
    )
}

/// `R₁,₂(x) ≤ 4.8x` for `x = n, n + 1/2`, `1 ≤ n ≤ limit`.
pub fn rsum_r12(limit: u64) -> Check {
    let table = RnTable::new(2 * limit + 1);
    let r1 = |n: u64| table.r1_upto(n).expect("in table") as u128;
    let mut worst = MaxRatio::new();
    let mut violations = 0u64;
    for n in 1..=limit {
        // x = n: (n, 2n]; x = n + 1/2: (n, 2n + 1]
        for (hi, twice_x) in [(2 * n, 2 * n as u128), (2 * n + 1, 2 * n as u128 + 1)] {
            let v = r1(hi) - r1(n);
            // v ≤ 4.8x  ⇔  10v ≤ 24·(2x)
            if 10 * v > 24 * twice_x {
                violations += 1;
            }
            worst.offer(2 * v, twice_x, n);
        }
    }
    Check::new(
        format!("R12(x) <= 4.8x, x = n, n+1/2, n <= {limit}"),
        violations == 0,
        format!("n={} R12/x={} violations={violations}", worst.at, worst.value()),
        format!("{}", 4.8 - worst.value()),
    )
}

/// `r(n)² ≤ Σ_{d|n} r(d)r(n/d)` for `1 ≤ n ≤ limit`.
pub fn rsum_conv(limit: u64) -> Check {
    let table = RnTable::new(limit);
    let conv = table.conv_table();
    let mut worst = MaxRatio::new();
    let mut violations = 0u64;
    for n in 1..=limit {
        let r = table.r(n) as u128;
        let c = conv[n as usize] as u128;
        if r * r > c {
            violations += 1;
        }
        if c > 0 {
            worst.offer(r * r, c, n);
        }
    }
    Check::new(
        format!("r(n)^2 <= sum_(d|n) r(d)r(n/d), n <= {limit}"),
        violations == 0,
        format!("n={} ratio={}/{} violations={violations}", worst.at, worst.num, worst.den),
        format!("{}", 1.0 - worst.value()),
    )
}

/// `R₂(x) ≤ 19.2x·log(2e²x)` for `x = n, n + 1/2`, `1 ≤ n ≤ limit`.
pub fn rsum_r2(limit: u64) -> Result<Check> {
    let table = RnTable::new(2 * limit + 1);
    let mut worst = (0.0f64, 0.0f64);
    let mut violations = 0u64;
    for n in 1..=limit {
        for (hi, x) in [(2 * n, n as f64), (2 * n + 1, n as f64 + 0.5)] {
            let v = (table.r2_sq_upto(hi)? - table.r2_sq_upto(n)?) as f64;
            let bound = 19.2 * x * (2.0f64.ln() + 2.0 + x.ln());
            if v > bound {
                violations += 1;
            }
            if v / bound > worst.0 {
                worst = (v / bound, x);
            }
        }
    }
    Ok(Check::new(
        format!("R2(x) <= 19.2x log(2e^2 x), x = n, n+1/2, n <= {limit}"),
        violations == 0,
        format!("x={} R2/bound={} violations={violations}", worst.1, worst.0),
        format!("{}", 1.0 - worst.0),
    ))
}

/// `R₃*(1) = 14` against a brute-force count over `[−1, 1]³`.
pub fn cylinder_equality() -> Result<Check> {
    let mut brute = 0u64;
    for m1 in -1i64..=1 {
        for m2 in -1i64..=1 {
            for m3 in -1i64..=1 {
                let n = arith::CylinderNormIndex::new([m1, m2, m3]).norm_sq;
                if n > 0 && n <= 1 {
                    brute += 1;
                }
            }
        }
    }
    let r = arith::r3_star(&Rational::from_integer(1.into()))?;
    Ok(Check::new(
        "R3*(1) = 14 = 14*1^(3/2)",
        r == 14 && brute == 14,
        format!("x=1 R3*={r} brute={brute}"),
        format!("{}", 14i64 - r as i64),
    ))
}

/// `R₃*(x) ≤ 14x^{3/2}` for half-integers `0 < x ≤ limit`, exactly.
pub fn cylinder_r3(limit: u64) -> Result<Check> {
    let mut worst = (0.0f64, 0u64);
    let mut violations = 0u64;
    for k in 1..=2 * limit {
        let x = Rational::new(k.into(), 2.into());
        let r = arith::r3_star(&x)? as u128;
        // R ≤ 14(k/2)^{3/2}  ⇔  8R² ≤ 196k³
        let k3 = (k as u128).pow(3);
        if 8 * r * r > 196 * k3 {
            violations += 1;
        }
        let ratio = r as f64 / (14.0 * (k as f64 / 2.0).powf(1.5));
        if ratio > worst.0 {
            worst = (ratio, k);
        }
    }
    Ok(Check::new(
        format!("R3*(x) <= 14x^(3/2), half-integers x <= {limit}"),
        violations == 0,
        format!("x={} ratio={} violations={violations}", rational::to_exact_string(&Rational::new(worst.1.into(), 2.into())), worst.0),
        format!("{}", 1.0 - worst.0),
    ))
}

const CYL_A: [&str; 5] = ["1/4", "1/2", "1", "2", "4"];
const CYL_Z: [f64; 5] = [1.0, 2.0, 5.0, 10.0, 20.0];

/// `Σ_{0<g*≤Z} g*⁻³ ≤ (42/g₀³)·log₊(1.4Z/g₀)` on the `(a, Z)` grid, plus the empty sum below `g₀`.
pub fn cylinder_inner(budget: Budget) -> Result<Vec<Check>> {
    let mut worst: Option<(f64, String)> = None;
    let mut violations = 0;
    let mut below_g0_ok = true;
    for a in CYL_A {
        let aq = rational::parse_rational(a)?;
        let g0 = arith::g0(&aq);
        below_g0_ok &= arith::gstar_sum_inner(g0 / 2.0, &aq, budget)? == 0.0;
        for z in CYL_Z {
            let lhs = arith::gstar_sum_inner(z, &aq, budget)?;
            let rhs = arith::gstar_inner_bound(z, &aq);
            if lhs > rhs {
                violations += 1;
            }
            let slack = rhs - lhs;
            if worst.as_ref().is_none_or(|w| slack < w.0) {
                worst = Some((slack, format!("a={a} Z={z} sum={lhs} bound={rhs}")));
            }
        }
    }
    let (slack, witness) = worst.expect("nonempty grid");
    Ok(vec![
        Check::new("g*-sum is 0 below g0", below_g0_ok, "Z = g0/2 for every a", "0"),
        Check::new(
            "sum_(g*<=Z) g*^-3 <= (42/g0^3) log+(1.4Z/g0)",
            violations == 0,
            format!("{witness} violations={violations}"),
            format!("{slack}"),
        ),
    ])
}

/// `Σ_{g*>Z} g*^{−α} ≤ 14α/((α−3)g₀³)·Z^{3−α}` on the `(a, Z, α)` grid with `Z_max = 20Z`.
pub fn cylinder_tail(budget: Budget) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for alpha in [4.0, 5.0, 7.0] {
        let mut worst: Option<(f64, String)> = None;
        let mut violations = 0;
        for a in CYL_A {
            let aq = rational::parse_rational(a)?;
            for z in CYL_Z {
                let c = arith::gstar_sum_tail(z, alpha, &aq, 20.0 * z, budget)?;
                if !c.certified() {
                    violations += 1;
                }
                let rel = c.slack() / c.bound;
                if worst.as_ref().is_none_or(|w| rel < w.0) {
                    worst = Some((
                        rel,
                        format!(
                            "a={a} Z={z} enumerated={} remainder={} bound={}",
                            c.enumerated, c.remainder, c.bound
                        ),
                    ));
                }
            }
        }
        let (rel, witness) = worst.expect("nonempty grid");
        checks.push(Check::new(
            format!("sum_(g*>Z) g*^-{alpha} <= 14a/((a-3)g0^3) Z^(3-a)"),
            violations == 0,
            format!("{witness} violations={violations}"),
            format!("{rel} (relative)"),
        ));
    }
    Ok(checks)
}

/// The eight dyadic series bounds.
pub fn series(hp: &mut Hp) -> Vec<Check> {
    series_constants(hp)
        .into_iter()
        .map(|c| {
            let upper = hp.format_digits(&c.upper, 12);
            let head = hp.format_digits(&c.head, 12);
            let tail = hp.format_digits(&c.tail, 6);
            let slack = hp.format_digits(&c.slack, 12);
            Check::new(
                format!("{} < {}", c.name, c.claim),
                c.certified(),
                format!("head={head} tail<={tail} upper={upper}"),
                slack,
            )
        })
        .collect()
}

/// `i_closed`, `i2_closed` against quadrature for `|m|_* ≤ 2`, `a ∈ {1/2, 1, 2}`, `t ∈ {1, 2, 5}`.
pub fn fourier_closed_forms() -> Result<Vec<Check>> {
    let cfg = QuadConfig::with_tol(1e-11);
    let (mut worst_i, mut worst_i2) = ((0.0f64, String::new()), (0.0f64, String::new()));
    let mut points = 0;
    for a in ["1/2", "1", "2"] {
        let aq = rational::parse_rational(a)?;
        for m1 in -2i64..=2 {
            for m2 in -2i64..=2 {
                for m3 in -2i64..=2 {
                    let m = [m1, m2, m3];
                    if m == [0, 0, 0] || arith::CylinderNormIndex::new(m).norm_sq > 4 {
                        continue;
                    }
                    let idx = FourierIndex::new(m, &aq)?;
                    for t in [1.0, 2.0, 5.0] {
                        points += 1;
                        let e = (fourier::i_closed(&idx, t) - fourier::i_quadrature(&idx, t, cfg)?).abs();
                        if e > worst_i.0 {
                            worst_i = (e, format!("a={a} m={m:?} t={t}"));
                        }
                        let e2 = (fourier::i2_closed(&idx, t) - fourier::i2_quadrature(&idx, t, cfg)?).abs();
                        if e2 > worst_i2.0 {
                            worst_i2 = (e2, format!("a={a} m={m:?} t={t}"));
                        }
                    }
                }
            }
        }
    }
    Ok(vec![
        Check::new(
            format!("I(m,t) closed form vs quadrature, {points} points, tol 1e-6"),
            worst_i.0 <= 1e-6,
            format!("{} err={:e}", worst_i.1, worst_i.0),
            format!("{:e}", 1e-6 - worst_i.0),
        ),
        Check::new(
            format!("I2(m,t) closed form vs iterated integral, {points} points, tol 1e-6"),
            worst_i2.0 <= 1e-6,
            format!("{} err={:e}", worst_i2.1, worst_i2.0),
            format!("{:e}", 1e-6 - worst_i2.0),
        ),
    ])
}

/// Exact `D⁽²⁾_{x,±u}(P) = D⁽²⁾(A) − D⁽²⁾(V)` as `f64`.
pub fn exact_d2_discrepancy(p: &EllipsoidParams, s: &SmoothingParams, budget: Budget) -> Result<f64> {
    let count = smoothing::d2_count_exact(p, s, budget)?;
    let mut hp = Hp::new(30);
    let exact = hp.rational(&count);
    let vol = smoothing::d2_volume(&mut hp, s)?;
    let diff = hp.sub(&exact, &vol);
    Ok(hp.to_f64(&diff))
}

/// Truncated Poisson bands at `a = 1, x = 100, u = 5`, `Z ∈ {5, 10, 20, 40}`, both sides.
pub fn fourier_poisson(budget: Budget) -> Result<Vec<Check>> {
    let p = EllipsoidParams::parse("1", "100")?;
    let mut checks = Vec::new();
    for side in [Side::Plus, Side::Minus] {
        let s = SmoothingParams::new(p.x().clone(), Rational::from_integer(5.into()), side)?;
        let exact = exact_d2_discrepancy(&p, &s, budget)?;
        let mut contained = true;
        let mut shrinking = true;
        let mut last_tail = f64::INFINITY;
        let mut worst = (f64::INFINITY, 0.0);
        let mut trail = Vec::new();
        for z in [5.0, 10.0, 20.0, 40.0] {
            let r = fourier::poisson_d2_partial(&p, &s, z, budget)?;
            contained &= r.contains(exact);
            shrinking &= r.tail < last_tail;
            last_tail = r.tail;
            let margin = r.tail - (r.partial - exact).abs();
            if margin < worst.0 {
                worst = (margin, z);
            }
            trail.push(format!("Z={z}: partial={:.6} tail={:.6}", r.partial, r.tail));
        }
        let sign = if side == Side::Plus { "+" } else { "-" };
        checks.push(Check::new(
            format!("Poisson band contains exact D2(P), a=1 x=100 u={sign}5"),
            contained && shrinking,
            format!("exact={exact:.6}; {}; tightest Z={}", trail.join(", "), worst.1),
            format!("{}", worst.0),
        ));
    }
    Ok(checks)
}

/// `f(n, m) = g((√n, 0, m))` on a fixed set of triples.
pub fn fourier_phase_identity() -> Check {
    let mut worst = (0.0f64, String::new());
    let mut rng = ChaCha8Rng::seed_from_u64(0xf00d);
    for _ in 0..20 {
        let m1 = rng.gen_range(0i64..40);
        let m3 = rng.gen_range(1i64..40);
        let a = Rational::new(rng.gen_range(1i64..33).into(), rng.gen_range(1i64..9).into());
        let g = FourierIndex::new([m1, 0, m3], &a).expect("nonzero").g();
        let f = fourier::f_phase((m1 * m1) as f64, m3 as f64, &a);
        let e = (f - g).abs() / g;
        if e >= worst.0 {
            worst = (e, format!("m=({m1},0,{m3}) a={a}"));
        }
    }
    Check::new(
        "f(n,m) = g(sqrt n, 0, m), 20 draws",
        worst.0 < 1e-13,
        format!("{} rel.err={:e}", worst.1, worst.0),
        format!("{:e}", 1e-13 - worst.0),
    )
}

/// `φ'''` maximum, the volume constant, the Taylor defect grid and the volume smoothing error.
pub fn smoothing_constants(hp: &mut Hp) -> Result<Vec<Check>> {
    let cert = smoothing::max_phi_third(hp, 20_000);
    let recorded = hp.decimal(smoothing::M3_RECORDED);
    let dev = hp.sub(&cert.m3, &recorded).abs();
    let tol = hp.decimal("1e-30");
    let m3 = cert.m3.clone();
    let konst = smoothing::volume_error_constant(hp, &m3);
    let limit = hp.decimal("8.4");
    let const_slack = hp.sub(&limit, &konst);

    let mut checks = vec![
        Check::new(
            "max |phi'''| on [-1/3,1/3] is phi'''(1/3)",
            cert.is_consistent() && dev <= tol,
            format!(
                "M3={} grid max {} at v={} ({} points), phi'''' >= {}",
                hp.format_digits(&cert.m3, 25),
                hp.format_digits(&cert.grid_max, 25),
                hp.format_digits(&cert.grid_argmax, 10),
                cert.grid_points,
                hp.format_digits(&cert.phi4_lower, 10)
            ),
            hp.format_digits(&hp.sub(&cert.m3, &cert.grid_max), 6),
        ),
        Check::new(
            "(8 pi/315) M3 <= 8.4",
            !const_slack.is_negative(),
            format!("constant={}", hp.format_digits(&konst, 20)),
            hp.format_digits(&const_slack, 12),
        ),
    ];

    let mut worst: Option<(Rational, String)> = None;
    let mut ok = true;
    for k in -100i64..=100 {
        let w = hp.div(&hp.int(k), &hp.int(300));
        let d = smoothing::phi_taylor_defect(hp, &w, &m3)?;
        ok &= d.holds();
        if k != 0 {
            let ratio = hp.div(&d.defect, &d.bound);
            let rf = hp.to_f64(&ratio);
            let rq = rational::from_f64_exact(rf)?;
            if worst.as_ref().is_none_or(|w| rq > w.0) {
                worst = Some((rq, format!("w={k}/300 defect/bound={rf}")));
            }
        }
    }
    let (ratio, witness) = worst.expect("nonempty grid");
    checks.push(Check::new(
        "|phi(w) - 35w^2/4| <= |w|^3 M3/6, |w| <= 1/3",
        ok,
        witness,
        format!("{}", 1.0 - rational::to_f64(&ratio)),
    ));

    let mut ok = true;
    let mut worst = (f64::INFINITY, String::new());
    for x in [10i64, 50, 100, 500] {
        for (un, ud) in [(1i64, 10i64), (1, 5), (1, 3)] {
            for side in [Side::Plus, Side::Minus] {
                let xq = Rational::from_integer(x.into());
                let u = Rational::new((x * un).into(), ud.into());
                let s = SmoothingParams::new(xq.clone(), u.clone(), side)?;
                let d2 = smoothing::d2_volume(hp, &s)?;
                let ur = hp.rational(&u);
                let xr = hp.rational(&xq);
                let v = volume(hp, &xq)?;
                let lhs = hp.sub(&hp.div(&d2, &hp.mul(&ur, &ur)), &v).abs();
                let rhs = hp.mul(&hp.mul(&limit, &hp.sqrt(&xr)), &ur);
                ok &= lhs <= rhs;
                let rel = hp.div(&hp.sub(&rhs, &lhs), &rhs);
                let rel = hp.to_f64(&rel);
                if rel < worst.0 {
                    worst = (rel, format!("x={x} u={u} side={side:?}"));
                }
            }
        }
    }
    checks.push(Check::new(
        "|u^-2 D2(V) - V(x)| <= 8.4 x^(1/2) u",
        ok,
        worst.1,
        format!("{} (relative)", worst.0),
    ));
    Ok(checks)
}

/// Second difference of the double primitive against the double integral, `F ∈ {1, t, t^{3/2}}`.
pub fn smoothing_two_forms() -> Result<Check> {
    let cfg = QuadConfig::with_tol(1e-11);
    let fs: [(&str, &dyn Fn(f64) -> f64); 3] = [("1", &|_| 1.0), ("t", &|t| t), ("t^(3/2)", &|t: f64| t.powf(1.5))];
    let mut worst = (0.0f64, String::new());
    for (name, f) in fs {
        for (x, h) in [(3.0, 1.0), (9.0, -3.0), (30.0, 10.0), (100.0, -20.0)] {
            let a = smoothing::d2_generic(f, x, h, cfg)?;
            let b = smoothing::d2_from_primitive(f, x, h, cfg)?;
            let e = (a - b).abs();
            if e >= worst.0 {
                worst = (e, format!("F={name} x={x} h={h}"));
            }
        }
    }
    Ok(Check::new(
        "second difference of F(2) = double integral of F, tol 1e-9",
        worst.0 <= 1e-9,
        format!("{} err={:e}", worst.1, worst.0),
        format!("{:e}", 1e-9 - worst.0),
    ))
}

/// `u⁻²D⁽²⁾_{x,−u}(A) ≤ A(x) ≤ u⁻²D⁽²⁾_{x,u}(A)` for `a ∈ {1/2, 1, 2}`, `x ∈ {50, 100, 500}`
/// (up to `max_x`), `u ∈ {x/10, x/5, x/3}`.
pub fn smoothing_sandwich(max_x: u64, budget: Budget) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for a in ["1/2", "1", "2"] {
        let mut ok = true;
        let mut worst: Option<(Rational, String)> = None;
        let mut cells = 0;
        for x in [50u64, 100, 500].into_iter().filter(|&x| x <= max_x.max(50)) {
            let p = EllipsoidParams::parse(a, &x.to_string())?;
            for d in [10u64, 5, 3] {
                let u = Rational::new((x as i64).into(), (d as i64).into());
                let c = smoothing::sandwich_check(&p, &u, budget)?;
                cells += 1;
                ok &= c.holds();
                let slack = c.slack();
                if worst.as_ref().is_none_or(|w| slack < w.0) {
                    let lo = rational::to_f64(&c.lower);
                    let hi = rational::to_f64(&c.upper);
                    worst = Some((slack, format!("x={x} u={u}: {lo:.3} <= A={} <= {hi:.3}", c.count)));
                }
            }
        }
        let (slack, witness) = worst.expect("nonempty grid");
        checks.push(Check::new(
            format!("sandwich bounds, a={a}, {cells} cells"),
            ok,
            witness,
            format!("{}", slack.to_f64().unwrap_or(f64::NAN)),
        ));
    }
    Ok(checks)
}

/// A random `E_{N,M}` configuration inside the theorem ranges with a valid `(h, m)`.
pub fn draw_vdc_spec(rng: &mut impl Rng) -> (ExpSumSpec, u64, u64) {
    let n: f64 = rng.gen_range(20.0..2000.0);
    let m: f64 = rng.gen_range(40.0..400.0);
    let u = rng.gen_range(n.ceil() as u64..=(2.0 * n).floor() as u64);
    let w_top = (2f64.sqrt() * m).floor() as u64;
    let m_lo = m.ceil() as u64;
    let w = rng.gen_range(m_lo + 1..=w_top);
    let big_h = rng.gen_range(10..=(m / 2.0).floor() as u64);
    let h = rng.gen_range(1..=big_h.min(w - m_lo));
    let mm = rng.gen_range(m_lo..=w - h);
    let t = 10f64.powf(rng.gen_range(3.0..6.0));
    let a = Rational::new(rng.gen_range(2i64..=32).into(), 8.into());
    (ExpSumSpec { n, m, u, w, t, a, h: big_h }, h, mm)
}

/// The second-derivative test on `draws` seeded random configurations.
pub fn vdc_random(draws: usize, seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut worst = (f64::INFINITY, String::new());
    for _ in 0..draws {
        let (spec, h, m) = draw_vdc_spec(&mut rng);
        if !spec.weyl_admissible() {
            return Err(Error::Domain(format!("draw outside 10 <= H <= M/2: {spec:?}")));
        }
        let c = fourier::vdc_check(&spec, h, m)?;
        if !c.holds() {
            violations += 1;
        }
        let rel = c.slack() / c.rhs;
        if rel < worst.0 {
            worst = (
                rel,
                format!(
                    "N={:.2} U={} M={:.2} W={} h={h} m={m} t={:.1} a={} |sum|={:.4} rhs={:.4}",
                    spec.n, spec.u, spec.m, spec.w, spec.t, spec.a, c.lhs, c.rhs
                ),
            );
        }
    }
    Ok(Check::new(
        format!("|sum e(F(n))| <= 40(U-N) sqrt(L) + 11/sqrt(L), {draws} draws"),
        violations == 0,
        format!("{} violations={violations}", worst.1),
        format!("{} (relative)", worst.0),
    ))
}

/// `Λ ≤ F'' ≤ 8Λ` at random `(τ, m, h)` in the ranges, with `1e-9` relative tolerance.
pub fn lambda_containment(samples: usize, seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ok = true;
    let mut worst = (f64::INFINITY, String::new());
    for _ in 0..samples.max(50) {
        let (spec, h, m) = draw_vdc_spec(&mut rng);
        let a = rational::to_f64(&spec.a);
        let tau = rng.gen_range(spec.n..=2.0 * spec.n);
        let f2 = fourier::f_difference_second(tau, m as f64, h as f64, spec.t, a);
        let (lo, hi) = fourier::lambda_bounds(h, spec.n, spec.m, spec.t, &spec.a);
        ok &= f2 >= lo * (1.0 - 1e-9) && f2 <= hi * (1.0 + 1e-9);
        let rel = (f2 / lo - 1.0).min(1.0 - f2 / hi);
        if rel < worst.0 {
            worst = (rel, format!("tau={tau:.3} m={m} h={h} F''/L={:.6}", f2 / lo));
        }
    }
    Ok(Check::new("L <= F'' <= 8L on sampled (tau, m, h)", ok, worst.1, format!("{} (relative)", worst.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maxima_and_small_limits() {
        assert!(rsum_maxima().iter().all(|c| c.holds));
        assert!(rsum_r1(1000).holds);
        assert!(rsum_r12(1000).holds);
        assert!(rsum_conv(1000).holds);
        assert!(rsum_r2(1000).unwrap().holds);
        assert!(cylinder_equality().unwrap().holds);
        assert!(cylinder_r3(100).unwrap().holds);
    }

    #[test]
    fn maxima_witnesses() {
        let c = rsum_maxima();
        assert!(c[0].witness.starts_with("n=1 "), "{}", c[0].witness);
        assert!(c[1].witness.contains("ratio=24/5"), "{}", c[1].witness);
    }

    #[test]
    fn vdc_draws_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let (spec, h, m) = draw_vdc_spec(&mut rng);
            spec.validate().unwrap();
            assert!(spec.weyl_admissible());
            assert!(h <= spec.h && m as f64 >= spec.m && m + h <= spec.w);
        }
    }

    #[test]
    fn report_rendering() {
        let r = Report { suite: "x", checks: vec![Check::new("a", true, "w", "1"), Check::new("b", false, "v", "-1")] };
        assert!(!r.passed());
        let s = r.to_string();
        assert!(s.contains("PASS x/a: witness w; slack 1"));
        assert!(s.contains("FAIL x/b"));
        assert!(s.ends_with("x: 1/2 checks passed"));
    }
}
