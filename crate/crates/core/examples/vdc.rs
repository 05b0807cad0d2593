//! Exponential sums `E_{N,M}`, the second-derivative test and the shift-length cases.

use ellipsoid_lattice::fourier::{exp_sum, f_phase, lambda_bounds, vdc_check, weyl_h, ExpSumSpec};
use ellipsoid_lattice::parse_rational;

fn main() -> ellipsoid_lattice::Result<()> {
    let spec = ExpSumSpec { n: 1000.0, m: 100.0, u: 2000, w: 141, t: 1e5, a: parse_rational("3/2")?, h: 20 };
    let e = exp_sum(&spec)?;
    println!("|E_(N,M)(U,W)| = {:.4}", e.norm());
    let (lam, lam8) = lambda_bounds(3, spec.n, spec.m, spec.t, &spec.a);
    println!("Lambda = {lam:.4e}, 8 Lambda = {lam8:.4e}");
    for (h, m) in [(1, 100), (3, 110), (20, 120)] {
        let c = vdc_check(&spec, h, m)?;
        println!("h = {h:>2}, m = {m}: |sum| = {:9.4} <= {:12.4} {}", c.lhs, c.rhs, c.holds());
    }
    let f = f_phase(spec.n, spec.m, &spec.a);
    let w = weyl_h(spec.m, f, spec.t);
    println!("f(N,M) = {f:.4}, H-expression = {:.4}, H = {}, case {:?}", w.expr, w.h, w.case);
    Ok(())
}
