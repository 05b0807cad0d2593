//! Truncated Poisson sums for `D⁽²⁾(P)` converging to the exact value.

use ellipsoid_lattice::fourier::poisson_d2_partial;
use ellipsoid_lattice::smoothing::SmoothingParams;
use ellipsoid_lattice::verify::exact_d2_discrepancy;
use ellipsoid_lattice::{parse_rational, Budget, EllipsoidParams, Side};

fn main() -> ellipsoid_lattice::Result<()> {
    let p = EllipsoidParams::parse("1", "100")?;
    let s = SmoothingParams::new(p.x().clone(), parse_rational("5")?, Side::Plus)?;
    let exact = exact_d2_discrepancy(&p, &s, Budget::default())?;
    println!("exact D2(P) = {exact:.9}");
    for z in [5.0, 10.0, 20.0, 40.0, 80.0] {
        let r = poisson_d2_partial(&p, &s, z, Budget::default())?;
        println!(
            "Z = {z:>4}: {:>7} frequencies, partial = {:.9}, |residual| = {:.3e}, certified tail <= {:.3}",
            r.frequencies,
            r.partial,
            (r.partial - exact).abs(),
            r.tail
        );
    }
    Ok(())
}
