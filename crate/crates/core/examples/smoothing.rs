//! `D⁽²⁾` of the count and of the volume, and the sandwich around `A(x)`.

use ellipsoid_lattice::smoothing::{d2_count_exact, d2_volume, max_phi_third, sandwich_check, volume_error_constant, SmoothingParams};
use ellipsoid_lattice::{parse_rational, Budget, EllipsoidParams, Hp, Side};

fn main() -> ellipsoid_lattice::Result<()> {
    let mut hp = Hp::new(40);
    let cert = max_phi_third(&mut hp, 2000);
    let m3 = cert.m3.clone();
    let k = volume_error_constant(&mut hp, &m3);
    println!("M3 = {}   (8 pi/315) M3 = {}", hp.format_digits(&cert.m3, 25), hp.format_digits(&k, 15));

    let p = EllipsoidParams::parse("1", "100")?;
    for u in ["10", "20", "100/3"] {
        let u = parse_rational(u)?;
        for side in [Side::Plus, Side::Minus] {
            let s = SmoothingParams::new(p.x().clone(), u.clone(), side)?;
            let exact = d2_count_exact(&p, &s, Budget::default())?;
            let vol = d2_volume(&mut hp, &s)?;
            println!("u = {u:>6} {side:?}: D2(A) = {exact}  D2(V) = {}", hp.format_digits(&vol, 12));
        }
        let c = sandwich_check(&p, &u, Budget::default())?;
        println!("  {:.3} <= A(100) = {} <= {:.3}", ellipsoid_lattice::rational::to_f64(&c.lower), c.count, ellipsoid_lattice::rational::to_f64(&c.upper));
    }
    Ok(())
}
