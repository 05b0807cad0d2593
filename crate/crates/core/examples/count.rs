//! Exact lattice counts and the discrepancy `P(x) = N(x) − V(x)`.
//!
//! cargo run --release --example count -- 2 100000

use ellipsoid_lattice::{discrepancy, Budget, EllipsoidParams, Hp};

fn main() -> ellipsoid_lattice::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let a = args.first().map_or("1", String::as_str);
    let x = args.get(1).map_or("1000", String::as_str);
    let p = EllipsoidParams::parse(a, x)?;
    let mut hp = Hp::new(30);
    let d = discrepancy(&mut hp, &p, Budget::default())?;
    println!("a = {a}, x = {x}");
    println!("N(x) = {}", d.n_count);
    println!("V(x) = {}", hp.format(&d.volume));
    println!("P(x) = {}", hp.format(&d.p_value));
    Ok(())
}
