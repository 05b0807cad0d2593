//! The six-term right-hand side at one `(a, x)` and the comparison with `|P(x)|`.

use ellipsoid_lattice::bound::check_theorem;
use ellipsoid_lattice::{Budget, EllipsoidParams, Hp};

fn main() -> ellipsoid_lattice::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let a = args.first().map_or("4", String::as_str);
    let x = args.get(1).map_or("100000", String::as_str);
    let p = EllipsoidParams::parse(a, x)?;
    let mut hp = Hp::new(30);
    let c = check_theorem(&mut hp, &p, Budget::default())?;
    let b = &c.breakdown;
    println!("L = {}  y = {}  z = {}", hp.format_digits(&b.l_factor, 10), hp.format_digits(&b.y, 10), hp.format_digits(&b.z, 10));
    println!("alpha0 = {}  g0 = {}", hp.format_digits(&b.alpha0, 10), hp.format_digits(&b.g0, 10));
    for (i, t) in b.terms.iter().enumerate() {
        println!("t{} = {}", i + 1, hp.format_digits(t, 12));
    }
    println!("rhs = {}", hp.format_digits(&b.total, 12));
    println!("1 <= y <= x/3: {}   1/x <= a <= x, x >= 15000: {}", b.precond_27, b.precond_28);
    match (&c.discrepancy, c.holds, &c.margin) {
        (Some(d), Some(holds), Some(m)) => {
            println!("|P| = {}", hp.format_digits(&d.abs_p(), 12));
            println!("holds = {holds}, margin = {}", hp.format_digits(m, 12));
        }
        _ => println!("precondition fails; no verdict"),
    }
    Ok(())
}
