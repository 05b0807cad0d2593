//! Certified upper bounds for the eight dyadic double series.

use ellipsoid_lattice::bound::series_constants;
use ellipsoid_lattice::Hp;

fn main() {
    let mut hp = Hp::new(40);
    for c in series_constants(&mut hp) {
        println!(
            "{:<48} head {}  tail <= {}  < {}  (slack {})",
            c.name,
            hp.format_digits(&c.head, 15),
            hp.format_digits(&c.tail, 4),
            c.claim,
            hp.format_digits(&c.slack, 6)
        );
    }
}
