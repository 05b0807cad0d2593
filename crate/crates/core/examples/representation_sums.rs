//! The r(n) and cylinder-norm inequalities with their extremal witnesses.

use ellipsoid_lattice::verify::{self, Suite};
use ellipsoid_lattice::{Budget, Hp};

fn main() -> ellipsoid_lattice::Result<()> {
    let mut hp = Hp::new(30);
    for suite in [Suite::Lemma1, Suite::Lemma2] {
        println!("{}\n", verify::run(suite, 0, &mut hp, Budget::default())?);
    }
    Ok(())
}
