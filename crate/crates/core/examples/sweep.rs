//! A small (a, x) grid written as CSV, the format `ellipsoid-lattice sweep` produces.

use ellipsoid_lattice::cli::{sweep_cell, write_records, Format};
use ellipsoid_lattice::{Budget, EllipsoidParams, Hp};

fn main() -> ellipsoid_lattice::Result<()> {
    let mut hp = Hp::new(20);
    let mut rows = Vec::new();
    for a in ["1/2", "1", "2"] {
        for x in ["1", "15000", "100000"] {
            rows.push(sweep_cell(&mut hp, &EllipsoidParams::parse(a, x)?, Budget::default(), false)?);
        }
    }
    write_records(std::io::stdout().lock(), &rows, Format::Csv)
}
