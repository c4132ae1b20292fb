//! Norming constants for weighted polynomials in the plane, the flat
//! counterpart of the projective line.

use normset::fock::{fock_leak, fock_norming_constant, fock_space, planar_rule, PlanarRegion};
use normset::Complex64;

fn main() -> normset::Result<()> {
    let holes = PlanarRegion::periodic_holes_by_fraction(10, 1.0, 0.3)?;
    let disk = PlanarRegion::disk(Complex64::new(0.0, 0.0), 0.2)?;
    println!("{:>4} {:>10} {:>12} {:>12} {:>8}", "N", "bulk r", "holes C", "disk C", "leak");
    for n in [16usize, 32, 64] {
        let space = fock_space(n)?;
        let rule = planar_rule(n + 2, 1024)?;
        let h = fock_norming_constant(&space, &holes, &rule)?;
        let d = fock_norming_constant(&space, &disk, &rule)?;
        let leak = fock_leak(&space, &rule)?;
        println!(
            "{n:>4} {:>10.4} {:>12.6} {:>12.4e} {leak:>8.4}",
            space.bulk_radius(),
            h.norming_constant,
            d.norming_constant
        );
    }
    Ok(())
}
