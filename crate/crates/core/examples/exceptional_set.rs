//! Mass of a section on the set where it is small relative to its local
//! average.

use normset::*;

fn main() -> normset::Result<()> {
    let (radius_factor, eps) = (2.0, 0.1);
    for k in [4usize, 8, 16] {
        let rule = make_quadrature(k + 8, 4 * k + 8)?;
        let worst = (0..5)
            .map(|seed| exceptional_mass_ratio(k, &Section::random_unit(k, seed), radius_factor, eps, &rule))
            .collect::<normset::Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        println!("k = {k:>2}: max ratio over 5 random sections = {worst:.4}");
    }
    Ok(())
}
