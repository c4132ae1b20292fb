//! Relative density of regions at the scale R/sqrt(k).

use normset::*;

fn main() -> normset::Result<()> {
    let radius_factor = 2.0;
    let probes = probe_grid(150);
    let regions = [
        ("equatorial band 50%", Region::equatorial_band(0.5)?),
        ("cap of radius 0.5", Region::Cap(FsBall::new(SpherePoint::origin(), 0.5)?)),
    ];
    for k in [4usize, 16, 64] {
        let rule = make_quadrature(24, 96)?;
        let stripes = Region::stripes(k, 0.5)?;
        let report = relative_density(&stripes, k, radius_factor, &probes, &rule)?;
        println!("k = {k:>3} {:<22} inf ratio {:.4}", format!("{k} stripes 50%"), report.inf_ratio);
        for (name, g) in &regions {
            let report = relative_density(g, k, radius_factor, &probes, &rule)?;
            println!("k = {k:>3} {name:<22} inf ratio {:.4}", report.inf_ratio);
        }
    }
    Ok(())
}
