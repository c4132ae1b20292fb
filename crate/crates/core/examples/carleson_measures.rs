//! Carleson constant, Berezin transform and scaled ball masses of a measure.

use normset::*;

fn main() -> normset::Result<()> {
    let probes = probe_grid(200);
    println!("{:>4} {:>12} {:>12} {:>12}", "k", "carleson", "berezin sup", "ball mass");
    for k in [4usize, 8, 16] {
        let rule = make_quadrature(k + 2, 4 * k + 1)?;
        let mu = MeasureSpec::random_atoms(5, 10 * k, 1.0 / k as f64)?;
        let c = carleson_constant(k, &mu, &rule)?.carleson_constant;
        let mut landmarks = probes.clone();
        landmarks.extend(mu.landmarks());
        let b = berezin_sup(k, &mu, &landmarks, &rule)?;
        let m = ball_mass_sup(k, &mu, &landmarks, &rule)?;
        println!("{k:>4} {c:>12.6} {b:>12.6} {m:>12.6}");
    }
    let k = 8;
    let rule = make_quadrature(k + 2, 4 * k + 1)?;
    let volume = MeasureSpec::volume_on(Region::All, 1.0)?;
    let z = SpherePoint::from_chart(Complex64::new(0.3, 0.3));
    println!("Berezin transform of volume at z: {:.12}", berezin_transform(k, &volume, &z, &rule)?);
    println!("kernel lower bound M({k}, 1) = {:.6}", kernel_lower_bound(k, 1.0)?);
    Ok(())
}
