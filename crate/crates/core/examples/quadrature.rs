//! Product quadrature on CP¹ and the boundary-adapted rule for regions.

use normset::regions::adapted_rule;
use normset::*;
use std::f64::consts::PI;

fn main() -> normset::Result<()> {
    let rule = make_quadrature(24, 96)?;
    println!("nodes = {}, total weight = {:.15} (pi = {PI:.15})", rule.len(), rule.total_weight());
    println!("exact for degree 20: {}", rule.exact_for_degree(20));

    let p = SpherePoint::from_chart(Complex64::new(0.7, -0.2));
    let q = normalize_point(Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0))?;
    let u = Unitary::from_pair(Complex64::new(0.3, 0.4), Complex64::new(-0.5, 0.1))?;
    println!(
        "d(p, q) = {:.12}, after a unitary = {:.12}",
        fs_distance(&p, &q),
        fs_distance(&u.apply(&p), &u.apply(&q))
    );

    for r in [0.05, 0.3, 1.0] {
        let cap = Region::Cap(FsBall::new(p, r)?);
        let v = region_volume(&cap, &rule)?;
        println!("cap r = {r}: volume {v:.12}, exact {:.12}", ball_volume(r)?);
    }

    let g = Region::random_caps(3, 12, 0.25)?;
    let nodes = adapted_rule(&g, &SpherePoint::origin(), std::f64::consts::FRAC_PI_2, 24, 96)?;
    let mean_s = integrate(|x| x.colatitude().sin().powi(2), &nodes)? / nodes.total_weight();
    println!("12 random caps: volume {:.6}, mean sin^2 colatitude {mean_s:.6}", nodes.total_weight());
    Ok(())
}
