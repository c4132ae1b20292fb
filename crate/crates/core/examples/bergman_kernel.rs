//! The Bergman kernel of degree-k sections: diagonal, reproducing property,
//! pointwise bound.

use normset::*;
use std::f64::consts::PI;

fn main() -> normset::Result<()> {
    let k = 12;
    let space = make_space(k)?;
    let rule = make_quadrature(k + 2, 2 * k + 1)?;
    let p = SpherePoint::from_chart(Complex64::new(0.4, 0.9));
    let q = SpherePoint::from_chart(Complex64::new(-1.5, 0.2));

    println!("|Pi(p,p)| = {:.12}, (k+1)/pi = {:.12}", kernel_pointnorm(k, &p, &p), (k + 1) as f64 / PI);
    println!(
        "|Pi(p,q)| = {:.12e}, ((k+1)/pi) cos^k d = {:.12e}",
        kernel_pointnorm(k, &p, &q),
        (k + 1) as f64 / PI * fs_distance(&p, &q).cos().powi(k as i32)
    );

    let s = Section::random_unit(k, 7);
    println!("reproducing residual at p: {:.3e}", reproduce_residual(&space, &s, &p, &rule)?);

    let bound = (k + 1) as f64 / PI;
    let worst = probe_grid(500)
        .iter()
        .map(|x| eval_pointnorm(&space, &s, x).map(|v| v * v))
        .collect::<normset::Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    println!("max |s|^2 over 500 probes = {worst:.6} <= {bound:.6}");
    Ok(())
}
