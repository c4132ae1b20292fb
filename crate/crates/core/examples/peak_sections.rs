//! Peak sections concentrate in balls of radius R/sqrt(k).

use normset::sections::peak_tail_closed_form;
use normset::*;

fn main() -> normset::Result<()> {
    let y = SpherePoint::from_chart(Complex64::new(0.25, -0.6));
    let radius_factor = 2.0;
    println!("{:>5} {:>16} {:>16} {:>12}", "k", "tail", "closed form", "exp(-R^2)");
    for k in [4usize, 16, 64, 256] {
        let space = make_space(k)?;
        let rule = make_quadrature(k + 2, 2 * k + 1)?;
        let tail = peak_tail_mass(&space, &y, radius_factor, &rule)?;
        let closed = peak_tail_closed_form(k, radius_factor)?;
        println!("{k:>5} {tail:>16.10e} {closed:>16.10e} {:>12.6e}", (-radius_factor * radius_factor).exp());
    }
    let space = make_space(16)?;
    let g = peak_section(&space, &y);
    println!("peak section norm^2 = {:.15}", g.norm_sq());
    Ok(())
}
