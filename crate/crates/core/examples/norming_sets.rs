//! Norming constants sup ||s||^2 / ||s||^2_G from the smallest eigenvalue of
//! the Gram matrix on G.

use normset::*;

fn main() -> normset::Result<()> {
    println!("{:>4} {:>14} {:>14} {:>14}", "k", "stripes", "shrinking cap", "its complement");
    for k in [4usize, 8, 16, 32] {
        let rule = make_quadrature(k + 2, 4 * k + 1)?;
        let stripes = Region::stripes(k, 0.5)?;
        let cap = Region::Cap(FsBall::new(SpherePoint::origin(), 1.0 / k as f64)?);
        let c_stripes = norming_constant(k, &stripes, &rule)?.norming_constant;
        let c_cap = norming_constant(k, &cap, &rule)?.norming_constant;
        let c_rest = norming_constant(k, &cap.complement(), &rule)?.norming_constant;
        println!("{k:>4} {c_stripes:>14.6} {c_cap:>14.6e} {c_rest:>14.6}");
    }

    let k = 8;
    let rule = make_quadrature(k + 2, 4 * k + 1)?;
    let res = norming_constant(k, &Region::equatorial_band(0.3)?, &rule)?;
    println!(
        "band k = {k}: lambda in [{:.6}, {:.6}], extremal section norm^2 {:.12}",
        res.lambda_min,
        res.lambda_max,
        res.extremal_section.norm_sq()
    );
    println!("{}", serde_json::to_string(&res.record().to_json()).expect("serializable"));
    Ok(())
}
