//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::Command as Process;
use std::time::{Duration, Instant};

use normset::fock::{fock_norming_constant, fock_space, planar_rule, PlanarRegion};
use normset::regions::{build_measure_with, probe_count_for_scale};
use normset::sections::peak_tail_closed_form;
use normset::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_point(rng: &mut ChaCha8Rng) -> SpherePoint {
    SpherePoint::from_polar(rng.gen::<f64>(), 2.0 * PI * rng.gen::<f64>())
}

fn list(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|&x| normset::cli::format_number(x)).collect();
    format!("[{}]", items.join(", "))
}

fn max_over_min(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

fn acc1_orthonormality() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for k in [0usize, 1, 4, 16, 32, 64] {
        let rule = make_quadrature(k + 2, 4 * k + 1).unwrap();
        let mu = MeasureSpec::volume_on(Region::All, 1.0).unwrap();
        let g = gram_matrix(k, &mu, &rule).unwrap();
        worst = worst.max(g.max_abs_diff(&HermitianMatrix::identity(k + 1)));
    }
    let t = start.elapsed();
    outcome(
        worst < 1e-10 && t < Duration::from_secs(10),
        format!("max |gram - I| = {worst:.3e}, {:.2}s", t.as_secs_f64()),
    )
}

fn acc2_kernel_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut diag_err, mut repro_err, mut sym_err) = (0.0f64, 0.0f64, 0.0f64);
    for k in [0usize, 1, 4, 16, 32, 64] {
        let space = make_space(k).unwrap();
        let diag = (k as f64 + 1.0) / PI;
        let rule = make_quadrature(k + 2, 2 * k + 1).unwrap();
        for i in 0..100 {
            let p = random_point(&mut rng);
            let q = random_point(&mut rng);
            let basis_sum: f64 = space.basis_vector(&p).iter().map(|e| e.norm_sqr()).sum();
            diag_err = diag_err
                .max((kernel_pointnorm(k, &p, &p) - diag).abs())
                .max((basis_sum - diag).abs());
            sym_err = sym_err.max((kernel_pointnorm(k, &p, &q) - kernel_pointnorm(k, &q, &p)).abs());
            if i < 10 {
                let v = integrate(|y| kernel_pointnorm(k, y, &p).powi(2), &rule).unwrap();
                repro_err = repro_err.max((v - diag).abs());
            }
        }
    }
    outcome(
        diag_err < 1e-10 && repro_err < 1e-9 && sym_err < 1e-12,
        format!("diagonal {diag_err:.2e}, reproducing {repro_err:.2e}, symmetry {sym_err:.2e}"),
    )
}

fn acc3_peak_sections() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut norm_err, mut tail_err) = (0.0f64, 0.0f64);
    let mut bound_ok = true;
    for k in [4usize, 16, 64] {
        let space = make_space(k).unwrap();
        let rule = make_quadrature(k + 2, 4 * k + 1).unwrap();
        let y = random_point(&mut rng);
        norm_err = norm_err.max((peak_section(&space, &y).norm_sq() - 1.0).abs());
        for r in [0.5, 1.0, 2.0, 3.0] {
            let tail = peak_tail_mass(&space, &y, r, &rule).unwrap();
            let closed = (r / (k as f64).sqrt()).cos().powi(2 * k as i32 + 2);
            tail_err = tail_err.max((tail - closed).abs());
            bound_ok &= tail <= (-r * r).exp();
        }
    }
    // Uniform-in-k radius: R = 1.8 keeps the tail below 0.05 for every k.
    let uniform_worst = (2..=256)
        .map(|k| peak_tail_closed_form(k, 1.8).unwrap())
        .fold(0.0f64, f64::max);
    outcome(
        norm_err < 1e-9 && tail_err < 1e-6 && bound_ok && uniform_worst < 0.05,
        format!(
            "norm {norm_err:.2e}, tail vs closed form {tail_err:.2e}, tail <= exp(-R^2): {bound_ok}, max tail at R=1.8: {uniform_worst:.4}"
        ),
    )
}

fn acc4_pointwise_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut excess = f64::NEG_INFINITY;
    let mut peak_err = 0.0f64;
    for k in [4usize, 16, 64] {
        let space = make_space(k).unwrap();
        let diag = (k as f64 + 1.0) / PI;
        let points: Vec<SpherePoint> = (0..200).map(|_| random_point(&mut rng)).collect();
        for i in 0..200u64 {
            let s = Section::random_unit(k, 1000 * k as u64 + i);
            for p in &points {
                excess = excess.max(eval_pointnorm(&space, &s, p).unwrap() - diag);
            }
        }
        for p in points.iter().take(20) {
            let g = peak_section(&space, p);
            peak_err = peak_err.max((eval_pointnorm(&space, &g, p).unwrap() - diag).abs());
        }
    }
    outcome(
        excess <= 1e-10 && peak_err < 1e-9,
        format!("max |s|^2 - (k+1)/pi = {excess:.3e}, peak equality error {peak_err:.2e}"),
    )
}

fn acc5_bands_positive() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut detail = Vec::new();
    for delta in [0.25, 0.5] {
        let mut cs = Vec::new();
        let mut worst_ratio = f64::INFINITY;
        let mut single = Vec::new();
        for k in [4usize, 8, 16, 32] {
            let rule = make_quadrature(32, 128).unwrap();
            let g = Region::stripes(k, delta).unwrap();
            cs.push(norming_constant(k, &g, &rule).unwrap().norming_constant);
            let probes = probe_grid(probe_count_for_scale(k, 2.0, 200).unwrap());
            worst_ratio = worst_ratio.min(relative_density(&g, k, 2.0, &probes, &rule).unwrap().inf_ratio);
            let band = Region::equatorial_band(delta).unwrap();
            single.push(norming_constant(k, &band, &rule).unwrap().norming_constant);
        }
        let spread = max_over_min(&cs);
        pass &= spread < 1.5 && worst_ratio >= delta / 2.0;
        detail.push(format!(
            "delta={delta}: C={cs:.4?} max/min={spread:.3} inf_ratio>={worst_ratio:.3} (one fixed band: C={})",
            list(&single)
        ));
    }
    let t = start.elapsed();
    pass &= t < Duration::from_secs(60);
    detail.push(format!("{:.1}s", t.as_secs_f64()));
    outcome(pass, detail.join("; "))
}

fn acc6_caps_negative() -> Outcome {
    let y = SpherePoint::from_chart(Complex64::new(0.3, -0.7));
    let rule = make_quadrature(64, 256).unwrap();
    let mut cap_c = Vec::new();
    let mut comp_c = Vec::new();
    for k in [4usize, 8, 16, 32] {
        let cap = Region::cap(y, 1.0 / k as f64).unwrap();
        cap_c.push(norming_constant(k, &cap, &rule).unwrap().norming_constant);
        comp_c.push(norming_constant(k, &cap.complement(), &rule).unwrap().norming_constant);
    }
    let growth_ok = cap_c[3] >= 10.0 * cap_c[0];
    let spread = max_over_min(&comp_c);
    let exact: Vec<f64> = [4usize, 8, 16, 32]
        .iter()
        .map(|&k| (1.0 / k as f64).cos().powi(-(2 * k as i32 + 2)))
        .collect();
    outcome(
        growth_ok && spread < 1.2,
        format!(
            "cap C={} (x10 growth: {growth_ok}); complement C={comp_c:.4?} max/min={spread:.3} (closed form {exact:.4?})",
            list(&cap_c)
        ),
    )
}

fn acc7_carleson_chain() -> Outcome {
    let specs = [
        json!({"type": "volume", "region": {"type": "random_caps", "seed": 1, "count": 6, "radius": 0.5}}),
        json!({"type": "volume", "region": {"type": "random_caps", "seed": 2, "count": 12, "radius": 0.3}}),
        json!({"type": "volume", "region": {"type": "random_caps", "seed": 3, "count": 3, "radius": 0.8}, "scale": 2.0}),
        json!({"type": "volume", "region": {"type": "random_caps", "seed": 4, "count": "k", "radius": "1/sqrt(k)"}}),
        json!({"type": "volume", "region": {"type": "random_caps", "seed": 5, "count": 20, "radius": 0.25}, "scale": 0.5}),
        json!({"type": "random_atoms", "seed": 6, "count": "4*k", "mass": "1/k"}),
        json!({"type": "random_atoms", "seed": 7, "count": "2*k", "mass": "pi/(2*k)"}),
        json!({"type": "random_atoms", "seed": 8, "count": 40, "mass": 0.05}),
        json!({"type": "random_atoms", "seed": 9, "count": "8*k", "mass": "0.5/k"}),
        json!({"type": "random_atoms", "seed": 10, "count": "k", "mass": "2/k"}),
    ];
    let mut chain_ok = true;
    let mut worst_factor = 0.0f64;
    for spec in &specs {
        for k in [8usize, 16, 32] {
            let mu = build_measure_with(spec, &regions_vars(k)).unwrap();
            let rule = make_quadrature(34, 160).unwrap();
            let mut probes = probe_grid(probe_count_for_scale(k, 1.0, 200).unwrap());
            probes.extend(mu.landmarks());
            let c1 = carleson_constant(k, &mu, &rule).unwrap().carleson_constant;
            let b = berezin_sup(k, &mu, &probes, &rule).unwrap();
            let m = ball_mass_sup(k, &mu, &probes, &rule).unwrap();
            chain_ok &= b <= c1 + 2e-3;
            let vals = [c1, b, m];
            worst_factor = worst_factor.max(max_over_min(&vals));
        }
    }
    let lemma_ok = (1..=64).all(|k| kernel_lower_bound(k, 1.0).unwrap() >= (-1.0f64).exp() / PI);
    outcome(
        chain_ok && worst_factor <= 12.0 && lemma_ok,
        format!("berezin <= carleson + 2e-3: {chain_ok}; worst pairwise factor {worst_factor:.3}; M(k,1) >= e^-1/pi: {lemma_ok}"),
    )
}

fn regions_vars(k: usize) -> normset::expr::Vars {
    normset::expr::Vars::with_k(k)
}

fn acc8_exceptional_set() -> Outcome {
    let rule = make_quadrature(24, 48).unwrap();
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..20u64 {
        let eps = [0.05, 0.1][(i % 2) as usize];
        let r = [1.0, 2.0][((i / 2) % 2) as usize];
        let k = [8usize, 16][((i / 4) % 2) as usize];
        let s = match i % 3 {
            0 => Section::random_unit(k, 800 + i),
            1 => peak_section(&make_space(k).unwrap(), &random_point(&mut rng)),
            _ => {
                let mut s = Section::zero(k);
                s.coeffs[0] = Complex64::new(1.0, 0.0);
                s.coeffs[k] = Complex64::new(1.0, 0.0);
                s
            }
        };
        worst = worst.max(exceptional_mass_ratio(k, &s, r, eps, &rule).unwrap());
    }
    outcome(worst <= 1.05, format!("max ratio {worst:.4}"))
}

fn acc9_ball_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut disagreements = 0;
    let mut in_band = 0;
    for _ in 0..100_000 {
        // Chart coordinates spread over several scales.
        let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
        let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale;
        let w = z + Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale;
        let r = rng.gen_range(0.0..PI / 2.0);
        let d = fs_distance(&SpherePoint::from_chart(z), &SpherePoint::from_chart(w));
        if (d - r).abs() <= 1e-9 {
            in_band += 1;
            continue;
        }
        if in_ball_tan(z, w, r) != (d < r) {
            disagreements += 1;
        }
    }
    outcome(
        disagreements == 0,
        format!("{disagreements} disagreements outside the band ({in_band} pairs inside it)"),
    )
}

fn acc10_fock() -> Outcome {
    let start = Instant::now();
    let mut holes = Vec::new();
    let mut disk = Vec::new();
    for n in [16usize, 32, 64] {
        let space = fock_space(n).unwrap();
        let rule = planar_rule(n + 2, 1024).unwrap();
        let g = PlanarRegion::periodic_holes_by_fraction(10, 1.0, 0.3).unwrap();
        holes.push(fock_norming_constant(&space, &g, &rule).unwrap().norming_constant);
        let lone = PlanarRegion::disk(Complex64::new(0.0, 0.0), 0.2).unwrap();
        disk.push(fock_norming_constant(&space, &lone, &rule).unwrap().norming_constant);
    }
    let spread = max_over_min(&holes);
    // +inf marks a set that is not norming at all (eigenvalue below the floor).
    let growth_ok = disk[2] >= 5.0 * disk[0];
    let t = start.elapsed();
    outcome(
        spread < 2.0 && growth_ok && t < Duration::from_secs(120),
        format!(
            "holes C={holes:.4?} max/min={spread:.3}; lone disk C={disk:?} (x5 growth: {growth_ok}); {:.1}s",
            t.as_secs_f64()
        ),
    )
}

fn acc11_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("equivalence.json");
    std::fs::write(
        &config,
        serde_json::to_string_pretty(&json!({
            "command": "equivalence",
            "k": [4, 8],
            "R": 2.0,
            "region": {"type": "stripes", "count": "k", "fraction": 0.5},
            "probes": 60,
            "quad": "32x96",
            "seed": 11
        }))
        .unwrap(),
    )
    .unwrap();
    let mut outputs = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("run{i}.csv"));
        let status = Process::new(env!("CARGO_BIN_EXE_normset"))
            .arg("equivalence")
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        if !status.success() {
            return outcome(false, format!("run {i} exited with {status}"));
        }
        outputs.push(std::fs::read(&out).unwrap());
    }
    let same = outputs[0] == outputs[1];
    let lines = String::from_utf8_lossy(&outputs[0]).lines().count();
    outcome(same && lines == 3, format!("byte-identical: {same}, {lines} lines"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("ACC1 exact orthonormality", acc1_orthonormality),
        ("ACC2 kernel identities", acc2_kernel_identities),
        ("ACC3 peak-section law", acc3_peak_sections),
        ("ACC4 pointwise bound", acc4_pointwise_bound),
        ("ACC5 norming <=> density (positive)", acc5_bands_positive),
        ("ACC6 norming <=> density (negative)", acc6_caps_negative),
        ("ACC7 Carleson chain", acc7_carleson_chain),
        ("ACC8 exceptional set", acc8_exceptional_set),
        ("ACC9 ball identity", acc9_ball_identity),
        ("ACC10 Fock cross-check", acc10_fock),
        ("ACC11 determinism", acc11_determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
