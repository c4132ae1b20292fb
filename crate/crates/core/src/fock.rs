//! Degree-truncated Fock space on the plane.
//!
//! `F_N` is the span of `1, z, …, z^N` in `L²(e^{-2|z|²} dm)`. Its
//! orthonormal basis is `e_j = z^j / √(π j! / 2^{j+1})`. Truncation is only
//! faithful in the bulk disk `|z| < √(N/2)`, where `|z|^{2N} e^{-2|z|²}`
//! peaks, so every planar region is intersected with that disk.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expr::Vars;
use crate::numeric::{azimuth_nodes, gauss_legendre_unit, ln_gamma, CompensatedComplex, CompensatedSum, SplitMix64};
use crate::regions::{as_object, count_at, field, number_at, parse_err, type_tag, u64_at};
use crate::spectra::{eigh, norming_from_lambda, HermitianMatrix};

pub const MAX_FOCK_DEGREE: usize = 128;

#[derive(Clone, Debug, PartialEq)]
pub struct FockSpace {
    max_degree: usize,
    ln_norm_sq: Vec<f64>,
    bulk_radius: f64,
}

pub fn fock_space(max_degree: usize) -> Result<FockSpace> {
    if max_degree > MAX_FOCK_DEGREE {
        return Err(Error::Config(format!(
            "Fock degree {max_degree} exceeds the supported maximum {MAX_FOCK_DEGREE}"
        )));
    }
    let ln_norm_sq = (0..=max_degree)
        .map(|j| PI.ln() + ln_gamma(j as f64 + 1.0) - (j as f64 + 1.0) * 2f64.ln())
        .collect();
    Ok(FockSpace {
        max_degree,
        ln_norm_sq,
        bulk_radius: (max_degree as f64 / 2.0).sqrt(),
    })
}

impl FockSpace {
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn dimension(&self) -> usize {
        self.max_degree + 1
    }

    pub fn bulk_radius(&self) -> f64 {
        self.bulk_radius
    }

    /// `‖z^j‖² = π j! / 2^{j+1}`.
    pub fn ortho_norm_sq(&self) -> Vec<f64> {
        self.ln_norm_sq.iter().map(|l| l.exp()).collect()
    }

    /// `e_j(z) e^{-|z|²}` for all `j`, evaluated in log space.
    pub fn weighted_basis(&self, z: Complex64) -> Vec<Complex64> {
        let r2 = z.norm_sqr();
        if r2 == 0.0 {
            let mut out = vec![Complex64::new(0.0, 0.0); self.dimension()];
            out[0] = Complex64::new((-0.5 * self.ln_norm_sq[0]).exp(), 0.0);
            return out;
        }
        let (ln_r, theta) = (0.5 * r2.ln(), z.arg());
        (0..=self.max_degree)
            .map(|j| {
                let m = (j as f64 * ln_r - r2 - 0.5 * self.ln_norm_sq[j]).exp();
                Complex64::from_polar(m, j as f64 * theta)
            })
            .collect()
    }

    /// `ln √(‖z^i‖² ‖z^j‖²)` for `i + j = m`, balanced as evenly as possible.
    fn ln_pair_scale(&self, m: usize) -> f64 {
        0.5 * (self.ln_norm_sq[m / 2] + self.ln_norm_sq[m.div_ceil(2)])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PlanarRegion {
    All,
    Empty,
    Disk {
        center: Complex64,
        radius: f64,
    },
    Annulus {
        center: Complex64,
        r_in: f64,
        r_out: f64,
    },
    Union(Vec<PlanarRegion>),
    Intersection(Vec<PlanarRegion>),
    Complement(Box<PlanarRegion>),
    /// The plane minus open disks of radius `hole_radius` centered on the
    /// lattice `offset + spacing·(ℤ + iℤ)`.
    PeriodicHoles {
        seed: u64,
        offset: Complex64,
        spacing: f64,
        hole_radius: f64,
    },
}

fn planar_invalid(message: String) -> Error {
    Error::Validation {
        path: "$".into(),
        message,
    }
}

impl PlanarRegion {
    pub fn disk(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !(center.re.is_finite() && center.im.is_finite()) {
            return Err(planar_invalid(format!("disk needs a finite center and radius > 0, got {radius}")));
        }
        Ok(Self::Disk { center, radius })
    }

    pub fn annulus(center: Complex64, r_in: f64, r_out: f64) -> Result<Self> {
        if !(r_in >= 0.0 && r_in < r_out && r_out.is_finite()) || !(center.re.is_finite() && center.im.is_finite()) {
            return Err(planar_invalid(format!("annulus needs 0 <= r_in < r_out, got ({r_in}, {r_out})")));
        }
        Ok(Self::Annulus { center, r_in, r_out })
    }

    /// Lattice offset drawn uniformly from the fundamental cell by `seed`.
    pub fn periodic_holes(seed: u64, spacing: f64, hole_radius: f64) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) || !(hole_radius > 0.0 && hole_radius < 0.5 * spacing) {
            return Err(planar_invalid(format!(
                "periodic holes need spacing > 0 and 0 < hole_radius < spacing/2, got ({spacing}, {hole_radius})"
            )));
        }
        let mut rng = SplitMix64::new(seed);
        let offset = Complex64::new(rng.next_f64(), rng.next_f64()) * spacing;
        Ok(Self::PeriodicHoles {
            seed,
            offset,
            spacing,
            hole_radius,
        })
    }

    /// Holes sized so that a fraction `removed` of the area is taken out.
    pub fn periodic_holes_by_fraction(seed: u64, spacing: f64, removed: f64) -> Result<Self> {
        if !(removed > 0.0 && removed < PI / 4.0) {
            return Err(planar_invalid(format!("removed area fraction must lie in (0, pi/4), got {removed}")));
        }
        Self::periodic_holes(seed, spacing, spacing * (removed / PI).sqrt())
    }

    pub fn complement(self) -> Self {
        match self {
            Self::Complement(inner) => *inner,
            other => Self::Complement(Box::new(other)),
        }
    }

    /// The same region moved by `shift`.
    pub fn translated(&self, shift: Complex64) -> Self {
        match self {
            Self::All | Self::Empty => self.clone(),
            Self::Disk { center, radius } => Self::Disk {
                center: center + shift,
                radius: *radius,
            },
            Self::Annulus { center, r_in, r_out } => Self::Annulus {
                center: center + shift,
                r_in: *r_in,
                r_out: *r_out,
            },
            Self::Union(rs) => Self::Union(rs.iter().map(|r| r.translated(shift)).collect()),
            Self::Intersection(rs) => Self::Intersection(rs.iter().map(|r| r.translated(shift)).collect()),
            Self::Complement(r) => Self::Complement(Box::new(r.translated(shift))),
            Self::PeriodicHoles {
                seed,
                offset,
                spacing,
                hole_radius,
            } => Self::PeriodicHoles {
                seed: *seed,
                offset: offset + shift,
                spacing: *spacing,
                hole_radius: *hole_radius,
            },
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            Self::All => true,
            Self::Empty => false,
            Self::Disk { center, radius } => (z - center).norm() < *radius,
            Self::Annulus { center, r_in, r_out } => {
                let d = (z - center).norm();
                d > *r_in && d < *r_out
            }
            Self::Union(rs) => rs.iter().any(|r| r.contains(z)),
            Self::Intersection(rs) => rs.iter().all(|r| r.contains(z)),
            Self::Complement(r) => !r.contains(z),
            Self::PeriodicHoles {
                offset,
                spacing,
                hole_radius,
                ..
            } => {
                let w = (z - offset) / spacing;
                let nearest = Complex64::new(w.re.round(), w.im.round());
                (w - nearest).norm() * spacing >= *hole_radius
            }
        }
    }

    /// Boundary circles meeting the disk `|z| <= extent`.
    pub fn boundary_circles(&self, extent: f64) -> Vec<(Complex64, f64)> {
        let mut out = Vec::new();
        self.collect_circles(extent, &mut out);
        out
    }

    fn collect_circles(&self, extent: f64, out: &mut Vec<(Complex64, f64)>) {
        match self {
            Self::All | Self::Empty => {}
            Self::Disk { center, radius } => out.push((*center, *radius)),
            Self::Annulus { center, r_in, r_out } => {
                if *r_in > 0.0 {
                    out.push((*center, *r_in));
                }
                out.push((*center, *r_out));
            }
            Self::Union(rs) | Self::Intersection(rs) => {
                for r in rs {
                    r.collect_circles(extent, out);
                }
            }
            Self::Complement(r) => r.collect_circles(extent, out),
            Self::PeriodicHoles {
                offset,
                spacing,
                hole_radius,
                ..
            } => {
                let reach = extent + hole_radius;
                let lo_re = ((-reach - offset.re) / spacing).floor() as i64;
                let hi_re = ((reach - offset.re) / spacing).ceil() as i64;
                let lo_im = ((-reach - offset.im) / spacing).floor() as i64;
                let hi_im = ((reach - offset.im) / spacing).ceil() as i64;
                for a in lo_re..=hi_re {
                    for b in lo_im..=hi_im {
                        let c = offset + Complex64::new(a as f64, b as f64) * spacing;
                        if c.norm() < reach {
                            out.push((c, *hole_radius));
                        }
                    }
                }
            }
        }
    }

    pub fn to_json(&self) -> Value {
        let pt = |z: &Complex64| json!([z.re, z.im]);
        match self {
            Self::All => json!({"type": "all"}),
            Self::Empty => json!({"type": "empty"}),
            Self::Disk { center, radius } => json!({"type": "disk", "center": pt(center), "radius": radius}),
            Self::Annulus { center, r_in, r_out } => {
                json!({"type": "annulus", "center": pt(center), "r_in": r_in, "r_out": r_out})
            }
            Self::Union(rs) => json!({"type": "union", "members": rs.iter().map(Self::to_json).collect::<Vec<_>>()}),
            Self::Intersection(rs) => {
                json!({"type": "intersection", "members": rs.iter().map(Self::to_json).collect::<Vec<_>>()})
            }
            Self::Complement(r) => json!({"type": "complement", "region": r.to_json()}),
            Self::PeriodicHoles {
                seed,
                offset,
                spacing,
                hole_radius,
            } => json!({
                "type": "periodic_holes",
                "seed": seed,
                "offset": pt(offset),
                "spacing": spacing,
                "hole_radius": hole_radius,
            }),
        }
    }
}

/// Planar region from JSON. Numeric fields accept expression strings.
pub fn build_planar_region_with(spec: &Value, vars: &Vars) -> Result<PlanarRegion> {
    planar_at(spec, vars, "$")
}

fn complex_at(v: &Value, path: &str) -> Result<Complex64> {
    match v.as_array().map(|a| (a.len(), a)) {
        Some((2, a)) => {
            let re = a[0].as_f64().ok_or_else(|| parse_err(&format!("{path}[0]"), "expected a number"))?;
            let im = a[1].as_f64().ok_or_else(|| parse_err(&format!("{path}[1]"), "expected a number"))?;
            Ok(Complex64::new(re, im))
        }
        _ => Err(parse_err(path, "expected [re, im]")),
    }
}

fn planar_at(spec: &Value, vars: &Vars, path: &str) -> Result<PlanarRegion> {
    let obj = as_object(spec, path)?;
    let kind = type_tag(obj, path)?;
    let relabel = |e: Error| match e {
        Error::Validation { message, .. } => Error::Validation {
            path: path.to_string(),
            message,
        },
        other => other,
    };
    match kind {
        "all" => Ok(PlanarRegion::All),
        "empty" => Ok(PlanarRegion::Empty),
        "disk" => {
            let center = complex_at(field(obj, "center", path)?, &format!("{path}.center"))?;
            PlanarRegion::disk(center, number_at(obj, "radius", vars, path)?).map_err(relabel)
        }
        "annulus" => {
            let center = complex_at(field(obj, "center", path)?, &format!("{path}.center"))?;
            let r_in = number_at(obj, "r_in", vars, path)?;
            let r_out = number_at(obj, "r_out", vars, path)?;
            PlanarRegion::annulus(center, r_in, r_out).map_err(relabel)
        }
        "union" | "intersection" => {
            let members = field(obj, "members", path)?
                .as_array()
                .ok_or_else(|| parse_err(&format!("{path}.members"), "expected an array"))?;
            let rs = members
                .iter()
                .enumerate()
                .map(|(i, m)| planar_at(m, vars, &format!("{path}.members[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            Ok(if kind == "union" {
                PlanarRegion::Union(rs)
            } else {
                PlanarRegion::Intersection(rs)
            })
        }
        "complement" => Ok(planar_at(field(obj, "region", path)?, vars, &format!("{path}.region"))?.complement()),
        "periodic_holes" => {
            let seed = u64_at(obj, "seed", path)?;
            let spacing = match obj.get("spacing") {
                None => 1.0,
                Some(_) => number_at(obj, "spacing", vars, path)?,
            };
            let mut region = match (obj.get("hole_radius"), obj.get("removed_fraction")) {
                (Some(_), None) => PlanarRegion::periodic_holes(seed, spacing, number_at(obj, "hole_radius", vars, path)?),
                (None, Some(_)) => PlanarRegion::periodic_holes_by_fraction(
                    seed,
                    spacing,
                    number_at(obj, "removed_fraction", vars, path)?,
                ),
                _ => Err(parse_err(path, "give exactly one of `hole_radius` and `removed_fraction`")),
            }
            .map_err(relabel)?;
            if let (Some(v), PlanarRegion::PeriodicHoles { offset, .. }) = (obj.get("offset"), &mut region) {
                *offset = complex_at(v, &format!("{path}.offset"))?;
            }
            Ok(region)
        }
        "disks" => {
            // Convenience: `count` disks of equal radius on a ring.
            let count = count_at(obj, "count", vars, path)?;
            let ring = number_at(obj, "ring_radius", vars, path)?;
            let radius = number_at(obj, "radius", vars, path)?;
            let members = (0..count)
                .map(|i| {
                    let c = Complex64::from_polar(ring, 2.0 * PI * i as f64 / count.max(1) as f64);
                    PlanarRegion::disk(c, radius)
                })
                .collect::<Result<Vec<_>>>()
                .map_err(relabel)?;
            Ok(PlanarRegion::Union(members))
        }
        other => Err(parse_err(&format!("{path}.type"), &format!("unknown planar region type `{other}`"))),
    }
}

/// Polar product rule over the bulk disk: Gauss–Legendre in `|z|`,
/// uniform in the angle.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarRule {
    pub radial_order: usize,
    pub azimuthal_order: usize,
}

pub fn planar_rule(radial: usize, azimuthal: usize) -> Result<PlanarRule> {
    if radial == 0 || azimuthal == 0 {
        return Err(Error::Config(format!(
            "quadrature orders must be positive, got {radial}x{azimuthal}"
        )));
    }
    Ok(PlanarRule {
        radial_order: radial,
        azimuthal_order: azimuthal,
    })
}

impl PlanarRule {
    fn check(&self, space: &FockSpace) -> Result<()> {
        let n = space.max_degree;
        if self.radial_order < n + 2 || self.azimuthal_order < 2 * n + 1 {
            return Err(Error::Config(format!(
                "a {}x{} planar rule is too coarse for degree {n}; need radial >= {} and azimuthal >= {}",
                self.radial_order,
                self.azimuthal_order,
                n + 2,
                2 * n + 1
            )));
        }
        Ok(())
    }
}

/// Radii in `(0, r_max)` where the ray at angle `theta` meets `|z - c| = a`.
fn ray_crossings(c: Complex64, a: f64, theta: f64, r_max: f64, out: &mut Vec<f64>) {
    let p = (c.conj() * Complex64::from_polar(1.0, theta)).re;
    let disc = p * p - (c.norm_sqr() - a * a);
    if disc <= 0.0 {
        return;
    }
    let sq = disc.sqrt();
    for r in [p - sq, p + sq] {
        if r > 0.0 && r < r_max {
            out.push(r);
        }
    }
}

/// Arguments of the points where `|z - c1| = a1` meets `|z - c2| = a2`.
fn circle_intersection_angles(c1: Complex64, a1: f64, c2: Complex64, a2: f64, out: &mut Vec<f64>) {
    let d = (c2 - c1).norm();
    if d < 1e-14 || d >= a1 + a2 || d <= (a1 - a2).abs() {
        return;
    }
    let x = (d * d + a1 * a1 - a2 * a2) / (2.0 * d);
    let y = (a1 * a1 - x * x).max(0.0).sqrt();
    let u = (c2 - c1) / d;
    for p in [c1 + u * Complex64::new(x, y), c1 + u * Complex64::new(x, -y)] {
        if p.norm() > 1e-12 {
            out.push(p.arg());
        }
    }
}

/// Calls `visit(theta, pieces)` for every ray, where `pieces` holds
/// `(r, weight)` for `g ∩ bulk` along the ray; weights include `dm = r dr dθ`.
fn for_each_ray<F>(g: &PlanarRegion, bulk_radius: f64, rule: &PlanarRule, mut visit: F)
where
    F: FnMut(f64, &[(f64, f64)]),
{
    let r_max = bulk_radius;
    if r_max <= 0.0 || matches!(g, PlanarRegion::Empty) {
        return;
    }
    let radial = rule.radial_order;
    let min_nodes = radial.div_ceil(4).max(4).min(radial);
    let circles = g.boundary_circles(bulk_radius);
    let mut events = Vec::new();
    let rim = (Complex64::new(0.0, 0.0), r_max);
    for (i, &(c, a)) in circles.iter().enumerate() {
        let d = c.norm();
        if d > a {
            let half = (a / d).asin();
            events.push(c.arg() + half);
            events.push(c.arg() - half);
        }
        for &(c2, a2) in circles[i + 1..].iter().chain(std::iter::once(&rim)) {
            circle_intersection_angles(c, a, c2, a2, &mut events);
        }
    }
    let mut cache: HashMap<usize, (Vec<f64>, Vec<f64>)> = HashMap::new();
    let mut cuts = Vec::new();
    let mut pieces = Vec::new();
    for (theta, dtheta) in azimuth_nodes(rule.azimuthal_order, &mut events) {
        cuts.clear();
        cuts.push(0.0);
        for (c, a) in &circles {
            ray_crossings(*c, *a, theta, r_max, &mut cuts);
        }
        cuts.push(r_max);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        pieces.clear();
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let len = hi - lo;
            if len <= 0.0 || !g.contains(Complex64::from_polar(0.5 * (lo + hi), theta)) {
                continue;
            }
            let n = ((radial as f64 * len / r_max).ceil() as usize).clamp(min_nodes, radial);
            let (x, wt) = cache.entry(n).or_insert_with(|| gauss_legendre_unit(n));
            for (xi, wi) in x.iter().zip(wt.iter()) {
                let r = lo + len * xi;
                pieces.push((r, r * dtheta * len * wi));
            }
        }
        if !pieces.is_empty() {
            visit(theta, &pieces);
        }
    }
}

/// Lebesgue area of `g` inside the bulk disk.
pub fn planar_area(g: &PlanarRegion, bulk_radius: f64, rule: &PlanarRule) -> f64 {
    let mut acc = CompensatedSum::new();
    for_each_ray(g, bulk_radius, rule, |_, pieces| {
        for (_, w) in pieces {
            acc.add(*w);
        }
    });
    acc.value()
}

/// `M_ij = ∫_{g ∩ bulk} e_i ē_j e^{-2|z|²} dm`.
///
/// Along each ray the integrand depends on `(i, j)` only through
/// `r^{i+j}` and the phase `e^{i(i-j)θ}`, so radial moments are formed once
/// per ray and then spread over the matrix.
pub fn fock_gram(space: &FockSpace, g: &PlanarRegion, rule: &PlanarRule) -> Result<HermitianMatrix> {
    rule.check(space)?;
    let n = space.dimension();
    let m_count = 2 * space.max_degree + 1;
    let ln_h: Vec<f64> = (0..m_count).map(|m| space.ln_pair_scale(m)).collect();
    // exp(h_{i+j} - (ln n_i + ln n_j)/2) <= 1 by log-convexity of j!.
    let mut scale = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            scale[i * n + j] = (ln_h[i + j] - 0.5 * (space.ln_norm_sq[i] + space.ln_norm_sq[j])).exp();
        }
    }
    let mut acc = vec![CompensatedComplex::default(); n * n];
    let mut moments = vec![0.0; m_count];
    let mut phases = vec![Complex64::new(1.0, 0.0); n];
    for_each_ray(g, space.bulk_radius, rule, |theta, pieces| {
        moments.iter_mut().for_each(|x| *x = 0.0);
        for &(r, w) in pieces {
            let (ln_r, u) = (r.ln(), r * r);
            for (m, x) in moments.iter_mut().enumerate() {
                *x += w * (m as f64 * ln_r - 2.0 * u - ln_h[m]).exp();
            }
        }
        let step = Complex64::from_polar(1.0, -theta);
        for d in 1..n {
            phases[d] = phases[d - 1] * step;
        }
        for i in 0..n {
            for j in i..n {
                acc[i * n + j].add(phases[j - i] * (moments[i + j] * scale[i * n + j]));
            }
        }
    });
    let entries = acc.iter().map(CompensatedComplex::value).collect::<Vec<_>>();
    if let Some(bad) = entries.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite {
            node: bad,
            value: entries[bad].re,
        });
    }
    Ok(HermitianMatrix::from_upper(n, entries))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockResult {
    pub max_degree: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Smallest eigenvalue of the full-bulk Gram.
    pub bulk_lambda_min: f64,
    /// Largest eigenvalue of the full-bulk Gram.
    pub bulk_lambda_max: f64,
    /// `1 - bulk_lambda_min`: mass of the worst basis function outside the bulk.
    pub leak: f64,
    /// `bulk_lambda_min / lambda_min`, or `+inf` below the eigenvalue floor.
    pub norming_constant: f64,
}

/// `1 - λ_min` of the full-bulk Gram.
pub fn fock_leak(space: &FockSpace, rule: &PlanarRule) -> Result<f64> {
    let bulk = eigh(&fock_gram(space, &PlanarRegion::All, rule)?)?;
    Ok(1.0 - bulk.eigenvalues[0])
}

/// Norming constant of `g` relative to the bulk disk.
pub fn fock_norming_constant(space: &FockSpace, g: &PlanarRegion, rule: &PlanarRule) -> Result<FockResult> {
    let bulk = eigh(&fock_gram(space, &PlanarRegion::All, rule)?)?;
    let own = eigh(&fock_gram(space, g, rule)?)?;
    let bulk_min = bulk.eigenvalues[0];
    let lambda_min = own.eigenvalues[0];
    let c = norming_from_lambda(lambda_min);
    Ok(FockResult {
        max_degree: space.max_degree,
        lambda_min,
        lambda_max: *own.eigenvalues.last().expect("nonempty"),
        bulk_lambda_min: bulk_min,
        bulk_lambda_max: *bulk.eigenvalues.last().expect("nonempty"),
        leak: 1.0 - bulk_min,
        norming_constant: if c.is_finite() { bulk_min * c } else { c },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Regularized lower incomplete gamma `P(a, x)` for integer `a` by its
    /// power series `e^{-x} Σ_{n>=a} x^n / n!`.
    fn reg_gamma_p(a: usize, x: f64) -> f64 {
        let mut term = (a as f64 * x.ln() - x - ln_gamma(a as f64 + 1.0)).exp();
        let mut sum: f64 = 0.0;
        let mut n = a as f64;
        while term > 1e-18 * f64::max(sum, 1e-300) {
            sum += term;
            n += 1.0;
            term *= x / n;
        }
        sum
    }

    /// ∫_0^∞ u^j e^{-2u} du · π by composite Simpson on [0, 60].
    fn norm_oracle(j: usize) -> f64 {
        let n = 60_000;
        let h = 60.0 / n as f64;
        let f = |u: f64| u.powi(j as i32) * (-2.0 * u).exp();
        let mut acc = f(0.0) + f(60.0);
        for i in 1..n {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        PI * acc * h / 3.0
    }

    #[test]
    fn norm_examples() {
        let s = fock_space(2).unwrap();
        let n = s.ortho_norm_sq();
        assert!((n[0] - PI / 2.0).abs() < 1e-14);
        assert!((n[0] - norm_oracle(0)).abs() < 1e-10);
        assert!((n[1] - PI / 4.0).abs() < 1e-14);
        assert!((n[1] - norm_oracle(1)).abs() < 1e-10);
        let big = fock_space(128).unwrap().ortho_norm_sq();
        for j in 0..128 {
            assert!((big[j + 1] / big[j] - (j as f64 + 1.0) / 2.0).abs() < 1e-10 * (j as f64 + 1.0));
        }
        assert!(fock_space(129).is_err());
        assert!((fock_space(32).unwrap().bulk_radius() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn weighted_basis_matches_direct_formula() {
        let s = fock_space(10).unwrap();
        let z = c(0.7, -1.1);
        let v = s.weighted_basis(z);
        let norms = s.ortho_norm_sq();
        for j in 0..=10 {
            let direct = z.powu(j as u32) * (-z.norm_sqr()).exp() / norms[j].sqrt();
            assert!((v[j] - direct).norm() < 1e-14);
        }
        assert!((s.weighted_basis(c(0.0, 0.0))[0].re - (2.0 / PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bulk_gram_is_diagonal_incomplete_gamma() {
        for n in [4usize, 16, 32] {
            let s = fock_space(n).unwrap();
            // r^{2j+1} e^{-2r²} is not polynomial; the minimum order is only
            // loose at small N.
            for (radial, tol) in [(n + 2, 1e-4), (2 * n + 24, 1e-12)] {
                let rule = planar_rule(radial, 2 * n + 1).unwrap();
                let g = fock_gram(&s, &PlanarRegion::All, &rule).unwrap();
                for i in 0..=n {
                    for j in 0..=n {
                        let expect = if i == j { reg_gamma_p(i + 1, n as f64) } else { 0.0 };
                        assert!((g.get(i, j) - c(expect, 0.0)).norm() < tol, "N={n} ({i},{j})");
                    }
                }
            }
        }
        let s = fock_space(32).unwrap();
        let leak = fock_leak(&s, &planar_rule(88, 65).unwrap()).unwrap();
        assert!((leak - (1.0 - reg_gamma_p(33, 32.0))).abs() < 1e-10);
        assert!(leak > 0.45 && leak < 0.55);
    }

    #[test]
    fn rule_orders_are_checked() {
        let s = fock_space(8).unwrap();
        assert!(matches!(
            fock_gram(&s, &PlanarRegion::All, &planar_rule(9, 40).unwrap()),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            fock_gram(&s, &PlanarRegion::All, &planar_rule(10, 16).unwrap()),
            Err(Error::Config(_))
        ));
        assert!(planar_rule(0, 3).is_err());
    }

    #[test]
    fn empty_is_zero_and_gram_is_additive() {
        let s = fock_space(12).unwrap();
        let rule = planar_rule(60, 128).unwrap();
        let zero = fock_gram(&s, &PlanarRegion::Empty, &rule).unwrap();
        assert_eq!(zero, HermitianMatrix::zeros(13));
        let d1 = PlanarRegion::disk(c(0.5, 0.3), 0.6).unwrap();
        let d2 = PlanarRegion::disk(c(-1.0, -0.8), 0.4).unwrap();
        let both = PlanarRegion::Union(vec![d1.clone(), d2.clone()]);
        let sum = fock_gram(&s, &d1, &rule).unwrap().add(&fock_gram(&s, &d2, &rule).unwrap());
        let u = fock_gram(&s, &both, &rule).unwrap().max_abs_diff(&sum);
        assert!(u < 1e-10, "{u}");
        // A region and its complement make up the bulk.
        let rest = fock_gram(&s, &d1.clone().complement(), &rule).unwrap();
        let bulk = fock_gram(&s, &PlanarRegion::All, &rule).unwrap();
        let diff = rest.add(&fock_gram(&s, &d1, &rule).unwrap()).max_abs_diff(&bulk);
        assert!(diff < 1e-10, "{diff}");
    }

    #[test]
    fn centered_disk_matches_incomplete_gamma() {
        let s = fock_space(6).unwrap();
        let rule = planar_rule(40, 64).unwrap();
        let g = fock_gram(&s, &PlanarRegion::disk(c(0.0, 0.0), 1.0).unwrap(), &rule).unwrap();
        for j in 0..=6 {
            assert!((g.get(j, j).re - reg_gamma_p(j + 1, 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn off_center_disk_matches_monte_carlo_free_oracle() {
        // Entry (0,0) of an off-center disk: (2/π) ∫_disk e^{-2|z|²} dm,
        // integrated in polar coordinates around the disk center.
        let s = fock_space(6).unwrap();
        let rule = planar_rule(40, 512).unwrap();
        let (cen, a) = (c(0.8, -0.4), 0.5);
        let g = fock_gram(&s, &PlanarRegion::disk(cen, a).unwrap(), &rule).unwrap();
        let (nr, nt) = (400, 400);
        let mut acc = 0.0;
        for i in 0..nr {
            let rho = a * (i as f64 + 0.5) / nr as f64;
            for t in 0..nt {
                let z = cen + Complex64::from_polar(rho, 2.0 * PI * t as f64 / nt as f64);
                acc += rho * (-2.0 * z.norm_sqr()).exp();
            }
        }
        let oracle = 2.0 / PI * acc * (a / nr as f64) * (2.0 * PI / nt as f64);
        assert!((g.get(0, 0).re - oracle).abs() < 1e-4, "{} vs {oracle}", g.get(0, 0).re);
    }

    #[test]
    fn periodic_holes_area_and_membership() {
        let g = PlanarRegion::periodic_holes_by_fraction(3, 1.0, 0.3).unwrap();
        let PlanarRegion::PeriodicHoles { offset, hole_radius, .. } = &g else {
            unreachable!()
        };
        assert!(!g.contains(*offset + c(2.0, -1.0)));
        assert!(g.contains(*offset + c(0.5, 0.5)));
        assert!((PI * hole_radius * hole_radius - 0.3).abs() < 1e-14);
        let rule = planar_rule(66, 1024).unwrap();
        let rho = 4.0;
        let area = planar_area(&g, rho, &rule);
        let bulk = PI * rho * rho;
        assert!((area / bulk - 0.7).abs() < 0.03, "{}", area / bulk);
        let hole = PlanarRegion::disk(c(1.0, 0.5), 0.3).unwrap();
        let err = (planar_area(&hole, rho, &planar_rule(66, 64).unwrap()) - PI * 0.09).abs();
        assert!(err < 1e-13, "{err}");
        assert!(PlanarRegion::periodic_holes(0, 1.0, 0.6).is_err());
    }

    #[test]
    fn norming_examples() {
        let s = fock_space(16).unwrap();
        let rule = planar_rule(18, 256).unwrap();
        let bulk = fock_norming_constant(&s, &PlanarRegion::All, &rule).unwrap();
        assert!((bulk.norming_constant - 1.0).abs() < 1e-12);
        let none = fock_norming_constant(&s, &PlanarRegion::Empty, &rule).unwrap();
        assert_eq!(none.norming_constant, f64::INFINITY);
        let holes = PlanarRegion::periodic_holes_by_fraction(1, 1.0, 0.3).unwrap();
        let r = fock_norming_constant(&s, &holes, &rule).unwrap();
        assert!(r.norming_constant >= 1.0 && r.norming_constant.is_finite());
        assert!(r.lambda_max <= r.bulk_lambda_max + 1e-6);
    }

    #[test]
    fn json_round_trip_and_errors() {
        let spec = json!({"type": "union", "members": [
            {"type": "disk", "center": [0.5, 0.0], "radius": "1/sqrt(k)"},
            {"type": "annulus", "center": [0, 0], "r_in": 1, "r_out": 2},
            {"type": "complement", "region": {"type": "periodic_holes", "seed": 4, "removed_fraction": 0.3}},
        ]});
        let g = build_planar_region_with(&spec, &Vars::with_k(4)).unwrap();
        let back = build_planar_region_with(&g.to_json(), &Vars::default()).unwrap();
        assert_eq!(g, back);
        let bad = json!({"type": "disk", "center": [0, 0], "radius": -1});
        assert!(matches!(
            build_planar_region_with(&bad, &Vars::default()),
            Err(Error::Validation { .. })
        ));
        let unknown = json!({"type": "hexagon"});
        assert!(matches!(
            build_planar_region_with(&unknown, &Vars::default()),
            Err(Error::Parse { .. })
        ));
    }
}
