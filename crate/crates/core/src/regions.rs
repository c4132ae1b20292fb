//! Measurable sets and measures on CP¹.
//!
//! Regions are boolean combinations of open balls and colatitude bands, so
//! every boundary is a union of Fubini–Study circles. Region integrals use
//! product rules whose radial nodes are split at the exact points where each
//! ray crosses a boundary circle; inside each piece the indicator is
//! constant and the rule stays spectrally accurate.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::expr::{self, Vars};
use crate::geometry::{
    ball_volume, fs_distance, ray_rule, FsBall, QuadratureRule, SpherePoint, Unitary,
};
use crate::numeric::{CompensatedSum, SplitMix64};
use crate::sections::scaled_radius;

#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    All,
    Empty,
    Cap(FsBall),
    /// Points whose distance to the chart origin lies strictly between the
    /// two bounds.
    Band {
        colat_min: f64,
        colat_max: f64,
    },
    Union(Vec<Region>),
    Intersection(Vec<Region>),
    Complement(Box<Region>),
    /// Union of `count` balls of equal radius with centers drawn from the
    /// volume measure; `caps` is the eager expansion of the seed.
    RandomCaps {
        seed: u64,
        count: usize,
        radius: f64,
        caps: Vec<FsBall>,
    },
}

impl Region {
    pub fn cap(center: SpherePoint, radius: f64) -> Result<Self> {
        Ok(Region::Cap(FsBall::new(center, radius)?))
    }

    pub fn band(colat_min: f64, colat_max: f64) -> Result<Self> {
        if !(0.0 <= colat_min && colat_min < colat_max && colat_max <= FRAC_PI_2) {
            return Err(Error::Validation {
                path: "$".into(),
                message: format!(
                    "band needs 0 <= colat_min < colat_max <= pi/2, got ({colat_min}, {colat_max})"
                ),
            });
        }
        Ok(Region::Band {
            colat_min,
            colat_max,
        })
    }

    /// Band described by its range of `s = sin²(colatitude)`; the volume of
    /// the band is `π (s_hi - s_lo)`.
    pub fn band_by_volume(s_lo: f64, s_hi: f64) -> Result<Self> {
        Self::band(s_lo.clamp(0.0, 1.0).sqrt().asin(), s_hi.clamp(0.0, 1.0).sqrt().asin())
    }

    /// Band of volume fraction `fraction` centered on the equator `|z| = 1`.
    pub fn equatorial_band(fraction: f64) -> Result<Self> {
        check_fraction(fraction)?;
        Self::band_by_volume(0.5 - 0.5 * fraction, 0.5 + 0.5 * fraction)
    }

    /// `count` equal-volume latitude shells, each carrying a centered band of
    /// volume fraction `fraction`. Every shell has volume `π / count`.
    pub fn stripes(count: usize, fraction: f64) -> Result<Self> {
        if count == 0 {
            return Err(Error::Validation {
                path: "$".into(),
                message: "stripes need a positive count".into(),
            });
        }
        check_fraction(fraction)?;
        let n = count as f64;
        let members = (0..count)
            .map(|m| {
                let mid = (m as f64 + 0.5) / n;
                Self::band_by_volume(mid - 0.5 * fraction / n, mid + 0.5 * fraction / n)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Region::Union(members))
    }

    pub fn random_caps(seed: u64, count: usize, radius: f64) -> Result<Self> {
        let mut rng = SplitMix64::new(seed);
        let caps = (0..count)
            .map(|_| {
                let s = rng.next_f64();
                let theta = 2.0 * PI * rng.next_f64();
                FsBall::new(SpherePoint::from_polar(s, theta), radius)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Region::RandomCaps {
            seed,
            count,
            radius,
            caps,
        })
    }

    pub fn complement(self) -> Self {
        Region::Complement(Box::new(self))
    }

    /// Strict-inequality membership.
    pub fn contains(&self, p: &SpherePoint) -> bool {
        match self {
            Region::All => true,
            Region::Empty => false,
            Region::Cap(b) => b.contains(p),
            Region::Band {
                colat_min,
                colat_max,
            } => {
                let t = p.colatitude();
                *colat_min < t && t < *colat_max
            }
            Region::Union(rs) => rs.iter().any(|r| r.contains(p)),
            Region::Intersection(rs) => rs.iter().all(|r| r.contains(p)),
            Region::Complement(r) => !r.contains(p),
            Region::RandomCaps { caps, .. } => caps.iter().any(|b| b.contains(p)),
        }
    }

    /// The circles `{p : d(p, center) = radius}` that make up the boundary.
    pub fn boundary_circles(&self) -> Vec<(SpherePoint, f64)> {
        let mut out = Vec::new();
        self.collect_circles(&mut out);
        out
    }

    fn collect_circles(&self, out: &mut Vec<(SpherePoint, f64)>) {
        match self {
            Region::All | Region::Empty => {}
            Region::Cap(b) => out.push((b.center, b.radius)),
            Region::Band {
                colat_min,
                colat_max,
            } => {
                if *colat_min > 0.0 {
                    out.push((SpherePoint::origin(), *colat_min));
                }
                if *colat_max < FRAC_PI_2 {
                    out.push((SpherePoint::origin(), *colat_max));
                }
            }
            Region::Union(rs) | Region::Intersection(rs) => {
                rs.iter().for_each(|r| r.collect_circles(out))
            }
            Region::Complement(r) => r.collect_circles(out),
            Region::RandomCaps { caps, .. } => {
                out.extend(caps.iter().map(|b| (b.center, b.radius)))
            }
        }
    }

    /// Canonical JSON description.
    pub fn to_json(&self) -> Value {
        match self {
            Region::All => json!({"type": "all"}),
            Region::Empty => json!({"type": "empty"}),
            Region::Cap(b) => {
                json!({"type": "cap", "center": point_to_json(&b.center), "radius": b.radius})
            }
            Region::Band {
                colat_min,
                colat_max,
            } => json!({"type": "band", "colat_min": colat_min, "colat_max": colat_max}),
            Region::Union(rs) => {
                json!({"type": "union", "members": rs.iter().map(Region::to_json).collect::<Vec<_>>()})
            }
            Region::Intersection(rs) => {
                json!({"type": "intersection", "members": rs.iter().map(Region::to_json).collect::<Vec<_>>()})
            }
            Region::Complement(r) => json!({"type": "complement", "region": r.to_json()}),
            Region::RandomCaps {
                seed,
                count,
                radius,
                ..
            } => json!({"type": "random_caps", "seed": seed, "count": count, "radius": radius}),
        }
    }
}

fn check_fraction(fraction: f64) -> Result<()> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Validation {
            path: "$".into(),
            message: format!("volume fraction must lie in (0, 1], got {fraction}"),
        });
    }
    Ok(())
}

/// `s`-values in `(s_lo, s_hi)` where the ray `θ ↦ frame · (√(1-s), √s e^{iθ})`
/// meets the circle of radius `r` around `c`.
struct RayCircle {
    q: f64,
    w: Complex64,
    target: f64,
}

impl RayCircle {
    fn new(frame_inv: &Unitary, center: &SpherePoint, r: f64) -> Self {
        let c = frame_inv.apply(center);
        let (a, b) = (c.z0(), c.z1());
        // |<ray(t), c>|² = 1/2 + q cos 2t + Re(w e^{-iθ}) sin 2t
        Self {
            q: 0.5 * (a.norm_sqr() - b.norm_sqr()),
            w: a.conj() * b,
            target: 0.5 * (2.0 * r).cos(),
        }
    }

    /// The circle as the plane section `X · C = h` of the Bloch sphere, with
    /// the ray at `θ` running along the meridian of longitude `θ`.
    fn plane(&self) -> ([f64; 3], f64) {
        ([2.0 * self.w.re, 2.0 * self.w.im, 2.0 * self.q], 2.0 * self.target)
    }

    /// Azimuths where the number of crossings can change.
    fn tangent_azimuths(&self, out: &mut Vec<f64>) {
        let wn = self.w.norm();
        let d = self.target * self.target - self.q * self.q;
        if wn < 1e-14 || d < 0.0 {
            return;
        }
        let v = d.sqrt() / wn;
        if v > 1.0 {
            return;
        }
        let psi = self.w.arg();
        for a in [v.acos(), (-v).acos()] {
            out.push(psi + a);
            out.push(psi - a);
        }
    }

    fn crossings(&self, theta: f64, s_lo: f64, s_hi: f64, out: &mut Vec<f64>) {
        let p = (self.w * Complex64::from_polar(1.0, -theta)).re;
        let rho = self.q.hypot(p);
        if rho < 1e-300 {
            return;
        }
        let c = self.target / rho;
        if c.abs() >= 1.0 {
            return;
        }
        let phi = p.atan2(self.q);
        let alpha = c.acos();
        for x in [phi + alpha, phi - alpha] {
            let x = x.rem_euclid(2.0 * PI);
            if x > 0.0 && x < PI {
                let s = 0.5 * (1.0 - x.cos());
                if s > s_lo && s < s_hi {
                    out.push(s);
                }
            }
        }
    }
}

/// Longitudes of the points where two circles meet.
fn intersection_azimuths(a: &RayCircle, b: &RayCircle, out: &mut Vec<f64>) {
    let (c1, h1) = a.plane();
    let (c2, h2) = b.plane();
    let g = c1[0] * c2[0] + c1[1] * c2[1] + c1[2] * c2[2];
    let det = 1.0 - g * g;
    if det < 1e-14 {
        return;
    }
    let al = (h1 - h2 * g) / det;
    let be = (h2 - h1 * g) / det;
    let gamma_sq = (1.0 - (al * al + be * be + 2.0 * al * be * g)) / det;
    if gamma_sq < 0.0 {
        return;
    }
    let n = [
        c1[1] * c2[2] - c1[2] * c2[1],
        c1[2] * c2[0] - c1[0] * c2[2],
        c1[0] * c2[1] - c1[1] * c2[0],
    ];
    let gamma = gamma_sq.sqrt();
    for sg in [gamma, -gamma] {
        let x = al * c1[0] + be * c2[0] + sg * n[0];
        let y = al * c1[1] + be * c2[1] + sg * n[1];
        if x.hypot(y) > 1e-12 {
            out.push(y.atan2(x));
        }
    }
}

/// Product rule on `g ∩ B(center, radius)` in the frame centered at
/// `center`, split at the region's boundary crossings. `radius = π/2`
/// covers the whole manifold.
pub fn adapted_rule(
    g: &Region,
    center: &SpherePoint,
    radius: f64,
    radial: usize,
    azimuthal: usize,
) -> Result<QuadratureRule> {
    if radial == 0 || azimuthal == 0 {
        return Err(Error::Config(format!(
            "quadrature orders must be positive, got {radial}x{azimuthal}"
        )));
    }
    let radius = crate::geometry::check_radius("ball radius", radius)?;
    let frame = Unitary::moving_origin_to(center);
    let frame_inv = frame.inverse();
    let s_max = if radius >= FRAC_PI_2 {
        1.0
    } else {
        radius.sin().powi(2)
    };
    if s_max <= 0.0 || matches!(g, Region::Empty) {
        return Ok(QuadratureRule {
            nodes: vec![],
            weights: vec![],
            radial_order: radial,
            azimuthal_order: azimuthal,
        });
    }
    let circles: Vec<RayCircle> = g
        .boundary_circles()
        .iter()
        .map(|(c, r)| RayCircle::new(&frame_inv, c, *r))
        .collect();
    let mut events = Vec::new();
    let rim = (s_max < 1.0).then(|| RayCircle::new(&frame_inv, center, radius));
    for (i, c) in circles.iter().enumerate() {
        c.tangent_azimuths(&mut events);
        for d in circles[i + 1..].iter().chain(rim.iter()) {
            intersection_azimuths(c, d, &mut events);
        }
    }
    let mut cuts = Vec::new();
    Ok(ray_rule(&frame, radial, azimuthal, s_max, events, |theta| {
        cuts.clear();
        cuts.push(0.0);
        for c in &circles {
            c.crossings(theta, 0.0, s_max, &mut cuts);
        }
        cuts.push(s_max);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts.windows(2)
            .filter(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                g.contains(&frame.apply(&SpherePoint::from_polar(mid, theta)))
            })
            .map(|w| (w[0], w[1]))
            .collect()
    }))
}

/// Volume of `g`, integrated with the boundary-adapted version of `rule`.
pub fn region_volume(g: &Region, rule: &QuadratureRule) -> Result<f64> {
    let r = adapted_rule(
        g,
        &SpherePoint::origin(),
        FRAC_PI_2,
        rule.radial_order,
        rule.azimuthal_order,
    )?;
    Ok(r.total_weight())
}

/// Volume of `g ∩ B(center, radius)`.
pub fn region_volume_in_ball(
    g: &Region,
    center: &SpherePoint,
    radius: f64,
    rule: &QuadratureRule,
) -> Result<f64> {
    Ok(adapted_rule(g, center, radius, rule.radial_order, rule.azimuthal_order)?.total_weight())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityReport {
    pub inf_ratio: f64,
    pub argmin_probe: SpherePoint,
    pub radius_factor: f64,
    pub k: usize,
    pub probe_count: usize,
}

/// `min_a V(g ∩ B(a, R/√k)) / V(B(a, R/√k))` over the probe set.
pub fn relative_density(
    g: &Region,
    k: usize,
    radius_factor: f64,
    probes: &[SpherePoint],
    rule: &QuadratureRule,
) -> Result<DensityReport> {
    if probes.is_empty() {
        return Err(Error::Config("relative density needs at least one probe".into()));
    }
    let r = scaled_radius(k, radius_factor)?;
    let vol = ball_volume(r)?;
    if vol <= 0.0 {
        return Err(Error::domain("R/sqrt(k)", r, "(0, pi/2]"));
    }
    let mut best: Option<(f64, SpherePoint)> = None;
    for a in probes {
        let ratio = region_volume_in_ball(g, a, r, rule)? / vol;
        if best.is_none_or(|(b, _)| ratio < b) {
            best = Some((ratio, *a));
        }
    }
    let (inf_ratio, argmin_probe) = best.expect("probes are nonempty");
    Ok(DensityReport {
        inf_ratio,
        argmin_probe,
        radius_factor,
        k,
        probe_count: probes.len(),
    })
}

/// Fibonacci spiral, uniform in `s` and stepping the azimuth by the golden
/// angle. Nearly uniform for the volume measure.
pub fn probe_grid(count: usize) -> Vec<SpherePoint> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let s = (i as f64 + 0.5) / count as f64;
            SpherePoint::from_polar(s, (golden * i as f64).rem_euclid(2.0 * PI))
        })
        .collect()
}

/// Probe count giving at least eight probes per ball of radius `R/√k`.
pub fn probe_count_for_scale(k: usize, radius_factor: f64, minimum: usize) -> Result<usize> {
    let vol = ball_volume(scaled_radius(k, radius_factor)?)?;
    let needed = if vol > 0.0 {
        (8.0 * PI / vol).ceil() as usize
    } else {
        1
    };
    Ok(needed.max(minimum).max(1))
}

/// Measure on CP¹: a scaled volume restricted to a region, or atoms.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasureSpec {
    VolumeOn { region: Region, scale: f64 },
    Atoms(Vec<(SpherePoint, f64)>),
}

impl MeasureSpec {
    pub fn volume_on(region: Region, scale: f64) -> Result<Self> {
        if !(scale >= 0.0 && scale.is_finite()) {
            return Err(Error::Validation {
                path: "$.scale".into(),
                message: format!("scale must be finite and nonnegative, got {scale}"),
            });
        }
        Ok(MeasureSpec::VolumeOn { region, scale })
    }

    pub fn atoms(atoms: Vec<(SpherePoint, f64)>) -> Result<Self> {
        for (i, (_, m)) in atoms.iter().enumerate() {
            if !(*m >= 0.0 && m.is_finite()) {
                return Err(Error::Validation {
                    path: format!("$.atoms[{i}].mass"),
                    message: format!("mass must be finite and nonnegative, got {m}"),
                });
            }
        }
        Ok(MeasureSpec::Atoms(atoms))
    }

    /// `count` atoms of equal mass at seeded volume-uniform positions.
    pub fn random_atoms(seed: u64, count: usize, mass: f64) -> Result<Self> {
        let mut rng = SplitMix64::new(seed);
        Self::atoms(
            (0..count)
                .map(|_| {
                    let s = rng.next_f64();
                    let theta = 2.0 * PI * rng.next_f64();
                    (SpherePoint::from_polar(s, theta), mass)
                })
                .collect(),
        )
    }

    pub fn total_mass(&self, rule: &QuadratureRule) -> Result<f64> {
        match self {
            MeasureSpec::VolumeOn { region, scale } => Ok(scale * region_volume(region, rule)?),
            MeasureSpec::Atoms(a) => {
                let mut acc = CompensatedSum::new();
                for (_, m) in a {
                    acc.add(*m);
                }
                Ok(acc.value())
            }
        }
    }

    /// `μ(B(center, radius))`.
    pub fn ball_mass(&self, center: &SpherePoint, radius: f64, rule: &QuadratureRule) -> Result<f64> {
        match self {
            MeasureSpec::VolumeOn { region, scale } => {
                Ok(scale * region_volume_in_ball(region, center, radius, rule)?)
            }
            MeasureSpec::Atoms(a) => {
                let mut acc = CompensatedSum::new();
                for (p, m) in a {
                    if fs_distance(p, center) < radius {
                        acc.add(*m);
                    }
                }
                Ok(acc.value())
            }
        }
    }

    /// Points worth adding to a probe set: atom locations and cap centers.
    pub fn landmarks(&self) -> Vec<SpherePoint> {
        match self {
            MeasureSpec::Atoms(a) => a.iter().map(|(p, _)| *p).collect(),
            MeasureSpec::VolumeOn { region, .. } => {
                region.boundary_circles().into_iter().map(|(c, _)| c).collect()
            }
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            MeasureSpec::VolumeOn { region, scale } => {
                json!({"type": "volume", "region": region.to_json(), "scale": scale})
            }
            MeasureSpec::Atoms(a) => json!({
                "type": "atoms",
                "atoms": a.iter().map(|(p, m)| json!({"point": point_to_json(p), "mass": m})).collect::<Vec<_>>()
            }),
        }
    }

    /// Short content hash of the canonical JSON form.
    pub fn digest(&self) -> String {
        digest_json(&self.to_json())
    }
}

/// First 16 hex digits of the SHA-256 of a JSON value's compact encoding.
pub fn digest_json(v: &Value) -> String {
    let text = serde_json::to_string(v).expect("JSON values always serialize");
    let hash = Sha256::digest(text.as_bytes());
    hex::encode(&hash[..8])
}

/// Chart coordinate `[re, im]`, or `"inf"` at infinity.
pub fn point_to_json(p: &SpherePoint) -> Value {
    match p.chart() {
        Some(z) => json!([z.re, z.im]),
        None => json!("inf"),
    }
}

/// Region from its JSON description (no template variables bound).
pub fn build_region(spec: &Value) -> Result<Region> {
    build_region_with(spec, &Vars::default())
}

/// Region from a JSON template; string-valued numeric fields are evaluated
/// as expressions over `vars`.
pub fn build_region_with(spec: &Value, vars: &Vars) -> Result<Region> {
    region_at(spec, vars, "$")
}

fn region_at(spec: &Value, vars: &Vars, path: &str) -> Result<Region> {
    let obj = as_object(spec, path)?;
    let kind = type_tag(obj, path)?;
    let invalid = |message: String| Error::Validation {
        path: path.to_string(),
        message,
    };
    match kind {
        "all" => Ok(Region::All),
        "empty" => Ok(Region::Empty),
        "cap" => {
            let center = point_at(field(obj, "center", path)?, &format!("{path}.center"))?;
            let radius = number_at(obj, "radius", vars, path)?;
            Region::cap(center, radius).map_err(|e| invalid(e.to_string()))
        }
        "band" => {
            let lo = number_at(obj, "colat_min", vars, path)?;
            let hi = number_at(obj, "colat_max", vars, path)?;
            Region::band(lo, hi).map_err(|_| {
                invalid(format!("band needs 0 <= colat_min < colat_max <= pi/2, got ({lo}, {hi})"))
            })
        }
        "union" | "intersection" => {
            let members = obj
                .get("members")
                .or_else(|| obj.get("regions"))
                .ok_or_else(|| parse_err(path, "missing field `members`"))?
                .as_array()
                .ok_or_else(|| parse_err(&format!("{path}.members"), "expected an array"))?;
            let rs = members
                .iter()
                .enumerate()
                .map(|(i, m)| region_at(m, vars, &format!("{path}.members[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            Ok(if kind == "union" {
                Region::Union(rs)
            } else {
                Region::Intersection(rs)
            })
        }
        "complement" => {
            let inner = region_at(field(obj, "region", path)?, vars, &format!("{path}.region"))?;
            Ok(inner.complement())
        }
        "random_caps" => {
            let seed = u64_at(obj, "seed", path)?;
            let count = count_at(obj, "count", vars, path)?;
            let radius = number_at(obj, "radius", vars, path)?;
            Region::random_caps(seed, count, radius).map_err(|e| invalid(e.to_string()))
        }
        "stripes" => {
            let count = count_at(obj, "count", vars, path)?;
            let fraction = number_at(obj, "fraction", vars, path)?;
            Region::stripes(count, fraction).map_err(|e| invalid(e.to_string()))
        }
        "equatorial_band" => {
            let fraction = number_at(obj, "fraction", vars, path)?;
            Region::equatorial_band(fraction).map_err(|e| invalid(e.to_string()))
        }
        other => Err(parse_err(&format!("{path}.type"), &format!("unknown region type `{other}`"))),
    }
}

/// Measure from its JSON description.
pub fn build_measure_with(spec: &Value, vars: &Vars) -> Result<MeasureSpec> {
    let path = "$";
    let obj = as_object(spec, path)?;
    match type_tag(obj, path)? {
        "volume" => {
            let region = region_at(field(obj, "region", path)?, vars, "$.region")?;
            let scale = match obj.get("scale") {
                None => 1.0,
                Some(_) => number_at(obj, "scale", vars, path)?,
            };
            MeasureSpec::volume_on(region, scale)
        }
        "atoms" => {
            let list = field(obj, "atoms", path)?
                .as_array()
                .ok_or_else(|| parse_err("$.atoms", "expected an array"))?;
            let atoms = list
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let p = format!("$.atoms[{i}]");
                    let o = as_object(a, &p)?;
                    let point = point_at(field(o, "point", &p)?, &format!("{p}.point"))?;
                    let mass = number_at(o, "mass", vars, &p)?;
                    Ok((point, mass))
                })
                .collect::<Result<Vec<_>>>()?;
            MeasureSpec::atoms(atoms)
        }
        "random_atoms" => {
            let seed = u64_at(obj, "seed", path)?;
            let count = count_at(obj, "count", vars, path)?;
            let mass = number_at(obj, "mass", vars, path)?;
            MeasureSpec::random_atoms(seed, count, mass)
        }
        other => Err(parse_err("$.type", &format!("unknown measure type `{other}`"))),
    }
}

pub(crate) fn parse_err(path: &str, message: &str) -> Error {
    Error::Parse {
        path: path.to_string(),
        message: message.to_string(),
    }
}

pub(crate) fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| parse_err(path, "expected an object"))
}

pub(crate) fn type_tag<'a>(obj: &'a Map<String, Value>, path: &str) -> Result<&'a str> {
    obj.get("type")
        .ok_or_else(|| parse_err(path, "missing field `type`"))?
        .as_str()
        .ok_or_else(|| parse_err(&format!("{path}.type"), "expected a string"))
}

pub(crate) fn field<'a>(obj: &'a Map<String, Value>, name: &str, path: &str) -> Result<&'a Value> {
    obj.get(name)
        .ok_or_else(|| parse_err(path, &format!("missing field `{name}`")))
}

pub(crate) fn number_at(obj: &Map<String, Value>, name: &str, vars: &Vars, path: &str) -> Result<f64> {
    let p = format!("{path}.{name}");
    match field(obj, name, path)? {
        Value::Number(n) => n.as_f64().ok_or_else(|| parse_err(&p, "not representable as f64")),
        Value::String(s) => expr::eval(s, vars, &p),
        _ => Err(parse_err(&p, "expected a number or an expression string")),
    }
}

pub(crate) fn count_at(obj: &Map<String, Value>, name: &str, vars: &Vars, path: &str) -> Result<usize> {
    let v = number_at(obj, name, vars, path)?;
    if v < 0.0 || v.fract() != 0.0 || v > 1e7 {
        return Err(Error::Validation {
            path: format!("{path}.{name}"),
            message: format!("expected a nonnegative integer, got {v}"),
        });
    }
    Ok(v as usize)
}

pub(crate) fn u64_at(obj: &Map<String, Value>, name: &str, path: &str) -> Result<u64> {
    field(obj, name, path)?
        .as_u64()
        .ok_or_else(|| parse_err(&format!("{path}.{name}"), "expected an unsigned integer"))
}

/// Parses `[re, im]` or `"inf"`.
pub fn point_at(v: &Value, path: &str) -> Result<SpherePoint> {
    match v {
        Value::String(s) if s == "inf" => Ok(SpherePoint::infinity()),
        Value::Array(a) if a.len() == 2 => {
            let re = a[0].as_f64().ok_or_else(|| parse_err(&format!("{path}[0]"), "expected a number"))?;
            let im = a[1].as_f64().ok_or_else(|| parse_err(&format!("{path}[1]"), "expected a number"))?;
            if !(re.is_finite() && im.is_finite()) {
                return Err(Error::Validation {
                    path: path.to_string(),
                    message: "chart coordinates must be finite".into(),
                });
            }
            Ok(SpherePoint::from_chart(Complex64::new(re, im)))
        }
        _ => Err(parse_err(path, "expected [re, im] or \"inf\"")),
    }
}
