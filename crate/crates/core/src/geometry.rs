//! Fubini–Study geometry of the projective line.
//!
//! Points are stored as unit vectors in C², the metric is normalized so the
//! diameter is π/2 and the total volume is π. In these units a ball of radius
//! `r` has volume `π sin² r`, and the quantity `s = sin² t`, with `t` the
//! distance to a fixed center, is uniformly distributed for the volume
//! measure. All quadrature rules here are product rules in `(s, azimuth)`.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{azimuth_nodes, gauss_legendre_unit, CompensatedSum};

/// Point of CP¹ as a normalized homogeneous pair `(z0, z1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpherePoint {
    z0: Complex64,
    z1: Complex64,
}

impl SpherePoint {
    pub fn new(z0: Complex64, z1: Complex64) -> Result<Self> {
        normalize_point(z0, z1)
    }

    /// The chart origin `z = 0`.
    pub fn origin() -> Self {
        Self {
            z0: Complex64::new(1.0, 0.0),
            z1: Complex64::new(0.0, 0.0),
        }
    }

    /// The point at infinity of the affine chart.
    pub fn infinity() -> Self {
        Self {
            z0: Complex64::new(0.0, 0.0),
            z1: Complex64::new(1.0, 0.0),
        }
    }

    /// Point with affine chart coordinate `z = z1 / z0`.
    pub fn from_chart(z: Complex64) -> Self {
        // (1, z) / sqrt(1 + |z|^2), scaled to avoid overflow for huge |z|.
        let r = z.norm();
        if r <= 1.0 {
            let n = (1.0 + r * r).sqrt();
            Self {
                z0: Complex64::new(1.0 / n, 0.0),
                z1: z / n,
            }
        } else {
            let inv = 1.0 / r;
            let n = (1.0 + inv * inv).sqrt();
            Self {
                z0: Complex64::new(inv / n, 0.0),
                z1: (z / r) / n,
            }
        }
    }

    /// Point at squared-sine colatitude `s` (distance `asin √s` from the
    /// chart origin) and azimuth `theta`.
    pub fn from_polar(s: f64, theta: f64) -> Self {
        let s = s.clamp(0.0, 1.0);
        Self {
            z0: Complex64::new((1.0 - s).sqrt(), 0.0),
            z1: Complex64::from_polar(s.sqrt(), theta),
        }
    }

    pub fn z0(&self) -> Complex64 {
        self.z0
    }

    pub fn z1(&self) -> Complex64 {
        self.z1
    }

    /// Affine chart coordinate, `None` at infinity.
    pub fn chart(&self) -> Option<Complex64> {
        if self.z0.norm() == 0.0 {
            None
        } else {
            Some(self.z1 / self.z0)
        }
    }

    /// Distance to the chart origin.
    pub fn colatitude(&self) -> f64 {
        self.z1.norm().atan2(self.z0.norm())
    }

    /// Hermitian inner product of the homogeneous representatives.
    pub fn inner(&self, other: &SpherePoint) -> Complex64 {
        self.z0 * other.z0.conj() + self.z1 * other.z1.conj()
    }
}

/// Scales `(z0, z1)` to a unit vector.
pub fn normalize_point(z0: Complex64, z1: Complex64) -> Result<SpherePoint> {
    if !(z0.re.is_finite() && z0.im.is_finite() && z1.re.is_finite() && z1.im.is_finite()) {
        return Err(Error::InvalidPoint(format!("non-finite coordinates ({z0}, {z1})")));
    }
    let scale = z0.norm().max(z1.norm());
    if scale == 0.0 {
        return Err(Error::InvalidPoint("homogeneous coordinates are both zero".into()));
    }
    let (a, b) = (z0 / scale, z1 / scale);
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    Ok(SpherePoint { z0: a / n, z1: b / n })
}

/// Fubini–Study distance in `[0, π/2]`.
///
/// Equal to `arccos |⟨p, q⟩|`; evaluated as `atan2(|p ∧ q|, |⟨p, q⟩|)`, which
/// keeps full relative accuracy for nearby points.
pub fn fs_distance(p: &SpherePoint, q: &SpherePoint) -> f64 {
    let inner = p.inner(q).norm();
    let cross = (p.z0 * q.z1 - p.z1 * q.z0).norm();
    cross.atan2(inner)
}

/// Volume of a ball of radius `r`: `π sin² r`.
pub fn ball_volume(r: f64) -> Result<f64> {
    let r = check_radius("ball radius", r)?;
    let s = r.sin();
    Ok(PI * s * s)
}

pub(crate) fn check_radius(what: &'static str, r: f64) -> Result<f64> {
    if !(0.0..=FRAC_PI_2 + 1e-12).contains(&r) {
        return Err(Error::domain(what, r, "[0, pi/2]"));
    }
    Ok(r.min(FRAC_PI_2))
}

/// Ball membership written in affine chart coordinates:
/// `|z - w| < tan(r) |1 + z w̄|`.
pub fn in_ball_tan(z: Complex64, w: Complex64, r: f64) -> bool {
    (z - w).norm() < r.tan() * (Complex64::new(1.0, 0.0) + z * w.conj()).norm()
}

/// Open Fubini–Study ball.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FsBall {
    pub center: SpherePoint,
    pub radius: f64,
}

impl FsBall {
    pub fn new(center: SpherePoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius <= FRAC_PI_2) {
            return Err(Error::domain("ball radius", radius, "(0, pi/2]"));
        }
        Ok(Self { center, radius })
    }

    pub fn contains(&self, p: &SpherePoint) -> bool {
        fs_distance(&self.center, p) < self.radius
    }

    pub fn volume(&self) -> f64 {
        let s = self.radius.sin();
        PI * s * s
    }
}

/// Element of SU(2), `[[a, -b̄], [b, ā]]`, acting on homogeneous coordinates.
/// These are exactly the Fubini–Study isometries up to a phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary {
    a: Complex64,
    b: Complex64,
}

impl Unitary {
    pub fn identity() -> Self {
        Self {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    /// Rotation taking the chart origin to `p`.
    pub fn moving_origin_to(p: &SpherePoint) -> Self {
        Self { a: p.z0, b: p.z1 }
    }

    /// Builds `[[a, -b̄], [b, ā]]` after normalizing `(a, b)`.
    pub fn from_pair(a: Complex64, b: Complex64) -> Result<Self> {
        let p = normalize_point(a, b)?;
        Ok(Self { a: p.z0, b: p.z1 })
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.a.conj(),
            b: -self.b,
        }
    }

    pub fn apply(&self, p: &SpherePoint) -> SpherePoint {
        SpherePoint {
            z0: self.a * p.z0 - self.b.conj() * p.z1,
            z1: self.b * p.z0 + self.a.conj() * p.z1,
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Unitary) -> Self {
        Self {
            a: self.a * other.a - self.b.conj() * other.b,
            b: self.b * other.a + self.a.conj() * other.b,
        }
    }
}

/// Nodes and positive weights on CP¹ (weights in volume units).
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<SpherePoint>,
    pub weights: Vec<f64>,
    pub radial_order: usize,
    pub azimuthal_order: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        let mut acc = CompensatedSum::new();
        for w in &self.weights {
            acc.add(*w);
        }
        acc.value()
    }

    /// The same rule moved by an isometry.
    pub fn rotated(&self, u: &Unitary) -> QuadratureRule {
        QuadratureRule {
            nodes: self.nodes.iter().map(|p| u.apply(p)).collect(),
            weights: self.weights.clone(),
            radial_order: self.radial_order,
            azimuthal_order: self.azimuthal_order,
        }
    }

    /// True when the rule integrates every pairing `e_i ē_j` of degree `k`
    /// sections exactly.
    pub fn exact_for_degree(&self, k: usize) -> bool {
        k + 2 < 2 * self.radial_order && k < self.azimuthal_order
    }
}

/// Product rule: Gauss–Legendre in `s = sin²(colatitude)` on `[0, 1]`, uniform
/// azimuth. Exact for `e_i(z) ē_j(z) (1+|z|²)^{-k}` whenever
/// `k + 2 <= 2 radial - 1` and `|i - j| <= azimuthal - 1`.
pub fn make_quadrature(radial_nodes: usize, azimuthal_nodes: usize) -> Result<QuadratureRule> {
    if radial_nodes == 0 || azimuthal_nodes == 0 {
        return Err(Error::Config(format!(
            "quadrature orders must be positive, got {radial_nodes}x{azimuthal_nodes}"
        )));
    }
    Ok(ray_rule(
        &Unitary::identity(),
        radial_nodes,
        azimuthal_nodes,
        1.0,
        Vec::new(),
        |_| vec![(0.0, 1.0)],
    ))
}

/// Product rule on the shell `s_lo <= sin²(d(center, ·)) <= s_hi` around
/// `center`, with the radial nodes placed on that interval only.
pub fn shell_rule(
    center: &SpherePoint,
    s_lo: f64,
    s_hi: f64,
    radial_nodes: usize,
    azimuthal_nodes: usize,
) -> Result<QuadratureRule> {
    if radial_nodes == 0 || azimuthal_nodes == 0 {
        return Err(Error::Config(format!(
            "quadrature orders must be positive, got {radial_nodes}x{azimuthal_nodes}"
        )));
    }
    if !(0.0 <= s_lo && s_lo <= s_hi && s_hi <= 1.0) {
        return Err(Error::Config(format!("invalid shell [{s_lo}, {s_hi}]")));
    }
    let frame = Unitary::moving_origin_to(center);
    let span = s_hi - s_lo;
    let intervals = if span > 0.0 { vec![(s_lo, s_hi)] } else { vec![] };
    Ok(ray_rule(&frame, radial_nodes, azimuthal_nodes, span.max(f64::MIN_POSITIVE), Vec::new(), |_| {
        intervals.clone()
    }))
}

/// Generic product rule in a rotated frame. For azimuth `theta`,
/// `intervals(theta)` lists the `s`-intervals to integrate over; each gets a
/// Gauss–Legendre rule with a node count proportional to its share of `span`
/// (never fewer than a quarter of `radial`). Azimuths come from
/// [`azimuth_nodes`] with the given event angles.
pub(crate) fn ray_rule<F>(
    frame: &Unitary,
    radial: usize,
    azimuthal: usize,
    span: f64,
    mut events: Vec<f64>,
    mut intervals: F,
) -> QuadratureRule
where
    F: FnMut(f64) -> Vec<(f64, f64)>,
{
    let mut cache: HashMap<usize, (Vec<f64>, Vec<f64>)> = HashMap::new();
    let min_nodes = radial.div_ceil(4).max(4).min(radial);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for (theta, dtheta) in azimuth_nodes(azimuthal, &mut events) {
        for (lo, hi) in intervals(theta) {
            let len = hi - lo;
            if len <= 0.0 {
                continue;
            }
            let n = ((radial as f64 * len / span).ceil() as usize).clamp(min_nodes, radial);
            let (x, w) = cache.entry(n).or_insert_with(|| gauss_legendre_unit(n));
            for (xi, wi) in x.iter().zip(w.iter()) {
                let s = lo + len * xi;
                nodes.push(frame.apply(&SpherePoint::from_polar(s, theta)));
                // dV = (1/2) ds dtheta
                weights.push(0.5 * dtheta * len * wi);
            }
        }
    }
    QuadratureRule {
        nodes,
        weights,
        radial_order: radial,
        azimuthal_order: azimuthal,
    }
}

/// `Σ w_i f(node_i)` in node order with compensated summation.
pub fn integrate<F>(f: F, rule: &QuadratureRule) -> Result<f64>
where
    F: Fn(&SpherePoint) -> f64,
{
    let mut acc = CompensatedSum::new();
    for (i, (p, w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
        let v = f(p);
        if !v.is_finite() {
            return Err(Error::NonFinite { node: i, value: v });
        }
        acc.add(w * v);
    }
    Ok(acc.value())
}
