//! Concentration operators and the constants built from them.
//!
//! For a measure `μ` the Gram matrix `M_ij = ∫ e_i ē_j dμ` in the
//! orthonormal basis represents the quadratic form `s ↦ ∫ |s|² dμ`. Its
//! smallest eigenvalue is the reciprocal of the norming constant of `μ`
//! (when `μ = χ_G V`) and its largest is the Carleson constant.

mod eigen;

pub use eigen::{eigh, EigenResult, HermitianMatrix, MAX_DIM};

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::{check_radius, shell_rule, QuadratureRule, SpherePoint, Unitary};
use crate::numeric::{CompensatedComplex, CompensatedSum};
use crate::regions::{adapted_rule, MeasureSpec, Region};
use crate::sections::{kernel_pointnorm, make_space, scaled_radius, Section, SectionSpace};

/// Eigenvalues at or below this are treated as zero: the set is reported as
/// not norming.
pub const LAMBDA_FLOOR: f64 = 1e-12;

/// Inner rule used for ball averages in [`exceptional_mass_ratio`].
pub const INNER_RADIAL: usize = 32;
pub const INNER_AZIMUTHAL: usize = 64;

/// Upper limit on `outer nodes × inner nodes × dim` for nested integration.
pub const NESTED_BUDGET: f64 = 2e9;

/// `M_ij = ∫ e_i ē_j dμ`.
///
/// Volume measures are integrated with `rule` itself when the region is the
/// whole manifold, and with the boundary-adapted rule of the same orders
/// otherwise.
pub fn gram_matrix(k: usize, mu: &MeasureSpec, rule: &QuadratureRule) -> Result<HermitianMatrix> {
    let space = make_space(k)?;
    match mu {
        MeasureSpec::VolumeOn { region, scale } => {
            if matches!(region, Region::All) {
                if !rule.exact_for_degree(k) {
                    return Err(Error::Config(format!(
                        "a {}x{} rule is not exact at degree {k}; need radial >= {} and azimuthal >= {}",
                        rule.radial_order,
                        rule.azimuthal_order,
                        k / 2 + 2,
                        k + 1
                    )));
                }
                Ok(assemble(&space, rule.nodes.iter().zip(rule.weights.iter().map(|w| w * scale))))
            } else {
                let adapted = adapted_rule(
                    region,
                    &SpherePoint::origin(),
                    FRAC_PI_2,
                    rule.radial_order,
                    rule.azimuthal_order,
                )?;
                Ok(assemble(
                    &space,
                    adapted.nodes.iter().zip(adapted.weights.iter().map(|w| w * scale)),
                ))
            }
        }
        MeasureSpec::Atoms(atoms) => Ok(assemble(&space, atoms.iter().map(|(p, m)| (p, *m)))),
    }
}

fn assemble<'a, I>(space: &SectionSpace, weighted: I) -> HermitianMatrix
where
    I: Iterator<Item = (&'a SpherePoint, f64)>,
{
    let n = space.dimension();
    let mut acc = vec![CompensatedComplex::default(); n * n];
    let mut e = vec![Complex64::new(0.0, 0.0); n];
    for (p, w) in weighted {
        if w == 0.0 {
            continue;
        }
        space.basis_values(p, &mut e);
        for i in 0..n {
            let ei = e[i] * w;
            for j in i..n {
                acc[i * n + j].add(ei * e[j].conj());
            }
        }
    }
    HermitianMatrix::from_upper(n, acc.iter().map(CompensatedComplex::value).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConcentrationResult {
    pub k: usize,
    pub measure: MeasureSpec,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `1 / lambda_min`, or `+inf` when `lambda_min <= LAMBDA_FLOOR`.
    pub norming_constant: f64,
    /// `lambda_max`.
    pub carleson_constant: f64,
    /// Unit section attaining `lambda_min`.
    pub extremal_section: Section,
    /// Unit section attaining `lambda_max`.
    pub peak_section: Section,
}

impl ConcentrationResult {
    fn from_gram(k: usize, measure: &MeasureSpec, gram: &HermitianMatrix) -> Result<Self> {
        let eig = eigh(gram)?;
        let lambda_min = eig.eigenvalues[0];
        let lambda_max = *eig.eigenvalues.last().expect("dimension is at least one");
        Ok(Self {
            k,
            measure: measure.clone(),
            lambda_min,
            lambda_max,
            norming_constant: norming_from_lambda(lambda_min),
            carleson_constant: lambda_max,
            extremal_section: coefficient_section(&eig.eigenvectors[0]),
            peak_section: coefficient_section(eig.eigenvectors.last().expect("dimension is at least one")),
        })
    }

    /// Flat record for serialization.
    pub fn record(&self) -> ConcentrationRecord {
        ConcentrationRecord {
            k: self.k,
            measure_digest: self.measure.digest(),
            lambda_min: self.lambda_min,
            lambda_max: self.lambda_max,
            norming_constant: self.norming_constant,
            carleson_constant: self.carleson_constant,
            berezin_sup: None,
            ball_mass_sup: None,
            quad_radial: None,
            quad_azimuthal: None,
            seed: None,
        }
    }
}

/// With `M_ij = ∫ e_i ē_j dμ`, the section `Σ c_j e_j` has
/// `∫ |s|² dμ = v* M v` for `v = c̄`, so eigenvectors are conjugated.
fn coefficient_section(v: &[Complex64]) -> Section {
    Section::new(v.iter().map(|z| z.conj()).collect())
}

pub(crate) fn norming_from_lambda(lambda_min: f64) -> f64 {
    if lambda_min <= LAMBDA_FLOOR {
        f64::INFINITY
    } else {
        1.0 / lambda_min
    }
}

/// Flat summary of a concentration experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcentrationRecord {
    pub k: usize,
    pub measure_digest: String,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub norming_constant: f64,
    pub carleson_constant: f64,
    pub berezin_sup: Option<f64>,
    pub ball_mass_sup: Option<f64>,
    pub quad_radial: Option<usize>,
    pub quad_azimuthal: Option<usize>,
    pub seed: Option<u64>,
}

/// Finite numbers as JSON numbers, infinities as the string `"inf"`.
pub fn json_number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x == f64::INFINITY {
        json!("inf")
    } else if x == f64::NEG_INFINITY {
        json!("-inf")
    } else {
        json!("nan")
    }
}

impl ConcentrationRecord {
    pub fn to_json(&self) -> Value {
        let opt = |x: Option<f64>| x.map(json_number).unwrap_or(Value::Null);
        json!({
            "k": self.k,
            "measure_digest": self.measure_digest,
            "lambda_min": json_number(self.lambda_min),
            "lambda_max": json_number(self.lambda_max),
            "norming_constant": json_number(self.norming_constant),
            "carleson_constant": json_number(self.carleson_constant),
            "berezin_sup": opt(self.berezin_sup),
            "ball_mass_sup": opt(self.ball_mass_sup),
            "quad_radial": self.quad_radial,
            "quad_azimuthal": self.quad_azimuthal,
            "seed": self.seed,
        })
    }
}

/// Norming constant of `g`: the smallest `C` with `‖s‖² <= C ∫_g |s|²`.
pub fn norming_constant(k: usize, g: &Region, rule: &QuadratureRule) -> Result<ConcentrationResult> {
    let mu = MeasureSpec::VolumeOn {
        region: g.clone(),
        scale: 1.0,
    };
    let gram = gram_matrix(k, &mu, rule)?;
    ConcentrationResult::from_gram(k, &mu, &gram)
}

/// Carleson constant of `μ`: the smallest `C₁` with `∫ |s|² dμ <= C₁ ‖s‖²`.
pub fn carleson_constant(k: usize, mu: &MeasureSpec, rule: &QuadratureRule) -> Result<ConcentrationResult> {
    let gram = gram_matrix(k, mu, rule)?;
    ConcentrationResult::from_gram(k, mu, &gram)
}

/// Berezin transform `∫ |Π_k(w,z)|² / Π_k(z,z) dμ(w)`.
pub fn berezin_transform(k: usize, mu: &MeasureSpec, z: &SpherePoint, rule: &QuadratureRule) -> Result<f64> {
    let diag = (k as f64 + 1.0) / PI;
    match mu {
        MeasureSpec::VolumeOn { region, scale } => {
            let local = adapted_rule(region, z, FRAC_PI_2, rule.radial_order, rule.azimuthal_order)?;
            let mut acc = CompensatedSum::new();
            for (w, wt) in local.nodes.iter().zip(&local.weights) {
                let kv = kernel_pointnorm(k, w, z);
                acc.add(wt * kv * kv);
            }
            Ok(scale * acc.value() / diag)
        }
        MeasureSpec::Atoms(atoms) => {
            let mut acc = CompensatedSum::new();
            for (w, m) in atoms {
                let kv = kernel_pointnorm(k, w, z);
                acc.add(m * kv * kv);
            }
            Ok(acc.value() / diag)
        }
    }
}

/// Maximum of the Berezin transform over `probes`.
pub fn berezin_sup(k: usize, mu: &MeasureSpec, probes: &[SpherePoint], rule: &QuadratureRule) -> Result<f64> {
    if probes.is_empty() {
        return Err(Error::Config("berezin_sup needs at least one probe".into()));
    }
    let mut best = f64::NEG_INFINITY;
    for z in probes {
        best = best.max(berezin_transform(k, mu, z, rule)?);
    }
    Ok(best)
}

/// `max_z k · μ(B(z, 1/√k))` over `probes`.
pub fn ball_mass_sup(k: usize, mu: &MeasureSpec, probes: &[SpherePoint], rule: &QuadratureRule) -> Result<f64> {
    if probes.is_empty() {
        return Err(Error::Config("ball_mass_sup needs at least one probe".into()));
    }
    if k == 0 {
        return Err(Error::domain("1/sqrt(k)", f64::INFINITY, "[0, pi/2]"));
    }
    let r = scaled_radius(k, 1.0)?;
    let mut best = f64::NEG_INFINITY;
    for z in probes {
        best = best.max(k as f64 * mu.ball_mass(z, r, rule)?);
    }
    Ok(best)
}

/// `M(k, ε) = min_{d <= ε/√k} |Π_k(w,z)|² / (Π_k(z,z) · k)
///          = (k+1)/(πk) · cos^{2k}(ε/√k)`.
pub fn kernel_lower_bound(k: usize, eps: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("k", 0.0, "[1, inf)"));
    }
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::domain("eps", eps, "[0, inf)"));
    }
    let r = check_radius("eps/sqrt(k)", eps / (k as f64).sqrt())?;
    let kf = k as f64;
    Ok((kf + 1.0) / (PI * kf) * r.cos().powi(2 * k as i32))
}

/// Ratio `∫_A |s|² / (ε ‖s‖²)` for the exceptional set
/// `A = {a : |s(a)|² < ε · avg_{B(a, R/√k)} |s|²}`, with `A` decided at the
/// nodes of `rule` and ball averages taken on a rotated inner rule.
pub fn exceptional_mass_ratio(
    k: usize,
    s: &Section,
    radius_factor: f64,
    eps: f64,
    rule: &QuadratureRule,
) -> Result<f64> {
    let space = make_space(k)?;
    if s.degree() != k {
        return Err(Error::Shape {
            expected: k,
            found: s.degree(),
        });
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::domain("eps", eps, "(0, inf)"));
    }
    let norm_sq = s.norm_sq();
    if norm_sq <= 0.0 {
        return Err(Error::Config("exceptional set of the zero section is undefined".into()));
    }
    let r = scaled_radius(k, radius_factor)?;
    if r <= 0.0 {
        return Err(Error::domain("R/sqrt(k)", r, "(0, pi/2]"));
    }
    let inner = shell_rule(&SpherePoint::origin(), 0.0, r.sin().powi(2), INNER_RADIAL, INNER_AZIMUTHAL)?;
    let cost = rule.len() as f64 * inner.len() as f64 * space.dimension() as f64;
    if cost > NESTED_BUDGET {
        return Err(Error::Config(format!(
            "nested integration needs {cost:.3e} evaluations (budget {NESTED_BUDGET:.0e}); use a coarser outer rule"
        )));
    }
    let ball_vol = inner.total_weight();
    let mut e = vec![Complex64::new(0.0, 0.0); space.dimension()];
    let mut value_at = |p: &SpherePoint| -> f64 {
        space.basis_values(p, &mut e);
        s.coeffs.iter().zip(&e).map(|(c, e)| c * e).sum::<Complex64>().norm_sqr()
    };
    let mut exceptional = CompensatedSum::new();
    for (a, wa) in rule.nodes.iter().zip(&rule.weights) {
        let sa = value_at(a);
        let u = Unitary::moving_origin_to(a);
        let mut ball = CompensatedSum::new();
        for (q, wq) in inner.nodes.iter().zip(&inner.weights) {
            ball.add(wq * value_at(&u.apply(q)));
        }
        if sa < eps * ball.value() / ball_vol {
            exceptional.add(wa * sa);
        }
    }
    Ok(exceptional.value() / (eps * norm_sq))
}
