//! Holomorphic sections of O(k) over CP¹, i.e. polynomials of degree at most
//! `k` with the Fubini–Study weight, stored in the orthonormal basis
//!
//! ```text
//! e_j = z^j / ‖z^j‖,   ‖z^j‖² = π j! (k-j)! / (k+1)!
//! ```
//!
//! Pointwise norms are evaluated on normalized homogeneous coordinates,
//! where `|e_j(p)|² = (k+1)/π · C(k,j) |z0|^{2(k-j)} |z1|^{2j}`. The Bergman
//! kernel then has the closed form `|Π_k(p,q)| = (k+1)/π · cos^k d(p,q)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{check_radius, fs_distance, shell_rule, QuadratureRule, SpherePoint};
use crate::numeric::{ln_binomial, ln_gamma, CompensatedComplex, CompensatedSum, SplitMix64};

/// Largest supported degree.
pub const MAX_DEGREE: usize = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct SectionSpace {
    degree: usize,
    ortho_norm_sq: Vec<f64>,
    // sqrt((k+1) C(k,j) / pi), the value of e_j at a unit homogeneous vector
    // per unit monomial.
    eval_scale: Vec<f64>,
}

/// Space of degree-`k` sections.
pub fn make_space(k: usize) -> Result<SectionSpace> {
    if k > MAX_DEGREE {
        return Err(Error::Config(format!("degree {k} exceeds {MAX_DEGREE}")));
    }
    let kf = k as f64;
    let ortho_norm_sq = (0..=k)
        .map(|j| {
            let ln = PI.ln() + ln_gamma(j as f64 + 1.0) + ln_gamma((k - j) as f64 + 1.0)
                - ln_gamma(kf + 2.0);
            ln.exp()
        })
        .collect();
    let eval_scale = (0..=k)
        .map(|j| (0.5 * (((kf + 1.0) / PI).ln() + ln_binomial(k, j))).exp())
        .collect();
    Ok(SectionSpace {
        degree: k,
        ortho_norm_sq,
        eval_scale,
    })
}

impl SectionSpace {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dimension(&self) -> usize {
        self.degree + 1
    }

    /// `‖z^j‖²` for `j = 0..=k`.
    pub fn ortho_norm_sq(&self) -> &[f64] {
        &self.ortho_norm_sq
    }

    /// Value of the Bergman kernel on the diagonal, `(k+1)/π`.
    pub fn kernel_diagonal(&self) -> f64 {
        (self.degree as f64 + 1.0) / PI
    }

    /// Writes `e_j(p)` for all `j` into `out` (frame of the normalized
    /// representative of `p`).
    pub fn basis_values(&self, p: &SpherePoint, out: &mut [Complex64]) {
        let k = self.degree;
        debug_assert_eq!(out.len(), k + 1);
        let (z0, z1) = (p.z0(), p.z1());
        // out[j] <- z1^j, then multiply by z0^(k-j) from the top down.
        let mut pw = Complex64::new(1.0, 0.0);
        for o in out.iter_mut() {
            *o = pw;
            pw *= z1;
        }
        let mut pw = Complex64::new(1.0, 0.0);
        for j in (0..=k).rev() {
            out[j] *= pw * self.eval_scale[j];
            pw *= z0;
        }
    }

    pub fn basis_vector(&self, p: &SpherePoint) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.dimension()];
        self.basis_values(p, &mut v);
        v
    }

    /// Value of `s` at `p` in the frame of the normalized representative.
    pub fn section_value(&self, s: &Section, p: &SpherePoint) -> Result<Complex64> {
        self.check(s)?;
        let e = self.basis_vector(p);
        Ok(s.coeffs.iter().zip(&e).map(|(c, e)| c * e).sum())
    }

    fn check(&self, s: &Section) -> Result<()> {
        if s.degree() != self.degree {
            return Err(Error::Shape {
                expected: self.degree,
                found: s.degree(),
            });
        }
        Ok(())
    }
}

/// Section written in the orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub coeffs: Vec<Complex64>,
}

impl Section {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a section has at least one coefficient");
        Self { coeffs }
    }

    pub fn zero(k: usize) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0); k + 1])
    }

    /// The `j`-th orthonormal basis vector.
    pub fn basis(k: usize, j: usize) -> Self {
        let mut s = Self::zero(k);
        s.coeffs[j] = Complex64::new(1.0, 0.0);
        s
    }

    /// Section from monomial coefficients `p(z) = Σ a_j z^j`.
    pub fn from_monomials(space: &SectionSpace, monomial: &[Complex64]) -> Result<Self> {
        if monomial.len() != space.dimension() {
            return Err(Error::Shape {
                expected: space.degree(),
                found: monomial.len().saturating_sub(1),
            });
        }
        Ok(Self::new(
            monomial
                .iter()
                .zip(space.ortho_norm_sq())
                .map(|(a, n)| a * n.sqrt())
                .collect(),
        ))
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `‖s‖²` by Parseval.
    pub fn norm_sq(&self) -> f64 {
        let mut acc = CompensatedSum::new();
        for c in &self.coeffs {
            acc.add(c.norm_sqr());
        }
        acc.value()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sq().sqrt();
        Self::new(self.coeffs.iter().map(|c| c / n).collect())
    }

    /// Unit section with i.i.d. complex Gaussian coefficients (Box–Muller on
    /// a splitmix stream), so its direction is uniform on the unit sphere.
    pub fn random_unit(k: usize, seed: u64) -> Self {
        let mut rng = SplitMix64::new(seed);
        let coeffs = (0..=k)
            .map(|_| {
                let u = 1.0 - rng.next_f64();
                let v = rng.next_f64();
                Complex64::from_polar((-2.0 * u.ln()).sqrt(), 2.0 * PI * v)
            })
            .collect();
        Self::new(coeffs).normalized()
    }
}

/// `|s(p)|²` in the Fubini–Study bundle metric.
pub fn eval_pointnorm(space: &SectionSpace, s: &Section, p: &SpherePoint) -> Result<f64> {
    Ok(space.section_value(s, p)?.norm_sqr())
}

/// `|Π_k(p, q)| = (k+1)/π · cos^k d(p, q)`.
pub fn kernel_pointnorm(k: usize, p: &SpherePoint, q: &SpherePoint) -> f64 {
    let cos = p.inner(q).norm().min(1.0);
    (k as f64 + 1.0) / PI * cos.powi(k as i32)
}

/// Normalized kernel section at `y`: coefficients `ē_j(y) / √Π_k(y,y)`, so
/// `‖g‖ = 1` and `|g(x)|² = |Π_k(x,y)|² / Π_k(y,y)`.
pub fn peak_section(space: &SectionSpace, y: &SpherePoint) -> Section {
    let scale = 1.0 / space.kernel_diagonal().sqrt();
    Section::new(space.basis_vector(y).into_iter().map(|e| e.conj() * scale).collect())
}

/// Closed form of the peak-section mass outside `B(y, R/√k)`:
/// `cos^{2k+2}(R/√k)`.
pub fn peak_tail_closed_form(k: usize, radius_factor: f64) -> Result<f64> {
    let r = scaled_radius(k, radius_factor)?;
    Ok(r.cos().powi(2 * k as i32 + 2))
}

/// `R / √k`, checked against the diameter.
pub(crate) fn scaled_radius(k: usize, radius_factor: f64) -> Result<f64> {
    if radius_factor < 0.0 || !radius_factor.is_finite() {
        return Err(Error::domain("R", radius_factor, "[0, inf)"));
    }
    let r = if radius_factor == 0.0 {
        0.0
    } else {
        radius_factor / (k as f64).sqrt()
    };
    check_radius("R/sqrt(k)", r)
}

/// Mass of the peak section at `y` outside `B(y, R/√k)`, by quadrature of
/// `|g|²` over the complementary shell around `y`. The rule's orders set the
/// shell rule's resolution.
pub fn peak_tail_mass(
    space: &SectionSpace,
    y: &SpherePoint,
    radius_factor: f64,
    rule: &QuadratureRule,
) -> Result<f64> {
    let r = scaled_radius(space.degree(), radius_factor)?;
    let g = peak_section(space, y);
    let s_lo = r.sin().powi(2);
    let shell = shell_rule(y, s_lo, 1.0, rule.radial_order, rule.azimuthal_order)?;
    let mut acc = CompensatedSum::new();
    let mut e = vec![Complex64::new(0.0, 0.0); space.dimension()];
    for (p, w) in shell.nodes.iter().zip(&shell.weights) {
        space.basis_values(p, &mut e);
        let v: Complex64 = g.coeffs.iter().zip(&e).map(|(c, e)| c * e).sum();
        acc.add(w * v.norm_sqr());
    }
    Ok(acc.value())
}

/// `| |s(p)| − |∫ ⟨s(y), Π(p,y)⟩ dV(y)| |`, the reproducing integral computed
/// on `rule`.
pub fn reproduce_residual(
    space: &SectionSpace,
    s: &Section,
    p: &SpherePoint,
    rule: &QuadratureRule,
) -> Result<f64> {
    space.check(s)?;
    let k = space.degree();
    if rule.radial_order < k + 2 || rule.azimuthal_order < 2 * k + 1 {
        return Err(Error::Config(format!(
            "reproducing integral at degree {k} needs a rule of at least {}x{}, got {}x{}",
            k + 2,
            2 * k + 1,
            rule.radial_order,
            rule.azimuthal_order
        )));
    }
    let dim = space.dimension();
    let mut proj = vec![CompensatedComplex::default(); dim];
    let mut e = vec![Complex64::new(0.0, 0.0); dim];
    for (y, w) in rule.nodes.iter().zip(&rule.weights) {
        space.basis_values(y, &mut e);
        let sy: Complex64 = s.coeffs.iter().zip(&e).map(|(c, e)| c * e).sum();
        for (acc, ej) in proj.iter_mut().zip(&e) {
            acc.add(sy * ej.conj() * *w);
        }
    }
    space.basis_values(p, &mut e);
    let reproduced: Complex64 = proj.iter().zip(&e).map(|(c, e)| c.value() * e).sum();
    let direct: Complex64 = s.coeffs.iter().zip(&e).map(|(c, e)| c * e).sum();
    Ok((direct.norm() - reproduced.norm()).abs())
}

/// Distance-only form of the kernel, for callers that already know `d`.
pub fn kernel_pointnorm_at_distance(k: usize, d: f64) -> f64 {
    (k as f64 + 1.0) / PI * d.cos().max(0.0).powi(k as i32)
}

/// Convenience check used by tests and examples: the kernel evaluated via
/// the distance function.
pub fn kernel_via_distance(k: usize, p: &SpherePoint, q: &SpherePoint) -> f64 {
    kernel_pointnorm_at_distance(k, fs_distance(p, q))
}
