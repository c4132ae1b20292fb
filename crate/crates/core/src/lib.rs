//! Norming sets and Carleson measures for holomorphic sections of `O(k)` on
//! the projective line.
//!
//! The crate builds the finite-dimensional spaces of degree-`k` polynomials
//! with the Fubini–Study weight, their Bergman kernels and peak sections, and
//! the concentration operators of sets and measures. From the spectra of the
//! latter it computes norming constants, Carleson constants, Berezin
//! transforms and ball-mass bounds, and compares them with the relative
//! density of the sets involved. A truncated Fock space provides the planar
//! analogue.
//!
//! Modules:
//! - [`geometry`]: points, distances, balls and quadrature on CP¹
//! - [`sections`]: orthonormal bases, pointwise norms, kernels, peak sections
//! - [`regions`]: region and measure descriptions, relative density
//! - [`spectra`]: Gram matrices, Jacobi eigensolver, the derived constants
//! - [`fock`]: truncated Fock space on the plane
//! - [`cli`]: experiment configs, the runner, CSV/JSON output

pub mod cli;
pub mod error;
pub mod expr;
pub mod fock;
pub mod geometry;
pub mod numeric;
pub mod regions;
pub mod sections;
pub mod spectra;

pub use error::{Error, Result};
pub use geometry::{
    ball_volume, fs_distance, in_ball_tan, integrate, make_quadrature, normalize_point, FsBall,
    QuadratureRule, SpherePoint, Unitary,
};
pub use num_complex::Complex64;
pub use regions::{probe_grid, region_volume, relative_density, DensityReport, MeasureSpec, Region};
pub use sections::{
    eval_pointnorm, kernel_pointnorm, make_space, peak_section, peak_tail_mass, reproduce_residual,
    Section, SectionSpace,
};
pub use spectra::{
    ball_mass_sup, berezin_sup, berezin_transform, carleson_constant, eigh, exceptional_mass_ratio,
    gram_matrix, kernel_lower_bound, norming_constant, ConcentrationResult, EigenResult,
    HermitianMatrix,
};
