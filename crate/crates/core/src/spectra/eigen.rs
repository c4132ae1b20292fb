//! Dense Hermitian matrices and a cyclic Jacobi eigensolver.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 512;
const MAX_SWEEPS: usize = 64;

/// Dense Hermitian matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds from a row-major array; the result is exactly Hermitian
    /// (average of `A` and `A*`).
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Config(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let mut m = Self { dim, entries };
        m.symmetrize();
        Ok(m)
    }

    /// Fills the strictly lower triangle from the upper one and makes the
    /// diagonal real.
    pub(crate) fn from_upper(dim: usize, mut entries: Vec<Complex64>) -> Self {
        for i in 0..dim {
            entries[i * dim + i].im = 0.0;
            for j in (i + 1)..dim {
                entries[j * dim + i] = entries[i * dim + j].conj();
            }
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// `max |M_ij - conj(M_ji)|`.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn symmetrize(&mut self) {
        let n = self.dim;
        for i in 0..n {
            self.entries[i * n + i].im = 0.0;
            for j in (i + 1)..n {
                let avg = 0.5 * (self.entries[i * n + j] + self.entries[j * n + i].conj());
                self.entries[i * n + j] = avg;
                self.entries[j * n + i] = avg.conj();
            }
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `s* M s`.
    pub fn quadratic_form(&self, v: &[Complex64]) -> f64 {
        let n = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let row: Complex64 = (0..n).map(|j| self.entries[i * n + j] * v[j]).sum();
            acc += v[i].conj() * row;
        }
        acc.re
    }

    pub fn add(&self, other: &HermitianMatrix) -> HermitianMatrix {
        assert_eq!(self.dim, other.dim);
        HermitianMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &HermitianMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[i]` belongs to `eigenvalues[i]`.
    pub eigenvectors: Vec<Vec<Complex64>>,
    pub max_offdiag_residual: f64,
    pub sweeps: usize,
}

/// Full spectrum by cyclic Jacobi rotations in row order `(0,1), (0,2), …`.
pub fn eigh(m: &HermitianMatrix) -> Result<EigenResult> {
    let n = m.dim;
    if n > MAX_DIM {
        return Err(Error::Config(format!("matrix dimension {n} exceeds {MAX_DIM}")));
    }
    let mut a = m.entries.clone();
    let mut v = HermitianMatrix::identity(n).entries;
    let norm = m.frobenius();
    let tol = 1e-15 * norm;
    let skip = 1e-18 * norm;

    let off = |a: &[Complex64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > tol {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: off(&a),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let g = apq.norm();
                if g <= skip {
                    continue;
                }
                let phase = apq / g;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let tau = (aqq - app) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sp = phase.conj() * s; // s e^{-i phi}
                let cp = phase.conj() * c; // c e^{-i phi}

                // A <- A V, columns p and q
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * c - akq * sp;
                    a[k * n + q] = akp * s + akq * cp;
                }
                // A <- V* A, rows p and q
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = apk * c - aqk * sp.conj();
                    a[q * n + k] = apk * s + aqk * cp.conj();
                }
                a[p * n + q] = Complex64::new(0.0, 0.0);
                a[q * n + p] = Complex64::new(0.0, 0.0);
                a[p * n + p].im = 0.0;
                a[q * n + q].im = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * c - vkq * sp;
                    v[k * n + q] = vkp * s + vkq * cp;
                }
            }
        }
    }

    let mut max_off: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                max_off = max_off.max(a[i * n + j].norm());
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re).then(i.cmp(&j)));
    Ok(EigenResult {
        eigenvalues: order.iter().map(|&i| a[i * n + i].re).collect(),
        eigenvectors: order
            .iter()
            .map(|&i| (0..n).map(|k| v[k * n + i]).collect())
            .collect(),
        max_offdiag_residual: max_off,
        sweeps,
    })
}
