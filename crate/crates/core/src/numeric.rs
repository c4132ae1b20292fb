//! Small numerical kernels shared by the other modules: compensated
//! summation, Gauss–Legendre nodes, log-binomials and a seeded splitmix
//! generator.

use std::ops::AddAssign;

use num_complex::Complex64;

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl AddAssign<f64> for CompensatedSum {
    fn add_assign(&mut self, x: f64) {
        self.add(x);
    }
}

/// Compensated sum of complex values (real and imaginary parts tracked
/// separately).
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedComplex {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl CompensatedComplex {
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Sums `xs` in iteration order with compensation.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Gauss–Legendre nodes and weights on `[0, 1]`, nodes ascending, weights
/// summing to one.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x is the i-th largest root on [-1, 1].
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        nodes[i] = 0.5 * (1.0 - x);
        weights[n - 1 - i] = 0.5 * w;
        weights[i] = 0.5 * w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `ln Γ(x)` for positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `ln C(n, j)` through log-gamma.
pub fn ln_binomial(n: usize, j: usize) -> f64 {
    debug_assert!(j <= n);
    ln_gamma(n as f64 + 1.0) - ln_gamma(j as f64 + 1.0) - ln_gamma((n - j) as f64 + 1.0)
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Counter-based splitmix64 stream. Identical output on every platform for a
/// given seed.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Nodes added to every sector between event angles, on top of its share.
const EXTRA_SECTOR_NODES: usize = 12;

/// Azimuthal nodes `(θ, dθ-weight)` on `[0, 2π)`.
///
/// With no events this is the uniform rule with `n` nodes, exact for
/// trigonometric polynomials of degree below `n`. Otherwise `[0, 2π)` is cut
/// at the event angles, where the integrand may have square-root kinks, and
/// each sector gets Gauss–Legendre nodes under `θ = a + w sin²(πt/2)`, which
/// turns square-root behaviour at either end into an analytic one. Each
/// sector gets its width's share of `n` plus a fixed margin.
pub fn azimuth_nodes(n: usize, events: &mut Vec<f64>) -> Vec<(f64, f64)> {
    let two_pi = 2.0 * std::f64::consts::PI;
    if events.is_empty() {
        let d = two_pi / n as f64;
        return (0..n).map(|j| (d * j as f64, d)).collect();
    }
    for e in events.iter_mut() {
        *e = e.rem_euclid(two_pi);
    }
    events.sort_by(f64::total_cmp);
    events.dedup_by(|b, a| *b - *a < 1e-12);
    let first = events[0];
    if first + two_pi - events[events.len() - 1] < 1e-12 && events.len() > 1 {
        events.pop();
    }
    let mut out = Vec::new();
    let mut cache: std::collections::HashMap<usize, (Vec<f64>, Vec<f64>)> =
        std::collections::HashMap::new();
    for i in 0..events.len() {
        let a = events[i];
        let b = if i + 1 < events.len() {
            events[i + 1]
        } else {
            first + two_pi
        };
        let w = b - a;
        let m = (n as f64 * w / two_pi).ceil() as usize + EXTRA_SECTOR_NODES;
        let (x, wt) = cache.entry(m).or_insert_with(|| gauss_legendre_unit(m));
        for (t, wi) in x.iter().zip(wt.iter()) {
            let half = 0.5 * std::f64::consts::PI * t;
            let theta = a + w * half.sin().powi(2);
            out.push((theta, 0.5 * std::f64::consts::PI * w * (2.0 * half).sin() * wi));
        }
    }
    out
}
