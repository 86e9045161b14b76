//! Product quadrature rules for the invariant measures on the plane and the
//! sphere.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::special::ln_factorial;

const NEWTON_MAX_ITER: usize = 100;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess for the i-th largest root
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|v| v * half).collect(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    /// Complex plane with `dμ(α) = (1/π) r dr dθ`.
    Plane { radius: f64 },
    /// Sphere with `((2j+1)/4π) sin θ dθ dγ`.
    Sphere { twice_j: u32 },
}

/// A parameter point: polar coordinates on the plane, or `(θ, γ)` on the
/// sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Node {
    /// `r` on the plane, `θ` on the sphere.
    pub polar: f64,
    /// Plane angle, or sphere azimuth `γ`.
    pub azimuth: f64,
}

/// Tensor-product rule: Gauss–Legendre in the polar coordinate times the
/// periodic trapezoid rule in the azimuth.
///
/// Polar weights carry the invariant-measure density, so the weight of node
/// `(i, j)` is `polar_weights[i] * azimuth_weight`.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub domain: Domain,
    pub polar: Vec<f64>,
    pub polar_weights: Vec<f64>,
    pub azimuth: Vec<f64>,
    pub azimuth_weight: f64,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.polar.len() * self.azimuth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Nodes in polar-major order.
    pub fn nodes(&self) -> Vec<Node> {
        self.polar
            .iter()
            .flat_map(|&p| self.azimuth.iter().map(move |&a| Node { polar: p, azimuth: a }))
            .collect()
    }

    /// Weights matching [`QuadratureRule::nodes`].
    pub fn weights(&self) -> Vec<f64> {
        self.polar_weights
            .iter()
            .flat_map(|&w| std::iter::repeat_n(w * self.azimuth_weight, self.azimuth.len()))
            .collect()
    }

    /// `Σ w f(node)`, summed in node order.
    pub fn integrate(&self, mut f: impl FnMut(Node) -> f64) -> f64 {
        let mut total = 0.0;
        for (&p, &wp) in self.polar.iter().zip(&self.polar_weights) {
            let mut ring = 0.0;
            for &a in &self.azimuth {
                ring += f(Node { polar: p, azimuth: a });
            }
            total += wp * self.azimuth_weight * ring;
        }
        total
    }

    /// Largest relative error of `∫_0^R e^{-r²} r^{2m+1} dr = Γ(m+1)/2` for
    /// `m = 0..=max_m`. Only meaningful for plane rules.
    pub fn plane_moment_defect(&self, max_m: u32) -> Result<f64> {
        if !matches!(self.domain, Domain::Plane { .. }) {
            return Err(Error::InvalidArgument("moment check needs a plane rule".into()));
        }
        let mut worst = 0.0_f64;
        for m in 0..=max_m {
            // polar weight = w_gl * r / π
            let got: f64 = self
                .polar
                .iter()
                .zip(&self.polar_weights)
                .map(|(&r, &w)| PI * w * (-r * r).exp() * r.powi(2 * m as i32))
                .sum();
            let want = 0.5 * ln_factorial(u64::from(m)).exp();
            worst = worst.max((got - want).abs() / want);
        }
        Ok(worst)
    }
}

fn uniform_azimuth(n: usize) -> (Vec<f64>, f64) {
    let step = 2.0 * PI / n as f64;
    ((0..n).map(|i| i as f64 * step).collect(), step)
}

/// Polar product rule on the disk of radius `radius` for `(1/π) r dr dθ`.
pub fn plane_quadrature(radius: f64, n_r: usize, n_angle: usize) -> Result<QuadratureRule> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument(format!("radial cutoff must be positive, got {radius}")));
    }
    if n_r < 2 || n_angle < 2 {
        return Err(Error::InsufficientQuadrature(format!(
            "plane rule needs at least 2 radial and 2 angular nodes, got {n_r} x {n_angle}"
        )));
    }
    let (r, w) = gauss_legendre_on(0.0, radius, n_r);
    let polar_weights = r.iter().zip(&w).map(|(&r, &w)| w * r / PI).collect();
    let (azimuth, azimuth_weight) = uniform_azimuth(n_angle);
    Ok(QuadratureRule {
        domain: Domain::Plane { radius },
        polar: r,
        polar_weights,
        azimuth,
        azimuth_weight,
    })
}

/// Smallest `(n_θ, n_γ)` that integrate the spin-j coherent-state products
/// exactly.
pub fn minimal_sphere_orders(twice_j: u32) -> (usize, usize) {
    (twice_j as usize + 2, 2 * twice_j as usize + 1)
}

/// Gauss–Legendre in `cos θ` times uniform `γ`, weighted by `(2j+1)/4π`.
pub fn sphere_quadrature(twice_j: u32, n_theta: usize, n_gamma: usize) -> Result<QuadratureRule> {
    let (min_theta, min_gamma) = minimal_sphere_orders(twice_j);
    if n_theta < min_theta || n_gamma < min_gamma {
        return Err(Error::InsufficientQuadrature(format!(
            "spin 2j = {twice_j} needs n_theta >= {min_theta} and n_gamma >= {min_gamma}, got {n_theta} x {n_gamma}"
        )));
    }
    let (x, w) = gauss_legendre(n_theta);
    let density = f64::from(twice_j + 1) / (4.0 * PI);
    // ascending θ
    let polar = x.iter().rev().map(|t| t.acos()).collect();
    let polar_weights = w.iter().rev().map(|w| w * density).collect();
    let (azimuth, azimuth_weight) = uniform_azimuth(n_gamma);
    Ok(QuadratureRule {
        domain: Domain::Sphere { twice_j },
        polar,
        polar_weights,
        azimuth,
        azimuth_weight,
    })
}
