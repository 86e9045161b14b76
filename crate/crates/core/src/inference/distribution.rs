//! Tabulated inferred distributions, the closed-form Gamma/Beta posteriors and
//! the credible-interval scan.

use serde::Serialize;

use super::quadrature::gauss_legendre_on;
use crate::error::{Error, Result};
use crate::special::{binomial_mass, poisson_mass};

/// Points on the default λ grid.
pub const DEFAULT_LAMBDA_POINTS: usize = 2001;
/// Points on the default p grid.
pub const DEFAULT_P_POINTS: usize = 1001;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parameter {
    /// Poisson mean `λ = |α|²`.
    Lambda,
    /// Success probability `p = sin²(θ/2)`.
    P,
}

impl Parameter {
    pub fn name(self) -> &'static str {
        match self {
            Parameter::Lambda => "lambda",
            Parameter::P => "p",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Analytic,
    PovQuadrature,
}

/// Density tabulated on a strictly increasing grid of the canonical parameter.
#[derive(Clone, Debug, Serialize)]
pub struct InferredDistribution {
    pub parameter: Parameter,
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub total_mass: f64,
    pub source: Source,
}

impl InferredDistribution {
    pub fn new(
        parameter: Parameter,
        grid: Vec<f64>,
        density: Vec<f64>,
        total_mass: f64,
        source: Source,
    ) -> Result<Self> {
        if grid.len() != density.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: density.len(),
            });
        }
        if grid.is_empty() || grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("grid must be nonempty and strictly increasing".into()));
        }
        if let Some(bad) = density.iter().find(|d| !(**d >= 0.0) || !d.is_finite()) {
            return Err(Error::InvalidArgument(format!("density value {bad} is not a finite nonnegative number")));
        }
        Ok(Self {
            parameter,
            grid,
            density,
            total_mass,
            source,
        })
    }

    /// Cumulative trapezoidal mass, starting at zero on the first grid point.
    pub fn cumulative_trapezoid(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.grid.len());
        let mut acc = 0.0;
        out.push(0.0);
        for i in 1..self.grid.len() {
            acc += 0.5 * (self.grid[i] - self.grid[i - 1]) * (self.density[i] + self.density[i - 1]);
            out.push(acc);
        }
        out
    }

    /// Trapezoidal mass of the grid cells inside `[lo, hi]`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        let mut acc = 0.0;
        for i in 1..self.grid.len() {
            let (a, b) = (self.grid[i - 1], self.grid[i]);
            if a >= lo && b <= hi {
                acc += 0.5 * (b - a) * (self.density[i] + self.density[i - 1]);
            }
        }
        acc
    }

    /// `sup |self - other|` over a shared grid.
    pub fn sup_distance(&self, other: &InferredDistribution) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::InvalidArgument("distributions use different grids".into()));
        }
        Ok(self
            .density
            .iter()
            .zip(&other.density)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// `e^{-λ} λ^n / n!`, the Gamma(n+1, 1) density.
pub fn inferred_density_poisson(n: u64, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!("lambda must be >= 0, got {lambda}")));
    }
    Ok(poisson_mass(lambda, n))
}

/// `(n+1) C(n,k) p^k (1-p)^{n-k}`, the Beta(k+1, n-k+1) density.
pub fn inferred_density_binomial(n: u64, k: u64, p: f64) -> Result<f64> {
    if k > n {
        return Err(Error::InvalidArgument(format!("count k = {k} exceeds n = {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("p = {p} outside [0, 1]")));
    }
    Ok((n + 1) as f64 * binomial_mass(n, k, p))
}

/// Uniform grid on `[0, n + 1 + 10 √(n+1)]`.
pub fn lambda_grid(n: u64, points: usize) -> Vec<f64> {
    let upper = (n + 1) as f64 + 10.0 * ((n + 1) as f64).sqrt();
    uniform_grid(0.0, upper, points)
}

/// Uniform grid on `[0, 1]`.
pub fn p_grid(points: usize) -> Vec<f64> {
    uniform_grid(0.0, 1.0, points)
}

fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2, "grid needs at least two points");
    let step = (hi - lo) / (points - 1) as f64;
    (0..points)
        .map(|i| if i + 1 == points { hi } else { lo + i as f64 * step })
        .collect()
}

/// Composite Gauss–Legendre integral of `f` over `[a, b]`.
fn composite_integral(a: f64, b: f64, panels: usize, order: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let (x, w) = gauss_legendre_on(a + i as f64 * h, a + (i + 1) as f64 * h, order);
            x.iter().zip(&w).map(|(&x, &w)| w * f(x)).sum::<f64>()
        })
        .sum()
}

/// Gamma(n+1, 1) posterior on `grid`; mass from a Gauss–Legendre integral over
/// `[0, n + 1 + 40 √(n+1)]`.
pub fn analytic_poisson(n: u64, grid: &[f64]) -> Result<InferredDistribution> {
    let density = grid
        .iter()
        .map(|&l| inferred_density_poisson(n, l))
        .collect::<Result<Vec<_>>>()?;
    let upper = (n + 1) as f64 + 40.0 * ((n + 1) as f64).sqrt();
    let total_mass = composite_integral(0.0, upper, 64, 20, |l| poisson_mass(l, n));
    InferredDistribution::new(Parameter::Lambda, grid.to_vec(), density, total_mass, Source::Analytic)
}

/// Beta(k+1, n-k+1) posterior on `grid`; mass from a Gauss–Legendre rule that
/// is exact for the degree-`n` integrand.
pub fn analytic_binomial(n: u64, k: u64, grid: &[f64]) -> Result<InferredDistribution> {
    let density = grid
        .iter()
        .map(|&p| inferred_density_binomial(n, k, p))
        .collect::<Result<Vec<_>>>()?;
    let order = (n as usize) / 2 + 2;
    let total_mass = composite_integral(0.0, 1.0, 1, order, |p| (n + 1) as f64 * binomial_mass(n, k, p));
    InferredDistribution::new(Parameter::P, grid.to_vec(), density, total_mass, Source::Analytic)
}

/// Shortest grid-supported interval holding at least `mass` of the
/// trapezoidal grid mass.
///
/// Interval masses are taken relative to the total trapezoidal mass of the
/// grid. Among equally short windows the one holding more mass wins, then the
/// one with the lower left endpoint.
pub fn credible_interval(dist: &InferredDistribution, mass: f64) -> Result<(f64, f64)> {
    if !(mass > 0.0 && mass < 1.0) {
        return Err(Error::InvalidArgument(format!("credible mass must lie in (0, 1), got {mass}")));
    }
    let cum = dist.cumulative_trapezoid();
    let total = *cum.last().expect("nonempty grid");
    if dist.grid.len() < 2 || !(total > 0.0) {
        return Err(Error::InsufficientQuadrature("grid too coarse to hold any mass".into()));
    }
    let target = mass * total;
    let span = dist.grid[dist.grid.len() - 1] - dist.grid[0];
    let tie = 1e-12 * span;

    let mass_tie = 1e-12 * total;

    // (left, right, width, mass)
    let mut best: Option<(usize, usize, f64, f64)> = None;
    let mut right = 0;
    for left in 0..dist.grid.len() {
        if right < left {
            right = left;
        }
        while right < dist.grid.len() && cum[right] - cum[left] < target {
            right += 1;
        }
        if right == dist.grid.len() {
            break;
        }
        let width = dist.grid[right] - dist.grid[left];
        let held = cum[right] - cum[left];
        let better = match best {
            None => true,
            Some((_, _, w, m)) => width < w - tie || (width <= w + tie && held > m + mass_tie),
        };
        if better {
            best = Some((left, right, width, held));
        }
    }
    let (l, r, _, _) = best.ok_or_else(|| Error::InsufficientQuadrature("grid too coarse to achieve mass".into()))?;
    Ok((dist.grid[l], dist.grid[r]))
}
