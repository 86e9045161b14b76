//! POV measures built from coherent-state families: resolution of the
//! identity, the coherent transform and inferred parameter densities.

use num_complex::Complex64;

use super::distribution::{InferredDistribution, Parameter, Source};
use super::quadrature::{Domain, Node, QuadratureRule};
use crate::error::{Error, Result};
use crate::fock::{coherent_amplitude, FockSpace, LadderRep};
use crate::linops::{c, inner_product, ComplexVector};
use crate::pv_measure::VectorState;
use crate::spin::{spin_coherent_amplitude, SpinRep};

/// A coherent-state family indexed by a homogeneous space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CoherentFamily {
    /// `v(α) = D(α) φ_0`, projected onto the first `K` number states. The
    /// projections are the exact amplitudes of the untruncated state.
    WeylHeisenberg(FockSpace),
    /// `w(θ, γ) = D(ν) φ_{-j}` in dimension `2j + 1`.
    Spin { twice_j: u32 },
}

impl From<&LadderRep> for CoherentFamily {
    fn from(rep: &LadderRep) -> Self {
        CoherentFamily::WeylHeisenberg(rep.space)
    }
}

impl From<&SpinRep> for CoherentFamily {
    fn from(rep: &SpinRep) -> Self {
        CoherentFamily::Spin {
            twice_j: rep.twice_j(),
        }
    }
}

impl CoherentFamily {
    pub fn dim(&self) -> usize {
        match self {
            CoherentFamily::WeylHeisenberg(space) => space.dim(),
            CoherentFamily::Spin { twice_j } => *twice_j as usize + 1,
        }
    }

    /// `(φ_index, v(node))`.
    pub fn amplitude(&self, index: usize, node: Node) -> Complex64 {
        match self {
            CoherentFamily::WeylHeisenberg(_) => {
                coherent_amplitude(Complex64::from_polar(node.polar, node.azimuth), index)
            }
            CoherentFamily::Spin { twice_j } => {
                spin_coherent_amplitude(*twice_j, index, node.polar, node.azimuth)
            }
        }
    }

    /// All amplitudes `(φ_k, v(node))` for `k < limit`.
    fn amplitudes(&self, node: Node, limit: usize) -> Vec<Complex64> {
        (0..limit).map(|k| self.amplitude(k, node)).collect()
    }

    fn check_rule(&self, rule: &QuadratureRule) -> Result<()> {
        match (self, rule.domain) {
            (CoherentFamily::WeylHeisenberg(_), Domain::Plane { .. }) => Ok(()),
            (CoherentFamily::Spin { twice_j }, Domain::Sphere { twice_j: rule_j }) if *twice_j == rule_j => Ok(()),
            _ => Err(Error::InvalidArgument(format!(
                "quadrature domain {:?} does not match family {self:?}",
                rule.domain
            ))),
        }
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.dim() {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dimension {}",
                self.dim()
            )));
        }
        Ok(())
    }
}

/// `max |M_ij - δ_ij|` over the whole family basis, where
/// `M_ij = ∫ (φ_i, v)(v, φ_j) dμ` by quadrature.
pub fn resolution_of_identity_check(family: &CoherentFamily, rule: &QuadratureRule) -> Result<f64> {
    resolution_of_identity_check_on(family, rule, family.dim())
}

/// Same as [`resolution_of_identity_check`], restricted to the first `n_basis`
/// basis vectors.
pub fn resolution_of_identity_check_on(
    family: &CoherentFamily,
    rule: &QuadratureRule,
    n_basis: usize,
) -> Result<f64> {
    family.check_rule(rule)?;
    if n_basis == 0 || n_basis > family.dim() {
        return Err(Error::InvalidArgument(format!(
            "basis restriction {n_basis} outside 1..={}",
            family.dim()
        )));
    }
    let mut gram = vec![c(0.0, 0.0); n_basis * n_basis];
    for (node, w) in rule.nodes().into_iter().zip(rule.weights()) {
        let amps = family.amplitudes(node, n_basis);
        for i in 0..n_basis {
            let wi = amps[i] * w;
            for j in 0..n_basis {
                gram[i * n_basis + j] += wi * amps[j].conj();
            }
        }
    }
    let mut worst = 0.0_f64;
    for i in 0..n_basis {
        for j in 0..n_basis {
            let delta = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[i * n_basis + j] - c(delta, 0.0)).norm());
        }
    }
    Ok(worst)
}

/// `ρ(φ)(param) = (φ, v(param))` tabulated on quadrature nodes.
#[derive(Clone, Debug)]
pub struct CoherentTransform {
    pub nodes: Vec<Node>,
    pub weights: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl CoherentTransform {
    /// `∫ |ρ(φ)|² dμ`.
    pub fn norm_squared(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| w * v.norm_sqr())
            .sum()
    }

    /// `∫ ρ(φ₁)* ρ(φ₂) dμ`, which approximates `(φ₁, φ₂)`.
    pub fn inner(&self, other: &CoherentTransform) -> Result<Complex64> {
        if self.values.len() != other.values.len() {
            return Err(Error::DimensionMismatch {
                expected: self.values.len(),
                found: other.values.len(),
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .zip(&self.weights)
            .map(|((a, b), w)| a.conj() * b * w)
            .sum())
    }

    /// Quadrature mass `∫_Δ |ρ(φ)|² dμ` of the box `polar ∈ [lo, hi]`,
    /// `azimuth ∈ [alo, ahi]`.
    pub fn box_probability(&self, polar: (f64, f64), azimuth: (f64, f64)) -> f64 {
        self.nodes
            .iter()
            .zip(&self.values)
            .zip(&self.weights)
            .filter(|((n, _), _)| {
                (polar.0..=polar.1).contains(&n.polar) && (azimuth.0..=azimuth.1).contains(&n.azimuth)
            })
            .map(|((_, v), w)| w * v.norm_sqr())
            .sum()
    }
}

pub fn coherent_transform(
    state: &VectorState,
    family: &CoherentFamily,
    rule: &QuadratureRule,
) -> Result<CoherentTransform> {
    family.check_rule(rule)?;
    if state.dim() != family.dim() {
        return Err(Error::DimensionMismatch {
            expected: family.dim(),
            found: state.dim(),
        });
    }
    let nodes = rule.nodes();
    let values = nodes
        .iter()
        .map(|&node| {
            let v = ComplexVector::new(family.amplitudes(node, family.dim())).expect("finite amplitudes");
            inner_product(state.vector(), &v).expect("dims checked")
        })
        .collect();
    Ok(CoherentTransform {
        nodes,
        weights: rule.weights(),
        values,
    })
}

/// Spread `max - min` of `|(φ_index, v)|²` across the rule's azimuth nodes at
/// a fixed polar coordinate. Zero when the joint density is azimuth-free.
pub fn azimuthal_spread(family: &CoherentFamily, rule: &QuadratureRule, index: usize, polar: f64) -> f64 {
    let values: Vec<f64> = rule
        .azimuth
        .iter()
        .map(|&a| family.amplitude(index, Node { polar, azimuth: a }).norm_sqr())
        .collect();
    let max = values.iter().cloned().fold(f64::MIN, f64::max);
    let min = values.iter().cloned().fold(f64::MAX, f64::min);
    max - min
}

/// Inferred distribution of the canonical parameter after observing basis
/// state `observed` (`n` for Poisson, `k = j + ℓ` for binomial).
///
/// The joint density `|(φ_obs, v)|²` is averaged over the rule's azimuth nodes
/// at each grid value, which is the azimuthal marginal. On the plane
/// `dμ = (1/2π) dλ dθ`, so the λ-density is that average. On the sphere
/// `dp = ½ sin θ dθ` absorbs the `sin θ` factor, leaving `(2j+1)` times the
/// average. `total_mass` is the full quadrature of the joint density.
pub fn infer_via_pov(
    observed: usize,
    family: &CoherentFamily,
    rule: &QuadratureRule,
    grid: &[f64],
) -> Result<InferredDistribution> {
    family.check_rule(rule)?;
    family.check_index(observed)?;
    if rule.azimuth.is_empty() {
        return Err(Error::InsufficientQuadrature("rule has no azimuth nodes".into()));
    }
    let n_az = rule.azimuth.len() as f64;
    let azimuth_mean = |polar: f64| -> f64 {
        rule.azimuth
            .iter()
            .map(|&a| family.amplitude(observed, Node { polar, azimuth: a }).norm_sqr())
            .sum::<f64>()
            / n_az
    };

    let (parameter, density) = match (family, rule.domain) {
        (CoherentFamily::WeylHeisenberg(_), Domain::Plane { radius }) => {
            if let Some(&max) = grid.last() {
                if max.sqrt() > radius {
                    return Err(Error::InsufficientQuadrature(format!(
                        "grid reaches lambda = {max} beyond the radial cutoff {radius}"
                    )));
                }
            }
            if grid.iter().any(|&l| l < 0.0) {
                return Err(Error::InvalidArgument("lambda grid must be nonnegative".into()));
            }
            (
                Parameter::Lambda,
                grid.iter().map(|&l| azimuth_mean(l.sqrt())).collect::<Vec<_>>(),
            )
        }
        (CoherentFamily::Spin { twice_j }, Domain::Sphere { .. }) => {
            if grid.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(Error::InvalidArgument("p grid must lie in [0, 1]".into()));
            }
            let scale = f64::from(twice_j + 1);
            (
                Parameter::P,
                grid.iter()
                    .map(|&p| scale * azimuth_mean(2.0 * p.sqrt().asin()))
                    .collect::<Vec<_>>(),
            )
        }
        _ => unreachable!("checked by check_rule"),
    };

    let total_mass = rule.integrate(|node| family.amplitude(observed, node).norm_sqr());
    InferredDistribution::new(parameter, grid.to_vec(), density, total_mass, Source::PovQuadrature)
}
