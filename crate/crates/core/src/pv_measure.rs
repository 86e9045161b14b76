//! Observables, vector states, state operators and their projection-valued
//! measures, together with the Born-rule probability formulas.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linops::{
    c, hermitian_eigendecomposition, inner_product, ComplexMatrix, ComplexVector,
    SpectralDecomposition, DEFAULT_HERMITIAN_TOL,
};
use crate::special::{erf, erfc};

/// Eigenvalues closer than this are merged into one outcome.
pub const OUTCOME_MERGE_TOL: f64 = 1e-9;

/// Unit-norm tolerance for vector states.
pub const STATE_NORM_TOL: f64 = 1e-12;

/// Raw probabilities below `-NEGATIVE_PROBABILITY_TOL` are reported as errors.
pub const NEGATIVE_PROBABILITY_TOL: f64 = 1e-10;

/// Trace and positivity tolerance for state operators.
const STATE_OPERATOR_TOL: f64 = 1e-12;

/// Hermitian matrix with its cached spectral decomposition.
#[derive(Clone, Debug)]
pub struct Observable {
    matrix: ComplexMatrix,
    spectrum: SpectralDecomposition,
}

impl Observable {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let spectrum = hermitian_eigendecomposition(&matrix, DEFAULT_HERMITIAN_TOL)?;
        Ok(Self { matrix, spectrum })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Unit vector representing a state; two states are equal when they differ by
/// a unit-modulus factor.
#[derive(Clone, Debug)]
pub struct VectorState {
    vector: ComplexVector,
}

impl VectorState {
    pub fn new(vector: ComplexVector) -> Result<Self> {
        let norm = vector.norm();
        if (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { vector })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn from_unnormalized(vector: ComplexVector) -> Result<Self> {
        Ok(Self {
            vector: vector.normalized()?,
        })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        Self {
            vector: ComplexVector::basis(dim, index),
        }
    }

    pub fn vector(&self) -> &ComplexVector {
        &self.vector
    }

    pub fn dim(&self) -> usize {
        self.vector.dim()
    }

    pub fn with_phase(&self, phase: Complex64) -> Result<Self> {
        Self::new(self.vector.scale(phase))
    }

    /// `|(self, other)|`, which is 1 exactly when the two are the same state.
    pub fn fidelity(&self, other: &VectorState) -> Result<f64> {
        Ok(inner_product(&self.vector, &other.vector)?.norm())
    }
}

/// Hermitian, positive semidefinite, trace-one operator.
#[derive(Clone, Debug)]
pub struct StateOperator {
    matrix: ComplexMatrix,
}

impl StateOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let spectrum = hermitian_eigendecomposition(&matrix, DEFAULT_HERMITIAN_TOL)?;
        if let Some(&min) = spectrum.eigenvalues.last() {
            if min < -STATE_OPERATOR_TOL {
                return Err(Error::InvalidArgument(format!(
                    "state operator has negative eigenvalue {min:e}"
                )));
            }
        }
        let trace = matrix.trace();
        if (trace - c(1.0, 0.0)).norm() > STATE_OPERATOR_TOL {
            return Err(Error::InvalidArgument(format!(
                "state operator trace {trace} is not 1"
            )));
        }
        Ok(Self { matrix })
    }

    /// Projector onto a vector state.
    pub fn pure(state: &VectorState) -> Self {
        Self {
            matrix: state.vector().projector(),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// Spectral measure of a finite-dimensional observable.
#[derive(Clone, Debug)]
pub struct FinitePVMeasure {
    pub outcomes: Vec<f64>,
    pub projectors: Vec<ComplexMatrix>,
}

impl FinitePVMeasure {
    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    /// Index of the outcome matching `value` within [`OUTCOME_MERGE_TOL`].
    pub fn outcome_index(&self, value: f64) -> Result<usize> {
        self.outcomes
            .iter()
            .position(|&y| (y - value).abs() <= OUTCOME_MERGE_TOL)
            .ok_or(Error::OutcomeNotInSpectrum(value))
    }

    pub fn projector(&self, value: f64) -> Result<&ComplexMatrix> {
        Ok(&self.projectors[self.outcome_index(value)?])
    }

    /// Worst violation of `P = P^H = P^2`, `Σ P = I` and `P_i P_j = 0`.
    pub fn invariant_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        let mut total = ComplexMatrix::zeros(n);
        for (i, p) in self.projectors.iter().enumerate() {
            worst = worst.max(p.hermitian_deviation());
            worst = worst.max((&(p * p) - p).max_abs());
            total = &total + p;
            for q in &self.projectors[i + 1..] {
                worst = worst.max((p * q).max_abs());
            }
        }
        worst.max((&total - &ComplexMatrix::identity(n)).max_abs())
    }
}

/// Groups eigenvectors by eigenvalue cluster and sums their rank-one
/// projectors.
pub fn pv_from_observable(obs: &Observable) -> FinitePVMeasure {
    let spectrum = obs.spectrum();
    let n = obs.dim();
    let mut outcomes = Vec::new();
    let mut projectors = Vec::new();
    let mut cluster: Vec<usize> = Vec::new();

    let mut flush = |cluster: &mut Vec<usize>| {
        if cluster.is_empty() {
            return;
        }
        let mean = cluster.iter().map(|&i| spectrum.eigenvalues[i]).sum::<f64>() / cluster.len() as f64;
        let mut p = ComplexMatrix::zeros(n);
        for &i in cluster.iter() {
            p = &p + &spectrum.eigenvectors[i].projector();
        }
        outcomes.push(mean);
        projectors.push(p);
        cluster.clear();
    };

    for i in 0..spectrum.eigenvalues.len() {
        if let Some(&last) = cluster.last() {
            if (spectrum.eigenvalues[last] - spectrum.eigenvalues[i]).abs() > OUTCOME_MERGE_TOL {
                flush(&mut cluster);
            }
        }
        cluster.push(i);
    }
    flush(&mut cluster);

    FinitePVMeasure {
        outcomes,
        projectors,
    }
}

fn checked_probability(raw: f64) -> Result<f64> {
    if raw < -NEGATIVE_PROBABILITY_TOL {
        return Err(Error::NegativeProbability(raw));
    }
    Ok(raw.clamp(0.0, 1.0))
}

/// `(φ, E({y}) φ)`.
pub fn born_probability(state: &VectorState, pv: &FinitePVMeasure, outcome: f64) -> Result<f64> {
    let p = pv.projector(outcome)?;
    let projected = p.apply(state.vector())?;
    let raw = inner_product(state.vector(), &projected)?.re;
    checked_probability(raw)
}

/// `tr(S E({y}))` for a state operator.
pub fn born_probability_mixed(state: &StateOperator, pv: &FinitePVMeasure, outcome: f64) -> Result<f64> {
    let p = pv.projector(outcome)?;
    if p.dim() != state.matrix().dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: state.matrix().dim(),
        });
    }
    checked_probability((state.matrix() * p).trace().re)
}

/// Born probabilities for every outcome, in the measure's outcome order.
pub fn born_distribution(state: &VectorState, pv: &FinitePVMeasure) -> Result<Vec<f64>> {
    pv.outcomes
        .iter()
        .map(|&y| born_probability(state, pv, y))
        .collect()
}

/// `tr(S O)`.
pub fn expectation_trace(state: &StateOperator, obs: &Observable) -> Result<f64> {
    if state.matrix().dim() != obs.dim() {
        return Err(Error::DimensionMismatch {
            expected: obs.dim(),
            found: state.matrix().dim(),
        });
    }
    Ok((state.matrix() * obs.matrix()).trace().re)
}

/// The three-outcome observable `diag(1, 0, -1)`.
pub fn example_observable() -> Observable {
    Observable::new(ComplexMatrix::from_real_diagonal(&[1.0, 0.0, -1.0]))
        .expect("diagonal matrix is Hermitian")
}

/// `(1, 2, 3i) / √14`.
pub fn example_state_xi() -> VectorState {
    let s = 14f64.sqrt();
    VectorState::new(ComplexVector::new(vec![c(1.0 / s, 0.0), c(2.0 / s, 0.0), c(0.0, 3.0 / s)]).unwrap())
        .expect("unit vector")
}

/// `(-i, √2, i) / 2`.
pub fn example_state_psi0() -> VectorState {
    VectorState::new(ComplexVector::new(vec![c(0.0, -0.5), c(SQRT_2 / 2.0, 0.0), c(0.0, 0.5)]).unwrap())
        .expect("unit vector")
}

/// `(e^{-iβ} cos²(θ/2), sin θ / √2, e^{iβ} sin²(θ/2))`, a spin-1 family whose
/// Born probabilities on `diag(1, 0, -1)` are binomial with `n = 2`.
pub fn example_family_state(beta: f64, theta: f64) -> VectorState {
    let (s, co) = (theta / 2.0).sin_cos();
    let v = ComplexVector::new(vec![
        Complex64::from_polar(co * co, -beta),
        c(theta.sin() / SQRT_2, 0.0),
        Complex64::from_polar(s * s, beta),
    ])
    .expect("finite entries");
    // unit norm holds analytically; renormalize away rounding
    VectorState::from_unnormalized(v).expect("nonzero vector")
}

/// Integration bound that may be infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    NegInfinity,
    Finite(f64),
    PosInfinity,
}

impl Bound {
    fn value(self) -> f64 {
        match self {
            Bound::NegInfinity => f64::NEG_INFINITY,
            Bound::Finite(x) => x,
            Bound::PosInfinity => f64::INFINITY,
        }
    }
}

impl From<f64> for Bound {
    fn from(x: f64) -> Self {
        if x == f64::INFINITY {
            Bound::PosInfinity
        } else if x == f64::NEG_INFINITY {
            Bound::NegInfinity
        } else {
            Bound::Finite(x)
        }
    }
}

/// `|ψ(x)|²` for `ψ(x) = e^{-x²/4σ²} / (2πσ²)^{1/4}`.
pub fn gaussian_state_density(sigma: f64, x: f64) -> f64 {
    (-x * x / (2.0 * sigma * sigma)).exp() / (2.0 * PI * sigma * sigma).sqrt()
}

/// Probability that the position lies in `[a, b]` for the Gaussian state of
/// width `σ`, i.e. the `N(0, σ²)` mass of the interval.
pub fn gaussian_position_probability(sigma: f64, a: Bound, b: Bound) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    let (lo, hi) = (a.value(), b.value());
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::InvalidArgument(format!("invalid interval [{lo}, {hi}]")));
    }
    if lo == hi {
        return Ok(0.0);
    }
    let scale = sigma * SQRT_2;
    let (zl, zh) = (lo / scale, hi / scale);
    // evaluate in whichever tail keeps erf away from ±1 cancellation
    let mass = if zl >= 0.0 {
        0.5 * (erfc(zl) - erfc(zh))
    } else if zh <= 0.0 {
        0.5 * (erfc(-zh) - erfc(-zl))
    } else {
        0.5 * (erf(zh) - erf(zl))
    };
    Ok(mass.clamp(0.0, 1.0))
}
