//! Spin-j representations of SU(2), spin coherent states on the sphere and
//! the binomial family.
//!
//! Basis order is `m = -j, -j+1, ..., j`, so index `k = j + m` doubles as the
//! binomial count and `φ_{-j}` is the first column.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linops::{
    adjoint, c, commutator, distance_up_to_phase, matrix_exponential, ComplexMatrix, ComplexVector,
    DEFAULT_EXP_TOL,
};
use crate::pv_measure::VectorState;
use crate::special::{binomial, binomial_mass, ln_binomial, ln_factorial, xlny};

/// Above this `n = 2j` amplitudes are assembled in log space.
const DIRECT_AMPLITUDE_MAX_N: u32 = 60;

/// Smallest `cos(θ/2)` accepted by the Gauss-decomposition check.
const GAUSS_MIN_COS_HALF: f64 = 1e-8;

/// Integer or half-integer, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const fn from_twice(twice: i32) -> Self {
        Self(twice)
    }

    pub const fn from_int(v: i32) -> Self {
        Self(2 * v)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    /// Accepts values whose double is an integer.
    pub fn from_f64(v: f64) -> Result<Self> {
        let twice = 2.0 * v;
        if !twice.is_finite() || twice.fract() != 0.0 || twice.abs() > f64::from(i32::MAX) {
            return Err(Error::InvalidArgument(format!("{v} is not a half-integer")));
        }
        Ok(Self(twice as i32))
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Parses `"3"`, `"5/2"` or `"2.5"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("cannot parse half-integer from {s:?}"));
        if let Some((num, den)) = s.split_once('/') {
            let num: i32 = num.trim().parse().map_err(|_| bad())?;
            match den.trim() {
                "2" => Ok(Self(num)),
                "1" => Ok(Self(2 * num)),
                _ => Err(bad()),
            }
        } else {
            let v: f64 = s.parse().map_err(|_| bad())?;
            Self::from_f64(v)
        }
    }
}

/// The rotation generators `e1, e2, e3` of so(3).
#[derive(Clone, Debug)]
pub struct So3Basis {
    pub e1: ComplexMatrix,
    pub e2: ComplexMatrix,
    pub e3: ComplexMatrix,
}

pub fn so3_basis() -> So3Basis {
    let m = |rows: [[f64; 3]; 3]| {
        ComplexMatrix::from_real_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
            .expect("3x3")
    };
    So3Basis {
        e1: m([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]]),
        e2: m([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]),
        e3: m([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]),
    }
}

/// Rotation by `t` about the z axis.
pub fn rotation_z(t: f64) -> ComplexMatrix {
    let (s, co) = t.sin_cos();
    ComplexMatrix::from_real_rows(&[
        vec![co, -s, 0.0],
        vec![s, co, 0.0],
        vec![0.0, 0.0, 1.0],
    ])
    .expect("3x3")
}

/// Irreducible spin-j representation.
#[derive(Clone, Debug)]
pub struct SpinRep {
    twice_j: u32,
    pub j3: ComplexMatrix,
    pub j_plus: ComplexMatrix,
    pub j_minus: ComplexMatrix,
}

impl SpinRep {
    pub fn j(&self) -> HalfInt {
        HalfInt::from_twice(self.twice_j as i32)
    }

    /// `n = 2j`.
    pub fn twice_j(&self) -> u32 {
        self.twice_j
    }

    pub fn dim(&self) -> usize {
        self.twice_j as usize + 1
    }

    /// Labels `m = -j .. j` in basis order.
    pub fn labels(&self) -> Vec<HalfInt> {
        let n = self.twice_j as i32;
        (-n..=n).step_by(2).map(HalfInt::from_twice).collect()
    }

    /// Basis index of label `m`.
    pub fn index_of(&self, m: HalfInt) -> Result<usize> {
        let n = self.twice_j as i32;
        let t = m.twice();
        if t.abs() > n || (t + n) % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "m = {m} is not a label of spin j = {}",
                self.j()
            )));
        }
        Ok(((t + n) / 2) as usize)
    }

    /// `J1 = (J₊ + J₋)/2`.
    pub fn j1(&self) -> ComplexMatrix {
        (&self.j_plus + &self.j_minus).scale(c(0.5, 0.0))
    }

    /// `J2 = (J₊ - J₋)/2i`.
    pub fn j2(&self) -> ComplexMatrix {
        (&self.j_plus - &self.j_minus).scale(c(0.0, -0.5))
    }

    pub fn basis_state(&self, m: HalfInt) -> Result<VectorState> {
        Ok(VectorState::basis(self.dim(), self.index_of(m)?))
    }
}

pub fn build_spin_rep(j: HalfInt) -> Result<SpinRep> {
    if j.twice() < 0 {
        return Err(Error::InvalidArgument(format!("spin j must be >= 0, got {j}")));
    }
    let n = j.twice() as u32;
    let dim = n as usize + 1;
    let j3 = ComplexMatrix::from_fn(dim, |r, col| {
        if r == col {
            c(r as f64 - f64::from(n) / 2.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    // J₊ φ_k = √((n-k)(k+1)) φ_{k+1}
    let j_plus = ComplexMatrix::from_fn(dim, |r, col| {
        if r == col + 1 {
            c((((n as usize - col) * (col + 1)) as f64).sqrt(), 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let j_minus = adjoint(&j_plus);
    Ok(SpinRep {
        twice_j: n,
        j3,
        j_plus,
        j_minus,
    })
}

/// Residuals of the spin ladder relations and commutators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinDefects {
    /// Entry-wise actions of `J₃`, `J₊`, `J₋` including the endpoint zeros.
    pub ladder: f64,
    /// `(J₊)^{j+m} φ_{-j} = √((j+m)!(2j)!/(j-m)!) φ_m`, relative.
    pub raising_chain: f64,
    /// `[J₃, J₊] = J₊`, `[J₃, J₋] = -J₋`, `[J₊, J₋] = 2 J₃`.
    pub commutators: f64,
}

impl SpinDefects {
    pub fn worst(&self) -> f64 {
        self.ladder.max(self.raising_chain).max(self.commutators)
    }
}

pub fn spin_defects(rep: &SpinRep) -> SpinDefects {
    let dim = rep.dim();
    let n = rep.twice_j as usize;
    let zero = || ComplexVector::from_dvector(nalgebra::DVector::zeros(dim));
    let mut ladder = 0.0_f64;
    for (k, m) in rep.labels().into_iter().enumerate() {
        let phi = ComplexVector::basis(dim, k);
        let (jv, mv) = (rep.j().value(), m.value());
        let want3 = phi.scale(c(mv, 0.0));
        let want_plus = if k < n {
            ComplexVector::basis(dim, k + 1).scale(c(((jv - mv) * (jv + mv + 1.0)).sqrt(), 0.0))
        } else {
            zero()
        };
        let want_minus = if k > 0 {
            ComplexVector::basis(dim, k - 1).scale(c(((jv + mv) * (jv - mv + 1.0)).sqrt(), 0.0))
        } else {
            zero()
        };
        ladder = ladder
            .max((&rep.j3.apply(&phi).unwrap() - &want3).norm())
            .max((&rep.j_plus.apply(&phi).unwrap() - &want_plus).norm())
            .max((&rep.j_minus.apply(&phi).unwrap() - &want_minus).norm());
    }
    ladder = ladder.max((&adjoint(&rep.j_plus) - &rep.j_minus).max_abs());

    let mut raising_chain = 0.0_f64;
    let mut v = ComplexVector::basis(dim, 0);
    for k in 0..dim {
        let ln_scale = 0.5 * (ln_factorial(k as u64) + ln_factorial(n as u64) - ln_factorial((n - k) as u64));
        let scale = ln_scale.exp();
        let want = ComplexVector::basis(dim, k).scale(c(scale, 0.0));
        raising_chain = raising_chain.max((&v - &want).norm() / scale);
        v = rep.j_plus.apply(&v).unwrap();
    }

    let comm = |a: &ComplexMatrix, b: &ComplexMatrix| commutator(a, b).expect("dims");
    let two_j3 = rep.j3.scale(c(2.0, 0.0));
    let commutators = (&comm(&rep.j3, &rep.j_plus) - &rep.j_plus)
        .max_abs()
        .max((&comm(&rep.j3, &rep.j_minus) + &rep.j_minus).max_abs())
        .max((&comm(&rep.j_plus, &rep.j_minus) - &two_j3).max_abs());

    SpinDefects {
        ladder,
        raising_chain,
        commutators,
    }
}

/// Point `(θ, γ)` on the unit sphere with the South Pole removed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpherePoint {
    theta: f64,
    gamma: f64,
}

impl SpherePoint {
    /// Requires `θ ∈ [0, π)` and `γ ∈ [0, 2π)`.
    pub fn new(theta: f64, gamma: f64) -> Result<Self> {
        if !(0.0..PI).contains(&theta) {
            return Err(Error::InvalidArgument(format!("theta = {theta} outside [0, pi)")));
        }
        if !(0.0..2.0 * PI).contains(&gamma) {
            return Err(Error::InvalidArgument(format!("gamma = {gamma} outside [0, 2pi)")));
        }
        Ok(Self { theta, gamma })
    }

    /// Point with `sin²(θ/2) = p`.
    pub fn from_probability(p: f64, gamma: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("p = {p} outside [0, 1)")));
        }
        Self::new(2.0 * p.sqrt().asin(), gamma)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `sin²(θ/2)`.
    pub fn probability(&self) -> f64 {
        let s = (self.theta / 2.0).sin();
        s * s
    }

    /// `(sin θ cos γ, sin θ sin γ, cos θ)`.
    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sg, cg) = self.gamma.sin_cos();
        [st * cg, st * sg, ct]
    }
}

/// Coset representative `exp((iθ/2)(sin γ M₁ - cos γ M₂))` in SU(2).
pub fn coset_element(point: &SpherePoint) -> ComplexMatrix {
    let (sg, cg) = point.gamma.sin_cos();
    let m1 = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    let m2 = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]])
        .unwrap();
    let generator = (&m1.scale(c(sg, 0.0)) - &m2.scale(c(cg, 0.0))).scale(c(0.0, point.theta / 2.0));
    matrix_exponential(&generator, DEFAULT_EXP_TOL).expect("2x2 exponential of bounded generator")
}

/// `(φ_m, w(θ, γ))` for `k = j + m`:
/// `√C(n,k) (-sin(θ/2))^k cos(θ/2)^{n-k} e^{-ikγ}`.
///
/// Accepts any `θ`, including the South Pole, so grids can reach `p = 1`.
pub fn spin_coherent_amplitude(twice_j: u32, k: usize, theta: f64, gamma: f64) -> Complex64 {
    let n = twice_j as u64;
    let k64 = k as u64;
    assert!(k64 <= n, "index {k} out of range for 2j = {n}");
    let (s, co) = (theta / 2.0).sin_cos();
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let modulus = if twice_j <= DIRECT_AMPLITUDE_MAX_N {
        binomial(n, k64).sqrt() * s.abs().powi(k as i32) * co.abs().powi((n - k64) as i32)
    } else {
        (0.5 * ln_binomial(n, k64) + xlny(k as f64, s.abs()) + xlny((n - k64) as f64, co.abs())).exp()
    };
    // s >= 0 and co >= 0 on θ ∈ [0, π]; keep signs for angles outside it
    let sign = sign * s.signum().powi(k as i32) * co.signum().powi((n - k64) as i32);
    Complex64::from_polar(sign * modulus, -(k as f64) * gamma)
}

#[derive(Clone, Debug)]
pub struct CoherentStateSpin {
    pub point: SpherePoint,
    pub state: VectorState,
}

pub fn spin_coherent_closed_form(rep: &SpinRep, point: &SpherePoint) -> CoherentStateSpin {
    let v = ComplexVector::new(
        (0..rep.dim())
            .map(|k| spin_coherent_amplitude(rep.twice_j, k, point.theta, point.gamma))
            .collect(),
    )
    .expect("finite amplitudes");
    CoherentStateSpin {
        point: *point,
        state: VectorState::new(v).expect("binomial sum is exactly one"),
    }
}

/// `iθ(sin γ J₁ - cos γ J₂)`.
pub fn spin_displacement_generator(rep: &SpinRep, point: &SpherePoint) -> ComplexMatrix {
    let (sg, cg) = point.gamma.sin_cos();
    (&rep.j1().scale(c(sg, 0.0)) - &rep.j2().scale(c(cg, 0.0))).scale(c(0.0, point.theta))
}

/// `D(ν) = exp(iθ(sin γ J₁ - cos γ J₂))`.
pub fn spin_displacement(rep: &SpinRep, point: &SpherePoint, tol: f64) -> Result<ComplexMatrix> {
    matrix_exponential(&spin_displacement_generator(rep, point), tol)
}

/// `D(ν) φ_{-j}`, cross-checked against the closed form within `10 * tol`.
pub fn spin_coherent_via_exponential(rep: &SpinRep, point: &SpherePoint, tol: f64) -> Result<CoherentStateSpin> {
    let d = spin_displacement(rep, point, tol)?;
    let v = d.column(0);
    let reference = spin_coherent_closed_form(rep, point);
    let residual = distance_up_to_phase(&v, reference.state.vector())?;
    let threshold = 10.0 * tol;
    if !(residual <= threshold) {
        return Err(Error::RouteMismatch {
            residual,
            threshold,
        });
    }
    Ok(CoherentStateSpin {
        point: *point,
        state: VectorState::from_unnormalized(v)?,
    })
}

/// Operator-norm residual of
/// `D(ν) = exp(ζJ₊) exp(ηJ₃) exp(ζ'J₋)` with `ζ = -tan(θ/2) e^{-iγ}`,
/// `η = ln(1 + |ζ|²)`, `ζ' = -ζ*`.
pub fn gauss_decomposition_check(rep: &SpinRep, point: &SpherePoint) -> Result<f64> {
    let half = point.theta / 2.0;
    if half.cos().abs() < GAUSS_MIN_COS_HALF {
        return Err(Error::InvalidArgument(format!(
            "theta = {} too close to the South Pole",
            point.theta
        )));
    }
    let zeta = Complex64::from_polar(-half.tan(), -point.gamma);
    let eta = (1.0 + zeta.norm_sqr()).ln();
    let zeta_prime = -zeta.conj();

    let d = spin_displacement(rep, point, DEFAULT_EXP_TOL)?;
    let f_plus = matrix_exponential(&rep.j_plus.scale(zeta), DEFAULT_EXP_TOL)?;
    let f_3 = matrix_exponential(&rep.j3.scale(c(eta, 0.0)), DEFAULT_EXP_TOL)?;
    let f_minus = matrix_exponential(&rep.j_minus.scale(zeta_prime), DEFAULT_EXP_TOL)?;
    let product = &(&f_plus * &f_3) * &f_minus;
    Ok((&d - &product).operator_norm())
}

/// Binomial view of a spin measurement: `n = 2j`, `k = j + ℓ`, `p = sin²(θ/2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinomialMap {
    pub n: u32,
    pub k: u32,
    pub p: f64,
}

impl BinomialMap {
    pub fn new(rep: &SpinRep, point: &SpherePoint, ell: HalfInt) -> Result<Self> {
        let k = rep.index_of(ell)? as u32;
        Ok(Self {
            n: rep.twice_j,
            k,
            p: point.probability(),
        })
    }

    /// `ℓ = k - j`.
    pub fn label(&self) -> HalfInt {
        HalfInt::from_twice(2 * self.k as i32 - self.n as i32)
    }
}

/// `C(2j, j+ℓ) p^{j+ℓ} (1-p)^{j-ℓ}`.
pub fn binomial_pmf(rep: &SpinRep, point: &SpherePoint, ell: HalfInt) -> Result<f64> {
    let map = BinomialMap::new(rep, point, ell)?;
    Ok(binomial_mass(u64::from(map.n), u64::from(map.k), map.p))
}
