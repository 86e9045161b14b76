//! Truncated Fock space for the Weyl–Heisenberg group.
//!
//! The basis `φ_0 .. φ_{K-1}` is the number-operator eigenbasis cut at `K`.
//! Every identity that involves the top basis vector picks up a truncation
//! artifact because `A† φ_{K-1} = 0`; the functions below report those
//! separately from the bulk relations.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linops::{
    adjoint, c, commutator, distance_up_to_phase, inner_product, matrix_exponential, ComplexMatrix,
    ComplexVector, DEFAULT_EXP_TOL,
};
use crate::pv_measure::VectorState;
use crate::special::{ln_factorial, poisson_mass};

/// Largest tail mass accepted when building a coherent state.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Smallest truncation used by [`FockSpace::for_alpha`].
const MIN_DEFAULT_TRUNCATION: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FockSpace {
    dim: usize,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidArgument(format!(
                "Fock truncation must be at least 2, got {dim}"
            )));
        }
        Ok(Self { dim })
    }

    /// `K = max(64, ⌈|α|² + 12 √(|α|² + 1)⌉)`.
    pub fn for_alpha(alpha: Complex64) -> Self {
        Self {
            dim: default_truncation(alpha),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_state(&self, k: usize) -> VectorState {
        VectorState::basis(self.dim, k)
    }
}

pub fn default_truncation(alpha: Complex64) -> usize {
    let lambda = alpha.norm_sqr();
    let k = (lambda + 12.0 * (lambda + 1.0).sqrt()).ceil() as usize;
    k.max(MIN_DEFAULT_TRUNCATION)
}

/// Annihilation, creation and number matrices on a truncated Fock space.
#[derive(Clone, Debug)]
pub struct LadderRep {
    pub a: ComplexMatrix,
    pub a_dagger: ComplexMatrix,
    pub n: ComplexMatrix,
    pub space: FockSpace,
}

impl LadderRep {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }
}

/// `A φ_k = √k φ_{k-1}`, `A† = adjoint(A)`, `N = A† A`.
pub fn build_ladder(dim: usize) -> Result<LadderRep> {
    let space = FockSpace::new(dim)?;
    let a = ComplexMatrix::from_fn(dim, |i, j| {
        if j == i + 1 {
            c((j as f64).sqrt(), 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let a_dagger = adjoint(&a);
    let n = &a_dagger * &a;
    Ok(LadderRep {
        a,
        a_dagger,
        n,
        space,
    })
}

/// Residuals of the ladder relations on a truncated space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LadderDefects {
    /// Worst entry-wise violation of the annihilation/creation/number actions,
    /// including `A† φ_{K-1} = 0`.
    pub ladder: f64,
    /// `(A†)^k φ_0 = √(k!) φ_k`, measured relative to `√(k!)`.
    pub raising_chain: f64,
    /// `[A, A†] = I` on `span{φ_0 .. φ_{K-2}}`.
    pub commutator_bulk: f64,
    /// `[A, A†] φ_{K-1} = -(K-1) φ_{K-1}`.
    pub commutator_boundary: f64,
}

impl LadderDefects {
    pub fn worst(&self) -> f64 {
        self.ladder
            .max(self.raising_chain)
            .max(self.commutator_bulk)
            .max(self.commutator_boundary)
    }
}

pub fn ladder_defects(rep: &LadderRep) -> LadderDefects {
    let k_dim = rep.dim();
    let mut ladder = 0.0_f64;
    for k in 0..k_dim {
        let phi = ComplexVector::basis(k_dim, k);
        let a_phi = rep.a.apply(&phi).expect("dims");
        let ad_phi = rep.a_dagger.apply(&phi).expect("dims");
        let n_phi = rep.n.apply(&phi).expect("dims");

        let want_a = if k == 0 {
            ComplexVector::from_dvector(nalgebra::DVector::zeros(k_dim))
        } else {
            ComplexVector::basis(k_dim, k - 1).scale(c((k as f64).sqrt(), 0.0))
        };
        let want_ad = if k + 1 < k_dim {
            ComplexVector::basis(k_dim, k + 1).scale(c(((k + 1) as f64).sqrt(), 0.0))
        } else {
            ComplexVector::from_dvector(nalgebra::DVector::zeros(k_dim))
        };
        let want_n = phi.scale(c(k as f64, 0.0));
        ladder = ladder
            .max((&a_phi - &want_a).norm())
            .max((&ad_phi - &want_ad).norm())
            .max((&n_phi - &want_n).norm());
    }
    ladder = ladder.max((&rep.a_dagger - &adjoint(&rep.a)).max_abs());

    // v holds (A†)^k φ_0 / √(k!), divided step by step so that √(k!) never
    // has to be formed for large K
    let mut raising_chain = 0.0_f64;
    let mut v = ComplexVector::basis(k_dim, 0);
    for k in 0..k_dim {
        raising_chain = raising_chain.max((&v - &ComplexVector::basis(k_dim, k)).norm());
        v = rep
            .a_dagger
            .apply(&v)
            .expect("dims")
            .scale(c(1.0 / ((k + 1) as f64).sqrt(), 0.0));
    }

    let comm = commutator(&rep.a, &rep.a_dagger).expect("dims");
    let mut commutator_bulk = 0.0_f64;
    let mut commutator_boundary = 0.0_f64;
    for i in 0..k_dim {
        for j in 0..k_dim {
            let entry = comm.get(i, j);
            if j == k_dim - 1 || i == k_dim - 1 {
                let want = if i == j { -((k_dim - 1) as f64) } else { 0.0 };
                commutator_boundary = commutator_boundary.max((entry - c(want, 0.0)).norm());
            } else {
                let want = if i == j { 1.0 } else { 0.0 };
                commutator_bulk = commutator_bulk.max((entry - c(want, 0.0)).norm());
            }
        }
    }

    LadderDefects {
        ladder,
        raising_chain,
        commutator_bulk,
        commutator_boundary,
    }
}

/// Element `(s; α)` of the Weyl–Heisenberg group.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WHGroupElement {
    pub s: f64,
    pub alpha: Complex64,
}

impl WHGroupElement {
    pub const IDENTITY: Self = Self {
        s: 0.0,
        alpha: Complex64::new(0.0, 0.0),
    };

    pub fn new(s: f64, alpha: Complex64) -> Self {
        Self { s, alpha }
    }

    /// From the real coordinates `(s; x1, x2)` with `α = (-x1 + i x2) / √2`.
    pub fn from_real(s: f64, x1: f64, x2: f64) -> Self {
        Self {
            s,
            alpha: c(-x1, x2) / std::f64::consts::SQRT_2,
        }
    }

    /// `(x1, x2)` recovered from `α`.
    pub fn real_coordinates(&self) -> (f64, f64) {
        let scaled = self.alpha * std::f64::consts::SQRT_2;
        (-scaled.re, scaled.im)
    }

    pub fn inverse(&self) -> Self {
        Self {
            s: -self.s,
            alpha: -self.alpha,
        }
    }
}

/// `(s; α)(t; β) = (s + t + Im(α β*); α + β)`.
pub fn wh_multiply(g1: WHGroupElement, g2: WHGroupElement) -> WHGroupElement {
    WHGroupElement {
        s: g1.s + g2.s + (g1.alpha * g2.alpha.conj()).im,
        alpha: g1.alpha + g2.alpha,
    }
}

/// A coherent state `v(α) = D(α) φ_0` on a truncated space.
#[derive(Clone, Debug)]
pub struct CoherentStateWH {
    pub alpha: Complex64,
    pub state: VectorState,
    /// Poisson mass that falls outside the truncated basis.
    pub tail_mass: f64,
}

/// `(φ_k, v(α)) = e^{-|α|²/2} α^k / √(k!)` for the untruncated state.
pub fn coherent_amplitude(alpha: Complex64, k: usize) -> Complex64 {
    let lambda = alpha.norm_sqr();
    if lambda == 0.0 {
        return if k == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) };
    }
    let log_mod = -0.5 * lambda + k as f64 * alpha.norm().ln() - 0.5 * ln_factorial(k as u64);
    Complex64::from_polar(log_mod.exp(), k as f64 * alpha.arg())
}

/// `1 - Σ_{k<K} e^{-λ} λ^k / k!`, summed from whichever side avoids
/// cancellation.
pub fn poisson_tail_mass(alpha: Complex64, dim: usize) -> f64 {
    let lambda = alpha.norm_sqr();
    if lambda == 0.0 {
        return 0.0;
    }
    if (dim as f64) > lambda {
        let mut acc = 0.0;
        let mut k = dim as u64;
        loop {
            let term = poisson_mass(lambda, k);
            acc += term;
            if term == 0.0 || term < acc * 1e-18 {
                break;
            }
            k += 1;
        }
        acc
    } else {
        let head: f64 = (0..dim as u64).map(|k| poisson_mass(lambda, k)).sum();
        (1.0 - head).max(0.0)
    }
}

fn closed_form_vector(alpha: Complex64, dim: usize) -> Result<ComplexVector> {
    let raw = ComplexVector::new((0..dim).map(|k| coherent_amplitude(alpha, k)).collect())?;
    raw.normalized()
}

/// Coherent state from the series `e^{-|α|²/2} Σ α^k/√(k!) φ_k`, truncated
/// and renormalized.
pub fn coherent_closed_form(alpha: Complex64, space: &FockSpace) -> Result<CoherentStateWH> {
    coherent_closed_form_with_tail_tol(alpha, space, DEFAULT_TAIL_TOL)
}

pub fn coherent_closed_form_with_tail_tol(
    alpha: Complex64,
    space: &FockSpace,
    tail_tol: f64,
) -> Result<CoherentStateWH> {
    let tail_mass = poisson_tail_mass(alpha, space.dim());
    if tail_mass > tail_tol {
        return Err(Error::TruncationInsufficient {
            dim: space.dim(),
            tail_mass,
            tolerance: tail_tol,
        });
    }
    let state = VectorState::new(closed_form_vector(alpha, space.dim())?)?;
    Ok(CoherentStateWH {
        alpha,
        state,
        tail_mass,
    })
}

/// `α A† - α* A`.
pub fn displacement_generator(alpha: Complex64, rep: &LadderRep) -> ComplexMatrix {
    &rep.a_dagger.scale(alpha) - &rep.a.scale(alpha.conj())
}

/// `D(α) = exp(α A† - α* A)` on the truncated space.
pub fn displacement_operator(alpha: Complex64, rep: &LadderRep, tol: f64) -> Result<ComplexMatrix> {
    matrix_exponential(&displacement_generator(alpha, rep), tol)
}

/// Coherent state as `D(α) φ_0`, cross-checked against the closed form.
///
/// Fails with [`Error::RouteMismatch`] when the two routes differ by more than
/// `10 * tol` up to a global phase, which signals that `K` is too small for
/// this `α`.
pub fn coherent_via_exponential(alpha: Complex64, rep: &LadderRep, tol: f64) -> Result<CoherentStateWH> {
    let d = displacement_operator(alpha, rep, tol)?;
    let v = d.column(0);
    let reference = closed_form_vector(alpha, rep.dim())?;
    let residual = distance_up_to_phase(&v, &reference)?;
    let threshold = 10.0 * tol;
    if !(residual <= threshold) {
        return Err(Error::RouteMismatch {
            residual,
            threshold,
        });
    }
    Ok(CoherentStateWH {
        alpha,
        state: VectorState::from_unnormalized(v)?,
        tail_mass: poisson_tail_mass(alpha, rep.dim()),
    })
}

/// `‖e^{O₁} e^{O₂} φ_0 - e^{[O₁,O₂]/2} e^{O₁+O₂} φ_0‖` with `O₁ = α A†`,
/// `O₂ = -α* A`, both sides exponentiated independently.
pub fn bch_check(alpha: Complex64, rep: &LadderRep) -> Result<f64> {
    let o1 = rep.a_dagger.scale(alpha);
    let o2 = rep.a.scale(-alpha.conj());
    let phi0 = ComplexVector::basis(rep.dim(), 0);

    let lhs = matrix_exponential(&o1, DEFAULT_EXP_TOL)?
        .apply(&matrix_exponential(&o2, DEFAULT_EXP_TOL)?.apply(&phi0)?)?;

    let half_comm = commutator(&o1, &o2)?.scale(c(0.5, 0.0));
    let sum = &o1 + &o2;
    let rhs = matrix_exponential(&half_comm, DEFAULT_EXP_TOL)?
        .apply(&matrix_exponential(&sum, DEFAULT_EXP_TOL)?.apply(&phi0)?)?;
    Ok((&lhs - &rhs).norm())
}

/// `e^{-|α|²} (|α|²)^n / n!`.
pub fn poisson_pmf(alpha: Complex64, n: u64) -> f64 {
    poisson_mass(alpha.norm_sqr(), n)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TranslationCheck {
    /// `|(v(β+α), D(β) v(α))|`.
    pub state_overlap: f64,
    /// `(v(β+α), D(β) v(α))` divided by its modulus.
    pub phase: Complex64,
}

impl TranslationCheck {
    /// `e^{i Im(β α*)}`.
    pub fn expected_phase(alpha: Complex64, beta: Complex64) -> Complex64 {
        Complex64::from_polar(1.0, (beta * alpha.conj()).im)
    }
}

/// Applies `D(β)` to `v(α)` and compares with `v(β+α)`.
pub fn displacement_translation_check(
    alpha: Complex64,
    beta: Complex64,
    rep: &LadderRep,
) -> Result<TranslationCheck> {
    let v_alpha = coherent_closed_form(alpha, &rep.space)?;
    let v_sum = coherent_closed_form(alpha + beta, &rep.space)?;
    let d_beta = displacement_operator(beta, rep, DEFAULT_EXP_TOL)?;
    let moved = d_beta.apply(v_alpha.state.vector())?;
    let overlap = inner_product(v_sum.state.vector(), &moved)?;
    let state_overlap = overlap.norm();
    Ok(TranslationCheck {
        state_overlap,
        phase: overlap / state_overlap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_k2_matrices() {
        let rep = build_ladder(2).unwrap();
        let a = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(rep.a, a);
        assert_eq!(rep.n, ComplexMatrix::from_real_diagonal(&[0.0, 1.0]));
        assert!(build_ladder(1).is_err());
    }

    #[test]
    fn ladder_relations_hold_exactly() {
        for k in [2, 5, 8, 64] {
            let rep = build_ladder(k).unwrap();
            let d = ladder_defects(&rep);
            assert!(d.ladder < 1e-12, "K={k}: {d:?}");
            assert!(d.raising_chain < 1e-12, "K={k}: {d:?}");
            assert!(d.commutator_bulk < 1e-12, "K={k}: {d:?}");
            assert!(d.commutator_boundary < 1e-12, "K={k}: {d:?}");
        }
    }

    #[test]
    fn truncated_commutator_k8() {
        let rep = build_ladder(8).unwrap();
        let comm = commutator(&rep.a, &rep.a_dagger).unwrap();
        let mut want = vec![1.0; 8];
        want[7] = -7.0;
        assert!((&comm - &ComplexMatrix::from_real_diagonal(&want)).max_abs() < 1e-12);
    }

    #[test]
    fn adjoint_of_a_is_a_dagger_entrywise() {
        let rep = build_ladder(6).unwrap();
        for k in 0..5 {
            assert_eq!(rep.a_dagger.get(k + 1, k), c(((k + 1) as f64).sqrt(), 0.0));
        }
        assert_eq!(adjoint(&rep.a), rep.a_dagger);
    }

    #[test]
    fn group_law() {
        let g = WHGroupElement::new(0.3, c(1.0, -2.0));
        assert_eq!(wh_multiply(g, WHGroupElement::IDENTITY), g);
        assert_eq!(wh_multiply(WHGroupElement::IDENTITY, g), g);
        let p = wh_multiply(WHGroupElement::new(0.0, c(1.0, 0.0)), WHGroupElement::new(0.0, c(0.0, 1.0)));
        assert_eq!(p, WHGroupElement::new(-1.0, c(1.0, 1.0)));
        assert_eq!(wh_multiply(g, g.inverse()), WHGroupElement::IDENTITY);
    }

    #[test]
    fn real_and_complex_group_laws_agree() {
        let (s, x1, x2) = (0.4, 1.1, -0.3);
        let (t, y1, y2) = (-0.2, 0.5, 2.0);
        let real_s = s + t + 0.5 * (x1 * y2 - y1 * x2);
        let prod = wh_multiply(WHGroupElement::from_real(s, x1, x2), WHGroupElement::from_real(t, y1, y2));
        assert!((prod.s - real_s).abs() < 1e-15);
        let (z1, z2) = prod.real_coordinates();
        assert!((z1 - (x1 + y1)).abs() < 1e-15 && (z2 - (x2 + y2)).abs() < 1e-15);
    }

    #[test]
    fn vacuum_coherent_state() {
        let space = FockSpace::new(16).unwrap();
        let v = coherent_closed_form(c(0.0, 0.0), &space).unwrap();
        assert_eq!(v.state.vector(), &ComplexVector::basis(16, 0));
        assert_eq!(v.tail_mass, 0.0);
    }

    #[test]
    fn closed_form_squared_coefficients_are_poisson() {
        let alpha = c(0.8, -1.1);
        for n in 0..20 {
            let amp = coherent_amplitude(alpha, n);
            assert!((amp.norm_sqr() - poisson_pmf(alpha, n as u64)).abs() < 1e-15);
        }
    }

    #[test]
    fn tail_mass_for_alpha_one() {
        let space = FockSpace::new(64).unwrap();
        let v = coherent_closed_form(c(1.0, 0.0), &space).unwrap();
        assert!(v.tail_mass < 1e-15);
        // direct oracle: first omitted term dominates
        let first: f64 = (-1.0 - ln_factorial(64)).exp();
        assert!(v.tail_mass >= first && v.tail_mass < 2.0 * first);
    }

    #[test]
    fn closed_form_rejects_short_truncation() {
        let space = FockSpace::new(8).unwrap();
        assert!(matches!(
            coherent_closed_form(c(3.0, 0.0), &space),
            Err(Error::TruncationInsufficient { .. })
        ));
    }

    #[test]
    fn exponential_route_matches_closed_form() {
        let rep = build_ladder(64).unwrap();
        let v = coherent_via_exponential(c(0.0, 0.0), &rep, 1e-12).unwrap();
        assert!((v.state.vector().get(0) - c(1.0, 0.0)).norm() < 1e-15);

        let e = coherent_via_exponential(c(1.0, 0.0), &rep, 1e-12).unwrap();
        let cf = coherent_closed_form(c(1.0, 0.0), &rep.space).unwrap();
        assert!(distance_up_to_phase(e.state.vector(), cf.state.vector()).unwrap() < 1e-10);

        let rep = build_ladder(128).unwrap();
        let e = coherent_via_exponential(c(0.0, 2.0), &rep, 1e-12).unwrap();
        let cf = coherent_closed_form(c(0.0, 2.0), &rep.space).unwrap();
        assert!(distance_up_to_phase(e.state.vector(), cf.state.vector()).unwrap() < 1e-10);
    }

    #[test]
    fn exponential_route_flags_short_truncation() {
        let rep = build_ladder(6).unwrap();
        assert!(matches!(
            coherent_via_exponential(c(2.0, 0.0), &rep, 1e-12),
            Err(Error::RouteMismatch { .. })
        ));
    }

    #[test]
    fn bch_residuals() {
        let rep = build_ladder(64).unwrap();
        assert_eq!(bch_check(c(0.0, 0.0), &rep).unwrap(), 0.0);
        assert!(bch_check(c(1.0, 0.0), &rep).unwrap() < 1e-10);
        let small = build_ladder(16).unwrap();
        assert!(bch_check(c(3.0, 0.0), &small).unwrap() > 1e-3);
    }

    #[test]
    fn poisson_values() {
        assert_eq!(poisson_pmf(c(0.0, 0.0), 0), 1.0);
        assert!((poisson_pmf(c(1.0, 0.0), 1) - 0.367_879_441_171_442_3).abs() < 1e-15);
        assert!((poisson_pmf(c(2.0, 0.0), 4) - 0.195_366_814_813_165_4).abs() < 1e-15);
        // inner-product route
        let space = FockSpace::new(64).unwrap();
        let v = coherent_closed_form(c(0.0, 2.0), &space).unwrap();
        let amp = inner_product(&ComplexVector::basis(64, 4), v.state.vector()).unwrap();
        assert!((amp.norm_sqr() - poisson_pmf(c(0.0, 2.0), 4)).abs() < 1e-12);
    }

    #[test]
    fn translation_phase() {
        let rep = build_ladder(64).unwrap();
        let t = displacement_translation_check(c(0.7, 0.1), c(0.0, 0.0), &rep).unwrap();
        assert!((t.state_overlap - 1.0).abs() < 1e-12);
        assert!((t.phase - c(1.0, 0.0)).norm() < 1e-12);

        let t = displacement_translation_check(c(1.0, 0.0), c(0.0, 1.0), &rep).unwrap();
        assert!((t.state_overlap - 1.0).abs() < 1e-8);
        assert!((t.phase - Complex64::from_polar(1.0, 1.0)).norm() < 1e-8);

        let t = displacement_translation_check(c(0.0, 1.0), c(0.0, 1.0), &rep).unwrap();
        assert!((t.phase - c(1.0, 0.0)).norm() < 1e-8);
        assert_eq!(
            TranslationCheck::expected_phase(c(0.0, 1.0), c(0.0, 1.0)),
            c(1.0, 0.0)
        );
    }

    #[test]
    fn default_truncation_rule() {
        assert_eq!(default_truncation(c(1.0, 0.0)), 64);
        // λ = 100: 100 + 12 √101 = 220.6
        assert_eq!(default_truncation(c(10.0, 0.0)), 221);
    }
}
