//! The `family`, `infer` and `verify` commands.

use std::f64::consts::PI;

use cohstat_core::fock::{
    bch_check, build_ladder, coherent_via_exponential, default_truncation, displacement_translation_check,
    ladder_defects, poisson_pmf, poisson_tail_mass, TranslationCheck,
};
use cohstat_core::inference::{
    analytic_binomial, analytic_poisson, credible_interval, default_radial_cutoff, infer_via_pov, lambda_grid,
    minimal_sphere_orders, p_grid, plane_quadrature, resolution_of_identity_check,
    resolution_of_identity_check_on, sphere_quadrature, InferredDistribution,
};
use cohstat_core::linops::{commutator, matrix_exponential, ComplexMatrix};
use cohstat_core::pv_measure::{born_probability, example_observable, example_state_psi0, example_state_xi, pv_from_observable};
use cohstat_core::special::binomial_mass;
use cohstat_core::spin::{build_spin_rep, gauss_decomposition_check, so3_basis, spin_defects};
use cohstat_core::{CoherentFamily, Complex64, Error as CoreError, FockSpace, HalfInt, SpherePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::{num, Report};

pub const BCH_THRESHOLD: f64 = 1e-10;
pub const GAUSS_THRESHOLD: f64 = 1e-9;
pub const TRANSLATION_THRESHOLD: f64 = 1e-8;
pub const SPIN_IDENTITY_THRESHOLD: f64 = 1e-12;
pub const WH_IDENTITY_THRESHOLD: f64 = 1e-8;
pub const LADDER_THRESHOLD: f64 = 1e-12;
pub const EXAMPLE12_THRESHOLD: f64 = 1e-14;

/// Fock sizes swept by the ladder check when `--trunc` is absent.
const LADDER_SIZES: [usize; 4] = [2, 8, 64, 256];
/// Largest `2j` swept by the ladder check.
const LADDER_MAX_TWICE_J: u32 = 50;
/// Largest `2j` swept by the Gauss check.
const GAUSS_MAX_TWICE_J: u32 = 20;
/// Gauss points are drawn from the cap `θ < π/3`. The factors grow like
/// `cos(θ/2)^{-2j}` and their product cancels back to a unitary, so the
/// floating-point residual at `j = 10` passes `1e-9` only up to about `0.35π`.
const GAUSS_MAX_THETA: f64 = PI / 3.0;
const IDENTITY_SPINS: [u32; 4] = [1, 2, 4, 10];
const WH_IDENTITY_TRUNC: usize = 32;
const WH_IDENTITY_RADIUS: f64 = 10.0;
const WH_IDENTITY_BASIS: usize = 20;
const TRANSLATION_MAX_MODULUS: f64 = 2.0;
const DEFAULT_GAUSS_POINTS: usize = 20;
const DEFAULT_TRANSLATION_PAIRS: usize = 10;
const DEFAULT_BCH_ALPHA: f64 = 1.0;
const DEFAULT_BCH_TRUNC: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FamilyKind {
    Poisson { lambda: f64 },
    Binomial { n: u32, p: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InferKind {
    Poisson { observed: u64 },
    Binomial { n: u32, k: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum CheckName {
    Ladder,
    Bch,
    Gauss,
    Identity,
    Translation,
    Example12,
    All,
}

impl CheckName {
    pub fn label(self) -> &'static str {
        match self {
            CheckName::Ladder => "ladder",
            CheckName::Bch => "bch",
            CheckName::Gauss => "gauss",
            CheckName::Identity => "identity",
            CheckName::Translation => "translation",
            CheckName::Example12 => "example12",
            CheckName::All => "all",
        }
    }
}

/// Optional knobs for individual checks.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct VerifyParams {
    /// Real displacement for `bch`.
    pub alpha: Option<f64>,
    /// Restricts `gauss` and `identity` to one spin.
    pub spin: Option<HalfInt>,
    /// Sample count for `gauss` and `translation`.
    pub points: Option<usize>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn cmd_family(kind: FamilyKind, config: &RunConfig) -> Result<Report> {
    match kind {
        FamilyKind::Poisson { lambda } => family_poisson(lambda, config),
        FamilyKind::Binomial { n, p } => family_binomial(n, p, config),
    }
}

fn family_poisson(lambda: f64, config: &RunConfig) -> Result<Report> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(usage(format!("--lambda must be a finite number >= 0, got {lambda}")));
    }
    let alpha = Complex64::new(lambda.sqrt(), 0.0);
    let dim = config.trunc.unwrap_or_else(|| default_truncation(alpha));
    let tail_mass = poisson_tail_mass(alpha, dim);
    if tail_mass > config.tail_tol {
        return Err(CoreError::TruncationInsufficient {
            dim,
            tail_mass,
            tolerance: config.tail_tol,
        }
        .into());
    }
    let rep = build_ladder(dim)?;
    let state = coherent_via_exponential(alpha, &rep, config.tol)?;
    let amplitudes = state.state.vector().entries();

    let mut report = Report::new(
        "family poisson",
        vec!["outcome", "probability", "closed_form", "abs_diff"],
    );
    let mut max_diff = 0.0_f64;
    for (n, amplitude) in amplitudes.iter().enumerate().take(dim) {
        let got = amplitude.norm_sqr();
        let want = poisson_pmf(alpha, n as u64);
        let diff = (got - want).abs();
        max_diff = max_diff.max(diff);
        report.push_row(vec![
            ("outcome", json!(n)),
            ("probability", num(got)),
            ("closed_form", num(want)),
            ("abs_diff", num(diff)),
        ]);
        let next = n + 1;
        if next as f64 > lambda && poisson_pmf(alpha, next as u64) < config.tail_tol {
            break;
        }
    }
    report.footer_entry("max_abs_diff", num(max_diff));
    report.footer_entry("lambda", num(lambda));
    report.footer_entry("trunc", json!(dim));
    report.footer_entry("tail_mass", num(tail_mass));
    Ok(report)
}

fn family_binomial(n: u32, p: f64, config: &RunConfig) -> Result<Report> {
    if !(0.0..=1.0).contains(&p) {
        return Err(usage(format!("--p must lie in [0, 1], got {p}")));
    }
    let twice_j = i32::try_from(n).map_err(|_| usage(format!("--n too large: {n}")))?;
    let rep = build_spin_rep(HalfInt::from_twice(twice_j))?;
    let theta = 2.0 * p.sqrt().asin();
    // γ = 0 leaves iθ(sin γ J₁ - cos γ J₂) = -iθ J₂, defined up to θ = π
    let generator = rep.j2().scale(Complex64::new(0.0, -theta));
    let d = matrix_exponential(&generator, config.tol)?;
    let column = d.column(0);

    let mut report = Report::new(
        "family binomial",
        vec!["outcome", "spin_label", "probability", "closed_form", "abs_diff"],
    );
    let mut max_diff = 0.0_f64;
    for (k, label) in rep.labels().into_iter().enumerate() {
        let got = column.get(k).norm_sqr();
        let want = binomial_mass(u64::from(n), k as u64, p);
        let diff = (got - want).abs();
        max_diff = max_diff.max(diff);
        report.push_row(vec![
            ("outcome", json!(k)),
            ("spin_label", json!(label.to_string())),
            ("probability", num(got)),
            ("closed_form", num(want)),
            ("abs_diff", num(diff)),
        ]);
    }
    report.footer_entry("max_abs_diff", num(max_diff));
    report.footer_entry("n", json!(n));
    report.footer_entry("p", num(p));
    report.footer_entry("spin_j", json!(rep.j().to_string()));
    report.footer_entry("theta", num(theta));
    Ok(report)
}

pub fn cmd_infer(kind: InferKind, config: &RunConfig) -> Result<Report> {
    let (command, pov, analytic) = match kind {
        InferKind::Poisson { observed } => {
            let index = usize::try_from(observed).map_err(|_| usage("--observed too large"))?;
            let grid = lambda_grid(observed, config.lambda_points);
            let lambda_max = *grid.last().expect("grid has points");
            let radius = config.radial_cutoff.unwrap_or_else(|| default_radial_cutoff(lambda_max));
            let dim = config.trunc.unwrap_or((index + 1).max(2));
            let family = CoherentFamily::WeylHeisenberg(FockSpace::new(dim)?);
            let rule = plane_quadrature(radius, config.radial_nodes, config.angular_nodes)?;
            let pov = infer_via_pov(index, &family, &rule, &grid)?;
            ("infer poisson", pov, analytic_poisson(observed, &grid)?)
        }
        InferKind::Binomial { n, k } => {
            if k > n {
                return Err(usage(format!("--k = {k} exceeds --n = {n}")));
            }
            let grid = p_grid(config.p_points);
            let (min_theta, min_gamma) = minimal_sphere_orders(n);
            let rule = sphere_quadrature(
                n,
                config.sphere_theta_nodes.unwrap_or(min_theta),
                config.sphere_gamma_nodes.unwrap_or(min_gamma),
            )?;
            let family = CoherentFamily::Spin { twice_j: n };
            let pov = infer_via_pov(k as usize, &family, &rule, &grid)?;
            (
                "infer binomial",
                pov,
                analytic_binomial(u64::from(n), u64::from(k), &grid)?,
            )
        }
    };

    let mut report = Report::new(
        command,
        vec!["parameter", "density_pov", "density_analytic", "abs_diff"],
    );
    for ((x, a), b) in pov.grid.iter().zip(&pov.density).zip(&analytic.density) {
        report.push_row(vec![
            ("parameter", num(*x)),
            ("density_pov", num(*a)),
            ("density_analytic", num(*b)),
            ("abs_diff", num((a - b).abs())),
        ]);
    }
    report.footer_entry("parameter", json!(pov.parameter.name()));
    report.footer_entry("sup_norm", num(pov.sup_distance(&analytic)?));
    report.footer_entry("total_mass_pov", num(pov.total_mass));
    report.footer_entry("total_mass_analytic", num(analytic.total_mass));
    report.footer_entry(
        "credible_intervals",
        Value::Array(
            config
                .credible_masses
                .iter()
                .map(|&m| interval_record(m, &pov, &analytic))
                .collect::<Result<_>>()?,
        ),
    );
    Ok(report)
}

fn interval_record(mass: f64, pov: &InferredDistribution, analytic: &InferredDistribution) -> Result<Value> {
    let (pl, ph) = credible_interval(pov, mass)?;
    let (al, ah) = credible_interval(analytic, mass)?;
    Ok(json!({
        "mass": num(mass),
        "pov": [num(pl), num(ph)],
        "analytic": [num(al), num(ah)],
    }))
}

const VERIFY_COLUMNS: [&str; 6] = ["check", "params", "residual", "threshold", "pass", "detail"];

/// One outcome of a residual computation; errors become failing rows.
struct Outcome {
    params: String,
    residual: std::result::Result<f64, CoreError>,
    threshold: f64,
}

impl Outcome {
    fn new(params: String, residual: std::result::Result<f64, CoreError>, threshold: f64) -> Self {
        Self {
            params,
            residual,
            threshold,
        }
    }
}

fn push_outcome(report: &mut Report, check: &'static str, o: Outcome) {
    let (residual, pass, detail) = match o.residual {
        Ok(r) => (num(r), r <= o.threshold, String::new()),
        Err(e) => (Value::Null, false, e.to_string()),
    };
    report.passed &= pass;
    report.push_row(vec![
        ("check", json!(check)),
        ("params", json!(o.params)),
        ("residual", residual),
        ("threshold", num(o.threshold)),
        ("pass", json!(pass)),
        ("detail", json!(detail)),
    ]);
}

pub fn cmd_verify(check: CheckName, params: VerifyParams, config: &RunConfig) -> Result<Report> {
    if let Some(a) = params.alpha {
        if !a.is_finite() {
            return Err(usage(format!("--alpha must be finite, got {a}")));
        }
    }
    if params.points == Some(0) {
        return Err(usage("--points must be positive"));
    }
    if let Some(j) = params.spin {
        if j.twice() < 0 {
            return Err(usage(format!("--spin must be >= 0, got {j}")));
        }
    }
    let mut report = Report::new(format!("verify {}", check.label()), VERIFY_COLUMNS.to_vec());
    let checks: &[CheckName] = match check {
        CheckName::All => &[
            CheckName::Example12,
            CheckName::Ladder,
            CheckName::Bch,
            CheckName::Gauss,
            CheckName::Identity,
            CheckName::Translation,
        ],
        _ => std::slice::from_ref(&check),
    };
    for &c in checks {
        let outcomes = match c {
            CheckName::Example12 => check_example12(),
            CheckName::Ladder => check_ladder(config),
            CheckName::Bch => check_bch(params, config),
            CheckName::Gauss => check_gauss(params, config),
            CheckName::Identity => check_identity(params, config),
            CheckName::Translation => check_translation(params, config),
            CheckName::All => unreachable!("expanded above"),
        };
        for o in outcomes {
            push_outcome(&mut report, c.label(), o);
        }
    }
    let failures = report.rows.iter().filter(|r| r["pass"] == json!(false)).count();
    report.footer_entry("all_pass", json!(report.passed));
    report.footer_entry("checks", json!(report.rows.len()));
    report.footer_entry("failures", json!(failures));
    Ok(report)
}

fn check_example12() -> Vec<Outcome> {
    let pv = pv_from_observable(&example_observable());
    let cases = [
        ("xi", example_state_xi(), [1.0 / 14.0, 4.0 / 14.0, 9.0 / 14.0]),
        ("psi0", example_state_psi0(), [0.25, 0.5, 0.25]),
    ];
    let mut out = Vec::new();
    for (name, state, want) in cases {
        for (outcome, w) in [1.0, 0.0, -1.0].into_iter().zip(want) {
            let residual = born_probability(&state, &pv, outcome).map(|p| (p - w).abs());
            out.push(Outcome::new(
                format!("state={name} outcome={outcome} expected={w:.17}"),
                residual,
                EXAMPLE12_THRESHOLD,
            ));
        }
    }
    out
}

fn check_ladder(config: &RunConfig) -> Vec<Outcome> {
    let mut out = Vec::new();
    let sizes: Vec<usize> = match config.trunc {
        Some(k) => vec![k],
        None => LADDER_SIZES.to_vec(),
    };
    for k in sizes {
        match build_ladder(k) {
            Ok(rep) => {
                let d = ladder_defects(&rep);
                for (relation, r) in [
                    ("ladder", d.ladder),
                    ("raising_chain", d.raising_chain),
                    ("commutator_bulk", d.commutator_bulk),
                    ("commutator_boundary", d.commutator_boundary),
                ] {
                    out.push(Outcome::new(format!("wh K={k} relation={relation}"), Ok(r), LADDER_THRESHOLD));
                }
            }
            Err(e) => out.push(Outcome::new(format!("wh K={k}"), Err(e), LADDER_THRESHOLD)),
        }
    }
    for twice_j in 0..=LADDER_MAX_TWICE_J {
        let j = HalfInt::from_twice(twice_j as i32);
        let residual = build_spin_rep(j).map(|rep| spin_defects(&rep).worst());
        out.push(Outcome::new(format!("spin j={j}"), residual, LADDER_THRESHOLD));
    }
    out.push(Outcome::new("so3 structure constants".into(), Ok(so3_residual()), LADDER_THRESHOLD));
    out
}

/// `max` over cyclic pairs of `|[e_a, e_b] - e_c|`.
fn so3_residual() -> f64 {
    let b = so3_basis();
    let cyc: [(&ComplexMatrix, &ComplexMatrix, &ComplexMatrix); 3] =
        [(&b.e1, &b.e2, &b.e3), (&b.e2, &b.e3, &b.e1), (&b.e3, &b.e1, &b.e2)];
    cyc.iter()
        .map(|(x, y, z)| (&commutator(x, y).expect("3x3") - z).max_abs())
        .fold(0.0, f64::max)
}

fn check_bch(params: VerifyParams, config: &RunConfig) -> Vec<Outcome> {
    let alpha = params.alpha.unwrap_or(DEFAULT_BCH_ALPHA);
    let k = config.trunc.unwrap_or(DEFAULT_BCH_TRUNC);
    let residual = build_ladder(k).and_then(|rep| bch_check(Complex64::new(alpha, 0.0), &rep));
    vec![Outcome::new(format!("alpha={alpha} K={k}"), residual, BCH_THRESHOLD)]
}

fn sample_sphere_points(rng: &mut ChaCha8Rng, count: usize) -> Vec<SpherePoint> {
    (0..count)
        .map(|_| {
            let theta = rng.random_range(0.0..GAUSS_MAX_THETA);
            let gamma = rng.random_range(0.0..2.0 * PI);
            SpherePoint::new(theta, gamma).expect("sampled inside the chart")
        })
        .collect()
}

fn check_gauss(params: VerifyParams, config: &RunConfig) -> Vec<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let count = params.points.unwrap_or(DEFAULT_GAUSS_POINTS);
    let points = sample_sphere_points(&mut rng, count);
    let spins: Vec<u32> = match params.spin {
        Some(j) => vec![j.twice() as u32],
        None => (1..=GAUSS_MAX_TWICE_J).collect(),
    };
    spins
        .into_iter()
        .map(|twice_j| {
            let j = HalfInt::from_twice(twice_j as i32);
            let residual = build_spin_rep(j).and_then(|rep| {
                points
                    .iter()
                    .map(|pt| gauss_decomposition_check(&rep, pt))
                    .try_fold(0.0_f64, |acc, r| r.map(|r| acc.max(r)))
            });
            Outcome::new(
                format!("j={j} points={count} theta_max=pi/3 seed={}", config.seed),
                residual,
                GAUSS_THRESHOLD,
            )
        })
        .collect()
}

fn check_identity(params: VerifyParams, config: &RunConfig) -> Vec<Outcome> {
    let spins: Vec<u32> = match params.spin {
        Some(j) => vec![j.twice() as u32],
        None => IDENTITY_SPINS.to_vec(),
    };
    let mut out: Vec<Outcome> = spins
        .into_iter()
        .map(|twice_j| {
            let (min_theta, min_gamma) = minimal_sphere_orders(twice_j);
            let n_theta = config.sphere_theta_nodes.unwrap_or(min_theta);
            let n_gamma = config.sphere_gamma_nodes.unwrap_or(min_gamma);
            let residual = sphere_quadrature(twice_j, n_theta, n_gamma)
                .and_then(|rule| resolution_of_identity_check(&CoherentFamily::Spin { twice_j }, &rule));
            Outcome::new(
                format!(
                    "spin j={} n_theta={n_theta} n_gamma={n_gamma}",
                    HalfInt::from_twice(twice_j as i32)
                ),
                residual,
                SPIN_IDENTITY_THRESHOLD,
            )
        })
        .collect();

    let k = config.trunc.unwrap_or(WH_IDENTITY_TRUNC);
    let radius = config.radial_cutoff.unwrap_or(WH_IDENTITY_RADIUS);
    let basis = WH_IDENTITY_BASIS.min(k);
    let residual = FockSpace::new(k).and_then(|space| {
        let rule = plane_quadrature(radius, config.radial_nodes, config.angular_nodes)?;
        resolution_of_identity_check_on(&CoherentFamily::WeylHeisenberg(space), &rule, basis)
    });
    out.push(Outcome::new(
        format!(
            "wh K={k} R={radius} n_r={} n_angle={} basis={basis}",
            config.radial_nodes, config.angular_nodes
        ),
        residual,
        WH_IDENTITY_THRESHOLD,
    ));
    out
}

fn sample_disk(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    Complex64::from_polar(r, rng.random_range(0.0..2.0 * PI))
}

fn check_translation(params: VerifyParams, config: &RunConfig) -> Vec<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let count = params.points.unwrap_or(DEFAULT_TRANSLATION_PAIRS);
    let worst = Complex64::new(2.0 * TRANSLATION_MAX_MODULUS, 0.0);
    let k = config.trunc.unwrap_or_else(|| default_truncation(worst));
    let rep = match build_ladder(k) {
        Ok(rep) => rep,
        Err(e) => return vec![Outcome::new(format!("K={k}"), Err(e), TRANSLATION_THRESHOLD)],
    };
    (0..count)
        .map(|i| {
            let alpha = sample_disk(&mut rng, TRANSLATION_MAX_MODULUS);
            let beta = sample_disk(&mut rng, TRANSLATION_MAX_MODULUS);
            let residual = displacement_translation_check(alpha, beta, &rep).map(|t| {
                let phase_err = (t.phase - TranslationCheck::expected_phase(alpha, beta)).norm();
                phase_err.max((1.0 - t.state_overlap).abs())
            });
            Outcome::new(
                format!(
                    "pair={i} alpha={:.6}{:+.6}i beta={:.6}{:+.6}i K={k}",
                    alpha.re, alpha.im, beta.re, beta.im
                ),
                residual,
                TRANSLATION_THRESHOLD,
            )
        })
        .collect()
}
