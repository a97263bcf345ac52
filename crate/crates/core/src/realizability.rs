//! Decision procedures on a [`BilinearQsde`].
//!
//! * [`check_physical_realizability`] evaluates the four realizability
//!   conditions and recovers `(α, Λ)` when they hold.
//! * [`check_ccr_preservation`] evaluates the reduced matrix conditions for
//!   preservation of `[xᵢ, xⱼ] = 2i Σ εᵢⱼₖ xₖ`.
//! * [`theorem3_harness`] samples realizable systems and confirms that they
//!   preserve the commutation relations.
//!
//! Residuals are Frobenius norms and verdicts compare them against an
//! absolute tolerance.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::Matrix3;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{e_matrix, theta, vec, RealMat3, RealRow3};
use crate::model::{realize, BilinearQsde, PhysicalParams};
use crate::sampling;

/// The realizability conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum RealizabilityCondition {
    /// `F0 = ½(G1 + iG2)(H1 + iH2)†`
    #[serde(rename = "T1-i")]
    DriftConstant,
    /// `G1 = Θ(H2)`
    #[serde(rename = "T1-ii")]
    NoiseOne,
    /// `G2 = −Θ(H1)`
    #[serde(rename = "T1-iii")]
    NoiseTwo,
    /// `F + Fᵀ + G1G1ᵀ + G2G2ᵀ = 0`
    #[serde(rename = "T1-iv")]
    DriftBalance,
}

impl RealizabilityCondition {
    pub const ALL: [Self; 4] = [Self::DriftConstant, Self::NoiseOne, Self::NoiseTwo, Self::DriftBalance];

    pub fn name(self) -> &'static str {
        match self {
            Self::DriftConstant => "T1-i",
            Self::NoiseOne => "T1-ii",
            Self::NoiseTwo => "T1-iii",
            Self::DriftBalance => "T1-iv",
        }
    }
}

impl fmt::Display for RealizabilityCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The commutation-preservation conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CcrCondition {
    /// `G1 + G1ᵀ = 0`
    #[serde(rename = "antisym-G1")]
    AntisymG1,
    /// `G2 + G2ᵀ = 0`
    #[serde(rename = "antisym-G2")]
    AntisymG2,
    /// `G1G2ᵀ − G2G1ᵀ − Θ(F0) = 0`
    #[serde(rename = "F0-coupling")]
    F0Coupling,
    /// `Fᵀ + F + G1G1ᵀ + G2G2ᵀ = 0`
    #[serde(rename = "drift-balance")]
    DriftBalance,
}

impl CcrCondition {
    pub const ALL: [Self; 4] = [Self::AntisymG1, Self::AntisymG2, Self::F0Coupling, Self::DriftBalance];

    pub fn name(self) -> &'static str {
        match self {
            Self::AntisymG1 => "antisym-G1",
            Self::AntisymG2 => "antisym-G2",
            Self::F0Coupling => "F0-coupling",
            Self::DriftBalance => "drift-balance",
        }
    }
}

impl fmt::Display for CcrCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealizabilityReport {
    pub verdict: bool,
    pub residuals: BTreeMap<RealizabilityCondition, f64>,
    /// Present exactly when `verdict` holds.
    pub extracted: Option<PhysicalParams>,
    pub tolerance: f64,
}

impl RealizabilityReport {
    pub fn residual(&self, c: RealizabilityCondition) -> f64 {
        self.residuals[&c]
    }

    pub fn failing(&self) -> Vec<RealizabilityCondition> {
        self.residuals.iter().filter(|(_, r)| !(**r <= self.tolerance)).map(|(c, _)| *c).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CcrReport {
    pub verdict: bool,
    pub residuals: BTreeMap<CcrCondition, f64>,
    pub tolerance: f64,
}

impl CcrReport {
    pub fn residual(&self, c: CcrCondition) -> f64 {
        self.residuals[&c]
    }

    pub fn failing(&self) -> Vec<CcrCondition> {
        self.residuals.iter().filter(|(_, r)| !(**r <= self.tolerance)).map(|(c, _)| *c).collect()
    }
}

/// `‖F + Fᵀ + G1G1ᵀ + G2G2ᵀ‖_F`, shared verbatim by both checkers.
fn drift_balance_residual(q: &BilinearQsde) -> f64 {
    (q.f + q.f.transpose() + q.g1 * q.g1.transpose() + q.g2 * q.g2.transpose()).norm()
}

fn within(residual: f64, tol: f64) -> bool {
    // NaN fails
    residual <= tol
}

/// Evaluates all four realizability conditions independently.
pub fn check_physical_realizability(qsde: &BilinearQsde, tol: f64) -> RealizabilityReport {
    let c = |m: &RealMat3| m.map(Complex64::from);
    let i = Complex64::new(0.0, 1.0);
    let h = qsde.h1.map(Complex64::from) + qsde.h2.map(Complex64::from) * i;
    let g = c(&qsde.g1) + c(&qsde.g2) * i;
    let f0_rhs = g * h.adjoint() * Complex64::from(0.5);
    let cond_i = (qsde.f0.map(Complex64::from) - f0_rhs).norm();
    let cond_ii = (qsde.g1 - theta(&qsde.h2)).norm();
    let cond_iii = (qsde.g2 + theta(&qsde.h1)).norm();
    let cond_iv = drift_balance_residual(qsde);

    let residuals = BTreeMap::from([
        (RealizabilityCondition::DriftConstant, cond_i),
        (RealizabilityCondition::NoiseOne, cond_ii),
        (RealizabilityCondition::NoiseTwo, cond_iii),
        (RealizabilityCondition::DriftBalance, cond_iv),
    ]);
    let verdict = residuals.values().all(|r| within(*r, tol));
    let extracted = verdict.then(|| extract_parameters(qsde));
    RealizabilityReport { verdict, residuals, extracted, tolerance: tol }
}

/// Recovers `α = ⅛ vec(Fᵀ − F)ᵀ E` and `Λ = ½(H1 + iH2)`.
///
/// Meaningful only for realizable input; the caller checks first.
pub fn extract_parameters(qsde: &BilinearQsde) -> PhysicalParams {
    let alpha: RealRow3 = vec(&(qsde.f.transpose() - qsde.f)).transpose() * e_matrix() * 0.125;
    let lambda = (qsde.h1.map(Complex64::from) + qsde.h2.map(Complex64::from) * Complex64::new(0.0, 1.0))
        * Complex64::new(0.5, 0.0);
    PhysicalParams { alpha, lambda }
}

/// Evaluates the reduced commutation-preservation conditions.
pub fn check_ccr_preservation(qsde: &BilinearQsde, tol: f64) -> CcrReport {
    let q = qsde;
    let coupling: Matrix3<f64> = q.g1 * q.g2.transpose() - q.g2 * q.g1.transpose() - theta(&q.f0);
    let residuals = BTreeMap::from([
        (CcrCondition::AntisymG1, (q.g1 + q.g1.transpose()).norm()),
        (CcrCondition::AntisymG2, (q.g2 + q.g2.transpose()).norm()),
        (CcrCondition::F0Coupling, coupling.norm()),
        (CcrCondition::DriftBalance, drift_balance_residual(q)),
    ]);
    let verdict = residuals.values().all(|r| within(*r, tol));
    CcrReport { verdict, residuals, tolerance: tol }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem3Failure {
    pub trial: usize,
    pub params: PhysicalParams,
    pub realizability_failing: Vec<RealizabilityCondition>,
    pub ccr_failing: Vec<CcrCondition>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConverseFailure {
    pub trial: usize,
    pub t1_iv: f64,
    pub drift_balance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem3Report {
    pub seed: u64,
    pub trials: usize,
    pub tolerance: f64,
    /// Realizable instances that also preserve the commutation relations.
    pub passed: usize,
    pub failures: Vec<Theorem3Failure>,
    /// Arbitrary instances that violate the drift balance condition.
    pub converse_violations: usize,
    /// Instances where the two drift-balance evaluations disagree.
    pub converse_failures: Vec<ConverseFailure>,
}

impl Theorem3Report {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.converse_failures.is_empty() && self.passed == self.trials
    }
}

/// Checks one parameter set: `realize(params)` must pass both checkers.
pub fn theorem3_instance(
    params: &PhysicalParams,
    tol: f64,
) -> Option<(Vec<RealizabilityCondition>, Vec<CcrCondition>)> {
    let Ok(qsde) = realize(params) else {
        return Some((RealizabilityCondition::ALL.to_vec(), CcrCondition::ALL.to_vec()));
    };
    let pr = check_physical_realizability(&qsde, tol);
    let ccr = check_ccr_preservation(&qsde, tol);
    if pr.verdict && ccr.verdict {
        None
    } else {
        Some((pr.failing(), ccr.failing()))
    }
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Samples `trials` random parameter sets (`α` uniform in `[−2, 2]³`, each
/// `Λᵢ` uniform in the unit disk) and requires every realized system to pass
/// both checkers. Also samples `trials` arbitrary systems and requires the
/// realizability drift-balance condition and the commutation drift-balance
/// condition to agree.
pub fn theorem3_harness(seed: u64, trials: usize, tol: f64) -> Theorem3Report {
    let mut failures = Vec::new();
    let mut passed = 0;
    let mut converse_violations = 0;
    let mut converse_failures = Vec::new();
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial as u64);
        let params = sampling::params(&mut rng);
        match theorem3_instance(&params, tol) {
            None => passed += 1,
            Some((realizability_failing, ccr_failing)) => {
                failures.push(Theorem3Failure { trial, params, realizability_failing, ccr_failing })
            }
        }

        let arbitrary = sampling::arbitrary_qsde(&mut rng);
        let pr = check_physical_realizability(&arbitrary, tol);
        let ccr = check_ccr_preservation(&arbitrary, tol);
        let t1_iv = pr.residual(RealizabilityCondition::DriftBalance);
        let drift_balance = ccr.residual(CcrCondition::DriftBalance);
        let t1_fails = !within(t1_iv, tol);
        let ccr_fails = !within(drift_balance, tol);
        converse_violations += usize::from(t1_fails);
        if t1_fails != ccr_fails || t1_iv.to_bits() != drift_balance.to_bits() {
            converse_failures.push(ConverseFailure { trial, t1_iv, drift_balance });
        }
    }
    Theorem3Report { seed, trials, tolerance: tol, passed, failures, converse_violations, converse_failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::RealVec3;
    use crate::DEFAULT_TOL;

    fn params(alpha: [f64; 3], lambda: [[f64; 2]; 3]) -> PhysicalParams {
        PhysicalParams::from_arrays(alpha, lambda).unwrap()
    }

    #[test]
    fn realizable_round_trip_examples() {
        let p = params([0.0; 3], [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]);
        let r = check_physical_realizability(&realize(&p).unwrap(), DEFAULT_TOL);
        assert!(r.verdict);
        assert!(r.residuals.values().all(|v| *v < 1e-12));
        assert_eq!(r.extracted.as_ref().unwrap(), &p);

        let p = params([1.0, 2.0, 3.0], [[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]);
        let r = check_physical_realizability(&realize(&p).unwrap(), DEFAULT_TOL);
        assert!(r.verdict, "{r:?}");
        assert!(r.extracted.unwrap().max_abs_diff(&p) < 1e-10);
    }

    #[test]
    fn symmetric_noise_is_rejected() {
        let q = BilinearQsde { g1: RealMat3::identity(), ..BilinearQsde::zero() };
        let r = check_physical_realizability(&q, DEFAULT_TOL);
        assert!(!r.verdict);
        assert!(r.extracted.is_none());
        assert!(r.residual(RealizabilityCondition::NoiseOne) >= 3f64.sqrt());
        assert!(r.failing().contains(&RealizabilityCondition::NoiseOne));
    }

    #[test]
    fn extraction_examples() {
        let q = BilinearQsde { f: theta(&[1.0, 2.0, 3.0]) * -2.0, ..BilinearQsde::zero() };
        assert_eq!(extract_parameters(&q).alpha, RealRow3::new(1.0, 2.0, 3.0));

        let q = BilinearQsde { h1: RealRow3::new(2.0, 0.0, 0.0), ..BilinearQsde::zero() };
        assert_eq!(extract_parameters(&q).lambda, params([0.0; 3], [[1.0, 0.0], [0.0; 2], [0.0; 2]]).lambda);

        let q = BilinearQsde { f: RealMat3::new(1.0, 2.0, 3.0, 2.0, 5.0, 6.0, 3.0, 6.0, 9.0), ..BilinearQsde::zero() };
        assert_eq!(extract_parameters(&q).alpha, RealRow3::zeros());
    }

    #[test]
    fn extraction_agrees_with_theta_inverse() {
        let p = params([0.4, -1.3, 1.9], [[0.2, 0.1], [-0.5, 0.3], [0.0, -0.8]]);
        let q = realize(&p).unwrap();
        let via_e = extract_parameters(&q).alpha;
        let via_inverse = crate::algebra::theta_inverse(&((q.f.transpose() - q.f) * 0.25), 1e-9).unwrap();
        assert!((via_e - via_inverse.transpose()).amax() < 1e-14);
    }

    #[test]
    fn ccr_examples() {
        let dephasing = BilinearQsde {
            g1: theta(&[0.0, 0.0, 2.0]),
            f: RealMat3::from_diagonal(&RealVec3::new(-2.0, -2.0, 0.0)),
            ..BilinearQsde::zero()
        };
        assert!(check_ccr_preservation(&dephasing, DEFAULT_TOL).verdict);

        let q = BilinearQsde { f: RealMat3::identity(), ..BilinearQsde::zero() };
        let r = check_ccr_preservation(&q, DEFAULT_TOL);
        assert!(!r.verdict);
        assert!((r.residual(CcrCondition::DriftBalance) - 2.0 * 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(r.failing(), vec![CcrCondition::DriftBalance]);
    }

    #[test]
    fn shifted_drift_constant_breaks_coupling_condition() {
        let p = params([0.3, 0.0, -1.0], [[0.5, 0.5], [0.0, -0.25], [0.75, 0.0]]);
        let mut q = realize(&p).unwrap();
        q.f0 += RealVec3::x();
        let r = check_ccr_preservation(&q, DEFAULT_TOL);
        assert!((r.residual(CcrCondition::F0Coupling) - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.failing(), vec![CcrCondition::F0Coupling]);
        let pr = check_physical_realizability(&q, DEFAULT_TOL);
        assert_eq!(pr.failing(), vec![RealizabilityCondition::DriftConstant]);
    }

    #[test]
    fn zero_system_passes_everything() {
        assert!(theorem3_instance(&PhysicalParams::zero(), DEFAULT_TOL).is_none());
        let z = BilinearQsde::zero();
        assert!(check_physical_realizability(&z, DEFAULT_TOL).verdict);
        assert!(check_ccr_preservation(&z, DEFAULT_TOL).verdict);
    }

    #[test]
    fn harness_small_run() {
        let r = theorem3_harness(0, 50, DEFAULT_TOL);
        assert!(r.ok(), "{r:?}");
        assert_eq!(r.converse_violations, 50);
        assert_eq!(r, theorem3_harness(0, 50, DEFAULT_TOL));
    }

    #[test]
    fn nan_fails_closed() {
        let q = BilinearQsde { f: RealMat3::from_element(f64::NAN), ..BilinearQsde::zero() };
        assert!(!check_physical_realizability(&q, DEFAULT_TOL).verdict);
        assert!(!check_ccr_preservation(&q, DEFAULT_TOL).verdict);
    }
}
