//! Symbolic quantum-Itô oracle for commutation-relation preservation.
//!
//! Increments live in the basis `{dt, dW̄1, dW̄2}` with Pauli-operator
//! coefficients. Products keep only terms of order `dt`:
//!
//! ```text
//! dW̄1·dW̄1 = dt    dW̄1·dW̄2 = i dt
//! dW̄2·dW̄1 = −i dt  dW̄2·dW̄2 = dt     dt·(anything) = 0
//! ```
//!
//! [`ccr_residual`] expands `d[x, xᵀ] − 2iΘ(dx)` entry by entry from the
//! increments of the system, using only this table and the Pauli product.
//! It does not consult the reduced matrix conditions in
//! [`crate::realizability`].
//!
//! [`nondemolition_residual`] applies the same table to `[xᵢ, dȲⱼ]`, the
//! requirement that outputs commute with later system variables, which
//! ties the noise coefficients to the output coefficients.

use std::ops::{Add, Sub};

use num_complex::Complex;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::theta_inverse;
use crate::model::{realize, BilinearQsde};
use crate::pauli::{imag_unit, Coefficient, PauliOperator, PauliVec3};
use crate::realizability::{check_ccr_preservation, CcrCondition, RealizabilityCondition};
use crate::sampling;

/// `dt_part·dt + dw1_part·dW̄1 + dw2_part·dW̄2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ItoIncrement<T: Coefficient = f64> {
    pub dt_part: PauliOperator<T>,
    pub dw1_part: PauliOperator<T>,
    pub dw2_part: PauliOperator<T>,
}

impl<T: Coefficient> ItoIncrement<T> {
    pub fn zero() -> Self {
        Self { dt_part: PauliOperator::zero(), dw1_part: PauliOperator::zero(), dw2_part: PauliOperator::zero() }
    }

    pub fn dt(op: PauliOperator<T>) -> Self {
        Self { dt_part: op, ..Self::zero() }
    }

    pub fn dw1(op: PauliOperator<T>) -> Self {
        Self { dw1_part: op, ..Self::zero() }
    }

    pub fn dw2(op: PauliOperator<T>) -> Self {
        Self { dw2_part: op, ..Self::zero() }
    }

    pub fn parts(&self) -> [&PauliOperator<T>; 3] {
        [&self.dt_part, &self.dw1_part, &self.dw2_part]
    }

    fn map(&self, f: impl Fn(&PauliOperator<T>) -> PauliOperator<T>) -> Self {
        Self { dt_part: f(&self.dt_part), dw1_part: f(&self.dw1_part), dw2_part: f(&self.dw2_part) }
    }

    pub fn scale(&self, s: &Complex<T>) -> Self {
        self.map(|p| p.scale(s))
    }

    /// `op · self`; the operator commutes past the increments.
    pub fn left_mul(&self, op: &PauliOperator<T>) -> Self {
        self.map(|p| op * p)
    }

    /// `self · op`.
    pub fn right_mul(&self, op: &PauliOperator<T>) -> Self {
        self.map(|p| p * op)
    }

    /// Largest coefficient modulus across all parts.
    pub fn max_abs(&self) -> f64 {
        self.parts().iter().map(|p| p.max_abs()).fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> ItoIncrement<f64> {
        ItoIncrement {
            dt_part: self.dt_part.to_f64(),
            dw1_part: self.dw1_part.to_f64(),
            dw2_part: self.dw2_part.to_f64(),
        }
    }
}

impl<T: Coefficient> Add for ItoIncrement<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            dt_part: self.dt_part + rhs.dt_part,
            dw1_part: self.dw1_part + rhs.dw1_part,
            dw2_part: self.dw2_part + rhs.dw2_part,
        }
    }
}

impl<T: Coefficient> Sub for ItoIncrement<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            dt_part: self.dt_part - rhs.dt_part,
            dw1_part: self.dw1_part - rhs.dw1_part,
            dw2_part: self.dw2_part - rhs.dw2_part,
        }
    }
}

/// Product of two increments under the quadrature Itô table. Operator
/// coefficients multiply in the given order.
pub fn ito_product<T: Coefficient>(a: &ItoIncrement<T>, b: &ItoIncrement<T>) -> ItoIncrement<T> {
    let i = imag_unit::<T>();
    let dt = &a.dw1_part * &b.dw1_part + (&a.dw1_part * &b.dw2_part).scale(&i) - (&a.dw2_part * &b.dw1_part).scale(&i)
        + &a.dw2_part * &b.dw2_part;
    ItoIncrement::dt(dt)
}

/// A 3×3 grid of increments.
#[derive(Clone, Debug, PartialEq)]
pub struct ItoIncrementMat3<T: Coefficient = f64>(pub [[ItoIncrement<T>; 3]; 3]);

impl<T: Coefficient> ItoIncrementMat3<T> {
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> ItoIncrement<T>) -> Self {
        Self(std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))))
    }

    /// `Θ(v)` with increment entries.
    pub fn theta(v: &[ItoIncrement<T>; 3]) -> Self {
        let [b1, b2, b3] = v.clone();
        let z = ItoIncrement::zero();
        Self([
            [z.clone(), b3.clone(), ItoIncrement::zero() - b2.clone()],
            [ItoIncrement::zero() - b3, z.clone(), b1.clone()],
            [b2, ItoIncrement::zero() - b1, z],
        ])
    }

    /// Largest coefficient modulus per part `(dt, dW̄1, dW̄2)`.
    pub fn max_abs_by_part(&self) -> [f64; 3] {
        let mut out = [0.0f64; 3];
        for inc in self.0.iter().flatten() {
            for (o, p) in out.iter_mut().zip(inc.parts()) {
                *o = o.max(p.max_abs());
            }
        }
        out
    }
}

/// The increments `dxᵢ = (F0ᵢσ0 + Σⱼ Fᵢⱼσⱼ)dt + (Σⱼ G1ᵢⱼσⱼ)dW̄1 + (Σⱼ G2ᵢⱼσⱼ)dW̄2`.
pub fn qsde_increment<T: Coefficient>(qsde: &BilinearQsde) -> [ItoIncrement<T>; 3] {
    let c = |v: f64| Complex::new(T::from_f64(v), T::zero());
    std::array::from_fn(|i| ItoIncrement {
        dt_part: PauliOperator::affine(c(qsde.f0[i]), std::array::from_fn(|j| c(qsde.f[(i, j)]))),
        dw1_part: PauliOperator::affine(c(0.0), std::array::from_fn(|j| c(qsde.g1[(i, j)]))),
        dw2_part: PauliOperator::affine(c(0.0), std::array::from_fn(|j| c(qsde.g2[(i, j)]))),
    })
}

/// `d(xᵢxⱼ) = (dxᵢ)xⱼ + xᵢ(dxⱼ) + (dxᵢ)(dxⱼ)`.
fn d_product<T: Coefficient>(dx: &[ItoIncrement<T>; 3], x: &PauliVec3<T>, i: usize, j: usize) -> ItoIncrement<T> {
    dx[i].right_mul(&x.0[j]) + dx[j].left_mul(&x.0[i]) + ito_product(&dx[i], &dx[j])
}

fn ccr_entry<T: Coefficient>(dx: &[ItoIncrement<T>; 3], x: &PauliVec3<T>, p: usize, q: usize) -> ItoIncrement<T> {
    let i = imag_unit::<T>();
    let two_i = i.clone() + i;
    let theta_dx = ItoIncrementMat3::theta(dx);
    let d_comm = d_product(dx, x, p, q) - d_product(dx, x, q, p);
    d_comm - theta_dx.0[p][q].scale(&two_i)
}

/// The full increment `d[x, xᵀ] − 2iΘ(dx)`. Both terms are antisymmetric in
/// the index pair, so only entries above the diagonal are expanded.
pub fn ccr_expansion<T: Coefficient>(qsde: &BilinearQsde) -> ItoIncrementMat3<T> {
    let x = PauliVec3::<T>::system_variables();
    let dx = qsde_increment::<T>(qsde);
    let upper = [(0, 1), (0, 2), (1, 2)].map(|(p, q)| ccr_entry(&dx, &x, p, q));
    ItoIncrementMat3::from_fn(|p, q| match p.cmp(&q) {
        std::cmp::Ordering::Equal => ItoIncrement::zero(),
        std::cmp::Ordering::Less => upper[p + q - 1].clone(),
        std::cmp::Ordering::Greater => ItoIncrement::zero() - upper[p + q - 1].clone(),
    })
}

/// Largest coefficient of `d[x, xᵀ] − 2iΘ(dx)` split by where it appears.
///
/// The `dt` part is split into its `σ0` coefficient, which carries the
/// constant drift and the cross-quadrature Itô term, and its `σ1..σ3`
/// coefficients, which carry the linear drift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CcrOracleResidual {
    pub dt_identity: f64,
    pub dt_pauli: f64,
    pub dw1: f64,
    pub dw2: f64,
}

impl CcrOracleResidual {
    pub fn dt(&self) -> f64 {
        self.dt_identity.max(self.dt_pauli)
    }

    pub fn max(&self) -> f64 {
        self.dt().max(self.dw1).max(self.dw2)
    }

    /// Residual attributed to the reduced condition it corresponds to.
    pub fn by_condition(&self, c: CcrCondition) -> f64 {
        match c {
            CcrCondition::AntisymG1 => self.dw1,
            CcrCondition::AntisymG2 => self.dw2,
            CcrCondition::F0Coupling => self.dt_identity,
            CcrCondition::DriftBalance => self.dt_pauli,
        }
    }

    pub fn failing(&self, tol: f64) -> Vec<CcrCondition> {
        CcrCondition::ALL.into_iter().filter(|c| !(self.by_condition(*c) <= tol)).collect()
    }
}

/// Residual breakdown in the chosen coefficient arithmetic.
pub fn ccr_residual_in<T: Coefficient>(qsde: &BilinearQsde) -> CcrOracleResidual {
    let mut r = CcrOracleResidual { dt_identity: 0.0, dt_pauli: 0.0, dw1: 0.0, dw2: 0.0 };
    for inc in ccr_expansion::<T>(qsde).0.iter().flatten() {
        let dt = inc.dt_part.to_f64();
        r.dt_identity = r.dt_identity.max(dt.c[0].norm());
        r.dt_pauli = dt.c[1..].iter().fold(r.dt_pauli, |m, z| m.max(z.norm()));
        r.dw1 = r.dw1.max(inc.dw1_part.max_abs());
        r.dw2 = r.dw2.max(inc.dw2_part.max_abs());
    }
    r
}

/// Residual breakdown in exact rational arithmetic. Every `f64` input is
/// converted losslessly, so the only error is in the inputs themselves.
pub fn ccr_residual_breakdown(qsde: &BilinearQsde) -> CcrOracleResidual {
    ccr_residual_in::<BigRational>(qsde)
}

/// Max-norm of `d[x, xᵀ] − 2iΘ(dx)` over all coefficients, entries and parts.
///
/// Non-finite input yields NaN.
pub fn ccr_residual(qsde: &BilinearQsde) -> f64 {
    if qsde.validate().is_err() {
        return f64::NAN;
    }
    ccr_residual_breakdown(qsde).max()
}

/// `dȲ1 = (H1 x) dt + dW̄1` and `dȲ2 = (H2 x) dt + dW̄2`.
pub fn output_increment<T: Coefficient>(qsde: &BilinearQsde) -> [ItoIncrement<T>; 2] {
    let c = |v: f64| Complex::new(T::from_f64(v), T::zero());
    let linear = |h: &crate::algebra::RealRow3| PauliOperator::affine(c(0.0), std::array::from_fn(|j| c(h[j])));
    [
        ItoIncrement {
            dt_part: linear(&qsde.h1),
            dw1_part: PauliOperator::identity(),
            dw2_part: PauliOperator::zero(),
        },
        ItoIncrement {
            dt_part: linear(&qsde.h2),
            dw1_part: PauliOperator::zero(),
            dw2_part: PauliOperator::identity(),
        },
    ]
}

/// Largest coefficient of the increment of `[xᵢ, Ȳⱼ]` for each output `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutputOracleResidual {
    pub y1: f64,
    pub y2: f64,
}

impl OutputOracleResidual {
    pub fn max(&self) -> f64 {
        self.y1.max(self.y2)
    }

    /// `Ȳ1` ties `G2` to `H1` and `Ȳ2` ties `G1` to `H2`.
    pub fn by_condition(&self, c: RealizabilityCondition) -> Option<f64> {
        match c {
            RealizabilityCondition::NoiseOne => Some(self.y2),
            RealizabilityCondition::NoiseTwo => Some(self.y1),
            _ => None,
        }
    }

    pub fn failing(&self, tol: f64) -> Vec<RealizabilityCondition> {
        RealizabilityCondition::ALL.into_iter().filter(|c| self.by_condition(*c).is_some_and(|r| !(r <= tol))).collect()
    }
}

/// Increments of `[xᵢ, Ȳⱼ]`, indexed `[j][i]`.
///
/// The outputs must commute with the system at all later times. With
/// `[x(t), Ȳ(t)] = 0` and `dW̄(t)` commuting with `x(t)`, the increment is
/// `[xᵢ, dȲⱼ] + [dxᵢ, dȲⱼ]`.
pub fn nondemolition_expansion<T: Coefficient>(qsde: &BilinearQsde) -> [[ItoIncrement<T>; 3]; 2] {
    let x = PauliVec3::<T>::system_variables();
    let dx = qsde_increment::<T>(qsde);
    let dy = output_increment::<T>(qsde);
    std::array::from_fn(|j| {
        std::array::from_fn(|i| {
            dy[j].left_mul(&x.0[i]) - dy[j].right_mul(&x.0[i]) + ito_product(&dx[i], &dy[j])
                - ito_product(&dy[j], &dx[i])
        })
    })
}

/// Output-side oracle in exact arithmetic. Non-finite input yields NaN.
pub fn nondemolition_residual(qsde: &BilinearQsde) -> OutputOracleResidual {
    if qsde.validate().is_err() {
        return OutputOracleResidual { y1: f64::NAN, y2: f64::NAN };
    }
    let [y1, y2] =
        nondemolition_expansion::<BigRational>(qsde).map(|row| row.iter().map(|inc| inc.max_abs()).fold(0.0, f64::max));
    OutputOracleResidual { y1, y2 }
}

/// Sampling class used by [`oracle_equivalence`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemClass {
    /// `realize(params)` for random parameters.
    Realizable,
    /// Every entry uniform in `[−1, 1]`.
    Arbitrary,
    /// Commutation-preserving by construction with unrelated outputs.
    CcrConsistent,
}

impl SystemClass {
    pub const ALL: [Self; 3] = [Self::Realizable, Self::Arbitrary, Self::CcrConsistent];

    fn stream(self) -> u64 {
        match self {
            Self::Realizable => 1 << 32,
            Self::Arbitrary => 2 << 32,
            Self::CcrConsistent => 3 << 32,
        }
    }
}

/// A system with antisymmetric `G1, G2`, `F0` solving
/// `Θ(F0) = G1G2ᵀ − G2G1ᵀ`, `F` with symmetric part `−½(G1G1ᵀ + G2G2ᵀ)`,
/// and random outputs.
fn ccr_consistent_qsde(rng: &mut ChaCha8Rng) -> BilinearQsde {
    use crate::algebra::theta;
    let g1 = theta(&sampling::real_vec3(rng, 1.0));
    let g2 = theta(&sampling::real_vec3(rng, 1.0));
    let coupling = g1 * g2.transpose() - g2 * g1.transpose();
    let f0 = theta_inverse(&coupling, 1e-9).expect("commutator of antisymmetric matrices is antisymmetric");
    let f = theta(&sampling::real_vec3(rng, 2.0)) - (g1 * g1.transpose() + g2 * g2.transpose()) * 0.5;
    BilinearQsde { f0, f, g1, g2, h1: sampling::real_row3(rng, 1.0), h2: sampling::real_row3(rng, 1.0) }
}

fn sample(class: SystemClass, seed: u64, trial: usize) -> BilinearQsde {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(class.stream() + trial as u64);
    match class {
        SystemClass::Realizable => realize(&sampling::params(&mut rng)).expect("sampled parameters realize"),
        SystemClass::Arbitrary => sampling::arbitrary_qsde(&mut rng),
        SystemClass::CcrConsistent => ccr_consistent_qsde(&mut rng),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassSummary {
    pub class: SystemClass,
    pub trials: usize,
    /// Instances with `ccr_residual ≤ tol`.
    pub oracle_pass: usize,
    /// Instances the reduced checker accepts.
    pub checker_pass: usize,
    pub agreements: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Disagreement {
    pub class: SystemClass,
    pub trial: usize,
    pub oracle_residual: f64,
    pub checker_verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub seed: u64,
    pub tolerance: f64,
    pub classes: Vec<ClassSummary>,
    pub disagreements: Vec<Disagreement>,
}

impl OracleReport {
    pub fn summary(&self, class: SystemClass) -> &ClassSummary {
        self.classes.iter().find(|c| c.class == class).expect("every class is sampled")
    }

    /// No disagreement, and every realizable and consistent instance passes.
    pub fn ok(&self) -> bool {
        self.disagreements.is_empty()
            && [SystemClass::Realizable, SystemClass::CcrConsistent].iter().all(|c| {
                let s = self.summary(*c);
                s.oracle_pass == s.trials
            })
    }
}

/// Compares `ccr_residual ≤ tol` against the reduced checker on `trials`
/// systems of each [`SystemClass`]. Trials run in parallel, each with its own
/// deterministic stream, so the report does not depend on scheduling.
pub fn oracle_equivalence(seed: u64, trials: usize, tol: f64) -> OracleReport {
    let mut classes = Vec::new();
    let mut disagreements = Vec::new();
    for class in SystemClass::ALL {
        let outcomes: Vec<(f64, bool)> = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let q = sample(class, seed, trial);
                (ccr_residual(&q), check_ccr_preservation(&q, tol).verdict)
            })
            .collect();
        let mut summary = ClassSummary { class, trials, oracle_pass: 0, checker_pass: 0, agreements: 0 };
        for (trial, (residual, verdict)) in outcomes.into_iter().enumerate() {
            let oracle = residual <= tol;
            summary.oracle_pass += usize::from(oracle);
            summary.checker_pass += usize::from(verdict);
            if oracle == verdict {
                summary.agreements += 1;
            } else {
                disagreements.push(Disagreement { class, trial, oracle_residual: residual, checker_verdict: verdict });
            }
        }
        classes.push(summary);
    }
    OracleReport { seed, tolerance: tol, classes, disagreements }
}
