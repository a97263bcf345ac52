//! Physical parameters, bilinear coefficient systems, and their dynamics.
//!
//! `α` and `Λ` are row vectors: `𝓗 = αx`, `L = Λx`. For a row `Λ`,
//! `Λ#` is the entrywise conjugate (a row) and `Λ†` the conjugate transpose
//! (a column).

use nalgebra::{Matrix2, RowVector3, Vector3};
use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::algebra::{theta, ComplexMat3, ComplexRow3, RealMat3, RealRow3, RealVec3};
use crate::error::{Error, Result};
use crate::pauli::{commutator, PauliOperator, PauliVec3};

/// Largest imaginary part tolerated in the output of [`realize`].
pub const IMAG_RESIDUE_TOL: f64 = 1e-12;

/// Slack on the unit Bloch ball when validating initial states.
pub const BLOCH_TOL: f64 = 1e-9;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Hamiltonian coefficients `α ∈ ℝ³` and coupling coefficients `Λ ∈ ℂ³`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams {
    pub alpha: RealRow3,
    pub lambda: ComplexRow3,
}

impl PhysicalParams {
    pub fn new(alpha: RealRow3, lambda: ComplexRow3) -> Result<Self> {
        if alpha.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { field: "alpha" });
        }
        if lambda.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { field: "lambda" });
        }
        Ok(Self { alpha, lambda })
    }

    pub fn from_arrays(alpha: [f64; 3], lambda: [[f64; 2]; 3]) -> Result<Self> {
        Self::new(RowVector3::from(alpha), RowVector3::from(lambda.map(|[re, im]| Complex64::new(re, im))))
    }

    pub fn zero() -> Self {
        Self { alpha: RealRow3::zeros(), lambda: ComplexRow3::zeros() }
    }

    /// Largest absolute deviation over all components.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let a = (self.alpha - other.alpha).amax();
        let l = (self.lambda - other.lambda).iter().map(|z| z.norm()).fold(0.0, f64::max);
        a.max(l)
    }

    /// `𝓗 = αx` as a Pauli operator.
    pub fn hamiltonian(&self) -> PauliOperator {
        PauliOperator::affine(Complex64::new(0.0, 0.0), self.alpha.map(Complex64::from).into())
    }

    /// `L = Λx` as a Pauli operator.
    pub fn coupling(&self) -> PauliOperator {
        PauliOperator::affine(Complex64::new(0.0, 0.0), self.lambda.into())
    }
}

impl Serialize for PhysicalParams {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let alpha: [f64; 3] = self.alpha.into();
        let lambda: [[f64; 2]; 3] = std::array::from_fn(|i| [self.lambda[i].re, self.lambda[i].im]);
        let mut s = serializer.serialize_struct("PhysicalParams", 2)?;
        s.serialize_field("alpha", &alpha)?;
        s.serialize_field("lambda", &lambda)?;
        s.end()
    }
}

/// Coefficients of `dx = F0 dt + F x dt + G1 x dW̄1 + G2 x dW̄2` and
/// `dȲ = (H1; H2) x dt + dW̄`.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearQsde {
    pub f0: RealVec3,
    pub f: RealMat3,
    pub g1: RealMat3,
    pub g2: RealMat3,
    pub h1: RealRow3,
    pub h2: RealRow3,
}

impl BilinearQsde {
    pub fn zero() -> Self {
        Self {
            f0: RealVec3::zeros(),
            f: RealMat3::zeros(),
            g1: RealMat3::zeros(),
            g2: RealMat3::zeros(),
            h1: RealRow3::zeros(),
            h2: RealRow3::zeros(),
        }
    }

    /// Checks that every entry is finite.
    pub fn validate(&self) -> Result<()> {
        let fields: [(&'static str, &[f64]); 6] = [
            ("F0", self.f0.as_slice()),
            ("F", self.f.as_slice()),
            ("G1", self.g1.as_slice()),
            ("G2", self.g2.as_slice()),
            ("H1", self.h1.as_slice()),
            ("H2", self.h2.as_slice()),
        ];
        for (field, values) in fields {
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { field });
            }
        }
        Ok(())
    }

    /// Largest absolute entrywise deviation.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            (self.f0 - other.f0).amax(),
            (self.f - other.f).amax(),
            (self.g1 - other.g1).amax(),
            (self.g2 - other.g2).amax(),
            (self.h1 - other.h1).amax(),
            (self.h2 - other.h2).amax(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn real_part<const R: usize, const C: usize>(
    field: &'static str,
    m: &nalgebra::SMatrix<Complex64, R, C>,
) -> Result<nalgebra::SMatrix<f64, R, C>> {
    let residual = m.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if !(residual <= IMAG_RESIDUE_TOL) {
        return Err(Error::ImaginaryResidue { field, residual });
    }
    Ok(m.map(|z| z.re))
}

/// The coefficient system generated by `(α, Λ)`:
///
/// ```text
/// F0 = −2iΘ(Λ)Λ†
/// F  = −2Θ(α) + Λ†Λ + ΛᵀΛ# − 2(ΛΛ†)I
/// G1 = Θ(i(Λ# − Λ)),   G2 = −Θ(Λ + Λ#)
/// H1 = Λ + Λ#,         H2 = i(Λ# − Λ)
/// ```
pub fn realize(params: &PhysicalParams) -> Result<BilinearQsde> {
    let lam = params.lambda;
    let lam_conj = lam.conjugate();
    let lam_dag = lam.adjoint();
    let alpha_c = params.alpha.map(Complex64::from);

    let f0 = theta(&lam) * lam_dag * Complex64::new(0.0, -2.0);
    let norm2 = (lam * lam_dag)[0];
    let f: ComplexMat3 = theta(&alpha_c) * Complex64::from(-2.0) + lam_dag * lam + lam.transpose() * lam_conj
        - ComplexMat3::identity() * (norm2 * 2.0);
    let g1 = theta(&((lam_conj - lam) * I));
    let g2 = -theta(&(lam + lam_conj));
    let h1 = lam + lam_conj;
    let h2 = (lam_conj - lam) * I;

    Ok(BilinearQsde {
        f0: real_part("F0", &f0)?,
        f: real_part("F", &f)?,
        g1: real_part("G1", &g1)?,
        g2: real_part("G2", &g2)?,
        h1: real_part("H1", &h1)?,
        h2: real_part("H2", &h2)?,
    })
}

/// The quadrature transformation `[[1, 1], [−i, i]]`.
pub fn quadrature_matrix() -> Matrix2<Complex64> {
    Matrix2::new(Complex64::from(1.0), Complex64::from(1.0), -I, I)
}

/// `(W, W†) ↦ (W̄1, W̄2) = (W + W†, −iW + iW†)`.
pub fn quadrature_input(w: [Complex64; 2]) -> [Complex64; 2] {
    (quadrature_matrix() * nalgebra::Vector2::from(w)).into()
}

/// Inverse of [`quadrature_input`]: `W = ½(W̄1 + iW̄2)`, `W† = ½(W̄1 − iW̄2)`.
pub fn quadrature_input_inverse(q: [Complex64; 2]) -> [Complex64; 2] {
    let [w1, w2] = q;
    [(w1 + I * w2) * 0.5, (w1 - I * w2) * 0.5]
}

/// Same transformation applied to `(Y, Y†)`.
pub fn quadrature_output(y: [Complex64; 2]) -> [Complex64; 2] {
    quadrature_input(y)
}

pub fn quadrature_output_inverse(q: [Complex64; 2]) -> [Complex64; 2] {
    quadrature_input_inverse(q)
}

/// Itô table of `(dW, dW†)`: only `dW dW† = dt` survives.
pub fn ito_table_field() -> Matrix2<Complex64> {
    Matrix2::new(Complex64::from(0.0), Complex64::from(1.0), Complex64::from(0.0), Complex64::from(0.0))
}

/// Itô table transported to the quadratures, `Q T Qᵀ = [[1, i], [−i, 1]]`.
pub fn ito_table_quadrature() -> Matrix2<Complex64> {
    let q = quadrature_matrix();
    q * ito_table_field() * q.transpose()
}

/// Mean Bloch vector `rᵢ = ⟨xᵢ⟩` at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochState {
    pub t: f64,
    #[serde(serialize_with = "ser_vec3")]
    pub r: RealVec3,
}

fn ser_vec3<S: serde::Serializer>(v: &RealVec3, s: S) -> std::result::Result<S::Ok, S::Error> {
    <[f64; 3]>::from(*v).serialize(s)
}

/// Step schedule: `n` steps of `dt`, the last one shortened to land on `horizon`.
fn schedule(horizon: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0) || !dt.is_finite() || !(horizon > 0.0) || !horizon.is_finite() || dt > horizon * (1.0 + 1e-12) {
        return Err(Error::StepSize { dt, horizon });
    }
    let ratio = horizon / dt;
    let n = if (ratio - ratio.round()).abs() <= 1e-9 * ratio { ratio.round() } else { ratio.ceil() } as usize;
    let mut times: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
    times.push(horizon);
    Ok(times)
}

fn check_bloch(r0: &RealVec3) -> Result<()> {
    let norm = r0.norm();
    if r0.iter().any(|v| !v.is_finite()) || norm > 1.0 + BLOCH_TOL {
        return Err(Error::InvalidState { norm });
    }
    Ok(())
}

fn rk4<S: Clone>(y: &S, h: f64, f: impl Fn(&S) -> S, axpy: impl Fn(&S, f64, &S) -> S) -> S {
    let k1 = f(y);
    let k2 = f(&axpy(y, h / 2.0, &k1));
    let k3 = f(&axpy(y, h / 2.0, &k2));
    let k4 = f(&axpy(y, h, &k3));
    let mut out = axpy(y, h / 6.0, &k1);
    out = axpy(&out, h / 3.0, &k2);
    out = axpy(&out, h / 3.0, &k3);
    axpy(&out, h / 6.0, &k4)
}

/// Integrates the vacuum mean dynamics `dr/dt = F0 + F r` with classical RK4.
///
/// The returned trajectory starts at `t = 0` and has one sample per step.
pub fn simulate_mean(qsde: &BilinearQsde, r0: &RealVec3, horizon: f64, dt: f64) -> Result<Vec<BlochState>> {
    let times = schedule(horizon, dt)?;
    check_bloch(r0)?;
    qsde.validate()?;
    let rhs = |r: &RealVec3| qsde.f0 + qsde.f * r;
    let axpy = |y: &RealVec3, h: f64, k: &RealVec3| y + k * h;
    let mut out = Vec::with_capacity(times.len());
    let mut r = *r0;
    out.push(BlochState { t: 0.0, r });
    for w in times.windows(2) {
        r = rk4(&r, w[1] - w[0], rhs, axpy);
        out.push(BlochState { t: w[1], r });
    }
    Ok(out)
}

/// Density matrix `½(I + r·σ)`.
pub fn density_from_bloch(r: &RealVec3) -> Matrix2<Complex64> {
    let c = [0.5, r[0] / 2.0, r[1] / 2.0, r[2] / 2.0].map(Complex64::from);
    PauliOperator::new(c).to_matrix()
}

/// `rᵢ = Tr(ρσᵢ)`.
pub fn bloch_from_density(rho: &Matrix2<Complex64>) -> RealVec3 {
    let op = PauliOperator::<f64>::from_matrix(rho);
    // from_matrix halves the trace
    RealVec3::new(op.c[1].re, op.c[2].re, op.c[3].re) * 2.0
}

/// Integrates the master equation
/// `dρ/dt = −i[𝓗, ρ] + LρL† − ½(L†Lρ + ρL†L)` with RK4 from
/// `ρ0 = ½(I + r0·σ)` and reports `rᵢ(t) = Tr(ρ(t)σᵢ)`.
///
/// Independent of [`realize`]: `𝓗` and `L` are built as 2×2 matrices.
pub fn master_mean_oracle(params: &PhysicalParams, r0: &RealVec3, horizon: f64, dt: f64) -> Result<Vec<BlochState>> {
    let times = schedule(horizon, dt)?;
    check_bloch(r0)?;
    let h = params.hamiltonian().to_matrix();
    let l = params.coupling().to_matrix();
    let l_dag = l.adjoint();
    let ldl = l_dag * l;
    let rhs = |rho: &Matrix2<Complex64>| {
        (h * rho - rho * h) * (-I) + l * rho * l_dag - (ldl * rho + rho * ldl) * Complex64::from(0.5)
    };
    let axpy = |y: &Matrix2<Complex64>, s: f64, k: &Matrix2<Complex64>| y + k * Complex64::from(s);

    let mut rho = density_from_bloch(r0);
    let mut out = Vec::with_capacity(times.len());
    out.push(BlochState { t: 0.0, r: bloch_from_density(&rho) });
    for w in times.windows(2) {
        rho = rk4(&rho, w[1] - w[0], rhs, axpy);
        out.push(BlochState { t: w[1], r: bloch_from_density(&rho) });
    }
    Ok(out)
}

/// Largest componentwise deviation between two trajectories on the same grid.
pub fn max_trajectory_deviation(a: &[BlochState], b: &[BlochState]) -> f64 {
    assert_eq!(a.len(), b.len(), "trajectories on different grids");
    a.iter().zip(b).map(|(p, q)| (p.r - q.r).amax()).fold(0.0, f64::max)
}

/// Coefficient residuals of the commutator expansions, each computed once
/// through the Pauli algebra and once from the closed `Θ` forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingCheck {
    /// `[x, 𝓗] = −2iΘ(α)x`
    pub x_h: f64,
    /// `[x, L] = −2iΘ(Λ)x`
    pub x_l: f64,
    /// `[x, L†] = −2iΘ(Λ#)x`
    pub x_ldag: f64,
    /// `L†[x, L] = −2iΘ(Λ)Λ† − 2(ΛΛ†I − Λ†Λ)x`
    pub ldag_x_l: f64,
    /// `[x, L†]L = 2iΘ(Λ)Λ† + 2(ΛΛ†I − ΛᵀΛ#)x`
    pub x_ldag_l: f64,
    /// Heisenberg drift `𝓛(x)` against `F0 + F x` from [`realize`].
    pub drift: f64,
    /// `dW̄1` coefficient `½([x, L] + [L†, x])` against `G1 x`.
    pub noise_w1: f64,
    /// `dW̄2` coefficient `−½i([x, L] − [L†, x])` against `G2 x`.
    pub noise_w2: f64,
}

impl CouplingCheck {
    pub fn max(&self) -> f64 {
        [self.x_h, self.x_l, self.x_ldag, self.ldag_x_l, self.x_ldag_l, self.drift, self.noise_w1, self.noise_w2]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

fn vec_commutator(x: &PauliVec3, s: &PauliOperator) -> PauliVec3 {
    PauliVec3(std::array::from_fn(|i| commutator(&x.0[i], s)))
}

fn vec_combine(a: &PauliVec3, ca: Complex64, b: &PauliVec3, cb: Complex64) -> PauliVec3 {
    PauliVec3(std::array::from_fn(|i| a.0[i].scale(&ca) + b.0[i].scale(&cb)))
}

/// Evaluates the commutator expansions of the Heisenberg generator both ways.
pub fn coupling_commutators_check(params: &PhysicalParams) -> Result<CouplingCheck> {
    let x = PauliVec3::<f64>::system_variables();
    let h = params.hamiltonian();
    let l = params.coupling();
    let l_dag = l.adjoint();

    let lam = params.lambda;
    let lam_conj = lam.conjugate();
    let lam_dag = lam.adjoint();
    let alpha_c = params.alpha.map(Complex64::from);
    let norm2 = (lam * lam_dag)[0];
    let minus_2i = Complex64::new(0.0, -2.0);
    let zero3 = Vector3::<Complex64>::zeros();
    let eye = ComplexMat3::identity();

    let x_h = vec_commutator(&x, &h);
    let x_l = vec_commutator(&x, &l);
    let x_ldag = vec_commutator(&x, &l_dag);
    let ldag_x_l = x_l.left_mul(&l_dag);
    let x_ldag_l = x_ldag.right_mul(&l);

    let theta_lam_ldag = theta(&lam) * lam_dag;
    let rhs_x_h = PauliVec3::linear(&(theta(&alpha_c) * minus_2i));
    let rhs_x_l = PauliVec3::linear(&(theta(&lam) * minus_2i));
    let rhs_x_ldag = PauliVec3::linear(&(theta(&lam_conj) * minus_2i));
    let rhs_ldag_x_l =
        PauliVec3::affine(&(theta_lam_ldag * minus_2i), &((eye * norm2 - lam_dag * lam) * Complex64::from(-2.0)));
    let rhs_x_ldag_l = PauliVec3::affine(
        &(theta_lam_ldag * Complex64::new(0.0, 2.0)),
        &((eye * norm2 - lam.transpose() * lam_conj) * Complex64::from(2.0)),
    );

    // 𝓛(x) = −i[x, 𝓗] + ½(L†[x, L] + [L†, x]L), and [L†, x]L = −[x, L†]L
    let half = Complex64::from(0.5);
    let lindblad = PauliVec3(std::array::from_fn(|i| {
        x_h.0[i].scale(&(-I)) + ldag_x_l.0[i].scale(&half) - x_ldag_l.0[i].scale(&half)
    }));
    let w1 = vec_combine(&x_l, half, &x_ldag, -half);
    let w2 = vec_combine(&x_l, -half * I, &x_ldag, -half * I);

    let qsde = realize(params)?;
    let to_c = |m: &RealMat3| m.map(Complex64::from);
    let drift_rhs = PauliVec3::affine(&qsde.f0.map(Complex64::from), &to_c(&qsde.f));
    let w1_rhs = PauliVec3::affine(&zero3, &to_c(&qsde.g1));
    let w2_rhs = PauliVec3::affine(&zero3, &to_c(&qsde.g2));

    Ok(CouplingCheck {
        x_h: (x_h - rhs_x_h).max_abs(),
        x_l: (x_l - rhs_x_l).max_abs(),
        x_ldag: (x_ldag - rhs_x_ldag).max_abs(),
        ldag_x_l: (ldag_x_l - rhs_ldag_x_l).max_abs(),
        x_ldag_l: (x_ldag_l - rhs_x_ldag_l).max_abs(),
        drift: (lindblad - drift_rhs).max_abs(),
        noise_w1: (w1 - w1_rhs).max_abs(),
        noise_w2: (w2 - w2_rhs).max_abs(),
    })
}
