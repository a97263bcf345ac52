//! Cross-product algebra on three-vectors: the Levi-Civita tensor, the `Θ`
//! map, the stacking operator `vec`, the 9×3 matrix `E`, the 9×9 block
//! permutation `𝟙_E`, and the Kronecker product.
//!
//! Indices in the public API that name a basis element (`levi_civita`,
//! [`e_bar`]) are 1-based. Storage is 0-based.
//!
//! Conventions:
//!
//! * `Θ(β) = [[0, β3, −β2], [−β3, 0, β1], [β2, −β1, 0]]`, for row or column `β`.
//! * `ēᵢ = Θ(eᵢ)`, whose `(p, q)` entry is `ε_{ipq}`.
//! * `E` stacks the column blocks of `Θ`: rows `3(i−1)+1 ..= 3i` hold `ēᵢᵀ`,
//!   so that `vec(Θ(β)) = E β`. Since `ēᵢᵀ = −ēᵢ`, this is the negative of
//!   stacking the `ēᵢ` directly; every quadratic identity in `E` is unaffected.
//! * `𝟙_E` has the elementary matrix `𝟙_{ji}` in block `(i, j)`; it is the
//!   commutation matrix with `𝟙_E vec(A) = vec(Aᵀ)`.

use std::ops::Neg;

use nalgebra::{ComplexField, DMatrix, Matrix3, RowVector3, SMatrix, SVector, Scalar, Vector3};
use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sampling;

pub type RealVec3 = Vector3<f64>;
pub type ComplexVec3 = Vector3<Complex64>;
pub type RealRow3 = RowVector3<f64>;
pub type ComplexRow3 = RowVector3<Complex64>;
pub type RealMat3 = Matrix3<f64>;
pub type ComplexMat3 = Matrix3<Complex64>;
pub type Vec9<T> = SVector<T, 9>;
pub type Mat9<T> = SMatrix<T, 9, 9>;
/// The 9×3 stacking matrix `E`.
pub type EMatrix<T> = SMatrix<T, 9, 3>;

/// Anything holding three components, regardless of orientation.
pub trait Triple<T> {
    fn components(&self) -> [T; 3];
}

impl<T: Scalar> Triple<T> for Vector3<T> {
    fn components(&self) -> [T; 3] {
        [self[0].clone(), self[1].clone(), self[2].clone()]
    }
}

impl<T: Scalar> Triple<T> for RowVector3<T> {
    fn components(&self) -> [T; 3] {
        [self[0].clone(), self[1].clone(), self[2].clone()]
    }
}

impl<T: Clone> Triple<T> for [T; 3] {
    fn components(&self) -> [T; 3] {
        self.clone()
    }
}

/// 0-based Levi-Civita symbol.
pub(crate) const fn eps(i: usize, j: usize, k: usize) -> i32 {
    if i == j || j == k || i == k {
        0
    } else if (j + 3 - i) % 3 == 1 {
        // (i, i+1, i+2) mod 3 is cyclic
        1
    } else {
        -1
    }
}

/// Levi-Civita tensor `ε_{ijk}` for 1-based indices.
///
/// `levi_civita(1, 2, 3) == Ok(1)`, `levi_civita(2, 1, 3) == Ok(-1)`,
/// `levi_civita(1, 1, 3) == Ok(0)`.
pub fn levi_civita(i: usize, j: usize, k: usize) -> Result<i32> {
    for index in [i, j, k] {
        if !(1..=3).contains(&index) {
            return Err(Error::IndexOutOfRange { index });
        }
    }
    Ok(eps(i - 1, j - 1, k - 1))
}

/// The antisymmetric matrix `Θ(β)`. Orientation of `β` is ignored.
pub fn theta<T>(beta: &impl Triple<T>) -> Matrix3<T>
where
    T: Scalar + Zero + Neg<Output = T>,
{
    let [b1, b2, b3] = beta.components();
    let z = T::zero();
    Matrix3::new(z.clone(), b3.clone(), -b2.clone(), -b3, z.clone(), b1.clone(), b2, -b1, z)
}

/// Recovers `β` from `M` with `Θ(β) = (M − Mᵀ)/2`.
///
/// Fails when `M` is not antisymmetric within `tol · max(1, ‖M‖_F)`.
pub fn theta_inverse<T>(m: &Matrix3<T>, tol: f64) -> Result<Vector3<T>>
where
    T: ComplexField<RealField = f64>,
{
    let allowed = tol * m.norm().max(1.0);
    let residual = (m + m.transpose()).norm();
    let diag = m.diagonal().iter().map(|d| d.clone().modulus()).fold(0.0, f64::max);
    if residual > allowed || diag > allowed || residual.is_nan() {
        return Err(Error::NotAntisymmetric { residual: residual.max(diag), allowed });
    }
    let half = T::from_real(0.5);
    let a = (m - m.transpose()) * half;
    Ok(Vector3::new(a[(1, 2)].clone(), a[(2, 0)].clone(), a[(0, 1)].clone()))
}

/// Stacks the columns of `m` top to bottom.
pub fn vec<T: Scalar>(m: &Matrix3<T>) -> Vec9<T> {
    Vec9::from_column_slice(m.as_slice())
}

/// Inverse of [`vec`].
pub fn unvec<T: Scalar>(v: &[T]) -> Result<Matrix3<T>> {
    if v.len() != 9 {
        return Err(Error::Dimension { expected: 9, got: v.len() });
    }
    Ok(Matrix3::from_column_slice(v))
}

/// The generator `ēᵢ` (1-based `i`) as an integer matrix.
pub fn e_bar(i: usize) -> Result<Matrix3<i32>> {
    if !(1..=3).contains(&i) {
        return Err(Error::IndexOutOfRange { index: i });
    }
    Ok(Matrix3::from_fn(|p, q| eps(i - 1, p, q)))
}

pub(crate) fn e_bar0(i: usize) -> Matrix3<i32> {
    Matrix3::from_fn(|p, q| eps(i, p, q))
}

/// `E` with exact integer entries.
pub fn e_matrix_int() -> EMatrix<i32> {
    // row 3i+p, column k holds (ēᵢᵀ)_{pk} = ε_{ikp}
    EMatrix::from_fn(|row, k| eps(row / 3, k, row % 3))
}

pub fn e_matrix() -> EMatrix<f64> {
    e_matrix_int().map(f64::from)
}

/// `𝟙_E` with exact integer entries.
pub fn one_e_int() -> Mat9<i32> {
    Mat9::from_fn(|row, col| {
        let (i, p) = (row / 3, row % 3);
        let (j, q) = (col / 3, col % 3);
        i32::from(p == j && q == i)
    })
}

pub fn one_e() -> Mat9<f64> {
    one_e_int().map(f64::from)
}

/// Elementary 3×3 matrix with a one at 0-based `(i, j)`.
pub(crate) fn elementary(i: usize, j: usize) -> Matrix3<i32> {
    let mut m = Matrix3::zeros();
    m[(i, j)] = 1;
    m
}

/// Kronecker product of dense matrices.
pub fn kron<T>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T>
where
    T: Scalar + Zero + num_traits::One + nalgebra::ClosedAddAssign + nalgebra::ClosedMulAssign,
{
    a.kronecker(b)
}

/// Kronecker product of 3×3 matrices.
pub fn kron3<T>(a: &Matrix3<T>, b: &Matrix3<T>) -> Mat9<T>
where
    T: Scalar + Zero + num_traits::One + nalgebra::ClosedAddAssign + nalgebra::ClosedMulAssign,
{
    a.kronecker(b)
}

/// Maximum residual observed for one named identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub name: &'static str,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub seed: u64,
    pub trials: usize,
    pub residuals: Vec<IdentityResidual>,
}

impl IdentityReport {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.residuals.iter().find(|r| r.name == name).map(|r| r.max_residual)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.max_residual).fold(0.0, f64::max)
    }

    /// First identity whose residual exceeds `tol`, in evaluation order.
    pub fn first_failure(&self, tol: f64) -> Option<&IdentityResidual> {
        self.residuals.iter().find(|r| !(r.max_residual <= tol))
    }
}

fn frob_c(m: &ComplexMat3) -> f64 {
    m.norm()
}

/// Residuals of the exact integer identities (`EᵀE = 2I`, `EEᵀ = I − 𝟙_E`,
/// `𝟙_E E = −E`, the epsilon contraction, and `ēᵢēⱼᵀ = δᵢⱼI − 𝟙ⱼᵢ`).
/// Each entry is the number of mismatching integer entries, so zero means exact.
pub fn exact_identity_residuals() -> Vec<IdentityResidual> {
    let e = e_matrix_int();
    let one = one_e_int();
    let i3 = Matrix3::<i32>::identity();
    let i9 = Mat9::<i32>::identity();
    let count = |it: &mut dyn Iterator<Item = i32>| it.filter(|v| *v != 0).count() as f64;

    let ete = e.transpose() * e - i3 * 2;
    let eet = e * e.transpose() - (i9 - one);
    let onee = one * e + e;

    let mut contraction = 0.0;
    for j in 0..3 {
        for k in 0..3 {
            for m in 0..3 {
                for n in 0..3 {
                    let lhs: i32 = (0..3).map(|i| eps(i, j, k) * eps(i, m, n)).sum();
                    let rhs = i32::from(j == m && k == n) - i32::from(j == n && k == m);
                    if lhs != rhs {
                        contraction += 1.0;
                    }
                }
            }
        }
    }

    let mut outer = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let lhs = e_bar0(i) * e_bar0(j).transpose();
            let rhs = if i == j { i3 } else { Matrix3::zeros() } - elementary(j, i);
            outer += count(&mut (lhs - rhs).iter().copied());
        }
    }

    vec![
        IdentityResidual { name: "eq12-ete", max_residual: count(&mut ete.iter().copied()) },
        IdentityResidual { name: "eq13-eet", max_residual: count(&mut eet.iter().copied()) },
        IdentityResidual { name: "eq14-onee", max_residual: count(&mut onee.iter().copied()) },
        IdentityResidual { name: "eq15-contraction", max_residual: contraction },
        IdentityResidual { name: "ebar-outer", max_residual: outer },
    ]
}

/// Evaluates every algebraic identity on `trials` random inputs and reports
/// the largest Frobenius residual per identity. Residuals are reported, never
/// thrown.
///
/// Inputs: complex `β, γ` with real and imaginary parts uniform in `[−1, 1]`,
/// real `A, B, C` with entries uniform in `[−1, 1]`, scalars `a, b` complex.
pub fn selftest_identities(seed: u64, trials: usize) -> IdentityReport {
    const NAMES: [&str; 14] = [
        "theta-antisym",
        "theta-linear",
        "lemma1-i",
        "lemma1-ii",
        "lemma1-iii",
        "lemma1-iv",
        "lemma1-v",
        "vec-theta",
        "lemma3-i",
        "lemma3-ii",
        "lemma3-iii",
        "lemma3-iv",
        "vec-kron",
        "kron-swap",
    ];
    let mut max = [0.0f64; NAMES.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let e = e_matrix();
    let ec = e.map(Complex64::from);
    let one = one_e();
    let i3 = RealMat3::identity();
    let i3c = ComplexMat3::identity();

    for _ in 0..trials {
        let beta = sampling::complex_vec3(&mut rng, 1.0);
        let gamma = sampling::complex_vec3(&mut rng, 1.0);
        let a_s = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let b_s = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let a = sampling::real_mat3(&mut rng, 1.0);
        let b = sampling::real_mat3(&mut rng, 1.0);
        let c = sampling::real_mat3(&mut rng, 1.0);

        let tb = theta(&beta);
        let tg = theta(&gamma);

        let mut r = [0.0f64; NAMES.len()];
        r[0] = frob_c(&(tb + tb.transpose()));
        r[1] = frob_c(&(theta(&(beta * a_s + gamma * b_s)) - (tb * a_s + tg * b_s)));
        r[2] = (tb * gamma + tg * beta).norm();
        r[3] = (tb * beta).norm();
        r[4] = (0..3)
            .map(|i| {
                let ebar = e_bar0(i).map(|v| Complex64::from(f64::from(v)));
                let mut unit = ComplexVec3::zeros();
                unit[i] = Complex64::from(1.0);
                frob_c(&(ebar * tb - (beta * unit.transpose() - i3c * beta[i])))
            })
            .fold(0.0, f64::max);
        let bt_g = (beta.transpose() * gamma)[0];
        r[5] = frob_c(&(tb * tg - (gamma * beta.transpose() - i3c * bt_g)));
        r[6] = frob_c(&(theta(&(tb * gamma)) - (tb * tg - tg * tb)));
        r[7] = (vec(&tb) - ec * beta).norm();

        let et = e.transpose();
        let ab = kron3(&a, &b);
        let ba = kron3(&b, &a);
        r[8] = (et * ab * e - et * ba * e).norm();
        r[9] = (et * kron3(&i3, &a) * e - (i3 * a.trace() - a.transpose())).norm();
        let expansion = a.transpose() * b.transpose() + b.transpose() * a.transpose() + i3 * (a.trace() * b.trace())
            - a.transpose() * b.trace()
            - b.transpose() * a.trace()
            - i3 * (a * b).trace();
        r[10] = (et * ab * e - expansion).norm();
        r[11] = (e * et * ab * e - (ab * e + ba * e)).norm();
        r[12] = (vec(&(a * b * c)) - kron3(&c.transpose(), &a) * vec(&b)).norm();
        r[13] = (one * ab * one - ba).norm();

        for (m, v) in max.iter_mut().zip(r) {
            // NaN must surface as a failure
            *m = if v.is_nan() { f64::NAN } else { m.max(v) };
        }
    }

    let mut residuals: Vec<IdentityResidual> =
        NAMES.iter().zip(max).map(|(name, max_residual)| IdentityResidual { name, max_residual }).collect();
    residuals.extend(exact_identity_residuals());
    IdentityReport { seed, trials, residuals }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn levi_civita_values() {
        assert_eq!(levi_civita(1, 2, 3), Ok(1));
        assert_eq!(levi_civita(2, 3, 1), Ok(1));
        assert_eq!(levi_civita(2, 1, 3), Ok(-1));
        assert_eq!(levi_civita(3, 2, 1), Ok(-1));
        assert_eq!(levi_civita(1, 1, 3), Ok(0));
        assert_eq!(levi_civita(0, 1, 2), Err(Error::IndexOutOfRange { index: 0 }));
        assert_eq!(levi_civita(1, 2, 4), Err(Error::IndexOutOfRange { index: 4 }));
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(&[0.0, 0.0, 0.0]), RealMat3::zeros());
        assert_eq!(theta(&[1.0, 2.0, 3.0]), RealMat3::new(0.0, 3.0, -2.0, -3.0, 0.0, 1.0, 2.0, -1.0, 0.0));
        let e1 = theta(&RealVec3::x());
        assert_eq!(e1, RealMat3::new(0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, -1.0, 0.0));
        assert_eq!(e1, e_bar(1).unwrap().map(f64::from));
        // orientation does not matter
        assert_eq!(theta(&RealRow3::new(1.0, 2.0, 3.0)), theta(&RealVec3::new(1.0, 2.0, 3.0)));
    }

    #[test]
    fn theta_inverse_round_trip_and_errors() {
        let m = theta(&[c(1.0), c(2.0), c(3.0)]);
        let beta = theta_inverse(&m, 1e-9).unwrap();
        assert_eq!(beta, ComplexVec3::new(c(1.0), c(2.0), c(3.0)));
        assert_eq!(theta_inverse(&ComplexMat3::zeros(), 1e-9).unwrap(), ComplexVec3::zeros());
        let err = theta_inverse(&ComplexMat3::identity(), 1e-9).unwrap_err();
        assert!(matches!(err, Error::NotAntisymmetric { .. }), "{err:?}");
    }

    #[test]
    fn theta_inverse_symmetrizes_mild_noise() {
        let mut m = theta(&[0.5, -1.0, 2.0]);
        m[(0, 1)] += 1e-13;
        let beta = theta_inverse(&m, 1e-9).unwrap();
        assert!((theta(&beta) - (m - m.transpose()) * 0.5).norm() == 0.0);
    }

    #[test]
    fn vec_examples() {
        let e3 = e_bar(3).unwrap();
        let v: Vec<i32> = vec(&e3).iter().copied().collect();
        assert_eq!(v, vec![0, -1, 0, 1, 0, 0, 0, 0, 0]);
        let e = e_matrix();
        assert_eq!(vec(&theta(&RealVec3::y())), e.column(1).into_owned());
        assert!(matches!(unvec(&[1.0; 8]), Err(Error::Dimension { expected: 9, got: 8 })));
        let m = RealMat3::from_fn(|i, j| (3 * i + j) as f64);
        assert_eq!(unvec(vec(&m).as_slice()).unwrap(), m);
    }

    #[test]
    fn kron_identity() {
        let k = kron3(&RealMat3::identity(), &RealMat3::identity());
        assert_eq!(k, Mat9::<f64>::identity());
        let d = kron(&DMatrix::from_element(1, 2, 2.0), &DMatrix::identity(2, 2));
        assert_eq!(d.shape(), (2, 4));
        assert_eq!(d[(1, 3)], 2.0);
    }

    #[test]
    fn one_e_is_symmetric_permutation() {
        let one = one_e_int();
        assert_eq!(one, one.transpose());
        assert_eq!(one * one, Mat9::identity());
        let m = RealMat3::from_fn(|i, j| (1 + 3 * i + j) as f64);
        assert_eq!(one_e() * vec(&m), vec(&m.transpose()));
    }

    #[test]
    fn exact_identities_hold() {
        for r in exact_identity_residuals() {
            assert_eq!(r.max_residual, 0.0, "{}", r.name);
        }
    }

    #[test]
    fn lemma3_ii_with_identity_matches_eq12() {
        let e = e_matrix_int();
        let i3 = Matrix3::<i32>::identity();
        let lhs = e.transpose() * kron3(&i3, &i3) * e;
        assert_eq!(lhs, i3 * 3 - i3);
        assert_eq!(lhs, e.transpose() * e);
    }

    #[test]
    fn selftest_small() {
        let report = selftest_identities(0, 100);
        assert!(report.max_residual() < 1e-12, "{report:?}");
        assert!(report.first_failure(1e-12).is_none());
        assert_eq!(report, selftest_identities(0, 100));
    }

    #[test]
    fn lemma1_i_exact_for_equal_arguments() {
        let beta = ComplexVec3::new(Complex64::new(0.3, -0.7), c(1.1), Complex64::new(0.0, 2.0));
        let tb = theta(&beta);
        assert_eq!(tb * beta + tb * beta, ComplexVec3::zeros());
    }
}
