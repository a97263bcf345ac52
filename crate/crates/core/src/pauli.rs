//! Two-level operators as complex combinations of the Pauli basis.
//!
//! A [`PauliOperator`] stores the unweighted coefficients `c` of
//! `c0·σ0 + c1·σ1 + c2·σ2 + c3·σ3`. The half-weighted expansion
//! `σ̂ = ½ Σ αᵢσᵢ` with `αᵢ = Tr(σ̂σᵢ)` relates by `αᵢ = 2cᵢ`.
//!
//! Coefficients are generic over [`Coefficient`]: `f64` for floating point,
//! [`BigRational`] for exact Gaussian-rational arithmetic. Every `f64` is a
//! dyadic rational, so floating inputs convert to the exact mode losslessly.

use std::fmt;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix2, Matrix3, Vector3};
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, NumAssign, One, ToPrimitive, Zero};

use crate::algebra::eps;

/// Real scalar field backing the complex coefficients.
pub trait Coefficient:
    Clone + Debug + PartialEq + Num + NumAssign + Neg<Output = Self> + Send + Sync + 'static
{
    /// Converts from `f64`; exact for rational coefficients.
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
}

impl Coefficient for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Coefficient for BigRational {
    /// Panics on non-finite input.
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite coefficient")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

pub type ExactPauli = PauliOperator<BigRational>;

pub(crate) fn cx<T: Coefficient>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

pub(crate) fn imag_unit<T: Coefficient>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

pub(crate) fn complex_from_f64<T: Coefficient>(z: Complex<f64>) -> Complex<T> {
    Complex::new(T::from_f64(z.re), T::from_f64(z.im))
}

pub(crate) fn modulus<T: Coefficient>(z: &Complex<T>) -> f64 {
    z.re.to_f64().hypot(z.im.to_f64())
}

#[derive(Clone, PartialEq)]
pub struct PauliOperator<T: Coefficient = f64> {
    pub c: [Complex<T>; 4],
}

impl<T: Coefficient> PauliOperator<T> {
    pub fn new(c: [Complex<T>; 4]) -> Self {
        Self { c }
    }

    pub fn zero() -> Self {
        Self { c: std::array::from_fn(|_| Complex::zero()) }
    }

    pub fn identity() -> Self {
        Self::basis(0)
    }

    /// `σk` for `k` in `0..=3`.
    pub fn basis(k: usize) -> Self {
        assert!(k < 4, "Pauli basis index {k} out of range 0..=3");
        let mut op = Self::zero();
        op.c[k] = Complex::one();
        op
    }

    pub fn from_real(c: [T; 4]) -> Self {
        Self { c: c.map(|v| cx(v, T::zero())) }
    }

    pub fn from_f64(c: [Complex<f64>; 4]) -> Self {
        Self { c: c.map(complex_from_f64) }
    }

    /// `c0·σ0 + Σ vᵢσᵢ`.
    pub fn affine(c0: Complex<T>, v: [Complex<T>; 3]) -> Self {
        let [a, b, c] = v;
        Self { c: [c0, a, b, c] }
    }

    pub fn scale(&self, s: &Complex<T>) -> Self {
        Self { c: std::array::from_fn(|k| self.c[k].clone() * s.clone()) }
    }

    /// Operator adjoint. Each `σk` is self-adjoint, so this conjugates the coefficients.
    pub fn adjoint(&self) -> Self {
        Self { c: std::array::from_fn(|k| self.c[k].conj()) }
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.c.iter().all(|z| z.im.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|z| z.is_zero())
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(modulus).fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> PauliOperator<f64> {
        PauliOperator { c: std::array::from_fn(|k| cx(self.c[k].re.to_f64(), self.c[k].im.to_f64())) }
    }

    /// The 2×2 matrix obtained by substituting the Pauli matrices.
    pub fn to_matrix(&self) -> Matrix2<Complex<T>> {
        let [c0, c1, c2, c3] = self.c.clone();
        let i = imag_unit::<T>();
        Matrix2::new(c0.clone() + c3.clone(), c1.clone() - i.clone() * c2.clone(), c1 + i * c2, c0 - c3)
    }

    /// Inverse of [`to_matrix`](Self::to_matrix): `c0 = Tr(M)/2`, `cᵢ = Tr(Mσᵢ)/2`.
    pub fn from_matrix(m: &Matrix2<Complex<T>>) -> Self {
        let half = cx(T::one() / (T::one() + T::one()), T::zero());
        let sigma = pauli_matrices::<T>();
        Self { c: std::array::from_fn(|k| (m * &sigma[k]).trace() * half.clone()) }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        commutator(self, other)
    }
}

/// `σ0, σ1, σ2, σ3` as 2×2 matrices.
pub fn pauli_matrices<T: Coefficient>() -> [Matrix2<Complex<T>>; 4] {
    std::array::from_fn(|k| PauliOperator::<T>::basis(k).to_matrix())
}

/// Product from `σᵢσⱼ = δᵢⱼσ0 + i Σₖ εᵢⱼₖσₖ`, extended bilinearly.
pub fn pauli_product<T: Coefficient>(a: &PauliOperator<T>, b: &PauliOperator<T>) -> PauliOperator<T> {
    let mut out = PauliOperator::<T>::zero();
    let i = imag_unit::<T>();
    for (p, ap) in a.c.iter().enumerate() {
        if ap.is_zero() {
            continue;
        }
        for (q, bq) in b.c.iter().enumerate() {
            if bq.is_zero() {
                continue;
            }
            let w = ap.clone() * bq.clone();
            match (p, q) {
                (0, _) => out.c[q] += w,
                (_, 0) => out.c[p] += w,
                _ if p == q => out.c[0] += w,
                _ => {
                    // exactly one k survives for p != q
                    let k = 6 - p - q;
                    let sign = eps(p - 1, q - 1, k - 1);
                    let term = i.clone() * w;
                    if sign > 0 {
                        out.c[k] += term;
                    } else {
                        out.c[k] -= term;
                    }
                }
            }
        }
    }
    out
}

/// `[a, b] = ab − ba`.
pub fn commutator<T: Coefficient>(a: &PauliOperator<T>, b: &PauliOperator<T>) -> PauliOperator<T> {
    pauli_product(a, b) - pauli_product(b, a)
}

impl<T: Coefficient> Add for PauliOperator<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.c.iter_mut().zip(rhs.c) {
            *a += b;
        }
        self
    }
}

impl<T: Coefficient> Sub for PauliOperator<T> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.c.iter_mut().zip(rhs.c) {
            *a -= b;
        }
        self
    }
}

impl<T: Coefficient> Neg for PauliOperator<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { c: self.c.map(|z| -z) }
    }
}

impl<T: Coefficient> Mul for &PauliOperator<T> {
    type Output = PauliOperator<T>;
    fn mul(self, rhs: Self) -> PauliOperator<T> {
        pauli_product(self, rhs)
    }
}

impl<T: Coefficient> Mul for PauliOperator<T> {
    type Output = PauliOperator<T>;
    fn mul(self, rhs: Self) -> PauliOperator<T> {
        pauli_product(&self, &rhs)
    }
}

impl<T: Coefficient> fmt::Debug for PauliOperator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<T: Coefficient> fmt::Display for PauliOperator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = self.to_f64();
        let mut first = true;
        for (k, z) in op.c.iter().enumerate() {
            if *z == Complex::zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "({}{:+}i)σ{}", z.re, z.im, k)?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A column of three operators.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliVec3<T: Coefficient = f64>(pub [PauliOperator<T>; 3]);

impl<T: Coefficient> PauliVec3<T> {
    /// The system variables `x = (σ1, σ2, σ3)`.
    pub fn system_variables() -> Self {
        Self(std::array::from_fn(|i| PauliOperator::basis(i + 1)))
    }

    /// `b·σ0 + M x` for a constant column `b` and coefficient matrix `M`.
    pub fn affine(constant: &Vector3<Complex<T>>, m: &Matrix3<Complex<T>>) -> Self {
        Self(std::array::from_fn(|i| {
            PauliOperator::affine(constant[i].clone(), std::array::from_fn(|j| m[(i, j)].clone()))
        }))
    }

    /// `M x`.
    pub fn linear(m: &Matrix3<Complex<T>>) -> Self {
        Self::affine(&Vector3::from_element(Complex::zero()), m)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(PauliOperator::max_abs).fold(0.0, f64::max)
    }

    /// Left-multiplies every entry by the scalar operator `s`.
    pub fn left_mul(&self, s: &PauliOperator<T>) -> Self {
        Self(std::array::from_fn(|i| s * &self.0[i]))
    }

    /// Right-multiplies every entry by the scalar operator `s`.
    pub fn right_mul(&self, s: &PauliOperator<T>) -> Self {
        Self(std::array::from_fn(|i| &self.0[i] * s))
    }
}

impl<T: Coefficient> Sub for PauliVec3<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let [a0, a1, a2] = self.0;
        let [b0, b1, b2] = rhs.0;
        Self([a0 - b0, a1 - b1, a2 - b2])
    }
}

/// A 3×3 grid of operators.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMat3<T: Coefficient = f64>(pub [[PauliOperator<T>; 3]; 3]);

impl<T: Coefficient> OperatorMat3<T> {
    pub fn from_fn(mut f: impl FnMut(usize, usize) -> PauliOperator<T>) -> Self {
        Self(std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))))
    }

    /// The `Θ` pattern with operator entries.
    pub fn theta(v: &PauliVec3<T>) -> Self {
        let [b1, b2, b3] = v.0.clone();
        let z = PauliOperator::zero();
        Self([[z.clone(), b3.clone(), -b2.clone()], [-b3, z.clone(), b1.clone()], [b2, -b1, z]])
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(PauliOperator::max_abs).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct OuterRelationsReport {
    /// Max coefficient residual of `xxᵀ − (I + iΘ(x))`.
    pub outer_residual: f64,
    /// Max coefficient residual of `[x, xᵀ] − 2iΘ(x)`.
    pub commutator_residual: f64,
}

impl OuterRelationsReport {
    pub fn max(&self) -> f64 {
        self.outer_residual.max(self.commutator_residual)
    }
}

/// Builds `xxᵀ` and `[x, xᵀ]` entry by entry in exact arithmetic and
/// compares them with `I + iΘ(x)` and `2iΘ(x)`.
pub fn pauli_outer_relations_check() -> OuterRelationsReport {
    let x = PauliVec3::<BigRational>::system_variables();
    let th = OperatorMat3::theta(&x);
    let i = imag_unit::<BigRational>();
    let two_i = i.clone() + i.clone();
    let outer = OperatorMat3::from_fn(|p, q| {
        let delta = if p == q { PauliOperator::identity() } else { PauliOperator::zero() };
        &x.0[p] * &x.0[q] - (delta + th.0[p][q].scale(&i))
    });
    let comm = OperatorMat3::from_fn(|p, q| commutator(&x.0[p], &x.0[q]) - th.0[p][q].scale(&two_i));
    OuterRelationsReport { outer_residual: outer.max_abs(), commutator_residual: comm.max_abs() }
}

/// `[x, xᵀ]` in exact arithmetic.
pub fn system_commutator_matrix() -> OperatorMat3<BigRational> {
    let x = PauliVec3::<BigRational>::system_variables();
    OperatorMat3::from_fn(|p, q| commutator(&x.0[p], &x.0[q]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn s(k: usize) -> ExactPauli {
        ExactPauli::basis(k)
    }

    fn q(re: i64, im: i64) -> Complex<BigRational> {
        cx(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    #[test]
    fn product_examples() {
        assert_eq!(&s(1) * &s(2), s(3).scale(&q(0, 1)));
        assert_eq!(&s(1) * &s(1), s(0));
        assert_eq!(&s(2) * &s(1), s(3).scale(&q(0, -1)));
        let a = ExactPauli::new([q(1, 2), q(-3, 0), q(0, 5), q(7, -1)]);
        assert_eq!(&s(0) * &a, a);
        assert_eq!(&a * &s(0), a);
    }

    #[test]
    fn commutator_examples() {
        assert_eq!(commutator(&s(1), &s(2)), s(3).scale(&q(0, 2)));
        assert_eq!(commutator(&s(3), &s(1)), s(2).scale(&q(0, 2)));
        assert_eq!(commutator(&s(2), &s(3)), s(1).scale(&q(0, 2)));
        let a = ExactPauli::new([q(1, 2), q(-3, 0), q(0, 5), q(7, -1)]);
        assert!(commutator(&a, &a).is_zero());
    }

    #[test]
    fn basis_table_matches_matrices() {
        let m = pauli_matrices::<BigRational>();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!((&s(i) * &s(j)).to_matrix(), &m[i] * &m[j], "σ{i}σ{j}");
            }
        }
    }

    #[test]
    fn matrix_conversions() {
        let sigma0 = PauliOperator::<f64>::identity().to_matrix();
        assert_eq!(sigma0, Matrix2::identity());
        let sigma3 = Matrix2::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.0, 0.0),
        );
        assert_eq!(PauliOperator::from_matrix(&sigma3), PauliOperator::basis(3));
        let a = ExactPauli::new([q(1, 2), q(-3, 0), q(0, 5), q(7, -1)]);
        assert_eq!(ExactPauli::from_matrix(&a.to_matrix()), a);
    }

    #[test]
    fn self_adjointness() {
        let h = ExactPauli::new([q(1, 0), q(-3, 0), q(2, 0), q(7, 0)]);
        assert!(h.is_self_adjoint());
        assert_eq!(h.to_matrix().map(|z| z.conj()).transpose(), h.to_matrix());
        let l = ExactPauli::new([q(0, 0), q(0, 1), q(0, 0), q(0, 0)]);
        assert!(!l.is_self_adjoint());
        assert_eq!(l.adjoint().to_matrix(), l.to_matrix().map(|z| z.conj()).transpose());
    }

    #[test]
    fn outer_relations_exact() {
        let r = pauli_outer_relations_check();
        assert_eq!(r.outer_residual, 0.0);
        assert_eq!(r.commutator_residual, 0.0);
        let comm = system_commutator_matrix();
        assert_eq!(comm.0[0][1], s(3).scale(&q(0, 2)));
        for k in 0..3 {
            assert!(comm.0[k][k].is_zero());
        }
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(format!("{}", s(2).scale(&q(0, 2))), "(0+2i)σ2");
        assert_eq!(format!("{}", ExactPauli::zero()), "0");
    }
}
