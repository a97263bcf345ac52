//! Random instance generators shared by the self-test harnesses.

use nalgebra::{Matrix3, RowVector3, Vector3};
use num_complex::Complex64;
use rand::Rng;

use crate::model::{BilinearQsde, PhysicalParams};

fn uniform<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> f64 {
    rng.random_range(-scale..scale)
}

pub(crate) fn complex_vec3<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Vector3<Complex64> {
    Vector3::from_fn(|_, _| Complex64::new(uniform(rng, scale), uniform(rng, scale)))
}

pub(crate) fn real_mat3<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Matrix3<f64> {
    Matrix3::from_fn(|_, _| uniform(rng, scale))
}

pub(crate) fn real_vec3<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Vector3<f64> {
    Vector3::from_fn(|_, _| uniform(rng, scale))
}

pub(crate) fn real_row3<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> RowVector3<f64> {
    RowVector3::from_fn(|_, _| uniform(rng, scale))
}

/// `α` uniform in `[−2, 2]³`; each `Λᵢ` uniform in the closed unit disk.
pub(crate) fn params<R: Rng + ?Sized>(rng: &mut R) -> PhysicalParams {
    let alpha = real_row3(rng, 2.0);
    let lambda = RowVector3::from_fn(|_, _| {
        let r = rng.random_range(0.0f64..=1.0).sqrt();
        let phi = rng.random_range(0.0..std::f64::consts::TAU);
        Complex64::from_polar(r, phi)
    });
    PhysicalParams::new(alpha, lambda).expect("sampled parameters are finite")
}

/// Unstructured system with every entry uniform in `[−1, 1]`.
pub(crate) fn arbitrary_qsde<R: Rng + ?Sized>(rng: &mut R) -> BilinearQsde {
    BilinearQsde {
        f0: real_vec3(rng, 1.0),
        f: real_mat3(rng, 1.0),
        g1: real_mat3(rng, 1.0),
        g2: real_mat3(rng, 1.0),
        h1: real_row3(rng, 1.0),
        h2: real_row3(rng, 1.0),
    }
}
