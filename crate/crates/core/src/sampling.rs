//! Real and circularly-symmetric complex Gaussian sampling.

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::field::{eigh, gram_from_spectrum, Field, HermitianMatrix, KVector, C64};
use crate::rng::Rng;

/// Tolerance (relative to `max(1, ||cov||)`) for negative covariance eigenvalues.
pub const COVARIANCE_PSD_TOL: f64 = 1e-10;

/// Draws a standard Gaussian in `K^r`: `N(0, 1)` entries for the reals,
/// `(y + i z) / sqrt(2)` for the complex field so that `E|z_j|^2 = 1`.
pub fn standard_normal(field: Field, r: usize, rng: &mut Rng) -> DVector<C64> {
    match field {
        Field::Real => DVector::from_fn(r, |_, _| C64::new(rng.sample(StandardNormal), 0.0)),
        Field::Complex => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            DVector::from_fn(r, |_, _| {
                let y: f64 = rng.sample(StandardNormal);
                let z: f64 = rng.sample(StandardNormal);
                C64::new(s * y, s * z)
            })
        }
    }
}

/// Samples `N_K(0, U U†)` as `U z` with `z` standard.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    field: Field,
    factor: DMatrix<C64>,
}

impl GaussianSampler {
    pub fn new(cov: &HermitianMatrix) -> Result<Self> {
        let eig = eigh(cov)?;
        let scale = eig.eigenvalues.iter().map(|v| v.abs()).fold(1.0, f64::max);
        if eig.min() < -COVARIANCE_PSD_TOL * scale {
            return Err(Error::NotPsd {
                index: None,
                min_eigenvalue: eig.min(),
            });
        }
        let g = gram_from_spectrum(cov.field(), &eig);
        Ok(Self {
            field: cov.field(),
            factor: g.factor,
        })
    }

    /// Sampler for the covariance `U U†` given the factor directly.
    pub fn from_factor(field: Field, factor: DMatrix<C64>) -> Result<Self> {
        if field == Field::Real && factor.iter().any(|z| z.im != 0.0) {
            return Err(Error::InvalidInput("real factor has imaginary parts".into()));
        }
        Ok(Self { field, factor })
    }

    /// Sampler for `A Σ A†`, reusing this factor: `(A U)(A U)†`.
    pub fn transformed(&self, a: &DMatrix<C64>) -> Result<Self> {
        if a.ncols() != self.factor.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.factor.nrows(),
                found: a.ncols(),
            });
        }
        Self::from_factor(self.field, a * &self.factor)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.factor.nrows()
    }

    pub fn rank(&self) -> usize {
        self.factor.ncols()
    }

    pub fn factor(&self) -> &DMatrix<C64> {
        &self.factor
    }

    pub fn sample(&self, rng: &mut Rng) -> KVector {
        let z = standard_normal(self.field, self.factor.ncols(), rng);
        KVector::from_parts_unchecked(self.field, &self.factor * z)
    }
}

/// `count` draws from `N_K(0, cov)`.
pub fn sample_gaussian(cov: &HermitianMatrix, count: usize, rng: &mut Rng) -> Result<Vec<KVector>> {
    let sampler = GaussianSampler::new(cov)?;
    Ok((0..count).map(|_| sampler.sample(rng)).collect())
}

/// A uniformly distributed unit vector in `K^n`.
pub fn sample_sphere_uniform(n: usize, field: Field, rng: &mut Rng) -> KVector {
    assert!(n >= 1, "sphere dimension must be positive");
    loop {
        let g = standard_normal(field, n, rng);
        let norm = g.norm();
        if norm > 1e-300 {
            return KVector::from_parts_unchecked(field, g.unscale(norm));
        }
    }
}
