//! Dense self-adjoint linear algebra over the real or complex field.
//!
//! Both fields share one representation: entries are stored as `Complex64`
//! and a [`Field`] tag records which field a value lives in. Real-field
//! values always carry zero imaginary parts.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Scalar field of an instance: `R` or `C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Real => f.write_str("real"),
            Field::Complex => f.write_str("complex"),
        }
    }
}

impl std::str::FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "real" | "r" => Ok(Field::Real),
            "complex" | "c" => Ok(Field::Complex),
            other => Err(Error::InvalidInput(format!("unknown field '{other}'"))),
        }
    }
}

pub(crate) fn ensure_field(expected: Field, found: Field) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::FieldMismatch { expected, found })
    }
}

/// A vector in `K^n` tagged with its field.
#[derive(Debug, Clone, PartialEq)]
pub struct KVector {
    field: Field,
    entries: DVector<C64>,
}

impl KVector {
    pub fn new(field: Field, entries: DVector<C64>) -> Result<Self> {
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("vector has non-finite entries".into()));
        }
        if field == Field::Real && entries.iter().any(|z| z.im != 0.0) {
            return Err(Error::InvalidInput(
                "real vector has non-zero imaginary parts".into(),
            ));
        }
        Ok(Self { field, entries })
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self {
            field: Field::Real,
            entries: DVector::from_iterator(values.len(), values.iter().map(|&v| C64::new(v, 0.0))),
        }
    }

    pub fn from_complex(values: Vec<C64>) -> Self {
        Self {
            field: Field::Complex,
            entries: DVector::from_vec(values),
        }
    }

    pub fn basis(n: usize, i: usize, field: Field) -> Self {
        let mut entries = DVector::zeros(n);
        entries[i] = C64::new(1.0, 0.0);
        Self { field, entries }
    }

    pub(crate) fn from_parts_unchecked(field: Field, entries: DVector<C64>) -> Self {
        Self { field, entries }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &DVector<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> DVector<C64> {
        self.entries
    }

    pub fn norm(&self) -> f64 {
        self.entries.norm()
    }

    /// Returns `x / ||x||`, or an error for the zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::InvalidInput("cannot normalize the zero vector".into()));
        }
        Ok(Self {
            field: self.field,
            entries: self.entries.unscale(norm),
        })
    }

    /// Multiplies by a unit-modulus scalar. Real vectors accept only `±1`.
    pub fn with_phase(&self, phase: C64) -> Result<Self> {
        if (phase.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput("phase must have unit modulus".into()));
        }
        if self.field == Field::Real && phase.im != 0.0 {
            return Err(Error::InvalidInput("real vectors admit only a sign change".into()));
        }
        Ok(Self {
            field: self.field,
            entries: self.entries.map(|z| z * phase),
        })
    }

    /// Real coordinates, or interleaved `(re, im)` pairs for complex vectors.
    pub fn to_real_coordinates(&self) -> Vec<f64> {
        match self.field {
            Field::Real => self.entries.iter().map(|z| z.re).collect(),
            Field::Complex => self.entries.iter().flat_map(|z| [z.re, z.im]).collect(),
        }
    }
}

/// Dense self-adjoint matrix over `R` or `C`.
///
/// Construction symmetrizes the input as `(A + A†) / 2`, which is the
/// identity (bit for bit) on matrices that are already self-adjoint.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    field: Field,
    data: DMatrix<C64>,
}

impl HermitianMatrix {
    pub fn new(field: Field, data: DMatrix<C64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::InvalidInput(format!(
                "matrix is {}x{}, expected square",
                data.nrows(),
                data.ncols()
            )));
        }
        if data.nrows() == 0 {
            return Err(Error::InvalidInput("matrix dimension must be positive".into()));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        if field == Field::Real && data.iter().any(|z| z.im != 0.0) {
            return Err(Error::InvalidInput(
                "real matrix has non-zero imaginary parts".into(),
            ));
        }
        Ok(Self::symmetrized(field, data))
    }

    pub fn from_real(data: DMatrix<f64>) -> Result<Self> {
        Self::new(Field::Real, data.map(|v| C64::new(v, 0.0)))
    }

    /// Builds a matrix from real and (optional) imaginary parts.
    pub fn from_parts(re: DMatrix<f64>, im: Option<DMatrix<f64>>) -> Result<Self> {
        match im {
            None => Self::from_real(re),
            Some(im) => {
                if im.shape() != re.shape() {
                    return Err(Error::InvalidInput(
                        "real and imaginary parts differ in shape".into(),
                    ));
                }
                let data = DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| {
                    C64::new(re[(i, j)], im[(i, j)])
                });
                Self::new(Field::Complex, data)
            }
        }
    }

    pub(crate) fn symmetrized(field: Field, data: DMatrix<C64>) -> Self {
        let n = data.nrows();
        let mut out = data;
        for i in 0..n {
            let d = out[(i, i)];
            out[(i, i)] = C64::new(d.re, 0.0);
            for j in (i + 1)..n {
                let avg = (out[(i, j)] + out[(j, i)].conj()) * 0.5;
                out[(i, j)] = avg;
                out[(j, i)] = avg.conj();
            }
        }
        if field == Field::Real {
            out.iter_mut().for_each(|z| z.im = 0.0);
        }
        Self { field, data: out }
    }

    pub fn identity(n: usize, field: Field) -> Self {
        Self {
            field,
            data: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize, field: Field) -> Self {
        Self {
            field,
            data: DMatrix::zeros(n, n),
        }
    }

    pub fn diagonal(values: &[f64], field: Field) -> Self {
        let n = values.len();
        let mut data = DMatrix::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            data[(i, i)] = C64::new(v, 0.0);
        }
        Self { field, data }
    }

    /// `v v†`.
    pub fn outer(v: &KVector) -> Self {
        let e = v.entries();
        let data = e * e.adjoint();
        Self::symmetrized(v.field(), data)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.data[(i, j)]
    }

    pub fn re(&self) -> DMatrix<f64> {
        self.data.map(|z| z.re)
    }

    pub fn im(&self) -> DMatrix<f64> {
        self.data.map(|z| z.im)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.data[(i, i)].re).sum()
    }

    /// Frobenius inner product `<A, B> = Tr(A B)`, real for self-adjoint pairs.
    pub fn inner(&self, other: &HermitianMatrix) -> Result<f64> {
        ensure_field(self.field, other.field)?;
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &HermitianMatrix) -> f64 {
        // Tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij)
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    /// `Re(x† A x)`.
    pub fn quad_form(&self, x: &KVector) -> Result<f64> {
        ensure_field(self.field, x.field())?;
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(quad_form_raw(&self.data, x.entries()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            field: self.field,
            data: self.data.scale(c),
        }
    }

    /// `sum_i w_i M_i` over matrices of one field and size.
    pub fn linear_combination(terms: &[(f64, &HermitianMatrix)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidInput("empty linear combination".into()))?;
        let mut data = DMatrix::zeros(first.dim(), first.dim());
        for (w, m) in terms {
            ensure_field(first.field, m.field)?;
            if m.dim() != first.dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    found: m.dim(),
                });
            }
            data.zip_apply(&m.data, |acc, b| *acc += b * *w);
        }
        Ok(Self::symmetrized(first.field, data))
    }

    /// `U M U†` for a square `U` of the same size.
    pub fn congruence(&self, u: &DMatrix<C64>) -> Result<Self> {
        if u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.ncols(),
            });
        }
        if self.field == Field::Real && u.iter().any(|z| z.im != 0.0) {
            return Err(Error::InvalidInput(
                "complex congruence applied to a real matrix".into(),
            ));
        }
        Ok(Self::symmetrized(self.field, u * &self.data * u.adjoint()))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest eigenvalue magnitude.
    pub fn spectral_norm(&self) -> f64 {
        let s = eigh_raw(self);
        s.eigenvalues
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max)
    }

    /// Max-norm of the commutator `AB - BA`.
    pub fn commutator_norm(&self, other: &HermitianMatrix) -> f64 {
        let ab = &self.data * &other.data;
        let ba = &other.data * &self.data;
        (ab - ba).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn quad_form_raw(a: &DMatrix<C64>, x: &DVector<C64>) -> f64 {
    let n = x.len();
    let mut acc = 0.0;
    for j in 0..n {
        let xj = x[j];
        let mut col = C64::new(0.0, 0.0);
        for i in 0..n {
            col += x[i].conj() * a[(i, j)];
        }
        acc += (col * xj).re;
    }
    acc
}

/// Eigenvalues in descending order with an orthonormal eigenbasis.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors, in the order of `eigenvalues`.
    pub basis: DMatrix<C64>,
}

impl SpectralDecomposition {
    pub fn max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn min(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// `V diag(f(lambda)) V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> DMatrix<C64> {
        let mut scaled = self.basis.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= w);
        }
        scaled * self.basis.adjoint()
    }

    pub fn reconstruct(&self) -> DMatrix<C64> {
        self.reconstruct_with(|v| v)
    }
}

/// Eigendecomposition of a self-adjoint matrix.
pub fn eigh(h: &HermitianMatrix) -> Result<SpectralDecomposition> {
    if h.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    Ok(eigh_raw(h))
}

fn eigh_raw(h: &HermitianMatrix) -> SpectralDecomposition {
    let (values, vectors): (Vec<f64>, DMatrix<C64>) = match h.field {
        Field::Real => {
            let eig = h.re().symmetric_eigen();
            (
                eig.eigenvalues.iter().copied().collect(),
                eig.eigenvectors.map(|v| C64::new(v, 0.0)),
            )
        }
        Field::Complex => {
            let eig = h.data.clone().symmetric_eigen();
            (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
        }
    };
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let eigenvalues = order.iter().map(|&i| values[i]).collect();
    let basis = DMatrix::from_fn(vectors.nrows(), order.len(), |r, c| vectors[(r, order[c])]);
    SpectralDecomposition { eigenvalues, basis }
}

pub(crate) fn lambda_max(h: &HermitianMatrix) -> f64 {
    eigh_raw(h).max()
}

/// Euclidean projection of `v` onto the probability simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - 1.0) / (i + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// A positive semidefinite matrix of unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(HermitianMatrix);

impl DensityMatrix {
    pub const TRACE_TOL: f64 = 1e-9;
    pub const PSD_TOL: f64 = 1e-9;

    pub fn new(h: HermitianMatrix) -> Result<Self> {
        let tr = h.trace();
        if (tr - 1.0).abs() > Self::TRACE_TOL {
            return Err(Error::InvalidInput(format!(
                "density matrix has trace {tr}, expected 1"
            )));
        }
        let min = eigh(&h)?.min();
        if min < -Self::PSD_TOL {
            return Err(Error::NotPsd {
                index: None,
                min_eigenvalue: min,
            });
        }
        Ok(Self(h))
    }

    /// `I / n`.
    pub fn maximally_mixed(n: usize, field: Field) -> Self {
        Self(HermitianMatrix::identity(n, field).scaled(1.0 / n as f64))
    }

    /// `v v† / ||v||^2`.
    pub fn pure(v: &KVector) -> Result<Self> {
        let v = v.normalized()?;
        Ok(Self(HermitianMatrix::outer(&v)))
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> HermitianMatrix {
        self.0
    }
}

impl std::ops::Deref for DensityMatrix {
    type Target = HermitianMatrix;

    fn deref(&self) -> &HermitianMatrix {
        &self.0
    }
}

/// Frobenius-nearest density matrix: eigen-decompose and project the
/// spectrum onto the probability simplex.
pub fn project_spectrahedron(h: &HermitianMatrix) -> Result<DensityMatrix> {
    let eig = eigh(h)?;
    let projected = project_simplex(&eig.eigenvalues);
    let projected_eig = SpectralDecomposition {
        eigenvalues: projected,
        basis: eig.basis,
    };
    Ok(DensityMatrix(HermitianMatrix::symmetrized(
        h.field,
        projected_eig.reconstruct(),
    )))
}

/// Low-rank factor `U` with `U U† ≈ X`.
#[derive(Debug, Clone)]
pub struct GramFactor {
    pub field: Field,
    /// `n x rank`; column `j` is `sqrt(lambda_j) v_j`.
    pub factor: DMatrix<C64>,
    pub rank: usize,
    pub eigenvalues: Vec<f64>,
}

/// Relative eigenvalue threshold separating the numerical null space.
pub const RANK_THRESHOLD: f64 = 1e-8;
/// Most negative eigenvalue tolerated by [`gram_factor`].
pub const GRAM_NEGATIVE_TOL: f64 = 1e-8;

/// Factors a PSD matrix as `U U†`, keeping eigenvalues above
/// `RANK_THRESHOLD * lambda_max`.
pub fn gram_factor(x: &HermitianMatrix) -> Result<GramFactor> {
    let eig = eigh(x)?;
    if eig.min() < -GRAM_NEGATIVE_TOL {
        return Err(Error::NotPsd {
            index: None,
            min_eigenvalue: eig.min(),
        });
    }
    Ok(gram_from_spectrum(x.field, &eig))
}

pub(crate) fn gram_from_spectrum(field: Field, eig: &SpectralDecomposition) -> GramFactor {
    let cutoff = RANK_THRESHOLD * eig.max().max(0.0);
    let rank = eig.eigenvalues.iter().filter(|&&v| v > cutoff).count();
    let n = eig.basis.nrows();
    let factor = DMatrix::from_fn(n, rank, |i, j| eig.basis[(i, j)] * eig.eigenvalues[j].sqrt());
    GramFactor {
        field,
        factor,
        rank,
        eigenvalues: eig.eigenvalues.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_norm(m: &DMatrix<C64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn identity_spectrum() {
        let s = eigh(&HermitianMatrix::identity(3, Field::Real)).unwrap();
        for v in s.eigenvalues {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn diagonal_spectrum_is_descending() {
        let s = eigh(&HermitianMatrix::diagonal(&[1.0, 4.0], Field::Real)).unwrap();
        assert!((s.eigenvalues[0] - 4.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_reconstruction() {
        let data = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(2.0, 0.0),
                C64::new(0.5, -1.0),
                C64::new(0.5, 1.0),
                C64::new(-1.0, 0.0),
            ],
        );
        let h = HermitianMatrix::new(Field::Complex, data.clone()).unwrap();
        let s = eigh(&h).unwrap();
        assert!(max_norm(&(s.reconstruct() - data)) < 1e-12);
        let gram = s.basis.adjoint() * &s.basis;
        assert!(max_norm(&(gram - DMatrix::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn non_finite_entries_rejected() {
        let mut m = DMatrix::<f64>::identity(2, 2);
        m[(0, 1)] = f64::NAN;
        assert!(HermitianMatrix::from_real(m).is_err());
    }

    #[test]
    fn real_matrix_with_imaginary_part_rejected() {
        let mut m = DMatrix::<C64>::identity(2, 2);
        m[(0, 1)] = C64::new(0.0, 1.0);
        m[(1, 0)] = C64::new(0.0, -1.0);
        assert!(HermitianMatrix::new(Field::Real, m).is_err());
    }

    #[test]
    fn simplex_projection_examples() {
        assert_eq!(project_simplex(&[2.0, 0.0]), vec![1.0, 0.0]);
        let p = project_simplex(&[0.6, 0.6]);
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn spectrahedron_fixed_point_and_examples() {
        let mixed = DensityMatrix::maximally_mixed(4, Field::Complex);
        let p = project_spectrahedron(&mixed).unwrap();
        assert!(max_norm(&(p.as_matrix() - mixed.as_matrix())) < 1e-15);

        let p = project_spectrahedron(&HermitianMatrix::diagonal(&[2.0, 0.0], Field::Real)).unwrap();
        assert!((p.entry(0, 0).re - 1.0).abs() < 1e-14);
        assert!(p.entry(1, 1).re.abs() < 1e-14);

        let p = project_spectrahedron(&HermitianMatrix::diagonal(&[0.6, 0.6], Field::Real)).unwrap();
        assert!((p.entry(0, 0).re - 0.5).abs() < 1e-14);
        assert!((p.entry(1, 1).re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn gram_factor_ranks() {
        let e1 = KVector::basis(3, 0, Field::Real);
        let g = gram_factor(&HermitianMatrix::outer(&e1)).unwrap();
        assert_eq!(g.rank, 1);
        assert!((g.factor[(0, 0)].norm() - 1.0).abs() < 1e-14);
        assert!(g.factor[(1, 0)].norm() < 1e-14 && g.factor[(2, 0)].norm() < 1e-14);

        let g = gram_factor(&DensityMatrix::maximally_mixed(4, Field::Real)).unwrap();
        assert_eq!(g.rank, 4);

        let g = gram_factor(&HermitianMatrix::diagonal(&[0.5, 0.5, 0.0], Field::Real)).unwrap();
        assert_eq!(g.rank, 2);
        let rec = &g.factor * g.factor.adjoint();
        let want = HermitianMatrix::diagonal(&[0.5, 0.5, 0.0], Field::Real);
        assert!(max_norm(&(rec - want.as_matrix())) < 1e-9);
    }

    #[test]
    fn gram_factor_rejects_indefinite() {
        let h = HermitianMatrix::diagonal(&[1.0, -1e-6], Field::Real);
        assert!(matches!(gram_factor(&h), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(HermitianMatrix::identity(2, Field::Real)).is_err());
        assert!(DensityMatrix::new(HermitianMatrix::diagonal(&[1.5, -0.5], Field::Real)).is_err());
        assert!(DensityMatrix::new(HermitianMatrix::diagonal(&[0.25, 0.75], Field::Real)).is_ok());
    }

    #[test]
    fn mixed_field_inner_product_rejected() {
        let a = HermitianMatrix::identity(2, Field::Real);
        let b = HermitianMatrix::identity(2, Field::Complex);
        assert!(matches!(a.inner(&b), Err(Error::FieldMismatch { .. })));
    }
}
