//! Pseudo-moment vectors and their moment matrices.
//!
//! Real field: one coordinate per degree-`2k` monomial, `y_gamma = pEx[x^gamma]`.
//! Complex field: the Hermitian moment matrix `M_ab = pEx[conj(x)^{alpha_a} x^{alpha_b}]`
//! over degree-`k` monomials, stored as its diagonal plus real and imaginary
//! parts of the strict upper triangle.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde_json::{json, Value};

use super::basis::{factorial_product, MonomialBasis};
use super::poly::Poly;
use crate::error::{Error, Result};
use crate::field::{eigh, DensityMatrix, Field, HermitianMatrix, KVector, C64};

pub const NORMALIZATION_TOL: f64 = 1e-8;
pub const MOMENT_PSD_TOL: f64 = 1e-8;

/// Coordinate system for moment vectors of a given field, `n` and `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentLayout {
    field: Field,
    n: usize,
    k: usize,
    half: MonomialBasis,
    full: Option<MonomialBasis>,
    /// Complex only: coordinate of `M_ab`, `a <= b` (diagonal, or real part with
    /// the imaginary part at the next coordinate).
    pair: Vec<Vec<usize>>,
    /// Sparse moment-matrix entries `(row, col, weight)` of each coordinate.
    entries: Vec<Vec<(usize, usize, C64)>>,
}

impl MomentLayout {
    pub fn new(field: Field, n: usize, k: usize) -> Arc<Self> {
        let half = MonomialBasis::new(n, k);
        let size = half.len();
        match field {
            Field::Real => {
                let full = MonomialBasis::new(n, 2 * k);
                let mut entries = vec![Vec::new(); full.len()];
                for a in 0..size {
                    for b in 0..size {
                        let key: Vec<u32> = half.get(a).iter().zip(half.get(b)).map(|(x, y)| x + y).collect();
                        let c = full.index_of(&key).expect("sum of degree-k exponents has degree 2k");
                        entries[c].push((a, b, C64::new(1.0, 0.0)));
                    }
                }
                Arc::new(Self {
                    field,
                    n,
                    k,
                    half,
                    full: Some(full),
                    pair: Vec::new(),
                    entries,
                })
            }
            Field::Complex => {
                let mut pair = vec![vec![usize::MAX; size]; size];
                let mut entries = Vec::with_capacity(size * size);
                for a in 0..size {
                    pair[a][a] = entries.len();
                    entries.push(vec![(a, a, C64::new(1.0, 0.0))]);
                    for b in (a + 1)..size {
                        pair[a][b] = entries.len();
                        entries.push(vec![(a, b, C64::new(1.0, 0.0)), (b, a, C64::new(1.0, 0.0))]);
                        entries.push(vec![(a, b, C64::new(0.0, 1.0)), (b, a, C64::new(0.0, -1.0))]);
                    }
                }
                Arc::new(Self {
                    field,
                    n,
                    k,
                    half,
                    full: None,
                    pair,
                    entries,
                })
            }
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Side length of the moment matrix.
    pub fn matrix_size(&self) -> usize {
        self.half.len()
    }

    /// Number of real coordinates.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn half_basis(&self) -> &MonomialBasis {
        &self.half
    }

    pub(crate) fn entries(&self) -> &[Vec<(usize, usize, C64)>] {
        &self.entries
    }

    /// `pEx` of a single key as `sum_j w_j y_j`.
    fn key_weights(&self, key: &[u32]) -> Vec<(usize, C64)> {
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self.field {
            Field::Real => {
                let full = self.full.as_ref().expect("real layout has a full basis");
                vec![(full.index_of(key).expect("key of degree 2k"), one)]
            }
            Field::Complex => {
                let a = self.half.index_of(&key[..self.n]).expect("conjugate part of degree k");
                let b = self.half.index_of(&key[self.n..]).expect("holomorphic part of degree k");
                if a == b {
                    vec![(self.pair[a][a], one)]
                } else if a < b {
                    let c = self.pair[a][b];
                    vec![(c, one), (c + 1, i)]
                } else {
                    let c = self.pair[b][a];
                    vec![(c, one), (c + 1, -i)]
                }
            }
        }
    }

    /// Coefficients `c` with `<c, y> = Re pEx[p]` for a polynomial of degree `2k`.
    pub fn functional(&self, p: &Poly) -> Vec<f64> {
        let mut c = vec![0.0; self.len()];
        for (key, coeff) in p.terms() {
            for (j, w) in self.key_weights(key) {
                c[j] += (coeff * w).re;
            }
        }
        c
    }

    /// `pEx[p]` as a complex number.
    pub fn apply(&self, p: &Poly, values: &[f64]) -> C64 {
        p.terms()
            .iter()
            .map(|(key, coeff)| {
                let v: C64 = self.key_weights(key).iter().map(|&(j, w)| w * values[j]).sum();
                coeff * v
            })
            .sum()
    }

    /// Coefficients of `pEx[|x|^{2k}]`.
    pub fn normalization(&self) -> Vec<f64> {
        let id = HermitianMatrix::identity(self.n, self.field);
        self.functional(&Poly::quadratic(&id).pow(self.k))
    }

    pub fn moment_matrix(&self, values: &[f64]) -> HermitianMatrix {
        let size = self.matrix_size();
        let mut m = DMatrix::<C64>::zeros(size, size);
        for (entries, &y) in self.entries.iter().zip(values) {
            for &(a, b, w) in entries {
                m[(a, b)] += w * y;
            }
        }
        HermitianMatrix::symmetrized(self.field, m)
    }

    /// Moments of the point mass at `x`.
    pub fn point_values(&self, x: &KVector) -> Vec<f64> {
        let xs: Vec<C64> = x.entries().iter().copied().collect();
        let mono = |e: &[u32]| -> C64 {
            e.iter().zip(&xs).map(|(&p, z)| z.powu(p)).product()
        };
        match self.field {
            Field::Real => self
                .full
                .as_ref()
                .expect("real layout has a full basis")
                .exponents()
                .iter()
                .map(|e| mono(e).re)
                .collect(),
            Field::Complex => {
                let size = self.matrix_size();
                let mut out = vec![0.0; self.len()];
                for a in 0..size {
                    let xa = mono(self.half.get(a)).conj();
                    for b in a..size {
                        let v = xa * mono(self.half.get(b));
                        let c = self.pair[a][b];
                        if a == b {
                            out[c] = v.re;
                        } else {
                            out[c] = v.re;
                            out[c + 1] = v.im;
                        }
                    }
                }
                out
            }
        }
    }

    /// Moments of the uniform distribution on the unit sphere.
    pub fn uniform_values(&self) -> Vec<f64> {
        let n = self.n as f64;
        match self.field {
            Field::Real => {
                // E[x^{2a}] = prod (2a_i - 1)!! / (n (n + 2) ... (n + 2k - 2))
                let denom: f64 = (0..self.k).map(|j| n + 2.0 * j as f64).product();
                self.full
                    .as_ref()
                    .expect("real layout has a full basis")
                    .exponents()
                    .iter()
                    .map(|e| {
                        if e.iter().any(|&p| p % 2 == 1) {
                            0.0
                        } else {
                            let num: f64 = e
                                .iter()
                                .map(|&p| (1..p).step_by(2).map(f64::from).product::<f64>())
                                .product();
                            num / denom
                        }
                    })
                    .collect()
            }
            Field::Complex => {
                // E|x^a|^2 = a! (n - 1)! / (n + k - 1)!
                let ratio: f64 = (0..self.k).map(|j| 1.0 / (n + j as f64)).product();
                let mut out = vec![0.0; self.len()];
                for a in 0..self.matrix_size() {
                    out[self.pair[a][a]] = factorial_product(self.half.get(a)) * ratio;
                }
                out
            }
        }
    }
}

/// A degree-`k` pseudo-moment vector.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    layout: Arc<MomentLayout>,
    values: Vec<f64>,
}

impl MomentVector {
    /// Validates normalization and moment-matrix positivity.
    pub fn new(layout: Arc<MomentLayout>, values: Vec<f64>) -> Result<Self> {
        let m = Self::new_unchecked(layout, values)?;
        let norm = m.normalization_value();
        if (norm - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidInput(format!(
                "pseudo-expectation of |x|^2k is {norm}, expected 1"
            )));
        }
        let min = m.min_eigenvalue()?;
        if min < -MOMENT_PSD_TOL {
            return Err(Error::NotPsd {
                index: None,
                min_eigenvalue: min,
            });
        }
        Ok(m)
    }

    pub(crate) fn new_unchecked(layout: Arc<MomentLayout>, values: Vec<f64>) -> Result<Self> {
        if values.len() != layout.len() {
            return Err(Error::DimensionMismatch {
                expected: layout.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("moment vector has non-finite entries".into()));
        }
        Ok(Self { layout, values })
    }

    pub fn point(field: Field, k: usize, x: &KVector) -> Result<Self> {
        if x.field() != field {
            return Err(Error::FieldMismatch {
                expected: field,
                found: x.field(),
            });
        }
        let layout = MomentLayout::new(field, x.len(), k);
        let values = layout.point_values(x);
        Self::new_unchecked(layout, values)
    }

    /// Level-one moments with `pEx[x x^dagger] = x`. In the complex field the
    /// moment matrix is the transpose of `x`.
    pub fn from_density(x: &DensityMatrix) -> Self {
        let layout = MomentLayout::new(x.field(), x.dim(), 1);
        let n = x.dim();
        let mut values = vec![0.0; layout.len()];
        for a in 0..n {
            for b in a..n {
                let v = x.entry(a, b);
                match x.field() {
                    Field::Real => {
                        let mut key = vec![0u32; n];
                        key[a] += 1;
                        key[b] += 1;
                        let full = layout.full.as_ref().expect("real layout has a full basis");
                        values[full.index_of(&key).expect("degree-two key")] = v.re;
                    }
                    Field::Complex => {
                        let c = layout.pair[a][b];
                        values[c] = v.re;
                        if a != b {
                            values[c + 1] = -v.im;
                        }
                    }
                }
            }
        }
        Self { layout, values }
    }

    /// `pEx[x x^dagger]` of a level-one moment vector.
    pub fn density(&self) -> Result<DensityMatrix> {
        if self.k() != 1 {
            return Err(Error::InvalidInput(format!(
                "a density matrix needs level-one moments, got k = {}",
                self.k()
            )));
        }
        let m = self.matrix();
        let x = match self.field() {
            Field::Real => m,
            Field::Complex => HermitianMatrix::symmetrized(Field::Complex, m.as_matrix().transpose()),
        };
        DensityMatrix::new(x)
    }

    pub fn uniform(field: Field, n: usize, k: usize) -> Self {
        let layout = MomentLayout::new(field, n, k);
        let values = layout.uniform_values();
        Self { layout, values }
    }

    pub fn layout(&self) -> &Arc<MomentLayout> {
        &self.layout
    }

    pub fn field(&self) -> Field {
        self.layout.field
    }

    pub fn n(&self) -> usize {
        self.layout.n
    }

    pub fn k(&self) -> usize {
        self.layout.k
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn normalization_value(&self) -> f64 {
        dot(&self.layout.normalization(), &self.values)
    }

    pub fn matrix(&self) -> HermitianMatrix {
        self.layout.moment_matrix(&self.values)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(eigh(&self.matrix())?.min())
    }

    /// `pEx[p]`.
    pub fn apply(&self, p: &Poly) -> C64 {
        self.layout.apply(p, &self.values)
    }

    pub fn to_json(&self) -> Value {
        let fmt = |e: &[u32]| e.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        let mut moments = BTreeMap::new();
        match self.field() {
            Field::Real => {
                let full = self.layout.full.as_ref().expect("real layout has a full basis");
                for (e, v) in full.exponents().iter().zip(&self.values) {
                    moments.insert(fmt(e), json!(v));
                }
            }
            Field::Complex => {
                let half = &self.layout.half;
                for a in 0..half.len() {
                    for b in a..half.len() {
                        let c = self.layout.pair[a][b];
                        let im = if a == b { 0.0 } else { self.values[c + 1] };
                        moments.insert(
                            format!("{}|{}", fmt(half.get(a)), fmt(half.get(b))),
                            json!([self.values[c], im]),
                        );
                    }
                }
            }
        }
        json!({
            "n": self.n(),
            "k": self.k(),
            "field": self.field(),
            "moments": moments,
        })
    }

    pub fn from_json(doc: &Value) -> Result<Self> {
        let get_usize = |name: &str| -> Result<usize> {
            doc.get(name)
                .and_then(Value::as_u64)
                .map(|v| v as usize)
                .ok_or_else(|| Error::Parse(format!("missing or invalid \"{name}\"")))
        };
        let n = get_usize("n")?;
        let k = get_usize("k")?;
        if n == 0 || k == 0 {
            return Err(Error::Parse("\"n\" and \"k\" must be positive".into()));
        }
        let field: Field = serde_json::from_value(
            doc.get("field").cloned().ok_or_else(|| Error::Parse("missing \"field\"".into()))?,
        )?;
        let moments = doc
            .get("moments")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Parse("missing \"moments\" object".into()))?;
        let layout = MomentLayout::new(field, n, k);
        let parse_exp = |s: &str| -> Result<Vec<u32>> {
            s.split(',')
                .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad multi-index '{s}'"))))
                .collect()
        };
        let mut values = vec![f64::NAN; layout.len()];
        for (key, v) in moments {
            match field {
                Field::Real => {
                    let e = parse_exp(key)?;
                    let full = layout.full.as_ref().expect("real layout has a full basis");
                    let idx = full
                        .index_of(&e)
                        .ok_or_else(|| Error::Parse(format!("multi-index '{key}' is not of degree {}", 2 * k)))?;
                    values[idx] = v
                        .as_f64()
                        .ok_or_else(|| Error::Parse(format!("moment '{key}' is not a number")))?;
                }
                Field::Complex => {
                    let (l, r) = key
                        .split_once('|')
                        .ok_or_else(|| Error::Parse(format!("complex key '{key}' needs the form 'a|b'")))?;
                    let a = layout.half.index_of(&parse_exp(l)?);
                    let b = layout.half.index_of(&parse_exp(r)?);
                    let (a, b) = a.zip(b).ok_or_else(|| Error::Parse(format!("multi-indices in '{key}' must have degree {k}")))?;
                    if a > b {
                        return Err(Error::Parse(format!("key '{key}' is below the diagonal")));
                    }
                    let pair = v
                        .as_array()
                        .filter(|p| p.len() == 2)
                        .and_then(|p| Some((p[0].as_f64()?, p[1].as_f64()?)))
                        .ok_or_else(|| Error::Parse(format!("moment '{key}' must be [re, im]")))?;
                    let c = layout.pair[a][b];
                    values[c] = pair.0;
                    if a != b {
                        values[c + 1] = pair.1;
                    } else if pair.1 != 0.0 {
                        return Err(Error::Parse(format!("diagonal moment '{key}' must be real")));
                    }
                }
            }
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Parse("moment vector is incomplete".into()));
        }
        Self::new(layout, values)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
