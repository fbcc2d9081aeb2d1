//! Problem instances, generators and the JSON instance format.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{eigh, ensure_field, quad_form_raw, Field, HermitianMatrix, KVector, C64};
use crate::rng::Rng;
use crate::sampling::sample_sphere_uniform;

/// PSD tolerance for forms, relative to their spectral norm.
pub const FORM_PSD_TOL: f64 = 1e-10;
/// Accepted deviation of `|x|` from 1 in [`ProblemInstance::evaluate`].
pub const UNIT_TOL: f64 = 1e-9;
/// Accepted deviation from self-adjointness in instance files, relative to the largest entry.
pub const FILE_HERMITIAN_TOL: f64 = 1e-10;

/// An ordered list of `d` PSD forms on `K^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    field: Field,
    n: usize,
    forms: Vec<HermitianMatrix>,
}

impl ProblemInstance {
    pub fn new(field: Field, forms: Vec<HermitianMatrix>) -> Result<Self> {
        let first = forms
            .first()
            .ok_or_else(|| Error::InvalidInput("instance needs at least one form".into()))?;
        let n = first.dim();
        for (i, a) in forms.iter().enumerate() {
            ensure_field(field, a.field())?;
            if a.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: a.dim(),
                });
            }
            if a.max_abs() == 0.0 {
                return Err(Error::InvalidInput(format!("form {i} is identically zero")));
            }
            let eig = eigh(a)?;
            let scale = eig.max().abs().max(eig.min().abs());
            if eig.min() < -FORM_PSD_TOL * scale {
                return Err(Error::NotPsd {
                    index: Some(i),
                    min_eigenvalue: eig.min(),
                });
            }
        }
        Ok(Self { field, n, forms })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.forms.len()
    }

    pub fn forms(&self) -> &[HermitianMatrix] {
        &self.forms
    }

    /// `<x, A_i x>` for every form.
    pub fn form_values(&self, x: &KVector) -> Result<Vec<f64>> {
        ensure_field(self.field, x.field())?;
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(self
            .forms
            .iter()
            .map(|a| quad_form_raw(a.as_matrix(), x.entries()))
            .collect())
    }

    /// Geometric mean `(prod_i <x, A_i x>)^{1/d}` at a unit vector `x`.
    pub fn evaluate(&self, x: &KVector) -> Result<f64> {
        let norm = x.norm();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidInput(format!(
                "evaluation point has norm {norm}, expected 1"
            )));
        }
        Ok(geometric_mean(&self.form_values(x)?))
    }

    /// Forms rescaled as `A_i -> c_i A_i`.
    pub fn scaled(&self, c: &[f64]) -> Result<Self> {
        if c.len() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                found: c.len(),
            });
        }
        if c.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput("scales must be positive".into()));
        }
        let forms = self.forms.iter().zip(c).map(|(a, &s)| a.scaled(s)).collect();
        Self::new(self.field, forms)
    }

    /// Every form conjugated as `U A_i U†` for a unitary (or orthogonal) `U`.
    pub fn conjugated(&self, u: &DMatrix<C64>) -> Result<Self> {
        let forms = self
            .forms
            .iter()
            .map(|a| a.congruence(u))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.field, forms)
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = InstanceDoc {
            field: self.field,
            n: self.n,
            forms: self
                .forms
                .iter()
                .map(|a| FormDoc {
                    re: rows(&a.re()),
                    im: match self.field {
                        Field::Real => None,
                        Field::Complex => Some(rows(&a.im())),
                    },
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: InstanceDoc = serde_json::from_str(text)?;
        if doc.n == 0 {
            return Err(Error::Parse("\"n\" must be positive".into()));
        }
        if doc.forms.is_empty() {
            return Err(Error::Parse("\"forms\" must not be empty".into()));
        }
        let mut forms = Vec::with_capacity(doc.forms.len());
        for (i, f) in doc.forms.iter().enumerate() {
            let re = matrix_from_rows(&f.re, doc.n)
                .map_err(|e| Error::Parse(format!("form {i}, \"re\": {e}")))?;
            let im = match (&f.im, doc.field) {
                (None, _) => DMatrix::zeros(doc.n, doc.n),
                (Some(im), Field::Complex) => matrix_from_rows(im, doc.n)
                    .map_err(|e| Error::Parse(format!("form {i}, \"im\": {e}")))?,
                (Some(im), Field::Real) => {
                    let im = matrix_from_rows(im, doc.n)
                        .map_err(|e| Error::Parse(format!("form {i}, \"im\": {e}")))?;
                    if im.iter().any(|&v| v != 0.0) {
                        return Err(Error::Parse(format!(
                            "form {i} has imaginary parts but the field is real"
                        )));
                    }
                    im
                }
            };
            let data = DMatrix::from_fn(doc.n, doc.n, |r, c| C64::new(re[(r, c)], im[(r, c)]));
            let scale = data.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let asym = (&data - data.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if asym > FILE_HERMITIAN_TOL * scale.max(1.0) {
                return Err(Error::Parse(format!(
                    "form {i} is not self-adjoint (deviation {asym:e})"
                )));
            }
            forms.push(HermitianMatrix::new(doc.field, data).map_err(|e| match e {
                Error::InvalidInput(m) => Error::Parse(format!("form {i}: {m}")),
                other => other,
            })?);
        }
        Self::new(doc.field, forms)
    }
}

/// `exp(mean(ln v_i))`, or 0 when any value is not positive.
pub fn geometric_mean(values: &[f64]) -> f64 {
    if values.iter().any(|&v| v <= 0.0) {
        return 0.0;
    }
    (values.iter().map(|v| v.ln()).sum::<f64>() / values.len() as f64).exp()
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    field: Field,
    n: usize,
    forms: Vec<FormDoc>,
}

#[derive(Serialize, Deserialize)]
struct FormDoc {
    re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<Vec<f64>>>,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn matrix_from_rows(rows: &[Vec<f64>], n: usize) -> std::result::Result<DMatrix<f64>, String> {
    if rows.len() != n {
        return Err(format!("expected {n} rows, found {}", rows.len()));
    }
    for (r, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(format!("row {r} has {} entries, expected {n}", row.len()));
        }
    }
    Ok(DMatrix::from_fn(n, n, |r, c| rows[r][c]))
}

/// Forms `scale_i v_i v_i†` for unit vectors `v_i`.
pub fn gen_rank_one(vectors: &[KVector], scales: &[f64]) -> Result<ProblemInstance> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::InvalidInput("need at least one vector".into()))?;
    if scales.len() != vectors.len() {
        return Err(Error::DimensionMismatch {
            expected: vectors.len(),
            found: scales.len(),
        });
    }
    let mut forms = Vec::with_capacity(vectors.len());
    for (i, (v, &s)) in vectors.iter().zip(scales).enumerate() {
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::InvalidInput(format!("vector {i} is zero")));
        }
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidInput(format!("vector {i} has norm {norm}, expected 1")));
        }
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidInput(format!("scale {i} must be positive")));
        }
        forms.push(HermitianMatrix::outer(v).scaled(s));
    }
    ProblemInstance::new(first.field(), forms)
}

/// `d` unit rank-one forms built from uniform sphere vectors.
pub fn gen_random_rank_one(n: usize, d: usize, field: Field, rng: &mut Rng) -> Result<ProblemInstance> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidInput("n and d must be positive".into()));
    }
    let vectors: Vec<KVector> = (0..d).map(|_| sample_sphere_uniform(n, field, rng)).collect();
    gen_rank_one(&vectors, &vec![1.0; d])
}

/// Diagonal 0/1 forms whose product is the monomial `x^{2 beta}`.
pub fn gen_monomial(beta: &[u32]) -> Result<ProblemInstance> {
    if beta.is_empty() || beta.iter().all(|&b| b == 0) {
        return Err(Error::InvalidInput("multi-index must have positive degree".into()));
    }
    let n = beta.len();
    let mut forms = Vec::new();
    for (i, &b) in beta.iter().enumerate() {
        let mut diag = vec![0.0; n];
        diag[i] = 1.0;
        for _ in 0..b {
            forms.push(HermitianMatrix::diagonal(&diag, Field::Real));
        }
    }
    ProblemInstance::new(Field::Real, forms)
}

/// The pair `(A, A^{-1})` for positive definite `A`.
pub fn gen_kantorovich(a: &HermitianMatrix) -> Result<ProblemInstance> {
    let eig = eigh(a)?;
    if !(eig.min() > 1e-10 * eig.max()) || eig.max() <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            min: eig.min(),
            max: eig.max(),
        });
    }
    let inv = HermitianMatrix::new(a.field(), eig.reconstruct_with(|v| 1.0 / v))?;
    ProblemInstance::new(a.field(), vec![a.clone(), inv])
}

/// Golden ratio.
pub const PHI: f64 = 1.618_033_988_749_894_8;

/// Coefficient vectors of the six linear factors of the icosahedral sextic.
pub fn icosahedral_directions() -> [[f64; 3]; 6] {
    [
        [1.0, PHI, 0.0],
        [1.0, -PHI, 0.0],
        [0.0, 1.0, PHI],
        [0.0, 1.0, -PHI],
        [PHI, 0.0, 1.0],
        [-PHI, 0.0, 1.0],
    ]
}

/// Real instance with `n = 3`, `d = 6` whose product of forms is
/// `[5(2 phi - 3) prod_j <w_j, x>]^2`, maximized with value 1 at 12 points.
pub fn gen_icosahedral() -> ProblemInstance {
    let c = (25.0 * (2.0 * PHI - 3.0).powi(2)).powf(1.0 / 6.0);
    let forms = icosahedral_directions()
        .iter()
        .map(|w| {
            let v = KVector::from_real(w);
            HermitianMatrix::outer(&v).scaled(c)
        })
        .collect();
    ProblemInstance::new(Field::Real, forms).expect("icosahedral forms are PSD")
}

/// Undirected simple graph with unit edge weights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl GraphSpec {
    pub fn new(n: usize, edges: Vec<[usize; 2]>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &[u, v] in &edges {
            if u >= n || v >= n {
                return Err(Error::InvalidInput(format!("edge ({u}, {v}) leaves the vertex range 0..{n}")));
            }
            if u == v {
                return Err(Error::InvalidInput(format!("self-loop at vertex {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidInput(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(Self { n, edges })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| [u, v]))
            .collect();
        Self { n, edges }
    }

    /// Cycle `C_m` times `K_2`: `2m` vertices, 3-regular for `m >= 3`.
    pub fn prism(m: usize) -> Self {
        let mut edges = Vec::new();
        for i in 0..m {
            edges.push([i, (i + 1) % m]);
            edges.push([m + i, m + (i + 1) % m]);
            edges.push([i, m + i]);
        }
        Self { n: 2 * m, edges }
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &[u, v] in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn is_regular(&self, degree: usize) -> bool {
        self.degrees().iter().all(|&d| d == degree)
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for &[u, v] in &self.edges {
            a[(u, v)] = 1.0;
            a[(v, u)] = 1.0;
        }
        a
    }

    /// `Q_G = (I - A/3) / 2`.
    pub fn q_matrix(&self) -> HermitianMatrix {
        let q = (DMatrix::identity(self.n, self.n) - self.adjacency() / 3.0) * 0.5;
        HermitianMatrix::from_real(q).expect("finite square matrix")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: GraphSpec = serde_json::from_str(text)?;
        Self::new(g.n, g.edges)
    }
}

/// Instance `(Q_G, n e_1 e_1^T x k, ..., n e_n e_n^T x k)` with `d = nk + 1`.
pub fn gen_maxcut(g: &GraphSpec, k: usize) -> Result<ProblemInstance> {
    if k == 0 {
        return Err(Error::InvalidInput("power k must be at least 1".into()));
    }
    if g.n == 0 || !g.is_regular(3) {
        return Err(Error::InvalidInput("graph must be 3-regular".into()));
    }
    let n = g.n;
    let mut forms = vec![g.q_matrix()];
    for i in 0..n {
        let mut diag = vec![0.0; n];
        diag[i] = n as f64;
        let e = HermitianMatrix::diagonal(&diag, Field::Real);
        forms.extend(std::iter::repeat_n(e, k));
    }
    ProblemInstance::new(Field::Real, forms)
}
