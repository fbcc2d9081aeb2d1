//! Lower bounds on the true optimum for small instances: multistart
//! Riemannian gradient ascent, exhaustive sphere grids and cube enumeration.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::field::{quad_form_raw, Field, KVector, C64};
use crate::instance::{GraphSpec, ProblemInstance};
use crate::rng::SeedStream;
use crate::sampling::sample_sphere_uniform;

pub const MAX_STEPS_PER_RESTART: usize = 10_000;
/// Stationarity threshold on the Riemannian gradient, relative to `max(1, |objective|)`.
pub const GRADIENT_TOL: f64 = 1e-10;
pub const DEFAULT_RESTARTS: usize = 64;
pub const SYMMETRIC_RESTARTS: usize = 256;
pub const MAX_CUBE_DIMENSION: usize = 24;

const ARMIJO: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub best_value: f64,
    pub best_vector: KVector,
    pub restarts: usize,
    /// Fraction of restarts that met the stationarity threshold.
    pub converged_fraction: f64,
    /// Set when no start had a finite objective.
    pub degenerate: bool,
}

/// The forms in real coordinates: `x = a + ib` becomes `u = (a, b)` and
/// `<x, A x> = u^T M u` with `M = [[Re A, -Im A], [Im A, Re A]]`.
struct RealForms {
    mats: Vec<DMatrix<f64>>,
    complex: bool,
}

impl RealForms {
    fn new(inst: &ProblemInstance) -> Self {
        let complex = inst.field() == Field::Complex;
        let mats = inst
            .forms()
            .iter()
            .map(|a| {
                if complex {
                    let (re, im) = (a.re(), a.im());
                    let n = re.nrows();
                    let mut m = DMatrix::zeros(2 * n, 2 * n);
                    m.view_mut((0, 0), (n, n)).copy_from(&re);
                    m.view_mut((n, n), (n, n)).copy_from(&re);
                    m.view_mut((0, n), (n, n)).copy_from(&(-&im));
                    m.view_mut((n, 0), (n, n)).copy_from(&im);
                    m
                } else {
                    a.re()
                }
            })
            .collect();
        Self { mats, complex }
    }

    fn to_real(&self, x: &DVector<C64>) -> DVector<f64> {
        if self.complex {
            DVector::from_iterator(2 * x.len(), x.iter().map(|z| z.re).chain(x.iter().map(|z| z.im)))
        } else {
            x.map(|z| z.re)
        }
    }

    fn to_field(&self, u: &DVector<f64>) -> DVector<C64> {
        if self.complex {
            let n = u.len() / 2;
            DVector::from_fn(n, |i, _| C64::new(u[i], u[n + i]))
        } else {
            u.map(|v| C64::new(v, 0.0))
        }
    }

    /// `sum_i ln u^T M_i u`.
    fn value(&self, u: &DVector<f64>) -> f64 {
        self.mats.iter().map(|m| u.dot(&(m * u)).ln()).sum()
    }

    /// Euclidean gradient of [`Self::value`].
    fn gradient(&self, u: &DVector<f64>) -> DVector<f64> {
        let mut g = DVector::zeros(u.len());
        for m in &self.mats {
            let mu = m * u;
            let q = u.dot(&mu);
            g += mu * (2.0 / q);
        }
        g
    }

    fn riemannian_gradient(&self, u: &DVector<f64>) -> DVector<f64> {
        let g = self.gradient(u);
        let radial = u.dot(&g);
        g - u * radial
    }

    /// Directions along which the objective is constant: the radial one and,
    /// for complex vectors, the global phase.
    fn invariant_directions(&self, u: &DVector<f64>) -> Vec<DVector<f64>> {
        let mut dirs = vec![u.clone()];
        if self.complex {
            let n = u.len() / 2;
            dirs.push(DVector::from_fn(u.len(), |i, _| if i < n { -u[n + i] } else { u[i - n] }));
        }
        dirs
    }

    /// One Riemannian Newton step from `u`; `None` unless `u` lies in a
    /// neighbourhood where the reduced Hessian is negative definite.
    fn newton_step(&self, u: &DVector<f64>) -> Option<DVector<f64>> {
        let dim = u.len();
        let euclid = self.gradient(u);
        let radial = u.dot(&euclid);
        let mut hess = DMatrix::<f64>::zeros(dim, dim);
        for m in &self.mats {
            let mu = m * u;
            let q = u.dot(&mu);
            hess += m * (2.0 / q) - (&mu * mu.transpose()) * (4.0 / (q * q));
        }
        let mut proj = DMatrix::<f64>::identity(dim, dim);
        for v in self.invariant_directions(u) {
            proj -= &v * v.transpose();
        }
        let reduced = &proj * (hess - DMatrix::identity(dim, dim) * radial) * &proj;
        let eig = reduced.symmetric_eigen();
        let g = &proj * euclid;
        let mut step = DVector::zeros(dim);
        let mut kept = 0;
        for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
            let v = eig.eigenvectors.column(j);
            // The projected-out directions are exact zeros of the reduced Hessian.
            if proj.dot(&(v * v.transpose())) < 0.5 {
                continue;
            }
            if !(lambda < 0.0) {
                return None;
            }
            kept += 1;
            step -= v * (v.dot(&g) / lambda);
        }
        if kept == 0 {
            return None;
        }
        let next = u + step;
        let norm = next.norm();
        Some(next / norm)
    }
}

struct Ascent {
    u: DVector<f64>,
    value: f64,
    converged: bool,
}

const MAX_NEWTON_STEPS: usize = 50;

fn ascend(forms: &RealForms, start: DVector<f64>) -> Option<Ascent> {
    let mut u = start;
    let mut h = forms.value(&u);
    if !h.is_finite() {
        return None;
    }
    let threshold = |h: f64| GRADIENT_TOL * h.abs().max(1.0);
    let mut step = 1.0;
    let mut steps = 0;
    // First-order phase: runs until the gain per step drops to roundoff.
    while steps < MAX_STEPS_PER_RESTART {
        let g = forms.riemannian_gradient(&u);
        let gnorm2 = g.norm_squared();
        if gnorm2.sqrt() <= threshold(h) {
            return Some(Ascent { u, value: h, converged: true });
        }
        let mut t = step;
        let mut accepted = None;
        while t > 1e-20 {
            let y = &u + &g * t;
            let y = &y / y.norm();
            let hy = forms.value(&y);
            if hy.is_finite() && hy >= h + ARMIJO * t * gnorm2 {
                accepted = Some((y, hy));
                break;
            }
            t *= 0.5;
        }
        steps += 1;
        let Some((y, hy)) = accepted else { break };
        let gain = hy - h;
        u = y;
        h = hy;
        step = (2.0 * t).min(1e6);
        if gain <= 16.0 * f64::EPSILON * h.abs().max(1.0) {
            break;
        }
    }
    // Second-order phase, accepted while the gradient keeps shrinking.
    let mut gnorm = forms.riemannian_gradient(&u).norm();
    for _ in 0..MAX_NEWTON_STEPS {
        if gnorm <= threshold(h) {
            break;
        }
        let Some(next) = forms.newton_step(&u) else { break };
        let next_norm = forms.riemannian_gradient(&next).norm();
        let hn = forms.value(&next);
        if !(next_norm < gnorm) || !hn.is_finite() {
            break;
        }
        u = next;
        h = hn;
        gnorm = next_norm;
    }
    Some(Ascent { u, value: h, converged: gnorm <= threshold(h) })
}

/// Multistart local maximization of the geometric mean on the unit sphere.
///
/// `starts` are tried first; then uniform random starts fill up `restarts`.
pub fn local_max_sphere(
    inst: &ProblemInstance,
    restarts: usize,
    stream: &SeedStream,
    starts: &[KVector],
) -> Result<OracleResult> {
    if restarts == 0 {
        return Err(Error::InvalidInput("need at least one restart".into()));
    }
    for s in starts {
        if s.field() != inst.field() || s.len() != inst.n() {
            return Err(Error::InvalidInput("start vector does not match the instance".into()));
        }
    }
    let forms = RealForms::new(inst);
    let mut rng = stream.child("oracle-starts").rng();
    let total = restarts.max(starts.len());
    let mut best: Option<Ascent> = None;
    let mut converged = 0;
    for r in 0..total {
        let start = match starts.get(r) {
            Some(s) => s.normalized()?.into_entries(),
            None => sample_sphere_uniform(inst.n(), inst.field(), &mut rng).into_entries(),
        };
        if let Some(run) = ascend(&forms, forms.to_real(&start)) {
            converged += usize::from(run.converged);
            if best.as_ref().is_none_or(|b| run.value > b.value) {
                best = Some(run);
            }
        }
    }
    let field = inst.field();
    Ok(match best {
        Some(b) => {
            let v = KVector::from_parts_unchecked(field, forms.to_field(&b.u));
            OracleResult {
                best_value: inst.evaluate(&v)?,
                best_vector: v,
                restarts: total,
                converged_fraction: converged as f64 / total as f64,
                degenerate: false,
            }
        }
        None => OracleResult {
            best_value: 0.0,
            best_vector: KVector::basis(inst.n(), 0, field),
            restarts: total,
            converged_fraction: 0.0,
            degenerate: true,
        },
    })
}

/// Largest geometric mean over an equal-area grid of the sphere.
///
/// Supports real `n <= 3` and complex `n <= 2`. Sphere points are
/// parametrized by height `z` (uniform levels) and azimuth; for complex
/// `n = 2` the point `(cos(t/2), e^{i phi} sin(t/2))` with `cos t = z` covers
/// all unit vectors up to a global phase.
pub fn grid_max_sphere(inst: &ProblemInstance, resolution: usize) -> Result<f64> {
    if resolution < 16 {
        return Err(Error::InvalidInput("grid resolution must be at least 16".into()));
    }
    let eval = |v: Vec<C64>| -> f64 {
        let x = DVector::from_vec(v);
        let vals: Vec<f64> = inst.forms().iter().map(|a| quad_form_raw(a.as_matrix(), &x)).collect();
        crate::instance::geometric_mean(&vals)
    };
    let r = |v: f64| C64::new(v, 0.0);
    let tau = std::f64::consts::TAU;
    let levels = |count: usize| (0..count).map(move |j| -1.0 + (2 * j + 1) as f64 / count as f64);
    let mut best = 0.0f64;
    match (inst.field(), inst.n()) {
        (_, 1) => best = eval(vec![r(1.0)]),
        (Field::Real, 2) => {
            for j in 0..2 * resolution {
                let t = tau * j as f64 / (2 * resolution) as f64;
                best = best.max(eval(vec![r(t.cos()), r(t.sin())]));
            }
        }
        (Field::Real, 3) => {
            for z in levels(resolution) {
                let rho = (1.0 - z * z).sqrt();
                for j in 0..2 * resolution {
                    let phi = tau * j as f64 / (2 * resolution) as f64;
                    best = best.max(eval(vec![r(rho * phi.cos()), r(rho * phi.sin()), r(z)]));
                }
            }
        }
        (Field::Complex, 2) => {
            for z in levels(resolution) {
                let c = ((1.0 + z) / 2.0).sqrt();
                let s = ((1.0 - z) / 2.0).sqrt();
                for j in 0..2 * resolution {
                    let phi = tau * j as f64 / (2 * resolution) as f64;
                    best = best.max(eval(vec![r(c), C64::from_polar(s, phi)]));
                }
            }
        }
        (field, n) => {
            return Err(Error::UnsupportedDimension(format!(
                "grid search supports real n <= 3 and complex n <= 2, got {field} n = {n}"
            )))
        }
    }
    Ok(best)
}

/// `max_{x in {±1/sqrt(n)}^n} x^T Q_G x` by enumeration.
pub fn cube_max(g: &GraphSpec) -> Result<f64> {
    if g.n == 0 || g.n > MAX_CUBE_DIMENSION {
        return Err(Error::UnsupportedDimension(format!(
            "cube enumeration supports 1 <= n <= {MAX_CUBE_DIMENSION}, got {}",
            g.n
        )));
    }
    // x^T Q_G x = (3n - s^T A s) / (6n) for a sign vector s; s and -s agree.
    let n = g.n;
    let mut best_cut_term = i64::MIN;
    for mask in 0u32..(1u32 << (n - 1)) {
        let sign = |v: usize| if (mask >> v) & 1 == 1 { -1i64 } else { 1 };
        let sas: i64 = g.edges.iter().map(|&[u, v]| 2 * sign(u) * sign(v)).sum();
        best_cut_term = best_cut_term.max(3 * n as i64 - sas);
    }
    Ok(best_cut_term as f64 / (6 * n) as f64)
}
