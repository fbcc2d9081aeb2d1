//! Log-barrier interior-point method over pseudo-moment vectors.
//!
//! Maximizes `f(y) + mu ln det M(y)` subject to `pEx[|x|^{2k}] = 1`, where
//! `f` is either the averaged log of the product functionals or their mean.
//! The normalization is eliminated by solving for the coordinate with the
//! largest coefficient. Each barrier stage is solved by damped Newton steps
//! and `mu` shrinks geometrically; at a central point the objective is within
//! `mu N` of the optimum, `N` being the moment-matrix size.

use std::sync::Arc;
use std::time::Instant;

use nalgebra::{Cholesky, DMatrix, DVector};

use super::basis::binomial;
use super::functional::all_product_functionals;
use super::moments::{dot, MomentLayout, MomentVector};
use crate::error::{Error, Result};
use crate::field::C64;
use crate::instance::ProblemInstance;

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 2_000;

const MU_START: f64 = 1.0;
const MU_SHRINK: f64 = 0.2;
const MU_FLOOR: f64 = 1e-9;
const MU_HARD_FLOOR: f64 = 1e-14;
const DECREMENT_TOL: f64 = 1e-10;
const MAX_NEWTON_PER_STAGE: usize = 80;
const ARMIJO: f64 = 0.25;

#[derive(Debug, Clone)]
pub struct SosReport {
    pub k: usize,
    /// Relaxation value on the geometric-mean scale.
    pub value: f64,
    /// `value` plus the barrier gap estimate.
    pub upper_bound: f64,
    pub gap: f64,
    /// Objective before the exponential or root is applied.
    pub raw_objective: f64,
    pub mu_final: f64,
    pub newton_steps: usize,
    pub converged: bool,
    pub tol: f64,
    pub subsets: usize,
    pub min_moment_eigenvalue: f64,
    pub moments: MomentVector,
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Objective {
    /// `w sum_I ln <c_I, y>`, `w = 1 / (d C(d-1, k-1))`.
    LogProduct,
    /// `C(d, k)^{-1} sum_I <c_I, y>`.
    Mean,
}

/// The level-`k` relaxation value of the product objective.
pub fn solve_optsos(inst: &ProblemInstance, k: usize, tol: f64, max_iter: usize) -> Result<SosReport> {
    solve(inst, k, tol, max_iter, Objective::LogProduct)
}

/// The multiplier-free level-`k` value, `max pEx[E_k(<x, A_i x>)]^{1/k}`.
pub fn solve_srel(inst: &ProblemInstance, k: usize, tol: f64, max_iter: usize) -> Result<SosReport> {
    solve(inst, k, tol, max_iter, Objective::Mean)
}

struct Problem {
    layout: Arc<MomentLayout>,
    /// Rows are the product functionals.
    c: DMatrix<f64>,
    weight: f64,
    objective: Objective,
    /// Normalization coefficients and the eliminated coordinate.
    a: Vec<f64>,
    pivot: usize,
}

struct Point {
    y: Vec<f64>,
    s: Vec<f64>,
    w: DMatrix<C64>,
    log_det: f64,
}

impl Problem {
    fn f(&self, s: &[f64]) -> f64 {
        match self.objective {
            Objective::LogProduct => self.weight * s.iter().map(|v| v.ln()).sum::<f64>(),
            Objective::Mean => self.weight * s.iter().sum::<f64>(),
        }
    }

    /// Evaluates a candidate; `None` when it leaves the domain.
    fn point(&self, y: Vec<f64>) -> Option<Point> {
        let s: Vec<f64> = (self.c.clone() * DVector::from_column_slice(&y)).iter().copied().collect();
        if self.objective == Objective::LogProduct && s.iter().any(|&v| !(v > 0.0)) {
            return None;
        }
        let m = self.layout.moment_matrix(&y);
        let chol = Cholesky::new(m.as_matrix().clone())?;
        let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|z| z.re.ln()).sum::<f64>();
        if !log_det.is_finite() {
            return None;
        }
        Some(Point {
            y,
            s,
            w: chol.inverse(),
            log_det,
        })
    }

    fn merit(&self, p: &Point, mu: f64) -> f64 {
        self.f(&p.s) + mu * p.log_det
    }

    /// Gradient and negated Hessian of the barrier merit function.
    fn derivatives(&self, p: &Point, mu: f64) -> (DVector<f64>, DMatrix<f64>) {
        let entries = self.layout.entries();
        let m = entries.len();
        let mut grad = DVector::<f64>::zeros(m);
        let mut neg_hess = DMatrix::<f64>::zeros(m, m);
        match self.objective {
            Objective::LogProduct => {
                let inv: DVector<f64> = DVector::from_iterator(p.s.len(), p.s.iter().map(|v| 1.0 / v));
                grad += self.c.tr_mul(&inv) * self.weight;
                let scaled = DMatrix::from_fn(self.c.nrows(), m, |r, col| self.c[(r, col)] * inv[r]);
                neg_hess += scaled.tr_mul(&scaled) * self.weight;
            }
            Objective::Mean => {
                grad += self.c.row_sum().transpose() * self.weight;
            }
        }
        let w = &p.w;
        let size = w.nrows();
        for (a, ea) in entries.iter().enumerate() {
            // tr(W B_a) and T_a = W B_a W
            let mut tr = C64::new(0.0, 0.0);
            let mut t = DMatrix::<C64>::zeros(size, size);
            for &(i, j, v) in ea {
                tr += v * w[(j, i)];
                for r in 0..size {
                    let wri = w[(r, i)] * v;
                    for col in 0..size {
                        t[(r, col)] += wri * w[(j, col)];
                    }
                }
            }
            grad[a] += mu * tr.re;
            for (b, eb) in entries.iter().enumerate().skip(a) {
                let mut h = C64::new(0.0, 0.0);
                for &(kk, l, u) in eb {
                    h += u * t[(l, kk)];
                }
                neg_hess[(a, b)] += mu * h.re;
                if b != a {
                    neg_hess[(b, a)] += mu * h.re;
                }
            }
        }
        (grad, neg_hess)
    }

    /// Basis of the null space of the normalization, as an `m x (m - 1)` matrix.
    fn null_basis(&self) -> DMatrix<f64> {
        let m = self.a.len();
        let p = self.pivot;
        let mut z = DMatrix::<f64>::zeros(m, m - 1);
        let mut col = 0;
        for j in 0..m {
            if j == p {
                continue;
            }
            z[(j, col)] = 1.0;
            z[(p, col)] = -self.a[j] / self.a[p];
            col += 1;
        }
        z
    }
}

fn solve(inst: &ProblemInstance, k: usize, tol: f64, max_iter: usize, objective: Objective) -> Result<SosReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let start = Instant::now();
    let (d, n) = (inst.d(), inst.n());
    if k == 0 || k > d {
        return Err(Error::InvalidInput(format!("level k = {k} must lie in 1..={d}")));
    }
    let layout = MomentLayout::new(inst.field(), n, k);
    let functionals = all_product_functionals(inst, &layout)?;
    let m = layout.len();
    let c = DMatrix::from_fn(functionals.len(), m, |r, col| functionals[r].coeffs[col]);
    let weight = match objective {
        Objective::LogProduct => 1.0 / (d as f64 * binomial(d as u64 - 1, k as u64 - 1) as f64),
        Objective::Mean => 1.0 / functionals.len() as f64,
    };
    let a = layout.normalization();
    let pivot = (0..m)
        .max_by(|&i, &j| a[i].abs().total_cmp(&a[j].abs()))
        .expect("layout has coordinates");
    let problem = Problem {
        layout: layout.clone(),
        c,
        weight,
        objective,
        a,
        pivot,
    };
    let z = problem.null_basis();
    let size = layout.matrix_size() as f64;

    let mut point = problem
        .point(layout.uniform_values())
        .ok_or_else(|| Error::InvalidInput("uniform moments are not strictly feasible".into()))?;
    let mut mu = MU_START;
    let mut steps = 0;
    let mut stage_converged;
    loop {
        stage_converged = false;
        for _ in 0..MAX_NEWTON_PER_STAGE {
            if steps >= max_iter {
                break;
            }
            let (grad, neg_hess) = problem.derivatives(&point, mu);
            let g_red = z.tr_mul(&grad);
            let h_red = z.tr_mul(&(&neg_hess * &z));
            let Some(chol) = regularized_cholesky(h_red) else { break };
            let delta_red = chol.solve(&g_red);
            let decrement = g_red.dot(&delta_red);
            if decrement / 2.0 <= DECREMENT_TOL {
                stage_converged = true;
                break;
            }
            steps += 1;
            let delta = &z * delta_red;
            let merit = problem.merit(&point, mu);
            let mut t = 1.0;
            let mut next = None;
            while t > 1e-14 {
                let y: Vec<f64> = point.y.iter().zip(delta.iter()).map(|(y, dy)| y + t * dy).collect();
                if let Some(candidate) = problem.point(y) {
                    if problem.merit(&candidate, mu) >= merit + ARMIJO * t * decrement {
                        next = Some(candidate);
                        break;
                    }
                }
                t *= 0.5;
            }
            match next {
                Some(p) => point = p,
                None => {
                    // No ascent possible at working precision: this stage is centred
                    // as well as floating point allows.
                    stage_converged = decrement <= 1e-6;
                    break;
                }
            }
        }
        let gap_ok = gap_estimate(&problem, &point, mu, size, k).1 <= tol;
        if !stage_converged || steps >= max_iter || (mu <= MU_FLOOR && gap_ok) || mu <= MU_HARD_FLOOR {
            break;
        }
        mu *= MU_SHRINK;
    }

    // Renormalize exactly against drift in the eliminated coordinate.
    let norm = dot(&problem.a, &point.y);
    let y: Vec<f64> = point.y.iter().map(|v| v / norm).collect();
    let s: Vec<f64> = functionals.iter().map(|f| dot(&f.coeffs, &y)).collect();
    let raw = problem.f(&s);
    let (value, rel_gap, upper) = gap_estimate_from(objective, raw, mu, size, k);
    let moments = MomentVector::new_unchecked(layout, y)?;
    let min_eig = moments.min_eigenvalue()?;
    Ok(SosReport {
        k,
        value,
        upper_bound: upper,
        gap: upper - value,
        raw_objective: raw,
        mu_final: mu,
        newton_steps: steps,
        converged: stage_converged && rel_gap <= tol,
        tol,
        subsets: functionals.len(),
        min_moment_eigenvalue: min_eig,
        moments,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

/// Cholesky factor of a matrix that is positive definite in exact arithmetic,
/// shifting the diagonal when roundoff has destroyed definiteness.
fn regularized_cholesky(h: DMatrix<f64>) -> Option<Cholesky<f64, nalgebra::Dyn>> {
    let scale = h.diagonal().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if let Some(c) = Cholesky::new(h.clone()) {
        return Some(c);
    }
    let mut shift = 1e-14;
    while shift <= 1e-6 {
        let mut shifted = h.clone();
        for i in 0..shifted.nrows() {
            shifted[(i, i)] += shift * scale;
        }
        if let Some(c) = Cholesky::new(shifted) {
            return Some(c);
        }
        shift *= 100.0;
    }
    None
}

fn gap_estimate(problem: &Problem, point: &Point, mu: f64, size: f64, k: usize) -> (f64, f64, f64) {
    gap_estimate_from(problem.objective, problem.f(&point.s), mu, size, k)
}

/// `(value, relative gap, upper bound)` from the raw objective.
fn gap_estimate_from(objective: Objective, raw: f64, mu: f64, size: f64, k: usize) -> (f64, f64, f64) {
    let slack = mu * size;
    match objective {
        Objective::LogProduct => {
            let value = raw.exp();
            let upper = (raw + slack).exp();
            (value, slack.exp_m1(), upper)
        }
        Objective::Mean => {
            let value = raw.max(0.0).powf(1.0 / k as f64);
            let upper = (raw + slack).max(0.0).powf(1.0 / k as f64);
            (value, (upper - value) / value.max(f64::MIN_POSITIVE), upper)
        }
    }
}
