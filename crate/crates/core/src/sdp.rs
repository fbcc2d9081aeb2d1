//! The trace-constrained SDP relaxation
//! `max (prod_i <A_i, X>)^{1/d}` over `X >= 0, Tr X = 1`
//! and its multiplier dual `min lambda` s.t. `(1/d) sum_i alpha_i A_i <= lambda I`,
//! `prod_i alpha_i = 1`.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::field::{
    gram_factor, lambda_max, project_spectrahedron, DensityMatrix, HermitianMatrix,
};
use crate::instance::ProblemInstance;

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 50_000;
/// Iterations between dual certificate evaluations.
pub const CHECKPOINT_EVERY: usize = 50;
/// Steps may not push any `<A_i, X>` below this fraction of `Tr A_i`.
pub const BOUNDARY_FRACTION: f64 = 1e-14;

const ARMIJO_SLOPE: f64 = 0.1;
const SHRINK: f64 = 0.5;
const INITIAL_STEP: f64 = 1.0;
const MIN_STEP: f64 = 1e-18;

/// Result of a relaxation solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Relaxation objective at `solution`, on the geometric-mean scale.
    pub value: f64,
    /// `lambda` from the dual certificate; an upper bound on the relaxation optimum.
    pub upper_certificate: f64,
    /// `upper_certificate - value`.
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub tol: f64,
    /// Dual multipliers `alpha_i` with unit geometric mean.
    pub multipliers: Vec<f64>,
    pub solution: DensityMatrix,
    /// Numerical rank of `solution`.
    pub rank: usize,
    pub wall_time_secs: f64,
    /// Log-objective after every accepted step, starting from `X_0`.
    pub objective_history: Vec<f64>,
}

/// `lambda_max(sum_i A_i) / d`, the bound obtained from AM/GM.
pub fn amgm_eigen_bound(inst: &ProblemInstance) -> f64 {
    let terms: Vec<(f64, &HermitianMatrix)> = inst.forms().iter().map(|a| (1.0, a)).collect();
    let g = HermitianMatrix::linear_combination(&terms).expect("instance forms share field and size");
    lambda_max(&g) / inst.d() as f64
}

fn inner_products(inst: &ProblemInstance, x: &HermitianMatrix) -> Vec<f64> {
    inst.forms().iter().map(|a| a.inner_unchecked(x)).collect()
}

fn log_objective(values: &[f64]) -> f64 {
    values.iter().map(|v| v.ln()).sum::<f64>() / values.len() as f64
}

/// `(1/d) sum_i A_i / <A_i, X>`.
fn gradient(inst: &ProblemInstance, values: &[f64]) -> HermitianMatrix {
    let d = inst.d() as f64;
    let terms: Vec<(f64, &HermitianMatrix)> = inst
        .forms()
        .iter()
        .zip(values)
        .map(|(a, v)| (1.0 / (d * v), a))
        .collect();
    HermitianMatrix::linear_combination(&terms).expect("instance forms share field and size")
}

/// Certificate `(lambda, alpha)` at a density matrix: `alpha_i = gamma / <A_i, X>`
/// with `gamma` the geometric mean of the inner products, and
/// `lambda = lambda_max((1/d) sum_i alpha_i A_i)`.
pub fn dual_certificate(inst: &ProblemInstance, x: &DensityMatrix) -> Result<(f64, Vec<f64>)> {
    if x.field() != inst.field() {
        return Err(Error::FieldMismatch {
            expected: inst.field(),
            found: x.field(),
        });
    }
    if x.dim() != inst.n() {
        return Err(Error::DimensionMismatch {
            expected: inst.n(),
            found: x.dim(),
        });
    }
    let values = inner_products(inst, x);
    certificate_from_values(inst, &values)
}

fn certificate_from_values(inst: &ProblemInstance, values: &[f64]) -> Result<(f64, Vec<f64>)> {
    if let Some((index, &value)) = values.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
        return Err(Error::DegenerateInnerProduct { index, value });
    }
    let gamma = log_objective(values).exp();
    let alpha: Vec<f64> = values.iter().map(|v| gamma / v).collect();
    let lambda = gamma * lambda_max(&gradient(inst, values));
    Ok((lambda, alpha))
}

/// Solves the relaxation by projected gradient ascent on
/// `F(X) = (1/d) sum_i ln <A_i, X>` with Armijo backtracking, stopping once
/// the dual certificate is within `tol * value`.
pub fn solve_optsdp(inst: &ProblemInstance, tol: f64, max_iter: usize) -> Result<SolveReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let start = Instant::now();
    let floors: Vec<f64> = inst
        .forms()
        .iter()
        .map(|a| BOUNDARY_FRACTION * a.trace())
        .collect();

    let mut x = DensityMatrix::maximally_mixed(inst.n(), inst.field());
    let mut values = inner_products(inst, &x);
    let mut f = log_objective(&values);
    let mut history = vec![f];
    let mut step = INITIAL_STEP;
    let mut iterations = 0;
    let mut certificate = certificate_from_values(inst, &values)?;
    let mut converged = certificate.0 - f.exp() <= tol * f.exp();

    while !converged && iterations < max_iter {
        let g = gradient(inst, &values);
        let mut t = step;
        let mut accepted = None;
        while t >= MIN_STEP {
            let trial = HermitianMatrix::linear_combination(&[(1.0, &x), (t, &g)])?;
            let y = project_spectrahedron(&trial)?;
            let y_values = inner_products(inst, &y);
            if y_values.iter().zip(&floors).all(|(v, lo)| v >= lo) {
                let fy = log_objective(&y_values);
                let ascent = g.inner_unchecked(&y) - g.inner_unchecked(&x);
                if fy >= f + ARMIJO_SLOPE * ascent && fy >= f {
                    accepted = Some((y, y_values, fy));
                    break;
                }
            }
            t *= SHRINK;
        }
        iterations += 1;
        let stalled = accepted.is_none();
        if let Some((y, y_values, fy)) = accepted {
            x = y;
            values = y_values;
            f = fy;
            history.push(f);
            step = (2.0 * t).min(1e12);
        }
        if stalled || iterations % CHECKPOINT_EVERY == 0 || iterations == max_iter {
            certificate = certificate_from_values(inst, &values)?;
            converged = certificate.0 - f.exp() <= tol * f.exp();
            if stalled {
                break;
            }
        }
    }

    let value = f.exp();
    let (lambda, multipliers) = certificate;
    let rank = gram_factor(&x)?.rank;
    Ok(SolveReport {
        value,
        upper_certificate: lambda,
        gap: lambda - value,
        iterations,
        converged,
        tol,
        multipliers,
        solution: x,
        rank,
        wall_time_secs: start.elapsed().as_secs_f64(),
        objective_history: history,
    })
}

/// Structural reasons for the relaxation to be tight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    /// Two real forms.
    ExactD2,
    /// Pairwise commuting forms.
    ExactCommuting,
    Unknown,
}

/// Relative commutator size below which two forms count as commuting.
pub const COMMUTE_TOL: f64 = 1e-10;

pub fn exactness_hint(inst: &ProblemInstance) -> Exactness {
    if inst.d() == 2 && inst.field() == crate::Field::Real {
        return Exactness::ExactD2;
    }
    let forms = inst.forms();
    let n = inst.n() as f64;
    for (i, a) in forms.iter().enumerate() {
        for b in &forms[i + 1..] {
            let scale = n * a.max_abs() * b.max_abs();
            if a.commutator_norm(b) > COMMUTE_TOL * scale {
                return Exactness::Unknown;
            }
        }
    }
    Exactness::ExactCommuting
}
