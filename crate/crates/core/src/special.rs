//! Digamma, rounding-loss constants and expected logarithms of
//! generalized chi-squared variables.

use crate::error::{Error, Result};
use crate::field::Field;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Relative tolerance under which two weights count as equal.
pub const TIE_TOL: f64 = 1e-9;

// B_{2j} / (2j) for j = 1..8.
const ASYMPTOTIC: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

fn check_positive(x: f64, what: &str) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} requires a positive finite argument, got {x}")))
    }
}

/// `psi(x) - ln(x)` for `x >= 10`, without forming either term.
fn digamma_minus_log_large(x: f64) -> f64 {
    let inv2 = 1.0 / (x * x);
    let mut pow = inv2;
    let mut tail = 0.0;
    for c in ASYMPTOTIC {
        tail += c * pow;
        pow *= inv2;
    }
    -0.5 / x - tail
}

/// Digamma function `psi(x) = d/dx ln Gamma(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive(x, "digamma")?;
    let mut x = x;
    let mut shift = 0.0;
    while x < 10.0 {
        shift -= 1.0 / x;
        x += 1.0;
    }
    Ok(shift + x.ln() + digamma_minus_log_large(x))
}

/// `psi(x) - ln(x)`, accurate for large `x` where the difference is tiny.
pub fn digamma_minus_log(x: f64) -> Result<f64> {
    check_positive(x, "digamma")?;
    if x >= 10.0 {
        Ok(digamma_minus_log_large(x))
    } else {
        Ok(digamma(x)? - x.ln())
    }
}

/// Expected loss `L_r(K)` of normalizing a rank-`r` Gaussian sample.
///
/// `L_r(R) = gamma + ln 2 + psi(r/2) - ln(r/2)` and
/// `L_r(C) = gamma + psi(r) - ln r`.
pub fn l_r(field: Field, r: usize) -> Result<f64> {
    if r == 0 {
        return Err(Error::Domain("rank must be at least 1".into()));
    }
    if r == 1 {
        // Both closed forms vanish identically at r = 1.
        return Ok(0.0);
    }
    let r = r as f64;
    Ok(match field {
        Field::Real => EULER_GAMMA + std::f64::consts::LN_2 + digamma_minus_log(r / 2.0)?,
        Field::Complex => EULER_GAMMA + digamma_minus_log(r)?,
    })
}

/// `sup_r L_r(K)`: `gamma + ln 2` over the reals, `gamma` over the complex numbers.
pub fn l_sup(field: Field) -> f64 {
    match field {
        Field::Real => EULER_GAMMA + std::f64::consts::LN_2,
        Field::Complex => EULER_GAMMA,
    }
}

/// `E[ln sum_{i<r} |z_i|^2]` for `r` independent standard Gaussians over `K`.
pub fn expected_log_norm_sq(field: Field, r: usize) -> Result<f64> {
    if r == 0 {
        return Err(Error::Domain("rank must be at least 1".into()));
    }
    Ok(match field {
        Field::Real => digamma(r as f64 / 2.0)? + std::f64::consts::LN_2,
        Field::Complex => digamma(r as f64)?,
    })
}

/// Weights of `Z = sum_i lambda_i |z_i|^2` with tie groups detected.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueProfile {
    lambdas: Vec<f64>,
    /// `(representative value, multiplicity)`, sorted descending.
    groups: Vec<(f64, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileShape {
    AllEqual,
    Distinct,
    /// One isolated weight and one block holding the rest.
    TwoBlock,
    Other,
}

impl EigenvalueProfile {
    pub fn new(lambdas: &[f64]) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::Domain("profile must contain at least one weight".into()));
        }
        for &l in lambdas {
            check_positive(l, "generalized chi-squared weight")?;
        }
        let mut sorted = lambdas.to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let mut groups: Vec<(f64, Vec<f64>)> = Vec::new();
        for v in sorted {
            match groups.last_mut() {
                Some((head, members)) if (*head - v).abs() <= TIE_TOL * head.abs() => {
                    members.push(v)
                }
                _ => groups.push((v, vec![v])),
            }
        }
        let groups = groups
            .into_iter()
            .map(|(_, m)| (m.iter().sum::<f64>() / m.len() as f64, m.len()))
            .collect();
        Ok(Self {
            lambdas: lambdas.to_vec(),
            groups,
        })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn groups(&self) -> &[(f64, usize)] {
        &self.groups
    }

    pub fn shape(&self) -> ProfileShape {
        let n = self.lambdas.len();
        match self.groups.as_slice() {
            [_] => ProfileShape::AllEqual,
            g if g.len() == n => ProfileShape::Distinct,
            [(_, 1), (_, m)] | [(_, m), (_, 1)] if *m == n - 1 => ProfileShape::TwoBlock,
            _ => ProfileShape::Other,
        }
    }
}

/// `E[ln Z]` for `Z = sum_i lambda_i |z_i|^2` with independent standard
/// complex Gaussians (`E|z_i|^2 = 1`).
pub fn expected_log_genchisq(profile: &EigenvalueProfile) -> Result<f64> {
    let n = profile.lambdas.len();
    Ok(match profile.shape() {
        ProfileShape::AllEqual => digamma(n as f64)? + profile.groups[0].0.ln(),
        ProfileShape::Distinct => distinct_formula(&profile.lambdas),
        ProfileShape::TwoBlock => {
            let (lam, eps) = match profile.groups.as_slice() {
                [(a, 1), (b, _)] => (*a, *b),
                [(b, _), (a, 1)] => (*a, *b),
                _ => unreachable!("two-block shape checked above"),
            };
            two_block_formula(lam, eps, n)?
        }
        ProfileShape::Other => -EULER_GAMMA + confluent_divided_difference(&profile.groups),
    })
}

/// `-gamma + sum_i lambda_i^{n-1} ln(lambda_i) / prod_{j != i} (lambda_i - lambda_j)`,
/// with products accumulated as log-magnitude and sign.
fn distinct_formula(lambdas: &[f64]) -> f64 {
    let n = lambdas.len();
    let mut sum = 0.0;
    for (i, &li) in lambdas.iter().enumerate() {
        let log_li = li.ln();
        if log_li == 0.0 {
            continue;
        }
        let mut log_mag = (n - 1) as f64 * log_li + log_li.abs().ln();
        let mut negative = log_li < 0.0;
        for (j, &lj) in lambdas.iter().enumerate() {
            if j != i {
                let diff = li - lj;
                log_mag -= diff.abs().ln();
                negative ^= diff < 0.0;
            }
        }
        let term = log_mag.exp();
        sum += if negative { -term } else { term };
    }
    -EULER_GAMMA + sum
}

/// Closed form for weights `(lambda, eps, ..., eps)` with `n - 1` copies of `eps`.
fn two_block_formula(lam: f64, eps: f64, n: usize) -> Result<f64> {
    let gap = lam - eps;
    let m = (n - 1) as i32;
    let mut value = (lam / gap).powi(m) * (-EULER_GAMMA + lam.ln());
    let log_eps = eps.ln();
    for l in 1..n {
        value -= eps * lam.powi(l as i32 - 1) * (log_eps + digamma((n - l) as f64)?)
            / gap.powi(l as i32);
    }
    Ok(value)
}

fn harmonic(m: usize) -> f64 {
    (1..=m).map(|i| 1.0 / i as f64).sum()
}

/// `g^{(j)}(t) / j!` for `g(t) = t^m ln t`, `j <= m`.
fn taylor_coefficient(t: f64, m: usize, j: usize) -> f64 {
    // m!/(m-j)!/j! = binom(m, j)
    let mut binom = 1.0;
    for i in 0..j {
        binom *= (m - i) as f64 / (i + 1) as f64;
    }
    binom * t.powi((m - j) as i32) * (t.ln() + harmonic(m) - harmonic(m - j))
}

/// Divided difference of `g(t) = t^{n-1} ln t` over the nodes given as
/// `(value, multiplicity)` groups, using derivatives at repeated nodes.
fn confluent_divided_difference(groups: &[(f64, usize)]) -> f64 {
    let nodes: Vec<f64> = groups
        .iter()
        .flat_map(|&(v, m)| std::iter::repeat_n(v, m))
        .collect();
    let n = nodes.len();
    let m = n - 1;
    // table[i] holds g[x_i, ..., x_{i+width}] for the current width.
    let mut table: Vec<f64> = nodes.iter().map(|&t| taylor_coefficient(t, m, 0)).collect();
    for width in 1..n {
        let mut next = Vec::with_capacity(n - width);
        for i in 0..n - width {
            let (a, b) = (nodes[i], nodes[i + width]);
            next.push(if a == b {
                taylor_coefficient(a, m, width)
            } else {
                (table[i + 1] - table[i]) / (b - a)
            });
        }
        table = next;
    }
    table[0]
}

/// Rounding-loss constant of the degree-`k` hierarchy in dimension `n`.
///
/// Equals `gamma + E[ln Z]` for the weights `(1 - eps, eps/(n-1), ...)` with
/// `1 - eps = k / (k + n - 1)`. The expression is singular at `k = 1`.
pub fn c_nk(n: usize, k: usize) -> Result<f64> {
    if n == 0 || k == 0 {
        return Err(Error::Domain(format!("C(n, k) needs n, k >= 1, got n = {n}, k = {k}")));
    }
    if n == 1 {
        return Ok(0.0);
    }
    if k == 1 {
        return Err(Error::FormulaSingular { n, k });
    }
    let total = (k + n - 1) as f64;
    let lam = k as f64 / total;
    let eps = 1.0 / total;
    Ok(EULER_GAMMA + two_block_formula(lam, eps, n)?)
}

/// `max_{|x| = 1} (x^{2 beta})^{1/d} = (1/d) prod_i beta_i^{beta_i / d}` with `0^0 = 1`.
pub fn monomial_max(beta: &[u32]) -> Result<f64> {
    let d: u64 = beta.iter().map(|&b| u64::from(b)).sum();
    if d == 0 {
        return Err(Error::InvalidInput("multi-index must have positive degree".into()));
    }
    let d = d as f64;
    let log_prod: f64 = beta
        .iter()
        .filter(|&&b| b > 0)
        .map(|&b| f64::from(b) * f64::from(b).ln())
        .sum();
    Ok((log_prod / d).exp() / d)
}

/// Kantorovich bound `(1/4)(sqrt(l1/ln) + sqrt(ln/l1))^2` on `(x'Ax)(x'A^{-1}x)`.
pub fn kantorovich_bound(lambda_max: f64, lambda_min: f64) -> Result<f64> {
    check_positive(lambda_max, "kantorovich_bound")?;
    check_positive(lambda_min, "kantorovich_bound")?;
    if lambda_max < lambda_min {
        return Err(Error::Domain(format!(
            "lambda_max = {lambda_max} is below lambda_min = {lambda_min}"
        )));
    }
    let r = (lambda_max / lambda_min).sqrt();
    Ok(0.25 * (r + 1.0 / r).powi(2))
}
