//! End-to-end experiments: the icosahedral hierarchy table and the
//! random rank-one gap sweep.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, KVector};
use crate::instance::{gen_icosahedral, gen_random_rank_one};
use crate::oracle::local_max_sphere;
use crate::rng::SeedStream;
use crate::rounding::round_gaussian;
use crate::sdp::solve_optsdp;
use crate::sos::{round_sos, solve_optsos};
use crate::special::l_r;

/// Reference upper bounds of the icosahedral hierarchy, `k = 1..6`.
pub const ICO_UPPER_REFERENCE: [f64; 6] = [1.27454, 1.16814, 1.10292, 1.05821, 1.02534, 1.00000];
/// Reference rounding means of the icosahedral hierarchy, `k = 1..6`.
pub const ICO_ROUNDING_REFERENCE: [f64; 6] = [0.66019, 0.65575, 0.80480, 0.86907, 0.90546, 0.92616];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IcoTableRow {
    pub k: usize,
    pub upper_bound: f64,
    pub value: f64,
    pub gap: f64,
    pub converged: bool,
    pub min_moment_eigenvalue: f64,
    pub rounding_mean: f64,
    pub rounding_stderr: f64,
    pub rounding_best: f64,
    pub best_direction_mean: f64,
    pub samples: usize,
    pub trials: usize,
    pub reference_upper: f64,
    pub reference_rounding: f64,
    pub solve_secs: f64,
    pub rounding_secs: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IcoTableRecord {
    pub experiment: String,
    pub instance: String,
    pub seed: u64,
    pub tol: f64,
    pub samples_per_k: usize,
    pub trials: usize,
    pub rows: Vec<IcoTableRow>,
    pub wall_time_secs: f64,
}

/// Solves and rounds every level `k = 1..6` of the icosahedral instance.
///
/// Each level draws `trials` directions with `samples / trials` samples each.
pub fn ico_table(samples: usize, trials: usize, seed: u64, tol: f64) -> Result<IcoTableRecord> {
    if trials == 0 || samples < trials {
        return Err(Error::InvalidInput("need samples >= trials >= 1".into()));
    }
    let start = Instant::now();
    let inst = gen_icosahedral();
    let root = SeedStream::new(seed).child("ico-table");
    let per_trial = samples / trials;
    let mut rows = Vec::with_capacity(6);
    for k in 1..=6 {
        let t0 = Instant::now();
        let sol = solve_optsos(&inst, k, tol, crate::sos::solver::DEFAULT_MAX_ITER)?;
        let solve_secs = t0.elapsed().as_secs_f64();
        let t1 = Instant::now();
        let out = round_sos(&inst, &sol.moments, trials, per_trial, &root.index(k as u64))?;
        rows.push(IcoTableRow {
            k,
            upper_bound: sol.upper_bound,
            value: sol.value,
            gap: sol.gap,
            converged: sol.converged,
            min_moment_eigenvalue: sol.min_moment_eigenvalue,
            rounding_mean: out.pooled.empirical_mean,
            rounding_stderr: out.pooled.empirical_stderr,
            rounding_best: out.pooled.best_value,
            best_direction_mean: out.best_trial_mean,
            samples: out.pooled.samples_used,
            trials: out.trials_used,
            reference_upper: ICO_UPPER_REFERENCE[k - 1],
            reference_rounding: ICO_ROUNDING_REFERENCE[k - 1],
            solve_secs,
            rounding_secs: t1.elapsed().as_secs_f64(),
        });
    }
    Ok(IcoTableRecord {
        experiment: "ico-table".into(),
        instance: "icosahedral".into(),
        seed,
        tol,
        samples_per_k: per_trial * trials,
        trials,
        rows,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapSweepRow {
    pub d: usize,
    pub ratios: Vec<f64>,
    pub median_ratio: f64,
    pub sdp_values: Vec<f64>,
    pub oracle_values: Vec<f64>,
    pub sdp_converged: Vec<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapSweepRecord {
    pub experiment: String,
    pub instance: String,
    pub n: usize,
    pub field: Field,
    pub seed: u64,
    pub seeds: usize,
    pub restarts: usize,
    pub rounding_samples: usize,
    pub tol: f64,
    /// `exp(L_n(K))`, the limiting gap.
    pub asymptote: f64,
    pub rows: Vec<GapSweepRow>,
    pub wall_time_secs: f64,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Samples drawn from the relaxation to seed the oracle in [`gap_sweep`].
pub const SWEEP_ROUNDING_SAMPLES: usize = 256;

/// For each `d`, the ratio of the relaxation value to the oracle value on
/// `seeds` random unit rank-one instances.
pub fn gap_sweep(
    n: usize,
    field: Field,
    d_list: &[usize],
    seeds: usize,
    seed: u64,
    restarts: usize,
    tol: f64,
) -> Result<GapSweepRecord> {
    if d_list.is_empty() || seeds == 0 {
        return Err(Error::InvalidInput("need a non-empty d list and at least one seed".into()));
    }
    if n == 0 || n > 3 {
        return Err(Error::InvalidInput("the sweep supports 1 <= n <= 3".into()));
    }
    let start = Instant::now();
    let root = SeedStream::new(seed).child("gap-sweep");
    let mut rows = Vec::with_capacity(d_list.len());
    for &d in d_list {
        let mut row = GapSweepRow {
            d,
            ratios: Vec::with_capacity(seeds),
            median_ratio: 0.0,
            sdp_values: Vec::with_capacity(seeds),
            oracle_values: Vec::with_capacity(seeds),
            sdp_converged: Vec::with_capacity(seeds),
        };
        for s in 0..seeds {
            let stream = root.index(d as u64).index(s as u64);
            let inst = gen_random_rank_one(n, d, field, &mut stream.child("instance").rng())?;
            let sdp = solve_optsdp(&inst, tol, crate::sdp::DEFAULT_MAX_ITER)?;
            let rounded = round_gaussian(
                &inst,
                &sdp.solution,
                SWEEP_ROUNDING_SAMPLES,
                &mut stream.child("rounding").rng(),
            )?;
            let top = crate::field::eigh(&sdp.solution)?;
            let leading = KVector::from_parts_unchecked(field, top.basis.column(0).into_owned());
            let oracle = local_max_sphere(
                &inst,
                restarts,
                &stream.child("oracle"),
                &[rounded.best_vector, leading],
            )?;
            row.ratios.push(sdp.value / oracle.best_value);
            row.sdp_values.push(sdp.value);
            row.oracle_values.push(oracle.best_value);
            row.sdp_converged.push(sdp.converged);
        }
        row.median_ratio = median(&row.ratios);
        rows.push(row);
    }
    Ok(GapSweepRecord {
        experiment: "gap-sweep".into(),
        instance: format!("random-rank-one n={n} field={field}"),
        n,
        field,
        seed,
        seeds,
        restarts,
        rounding_samples: SWEEP_ROUNDING_SAMPLES,
        tol,
        asymptote: l_r(field, n)?.exp(),
        rows,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}
