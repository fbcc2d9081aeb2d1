//! Rounding of pseudo-moment vectors.
//!
//! For a direction `v` the matrix `M(v) = pEx[|<v, x>|^{2k-2} x x†]` is used as
//! the covariance of a Gaussian, whose normalized samples are evaluated.

use nalgebra::DMatrix;

use super::moments::MomentVector;
use super::poly::Poly;
use crate::error::{Error, Result};
use crate::field::{eigh, Field, gram_from_spectrum, HermitianMatrix, KVector, SpectralDecomposition, C64};
use crate::instance::ProblemInstance;
use crate::rng::SeedStream;
use crate::rounding::{sample_into, RoundingOutcome, SampleStats};
use crate::sampling::{sample_sphere_uniform, GaussianSampler};

pub const DEFAULT_TRIALS: usize = 64;

/// Pooled result plus the best single direction.
#[derive(Debug, Clone)]
pub struct SosRoundingOutcome {
    pub pooled: RoundingOutcome,
    pub best_trial_mean: f64,
    pub best_trial_stderr: f64,
    pub best_direction: KVector,
    pub trials_used: usize,
    pub trials_degenerate: usize,
}

/// `M(v)` for a unit direction `v`, before any repair.
pub fn rounding_covariance(m: &MomentVector, v: &KVector) -> Result<HermitianMatrix> {
    if v.field() != m.field() {
        return Err(Error::FieldMismatch {
            expected: m.field(),
            found: v.field(),
        });
    }
    let n = m.n();
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    let weight = Poly::quadratic(&HermitianMatrix::outer(v)).pow(m.k() - 1);
    let mut out = DMatrix::<C64>::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            // pEx[w(x) x_a conj(x_b)]
            let val = m.apply(&weight.mul(&Poly::monomial(m.field(), n, e_key(m, a, b))));
            out[(a, b)] = val;
            out[(b, a)] = val.conj();
        }
    }
    if m.field() == Field::Real {
        out.iter_mut().for_each(|z| z.im = 0.0);
    }
    HermitianMatrix::new(m.field(), out)
}

fn e_key(m: &MomentVector, a: usize, b: usize) -> Vec<u32> {
    let n = m.n();
    match m.field() {
        Field::Real => {
            let mut key = vec![0; n];
            key[a] += 1;
            key[b] += 1;
            key
        }
        Field::Complex => {
            let mut key = vec![0; 2 * n];
            key[b] += 1;
            key[n + a] += 1;
            key
        }
    }
}

/// Clips negative eigenvalues and rescales to unit trace; `None` if nothing is left.
fn repair(eig: &SpectralDecomposition, scale: f64) -> Option<SpectralDecomposition> {
    let clipped: Vec<f64> = eig.eigenvalues.iter().map(|v| v.max(0.0)).collect();
    let trace: f64 = clipped.iter().sum();
    if !(trace > 1e-12 * scale) {
        return None;
    }
    Some(SpectralDecomposition {
        eigenvalues: clipped.iter().map(|v| v / trace).collect(),
        basis: eig.basis.clone(),
    })
}

/// Draws `trials` uniform directions and `samples_per_trial` Gaussian samples for each.
pub fn round_sos(
    inst: &ProblemInstance,
    m: &MomentVector,
    trials: usize,
    samples_per_trial: usize,
    stream: &SeedStream,
) -> Result<SosRoundingOutcome> {
    round_sos_visit(inst, m, trials, samples_per_trial, stream, &mut |_, _| {})
}

pub fn round_sos_visit(
    inst: &ProblemInstance,
    m: &MomentVector,
    trials: usize,
    samples_per_trial: usize,
    stream: &SeedStream,
    visit: &mut dyn FnMut(&KVector, f64),
) -> Result<SosRoundingOutcome> {
    if trials == 0 || samples_per_trial == 0 {
        return Err(Error::InvalidInput("trials and samples per trial must be positive".into()));
    }
    if m.field() != inst.field() {
        return Err(Error::FieldMismatch {
            expected: inst.field(),
            found: m.field(),
        });
    }
    if m.n() != inst.n() {
        return Err(Error::DimensionMismatch {
            expected: inst.n(),
            found: m.n(),
        });
    }
    let scale = m.values().iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut pooled = SampleStats::default();
    let mut best: Option<(f64, f64, KVector)> = None;
    let mut degenerate = 0;
    for t in 0..trials {
        let trial = stream.index(t as u64);
        let mut rng = trial.child("direction").rng();
        let v = sample_sphere_uniform(inst.n(), inst.field(), &mut rng);
        let cov = rounding_covariance(m, &v)?;
        let Some(eig) = repair(&eigh(&cov)?, scale) else {
            degenerate += 1;
            continue;
        };
        let factor = gram_from_spectrum(inst.field(), &eig).factor;
        let sampler = GaussianSampler::from_factor(inst.field(), factor)?;
        let mut rng = trial.child("samples").rng();
        let mut stats = SampleStats::default();
        sample_into(inst, &sampler, samples_per_trial, &mut rng, &mut stats, visit)?;
        if stats.count() > 0 && best.as_ref().is_none_or(|(b, _, _)| stats.mean() > *b) {
            best = Some((stats.mean(), stats.stderr(), v));
        }
        pooled.merge(&stats);
    }
    let (best_trial_mean, best_trial_stderr, best_direction) = best.ok_or(Error::DegenerateMoments)?;
    Ok(SosRoundingOutcome {
        pooled: pooled.finish()?,
        best_trial_mean,
        best_trial_stderr,
        best_direction,
        trials_used: trials - degenerate,
        trials_degenerate: degenerate,
    })
}
