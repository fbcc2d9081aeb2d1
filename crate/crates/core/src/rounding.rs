//! Gaussian rounding of a density matrix to unit vectors.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, KVector};
use crate::instance::ProblemInstance;
use crate::rng::Rng;
use crate::sampling::GaussianSampler;
use crate::sdp::SolveReport;
use crate::special::l_r;
use crate::DensityMatrix;

/// Samples with norm below this are skipped.
pub const MIN_SAMPLE_NORM: f64 = 1e-12;

/// Summary of a batch of rounded samples.
#[derive(Debug, Clone)]
pub struct RoundingOutcome {
    pub best_vector: KVector,
    pub best_value: f64,
    pub empirical_mean: f64,
    pub empirical_stderr: f64,
    pub samples_used: usize,
    pub samples_skipped: usize,
}

/// Running mean, variance and argmax of objective values.
#[derive(Debug, Clone, Default)]
pub struct SampleStats {
    count: usize,
    skipped: usize,
    mean: f64,
    m2: f64,
    best: Option<(f64, KVector)>,
}

impl SampleStats {
    pub fn push(&mut self, x: &KVector, value: f64) {
        self.count += 1;
        let delta = value - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (value - self.mean);
        if self.best.as_ref().is_none_or(|(b, _)| value > *b) {
            self.best = Some((value, x.clone()));
        }
    }

    pub fn skip(&mut self) {
        self.skipped += 1;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn stderr(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let var = self.m2 / (self.count - 1) as f64;
        (var / self.count as f64).sqrt()
    }

    pub fn merge(&mut self, other: &SampleStats) {
        if other.count == 0 {
            self.skipped += other.skipped;
            return;
        }
        let total = self.count + other.count;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / total as f64;
        self.m2 += other.m2 + delta * delta * (self.count as f64 * other.count as f64) / total as f64;
        self.count = total;
        self.skipped += other.skipped;
        if let Some((v, x)) = &other.best {
            if self.best.as_ref().is_none_or(|(b, _)| v > b) {
                self.best = Some((*v, x.clone()));
            }
        }
    }

    pub fn finish(self) -> Result<RoundingOutcome> {
        let stderr = self.stderr();
        let (best_value, best_vector) = self
            .best
            .ok_or_else(|| Error::InvalidInput("every sample was degenerate".into()))?;
        Ok(RoundingOutcome {
            best_vector,
            best_value,
            empirical_mean: self.mean,
            empirical_stderr: stderr,
            samples_used: self.count,
            samples_skipped: self.skipped,
        })
    }
}

/// Draws `samples` vectors from `sampler`, normalizes and evaluates them,
/// calling `visit` on every kept sample.
pub(crate) fn sample_into(
    inst: &ProblemInstance,
    sampler: &GaussianSampler,
    samples: usize,
    rng: &mut Rng,
    stats: &mut SampleStats,
    visit: &mut dyn FnMut(&KVector, f64),
) -> Result<()> {
    for _ in 0..samples {
        let g = sampler.sample(rng);
        if g.norm() < MIN_SAMPLE_NORM {
            stats.skip();
            continue;
        }
        let y = g.normalized()?;
        let value = inst.evaluate(&y)?;
        visit(&y, value);
        stats.push(&y, value);
    }
    Ok(())
}

fn check_compatible(inst: &ProblemInstance, x: &DensityMatrix) -> Result<()> {
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
    Ok(())
}

/// Rounds `X` by sampling `N_K(0, X)` and normalizing.
pub fn round_gaussian(
    inst: &ProblemInstance,
    x: &DensityMatrix,
    samples: usize,
    rng: &mut Rng,
) -> Result<RoundingOutcome> {
    round_gaussian_visit(inst, x, samples, rng, &mut |_, _| {})
}

/// [`round_gaussian`] that also reports each kept sample to `visit`.
pub fn round_gaussian_visit(
    inst: &ProblemInstance,
    x: &DensityMatrix,
    samples: usize,
    rng: &mut Rng,
    visit: &mut dyn FnMut(&KVector, f64),
) -> Result<RoundingOutcome> {
    if samples == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    check_compatible(inst, x)?;
    let sampler = GaussianSampler::new(x)?;
    let mut stats = SampleStats::default();
    sample_into(inst, &sampler, samples, rng, &mut stats, visit)?;
    stats.finish()
}

/// `exp(-L_r(K))`, the expected-value guarantee of rank-`r` rounding.
pub fn approx_factor(r: usize, field: Field) -> Result<f64> {
    Ok((-l_r(field, r)?).exp())
}

/// Empirical check of `E[value] >= exp(-L_r) * OptSDP`.
#[derive(Debug, Clone, Serialize)]
pub struct GuaranteeVerdict {
    pub rank: usize,
    pub factor: f64,
    pub threshold: f64,
    pub empirical_mean: f64,
    pub stderr: f64,
    pub margin: f64,
    pub samples: usize,
    pub pass: bool,
}

/// Relative slack for the exact rank-one case, where the sample values are
/// all equal and the standard error vanishes.
pub const GUARANTEE_ROUNDOFF: f64 = 1e-12;

pub fn check_rounding_guarantee(
    inst: &ProblemInstance,
    report: &SolveReport,
    samples: usize,
    rng: &mut Rng,
) -> Result<GuaranteeVerdict> {
    let outcome = round_gaussian(inst, &report.solution, samples, rng)?;
    let factor = approx_factor(report.rank.max(1), inst.field())?;
    let threshold = factor * report.value;
    let margin = outcome.empirical_mean - threshold;
    let pass = margin >= -3.0 * outcome.empirical_stderr - GUARANTEE_ROUNDOFF * report.value;
    Ok(GuaranteeVerdict {
        rank: report.rank,
        factor,
        threshold,
        empirical_mean: outcome.empirical_mean,
        stderr: outcome.empirical_stderr,
        margin,
        samples: outcome.samples_used,
        pass,
    })
}

/// CSV header for sample dumps: `x_1..x_n` or `re_1,im_1,...`, then `value`.
pub fn sample_csv_header(field: Field, n: usize) -> Vec<String> {
    let mut header: Vec<String> = match field {
        Field::Real => (1..=n).map(|i| format!("x_{i}")).collect(),
        Field::Complex => (1..=n).flat_map(|i| [format!("re_{i}"), format!("im_{i}")]).collect(),
    };
    header.push("value".into());
    header
}

/// Writes sample records in the dump format, in the given order.
pub struct SampleCsvWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> SampleCsvWriter<W> {
    pub fn new(out: W, field: Field, n: usize) -> Result<Self> {
        let mut inner = csv::Writer::from_writer(out);
        inner.write_record(sample_csv_header(field, n))?;
        Ok(Self { inner })
    }

    pub fn write(&mut self, x: &KVector, value: f64) -> Result<()> {
        let mut row: Vec<String> = x.to_real_coordinates().iter().map(|v| v.to_string()).collect();
        row.push(value.to_string());
        self.inner.write_record(row)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }

    /// Flushes and returns the underlying writer.
    pub fn into_inner(self) -> Result<W> {
        self.inner.into_inner().map_err(|e| Error::Io(e.into_error()))
    }
}
