#![allow(dead_code)]

use geomean_core::instance::{
    gen_icosahedral, gen_kantorovich, gen_maxcut, gen_monomial, gen_random_rank_one,
};
use geomean_core::sampling::standard_normal;
use geomean_core::{Field, GraphSpec, HermitianMatrix, ProblemInstance, SeedStream, C64};
use nalgebra::DMatrix;

pub fn real_form(rows: &[&[f64]]) -> HermitianMatrix {
    let n = rows.len();
    HermitianMatrix::from_real(DMatrix::from_fn(n, n, |r, c| rows[r][c])).unwrap()
}

pub fn complex_form(re: &[&[f64]], im: &[&[f64]]) -> HermitianMatrix {
    let n = re.len();
    let data = DMatrix::from_fn(n, n, |r, c| C64::new(re[r][c], im[r][c]));
    HermitianMatrix::new(Field::Complex, data).unwrap()
}

/// Three dense real forms in two variables.
pub fn real2() -> ProblemInstance {
    ProblemInstance::new(
        Field::Real,
        vec![
            real_form(&[&[2.0, 1.0], &[1.0, 1.0]]),
            real_form(&[&[1.0, 0.0], &[0.0, 3.0]]),
            real_form(&[&[1.0, -0.5], &[-0.5, 2.0]]),
        ],
    )
    .unwrap()
}

/// Four real forms in three variables, three of them singular.
pub fn real3() -> ProblemInstance {
    ProblemInstance::new(
        Field::Real,
        vec![
            real_form(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]),
            real_form(&[&[1.0, 1.0, 0.0], &[1.0, 1.0, 0.0], &[0.0, 0.0, 0.0]]),
            real_form(&[&[0.0, 0.0, 0.0], &[0.0, 1.0, 1.0], &[0.0, 1.0, 1.0]]),
            real_form(&[&[2.0, 0.0, 1.0], &[0.0, 1.0, 0.0], &[1.0, 0.0, 1.0]]),
        ],
    )
    .unwrap()
}

/// Projectors onto `e_1`, `(e_1 + e_2)/sqrt 2` and `(e_1 + i e_2)/sqrt 2`.
pub fn cplx2() -> ProblemInstance {
    let zero: &[&[f64]] = &[&[0.0, 0.0], &[0.0, 0.0]];
    ProblemInstance::new(
        Field::Complex,
        vec![
            complex_form(&[&[1.0, 0.0], &[0.0, 0.0]], zero),
            complex_form(&[&[0.5, 0.5], &[0.5, 0.5]], zero),
            complex_form(&[&[0.5, 0.0], &[0.0, 0.5]], &[&[0.0, -0.5], &[0.5, 0.0]]),
        ],
    )
    .unwrap()
}

/// `d` Wishart forms `G G†` with `G` an `n x r` standard Gaussian matrix.
pub fn wishart(n: usize, d: usize, r: usize, field: Field, stream: &SeedStream) -> ProblemInstance {
    let mut rng = stream.rng();
    let forms = (0..d)
        .map(|_| {
            let cols: Vec<_> = (0..r).map(|_| standard_normal(field, n, &mut rng)).collect();
            let g = DMatrix::from_columns(&cols);
            HermitianMatrix::new(field, &g * g.adjoint()).unwrap()
        })
        .collect();
    ProblemInstance::new(field, forms).unwrap()
}

/// The ten fixed instances used by the rounding and hierarchy regressions.
pub fn regression_suite() -> Vec<(&'static str, ProblemInstance)> {
    let s = SeedStream::new(20_240_601).child("regression");
    vec![
        ("rank-one complex n=2 d=4", gen_random_rank_one(2, 4, Field::Complex, &mut s.index(0).rng()).unwrap()),
        ("rank-one real n=3 d=6", gen_random_rank_one(3, 6, Field::Real, &mut s.index(1).rng()).unwrap()),
        ("rank-one complex n=3 d=5", gen_random_rank_one(3, 5, Field::Complex, &mut s.index(2).rng()).unwrap()),
        ("monomial (2,1)", gen_monomial(&[2, 1]).unwrap()),
        ("kantorovich diag(4,1)", gen_kantorovich(&HermitianMatrix::diagonal(&[4.0, 1.0], Field::Real)).unwrap()),
        ("icosahedral", gen_icosahedral()),
        ("maxcut K4 k=1", gen_maxcut(&GraphSpec::complete(4), 1).unwrap()),
        ("wishart real n=3 d=3", wishart(3, 3, 3, Field::Real, &s.index(3))),
        ("wishart complex n=2 d=5", wishart(2, 5, 2, Field::Complex, &s.index(4))),
        ("wishart rank-2 real n=4 d=4", wishart(4, 4, 2, Field::Real, &s.index(5))),
    ]
}

/// Instances small enough for every hierarchy level.
pub fn hierarchy_suite() -> Vec<(&'static str, ProblemInstance)> {
    let s = SeedStream::new(7).child("hierarchy");
    vec![
        ("real2", real2()),
        ("real3", real3()),
        ("cplx2", cplx2()),
        ("monomial (1,1,2)", gen_monomial(&[1, 1, 2]).unwrap()),
        ("rank-one complex n=2 d=4", gen_random_rank_one(2, 4, Field::Complex, &mut s.index(0).rng()).unwrap()),
        ("rank-one real n=3 d=4", gen_random_rank_one(3, 4, Field::Real, &mut s.index(1).rng()).unwrap()),
        ("wishart complex n=2 d=4", wishart(2, 4, 1, Field::Complex, &s.index(2))),
    ]
}

/// Sample mean and standard error.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Paired Monte Carlo estimate of `E[ln((1/r) sum |z_i|^2)] - E[ln |z_1|^2]`.
pub fn normalization_loss_mc(field: Field, r: usize, samples: usize, stream: &SeedStream) -> (f64, f64) {
    let mut rng = stream.rng();
    let diffs: Vec<f64> = (0..samples)
        .map(|_| {
            let z = standard_normal(field, r, &mut rng);
            let total: f64 = z.iter().map(|c| c.norm_sqr()).sum();
            (total / r as f64).ln() - z[0].norm_sqr().ln()
        })
        .collect();
    mean_stderr(&diffs)
}

/// Monte Carlo estimate of `E[ln sum_i lambda_i |z_i|^2]` for complex `z`.
pub fn log_genchisq_mc(lambdas: &[f64], samples: usize, stream: &SeedStream) -> (f64, f64) {
    let mut rng = stream.rng();
    let logs: Vec<f64> = (0..samples)
        .map(|_| {
            let z = standard_normal(Field::Complex, lambdas.len(), &mut rng);
            z.iter().zip(lambdas).map(|(c, l)| l * c.norm_sqr()).sum::<f64>().ln()
        })
        .collect();
    mean_stderr(&logs)
}
