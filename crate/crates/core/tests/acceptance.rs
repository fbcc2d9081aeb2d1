//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fail.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{cplx2, hierarchy_suite, log_genchisq_mc, normalization_loss_mc, regression_suite, wishart};
use geomean_core::experiments::{gap_sweep, ico_table, median, ICO_ROUNDING_REFERENCE, ICO_UPPER_REFERENCE};
use geomean_core::instance::{gen_icosahedral, gen_kantorovich, gen_maxcut, gen_monomial, gen_random_rank_one};
use geomean_core::oracle::{cube_max, local_max_sphere, DEFAULT_RESTARTS, SYMMETRIC_RESTARTS};
use geomean_core::sampling::standard_normal;
use geomean_core::sdp::{DEFAULT_MAX_ITER, DEFAULT_TOL};
use geomean_core::sos::{solve_optsos, solve_srel, SosReport};
use geomean_core::special::{c_nk, expected_log_genchisq, kantorovich_bound, l_r, monomial_max, EigenvalueProfile};
use geomean_core::{
    check_rounding_guarantee, eigh, round_gaussian, solve_optsdp, Field, GraphSpec, HermitianMatrix,
    ProblemInstance, SeedStream, SolveReport, C64,
};
use nalgebra::DMatrix;
use rand::Rng as _;

const SEED: u64 = 0;
const SDP_TOL: f64 = 1e-8;
const SOS_TOL: f64 = 1e-7;
const SOS_MAX_ITER: usize = 2000;
const MOMENT_FLOOR: f64 = -1e-8;

type Outcome = Result<String, String>;

/// Collects failures of a criterion with a short note for each.
#[derive(Default)]
struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }

    fn finish(self) -> Outcome {
        if self.failures.is_empty() {
            Ok(self.notes.join("; "))
        } else {
            Err(self.failures.join("; "))
        }
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn icosahedral_upper_bounds() -> Outcome {
    let start = Instant::now();
    let inst = gen_icosahedral();
    let mut c = Checks::default();
    let mut values = Vec::new();
    for (k, want) in (1..=6).zip(ICO_UPPER_REFERENCE) {
        let r = solve_optsos(&inst, k, 1e-6, SOS_MAX_ITER).map_err(err)?;
        c.require(r.converged, format!("k={k} did not converge"));
        c.require((r.value - want).abs() <= 1e-3, format!("k={k}: {:.6} vs {want}", r.value));
        values.push(format!("{:.5}", r.value));
    }
    let secs = start.elapsed().as_secs_f64();
    c.require(secs < 300.0, format!("runtime {secs:.1}s"));
    c.note(format!("values [{}] in {secs:.2}s", values.join(", ")));
    c.finish()
}

fn icosahedral_rounding_means() -> Outcome {
    let record = ico_table(100_000, 64, SEED, 1e-6).map_err(err)?;
    let mut c = Checks::default();
    let mut means = Vec::new();
    for (row, want) in record.rows.iter().zip(ICO_ROUNDING_REFERENCE) {
        let (m, se) = (row.rounding_mean, row.rounding_stderr);
        c.require(
            (m - want).abs() <= 0.02 && (m - want).abs() <= 3.0 * se,
            format!("k={}: mean {m:.5} +- {se:.5} vs {want}", row.k),
        );
        means.push(format!("{m:.4}"));
    }
    c.note(format!("means [{}]", means.join(", ")));
    c.finish()
}

fn random_unitary(field: Field, n: usize, stream: &SeedStream) -> DMatrix<C64> {
    let mut rng = stream.rng();
    let cols: Vec<_> = (0..n).map(|_| standard_normal(field, n, &mut rng)).collect();
    DMatrix::from_columns(&cols).qr().q()
}

fn commuting_instance(field: Field, n: usize, d: usize, stream: &SeedStream) -> ProblemInstance {
    let u = random_unitary(field, n, &stream.child("basis"));
    let mut rng = stream.child("spectra").rng();
    let forms = (0..d)
        .map(|_| {
            let diag: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..3.0)).collect();
            let dm = HermitianMatrix::diagonal(&diag, field);
            HermitianMatrix::new(field, &u * dm.as_matrix() * u.adjoint()).unwrap()
        })
        .collect();
    ProblemInstance::new(field, forms).unwrap()
}

fn exact_cases() -> Outcome {
    let mut c = Checks::default();
    let root = SeedStream::new(SEED).child("acceptance-exact");
    let mut rng = root.child("beta").rng();
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let beta: Vec<u32> = loop {
            let n = rng.random_range(2..=4);
            let b: Vec<u32> = (0..n).map(|_| rng.random_range(0..=3)).collect();
            let d: u32 = b.iter().sum();
            if (1..=8).contains(&d) {
                break b;
            }
        };
        let r = solve_optsdp(&gen_monomial(&beta).map_err(err)?, SDP_TOL, DEFAULT_MAX_ITER).map_err(err)?;
        let want = monomial_max(&beta).map_err(err)?;
        let rel = (r.value - want).abs() / want;
        worst = worst.max(rel);
        c.require(rel <= 1e-5, format!("monomial {beta:?}: {} vs {want}", r.value));
    }
    let spectra: [&[f64]; 5] = [&[4.0, 1.0], &[9.0, 2.0, 1.0], &[3.0, 3.0, 1.5, 0.5], &[10.0, 0.1], &[2.0, 1.9, 1.8, 1.0]];
    for spectrum in spectra {
        let inst = gen_kantorovich(&HermitianMatrix::diagonal(spectrum, Field::Real)).map_err(err)?;
        let r = solve_optsdp(&inst, SDP_TOL, DEFAULT_MAX_ITER).map_err(err)?;
        let want = kantorovich_bound(spectrum[0], *spectrum.last().unwrap()).map_err(err)?.sqrt();
        let rel = (r.value - want).abs() / want;
        worst = worst.max(rel);
        c.require(rel <= 1e-5, format!("kantorovich {spectrum:?}: {} vs {want}", r.value));
    }
    for (i, (field, n, d)) in [(Field::Real, 2, 3), (Field::Real, 3, 4), (Field::Complex, 2, 3), (Field::Complex, 3, 4)]
        .into_iter()
        .enumerate()
    {
        let stream = root.child("commuting").index(i as u64);
        let inst = commuting_instance(field, n, d, &stream);
        let r = solve_optsdp(&inst, SDP_TOL, DEFAULT_MAX_ITER).map_err(err)?;
        let o = local_max_sphere(&inst, DEFAULT_RESTARTS, &stream.child("oracle"), &[]).map_err(err)?;
        let rel = (r.value - o.best_value).abs() / o.best_value;
        worst = worst.max(rel);
        c.require(rel <= 1e-5, format!("commuting {field} n={n} d={d}: {} vs oracle {}", r.value, o.best_value));
    }
    c.note(format!("19 instances, worst relative error {worst:.1e}"));
    c.finish()
}

fn rounding_guarantee() -> Outcome {
    let mut c = Checks::default();
    let root = SeedStream::new(SEED).child("acceptance-guarantee");
    let mut rank_one = 0;
    let mut cases = regression_suite();
    let a = HermitianMatrix::diagonal(&[3.0, 1.0, 0.5], Field::Complex);
    cases.push(("identical complex forms", ProblemInstance::new(Field::Complex, vec![a; 3]).unwrap()));
    for (i, (name, inst)) in cases.into_iter().enumerate() {
        let report = solve_optsdp(&inst, DEFAULT_TOL, DEFAULT_MAX_ITER).map_err(err)?;
        c.require(report.converged, format!("{name}: relaxation did not converge"));
        let stream = root.index(i as u64);
        let verdict = check_rounding_guarantee(&inst, &report, 100_000, &mut stream.rng()).map_err(err)?;
        c.require(
            verdict.pass,
            format!("{name}: mean {:.5} +- {:.5} below {:.5}", verdict.empirical_mean, verdict.stderr, verdict.threshold),
        );
        if report.rank == 1 {
            rank_one += 1;
            let out = round_gaussian(&inst, &report.solution, 1000, &mut stream.child("rank-one").rng()).map_err(err)?;
            let exact = (out.best_value - report.value).abs() <= 1e-12 * report.value
                && (out.empirical_mean - report.value).abs() <= 1e-12 * report.value;
            c.require(exact, format!("{name}: rank-one rounding {} vs {}", out.best_value, report.value));
        }
    }
    c.require(rank_one > 0, "no rank-one case exercised");
    c.note(format!("11 instances, {rank_one} of rank one"));
    c.finish()
}

fn constants() -> Outcome {
    let mut c = Checks::default();
    for field in [Field::Real, Field::Complex] {
        c.require(matches!(l_r(field, 1), Ok(v) if v == 0.0), format!("L_1({field}) is not exactly 0"));
    }
    let root = SeedStream::new(SEED).child("acceptance-constants");
    for field in [Field::Real, Field::Complex] {
        for r in [1usize, 2, 4, 8] {
            let stream = root.child("normalization").child(&field.to_string()).index(r as u64);
            let (mean, se) = normalization_loss_mc(field, r, 1_000_000, &stream);
            let want = l_r(field, r).map_err(err)?;
            c.require((mean - want).abs() <= 3.0 * se, format!("L_{r}({field}): MC {mean} +- {se} vs {want}"));
        }
    }
    let profiles: [(&str, &[f64]); 3] = [
        ("distinct", &[3.0, 2.0, 1.0, 0.25]),
        ("two-block", &[0.6, 0.1, 0.1, 0.1, 0.1]),
        ("all-equal", &[0.5, 0.5, 0.5]),
    ];
    for (i, (label, lams)) in profiles.into_iter().enumerate() {
        let want = expected_log_genchisq(&EigenvalueProfile::new(lams).map_err(err)?).map_err(err)?;
        let (mean, se) = log_genchisq_mc(lams, 10_000_000, &root.child("genchisq").index(i as u64));
        c.require((mean - want).abs() <= 3.0 * se, format!("{label}: MC {mean} +- {se} vs {want}"));
        c.note(format!("{label} z = {:.2}", (mean - want) / se));
    }
    for n in 2..=6 {
        let cap = l_r(Field::Complex, n).map_err(err)?;
        let mut prev = f64::INFINITY;
        for k in 2..=50 {
            let v = c_nk(n, k).map_err(err)?;
            c.require(v <= cap, format!("C({n},{k}) = {v} above L_{n}(C) = {cap}"));
            c.require(v < prev, format!("C({n},{k}) = {v} not below C({n},{}) = {prev}", k - 1));
            prev = v;
        }
    }
    c.finish()
}

fn hierarchy_ordering() -> Outcome {
    let mut c = Checks::default();
    let mut cases = hierarchy_suite();
    cases.push(("icosahedral", gen_icosahedral()));
    let mut solves = 0;
    for (i, (name, inst)) in cases.iter().enumerate() {
        let restarts = if *name == "icosahedral" { SYMMETRIC_RESTARTS } else { DEFAULT_RESTARTS };
        let oracle = local_max_sphere(inst, restarts, &SeedStream::new(SEED).child("acceptance-hierarchy").index(i as u64), &[])
            .map_err(err)?;
        let d = inst.d();
        let levels: Vec<usize> = if d <= 6 { (1..=d).collect() } else { vec![1, 2, 3] };
        let mut optsos: Vec<(usize, SosReport)> = Vec::new();
        for &k in &levels {
            let a = solve_optsos(inst, k, SOS_TOL, SOS_MAX_ITER).map_err(err)?;
            let b = solve_srel(inst, k, SOS_TOL, SOS_MAX_ITER).map_err(err)?;
            solves += 2;
            c.require(
                oracle.best_value <= a.value + a.gap + SOS_TOL,
                format!("{name} k={k}: oracle {} above OptSOS {}", oracle.best_value, a.upper_bound),
            );
            c.require(
                a.value + a.gap <= b.value + b.gap + SOS_TOL,
                format!("{name} k={k}: OptSOS {} above srel {}", a.upper_bound, b.upper_bound),
            );
            optsos.push((k, a));
        }
        if levels.last() == Some(&d) {
            let one = optsos[0].1.value;
            let top = optsos.last().unwrap().1.value;
            c.require(top <= one + SOS_TOL, format!("{name}: OptSOS_{d} = {top:.9} above OptSOS_1 = {one:.9}"));
        }
    }
    let ico = gen_icosahedral();
    let srel: Vec<f64> = (1..=6)
        .map(|k| solve_srel(&ico, k, SOS_TOL, SOS_MAX_ITER).map(|r| r.value))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    for (a, b) in [(1, 2), (2, 6), (1, 3), (3, 6)] {
        c.require(srel[b - 1] <= srel[a - 1] + 1e-6, format!("srel_{b} = {} above srel_{a} = {}", srel[b - 1], srel[a - 1]));
    }
    let stream = SeedStream::new(SEED).child("acceptance-rank-one");
    for (i, (n, d, field)) in [(2, 4, Field::Complex), (2, 5, Field::Real), (3, 4, Field::Real), (3, 3, Field::Complex)]
        .into_iter()
        .enumerate()
    {
        let inst = gen_random_rank_one(n, d, field, &mut stream.index(i as u64).rng()).map_err(err)?;
        for k in 1..=d {
            let v = solve_optsos(&inst, k, SOS_TOL, SOS_MAX_ITER).map_err(err)?.value;
            let floor = 1.0 / (n + k - 1) as f64;
            c.require(v >= floor - 1e-8, format!("rank-one {field} n={n} d={d} k={k}: {v} below {floor}"));
        }
    }
    c.note(format!("{} instances, {solves} hierarchy solves", cases.len()));
    c.finish()
}

fn gap_sweep_property() -> Outcome {
    let record = gap_sweep(2, Field::Complex, &[4, 64], 20, SEED, DEFAULT_RESTARTS, 1e-6).map_err(err)?;
    let limit = l_r(Field::Complex, 2).map_err(err)?.exp() + 0.05;
    let mut c = Checks::default();
    let (low, high) = (&record.rows[0], &record.rows[1]);
    c.require(
        high.median_ratio > low.median_ratio,
        format!("median at d=64 {} not above d=4 {}", high.median_ratio, low.median_ratio),
    );
    let max_ratio = record.rows.iter().flat_map(|r| &r.ratios).copied().fold(0.0, f64::max);
    let min_sdp = record.rows.iter().flat_map(|r| &r.sdp_values).copied().fold(f64::INFINITY, f64::min);
    c.require(max_ratio <= limit, format!("ratio {max_ratio} above {limit}"));
    c.require(min_sdp >= 0.5 - 1e-9, format!("relaxation value {min_sdp} below 1/2"));
    c.require(median(&high.ratios) == high.median_ratio, "median mismatch");
    c.note(format!(
        "medians {:.4} -> {:.4}, max ratio {max_ratio:.4} <= {limit:.4}, min value {min_sdp:.4}",
        low.median_ratio, high.median_ratio
    ));
    c.finish()
}

fn maxcut_construction() -> Outcome {
    let mut c = Checks::default();
    let k4 = cube_max(&GraphSpec::complete(4)).map_err(err)?;
    c.require(k4 == 2.0 / 3.0, format!("cube_max(K4) = {k4}"));
    for (label, g) in [("K4", GraphSpec::complete(4)), ("prism", GraphSpec::prism(3))] {
        let cut = cube_max(&g).map_err(err)?;
        let top = eigh(&g.q_matrix()).map_err(err)?.eigenvalues[0];
        c.require(
            0.5 * top <= cut + 1e-12 && cut <= top + 1e-12 && top <= 1.0 + 1e-12,
            format!("{label}: sandwich fails with cut {cut}, lambda_max {top}"),
        );
        for k in [1, 2] {
            let inst = gen_maxcut(&g, k).map_err(err)?;
            let stream = SeedStream::new(SEED).child("acceptance-maxcut").child(label).index(k as u64);
            let o = local_max_sphere(&inst, DEFAULT_RESTARTS, &stream, &[]).map_err(err)?;
            let product = o.best_value.powi(inst.d() as i32);
            c.require(cut <= product + 1e-8, format!("{label} k={k}: cut {cut} above oracle product {product}"));
        }
        c.note(format!("{label}: cut {cut:.6}, lambda_max {top:.6}"));
    }
    c.finish()
}

fn numerical_hygiene() -> Outcome {
    let mut c = Checks::default();
    let mut sdp_reports: Vec<(String, SolveReport)> = Vec::new();
    let mut sos_reports: Vec<(String, SosReport)> = Vec::new();
    let mut cases = regression_suite();
    cases.extend(hierarchy_suite());
    cases.push(("cplx2", cplx2()));
    cases.push(("wishart real n=3 d=6", wishart(3, 6, 2, Field::Real, &SeedStream::new(SEED).child("hygiene"))));
    for (name, inst) in &cases {
        sdp_reports.push((name.to_string(), solve_optsdp(inst, SDP_TOL, DEFAULT_MAX_ITER).map_err(err)?));
        if inst.d() <= 6 {
            for k in 1..=inst.d().min(3) {
                sos_reports.push((format!("{name} k={k}"), solve_optsos(inst, k, SOS_TOL, SOS_MAX_ITER).map_err(err)?));
                sos_reports.push((format!("{name} srel k={k}"), solve_srel(inst, k, SOS_TOL, SOS_MAX_ITER).map_err(err)?));
            }
        }
    }
    for (name, r) in &sdp_reports {
        if r.converged {
            c.require(r.gap <= r.tol * r.value.max(1.0), format!("{name}: gap {} above tol", r.gap));
        }
    }
    for (name, r) in &sos_reports {
        if r.converged {
            c.require(r.gap <= r.tol * r.value.max(1.0), format!("{name}: gap {} above tol", r.gap));
        }
        c.require(r.min_moment_eigenvalue >= MOMENT_FLOOR, format!("{name}: moment eigenvalue {}", r.min_moment_eigenvalue));
    }
    let converged = sdp_reports.iter().filter(|(_, r)| r.converged).count()
        + sos_reports.iter().filter(|(_, r)| r.converged).count();

    let a = ico_table(4000, 16, SEED, 1e-6).map_err(err)?;
    let b = ico_table(4000, 16, SEED, 1e-6).map_err(err)?;
    let same_table = a.rows.iter().zip(&b.rows).all(|(x, y)| {
        x.rounding_mean == y.rounding_mean && x.rounding_best == y.rounding_best && x.best_direction_mean == y.best_direction_mean
    });
    c.require(same_table, "ico-table rounding differs between identical runs");
    let a = gap_sweep(2, Field::Complex, &[4, 8], 3, SEED, 16, 1e-6).map_err(err)?;
    let b = gap_sweep(2, Field::Complex, &[4, 8], 3, SEED, 16, 1e-6).map_err(err)?;
    let same_sweep = a.rows.iter().zip(&b.rows).all(|(x, y)| x.ratios == y.ratios);
    c.require(same_sweep, "gap sweep differs between identical runs");
    let ico = gen_icosahedral();
    let r = solve_optsdp(&ico, SDP_TOL, DEFAULT_MAX_ITER).map_err(err)?;
    let run = || round_gaussian(&ico, &r.solution, 20_000, &mut SeedStream::new(SEED).child("hygiene-round").rng());
    let (x, y) = (run().map_err(err)?, run().map_err(err)?);
    c.require(x.empirical_mean == y.empirical_mean && x.best_vector == y.best_vector, "Gaussian rounding differs");
    let mc = |s| normalization_loss_mc(Field::Complex, 4, 10_000, &SeedStream::new(s));
    c.require(mc(SEED) == mc(SEED), "Monte Carlo estimate differs");
    c.note(format!("{converged} converged solves checked, {} moment matrices", sos_reports.len()));
    c.finish()
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("icosahedral upper bounds", icosahedral_upper_bounds),
        ("icosahedral rounding means", icosahedral_rounding_means),
        ("exact cases", exact_cases),
        ("rounding guarantee", rounding_guarantee),
        ("constants", constants),
        ("hierarchy ordering", hierarchy_ordering),
        ("gap sweep", gap_sweep_property),
        ("maxcut construction", maxcut_construction),
        ("numerical hygiene", numerical_hygiene),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
