use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use geomean_core::experiments::{gap_sweep, ico_table};
use geomean_core::instance::{
    gen_icosahedral, gen_kantorovich, gen_maxcut, gen_monomial, gen_random_rank_one,
};
use geomean_core::rounding::{round_gaussian_visit, RoundingOutcome, SampleCsvWriter};
use geomean_core::sos::rounding::DEFAULT_TRIALS;
use geomean_core::sos::{round_sos_visit, solve_optsos, solve_srel, MomentVector};
use geomean_core::{
    exactness_hint, solve_optsdp, Error, Field, GraphSpec, HermitianMatrix, KVector,
    ProblemInstance, SeedStream,
};
use serde::Serialize;
use serde_json::Value;

#[derive(Parser)]
#[command(name = "geomean-opt", version, about = "Geometric mean of PSD quadratic forms on the unit sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the level-k relaxation and print a JSON report.
    Solve(SolveArgs),
    /// Round a density matrix or moment vector and print a JSON outcome.
    Round(RoundArgs),
    /// Hierarchy bounds and rounding means on the icosahedral instance, k = 1..6.
    IcoTable(IcoTableArgs),
    /// Relaxation-to-oracle ratios on random rank-one instances.
    GapSweep(GapSweepArgs),
    /// Write an instance file.
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Optsos,
    Srel,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long = "level", short = 'k', default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    level: u64,
    #[arg(long, value_enum, default_value_t = Method::Optsos)]
    method: Method,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Iteration budget; defaults to the solver's own.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Recorded in the report; the solvers are deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the optimal moment vector as JSON.
    #[arg(long)]
    moments_out: Option<PathBuf>,
}

#[derive(Args)]
struct RoundArgs {
    instance: PathBuf,
    /// Moment JSON from `solve --moments-out`; level one is rounded as a density matrix.
    moments: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Random directions for level k >= 2; samples are split evenly.
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write every kept sample to this CSV file.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args)]
struct IcoTableArgs {
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GapSweepArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = Field::Complex)]
    field: Field,
    #[arg(long, value_delimiter = ',', default_values_t = [4usize, 8, 16, 32, 64])]
    d_list: Vec<usize>,
    /// Instances per d.
    #[arg(long, default_value_t = 20)]
    seeds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = geomean_core::oracle::DEFAULT_RESTARTS)]
    restarts: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    RankOneRandom,
    Monomial,
    Kantorovich,
    Icosahedral,
    Maxcut,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    kind: Kind,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value_t = Field::Real)]
    field: Field,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exponents for `monomial`, e.g. `2,1`.
    #[arg(long, value_delimiter = ',')]
    beta: Vec<u32>,
    /// Eigenvalues of the diagonal matrix for `kantorovich`, e.g. `4,1`.
    #[arg(long, value_delimiter = ',')]
    spectrum: Vec<f64>,
    /// `complete:N`, `prism:M` or a graph JSON file, for `maxcut`.
    #[arg(long)]
    graph: Option<String>,
    /// Copies of each coordinate form for `maxcut`.
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Input(String),
    NotConverged,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            writeln!(out, "{text}").map_err(|e| Failure::Input(e.to_string()))
        }
    }
}

fn emit<T: Serialize>(value: &T, path: Option<&Path>) -> CmdResult {
    write_text(path, &serde_json::to_string_pretty(value)?)
}

fn read_instance(path: &Path) -> Result<ProblemInstance, Failure> {
    Ok(ProblemInstance::from_json(&read_text(path)?)?)
}

#[derive(Serialize)]
struct SolveOutput {
    command: &'static str,
    method: &'static str,
    level: usize,
    field: Field,
    n: usize,
    d: usize,
    value: f64,
    upper_bound: f64,
    gap: f64,
    converged: bool,
    tol: f64,
    iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    multipliers: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exactness: Option<geomean_core::Exactness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu_final: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_moment_eigenvalue: Option<f64>,
    seed: u64,
    wall_time_secs: f64,
}

fn cmd_solve(args: SolveArgs) -> CmdResult {
    let inst = read_instance(&args.instance)?;
    let k = args.level as usize;
    let (out, moments) = match (k, args.method) {
        (1, Method::Optsos) => {
            let max_iter = args.max_iter.unwrap_or(geomean_core::sdp::DEFAULT_MAX_ITER);
            let r = solve_optsdp(&inst, args.tol, max_iter)?;
            let out = SolveOutput {
                command: "solve",
                method: "optsdp",
                level: 1,
                field: inst.field(),
                n: inst.n(),
                d: inst.d(),
                value: r.value,
                upper_bound: r.upper_certificate,
                gap: r.gap,
                converged: r.converged,
                tol: r.tol,
                iterations: r.iterations,
                rank: Some(r.rank),
                multipliers: Some(r.multipliers.clone()),
                exactness: Some(exactness_hint(&inst)),
                mu_final: None,
                min_moment_eigenvalue: None,
                seed: args.seed,
                wall_time_secs: r.wall_time_secs,
            };
            (out, MomentVector::from_density(&r.solution))
        }
        (_, method) => {
            let max_iter = args.max_iter.unwrap_or(geomean_core::sos::solver::DEFAULT_MAX_ITER);
            let (r, name) = match method {
                Method::Optsos => (solve_optsos(&inst, k, args.tol, max_iter)?, "optsos"),
                Method::Srel => (solve_srel(&inst, k, args.tol, max_iter)?, "srel"),
            };
            let out = SolveOutput {
                command: "solve",
                method: name,
                level: k,
                field: inst.field(),
                n: inst.n(),
                d: inst.d(),
                value: r.value,
                upper_bound: r.upper_bound,
                gap: r.gap,
                converged: r.converged,
                tol: r.tol,
                iterations: r.newton_steps,
                rank: None,
                multipliers: None,
                exactness: None,
                mu_final: Some(r.mu_final),
                min_moment_eigenvalue: Some(r.min_moment_eigenvalue),
                seed: args.seed,
                wall_time_secs: r.wall_time_secs,
            };
            (out, r.moments)
        }
    };
    if let Some(path) = &args.moments_out {
        write_text(Some(path), &serde_json::to_string_pretty(&moments.to_json())?)?;
    }
    emit(&out, None)?;
    if out.converged {
        Ok(())
    } else {
        Err(Failure::NotConverged)
    }
}

#[derive(Serialize)]
struct RoundOutput {
    command: &'static str,
    level: usize,
    field: Field,
    n: usize,
    seed: u64,
    samples_requested: usize,
    samples_used: usize,
    samples_skipped: usize,
    trials: usize,
    trials_degenerate: usize,
    empirical_mean: f64,
    empirical_stderr: f64,
    best_value: f64,
    /// Real coordinates, interleaved `re, im` for complex vectors.
    best_vector: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    best_trial_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dump: Option<PathBuf>,
}

fn cmd_round(args: RoundArgs) -> CmdResult {
    let inst = read_instance(&args.instance)?;
    let doc: Value = serde_json::from_str(&read_text(&args.moments)?)?;
    let moments = MomentVector::from_json(&doc)?;
    if moments.field() != inst.field() || moments.n() != inst.n() {
        return Err(Failure::Input(format!(
            "moments are for {} n = {}, instance is {} n = {}",
            moments.field(),
            moments.n(),
            inst.field(),
            inst.n()
        )));
    }
    let mut writer = match &args.dump {
        Some(p) => {
            let file = fs::File::create(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            Some(SampleCsvWriter::new(io::BufWriter::new(file), inst.field(), inst.n())?)
        }
        None => None,
    };
    let mut write_error = None;
    let mut visit = |x: &KVector, v: f64| {
        if let (Some(w), None) = (writer.as_mut(), &write_error) {
            if let Err(e) = w.write(x, v) {
                write_error = Some(e);
            }
        }
    };
    let stream = SeedStream::new(args.seed).child("round");
    let (pooled, trials, degenerate, best_trial): (RoundingOutcome, usize, usize, Option<f64>) =
        if moments.k() == 1 {
            let x = moments.density()?;
            let mut rng = stream.rng();
            let out = round_gaussian_visit(&inst, &x, args.samples, &mut rng, &mut visit)?;
            (out, 1, 0, None)
        } else {
            if args.trials == 0 || args.samples < args.trials {
                return Err(Failure::Input("need samples >= trials >= 1".into()));
            }
            let per_trial = args.samples / args.trials;
            let out = round_sos_visit(&inst, &moments, args.trials, per_trial, &stream, &mut visit)?;
            (out.pooled, out.trials_used, out.trials_degenerate, Some(out.best_trial_mean))
        };
    if let Some(e) = write_error {
        return Err(e.into());
    }
    if let Some(w) = writer {
        w.finish()?;
    }
    emit(
        &RoundOutput {
            command: "round",
            level: moments.k(),
            field: inst.field(),
            n: inst.n(),
            seed: args.seed,
            samples_requested: args.samples,
            samples_used: pooled.samples_used,
            samples_skipped: pooled.samples_skipped,
            trials,
            trials_degenerate: degenerate,
            empirical_mean: pooled.empirical_mean,
            empirical_stderr: pooled.empirical_stderr,
            best_value: pooled.best_value,
            best_vector: pooled.best_vector.to_real_coordinates(),
            best_trial_mean: best_trial,
            dump: args.dump,
        },
        None,
    )
}

fn cmd_ico_table(args: IcoTableArgs) -> CmdResult {
    let record = ico_table(args.samples, args.trials, args.seed, args.tol)?;
    emit(&record, args.out.as_deref())?;
    if record.rows.iter().all(|r| r.converged) {
        Ok(())
    } else {
        Err(Failure::NotConverged)
    }
}

fn cmd_gap_sweep(args: GapSweepArgs) -> CmdResult {
    let record = gap_sweep(
        args.n,
        args.field,
        &args.d_list,
        args.seeds,
        args.seed,
        args.restarts,
        args.tol,
    )?;
    emit(&record, args.out.as_deref())?;
    if record.rows.iter().all(|r| r.sdp_converged.iter().all(|&c| c)) {
        Ok(())
    } else {
        Err(Failure::NotConverged)
    }
}

fn parse_graph(arg: &str) -> Result<GraphSpec, Failure> {
    let size = |s: &str| s.parse::<usize>().map_err(|_| Failure::Input(format!("bad graph size in '{arg}'")));
    if let Some(n) = arg.strip_prefix("complete:") {
        let n = size(n)?;
        if n < 2 {
            return Err(Failure::Input("complete graphs need at least 2 vertices".into()));
        }
        Ok(GraphSpec::complete(n))
    } else if let Some(m) = arg.strip_prefix("prism:") {
        let m = size(m)?;
        if m < 3 {
            return Err(Failure::Input("prism graphs need at least 3 vertices per cycle".into()));
        }
        Ok(GraphSpec::prism(m))
    } else {
        Ok(GraphSpec::from_json(&read_text(Path::new(arg))?)?)
    }
}

fn cmd_gen(args: GenArgs) -> CmdResult {
    let need = |v: Option<usize>, name: &str| v.ok_or_else(|| Failure::Input(format!("--{name} is required")));
    let inst = match args.kind {
        Kind::RankOneRandom => {
            let mut rng = SeedStream::new(args.seed).child("gen").rng();
            gen_random_rank_one(need(args.n, "n")?, need(args.d, "d")?, args.field, &mut rng)?
        }
        Kind::Monomial => {
            if args.beta.is_empty() {
                return Err(Failure::Input("--beta is required".into()));
            }
            gen_monomial(&args.beta)?
        }
        Kind::Kantorovich => {
            if args.spectrum.is_empty() {
                return Err(Failure::Input("--spectrum is required".into()));
            }
            gen_kantorovich(&HermitianMatrix::diagonal(&args.spectrum, Field::Real))?
        }
        Kind::Icosahedral => gen_icosahedral(),
        Kind::Maxcut => {
            let arg = args.graph.as_deref().ok_or_else(|| Failure::Input("--graph is required".into()))?;
            gen_maxcut(&parse_graph(arg)?, args.k)?
        }
    };
    write_text(args.out.as_deref(), &inst.to_json()?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Round(a) => cmd_round(a),
        Command::IcoTable(a) => cmd_ico_table(a),
        Command::GapSweep(a) => cmd_gap_sweep(a),
        Command::Gen(a) => cmd_gen(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::NotConverged) => {
            eprintln!("error: solver did not converge");
            ExitCode::from(2)
        }
    }
}
