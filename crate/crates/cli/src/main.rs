//! `uavplace`: place UAVs with strategyproof mechanisms, query optima, audit
//! truthfulness and approximation ratios, and run the Monte Carlo suites.

mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;
use uavplace::format::fmt_num;
use uavplace::montecarlo::{
    run_corner_match_experiment, run_dual_convergence_experiment, run_ratio_experiment,
    DistributionSpec, ExperimentConfig, ExperimentResults,
};
use uavplace::oracle::{opt_dual_single_at, DEFAULT_GRID_RESOLUTION};
use uavplace::verify::{check_ratio_at, DEFAULT_TOLERANCE};
use uavplace::{
    check_power_inequalities, check_strategyproof, fuzz_strategyproof, json, opt_favorable,
    opt_k_obnoxious, opt_obnoxious, opt_two_uav, presets, DeviationReport, Error, Game, Mechanism,
    OracleResult, Outcome, Preference, Profile, RatioReport, UserReport,
};

use output::{json_line, json_object, num, write_table};

const FORMATS: &str = "\
Profile JSON (--profile):
  {\"arena\": {\"A\": 0.5, \"B\": 0.5, \"z0\": 0, \"alpha\": 2},
   \"users\": [{\"x\": 0.2, \"y\": 0.5, \"w\": 1, \"pref\": \"adverse\"},
             {\"x\": 0.6, \"y\": 0.5, \"prefs\": [\"favorable\", \"adverse\"]}]}
  The area is [0, 2A] x [0, 2B]. w defaults to 1, z0 to 0, alpha to 2.
  pref is needed by dual-majority, prefs by two-uav-dual. Unknown keys are errors.

Mechanisms: median, wmedian, corner-w, corner-u, dual-majority, two-uav-dual,
  k-endpoints, percentile, wmean-baseline, opt-corner-baseline.
  k-UAV rules take --k or a name:k suffix (default k = 2).

Output:
  place      {\"x\",\"y\",\"z0\"}, or an array of them for multi-UAV rules
  opt        {\"placement\",\"value\",\"method\",\"tolerance\"}
  verify-sp  one JSON deviation report per line
  ratio      one JSON ratio report per line
  lemmas     one JSON report
  simulate   CSV: experiment,mechanism,distribution,alpha,z0,n,n2_over_n1,trial,seed,metric,value
             (--summary: per-configuration means, metric mean_<m> or probability_match)
  --format csv switches place, opt, verify-sp and ratio to CSV tables.
  verify-sp and ratio print \"violations=<count> max_ratio=<value> bound=<value>\" to stderr.
  Numbers keep 12 significant digits.

Exit status: 0 success, 1 usage or input error, 2 strategyproofness
violations, ratio bound breaches or failed lemma checks.";

#[derive(Debug, Parser)]
#[command(name = "uavplace", version, about, after_long_help = FORMATS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a mechanism on a profile and print the placement.
    Place(PlaceArgs),
    /// Compute the full-information optimum of a game.
    Opt(OptArgs),
    /// Search for profitable misreports.
    VerifySp(VerifyArgs),
    /// Compare a mechanism with the optimum against its proven bound.
    Ratio(RatioArgs),
    /// Run one of the Monte Carlo experiments and print CSV.
    Simulate(SimulateArgs),
    /// Check the power-mean inequalities behind the ratio bounds.
    Lemmas(LemmaArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct ProfileSource {
    /// Profile JSON file.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Built-in profile instead of a file.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(presets::PRESET_NAMES))]
    example: Option<String>,
}

#[derive(Debug, Args)]
struct Overrides {
    /// Path-loss exponent, replacing the profile's.
    #[arg(long)]
    alpha: Option<f64>,
    /// UAV altitude, replacing the profile's.
    #[arg(long)]
    z0: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Debug, Args)]
struct MechanismArgs {
    /// Mechanism name, optionally `name:k`.
    #[arg(long)]
    mechanism: String,
    /// Number of UAVs for k-endpoints and percentile.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Debug, Args)]
struct PlaceArgs {
    #[command(flatten)]
    source: ProfileSource,
    #[command(flatten)]
    mechanism: MechanismArgs,
    #[command(flatten)]
    overrides: Overrides,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GameArg {
    Favorable,
    Obnoxious,
    Dual,
    TwoUavDual,
    KObnoxious,
}

#[derive(Debug, Args)]
struct OptArgs {
    #[command(flatten)]
    source: ProfileSource,
    /// Take the game from this mechanism.
    #[arg(long, conflicts_with = "game", required_unless_present = "game")]
    mechanism: Option<String>,
    /// Game to optimize.
    #[arg(long, value_enum)]
    game: Option<GameArg>,
    /// Number of UAVs for the k-UAV obnoxious game.
    #[arg(long)]
    k: Option<usize>,
    /// Grid resolution for dual games at alpha != 2.
    #[arg(long, default_value_t = DEFAULT_GRID_RESOLUTION)]
    grid_resolution: usize,
    #[command(flatten)]
    overrides: Overrides,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: ProfileSource,
    #[command(flatten)]
    mechanism: MechanismArgs,
    #[command(flatten)]
    overrides: Overrides,
    /// Smallest gain that counts as a violation.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    /// Random misreports per user, on top of the structured search.
    #[arg(long, default_value_t = 0)]
    fuzz: usize,
    /// Seed for the random misreports.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct RatioArgs {
    #[command(flatten)]
    source: ProfileSource,
    #[command(flatten)]
    mechanism: MechanismArgs,
    /// Path-loss exponents to check, comma separated. Altitude is set to 0.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    alpha: Vec<f64>,
    /// Grid resolution for grid-backed optima.
    #[arg(long, default_value_t = DEFAULT_GRID_RESOLUTION)]
    grid_resolution: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Experiment {
    /// Median and weighted median against the favorable optimum.
    Fig2,
    /// Weighted corner rule against the obnoxious optimum.
    Fig3,
    /// Dual majority rule against the dual optimum.
    Fig4,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    experiment: Experiment,
    /// Population sizes, e.g. `2-30,50,100`. Defaults per experiment.
    #[arg(long)]
    n_list: Option<String>,
    /// Trials per population size. Defaults to 1000 (fig2) or 2000.
    #[arg(long)]
    trials: Option<u64>,
    /// Location distribution: uniform, beta(a,b), normal(mean,sd), logistic(mean,scale).
    /// Defaults to uniform (fig2) or beta(2,5).
    #[arg(long)]
    dist: Option<String>,
    /// Adverse to favorable population ratios for fig4, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1.5,4")]
    n2_over_n1: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// UAV altitude over the unit square.
    #[arg(long, default_value_t = 0.2)]
    z0: f64,
    /// Print per-configuration means instead of per-trial rows.
    #[arg(long)]
    summary: bool,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LemmaArgs {
    /// Random triples to test.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure of a run, mapped to an exit status.
#[derive(Debug)]
enum Failure {
    Input(String),
    Findings,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(format!("i/o error: {e}"))
    }
}

type Run = std::result::Result<(), Failure>;

fn open_output(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
            Failure::Input(format!("cannot create {}: {e}", path.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_profile(src: &ProfileSource, ov: Option<&Overrides>) -> Result<Profile, Failure> {
    let mut prof = match (&src.profile, &src.example) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
            json::parse_profile(&text)?
        }
        (None, Some(name)) => presets::preset(name)?,
        (None, None) => unreachable!("clap requires a profile source"),
    };
    if let Some(ov) = ov {
        if let Some(alpha) = ov.alpha {
            prof = prof.with_alpha(alpha)?;
        }
        if let Some(z0) = ov.z0 {
            prof = prof.with_altitude(z0)?;
        }
    }
    Ok(prof)
}

fn parse_mechanism(name: &str, k: Option<usize>) -> Result<Mechanism, Failure> {
    Ok(match k {
        Some(k) => Mechanism::parse(name.split(':').next().unwrap_or(name), k)?,
        None => name.parse()?,
    })
}

fn placement_rows(outcome: &Outcome) -> Vec<Vec<String>> {
    outcome
        .placements()
        .iter()
        .enumerate()
        .map(|(i, p)| vec![i.to_string(), fmt_num(p.x), fmt_num(p.y), fmt_num(p.z)])
        .collect()
}

fn place(args: &PlaceArgs) -> Run {
    let prof = load_profile(&args.source, Some(&args.overrides))?;
    let mech = parse_mechanism(&args.mechanism.mechanism, args.mechanism.k)?;
    let outcome = mech.place(&prof)?;
    let mut out = open_output(&args.output.out)?;
    match args.output.format {
        Format::Json => writeln!(out, "{}", json_line(&outcome))?,
        Format::Csv => write_table(
            &mut out,
            &["uav", "x", "y", "z0"],
            &placement_rows(&outcome),
        )?,
    }
    out.flush()?;
    Ok(())
}

fn game_of(arg: GameArg) -> Game {
    match arg {
        GameArg::Favorable => Game::Favorable,
        GameArg::Obnoxious => Game::Obnoxious,
        GameArg::Dual => Game::Dual,
        GameArg::TwoUavDual => Game::TwoUavDual,
        GameArg::KObnoxious => Game::KObnoxious,
    }
}

fn opt(args: &OptArgs) -> Run {
    let prof = load_profile(&args.source, Some(&args.overrides))?;
    let (game, k) = match (&args.mechanism, args.game) {
        (_, Some(g)) => (game_of(g), args.k.unwrap_or(2)),
        (Some(name), None) => {
            let mech = parse_mechanism(name, args.k)?;
            let k = match mech {
                Mechanism::KEndpoints { k } | Mechanism::Percentile { k } => k,
                _ => 2,
            };
            (mech.game(), k)
        }
        (None, None) => unreachable!("clap requires --mechanism or --game"),
    };
    let res: OracleResult = match game {
        Game::Favorable => opt_favorable(&prof)?,
        Game::Obnoxious => opt_obnoxious(&prof)?,
        Game::Dual => opt_dual_single_at(&prof, args.grid_resolution)?,
        Game::TwoUavDual => opt_two_uav(&prof, None)?,
        Game::KObnoxious => opt_k_obnoxious(&prof, k, None)?,
        Game::KFavorable => {
            return Err(
                Error::Unsupported("no optimum oracle for the k-UAV favorable game".into()).into(),
            )
        }
    };
    let method = json_line(&res.method).trim_matches('"').to_string();
    let mut out = open_output(&args.output.out)?;
    match args.output.format {
        Format::Json => {
            let placement = serde_json::from_str::<Value>(&json_line(&res.outcome))
                .expect("emitted JSON parses");
            let line = json_object(vec![
                ("placement", placement),
                ("value", num(res.value)),
                ("method", Value::String(method)),
                ("tolerance", num(res.tolerance)),
            ]);
            writeln!(out, "{line}")?;
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = placement_rows(&res.outcome)
                .into_iter()
                .map(|mut r| {
                    r.extend([fmt_num(res.value), method.clone(), fmt_num(res.tolerance)]);
                    r
                })
                .collect();
            write_table(
                &mut out,
                &["uav", "x", "y", "z0", "value", "method", "tolerance"],
                &rows,
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

fn pref_label(u: &UserReport) -> String {
    let name = |p: Preference| match p {
        Preference::Favorable => "favorable",
        Preference::Adverse => "adverse",
    };
    match (u.pref, u.prefs) {
        (_, Some([a, b])) => format!("{}/{}", name(a), name(b)),
        (Some(p), None) => name(p).to_string(),
        (None, None) => String::new(),
    }
}

fn deviation_row(r: &DeviationReport) -> Vec<String> {
    vec![
        r.user.to_string(),
        fmt_num(r.truthful.x),
        fmt_num(r.truthful.y),
        pref_label(&r.truthful),
        fmt_num(r.deviation.x),
        fmt_num(r.deviation.y),
        pref_label(&r.deviation),
        fmt_num(r.before),
        fmt_num(r.after),
        fmt_num(r.improvement),
    ]
}

const DEVIATION_HEADER: [&str; 10] = [
    "user",
    "true_x",
    "true_y",
    "true_pref",
    "reported_x",
    "reported_y",
    "reported_pref",
    "before",
    "after",
    "improvement",
];

fn verify_sp(args: &VerifyArgs) -> Run {
    let prof = load_profile(&args.source, Some(&args.overrides))?;
    let mech = parse_mechanism(&args.mechanism.mechanism, args.mechanism.k)?;
    let mut reports = check_strategyproof(&mech, &prof, args.tol)?;
    if args.fuzz > 0 {
        for r in fuzz_strategyproof(&mech, &prof, args.fuzz, args.seed, args.tol)? {
            match reports.iter_mut().find(|s| s.user == r.user) {
                Some(s) if s.improvement >= r.improvement => {}
                Some(s) => *s = r,
                None => reports.push(r),
            }
        }
        reports.sort_by_key(|r| r.user);
    }
    let mut out = open_output(&args.output.out)?;
    match args.output.format {
        Format::Json => {
            for r in &reports {
                writeln!(out, "{}", json_line(r))?;
            }
        }
        Format::Csv => {
            let rows: Vec<_> = reports.iter().map(deviation_row).collect();
            write_table(&mut out, &DEVIATION_HEADER, &rows)?;
        }
    }
    out.flush()?;
    eprintln!("violations={} max_ratio=n/a bound=n/a", reports.len());
    if reports.is_empty() {
        Ok(())
    } else {
        Err(Failure::Findings)
    }
}

fn ratio_fields(r: &RatioReport) -> Vec<(&'static str, Value)> {
    vec![
        ("mechanism", Value::String(r.mechanism.clone())),
        ("alpha", num(r.alpha)),
        ("profile_digest", Value::String(r.profile_digest.clone())),
        ("mechanism_objective", num(r.mechanism_objective)),
        ("oracle_objective", num(r.oracle_objective)),
        ("ratio", num(r.ratio)),
        ("bound", num(r.bound)),
        ("slack", num(r.slack)),
        ("violation", Value::Bool(r.violation)),
    ]
}

fn ratio(args: &RatioArgs) -> Run {
    let prof = load_profile(&args.source, None)?;
    let mech = parse_mechanism(&args.mechanism.mechanism, args.mechanism.k)?;
    let reports = check_ratio_at(&mech, &prof, &args.alpha, args.grid_resolution)?;
    let mut out = open_output(&args.output.out)?;
    match args.output.format {
        Format::Json => {
            for r in &reports {
                writeln!(out, "{}", json_object(ratio_fields(r)))?;
            }
        }
        Format::Csv => {
            let header: Vec<&str> = ratio_fields(&reports[0]).iter().map(|(k, _)| *k).collect();
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    ratio_fields(r)
                        .into_iter()
                        .map(|(_, v)| match v {
                            Value::String(s) => s,
                            Value::Number(n) => fmt_num(n.as_f64().unwrap_or(f64::NAN)),
                            other => other.to_string(),
                        })
                        .collect()
                })
                .collect();
            write_table(&mut out, &header, &rows)?;
        }
    }
    out.flush()?;
    let violations = reports.iter().filter(|r| r.violation).count();
    // The report closest to its bound, relative to the bound.
    let worst = reports
        .iter()
        .max_by(|a, b| (a.ratio / a.bound).total_cmp(&(b.ratio / b.bound)))
        .expect("at least one alpha");
    eprintln!(
        "violations={violations} max_ratio={} bound={}",
        fmt_num(worst.ratio),
        fmt_num(worst.bound)
    );
    if violations == 0 {
        Ok(())
    } else {
        Err(Failure::Findings)
    }
}

/// Parses `2-30,50,100` into a list of population sizes.
fn parse_n_list(s: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::Input(format!("invalid --n-list `{s}`"));
    let mut ns = Vec::new();
    for part in s.split(',').map(str::trim) {
        match part.split_once('-') {
            Some((lo, hi)) => {
                let lo: usize = lo.trim().parse().map_err(|_| bad())?;
                let hi: usize = hi.trim().parse().map_err(|_| bad())?;
                if lo > hi {
                    return Err(bad());
                }
                ns.extend(lo..=hi);
            }
            None => ns.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(ns)
}

fn simulate(args: &SimulateArgs) -> Run {
    let (n_default, trials_default, dist_default) = match args.experiment {
        Experiment::Fig2 => ("2-30,50,100", 1000, "uniform"),
        Experiment::Fig3 => ("5,10,20,50,100,200", 2000, "beta(2,5)"),
        Experiment::Fig4 => ("10,20,50,100,200", 2000, "beta(2,5)"),
    };
    let cfg = ExperimentConfig {
        n_list: parse_n_list(args.n_list.as_deref().unwrap_or(n_default))?,
        trials: args.trials.unwrap_or(trials_default),
        first_trial: 0,
        seed: args.seed,
        z0: args.z0,
    };
    let spec: DistributionSpec = args.dist.as_deref().unwrap_or(dist_default).parse()?;
    let results: ExperimentResults = match args.experiment {
        Experiment::Fig2 => run_ratio_experiment(&cfg, spec)?,
        Experiment::Fig3 => run_corner_match_experiment(&cfg, spec)?,
        Experiment::Fig4 => run_dual_convergence_experiment(&cfg, spec, &args.n2_over_n1)?,
    };
    for w in &results.warnings {
        eprintln!("warning: {w}");
    }
    let mut out = open_output(&args.out)?;
    if args.summary {
        results.write_summary_csv(&mut out)?;
    } else {
        results.write_csv(&mut out)?;
    }
    out.flush()?;
    Ok(())
}

fn lemmas(args: &LemmaArgs) -> Run {
    let report = check_power_inequalities(args.samples, args.seed)?;
    let mut out = open_output(&args.out)?;
    writeln!(out, "{}", json_line(&report))?;
    out.flush()?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Findings)
    }
}

fn run(cli: &Cli) -> Run {
    match &cli.command {
        Command::Place(a) => place(a),
        Command::Opt(a) => opt(a),
        Command::VerifySp(a) => verify_sp(a),
        Command::Ratio(a) => ratio(a),
        Command::Simulate(a) => simulate(a),
        Command::Lemmas(a) => lemmas(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Findings) => ExitCode::from(2),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
