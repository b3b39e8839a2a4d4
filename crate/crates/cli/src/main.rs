//! `tgospa` command-line tool: evaluate trackers on MOTChallenge files with
//! TGOSPA and HOTA, and derive metric parameters.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use tgospa::boxmetrics::BoxMetric;
use tgospa::hota::{alphas, hota, HotaResult};
use tgospa::motio::{self, competition_ranks, EvalReport, Filter, Format, MotScene, Table};
use tgospa::paramselect;
use tgospa::tgospa::{evaluate, EvalOptions, ExactOptions, Solver, TgospaParams, TgospaResult};
use tgospa::Error;

#[derive(Parser, Debug)]
#[command(name = "tgospa", version, about = "Evaluate multi-object trackers with the TGOSPA metric")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute TGOSPA and its decomposition for every tracker.
    Evaluate(EvaluateArgs),
    /// Histogram of assignment distances for choosing the cut-off c.
    SelectParams(SelectArgs),
    /// Derive gamma, g1, the h thresholds or p from the selection rules.
    Gamma(GammaArgs),
    /// Compute HOTA for every tracker.
    Hota(HotaArgs),
    /// TGOSPA and HOTA rankings side by side.
    Compare(EvaluateArgs),
}

#[derive(Args, Debug, Clone)]
struct InputArgs {
    /// Ground-truth file in MOTChallenge format.
    #[arg(long)]
    gt: PathBuf,
    /// Tracker output files in MOTChallenge format.
    #[arg(long, num_args = 1.., required = true)]
    trackers: Vec<PathBuf>,
    /// Inclusive frame window `k0:kF`; frame k0 becomes step 0.
    #[arg(long, value_parser = parse_window)]
    window: Option<(i64, i64)>,
    /// Keep only these ground-truth ids (comma separated).
    #[arg(long, value_delimiter = ',')]
    ids: Option<Vec<i64>>,
    /// Drop ground-truth boxes with visibility below this value.
    #[arg(long)]
    min_visibility: Option<f64>,
    /// Worker threads for evaluating trackers (default: logical CPUs).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Preset {
    /// c = 0.255, p = 1.71, gamma = 0
    Detector,
    /// c = 0.5, p = 1.8, gamma = 0.31
    Online,
    /// c = 0.5, p = 1, gamma = 5
    Offline,
}

impl Preset {
    fn params(self) -> (f64, f64, f64) {
        match self {
            Preset::Detector => (0.255, 1.71, 0.0),
            Preset::Online => (0.5, 1.8, 0.31),
            Preset::Offline => (0.5, 1.0, 5.0),
        }
    }
}

#[derive(Args, Debug, Clone)]
struct EvaluateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Parameter preset; explicit --c, --p and --gamma override it.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Cut-off distance c.
    #[arg(long)]
    c: Option<f64>,
    /// Exponent p >= 1.
    #[arg(long)]
    p: Option<f64>,
    /// Track switch penalty gamma >= 0.
    #[arg(long)]
    gamma: Option<f64>,
    /// Base metric between boxes.
    #[arg(long, default_value = "iou")]
    metric: BoxMetric,
    /// auto, exact, lp, gamma-zero or gamma-extreme.
    #[arg(long, default_value = "auto")]
    solver: Solver,
    /// Work limit (states x steps) of the exact solver.
    #[arg(long, default_value_t = tgospa::tgospa::DEFAULT_STATE_CEILING)]
    exact_ceiling: u128,
    /// json, csv or table.
    #[arg(long, default_value = "table")]
    format: Format,
}

#[derive(Args, Debug)]
struct SelectArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Upper end of the histogram and cut-off of the matching.
    #[arg(long, default_value_t = 1.0)]
    cmax: f64,
    #[arg(long, default_value_t = paramselect::DEFAULT_BIN_WIDTH)]
    bin_width: f64,
    #[arg(long, default_value = "iou")]
    metric: BoxMetric,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("mode").required(true).args(["g1", "n", "invert", "a"])))]
struct GammaArgs {
    #[arg(long)]
    c: f64,
    /// Required except with --a.
    #[arg(long)]
    p: Option<f64>,
    /// Gamma from the short-term switch distance g1.
    #[arg(long)]
    g1: Option<f64>,
    /// Gamma from the minimum switch length n, with h thresholds.
    #[arg(long)]
    n: Option<u32>,
    /// g1 implied by this gamma.
    #[arg(long)]
    invert: Option<f64>,
    /// p from the maximum admissible error a.
    #[arg(long)]
    a: Option<f64>,
}

#[derive(Args, Debug)]
struct HotaArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Include the score at every threshold.
    #[arg(long)]
    per_alpha: bool,
    #[arg(long, default_value = "table")]
    format: Format,
}

fn parse_window(s: &str) -> std::result::Result<(i64, i64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected k0:kF, got {s:?}"))?;
    let a: i64 = a.trim().parse().map_err(|_| format!("bad window start {a:?}"))?;
    let b: i64 = b.trim().parse().map_err(|_| format!("bad window end {b:?}"))?;
    if a > b {
        return Err(format!("window start {a} is after its end {b}"));
    }
    Ok((a, b))
}

/// Exit status for an error: 2 for I/O, 3 for solver failures, 1 otherwise.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::TooLarge { .. } | Error::Solver(_) => 3,
                Error::Parse { .. } => 2,
                _ => 1,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Evaluate(args) => cmd_evaluate(&args),
        Command::SelectParams(args) => cmd_select_params(&args),
        Command::Gamma(args) => cmd_gamma(&args),
        Command::Hota(args) => cmd_hota(&args),
        Command::Compare(args) => cmd_compare(&args),
    }
}

struct Scenes {
    gt: MotScene,
    trackers: Vec<(String, MotScene)>,
}

fn read_scene(path: &Path, filter: &Filter) -> Result<MotScene> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let records = motio::parse_mot(&text).with_context(|| format!("in {}", path.display()))?;
    Ok(motio::to_trajectories(&records, filter, None).with_context(|| format!("in {}", path.display()))?)
}

fn load(input: &InputArgs) -> Result<Scenes> {
    let gt_filter = Filter {
        window: input.window,
        keep_ids: input.ids.as_ref().map(|ids| ids.iter().copied().collect::<BTreeSet<_>>()),
        min_visibility: input.min_visibility,
        time_rebase: true,
    };
    // Id and visibility curation applies to the ground truth only.
    let tracker_filter = Filter {
        window: input.window,
        time_rebase: true,
        ..Filter::default()
    };
    let gt = read_scene(&input.gt, &gt_filter)?;
    let trackers = input
        .trackers
        .iter()
        .map(|p| Ok((tracker_name(p), read_scene(p, &tracker_filter)?)))
        .collect::<Result<_>>()?;
    Ok(Scenes { gt, trackers })
}

fn tracker_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            bail!(Error::Domain("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| anyhow!("cannot start worker threads: {e}"))
}

fn resolve_params(args: &EvaluateArgs) -> Result<TgospaParams> {
    let preset = args.preset.map(Preset::params);
    let pick = |explicit: Option<f64>, from_preset: Option<f64>, name: &str| {
        explicit
            .or(from_preset)
            .ok_or_else(|| Error::InvalidParams(format!("--{name} is required without --preset")))
    };
    let c = pick(args.c, preset.map(|p| p.0), "c")?;
    let p = pick(args.p, preset.map(|p| p.1), "p")?;
    let gamma = pick(args.gamma, preset.map(|p| p.2), "gamma")?;
    Ok(TgospaParams::new(p, c, gamma)?)
}

fn evaluate_all(args: &EvaluateArgs, scenes: &Scenes, params: &TgospaParams) -> Result<Vec<(String, TgospaResult)>> {
    let options = EvalOptions {
        exact: ExactOptions {
            ceiling: args.exact_ceiling,
        },
        ..EvalOptions::default()
    };
    let metric = args.metric;
    let results: Vec<Result<TgospaResult>> = pool(args.input.jobs)?.install(|| {
        scenes
            .trackers
            .par_iter()
            .map(|(name, y)| {
                evaluate(&scenes.gt.set, &y.set, params, &metric, args.solver, &options)
                    .with_context(|| format!("evaluating {name}"))
            })
            .collect()
    });
    scenes
        .trackers
        .iter()
        .zip(results)
        .map(|((name, _), r)| Ok((name.clone(), r?)))
        .collect()
}

fn warn_soft(results: &[(String, TgospaResult)]) {
    for (name, r) in results {
        if !r.is_hard {
            eprintln!("warning: {name}: the LP optimum is fractional; reported values are a lower bound");
        }
    }
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    let params = resolve_params(args)?;
    let scenes = load(&args.input)?;
    let results = evaluate_all(args, &scenes, &params)?;
    warn_soft(&results);
    let report = EvalReport::new(params, args.metric.name(), results);
    print!("{}", motio::write_report(&report, args.format));
    Ok(())
}

fn cmd_select_params(args: &SelectArgs) -> Result<()> {
    let scenes = load(&args.input)?;
    let metric = args.metric;
    let samples: Vec<Vec<f64>> = pool(args.input.jobs)?.install(|| {
        scenes
            .trackers
            .par_iter()
            .map(|(_, y)| paramselect::collect_assignment_distances(&scenes.gt.set, &y.set, args.cmax, &metric))
            .collect()
    });
    let pooled: Vec<f64> = samples.concat();
    let hist = paramselect::guideline_histogram(&pooled, args.bin_width, args.cmax)?;
    let csv = hist.to_csv();
    match &args.output {
        Some(path) => fs::write(path, csv).with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{csv}"),
    }
    Ok(())
}

/// Six decimals without trailing zeros.
fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn cmd_gamma(args: &GammaArgs) -> Result<()> {
    if let Some(a) = args.a {
        println!("p = {}", num(paramselect::p_from_a_c(args.c, a)?));
        return Ok(());
    }
    let p = args
        .p
        .ok_or_else(|| Error::Domain("--p is required with --g1, --n and --invert".into()))?;
    if let Some(g1) = args.g1 {
        println!("gamma = {}", num(paramselect::gamma_from_g1(args.c, p, g1)?));
    } else if let Some(gamma) = args.invert {
        println!("g1 = {}", num(paramselect::g1_from_gamma(args.c, p, gamma)?));
    } else if let Some(n) = args.n {
        println!("gamma = {}", num(paramselect::gamma_from_n(args.c, p, n)?));
        for m in 1..=5 {
            println!("h_{} = {}", n + m, num(paramselect::h_threshold(args.c, p, n, m)?));
        }
    }
    Ok(())
}

fn hota_all(input: &InputArgs, scenes: &Scenes) -> Result<Vec<HotaResult>> {
    Ok(pool(input.jobs)?.install(|| {
        scenes
            .trackers
            .par_iter()
            .map(|(_, y)| hota(&scenes.gt.set, &y.set))
            .collect()
    }))
}

#[derive(Serialize)]
struct HotaRow {
    tracker: String,
    hota: f64,
    rank: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    per_alpha: Option<Vec<f64>>,
}

fn cmd_hota(args: &HotaArgs) -> Result<()> {
    let scenes = load(&args.input)?;
    let results = hota_all(&args.input, &scenes)?;
    let overall: Vec<f64> = results.iter().map(|r| r.overall).collect();
    let ranks = competition_ranks(&overall, true);
    let rows: Vec<HotaRow> = scenes
        .trackers
        .iter()
        .zip(&results)
        .zip(ranks)
        .map(|(((name, _), r), rank)| HotaRow {
            tracker: name.clone(),
            hota: r.overall,
            rank,
            per_alpha: args.per_alpha.then(|| r.per_alpha.to_vec()),
        })
        .collect();
    if args.format == Format::Json {
        println!("{}", serde_json::to_string_pretty(&rows)?);
        return Ok(());
    }
    let digits = (args.format == Format::Table).then_some(4);
    let fmt = |v: f64| digits.map_or_else(|| v.to_string(), |d| format!("{v:.d$}"));
    let mut header = vec!["tracker".to_string(), "hota".into(), "rank".into()];
    if args.per_alpha {
        header.extend(alphas().iter().map(|a| format!("alpha_{a:.2}")));
    }
    let table = Table {
        header,
        rows: rows
            .iter()
            .map(|r| {
                let mut row = vec![r.tracker.clone(), fmt(r.hota), r.rank.to_string()];
                if let Some(per) = &r.per_alpha {
                    row.extend(per.iter().map(|v| fmt(*v)));
                }
                row
            })
            .collect(),
    };
    print!("{}", if args.format == Format::Csv { table.to_csv() } else { table.to_text() });
    Ok(())
}

#[derive(Serialize)]
struct CompareRow {
    tracker: String,
    tgospa: f64,
    tgospa_rank: usize,
    hota: f64,
    hota_rank: usize,
}

fn cmd_compare(args: &EvaluateArgs) -> Result<()> {
    let params = resolve_params(args)?;
    let scenes = load(&args.input)?;
    let results = evaluate_all(args, &scenes, &params)?;
    warn_soft(&results);
    let hotas = hota_all(&args.input, &scenes)?;
    let totals: Vec<f64> = results.iter().map(|(_, r)| r.total).collect();
    let overall: Vec<f64> = hotas.iter().map(|h| h.overall).collect();
    let t_ranks = competition_ranks(&totals, false);
    let h_ranks = competition_ranks(&overall, true);
    let rows: Vec<CompareRow> = (0..results.len())
        .map(|i| CompareRow {
            tracker: results[i].0.clone(),
            tgospa: totals[i],
            tgospa_rank: t_ranks[i],
            hota: overall[i],
            hota_rank: h_ranks[i],
        })
        .collect();
    if args.format == Format::Json {
        println!("{}", serde_json::to_string_pretty(&rows)?);
        return Ok(());
    }
    let digits = (args.format == Format::Table).then_some(4);
    let fmt = |v: f64| digits.map_or_else(|| v.to_string(), |d| format!("{v:.d$}"));
    let table = Table {
        header: ["tracker", "tgospa", "tgospa_rank", "hota", "hota_rank"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.tracker.clone(),
                    fmt(r.tgospa),
                    r.tgospa_rank.to_string(),
                    fmt(r.hota),
                    r.hota_rank.to_string(),
                ]
            })
            .collect(),
    };
    print!("{}", if args.format == Format::Csv { table.to_csv() } else { table.to_text() });
    Ok(())
}
