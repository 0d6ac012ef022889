use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use minset::experiment::{self, BenchConfig, SweepConfig, SWEEP_OVERLAPS};
use minset::io::{self as files, VariableDraft};
use minset::quality::quality_report;
use minset::{
    generate_individuals, generate_objects, impute_missing, minset_on_matrix, minset_plus_on_matrix, run, Algorithm,
    DiscriminationMatrix, GenerationSpec, Measure, OutputKind, QualityReport, SelectionResult, SelectionSummary,
    SyntheticShape,
};

#[derive(Parser)]
#[command(name = "minset", version, about = "Variable selection for boolean symbolic objects")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select a minimal discriminating subset of variables.
    Select(SelectArgs),
    /// Build symbolic objects from clustered individuals.
    GenSo(GenSoArgs),
    /// Draw individuals from symbolic objects.
    GenInd(GenIndArgs),
    /// Extent and overlap indicators for objects and individuals.
    Quality(QualityArgs),
    /// Time the algorithms on seeded datasets of growing size.
    Bench(BenchArgs),
    /// Run the selection algorithms across a range of injected overlaps.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct SelectArgs {
    /// Objects file (JSON).
    #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
    input: Option<PathBuf>,
    /// Discrimination matrix (CSV) to use instead of objects.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long, default_value = "minset-plus")]
    algorithm: Algorithm,
    /// boolean, jaccard, de-carvalho or ichino.
    #[arg(long, default_value = "jaccard")]
    measure: Measure,
    /// Fraction of the total discrimination power to reach, in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    /// Ichino–Yaguchi weight in [0, 0.5]; implies the ichino measure.
    #[arg(long)]
    gamma: Option<f64>,
    /// Include the step-by-step narrative.
    #[arg(long)]
    trace: bool,
    /// Also write the discrimination matrix (CSV) here.
    #[arg(long)]
    dump_matrix: Option<PathBuf>,
    /// Report path; standard output when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenSoArgs {
    /// Individuals (CSV).
    #[arg(long)]
    individuals: PathBuf,
    /// Variable kinds and output kinds (JSON).
    #[arg(long)]
    kinds: PathBuf,
    /// Split intervals around values of other clusters.
    #[arg(long)]
    refine: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenIndArgs {
    /// Objects file (JSON).
    #[arg(long)]
    objects: PathBuf,
    /// Individuals per object.
    #[arg(long)]
    count: usize,
    /// Probability that a value is drawn from another object.
    #[arg(long, default_value_t = 0.0)]
    overlap: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write an `id` column.
    #[arg(long)]
    ids: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct QualityArgs {
    #[arg(long)]
    objects: PathBuf,
    #[arg(long)]
    individuals: PathBuf,
    /// Report written by `select`; extents are then measured on the
    /// selected variables and compared with the full set.
    #[arg(long)]
    selection: Option<PathBuf>,
    /// Write a one-line CSV summary instead of JSON.
    #[arg(long)]
    csv: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Object counts, ascending.
    #[arg(long, value_delimiter = ',', default_value = "10,20,30,40,50,60,70,80,90,100")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    vars: usize,
    /// Individuals in total, split across the objects.
    #[arg(long, default_value_t = 300)]
    individuals: usize,
    #[arg(long, default_value_t = 0.1)]
    overlap: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Runs per algorithm; the fastest is reported.
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',')]
    overlaps: Option<Vec<f64>>,
    #[arg(long, default_value_t = 15)]
    objects: usize,
    #[arg(long, default_value_t = 20)]
    vars: usize,
    #[arg(long, default_value_t = 100)]
    per_cluster: usize,
    /// Seeds `0..seeds` are run.
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// Exit codes: 1 usage, 2 invalid input, 3 internal failure.
enum Failure {
    Usage(String),
    Data(String),
    Internal(String),
}

impl From<minset::Error> for Failure {
    fn from(e: minset::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn open(path: &Path) -> Outcome<File> {
    File::open(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Outcome<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn sink(path: Option<&Path>) -> Outcome<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Internal(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json(path: Option<&Path>, value: &Value) -> Outcome {
    let mut out = sink(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Failure::Internal(e.to_string()))?;
    writeln!(out).and_then(|_| out.flush()).map_err(|e| Failure::Internal(e.to_string()))
}

fn write_csv(path: Option<&Path>, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Outcome {
    let mut out = sink(path)?;
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::Internal(e.to_string()))
}

fn to_value<T: serde::Serialize>(x: &T) -> Outcome<Value> {
    serde_json::to_value(x).map_err(|e| Failure::Internal(e.to_string()))
}

fn select(args: SelectArgs) -> Outcome {
    let measure = match args.gamma {
        Some(g) => Measure::ichino_yaguchi(g).map_err(|e| Failure::Usage(e.to_string()))?,
        None => args.measure,
    };
    if !(args.theta > 0.0 && args.theta <= 1.0) {
        return Err(Failure::Usage(format!("--theta must lie in (0, 1], got {}", args.theta)));
    }
    let (result, matrix): (SelectionResult, Option<DiscriminationMatrix>) = match (&args.input, &args.matrix) {
        (Some(path), _) => {
            let kb = files::read_dataset(open(path)?)?;
            let matrix = match &args.dump_matrix {
                Some(_) => Some(DiscriminationMatrix::build(&kb, measure)?),
                None => None,
            };
            (run(&kb, args.algorithm, measure, args.theta)?, matrix)
        }
        (None, Some(path)) => {
            let m = DiscriminationMatrix::read_csv(open(path)?)?;
            let r = match args.algorithm {
                Algorithm::Minset => minset_on_matrix(&m)?,
                Algorithm::MinsetPlus => minset_plus_on_matrix(&m, measure, args.theta)?,
                Algorithm::MinsetPartial => {
                    return Err(Failure::Usage("minset-partial recomputes scores from objects; use --input".into()))
                }
            };
            (r, Some(m))
        }
        (None, None) => return Err(Failure::Usage("either --input or --matrix is required".into())),
    };
    if let (Some(path), Some(m)) = (&args.dump_matrix, &matrix) {
        let file = File::create(path).map_err(|e| Failure::Internal(format!("{}: {e}", path.display())))?;
        m.write_csv(file)?;
    }
    if result.degenerate {
        log::warn!("{}", result.diagnostic.as_deref().unwrap_or("degenerate selection"));
    }
    let mut report = to_value(&result)?;
    if let Value::Object(map) = &mut report {
        if args.trace {
            let narrative = result.narrative();
            for line in &narrative {
                eprintln!("{line}");
            }
            map.insert("narrative".into(), json!(narrative));
        } else {
            map.remove("trace");
        }
    }
    write_json(args.output.as_deref(), &report)
}

fn gen_so(args: GenSoArgs) -> Outcome {
    let drafts: Vec<VariableDraft> = files::parse_kinds(&read_text(&args.kinds)?)?;
    let table = files::read_individuals_with_drafts(open(&args.individuals)?, &drafts)?;
    let table = if table.has_missing() { impute_missing(&table)? } else { table };
    let outputs: Vec<OutputKind> = drafts
        .iter()
        .zip(table.variables())
        .map(|(d, spec)| d.output.unwrap_or_else(|| OutputKind::default_for(spec)))
        .collect();
    let kb = generate_objects(&table, &GenerationSpec::for_objects(outputs.clone(), args.refine))?;
    let metadata = json!({
        "generator": "gen-so",
        "individuals": args.individuals.display().to_string(),
        "refine": args.refine,
        "outputs": outputs,
    });
    write_json(args.output.as_deref(), &files::dataset_to_json(&kb, Some(metadata)))
}

fn gen_ind(args: GenIndArgs) -> Outcome {
    let kb = files::read_dataset(open(&args.objects)?)?;
    let table = generate_individuals(&kb, &GenerationSpec::for_individuals(args.count, args.overlap, args.seed))?;
    let out = sink(args.output.as_deref())?;
    files::write_individuals(out, &table, args.ids)?;
    Ok(())
}

fn quality(args: QualityArgs) -> Outcome {
    let kb = files::read_dataset(open(&args.objects)?)?;
    let table = files::read_individuals(open(&args.individuals)?, kb.variables())?;
    let summary = match &args.selection {
        Some(path) => serde_json::from_str::<SelectionSummary>(&read_text(path)?)
            .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?,
        None => SelectionSummary::everything(&kb)?,
    };
    let report: QualityReport = quality_report(&kb, &summary, &table)?;
    if args.csv {
        write_csv(args.output.as_deref(), &QualityReport::CSV_HEADER, [report.csv_row()])
    } else {
        write_json(args.output.as_deref(), &to_value(&report)?)
    }
}

fn bench(args: BenchArgs) -> Outcome {
    let config = BenchConfig {
        shape: SyntheticShape::mixed(0, args.vars),
        individuals: args.individuals,
        overlap: args.overlap,
        seed: args.seed,
        repeats: args.repeats,
    };
    let rows = experiment::bench(&args.sizes, &config)?;
    write_csv(args.output.as_deref(), &experiment::BenchRow::CSV_HEADER, rows.iter().map(|r| r.csv_row()))
}

fn sweep(args: SweepArgs) -> Outcome {
    let config = SweepConfig {
        shape: SyntheticShape::mixed(args.objects, args.vars),
        per_cluster: args.per_cluster,
        seeds: args.seeds,
    };
    let overlaps = args.overlaps.unwrap_or_else(|| SWEEP_OVERLAPS.to_vec());
    let points = experiment::overlap_sweep(&config, &overlaps)?;
    write_csv(args.output.as_deref(), &experiment::SweepPoint::CSV_HEADER, points.iter().map(|p| p.csv_row()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("MINSET_LOG", "info"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Select(a) => select(a),
        Command::GenSo(a) => gen_so(a),
        Command::GenInd(a) => gen_ind(a),
        Command::Quality(a) => quality(a),
        Command::Bench(a) => bench(a),
        Command::Sweep(a) => sweep(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
