//! `cobind`: train, classify and evaluate co-occurrence classifiers, run the
//! behaviour feedback simulator, reconcile ensemble/hierarchy patterns and
//! resolve concept bindings.
//!
//! Exit status is 0 on success, 1 on a usage error and 2 on a data error.
//! Every diagnostic is a single line naming the offending file or flag.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cobind_core::behaviour::{parse_scenario, simulate, Eq6Mode, PslMode, ResponseFn};
use cobind_core::binding::{bind_report, resonate, EnsembleState, HierarchyPattern};
use cobind_core::concept::ConceptBase;
use cobind_core::dataset::{
    evaluate_with, load_grid_text, load_image, load_manifest, train_bank, DatasetManifest,
    ScaleMode,
};
use cobind_core::{classify_with, CooccurrenceClassifier, Exec, DEFAULT_THRESHOLD};

/// Bank files carry this extension, one file per class label.
const BANK_EXT: &str = "cls";

#[derive(Debug, Parser)]
#[command(
    name = "cobind",
    version,
    about = "Associative grid classifiers, behaviour metric and binding models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train one classifier per manifest class and write the bank directory.
    Train(TrainArgs),
    /// Rank every classifier of a bank against one image.
    Classify(ClassifyArgs),
    /// Train (or load) a bank and recognise the manifest's images.
    Evaluate(EvaluateArgs),
    /// Run the behaviour feedback simulation of a scenario script.
    Simulate(SimulateArgs),
    /// Reconcile an ensemble activation against a hierarchy pattern.
    Bind(BindArgs),
    /// Add co-occurrence sessions to a concept base.
    ConceptLearn(ConceptLearnArgs),
    /// Group active concepts into bound circuits.
    ConceptResolve(ConceptResolveArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Scale {
    Off,
    Fit,
}

/// Image preparation overrides shared by the dataset commands.
#[derive(Debug, Args)]
struct ImageOpts {
    /// Grid size as WIDTHxHEIGHT (overrides the manifest).
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    /// Graymap pixels darker than this become active cells.
    #[arg(long)]
    cutoff: Option<u8>,
    /// Rescaling applied to each image before it meets the grid.
    #[arg(long, value_enum)]
    scale: Option<Scale>,
}

impl ImageOpts {
    fn apply(&self, manifest: &mut DatasetManifest) {
        if let Some((w, h)) = self.grid {
            manifest.grid_width = w;
            manifest.grid_height = h;
        }
        if let Some(c) = self.cutoff {
            manifest.binarize_cutoff = c;
        }
        if let Some(s) = self.scale {
            manifest.scale_mode = match s {
                Scale::Off => ScaleMode::Off,
                Scale::Fit => ScaleMode::BoundingBoxFit,
            };
        }
    }
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Bank directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    image: ImageOpts,
    /// Train classes one after another instead of in parallel.
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[arg(long)]
    bank: PathBuf,
    /// Text grid (.txt, .grid) or graymap (.pgm).
    #[arg(long)]
    image: PathBuf,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD, value_parser = parse_unit)]
    threshold: f64,
    #[arg(long)]
    cutoff: Option<u8>,
    #[arg(long, value_enum)]
    scale: Option<Scale>,
    /// Write the ranking as comma-separated values.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Previously trained bank; trained from the manifest when absent.
    #[arg(long)]
    bank: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD, value_parser = parse_unit)]
    threshold: f64,
    #[command(flatten)]
    image: ImageOpts,
    /// Write the confusion matrix as comma-separated values.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FArg {
    Additive,
    Multiplicative,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PslArg {
    Division,
    Multiplication,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Eq6Arg {
    Strict,
    WorkedExample,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Memory term (overrides the script).
    #[arg(long, value_enum)]
    f: Option<FArg>,
    #[arg(long, value_enum)]
    psl: Option<PslArg>,
    #[arg(long, value_enum)]
    eq6: Option<Eq6Arg>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    max_steps: Option<u64>,
    #[arg(long, value_parser = parse_positive)]
    pc_floor: Option<f64>,
    /// Write the trace as comma-separated values.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BindArgs {
    /// Text grid of the firing ensemble cells.
    #[arg(long)]
    ensemble: PathBuf,
    /// Text grid of the stored hierarchy pattern.
    #[arg(long)]
    hierarchy: PathBuf,
    /// Classifier file holding the ensemble links.
    #[arg(long)]
    links: PathBuf,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD, value_parser = parse_unit)]
    threshold: f64,
    /// Iterate link activation to a stable state, at most this many passes.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    resonate: Option<u64>,
    /// Write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ConceptLearnArgs {
    /// Existing base to extend; a fresh base when absent.
    #[arg(long)]
    base: Option<PathBuf>,
    /// Comma-separated concepts sensed together; repeatable.
    #[arg(long = "session")]
    sessions: Vec<String>,
    /// File with one whitespace-separated session per line.
    #[arg(long)]
    sessions_file: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ConceptResolveArgs {
    #[arg(long)]
    base: PathBuf,
    /// Comma-separated active concepts.
    #[arg(long, value_delimiter = ',', required = true)]
    active: Vec<String>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    min_count: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Raised for flag combinations clap cannot check; exits with status 1.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (w, h) = s
        .split_once('x')
        .ok_or_else(|| format!("expected WIDTHxHEIGHT, got {s:?}"))?;
    let w: usize = w.parse().map_err(|_| format!("bad width in {s:?}"))?;
    let h: usize = h.parse().map_err(|_| format!("bad height in {s:?}"))?;
    if w == 0 || h == 0 {
        return Err(format!("grid dimensions must be positive, got {s:?}"));
    }
    Ok((w, h))
}

fn parse_unit(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if !(0.0..=1.0).contains(&v) {
        return Err(format!("must lie in [0, 1], got {v}"));
    }
    Ok(v)
}

fn parse_positive(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(format!("must be positive, got {v}"));
    }
    Ok(v)
}

fn exec(sequential: bool) -> Exec {
    if sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("{}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("{}", path.display()))
}

fn load_bank(dir: &Path) -> Result<Vec<CooccurrenceClassifier>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("{}", dir.display()))?
        .map(|entry| entry.map(|e| e.path()))
        .collect::<std::io::Result<_>>()
        .with_context(|| format!("{}", dir.display()))?;
    files.retain(|p| p.extension().is_some_and(|e| e == BANK_EXT));
    files.sort();
    if files.is_empty() {
        bail!("{}: no .{BANK_EXT} classifier files", dir.display());
    }
    files
        .iter()
        .map(|p| {
            CooccurrenceClassifier::from_text(&read(p)?).with_context(|| format!("{}", p.display()))
        })
        .collect()
}

fn train(args: &TrainArgs) -> Result<String> {
    let mut manifest = load_manifest(&args.manifest)?;
    args.image.apply(&mut manifest);
    let bank = train_bank(&manifest, exec(args.sequential))?;
    fs::create_dir_all(&args.out).with_context(|| format!("{}", args.out.display()))?;
    let mut out = String::new();
    for cls in &bank {
        let path = args.out.join(format!("{}.{BANK_EXT}", cls.label()));
        write(&path, &cls.to_text())?;
        let _ = writeln!(
            out,
            "{} images={} pairs={}",
            cls.label(),
            cls.images_trained(),
            cls.pairs().count()
        );
    }
    Ok(out)
}

fn classify(args: &ClassifyArgs) -> Result<String> {
    let bank = load_bank(&args.bank)?;
    let (w, h) = (bank[0].width(), bank[0].height());
    let mut prep = DatasetManifest::new(Vec::new());
    prep.grid_width = w;
    prep.grid_height = h;
    ImageOpts {
        grid: None,
        cutoff: args.cutoff,
        scale: args.scale,
    }
    .apply(&mut prep);
    let image = load_image(&args.image, &prep)?;
    let ranked = classify_with(&bank, &image, args.threshold, exec(args.sequential))
        .with_context(|| format!("{}", args.image.display()))?;
    let mut text = String::from("rank label in out ratio\n");
    let mut csv = String::from("rank,label,in,out,ratio\n");
    for (i, r) in ranked.iter().enumerate() {
        let s = &r.score;
        let _ = writeln!(
            text,
            "{} {} {} {} {}",
            i + 1,
            r.label,
            s.in_count,
            s.out_count,
            s.ratio
        );
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            i + 1,
            r.label,
            s.in_count,
            s.out_count,
            s.ratio
        );
    }
    let _ = writeln!(text, "winner {}", ranked[0].label);
    if let Some(path) = &args.out {
        write(path, &csv)?;
    }
    Ok(text)
}

fn evaluate(args: &EvaluateArgs) -> Result<String> {
    let mut manifest = load_manifest(&args.manifest)?;
    args.image.apply(&mut manifest);
    let bank = args.bank.as_deref().map(load_bank).transpose()?;
    let report = evaluate_with(
        &manifest,
        bank.as_deref(),
        args.threshold,
        exec(args.sequential),
    )?;
    if let Some(path) = &args.out {
        write(path, &report.confusion_csv())?;
    }
    Ok(report.to_table())
}

fn simulate_cmd(args: &SimulateArgs) -> Result<String> {
    let mut script = parse_scenario(&read(&args.scenario)?)
        .with_context(|| format!("{}", args.scenario.display()))?;
    if let Some(f) = args.f {
        script.predict.response_fn = match f {
            FArg::Additive => ResponseFn::Additive,
            FArg::Multiplicative => ResponseFn::Multiplicative,
        };
    }
    if let Some(p) = args.psl {
        script.psl = match p {
            PslArg::Division => PslMode::Division,
            PslArg::Multiplication => PslMode::Multiplication,
        };
    }
    if let Some(m) = args.eq6 {
        script.predict.mode = match m {
            Eq6Arg::Strict => Eq6Mode::Strict,
            Eq6Arg::WorkedExample => Eq6Mode::WorkedExample,
        };
    }
    if let Some(n) = args.max_steps {
        script.max_steps = usize::try_from(n).unwrap_or(usize::MAX);
    }
    if let Some(floor) = args.pc_floor {
        script.pc_floor = floor;
    }
    let trace = simulate(&script).with_context(|| format!("{}", args.scenario.display()))?;
    if let Some(path) = &args.out {
        write(path, &trace.to_csv())?;
    }
    Ok(trace.to_text())
}

fn bind(args: &BindArgs) -> Result<String> {
    let active = load_grid_text(&args.ensemble)?;
    let pattern = load_grid_text(&args.hierarchy)?;
    let links = CooccurrenceClassifier::from_text(&read(&args.links)?)
        .with_context(|| format!("{}", args.links.display()))?;
    let ensemble =
        EnsembleState::new(active, links).with_context(|| format!("{}", args.links.display()))?;
    let hierarchy = HierarchyPattern(pattern);
    let mut text = String::new();
    let report = match args.resonate {
        None => bind_report(&ensemble, &hierarchy, args.threshold)
            .with_context(|| format!("{}", args.hierarchy.display()))?,
        Some(max_iter) => {
            let max_iter = usize::try_from(max_iter).unwrap_or(usize::MAX);
            let res = resonate(&ensemble, &hierarchy, args.threshold, max_iter)
                .with_context(|| format!("{}", args.hierarchy.display()))?;
            let state = if res.stable { "STABLE" } else { "UNSTABLE" };
            let _ = writeln!(
                text,
                "resonance {state} after {} iterations active={}",
                res.iterations,
                res.active.active_count()
            );
            res.report
        }
    };
    let body = report.to_text();
    if let Some(path) = &args.out {
        write(path, &body)?;
    }
    text.push_str(&body);
    Ok(text)
}

fn concept_learn(args: &ConceptLearnArgs) -> Result<String> {
    let mut base = match &args.base {
        Some(path) => {
            ConceptBase::from_text(&read(path)?).with_context(|| format!("{}", path.display()))?
        }
        None => ConceptBase::new(),
    };
    let mut sessions: Vec<(String, Vec<String>)> = args
        .sessions
        .iter()
        .map(|s| {
            let words = s.split(',').map(|w| w.trim().to_string()).collect();
            (format!("--session {s}"), words)
        })
        .collect();
    if let Some(path) = &args.sessions_file {
        for (i, line) in read(path)?.lines().enumerate() {
            let words: Vec<String> = line.split_whitespace().map(str::to_string).collect();
            if !words.is_empty() {
                sessions.push((format!("{}:{}", path.display(), i + 1), words));
            }
        }
    }
    if sessions.is_empty() {
        return Err(UsageError("give at least one --session or --sessions-file".into()).into());
    }
    for (origin, session) in &sessions {
        base.learn_occurrence(session)
            .with_context(|| origin.clone())?;
    }
    write(&args.out, &base.to_text())?;
    Ok(format!(
        "sessions={} concepts={} pairs={}\n",
        sessions.len(),
        base.concepts().len(),
        base.pairs().count()
    ))
}

fn concept_resolve(args: &ConceptResolveArgs) -> Result<String> {
    let base = ConceptBase::from_text(&read(&args.base)?)
        .with_context(|| format!("{}", args.base.display()))?;
    let text = base
        .resolve_bindings(&args.active, args.min_count)
        .to_text();
    if let Some(path) = &args.out {
        write(path, &text)?;
    }
    Ok(text)
}

fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Train(a) => train(a),
        Command::Classify(a) => classify(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Bind(a) => bind(a),
        Command::ConceptLearn(a) => concept_learn(a),
        Command::ConceptResolve(a) => concept_resolve(a),
    }
}

/// Joins the error chain on one line, skipping causes already quoted by the
/// message above them.
fn one_line(err: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in err.chain() {
        let msg = cause.to_string();
        if out.contains(&msg) {
            continue;
        }
        if !out.is_empty() {
            out.push_str(": ");
        }
        out.push_str(&msg);
    }
    out.replace('\n', " ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            eprintln!(
                "{}",
                rendered.lines().next().unwrap_or("error: invalid usage")
            );
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {}", one_line(&err));
            if err.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
