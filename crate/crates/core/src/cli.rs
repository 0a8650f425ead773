//! Command-line front end for the `bvfair` binary.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::error::FairnessError;
use crate::ingest::{
    classify_pairs, normalize_scores, parse_labeled_scores, parse_pair_scores, synthetic_source,
    write_labeled_csv, Normalization,
};
use crate::report::{evaluate, histogram_csv, EvalConfig, Provenance};
use crate::synthetic::{generate, Preset, ScenarioPreset, SizeProfile};
use crate::types::{validate_dataset, Dataset, RatioBasis};
use crate::weights::{labeled_fusion_weights, weight_curve_with, WeightParams};

#[derive(Debug, Parser)]
#[command(name = "bvfair", version, about = "Demographic fairness indices for biometric verification scores")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute SFI, CFI and DFI (normal, extremal, weighted) for a score file.
    Evaluate(EvaluateArgs),
    /// Print fusion weights for group sizes, or sample the weighing curve.
    Weights(WeightsArgs),
    /// Write a canonical synthetic dataset as labeled-score CSV.
    Synth(SynthArgs),
    /// Write per-group normalized score histograms as CSV.
    Hist(HistArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Labeled,
    Pairs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormalizeArg {
    None,
    Minmax,
    Oneminus,
}

impl From<NormalizeArg> for Normalization {
    fn from(n: NormalizeArg) -> Self {
        match n {
            NormalizeArg::None => Normalization::None,
            NormalizeArg::Minmax => Normalization::MinMax,
            NormalizeArg::Oneminus => Normalization::OneMinus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RatioBasisArg {
    Records,
    Subjects,
}

impl From<RatioBasisArg> for RatioBasis {
    fn from(r: RatioBasisArg) -> Self {
        match r {
            RatioBasisArg::Records => RatioBasis::Records,
            RatioBasisArg::Subjects => RatioBasis::Subjects,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    Fair,
    Unfair,
    #[value(name = "highly_unfair", alias = "highly-unfair")]
    HighlyUnfair,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Fair => Preset::Fair,
            PresetArg::Unfair => Preset::Unfair,
            PresetArg::HighlyUnfair => Preset::HighlyUnfair,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Score file(s); several files are concatenated.
    #[arg(long = "input", short = 'i', required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "labeled")]
    pub format: InputFormat,
    #[arg(long, value_enum, default_value = "none")]
    pub normalize: NormalizeArg,
}

#[derive(Debug, Clone, Args)]
pub struct WeightOverrides {
    /// Override the weighing function's constant c (default 1).
    #[arg(long = "weight-c")]
    pub c: Option<f64>,
    /// Override the weighing function's sigma (default 1/(2K)).
    #[arg(long = "weight-sigma")]
    pub sigma: Option<f64>,
}

impl WeightOverrides {
    fn params(&self) -> WeightParams {
        WeightParams {
            c: self.c.unwrap_or(crate::weights::DEFAULT_C),
            sigma: self.sigma,
        }
    }
}

fn parse_bins(s: &str) -> Result<usize, String> {
    let b: usize = s.parse().map_err(|e| format!("{e}"))?;
    if b < 2 {
        Err("bin count must be at least 2".into())
    } else {
        Ok(b)
    }
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "100", value_parser = parse_bins)]
    pub bins: usize,
    #[arg(long = "ratio-basis", value_enum, default_value = "records")]
    pub ratio_basis: RatioBasisArg,
    #[arg(long = "out", value_enum, default_value = "json")]
    pub out: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long = "output", short = 'o')]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub weights: WeightOverrides,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).multiple(true).args(["sizes", "inputs", "curve"])))]
pub struct WeightsArgs {
    /// Comma-separated group sizes, e.g. 100,1000,2000.
    #[arg(long, value_delimiter = ',', conflicts_with = "inputs")]
    pub sizes: Option<Vec<u64>>,
    /// Score file(s) to take group sizes from.
    #[arg(long = "input", short = 'i', num_args = 1..)]
    pub inputs: Option<Vec<PathBuf>>,
    #[arg(long, value_enum, default_value = "labeled")]
    pub format: InputFormat,
    #[arg(long, value_enum, default_value = "none")]
    pub normalize: NormalizeArg,
    #[arg(long = "ratio-basis", value_enum, default_value = "records")]
    pub ratio_basis: RatioBasisArg,
    /// Sample the unnormalized weight curve for K groups as `ratio,raw_weight` CSV.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub curve: Option<u64>,
    #[arg(long, default_value = "1000", value_parser = clap::value_parser!(u64).range(2..))]
    pub resolution: u64,
    /// Write the curve here instead of stdout.
    #[arg(long = "curve-out")]
    pub curve_out: Option<PathBuf>,
    #[command(flatten)]
    pub weights: WeightOverrides,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub preset: PresetArg,
    #[arg(long, default_value = "42")]
    pub seed: u64,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
    /// Use group sizes 100, 1000, 2000 instead of 1000 each.
    #[arg(long)]
    pub imbalanced: bool,
}

#[derive(Debug, Args)]
pub struct HistArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "100", value_parser = parse_bins)]
    pub bins: usize,
    #[arg(long = "output", short = 'o')]
    pub output: Option<PathBuf>,
}

/// Failure of a subcommand, mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flag combination; exit code 2.
    Usage(String),
    /// Unreadable input, parse or validation failure; exit code 1.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failed(m) => m,
        }
    }
}

impl From<FairnessError> for CliError {
    fn from(e: FairnessError) -> Self {
        CliError::Failed(e.to_string())
    }
}

fn with_path(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Failed(format!("{}: {e}", path.display()))
}

/// A dataset loaded from files plus what the report should say about its origin.
pub struct Loaded {
    pub dataset: Dataset,
    pub provenance: Provenance,
}

pub fn load(inputs: &[PathBuf], format: InputFormat, normalize: Normalization) -> Result<Loaded, CliError> {
    let mut records = Vec::new();
    let mut pairs = Vec::new();
    let mut source = None;
    for path in inputs {
        let text = fs::read_to_string(path).map_err(|e| with_path(path, e))?;
        if source.is_none() {
            source = synthetic_source(&text);
        }
        match format {
            InputFormat::Labeled => {
                records.extend(parse_labeled_scores(text.as_bytes()).map_err(|e| with_path(path, e))?)
            }
            InputFormat::Pairs => {
                pairs.extend(parse_pair_scores(text.as_bytes()).map_err(|e| with_path(path, e))?)
            }
        }
    }
    let mut discarded = None;
    let mut subjects = None;
    if format == InputFormat::Pairs {
        let classified = classify_pairs(&pairs)?;
        records = classified.records;
        discarded = Some(classified.discarded);
        subjects = Some(classified.subjects_per_group);
    }
    let records = normalize_scores(&records, normalize)?;
    let mut dataset = validate_dataset(&records)?;
    if let Some(counts) = subjects {
        dataset = dataset.with_subject_counts(&counts)?;
    }
    Ok(Loaded {
        dataset,
        provenance: Provenance {
            input_format: match format {
                InputFormat::Labeled => "labeled",
                InputFormat::Pairs => "pairs",
            }
            .into(),
            normalization: normalize,
            discarded_pairs: discarded,
            synthetic_source: source,
        },
    })
}

fn check_basis(format: InputFormat, basis: RatioBasisArg) -> Result<(), CliError> {
    if basis == RatioBasisArg::Subjects && format != InputFormat::Pairs {
        return Err(CliError::Usage(
            "--ratio-basis subjects needs --format pairs (labeled scores carry no subject ids)".into(),
        ));
    }
    Ok(())
}

fn emit(output: Option<&Path>, content: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, content).map_err(|e| with_path(path, e)),
        None => out
            .write_all(content.as_bytes())
            .map_err(|e| CliError::Failed(format!("writing output: {e}"))),
    }
}

pub fn cmd_evaluate(args: &EvaluateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    check_basis(args.input.format, args.ratio_basis)?;
    let loaded = load(&args.input.inputs, args.input.format, args.input.normalize.into())?;
    let config = EvalConfig {
        bins: args.bins,
        weights: args.weights.params(),
        ratio_basis: args.ratio_basis.into(),
        provenance: loaded.provenance,
    };
    let report = evaluate(&loaded.dataset, &config)?;
    let text = match args.out {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Csv => report.to_csv(),
        OutputFormat::Text => report.to_text(),
    };
    emit(args.output.as_deref(), &text, out)
}

pub fn cmd_weights(args: &WeightsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let params = args.weights.params();
    let mut text = String::new();

    let table = match (&args.sizes, &args.inputs) {
        (Some(sizes), _) => {
            let labels: Vec<String> = (1..=sizes.len()).map(|i| format!("d{i}")).collect();
            Some(labeled_fusion_weights(&labels, sizes, &params)?)
        }
        (None, Some(inputs)) => {
            check_basis(args.format, args.ratio_basis)?;
            let loaded = load(inputs, args.format, args.normalize.into())?;
            let ds = &loaded.dataset;
            let sizes: Vec<u64> = ds
                .group_sizes(args.ratio_basis.into())?
                .into_iter()
                .map(|s| s as u64)
                .collect();
            Some(labeled_fusion_weights(&ds.labels(), &sizes, &params)?)
        }
        (None, None) => None,
    };
    if let Some(w) = &table {
        text.push_str("group,size,ratio,raw_weight,weight\n");
        for g in &w.groups {
            let _ = writeln!(
                text,
                "{},{},{},{},{}",
                g.demographic,
                g.size,
                g.size as f64 / w.n as f64,
                g.raw,
                g.normalized
            );
        }
    }

    if let Some(k) = args.curve {
        let curve = weight_curve_with(k as usize, args.resolution as usize, &params)?;
        let mut csv = String::from("ratio,raw_weight\n");
        for (ratio, w) in curve {
            let _ = writeln!(csv, "{ratio},{w}");
        }
        match &args.curve_out {
            Some(path) => fs::write(path, csv).map_err(|e| with_path(path, e))?,
            None => {
                if !text.is_empty() {
                    text.push('\n');
                }
                text.push_str(&csv);
            }
        }
    }
    emit(None, &text, out)
}

pub fn cmd_synth(args: &SynthArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let preset: Preset = args.preset.into();
    let profile = if args.imbalanced {
        SizeProfile::Imbalanced
    } else {
        SizeProfile::Balanced
    };
    let scenario = ScenarioPreset::canonical(preset, profile);
    let ds = generate(&scenario, args.seed)?;
    let comment = format!(
        "synthetic: preset={} profile={} seed={}",
        preset,
        profile.as_str(),
        args.seed
    );
    let csv = write_labeled_csv(&ds, Some(&comment));
    fs::write(&args.out, csv).map_err(|e| with_path(&args.out, e))?;
    let _ = writeln!(
        out,
        "wrote {} records ({} groups) to {}",
        ds.n(),
        ds.k(),
        args.out.display()
    );
    Ok(())
}

pub fn cmd_hist(args: &HistArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let loaded = load(&args.input.inputs, args.input.format, args.input.normalize.into())?;
    let csv = histogram_csv(&loaded.dataset, args.bins)?;
    emit(args.output.as_deref(), &csv, out)
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Evaluate(a) => cmd_evaluate(a, out),
        Command::Weights(a) => cmd_weights(a, out),
        Command::Synth(a) => cmd_synth(a, out),
        Command::Hist(a) => cmd_hist(a, out),
    }
}

/// Parses `std::env::args`, runs the command, and reports errors on stderr.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(&cli, &mut lock) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bvfair: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
