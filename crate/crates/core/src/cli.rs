//! The `snmf` command line: `fit`, `synth` and `report`.
//!
//! Every subcommand is also callable as a function so the binary stays a
//! thin wrapper around [`main_with_args`].

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::datagen::{generate, Basis, SyntheticSpec};
use crate::engine::{fit, normalized, topk_features, FitConfig, LossTrace, DEFAULT_EPS, DEFAULT_INNER_V_UPDATES};
use crate::error::{Error, Result};
use crate::ingest::{
    load_manifest, load_model, load_vocabulary, save_model, write_dense_csv, write_vector_csv, write_vocabulary,
    FitDefaults, Manifest, StratumEntry, StratumFormat, Transform,
};

pub const DEFAULT_ITERS: usize = 100;
pub const PAPER_PRESET_ITERS: usize = 10_000;
pub const PAPER_PRESET_RANK: usize = 5;

#[derive(Debug, Parser)]
#[command(name = "snmf", version, about = "Stratified non-negative matrix factorization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a model to the strata listed in a manifest
    Fit(FitArgs),
    /// Generate a synthetic stratified dataset
    Synth(SynthArgs),
    /// Write normalized shift vectors and top features for a fitted model
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// Dataset manifest (JSON)
    pub manifest: PathBuf,
    /// Number of shared topics; falls back to the manifest's fit defaults
    #[arg(long)]
    pub rank: Option<usize>,
    /// Outer iterations [default: manifest fit default, else 100]
    #[arg(long)]
    pub iters: Option<usize>,
    /// v updates per outer iteration
    #[arg(long, default_value_t = DEFAULT_INNER_V_UPDATES)]
    pub v_updates: usize,
    /// Added to every update denominator
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Record loss and strata means every this many iterations
    #[arg(long, default_value_t = 1)]
    pub log_every: usize,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

impl FitArgs {
    pub fn new(manifest: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        Self {
            manifest: manifest.into(),
            rank: None,
            iters: None,
            v_updates: DEFAULT_INNER_V_UPDATES,
            eps: DEFAULT_EPS,
            seed: 0,
            log_every: 1,
            out: out.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// 4 strata of 100x100, inner rank 5, shifts uniform on [i-1, i]
    Paper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Shared,
    PerStratum,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Named configuration; also records rank 5 and 10000 iterations as fit defaults
    #[arg(long, value_enum, conflicts_with_all = ["strata", "rows", "cols", "inner_rank", "shifts"])]
    pub preset: Option<Preset>,
    #[arg(long, default_value_t = 4)]
    pub strata: usize,
    /// Rows per stratum
    #[arg(long, default_value_t = 100)]
    pub rows: usize,
    #[arg(long, default_value_t = 100)]
    pub cols: usize,
    /// Rank of the noiseless product (0 gives pure shifts)
    #[arg(long, default_value_t = 5)]
    pub inner_rank: usize,
    /// `paper` for [i-1, i], `LO:HI` for every stratum, or `LO:HI,LO:HI,...`
    #[arg(long, default_value = "paper")]
    pub shifts: String,
    #[arg(long, value_enum, default_value_t = BasisArg::Shared)]
    pub basis: BasisArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

impl SynthArgs {
    pub fn paper(out: impl Into<PathBuf>) -> Self {
        Self {
            preset: Some(Preset::Paper),
            strata: 4,
            rows: 100,
            cols: 100,
            inner_rank: 5,
            shifts: "paper".into(),
            basis: BasisArg::Shared,
            seed: 0,
            out: out.into(),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Directory written by `fit`
    pub model_dir: PathBuf,
    /// Top features per stratum
    #[arg(short, long, default_value_t = 3)]
    pub k: usize,
    /// Vocabulary file; defaults to vocab.txt in the model directory when present
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// Output directory [default: the model directory]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Summary written to `report.json` by `fit`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub manifest: String,
    pub config: FitConfig,
    pub strata: Vec<String>,
    pub final_loss: f64,
    pub final_normalized_loss: Option<f64>,
    pub strata_means: Vec<f64>,
    pub wall_clock_seconds: f64,
    /// Files written, relative to the output directory.
    pub outputs: Vec<String>,
}

/// What `report` produced.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportSummary {
    pub normalized_v: PathBuf,
    pub topk: PathBuf,
    /// Strata whose shift vector sums to zero, with the reason.
    pub skipped: Vec<(String, String)>,
}

pub const LOSS_TRACE_FILE: &str = "loss_trace.csv";
pub const STRATA_MEANS_FILE: &str = "strata_means.csv";
pub const STRATA_MEANS_TRACE_FILE: &str = "strata_means_trace.csv";
pub const REPORT_FILE: &str = "report.json";
pub const VOCAB_FILE: &str = "vocab.txt";
pub const NORMALIZED_V_FILE: &str = "normalized_v.csv";
pub const TOPK_FILE: &str = "topk.csv";

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => Error::invalid(format!("{}: {other:?}", path.display())),
    }
}

fn write_rows<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.write_record(row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_trace(out: &Path, names: &[String], trace: &LossTrace) -> Result<()> {
    write_rows(
        &out.join(LOSS_TRACE_FILE),
        &["iteration", "loss", "normalized_loss"],
        trace.records().iter().map(|r| {
            [
                r.iteration.to_string(),
                r.loss.to_string(),
                r.normalized_loss.map(|x| x.to_string()).unwrap_or_default(),
            ]
        }),
    )?;
    let mut header = vec!["iteration"];
    header.extend(names.iter().map(String::as_str));
    write_rows(
        &out.join(STRATA_MEANS_TRACE_FILE),
        &header,
        trace.records().iter().map(|r| {
            std::iter::once(r.iteration.to_string()).chain(r.strata_means.iter().map(f64::to_string))
        }),
    )
}

/// Loads the manifest, fits, and writes the model, traces and `report.json` to `args.out`.
pub fn cmd_fit(args: &FitArgs) -> Result<RunReport> {
    let start = Instant::now();
    let loaded = load_manifest(&args.manifest)?;
    let defaults = loaded.manifest.fit_defaults.clone().unwrap_or_default();
    let rank = args
        .rank
        .or(defaults.rank)
        .ok_or_else(|| Error::invalid("--rank is required (the manifest sets no default rank)"))?;
    let config = FitConfig {
        rank,
        outer_iters: args.iters.or(defaults.iters).unwrap_or(DEFAULT_ITERS),
        inner_v_updates: args.v_updates,
        eps: args.eps,
        seed: args.seed,
        log_every: args.log_every,
        rng: Default::default(),
    };
    config.validate()?;

    let data = &loaded.dataset;
    let (model, trace) = fit(data, &config)?;
    let names = data.names().to_vec();

    let out = &args.out;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    save_model(out, &model, &names, Some(&config))?;
    let mut outputs = vec!["model.json".to_string(), "H.csv".to_string()];
    for i in 0..names.len() {
        outputs.push(crate::ingest::w_file(i));
        outputs.push(crate::ingest::v_file(i));
    }
    if let Some(vocab) = &loaded.vocabulary {
        write_vocabulary(out.join(VOCAB_FILE), vocab)?;
        outputs.push(VOCAB_FILE.into());
    }
    write_trace(out, &names, &trace)?;
    let last = trace.last().expect("trace holds the initial state");
    write_rows(
        &out.join(STRATA_MEANS_FILE),
        &["stratum", "name", "mean"],
        last.strata_means
            .iter()
            .enumerate()
            .map(|(i, m)| [i.to_string(), names[i].clone(), m.to_string()]),
    )?;
    outputs.extend([LOSS_TRACE_FILE, STRATA_MEANS_FILE, STRATA_MEANS_TRACE_FILE, REPORT_FILE].map(String::from));

    let report = RunReport {
        manifest: args.manifest.display().to_string(),
        config,
        strata: names,
        final_loss: last.loss,
        final_normalized_loss: last.normalized_loss,
        strata_means: last.strata_means.clone(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        outputs,
    };
    let path = out.join(REPORT_FILE);
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(path, e))?;
    Ok(report)
}

/// Parses `paper`, `LO:HI`, or a comma-separated list of `LO:HI` with one entry per stratum.
pub fn parse_shifts(spec: &str, strata: usize) -> Result<Vec<(f64, f64)>> {
    let spec = spec.trim();
    if spec == "paper" {
        return Ok((0..strata).map(|i| (i as f64, i as f64 + 1.0)).collect());
    }
    let ranges = spec
        .split(',')
        .map(|part| {
            let (lo, hi) = part
                .split_once(':')
                .ok_or_else(|| Error::invalid(format!("shift range {part:?} is not LO:HI")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::invalid(format!("bad shift bound {s:?}")))
            };
            Ok((parse(lo)?, parse(hi)?))
        })
        .collect::<Result<Vec<_>>>()?;
    match ranges.len() {
        1 => Ok(vec![ranges[0]; strata]),
        len if len == strata => Ok(ranges),
        len => Err(Error::invalid(format!("{len} shift ranges for {strata} strata"))),
    }
}

/// Writes `stratum_<i>.csv`, `v_true_<i>.csv`, `manifest.json` and `synth.json`.
pub fn cmd_synth(args: &SynthArgs) -> Result<Manifest> {
    let mut spec = match args.preset {
        Some(Preset::Paper) => SyntheticSpec::paper(args.seed),
        None => {
            let mut spec = SyntheticSpec::uniform_shifts(args.strata, args.rows, args.cols, args.inner_rank, args.seed);
            spec.shifts = parse_shifts(&args.shifts, args.strata)?;
            spec
        }
    };
    spec.basis = match args.basis {
        BasisArg::Shared => Basis::Shared,
        BasisArg::PerStratum => Basis::PerStratum,
    };
    let syn = generate(&spec)?;

    let out = &args.out;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut strata = Vec::with_capacity(spec.strata());
    for (i, (a, v)) in syn.dataset.strata().iter().zip(&syn.v_true).enumerate() {
        let file = format!("stratum_{i}.csv");
        write_dense_csv(out.join(&file), &a.to_dense())?;
        write_vector_csv(out.join(format!("v_true_{i}.csv")), v)?;
        strata.push(StratumEntry {
            name: syn.dataset.names()[i].clone(),
            path: file.into(),
            format: StratumFormat::DenseCsv,
            rows: Some(a.rows()),
        });
    }
    let manifest = Manifest {
        n_cols: spec.cols,
        vocabulary: None,
        exclude_columns: Vec::new(),
        transform: Transform::None,
        strata,
        fit_defaults: args.preset.map(|Preset::Paper| FitDefaults {
            rank: Some(PAPER_PRESET_RANK),
            iters: Some(PAPER_PRESET_ITERS),
        }),
    };
    manifest.save(out.join("manifest.json"))?;
    let path = out.join("synth.json");
    let text = serde_json::to_string_pretty(&spec).expect("spec serializes");
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(path, e))?;
    Ok(manifest)
}

/// Writes `normalized_v.csv` (stratum, feature, weight) and `topk.csv`
/// (stratum, rank, feature, weight). Strata with an all-zero shift are
/// skipped and reported instead of aborting the others.
pub fn cmd_report(args: &ReportArgs) -> Result<ReportSummary> {
    let stored = load_model(&args.model_dir)?;
    let model = &stored.model;
    let n = model.n_cols();
    if args.k > n {
        return Err(Error::invalid(format!("k = {} exceeds the {n} columns", args.k)));
    }
    let default_vocab = args.model_dir.join(VOCAB_FILE);
    let vocab = match &args.vocab {
        Some(p) => Some(load_vocabulary(p)?),
        None if default_vocab.is_file() => Some(load_vocabulary(&default_vocab)?),
        None => None,
    };
    if let Some(v) = &vocab {
        if v.len() != n {
            return Err(Error::invalid(format!("vocabulary has {} tokens for {n} columns", v.len())));
        }
    }
    let label = |j: usize| vocab.as_ref().map_or_else(|| j.to_string(), |v| v[j].clone());

    let mut skipped = Vec::new();
    let mut norm_rows = Vec::new();
    let mut topk_rows = Vec::new();
    for (i, name) in stored.names.iter().enumerate() {
        match normalized(&model.v()[i], i) {
            Ok(v) => norm_rows.extend(
                v.as_slice()
                    .iter()
                    .enumerate()
                    .map(|(j, w)| [name.clone(), label(j), w.to_string()]),
            ),
            Err(e) => {
                eprintln!("warning: stratum {name}: {e}");
                skipped.push((name.clone(), e.to_string()));
            }
        }
        if args.k > 0 {
            let top = topk_features(model, i, args.k, vocab.as_deref())?;
            topk_rows.extend(
                top.iter()
                    .enumerate()
                    .map(|(r, f)| [name.clone(), (r + 1).to_string(), f.name(), f.weight.to_string()]),
            );
        }
    }

    let out = args.out.clone().unwrap_or_else(|| args.model_dir.clone());
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    let normalized_v = out.join(NORMALIZED_V_FILE);
    let topk = out.join(TOPK_FILE);
    write_rows(&normalized_v, &["stratum", "feature", "weight"], norm_rows)?;
    write_rows(&topk, &["stratum", "rank", "feature", "weight"], topk_rows)?;
    Ok(ReportSummary {
        normalized_v,
        topk,
        skipped,
    })
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit(args) => {
            let r = cmd_fit(&args)?;
            println!(
                "fit {} strata, rank {}, {} iterations in {:.2}s",
                r.strata.len(),
                r.config.rank,
                r.config.outer_iters,
                r.wall_clock_seconds
            );
            match r.final_normalized_loss {
                Some(nl) => println!("final loss {:.6e}, normalized loss {nl:.6e}", r.final_loss),
                None => println!("final loss {:.6e}", r.final_loss),
            }
            for (name, mean) in r.strata.iter().zip(&r.strata_means) {
                println!("  {name}: mean v = {mean:.4}");
            }
            println!("wrote {}", args.out.display());
        }
        Command::Synth(args) => {
            let m = cmd_synth(&args)?;
            println!("wrote {} strata to {}", m.strata.len(), args.out.display());
        }
        Command::Report(args) => {
            let s = cmd_report(&args)?;
            println!("wrote {} and {}", s.normalized_v.display(), s.topk.display());
        }
    }
    Ok(())
}

/// Parses arguments, runs, and returns the process exit code: 0 on success,
/// 1 for usage and validation errors, 2 for I/O errors.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_specs() {
        assert_eq!(parse_shifts("paper", 2).unwrap(), vec![(0.0, 1.0), (1.0, 2.0)]);
        assert_eq!(parse_shifts("1:3", 2).unwrap(), vec![(1.0, 3.0); 2]);
        assert_eq!(parse_shifts("0:1, 2:2", 2).unwrap(), vec![(0.0, 1.0), (2.0, 2.0)]);
        assert!(parse_shifts("0:1,1:2", 3).is_err());
        assert!(parse_shifts("01", 1).is_err());
        assert!(parse_shifts("a:1", 1).is_err());
    }

    #[test]
    fn fit_defaults_echo_paper_protocol() {
        let cli = Cli::try_parse_from(["snmf", "fit", "m.json", "--rank", "3", "--out", "o"]).unwrap();
        let Command::Fit(args) = cli.command else { panic!() };
        assert_eq!(args.v_updates, 2);
        assert_eq!(args.eps, 1e-9);
        assert_eq!(args.seed, 0);
        assert_eq!(args.log_every, 1);
        assert_eq!(args.iters, None);
    }

    #[test]
    fn preset_conflicts_with_dimensions() {
        assert!(Cli::try_parse_from(["snmf", "synth", "--preset", "paper", "--rows", "3", "--out", "o"]).is_err());
    }

    #[test]
    fn usage_errors_exit_with_one() {
        assert_eq!(main_with_args(["snmf", "fit"]), 1);
        assert_eq!(main_with_args(["snmf", "bogus"]), 1);
        assert_eq!(main_with_args(["snmf", "--help"]), 0);
    }
}
