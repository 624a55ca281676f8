//! Command-line front end.
//!
//! Settings resolve as: command-line flag, then `key = value` line in the
//! file given by `--config`, then the built-in default. Config keys are the
//! long flag names; `-` and `_` are interchangeable.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::bench::{
    self, build_report, emit_report, measure_speed, meter_energy, Baseline, EnergyReading, Meter, MeterConfig,
    MonotonicClock, RaplCounter, RunRecord, SpeedConfig,
};
use crate::conllu::{parse_conllu, treebank_stats, write_conllu, Sentence};
use crate::error::Error;
use crate::eval::{score, PunctPolicy};
use crate::scoring::{self, load_model, save_model, EpochStats, Paradigm, TrainConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Run(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Run(Error::Io(_) | Error::Counter(_)) => EXIT_IO,
            CliError::Run(_) => EXIT_DATA,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Run(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Run(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Run(Error::Io(e))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "depbench", version, about = "Train, run and benchmark dependency parsers")]
pub struct Cli {
    /// Flat `key = value` file supplying defaults for any long flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Seed for every randomised step (training shuffles).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Embed the current time in written records and reports.
    #[arg(long, global = true)]
    pub timestamps: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model and write it with a training record.
    Train(TrainArgs),
    /// Replace HEAD and DEPREL in a CoNLL-U file with predictions.
    Parse(ParseArgs),
    /// Attachment scores of predictions against gold.
    Eval(EvalArgs),
    /// Treebank statistics.
    Stats(StatsArgs),
    /// Measure accuracy and speed of a trained model; writes a run record.
    Bench(BenchArgs),
    /// Compute Pareto fronts over run records and write the report.
    Pareto(ParetoArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// graph, transition or seqlab.
    #[arg(long)]
    pub paradigm: Option<String>,
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[arg(long)]
    pub dev: Option<PathBuf>,
    /// Treebank name used in output file names [default: train file stem].
    #[arg(long)]
    pub treebank: Option<String>,
    /// Model path [default: <out-dir>/<system>-<size>-<treebank>.model].
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// [default: .]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// [default: 20]
    #[arg(long)]
    pub max_epochs: Option<usize>,
    /// [default: 10]
    #[arg(long)]
    pub patience: Option<usize>,
    /// Feature space is 2^bits weights [default: 22].
    #[arg(long)]
    pub feature_bits: Option<u8>,
    /// true or false [default: true].
    #[arg(long)]
    pub single_root: Option<String>,
    /// auto, rapl or constant [default: auto].
    #[arg(long)]
    pub meter: Option<String>,
    /// Rated power for the constant meter [default: 65].
    #[arg(long)]
    pub watts: Option<f64>,
    /// Powercap directory for the rapl meter [default: /sys/class/powercap].
    #[arg(long)]
    pub rapl_root: Option<PathBuf>,
    /// Idle window for the background baseline in seconds [default: 5].
    #[arg(long)]
    pub baseline_secs: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ParseArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// [default: stdout]
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Fail unless the model was trained for this paradigm.
    #[arg(long)]
    pub paradigm: Option<String>,
    /// [default: true]
    #[arg(long)]
    pub single_root: Option<String>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub gold: Option<PathBuf>,
    #[arg(long)]
    pub pred: Option<PathBuf>,
    /// include or exclude [default: include].
    #[arg(long)]
    pub punct: Option<String>,
    /// text, tsv or json [default: text].
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// One or more CoNLL-U files, pooled.
    #[arg(num_args = 0..)]
    pub inputs: Vec<PathBuf>,
    /// text or json [default: text].
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Gold test CoNLL-U; parsed for accuracy and timing.
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Training record [default: <out-dir>/<system>-<size>-<treebank>.train.json].
    #[arg(long)]
    pub train_record: Option<PathBuf>,
    /// [default: test file stem]
    #[arg(long)]
    pub treebank: Option<String>,
    /// [default: .]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// [default: 5]
    #[arg(long)]
    pub runs: Option<usize>,
    /// [default: 256]
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Pin to one CPU core while timing [default: true].
    #[arg(long)]
    pub pin: Option<String>,
    /// [default: true]
    #[arg(long)]
    pub single_root: Option<String>,
    /// include or exclude [default: include].
    #[arg(long)]
    pub punct: Option<String>,
}

#[derive(Debug, Args)]
pub struct ParetoArgs {
    /// Run record files, or directories scanned for them.
    #[arg(num_args = 0..)]
    pub records: Vec<PathBuf>,
    /// [default: .]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// Training record written next to the model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainRecord {
    pub system: Paradigm,
    pub size_axis: String,
    pub treebank: String,
    pub feature_space_bits: u8,
    pub seed: u64,
    pub model: String,
    pub train_energy: EnergyReading,
    pub train_time_s: f64,
    pub best_epoch: usize,
    pub best_dev_las: f64,
    pub epochs: Vec<EpochStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_unix_s: Option<u64>,
}

pub fn size_axis(bits: u8) -> String {
    format!("b{bits}")
}

pub fn record_stem(system: Paradigm, size_axis: &str, treebank: &str) -> String {
    format!("{system}-{size_axis}-{treebank}")
}

/// Flag values layered over a config file.
struct Settings {
    file: BTreeMap<String, String>,
}

impl Settings {
    fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Settings { file: BTreeMap::new() });
        };
        if !path.exists() {
            return Err(CliError::Usage(format!(
                "config file {} does not exist",
                path.display()
            )));
        }
        let text = fs::read_to_string(path)?;
        Ok(Settings {
            file: parse_config(&text)?,
        })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.file.get(key).map(String::as_str)
    }

    fn get<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("config: bad value `{v}` for {key}"))),
        }
    }

    fn or<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> CliResult<T> {
        Ok(self.get(flag, key)?.unwrap_or(default))
    }

    fn required<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<T> {
        self.get(flag, key)?
            .ok_or_else(|| CliError::Usage(format!("--{key} is required")))
    }

    fn flag_bool(&self, flag: Option<String>, key: &str, default: bool) -> CliResult<bool> {
        match self.get(flag, key)? {
            None => Ok(default),
            Some(v) => {
                parse_bool(&v).ok_or_else(|| CliError::Usage(format!("--{key} expects true or false, got `{v}`")))
            }
        }
    }
}

pub fn parse_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
        map.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(map)
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Some(true),
        "false" | "no" | "0" | "off" => Some(false),
        _ => None,
    }
}

fn parse_paradigm(s: &str) -> CliResult<Paradigm> {
    s.parse()
        .map_err(|_| CliError::Usage(format!("unknown paradigm `{s}` (graph, transition, seqlab)")))
}

fn parse_punct(s: &str) -> CliResult<PunctPolicy> {
    match s {
        "include" => Ok(PunctPolicy::Include),
        "exclude" => Ok(PunctPolicy::ExcludeUposPunct),
        _ => Err(CliError::Usage(format!(
            "--punct expects include or exclude, got `{s}`"
        ))),
    }
}

fn existing(path: PathBuf, what: &str) -> CliResult<PathBuf> {
    if path.is_file() {
        Ok(path)
    } else {
        Err(CliError::Usage(format!(
            "{what} file {} does not exist",
            path.display()
        )))
    }
}

fn read_corpus(path: &Path) -> CliResult<Vec<Sentence>> {
    let text = fs::read_to_string(path)?;
    parse_conllu(&text).map_err(|e| match e {
        Error::Parse { line, message } => CliError::Run(Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        }),
        other => CliError::Run(other),
    })
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .map(|s| s.trim_end_matches(".conllu").to_string())
        .unwrap_or_else(|| "treebank".into())
}

fn now_unix(enabled: bool) -> Option<u64> {
    enabled.then(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut json = serde_json::to_string_pretty(value).map_err(Error::from)?;
    json.push('\n');
    fs::write(path, json)?;
    Ok(())
}

/// Run a parsed command line, writing normal output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    let settings = Settings::load(cli.config.as_deref())?;
    let seed = settings.or(cli.seed, "seed", TrainConfig::default().shuffle_seed)?;
    let timestamps = cli.timestamps || settings.flag_bool(None, "timestamps", false)?;
    match cli.command {
        Command::Train(a) => cmd_train(a, &settings, seed, timestamps, out),
        Command::Parse(a) => cmd_parse(a, &settings, out),
        Command::Eval(a) => cmd_eval(a, &settings, out),
        Command::Stats(a) => cmd_stats(a, &settings, out),
        Command::Bench(a) => cmd_bench(a, &settings, timestamps, out),
        Command::Pareto(a) => cmd_pareto(a, &settings, timestamps, out),
    }
}

fn build_meter<'a>(kind: &str, watts: f64, rapl_root: &Path) -> CliResult<Meter<'a>> {
    match kind {
        "constant" => Ok(Meter::ConstantPower { watts }),
        "rapl" => Ok(Meter::counters(RaplCounter::discover(rapl_root)?)),
        "auto" => Ok(match RaplCounter::discover(rapl_root) {
            Ok(c) => Meter::counters(c),
            Err(_) => Meter::ConstantPower { watts },
        }),
        _ => Err(CliError::Usage(format!(
            "--meter expects auto, rapl or constant, got `{kind}`"
        ))),
    }
}

fn cmd_train(a: TrainArgs, s: &Settings, seed: u64, timestamps: bool, out: &mut dyn Write) -> CliResult<()> {
    let paradigm = parse_paradigm(&s.required(a.paradigm, "paradigm")?)?;
    let train_path = existing(s.required(a.train, "train")?, "training")?;
    let dev_path = existing(s.required(a.dev, "dev")?, "development")?;
    let defaults = TrainConfig::default();
    let config = TrainConfig {
        max_epochs: s.or(a.max_epochs, "max-epochs", defaults.max_epochs)?,
        patience: s.or(a.patience, "patience", defaults.patience)?,
        shuffle_seed: seed,
        feature_space_bits: s.or(a.feature_bits, "feature-bits", defaults.feature_space_bits)?,
        single_root: s.flag_bool(a.single_root, "single-root", defaults.single_root)?,
    };
    config.validate()?;
    let treebank = s.get(a.treebank, "treebank")?.unwrap_or_else(|| stem(&train_path));
    let out_dir: PathBuf = s.or(a.out_dir, "out-dir", PathBuf::from("."))?;
    let size = size_axis(config.feature_space_bits);
    let base = record_stem(paradigm, &size, &treebank);
    let model_path = s
        .get(a.model, "model")?
        .unwrap_or_else(|| out_dir.join(format!("{base}.model")));

    let train_set = read_corpus(&train_path)?;
    let dev_set = read_corpus(&dev_path)?;

    let watts = s.or(a.watts, "watts", 65.0)?;
    let rapl_root: PathBuf = s.or(a.rapl_root, "rapl-root", PathBuf::from(bench::DEFAULT_POWERCAP_ROOT))?;
    let baseline_secs = s.or(a.baseline_secs, "baseline-secs", 5.0)?;
    if !(baseline_secs >= 0.0 && baseline_secs.is_finite()) {
        return Err(CliError::Usage("--baseline-secs must be a non-negative number".into()));
    }
    let mut meter = build_meter(&s.or(a.meter, "meter", "auto".to_string())?, watts, &rapl_root)?;
    let meter_config = MeterConfig {
        baseline: Baseline::Measure(Duration::from_secs_f64(baseline_secs)),
        ..MeterConfig::default()
    };
    let clock = MonotonicClock::default();
    let (trained, energy) = meter_energy(&mut meter, &meter_config, &clock, |probe| {
        scoring::train_with_probe(&train_set, &dev_set, paradigm, &config, &mut || probe.sample())
    })?;
    let (model, summary) = trained?;

    if let Some(dir) = model_path.parent() {
        fs::create_dir_all(dir)?;
    }
    save_model(&model, &model_path)?;
    let record = TrainRecord {
        system: paradigm,
        size_axis: size,
        treebank,
        feature_space_bits: config.feature_space_bits,
        seed,
        model: model_path.display().to_string(),
        train_time_s: energy.duration_s,
        train_energy: energy,
        best_epoch: summary.best_epoch,
        best_dev_las: summary.best_dev_las,
        epochs: summary.epochs,
        generated_unix_s: now_unix(timestamps),
    };
    let record_path = out_dir.join(format!("{base}.train.json"));
    write_json(&record_path, &record)?;
    writeln!(
        out,
        "model {}\nrecord {}\nbest epoch {} dev LAS {:.2}\nenergy {:.3} J over {:.3} s ({})",
        model_path.display(),
        record_path.display(),
        record.best_epoch,
        record.best_dev_las,
        record.train_energy.joules,
        record.train_time_s,
        record.train_energy.source.as_str(),
    )?;
    Ok(())
}

fn cmd_parse(a: ParseArgs, s: &Settings, out: &mut dyn Write) -> CliResult<()> {
    let model_path = existing(s.required(a.model, "model")?, "model")?;
    let input = existing(s.required(a.input, "input")?, "input")?;
    let single_root = s.flag_bool(a.single_root, "single-root", true)?;
    let model = load_model(&model_path)?;
    if let Some(p) = s.get(a.paradigm, "paradigm")? {
        let wanted = parse_paradigm(&p)?;
        if wanted != model.paradigm() {
            return Err(CliError::Run(Error::Validation(format!(
                "model {} is a {} model, not {wanted}",
                model_path.display(),
                model.paradigm()
            ))));
        }
    }
    let sentences = read_corpus(&input)?;
    let parsed = model.parse_corpus(&sentences, single_root)?;
    let text = write_conllu(&parsed);
    match s.get(a.output, "output")? {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_eval(a: EvalArgs, s: &Settings, out: &mut dyn Write) -> CliResult<()> {
    let gold = existing(s.required(a.gold, "gold")?, "gold")?;
    let pred = existing(s.required(a.pred, "pred")?, "prediction")?;
    let policy = parse_punct(&s.or(a.punct, "punct", "include".to_string())?)?;
    let format = s.or(a.format, "format", "text".to_string())?;
    let result = score(&read_corpus(&gold)?, &read_corpus(&pred)?, policy)?;
    match format.as_str() {
        "text" => writeln!(out, "{result}")?,
        "tsv" => writeln!(out, "{}", result.to_tsv())?,
        "json" => writeln!(out, "{}", result.to_json())?,
        _ => {
            return Err(CliError::Usage(format!(
                "--format expects text, tsv or json, got `{format}`"
            )))
        }
    }
    Ok(())
}

fn cmd_stats(a: StatsArgs, s: &Settings, out: &mut dyn Write) -> CliResult<()> {
    let inputs = if a.inputs.is_empty() {
        vec![s.required::<PathBuf>(None, "input")?]
    } else {
        a.inputs
    };
    let format = s.or(a.format, "format", "text".to_string())?;
    let mut corpus = Vec::new();
    for path in inputs {
        corpus.extend(read_corpus(&existing(path, "input")?)?);
    }
    let stats = treebank_stats(&corpus)?;
    match format.as_str() {
        "text" => writeln!(
            out,
            "sentences\t{}\ntokens\t{}\navg_sentence_length\t{:.2}\nnonprojective_arc_pct\t{:.2}\navg_word_length\t{:.2}",
            stats.sentence_count,
            stats.token_count,
            stats.avg_sentence_length,
            stats.nonprojective_arc_pct,
            stats.avg_word_length,
        )?,
        "json" => writeln!(out, "{}", serde_json::to_string_pretty(&stats).map_err(Error::from)?)?,
        _ => return Err(CliError::Usage(format!("--format expects text or json, got `{format}`"))),
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs, s: &Settings, timestamps: bool, out: &mut dyn Write) -> CliResult<()> {
    let model_path = existing(s.required(a.model, "model")?, "model")?;
    let test_path = existing(s.required(a.test, "test")?, "test")?;
    let out_dir: PathBuf = s.or(a.out_dir, "out-dir", PathBuf::from("."))?;
    let treebank = s.get(a.treebank, "treebank")?.unwrap_or_else(|| stem(&test_path));
    let single_root = s.flag_bool(a.single_root, "single-root", true)?;
    let policy = parse_punct(&s.or(a.punct, "punct", "include".to_string())?)?;
    let speed_config = SpeedConfig {
        runs: s.or(a.runs, "runs", bench::speed::DEFAULT_RUNS)?,
        batch_size: s.or(a.batch_size, "batch-size", bench::speed::DEFAULT_BATCH_SIZE)?,
        pin: s.flag_bool(a.pin, "pin", true)?,
    };

    let model = load_model(&model_path)?;
    let size = size_axis(model.feature_space_bits());
    let base = record_stem(model.paradigm(), &size, &treebank);
    let record_path = s
        .get(a.train_record, "train-record")?
        .unwrap_or_else(|| out_dir.join(format!("{base}.train.json")));
    let record_path = existing(record_path, "training record")?;
    let train: TrainRecord = serde_json::from_str(&fs::read_to_string(&record_path)?).map_err(Error::from)?;

    let gold = read_corpus(&test_path)?;
    let pred = model.parse_corpus(&gold, single_root)?;
    let accuracy = score(&gold, &pred, policy)?;

    let clock = MonotonicClock::default();
    let mut failure = None;
    let speed = measure_speed(
        |batch: &[Sentence]| {
            for sentence in batch {
                if let Err(e) = model.parse(sentence, single_root) {
                    failure.get_or_insert(e);
                }
            }
        },
        &gold,
        speed_config,
        &clock,
    )?;
    if let Some(e) = failure {
        return Err(e.into());
    }

    let record = RunRecord {
        system: model.paradigm(),
        size_axis: size,
        treebank,
        las: accuracy.las_2dp(),
        uas: accuracy.uas_2dp(),
        speed,
        train_energy: train.train_energy,
        train_time_s: train.train_time_s,
    };
    record.validate()?;
    let path = out_dir.join(format!("{base}.json"));
    let mut value = serde_json::to_value(&record).map_err(Error::from)?;
    if let (Some(t), Some(obj)) = (now_unix(timestamps), value.as_object_mut()) {
        obj.insert("generated_unix_s".into(), t.into());
    }
    write_json(&path, &value)?;
    writeln!(
        out,
        "{} {accuracy} speed {:.1} ± {:.1} sent/s\nrecord {}",
        record.id(),
        record.speed.sents_per_sec_mean,
        record.speed.sents_per_sec_std,
        path.display()
    )?;
    Ok(())
}

fn is_record_file(path: &Path) -> bool {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
    name.ends_with(".json") && !name.ends_with(".train.json") && name != bench::report::REPORT_JSON
}

fn cmd_pareto(a: ParetoArgs, s: &Settings, timestamps: bool, out: &mut dyn Write) -> CliResult<()> {
    let inputs = if a.records.is_empty() {
        vec![s.required::<PathBuf>(None, "records")?]
    } else {
        a.records
    };
    let out_dir: PathBuf = s.or(a.out_dir, "out-dir", PathBuf::from("."))?;
    let mut files = Vec::new();
    for path in inputs {
        if path.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(&path)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| is_record_file(p))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(existing(path, "record")?);
        }
    }
    let mut records = Vec::new();
    for f in &files {
        let text = fs::read_to_string(f)?;
        let value: serde_json::Value = serde_json::from_str(&text).map_err(Error::from)?;
        // A file may hold one record or a list of them.
        let parse = |v: serde_json::Value| serde_json::from_value::<RunRecord>(v).map_err(Error::from);
        match value {
            serde_json::Value::Array(items) => {
                for item in items {
                    records.push(parse(item)?);
                }
            }
            other => records.push(parse(other)?),
        }
    }
    if records.is_empty() {
        return Err(CliError::Usage("no run records found".into()));
    }
    let report = build_report(&records, now_unix(timestamps))?;
    let (json, csv) = emit_report(&report, &out_dir)?;
    for (mode, set) in &report.fronts.accuracy_speed {
        writeln!(out, "accuracy-speed front ({mode}):")?;
        for p in &set.overall {
            writeln!(out, "  {}\tspeed {}\tlas {}", p.tag, p.x, p.y)?;
        }
    }
    writeln!(out, "accuracy-energy front:")?;
    for p in &report.fronts.accuracy_energy.overall {
        writeln!(out, "  {}\tjoules {}\tlas {}", p.tag, p.x, p.y)?;
    }
    writeln!(out, "report {}\nrecords {}", json.display(), csv.display())?;
    Ok(())
}

/// Entry point used by the binary: parse `args`, run, return the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match run(cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "depbench: {e}");
            e.exit_code()
        }
    }
}
