//! Implementations of the four subcommands.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::Args;
use serde_json::json;

use wosa_core::approximation::{level_to_config, ApproxConfig};
use wosa_core::error::Error as CoreError;
use wosa_core::evaluation::{train_nearest_centroid, Classifier, TruthMode};
use wosa_core::explorer::{
    calibrate_power, pareto_front_indices, parse_sweep_csv_rows, run_sweep, write_sweep_csv,
    Cluster, PlatformConfig, PowerModelParams, SweepOptions, SweepRecord, SWEEP_CSV_HEADER,
};
use wosa_core::signal_io::{load_csv, synth_labeled, EegRecord, EpochSpec};
use wosa_core::spectral::{extract_features_per_epoch, Application, BandProfile};

use crate::manifest::{digest_content, digest_file, FileDigest, RunManifest};

/// Exit codes: 2 for usage/input errors, 3 for measurement errors.
#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        let code = match err {
            CoreError::InsufficientMeasurement { .. } => 3,
            _ => 2,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        Self {
            code: 2,
            message: err.to_string(),
        }
    }
}

fn write_output(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn resolve_profile(spec: &str) -> Result<BandProfile, CliError> {
    if let Ok(app) = spec.parse::<Application>() {
        return Ok(BandProfile::for_application(app)?);
    }
    let path = Path::new(spec);
    if path.exists() {
        return Ok(BandProfile::from_file(path)?);
    }
    Err(CliError::usage(format!(
        "--profile {spec:?} is neither seizure/sleep/stress nor an existing profile file"
    )))
}

// ---------------------------------------------------------------------------
// extract
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct ApproxFlags {
    /// Approximation level on the overlap ladder (0 = accurate .. 5).
    #[arg(long, value_parser = clap::value_parser!(u32).range(0..=5),
          conflicts_with_all = ["overlap", "fft_len", "perforation_stride"])]
    pub level: Option<u32>,

    /// Window overlap fraction in [0, 0.5] (expert knob).
    #[arg(long)]
    pub overlap: Option<f64>,

    /// FFT length: one of 256, 512, 1024, 2048 (expert knob).
    #[arg(long)]
    pub fft_len: Option<usize>,

    /// Perforation stride; 1 disables, k zeroes every k-th sample (expert knob).
    #[arg(long)]
    pub perforation_stride: Option<usize>,
}

impl ApproxFlags {
    fn resolve(&self) -> Result<ApproxConfig, CliError> {
        if let Some(level) = self.level {
            return Ok(level_to_config(level)?);
        }
        if self.overlap.is_none() && self.fft_len.is_none() && self.perforation_stride.is_none() {
            return Ok(level_to_config(0)?);
        }
        Ok(ApproxConfig::new(
            self.overlap.unwrap_or(0.5),
            self.fft_len.unwrap_or(1024),
            self.perforation_stride.unwrap_or(1),
        )?)
    }
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Input recording: CSV with a header of channel names and an optional
    /// trailing `label` column.
    #[arg(long)]
    pub input: PathBuf,

    /// Sample rate of the recording in Hz.
    #[arg(long)]
    pub sample_rate: f64,

    /// Epoch length in samples (one feature vector per epoch).
    #[arg(long)]
    pub epoch_len: usize,

    /// Epoch stride in samples; defaults to the epoch length.
    #[arg(long)]
    pub epoch_stride: Option<usize>,

    /// Band profile: seizure, sleep, stress, or a profile file path.
    #[arg(long, default_value = "seizure")]
    pub profile: String,

    #[command(flatten)]
    pub approx: ApproxFlags,

    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn extract(args: &ExtractArgs) -> Result<(), CliError> {
    let epoch = EpochSpec::new(args.epoch_len, args.epoch_stride.unwrap_or(args.epoch_len))?;
    let profile = resolve_profile(&args.profile)?;
    let cfg = args.approx.resolve()?;
    let record = load_csv(&args.input, args.sample_rate, &epoch)?;
    let features = extract_features_per_epoch(&record, &epoch, &profile, &cfg)?;

    let mut out = String::from("epoch,channel,delta,theta,alpha,beta,gamma\n");
    for (epoch_idx, fv) in features.iter().enumerate() {
        for (ch_idx, name) in fv.channel_names().iter().enumerate() {
            let bands = fv.channel_bands(ch_idx);
            out.push_str(&format!(
                "{epoch_idx},{name},{},{},{},{},{}\n",
                bands[0], bands[1], bands[2], bands[3], bands[4]
            ));
        }
    }
    write_output(args.output.as_deref(), &out)
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Input recording CSV (needs a `label` column unless
    /// --external-predictions is given).
    #[arg(long, conflicts_with = "synth", required_unless_present = "synth")]
    pub input: Option<PathBuf>,

    /// Generate a labeled two-class synthetic dataset instead of reading a
    /// file.
    #[arg(long)]
    pub synth: bool,

    /// Seed for synthetic data paths.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Number of synthetic epochs.
    #[arg(long, default_value_t = 24)]
    pub synth_epochs: usize,

    /// Sample rate in Hz (of the input file or the synthetic dataset).
    #[arg(long, default_value_t = 256.0)]
    pub sample_rate: f64,

    /// Epoch length in samples.
    #[arg(long)]
    pub epoch_len: usize,

    /// Epoch stride in samples; defaults to the epoch length.
    #[arg(long)]
    pub epoch_stride: Option<usize>,

    /// Band profile: seizure, sleep, stress, or a profile file path.
    #[arg(long, default_value = "seizure")]
    pub profile: String,

    /// Clusters to sweep.
    #[arg(long, value_delimiter = ',', default_value = "LITTLE,big")]
    pub clusters: Vec<String>,

    /// Core counts to sweep.
    #[arg(long, value_delimiter = ',',
          value_parser = clap::value_parser!(u32).range(1..=4),
          default_values_t = vec![1, 2, 3, 4])]
    pub cores: Vec<u32>,

    /// DVFS frequencies (MHz) to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = vec![600, 1000, 1400])]
    pub freqs: Vec<u32>,

    /// Approximation levels to sweep.
    #[arg(long, value_delimiter = ',',
          value_parser = clap::value_parser!(u32).range(0..=5),
          default_values_t = vec![0, 1, 2, 3, 4, 5])]
    pub levels: Vec<u32>,

    /// Wall-clock seconds per throughput measurement repetition.
    #[arg(long, default_value_t = 0.4)]
    pub duration: f64,

    /// Repetitions per measured cell (median taken), at least 3.
    #[arg(long, default_value_t = 3)]
    pub reps: usize,

    /// Throughput multiplier emulating a LITTLE core relative to a big one.
    #[arg(long, default_value_t = 0.35)]
    pub little_multiplier: f64,

    /// Reference for approximate predictions: `baseline` (level-0
    /// predictions) or `labels` (ground truth).
    #[arg(long, default_value = "baseline")]
    pub truth: String,

    /// Power anchor file (`cluster,cores,freq_mhz,watts` per line)
    /// overriding the built-in calibration.
    #[arg(long)]
    pub power_calibration: Option<PathBuf>,

    /// Pre-computed per-epoch labels (one integer per line) used as an
    /// external classifier instead of training the nearest-centroid model.
    #[arg(long)]
    pub external_predictions: Option<PathBuf>,

    /// Output CSV path.
    #[arg(long)]
    pub output: PathBuf,

    /// Manifest JSON path; defaults to the output path with a
    /// `.manifest.json` extension.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

/// Tones used for the two synthetic classes: theta-band versus beta-band,
/// separable under every built-in profile.
const SYNTH_CLASS_TONES: [(f64, f64); 2] = [(4.0, 1.0), (20.0, 1.0)];
const SYNTH_NOISE_RMS: f64 = 0.3;
const SYNTH_CHANNELS: usize = 2;

fn parse_truth(raw: &str) -> Result<TruthMode, CliError> {
    match raw.to_ascii_lowercase().as_str() {
        "baseline" => Ok(TruthMode::BaselinePredictions),
        "labels" => Ok(TruthMode::Labels),
        other => Err(CliError::usage(format!(
            "--truth must be baseline or labels, got {other:?}"
        ))),
    }
}

fn parse_anchor_csv(text: &str) -> Result<Vec<(PlatformConfig, f64)>, CliError> {
    let mut anchors = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(CliError::usage(format!(
                "anchor line {}: expected cluster,cores,freq_mhz,watts",
                idx + 1
            )));
        }
        let cluster: Cluster = fields[0].parse()?;
        let cores: u32 = fields[1]
            .parse()
            .map_err(|_| CliError::usage(format!("anchor line {}: bad core count", idx + 1)))?;
        let freq: u32 = fields[2]
            .parse()
            .map_err(|_| CliError::usage(format!("anchor line {}: bad frequency", idx + 1)))?;
        let watts: f64 = fields[3]
            .parse()
            .map_err(|_| CliError::usage(format!("anchor line {}: bad watts", idx + 1)))?;
        anchors.push((PlatformConfig::new(cluster, cores, freq)?, watts));
    }
    Ok(anchors)
}

fn parse_predictions(text: &str) -> Result<Vec<i64>, CliError> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.parse::<i64>()
                .map_err(|_| CliError::usage(format!("bad prediction label {l:?}")))
        })
        .collect()
}

fn build_grid(args: &SweepArgs) -> Result<Vec<PlatformConfig>, CliError> {
    let mut clusters = Vec::new();
    for raw in &args.clusters {
        let cluster: Cluster = raw.parse()?;
        if !clusters.contains(&cluster) {
            clusters.push(cluster);
        }
    }
    let mut cores = args.cores.clone();
    cores.dedup();
    let mut freqs = args.freqs.clone();
    freqs.dedup();

    let mut grid = Vec::new();
    for &freq in &freqs {
        for &cluster in &clusters {
            for &core_count in &cores {
                grid.push(PlatformConfig::new(cluster, core_count, freq)?);
            }
        }
    }
    if grid.is_empty() {
        return Err(CliError::usage("empty platform grid"));
    }
    Ok(grid)
}

pub fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    let epoch = EpochSpec::new(args.epoch_len, args.epoch_stride.unwrap_or(args.epoch_len))?;
    let profile = resolve_profile(&args.profile)?;
    let truth = parse_truth(&args.truth)?;
    let platforms = build_grid(args)?;

    let mut input_digests: Vec<FileDigest> = Vec::new();
    let record: EegRecord = if args.synth {
        synth_labeled(
            &[SYNTH_CLASS_TONES[0..1].to_vec(), SYNTH_CLASS_TONES[1..2].to_vec()],
            args.synth_epochs,
            args.epoch_len,
            SYNTH_CHANNELS,
            args.sample_rate,
            SYNTH_NOISE_RMS,
            args.seed,
        )?
    } else {
        let path = args.input.as_ref().expect("clap enforces input xor synth");
        input_digests.push(digest_file(path)?);
        load_csv(path, args.sample_rate, &epoch)?
    };

    let classifier: Classifier = match &args.external_predictions {
        Some(path) => {
            input_digests.push(digest_file(path)?);
            Classifier::External(parse_predictions(&std::fs::read_to_string(path)?)?)
        }
        None => {
            let labels = record.labels().ok_or_else(|| {
                CliError::usage(
                    "dataset has no label column; training the reference classifier needs \
                     labels (or pass --external-predictions)",
                )
            })?;
            let baseline_features =
                extract_features_per_epoch(&record, &epoch, &profile, &level_to_config(0)?)?;
            train_nearest_centroid(&baseline_features, labels)?
        }
    };

    let (params, calibration) = match &args.power_calibration {
        Some(path) => {
            input_digests.push(digest_file(path)?);
            let anchors = parse_anchor_csv(&std::fs::read_to_string(path)?)?;
            calibrate_power(&anchors)?
        }
        None => PowerModelParams::default_calibrated(),
    };

    let opts = SweepOptions {
        duration_s: args.duration,
        repetitions: args.reps,
        little_multiplier: args.little_multiplier,
        reference_freq_mhz: 1400,
        truth,
    };
    let result = run_sweep(
        &record, &epoch, &profile, &classifier, &platforms, &args.levels, &params, &opts,
    )?;

    let csv = write_sweep_csv(&result.records);
    std::fs::write(&args.output, &csv)
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", args.output.display())))?;

    let parameters = json!({
        "input": args.input.as_ref().map(|p| p.display().to_string()),
        "synth": args.synth,
        "seed": args.seed,
        "synth_epochs": args.synth_epochs,
        "sample_rate_hz": args.sample_rate,
        "epoch_len": args.epoch_len,
        "epoch_stride": args.epoch_stride.unwrap_or(args.epoch_len),
        "profile": args.profile,
        "clusters": args.clusters,
        "cores": args.cores,
        "freqs_mhz": args.freqs,
        "levels": args.levels,
        "duration_s": args.duration,
        "repetitions": args.reps,
        "little_multiplier": args.little_multiplier,
        "truth": args.truth,
        "perf_hb_s_column": "measured",
    });
    let manifest = RunManifest::new(
        "sweep",
        parameters,
        input_digests,
        digest_content(&args.output.display().to_string(), &csv),
        result.meta,
        calibration,
    );
    let manifest_path = args
        .manifest
        .clone()
        .unwrap_or_else(|| args.output.with_extension("manifest.json"));
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest).expect("serializable"))
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", manifest_path.display())))?;

    print_sweep_summary(&result.records);
    Ok(())
}

fn print_sweep_summary(records: &[SweepRecord]) {
    let mut power = (f64::INFINITY, f64::NEG_INFINITY);
    let mut perf = (f64::INFINITY, f64::NEG_INFINITY);
    let mut acc = (f64::INFINITY, f64::NEG_INFINITY);
    for r in records {
        power = (power.0.min(r.power_w()), power.1.max(r.power_w()));
        perf = (perf.0.min(r.perf_hb_s()), perf.1.max(r.perf_hb_s()));
        acc = (acc.0.min(r.accuracy()), acc.1.max(r.accuracy()));
    }
    println!("records: {}", records.len());
    println!("power_w:   min {:.4}  max {:.4}", power.0, power.1);
    println!("perf_hb_s: min {:.2}  max {:.2}", perf.0, perf.1);
    println!("accuracy:  min {:.4}  max {:.4}", acc.0, acc.1);
}

// ---------------------------------------------------------------------------
// pareto
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct ParetoArgs {
    /// Sweep CSV to filter.
    #[arg(long)]
    pub input: PathBuf,

    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn pareto(args: &ParetoArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.input)?;
    let rows = parse_sweep_csv_rows(&text)?;
    let records: Vec<SweepRecord> = rows.iter().map(|(r, _)| r.clone()).collect();
    let indices = pareto_front_indices(&records)?;

    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for &i in &indices {
        out.push_str(&rows[i].1);
        out.push('\n');
    }
    write_output(args.output.as_deref(), &out)?;
    eprintln!("pareto front: {} of {} records", indices.len(), records.len());
    Ok(())
}

// ---------------------------------------------------------------------------
// plotdata
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    Power,
    Perf,
    Accuracy,
    Level,
    Cores,
}

impl Axis {
    fn parse(raw: &str) -> Result<Self, CliError> {
        match raw.to_ascii_lowercase().as_str() {
            "power" => Ok(Axis::Power),
            "perf" => Ok(Axis::Perf),
            "accuracy" => Ok(Axis::Accuracy),
            "level" => Ok(Axis::Level),
            "cores" => Ok(Axis::Cores),
            other => Err(CliError::usage(format!(
                "unknown axis {other:?}; expected power, perf, accuracy, level or cores"
            ))),
        }
    }

    fn value(&self, record: &SweepRecord) -> String {
        match self {
            Axis::Power => record.power_w().to_string(),
            Axis::Perf => record.perf_hb_s().to_string(),
            Axis::Accuracy => record.accuracy().to_string(),
            Axis::Level => record.level().to_string(),
            Axis::Cores => record.platform().cores().to_string(),
        }
    }
}

#[derive(Debug, Args)]
pub struct PlotdataArgs {
    /// Sweep CSV to reshape.
    #[arg(long)]
    pub input: PathBuf,

    /// Comma-separated output columns: power, perf, accuracy, level, cores.
    #[arg(long, value_delimiter = ',', required = true)]
    pub axes: Vec<String>,

    /// Output path; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn plotdata(args: &PlotdataArgs) -> Result<(), CliError> {
    let axes = args
        .axes
        .iter()
        .map(|a| Axis::parse(a))
        .collect::<Result<Vec<_>, _>>()?;
    let text = std::fs::read_to_string(&args.input)?;
    let rows = parse_sweep_csv_rows(&text)?;

    // Group rows by platform in first-appearance order; blank lines
    // separate the groups for gnuplot.
    let mut groups: Vec<(PlatformConfig, Vec<&SweepRecord>)> = Vec::new();
    for (record, _) in &rows {
        match groups.iter_mut().find(|(p, _)| p == record.platform()) {
            Some((_, members)) => members.push(record),
            None => groups.push((*record.platform(), vec![record])),
        }
    }

    let mut out = String::new();
    for (idx, (platform, members)) in groups.iter().enumerate() {
        if idx > 0 {
            out.push('\n');
        }
        out.push_str(&format!(
            "# {} cores={} freq_mhz={}\n",
            platform.cluster(),
            platform.cores(),
            platform.freq_mhz()
        ));
        for record in members {
            let line: Vec<String> = axes.iter().map(|a| a.value(record)).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    }
    write_output(args.output.as_deref(), &out)
}
