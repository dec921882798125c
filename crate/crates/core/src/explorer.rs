//! Design-space exploration: enumerate (cluster, cores, frequency,
//! approximation level) configurations, measure extraction throughput with
//! a heartbeat harness, attach modeled power, and extract 3-D Pareto
//! fronts.
//!
//! Power comes from an analytic per-cluster model (static watts plus a
//! per-core coefficient times frequency cubed) calibrated against published
//! big-cluster anchor points; it stands in for on-board sensors and is
//! independent of the approximation level by construction. Frequency and
//! cluster heterogeneity are emulated on the desk host: measured
//! throughput is scaled linearly by `freq_mhz / reference_freq` and by a
//! declared LITTLE-cluster multiplier. Every sweep result carries that
//! emulation metadata.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use serde::Serialize;

use crate::approximation::{level_to_config, num_windows, ApproxConfig};
use crate::error::{Error, Result};
use crate::evaluation::{approximation_accuracy, Classifier, TruthMode};
use crate::signal_io::{EegRecord, EpochSpec};
use crate::spectral::{features_inner, BandProfile};

/// Statistical floor: a throughput figure from fewer heartbeats than this
/// is meaningless and rejected.
pub const MIN_HEARTBEATS: u64 = 50;

/// DVFS settings of the modeled platform.
pub const FREQUENCIES_MHZ: [u32; 3] = [600, 1000, 1400];

/// Cores per cluster of the modeled platform.
pub const MAX_CORES: u32 = 4;

// ---------------------------------------------------------------------------
// Platform
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cluster {
    Little,
    Big,
}

impl fmt::Display for Cluster {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cluster::Little => write!(f, "LITTLE"),
            Cluster::Big => write!(f, "big"),
        }
    }
}

impl std::str::FromStr for Cluster {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "little" => Ok(Cluster::Little),
            "big" => Ok(Cluster::Big),
            other => Err(Error::domain(format!("unknown cluster {other:?}"))),
        }
    }
}

/// One core-mapping/DVFS configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PlatformConfig {
    cluster: Cluster,
    cores: u32,
    freq_mhz: u32,
}

impl PlatformConfig {
    pub fn new(cluster: Cluster, cores: u32, freq_mhz: u32) -> Result<Self> {
        if !(1..=MAX_CORES).contains(&cores) {
            return Err(Error::domain(format!(
                "core count {cores} outside 1..={MAX_CORES}"
            )));
        }
        if !FREQUENCIES_MHZ.contains(&freq_mhz) {
            return Err(Error::domain(format!(
                "frequency {freq_mhz} MHz not one of {FREQUENCIES_MHZ:?}"
            )));
        }
        Ok(Self {
            cluster,
            cores,
            freq_mhz,
        })
    }

    pub fn cluster(&self) -> Cluster {
        self.cluster
    }

    pub fn cores(&self) -> u32 {
        self.cores
    }

    pub fn freq_mhz(&self) -> u32 {
        self.freq_mhz
    }

    /// The full 2 clusters x 4 cores x 3 frequencies grid, frequency-major,
    /// LITTLE before big within each frequency.
    pub fn default_grid() -> Vec<PlatformConfig> {
        let mut grid = Vec::new();
        for freq in FREQUENCIES_MHZ {
            for cluster in [Cluster::Little, Cluster::Big] {
                for cores in 1..=MAX_CORES {
                    grid.push(PlatformConfig {
                        cluster,
                        cores,
                        freq_mhz: freq,
                    });
                }
            }
        }
        grid
    }
}

// ---------------------------------------------------------------------------
// Power model
// ---------------------------------------------------------------------------

/// Per-cluster power parameters: `static_w + cores * dyn_coeff_w_per_ghz3 *
/// (freq_mhz / 1000)^3` watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClusterPowerParams {
    pub static_w: f64,
    pub dyn_coeff_w_per_ghz3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerModelParams {
    little: ClusterPowerParams,
    big: ClusterPowerParams,
}

impl PowerModelParams {
    pub fn new(little: ClusterPowerParams, big: ClusterPowerParams) -> Result<Self> {
        for (name, p) in [("LITTLE", &little), ("big", &big)] {
            if p.static_w < 0.0 || !p.static_w.is_finite() {
                return Err(Error::domain(format!(
                    "{name} static power must be non-negative, got {}",
                    p.static_w
                )));
            }
            if p.dyn_coeff_w_per_ghz3 <= 0.0 || !p.dyn_coeff_w_per_ghz3.is_finite() {
                return Err(Error::domain(format!(
                    "{name} dynamic coefficient must be positive, got {}",
                    p.dyn_coeff_w_per_ghz3
                )));
            }
        }
        if big.dyn_coeff_w_per_ghz3 <= little.dyn_coeff_w_per_ghz3 {
            return Err(Error::domain(
                "big-cluster dynamic coefficient must exceed the LITTLE one",
            ));
        }
        Ok(Self { little, big })
    }

    pub fn for_cluster(&self, cluster: Cluster) -> &ClusterPowerParams {
        match cluster {
            Cluster::Little => &self.little,
            Cluster::Big => &self.big,
        }
    }

    /// Anchor points the default model is calibrated against. The big-cluster
    /// watt figures follow the published platform's 4-core readings at 600
    /// and 1400 MHz; the LITTLE figures are declared desk-scale constants.
    pub fn default_anchors() -> Vec<(PlatformConfig, f64)> {
        vec![
            (PlatformConfig::new(Cluster::Big, 4, 600).unwrap(), 1.1),
            (PlatformConfig::new(Cluster::Big, 4, 1400).unwrap(), 3.0),
            (PlatformConfig::new(Cluster::Little, 4, 600).unwrap(), 0.12),
            (PlatformConfig::new(Cluster::Little, 4, 1400).unwrap(), 0.58),
        ]
    }

    /// Model calibrated against [`PowerModelParams::default_anchors`].
    pub fn default_calibrated() -> (Self, CalibrationReport) {
        calibrate_power(&Self::default_anchors()).expect("default anchors are well posed")
    }
}

/// Modeled running power of a platform configuration, independent of the
/// approximation level.
pub fn model_power(params: &PowerModelParams, platform: &PlatformConfig) -> f64 {
    let p = params.for_cluster(platform.cluster());
    let f_ghz = f64::from(platform.freq_mhz()) / 1000.0;
    p.static_w + f64::from(platform.cores()) * p.dyn_coeff_w_per_ghz3 * f_ghz.powi(3)
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterCalibration {
    pub cluster: String,
    pub static_w: f64,
    pub dyn_coeff_w_per_ghz3: f64,
    pub residual_rms_w: f64,
    pub residual_max_w: f64,
    pub anchors: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CalibrationReport {
    pub clusters: Vec<ClusterCalibration>,
}

/// Least-squares fit of (static_w, dyn_coeff) per cluster from anchor
/// measurements. Each cluster needs at least two anchors at distinct
/// frequencies, otherwise the system is underdetermined.
type FittedCluster = (ClusterPowerParams, ClusterCalibration);

pub fn calibrate_power(
    anchors: &[(PlatformConfig, f64)],
) -> Result<(PowerModelParams, CalibrationReport)> {
    let mut fitted: BTreeMap<Cluster, FittedCluster> = BTreeMap::new();

    for cluster in [Cluster::Little, Cluster::Big] {
        let points: Vec<(f64, f64)> = anchors
            .iter()
            .filter(|(p, _)| p.cluster() == cluster)
            .map(|(p, watts)| {
                let f_ghz = f64::from(p.freq_mhz()) / 1000.0;
                (f64::from(p.cores()) * f_ghz.powi(3), *watts)
            })
            .collect();
        if points.len() < 2 {
            return Err(Error::domain(format!(
                "underdetermined: {} anchors for cluster {}, need at least 2 at distinct frequencies",
                points.len(),
                cluster
            )));
        }

        // Normal equations for watts = static + coeff * x.
        let n = points.len() as f64;
        let sum_x: f64 = points.iter().map(|(x, _)| x).sum();
        let sum_xx: f64 = points.iter().map(|(x, _)| x * x).sum();
        let sum_y: f64 = points.iter().map(|(_, y)| y).sum();
        let sum_xy: f64 = points.iter().map(|(x, y)| x * y).sum();
        let det = n * sum_xx - sum_x * sum_x;
        if det.abs() <= 1e-12 * n * sum_xx.max(1.0) {
            return Err(Error::domain(format!(
                "underdetermined: cluster {cluster} anchors share a single operating point"
            )));
        }
        let coeff = (n * sum_xy - sum_x * sum_y) / det;
        let static_w = (sum_y - coeff * sum_x) / n;

        let residuals: Vec<f64> = points
            .iter()
            .map(|(x, y)| static_w + coeff * x - y)
            .collect();
        let rms = (residuals.iter().map(|r| r * r).sum::<f64>() / n).sqrt();
        let max = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));

        fitted.insert(
            cluster,
            (
                ClusterPowerParams {
                    static_w,
                    dyn_coeff_w_per_ghz3: coeff,
                },
                ClusterCalibration {
                    cluster: cluster.to_string(),
                    static_w,
                    dyn_coeff_w_per_ghz3: coeff,
                    residual_rms_w: rms,
                    residual_max_w: max,
                    anchors: points.len(),
                },
            ),
        );
    }

    let (little, little_report) = fitted.remove(&Cluster::Little).expect("fitted above");
    let (big, big_report) = fitted.remove(&Cluster::Big).expect("fitted above");
    let params = PowerModelParams::new(little, big)?;
    Ok((
        params,
        CalibrationReport {
            clusters: vec![little_report, big_report],
        },
    ))
}

// ---------------------------------------------------------------------------
// Heartbeat harness
// ---------------------------------------------------------------------------

/// A feature-extraction task over a dataset: the unit of work is one epoch,
/// and completing an epoch's feature vector emits one heartbeat.
#[derive(Debug, Clone)]
pub struct ExtractionWorkload<'a> {
    pub record: &'a EegRecord,
    pub epoch: EpochSpec,
    pub profile: &'a BandProfile,
    pub cfg: ApproxConfig,
}

#[derive(Debug, Clone, Copy)]
pub struct HarnessOptions {
    /// Wall-clock measurement repetitions; the reported rate is their
    /// median. At least 3.
    pub repetitions: usize,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        Self { repetitions: 3 }
    }
}

#[derive(Debug, Clone)]
pub struct HarnessMeasurement {
    /// Median heartbeats per second across repetitions.
    pub hb_per_s: f64,
    pub per_repetition: Vec<f64>,
    /// Heartbeats fired in the slowest repetition.
    pub min_heartbeats: u64,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("rates are finite"));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Measures extraction throughput: cycles over the dataset's epochs,
/// emitting one heartbeat per completed per-epoch feature vector, for
/// `duration_s` of wall-clock time per repetition. Per-segment periodograms
/// run on a worker pool of `workers` threads, emulating the core mapping.
pub fn run_heartbeat_harness(
    workload: &ExtractionWorkload,
    workers: usize,
    duration_s: f64,
    opts: &HarnessOptions,
) -> Result<HarnessMeasurement> {
    if workers < 1 {
        return Err(Error::domain("worker count must be >= 1"));
    }
    if !duration_s.is_finite() || duration_s <= 0.0 {
        return Err(Error::domain("measurement duration must be positive"));
    }
    if opts.repetitions < 3 {
        return Err(Error::domain("throughput needs at least 3 repetitions"));
    }

    let record = workload.record;
    let offsets = workload.epoch.offsets(record.num_samples());
    if offsets.is_empty() {
        return Err(Error::InsufficientData {
            needed: workload.epoch.epoch_length_samples(),
            got: record.num_samples(),
        });
    }
    let epoch_len = workload.epoch.epoch_length_samples();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::domain(format!("worker pool: {e}")))?;

    // The timed loop runs inside the pool: the loop thread takes part in
    // the per-segment joins and the workers stay hot between heartbeats
    // instead of being woken once per call.
    let run_once = |timed: Option<f64>| -> Result<(u64, f64)> {
        pool.install(|| {
            let start = Instant::now();
            let mut heartbeats = 0u64;
            'measure: loop {
                for &offset in &offsets {
                    let slices: Vec<(&str, &[f64])> = record
                        .channels()
                        .iter()
                        .map(|c| (c.name.as_str(), &c.samples[offset..offset + epoch_len]))
                        .collect();
                    features_inner(
                        &slices,
                        record.sample_rate_hz(),
                        workload.profile,
                        &workload.cfg,
                        true,
                    )?;
                    heartbeats += 1;
                    match timed {
                        Some(duration) if start.elapsed().as_secs_f64() >= duration => {
                            break 'measure;
                        }
                        None => break 'measure,
                        _ => {}
                    }
                }
            }
            Ok((heartbeats, start.elapsed().as_secs_f64()))
        })
    };

    // Warm-up: one untimed epoch spins the pool threads up and builds the
    // window/twiddle tables outside the measurement.
    run_once(None)?;

    let mut rates = Vec::with_capacity(opts.repetitions);
    let mut min_heartbeats = u64::MAX;
    for _ in 0..opts.repetitions {
        let (heartbeats, elapsed) = run_once(Some(duration_s))?;
        if heartbeats < MIN_HEARTBEATS {
            return Err(Error::InsufficientMeasurement {
                heartbeats,
                minimum: MIN_HEARTBEATS,
            });
        }
        min_heartbeats = min_heartbeats.min(heartbeats);
        rates.push(heartbeats as f64 / elapsed);
    }

    let hb_per_s = median(&mut rates.clone());
    Ok(HarnessMeasurement {
        hb_per_s,
        per_repetition: rates,
        min_heartbeats,
    })
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

/// One (platform, level) execution outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    platform: PlatformConfig,
    level: u32,
    power_w: f64,
    perf_hb_s: f64,
    accuracy: f64,
    windows_processed: u64,
}

impl SweepRecord {
    pub fn new(
        platform: PlatformConfig,
        level: u32,
        power_w: f64,
        perf_hb_s: f64,
        accuracy: f64,
        windows_processed: u64,
    ) -> Result<Self> {
        if !(power_w > 0.0 && power_w.is_finite()) {
            return Err(Error::domain(format!("power must be positive, got {power_w}")));
        }
        if !(perf_hb_s > 0.0 && perf_hb_s.is_finite()) {
            return Err(Error::domain(format!(
                "performance must be positive, got {perf_hb_s}"
            )));
        }
        if !(0.0..=1.0).contains(&accuracy) {
            return Err(Error::domain(format!(
                "accuracy {accuracy} outside [0, 1]"
            )));
        }
        if windows_processed == 0 {
            return Err(Error::domain("windows_processed must be positive"));
        }
        Ok(Self {
            platform,
            level,
            power_w,
            perf_hb_s,
            accuracy,
            windows_processed,
        })
    }

    pub fn platform(&self) -> &PlatformConfig {
        &self.platform
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn power_w(&self) -> f64 {
        self.power_w
    }

    pub fn perf_hb_s(&self) -> f64 {
        self.perf_hb_s
    }

    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }

    pub fn windows_processed(&self) -> u64 {
        self.windows_processed
    }
}

/// Header of the sweep CSV schema.
pub const SWEEP_CSV_HEADER: &str =
    "cluster,cores,freq_mhz,level,power_w,perf_hb_s,accuracy,windows_processed";

impl SweepRecord {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.platform.cluster(),
            self.platform.cores(),
            self.platform.freq_mhz(),
            self.level,
            self.power_w,
            self.perf_hb_s,
            self.accuracy,
            self.windows_processed
        )
    }

    /// Parses one data row. `row` is the 1-based line number for error
    /// reporting (row 1 is the header).
    pub fn from_csv_row(line: &str, row: usize) -> Result<Self> {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 8 {
            return Err(Error::RaggedRow {
                row,
                expected: 8,
                got: fields.len(),
            });
        }
        fn field<T: std::str::FromStr>(raw: &str, row: usize, col: usize) -> Result<T> {
            raw.parse().map_err(|_| Error::Parse {
                row,
                col,
                detail: format!("bad value {raw:?}"),
            })
        }
        let cluster: Cluster = fields[0].parse().map_err(|_| Error::Parse {
            row,
            col: 1,
            detail: format!("bad cluster {:?}", fields[0]),
        })?;
        let platform = PlatformConfig::new(
            cluster,
            field(fields[1], row, 2)?,
            field(fields[2], row, 3)?,
        )?;
        SweepRecord::new(
            platform,
            field(fields[3], row, 4)?,
            field(fields[4], row, 5)?,
            field(fields[5], row, 6)?,
            field(fields[6], row, 7)?,
            field(fields[7], row, 8)?,
        )
    }
}

/// Serializes records under the declared CSV schema.
pub fn write_sweep_csv(records: &[SweepRecord]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for record in records {
        out.push_str(&record.to_csv_row());
        out.push('\n');
    }
    out
}

/// Parses a sweep CSV, keeping each record's raw line so downstream output
/// can stay byte-identical to its input rows.
pub fn parse_sweep_csv_rows(text: &str) -> Result<Vec<(SweepRecord, String)>> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if idx == 0 {
            if line.trim() != SWEEP_CSV_HEADER {
                return Err(Error::domain(format!(
                    "unexpected sweep CSV header {line:?}"
                )));
            }
            continue;
        }
        let record = SweepRecord::from_csv_row(line, idx + 1)?;
        rows.push((record, line.to_string()));
    }
    Ok(rows)
}

pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRecord>> {
    Ok(parse_sweep_csv_rows(text)?.into_iter().map(|(r, _)| r).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasuredCell {
    pub cores: u32,
    pub level: u32,
    pub hb_per_s: f64,
    pub min_heartbeats: u64,
}

/// Harness metadata attached to every sweep: what was measured on the desk
/// host and which emulation factors produced the derived cells.
#[derive(Debug, Clone, Serialize)]
pub struct SweepMeta {
    pub host_os: String,
    pub host_arch: String,
    pub host_parallelism: usize,
    pub duration_s: f64,
    pub repetitions: usize,
    pub reference_freq_mhz: u32,
    pub little_multiplier: f64,
    pub perf_is_measured: bool,
    pub frequency_emulation: String,
    pub cluster_emulation: String,
    pub measured_cells: Vec<MeasuredCell>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub records: Vec<SweepRecord>,
    pub meta: SweepMeta,
}

#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    /// Wall-clock seconds per measurement repetition.
    pub duration_s: f64,
    /// Repetitions per measured cell (median taken), at least 3.
    pub repetitions: usize,
    /// Throughput multiplier emulating a LITTLE core relative to a big one.
    pub little_multiplier: f64,
    /// Frequency whose measurement is taken as the host baseline.
    pub reference_freq_mhz: u32,
    /// What approximate predictions are scored against.
    pub truth: TruthMode,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            duration_s: 0.4,
            repetitions: 3,
            little_multiplier: 0.35,
            reference_freq_mhz: 1400,
            truth: TruthMode::BaselinePredictions,
        }
    }
}

/// Runs the characterization sweep: one record per (platform, level) pair.
///
/// Throughput is measured once per distinct (cores, level) cell with the
/// worker pool sized to the core count; per-platform figures are derived by
/// the linear frequency scaling and the LITTLE multiplier declared in the
/// returned metadata. Power is modeled and level-invariant; accuracy
/// depends only on the level. Measurements run sequentially so they do not
/// contaminate each other's timing.
#[allow(clippy::too_many_arguments)]
pub fn run_sweep(
    dataset: &EegRecord,
    epoch: &EpochSpec,
    profile: &BandProfile,
    clf: &Classifier,
    platforms: &[PlatformConfig],
    levels: &[u32],
    params: &PowerModelParams,
    opts: &SweepOptions,
) -> Result<SweepResult> {
    if platforms.is_empty() || levels.is_empty() {
        return Err(Error::domain("sweep needs at least one platform and one level"));
    }
    if !opts.little_multiplier.is_finite() || opts.little_multiplier <= 0.0 {
        return Err(Error::domain("LITTLE multiplier must be positive"));
    }
    if !FREQUENCIES_MHZ.contains(&opts.reference_freq_mhz) {
        return Err(Error::domain(format!(
            "reference frequency {} MHz not one of {FREQUENCIES_MHZ:?}",
            opts.reference_freq_mhz
        )));
    }

    let baseline = level_to_config(0)?;
    let epochs = epoch.num_epochs(dataset.num_samples());
    let channels = dataset.num_channels();

    // Per-level quantities: accuracy against the baseline and deterministic
    // window counts.
    let mut level_accuracy = BTreeMap::new();
    let mut level_windows = BTreeMap::new();
    for &level in levels {
        let cfg = level_to_config(level)?;
        let acc = approximation_accuracy(dataset, epoch, profile, clf, &cfg, &baseline, opts.truth)?;
        let per_epoch = num_windows(
            epoch.epoch_length_samples(),
            cfg.fft_length(),
            cfg.overlap_fraction(),
        )?;
        level_accuracy.insert(level, acc);
        level_windows.insert(level, (epochs * channels * per_epoch) as u64);
    }

    // Measured cells: distinct core counts x levels, sequentially.
    let mut core_counts: Vec<u32> = platforms.iter().map(|p| p.cores()).collect();
    core_counts.sort_unstable();
    core_counts.dedup();
    let harness_opts = HarnessOptions {
        repetitions: opts.repetitions,
    };
    let mut base_rate = BTreeMap::new();
    let mut measured_cells = Vec::new();
    for &cores in &core_counts {
        for &level in levels {
            let workload = ExtractionWorkload {
                record: dataset,
                epoch: *epoch,
                profile,
                cfg: level_to_config(level)?,
            };
            let m = run_heartbeat_harness(&workload, cores as usize, opts.duration_s, &harness_opts)?;
            measured_cells.push(MeasuredCell {
                cores,
                level,
                hb_per_s: m.hb_per_s,
                min_heartbeats: m.min_heartbeats,
            });
            base_rate.insert((cores, level), m.hb_per_s);
        }
    }

    let mut records = Vec::with_capacity(platforms.len() * levels.len());
    for platform in platforms {
        for &level in levels {
            let base = base_rate[&(platform.cores(), level)];
            let freq_scale = f64::from(platform.freq_mhz()) / f64::from(opts.reference_freq_mhz);
            let cluster_scale = match platform.cluster() {
                Cluster::Little => opts.little_multiplier,
                Cluster::Big => 1.0,
            };
            records.push(SweepRecord::new(
                *platform,
                level,
                model_power(params, platform),
                base * freq_scale * cluster_scale,
                level_accuracy[&level],
                level_windows[&level],
            )?);
        }
    }

    let meta = SweepMeta {
        host_os: std::env::consts::OS.to_string(),
        host_arch: std::env::consts::ARCH.to_string(),
        host_parallelism: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        duration_s: opts.duration_s,
        repetitions: opts.repetitions,
        reference_freq_mhz: opts.reference_freq_mhz,
        little_multiplier: opts.little_multiplier,
        perf_is_measured: true,
        frequency_emulation: format!(
            "perf_hb_s scaled linearly by freq_mhz/{} (no DVFS control on the desk host)",
            opts.reference_freq_mhz
        ),
        cluster_emulation: format!(
            "LITTLE throughput emulated as {} x big on a homogeneous host",
            opts.little_multiplier
        ),
        measured_cells,
    };

    Ok(SweepResult { records, meta })
}

// ---------------------------------------------------------------------------
// Pareto front
// ---------------------------------------------------------------------------

/// Weak dominance on minimized objectives: no coordinate worse, at least
/// one strictly better.
fn dominates_min(a: &[f64; 3], b: &[f64; 3]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

/// Indices of non-dominated points, maintained as an incremental archive:
/// each candidate is checked against the current front, and front members
/// it dominates are evicted.
fn non_dominated_indices(objectives: &[[f64; 3]]) -> Vec<usize> {
    let mut archive: Vec<usize> = Vec::new();
    'candidates: for (idx, obj) in objectives.iter().enumerate() {
        for &member in &archive {
            if dominates_min(&objectives[member], obj) {
                continue 'candidates;
            }
        }
        archive.retain(|&member| !dominates_min(obj, &objectives[member]));
        archive.push(idx);
    }
    archive
}

/// Indices (in input order) of the non-dominated records under
/// (power down, performance up, accuracy up).
pub fn pareto_front_indices(records: &[SweepRecord]) -> Result<Vec<usize>> {
    if records.is_empty() {
        return Err(Error::domain("cannot take the Pareto front of zero records"));
    }
    let objectives: Vec<[f64; 3]> = records
        .iter()
        .map(|r| [r.power_w(), -r.perf_hb_s(), -r.accuracy()])
        .collect();
    let mut indices = non_dominated_indices(&objectives);
    indices.sort_unstable();
    Ok(indices)
}

/// The non-dominated subset of records under (power down, performance up,
/// accuracy up), in their original order. Duplicate points all survive.
pub fn pareto_front(records: &[SweepRecord]) -> Result<Vec<SweepRecord>> {
    let indices = pareto_front_indices(records)?;
    Ok(indices.into_iter().map(|i| records[i].clone()).collect())
}
