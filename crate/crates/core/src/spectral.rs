//! Windowed spectral analysis: Bartlett-Hanning window, radix-2 FFT,
//! Welch/WOSA PSD estimation, and per-application band-power feature
//! vectors.
//!
//! Band power is computed in the frequency domain as PSD mass over a band's
//! bins (Parseval-equivalent to the mean square of the band-passed signal),
//! with a half-open [low, high) bin rule so touching band edges never
//! double-count. Periodograms are normalized by `sample_rate * sum(w^2)`
//! and one-sided with interior bins doubled, so integrating `bin_power *
//! bin_width_hz` over the whole spectrum recovers the signal's mean square.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::approximation::{segment_plan, ApproxConfig};
use crate::error::{Error, Result};
use crate::signal_io::{EegRecord, EpochSpec};

// ---------------------------------------------------------------------------
// Window
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowKind {
    BartlettHanning,
}

/// Precomputed window coefficients. Length is a power of two, values lie in
/// [0, 1] and are symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowCoefficients {
    values: Vec<f64>,
    kind: WindowKind,
}

impl WindowCoefficients {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    pub fn sum_squares(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }
}

/// Bartlett-Hanning window:
/// `w[n] = 0.62 - 0.48*|n/(L-1) - 0.5| + 0.38*cos(2*pi*(n/(L-1) - 0.5))`.
///
/// Endpoints are zero and the center reaches 1.
pub fn bartlett_hanning(length: usize) -> Result<WindowCoefficients> {
    if length < 2 || !length.is_power_of_two() {
        return Err(Error::domain(format!(
            "window length must be a power of two >= 2, got {length}"
        )));
    }
    let last = (length - 1) as f64;
    let values = (0..length)
        .map(|n| {
            let u = n as f64 / last - 0.5;
            0.62 - 0.48 * u.abs() + 0.38 * (std::f64::consts::TAU * u).cos()
        })
        .collect();
    Ok(WindowCoefficients {
        values,
        kind: WindowKind::BartlettHanning,
    })
}

// ---------------------------------------------------------------------------
// FFT
// ---------------------------------------------------------------------------

/// Iterative radix-2 FFT with a precomputed twiddle table, reusable across
/// the segments of one Welch pass.
#[derive(Debug, Clone)]
pub struct FftPlan {
    n: usize,
    /// exp(-2*pi*i*k/n) for k in 0..n/2.
    twiddles: Vec<Complex64>,
}

impl FftPlan {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::domain(format!(
                "FFT length must be a power of two, got {n}"
            )));
        }
        let twiddles = (0..n / 2)
            .map(|k| {
                let angle = -std::f64::consts::TAU * k as f64 / n as f64;
                Complex64::new(angle.cos(), angle.sin())
            })
            .collect();
        Ok(Self { n, twiddles })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward_in_place(&self, buffer: &mut [Complex64]) -> Result<()> {
        self.transform(buffer, false)
    }

    /// Inverse transform with 1/N scaling, so it inverts `forward_in_place`.
    pub fn inverse_in_place(&self, buffer: &mut [Complex64]) -> Result<()> {
        self.transform(buffer, true)?;
        let scale = 1.0 / self.n as f64;
        for v in buffer.iter_mut() {
            *v *= scale;
        }
        Ok(())
    }

    fn transform(&self, buffer: &mut [Complex64], inverse: bool) -> Result<()> {
        if buffer.len() != self.n {
            return Err(Error::domain(format!(
                "buffer length {} does not match plan length {}",
                buffer.len(),
                self.n
            )));
        }
        let n = self.n;
        if n == 1 {
            return Ok(());
        }

        // Bit-reversal permutation.
        let mut j = 0usize;
        for i in 0..n - 1 {
            if i < j {
                buffer.swap(i, j);
            }
            let mut bit = n >> 1;
            while bit <= j {
                j -= bit;
                bit >>= 1;
            }
            j += bit;
        }

        let mut size = 2;
        while size <= n {
            let half = size >> 1;
            let step = n / size;
            for start in (0..n).step_by(size) {
                for k in 0..half {
                    let mut tw = self.twiddles[k * step];
                    if inverse {
                        tw = tw.conj();
                    }
                    let u = buffer[start + k];
                    let v = buffer[start + k + half] * tw;
                    buffer[start + k] = u + v;
                    buffer[start + k + half] = u - v;
                }
            }
            size <<= 1;
        }
        Ok(())
    }
}

/// Forward transform `X[k] = sum x[n] * exp(-2*pi*i*n*k/N)`; the inverse
/// applies 1/N scaling so a round trip is the identity.
pub fn fft(buffer: &[Complex64], inverse: bool) -> Result<Vec<Complex64>> {
    let plan = FftPlan::new(buffer.len())?;
    let mut out = buffer.to_vec();
    if inverse {
        plan.inverse_in_place(&mut out)?;
    } else {
        plan.forward_in_place(&mut out)?;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Welch PSD
// ---------------------------------------------------------------------------

/// One-sided Welch PSD estimate: `fft_length/2 + 1` bins of width
/// `sample_rate / fft_length`, averaged over `segments_used` segments.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdEstimate {
    bin_power: Vec<f64>,
    bin_width_hz: f64,
    segments_used: usize,
}

impl PsdEstimate {
    pub fn bin_power(&self) -> &[f64] {
        &self.bin_power
    }

    pub fn bin_width_hz(&self) -> f64 {
        self.bin_width_hz
    }

    pub fn segments_used(&self) -> usize {
        self.segments_used
    }

    pub fn len(&self) -> usize {
        self.bin_power.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bin_power.is_empty()
    }

    pub fn bin_frequency_hz(&self, bin: usize) -> f64 {
        bin as f64 * self.bin_width_hz
    }

    pub fn nyquist_hz(&self) -> f64 {
        self.bin_frequency_hz(self.len() - 1)
    }

    /// Integrated PSD mass over the whole spectrum.
    pub fn total_power(&self) -> f64 {
        self.bin_power.iter().sum::<f64>() * self.bin_width_hz
    }
}

fn one_sided_periodogram(
    plan: &FftPlan,
    window: &[f64],
    norm: f64,
    segment: &[f64],
    perforation_stride: usize,
) -> Vec<f64> {
    thread_local! {
        static SCRATCH: std::cell::RefCell<Vec<Complex64>> = const { std::cell::RefCell::new(Vec::new()) };
    }
    SCRATCH.with(|scratch| {
        let mut buf = scratch.borrow_mut();
        buf.clear();
        // The perforation mask zeroes a sample before windowing; folding it
        // into the windowing multiply is arithmetically identical to
        // masking first (0 * w == 0) and avoids an intermediate copy.
        buf.extend(segment.iter().zip(window).enumerate().map(|(i, (&x, &w))| {
            let x = if perforation_stride >= 2 && i % perforation_stride == perforation_stride - 1 {
                0.0
            } else {
                x
            };
            Complex64::new(x * w, 0.0)
        }));
        plan.forward_in_place(&mut buf).expect("plan length matches");
        let half = buf.len() / 2;
        let mut out = Vec::with_capacity(half + 1);
        out.push(buf[0].norm_sqr() * norm);
        for bin in buf.iter().take(half).skip(1) {
            out.push(2.0 * bin.norm_sqr() * norm);
        }
        out.push(buf[half].norm_sqr() * norm);
        out
    })
}

/// Window coefficients and twiddle tables are pure functions of the FFT
/// length; cache them so per-epoch Welch calls only pay for segment work.
type WelchTables = std::sync::Arc<(WindowCoefficients, FftPlan, f64)>;

fn cached_tables(w: usize) -> Result<WelchTables> {
    use std::collections::HashMap;
    use std::sync::{Arc, Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<HashMap<usize, WelchTables>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(entry) = guard.get(&w) {
        return Ok(entry.clone());
    }
    let window = bartlett_hanning(w)?;
    let plan = FftPlan::new(w)?;
    let sum_squares = window.sum_squares();
    let entry = Arc::new((window, plan, sum_squares));
    guard.insert(w, entry.clone());
    Ok(entry)
}

/// Welch over a batch of signals sharing one configuration. All
/// (signal, segment) periodograms form a single task list, so a pooled
/// caller pays one parallel dispatch per batch; the averages accumulate in
/// segment order per signal either way, which keeps results bit-stable
/// across pool sizes and between the serial and parallel paths.
fn welch_many(
    signals: &[&[f64]],
    cfg: &ApproxConfig,
    sample_rate_hz: f64,
    parallel: bool,
) -> Result<Vec<PsdEstimate>> {
    if sample_rate_hz <= 0.0 || !sample_rate_hz.is_finite() {
        return Err(Error::domain(format!(
            "sample rate must be positive, got {sample_rate_hz}"
        )));
    }
    let w = cfg.fft_length();
    let mut plans = Vec::with_capacity(signals.len());
    for signal in signals {
        if signal.len() < w {
            return Err(Error::InsufficientData {
                needed: w,
                got: signal.len(),
            });
        }
        plans.push(segment_plan(signal.len(), w, cfg.overlap_fraction())?);
    }
    let tables = cached_tables(w)?;
    let (window, fft_plan, sum_squares) = (&tables.0, &tables.1, tables.2);
    let norm = 1.0 / (sample_rate_hz * sum_squares);
    let stride = cfg.perforation_stride();

    let tasks: Vec<(usize, usize)> = plans
        .iter()
        .enumerate()
        .flat_map(|(idx, plan)| plan.offsets().iter().map(move |&offset| (idx, offset)))
        .collect();
    let compute = |&(idx, offset): &(usize, usize)| {
        one_sided_periodogram(fft_plan, window.values(), norm, &signals[idx][offset..offset + w], stride)
    };
    let periodograms: Vec<Vec<f64>> = if parallel {
        tasks.par_iter().map(compute).collect()
    } else {
        tasks.iter().map(compute).collect()
    };

    let mut out = Vec::with_capacity(signals.len());
    let mut cursor = 0;
    for plan in &plans {
        let segments = plan.len();
        let mut bin_power = vec![0.0; w / 2 + 1];
        for periodogram in &periodograms[cursor..cursor + segments] {
            for (acc, value) in bin_power.iter_mut().zip(periodogram) {
                *acc += value;
            }
        }
        cursor += segments;
        for acc in &mut bin_power {
            *acc /= segments as f64;
        }
        out.push(PsdEstimate {
            bin_power,
            bin_width_hz: sample_rate_hz / w as f64,
            segments_used: segments,
        });
    }
    Ok(out)
}

fn welch_impl(
    signal: &[f64],
    cfg: &ApproxConfig,
    sample_rate_hz: f64,
    parallel: bool,
) -> Result<PsdEstimate> {
    Ok(welch_many(&[signal], cfg, sample_rate_hz, parallel)?
        .pop()
        .expect("one estimate per signal"))
}

/// Welch/WOSA PSD of a real signal: segments the signal per the plan,
/// perforates and windows each segment, and averages the one-sided
/// periodograms over all segments.
///
/// ```
/// use wosa_core::{welch_psd, ApproxConfig};
///
/// // 10 Hz tone sampled at 256 Hz: the peak lands in bin 10.
/// let signal: Vec<f64> = (0..1024)
///     .map(|n| (2.0 * std::f64::consts::PI * 10.0 * n as f64 / 256.0).sin())
///     .collect();
/// let cfg = ApproxConfig::new(0.5, 256, 1).unwrap();
/// let psd = welch_psd(&signal, &cfg, 256.0).unwrap();
/// let peak = (0..psd.len()).max_by(|a, b| {
///     psd.bin_power()[*a].total_cmp(&psd.bin_power()[*b])
/// });
/// assert_eq!(peak, Some(10));
/// assert_eq!(psd.segments_used(), 7);
/// ```
pub fn welch_psd(signal: &[f64], cfg: &ApproxConfig, sample_rate_hz: f64) -> Result<PsdEstimate> {
    welch_impl(signal, cfg, sample_rate_hz, false)
}

/// Same as [`welch_psd`] but computes per-segment periodograms on the given
/// worker pool. The result is bit-identical to the sequential path for any
/// pool size.
pub fn welch_psd_on(
    pool: &rayon::ThreadPool,
    signal: &[f64],
    cfg: &ApproxConfig,
    sample_rate_hz: f64,
) -> Result<PsdEstimate> {
    pool.install(|| welch_impl(signal, cfg, sample_rate_hz, true))
}

/// PSD mass over `[low_hz, high_hz)`: the sum of `bin_power` over bins whose
/// center frequency falls in the half-open interval, times the bin width.
/// Bands extending past Nyquist are clipped there (an unbounded `high_hz`
/// covers up to and including the Nyquist bin).
pub fn band_power(psd: &PsdEstimate, low_hz: f64, high_hz: f64) -> Result<f64> {
    if !(low_hz >= 0.0 && low_hz < high_hz) {
        return Err(Error::domain(format!(
            "invalid band [{low_hz}, {high_hz})"
        )));
    }
    let mass: f64 = psd
        .bin_power()
        .iter()
        .enumerate()
        .filter(|(bin, _)| {
            let f = psd.bin_frequency_hz(*bin);
            f >= low_hz && f < high_hz
        })
        .map(|(_, power)| power)
        .sum();
    Ok(mass * psd.bin_width_hz())
}

// ---------------------------------------------------------------------------
// Band profiles
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Application {
    Seizure,
    Sleep,
    Stress,
    Custom,
}

impl std::str::FromStr for Application {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "seizure" => Ok(Application::Seizure),
            "sleep" => Ok(Application::Sleep),
            "stress" => Ok(Application::Stress),
            other => Err(Error::domain(format!("unknown application {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandName {
    Delta,
    Theta,
    Alpha,
    Beta,
    Gamma,
}

impl BandName {
    pub const ALL: [BandName; 5] = [
        BandName::Delta,
        BandName::Theta,
        BandName::Alpha,
        BandName::Beta,
        BandName::Gamma,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BandName::Delta => "delta",
            BandName::Theta => "theta",
            BandName::Alpha => "alpha",
            BandName::Beta => "beta",
            BandName::Gamma => "gamma",
        }
    }
}

impl std::str::FromStr for BandName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "delta" => Ok(BandName::Delta),
            "theta" => Ok(BandName::Theta),
            "alpha" => Ok(BandName::Alpha),
            "beta" => Ok(BandName::Beta),
            "gamma" => Ok(BandName::Gamma),
            other => Err(Error::domain(format!("unknown band name {other:?}"))),
        }
    }
}

/// One frequency band. An open-ended band ("gamma above 30 Hz") carries an
/// infinite `high_hz` and is clipped at Nyquist when applied to a PSD.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub name: BandName,
    pub low_hz: f64,
    pub high_hz: f64,
}

/// An application's five frequency bands, ordered delta through gamma.
#[derive(Debug, Clone, PartialEq)]
pub struct BandProfile {
    application: Application,
    bands: [Band; 5],
}

impl BandProfile {
    pub fn new(application: Application, bands: [Band; 5]) -> Result<Self> {
        for (band, expected) in bands.iter().zip(BandName::ALL) {
            if band.name != expected {
                return Err(Error::domain(format!(
                    "band {} out of order, expected {}",
                    band.name.as_str(),
                    expected.as_str()
                )));
            }
            if !(band.low_hz >= 0.0 && band.low_hz < band.high_hz) {
                return Err(Error::domain(format!(
                    "band {} has invalid range [{}, {})",
                    band.name.as_str(),
                    band.low_hz,
                    band.high_hz
                )));
            }
        }
        if bands.windows(2).any(|pair| pair[1].low_hz < pair[0].low_hz) {
            return Err(Error::domain("band lower edges must be non-decreasing"));
        }
        Ok(Self { application, bands })
    }

    pub fn seizure() -> Self {
        Self::builtin(
            Application::Seizure,
            [(0.5, 2.0), (2.0, 6.0), (6.0, 8.0), (8.0, 30.0), (30.0, f64::INFINITY)],
        )
    }

    pub fn sleep() -> Self {
        Self::builtin(
            Application::Sleep,
            [(0.5, 3.5), (3.5, 7.5), (7.5, 12.0), (12.0, 30.0), (31.0, f64::INFINITY)],
        )
    }

    pub fn stress() -> Self {
        Self::builtin(
            Application::Stress,
            [(0.0, 3.9), (4.0, 7.9), (8.0, 10.0), (14.0, 29.9), (30.0, 47.0)],
        )
    }

    fn builtin(application: Application, edges: [(f64, f64); 5]) -> Self {
        let mut iter = BandName::ALL.into_iter().zip(edges);
        let bands = std::array::from_fn(|_| {
            let (name, (low_hz, high_hz)) = iter.next().expect("five bands");
            Band { name, low_hz, high_hz }
        });
        Self::new(application, bands).expect("builtin profiles are valid")
    }

    pub fn for_application(application: Application) -> Result<Self> {
        match application {
            Application::Seizure => Ok(Self::seizure()),
            Application::Sleep => Ok(Self::sleep()),
            Application::Stress => Ok(Self::stress()),
            Application::Custom => Err(Error::domain("custom profiles come from a file")),
        }
    }

    /// Parses a profile file: one `name,low_hz,high_hz` line per band,
    /// delta through gamma. `inf` marks an open-ended upper edge.
    pub fn parse(text: &str) -> Result<Self> {
        let mut bands = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::domain(format!(
                    "profile line {}: expected name,low_hz,high_hz",
                    idx + 1
                )));
            }
            let name: BandName = fields[0].parse()?;
            let low_hz: f64 = fields[1].parse().map_err(|_| {
                Error::domain(format!("profile line {}: bad low_hz {:?}", idx + 1, fields[1]))
            })?;
            let high_hz: f64 = fields[2].parse().map_err(|_| {
                Error::domain(format!("profile line {}: bad high_hz {:?}", idx + 1, fields[2]))
            })?;
            bands.push(Band { name, low_hz, high_hz });
        }
        let bands: [Band; 5] = bands
            .try_into()
            .map_err(|v: Vec<Band>| Error::domain(format!("profile needs 5 bands, got {}", v.len())))?;
        Self::new(Application::Custom, bands)
    }

    pub fn from_file(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn application(&self) -> Application {
        self.application
    }

    pub fn bands(&self) -> &[Band; 5] {
        &self.bands
    }
}

// ---------------------------------------------------------------------------
// Feature vectors
// ---------------------------------------------------------------------------

/// Per-channel band powers, channel-major: five entries (delta..gamma) per
/// channel in channel order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    entries: Vec<f64>,
    channel_names: Vec<String>,
}

impl FeatureVector {
    pub fn new(entries: Vec<f64>, channel_names: Vec<String>) -> Result<Self> {
        if entries.len() != 5 * channel_names.len() {
            return Err(Error::domain(format!(
                "feature vector of {} entries does not match {} channels",
                entries.len(),
                channel_names.len()
            )));
        }
        if entries.iter().any(|e| *e < 0.0 || !e.is_finite()) {
            return Err(Error::domain("band powers must be finite and non-negative"));
        }
        Ok(Self { entries, channel_names })
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn channel_names(&self) -> &[String] {
        &self.channel_names
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// The five band powers of one channel.
    pub fn channel_bands(&self, channel: usize) -> &[f64] {
        &self.entries[channel * 5..channel * 5 + 5]
    }
}

pub(crate) fn features_for_slices(
    slices: &[(&str, &[f64])],
    sample_rate_hz: f64,
    profile: &BandProfile,
    cfg: &ApproxConfig,
    pool: Option<&rayon::ThreadPool>,
) -> Result<FeatureVector> {
    match pool {
        Some(p) => p.install(|| features_inner(slices, sample_rate_hz, profile, cfg, true)),
        None => features_inner(slices, sample_rate_hz, profile, cfg, false),
    }
}

/// With `parallel` set this must run from inside a rayon pool (the segment
/// `par_iter` binds to the current pool).
pub(crate) fn features_inner(
    slices: &[(&str, &[f64])],
    sample_rate_hz: f64,
    profile: &BandProfile,
    cfg: &ApproxConfig,
    parallel: bool,
) -> Result<FeatureVector> {
    let signals: Vec<&[f64]> = slices.iter().map(|(_, samples)| *samples).collect();
    let psds = welch_many(&signals, cfg, sample_rate_hz, parallel)?;
    let mut entries = Vec::with_capacity(5 * slices.len());
    let mut names = Vec::with_capacity(slices.len());
    for ((name, _), psd) in slices.iter().zip(&psds) {
        for band in profile.bands() {
            entries.push(band_power(psd, band.low_hz, band.high_hz)?);
        }
        names.push((*name).to_string());
    }
    FeatureVector::new(entries, names)
}

/// Band-power feature vector of a whole record (all channels, one Welch
/// pass per channel over the full signal).
pub fn extract_features(
    rec: &EegRecord,
    profile: &BandProfile,
    cfg: &ApproxConfig,
) -> Result<FeatureVector> {
    let slices: Vec<(&str, &[f64])> = rec
        .channels()
        .iter()
        .map(|c| (c.name.as_str(), c.samples.as_slice()))
        .collect();
    features_for_slices(&slices, rec.sample_rate_hz(), profile, cfg, None)
}

/// One feature vector per epoch.
pub fn extract_features_per_epoch(
    rec: &EegRecord,
    epoch: &EpochSpec,
    profile: &BandProfile,
    cfg: &ApproxConfig,
) -> Result<Vec<FeatureVector>> {
    let offsets = epoch.offsets(rec.num_samples());
    if offsets.is_empty() {
        return Err(Error::InsufficientData {
            needed: epoch.epoch_length_samples(),
            got: rec.num_samples(),
        });
    }
    let len = epoch.epoch_length_samples();
    offsets
        .iter()
        .map(|&offset| {
            let slices: Vec<(&str, &[f64])> = rec
                .channels()
                .iter()
                .map(|c| (c.name.as_str(), &c.samples[offset..offset + len]))
                .collect();
            features_for_slices(&slices, rec.sample_rate_hz(), profile, cfg, None)
        })
        .collect()
}
