//! Ingestion of multi-channel sampled signals from columnar CSV, channel
//! selection, and seeded synthetic signal generation.
//!
//! The CSV format is UTF-8, comma-separated with a `.` decimal point, a
//! mandatory header row of channel names, and an optional trailing `label`
//! column of integers. One row is one sample instant. Amplitudes are
//! nominally microvolts but treated as unitless reals throughout.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// One named signal channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub name: String,
    pub samples: Vec<f64>,
}

/// Epoching geometry: fixed-length slices carrying one classification
/// decision each, advanced by `stride_samples`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpochSpec {
    epoch_length_samples: usize,
    stride_samples: usize,
}

impl EpochSpec {
    pub fn new(epoch_length_samples: usize, stride_samples: usize) -> Result<Self> {
        if epoch_length_samples == 0 || stride_samples == 0 {
            return Err(Error::domain("epoch length and stride must be >= 1"));
        }
        if stride_samples > epoch_length_samples {
            return Err(Error::domain(format!(
                "stride {stride_samples} exceeds epoch length {epoch_length_samples}"
            )));
        }
        Ok(Self {
            epoch_length_samples,
            stride_samples,
        })
    }

    /// Non-overlapping epochs: stride equal to the epoch length.
    pub fn non_overlapping(epoch_length_samples: usize) -> Result<Self> {
        Self::new(epoch_length_samples, epoch_length_samples)
    }

    pub fn epoch_length_samples(&self) -> usize {
        self.epoch_length_samples
    }

    pub fn stride_samples(&self) -> usize {
        self.stride_samples
    }

    pub fn is_non_overlapping(&self) -> bool {
        self.stride_samples == self.epoch_length_samples
    }

    /// Start offsets of all complete epochs in a signal of `n` samples.
    pub fn offsets(&self, n: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut offset = 0;
        while offset + self.epoch_length_samples <= n {
            out.push(offset);
            offset += self.stride_samples;
        }
        out
    }

    pub fn num_epochs(&self, n: usize) -> usize {
        if n < self.epoch_length_samples {
            0
        } else {
            (n - self.epoch_length_samples) / self.stride_samples + 1
        }
    }
}

/// A multi-channel sampled signal with an optional per-epoch label track.
#[derive(Debug, Clone, PartialEq)]
pub struct EegRecord {
    channels: Vec<Channel>,
    sample_rate_hz: f64,
    /// Per-epoch class labels together with the epoch length (in samples)
    /// they were collapsed over.
    labels: Option<(Vec<i64>, usize)>,
}

impl EegRecord {
    pub fn new(channels: Vec<Channel>, sample_rate_hz: f64) -> Result<Self> {
        if sample_rate_hz <= 0.0 || !sample_rate_hz.is_finite() {
            return Err(Error::domain(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        if channels.is_empty() {
            return Err(Error::EmptyInput);
        }
        let n = channels[0].samples.len();
        if channels.iter().any(|c| c.samples.len() != n) {
            return Err(Error::domain("channels differ in sample count"));
        }
        Ok(Self {
            channels,
            sample_rate_hz,
            labels: None,
        })
    }

    /// Attaches a per-epoch label track. The label count must equal
    /// `floor(sample_count / epoch_length)`.
    pub fn with_labels(mut self, labels: Vec<i64>, epoch_length: usize) -> Result<Self> {
        if epoch_length == 0 {
            return Err(Error::domain("label epoch length must be >= 1"));
        }
        let expected = self.num_samples() / epoch_length;
        if labels.len() != expected {
            return Err(Error::domain(format!(
                "label count {} does not match {} epochs of {} samples",
                labels.len(),
                expected,
                epoch_length
            )));
        }
        self.labels = Some((labels, epoch_length));
        Ok(self)
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn channel_names(&self) -> Vec<&str> {
        self.channels.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn num_samples(&self) -> usize {
        self.channels[0].samples.len()
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_ref().map(|(l, _)| l.as_slice())
    }

    pub fn label_epoch_length(&self) -> Option<usize> {
        self.labels.as_ref().map(|(_, e)| *e)
    }

    pub fn duration_s(&self) -> f64 {
        self.num_samples() as f64 / self.sample_rate_hz
    }
}

/// Loads a CSV recording. Rows with a trailing `label` column populate the
/// per-epoch label track by majority vote within each epoch (ties break
/// toward the smallest label).
pub fn load_csv(path: impl AsRef<Path>, sample_rate_hz: f64, epoch: &EpochSpec) -> Result<EegRecord> {
    let text = std::fs::read_to_string(path)?;
    parse_csv(&text, sample_rate_hz, epoch)
}

pub fn parse_csv(text: &str, sample_rate_hz: f64, epoch: &EpochSpec) -> Result<EegRecord> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());

    let (_, header) = lines.next().ok_or(Error::EmptyInput)?;
    let names: Vec<&str> = header.split(',').map(str::trim).collect();
    let has_labels = names.last().is_some_and(|n| n.eq_ignore_ascii_case("label"));
    let n_signal = if has_labels { names.len() - 1 } else { names.len() };
    if n_signal == 0 || names.iter().take(n_signal).any(|n| n.is_empty()) {
        return Err(Error::domain("header must name at least one channel"));
    }

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); n_signal];
    let mut row_labels: Vec<i64> = Vec::new();

    for (line_idx, line) in lines {
        let row = line_idx + 1; // 1-based, header is row 1
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != names.len() {
            return Err(Error::RaggedRow {
                row,
                expected: names.len(),
                got: cells.len(),
            });
        }
        for (i, cell) in cells.iter().take(n_signal).enumerate() {
            let value: f64 = cell.parse().map_err(|_| Error::Parse {
                row,
                col: i + 1,
                detail: format!("expected a number, got {cell:?}"),
            })?;
            columns[i].push(value);
        }
        if has_labels {
            let cell = cells[names.len() - 1];
            let label: i64 = cell.parse().map_err(|_| Error::Parse {
                row,
                col: names.len(),
                detail: format!("expected an integer label, got {cell:?}"),
            })?;
            row_labels.push(label);
        }
    }

    if columns[0].is_empty() {
        return Err(Error::EmptyInput);
    }

    let channels = names
        .iter()
        .take(n_signal)
        .zip(columns)
        .map(|(name, samples)| Channel {
            name: (*name).to_string(),
            samples,
        })
        .collect();

    let record = EegRecord::new(channels, sample_rate_hz)?;
    if has_labels {
        let epoch_len = epoch.epoch_length_samples();
        let labels = collapse_labels(&row_labels, epoch_len);
        record.with_labels(labels, epoch_len)
    } else {
        Ok(record)
    }
}

/// Majority vote over the per-sample labels of each complete epoch.
fn collapse_labels(row_labels: &[i64], epoch_length: usize) -> Vec<i64> {
    row_labels
        .chunks_exact(epoch_length)
        .map(|chunk| {
            let mut counts: Vec<(i64, usize)> = Vec::new();
            for &label in chunk {
                match counts.iter_mut().find(|(l, _)| *l == label) {
                    Some((_, c)) => *c += 1,
                    None => counts.push((label, 1)),
                }
            }
            counts.sort_by_key(|&(l, _)| l);
            let top = counts.iter().map(|&(_, c)| c).max().expect("non-empty chunk");
            counts
                .iter()
                .find(|&&(_, c)| c == top)
                .map(|&(l, _)| l)
                .expect("non-empty chunk")
        })
        .collect()
}

/// Returns a record containing only the named channels, in the requested
/// order. Labels are preserved.
pub fn select_channels(rec: &EegRecord, names: &[&str]) -> Result<EegRecord> {
    let mut channels = Vec::with_capacity(names.len());
    for name in names {
        let channel = rec
            .channels()
            .iter()
            .find(|c| c.name == *name)
            .ok_or_else(|| Error::UnknownChannel((*name).to_string()))?;
        channels.push(channel.clone());
    }
    let record = EegRecord::new(channels, rec.sample_rate_hz())?;
    match &rec.labels {
        Some((labels, epoch_len)) => record.with_labels(labels.clone(), *epoch_len),
        None => Ok(record),
    }
}

/// Generates a single-channel signal: the sum of the requested
/// `(freq_hz, amplitude)` sinusoids plus seeded Gaussian noise of the given
/// RMS. Deterministic for a fixed seed.
pub fn synth_signal(
    bands: &[(f64, f64)],
    duration_s: f64,
    sample_rate_hz: f64,
    noise_rms: f64,
    seed: u64,
) -> Result<EegRecord> {
    if duration_s <= 0.0 {
        return Err(Error::domain("duration must be positive"));
    }
    if sample_rate_hz <= 0.0 {
        return Err(Error::domain("sample rate must be positive"));
    }
    let nyquist = sample_rate_hz / 2.0;
    for &(freq, _) in bands {
        if freq >= nyquist {
            return Err(Error::Aliasing {
                freq_hz: freq,
                nyquist_hz: nyquist,
            });
        }
    }
    if noise_rms < 0.0 {
        return Err(Error::domain("noise RMS must be non-negative"));
    }

    let n = (duration_s * sample_rate_hz).round() as usize;
    let samples = synth_samples(bands, n, sample_rate_hz, noise_rms, 0.0, seed);
    EegRecord::new(
        vec![Channel {
            name: "synth".to_string(),
            samples,
        }],
        sample_rate_hz,
    )
}

fn synth_samples(
    bands: &[(f64, f64)],
    n: usize,
    sample_rate_hz: f64,
    noise_rms: f64,
    phase: f64,
    seed: u64,
) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    (0..n)
        .map(|t| {
            let tone: f64 = bands
                .iter()
                .map(|&(freq, amp)| {
                    amp * (2.0 * std::f64::consts::PI * freq * t as f64 / sample_rate_hz + phase)
                        .sin()
                })
                .sum();
            let noise = if noise_rms > 0.0 {
                noise_rms * normal.sample(&mut rng)
            } else {
                0.0
            };
            tone + noise
        })
        .collect()
}

/// Generates a labeled multi-channel dataset for desk-scale evaluation:
/// each epoch alternates between the two classes' tone sets, with a
/// per-epoch random phase and seeded Gaussian noise. Labels are attached as
/// a non-overlapping track of `epoch_length` samples.
#[allow(clippy::too_many_arguments)]
pub fn synth_labeled(
    class_bands: &[Vec<(f64, f64)>; 2],
    epochs: usize,
    epoch_length: usize,
    channels: usize,
    sample_rate_hz: f64,
    noise_rms: f64,
    seed: u64,
) -> Result<EegRecord> {
    if epochs == 0 || epoch_length == 0 || channels == 0 {
        return Err(Error::domain("epochs, epoch length and channels must be >= 1"));
    }
    let nyquist = sample_rate_hz / 2.0;
    for bands in class_bands {
        for &(freq, _) in bands {
            if freq >= nyquist {
                return Err(Error::Aliasing {
                    freq_hz: freq,
                    nyquist_hz: nyquist,
                });
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<i64> = (0..epochs).map(|e| (e % 2) as i64).collect();

    let mut chans = Vec::with_capacity(channels);
    for ch in 0..channels {
        let mut samples = Vec::with_capacity(epochs * epoch_length);
        for &label in &labels {
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            let sub_seed = rng.gen::<u64>();
            samples.extend(synth_samples(
                &class_bands[label as usize],
                epoch_length,
                sample_rate_hz,
                noise_rms,
                phase,
                sub_seed,
            ));
        }
        chans.push(Channel {
            name: format!("ch{ch}"),
            samples,
        });
    }
    EegRecord::new(chans, sample_rate_hz)?.with_labels(labels, epoch_length)
}
