//! Approximation knobs for the Welch pipeline: window-overlap reduction,
//! FFT-length scaling, and loop perforation, plus the discrete level ladder
//! and the segmentation plan consumed by the PSD estimator.
//!
//! The ladder varies only the overlap knob: level 0 is the accurate 50%
//! overlap and each level drops the overlap by 10 percentage points down to
//! level 5 (no overlap). The FFT-length and perforation knobs stay available
//! through explicit [`ApproxConfig`] construction.

use crate::error::{Error, Result};

/// FFT lengths accepted by [`ApproxConfig`].
pub const FFT_LENGTHS: [usize; 4] = [256, 512, 1024, 2048];

/// Default FFT length of the accurate pipeline.
pub const DEFAULT_FFT_LENGTH: usize = 1024;

/// Number of discrete approximation levels above the accurate baseline.
pub const MAX_LEVEL: u32 = 5;

/// The three approximation knobs.
///
/// `perforation_stride` of 1 means no perforation; a stride of `k >= 2`
/// zeroes every k-th sample of each segment before windowing, modeling the
/// skipped multiply-accumulate work of a perforated loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxConfig {
    overlap_fraction: f64,
    fft_length: usize,
    perforation_stride: usize,
}

impl ApproxConfig {
    pub fn new(overlap_fraction: f64, fft_length: usize, perforation_stride: usize) -> Result<Self> {
        if !(0.0..=0.5).contains(&overlap_fraction) {
            return Err(Error::domain(format!(
                "overlap_fraction {overlap_fraction} outside [0, 0.5]"
            )));
        }
        if !FFT_LENGTHS.contains(&fft_length) {
            return Err(Error::domain(format!(
                "fft_length {fft_length} not one of {FFT_LENGTHS:?}"
            )));
        }
        if perforation_stride < 1 {
            return Err(Error::domain("perforation_stride must be >= 1"));
        }
        Ok(Self {
            overlap_fraction,
            fft_length,
            perforation_stride,
        })
    }

    pub fn overlap_fraction(&self) -> f64 {
        self.overlap_fraction
    }

    pub fn fft_length(&self) -> usize {
        self.fft_length
    }

    pub fn perforation_stride(&self) -> usize {
        self.perforation_stride
    }
}

impl Default for ApproxConfig {
    /// The accurate configuration: 50% overlap, 1024-point FFT, no perforation.
    fn default() -> Self {
        Self {
            overlap_fraction: 0.5,
            fft_length: DEFAULT_FFT_LENGTH,
            perforation_stride: 1,
        }
    }
}

/// Maps a discrete approximation level to its configuration.
///
/// Level 0 is the accurate baseline (50% overlap); every level reduces the
/// overlap by 10 percentage points, so level 5 has none. Only the overlap
/// knob varies along the ladder.
///
/// ```
/// use wosa_core::level_to_config;
///
/// assert_eq!(level_to_config(0).unwrap().overlap_fraction(), 0.5);
/// assert_eq!(level_to_config(5).unwrap().overlap_fraction(), 0.0);
/// assert!(level_to_config(6).is_err());
/// ```
pub fn level_to_config(level: u32) -> Result<ApproxConfig> {
    if level > MAX_LEVEL {
        return Err(Error::domain(format!(
            "approximation level {level} outside 0..={MAX_LEVEL}"
        )));
    }
    // (5 - level) / 10 lands exactly on 0.5, 0.4, ... 0.0.
    ApproxConfig::new(f64::from(MAX_LEVEL - level) / 10.0, DEFAULT_FFT_LENGTH, 1)
}

/// Segment start offsets for one Welch pass over a signal.
///
/// Offsets are strictly increasing, start at 0, end at `N - W`, and their
/// windows jointly cover every sample of the signal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentPlan {
    offsets: Vec<usize>,
    segment_length: usize,
}

impl SegmentPlan {
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn segment_length(&self) -> usize {
        self.segment_length
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }
}

fn hop_samples(segment_length: usize, overlap_fraction: f64) -> usize {
    (segment_length as f64 * (1.0 - overlap_fraction)).round() as usize
}

/// Plans the segment offsets covering a signal of `signal_length` samples
/// with windows of `segment_length` samples at the given overlap.
///
/// The nominal hop is `round(W * (1 - o))`; offsets advance by it while a
/// full window still fits, and a final end-aligned segment at `N - W` is
/// appended whenever the nominal stepping stops short, so no trailing
/// samples are dropped.
pub fn segment_plan(
    signal_length: usize,
    segment_length: usize,
    overlap_fraction: f64,
) -> Result<SegmentPlan> {
    if !(0.0..=0.5).contains(&overlap_fraction) {
        return Err(Error::domain(format!(
            "overlap_fraction {overlap_fraction} outside [0, 0.5]"
        )));
    }
    if segment_length == 0 {
        return Err(Error::domain("segment_length must be >= 1"));
    }
    if signal_length < segment_length {
        return Err(Error::InsufficientData {
            needed: segment_length,
            got: signal_length,
        });
    }

    let hop = hop_samples(segment_length, overlap_fraction);
    let last = signal_length - segment_length;
    let mut offsets = Vec::new();
    let mut offset = 0;
    loop {
        offsets.push(offset);
        if offset + hop > last {
            break;
        }
        offset += hop;
    }
    if *offsets.last().expect("at least one offset") != last {
        offsets.push(last);
    }
    Ok(SegmentPlan {
        offsets,
        segment_length,
    })
}

/// Closed form for the size of [`segment_plan`]: `ceil((N - W) / hop) + 1`
/// with the same rounded integer hop, so the two always agree.
pub fn num_windows(signal_length: usize, segment_length: usize, overlap_fraction: f64) -> Result<usize> {
    if !(0.0..=0.5).contains(&overlap_fraction) {
        return Err(Error::domain(format!(
            "overlap_fraction {overlap_fraction} outside [0, 0.5]"
        )));
    }
    if segment_length == 0 {
        return Err(Error::domain("segment_length must be >= 1"));
    }
    if signal_length < segment_length {
        return Err(Error::domain(format!(
            "signal of {signal_length} samples holds no window of {segment_length}"
        )));
    }
    let span = signal_length - segment_length;
    if span == 0 {
        return Ok(1);
    }
    let hop = hop_samples(segment_length, overlap_fraction);
    Ok(span.div_ceil(hop) + 1)
}

/// Loop perforation on a raw segment: stride 1 is the identity, stride
/// `k >= 2` zeroes indices `i` with `i % k == k - 1`. The segment length is
/// unchanged so FFT bin frequencies stay fixed.
pub fn apply_perforation(segment: &[f64], stride: usize) -> Result<Vec<f64>> {
    if stride < 1 {
        return Err(Error::domain("perforation stride must be >= 1"));
    }
    let mut out = segment.to_vec();
    if stride >= 2 {
        for value in out.iter_mut().skip(stride - 1).step_by(stride) {
            *value = 0.0;
        }
    }
    Ok(out)
}
