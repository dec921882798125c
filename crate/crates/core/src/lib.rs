//! Approximate Welch/WOSA band-power feature extraction for EEG-style
//! signals, plus a design-space exploration harness that sweeps
//! (cluster, cores, frequency, approximation level) configurations into
//! power-performance-accuracy records and their 3-D Pareto fronts.
//!
//! The pipeline: [`signal_io`] ingests multi-channel CSV recordings (or
//! synthesizes labeled test signals), [`spectral`] turns epochs into
//! band-power feature vectors through a Bartlett-Hanning windowed Welch
//! estimator, [`approximation`] supplies the tunable knobs (window overlap,
//! FFT length, loop perforation) and the discrete level ladder,
//! [`evaluation`] scores how much a given approximation level degrades the
//! classification outcome, and [`explorer`] measures throughput with a
//! heartbeat harness, attaches modeled power, and extracts Pareto fronts.

pub mod approximation;
pub mod error;
pub mod evaluation;
pub mod explorer;
pub mod signal_io;
pub mod spectral;

pub use approximation::{level_to_config, num_windows, segment_plan, ApproxConfig, SegmentPlan};
pub use error::{Error, Result};
pub use evaluation::{
    accuracy, approximation_accuracy, confusion, feature_deviation, train_nearest_centroid,
    Classifier, ConfusionCounts, TruthMode,
};
pub use explorer::{
    calibrate_power, model_power, pareto_front, run_heartbeat_harness, run_sweep, Cluster,
    ExtractionWorkload, PlatformConfig, PowerModelParams, SweepRecord,
};
pub use signal_io::{load_csv, select_channels, synth_signal, EegRecord, EpochSpec};
pub use spectral::{
    band_power, bartlett_hanning, extract_features, extract_features_per_epoch, fft, welch_psd,
    Application, Band, BandName, BandProfile, FeatureVector, PsdEstimate, WindowCoefficients,
};
