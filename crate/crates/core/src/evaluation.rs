//! Accuracy quantification: binary confusion counting, the
//! (TP+TN)/(TP+TN+FP+FN) accuracy metric, feature-vector deviation against
//! the accurate configuration, and a pluggable classifier with a
//! nearest-centroid reference implementation.
//!
//! By default, "truth" for approximation accuracy is the prediction made
//! under the accurate (level-0) configuration, so the metric measures
//! degradation relative to the accurate case and works on unlabeled data.
//! Ground-truth mode compares against the record's label track instead.

use crate::approximation::ApproxConfig;
use crate::error::{Error, Result};
use crate::signal_io::{EegRecord, EpochSpec};
use crate::spectral::{extract_features_per_epoch, BandProfile, FeatureVector};

// ---------------------------------------------------------------------------
// Confusion and accuracy
// ---------------------------------------------------------------------------

/// Binary confusion cell counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub true_positives: usize,
    pub true_negatives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.true_positives + self.true_negatives + self.false_positives + self.false_negatives
    }
}

/// Counts the four confusion cells of binary prediction sequences.
pub fn confusion(predicted: &[bool], truth: &[bool]) -> Result<ConfusionCounts> {
    if predicted.len() != truth.len() {
        return Err(Error::domain(format!(
            "prediction count {} does not match truth count {}",
            predicted.len(),
            truth.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::domain("cannot build a confusion matrix from zero epochs"));
    }
    let mut counts = ConfusionCounts::default();
    for (&p, &t) in predicted.iter().zip(truth) {
        match (p, t) {
            (true, true) => counts.true_positives += 1,
            (false, false) => counts.true_negatives += 1,
            (true, false) => counts.false_positives += 1,
            (false, true) => counts.false_negatives += 1,
        }
    }
    Ok(counts)
}

/// Accuracy = (TP + TN) / (TP + TN + FP + FN).
pub fn accuracy(counts: &ConfusionCounts) -> Result<f64> {
    let total = counts.total();
    if total == 0 {
        return Err(Error::domain("accuracy of zero evaluated epochs is undefined"));
    }
    Ok((counts.true_positives + counts.true_negatives) as f64 / total as f64)
}

/// One-vs-rest reduction: true where the label equals the positive class.
pub fn binarize(labels: &[i64], positive: i64) -> Vec<bool> {
    labels.iter().map(|&l| l == positive).collect()
}

// ---------------------------------------------------------------------------
// Classifier
// ---------------------------------------------------------------------------

/// Nearest-centroid model: one centroid per class and a shared
/// per-dimension scale (global standard deviation of the training set).
#[derive(Debug, Clone, PartialEq)]
pub struct NearestCentroid {
    /// Ascending class labels; ties in distance resolve to the smallest.
    classes: Vec<i64>,
    centroids: Vec<Vec<f64>>,
    scale: Vec<f64>,
}

impl NearestCentroid {
    pub fn classes(&self) -> &[i64] {
        &self.classes
    }

    pub fn centroid(&self, class_index: usize) -> &[f64] {
        &self.centroids[class_index]
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    pub fn dim(&self) -> usize {
        self.scale.len()
    }
}

/// A trained classifier: either the nearest-centroid reference model or an
/// externally computed prediction track (one label per epoch, in order).
#[derive(Debug, Clone, PartialEq)]
pub enum Classifier {
    NearestCentroid(NearestCentroid),
    External(Vec<i64>),
}

impl Classifier {
    /// Predicted labels for a sequence of epochs. External predictions are
    /// positional and must match the epoch count.
    pub fn predict(&self, features: &[FeatureVector]) -> Result<Vec<i64>> {
        match self {
            Classifier::NearestCentroid(model) => {
                features.iter().map(|f| classify(model, f)).collect()
            }
            Classifier::External(labels) => {
                if labels.len() != features.len() {
                    return Err(Error::domain(format!(
                        "external prediction count {} does not match {} epochs",
                        labels.len(),
                        features.len()
                    )));
                }
                Ok(labels.clone())
            }
        }
    }
}

/// Trains a nearest-centroid model: per-class centroid is the mean feature
/// vector, the shared per-dimension scale is the global standard deviation
/// (dimensions with zero spread get scale 1).
pub fn train_nearest_centroid(features: &[FeatureVector], labels: &[i64]) -> Result<Classifier> {
    if features.len() != labels.len() {
        return Err(Error::domain(format!(
            "feature count {} does not match label count {}",
            features.len(),
            labels.len()
        )));
    }
    if features.is_empty() {
        return Err(Error::domain("training set is empty"));
    }
    let dim = features[0].dim();
    if features.iter().any(|f| f.dim() != dim) {
        return Err(Error::domain("training features differ in dimensionality"));
    }

    let mut classes: Vec<i64> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::domain("nearest-centroid training needs at least 2 classes"));
    }

    let mut centroids = Vec::with_capacity(classes.len());
    for &class in &classes {
        let members: Vec<&FeatureVector> = features
            .iter()
            .zip(labels)
            .filter(|(_, &l)| l == class)
            .map(|(f, _)| f)
            .collect();
        let mut centroid = vec![0.0; dim];
        for f in &members {
            for (c, e) in centroid.iter_mut().zip(f.entries()) {
                *c += e;
            }
        }
        for c in &mut centroid {
            *c /= members.len() as f64;
        }
        centroids.push(centroid);
    }

    // Global (population) standard deviation per dimension.
    let n = features.len() as f64;
    let mut mean = vec![0.0; dim];
    for f in features {
        for (m, e) in mean.iter_mut().zip(f.entries()) {
            *m += e;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut scale = vec![0.0; dim];
    for f in features {
        for ((s, e), m) in scale.iter_mut().zip(f.entries()).zip(&mean) {
            *s += (e - m) * (e - m);
        }
    }
    for s in &mut scale {
        *s = (*s / n).sqrt();
        if *s == 0.0 {
            *s = 1.0;
        }
    }

    Ok(Classifier::NearestCentroid(NearestCentroid {
        classes,
        centroids,
        scale,
    }))
}

/// Label of the nearest centroid under scale-normalized Euclidean distance;
/// ties break toward the smallest label.
pub fn classify(model: &NearestCentroid, features: &FeatureVector) -> Result<i64> {
    if features.dim() != model.dim() {
        return Err(Error::domain(format!(
            "feature dimensionality {} does not match model dimensionality {}",
            features.dim(),
            model.dim()
        )));
    }
    let mut best = 0usize;
    let mut best_dist = f64::INFINITY;
    for (idx, centroid) in model.centroids.iter().enumerate() {
        let dist: f64 = features
            .entries()
            .iter()
            .zip(centroid)
            .zip(&model.scale)
            .map(|((x, c), s)| {
                let d = (x - c) / s;
                d * d
            })
            .sum();
        if dist < best_dist {
            best_dist = dist;
            best = idx;
        }
    }
    Ok(model.classes[best])
}

// ---------------------------------------------------------------------------
// Approximation accuracy
// ---------------------------------------------------------------------------

/// What counts as truth when scoring an approximate configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TruthMode {
    /// Predictions under the baseline configuration are the reference.
    #[default]
    BaselinePredictions,
    /// The record's ground-truth label track is the reference.
    Labels,
}

/// Classifies every epoch under both configurations and scores the
/// approximate predictions against the reference with the confusion-based
/// accuracy metric. Multi-class label sets reduce one-vs-rest per class and
/// macro-average (for binary labels this is exactly the four-cell formula).
pub fn approximation_accuracy(
    rec: &EegRecord,
    epoch: &EpochSpec,
    profile: &BandProfile,
    clf: &Classifier,
    approx: &ApproxConfig,
    baseline: &ApproxConfig,
    truth: TruthMode,
) -> Result<f64> {
    let approx_features = extract_features_per_epoch(rec, epoch, profile, approx)?;
    let predicted = clf.predict(&approx_features)?;

    let reference = match truth {
        TruthMode::BaselinePredictions => {
            let baseline_features = extract_features_per_epoch(rec, epoch, profile, baseline)?;
            clf.predict(&baseline_features)?
        }
        TruthMode::Labels => {
            let labels = rec
                .labels()
                .ok_or_else(|| Error::domain("record carries no ground-truth labels"))?;
            if !epoch.is_non_overlapping() {
                return Err(Error::domain(
                    "ground-truth scoring requires non-overlapping epochs",
                ));
            }
            if rec.label_epoch_length() != Some(epoch.epoch_length_samples()) {
                return Err(Error::domain(format!(
                    "label track epoch length {:?} does not match requested {}",
                    rec.label_epoch_length(),
                    epoch.epoch_length_samples()
                )));
            }
            if labels.len() != predicted.len() {
                return Err(Error::domain(format!(
                    "label count {} does not match {} evaluated epochs",
                    labels.len(),
                    predicted.len()
                )));
            }
            labels.to_vec()
        }
    };

    agreement_accuracy(&predicted, &reference)
}

/// Macro-averaged one-vs-rest accuracy of `predicted` against `reference`.
fn agreement_accuracy(predicted: &[i64], reference: &[i64]) -> Result<f64> {
    let mut classes: Vec<i64> = predicted.iter().chain(reference).copied().collect();
    classes.sort_unstable();
    classes.dedup();
    let mut sum = 0.0;
    for class in &classes {
        let counts = confusion(&binarize(predicted, *class), &binarize(reference, *class))?;
        sum += accuracy(&counts)?;
    }
    Ok(sum / classes.len() as f64)
}

/// Mean relative per-dimension deviation `|a - b| / max(|b|, 1e-12)`.
pub fn feature_deviation(a: &FeatureVector, b: &FeatureVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::domain(format!(
            "feature dimensionality {} does not match {}",
            a.dim(),
            b.dim()
        )));
    }
    let sum: f64 = a
        .entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| (x - y).abs() / y.abs().max(1e-12))
        .sum();
    Ok(sum / a.dim() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approximation::level_to_config;
    use crate::signal_io::synth_labeled;
    use crate::spectral::extract_features_per_epoch;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fv(entries: Vec<f64>) -> FeatureVector {
        let channels = entries.len() / 5;
        FeatureVector::new(entries, (0..channels).map(|i| format!("ch{i}")).collect()).unwrap()
    }

    #[test]
    fn confusion_counts_by_definition() {
        let perfect = confusion(
            &[vec![true; 10], vec![false; 10]].concat(),
            &[vec![true; 10], vec![false; 10]].concat(),
        )
        .unwrap();
        assert_eq!(
            perfect,
            ConfusionCounts {
                true_positives: 10,
                true_negatives: 10,
                false_positives: 0,
                false_negatives: 0
            }
        );

        let all_wrong = confusion(&[true; 4], &[false; 4]).unwrap();
        assert_eq!(all_wrong.false_positives, 4);
        assert_eq!(all_wrong.total(), 4);

        let mixed = confusion(
            &[true, false, true, false],
            &[true, true, false, false],
        )
        .unwrap();
        assert_eq!(
            mixed,
            ConfusionCounts {
                true_positives: 1,
                true_negatives: 1,
                false_positives: 1,
                false_negatives: 1
            }
        );
    }

    #[test]
    fn confusion_rejects_mismatch_and_empty() {
        assert!(confusion(&[true], &[true, false]).is_err());
        assert!(confusion(&[], &[]).is_err());
    }

    #[test]
    fn accuracy_of_known_cells() {
        let c = |tp, tn, fp, fne| ConfusionCounts {
            true_positives: tp,
            true_negatives: tn,
            false_positives: fp,
            false_negatives: fne,
        };
        assert_eq!(accuracy(&c(10, 10, 0, 0)).unwrap(), 1.0);
        assert_eq!(accuracy(&c(5, 3, 1, 1)).unwrap(), 0.8);
        assert_eq!(accuracy(&c(0, 0, 4, 0)).unwrap(), 0.0);
        assert!(accuracy(&c(0, 0, 0, 0)).is_err());
    }

    #[test]
    fn centroids_are_class_means() {
        let features = vec![fv(vec![0.0; 5]), fv(vec![2.0; 5])];
        let clf = train_nearest_centroid(&features, &[0, 1]).unwrap();
        let Classifier::NearestCentroid(model) = &clf else {
            panic!("expected nearest-centroid")
        };
        assert_eq!(model.centroid(0), &[0.0; 5]);
        assert_eq!(model.centroid(1), &[2.0; 5]);
        // Single training point per class: centroids equal those points.
        assert_eq!(model.classes(), &[0, 1]);
    }

    #[test]
    fn constant_dimension_gets_unit_scale() {
        let features = vec![
            fv(vec![1.0, 0.0, 0.0, 0.0, 0.0]),
            fv(vec![1.0, 2.0, 0.0, 0.0, 0.0]),
        ];
        let clf = train_nearest_centroid(&features, &[0, 1]).unwrap();
        let Classifier::NearestCentroid(model) = &clf else {
            panic!("expected nearest-centroid")
        };
        assert_eq!(model.scale()[0], 1.0);
        assert!(model.scale()[1] > 0.0);
        // Classification stays finite.
        let label = classify(model, &fv(vec![1.0, 1.9, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(label, 1);
    }

    #[test]
    fn training_rejects_degenerate_sets() {
        let features = vec![fv(vec![0.0; 5]), fv(vec![1.0; 5])];
        assert!(train_nearest_centroid(&features, &[1, 1]).is_err());
        assert!(train_nearest_centroid(&[], &[]).is_err());
        assert!(train_nearest_centroid(&features, &[0]).is_err());
    }

    #[test]
    fn point_on_centroid_classifies_to_it() {
        let features = vec![fv(vec![0.0; 5]), fv(vec![2.0; 5])];
        let clf = train_nearest_centroid(&features, &[3, 7]).unwrap();
        let Classifier::NearestCentroid(model) = &clf else {
            panic!("expected nearest-centroid")
        };
        assert_eq!(classify(model, &fv(vec![0.0; 5])).unwrap(), 3);
        assert_eq!(classify(model, &fv(vec![2.0; 5])).unwrap(), 7);
    }

    #[test]
    fn equidistant_point_takes_smallest_label() {
        let features = vec![fv(vec![0.0; 5]), fv(vec![2.0; 5])];
        let clf = train_nearest_centroid(&features, &[0, 1]).unwrap();
        let Classifier::NearestCentroid(model) = &clf else {
            panic!("expected nearest-centroid")
        };
        assert_eq!(classify(model, &fv(vec![1.0; 5])).unwrap(), 0);
    }

    #[test]
    fn classification_is_translation_invariant() {
        let features = vec![
            fv(vec![0.5, 1.0, 2.0, 0.1, 0.4]),
            fv(vec![3.0, 0.2, 0.8, 2.5, 1.9]),
        ];
        let clf = train_nearest_centroid(&features, &[0, 1]).unwrap();
        let shifted: Vec<FeatureVector> = features
            .iter()
            .map(|f| fv(f.entries().iter().map(|e| e + 10.0).collect()))
            .collect();
        let clf_shifted = train_nearest_centroid(&shifted, &[0, 1]).unwrap();

        let (Classifier::NearestCentroid(m), Classifier::NearestCentroid(ms)) =
            (&clf, &clf_shifted)
        else {
            panic!("expected nearest-centroid")
        };
        let query = fv(vec![1.0, 0.9, 1.5, 1.0, 1.0]);
        let query_shifted = fv(query.entries().iter().map(|e| e + 10.0).collect());
        assert_eq!(
            classify(m, &query).unwrap(),
            classify(ms, &query_shifted).unwrap()
        );
    }

    #[test]
    fn classification_is_scale_invariant() {
        let features = vec![
            fv(vec![0.5, 1.0, 2.0, 0.1, 0.4]),
            fv(vec![3.0, 0.2, 0.8, 2.5, 1.9]),
        ];
        let clf = train_nearest_centroid(&features, &[0, 1]).unwrap();
        let scaled: Vec<FeatureVector> = features
            .iter()
            .map(|f| fv(f.entries().iter().map(|e| e * 7.5).collect()))
            .collect();
        let clf_scaled = train_nearest_centroid(&scaled, &[0, 1]).unwrap();

        let (Classifier::NearestCentroid(m), Classifier::NearestCentroid(ms)) =
            (&clf, &clf_scaled)
        else {
            panic!("expected nearest-centroid")
        };
        let query = fv(vec![1.0, 0.9, 1.5, 1.0, 1.0]);
        let query_scaled = fv(query.entries().iter().map(|e| e * 7.5).collect());
        assert_eq!(
            classify(m, &query).unwrap(),
            classify(ms, &query_scaled).unwrap()
        );
    }

    #[test]
    fn well_separated_gaussian_classes_classify_above_95_percent() {
        // 200 synthetic epochs, two band-separated classes, split in half
        // for train/test.
        let rec = synth_labeled(
            &[vec![(4.0, 1.0)], vec![(20.0, 1.0)]],
            200,
            512,
            1,
            256.0,
            0.3,
            21,
        )
        .unwrap();
        let epoch = EpochSpec::non_overlapping(512).unwrap();
        let cfg = ApproxConfig::new(0.5, 256, 1).unwrap();
        let features =
            extract_features_per_epoch(&rec, &epoch, &BandProfile::seizure(), &cfg).unwrap();
        let labels = rec.labels().unwrap();

        let (train_f, test_f) = features.split_at(100);
        let (train_l, test_l) = labels.split_at(100);
        let clf = train_nearest_centroid(train_f, train_l).unwrap();
        let predicted = clf.predict(test_f).unwrap();
        let correct = predicted
            .iter()
            .zip(test_l)
            .filter(|(p, t)| p == t)
            .count();
        let rate = correct as f64 / test_l.len() as f64;
        assert!(rate >= 0.95, "test accuracy {rate}");
    }

    #[test]
    fn self_baseline_accuracy_is_exactly_one() {
        let rec = synth_labeled(
            &[vec![(4.0, 1.0)], vec![(20.0, 1.0)]],
            8,
            1024,
            1,
            256.0,
            0.2,
            5,
        )
        .unwrap();
        let epoch = EpochSpec::non_overlapping(1024).unwrap();
        let features = extract_features_per_epoch(
            &rec,
            &epoch,
            &BandProfile::seizure(),
            &level_to_config(0).unwrap(),
        )
        .unwrap();
        let clf = train_nearest_centroid(&features, rec.labels().unwrap()).unwrap();
        for level in 0..=5 {
            let cfg = level_to_config(level).unwrap();
            let acc = approximation_accuracy(
                &rec,
                &epoch,
                &BandProfile::seizure(),
                &clf,
                &cfg,
                &cfg,
                TruthMode::BaselinePredictions,
            )
            .unwrap();
            assert_eq!(acc, 1.0);
        }
    }

    #[test]
    fn level5_accuracy_reported_on_labeled_data() {
        let rec = synth_labeled(
            &[vec![(4.0, 1.0)], vec![(20.0, 1.0)]],
            40,
            3072,
            1,
            256.0,
            0.5,
            17,
        )
        .unwrap();
        let epoch = EpochSpec::non_overlapping(3072).unwrap();
        let profile = BandProfile::seizure();
        let base_cfg = level_to_config(0).unwrap();
        let features = extract_features_per_epoch(&rec, &epoch, &profile, &base_cfg).unwrap();
        let clf = train_nearest_centroid(&features, rec.labels().unwrap()).unwrap();
        let acc = approximation_accuracy(
            &rec,
            &epoch,
            &profile,
            &clf,
            &level_to_config(5).unwrap(),
            &base_cfg,
            TruthMode::BaselinePredictions,
        )
        .unwrap();
        println!("level-5 vs level-0 agreement accuracy: {acc}");
        assert!(acc > 0.5 && acc <= 1.0, "accuracy {acc}");
    }

    #[test]
    fn random_predictions_sit_near_the_half_accuracy_floor() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 2000;
        let truth: Vec<bool> = (0..n).map(|i| i % 2 == 0).collect();
        let predicted: Vec<bool> = (0..n).map(|_| rng.gen::<bool>()).collect();
        let acc = accuracy(&confusion(&predicted, &truth).unwrap()).unwrap();
        assert!((acc - 0.5).abs() < 0.05, "accuracy {acc}");
    }

    #[test]
    fn external_predictions_are_positional() {
        let clf = Classifier::External(vec![1, 0, 1]);
        let features = vec![fv(vec![0.0; 5]), fv(vec![1.0; 5]), fv(vec![2.0; 5])];
        assert_eq!(clf.predict(&features).unwrap(), vec![1, 0, 1]);
        assert!(clf.predict(&features[..2]).is_err());
    }

    #[test]
    fn deviation_of_identical_vectors_is_zero() {
        let a = fv(vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(feature_deviation(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn doubling_all_positive_entries_gives_unit_deviation() {
        let b = fv(vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        let a = fv(b.entries().iter().map(|e| 2.0 * e).collect());
        assert!((feature_deviation(&a, &b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deviation_against_zero_reference_is_finite() {
        let a = fv(vec![1.0; 5]);
        let b = fv(vec![0.0; 5]);
        let d = feature_deviation(&a, &b).unwrap();
        assert!(d.is_finite());
    }

    #[test]
    fn deviation_rejects_dimension_mismatch() {
        let a = fv(vec![1.0; 5]);
        let b = fv(vec![1.0; 10]);
        assert!(feature_deviation(&a, &b).is_err());
    }
}
