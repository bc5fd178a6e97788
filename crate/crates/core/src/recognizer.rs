//! Enrollment and nearest-template recognition.
//!
//! An incoming utterance is compared in turn with every stored template;
//! the one with the lowest DTW distance names the recognized word.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::audio::{trim_endpoints, AudioBuffer, AudioError, TrimConfig};
use crate::dtw::{dtw_distance, DtwError, DtwOptions};
use crate::mfcc::{extract_mfcc, FeatureMatrix, MfccConfig, MfccError};
use crate::store::{StoreError, Template, TemplateStore};

#[derive(Debug, Error)]
pub enum RecognizeError {
    #[error("template store is empty")]
    EmptyStore,
    #[error(transparent)]
    Audio(#[from] AudioError),
    #[error(transparent)]
    Mfcc(#[from] MfccError),
    #[error(transparent)]
    Dtw(#[from] DtwError),
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// One template's score against the test utterance.
#[derive(Debug, Clone, Serialize)]
pub struct Match {
    pub word_label: String,
    pub speaker_id: String,
    pub repetition_index: u32,
    pub distance: f64,
}

/// Full ranking behind the lowest-distance decision.
#[derive(Debug, Clone, Serialize)]
pub struct RecognitionResult {
    pub best: Match,
    /// All matches sorted by ascending distance; ties keep store order.
    pub ranking: Vec<Match>,
    /// Distance gap to the runner-up, absent for a single-template store.
    pub margin: Option<f64>,
}

/// Trims, extracts features, and appends a template to the store.
pub fn enroll(
    audio: &AudioBuffer,
    speaker_id: &str,
    word_label: &str,
    repetition_index: u32,
    cfg: &MfccConfig,
    trim: &TrimConfig,
    store: &mut TemplateStore,
) -> Result<(), RecognizeError> {
    let trimmed = trim_endpoints(audio, trim)?;
    let features = extract_mfcc(&trimmed, cfg)?;
    store.add_template(Template {
        speaker_id: speaker_id.to_string(),
        word_label: word_label.to_string(),
        repetition_index,
        features,
    })?;
    Ok(())
}

/// Trims and extracts the utterance, then ranks it against the store.
pub fn recognize(
    audio: &AudioBuffer,
    store: &TemplateStore,
    cfg: &MfccConfig,
    trim: &TrimConfig,
    opts: &DtwOptions,
) -> Result<RecognitionResult, RecognizeError> {
    let trimmed = trim_endpoints(audio, trim)?;
    let features = extract_mfcc(&trimmed, cfg)?;
    recognize_features(&features, store, opts)
}

/// Ranks pre-extracted features against every template in the store.
pub fn recognize_features(
    features: &FeatureMatrix,
    store: &TemplateStore,
    opts: &DtwOptions,
) -> Result<RecognitionResult, RecognizeError> {
    let expected = store.config_fingerprint().ok_or(RecognizeError::EmptyStore)?;
    if features.fingerprint() != expected {
        return Err(DtwError::IncompatibleFeatures {
            left: features.fingerprint(),
            right: expected,
        }
        .into());
    }
    // paths are never reported per template, so skip the full-matrix pass
    let opts = DtwOptions { return_path: false, ..opts.clone() };

    let score = |t: &Template| -> Result<Match, RecognizeError> {
        let result = dtw_distance(features, &t.features, &opts)?;
        Ok(Match {
            word_label: t.word_label.clone(),
            speaker_id: t.speaker_id.clone(),
            repetition_index: t.repetition_index,
            distance: result.distance,
        })
    };

    #[cfg(feature = "parallel")]
    let mut ranking: Vec<Match> =
        store.templates().par_iter().map(score).collect::<Result<_, _>>()?;
    #[cfg(not(feature = "parallel"))]
    let mut ranking: Vec<Match> =
        store.templates().iter().map(score).collect::<Result<_, _>>()?;

    // stable sort keeps store insertion order on ties
    ranking.sort_by(|a, b| a.distance.total_cmp(&b.distance));
    let best = ranking[0].clone();
    let margin = (ranking.len() > 1).then(|| ranking[1].distance - ranking[0].distance);
    Ok(RecognitionResult { best, ranking, margin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtw::Metric;

    fn features(rows: &[f64]) -> FeatureMatrix {
        FeatureMatrix::from_rows(&rows.iter().map(|&v| vec![v, -v]).collect::<Vec<_>>()).unwrap()
    }

    fn store_of(words: &[(&str, &[f64])]) -> TemplateStore {
        let mut store = TemplateStore::new();
        for (label, rows) in words {
            store
                .add_template(Template {
                    speaker_id: "s01".into(),
                    word_label: (*label).into(),
                    repetition_index: 0,
                    features: features(rows),
                })
                .unwrap();
        }
        store
    }

    #[test]
    fn exact_match_ranks_first_with_zero_distance() {
        let store = store_of(&[("one", &[1.0, 2.0, 3.0]), ("two", &[5.0, 6.0, 7.0])]);
        let result =
            recognize_features(&features(&[1.0, 2.0, 3.0]), &store, &DtwOptions::default())
                .unwrap();
        assert_eq!(result.best.word_label, "one");
        assert_eq!(result.best.distance, 0.0);
        assert_eq!(result.ranking.len(), 2);
        assert!(result.margin.unwrap() > 0.0);
    }

    #[test]
    fn single_template_store_has_no_margin() {
        let store = store_of(&[("one", &[1.0, 2.0])]);
        let result =
            recognize_features(&features(&[1.0, 2.0]), &store, &DtwOptions::default()).unwrap();
        assert!(result.margin.is_none());
        assert_eq!(result.ranking.len(), 1);
    }

    #[test]
    fn ranking_is_sorted_and_complete() {
        let word_rows: Vec<(String, Vec<f64>)> = (0..10)
            .map(|w| (format!("w{w:02}"), vec![w as f64, w as f64 + 0.5, w as f64 * 2.0]))
            .collect();
        let mut store = TemplateStore::new();
        for (label, rows) in &word_rows {
            store
                .add_template(Template {
                    speaker_id: "s01".into(),
                    word_label: label.clone(),
                    repetition_index: 0,
                    features: features(rows),
                })
                .unwrap();
        }
        let result =
            recognize_features(&features(&[3.1, 3.4, 6.2]), &store, &DtwOptions::default())
                .unwrap();
        assert_eq!(result.ranking.len(), 10);
        for pair in result.ranking.windows(2) {
            assert!(pair[0].distance <= pair[1].distance);
        }
        assert_eq!(result.best.word_label, result.ranking[0].word_label);
    }

    #[test]
    fn empty_store_is_an_error() {
        let store = TemplateStore::new();
        assert!(matches!(
            recognize_features(&features(&[1.0]), &store, &DtwOptions::default()),
            Err(RecognizeError::EmptyStore)
        ));
    }

    #[test]
    fn fingerprint_mismatch_is_an_error() {
        let store = store_of(&[("one", &[1.0])]);
        let tagged = features(&[1.0]).with_fingerprint(42);
        assert!(matches!(
            recognize_features(&tagged, &store, &DtwOptions::default()),
            Err(RecognizeError::Dtw(DtwError::IncompatibleFeatures { .. }))
        ));
    }

    #[test]
    fn adding_a_template_preserves_existing_distances() {
        let mut store = store_of(&[("one", &[1.0, 2.0]), ("two", &[4.0, 5.0])]);
        let test = features(&[1.2, 2.2]);
        let opts = DtwOptions { metric: Metric::Manhattan, ..DtwOptions::default() };
        let before = recognize_features(&test, &store, &opts).unwrap();
        store
            .add_template(Template {
                speaker_id: "s01".into(),
                word_label: "three".into(),
                repetition_index: 0,
                features: features(&[9.0, 9.0]),
            })
            .unwrap();
        let after = recognize_features(&test, &store, &opts).unwrap();
        for m in &before.ranking {
            let same = after
                .ranking
                .iter()
                .find(|n| n.word_label == m.word_label)
                .unwrap();
            assert_eq!(same.distance, m.distance);
        }
        assert_eq!(after.ranking.len(), 3);
    }

    #[test]
    fn rescaling_features_preserves_the_argmin() {
        let store = store_of(&[("one", &[1.0, 2.0, 3.0]), ("two", &[2.5, 1.0, 4.0])]);
        let test = features(&[1.1, 1.9, 3.2]);
        let baseline =
            recognize_features(&test, &store, &DtwOptions::default()).unwrap().best.word_label.clone();
        for g in [0.04, 0.5, 3.0, 250.0] {
            let scale = |m: &FeatureMatrix| {
                FeatureMatrix::from_rows(
                    &m.rows().map(|r| r.iter().map(|v| v * g).collect()).collect::<Vec<_>>(),
                )
                .unwrap()
            };
            let mut scaled_store = TemplateStore::new();
            for t in store.templates() {
                scaled_store
                    .add_template(Template {
                        speaker_id: t.speaker_id.clone(),
                        word_label: t.word_label.clone(),
                        repetition_index: t.repetition_index,
                        features: scale(&t.features),
                    })
                    .unwrap();
            }
            let result =
                recognize_features(&scale(&test), &scaled_store, &DtwOptions::default()).unwrap();
            assert_eq!(result.best.word_label, baseline, "argmin moved at gain {g}");
        }
    }
}
