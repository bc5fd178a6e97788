//! Browser bindings for the demo page.
//!
//! Every export returns a JSON string: either the payload described on the
//! function, or `{"error": "..."}` when the inputs are rejected. The demo
//! synthesizes utterances from the deterministic corpus generator, so the
//! page needs no audio files.

use wasm_bindgen::prelude::*;

use templar::audio::{trim_endpoints, TrimConfig};
use templar::dtw::{dtw_distance, local_distance, DtwOptions, Metric, Normalize};
use templar::eval::{run_all_pairs, synthesize_corpus, synthesize_utterance, SynthParams};
use templar::mfcc::{extract_mfcc, FeatureMatrix, MfccConfig, Window};

/// Corpus shape used by the single-utterance and comparison panels.
const DEMO_SPEAKERS: usize = 4;
const DEMO_WORDS: usize = 10;
const DEMO_REPS: usize = 4;

fn err_json(message: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": message.to_string() }).to_string()
}

fn demo_params(noise: f64, spread: f64) -> SynthParams {
    SynthParams {
        num_speakers: DEMO_SPEAKERS,
        num_words: DEMO_WORDS,
        num_reps: DEMO_REPS,
        noise_level: noise,
        speaker_spread: spread,
        ..SynthParams::default()
    }
}

fn parse_window(window: &str) -> Result<Window, String> {
    match window {
        "rectangular" => Ok(Window::Rectangular),
        "hamming" => Ok(Window::Hamming),
        other => Err(format!("unknown window {other:?}")),
    }
}

fn parse_metric(metric: &str) -> Result<Metric, String> {
    match metric {
        "euclidean" => Ok(Metric::Euclidean),
        "squared_euclidean" => Ok(Metric::SquaredEuclidean),
        "manhattan" => Ok(Metric::Manhattan),
        other => Err(format!("unknown metric {other:?}")),
    }
}

fn features_for(
    seed: u32,
    speaker: u32,
    word: u32,
    rep: u32,
    noise: f64,
    spread: f64,
    window: Window,
) -> Result<(Vec<f32>, FeatureMatrix), String> {
    let params = demo_params(noise, spread);
    let audio = synthesize_utterance(
        seed as u64,
        &params,
        speaker as usize,
        word as usize,
        rep as usize,
    )
    .map_err(|e| e.to_string())?;
    let cfg = MfccConfig { window, ..MfccConfig::default() };
    let trimmed = trim_endpoints(&audio, &TrimConfig::default()).map_err(|e| e.to_string())?;
    let features = extract_mfcc(&trimmed, &cfg).map_err(|e| e.to_string())?;
    Ok((trimmed.samples().to_vec(), features))
}

/// Synthesizes one utterance and runs the MFCC frontend on it.
///
/// Payload: `samples` (waveform after trimming), `sample_rate`,
/// `num_frames`, `frames` (rows of cepstral coefficients).
#[wasm_bindgen]
pub fn utterance_features(
    seed: u32,
    speaker: u32,
    word: u32,
    rep: u32,
    noise: f64,
    spread: f64,
    window: &str,
) -> String {
    let window = match parse_window(window) {
        Ok(w) => w,
        Err(e) => return err_json(e),
    };
    match features_for(seed, speaker, word, rep, noise, spread, window) {
        Ok((samples, features)) => serde_json::json!({
            "samples": samples,
            "sample_rate": 16_000,
            "num_frames": features.num_frames(),
            "num_ceps": features.num_ceps(),
            "frames": features.to_rows(),
        })
        .to_string(),
        Err(e) => err_json(e),
    }
}

/// Aligns two synthesized utterances with DTW.
///
/// Payload: `distance`, `normalized_distance`, `rows`, `cols`, the warp
/// `path` as `[i, j]` pairs, and the local-distance matrix `local`
/// (row-major, `rows * cols` values) for the heatmap.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn compare_utterances(
    seed: u32,
    speaker_a: u32,
    word_a: u32,
    rep_a: u32,
    speaker_b: u32,
    word_b: u32,
    rep_b: u32,
    noise: f64,
    spread: f64,
    metric: &str,
    band_radius: i32,
) -> String {
    let metric = match parse_metric(metric) {
        Ok(m) => m,
        Err(e) => return err_json(e),
    };
    let a = features_for(seed, speaker_a, word_a, rep_a, noise, spread, Window::Rectangular);
    let b = features_for(seed, speaker_b, word_b, rep_b, noise, spread, Window::Rectangular);
    let ((_, fa), (_, fb)) = match (a, b) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return err_json(e),
    };
    let opts = DtwOptions {
        metric,
        band_radius: (band_radius >= 0).then_some(band_radius as usize),
        normalize: Normalize::None,
        return_path: true,
    };
    let result = match dtw_distance(&fa, &fb, &opts) {
        Ok(r) => r,
        Err(e) => return err_json(e),
    };
    let rows = fa.num_frames();
    let cols = fb.num_frames();
    let mut local = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            local.push(local_distance(fa.row(i), fb.row(j), metric).unwrap_or(f64::NAN));
        }
    }
    serde_json::json!({
        "distance": result.distance,
        "normalized_distance": result.distance / (rows + cols) as f64,
        "cells_evaluated": result.cells_evaluated,
        "rows": rows,
        "cols": cols,
        "path": result.path,
        "local": local,
    })
    .to_string()
}

/// Synthesizes a corpus and runs both evaluation protocols over it.
///
/// Payload: the all-pairs report with per-speaker and per-pair accuracies
/// plus the two averages.
#[wasm_bindgen]
pub fn evaluate_corpus(
    seed: u32,
    speakers: u32,
    words: u32,
    reps: u32,
    noise: f64,
    spread: f64,
) -> String {
    let params = SynthParams {
        num_speakers: speakers as usize,
        num_words: words as usize,
        num_reps: reps as usize,
        noise_level: noise,
        speaker_spread: spread,
        ..SynthParams::default()
    };
    let corpus = match synthesize_corpus(seed as u64, &params) {
        Ok(c) => c,
        Err(e) => return err_json(e),
    };
    let report = run_all_pairs(
        &corpus,
        &MfccConfig::default(),
        &TrimConfig::default(),
        &DtwOptions::default(),
    );
    match report {
        Ok(r) => serde_json::to_string(&r).unwrap_or_else(err_json),
        Err(e) => err_json(e),
    }
}
