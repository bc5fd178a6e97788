//! Evaluation protocols and a deterministic synthetic corpus.
//!
//! Two protocols are provided. The same-speaker protocol enrolls
//! repetition 0 of every word for one speaker and tests that speaker's
//! remaining repetitions. The cross-speaker protocol enrolls repetition 0
//! of every word for a reference speaker and tests all repetitions of a
//! different speaker. `run_all_pairs` runs both over every speaker and
//! ordered speaker pair and averages the accuracies.
//!
//! The synthetic corpus substitutes for recorded speech: each word is a
//! fixed signature of two or three concatenated sinusoid segments on a
//! mel-spaced frequency lattice, each speaker shifts all frequencies by a
//! per-speaker factor, and each repetition adds seeded noise and a small
//! seeded time-stretch. Identical seeds and parameters give bit-identical
//! corpora.

use std::collections::HashMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::audio::{AudioBuffer, AudioError, TrimConfig, REQUIRED_SAMPLE_RATE};
use crate::dtw::DtwOptions;
use crate::mfcc::{extract_mfcc, mel_to_hz, FeatureMatrix, MfccConfig, MfccError};
use crate::recognizer::{recognize_features, RecognizeError};
use crate::store::{StoreError, Template, TemplateStore};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("invalid parameters: {0}")]
    Config(String),
    #[error("speaker {0} is not in the corpus")]
    UnknownSpeaker(String),
    #[error("speaker {speaker} has no repetition 0 of word {word}")]
    MissingReference { speaker: String, word: String },
    #[error("reference and test speaker are both {0}; the cross-speaker protocol needs two")]
    SameSpeakerPair(String),
    #[error("no test trials available for speaker {0}")]
    NoTestTrials(String),
    #[error("duplicate utterance ({speaker}, {word}, {rep})")]
    DuplicateUtterance { speaker: String, word: String, rep: u32 },
    #[error("label {0} is not in the vocabulary")]
    UnknownLabel(String),
    #[error("corpus layout: {0}")]
    CorpusLayout(String),
    #[error(transparent)]
    Recognize(#[from] RecognizeError),
    #[error(transparent)]
    Audio(#[from] AudioError),
    #[error(transparent)]
    Mfcc(#[from] MfccError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One labeled recording.
#[derive(Debug, Clone, PartialEq)]
pub struct Utterance {
    pub speaker_id: String,
    pub word_label: String,
    pub repetition_index: u32,
    pub audio: AudioBuffer,
}

/// A set of utterances with its vocabulary and speaker list.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub utterances: Vec<Utterance>,
    pub words: Vec<String>,
    pub speakers: Vec<String>,
}

impl Corpus {
    /// Builds a corpus, deriving the sorted vocabulary and speaker list
    /// and rejecting duplicate (speaker, word, repetition) triples.
    pub fn from_utterances(utterances: Vec<Utterance>) -> Result<Self, EvalError> {
        let mut words: Vec<String> = Vec::new();
        let mut speakers: Vec<String> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for u in &utterances {
            if !seen.insert((u.speaker_id.clone(), u.word_label.clone(), u.repetition_index)) {
                return Err(EvalError::DuplicateUtterance {
                    speaker: u.speaker_id.clone(),
                    word: u.word_label.clone(),
                    rep: u.repetition_index,
                });
            }
            if !words.contains(&u.word_label) {
                words.push(u.word_label.clone());
            }
            if !speakers.contains(&u.speaker_id) {
                speakers.push(u.speaker_id.clone());
            }
        }
        words.sort();
        speakers.sort();
        Ok(Self { utterances, words, speakers })
    }

    pub fn index_of(&self, speaker: &str, word: &str, rep: u32) -> Option<usize> {
        self.utterances.iter().position(|u| {
            u.speaker_id == speaker && u.word_label == word && u.repetition_index == rep
        })
    }
}

/// One recognition attempt within a protocol run.
#[derive(Debug, Clone, Serialize)]
pub struct Trial {
    pub true_label: String,
    pub predicted_label: String,
    pub distance: f64,
    pub reference_speaker: String,
    pub test_speaker: String,
}

/// Trial list, accuracy, and confusion counts for one protocol run.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub words: Vec<String>,
    pub trials: Vec<Trial>,
    /// `100 * correct / total`.
    pub accuracy_percent: f64,
    /// `confusion[true][predicted]`, indices into `words`.
    pub confusion: Vec<Vec<u32>>,
}

impl EvalReport {
    pub fn from_trials(words: Vec<String>, trials: Vec<Trial>) -> Result<Self, EvalError> {
        if trials.is_empty() {
            return Err(EvalError::Config("cannot build a report from zero trials".into()));
        }
        let index: HashMap<&str, usize> =
            words.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
        let mut confusion = vec![vec![0u32; words.len()]; words.len()];
        let mut correct = 0usize;
        for t in &trials {
            let row = *index
                .get(t.true_label.as_str())
                .ok_or_else(|| EvalError::UnknownLabel(t.true_label.clone()))?;
            let col = *index
                .get(t.predicted_label.as_str())
                .ok_or_else(|| EvalError::UnknownLabel(t.predicted_label.clone()))?;
            confusion[row][col] += 1;
            if row == col {
                correct += 1;
            }
        }
        let accuracy_percent = 100.0 * correct as f64 / trials.len() as f64;
        Ok(Self { words, trials, accuracy_percent, confusion })
    }

    pub fn total(&self) -> usize {
        self.trials.len()
    }

    pub fn correct(&self) -> usize {
        self.trials
            .iter()
            .filter(|t| t.true_label == t.predicted_label)
            .count()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpeakerEval {
    pub speaker: String,
    pub report: EvalReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairEval {
    pub reference_speaker: String,
    pub test_speaker: String,
    pub report: EvalReport,
}

/// Every same-speaker run plus every ordered cross-speaker run.
#[derive(Debug, Clone, Serialize)]
pub struct AllPairsReport {
    pub same_speaker: Vec<SpeakerEval>,
    pub cross_speaker: Vec<PairEval>,
    pub mean_same_accuracy: f64,
    pub mean_cross_accuracy: f64,
}

/// Utterance features extracted once and shared across protocol runs,
/// keyed by position in the corpus.
struct ExtractedCorpus<'c> {
    corpus: &'c Corpus,
    features: HashMap<usize, FeatureMatrix>,
}

impl<'c> ExtractedCorpus<'c> {
    fn extract(
        corpus: &'c Corpus,
        keep: impl Fn(&Utterance) -> bool,
        cfg: &MfccConfig,
        trim: &TrimConfig,
    ) -> Result<Self, EvalError> {
        let indices: Vec<usize> = corpus
            .utterances
            .iter()
            .enumerate()
            .filter(|(_, u)| keep(u))
            .map(|(i, _)| i)
            .collect();
        let extract_one = |&i: &usize| -> Result<(usize, FeatureMatrix), EvalError> {
            let trimmed = crate::audio::trim_endpoints(&corpus.utterances[i].audio, trim)?;
            Ok((i, extract_mfcc(&trimmed, cfg)?))
        };
        #[cfg(feature = "parallel")]
        let pairs: Vec<(usize, FeatureMatrix)> =
            indices.par_iter().map(extract_one).collect::<Result<_, _>>()?;
        #[cfg(not(feature = "parallel"))]
        let pairs: Vec<(usize, FeatureMatrix)> =
            indices.iter().map(extract_one).collect::<Result<_, _>>()?;
        Ok(Self { corpus, features: pairs.into_iter().collect() })
    }

    fn reference_store(&self, speaker: &str) -> Result<TemplateStore, EvalError> {
        let mut store = TemplateStore::new();
        for word in &self.corpus.words {
            let idx = self.corpus.index_of(speaker, word, 0).ok_or_else(|| {
                EvalError::MissingReference { speaker: speaker.into(), word: word.clone() }
            })?;
            store.add_template(Template {
                speaker_id: speaker.to_string(),
                word_label: word.clone(),
                repetition_index: 0,
                features: self.features[&idx].clone(),
            })?;
        }
        Ok(store)
    }

    /// Scores every utterance accepted by `keep` against the store.
    fn trials(
        &self,
        store: &TemplateStore,
        reference_speaker: &str,
        test_speaker: &str,
        keep: impl Fn(&Utterance) -> bool,
        opts: &DtwOptions,
    ) -> Result<Vec<Trial>, EvalError> {
        let mut trials = Vec::new();
        for (idx, utt) in self.corpus.utterances.iter().enumerate() {
            if !keep(utt) {
                continue;
            }
            let result = recognize_features(&self.features[&idx], store, opts)?;
            trials.push(Trial {
                true_label: utt.word_label.clone(),
                predicted_label: result.best.word_label,
                distance: result.best.distance,
                reference_speaker: reference_speaker.to_string(),
                test_speaker: test_speaker.to_string(),
            });
        }
        Ok(trials)
    }

    fn same_speaker(&self, speaker: &str, opts: &DtwOptions) -> Result<EvalReport, EvalError> {
        let store = self.reference_store(speaker)?;
        let trials = self.trials(
            &store,
            speaker,
            speaker,
            |u| u.speaker_id == speaker && u.repetition_index != 0,
            opts,
        )?;
        if trials.is_empty() {
            return Err(EvalError::NoTestTrials(speaker.into()));
        }
        EvalReport::from_trials(self.corpus.words.clone(), trials)
    }

    fn cross_speaker(
        &self,
        reference: &str,
        test: &str,
        opts: &DtwOptions,
    ) -> Result<EvalReport, EvalError> {
        let store = self.reference_store(reference)?;
        let trials =
            self.trials(&store, reference, test, |u| u.speaker_id == test, opts)?;
        if trials.is_empty() {
            return Err(EvalError::NoTestTrials(test.into()));
        }
        EvalReport::from_trials(self.corpus.words.clone(), trials)
    }
}

fn require_speaker(corpus: &Corpus, speaker: &str) -> Result<(), EvalError> {
    if corpus.speakers.iter().any(|s| s == speaker) {
        Ok(())
    } else {
        Err(EvalError::UnknownSpeaker(speaker.into()))
    }
}

/// Enrolls repetition 0 of every word for `speaker` and tests the
/// speaker's remaining repetitions: `words * (reps - 1)` trials.
pub fn run_same_speaker(
    corpus: &Corpus,
    speaker: &str,
    cfg: &MfccConfig,
    trim: &TrimConfig,
    opts: &DtwOptions,
) -> Result<EvalReport, EvalError> {
    require_speaker(corpus, speaker)?;
    let x = ExtractedCorpus::extract(corpus, |u| u.speaker_id == speaker, cfg, trim)?;
    x.same_speaker(speaker, opts)
}

/// Enrolls repetition 0 of every word for the reference speaker and tests
/// every repetition of the test speaker: `words * reps` trials.
pub fn run_cross_speaker(
    corpus: &Corpus,
    reference_speaker: &str,
    test_speaker: &str,
    cfg: &MfccConfig,
    trim: &TrimConfig,
    opts: &DtwOptions,
) -> Result<EvalReport, EvalError> {
    if reference_speaker == test_speaker {
        return Err(EvalError::SameSpeakerPair(reference_speaker.into()));
    }
    require_speaker(corpus, reference_speaker)?;
    require_speaker(corpus, test_speaker)?;
    let x = ExtractedCorpus::extract(
        corpus,
        |u| {
            u.speaker_id == test_speaker
                || (u.speaker_id == reference_speaker && u.repetition_index == 0)
        },
        cfg,
        trim,
    )?;
    x.cross_speaker(reference_speaker, test_speaker, opts)
}

/// Runs the same-speaker protocol for every speaker and the cross-speaker
/// protocol for every ordered speaker pair.
pub fn run_all_pairs(
    corpus: &Corpus,
    cfg: &MfccConfig,
    trim: &TrimConfig,
    opts: &DtwOptions,
) -> Result<AllPairsReport, EvalError> {
    if corpus.speakers.len() < 2 {
        return Err(EvalError::Config("run_all_pairs needs at least 2 speakers".into()));
    }
    let x = ExtractedCorpus::extract(corpus, |_| true, cfg, trim)?;
    let mut same_speaker = Vec::new();
    for speaker in &corpus.speakers {
        same_speaker.push(SpeakerEval {
            speaker: speaker.clone(),
            report: x.same_speaker(speaker, opts)?,
        });
    }
    let mut cross_speaker = Vec::new();
    for reference in &corpus.speakers {
        for test in &corpus.speakers {
            if reference == test {
                continue;
            }
            cross_speaker.push(PairEval {
                reference_speaker: reference.clone(),
                test_speaker: test.clone(),
                report: x.cross_speaker(reference, test, opts)?,
            });
        }
    }
    let mean = |accs: &[f64]| accs.iter().sum::<f64>() / accs.len() as f64;
    let same_accs: Vec<f64> = same_speaker.iter().map(|s| s.report.accuracy_percent).collect();
    let cross_accs: Vec<f64> = cross_speaker.iter().map(|p| p.report.accuracy_percent).collect();
    Ok(AllPairsReport {
        same_speaker,
        cross_speaker,
        mean_same_accuracy: mean(&same_accs),
        mean_cross_accuracy: mean(&cross_accs),
    })
}

/// Knobs for the synthetic corpus generator.
#[derive(Debug, Clone, Serialize)]
pub struct SynthParams {
    pub num_speakers: usize,
    pub num_words: usize,
    pub num_reps: usize,
    /// Peak amplitude of the uniform noise added to every repetition.
    pub noise_level: f64,
    /// Half-width of the per-speaker relative frequency shift.
    pub speaker_spread: f64,
    /// Half-width of the per-repetition relative time-stretch.
    pub max_stretch: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            num_speakers: 4,
            num_words: 10,
            num_reps: 4,
            noise_level: 0.03,
            speaker_spread: 0.15,
            max_stretch: 0.1,
        }
    }
}

impl SynthParams {
    fn validate(&self) -> Result<(), EvalError> {
        let counts_ok = self.num_speakers >= 1 && self.num_words >= 1 && self.num_reps >= 1;
        if !counts_ok {
            return Err(EvalError::Config("speaker, word, and rep counts must be >= 1".into()));
        }
        if self.num_speakers > 99 || self.num_words > 99 || self.num_reps > 99 {
            return Err(EvalError::Config("at most 99 speakers, words, and reps".into()));
        }
        if !(self.noise_level >= 0.0 && self.noise_level.is_finite()) {
            return Err(EvalError::Config("noise_level must be a finite non-negative value".into()));
        }
        if !(0.0..=0.9).contains(&self.speaker_spread) {
            return Err(EvalError::Config("speaker_spread must lie in [0, 0.9]".into()));
        }
        if !(0.0..=0.5).contains(&self.max_stretch) {
            return Err(EvalError::Config("max_stretch must lie in [0, 0.5]".into()));
        }
        Ok(())
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn sub_seed(seed: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(splitmix64(seed), |acc, &t| splitmix64(acc ^ t))
}

const SYNTH_FMIN_HZ: f64 = 350.0;
const SYNTH_FMAX_HZ: f64 = 2300.0;
const SEGMENTS_PER_WORD: usize = 3;

/// Frequency lattice shared by all words of one corpus: mel-uniform slots,
/// three dedicated slots per word, shuffled by the seed so no two words
/// ever share a segment frequency.
fn word_frequencies(seed: u64, num_words: usize) -> Vec<Vec<f64>> {
    let slots = num_words * SEGMENTS_PER_WORD;
    let mel_lo = 2595.0 * (1.0 + SYNTH_FMIN_HZ / 700.0).log10();
    let mel_hi = 2595.0 * (1.0 + SYNTH_FMAX_HZ / 700.0).log10();
    let lattice: Vec<f64> = (0..slots)
        .map(|i| {
            let mel = if slots == 1 {
                mel_lo
            } else {
                mel_lo + (mel_hi - mel_lo) * i as f64 / (slots - 1) as f64
            };
            mel_to_hz(mel).expect("lattice mel values are non-negative")
        })
        .collect();
    let mut order: Vec<usize> = (0..slots).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, &[0]));
    // Fisher-Yates shuffle
    for i in (1..slots).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    (0..num_words)
        .map(|w| {
            (0..SEGMENTS_PER_WORD)
                .map(|k| lattice[order[w * SEGMENTS_PER_WORD + k]])
                .collect()
        })
        .collect()
}

struct WordSignature {
    /// Per-segment (frequency Hz, duration seconds, amplitude).
    segments: Vec<(f64, f64, f64)>,
}

fn word_signature(seed: u64, word: usize, freqs: &[f64]) -> WordSignature {
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, &[1, word as u64]));
    let count = rng.random_range(2..=SEGMENTS_PER_WORD);
    let segments = (0..count)
        .map(|k| {
            let duration = rng.random_range(0.12..0.20);
            let amplitude = rng.random_range(0.5..0.7);
            (freqs[k], duration, amplitude)
        })
        .collect();
    WordSignature { segments }
}

fn speaker_factor(seed: u64, speaker: usize, spread: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, &[2, speaker as u64]));
    1.0 + spread * rng.random_range(-1.0..1.0)
}

/// Generates one synthetic utterance; bit-identical for identical inputs.
pub fn synthesize_utterance(
    seed: u64,
    params: &SynthParams,
    speaker: usize,
    word: usize,
    rep: usize,
) -> Result<AudioBuffer, EvalError> {
    params.validate()?;
    if speaker >= params.num_speakers || word >= params.num_words || rep >= params.num_reps {
        return Err(EvalError::Config(format!(
            "utterance index ({speaker}, {word}, {rep}) outside the corpus shape"
        )));
    }
    let freqs = word_frequencies(seed, params.num_words);
    Ok(build_utterance(seed, params, speaker, word, rep, &freqs[word]))
}

fn build_utterance(
    seed: u64,
    params: &SynthParams,
    speaker: usize,
    word: usize,
    rep: usize,
    freqs: &[f64],
) -> AudioBuffer {
    let signature = word_signature(seed, word, freqs);
    let factor = speaker_factor(seed, speaker, params.speaker_spread);
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(
        seed,
        &[3, speaker as u64, word as u64, rep as u64],
    ));
    let stretch = 1.0 + params.max_stretch * rng.random_range(-1.0..1.0);
    let rate = REQUIRED_SAMPLE_RATE as f64;
    let mut samples: Vec<f32> = Vec::new();
    for &(freq, duration, amplitude) in &signature.segments {
        let n = (duration * stretch * rate).round() as usize;
        let omega = 2.0 * std::f64::consts::PI * freq * factor / rate;
        for t in 0..n {
            samples.push((amplitude * (omega * t as f64).sin()) as f32);
        }
    }
    if params.noise_level > 0.0 {
        for s in samples.iter_mut() {
            let noisy = *s as f64 + params.noise_level * rng.random_range(-1.0..1.0);
            *s = noisy.clamp(-1.0, 1.0) as f32;
        }
    }
    AudioBuffer::from_samples(samples, REQUIRED_SAMPLE_RATE)
        .expect("generated samples are clamped and non-empty")
}

/// Generates the full corpus: speakers `s01..`, words `w01..`, utterances
/// ordered by speaker, word, repetition.
pub fn synthesize_corpus(seed: u64, params: &SynthParams) -> Result<Corpus, EvalError> {
    params.validate()?;
    let freqs = word_frequencies(seed, params.num_words);
    let mut utterances =
        Vec::with_capacity(params.num_speakers * params.num_words * params.num_reps);
    for s in 0..params.num_speakers {
        for w in 0..params.num_words {
            for r in 0..params.num_reps {
                utterances.push(Utterance {
                    speaker_id: format!("s{:02}", s + 1),
                    word_label: format!("w{:02}", w + 1),
                    repetition_index: r as u32,
                    audio: build_utterance(seed, params, s, w, r, &freqs[w]),
                });
            }
        }
    }
    Corpus::from_utterances(utterances)
}

/// Writes `<root>/<speaker_id>/<word_label>_<repetition>.wav` for every
/// utterance and returns the file count.
pub fn save_corpus(corpus: &Corpus, root: &Path) -> Result<usize, EvalError> {
    for u in &corpus.utterances {
        let dir = root.join(&u.speaker_id);
        std::fs::create_dir_all(&dir)?;
        let path = dir.join(format!("{}_{}.wav", u.word_label, u.repetition_index));
        std::fs::write(&path, crate::audio::encode_wav_pcm16(&u.audio))?;
    }
    Ok(corpus.utterances.len())
}

/// Loads a corpus from the on-disk layout written by [`save_corpus`].
/// Subdirectory names become speaker ids; non-wav files are ignored.
pub fn load_corpus(root: &Path) -> Result<Corpus, EvalError> {
    let mut speaker_dirs: Vec<std::path::PathBuf> = std::fs::read_dir(root)?
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .filter(|e| e.path().is_dir())
        .map(|e| e.path())
        .collect();
    speaker_dirs.sort();
    if speaker_dirs.is_empty() {
        return Err(EvalError::CorpusLayout(format!(
            "no speaker directories under {}",
            root.display()
        )));
    }
    let mut utterances = Vec::new();
    for dir in speaker_dirs {
        let speaker_id = dir
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| {
                EvalError::CorpusLayout(format!("non-UTF-8 speaker directory {}", dir.display()))
            })?
            .to_string();
        let mut files: Vec<std::path::PathBuf> = std::fs::read_dir(&dir)?
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|e| e == "wav"))
            .collect();
        files.sort();
        for path in files {
            let stem = path
                .file_stem()
                .and_then(|n| n.to_str())
                .ok_or_else(|| {
                    EvalError::CorpusLayout(format!("non-UTF-8 file name {}", path.display()))
                })?;
            let (word_label, rep_str) = stem.rsplit_once('_').ok_or_else(|| {
                EvalError::CorpusLayout(format!(
                    "{} does not match <word>_<repetition>.wav",
                    path.display()
                ))
            })?;
            let repetition_index: u32 = rep_str.parse().map_err(|_| {
                EvalError::CorpusLayout(format!(
                    "{} has a non-numeric repetition index",
                    path.display()
                ))
            })?;
            if word_label.is_empty() {
                return Err(EvalError::CorpusLayout(format!(
                    "{} has an empty word label",
                    path.display()
                )));
            }
            let audio = crate::audio::decode_wav(&std::fs::read(&path)?)?;
            utterances.push(Utterance {
                speaker_id: speaker_id.clone(),
                word_label: word_label.to_string(),
                repetition_index,
                audio,
            });
        }
    }
    Corpus::from_utterances(utterances)
}

/// Plain-text table: trial totals, accuracy, and the confusion matrix.
pub fn render_report_text(report: &EvalReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "trials: {}   correct: {}   accuracy: {:.1}%\n",
        report.total(),
        report.correct(),
        report.accuracy_percent
    ));
    let width = report.words.iter().map(|w| w.len()).max().unwrap_or(3).max(3) + 2;
    out.push_str("\nconfusion (rows = true, cols = predicted):\n");
    out.push_str(&format!("{:width$}", ""));
    for w in &report.words {
        out.push_str(&format!("{w:>width$}"));
    }
    out.push('\n');
    for (i, row) in report.confusion.iter().enumerate() {
        out.push_str(&format!("{:>width$}", report.words[i]));
        for &count in row {
            out.push_str(&format!("{count:>width$}"));
        }
        out.push('\n');
    }
    out
}

/// Plain-text tables for a full all-pairs run, one row per protocol run.
pub fn render_all_pairs_text(report: &AllPairsReport) -> String {
    let mut out = String::new();
    out.push_str("SPEAKER     TRIALS   ACCURACY\n");
    for s in &report.same_speaker {
        out.push_str(&format!(
            "{:<12}{:>6}{:>10.1}%\n",
            s.speaker,
            s.report.total(),
            s.report.accuracy_percent
        ));
    }
    out.push_str(&format!(
        "same-speaker average accuracy: {:.1}%\n\n",
        report.mean_same_accuracy
    ));
    out.push_str("REFERENCE   TEST        TRIALS   ACCURACY\n");
    for p in &report.cross_speaker {
        out.push_str(&format!(
            "{:<12}{:<12}{:>6}{:>10.1}%\n",
            p.reference_speaker,
            p.test_speaker,
            p.report.total(),
            p.report.accuracy_percent
        ));
    }
    out.push_str(&format!(
        "cross-speaker average accuracy: {:.1}%\n",
        report.mean_cross_accuracy
    ));
    out
}
