//! `templar` command line: feature extraction, enrollment, recognition,
//! evaluation protocols, synthetic corpus generation, and store inspection.
//!
//! Results go to stdout, diagnostics to stderr. Exit codes: 0 success,
//! 1 domain error, 2 usage error.

use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use templar::audio::{decode_wav, trim_endpoints, AudioBuffer, TrimConfig};
use templar::dtw::{DtwOptions, Metric, Normalize};
use templar::eval::{
    load_corpus, render_all_pairs_text, render_report_text, run_all_pairs, run_cross_speaker,
    run_same_speaker, save_corpus, synthesize_corpus, SynthParams,
};
use templar::mfcc::{extract_mfcc, MfccConfig, Window};
use templar::recognizer::{enroll, recognize};
use templar::store::{load_store_file, save_store_file, TemplateStore, FORMAT_VERSION};

#[derive(Parser)]
#[command(
    name = "templar",
    version,
    about = "Isolated-word speech recognition by MFCC features and DTW template matching"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowArg {
    Rectangular,
    Hamming,
}

impl From<WindowArg> for Window {
    fn from(w: WindowArg) -> Self {
        match w {
            WindowArg::Rectangular => Window::Rectangular,
            WindowArg::Hamming => Window::Hamming,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Euclidean,
    SquaredEuclidean,
    Manhattan,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Euclidean => Metric::Euclidean,
            MetricArg::SquaredEuclidean => Metric::SquaredEuclidean,
            MetricArg::Manhattan => Metric::Manhattan,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum NormalizeArg {
    None,
    PathLengthAverage,
}

impl From<NormalizeArg> for Normalize {
    fn from(n: NormalizeArg) -> Self {
        match n {
            NormalizeArg::None => Normalize::None,
            NormalizeArg::PathLengthAverage => Normalize::PathLengthAverage,
        }
    }
}

/// Frontend flags, one per `MfccConfig` field; defaults match the library.
#[derive(Args)]
struct MfccArgs {
    #[arg(long, default_value_t = 25)]
    frame_len_ms: u32,
    #[arg(long, default_value_t = 10)]
    frame_shift_ms: u32,
    #[arg(long, value_enum, default_value = "rectangular")]
    window: WindowArg,
    /// FFT size; defaults to the smallest power of two holding a frame.
    #[arg(long)]
    fft_size: Option<usize>,
    #[arg(long, default_value_t = 26)]
    num_filters: usize,
    #[arg(long, default_value_t = 300.0)]
    fmin: f64,
    #[arg(long, default_value_t = 5000.0)]
    fmax: f64,
    #[arg(long, default_value_t = 12)]
    num_ceps: usize,
    #[arg(long, default_value_t = 1e-10)]
    log_floor: f64,
}

impl MfccArgs {
    fn to_config(&self) -> MfccConfig {
        MfccConfig {
            frame_len_ms: self.frame_len_ms,
            frame_shift_ms: self.frame_shift_ms,
            window: self.window.into(),
            fft_size: self.fft_size,
            num_filters: self.num_filters,
            fmin_hz: self.fmin,
            fmax_hz: self.fmax,
            num_ceps: self.num_ceps,
            log_floor: self.log_floor,
        }
    }
}

#[derive(Args)]
struct DtwArgs {
    #[arg(long, value_enum, default_value = "euclidean")]
    metric: MetricArg,
    /// Sakoe-Chiba band half-width in frames; unconstrained when absent.
    #[arg(long)]
    band_radius: Option<usize>,
    #[arg(long, value_enum, default_value = "none")]
    normalize: NormalizeArg,
}

impl DtwArgs {
    fn to_options(&self) -> DtwOptions {
        DtwOptions {
            metric: self.metric.into(),
            band_radius: self.band_radius,
            normalize: self.normalize.into(),
            return_path: false,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Extract MFCC features from a WAV file as JSON
    Extract {
        wav: PathBuf,
        /// Write the JSON here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        mfcc: MfccArgs,
    },
    /// Add a WAV file to a template store as a labeled reference
    Enroll {
        wav: PathBuf,
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        speaker: String,
        #[arg(long)]
        word: String,
        #[arg(long)]
        rep: u32,
        #[command(flatten)]
        mfcc: MfccArgs,
    },
    /// Recognize a WAV file against a template store
    Recognize {
        wav: PathBuf,
        #[arg(long)]
        store: PathBuf,
        /// Show the top K ranked matches
        #[arg(long, default_value_t = 1)]
        top_k: usize,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        mfcc: MfccArgs,
        #[command(flatten)]
        dtw: DtwArgs,
    },
    /// Same-speaker protocol: repetition 0 enrolls, the rest are tested
    EvalSame {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        speaker: String,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        mfcc: MfccArgs,
        #[command(flatten)]
        dtw: DtwArgs,
    },
    /// Cross-speaker protocol: one speaker's repetition 0 against all of another's
    EvalCross {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long = "ref")]
        reference: String,
        #[arg(long)]
        test: String,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        mfcc: MfccArgs,
        #[command(flatten)]
        dtw: DtwArgs,
    },
    /// Both protocols over every speaker and ordered speaker pair
    EvalAll {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        mfcc: MfccArgs,
        #[command(flatten)]
        dtw: DtwArgs,
    },
    /// Generate a deterministic synthetic corpus of WAV files
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        speakers: usize,
        #[arg(long, default_value_t = 10)]
        words: usize,
        #[arg(long, default_value_t = 4)]
        reps: usize,
        #[arg(long, default_value_t = 0.03)]
        noise: f64,
        #[arg(long, default_value_t = 0.15)]
        spread: f64,
    },
    /// Print a template store's header and contents
    Inspect {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

fn main() {
    configure_threads();
    let cli = Cli::parse();
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

/// `TEMPLAR_THREADS` caps evaluation parallelism; 0 or absent keeps the
/// default thread count.
fn configure_threads() {
    if let Ok(value) = std::env::var("TEMPLAR_THREADS") {
        if let Ok(n) = value.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn read_audio(path: &Path) -> anyhow::Result<AudioBuffer> {
    let bytes =
        std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(decode_wav(&bytes)?)
}

fn emit(text: String, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Extract { wav, out, mfcc } => {
            let cfg = mfcc.to_config();
            let audio = read_audio(&wav)?;
            let trimmed = trim_endpoints(&audio, &TrimConfig::default())?;
            let features = extract_mfcc(&trimmed, &cfg)?;
            let doc = json!({
                "fingerprint": features.fingerprint(),
                "num_frames": features.num_frames(),
                "num_ceps": features.num_ceps(),
                "frames": features.to_rows(),
            });
            emit(serde_json::to_string_pretty(&doc)?, out.as_deref())?;
        }
        Command::Enroll { wav, store, speaker, word, rep, mfcc } => {
            let cfg = mfcc.to_config();
            let audio = read_audio(&wav)?;
            let mut templates = if store.exists() {
                load_store_file(&store)?
            } else {
                TemplateStore::new()
            };
            enroll(&audio, &speaker, &word, rep, &cfg, &TrimConfig::default(), &mut templates)?;
            save_store_file(&templates, &store)?;
            println!(
                "enrolled {speaker} {word} rep {rep} ({} templates in {})",
                templates.len(),
                store.display()
            );
        }
        Command::Recognize { wav, store, top_k, json: as_json, mfcc, dtw } => {
            let cfg = mfcc.to_config();
            let opts = dtw.to_options();
            let audio = read_audio(&wav)?;
            let templates = load_store_file(&store)?;
            let result = recognize(&audio, &templates, &cfg, &TrimConfig::default(), &opts)?;
            if as_json {
                let doc = json!({
                    "best": result.best,
                    "ranking": result.ranking.iter().take(top_k.max(1)).collect::<Vec<_>>(),
                    "margin": result.margin,
                });
                println!("{}", serde_json::to_string_pretty(&doc)?);
            } else {
                let b = &result.best;
                println!(
                    "best: {} (speaker {}, rep {}) distance {:.4}",
                    b.word_label, b.speaker_id, b.repetition_index, b.distance
                );
                for (i, m) in result.ranking.iter().take(top_k.max(1)).enumerate().skip(1) {
                    println!(
                        "{:>4}. {} (speaker {}, rep {}) distance {:.4}",
                        i + 1,
                        m.word_label,
                        m.speaker_id,
                        m.repetition_index,
                        m.distance
                    );
                }
            }
        }
        Command::EvalSame { corpus, speaker, json: as_json, mfcc, dtw } => {
            let report = run_same_speaker(
                &load_corpus(&corpus)?,
                &speaker,
                &mfcc.to_config(),
                &TrimConfig::default(),
                &dtw.to_options(),
            )?;
            if as_json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{}", render_report_text(&report));
            }
        }
        Command::EvalCross { corpus, reference, test, json: as_json, mfcc, dtw } => {
            let report = run_cross_speaker(
                &load_corpus(&corpus)?,
                &reference,
                &test,
                &mfcc.to_config(),
                &TrimConfig::default(),
                &dtw.to_options(),
            )?;
            if as_json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{}", render_report_text(&report));
            }
        }
        Command::EvalAll { corpus, json: as_json, mfcc, dtw } => {
            let report = run_all_pairs(
                &load_corpus(&corpus)?,
                &mfcc.to_config(),
                &TrimConfig::default(),
                &dtw.to_options(),
            )?;
            if as_json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{}", render_all_pairs_text(&report));
            }
        }
        Command::Synth { out, seed, speakers, words, reps, noise, spread } => {
            let params = SynthParams {
                num_speakers: speakers,
                num_words: words,
                num_reps: reps,
                noise_level: noise,
                speaker_spread: spread,
                ..SynthParams::default()
            };
            let corpus = synthesize_corpus(seed, &params)?;
            let count = save_corpus(&corpus, &out)?;
            println!("wrote {count} wav files to {}", out.display());
        }
        Command::Inspect { store, json: as_json } => {
            let templates = load_store_file(&store)?;
            if as_json {
                let doc = json!({
                    "version": FORMAT_VERSION,
                    "fingerprint": templates.config_fingerprint(),
                    "num_ceps": templates.num_ceps(),
                    "template_count": templates.len(),
                    "templates": templates.templates().iter().map(|t| json!({
                        "speaker_id": t.speaker_id,
                        "word_label": t.word_label,
                        "repetition_index": t.repetition_index,
                        "num_frames": t.features.num_frames(),
                    })).collect::<Vec<_>>(),
                });
                println!("{}", serde_json::to_string_pretty(&doc)?);
            } else {
                println!("TMPL store: {}", store.display());
                println!("version: {FORMAT_VERSION}");
                match templates.config_fingerprint() {
                    Some(fp) => println!("fingerprint: {fp:#018x}"),
                    None => println!("fingerprint: (empty store)"),
                }
                println!("num_ceps: {}", templates.num_ceps().unwrap_or(0));
                println!("templates: {}", templates.len());
                for t in templates.templates() {
                    println!(
                        "  {:<10} {:<12} rep {:<3} {} frames",
                        t.speaker_id,
                        t.word_label,
                        t.repetition_index,
                        t.features.num_frames()
                    );
                }
            }
        }
    }
    Ok(())
}
