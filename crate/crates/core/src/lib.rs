//! Template-matching isolated-word speech recognition.
//!
//! The pipeline: decode a mono 16 kHz WAV file, trim leading and trailing
//! silence with an energy gate, convert the waveform into a sequence of
//! mel-frequency cepstral coefficient (MFCC) vectors, then score it against
//! stored reference templates with dynamic time warping (DTW). The template
//! with the lowest global distance names the recognized word.
//!
//! Modules:
//! - [`audio`]: WAV decode/encode and endpoint trimming
//! - [`mfcc`]: frame blocking, windowing, FFT, mel filterbank, DCT
//! - [`dtw`]: dynamic-programming alignment cost, optionally banded
//! - [`store`]: binary template persistence with CRC-32 integrity
//! - [`recognizer`]: enrollment and nearest-template recognition
//! - [`eval`]: same/cross-speaker protocols and a synthetic corpus generator

pub mod audio;
pub mod dtw;
pub mod eval;
pub mod mfcc;
pub mod recognizer;
pub mod store;

pub use audio::{AudioBuffer, AudioError, TrimConfig};
pub use dtw::{DtwError, DtwOptions, DtwResult, Metric, Normalize};
pub use mfcc::{FeatureMatrix, MfccConfig, MfccError, Window};
pub use recognizer::{Match, RecognitionResult, RecognizeError};
pub use store::{StoreError, Template, TemplateStore};
