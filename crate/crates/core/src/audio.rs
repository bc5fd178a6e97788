//! WAV decoding, encoding, and energy-based endpoint trimming.
//!
//! Only 16 kHz mono input is accepted: other sample rates are rejected
//! rather than resampled, and multi-channel files are rejected rather
//! than downmixed.

use thiserror::Error;

/// The only sample rate the pipeline accepts.
pub const REQUIRED_SAMPLE_RATE: u32 = 16_000;

#[derive(Debug, Error)]
pub enum AudioError {
    #[error("malformed WAV: {0}")]
    Format(String),
    #[error("unsupported channel count {0}, only mono is accepted")]
    UnsupportedChannels(u16),
    #[error("unsupported WAV encoding (format code {0}), only PCM and IEEE float are accepted")]
    UnsupportedEncoding(u16),
    #[error("unsupported bit depth {bits} for format code {format}")]
    UnsupportedBitDepth { format: u16, bits: u16 },
    #[error("unsupported sample rate {0} Hz, expected {REQUIRED_SAMPLE_RATE}")]
    UnsupportedSampleRate(u32),
    #[error("audio contains no samples")]
    Empty,
    #[error("no frame above the silence threshold")]
    Silence,
    #[error("invalid audio buffer: {0}")]
    InvalidBuffer(String),
    #[error("invalid trim config: {0}")]
    InvalidTrimConfig(String),
}

/// A mono waveform with amplitudes in `[-1.0, +1.0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    samples: Vec<f32>,
    sample_rate_hz: u32,
}

impl AudioBuffer {
    /// Builds a buffer, validating the amplitude range and sample rate.
    pub fn from_samples(samples: Vec<f32>, sample_rate_hz: u32) -> Result<Self, AudioError> {
        if samples.is_empty() {
            return Err(AudioError::Empty);
        }
        if sample_rate_hz == 0 {
            return Err(AudioError::InvalidBuffer("sample rate must be positive".into()));
        }
        if let Some(bad) = samples.iter().find(|s| !s.is_finite() || s.abs() > 1.0) {
            return Err(AudioError::InvalidBuffer(format!(
                "sample {bad} outside [-1, 1]"
            )));
        }
        Ok(Self { samples, sample_rate_hz })
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }
}

/// Parameters for the relative-energy endpoint gate.
///
/// A frame is kept once its energy exceeds `energy_threshold_ratio` times
/// the peak frame energy; the kept span is widened by `guard_frames` on
/// each side.
#[derive(Debug, Clone)]
pub struct TrimConfig {
    pub energy_threshold_ratio: f64,
    pub guard_frames: usize,
    pub trim_frame_ms: u32,
}

impl Default for TrimConfig {
    fn default() -> Self {
        Self {
            energy_threshold_ratio: 0.01,
            guard_frames: 2,
            trim_frame_ms: 10,
        }
    }
}

impl TrimConfig {
    fn validate(&self) -> Result<(), AudioError> {
        if !(self.energy_threshold_ratio > 0.0 && self.energy_threshold_ratio < 1.0) {
            return Err(AudioError::InvalidTrimConfig(format!(
                "energy_threshold_ratio {} outside (0, 1)",
                self.energy_threshold_ratio
            )));
        }
        if self.trim_frame_ms == 0 {
            return Err(AudioError::InvalidTrimConfig("trim_frame_ms must be positive".into()));
        }
        Ok(())
    }
}

struct FmtChunk {
    format_code: u16,
    channels: u16,
    sample_rate: u32,
    bits_per_sample: u16,
}

const FORMAT_PCM: u16 = 1;
const FORMAT_IEEE_FLOAT: u16 = 3;

/// Decodes a RIFF/WAVE byte stream into a normalized sample buffer.
///
/// Accepts 16-bit PCM (format code 1) and 32-bit IEEE float (format code 3),
/// mono, 16 kHz. 16-bit samples are normalized by division by 32768, so
/// -32768 maps to -1.0.
pub fn decode_wav(bytes: &[u8]) -> Result<AudioBuffer, AudioError> {
    if bytes.len() < 12 {
        return Err(AudioError::Format("shorter than a RIFF header".into()));
    }
    if &bytes[0..4] != b"RIFF" {
        return Err(AudioError::Format("missing RIFF magic".into()));
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(AudioError::Format("missing WAVE tag".into()));
    }

    let mut pos = 12usize;
    let mut fmt: Option<FmtChunk> = None;
    while pos + 8 <= bytes.len() {
        let id: [u8; 4] = bytes[pos..pos + 4].try_into().unwrap();
        let size = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap()) as usize;
        let body_start = pos + 8;
        let body_end = body_start
            .checked_add(size)
            .filter(|&end| end <= bytes.len())
            .ok_or_else(|| AudioError::Format(format!("truncated {:?} chunk", chunk_name(&id))))?;
        let body = &bytes[body_start..body_end];
        match &id {
            b"fmt " => {
                if size < 16 {
                    return Err(AudioError::Format("fmt chunk shorter than 16 bytes".into()));
                }
                fmt = Some(FmtChunk {
                    format_code: u16::from_le_bytes(body[0..2].try_into().unwrap()),
                    channels: u16::from_le_bytes(body[2..4].try_into().unwrap()),
                    sample_rate: u32::from_le_bytes(body[4..8].try_into().unwrap()),
                    bits_per_sample: u16::from_le_bytes(body[14..16].try_into().unwrap()),
                });
            }
            b"data" => {
                let fmt = fmt.ok_or_else(|| {
                    AudioError::Format("data chunk appears before fmt chunk".into())
                })?;
                return decode_data(body, &fmt);
            }
            _ => {}
        }
        // Chunks are word-aligned: odd sizes carry one pad byte.
        pos = body_end + (size & 1);
    }
    Err(AudioError::Format("missing data chunk".into()))
}

fn chunk_name(id: &[u8; 4]) -> String {
    id.iter().map(|&b| b as char).collect()
}

fn decode_data(data: &[u8], fmt: &FmtChunk) -> Result<AudioBuffer, AudioError> {
    if fmt.channels != 1 {
        return Err(AudioError::UnsupportedChannels(fmt.channels));
    }
    let samples: Vec<f32> = match (fmt.format_code, fmt.bits_per_sample) {
        (FORMAT_PCM, 16) => {
            if data.len() % 2 != 0 {
                return Err(AudioError::Format("data size not a multiple of 2 bytes".into()));
            }
            data.chunks_exact(2)
                .map(|c| i16::from_le_bytes([c[0], c[1]]) as f32 / 32768.0)
                .collect()
        }
        (FORMAT_IEEE_FLOAT, 32) => {
            if data.len() % 4 != 0 {
                return Err(AudioError::Format("data size not a multiple of 4 bytes".into()));
            }
            let mut out = Vec::with_capacity(data.len() / 4);
            for c in data.chunks_exact(4) {
                let v = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
                if !v.is_finite() {
                    return Err(AudioError::Format("non-finite float sample".into()));
                }
                out.push(v.clamp(-1.0, 1.0));
            }
            out
        }
        (FORMAT_PCM | FORMAT_IEEE_FLOAT, bits) => {
            return Err(AudioError::UnsupportedBitDepth { format: fmt.format_code, bits });
        }
        (code, _) => return Err(AudioError::UnsupportedEncoding(code)),
    };
    if fmt.sample_rate != REQUIRED_SAMPLE_RATE {
        return Err(AudioError::UnsupportedSampleRate(fmt.sample_rate));
    }
    if samples.is_empty() {
        return Err(AudioError::Empty);
    }
    Ok(AudioBuffer {
        samples,
        sample_rate_hz: fmt.sample_rate,
    })
}

/// Encodes a buffer as a canonical 44-byte-header 16-bit PCM WAV file.
///
/// Inverse of [`decode_wav`] for 16-bit PCM input: amplitudes are scaled by
/// 32768, rounded, and clamped to the i16 range.
pub fn encode_wav_pcm16(audio: &AudioBuffer) -> Vec<u8> {
    let data_len = audio.samples.len() * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&FORMAT_PCM.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&audio.sample_rate_hz.to_le_bytes());
    out.extend_from_slice(&(audio.sample_rate_hz * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &s in &audio.samples {
        let v = (s as f64 * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Crops leading and trailing low-energy frames.
///
/// Scans non-overlapping `trim_frame_ms` windows, keeps the span from the
/// first to the last window whose energy exceeds the configured fraction of
/// the peak window energy, widened by `guard_frames` windows on each side
/// and clamped to the buffer. Errors with [`AudioError::Silence`] when no
/// window clears the threshold.
pub fn trim_endpoints(audio: &AudioBuffer, cfg: &TrimConfig) -> Result<AudioBuffer, AudioError> {
    cfg.validate()?;
    let frame_len =
        ((audio.sample_rate_hz as u64 * cfg.trim_frame_ms as u64) / 1000).max(1) as usize;
    let energies: Vec<f64> = audio
        .samples
        .chunks(frame_len)
        .map(|c| c.iter().map(|&s| s as f64 * s as f64).sum())
        .collect();
    let peak = energies.iter().cloned().fold(0.0f64, f64::max);
    if peak <= 0.0 {
        return Err(AudioError::Silence);
    }
    let threshold = cfg.energy_threshold_ratio * peak;
    // peak > threshold since the ratio is below 1, so both bounds exist
    let first = energies.iter().position(|&e| e > threshold).unwrap();
    let last = energies.iter().rposition(|&e| e > threshold).unwrap();
    let start = first.saturating_sub(cfg.guard_frames) * frame_len;
    let end = last
        .saturating_add(cfg.guard_frames)
        .saturating_add(1)
        .saturating_mul(frame_len)
        .min(audio.samples.len());
    Ok(AudioBuffer {
        samples: audio.samples[start..end].to_vec(),
        sample_rate_hz: audio.sample_rate_hz,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pcm16_wav(samples: &[i16], rate: u32) -> Vec<u8> {
        let audio = AudioBuffer {
            samples: samples.iter().map(|&v| v as f32 / 32768.0).collect(),
            sample_rate_hz: rate,
        };
        encode_wav_pcm16(&audio)
    }

    #[test]
    fn decodes_16k_pcm16() {
        let samples: Vec<i16> = (0..1600).map(|i| (i % 100) as i16 * 300).collect();
        let audio = decode_wav(&pcm16_wav(&samples, 16_000)).unwrap();
        assert_eq!(audio.len(), 1600);
        assert_eq!(audio.sample_rate_hz(), 16_000);
    }

    #[test]
    fn pcm_normalization_endpoints() {
        let audio = decode_wav(&pcm16_wav(&[0, -32768, 32767], 16_000)).unwrap();
        assert_eq!(audio.samples()[0], 0.0);
        assert_eq!(audio.samples()[1], -1.0);
        assert_eq!(audio.samples()[2], 32767.0 / 32768.0);
    }

    #[test]
    fn pcm16_round_trip_is_bit_exact() {
        let samples: Vec<i16> = vec![0, 1, -1, 12345, -12345, 32767, -32768];
        let audio = decode_wav(&pcm16_wav(&samples, 16_000)).unwrap();
        let audio2 = decode_wav(&encode_wav_pcm16(&audio)).unwrap();
        assert_eq!(audio.samples(), audio2.samples());
        let back: Vec<i16> = audio2
            .samples()
            .iter()
            .map(|&s| (s as f64 * 32768.0).round() as i16)
            .collect();
        assert_eq!(back, samples);
    }

    #[test]
    fn decodes_float32() {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"RIFF");
        bytes.extend_from_slice(&0u32.to_le_bytes()); // size field unused by the parser
        bytes.extend_from_slice(b"WAVE");
        bytes.extend_from_slice(b"fmt ");
        bytes.extend_from_slice(&16u32.to_le_bytes());
        bytes.extend_from_slice(&3u16.to_le_bytes());
        bytes.extend_from_slice(&1u16.to_le_bytes());
        bytes.extend_from_slice(&16_000u32.to_le_bytes());
        bytes.extend_from_slice(&64_000u32.to_le_bytes());
        bytes.extend_from_slice(&4u16.to_le_bytes());
        bytes.extend_from_slice(&32u16.to_le_bytes());
        bytes.extend_from_slice(b"data");
        bytes.extend_from_slice(&8u32.to_le_bytes());
        bytes.extend_from_slice(&0.5f32.to_le_bytes());
        bytes.extend_from_slice(&(-0.25f32).to_le_bytes());
        let audio = decode_wav(&bytes).unwrap();
        assert_eq!(audio.samples(), &[0.5, -0.25]);
    }

    #[test]
    fn rejects_bad_magic() {
        let mut bytes = pcm16_wav(&[0; 100], 16_000);
        bytes[0] = b'X';
        assert!(matches!(decode_wav(&bytes), Err(AudioError::Format(_))));
    }

    #[test]
    fn rejects_stereo() {
        let mut bytes = pcm16_wav(&[0; 100], 16_000);
        bytes[22] = 2; // channel count in fmt chunk
        assert!(matches!(
            decode_wav(&bytes),
            Err(AudioError::UnsupportedChannels(2))
        ));
    }

    #[test]
    fn rejects_compressed_encoding() {
        let mut bytes = pcm16_wav(&[0; 100], 16_000);
        bytes[20] = 2; // ADPCM format code
        assert!(matches!(
            decode_wav(&bytes),
            Err(AudioError::UnsupportedEncoding(2))
        ));
    }

    #[test]
    fn rejects_wrong_sample_rate() {
        let bytes = pcm16_wav(&[100; 80], 8_000);
        assert!(matches!(
            decode_wav(&bytes),
            Err(AudioError::UnsupportedSampleRate(8_000))
        ));
    }

    #[test]
    fn rejects_truncated_data_chunk() {
        let mut bytes = pcm16_wav(&[100; 80], 16_000);
        bytes.truncate(bytes.len() - 10);
        assert!(matches!(decode_wav(&bytes), Err(AudioError::Format(_))));
    }

    #[test]
    fn skips_unknown_chunks() {
        let samples: Vec<i16> = vec![5; 32];
        let canonical = pcm16_wav(&samples, 16_000);
        let mut bytes = canonical[..12].to_vec();
        bytes.extend_from_slice(b"LIST");
        bytes.extend_from_slice(&3u32.to_le_bytes());
        bytes.extend_from_slice(b"abc\0"); // odd size, one pad byte
        bytes.extend_from_slice(&canonical[12..]);
        let audio = decode_wav(&bytes).unwrap();
        assert_eq!(audio.len(), 32);
    }

    fn tone(len: usize, amp: f32) -> Vec<f32> {
        (0..len)
            .map(|i| amp * (i as f32 * 0.3).sin())
            .collect()
    }

    #[test]
    fn trims_silence_around_tone() {
        let rate = 16_000;
        let frame = 160; // 10 ms
        let mut samples = vec![0.0f32; rate as usize / 10]; // 100 ms silence
        samples.extend(tone(rate as usize / 5, 0.8)); // 200 ms tone
        samples.extend(vec![0.0f32; rate as usize / 10]); // 100 ms silence
        let audio = AudioBuffer::from_samples(samples, rate).unwrap();
        let cfg = TrimConfig::default();
        let trimmed = trim_endpoints(&audio, &cfg).unwrap();
        // tone spans frames 10..30; guard keeps frames 8..=31
        assert_eq!(trimmed.len(), (32 - 8) * frame);
        assert!(trimmed.len() < audio.len());
        assert_eq!(trimmed.sample_rate_hz(), rate);
    }

    #[test]
    fn trim_is_identity_when_everything_is_loud() {
        let audio = AudioBuffer::from_samples(tone(3200, 0.5), 16_000).unwrap();
        let trimmed = trim_endpoints(&audio, &TrimConfig::default()).unwrap();
        assert_eq!(trimmed.samples(), audio.samples());
    }

    #[test]
    fn trim_rejects_pure_silence() {
        let audio = AudioBuffer {
            samples: vec![0.0; 1600],
            sample_rate_hz: 16_000,
        };
        assert!(matches!(
            trim_endpoints(&audio, &TrimConfig::default()),
            Err(AudioError::Silence)
        ));
    }

    #[test]
    fn trim_is_idempotent() {
        let rate = 16_000;
        let mut samples = vec![0.0f32; 730]; // deliberately not frame aligned
        samples.extend(tone(2000, 0.7));
        samples.extend(vec![0.0f32; 415]);
        let audio = AudioBuffer::from_samples(samples, rate).unwrap();
        let cfg = TrimConfig::default();
        let once = trim_endpoints(&audio, &cfg).unwrap();
        let twice = trim_endpoints(&once, &cfg).unwrap();
        assert_eq!(once.samples(), twice.samples());
    }

    #[test]
    fn trim_config_validation() {
        let audio = AudioBuffer::from_samples(tone(1600, 0.5), 16_000).unwrap();
        let bad = TrimConfig {
            energy_threshold_ratio: 1.5,
            ..TrimConfig::default()
        };
        assert!(matches!(
            trim_endpoints(&audio, &bad),
            Err(AudioError::InvalidTrimConfig(_))
        ));
    }

    #[test]
    fn buffer_rejects_out_of_range_samples() {
        assert!(matches!(
            AudioBuffer::from_samples(vec![1.5], 16_000),
            Err(AudioError::InvalidBuffer(_))
        ));
        assert!(matches!(
            AudioBuffer::from_samples(vec![], 16_000),
            Err(AudioError::Empty)
        ));
    }
}
