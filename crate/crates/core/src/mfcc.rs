//! MFCC feature extraction.
//!
//! A waveform becomes a `T x num_ceps` matrix of cepstral coefficients by
//! frame blocking, windowing, FFT power spectrum, triangular mel
//! filterbank, log compression, and an orthonormal DCT-II. Coefficient 0
//! (the overall log-energy term) is retained.

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;
use std::sync::Arc;
use thiserror::Error;

use crate::audio::AudioBuffer;

#[derive(Debug, Error)]
pub enum MfccError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("negative frequency {0} Hz has no mel value")]
    NegativeFrequency(f64),
    #[error("negative mel value {0} has no frequency")]
    NegativeMel(f64),
    #[error("audio too short: {len} samples, need at least {frame_len}")]
    TooShort { len: usize, frame_len: usize },
    #[error("row {row} has {got} values, expected {expected}")]
    RaggedRows { row: usize, got: usize, expected: usize },
    #[error("non-finite feature value in row {row}")]
    NonFinite { row: usize },
}

/// Analysis window applied to each frame before the FFT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    Rectangular,
    Hamming,
}

impl Window {
    fn name(self) -> &'static str {
        match self {
            Window::Rectangular => "rectangular",
            Window::Hamming => "hamming",
        }
    }
}

/// Frontend parameters.
///
/// `fft_size: None` picks the smallest power of two that holds one frame.
/// The canonical text form of a config (see [`MfccConfig::canonical_string`])
/// is hashed into the fingerprint that templates carry, so any change here
/// makes features incompatible with previously stored templates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MfccConfig {
    pub frame_len_ms: u32,
    pub frame_shift_ms: u32,
    pub window: Window,
    pub fft_size: Option<usize>,
    pub num_filters: usize,
    pub fmin_hz: f64,
    pub fmax_hz: f64,
    pub num_ceps: usize,
    pub log_floor: f64,
}

impl Default for MfccConfig {
    fn default() -> Self {
        Self {
            frame_len_ms: 25,
            frame_shift_ms: 10,
            window: Window::Rectangular,
            fft_size: None,
            num_filters: 26,
            fmin_hz: 300.0,
            fmax_hz: 5000.0,
            num_ceps: 12,
            log_floor: 1e-10,
        }
    }
}

impl MfccConfig {
    /// Canonical `key=value` text form, one field per line.
    pub fn canonical_string(&self) -> String {
        let fft = match self.fft_size {
            Some(n) => n.to_string(),
            None => "auto".to_string(),
        };
        format!(
            "frame_len_ms={}\nframe_shift_ms={}\nwindow={}\nfft_size={}\nnum_filters={}\nfmin_hz={}\nfmax_hz={}\nnum_ceps={}\nlog_floor={}\n",
            self.frame_len_ms,
            self.frame_shift_ms,
            self.window.name(),
            fft,
            self.num_filters,
            self.fmin_hz,
            self.fmax_hz,
            self.num_ceps,
            self.log_floor,
        )
    }

    /// FNV-1a hash of the canonical string; embedded in templates so a
    /// store can reject features extracted under a different config.
    pub fn fingerprint(&self) -> u64 {
        fnv1a64(self.canonical_string().as_bytes())
    }

    pub fn frame_len_samples(&self, sample_rate_hz: u32) -> Result<usize, MfccError> {
        let n = (sample_rate_hz as u64 * self.frame_len_ms as u64 / 1000) as usize;
        if n == 0 {
            return Err(MfccError::Config(format!(
                "frame length {} ms is below one sample at {} Hz",
                self.frame_len_ms, sample_rate_hz
            )));
        }
        Ok(n)
    }

    pub fn frame_shift_samples(&self, sample_rate_hz: u32) -> Result<usize, MfccError> {
        let n = (sample_rate_hz as u64 * self.frame_shift_ms as u64 / 1000) as usize;
        if n == 0 {
            return Err(MfccError::Config(format!(
                "frame shift {} ms is below one sample at {} Hz",
                self.frame_shift_ms, sample_rate_hz
            )));
        }
        Ok(n)
    }

    /// The explicit FFT size, or the smallest power of two holding a frame.
    pub fn resolved_fft_size(&self, sample_rate_hz: u32) -> Result<usize, MfccError> {
        let frame_len = self.frame_len_samples(sample_rate_hz)?;
        match self.fft_size {
            Some(n) => {
                if !n.is_power_of_two() || n < frame_len {
                    Err(MfccError::Config(format!(
                        "fft_size {n} must be a power of two no smaller than the {frame_len}-sample frame"
                    )))
                } else {
                    Ok(n)
                }
            }
            None => Ok(frame_len.next_power_of_two()),
        }
    }

    fn validate_for_rate(&self, sample_rate_hz: u32) -> Result<(), MfccError> {
        if self.frame_shift_ms == 0 || self.frame_shift_ms > self.frame_len_ms {
            return Err(MfccError::Config(format!(
                "frame shift {} ms outside (0, frame length {} ms]",
                self.frame_shift_ms, self.frame_len_ms
            )));
        }
        if self.fmin_hz < 0.0 {
            return Err(MfccError::NegativeFrequency(self.fmin_hz));
        }
        let nyquist = sample_rate_hz as f64 / 2.0;
        if !(self.fmin_hz < self.fmax_hz && self.fmax_hz <= nyquist) {
            return Err(MfccError::Config(format!(
                "filter band {}..{} Hz invalid for Nyquist {} Hz",
                self.fmin_hz, self.fmax_hz, nyquist
            )));
        }
        if self.num_filters == 0 {
            return Err(MfccError::Config("num_filters must be positive".into()));
        }
        if self.num_ceps == 0 || self.num_ceps > self.num_filters {
            return Err(MfccError::Config(format!(
                "num_ceps {} outside 1..={}",
                self.num_ceps, self.num_filters
            )));
        }
        if !(self.log_floor > 0.0) {
            return Err(MfccError::Config("log_floor must be positive".into()));
        }
        Ok(())
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// A `T x num_ceps` matrix of cepstral coefficients, row per frame.
///
/// Values are kept in f64; the template store persists them as f32.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    data: Vec<f64>,
    num_ceps: usize,
    fingerprint: u64,
}

impl FeatureMatrix {
    /// Builds a matrix from per-frame rows with fingerprint 0.
    ///
    /// Hand-built matrices all carry fingerprint 0 and are therefore
    /// mutually comparable under DTW.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MfccError> {
        if rows.is_empty() {
            return Ok(Self { data: Vec::new(), num_ceps: 0, fingerprint: 0 });
        }
        let num_ceps = rows[0].len();
        if num_ceps == 0 {
            return Err(MfccError::Config("feature rows must be non-empty".into()));
        }
        let mut data = Vec::with_capacity(rows.len() * num_ceps);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != num_ceps {
                return Err(MfccError::RaggedRows { row: i, got: row.len(), expected: num_ceps });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(MfccError::NonFinite { row: i });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { data, num_ceps, fingerprint: 0 })
    }

    pub(crate) fn from_raw(
        data: Vec<f64>,
        num_ceps: usize,
        fingerprint: u64,
    ) -> Result<Self, MfccError> {
        if !data.is_empty() {
            if num_ceps == 0 || data.len() % num_ceps != 0 {
                return Err(MfccError::Config(format!(
                    "{} values do not fill rows of {num_ceps}",
                    data.len()
                )));
            }
            if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
                return Err(MfccError::NonFinite { row: pos / num_ceps });
            }
        }
        Ok(Self { data, num_ceps, fingerprint })
    }

    pub fn with_fingerprint(mut self, fingerprint: u64) -> Self {
        self.fingerprint = fingerprint;
        self
    }

    pub fn num_frames(&self) -> usize {
        if self.num_ceps == 0 { 0 } else { self.data.len() / self.num_ceps }
    }

    pub fn num_ceps(&self) -> usize {
        self.num_ceps
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.data[t * self.num_ceps..(t + 1) * self.num_ceps]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.num_ceps.max(1))
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(|r| r.to_vec()).collect()
    }
}

/// `Mel(f) = 2595 * log10(1 + f/700)`, anchored so 1 kHz is about 1000 mel.
pub fn hz_to_mel(f: f64) -> Result<f64, MfccError> {
    if f < 0.0 {
        return Err(MfccError::NegativeFrequency(f));
    }
    Ok(hz_to_mel_raw(f))
}

fn hz_to_mel_raw(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

/// Inverse of [`hz_to_mel`]: `700 * (10^(m/2595) - 1)`.
pub fn mel_to_hz(m: f64) -> Result<f64, MfccError> {
    if m < 0.0 {
        return Err(MfccError::NegativeMel(m));
    }
    Ok(mel_to_hz_raw(m))
}

fn mel_to_hz_raw(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Splits a buffer into frames of `frame_len_ms` every `frame_shift_ms`.
///
/// Frame `t` covers samples `[t*shift, t*shift + frame_len)`; the frame
/// count is `(len - frame_len) / shift + 1`. A frame reaching past the end
/// of the signal is zero-padded to full length.
pub fn frame_signal(audio: &AudioBuffer, cfg: &MfccConfig) -> Result<Vec<Vec<f64>>, MfccError> {
    let rate = audio.sample_rate_hz();
    let frame_len = cfg.frame_len_samples(rate)?;
    let shift = cfg.frame_shift_samples(rate)?;
    let len = audio.len();
    if len < frame_len {
        return Err(MfccError::TooShort { len, frame_len });
    }
    let count = (len - frame_len) / shift + 1;
    let samples = audio.samples();
    let mut frames = Vec::with_capacity(count);
    for t in 0..count {
        let start = t * shift;
        let end = (start + frame_len).min(len);
        let mut frame: Vec<f64> = samples[start..end].iter().map(|&s| s as f64).collect();
        frame.resize(frame_len, 0.0);
        frames.push(frame);
    }
    Ok(frames)
}

/// Tapers a frame: rectangular is the identity, Hamming multiplies sample
/// `n` by `0.54 - 0.46*cos(2*pi*n/(N-1))`.
pub fn apply_window(frame: &[f64], window: Window) -> Vec<f64> {
    match window {
        Window::Rectangular => frame.to_vec(),
        Window::Hamming => {
            let n = frame.len();
            if n == 1 {
                return vec![frame[0]];
            }
            frame
                .iter()
                .enumerate()
                .map(|(i, &s)| {
                    let w = 0.54
                        - 0.46 * (2.0 * std::f64::consts::PI * i as f64 / (n as f64 - 1.0)).cos();
                    s * w
                })
                .collect()
        }
    }
}

/// `|X[k]|^2` for `k = 0..=fft_size/2`, with the frame zero-padded to
/// `fft_size`. Unscaled DFT convention: summing `|X[k]|^2` over all
/// `fft_size` bins gives `fft_size` times the frame energy.
pub fn power_spectrum(frame: &[f64], fft_size: usize) -> Result<Vec<f64>, MfccError> {
    if !fft_size.is_power_of_two() || fft_size < frame.len() {
        return Err(MfccError::Config(format!(
            "fft_size {fft_size} must be a power of two no smaller than the frame ({})",
            frame.len()
        )));
    }
    let fft = FftPlanner::new().plan_fft_forward(fft_size);
    let mut buf = vec![Complex::new(0.0, 0.0); fft_size];
    Ok(power_spectrum_with(frame, &fft, &mut buf))
}

fn power_spectrum_with(frame: &[f64], fft: &Arc<dyn Fft<f64>>, buf: &mut [Complex<f64>]) -> Vec<f64> {
    let fft_size = buf.len();
    for (slot, &s) in buf.iter_mut().zip(frame.iter()) {
        *slot = Complex::new(s, 0.0);
    }
    for slot in buf.iter_mut().skip(frame.len()) {
        *slot = Complex::new(0.0, 0.0);
    }
    fft.process(buf);
    buf[..=fft_size / 2].iter().map(|c| c.norm_sqr()).collect()
}

/// Triangular mel filterbank: `num_filters` rows over `fft_size/2 + 1` bins.
///
/// `num_filters + 2` edge points are spaced uniformly in mel between
/// `fmin_hz` and `fmax_hz`, mapped back to Hz, and snapped to the nearest
/// FFT bin (ties round down). Filter `m` rises linearly from edge `m` to
/// edge `m+1` and falls to edge `m+2`.
pub fn build_mel_filterbank(
    cfg: &MfccConfig,
    sample_rate_hz: u32,
    fft_size: usize,
) -> Result<Vec<Vec<f64>>, MfccError> {
    cfg.validate_for_rate(sample_rate_hz)?;
    let num_bins = fft_size / 2 + 1;
    let mel_lo = hz_to_mel(cfg.fmin_hz)?;
    let mel_hi = hz_to_mel(cfg.fmax_hz)?;
    let num_edges = cfg.num_filters + 2;
    let edges: Vec<usize> = (0..num_edges)
        .map(|i| {
            let mel = mel_lo + (mel_hi - mel_lo) * i as f64 / (num_edges - 1) as f64;
            let hz = mel_to_hz_raw(mel);
            let exact_bin = hz * fft_size as f64 / sample_rate_hz as f64;
            // round to nearest, ties toward the lower bin
            let snapped = (exact_bin - 0.5).ceil().max(0.0) as usize;
            snapped.min(num_bins - 1)
        })
        .collect();
    for w in edges.windows(2) {
        if w[0] == w[1] {
            return Err(MfccError::Config(format!(
                "filterbank edges collapse onto FFT bin {}: increase fft_size or reduce num_filters",
                w[0]
            )));
        }
    }
    let mut bank = vec![vec![0.0f64; num_bins]; cfg.num_filters];
    for m in 0..cfg.num_filters {
        let (lo, mid, hi) = (edges[m], edges[m + 1], edges[m + 2]);
        for k in lo + 1..=mid {
            bank[m][k] = (k - lo) as f64 / (mid - lo) as f64;
        }
        for k in mid + 1..hi {
            bank[m][k] = (hi - k) as f64 / (hi - mid) as f64;
        }
    }
    Ok(bank)
}

/// Orthonormal DCT-II of the input.
///
/// `X[0] = sqrt(1/N) * sum(x)`; for `k >= 1`,
/// `X[k] = sqrt(2/N) * sum_n x[n] * cos(pi*k*(2n+1)/(2N))`.
pub fn dct_ii_orthonormal(input: &[f64]) -> Vec<f64> {
    let n = input.len();
    (0..n).map(|k| dct_coefficient(input, k)).collect()
}

fn dct_coefficient(input: &[f64], k: usize) -> f64 {
    let n = input.len() as f64;
    let scale = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
    let sum: f64 = input
        .iter()
        .enumerate()
        .map(|(i, &x)| x * (std::f64::consts::PI * k as f64 * (2.0 * i as f64 + 1.0) / (2.0 * n)).cos())
        .sum();
    scale * sum
}

/// Runs the full frontend: frame, window, power spectrum, mel filterbank,
/// log with floor, DCT-II, keep coefficients `0..num_ceps`.
pub fn extract_mfcc(audio: &AudioBuffer, cfg: &MfccConfig) -> Result<FeatureMatrix, MfccError> {
    let rate = audio.sample_rate_hz();
    cfg.validate_for_rate(rate)?;
    let fft_size = cfg.resolved_fft_size(rate)?;
    let frames = frame_signal(audio, cfg)?;
    let bank = build_mel_filterbank(cfg, rate, fft_size)?;
    let fft = FftPlanner::new().plan_fft_forward(fft_size);
    let mut buf = vec![Complex::new(0.0, 0.0); fft_size];
    let mut data = Vec::with_capacity(frames.len() * cfg.num_ceps);
    let mut log_energies = vec![0.0f64; cfg.num_filters];
    for frame in &frames {
        let windowed = apply_window(frame, cfg.window);
        let spectrum = power_spectrum_with(&windowed, &fft, &mut buf);
        for (slot, filter) in log_energies.iter_mut().zip(bank.iter()) {
            let energy: f64 = filter.iter().zip(spectrum.iter()).map(|(w, p)| w * p).sum();
            *slot = energy.max(cfg.log_floor).ln();
        }
        for k in 0..cfg.num_ceps {
            data.push(dct_coefficient(&log_energies, k));
        }
    }
    FeatureMatrix::from_raw(data, cfg.num_ceps, cfg.fingerprint())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn buffer(samples: Vec<f32>) -> AudioBuffer {
        AudioBuffer::from_samples(samples, 16_000).unwrap()
    }

    #[test]
    fn mel_anchor_points() {
        assert_eq!(hz_to_mel(0.0).unwrap(), 0.0);
        let m1000 = hz_to_mel(1000.0).unwrap();
        assert!((m1000 - 1000.0).abs() < 0.5, "1 kHz maps to {m1000} mel");
        let expected_700 = 2595.0 * 2f64.log10();
        assert!((hz_to_mel(700.0).unwrap() - expected_700).abs() < 1e-9);
    }

    #[test]
    fn mel_rejects_negative() {
        assert!(matches!(hz_to_mel(-1.0), Err(MfccError::NegativeFrequency(_))));
        assert!(matches!(mel_to_hz(-1.0), Err(MfccError::NegativeMel(_))));
    }

    #[test]
    fn mel_inverse_round_trip() {
        assert_eq!(mel_to_hz(0.0).unwrap(), 0.0);
        for f in [1.0, 137.5, 500.0, 700.0, 1234.5, 5000.0, 8000.0] {
            let back = mel_to_hz(hz_to_mel(f).unwrap()).unwrap();
            assert!((back - f).abs() <= 1e-6 * f, "{f} round-trips to {back}");
        }
        let m = hz_to_mel(mel_to_hz(500.0).unwrap()).unwrap();
        assert!((m - 500.0).abs() <= 1e-6 * 500.0);
    }

    #[test]
    fn frame_counts_match_formula() {
        let cfg = MfccConfig::default();
        assert_eq!(frame_signal(&buffer(vec![0.1; 400]), &cfg).unwrap().len(), 1);
        let frames = frame_signal(&buffer(vec![0.1; 720]), &cfg).unwrap();
        assert_eq!(frames.len(), 3);
        assert!(frames.iter().all(|f| f.len() == 400));
        assert!(matches!(
            frame_signal(&buffer(vec![0.1; 399]), &cfg),
            Err(MfccError::TooShort { len: 399, frame_len: 400 })
        ));
    }

    #[test]
    fn frame_starts_follow_shift() {
        let cfg = MfccConfig::default();
        let samples: Vec<f32> = (0..720).map(|i| (i as f32 / 1000.0) - 0.3).collect();
        let frames = frame_signal(&buffer(samples.clone()), &cfg).unwrap();
        for (t, frame) in frames.iter().enumerate() {
            assert_eq!(frame[0], samples[t * 160] as f64);
        }
    }

    #[test]
    fn rectangular_window_is_identity() {
        let frame = vec![0.3, -0.2, 0.9];
        assert_eq!(apply_window(&frame, Window::Rectangular), frame);
    }

    #[test]
    fn hamming_window_endpoints_and_midpoint() {
        let n = 401;
        let out = apply_window(&vec![1.0; n], Window::Hamming);
        assert!((out[0] - 0.08).abs() < 1e-12);
        assert!((out[n - 1] - 0.08).abs() < 1e-12);
        assert!((out[n / 2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_spectrum_of_zeros_is_zero() {
        let spec = power_spectrum(&[0.0; 64], 64).unwrap();
        assert_eq!(spec.len(), 33);
        assert!(spec.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn power_spectrum_concentrates_bin_tone() {
        let n = 128;
        let k0 = 9;
        let frame: Vec<f64> = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * k0 as f64 * i as f64 / n as f64).cos())
            .collect();
        let spec = power_spectrum(&frame, n).unwrap();
        // cosine at an exact bin frequency puts (N/2)^2 there and ~0 elsewhere
        let expected = (n as f64 / 2.0).powi(2);
        assert!((spec[k0] - expected).abs() < 1e-6 * expected);
        for (k, &p) in spec.iter().enumerate() {
            if k != k0 {
                assert!(p < 1e-9 * expected, "leakage at bin {k}: {p}");
            }
        }
    }

    #[test]
    fn power_spectrum_rejects_bad_fft_size() {
        assert!(matches!(
            power_spectrum(&[0.0; 100], 65),
            Err(MfccError::Config(_))
        ));
        assert!(matches!(
            power_spectrum(&[0.0; 100], 64),
            Err(MfccError::Config(_))
        ));
    }

    #[test]
    fn filterbank_shape_and_weights() {
        let cfg = MfccConfig::default();
        let fft_size = 512;
        let bank = build_mel_filterbank(&cfg, 16_000, fft_size).unwrap();
        assert_eq!(bank.len(), 26);
        assert!(bank.iter().all(|row| row.len() == 257));
        for (m, row) in bank.iter().enumerate() {
            assert!(row.iter().any(|&w| w > 0.0), "filter {m} is empty");
            assert!(row.iter().all(|&w| (0.0..=1.0).contains(&w)));
        }
        // no weight below fmin or above fmax
        let bin_hz = 16_000.0 / fft_size as f64;
        for row in &bank {
            for (k, &w) in row.iter().enumerate() {
                let f = k as f64 * bin_hz;
                if f < cfg.fmin_hz - bin_hz || f > cfg.fmax_hz + bin_hz {
                    assert_eq!(w, 0.0, "weight at {f} Hz");
                }
            }
        }
    }

    #[test]
    fn filterbank_centers_are_mel_uniform() {
        let cfg = MfccConfig::default();
        let fft_size = 512;
        let bank = build_mel_filterbank(&cfg, 16_000, fft_size).unwrap();
        let bin_hz = 16_000.0 / fft_size as f64;
        // center of filter m = bin with weight 1.0
        let centers: Vec<f64> = bank
            .iter()
            .map(|row| {
                let k = row.iter().position(|&w| w == 1.0).unwrap();
                k as f64 * bin_hz
            })
            .collect();
        let mel_lo = hz_to_mel(cfg.fmin_hz).unwrap();
        let mel_hi = hz_to_mel(cfg.fmax_hz).unwrap();
        let step = (mel_hi - mel_lo) / (cfg.num_filters + 1) as f64;
        for (m, &c) in centers.iter().enumerate() {
            if m > 0 {
                assert!(c > centers[m - 1], "centers not increasing at {m}");
            }
            let ideal_hz = mel_to_hz(mel_lo + step * (m + 1) as f64).unwrap();
            assert!(
                (c - ideal_hz).abs() <= bin_hz,
                "filter {m} center {c} Hz vs ideal {ideal_hz} Hz"
            );
        }
    }

    #[test]
    fn filterbank_collapse_is_config_error() {
        let cfg = MfccConfig { fft_size: Some(64), ..MfccConfig::default() };
        // 64-point FFT at 16 kHz has 250 Hz bins; 26 filters in 300..5000 Hz collapse
        assert!(matches!(
            build_mel_filterbank(&cfg, 16_000, 64),
            Err(MfccError::Config(_))
        ));
    }

    #[test]
    fn dct_of_constant_is_dc_only() {
        let c = 3.7f64;
        let out = dct_ii_orthonormal(&vec![c; 26]);
        assert!((out[0] - 26f64.sqrt() * c).abs() < 1e-12);
        for &v in &out[1..] {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn default_config_on_one_second_gives_98_by_12() {
        let samples: Vec<f32> = (0..16_000).map(|i| 0.5 * (i as f32 * 0.2).sin()).collect();
        let features = extract_mfcc(&buffer(samples), &MfccConfig::default()).unwrap();
        assert_eq!(features.num_frames(), 98);
        assert_eq!(features.num_ceps(), 12);
        assert_eq!(features.fingerprint(), MfccConfig::default().fingerprint());
    }

    #[test]
    fn silence_extracts_finite_features() {
        let audio = buffer(vec![0.0; 4000]);
        let features = extract_mfcc(&audio, &MfccConfig::default()).unwrap();
        assert!(features.data().iter().all(|v| v.is_finite()));
        // all filterbank energies clamp to the floor, so coefficients 1.. vanish
        let row = features.row(0);
        let expected_c0 = 26f64.sqrt() * 1e-10f64.ln();
        assert!((row[0] - expected_c0).abs() < 1e-9);
        for &v in &row[1..] {
            assert!(v.abs() < 1e-9);
        }
    }

    #[test]
    fn config_validation_errors() {
        let audio = buffer(vec![0.1; 4000]);
        let bad_band = MfccConfig { fmax_hz: 9000.0, ..MfccConfig::default() };
        assert!(matches!(extract_mfcc(&audio, &bad_band), Err(MfccError::Config(_))));
        let bad_ceps = MfccConfig { num_ceps: 27, ..MfccConfig::default() };
        assert!(matches!(extract_mfcc(&audio, &bad_ceps), Err(MfccError::Config(_))));
        let bad_shift = MfccConfig { frame_shift_ms: 30, ..MfccConfig::default() };
        assert!(matches!(extract_mfcc(&audio, &bad_shift), Err(MfccError::Config(_))));
    }

    #[test]
    fn fingerprint_tracks_config_changes() {
        let base = MfccConfig::default();
        let hamming = MfccConfig { window: Window::Hamming, ..base.clone() };
        assert_ne!(base.fingerprint(), hamming.fingerprint());
        assert_eq!(base.fingerprint(), MfccConfig::default().fingerprint());
    }

    #[test]
    fn feature_matrix_validates_rows() {
        let ok = FeatureMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(ok.num_frames(), 2);
        assert_eq!(ok.row(1), &[3.0, 4.0]);
        assert!(matches!(
            FeatureMatrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]),
            Err(MfccError::RaggedRows { .. })
        ));
        assert!(matches!(
            FeatureMatrix::from_rows(&[vec![f64::NAN]]),
            Err(MfccError::NonFinite { .. })
        ));
    }
}
