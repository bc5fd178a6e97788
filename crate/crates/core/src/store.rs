//! Binary persistence for labeled reference templates.
//!
//! TMPL format, little-endian throughout:
//!
//! ```text
//! magic           4 bytes  ASCII "TMPL"
//! version         u16      currently 1
//! fingerprint     u64      MFCC config fingerprint shared by all templates
//! num_ceps        u16      feature dimension
//! template_count  u32
//! per template:
//!   speaker_id        u16 length + UTF-8 bytes
//!   word_label        u16 length + UTF-8 bytes
//!   repetition_index  u32
//!   frame_count       u32
//!   features          frame_count * num_ceps f32, frame-major
//! trailer         u32      CRC-32 (IEEE) of all preceding bytes
//! ```
//!
//! Feature values are persisted as f32: recognition distances are
//! insensitive below 1e-6, and extraction precision beyond that is not
//! worth doubling the file size. Saving is deterministic, so equal stores
//! produce byte-identical files.

use std::io::Write;
use std::path::Path;
use thiserror::Error;

use crate::mfcc::FeatureMatrix;

pub const MAGIC: [u8; 4] = *b"TMPL";
pub const FORMAT_VERSION: u16 = 1;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("bad magic {0:?}, not a TMPL file")]
    BadMagic([u8; 4]),
    #[error("unsupported TMPL version {0}")]
    UnsupportedVersion(u16),
    #[error("truncated TMPL file")]
    Truncated,
    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    ChecksumMismatch { stored: u32, computed: u32 },
    #[error("corrupt TMPL file: {0}")]
    Corruption(String),
    #[error("duplicate template ({speaker}, {word}, {rep})")]
    Duplicate { speaker: String, word: String, rep: u32 },
    #[error("template fingerprint {got:#018x} does not match store fingerprint {expected:#018x}")]
    FingerprintMismatch { expected: u64, got: u64 },
    #[error("feature dimension {got} does not match store dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("word label must be non-empty")]
    EmptyLabel,
    #[error("template features must be non-empty")]
    EmptyFeatures,
    #[error("string field of {len} bytes exceeds the u16 length prefix")]
    FieldTooLong { len: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A labeled reference feature sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub speaker_id: String,
    pub word_label: String,
    pub repetition_index: u32,
    pub features: FeatureMatrix,
}

/// An ordered collection of templates sharing one config fingerprint.
///
/// `(speaker_id, word_label, repetition_index)` triples are unique. An
/// empty store has no fingerprint and adopts the first template's.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TemplateStore {
    templates: Vec<Template>,
}

impl TemplateStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    pub fn templates(&self) -> &[Template] {
        &self.templates
    }

    /// Fingerprint shared by the stored templates, `None` while empty.
    pub fn config_fingerprint(&self) -> Option<u64> {
        self.templates.first().map(|t| t.features.fingerprint())
    }

    pub fn num_ceps(&self) -> Option<usize> {
        self.templates.first().map(|t| t.features.num_ceps())
    }

    pub fn get(&self, speaker_id: &str, word_label: &str, repetition_index: u32) -> Option<&Template> {
        self.templates.iter().find(|t| {
            t.speaker_id == speaker_id
                && t.word_label == word_label
                && t.repetition_index == repetition_index
        })
    }

    /// Appends a template, enforcing label, uniqueness, and compatibility
    /// invariants.
    pub fn add_template(&mut self, template: Template) -> Result<(), StoreError> {
        if template.word_label.is_empty() {
            return Err(StoreError::EmptyLabel);
        }
        if template.features.is_empty() {
            return Err(StoreError::EmptyFeatures);
        }
        if let Some(expected) = self.config_fingerprint() {
            let got = template.features.fingerprint();
            if got != expected {
                return Err(StoreError::FingerprintMismatch { expected, got });
            }
        }
        if let Some(expected) = self.num_ceps() {
            let got = template.features.num_ceps();
            if got != expected {
                return Err(StoreError::DimensionMismatch { expected, got });
            }
        }
        if self
            .get(&template.speaker_id, &template.word_label, template.repetition_index)
            .is_some()
        {
            return Err(StoreError::Duplicate {
                speaker: template.speaker_id,
                word: template.word_label,
                rep: template.repetition_index,
            });
        }
        self.templates.push(template);
        Ok(())
    }
}

fn push_string(out: &mut Vec<u8>, s: &str) -> Result<(), StoreError> {
    let len = s.len();
    if len > u16::MAX as usize {
        return Err(StoreError::FieldTooLong { len });
    }
    out.extend_from_slice(&(len as u16).to_le_bytes());
    out.extend_from_slice(s.as_bytes());
    Ok(())
}

/// Serializes a store into TMPL bytes.
pub fn save_store_to_vec(store: &TemplateStore) -> Result<Vec<u8>, StoreError> {
    let mut out = Vec::new();
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&store.config_fingerprint().unwrap_or(0).to_le_bytes());
    out.extend_from_slice(&(store.num_ceps().unwrap_or(0) as u16).to_le_bytes());
    let count = u32::try_from(store.len())
        .map_err(|_| StoreError::Corruption("too many templates for the u32 count".into()))?;
    out.extend_from_slice(&count.to_le_bytes());
    for t in store.templates() {
        push_string(&mut out, &t.speaker_id)?;
        push_string(&mut out, &t.word_label)?;
        out.extend_from_slice(&t.repetition_index.to_le_bytes());
        let frames = u32::try_from(t.features.num_frames())
            .map_err(|_| StoreError::Corruption("too many frames for the u32 count".into()))?;
        out.extend_from_slice(&frames.to_le_bytes());
        for &v in t.features.data() {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(out)
}

/// Writes the TMPL serialization and returns the byte count written.
pub fn save_store<W: Write>(store: &TemplateStore, mut dest: W) -> Result<u64, StoreError> {
    let bytes = save_store_to_vec(store)?;
    dest.write_all(&bytes)?;
    Ok(bytes.len() as u64)
}

pub fn save_store_file<P: AsRef<Path>>(store: &TemplateStore, path: P) -> Result<u64, StoreError> {
    let file = std::fs::File::create(path)?;
    save_store(store, file)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], StoreError> {
        let end = self.pos.checked_add(n).ok_or(StoreError::Truncated)?;
        if end > self.bytes.len() {
            return Err(StoreError::Truncated);
        }
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u16(&mut self) -> Result<u16, StoreError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, StoreError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, StoreError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String, StoreError> {
        let len = self.u16()? as usize;
        let bytes = self.take(len)?;
        String::from_utf8(bytes.to_vec())
            .map_err(|_| StoreError::Corruption("string field is not UTF-8".into()))
    }

    fn at_end(&self) -> bool {
        self.pos == self.bytes.len()
    }
}

/// Parses TMPL bytes back into a store.
///
/// Every malformed input maps to a typed [`StoreError`]; arbitrary bytes
/// never panic. The CRC-32 trailer is verified before the body is parsed.
pub fn load_store(bytes: &[u8]) -> Result<TemplateStore, StoreError> {
    if bytes.len() < 4 {
        return Err(StoreError::Truncated);
    }
    let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(StoreError::BadMagic(magic));
    }
    if bytes.len() < 6 {
        return Err(StoreError::Truncated);
    }
    let version = u16::from_le_bytes(bytes[4..6].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(StoreError::UnsupportedVersion(version));
    }
    // minimum valid file: 20-byte header + 4-byte trailer
    if bytes.len() < 24 {
        return Err(StoreError::Truncated);
    }
    let (payload, trailer) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(trailer.try_into().unwrap());
    let computed = crc32fast::hash(payload);
    if stored != computed {
        return Err(StoreError::ChecksumMismatch { stored, computed });
    }

    let mut cur = Cursor { bytes: payload, pos: 6 };
    let fingerprint = cur.u64()?;
    let num_ceps = cur.u16()? as usize;
    let count = cur.u32()?;
    let mut store = TemplateStore::new();
    for _ in 0..count {
        let speaker_id = cur.string()?;
        let word_label = cur.string()?;
        let repetition_index = cur.u32()?;
        let frame_count = cur.u32()? as usize;
        let value_count = frame_count
            .checked_mul(num_ceps)
            .ok_or_else(|| StoreError::Corruption("feature size overflows".into()))?;
        let raw = cur.take(value_count.checked_mul(4).ok_or(StoreError::Truncated)?)?;
        let data: Vec<f64> = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
            .collect();
        let features = FeatureMatrix::from_raw(data, num_ceps, fingerprint)
            .map_err(|e| StoreError::Corruption(e.to_string()))?;
        store.add_template(Template { speaker_id, word_label, repetition_index, features })?;
    }
    if !cur.at_end() {
        return Err(StoreError::Corruption("trailing bytes after the last template".into()));
    }
    Ok(store)
}

pub fn load_store_file<P: AsRef<Path>>(path: P) -> Result<TemplateStore, StoreError> {
    let bytes = std::fs::read(path)?;
    load_store(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn template(speaker: &str, word: &str, rep: u32, values: &[f32]) -> Template {
        let rows: Vec<Vec<f64>> = values.iter().map(|&v| vec![v as f64, (v * 2.0) as f64]).collect();
        Template {
            speaker_id: speaker.into(),
            word_label: word.into(),
            repetition_index: rep,
            features: FeatureMatrix::from_rows(&rows).unwrap(),
        }
    }

    fn sample_store() -> TemplateStore {
        let mut store = TemplateStore::new();
        store.add_template(template("s01", "one", 0, &[0.5, -1.25, 3.0])).unwrap();
        store.add_template(template("s01", "two", 0, &[2.0, 0.125])).unwrap();
        store.add_template(template("s02", "one", 1, &[-0.75])).unwrap();
        store
    }

    #[test]
    fn add_enforces_uniqueness_and_compatibility() {
        let mut store = TemplateStore::new();
        store.add_template(template("s01", "one", 0, &[1.0])).unwrap();
        assert_eq!(store.len(), 1);
        assert_eq!(store.config_fingerprint(), Some(0));
        assert!(matches!(
            store.add_template(template("s01", "one", 0, &[2.0])),
            Err(StoreError::Duplicate { .. })
        ));
        let mut tagged = template("s01", "three", 0, &[1.0]);
        tagged.features = tagged.features.with_fingerprint(99);
        assert!(matches!(
            store.add_template(tagged),
            Err(StoreError::FingerprintMismatch { expected: 0, got: 99 })
        ));
        let skinny = Template {
            speaker_id: "s01".into(),
            word_label: "four".into(),
            repetition_index: 0,
            features: FeatureMatrix::from_rows(&[vec![1.0]]).unwrap(),
        };
        assert!(matches!(
            store.add_template(skinny),
            Err(StoreError::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn add_rejects_empty_label_and_features() {
        let mut store = TemplateStore::new();
        assert!(matches!(
            store.add_template(template("s01", "", 0, &[1.0])),
            Err(StoreError::EmptyLabel)
        ));
        let empty = Template {
            speaker_id: "s01".into(),
            word_label: "one".into(),
            repetition_index: 0,
            features: FeatureMatrix::from_rows(&[]).unwrap(),
        };
        assert!(matches!(store.add_template(empty), Err(StoreError::EmptyFeatures)));
    }

    #[test]
    fn round_trip_preserves_everything() {
        let store = sample_store();
        let bytes = save_store_to_vec(&store).unwrap();
        let loaded = load_store(&bytes).unwrap();
        assert_eq!(loaded, store);
    }

    #[test]
    fn save_is_deterministic() {
        let store = sample_store();
        assert_eq!(save_store_to_vec(&store).unwrap(), save_store_to_vec(&store).unwrap());
    }

    #[test]
    fn empty_store_round_trips() {
        let store = TemplateStore::new();
        let bytes = save_store_to_vec(&store).unwrap();
        assert_eq!(bytes.len(), 24);
        let loaded = load_store(&bytes).unwrap();
        assert!(loaded.is_empty());
    }

    #[test]
    fn load_rejects_bad_magic() {
        let mut bytes = save_store_to_vec(&sample_store()).unwrap();
        bytes[0] = b'X';
        assert!(matches!(load_store(&bytes), Err(StoreError::BadMagic(_))));
    }

    #[test]
    fn load_rejects_bad_version() {
        let mut bytes = save_store_to_vec(&TemplateStore::new()).unwrap();
        bytes[4] = 9;
        assert!(matches!(load_store(&bytes), Err(StoreError::UnsupportedVersion(9))));
    }

    #[test]
    fn load_rejects_truncation() {
        let bytes = save_store_to_vec(&sample_store()).unwrap();
        let cut = &bytes[..bytes.len() - 7];
        // the CRC check sees a mangled trailer before the body is parsed
        assert!(matches!(
            load_store(cut),
            Err(StoreError::ChecksumMismatch { .. } | StoreError::Truncated)
        ));
    }

    #[test]
    fn load_rejects_bit_flip() {
        let mut bytes = save_store_to_vec(&sample_store()).unwrap();
        let mid = bytes.len() / 2;
        bytes[mid] ^= 0x10;
        assert!(matches!(load_store(&bytes), Err(StoreError::ChecksumMismatch { .. })));
    }

    #[test]
    fn save_writes_byte_count() {
        let store = sample_store();
        let mut sink = Vec::new();
        let written = save_store(&store, &mut sink).unwrap();
        assert_eq!(written as usize, sink.len());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ref.tmpl");
        let store = sample_store();
        save_store_file(&store, &path).unwrap();
        assert_eq!(load_store_file(&path).unwrap(), store);
    }
}
