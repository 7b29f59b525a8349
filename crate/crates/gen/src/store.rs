//! Append-only, line-delimited JSON store of generation records.
//!
//! A crash can leave a partial last line; opening the store truncates it.
//! Any other unreadable line is reported as corruption.

use std::collections::BTreeSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use readctl_core::Level;

use crate::error::StoreError;
use crate::provider::ProviderMeta;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RecordKey {
    pub run_id: String,
    pub source_id: String,
    pub target: Level,
    pub step: u8,
}

impl std::fmt::Display for RecordKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {}, step {})", self.run_id, self.source_id, self.target, self.step)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub run_id: String,
    pub source_id: String,
    pub target: Level,
    pub step: u8,
    /// Whether this record holds the run's final output for its pair.
    pub is_final: bool,
    /// The document sent: the source for step 1, the step-1 output for step 2.
    pub input_text: String,
    pub output_text: String,
    /// The provider output was rejected and `output_text` is `input_text`.
    pub fallback: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback_reason: Option<String>,
    /// Rejected provider output, kept for inspection.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rejected_output: Option<String>,
    /// The step-1 record a step-2 record continues from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<RecordKey>,
    pub provider_meta: ProviderMeta,
}

impl GenerationRecord {
    pub fn key(&self) -> RecordKey {
        RecordKey {
            run_id: self.run_id.clone(),
            source_id: self.source_id.clone(),
            target: self.target,
            step: self.step,
        }
    }
}

pub struct RecordStore {
    path: PathBuf,
    file: File,
    keys: BTreeSet<RecordKey>,
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads every complete record. Returns the records and the byte length of
/// the readable prefix.
fn scan(path: &Path) -> Result<(Vec<GenerationRecord>, u64), StoreError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok((Vec::new(), 0)),
        Err(e) => return Err(io(path)(e)),
    };
    let mut reader = BufReader::new(file);
    let mut records = Vec::new();
    let mut good = 0u64;
    let mut buf = Vec::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        let n = reader.read_until(b'\n', &mut buf).map_err(io(path))?;
        if n == 0 {
            break;
        }
        line_no += 1;
        // A final line without its newline is a torn write: keep what precedes it.
        if buf.last() != Some(&b'\n') {
            break;
        }
        if buf.iter().all(u8::is_ascii_whitespace) {
            good += n as u64;
            continue;
        }
        let record = serde_json::from_slice::<GenerationRecord>(&buf).map_err(|e| StoreError::Corrupt {
            path: path.to_path_buf(),
            line: line_no,
            reason: e.to_string(),
        })?;
        records.push(record);
        good += n as u64;
    }
    Ok((records, good))
}

/// All complete records in file order.
pub fn read_records(path: &Path) -> Result<Vec<GenerationRecord>, StoreError> {
    scan(path).map(|(records, _)| records)
}

impl RecordStore {
    /// Opens or creates the store, dropping a torn final line.
    pub fn open(path: &Path) -> Result<(Self, Vec<GenerationRecord>), StoreError> {
        let (records, good) = scan(path)?;
        let mut file = OpenOptions::new()
            .create(true)
            .read(true)
            .write(true)
            .truncate(false)
            .open(path)
            .map_err(io(path))?;
        let len = file.metadata().map_err(io(path))?.len();
        if len > good {
            log::warn!("{}: dropping {} byte(s) of incomplete record", path.display(), len - good);
            file.set_len(good).map_err(io(path))?;
        }
        file.seek(SeekFrom::End(0)).map_err(io(path))?;
        let mut keys = BTreeSet::new();
        for r in &records {
            if !keys.insert(r.key()) {
                return Err(StoreError::Duplicate(r.key().to_string()));
            }
        }
        Ok((
            RecordStore {
                path: path.to_path_buf(),
                file,
                keys,
            },
            records,
        ))
    }

    pub fn contains(&self, key: &RecordKey) -> bool {
        self.keys.contains(key)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Appends one record as a single line. The write reaches the operating
    /// system before this returns; call [`RecordStore::sync`] to force it to disk.
    pub fn append(&mut self, record: &GenerationRecord) -> Result<(), StoreError> {
        let key = record.key();
        if self.keys.contains(&key) {
            return Err(StoreError::Duplicate(key.to_string()));
        }
        let mut line = serde_json::to_vec(record).map_err(|e| StoreError::Encode(e.to_string()))?;
        line.push(b'\n');
        self.file.write_all(&line).map_err(io(&self.path))?;
        self.keys.insert(key);
        Ok(())
    }

    pub fn sync(&mut self) -> Result<(), StoreError> {
        self.file.sync_data().map_err(io(&self.path))
    }
}
