//! JSONL persistence for codes and search results.

use std::fs::OpenOptions;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use circuit_codes::{canonical_form, is_symmetric, CodeParams, Label, TransitionSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Searched,
    User,
    Table,
}

/// One code per JSONL line. Field order is fixed so output is byte-stable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeRecord {
    pub d: usize,
    pub k: usize,
    pub n: usize,
    pub transitions: Vec<Label>,
    pub symmetric: bool,
    pub canonical: bool,
    pub source: Source,
}

#[derive(Debug, thiserror::Error)]
pub enum RecordError {
    #[error("malformed record: {0}")]
    Json(#[from] serde_json::Error),
    #[error("record length n={n} does not match {len} transitions")]
    LengthMismatch { n: usize, len: usize },
    #[error(transparent)]
    Code(#[from] circuit_codes::Error),
}

impl CodeRecord {
    pub fn from_sequence(seq: &TransitionSequence, params: CodeParams, source: Source) -> Self {
        CodeRecord {
            d: params.d,
            k: params.k,
            n: seq.len(),
            transitions: seq.as_slice().to_vec(),
            symmetric: is_symmetric(seq),
            canonical: canonical_form(seq, false).sequence == *seq,
            source,
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records always serialize")
    }

    pub fn parse_line(line: &str) -> Result<Self, RecordError> {
        let record: CodeRecord = serde_json::from_str(line)?;
        if record.n != record.transitions.len() {
            return Err(RecordError::LengthMismatch {
                n: record.n,
                len: record.transitions.len(),
            });
        }
        Ok(record)
    }

    pub fn params(&self) -> Result<CodeParams, RecordError> {
        Ok(CodeParams::new(self.d, self.k)?)
    }

    pub fn sequence(&self) -> Result<TransitionSequence, RecordError> {
        let seq = TransitionSequence::new(self.transitions.clone())?;
        seq.validate(self.d)?;
        Ok(seq)
    }
}

/// Appends lines to a JSONL file, creating it if needed. Existing content is
/// never rewritten.
pub fn append_lines<I, S>(path: &Path, lines: I) -> io::Result<()>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    for line in lines {
        writeln!(file, "{}", line.as_ref())?;
    }
    Ok(())
}
