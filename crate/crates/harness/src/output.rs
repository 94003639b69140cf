//! CSV and JSON emission of trial records.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::trial::TrialRecord;
use crate::HarnessError;

pub const CSV_COLUMNS: [&str; 11] = [
    "seed",
    "n",
    "m",
    "d",
    "k",
    "or_queries",
    "parity_queries",
    "copies",
    "charged_quantum",
    "success",
    "ms",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

fn io(e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Io(e.to_string())
}

/// Writes `records` to `out`. CSV always starts with the header row.
pub fn emit<W: Write>(records: &[TrialRecord], format: Format, out: W) -> Result<(), HarnessError> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
            w.write_record(CSV_COLUMNS).map_err(io)?;
            for r in records {
                w.serialize(r).map_err(io)?;
            }
            w.flush().map_err(io)
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, records).map_err(io)?;
            out.write_all(b"\n").map_err(io)
        }
    }
}

/// Writes `records` to the file at `path`. An empty record list is an error
/// unless `allow_empty` is set.
pub fn write_records(
    path: &Path,
    format: Format,
    records: &[TrialRecord],
    allow_empty: bool,
) -> Result<(), HarnessError> {
    if records.is_empty() && !allow_empty {
        return Err(HarnessError::Io("no records to write".into()));
    }
    let file = File::create(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    emit(records, format, BufWriter::new(file))
}

/// Reads records written by [`emit`].
pub fn read_records<R: Read>(format: Format, input: R) -> Result<Vec<TrialRecord>, HarnessError> {
    match format {
        Format::Csv => csv::Reader::from_reader(input)
            .deserialize()
            .collect::<Result<Vec<_>, _>>()
            .map_err(io),
        Format::Json => serde_json::from_reader(input).map_err(io),
    }
}
