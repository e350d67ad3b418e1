//! Patients and organs CSV files.
//!
//! ```text
//! id,arrival_day,epts        id,arrival_day,kdpi
//! p1,0,55                    o1,1,40
//! ```
//!
//! The header must match exactly. Ids match `[A-Za-z0-9_-]+`, days are
//! non-negative integers and scores integers in `0..=100`; no quoting.

use std::collections::HashMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use organmatch_core::population::{Instance, Organ, Patient};

use crate::error::Error;

pub const PATIENTS_HEADER: [&str; 3] = ["id", "arrival_day", "epts"];
pub const ORGANS_HEADER: [&str; 3] = ["id", "arrival_day", "kdpi"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: expected header `{expected}`")]
    Header { line: u64, expected: String },
    #[error("line {line}: expected 3 fields, found {found}")]
    FieldCount { line: u64, found: usize },
    #[error("line {line}: {field} `{value}` is not an integer")]
    NotInteger { line: u64, field: &'static str, value: String },
    #[error("line {line}: arrival_day {value} is negative")]
    NegativeDay { line: u64, value: i64 },
    #[error("line {line}: arrival_day {value} is too large")]
    DayTooLarge { line: u64, value: i64 },
    #[error("line {line}: {field} {value} is outside 0..=100")]
    ScoreOutOfRange { line: u64, field: &'static str, value: i64 },
    #[error("line {line}: invalid id `{id}` (expected [A-Za-z0-9_-]+)")]
    InvalidId { line: u64, id: String },
    #[error("line {line}: duplicate id `{id}` (first seen on line {first})")]
    DuplicateId { line: u64, id: String, first: u64 },
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
}

struct Row {
    line: u64,
    id: String,
    arrival_day: u32,
    score: i64,
}

fn parse_rows(input: impl Read, header: [&'static str; 3]) -> Result<Vec<Row>, FormatError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(input);
    let mut records = reader.records();
    let expected = header.join(",");
    match records.next() {
        Some(Ok(first)) if first.iter().eq(header) => {}
        Some(Err(e)) => return Err(malformed(e)),
        _ => return Err(FormatError::Header { line: 1, expected }),
    }

    let score_field = header[2];
    let mut rows = Vec::new();
    let mut first_seen: HashMap<String, u64> = HashMap::new();
    for record in records {
        let record = record.map_err(malformed)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 3 {
            return Err(FormatError::FieldCount { line, found: record.len() });
        }
        let integer = |field: &'static str, value: &str| {
            value
                .parse::<i64>()
                .map_err(|_| FormatError::NotInteger { line, field, value: value.to_string() })
        };
        let id = record[0].to_string();
        let day = integer("arrival_day", &record[1])?;
        let score = integer(score_field, &record[2])?;
        if day < 0 {
            return Err(FormatError::NegativeDay { line, value: day });
        }
        let arrival_day = u32::try_from(day).map_err(|_| FormatError::DayTooLarge { line, value: day })?;
        if !(0..=100).contains(&score) {
            return Err(FormatError::ScoreOutOfRange { line, field: score_field, value: score });
        }
        if let Some(&first) = first_seen.get(&id) {
            return Err(FormatError::DuplicateId { line, id, first });
        }
        first_seen.insert(id.clone(), line);
        rows.push(Row { line, id, arrival_day, score });
    }
    Ok(rows)
}

fn malformed(e: csv::Error) -> FormatError {
    let line = e.position().map_or(0, |p| p.line());
    FormatError::Malformed { line, message: e.to_string() }
}

fn checked<T>(row: &Row, built: Result<T, organmatch_core::Error>) -> Result<T, FormatError> {
    built.map_err(|_| FormatError::InvalidId { line: row.line, id: row.id.clone() })
}

/// Rows in file order.
pub fn parse_patients(input: impl Read) -> Result<Vec<Patient>, FormatError> {
    parse_rows(input, PATIENTS_HEADER)?
        .iter()
        .map(|row| checked(row, Patient::new(&row.id, row.arrival_day, row.score)))
        .collect()
}

/// Rows in file order.
pub fn parse_organs(input: impl Read) -> Result<Vec<Organ>, FormatError> {
    parse_rows(input, ORGANS_HEADER)?
        .iter()
        .map(|row| checked(row, Organ::new(&row.id, row.arrival_day, row.score)))
        .collect()
}

pub fn write_patients(out: impl Write, patients: &[Patient]) -> std::io::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(PATIENTS_HEADER)?;
    for p in patients {
        writer.write_record([p.id.as_str(), &p.arrival_day.to_string(), &p.epts.to_string()])?;
    }
    writer.flush()
}

pub fn write_organs(out: impl Write, organs: &[Organ]) -> std::io::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(ORGANS_HEADER)?;
    for o in organs {
        writer.write_record([o.id.as_str(), &o.arrival_day.to_string(), &o.kdpi.to_string()])?;
    }
    writer.flush()
}

/// Reads and validates an instance from its two files.
pub fn read_instance(patients: &Path, organs: &Path) -> Result<Instance, Error> {
    let open = |path: &Path| fs::File::open(path).map_err(|e| Error::io(path, e));
    let p = parse_patients(open(patients)?).map_err(|source| Error::Format { path: patients.into(), source })?;
    let o = parse_organs(open(organs)?).map_err(|source| Error::Format { path: organs.into(), source })?;
    Ok(Instance::new(p, o)?)
}

/// Writes `patients.csv` and `organs.csv` into `dir`, creating it if needed.
pub fn write_instance(dir: &Path, instance: &Instance) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let patients = dir.join("patients.csv");
    let organs = dir.join("organs.csv");
    let create = |path: &Path| fs::File::create(path).map_err(|e| Error::io(path, e));
    write_patients(create(&patients)?, instance.patients()).map_err(|e| Error::io(&patients, e))?;
    write_organs(create(&organs)?, instance.organs()).map_err(|e| Error::io(&organs, e))?;
    Ok(())
}
