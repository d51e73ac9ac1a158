//! CSV tables: an optional `# key=value; ...` metadata line, then a header row.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use horizon_core::arena::{MaxRegretTable, RegretTrace};

use crate::error::{CliError, CliResult};

pub const TABLE_HEADER: [&str; 3] = ["round", "learner_id", "max_regret"];
pub const TRACE_HEADER: [&str; 7] = [
    "round",
    "learner_id",
    "trial_id",
    "loss",
    "cum_loss",
    "comparator",
    "regret",
];

/// Renders `pairs` as the leading comment line.
pub fn metadata_line(pairs: &[(&str, String)]) -> String {
    let body: Vec<String> = pairs.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("# {}\n", body.join("; "))
}

fn create(path: &Path) -> CliResult<File> {
    File::create(path).map_err(|e| CliError::io(path, e))
}

/// Rows are grouped by learner, rounds ascending.
pub fn write_table(path: &Path, metadata: &str, table: &MaxRegretTable) -> CliResult<()> {
    let mut file = create(path)?;
    file.write_all(metadata.as_bytes())
        .map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(TABLE_HEADER)?;
    for (learner, values) in table.learners.iter().zip(&table.max_regret) {
        for (round, v) in table.rounds.iter().zip(values) {
            w.write_record([round.to_string(), learner.clone(), v.to_string()])?;
        }
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(())
}

pub fn write_traces(path: &Path, metadata: &str, traces: &[RegretTrace]) -> CliResult<()> {
    let mut file = create(path)?;
    file.write_all(metadata.as_bytes())
        .map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(TRACE_HEADER)?;
    for t in traces {
        for r in &t.rows {
            w.write_record([
                r.round.to_string(),
                t.learner.clone(),
                t.trial.to_string(),
                r.loss.to_string(),
                r.cum_loss.to_string(),
                r.comparator.to_string(),
                r.regret.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(())
}

/// One polyline per learner, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub learner: String,
    pub points: Vec<(f64, f64)>,
}

/// Reads a max-regret table back; the metadata line is returned separately.
pub fn read_table(path: &Path) -> CliResult<(Option<String>, Vec<Series>)> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut first = String::new();
    reader
        .read_line(&mut first)
        .map_err(|e| CliError::io(path, e))?;
    let (metadata, rest) = match first.strip_prefix('#') {
        Some(m) => (Some(m.trim().to_string()), String::new()),
        None => (None, first),
    };
    let chained = std::io::Cursor::new(rest.into_bytes()).chain(reader);
    let mut r = csv::Reader::from_reader(chained);
    let header = r.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != TABLE_HEADER {
        return Err(CliError::config(format!(
            "{} is not a max-regret table",
            path.display()
        )));
    }
    let mut series: Vec<Series> = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let parse = |i: usize| -> CliResult<f64> {
            rec[i].parse::<f64>().map_err(|_| {
                CliError::config(format!("bad number `{}` in {}", &rec[i], path.display()))
            })
        };
        let point = (parse(0)?, parse(2)?);
        match series.iter_mut().find(|s| s.learner == rec[1]) {
            Some(s) => s.points.push(point),
            None => series.push(Series {
                learner: rec[1].to_string(),
                points: vec![point],
            }),
        }
    }
    Ok((metadata, series))
}

/// File bytes without a leading metadata line.
pub fn body_bytes(path: &Path) -> CliResult<Vec<u8>> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    if bytes.first() == Some(&b'#') {
        let cut = bytes
            .iter()
            .position(|&b| b == b'\n')
            .map_or(bytes.len(), |i| i + 1);
        return Ok(bytes[cut..].to_vec());
    }
    Ok(bytes)
}
