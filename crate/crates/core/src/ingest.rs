//! Trace and instance file I/O.
//!
//! Traces travel as UTF-8 CSV with the mandatory header
//! `timestamp_ms,cell_id,rss_dbm,label`; the label column may be empty.
//! Consecutive rows sharing a label are coalesced into ground-truth
//! segments at parse time, so the rest of the pipeline never deals with
//! per-row annotations. Instance files use the header
//! `window_start_ms,f0..f35,label`.

use std::io::{Read, Write};

use crate::trace::{CellId, FeatureVector, Mode, Sample, Segment, Trace};

/// Exact trace-file header.
pub const TRACE_HEADER: [&str; 4] = ["timestamp_ms", "cell_id", "rss_dbm", "label"];

/// Trace or instance file parsing failure.
#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("line {line}: timestamp does not increase")]
    NonIncreasingTimestamp { line: u64 },
    #[error("missing or wrong header (expected `{expected}`)")]
    BadHeader { expected: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ParseError {
    fn malformed(line: u64, message: impl Into<String>) -> Self {
        ParseError::Malformed {
            line,
            message: message.into(),
        }
    }
}

fn csv_error(err: csv::Error) -> ParseError {
    let line = err
        .position()
        .map(|p| p.line())
        .unwrap_or_default();
    match err.into_kind() {
        csv::ErrorKind::Io(io) => ParseError::Io(io),
        other => ParseError::malformed(line, format!("{other:?}")),
    }
}

/// Parses a trace file, coalescing per-row labels into segments.
///
/// Rows must be in strictly increasing timestamp order. A maximal run of
/// rows sharing one label becomes a segment spanning the run's first and
/// last timestamps (inclusive); unlabeled rows produce no coverage.
pub fn parse_trace<R: Read>(reader: R) -> Result<Trace, ParseError> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .from_reader(reader);

    let expected = TRACE_HEADER.join(",");
    let mut records = csv_reader.records();
    match records.next() {
        Some(Ok(header)) if header.iter().eq(TRACE_HEADER) => {}
        Some(Err(err)) => return Err(csv_error(err)),
        _ => return Err(ParseError::BadHeader { expected }),
    }

    let mut samples: Vec<Sample> = Vec::new();
    let mut segments: Vec<Segment> = Vec::new();
    // Open run of identically labeled rows: (mode, start_ms, last_ms).
    let mut open_run: Option<(Mode, i64, i64)> = None;

    for record in records {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or_default();
        if record.len() != 4 {
            return Err(ParseError::malformed(
                line,
                format!("expected 4 columns, got {}", record.len()),
            ));
        }

        let timestamp_ms: i64 = record[0]
            .parse()
            .map_err(|_| ParseError::malformed(line, format!("bad timestamp {:?}", &record[0])))?;
        if record[1].is_empty() {
            return Err(ParseError::malformed(line, "empty cell_id"));
        }
        let rss_dbm: f64 = record[2]
            .parse()
            .map_err(|_| ParseError::malformed(line, format!("bad rss_dbm {:?}", &record[2])))?;
        if !rss_dbm.is_finite() {
            return Err(ParseError::malformed(line, "non-finite rss_dbm"));
        }
        let label = if record[3].is_empty() {
            None
        } else {
            Some(
                record[3]
                    .parse::<Mode>()
                    .map_err(|e| ParseError::malformed(line, e.to_string()))?,
            )
        };

        if let Some(last) = samples.last() {
            if timestamp_ms <= last.timestamp_ms {
                return Err(ParseError::NonIncreasingTimestamp { line });
            }
        }

        open_run = match (open_run, label) {
            (Some((mode, start, _)), Some(next)) if mode == next => {
                Some((mode, start, timestamp_ms))
            }
            (prev, next) => {
                if let Some((mode, start, end)) = prev {
                    segments.push(Segment::new(start, end, mode));
                }
                next.map(|mode| (mode, timestamp_ms, timestamp_ms))
            }
        };

        samples.push(Sample::new(timestamp_ms, CellId::new(&record[1]), rss_dbm));
    }
    if let Some((mode, start, end)) = open_run {
        segments.push(Segment::new(start, end, mode));
    }

    Ok(Trace::new(samples, segments))
}

/// Formats a value to at most 6 significant digits, trimming trailing
/// zeros so integer-dBm readings stay clean (`-71`, not `-71.0000`).
fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// Writes a trace in the CSV format accepted by [`parse_trace`].
///
/// RSS is printed with 6 significant digits; row labels come from the
/// segment covering each sample's timestamp.
pub fn write_trace<W: Write>(trace: &Trace, writer: W) -> Result<(), std::io::Error> {
    let mut csv_writer = csv::Writer::from_writer(writer);
    csv_writer.write_record(TRACE_HEADER)?;
    for sample in &trace.samples {
        let label = trace
            .mode_at(sample.timestamp_ms)
            .map(|m| m.as_str())
            .unwrap_or("");
        csv_writer.write_record([
            sample.timestamp_ms.to_string().as_str(),
            sample.cell_id.as_str(),
            format_sig6(sample.rss_dbm).as_str(),
            label,
        ])?;
    }
    csv_writer.flush()?;
    Ok(())
}

fn instance_header(dims: usize) -> Vec<String> {
    let mut header = Vec::with_capacity(dims + 2);
    header.push("window_start_ms".to_string());
    header.extend((0..dims).map(|i| format!("f{i}")));
    header.push("label".to_string());
    header
}

/// Writes feature instances as CSV: `window_start_ms,f0..f35,label`.
pub fn write_instances<W: Write>(
    instances: &[FeatureVector],
    dims: usize,
    writer: W,
) -> Result<(), std::io::Error> {
    let mut csv_writer = csv::Writer::from_writer(writer);
    csv_writer.write_record(instance_header(dims))?;
    for instance in instances {
        let mut record = Vec::with_capacity(dims + 2);
        record.push(instance.window_start_ms.to_string());
        record.extend(instance.features.iter().map(|f| f.to_string()));
        record.push(
            instance
                .label
                .map(|m| m.as_str().to_string())
                .unwrap_or_default(),
        );
        csv_writer.write_record(record)?;
    }
    csv_writer.flush()?;
    Ok(())
}

/// Reads feature instances written by [`write_instances`].
///
/// The feature dimension is inferred from the header and must be uniform;
/// all feature values must be finite.
pub fn read_instances<R: Read>(reader: R) -> Result<Vec<FeatureVector>, ParseError> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .from_reader(reader);

    let mut records = csv_reader.records();
    let dims = match records.next() {
        Some(Ok(header)) => {
            let fields: Vec<&str> = header.iter().collect();
            let dims = fields.len().saturating_sub(2);
            if fields.first() != Some(&"window_start_ms")
                || fields.last() != Some(&"label")
                || fields[1..=dims] != instance_header(dims)[1..=dims]
            {
                return Err(ParseError::BadHeader {
                    expected: "window_start_ms,f0..fN,label".to_string(),
                });
            }
            dims
        }
        Some(Err(err)) => return Err(csv_error(err)),
        None => {
            return Err(ParseError::BadHeader {
                expected: "window_start_ms,f0..fN,label".to_string(),
            })
        }
    };

    let mut instances = Vec::new();
    for record in records {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or_default();
        if record.len() != dims + 2 {
            return Err(ParseError::malformed(
                line,
                format!("expected {} columns, got {}", dims + 2, record.len()),
            ));
        }
        let window_start_ms: i64 = record[0]
            .parse()
            .map_err(|_| ParseError::malformed(line, "bad window_start_ms"))?;
        let mut features = Vec::with_capacity(dims);
        for i in 0..dims {
            let value: f64 = record[i + 1].parse().map_err(|_| {
                ParseError::malformed(line, format!("bad feature f{i}: {:?}", &record[i + 1]))
            })?;
            if !value.is_finite() {
                return Err(ParseError::malformed(line, format!("non-finite feature f{i}")));
            }
            features.push(value);
        }
        let label_field = &record[dims + 1];
        let label = if label_field.is_empty() {
            None
        } else {
            Some(
                label_field
                    .parse::<Mode>()
                    .map_err(|e| ParseError::malformed(line, e.to_string()))?,
            )
        };
        instances.push(FeatureVector::new(window_start_ms, features, label));
    }
    Ok(instances)
}
