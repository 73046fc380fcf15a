//! Radius traces stored as `t_s,R_m` CSV.

use std::path::Path;

use thiserror::Error;

use crate::trajectory::{TabulatedTrajectory, MIN_SAMPLES};

pub const TRACE_HEADER: [&str; 2] = ["t_s", "R_m"];

/// Problems with the content of a trace file. Lines are 1-based file lines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("line 1: header must be `t_s,R_m`, found `{found}`")]
    BadHeader { found: String },
    #[error("line {line}: expected 2 fields, found {found}")]
    FieldCount { line: u64, found: usize },
    #[error("line {line}, field {field}: `{value}` is not a number")]
    NonNumeric {
        line: u64,
        field: &'static str,
        value: String,
    },
    #[error("line {line}: time {t:e} s does not increase on the previous row")]
    NonMonotonic { line: u64, t: f64 },
    #[error("line {line}: radius {value:e} m is not positive")]
    NonPositive { line: u64, value: f64 },
    #[error("at least {MIN_SAMPLES} data rows are required, found {0}")]
    TooFewRows(usize),
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
}

/// Parse trace text into `(t, R)` samples, validated row by row.
pub fn parse_trace(text: &str) -> Result<Vec<(f64, f64)>, TraceError> {
    read_samples(text.as_bytes())
}

fn read_samples<R: std::io::Read>(reader: R) -> Result<Vec<(f64, f64)>, TraceError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| TraceError::Malformed {
        line: 1,
        message: e.to_string(),
    })?;
    if header.len() != 2 || header.iter().zip(TRACE_HEADER).any(|(a, b)| a != b) {
        return Err(TraceError::BadHeader {
            found: header.iter().collect::<Vec<_>>().join(","),
        });
    }
    let mut samples: Vec<(f64, f64)> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| TraceError::Malformed {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(TraceError::FieldCount {
                line,
                found: record.len(),
            });
        }
        let field = |i: usize, name: &'static str| -> Result<f64, TraceError> {
            let raw = &record[i];
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(TraceError::NonNumeric {
                    line,
                    field: name,
                    value: raw.to_string(),
                }),
            }
        };
        let t = field(0, TRACE_HEADER[0])?;
        let r = field(1, TRACE_HEADER[1])?;
        if let Some(&(prev, _)) = samples.last() {
            if t <= prev {
                return Err(TraceError::NonMonotonic { line, t });
            }
        }
        if r <= 0.0 {
            return Err(TraceError::NonPositive { line, value: r });
        }
        samples.push((t, r));
    }
    if samples.len() < MIN_SAMPLES {
        return Err(TraceError::TooFewRows(samples.len()));
    }
    Ok(samples)
}

/// Read a trace file into a trajectory with the default baseline.
pub(super) fn load(path: &Path) -> Result<Result<TabulatedTrajectory, TraceError>, std::io::Error> {
    let file = std::fs::File::open(path)?;
    Ok(read_samples(std::io::BufReader::new(file)).map(|samples| {
        TabulatedTrajectory::new(samples).expect("samples validated while reading")
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(n: usize) -> String {
        let mut s = String::from("t_s,R_m\n");
        for i in 0..n {
            s.push_str(&format!("{}e-9,{}e-6\n", i, 2.0 - 0.01 * i as f64));
        }
        s
    }

    #[test]
    fn reads_valid_trace() {
        let s = parse_trace(&rows(8)).unwrap();
        assert_eq!(s.len(), 8);
        assert_eq!(s[3], (3e-9, 1.97e-6));
    }

    #[test]
    fn rejects_bad_input_with_lines() {
        assert!(matches!(
            parse_trace("time,radius\n1,2\n"),
            Err(TraceError::BadHeader { .. })
        ));
        assert_eq!(parse_trace(&rows(7)), Err(TraceError::TooFewRows(7)));
        let dup = rows(8).replace("3e-9", "2e-9");
        assert!(matches!(
            parse_trace(&dup),
            Err(TraceError::NonMonotonic { line: 5, .. })
        ));
        let bad = rows(8).replace("4e-9", "four");
        assert!(matches!(
            parse_trace(&bad),
            Err(TraceError::NonNumeric { line: 6, field: "t_s", .. })
        ));
        let neg = rows(8).replace("1.95e-6", "-1.95e-6");
        assert!(matches!(
            parse_trace(&neg),
            Err(TraceError::NonPositive { line: 7, .. })
        ));
        let short = rows(8).replace("1.99e-6", "");
        assert!(matches!(parse_trace(&short), Err(TraceError::NonNumeric { line: 3, .. })));
        let wide = rows(8).replace("1.99e-6", "1.99e-6,3");
        assert!(matches!(parse_trace(&wide), Err(TraceError::FieldCount { line: 3, found: 3 })));
    }
}
