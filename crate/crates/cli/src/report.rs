use std::path::Path;

use netform::io::format_float;

use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// No closed form applies to this run.
    Skip,
}

impl Status {
    pub fn of(pass: bool) -> Status {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        }
    }
}

/// One estimate compared with its prediction.
#[derive(Debug, Clone)]
pub struct Row {
    pub check: &'static str,
    pub stratum: String,
    pub estimate: Option<f64>,
    pub ci: Option<(f64, f64)>,
    pub samples: Option<usize>,
    pub oracle: Option<f64>,
    pub status: Status,
    pub note: String,
}

impl Row {
    pub fn new(check: &'static str, stratum: impl Into<String>) -> Row {
        Row {
            check,
            stratum: stratum.into(),
            estimate: None,
            ci: None,
            samples: None,
            oracle: None,
            status: Status::Skip,
            note: String::new(),
        }
    }

    pub fn estimate(mut self, x: f64) -> Row {
        self.estimate = Some(x);
        self
    }

    pub fn ci(mut self, lo: f64, hi: f64) -> Row {
        self.ci = Some((lo, hi));
        self
    }

    pub fn samples(mut self, n: usize) -> Row {
        self.samples = Some(n);
        self
    }

    pub fn oracle(mut self, x: f64) -> Row {
        self.oracle = Some(x);
        self
    }

    pub fn status(mut self, s: Status) -> Row {
        self.status = s;
        self
    }

    pub fn pass(self, ok: bool) -> Row {
        self.status(Status::of(ok))
    }

    pub fn note(mut self, n: impl Into<String>) -> Row {
        self.note = n.into();
        self
    }
}

fn num(x: Option<f64>) -> String {
    x.filter(|v| v.is_finite()).map(format_float).unwrap_or_default()
}

pub fn write(path: &Path, rows: &[Row]) -> CliResult {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "check", "stratum", "estimate", "ci_low", "ci_high", "samples", "oracle", "status", "note",
    ])?;
    for r in rows {
        w.write_record([
            r.check.to_string(),
            r.stratum.clone(),
            num(r.estimate),
            num(r.ci.map(|c| c.0)),
            num(r.ci.map(|c| c.1)),
            r.samples.map(|n| n.to_string()).unwrap_or_default(),
            num(r.oracle),
            r.status.as_str().to_string(),
            r.note.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn print(rows: &[Row]) {
    let mut out = String::new();
    for r in rows {
        out += &format!(
            "{:<5} {:<10} {:<28} estimate={} oracle={} {}",
            r.status.as_str(),
            r.check,
            r.stratum,
            num(r.estimate),
            num(r.oracle),
            r.note
        );
        out.push('\n');
    }
    crate::emit(&out);
}
