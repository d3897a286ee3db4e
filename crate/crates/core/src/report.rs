//! JSON-lines report documents: a header echoing the command and the
//! configuration, one line per item, and a closing summary.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;

use crate::config::Config;
use crate::family::Status;

pub const SCHEMA_VERSION: &str = "bsd2-report/1";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub verified: u64,
    pub mismatch: u64,
    pub undecided: u64,
}

impl Counts {
    pub fn add(&mut self, s: Status) {
        match s {
            Status::Verified => self.verified += 1,
            Status::Mismatch => self.mismatch += 1,
            Status::Undecided => self.undecided += 1,
        }
    }

    /// 0 all verified, 1 any mismatch, 3 any undecided.
    pub fn exit_code(&self) -> i32 {
        if self.mismatch > 0 {
            1
        } else if self.undecided > 0 {
            3
        } else {
            0
        }
    }
}

#[derive(Serialize)]
struct Header<'a> {
    kind: &'static str,
    schema_version: &'static str,
    command: &'a [String],
    config: &'a Config,
    config_path: Option<&'a str>,
}

#[derive(Serialize)]
struct Item<'a, T: Serialize> {
    kind: &'static str,
    item_type: &'a str,
    status: Option<Status>,
    #[serde(flatten)]
    data: &'a T,
}

#[derive(Serialize)]
struct Summary<'a> {
    kind: &'static str,
    counts: Counts,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    by_r: &'a BTreeMap<u32, Counts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing_seconds: Option<f64>,
}

/// Single ordered writer for one report document.
pub struct ReportWriter<W: Write> {
    out: W,
    counts: Counts,
    by_r: BTreeMap<u32, Counts>,
    started: Option<std::time::Instant>,
}

impl<W: Write> ReportWriter<W> {
    pub fn new(mut out: W, command: &[String], config: &Config, config_path: Option<&str>) -> io::Result<Self> {
        let header = Header { kind: "header", schema_version: SCHEMA_VERSION, command, config, config_path };
        writeln!(out, "{}", serde_json::to_string(&header)?)?;
        Ok(ReportWriter { out, counts: Counts::default(), by_r: BTreeMap::new(), started: None })
    }

    /// Adds wall-clock timing to the summary (off by default so that reports
    /// stay byte-identical across runs).
    pub fn with_timing(mut self) -> Self {
        self.started = Some(std::time::Instant::now());
        self
    }

    /// Writes an item; a status, when given, is counted in the summary.
    pub fn item<T: Serialize>(&mut self, item_type: &str, status: Option<Status>, data: &T) -> io::Result<()> {
        if let Some(s) = status {
            self.counts.add(s);
        }
        let line = Item { kind: "item", item_type, status, data };
        writeln!(self.out, "{}", serde_json::to_string(&line)?)
    }

    /// Like `item`, also tallied under r.
    pub fn item_for_r<T: Serialize>(&mut self, item_type: &str, r: u32, status: Status, data: &T) -> io::Result<()> {
        self.by_r.entry(r).or_default().add(status);
        self.item(item_type, Some(status), data)
    }

    pub fn counts(&self) -> Counts {
        self.counts
    }

    pub fn finish(mut self) -> io::Result<Counts> {
        let summary = Summary {
            kind: "summary",
            counts: self.counts,
            by_r: &self.by_r,
            timing_seconds: self.started.map(|t| t.elapsed().as_secs_f64()),
        };
        writeln!(self.out, "{}", serde_json::to_string(&summary)?)?;
        self.out.flush()?;
        Ok(self.counts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        m: u64,
    }

    #[test]
    fn document_shape() {
        let mut buf = Vec::new();
        let cmd = vec!["bsd2".to_string(), "sieve".to_string()];
        let mut w = ReportWriter::new(&mut buf, &cmd, &Config::default(), None).unwrap();
        w.item_for_r("twist", 1, Status::Verified, &Row { m: 5 }).unwrap();
        w.item("twist", Some(Status::Undecided), &Row { m: 13 }).unwrap();
        let counts = w.finish().unwrap();
        assert_eq!(counts.exit_code(), 3);
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0]["schema_version"], SCHEMA_VERSION);
        assert_eq!(lines[0]["config"]["modsym_level_cap"], 200);
        assert_eq!(lines[1]["m"], 5);
        assert_eq!(lines[1]["status"], "verified");
        assert_eq!(lines[3]["counts"]["undecided"], 1);
        assert_eq!(lines[3]["by_r"]["1"]["verified"], 1);
        assert!(lines[3].get("timing_seconds").is_none());
    }

    #[test]
    fn exit_codes() {
        let mut c = Counts::default();
        assert_eq!(c.exit_code(), 0);
        c.add(Status::Undecided);
        assert_eq!(c.exit_code(), 3);
        c.add(Status::Mismatch);
        assert_eq!(c.exit_code(), 1);
    }
}
