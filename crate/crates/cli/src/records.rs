//! Versioned result records.
//!
//! CSV output starts with a `# nlbox-<kind> v1` line followed by a header
//! row; JSON output is `{"schema": "nlbox-<kind>", "version": 1,
//! "records": [...]}` with the same fields. Readers reject any other
//! schema or version.

use std::io::Write;

use anyhow::{bail, Context};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::Format;

pub const SCHEMA_VERSION: u32 = 1;

pub trait Record: Serialize + DeserializeOwned {
    const KIND: &'static str;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub p: f64,
    pub depth: u32,
    pub analytic: f64,
    pub sampled: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub above_threshold: bool,
}

impl Record for SweepRecord {
    const KIND: &'static str = "sweep";
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRecord {
    pub n: u32,
    pub method: String,
    pub success: f64,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub analytic: Option<f64>,
    pub trials: Option<u64>,
}

impl Record for DecayRecord {
    const KIND: &'static str = "ip-decay";
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub module: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

impl Record for CheckRecord {
    const KIND: &'static str = "verify";
}

fn schema<R: Record>() -> String {
    format!("nlbox-{}", R::KIND)
}

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    schema: String,
    version: u32,
    records: T,
}

pub fn write_records<R: Record>(records: &[R], format: Format, out: &mut dyn Write) -> anyhow::Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "# {} v{SCHEMA_VERSION}", schema::<R>())?;
            let mut writer = csv::Writer::from_writer(out);
            for record in records {
                writer.serialize(record)?;
            }
            writer.flush()?;
        }
        Format::Json => {
            let envelope = Envelope {
                schema: schema::<R>(),
                version: SCHEMA_VERSION,
                records,
            };
            serde_json::to_writer_pretty(&mut *out, &envelope)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn read_records<R: Record>(text: &str, format: Format) -> anyhow::Result<Vec<R>> {
    let expected = schema::<R>();
    match format {
        Format::Csv => {
            let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
            let header = format!("# {expected} v{SCHEMA_VERSION}");
            if first.trim_end() != header {
                bail!("expected `{header}`, found `{}`", first.trim_end());
            }
            csv::Reader::from_reader(rest.as_bytes())
                .deserialize()
                .map(|r| r.context("bad csv record"))
                .collect()
        }
        Format::Json => {
            let envelope: Envelope<Vec<R>> = serde_json::from_str(text)?;
            if envelope.schema != expected || envelope.version != SCHEMA_VERSION {
                bail!(
                    "expected schema {expected} v{SCHEMA_VERSION}, found {} v{}",
                    envelope.schema,
                    envelope.version
                );
            }
            Ok(envelope.records)
        }
    }
}
