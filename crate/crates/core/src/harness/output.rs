//! Long-format output: one row per `(group, value_name)`.
//!
//! CSV files start with `#` metadata lines carrying the resolved
//! configuration as JSON fragments, followed by a single header line. JSON
//! files hold `{"config": ..., "records": [...]}`. Numbers use the shortest
//! representation that round-trips, so identical runs give identical bytes.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, OutputFormat};
use crate::harness::experiments::Summary;

pub const CSV_HEADER: &str = "experiment,method,env_init,n,t,f,k,n_fragments,value_name,value";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub experiment: &'static str,
    pub method: Option<&'static str>,
    pub env_init: &'static str,
    pub n: usize,
    pub t: f64,
    pub f: Option<f64>,
    pub k: Option<usize>,
    pub n_fragments: Option<usize>,
    pub value_name: &'static str,
    pub value: f64,
}

pub fn records(summaries: &[Summary]) -> Vec<Record> {
    summaries
        .iter()
        .flat_map(|s| {
            s.values.iter().map(move |&(name, value)| Record {
                experiment: s.experiment.name(),
                method: s.method.map(|m| m.name()),
                env_init: s.env_init.name(),
                n: s.n,
                t: s.t,
                f: s.f,
                k: s.k,
                n_fragments: s.n_fragments,
                value_name: name,
                value,
            })
        })
        .collect()
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt<T>(x: Option<T>, f: impl Fn(T) -> String) -> String {
    x.map(f).unwrap_or_default()
}

pub fn render_csv(cfg: &ExperimentConfig, summaries: &[Summary]) -> String {
    let mut out = format!("# objectivity {}\n", env!("CARGO_PKG_VERSION"));
    if let Ok(serde_json::Value::Object(map)) = serde_json::to_value(cfg) {
        for (key, value) in map {
            out.push_str(&format!("# {key}: {value}\n"));
        }
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records(summaries) {
        let row = [
            r.experiment.to_string(),
            r.method.unwrap_or("").to_string(),
            r.env_init.to_string(),
            r.n.to_string(),
            num(r.t),
            opt(r.f, num),
            opt(r.k, |k| k.to_string()),
            opt(r.n_fragments, |k| k.to_string()),
            r.value_name.to_string(),
            num(r.value),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn render_json(cfg: &ExperimentConfig, summaries: &[Summary]) -> String {
    #[derive(Serialize)]
    struct Document<'a> {
        config: &'a ExperimentConfig,
        records: Vec<Record>,
    }
    let doc = Document {
        config: cfg,
        records: records(summaries),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("records serialize");
    s.push('\n');
    s
}

pub fn render(cfg: &ExperimentConfig, summaries: &[Summary]) -> String {
    match cfg.format {
        OutputFormat::Csv => render_csv(cfg, summaries),
        OutputFormat::Json => render_json(cfg, summaries),
    }
}

/// Writes to `cfg.output`, or stdout when no path is set.
pub fn write(cfg: &ExperimentConfig, summaries: &[Summary]) -> Result<()> {
    let text = render(cfg, summaries);
    match &cfg.output {
        Some(path) => write_file(path, &text),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())
                .and_then(|_| lock.flush())
                .map_err(|source| Error::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
