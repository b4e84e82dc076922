//! Tab-separated and JSON-lines report writers.
//!
//! Rows are serde structs, so the column order of a TSV report and the field
//! names of a JSONL report both come from the struct definition. JSONL rows
//! carry a leading `kind` field (`trial`, `summary` or `solve`); in TSV the
//! summary is a single `#summary` line of `key=value` cells after the table.

use std::io::Write;

use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Tsv,
    Jsonl,
}

#[derive(Serialize)]
struct Tagged<'a, T> {
    kind: &'a str,
    #[serde(flatten)]
    row: &'a T,
}

enum Sink<W: Write> {
    Tsv(csv::Writer<W>),
    Jsonl(W),
}

pub struct ReportWriter<W: Write> {
    sink: Sink<W>,
}

impl<W: Write> ReportWriter<W> {
    pub fn new(format: Format, out: W) -> Self {
        let sink = match format {
            Format::Tsv => Sink::Tsv(csv::WriterBuilder::new().delimiter(b'\t').flexible(true).from_writer(out)),
            Format::Jsonl => Sink::Jsonl(out),
        };
        ReportWriter { sink }
    }

    pub fn row<T: Serialize>(&mut self, kind: &str, row: &T) -> CliResult<()> {
        match &mut self.sink {
            Sink::Tsv(w) => w.serialize(row)?,
            Sink::Jsonl(w) => {
                serde_json::to_writer(&mut *w, &Tagged { kind, row })?;
                w.write_all(b"\n")?;
            }
        }
        Ok(())
    }

    pub fn summary<T: Serialize>(&mut self, row: &T) -> CliResult<()> {
        match &mut self.sink {
            Sink::Tsv(w) => {
                let value = serde_json::to_value(row)?;
                let serde_json::Value::Object(map) = value else {
                    return Err(CliError::Report("summary must be a struct".into()));
                };
                let cells = map.into_iter().map(|(k, v)| {
                    let cell = match v {
                        serde_json::Value::String(s) => s,
                        serde_json::Value::Null => String::new(),
                        other => other.to_string(),
                    };
                    format!("{k}={cell}")
                });
                w.write_record(std::iter::once("#summary".to_string()).chain(cells))?;
            }
            Sink::Jsonl(w) => {
                serde_json::to_writer(&mut *w, &Tagged { kind: "summary", row })?;
                w.write_all(b"\n")?;
            }
        }
        Ok(())
    }

    pub fn finish(self) -> CliResult<W> {
        match self.sink {
            Sink::Tsv(w) => w.into_inner().map_err(|e| CliError::Report(e.to_string())),
            Sink::Jsonl(mut w) => {
                w.flush()?;
                Ok(w)
            }
        }
    }
}

/// Comma-joined indices, the cell format for center sets.
pub fn join_indices(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        trial: u64,
        cost: f64,
        opt: Option<f64>,
        centers: String,
    }

    #[derive(Serialize)]
    struct Summary {
        trials: u64,
        max_ratio: f64,
    }

    fn render(format: Format) -> String {
        let mut w = ReportWriter::new(format, Vec::new());
        w.row("trial", &Row { trial: 0, cost: 1.5, opt: None, centers: join_indices(&[1, 4]) }).unwrap();
        w.row("trial", &Row { trial: 1, cost: 2.0, opt: Some(1.0), centers: "0".into() }).unwrap();
        w.summary(&Summary { trials: 2, max_ratio: 2.0 }).unwrap();
        String::from_utf8(w.finish().unwrap()).unwrap()
    }

    #[test]
    fn tsv_layout() {
        assert_eq!(
            render(Format::Tsv),
            "trial\tcost\topt\tcenters\n0\t1.5\t\t1,4\n1\t2.0\t1.0\t0\n#summary\ttrials=2\tmax_ratio=2.0\n"
        );
    }

    #[test]
    fn jsonl_layout() {
        let text = render(Format::Jsonl);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], r#"{"kind":"trial","trial":0,"cost":1.5,"opt":null,"centers":"1,4"}"#);
        assert_eq!(lines[2], r#"{"kind":"summary","trials":2,"max_ratio":2.0}"#);
    }
}
