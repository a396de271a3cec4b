use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// JSON document written for every successful command.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct Document<R> {
    pub schema_version: u32,
    pub command: String,
    pub rows: Vec<R>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorDocument {
    pub schema_version: u32,
    pub error: ErrorBody,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub kind: String,
    pub exit_code: i32,
    pub message: String,
}

pub struct Sink {
    pub format: Format,
    pub path: Option<PathBuf>,
}

impl Sink {
    fn writer(&self) -> io::Result<Box<dyn Write>> {
        Ok(match &self.path {
            Some(p) => Box::new(File::create(p)?),
            None => Box::new(io::stdout().lock()),
        })
    }

    pub fn emit<R: Serialize>(&self, command: &str, rows: Vec<R>, warnings: Vec<String>) -> io::Result<()> {
        let mut w = self.writer()?;
        match self.format {
            Format::Json => {
                let doc = Document { schema_version: SCHEMA_VERSION, command: command.to_string(), rows, warnings };
                serde_json::to_writer_pretty(&mut w, &doc)?;
                writeln!(w)?;
            }
            Format::Csv => {
                let mut out = csv::Writer::from_writer(&mut w);
                for r in &rows {
                    out.serialize(r).map_err(io::Error::other)?;
                }
                out.flush()?;
                drop(out);
                for msg in warnings {
                    eprintln!("warning: {msg}");
                }
            }
        }
        w.flush()
    }
}
