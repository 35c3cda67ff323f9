//! CSV and JSON emission. Floats use the shortest representation that round
//! trips.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::config::Format;

/// Reproducibility header for randomized outputs. CSV writes it as `#`
/// comment lines ahead of the column header; JSON as a `meta` object.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub command: String,
    pub master_seed: u64,
    pub version: String,
    pub config: String,
}

impl Meta {
    pub fn new(command: &str, master_seed: u64, config: String) -> Self {
        Self {
            command: command.to_string(),
            master_seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
        }
    }
}

#[derive(Serialize)]
struct JsonDoc<'a, T> {
    #[serde(skip_serializing_if = "Option::is_none")]
    meta: Option<&'a Meta>,
    rows: &'a [T],
}

/// Writes `rows` to `w`, preceded by the header when `meta` is given.
pub fn write_rows<T: Serialize, W: Write>(
    w: W,
    rows: &[T],
    format: Format,
    meta: Option<&Meta>,
) -> anyhow::Result<()> {
    let mut w = w;
    match format {
        Format::Csv => {
            if let Some(m) = meta {
                writeln!(w, "# command={}", m.command)?;
                writeln!(w, "# master_seed={}", m.master_seed)?;
                writeln!(w, "# version={}", m.version)?;
                writeln!(w, "# config={}", m.config)?;
            }
            let mut cw = csv::Writer::from_writer(w);
            for r in rows {
                cw.serialize(r)?;
            }
            cw.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &JsonDoc { meta, rows })?;
            writeln!(w)?;
            w.flush()?;
        }
    }
    Ok(())
}

/// CSV header only, for empty row sets that `csv` would otherwise leave
/// blank.
pub fn write_csv_header<W: Write>(mut w: W, columns: &[&str], meta: Option<&Meta>) -> anyhow::Result<()> {
    if let Some(m) = meta {
        writeln!(w, "# command={}", m.command)?;
        writeln!(w, "# master_seed={}", m.master_seed)?;
        writeln!(w, "# version={}", m.version)?;
        writeln!(w, "# config={}", m.config)?;
    }
    writeln!(w, "{}", columns.join(","))?;
    w.flush()?;
    Ok(())
}

/// A buffered writer to `path`, or stdout when `None`.
pub fn open_output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// [`write_rows`], falling back to a bare CSV header when there are no rows.
pub fn emit<T: Serialize>(
    path: Option<&Path>,
    rows: &[T],
    columns: &[&str],
    format: Format,
    meta: Option<&Meta>,
) -> anyhow::Result<()> {
    let w = open_output(path)?;
    if rows.is_empty() && format == Format::Csv {
        write_csv_header(w, columns, meta)
    } else {
        write_rows(w, rows, format, meta)
    }
}
