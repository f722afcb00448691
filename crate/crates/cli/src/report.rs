//! CSV emission: `#`-prefixed configuration comments, a header row, then
//! data rows with 17-significant-digit floats (round-trip exact for f64).

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

pub struct Report {
    out: Box<dyn Write>,
}

impl Report {
    pub fn open(path: Option<&PathBuf>) -> io::Result<Self> {
        let out: Box<dyn Write> = match path {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(io::stdout().lock()),
        };
        Ok(Self { out })
    }

    /// One `# key=value` provenance comment.
    pub fn config(&mut self, key: &str, value: impl std::fmt::Display) -> io::Result<()> {
        writeln!(self.out, "# {key}={value}")
    }

    pub fn comment(&mut self, text: &str) -> io::Result<()> {
        writeln!(self.out, "# {text}")
    }

    pub fn header(&mut self, columns: &[&str]) -> io::Result<()> {
        writeln!(self.out, "{}", columns.join(","))
    }

    pub fn row(&mut self, cells: &[String]) -> io::Result<()> {
        writeln!(self.out, "{}", cells.join(","))
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.out.flush()
    }
}

/// 17 significant digits; parses back to the identical f64.
pub fn float17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Empty cell for omitted values.
pub fn blank() -> String {
    String::new()
}

pub fn write_text(path: Option<&PathBuf>, text: &str) -> io::Result<()> {
    match path {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

pub fn read_instance(path: &Path) -> anyhow::Result<dqi_core::MaxLinSatInstance> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    Ok(dqi_core::MaxLinSatInstance::from_text(&text)?)
}
