//! Output directory handling: table encoding, checksums and the run manifest.

use std::fs::{self, File};
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// A table cell. Floats print in their shortest round-trip form.
#[derive(Debug, Clone)]
pub enum Cell {
    U(u64),
    I(i64),
    F(f64),
    S(String),
    Null,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::U(v) => v.to_string(),
            Cell::I(v) => v.to_string(),
            Cell::F(v) => v.to_string(),
            Cell::S(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::U(v) => json!(v),
            Cell::I(v) => json!(v),
            Cell::F(v) => json!(v),
            Cell::S(s) => json!(s),
            Cell::Null => Value::Null,
        }
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::U(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::U(v as u64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::U(v as u64)
    }
}

impl From<i32> for Cell {
    fn from(v: i32) -> Self {
        Cell::I(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Null, Into::into)
    }
}

#[derive(Debug, Serialize)]
struct FileEntry {
    name: String,
    bytes: u64,
    sha256: String,
}

/// Everything written during one run, plus the clock for the manifest.
pub struct RunOutput {
    dir: PathBuf,
    format: Format,
    files: Vec<FileEntry>,
    started: Instant,
}

impl RunOutput {
    pub fn create(dir: &Path, format: Format) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), format, files: Vec::new(), started: Instant::now() })
    }

    /// Writes a table named `stem` in the run's format.
    pub fn table<I>(&mut self, stem: &str, header: &[&str], rows: I) -> io::Result<()>
    where
        I: IntoIterator<Item = Vec<Cell>>,
    {
        let name = format!("{stem}.{}", self.format.extension());
        let format = self.format;
        self.file(&name, |w| match format {
            Format::Csv => {
                writeln!(w, "{}", header.join(","))?;
                for row in rows {
                    let line: Vec<String> = row.iter().map(Cell::csv).collect();
                    writeln!(w, "{}", line.join(","))?;
                }
                Ok(())
            }
            Format::Json => {
                let records: Vec<Value> = rows
                    .into_iter()
                    .map(|row| {
                        let obj: Map<String, Value> =
                            header.iter().zip(&row).map(|(h, c)| (h.to_string(), c.json())).collect();
                        Value::Object(obj)
                    })
                    .collect();
                serde_json::to_writer_pretty(&mut *w, &records)?;
                writeln!(w)
            }
        })
    }

    /// Writes `value` as pretty JSON regardless of the table format.
    pub fn json<S: Serialize>(&mut self, name: &str, value: &S) -> io::Result<()> {
        self.file(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)
        })
    }

    /// Streams arbitrary content into `name` and records it.
    pub fn file<F>(&mut self, name: &str, body: F) -> io::Result<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
    {
        let path = self.dir.join(name);
        let mut w = BufWriter::new(File::create(&path)?);
        body(&mut w)?;
        w.flush()?;
        drop(w);
        let (bytes, sha256) = digest(&path)?;
        self.files.push(FileEntry { name: name.to_string(), bytes, sha256 });
        Ok(())
    }

    pub fn format(&self) -> Format {
        self.format
    }

    pub fn finish<C: Serialize>(self, command: &str, config: &C, threads: usize) -> io::Result<()> {
        let manifest = json!({
            "tool": "divnet",
            "cli_version": env!("CARGO_PKG_VERSION"),
            "library_version": divnet::VERSION,
            "command": command,
            "config": config,
            "threads": threads,
            "wall_time_seconds": self.started.elapsed().as_secs_f64(),
            "files": self.files,
        });
        let path = self.dir.join("manifest.json");
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, &manifest)?;
        writeln!(w)?;
        w.flush()
    }
}

fn digest(path: &Path) -> io::Result<(u64, String)> {
    let mut f = File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    let mut bytes = 0u64;
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        bytes += n as u64;
        hasher.update(&buf[..n]);
    }
    let hex = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
    Ok((bytes, hex))
}
