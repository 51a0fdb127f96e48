//! Signal and coefficient-field files, CSV tables and atomic writes.
//!
//! Raw data is little-endian `f64`. Each data file has a JSON sidecar naming
//! it; field data holds the detail blocks of scales `0..J` back to back.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use pexp::generators::GroundTruth;
use pexp::{CoefficientField, Normalization};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::spec::GeneratorSpec;

pub const FORMAT_VERSION: u32 = 1;
pub const SAMPLE_DOMAIN: &str = "periodic [0, 1), sample i averages or samples cell [i/n, (i+1)/n)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    Signal,
    Field,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub format_version: u32,
    pub kind: DataKind,
    /// Raw data file, relative to the sidecar.
    pub data: String,
    /// Number of `f64` values in the data file.
    pub length: usize,
    pub sample_domain: Option<String>,
    #[serde(rename = "J")]
    pub depth: Option<u32>,
    pub normalization: Option<Normalization>,
    /// Filter bank the field came from; `None` for fields built directly.
    pub filter: Option<String>,
    pub approx: Option<f64>,
    pub generator: Option<String>,
    pub params: Option<GeneratorSpec>,
    pub seed: Option<u64>,
}

pub enum Input {
    Signal(Vec<f64>),
    Field(CoefficientField),
}

/// Writes `bytes` to a temporary file next to `path`, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::from(e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_vec_pretty(value)?;
    text.push(b'\n');
    write_atomic(path, &text)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = fs::read(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    serde_json::from_slice(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn encode(values: &[f64]) -> Vec<u8> {
    values.iter().flat_map(|x| x.to_le_bytes()).collect()
}

fn decode(bytes: &[u8], path: &Path) -> CliResult<Vec<f64>> {
    if !bytes.len().is_multiple_of(8) {
        return Err(CliError::usage(format!(
            "{}: {} bytes is not a whole number of f64 values",
            path.display(),
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

/// Writes `<stem>.f64` and `<stem>.json` into `dir`; returns the sidecar path.
pub fn write_signal(
    dir: &Path,
    stem: &str,
    signal: &[f64],
    spec: Option<&GeneratorSpec>,
) -> CliResult<PathBuf> {
    let data = format!("{stem}.f64");
    write_atomic(&dir.join(&data), &encode(signal))?;
    let sidecar = Sidecar {
        format_version: FORMAT_VERSION,
        kind: DataKind::Signal,
        data,
        length: signal.len(),
        sample_domain: Some(SAMPLE_DOMAIN.to_string()),
        depth: None,
        normalization: None,
        filter: None,
        approx: None,
        generator: spec.map(generator_name),
        params: spec.cloned(),
        seed: spec.and_then(GeneratorSpec::seed),
    };
    let path = dir.join(format!("{stem}.json"));
    write_json(&path, &sidecar)?;
    Ok(path)
}

pub fn write_field(
    dir: &Path,
    stem: &str,
    field: &CoefficientField,
    filter: Option<&str>,
    spec: Option<&GeneratorSpec>,
) -> CliResult<PathBuf> {
    let data = format!("{stem}.f64");
    let flat: Vec<f64> = field.detail.iter().flatten().copied().collect();
    write_atomic(&dir.join(&data), &encode(&flat))?;
    let sidecar = Sidecar {
        format_version: FORMAT_VERSION,
        kind: DataKind::Field,
        data,
        length: flat.len(),
        sample_domain: None,
        depth: Some(field.depth),
        normalization: Some(field.normalization),
        filter: filter.map(str::to_string),
        approx: Some(field.approx[0]),
        generator: spec.map(generator_name),
        params: spec.cloned(),
        seed: spec.and_then(GeneratorSpec::seed),
    };
    let path = dir.join(format!("{stem}.json"));
    write_json(&path, &sidecar)?;
    Ok(path)
}

pub fn write_truth(dir: &Path, truth: &GroundTruth) -> CliResult<PathBuf> {
    let path = dir.join("truth.json");
    write_json(&path, truth)?;
    Ok(path)
}

fn generator_name(spec: &GeneratorSpec) -> String {
    match serde_json::to_value(spec) {
        Ok(serde_json::Value::Object(m)) => m
            .get("name")
            .and_then(|v| v.as_str())
            .unwrap_or_default()
            .to_string(),
        _ => String::new(),
    }
}

fn read_sidecar(path: &Path) -> CliResult<Input> {
    let side: Sidecar = read_json(path)?;
    if side.format_version != FORMAT_VERSION {
        return Err(CliError::usage(format!(
            "{}: unsupported format version {}",
            path.display(),
            side.format_version
        )));
    }
    let data_path = path.parent().unwrap_or(Path::new(".")).join(&side.data);
    let bytes = fs::read(&data_path)
        .map_err(|e| CliError::usage(format!("{}: {e}", data_path.display())))?;
    let values = decode(&bytes, &data_path)?;
    if values.len() != side.length {
        return Err(CliError::usage(format!(
            "{}: sidecar declares {} values, data holds {}",
            path.display(),
            side.length,
            values.len()
        )));
    }
    match side.kind {
        DataKind::Signal => Ok(Input::Signal(values)),
        DataKind::Field => {
            let depth = side.depth.ok_or_else(|| {
                CliError::usage(format!("{}: field header lacks J", path.display()))
            })?;
            if depth == 0 || depth > 30 || values.len() != (1usize << depth) - 1 {
                return Err(CliError::usage(format!(
                    "{}: {} values do not fill scales 0..{depth}",
                    path.display(),
                    values.len()
                )));
            }
            let mut detail = Vec::with_capacity(depth as usize);
            let mut rest = values.as_slice();
            for j in 0..depth {
                let (head, tail) = rest.split_at(1usize << j);
                detail.push(head.to_vec());
                rest = tail;
            }
            let mut field = CoefficientField::from_detail(side.approx.unwrap_or(0.0), detail)?;
            field.normalization = side.normalization.unwrap_or_default();
            Ok(Input::Field(
                field.with_normalization(Normalization::LInfinity),
            ))
        }
    }
}

fn read_csv(path: &Path) -> CliResult<Vec<f64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.parse::<f64>() {
            Ok(x) => out.push(x),
            Err(_) if i == 0 => {}
            Err(_) => {
                return Err(CliError::usage(format!(
                    "{}:{}: `{line}` is not a number",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    Ok(out)
}

/// Reads a sidecar (`.json`), a CSV column (`.csv`) or raw `f64` data.
pub fn read_input(path: &Path) -> CliResult<Input> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => read_sidecar(path),
        Some("csv") => Ok(Input::Signal(read_csv(path)?)),
        _ => {
            let side = path.with_extension("json");
            if side.exists() {
                return read_sidecar(&side);
            }
            let bytes =
                fs::read(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            Ok(Input::Signal(decode(&bytes, path)?))
        }
    }
}

/// Shortest round-trip decimal, or a sentinel for non-finite values.
pub fn num(x: f64) -> String {
    match pexp::sentinel::encode(x) {
        Some(tag) => tag.to_string(),
        None => format!("{x}"),
    }
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}
