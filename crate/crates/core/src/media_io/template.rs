//! Word templates: one feature matrix per file.
//!
//! ```text
//! MELMAT <channels> <frames>
//! <frames floats>        (one line per channel)
//! ```
//!
//! Values are written in shortest round-trip decimal form, so
//! `read(write(m)) == m` holds exactly. A template directory holds one
//! `<label>.melmat` per word plus an optional `index.txt` listing labels in
//! library order; without it, labels are sorted by file name.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use super::{read_file, write_file};
use crate::error::{Error, Result};
use crate::features::MelMatrix;

pub const TEMPLATE_EXTENSION: &str = "melmat";
pub const TEMPLATE_INDEX: &str = "index.txt";

/// Ordered, label-unique collection of word templates sharing one channel count.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TemplateLibrary {
    entries: Vec<(String, MelMatrix)>,
}

impl TemplateLibrary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (String, MelMatrix)>) -> Result<Self> {
        let mut lib = Self::new();
        for (label, m) in entries {
            lib.push(label, m)?;
        }
        Ok(lib)
    }

    pub fn push(&mut self, label: impl Into<String>, features: MelMatrix) -> Result<()> {
        let label = label.into();
        if label.is_empty() || label.contains(char::is_whitespace) || label.contains('/') {
            return Err(Error::Template(format!("invalid label '{label}'")));
        }
        if self.entries.iter().any(|(l, _)| *l == label) {
            return Err(Error::Template(format!("duplicate label '{label}'")));
        }
        if let Some(ch) = self.channels() {
            if ch != features.channels() {
                return Err(Error::mismatch(
                    format!("{ch} channels"),
                    format!("{} channels in template '{label}'", features.channels()),
                ));
            }
        }
        self.entries.push((label, features));
        Ok(())
    }

    pub fn entries(&self) -> &[(String, MelMatrix)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Channel count shared by every entry, `None` when empty.
    pub fn channels(&self) -> Option<usize> {
        self.entries.first().map(|(_, m)| m.channels())
    }

    pub fn get(&self, label: &str) -> Option<&MelMatrix> {
        self.entries.iter().find(|(l, _)| l == label).map(|(_, m)| m)
    }
}

pub fn encode_template(m: &MelMatrix) -> String {
    let mut out = format!("MELMAT {} {}\n", m.channels(), m.frames());
    for c in 0..m.channels() {
        for k in 0..m.frames() {
            if k > 0 {
                out.push(' ');
            }
            write!(out, "{}", m.get(c, k)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn decode_template(text: &str) -> Result<MelMatrix> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Template("empty file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (channels, frames) = match fields.as_slice() {
        ["MELMAT", c, f] => {
            let parse = |s: &str, what: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::Template(format!("bad {what} count '{s}'")))
            };
            (parse(c, "channel")?, parse(f, "frame")?)
        }
        _ => {
            return Err(Error::Template(format!(
                "expected header 'MELMAT <channels> <frames>', found '{header}'"
            )))
        }
    };
    let mut rows = Vec::with_capacity(channels);
    for (c, line) in lines.by_ref().enumerate() {
        if c >= channels {
            return Err(Error::Template(format!(
                "dimension mismatch: more than {channels} channel rows"
            )));
        }
        let row = line
            .split_whitespace()
            .map(|tok| match tok.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::Template(format!(
                    "channel {c}: invalid value '{tok}'"
                ))),
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != frames {
            return Err(Error::Template(format!(
                "dimension mismatch: channel {c} has {} values, header declares {frames}",
                row.len()
            )));
        }
        rows.push(row);
    }
    if rows.len() != channels {
        return Err(Error::Template(format!(
            "dimension mismatch: {} channel rows, header declares {channels}",
            rows.len()
        )));
    }
    MelMatrix::from_channel_rows(rows).map_err(|e| Error::Template(e.to_string()))
}

pub fn read_template(path: impl AsRef<Path>) -> Result<MelMatrix> {
    let path = path.as_ref();
    let text = String::from_utf8(read_file(path)?)
        .map_err(|_| Error::Template(format!("{} is not UTF-8", path.display())))?;
    decode_template(&text).map_err(|e| match e {
        Error::Template(msg) => Error::Template(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_template(path: impl AsRef<Path>, m: &MelMatrix) -> Result<()> {
    write_file(path.as_ref(), encode_template(m).as_bytes())
}

/// Writes `<label>.melmat` for each entry plus the `index.txt` ordering file.
pub fn write_template_library(dir: impl AsRef<Path>, lib: &TemplateLibrary) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut index = String::new();
    for (label, m) in lib.entries() {
        write_template(dir.join(format!("{label}.{TEMPLATE_EXTENSION}")), m)?;
        index.push_str(label);
        index.push('\n');
    }
    write_file(&dir.join(TEMPLATE_INDEX), index.as_bytes())
}

pub fn read_template_library(dir: impl AsRef<Path>) -> Result<TemplateLibrary> {
    let dir = dir.as_ref();
    let index_path = dir.join(TEMPLATE_INDEX);
    let labels: Vec<String> = if index_path.is_file() {
        let text = String::from_utf8(read_file(&index_path)?)
            .map_err(|_| Error::Template("index.txt is not UTF-8".into()))?;
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect()
    } else {
        let listing = std::fs::read_dir(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let mut labels = Vec::new();
        for entry in listing {
            let entry = entry.map_err(|source| Error::Io {
                path: dir.to_path_buf(),
                source,
            })?;
            let path = entry.path();
            if path.extension().and_then(|e| e.to_str()) == Some(TEMPLATE_EXTENSION) {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    labels.push(stem.to_string());
                }
            }
        }
        labels.sort();
        labels
    };
    let mut seen = HashSet::new();
    let mut lib = TemplateLibrary::new();
    for label in labels {
        if !seen.insert(label.clone()) {
            return Err(Error::Template(format!("duplicate label '{label}' in index")));
        }
        let m = read_template(dir.join(format!("{label}.{TEMPLATE_EXTENSION}")))?;
        lib.push(label, m)?;
    }
    if lib.is_empty() {
        return Err(Error::EmptyLibrary);
    }
    Ok(lib)
}
