//! The on-disk result format.
//!
//! CSV form: a `# ` line holding the JSON header, a `t,count` line, then one
//! row per perimeter in increasing order. Counts are decimal strings. The
//! header checksum is the SHA-256 of the row lines (each with its newline).
//!
//! ```text
//! # {"schema_version":1,"n":4,"dim":3,"mode":"proper",...}
//! t,count
//! 15,8
//! 16,24
//! ```
//!
//! JSON form: `{"header": {...}, "rows": [[15, "8"], [16, "24"]]}`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::assemble::Provenance;
use crate::error::{Error, Result};
use crate::math::BigCount;
use crate::proper::PerimeterTable;

pub const SCHEMA_VERSION: u32 = 1;

pub const GENERATOR: &str = concat!("proper-polycubes ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `G^{(i)}`: polycubes spanning exactly `dim` axes, perimeter in `Z^dim`.
    Proper,
    /// `g^{(d)}`: all polycubes in `Z^dim`.
    Lattice,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::InvalidInput(format!("unknown format {s:?}, expected csv or json"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub schema_version: u32,
    pub n: usize,
    pub dim: usize,
    pub mode: Mode,
    pub provenance: Provenance,
    pub generator: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
    pub rows: usize,
    pub checksum: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResultFile {
    pub header: Header,
    pub rows: Vec<(i64, BigCount)>,
}

#[derive(Serialize, Deserialize)]
struct JsonForm {
    header: Header,
    rows: Vec<(i64, String)>,
}

fn row_text(rows: &[(i64, BigCount)]) -> String {
    rows.iter().map(|(t, c)| format!("{t},{c}\n")).collect()
}

fn checksum(rows: &[(i64, BigCount)]) -> String {
    hex::encode(Sha256::digest(row_text(rows).as_bytes()))
}

impl ResultFile {
    /// `wall_time_ms: None` leaves the timing out so that reruns are byte-identical.
    pub fn from_table(table: &PerimeterTable, mode: Mode, provenance: Provenance, wall_time_ms: Option<u64>) -> Self {
        let rows: Vec<(i64, BigCount)> = table.iter().map(|(t, c)| (t, c.clone())).collect();
        let header = Header {
            schema_version: SCHEMA_VERSION,
            n: table.n,
            dim: table.dim,
            mode,
            provenance,
            generator: GENERATOR.to_string(),
            wall_time_ms,
            rows: rows.len(),
            checksum: checksum(&rows),
        };
        Self { header, rows }
    }

    pub fn to_table(&self) -> PerimeterTable {
        PerimeterTable::from_counts(self.header.n, self.header.dim, self.rows.iter().cloned())
    }

    pub fn total(&self) -> BigCount {
        self.rows.iter().map(|(_, c)| c).sum()
    }

    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Csv => format!("# {}\nt,count\n{}", serde_json::to_string(&self.header)?, row_text(&self.rows)),
            Format::Json => {
                let form = JsonForm {
                    header: self.header.clone(),
                    rows: self.rows.iter().map(|(t, c)| (*t, c.to_string())).collect(),
                };
                let mut s = serde_json::to_string_pretty(&form)?;
                s.push('\n');
                s
            }
        })
    }

    /// Parses either form, telling them apart by the first character.
    pub fn parse(text: &str) -> Result<Self> {
        let file = if text.starts_with('{') { Self::parse_json(text)? } else { Self::parse_csv(text)? };
        file.validate()?;
        Ok(file)
    }

    fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header_line = lines.next().ok_or_else(|| Error::Format("empty file".into()))?;
        let json = header_line.strip_prefix("# ").ok_or_else(|| Error::Format("missing '# ' header line".into()))?;
        let header: Header = serde_json::from_str(json)?;
        if lines.next() != Some("t,count") {
            return Err(Error::Format("missing 't,count' column line".into()));
        }
        let mut rows = Vec::new();
        for (k, line) in lines.enumerate() {
            let (t, c) = line.split_once(',').ok_or_else(|| Error::Format(format!("row {k}: expected 't,count'")))?;
            let t: i64 = t.parse().map_err(|_| Error::Format(format!("row {k}: bad perimeter {t:?}")))?;
            rows.push((t, parse_count(c, k)?));
        }
        Ok(Self { header, rows })
    }

    fn parse_json(text: &str) -> Result<Self> {
        let form: JsonForm = serde_json::from_str(text)?;
        let rows = form.rows.iter().enumerate().map(|(k, (t, c))| Ok((*t, parse_count(c, k)?))).collect::<Result<_>>()?;
        Ok(Self { header: form.header, rows })
    }

    fn validate(&self) -> Result<()> {
        if self.header.schema_version != SCHEMA_VERSION {
            return Err(Error::Format(format!("unsupported schema version {}", self.header.schema_version)));
        }
        if self.header.rows != self.rows.len() {
            return Err(Error::Format(format!("header says {} rows, found {}", self.header.rows, self.rows.len())));
        }
        if self.rows.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Format("rows are not strictly increasing in t".into()));
        }
        let sum = checksum(&self.rows);
        if sum != self.header.checksum {
            return Err(Error::Format(format!("checksum mismatch: header {}, rows {sum}", self.header.checksum)));
        }
        Ok(())
    }

    pub fn write(&self, path: &Path, format: Format) -> Result<()> {
        std::fs::write(path, self.render(format)?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

fn parse_count(c: &str, k: usize) -> Result<BigCount> {
    if c.is_empty() || !c.bytes().all(|b| b.is_ascii_digit()) || (c.len() > 1 && c.starts_with('0')) {
        return Err(Error::Format(format!("row {k}: count {c:?} is not a canonical decimal")));
    }
    c.parse().map_err(|_| Error::Format(format!("row {k}: bad count {c:?}")))
}

impl fmt::Display for ResultFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let support = match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) => format!("t in [{}, {}]", a.0, b.0),
            _ => "empty".to_string(),
        };
        let label = match self.header.mode {
            Mode::Proper => "i",
            Mode::Lattice => "d",
        };
        write!(
            f,
            "n={} {label}={} mode={:?} provenance={} total={} {support}",
            self.header.n,
            self.header.dim,
            self.header.mode,
            self.header.provenance,
            self.total()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultFile {
        let table = PerimeterTable::from_counts(4, 3, [(15, 8.into()), (16, 24.into())]);
        ResultFile::from_table(&table, Mode::Proper, Provenance::Formula, None)
    }

    #[test]
    fn csv_layout() {
        let text = sample().render(Format::Csv).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# {\"schema_version\":1,\"n\":4,\"dim\":3,\"mode\":\"proper\""));
        assert_eq!(lines.collect::<Vec<_>>(), ["t,count", "15,8", "16,24"]);
    }

    #[test]
    fn round_trips_byte_identically() {
        for format in [Format::Csv, Format::Json] {
            let mut file = sample();
            file.header.wall_time_ms = Some(12);
            let text = file.render(format).unwrap();
            let back = ResultFile::parse(&text).unwrap();
            assert_eq!(back, file);
            assert_eq!(back.render(format).unwrap(), text);
        }
    }

    #[test]
    fn rejects_tampering() {
        let text = sample().render(Format::Csv).unwrap();
        assert!(ResultFile::parse(&text.replace("16,24", "16,25")).is_err());
        assert!(ResultFile::parse(&text.replace("15,8", "15,08")).is_err());
        assert!(ResultFile::parse("t,count\n").is_err());
    }
}
