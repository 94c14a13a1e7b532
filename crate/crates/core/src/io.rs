//! Delimited-text ingestion: delimiter detection, optional header row,
//! per-column numeric parsing with a malformed-cell budget.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Columns with more than this share of malformed cells are rejected.
pub const MALFORMED_LIMIT: f64 = 0.10;

const CANDIDATES: [u8; 3] = *b",\t;";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub index: usize,
    /// Cells in the column, including malformed ones.
    pub rows: usize,
    pub values: Vec<f64>,
    /// Empty, missing or non-numeric cells.
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub has_header: bool,
    pub delimiter: u8,
    pub columns: Vec<Column>,
}

/// Picks the candidate delimiter that appears most often in the first
/// non-empty line; comma when none appears.
pub fn detect_delimiter(text: &str) -> u8 {
    let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let mut best = (b',', 0);
    for d in CANDIDATES {
        let count = line.bytes().filter(|&b| b == d).count();
        if count > best.1 {
            best = (d, count);
        }
    }
    best.0
}

/// Parses `"," "tab" "\t" ";"` or any single ASCII character.
pub fn parse_delimiter(s: &str) -> Result<u8> {
    match s {
        "tab" | "\\t" | "\t" => Ok(b'\t'),
        _ if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        _ => Err(Error::Input(format!("unsupported delimiter {s:?}"))),
    }
}

/// Decimal or scientific notation with a dot separator; non-finite values
/// count as malformed.
pub fn parse_number(cell: &str) -> Option<f64> {
    let cell = cell.trim();
    if cell.is_empty() || cell.bytes().any(|b| b.is_ascii_alphabetic() && b != b'e' && b != b'E') {
        return None;
    }
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

pub fn read_table(text: &str, delimiter: Option<u8>) -> Result<Table> {
    let delimiter = delimiter.unwrap_or_else(|| detect_delimiter(text));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Input(e.to_string()))?;
        if record.iter().all(|c| c.is_empty()) {
            continue;
        }
        records.push(record);
    }
    let Some(first) = records.first() else {
        return Err(Error::EmptyInput("no rows in input".into()));
    };
    let has_header = first.iter().any(|c| !c.is_empty() && parse_number(c).is_none());
    let width = records.iter().map(|r| r.len()).max().unwrap_or(0);
    let body = if has_header { &records[1..] } else { &records[..] };

    let columns = (0..width)
        .map(|index| {
            let name = match has_header {
                true => first.get(index).filter(|c| !c.is_empty()).map(str::to_string),
                false => None,
            }
            .unwrap_or_else(|| format!("column{index}"));
            let values: Vec<f64> = body.iter().filter_map(|r| r.get(index).and_then(parse_number)).collect();
            Column {
                name,
                index,
                rows: body.len(),
                skipped: body.len() - values.len(),
                values,
            }
        })
        .collect();
    Ok(Table {
        has_header,
        delimiter,
        columns,
    })
}

/// Which columns to analyze.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ColumnSelector {
    #[default]
    First,
    All,
    /// Header names or 0-based indices.
    List(Vec<String>),
}

impl ColumnSelector {
    /// `all` (or `both`), otherwise a comma-separated list.
    pub fn parse(s: &str) -> Self {
        match s.trim() {
            "all" | "both" => Self::All,
            other => Self::List(other.split(',').map(|p| p.trim().to_string()).collect()),
        }
    }
}

impl Table {
    /// Resolves `selector` to columns, enforcing the malformed-cell budget.
    pub fn select(&self, selector: &ColumnSelector) -> Result<Vec<&Column>> {
        let chosen: Vec<&Column> = match selector {
            ColumnSelector::First => self.columns.iter().take(1).collect(),
            ColumnSelector::All => self.columns.iter().collect(),
            ColumnSelector::List(items) => items
                .iter()
                .map(|item| {
                    self.columns
                        .iter()
                        .find(|c| &c.name == item)
                        .or_else(|| item.parse::<usize>().ok().and_then(|i| self.columns.get(i)))
                        .ok_or_else(|| Error::Input(format!("no column named or indexed {item:?}")))
                })
                .collect::<Result<_>>()?,
        };
        if chosen.is_empty() {
            return Err(Error::EmptyInput("no columns selected".into()));
        }
        for c in &chosen {
            if c.values.is_empty() {
                return Err(Error::EmptyInput(format!("column {:?} has no numeric values", c.name)));
            }
            if c.skipped as f64 > MALFORMED_LIMIT * c.rows as f64 {
                return Err(Error::Input(format!(
                    "column {:?}: {} of {} cells are not numeric (limit {}%)",
                    c.name,
                    c.skipped,
                    c.rows,
                    MALFORMED_LIMIT * 100.0
                )));
            }
        }
        Ok(chosen)
    }
}
