//! Sparse labeled datasets in the usual "label idx:val ..." text format:
//! one example per line, 1-based ascending indices on disk, 0-based in
//! memory. LF and CRLF both parse; blank lines are skipped.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::features::EncodedFeatures;
use crate::sparse::SparseVector;

/// One labeled example plus the source line it came from, for error
/// reporting downstream.
#[derive(Clone, Debug, PartialEq)]
pub struct Example {
    pub label: i64,
    pub vector: SparseVector,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct LabeledDataset {
    pub dim: usize,
    pub examples: Vec<Example>,
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parse a dataset. `declared_dim`, when given, fixes the dimension (so
/// train/test splits share a projection space); otherwise the dimension
/// is the largest observed 1-based index.
pub fn parse_dataset<R: BufRead>(reader: R, declared_dim: Option<usize>) -> Result<LabeledDataset> {
    type RawExample = (i64, Vec<(u32, f64)>, usize);
    let mut raw: Vec<RawExample> = Vec::new();
    let mut max_index = 0usize; // 1-based
    for (line_no, line) in reader.lines().enumerate() {
        let line_no = line_no + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let label_field = fields.next().expect("non-blank line has a first field");
        let label: i64 = label_field
            .parse()
            .map_err(|_| parse_error(line_no, format!("invalid label '{label_field}'")))?;
        let mut entries: Vec<(u32, f64)> = Vec::new();
        let mut prev_index = 0u32; // valid indices start at 1
        for field in fields {
            let (idx_str, val_str) = field
                .split_once(':')
                .ok_or_else(|| parse_error(line_no, format!("missing ':' in '{field}'")))?;
            let index: u32 = idx_str
                .parse()
                .map_err(|_| parse_error(line_no, format!("invalid index '{idx_str}'")))?;
            if index == 0 {
                return Err(parse_error(line_no, "indices are 1-based; 0 is invalid"));
            }
            if index <= prev_index {
                return Err(parse_error(
                    line_no,
                    format!("index {index} not ascending after {prev_index}"),
                ));
            }
            let value: f64 = val_str
                .parse()
                .map_err(|_| parse_error(line_no, format!("invalid value '{val_str}'")))?;
            if !value.is_finite() {
                return Err(parse_error(
                    line_no,
                    format!("non-finite value '{val_str}'"),
                ));
            }
            prev_index = index;
            entries.push((index - 1, value));
        }
        max_index = max_index.max(prev_index as usize);
        raw.push((label, entries, line_no));
    }

    let dim = match declared_dim {
        Some(d) => {
            if max_index > d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    vector: max_index,
                });
            }
            d
        }
        None => max_index,
    };

    let mut examples = Vec::with_capacity(raw.len());
    for (label, entries, line) in raw {
        let vector =
            SparseVector::new(dim, entries).map_err(|e| parse_error(line, e.to_string()))?;
        examples.push(Example {
            label,
            vector,
            line,
        });
    }
    Ok(LabeledDataset { dim, examples })
}

/// Divide every entry by the vector sum. Input must be nonnegative with
/// a positive sum; the result sums to 1 up to round-off.
pub fn l1_normalize(v: &SparseVector) -> Result<SparseVector> {
    if let Some((index, value)) = v.first_negative() {
        return Err(Error::NegativeEntry { index, value });
    }
    if v.is_empty() {
        return Err(Error::EmptyVector);
    }
    let sum = v.sum();
    v.scaled(1.0 / sum)
}

/// Write encoded features as a dataset: value 1 at every one-position,
/// indices 1-based. Round-trips through `parse_dataset`.
pub fn write_features<W: Write>(features: &[(i64, EncodedFeatures)], mut out: W) -> Result<()> {
    if let Some((_, first)) = features.first() {
        let length = first.length();
        for (_, f) in features {
            if f.length() != length {
                return Err(Error::MixedFeatureLength(length, f.length()));
            }
        }
    }
    for (label, f) in features {
        write!(out, "{label}")?;
        for &p in f.ones() {
            write!(out, " {}:1", p + 1)?;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}
