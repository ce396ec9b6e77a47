//! Count and table parsing.
//!
//! Plain text is comma separated, one table row per line, LF or CRLF. JSON
//! input is an object `{"counts": [...]}` or `{"table": [[...], ...]}`.

use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonInput {
    counts: Option<Vec<f64>>,
    table: Option<Vec<Vec<f64>>>,
}

fn strip(text: &str) -> &str {
    text.strip_prefix('\u{feff}').unwrap_or(text).trim()
}

fn parse_json(text: &str) -> Result<JsonInput, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse { what: "JSON input", detail: e.to_string() })
}

fn parse_line(line: &str, row: usize) -> Result<Vec<f64>, CliError> {
    line.split(',')
        .enumerate()
        .map(|(col, field)| {
            let field = field.trim();
            if field.is_empty() {
                return Err(CliError::Parse { what: "count", detail: format!("empty field at row {row}, column {col}") });
            }
            let v: f64 = field
                .parse()
                .map_err(|_| CliError::Parse { what: "count", detail: format!("`{field}` at row {row}, column {col}") })?;
            if !v.is_finite() {
                return Err(CliError::Parse { what: "count", detail: format!("`{field}` is not finite") });
            }
            Ok(v)
        })
        .collect()
}

fn lines(text: &str) -> impl Iterator<Item = &str> {
    text.split('\n').map(|l| l.trim_end_matches('\r')).filter(|l| !l.trim().is_empty())
}

fn check_negative(values: &[f64]) -> Result<(), CliError> {
    match values.iter().position(|&v| v < 0.0) {
        Some(index) => Err(CliError::NegativeCount { index, value: values[index] }),
        None => Ok(()),
    }
}

/// A count vector: every field on every line, in reading order.
pub fn parse_counts(text: &str) -> Result<Vec<f64>, CliError> {
    let text = strip(text);
    if text.is_empty() {
        return Err(CliError::EmptyInput);
    }
    let counts = if text.starts_with('{') {
        match parse_json(text)? {
            JsonInput { counts: Some(c), table: None } => c,
            _ => return Err(CliError::Parse { what: "JSON input", detail: "expected a `counts` array".into() }),
        }
    } else {
        let mut all = Vec::new();
        for (row, line) in lines(text).enumerate() {
            all.extend(parse_line(line, row)?);
        }
        all
    };
    if counts.is_empty() {
        return Err(CliError::EmptyInput);
    }
    check_negative(&counts)?;
    Ok(counts)
}

/// A rectangular table, one row per line.
pub fn parse_table(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let text = strip(text);
    if text.is_empty() {
        return Err(CliError::EmptyInput);
    }
    let table = if text.starts_with('{') {
        match parse_json(text)? {
            JsonInput { table: Some(t), counts: None } => t,
            JsonInput { counts: Some(c), table: None } => vec![c],
            _ => return Err(CliError::Parse { what: "JSON input", detail: "expected a `table` array".into() }),
        }
    } else {
        lines(text).enumerate().map(|(row, line)| parse_line(line, row)).collect::<Result<_, _>>()?
    };
    if table.is_empty() || table[0].is_empty() {
        return Err(CliError::EmptyInput);
    }
    let width = table[0].len();
    if let Some((row, r)) = table.iter().enumerate().find(|(_, r)| r.len() != width) {
        return Err(CliError::RaggedTable { row, expected: width, got: r.len() });
    }
    let flat: Vec<f64> = table.iter().flatten().copied().collect();
    check_negative(&flat)?;
    Ok(table)
}
