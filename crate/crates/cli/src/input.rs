use std::path::Path;

use depower::Dataset;

use crate::error::CliError;

/// Parses two columns of reals separated by whitespace and/or commas.
/// Blank lines and lines starting with `#` are ignored.
pub fn parse_two_columns(text: &str) -> Result<Dataset<f64>, CliError> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let [a, b] = fields.as_slice() else {
            return Err(CliError::usage(format!(
                "line {}: expected 2 columns, found {}",
                i + 1,
                fields.len()
            )));
        };
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| CliError::usage(format!("line {}: `{s}` is not a number", i + 1)))
        };
        x.push(num(a)?);
        y.push(num(b)?);
    }
    Dataset::new(x, y).map_err(|e| CliError::usage(e.to_string()))
}

pub fn read_two_columns(path: &Path) -> Result<Dataset<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_two_columns(&text)
}
