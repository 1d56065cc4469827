//! Reading samples from text files.
//!
//! Accepted layouts: decimals separated by whitespace and newlines, or a
//! single-column CSV with an optional header line. Blank lines and lines
//! starting with `#` are ignored.

use std::fmt;
use std::io::Read;
use std::path::Path;

use powgof_core::{validate_sample, Sample};
use thiserror::Error;

/// A value outside `(0, 1)` and the line it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Offender {
    pub line: usize,
    pub value: f64,
}

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: `{token}` uses a decimal comma; write decimals with a point, e.g. `0.5`")]
    DecimalComma { line: usize, token: String },
    #[error("line {line}: expected a single column, found {columns} fields")]
    MultipleColumns { line: usize, columns: usize },
    #[error("line {line}: cannot parse `{token}` as a number")]
    Parse { line: usize, token: String },
    #[error("line {line}: `{token}` is not a finite number")]
    NonFinite { line: usize, token: String },
    #[error("{} value(s) outside the open interval (0, 1): {}", .0.len(), OffenderList(.0))]
    OutOfSupport(Vec<Offender>),
    #[error("need at least 2 observations, found {0}")]
    TooFew(usize),
    #[error(transparent)]
    Invalid(#[from] powgof_core::Error),
}

struct OffenderList<'a>(&'a [Offender]);

impl fmt::Display for OffenderList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, o) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "line {} ({})", o.line, o.value)?;
        }
        Ok(())
    }
}

/// `digits,digits` with an optional sign: a number written with a decimal comma.
fn is_decimal_comma(token: &str) -> bool {
    let t = token.strip_prefix(['+', '-']).unwrap_or(token);
    match t.split_once(',') {
        Some((int, frac)) => {
            !int.is_empty()
                && !frac.is_empty()
                && int.bytes().all(|b| b.is_ascii_digit())
                && frac.bytes().all(|b| b.is_ascii_digit())
        }
        None => false,
    }
}

fn unquote(field: &str) -> &str {
    let f = field.trim();
    f.strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .unwrap_or(f)
        .trim()
}

/// Parses sample text into raw values, checking support and finiteness.
pub fn parse_values(text: &str) -> Result<Vec<f64>, InputError> {
    let mut values = Vec::new();
    let mut offenders = Vec::new();
    let mut seen_content = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let first_content = !seen_content;
        seen_content = true;
        if let Some(tok) = trimmed.split_whitespace().find(|t| is_decimal_comma(t)) {
            return Err(InputError::DecimalComma {
                line,
                token: tok.to_string(),
            });
        }
        let tokens: Vec<&str> = if trimmed.contains(',') {
            let fields: Vec<&str> = trimmed.split(',').map(unquote).collect();
            let filled: Vec<&str> = fields.iter().copied().filter(|f| !f.is_empty()).collect();
            if filled.len() > 1 {
                return Err(InputError::MultipleColumns {
                    line,
                    columns: fields.len(),
                });
            }
            filled
        } else {
            trimmed.split_whitespace().map(unquote).collect()
        };
        for tok in tokens {
            match tok.parse::<f64>() {
                Ok(v) if !v.is_finite() => {
                    return Err(InputError::NonFinite {
                        line,
                        token: tok.to_string(),
                    })
                }
                Ok(v) => {
                    if v <= 0.0 || v >= 1.0 {
                        offenders.push(Offender { line, value: v });
                    }
                    values.push(v);
                }
                // a non-numeric first line is a header
                Err(_) if first_content && tok.bytes().any(|b| b.is_ascii_alphabetic()) => break,
                Err(_) => {
                    return Err(InputError::Parse {
                        line,
                        token: tok.to_string(),
                    })
                }
            }
        }
    }
    if !offenders.is_empty() {
        return Err(InputError::OutOfSupport(offenders));
    }
    if values.len() < 2 {
        return Err(InputError::TooFew(values.len()));
    }
    Ok(values)
}

/// Parses and validates sample text.
pub fn parse_sample(text: &str) -> Result<Sample, InputError> {
    Ok(validate_sample(&parse_values(text)?)?)
}

/// Reads a sample from `path`, or from standard input when `path` is `-`.
pub fn read_sample(path: &Path) -> Result<Sample, InputError> {
    let io_err = |source| InputError::Io {
        path: path.display().to_string(),
        source,
    };
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io_err)?;
        s
    } else {
        std::fs::read_to_string(path).map_err(io_err)?
    };
    parse_sample(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whitespace_and_newlines() {
        let v = parse_values("0.1 0.2\n\n0.3\t0.4\n# note\n0.5\n").unwrap();
        assert_eq!(v, vec![0.1, 0.2, 0.3, 0.4, 0.5]);
    }

    #[test]
    fn csv_with_header() {
        let v = parse_values("x\n0.25,\n\"0.5\"\n0.75\n").unwrap();
        assert_eq!(v, vec![0.25, 0.5, 0.75]);
    }

    #[test]
    fn decimal_comma_is_rejected() {
        let e = parse_values("0.1\n0,5\n").unwrap_err();
        assert!(matches!(e, InputError::DecimalComma { line: 2, .. }));
        assert!(e.to_string().contains("decimal comma"));
    }

    #[test]
    fn all_out_of_support_lines_listed() {
        let e = parse_values("0.2\n1.0\n0.3\n0\n-0.5\n").unwrap_err();
        match &e {
            InputError::OutOfSupport(o) => {
                assert_eq!(o.iter().map(|o| o.line).collect::<Vec<_>>(), vec![2, 4, 5])
            }
            other => panic!("{other:?}"),
        }
        assert!(e.to_string().contains("line 2 (1)"));
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_values("0.1\nabc\n"), Err(InputError::Parse { line: 2, .. })));
        assert!(matches!(parse_values("0.1,0.2\n"), Err(InputError::MultipleColumns { .. })));
        assert!(matches!(parse_values("0.1\nNaN\n"), Err(InputError::NonFinite { .. })));
        assert!(matches!(parse_values("0.1\n"), Err(InputError::TooFew(1))));
        assert!(matches!(parse_values("value\n"), Err(InputError::TooFew(0))));
    }
}
