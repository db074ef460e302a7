//! Text file formats.
//!
//! Normal system:
//!
//! ```text
//! normal-system v1
//! n 2
//! s 10          # optional
//! rss 3.5       # optional
//! row 1: 4
//! row 2: 2 5
//! rhs: 1 1
//! ```
//!
//! Regression matrix:
//!
//! ```text
//! regression v1
//! rows 3
//! cols 2
//! 1 0
//! 0 1
//! 1 1
//! obs: 1 2 3    # optional
//! ```
//!
//! A `factor --json` document is accepted as well; its `input` member is
//! read back as a normal system.
//!
//! `#` starts a comment; blank lines are ignored. Reals use a decimal point
//! and may be written in scientific notation. Serialization writes 17
//! significant digits, so parsing what was written reproduces every value.

use std::fmt::Write as _;

use laplace_core::{DenseMatrix, NormalSystem};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const NORMAL_SYSTEM_HEADER: &str = "normal-system v1";
pub const REGRESSION_HEADER: &str = "regression v1";

/// The contents of a regression file.
#[derive(Clone, Debug, PartialEq)]
pub struct Regression {
    pub matrix: DenseMatrix,
    pub observations: Option<Vec<f64>>,
}

/// Either file kind, as detected from its header.
#[derive(Clone, Debug, PartialEq)]
pub enum InputFile {
    Normal(NormalSystem),
    Regression(Regression),
}

/// JSON form of a normal system. `lower[i]` holds row `i` up to the diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemJson {
    pub n: usize,
    pub observations: Option<usize>,
    pub rss: Option<f64>,
    pub lower: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

impl SystemJson {
    pub fn from_system(system: &NormalSystem) -> Self {
        let n = system.n();
        Self {
            n,
            observations: (system.observations() > 0).then_some(system.observations()),
            rss: system.rss(),
            lower: (0..n)
                .map(|i| (0..=i).map(|j| system.get(i, j)).collect())
                .collect(),
            rhs: system.rhs().to_vec(),
        }
    }

    pub fn to_system(&self) -> Result<NormalSystem, laplace_core::Error> {
        for (i, row) in self.lower.iter().enumerate() {
            if row.len() != i + 1 {
                return Err(laplace_core::Error::DimensionMismatch {
                    what: "lower triangle row",
                    expected: i + 1,
                    found: row.len(),
                });
            }
        }
        let lower = self.lower.iter().flatten().copied().collect();
        let mut system = NormalSystem::new(self.n, lower, self.rhs.clone())?;
        if let Some(s) = self.observations {
            system = system.with_observations(s);
        }
        if let Some(rss) = self.rss {
            system = system.with_rss(rss)?;
        }
        Ok(system)
    }
}

#[derive(Deserialize)]
struct Document {
    input: SystemJson,
}

fn parse_json_document(text: &str) -> Result<NormalSystem, CliError> {
    let doc: Document =
        serde_json::from_str(text).map_err(|e| CliError::parse(e.line(), e.to_string()))?;
    doc.input.to_system().map_err(domain_at(1))
}

/// Lines with comments stripped, paired with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        };
        let line = line.trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_real(line: usize, token: &str) -> Result<f64, CliError> {
    let v: f64 = token
        .parse()
        .map_err(|_| CliError::parse(line, format!("invalid number `{token}`")))?;
    if !v.is_finite() {
        return Err(CliError::parse(
            line,
            format!("non-finite number `{token}`"),
        ));
    }
    Ok(v)
}

fn parse_reals(line: usize, text: &str) -> Result<Vec<f64>, CliError> {
    text.split_whitespace()
        .map(|t| parse_real(line, t))
        .collect()
}

fn parse_count(line: usize, token: &str) -> Result<usize, CliError> {
    token
        .parse()
        .map_err(|_| CliError::parse(line, format!("invalid count `{token}`")))
}

fn domain_at(line: usize) -> impl Fn(laplace_core::Error) -> CliError {
    move |e| CliError::parse(line, e.to_string())
}

pub fn parse_input(text: &str) -> Result<InputFile, CliError> {
    if text.trim_start().starts_with('{') {
        return parse_json_document(text).map(InputFile::Normal);
    }
    match content_lines(text).next() {
        Some((_, NORMAL_SYSTEM_HEADER)) => parse_normal_system(text).map(InputFile::Normal),
        Some((_, REGRESSION_HEADER)) => parse_regression(text).map(InputFile::Regression),
        Some((line, other)) => Err(CliError::parse(line, format!("unknown header `{other}`"))),
        None => Err(CliError::parse(1, "empty file")),
    }
}

pub fn parse_normal_system(text: &str) -> Result<NormalSystem, CliError> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, NORMAL_SYSTEM_HEADER)) => {}
        Some((line, other)) => {
            return Err(CliError::parse(
                line,
                format!("expected `{NORMAL_SYSTEM_HEADER}`, found `{other}`"),
            ))
        }
        None => return Err(CliError::parse(1, "empty file")),
    }
    let mut n: Option<usize> = None;
    let mut s: Option<usize> = None;
    let mut rss: Option<(usize, f64)> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Option<Vec<f64>> = None;
    let mut last_line = 1;
    for (line, content) in lines {
        last_line = line;
        if let Some(rest) = content.strip_prefix("row ") {
            let n = n.ok_or_else(|| CliError::parse(line, "`row` before `n`"))?;
            let (index, values) = rest
                .split_once(':')
                .ok_or_else(|| CliError::parse(line, "expected `row <i>: <values>`"))?;
            let index = parse_count(line, index.trim())?;
            if index != rows.len() + 1 {
                return Err(CliError::parse(
                    line,
                    format!("expected row {}, found row {index}", rows.len() + 1),
                ));
            }
            if index > n {
                return Err(CliError::parse(
                    line,
                    format!("row {index} exceeds n = {n}"),
                ));
            }
            let values = parse_reals(line, values)?;
            if values.len() != index {
                return Err(CliError::parse(
                    line,
                    format!(
                        "row {index} must have {index} entries, found {}",
                        values.len()
                    ),
                ));
            }
            rows.push(values);
        } else if let Some(values) = content.strip_prefix("rhs:") {
            if rhs.is_some() {
                return Err(CliError::parse(line, "duplicate `rhs`"));
            }
            let n = n.ok_or_else(|| CliError::parse(line, "`rhs` before `n`"))?;
            let values = parse_reals(line, values)?;
            if values.len() != n {
                return Err(CliError::parse(
                    line,
                    format!("rhs must have {n} entries, found {}", values.len()),
                ));
            }
            rhs = Some(values);
        } else {
            let mut parts = content.split_whitespace();
            let key = parts.next().unwrap_or_default();
            let value = parts
                .next()
                .ok_or_else(|| CliError::parse(line, format!("`{key}` needs a value")))?;
            if parts.next().is_some() {
                return Err(CliError::parse(
                    line,
                    format!("trailing input after `{key}`"),
                ));
            }
            match key {
                "n" if n.is_none() => {
                    let v = parse_count(line, value)?;
                    if v == 0 {
                        return Err(CliError::parse(line, "n must be at least 1"));
                    }
                    n = Some(v);
                }
                "s" if s.is_none() => s = Some(parse_count(line, value)?),
                "rss" if rss.is_none() => rss = Some((line, parse_real(line, value)?)),
                "n" | "s" | "rss" => {
                    return Err(CliError::parse(line, format!("duplicate `{key}`")))
                }
                other => return Err(CliError::parse(line, format!("unknown key `{other}`"))),
            }
        }
    }
    let n = n.ok_or_else(|| CliError::parse(last_line, "missing `n`"))?;
    if rows.len() != n {
        return Err(CliError::parse(
            last_line,
            format!("expected {n} rows, found {}", rows.len()),
        ));
    }
    let rhs = rhs.ok_or_else(|| CliError::parse(last_line, "missing `rhs`"))?;
    let lower = rows.into_iter().flatten().collect();
    let mut system = NormalSystem::new(n, lower, rhs).map_err(domain_at(last_line))?;
    if let Some(s) = s {
        system = system.with_observations(s);
    }
    if let Some((line, rss)) = rss {
        system = system.with_rss(rss).map_err(domain_at(line))?;
    }
    Ok(system)
}

pub fn parse_regression(text: &str) -> Result<Regression, CliError> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, REGRESSION_HEADER)) => {}
        Some((line, other)) => {
            return Err(CliError::parse(
                line,
                format!("expected `{REGRESSION_HEADER}`, found `{other}`"),
            ))
        }
        None => return Err(CliError::parse(1, "empty file")),
    }
    let mut nrows: Option<usize> = None;
    let mut ncols: Option<usize> = None;
    let mut data: Vec<f64> = Vec::new();
    let mut seen_rows = 0;
    let mut obs: Option<Vec<f64>> = None;
    let mut last_line = 1;
    for (line, content) in lines {
        last_line = line;
        if let Some(values) = content.strip_prefix("obs:") {
            let r = nrows.ok_or_else(|| CliError::parse(line, "`obs` before `rows`"))?;
            let values = parse_reals(line, values)?;
            if values.len() != r {
                return Err(CliError::parse(
                    line,
                    format!("obs must have {r} entries, found {}", values.len()),
                ));
            }
            if obs.replace(values).is_some() {
                return Err(CliError::parse(line, "duplicate `obs`"));
            }
        } else if let Some(v) = content.strip_prefix("rows ") {
            if nrows.replace(parse_count(line, v.trim())?).is_some() {
                return Err(CliError::parse(line, "duplicate `rows`"));
            }
        } else if let Some(v) = content.strip_prefix("cols ") {
            if ncols.replace(parse_count(line, v.trim())?).is_some() {
                return Err(CliError::parse(line, "duplicate `cols`"));
            }
        } else {
            let (r, c) = match (nrows, ncols) {
                (Some(r), Some(c)) => (r, c),
                _ => return Err(CliError::parse(line, "matrix row before `rows` and `cols`")),
            };
            if obs.is_some() {
                return Err(CliError::parse(line, "matrix row after `obs`"));
            }
            let values = parse_reals(line, content)?;
            if values.len() != c {
                return Err(CliError::parse(
                    line,
                    format!("expected {c} entries, found {}", values.len()),
                ));
            }
            seen_rows += 1;
            if seen_rows > r {
                return Err(CliError::parse(line, format!("more than {r} matrix rows")));
            }
            data.extend(values);
        }
    }
    let (r, c) = match (nrows, ncols) {
        (Some(r), Some(c)) => (r, c),
        _ => return Err(CliError::parse(last_line, "missing `rows` or `cols`")),
    };
    if seen_rows != r {
        return Err(CliError::parse(
            last_line,
            format!("expected {r} matrix rows, found {seen_rows}"),
        ));
    }
    let matrix = DenseMatrix::new(r, c, data).map_err(domain_at(last_line))?;
    Ok(Regression {
        matrix,
        observations: obs,
    })
}

/// Canonical 17-significant-digit representation.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn join_reals(values: impl IntoIterator<Item = f64>) -> String {
    values
        .into_iter()
        .map(format_real)
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn write_normal_system(system: &NormalSystem) -> String {
    let mut out = String::new();
    let n = system.n();
    writeln!(out, "{NORMAL_SYSTEM_HEADER}").unwrap();
    writeln!(out, "n {n}").unwrap();
    if system.observations() > 0 {
        writeln!(out, "s {}", system.observations()).unwrap();
    }
    if let Some(rss) = system.rss() {
        writeln!(out, "rss {}", format_real(rss)).unwrap();
    }
    for i in 0..n {
        writeln!(
            out,
            "row {}: {}",
            i + 1,
            join_reals((0..=i).map(|j| system.get(i, j)))
        )
        .unwrap();
    }
    writeln!(out, "rhs: {}", join_reals(system.rhs().iter().copied())).unwrap();
    out
}

pub fn write_regression(reg: &Regression) -> String {
    let mut out = String::new();
    let m = &reg.matrix;
    writeln!(out, "{REGRESSION_HEADER}").unwrap();
    writeln!(out, "rows {}", m.rows()).unwrap();
    writeln!(out, "cols {}", m.cols()).unwrap();
    for i in 0..m.rows() {
        writeln!(out, "{}", join_reals(m.row(i).iter().copied())).unwrap();
    }
    if let Some(obs) = &reg.observations {
        writeln!(out, "obs: {}", join_reals(obs.iter().copied())).unwrap();
    }
    out
}
