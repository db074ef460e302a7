//! Number formatting and text layout for human-readable output.

use std::fmt::Write as _;

/// Up to `digits` significant digits, positional notation for moderate
/// magnitudes and scientific notation otherwise.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let rounded: f64 = format!("{:.*e}", digits - 1, x).parse().unwrap_or(x);
    let magnitude = rounded.abs();
    if (1e-4..1e12).contains(&magnitude) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

/// Groups the integer part of a non-negative number in threes: `1234567` → `1,234,567`.
pub fn thousands(x: f64) -> String {
    let digits = format!("{:.0}", x.round());
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

/// Step letter for a system of `size` variables when the input has `n`.
pub fn step_name(n: usize, size: usize) -> String {
    let k = n - size;
    if k < 26 {
        format!("Step {}", (b'A' + k as u8) as char)
    } else {
        format!("Step {}", k + 1)
    }
}

/// Rows of a lower triangle, each followed by its right-hand side if given,
/// one equation per line.
pub fn system_block(
    out: &mut String,
    title: &str,
    labels: &[String],
    get: impl Fn(usize, usize) -> f64,
    size: usize,
    rhs: Option<&[f64]>,
) {
    let cells: Vec<Vec<String>> = (0..size)
        .map(|i| (0..=i).map(|j| sig(get(i, j), 10)).collect())
        .collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
    let label_width = labels
        .iter()
        .take(size)
        .map(|l| l.chars().count())
        .max()
        .unwrap_or(1);
    writeln!(out, "{title}").unwrap();
    for (i, row) in cells.iter().enumerate() {
        let mut line = format!("  {:<label_width$} ", labels[i]);
        for c in row {
            write!(line, " {c:>width$}").unwrap();
        }
        for _ in row.len()..size {
            write!(line, " {:>width$}", "").unwrap();
        }
        if let Some(rhs) = rhs {
            write!(line, "  = {}", sig(rhs[i], 10)).unwrap();
        }
        writeln!(out, "{}", line.trim_end()).unwrap();
    }
}
