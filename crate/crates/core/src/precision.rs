//! Re-running the elimination with a fixed budget of significant digits.
//!
//! [`replay_factor`] repeats the reverse factorization with every `+ - * /`
//! rounded to `d` significant decimal digits and compares each intermediate
//! system with the double-precision run. Printed historical values can be
//! supplied for comparison as well; they are never used as inputs by
//! [`replay_factor_against`].
//!
//! [`replay_anchored`] instead restarts every step from the printed values
//! of the previous one, the way a hand computation proceeds from its own
//! written intermediate results.

use alloc::string::String;
use alloc::vec::Vec;

use crate::cholesky::{eliminate, eliminate_step, ReverseCholesky, SnapshotPolicy};
use crate::matrix::{packed_index, packed_len, NormalSystem};
use crate::rounding::{Arithmetic, Exact, Significant, MAX_DIGITS};
use crate::{Error, Result};

/// A value as printed in a table, with its last printed digit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrintedValue {
    pub value: f64,
    /// Place value of the last significant printed digit.
    pub unit: f64,
    pub significant_digits: u32,
}

impl PrintedValue {
    /// Parses plain decimal notation such as `-13208350`, `0.7684`, `+4.918`.
    /// Every written digit is taken as significant; see
    /// [`PrintedValue::with_placeholder_zeros`].
    pub fn parse(text: &str) -> Result<Self> {
        const BAD: Error = Error::InvalidArgument("malformed printed value");
        let trimmed = text.trim();
        let value: f64 = trimmed.parse().map_err(|_| BAD)?;
        let digits = trimmed.trim_start_matches(['-', '+']);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit() || b == b'.') {
            return Err(BAD);
        }
        let (int_part, frac_part) = match digits.split_once('.') {
            Some((i, f)) => (i, f),
            None => (digits, ""),
        };
        let leading = int_part
            .bytes()
            .chain(frac_part.bytes())
            .take_while(|&b| b == b'0')
            .count();
        let significant = (int_part.len() + frac_part.len()).saturating_sub(leading);
        Ok(Self {
            value,
            unit: 1.0 / libm::pow(10.0, frac_part.len() as f64),
            significant_digits: significant.max(1) as u32,
        })
    }

    /// Marks the last `zeros` digits of an integer as placeholders, e.g. a
    /// seven-digit value written as `-13208360`.
    pub fn with_placeholder_zeros(mut self, zeros: u32) -> Self {
        self.unit *= libm::pow(10.0, zeros as f64);
        self.significant_digits = self.significant_digits.saturating_sub(zeros).max(1);
        self
    }

    /// Within one unit of the last printed digit.
    pub fn matches(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.unit * (1.0 + 1e-9)
    }

    /// The printed value would not have been obtained by rounding `x`.
    pub fn disagrees_with(&self, x: f64) -> bool {
        (x - self.value).abs() > 0.5 * self.unit * (1.0 + 1e-9)
    }
}

/// One printed intermediate system: the lower triangle row by row and the
/// right-hand side.
#[derive(Clone, Debug, PartialEq)]
pub struct HistoricalStep {
    pub label: String,
    pub size: usize,
    pub lower: Vec<PrintedValue>,
    pub rhs: Vec<PrintedValue>,
}

impl HistoricalStep {
    pub fn new(
        label: &str,
        size: usize,
        lower: Vec<PrintedValue>,
        rhs: Vec<PrintedValue>,
    ) -> Result<Self> {
        if lower.len() != packed_len(size) || rhs.len() != size {
            return Err(Error::DimensionMismatch {
                what: "printed step",
                expected: packed_len(size) + size,
                found: lower.len() + rhs.len(),
            });
        }
        Ok(Self {
            label: String::from(label),
            size,
            lower,
            rhs,
        })
    }

    pub fn to_system(&self) -> Result<NormalSystem> {
        NormalSystem::new(
            self.size,
            self.lower.iter().map(|p| p.value).collect(),
            self.rhs.iter().map(|p| p.value).collect(),
        )
    }

    pub fn entry(&self, position: Position) -> Option<&PrintedValue> {
        match position {
            Position::Matrix { row, col } if col <= row && row < self.size => {
                self.lower.get(packed_index(row, col))
            }
            Position::Rhs { row } => self.rhs.get(row),
            _ => None,
        }
    }
}

/// Where an entry sits within a step. Zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Position {
    Matrix { row: usize, col: usize },
    Rhs { row: usize },
    Solution { index: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HistoricalDiff {
    pub printed: PrintedValue,
    pub agreement: u32,
    /// The printed digits differ from the rounded reference value.
    pub flagged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntryDiff {
    /// Number of variables remaining in the system this entry belongs to;
    /// zero for solution entries.
    pub step_size: usize,
    pub position: Position,
    pub replayed: f64,
    pub reference: f64,
    /// Leading significant digits shared by `replayed` and `reference`,
    /// at most the digit budget.
    pub agreement: u32,
    pub historical: Option<HistoricalDiff>,
}

impl EntryDiff {
    pub fn replay_flagged(&self, digits: u32) -> bool {
        self.agreement < digits
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DigitDiffReport {
    pub digits: u32,
    pub entries: Vec<EntryDiff>,
}

impl DigitDiffReport {
    /// `Σ (15 - agreement)` over all entries.
    pub fn total_disagreeing_digits(&self) -> u32 {
        self.entries
            .iter()
            .map(|e| MAX_DIGITS - e.agreement.min(MAX_DIGITS))
            .sum()
    }

    pub fn min_agreement(&self) -> Option<u32> {
        self.entries.iter().map(|e| e.agreement).min()
    }

    pub fn entry(&self, step_size: usize, position: Position) -> Option<&EntryDiff> {
        self.entries
            .iter()
            .find(|e| e.step_size == step_size && e.position == position)
    }

    /// Entries whose replayed value lost digits against the reference.
    pub fn replay_flagged(&self) -> impl Iterator<Item = &EntryDiff> {
        let d = self.digits;
        self.entries.iter().filter(move |e| e.replay_flagged(d))
    }

    /// Entries whose historical value disagrees with the reference.
    pub fn historical_flagged(&self) -> impl Iterator<Item = &EntryDiff> {
        self.entries
            .iter()
            .filter(|e| e.historical.is_some_and(|h| h.flagged))
    }
}

/// Count of leading significant digits on which `x` agrees with `reference`,
/// capped at `cap`.
pub fn agreement_digits(x: f64, reference: f64, cap: u32) -> u32 {
    if x == reference {
        return cap;
    }
    if reference == 0.0 || !x.is_finite() {
        return 0;
    }
    let rel = ((x - reference) / reference).abs();
    let digits = libm::floor(-libm::log10(rel));
    if digits <= 0.0 {
        0
    } else {
        (digits as u32).min(cap)
    }
}

fn historical_diff(printed: Option<&PrintedValue>, reference: f64) -> Option<HistoricalDiff> {
    printed.map(|p| HistoricalDiff {
        printed: *p,
        agreement: agreement_digits(p.value, reference, MAX_DIGITS),
        flagged: p.disagrees_with(reference),
    })
}

fn push_system_diffs(
    entries: &mut Vec<EntryDiff>,
    size: usize,
    replayed: (&[f64], &[f64]),
    reference: (&[f64], &[f64]),
    printed: Option<&HistoricalStep>,
    digits: u32,
) {
    for row in 0..size {
        for col in 0..=row {
            let idx = packed_index(row, col);
            let position = Position::Matrix { row, col };
            entries.push(EntryDiff {
                step_size: size,
                position,
                replayed: replayed.0[idx],
                reference: reference.0[idx],
                agreement: agreement_digits(replayed.0[idx], reference.0[idx], digits),
                historical: historical_diff(
                    printed.and_then(|p| p.entry(position)),
                    reference.0[idx],
                ),
            });
        }
    }
    for row in 0..size {
        let position = Position::Rhs { row };
        entries.push(EntryDiff {
            step_size: size,
            position,
            replayed: replayed.1[row],
            reference: reference.1[row],
            agreement: agreement_digits(replayed.1[row], reference.1[row], digits),
            historical: historical_diff(printed.and_then(|p| p.entry(position)), reference.1[row]),
        });
    }
}

/// Output of [`replay_factor`].
#[derive(Clone, Debug, PartialEq)]
pub struct Replay {
    /// The rounded run, with snapshots.
    pub replayed: ReverseCholesky,
    /// The double-precision run it is compared with.
    pub reference: ReverseCholesky,
    pub report: DigitDiffReport,
}

pub fn replay_factor(system: &NormalSystem, digits: u32) -> Result<Replay> {
    replay_factor_against(system, digits, &[])
}

/// Like [`replay_factor`], additionally comparing printed steps (matched by
/// size) with the double-precision run.
pub fn replay_factor_against(
    system: &NormalSystem,
    digits: u32,
    history: &[HistoricalStep],
) -> Result<Replay> {
    let arith = Significant::new(digits)?;
    let n = system.n();
    let replayed = eliminate(
        n,
        system.lower(),
        system.rhs(),
        &arith,
        SnapshotPolicy::Always,
    )?;
    let reference = eliminate(
        n,
        system.lower(),
        system.rhs(),
        &Exact,
        SnapshotPolicy::Always,
    )?;
    let mut entries = Vec::new();
    for (r, f) in replayed
        .snapshots()
        .iter()
        .zip(reference.snapshots())
        .skip(1)
    {
        let printed = history.iter().find(|h| h.size == r.size);
        push_system_diffs(
            &mut entries,
            r.size,
            (&r.lower, &r.rhs),
            (&f.lower, &f.rhs),
            printed,
            digits,
        );
    }
    Ok(Replay {
        replayed,
        reference,
        report: DigitDiffReport { digits, entries },
    })
}

fn one_step<A: Arithmetic>(step: &HistoricalStep, arith: &A) -> Result<(Vec<f64>, Vec<f64>)> {
    let k = step.size - 1;
    let mut w: Vec<f64> = step.lower.iter().map(|p| p.value).collect();
    let mut z: Vec<f64> = step.rhs.iter().map(|p| p.value).collect();
    eliminate_step(&mut w, &mut z, k, arith)?;
    w.truncate(packed_len(k));
    z.truncate(k);
    Ok((w, z))
}

fn solve_from<A: Arithmetic>(step: &HistoricalStep, count: usize, arith: &A) -> Result<Vec<f64>> {
    let lower: Vec<f64> = step.lower.iter().map(|p| p.value).collect();
    let rhs: Vec<f64> = step.rhs.iter().map(|p| p.value).collect();
    let f = eliminate(step.size, &lower, &rhs, arith, SnapshotPolicy::Never)?;
    Ok(f.solve_with(count, arith)?.solved())
}

/// Recomputes each step from the printed values of the step before it.
///
/// `history` must be ordered by decreasing size, each step one variable
/// smaller than the previous. Entry `k` of the report compares the step
/// computed from `history[k-1]` at `digits` digits (replayed) and at double
/// precision (reference), with `history[k]` as the printed value. If
/// `solution` is non-empty, the leading variables are solved from the last
/// printed step and compared likewise.
pub fn replay_anchored(
    history: &[HistoricalStep],
    solution: &[PrintedValue],
    digits: u32,
) -> Result<DigitDiffReport> {
    let arith = Significant::new(digits)?;
    let mut entries = Vec::new();
    for pair in history.windows(2) {
        let (from, to) = (&pair[0], &pair[1]);
        if from.size < 2 || to.size + 1 != from.size {
            return Err(Error::InvalidArgument(
                "printed steps must shrink by one variable at a time",
            ));
        }
        let replayed = one_step(from, &arith)?;
        let reference = one_step(from, &Exact)?;
        push_system_diffs(
            &mut entries,
            to.size,
            (&replayed.0, &replayed.1),
            (&reference.0, &reference.1),
            Some(to),
            digits,
        );
    }
    if let (Some(last), false) = (history.last(), solution.is_empty()) {
        let replayed = solve_from(last, solution.len(), &arith)?;
        let reference = solve_from(last, solution.len(), &Exact)?;
        for (index, printed) in solution.iter().enumerate() {
            entries.push(EntryDiff {
                step_size: 0,
                position: Position::Solution { index },
                replayed: replayed[index],
                reference: reference[index],
                agreement: agreement_digits(replayed[index], reference[index], digits),
                historical: historical_diff(Some(printed), reference[index]),
            });
        }
    }
    Ok(DigitDiffReport { digits, entries })
}
