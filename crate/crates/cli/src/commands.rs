use std::fmt::Write as _;
use std::fs;

use laplace_core::bouvard::{self, Check, HistoricalDataset, Section, Tolerance, VARIABLES};
use laplace_core::cholesky::factor_with;
use laplace_core::inference::{
    prob_outside, prob_within, variance_for_variable_with, ConfidenceQuery, NoiseEstimator,
};
use laplace_core::precision::{
    replay_anchored, replay_factor_against, DigitDiffReport, EntryDiff, Position,
};
use laplace_core::{gram, residual, NormalSystem, SnapshotPolicy};
use serde::Serialize;

use crate::args::{Cli, Command, InputArgs};
use crate::error::CliError;
use crate::format::{self, InputFile, Regression, SystemJson};
use crate::render::{sig, step_name, system_block, thousands};

/// What a command prints and the process exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub code: i32,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Self { stdout, code: 0 }
    }
}

struct Loaded {
    system: NormalSystem,
    labels: Vec<String>,
    dataset: Option<HistoricalDataset>,
}

fn file_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

fn load(input: &InputArgs) -> Result<Loaded, CliError> {
    if let Some(name) = &input.dataset {
        let d = bouvard::load_dataset(name)?;
        return Ok(Loaded {
            system: d.system.clone(),
            labels: VARIABLES.iter().map(|v| v.to_string()).collect(),
            dataset: Some(d),
        });
    }
    let path = input
        .path
        .as_ref()
        .ok_or_else(|| CliError::Usage("an input file or --dataset is required".into()))?;
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    let system = match format::parse_input(&text)? {
        InputFile::Normal(s) => s,
        InputFile::Regression(r) => regression_system(&r)?,
    };
    Ok(Loaded {
        labels: file_labels(system.n()),
        system,
        dataset: None,
    })
}

/// Normal equations of a regression file, with `s` the row count and `rss`
/// the residual of the least-squares solution.
pub fn regression_system(reg: &Regression) -> Result<NormalSystem, CliError> {
    let obs = reg
        .observations
        .as_ref()
        .ok_or_else(|| CliError::Usage("regression file has no `obs` line".into()))?;
    let system = gram(&reg.matrix, obs)?;
    let x = factor_with(&system, SnapshotPolicy::Never)?
        .solve(system.n())?
        .solved();
    let (_, rss) = residual(&reg.matrix, &x, obs)?;
    Ok(system.with_rss(rss)?)
}

fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn lower_rows(n: usize, get: impl Fn(usize, usize) -> f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..=i).map(|j| get(i, j)).collect())
        .collect()
}

pub fn run(cli: Cli) -> Result<Output, CliError> {
    match cli.command {
        Command::Factor {
            input,
            snapshots,
            json,
        } => cmd_factor(&load(&input)?, snapshots, json),
        Command::Solve { input, vars, json } => cmd_solve(&load(&input)?, vars, json),
        Command::Variance {
            input,
            var,
            all: _,
            unbiased,
            json,
        } => {
            let estimator = if unbiased {
                NoiseEstimator::Unbiased
            } else {
                NoiseEstimator::PerObservation
            };
            cmd_variance(&load(&input)?, var, estimator, json)
        }
        Command::Confidence {
            log10_poids,
            poids,
            half_width,
            json,
        } => cmd_confidence(log10_poids, poids, half_width, json),
        Command::Replicate {
            dataset,
            json,
            export_system,
        } => {
            let d = bouvard::load_dataset(&dataset)?;
            if let Some(path) = export_system {
                fs::write(&path, format::write_normal_system(&d.system))
                    .map_err(|source| CliError::Io { path, source })?;
            }
            cmd_replicate(&d, json)
        }
        Command::PrecisionReplay {
            input,
            digits,
            anchored,
            json,
        } => cmd_precision_replay(&load(&input)?, digits, anchored, json),
    }
}

#[derive(Serialize)]
struct SnapshotJson {
    step: String,
    size: usize,
    lower: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

#[derive(Serialize)]
struct FactorJson {
    command: &'static str,
    labels: Vec<String>,
    input: SystemJson,
    m_diagonal: Vec<f64>,
    m: Vec<Vec<f64>>,
    l: Vec<Vec<f64>>,
    reduced_rhs: Vec<f64>,
    snapshots: Vec<SnapshotJson>,
}

fn cmd_factor(input: &Loaded, snapshots: bool, json: bool) -> Result<Output, CliError> {
    let system = &input.system;
    let n = system.n();
    let policy = if snapshots {
        SnapshotPolicy::Always
    } else {
        SnapshotPolicy::Never
    };
    let f = factor_with(system, policy)?;
    let l = f.extract_l();
    if json {
        let doc = FactorJson {
            command: "factor",
            labels: input.labels.clone(),
            input: SystemJson::from_system(system),
            m_diagonal: f.diagonal(),
            m: lower_rows(n, |i, j| f.m(i, j)),
            l: lower_rows(n, |i, j| l.get(i, j)),
            reduced_rhs: f.reduced_rhs().to_vec(),
            snapshots: f
                .snapshots()
                .iter()
                .map(|s| SnapshotJson {
                    step: step_name(n, s.size),
                    size: s.size,
                    lower: lower_rows(s.size, |i, j| s.get(i, j)),
                    rhs: s.rhs.clone(),
                })
                .collect(),
        };
        return Ok(Output::ok(to_json(&doc)));
    }
    let mut out = String::new();
    if snapshots {
        for s in f.snapshots() {
            system_block(
                &mut out,
                &step_name(n, s.size),
                &input.labels,
                |i, j| s.get(i, j),
                s.size,
                Some(&s.rhs),
            );
            out.push('\n');
        }
    }
    let width = input
        .labels
        .iter()
        .map(|l| l.chars().count())
        .max()
        .unwrap_or(1);
    writeln!(out, "M diagonal").unwrap();
    for (label, d) in input.labels.iter().zip(f.diagonal()) {
        writeln!(out, "  {label:<width$}  {}", sig(d, 10)).unwrap();
    }
    out.push('\n');
    system_block(
        &mut out,
        "M and reduced rhs",
        &input.labels,
        |i, j| f.m(i, j),
        n,
        Some(f.reduced_rhs()),
    );
    out.push('\n');
    system_block(&mut out, "L", &input.labels, |i, j| l.get(i, j), n, None);
    Ok(Output::ok(out))
}

#[derive(Serialize)]
struct SolvedJson {
    variable: usize,
    label: String,
    value: f64,
}

#[derive(Serialize)]
struct SolveJson {
    command: &'static str,
    vars: usize,
    values: Vec<SolvedJson>,
}

fn cmd_solve(input: &Loaded, vars: usize, json: bool) -> Result<Output, CliError> {
    let n = input.system.n();
    if vars == 0 || vars > n {
        return Err(CliError::Usage(format!("--vars must be between 1 and {n}")));
    }
    let x = factor_with(&input.system, SnapshotPolicy::Never)?
        .solve(vars)?
        .solved();
    let values: Vec<SolvedJson> = x
        .iter()
        .enumerate()
        .map(|(i, &value)| SolvedJson {
            variable: i + 1,
            label: input.labels[i].clone(),
            value,
        })
        .collect();
    if json {
        return Ok(Output::ok(to_json(&SolveJson {
            command: "solve",
            vars,
            values,
        })));
    }
    let width = input
        .labels
        .iter()
        .map(|l| l.chars().count())
        .max()
        .unwrap_or(1);
    let mut out = String::new();
    for v in &values {
        writeln!(out, "{:<width$} = {}", v.label, sig(v.value, 12)).unwrap();
    }
    Ok(Output::ok(out))
}

#[derive(Serialize)]
struct PoidsJson {
    variable: usize,
    label: String,
    poids: f64,
    log10_poids: f64,
    sigma: f64,
}

#[derive(Serialize)]
struct VarianceJson {
    command: &'static str,
    estimator: &'static str,
    observations: usize,
    rss: Option<f64>,
    sigma_b2: f64,
    variables: Vec<PoidsJson>,
}

fn cmd_variance(
    input: &Loaded,
    var: Option<usize>,
    estimator: NoiseEstimator,
    json: bool,
) -> Result<Output, CliError> {
    let n = input.system.n();
    let which: Vec<usize> = match var {
        Some(v) if v == 0 || v > n => {
            return Err(CliError::Usage(format!("--var must be between 1 and {n}")))
        }
        Some(v) => vec![v - 1],
        None => (0..n).collect(),
    };
    let mut sigma_b2 = f64::NAN;
    let mut variables = Vec::new();
    for j in which {
        let r = variance_for_variable_with(&input.system, j, estimator)?;
        sigma_b2 = r.sigma_b2_estimate;
        variables.push(PoidsJson {
            variable: j + 1,
            label: input.labels[j].clone(),
            poids: r.poids,
            log10_poids: r.log10_poids,
            sigma: r.sigma,
        });
    }
    if json {
        return Ok(Output::ok(to_json(&VarianceJson {
            command: "variance",
            estimator: match estimator {
                NoiseEstimator::PerObservation => "per-observation",
                NoiseEstimator::Unbiased => "unbiased",
            },
            observations: input.system.observations(),
            rss: input.system.rss(),
            sigma_b2,
            variables,
        })));
    }
    let width = input
        .labels
        .iter()
        .map(|l| l.chars().count())
        .max()
        .unwrap_or(1)
        .max(3);
    let mut out = String::new();
    writeln!(out, "noise variance estimate {}", sig(sigma_b2, 10)).unwrap();
    writeln!(
        out,
        "{:<width$}  {:>18}  {:>12}  {:>14}",
        "var", "P", "log10 P", "sigma"
    )
    .unwrap();
    for v in &variables {
        writeln!(
            out,
            "{:<width$}  {:>18}  {:>12.7}  {:>14}",
            v.label,
            sig(v.poids, 10),
            v.log10_poids,
            sig(v.sigma, 8)
        )
        .unwrap();
    }
    Ok(Output::ok(out))
}

#[derive(Serialize)]
struct ConfidenceJson {
    command: &'static str,
    poids: f64,
    log10_poids: f64,
    half_width: f64,
    probability: f64,
    complement: f64,
    /// `1 / complement`; null when the complement underflows.
    one_in: Option<f64>,
}

fn cmd_confidence(
    log10_poids: Option<f64>,
    poids: Option<f64>,
    half_width: f64,
    json: bool,
) -> Result<Output, CliError> {
    let q = match (log10_poids, poids) {
        (Some(lp), None) => ConfidenceQuery::from_log10_poids(lp, half_width)?,
        (None, Some(p)) => ConfidenceQuery::new(p, half_width)?,
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --log10-poids and --poids".into(),
            ))
        }
    };
    let probability = prob_within(&q);
    let complement = prob_outside(&q);
    let one_in = (complement > 0.0).then(|| 1.0 / complement);
    if json {
        return Ok(Output::ok(to_json(&ConfidenceJson {
            command: "confidence",
            poids: q.poids,
            log10_poids: q.poids.log10(),
            half_width: q.half_width,
            probability,
            complement,
            one_in,
        })));
    }
    let mut out = String::new();
    writeln!(out, "poids        {}", sig(q.poids, 10)).unwrap();
    writeln!(out, "half width   {}", sig(q.half_width, 10)).unwrap();
    writeln!(out, "probability  {}", sig(probability, 12)).unwrap();
    writeln!(out, "complement   {}", sig(complement, 6)).unwrap();
    match one_in {
        Some(d) if d < 1e15 => writeln!(out, "odds against 1 in ~{}", thousands(d)).unwrap(),
        Some(d) => writeln!(out, "odds against 1 in ~{}", sig(d, 4)).unwrap(),
        None => writeln!(out, "odds against below double precision").unwrap(),
    }
    Ok(Output::ok(out))
}

#[derive(Serialize)]
struct ToleranceJson {
    kind: &'static str,
    value: Option<f64>,
}

#[derive(Serialize)]
struct CheckJson {
    section: &'static str,
    name: String,
    computed: f64,
    expected: f64,
    tolerance: ToleranceJson,
    source: &'static str,
    gating: bool,
    passed: bool,
}

#[derive(Serialize)]
struct ReplicateJson {
    command: &'static str,
    dataset: String,
    passed: bool,
    gating_failures: usize,
    checks: Vec<CheckJson>,
}

fn tolerance_json(t: Tolerance) -> ToleranceJson {
    match t {
        Tolerance::Absolute(v) => ToleranceJson {
            kind: "absolute",
            value: Some(v),
        },
        Tolerance::Relative(v) => ToleranceJson {
            kind: "relative",
            value: Some(v),
        },
        Tolerance::AtLeast => ToleranceJson {
            kind: "at-least",
            value: None,
        },
    }
}

fn tolerance_text(t: Tolerance) -> String {
    match t {
        Tolerance::Absolute(v) => format!("±{}", sig(v, 3)),
        Tolerance::Relative(v) => format!("±{}%", sig(v * 100.0, 3)),
        Tolerance::AtLeast => "≥".into(),
    }
}

fn check_line(c: &Check) -> String {
    let status = match (c.passed, c.gating) {
        (true, _) => "pass",
        (false, true) => "FAIL",
        (false, false) => "differs",
    };
    format!(
        "  {:<40} {:>18} {:>18} {:>10}  {:<11} {}",
        c.name,
        sig(c.computed, 10),
        sig(c.expected, 10),
        tolerance_text(c.tolerance),
        c.source.as_str(),
        status
    )
}

fn cmd_replicate(d: &HistoricalDataset, json: bool) -> Result<Output, CliError> {
    let report = bouvard::replicate(d)?;
    let failures = report.failures().count();
    let code = if report.passed() { 0 } else { 1 };
    if json {
        let doc = ReplicateJson {
            command: "replicate",
            dataset: report.dataset.clone(),
            passed: report.passed(),
            gating_failures: failures,
            checks: report
                .checks
                .iter()
                .map(|c| CheckJson {
                    section: c.section.as_str(),
                    name: c.name.clone(),
                    computed: c.computed,
                    expected: c.expected,
                    tolerance: tolerance_json(c.tolerance),
                    source: c.source.as_str(),
                    gating: c.gating,
                    passed: c.passed,
                })
                .collect(),
        };
        return Ok(Output {
            stdout: to_json(&doc),
            code,
        });
    }
    let mut out = String::new();
    writeln!(out, "dataset {}", report.dataset).unwrap();
    let mut section: Option<Section> = None;
    for c in &report.checks {
        if section != Some(c.section) {
            section = Some(c.section);
            let note = if c.gating { "" } else { " (informative)" };
            writeln!(out, "\n{}{note}", c.section.as_str()).unwrap();
            writeln!(
                out,
                "  {:<40} {:>18} {:>18} {:>10}  {:<11} status",
                "check", "computed", "expected", "tolerance", "source"
            )
            .unwrap();
            if c.section == Section::Solution {
                writeln!(out, "  (historical labels: z0 = z', z1 = z)").unwrap();
            }
        }
        writeln!(out, "{}", check_line(c)).unwrap();
    }
    writeln!(out).unwrap();
    if failures == 0 {
        writeln!(
            out,
            "all {} gating checks passed",
            report.checks.iter().filter(|c| c.gating).count()
        )
        .unwrap();
    } else {
        writeln!(out, "{failures} gating check(s) failed").unwrap();
    }
    Ok(Output { stdout: out, code })
}

#[derive(Serialize)]
struct PrintedJson {
    value: f64,
    unit: f64,
    agreement: u32,
    flagged: bool,
}

#[derive(Serialize)]
struct EntryJson {
    step: String,
    size: usize,
    kind: &'static str,
    row: Option<usize>,
    col: Option<usize>,
    replayed: f64,
    reference: f64,
    agreement: u32,
    replay_flagged: bool,
    printed: Option<PrintedJson>,
}

#[derive(Serialize)]
struct ReplayJson {
    command: &'static str,
    mode: &'static str,
    digits: u32,
    total_disagreeing_digits: u32,
    min_agreement: Option<u32>,
    replay_flagged: usize,
    historical_flagged: usize,
    entries: Vec<EntryJson>,
}

fn entry_place(n: usize, e: &EntryDiff) -> (String, &'static str, Option<usize>, Option<usize>) {
    let step = if e.step_size == 0 {
        "Solution".to_string()
    } else {
        step_name(n, e.step_size)
    };
    match e.position {
        Position::Matrix { row, col } => (step, "matrix", Some(row + 1), Some(col + 1)),
        Position::Rhs { row } => (step, "rhs", Some(row + 1), None),
        Position::Solution { index } => (step, "solution", Some(index + 1), None),
    }
}

fn cmd_precision_replay(
    input: &Loaded,
    digits: u32,
    anchored: bool,
    json: bool,
) -> Result<Output, CliError> {
    let n = input.system.n();
    let history = input
        .dataset
        .as_ref()
        .map(|d| d.laplace_steps.as_slice())
        .unwrap_or(&[]);
    let report: DigitDiffReport = if anchored {
        let d = input
            .dataset
            .as_ref()
            .ok_or_else(|| CliError::Usage("--anchored needs --dataset".into()))?;
        replay_anchored(&d.laplace_steps, &d.laplace_solution, digits)?
    } else {
        replay_factor_against(&input.system, digits, history)?.report
    };
    let mode = if anchored { "anchored" } else { "chained" };
    let entries: Vec<EntryJson> = report
        .entries
        .iter()
        .map(|e| {
            let (step, kind, row, col) = entry_place(n, e);
            EntryJson {
                step,
                size: e.step_size,
                kind,
                row,
                col,
                replayed: e.replayed,
                reference: e.reference,
                agreement: e.agreement,
                replay_flagged: e.replay_flagged(digits),
                printed: e.historical.map(|h| PrintedJson {
                    value: h.printed.value,
                    unit: h.printed.unit,
                    agreement: h.agreement,
                    flagged: h.flagged,
                }),
            }
        })
        .collect();
    let replay_flagged = report.replay_flagged().count();
    let historical_flagged = report.historical_flagged().count();
    if json {
        return Ok(Output::ok(to_json(&ReplayJson {
            command: "precision-replay",
            mode,
            digits,
            total_disagreeing_digits: report.total_disagreeing_digits(),
            min_agreement: report.min_agreement(),
            replay_flagged,
            historical_flagged,
            entries,
        })));
    }
    let mut out = String::new();
    writeln!(
        out,
        "{mode} replay at {digits} significant digits against double precision"
    )
    .unwrap();
    writeln!(
        out,
        "{:<9} {:<9} {:>20} {:>20} {:>6} {:>14}  flags",
        "step", "entry", "replayed", "reference", "agree", "printed"
    )
    .unwrap();
    for e in &entries {
        let place = match (e.kind, e.row, e.col) {
            ("matrix", Some(r), Some(c)) => format!("m({r},{c})"),
            ("rhs", Some(r), _) => format!("rhs({r})"),
            (_, Some(r), _) => input.labels.get(r - 1).cloned().unwrap_or_default(),
            _ => String::new(),
        };
        let printed = e
            .printed
            .as_ref()
            .map(|p| sig(p.value, 12))
            .unwrap_or_default();
        let mut flags = String::new();
        if e.replay_flagged {
            flags.push_str("lost-digits ");
        }
        if e.printed.as_ref().is_some_and(|p| p.flagged) {
            flags.push_str("printed-differs");
        }
        writeln!(
            out,
            "{:<9} {:<9} {:>20} {:>20} {:>6} {:>14}  {}",
            e.step,
            place,
            sig(e.replayed, 15),
            sig(e.reference, 15),
            e.agreement,
            printed,
            flags.trim_end()
        )
        .unwrap();
    }
    writeln!(out).unwrap();
    writeln!(
        out,
        "total disagreeing digits {}",
        report.total_disagreeing_digits()
    )
    .unwrap();
    if let Some(m) = report.min_agreement() {
        writeln!(out, "minimum agreement {m}").unwrap();
    }
    writeln!(out, "entries that lost digits {replay_flagged}").unwrap();
    if !history.is_empty() || anchored {
        writeln!(out, "printed entries that differ {historical_flagged}").unwrap();
    }
    Ok(Output::ok(out))
}
