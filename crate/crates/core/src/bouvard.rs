//! Bouvard's normal equations for the motion of Saturn (129 observations,
//! six unknowns) and the replication of Laplace's reduction of them.
//!
//! Variables, in stored order: `z` (mass of Uranus is `(1+z)/19504`), `z'`
//! (mass of Jupiter is `(1+z')/1067.09`), `z''`, `z'''`, `z⁗`, `zᵛ`.
//! Elimination removes `zᵛ` first, so the two leading variables left at the
//! end are `z` and `z'`.
//!
//! Two printed lines exist for every intermediate system: Laplace's own
//! values, and a recomputation in double precision in which each step was
//! started from Laplace's printed previous step. Both are transcribed here
//! verbatim with two corrections: the coefficient of `z''` in the second
//! equation of the four-variable system is `-151992.0`, and the right-hand
//! side of its fourth equation is negative.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::cholesky::{factor, ReverseCholesky};
use crate::eigen::condition_numbers;
use crate::inference::{
    covariance_block2, mass_from_correction, poids_first, prob_outside, sigma_from_poids,
    variance_for_variable, ConfidenceQuery,
};
use crate::matrix::{invert_spd, NormalSystem};
use crate::precision::{replay_anchored, HistoricalStep, Position, PrintedValue};
use crate::{Error, Result};

pub const SATURN_MOTION: &str = "saturn-motion";

/// Names of the six unknowns.
pub const VARIABLES: [&str; 6] = ["z", "z'", "z''", "z'''", "z''''", "z^v"];

struct StepLiteral {
    label: &'static str,
    lower: &'static [&'static str],
    rhs: &'static [&'static str],
}

// `_` separates placeholder zeros from significant digits.
const STEP_A: StepLiteral = StepLiteral {
    label: "A",
    lower: &[
        "795938",
        "-12729398",
        "424865729",
        "6788.2",
        "-153106.5",
        "71.8720",
        "-1959.0",
        "-39749.1",
        "-3.2252",
        "57.1911",
        "696.13",
        "-5459",
        "1.2484",
        "3.6213",
        "21.543",
        "2602",
        "5722",
        "1.3371",
        "1.1128",
        "46.310",
        "129",
    ],
    rhs: &[
        "7212.600",
        "-738297.800",
        "237.782",
        "-40.335",
        "-343.455",
        "-1002.900",
    ],
};

const LAPLACE_STEPS: [StepLiteral; 4] = [
    StepLiteral {
        label: "B",
        lower: &[
            "743454",
            "-12844814",
            "424611920",
            "6761.23",
            "-153165.81",
            "71.8581",
            "-1981.45",
            "-39798.46",
            "-3.2367",
            "57.1815",
            "-237.97",
            "-7513.15",
            "0.7684",
            "3.2218",
            "4.918",
        ],
        rhs: &["27441.68", "-693812.58", "248.1772", "-31.6836", "16.5783"],
    },
    StepLiteral {
        label: "C",
        lower: &[
            "731939.5",
            "-13208350",
            "413134432",
            "6798.41",
            "-151992.0",
            "71.7381",
            "-1825.56",
            "-34876.7",
            "-3.7401",
            "55.0710",
        ],
        rhs: &["28243.85", "-668486.70", "245.5870", "-42.5434"],
    },
    StepLiteral {
        label: "D",
        lower: &[
            "671414.7",
            "-14364541",
            "391046861",
            "6674.43",
            "-154360.6",
            "71.4841",
        ],
        rhs: &["26833.55", "-695430.0", "242.6977"],
    },
    StepLiteral {
        label: "E",
        lower: &["48442", "48020", "57725227"],
        rhs: &["4172.95", "-171455.2"],
    },
];

const RECOMPUTED_STEPS: [StepLiteral; 4] = [
    StepLiteral {
        label: "B",
        lower: &[
            "743454",
            "-12844814",
            "424611920",
            "6761.23",
            "-153165.81",
            "71.8581",
            "-1981.45",
            "-39798.46",
            "-3.2367",
            "57.1815",
            "-237.97",
            "-7513.15",
            "0.7684",
            "3.2218",
            "4.918",
        ],
        rhs: &["27441.64", "-693812.58", "248.1772", "-31.6836", "16.5783"],
    },
    StepLiteral {
        label: "C",
        lower: &[
            "731939.2",
            "-1320836_0",
            "413134201",
            "6798.41",
            "-151991.9",
            "71.7380",
            "-1825.55",
            "-34876.6",
            "-3.7401",
            "55.0709",
        ],
        rhs: &["28243.86", "-668486.18", "245.5870", "-42.5441"],
    },
    StepLiteral {
        label: "D",
        lower: &[
            "671423.6",
            "-14364485",
            "391046869",
            "6674.43",
            "-154360.6",
            "71.4841",
        ],
        rhs: &["26833.57", "-695429.6", "242.6977"],
    },
    StepLiteral {
        label: "E",
        lower: &["48227", "48021", "57725258"],
        rhs: &["4173.00", "-171355.9"],
    },
];

/// `(z, z')` as printed by Laplace and in the recomputation.
const LAPLACE_SOLUTION: [&str; 2] = ["0.08916", "-0.00305"];
const RECOMPUTED_SOLUTION: [&str; 2] = ["0.08916", "-0.00304"];

const OBSERVATIONS: usize = 129;
const RSS: f64 = 31096.0;

/// Scalar constants quoted alongside the computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constants {
    pub uranus_base: f64,
    pub jupiter_base: f64,
    pub saturn_base: f64,
    pub laplace_z: f64,
    pub laplace_z_prime: f64,
    pub laplace_log10_poids_z: f64,
    pub laplace_log10_poids_z_prime: f64,
    /// Mass of Jupiter, "one part in": `1070.35`.
    pub laplace_jupiter_denominator: f64,
    pub laplace_uranus_denominator: f64,
    /// Results of the Jupiter-motion computation (126 equations); only
    /// these scalars were published.
    pub jupiter_motion_observations: usize,
    pub jupiter_motion_z: f64,
    pub jupiter_motion_log10_poids: f64,
    pub laplace_saturn_denominator: f64,
    /// Confidence fractions `1 - p = 1/D` with their half widths, as
    /// `(log10 poids, half width, D)`.
    pub confidence: [(f64, f64, f64); 4],
    pub mass_bounds: [PlanetComparison; 3],
}

/// Computed mass denominator, Laplace's bounds and the modern value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanetComparison {
    pub planet: &'static str,
    pub lower_bound: f64,
    pub computed: f64,
    pub upper_bound: f64,
    pub modern: f64,
}

impl PlanetComparison {
    pub fn modern_within_bounds(&self) -> bool {
        (self.lower_bound..=self.upper_bound).contains(&self.modern)
    }
}

pub const CONSTANTS: Constants = Constants {
    uranus_base: 19504.0,
    jupiter_base: 1067.09,
    saturn_base: 3534.08,
    laplace_z: 0.08916,
    laplace_z_prime: -0.00305,
    laplace_log10_poids_z: 2.0013595,
    laplace_log10_poids_z_prime: 5.0778624,
    laplace_jupiter_denominator: 1070.35,
    laplace_uranus_denominator: 17907.0,
    jupiter_motion_observations: 126,
    jupiter_motion_z: 0.00620,
    jupiter_motion_log10_poids: 4.8856829,
    laplace_saturn_denominator: 3512.3,
    confidence: [
        (5.0778624, 0.01, 1_000_001.0),
        (2.0013595, 0.25, 2509.0),
        (2.0013595, 0.20, 216.6),
        (4.8856829, 0.01, 11328.0),
    ],
    mass_bounds: [
        PlanetComparison {
            planet: "Jupiter",
            lower_bound: 1059.0,
            computed: 1070.0,
            upper_bound: 1081.0,
            modern: 1048.0,
        },
        PlanetComparison {
            planet: "Uranus",
            lower_bound: 14564.0,
            computed: 17918.0,
            upper_bound: 23241.0,
            modern: 22992.0,
        },
        PlanetComparison {
            planet: "Saturn",
            lower_bound: 3477.0,
            computed: 3512.0,
            upper_bound: 3547.0,
            modern: 3497.0,
        },
    ],
};

#[derive(Clone, Debug, PartialEq)]
pub struct HistoricalDataset {
    pub name: String,
    /// Step A, with `s = 129` and `rss = 31096`.
    pub system: NormalSystem,
    /// Steps A to E as Laplace printed them.
    pub laplace_steps: Vec<HistoricalStep>,
    /// Steps B to E recomputed in double precision, each from Laplace's
    /// printed previous step.
    pub recomputed_steps: Vec<HistoricalStep>,
    /// `(z, z')`.
    pub laplace_solution: [PrintedValue; 2],
    pub recomputed_solution: [PrintedValue; 2],
    pub constants: Constants,
}

fn parse_literal(text: &str) -> Result<PrintedValue> {
    match text.split_once('_') {
        Some((head, zeros)) => {
            let joined = format!("{head}{zeros}");
            Ok(PrintedValue::parse(&joined)?.with_placeholder_zeros(zeros.len() as u32))
        }
        None => PrintedValue::parse(text),
    }
}

fn parse_step(lit: &StepLiteral) -> Result<HistoricalStep> {
    let lower = lit
        .lower
        .iter()
        .map(|t| parse_literal(t))
        .collect::<Result<Vec<_>>>()?;
    let rhs = lit
        .rhs
        .iter()
        .map(|t| parse_literal(t))
        .collect::<Result<Vec<_>>>()?;
    HistoricalStep::new(lit.label, lit.rhs.len(), lower, rhs)
}

fn all_literals() -> impl Iterator<Item = &'static str> {
    core::iter::once(&STEP_A)
        .chain(LAPLACE_STEPS.iter())
        .chain(RECOMPUTED_STEPS.iter())
        .flat_map(|s| s.lower.iter().chain(s.rhs.iter()).copied())
        .chain(LAPLACE_SOLUTION.iter().copied())
        .chain(RECOMPUTED_SOLUTION.iter().copied())
}

/// FNV-1a over every transcribed literal and the scalar constants, in a
/// fixed order.
pub fn dataset_checksum() -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |text: &str| {
        for b in text.bytes().chain(core::iter::once(b';')) {
            hash ^= u64::from(b);
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    all_literals().for_each(&mut feed);
    let c = &CONSTANTS;
    let mut scalars = alloc::vec![
        OBSERVATIONS as f64,
        RSS,
        c.uranus_base,
        c.jupiter_base,
        c.saturn_base,
        c.laplace_z,
        c.laplace_z_prime,
        c.laplace_log10_poids_z,
        c.laplace_log10_poids_z_prime,
        c.laplace_jupiter_denominator,
        c.laplace_uranus_denominator,
        c.jupiter_motion_observations as f64,
        c.jupiter_motion_z,
        c.jupiter_motion_log10_poids,
        c.laplace_saturn_denominator,
    ];
    scalars.extend(c.confidence.iter().flat_map(|&(a, b, d)| [a, b, d]));
    scalars.extend(
        c.mass_bounds
            .iter()
            .flat_map(|p| [p.lower_bound, p.computed, p.upper_bound, p.modern]),
    );
    for x in scalars {
        feed(&format!("{x:?}"));
    }
    hash
}

pub fn load_dataset(name: &str) -> Result<HistoricalDataset> {
    if name != SATURN_MOTION {
        return Err(Error::UnknownDataset(name.to_string()));
    }
    let step_a = parse_step(&STEP_A)?;
    let system = step_a
        .to_system()?
        .with_observations(OBSERVATIONS)
        .with_rss(RSS)?;
    let mut laplace_steps = alloc::vec![step_a];
    for lit in &LAPLACE_STEPS {
        laplace_steps.push(parse_step(lit)?);
    }
    let recomputed_steps = RECOMPUTED_STEPS
        .iter()
        .map(parse_step)
        .collect::<Result<Vec<_>>>()?;
    let pair = |lits: [&str; 2]| -> Result<[PrintedValue; 2]> {
        Ok([parse_literal(lits[0])?, parse_literal(lits[1])?])
    };
    Ok(HistoricalDataset {
        name: name.to_string(),
        system,
        laplace_steps,
        recomputed_steps,
        laplace_solution: pair(LAPLACE_SOLUTION)?,
        recomputed_solution: pair(RECOMPUTED_SOLUTION)?,
        constants: CONSTANTS,
    })
}

/// `(κ₂(AᵀA), κ₂(S AᵀA S))` with `S` the inverse square root of the diagonal.
pub fn condition_diagnostics(d: &HistoricalDataset) -> Result<(f64, f64)> {
    condition_numbers(&d.system)
}

/// Positions (in the recomputed steps, keyed by step size) where Laplace's
/// printed digits differ from the double-precision recomputation.
pub fn red_digit_entries(d: &HistoricalDataset) -> Vec<(usize, Position)> {
    let mut out = Vec::new();
    for rec in &d.recomputed_steps {
        let Some(lap) = d.laplace_steps.iter().find(|s| s.size == rec.size) else {
            continue;
        };
        for row in 0..rec.size {
            for col in 0..=row {
                let p = Position::Matrix { row, col };
                if lap.entry(p) != rec.entry(p) {
                    out.push((rec.size, p));
                }
            }
            let p = Position::Rhs { row };
            if lap.entry(p) != rec.entry(p) {
                out.push((rec.size, p));
            }
        }
    }
    for index in 0..2 {
        if d.laplace_solution[index] != d.recomputed_solution[index] {
            out.push((0, Position::Solution { index }));
        }
    }
    out
}

/// What a check compares against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    /// The double-precision recomputation printed next to Laplace's values.
    Recomputed,
    /// A value printed by Laplace.
    Laplace,
    /// Our own independent route (direct inversion, eigenvalues).
    CrossCheck,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Recomputed => "recomputed",
            Source::Laplace => "laplace",
            Source::CrossCheck => "cross-check",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tolerance {
    Absolute(f64),
    Relative(f64),
    AtLeast,
}

impl Tolerance {
    pub fn accepts(self, computed: f64, expected: f64) -> bool {
        match self {
            Tolerance::Absolute(t) => (computed - expected).abs() <= t * (1.0 + 1e-12),
            Tolerance::Relative(t) => (computed - expected).abs() <= t * expected.abs(),
            Tolerance::AtLeast => computed >= expected,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Section {
    /// Factorization chained from Step A, compared with the recomputed lines.
    ChainedSteps,
    /// Each step recomputed from Laplace's printed previous step.
    AnchoredSteps,
    /// Laplace's printed lines against our chained factorization.
    LaplaceLines,
    Solution,
    Poids,
    StandardDeviation,
    Confidence,
    Mass,
    Conditioning,
    ModernValues,
}

impl Section {
    pub fn as_str(self) -> &'static str {
        match self {
            Section::ChainedSteps => "chained-steps",
            Section::AnchoredSteps => "anchored-steps",
            Section::LaplaceLines => "laplace-lines",
            Section::Solution => "solution",
            Section::Poids => "poids",
            Section::StandardDeviation => "standard-deviation",
            Section::Confidence => "confidence",
            Section::Mass => "mass",
            Section::Conditioning => "conditioning",
            Section::ModernValues => "modern-values",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub section: Section,
    pub name: String,
    pub computed: f64,
    pub expected: f64,
    pub tolerance: Tolerance,
    pub source: Source,
    /// Whether the check decides the overall outcome.
    pub gating: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReplicationReport {
    pub dataset: String,
    pub checks: Vec<Check>,
}

impl ReplicationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| c.gating).all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.gating && !c.passed)
    }

    pub fn find(&self, section: Section, name: &str) -> Option<&Check> {
        self.checks
            .iter()
            .find(|c| c.section == section && c.name == name)
    }

    fn push(
        &mut self,
        section: Section,
        name: String,
        computed: f64,
        expected: f64,
        tolerance: Tolerance,
        source: Source,
        gating: bool,
    ) {
        let passed = computed.is_finite() && tolerance.accepts(computed, expected);
        self.checks.push(Check {
            section,
            name,
            computed,
            expected,
            tolerance,
            source,
            gating,
            passed,
        });
    }
}

/// Step label for a system of `size` variables out of six.
pub fn step_label(size: usize) -> char {
    match size {
        0 => 'F',
        s if s <= 6 => (b'A' + (6 - s) as u8) as char,
        _ => '?',
    }
}

fn position_name(size: usize, p: Position) -> String {
    let step = step_label(size);
    match p {
        Position::Matrix { row, col } => format!("step {step} m({},{})", row + 1, col + 1),
        Position::Rhs { row } => format!("step {step} rhs({})", row + 1),
        Position::Solution { index } => VARIABLES[index].to_string(),
    }
}

fn compare_steps(
    report: &mut ReplicationReport,
    section: Section,
    f: &ReverseCholesky,
    printed: &[HistoricalStep],
    source: Source,
    gating: bool,
) {
    for step in printed {
        let Some(snap) = f.snapshot(step.size) else {
            continue;
        };
        for row in 0..step.size {
            for col in 0..=row {
                let p = step.entry(Position::Matrix { row, col }).expect("in range");
                report.push(
                    section,
                    position_name(step.size, Position::Matrix { row, col }),
                    snap.get(row, col),
                    p.value,
                    Tolerance::Absolute(p.unit),
                    source,
                    gating,
                );
            }
        }
        for row in 0..step.size {
            let p = &step.rhs[row];
            report.push(
                section,
                position_name(step.size, Position::Rhs { row }),
                snap.rhs[row],
                p.value,
                Tolerance::Absolute(p.unit),
                source,
                gating,
            );
        }
    }
}

/// Runs the whole computation on the dataset and compares every quantity
/// with the printed values.
///
/// Gating checks: the chained factorization and solution against the
/// recomputed lines at one unit of the last printed digit, the anchored
/// recomputation against the same lines, the poids, standard deviations,
/// confidence fractions, masses and conditioning. Laplace's own lines and the
/// modern masses are reported without gating.
pub fn replicate(d: &HistoricalDataset) -> Result<ReplicationReport> {
    let c = &d.constants;
    let s = d.system.observations();
    let rss = d
        .system
        .rss()
        .ok_or(Error::InvalidArgument("dataset lacks rss"))?;
    let mut report = ReplicationReport {
        dataset: d.name.clone(),
        checks: Vec::new(),
    };

    let f = factor(&d.system)?;
    compare_steps(
        &mut report,
        Section::ChainedSteps,
        &f,
        &d.recomputed_steps,
        Source::Recomputed,
        true,
    );

    let anchored = replay_anchored(
        &d.laplace_steps,
        &d.laplace_solution,
        crate::rounding::MAX_DIGITS,
    )?;
    for e in &anchored.entries {
        let printed = if e.step_size == 0 {
            let Position::Solution { index } = e.position else {
                continue;
            };
            d.recomputed_solution[index]
        } else {
            let Some(step) = d.recomputed_steps.iter().find(|s| s.size == e.step_size) else {
                continue;
            };
            *step.entry(e.position).expect("in range")
        };
        report.push(
            Section::AnchoredSteps,
            position_name(e.step_size, e.position),
            e.reference,
            printed.value,
            Tolerance::Absolute(printed.unit),
            Source::Recomputed,
            true,
        );
    }

    compare_steps(
        &mut report,
        Section::LaplaceLines,
        &f,
        &d.laplace_steps[1..],
        Source::Laplace,
        false,
    );

    // Solution of the chained system.
    let x = f.solve(2)?;
    let (z, zp) = (x.get(0)?, x.get(1)?);
    let rec = &d.recomputed_solution;
    report.push(
        Section::Solution,
        "z".into(),
        z,
        rec[0].value,
        Tolerance::Absolute(1e-5),
        Source::Recomputed,
        true,
    );
    report.push(
        Section::Solution,
        "z'".into(),
        zp,
        rec[1].value,
        Tolerance::Absolute(1e-5),
        Source::Recomputed,
        true,
    );
    let lap = &d.laplace_solution;
    report.push(
        Section::Solution,
        "z (laplace)".into(),
        z,
        lap[0].value,
        Tolerance::Absolute(lap[0].unit),
        Source::Laplace,
        false,
    );
    report.push(
        Section::Solution,
        "z' (laplace)".into(),
        zp,
        lap[1].value,
        Tolerance::Absolute(lap[1].unit),
        Source::Laplace,
        false,
    );

    // Poids from Laplace's printed two-variable system and from ours.
    let printed_e = d
        .laplace_steps
        .iter()
        .find(|st| st.size == 2)
        .ok_or(Error::InvalidArgument(
            "dataset lacks the two-variable step",
        ))?
        .to_system()?
        .with_observations(s)
        .with_rss(rss)?;
    let ours_e = {
        let snap = f
            .snapshot(2)
            .ok_or(Error::InvalidArgument("no 2x2 snapshot"))?;
        NormalSystem::new(2, snap.lower.clone(), snap.rhs.clone())?
            .with_observations(s)
            .with_rss(rss)?
    };
    for (label, sys, tol_zp) in [
        ("printed step E", &printed_e, 1e-3),
        ("computed step E", &ours_e, 2e-3),
    ] {
        let pz = variance_for_variable(sys, 0)?;
        let pzp = variance_for_variable(sys, 1)?;
        report.push(
            Section::Poids,
            format!("log10 P(z') from {label}"),
            pzp.log10_poids,
            c.laplace_log10_poids_z_prime,
            Tolerance::Absolute(tol_zp),
            Source::Laplace,
            true,
        );
        report.push(
            Section::Poids,
            format!("log10 P(z) from {label}"),
            pz.log10_poids,
            c.laplace_log10_poids_z,
            Tolerance::Absolute(1e-2),
            Source::Laplace,
            true,
        );
    }

    // Standard deviations: direct inverse and poids routes.
    let inv = invert_spd(&d.system)?;
    let sigma_b2 = rss / s as f64;
    let sigma_z_oracle = libm::sqrt(sigma_b2 * inv.get(0, 0));
    let sigma_zp_oracle = libm::sqrt(sigma_b2 * inv.get(1, 1));
    report.push(
        Section::StandardDeviation,
        "sigma(z) by inversion".into(),
        sigma_z_oracle,
        0.0707,
        Tolerance::Absolute(2e-4),
        Source::CrossCheck,
        true,
    );
    report.push(
        Section::StandardDeviation,
        "sigma(z') by inversion".into(),
        sigma_zp_oracle,
        0.0020443,
        Tolerance::Absolute(1e-6),
        Source::CrossCheck,
        true,
    );
    let sigma_z_poids = variance_for_variable(&d.system, 0)?.sigma;
    let sigma_zp_poids = variance_for_variable(&d.system, 1)?.sigma;
    report.push(
        Section::StandardDeviation,
        "sigma(z) poids vs inversion".into(),
        sigma_z_poids,
        sigma_z_oracle,
        Tolerance::Relative(1e-3),
        Source::CrossCheck,
        true,
    );
    report.push(
        Section::StandardDeviation,
        "sigma(z') poids vs inversion".into(),
        sigma_zp_poids,
        sigma_zp_oracle,
        Tolerance::Relative(1e-3),
        Source::CrossCheck,
        true,
    );
    let block = covariance_block2(&f, s, rss)?;
    report.push(
        Section::StandardDeviation,
        "sigma(z') block vs poids".into(),
        libm::sqrt(block[1][1]),
        sigma_zp_poids,
        Tolerance::Relative(1e-9),
        Source::CrossCheck,
        true,
    );
    let laplace_sigma_zp = sigma_from_poids(libm::pow(10.0, c.laplace_log10_poids_z_prime));
    report.push(
        Section::StandardDeviation,
        "sigma(z') from laplace poids".into(),
        laplace_sigma_zp,
        sigma_zp_oracle,
        Tolerance::Absolute(1e-8),
        Source::Laplace,
        false,
    );
    let first = poids_first(&f, s, rss)?;
    report.push(
        Section::StandardDeviation,
        "sigma(z) from factorization".into(),
        first.sigma,
        sigma_z_oracle,
        Tolerance::Relative(1e-9),
        Source::CrossCheck,
        true,
    );

    // Confidence fractions, as 1/(1 - p).
    for (log10_poids, half_width, denom) in c.confidence {
        let q = ConfidenceQuery::from_log10_poids(log10_poids, half_width)?;
        let outside = prob_outside(&q);
        let (tol, name) = if denom > 1e6 {
            (
                0.5,
                format!("1 in D, log10 P = {log10_poids}, U = {half_width}"),
            )
        } else if denom == 2509.0 {
            (
                0.1,
                format!("1 in D, log10 P = {log10_poids}, U = {half_width}"),
            )
        } else {
            (
                0.05,
                format!("1 in D, log10 P = {log10_poids}, U = {half_width}"),
            )
        };
        report.push(
            Section::Confidence,
            name,
            1.0 / outside,
            denom,
            Tolerance::Relative(tol),
            Source::Laplace,
            true,
        );
    }

    // Masses.
    let jupiter = mass_from_correction(c.laplace_z_prime, c.jupiter_base)?;
    report.push(
        Section::Mass,
        "Jupiter".into(),
        jupiter.denominator,
        c.laplace_jupiter_denominator,
        Tolerance::Absolute(0.02),
        Source::Laplace,
        true,
    );
    let uranus = mass_from_correction(c.laplace_z, c.uranus_base)?;
    report.push(
        Section::Mass,
        "Uranus".into(),
        uranus.denominator,
        c.laplace_uranus_denominator,
        Tolerance::Absolute(1.0),
        Source::Laplace,
        true,
    );
    let saturn = mass_from_correction(c.jupiter_motion_z, c.saturn_base)?;
    report.push(
        Section::Mass,
        "Saturn".into(),
        saturn.denominator,
        c.laplace_saturn_denominator,
        Tolerance::Absolute(0.05),
        Source::Laplace,
        true,
    );
    let ours = mass_from_correction(zp, c.jupiter_base)?;
    report.push(
        Section::Mass,
        "Jupiter from computed z'".into(),
        ours.denominator,
        c.laplace_jupiter_denominator,
        Tolerance::Absolute(0.02),
        Source::Laplace,
        false,
    );

    let (raw, scaled) = condition_diagnostics(d)?;
    report.push(
        Section::Conditioning,
        "kappa2 scaled".into(),
        scaled,
        104.0,
        Tolerance::Absolute(5.0),
        Source::Laplace,
        true,
    );
    report.push(
        Section::Conditioning,
        "kappa2 unscaled".into(),
        raw,
        1e8,
        Tolerance::AtLeast,
        Source::Laplace,
        true,
    );

    for p in &c.mass_bounds {
        report.push(
            Section::ModernValues,
            format!("{} modern within bounds", p.planet),
            if p.modern_within_bounds() { 1.0 } else { 0.0 },
            1.0,
            Tolerance::Absolute(0.0),
            Source::Laplace,
            false,
        );
    }
    Ok(report)
}
