use laplace_core::bouvard::{
    dataset_checksum, load_dataset, red_digit_entries, replicate, Section, SATURN_MOTION,
};
use laplace_core::precision::{replay_anchored, replay_factor, replay_factor_against, Position};
use laplace_core::Error;

#[test]
fn transcription_checksum_is_frozen() {
    assert_eq!(dataset_checksum(), 0xd18d_747f_34a7_f9aa);
}

#[test]
fn replication_is_deterministic() {
    let d = load_dataset(SATURN_MOTION).unwrap();
    let a = replicate(&d).unwrap();
    let b = replicate(&load_dataset(SATURN_MOTION).unwrap()).unwrap();
    assert_eq!(a.checks.len(), b.checks.len());
    for (x, y) in a.checks.iter().zip(&b.checks) {
        assert_eq!(x.name, y.name);
        assert_eq!(x.computed.to_bits(), y.computed.to_bits(), "{}", x.name);
        assert_eq!(x.passed, y.passed);
    }
}

#[test]
fn unknown_dataset() {
    assert_eq!(
        load_dataset("uranus-motion").unwrap_err(),
        Error::UnknownDataset("uranus-motion".into())
    );
}

#[test]
fn anchored_recomputation_reproduces_the_double_precision_lines() {
    let report = replicate(&load_dataset(SATURN_MOTION).unwrap()).unwrap();
    let anchored: Vec<_> = report
        .checks
        .iter()
        .filter(|c| c.section == Section::AnchoredSteps)
        .collect();
    assert_eq!(anchored.len(), 20 + 14 + 9 + 5 + 2);
    for c in anchored {
        assert!(
            c.passed,
            "{} computed {} expected {}",
            c.name, c.computed, c.expected
        );
    }
}

#[test]
fn step_b_chained_matches() {
    let report = replicate(&load_dataset(SATURN_MOTION).unwrap()).unwrap();
    for c in report
        .checks
        .iter()
        .filter(|c| c.section == Section::ChainedSteps)
    {
        if c.name.starts_with("step B") {
            assert!(c.passed, "{}", c.name);
        }
    }
}

#[test]
fn full_digit_replay_agrees() {
    let d = load_dataset(SATURN_MOTION).unwrap();
    let r = replay_factor(&d.system, 15).unwrap();
    assert!(r.report.min_agreement().unwrap() >= 12);
}

#[test]
fn seven_digit_replay_loses_step_c_and_later() {
    let d = load_dataset(SATURN_MOTION).unwrap();
    let r = replay_factor_against(&d.system, 7, &d.laplace_steps).unwrap();
    let c22 = r
        .report
        .entry(4, Position::Matrix { row: 1, col: 1 })
        .unwrap();
    assert!(c22.replay_flagged(7), "{c22:?}");
    let printed = c22.historical.unwrap();
    assert_eq!(printed.printed.value, 413134432.0);
    assert!(printed.flagged);
    for size in [3, 2] {
        assert!(r.report.replay_flagged().any(|e| e.step_size == size));
    }
    assert!(r.report.replay_flagged().all(|e| e.step_size != 6));
}

#[test]
fn disagreement_shrinks_with_more_digits() {
    let d = load_dataset(SATURN_MOTION).unwrap();
    let totals: Vec<u32> = [5, 6, 7, 8, 10, 15]
        .iter()
        .map(|&digits| {
            replay_factor(&d.system, digits)
                .unwrap()
                .report
                .total_disagreeing_digits()
        })
        .collect();
    assert!(totals.windows(2).all(|w| w[1] <= w[0]), "{totals:?}");
}

#[test]
fn red_digits_are_flagged_by_the_anchored_replay() {
    let d = load_dataset(SATURN_MOTION).unwrap();
    let red = red_digit_entries(&d);
    assert!(!red.is_empty());
    let report = replay_anchored(&d.laplace_steps, &d.laplace_solution, 7).unwrap();
    for (size, position) in red {
        let e = report.entry(size, position).unwrap();
        assert!(e.historical.unwrap().flagged, "{size} {position:?}");
    }
}

#[test]
fn laplace_lines_are_informative_only() {
    let report = replicate(&load_dataset(SATURN_MOTION).unwrap()).unwrap();
    assert!(report
        .checks
        .iter()
        .filter(|c| c.section == Section::LaplaceLines || c.section == Section::ModernValues)
        .all(|c| !c.gating));
}
