use std::f64::consts::TAU;
use std::io::Write;

use broxlab::suite::{self, SuiteOptions, SuiteSummary};
use broxlab::verify::GRADIENT_REL_TOL;
use broxlab::Verdict;

fn tolerances(k: u8) -> String {
    match k {
        1 => format!(
            "t=2π x0=20, <= {} steps, |xK - x*| <= {:e}, < {} s",
            suite::TRAJECTORY_MAX_STEPS,
            suite::TRAJECTORY_TOL,
            suite::TRAJECTORY_SECONDS
        ),
        2 => "inner products +1 +2 -4 -1 exact".to_string(),
        3 => format!("{} starts per case, < {} s", suite::DESCENT_STARTS, suite::DESCENT_SECONDS),
        4 => format!("{} samples at t in {:?}", suite::CLASS_SAMPLES, suite::CLASS_RADII),
        5 => format!("{} pairs per map, position tol {:e}", suite::INVARIANCE_PAIRS, suite::INVARIANCE_TOL),
        6 => format!("F2 pairs {:?}, UBA pairs {:?}", suite::F2_RADII, suite::UBA_RADII),
        7 => format!(
            "{} points, rel tol {:e}; {} normal-cone points",
            suite::GRADIENT_POINTS,
            GRADIENT_REL_TOL,
            suite::NORMAL_CONE_POINTS
        ),
        _ => String::new(),
    }
}

fn report(summary: &SuiteSummary) {
    let mut out = std::io::stdout().lock();
    for (k, _) in suite::CRITERIA {
        let c = summary.criterion(k).expect("every criterion runs");
        writeln!(out, "{c} | {}", tolerances(k)).unwrap();
    }
    for e in summary.entries.iter().filter(|e| !e.ok) {
        writeln!(out, "  unexpected: [{}] {} {:?} ({})", e.criterion, e.id, e.verdict, e.detail).unwrap();
    }
}

#[test]
fn pinned_constants() {
    assert_eq!(suite::TRAJECTORY_MAX_STEPS, 10);
    assert_eq!(suite::TRAJECTORY_TOL, 1e-3);
    assert_eq!(suite::TRAJECTORY_SECONDS, 5.0);
    const { assert!(suite::DESCENT_STARTS >= 20) };
    assert_eq!(suite::DESCENT_SECONDS, 60.0);
    const { assert!(suite::CLASS_SAMPLES >= 10_000) };
    assert_eq!(suite::CLASS_RADII, [0.1, 1.0, TAU]);
    const { assert!(suite::INVARIANCE_PAIRS >= 100) };
    assert_eq!(suite::INVARIANCE_TOL, 1e-6);
    assert_eq!(suite::GRADIENT_POINTS, 100);
    assert_eq!(GRADIENT_REL_TOL, 1e-4);
    assert_eq!(suite::F2_RADII.len(), 3);
    assert_eq!(suite::UBA_RADII.len(), 3);

    let cases = suite::descent_cases();
    let radii = |name: &str| {
        cases
            .iter()
            .find(|(f, _)| f.name() == name)
            .map(|(_, r)| r.clone())
            .unwrap_or_else(|| panic!("{name} missing from descent cases"))
    };
    assert_eq!(radii("example1_sin_abs"), vec![TAU]);
    assert_eq!(radii("example2_punctured_quadratic"), vec![0.5, 1.0]);
    for d in 1..=3 {
        assert_eq!(radii(&format!("sphere{d}")), vec![0.1, 1.0]);
    }
}

#[test]
fn acceptance_criteria() {
    let summary = suite::run_suite(&SuiteOptions::default()).expect("suite runs");
    report(&summary);

    let c2 = summary.criterion(2).unwrap();
    assert_eq!(c2.entries, 4);
    let expected_fail = summary
        .entries
        .iter()
        .filter(|e| e.criterion == 2 && e.expected == Verdict::Fail)
        .count();
    assert_eq!(expected_fail, 2);

    let failing: Vec<u8> = summary.criteria.iter().filter(|c| !c.passed).map(|c| c.criterion).collect();
    assert!(failing.is_empty(), "failing criteria: {failing:?}");
    assert!(summary.passed);
}

#[test]
fn suite_is_reproducible_for_a_seed() {
    let opts = SuiteOptions { seed: 7, only: Some(vec![2, 6]), ..SuiteOptions::default() };
    let a = suite::run_suite(&opts).unwrap().to_json().unwrap();
    let b = suite::run_suite(&opts).unwrap().to_json().unwrap();
    assert_eq!(a, b);
}
