use std::process::Command;

use c3_core::cli::{parse_suites, run, sub_seed, RunConfig, Samples, Suite};
use c3_core::geometry::GeometryCase;
use c3_core::homotopy::MoveLog;
use c3_core::Error;

fn small(case: GeometryCase, seed: u64, suites: &str) -> RunConfig {
    let mut cfg = RunConfig::new(case, seed);
    cfg.samples = Samples { algebra: 200, geometry: 50, covering: 200, homotopy: 10 };
    cfg.suites = parse_suites(suites, case).unwrap();
    cfg
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_c3check"))
}

#[test]
fn suite_lists_expand_per_case() {
    assert_eq!(parse_suites("all", GeometryCase::HH).unwrap(), Suite::ALL.to_vec());
    assert_eq!(
        parse_suites("all", GeometryCase::OO).unwrap(),
        vec![Suite::Algebra, Suite::Geometry, Suite::Homotopy]
    );
    assert_eq!(parse_suites("homotopy, algebra,homotopy", GeometryCase::HO).unwrap(), vec![Suite::Algebra, Suite::Homotopy]);
    assert!(matches!(parse_suites("quadric", GeometryCase::HH), Err(Error::Config(_))));
    assert!(matches!(parse_suites("", GeometryCase::HH), Err(Error::Config(_))));
}

#[test]
fn invalid_configs_are_rejected() {
    let mut cfg = small(GeometryCase::HH, 1, "algebra");
    cfg.samples = Samples::uniform(0);
    assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    assert!(matches!(run(&cfg), Err(Error::Config(_))));

    let mut cfg = small(GeometryCase::HH, 1, "algebra");
    cfg.tolerance = 0.0;
    assert!(matches!(cfg.validate(), Err(Error::Config(_))));

    let mut cfg = small(GeometryCase::OO, 1, "algebra");
    cfg.suites = vec![Suite::Covering];
    assert!(matches!(cfg.validate(), Err(Error::Config(_))));
}

#[test]
fn sub_seeds_are_stable_and_label_dependent() {
    assert_eq!(sub_seed(1, "oo/homotopy/reduce"), sub_seed(1, "oo/homotopy/reduce"));
    assert_ne!(sub_seed(1, "oo/homotopy/reduce"), sub_seed(2, "oo/homotopy/reduce"));
    assert_ne!(sub_seed(1, "oo/homotopy/reduce"), sub_seed(1, "oo/homotopy/pinch"));
}

#[test]
fn covering_report_has_positive_minimum() {
    let report = run(&small(GeometryCase::HH, 1, "covering")).unwrap();
    assert!(report.passed());
    let free = report.checks.iter().find(|c| c.name.starts_with("covering.free_action")).unwrap();
    assert!(free.passed && free.samples == 200);
    assert!(report.render().contains("covering.free_action"));
}

#[test]
fn complex_homotopy_report_includes_pl_reduce() {
    let report = run(&small(GeometryCase::OO, 1, "homotopy")).unwrap();
    assert!(report.passed(), "{}", report.render());
    assert!(report.checks.iter().any(|c| c.name.contains("pl_reduce")));
    let stats = report.homotopy.as_ref().unwrap();
    assert_eq!(stats.experiments, 10);
    assert_eq!(stats.within_bound, 10);

    let real = run(&small(GeometryCase::HO, 1, "homotopy")).unwrap();
    assert!(!real.checks.iter().any(|c| c.name.contains("pl_reduce")));
}

#[test]
fn identical_configs_give_identical_outcomes() {
    for case in GeometryCase::ALL {
        let cfg = small(case, 7, "all");
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a.outcome_vector(), b.outcome_vector());
        assert_eq!(a.render_body(), b.render_body());
    }
}

#[test]
fn report_layout_is_stable() {
    let report = run(&small(GeometryCase::HO, 3, "algebra,homotopy")).unwrap();
    let text = report.render();
    let pos = |key: &str| text.find(key).unwrap_or_else(|| panic!("missing {key}"));
    assert!(pos("[config]") < pos("[[check]]"));
    assert!(pos("[[check]]") < pos("[homotopy]"));
    assert!(pos("[homotopy]") < pos("[summary]"));
    assert!(text.trim_end().lines().last().unwrap().starts_with("wall_time_s = "));
    assert!(text.contains("tolerance = 1.0000000000000001e-9"));
}

#[test]
fn report_and_move_logs_are_written() {
    let dir = std::env::temp_dir().join(format!("c3check-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("report.toml");
    let mut cfg = small(GeometryCase::OO, 2, "homotopy");
    cfg.out = Some(out.clone());
    let report = run(&cfg).unwrap();
    assert_eq!(std::fs::read_to_string(&out).unwrap(), report.render());
    let logs = dir.join("report.toml.movelogs");
    let geo = c3_core::geometry::Geometry::new(GeometryCase::OO);
    for (i, ex) in report.experiments.iter().enumerate() {
        let text = std::fs::read_to_string(logs.join(format!("reduce-{i:04}.jsonl"))).unwrap();
        let log = MoveLog::from_jsonl(&geo, &text).unwrap();
        log.verify(&geo, &ex.source, &ex.target).unwrap();
        assert!(logs.join(format!("reduce-{i:04}.paths.json")).exists());
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn binary_exit_codes() {
    let ok = bin().args(["--case", "hh", "--suite", "algebra,covering", "--samples", "100"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("passed = true"));

    let fail = bin().args(["--case", "hh", "--suite", "algebra", "--samples", "100", "--tolerance", "1e-300"]).output().unwrap();
    assert_eq!(fail.status.code(), Some(1));

    for args in [
        vec!["--samples", "0"],
        vec!["--case", "oo", "--suite", "covering"],
        vec!["--case", "xx"],
        vec!["--suite", "nothing"],
    ] {
        let out = bin().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}
