mod common;

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;

use common::*;
use holoindex::algebra::GaussianRational as GR;
use holoindex::canonical_sections::{singular_directions, DirectionMode};
use holoindex::cli::{expected_path, run_corpus, Flags, ReportFile, Task};
use holoindex::germ_analysis::dicritical_test;
use holoindex::index::{sum_without, verify_index_theorem, CompactGeometry};
use holoindex::residues::Location;
use holoindex::Error;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_holoindex"))
}

#[test]
fn golden_corpus_is_green() {
    let s = run_corpus(&corpus_dir(), &Flags::default(), false).unwrap();
    assert!(s.total >= 40);
    assert!(s.all_green(), "{:?}", s.diffs);
}

#[test]
fn a_perturbed_golden_is_reported_once() {
    let tmp = tempfile::tempdir().unwrap();
    for name in ["index_p1_diagonal", "residues_curve"] {
        for suffix in [".problem.json", ".expected.json"] {
            let f = format!("{name}{suffix}");
            std::fs::copy(corpus_dir().join(&f), tmp.path().join(&f)).unwrap();
        }
    }
    let golden = tmp.path().join("residues_curve.expected.json");
    let text = std::fs::read_to_string(&golden).unwrap();
    std::fs::write(&golden, text.replacen("\"pass\"", "\"fail\"", 1)).unwrap();
    let s = run_corpus(tmp.path(), &Flags::default(), false).unwrap();
    assert_eq!(s.total, 2);
    assert_eq!(s.diffs.len(), 1);
    assert!(s.diffs[0].problem.ends_with("residues_curve.problem.json"));
}

#[test]
fn empty_corpus_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let err = run_corpus(tmp.path(), &Flags::default(), false).unwrap_err();
    assert!(matches!(err, Error::CorpusMissing(_)));
}

fn run_json(problem: &Path, threads: &str) -> (i32, String) {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("report.json");
    let status = bin()
        .arg(problem)
        .arg("--json")
        .arg(&out)
        .arg("--quiet")
        .env("HOLOINDEX_THREADS", threads)
        .status()
        .unwrap();
    (status.code().unwrap(), std::fs::read_to_string(out).unwrap_or_default())
}

#[test]
fn binary_exit_codes() {
    for (name, code) in [
        ("index_p1_diagonal", 0),
        ("atlas_bent", 1),
        ("classify_malformed", 2),
        ("index_identity", 3),
        ("residues_not_common_zero", 3),
    ] {
        let (got, _) = run_json(&corpus_dir().join(format!("{name}.problem.json")), "2");
        assert_eq!(got, code, "{name}");
    }
    let status = bin().arg("/nonexistent.problem.json").arg("--quiet").status().unwrap();
    assert_eq!(status.code(), Some(2));
    let status = bin().arg("--corpus").arg(corpus_dir()).arg("--quiet").status().unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn reports_are_deterministic_across_thread_counts() {
    for name in ["index_p2_diagonal", "index_p1_algebraic", "residues_orbit"] {
        let p = corpus_dir().join(format!("{name}.problem.json"));
        let golden = std::fs::read_to_string(expected_path(&p)).unwrap();
        let runs: Vec<String> = ["1", "4", "4"].iter().map(|t| run_json(&p, t).1).collect();
        for r in &runs {
            assert_eq!(r, &golden, "{name}");
        }
    }
}

#[test]
fn goldens_round_trip() {
    for (name, _) in problems() {
        let text = std::fs::read_to_string(corpus_dir().join(format!("{name}.expected.json"))).unwrap();
        let report: ReportFile = serde_json::from_str(&text).unwrap();
        assert_eq!(report.to_canonical_json(), text, "{name}");
    }
}

fn curve_cases() -> Vec<(String, holoindex::germ_analysis::MapGerm)> {
    [Task::VerifyIndex, Task::Blowup]
        .into_iter()
        .flat_map(germs_for)
        .filter(|(_, g)| g.nvars() == 2 && g.chart().is_point())
        .collect()
}

#[test]
fn lifted_singular_points_are_the_singular_directions() {
    let mut checked = 0;
    for (name, g) in curve_cases() {
        if dicritical_test(&g).unwrap().dicritical {
            continue;
        }
        let dirs = singular_directions(&g, &[], DirectionMode::NonTangential).unwrap();
        assert!(!dirs.all, "{name}");
        let v = verify_index_theorem(&g, &CompactGeometry::exceptional_p1()).unwrap();
        let lifted: BTreeSet<String> =
            v.per_point.iter().filter_map(|p| p.direction.as_ref()).map(|d| format!("{d:?}")).collect();
        let direct: BTreeSet<String> = dirs.directions.iter().map(|d| format!("{d:?}")).collect();
        assert_eq!(lifted, direct, "{name}");
        let lifted_orbits: BTreeSet<String> = v
            .per_point
            .iter()
            .filter_map(|p| match &p.residue.location {
                Location::Orbit { minpoly, .. } => Some(minpoly.monic().to_string()),
                _ => None,
            })
            .collect();
        let direct_orbits: BTreeSet<String> = dirs.orbits.iter().map(|o| o.minpoly.monic().to_string()).collect();
        assert_eq!(lifted_orbits, direct_orbits, "{name}");
        checked += 1;
    }
    assert!(checked >= 8);
}

#[test]
fn points_are_attributed_once_to_their_leftmost_chart() {
    for (name, g) in germs_for(Task::VerifyIndex) {
        let n = g.nvars();
        if !g.chart().is_point() {
            continue;
        }
        let geo = if n == 2 { CompactGeometry::exceptional_p1() } else { CompactGeometry::exceptional_pn(n).unwrap() };
        let Ok(v) = verify_index_theorem(&g, &geo) else { continue };
        let labels: BTreeSet<&str> = v.per_point.iter().map(|p| p.label.as_str()).collect();
        assert_eq!(labels.len(), v.per_point.len(), "{name}");
        for p in &v.per_point {
            if let Some(d) = &p.direction {
                let lead = d.iter().position(|x| *x != GR::from_int(0)).unwrap();
                assert_eq!(p.chart, lead, "{name} {}", p.label);
                assert_eq!(d[lead], GR::from_int(1));
            }
        }
    }
}

#[test]
fn dropping_a_point_breaks_the_identity() {
    let mut dropped = 0;
    for (name, g) in germs_for(Task::VerifyIndex) {
        let n = g.nvars();
        if !g.chart().is_point() {
            continue;
        }
        let geo = if n == 2 { CompactGeometry::exceptional_p1() } else { CompactGeometry::exceptional_pn(n).unwrap() };
        let Ok(v) = verify_index_theorem(&g, &geo) else { continue };
        assert!(v.pass, "{name}");
        for (i, p) in v.per_point.iter().enumerate() {
            // a point with zero residue does not contribute
            if p.residue.value != GR::from_int(0) {
                assert_ne!(sum_without(&v, i), v.expected, "{name} {}", p.label);
                dropped += 1;
            }
        }
    }
    assert!(dropped >= 10);
}
