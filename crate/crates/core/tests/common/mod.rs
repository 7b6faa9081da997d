#![allow(dead_code)]

use std::path::PathBuf;

use holoindex::algebra::{parse_poly, GaussianRational as GR, PolySeries};
use holoindex::cli::{build_germ, corpus_problems, Flags, ProblemFile, Task};
use holoindex::germ_analysis::MapGerm;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("corpus")
}

pub fn problems() -> Vec<(String, ProblemFile)> {
    corpus_problems(&corpus_dir())
        .unwrap()
        .into_iter()
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().trim_end_matches(".problem.json").to_string();
            (name, ProblemFile::parse(&std::fs::read_to_string(&p).unwrap()).unwrap())
        })
        .collect()
}

pub fn problems_for(task: Task) -> Vec<(String, ProblemFile)> {
    problems().into_iter().filter(|(_, p)| p.task == task).collect()
}

/// Corpus germs that build without error.
pub fn germs_for(task: Task) -> Vec<(String, MapGerm)> {
    problems_for(task)
        .into_iter()
        .filter_map(|(n, p)| build_germ(&p, &Flags::default()).ok().map(|g| (n, g)))
        .collect()
}

pub fn q(x: i64) -> GR {
    GR::from_int(x)
}

pub fn poly(s: &str, n: usize) -> PolySeries {
    parse_poly(s, n).unwrap()
}

pub fn germ(n: usize, codim: usize, comps: &[&str]) -> MapGerm {
    MapGerm::from_strings(n, codim, comps).unwrap()
}

/// Exact conjugate `T f T^-1` for invertible polynomial `T` with polynomial
/// inverse `tinv`.
pub fn conjugate_exact(f: &MapGerm, t: &[PolySeries], tinv: &[PolySeries]) -> MapGerm {
    let comps: Vec<PolySeries> = f.components().unwrap();
    let inner: Vec<PolySeries> = comps.iter().map(|c| c.compose(tinv).unwrap()).collect();
    let out: Vec<PolySeries> = t.iter().map(|c| c.compose(&inner).unwrap()).collect();
    MapGerm::new(f.chart().clone(), out).unwrap()
}
