//! Problem files in, reports out.
//!
//! Problem and report files are JSON. Exact values are serialized as
//! `p/q` or `p/q+r/si` strings and polynomials in the input grammar, so a
//! report is byte-stable and can be compared against a golden file.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algebra::{parse_poly, GaussianRational as GR, PolySeries};
use crate::blowup::{blow_up_linear_center, blow_up_point, chart_monomial, check_atlas_with, conjugacy_holds};
use crate::canonical_sections::{
    extract_section, singular_points_with, PointSearch, SectionData, SectionKind, DEFAULT_SEARCH_HEIGHT,
};
use crate::error::{Error, Result};
use crate::germ_analysis::{contact_profile, dicritical_test, AdaptedChart, MapGerm, NormalAction};
use crate::index::{corollary81_report, verify_index_theorem_with, CompactGeometry, GeometryKind, IndexOptions};
use crate::residues::{
    residue_bb_phi, residue_cs_grothendieck, residue_cs_grothendieck_orbit, residue_cs_n2_smooth,
    residue_cs_singular_curve, residue_ls_phi, residue_on_orbit, BranchParametrization, Location, Phi,
    Provenance, ResidueFormula, ResidueValue, DEFAULT_PRECISION_CAP,
};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Classify,
    Section,
    Residues,
    VerifyIndex,
    Blowup,
    AtlasCheck,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub nvars: usize,
    pub codim: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trunc_degree: Option<u32>,
    /// Common denominator of the components.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub denominator: Option<String>,
    /// `X_f`, `H_sigma` or `H1_sigma`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    /// Exponents of `c1, c2, ...` for the variation residues.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<u32>>,
    /// Points of `S`, coordinates after the first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux: Option<String>,
    /// Branches as polynomials in `t`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branches: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search_height: Option<u32>,
    /// Atlas checks: value of the free coordinates at the overlap point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fill: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    /// `splitting` or `comfortable`: bend the transitions to break that check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturb: Option<String>,
}

impl Options {
    fn is_empty(&self) -> bool {
        self == &Options::default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: u32,
    pub task: Task,
    pub map: Vec<String>,
    pub chart: ChartSpec,
    #[serde(default, skip_serializing_if = "Options::is_empty")]
    pub options: Options,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        let p: ProblemFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("problem file: {e}")))?;
        if p.version != FORMAT_VERSION {
            return Err(Error::InvalidInput(format!("unsupported version {}", p.version)));
        }
        Ok(p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContactReport {
    pub nu_f: u32,
    pub orders: Vec<String>,
    pub tangential: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_f: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dicritical: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub var: usize,
    pub prefix: Vec<String>,
    pub minpoly: String,
    pub multiplicity: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionReport {
    pub kind: String,
    pub nu: u32,
    pub g_on_s: Vec<String>,
    pub b1: String,
    pub h1_on_s: String,
    pub singular_points: Vec<Vec<String>>,
    pub orbits: Vec<OrbitReport>,
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<usize>,
    pub location: String,
    pub formula: String,
    pub value: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_root: Option<String>,
    pub provenance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicity: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerReport {
    pub lhs: i64,
    pub rhs: i64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartBalanceReport {
    pub chart: usize,
    pub finite: String,
    pub at_infinity: String,
    pub balanced: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cor81Report {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_minus_nu_c1: Option<i64>,
    pub positivity: String,
    pub positive_normal_bundle: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weakly_attractive_bound: Option<i64>,
    pub bound: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexReport {
    pub geometry: String,
    pub center_codim: usize,
    pub nu: u32,
    pub tangential: bool,
    pub section_kind: String,
    pub exact_sum: String,
    pub expected: String,
    pub pass: bool,
    pub zero_count: i64,
    pub expected_zero_count: i64,
    pub complete: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler: Option<EulerReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sum_check: Vec<ChartBalanceReport>,
    pub corollary81: Cor81Report,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftReport {
    pub chart: String,
    pub numerators: Vec<String>,
    pub denominator: String,
    pub conjugacy: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupReport {
    pub center_codim: usize,
    pub nu_downstairs: u32,
    pub nu_upstairs: u32,
    pub tangential: bool,
    pub radial: bool,
    pub predicted_nu: u32,
    pub predicted_tangential: bool,
    pub prediction_holds: bool,
    pub charts: Vec<LiftReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub from: usize,
    pub to: usize,
    pub splitting: bool,
    pub comfortable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtlasReport {
    pub overlaps: Vec<OverlapReport>,
    pub all_splitting: bool,
    pub all_comfortable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFile {
    pub problem: ProblemFile,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contact: Option<ContactReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section: Option<SectionReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub residues: Vec<ResidueEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residue_sum: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<IndexReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blowup: Option<BlowupReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atlas: Option<AtlasReport>,
}

impl ReportFile {
    fn new(problem: ProblemFile) -> Self {
        ReportFile {
            problem,
            status: Status::Pass,
            error: None,
            contact: None,
            section: None,
            residues: Vec::new(),
            residue_sum: None,
            index: None,
            blowup: None,
            atlas: None,
        }
    }

    /// Canonical serialization: pretty JSON with a trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn exit_code(&self) -> i32 {
        match (self.status, &self.error) {
            (Status::Pass, _) => 0,
            (Status::Fail, _) => 1,
            (Status::Error, Some(e)) if is_input_kind(&e.kind) => 2,
            (Status::Error, _) => 3,
        }
    }
}

fn is_input_kind(kind: &str) -> bool {
    matches!(kind, "ParseError" | "InvalidInput" | "CorpusMissing")
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Flags {
    pub trunc: Option<u32>,
    pub precision_cap: Option<usize>,
}

pub fn poly_string(p: &PolySeries) -> String {
    match p.trunc_degree() {
        Some(t) => format!("{p} + O({t})"),
        None => p.to_string(),
    }
}

fn parse_scalar(s: &str) -> Result<GR> {
    s.parse().map_err(|_| Error::InvalidInput(format!("not an exact number: {s:?}")))
}

/// Runs one problem. Errors become a report with status `error`.
pub fn run_problem(problem: &ProblemFile, flags: &Flags) -> ReportFile {
    let mut report = ReportFile::new(problem.clone());
    if let Err(e) = dispatch(problem, flags, &mut report) {
        report.status = Status::Error;
        report.error = Some(ErrorReport { kind: e.kind().to_string(), message: e.to_string() });
    }
    report
}

/// Reads and runs a problem file; unreadable or invalid files give an
/// input-error report with an empty problem echo.
pub fn run_path(path: &Path, flags: &Flags) -> ReportFile {
    let parsed = fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
        .and_then(|t| ProblemFile::parse(&t));
    match parsed {
        Ok(p) => run_problem(&p, flags),
        Err(e) => {
            let blank = ProblemFile {
                version: FORMAT_VERSION,
                task: Task::Classify,
                map: Vec::new(),
                chart: ChartSpec { nvars: 0, codim: 0 },
                options: Options::default(),
            };
            let mut r = ReportFile::new(blank);
            r.status = Status::Error;
            r.error = Some(ErrorReport { kind: e.kind().to_string(), message: e.to_string() });
            r
        }
    }
}

pub fn build_germ(p: &ProblemFile, flags: &Flags) -> Result<MapGerm> {
    let n = p.chart.nvars;
    if p.map.len() != n {
        return Err(Error::InvalidInput(format!("map has {} components for {n} variables", p.map.len())));
    }
    let trunc = flags.trunc.or(p.options.trunc_degree);
    let comps = p
        .map
        .iter()
        .map(|s| parse_poly(s, n).map(|q| if let Some(t) = trunc { q.with_trunc(t) } else { q }))
        .collect::<Result<Vec<_>>>()?;
    let label = if p.chart.codim == n { "O" } else { "z" };
    let chart = AdaptedChart::new(n, p.chart.codim, label)?;
    match &p.options.denominator {
        None => MapGerm::new(chart, comps),
        Some(d) => {
            let d = parse_poly(d, n)?;
            let work = MapGerm::new(chart.clone(), comps.clone())
                .map(|g| g.work_trunc())
                .unwrap_or(6);
            MapGerm::with_denominator(chart, comps, d, work)
        }
    }
}

fn dispatch(p: &ProblemFile, flags: &Flags, report: &mut ReportFile) -> Result<()> {
    if p.task == Task::AtlasCheck {
        return atlas_task(p, report);
    }
    let germ = build_germ(p, flags)?;
    match p.task {
        Task::Classify => classify_task(&germ, report),
        Task::Section => {
            let section = section_for(&germ, p)?;
            report.section = Some(section_report(&section, p)?);
            Ok(())
        }
        Task::Residues => residues_task(&germ, p, flags, report),
        Task::VerifyIndex => index_task(&germ, p, flags, report),
        Task::Blowup => blowup_task(&germ, report),
        Task::AtlasCheck => unreachable!(),
    }
}

fn classify_task(germ: &MapGerm, report: &mut ReportFile) -> Result<()> {
    let profile = contact_profile(germ)?;
    let (dicritical, order) = if germ.chart().is_point() {
        let t = dicritical_test(germ)?;
        (Some(t.dicritical), Some(t.order))
    } else {
        (None, None)
    };
    report.contact = Some(ContactReport {
        nu_f: profile.nu_f,
        orders: profile.per_coordinate_orders.iter().map(|o| o.to_string()).collect(),
        tangential: profile.tangential,
        b1: profile.b1.as_ref().map(poly_string),
        b_f: profile.b_f.as_ref().map(|b| match b {
            NormalAction::Constant(c) => c.to_string(),
            NormalAction::NonConstant(p) => poly_string(p),
        }),
        dicritical,
        order,
    });
    Ok(())
}

fn section_for(germ: &MapGerm, p: &ProblemFile) -> Result<SectionData> {
    let kind = match &p.options.section {
        Some(s) => s.parse()?,
        None => {
            let prof = contact_profile(germ)?;
            if prof.tangential {
                SectionKind::Xf
            } else if prof.nu_f > 1 {
                SectionKind::HSigma
            } else {
                SectionKind::H1Sigma
            }
        }
    };
    extract_section(germ, kind)
}

fn search_for(section: &SectionData, p: &ProblemFile) -> Result<PointSearch> {
    Ok(match &p.options.points {
        Some(pts) => PointSearch::Verify(
            pts.iter()
                .map(|c| c.iter().map(|x| parse_scalar(x)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?,
        ),
        None if section.nvars() == 2 => PointSearch::Exact,
        None => PointSearch::Box { height: p.options.search_height.unwrap_or(DEFAULT_SEARCH_HEIGHT) },
    })
}

fn section_report(section: &SectionData, p: &ProblemFile) -> Result<SectionReport> {
    let (points, orbits, complete) = if section.identically_zero {
        (Vec::new(), Vec::new(), true)
    } else {
        let locus = singular_points_with(section, &search_for(section, p)?)?;
        let pts = locus
            .points
            .iter()
            .map(|pt| pt.coords[1..].iter().map(|x| x.to_string()).collect())
            .collect();
        let orbits = locus
            .orbits
            .iter()
            .map(|o| OrbitReport {
                var: o.var,
                prefix: o.prefix.iter().map(|x| x.to_string()).collect(),
                minpoly: o.minpoly.display_in(&format!("z{}", o.var + 1)),
                multiplicity: o.multiplicity,
            })
            .collect();
        (pts, orbits, locus.complete)
    };
    Ok(SectionReport {
        kind: section.kind.as_str().to_string(),
        nu: section.nu,
        g_on_s: section.g_on_s.iter().map(poly_string).collect(),
        b1: poly_string(&section.b1),
        h1_on_s: poly_string(&section.h1_on_s),
        singular_points: points,
        orbits,
        complete,
    })
}

fn parse_formula(s: &str) -> Result<ResidueFormula> {
    use ResidueFormula::*;
    [CsSmooth, CsGrothendieck, CsSingularCurve, CsSingularCurveComfortable, LsPhi, BbPhi]
        .into_iter()
        .find(|f| f.as_str() == s)
        .ok_or_else(|| Error::InvalidInput(format!("unknown formula {s:?}")))
}

fn residue_entry(chart: Option<usize>, v: &ResidueValue, mult: Option<u32>) -> ResidueEntry {
    let location = match &v.location {
        Location::Point(p) => format!("({})", p[1..].iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    };
    ResidueEntry {
        chart,
        location,
        formula: v.formula.as_str().to_string(),
        value: v.value.to_string(),
        per_root: v.per_root.as_ref().map(|r| r.display_in("x")),
        provenance: match v.provenance {
            Provenance::Exact => "exact",
            Provenance::OrbitAggregated => "orbit_aggregated",
        }
        .to_string(),
        multiplicity: mult,
    }
}

fn residues_task(germ: &MapGerm, p: &ProblemFile, flags: &Flags, report: &mut ReportFile) -> Result<()> {
    let n = germ.nvars();
    let cap = flags.precision_cap.or(p.options.precision_cap).unwrap_or(DEFAULT_PRECISION_CAP);
    let formula = match &p.options.formula {
        Some(f) => parse_formula(f)?,
        None if p.options.branches.is_some() => ResidueFormula::CsSingularCurve,
        None if n == 2 => ResidueFormula::CsSmooth,
        None => ResidueFormula::CsGrothendieck,
    };
    let mut values: Vec<(ResidueValue, Option<u32>)> = Vec::new();
    if matches!(formula, ResidueFormula::CsSingularCurve | ResidueFormula::CsSingularCurveComfortable) {
        let curve = p
            .options
            .curve
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("singular-curve residues need a curve".into()))?;
        let ell = parse_poly(curve, n)?;
        let aux = parse_poly(p.options.aux.as_deref().unwrap_or("z2"), n)?;
        let branches = p
            .options
            .branches
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("singular-curve residues need branches".into()))?;
        for (k, b) in branches.iter().enumerate() {
            let comps = b
                .iter()
                .map(|c| parse_poly(&c.replace('t', "z1"), 1))
                .collect::<Result<Vec<_>>>()?;
            let br = BranchParametrization::new(comps)?;
            let mut v = residue_cs_singular_curve(germ, &ell, &aux, &br, formula)?;
            if let Location::Branch { index, .. } = &mut v.location {
                *index = k;
            }
            values.push((v, None));
        }
    } else {
        let section = section_for(germ, p)?;
        let phi = Phi { exps: p.options.phi.clone().unwrap_or_else(|| vec![n as u32 - 1]) };
        let locus = singular_points_with(&section, &search_for(&section, p)?)?;
        for pt in &locus.points {
            let c = &pt.coords;
            let v = match formula {
                ResidueFormula::CsSmooth => residue_cs_n2_smooth(&section, c),
                ResidueFormula::CsGrothendieck => residue_cs_grothendieck(&section, c),
                ResidueFormula::LsPhi => residue_ls_phi(&section, c, &phi),
                ResidueFormula::BbPhi => residue_bb_phi(&section, c, &phi),
                _ => unreachable!(),
            };
            let v = v.map_err(|e| e.in_chart(1, Some(crate::canonical_sections::format_point(&c[1..]))))?;
            values.push((v, pt.multiplicity));
        }
        for o in &locus.orbits {
            let v = if n == 2 {
                residue_on_orbit(&section, o, formula, cap)?
            } else if formula == ResidueFormula::CsGrothendieck {
                residue_cs_grothendieck_orbit(&section, o, cap)?
            } else {
                return Err(Error::TruncationTooLowToSolve(
                    "variation residues at algebraic points are not computed in dimension > 2".into(),
                ));
            };
            values.push((v, Some(o.multiplicity)));
        }
        report.section = Some(section_report(&section, p)?);
    }
    let total = values.iter().fold(GR::from_int(0), |acc, (v, _)| &acc + &v.value);
    report.residues = values.iter().map(|(v, m)| residue_entry(None, v, *m)).collect();
    report.residue_sum = Some(total.to_string());
    Ok(())
}

fn index_task(germ: &MapGerm, p: &ProblemFile, flags: &Flags, report: &mut ReportFile) -> Result<()> {
    let n = germ.nvars();
    let m = p.chart.codim;
    let kind = match &p.options.geometry {
        Some(g) => g.parse()?,
        None if m < n => GeometryKind::ExceptionalLinearCenter,
        None if n == 2 => GeometryKind::ExceptionalP1,
        None => GeometryKind::ExceptionalPn,
    };
    let geometry = CompactGeometry::from_kind(kind, n, Some(m))?;
    let opts = IndexOptions {
        precision_cap: flags.precision_cap.or(p.options.precision_cap).unwrap_or(DEFAULT_PRECISION_CAP),
        search_height: p.options.search_height.unwrap_or(DEFAULT_SEARCH_HEIGHT),
    };
    let v = verify_index_theorem_with(germ, &geometry, &opts)?;
    report.residues = v
        .per_point
        .iter()
        .map(|pt| {
            let mut e = residue_entry(Some(pt.chart), &pt.residue, pt.multiplicity);
            e.location = pt.label.clone();
            e
        })
        .collect();
    report.residue_sum = Some(v.exact_sum.to_string());
    let c = corollary81_report(&v);
    let sum_ok = v.sum_check.as_ref().is_none_or(|s| s.consistent);
    let euler_ok = v.euler.as_ref().is_none_or(|e| e.pass);
    report.index = Some(IndexReport {
        geometry: geometry.kind.as_str().to_string(),
        center_codim: geometry.center_codim,
        nu: v.nu,
        tangential: v.tangential,
        section_kind: v.section_kind.as_str().to_string(),
        exact_sum: v.exact_sum.to_string(),
        expected: v.expected.to_string(),
        pass: v.pass,
        zero_count: v.zero_count,
        expected_zero_count: v.expected_zero_count,
        complete: v.complete,
        euler: v.euler.as_ref().map(|e| EulerReport { lhs: e.lhs, rhs: e.rhs, pass: e.pass }),
        sum_check: v
            .sum_check
            .iter()
            .flat_map(|s| &s.charts)
            .map(|b| ChartBalanceReport {
                chart: b.chart,
                finite: b.finite.to_string(),
                at_infinity: b.at_infinity.to_string(),
                balanced: b.balanced,
            })
            .collect(),
        corollary81: Cor81Report {
            chi_minus_nu_c1: c.chi_minus_nu_c1,
            positivity: c.positivity.as_str().to_string(),
            positive_normal_bundle: c.positive_normal_bundle.as_str().to_string(),
            weakly_attractive_bound: c.weakly_attractive_bound,
            bound: c.bound.as_str().to_string(),
        },
    });
    if !(v.pass && v.complete && sum_ok && euler_ok) {
        report.status = Status::Fail;
    }
    Ok(())
}

fn blowup_task(germ: &MapGerm, report: &mut ReportFile) -> Result<()> {
    let lifted = if germ.chart().is_point() {
        blow_up_point(germ)?
    } else {
        blow_up_linear_center(germ, germ.chart().codim)?
    };
    let mut charts = Vec::new();
    for lc in &lifted.charts {
        charts.push(LiftReport {
            chart: lc.chart.label(),
            numerators: lc.germ.numerators().iter().map(poly_string).collect(),
            denominator: poly_string(lc.germ.denominator()),
            conjugacy: conjugacy_holds(germ, lc)?,
        });
    }
    let ok = lifted.prediction_holds() && charts.iter().all(|c| c.conjugacy);
    report.blowup = Some(BlowupReport {
        center_codim: lifted.center_codim,
        nu_downstairs: lifted.nu_downstairs,
        nu_upstairs: lifted.nu_upstairs,
        tangential: lifted.tangential_upstairs,
        radial: lifted.radial,
        predicted_nu: lifted.predicted_nu,
        predicted_tangential: lifted.predicted_tangential,
        prediction_holds: lifted.prediction_holds(),
        charts,
    });
    if !ok {
        report.status = Status::Fail;
    }
    Ok(())
}

fn atlas_task(p: &ProblemFile, report: &mut ReportFile) -> Result<()> {
    let n = p.chart.nvars;
    let m = p.chart.codim;
    let fill = parse_scalar(p.options.fill.as_deref().unwrap_or("0"))?;
    let depth = p.options.depth.unwrap_or(6);
    let perturb = p.options.perturb.clone().unwrap_or_else(|| "none".into());
    if n < 2 || m < 2 || m > n {
        return Err(Error::InvalidInput(format!("no blow-up atlas for codimension {m} in C^{n}")));
    }
    let checks = match perturb.as_str() {
        "none" => check_atlas_with(n, m, &fill, depth, |_, _, t| t)?,
        // a mixed term u0 u1 in a tangential coordinate
        "splitting" => check_atlas_with(n, m, &fill, depth, |_, _, mut t| {
            t[1] = &t[1] + &chart_monomial(n, 1, 1, 1);
            t
        })?,
        // a u0^2 term in the divisor equation
        "comfortable" => check_atlas_with(n, m, &fill, depth, |_, _, mut t| {
            t[0] = &t[0] + &chart_monomial(n, 2, 1, 0);
            t
        })?,
        other => return Err(Error::InvalidInput(format!("unknown perturbation {other:?}"))),
    };
    let overlaps: Vec<OverlapReport> = checks
        .iter()
        .map(|c| OverlapReport { from: c.from, to: c.to, splitting: c.splitting, comfortable: c.comfortable })
        .collect();
    let all_splitting = overlaps.iter().all(|o| o.splitting);
    let all_comfortable = overlaps.iter().all(|o| o.comfortable);
    if !(all_splitting && all_comfortable) {
        report.status = Status::Fail;
    }
    report.atlas = Some(AtlasReport { overlaps, all_splitting, all_comfortable });
    Ok(())
}

/// Human-readable rendering for stdout.
pub fn render_text(r: &ReportFile) -> String {
    let mut s = String::new();
    let status = match r.status {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Error => "ERROR",
    };
    let _ = writeln!(s, "task: {:?}  status: {status}", r.problem.task);
    if let Some(e) = &r.error {
        let _ = writeln!(s, "error [{}]: {}", e.kind, e.message);
    }
    if let Some(c) = &r.contact {
        let _ = writeln!(s, "nu_f = {}  tangential = {}  orders = [{}]", c.nu_f, c.tangential, c.orders.join(", "));
        if let (Some(d), Some(o)) = (c.dicritical, c.order) {
            let _ = writeln!(s, "order = {o}  dicritical = {d}");
        }
        if let Some(b) = &c.b_f {
            let _ = writeln!(s, "b_f = {b}");
        }
    }
    if let Some(sec) = &r.section {
        let _ = writeln!(s, "section {} (nu = {})", sec.kind, sec.nu);
        for (j, g) in sec.g_on_s.iter().enumerate() {
            let _ = writeln!(s, "  g{}|S = {g}", j + 1);
        }
        let _ = writeln!(s, "  h1|S = {}", sec.h1_on_s);
        for p in &sec.singular_points {
            let _ = writeln!(s, "  singular point ({})", p.join(", "));
        }
        for o in &sec.orbits {
            let _ = writeln!(s, "  singular orbit {} = 0", o.minpoly);
        }
    }
    for e in &r.residues {
        let chart = e.chart.map(|c| format!("chart {}  ", c + 1)).unwrap_or_default();
        let _ = writeln!(s, "  {chart}{:<24} {:<16} {} ({})", e.location, e.formula, e.value, e.provenance);
    }
    if let Some(t) = &r.residue_sum {
        let _ = writeln!(s, "sum of residues = {t}");
    }
    if let Some(i) = &r.index {
        let _ = writeln!(
            s,
            "{}: sum {} vs c1^(n-1) = {}  {}",
            i.geometry,
            i.exact_sum,
            i.expected,
            if i.pass { "equal" } else { "NOT EQUAL" }
        );
        let _ = writeln!(s, "zeros: {} of {} expected", i.zero_count, i.expected_zero_count);
        if let Some(e) = &i.euler {
            let _ = writeln!(s, "Euler count: {} = {}  {}", e.lhs, e.rhs, if e.pass { "ok" } else { "MISMATCH" });
        }
        for b in &i.sum_check {
            let _ = writeln!(
                s,
                "chart {} residue balance: {} + {} at infinity  {}",
                b.chart + 1,
                b.finite,
                b.at_infinity,
                if b.balanced { "ok" } else { "MISMATCH" }
            );
        }
        if let Some(b) = i.corollary81.weakly_attractive_bound {
            let _ = writeln!(s, "at most {b} weakly attractive points");
        }
    }
    if let Some(b) = &r.blowup {
        let _ = writeln!(
            s,
            "nu {} -> {}  tangential = {}  radial = {}  prediction {}",
            b.nu_downstairs,
            b.nu_upstairs,
            b.tangential,
            b.radial,
            if b.prediction_holds { "holds" } else { "FAILS" }
        );
        for c in &b.charts {
            let _ = writeln!(s, "  {}: ({}) / ({})", c.chart, c.numerators.join(", "), c.denominator);
        }
    }
    if let Some(a) = &r.atlas {
        for o in &a.overlaps {
            let _ = writeln!(
                s,
                "  E{} -> E{}: splitting {}  comfortable {}",
                o.from + 1,
                o.to + 1,
                o.splitting,
                o.comfortable
            );
        }
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusDiff {
    pub problem: PathBuf,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CorpusSummary {
    pub total: usize,
    pub diffs: Vec<CorpusDiff>,
}

impl CorpusSummary {
    pub fn all_green(&self) -> bool {
        self.diffs.is_empty()
    }
}

pub fn corpus_problems(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::CorpusMissing(format!("{}: {e}", dir.display())))?;
    let mut out: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.to_string_lossy().ends_with(".problem.json"))
        .collect();
    if out.is_empty() {
        return Err(Error::CorpusMissing(format!("no *.problem.json in {}", dir.display())));
    }
    out.sort();
    Ok(out)
}

pub fn expected_path(problem: &Path) -> PathBuf {
    let s = problem.to_string_lossy();
    PathBuf::from(format!("{}.expected.json", s.trim_end_matches(".problem.json")))
}

/// Byte-compares each problem's canonical report against its golden file.
/// With `bless`, golden files are rewritten instead.
pub fn run_corpus(dir: &Path, flags: &Flags, bless: bool) -> Result<CorpusSummary> {
    let problems = corpus_problems(dir)?;
    let mut summary = CorpusSummary { total: problems.len(), diffs: Vec::new() };
    for p in problems {
        let got = run_path(&p, flags).to_canonical_json();
        let golden = expected_path(&p);
        if bless {
            fs::write(&golden, &got).map_err(|e| Error::InvalidInput(format!("{}: {e}", golden.display())))?;
            continue;
        }
        match fs::read(&golden) {
            Err(_) => summary.diffs.push(CorpusDiff { problem: p, reason: "golden file missing".into() }),
            Ok(bytes) if bytes != got.as_bytes() => {
                let line = first_differing_line(&String::from_utf8_lossy(&bytes), &got);
                summary.diffs.push(CorpusDiff { problem: p, reason: format!("differs at line {line}") })
            }
            Ok(_) => {}
        }
    }
    Ok(summary)
}

fn first_differing_line(a: &str, b: &str) -> usize {
    a.lines()
        .zip(b.lines())
        .position(|(x, y)| x != y)
        .unwrap_or_else(|| a.lines().count().min(b.lines().count()))
        + 1
}
