//! Index-theorem verification on exceptional divisors.
//!
//! The topology side is a fixed table. Blowing up the origin of `C^n`
//! gives `E = P^(n-1)` with `N_E = O(-1)`, so `int_E c1(N_E)^(n-1)` is
//! `(-1)^(n-1)`. A section of `TE (x) N_E^(-nu)` has
//! `c_(n-1)(TE (x) O(nu)) = sum_i C(n, i) nu^(n-1-i)` zeros counted with
//! multiplicity, which is `chi(S) - nu c1(N_S)` on a curve. For a linear
//! center the same numbers apply fiberwise to `P^(m-1)`.

use std::str::FromStr;

use num_traits::Zero;
use rayon::prelude::*;

use crate::algebra::solve::{affine_zeros, AlgebraicZero};
use crate::algebra::{GaussianRational as GR, PolySeries};
use crate::blowup::{blow_up_point, BlowupChart, LiftedGerm};
use crate::canonical_sections::{
    extract_section, format_point, point_key, singular_points, SectionData, SectionKind,
    DEFAULT_SEARCH_HEIGHT,
};
use crate::error::{Error, Result};
use crate::germ_analysis::{AdaptedChart, MapGerm};
use crate::residues::{
    cs_curve_form, residue_cs_grothendieck, residue_cs_grothendieck_orbit, residue_cs_n2_smooth,
    residue_on_orbit, residue_sum_check, ChartForm, PointResidue, ProjectivePoint, ResidueFormula,
    ResidueValue, SumCheck, DEFAULT_PRECISION_CAP,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeometryKind {
    ExceptionalP1,
    ExceptionalPn,
    ExceptionalLinearCenter,
}

impl GeometryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GeometryKind::ExceptionalP1 => "exceptional_P1",
            GeometryKind::ExceptionalPn => "exceptional_Pn",
            GeometryKind::ExceptionalLinearCenter => "exceptional_linear_center",
        }
    }
}

impl FromStr for GeometryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exceptional_P1" => Ok(GeometryKind::ExceptionalP1),
            "exceptional_Pn" => Ok(GeometryKind::ExceptionalPn),
            "exceptional_linear_center" => Ok(GeometryKind::ExceptionalLinearCenter),
            other => Err(Error::UnsupportedGeometry(format!("no built-in geometry {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompactGeometry {
    pub kind: GeometryKind,
    pub nvars: usize,
    /// Codimension of the blown-up center; `nvars` for a point.
    pub center_codim: usize,
    /// `int c1([E])^(k)` over `E`, or over one fiber for a linear center.
    pub chern_number: i64,
    /// `chi(S)` and `c1(N_S)` when the (fiber of the) divisor is a curve.
    pub euler_char: Option<i64>,
    pub normal_c1: Option<i64>,
}

impl CompactGeometry {
    pub fn exceptional_p1() -> Self {
        CompactGeometry {
            kind: GeometryKind::ExceptionalP1,
            nvars: 2,
            center_codim: 2,
            chern_number: -1,
            euler_char: Some(2),
            normal_c1: Some(-1),
        }
    }

    pub fn exceptional_pn(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::UnsupportedGeometry(format!("blow-up of C^{n}")));
        }
        Ok(CompactGeometry {
            kind: GeometryKind::ExceptionalPn,
            nvars: n,
            center_codim: n,
            chern_number: sign(n - 1),
            euler_char: (n == 2).then_some(2),
            normal_c1: (n == 2).then_some(-1),
        })
    }

    pub fn exceptional_linear_center(n: usize, m: usize) -> Result<Self> {
        if m < 2 || m >= n {
            return Err(Error::UnsupportedGeometry(format!(
                "linear center of codimension {m} in C^{n}"
            )));
        }
        Ok(CompactGeometry {
            kind: GeometryKind::ExceptionalLinearCenter,
            nvars: n,
            center_codim: m,
            chern_number: sign(m - 1),
            euler_char: (m == 2).then_some(2),
            normal_c1: (m == 2).then_some(-1),
        })
    }

    pub fn from_kind(kind: GeometryKind, n: usize, m: Option<usize>) -> Result<Self> {
        match kind {
            GeometryKind::ExceptionalP1 if n == 2 => Ok(Self::exceptional_p1()),
            GeometryKind::ExceptionalP1 => {
                Err(Error::UnsupportedGeometry("exceptional_P1 lives in C^2".into()))
            }
            GeometryKind::ExceptionalPn => Self::exceptional_pn(n),
            GeometryKind::ExceptionalLinearCenter => Self::exceptional_linear_center(
                n,
                m.ok_or_else(|| Error::InvalidInput("linear center needs a codimension".into()))?,
            ),
        }
    }

    /// Dimension of the divisor's fiber `P^k`.
    fn fiber_dim(&self) -> usize {
        self.center_codim - 1
    }

    pub fn is_curve(&self) -> bool {
        self.euler_char.is_some()
    }

    /// Zeros of a section of `T P^k (x) O(nu)`, with multiplicity.
    pub fn expected_zero_count(&self, nu: u32) -> i64 {
        let k = self.fiber_dim() as i64;
        let nu = nu as i64;
        (0..=k).map(|i| binomial(k + 1, i) * nu.pow((k - i) as u32)).sum()
    }
}

fn sign(k: usize) -> i64 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn binomial(n: i64, k: i64) -> i64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndexPoint {
    /// 0-based blow-up chart that owns the point.
    pub chart: usize,
    /// Normalized normal direction, for a point with coordinates in `Q(i)`.
    pub direction: Option<Vec<GR>>,
    pub label: String,
    pub multiplicity: Option<u32>,
    pub residue: ResidueValue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerCheck {
    pub lhs: i64,
    pub rhs: i64,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flag {
    Consistent,
    Violated,
    NotApplicable,
}

impl Flag {
    pub fn as_str(self) -> &'static str {
        match self {
            Flag::Consistent => "consistent",
            Flag::Violated => "violated",
            Flag::NotApplicable => "not applicable",
        }
    }

    fn of(b: bool) -> Self {
        if b {
            Flag::Consistent
        } else {
            Flag::Violated
        }
    }
}

/// Sign conditions for a fixed compact curve, evaluated on computed data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corollary81Report {
    pub chi_minus_nu_c1: Option<i64>,
    /// `c1(N_S) != 0` forces `chi - nu c1 > 0`.
    pub positivity: Flag,
    /// `c1(N_S) > 0` forces a rational curve with `nu = 1`, `c1 = 1`.
    pub positive_normal_bundle: Flag,
    /// Upper bound on weakly attractive points (tangential germs).
    pub weakly_attractive_bound: Option<i64>,
    /// Distinct zeros do not exceed the bound.
    pub bound: Flag,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndexVerdict {
    pub geometry: CompactGeometry,
    pub nu: u32,
    pub tangential: bool,
    pub section_kind: SectionKind,
    pub per_point: Vec<IndexPoint>,
    pub exact_sum: GR,
    pub expected: GR,
    pub pass: bool,
    pub zero_count: i64,
    pub expected_zero_count: i64,
    /// The zero count matches the Chern number of the twisted tangent bundle.
    pub complete: bool,
    pub euler: Option<EulerCheck>,
    pub sum_check: Option<SumCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexOptions {
    pub precision_cap: usize,
    pub search_height: u32,
}

impl Default for IndexOptions {
    fn default() -> Self {
        IndexOptions { precision_cap: DEFAULT_PRECISION_CAP, search_height: DEFAULT_SEARCH_HEIGHT }
    }
}

pub fn verify_index_theorem(f0: &MapGerm, geometry: &CompactGeometry) -> Result<IndexVerdict> {
    verify_index_theorem_with(f0, geometry, &IndexOptions::default())
}

/// The section kind whose residues localize `c1^(n-1)` for this lift.
pub fn section_kind_for(lifted: &LiftedGerm) -> SectionKind {
    if lifted.tangential_upstairs {
        SectionKind::Xf
    } else if lifted.nu_upstairs > 1 {
        SectionKind::HSigma
    } else {
        SectionKind::H1Sigma
    }
}

enum Task<'a> {
    Point(&'a SectionData, Vec<GR>),
    Orbit(&'a SectionData, AlgebraicZero),
}

pub fn verify_index_theorem_with(
    f0: &MapGerm,
    geometry: &CompactGeometry,
    opts: &IndexOptions,
) -> Result<IndexVerdict> {
    if f0.nvars() != geometry.nvars {
        return Err(Error::UnsupportedGeometry(format!(
            "{} lives in C^{}, the map in C^{}",
            geometry.kind.as_str(),
            geometry.nvars,
            f0.nvars()
        )));
    }
    let germ = match geometry.kind {
        GeometryKind::ExceptionalLinearCenter => fiber_germ(f0, geometry.center_codim)?,
        _ => f0.clone(),
    };
    let lifted = blow_up_point(&germ)?;
    if geometry.kind == GeometryKind::ExceptionalLinearCenter {
        check_center_components(f0, geometry.center_codim, lifted.nu_upstairs)?;
    }
    let n = germ.nvars();
    let kind = section_kind_for(&lifted);

    let sections = lifted
        .charts
        .iter()
        .map(|lc| extract_section(&lc.germ, kind).map_err(|e| e.in_chart(lc.chart.index + 1, None)))
        .collect::<Result<Vec<_>>>()?;
    if sections.iter().all(|s| s.identically_zero) {
        return Err(Error::SectionIdenticallyZero);
    }

    let mut tasks: Vec<(usize, Task)> = Vec::new();
    let mut forms = Vec::new();
    let mut mults: Vec<Option<u32>> = Vec::new();
    for (lc, section) in lifted.charts.iter().zip(&sections) {
        let r = lc.chart.index;
        let ctx = |e: Error| e.in_chart(r + 1, None);
        let earlier = lc.chart.earlier_vars();
        if n == 2 {
            let locus = singular_points(section).map_err(ctx)?;
            for p in locus.points {
                if earlier.iter().all(|&v| p.coords[v].is_zero()) {
                    mults.push(p.multiplicity);
                    tasks.push((r, Task::Point(section, p.coords)));
                }
            }
            // orbit roots are nonzero, so they belong to the first chart
            if r == 0 {
                for o in locus.orbits {
                    mults.push(Some(o.multiplicity * o.minpoly.degree().unwrap_or(0) as u32));
                    tasks.push((r, Task::Orbit(section, o)));
                }
            }
            if let Some((num, den)) = cs_curve_form(section).map_err(ctx)? {
                forms.push(ChartForm { chart: r, num, den });
            }
        } else {
            let free: Vec<usize> = (1..n).filter(|v| !earlier.contains(v)).collect();
            let z = affine_zeros(&section.g_on_s, &free, &[], opts.search_height).map_err(ctx)?;
            for p in z.points {
                mults.push(Some(p.multiplicity));
                tasks.push((r, Task::Point(section, p.point)));
            }
            for o in z.orbits {
                mults.push(Some(o.multiplicity * o.minpoly.degree().unwrap_or(0) as u32));
                tasks.push((r, Task::Orbit(section, o)));
            }
        }
    }

    let cap = opts.precision_cap;
    let residues = tasks
        .par_iter()
        .map(|(r, task)| {
            let chart = &lifted.charts[*r].chart;
            match task {
                Task::Point(section, pt) => {
                    let v = if n == 2 {
                        residue_cs_n2_smooth(section, pt)
                    } else {
                        residue_cs_grothendieck(section, pt)
                    };
                    let v = v.map_err(|e| e.in_chart(r + 1, Some(format_point(pt))))?;
                    let (dir, _) = chart.direction_of(pt);
                    Ok((Some(dir), v))
                }
                Task::Orbit(section, o) => {
                    let v = if n == 2 {
                        residue_on_orbit(section, o, ResidueFormula::CsSmooth, cap)
                    } else {
                        residue_cs_grothendieck_orbit(section, o, cap)
                    };
                    Ok((None, v.map_err(|e| e.in_chart(r + 1, None))?))
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut per_point: Vec<IndexPoint> = tasks
        .iter()
        .zip(residues)
        .zip(&mults)
        .map(|(((r, task), (direction, residue)), mult)| {
            let label = match (&direction, task) {
                (Some(d), _) => homogeneous(d),
                (None, Task::Orbit(_, o)) => orbit_label(&lifted.charts[*r].chart, o),
                (None, Task::Point(..)) => unreachable!(),
            };
            IndexPoint { chart: *r, direction, label, multiplicity: *mult, residue }
        })
        .collect();
    per_point.sort_by(|a, b| {
        (a.chart, a.direction.is_none(), a.direction.as_deref().map(point_key), &a.label).cmp(&(
            b.chart,
            b.direction.is_none(),
            b.direction.as_deref().map(point_key),
            &b.label,
        ))
    });

    let exact_sum = per_point.iter().fold(GR::zero(), |acc, p| &acc + &p.residue.value);
    let expected = GR::from_int(geometry.chern_number);
    let nu = lifted.nu_upstairs;
    let zero_count: Option<i64> =
        per_point.iter().map(|p| p.multiplicity.map(|m| m as i64)).sum();
    let expected_zero_count = geometry.expected_zero_count(nu);
    let zero_count = zero_count.unwrap_or(-1);
    let euler = geometry.euler_char.map(|chi| {
        let rhs = chi - nu as i64 * geometry.normal_c1.unwrap_or(0);
        EulerCheck { lhs: zero_count, rhs, pass: zero_count == rhs }
    });
    let sum_check = if n == 2 && forms.len() == 2 {
        let values: Vec<PointResidue> = per_point
            .iter()
            .map(|p| PointResidue {
                point: match (&p.direction, &p.residue.location) {
                    (Some(d), _) => ProjectivePoint::Rational(d[0].clone(), d[1].clone()),
                    (None, crate::residues::Location::Orbit { minpoly, .. }) => {
                        ProjectivePoint::Orbit(minpoly.clone())
                    }
                    _ => unreachable!(),
                },
                value: p.residue.value.clone(),
            })
            .collect();
        Some(residue_sum_check(&values, &forms)?)
    } else {
        None
    };
    Ok(IndexVerdict {
        geometry: geometry.clone(),
        nu,
        tangential: lifted.tangential_upstairs,
        section_kind: kind,
        pass: exact_sum == expected,
        exact_sum,
        expected,
        complete: zero_count == expected_zero_count,
        zero_count,
        expected_zero_count,
        per_point,
        euler,
        sum_check,
    })
}

fn homogeneous(d: &[GR]) -> String {
    let parts: Vec<String> = d.iter().map(GR::to_poly_literal).collect();
    format!("[{}]", parts.join(":"))
}

fn orbit_label(chart: &BlowupChart, o: &AlgebraicZero) -> String {
    let t = format!("u{}", o.var);
    let coords: Vec<String> = (0..chart.center_codim)
        .map(|j| {
            if j == chart.index {
                "1".to_string()
            } else {
                let v = chart.local_var(j);
                if v == o.var {
                    t.clone()
                } else {
                    o.prefix[v].to_poly_literal()
                }
            }
        })
        .collect();
    format!("[{}], {} = 0", coords.join(":"), o.minpoly.display_in(&t))
}

/// The germ induced on the normal space of a linear center, when the
/// normal components do not depend on the point of the center.
fn fiber_germ(f: &MapGerm, m: usize) -> Result<MapGerm> {
    let n = f.nvars();
    if !f.has_unit_denominator() {
        return Err(Error::UnsupportedGeometry("linear centers need a polynomial map".into()));
    }
    let center: Vec<usize> = (m..n).collect();
    let map: Vec<usize> = (0..n).map(|j| if j < m { j } else { 0 }).collect();
    let comps = f.components()?;
    let mut normal = Vec::with_capacity(m);
    for (j, c) in comps.iter().take(m).enumerate() {
        if c.support_vars().iter().any(|v| *v >= m) {
            return Err(Error::UnsupportedGeometry(format!(
                "normal component {} varies along the center",
                j + 1
            )));
        }
        normal.push(c.set_zero(&center).rename_vars(m, &map));
    }
    MapGerm::new(AdaptedChart::new(m, m, "O")?, normal)
}

/// Center components must not reach the lifted section on the divisor.
fn check_center_components(f: &MapGerm, m: usize, nu_up: u32) -> Result<()> {
    let cut: Vec<usize> = (0..m).collect();
    for (j, e) in f.difference_numerators().iter().enumerate().skip(m) {
        if let Some(o) = e.ideal_order(&cut) {
            if o <= nu_up {
                return Err(Error::UnsupportedGeometry(format!(
                    "center component {} enters the section on the divisor",
                    j + 1
                )));
            }
        }
    }
    Ok(())
}

/// Zeros of the section on the divisor, with multiplicity, against
/// `chi(S) - nu c1(N_S)`.
pub fn euler_count_check(f0: &MapGerm, geometry: &CompactGeometry) -> Result<EulerCheck> {
    if !geometry.is_curve() {
        return Err(Error::UnsupportedGeometry(format!(
            "{} in C^{} is not a curve",
            geometry.kind.as_str(),
            geometry.nvars
        )));
    }
    let v = verify_index_theorem(f0, geometry)?;
    Ok(v.euler.expect("curve geometry"))
}

pub fn corollary81_report(verdict: &IndexVerdict) -> Corollary81Report {
    let g = &verdict.geometry;
    let (Some(chi), Some(c1)) = (g.euler_char, g.normal_c1) else {
        return Corollary81Report {
            chi_minus_nu_c1: None,
            positivity: Flag::NotApplicable,
            positive_normal_bundle: Flag::NotApplicable,
            weakly_attractive_bound: None,
            bound: Flag::NotApplicable,
        };
    };
    let d = chi - verdict.nu as i64 * c1;
    let positivity = if c1 != 0 { Flag::of(d > 0) } else { Flag::NotApplicable };
    let positive_normal_bundle =
        if c1 > 0 { Flag::of(chi == 2 && verdict.nu == 1 && c1 == 1) } else { Flag::NotApplicable };
    let weakly_attractive_bound = verdict.tangential.then_some(d);
    let distinct: i64 = verdict
        .per_point
        .iter()
        .map(|p| match &p.residue.location {
            crate::residues::Location::Orbit { minpoly, .. } => minpoly.degree().unwrap_or(0) as i64,
            _ => 1,
        })
        .sum();
    let bound = match weakly_attractive_bound {
        Some(b) => Flag::of(distinct <= b),
        None => Flag::NotApplicable,
    };
    Corollary81Report { chi_minus_nu_c1: Some(d), positivity, positive_normal_bundle, weakly_attractive_bound, bound }
}

/// Exact sum with one point left out; used as a sensitivity control.
pub fn sum_without(verdict: &IndexVerdict, skip: usize) -> GR {
    verdict
        .per_point
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != skip)
        .fold(GR::zero(), |acc, (_, p)| &acc + &p.residue.value)
}

/// Convenience for tests and the CLI: a germ at the origin of `C^n`.
pub fn point_germ(comps: &[&str]) -> Result<MapGerm> {
    let n = comps.len();
    let polys = comps
        .iter()
        .map(|c| crate::algebra::parse_poly(c, n))
        .collect::<Result<Vec<PolySeries>>>()?;
    MapGerm::new(AdaptedChart::new(n, n, "O")?, polys)
}
