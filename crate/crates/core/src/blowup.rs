//! Blow-ups of a point or of a coordinate subspace, and lifts of germs to
//! the exceptional divisor.
//!
//! Chart `r` (one per cutting coordinate) uses local variables
//! `u0, u1, ..., u_{n-1}`: `u0 = z_r` is the equation of the exceptional
//! divisor and the remaining `z_j` follow in increasing order, so that
//! `z_j = u0 * u_j` for the other cutting coordinates and `z_j = u_j` along
//! the center. A lifted component `w^j o f~` is a quotient of polynomials
//! with the common denominator `D = f^r(z(u)) / u0`, which is `1` on the
//! divisor; lifts are stored in that form.

use num_traits::{One, Zero};

use crate::algebra::{GaussianRational as GR, Monomial, PolySeries};
use crate::error::{Error, Result};
use crate::germ_analysis::{
    check_comfortable_pair, check_splitting_pair, contact_profile, default_work_trunc,
    dicritical_test, AdaptedChart, MapGerm,
};

#[derive(Clone, Debug, PartialEq)]
pub struct BlowupChart {
    pub nvars: usize,
    pub center_codim: usize,
    /// The cutting coordinate that becomes the divisor equation.
    pub index: usize,
    /// `z_j` as polynomials in the chart variables.
    pub back_map: Vec<PolySeries>,
}

impl BlowupChart {
    pub fn new(nvars: usize, center_codim: usize, index: usize) -> Result<Self> {
        if center_codim == 0 || center_codim > nvars || index >= center_codim {
            return Err(Error::InvalidInput(format!(
                "no chart {index} for a codimension {center_codim} center in dimension {nvars}"
            )));
        }
        let mut ch = BlowupChart { nvars, center_codim, index, back_map: Vec::new() };
        let u0 = PolySeries::var(nvars, 0);
        ch.back_map = (0..nvars)
            .map(|j| {
                if j == index {
                    u0.clone()
                } else if j < center_codim {
                    &u0 * &PolySeries::var(nvars, ch.local_var(j))
                } else {
                    PolySeries::var(nvars, ch.local_var(j))
                }
            })
            .collect();
        Ok(ch)
    }

    /// Chart variable carrying the original coordinate `j`.
    pub fn local_var(&self, j: usize) -> usize {
        if j == self.index {
            0
        } else if j < self.index {
            j + 1
        } else {
            j
        }
    }

    pub fn label(&self) -> String {
        format!("E{}", self.index + 1)
    }

    pub fn adapted_chart(&self) -> AdaptedChart {
        AdaptedChart { nvars: self.nvars, codim: 1, label: self.label() }
    }

    /// The normal direction (leftmost-normalized when attributed to this
    /// chart) and the base point on the center, of a point on the divisor.
    pub fn direction_of(&self, point: &[GR]) -> (Vec<GR>, Vec<GR>) {
        let m = self.center_codim;
        let dir = (0..m)
            .map(|j| if j == self.index { GR::one() } else { point[self.local_var(j)].clone() })
            .collect();
        let base = (m..self.nvars).map(|j| point[self.local_var(j)].clone()).collect();
        (dir, base)
    }

    /// Chart coordinates of a divisor point, for a direction whose
    /// component `index` is nonzero.
    pub fn point_of(&self, dir: &[GR], base: &[GR]) -> Result<Vec<GR>> {
        let lead = dir[self.index].inv().ok_or_else(|| {
            Error::InvalidInput("direction is not visible in this chart".into())
        })?;
        let mut pt = vec![GR::zero(); self.nvars];
        for (j, d) in dir.iter().enumerate() {
            if j != self.index {
                pt[self.local_var(j)] = d * &lead;
            }
        }
        for (k, b) in base.iter().enumerate() {
            pt[self.local_var(self.center_codim + k)] = b.clone();
        }
        Ok(pt)
    }

    /// Chart variables whose vanishing makes a divisor point belong to an
    /// earlier chart's normalization: the images of `z_j`, `j < index`.
    pub fn earlier_vars(&self) -> Vec<usize> {
        (0..self.index).map(|j| self.local_var(j)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiftChart {
    pub chart: BlowupChart,
    pub germ: MapGerm,
    /// `f(z(u))`, kept for consistency checks.
    pub pushed: Vec<PolySeries>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiftedGerm {
    pub source: MapGerm,
    pub center_codim: usize,
    pub charts: Vec<LiftChart>,
    pub nu_downstairs: u32,
    pub nu_upstairs: u32,
    pub tangential_upstairs: bool,
    /// The leading normal part is radial (dicritical, for a point center).
    pub radial: bool,
    pub predicted_nu: u32,
    pub predicted_tangential: bool,
}

impl LiftedGerm {
    pub fn prediction_holds(&self) -> bool {
        self.nu_upstairs == self.predicted_nu && self.tangential_upstairs == self.predicted_tangential
    }
}

/// Lift of a germ tangent to the identity at the origin.
pub fn blow_up_point(f0: &MapGerm) -> Result<LiftedGerm> {
    let n = f0.nvars();
    let test = dicritical_test(f0)?;
    if let Some(t) = f0.trunc_degree() {
        if t < test.order + 2 {
            return Err(Error::InsufficientTruncation(format!(
                "depth {t} is below order {} plus two",
                test.order
            )));
        }
    }
    let point = MapGerm::with_denominator(
        AdaptedChart::new(n, n, "O")?,
        f0.numerators().to_vec(),
        f0.denominator().clone(),
        f0.work_trunc(),
    )?;
    let (nu_up, tangential_up) =
        if test.dicritical { (test.order, false) } else { (test.order - 1, true) };
    lift(&point, test.order, test.dicritical, nu_up, tangential_up)
}

/// Lift along the center `{z1 = ... = zm = 0}`. The normal action must be
/// the identity; the leading normal part may vary along the center, and is
/// called radial only when it is radial at every point of it.
pub fn blow_up_linear_center(germ: &MapGerm, m: usize) -> Result<LiftedGerm> {
    let n = germ.nvars();
    if m == n {
        return blow_up_point(germ);
    }
    if m == 0 || m > n {
        return Err(Error::UnsupportedCenter(format!("codimension {m} in dimension {n}")));
    }
    let g = if germ.chart().codim == m {
        germ.clone()
    } else {
        MapGerm::with_denominator(
            AdaptedChart::new(n, m, "z")?,
            germ.numerators().to_vec(),
            germ.denominator().clone(),
            germ.work_trunc(),
        )?
    };
    let profile = contact_profile(&g)?;
    if profile.nu_f == 1 && !profile.tangential {
        return Err(Error::NormalActionNotIdentity(
            "order of contact is one and the germ is not tangential".into(),
        ));
    }
    let radial = !profile.tangential && normal_part_is_radial(&g, profile.nu_f);
    let (nu_up, tangential_up) = if profile.tangential || radial {
        (profile.nu_f, profile.tangential)
    } else {
        (profile.nu_f - 1, true)
    };
    lift(&g, profile.nu_f, radial, nu_up, tangential_up)
}

/// `v_r B^s == v_s B^r` identically, where `B^s` collects the terms of
/// `f^s - z^s` of degree `nu` in the cutting variables.
fn normal_part_is_radial(g: &MapGerm, nu: u32) -> bool {
    let m = g.chart().codim;
    let n = g.nvars();
    let b: Vec<PolySeries> = g
        .difference_numerators()
        .iter()
        .take(m)
        .map(|e| {
            PolySeries::from_terms(
                n,
                e.terms()
                    .filter(|(mono, _)| mono.partial_degree(&(0..m).collect::<Vec<_>>()) == nu)
                    .map(|(mono, c)| (mono.clone(), c.clone())),
            )
        })
        .collect();
    (0..m).all(|r| {
        (r + 1..m).all(|s| &PolySeries::var(n, r) * &b[s] == &PolySeries::var(n, s) * &b[r])
    })
}

fn lift(
    g: &MapGerm,
    nu_down: u32,
    radial: bool,
    predicted_nu: u32,
    predicted_tangential: bool,
) -> Result<LiftedGerm> {
    let n = g.nvars();
    let m = g.chart().codim;
    let comps = g.components()?;
    let mut charts = Vec::with_capacity(m);
    for r in 0..m {
        let chart = BlowupChart::new(n, m, r)?;
        let pushed = comps
            .iter()
            .map(|c| c.compose(&chart.back_map))
            .collect::<Result<Vec<_>>>()?;
        let den = pushed[r].div_var_power(0, 1)?;
        let mut nums = vec![PolySeries::zero(n); n];
        for j in 0..n {
            nums[chart.local_var(j)] = if j == r || j >= m {
                &pushed[j] * &den
            } else {
                pushed[j].div_var_power(0, 1)?
            };
        }
        let work = if nums.iter().all(PolySeries::is_exact) {
            default_work_trunc(&nums).max(g.work_trunc())
        } else {
            g.work_trunc()
        };
        let germ = MapGerm::with_denominator(chart.adapted_chart(), nums, den.clone(), work)
            .map_err(|e| e.in_chart(r + 1, None))?;
        if !germ.denominator_on_locus().map(|c| c.is_one()).unwrap_or(false) {
            return Err(Error::NormalActionNotIdentity(format!(
                "lift acts on the normal bundle of the divisor in chart {}",
                chart.label()
            )));
        }
        charts.push(LiftChart { chart, germ, pushed });
    }
    let profile = contact_profile(&charts[0].germ)?;
    Ok(LiftedGerm {
        source: g.clone(),
        center_codim: m,
        charts,
        nu_downstairs: nu_down,
        nu_upstairs: profile.nu_f,
        tangential_upstairs: profile.tangential,
        radial,
        predicted_nu,
        predicted_tangential,
    })
}

/// `pi o f~ == f o pi` on one chart, checked exactly on the rational form:
/// `N^r N^j == F^j D^2` for the other cutting coordinates and
/// `N^j == F^j D` otherwise, with `F = f o pi` recomputed from scratch.
pub fn conjugacy_holds(source: &MapGerm, lc: &LiftChart) -> Result<bool> {
    let n = source.nvars();
    let m = lc.chart.center_codim;
    let r = lc.chart.index;
    let comps = source.components()?;
    let nums = lc.germ.numerators();
    let d = lc.germ.denominator();
    let nr = &nums[0];
    for j in 0..n {
        let f = comps[j].compose(&lc.chart.back_map)?;
        let nj = &nums[lc.chart.local_var(j)];
        let ok = if j == r || j >= m {
            (nj - &(&f * d)).is_zero()
        } else {
            (&(nr * nj) - &(&f * &(d * d))).is_zero()
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The same identity on expanded jets: `back_map o f~ == f o back_map` to
/// depth `d`.
pub fn conjugacy_holds_to_depth(source: &MapGerm, lc: &LiftChart, d: u32) -> Result<bool> {
    let lifted: Vec<PolySeries> = lc
        .germ
        .clone()
        .with_work_trunc(d)
        .components()?
        .into_iter()
        .map(|c| c.with_trunc(d))
        .collect();
    let comps = source.components()?;
    for (j, b) in lc.chart.back_map.iter().enumerate() {
        let lhs = b.compose(&lifted)?;
        let rhs = comps[j].clone().with_trunc(d).compose(&lc.chart.back_map)?;
        if !(&lhs - &rhs).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Coordinate change from chart `r` to chart `s`, recentered at the point
/// `at` of the overlap (given in chart `r` coordinates on the divisor) and
/// expanded to depth `d`. Both ends are recentered so the change fixes the
/// origin and maps the divisor to itself.
pub fn overlap_transition(
    n: usize,
    m: usize,
    r: usize,
    s: usize,
    at: &[GR],
    d: u32,
) -> Result<Vec<PolySeries>> {
    let cr = BlowupChart::new(n, m, r)?;
    let cs = BlowupChart::new(n, m, s)?;
    if r == s {
        return Ok((0..n).map(|k| PolySeries::var(n, k)).collect());
    }
    if !at[0].is_zero() {
        return Err(Error::InvalidInput("overlap point must lie on the divisor".into()));
    }
    let ks = cr.local_var(s);
    if at[ks].is_zero() {
        return Err(Error::InvalidInput("point is not on the chart overlap".into()));
    }
    // u = at + x
    let u: Vec<PolySeries> = (0..n)
        .map(|k| &PolySeries::constant(n, at[k].clone()) + &PolySeries::var(n, k))
        .collect();
    let inv = u[ks].inv_unit(d)?;
    let mut v = vec![PolySeries::zero(n); n];
    for j in 0..n {
        let lv = cs.local_var(j);
        v[lv] = if j == s {
            &u[0] * &u[ks]
        } else if j == r {
            inv.clone()
        } else if j < m {
            (&u[cr.local_var(j)] * &inv).with_trunc(d)
        } else {
            u[cr.local_var(j)].clone()
        };
    }
    Ok(v.into_iter()
        .map(|c| {
            let c0 = c.constant_term();
            &c - &PolySeries::constant(n, c0)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapCheck {
    pub from: usize,
    pub to: usize,
    pub splitting: bool,
    pub comfortable: bool,
}

/// Runs both flatness checks on every ordered pair of charts, at the
/// overlap point whose coordinates are `1` in the transition direction and
/// `fill` elsewhere on the divisor.
pub fn check_blowup_atlas(n: usize, m: usize, fill: &GR, d: u32) -> Result<Vec<OverlapCheck>> {
    check_atlas_with(n, m, fill, d, |_, _, t| t)
}

/// As [`check_blowup_atlas`], with every transition passed through
/// `perturb(from, to, t)` first (negative controls).
pub fn check_atlas_with(
    n: usize,
    m: usize,
    fill: &GR,
    d: u32,
    perturb: impl Fn(usize, usize, Vec<PolySeries>) -> Vec<PolySeries>,
) -> Result<Vec<OverlapCheck>> {
    let chart = AdaptedChart::new(n, 1, "E")?;
    let mut out = Vec::new();
    for r in 0..m {
        for s in 0..m {
            if r == s {
                continue;
            }
            let cr = BlowupChart::new(n, m, r)?;
            let mut at = vec![fill.clone(); n];
            at[0] = GR::zero();
            at[cr.local_var(s)] = GR::one();
            let t = perturb(r, s, overlap_transition(n, m, r, s, &at, d)?);
            let splitting = check_splitting_pair(&chart, &chart, &t)?;
            let comfortable = splitting && check_comfortable_pair(&chart, &chart, &t)?;
            out.push(OverlapCheck { from: r, to: s, splitting, comfortable });
        }
    }
    Ok(out)
}

/// The monomial `u0^a u_k^b` in `n` variables.
pub fn chart_monomial(n: usize, a: u32, k: usize, b: u32) -> PolySeries {
    let mut e = vec![0; n];
    e[0] = a;
    e[k] += b;
    PolySeries::monomial(Monomial::new(e), GR::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;
    use crate::canonical_sections::{extract_section, singular_points, SectionKind};

    fn germ(n: usize, m: usize, c: &[&str]) -> MapGerm {
        MapGerm::from_strings(n, m, c).unwrap()
    }

    fn q(x: i64) -> GR {
        GR::from_int(x)
    }

    #[test]
    fn back_maps() {
        let c = BlowupChart::new(3, 3, 1).unwrap();
        let p = |s: &str| parse_poly(s, 3).unwrap();
        assert_eq!(c.back_map, vec![p("z1*z2"), p("z1"), p("z1*z3")]);
        let c = BlowupChart::new(3, 2, 1).unwrap();
        assert_eq!(c.back_map, vec![p("z1*z2"), p("z1"), p("z3")]);
        assert_eq!(c.direction_of(&[q(0), q(5), q(7)]), (vec![q(5), q(1)], vec![q(7)]));
        assert_eq!(c.point_of(&[q(5), q(1)], &[q(7)]).unwrap(), vec![q(0), q(5), q(7)]);
    }

    #[test]
    fn lift_of_quadratic_example() {
        let f0 = germ(2, 2, &["z1 + z1^2", "z2 + z2^2"]);
        let l = blow_up_point(&f0).unwrap();
        assert_eq!((l.nu_upstairs, l.tangential_upstairs), (1, true));
        assert!(l.prediction_holds());
        let c = &l.charts[0];
        assert!(conjugacy_holds(&f0, c).unwrap());
        assert!(conjugacy_holds_to_depth(&f0, c, 7).unwrap());
        // f~^2 = u2 + (u2^2 - u2) u1 / (1 + u1)
        let comps = c.germ.clone().with_work_trunc(6).components().unwrap();
        let p = |s: &str| parse_poly(s, 2).unwrap();
        let want = (&p("z2") + &(&p("z2^2*z1 - z2*z1") * &p("1 + z1").inv_unit(6).unwrap())).with_trunc(6);
        assert_eq!(comps[1], want);
        let s = extract_section(&c.germ, SectionKind::Xf).unwrap();
        let pts: Vec<GR> = singular_points(&s).unwrap().points.into_iter().map(|p| p.coords[1].clone()).collect();
        assert_eq!(pts, vec![q(0), q(1)]);
    }

    #[test]
    fn dicritical_lift_is_not_tangential() {
        let f0 = germ(2, 2, &["z1 + z1*(z1 + z2)", "z2 + z2*(z1 + z2)"]);
        let l = blow_up_point(&f0).unwrap();
        assert!(l.radial);
        assert_eq!((l.nu_upstairs, l.tangential_upstairs), (2, false));
        assert!(l.prediction_holds());
        assert!(l.charts.iter().all(|c| conjugacy_holds(&f0, c).unwrap()));
    }

    #[test]
    fn cubic_lift_drops_order() {
        let f0 = germ(2, 2, &["z1 + z2^3", "z2"]);
        let l = blow_up_point(&f0).unwrap();
        assert_eq!(l.nu_downstairs, 3);
        assert_eq!((l.nu_upstairs, l.tangential_upstairs), (2, true));
    }

    #[test]
    fn rejects_linear_and_shallow_jets() {
        assert!(matches!(blow_up_point(&germ(2, 2, &["2*z1", "z2"])), Err(Error::NotTangentToIdentity(_))));
        let p = |s: &str| parse_poly(s, 2).unwrap().with_trunc(3);
        let jet = MapGerm::new(AdaptedChart::new(2, 2, "z").unwrap(), vec![p("z1 + z1^2"), p("z2 + z2^2")]).unwrap();
        assert!(matches!(blow_up_point(&jet), Err(Error::InsufficientTruncation(_))));
    }

    #[test]
    fn linear_centers() {
        // tangential, nu = 2 along the z3-axis
        let f = germ(3, 2, &["z1 + z1^3", "z2 + z1*z2^2", "z3 + z1^2 + z2^2"]);
        let l = blow_up_linear_center(&f, 2).unwrap();
        assert_eq!((l.nu_downstairs, l.nu_upstairs, l.tangential_upstairs), (2, 2, true));
        assert!(l.charts.iter().all(|c| conjugacy_holds(&f, c).unwrap()));
        let bad = germ(3, 2, &["z1 + z1*z3", "z2", "z3"]);
        assert!(matches!(blow_up_linear_center(&bad, 2), Err(Error::NormalActionNotIdentity(_))));
        // non-tangential, not radial: order drops and the lift is tangential
        let f = germ(3, 2, &["z1 + z2^2", "z2", "z3 + z1^2"]);
        let l = blow_up_linear_center(&f, 2).unwrap();
        assert_eq!((l.nu_upstairs, l.tangential_upstairs), (1, true));
        assert!(l.prediction_holds());
        // radial normal part: the lift keeps the order and is not tangential
        let f = germ(3, 2, &["z1 + z1^2", "z2 + z1*z2", "z3"]);
        let l = blow_up_linear_center(&f, 2).unwrap();
        assert!(l.radial);
        assert_eq!((l.nu_upstairs, l.tangential_upstairs), (2, false));
        assert!(l.prediction_holds());
    }

    #[test]
    fn full_codimension_center_is_a_point() {
        let f0 = germ(2, 2, &["z1 + z1^2", "z2 + z2^2"]);
        assert_eq!(blow_up_linear_center(&f0, 2).unwrap(), blow_up_point(&f0).unwrap());
    }

    #[test]
    fn singular_points_match_directions() {
        use crate::canonical_sections::{singular_directions, DirectionMode};
        let f0 = germ(2, 2, &["z1 + z1^2", "z2 + z2^2"]);
        let dirs = singular_directions(&f0, &[], DirectionMode::NonTangential).unwrap();
        let l = blow_up_point(&f0).unwrap();
        let mut found = Vec::new();
        for c in &l.charts {
            let s = extract_section(&c.germ, SectionKind::Xf).unwrap();
            for p in singular_points(&s).unwrap().points {
                if c.chart.earlier_vars().iter().all(|&v| p.coords[v].is_zero()) {
                    found.push(c.chart.direction_of(&p.coords).0);
                }
            }
        }
        found.sort_by_key(|v| crate::canonical_sections::point_key(v));
        assert_eq!(found, dirs.directions);
    }

    #[test]
    fn standard_atlas_is_comfortable() {
        for (n, m) in [(2, 2), (3, 3), (3, 2)] {
            for c in check_blowup_atlas(n, m, &GR::from_ratio(1, 3), 6).unwrap() {
                assert!(c.splitting && c.comfortable, "{n} {m} {c:?}");
            }
        }
        let bent = check_atlas_with(2, 2, &q(0), 6, |_, _, mut t| {
            t[1] = &t[1] + &chart_monomial(2, 1, 1, 1);
            t
        })
        .unwrap();
        assert!(bent.iter().all(|c| !c.splitting));
        let curved = check_atlas_with(2, 2, &q(0), 6, |_, _, mut t| {
            t[0] = &t[0] + &chart_monomial(2, 2, 1, 0);
            t
        })
        .unwrap();
        assert!(curved.iter().all(|c| c.splitting && !c.comfortable));
    }
}
