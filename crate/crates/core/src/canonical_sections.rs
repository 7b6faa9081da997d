//! Canonical sections of germs fixing a hypersurface, their singular points,
//! the local action coefficients, and singular normal directions along
//! higher-codimension loci.
//!
//! In a codimension-one chart `f^j - z^j = (z1)^nu g^j` determines `g`
//! uniquely; everything else here is read off `g` and its restriction to
//! `S = {z1 = 0}`.

use num_traits::{One, Zero};

use crate::algebra::linalg::{self, Matrix};
use crate::algebra::solve::{affine_zeros, common_zeros, AlgebraicZero};
use crate::algebra::{GaussianRational as GR, Monomial, PolySeries};
use crate::error::{Error, Result};
use crate::germ_analysis::{check_transition, contact_profile, AdaptedChart, MapGerm};

/// Default height of the rational box scanned when a zero set has more
/// than one free coordinate.
pub const DEFAULT_SEARCH_HEIGHT: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SectionKind {
    /// All components of `g|_S`.
    Xf,
    /// Normal component dropped.
    HSigma,
    /// Normal component dropped, tangential ones scaled by `1 + b1`.
    H1Sigma,
}

impl SectionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SectionKind::Xf => "X_f",
            SectionKind::HSigma => "H_sigma",
            SectionKind::H1Sigma => "H1_sigma",
        }
    }
}

impl std::str::FromStr for SectionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X_f" | "Xf" => Ok(SectionKind::Xf),
            "H_sigma" => Ok(SectionKind::HSigma),
            "H1_sigma" => Ok(SectionKind::H1Sigma),
            _ => Err(Error::InvalidInput(format!("unknown section kind {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SectionData {
    pub kind: SectionKind,
    pub nu: u32,
    pub chart: AdaptedChart,
    /// `g^j`, expanded to the working depth when the germ has a denominator.
    pub g: Vec<PolySeries>,
    /// The section's components on `S`, after applying `kind`.
    pub g_on_s: Vec<PolySeries>,
    /// `g^1|_S`.
    pub b1: PolySeries,
    /// `h1 = (g^1 - b1) / z1`.
    pub h1: PolySeries,
    pub h1_on_s: PolySeries,
    pub tangential: bool,
    /// Every component of the section vanishes on `S`.
    pub identically_zero: bool,
    // Exact rational form g^j = numer^j / den, used for derivatives on S.
    numer: Vec<PolySeries>,
    den: PolySeries,
}

pub fn extract_section(germ: &MapGerm, kind: SectionKind) -> Result<SectionData> {
    let chart = germ.chart().clone();
    if chart.codim != 1 {
        return Err(Error::NotCodimensionOne(chart.codim));
    }
    let n = chart.nvars;
    let nu = contact_profile(germ)?.nu_f;
    if kind == SectionKind::H1Sigma && nu != 1 {
        return Err(Error::NuMismatch(nu));
    }
    let numer = germ
        .difference_numerators()
        .iter()
        .map(|e| e.div_var_power(0, nu))
        .collect::<Result<Vec<_>>>()?;
    let den = germ.denominator().clone();
    let cinv = germ.denominator_on_locus()?.inv().unwrap();
    let raw_on_s: Vec<PolySeries> = numer.iter().map(|q| q.set_zero(&[0]).scale(&cinv)).collect();
    let b1 = raw_on_s[0].clone();
    let h1_num = (&numer[0] - &(&b1 * &den)).div_var_power(0, 1)?;
    let h1_on_s = h1_num.set_zero(&[0]).scale(&cinv);
    let (g, h1) = if germ.has_unit_denominator() {
        (numer.clone(), h1_num)
    } else {
        let inv = den.inv_unit(germ.work_trunc())?;
        let g: Vec<PolySeries> = numer.iter().map(|q| (q * &inv).with_trunc(germ.work_trunc())).collect();
        let h1 = (&g[0] - &b1).div_var_power(0, 1)?;
        (g, h1)
    };
    let tangential = b1.is_zero();
    let g_on_s: Vec<PolySeries> = match kind {
        SectionKind::Xf => raw_on_s,
        SectionKind::HSigma => std::iter::once(PolySeries::zero(n))
            .chain(raw_on_s[1..].iter().cloned())
            .collect(),
        SectionKind::H1Sigma => {
            let unit = &PolySeries::one(n) + &b1;
            std::iter::once(PolySeries::zero(n))
                .chain(raw_on_s[1..].iter().map(|p| &unit * p))
                .collect()
        }
    };
    let identically_zero = g_on_s.iter().all(PolySeries::is_zero);
    Ok(SectionData {
        kind,
        nu,
        chart,
        g,
        g_on_s,
        b1,
        h1,
        h1_on_s,
        tangential,
        identically_zero,
        numer,
        den,
    })
}

impl SectionData {
    pub fn nvars(&self) -> usize {
        self.chart.nvars
    }

    /// Whether `f^j - z^j == (z1)^nu g^j` holds to the available depth.
    pub fn reconstructs(&self, germ: &MapGerm) -> Result<bool> {
        let n = self.nvars();
        let comps = germ.components()?;
        let z1nu = PolySeries::monomial(
            Monomial::new((0..n).map(|k| if k == 0 { self.nu } else { 0 }).collect()),
            GR::one(),
        );
        Ok(comps.iter().enumerate().all(|(j, c)| {
            let lhs = c - &PolySeries::var(n, j);
            let rhs = &z1nu * &self.g[j];
            let d = &lhs - &rhs;
            d.is_zero()
        }))
    }

    /// The tangential components on `S`.
    pub fn tangential_on_s(&self) -> &[PolySeries] {
        &self.g_on_s[1..]
    }

    /// `d g^p / d z^j` on `S` for a tangential component `p >= 1`.
    fn derivative_on_s(&self, p: usize, j: usize) -> Result<PolySeries> {
        let c = self.den.set_zero(&[0]).constant_term();
        let cinv = c.inv().ok_or(Error::DivisionByZero)?;
        if j > 0 {
            return Ok(self.numer[p].set_zero(&[0]).derive(j).scale(&cinv));
        }
        let dn = self.numer[p].derive(0).set_zero(&[0]);
        let dd = self.den.derive(0).set_zero(&[0]);
        let num = &dn.scale(&c) - &(&self.numer[p].set_zero(&[0]) * &dd);
        Ok(num.scale(&(&cinv * &cinv)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingularPoint {
    /// Coordinates in the chart, with `z1 = 0`.
    pub coords: Vec<GR>,
    /// Order of the zero when it is known: the exact order for curves, `1`
    /// for a nondegenerate zero in higher dimension.
    pub multiplicity: Option<u32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingularLocus {
    pub defining_system: Vec<PolySeries>,
    pub points: Vec<SingularPoint>,
    /// Zeros whose last coordinate is not in `Q(i)`.
    pub orbits: Vec<AlgebraicZero>,
    /// False when a box search was used.
    pub complete: bool,
}

impl SingularLocus {
    /// Total number of zeros counted with multiplicity, where known.
    pub fn count(&self) -> Option<u32> {
        let mut total = 0;
        for p in &self.points {
            total += p.multiplicity?;
        }
        for o in &self.orbits {
            total += o.multiplicity * o.minpoly.degree().unwrap_or(0) as u32;
        }
        Some(total)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PointSearch {
    /// Curves only: all zeros, exactly.
    Exact,
    /// Rational box of the given height on all but the last coordinate of `S`.
    Box { height: u32 },
    /// Check user-supplied points, given as coordinates on `S`.
    Verify(Vec<Vec<GR>>),
}

/// Zeros of the section: exact for `n = 2`, a default box search otherwise.
pub fn singular_points(section: &SectionData) -> Result<SingularLocus> {
    if section.nvars() == 2 {
        singular_points_with(section, &PointSearch::Exact)
    } else {
        singular_points_with(section, &PointSearch::Box { height: DEFAULT_SEARCH_HEIGHT })
    }
}

pub fn singular_points_with(section: &SectionData, search: &PointSearch) -> Result<SingularLocus> {
    let n = section.nvars();
    let system: Vec<PolySeries> = section.g_on_s.clone();
    if section.identically_zero {
        return Err(Error::SectionIdenticallyZero);
    }
    if system.iter().any(|p| !p.is_exact()) {
        return Err(Error::TruncationTooLowToSolve(
            "the section on the fixed locus is only known as a jet".into(),
        ));
    }
    let mut locus = SingularLocus {
        defining_system: system.clone(),
        points: Vec::new(),
        orbits: Vec::new(),
        complete: true,
    };
    match search {
        PointSearch::Exact => {
            if n != 2 {
                return Err(Error::InvalidInput(
                    "exact enumeration needs a one-dimensional fixed locus".into(),
                ));
            }
            let uni: Vec<_> = system.iter().map(|p| p.to_univariate(1).unwrap()).collect();
            let z = common_zeros(&uni).ok_or(Error::SectionIdenticallyZero)?;
            for (r, k) in z.roots {
                locus.points.push(SingularPoint { coords: vec![GR::zero(), r], multiplicity: Some(k) });
            }
            for (m, k) in z.orbits {
                locus.orbits.push(AlgebraicZero {
                    prefix: vec![GR::zero(); 2],
                    var: 1,
                    minpoly: m,
                    multiplicity: k,
                });
            }
        }
        PointSearch::Box { height } => {
            let free: Vec<usize> = (1..n).collect();
            let z = affine_zeros(&system, &free, &[], *height)?;
            locus.complete = z.complete;
            for p in z.points {
                let mult = if n == 2 { Some(p.multiplicity) } else { simple_zero(section, &p.point)? };
                locus.points.push(SingularPoint { coords: p.point, multiplicity: mult });
            }
            locus.orbits = z.orbits;
        }
        PointSearch::Verify(points) => {
            for p in points {
                if p.len() != n - 1 {
                    return Err(Error::InvalidInput(format!(
                        "point {:?} should have {} coordinates",
                        p,
                        n - 1
                    )));
                }
                let coords: Vec<GR> = std::iter::once(GR::zero()).chain(p.iter().cloned()).collect();
                for g in &system {
                    if !g.eval(&coords)?.is_zero() {
                        return Err(Error::NotCommonZero(format_point(&coords[1..])));
                    }
                }
                let mult = simple_zero(section, &coords)?;
                locus.points.push(SingularPoint { coords, multiplicity: mult });
            }
            locus.complete = false;
        }
    }
    locus.points.sort_by_key(|a| point_key(&a.coords));
    locus.points.dedup();
    Ok(locus)
}

fn simple_zero(section: &SectionData, pt: &[GR]) -> Result<Option<u32>> {
    let j = tangential_jacobian(section, pt)?;
    Ok((!j.is_zero()).then_some(1))
}

/// `det(d g^p / d z^q)|_S` over tangential `p, q`, at a point of `S`.
pub fn tangential_jacobian(section: &SectionData, pt: &[GR]) -> Result<GR> {
    let n = section.nvars();
    let mut m: Matrix = Vec::with_capacity(n - 1);
    for p in 1..n {
        let row = (1..n)
            .map(|q| section.g_on_s[p].derive(q).eval(pt))
            .collect::<Result<Vec<_>>>()?;
        m.push(row);
    }
    Ok(linalg::det(&m))
}

/// Sort key for points: lexicographic on (re, im) of each coordinate.
pub fn point_key(p: &[GR]) -> Vec<(num_rational::BigRational, num_rational::BigRational)> {
    p.iter().map(|x| (x.re().clone(), x.im().clone())).collect()
}

pub fn format_point(p: &[GR]) -> String {
    let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActionCoefficients {
    pub m_f: PolySeries,
    /// `v[k][j]` is the coefficient in row `k` (component) and column `j`
    /// (derivative direction).
    pub v: Vec<Vec<PolySeries>>,
}

impl ActionCoefficients {
    pub fn eval(&self, pt: &[GR]) -> Result<Matrix> {
        self.v
            .iter()
            .map(|row| row.iter().map(|e| e.eval(pt)).collect())
            .collect()
    }
}

pub fn action_coefficients(section: &SectionData) -> Result<ActionCoefficients> {
    let n = section.nvars();
    let m_f = -&section.h1_on_s;
    let mut v = vec![vec![PolySeries::zero(n); n]; n];
    v[0][0] = m_f.clone();
    for (p, row) in v.iter_mut().enumerate().skip(1) {
        for (j, e) in row.iter_mut().enumerate() {
            *e = -&section.derivative_on_s(p, j)?;
        }
    }
    Ok(ActionCoefficients { m_f, v })
}

/// Checks the transformation law of the canonical section under the
/// adapted coordinate change `zhat = T(z)`: the section of the conjugated
/// germ, pulled back by `T`, must match the pushforward of the original
/// one modulo the `nu`-th power of the ideal of `S`.
pub fn verify_chart_covariance(germ: &MapGerm, transition: &[PolySeries]) -> Result<bool> {
    let chart = germ.chart();
    if chart.codim != 1 {
        return Err(Error::NotCodimensionOne(chart.codim));
    }
    check_transition(chart, chart, transition)?;
    let d = germ.work_trunc().max(germ.trunc_degree().unwrap_or(0));
    let section = extract_section(germ, SectionKind::Xf)?;
    let conj = germ.conjugate(transition, d)?;
    let hat = extract_section(&conj, SectionKind::Xf)?;
    covariance_identity_holds(&section.g, &hat.g, transition, section.nu)
}

/// The identity `a^nu (ghat o T) == dT . g` modulo `(z1)^nu`, where `a` is
/// `T^1 / z1`, checked on every coefficient the jets determine.
pub fn covariance_identity_holds(
    g: &[PolySeries],
    ghat: &[PolySeries],
    transition: &[PolySeries],
    nu: u32,
) -> Result<bool> {
    let n = g.len();
    if ghat.len() != n || transition.len() != n {
        return Err(Error::InvalidInput("covariance data dimension mismatch".into()));
    }
    let a = transition[0].div_var_power(0, 1)?;
    let anu = a.pow(nu);
    for j in 0..n {
        let lhs = &anu * &ghat[j].compose(transition)?;
        let rhs = (0..n).fold(PolySeries::zero(n), |acc, h| {
            &acc + &(&transition[j].derive(h) * &g[h])
        });
        let diff = &lhs - &rhs;
        let known = diff.trunc_degree();
        for (m, c) in diff.terms() {
            let below = known.is_none_or(|t| m.degree() < t);
            if below && m.exps()[0] < nu && !c.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirectionMode {
    Tangential,
    NonTangential,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingularDirections {
    /// Every normal direction qualifies.
    pub all: bool,
    /// Homogeneous coordinates, leftmost nonzero entry equal to one.
    pub directions: Vec<Vec<GR>>,
    /// Directions with a non-rational last coordinate.
    pub orbits: Vec<AlgebraicZero>,
    pub complete: bool,
}

/// Singular normal directions of `germ` at the point `base` of `S`, given
/// by its coordinates along `S`. For a fixed point pass an empty `base`.
pub fn singular_directions(
    germ: &MapGerm,
    base: &[GR],
    mode: DirectionMode,
) -> Result<SingularDirections> {
    let chart = germ.chart();
    let (n, m) = (chart.nvars, chart.codim);
    if m < 2 {
        return Err(Error::UnsupportedCenter(
            "normal directions need codimension at least two".into(),
        ));
    }
    if base.len() != n - m {
        return Err(Error::InvalidInput(format!(
            "base point should have {} coordinates",
            n - m
        )));
    }
    if chart.is_point() {
        crate::germ_analysis::leading_part(germ)?;
    }
    let profile = contact_profile(germ)?;
    let want = if profile.tangential { DirectionMode::Tangential } else { DirectionMode::NonTangential };
    if mode != want {
        return Err(Error::HypothesesUnmet(format!(
            "germ is {}tangential",
            if profile.tangential { "" } else { "not " }
        )));
    }
    let nu = profile.nu_f;
    let e = germ.difference_numerators();
    let part = |k: usize, deg: u32| normal_part(&e[k], m, base, deg);
    let wedge = |y: &[PolySeries]| -> Vec<PolySeries> {
        let mut out = Vec::new();
        for r in 0..m {
            for s in r + 1..m {
                let vr = PolySeries::var(m, r);
                let vs = PolySeries::var(m, s);
                out.push(&(&vr * &y[s]) - &(&vs * &y[r]));
            }
        }
        out
    };
    let mut system = Vec::new();
    match mode {
        DirectionMode::NonTangential => {
            let b = (0..m).map(|s| part(s, nu)).collect::<Result<Vec<_>>>()?;
            system.extend(wedge(&b));
        }
        DirectionMode::Tangential => {
            for p in m..n {
                system.push(part(p, nu)?);
            }
            let y = (0..m).map(|s| part(s, nu + 1)).collect::<Result<Vec<_>>>()?;
            system.extend(wedge(&y));
        }
    }
    system.retain(|p| !p.is_zero());
    if system.is_empty() {
        return Ok(SingularDirections { all: true, directions: vec![], orbits: vec![], complete: true });
    }
    projective_zeros(&system, m, DEFAULT_SEARCH_HEIGHT).map(|(directions, orbits, complete)| {
        SingularDirections { all: false, directions, orbits, complete }
    })
}

/// Terms of `e` of degree exactly `deg` in the cutting variables, with the
/// tangential variables evaluated at `base`; a polynomial in `m` variables.
fn normal_part(e: &PolySeries, m: usize, base: &[GR], deg: u32) -> Result<PolySeries> {
    if let Some(t) = e.trunc_degree() {
        if base.iter().any(|x| !x.is_zero()) {
            return Err(Error::TruncationTooLowToSolve(
                "cannot evaluate a jet away from the origin".into(),
            ));
        }
        if deg >= t {
            return Err(Error::InsufficientTruncation(format!(
                "normal part of degree {deg} needs a jet deeper than {t}"
            )));
        }
    }
    let mut acc = PolySeries::zero(m);
    for (mono, c) in e.terms() {
        let ex = mono.exps();
        if ex[..m].iter().sum::<u32>() != deg {
            continue;
        }
        let mut coeff = c.clone();
        for (x, &k) in base.iter().zip(&ex[m..]) {
            if k > 0 {
                coeff = &coeff * &x.pow(k);
            }
        }
        acc = &acc + &PolySeries::monomial(Monomial::new(ex[..m].to_vec()), coeff);
    }
    Ok(acc)
}

type ProjectiveZeros = (Vec<Vec<GR>>, Vec<AlgebraicZero>, bool);

/// Zeros in projective space of a homogeneous system in `m` variables,
/// normalized so the leftmost nonzero coordinate is one.
pub fn projective_zeros(system: &[PolySeries], m: usize, height: u32) -> Result<ProjectiveZeros> {
    let mut points = Vec::new();
    let mut orbits = Vec::new();
    let mut complete = true;
    for k in 0..m {
        let mut fixed: Vec<(usize, GR)> = (0..k).map(|j| (j, GR::zero())).collect();
        fixed.push((k, GR::one()));
        let free: Vec<usize> = (k + 1..m).collect();
        let z = affine_zeros(system, &free, &fixed, height)?;
        complete &= z.complete;
        points.extend(z.points.into_iter().map(|p| p.point));
        orbits.extend(z.orbits);
    }
    points.sort_by_key(|a| point_key(a));
    points.dedup();
    Ok((points, orbits, complete))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;

    fn germ(n: usize, m: usize, c: &[&str]) -> MapGerm {
        MapGerm::from_strings(n, m, c).unwrap()
    }

    fn p2(s: &str) -> PolySeries {
        parse_poly(s, 2).unwrap()
    }

    fn q(x: i64) -> GR {
        GR::from_int(x)
    }

    #[test]
    fn section_by_division() {
        let f = germ(2, 1, &["z1 + z1^2*z2", "z2 + z1*z2"]);
        let s = extract_section(&f, SectionKind::Xf).unwrap();
        assert_eq!(s.nu, 1);
        assert_eq!(s.g, vec![p2("z1*z2"), p2("z2")]);
        assert!(s.b1.is_zero());
        assert_eq!(s.h1, p2("z2"));
        assert!(s.tangential);
        assert!(s.reconstructs(&f).unwrap());
    }

    #[test]
    fn h_sections() {
        let f = germ(2, 1, &["z1 + z1^2", "z2"]);
        let h = extract_section(&f, SectionKind::HSigma).unwrap();
        assert!(h.identically_zero);
        assert_eq!(singular_points(&h), Err(Error::SectionIdenticallyZero));
        let f = germ(2, 1, &["2*z1", "z2 + z1*z2"]);
        let h1 = extract_section(&f, SectionKind::H1Sigma).unwrap();
        assert_eq!(h1.g_on_s[1], p2("2*z2"));
        let f = germ(2, 1, &["z1 + z1^2", "z2 + z1^2"]);
        assert_eq!(extract_section(&f, SectionKind::H1Sigma), Err(Error::NuMismatch(2)));
        let f = germ(3, 2, &["z1 + z1^2", "z2", "z3"]);
        assert_eq!(extract_section(&f, SectionKind::Xf), Err(Error::NotCodimensionOne(2)));
    }

    #[test]
    fn singular_points_on_curves() {
        let f = germ(2, 1, &["z1", "z2 + z1*z2*(z2 - 1)"]);
        let l = singular_points(&extract_section(&f, SectionKind::Xf).unwrap()).unwrap();
        let pts: Vec<_> = l.points.iter().map(|p| (p.coords[1].clone(), p.multiplicity)).collect();
        assert_eq!(pts, vec![(q(0), Some(1)), (q(1), Some(1))]);
        let f = germ(2, 1, &["z1 + z1", "z2 + z1*z2"]);
        assert!(singular_points(&extract_section(&f, SectionKind::Xf).unwrap()).unwrap().points.is_empty());
        let f = germ(2, 1, &["z1", "z2 + z1*z2^2"]);
        let l = singular_points(&extract_section(&f, SectionKind::Xf).unwrap()).unwrap();
        assert_eq!(l.points, vec![SingularPoint { coords: vec![q(0), q(0)], multiplicity: Some(2) }]);
        assert_eq!(l.count(), Some(2));
    }

    #[test]
    fn algebraic_points_are_kept_as_orbits() {
        let f = germ(2, 1, &["z1", "z2 + z1*(z2^2 - 2)"]);
        let l = singular_points(&extract_section(&f, SectionKind::Xf).unwrap()).unwrap();
        assert!(l.points.is_empty());
        assert_eq!(l.orbits.len(), 1);
        assert_eq!(l.count(), Some(2));
    }

    #[test]
    fn points_in_higher_dimension() {
        let f = germ(3, 1, &["z1", "z2 + z1*z2*(z2 - 1)", "z3 + z1*z3*(z3 - 1)"]);
        let s = extract_section(&f, SectionKind::Xf).unwrap();
        let l = singular_points(&s).unwrap();
        assert_eq!(l.points.len(), 4);
        assert!(l.points.iter().all(|p| p.multiplicity == Some(1)));
        let v = singular_points_with(&s, &PointSearch::Verify(vec![vec![q(1), q(0)]])).unwrap();
        assert_eq!(v.points.len(), 1);
        let half = GR::from_ratio(1, 2);
        assert!(matches!(
            singular_points_with(&s, &PointSearch::Verify(vec![vec![half, q(0)]])),
            Err(Error::NotCommonZero(_))
        ));
    }

    #[test]
    fn action_coefficient_entries() {
        let f = germ(2, 1, &["z1 + z1^2*z2", "z2 + z1*z2*(z2 - 1)"]);
        let s = extract_section(&f, SectionKind::Xf).unwrap();
        let a = action_coefficients(&s).unwrap();
        assert_eq!(a.m_f, p2("-z2"));
        assert_eq!(a.v[0][1], PolySeries::zero(2));
        assert_eq!(a.v[1][1], p2("-2*z2 + 1"));
        let f = germ(2, 1, &["z1 + z1^2", "z2 + z1"]);
        let a = action_coefficients(&extract_section(&f, SectionKind::HSigma).unwrap()).unwrap();
        assert!(a.v[1][1].is_zero());
    }

    #[test]
    fn normal_derivative_uses_the_rational_form() {
        // g^2 = z2 (1 + z1) / (1 + z1 z2): d/dz1 on S is z2 - z2^2
        let chart = AdaptedChart::new(2, 1, "u").unwrap();
        let den = p2("1 + z1*z2");
        let n1 = &p2("z1") * &den;
        let n2 = &(&p2("z2") * &den) + &p2("z1*z2 + z1^2*z2");
        let f = MapGerm::with_denominator(chart, vec![n1 + p2("z1^2"), n2], den, 8).unwrap();
        let s = extract_section(&f, SectionKind::Xf).unwrap();
        let a = action_coefficients(&s).unwrap();
        assert_eq!(a.v[1][0], p2("-z2 + z2^2"));
    }

    #[test]
    fn covariance_under_chart_changes() {
        let f = germ(2, 1, &["z1 + z1^2*z2", "z2 + z1*z2"]);
        let id = vec![p2("z1"), p2("z2")];
        assert!(verify_chart_covariance(&f, &id).unwrap());
        let scale = vec![p2("2*z1"), p2("z2")];
        assert!(verify_chart_covariance(&f, &scale).unwrap());
        let mixed = vec![p2("z1 + z1*z2"), p2("z2 + z1 + z2^2")];
        assert!(verify_chart_covariance(&f, &mixed).unwrap());
        let bad = vec![p2("z1 + z2"), p2("z2")];
        assert!(matches!(verify_chart_covariance(&f, &bad), Err(Error::NotAdapted(_))));
    }

    #[test]
    fn corrupted_section_fails_covariance() {
        let f = germ(2, 1, &["z1 + z1^2", "z2 + z1*z2"]);
        let t = vec![p2("2*z1"), p2("z2")];
        let s = extract_section(&f, SectionKind::Xf).unwrap();
        let conj = f.conjugate(&t, 8).unwrap();
        let hat = extract_section(&conj, SectionKind::Xf).unwrap();
        assert!(covariance_identity_holds(&s.g, &hat.g, &t, s.nu).unwrap());
        let mut bad = hat.g.clone();
        bad[1] = &bad[1] + &p2("z2");
        assert!(!covariance_identity_holds(&s.g, &bad, &t, s.nu).unwrap());
    }

    #[test]
    fn characteristic_directions() {
        let f = germ(2, 2, &["z1 + z1^2", "z2 + z2^2"]);
        let d = singular_directions(&f, &[], DirectionMode::NonTangential).unwrap();
        assert_eq!(d.directions, vec![vec![q(0), q(1)], vec![q(1), q(0)], vec![q(1), q(1)]]);
        let dic = germ(2, 2, &["z1 + z1*(z1 + z2)", "z2 + z2*(z1 + z2)"]);
        assert!(singular_directions(&dic, &[], DirectionMode::NonTangential).unwrap().all);
        assert!(matches!(
            singular_directions(&germ(2, 2, &["2*z1", "z2"]), &[], DirectionMode::NonTangential),
            Err(Error::NotTangentToIdentity(_))
        ));
    }

    #[test]
    fn directions_along_a_curve_center() {
        // tangential, nu = 1: X(v) = (v1 + v2) z3-part, Y from z1 z2 terms
        let f = germ(3, 2, &["z1 + z1*z2", "z2 + z2^2", "z3 + z1 - z2"]);
        let d = singular_directions(&f, &[q(0)], DirectionMode::Tangential).unwrap();
        assert_eq!(d.directions, vec![vec![q(1), q(1)]]);
        assert!(matches!(
            singular_directions(&f, &[q(0)], DirectionMode::NonTangential),
            Err(Error::HypothesesUnmet(_))
        ));
    }

    #[test]
    fn y_condition_is_invariant_under_normal_gauge() {
        // Changing the cutting coordinates by terms that vanish to second
        // order along the center (identity normal part at the base point)
        // must not move the singular directions.
        let f = germ(3, 2, &["z1 + z1*z2 + z1^2*z3", "z2 + z2^2 + z1^2 - z1*z2", "z3 + z1 - z2"]);
        let before = singular_directions(&f, &[q(0)], DirectionMode::Tangential).unwrap();
        let p3 = |s: &str| parse_poly(s, 3).unwrap();
        let t = vec![p3("z1 + z1*z3 + z2^2"), p3("z2 + z1*z2 + z2*z3"), p3("z3 + z1*z2")];
        let g = f.conjugate(&t, 8).unwrap();
        let after = singular_directions(&g, &[q(0)], DirectionMode::Tangential).unwrap();
        assert_eq!(before, after);
        assert!(!before.directions.is_empty());
    }
}
