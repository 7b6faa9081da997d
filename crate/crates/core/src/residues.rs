//! Residues of canonical sections at isolated singular points.
//!
//! Sign and `2 pi i` factors are normalized once: on a curve the
//! Camacho-Sad residue is the `1/t` coefficient of `h1 / g2`, and at a
//! simple zero in higher dimension it is `h1^(n-1) / J`. The
//! Lehmann-Suwa and Baum-Bott residues are `(-1)^(n-1) phi(V) / J` with
//! `phi` evaluated on the plain elementary symmetric functions of `V`.

use num_traits::{One, Zero};

use crate::algebra::laurent::{laurent_residue, residue_at_infinity, residue_rational, LaurentSeries};
use crate::algebra::linalg::{self, Matrix};
use crate::algebra::solve::AlgebraicZero;
use crate::algebra::{GaussianRational as GR, PolySeries, UniPoly};
use crate::canonical_sections::{action_coefficients, format_point, tangential_jacobian, SectionData, SectionKind};
use crate::error::{Error, Result};
use crate::germ_analysis::MapGerm;

/// Per-root residues are computed in `Q(i)[x]/(s)` up to this degree of `s`.
pub const DEFAULT_PRECISION_CAP: usize = 8;

/// Laurent depth used when a residue is read off jets.
const JET_PRECISION: i64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ResidueFormula {
    CsSmooth,
    CsGrothendieck,
    CsSingularCurve,
    CsSingularCurveComfortable,
    LsPhi,
    BbPhi,
}

impl ResidueFormula {
    pub fn as_str(self) -> &'static str {
        match self {
            ResidueFormula::CsSmooth => "CS_smooth",
            ResidueFormula::CsGrothendieck => "CS_grothendieck",
            ResidueFormula::CsSingularCurve => "CS_sing_n2",
            ResidueFormula::CsSingularCurveComfortable => "CS_sing_n2_comfortable",
            ResidueFormula::LsPhi => "LS_phi",
            ResidueFormula::BbPhi => "BB_phi",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Location {
    Point(Vec<GR>),
    /// All zeros `x` of `minpoly` in variable `var`, other coordinates fixed.
    Orbit { var: usize, prefix: Vec<GR>, minpoly: UniPoly },
    /// One local branch through a point.
    Branch { point: Vec<GR>, index: usize },
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Location::Point(p) => write!(f, "{}", format_point(p)),
            Location::Orbit { var, minpoly, .. } => {
                write!(f, "roots of {}", minpoly.display_in(&format!("z{}", var + 1)))
            }
            Location::Branch { point, index } => write!(f, "{} branch {}", format_point(point), index),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Exact,
    /// Only the sum over a Galois orbit is available.
    OrbitAggregated,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidueValue {
    pub location: Location,
    pub formula: ResidueFormula,
    /// The residue, or its sum over the orbit.
    pub value: GR,
    /// For an orbit: the per-root residue as a polynomial in the root.
    pub per_root: Option<UniPoly>,
    pub provenance: Provenance,
}

impl ResidueValue {
    fn at(location: Location, formula: ResidueFormula, value: GR) -> Self {
        ResidueValue { location, formula, value, per_root: None, provenance: Provenance::Exact }
    }
}

/// A monomial `c1^a1 c2^a2 ...` in the Chern forms; `exps[j]` is the power
/// of `c_{j+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Phi {
    pub exps: Vec<u32>,
}

impl Phi {
    pub fn c1_pow(k: u32) -> Self {
        Phi { exps: vec![k] }
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().enumerate().map(|(j, a)| (j as u32 + 1) * a).sum()
    }

    /// `phi` on the elementary symmetric functions `e[0..]` (`e[0] = 1`).
    pub fn eval(&self, e: &[GR]) -> GR {
        let mut acc = GR::one();
        for (j, &a) in self.exps.iter().enumerate() {
            let ej = e.get(j + 1).cloned().unwrap_or_else(GR::zero);
            acc = &acc * &ej.pow(a);
        }
        acc
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.degree() as usize != n - 1 {
            return Err(Error::InvalidInput(format!(
                "symmetric polynomial has degree {}, expected {}",
                self.degree(),
                n - 1
            )));
        }
        Ok(())
    }
}

fn cs_hypotheses(section: &SectionData) -> Result<()> {
    if section.identically_zero {
        return Err(Error::SectionIdenticallyZero);
    }
    let ok = match section.kind {
        SectionKind::Xf => section.tangential,
        SectionKind::HSigma => section.tangential || section.nu > 1,
        SectionKind::H1Sigma => section.nu == 1,
    };
    if !ok {
        return Err(Error::HypothesesUnmet(format!(
            "{} section with nu = {} on a {}tangential germ",
            section.kind.as_str(),
            section.nu,
            if section.tangential { "" } else { "non-" }
        )));
    }
    Ok(())
}

fn ls_hypotheses(section: &SectionData) -> Result<()> {
    if !(section.tangential && section.nu > 1) {
        return Err(Error::HypothesesUnmet(
            "the variation residue needs a tangential germ with nu > 1".into(),
        ));
    }
    cs_hypotheses(section)
}

/// The curve integrand `num / den dz2` of a residue formula.
fn curve_integrand(section: &SectionData, formula: ResidueFormula) -> Result<(PolySeries, PolySeries)> {
    let den = section.g_on_s[1].clone();
    let num = match formula {
        ResidueFormula::CsSmooth => section.h1_on_s.clone(),
        ResidueFormula::LsPhi | ResidueFormula::BbPhi => {
            let v = action_coefficients(section)?;
            let trace = if formula == ResidueFormula::LsPhi {
                &v.v[0][0] + &v.v[1][1]
            } else {
                -&section.g_on_s[1].derive(1)
            };
            // (-1)^(n-1) e1(V) with n = 2
            -&trace
        }
        _ => unreachable!("not a curve formula"),
    };
    Ok((num, den))
}

fn univariate(p: &PolySeries) -> Result<UniPoly> {
    p.to_univariate(1)
        .ok_or_else(|| Error::InvalidInput(format!("{p} is not a function on the curve")))
}

fn curve_residue(
    section: &SectionData,
    point: &[GR],
    formula: ResidueFormula,
) -> Result<ResidueValue> {
    if section.nvars() != 2 {
        return Err(Error::InvalidInput("curve residues need n = 2".into()));
    }
    let (num, den) = curve_integrand(section, formula)?;
    if den.is_zero() && den.is_exact() {
        return Err(Error::ZeroDenominatorIdentically);
    }
    let value = if num.is_exact() && den.is_exact() {
        residue_rational(&univariate(&num)?, &univariate(&den)?, &point[1])?
    } else {
        if point.iter().any(|x| !x.is_zero()) {
            return Err(Error::TruncationTooLowToSolve(
                "jet residues are only available at the chart origin".into(),
            ));
        }
        let ns = LaurentSeries::from_poly_series(&num, 1, JET_PRECISION)?;
        let ds = LaurentSeries::from_poly_series(&den, 1, JET_PRECISION)?;
        if ds.is_zero() {
            return Err(Error::PoleAtInfinityOfTruncation(
                "denominator vanishes to the jet depth".into(),
            ));
        }
        laurent_residue(&ns, &ds).map_err(|e| match e {
            Error::InsufficientTruncation(m) => Error::PoleAtInfinityOfTruncation(m),
            e => e,
        })?
    };
    Ok(ResidueValue::at(Location::Point(point.to_vec()), formula, value))
}

/// Camacho-Sad residue at a point of a smooth curve: the `1/t` coefficient
/// of `h1 / g2` (for the `H1` section, `g2` already carries `1 + b1`).
pub fn residue_cs_n2_smooth(section: &SectionData, point: &[GR]) -> Result<ResidueValue> {
    cs_hypotheses(section)?;
    if section.kind == SectionKind::H1Sigma {
        let unit = &PolySeries::one(2) + &section.b1;
        if unit.eval(point)?.is_zero() {
            return Err(Error::HypothesesUnmet("1 + b1 vanishes at the point".into()));
        }
    }
    curve_residue(section, point, ResidueFormula::CsSmooth)
}

fn check_common_zero(section: &SectionData, point: &[GR]) -> Result<()> {
    for g in &section.g_on_s {
        if !g.eval(point)?.is_zero() {
            return Err(Error::NotCommonZero(format_point(&point[1..])));
        }
    }
    Ok(())
}

fn simple_zero_jacobian(section: &SectionData, point: &[GR]) -> Result<GR> {
    check_common_zero(section, point)?;
    let j = tangential_jacobian(section, point)?;
    if j.is_zero() {
        return Err(Error::DegenerateZero { jacobian: j.to_string() });
    }
    Ok(j)
}

/// Camacho-Sad residue at a nondegenerate zero: `h1^(n-1) / J`.
pub fn residue_cs_grothendieck(section: &SectionData, point: &[GR]) -> Result<ResidueValue> {
    cs_hypotheses(section)?;
    let n = section.nvars();
    let j = simple_zero_jacobian(section, point)?;
    let h = section.h1_on_s.eval(point)?;
    // for H1 the factor 1 + b1 is already inside g, hence inside J
    let num = h.pow(n as u32 - 1);
    Ok(ResidueValue::at(Location::Point(point.to_vec()), ResidueFormula::CsGrothendieck, &num / &j))
}

fn phi_residue(
    section: &SectionData,
    point: &[GR],
    phi: &Phi,
    formula: ResidueFormula,
) -> Result<ResidueValue> {
    let n = section.nvars();
    phi.check(n)?;
    if n == 2 {
        return curve_residue(section, point, formula);
    }
    let j = simple_zero_jacobian(section, point)?;
    let v: Matrix = match formula {
        ResidueFormula::LsPhi => action_coefficients(section)?.eval(point)?,
        _ => (1..n)
            .map(|p| {
                (1..n)
                    .map(|q| section.g_on_s[p].derive(q).eval(point).map(|x| -x))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let e = linalg::elementary_symmetric(&v);
    let mut val = &phi.eval(&e) / &j;
    if n.is_multiple_of(2) {
        val = -val;
    }
    Ok(ResidueValue::at(Location::Point(point.to_vec()), formula, val))
}

/// Lehmann-Suwa residue for the action `V` on the full tangent bundle.
pub fn residue_ls_phi(section: &SectionData, point: &[GR], phi: &Phi) -> Result<ResidueValue> {
    ls_hypotheses(section)?;
    phi_residue(section, point, phi, ResidueFormula::LsPhi)
}

/// Baum-Bott residue for the tangential block of `V`.
pub fn residue_bb_phi(section: &SectionData, point: &[GR], phi: &Phi) -> Result<ResidueValue> {
    cs_hypotheses(section)?;
    phi_residue(section, point, phi, ResidueFormula::BbPhi)
}

/// Residue over every root of an algebraic orbit on a curve. The orbit sum
/// is always exact; per-root values in `Q(i)[x]/(s)` are added when the
/// minimal polynomial has degree at most `cap`.
pub fn residue_on_orbit(
    section: &SectionData,
    orbit: &AlgebraicZero,
    formula: ResidueFormula,
    cap: usize,
) -> Result<ResidueValue> {
    match formula {
        ResidueFormula::CsSmooth => cs_hypotheses(section)?,
        ResidueFormula::LsPhi => ls_hypotheses(section)?,
        ResidueFormula::BbPhi => cs_hypotheses(section)?,
        _ => return Err(Error::InvalidInput("orbit residues are computed on curves".into())),
    }
    if section.nvars() != 2 {
        return Err(Error::InvalidInput("orbit residues are computed on curves".into()));
    }
    let (num, den) = curve_integrand(section, formula)?;
    let (num, den) = (univariate(&num)?, univariate(&den)?);
    let s = &orbit.minpoly;
    let (sum, per_root) = orbit_residue(&num, &den, s, orbit.multiplicity, cap)?;
    Ok(ResidueValue {
        location: Location::Orbit { var: orbit.var, prefix: orbit.prefix.clone(), minpoly: s.clone() },
        formula,
        value: sum,
        provenance: if per_root.is_some() { Provenance::Exact } else { Provenance::OrbitAggregated },
        per_root,
    })
}

/// Sum over the roots `x` of the squarefree `s` (each a pole of order `k`)
/// of `Res_x num/den`, and the per-root residue as a polynomial in `x`
/// when `deg s <= cap`.
pub fn orbit_residue(
    num: &UniPoly,
    den: &UniPoly,
    s: &UniPoly,
    k: u32,
    cap: usize,
) -> Result<(GR, Option<UniPoly>)> {
    let s = s.monic();
    let sk = s.pow(k);
    let (r, rem) = den.divrem(&sk);
    if !rem.is_zero() || r.rem(&s).is_zero() {
        return Err(Error::InvalidInput("orbit is not a pole of the stated order".into()));
    }
    let rinv = r.inv_mod(&sk).ok_or(Error::DivisionByZero)?;
    let t = num.mul_mod(&rinv, &sk);
    let nk = sk.degree().unwrap();
    let sum = &t.coeff(nk - 1) / &sk.lc();
    if s.degree().unwrap() > cap {
        return Ok((sum, None));
    }
    let per_root = per_root_residue(num, den, &s, k as usize)?;
    if trace(&per_root, &s) != sum {
        return Err(Error::InvalidInput("orbit residue fails its trace check".into()));
    }
    Ok((sum, Some(per_root)))
}

/// `Res_x num/den` at a root `x` of `s` of exact order `k`, in `Q(i)[x]/(s)`.
fn per_root_residue(num: &UniPoly, den: &UniPoly, s: &UniPoly, k: usize) -> Result<UniPoly> {
    // Taylor coefficients at the generic root: p^(j)(x) / j! mod s
    let taylor = |p: &UniPoly, upto: usize| -> Vec<UniPoly> {
        let mut out = Vec::with_capacity(upto);
        let mut d = p.clone();
        let mut fact = GR::one();
        for j in 0..upto {
            if j > 0 {
                d = d.derivative();
                fact = &fact * &GR::from_int(j as i64);
            }
            out.push(d.scale(&fact.inv().unwrap()).rem(s));
        }
        out
    };
    let a = taylor(num, k);
    let b = taylor(den, 2 * k);
    if b[..k].iter().any(|c| !c.is_zero()) {
        return Err(Error::InvalidInput("orbit is not a pole of the stated order".into()));
    }
    let lead_inv = b[k].inv_mod(s).ok_or(Error::DivisionByZero)?;
    let mut c: Vec<UniPoly> = Vec::with_capacity(k);
    for j in 0..k {
        let mut acc = a[j].clone();
        for i in 1..=j {
            acc = &acc - &b[k + i].mul_mod(&c[j - i], s);
        }
        c.push(acc.mul_mod(&lead_inv, s));
    }
    Ok(c.pop().unwrap())
}

/// `sum over roots x of s` of `r(x)`, from the Newton identities.
pub fn trace(r: &UniPoly, s: &UniPoly) -> GR {
    let s = s.monic();
    let d = s.degree().unwrap();
    let c = |j: usize| s.coeff(j);
    let mut p: Vec<GR> = vec![GR::from_int(d as i64)];
    for j in 1..d {
        let mut acc = &GR::from_int(j as i64) * &c(d - j);
        for i in 1..j {
            acc += &(&c(d - i) * &p[j - i]);
        }
        p.push(-acc);
    }
    r.rem(&s)
        .coeffs()
        .iter()
        .zip(&p)
        .fold(GR::zero(), |acc, (a, b)| &acc + &(a * b))
}

/// Camacho-Sad residues over an orbit of simple zeros in dimension `n >= 3`,
/// via `h1^(n-1) / J` in `Q(i)[x]/(s)`.
pub fn residue_cs_grothendieck_orbit(
    section: &SectionData,
    orbit: &AlgebraicZero,
    cap: usize,
) -> Result<ResidueValue> {
    cs_hypotheses(section)?;
    let n = section.nvars();
    if orbit.multiplicity != 1 {
        return Err(Error::DegenerateZero { jacobian: "0 on the orbit".into() });
    }
    let s = orbit.minpoly.monic();
    let fix = |p: &PolySeries| -> Result<UniPoly> {
        let mut q = p.clone();
        for v in 0..n {
            if v != orbit.var {
                q = q.substitute_constant(v, &orbit.prefix[v])?;
            }
        }
        Ok(q.to_univariate(orbit.var).expect("one variable left").rem(&s))
    };
    for g in &section.g_on_s {
        if !fix(g)?.is_zero() {
            return Err(Error::NotCommonZero(format!("roots of {}", s.display_in("x"))));
        }
    }
    let jac: Vec<Vec<PolySeries>> = (1..n)
        .map(|p| (1..n).map(|q| section.g_on_s[p].derive(q)).collect())
        .collect();
    let j = fix(&linalg::det_poly(&jac))?;
    let jinv = j
        .inv_mod(&s)
        .ok_or_else(|| Error::DegenerateZero { jacobian: "not invertible on the orbit".into() })?;
    let per_root = fix(&section.h1_on_s.pow(n as u32 - 1))?.mul_mod(&jinv, &s);
    let value = trace(&per_root, &s);
    let aggregated = s.degree().unwrap_or(0) > cap;
    Ok(ResidueValue {
        location: Location::Orbit { var: orbit.var, prefix: orbit.prefix.clone(), minpoly: s },
        formula: ResidueFormula::CsGrothendieck,
        value,
        per_root: (!aggregated).then_some(per_root),
        provenance: if aggregated { Provenance::OrbitAggregated } else { Provenance::Exact },
    })
}

/// The Camacho-Sad integrand `h1 / g2` of a curve section as a rational
/// function of the coordinate on `S`, when the data are exact.
pub fn cs_curve_form(section: &SectionData) -> Result<Option<(UniPoly, UniPoly)>> {
    if section.nvars() != 2 {
        return Err(Error::InvalidInput("curve forms need n = 2".into()));
    }
    let (num, den) = curve_integrand(section, ResidueFormula::CsSmooth)?;
    if !(num.is_exact() && den.is_exact()) {
        return Ok(None);
    }
    Ok(Some((univariate(&num)?, univariate(&den)?)))
}

/// A local branch `t -> w(t)` of a plane curve through a point.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchParametrization {
    /// Polynomials or jets in one variable.
    pub components: Vec<PolySeries>,
    pub multiplicity: u32,
}

impl BranchParametrization {
    pub fn new(components: Vec<PolySeries>) -> Result<Self> {
        if components.iter().any(|c| c.nvars() != 1) {
            return Err(Error::InvalidInput("branch components must be univariate".into()));
        }
        let mut g = 0u32;
        let mut mult = u32::MAX;
        for c in &components {
            for (m, v) in c.terms() {
                let e = m.exps()[0];
                if e > 0 && !v.is_zero() {
                    g = gcd(g, e);
                    mult = mult.min(e);
                }
            }
        }
        if g == 0 {
            return Err(Error::InvalidInput("branch is constant".into()));
        }
        if g > 1 {
            return Err(Error::InvalidInput(format!(
                "branch is a substitution t -> t^{g} of a smaller one"
            )));
        }
        Ok(BranchParametrization { components, multiplicity: mult })
    }

    pub fn center(&self) -> Vec<GR> {
        self.components.iter().map(PolySeries::constant_term).collect()
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Largest `k` with `ell^k | e`, up to `cap`.
fn ell_order(e: &PolySeries, ell: &PolySeries, cap: u32) -> (u32, PolySeries) {
    let mut q = e.clone();
    let mut k = 0;
    while k < cap && !q.is_zero() {
        match q.divide_exact(ell) {
            Ok(next) => {
                q = next;
                k += 1;
            }
            Err(_) => break,
        }
    }
    (if q.is_zero() { cap } else { k }, q)
}

fn on_branch(p: &PolySeries, branch: &BranchParametrization, prec: i64) -> Result<LaurentSeries> {
    LaurentSeries::from_poly_series(&p.compose(&branch.components)?, 0, prec)
}

/// Camacho-Sad residue along one branch of a possibly singular plane curve
/// `{ell = 0}`: the `1/t` coefficient of the integrand
/// `((ell o f - ell) - b1 ell^nu) / (ell (aux o f - aux)) d(aux)` pulled back
/// to the branch, or its comfortable variant with `ell o f` in place of
/// `ell` when `nu = 1`. When `b1` is not constant it is taken constant along
/// the levels of `ell` in the coordinates `(ell, aux)`.
pub fn residue_cs_singular_curve(
    germ: &MapGerm,
    ell: &PolySeries,
    aux: &PolySeries,
    branch: &BranchParametrization,
    formula: ResidueFormula,
) -> Result<ResidueValue> {
    let n = germ.nvars();
    if n != 2 || branch.components.len() != 2 {
        return Err(Error::InvalidInput("singular-curve residues need n = 2".into()));
    }
    if !germ.numerators().iter().all(PolySeries::is_exact) || !ell.is_exact() || !aux.is_exact() {
        return Err(Error::TruncationTooLowToSolve(
            "curve residues need exact germ, curve and auxiliary function".into(),
        ));
    }
    let prec = branch
        .components
        .iter()
        .filter_map(PolySeries::trunc_degree)
        .min()
        .map_or(JET_PRECISION, |d| d as i64 + 1);
    let on_curve = ell.compose(&branch.components)?;
    if !on_curve.is_zero() {
        return Err(Error::BranchNotOnCurve(format!("ell on the branch is {on_curve}")));
    }
    let p0 = branch.center();
    const CAP: u32 = 32;
    let nu = germ
        .difference_numerators()
        .iter()
        .map(|e| ell_order(e, ell, CAP).0)
        .min()
        .unwrap();
    if nu == 0 || nu == CAP {
        return Err(Error::DoesNotFixLocus("germ does not fix the curve to finite order".into()));
    }
    let a_num = germ.pullback_difference(ell)?;
    let (ord_a, _) = ell_order(&a_num, ell, CAP);
    let tangential = ord_a > nu;
    match formula {
        ResidueFormula::CsSingularCurve if !(tangential || nu > 1) => {
            return Err(Error::HypothesesUnmet(
                "nu = 1 on a non-tangential germ needs the comfortable formula".into(),
            ))
        }
        ResidueFormula::CsSingularCurveComfortable if nu != 1 => return Err(Error::NuMismatch(nu)),
        ResidueFormula::CsSingularCurve | ResidueFormula::CsSingularCurveComfortable => {}
        _ => return Err(Error::InvalidInput("not a singular-curve formula".into())),
    }
    let d = germ.denominator();
    let da = d.pow(ell.degree().unwrap_or(0));
    let db = d.pow(aux.degree().unwrap_or(0));
    let q = a_num.divide_exact(&ell.pow(nu))?;
    let g = germ.pullback_difference(aux)?.divide_exact(&ell.pow(nu))?;
    let b1 = &q.eval(&p0)? / &da.eval(&p0)?;
    // h1 / g2 = (h / D^a) / (g / D^b)
    let (mut num, mut den) = match (&q - &da.scale(&b1)).divide_exact(ell) {
        Ok(h) => (
            &on_branch(&h, branch, prec)? * &on_branch(&db, branch, prec)?,
            &on_branch(&g, branch, prec)? * &on_branch(&da, branch, prec)?,
        ),
        Err(_) => {
            // b1 varies along the curve: it is extended constantly along
            // the levels of ell, so h1 on S is the derivative of Q/D^a along
            // the field V with V(ell) = 1, V(aux) = 0
            let jac = &(&ell.derive(0) * &aux.derive(1)) - &(&ell.derive(1) * &aux.derive(0));
            let dq = |v: usize| &(&q.derive(v) * &da) - &(&q * &da.derive(v));
            let v_num = &(&aux.derive(1) * &dq(0)) - &(&aux.derive(0) * &dq(1));
            let jac_b = on_branch(&jac, branch, prec)?;
            if jac_b.is_zero() {
                return Err(Error::InvalidInput("d(ell) and d(aux) are dependent along the branch".into()));
            }
            (
                &on_branch(&v_num, branch, prec)? * &on_branch(&db, branch, prec)?,
                &(&jac_b * &on_branch(&g, branch, prec)?) * &on_branch(&da.pow(2), branch, prec)?,
            )
        }
    };
    if formula == ResidueFormula::CsSingularCurveComfortable {
        // 1 + b1 = (D^a + q) / D^a along the curve
        num = &num * &on_branch(&da, branch, prec)?;
        den = &den * &on_branch(&(&da + &q), branch, prec)?;
    }
    let daux = on_branch(aux, branch, prec)?.derivative();
    let value = laurent_residue(&(&num * &daux), &den)?;
    Ok(ResidueValue::at(Location::Branch { point: p0, index: 0 }, formula, value))
}

/// A point of `P^1`: either `[a : b]` or the roots `[1 : t]` of a minimal
/// polynomial.
#[derive(Clone, Debug, PartialEq)]
pub enum ProjectivePoint {
    Rational(GR, GR),
    Orbit(UniPoly),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointResidue {
    pub point: ProjectivePoint,
    pub value: GR,
}

/// A rational 1-form `num/den dt` in chart 0 (`[1 : t]`) or chart 1
/// (`[t : 1]`) of `P^1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartForm {
    pub chart: usize,
    pub num: UniPoly,
    pub den: UniPoly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChartBalance {
    pub chart: usize,
    pub finite: GR,
    pub at_infinity: GR,
    pub balanced: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SumCheck {
    pub total: GR,
    pub charts: Vec<ChartBalance>,
    pub consistent: bool,
}

/// For each chart form, the residues at the points visible in that chart
/// plus the form's residue at infinity must vanish. The total is the sum of
/// all per-point values.
pub fn residue_sum_check(values: &[PointResidue], forms: &[ChartForm]) -> Result<SumCheck> {
    for c in 0..2 {
        if !forms.iter().any(|f| f.chart == c) {
            return Err(Error::ChartCoverIncomplete(format!("no form for chart {c} of P^1")));
        }
    }
    let total = values.iter().fold(GR::zero(), |acc, v| &acc + &v.value);
    let mut charts = Vec::new();
    for f in forms {
        if f.chart > 1 {
            return Err(Error::InvalidInput(format!("P^1 has no chart {}", f.chart)));
        }
        let visible = |p: &ProjectivePoint| match p {
            ProjectivePoint::Rational(a, b) => !(if f.chart == 0 { a } else { b }).is_zero(),
            ProjectivePoint::Orbit(_) => true,
        };
        let finite = values
            .iter()
            .filter(|v| visible(&v.point))
            .fold(GR::zero(), |acc, v| &acc + &v.value);
        let at_infinity = residue_at_infinity(&f.num, &f.den)?;
        let balanced = (&finite + &at_infinity).is_zero();
        charts.push(ChartBalance { chart: f.chart, finite, at_infinity, balanced });
    }
    let consistent = charts.iter().all(|c| c.balanced);
    Ok(SumCheck { total, charts, consistent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;
    use crate::canonical_sections::extract_section;

    fn q(x: i64) -> GR {
        GR::from_int(x)
    }

    fn section(n: usize, c: &[&str], kind: SectionKind) -> SectionData {
        extract_section(&MapGerm::from_strings(n, 1, c).unwrap(), kind).unwrap()
    }

    #[test]
    fn smooth_curve_residues() {
        // h1 = 1, g2 = z2 (z2 - 1)
        let s = section(2, &["z1 + z1^2", "z2 + z1*z2*(z2 - 1)"], SectionKind::HSigma);
        assert_eq!(residue_cs_n2_smooth(&s, &[q(0), q(0)]).unwrap().value, q(-1));
        assert_eq!(residue_cs_n2_smooth(&s, &[q(0), q(1)]).unwrap().value, q(1));
        let s = section(2, &["z1 + z1^2*z2", "z2 + z1*z2"], SectionKind::Xf);
        assert_eq!(residue_cs_n2_smooth(&s, &[q(0), q(0)]).unwrap().value, q(0));
        let z = section(2, &["z1 + z1^2*z2", "z2"], SectionKind::HSigma);
        assert_eq!(residue_cs_n2_smooth(&z, &[q(0), q(0)]), Err(Error::SectionIdenticallyZero));
    }

    #[test]
    fn jet_residue_at_origin() {
        let p = |s: &str| parse_poly(s, 2).unwrap().with_trunc(6);
        let g = MapGerm::new(
            crate::germ_analysis::AdaptedChart::new(2, 1, "z").unwrap(),
            vec![p("z1 + z1^2*z2 + z1^2"), p("z2 + z1*z2^2 + z1*z2^3")],
        )
        .unwrap();
        let s = extract_section(&g, SectionKind::HSigma).unwrap();
        // h1 = 1 + z2, g2 = z2^2 (1 + z2): residue of (1 + z2)/(z2^2 (1 + z2)) is 0
        assert_eq!(residue_cs_n2_smooth(&s, &[q(0), q(0)]).unwrap().value, q(0));
    }

    #[test]
    fn grothendieck_residues() {
        let s = section(
            3,
            &["z1 + z1^2", "z2 + z1*z2*(z2 - 1)", "z3 + z1*z3*(z3 - 1)"],
            SectionKind::HSigma,
        );
        assert_eq!(residue_cs_grothendieck(&s, &[q(0), q(0), q(0)]).unwrap().value, q(1));
        assert_eq!(residue_cs_grothendieck(&s, &[q(0), q(1), q(0)]).unwrap().value, q(-1));
        let half = GR::from_ratio(1, 2);
        assert!(matches!(
            residue_cs_grothendieck(&s, &[q(0), half, q(0)]),
            Err(Error::NotCommonZero(_))
        ));
        let d = section(3, &["z1 + z1^2", "z2 + z1*z2^2", "z3 + z1*z3"], SectionKind::HSigma);
        assert!(matches!(
            residue_cs_grothendieck(&d, &[q(0), q(0), q(0)]),
            Err(Error::DegenerateZero { .. })
        ));
    }

    #[test]
    fn phi_residues() {
        // tangential, nu = 2: g2 = z2 (z2 - 1), h1 = 1
        let s = section(2, &["z1 + z1^3", "z2 + z1^2*z2*(z2 - 1)"], SectionKind::Xf);
        let c1 = Phi::c1_pow(1);
        let cs = residue_cs_n2_smooth(&s, &[q(0), q(0)]).unwrap().value;
        let ls = residue_ls_phi(&s, &[q(0), q(0)], &c1).unwrap().value;
        assert_eq!(ls, &cs + &q(1));
        let bb = residue_bb_phi(&s, &[q(0), q(0)], &c1).unwrap().value;
        assert_eq!(bb, q(1));
        let s3 = section(
            3,
            &["z1 + z1^3", "z2 + z1^2*z2*(z2 - 1)", "z3 + z1^2*z3*(z3 - 1)"],
            SectionKind::Xf,
        );
        // V = diag(-1, 1, 1) at the origin, J = 1: c1^2 -> (1)^2, sign (+)
        let v = residue_ls_phi(&s3, &[q(0), q(0), q(0)], &Phi::c1_pow(2)).unwrap().value;
        assert_eq!(v, q(1));
        let c2 = Phi { exps: vec![0, 1] };
        let v = residue_ls_phi(&s3, &[q(0), q(0), q(0)], &c2).unwrap().value;
        assert_eq!(v, q(-1));
        let quad = section(2, &["z1 + z1^2*z2", "z2 + z1*z2"], SectionKind::Xf);
        assert!(matches!(residue_ls_phi(&quad, &[q(0), q(0)], &c1), Err(Error::HypothesesUnmet(_))));
    }

    #[test]
    fn orbit_residues_match_partial_fractions() {
        // 1 / (x^2 - 2): residues +-1/(2 sqrt 2) sum to 0
        let s = UniPoly::from_ints(&[-2, 0, 1]);
        let (sum, per) = orbit_residue(&UniPoly::one(), &s, &s, 1, 8).unwrap();
        assert_eq!(sum, q(0));
        assert_eq!(per.unwrap(), UniPoly::new(vec![q(0), GR::from_ratio(1, 4)]));
        // x^3 / ((x^2 + 1)^2 (x - 3)): orbit of order two
        let s = UniPoly::from_ints(&[1, 0, 1]);
        let den = &s.pow(2) * &UniPoly::from_ints(&[-3, 1]);
        let num = UniPoly::from_ints(&[0, 0, 0, 1]);
        let (sum, per) = orbit_residue(&num, &den, &s, 2, 8).unwrap();
        let at3 = residue_rational(&num, &den, &q(3)).unwrap();
        assert_eq!(&sum + &at3, residue_at_infinity(&num, &den).map(|x| -x).unwrap());
        assert!(per.is_some());
        let (agg, none) = orbit_residue(&num, &den, &s, 2, 1).unwrap();
        assert_eq!((agg, none), (sum, None));
    }

    #[test]
    fn node_branches() {
        let g = MapGerm::from_strings(2, 1, &["z1 + z1^2*z2", "z2 + z1*z2^2"]).unwrap();
        let p = |s: &str| parse_poly(s, 2).unwrap();
        let t = |s: &str| parse_poly(s, 1).unwrap();
        let ell = p("z1*z2");
        let aux = p("z1 + z2");
        for br in [vec![t("0"), t("z1")], vec![t("z1"), t("0")]] {
            let b = BranchParametrization::new(br).unwrap();
            let r = residue_cs_singular_curve(&g, &ell, &aux, &b, ResidueFormula::CsSingularCurve).unwrap();
            assert_eq!(r.value, q(2));
        }
        let off = BranchParametrization::new(vec![t("z1"), t("z1")]).unwrap();
        assert!(matches!(
            residue_cs_singular_curve(&g, &ell, &aux, &off, ResidueFormula::CsSingularCurve),
            Err(Error::BranchNotOnCurve(_))
        ));
        assert!(BranchParametrization::new(vec![t("0"), t("z1^2")]).is_err());
    }

    #[test]
    fn smooth_branch_agrees_with_curve_formula() {
        let g = MapGerm::from_strings(2, 1, &["z1 + z1^2", "z2 + z1*z2*(z2 - 1)"]).unwrap();
        let s = extract_section(&g, SectionKind::HSigma).unwrap();
        let p = |s: &str| parse_poly(s, 2).unwrap();
        let t = |s: &str| parse_poly(s, 1).unwrap();
        for c in [0, 1] {
            let b = BranchParametrization::new(vec![t("0"), &t("z1") + &PolySeries::constant(1, q(c))]).unwrap();
            let r = residue_cs_singular_curve(&g, &p("z1"), &p("z2"), &b, ResidueFormula::CsSingularCurve)
                .unwrap();
            assert_eq!(r.value, residue_cs_n2_smooth(&s, &[q(0), q(c)]).unwrap().value);
        }
    }

    #[test]
    fn comfortable_curve_formula_matches_h1() {
        let g = MapGerm::from_strings(2, 1, &["2*z1 + z1^2*z2", "z2 + z1*z2*(z2 - 1)"]).unwrap();
        let s = extract_section(&g, SectionKind::H1Sigma).unwrap();
        let p = |s: &str| parse_poly(s, 2).unwrap();
        let t = |s: &str| parse_poly(s, 1).unwrap();
        let b = BranchParametrization::new(vec![t("0"), t("z1")]).unwrap();
        let r = residue_cs_singular_curve(&g, &p("z1"), &p("z2"), &b, ResidueFormula::CsSingularCurveComfortable)
            .unwrap();
        assert_eq!(r.value, residue_cs_n2_smooth(&s, &[q(0), q(0)]).unwrap().value);
    }

    #[test]
    fn sum_check() {
        let forms = vec![
            ChartForm { chart: 0, num: UniPoly::one(), den: UniPoly::from_ints(&[0, -1, 1]) },
            ChartForm { chart: 1, num: UniPoly::from_ints(&[-1]), den: UniPoly::from_ints(&[0, -1, 1]) },
        ];
        let pts = vec![
            PointResidue { point: ProjectivePoint::Rational(q(1), q(0)), value: q(-1) },
            PointResidue { point: ProjectivePoint::Rational(q(1), q(1)), value: q(1) },
        ];
        let c = residue_sum_check(&pts, &forms[..1].iter().cloned().chain([forms[0].clone()]).collect::<Vec<_>>());
        assert!(matches!(c, Err(Error::ChartCoverIncomplete(_))));
        let chk = residue_sum_check(&pts, &forms[..1].iter().cloned().chain([ChartForm { chart: 1, ..forms[0].clone() }]).collect::<Vec<_>>()).unwrap();
        assert_eq!(chk.total, q(0));
        assert!(chk.charts[0].balanced);
        let mut bad = pts.clone();
        bad[1].value = q(2);
        assert!(!residue_sum_check(&bad, &forms).unwrap().charts[0].balanced);
        let dt2 = ChartForm { chart: 0, num: UniPoly::one(), den: UniPoly::from_ints(&[0, 0, 1]) };
        let z = residue_sum_check(
            &[PointResidue { point: ProjectivePoint::Rational(q(1), q(0)), value: q(0) }],
            &[dt2.clone(), ChartForm { chart: 1, ..dt2 }],
        )
        .unwrap();
        assert!(z.charts[0].balanced);
    }
}
