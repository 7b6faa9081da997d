//! Order of contact, tangentiality, normal action and dicriticality of
//! self-map germs fixing a submanifold.

use std::fmt;

use num_traits::{One, Zero};

use crate::algebra::{linalg, parse_poly, GaussianRational as GR, Monomial, PolySeries};
use crate::error::{Error, Result};

/// Local coordinates in which the fixed locus is `{z1 = ... = zm = 0}`.
/// `codim == nvars` describes a fixed point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptedChart {
    pub nvars: usize,
    pub codim: usize,
    pub label: String,
}

impl AdaptedChart {
    pub fn new(nvars: usize, codim: usize, label: impl Into<String>) -> Result<Self> {
        if codim == 0 || codim > nvars {
            return Err(Error::InvalidInput(format!(
                "codimension {codim} is not in 1..={nvars}"
            )));
        }
        Ok(AdaptedChart { nvars, codim, label: label.into() })
    }

    pub fn cutting_vars(&self) -> Vec<usize> {
        (0..self.codim).collect()
    }

    pub fn is_point(&self) -> bool {
        self.codim == self.nvars
    }
}

/// A germ `f = N / D` with exact polynomial (or jet) numerators `N^j` and a
/// common unit denominator `D`. User-supplied germs have `D = 1`; blow-up
/// lifts keep their rational form here so that data restricted to the
/// exceptional divisor stays exact.
#[derive(Clone, Debug, PartialEq)]
pub struct MapGerm {
    chart: AdaptedChart,
    numerators: Vec<PolySeries>,
    denominator: PolySeries,
    work_trunc: u32,
}

impl MapGerm {
    pub fn new(chart: AdaptedChart, components: Vec<PolySeries>) -> Result<Self> {
        let n = chart.nvars;
        let work = default_work_trunc(&components);
        Self::with_denominator(chart, components, PolySeries::one(n), work)
    }

    pub fn from_strings(nvars: usize, codim: usize, comps: &[&str]) -> Result<Self> {
        let chart = AdaptedChart::new(nvars, codim, "z")?;
        let comps = comps
            .iter()
            .map(|s| parse_poly(s, nvars))
            .collect::<Result<Vec<_>>>()?;
        Self::new(chart, comps)
    }

    pub fn with_denominator(
        chart: AdaptedChart,
        numerators: Vec<PolySeries>,
        denominator: PolySeries,
        work_trunc: u32,
    ) -> Result<Self> {
        let n = chart.nvars;
        if numerators.len() != n {
            return Err(Error::InvalidInput(format!(
                "expected {n} components, got {}",
                numerators.len()
            )));
        }
        if numerators.iter().chain([&denominator]).any(|c| c.nvars() != n) {
            return Err(Error::InvalidInput("component dimension mismatch".into()));
        }
        if denominator.constant_term().is_zero() {
            return Err(Error::InvalidInput("denominator is not a unit".into()));
        }
        let germ = MapGerm { chart, numerators, denominator, work_trunc };
        let cut = germ.chart.cutting_vars();
        let diffs = germ.difference_numerators();
        for (j, e) in diffs.iter().enumerate() {
            let on_s = e.set_zero(&cut);
            if !on_s.is_zero() {
                return Err(Error::DoesNotFixLocus(format!(
                    "component {} moves the fixed locus: {on_s}",
                    j + 1
                )));
            }
        }
        if diffs.iter().all(PolySeries::is_zero) {
            return Err(Error::IdentityMap);
        }
        Ok(germ)
    }

    pub fn chart(&self) -> &AdaptedChart {
        &self.chart
    }

    pub fn nvars(&self) -> usize {
        self.chart.nvars
    }

    pub fn numerators(&self) -> &[PolySeries] {
        &self.numerators
    }

    pub fn denominator(&self) -> &PolySeries {
        &self.denominator
    }

    pub fn has_unit_denominator(&self) -> bool {
        self.denominator == PolySeries::one(self.nvars())
    }

    /// Depth used when the rational form has to be expanded.
    pub fn work_trunc(&self) -> u32 {
        self.work_trunc
    }

    pub fn with_work_trunc(mut self, d: u32) -> Self {
        self.work_trunc = d;
        self
    }

    /// Smallest jet depth among the numerators, `None` if all are exact.
    pub fn trunc_degree(&self) -> Option<u32> {
        self.numerators.iter().filter_map(PolySeries::trunc_degree).min()
    }

    /// `N^j - z^j D`, the numerators of `f^j - z^j`.
    pub fn difference_numerators(&self) -> Vec<PolySeries> {
        let n = self.nvars();
        self.numerators
            .iter()
            .enumerate()
            .map(|(j, nj)| nj - &(&PolySeries::var(n, j) * &self.denominator))
            .collect()
    }

    /// The components `f^j`, expanded to the working depth when `D != 1`.
    pub fn components(&self) -> Result<Vec<PolySeries>> {
        if self.has_unit_denominator() {
            return Ok(self.numerators.clone());
        }
        let inv = self.denominator.inv_unit(self.work_trunc)?;
        Ok(self
            .numerators
            .iter()
            .map(|c| (c * &inv).with_trunc(self.work_trunc))
            .collect())
    }

    /// Numerator of `h o f - h`; the true difference is this divided by a
    /// power of the unit `D`, which does not change ideal membership.
    pub fn pullback_difference(&self, h: &PolySeries) -> Result<PolySeries> {
        if self.has_unit_denominator() {
            return Ok(&h.compose(&self.numerators)? - h);
        }
        if !h.is_exact() {
            let comps = self.components()?;
            return Ok(&h.compose(&comps)? - h);
        }
        let n = self.nvars();
        let k = h.degree().unwrap_or(0);
        let mut dpow = vec![PolySeries::one(n)];
        for i in 1..=k as usize {
            dpow.push(&dpow[i - 1] * &self.denominator);
        }
        let mut acc = PolySeries::zero(n);
        for (m, c) in h.terms() {
            let mono = PolySeries::monomial(m.clone(), c.clone()).compose(&self.numerators)?;
            acc = &acc + &(&mono * &dpow[(k - m.degree()) as usize]);
        }
        Ok(&acc - &(&dpow[k as usize] * h))
    }

    /// `(e / z1^k)|_S / D|_S` for a codimension-one chart, where `D|_S`
    /// must be a nonzero constant.
    pub fn quotient_on_locus(&self, e: &PolySeries, k: u32) -> Result<PolySeries> {
        if self.chart.codim != 1 {
            return Err(Error::NotCodimensionOne(self.chart.codim));
        }
        let q = e.div_var_power(0, k)?.set_zero(&[0]);
        Ok(q.scale(&self.denominator_on_locus()?.inv().unwrap()))
    }

    pub(crate) fn denominator_on_locus(&self) -> Result<GR> {
        let d = self.denominator.set_zero(&self.chart.cutting_vars());
        if !d.is_constant() || d.is_zero() {
            return Err(Error::UnsupportedGeometry(format!(
                "denominator {d} is not a nonzero constant on the fixed locus"
            )));
        }
        Ok(d.constant_term())
    }

    /// `T o f o T^-1` as jets of depth `d`, for an invertible coordinate
    /// change `T` fixing the origin and preserving the fixed locus.
    pub fn conjugate(&self, transition: &[PolySeries], d: u32) -> Result<MapGerm> {
        let tinv = crate::algebra::invert_map(transition, d)?;
        let comps: Vec<PolySeries> = self
            .components()?
            .into_iter()
            .map(|c| c.with_trunc(d))
            .collect();
        let mut out = Vec::with_capacity(self.nvars());
        for t in transition {
            let tf = t.clone().with_trunc(d).compose(&comps)?;
            out.push(tf.compose(&tinv)?.with_trunc(d));
        }
        let mut g = MapGerm::new(self.chart.clone(), out)?;
        g.work_trunc = d;
        Ok(g)
    }
}

pub(crate) fn default_work_trunc(comps: &[PolySeries]) -> u32 {
    match comps.iter().filter_map(PolySeries::trunc_degree).min() {
        Some(t) => t,
        None => {
            let deg = comps.iter().filter_map(PolySeries::degree).max().unwrap_or(1);
            (2 * deg + 2).max(6)
        }
    }
}

/// An f-order of vanishing, certified as far as the data allows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VanishingOrder {
    Finite(u32),
    /// Zero through the jet depth; the true order is at least this.
    AtLeast(u32),
    Infinite,
}

impl VanishingOrder {
    pub fn finite(self) -> Option<u32> {
        match self {
            VanishingOrder::Finite(m) => Some(m),
            _ => None,
        }
    }

    /// Whether the order is certainly larger than `k`.
    pub fn exceeds(self, k: u32) -> bool {
        match self {
            VanishingOrder::Finite(m) => m > k,
            VanishingOrder::AtLeast(m) => m > k,
            VanishingOrder::Infinite => true,
        }
    }
}

impl fmt::Display for VanishingOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VanishingOrder::Finite(m) => write!(f, "{m}"),
            VanishingOrder::AtLeast(m) => write!(f, ">={m}"),
            VanishingOrder::Infinite => write!(f, "inf"),
        }
    }
}

/// Order of `e` in the ideal generated by `vars`. A jet of depth `T` is
/// taken to have its omitted tail in the `T`-th power of that ideal, so only
/// orders below `T` are certified.
pub fn ideal_order(e: &PolySeries, vars: &[usize]) -> Result<VanishingOrder> {
    let mu = e.ideal_order(vars);
    match (e.trunc_degree(), mu) {
        (None, None) => Ok(VanishingOrder::Infinite),
        (None, Some(m)) => Ok(VanishingOrder::Finite(m)),
        (Some(t), None) => Ok(VanishingOrder::AtLeast(t)),
        (Some(t), Some(m)) if m < t => Ok(VanishingOrder::Finite(m)),
        (Some(t), Some(m)) => Err(Error::InsufficientTruncation(format!(
            "order {m} cannot be certified from a jet of depth {t}"
        ))),
    }
}

/// The f-order of vanishing of `h`: the largest `mu` with `h o f - h` in the
/// `mu`-th power of the ideal of the fixed locus.
pub fn vanishing_order(h: &PolySeries, germ: &MapGerm) -> Result<VanishingOrder> {
    if h.nvars() != germ.nvars() {
        return Err(Error::InvalidInput("function dimension mismatch".into()));
    }
    ideal_order(&germ.pullback_difference(h)?, &germ.chart.cutting_vars())
}

/// `b_f`: constant on compact loci, but on a germ it may vary.
#[derive(Clone, Debug, PartialEq)]
pub enum NormalAction {
    Constant(GR),
    NonConstant(PolySeries),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContactProfile {
    pub nu_f: u32,
    pub per_coordinate_orders: Vec<VanishingOrder>,
    pub tangential: bool,
    /// `g^1|_S`, codimension one only.
    pub b1: Option<PolySeries>,
    /// Codimension one only.
    pub b_f: Option<NormalAction>,
}

pub fn contact_profile(germ: &MapGerm) -> Result<ContactProfile> {
    let cut = germ.chart.cutting_vars();
    let diffs = germ.difference_numerators();
    let orders = diffs
        .iter()
        .map(|e| ideal_order(e, &cut))
        .collect::<Result<Vec<_>>>()?;
    let nu_f = orders
        .iter()
        .filter_map(|o| o.finite())
        .min()
        .ok_or(Error::IdentityMap)?;
    let tangential = orders[..germ.chart.codim].iter().all(|o| o.exceeds(nu_f));
    let (b1, b_f) = if germ.chart.codim == 1 {
        let b1 = if tangential {
            PolySeries::zero(germ.nvars())
        } else {
            germ.quotient_on_locus(&diffs[0], nu_f)?
        };
        let bf = if nu_f == 1 {
            let v = &b1 + &PolySeries::one(germ.nvars());
            if v.is_constant() {
                NormalAction::Constant(v.constant_term())
            } else {
                NormalAction::NonConstant(v)
            }
        } else {
            NormalAction::Constant(GR::one())
        };
        (Some(b1), Some(bf))
    } else {
        (None, None)
    };
    Ok(ContactProfile { nu_f, per_coordinate_orders: orders, tangential, b1, b_f })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DicriticalTest {
    pub dicritical: bool,
    /// Lowest degree of a nonlinear term of `f - id`.
    pub order: u32,
}

/// Leading homogeneous part `P^j` of `f^j - z^j` for a germ tangent to the
/// identity at the origin, and its degree.
pub fn leading_part(f0: &MapGerm) -> Result<(u32, Vec<PolySeries>)> {
    let n = f0.nvars();
    let comps = f0.components()?;
    for (j, c) in comps.iter().enumerate() {
        if !c.constant_term().is_zero() {
            return Err(Error::NotTangentToIdentity(format!(
                "component {} does not fix the origin",
                j + 1
            )));
        }
        for k in 0..n {
            let want = if j == k { GR::one() } else { GR::zero() };
            if c.coeff(&Monomial::var(n, k)) != want {
                return Err(Error::NotTangentToIdentity(format!(
                    "linear part of component {} is not z{}",
                    j + 1,
                    j + 1
                )));
            }
        }
    }
    let q: Vec<PolySeries> = comps
        .iter()
        .enumerate()
        .map(|(j, c)| c - &PolySeries::var(n, j))
        .collect();
    let order = q.iter().filter_map(PolySeries::ord).min().ok_or(Error::IdentityMap)?;
    Ok((order, q.iter().map(|p| p.homogeneous_part(order)).collect()))
}

/// Dicritical iff `z^h P^k = z^k P^h` for all pairs, where `P` is the
/// leading homogeneous part of `f - id`.
pub fn dicritical_test(f0: &MapGerm) -> Result<DicriticalTest> {
    let n = f0.nvars();
    let (order, p) = leading_part(f0)?;
    let mut dicritical = true;
    'outer: for h in 0..n {
        for k in h + 1..n {
            let lhs = &PolySeries::var(n, h) * &p[k];
            let rhs = &PolySeries::var(n, k) * &p[h];
            if lhs != rhs {
                dicritical = false;
                break 'outer;
            }
        }
    }
    Ok(DicriticalTest { dicritical, order })
}

pub(crate) fn check_transition(a: &AdaptedChart, b: &AdaptedChart, t: &[PolySeries]) -> Result<()> {
    let n = a.nvars;
    if b.nvars != n || t.len() != n || t.iter().any(|c| c.nvars() != n) {
        return Err(Error::InvalidInput("transition dimension mismatch".into()));
    }
    if a.codim != b.codim {
        return Err(Error::NotAdapted("charts have different codimension".into()));
    }
    let cut = a.cutting_vars();
    for (r, c) in t.iter().enumerate().take(a.codim) {
        if !c.set_zero(&cut).is_zero() {
            return Err(Error::NotAdapted(format!(
                "cutting coordinate {} does not vanish on the fixed locus",
                r + 1
            )));
        }
    }
    let jac: linalg::Matrix = t
        .iter()
        .map(|c| (0..n).map(|k| c.derive(k).constant_term()).collect())
        .collect();
    if linalg::det(&jac).is_zero() {
        return Err(Error::NotAdapted("transition is not invertible at the origin".into()));
    }
    Ok(())
}

/// First-order flatness: `d zhat^p / d z^r |_S = 0` for tangential `p` and
/// cutting `r`.
pub fn check_splitting_pair(a: &AdaptedChart, b: &AdaptedChart, t: &[PolySeries]) -> Result<bool> {
    check_transition(a, b, t)?;
    let cut = a.cutting_vars();
    Ok((a.codim..a.nvars).all(|p| cut.iter().all(|&r| t[p].derive(r).set_zero(&cut).is_zero())))
}

/// Second-order flatness of the cutting coordinates in cutting directions.
pub fn check_comfortable_pair(a: &AdaptedChart, b: &AdaptedChart, t: &[PolySeries]) -> Result<bool> {
    if !check_splitting_pair(a, b, t)? {
        return Err(Error::NotSplitting);
    }
    let cut = a.cutting_vars();
    Ok(cut.iter().all(|&r| {
        cut.iter().all(|&s| {
            cut.iter()
                .all(|&u| t[r].derive(s).derive(u).set_zero(&cut).is_zero())
        })
    }))
}

/// Whether `b_f` is the identity, i.e. `df` acts trivially on the normal
/// bundle: automatic unless `nu_f = 1` and the germ is not tangential.
pub fn acts_as_identity_on_normal_bundle(profile: &ContactProfile) -> bool {
    profile.tangential || profile.nu_f > 1
}

impl ContactProfile {
    pub fn b_f_is_one(&self) -> bool {
        matches!(&self.b_f, Some(NormalAction::Constant(c)) if c.is_one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn germ(n: usize, m: usize, c: &[&str]) -> MapGerm {
        MapGerm::from_strings(n, m, c).unwrap()
    }

    fn p(s: &str) -> PolySeries {
        parse_poly(s, 2).unwrap()
    }

    #[test]
    fn vanishing_orders() {
        let f = germ(2, 1, &["z1 + z1^2*z2", "z2 + z1*z2"]);
        assert_eq!(vanishing_order(&p("z1"), &f).unwrap(), VanishingOrder::Finite(2));
        assert_eq!(vanishing_order(&p("z2"), &f).unwrap(), VanishingOrder::Finite(1));
        let g = germ(2, 1, &["z1", "z2 + z1"]);
        assert_eq!(vanishing_order(&p("z1"), &g).unwrap(), VanishingOrder::Infinite);
        let jet = MapGerm::new(
            AdaptedChart::new(2, 1, "z").unwrap(),
            vec![p("z1").with_trunc(5), p("z2 + z1").with_trunc(5)],
        )
        .unwrap();
        assert_eq!(vanishing_order(&p("z1"), &jet).unwrap(), VanishingOrder::AtLeast(5));
    }

    #[test]
    fn contact_profiles() {
        let a = contact_profile(&germ(2, 1, &["z1 + z1^2*z2", "z2 + z1*z2"])).unwrap();
        assert_eq!((a.nu_f, a.tangential), (1, true));
        assert!(a.b1.unwrap().is_zero());
        let b = contact_profile(&germ(2, 1, &["z1 + z1^2", "z2"])).unwrap();
        assert_eq!((b.nu_f, b.tangential), (2, false));
        assert_eq!(b.b1.unwrap(), p("1"));
        let c = contact_profile(&germ(2, 1, &["2*z1", "z2 + z1*z2"])).unwrap();
        assert_eq!((c.nu_f, c.tangential), (1, false));
        assert_eq!(c.b_f, Some(NormalAction::Constant(GR::from_int(2))));
        let d = contact_profile(&germ(2, 1, &["z1 + z1*z2", "z2"])).unwrap();
        assert_eq!(d.b_f, Some(NormalAction::NonConstant(p("1 + z2"))));
    }

    #[test]
    fn rejects_identity_and_moving_locus() {
        assert_eq!(MapGerm::from_strings(2, 1, &["z1", "z2"]), Err(Error::IdentityMap));
        assert!(matches!(
            MapGerm::from_strings(2, 1, &["z1", "z2 + z2^2"]),
            Err(Error::DoesNotFixLocus(_))
        ));
    }

    #[test]
    fn dicriticality() {
        let a = dicritical_test(&germ(2, 2, &["w1 + w1^2", "w2 + w2^2"])).unwrap();
        assert_eq!(a, DicriticalTest { dicritical: false, order: 2 });
        let b = dicritical_test(&germ(2, 2, &["w1 + w1*(w1+w2)", "w2 + w2*(w1+w2)"])).unwrap();
        assert_eq!(b, DicriticalTest { dicritical: true, order: 2 });
        let c = dicritical_test(&germ(2, 2, &["w1 + w2^3", "w2"])).unwrap();
        assert_eq!(c, DicriticalTest { dicritical: false, order: 3 });
        assert!(matches!(
            dicritical_test(&germ(2, 2, &["2*w1 + w1^2", "w2"])),
            Err(Error::NotTangentToIdentity(_))
        ));
    }

    #[test]
    fn chart_pair_checks() {
        let ch = AdaptedChart::new(2, 1, "a").unwrap();
        let id = vec![p("z1"), p("z2")];
        assert!(check_splitting_pair(&ch, &ch, &id).unwrap());
        assert!(check_comfortable_pair(&ch, &ch, &id).unwrap());
        assert!(!check_splitting_pair(&ch, &ch, &[p("z1"), p("z2 + z1")]).unwrap());
        assert_eq!(
            check_comfortable_pair(&ch, &ch, &[p("z1"), p("z2 + z1")]),
            Err(Error::NotSplitting)
        );
        assert!(!check_comfortable_pair(&ch, &ch, &[p("z1 + z1^2"), p("z2")]).unwrap());
        assert!(matches!(
            check_splitting_pair(&ch, &ch, &[p("z1 + z2"), p("z2")]),
            Err(Error::NotAdapted(_))
        ));
    }

    #[test]
    fn conjugation_preserves_contact() {
        let f = germ(2, 1, &["z1 + z1^2*z2", "z2 + z1*z2"]);
        let t = vec![p("2*z1 + z1*z2"), p("z2 + z1 + z2^2")];
        let g = f.conjugate(&t, 8).unwrap();
        let (a, b) = (contact_profile(&f).unwrap(), contact_profile(&g).unwrap());
        assert_eq!((a.nu_f, a.tangential), (b.nu_f, b.tangential));
    }
}
