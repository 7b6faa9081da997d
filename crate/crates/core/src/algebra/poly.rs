//! Multivariate polynomials and truncated power series over `Q(i)`.
//!
//! A `PolySeries` is either an exact polynomial (`trunc == None`) or the
//! jet of a power series known through total degree `trunc`. Every operation
//! propagates the precision it can actually certify.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::scalar::GaussianRational as GR;
use super::unipoly::UniPoly;
use crate::error::{Error, Result};

/// Exponent vector. Ordered by total degree, then with larger exponents in
/// earlier variables first, so iteration lists `1, z1, z2, z1^2, z1*z2, ...`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }

    /// `o / self` when `self` divides `o`.
    pub fn quotient_of(&self, o: &Monomial) -> Option<Monomial> {
        self.divides(o)
            .then(|| Monomial(o.0.iter().zip(&self.0).map(|(b, a)| b - a).collect()))
    }

    /// Sum of the exponents of the given variables.
    pub fn partial_degree(&self, vars: &[usize]) -> u32 {
        vars.iter().map(|&v| self.0[v]).sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree()
            .cmp(&o.degree())
            .then_with(|| o.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

fn min_opt(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn add_opt(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    Some(a? + b?)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolySeries {
    nvars: usize,
    trunc: Option<u32>,
    terms: BTreeMap<Monomial, GR>,
}

impl PolySeries {
    pub fn zero(nvars: usize) -> Self {
        PolySeries { nvars, trunc: None, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: GR) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, GR::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable {i} out of range for {nvars} variables");
        Self::monomial(Monomial::var(nvars, i), GR::one())
    }

    pub fn monomial(m: Monomial, c: GR) -> Self {
        let mut p = Self::zero(m.0.len());
        p.add_term(m, c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, GR)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.0.len(), nvars);
            p.add_term(m, c);
        }
        p
    }

    /// Declares `self` a jet of order `d`, dropping terms above it. Never
    /// raises an existing truncation.
    pub fn with_trunc(mut self, d: u32) -> Self {
        let d = min_opt(self.trunc, Some(d));
        self.set_trunc(d);
        self
    }

    fn set_trunc(&mut self, d: Option<u32>) {
        self.trunc = d;
        if let Some(d) = d {
            self.terms.retain(|m, _| m.degree() <= d);
        }
    }

    fn add_term(&mut self, m: Monomial, c: GR) {
        if c.is_zero() || self.trunc.is_some_and(|d| m.degree() > d) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// `None` for an exact polynomial.
    pub fn trunc_degree(&self) -> Option<u32> {
        self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GR)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> GR {
        self.terms.get(m).cloned().unwrap_or_else(GR::zero)
    }

    pub fn constant_term(&self) -> GR {
        self.coeff(&Monomial::one(self.nvars))
    }

    /// True when no term survives; for a jet this means zero to its depth.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest total degree of a stored term.
    pub fn ord(&self) -> Option<u32> {
        self.terms.keys().next().map(Monomial::degree)
    }

    /// Highest total degree of a stored term.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    /// Order used for precision bookkeeping: a zero jet of depth `d` has
    /// order at least `d + 1`; an exact zero has infinite order.
    fn effective_ord(&self) -> Option<u32> {
        match self.ord() {
            Some(o) => Some(o),
            None => self.trunc.map(|d| d + 1),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    /// Variables that actually occur.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&v| self.terms.keys().any(|m| m.0[v] > 0))
            .collect()
    }

    pub fn homogeneous_part(&self, k: u32) -> PolySeries {
        let mut p = Self::zero(self.nvars);
        p.terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.degree() == k)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        p
    }

    pub fn scale(&self, c: &GR) -> PolySeries {
        let mut p = Self::zero(self.nvars);
        p.trunc = self.trunc;
        if !c.is_zero() {
            p.terms = self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect();
        }
        p
    }

    /// Multiplies by a monomial; the jet depth moves up by its degree.
    pub fn mul_monomial(&self, m: &Monomial) -> PolySeries {
        PolySeries {
            nvars: self.nvars,
            trunc: self.trunc.map(|d| d + m.degree()),
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
        }
    }

    pub fn pow(&self, mut k: u32) -> PolySeries {
        let mut base = self.clone();
        let mut acc = Self::one(self.nvars);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Formal partial derivative; a jet loses one degree of depth.
    pub fn derive(&self, var: usize) -> PolySeries {
        assert!(var < self.nvars);
        let mut p = Self::zero(self.nvars);
        p.trunc = self.trunc.map(|d| d.saturating_sub(1));
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[var] -= 1;
            p.add_term(Monomial(exps), c * &GR::from_int(e as i64));
        }
        p
    }

    /// Sets the listed variables to zero.
    pub fn set_zero(&self, vars: &[usize]) -> PolySeries {
        let mut p = self.clone();
        p.terms.retain(|m, _| vars.iter().all(|&v| m.0[v] == 0));
        p
    }

    /// Sets one variable to a constant. Exact polynomials only, unless the
    /// constant is zero.
    pub fn substitute_constant(&self, var: usize, value: &GR) -> Result<PolySeries> {
        if value.is_zero() {
            return Ok(self.set_zero(&[var]));
        }
        if !self.is_exact() {
            return Err(Error::TruncationTooLowToSolve(
                "cannot evaluate a jet away from the origin".into(),
            ));
        }
        let mut p = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut exps = m.0.clone();
            let e = std::mem::replace(&mut exps[var], 0);
            p.add_term(Monomial(exps), c * &value.pow(e));
        }
        Ok(p)
    }

    /// Evaluates at a point. Jets can only be evaluated at the origin.
    pub fn eval(&self, point: &[GR]) -> Result<GR> {
        assert_eq!(point.len(), self.nvars);
        if !self.is_exact() && point.iter().any(|x| !x.is_zero()) {
            return Err(Error::TruncationTooLowToSolve(
                "cannot evaluate a jet away from the origin".into(),
            ));
        }
        let mut acc = GR::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t = &t * &x.pow(e);
                }
            }
            acc += &t;
        }
        Ok(acc)
    }

    /// Re-embeds into `nvars` variables, sending variable `k` to `map[k]`.
    pub fn rename_vars(&self, nvars: usize, map: &[usize]) -> PolySeries {
        assert_eq!(map.len(), self.nvars);
        let mut p = Self::zero(nvars);
        p.trunc = self.trunc;
        for (m, c) in &self.terms {
            let mut exps = vec![0; nvars];
            for (k, &e) in m.0.iter().enumerate() {
                exps[map[k]] += e;
            }
            p.add_term(Monomial(exps), c.clone());
        }
        p
    }

    /// Minimum over terms of the degree in `vars`: the largest `mu` with
    /// `self` in the `mu`-th power of the ideal generated by `vars`.
    /// `None` for zero.
    pub fn ideal_order(&self, vars: &[usize]) -> Option<u32> {
        self.terms.keys().map(|m| m.partial_degree(vars)).min()
    }

    /// The univariate polynomial in `var`, provided no other variable occurs.
    pub fn to_univariate(&self, var: usize) -> Option<UniPoly> {
        let mut coeffs = Vec::new();
        for (m, c) in &self.terms {
            if m.0.iter().enumerate().any(|(k, &e)| k != var && e > 0) {
                return None;
            }
            let e = m.0[var] as usize;
            if coeffs.len() <= e {
                coeffs.resize(e + 1, GR::zero());
            }
            coeffs[e] = c.clone();
        }
        Some(UniPoly::new(coeffs))
    }

    pub fn from_univariate(nvars: usize, var: usize, u: &UniPoly) -> PolySeries {
        let mut p = Self::zero(nvars);
        for (e, c) in u.coeffs().iter().enumerate() {
            let mut exps = vec![0; nvars];
            exps[var] = e as u32;
            p.add_term(Monomial(exps), c.clone());
        }
        p
    }

    /// Substitutes `args[k]` for variable `k`.
    ///
    /// Exact polynomials compose with anything. A jet may only be composed
    /// with arguments vanishing at the origin; its depth then caps the result.
    pub fn compose(&self, args: &[PolySeries]) -> Result<PolySeries> {
        assert_eq!(args.len(), self.nvars, "argument count must match nvars");
        let nv = args.first().map_or(0, |a| a.nvars);
        assert!(args.iter().all(|a| a.nvars == nv));
        let cap = self.trunc;
        if cap.is_some() {
            for (k, a) in args.iter().enumerate() {
                if a.effective_ord().is_some_and(|o| o == 0) {
                    return Err(Error::CompositionUnsafe(format!(
                        "argument {} has a nonzero constant term",
                        k + 1
                    )));
                }
            }
        }
        let args: Vec<PolySeries> = match cap {
            Some(d) => args.iter().map(|a| a.clone().with_trunc(d)).collect(),
            None => args.to_vec(),
        };
        let mut powers: Vec<Vec<PolySeries>> = vec![vec![PolySeries::one(nv)]; self.nvars];
        let mut out = PolySeries::zero(nv);
        out.trunc = cap;
        for (m, c) in &self.terms {
            let mut t = PolySeries::constant(nv, c.clone());
            for (k, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[k].len() <= e as usize {
                    let next = {
                        let last = powers[k].last().unwrap();
                        let mut p = last * &args[k];
                        if let Some(d) = cap {
                            p = p.with_trunc(d);
                        }
                        p
                    };
                    powers[k].push(next);
                }
                t = &t * &powers[k][e as usize];
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Inverse of a unit (nonzero constant term) as a jet of depth `d`, or of
    /// `self`'s own depth if smaller.
    pub fn inv_unit(&self, d: u32) -> Result<PolySeries> {
        let c0 = self.constant_term();
        let c0inv = c0.inv().ok_or(Error::DivisionByZero)?;
        let d = min_opt(self.trunc, Some(d)).unwrap();
        // 1/(c0(1 - t)) = c0^{-1} * sum t^k with t = 1 - self/c0, ord(t) >= 1
        let mut t = PolySeries::one(self.nvars) - self.scale(&c0inv);
        t.set_trunc(Some(d));
        let mut acc = PolySeries::one(self.nvars).with_trunc(d);
        let mut pw = PolySeries::one(self.nvars).with_trunc(d);
        for _ in 0..d {
            pw = (&pw * &t).with_trunc(d);
            if pw.is_zero() {
                break;
            }
            acc = &acc + &pw;
        }
        Ok(acc.scale(&c0inv))
    }

    /// Largest `k` with `var^k` dividing every stored term.
    pub fn var_valuation(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[var]).min()
    }

    /// Exact division by `var^k`, failing with the non-divisible part.
    pub fn div_var_power(&self, var: usize, k: u32) -> Result<PolySeries> {
        let mut m = vec![0; self.nvars];
        m[var] = k;
        self.divide_exact(&PolySeries::monomial(Monomial(m), GR::one()))
    }

    /// Quotient `q` with `q * den == self`, witnessed by a zero remainder.
    ///
    /// Exact operands use polynomial division with respect to the graded
    /// order. If either operand is a jet, division runs from the lowest
    /// degree up (the local order), so dividing by units works too, and the
    /// quotient carries the depth the data supports.
    pub fn divide_exact(&self, den: &PolySeries) -> Result<PolySeries> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_exact() && den.is_exact() {
            self.divide_global(den)
        } else {
            self.divide_local(den)
        }
    }

    fn divide_global(&self, den: &PolySeries) -> Result<PolySeries> {
        let (lm, lc) = den.terms.iter().next_back().unwrap();
        let lc_inv = lc.inv().unwrap();
        let mut r = self.clone();
        let mut q = PolySeries::zero(self.nvars);
        let mut rem = PolySeries::zero(self.nvars);
        while let Some((m, c)) = r.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
            match lm.quotient_of(&m) {
                Some(qm) => {
                    let qc = &c * &lc_inv;
                    r = &r - &den.mul_monomial(&qm).scale(&qc);
                    q.add_term(qm, qc);
                }
                None => {
                    r.terms.remove(&m);
                    rem.add_term(m, c);
                }
            }
        }
        if rem.is_zero() {
            Ok(q)
        } else {
            Err(Error::NotDivisible { remainder: rem.to_string() })
        }
    }

    fn divide_local(&self, den: &PolySeries) -> Result<PolySeries> {
        let (lm, lc) = den.terms.iter().next().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let o = lm.degree();
        let ord_num = self.effective_ord();
        // depth of the quotient: terms of degree k need num through k + o and
        // den through k + o - ord(q)
        if let Some(tn) = self.trunc.filter(|&tn| tn < o) {
            return Err(Error::InsufficientTruncation(format!(
                "dividend known through degree {tn}, divisor has order {o}"
            )));
        }
        let tq = min_opt(
            self.trunc.map(|t| t - o),
            match (den.trunc, ord_num) {
                (Some(td), Some(on)) => Some((td + on).saturating_sub(2 * o)),
                _ => None,
            },
        );
        let work = tq.map(|t| t + o);
        let lc_inv = lc.inv().unwrap();
        let mut r = self.clone();
        r.set_trunc(min_opt(r.trunc, work));
        let mut q = PolySeries::zero(self.nvars);
        q.trunc = tq;
        let mut rem = PolySeries::zero(self.nvars);
        let mut den_w = den.clone();
        den_w.set_trunc(min_opt(den.trunc, work));
        while let Some((m, c)) = r.terms.iter().next().map(|(m, c)| (m.clone(), c.clone())) {
            match lm.quotient_of(&m) {
                Some(qm) => {
                    let qc = &c * &lc_inv;
                    let mut sub = den_w.mul_monomial(&qm).scale(&qc);
                    sub.set_trunc(work);
                    let mut next = &r - &sub;
                    next.set_trunc(work);
                    next.terms.remove(&m);
                    r = next;
                    q.add_term(qm, qc);
                }
                None => {
                    r.terms.remove(&m);
                    rem.add_term(m, c);
                }
            }
        }
        if rem.is_zero() {
            Ok(q)
        } else {
            Err(Error::NotDivisible { remainder: rem.to_string() })
        }
    }
}

impl<'a> Add<&'a PolySeries> for &'a PolySeries {
    type Output = PolySeries;
    fn add(self, o: &PolySeries) -> PolySeries {
        assert_eq!(self.nvars, o.nvars);
        let mut p = self.clone();
        p.set_trunc(min_opt(self.trunc, o.trunc));
        for (m, c) in &o.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }
}

impl<'a> Sub<&'a PolySeries> for &'a PolySeries {
    type Output = PolySeries;
    fn sub(self, o: &PolySeries) -> PolySeries {
        assert_eq!(self.nvars, o.nvars);
        let mut p = self.clone();
        p.set_trunc(min_opt(self.trunc, o.trunc));
        for (m, c) in &o.terms {
            p.add_term(m.clone(), -c);
        }
        p
    }
}

impl<'a> Mul<&'a PolySeries> for &'a PolySeries {
    type Output = PolySeries;
    fn mul(self, o: &PolySeries) -> PolySeries {
        assert_eq!(self.nvars, o.nvars);
        let trunc = min_opt(
            add_opt(self.trunc, o.effective_ord()),
            add_opt(o.trunc, self.effective_ord()),
        );
        // an exact zero factor makes the product exactly zero
        let trunc = if (self.is_exact() && self.is_zero()) || (o.is_exact() && o.is_zero()) {
            None
        } else {
            trunc
        };
        let mut acc: BTreeMap<Monomial, GR> = BTreeMap::new();
        let ob: Vec<(&Monomial, &GR, u32)> = o.terms.iter().map(|(m, c)| (m, c, m.degree())).collect();
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            for &(mb, cb, db) in &ob {
                if trunc.is_some_and(|t| da + db > t) {
                    break;
                }
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.entry(m) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(c);
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        *e.get_mut() += &c;
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        PolySeries { nvars: self.nvars, trunc, terms: acc }
    }
}

impl Neg for &PolySeries {
    type Output = PolySeries;
    fn neg(self) -> PolySeries {
        self.scale(&GR::from_int(-1))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for PolySeries {
            type Output = PolySeries;
            fn $m(self, o: PolySeries) -> PolySeries {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a PolySeries> for PolySeries {
            type Output = PolySeries;
            fn $m(self, o: &PolySeries) -> PolySeries {
                (&self).$m(o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for PolySeries {
    type Output = PolySeries;
    fn neg(self) -> PolySeries {
        (&self).neg()
    }
}

fn fmt_monomial(m: &Monomial) -> String {
    m.0.iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(k, &e)| if e == 1 { format!("z{}", k + 1) } else { format!("z{}^{}", k + 1, e) })
        .collect::<Vec<_>>()
        .join("*")
}

/// Text in the polynomial grammar, lowest degree first. Jet depth is not
/// printed; reports carry it separately.
impl fmt::Display for PolySeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_real() && c.re() < &num_rational::BigRational::zero()
                || c.re().is_zero() && c.im() < &num_rational::BigRational::zero();
            let mag = if negative { -c } else { c.clone() };
            let sep = match (k, negative) {
                (0, false) => "",
                (0, true) => "-",
                (_, false) => " + ",
                (_, true) => " - ",
            };
            let mono = fmt_monomial(m);
            let body = if mono.is_empty() {
                mag.to_poly_literal()
            } else if mag.is_one() {
                mono
            } else {
                format!("{}*{}", mag.to_poly_literal(), mono)
            };
            write!(f, "{sep}{body}")?;
        }
        Ok(())
    }
}
