//! Dense univariate polynomials over `Q(i)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::scalar::GaussianRational as GR;

/// Coefficients lowest degree first, with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct UniPoly(Vec<GR>);

impl UniPoly {
    pub fn new(mut coeffs: Vec<GR>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly(coeffs)
    }

    pub fn zero() -> Self {
        UniPoly(Vec::new())
    }

    pub fn one() -> Self {
        Self::constant(GR::one())
    }

    pub fn constant(c: GR) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Self::new(vec![GR::zero(), GR::one()])
    }

    /// `x - r`.
    pub fn linear(r: &GR) -> Self {
        Self::new(vec![-r, GR::one()])
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&k| GR::from_int(k)).collect())
    }

    pub fn coeffs(&self) -> &[GR] {
        &self.0
    }

    pub fn coeff(&self, k: usize) -> GR {
        self.0.get(k).cloned().unwrap_or_else(GR::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lc(&self) -> GR {
        self.0.last().cloned().unwrap_or_else(GR::zero)
    }

    /// Order of vanishing at 0.
    pub fn valuation(&self) -> Option<usize> {
        self.0.iter().position(|c| !c.is_zero())
    }

    pub fn eval(&self, x: &GR) -> GR {
        let mut acc = GR::zero();
        for c in self.0.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn scale(&self, c: &GR) -> Self {
        Self::new(self.0.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        match self.lc().inv() {
            Some(inv) => self.scale(&inv),
            None => Self::zero(),
        }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &GR::from_int(k as i64))
                .collect(),
        )
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn divrem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let inv = d.lc().inv().unwrap();
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![GR::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &inv;
            if !c.is_zero() {
                for (j, dc) in d.0.iter().enumerate() {
                    r[k + j] -= &(&c * dc);
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn rem(&self, d: &UniPoly) -> UniPoly {
        self.divrem(d).1
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, o: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s*a + t*b = g`, `g` monic.
    pub fn xgcd(a: &UniPoly, b: &UniPoly) -> (UniPoly, UniPoly, UniPoly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s2 = &s0 - &(&q * &s1);
            let t2 = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        match r0.lc().inv() {
            Some(inv) => (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv)),
            None => (r0, s0, t0),
        }
    }

    /// Inverse modulo `m`, if `self` and `m` are coprime.
    pub fn inv_mod(&self, m: &UniPoly) -> Option<UniPoly> {
        let (g, s, _) = Self::xgcd(&self.rem(m), m);
        (g == Self::one()).then(|| s.rem(m))
    }

    pub fn mul_mod(&self, o: &UniPoly, m: &UniPoly) -> UniPoly {
        (self * o).rem(m)
    }

    /// `p(x + c)`.
    pub fn taylor_shift(&self, c: &GR) -> UniPoly {
        let mut out = Self::zero();
        let lin = Self::new(vec![c.clone(), GR::one()]);
        for a in self.0.iter().rev() {
            out = &(&out * &lin) + &Self::constant(a.clone());
        }
        out
    }

    /// `p(c * x)`.
    pub fn scale_var(&self, c: &GR) -> UniPoly {
        let mut pw = GR::one();
        let mut out = Vec::with_capacity(self.0.len());
        for a in &self.0 {
            out.push(a * &pw);
            pw = &pw * c;
        }
        Self::new(out)
    }

    /// `x^deg * p(1/x)` for the given formal degree.
    pub fn reversed(&self, deg: usize) -> UniPoly {
        let mut c = self.0.clone();
        c.resize(deg + 1, GR::zero());
        c.reverse();
        Self::new(c)
    }

    /// Squarefree decomposition `lc * prod s_k^k` with each `s_k` monic,
    /// squarefree and pairwise coprime. Returns the nonconstant `(s_k, k)`.
    pub fn squarefree_decomposition(&self) -> Vec<(UniPoly, u32)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        // Yun's algorithm
        let f = self.monic();
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.divrem(&a0).0;
        let mut c = fp.divrem(&a0).0;
        let mut d = &c - &b.derivative();
        let mut k = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), k));
            }
            b = b.divrem(&a).0;
            c = d.divrem(&a).0;
            d = &c - &b.derivative();
            k += 1;
        }
        out
    }

    /// Order of vanishing at `r`.
    pub fn multiplicity_at(&self, r: &GR) -> u32 {
        if self.is_zero() {
            return u32::MAX;
        }
        let lin = Self::linear(r);
        let mut p = self.clone();
        let mut k = 0;
        loop {
            let (q, rem) = p.divrem(&lin);
            if !rem.is_zero() {
                return k;
            }
            p = q;
            k += 1;
        }
    }

    /// Roots in `Q(i)` of a squarefree polynomial, each certified exactly.
    ///
    /// Candidates come from a floating-point Aberth iteration and are
    /// rationalized by continued fractions; a root that cannot be recovered
    /// this way is simply not reported, so callers must treat the quotient by
    /// the returned linear factors as the algebraic remainder.
    pub fn gaussian_roots(&self) -> Vec<GR> {
        let Some(deg) = self.degree() else { return Vec::new() };
        if deg == 0 {
            return Vec::new();
        }
        let mut found: Vec<GR> = Vec::new();
        let mut rest = self.monic();
        // zero first: it is the most common root and trivially exact
        if rest.coeff(0).is_zero() {
            found.push(GR::zero());
            rest = rest.divrem(&Self::x()).0;
        }
        if deg == 1 || rest.degree() == Some(1) {
            if let Some(1) = rest.degree() {
                let r = -&rest.coeff(0);
                if !found.contains(&r) {
                    found.push(r);
                }
            }
            return sorted_roots(found);
        }
        for z in aberth(&rest) {
            let (Some(re), Some(im)) = (rationalize(z.re), rationalize(z.im)) else {
                continue;
            };
            let cand = GR::new(re, im);
            if !found.contains(&cand) && rest.eval(&cand).is_zero() {
                found.push(cand);
            }
        }
        sorted_roots(found)
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.0
            .iter()
            .map(|c| {
                let (re, im) = c.to_f64_pair();
                Complex64::new(re, im)
            })
            .collect()
    }

    /// Prints in the polynomial grammar with the given variable name.
    pub fn display_in(&self, var: &str) -> String {
        let nvars = 1;
        super::poly::PolySeries::from_univariate(nvars, 0, self)
            .to_string()
            .replace("z1", var)
    }
}

fn sorted_roots(mut v: Vec<GR>) -> Vec<GR> {
    v.sort_by(|a, b| (a.re(), a.im()).cmp(&(b.re(), b.im())));
    v
}

fn rationalize(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let tol = 1e-9 * x.abs().max(1.0);
    if x.abs() < 1e-10 {
        return Some(BigRational::zero());
    }
    // continued fraction convergents
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut y = x;
    for _ in 0..40 {
        let a = y.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > 1_000_000_000 {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = y - a;
        if frac.abs() < 1e-15 {
            break;
        }
        y = 1.0 / frac;
    }
    None
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Simultaneous approximation of all roots of a monic polynomial.
fn aberth(p: &UniPoly) -> Vec<Complex64> {
    let c = p.to_complex();
    let n = c.len() - 1;
    let bound = 1.0 + c[..n].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(0.5 * bound, th)
        })
        .collect();
    for _ in 0..500 {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let (pv, dv) = horner(&c, z[i]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dv;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                worst = worst.max(w.norm() / z[i].norm().max(1.0));
            }
        }
        if worst < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (pv, dv) = horner(&c, *zi);
            if dv.norm() > 0.0 {
                *zi -= pv / dv;
            }
        }
    }
    z
}

impl<'a> Add<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn add(self, o: &UniPoly) -> UniPoly {
        let n = self.0.len().max(o.0.len());
        UniPoly::new((0..n).map(|k| &self.coeff(k) + &o.coeff(k)).collect())
    }
}

impl<'a> Sub<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn sub(self, o: &UniPoly) -> UniPoly {
        let n = self.0.len().max(o.0.len());
        UniPoly::new((0..n).map(|k| &self.coeff(k) - &o.coeff(k)).collect())
    }
}

impl<'a> Mul<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn mul(self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut c = vec![GR::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += &(a * b);
            }
        }
        UniPoly::new(c)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::new(self.0.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_in("x"))
    }
}
