//! Univariate Laurent series with explicit precision.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::poly::PolySeries;
use super::scalar::GaussianRational as GR;
use super::unipoly::UniPoly;
use crate::error::{Error, Result};

/// `sum_{k >= val} c_k t^k + O(t^prec)`. The zero series keeps only `prec`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaurentSeries {
    var: usize,
    val: i64,
    coeffs: Vec<GR>,
    prec: i64,
}

impl LaurentSeries {
    pub fn new(var: usize, val: i64, coeffs: Vec<GR>, prec: i64) -> Self {
        let mut s = LaurentSeries { var, val, coeffs, prec };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let known = (self.prec - self.val).max(0) as usize;
        self.coeffs.truncate(known);
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            Some(k) => {
                self.coeffs.drain(..k);
                self.val += k as i64;
                while self.coeffs.last().is_some_and(|c| c.is_zero()) {
                    self.coeffs.pop();
                }
            }
            None => {
                self.coeffs.clear();
                self.val = self.prec;
            }
        }
    }

    /// `p + O(t^prec)`.
    pub fn from_unipoly(var: usize, p: &UniPoly, prec: i64) -> Self {
        Self::new(var, 0, p.coeffs().to_vec(), prec)
    }

    /// Reads a polynomial or jet in a single variable; a jet of depth `d`
    /// is known through `t^d`. Exact input is cut at `prec`.
    pub fn from_poly_series(p: &PolySeries, var: usize, prec: i64) -> Result<Self> {
        let u = p.to_univariate(var).ok_or_else(|| {
            Error::InvalidInput(format!("{p} is not univariate in variable {}", var + 1))
        })?;
        let prec = match p.trunc_degree() {
            Some(d) => prec.min(d as i64 + 1),
            None => prec,
        };
        Ok(Self::from_unipoly(var, &u, prec))
    }

    pub fn var(&self) -> usize {
        self.var
    }

    pub fn valuation(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.val)
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `t^k`, if the precision covers it.
    pub fn coeff(&self, k: i64) -> Result<GR> {
        if k >= self.prec {
            return Err(Error::InsufficientTruncation(format!(
                "coefficient of t^{k} requested, series known below t^{}",
                self.prec
            )));
        }
        if k < self.val {
            return Ok(GR::zero());
        }
        Ok(self.coeffs.get((k - self.val) as usize).cloned().unwrap_or_else(GR::zero))
    }

    /// Coefficient of `t^-1`.
    pub fn residue(&self) -> Result<GR> {
        self.coeff(-1)
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * &GR::from_int(self.val + k as i64))
            .collect();
        Self::new(self.var, self.val - 1, coeffs, self.prec - 1)
    }

    pub fn scale(&self, c: &GR) -> Self {
        Self::new(self.var, self.val, self.coeffs.iter().map(|a| a * c).collect(), self.prec)
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self::new(self.var, self.val + k, self.coeffs.clone(), self.prec + k)
    }

    fn relative_precision(&self) -> i64 {
        self.prec - self.val
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDenominatorIdentically);
        }
        let r = self.relative_precision() as usize;
        let c0inv = self.coeffs[0].inv().unwrap();
        let mut out = vec![GR::zero(); r];
        for k in 0..r {
            let mut s = if k == 0 { GR::one() } else { GR::zero() };
            for j in 1..=k.min(self.coeffs.len() - 1) {
                s -= &(&self.coeffs[j] * &out[k - j]);
            }
            out[k] = &s * &c0inv;
        }
        Ok(Self::new(self.var, -self.val, out, -self.val + r as i64))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self * &o.inv()?)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::new(self.var, 0, vec![GR::one()], i64::MAX / 4);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }
}

impl<'a> Add<&'a LaurentSeries> for &'a LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, o: &LaurentSeries) -> LaurentSeries {
        let prec = self.prec.min(o.prec);
        let val = self.val.min(o.val);
        let len = (prec - val).max(0) as usize;
        let c = (0..len)
            .map(|k| {
                let e = val + k as i64;
                &self.coeff(e).unwrap_or_default() + &o.coeff(e).unwrap_or_default()
            })
            .collect();
        LaurentSeries::new(self.var, val, c, prec)
    }
}

impl<'a> Sub<&'a LaurentSeries> for &'a LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, o: &LaurentSeries) -> LaurentSeries {
        self + &(-o)
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        self.scale(&GR::from_int(-1))
    }
}

impl<'a> Mul<&'a LaurentSeries> for &'a LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, o: &LaurentSeries) -> LaurentSeries {
        let val = self.val + o.val;
        let prec = (self.prec + o.val).min(o.prec + self.val);
        if self.is_zero() || o.is_zero() {
            return LaurentSeries::new(self.var, prec, Vec::new(), prec);
        }
        let len = (prec - val).max(0) as usize;
        let mut c = vec![GR::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            for (j, b) in o.coeffs.iter().enumerate().take(len - i) {
                c[i + j] += &(a * b);
            }
        }
        LaurentSeries::new(self.var, val, c, prec)
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = format!("t{}", self.var + 1);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            write!(f, "({}){}^{} + ", c.to_poly_literal(), t, self.val + k as i64)?;
        }
        write!(f, "O({}^{})", t, self.prec)
    }
}

/// Coefficient of `t^-1` in `num/den` expanded at `t = 0`.
pub fn laurent_residue(num: &LaurentSeries, den: &LaurentSeries) -> Result<GR> {
    if den.is_zero() {
        return Err(Error::ZeroDenominatorIdentically);
    }
    num.div(den)?.residue()
}

/// Residue of the rational function `num/den` at `point`, computed exactly.
pub fn residue_rational(num: &UniPoly, den: &UniPoly, point: &GR) -> Result<GR> {
    if den.is_zero() {
        return Err(Error::ZeroDenominatorIdentically);
    }
    let n = num.taylor_shift(point);
    let d = den.taylor_shift(point);
    let v = d.valuation().unwrap() as i64;
    if v == 0 {
        return Ok(GR::zero());
    }
    let prec = v;
    let ns = LaurentSeries::from_unipoly(0, &n, prec);
    let ds = LaurentSeries::from_unipoly(0, &d, v + prec);
    laurent_residue(&ns, &ds)
}

/// Residue at infinity of `num/den dt`, via `-R(1/s)/s^2` at `s = 0`.
pub fn residue_at_infinity(num: &UniPoly, den: &UniPoly) -> Result<GR> {
    if den.is_zero() {
        return Err(Error::ZeroDenominatorIdentically);
    }
    let dn = num.degree().unwrap_or(0);
    let dd = den.degree().unwrap();
    let deg = dn.max(dd);
    // R(1/s) = s^(dd - dn) * rev(num)/rev(den) with both reversed at `deg`
    let rn = num.reversed(deg);
    let rd = den.reversed(deg);
    // -R(1/s)/s^2 = -rn/(rd * s^2)
    let rd2 = &rd * &UniPoly::from_ints(&[0, 0, 1]);
    residue_rational(&(-&rn), &rd2, &GR::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_fraction_residues() {
        let one = UniPoly::one();
        let den = UniPoly::from_ints(&[0, -1, 1]);
        assert_eq!(residue_rational(&one, &den, &GR::zero()).unwrap(), GR::from_int(-1));
        assert_eq!(residue_rational(&one, &den, &GR::one()).unwrap(), GR::one());
        assert_eq!(residue_at_infinity(&one, &den).unwrap(), GR::zero());
        let t = UniPoly::x();
        assert_eq!(residue_rational(&t, &t, &GR::zero()).unwrap(), GR::zero());
        let t2 = UniPoly::from_ints(&[0, 0, 1]);
        assert_eq!(residue_rational(&one, &t2, &GR::zero()).unwrap(), GR::zero());
    }

    #[test]
    fn residue_at_infinity_of_simple_pole() {
        // 1/t has residue 1 at 0 and -1 at infinity
        assert_eq!(
            residue_at_infinity(&UniPoly::one(), &UniPoly::x()).unwrap(),
            GR::from_int(-1)
        );
        // t^2/(t-1): residue 1 at t = 1, so -1 at infinity
        let num = UniPoly::from_ints(&[0, 0, 1]);
        let den = UniPoly::from_ints(&[-1, 1]);
        assert_eq!(residue_at_infinity(&num, &den).unwrap(), GR::from_int(-1));
    }

    #[test]
    fn depth_is_enforced() {
        let num = LaurentSeries::from_unipoly(0, &UniPoly::one(), 1);
        let den = LaurentSeries::from_unipoly(0, &UniPoly::from_ints(&[0, 0, 0, 1]), 4);
        // 1/t^3 known only through relative depth 1: t^-3 + O(t^-2)
        assert!(matches!(
            laurent_residue(&num, &den),
            Err(Error::InsufficientTruncation(_))
        ));
    }

    #[test]
    fn derivative_has_no_residue() {
        let s = LaurentSeries::new(0, -3, (1..8).map(GR::from_int).collect(), 4);
        assert_eq!(s.derivative().residue().unwrap(), GR::zero());
    }
}
