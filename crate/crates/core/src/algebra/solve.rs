//! Common zeros of small polynomial systems.
//!
//! One free variable is solved completely: rational roots are certified and
//! the rest is returned as squarefree factors. With more free variables all
//! but the last are scanned over a box of small-height rationals, so the
//! result is only as complete as the caller can certify by other means.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use super::poly::PolySeries;
use super::scalar::GaussianRational as GR;
use super::unipoly::UniPoly;
use crate::error::{Error, Result};

/// Zeros of a univariate system: `(root, multiplicity)` pairs and
/// `(squarefree factor without Q(i) roots, multiplicity)` pairs, where the
/// multiplicity is the order of vanishing of the gcd.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct UnivariateZeros {
    pub roots: Vec<(GR, u32)>,
    pub orbits: Vec<(UniPoly, u32)>,
}

impl UnivariateZeros {
    pub fn count(&self) -> u32 {
        self.roots.iter().map(|r| r.1).sum::<u32>()
            + self
                .orbits
                .iter()
                .map(|(p, k)| k * p.degree().unwrap_or(0) as u32)
                .sum::<u32>()
    }
}

/// Splits a nonzero polynomial into certified roots and algebraic factors.
pub fn univariate_zeros(g: &UniPoly) -> UnivariateZeros {
    let mut out = UnivariateZeros::default();
    for (s, k) in g.squarefree_decomposition() {
        let roots = s.gaussian_roots();
        let mut rest = s.clone();
        for r in &roots {
            rest = rest.divrem(&UniPoly::linear(r)).0;
            out.roots.push((r.clone(), k));
        }
        if rest.degree().unwrap_or(0) > 0 {
            out.orbits.push((rest.monic(), k));
        }
    }
    out.roots.sort_by(|a, b| (a.0.re(), a.0.im()).cmp(&(b.0.re(), b.0.im())));
    out
}

/// Common zeros of univariate polynomials via their gcd. `None` when every
/// polynomial is zero.
pub fn common_zeros(system: &[UniPoly]) -> Option<UnivariateZeros> {
    let g = system.iter().fold(UniPoly::zero(), |acc, p| acc.gcd(p));
    (!g.is_zero()).then(|| univariate_zeros(&g))
}

/// Rationals `p/q` in lowest terms with `|p|, q <= height`, ascending.
pub fn box_values(height: u32) -> Vec<GR> {
    let h = height as i64;
    let mut v = vec![BigRational::zero()];
    for q in 1..=h {
        for p in 1..=h {
            if p.gcd(&q) == 1 {
                let r = BigRational::new(BigInt::from(p), BigInt::from(q));
                v.push(-r.clone());
                v.push(r);
            }
        }
    }
    v.sort();
    v.into_iter().map(GR::from_rational).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct AffineZero {
    /// Values of all variables (unlisted ones are zero).
    pub point: Vec<GR>,
    pub multiplicity: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraicZero {
    /// Values of all variables except `var`.
    pub prefix: Vec<GR>,
    pub var: usize,
    pub minpoly: UniPoly,
    pub multiplicity: u32,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AffineZeros {
    pub points: Vec<AffineZero>,
    pub orbits: Vec<AlgebraicZero>,
    /// True when no box scan was needed.
    pub complete: bool,
}

/// Common zeros of `system` with the `free` variables unknown, the `fixed`
/// ones assigned, and all remaining variables set to zero.
pub fn affine_zeros(
    system: &[PolySeries],
    free: &[usize],
    fixed: &[(usize, GR)],
    height: u32,
) -> Result<AffineZeros> {
    let nvars = system.first().map_or(0, |p| p.nvars());
    if system.iter().any(|p| !p.is_exact()) {
        return Err(Error::TruncationTooLowToSolve(
            "singular loci are only solved for exact data".into(),
        ));
    }
    let mut base = vec![GR::zero(); nvars];
    for (v, x) in fixed {
        base[*v] = x.clone();
    }
    let mut out = AffineZeros { complete: free.len() <= 1, ..Default::default() };
    let Some((&last, scanned)) = free.split_last() else {
        let vanish = system
            .iter()
            .map(|p| p.eval(&base).map(|v| v.is_zero()))
            .collect::<Result<Vec<_>>>()?;
        if vanish.into_iter().all(|b| b) {
            out.points.push(AffineZero { point: base, multiplicity: 1 });
        }
        return Ok(out);
    };
    let values = box_values(height);
    let mut idx = vec![0usize; scanned.len()];
    loop {
        let mut pt = base.clone();
        for (k, &v) in scanned.iter().enumerate() {
            pt[v] = values[idx[k]].clone();
        }
        let mut uni = Vec::with_capacity(system.len());
        for p in system {
            let mut q = p.clone();
            for v in 0..nvars {
                if v != last {
                    q = q.substitute_constant(v, &pt[v])?;
                }
            }
            uni.push(q.to_univariate(last).expect("only one variable left"));
        }
        match common_zeros(&uni) {
            None => {
                return Err(Error::HypothesesUnmet(
                    "zero set of the section is not isolated".into(),
                ))
            }
            Some(z) => {
                for (r, k) in z.roots {
                    let mut point = pt.clone();
                    point[last] = r;
                    out.points.push(AffineZero { point, multiplicity: k });
                }
                for (m, k) in z.orbits {
                    out.orbits.push(AlgebraicZero {
                        prefix: pt.clone(),
                        var: last,
                        minpoly: m,
                        multiplicity: k,
                    });
                }
            }
        }
        // odometer over the box
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(out);
            }
            idx[k] += 1;
            if idx[k] < values.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::algebra::parse_poly;

    #[test]
    fn box_has_expected_size() {
        assert_eq!(box_values(1).len(), 3);
        assert_eq!(box_values(3).len(), 15);
    }

    #[test]
    fn univariate_split() {
        // x^2 (x - 1) (x^2 - 2)
        let p = &UniPoly::from_ints(&[0, 0, -1, 1]) * &UniPoly::from_ints(&[-2, 0, 1]);
        let z = univariate_zeros(&p);
        assert_eq!(z.roots, vec![(GR::zero(), 2), (GR::one(), 1)]);
        assert_eq!(z.orbits, vec![(UniPoly::from_ints(&[-2, 0, 1]), 1)]);
        assert_eq!(z.count(), 5);
    }

    #[test]
    fn box_search_in_the_plane() {
        let sys = vec![
            parse_poly("z1*(z1 - 1)", 2).unwrap(),
            parse_poly("z2*(z2 - 1)", 2).unwrap(),
        ];
        let z = affine_zeros(&sys, &[0, 1], &[], 2).unwrap();
        assert_eq!(z.points.len(), 4);
        assert!(!z.complete);
        let line = vec![parse_poly("z1*z2", 2).unwrap()];
        assert!(matches!(affine_zeros(&line, &[0, 1], &[], 1), Err(Error::HypothesesUnmet(_))));
    }
}
