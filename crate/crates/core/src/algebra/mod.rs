//! Exact arithmetic kernel.

pub mod laurent;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod scalar;
pub mod solve;
pub mod unipoly;

pub use laurent::{laurent_residue, residue_at_infinity, residue_rational, LaurentSeries};
pub use parse::parse_poly;
pub use poly::{Monomial, PolySeries};
pub use scalar::GaussianRational;
pub use unipoly::UniPoly;

use num_traits::Zero;

use crate::error::{Error, Result};

pub fn ps_compose(f: &PolySeries, args: &[PolySeries]) -> Result<PolySeries> {
    f.compose(args)
}

pub fn ps_divide_exact(num: &PolySeries, den: &PolySeries) -> Result<PolySeries> {
    num.divide_exact(den)
}

pub fn restrict_to_hyperplane(f: &PolySeries, var: usize) -> PolySeries {
    f.set_zero(&[var])
}

pub fn ps_derive(f: &PolySeries, var: usize) -> PolySeries {
    f.derive(var)
}

/// Linear part of a map vanishing at the origin: `a[j][k]` is the
/// coefficient of `z_k` in component `j`.
pub fn linear_part(map: &[PolySeries]) -> linalg::Matrix {
    let n = map.first().map_or(0, |c| c.nvars());
    map.iter()
        .map(|c| (0..n).map(|k| c.coeff(&Monomial::var(n, k))).collect())
        .collect()
}

/// Compositional inverse, as jets of depth `d`, of a map fixing the origin
/// with invertible linear part.
pub fn invert_map(map: &[PolySeries], d: u32) -> Result<Vec<PolySeries>> {
    let n = map.len();
    if map.iter().any(|c| c.nvars() != n || !c.constant_term().is_zero()) {
        return Err(Error::InvalidInput("map must fix the origin of its own space".into()));
    }
    let a = linear_part(map);
    let ainv = linalg::inverse(&a)
        .ok_or_else(|| Error::InvalidInput("linear part is singular".into()))?;
    let apply = |v: &[PolySeries]| -> Vec<PolySeries> {
        (0..n)
            .map(|j| {
                (0..n).fold(PolySeries::zero(n), |acc, k| &acc + &v[k].scale(&ainv[j][k]))
            })
            .collect()
    };
    let nonlinear: Vec<PolySeries> = map
        .iter()
        .map(|c| {
            PolySeries::from_terms(
                n,
                c.terms().filter(|(m, _)| m.degree() >= 2).map(|(m, c)| (m.clone(), c.clone())),
            )
        })
        .collect();
    let w: Vec<PolySeries> = (0..n).map(|k| PolySeries::var(n, k).with_trunc(d)).collect();
    let mut s = apply(&w);
    for _ in 0..d {
        let mut rhs = Vec::with_capacity(n);
        for j in 0..n {
            let nj = nonlinear[j].clone().with_trunc(d).compose(&s)?;
            rhs.push((&w[j] - &nj).with_trunc(d));
        }
        let next: Vec<PolySeries> = apply(&rhs).into_iter().map(|c| c.with_trunc(d)).collect();
        if next == s {
            break;
        }
        s = next;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_map_composes_to_identity() {
        let t = vec![
            parse_poly("2*z1 + z1*z2", 2).unwrap(),
            parse_poly("z2 + z1 + 3*z2^2", 2).unwrap(),
        ];
        let s = invert_map(&t, 6).unwrap();
        for j in 0..2 {
            let back = t[j].compose(&s).unwrap();
            assert_eq!(back, PolySeries::var(2, j).with_trunc(6));
        }
    }
}
