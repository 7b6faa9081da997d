//! Small dense matrices over `Q(i)` and over polynomials.

use num_traits::{One, Zero};

use super::poly::PolySeries;
use super::scalar::GaussianRational as GR;

pub type Matrix = Vec<Vec<GR>>;

/// Determinant by fraction-producing Gaussian elimination.
pub fn det(m: &Matrix) -> GR {
    let n = m.len();
    let mut a = m.clone();
    let mut d = GR::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return GR::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        let piv = a[c][c].clone();
        d = &d * &piv;
        let inv = piv.inv().unwrap();
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] * &inv;
            for k in c..n {
                let t = &f * &a[c][k];
                a[r][k] -= &t;
            }
        }
    }
    d
}

/// Inverse by Gauss-Jordan elimination, `None` if singular.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { GR::one() } else { GR::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(p, c);
        let inv = a[c][c].inv().unwrap();
        for x in a[c].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone();
            for k in 0..2 * n {
                let t = &f * &a[c][k];
                a[r][k] -= &t;
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Determinant of a polynomial matrix by cofactor expansion (small sizes).
pub fn det_poly(m: &[Vec<PolySeries>]) -> PolySeries {
    let n = m.len();
    if n == 0 {
        return PolySeries::one(0);
    }
    let nv = m[0][0].nvars();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = PolySeries::zero(nv);
    for c in 0..n {
        if m[0][c].is_zero() && m[0][c].is_exact() {
            continue;
        }
        let minor: Vec<Vec<PolySeries>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| *k != c).map(|(_, x)| x.clone()).collect())
            .collect();
        let t = &m[0][c] * &det_poly(&minor);
        acc = if c % 2 == 0 { &acc + &t } else { &acc - &t };
    }
    acc
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut s = GR::zero();
                    for k in 0..n {
                        s += &(&a[i][k] * &b[k][j]);
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// `e_0..e_n`, the elementary symmetric functions of the eigenvalues, i.e.
/// `det(I + tM) = sum e_j t^j` (Faddeev-LeVerrier).
pub fn elementary_symmetric(m: &Matrix) -> Vec<GR> {
    let n = m.len();
    // characteristic polynomial det(tI - M) = sum c_k t^(n-k), c_0 = 1
    let mut c = vec![GR::one()];
    let mut mk: Matrix = vec![vec![GR::zero(); n]; n];
    for k in 1..=n {
        // M_k = M * M_{k-1} + c_{k-1} I
        let mut next = matmul(m, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &c[k - 1];
        }
        mk = next;
        let am = matmul(m, &mk);
        let tr = (0..n).fold(GR::zero(), |s, i| &s + &am[i][i]);
        c.push(&(-&tr) / &GR::from_int(k as i64));
    }
    // e_k = (-1)^k c_k
    c.into_iter()
        .enumerate()
        .map(|(k, v)| if k % 2 == 0 { v } else { -v })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| GR::from_int(x)).collect()).collect()
    }

    #[test]
    fn determinants() {
        assert_eq!(det(&m(&[&[2, 1], &[1, 3]])), GR::from_int(5));
        assert_eq!(det(&m(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 4]])), GR::from_int(-4));
        assert_eq!(det(&m(&[&[1, 2], &[2, 4]])), GR::zero());
        let a = m(&[&[2, 1], &[1, 3]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(matmul(&a, &inv), m(&[&[1, 0], &[0, 1]]));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn symmetric_functions_of_triangular_matrix() {
        // eigenvalues 1, 2, 3
        let e = elementary_symmetric(&m(&[&[1, 5, 7], &[0, 2, 9], &[0, 0, 3]]));
        assert_eq!(e, vec![GR::from_int(1), GR::from_int(6), GR::from_int(11), GR::from_int(6)]);
    }
}
