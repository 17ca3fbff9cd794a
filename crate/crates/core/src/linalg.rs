//! Small exact dense linear algebra over rationals.

use num_traits::Zero;

use crate::exact::Rational;

/// Reduced row echelon form in place; returns the pivot column of each
/// nonzero row.
pub(crate) fn rref(rows: &mut [Vec<Rational>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub(crate) fn rank(vectors: &[&[Rational]]) -> usize {
    let mut rows: Vec<Vec<Rational>> = vectors.iter().map(|v| v.to_vec()).collect();
    rref(&mut rows).len()
}

/// Affine solution set of `A x = b`: a particular solution and a basis of
/// the null space. `None` when inconsistent.
pub(crate) fn solve_affine(a: &[Vec<Rational>], b: &[Rational], dim: usize) -> Option<(Vec<Rational>, Vec<Vec<Rational>>)> {
    let mut aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&dim) {
        return None;
    }
    let mut x0 = vec![Rational::zero(); dim];
    for (row, &c) in aug.iter().zip(&pivots) {
        x0[c] = row[dim].clone();
    }
    let free: Vec<usize> = (0..dim).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); dim];
            v[f] = num_traits::One::one();
            for (row, &c) in aug.iter().zip(&pivots) {
                v[c] = -row[f].clone();
            }
            v
        })
        .collect();
    Some((x0, basis))
}

/// Least-norm solution of a consistent full-row-rank system `N x = b`.
pub(crate) fn least_norm(n: &[&[Rational]], b: &[&Rational]) -> Option<Vec<Rational>> {
    let r = n.len();
    let dim = n.first()?.len();
    let gram: Vec<Vec<Rational>> = (0..r)
        .map(|i| (0..r).map(|j| crate::exact::dot(n[i], n[j])).collect())
        .collect();
    let rhs: Vec<Rational> = b.iter().map(|q| (*q).clone()).collect();
    let (y, null) = solve_affine(&gram, &rhs, r)?;
    if !null.is_empty() {
        return None;
    }
    let mut x = vec![Rational::zero(); dim];
    for (yi, row) in y.iter().zip(n) {
        for (xj, nij) in x.iter_mut().zip(row.iter()) {
            *xj += yi * nij;
        }
    }
    Some(x)
}
