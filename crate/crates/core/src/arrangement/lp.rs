//! Exact strict-feasibility test for systems of strict inequalities and
//! equalities, by maximizing a capped slack with a dense rational simplex.

use num_traits::{One, Signed, Zero};

use super::{Hyperplane, Side};
use crate::error::{Error, Result};
use crate::exact::{check_dim, dot, Point, Rational};
use crate::linalg::solve_affine;

/// Returns a point strictly satisfying every `Pos`/`Neg` constraint and
/// exactly satisfying every `Zero` constraint, or `None` if the relatively
/// open polyhedron is empty.
pub fn strict_feasible(dim: usize, constraints: &[(Hyperplane, Side)]) -> Result<Option<Point>> {
    if dim == 0 {
        return Err(Error::UnsupportedDimension(0));
    }
    for (h, _) in constraints {
        check_dim(dim, h.dim())?;
    }

    let (eq, strict): (Vec<_>, Vec<_>) = constraints.iter().partition(|(_, s)| *s == Side::Zero);
    let a: Vec<Vec<Rational>> = eq.iter().map(|(h, _)| h.normal().to_vec()).collect();
    let b: Vec<Rational> = eq.iter().map(|(h, _)| h.offset().clone()).collect();
    let Some((x0, null)) = solve_affine(&a, &b, dim) else { return Ok(None) };

    // sigma * (a.(x0 + N y) - b) = c + g.y
    let rows: Vec<(Vec<Rational>, Rational)> = strict
        .iter()
        .map(|(h, side)| {
            let flip = *side == Side::Neg;
            let mut c = h.value_unchecked(&x0);
            let mut g: Vec<Rational> = null.iter().map(|v| dot(h.normal(), v)).collect();
            if flip {
                c = -c;
                g.iter_mut().for_each(|q| *q = -q.clone());
            }
            (g, c)
        })
        .collect();

    let y = match slack_program(null.len(), &rows) {
        Some(y) => y,
        None => return Ok(None),
    };
    let mut x = x0;
    for (yi, v) in y.iter().zip(&null) {
        for (xj, vj) in x.iter_mut().zip(v) {
            *xj += yi * vj;
        }
    }
    Ok(Some(x))
}

/// Finds `y` with `g_h.y + c_h > 0` for all rows, or `None`.
///
/// Variables are `y = y+ - y-` and `u = 1 - s`; each row reads
/// `-g.y - u + slack = c - 1` and the program minimizes `u`. A basis with
/// `u < 1` already certifies feasibility, so the search stops there.
fn slack_program(k: usize, rows: &[(Vec<Rational>, Rational)]) -> Option<Vec<Rational>> {
    if rows.iter().all(|(_, c)| c.is_positive()) {
        return Some(vec![Rational::zero(); k]);
    }
    if k == 0 {
        return None;
    }
    let m = rows.len();
    let u_col = 2 * k;
    let ncols = 2 * k + 1 + m;
    let rhs_col = ncols;
    let mut t: Vec<Vec<Rational>> = rows
        .iter()
        .enumerate()
        .map(|(i, (g, c))| {
            let mut row = vec![Rational::zero(); ncols + 1];
            for (j, gj) in g.iter().enumerate() {
                row[j] = -gj.clone();
                row[k + j] = gj.clone();
            }
            row[u_col] = -Rational::one();
            row[u_col + 1 + i] = Rational::one();
            row[rhs_col] = c - Rational::one();
            row
        })
        .collect();
    let mut basis: Vec<usize> = (0..m).map(|i| u_col + 1 + i).collect();
    // Objective row for maximizing -u: w + u = 0.
    let mut obj = vec![Rational::zero(); ncols + 1];
    obj[u_col] = Rational::one();

    let worst = (0..m).min_by(|&a, &b| t[a][rhs_col].cmp(&t[b][rhs_col])).unwrap();
    if t[worst][rhs_col].is_negative() {
        pivot(&mut t, &mut obj, &mut basis, worst, u_col);
    }

    loop {
        let u_value = basis.iter().position(|&b| b == u_col).map_or_else(Rational::zero, |r| t[r][rhs_col].clone());
        if u_value < Rational::one() {
            let mut y = vec![Rational::zero(); k];
            for (r, &b) in basis.iter().enumerate() {
                if b < k {
                    y[b] += &t[r][rhs_col];
                } else if b < 2 * k {
                    y[b - k] -= &t[r][rhs_col];
                }
            }
            return Some(y);
        }
        // Bland's rule: lowest index with negative reduced cost enters.
        let enter = (0..ncols).find(|&j| obj[j].is_negative())?;
        let mut leave: Option<(usize, Rational)> = None;
        for r in 0..m {
            if t[r][enter].is_positive() {
                let ratio = &t[r][rhs_col] / &t[r][enter];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        // u >= 0 bounds the objective, so an entering column always has a
        // blocking row.
        let (r, _) = leave?;
        pivot(&mut t, &mut obj, &mut basis, r, enter);
    }
}

fn pivot(t: &mut [Vec<Rational>], obj: &mut [Rational], basis: &mut [usize], r: usize, c: usize) {
    let inv = t[r][c].recip();
    for v in t[r].iter_mut() {
        *v *= &inv;
    }
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != r && !row[c].is_zero() {
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
    }
    if !obj[c].is_zero() {
        let f = obj[c].clone();
        for (v, p) in obj.iter_mut().zip(&prow) {
            if !p.is_zero() {
                *v -= &f * p;
            }
        }
    }
    basis[r] = c;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, AffineMap};

    fn plane(normal: &[i64], offset: i64) -> Hyperplane {
        Hyperplane::new(normal.iter().map(|&v| int(v)).collect(), int(offset)).unwrap()
    }

    fn satisfies(x: &[Rational], cons: &[(Hyperplane, Side)]) -> bool {
        cons.iter().all(|(h, s)| Side::of(&h.value(x).unwrap()) == *s)
    }

    #[test]
    fn open_interval() {
        let cons = vec![(plane(&[1], 0), Side::Pos), (plane(&[1], 1), Side::Neg)];
        let x = strict_feasible(1, &cons).unwrap().unwrap();
        assert!(satisfies(&x, &cons));
    }

    #[test]
    fn contradictory_sides() {
        let cons = vec![(plane(&[1], 0), Side::Pos), (plane(&[1], 0), Side::Neg)];
        assert_eq!(strict_feasible(1, &cons).unwrap(), None);
    }

    #[test]
    fn point_on_the_dashed_line() {
        // On y = -x between the lower red triangle's corner and the grey piece:
        // x + y = 0 with 0 < x < 4 and below y = 0.
        let cons = vec![
            (Hyperplane::from_affine(&AffineMap::from_ints(&[1, 1], 0).unwrap()).unwrap(), Side::Zero),
            (plane(&[1, 0], 0), Side::Pos),
            (plane(&[1, 0], 4), Side::Neg),
            (plane(&[0, 1], 0), Side::Neg),
        ];
        let x = strict_feasible(2, &cons).unwrap().unwrap();
        assert!(satisfies(&x, &cons));
        assert_eq!(&x[0] + &x[1], int(0));
    }

    #[test]
    fn needs_pivots_far_from_origin() {
        // 10 < x < 11 and 20 < y < 21 with x + y > 30.5: origin is far away.
        let cons = vec![
            (plane(&[1, 0], 10), Side::Pos),
            (plane(&[1, 0], 11), Side::Neg),
            (plane(&[0, 1], 20), Side::Pos),
            (plane(&[0, 1], 21), Side::Neg),
            (Hyperplane::new(vec![int(2), int(2)], int(61)).unwrap(), Side::Pos),
        ];
        let x = strict_feasible(2, &cons).unwrap().unwrap();
        assert!(satisfies(&x, &cons));
        let mut tight = cons.clone();
        tight.push((plane(&[1, 1], 32), Side::Pos));
        assert_eq!(strict_feasible(2, &tight).unwrap(), None);
    }

    #[test]
    fn inconsistent_equalities() {
        let cons = vec![(plane(&[1, 0], 0), Side::Zero), (plane(&[1, 0], 1), Side::Zero)];
        assert_eq!(strict_feasible(2, &cons).unwrap(), None);
        assert!(strict_feasible(0, &[]).is_err());
    }
}
