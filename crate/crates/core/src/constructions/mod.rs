//! Extremal constructions: sawtooth functions, the lift `min(f(x), s(t))`,
//! iterated lifts and monotone-path functions.

pub mod lines;
pub mod paths;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::cpa::CpaExpr;
use crate::error::{Error, Result};
use crate::exact::{int, AffineMap, Rational};
use crate::pieces::{decompose, pieces_1d, PieceDecomposition};

pub use lines::{line_family, FamilyKind, Line, LineFamily};
pub use paths::{arrangement_vertices, longest_monotone_path, path_to_cpa, spline_1d, MonotonePath};

/// The `m`-sawtooth: linear interpolation of `(i, z_i)` for `i = 0..2m`,
/// `z_i = z_min` at even and `z_max` at odd knots, extended linearly.
///
/// Written as the max over teeth of `min(rise_k, fall_k)`.
pub fn sawtooth(m: usize, z_min: &Rational, z_max: &Rational) -> Result<CpaExpr> {
    if m == 0 {
        return Err(Error::InvalidParameter("sawtooth needs m >= 1".into()));
    }
    if z_min >= z_max {
        return Err(Error::InvalidRange { lo: z_min.to_string(), hi: z_max.to_string() });
    }
    let delta = z_max - z_min;
    let teeth = (0..m)
        .map(|k| {
            let k = int(k as i64);
            let two_k = &k + &k;
            let rise = AffineMap::new(vec![delta.clone()], z_min - &delta * &two_k)?;
            let fall = AffineMap::new(vec![-delta.clone()], z_max + &delta * (two_k + Rational::one()))?;
            CpaExpr::min(vec![CpaExpr::Leaf(rise), CpaExpr::Leaf(fall)])
        })
        .collect::<Result<Vec<_>>>()?;
    CpaExpr::max(teeth)
}

/// Guaranteed consequences of a construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub certified_pieces_lower_bound: u64,
    pub component_budget: usize,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

/// Result of one lift.
#[derive(Clone, Debug)]
pub struct Lift {
    /// `h(x, t) = min(clamped(x), s(t))` in dimension `d + 1`.
    pub expr: CpaExpr,
    pub clamped: CpaExpr,
    pub m: usize,
    /// Sawtooth range.
    pub z_min: Rational,
    pub z_max: Rational,
    /// Box in the input space meeting every maximal piece of the input.
    pub reference_box: Vec<(Rational, Rational)>,
    /// Maximal pieces of the clamped input.
    pub base_pieces: usize,
    pub certificate: Certificate,
}

/// Lifts `f` to one dimension higher, multiplying its maximal piece count
/// by at least `m`.
///
/// `f` is clamped to a range strictly inside the sawtooth's so that the
/// sawtooth dips below `f` between teeth and rises above it at each peak.
pub fn lift(f: &CpaExpr, m: usize) -> Result<Lift> {
    let dec = count(f)?;
    let reference_box = witness_box(&dec);
    let step = lift_over(f, m, &reference_box)?;
    let base_pieces = count(&step.clamped)?.maximal_piece_count();
    let certificate = Certificate {
        certified_pieces_lower_bound: m as u64 * base_pieces as u64,
        component_budget: f.leaf_components().len() + 2 + 2 * m,
    };
    Ok(Lift {
        expr: step.expr,
        clamped: step.clamped,
        m,
        z_min: step.z_min,
        z_max: step.z_max,
        reference_box,
        base_pieces,
        certificate,
    })
}

struct LiftStep {
    expr: CpaExpr,
    clamped: CpaExpr,
    z_min: Rational,
    z_max: Rational,
}

fn lift_over(f: &CpaExpr, m: usize, reference_box: &[(Rational, Rational)]) -> Result<LiftStep> {
    if m == 0 {
        return Err(Error::InvalidParameter("lift needs m >= 1".into()));
    }
    let d = f.dim();
    let (lo, hi) = range_enclosure(f, reference_box);
    let one = Rational::one();
    let clamped = f.clamp(&(&lo - &one), &(&hi + &one))?;
    let z_min = &lo - int(2);
    let z_max = &hi + int(2);
    let s = sawtooth(m, &z_min, &z_max)?;
    let positions: Vec<usize> = (0..d).collect();
    let expr = CpaExpr::min(vec![clamped.embed(d + 1, &positions)?, s.embed(d + 1, &[d])?])?;
    Ok(LiftStep { expr, clamped, z_min, z_max })
}

fn count(f: &CpaExpr) -> Result<PieceDecomposition> {
    if f.dim() == 1 {
        pieces_1d(f)
    } else {
        decompose(f)
    }
}

/// Bounding box of all cell witnesses, inflated by 1.
fn witness_box(dec: &PieceDecomposition) -> Vec<(Rational, Rational)> {
    (0..dec.dim)
        .map(|k| {
            let coords = dec.cells.iter().map(|c| &c.witness[k]);
            let lo = coords.clone().min().cloned().unwrap_or_else(Rational::zero);
            let hi = coords.max().cloned().unwrap_or_else(Rational::zero);
            (lo - Rational::one(), hi + Rational::one())
        })
        .collect()
}

/// Interval containing `f` over the box: every value of `f` is a value of
/// some leaf, and affine maps attain their extremes at corners.
fn range_enclosure(f: &CpaExpr, reference_box: &[(Rational, Rational)]) -> (Rational, Rational) {
    let d = reference_box.len();
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    for g in f.leaf_components().iter() {
        for mask in 0u64..(1 << d) {
            let corner: Vec<Rational> =
                (0..d).map(|k| if mask >> k & 1 == 1 { reference_box[k].1.clone() } else { reference_box[k].0.clone() }).collect();
            let v = g.eval_unchecked(&corner);
            if lo.as_ref().is_none_or(|l| v < *l) {
                lo = Some(v.clone());
            }
            if hi.as_ref().is_none_or(|h| v > *h) {
                hi = Some(v);
            }
        }
    }
    (lo.expect("expressions have leaves"), hi.expect("expressions have leaves"))
}

#[derive(Clone, Debug)]
pub struct IteratedLift {
    pub expr: CpaExpr,
    pub dim: usize,
    pub m: usize,
    /// Maximal pieces of the clamped one-dimensional input (of the input
    /// itself when no lift is applied).
    pub base_pieces: usize,
    pub certificate: Certificate,
}

/// Applies the lift `d - 1` times with the same `m`.
///
/// Later reference boxes extend the previous one by `[-1, 2m + 1]` in the
/// new coordinate, which contains every sawtooth peak.
pub fn iterate_lift(f: &CpaExpr, d: usize, m: usize) -> Result<IteratedLift> {
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: f.dim() });
    }
    if d == 0 {
        return Err(Error::InvalidParameter("target dimension must be at least 1".into()));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("lift needs m >= 1".into()));
    }
    let n0 = f.leaf_components().len();
    if d == 1 {
        let p = pieces_1d(f)?.maximal_piece_count();
        return Ok(IteratedLift {
            expr: f.clone(),
            dim: 1,
            m,
            base_pieces: p,
            certificate: Certificate { certified_pieces_lower_bound: p as u64, component_budget: n0 },
        });
    }
    let first = lift(f, m)?;
    let mut reference_box = first.reference_box.clone();
    let mut expr = first.expr;
    for _ in 2..d {
        reference_box.push((int(-1), int(2 * m as i64 + 1)));
        expr = lift_over(&expr, m, &reference_box)?.expr;
    }
    let certified = (m as u64).checked_pow(d as u32 - 1).and_then(|f| f.checked_mul(first.base_pieces as u64));
    Ok(IteratedLift {
        expr,
        dim: d,
        m,
        base_pieces: first.base_pieces,
        certificate: Certificate {
            certified_pieces_lower_bound: certified.ok_or_else(|| Error::TooLarge("certificate overflows u64".into()))?,
            component_budget: n0 + (d - 1) * (2 + 2 * m),
        },
    })
}

/// One member of the lower-bound family: a longest monotone path in a line
/// family, turned into a 1-D function and lifted to dimension `d`.
#[derive(Clone, Debug)]
pub struct Thm8Instance {
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub family: LineFamily,
    pub path: MonotonePath,
    pub base: CpaExpr,
    pub lifted: IteratedLift,
    pub certificate: Certificate,
}

/// Splits a component budget `n` into a sawtooth size `m` and a line count
/// `n - (d - 1)(2 + 2m)`, with `m = n / (6 + 3(d - 2))`. At `d = 2` this
/// gives `4m - 2` lines for `n = 6m`.
pub fn thm8_parameters(d: usize, n: usize) -> Result<(usize, usize)> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    if d == 1 {
        return if n >= 3 { Ok((1, n)) } else { Err(Error::InvalidParameter(format!("n = {n} is below 3 lines"))) };
    }
    let alpha = 6 + 3 * (d - 2);
    let m = n / alpha;
    let overhead = (d - 1) * (2 + 2 * m);
    if m == 0 || n < overhead + 3 {
        return Err(Error::InvalidParameter(format!("n = {n} is too small for d = {d}")));
    }
    Ok((m, n - overhead))
}

pub fn thm8_family(d: usize, n: usize, kind: FamilyKind, seed: u64) -> Result<Thm8Instance> {
    let (m, lines) = thm8_parameters(d, n)?;
    let family = line_family(kind, lines, seed)?;
    let path = longest_monotone_path(&family)?;
    let base = path_to_cpa(&path, &family)?;
    let lifted = iterate_lift(&base, d, m)?;
    let certified = (m as u64).pow(d as u32 - 1) * path.length as u64;
    let certificate = Certificate { certified_pieces_lower_bound: certified, component_budget: lifted.certificate.component_budget };
    Ok(Thm8Instance { d, n, m, family, path, base, lifted, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn abs_x() -> CpaExpr {
        CpaExpr::max(vec![
            CpaExpr::Leaf(AffineMap::from_ints(&[1], 0).unwrap()),
            CpaExpr::Leaf(AffineMap::from_ints(&[-1], 0).unwrap()),
        ])
        .unwrap()
    }

    #[test]
    fn sawtooth_knots() {
        let (lo, hi) = (rat(-1, 2), int(3));
        let s = sawtooth(3, &lo, &hi).unwrap();
        let values: Vec<_> = (0..=6).map(|t| s.eval(&[int(t)]).unwrap()).collect();
        assert_eq!(values, vec![lo.clone(), hi.clone(), lo.clone(), hi.clone(), lo.clone(), hi.clone(), lo]);
    }

    #[test]
    fn sawtooth_extends_linearly() {
        let s = sawtooth(2, &int(0), &int(1)).unwrap();
        assert_eq!(s.eval(&[rat(9, 2)]).unwrap(), rat(-1, 2));
        assert_eq!(s.eval(&[int(-2)]).unwrap(), int(-2));
        assert_eq!(s.leaf_components().len(), 4);
    }

    #[test]
    fn sawtooth_piece_counts() {
        for m in 1..=8 {
            let d = pieces_1d(&sawtooth(m, &int(-1), &int(2)).unwrap()).unwrap();
            assert_eq!(d.maximal_piece_count(), 2 * m);
            assert_eq!(d.n_active(), 2 * m);
        }
        let tent = sawtooth(1, &int(0), &int(1)).unwrap();
        assert!(matches!(tent, CpaExpr::Min(_)));
    }

    #[test]
    fn sawtooth_rejects_bad_parameters() {
        assert!(sawtooth(0, &int(0), &int(1)).is_err());
        assert!(matches!(sawtooth(2, &int(1), &int(1)), Err(Error::InvalidRange { .. })));
    }

    #[test]
    fn lift_of_abs() {
        let l = lift(&abs_x(), 2).unwrap();
        assert_eq!(l.base_pieces, 4);
        assert_eq!(l.certificate.certified_pieces_lower_bound, 8);
        assert_eq!(l.expr.dim(), 2);
        assert!(l.expr.leaf_components().len() <= 2 + 2 + 4);
        assert!(decompose(&l.expr).unwrap().maximal_piece_count() >= 8);
    }

    #[test]
    fn lift_keeps_the_strict_range_ordering() {
        let f = abs_x();
        let l = lift(&f, 3).unwrap();
        for x in -20..=20 {
            let v = l.clamped.eval(&[int(x)]).unwrap();
            assert!(l.z_min < v && v < l.z_max);
        }
    }

    #[test]
    fn lift_of_constant() {
        let c = CpaExpr::Leaf(AffineMap::from_ints(&[0], 5).unwrap());
        let l = lift(&c, 1).unwrap();
        assert!(decompose(&l.expr).unwrap().maximal_piece_count() >= 1);
        assert_eq!(l.certificate.component_budget, 5);
    }

    #[test]
    fn slicing_at_a_peak_recovers_the_clamped_input() {
        let l = lift(&abs_x(), 2).unwrap();
        for peak in [1, 3] {
            let slice = l.expr.restrict_to_slice(1, &int(peak)).unwrap();
            for x in -10..=10 {
                let x = [rat(x, 3)];
                assert_eq!(slice.eval(&x).unwrap(), l.clamped.eval(&x).unwrap());
            }
        }
    }

    #[test]
    fn iterate_lift_identity_and_two_steps() {
        let id = iterate_lift(&abs_x(), 1, 3).unwrap();
        assert_eq!(id.expr, abs_x());
        assert_eq!(id.certificate.certified_pieces_lower_bound, 2);

        let two = iterate_lift(&abs_x(), 2, 2).unwrap();
        assert_eq!(two.certificate.certified_pieces_lower_bound, 8);
        assert_eq!(two.certificate.component_budget, 2 + 6);
    }

    #[test]
    fn iterate_lift_to_three_dimensions() {
        let three = iterate_lift(&abs_x(), 3, 2).unwrap();
        assert_eq!(three.expr.dim(), 3);
        assert_eq!(three.certificate.certified_pieces_lower_bound, 16);
        assert!(three.expr.leaf_components().len() <= three.certificate.component_budget);
        assert!(decompose(&three.expr).unwrap().maximal_piece_count() >= 16);
    }

    #[test]
    fn thm8_parameters_fit_the_budget() {
        assert_eq!(thm8_parameters(2, 12).unwrap(), (2, 6));
        assert!(thm8_parameters(2, 5).is_err());
        assert_eq!(thm8_parameters(2, 36).unwrap(), (6, 22));
        for n in 12..60 {
            let (m, lines) = thm8_parameters(2, n).unwrap();
            assert!(lines + 2 + 2 * m <= n);
        }
    }

    #[test]
    fn thm8_family_certificate() {
        let inst = thm8_family(2, 12, FamilyKind::RandomGeneric, 1).unwrap();
        assert_eq!(inst.certificate.certified_pieces_lower_bound, 2 * inst.path.length as u64);
        assert!(inst.lifted.expr.leaf_components().len() <= 12);
        let p = decompose(&inst.lifted.expr).unwrap().maximal_piece_count();
        assert!(p as u64 >= inst.certificate.certified_pieces_lower_bound);
    }
}
