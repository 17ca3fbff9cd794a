//! Brute-force cross-checks: grid sampling of pieces and sign vectors,
//! exhaustive monotone-path search, and random instance generators.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use petgraph::unionfind::UnionFind;
use rand::Rng;

use crate::arrangement::{Arrangement, Hyperplane, Side};
use crate::constructions::paths::{arrangement_vertices, spline_1d};
use crate::constructions::LineFamily;
use crate::cpa::CpaExpr;
use crate::error::{Error, Result};
use crate::pieces::{bisector_arrangement, decompose};
use crate::exact::{dot, int, rat, AffineMap, Point, Rational};

pub type GridBox = [(Rational, Rational)];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleReport {
    /// Connected groups of grid cells sharing a component.
    pub pieces: usize,
    /// Grid step per axis. Features narrower than this may be missed.
    pub step: Vec<Rational>,
}

fn check_grid(grid: &GridBox, resolution: usize) -> Result<()> {
    if resolution < 2 {
        return Err(Error::InvalidParameter(format!("resolution must be at least 2, got {resolution}")));
    }
    if let Some((lo, hi)) = grid.iter().find(|(lo, hi)| lo >= hi) {
        return Err(Error::InvalidRange { lo: lo.to_string(), hi: hi.to_string() });
    }
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty box".into()));
    }
    Ok(())
}

/// Centers of a `resolution^d` grid, row-major with the last axis fastest.
fn centers(grid: &GridBox, resolution: usize) -> (Vec<Rational>, Vec<Point>) {
    let steps: Vec<Rational> = grid.iter().map(|(lo, hi)| (hi - lo) / int(resolution as i64)).collect();
    let half = rat(1, 2);
    let d = grid.len();
    let total = resolution.pow(d as u32);
    let mut points = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rest = flat;
        let mut p = vec![Rational::zero(); d];
        for k in (0..d).rev() {
            let i = rest % resolution;
            rest /= resolution;
            p[k] = &grid[k].0 + &steps[k] * (int(i as i64) + &half);
        }
        points.push(p);
    }
    (steps, points)
}

fn unflatten(mut flat: usize, d: usize, resolution: usize) -> Vec<usize> {
    let mut index = vec![0; d];
    for k in (0..d).rev() {
        index[k] = flat % resolution;
        flat /= resolution;
    }
    index
}

/// Offsets in `{-r, .., r}^d` that are lexicographically positive.
fn forward_offsets(d: usize, r: i64) -> Vec<Vec<i64>> {
    let width = (2 * r + 1) as usize;
    let mut out = Vec::new();
    for code in 0..width.pow(d as u32) {
        let mut rest = code;
        let off: Vec<i64> = (0..d)
            .map(|_| {
                let v = (rest % width) as i64 - r;
                rest /= width;
                v
            })
            .collect();
        if off.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0) {
            out.push(off);
        }
    }
    out
}

/// Index of the leaf that `e` follows just off `x` in a fixed generic
/// direction.
fn local_component(e: &CpaExpr, leaves: &[AffineMap], x: &[Rational], scale: &Rational) -> usize {
    let d = x.len();
    let direction: Vec<Rational> = (0..d).map(|k| rat(1, 7i64.pow(k as u32) * 3 + k as i64)).collect();
    let mut eps = scale / int(1000);
    for _ in 0..8 {
        let y: Vec<Rational> = x.iter().zip(&direction).map(|(a, v)| a + &eps * v).collect();
        let value = e.eval_unchecked(&y);
        let matches: Vec<usize> = (0..leaves.len()).filter(|&i| leaves[i].eval_unchecked(&y) == value).collect();
        if matches.len() == 1 {
            return matches[0];
        }
        eps /= int(10);
    }
    let value = e.eval_unchecked(x);
    (0..leaves.len()).find(|&i| leaves[i].eval_unchecked(x) == value).expect("some leaf attains the value")
}

/// Counts groups of grid cells, connected through shared faces or corners,
/// on which `e` follows the same leaf. Each group lies in a single maximal piece at
/// fine enough resolution, so the count estimates the maximal pieces that
/// meet the box.
pub fn sample_piece_lower_bound(e: &CpaExpr, grid: &GridBox, resolution: usize) -> Result<SampleReport> {
    check_grid(grid, resolution)?;
    if grid.len() != e.dim() {
        return Err(Error::DimensionMismatch { expected: e.dim(), got: grid.len() });
    }
    let leaves = e.leaf_components();
    let (step, points) = centers(grid, resolution);
    let scale = step.iter().min().expect("nonempty box").clone();
    let labels: Vec<usize> = points.iter().map(|p| local_component(e, leaves.as_slice(), p, &scale)).collect();

    let d = grid.len();
    let neighbor = |flat: usize, off: &[i64]| -> Option<usize> {
        let index = unflatten(flat, d, resolution);
        let mut target = 0;
        for k in 0..d {
            let i = index[k] as i64 + off[k];
            if i < 0 || i >= resolution as i64 {
                return None;
            }
            target = target * resolution + i as usize;
        }
        Some(target)
    };
    let mut uf = UnionFind::<usize>::new(points.len());
    for flat in 0..points.len() {
        for off in &forward_offsets(d, 1) {
            if let Some(target) = neighbor(flat, off).filter(|&t| labels[flat] == labels[t]) {
                uf.union(flat, target);
            }
        }
    }
    // Thin regions break grid connectivity. Rejoin same-leaf samples that
    // see each other through a thin tube inside the region of their leaf,
    // first nearby ones, then representatives of whole groups. The tube
    // keeps pieces that only touch along a lower-dimensional set apart.
    let margin = &scale / int(1024);
    let reach = forward_offsets(d, 3);
    for flat in 0..points.len() {
        for off in &reach {
            if let Some(target) = neighbor(flat, off) {
                if labels[flat] == labels[target]
                    && !uf.equiv(flat, target)
                    && tube_on_leaf(e, leaves.as_slice(), labels[flat], &points[flat], &points[target], &margin)
                {
                    uf.union(flat, target);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..points.len() {
        groups.entry(uf.find(i)).or_default().push(i);
    }
    let reps: Vec<(usize, Vec<usize>)> = groups.into_iter().map(|(root, members)| (root, spread(&members, 10))).collect();
    for a in 0..reps.len() {
        for b in a + 1..reps.len() {
            let label = labels[reps[a].0];
            if label != labels[reps[b].0] || uf.equiv(reps[a].0, reps[b].0) {
                continue;
            }
            let joined = reps[a].1.iter().any(|&p| {
                reps[b].1.iter().any(|&q| tube_on_leaf(e, leaves.as_slice(), label, &points[p], &points[q], &margin))
            });
            if joined {
                uf.union(reps[a].0, reps[b].0);
            }
        }
    }
    let roots: BTreeSet<usize> = (0..points.len()).map(|i| uf.find(i)).collect();
    Ok(SampleReport { pieces: roots.len(), step })
}

/// Up to `k` members spread evenly over the list.
fn spread(members: &[usize], k: usize) -> Vec<usize> {
    if members.len() <= k {
        return members.to_vec();
    }
    (0..k).map(|i| members[i * (members.len() - 1) / (k - 1)]).collect()
}

/// Whether `e` equals `leaves[label]` on the whole segment from `p` to `q`.
/// Both sides are affine between consecutive leaf crossings along the
/// segment, so checking the crossings and endpoints suffices.
fn segment_on_leaf(e: &CpaExpr, leaves: &[AffineMap], label: usize, p: &[Rational], q: &[Rational]) -> bool {
    let dir: Vec<Rational> = p.iter().zip(q).map(|(a, b)| b - a).collect();
    let along: Vec<(Rational, Rational)> = leaves.iter().map(|f| (f.eval_unchecked(p), dot(f.gradient(), &dir))).collect();
    let mut params = vec![Rational::zero(), Rational::one()];
    for i in 0..along.len() {
        for j in i + 1..along.len() {
            let ds = &along[i].1 - &along[j].1;
            if !ds.is_zero() {
                let s = (&along[j].0 - &along[i].0) / ds;
                if s > Rational::zero() && s < Rational::one() {
                    params.push(s);
                }
            }
        }
    }
    params.iter().all(|s| {
        let x: Vec<Rational> = p.iter().zip(&dir).map(|(a, v)| a + s * v).collect();
        e.eval_unchecked(&x) == &along[label].0 + s * &along[label].1
    })
}

/// [`segment_on_leaf`] for the segment and its copies shifted by `margin`
/// along each coordinate axis.
fn tube_on_leaf(e: &CpaExpr, leaves: &[AffineMap], label: usize, p: &[Rational], q: &[Rational], margin: &Rational) -> bool {
    if !segment_on_leaf(e, leaves, label, p, q) {
        return false;
    }
    (0..p.len()).all(|k| {
        [margin.clone(), -margin.clone()].iter().all(|m| {
            let (mut a, mut b) = (p.to_vec(), q.to_vec());
            a[k] += m;
            b[k] += m;
            segment_on_leaf(e, leaves, label, &a, &b)
        })
    })
}

/// Box containing a witness of every cell and every facet of the
/// arrangement of all bisectors between active components, inflated by 1.
/// Each maximal piece meets it in a connected set, so grid counts inside it
/// are comparable with global counts.
pub fn covering_box(e: &CpaExpr) -> Result<Vec<(Rational, Rational)>> {
    let dec = decompose(e)?;
    let arr = Arrangement::build(&bisector_arrangement(&dec.components), e.dim())?;
    let mut points: Vec<Point> = arr.cells().iter().map(|c| c.witness.clone()).collect();
    points.extend(arr.adjacency()?.into_iter().map(|a| a.facet_witness));
    Ok((0..e.dim())
        .map(|k| {
            let lo = points.iter().map(|p| &p[k]).min().cloned().unwrap_or_else(Rational::zero);
            let hi = points.iter().map(|p| &p[k]).max().cloned().unwrap_or_else(Rational::zero);
            (lo - Rational::one(), hi + Rational::one())
        })
        .collect())
}

/// Longest x-monotone path by enumerating every subset of vertices.
pub fn exhaustive_monotone_paths(family: &LineFamily, max_n: usize) -> Result<usize> {
    if family.len() > max_n {
        return Err(Error::TooLarge(format!("{} lines exceed the exhaustive limit {max_n}", family.len())));
    }
    let verts = arrangement_vertices(family);
    if verts.len() > 20 {
        return Err(Error::TooLarge(format!("{} vertices", verts.len())));
    }
    let mut best = 0;
    for mask in 1u32..(1 << verts.len()) {
        if mask.count_ones() < 2 {
            continue;
        }
        // Vertices are sorted by (x, y); a valid sequence has distinct x.
        let seq: Vec<usize> = (0..verts.len()).filter(|&i| mask >> i & 1 == 1).collect();
        if seq.windows(2).any(|w| verts[w[0]].x == verts[w[1]].x) {
            continue;
        }
        let mut carriers = Vec::with_capacity(seq.len() - 1);
        let mut ok = true;
        for w in seq.windows(2) {
            match verts[w[0]].lines.iter().find(|l| verts[w[1]].lines.contains(l)) {
                Some(&l) => carriers.push(l),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let runs = 1 + carriers.windows(2).filter(|c| c[0] != c[1]).count();
            best = best.max(runs);
        }
    }
    if best == 0 {
        return Err(Error::NoPath("no two vertices share a line".into()));
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignScan {
    pub vectors: BTreeSet<Vec<Side>>,
    pub samples: usize,
}

impl SignScan {
    /// Fraction of `cells` seen by the scan.
    pub fn coverage(&self, cells: usize) -> f64 {
        if cells == 0 {
            return 1.0;
        }
        self.vectors.len() as f64 / cells as f64
    }
}

/// Strict sign vectors observed at grid cell centers.
pub fn sign_scan(planes: &[Hyperplane], grid: &GridBox, resolution: usize) -> Result<SignScan> {
    check_grid(grid, resolution)?;
    if let Some(h) = planes.iter().find(|h| h.dim() != grid.len()) {
        return Err(Error::DimensionMismatch { expected: grid.len(), got: h.dim() });
    }
    let (_, points) = centers(grid, resolution);
    let mut vectors = BTreeSet::new();
    for p in &points {
        let signs: Vec<Side> = planes.iter().map(|h| Side::of(&h.value_unchecked(p))).collect();
        if !signs.contains(&Side::Zero) {
            vectors.insert(signs);
        }
    }
    Ok(SignScan { vectors, samples: points.len() })
}

/// Random min/max tree over `leaves` affine maps with small integer data.
pub fn random_expr(rng: &mut impl Rng, dim: usize, leaves: usize) -> Result<CpaExpr> {
    if leaves == 0 || dim == 0 {
        return Err(Error::InvalidParameter("random expressions need a leaf and a dimension".into()));
    }
    let mut nodes: Vec<CpaExpr> = (0..leaves)
        .map(|_| {
            let gradient: Vec<Rational> = (0..dim).map(|_| int(rng.gen_range(-3..=3))).collect();
            AffineMap::new(gradient, int(rng.gen_range(-4..=4))).map(CpaExpr::Leaf)
        })
        .collect::<Result<_>>()?;
    while nodes.len() > 1 {
        let take = rng.gen_range(2..=nodes.len().min(3));
        let at = rng.gen_range(0..=nodes.len() - take);
        let children: Vec<CpaExpr> = nodes.drain(at..at + take).collect();
        let node = if rng.gen_bool(0.5) { CpaExpr::min(children)? } else { CpaExpr::max(children)? };
        nodes.insert(at, node);
    }
    Ok(nodes.pop().expect("one node left"))
}

/// Random continuous 1-D spline with exactly `pieces` maximal pieces:
/// integer breakpoints and consecutive slopes that always differ.
pub fn random_spline(rng: &mut impl Rng, pieces: usize) -> Result<CpaExpr> {
    if pieces == 0 {
        return Err(Error::InvalidParameter("a spline needs at least one piece".into()));
    }
    let mut breaks: Vec<Rational> = Vec::with_capacity(pieces - 1);
    let mut x = int(rng.gen_range(-6..=0));
    for _ in 1..pieces {
        breaks.push(x.clone());
        x += int(rng.gen_range(1..=3));
    }
    let mut maps = Vec::with_capacity(pieces);
    let mut slope = int(rng.gen_range(-3..=3));
    let mut offset = int(rng.gen_range(-4..=4));
    maps.push(AffineMap::new(vec![slope.clone()], offset.clone())?);
    for b in &breaks {
        let value = &slope * b + &offset;
        let mut next = slope.clone();
        while next == slope {
            next = rat(rng.gen_range(-6..=6), 2);
        }
        slope = next;
        offset = value - &slope * b;
        maps.push(AffineMap::new(vec![slope.clone()], offset.clone())?);
    }
    spline_1d(&breaks, &maps)
}

/// Symmetric box `[-r, r]^d`.
pub fn cube(dim: usize, r: i64) -> Vec<(Rational, Rational)> {
    vec![(int(-r), int(r)); dim]
}

/// Whether `e` is affine on the whole space, tested at the unit simplex.
pub fn looks_affine(e: &CpaExpr) -> bool {
    let d = e.dim();
    let origin = vec![Rational::zero(); d];
    let base = e.eval_unchecked(&origin);
    let mut probe = origin.clone();
    let grads: Vec<Rational> = (0..d)
        .map(|k| {
            probe[k] = Rational::one();
            let v = e.eval_unchecked(&probe) - &base;
            probe[k] = Rational::zero();
            v
        })
        .collect();
    let guess = AffineMap::new(grads, base).expect("positive dimension");
    let far: Vec<Rational> = (0..d).map(|k| int(37 * (k as i64 + 1))).collect();
    let neg: Vec<Rational> = far.iter().map(|v| -v).collect();
    [far, neg].iter().all(|p| guess.eval_unchecked(p) == e.eval_unchecked(p))
}
