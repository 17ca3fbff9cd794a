//! Active components, convex cells and maximal pieces of a CPA function.
//!
//! For each component `f_i` the domain is cut by the bisectors
//! `{f_i = f_j}`, `j != i`. On every resulting cell `f` either equals `f_i`
//! throughout or nowhere, so the cells where it does form a convex cover of
//! the region where `f_i` is active. Cells of the same component that share
//! a facet lie in one maximal piece; connected components of that
//! adjacency are exactly the maximal pieces.

use num_traits::{One, Zero};
use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::arrangement::{Arrangement, Hyperplane, Side};
use crate::cpa::{ComponentSet, CpaExpr, Node};
use crate::error::{Error, Result};
use crate::exact::{int, AffineMap, Point, Rational};

/// A convex cell on which a single component is active.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceCell {
    /// Index into [`PieceDecomposition::components`].
    pub component: usize,
    /// Signs relative to [`PieceDecomposition::component_planes`] of the
    /// component.
    pub signs: Vec<Side>,
    pub witness: Point,
}

/// A maximal piece: cells joined through shared facets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Piece {
    pub component: usize,
    pub cells: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct PieceDecomposition {
    pub dim: usize,
    /// Active components only.
    pub components: ComponentSet,
    /// Number of distinct leaves of the input expression.
    pub leaf_count: usize,
    pub cells: Vec<PieceCell>,
    pub pieces: Vec<Piece>,
    planes: Vec<Vec<Hyperplane>>,
}

impl PieceDecomposition {
    pub fn n_active(&self) -> usize {
        self.components.len()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn maximal_piece_count(&self) -> usize {
        self.pieces.len()
    }

    /// The bisectors that cut the cells of component `i`.
    pub fn component_planes(&self, i: usize) -> &[Hyperplane] {
        &self.planes[i]
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Report<'a> {
            n_active: usize,
            leaf_components: usize,
            cells: usize,
            maximal_pieces: usize,
            components: Vec<Node>,
            pieces: &'a [Piece],
        }
        serde_json::to_value(Report {
            n_active: self.n_active(),
            leaf_components: self.leaf_count,
            cells: self.cell_count(),
            maximal_pieces: self.maximal_piece_count(),
            components: self.components.iter().map(Node::leaf).collect(),
            pieces: &self.pieces,
        })
        .expect("report serializes")
    }
}

/// Zero sets of all pairwise differences, deduplicated. Pairs with a
/// constant difference contribute nothing.
pub fn bisector_arrangement(components: &ComponentSet) -> Vec<Hyperplane> {
    let mut planes = Vec::new();
    for i in 0..components.len() {
        for j in i + 1..components.len() {
            let diff = components.get(i).sub(components.get(j)).expect("components share a dimension");
            planes.extend(Hyperplane::from_affine(&diff));
        }
    }
    crate::arrangement::dedup_planes(&planes)
}

/// Bisectors between component `i` and every other component.
pub fn component_planes(components: &ComponentSet, i: usize) -> Vec<Hyperplane> {
    let fi = components.get(i);
    let planes: Vec<Hyperplane> = components
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .filter_map(|(_, fj)| Hyperplane::from_affine(&fi.sub(fj).expect("components share a dimension")))
        .collect();
    crate::arrangement::dedup_planes(&planes)
}

pub fn restrict_to_slice(e: &CpaExpr, axis: usize, value: &Rational) -> Result<CpaExpr> {
    e.restrict_to_slice(axis, value)
}

struct ComponentCells {
    planes: Vec<Hyperplane>,
    arrangement: Arrangement,
    active: Vec<usize>,
}

fn label_cells(e: &CpaExpr, components: &ComponentSet, i: usize) -> Result<ComponentCells> {
    let planes = component_planes(components, i);
    let arrangement = Arrangement::build(&planes, e.dim())?;
    let fi = components.get(i);
    let mut active = Vec::new();
    for (c, cell) in arrangement.cells().iter().enumerate() {
        let value = e.eval_unchecked(&cell.witness);
        if value != fi.eval_unchecked(&cell.witness) {
            continue;
        }
        let matches = components.iter().filter(|f| f.eval_unchecked(&cell.witness) == value).count();
        if matches != 1 {
            return Err(Error::Invariant(format!(
                "witness of cell {c} of component {fi} matches {matches} components"
            )));
        }
        active.push(c);
    }
    Ok(ComponentCells { planes: arrangement.planes().to_vec(), arrangement, active })
}

/// Active components, convex cells and maximal pieces of `e`.
pub fn decompose(e: &CpaExpr) -> Result<PieceDecomposition> {
    let leaves = e.leaf_components();
    let mut components = leaves.clone();
    let mut per_component: Vec<ComponentCells> =
        (0..components.len()).map(|i| label_cells(e, &components, i)).collect::<Result<_>>()?;

    if per_component.iter().any(|c| c.active.is_empty()) {
        components = components
            .iter()
            .zip(&per_component)
            .filter(|(_, c)| !c.active.is_empty())
            .map(|(f, _)| f.clone())
            .collect();
        per_component = (0..components.len()).map(|i| label_cells(e, &components, i)).collect::<Result<_>>()?;
        if let Some(i) = per_component.iter().position(|c| c.active.is_empty()) {
            return Err(Error::Invariant(format!("component {} lost its cells after dropping inactive leaves", components.get(i))));
        }
    }

    let mut cells = Vec::new();
    let mut pieces = Vec::new();
    let mut planes = Vec::new();
    for (i, comp) in per_component.into_iter().enumerate() {
        let base = cells.len();
        let mut local = vec![usize::MAX; comp.arrangement.len()];
        for (k, &c) in comp.active.iter().enumerate() {
            local[c] = k;
            let cell = &comp.arrangement.cells()[c];
            cells.push(PieceCell { component: i, signs: cell.signs.clone(), witness: cell.witness.clone() });
        }
        let mut uf = UnionFind::<usize>::new(comp.active.len());
        for adj in comp.arrangement.adjacency()? {
            let (a, b) = (local[adj.a], local[adj.b]);
            if a != usize::MAX && b != usize::MAX {
                uf.union(a, b);
            }
        }
        pieces.extend(group(&uf, comp.active.len(), base, i));
        planes.push(comp.planes);
    }

    Ok(PieceDecomposition { dim: e.dim(), components, leaf_count: leaves.len(), cells, pieces, planes })
}

/// Groups `0..n` by union-find root, ordered by smallest member.
fn group(uf: &UnionFind<usize>, n: usize, base: usize, component: usize) -> Vec<Piece> {
    let mut slot = vec![usize::MAX; n];
    let mut out: Vec<Piece> = Vec::new();
    for k in 0..n {
        let root = uf.find(k);
        if slot[root] == usize::MAX {
            slot[root] = out.len();
            out.push(Piece { component, cells: Vec::new() });
        }
        out[slot[root]].cells.push(base + k);
    }
    out
}

/// Exact decomposition of a function on the real line by sorting
/// breakpoints. Produces the same counts as [`decompose`].
pub fn pieces_1d(e: &CpaExpr) -> Result<PieceDecomposition> {
    if e.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: e.dim() });
    }
    let leaves = e.leaf_components();
    let samples = interval_samples(&breakpoints(leaves.as_slice()));

    // Component of each open interval between consecutive breakpoints.
    let mut labels = Vec::with_capacity(samples.len());
    for x in &samples {
        let p = [x.clone()];
        let value = e.eval_unchecked(&p);
        let mut matching = leaves.iter().enumerate().filter(|(_, f)| f.eval_unchecked(&p) == value);
        let (k, _) = matching.next().ok_or_else(|| Error::Invariant(format!("no leaf matches at {x}")))?;
        if matching.next().is_some() {
            return Err(Error::Invariant(format!("several leaves match at {x}")));
        }
        labels.push(k);
    }

    let mut used = vec![false; leaves.len()];
    labels.iter().for_each(|&k| used[k] = true);
    let components: ComponentSet = leaves.iter().zip(&used).filter(|(_, &u)| u).map(|(f, _)| f.clone()).collect();
    let remap: Vec<usize> = leaves.iter().map(|f| components.index_of(f).unwrap_or(usize::MAX)).collect();
    let breaks = breakpoints(leaves.as_slice());

    // Runs of equal labels are the maximal pieces; interval j spans
    // (breaks[j-1], breaks[j]).
    let mut runs: Vec<(usize, Option<Rational>, Option<Rational>)> = Vec::new();
    for (j, &k) in labels.iter().enumerate() {
        let c = remap[k];
        let right = breaks.get(j).cloned();
        match runs.last_mut() {
            Some(last) if last.0 == c => last.2 = right,
            _ => runs.push((c, if j == 0 { None } else { Some(breaks[j - 1].clone()) }, right)),
        }
    }

    let planes: Vec<Vec<Hyperplane>> = (0..components.len()).map(|i| component_planes(&components, i)).collect();
    let mut per_component: Vec<Vec<(Point, usize)>> = vec![Vec::new(); components.len()];
    for (r, (c, left, right)) in runs.iter().enumerate() {
        let own = breakpoints_of(&components, *c);
        let inner: Vec<Rational> = own
            .into_iter()
            .filter(|x| left.as_ref().is_none_or(|l| x > l) && right.as_ref().is_none_or(|rr| x < rr))
            .collect();
        for w in interval_samples_between(left.as_ref(), right.as_ref(), &inner) {
            per_component[*c].push((vec![w], r));
        }
    }

    let mut cells = Vec::new();
    let mut pieces: Vec<Piece> = Vec::new();
    for (c, list) in per_component.into_iter().enumerate() {
        let mut run_slot: Vec<(usize, usize)> = Vec::new();
        for (witness, run) in list {
            let signs = planes[c].iter().map(|h| Side::of(&h.value_unchecked(&witness))).collect();
            let idx = cells.len();
            cells.push(PieceCell { component: c, signs, witness });
            match run_slot.iter().find(|(r, _)| *r == run) {
                Some(&(_, p)) => pieces[p].cells.push(idx),
                None => {
                    run_slot.push((run, pieces.len()));
                    pieces.push(Piece { component: c, cells: vec![idx] });
                }
            }
        }
    }

    Ok(PieceDecomposition { dim: 1, components, leaf_count: leaves.len(), cells, pieces, planes })
}

/// Sorted distinct crossing points of pairs of 1-D maps.
fn breakpoints(maps: &[AffineMap]) -> Vec<Rational> {
    let mut xs = Vec::new();
    for i in 0..maps.len() {
        for j in i + 1..maps.len() {
            if let Some(x) = crossing(&maps[i], &maps[j]) {
                xs.push(x);
            }
        }
    }
    xs.sort();
    xs.dedup();
    xs
}

fn breakpoints_of(components: &ComponentSet, i: usize) -> Vec<Rational> {
    let mut xs: Vec<Rational> = (0..components.len())
        .filter(|&j| j != i)
        .filter_map(|j| crossing(components.get(i), components.get(j)))
        .collect();
    xs.sort();
    xs.dedup();
    xs
}

fn crossing(f: &AffineMap, g: &AffineMap) -> Option<Rational> {
    let slope = &f.gradient()[0] - &g.gradient()[0];
    if slope.is_zero() {
        return None;
    }
    Some((g.offset() - f.offset()) / slope)
}

/// One point inside each open interval cut out of the line by `breaks`.
fn interval_samples(breaks: &[Rational]) -> Vec<Rational> {
    interval_samples_between(None, None, breaks)
}

fn interval_samples_between(left: Option<&Rational>, right: Option<&Rational>, inner: &[Rational]) -> Vec<Rational> {
    let mut ends: Vec<Option<&Rational>> = vec![left];
    ends.extend(inner.iter().map(Some));
    ends.push(right);
    ends.windows(2)
        .map(|w| match (w[0], w[1]) {
            (None, None) => Rational::zero(),
            (Some(a), None) => a + Rational::one(),
            (None, Some(b)) => b - Rational::one(),
            (Some(a), Some(b)) => (a + b) / int(2),
        })
        .collect()
}

/// Human-readable one-liner, e.g. `n=4 pieces=5 cells=9`.
pub fn summary(dec: &PieceDecomposition) -> String {
    format!("n={} pieces={} cells={}", dec.n_active(), dec.maximal_piece_count(), dec.cell_count())
}
