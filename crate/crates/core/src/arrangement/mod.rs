//! Open cells of a finite hyperplane arrangement, with exact witnesses and
//! facet adjacency.
//!
//! Cells are built by incremental insertion. Every cell is tracked as the
//! convex polytope it cuts out of a bounding box that meets every cell of
//! the arrangement; inserting a hyperplane splits exactly the polytopes
//! that have vertices strictly on both sides of it.

mod lp;

use std::collections::HashMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{check_dim, dot, format_rational, int, AffineMap, Point, Rational};
use crate::linalg::{least_norm, rank};

pub use lp::strict_feasible;

/// Position of a point relative to a hyperplane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Neg,
    Zero,
    Pos,
}

impl Side {
    pub fn of(value: &Rational) -> Side {
        if value.is_positive() {
            Side::Pos
        } else if value.is_negative() {
            Side::Neg
        } else {
            Side::Zero
        }
    }

    pub fn flip(self) -> Side {
        match self {
            Side::Neg => Side::Pos,
            Side::Zero => Side::Zero,
            Side::Pos => Side::Neg,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Side::Neg => '-',
            Side::Zero => '0',
            Side::Pos => '+',
        }
    }
}

/// `{x : normal·x = offset}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hyperplane {
    normal: Vec<Rational>,
    offset: Rational,
}

impl Hyperplane {
    pub fn new(normal: Vec<Rational>, offset: Rational) -> Result<Self> {
        if normal.is_empty() {
            return Err(Error::UnsupportedDimension(0));
        }
        if normal.iter().all(Zero::is_zero) {
            return Err(Error::InvalidParameter("hyperplane with zero normal".into()));
        }
        Ok(Hyperplane { normal, offset })
    }

    /// Zero set of `f`, or `None` when `f` is constant.
    pub fn from_affine(f: &AffineMap) -> Option<Self> {
        if f.is_constant() {
            return None;
        }
        Some(Hyperplane { normal: f.gradient().to_vec(), offset: -f.offset().clone() })
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn normal(&self) -> &[Rational] {
        &self.normal
    }

    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    /// `normal·x - offset`.
    pub fn value(&self, x: &[Rational]) -> Result<Rational> {
        check_dim(self.dim(), x.len())?;
        Ok(self.value_unchecked(x))
    }

    pub(crate) fn value_unchecked(&self, x: &[Rational]) -> Rational {
        dot(&self.normal, x) - &self.offset
    }

    /// Scales so the first nonzero normal coordinate is 1. `h`, `λh` and `-h`
    /// all normalize to the same plane.
    pub fn normalized(&self) -> Hyperplane {
        let lead = self.normal.iter().find(|c| !c.is_zero()).expect("nonzero normal").clone();
        Hyperplane {
            normal: self.normal.iter().map(|c| c / &lead).collect(),
            offset: &self.offset / &lead,
        }
    }
}

impl fmt::Display for Hyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeffs: Vec<String> = self.normal.iter().map(format_rational).collect();
        write!(f, "[{}]·x = {}", coeffs.join(", "), format_rational(&self.offset))
    }
}

/// Normalizes and removes duplicates, keeping first-appearance order.
pub fn dedup_planes(planes: &[Hyperplane]) -> Vec<Hyperplane> {
    let mut seen = std::collections::HashSet::new();
    planes.iter().map(Hyperplane::normalized).filter(|h| seen.insert(h.clone())).collect()
}

/// An open full-dimensional cell: its strict sign vector and an interior
/// point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub signs: Vec<Side>,
    pub witness: Point,
}

impl Cell {
    pub fn sign_string(&self) -> String {
        self.signs.iter().map(|s| s.symbol()).collect()
    }

    /// Debug dump: `{"signs":"+-+...","witness":[rat,...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Dump {
            signs: String,
            witness: Vec<String>,
        }
        serde_json::to_value(Dump { signs: self.sign_string(), witness: self.witness.iter().map(format_rational).collect() })
            .expect("cell dump")
    }
}

/// Two cells whose closures share a (d-1)-dimensional facet on `plane`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adjacency {
    pub a: usize,
    pub b: usize,
    pub plane: usize,
    /// A point in the relative interior of the shared facet.
    pub facet_witness: Point,
}

#[derive(Clone, Debug)]
pub struct Arrangement {
    dim: usize,
    planes: Vec<Hyperplane>,
    cells: Vec<Cell>,
    index: HashMap<Vec<Side>, usize>,
}

impl Arrangement {
    /// Enumerates all open cells. Duplicate planes (up to nonzero scaling)
    /// are merged; sign vectors refer to [`Arrangement::planes`].
    pub fn build(planes: &[Hyperplane], dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::UnsupportedDimension(0));
        }
        for h in planes {
            check_dim(dim, h.dim())?;
        }
        let planes = dedup_planes(planes);
        let cells = enumerate(&planes, dim);
        let index = cells.iter().enumerate().map(|(i, c)| (c.signs.clone(), i)).collect();
        Ok(Arrangement { dim, planes, cells, index })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn planes(&self) -> &[Hyperplane] {
        &self.planes
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn sign_vector(&self, x: &[Rational]) -> Vec<Side> {
        self.planes.iter().map(|h| Side::of(&h.value_unchecked(x))).collect()
    }

    /// Cell containing `x`, or `None` if `x` lies on some hyperplane.
    pub fn locate(&self, x: &[Rational]) -> Option<usize> {
        let signs = self.sign_vector(x);
        if signs.contains(&Side::Zero) {
            return None;
        }
        self.index.get(&signs).copied()
    }

    pub fn find(&self, signs: &[Side]) -> Option<usize> {
        self.index.get(signs).copied()
    }

    /// All facet-sharing pairs `(a, b)` with `a < b`.
    ///
    /// Two cells of one arrangement whose sign vectors differ in exactly one
    /// plane always share a facet: the segment between their witnesses
    /// stays strictly on the common side of every other plane and crosses
    /// the differing one. The crossing point is returned as the facet
    /// witness after checking it exactly.
    pub fn adjacency(&self) -> Result<Vec<Adjacency>> {
        let mut out = Vec::new();
        for (a, cell) in self.cells.iter().enumerate() {
            let mut flipped = cell.signs.clone();
            for j in 0..self.planes.len() {
                flipped[j] = flipped[j].flip();
                if let Some(&b) = self.index.get(&flipped) {
                    if a < b {
                        let facet_witness = self.facet_point(a, b, j)?;
                        out.push(Adjacency { a, b, plane: j, facet_witness });
                    }
                }
                flipped[j] = flipped[j].flip();
            }
        }
        Ok(out)
    }

    fn facet_point(&self, a: usize, b: usize, j: usize) -> Result<Point> {
        let h = &self.planes[j];
        let (wa, wb) = (&self.cells[a].witness, &self.cells[b].witness);
        let (va, vb) = (h.value_unchecked(wa), h.value_unchecked(wb));
        let t = &va / (&va - &vb);
        let p: Point = wa.iter().zip(wb).map(|(x, y)| x + &t * (y - x)).collect();
        for (k, g) in self.planes.iter().enumerate() {
            let side = Side::of(&g.value_unchecked(&p));
            let expected = if k == j { Side::Zero } else { self.cells[a].signs[k] };
            if side != expected {
                return Err(Error::Invariant(format!("facet witness between cells {a} and {b} fails plane {k}")));
            }
        }
        Ok(p)
    }
}

pub fn enumerate_cells(planes: &[Hyperplane], dim: usize) -> Result<Vec<Cell>> {
    Ok(Arrangement::build(planes, dim)?.cells)
}

pub fn cell_adjacency(arrangement: &Arrangement) -> Result<Vec<Adjacency>> {
    arrangement.adjacency()
}

/// A polytope vertex with the ids of all constraint planes through it.
/// Ids below the arrangement size are arrangement planes; the rest are box
/// faces.
#[derive(Clone)]
struct Vertex {
    point: Point,
    tight: Vec<u32>,
}

struct Piece {
    signs: Vec<Side>,
    vertices: Vec<Vertex>,
}

fn enumerate(planes: &[Hyperplane], dim: usize) -> Vec<Cell> {
    let (lo, hi) = bounding_box(planes, dim);
    let n = planes.len() as u32;
    let corners = (0..1usize << dim)
        .map(|mask| {
            let mut point = Vec::with_capacity(dim);
            let mut tight = Vec::with_capacity(dim);
            for k in 0..dim {
                let upper = mask >> k & 1 == 1;
                point.push(if upper { hi[k].clone() } else { lo[k].clone() });
                tight.push(n + 2 * k as u32 + upper as u32);
            }
            Vertex { point, tight }
        })
        .collect();
    let mut pieces = vec![Piece { signs: Vec::with_capacity(planes.len()), vertices: corners }];

    // Box faces are axis-aligned, so the rank test below only needs their
    // normals when dim > 3.
    let normal_of = |id: u32| -> Vec<Rational> {
        if id < n {
            planes[id as usize].normal.clone()
        } else {
            let mut e = vec![Rational::zero(); dim];
            e[((id - n) / 2) as usize] = int(1);
            e
        }
    };

    for (id, h) in planes.iter().enumerate() {
        let id = id as u32;
        let mut next = Vec::with_capacity(pieces.len() * 2);
        for mut piece in pieces {
            let values: Vec<Rational> = piece.vertices.iter().map(|v| h.value_unchecked(&v.point)).collect();
            let has_pos = values.iter().any(Signed::is_positive);
            let has_neg = values.iter().any(Signed::is_negative);
            for (v, val) in piece.vertices.iter_mut().zip(&values) {
                if val.is_zero() {
                    let at = v.tight.partition_point(|&t| t < id);
                    v.tight.insert(at, id);
                }
            }
            if !(has_pos && has_neg) {
                piece.signs.push(if has_pos { Side::Pos } else { Side::Neg });
                next.push(piece);
                continue;
            }
            let mut cut = Vec::new();
            for (u, vu) in piece.vertices.iter().zip(&values) {
                if !vu.is_positive() {
                    continue;
                }
                for (w, vw) in piece.vertices.iter().zip(&values) {
                    if !vw.is_negative() {
                        continue;
                    }
                    let common = intersect_sorted(&u.tight, &w.tight);
                    if !spans_edge(&common, dim, &normal_of) {
                        continue;
                    }
                    let t = vu / (vu - vw);
                    let point = u.point.iter().zip(&w.point).map(|(a, b)| a + &t * (b - a)).collect();
                    let mut tight = common;
                    let at = tight.partition_point(|&x| x < id);
                    tight.insert(at, id);
                    cut.push(Vertex { point, tight });
                }
            }
            let mut pos = Piece { signs: piece.signs.clone(), vertices: cut.clone() };
            let mut neg = Piece { signs: piece.signs, vertices: cut };
            for (v, val) in piece.vertices.into_iter().zip(&values) {
                match Side::of(val) {
                    Side::Pos => pos.vertices.push(v),
                    Side::Neg => neg.vertices.push(v),
                    Side::Zero => {
                        pos.vertices.push(v.clone());
                        neg.vertices.push(v);
                    }
                }
            }
            pos.signs.push(Side::Pos);
            neg.signs.push(Side::Neg);
            next.push(pos);
            next.push(neg);
        }
        pieces = next;
    }

    pieces
        .into_iter()
        .map(|p| {
            let count = int(p.vertices.len() as i64);
            let mut witness = vec![Rational::zero(); dim];
            for v in &p.vertices {
                for (w, x) in witness.iter_mut().zip(&v.point) {
                    *w += x;
                }
            }
            witness.iter_mut().for_each(|w| *w /= &count);
            Cell { signs: p.signs, witness }
        })
        .collect()
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Whether the planes through two vertices cut out a line. All of them pass
/// through a common point and are pairwise distinct, so for `dim <= 3` a
/// count suffices.
fn spans_edge(common: &[u32], dim: usize, normal_of: &impl Fn(u32) -> Vec<Rational>) -> bool {
    if common.len() + 1 < dim {
        return false;
    }
    if dim <= 3 {
        return true;
    }
    let normals: Vec<Vec<Rational>> = common.iter().map(|&id| normal_of(id)).collect();
    let refs: Vec<&[Rational]> = normals.iter().map(Vec::as_slice).collect();
    rank(&refs) + 1 >= dim
}

/// A box meeting every cell: it strictly contains one point of every
/// minimal face of the arrangement.
fn bounding_box(planes: &[Hyperplane], dim: usize) -> (Vec<Rational>, Vec<Rational>) {
    let normals: Vec<&[Rational]> = planes.iter().map(|h| h.normal()).collect();
    let r = rank(&normals);
    let mut lo: Vec<Rational> = vec![Rational::zero(); dim];
    let mut hi = lo.clone();
    if r > 0 {
        for subset in Combinations::new(planes.len(), r) {
            let n: Vec<&[Rational]> = subset.iter().map(|&i| planes[i].normal()).collect();
            let b: Vec<&Rational> = subset.iter().map(|&i| planes[i].offset()).collect();
            if let Some(x) = least_norm(&n, &b) {
                for k in 0..dim {
                    if x[k] < lo[k] {
                        lo[k] = x[k].clone();
                    }
                    if x[k] > hi[k] {
                        hi[k] = x[k].clone();
                    }
                }
            }
        }
    }
    for k in 0..dim {
        lo[k] -= int(1);
        hi[k] += int(1);
    }
    (lo, hi)
}

/// Index subsets of size `k` of `0..n` in lexicographic order.
struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations { n, current: (k <= n).then(|| (0..k).collect()) }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut c = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if c[i] < self.n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                self.current = Some(c);
                break;
            }
        }
        Some(out)
    }
}
