//! Longest x-monotone paths in line arrangements and the CPA functions
//! whose graphs they trace.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::lines::LineFamily;
use crate::cpa::CpaExpr;
use crate::error::{Error, Result};
use crate::exact::{rational_vec, AffineMap, Rational};

/// An intersection point of the family and the lines through it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrangementVertex {
    pub x: Rational,
    pub y: Rational,
    pub lines: Vec<usize>,
}

/// All intersection points, sorted by `(x, y)`.
pub fn arrangement_vertices(family: &LineFamily) -> Vec<ArrangementVertex> {
    let mut map: BTreeMap<(Rational, Rational), Vec<usize>> = BTreeMap::new();
    let lines = family.lines();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            if let Some(p) = lines[i].meet(&lines[j]) {
                let through = map.entry(p).or_default();
                for k in [i, j] {
                    if !through.contains(&k) {
                        through.push(k);
                    }
                }
            }
        }
    }
    map.into_iter()
        .map(|((x, y), mut lines)| {
            lines.sort_unstable();
            ArrangementVertex { x, y, lines }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotonePath {
    #[serde(with = "vertex_list")]
    pub vertices: Vec<(Rational, Rational)>,
    /// Line carrying the segment from `vertices[k]` to `vertices[k + 1]`.
    pub carriers: Vec<usize>,
    /// Number of maximal collinear runs.
    pub length: usize,
}

mod vertex_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[(Rational, Rational)], s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct P<'a>(#[serde(with = "rational_vec")] &'a [Rational]);
        let pts: Vec<[Rational; 2]> = v.iter().map(|(x, y)| [x.clone(), y.clone()]).collect();
        let wrapped: Vec<P> = pts.iter().map(|p| P(&p[..])).collect();
        wrapped.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<(Rational, Rational)>, D::Error> {
        #[derive(Deserialize)]
        struct P(#[serde(with = "rational_vec")] Vec<Rational>);
        let raw = Vec::<P>::deserialize(d)?;
        raw.into_iter()
            .map(|P(v)| match <[Rational; 2]>::try_from(v) {
                Ok([x, y]) => Ok((x, y)),
                Err(_) => Err(serde::de::Error::custom("vertex must have two coordinates")),
            })
            .collect()
    }
}

impl MonotonePath {
    /// Runs of equal consecutive carriers.
    pub fn runs(&self) -> Vec<(usize, usize, usize)> {
        let mut out: Vec<(usize, usize, usize)> = Vec::new();
        for (k, &c) in self.carriers.iter().enumerate() {
            match out.last_mut() {
                Some(last) if last.0 == c => last.2 = k + 1,
                _ => out.push((c, k, k + 1)),
            }
        }
        out
    }

    /// A single run: the extended function is affine.
    pub fn is_degenerate(&self) -> bool {
        self.length == 1
    }

    /// Checks every structural requirement against `family`.
    pub fn validate(&self, family: &LineFamily) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidPath(msg));
        if self.vertices.len() < 2 {
            return bad("a path joins at least two vertices".into());
        }
        if self.carriers.len() + 1 != self.vertices.len() {
            return bad("one carrier per segment is required".into());
        }
        if self.vertices.windows(2).any(|w| w[0].0 >= w[1].0) {
            return bad("x must increase strictly along the path".into());
        }
        for v in &self.vertices {
            if family.lines().iter().filter(|l| l.contains(v)).count() < 2 {
                return bad(format!("({}, {}) is not an intersection point", v.0, v.1));
            }
        }
        for (k, &c) in self.carriers.iter().enumerate() {
            let line = family.lines().get(c).ok_or_else(|| Error::InvalidPath(format!("carrier {c} out of range")))?;
            if !line.contains(&self.vertices[k]) || !line.contains(&self.vertices[k + 1]) {
                return bad(format!("segment {k} is not on line {c}"));
            }
        }
        if self.runs().len() != self.length {
            return bad(format!("length {} but {} collinear runs", self.length, self.runs().len()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("path serializes")
    }
}

/// Longest x-monotone path, counting maximal collinear runs.
///
/// `best[v][s]` is the largest number of runs a path can still add after
/// arriving at vertex `v` along incoming line slot `s` (the last slot means
/// "no incoming line"). Ties go to the lexicographically smallest vertex
/// sequence, with vertices numbered in `(x, y)` order.
pub fn longest_monotone_path(family: &LineFamily) -> Result<MonotonePath> {
    if family.len() < 2 {
        return Err(Error::NoPath("need at least two lines".into()));
    }
    let verts = arrangement_vertices(family);
    // Vertices on each line in increasing x.
    let mut on_line: Vec<Vec<usize>> = vec![Vec::new(); family.len()];
    for (v, vert) in verts.iter().enumerate() {
        for &l in &vert.lines {
            on_line[l].push(v);
        }
    }
    let slot = |v: usize, line: Option<usize>| -> usize {
        match line {
            None => verts[v].lines.len(),
            Some(l) => verts[v].lines.iter().position(|&x| x == l).expect("line through vertex"),
        }
    };

    let mut best: Vec<Vec<usize>> = verts.iter().map(|v| vec![0; v.lines.len() + 1]).collect();
    for v in (0..verts.len()).rev() {
        for s in 0..=verts[v].lines.len() {
            let incoming = verts[v].lines.get(s).copied();
            let mut value = 0;
            for &l in &verts[v].lines {
                for &w in &on_line[l] {
                    if verts[w].x > verts[v].x {
                        value = value.max(usize::from(Some(l) != incoming) + best[w][slot(w, Some(l))]);
                    }
                }
            }
            best[v][s] = value;
        }
    }

    let (start, total) = (0..verts.len())
        .map(|v| (v, best[v][verts[v].lines.len()]))
        .fold(None, |acc: Option<(usize, usize)>, (v, b)| match acc {
            Some((_, bb)) if bb >= b => acc,
            _ => Some((v, b)),
        })
        .ok_or_else(|| Error::NoPath("the lines have no intersection point".into()))?;
    if total == 0 {
        return Err(Error::NoPath("no two distinct vertices share a line".into()));
    }

    let mut vertices = vec![(verts[start].x.clone(), verts[start].y.clone())];
    let mut carriers = Vec::new();
    let (mut v, mut incoming, mut remaining) = (start, None, total);
    while remaining > 0 {
        let (w, l) = (v + 1..verts.len())
            .filter(|&w| verts[w].x > verts[v].x)
            .find_map(|w| {
                let l = *verts[v].lines.iter().find(|l| verts[w].lines.contains(l))?;
                (usize::from(Some(l) != incoming) + best[w][slot(w, Some(l))] == remaining).then_some((w, l))
            })
            .ok_or_else(|| Error::Invariant("path reconstruction lost the optimum".into()))?;
        remaining = best[w][slot(w, Some(l))];
        vertices.push((verts[w].x.clone(), verts[w].y.clone()));
        carriers.push(l);
        v = w;
        incoming = Some(l);
    }
    let path = MonotonePath { vertices, carriers, length: total };
    debug_assert!(path.validate(family).is_ok());
    Ok(path)
}

/// The continuous function whose graph is the path, with the first and last
/// segments extended to infinity. Its maximal pieces are the path's runs.
pub fn path_to_cpa(path: &MonotonePath, family: &LineFamily) -> Result<CpaExpr> {
    path.validate(family)?;
    let runs = path.runs();
    let maps: Vec<AffineMap> = runs.iter().map(|&(c, _, _)| family.lines()[c].as_affine()).collect();
    let breaks: Vec<Rational> = runs[1..].iter().map(|&(_, start, _)| path.vertices[start].0.clone()).collect();
    spline_1d(&breaks, &maps)
}

/// The continuous function equal to `maps[k]` between `breaks[k-1]` and
/// `breaks[k]`, written as a max of mins.
///
/// For every run `k`, the min over all maps that dominate `maps[k]` on the
/// run's closed interval equals the function on that interval and never
/// exceeds it elsewhere; the max over runs recovers the function.
pub fn spline_1d(breaks: &[Rational], maps: &[AffineMap]) -> Result<CpaExpr> {
    if maps.len() != breaks.len() + 1 {
        return Err(Error::InvalidParameter(format!("{} maps for {} breakpoints", maps.len(), breaks.len())));
    }
    if let Some(m) = maps.iter().find(|m| m.dim() != 1) {
        return Err(Error::DimensionMismatch { expected: 1, got: m.dim() });
    }
    if breaks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("breakpoints must increase strictly".into()));
    }
    for (k, b) in breaks.iter().enumerate() {
        let x = [b.clone()];
        if maps[k].eval_unchecked(&x) != maps[k + 1].eval_unchecked(&x) {
            return Err(Error::InvalidParameter(format!("discontinuity at {b}")));
        }
    }

    let distinct: Vec<&AffineMap> = {
        let mut seen = Vec::new();
        for m in maps {
            if !seen.contains(&m) {
                seen.push(m);
            }
        }
        seen
    };
    let mut terms = Vec::with_capacity(maps.len());
    for (k, f) in maps.iter().enumerate() {
        let (left, right) = (k.checked_sub(1).map(|j| &breaks[j]), breaks.get(k));
        let dominating: Vec<CpaExpr> = distinct
            .iter()
            .filter(|g| dominates(g, f, left, right))
            .map(|g| CpaExpr::Leaf((*g).clone()))
            .collect();
        let term = CpaExpr::min(dominating)?;
        if !terms.contains(&term) {
            terms.push(term);
        }
    }
    CpaExpr::max(terms)
}

/// `g >= f` on the closed interval between `left` and `right` (unbounded
/// where `None`).
fn dominates(g: &AffineMap, f: &AffineMap, left: Option<&Rational>, right: Option<&Rational>) -> bool {
    let diff = g.sub(f).expect("one-dimensional maps");
    let slope = &diff.gradient()[0];
    let at = |x: &Rational| diff.eval_unchecked(std::slice::from_ref(x));
    let left_ok = match left {
        Some(a) => !at(a).is_negative(),
        None => !slope.is_positive(),
    };
    let right_ok = match right {
        Some(b) => !at(b).is_negative(),
        None => !slope.is_negative(),
    };
    let unbounded_ok = left.is_some() || right.is_some() || (slope.is_zero() && !diff.offset().is_negative());
    left_ok && right_ok && unbounded_ok
}
