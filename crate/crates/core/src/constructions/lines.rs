//! Families of non-vertical lines in the plane.

use std::collections::HashSet;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{int, rat, rational_str, AffineMap, Rational};

/// `y = slope * x + intercept`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Line {
    #[serde(rename = "a", with = "rational_str")]
    pub slope: Rational,
    #[serde(rename = "b", with = "rational_str")]
    pub intercept: Rational,
}

impl Line {
    pub fn new(slope: Rational, intercept: Rational) -> Self {
        Line { slope, intercept }
    }

    /// The line `p x + q y = r`. Vertical lines (`q = 0`) are not graphs of
    /// functions of `x` and are rejected.
    pub fn from_implicit(p: Rational, q: Rational, r: Rational) -> Result<Line> {
        if q.is_zero() {
            return Err(Error::InvalidParameter(format!("vertical line {p}x = {r}")));
        }
        Ok(Line { slope: -p / &q, intercept: r / q })
    }

    pub fn at(&self, x: &Rational) -> Rational {
        &self.slope * x + &self.intercept
    }

    pub fn as_affine(&self) -> AffineMap {
        AffineMap::new(vec![self.slope.clone()], self.intercept.clone()).expect("one-dimensional map")
    }

    /// Intersection point, or `None` for parallel lines.
    pub fn meet(&self, other: &Line) -> Option<(Rational, Rational)> {
        let ds = &self.slope - &other.slope;
        if ds.is_zero() {
            return None;
        }
        let x = (&other.intercept - &self.intercept) / ds;
        let y = self.at(&x);
        Some((x, y))
    }

    pub fn contains(&self, p: &(Rational, Rational)) -> bool {
        self.at(&p.0) == p.1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineFamily {
    lines: Vec<Line>,
}

impl LineFamily {
    pub fn new(lines: Vec<Line>) -> Result<Self> {
        let mut seen = HashSet::new();
        for l in &lines {
            if !seen.insert(l.clone()) {
                return Err(Error::InvalidParameter(format!("duplicate line y = {}x + {}", l.slope, l.intercept)));
            }
        }
        Ok(LineFamily { lines })
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn distinct_slopes(&self) -> bool {
        let slopes: HashSet<_> = self.lines.iter().map(|l| &l.slope).collect();
        slopes.len() == self.lines.len()
    }

    /// No two lines parallel and no three through one point.
    pub fn generic_position(&self) -> bool {
        if !self.distinct_slopes() {
            return false;
        }
        let mut points = HashSet::new();
        for i in 0..self.lines.len() {
            for j in i + 1..self.lines.len() {
                if !points.insert(self.lines[i].meet(&self.lines[j]).unwrap()) {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("line family serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: LineFamily = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        LineFamily::new(raw.lines)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    /// Small random rational slopes and intercepts, resampled until the
    /// family is in general position.
    RandomGeneric,
    /// Slopes `2^k`, intercepts `-k(k+1)/2`.
    SlopeGraded,
    /// Integer offsets along a few fixed directions.
    GridLike,
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random-generic" => Ok(FamilyKind::RandomGeneric),
            "slope-graded" => Ok(FamilyKind::SlopeGraded),
            "grid-like" => Ok(FamilyKind::GridLike),
            _ => Err(Error::InvalidParameter(format!("unknown line family kind {s:?}"))),
        }
    }
}

/// Deterministic `n`-line family of the given kind.
pub fn line_family(kind: FamilyKind, n: usize, seed: u64) -> Result<LineFamily> {
    match kind {
        FamilyKind::RandomGeneric => random_generic(n, seed),
        FamilyKind::SlopeGraded => slope_graded(n),
        FamilyKind::GridLike => grid_like(n, &DEFAULT_DIRECTIONS),
    }
}

fn random_generic(n: usize, seed: u64) -> Result<LineFamily> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lines: Vec<Line> = Vec::with_capacity(n);
    let mut points: HashSet<(Rational, Rational)> = HashSet::new();
    let mut attempts = 0;
    while lines.len() < n {
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::TooLarge(format!("could not place {n} lines in general position")));
        }
        let candidate = Line::new(
            rat(rng.gen_range(-12..=12), rng.gen_range(1..=4)),
            rat(rng.gen_range(-12..=12), rng.gen_range(1..=4)),
        );
        let Some(new_points) = lines.iter().map(|l| l.meet(&candidate)).collect::<Option<Vec<_>>>() else {
            continue;
        };
        let distinct: HashSet<_> = new_points.iter().collect();
        if distinct.len() != new_points.len() || new_points.iter().any(|p| points.contains(p)) {
            continue;
        }
        points.extend(new_points);
        lines.push(candidate);
    }
    LineFamily::new(lines)
}

fn slope_graded(n: usize) -> Result<LineFamily> {
    let lines = (0..n)
        .map(|k| {
            let k = k as i64;
            Line::new(int(1i64 << k.min(62)), int(-(k * (k + 1) / 2)))
        })
        .collect();
    LineFamily::new(lines)
}

pub const DEFAULT_DIRECTIONS: [(i64, i64); 4] = [(1, 0), (1, 1), (1, -1), (2, 1)];

/// Lines cycling through the direction vectors `(dx, dy)`, each class
/// stacked at integer intercepts. A direction with `dx = 0` is vertical and
/// rejected.
pub fn grid_like(n: usize, directions: &[(i64, i64)]) -> Result<LineFamily> {
    if directions.is_empty() {
        return Err(Error::InvalidParameter("grid-like family needs a direction".into()));
    }
    let mut lines = Vec::with_capacity(n);
    for k in 0..n {
        let (dx, dy) = directions[k % directions.len()];
        let level = (k / directions.len()) as i64;
        // Direction (dx, dy) has normal (dy, -dx): dy*x - dx*y = -dx*level.
        lines.push(Line::from_implicit(int(dy), int(-dx), int(-dx * level))?);
    }
    LineFamily::new(lines)
}

/// Largest absolute coordinate of any intersection point.
pub fn vertex_extent(family: &LineFamily) -> Rational {
    let mut m = Rational::zero();
    for (i, a) in family.lines().iter().enumerate() {
        for b in &family.lines()[i + 1..] {
            if let Some((x, y)) = a.meet(b) {
                m = m.max(x.abs()).max(y.abs());
            }
        }
    }
    m
}
