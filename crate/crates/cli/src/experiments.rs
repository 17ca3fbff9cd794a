//! Seeded experiment batches shared by `sweep`, `verify` and the acceptance
//! suite.

use std::collections::BTreeSet;
use std::time::Instant;

use cpa_core::arrangement::{dedup_planes, enumerate_cells};
use cpa_core::bounds::{check_bounds, generic_cell_count, thm2_facet_bound, BoundReport};
use cpa_core::constructions::{
    lift, line_family, longest_monotone_path, path_to_cpa, sawtooth, thm8_family, FamilyKind,
};
use cpa_core::cpa::open_piece_example;
use cpa_core::exact::{int, rat};
use cpa_core::oracle::{
    covering_box, cube, exhaustive_monotone_paths, random_expr, random_spline, sample_piece_lower_bound, sign_scan,
};
use cpa_core::{decompose, pieces_1d, AffineMap, Hyperplane, Rational, Result, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CSV_HEADER: [&str; 8] = ["n", "d", "pieces", "cells", "lemma1", "thm2", "ok", "ms"];

/// Instances whose worst-case cell count exceeds this are skipped.
pub const CELL_GUARD: u64 = 1_000_000;

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub report: BoundReport,
    pub ms: Option<u128>,
}

#[derive(Clone, Debug, Default)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    pub warnings: Vec<String>,
}

impl Sweep {
    pub fn samples(&self) -> Vec<(u64, u64)> {
        self.rows.iter().map(|r| (r.report.n as u64, r.report.pieces as u64)).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for row in &self.rows {
            let r = &row.report;
            w.write_record([
                r.n.to_string(),
                r.d.to_string(),
                r.pieces.to_string(),
                r.cells.to_string(),
                r.lemma1.to_string(),
                r.thm2.to_string(),
                r.ok().to_string(),
                row.ms.map(|ms| ms.to_string()).unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

fn guard(n: usize, d: usize) -> Result<Option<String>> {
    let predicted = thm2_facet_bound(n as u64, d as u64)?;
    Ok((predicted > CELL_GUARD.into()).then(|| format!("skipping n={n} d={d}: up to {predicted} cells")))
}

/// Lower-bound family over a range of sawtooth sizes `m`, with component
/// budget `n = (6 + 3(d - 2)) m` at dimension `d >= 2`.
pub fn lift_sweep(d: usize, ms: impl IntoIterator<Item = usize>, kind: FamilyKind, seed: u64, timing: bool) -> Result<Sweep> {
    let mut sweep = Sweep::default();
    let alpha = 6 + 3 * d.saturating_sub(2);
    for m in ms {
        let n = alpha * m;
        if let Some(w) = guard(n, d)? {
            sweep.warnings.push(w);
            continue;
        }
        let start = Instant::now();
        let inst = thm8_family(d, n, kind, seed)?;
        let dec = decompose(&inst.lifted.expr)?;
        let report = check_bounds(&dec)?;
        sweep.rows.push(SweepRow { report, ms: timing.then(|| start.elapsed().as_millis()) });
    }
    Ok(sweep)
}

/// Longest-path functions of growing line families on the real line.
pub fn path_sweep(ns: impl IntoIterator<Item = usize>, kind: FamilyKind, seed: u64, timing: bool) -> Result<Sweep> {
    let mut sweep = Sweep::default();
    for n in ns {
        let start = Instant::now();
        let family = line_family(kind, n, seed)?;
        let path = match longest_monotone_path(&family) {
            Ok(p) => p,
            Err(e) => {
                sweep.warnings.push(format!("skipping n={n}: {e}"));
                continue;
            }
        };
        let dec = pieces_1d(&path_to_cpa(&path, &family)?)?;
        let report = check_bounds(&dec)?;
        sweep.rows.push(SweepRow { report, ms: timing.then(|| start.elapsed().as_millis()) });
    }
    Ok(sweep)
}

/// One lift of a random spline.
#[derive(Clone, Debug)]
pub struct LiftCase {
    pub seed: u64,
    pub m: usize,
    pub input_leaves: usize,
    /// Maximal pieces of the clamped input.
    pub base_pieces: usize,
    pub certified: u64,
    pub measured: usize,
    pub lift_leaves: usize,
    pub budget: usize,
    pub report: BoundReport,
}

impl LiftCase {
    pub fn ok(&self) -> bool {
        self.measured as u64 >= self.certified && self.lift_leaves <= self.budget && self.report.ok()
    }
}

/// 20 seeded random splines with at most 8 pieces, each lifted with
/// `m = 1..=5`.
pub fn lift_cases(seed: u64) -> Result<Vec<LiftCase>> {
    let mut out = Vec::new();
    for i in 0..20 {
        let instance = seed.wrapping_mul(1000).wrapping_add(i);
        let mut rng = ChaCha8Rng::seed_from_u64(instance);
        let pieces = rng.gen_range(1..=8);
        let f = random_spline(&mut rng, pieces)?;
        for m in 1..=5 {
            let l = lift(&f, m)?;
            let dec = decompose(&l.expr)?;
            out.push(LiftCase {
                seed: instance,
                m,
                input_leaves: f.leaf_components().len(),
                base_pieces: l.base_pieces,
                certified: l.certificate.certified_pieces_lower_bound,
                measured: dec.maximal_piece_count(),
                lift_leaves: l.expr.leaf_components().len(),
                budget: l.certificate.component_budget,
                report: check_bounds(&dec)?,
            });
        }
    }
    Ok(out)
}

pub fn lift_cases_csv(cases: &[LiftCase]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["seed", "m", "n_f", "p", "certified", "pieces", "leaves", "budget"]).expect("in-memory write");
    for c in cases {
        w.write_record(
            [c.seed as usize, c.m, c.input_leaves, c.base_pieces, c.certified as usize, c.measured, c.lift_leaves, c.budget]
                .map(|v| v.to_string()),
        )
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

/// A longest path in a random line family and its function.
#[derive(Clone, Debug)]
pub struct PathCase {
    pub seed: u64,
    pub lines: usize,
    pub length: usize,
    pub measured: usize,
    pub n_active: usize,
    pub report: BoundReport,
}

impl PathCase {
    pub fn ok(&self) -> bool {
        self.measured == self.length && self.n_active <= self.lines && self.report.ok()
    }
}

/// 20 seeded random-generic families with 3 to 8 lines.
pub fn path_cases(seed: u64) -> Result<Vec<PathCase>> {
    (0..20u64)
        .map(|i| {
            let instance = seed.wrapping_mul(1000).wrapping_add(i);
            let lines = 3 + (i as usize % 6);
            let family = line_family(FamilyKind::RandomGeneric, lines, instance)?;
            let path = longest_monotone_path(&family)?;
            let dec = decompose(&path_to_cpa(&path, &family)?)?;
            Ok(PathCase {
                seed: instance,
                lines,
                length: path.length,
                measured: dec.maximal_piece_count(),
                n_active: dec.n_active(),
                report: check_bounds(&dec)?,
            })
        })
        .collect()
}

pub fn path_cases_csv(cases: &[PathCase]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["seed", "lines", "length", "pieces", "n_active"]).expect("in-memory write");
    for c in cases {
        w.write_record([c.seed as usize, c.lines, c.length, c.measured, c.n_active].map(|v| v.to_string()))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), ok, detail: detail.into() }
    }
}

pub fn fig1_checks() -> Result<Vec<Check>> {
    let dec = decompose(&open_piece_example())?;
    let report = check_bounds(&dec)?;
    let minus_x = AffineMap::from_ints(&[-1, 0], 0)?;
    let red = dec.components.index_of(&minus_x).map(|i| dec.pieces.iter().filter(|p| p.component == i).count());
    Ok(vec![
        Check::new("fig1 components", dec.n_active() == 4, format!("n_active={}", dec.n_active())),
        Check::new("fig1 pieces", dec.maximal_piece_count() == 5, format!("maximal_pieces={}", dec.maximal_piece_count())),
        Check::new("fig1 open pieces", red == Some(2), format!("pieces with component -x: {red:?}")),
        Check::new("fig1 bounds", report.ok(), report.csv_row()),
    ])
}

pub fn sawtooth_checks() -> Result<Vec<Check>> {
    let (lo, hi) = (rat(-3, 2), int(2));
    let mut out = Vec::new();
    for m in 1..=20 {
        let s = sawtooth(m, &lo, &hi)?;
        let dec = pieces_1d(&s)?;
        let knots = (0..=2 * m as i64).all(|i| s.eval(&[int(i)]).ok() == Some(if i % 2 == 0 { lo.clone() } else { hi.clone() }));
        out.push(Check::new(
            format!("sawtooth m={m}"),
            knots && dec.maximal_piece_count() == 2 * m && dec.n_active() == 2 * m,
            format!("pieces={} n_active={} knots={knots}", dec.maximal_piece_count(), dec.n_active()),
        ));
    }
    Ok(out)
}

pub fn lift_checks(seed: u64) -> Result<Vec<Check>> {
    Ok(lift_cases(seed)?
        .into_iter()
        .map(|c| {
            Check::new(
                format!("lift seed={} m={}", c.seed, c.m),
                c.ok() && c.base_pieces <= 10,
                format!("pieces={} certified={} leaves={} budget={}", c.measured, c.certified, c.lift_leaves, c.budget),
            )
        })
        .collect())
}

fn random_planes(rng: &mut ChaCha8Rng, dim: usize, n: usize, spread: i64) -> Vec<Hyperplane> {
    let planes: Vec<Hyperplane> = (0..n)
        .map(|_| loop {
            let normal: Vec<Rational> = (0..dim).map(|_| int(rng.gen_range(-spread..=spread))).collect();
            if let Ok(h) = Hyperplane::new(normal, int(rng.gen_range(-spread..=spread))) {
                break h;
            }
        })
        .collect();
    dedup_planes(&planes)
}

/// Sampling and sign-scan oracles against exact counts.
pub fn sampling_oracle_checks(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for i in 0..20 {
        let leaves = rng.gen_range(1..=6);
        let e = random_expr(&mut rng, 2, leaves)?;
        let exact = decompose(&e)?.maximal_piece_count();
        let sampled = sample_piece_lower_bound(&e, &covering_box(&e)?, 30)?.pieces;
        out.push(Check::new(format!("sampling 2-D #{i}"), sampled <= exact, format!("sampled={sampled} exact={exact}")));
    }

    for i in 0..20 {
        let leaves = rng.gen_range(1..=6);
        let e = random_expr(&mut rng, 1, leaves)?;
        let exact = pieces_1d(&e)?.maximal_piece_count();
        let (lo, hi, gap) = crossing_span(&e);
        let resolution = usize::try_from(&((&hi - &lo) * int(2) / gap).ceil().to_integer()).unwrap_or(2) + 2;
        let sampled = sample_piece_lower_bound(&e, &[(lo, hi)], resolution)?.pieces;
        out.push(Check::new(format!("sampling 1-D #{i}"), sampled == exact, format!("sampled={sampled} exact={exact} resolution={resolution}")));
    }

    for i in 0..20 {
        let dim = 2 + i % 2;
        let n = rng.gen_range(1..=5);
        let planes = random_planes(&mut rng, dim, n, 3);
        let cells: BTreeSet<Vec<Side>> = enumerate_cells(&planes, dim)?.into_iter().map(|c| c.signs).collect();
        let scan = sign_scan(&planes, &cube(dim, 8), if dim == 2 { 60 } else { 16 })?;
        out.push(Check::new(
            format!("sign scan #{i}"),
            scan.vectors.is_subset(&cells),
            format!("seen={} cells={} coverage={:.2}", scan.vectors.len(), cells.len(), scan.coverage(cells.len())),
        ));
    }

    Ok(out)
}

/// Longest-path DP against brute force on families of 3 to 5 lines.
pub fn path_oracle_checks(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for i in 0..30u64 {
        let n = 3 + (i as usize % 3);
        let family = line_family(FamilyKind::RandomGeneric, n, seed.wrapping_add(i))?;
        let dp = longest_monotone_path(&family)?.length;
        let brute = exhaustive_monotone_paths(&family, 5)?;
        out.push(Check::new(format!("paths n={n} seed={}", seed.wrapping_add(i)), dp == brute, format!("dp={dp} exhaustive={brute}")));
    }
    Ok(out)
}

pub fn oracle_checks(seed: u64) -> Result<Vec<Check>> {
    let mut out = sampling_oracle_checks(seed)?;
    out.extend(path_oracle_checks(seed)?);
    Ok(out)
}

/// Span of all leaf crossings, padded by 1, and the smallest gap between
/// consecutive crossings.
fn crossing_span(e: &cpa_core::CpaExpr) -> (Rational, Rational, Rational) {
    let leaves = e.leaf_components();
    let mut xs = BTreeSet::new();
    for (i, f) in leaves.iter().enumerate() {
        for g in leaves.iter().skip(i + 1) {
            let ds = &f.gradient()[0] - &g.gradient()[0];
            if ds != int(0) {
                xs.insert((g.offset() - f.offset()) / ds);
            }
        }
    }
    let xs: Vec<Rational> = xs.into_iter().collect();
    let gap = xs.windows(2).map(|w| &w[1] - &w[0]).min().unwrap_or_else(|| int(1));
    match (xs.first(), xs.last()) {
        (Some(a), Some(b)) => (a - int(1), b + int(1), gap),
        _ => (int(-1), int(1), gap),
    }
}

pub fn bound_checks(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..50 {
        let leaves = rng.gen_range(1..=8);
        let e = random_expr(&mut rng, 2, leaves)?;
        let report = check_bounds(&decompose(&e)?)?;
        out.push(Check::new(format!("bounds 2-D #{i}"), report.ok(), report.csv_row()));
    }
    for (i, (dim, n)) in [(2, 3), (2, 6), (2, 9), (3, 4), (3, 6), (4, 5)].into_iter().enumerate() {
        let planes: Vec<Hyperplane> = (0..n)
            .map(|_| {
                let normal: Vec<Rational> = (0..dim).map(|_| rat(rng.gen_range(-999..=999), rng.gen_range(1..=97))).collect();
                Hyperplane::new(normal, rat(rng.gen_range(-999..=999), rng.gen_range(1..=89)))
            })
            .collect::<Result<_>>()?;
        let cells = enumerate_cells(&planes, dim)?.len();
        let expected = generic_cell_count(n as u64, dim as u64);
        out.push(Check::new(
            format!("generic arrangement #{i} d={dim} n={n}"),
            u64::try_from(&expected).is_ok_and(|e| e == cells as u64),
            format!("cells={cells} expected={expected}"),
        ));
    }
    Ok(out)
}
