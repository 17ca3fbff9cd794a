//! Bound formulas relating piece counts to component counts, and growth
//! exponent fitting.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::pieces::PieceDecomposition;

pub fn binomial(n: &BigUint, k: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        let top = n - BigUint::from(i);
        if top.is_zero() {
            return BigUint::zero();
        }
        acc = acc * top / BigUint::from(i + 1);
    }
    acc
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

fn check(n: u64, d: u64) -> Result<()> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidParameter(format!("bounds need n >= 1 and d >= 1, got n={n} d={d}")));
    }
    Ok(())
}

/// `min(sum_{i<=d} C((n^2 - n)/2, i), n!)`: the classical bound on the
/// number of convex pieces.
pub fn lemma1_bound(n: u64, d: u64) -> Result<BigUint> {
    check(n, d)?;
    let pairs = BigUint::from(n) * BigUint::from(n - 1) / BigUint::from(2u32);
    let sum: BigUint = (0..=d).map(|i| binomial(&pairs, i)).sum();
    Ok(sum.min(factorial(n)))
}

/// `n * sum_{k<=d} C(n-1, k)`: the number of facets of an arrangement of
/// `n` hyperplanes in R^(d+1) can be no larger.
pub fn thm2_facet_bound(n: u64, d: u64) -> Result<BigUint> {
    check(n, d)?;
    let m = BigUint::from(n - 1);
    let sum: BigUint = (0..=d.min(n - 1)).map(|k| binomial(&m, k)).sum();
    Ok(BigUint::from(n) * sum)
}

/// `sum_{k<=d} C(n, k)`: cells of `n` hyperplanes in general position in R^d.
pub fn generic_cell_count(n: u64, d: u64) -> BigUint {
    (0..=d).map(|k| binomial(&BigUint::from(n), k)).sum()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub n: usize,
    pub d: usize,
    pub pieces: usize,
    pub cells: usize,
    pub lemma1: BigUint,
    pub thm2: BigUint,
    /// `n <= pieces <= lemma1`.
    pub lemma1_ok: bool,
    /// `pieces <= cells <= thm2`.
    pub thm2_ok: bool,
}

impl BoundReport {
    pub fn ok(&self) -> bool {
        self.lemma1_ok && self.thm2_ok
    }

    pub const CSV_HEADER: &'static str = "n,d,pieces,cells,lemma1,thm2,ok";

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{},{},{}", self.n, self.d, self.pieces, self.cells, self.lemma1, self.thm2, self.ok())
    }
}

pub fn check_bounds(dec: &PieceDecomposition) -> Result<BoundReport> {
    let n = dec.n_active();
    let d = dec.dim;
    let lemma1 = lemma1_bound(n as u64, d as u64)?;
    let thm2 = thm2_facet_bound(n as u64, d as u64)?;
    let pieces = dec.maximal_piece_count();
    let cells = dec.cell_count();
    Ok(BoundReport {
        n,
        d,
        pieces,
        cells,
        lemma1_ok: n <= pieces && BigUint::from(pieces) <= lemma1,
        thm2_ok: pieces <= cells && BigUint::from(cells) <= thm2,
        lemma1,
        thm2,
    })
}

/// Least-squares slope of `ln p` against `ln n`, plus the slopes between
/// consecutive samples.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub pairwise: Vec<f64>,
    /// Smallest and largest `n` of the fitted samples.
    pub range: (u64, u64),
}

pub fn fit_exponent(samples: &[(u64, u64)]) -> Result<ExponentFit> {
    if samples.len() < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 samples, got {}", samples.len())));
    }
    if samples.windows(2).any(|w| w[0].0 >= w[1].0) || samples.iter().any(|&(n, p)| n == 0 || p == 0) {
        return Err(Error::InvalidParameter("samples need strictly increasing positive n and positive p".into()));
    }
    let logs: Vec<(f64, f64)> =
        samples.iter().map(|&(n, p)| (n.to_f64().unwrap().ln(), p.to_f64().unwrap().ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|l| l.0).sum::<f64>() / k;
    let my = logs.iter().map(|l| l.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let pairwise = logs.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
    Ok(ExponentFit { slope: sxy / sxx, pairwise, range: (samples[0].0, samples[samples.len() - 1].0) })
}
