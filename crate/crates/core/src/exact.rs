//! Exact rational scalars, points and affine maps.
//!
//! Every sign decision in the crate goes through these types, so nothing
//! here touches floating point.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// A point of R^d.
pub type Point = Vec<Rational>;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num / den`, reduced. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Formats as `p/q`, or `p` when the denominator is one.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let q = Rational::from_str(t).map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))?;
    if q.denom().is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(q)
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

pub fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// `x ↦ gradient·x + offset`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineMap {
    gradient: Vec<Rational>,
    offset: Rational,
}

impl AffineMap {
    pub fn new(gradient: Vec<Rational>, offset: Rational) -> Result<Self> {
        if gradient.is_empty() {
            return Err(Error::UnsupportedDimension(0));
        }
        Ok(AffineMap { gradient, offset })
    }

    pub fn constant(dim: usize, value: Rational) -> Result<Self> {
        Self::new(vec![Rational::zero(); dim], value)
    }

    /// Convenience constructor from small integers.
    pub fn from_ints(gradient: &[i64], offset: i64) -> Result<Self> {
        Self::new(gradient.iter().map(|&g| int(g)).collect(), int(offset))
    }

    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn gradient(&self) -> &[Rational] {
        &self.gradient
    }

    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    pub fn is_constant(&self) -> bool {
        self.gradient.iter().all(Zero::is_zero)
    }

    pub fn eval(&self, x: &[Rational]) -> Result<Rational> {
        check_dim(self.dim(), x.len())?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[Rational]) -> Rational {
        dot(&self.gradient, x) + &self.offset
    }

    /// Pointwise difference `self - other`.
    pub fn sub(&self, other: &AffineMap) -> Result<AffineMap> {
        check_dim(self.dim(), other.dim())?;
        let gradient = self.gradient.iter().zip(&other.gradient).map(|(a, b)| a - b).collect();
        Ok(AffineMap { gradient, offset: &self.offset - &other.offset })
    }

    /// Embeds into a higher dimension: coordinate `k` of `self` becomes
    /// coordinate `positions[k]` of a map on R^`dim`.
    pub fn embed(&self, dim: usize, positions: &[usize]) -> Result<AffineMap> {
        check_dim(self.dim(), positions.len())?;
        let mut gradient = vec![Rational::zero(); dim];
        for (g, &p) in self.gradient.iter().zip(positions) {
            if p >= dim {
                return Err(Error::AxisOutOfRange { axis: p, dim });
            }
            gradient[p] = g.clone();
        }
        AffineMap::new(gradient, self.offset.clone())
    }

    /// Fixes coordinate `axis` to `value`.
    pub fn restrict(&self, axis: usize, value: &Rational) -> Result<AffineMap> {
        if axis >= self.dim() {
            return Err(Error::AxisOutOfRange { axis, dim: self.dim() });
        }
        if self.dim() == 1 {
            return Err(Error::UnsupportedDimension(0));
        }
        let mut gradient = self.gradient.clone();
        let g = gradient.remove(axis);
        Ok(AffineMap { gradient, offset: &self.offset + g * value })
    }
}

/// `f(x) - g(x)` as a map.
pub fn affine_sub(f: &AffineMap, g: &AffineMap) -> Result<AffineMap> {
    f.sub(g)
}

pub fn affine_eval(f: &AffineMap, x: &[Rational]) -> Result<Rational> {
    f.eval(x)
}

impl fmt::Debug for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["x", "y", "z", "t"];
        let mut wrote = false;
        for (k, g) in self.gradient.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            let var = if self.dim() <= names.len() { names[k].to_string() } else { format!("x{k}") };
            let sign = if g.is_negative() { "-" } else if wrote { "+" } else { "" };
            let mag = g.abs();
            if mag.is_one() {
                write!(f, "{sign}{var}")?;
            } else {
                write!(f, "{sign}{mag}{var}")?;
            }
            wrote = true;
        }
        if !self.offset.is_zero() || !wrote {
            if wrote && self.offset.is_positive() {
                write!(f, "+")?;
            }
            write!(f, "{}", self.offset)?;
        }
        Ok(())
    }
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Same as [`rational_str`] for sequences.
pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(format_rational).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        strs.iter().map(|s| parse_rational(s).map_err(serde::de::Error::custom)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig1_minus_x() -> AffineMap {
        AffineMap::from_ints(&[-1, 0], 0).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(fig1_minus_x().eval(&[int(2), int(5)]).unwrap(), int(-2));
        let c = AffineMap::constant(3, rat(7, 2)).unwrap();
        assert_eq!(c.eval(&[int(1), int(-9), rat(1, 5)]).unwrap(), rat(7, 2));
        let f = AffineMap::new(vec![int(3), int(-2)], rat(1, 2)).unwrap();
        assert_eq!(f.eval(&[rat(1, 3), rat(1, 4)]).unwrap(), int(1));
    }

    #[test]
    fn eval_dimension_mismatch() {
        let err = fig1_minus_x().eval(&[int(1)]).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, got: 1 });
    }

    #[test]
    fn sub_examples() {
        let f = fig1_minus_x();
        let zero = f.sub(&f).unwrap();
        assert!(zero.is_constant());
        assert_eq!(zero.offset(), &int(0));

        let a = AffineMap::from_ints(&[-1], 0).unwrap();
        let b = AffineMap::from_ints(&[-2], 3).unwrap();
        let h = a.sub(&b).unwrap();
        assert_eq!(h, AffineMap::from_ints(&[1], -3).unwrap());
        for x in [rat(1, 7), rat(-5, 3), rat(22, 9)] {
            let p = [x];
            assert_eq!(h.eval(&p).unwrap(), a.eval(&p).unwrap() - b.eval(&p).unwrap());
        }

        let y = AffineMap::from_ints(&[0, 1], 0).unwrap();
        let line = y.sub(&f).unwrap();
        assert_eq!(line, AffineMap::from_ints(&[1, 1], 0).unwrap());
        assert_eq!(line.eval(&[int(3), int(-3)]).unwrap(), int(0));
    }

    #[test]
    fn sub_dimension_mismatch() {
        let a = AffineMap::from_ints(&[1], 0).unwrap();
        assert!(a.sub(&fig1_minus_x()).is_err());
    }

    #[test]
    fn rational_strings() {
        assert_eq!(format_rational(&rat(2, 6)), "1/3");
        assert_eq!(format_rational(&rat(-4, 2)), "-2");
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
    }

    #[test]
    fn display_reads_like_a_formula() {
        assert_eq!(AffineMap::from_ints(&[-2], 3).unwrap().to_string(), "-2x+3");
        assert_eq!(AffineMap::from_ints(&[0, 1], 0).unwrap().to_string(), "y");
        assert_eq!(AffineMap::from_ints(&[0, 0], -1).unwrap().to_string(), "-1");
    }

    fn small_rat() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..20).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #[test]
        fn sub_is_pointwise(
            g1 in proptest::collection::vec(small_rat(), 3),
            g2 in proptest::collection::vec(small_rat(), 3),
            o1 in small_rat(), o2 in small_rat(),
            x in proptest::collection::vec(small_rat(), 3),
        ) {
            let f = AffineMap::new(g1, o1).unwrap();
            let g = AffineMap::new(g2, o2).unwrap();
            let h = affine_sub(&f, &g).unwrap();
            prop_assert_eq!(h.eval(&x).unwrap(), f.eval(&x).unwrap() - g.eval(&x).unwrap());
        }

        #[test]
        fn normalization_is_canonical(p in -1000i64..1000, q in 1i64..1000, k in -50i64..50) {
            prop_assume!(k != 0);
            prop_assert_eq!(rat(p, q), rat(p * k, q * k));
            let r = rat(p * k, q * k);
            prop_assert!(r.denom() > &BigInt::from(0));
            prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }

    #[test]
    fn order_agrees_with_cross_multiplication() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let (a, b) = (rng.gen_range(-10_000i64..10_000), rng.gen_range(1i64..10_000));
            let (c, d) = (rng.gen_range(-10_000i64..10_000), rng.gen_range(1i64..10_000));
            let expected = (a as i128 * d as i128).cmp(&(c as i128 * b as i128));
            assert_eq!(rat(a, b).cmp(&rat(c, d)), expected);
        }
    }
}
