//! Continuous piecewise affine functions as min/max trees over affine leaves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{check_dim, format_rational, parse_rational, AffineMap, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CpaExpr {
    Leaf(AffineMap),
    Min(Vec<CpaExpr>),
    Max(Vec<CpaExpr>),
}

/// Distinct affine maps in first-appearance order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ComponentSet {
    maps: Vec<AffineMap>,
}

impl ComponentSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `f` unless already present; returns its index either way.
    pub fn insert(&mut self, f: AffineMap) -> usize {
        match self.index_of(&f) {
            Some(i) => i,
            None => {
                self.maps.push(f);
                self.maps.len() - 1
            }
        }
    }

    pub fn index_of(&self, f: &AffineMap) -> Option<usize> {
        self.maps.iter().position(|g| g == f)
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn get(&self, i: usize) -> &AffineMap {
        &self.maps[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, AffineMap> {
        self.maps.iter()
    }

    pub fn as_slice(&self) -> &[AffineMap] {
        &self.maps
    }
}

impl FromIterator<AffineMap> for ComponentSet {
    fn from_iter<I: IntoIterator<Item = AffineMap>>(iter: I) -> Self {
        let mut set = ComponentSet::new();
        for f in iter {
            set.insert(f);
        }
        set
    }
}

impl CpaExpr {
    pub fn leaf(f: AffineMap) -> Self {
        CpaExpr::Leaf(f)
    }

    /// n-ary minimum. A single child is returned unwrapped.
    pub fn min(children: Vec<CpaExpr>) -> Result<Self> {
        Self::nary(children, CpaExpr::Min)
    }

    /// n-ary maximum. A single child is returned unwrapped.
    pub fn max(children: Vec<CpaExpr>) -> Result<Self> {
        Self::nary(children, CpaExpr::Max)
    }

    fn nary(mut children: Vec<CpaExpr>, wrap: fn(Vec<CpaExpr>) -> CpaExpr) -> Result<Self> {
        let first = children.first().ok_or_else(|| Error::Malformed("min/max without arguments".into()))?;
        let d = first.dim();
        for c in &children[1..] {
            check_dim(d, c.dim())?;
        }
        if children.len() == 1 {
            return Ok(children.pop().unwrap());
        }
        Ok(wrap(children))
    }

    pub fn dim(&self) -> usize {
        match self {
            CpaExpr::Leaf(f) => f.dim(),
            CpaExpr::Min(c) | CpaExpr::Max(c) => c[0].dim(),
        }
    }

    pub fn eval(&self, x: &[Rational]) -> Result<Rational> {
        check_dim(self.dim(), x.len())?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[Rational]) -> Rational {
        match self {
            CpaExpr::Leaf(f) => f.eval_unchecked(x),
            CpaExpr::Min(c) => c.iter().map(|e| e.eval_unchecked(x)).min().unwrap(),
            CpaExpr::Max(c) => c.iter().map(|e| e.eval_unchecked(x)).max().unwrap(),
        }
    }

    /// All distinct leaves, in depth-first order of first appearance.
    pub fn leaf_components(&self) -> ComponentSet {
        let mut set = ComponentSet::new();
        self.visit_leaves(&mut |f| {
            set.insert(f.clone());
        });
        set
    }

    fn visit_leaves(&self, visit: &mut impl FnMut(&AffineMap)) {
        match self {
            CpaExpr::Leaf(f) => visit(f),
            CpaExpr::Min(c) | CpaExpr::Max(c) => c.iter().for_each(|e| e.visit_leaves(visit)),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            CpaExpr::Leaf(_) => 1,
            CpaExpr::Min(c) | CpaExpr::Max(c) => 1 + c.iter().map(CpaExpr::size).sum::<usize>(),
        }
    }

    /// Applies `map` to every leaf, keeping the tree shape.
    pub fn map_leaves(&self, map: &impl Fn(&AffineMap) -> Result<AffineMap>) -> Result<CpaExpr> {
        Ok(match self {
            CpaExpr::Leaf(f) => CpaExpr::Leaf(map(f)?),
            CpaExpr::Min(c) => CpaExpr::Min(c.iter().map(|e| e.map_leaves(map)).collect::<Result<_>>()?),
            CpaExpr::Max(c) => CpaExpr::Max(c.iter().map(|e| e.map_leaves(map)).collect::<Result<_>>()?),
        })
    }

    /// Reinterprets the function on R^`dim`, reading its coordinate `k` from
    /// coordinate `positions[k]`.
    pub fn embed(&self, dim: usize, positions: &[usize]) -> Result<CpaExpr> {
        self.map_leaves(&|f| f.embed(dim, positions))
    }

    /// Substitutes `value` for coordinate `axis`, giving a function on R^(d-1).
    pub fn restrict_to_slice(&self, axis: usize, value: &Rational) -> Result<CpaExpr> {
        if axis >= self.dim() {
            return Err(Error::AxisOutOfRange { axis, dim: self.dim() });
        }
        self.map_leaves(&|f| f.restrict(axis, value))
    }

    /// `min(z_max, max(z_min, self))`.
    pub fn clamp(&self, z_min: &Rational, z_max: &Rational) -> Result<CpaExpr> {
        if z_min >= z_max {
            return Err(Error::InvalidRange { lo: format_rational(z_min), hi: format_rational(z_max) });
        }
        let d = self.dim();
        let lo = CpaExpr::Leaf(AffineMap::constant(d, z_min.clone())?);
        let hi = CpaExpr::Leaf(AffineMap::constant(d, z_max.clone())?);
        CpaExpr::min(vec![hi, CpaExpr::max(vec![lo, self.clone()])?])
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&Document::from(self)).expect("serializing an expression cannot fail")
    }

    pub fn from_json(text: &str) -> Result<CpaExpr> {
        let doc: Document = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        doc.into_expr()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(Document::from(self)).expect("serializing an expression cannot fail")
    }

    /// Node in the interchange schema, without the surrounding document.
    pub(crate) fn to_node(&self) -> Node {
        match self {
            CpaExpr::Leaf(f) => Node::leaf(f),
            CpaExpr::Min(c) => Node::Min { args: c.iter().map(CpaExpr::to_node).collect() },
            CpaExpr::Max(c) => Node::Max { args: c.iter().map(CpaExpr::to_node).collect() },
        }
    }
}

pub fn cpa_eval(e: &CpaExpr, x: &[Rational]) -> Result<Rational> {
    e.eval(x)
}

pub fn clamp(e: &CpaExpr, z_min: &Rational, z_max: &Rational) -> Result<CpaExpr> {
    e.clamp(z_min, z_max)
}

/// `{"d": int, "expr": node}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct Document {
    d: usize,
    #[serde(deserialize_with = "deserialize_node")]
    expr: Node,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
pub(crate) enum Node {
    Leaf { grad: Vec<String>, offset: String },
    Min { args: Vec<Node> },
    Max { args: Vec<Node> },
}

impl Node {
    pub(crate) fn leaf(f: &AffineMap) -> Node {
        Node::Leaf { grad: f.gradient().iter().map(format_rational).collect(), offset: format_rational(f.offset()) }
    }

    fn validate(&self) -> std::result::Result<(), String> {
        match self {
            Node::Leaf { grad, offset } => {
                for s in grad.iter().chain(std::iter::once(offset)) {
                    parse_rational(s).map_err(|e| e.to_string())?;
                }
                if grad.is_empty() {
                    return Err("leaf with empty gradient".into());
                }
                Ok(())
            }
            Node::Min { args } | Node::Max { args } => {
                if args.len() < 2 {
                    return Err(format!("min/max node needs at least 2 args, got {}", args.len()));
                }
                args.iter().try_for_each(Node::validate)
            }
        }
    }

    fn to_expr(&self, d: usize) -> Result<CpaExpr> {
        match self {
            Node::Leaf { grad, offset } => {
                check_dim(d, grad.len())?;
                let g = grad.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
                Ok(CpaExpr::Leaf(AffineMap::new(g, parse_rational(offset)?)?))
            }
            Node::Min { args } => Ok(CpaExpr::Min(args.iter().map(|a| a.to_expr(d)).collect::<Result<_>>()?)),
            Node::Max { args } => Ok(CpaExpr::Max(args.iter().map(|a| a.to_expr(d)).collect::<Result<_>>()?)),
        }
    }
}

// Structural checks run inside deserialization so serde_json attaches a
// line/column to the error.
fn deserialize_node<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Node, D::Error> {
    let node = Node::deserialize(d)?;
    node.validate().map_err(serde::de::Error::custom)?;
    Ok(node)
}

impl Document {
    fn into_expr(self) -> Result<CpaExpr> {
        if self.d == 0 {
            return Err(Error::UnsupportedDimension(0));
        }
        self.expr.to_expr(self.d)
    }
}

impl From<&CpaExpr> for Document {
    fn from(e: &CpaExpr) -> Self {
        Document { d: e.dim(), expr: e.to_node() }
    }
}

/// `min(y, min(max(-x, -1), max(3 - 2x, -x)))`, the function whose pieces
/// must stay open: its two `-x` regions touch only along a line where it
/// also equals `y`.
pub fn open_piece_example() -> CpaExpr {
    let a = |g: &[i64], o: i64| CpaExpr::Leaf(AffineMap::from_ints(g, o).unwrap());
    CpaExpr::min(vec![
        a(&[0, 1], 0),
        CpaExpr::min(vec![
            CpaExpr::max(vec![a(&[-1, 0], 0), a(&[0, 0], -1)]).unwrap(),
            CpaExpr::max(vec![a(&[-2, 0], 3), a(&[-1, 0], 0)]).unwrap(),
        ])
        .unwrap(),
    ])
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use proptest::prelude::*;

    fn leaf(g: &[i64], o: i64) -> CpaExpr {
        CpaExpr::Leaf(AffineMap::from_ints(g, o).unwrap())
    }

    fn abs_x() -> CpaExpr {
        CpaExpr::max(vec![leaf(&[1], 0), leaf(&[-1], 0)]).unwrap()
    }

    #[test]
    fn eval_examples() {
        let e = open_piece_example();
        assert_eq!(e.eval(&[int(0), int(0)]).unwrap(), int(0));
        assert_eq!(e.eval(&[int(2), int(0)]).unwrap(), int(-1));
        assert_eq!(e.eval(&[int(5), int(0)]).unwrap(), int(-5));
        assert_eq!(abs_x().eval(&[int(-3)]).unwrap(), int(3));
        let f = leaf(&[2, 1], 5);
        assert_eq!(f.eval(&[int(1), int(1)]).unwrap(), int(8));
        assert!(e.eval(&[int(1)]).is_err());
    }

    #[test]
    fn leaf_components_examples() {
        let comps = open_piece_example().leaf_components();
        assert_eq!(comps.len(), 4);
        for (g, o) in [(&[0, 1], 0), (&[-1, 0], 0), (&[0, 0], -1), (&[-2, 0], 3)] {
            assert!(comps.index_of(&AffineMap::from_ints(g, o).unwrap()).is_some());
        }
        let twice = CpaExpr::min(vec![leaf(&[1], 2), leaf(&[1], 2)]).unwrap();
        assert_eq!(twice.leaf_components().len(), 1);
    }

    #[test]
    fn unary_nodes_are_unwrapped() {
        assert_eq!(CpaExpr::min(vec![leaf(&[1], 0)]).unwrap(), leaf(&[1], 0));
        assert!(CpaExpr::max(vec![]).is_err());
        assert!(CpaExpr::max(vec![leaf(&[1], 0), leaf(&[1, 1], 0)]).is_err());
    }

    #[test]
    fn clamp_examples() {
        let c = leaf(&[1], 0).clamp(&int(-1), &int(1)).unwrap();
        assert_eq!(c.eval(&[int(5)]).unwrap(), int(1));
        assert_eq!(c.eval(&[int(-5)]).unwrap(), int(-1));
        assert_eq!(c.eval(&[rat(1, 2)]).unwrap(), rat(1, 2));
        assert!(matches!(leaf(&[1], 0).clamp(&int(1), &int(1)), Err(Error::InvalidRange { .. })));
    }

    #[test]
    fn clamp_preserves_values_inside_range() {
        let e = open_piece_example();
        let c = e.clamp(&int(-10), &int(10)).unwrap();
        for i in 0..=40 {
            for j in 0..=40 {
                let p = [rat(i, 10), rat(-j, 10)];
                assert_eq!(c.eval(&p).unwrap(), e.eval(&p).unwrap());
            }
        }
    }

    #[test]
    fn slice_of_open_piece_example() {
        let s = open_piece_example().restrict_to_slice(1, &int(0)).unwrap();
        let expected = CpaExpr::min(vec![
            leaf(&[0], 0),
            CpaExpr::min(vec![
                CpaExpr::max(vec![leaf(&[-1], 0), leaf(&[0], -1)]).unwrap(),
                CpaExpr::max(vec![leaf(&[-2], 3), leaf(&[-1], 0)]).unwrap(),
            ])
            .unwrap(),
        ])
        .unwrap();
        assert_eq!(s, expected);
        assert!(open_piece_example().restrict_to_slice(2, &int(0)).is_err());
        assert_eq!(leaf(&[3, 4], 1).restrict_to_slice(0, &int(2)).unwrap(), leaf(&[4], 7));
    }

    #[test]
    fn json_round_trip() {
        let e = open_piece_example();
        assert_eq!(CpaExpr::from_json(&e.to_json()).unwrap(), e);

        let third = CpaExpr::Leaf(AffineMap::new(vec![rat(1, 3)], int(0)).unwrap());
        let text = third.to_json();
        assert!(text.contains("\"1/3\""), "{text}");
    }

    #[test]
    fn json_rejects_malformed() {
        let one_child = r#"{"d":1,"expr":{"op":"min","args":[{"op":"leaf","grad":["1"],"offset":"0"}]}}"#;
        let err = CpaExpr::from_json(one_child).unwrap_err().to_string();
        assert!(err.contains("at least 2"), "{err}");
        assert!(err.contains("line"), "{err}");

        let bad_dim = r#"{"d":2,"expr":{"op":"leaf","grad":["1"],"offset":"0"}}"#;
        assert!(CpaExpr::from_json(bad_dim).is_err());
        let bad_rat = r#"{"d":1,"expr":{"op":"leaf","grad":["0.5"],"offset":"0"}}"#;
        assert!(CpaExpr::from_json(bad_rat).is_err());
        let truncated = r#"{"d":1,"expr":{"op":"leaf""#;
        assert!(CpaExpr::from_json(truncated).unwrap_err().to_string().contains("column"));
    }

    fn small_leaf(d: usize) -> impl Strategy<Value = CpaExpr> {
        (proptest::collection::vec(-4i64..=4, d), -4i64..=4)
            .prop_map(|(g, o)| CpaExpr::Leaf(AffineMap::from_ints(&g, o).unwrap()))
    }

    fn small_expr(d: usize) -> impl Strategy<Value = CpaExpr> {
        small_leaf(d).prop_recursive(3, 12, 3, |inner| {
            (any::<bool>(), proptest::collection::vec(inner, 2..4)).prop_map(|(is_min, c)| {
                if is_min {
                    CpaExpr::Min(c)
                } else {
                    CpaExpr::Max(c)
                }
            })
        })
    }

    fn reversed(e: &CpaExpr) -> CpaExpr {
        match e {
            CpaExpr::Leaf(_) => e.clone(),
            CpaExpr::Min(c) => CpaExpr::Min(c.iter().rev().map(reversed).collect()),
            CpaExpr::Max(c) => CpaExpr::Max(c.iter().rev().map(reversed).collect()),
        }
    }

    proptest! {
        #[test]
        fn value_matches_some_leaf(e in small_expr(2), x in -6i64..6, y in -6i64..6) {
            let p = [rat(x, 3), rat(y, 5)];
            let v = e.eval(&p).unwrap();
            prop_assert!(e.leaf_components().iter().any(|f| f.eval(&p).unwrap() == v));
        }

        #[test]
        fn child_order_is_irrelevant(e in small_expr(2), x in -6i64..6, y in -6i64..6) {
            let p = [rat(x, 2), rat(y, 7)];
            prop_assert_eq!(e.eval(&p).unwrap(), reversed(&e).eval(&p).unwrap());
        }

        #[test]
        fn clamp_adds_at_most_two_leaves(e in small_expr(1), lo in -5i64..0, hi in 0i64..5) {
            let c = e.clamp(&int(lo), &int(hi + 1)).unwrap();
            prop_assert!(c.leaf_components().len() <= e.leaf_components().len() + 2);
        }

        #[test]
        fn json_round_trip_any(e in small_expr(2)) {
            prop_assert_eq!(CpaExpr::from_json(&e.to_json()).unwrap(), e);
        }
    }
}
