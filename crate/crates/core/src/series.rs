//! Truncated noncommutative power series with matrix coefficients.
//!
//! [`TruncSeries`] is indexed by words; [`MultiSeries`] by tuples of words
//! (one per indeterminate tuple) and truncated on total length.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;

use crate::algebra::{inverse, Mat, Word};
use crate::error::{Error, NodePath, Result};
use crate::expr::{Node, RatExpr};

/// Index of a series coefficient.
pub trait SeriesKey: Clone + Ord + Debug {
    fn total_len(&self) -> usize;
    fn concat(&self, other: &Self) -> Self;
    fn unit(slots: usize) -> Self;
    fn slots(&self) -> usize;
}

impl SeriesKey for Word {
    fn total_len(&self) -> usize {
        self.len()
    }
    fn concat(&self, other: &Self) -> Self {
        Word::concat(self, other)
    }
    fn unit(_: usize) -> Self {
        Word::empty()
    }
    fn slots(&self) -> usize {
        1
    }
}

/// One word per tuple of indeterminates.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiWord(pub Vec<Word>);

impl Ord for MultiWord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_len().cmp(&other.total_len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl SeriesKey for MultiWord {
    fn total_len(&self) -> usize {
        self.0.iter().map(Word::len).sum()
    }
    fn concat(&self, other: &Self) -> Self {
        MultiWord(self.0.iter().zip(&other.0).map(|(a, b)| a.concat(b)).collect())
    }
    fn unit(slots: usize) -> Self {
        MultiWord(vec![Word::empty(); slots])
    }
    fn slots(&self) -> usize {
        self.0.len()
    }
}

/// Series truncated at total length `order`. Zero coefficients are not stored.
#[derive(Clone, PartialEq, Debug)]
pub struct Series<K: SeriesKey> {
    slots: usize,
    rows: usize,
    cols: usize,
    order: usize,
    coeffs: BTreeMap<K, Mat>,
}

pub type TruncSeries = Series<Word>;
pub type MultiSeries = Series<MultiWord>;

impl<K: SeriesKey> Series<K> {
    pub fn zero(slots: usize, rows: usize, cols: usize, order: usize) -> Self {
        Series { slots, rows, cols, order, coeffs: BTreeMap::new() }
    }

    pub fn constant(slots: usize, c: Mat, order: usize) -> Self {
        let mut s = Series::zero(slots, c.rows(), c.cols(), order);
        s.add_term(K::unit(slots), c);
        s
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Nonzero coefficients in degree-lex order.
    pub fn coeffs(&self) -> &BTreeMap<K, Mat> {
        &self.coeffs
    }

    pub fn coeff(&self, k: &K) -> Mat {
        self.coeffs.get(k).cloned().unwrap_or_else(|| Mat::zeros(self.rows, self.cols))
    }

    pub fn constant_term(&self) -> Mat {
        self.coeff(&K::unit(self.slots))
    }

    /// Adds `c` to the coefficient at `k`; ignored beyond the order.
    pub fn add_term(&mut self, k: K, c: Mat) {
        assert_eq!(c.shape(), (self.rows, self.cols), "series coefficient shape");
        if k.total_len() > self.order || c.is_zero() {
            return;
        }
        match self.coeffs.remove(&k) {
            Some(old) => {
                let s = &old + &c;
                if !s.is_zero() {
                    self.coeffs.insert(k, s);
                }
            }
            None => {
                self.coeffs.insert(k, c);
            }
        }
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Series {
            slots: self.slots,
            rows: self.rows,
            cols: self.cols,
            order,
            coeffs: self.coeffs.iter().filter(|(k, _)| k.total_len() <= order).map(|(k, c)| (k.clone(), c.clone())).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape(), "series add: shape mismatch");
        let mut out = self.truncate(other.order);
        for (k, c) in &other.coeffs {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c)
    }

    pub fn map(&self, f: impl Fn(&Mat) -> Mat) -> Self {
        let mut out = Series::zero(self.slots, 0, 0, self.order);
        let mut shape = None;
        for (k, c) in &self.coeffs {
            let v = f(c);
            shape.get_or_insert(v.shape());
            out.coeffs.insert(k.clone(), v);
        }
        let (r, c) = shape.unwrap_or_else(|| f(&Mat::zeros(self.rows, self.cols)).shape());
        out.rows = r;
        out.cols = c;
        out.coeffs.retain(|_, v| !v.is_zero());
        out
    }

    /// Cauchy product: the coefficient at `w` is `Σ_{w = uv} s_u t_v`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "series mul: inner dimension mismatch");
        let order = self.order.min(other.order);
        let mut out = Series::zero(self.slots, self.rows, other.cols, order);
        for (u, a) in &self.coeffs {
            for (v, b) in &other.coeffs {
                if u.total_len() + v.total_len() <= order {
                    out.add_term(u.concat(v), a * b);
                }
            }
        }
        out
    }

    /// Assembles a grid of equally shaped series.
    pub fn block(grid: &[Vec<Self>]) -> Self {
        let first = &grid[0][0];
        let order = grid.iter().flatten().map(|s| s.order).min().unwrap_or(0);
        let mut keys: Vec<K> = grid.iter().flatten().flat_map(|s| s.coeffs.keys().cloned()).collect();
        keys.sort();
        keys.dedup();
        let mut out = Series::zero(first.slots, first.rows * grid.len(), first.cols * grid[0].len(), order);
        for k in keys {
            let blocks: Vec<Vec<Mat>> = grid.iter().map(|row| row.iter().map(|s| s.coeff(&k)).collect()).collect();
            out.add_term(k, Mat::block(&blocks));
        }
        out
    }

    /// True when all coefficients up to total length `order` agree.
    pub fn agrees_to(&self, other: &Self, order: usize) -> bool {
        assert!(order <= self.order && order <= other.order, "comparison beyond truncation");
        self.truncate(order).coeffs == other.truncate(order).coeffs
    }
}

/// Inverse of a square series with invertible constant term, to its order.
pub fn series_invert<K: SeriesKey>(s: &Series<K>) -> Result<Series<K>> {
    if s.rows != s.cols {
        return Err(Error::ShapeMismatch(format!("inverse of non-square {}x{} series", s.rows, s.cols)));
    }
    let c0 = s.constant_term();
    let c0_inv = inverse(&c0).ok_or(Error::SingularConstantTerm)?;
    // t = Σ_k (-c0⁻¹ N)^k c0⁻¹, with N the part of s of positive length
    let unit = K::unit(s.slots);
    let mut x = Series::zero(s.slots, s.rows, s.cols, s.order);
    for (k, c) in &s.coeffs {
        if *k != unit {
            x.add_term(k.clone(), -(&c0_inv * c));
        }
    }
    let mut term = Series::constant(s.slots, c0_inv.clone(), s.order);
    let mut t = term.clone();
    for _ in 0..s.order {
        term = x.mul(&term);
        if term.coeffs.is_empty() {
            break;
        }
        t = t.add(&term);
    }
    Ok(t)
}

/// `series_invert` truncated to length `order`.
pub fn series_invert_to(s: &TruncSeries, order: usize) -> Result<TruncSeries> {
    series_invert(&s.truncate(order))
}

impl TruncSeries {
    pub fn from_poly(p: &crate::expr::MatPoly, order: usize) -> Self {
        let mut s = Series::zero(1, p.rows(), p.cols(), order);
        for (w, c) in p.terms() {
            s.add_term(w.clone(), c.clone());
        }
        s
    }
}

impl serde::Serialize for TruncSeries {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = ser.serialize_map(Some(self.coeffs.len()))?;
        for (w, c) in &self.coeffs {
            map.serialize_entry(&w.to_string(), c)?;
        }
        map.end()
    }
}

/// Power series expansion of an arity-one expression regular at zero,
/// truncated at word length `order`.
pub fn expand(e: &RatExpr, order: usize) -> Result<TruncSeries> {
    if e.arity() != 1 {
        return Err(Error::DimensionMismatch(format!("expand needs arity 1, got {}", e.arity())));
    }
    Expander { order, memo: HashMap::new() }.walk(e, &mut Vec::new())
}

/// Expansion of a multi-tuple expression; keys carry one word per tuple and
/// truncation is on total length.
pub fn expand_multi(e: &RatExpr, order: usize) -> Result<MultiSeries> {
    Expander { order, memo: HashMap::new() }.walk(e, &mut Vec::new())
}

struct Expander<K: SeriesKey> {
    order: usize,
    memo: HashMap<usize, Series<K>>,
}

/// Expansion of the node kinds whose meaning depends on the key type.
trait LeafExpand: SeriesKey {
    fn leaf(ex: &mut Expander<Self>, e: &RatExpr, path: &mut Vec<usize>) -> Result<Series<Self>>;
}

impl LeafExpand for Word {
    fn leaf(ex: &mut Expander<Self>, e: &RatExpr, _: &mut Vec<usize>) -> Result<Series<Self>> {
        match e.node() {
            Node::Poly { poly, .. } => Ok(TruncSeries::from_poly(poly, ex.order)),
            _ => Err(Error::DimensionMismatch("multi-tuple node in arity-one expression".into())),
        }
    }
}

impl LeafExpand for MultiWord {
    fn leaf(ex: &mut Expander<Self>, e: &RatExpr, path: &mut Vec<usize>) -> Result<Series<Self>> {
        match e.node() {
            Node::Poly { slot, poly } => {
                let mut s = Series::zero(e.arity(), poly.rows(), poly.cols(), ex.order);
                for (w, c) in poly.terms() {
                    let mut key = vec![Word::empty(); e.arity()];
                    key[slot - 1] = w.clone();
                    s.add_term(MultiWord(key), c.clone());
                }
                Ok(s)
            }
            Node::Tensor(l, r) => {
                let sl = ex.child(l, 0, path)?;
                let sr = ex.child(r, 1, path)?;
                Ok(tensor_series(&sl, &sr, ex.order))
            }
            Node::Iota(inner) => {
                let si = ex.child(inner, 0, path)?;
                let l = e.arity();
                let mut out = Series::zero(l, si.rows, si.cols, ex.order);
                for (k, c) in &si.coeffs {
                    let mut key = k.0.clone();
                    key.insert(l - 2, Word::empty());
                    out.add_term(MultiWord(key), c.clone());
                }
                Ok(out)
            }
            _ => unreachable!("structural nodes are handled by walk"),
        }
    }
}

impl<K: LeafExpand> Expander<K> {
    fn child(&mut self, c: &RatExpr, k: usize, path: &mut Vec<usize>) -> Result<Series<K>> {
        path.push(k);
        let r = self.walk(c, path);
        path.pop();
        r
    }

    fn walk(&mut self, e: &RatExpr, path: &mut Vec<usize>) -> Result<Series<K>> {
        if let Some(s) = self.memo.get(&e.id()) {
            return Ok(s.clone());
        }
        let s = match e.node() {
            Node::Add(a, b) => {
                let sa = self.child(a, 0, path)?;
                let sb = self.child(b, 1, path)?;
                sa.add(&sb)
            }
            Node::Mul(a, b) => {
                let sa = self.child(a, 0, path)?;
                let sb = self.child(b, 1, path)?;
                sa.mul(&sb)
            }
            Node::Inv { inner, .. } => {
                let si = self.child(inner, 0, path)?;
                series_invert(&si).map_err(|err| match err {
                    Error::SingularConstantTerm => Error::NotRegularAtZero { path: NodePath(path.clone()) },
                    other => other,
                })?
            }
            Node::Block { grid_cols, entries, .. } => {
                let mut parts = Vec::with_capacity(entries.len());
                for (k, c) in entries.iter().enumerate() {
                    parts.push(self.child(c, k, path)?);
                }
                let grid: Vec<Vec<Series<K>>> = parts.chunks(*grid_cols).map(<[Series<K>]>::to_vec).collect();
                Series::block(&grid)
            }
            _ => K::leaf(self, e, path)?,
        };
        self.memo.insert(e.id(), s.clone());
        Ok(s)
    }
}

/// Series of `L ⊗ R` in canonical coefficient order.
fn tensor_series(l: &MultiSeries, r: &MultiSeries, order: usize) -> MultiSeries {
    let slots = l.slots + r.slots;
    let mut out = Series::zero(slots, l.rows * r.rows, l.cols * r.cols, order);
    for (u, a) in &l.coeffs {
        for (v, b) in &r.coeffs {
            if u.total_len() + v.total_len() <= order {
                let mut key = u.0.clone();
                key.extend(v.0.iter().cloned());
                out.add_term(MultiWord(key), crate::algebra::kron(a, b));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{words_up_to, q};
    use crate::expr::parse;

    #[test]
    fn geometric_series() {
        let s = expand(&parse("inv(1 - z1)", 1).unwrap(), 3).unwrap();
        for w in words_up_to(1, 3) {
            assert_eq!(s.coeff(&w), Mat::identity(1), "{w:?}");
        }
        assert_eq!(s.coeffs().len(), 4);
    }

    #[test]
    fn invert_constant_identity() {
        let s = TruncSeries::constant(1, Mat::identity(2), 4);
        assert_eq!(series_invert(&s).unwrap(), s);
    }

    #[test]
    fn invert_one_minus_letters_gives_all_ones() {
        let p = parse("1 - z1 - z2", 2).unwrap();
        let s = expand(&p, 4).unwrap();
        let t = series_invert(&s).unwrap();
        for w in words_up_to(2, 4) {
            assert_eq!(t.coeff(&w), Mat::identity(1));
        }
        assert_eq!(s.mul(&t), TruncSeries::constant(1, Mat::identity(1), 4));
    }

    #[test]
    fn singular_constant_is_rejected() {
        let s = expand(&parse("z1", 1).unwrap(), 2).unwrap();
        assert!(matches!(series_invert(&s), Err(Error::SingularConstantTerm)));
        let e = parse("z1*inv(z1)", 1).unwrap();
        assert!(matches!(expand(&e, 2), Err(Error::NotRegularAtZero { ref path }) if path.0 == vec![1]));
    }

    #[test]
    fn polynomial_expansion_is_its_coefficient_map() {
        let e = parse("3 - z2*z1 + 1/2*z1*z2*z2", 2).unwrap();
        let s = expand(&e, 3).unwrap();
        assert_eq!(s.coeffs(), e.as_poly().unwrap().terms());
        let cut = expand(&e, 2).unwrap();
        assert_eq!(cut.coeffs().len(), 2);
        assert_eq!(cut.constant_term(), Mat::new(1, 1, vec![q(3)]));
    }

    #[test]
    fn json_uses_digit_words_in_degree_lex_order() {
        let s = expand(&parse("inv(1 - z1)", 1).unwrap(), 2).unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"":[["1"]],"1":[["1"]],"11":[["1"]]}"#);
    }
}
