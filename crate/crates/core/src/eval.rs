//! Evaluation on matrix tuples.
//!
//! A value of a `p x q` expression in `ℓ` tuples at points of sizes
//! `n_1..n_ℓ` is a `p·N x q·N` matrix (`N = Π n_k`) whose row and column
//! indices are ordered (coefficient, tuple 1, ..., tuple ℓ).

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{commutation_perm, inverse, kron, Mat};
use crate::error::{Error, NodePath, Result};
use crate::expr::{Node, RatExpr};

/// A `d`-tuple of `n x n` matrices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Mat>", into = "Vec<Mat>")]
pub struct EvalPoint {
    n: usize,
    mats: Vec<Mat>,
}

impl EvalPoint {
    pub fn new(mats: Vec<Mat>) -> Result<Self> {
        let n = mats.first().map_or(1, Mat::rows);
        if mats.iter().any(|m| m.shape() != (n, n)) {
            return Err(Error::DimensionMismatch("point matrices must be square of one size".into()));
        }
        if n == 0 {
            return Err(Error::DimensionMismatch("point size must be at least 1".into()));
        }
        Ok(EvalPoint { n, mats })
    }

    pub fn zeros(d: usize, n: usize) -> Self {
        EvalPoint { n, mats: vec![Mat::zeros(n, n); d] }
    }

    pub fn d(&self) -> usize {
        self.mats.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mats(&self) -> &[Mat] {
        &self.mats
    }

    /// The block upper triangular point `[[Z_j, W_j], [0, Z'_j]]`.
    pub fn block_upper(z: &EvalPoint, zp: &EvalPoint, w: &[Mat]) -> Result<EvalPoint> {
        if z.d() != zp.d() || w.len() != z.d() {
            return Err(Error::DimensionMismatch("block point: tuple lengths differ".into()));
        }
        if w.iter().any(|m| m.shape() != (z.n, zp.n)) {
            return Err(Error::DimensionMismatch(format!("directions must be {} x {}", z.n, zp.n)));
        }
        let mats = (0..z.d())
            .map(|j| Mat::block(&[vec![z.mats[j].clone(), w[j].clone()], vec![Mat::zeros(zp.n, z.n), zp.mats[j].clone()]]))
            .collect();
        EvalPoint::new(mats)
    }
}

impl TryFrom<Vec<Mat>> for EvalPoint {
    type Error = Error;

    fn try_from(mats: Vec<Mat>) -> Result<Self> {
        EvalPoint::new(mats)
    }
}

impl From<EvalPoint> for Vec<Mat> {
    fn from(p: EvalPoint) -> Self {
        p.mats
    }
}

/// Value of a multi-tuple expression in canonical index order.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorValue {
    pub rows: usize,
    pub cols: usize,
    pub sizes: Vec<usize>,
    pub data: Mat,
}

/// Evaluates an arity-one expression.
pub fn evaluate(e: &RatExpr, z: &EvalPoint) -> Result<Mat> {
    if e.arity() != 1 {
        return Err(Error::DimensionMismatch(format!("expected arity 1, got {}", e.arity())));
    }
    Ok(evaluate_multi(e, std::slice::from_ref(z))?.data)
}

/// Evaluates an expression in `ℓ` tuples at one point per tuple.
pub fn evaluate_multi(e: &RatExpr, points: &[EvalPoint]) -> Result<TensorValue> {
    if points.len() != e.arity() {
        return Err(Error::DimensionMismatch(format!("expected {} points, got {}", e.arity(), points.len())));
    }
    if let Some(p) = points.iter().find(|p| p.d() != e.d()) {
        return Err(Error::DimensionMismatch(format!("expression has {} letters, point has {}", e.d(), p.d())));
    }
    let mut ev = Evaluator { points, memo: HashMap::new() };
    let idx: Vec<usize> = (0..points.len()).collect();
    let data = ev.eval(e, &idx, &mut Vec::new())?;
    Ok(TensorValue { rows: e.rows(), cols: e.cols(), sizes: points.iter().map(EvalPoint::n).collect(), data })
}

struct Evaluator<'a> {
    points: &'a [EvalPoint],
    memo: HashMap<(usize, Vec<usize>), Mat>,
}

impl Evaluator<'_> {
    fn size(&self, idx: &[usize]) -> usize {
        idx.iter().map(|&i| self.points[i].n).product()
    }

    fn eval(&mut self, e: &RatExpr, idx: &[usize], path: &mut Vec<usize>) -> Result<Mat> {
        let key = (e.id(), idx.to_vec());
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let v = self.eval_node(e, idx, path)?;
        self.memo.insert(key, v.clone());
        Ok(v)
    }

    fn child(&mut self, e: &RatExpr, k: usize, idx: &[usize], path: &mut Vec<usize>) -> Result<Mat> {
        path.push(k);
        let v = self.eval(e, idx, path);
        path.pop();
        v
    }

    fn eval_node(&mut self, e: &RatExpr, idx: &[usize], path: &mut Vec<usize>) -> Result<Mat> {
        match e.node() {
            Node::Poly { slot, poly } => {
                let s = slot - 1;
                let pt = &self.points[idx[s]];
                let before = self.size(&idx[..s]);
                let after = self.size(&idx[s + 1..]);
                if poly.is_constant() {
                    return Ok(kron(&poly.constant_term(), &Mat::identity(before * pt.n * after)));
                }
                let x = poly.eval(&pt.mats);
                let x = insert_identity(&x, e.rows(), e.cols(), before, pt.n);
                Ok(if after == 1 { x } else { kron(&x, &Mat::identity(after)) })
            }
            Node::Add(a, b) => {
                let va = self.child(a, 0, idx, path)?;
                let vb = self.child(b, 1, idx, path)?;
                Ok(&va + &vb)
            }
            Node::Mul(a, b) => {
                let va = self.child(a, 0, idx, path)?;
                let vb = self.child(b, 1, idx, path)?;
                Ok(&va * &vb)
            }
            Node::Inv { inner, .. } => {
                let v = self.child(inner, 0, idx, path)?;
                inverse(&v).ok_or_else(|| Error::NotInDomain {
                    path: NodePath(path.clone()),
                    sizes: idx.iter().map(|&i| self.points[i].n).collect(),
                })
            }
            Node::Block { grid_cols, entries, .. } => {
                let mut vals = Vec::with_capacity(entries.len());
                for (k, c) in entries.iter().enumerate() {
                    vals.push(self.child(c, k, idx, path)?);
                }
                let grid: Vec<Vec<Mat>> = vals.chunks(*grid_cols).map(<[Mat]>::to_vec).collect();
                Ok(Mat::block(&grid))
            }
            Node::Tensor(l, r) => {
                let t = l.arity();
                let vl = self.child(l, 0, &idx[..t], path)?;
                let vr = self.child(r, 1, &idx[t..], path)?;
                let (nl, nr) = (self.size(&idx[..t]), self.size(&idx[t..]));
                Ok(tensor_reorder(&kron(&vl, &vr), (l.rows(), l.cols()), (r.rows(), r.cols()), nl, nr))
            }
            Node::Iota(inner) => {
                let l = idx.len();
                let mut sub = idx[..l - 2].to_vec();
                sub.push(idx[l - 1]);
                let v = self.child(inner, 0, &sub, path)?;
                let pre = self.size(&idx[..l - 2]);
                let mid = self.points[idx[l - 2]].n;
                let last = self.points[idx[l - 1]].n;
                Ok(insert_identity(&v, e.rows() * pre, e.cols() * pre, mid, last))
            }
        }
    }
}

/// Given `x` indexed `(outer, inner)` on both axes, returns the matrix indexed
/// `(outer, k, inner)` with an identity factor `I_k` in the middle.
pub(crate) fn insert_identity(x: &Mat, outer_r: usize, outer_c: usize, k: usize, inner: usize) -> Mat {
    if k == 1 {
        return x.clone();
    }
    let (rows, cols) = (outer_r * k * inner, outer_c * k * inner);
    let mut out = Mat::zeros(rows, cols);
    for o in 0..outer_r {
        for i in 0..inner {
            let src_r = o * inner + i;
            for oc in 0..outer_c {
                for j in 0..inner {
                    let v = x.get(src_r, oc * inner + j);
                    if num_traits::Zero::is_zero(v) {
                        continue;
                    }
                    for a in 0..k {
                        out.set((o * k + a) * inner + i, (oc * k + a) * inner + j, v.clone());
                    }
                }
            }
        }
    }
    out
}

/// Reorders `kron(L, R)` from `(p, N_L, p', N_R)` to `(p, p', N_L, N_R)` on
/// rows, and likewise on columns.
pub(crate) fn tensor_reorder(v: &Mat, (p, q): (usize, usize), (pp, qp): (usize, usize), nl: usize, nr: usize) -> Mat {
    let rperm = middle_perm(p, pp, nl, nr);
    let cperm = middle_perm(q, qp, nl, nr);
    v.permute_rows(&rperm).permute_cols(&cperm)
}

fn middle_perm(outer: usize, a: usize, b: usize, inner: usize) -> Vec<usize> {
    let mid = commutation_perm(a, b);
    let mut perm = Vec::with_capacity(outer * a * b * inner);
    for o in 0..outer {
        for &m in &mid {
            for i in 0..inner {
                perm.push((o * a * b + m) * inner + i);
            }
        }
    }
    perm
}

/// Applies the multilinear map encoded by a value with `ℓ+1` tuple factors to
/// directions `H_1..H_ℓ`, `H_k` of size `n_k x n_{k+1}`.
pub fn contract(v: &TensorValue, h: &[Mat]) -> Result<Mat> {
    if v.sizes.len() != h.len() + 1 {
        return Err(Error::DimensionMismatch(format!("{} tuple factors need {} directions", v.sizes.len(), v.sizes.len() - 1)));
    }
    let mut rs = v.sizes.clone();
    let mut cs = v.sizes.clone();
    let mut data = v.data.clone();
    for hk in h.iter().rev() {
        data = contract_last(&data, v.rows, v.cols, &rs, &cs, hk)?;
        let m = rs.len();
        rs.pop();
        let c_last = cs.pop().expect("nonempty");
        cs[m - 2] = c_last;
    }
    Ok(data)
}

/// Contracts the last two tuple factors against `h` (`cs[m-2] x rs[m-1]`).
pub(crate) fn contract_last(v: &Mat, p: usize, q: usize, rs: &[usize], cs: &[usize], h: &Mat) -> Result<Mat> {
    let m = rs.len();
    let (ra, rb) = (rs[m - 2], rs[m - 1]);
    let (ca, cb) = (cs[m - 2], cs[m - 1]);
    if h.shape() != (ca, rb) {
        return Err(Error::DimensionMismatch(format!("direction must be {ca} x {rb}, got {:?}", h.shape())));
    }
    let rpre = p * rs[..m - 2].iter().product::<usize>();
    let cpre = q * cs[..m - 2].iter().product::<usize>();
    let mut out = Mat::zeros(rpre * ra, cpre * cb);
    for r0 in 0..rpre {
        for x in 0..ra {
            for c0 in 0..cpre {
                for y in 0..cb {
                    let mut acc = crate::algebra::q(0);
                    for c in 0..ca {
                        for r in 0..rb {
                            let hv = h.get(c, r);
                            if num_traits::Zero::is_zero(hv) {
                                continue;
                            }
                            let val = v.get((r0 * ra + x) * rb + r, (c0 * ca + c) * cb + y);
                            if !num_traits::Zero::is_zero(val) {
                                acc += val * hv;
                            }
                        }
                    }
                    out.set(r0 * ra + x, c0 * cb + y, acc);
                }
            }
        }
    }
    Ok(out)
}
