//! Difference-differential calculus.
//!
//! `Δ_j` maps an expression in `ℓ` tuples to one in `ℓ + 1` tuples by
//! splitting the last tuple. The symbolic route builds tensor expressions;
//! the numeric route reads the same values off block upper triangular
//! evaluation points.

use std::collections::{BTreeMap, HashMap};

use crate::algebra::{commutation_perm, q, Mat, Rational, Word};
use crate::error::{Error, NodePath, Result};
use crate::eval::{evaluate, evaluate_multi, EvalPoint};
use crate::expr::{MatPoly, Node, RatExpr, Witness};
use crate::series::{expand_multi, MultiWord};

fn one(arity: usize, d: usize) -> RatExpr {
    RatExpr::scalar(arity, d, q(1))
}

fn is_zero_leaf(e: &RatExpr) -> bool {
    e.as_poly().is_some_and(MatPoly::is_zero)
}

fn sadd(a: RatExpr, b: RatExpr) -> RatExpr {
    if is_zero_leaf(&a) {
        b
    } else if is_zero_leaf(&b) {
        a
    } else {
        RatExpr::add(&a, &b).expect("summands share a shape")
    }
}

/// Drops a product with a zero factor only when the other factor has no
/// inverse, so the product keeps the domain of both factors.
fn smul(a: &RatExpr, b: &RatExpr) -> RatExpr {
    if (is_zero_leaf(a) && b.is_polynomial_tree()) || (is_zero_leaf(b) && a.is_polynomial_tree()) {
        RatExpr::zero(a.arity(), a.d(), a.rows(), b.cols())
    } else {
        RatExpr::mul(a, b).expect("factors are conformable")
    }
}

/// `e ⊗ 1`: a trivial factor appended as a new last tuple.
fn pad_right(e: &RatExpr) -> RatExpr {
    match e.node() {
        Node::Poly { slot, poly } => RatExpr::poly(e.arity() + 1, *slot, poly.clone()).expect("slot kept"),
        _ => RatExpr::tensor(e, &one(1, e.d())).expect("same letters"),
    }
}

/// `ι(e)`, kept as a node unless `e` is a polynomial leaf.
fn iota_light(e: &RatExpr) -> RatExpr {
    match e.node() {
        Node::Poly { .. } => IotaLowering::default().lower(e),
        _ => RatExpr::iota(e),
    }
}

/// The embedding `ι`: inserts a trivial tuple before the last one.
pub fn iota(e: &RatExpr) -> RatExpr {
    RatExpr::iota(e)
}

/// `ι(e)` rewritten without an `Iota` node at the root, pushing the
/// embedding down to polynomial leaves and tensor factors.
pub fn lower_iota(e: &RatExpr) -> RatExpr {
    IotaLowering::default().lower(e)
}

#[derive(Default)]
struct IotaLowering {
    memo: HashMap<usize, RatExpr>,
}

impl IotaLowering {
    /// Returns an expression for `ι(x)`.
    fn lower(&mut self, x: &RatExpr) -> RatExpr {
        if let Some(r) = self.memo.get(&x.id()) {
            return r.clone();
        }
        let l = x.arity();
        let r = match x.node() {
            Node::Poly { slot, poly } => {
                let slot = if *slot == l && !poly.is_constant() { l + 1 } else { *slot };
                RatExpr::poly(l + 1, slot, poly.clone()).expect("slot in range")
            }
            _ if l == 1 => RatExpr::tensor(&one(1, x.d()), x).expect("same letters"),
            Node::Add(a, b) => RatExpr::add(&self.lower(a), &self.lower(b)).expect("shapes kept"),
            Node::Mul(a, b) => RatExpr::mul(&self.lower(a), &self.lower(b)).expect("shapes kept"),
            Node::Inv { inner, witness } => {
                let mut pts = witness.points().to_vec();
                pts.insert(l - 1, EvalPoint::zeros(x.d(), 1));
                RatExpr::inv_unchecked(&self.lower(inner), Witness::new(pts))
            }
            Node::Block { grid_cols, entries, .. } => {
                let lowered: Vec<RatExpr> = entries.iter().map(|c| self.lower(c)).collect();
                RatExpr::block(lowered.chunks(*grid_cols).map(<[RatExpr]>::to_vec).collect()).expect("shapes kept")
            }
            Node::Tensor(a, b) => RatExpr::tensor(a, &self.lower(b)).expect("same letters"),
            Node::Iota(y) => {
                let inner = self.lower(y);
                self.lower(&inner)
            }
        };
        self.memo.insert(x.id(), r.clone());
        r
    }
}

/// Symbolic `Δ_j`.
pub fn delta(e: &RatExpr, j: usize) -> RatExpr {
    assert!(j >= 1 && j <= e.d(), "letter {j} out of range");
    Delta { j, memo: HashMap::new(), lowering: IotaLowering::default() }.run(e)
}

struct Delta {
    j: usize,
    memo: HashMap<usize, RatExpr>,
    lowering: IotaLowering,
}

impl Delta {
    fn run(&mut self, e: &RatExpr) -> RatExpr {
        if let Some(r) = self.memo.get(&e.id()) {
            return r.clone();
        }
        let l = e.arity();
        let zero = || RatExpr::zero(l + 1, e.d(), e.rows(), e.cols());
        let r = match e.node() {
            Node::Poly { slot, poly } => {
                if *slot != l || poly.is_constant() {
                    zero()
                } else {
                    self.poly(l, poly)
                }
            }
            Node::Add(a, b) => sadd(self.run(a), self.run(b)),
            Node::Mul(a, b) => {
                let left = smul(&self.run(a), &iota_light(b));
                let right = smul(&pad_right(a), &self.run(b));
                sadd(left, right)
            }
            Node::Inv { inner, .. } => {
                let di = self.run(inner);
                RatExpr::neg(&smul(&smul(&pad_right(e), &di), &iota_light(e)))
            }
            Node::Block { grid_cols, entries, .. } => {
                let parts: Vec<RatExpr> = entries.iter().map(|c| self.run(c)).collect();
                if parts.iter().all(is_zero_leaf) {
                    zero()
                } else {
                    RatExpr::block(parts.chunks(*grid_cols).map(<[RatExpr]>::to_vec).collect()).expect("shapes kept")
                }
            }
            Node::Tensor(a, b) => {
                let db = self.run(b);
                if is_zero_leaf(&db) && a.is_polynomial_tree() {
                    zero()
                } else {
                    RatExpr::tensor(a, &db).expect("same letters")
                }
            }
            Node::Iota(y) => {
                let lowered = self.lowering.lower(y);
                self.run(&lowered)
            }
        };
        self.memo.insert(e.id(), r.clone());
        r
    }

    /// `Σ_v Q_v ⊗ z^v` with `Q_v = Σ_u P_{u j v} z^u`.
    fn poly(&self, l: usize, p: &MatPoly) -> RatExpr {
        let d = p.d();
        let mut by_suffix: BTreeMap<Word, MatPoly> = BTreeMap::new();
        for (w, c) in p.terms() {
            for (k, &letter) in w.letters().iter().enumerate() {
                if letter == self.j {
                    by_suffix.entry(w.suffix_from(k + 1)).or_insert_with(|| MatPoly::zero(d, p.rows(), p.cols())).add_term(w.prefix(k), c.clone());
                }
            }
        }
        let mut acc = RatExpr::zero(l + 1, d, p.rows(), p.cols());
        for (v, qv) in by_suffix {
            if qv.is_zero() {
                continue;
            }
            let left = RatExpr::poly(l, l, qv).expect("last slot");
            let term = if v.is_empty() {
                pad_right(&left)
            } else {
                RatExpr::tensor(&left, &RatExpr::from_poly(MatPoly::monomial(d, v))).expect("same letters")
            };
            acc = sadd(acc, term);
        }
        acc
    }
}

/// `Δ^w` for a word stored in multiplication order: the last letter acts
/// first, so `Δ^w e (0, …, 0)` is the series coefficient of `e` at the
/// reversed word.
pub fn delta_word(e: &RatExpr, w: &Word) -> RatExpr {
    w.letters().iter().rev().fold(e.clone(), |acc, &j| delta(&acc, j))
}

// ---- zero substitution and backward shifts ----

enum Subst {
    Expr(RatExpr),
    Const(Mat),
}

struct ZeroSubst {
    slot: usize,
    d: usize,
    memo: HashMap<usize, RatExprOrConst>,
    lowering: IotaLowering,
}

type RatExprOrConst = std::result::Result<RatExpr, Mat>;

impl ZeroSubst {
    fn run(&mut self, e: &RatExpr, k: usize, path: &mut Vec<usize>) -> Result<Subst> {
        // memo is keyed by node and the slot being zeroed within it
        let key = e.id() ^ (k << 56);
        if let Some(r) = self.memo.get(&key) {
            return Ok(match r {
                Ok(x) => Subst::Expr(x.clone()),
                Err(c) => Subst::Const(c.clone()),
            });
        }
        let r = self.node(e, k, path)?;
        self.memo.insert(
            key,
            match &r {
                Subst::Expr(x) => Ok(x.clone()),
                Subst::Const(c) => Err(c.clone()),
            },
        );
        Ok(r)
    }

    fn expr(&mut self, e: &RatExpr, k: usize, path: &mut Vec<usize>, child: usize) -> Result<RatExpr> {
        path.push(child);
        let r = self.run(e, k, path);
        path.pop();
        match r? {
            Subst::Expr(x) => Ok(x),
            Subst::Const(_) => unreachable!("arity stays positive below a node of arity >= 2"),
        }
    }

    fn node(&mut self, e: &RatExpr, k: usize, path: &mut Vec<usize>) -> Result<Subst> {
        let l = e.arity();
        if l == 1 {
            let zero = EvalPoint::zeros(self.d, 1);
            return evaluate(e, &zero).map(Subst::Const).map_err(|err| match err {
                Error::NotInDomain { path: sub, .. } => {
                    let mut full = path.clone();
                    full.extend(sub.0);
                    Error::NotRegularAtZero { path: NodePath(full) }
                }
                other => other,
            });
        }
        let x = match e.node() {
            Node::Poly { slot, poly } => {
                if *slot == k {
                    RatExpr::constant(l - 1, self.d, poly.constant_term())
                } else {
                    let s = if *slot > k { slot - 1 } else { *slot };
                    RatExpr::poly(l - 1, s, poly.clone()).expect("slot in range")
                }
            }
            Node::Add(a, b) => {
                let (a, b) = (self.expr(a, k, path, 0)?, self.expr(b, k, path, 1)?);
                RatExpr::add(&a, &b)?
            }
            Node::Mul(a, b) => {
                let (a, b) = (self.expr(a, k, path, 0)?, self.expr(b, k, path, 1)?);
                RatExpr::mul(&a, &b)?
            }
            Node::Inv { inner, .. } => {
                let inner = self.expr(inner, k, path, 0)?;
                let zero: Vec<EvalPoint> = (0..l - 1).map(|_| EvalPoint::zeros(self.d, 1)).collect();
                RatExpr::inv_with_witness(&inner, zero).map_err(|_| Error::NotRegularAtZero { path: NodePath(path.clone()) })?
            }
            Node::Block { grid_cols, entries, .. } => {
                let mut parts = Vec::with_capacity(entries.len());
                for (c, x) in entries.iter().enumerate() {
                    parts.push(self.expr(x, k, path, c)?);
                }
                RatExpr::block(parts.chunks(*grid_cols).map(<[RatExpr]>::to_vec).collect())?
            }
            Node::Tensor(a, b) => {
                let t = a.arity();
                if k <= t {
                    path.push(0);
                    let sa = self.run(a, k, path)?;
                    path.pop();
                    match sa {
                        Subst::Expr(a2) => RatExpr::tensor(&a2, b)?,
                        Subst::Const(c) => const_tensor_left(&c, b),
                    }
                } else {
                    path.push(1);
                    let sb = self.run(b, k - t, path)?;
                    path.pop();
                    match sb {
                        Subst::Expr(b2) => RatExpr::tensor(a, &b2)?,
                        Subst::Const(c) => const_tensor_right(a, &c),
                    }
                }
            }
            Node::Iota(y) => {
                let lowered = self.lowering.lower(y);
                return self.run(&lowered, k, path);
            }
        };
        Ok(Subst::Expr(x))
    }
}

fn scaled(e: &RatExpr, c: &Rational) -> RatExpr {
    if num_traits::Zero::is_zero(c) {
        RatExpr::zero(e.arity(), e.d(), e.rows(), e.cols())
    } else if num_traits::One::is_one(c) {
        e.clone()
    } else {
        RatExpr::scale(e, c.clone())
    }
}

/// `C ⊗ R` for a constant `C`: the block matrix `[c_ab R]`.
fn const_tensor_left(c: &Mat, r: &RatExpr) -> RatExpr {
    if c.shape() == (1, 1) {
        return scaled(r, c.get(0, 0));
    }
    let grid = (0..c.rows()).map(|a| (0..c.cols()).map(|b| scaled(r, c.get(a, b))).collect()).collect();
    RatExpr::block(grid).expect("equal blocks")
}

/// `L ⊗ C` for a constant `C`: the block matrix `[c_ab L]` with its
/// coefficient indices swapped back into `(L, C)` order.
fn const_tensor_right(l: &RatExpr, c: &Mat) -> RatExpr {
    if c.shape() == (1, 1) {
        return scaled(l, c.get(0, 0));
    }
    let grid = (0..c.rows()).map(|a| (0..c.cols()).map(|b| scaled(l, c.get(a, b))).collect()).collect();
    let block = RatExpr::block(grid).expect("equal blocks");
    let (p, qq) = l.shape();
    let (pc, qc) = c.shape();
    if (p, qq) == (1, 1) {
        return block;
    }
    let rperm = Mat::from_fn(p * pc, p * pc, |r, s| if s == (r % pc) * p + r / pc { q(1) } else { q(0) });
    let cperm = Mat::from_fn(qq * qc, qq * qc, |r, s| if r == (s % qc) * qq + s / qc { q(1) } else { q(0) });
    let lp = RatExpr::constant(l.arity(), l.d(), rperm);
    let rp = RatExpr::constant(l.arity(), l.d(), cperm);
    RatExpr::mul(&RatExpr::mul(&lp, &block).expect("square permutation"), &rp).expect("square permutation")
}

/// Replaces tuple `slot` (1-based) by the size-one zero tuple.
pub fn substitute_zero(e: &RatExpr, slot: usize) -> Result<RatExpr> {
    if e.arity() < 2 || slot == 0 || slot > e.arity() {
        return Err(Error::DimensionMismatch(format!("cannot zero tuple {slot} of an arity-{} expression", e.arity())));
    }
    let mut s = ZeroSubst { slot, d: e.d(), memo: HashMap::new(), lowering: IotaLowering::default() };
    match s.run(e, s.slot, &mut Vec::new())? {
        Subst::Expr(x) => Ok(x),
        Subst::Const(_) => unreachable!("arity >= 2"),
    }
}

fn check_regular(e: &RatExpr) -> Result<()> {
    evaluate(e, &EvalPoint::zeros(e.d(), 1)).map(|_| ()).map_err(|err| match err {
        Error::NotInDomain { path, .. } => Error::NotRegularAtZero { path },
        other => other,
    })
}

/// Right backward shift: `Δ_j(e)(Z, 0)`.
pub fn right_shift(e: &RatExpr, j: usize) -> Result<RatExpr> {
    check_regular(e)?;
    substitute_zero(&delta(e, j), 2)
}

/// Left backward shift: `Δ_j(e)(0, Z)`.
pub fn left_shift(e: &RatExpr, j: usize) -> Result<RatExpr> {
    check_regular(e)?;
    substitute_zero(&delta(e, j), 1)
}

/// Coefficients of the expansion of `Δ_j e`, keyed by `(u, v)` for the
/// monomial `z^u ⊗ z'^v`, up to total length `order`.
pub fn series_of_delta(e: &RatExpr, j: usize, order: usize) -> Result<BTreeMap<(Word, Word), Mat>> {
    if e.arity() != 1 {
        return Err(Error::DimensionMismatch("series_of_delta needs arity 1".into()));
    }
    check_regular(e)?;
    let s = expand_multi(&delta(e, j), order)?;
    Ok(s.coeffs().iter().map(|(MultiWord(k), c)| ((k[0].clone(), k[1].clone()), c.clone())).collect())
}

// ---- numeric route ----

/// The four blocks of an expression evaluated at `[[Z, W], [0, Z']]` in the
/// last tuple, each returned in coefficient-first layout.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockParts {
    pub upper_left: Mat,
    pub upper_right: Mat,
    pub lower_left: Mat,
    pub lower_right: Mat,
}

/// Evaluates `e` with `prefix` in its first tuples and the block upper
/// triangular point in the last, then undoes the index interleaving.
pub fn block_evaluate(e: &RatExpr, prefix: &[EvalPoint], z: &EvalPoint, zp: &EvalPoint, w: &[Mat]) -> Result<BlockParts> {
    let x = EvalPoint::block_upper(z, zp, w)?;
    let mut pts = prefix.to_vec();
    pts.push(x);
    let v = evaluate_multi(e, &pts)?.data;
    let pre: usize = prefix.iter().map(EvalPoint::n).product();
    let (pt, qt) = (e.rows() * pre, e.cols() * pre);
    let (n, np) = (z.n(), zp.n());
    let big = n + np;
    let vx = v.permute_rows(&commutation_perm(big, pt)).permute_cols(&commutation_perm(big, qt));
    let back = |m: Mat, rn: usize, cn: usize| m.permute_rows(&commutation_perm(pt, rn)).permute_cols(&commutation_perm(qt, cn));
    Ok(BlockParts {
        upper_left: back(vx.submatrix(0, 0, n * pt, n * qt), n, n),
        upper_right: back(vx.submatrix(0, n * qt, n * pt, np * qt), n, np),
        lower_left: back(vx.submatrix(n * pt, 0, np * pt, n * qt), np, n),
        lower_right: back(vx.submatrix(n * pt, n * qt, np * pt, np * qt), np, np),
    })
}

/// `Σ_j Δ_j(e)(Z, Z')(W_j)` read off the block evaluation, without any
/// symbolic differentiation.
pub fn delta_numeric(e: &RatExpr, z: &EvalPoint, zp: &EvalPoint, w: &[Mat]) -> Result<Mat> {
    let parts = block_evaluate(e, &[], z, zp, w)?;
    assert_eq!(parts.upper_left, evaluate(e, z)?, "upper diagonal block differs from e(Z)");
    assert_eq!(parts.lower_right, evaluate(e, zp)?, "lower diagonal block differs from e(Z')");
    assert!(parts.lower_left.is_zero(), "block evaluation lost triangularity");
    Ok(parts.upper_right)
}

/// Same as [`delta_numeric`] for an expression in several tuples, with the
/// difference taken in the last one.
pub fn delta_numeric_multi(e: &RatExpr, prefix: &[EvalPoint], z: &EvalPoint, zp: &EvalPoint, w: &[Mat]) -> Result<Mat> {
    if prefix.len() + 1 != e.arity() {
        return Err(Error::DimensionMismatch(format!("need {} leading points", e.arity() - 1)));
    }
    Ok(block_evaluate(e, prefix, z, zp, w)?.upper_right)
}

/// `Σ_j contract(Δ_j(e)(Z, Z'), W_j)` through the symbolic route.
pub fn delta_symbolic_value(e: &RatExpr, z: &EvalPoint, zp: &EvalPoint, w: &[Mat]) -> Result<Mat> {
    delta_symbolic_value_multi(e, &[], z, zp, w)
}

/// Same as [`delta_symbolic_value`] for several tuples: only the gap
/// between the last two tuples of `Δ_j e` is contracted.
pub fn delta_symbolic_value_multi(e: &RatExpr, prefix: &[EvalPoint], z: &EvalPoint, zp: &EvalPoint, w: &[Mat]) -> Result<Mat> {
    if prefix.len() + 1 != e.arity() {
        return Err(Error::DimensionMismatch(format!("need {} leading points", e.arity() - 1)));
    }
    if w.len() != e.d() {
        return Err(Error::DimensionMismatch(format!("need {} directions", e.d())));
    }
    let mut pts = prefix.to_vec();
    pts.push(z.clone());
    pts.push(zp.clone());
    let pre: usize = prefix.iter().map(EvalPoint::n).product();
    let mut acc = Mat::zeros(e.rows() * pre * z.n(), e.cols() * pre * zp.n());
    for (j, wj) in w.iter().enumerate() {
        if wj.is_zero() {
            continue;
        }
        let v = evaluate_multi(&delta(e, j + 1), &pts)?;
        acc = &acc + &crate::eval::contract_last(&v.data, v.rows, v.cols, &v.sizes, &v.sizes, wj)?;
    }
    Ok(acc)
}

/// `d/dt e(Z + tW)` at `t = 0`.
pub fn directional_derivative(e: &RatExpr, z: &EvalPoint, w: &[Mat]) -> Result<Mat> {
    delta_numeric(e, z, z, w)
}

/// `Σ_j Δ_j(e)(Z⁰, Z)(Z_j - Z⁰_j)`, which equals `e(Z) - e(Z⁰)`.
pub fn finite_difference(e: &RatExpr, z0: &EvalPoint, z: &EvalPoint) -> Result<Mat> {
    if z0.n() != z.n() {
        return Err(Error::DimensionMismatch("finite difference needs points of one size".into()));
    }
    let w: Vec<Mat> = z.mats().iter().zip(z0.mats()).map(|(a, b)| a - b).collect();
    delta_numeric(e, z0, z, &w)
}

/// `d²/dt² e(Z + tW)` at `t = 0`, from one evaluation at
/// `[[Z, W, 0], [0, Z, W], [0, 0, Z]]`.
pub fn hessian(e: &RatExpr, z: &EvalPoint, w: &[Mat]) -> Result<Mat> {
    let n = z.n();
    if w.len() != z.d() || w.iter().any(|m| m.shape() != (n, n)) {
        return Err(Error::DimensionMismatch(format!("need {} directions of size {n} x {n}", z.d())));
    }
    let zero = Mat::zeros(n, n);
    let mats = z
        .mats()
        .iter()
        .zip(w)
        .map(|(zj, wj)| {
            Mat::block(&[
                vec![zj.clone(), wj.clone(), zero.clone()],
                vec![zero.clone(), zj.clone(), wj.clone()],
                vec![zero.clone(), zero.clone(), zj.clone()],
            ])
        })
        .collect();
    let v = evaluate(e, &EvalPoint::new(mats)?)?;
    let (p, qq) = e.shape();
    let vx = v.permute_rows(&commutation_perm(3 * n, p)).permute_cols(&commutation_perm(3 * n, qq));
    let corner = vx.submatrix(0, 2 * n * qq, n * p, n * qq).permute_rows(&commutation_perm(p, n)).permute_cols(&commutation_perm(qq, n));
    Ok(corner.scale(&q(2)))
}

/// Symbolic Hessian value `2 Σ_{i,j} Δ_iΔ_j e (Z, Z, Z)(W_j, W_i)`.
pub fn hessian_symbolic(e: &RatExpr, z: &EvalPoint, w: &[Mat]) -> Result<Mat> {
    let pts = vec![z.clone(), z.clone(), z.clone()];
    let mut acc = Mat::zeros(e.rows() * z.n(), e.cols() * z.n());
    for j in 1..=e.d() {
        let dj = delta(e, j);
        for i in 1..=e.d() {
            let v = evaluate_multi(&delta(&dj, i), &pts)?;
            acc = &acc + &crate::eval::contract(&v, &[w[j - 1].clone(), w[i - 1].clone()])?;
        }
    }
    Ok(acc.scale(&q(2)))
}
