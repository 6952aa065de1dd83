//! Fornasini–Marchesini realizations
//! `T(z) = D + C (I - Σ A_j z_j)^{-1} (Σ B_j z_j)`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{column_basis, det, inverse, kron, rank, row_basis, solve_left, solve_right, words_up_to, Mat, Word};
use crate::error::{Error, NodePath, Result};
use crate::eval::EvalPoint;
use crate::expr::{MatPoly, Node, RatExpr, Witness};
use crate::series::TruncSeries;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRealization", into = "RawRealization")]
pub struct FmRealization {
    d: usize,
    p: usize,
    q: usize,
    m: usize,
    a: Vec<Mat>,
    b: Vec<Mat>,
    c: Mat,
    dmat: Mat,
}

/// JSON layout `{d, p, q, m, A, B, C, D}`.
#[derive(Serialize, Deserialize)]
struct RawRealization {
    d: usize,
    p: usize,
    q: usize,
    m: usize,
    #[serde(rename = "A")]
    a: Vec<Mat>,
    #[serde(rename = "B")]
    b: Vec<Mat>,
    #[serde(rename = "C")]
    c: Mat,
    #[serde(rename = "D")]
    dmat: Mat,
}

/// Rows of an empty JSON matrix carry no column count; restore it.
fn reshape_empty(m: Mat, rows: usize, cols: usize) -> Mat {
    if m.entries().is_empty() && rows * cols == 0 {
        Mat::zeros(rows, cols)
    } else {
        m
    }
}

impl TryFrom<RawRealization> for FmRealization {
    type Error = Error;

    fn try_from(r: RawRealization) -> Result<Self> {
        let a = r.a.into_iter().map(|x| reshape_empty(x, r.m, r.m)).collect();
        let b = r.b.into_iter().map(|x| reshape_empty(x, r.m, r.q)).collect();
        let c = reshape_empty(r.c, r.p, r.m);
        let dmat = reshape_empty(r.dmat, r.p, r.q);
        let out = FmRealization::new(a, b, c, dmat)?;
        if (out.d, out.p, out.q, out.m) != (r.d, r.p, r.q, r.m) {
            return Err(Error::DimensionMismatch("realization header disagrees with matrices".into()));
        }
        Ok(out)
    }
}

impl From<FmRealization> for RawRealization {
    fn from(r: FmRealization) -> Self {
        RawRealization { d: r.d, p: r.p, q: r.q, m: r.m, a: r.a, b: r.b, c: r.c, dmat: r.dmat }
    }
}

impl FmRealization {
    pub fn new(a: Vec<Mat>, b: Vec<Mat>, c: Mat, dmat: Mat) -> Result<Self> {
        let d = a.len();
        let (p, q) = dmat.shape();
        let m = c.cols();
        if b.len() != d || d == 0 {
            return Err(Error::DimensionMismatch("need one A_j and one B_j per letter".into()));
        }
        if c.rows() != p || a.iter().any(|x| x.shape() != (m, m)) || b.iter().any(|x| x.shape() != (m, q)) {
            return Err(Error::DimensionMismatch(format!("inconsistent realization shapes (p={p}, q={q}, m={m})")));
        }
        Ok(FmRealization { d, p, q, m, a, b, c, dmat })
    }

    /// The constant function `D` (state dimension zero).
    pub fn constant(d: usize, dmat: Mat) -> Self {
        let (p, q) = dmat.shape();
        FmRealization { d, p, q, m: 0, a: vec![Mat::zeros(0, 0); d], b: vec![Mat::zeros(0, q); d], c: Mat::zeros(p, 0), dmat }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn a(&self) -> &[Mat] {
        &self.a
    }

    pub fn b(&self) -> &[Mat] {
        &self.b
    }

    pub fn c(&self) -> &Mat {
        &self.c
    }

    pub fn dmat(&self) -> &Mat {
        &self.dmat
    }

    /// `(S A_j S⁻¹, S B_j, C S⁻¹, D)`.
    pub fn conjugate(&self, s: &Mat) -> Result<Self> {
        let si = inverse(s).ok_or_else(|| Error::Input("similarity must be invertible".into()))?;
        FmRealization::new(
            self.a.iter().map(|x| &(s * x) * &si).collect(),
            self.b.iter().map(|x| s * x).collect(),
            &self.c * &si,
            self.dmat.clone(),
        )
    }

    /// Series `T_∅ = D`, `T_{a_1..a_k} = C A_{a_1} ⋯ A_{a_{k-1}} B_{a_k}`.
    pub fn series(&self, order: usize) -> TruncSeries {
        let mut s = TruncSeries::constant(1, self.dmat.clone(), order);
        if self.m == 0 || order == 0 {
            return s;
        }
        let mut layer: Vec<(Word, Mat)> = vec![(Word::empty(), self.c.clone())];
        for len in 1..=order {
            let mut next = Vec::with_capacity(layer.len() * self.d);
            for (u, cu) in &layer {
                for j in 1..=self.d {
                    s.add_term(u.push(j), cu * &self.b[j - 1]);
                    if len < order {
                        next.push((u.push(j), cu * &self.a[j - 1]));
                    }
                }
            }
            layer = next;
        }
        s
    }

    /// Columns `A^v B_j` for `|v| < m`, in degree-lex order of `v`.
    pub fn reachability_matrix(&self) -> Mat {
        if self.m == 0 {
            return Mat::zeros(0, 0);
        }
        let mut cols = Vec::new();
        for v in words_up_to(self.d, self.m - 1) {
            let av = v.letters().iter().fold(Mat::identity(self.m), |acc, &i| &acc * &self.a[i - 1]);
            for bj in &self.b {
                cols.push(&av * bj);
            }
        }
        Mat::hstack(&cols)
    }

    /// Rows `C A^u` for `|u| < m`.
    pub fn observability_matrix(&self) -> Mat {
        if self.m == 0 {
            return Mat::zeros(0, 0);
        }
        let rows: Vec<Mat> = words_up_to(self.d, self.m - 1)
            .iter()
            .map(|u| u.letters().iter().fold(self.c.clone(), |acc, &i| &acc * &self.a[i - 1]))
            .collect();
        Mat::vstack(&rows)
    }

    pub fn is_controllable(&self) -> bool {
        self.m == 0 || rank(&self.reachability_matrix()) == self.m
    }

    pub fn is_observable(&self) -> bool {
        self.m == 0 || rank(&self.observability_matrix()) == self.m
    }

    /// Adds `extra` states that are never reached (`B = 0` there) and feed
    /// nothing back into the original states.
    pub fn pad_unreachable(&self, extra: usize, filler: &[Mat]) -> Result<Self> {
        let m2 = self.m + extra;
        let a = (0..self.d)
            .map(|j| {
                let mut x = Mat::zeros(m2, m2);
                x.set_block(0, 0, &self.a[j]);
                if let Some(f) = filler.get(j) {
                    x.set_block(0, self.m, f);
                }
                x
            })
            .collect();
        let b = self.b.iter().map(|bj| Mat::vstack(&[bj.clone(), Mat::zeros(extra, self.q)])).collect();
        let c = Mat::hstack(&[self.c.clone(), Mat::zeros(self.p, extra)]);
        FmRealization::new(a, b, c, self.dmat.clone())
    }
}

// ---- construction from expressions ----

/// Builds a realization by state-space arithmetic over the expression tree.
pub fn realize(e: &RatExpr) -> Result<FmRealization> {
    if e.arity() != 1 {
        return Err(Error::DimensionMismatch(format!("realize needs arity 1, got {}", e.arity())));
    }
    let mut memo = HashMap::new();
    build(e, &mut Vec::new(), &mut memo)
}

fn build(e: &RatExpr, path: &mut Vec<usize>, memo: &mut HashMap<usize, FmRealization>) -> Result<FmRealization> {
    if let Some(r) = memo.get(&e.id()) {
        return Ok(r.clone());
    }
    let child = |c: &RatExpr, k: usize, path: &mut Vec<usize>, memo: &mut HashMap<usize, FmRealization>| {
        path.push(k);
        let r = build(c, path, memo);
        path.pop();
        r
    };
    let r = match e.node() {
        Node::Poly { poly, .. } => poly_realization(poly),
        Node::Add(a, b) => {
            let ra = child(a, 0, path, memo)?;
            let rb = child(b, 1, path, memo)?;
            sum(&ra, &rb)
        }
        Node::Mul(a, b) => {
            let ra = child(a, 0, path, memo)?;
            let rb = child(b, 1, path, memo)?;
            product(&ra, &rb)
        }
        Node::Inv { inner, .. } => {
            let ri = child(inner, 0, path, memo)?;
            invert(&ri).ok_or_else(|| Error::NotRegularAtZero { path: NodePath(path.clone()) })?
        }
        Node::Block { grid_rows, grid_cols, entries } => {
            let mut parts = Vec::with_capacity(entries.len());
            for (k, c) in entries.iter().enumerate() {
                parts.push(child(c, k, path, memo)?);
            }
            block(&parts, *grid_rows, *grid_cols)
        }
        Node::Tensor(..) | Node::Iota(_) => {
            return Err(Error::DimensionMismatch("multi-tuple node in arity-one expression".into()));
        }
    };
    memo.insert(e.id(), r.clone());
    Ok(r)
}

/// Shift register over the nonempty suffixes of the support words: `B_j`
/// loads state `[j]`, `A_i` moves state `s` to `i·s`, and `C` reads `P_s`.
fn poly_realization(p: &MatPoly) -> FmRealization {
    let (d, rows, cols) = (p.d(), p.rows(), p.cols());
    let mut states: Vec<Word> = p.terms().keys().flat_map(|w| (0..w.len()).map(move |k| w.suffix_from(k))).collect();
    states.sort();
    states.dedup();
    if states.is_empty() {
        return FmRealization::constant(d, p.constant_term());
    }
    let index: HashMap<&Word, usize> = states.iter().enumerate().map(|(k, w)| (w, k)).collect();
    let m = states.len() * cols;
    let mut a = vec![Mat::zeros(m, m); d];
    let mut b = vec![Mat::zeros(m, cols); d];
    let mut c = Mat::zeros(rows, m);
    for (k, s) in states.iter().enumerate() {
        if s.len() == 1 {
            b[s.letters()[0] - 1].set_block(k * cols, 0, &Mat::identity(cols));
        }
        for i in 1..=d {
            if let Some(&t) = index.get(&s.prepend(i)) {
                a[i - 1].set_block(t * cols, k * cols, &Mat::identity(cols));
            }
        }
        c.set_block(0, k * cols, &p.coeff(s));
    }
    FmRealization::new(a, b, c, p.constant_term()).expect("shapes by construction")
}

fn sum(x: &FmRealization, y: &FmRealization) -> FmRealization {
    let a = x.a.iter().zip(&y.a).map(|(p, q)| Mat::direct_sum(p, q)).collect();
    let b = x.b.iter().zip(&y.b).map(|(p, q)| Mat::vstack(&[p.clone(), q.clone()])).collect();
    let c = Mat::hstack(&[x.c.clone(), y.c.clone()]);
    FmRealization::new(a, b, c, &x.dmat + &y.dmat).expect("sum shapes")
}

/// Cascade: the output of `y` drives the input of `x`.
fn product(x: &FmRealization, y: &FmRealization) -> FmRealization {
    let a = (0..x.d)
        .map(|j| Mat::block(&[vec![x.a[j].clone(), &x.b[j] * &y.c], vec![Mat::zeros(y.m, x.m), y.a[j].clone()]]))
        .collect();
    let b = (0..x.d).map(|j| Mat::vstack(&[&x.b[j] * &y.dmat, y.b[j].clone()])).collect();
    let c = Mat::hstack(&[x.c.clone(), &x.dmat * &y.c]);
    FmRealization::new(a, b, c, &x.dmat * &y.dmat).expect("product shapes")
}

/// Feedback inverse; `None` when `D` is singular.
fn invert(x: &FmRealization) -> Option<FmRealization> {
    let di = inverse(&x.dmat)?;
    let dic = &di * &x.c;
    let a = x.a.iter().zip(&x.b).map(|(aj, bj)| aj - &(bj * &dic)).collect();
    let b = x.b.iter().map(|bj| bj * &di).collect();
    Some(FmRealization::new(a, b, -&dic, di).expect("inverse shapes"))
}

fn block(parts: &[FmRealization], gr: usize, gc: usize) -> FmRealization {
    let (br, bc) = parts[0].shape();
    let d = parts[0].d;
    let mut acc = FmRealization::constant(d, Mat::zeros(br * gr, bc * gc));
    for (k, r) in parts.iter().enumerate() {
        let (ra, cb) = (k / gc, k % gc);
        let rsel = Mat::from_fn(br * gr, br, |i, j| if i == ra * br + j { crate::algebra::q(1) } else { crate::algebra::q(0) });
        let csel = Mat::from_fn(bc, bc * gc, |i, j| if j == cb * bc + i { crate::algebra::q(1) } else { crate::algebra::q(0) });
        let placed = FmRealization::new(
            r.a.clone(),
            r.b.iter().map(|x| x * &csel).collect(),
            &rsel * &r.c,
            &(&rsel * &r.dmat) * &csel,
        )
        .expect("selector shapes");
        acc = sum(&acc, &placed);
    }
    acc
}

/// The expression `D + C·inv(I - Σ A_j z_j)·(Σ B_j z_j)`.
pub fn transfer_expr(r: &FmRealization) -> RatExpr {
    let dexpr = RatExpr::constant(1, r.d, r.dmat.clone());
    if r.m == 0 {
        return dexpr;
    }
    let mut pencil = MatPoly::constant(r.d, Mat::identity(r.m));
    let mut input = MatPoly::zero(r.d, r.m, r.q);
    for j in 1..=r.d {
        pencil.add_term(Word::letter(j), -&r.a[j - 1]);
        input.add_term(Word::letter(j), r.b[j - 1].clone());
    }
    let resolvent = RatExpr::inv_unchecked(&RatExpr::from_poly(pencil), Witness::new(vec![EvalPoint::zeros(r.d, 1)]));
    let c = RatExpr::constant(1, r.d, r.c.clone());
    let tail = RatExpr::mul(&RatExpr::mul(&c, &resolvent).expect("C is p x m"), &RatExpr::from_poly(input)).expect("shapes");
    RatExpr::add(&dexpr, &tail).expect("p x q")
}

// ---- minimization ----

/// Restricts to the reachable subspace, then quotients by the unobservable
/// one. The result is controllable and observable.
pub fn minimize(r: &FmRealization) -> FmRealization {
    let r = controllable_part(r);
    observable_part(&r)
}

fn controllable_part(r: &FmRealization) -> FmRealization {
    if r.m == 0 {
        return r.clone();
    }
    let mut v = column_basis(&Mat::hstack(&r.b)).0;
    loop {
        if v.cols() == 0 {
            return FmRealization::constant(r.d, r.dmat.clone());
        }
        let mut cols = vec![v.clone()];
        cols.extend(r.a.iter().map(|aj| aj * &v));
        let next = column_basis(&Mat::hstack(&cols)).0;
        if next.cols() == v.cols() {
            break;
        }
        v = next;
    }
    let a = r.a.iter().map(|aj| solve_left(&v, &(aj * &v)).expect("invariant subspace")).collect();
    let b = r.b.iter().map(|bj| solve_left(&v, bj).expect("B in subspace")).collect();
    FmRealization::new(a, b, &r.c * &v, r.dmat.clone()).expect("restricted shapes")
}

fn observable_part(r: &FmRealization) -> FmRealization {
    if r.m == 0 {
        return r.clone();
    }
    let mut w = row_basis(&r.c).0;
    loop {
        if w.rows() == 0 {
            return FmRealization::constant(r.d, r.dmat.clone());
        }
        let mut rows = vec![w.clone()];
        rows.extend(r.a.iter().map(|aj| &w * aj));
        let next = row_basis(&Mat::vstack(&rows)).0;
        if next.rows() == w.rows() {
            break;
        }
        w = next;
    }
    let a = r.a.iter().map(|aj| solve_right(&w, &(&w * aj)).expect("invariant row space")).collect();
    let b = r.b.iter().map(|bj| &w * bj).collect();
    let c = solve_right(&w, &r.c).expect("C in row space");
    FmRealization::new(a, b, c, r.dmat.clone()).expect("quotient shapes")
}

/// Minimal realization read off the Hankel matrix `H[u, (v, j)] = s_{u v j}`
/// over `|u| ≤ k`, `|v| < k`, where `k = m_bound`.
pub fn hankel_realize(s: &TruncSeries, d: usize, m_bound: usize) -> Result<FmRealization> {
    let k = m_bound;
    if s.order() < 2 * k + 1 {
        return Err(Error::InsufficientOrder { order: s.order(), bound: k });
    }
    let (p, q) = s.shape();
    let dmat = s.constant_term();
    let rows_w = words_up_to(d, k);
    let cols_w: Vec<(Word, usize)> = if k == 0 {
        Vec::new()
    } else {
        words_up_to(d, k - 1).into_iter().flat_map(|v| (1..=d).map(move |j| (v.clone(), j))).collect()
    };
    let hankel = |shift: Option<usize>| -> Mat {
        let row_blocks: Vec<Vec<Mat>> = rows_w
            .iter()
            .map(|u| {
                let u = match shift {
                    Some(i) => u.push(i),
                    None => u.clone(),
                };
                cols_w.iter().map(|(v, j)| s.coeff(&u.concat(v).push(*j))).collect()
            })
            .collect();
        if cols_w.is_empty() {
            Mat::zeros(rows_w.len() * p, 0)
        } else {
            Mat::block(&row_blocks)
        }
    };
    let h = hankel(None);
    let (o, pivots) = column_basis(&h);
    let m = pivots.len();
    if m > k {
        return Err(Error::RankMismatch { bound: k });
    }
    let out = if m == 0 {
        FmRealization::constant(d, dmat)
    } else {
        let r = solve_left(&o, &h).ok_or(Error::RankMismatch { bound: k })?;
        let mut a = Vec::with_capacity(d);
        for i in 1..=d {
            let x = solve_left(&o, &hankel(Some(i))).ok_or(Error::RankMismatch { bound: k })?;
            a.push(x.select_cols(&pivots));
        }
        // column (∅, j) sits at index j - 1; row block u = ∅ is the first p rows
        let b = (0..d).map(|j| r.submatrix(0, j * q, m, q)).collect();
        let c = o.submatrix(0, 0, p, m);
        FmRealization::new(a, b, c, dmat)?
    };
    if out.series(s.order()) != *s {
        return Err(Error::RankMismatch { bound: k });
    }
    Ok(out)
}

/// The unique `S` with `S A1_j = A2_j S`, `S B1_j = B2_j`, `C1 = C2 S` and
/// `D1 = D2`, or `None` when the realizations describe different functions.
pub fn similarity(r1: &FmRealization, r2: &FmRealization) -> Result<Option<Mat>> {
    for r in [r1, r2] {
        let min = minimize(r).dim();
        if min < r.dim() {
            return Err(Error::NotMinimal { dim: r.dim(), minimal: min });
        }
    }
    if r1.d != r2.d || r1.shape() != r2.shape() || r1.m != r2.m || r1.dmat != r2.dmat {
        return Ok(None);
    }
    if r1.m == 0 {
        return Ok(Some(Mat::zeros(0, 0)));
    }
    let k1 = r1.reachability_matrix();
    let k2 = r2.reachability_matrix();
    let (_, pivots) = column_basis(&k1);
    let t1 = inverse(&k1.select_cols(&pivots)).expect("controllable");
    let s = &k2.select_cols(&pivots) * &t1;
    if det(&s) == crate::algebra::q(0) {
        return Ok(None);
    }
    let ok = (0..r1.d).all(|j| &s * &r1.a[j] == &r2.a[j] * &s && &s * &r1.b[j] == r2.b[j]) && r1.c == &r2.c * &s;
    Ok(ok.then_some(s))
}

/// `det(I - Σ A_j ⊗ Z_j) ≠ 0`, exactly.
pub fn pencil_domain_check(r: &FmRealization, z: &EvalPoint) -> Result<bool> {
    if z.d() != r.d {
        return Err(Error::DimensionMismatch(format!("realization has {} letters, point has {}", r.d, z.d())));
    }
    if r.m == 0 {
        return Ok(true);
    }
    let n = z.n();
    let mut pencil = Mat::identity(r.m * n);
    for (aj, zj) in r.a.iter().zip(z.mats()) {
        pencil = &pencil - &kron(aj, zj);
    }
    Ok(det(&pencil) != crate::algebra::q(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q;
    use crate::expr::parse;
    use crate::series::expand;

    fn r1_expr() -> RatExpr {
        parse("[[1, 0]]*inv([[1-z1, -z2],[-z2, 1-z1]])*[[1],[0]]", 2).unwrap()
    }

    fn r1_hand() -> FmRealization {
        let a1 = Mat::identity(2);
        let a2 = Mat::from_ints(&[&[0, 1], &[1, 0]]);
        let e1 = Mat::from_ints(&[&[1], &[0]]);
        FmRealization::new(vec![a1.clone(), a2.clone()], vec![&a1 * &e1, &a2 * &e1], Mat::from_ints(&[&[1, 0]]), Mat::identity(1)).unwrap()
    }

    #[test]
    fn constant_has_no_states() {
        let r = realize(&parse("[[2, 3]]", 2).unwrap()).unwrap();
        assert_eq!(r.dim(), 0);
        assert_eq!(r.series(4), TruncSeries::constant(1, Mat::from_ints(&[&[2, 3]]), 4));
    }

    #[test]
    fn r1_matches_hand_realization() {
        let r = realize(&r1_expr()).unwrap();
        assert_eq!(r.series(6), r1_hand().series(6));
        assert_eq!(expand(&r1_expr(), 6).unwrap(), r1_hand().series(6));
    }

    #[test]
    fn monomial_cascade() {
        let r = realize(&parse("z1*z2", 2).unwrap()).unwrap();
        assert_eq!(r.dim(), 2);
        let s = r.series(4);
        assert_eq!(s.coeffs().len(), 1);
        assert_eq!(s.coeff(&Word::new(vec![1, 2])), Mat::identity(1));
    }

    #[test]
    fn transfer_round_trip() {
        let e = parse("inv(1 - z1 - z2*inv(1-z1)*z2) + [[2, z1]]*[[z2],[1]]", 2).unwrap();
        let r = realize(&e).unwrap();
        assert_eq!(expand(&transfer_expr(&r), 5).unwrap(), expand(&e, 5).unwrap());
        assert_eq!(transfer_expr(&FmRealization::constant(2, Mat::identity(1))), RatExpr::identity(1, 2, 1));
    }

    #[test]
    fn minimize_is_idempotent_and_removes_padding() {
        let m = minimize(&r1_hand());
        assert_eq!(m.dim(), 2);
        assert_eq!(minimize(&m).dim(), 2);
        let padded = r1_hand().pad_unreachable(3, &[Mat::from_ints(&[&[1, 0, 2], &[0, 1, 1]])]).unwrap();
        assert_eq!(padded.series(6), r1_hand().series(6));
        let back = minimize(&padded);
        assert_eq!(back.dim(), 2);
        assert!(back.is_controllable() && back.is_observable());
        assert_eq!(back.series(6), r1_hand().series(6));
    }

    #[test]
    fn hankel_of_geometric_series() {
        let s = expand(&parse("inv(1 - z1 - z2)", 2).unwrap(), 5).unwrap();
        let r = hankel_realize(&s, 2, 1).unwrap();
        assert_eq!(r.dim(), 1);
        assert_eq!(r.series(5), s);
        let zero = TruncSeries::zero(1, 1, 1, 5);
        assert_eq!(hankel_realize(&zero, 2, 2).unwrap().dim(), 0);
        assert!(matches!(hankel_realize(&s, 2, 3), Err(Error::InsufficientOrder { .. })));
    }

    #[test]
    fn hankel_rejects_too_small_bound() {
        let s = expand(&r1_expr(), 5).unwrap();
        assert!(matches!(hankel_realize(&s, 2, 1), Err(Error::RankMismatch { bound: 1 })));
        assert_eq!(hankel_realize(&s, 2, 2).unwrap().dim(), 2);
    }

    #[test]
    fn similarity_recovers_conjugation() {
        let r = r1_hand();
        assert_eq!(similarity(&r, &r).unwrap(), Some(Mat::identity(2)));
        let s0 = Mat::from_ints(&[&[2, 1], &[1, 1]]);
        let r2 = r.conjugate(&s0).unwrap();
        assert_eq!(similarity(&r, &r2).unwrap(), Some(s0));
        let other = FmRealization::new(r.a().to_vec(), r.b().to_vec(), r.c().clone(), Mat::identity(1).scale(&q(2))).unwrap();
        assert_eq!(similarity(&r, &other).unwrap(), None);
        let padded = r.pad_unreachable(1, &[]).unwrap();
        assert!(matches!(similarity(&padded, &r), Err(Error::NotMinimal { dim: 3, minimal: 2 })));
    }

    #[test]
    fn pencil_on_r1() {
        let r = minimize(&realize(&r1_expr()).unwrap());
        assert!(pencil_domain_check(&r, &EvalPoint::zeros(2, 2)).unwrap());
        // z1 = 1, z2 = 0 makes 1 - z1 singular
        let p = EvalPoint::new(vec![Mat::identity(1), Mat::zeros(1, 1)]).unwrap();
        assert!(!pencil_domain_check(&r, &p).unwrap());
        assert!(pencil_domain_check(&FmRealization::constant(2, Mat::identity(1)), &p).unwrap());
    }

    #[test]
    fn json_round_trip_including_empty_state() {
        for r in [r1_hand(), FmRealization::constant(2, Mat::from_ints(&[&[1, 2]]))] {
            let text = serde_json::to_string(&r).unwrap();
            let back: FmRealization = serde_json::from_str(&text).unwrap();
            assert_eq!(back, r);
        }
    }
}
