use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::MatPoly;
use crate::algebra::{Mat, Rational};
use crate::error::{Error, NodePath, Result};
use crate::eval::{evaluate_multi, EvalPoint};
use crate::sample;

/// Attempt budget when searching for a point where an inverted expression
/// is invertible.
pub const WITNESS_ATTEMPTS: usize = 64;

/// A point (one tuple per slot) where an inverted expression is invertible.
///
/// Witnesses record non-degeneracy only; they never take part in structural
/// equality.
#[derive(Clone, Debug)]
pub struct Witness(Arc<Vec<EvalPoint>>);

impl Witness {
    pub fn new(points: Vec<EvalPoint>) -> Self {
        Witness(Arc::new(points))
    }

    pub fn points(&self) -> &[EvalPoint] {
        &self.0
    }
}

impl PartialEq for Witness {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    /// A polynomial in the indeterminates of tuple `slot` (1-based) alone.
    Poly { slot: usize, poly: MatPoly },
    Add(RatExpr, RatExpr),
    Mul(RatExpr, RatExpr),
    Inv { inner: RatExpr, witness: Witness },
    /// Row-major grid of equally shaped blocks.
    Block { grid_rows: usize, grid_cols: usize, entries: Vec<RatExpr> },
    /// `left` lives in tuples `1..=t`, `right` in tuples `t+1..=ℓ`.
    Tensor(RatExpr, RatExpr),
    /// `ι`: inserts a trivial factor before the last tuple.
    Iota(RatExpr),
}

#[derive(Debug)]
struct ExprData {
    arity: usize,
    d: usize,
    rows: usize,
    cols: usize,
    node: Node,
}

/// Matrix-valued noncommutative rational expression in `arity` tuples of
/// `d` indeterminates. Cheap to clone; subtrees are shared.
#[derive(Clone)]
pub struct RatExpr(Arc<ExprData>);

impl PartialEq for RatExpr {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        let (a, b) = (&*self.0, &*other.0);
        a.arity == b.arity && a.d == b.d && a.rows == b.rows && a.cols == b.cols && a.node == b.node
    }
}

impl std::fmt::Debug for RatExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", super::format(self))
    }
}

fn shape_err(message: impl Into<String>) -> Error {
    Error::Shape { path: NodePath::default(), message: message.into() }
}

fn merged_slot(a: (usize, &MatPoly), b: (usize, &MatPoly)) -> Option<usize> {
    if a.1.is_constant() {
        Some(b.0)
    } else if b.1.is_constant() || a.0 == b.0 {
        Some(a.0)
    } else {
        None
    }
}

impl RatExpr {
    fn make(arity: usize, d: usize, rows: usize, cols: usize, node: Node) -> Self {
        RatExpr(Arc::new(ExprData { arity, d, rows, cols, node }))
    }

    pub fn arity(&self) -> usize {
        self.0.arity
    }

    pub fn d(&self) -> usize {
        self.0.d
    }

    pub fn rows(&self) -> usize {
        self.0.rows
    }

    pub fn cols(&self) -> usize {
        self.0.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.0.rows, self.0.cols)
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    /// Identity of the shared node, used for memoization.
    pub fn id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn as_poly(&self) -> Option<&MatPoly> {
        match self.node() {
            Node::Poly { poly, .. } => Some(poly),
            _ => None,
        }
    }

    pub fn children(&self) -> Vec<&RatExpr> {
        match self.node() {
            Node::Poly { .. } => vec![],
            Node::Add(a, b) | Node::Mul(a, b) | Node::Tensor(a, b) => vec![a, b],
            Node::Inv { inner, .. } | Node::Iota(inner) => vec![inner],
            Node::Block { entries, .. } => entries.iter().collect(),
        }
    }

    /// Number of nodes counted as a tree (shared subtrees counted each time).
    pub fn tree_size(&self) -> usize {
        1 + self.children().iter().map(|c| c.tree_size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// True when no Inv node occurs.
    pub fn is_polynomial_tree(&self) -> bool {
        !matches!(self.node(), Node::Inv { .. }) && self.children().iter().all(|c| c.is_polynomial_tree())
    }

    // ---- constructors ----

    pub fn poly(arity: usize, slot: usize, poly: MatPoly) -> Result<Self> {
        if arity == 0 || slot == 0 || slot > arity {
            return Err(shape_err(format!("slot {slot} out of range for arity {arity}")));
        }
        let slot = if poly.is_constant() { 1 } else { slot };
        Ok(Self::make(arity, poly.d(), poly.rows(), poly.cols(), Node::Poly { slot, poly }))
    }

    /// Arity-one polynomial leaf.
    pub fn from_poly(poly: MatPoly) -> Self {
        Self::poly(1, 1, poly).expect("slot 1 is always valid")
    }

    pub fn constant(arity: usize, d: usize, c: Mat) -> Self {
        Self::poly(arity, 1, MatPoly::constant(d, c)).expect("constant leaf")
    }

    pub fn scalar(arity: usize, d: usize, c: Rational) -> Self {
        Self::constant(arity, d, Mat::new(1, 1, vec![c]))
    }

    pub fn identity(arity: usize, d: usize, n: usize) -> Self {
        Self::constant(arity, d, Mat::identity(n))
    }

    pub fn zero(arity: usize, d: usize, rows: usize, cols: usize) -> Self {
        Self::constant(arity, d, Mat::zeros(rows, cols))
    }

    /// The coordinate `z_j` (arity one).
    pub fn var(d: usize, j: usize) -> Self {
        Self::from_poly(MatPoly::var(d, j))
    }

    pub fn add(a: &RatExpr, b: &RatExpr) -> Result<Self> {
        if a.arity() != b.arity() || a.d() != b.d() {
            return Err(shape_err("add: arity or letter count mismatch"));
        }
        if a.shape() != b.shape() {
            return Err(shape_err(format!("add: {:?} vs {:?}", a.shape(), b.shape())));
        }
        if let (Node::Poly { slot: sa, poly: pa }, Node::Poly { slot: sb, poly: pb }) = (a.node(), b.node()) {
            if let Some(slot) = merged_slot((*sa, pa), (*sb, pb)) {
                return Self::poly(a.arity(), slot, pa.add(pb));
            }
        }
        Ok(Self::make(a.arity(), a.d(), a.rows(), a.cols(), Node::Add(a.clone(), b.clone())))
    }

    pub fn mul(a: &RatExpr, b: &RatExpr) -> Result<Self> {
        if a.arity() != b.arity() || a.d() != b.d() {
            return Err(shape_err("mul: arity or letter count mismatch"));
        }
        if a.cols() != b.rows() {
            return Err(shape_err(format!("mul: {:?} * {:?}", a.shape(), b.shape())));
        }
        if let (Node::Poly { slot: sa, poly: pa }, Node::Poly { slot: sb, poly: pb }) = (a.node(), b.node()) {
            if let Some(slot) = merged_slot((*sa, pa), (*sb, pb)) {
                return Self::poly(a.arity(), slot, pa.mul(pb));
            }
        }
        Ok(Self::make(a.arity(), a.d(), a.rows(), b.cols(), Node::Mul(a.clone(), b.clone())))
    }

    /// `c * a` for a scalar `c`.
    pub fn scale(a: &RatExpr, c: Rational) -> Self {
        let s = Self::constant(a.arity(), a.d(), Mat::scalar(a.rows(), c));
        Self::mul(&s, a).expect("conformable by construction")
    }

    pub fn neg(a: &RatExpr) -> Self {
        Self::scale(a, -Rational::from_integer(1.into()))
    }

    pub fn sub(a: &RatExpr, b: &RatExpr) -> Result<Self> {
        Self::add(a, &Self::neg(b))
    }

    /// Inverse with a sampled non-degeneracy witness: the zero point is tried
    /// first, then random integer points of sizes 1 to 3.
    pub fn inv(inner: &RatExpr) -> Result<Self> {
        if !inner.0.rows.eq(&inner.0.cols) {
            return Err(shape_err(format!("inv of non-square {:?}", inner.shape())));
        }
        let witness = find_witness(inner, 0x1a2b_3c4d, WITNESS_ATTEMPTS)?;
        Ok(Self::inv_unchecked(inner, witness))
    }

    /// Inverse with a caller-supplied witness, verified by evaluation.
    pub fn inv_with_witness(inner: &RatExpr, points: Vec<EvalPoint>) -> Result<Self> {
        if inner.rows() != inner.cols() {
            return Err(shape_err(format!("inv of non-square {:?}", inner.shape())));
        }
        if !is_invertible_at(inner, &points) {
            return Err(Error::DegenerateInverse { attempts: 1 });
        }
        Ok(Self::inv_unchecked(inner, Witness::new(points)))
    }

    pub(crate) fn inv_unchecked(inner: &RatExpr, witness: Witness) -> Self {
        Self::make(inner.arity(), inner.d(), inner.rows(), inner.cols(), Node::Inv { inner: inner.clone(), witness })
    }

    /// Block matrix `[R_ab]` from a rectangular grid of equally shaped blocks.
    pub fn block(grid: Vec<Vec<RatExpr>>) -> Result<Self> {
        let grid_rows = grid.len();
        let grid_cols = grid.first().map_or(0, Vec::len);
        if grid_rows == 0 || grid_cols == 0 {
            return Err(shape_err("empty block matrix"));
        }
        if grid.iter().any(|r| r.len() != grid_cols) {
            return Err(shape_err("ragged block matrix"));
        }
        let first = &grid[0][0];
        for e in grid.iter().flatten() {
            if e.shape() != first.shape() {
                return Err(shape_err(format!("block entries differ in shape: {:?} vs {:?}", first.shape(), e.shape())));
            }
            if e.arity() != first.arity() || e.d() != first.d() {
                return Err(shape_err("block entries differ in arity"));
            }
        }
        let (arity, d, br, bc) = (first.arity(), first.d(), first.rows(), first.cols());
        let entries: Vec<RatExpr> = grid.into_iter().flatten().collect();
        Ok(Self::make(arity, d, br * grid_rows, bc * grid_cols, Node::Block { grid_rows, grid_cols, entries }))
    }

    pub fn tensor(left: &RatExpr, right: &RatExpr) -> Result<Self> {
        if left.d() != right.d() {
            return Err(shape_err("tensor: letter count mismatch"));
        }
        Ok(Self::make(
            left.arity() + right.arity(),
            left.d(),
            left.rows() * right.rows(),
            left.cols() * right.cols(),
            Node::Tensor(left.clone(), right.clone()),
        ))
    }

    pub fn iota(inner: &RatExpr) -> Self {
        Self::make(inner.arity() + 1, inner.d(), inner.rows(), inner.cols(), Node::Iota(inner.clone()))
    }

    /// Rebuilds bottom-up through the collapsing constructors, additionally
    /// merging blocks whose entries are all polynomial leaves.
    pub fn normalize(&self) -> RatExpr {
        match self.node() {
            Node::Poly { .. } => self.clone(),
            Node::Add(a, b) => Self::add(&a.normalize(), &b.normalize()).expect("shapes preserved"),
            Node::Mul(a, b) => Self::mul(&a.normalize(), &b.normalize()).expect("shapes preserved"),
            Node::Inv { inner, witness } => Self::inv_unchecked(&inner.normalize(), witness.clone()),
            Node::Tensor(a, b) => Self::tensor(&a.normalize(), &b.normalize()).expect("shapes preserved"),
            Node::Iota(a) => Self::iota(&a.normalize()),
            Node::Block { grid_rows, grid_cols, entries } => {
                let entries: Vec<RatExpr> = entries.iter().map(RatExpr::normalize).collect();
                let slots: Option<Vec<(usize, &MatPoly)>> = entries
                    .iter()
                    .map(|e| match e.node() {
                        Node::Poly { slot, poly } => Some((*slot, poly)),
                        _ => None,
                    })
                    .collect();
                if let Some(slots) = slots {
                    let mut slot = 1;
                    let mut ok = true;
                    for &(s, p) in &slots {
                        if p.is_constant() {
                            continue;
                        }
                        if slot != 1 && s != slot {
                            ok = false;
                        }
                        slot = s;
                    }
                    if ok {
                        let grid: Vec<Vec<MatPoly>> =
                            slots.chunks(*grid_cols).map(|row| row.iter().map(|(_, p)| (*p).clone()).collect()).collect();
                        return Self::poly(self.arity(), slot, MatPoly::block(&grid)).expect("valid slot");
                    }
                }
                let grid: Vec<Vec<RatExpr>> = entries.chunks(*grid_cols).map(<[RatExpr]>::to_vec).collect();
                debug_assert_eq!(grid.len(), *grid_rows);
                Self::block(grid).expect("shapes preserved")
            }
        }
    }
}

fn is_invertible_at(inner: &RatExpr, points: &[EvalPoint]) -> bool {
    match evaluate_multi(inner, points) {
        Ok(v) => crate::algebra::det(&v.data) != Rational::from_integer(0.into()),
        Err(_) => false,
    }
}

/// Searches for a point where `inner` is defined and invertible: first the
/// size-one zero point, then random integer points of growing size.
pub(crate) fn find_witness(inner: &RatExpr, seed: u64, attempts: usize) -> Result<Witness> {
    let slots = inner.arity();
    let zero: Vec<EvalPoint> = (0..slots).map(|_| EvalPoint::zeros(inner.d(), 1)).collect();
    if is_invertible_at(inner, &zero) {
        return Ok(Witness::new(zero));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..attempts {
        let n = 1 + (attempt * 3) / attempts;
        let pts: Vec<EvalPoint> = (0..slots).map(|_| sample::random_point(&mut rng, inner.d(), n, 9)).collect();
        if is_invertible_at(inner, &pts) {
            return Ok(Witness::new(pts));
        }
    }
    Err(Error::DegenerateInverse { attempts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{q, Word};

    #[test]
    fn polynomial_subtrees_collapse() {
        let z1 = RatExpr::var(2, 1);
        let z2 = RatExpr::var(2, 2);
        let c = RatExpr::sub(&RatExpr::mul(&z1, &z2).unwrap(), &RatExpr::mul(&z2, &z1).unwrap()).unwrap();
        let p = c.as_poly().expect("collapsed to a leaf");
        assert_eq!(p.coeff(&Word::new(vec![1, 2])), Mat::from_ints(&[&[1]]));
        assert_eq!(p.coeff(&Word::new(vec![2, 1])), Mat::from_ints(&[&[-1]]));
    }

    #[test]
    fn shape_checks() {
        let a = RatExpr::constant(1, 2, Mat::zeros(2, 3));
        let b = RatExpr::constant(1, 2, Mat::zeros(2, 2));
        assert!(RatExpr::add(&a, &b).is_err());
        assert!(RatExpr::mul(&a, &b).is_err());
        assert!(RatExpr::mul(&b, &a).is_ok());
        assert!(RatExpr::inv(&a).is_err());
        assert!(RatExpr::block(vec![vec![a.clone(), b.clone()]]).is_err());
    }

    #[test]
    fn commutator_inverse_needs_two_by_two_witness() {
        let z1 = RatExpr::var(2, 1);
        let z2 = RatExpr::var(2, 2);
        let c = RatExpr::sub(&RatExpr::mul(&z1, &z2).unwrap(), &RatExpr::mul(&z2, &z1).unwrap()).unwrap();
        let r = RatExpr::inv(&c).unwrap();
        match r.node() {
            Node::Inv { witness, .. } => assert!(witness.points()[0].n() >= 2),
            _ => unreachable!(),
        }
    }

    #[test]
    fn zero_is_never_invertible() {
        let z = RatExpr::scalar(1, 1, q(0));
        assert!(matches!(RatExpr::inv(&z), Err(Error::DegenerateInverse { .. })));
    }

    #[test]
    fn tensor_and_iota_shapes() {
        let a = RatExpr::constant(1, 2, Mat::zeros(2, 1));
        let b = RatExpr::constant(2, 2, Mat::zeros(1, 3));
        let t = RatExpr::tensor(&a, &b).unwrap();
        assert_eq!((t.arity(), t.shape()), (3, (2, 3)));
        assert_eq!(RatExpr::iota(&t).arity(), 4);
    }
}
