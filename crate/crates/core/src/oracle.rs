//! Independent reference computations used to check the engine.
//!
//! Nothing here goes through the symbolic difference operators or the
//! block evaluation: jets over `ℚ[t]/(t³)` and direct word splitting.

use crate::algebra::{inverse, kron, Mat, Word};
use crate::error::{Error, NodePath, Result};
use crate::eval::EvalPoint;
use crate::expr::{MatPoly, Node, RatExpr};

/// `a₀ + a₁t + a₂t²` with matrix coefficients, modulo `t³`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet(pub [Mat; 3]);

impl Jet {
    fn add(&self, o: &Jet) -> Jet {
        Jet([&self.0[0] + &o.0[0], &self.0[1] + &o.0[1], &self.0[2] + &o.0[2]])
    }

    fn mul(&self, o: &Jet) -> Jet {
        let [a0, a1, a2] = &self.0;
        let [b0, b1, b2] = &o.0;
        Jet([a0 * b0, &(a0 * b1) + &(a1 * b0), &(&(a0 * b2) + &(a1 * b1)) + &(a2 * b0)])
    }

    fn inv(&self) -> Option<Jet> {
        let [a0, a1, a2] = &self.0;
        let x0 = inverse(a0)?;
        let x1 = -&(&(&x0 * a1) * &x0);
        let x2 = -&(&x0 * &(&(a1 * &x1) + &(a2 * &x0)));
        Some(Jet([x0, x1, x2]))
    }
}

/// `e(Z + tW)` over `ℚ[t]/(t³)`, by direct recursion on the tree.
pub fn jet_eval(e: &RatExpr, z: &EvalPoint, w: &[Mat]) -> Result<Jet> {
    if e.arity() != 1 {
        return Err(Error::DimensionMismatch("jets need arity 1".into()));
    }
    let n = z.n();
    match e.node() {
        Node::Poly { poly, .. } => {
            let mut acc = Jet([Mat::zeros(e.rows() * n, e.cols() * n), Mat::zeros(e.rows() * n, e.cols() * n), Mat::zeros(e.rows() * n, e.cols() * n)]);
            for (word, c) in poly.terms() {
                let mut m = Jet([Mat::identity(n), Mat::zeros(n, n), Mat::zeros(n, n)]);
                for &j in word.letters() {
                    m = m.mul(&Jet([z.mats()[j - 1].clone(), w[j - 1].clone(), Mat::zeros(n, n)]));
                }
                acc = acc.add(&Jet([kron(c, &m.0[0]), kron(c, &m.0[1]), kron(c, &m.0[2])]));
            }
            Ok(acc)
        }
        Node::Add(a, b) => Ok(jet_eval(a, z, w)?.add(&jet_eval(b, z, w)?)),
        Node::Mul(a, b) => Ok(jet_eval(a, z, w)?.mul(&jet_eval(b, z, w)?)),
        Node::Inv { inner, .. } => {
            jet_eval(inner, z, w)?.inv().ok_or(Error::NotInDomain { path: NodePath::default(), sizes: vec![n] })
        }
        Node::Block { grid_rows, grid_cols, entries } => {
            let jets = entries.iter().map(|x| jet_eval(x, z, w)).collect::<Result<Vec<_>>>()?;
            let part = |k: usize| {
                let grid: Vec<Vec<Mat>> =
                    (0..*grid_rows).map(|r| (0..*grid_cols).map(|c| jets[r * grid_cols + c].0[k].clone()).collect()).collect();
                Mat::block(&grid)
            };
            Ok(Jet([part(0), part(1), part(2)]))
        }
        Node::Tensor(..) | Node::Iota(_) => Err(Error::DimensionMismatch("jets need arity 1".into())),
    }
}

fn monomial(z: &EvalPoint, u: &[usize]) -> Mat {
    u.iter().fold(Mat::identity(z.n()), |acc, &j| &acc * &z.mats()[j - 1])
}

/// `Δ^w P` at `points`, from the word-splitting formula: every occurrence of
/// the letters of `w` (last letter first) inside a word of `P` splits it
/// into `|w| + 1` pieces, one per tuple.
pub fn poly_delta_word_value(p: &MatPoly, w: &Word, points: &[EvalPoint]) -> Mat {
    assert_eq!(points.len(), w.len() + 1, "one point per tuple");
    let order: Vec<usize> = w.letters().iter().rev().copied().collect();
    let rows: usize = points.iter().map(EvalPoint::n).product();
    let mut acc = Mat::zeros(p.rows() * rows, p.cols() * rows);
    for (v, c) in p.terms() {
        let mut cuts = Vec::new();
        splits(v.letters(), &order, 0, &mut cuts, &mut |pieces| {
            let value = pieces.iter().zip(points).fold(c.clone(), |m, (u, z)| kron(&m, &monomial(z, u)));
            acc = &acc + &value;
        });
    }
    acc
}

fn splits<'a>(v: &'a [usize], order: &[usize], start: usize, pieces: &mut Vec<&'a [usize]>, f: &mut dyn FnMut(&[&'a [usize]])) {
    if order.is_empty() {
        pieces.push(&v[start..]);
        f(pieces);
        pieces.pop();
        return;
    }
    for k in start..v.len() {
        if v[k] == order[0] {
            pieces.push(&v[start..k]);
            splits(v, &order[1..], k + 1, pieces, f);
            pieces.pop();
        }
    }
}
