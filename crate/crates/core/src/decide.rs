//! Equivalence of expressions and the zero test.
//!
//! Expressions regular at zero are decided exactly through minimal
//! realizations; polynomials through their coefficient maps. Anything else
//! is sampled, and the verdict says so.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{q, row_basis, Mat, Rational};
use crate::error::{Error, Result};
use crate::eval::{evaluate, EvalPoint};
use crate::expr::{MatPoly, Node, RatExpr};
use crate::realize::{minimize, realize, FmRealization};
use crate::sample::{random_nilpotent_point, random_point, random_rational};

/// Sampling parameters for the non-exact routes.
#[derive(Clone, Debug, Serialize)]
pub struct Policy {
    pub seed: u64,
    /// Points drawn per matrix size.
    pub samples: usize,
    /// Largest matrix size sampled.
    pub max_size: usize,
    /// Entries are integers in `-bound..=bound`.
    pub bound: i64,
    /// Fewest points in the common domain for a sampled positive verdict.
    pub min_hits: usize,
}

impl Default for Policy {
    fn default() -> Self {
        Policy { seed: 0, samples: 40, max_size: 3, bound: 9, min_hits: 40 }
    }
}

impl Policy {
    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    /// Minimal realizations have the same dimension and series.
    EquivalentExact { dimension: usize },
    /// Values agreed at every sampled point of the common domain.
    EquivalentSampled { sizes: Vec<usize>, hits: Vec<usize>, samples: usize, seed: u64 },
    NotEquivalent { witness: EvalPoint },
    ZeroExact { route: String },
    /// Every sampled value was zero; no exact route was available.
    ZeroSampled { sizes: Vec<usize>, hits: Vec<usize>, samples: usize, seed: u64 },
    NonzeroExact { witness: EvalPoint },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn is_exact(&self) -> bool {
        matches!(self, Verdict::EquivalentExact { .. } | Verdict::NotEquivalent { .. } | Verdict::ZeroExact { .. } | Verdict::NonzeroExact { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::EquivalentExact { .. } => "EquivalentExact",
            Verdict::EquivalentSampled { .. } => "EquivalentSampled",
            Verdict::NotEquivalent { .. } => "NotEquivalent",
            Verdict::ZeroExact { .. } => "ZeroExact",
            Verdict::ZeroSampled { .. } => "ZeroSampled",
            Verdict::NonzeroExact { .. } => "NonzeroExact",
            Verdict::Inconclusive { .. } => "Inconclusive",
        }
    }

    pub fn witness(&self) -> Option<&EvalPoint> {
        match self {
            Verdict::NotEquivalent { witness } | Verdict::NonzeroExact { witness } => Some(witness),
            _ => None,
        }
    }
}

fn regular_at_zero(e: &RatExpr) -> bool {
    evaluate(e, &EvalPoint::zeros(e.d(), 1)).is_ok()
}

fn minimal(e: &RatExpr) -> Option<FmRealization> {
    realize(e).ok().map(|r| minimize(&r))
}

/// Values of both expressions where both are defined.
fn both(e1: &RatExpr, e2: &RatExpr, z: &EvalPoint) -> Option<(Mat, Mat)> {
    Some((evaluate(e1, z).ok()?, evaluate(e2, z).ok()?))
}

/// True when `z` lies in both domains and the values differ.
pub fn certifies_difference(e1: &RatExpr, e2: &RatExpr, z: &EvalPoint) -> bool {
    both(e1, e2, z).is_some_and(|(a, b)| a != b)
}

/// True when `z` lies in the domain and the value is nonzero.
pub fn certifies_nonzero(e: &RatExpr, z: &EvalPoint) -> bool {
    evaluate(e, z).is_ok_and(|v| !v.is_zero())
}

/// Searches general points of increasing size, then nilpotent points of
/// size `len + 1`, where a series difference starting at length `len` is
/// always visible for generic entries.
fn hunt(d: usize, len: usize, policy: &Policy, rng: &mut ChaCha8Rng, hit: impl Fn(&EvalPoint) -> bool) -> Option<EvalPoint> {
    for n in 1..=policy.max_size.max(len + 1) {
        for _ in 0..policy.samples {
            let z = random_point(rng, d, n, policy.bound);
            if hit(&z) {
                return Some(z);
            }
        }
    }
    (0..policy.samples.max(8)).map(|_| random_nilpotent_point(rng, d, len + 1, policy.bound)).find(|z| hit(z))
}

/// Length of the shortest word where the two series differ, searching up to
/// `order`. Works on the row spaces spanned by `C A^u` one length at a time,
/// so the cost stays polynomial in the state dimensions.
fn first_difference(r1: &FmRealization, r2: &FmRealization, order: usize) -> Option<usize> {
    if r1.dmat() != r2.dmat() {
        return Some(0);
    }
    let a: Vec<Mat> = r1.a().iter().zip(r2.a()).map(|(x, y)| Mat::direct_sum(x, y)).collect();
    let b: Vec<Mat> = r1.b().iter().zip(r2.b()).map(|(x, y)| Mat::vstack(&[x.clone(), y.clone()])).collect();
    if a.first().is_none_or(|x| x.rows() == 0) {
        return None;
    }
    let mut rows = row_basis(&Mat::hstack(&[r1.c().clone(), -r2.c()])).0;
    for len in 1..=order {
        if rows.rows() == 0 {
            return None;
        }
        if b.iter().any(|bj| !(&rows * bj).is_zero()) {
            return Some(len);
        }
        rows = row_basis(&Mat::vstack(&a.iter().map(|aj| &rows * aj).collect::<Vec<_>>())).0;
    }
    None
}

/// Decides whether two arity-one expressions define the same function.
pub fn equivalent(e1: &RatExpr, e2: &RatExpr, policy: &Policy) -> Result<Verdict> {
    if e1.shape() != e2.shape() || e1.d() != e2.d() || e1.arity() != 1 || e2.arity() != 1 {
        return Err(Error::ShapeMismatch(format!("{:?} vs {:?}", e1.shape(), e2.shape())));
    }
    let mut rng = policy.rng();
    if regular_at_zero(e1) && regular_at_zero(e2) {
        if let (Some(r1), Some(r2)) = (minimal(e1), minimal(e2)) {
            let bound = r1.dim() + r2.dim();
            return Ok(match first_difference(&r1, &r2, bound) {
                None => Verdict::EquivalentExact { dimension: r1.dim() },
                Some(len) => match hunt(e1.d(), len, policy, &mut rng, |z| certifies_difference(e1, e2, z)) {
                    Some(witness) => Verdict::NotEquivalent { witness },
                    None => Verdict::Inconclusive { reason: format!("series differ at length {len} but no witness point was found") },
                },
            });
        }
    }
    Ok(sampled_equivalence(e1, e2, policy))
}

/// The sampling route of [`equivalent`] on its own: never claims more than
/// agreement at the sampled points.
pub fn sampled_equivalence(e1: &RatExpr, e2: &RatExpr, policy: &Policy) -> Verdict {
    let mut rng = policy.rng();
    let mut hits = Vec::new();
    for n in 1..=policy.max_size {
        let mut h = 0;
        for _ in 0..policy.samples {
            let z = random_point(&mut rng, e1.d(), n, policy.bound);
            if let Some((a, b)) = both(e1, e2, &z) {
                if a != b {
                    return Verdict::NotEquivalent { witness: z };
                }
                h += 1;
            }
        }
        hits.push(h);
    }
    sampled_positive(hits, policy, false)
}

fn sampled_positive(hits: Vec<usize>, policy: &Policy, zero: bool) -> Verdict {
    let total: usize = hits.iter().sum();
    if total < policy.min_hits {
        return Verdict::Inconclusive { reason: format!("only {total} sampled points in the domain, need {}", policy.min_hits) };
    }
    let sizes = (1..=hits.len()).filter(|n| hits[n - 1] > 0).collect();
    let hits = hits.into_iter().filter(|&h| h > 0).collect();
    if zero {
        Verdict::ZeroSampled { sizes, hits, samples: policy.samples, seed: policy.seed }
    } else {
        Verdict::EquivalentSampled { sizes, hits, samples: policy.samples, seed: policy.seed }
    }
}

/// The polynomial an inverse-free expression denotes.
pub fn polynomial_of(e: &RatExpr) -> Option<MatPoly> {
    match e.node() {
        Node::Poly { poly, .. } if e.arity() == 1 => Some(poly.clone()),
        Node::Add(a, b) => Some(polynomial_of(a)?.add(&polynomial_of(b)?)),
        Node::Mul(a, b) => Some(polynomial_of(a)?.mul(&polynomial_of(b)?)),
        Node::Block { grid_cols, entries, .. } => {
            let polys = entries.iter().map(polynomial_of).collect::<Option<Vec<_>>>()?;
            Some(MatPoly::block(&polys.chunks(*grid_cols).map(<[MatPoly]>::to_vec).collect::<Vec<_>>()))
        }
        _ => None,
    }
}

/// Largest matrix size sampled for a polynomial of degree `deg`: a nonzero
/// polynomial cannot vanish on all `n x n` tuples once `2n > deg`.
pub fn polynomial_size_bound(deg: usize, max_size: usize) -> usize {
    max_size.max(deg / 2 + 1)
}

/// Decides whether an arity-one expression is the zero function.
pub fn is_zero(e: &RatExpr, policy: &Policy) -> Verdict {
    let mut rng = policy.rng();
    let d = e.d();
    if let Some(p) = polynomial_of(e) {
        if p.is_zero() {
            return Verdict::ZeroExact { route: "coefficients".into() };
        }
        let deg = p.degree().unwrap_or(0);
        for n in 1..=polynomial_size_bound(deg, policy.max_size) {
            for _ in 0..policy.samples {
                let z = random_point(&mut rng, d, n, policy.bound);
                if !p.eval(z.mats()).is_zero() {
                    return Verdict::NonzeroExact { witness: z };
                }
            }
        }
        return Verdict::Inconclusive { reason: "nonzero coefficients but no witness point was found".into() };
    }
    if regular_at_zero(e) {
        if let Some(r) = minimal(e) {
            if r.dim() == 0 && r.dmat().is_zero() {
                return Verdict::ZeroExact { route: "realization".into() };
            }
            let len = first_difference(&r, &FmRealization::constant(d, Mat::zeros(e.rows(), e.cols())), r.dim()).unwrap_or(0);
            return match hunt(d, len, policy, &mut rng, |z| certifies_nonzero(e, z)) {
                Some(witness) => Verdict::NonzeroExact { witness },
                None => Verdict::Inconclusive { reason: format!("series nonzero at length {len} but no witness point was found") },
            };
        }
    }
    let mut hits = Vec::new();
    let mut centre = None;
    for n in 1..=policy.max_size {
        let mut h = 0;
        for _ in 0..policy.samples {
            let z = random_point(&mut rng, d, n, policy.bound);
            if let Ok(v) = evaluate(e, &z) {
                if !v.is_zero() {
                    return Verdict::NonzeroExact { witness: z };
                }
                if n == 1 && centre.is_none() {
                    centre = Some(z.mats().iter().map(|m| m.get(0, 0).clone()).collect::<Vec<_>>());
                }
                h += 1;
            }
        }
        hits.push(h);
    }
    if centre.is_none() {
        centre = (0..policy.samples).map(|_| (0..d).map(|_| random_rational(&mut rng, policy.bound)).collect::<Vec<_>>()).find(|c| {
            let z = EvalPoint::new(c.iter().map(|x| Mat::scalar(1, x.clone())).collect()).expect("scalars");
            evaluate(e, &z).is_ok()
        });
    }
    if let Some(c) = centre {
        if let Some(r) = shift_center(e, &c).ok().and_then(|s| minimal(&s)) {
            if r.dim() == 0 && r.dmat().is_zero() {
                return Verdict::ZeroExact { route: "realization at a shifted centre".into() };
            }
        }
    }
    sampled_positive(hits, policy, true)
}

/// `e(z + c)`: every letter `z_j` replaced by `z_j + c_j`. Fails unless `e`
/// is defined at the scalar point `c`, so the result is regular at zero.
pub fn shift_center(e: &RatExpr, c: &[Rational]) -> Result<RatExpr> {
    if c.len() != e.d() || e.arity() != 1 {
        return Err(Error::DimensionMismatch("centre needs one scalar per letter".into()));
    }
    let shifted: Vec<MatPoly> =
        (1..=e.d()).map(|j| MatPoly::var(e.d(), j).add(&MatPoly::scalar(e.d(), c[j - 1].clone()))).collect();
    shift_node(e, &shifted, &mut std::collections::HashMap::new())
}

fn shift_node(e: &RatExpr, shifted: &[MatPoly], memo: &mut std::collections::HashMap<usize, RatExpr>) -> Result<RatExpr> {
    if let Some(r) = memo.get(&e.id()) {
        return Ok(r.clone());
    }
    let r = match e.node() {
        Node::Poly { poly, .. } => {
            let mut out = MatPoly::zero(poly.d(), poly.rows(), poly.cols());
            for (w, coef) in poly.terms() {
                let mono = w.letters().iter().fold(MatPoly::scalar(poly.d(), q(1)), |acc, &j| acc.mul(&shifted[j - 1]));
                for (u, s) in mono.terms() {
                    out.add_term(u.clone(), coef.scale(s.get(0, 0)));
                }
            }
            RatExpr::from_poly(out)
        }
        Node::Add(a, b) => RatExpr::add(&shift_node(a, shifted, memo)?, &shift_node(b, shifted, memo)?)?,
        Node::Mul(a, b) => RatExpr::mul(&shift_node(a, shifted, memo)?, &shift_node(b, shifted, memo)?)?,
        Node::Inv { inner, .. } => {
            let inner = shift_node(inner, shifted, memo)?;
            RatExpr::inv_with_witness(&inner, vec![EvalPoint::zeros(e.d(), 1)])?
        }
        Node::Block { grid_cols, entries, .. } => {
            let parts = entries.iter().map(|x| shift_node(x, shifted, memo)).collect::<Result<Vec<_>>>()?;
            RatExpr::block(parts.chunks(*grid_cols).map(<[RatExpr]>::to_vec).collect())?
        }
        Node::Tensor(..) | Node::Iota(_) => return Err(Error::DimensionMismatch("centre shift needs arity 1".into())),
    };
    memo.insert(e.id(), r.clone());
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn p2(s: &str) -> RatExpr {
        parse(s, 2).unwrap()
    }

    #[test]
    fn commutator_needs_size_two() {
        let policy = Policy { max_size: 1, ..Policy::default() };
        let v = is_zero(&p2("z1*z2 - z2*z1"), &policy);
        let w = v.witness().expect("witness").clone();
        assert_eq!(w.n(), 2);
        assert!(certifies_nonzero(&p2("z1*z2 - z2*z1"), &w));
    }

    #[test]
    fn exact_routes() {
        let policy = Policy::default();
        let r1 = p2("[[1, 0]]*inv([[1 - z1, -z2], [-z2, 1 - z1]])*[[1], [0]]");
        let schur = p2("inv(1 - z1 - z2*inv(1 - z1)*z2)");
        assert!(matches!(equivalent(&r1, &schur, &policy).unwrap(), Verdict::EquivalentExact { dimension: 2 }));
        let v = equivalent(&p2("z1*z2"), &p2("z2*z1"), &policy).unwrap();
        assert!(certifies_difference(&p2("z1*z2"), &p2("z2*z1"), v.witness().unwrap()));
        let v = equivalent(&p2("inv(1 - z1)"), &p2("inv(1 - z2)"), &policy).unwrap();
        assert!(matches!(v, Verdict::NotEquivalent { .. }));
        assert!(matches!(is_zero(&p2("inv(1 - z1)*z2 - z2*inv(1 - z1)"), &policy), Verdict::NonzeroExact { .. }));
        assert!(matches!(is_zero(&p2("inv(1 - z1)*(1 - z1) - 1"), &policy), Verdict::ZeroExact { .. }));
    }

    #[test]
    fn sampled_routes() {
        let policy = Policy::default();
        let r1 = p2("z1*z2*inv(z1*z2 - z2*z1)");
        let r2 = p2("1 + z2*z1*inv(z1*z2 - z2*z1)");
        match equivalent(&r1, &r2, &policy).unwrap() {
            Verdict::EquivalentSampled { sizes, .. } => assert_eq!(sizes, vec![2, 3]),
            other => panic!("unexpected {other:?}"),
        }
        let e = parse("-1 + inv(z1)*z1", 1).unwrap();
        assert!(matches!(is_zero(&e, &policy), Verdict::ZeroExact { .. }));
        let c = p2("inv(z1*z2 - z2*z1)*(z1*z2 - z2*z1) - 1");
        assert!(matches!(is_zero(&c, &policy), Verdict::ZeroSampled { .. }));
    }

    #[test]
    fn shape_mismatch() {
        assert!(matches!(equivalent(&p2("z1"), &p2("[[z1, z2]]"), &Policy::default()), Err(Error::ShapeMismatch(_))));
    }
}
