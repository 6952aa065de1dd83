//! Text rendering. Arity-one expressions print in the parser's grammar;
//! variables of later tuples carry primes (`z1'`, `z1''`), and `⊗`, `ι`
//! appear for the internal node kinds.

use num_traits::{One, Signed};

use super::{MatPoly, Node, RatExpr};
use crate::algebra::Word;

/// Renders an expression. For arity one the result parses back to an
/// expression equal to `e` after normalization.
pub fn format(e: &RatExpr) -> String {
    let slots: Vec<usize> = (1..=e.arity()).collect();
    render(e, &slots)
}

/// Same as [`format`]; kept as the name used for multi-tuple expressions.
pub fn display(e: &RatExpr) -> String {
    format(e)
}

/// Expression file contents with the `d=<count>` header.
pub fn format_nce(e: &RatExpr) -> String {
    format!("d={}\n{}\n", e.d(), format(e))
}

fn var(j: usize, slot: usize) -> String {
    format!("z{j}{}", "'".repeat(slot - 1))
}

fn monomial(w: &Word, slot: usize) -> String {
    w.letters().iter().map(|&j| var(j, slot)).collect::<Vec<_>>().join("*")
}

fn scalar_poly(p: &MatPoly, slot: usize) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (w, c)) in p.terms().iter().enumerate() {
        let c = c.get(0, 0);
        let neg = c.is_negative();
        let mag = c.abs();
        let body = if w.is_empty() {
            mag.to_string()
        } else if mag.is_one() {
            monomial(w, slot)
        } else {
            format!("{mag}*{}", monomial(w, slot))
        };
        match (k, neg) {
            (0, false) => out.push_str(&body),
            (0, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&body);
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&body);
            }
        }
    }
    out
}

fn poly_text(p: &MatPoly, slot: usize) -> String {
    if (p.rows(), p.cols()) == (1, 1) {
        return scalar_poly(p, slot);
    }
    let rows: Vec<String> = (0..p.rows())
        .map(|i| {
            let entries: Vec<String> = (0..p.cols()).map(|j| scalar_poly(&p.entry(i, j), slot)).collect();
            format!("[{}]", entries.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

/// True when the rendering is a single token or a bracketed form.
fn is_atomic(e: &RatExpr) -> bool {
    match e.node() {
        Node::Poly { poly, .. } => {
            if (poly.rows(), poly.cols()) != (1, 1) {
                return true;
            }
            if poly.is_zero() {
                return true;
            }
            let mut terms = poly.terms().iter();
            let (w, c) = terms.next().expect("nonzero");
            let c = c.get(0, 0);
            terms.next().is_none() && !c.is_negative() && (w.is_empty() || (w.len() == 1 && c.is_one()))
        }
        Node::Inv { .. } | Node::Block { .. } | Node::Iota(_) => true,
        _ => false,
    }
}

fn wrap(e: &RatExpr, slots: &[usize]) -> String {
    let s = render(e, slots);
    if is_atomic(e) {
        s
    } else {
        format!("({s})")
    }
}

fn render(e: &RatExpr, slots: &[usize]) -> String {
    match e.node() {
        Node::Poly { slot, poly } => poly_text(poly, slots[slot - 1]),
        Node::Add(a, b) => {
            let right = match b.node() {
                Node::Mul(..) => render(b, slots),
                _ => wrap(b, slots),
            };
            format!("{} + {right}", render(a, slots))
        }
        Node::Mul(a, b) => {
            let left = match a.node() {
                Node::Mul(..) => render(a, slots),
                _ => wrap(a, slots),
            };
            format!("{left}*{}", wrap(b, slots))
        }
        Node::Inv { inner, .. } => format!("inv({})", render(inner, slots)),
        Node::Block { grid_cols, entries, .. } => {
            let rows: Vec<String> = entries
                .chunks(*grid_cols)
                .map(|row| format!("[{}]", row.iter().map(|c| render(c, slots)).collect::<Vec<_>>().join(", ")))
                .collect();
            format!("[{}]", rows.join(", "))
        }
        Node::Tensor(l, r) => {
            let t = l.arity();
            format!("{} ⊗ {}", wrap(l, &slots[..t]), wrap(r, &slots[t..]))
        }
        Node::Iota(inner) => {
            let l = slots.len();
            let mut sub = slots[..l - 2].to_vec();
            sub.push(slots[l - 1]);
            format!("ι({})", render(inner, &sub))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn round_trip(src: &str, d: usize) {
        let e = parse(src, d).unwrap();
        let text = format(&e);
        let back = parse(&text, d).unwrap_or_else(|err| panic!("{text}: {err}"));
        assert_eq!(back.normalize(), e.normalize(), "{src} -> {text}");
    }

    #[test]
    fn coordinate() {
        assert_eq!(format(&parse("z1", 1).unwrap()), "z1");
    }

    #[test]
    fn polynomial_text() {
        assert_eq!(format(&parse("3 - z2*z1 + 1/2*z1*z2 - z1", 2).unwrap()), "3 - z1 + 1/2*z1*z2 - z2*z1");
        assert_eq!(format(&parse("z1 - z1", 1).unwrap()), "0");
    }

    #[test]
    fn round_trips() {
        round_trip("[[1, 0]]", 1);
        round_trip("[[1, 0]]*inv([[1-z1, -z2],[-z2, 1-z1]])*[[1],[0]]", 2);
        round_trip("inv(1 - z1 - z2*inv(1-z1)*z2)", 2);
        round_trip("-inv(z2)*(1-z1)*inv(z2 - (1-z1)*inv(z2)*(1-z1))", 2);
        round_trip("z1*(z2*inv(z1))", 2);
        round_trip("(-1) + inv(z1)*z1", 1);
        round_trip("inv(z1) + (inv(z1) + 2)", 1);
        round_trip("2*[[inv(z1), z1]]", 1);
    }

    #[test]
    fn tensor_display_uses_primes() {
        let z1 = RatExpr::var(2, 1);
        let z2 = RatExpr::var(2, 2);
        let t = RatExpr::tensor(&z1, &z2).unwrap();
        assert_eq!(display(&t), "z1 ⊗ z2'");
        assert_eq!(display(&RatExpr::iota(&t)), "ι(z1 ⊗ z2'')");
    }
}
