//! Recursive-descent parser for the expression grammar
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary ("*" unary)*
//! unary  := "-" unary | factor ("^" integer)?
//! factor := "inv" "(" expr ")" | rational | "z" integer | "(" expr ")" | matrix
//! matrix := "[" row ("," row)* "]"
//! row    := "[" expr ("," expr)* "]"
//! ```
//!
//! Unary minus and `^` are sugar for products. A `1 x 1` constant may be
//! added to or multiplied with a matrix of any shape; it is read as the
//! matching multiple of the identity.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{MatPoly, RatExpr};
use crate::algebra::{Mat, Rational, Word};
use crate::error::{Error, NodePath, Result};

/// Parses an arity-one expression in `d` letters.
pub fn parse(text: &str, d: usize) -> Result<RatExpr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, d };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("operator or end of input"));
    }
    Ok(e)
}

/// Parses an expression file: a `d=<count>` header line followed by the
/// expression text.
pub fn parse_nce(text: &str) -> Result<(usize, RatExpr)> {
    let mut lines = text.splitn(2, '\n');
    let header = lines.next().unwrap_or("").trim();
    let d = header
        .strip_prefix("d=")
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&d| d >= 1)
        .ok_or_else(|| Error::Syntax { pos: 0, expected: "header line d=<count>".into() })?;
    let body = lines.next().unwrap_or("");
    let offset = text.len() - body.len();
    let e = parse(body, d).map_err(|err| match err {
        Error::Syntax { pos, expected } => Error::Syntax { pos: pos + offset, expected },
        other => other,
    })?;
    Ok((d, e))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    d: usize,
}

impl Parser<'_> {
    fn err(&self, expected: &str) -> Error {
        Error::Syntax { pos: self.pos, expected: expected.into() }
    }

    fn shape_err(&self, at: usize, err: Error) -> Error {
        match err {
            Error::Shape { message, .. } => Error::Shape { path: NodePath::default(), message: format!("{message} (at byte {at})") },
            other => other,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("'{}'", c as char)))
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digits parse"))
    }

    fn small_integer(&mut self) -> Result<usize> {
        let at = self.pos;
        let v = self.integer()?;
        usize::try_from(&v).map_err(|_| Error::Syntax { pos: at, expected: "small integer".into() })
    }

    fn expr(&mut self) -> Result<RatExpr> {
        let mut acc = self.term()?;
        loop {
            let at = self.pos;
            if self.eat(b'+') {
                let rhs = self.term()?;
                acc = add_promoting(&acc, &rhs).map_err(|e| self.shape_err(at, e))?;
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                acc = add_promoting(&acc, &RatExpr::neg(&rhs)).map_err(|e| self.shape_err(at, e))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RatExpr> {
        let mut acc = self.unary()?;
        loop {
            let at = self.pos;
            if self.eat(b'*') {
                let rhs = self.unary()?;
                acc = mul_promoting(&acc, &rhs).map_err(|e| self.shape_err(at, e))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RatExpr> {
        if self.eat(b'-') {
            let inner = self.unary()?;
            return Ok(RatExpr::neg(&inner));
        }
        let at = self.pos;
        let base = self.factor()?;
        if self.eat(b'^') {
            let k = self.small_integer()?;
            if base.rows() != base.cols() {
                return Err(self.shape_err(at, Error::Shape { path: NodePath::default(), message: "power of non-square expression".into() }));
            }
            if k == 0 {
                return Ok(RatExpr::identity(1, self.d, base.rows()));
            }
            let mut acc = base.clone();
            for _ in 1..k {
                acc = RatExpr::mul(&acc, &base).map_err(|e| self.shape_err(at, e))?;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn factor(&mut self) -> Result<RatExpr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'[') => self.matrix(),
            Some(b'z') => {
                self.pos += 1;
                let at = self.pos;
                let j = self.small_integer()?;
                if j == 0 || j > self.d {
                    return Err(Error::Syntax { pos: at, expected: format!("variable index in 1..={}", self.d) });
                }
                Ok(RatExpr::var(self.d, j))
            }
            Some(b'i') => {
                if !self.src[self.pos..].starts_with(b"inv") {
                    return Err(self.err("'inv'"));
                }
                self.pos += 3;
                self.expect(b'(')?;
                let at = self.pos;
                let inner = self.expr()?;
                self.expect(b')')?;
                RatExpr::inv(&inner).map_err(|e| self.shape_err(at, e))
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                let mut value = Rational::from_integer(num);
                if self.eat(b'/') {
                    let at = self.pos;
                    let den = self.integer()?;
                    if den.is_zero() {
                        return Err(Error::Syntax { pos: at, expected: "positive denominator".into() });
                    }
                    value /= Rational::from_integer(den);
                }
                Ok(RatExpr::scalar(1, self.d, value))
            }
            _ => Err(self.err("expression")),
        }
    }

    fn matrix(&mut self) -> Result<RatExpr> {
        let at = self.pos;
        self.expect(b'[')?;
        let mut grid = Vec::new();
        loop {
            self.expect(b'[')?;
            let mut row = vec![self.expr()?];
            while self.eat(b',') {
                row.push(self.expr()?);
            }
            self.expect(b']')?;
            grid.push(row);
            if !self.eat(b',') {
                break;
            }
        }
        self.expect(b']')?;
        RatExpr::block(grid).map_err(|e| self.shape_err(at, e))
    }
}

fn scalar_constant(e: &RatExpr) -> Option<Rational> {
    match e.as_poly() {
        Some(p) if e.shape() == (1, 1) && p.is_constant() => Some(p.constant_term().get(0, 0).clone()),
        _ => None,
    }
}

fn add_promoting(a: &RatExpr, b: &RatExpr) -> Result<RatExpr> {
    if a.shape() != b.shape() {
        if let (Some(c), true) = (scalar_constant(a), b.rows() == b.cols()) {
            return RatExpr::add(&RatExpr::constant(1, b.d(), Mat::scalar(b.rows(), c)), b);
        }
        if let (Some(c), true) = (scalar_constant(b), a.rows() == a.cols()) {
            return RatExpr::add(a, &RatExpr::constant(1, a.d(), Mat::scalar(a.rows(), c)));
        }
    }
    RatExpr::add(a, b)
}

fn mul_promoting(a: &RatExpr, b: &RatExpr) -> Result<RatExpr> {
    if a.cols() != b.rows() {
        if let Some(c) = scalar_constant(a) {
            return Ok(RatExpr::scale(b, c));
        }
        if let Some(c) = scalar_constant(b) {
            let s = RatExpr::constant(1, a.d(), Mat::scalar(a.cols(), c));
            return RatExpr::mul(a, &s);
        }
    }
    RatExpr::mul(a, b)
}

/// A scalar polynomial read from `(coefficient, word)` pairs; used by tests.
#[allow(dead_code)]
pub(crate) fn scalar_poly(d: usize, terms: &[(i64, &[usize])]) -> MatPoly {
    MatPoly::from_terms(
        d,
        1,
        1,
        terms.iter().map(|&(c, w)| (Word::new(w.to_vec()), Mat::new(1, 1, vec![Rational::from_integer(c.into())]))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Node;
    use num_traits::One;

    #[test]
    fn commutator_collapses_to_leaf() {
        let e = parse("z1*z2 - z2*z1", 2).unwrap();
        assert_eq!(e.as_poly().unwrap(), &scalar_poly(2, &[(1, &[1, 2]), (-1, &[2, 1])]));
    }

    #[test]
    fn inverse_node() {
        let e = parse("inv(z1*z2 - z2*z1)", 2).unwrap();
        assert!(matches!(e.node(), Node::Inv { .. }));
    }

    #[test]
    fn matrix_literal_is_block() {
        let e = parse("[[1-z1, -z2],[-z2, 1-z1]]", 2).unwrap();
        match e.node() {
            Node::Block { grid_rows, grid_cols, entries } => {
                assert_eq!((*grid_rows, *grid_cols), (2, 2));
                assert_eq!(entries[0].as_poly().unwrap(), &scalar_poly(2, &[(1, &[]), (-1, &[1])]));
            }
            _ => panic!("expected a block node"),
        }
        assert_eq!(e.shape(), (2, 2));
    }

    #[test]
    fn sugar() {
        assert_eq!(parse("z1^3", 1).unwrap(), parse("z1*z1*z1", 1).unwrap());
        assert_eq!(parse("-3/6*z1", 1).unwrap().as_poly().unwrap().coeff(&Word::letter(1)), Mat::new(1, 1, vec![crate::algebra::qf(-1, 2)]));
        let m = parse("2*[[z1],[1]]", 1).unwrap();
        assert_eq!(m.shape(), (2, 1));
    }

    #[test]
    fn syntax_errors_report_position() {
        match parse("z1 + * z2", 2) {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("z3", 2), Err(Error::Syntax { pos: 1, .. })));
        assert!(matches!(parse("1/0", 1), Err(Error::Syntax { .. })));
        assert!(matches!(parse("(z1", 1), Err(Error::Syntax { pos: 3, .. })));
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(parse("[[z1, z2]] * [[z1, z2]]", 2), Err(Error::Shape { .. })));
        assert!(matches!(parse("[[z1],[z2, z1]]", 2), Err(Error::Shape { .. })));
        assert!(matches!(parse("inv([[z1, z2]])", 2), Err(Error::Shape { .. })));
    }

    #[test]
    fn nce_header() {
        let (d, e) = parse_nce("d=2\nz1*z2\n").unwrap();
        assert_eq!(d, 2);
        assert_eq!(e.as_poly().unwrap(), &scalar_poly(2, &[(1, &[1, 2])]));
        assert!(parse_nce("z1").is_err());
    }

    #[test]
    fn unit_is_one() {
        let e = parse("1", 3).unwrap();
        assert!(e.as_poly().unwrap().constant_term().get(0, 0).is_one());
    }
}
