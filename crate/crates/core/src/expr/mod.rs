//! Matrix-valued noncommutative rational expressions: AST, text format and
//! a seeded random generator.

mod ast;
mod format;
mod gen;
mod parse;
mod poly;

pub use ast::{Node, RatExpr, Witness, WITNESS_ATTEMPTS};
pub use format::{display, format, format_nce};
pub use gen::{random_expr, random_expr_with, GenConfig};
pub use parse::{parse, parse_nce};
pub use poly::MatPoly;
