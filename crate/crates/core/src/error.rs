use thiserror::Error;

/// Position of a node inside an expression, as child indices from the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct NodePath(pub Vec<usize>);

impl std::fmt::Display for NodePath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "/");
        }
        for i in &self.0 {
            write!(f, "/{i}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: expected {expected}")]
    Syntax { pos: usize, expected: String },

    #[error("shape error at {path}: {message}")]
    Shape { path: NodePath, message: String },

    #[error("no point found where the inverted expression is invertible ({attempts} attempts)")]
    DegenerateInverse { attempts: usize },

    #[error("random expression generation failed: {0}")]
    GenerationFailed(String),

    #[error("point not in domain: inverse at {path} is singular (sizes {sizes:?})")]
    NotInDomain { path: NodePath, sizes: Vec<usize> },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("expression is not regular at zero: inverse at {path} has singular constant term")]
    NotRegularAtZero { path: NodePath },

    #[error("series has singular constant term")]
    SingularConstantTerm,

    #[error("series order {order} too small for Hankel bound {bound}")]
    InsufficientOrder { order: usize, bound: usize },

    #[error("series is not generated by a realization of dimension <= {bound}")]
    RankMismatch { bound: usize },

    #[error("realization is not minimal (dimension {dim}, minimal {minimal})")]
    NotMinimal { dim: usize, minimal: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
