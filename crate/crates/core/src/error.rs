use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("index {index} out of range (size {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid seed: {0}")]
    InvalidSeed(String),
    #[error("invalid quiver: {0}")]
    InvalidQuiver(String),
    #[error("vertex {0} carries a self-loop")]
    LoopAtVertex(usize),
    #[error("curve {0} is not simple (self-intersecting)")]
    NotSimple(usize),
    #[error("non-primitive class ({0}, {1})")]
    NonPrimitiveClass(i64, i64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("exponent {{e_k,-}} vanishes: A-transformation base is the constant 2")]
    NonMonomialConstant,
    #[error("division by a zero expression")]
    DivisionByZeroExpr,
    #[error("denominator vanishes at the evaluation point")]
    PoleAtPoint,
    #[error("ambient rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("not regular: Id - holonomy of the mutated curve is singular")]
    NotRegular,
    #[error("monodromy must be nonzero")]
    ZeroMonodromy,
    #[error("invalid Q0 representation: {0}")]
    InvalidRep(String),
    #[error("characteristic polynomial does not split over the base field")]
    NotSplitOverBase,
    #[error("representation is not semisimple")]
    NotSemisimple,
    #[error("integer overflow in lattice arithmetic")]
    Overflow,
    #[error("expression exceeds the size cap of {cap} monomials")]
    ExpressionTooLarge { cap: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub(crate) fn check_index(index: usize, len: usize) -> Result<()> {
    if index < len {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index, len })
    }
}
