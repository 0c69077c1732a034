use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A closed form was evaluated outside the range of `n` where it is defined.
    #[error("{formula} is defined for n >= {min_n}, got n = {n}")]
    Domain {
        formula: &'static str,
        n: usize,
        min_n: usize,
    },

    /// An exact division inside a closed form left a remainder. This means
    /// the formula is being used on inputs it was not derived for.
    #[error("formula misuse in {formula}: {numerator} is not divisible by {denominator}")]
    InexactDivision {
        formula: &'static str,
        numerator: String,
        denominator: String,
    },

    #[error("cost budget exceeded: about {estimate} polycubes to visit, budget is {budget}")]
    BudgetExceeded { estimate: u128, budget: u128 },

    /// Proper-dimension results that the closed forms do not cover and that
    /// must come from enumeration instead.
    #[error("g2 formula path needs n >= 6 (got n = {n}); use the enumerator")]
    RoutedToOracle { n: usize },

    #[error("malformed result file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
