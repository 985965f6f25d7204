pub mod cli;
pub mod closed_forms;
pub mod engines;
pub mod error;
pub mod orthopoly;
pub mod paving;
pub mod symbolic;

pub use error::{Error, Result};
pub use symbolic::{LaurentPolynomial, Rational, Symbol, TruncatedSeries};
