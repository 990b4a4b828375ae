//! Diagonals of multivariate rational functions over prime fields: Cartier
//! operators, automata and annihilating polynomials for the diagonal
//! sequence, univariate rationalization, and explicit bound formulas.

pub mod annihilator;
pub mod automaton;
pub mod bounds;
pub mod cartier;
pub mod diagonal;
pub mod error;
pub mod field;
pub mod linalg;
pub mod poly;
pub mod rationalize;
pub mod rational;
pub mod series;
pub mod survey;
pub mod unipoly;

pub use error::{Error, ErrorClass, Result};
pub use field::{Fp, PrimeField};
pub use poly::MultiPoly;
pub use rational::{parse_rational, RationalFunction};
pub use series::{series_expand, TruncatedSeries};
pub use unipoly::UniPoly;
