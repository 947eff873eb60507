pub mod hilbert;
pub mod pairs;
pub mod polytope;
pub mod relmodel;
pub mod scenarios;
pub mod sign;
pub mod statlab;

pub use pairs::{Choice, PairId, Wing};
pub use sign::Sign;
