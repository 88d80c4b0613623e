//! Truncated Laurent series and the level-one expansions of t(az), h, g and Δ.

pub mod forms;
pub mod trunc;

pub use forms::*;
pub use trunc::{SeriesRing, TruncSeries};
