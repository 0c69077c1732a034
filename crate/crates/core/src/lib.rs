//! Perimeter-resolved counts of fixed polycubes that are proper in `n - 1` and
//! `n - 2` dimensions, computed from edge-labeled trees, together with a
//! brute-force enumerator to check them against.

pub mod assemble;
pub mod enumerate;
pub mod error;
pub mod math;
pub mod oracle;
pub mod patterns;
pub mod perimeter;
pub mod proper;
pub mod results;
pub mod trees;
pub mod verify;

pub use error::{Error, Result};
pub use math::{BigCount, DegreeCensus, DegreeSequence};
pub use proper::PerimeterTable;
