pub mod cooccurrence;
pub mod corpus;
pub mod error;
pub mod factors;
pub mod graphio;
pub mod pipeline;
pub mod segmenter;

pub use error::{Error, Result};
