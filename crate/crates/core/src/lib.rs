pub mod bunchy;
pub mod corpus;
pub mod error;
pub mod graph;
pub mod hom;
pub mod pipeline;
pub mod stability;

pub use error::{Error, Result};
pub use graph::MultiGraph;
