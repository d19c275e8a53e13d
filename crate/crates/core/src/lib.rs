pub mod analytics;
pub mod attacks;
pub mod config;
pub mod controllability;
pub mod edgelist;
pub mod error;
pub mod generators;
pub mod graph;
pub mod motifs;
pub mod reproduce;
pub mod rng;

pub use error::{Error, Result};
pub use graph::{DirectedGraph, Edge, NodeId};
pub use rng::RngStream;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/generators.md")]
    mod generators {}
    #[doc = include_str!("../../../book/src/analytics.md")]
    mod analytics {}
    #[doc = include_str!("../../../book/src/controllability.md")]
    mod controllability {}
    #[doc = include_str!("../../../book/src/attacks.md")]
    mod attacks {}
    #[doc = include_str!("../../../book/src/motifs.md")]
    mod motifs {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/reproduce.md")]
    mod reproduce {}
}
