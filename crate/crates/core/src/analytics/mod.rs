//! Degree laws, empirical degree statistics and classical topology metrics.

pub mod betweenness;
pub mod degree_law;
pub mod histogram;
pub mod topology;

pub use betweenness::{betweenness, edge_betweenness, node_betweenness, BetweennessScores};
pub use degree_law::{
    divisor_count, edge_existence_probability, layer_in_degree, layer_out_degree, multiplex_in_degree,
    multiplex_out_degree, DegreeProfile, MultiplexDegree,
};
pub use histogram::{degree_histogram, DegreeHistogram, Direction};
pub use topology::{
    assortativity, average_path_length, clustering_coefficient, topology_report, AssortativityDegree, TopologyReport,
};
