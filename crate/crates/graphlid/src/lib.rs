//! Local intrinsic dimensionality for graph nodes and LID-elastic node2vec.
//!
//! The crate is organized around a small pipeline:
//!
//! 1. [`graph`] loads an edge list into an immutable undirected [`graph::Graph`].
//! 2. [`community`] grows the natural (local) community of each node by greedy
//!    fitness maximization and scores it with NC-LID, a graph-based local
//!    intrinsic dimensionality measure.
//! 3. [`walks`] samples biased second-order random walks: plain node2vec or
//!    one of the two LID-elastic variants that personalize walk counts,
//!    lengths and the p/q bias parameters per node using NC-LID.
//! 4. [`sgns`] trains skip-gram-with-negative-sampling node vectors from the
//!    walk corpus.
//! 5. [`eval`] reconstructs the graph from an embedding by joining the L
//!    closest vector pairs and reports per-node link precision/recall/F1.
//! 6. [`stats`] holds the rank statistics used in the analyses: Spearman
//!    correlation, the Mann-Whitney U test with probabilities of
//!    superiority, and degree-distribution skewness.
//!
//! [`centrality`] provides the five comparator metrics (degree, core index,
//! eigenvector, closeness, betweenness) and [`rng`] the counter-based
//! deterministic random streams that make corpus sampling reproducible
//! regardless of thread count.

pub mod centrality;
pub mod community;
pub mod eval;
pub mod graph;
pub mod rng;
pub mod sgns;
pub mod stats;
pub mod walks;

pub use community::{nc_lid, nc_lid_all, natural_community, NaturalCommunity, NcLidScore};
pub use eval::{evaluate_embedding, ReconstructionResult};
pub use graph::{Graph, GraphStats};
pub use sgns::{Embedding, TrainConfig};
pub use walks::{WalkConfig, WalkCorpus, WalkVariant};
