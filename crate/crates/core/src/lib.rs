//! Graph sampling for social networks: community + densification-power-law
//! (C+D) sampling, baseline node/edge/exploration samplers, and a five-property
//! Kolmogorov–Smirnov evaluation harness.

pub mod budget;
pub mod community;
pub mod cplusd;
pub mod error;
pub mod generate;
pub mod graph;
pub mod harness;
pub mod metrics;
pub mod rng;
pub mod samplers;
pub mod spectral;
pub mod urn;

pub use budget::{allocate_budgets, AlphaRecord, BudgetTree};
pub use community::{extract_hierarchy, modularity, Dendrogram, Hierarchy, Partition};
pub use cplusd::{sample_cplusd, CPlusDSample, DegreeWeighting};
pub use error::{Error, Result};
pub use graph::{load_edge_list, Graph, NodeIdMap};
pub use harness::{ExperimentConfig, Report};
pub use metrics::{Distribution, GraphProperties, HopMode, MetricOptions, PropertyKind};
pub use samplers::{sample, Base, Method, SampleGraph, SamplerParams};
