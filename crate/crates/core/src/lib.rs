//! Link-trace network sampling: graph storage, samplers, representativeness
//! measures, community detection, synthetic graph generators and an
//! experiment harness.
//!
//! Measures are generic over [`Scalar`]; the aliases below fix the common
//! choices. [`Exact`] gives rational results for testing against hand
//! computations.

pub mod community;
pub mod graph;
pub mod harness;
pub mod metrics;
pub mod sampling;
pub mod scalar;
pub mod synth;

pub use community::{detect_cnm, detect_rak, load_partition, modularity, Partition};
pub use graph::{load_edge_list, Graph, IdMap, InducedSubgraph, NodeId, NodeSet};
pub use metrics::{DegreeMode, Metric, MetricContext};
pub use sampling::{sample, Sample, SampleError, SampleStatus, SamplerConfig, Strategy};
pub use scalar::Scalar;

/// Exact rational scalar.
pub type Exact = num_rational::BigRational;

pub type DegreeCdf64 = metrics::DegreeCdf<f64>;
pub type DegreeCdf32 = metrics::DegreeCdf<f32>;
pub type ExactDegreeCdf = metrics::DegreeCdf<Exact>;
pub type CheckpointReport64 = metrics::CheckpointReport<f64>;
pub type ExactCheckpointReport = metrics::CheckpointReport<Exact>;
