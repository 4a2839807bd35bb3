//! x-partial Hessians, sampled convexity verdicts, negativity witnesses and a²-tests.

mod a2;
mod hessian;
mod region;
mod verdict;
mod witness;

pub use a2::{a2_convexity_test, a2_defect, reduction_residual, A2Report, A2Stats, A2Witness, Construction};
pub use hessian::{fd_hessian, hessian_forms, hessian_forms_with, partial_hessian, HessianForms, HessianProbe};
pub use region::{Membership, RegionDescription, RegionSpec};
pub use verdict::{convexity_verdict, midpoint_defect, ConvexityReport, MidpointWitness, Outcome, SampleConfig, SizeSummary};
pub use witness::{negativity_witness, span_block, span_probe, ConvexityWitness, SpanProbe};
