//! Secret-message / secret-key rate regions for wiretap channels with state.
//!
//! The crate evaluates inner and outer bounds on the achievable
//! `(R_M, R_K)` region of a finite-alphabet wiretap channel whose state is
//! known causally or non-causally at the encoder, searches auxiliary designs
//! to trace region frontiers, and simulates the superposition
//! likelihood-encoder code at small blocklengths with exact metrics.

pub mod bounds;
pub mod channel;
pub mod error;
pub mod frontier;
pub mod info;
mod nested;
pub mod prob;
pub mod scheme;
pub mod search;
pub mod sim;

pub use bounds::{
    compare_sk_formulas, eval_causal_case, eval_causal_ed, eval_degraded_region, eval_nc_ed_region,
    eval_nc_inner, eval_outer_e, eval_state_repro_outer, evaluate, scalar_projection, Axis,
    BoundId, Projection, RatePolytope,
};
pub use channel::{
    builtin_example, check_degraded, degradedness_flags, load_channel, transform_general_csi,
    Degradedness, DegradednessFlags, SideInfo, WiretapChannel,
};
pub use error::{Error, Result};
pub use frontier::{
    frontier_dominates, hausdorff_frontier_distance, pareto_union, upper_concave_envelope,
    FrontierKind, RegionFrontier,
};
pub use info::{
    binary_entropy, conditional_entropy, conditional_mutual_information, entropy, kl_divergence,
    mutual_information, total_variation, Tensor,
};
pub use prob::{CondKernel, ProbVector};
pub use scheme::{build_joint, AuxiliaryScheme, JointSystem, SchemeMode, VarSet};
pub use search::{optimize_region, optimize_scalar, RegionSearch, ScalarOptimum, SearchConfig};
