//! Joint BS clustering and multicast beamforming for cache-enabled cloud
//! radio access networks.
//!
//! The crate generates network scenarios, solves the backhaul-plus-power
//! cost minimization with two convex-concave procedures, and compares the
//! results against exhaustive search, a greedy clustering heuristic and a
//! sparse unicast baseline.

pub mod baselines;
pub mod ccp;
pub mod conic;
pub mod harness;
pub mod linalg;
pub mod rng;
pub mod scenario;
pub mod smooth;
