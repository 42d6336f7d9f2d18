//! Overlapping community detection by spectral embedding and K-medians.
//!
//! A network is modelled as `A_ij ~ Bernoulli(W_ij)` with
//! `W = alpha Theta Z B Z^T Theta`. [`fit::fit`] estimates the continuous
//! memberships `Z`; [`sampler`] draws synthetic networks and
//! [`experiments`] runs seeded simulation sweeps over them.

pub mod assignment;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod io;
pub mod kmedians;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod sampler;
pub mod spectral;

pub use error::{Error, Result};
pub use nalgebra;
pub use fit::{fit, fit_matrix, OccamOptions, OccamResult};
pub use kmedians::{fit_kmedians, KMediansConfig};
pub use metrics::{exnvi, membership_error, BinaryMembership};
pub use model::{AdjacencyMatrix, ConnectivityMatrix, DegreeParams, MembershipMatrix, ModelParams};
pub use sampler::{generate, OverlapProfile, SamplerConfig, ThetaLaw};
