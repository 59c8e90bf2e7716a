//! Sampling correctors and improvers for distributions over `{1..n}`.
//!
//! Every corrector exposes two faces: an exact mode that materializes the
//! output distribution from a known [`Pmf`], and a sample mode that drives the
//! same procedure through a [`DistAccess`] oracle.

pub mod birge;
pub mod dist_core;
pub mod error;
pub mod isotonic;
pub mod meta;
pub mod missing_data;
pub mod mono_correct;
pub mod rng;
pub mod uniformity;

pub use birge::{birge_partition, flatten, IntervalPartition};
pub use dist_core::{
    convolve, empirical_pmf, kolmogorov_distance, tv_distance, CorrectorParams, DistAccess, Mode,
    Pmf,
};
pub use error::{Error, Result};
pub use isotonic::{closest_monotone_histogram, distance_to_monotone_exact, WeightedHistogram};
pub use rng::Coins;
