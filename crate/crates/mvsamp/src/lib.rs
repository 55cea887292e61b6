//! Association-driven sub-sampling of multivariate gridded data.
//!
//! Large simulations write multiple variables on a shared grid, and the
//! interesting physics usually lives where those variables move together.
//! This crate reduces such data by keeping a true subset of grid points,
//! sampled in proportion to the pointwise statistical association of each
//! point's value tuple, and then measures what the reduction preserved:
//!
//! 1. [`fieldio`] loads, stores and synthesizes regular-grid data and sampled
//!    point sets in bit-exact binary formats.
//! 2. [`histogram`] estimates the joint and marginal distributions of the
//!    selected variables.
//! 3. [`pointinfo`] turns the histogram into per-bin pointwise mutual
//!    information (or its multivariate generalization) and materializes the
//!    per-point association field.
//! 4. [`sampler`] draws point sets: uniformly at random, or bin-wise with
//!    acceptance probabilities proportional to normalized association,
//!    calibrated to a target sampling fraction.
//! 5. [`query`] runs multivariate range queries against raw and sampled data
//!    and scores agreement with the Jaccard index.
//! 6. [`reconstruct`] interpolates a sampled point set back onto the full
//!    grid.
//! 7. [`evaluate`] quantifies fidelity: slice images, SSIM, MSE, Pearson and
//!    distance correlation over regions of interest.
//! 8. [`bench`] orchestrates the whole comparison pipeline from a config file
//!    into a reproducible report.
//!
//! ```
//! use mvsamp::fieldio::{make_synthetic, Background, Band, FeatureRegion,
//!                       GridDims, SyntheticSpec, VariableSpec};
//! use mvsamp::sampler::{build_acceptance, pmi_sample, random_sample, SamplingFraction};
//!
//! // A small two-variable dataset with one planted joint feature.
//! let spec = SyntheticSpec {
//!     dims: GridDims::new(16, 16, 16).unwrap(),
//!     variables: vec![
//!         VariableSpec { name: "u".into(), background: Background::Uniform { lo: 0.0, hi: 1.0 } },
//!         VariableSpec { name: "v".into(), background: Background::Uniform { lo: 0.0, hi: 1.0 } },
//!     ],
//!     features: vec![FeatureRegion {
//!         center: [8.0, 8.0, 8.0],
//!         radii: [5.0, 5.0, 5.0],
//!         bands: vec![
//!             Band { variable: "u".into(), lo: 2.0, hi: 2.05, ripples: 0.0 },
//!             Band { variable: "v".into(), lo: 2.0, hi: 2.05, ripples: 0.0 },
//!         ],
//!     }],
//! };
//! let data = make_synthetic(&spec, 7).unwrap();
//!
//! let vars: Vec<String> = vec!["u".into(), "v".into()];
//! let (hist, assign) = mvsamp::histogram::build_joint(&data, &vars, 32).unwrap();
//! let table = mvsamp::pointinfo::pmi_table(&hist).unwrap();
//!
//! let alpha = SamplingFraction::new(0.05).unwrap();
//! let acceptance = build_acceptance(&table, &hist, alpha).unwrap();
//! let guided = pmi_sample(&data, &assign, &acceptance, 42).unwrap();
//! let uniform = random_sample(&data, alpha, 42);
//!
//! // The guided sample concentrates where the variables co-occur.
//! assert!(guided.len() > 0 && uniform.len() > 0);
//! ```

pub mod bench;
pub mod error;
pub mod evaluate;
pub mod fieldio;
pub mod histogram;
pub mod pointinfo;
pub mod query;
pub mod reconstruct;
pub mod rng;
pub mod sampler;

pub use error::{Error, Result};
