//! Two-layer Gibbs measures behind the stationary measures: Pitman
//! transforms of walk pairs, path densities, Doob functions, Markov kernels
//! and samplers.

mod density;
mod doob;
mod kernel;
mod params;
mod pitman;
mod sampler;

pub use density::{twolayer_logdensity_geo, twolayer_logdensity_lg};
pub use doob::{
    h_geo, limit_doob_geo, limit_doob_lg, log_lg_site_kernel, q_geo, q_lg, GeoDoob, LgDoob, GAP_TAIL, LG_GRID_MIN, LG_GRID_STEP,
};
pub use kernel::{kernel_geo, kernel_lg, kernel_word_step_geo, kernel_word_step_lg, limit_kernel_geo, limit_kernel_lg};
pub use params::{GeoParams, LgParams, PathWord, Step, TwoLayerPath, WalkPair};
pub use pitman::{
    max_plus, min_plus, pitman_geo, pitman_lg, reference_log_density_lg, sample_reference_geo, sample_reference_lg, walk_log_weight_geo,
    walk_log_weight_lg, PitmanPaths,
};
pub use sampler::{
    importance_log_weight_lg, importance_sample_lg, sample_twolayer_geo, sample_twolayer_geo_with, sample_twolayer_lg_mcmc,
    stream_rng, ChainConfig, McmcRun, WeightedWalks,
};
