//! Geometric last passage percolation and the log-gamma polymer on the
//! strip {(i, j) : j ≤ i ≤ j + N}, the statistical check that the two-layer
//! top walk is stationary for them, and an enumeration oracle for the
//! geometric Laplace transform.

mod evolve;
mod oracle;
mod stationarity;
mod weights;

pub use evolve::{lpp_evolve, polymer_evolve, Evolved, InitialProfile};
pub use oracle::{brute_force_laplace_geo, walk_normaliser_geo, OracleValue};
pub use stationarity::{
    stationarity_of_profiles_geo, stationarity_of_profiles_lg, stationarity_report_geo, stationarity_report_lg,
    Comparison, CoordinateTest, StationarityReport, STATIONARITY_LEVEL,
};
pub use weights::{
    sample_strip_weights_geo, sample_strip_weights_geo_with, sample_strip_weights_lg, sample_strip_weights_lg_with,
    StripWeights,
};
