//! Closed-form contour-integral expressions: partition functions, Laplace
//! transforms of the top layer and the mean free energy.

mod laplace;
mod partition;
mod query;

pub use laplace::{laplace_geo, laplace_lg, laplace_lg_continued, mean_free_energy, MAX_POINTS};
pub use partition::{partition_geo, partition_geo_residues, partition_lg};
pub(crate) use partition::finite_exp;
pub use query::LaplaceQuery;
