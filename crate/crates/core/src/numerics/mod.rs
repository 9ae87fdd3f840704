//! Special functions and contour quadrature.

pub mod bessel;
pub mod gamma;
pub mod plane;
pub mod quadrature;
pub mod residue;

pub use bessel::{bessel_k, log_bessel_k, log_bessel_k_real};
pub use gamma::{digamma, gamma, log_gamma, trigamma};
pub use plane::{integrate_plane, integrate_plane_split, PlaneOptions};
pub use quadrature::{
    integrate_circle, integrate_circles, integrate_real_line, integrate_vertical,
    integrate_verticals, ContourKind, ContourSpec, QuadratureResult,
};
pub use residue::{across_collision, continued_line_integral, gamma_product_residue, residue_with_fallback, Crossing, GammaFactor, Position};
