//! Special functions: Bessel K0, K1, J0, J1, exponential integrals and
//! incomplete modified Bessel functions.

mod bessel;
mod expint;
mod incomplete;
pub mod quadrature;

pub use bessel::{bessel_j, bessel_k, j0, j1, k0, k01, k1, one_minus_j0, one_minus_x_k1};
pub use expint::{en, expint_en};
pub use incomplete::{inc_bessel_k, inc_k, IncompleteBesselArgs, UNDERFLOW_SUM};
