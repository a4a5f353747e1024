//! Fast summation of two-dimensional Yukawa sums
//!
//! ```text
//! u_G(x) = sum_n K0(a |x - y_n|) f(y_n)
//! u_H(x) = sum_n K1(a |x - y_n|) (x - y_n)/|x - y_n| . f(y_n)
//! ```
//!
//! by Ewald splitting into a short-range real-space sum and a smooth
//! k-space sum evaluated with a Gaussian-window spectral method, in periodic
//! boxes and in free space.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with the bad range
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimate;
pub mod ewald;
pub mod experiments;
pub mod fourier;
pub mod geometry;
pub mod io;
pub mod kernels;
pub mod realspace;
pub mod reference;
pub mod specfun;
pub mod synth;
pub mod vec2;

pub use error::{Error, Result};
pub use ewald::{evaluate, evaluate_ongrid, EwaldParams, EwaldResult};
pub use geometry::{PointCloud, Strengths};
pub use kernels::{Kernel, KernelParams, Setting};
pub use vec2::Vec2;
