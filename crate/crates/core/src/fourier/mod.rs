//! Spectral k-space engine: Gaussian-window spreading, FFT convolution and
//! gathering, for periodic and free-space sums.

pub mod engine;
pub mod fft;
pub mod freespace;
pub mod periodic;
pub mod window;

pub use engine::{gather, spread, GridGeometry, StageTimings};
pub use freespace::{
    kspace_sum_freespace, plan_freespace, precompute_mollified, screening_pad, FreeMultiplier,
    FreeSpaceOperator, FreeSpaceOptions, FreeSpacePlan, MIN_UPSAMPLING,
};
pub use periodic::{
    commensurate_grid_size, kspace_sum_periodic, kspace_sum_periodic_ongrid, KspaceOutput,
};
pub use window::{default_eta, WindowConfig};
