//! Spreading, gathering and the FFT convolution shared by the periodic and
//! free-space paths.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::fft::Fft2;
use super::window::WindowConfig;
use crate::error::{Error, Result};
use crate::geometry::{PointCloud, Strengths};
use crate::vec2::Vec2;

/// Wall time of each k-space stage.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StageTimings {
    pub precompute: Duration,
    pub spread: Duration,
    pub fft: Duration,
    pub scale: Duration,
    pub ifft: Duration,
    pub gather: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.precompute + self.spread + self.fft + self.scale + self.ifft + self.gather
    }

    /// k-space work excluding one-off precomputation.
    pub fn kspace(&self) -> Duration {
        self.spread + self.fft + self.scale + self.ifft + self.gather
    }
}

/// A uniform `n` x `n` grid with nodes at `origin + (i, j) h`, stored with
/// x fastest.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridGeometry {
    pub n: usize,
    pub h: f64,
    pub origin: Vec2,
    pub periodic: bool,
}

impl GridGeometry {
    fn stencil_indices(
        &self,
        u: f64,
        win: &WindowConfig,
        w: &mut [f64],
        idx: &mut [usize],
    ) -> Result<()> {
        let i0 = win.stencil(u, w);
        let n = self.n as i64;
        if self.periodic {
            for (j, ix) in idx.iter_mut().enumerate() {
                *ix = (i0 + j as i64).rem_euclid(n) as usize;
            }
        } else {
            if i0 < 0 || i0 + win.p as i64 > n {
                return Err(Error::DomainPad(format!(
                    "window support [{i0}, {}) leaves the padded grid of {n} points",
                    i0 + win.p as i64
                )));
            }
            for (j, ix) in idx.iter_mut().enumerate() {
                *ix = (i0 + j as i64) as usize;
            }
        }
        Ok(())
    }

    fn local(&self, x: Vec2) -> (f64, f64) {
        (
            (x.x - self.origin.x) / self.h,
            (x.y - self.origin.y) / self.h,
        )
    }
}

struct Stencil {
    wx: Vec<f64>,
    wy: Vec<f64>,
    ix: Vec<usize>,
    iy: Vec<usize>,
}

impl Stencil {
    fn new(p: usize) -> Self {
        Stencil {
            wx: vec![0.0; p],
            wy: vec![0.0; p],
            ix: vec![0; p],
            iy: vec![0; p],
        }
    }

    fn set(&mut self, geom: &GridGeometry, win: &WindowConfig, x: Vec2) -> Result<()> {
        let (ux, uy) = geom.local(x);
        geom.stencil_indices(ux, win, &mut self.wx, &mut self.ix)?;
        geom.stencil_indices(uy, win, &mut self.wy, &mut self.iy)
    }
}

/// Spreads each channel of point values onto the grid:
/// `H_c(z) = sum_n v_c[n] w(z - y_n)`.
pub fn spread(
    positions: &[Vec2],
    channels: &[&[f64]],
    geom: &GridGeometry,
    win: &WindowConfig,
) -> Result<Vec<Vec<f64>>> {
    let n2 = geom.n * geom.n;
    let nc = channels.len();
    let threads = rayon::current_num_threads().max(1);
    let chunk = positions.len().div_ceil(threads).max(1);
    let partial: Vec<Result<Vec<Vec<f64>>>> = positions
        .par_chunks(chunk)
        .enumerate()
        .map(|(c, pts)| {
            let mut grids = vec![vec![0.0; n2]; nc];
            let mut st = Stencil::new(win.p);
            for (k, &y) in pts.iter().enumerate() {
                let n = c * chunk + k;
                st.set(geom, win, y)?;
                for (g, ch) in grids.iter_mut().zip(channels) {
                    let f = ch[n];
                    if f == 0.0 {
                        continue;
                    }
                    for (b, &iy) in st.iy.iter().enumerate() {
                        let fy = f * st.wy[b];
                        let row = &mut g[iy * geom.n..(iy + 1) * geom.n];
                        for (a, &ix) in st.ix.iter().enumerate() {
                            row[ix] += fy * st.wx[a];
                        }
                    }
                }
            }
            Ok(grids)
        })
        .collect();
    // reduce in chunk order
    let mut out: Option<Vec<Vec<f64>>> = None;
    for part in partial {
        let part = part?;
        match &mut out {
            None => out = Some(part),
            Some(acc) => {
                for (a, b) in acc.iter_mut().zip(part) {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                }
            }
        }
    }
    Ok(out.unwrap_or_else(|| vec![vec![0.0; n2]; nc]))
}

/// Trapezoidal gather `h^2 sum_z grid(z) w(x_t - z)`.
pub fn gather(
    grid: &[f64],
    targets: &[Vec2],
    geom: &GridGeometry,
    win: &WindowConfig,
) -> Result<Vec<f64>> {
    let h2 = geom.h * geom.h;
    targets
        .par_iter()
        .map_init(
            || Stencil::new(win.p),
            |st, &x| {
                st.set(geom, win, x)?;
                let mut acc = 0.0;
                for (b, &iy) in st.iy.iter().enumerate() {
                    let row = &grid[iy * geom.n..(iy + 1) * geom.n];
                    let mut s = 0.0;
                    for (a, &ix) in st.ix.iter().enumerate() {
                        s += row[ix] * st.wx[a];
                    }
                    acc += s * st.wy[b];
                }
                Ok(acc * h2)
            },
        )
        .collect()
}

/// Discrete transfer function on the convolution grid: one array for
/// scalar strengths, one per component for vector strengths.
#[derive(Clone, Debug)]
pub enum Transfer {
    Scalar(Vec<Complex64>),
    Vector([Vec<Complex64>; 2]),
}

/// Spread -> FFT -> multiply -> IFFT on a grid that may be zero padded:
/// the data grid is the leading `data.n` x `data.n` block of the
/// `n_conv` x `n_conv` convolution grid.
pub struct Convolver {
    pub data: GridGeometry,
    pub n_conv: usize,
    pub fft: Fft2,
    pub transfer: Transfer,
}

impl Convolver {
    pub fn new(data: GridGeometry, n_conv: usize, transfer: Transfer) -> Self {
        Convolver {
            data,
            n_conv,
            fft: Fft2::new(n_conv),
            transfer,
        }
    }

    /// Product of the transfer function with the spectra of the spread
    /// strengths.
    pub fn spectrum(
        &self,
        sources: &PointCloud,
        win: &WindowConfig,
        t: &mut StageTimings,
    ) -> Result<Vec<Complex64>> {
        let start = Instant::now();
        let spread_grids = match (&sources.strengths, &self.transfer) {
            (Strengths::Scalar(f), Transfer::Scalar(_)) => {
                spread(&sources.positions, &[f], &self.data, win)?
            }
            (Strengths::Vector(f), Transfer::Vector(_)) => {
                let f1: Vec<f64> = f.iter().map(|v| v.x).collect();
                let f2: Vec<f64> = f.iter().map(|v| v.y).collect();
                spread(&sources.positions, &[&f1, &f2], &self.data, win)?
            }
            _ => {
                return Err(Error::Parameter(
                    "strength type does not match the kernel".into(),
                ))
            }
        };
        t.spread += start.elapsed();

        let start = Instant::now();
        let nc = self.n_conv;
        let nd = self.data.n;
        let spectra: Vec<Vec<Complex64>> = spread_grids
            .iter()
            .map(|g| {
                let mut c = vec![Complex64::default(); nc * nc];
                for iy in 0..nd {
                    for ix in 0..nd {
                        c[iy * nc + ix] = Complex64::new(g[iy * nd + ix], 0.0);
                    }
                }
                self.fft.forward(&mut c);
                c
            })
            .collect();
        t.fft += start.elapsed();

        let start = Instant::now();
        let out = match &self.transfer {
            Transfer::Scalar(p) => spectra[0].iter().zip(p).map(|(a, b)| a * b).collect(),
            Transfer::Vector([p1, p2]) => spectra[0]
                .iter()
                .zip(&spectra[1])
                .zip(p1.iter().zip(p2))
                .map(|((a1, a2), (b1, b2))| a1 * b1 + a2 * b2)
                .collect(),
        };
        t.scale += start.elapsed();
        Ok(out)
    }

    /// Inverse transform of a spectrum, scaled by h^2/n^2 and restricted to
    /// the data grid.
    pub fn to_field(&self, mut spec: Vec<Complex64>, t: &mut StageTimings) -> Vec<f64> {
        let start = Instant::now();
        self.fft.inverse(&mut spec);
        let nc = self.n_conv;
        let nd = self.data.n;
        let s = self.data.h * self.data.h / (nc * nc) as f64;
        let mut out = vec![0.0; nd * nd];
        for iy in 0..nd {
            for ix in 0..nd {
                out[iy * nd + ix] = spec[iy * nc + ix].re * s;
            }
        }
        t.ifft += start.elapsed();
        out
    }

    /// The smooth field H~ on the data grid.
    pub fn field(
        &self,
        sources: &PointCloud,
        win: &WindowConfig,
        t: &mut StageTimings,
    ) -> Result<Vec<f64>> {
        let spec = self.spectrum(sources, win, t)?;
        Ok(self.to_field(spec, t))
    }

    /// Field followed by a gather at `targets`.
    pub fn evaluate(
        &self,
        sources: &PointCloud,
        targets: &[Vec2],
        win: &WindowConfig,
        t: &mut StageTimings,
    ) -> Result<Vec<f64>> {
        let field = self.field(sources, win, t)?;
        let start = Instant::now();
        let out = gather(&field, targets, &self.data, win)?;
        t.gather += start.elapsed();
        Ok(out)
    }
}
