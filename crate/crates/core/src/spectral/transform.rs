use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::{CylinderGrid, GridFunction, MixedSpectrum};
use crate::exec::Exec;
use crate::symbols::{C64, I};

struct Plans {
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_t: Arc<dyn Fft<f64>>,
    inv_t: Arc<dyn Fft<f64>>,
}

impl Plans {
    fn new(grid: &CylinderGrid) -> Self {
        let mut p = FftPlanner::new();
        Self {
            fwd_x: p.plan_fft_forward(grid.n),
            inv_x: p.plan_fft_inverse(grid.n),
            fwd_t: p.plan_fft_forward(grid.m),
            inv_t: p.plan_fft_inverse(grid.m),
        }
    }
}

fn transpose(data: &[C64], rows: usize, cols: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); data.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = data[r * cols + c];
        }
    }
    out
}

fn sign(m: i64) -> f64 {
    if m.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `x → ξ` along every row: `F(ξ_m) = Δx Σ f(x_i) e^{−iξ_m x_i}`, centered.
fn rows_forward_x(data: &mut [C64], grid: &CylinderGrid, fft: &Arc<dyn Fft<f64>>, exec: Exec) {
    let n = grid.n;
    let dx = grid.dx();
    exec.for_each_chunk(data, n, |_, row| {
        fft.process(row);
        row.rotate_right(n / 2);
        for (c, v) in row.iter_mut().enumerate() {
            *v *= dx * sign(grid.m_of_col(c));
        }
    });
}

/// Inverse of [`rows_forward_x`].
fn rows_inverse_x(data: &mut [C64], grid: &CylinderGrid, fft: &Arc<dyn Fft<f64>>, exec: Exec) {
    let n = grid.n;
    let scale = 1.0 / (n as f64 * grid.dx());
    exec.for_each_chunk(data, n, |_, row| {
        for (c, v) in row.iter_mut().enumerate() {
            *v *= scale * sign(grid.m_of_col(c));
        }
        row.rotate_left(n / 2);
        fft.process(row);
    });
}

/// `t → k` along every column, given data stored row-major in `t`.
fn cols_forward_t(data: &[C64], grid: &CylinderGrid, fft: &Arc<dyn Fft<f64>>, exec: Exec) -> Vec<C64> {
    let (m, n) = (grid.m, grid.n);
    let mut tr = transpose(data, m, n);
    let scale = 1.0 / m as f64;
    exec.for_each_chunk(&mut tr, m, |_, col| {
        fft.process(col);
        col.rotate_right(m / 2);
        col.iter_mut().for_each(|v| *v *= scale);
    });
    transpose(&tr, n, m)
}

fn cols_inverse_t(data: &[C64], grid: &CylinderGrid, fft: &Arc<dyn Fft<f64>>, exec: Exec) -> Vec<C64> {
    let (m, n) = (grid.m, grid.n);
    let mut tr = transpose(data, m, n);
    exec.for_each_chunk(&mut tr, m, |_, col| {
        col.rotate_left(m / 2);
        fft.process(col);
    });
    transpose(&tr, n, m)
}

/// Fourier series in `t` composed with the Fourier transform in `x`.
pub fn forward_mixed(f: &GridFunction) -> MixedSpectrum {
    forward_mixed_with(f, Exec::default())
}

pub fn forward_mixed_with(f: &GridFunction, exec: Exec) -> MixedSpectrum {
    let grid = f.grid;
    let plans = Plans::new(&grid);
    let mut data = f.values.clone();
    rows_forward_x(&mut data, &grid, &plans.fwd_x, exec);
    MixedSpectrum { grid, values: cols_forward_t(&data, &grid, &plans.fwd_t, exec) }
}

pub fn inverse_mixed(s: &MixedSpectrum) -> GridFunction {
    inverse_mixed_with(s, Exec::default())
}

pub fn inverse_mixed_with(s: &MixedSpectrum, exec: Exec) -> GridFunction {
    let grid = s.grid;
    let plans = Plans::new(&grid);
    let mut data = cols_inverse_t(&s.values, &grid, &plans.inv_t, exec);
    rows_inverse_x(&mut data, &grid, &plans.inv_x, exec);
    GridFunction { grid, values: data }
}

/// Partial transform in `x` only: row `j` holds `f̂(t_j, ξ_m)`, centered in `m`.
pub fn forward_x(f: &GridFunction) -> Vec<C64> {
    let plans = Plans::new(&f.grid);
    let mut data = f.values.clone();
    rows_forward_x(&mut data, &f.grid, &plans.fwd_x, Exec::default());
    data
}

/// Inverse of [`forward_x`].
pub fn inverse_x(grid: CylinderGrid, partial: &[C64]) -> GridFunction {
    let plans = Plans::new(&grid);
    let mut data = partial.to_vec();
    rows_inverse_x(&mut data, &grid, &plans.inv_x, Exec::default());
    GridFunction { grid, values: data }
}

/// Builds `f̃(k, ξ)` from samples `f̂(t_j, ξ_m)` laid out as in [`forward_x`].
pub fn spectrum_from_partial(grid: CylinderGrid, partial: &[C64]) -> MixedSpectrum {
    let plans = Plans::new(&grid);
    MixedSpectrum { grid, values: cols_forward_t(partial, &grid, &plans.fwd_t, Exec::default()) }
}

/// Inverse of [`spectrum_from_partial`].
pub fn partial_from_spectrum(s: &MixedSpectrum) -> Vec<C64> {
    let plans = Plans::new(&s.grid);
    cols_inverse_t(&s.values, &s.grid, &plans.inv_t, Exec::default())
}

/// Applies the Fourier multiplier `mult(ξ)` along `x` in every row.
pub fn apply_x_multiplier(f: &GridFunction, mult: impl Fn(f64) -> C64) -> GridFunction {
    let grid = f.grid;
    let mut data = forward_x(f);
    let w: Vec<C64> = grid.xis().into_iter().map(mult).collect();
    for row in data.chunks_mut(grid.n) {
        row.iter_mut().zip(&w).for_each(|(v, m)| *v *= m);
    }
    inverse_x(grid, &data)
}

/// Applies the Fourier multiplier `mult(k)` along `t` in every column.
pub fn apply_t_multiplier(f: &GridFunction, mult: impl Fn(i64) -> C64) -> GridFunction {
    let grid = f.grid;
    let plans = Plans::new(&grid);
    let mut data = cols_forward_t(&f.values, &grid, &plans.fwd_t, Exec::default());
    for (r, row) in data.chunks_mut(grid.n).enumerate() {
        let m = mult(grid.k_of_row(r));
        row.iter_mut().for_each(|v| *v *= m);
    }
    GridFunction { grid, values: cols_inverse_t(&data, &grid, &plans.inv_t, Exec::default()) }
}

/// Spectral `∂t`.
pub fn d_dt(f: &GridFunction) -> GridFunction {
    apply_t_multiplier(f, |k| I * k as f64)
}

/// Spectral `∂x` on the periodized x-interval.
pub fn d_dx(f: &GridFunction) -> GridFunction {
    apply_x_multiplier(f, |xi| I * xi)
}
