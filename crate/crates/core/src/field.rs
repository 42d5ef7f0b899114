//! Space-time field storage and the data-parallel evaluation helpers.
//!
//! Fields are stored time-major: row `it` holds the `nx` spatial samples at
//! time index `it`. Grid evaluation is embarrassingly parallel over time
//! rows; with the `parallel` feature the rows are filled by rayon, without
//! it by a plain loop. Both paths fill each element independently (no
//! parallel reductions), so results are bit-identical.

use crate::model::GridSpec;

/// A scalar field sampled on the space-time grid, time-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub nx: usize,
    pub n_times: usize,
    data: Vec<f64>,
}

impl Field {
    pub fn zeros(nx: usize, n_times: usize) -> Self {
        Field {
            nx,
            n_times,
            data: vec![0.0; nx * n_times],
        }
    }

    #[inline]
    pub fn at(&self, it: usize, ix: usize) -> f64 {
        debug_assert!(it < self.n_times && ix < self.nx);
        self.data[it * self.nx + ix]
    }

    #[inline]
    pub fn set(&mut self, it: usize, ix: usize, v: f64) {
        debug_assert!(it < self.n_times && ix < self.nx);
        self.data[it * self.nx + ix] = v;
    }

    /// Spatial samples at time index `it`.
    pub fn row(&self, it: usize) -> &[f64] {
        &self.data[it * self.nx..(it + 1) * self.nx]
    }

    pub fn row_mut(&mut self, it: usize) -> &mut [f64] {
        &mut self.data[it * self.nx..(it + 1) * self.nx]
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.data.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    pub fn min(&self) -> f64 {
        self.data.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn scale(&mut self, factor: f64) {
        for v in &mut self.data {
            *v *= factor;
        }
    }

    /// Builds a field by filling every time row with `fill(it, row)`.
    pub fn from_rows<F>(nx: usize, n_times: usize, fill: F) -> Self
    where
        F: Fn(usize, &mut [f64]) + Sync + Send,
    {
        let mut field = Field::zeros(nx, n_times);
        fill_time_rows(&mut field.data, nx, fill);
        field
    }

    /// Bilinear interpolation in grid coordinates; `x` is clamped to the
    /// domain, `t` to `[0, t_max]`.
    pub fn sample(&self, grid: &GridSpec, x: f64, t: f64) -> f64 {
        let fx = ((x - grid.x_min) / grid.dx()).clamp(0.0, (self.nx - 1) as f64);
        let ft = (t / grid.dt()).clamp(0.0, (self.n_times - 1) as f64);
        let ix = (fx as usize).min(self.nx - 2);
        let it = (ft as usize).min(self.n_times - 2);
        let ax = fx - ix as f64;
        let at = ft - it as f64;
        let f00 = self.at(it, ix);
        let f01 = self.at(it, ix + 1);
        let f10 = self.at(it + 1, ix);
        let f11 = self.at(it + 1, ix + 1);
        (1.0 - at) * ((1.0 - ax) * f00 + ax * f01) + at * ((1.0 - ax) * f10 + ax * f11)
    }
}

/// Fills consecutive `nx`-sized rows of `data` with `fill(it, row)`,
/// in parallel when the `parallel` feature is enabled.
#[cfg(feature = "parallel")]
pub fn fill_time_rows<F>(data: &mut [f64], nx: usize, fill: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    use rayon::prelude::*;
    data.par_chunks_mut(nx)
        .enumerate()
        .for_each(|(it, row)| fill(it, row));
}

#[cfg(not(feature = "parallel"))]
pub fn fill_time_rows<F>(data: &mut [f64], nx: usize, fill: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    for (it, row) in data.chunks_mut(nx).enumerate() {
        fill(it, row);
    }
}

/// Sequential row filler, always available; the benches compare it against
/// the parallel path.
pub fn fill_time_rows_seq<F>(data: &mut [f64], nx: usize, fill: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    for (it, row) in data.chunks_mut(nx).enumerate() {
        fill(it, row);
    }
}

/// Trapezoid rule over uniformly spaced samples.
pub fn trapezoid(values: &[f64], dx: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let interior: f64 = values[1..values.len() - 1].iter().sum();
    dx * (0.5 * (values[0] + values[values.len() - 1]) + interior)
}

/// Trapezoid rule for `f` sampled at `n` uniform points over `[a, b]`.
pub fn trapezoid_fn<F: Fn(f64) -> f64>(a: f64, b: f64, n: usize, f: F) -> f64 {
    let h = (b - a) / (n - 1) as f64;
    let mut acc = 0.5 * (f(a) + f(b));
    for k in 1..n - 1 {
        acc += f(a + k as f64 * h);
    }
    acc * h
}
