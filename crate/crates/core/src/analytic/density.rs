use std::io::{BufRead, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use super::rational::{Atom, CauchyTransform};
use crate::error::SolverError;

/// Densities below this are treated as inversion failures rather than rounding.
pub const NEGATIVE_DENSITY_LIMIT: f64 = -1e-6;

/// Default tolerance on the trapezoidal mass of a normalized density.
pub const DEFAULT_MASS_TOLERANCE: f64 = 0.02;

/// A measure discretized as density values on an increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl GridDensity {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self, SolverError> {
        let invalid = |m: &str| Err(SolverError::Validation(m.to_string()));
        if grid.len() != values.len() {
            return invalid("grid and values differ in length");
        }
        if grid.len() < 2 {
            return invalid("a density grid needs at least two points");
        }
        if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("grid must be finite and strictly increasing");
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return invalid("density values must be finite and nonnegative");
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at `points` equally spaced abscissae in `[lo, hi]`.
    pub fn from_fn(lo: f64, hi: f64, points: usize, f: impl Fn(f64) -> f64) -> Result<Self, SolverError> {
        let grid = uniform_grid(lo, hi, points);
        let values = grid.iter().map(|&t| f(t)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    fn trapezoid(&self, weight: impl Fn(f64) -> f64) -> f64 {
        self.grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(t, v)| 0.5 * (t[1] - t[0]) * (weight(t[0]) * v[0] + weight(t[1]) * v[1]))
            .sum()
    }

    pub fn mass(&self) -> f64 {
        self.trapezoid(|_| 1.0)
    }

    /// `∫ t^n ρ(t) dt` by the trapezoidal rule.
    pub fn moment(&self, n: u32) -> f64 {
        self.trapezoid(|t| t.powi(n as i32))
    }

    /// `∫_a^b ρ` for the piecewise-linear interpolant, zero off the grid.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let value_at = |t: f64, i: usize| {
            let (t0, t1) = (self.grid[i], self.grid[i + 1]);
            let s = (t - t0) / (t1 - t0);
            self.values[i] * (1.0 - s) + self.values[i + 1] * s
        };
        let mut total = 0.0;
        for i in 0..self.len() - 1 {
            let (t0, t1) = (self.grid[i], self.grid[i + 1]);
            let (lo, hi) = (a.max(t0), b.min(t1));
            if hi > lo {
                total += 0.5 * (hi - lo) * (value_at(lo, i) + value_at(hi, i));
            }
        }
        total
    }

    pub fn check_normalized(&self, tolerance: f64) -> Result<(), SolverError> {
        let mass = self.mass();
        if (mass - 1.0).abs() > tolerance {
            return Err(SolverError::Unnormalized { mass, tolerance });
        }
        Ok(())
    }

    /// Cumulative distribution at the grid points under linear interpolation
    /// of the density, normalized to end at 1.
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.len());
        out.push(0.0);
        for (t, v) in self.grid.windows(2).zip(self.values.windows(2)) {
            acc += 0.5 * (t[1] - t[0]) * (v[0] + v[1]);
            out.push(acc);
        }
        if acc > 0.0 {
            for c in &mut out {
                *c /= acc;
            }
        }
        out
    }

    /// Quantile function for the piecewise-linear density.
    pub fn quantile(&self, cdf: &[f64], u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let i = match cdf.binary_search_by(|c| c.partial_cmp(&u).unwrap()) {
            Ok(i) => return self.grid[i],
            Err(i) => i.clamp(1, self.len() - 1) - 1,
        };
        let (t0, t1) = (self.grid[i], self.grid[i + 1]);
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        let cell_mass = cdf[i + 1] - cdf[i];
        if cell_mass <= 0.0 {
            return t0;
        }
        // mass on [t0, t0 + s·h] is proportional to v0 s + (v1 − v0) s²/2
        let target = (u - cdf[i]) / cell_mass * 0.5 * (v0 + v1);
        let a = 0.5 * (v1 - v0);
        let s = if a.abs() < 1e-14 * (v0 + v1).max(1e-300) {
            target / v0.max(1e-300)
        } else {
            (-v0 + (v0 * v0 + 4.0 * a * target).max(0.0).sqrt()) / (2.0 * a)
        };
        t0 + s.clamp(0.0, 1.0) * (t1 - t0)
    }

    /// `count` equal-weight atoms at the mid-quantiles `(i + ½)/count`.
    pub fn quantile_atoms(&self, count: usize) -> Vec<Atom> {
        let cdf = self.cdf();
        (0..count)
            .map(|i| {
                let u = (i as f64 + 0.5) / count as f64;
                Atom::new(1.0 / count as f64, self.quantile(&cdf, u))
            })
            .collect()
    }

    /// CSV with header `t,density`, 17 significant digits per value.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,density")?;
        for (t, v) in self.grid.iter().zip(&self.values) {
            writeln!(out, "{t:.16e},{v:.16e}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self, SolverError> {
        let bad = |m: String| SolverError::Validation(m);
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| bad("empty density file".into()))?
            .map_err(|e| bad(e.to_string()))?;
        if header.trim() != "t,density" {
            return Err(bad(format!("expected header `t,density`, found `{}`", header.trim())));
        }
        let (mut grid, mut values) = (Vec::new(), Vec::new());
        for (no, line) in lines.enumerate() {
            let line = line.map_err(|e| bad(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let mut field = || -> Result<f64, SolverError> {
                fields
                    .next()
                    .and_then(|f| f.trim().parse().ok())
                    .ok_or_else(|| bad(format!("line {}: expected two numbers", no + 2)))
            };
            grid.push(field()?);
            values.push(field()?);
        }
        Self::new(grid, values)
    }
}

pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let points = points.max(2);
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|i| lo + step * i as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionOptions {
    pub epsilon: f64,
    /// Combine `ε` and `ε/2` as `2ρ_{ε/2} − ρ_ε` to cancel the first-order
    /// smoothing bias.
    pub richardson: bool,
}

impl Default for InversionOptions {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            richardson: false,
        }
    }
}

const CHUNK: usize = 256;

fn smoothed_density<G: CauchyTransform + ?Sized>(g: &G, grid: &[f64], epsilon: f64) -> Result<Vec<f64>, SolverError> {
    let chunks: Vec<Vec<f64>> = grid
        .par_chunks(CHUNK)
        .map(|chunk| {
            let zs: Vec<Complex64> = chunk.iter().map(|&t| Complex64::new(t, epsilon)).collect();
            let values = g.cauchy_path(&zs)?;
            Ok(values.into_iter().map(|v| -v.im / std::f64::consts::PI).collect())
        })
        .collect::<Result<_, SolverError>>()?;
    Ok(chunks.concat())
}

/// Density `−Im G(t + iε)/π` on `grid`.
///
/// Values down to [`NEGATIVE_DENSITY_LIMIT`] are clipped to zero; anything
/// more negative means `ε` is too large for the extrapolation or `G` is not a
/// Cauchy transform, and is reported as an error.
pub fn stieltjes_density<G: CauchyTransform + ?Sized>(
    g: &G,
    grid: &[f64],
    opts: &InversionOptions,
) -> Result<GridDensity, SolverError> {
    if !(opts.epsilon > 0.0) {
        return Err(SolverError::NotUpperHalfPlane(opts.epsilon));
    }
    let mut values = smoothed_density(g, grid, opts.epsilon)?;
    if opts.richardson {
        let half = smoothed_density(g, grid, 0.5 * opts.epsilon)?;
        for (v, h) in values.iter_mut().zip(half) {
            *v = 2.0 * h - *v;
        }
    }
    for (t, v) in grid.iter().zip(values.iter_mut()) {
        if *v < NEGATIVE_DENSITY_LIMIT {
            return Err(SolverError::NegativeDensity { t: *t, value: *v });
        }
        *v = v.max(0.0);
    }
    GridDensity::new(grid.to_vec(), values)
}
