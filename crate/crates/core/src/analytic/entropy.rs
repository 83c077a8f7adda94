use super::density::{GridDensity, DEFAULT_MASS_TOLERANCE};
use crate::error::SolverError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyOptions {
    /// Midpoint nodes in quantile space for the second scheme.
    pub quantile_nodes: usize,
    /// `max density × grid width` beyond which the input counts as atomic.
    pub divergence_ratio: f64,
    pub mass_tolerance: f64,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        Self {
            quantile_nodes: 2048,
            divergence_ratio: 1e3,
            mass_tolerance: DEFAULT_MASS_TOLERANCE,
        }
    }
}

/// One-variable free entropy by two independent quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyEstimate {
    /// Pairwise exact log integrals over piecewise-constant cells.
    pub cells: f64,
    /// Midpoint rule in quantile space with exact local log corrections.
    pub quantile: f64,
}

impl EntropyEstimate {
    pub fn value(&self) -> f64 {
        self.cells
    }

    pub fn disagreement(&self) -> f64 {
        (self.cells - self.quantile).abs()
    }
}

/// `3/4 + ½ log 2π`.
pub fn entropy_constant() -> f64 {
    0.75 + 0.5 * (2.0 * std::f64::consts::PI).ln()
}

/// Second antiderivative of `log|u|`.
fn log_f2(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        0.5 * u * u * u.abs().ln() - 0.75 * u * u
    }
}

/// `∫_a^b ∫_c^d log|s − t| dt ds`.
fn log_rectangle(a: f64, b: f64, c: f64, d: f64) -> f64 {
    log_f2(b - c) - log_f2(a - c) - log_f2(b - d) + log_f2(a - d)
}

fn cell_scheme(density: &GridDensity) -> f64 {
    let grid = density.grid();
    let values = density.values();
    let mass = density.mass();
    let cells: Vec<(f64, f64, f64)> = grid
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| (t[0], t[1], 0.5 * (t[1] - t[0]) * (v[0] + v[1]) / mass))
        .filter(|c| c.2 > 0.0)
        .collect();
    let mut total = 0.0;
    for (i, &(a, b, p)) in cells.iter().enumerate() {
        let ci = p / (b - a);
        total += ci * ci * log_rectangle(a, b, a, b);
        for &(c, d, q) in &cells[i + 1..] {
            total += 2.0 * ci * (q / (d - c)) * log_rectangle(a, b, c, d);
        }
    }
    total
}

fn quantile_scheme(density: &GridDensity, nodes: usize) -> f64 {
    let m = nodes.max(2);
    let h = 1.0 / m as f64;
    let cdf = density.cdf();
    let q: Vec<f64> = (0..=2 * m).map(|k| density.quantile(&cdf, k as f64 * 0.5 * h)).collect();
    let mid = |i: usize| q[2 * i + 1];
    // offsets: exact ∫∫ log|u − v| over unit cells k apart, minus log k
    let correction: Vec<f64> = (0..m)
        .map(|k| {
            let k = k as f64;
            let exact = log_rectangle(0.0, 1.0, k, k + 1.0);
            if k == 0.0 {
                exact
            } else {
                exact - k.ln()
            }
        })
        .collect();
    let mut total = 0.0;
    for i in 0..m {
        let slope = (q[2 * i + 2] - q[2 * i]) / h;
        total += (slope.ln() + h.ln() + correction[0]) * h * h;
        let qi = mid(i);
        for (j, corr) in (i + 1..m).zip(&correction[1..]) {
            total += 2.0 * ((mid(j) - qi).ln() + corr) * h * h;
        }
    }
    total
}

/// `χ(μ) = ∬ log|s − t| dμ(s) dμ(t) + 3/4 + ½ log 2π` for a density on a grid.
///
/// Densities that look atomic relative to the grid width give
/// [`SolverError::Divergent`] at the location of the peak.
pub fn free_entropy_1d(density: &GridDensity, opts: &EntropyOptions) -> Result<EntropyEstimate, SolverError> {
    density.check_normalized(opts.mass_tolerance)?;
    let grid = density.grid();
    let width = grid[grid.len() - 1] - grid[0];
    let (peak, rho_max) = density
        .values()
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    if rho_max * width / density.mass() >= opts.divergence_ratio {
        return Err(SolverError::Divergent { t: grid[peak] });
    }
    let estimate = EntropyEstimate {
        cells: cell_scheme(density) + entropy_constant(),
        quantile: quantile_scheme(density, opts.quantile_nodes) + entropy_constant(),
    };
    if !(estimate.cells.is_finite() && estimate.quantile.is_finite()) {
        return Err(SolverError::Divergent { t: grid[peak] });
    }
    Ok(estimate)
}
