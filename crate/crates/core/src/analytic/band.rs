use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::density::{stieltjes_density, GridDensity, InversionOptions};
use super::rational::{herglotz_project, CauchyTransform, FixedPoint, SolverOptions, MIN_DAMPING};
use crate::error::SolverError;

/// A linear map `η` on the diagonal algebra `ℂⁿ` (step functions on `n`
/// equal cells of `[0, 1]`).
pub trait DiagonalMap: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, g: &[Complex64], out: &mut [Complex64]);
}

/// `η(g)_i = (1/n) Σ_j σ²_{ji} g_j`, the midpoint rule for `∫ σ²(y, x) g(y) dy`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelIntegral {
    n: usize,
    kernel: Vec<f64>,
}

impl KernelIntegral {
    /// `kernel` is row-major `n × n` with nonnegative entries.
    pub fn new(n: usize, kernel: Vec<f64>) -> Result<Self, SolverError> {
        if n == 0 || kernel.len() != n * n {
            return Err(SolverError::Validation(format!(
                "kernel needs {} entries for resolution {n}, got {}",
                n * n,
                kernel.len()
            )));
        }
        if kernel.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(SolverError::Validation("kernel entries must be finite and nonnegative".into()));
        }
        Ok(Self { n, kernel })
    }
}

impl DiagonalMap for KernelIntegral {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, g: &[Complex64], out: &mut [Complex64]) {
        let scale = 1.0 / self.n as f64;
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for (j, gj) in g.iter().enumerate() {
            let row = &self.kernel[j * self.n..(j + 1) * self.n];
            for (o, s) in out.iter_mut().zip(row) {
                *o += *s * scale * *gj;
            }
        }
    }
}

/// `η(g) = v · mean(g) · 1`, the scalar-valued semicircular covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarVariance {
    pub dim: usize,
    pub variance: f64,
}

impl DiagonalMap for ScalarVariance {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, g: &[Complex64], out: &mut [Complex64]) {
        let mean = g.iter().sum::<Complex64>() / g.len() as f64;
        out.iter_mut().for_each(|o| *o = self.variance * mean);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroMap {
    pub dim: usize,
}

impl DiagonalMap for ZeroMap {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, _: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
    }
}

fn ov_residual(g: &[Complex64], eta_g: &[Complex64], x: &[f64], b: &[Complex64]) -> f64 {
    g.iter()
        .zip(eta_g)
        .zip(x.iter().zip(b))
        .map(|((g, e), (x, b))| (1.0 / g + e + x - b).norm())
        .fold(0.0, f64::max)
}

/// Solves `G = (b − η(G) − x)⁻¹` entrywise on the diagonal algebra.
pub fn operator_valued_cauchy<E: DiagonalMap + ?Sized>(
    eta: &E,
    x: &[f64],
    b: &[Complex64],
    init: Option<&[Complex64]>,
    opts: &SolverOptions,
) -> Result<FixedPoint<Vec<Complex64>>, SolverError> {
    let n = eta.dim();
    if x.len() != n || b.len() != n || init.is_some_and(|g| g.len() != n) {
        return Err(SolverError::Validation(format!(
            "diagonal elements must have length {n}"
        )));
    }
    if let Some(bad) = b.iter().find(|b| !(b.im > 0.0)) {
        return Err(SolverError::NotUpperHalfPlane(bad.im));
    }
    let mut g: Vec<Complex64> = match init {
        Some(g0) => g0.iter().map(|&v| herglotz_project(v)).collect(),
        None => b.iter().zip(x).map(|(b, x)| 1.0 / (b - x)).collect(),
    };
    let mut eta_g = vec![Complex64::new(0.0, 0.0); n];
    eta.apply(&g, &mut eta_g);
    let mut residual = ov_residual(&g, &eta_g, x, b);
    let mut candidate = vec![Complex64::new(0.0, 0.0); n];
    let mut eta_c = vec![Complex64::new(0.0, 0.0); n];
    let mut theta = opts.damping;
    let mut iterations = 0;
    while residual >= opts.tolerance {
        if iterations == opts.max_iterations {
            return Err(SolverError::NoConvergence { iterations, residual });
        }
        iterations += 1;
        for i in 0..n {
            let t = 1.0 / (b[i] - eta_g[i] - x[i]);
            candidate[i] = herglotz_project((1.0 - theta) * g[i] + theta * t);
        }
        eta.apply(&candidate, &mut eta_c);
        let next = ov_residual(&candidate, &eta_c, x, b);
        if next > residual && theta > MIN_DAMPING {
            theta *= 0.5;
            continue;
        }
        theta = (2.0 * theta).min(opts.damping);
        std::mem::swap(&mut g, &mut candidate);
        std::mem::swap(&mut eta_g, &mut eta_c);
        residual = next;
    }
    Ok(FixedPoint {
        value: g,
        iterations,
        residual,
    })
}

/// Limit model of a band matrix with variance profile `σ²` and deterministic
/// diagonal part `f`, both as step functions on `n` equal cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandModel {
    f: Vec<f64>,
    kernel: Vec<Vec<f64>>,
}

impl BandModel {
    pub fn new(f: Vec<f64>, kernel: Vec<Vec<f64>>) -> Result<Self, SolverError> {
        let n = kernel.len();
        let invalid = |m: String| Err(SolverError::Validation(m));
        if n == 0 {
            return invalid("band kernel needs resolution n ≥ 1".into());
        }
        if f.len() != n {
            return invalid(format!("f has {} cells but the kernel has {n}", f.len()));
        }
        if kernel.iter().any(|row| row.len() != n) {
            return invalid("band kernel must be square".into());
        }
        if f.iter().any(|v| !v.is_finite()) {
            return invalid("f must be finite".into());
        }
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (kernel[i][j], kernel[j][i]);
                if !(a.is_finite() && a >= 0.0) {
                    return invalid(format!("kernel entry ({i},{j}) must be finite and nonnegative"));
                }
                if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                    return invalid(format!("kernel is not symmetric at ({i},{j})"));
                }
            }
        }
        Ok(Self { f, kernel })
    }

    /// Constant kernel `σ² ≡ v`, `f ≡ 0`.
    pub fn constant(n: usize, v: f64) -> Result<Self, SolverError> {
        Self::new(vec![0.0; n], vec![vec![v; n]; n])
    }

    pub fn resolution(&self) -> usize {
        self.f.len()
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn kernel(&self) -> &[Vec<f64>] {
        &self.kernel
    }

    fn cell(&self, x: f64) -> usize {
        let n = self.resolution();
        ((x * n as f64).floor().max(0.0) as usize).min(n - 1)
    }

    /// `σ²(x, y)` as a step function.
    pub fn variance_at(&self, x: f64, y: f64) -> f64 {
        self.kernel[self.cell(x)][self.cell(y)]
    }

    pub fn f_at(&self, x: f64) -> f64 {
        self.f[self.cell(x)]
    }

    pub fn kernel_map(&self) -> KernelIntegral {
        let flat = self.kernel.iter().flatten().copied().collect();
        KernelIntegral::new(self.resolution(), flat).expect("validated kernel")
    }

    /// Interval containing the limiting spectrum.
    pub fn support_bound(&self) -> (f64, f64) {
        let n = self.resolution() as f64;
        let row_max = self
            .kernel
            .iter()
            .map(|row| row.iter().sum::<f64>() / n)
            .fold(0.0, f64::max);
        let radius = 2.0 * row_max.sqrt();
        let lo = self.f.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo - radius, hi + radius)
    }
}

/// `G(z) = mean_i g_i(z)` for a [`BandModel`], warm-started along paths.
#[derive(Debug, Clone)]
pub struct BandSolver {
    model: BandModel,
    eta: KernelIntegral,
    pub options: SolverOptions,
}

impl BandSolver {
    pub fn new(model: BandModel) -> Self {
        let eta = model.kernel_map();
        Self {
            model,
            eta,
            options: SolverOptions::default(),
        }
    }

    pub fn model(&self) -> &BandModel {
        &self.model
    }

    pub fn solve(&self, z: Complex64, init: Option<&[Complex64]>) -> Result<FixedPoint<Vec<Complex64>>, SolverError> {
        let b = vec![z; self.model.resolution()];
        operator_valued_cauchy(&self.eta, &self.model.f, &b, init, &self.options)
    }
}

fn mean(g: &[Complex64]) -> Complex64 {
    g.iter().sum::<Complex64>() / g.len() as f64
}

impl CauchyTransform for BandSolver {
    fn cauchy(&self, z: Complex64) -> Result<Complex64, SolverError> {
        if z.im < 0.0 {
            return self.cauchy(z.conj()).map(|g| g.conj());
        }
        Ok(mean(&self.solve(z, None)?.value))
    }

    fn cauchy_path(&self, zs: &[Complex64]) -> Result<Vec<Complex64>, SolverError> {
        let mut prev: Option<Vec<Complex64>> = None;
        let mut out = Vec::with_capacity(zs.len());
        for &z in zs {
            if z.im < 0.0 {
                out.push(self.cauchy(z)?);
                continue;
            }
            let g = self.solve(z, prev.as_deref())?.value;
            out.push(mean(&g));
            prev = Some(g);
        }
        Ok(out)
    }
}

/// Limiting spectral density of a band model on `grid`.
pub fn band_spectrum(model: &BandModel, grid: &[f64], opts: &InversionOptions) -> Result<GridDensity, SolverError> {
    stieltjes_density(&BandSolver::new(model.clone()), grid, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::rational::{cauchy_fixed_point, RationalR};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_map_gives_resolvent() {
        let x = [-1.0, 0.5, 2.0];
        let b = [c(0.3, 0.2), c(1.0, 1.0), c(-2.0, 0.01)];
        let g = operator_valued_cauchy(&ZeroMap { dim: 3 }, &x, &b, None, &SolverOptions::default()).unwrap();
        assert_eq!(g.iterations, 0);
        for i in 0..3 {
            assert_eq!(g.value[i], 1.0 / (b[i] - x[i]));
        }
    }

    #[test]
    fn one_cell_reduces_to_semicircle() {
        let z = c(0.7, 0.05);
        let eta = ScalarVariance { dim: 1, variance: 1.0 };
        let g = operator_valued_cauchy(&eta, &[0.0], &[z], None, &SolverOptions::default()).unwrap();
        let scalar = cauchy_fixed_point(&RationalR::semicircle(1.0).unwrap(), z, &SolverOptions::default()).unwrap();
        assert!((g.value[0] - scalar.value).norm() < 1e-9);
    }

    #[test]
    fn constant_kernel_matches_semicircle() {
        let solver = BandSolver::new(BandModel::constant(8, 1.0).unwrap());
        let r = RationalR::semicircle(1.0).unwrap();
        for t in [-2.5, -1.0, 0.0, 1.3, 1.99] {
            let z = c(t, 1e-2);
            let band = solver.cauchy(z).unwrap();
            let scalar = cauchy_fixed_point(&r, z, &SolverOptions::default()).unwrap().value;
            assert!((band - scalar).norm() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn validation() {
        assert!(BandModel::new(vec![0.0, 0.0], vec![vec![1.0, 2.0], vec![1.0, 1.0]]).is_err());
        assert!(BandModel::new(vec![0.0, 0.0], vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).is_err());
        assert!(BandModel::new(vec![0.0], vec![vec![1.0, 1.0]]).is_err());
        assert!(KernelIntegral::new(2, vec![1.0; 3]).is_err());
        let eta = ZeroMap { dim: 1 };
        assert!(operator_valued_cauchy(&eta, &[0.0], &[c(0.0, -1.0)], None, &SolverOptions::default()).is_err());
        assert!(operator_valued_cauchy(&eta, &[0.0, 1.0], &[c(0.0, 1.0)], None, &SolverOptions::default()).is_err());
    }

    #[test]
    fn step_lookup() {
        let m = BandModel::new(vec![1.0, -1.0], vec![vec![0.5, 1.0], vec![1.0, 2.0]]).unwrap();
        assert_eq!(m.variance_at(0.1, 0.9), 1.0);
        assert_eq!(m.variance_at(0.9, 0.9), 2.0);
        assert_eq!(m.f_at(1.0), -1.0);
    }
}
