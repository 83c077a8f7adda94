use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cumulants::{moments_from_cumulants, CumulantSequence, MomentSequence};
use crate::error::SolverError;

/// Iteration controls shared by the scalar and operator-valued solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Initial damping `θ` in `G ← (1 − θ)G + θ T(G)`; halved whenever a step
    /// increases the residual.
    pub damping: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 10_000,
            damping: 0.5,
        }
    }
}

pub(crate) const MIN_DAMPING: f64 = 1.0 / 64.0;

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint<V> {
    pub value: V,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub weight: f64,
    pub location: f64,
}

impl Atom {
    pub fn new(weight: f64, location: f64) -> Self {
        Self { weight, location }
    }
}

/// R-transform of semicircular plus compound free Poisson type,
/// `R(z) = c + σ² z + λ Σ_i w_i x_i / (1 − x_i z)`, with a finite jump law
/// `Σ_i w_i δ_{x_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalR {
    variance: f64,
    rate: f64,
    atoms: Vec<Atom>,
    shift: f64,
}

impl RationalR {
    pub fn new(variance: f64, rate: f64, atoms: Vec<Atom>, shift: f64) -> Result<Self, SolverError> {
        let invalid = |m: &str| Err(SolverError::Validation(m.to_string()));
        if !(variance.is_finite() && variance >= 0.0) {
            return invalid("semicircular variance must be finite and nonnegative");
        }
        if !(rate.is_finite() && rate >= 0.0) {
            return invalid("rate must be finite and nonnegative");
        }
        if !shift.is_finite() {
            return invalid("shift must be finite");
        }
        if atoms
            .iter()
            .any(|a| !(a.weight.is_finite() && a.weight >= 0.0 && a.location.is_finite()))
        {
            return invalid("atoms need finite locations and nonnegative weights");
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if rate > 0.0 && (total - 1.0).abs() > 1e-9 {
            return invalid("jump weights must sum to 1");
        }
        let atoms = if rate > 0.0 { atoms } else { Vec::new() };
        Ok(Self {
            variance,
            rate,
            atoms,
            shift,
        })
    }

    pub fn semicircle(variance: f64) -> Result<Self, SolverError> {
        Self::new(variance, 0.0, Vec::new(), 0.0)
    }

    pub fn point(c: f64) -> Result<Self, SolverError> {
        Self::new(0.0, 0.0, Vec::new(), c)
    }

    pub fn free_poisson(rate: f64) -> Result<Self, SolverError> {
        Self::new(0.0, rate, vec![Atom::new(1.0, 1.0)], 0.0)
    }

    pub fn compound_free_poisson(rate: f64, atoms: Vec<Atom>) -> Result<Self, SolverError> {
        Self::new(0.0, rate, atoms, 0.0)
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// R-transform of the free additive convolution.
    pub fn plus(&self, other: &Self) -> Self {
        let rate = self.rate + other.rate;
        let mut atoms = Vec::new();
        if rate > 0.0 {
            for (part, share) in [(self, self.rate / rate), (other, other.rate / rate)] {
                atoms.extend(
                    part.atoms
                        .iter()
                        .map(|a| Atom::new(a.weight * share, a.location)),
                );
            }
        }
        Self {
            variance: self.variance + other.variance,
            rate,
            atoms,
            shift: self.shift + other.shift,
        }
    }

    pub fn eval(&self, g: Complex64) -> Complex64 {
        let jumps: Complex64 = self
            .atoms
            .iter()
            .map(|a| a.weight * a.location / (1.0 - a.location * g))
            .sum();
        self.shift + self.variance * g + self.rate * jumps
    }

    /// `κ_1 = c + λ m_1(ν)`, `κ_2 = σ² + λ m_2(ν)`, `κ_n = λ m_n(ν)`.
    pub fn cumulants(&self, order: usize) -> CumulantSequence<f64> {
        let values = (1..=order.max(1))
            .map(|n| {
                let jump: f64 = self
                    .atoms
                    .iter()
                    .map(|a| a.weight * a.location.powi(n as i32))
                    .sum();
                let mut k = self.rate * jump;
                if n == 1 {
                    k += self.shift;
                }
                if n == 2 {
                    k += self.variance;
                }
                k
            })
            .collect();
        CumulantSequence::new(values).expect("finite cumulants")
    }

    pub fn moments(&self, order: usize) -> MomentSequence<f64> {
        moments_from_cumulants(&self.cumulants(order))
    }

    /// Interval containing the support, from operator-norm bounds of each
    /// free summand.
    pub fn support_bound(&self) -> (f64, f64) {
        let spread = (1.0 + self.rate.sqrt()).powi(2);
        let (mut lo, mut hi) = (0.0f64, 0.0f64);
        if self.rate > 0.0 {
            for a in &self.atoms {
                lo = lo.min(a.location * spread);
                hi = hi.max(a.location * spread);
            }
        }
        let radius = 2.0 * self.variance.sqrt();
        (self.shift + lo - radius, self.shift + hi + radius)
    }

    pub fn derivative(&self, g: Complex64) -> Complex64 {
        let jumps: Complex64 = self
            .atoms
            .iter()
            .map(|a| a.weight * a.location * a.location / ((1.0 - a.location * g) * (1.0 - a.location * g)))
            .sum();
        self.variance + self.rate * jumps
    }

    pub fn residual(&self, g: Complex64, z: Complex64) -> f64 {
        (1.0 / g + self.eval(g) - z).norm()
    }
}

/// Keeps an iterate in the closed lower half-plane.
pub(crate) fn herglotz_project(g: Complex64) -> Complex64 {
    Complex64::new(g.re, g.im.min(0.0))
}

/// Cauchy transform `G(z)` for `Im z > 0` from the fixed point
/// `G = 1/(z − R(G))`, started at `1/z`. Values for `Im z < 0` follow from
/// `G(z̄) = conj G(z)`.
pub fn cauchy_fixed_point(r: &RationalR, z: Complex64, opts: &SolverOptions) -> Result<FixedPoint<Complex64>, SolverError> {
    cauchy_fixed_point_from(r, z, 1.0 / z, opts)
}

/// As [`cauchy_fixed_point`], warm-started at `init`.
pub fn cauchy_fixed_point_from(
    r: &RationalR,
    z: Complex64,
    init: Complex64,
    opts: &SolverOptions,
) -> Result<FixedPoint<Complex64>, SolverError> {
    if z.im < 0.0 {
        let mut fp = cauchy_fixed_point_from(r, z.conj(), init.conj(), opts)?;
        fp.value = fp.value.conj();
        return Ok(fp);
    }
    if z.im <= 0.0 || !z.im.is_finite() {
        return Err(SolverError::NotUpperHalfPlane(z.im));
    }
    let mut g = herglotz_project(init);
    if !(g.re.is_finite() && g.im.is_finite()) || g.norm() == 0.0 {
        g = 1.0 / z;
    }
    let mut theta = opts.damping;
    let mut residual = r.residual(g, z);
    let mut iterations = 0;
    while residual >= opts.tolerance {
        if iterations == opts.max_iterations {
            return Err(SolverError::NoConvergence { iterations, residual });
        }
        iterations += 1;
        let mut candidate = herglotz_project((1.0 - theta) * g + theta / (z - r.eval(g)));
        let mut next = r.residual(candidate, z);
        // Newton on 1/G + R(G) − z, kept only when it beats the damped step
        let newton = g - (1.0 / g + r.eval(g) - z) / (r.derivative(g) - 1.0 / (g * g));
        if newton.im < 0.0 && (newton - g).norm() <= 0.5 * g.norm() {
            let newton_residual = r.residual(newton, z);
            if newton_residual < next {
                candidate = newton;
                next = newton_residual;
            }
        }
        if next > residual && theta > MIN_DAMPING {
            theta *= 0.5;
            continue;
        }
        theta = (2.0 * theta).min(opts.damping);
        g = candidate;
        residual = next;
    }
    Ok(FixedPoint {
        value: g,
        iterations,
        residual,
    })
}

/// Anything that can evaluate a Cauchy transform on the upper half-plane.
pub trait CauchyTransform: Sync {
    fn cauchy(&self, z: Complex64) -> Result<Complex64, SolverError>;

    /// Evaluates along a path of nearby points; implementations may warm-start
    /// each evaluation from the previous one.
    fn cauchy_path(&self, zs: &[Complex64]) -> Result<Vec<Complex64>, SolverError> {
        zs.iter().map(|&z| self.cauchy(z)).collect()
    }
}

impl<F> CauchyTransform for F
where
    F: Fn(Complex64) -> Result<Complex64, SolverError> + Sync,
{
    fn cauchy(&self, z: Complex64) -> Result<Complex64, SolverError> {
        self(z)
    }
}

/// Fixed-point evaluator for a [`RationalR`].
#[derive(Debug, Clone)]
pub struct RationalSolver {
    pub r: RationalR,
    pub options: SolverOptions,
}

impl RationalSolver {
    pub fn new(r: RationalR) -> Self {
        Self {
            r,
            options: SolverOptions::default(),
        }
    }
}

impl CauchyTransform for RationalSolver {
    fn cauchy(&self, z: Complex64) -> Result<Complex64, SolverError> {
        cauchy_fixed_point(&self.r, z, &self.options).map(|fp| fp.value)
    }

    fn cauchy_path(&self, zs: &[Complex64]) -> Result<Vec<Complex64>, SolverError> {
        let mut out = Vec::with_capacity(zs.len());
        let mut prev: Option<Complex64> = None;
        for &z in zs {
            let init = prev.unwrap_or(1.0 / z);
            let g = cauchy_fixed_point_from(&self.r, z, init, &self.options)?.value;
            prev = Some(g);
            out.push(g);
        }
        Ok(out)
    }
}

/// Cauchy transform of `FP(λ) ⊠ ν` for a finitely supported `ν`.
///
/// Writing the free Poisson factor as a Wishart matrix `X X*` with an
/// `N × λN` Gaussian `X`, the product has the nonzero spectrum of `X* A X`,
/// a dilated compound free Poisson matrix. Hence
/// `μ_{FP(λ)⊠ν} = λ π_{1/λ, D_λ ν} + (1 − λ) δ_0` and
/// `G(z) = λ G_c(z) + (1 − λ)/z`, where `G_c` comes from the additive
/// fixed-point solver.
#[derive(Debug, Clone)]
pub struct PoissonProduct {
    rate: f64,
    compound: RationalSolver,
}

impl PoissonProduct {
    pub fn new(rate: f64, jump: &[Atom], options: SolverOptions) -> Result<Self, SolverError> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(SolverError::Validation("free Poisson rate must be positive".into()));
        }
        let dilated = jump
            .iter()
            .map(|a| Atom::new(a.weight, a.location * rate))
            .collect();
        let compound = RationalR::compound_free_poisson(1.0 / rate, dilated)?;
        Ok(Self {
            rate,
            compound: RationalSolver {
                r: compound,
                options,
            },
        })
    }

    pub fn compound(&self) -> &RationalR {
        &self.compound.r
    }

    pub fn support_bound(&self) -> (f64, f64) {
        self.compound.r.support_bound()
    }

    fn combine(&self, z: Complex64, gc: Complex64) -> Complex64 {
        self.rate * gc + (1.0 - self.rate) / z
    }
}

impl CauchyTransform for PoissonProduct {
    fn cauchy(&self, z: Complex64) -> Result<Complex64, SolverError> {
        Ok(self.combine(z, self.compound.cauchy(z)?))
    }

    fn cauchy_path(&self, zs: &[Complex64]) -> Result<Vec<Complex64>, SolverError> {
        let inner = self.compound.cauchy_path(zs)?;
        Ok(zs.iter().zip(inner).map(|(&z, g)| self.combine(z, g)).collect())
    }
}
