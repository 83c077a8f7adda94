//! Cauchy transforms on the upper half-plane, Stieltjes inversion, the
//! operator-valued band equation and one-variable free entropy.

mod band;
mod density;
mod entropy;
mod rational;

pub use band::{
    band_spectrum, operator_valued_cauchy, BandModel, BandSolver, DiagonalMap, KernelIntegral, ScalarVariance, ZeroMap,
};
pub use density::{
    stieltjes_density, uniform_grid, GridDensity, InversionOptions, DEFAULT_MASS_TOLERANCE, NEGATIVE_DENSITY_LIMIT,
};
pub use entropy::{entropy_constant, free_entropy_1d, EntropyEstimate, EntropyOptions};
pub use rational::{
    cauchy_fixed_point, cauchy_fixed_point_from, Atom, CauchyTransform, FixedPoint, PoissonProduct, RationalR,
    RationalSolver, SolverOptions,
};
