//! Free additive and multiplicative convolution of spectral distributions.
//!
//! Results are produced along independent routes that can be checked against
//! each other:
//!
//! * combinatorially, through free cumulants summed over non-crossing
//!   partitions ([`partitions`], [`cumulants`], [`transforms`]);
//! * analytically, through fixed points of the Cauchy transform on the upper
//!   half-plane and Stieltjes inversion ([`analytic`]);
//! * on a truncated full Fock space, where creation and annihilation
//!   operators realize free variables exactly ([`fock`]);
//! * by Monte Carlo sampling of random matrices ([`rmt`]).

pub mod analytic;
pub mod cumulants;
pub mod error;
pub mod fock;
pub mod partitions;
pub mod rmt;
pub mod scalar;
pub mod series;
pub mod transforms;

pub use cumulants::{CumulantSequence, FreeFamily, MomentSequence};
pub use error::{CumulantError, FockError, PartitionError, RmtError, SeriesError, SolverError};
pub use num_complex::Complex64;
pub use partitions::{ColoredWord, NCPartition, SetPartition};
pub use scalar::{Rational, Scalar};
pub use series::TruncatedSeries;
