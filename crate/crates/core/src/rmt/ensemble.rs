use std::sync::Once;

use faer::{c64, Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::analytic::BandModel;
use crate::cumulants::MomentSequence;
use crate::error::RmtError;

/// Generator for task `stream` of a master `seed`.
pub fn task_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

static SEQUENTIAL: Once = Once::new();

/// Dense kernels run single-threaded so that results do not depend on the
/// thread count; parallelism happens across independent samples instead.
pub(crate) fn sequential_kernels() {
    SEQUENTIAL.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryLaw {
    Gaussian,
    Rademacher,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EnsembleKind {
    /// Complex Hermitian Gaussian matrix with semicircular limit on `[−2, 2]`.
    GaussianHermitian,
    /// Real symmetric Wigner matrix with the given off-diagonal law and
    /// Gaussian diagonal, entries of variance `1/N`.
    WignerGeneric { law: EntryLaw },
    /// `X T X*` with `X` of shape `N × round(ratio·N)`, complex Gaussian
    /// entries of variance `1/N`, and `T` diagonal with `jump` repeated
    /// cyclically (identity if empty).
    Wishart { ratio: f64, jump: Vec<f64> },
    /// `U B U*` with `U` Haar unitary and `B` diagonal with `diagonal`
    /// repeated cyclically.
    HaarConjugated { diagonal: Vec<f64> },
    DeterministicDiagonal { diagonal: Vec<f64> },
    /// Real symmetric band matrix: entry variance `σ²(x_i, x_j)/N` at cell
    /// midpoints `x_i = (i + ½)/N`, plus `f(x_i)` on the diagonal.
    Band { model: BandModel },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub size: usize,
    pub seed: u64,
    #[serde(default)]
    pub stream: u64,
}

/// A sampled self-adjoint matrix.
#[derive(Debug, Clone)]
pub enum SelfAdjoint {
    Real(Mat<f64>),
    Complex(Mat<c64>),
}

impl SelfAdjoint {
    pub fn dim(&self) -> usize {
        match self {
            Self::Real(m) => m.nrows(),
            Self::Complex(m) => m.nrows(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::Real(Mat::identity(n, n))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::Real(Mat::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 }))
    }

    pub fn to_complex(&self) -> Mat<c64> {
        match self {
            Self::Real(m) => Mat::from_fn(m.nrows(), m.ncols(), |i, j| c64::new(m[(i, j)], 0.0)),
            Self::Complex(m) => m.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, RmtError> {
        if self.dim() != other.dim() {
            return Err(RmtError::Dimension(self.dim(), other.dim()));
        }
        Ok(match (self, other) {
            (Self::Real(a), Self::Real(b)) => Self::Real(a + b),
            _ => Self::Complex(self.to_complex() + other.to_complex()),
        })
    }

    /// Eigenvalues in nondecreasing order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>, RmtError> {
        sequential_kernels();
        let mut ev = match self {
            Self::Real(m) => m.self_adjoint_eigenvalues(Side::Lower),
            Self::Complex(m) => m.self_adjoint_eigenvalues(Side::Lower),
        }
        .map_err(|_| RmtError::Eigen)?;
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }
}

/// Eigenvalues of a sampled matrix, sorted, with the seed that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSample {
    pub eigenvalues: Vec<f64>,
    pub n: usize,
    pub seed: u64,
}

impl SpectralSample {
    pub fn new(mut eigenvalues: Vec<f64>, seed: u64) -> Result<Self, RmtError> {
        if eigenvalues.is_empty() || eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(RmtError::Validation("spectrum must be nonempty and finite".into()));
        }
        eigenvalues.sort_by(f64::total_cmp);
        let n = eigenvalues.len();
        Ok(Self { eigenvalues, n, seed })
    }

    pub fn from_matrix(m: &SelfAdjoint, seed: u64) -> Result<Self, RmtError> {
        Self::new(m.eigenvalues()?, seed)
    }
}

/// `m_j = (1/N) Σ λ_i^j` for `j = 1..=k`.
pub fn empirical_moments(s: &SpectralSample, k: usize) -> MomentSequence<f64> {
    let k = k.max(1);
    let mut sums = vec![0.0; k];
    for &lambda in &s.eigenvalues {
        let mut p = 1.0;
        for sum in sums.iter_mut() {
            p *= lambda;
            *sum += p;
        }
    }
    let n = s.eigenvalues.len() as f64;
    MomentSequence::new(sums.into_iter().map(|v| v / n).collect()).expect("finite spectrum")
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn complex_normal(rng: &mut ChaCha8Rng) -> c64 {
    let (a, b) = (normal(rng), normal(rng));
    c64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
}

fn cycle(pattern: &[f64], n: usize) -> Vec<f64> {
    (0..n).map(|i| pattern[i % pattern.len()]).collect()
}

/// Upper triangle drawn row by row, then mirrored.
fn symmetric_fill<T: Copy>(n: usize, mut entry: impl FnMut(usize, usize) -> T, conj: impl Fn(T) -> T, zero: T) -> Vec<T> {
    let mut data = vec![zero; n * n];
    for i in 0..n {
        for j in i..n {
            let v = entry(i, j);
            data[i * n + j] = v;
            data[j * n + i] = if i == j { v } else { conj(v) };
        }
    }
    data
}

fn gaussian_hermitian(n: usize, rng: &mut ChaCha8Rng) -> Mat<c64> {
    let scale = 1.0 / (n as f64).sqrt();
    let data = symmetric_fill(
        n,
        |i, j| {
            if i == j {
                c64::new(normal(rng) * scale, 0.0)
            } else {
                complex_normal(rng) * scale
            }
        },
        |v: c64| v.conj(),
        c64::new(0.0, 0.0),
    );
    Mat::from_fn(n, n, |i, j| data[i * n + j])
}

fn wigner(n: usize, law: EntryLaw, rng: &mut ChaCha8Rng) -> Mat<f64> {
    let scale = 1.0 / (n as f64).sqrt();
    let data = symmetric_fill(
        n,
        |i, j| {
            let x = if i == j {
                normal(rng)
            } else {
                match law {
                    EntryLaw::Gaussian => normal(rng),
                    EntryLaw::Rademacher => {
                        if rng.random_bool(0.5) {
                            1.0
                        } else {
                            -1.0
                        }
                    }
                }
            };
            x * scale
        },
        |v| v,
        0.0,
    );
    Mat::from_fn(n, n, |i, j| data[i * n + j])
}

fn wishart(n: usize, ratio: f64, jump: &[f64], rng: &mut ChaCha8Rng) -> Result<Mat<c64>, RmtError> {
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(RmtError::Validation("wishart ratio must be positive".into()));
    }
    if jump.iter().any(|v| !v.is_finite()) {
        return Err(RmtError::Validation("wishart jump pattern must be finite".into()));
    }
    let p = ((ratio * n as f64).round() as usize).max(1);
    let scale = 1.0 / (n as f64).sqrt();
    let x = Mat::<c64>::from_fn(n, p, |_, _| complex_normal(rng) * scale);
    let t = if jump.is_empty() { vec![1.0; p] } else { cycle(jump, p) };
    let xt = Mat::<c64>::from_fn(n, p, |i, j| x[(i, j)] * t[j]);
    let w = &xt * x.adjoint();
    Ok(hermitize(w))
}

/// Averages `M` with `M*` to remove rounding asymmetry.
fn hermitize(m: Mat<c64>) -> Mat<c64> {
    let n = m.nrows();
    Mat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

/// Haar unitary from the QR decomposition of a complex Ginibre matrix with
/// the phases of `diag R` moved into `Q`.
pub fn haar_unitary(n: usize, rng: &mut ChaCha8Rng) -> Mat<c64> {
    sequential_kernels();
    let g = Mat::<c64>::from_fn(n, n, |_, _| complex_normal(rng));
    let qr = g.qr();
    let q = qr.compute_Q();
    let r = qr.R();
    let phases: Vec<c64> = (0..n)
        .map(|i| {
            let d = r[(i, i)];
            let norm = d.norm();
            if norm > 0.0 {
                d / norm
            } else {
                c64::new(1.0, 0.0)
            }
        })
        .collect();
    Mat::from_fn(n, n, |i, j| q[(i, j)] * phases[j])
}

fn haar_conjugated(diagonal: &[f64], n: usize, rng: &mut ChaCha8Rng) -> Mat<c64> {
    let d = cycle(diagonal, n);
    let u = haar_unitary(n, rng);
    let ud = Mat::<c64>::from_fn(n, n, |i, j| u[(i, j)] * d[j]);
    hermitize(&ud * u.adjoint())
}

fn band(model: &BandModel, n: usize, rng: &mut ChaCha8Rng) -> Mat<f64> {
    let scale = 1.0 / n as f64;
    let x: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
    let data = symmetric_fill(
        n,
        |i, j| {
            let sd = (model.variance_at(x[i], x[j]) * scale).sqrt();
            let v = normal(rng) * sd;
            if i == j {
                v + model.f_at(x[i])
            } else {
                v
            }
        },
        |v| v,
        0.0,
    );
    Mat::from_fn(n, n, |i, j| data[i * n + j])
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, size: usize, seed: u64) -> Self {
        Self {
            kind,
            size,
            seed,
            stream: 0,
        }
    }

    pub fn with_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn validate(&self) -> Result<(), RmtError> {
        if self.size == 0 {
            return Err(RmtError::Validation("matrix size must be at least 1".into()));
        }
        match &self.kind {
            EnsembleKind::Wishart { ratio, .. } if !(ratio.is_finite() && *ratio > 0.0) => {
                Err(RmtError::Validation("wishart ratio must be positive".into()))
            }
            EnsembleKind::HaarConjugated { diagonal } | EnsembleKind::DeterministicDiagonal { diagonal }
                if diagonal.is_empty() || diagonal.iter().any(|v| !v.is_finite()) =>
            {
                Err(RmtError::Validation("diagonal pattern must be nonempty and finite".into()))
            }
            _ => Ok(()),
        }
    }

    /// Draws the matrix; identical specs give bit-identical matrices.
    pub fn sample(&self) -> Result<SelfAdjoint, RmtError> {
        self.validate()?;
        sequential_kernels();
        let n = self.size;
        let mut rng = task_rng(self.seed, self.stream);
        Ok(match &self.kind {
            EnsembleKind::GaussianHermitian => SelfAdjoint::Complex(gaussian_hermitian(n, &mut rng)),
            EnsembleKind::WignerGeneric { law } => SelfAdjoint::Real(wigner(n, *law, &mut rng)),
            EnsembleKind::Wishart { ratio, jump } => SelfAdjoint::Complex(wishart(n, *ratio, jump, &mut rng)?),
            EnsembleKind::HaarConjugated { diagonal } => SelfAdjoint::Complex(haar_conjugated(diagonal, n, &mut rng)),
            EnsembleKind::DeterministicDiagonal { diagonal } => SelfAdjoint::diagonal(&cycle(diagonal, n)),
            EnsembleKind::Band { model } => SelfAdjoint::Real(band(model, n, &mut rng)),
        })
    }

    pub fn spectrum(&self) -> Result<SpectralSample, RmtError> {
        SpectralSample::from_matrix(&self.sample()?, self.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible() {
        let spec = EnsembleSpec::new(EnsembleKind::GaussianHermitian, 40, 3);
        assert_eq!(spec.spectrum().unwrap(), spec.spectrum().unwrap());
        let other = spec.clone().with_stream(1).spectrum().unwrap();
        assert_ne!(spec.spectrum().unwrap().eigenvalues, other.eigenvalues);
    }

    #[test]
    fn identity_moments() {
        let s = SpectralSample::from_matrix(&SelfAdjoint::identity(5), 0).unwrap();
        assert_eq!(empirical_moments(&s, 4).as_slice(), &[1.0; 4]);
    }

    #[test]
    fn gue_second_moment() {
        let s = EnsembleSpec::new(EnsembleKind::GaussianHermitian, 400, 1).spectrum().unwrap();
        let m = empirical_moments(&s, 4);
        assert!((m.moment(2) - 1.0).abs() < 0.05);
        assert!((m.moment(4) - 2.0).abs() < 0.15);
    }

    #[test]
    fn haar_is_unitary_and_preserves_spectrum() {
        let mut rng = task_rng(5, 0);
        let u = haar_unitary(30, &mut rng);
        let uu = &u * u.adjoint();
        for i in 0..30 {
            for j in 0..30 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((uu[(i, j)] - c64::new(e, 0.0)).norm() < 1e-12);
            }
        }
        let spec = EnsembleSpec::new(
            EnsembleKind::HaarConjugated {
                diagonal: vec![1.0, -1.0],
            },
            30,
            9,
        );
        let ev = spec.spectrum().unwrap().eigenvalues;
        for (k, v) in ev.iter().enumerate() {
            let e = if k < 15 { -1.0 } else { 1.0 };
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn wishart_identity_is_free_poisson() {
        let kind = EnsembleKind::Wishart {
            ratio: 1.0,
            jump: vec![],
        };
        let m = empirical_moments(&EnsembleSpec::new(kind, 400, 2).spectrum().unwrap(), 3);
        for (got, want) in m.as_slice().iter().zip([1.0, 2.0, 5.0]) {
            assert!((got - want).abs() / want < 0.05, "{got} vs {want}");
        }
    }

    #[test]
    fn validation() {
        let bad = EnsembleSpec::new(
            EnsembleKind::Wishart {
                ratio: 0.0,
                jump: vec![],
            },
            10,
            0,
        );
        assert!(matches!(bad.sample(), Err(RmtError::Validation(_))));
        assert!(EnsembleSpec::new(EnsembleKind::GaussianHermitian, 0, 0).sample().is_err());
        assert!(SelfAdjoint::identity(2).add(&SelfAdjoint::identity(3)).is_err());
    }

    #[test]
    fn spec_json_roundtrip() {
        let spec = EnsembleSpec::new(
            EnsembleKind::WignerGeneric {
                law: EntryLaw::Rademacher,
            },
            8,
            1,
        );
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"kind\":\"wigner-generic\""));
        assert_eq!(serde_json::from_str::<EnsembleSpec>(&text).unwrap(), spec);
    }
}
