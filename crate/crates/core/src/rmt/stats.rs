use std::io::Write;

use faer::{c64, Mat};
use serde::Serialize;

use super::ensemble::{sequential_kernels, SelfAdjoint};
use crate::analytic::GridDensity;
use crate::error::RmtError;

/// Equal-width histogram of a sample, normalized as a density.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub left: f64,
    pub width: f64,
    pub counts: Vec<usize>,
    pub total: usize,
}

impl Histogram {
    /// Freedman–Diaconis bin width `2·IQR·n^{-1/3}`, unless `width` is given.
    pub fn new(sample: &[f64], width: Option<f64>) -> Result<Self, RmtError> {
        if sample.is_empty() || sample.iter().any(|v| !v.is_finite()) {
            return Err(RmtError::Validation("histogram needs a nonempty finite sample".into()));
        }
        let mut sorted = sample.to_vec();
        sorted.sort_by(f64::total_cmp);
        let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
        let width = match width {
            Some(w) if w.is_finite() && w > 0.0 => w,
            Some(_) => return Err(RmtError::Validation("bin width must be positive".into())),
            None => {
                let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
                let fd = 2.0 * iqr / (sorted.len() as f64).cbrt();
                if fd > 0.0 {
                    fd
                } else {
                    ((hi - lo) / 10.0).max(1e-9)
                }
            }
        };
        let bins = (((hi - lo) / width).floor() as usize + 1).max(1);
        // center the bins on the sample range
        let left = lo - 0.5 * (bins as f64 * width - (hi - lo));
        let mut counts = vec![0usize; bins];
        for &v in &sorted {
            let b = (((v - left) / width).floor() as usize).min(bins - 1);
            counts[b] += 1;
        }
        Ok(Self {
            left,
            width,
            counts,
            total: sorted.len(),
        })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn right(&self) -> f64 {
        self.edge(self.bins())
    }

    pub fn edge(&self, i: usize) -> f64 {
        self.left + i as f64 * self.width
    }

    pub fn density(&self, i: usize) -> f64 {
        self.counts[i] as f64 / (self.total as f64 * self.width)
    }

    /// `∫ |h − ρ|` where `ρ` enters through its bin averages, plus the mass `ρ`
    /// places outside the histogram range. `ρ` is normalized first.
    pub fn l1_distance(&self, theory: &GridDensity) -> f64 {
        let mass = theory.mass();
        let inside = theory.integral(self.left, self.right()) / mass;
        let binned: f64 = (0..self.bins())
            .map(|i| {
                let p = theory.integral(self.edge(i), self.edge(i + 1)) / mass;
                (self.counts[i] as f64 / self.total as f64 - p).abs()
            })
            .sum();
        binned + (1.0 - inside).max(0.0)
    }

    /// CSV with header `bin_left,bin_right,count,density`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "bin_left,bin_right,count,density")?;
        for i in 0..self.bins() {
            writeln!(
                out,
                "{:.16e},{:.16e},{},{:.16e}",
                self.edge(i),
                self.edge(i + 1),
                self.counts[i],
                self.density(i)
            )?;
        }
        Ok(())
    }
}

/// Linear-interpolation quantile of a sorted sample.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - frac) + sorted[i + 1] * frac
    } else {
        sorted[i]
    }
}

macro_rules! defect_impl {
    ($name:ident, $t:ty, $from:expr, $re:expr) => {
        fn $name(a: &Mat<$t>, b: &Mat<$t>, powers: &[(u32, u32)]) -> f64 {
            let dim = a.nrows();
            let centered = |x: &Mat<$t>, n: u32| {
                let mut p = x.clone();
                for _ in 1..n {
                    p = &p * x;
                }
                let trace = (0..dim).map(|i| $re(p[(i, i)])).sum::<f64>() / dim as f64;
                for i in 0..dim {
                    p[(i, i)] -= $from(trace);
                }
                p
            };
            let mut factors = Vec::with_capacity(2 * powers.len());
            for &(n, m) in powers {
                factors.push(centered(a, n));
                factors.push(centered(b, m));
            }
            let last = factors.pop().expect("nonempty word");
            let mut prod = factors.remove(0);
            for f in &factors {
                prod = &prod * f;
            }
            let mut trace = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    trace += $re(prod[(i, j)] * last[(j, i)]);
                }
            }
            trace / dim as f64
        }
    };
}

defect_impl!(defect_real, f64, |v: f64| v, |v: f64| v);
defect_impl!(defect_complex, c64, |v: f64| c64::new(v, 0.0), |v: c64| v.re);

/// `tr[(A^{n_1} − tr A^{n_1})(B^{m_1} − tr B^{m_1}) ⋯ (B^{m_k} − tr B^{m_k})]`
/// with the matrices' own normalized traces as centering constants.
pub fn freeness_defect(a: &SelfAdjoint, b: &SelfAdjoint, powers: &[(u32, u32)]) -> Result<f64, RmtError> {
    if a.dim() != b.dim() {
        return Err(RmtError::Dimension(a.dim(), b.dim()));
    }
    if powers.is_empty() || powers.iter().any(|&(n, m)| n == 0 || m == 0) {
        return Err(RmtError::Validation("freeness defect needs a nonempty word of positive powers".into()));
    }
    sequential_kernels();
    Ok(match (a, b) {
        (SelfAdjoint::Real(a), SelfAdjoint::Real(b)) => defect_real(a, b, powers),
        _ => defect_complex(&a.to_complex(), &b.to_complex(), powers),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmt::ensemble::{EnsembleKind, EnsembleSpec};

    #[test]
    fn freedman_diaconis_bins() {
        let sample: Vec<f64> = (0..1000).map(|i| i as f64 / 999.0).collect();
        let h = Histogram::new(&sample, None).unwrap();
        assert_eq!(h.counts.iter().sum::<usize>(), 1000);
        assert!((h.width - 2.0 * 0.5 / 10.0).abs() < 1e-9);
        assert!(h.left <= 0.0 && h.right() >= 1.0);
    }

    #[test]
    fn l1_of_uniform_sample() {
        let sample: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let h = Histogram::new(&sample, Some(0.1)).unwrap();
        let theory = GridDensity::from_fn(0.0, 1.0, 101, |_| 1.0).unwrap();
        assert!(h.l1_distance(&theory) < 0.02);
        let shifted = GridDensity::from_fn(2.0, 3.0, 101, |_| 1.0).unwrap();
        assert!((h.l1_distance(&shifted) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn identity_defect_is_zero() {
        let a = EnsembleSpec::new(EnsembleKind::GaussianHermitian, 20, 1).sample().unwrap();
        let one = SelfAdjoint::identity(20);
        assert_eq!(freeness_defect(&a, &one, &[(2, 1)]).unwrap(), 0.0);
    }

    #[test]
    fn self_defect_is_variance() {
        let a = EnsembleSpec::new(EnsembleKind::GaussianHermitian, 50, 2).sample().unwrap();
        let ev = a.eigenvalues().unwrap();
        let m1 = ev.iter().sum::<f64>() / 50.0;
        let m2 = ev.iter().map(|v| v * v).sum::<f64>() / 50.0;
        let d = freeness_defect(&a, &a, &[(1, 1)]).unwrap();
        assert!((d - (m2 - m1 * m1)).abs() < 1e-12);
        assert!(d > 0.5);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            freeness_defect(&SelfAdjoint::identity(2), &SelfAdjoint::identity(3), &[(1, 1)]),
            Err(RmtError::Dimension(2, 3))
        ));
    }
}
