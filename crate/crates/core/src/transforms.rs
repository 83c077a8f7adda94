//! R- and S-transforms on moment sequences, and the free convolutions built on them.
//!
//! The S-transform is built from the moment series without its constant
//! term, `ψ(z) = Σ_{n≥1} m_n z^n`, since only that series can be reverted:
//! `S(z) = (1 + z)/z · ψ^{<-1>}(z)`.

use crate::cumulants::{cumulants_from_moments, moments_from_cumulants, CumulantSequence, MomentSequence};
use crate::error::SeriesError;
use crate::scalar::Scalar;
use crate::series::TruncatedSeries;

/// Default truncation order for convolutions.
pub const DEFAULT_ORDER: usize = 8;

/// `R(z) = Σ_n κ_n z^{n-1}`, a series of order `K - 1`.
pub fn r_from_moments<T: Scalar>(m: &MomentSequence<T>) -> TruncatedSeries<T> {
    r_from_cumulants(&cumulants_from_moments(m))
}

pub fn r_from_cumulants<T: Scalar>(k: &CumulantSequence<T>) -> TruncatedSeries<T> {
    TruncatedSeries::new(k.as_slice().to_vec())
}

/// Residual series of `1/G(z) + R(G(z)) − z` in the variable `w = 1/z`.
///
/// With `M(w) = 1 + Σ m_n w^n` and `G = w M(w)` the relation reads
/// `(1/M(w) − 1)/w + R(w M(w)) = 0`; the returned series has order `K − 1`
/// and vanishes identically when `r` is the R-transform of `m`.
pub fn rg_residual<T: Scalar>(
    m: &MomentSequence<T>,
    r: &TruncatedSeries<T>,
) -> Result<TruncatedSeries<T>, SeriesError> {
    let order = m.order();
    if order < 2 {
        return Err(SeriesError::Domain("R-G check needs at least two moments"));
    }
    if r.order() + 1 < order {
        return Err(SeriesError::OrderMismatch(r.order() + 1, order));
    }
    let mut mcoeffs = vec![T::one()];
    mcoeffs.extend(m.as_slice().iter().cloned());
    let big_m = TruncatedSeries::new(mcoeffs);
    let inverse_part = (&big_m.reciprocal()? - &TruncatedSeries::constant(T::one(), order)).shift_down(1)?;
    let g = big_m.shift_up(1).truncate(order - 1);
    let r_of_g = r.truncate(order - 1).compose(&g)?;
    Ok(&inverse_part + &r_of_g)
}

/// Largest coefficient magnitude of [`rg_residual`] against the R-transform
/// computed from `m`. Zero in exact arithmetic.
pub fn check_rg_relation<T: Scalar>(m: &MomentSequence<T>) -> Result<f64, SeriesError> {
    let residual = rg_residual(m, &r_from_moments(m))?;
    Ok(residual.coeffs().iter().map(Scalar::magnitude).fold(0.0, f64::max))
}

fn same_order<T: Scalar>(a: &MomentSequence<T>, b: &MomentSequence<T>) -> Result<(), SeriesError> {
    if a.order() != b.order() {
        return Err(SeriesError::OrderMismatch(a.order(), b.order()));
    }
    Ok(())
}

/// Moments of `μ_A ⊞ μ_B`: free cumulants add term-wise.
pub fn free_additive_convolve<T: Scalar>(
    a: &MomentSequence<T>,
    b: &MomentSequence<T>,
) -> Result<MomentSequence<T>, SeriesError> {
    same_order(a, b)?;
    let ka = cumulants_from_moments(a);
    let kb = cumulants_from_moments(b);
    let sum = ka
        .as_slice()
        .iter()
        .zip(kb.as_slice())
        .map(|(x, y)| x.clone() + y.clone())
        .collect();
    Ok(moments_from_cumulants(&CumulantSequence::new(sum)?))
}

/// S-transform as a series of order `K − 1` with constant term `1/m_1`.
pub fn s_from_moments<T: Scalar>(m: &MomentSequence<T>) -> Result<TruncatedSeries<T>, SeriesError> {
    if m.moment(1).is_zero() {
        return Err(SeriesError::SUndefined);
    }
    let order = m.order();
    let mut coeffs = vec![T::zero()];
    coeffs.extend(m.as_slice().iter().cloned());
    let psi = TruncatedSeries::new(coeffs);
    let chi_over_z = psi.revert()?.shift_down(1)?;
    Ok(chi_over_z.mul(&one_plus_z(order - 1)))
}

fn one_plus_z<T: Scalar>(order: usize) -> TruncatedSeries<T> {
    TruncatedSeries::constant(T::one(), order).add(&TruncatedSeries::identity(order))
}

/// Inverts [`s_from_moments`]: `ψ^{<-1>}(z) = z S(z)/(1 + z)`, then reverts.
pub fn moments_from_s<T: Scalar>(s: &TruncatedSeries<T>) -> Result<MomentSequence<T>, SeriesError> {
    if s.coeff(0).is_zero() {
        return Err(SeriesError::Domain("S-transform must have a nonzero constant term"));
    }
    let q = s.mul(&one_plus_z(s.order()).reciprocal()?);
    let mut chi = vec![T::zero()];
    chi.extend(q.coeffs().iter().cloned());
    let psi = TruncatedSeries::new(chi).revert()?;
    Ok(MomentSequence::new(psi.coeffs()[1..].to_vec())?)
}

/// Moments of `μ_A ⊠ μ_B` from the product of S-transforms.
pub fn free_multiplicative_convolve<T: Scalar>(
    a: &MomentSequence<T>,
    b: &MomentSequence<T>,
) -> Result<MomentSequence<T>, SeriesError> {
    same_order(a, b)?;
    let sa = s_from_moments(a)?;
    let sb = s_from_moments(b)?;
    moments_from_s(&sa.mul(&sb))
}

/// Moments of `D_{1/√N} ν^{⊞N}` for a centered, unit-variance `ν`:
/// `κ_n ← N^{1 − n/2} κ_n`.
///
/// Even orders are scaled exactly. Odd orders with a nonzero cumulant pick
/// up `√N`, which is rounded through `f64` unless `N` is a perfect square.
pub fn free_clt_moments<T: Scalar>(nu: &MomentSequence<T>, copies: u64) -> Result<MomentSequence<T>, SeriesError> {
    if copies == 0 {
        return Err(SeriesError::Domain("number of summands must be positive"));
    }
    if nu.order() < 2 {
        return Err(SeriesError::Normalization("need at least two moments"));
    }
    if nu.moment(1).magnitude() > 1e-12 || (nu.moment(2) - T::one()).magnitude() > 1e-12 {
        return Err(SeriesError::Normalization("free CLT needs mean 0 and variance 1"));
    }
    let kappa = cumulants_from_moments(nu);
    let n_scalar = T::from_i64(copies as i64);
    let root = exact_sqrt(copies).map(|r| T::from_i64(r as i64));
    let scaled = kappa
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, k)| {
            let n = i + 1;
            if k.is_zero() {
                return T::zero();
            }
            if n % 2 == 0 {
                // N^{1 - n/2} = 1 / N^{n/2 - 1}
                k.clone() / n_scalar.powi(n / 2 - 1)
            } else {
                let half = match &root {
                    Some(r) => r.clone(),
                    None => T::from_f64((copies as f64).sqrt()),
                };
                // N^{1 - n/2} = N^{(1 - n)/2 + 1/2} = √N / N^{(n-1)/2}
                k.clone() * half / n_scalar.powi((n - 1) / 2)
            }
        })
        .collect();
    Ok(moments_from_cumulants(&CumulantSequence::new(scaled)?))
}

fn exact_sqrt(n: u64) -> Option<u64> {
    let r = (n as f64).sqrt().round() as u64;
    (r.checked_mul(r) == Some(n)).then_some(r)
}

/// Free cumulants `κ_n = λ m_n(ν)` of the compound free Poisson law with rate
/// `λ` and jump distribution `ν`.
pub fn compound_free_poisson<T: Scalar + PartialOrd>(
    rate: T,
    jump: &MomentSequence<T>,
) -> Result<CumulantSequence<T>, SeriesError> {
    if rate < T::zero() {
        return Err(SeriesError::NegativeRate);
    }
    Ok(CumulantSequence::new(
        jump.as_slice().iter().map(|m| rate.clone() * m.clone()).collect(),
    )?)
}

/// `m_n ← α^n m_n`.
pub fn dilate<T: Scalar>(m: &MomentSequence<T>, alpha: &T) -> MomentSequence<T> {
    let mut factor = T::one();
    m.map(|x| {
        factor = factor.clone() * alpha.clone();
        x.clone() * factor.clone()
    })
}

/// Named distributions as truncated moment or cumulant sequences.
pub mod families {
    use super::*;

    fn seq<T: Scalar>(order: usize, f: impl Fn(usize) -> T) -> Vec<T> {
        (1..=order.max(1)).map(f).collect()
    }

    /// Semicircle of the given variance: `κ_2 = σ²`, all others zero.
    pub fn semicircle_cumulants<T: Scalar>(variance: T, order: usize) -> CumulantSequence<T> {
        CumulantSequence::new(seq(order, |n| if n == 2 { variance.clone() } else { T::zero() }))
            .expect("non-empty")
    }

    pub fn semicircle_moments<T: Scalar>(variance: T, order: usize) -> MomentSequence<T> {
        moments_from_cumulants(&semicircle_cumulants(variance, order))
    }

    /// Dirac mass at `c`.
    pub fn point_moments<T: Scalar>(c: T, order: usize) -> MomentSequence<T> {
        MomentSequence::new(seq(order, |n| c.powi(n))).expect("non-empty")
    }

    /// Free Poisson (Marchenko-Pastur) law with rate `λ`: every cumulant equals `λ`.
    pub fn free_poisson_cumulants<T: Scalar>(rate: T, order: usize) -> CumulantSequence<T> {
        CumulantSequence::new(seq(order, |_| rate.clone())).expect("non-empty")
    }

    pub fn free_poisson_moments<T: Scalar>(rate: T, order: usize) -> MomentSequence<T> {
        moments_from_cumulants(&free_poisson_cumulants(rate, order))
    }

    /// `(δ_{-1} + δ_1)/2`.
    pub fn symmetric_bernoulli_moments<T: Scalar>(order: usize) -> MomentSequence<T> {
        MomentSequence::new(seq(order, |n| if n % 2 == 0 { T::one() } else { T::zero() })).expect("non-empty")
    }

    /// Finitely supported measure `Σ w_i δ_{x_i}`.
    pub fn atomic_moments<T: Scalar>(atoms: &[(T, T)], order: usize) -> MomentSequence<T> {
        MomentSequence::new(seq(order, |n| {
            atoms
                .iter()
                .fold(T::zero(), |acc, (w, x)| acc + w.clone() * x.powi(n))
        }))
        .expect("non-empty")
    }
}

#[cfg(test)]
mod tests {
    use super::families::*;
    use super::*;
    use crate::scalar::{ratio, Rational};

    fn r(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    fn ms(v: &[Rational]) -> MomentSequence<Rational> {
        MomentSequence::new(v.to_vec()).unwrap()
    }

    #[test]
    fn r_transform_examples() {
        let sc = semicircle_moments(r(1), 6);
        assert_eq!(r_from_moments(&sc).coeffs(), &[r(0), r(1), r(0), r(0), r(0), r(0)]);
        let point = point_moments(r(3), 4);
        assert_eq!(r_from_moments(&point).coeffs(), &[r(3), r(0), r(0), r(0)]);
        let fp = free_poisson_moments(r(2), 5);
        assert_eq!(r_from_moments(&fp).coeffs(), vec![r(2); 5].as_slice());
    }

    #[test]
    fn rg_relation_holds_and_detects_perturbation() {
        assert_eq!(check_rg_relation(&semicircle_moments(r(1), 8)).unwrap(), 0.0);
        assert_eq!(check_rg_relation(&free_poisson_moments(r(1), 8)).unwrap(), 0.0);
        let m = free_poisson_moments(r(1), 6);
        let mut kappa = r_from_moments(&m).into_coeffs();
        kappa[2] = kappa[2].clone() + ratio(1, 10);
        let residual = rg_residual(&m, &TruncatedSeries::new(kappa)).unwrap();
        assert!(residual.coeffs().iter().any(|c| c != &r(0)));
        assert!(check_rg_relation(&ms(&[r(1)])).is_err());
    }

    #[test]
    fn additive_examples() {
        let sc = semicircle_moments(r(1), 4);
        let sum = free_additive_convolve(&sc, &sc).unwrap();
        assert_eq!(sum.moment(2), r(2));
        assert_eq!(sum.moment(4), r(8));

        let fig1 = free_additive_convolve(&free_poisson_moments(ratio(1, 2), 3), &semicircle_moments(r(1), 3)).unwrap();
        assert_eq!(fig1.as_slice(), &[ratio(1, 2), ratio(7, 4), ratio(23, 8)]);

        // shift by a point mass keeps central moments
        let nu = ms(&[r(1), r(3), r(-2), r(11)]);
        let shifted = free_additive_convolve(&nu, &point_moments(r(2), 4)).unwrap();
        assert_eq!(shifted.moment(1), r(3));
        let central = |m: &MomentSequence<Rational>| m.moment(2) - m.moment(1) * m.moment(1);
        assert_eq!(central(&shifted), central(&nu));
        assert!(free_additive_convolve(&nu, &point_moments(r(2), 3)).is_err());
    }

    #[test]
    fn s_transform_examples() {
        let s = s_from_moments(&point_moments(r(4), 6)).unwrap();
        assert_eq!(s.coeffs(), &[ratio(1, 4), r(0), r(0), r(0), r(0), r(0)]);

        // S_{FP(λ)} = 1/(λ + z)
        let lambda = ratio(3, 2);
        let s = s_from_moments(&free_poisson_moments(lambda.clone(), 6)).unwrap();
        let mut denom = vec![r(0); 6];
        denom[0] = lambda;
        denom[1] = r(1);
        assert_eq!(s, TruncatedSeries::new(denom).reciprocal().unwrap());

        assert_eq!(s_from_moments(&semicircle_moments(r(1), 4)), Err(SeriesError::SUndefined));
    }

    #[test]
    fn s_roundtrip() {
        let m = ms(&[r(2), r(7), r(30), r(141)]);
        assert_eq!(moments_from_s(&s_from_moments(&m).unwrap()).unwrap(), m);
    }

    #[test]
    fn multiplicative_examples() {
        let p = free_multiplicative_convolve(&point_moments(r(2), 4), &point_moments(r(3), 4)).unwrap();
        assert_eq!(p.as_slice(), &[r(6), r(36), r(216), r(1296)]);

        let fp = free_poisson_moments(r(5), 4);
        let prod = free_multiplicative_convolve(&fp, &fp).unwrap();
        assert_eq!(prod.moment(1), r(25));
        assert_eq!(prod.moment(2), r(875));

        let nu = ms(&[r(1), r(3), r(-2), r(11)]);
        assert_eq!(free_multiplicative_convolve(&nu, &point_moments(r(1), 4)).unwrap(), nu);
        assert_eq!(
            free_multiplicative_convolve(&semicircle_moments(r(1), 4), &point_moments(r(1), 4)),
            Err(SeriesError::SUndefined)
        );
    }

    #[test]
    fn free_clt_bernoulli() {
        let nu = symmetric_bernoulli_moments::<Rational>(8);
        assert_eq!(free_clt_moments(&nu, 1).unwrap().moment(4), r(1));
        for n in [2u64, 3, 7, 10] {
            let m = free_clt_moments(&nu, n).unwrap();
            assert_eq!(m.moment(4), r(2) - ratio(1, n as i64));
            assert_eq!(m.moment(3), r(0));
        }
        assert!(matches!(
            free_clt_moments(&point_moments(r(1), 4), 3),
            Err(SeriesError::Normalization(_))
        ));
    }

    #[test]
    fn compound_poisson_examples() {
        let k = compound_free_poisson(r(1), &point_moments(r(1), 6)).unwrap();
        let m = moments_from_cumulants(&k);
        assert_eq!(m.as_slice(), &[r(1), r(2), r(5), r(14), r(42), r(132)]);
        let zero = compound_free_poisson(r(0), &point_moments(r(4), 3)).unwrap();
        assert_eq!(zero.as_slice(), &[r(0), r(0), r(0)]);
        let five = moments_from_cumulants(&compound_free_poisson(r(5), &point_moments(r(1), 2)).unwrap());
        assert_eq!(five.as_slice(), &[r(5), r(30)]);
        assert_eq!(compound_free_poisson(r(-1), &point_moments(r(1), 2)), Err(SeriesError::NegativeRate));
    }

    #[test]
    fn dilation_equivariance() {
        let a = ms(&[r(1), r(3), r(-2), r(11)]);
        let b = ms(&[r(-1), r(2), r(0), r(5)]);
        let alpha = ratio(-3, 2);
        let lhs = free_additive_convolve(&dilate(&a, &alpha), &dilate(&b, &alpha)).unwrap();
        let rhs = dilate(&free_additive_convolve(&a, &b).unwrap(), &alpha);
        assert_eq!(lhs, rhs);
    }
}
