//! Truncated formal power series `c_0 + c_1 z + … + c_K z^K`.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::SeriesError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> TruncatedSeries<T> {
    /// Series of order `coeffs.len() - 1`. An empty vector is the zero series of order 0.
    pub fn new(mut coeffs: Vec<T>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(T::zero());
        }
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![T::zero(); order + 1],
        }
    }

    pub fn constant(c: T, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The identity series `z`.
    pub fn identity(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = T::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        Self {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    /// Multiplication by `z^k`, keeping the order.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut coeffs = vec![T::zero(); self.coeffs.len()];
        if k < coeffs.len() {
            let len = coeffs.len();
            coeffs[k..].clone_from_slice(&self.coeffs[..len - k]);
        }
        Self { coeffs }
    }

    /// Division by `z^k`; requires `c_0 = … = c_{k-1} = 0`. The order drops by `k`.
    pub fn shift_down(&self, k: usize) -> Result<Self, SeriesError> {
        if k > self.order() || self.coeffs[..k].iter().any(|c| !c.is_zero()) {
            return Err(SeriesError::Domain("division by z^k needs k vanishing coefficients"));
        }
        Ok(Self {
            coeffs: self.coeffs[k..].to_vec(),
        })
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Self {
        let order = self.order().min(other.order());
        Self {
            coeffs: (0..=order).map(|i| f(&self.coeffs[i], &other.coeffs[i])).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut coeffs = vec![T::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self { coeffs }
    }

    /// Multiplicative inverse; requires `c_0 ≠ 0`.
    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(SeriesError::Domain("reciprocal needs a nonzero constant term"));
        }
        let inv0 = T::one() / c0.clone();
        let mut out = vec![T::zero(); self.coeffs.len()];
        out[0] = inv0.clone();
        for n in 1..out.len() {
            let mut acc = T::zero();
            for k in 1..=n {
                acc = acc + self.coeffs[k].clone() * out[n - k].clone();
            }
            out[n] = -acc * inv0.clone();
        }
        Ok(Self { coeffs: out })
    }

    /// `self ∘ inner`; requires `inner` to have zero constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        if !inner.coeffs[0].is_zero() {
            return Err(SeriesError::Domain("composition needs an inner series without constant term"));
        }
        let order = self.order().min(inner.order());
        let inner = inner.truncate(order);
        // Horner: c_0 + g(c_1 + g(c_2 + …))
        let mut acc = Self::constant(self.coeff(order), order);
        for i in (0..order).rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0] = acc.coeffs[0].clone() + self.coeffs[i].clone();
        }
        Ok(acc)
    }

    /// Compositional inverse `f^{<-1>}`; requires `c_0 = 0` and `c_1 ≠ 0`.
    pub fn revert(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::Domain("reversion needs zero constant term"));
        }
        let order = self.order();
        if order == 0 {
            return Ok(Self::zero(0));
        }
        let a1 = self.coeffs[1].clone();
        if a1.is_zero() {
            return Err(SeriesError::Domain("reversion needs a nonzero linear coefficient"));
        }
        let mut g = Self::zero(order);
        g.coeffs[1] = T::one() / a1.clone();
        // fix one coefficient at a time: [z^n] f(g) must vanish for n ≥ 2
        for n in 2..=order {
            let current = self.truncate(n).compose(&g.truncate(n))?;
            g.coeffs[n] = -current.coeffs[n].clone() / a1.clone();
        }
        Ok(g)
    }

    /// Horner evaluation of the polynomial part.
    pub fn eval(&self, z: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * z.clone() + c.clone())
    }
}

impl<T: Scalar> Add for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn add(self, rhs: Self) -> Self::Output {
        TruncatedSeries::add(self, rhs)
    }
}

impl<T: Scalar> Sub for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn sub(self, rhs: Self) -> Self::Output {
        TruncatedSeries::sub(self, rhs)
    }
}

impl<T: Scalar> Mul for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn mul(self, rhs: Self) -> Self::Output {
        TruncatedSeries::mul(self, rhs)
    }
}

impl<T: Scalar> Neg for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn neg(self) -> Self::Output {
        self.scale(&-T::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use proptest::prelude::*;

    fn s(v: &[i64]) -> TruncatedSeries<Rational> {
        TruncatedSeries::new(v.iter().map(|&x| Rational::from_i64(x)).collect())
    }

    /// Lagrange inversion: `[z^n] g = (1/n) [w^{n-1}] (w / f(w))^n`.
    fn lagrange_revert(f: &TruncatedSeries<Rational>) -> TruncatedSeries<Rational> {
        let order = f.order();
        let quotient = f.shift_down(1).unwrap().reciprocal().unwrap(); // w / f(w)
        let mut coeffs = vec![Rational::from_i64(0); order + 1];
        let mut power = TruncatedSeries::constant(Rational::from_i64(1), order - 1);
        for n in 1..=order {
            power = power.mul(&quotient);
            coeffs[n] = power.coeff(n - 1) / Rational::from_i64(n as i64);
        }
        TruncatedSeries::new(coeffs)
    }

    #[test]
    fn revert_identity() {
        assert_eq!(s(&[0, 1, 0, 0]).revert().unwrap(), s(&[0, 1, 0, 0]));
    }

    #[test]
    fn revert_z_plus_z2() {
        let f = s(&[0, 1, 1, 0, 0, 0]);
        let g = f.revert().unwrap();
        assert_eq!(g, s(&[0, 1, -1, 2, -5, 14]));
        assert_eq!(g, lagrange_revert(&f));
        assert_eq!(g.compose(&f).unwrap(), s(&[0, 1, 0, 0, 0, 0]));
    }

    #[test]
    fn domain_errors() {
        assert!(s(&[0, 1]).reciprocal().is_err());
        assert!(s(&[1, 1]).revert().is_err());
        assert!(s(&[0, 0, 1]).revert().is_err());
        assert!(s(&[1, 2]).compose(&s(&[1, 1])).is_err());
    }

    #[test]
    fn arithmetic_truncates_to_smaller_order() {
        let a = s(&[1, 1, 1]);
        let b = s(&[1, -1]);
        assert_eq!(&a * &b, s(&[1, 0]));
        assert_eq!(&a + &b, s(&[2, 0]));
        assert_eq!(s(&[1, -1, 0, 0]).reciprocal().unwrap(), s(&[1, 1, 1, 1]));
    }

    proptest! {
        #[test]
        fn reversion_matches_lagrange(coeffs in proptest::collection::vec(-5i64..=5, 6), lin in 1i64..4) {
            let mut v = vec![0, lin];
            v.extend(coeffs);
            let f = s(&v);
            let g = f.revert().unwrap();
            prop_assert_eq!(&g, &lagrange_revert(&f));
            prop_assert_eq!(f.compose(&g).unwrap(), TruncatedSeries::identity(f.order()));
        }
    }
}
