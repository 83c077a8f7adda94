//! Truncated full Fock space over `C^k` with left creation and annihilation
//! operators.
//!
//! The space keeps all words of length at most `D`; creation on a word of
//! length `D` returns 0. A vacuum moment of a product of `n ≤ D` factors only
//! visits words of length at most `n`, so it agrees with the untruncated
//! value. That is what makes these matrices an exact oracle.

use crate::error::FockError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    letters: usize,
    depth: usize,
}

impl FockSpace {
    pub fn new(letters: usize, depth: usize) -> Self {
        assert!(letters >= 1, "at least one letter");
        Self { letters, depth }
    }

    pub fn letters(&self) -> usize {
        self.letters
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `Σ_{d=0}^{D} k^d`.
    pub fn dim(&self) -> usize {
        self.offset(self.depth + 1)
    }

    /// Index of the first word of length `d`.
    fn offset(&self, d: usize) -> usize {
        (0..d).map(|j| self.letters.pow(j as u32)).sum()
    }

    /// Basis index of a word over letters `1..=k`; the vacuum `Ω` is index 0.
    pub fn index_of(&self, word: &[usize]) -> Result<usize, FockError> {
        if word.len() > self.depth {
            return Err(FockError::Truncation {
                degree: word.len(),
                depth: self.depth,
            });
        }
        let mut rank = 0;
        for &l in word {
            self.check_letter(l)?;
            rank = rank * self.letters + (l - 1);
        }
        Ok(self.offset(word.len()) + rank)
    }

    pub fn word_of(&self, mut index: usize) -> Vec<usize> {
        let mut d = 0;
        while index >= self.letters.pow(d as u32) {
            index -= self.letters.pow(d as u32);
            d += 1;
        }
        let mut word = vec![0; d];
        for slot in word.iter_mut().rev() {
            *slot = index % self.letters + 1;
            index /= self.letters;
        }
        word
    }

    fn check_letter(&self, letter: usize) -> Result<(), FockError> {
        if letter == 0 || letter > self.letters {
            return Err(FockError::Letter {
                letter,
                letters: self.letters,
            });
        }
        Ok(())
    }

    /// Length and rank-within-length of every basis word.
    fn layout(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.dim());
        for d in 0..=self.depth {
            for r in 0..self.letters.pow(d as u32) {
                out.push((d, r));
            }
        }
        out
    }
}

/// Dense operator on the Fock basis, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> FockOperator<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op.data[i * dim + i] = T::one();
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.data[row * self.dim + col]
    }

    fn set(&mut self, row: usize, col: usize, v: T) {
        self.data[row * self.dim + col] = v;
    }

    fn check_dim(&self, other: &Self) -> Result<(), FockError> {
        if self.dim != other.dim {
            return Err(FockError::Dimension(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, FockError> {
        self.check_dim(other)?;
        Ok(Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        })
    }

    pub fn scale(&self, c: &T) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    /// `self + c·1`.
    pub fn add_scalar(&self, c: &T) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            let v = out.get(i, i).clone() + c.clone();
            out.set(i, i, v);
        }
        out
    }

    /// Matrix product, skipping zero entries of `self`.
    pub fn mul(&self, other: &Self) -> Result<Self, FockError> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.data[k * n + j];
                    if b.is_zero() {
                        continue;
                    }
                    out.data[i * n + j] = out.data[i * n + j].clone() + a.clone() * b.clone();
                }
            }
        }
        Ok(out)
    }

    /// Transpose; the adjoint for real and rational entries.
    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].clone();
            }
        }
        out
    }

    pub fn apply(&self, v: &[T]) -> Result<Vec<T>, FockError> {
        if v.len() != self.dim {
            return Err(FockError::Dimension(self.dim, v.len()));
        }
        let n = self.dim;
        let mut out = vec![T::zero(); n];
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for i in 0..n {
                let a = &self.data[i * n + j];
                if !a.is_zero() {
                    out[i] = out[i].clone() + a.clone() * x.clone();
                }
            }
        }
        Ok(out)
    }

    /// `c_0 + c_1 T + … + c_d T^d`.
    pub fn polynomial(&self, coeffs: &[T]) -> Result<Self, FockError> {
        let mut acc = Self::zeros(self.dim);
        for c in coeffs.iter().rev() {
            acc = acc.mul(self)?.add_scalar(c);
        }
        Ok(acc)
    }
}

/// Left creation operator `l_i`: prepends letter `i`.
pub fn creation<T: Scalar>(space: &FockSpace, letter: usize) -> Result<FockOperator<T>, FockError> {
    space.check_letter(letter)?;
    let k = space.letters;
    let mut op = FockOperator::zeros(space.dim());
    for (col, (d, rank)) in space.layout().into_iter().enumerate() {
        if d == space.depth {
            continue;
        }
        let row = space.offset(d + 1) + (letter - 1) * k.pow(d as u32) + rank;
        op.set(row, col, T::one());
    }
    Ok(op)
}

/// Left annihilation operator `l_i*`: strips a leading letter `i`, kills `Ω`
/// and words starting with any other letter.
pub fn annihilation<T: Scalar>(space: &FockSpace, letter: usize) -> Result<FockOperator<T>, FockError> {
    space.check_letter(letter)?;
    let k = space.letters;
    let mut op = FockOperator::zeros(space.dim());
    for (col, (d, rank)) in space.layout().into_iter().enumerate() {
        if d == 0 {
            continue;
        }
        let lead = rank / k.pow(d as u32 - 1);
        if lead != letter - 1 {
            continue;
        }
        let row = space.offset(d - 1) + rank - lead * k.pow(d as u32 - 1);
        op.set(row, col, T::one());
    }
    Ok(op)
}

/// `l_i + l_i*`, a standard semicircular element.
pub fn semicircular<T: Scalar>(space: &FockSpace, letter: usize) -> Result<FockOperator<T>, FockError> {
    creation(space, letter)?.add(&annihilation(space, letter)?)
}

/// `⟨T_1 T_2 ⋯ T_n Ω, Ω⟩`; the empty product gives 1.
pub fn vacuum_moment<T: Scalar>(ops: &[&FockOperator<T>]) -> Result<T, FockError> {
    let Some(first) = ops.first() else {
        return Ok(T::one());
    };
    let dim = first.dim();
    let mut v = vec![T::zero(); dim];
    v[0] = T::one();
    for op in ops.iter().rev() {
        v = op.apply(&v)?;
    }
    Ok(v[0].clone())
}

/// Vacuum moments `τ(T^n)` for `n = 1..=order`.
pub fn vacuum_moments<T: Scalar>(op: &FockOperator<T>, order: usize) -> Result<Vec<T>, FockError> {
    let mut v = vec![T::zero(); op.dim()];
    v[0] = T::one();
    let mut out = Vec::with_capacity(order);
    for _ in 0..order {
        v = op.apply(&v)?;
        out.push(v[0].clone());
    }
    Ok(out)
}

fn check_degree(space: &FockSpace, coeff_count: usize) -> Result<(), FockError> {
    let degree = coeff_count.saturating_sub(1);
    if degree > space.depth {
        return Err(FockError::Truncation {
            degree,
            depth: space.depth,
        });
    }
    Ok(())
}

/// `l + f(l*)`, whose free cumulants are `κ_{j+1} = f_j`.
pub fn r_realization<T: Scalar>(space: &FockSpace, letter: usize, f: &[T]) -> Result<FockOperator<T>, FockError> {
    check_degree(space, f.len())?;
    let l = creation(space, letter)?;
    let l_star = annihilation(space, letter)?;
    l.add(&l_star.polynomial(f)?)
}

/// `(1 + l) g(l*)`, whose S-transform is `1/g`.
pub fn s_realization<T: Scalar>(space: &FockSpace, letter: usize, g: &[T]) -> Result<FockOperator<T>, FockError> {
    if g.first().is_none_or(|c| c.is_zero()) {
        return Err(FockError::ZeroConstant);
    }
    check_degree(space, g.len())?;
    let one_plus_l = creation::<T>(space, letter)?.add_scalar(&T::one());
    one_plus_l.mul(&annihilation(space, letter)?.polynomial(g)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    fn basis(space: &FockSpace, word: &[usize]) -> Vec<Rational> {
        let mut v = vec![r(0); space.dim()];
        v[space.index_of(word).unwrap()] = r(1);
        v
    }

    #[test]
    fn indexing_roundtrip() {
        let space = FockSpace::new(2, 4);
        assert_eq!(space.dim(), 31);
        for i in 0..space.dim() {
            assert_eq!(space.index_of(&space.word_of(i)).unwrap(), i);
        }
        assert_eq!(space.index_of(&[]).unwrap(), 0);
    }

    #[test]
    fn creation_rules() {
        let space = FockSpace::new(2, 3);
        let l1 = creation::<Rational>(&space, 1).unwrap();
        assert_eq!(l1.apply(&basis(&space, &[])).unwrap(), basis(&space, &[1]));
        assert_eq!(l1.apply(&basis(&space, &[2])).unwrap(), basis(&space, &[1, 2]));
        assert!(l1.apply(&basis(&space, &[2, 1, 2])).unwrap().iter().all(|x| x == &r(0)));
        assert_eq!(
            creation::<Rational>(&space, 3).unwrap_err(),
            FockError::Letter { letter: 3, letters: 2 }
        );
    }

    #[test]
    fn annihilation_rules() {
        let space = FockSpace::new(2, 3);
        let a1 = annihilation::<Rational>(&space, 1).unwrap();
        assert!(a1.apply(&basis(&space, &[])).unwrap().iter().all(|x| x == &r(0)));
        assert_eq!(a1.apply(&basis(&space, &[1, 2])).unwrap(), basis(&space, &[2]));
        assert!(a1.apply(&basis(&space, &[2])).unwrap().iter().all(|x| x == &r(0)));
        assert_eq!(a1, creation::<Rational>(&space, 1).unwrap().transpose());
        assert!(annihilation::<Rational>(&space, 0).is_err());
    }

    #[test]
    fn semicircular_vacuum_moments() {
        let space = FockSpace::new(2, 4);
        let s1 = semicircular::<Rational>(&space, 1).unwrap();
        let s2 = semicircular::<Rational>(&space, 2).unwrap();
        assert_eq!(vacuum_moment(&[&s1, &s1]).unwrap(), r(1));
        assert_eq!(vacuum_moment(&[&s1, &s1, &s1, &s1]).unwrap(), r(2));
        assert_eq!(vacuum_moment(&[&s1, &s1, &s2, &s2]).unwrap(), r(1));
        assert_eq!(vacuum_moment(&[&s1, &s2, &s1, &s2]).unwrap(), r(0));
        assert_eq!(vacuum_moment::<Rational>(&[]).unwrap(), r(1));
        let other = semicircular::<Rational>(&FockSpace::new(2, 3), 1).unwrap();
        assert_eq!(vacuum_moment(&[&s1, &other]), Err(FockError::Dimension(15, 31)));
    }

    #[test]
    fn realization_preconditions() {
        let space = FockSpace::new(1, 3);
        assert!(matches!(
            r_realization(&space, 1, &[r(1), r(1), r(1), r(1), r(1)]),
            Err(FockError::Truncation { degree: 4, depth: 3 })
        ));
        assert_eq!(s_realization(&space, 1, &[r(0), r(1)]).unwrap_err(), FockError::ZeroConstant);
    }

    #[test]
    fn constant_realization_is_point_mass() {
        let space = FockSpace::new(1, 5);
        let op = r_realization(&space, 1, &[r(3)]).unwrap();
        assert_eq!(vacuum_moments(&op, 5).unwrap(), vec![r(3), r(9), r(27), r(81), r(243)]);
    }
}
