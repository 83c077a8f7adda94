//! Moment / free-cumulant conversion and mixed moments of free families.

use std::collections::BTreeMap;
use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::CumulantError;
use crate::partitions::{block_sizes, walk_noncrossing, NCPartition, NcEnumerator};
use crate::scalar::Scalar;

macro_rules! truncated_sequence {
    ($name:ident, $what:literal) => {
        #[doc = concat!("Truncated list of ", $what, " indexed from 1.")]
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name<T>(Vec<T>);

        impl<T: Scalar> $name<T> {
            pub fn new(values: Vec<T>) -> Result<Self, CumulantError> {
                if values.is_empty() {
                    return Err(CumulantError::EmptySequence);
                }
                if let Some(index) = values.iter().position(|v| !v.is_finite()) {
                    return Err(CumulantError::NonFinite { index: index + 1 });
                }
                Ok(Self(values))
            }

            /// Truncation order `K`.
            pub fn order(&self) -> usize {
                self.0.len()
            }

            /// Entry `n` for `1 ≤ n ≤ K`.
            pub fn get(&self, n: usize) -> Option<&T> {
                n.checked_sub(1).and_then(|i| self.0.get(i))
            }

            pub fn as_slice(&self) -> &[T] {
                &self.0
            }

            pub fn into_vec(self) -> Vec<T> {
                self.0
            }

            /// Keeps the first `order` entries.
            pub fn truncate(&self, order: usize) -> Self {
                Self(self.0[..order.min(self.0.len())].to_vec())
            }

            pub fn map<U: Scalar>(&self, f: impl FnMut(&T) -> U) -> $name<U> {
                $name(self.0.iter().map(f).collect())
            }
        }
    };
}

truncated_sequence!(MomentSequence, "moments `m_1 … m_K` (`m_0 = 1` implicit)");
truncated_sequence!(CumulantSequence, "free cumulants `κ_1 … κ_K`");

impl<T: Scalar> MomentSequence<T> {
    /// `m_n` with the convention `m_0 = 1`.
    pub fn moment(&self, n: usize) -> T {
        if n == 0 {
            T::one()
        } else {
            self.0[n - 1].clone()
        }
    }
}

/// Coefficients `[z^{n-s}] M(z)^s` for `s = 1..=n`, where `M = 1 + Σ m_k z^k`.
///
/// Decomposing a non-crossing partition by the block containing 1 gives
/// `m_n = Σ_s κ_s · weights[s - 1]`; only `m_1 … m_{n-1}` are needed.
fn first_block_weights<T: Scalar>(moments: &[T], n: usize) -> Vec<T> {
    let len = n; // coefficients 0..n-1 of M^s suffice
    let mut base = vec![T::zero(); len];
    base[0] = T::one();
    base[1..].clone_from_slice(&moments[..len - 1]);
    let mut power = base.clone();
    let mut weights = Vec::with_capacity(n);
    for s in 1..=n {
        weights.push(power[n - s].clone());
        if s < n {
            let mut next = vec![T::zero(); len];
            for (i, a) in power.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in base.iter().enumerate().take(len - i) {
                    next[i + j] = next[i + j].clone() + a.clone() * b.clone();
                }
            }
            power = next;
        }
    }
    weights
}

/// `m_n = Σ_{π ∈ NC(n)} κ_π` for every tracked order.
pub fn moments_from_cumulants<T: Scalar>(k: &CumulantSequence<T>) -> MomentSequence<T> {
    let kappa = k.as_slice();
    let mut moments: Vec<T> = Vec::with_capacity(kappa.len());
    for n in 1..=kappa.len() {
        let weights = first_block_weights(&moments, n);
        let m = kappa
            .iter()
            .zip(&weights)
            .fold(T::zero(), |acc, (c, w)| acc + c.clone() * w.clone());
        moments.push(m);
    }
    MomentSequence(moments)
}

/// Inverse of [`moments_from_cumulants`]: peels off the single full-block
/// term, `κ_n = m_n − Σ_{π ≠ 1_n} κ_π`.
pub fn cumulants_from_moments<T: Scalar>(m: &MomentSequence<T>) -> CumulantSequence<T> {
    let moments = m.as_slice();
    let mut kappa: Vec<T> = Vec::with_capacity(moments.len());
    for n in 1..=moments.len() {
        let weights = first_block_weights(moments, n);
        let lower = kappa
            .iter()
            .zip(&weights)
            .fold(T::zero(), |acc, (c, w)| acc + c.clone() * w.clone());
        kappa.push(moments[n - 1].clone() - lower);
    }
    CumulantSequence(kappa)
}

/// Same map as [`moments_from_cumulants`], evaluated literally as a sum over
/// the enumerated lattice `NC(n)`.
pub fn moments_from_cumulants_by_enumeration<T: Scalar>(
    k: &CumulantSequence<T>,
    enumerator: &NcEnumerator,
) -> Result<MomentSequence<T>, CumulantError> {
    let kappa = k.as_slice();
    let mut moments = Vec::with_capacity(kappa.len());
    for n in 1..=kappa.len() {
        let mut sum = T::zero();
        enumerator.for_each(n, |labels| {
            let term = block_sizes(labels)
                .into_iter()
                .fold(T::one(), |acc, s| acc * kappa[s - 1].clone());
            sum = sum.clone() + term;
        })?;
        moments.push(sum);
    }
    Ok(MomentSequence(moments))
}

/// `κ_π`: product over the blocks of `π` of `κ_{|block|}`.
pub fn kappa_pi<T: Scalar>(p: &NCPartition, k: &CumulantSequence<T>) -> Result<T, CumulantError> {
    p.block_sizes().into_iter().try_fold(T::one(), |acc, s| {
        k.get(s)
            .map(|c| acc * c.clone())
            .ok_or(CumulantError::Truncation {
                needed: s,
                available: k.order(),
            })
    })
}

/// Free random variables, each described by its own cumulant sequence.
/// Mixed cumulants are zero and therefore not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeFamily<L: Ord, T> {
    members: BTreeMap<L, CumulantSequence<T>>,
}

impl<L: Ord + Clone + Debug, T: Scalar> FreeFamily<L, T> {
    pub fn new() -> Self {
        Self {
            members: BTreeMap::new(),
        }
    }

    pub fn with(mut self, label: L, cumulants: CumulantSequence<T>) -> Result<Self, CumulantError> {
        self.insert(label, cumulants)?;
        Ok(self)
    }

    pub fn insert(&mut self, label: L, cumulants: CumulantSequence<T>) -> Result<(), CumulantError> {
        if let Some(order) = self.order() {
            if order != cumulants.order() {
                return Err(CumulantError::OrderMismatch);
            }
        }
        self.members.insert(label, cumulants);
        Ok(())
    }

    /// Shared truncation order, `None` for an empty family.
    pub fn order(&self) -> Option<usize> {
        self.members.values().next().map(CumulantSequence::order)
    }

    pub fn cumulants(&self, label: &L) -> Result<&CumulantSequence<T>, CumulantError> {
        self.members
            .get(label)
            .ok_or_else(|| CumulantError::UnknownLabel(format!("{label:?}")))
    }
}

impl<L: Ord + Clone + Debug, T: Scalar> Default for FreeFamily<L, T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Expectation of a word in free variables: the sum over non-crossing
/// partitions of the positions whose blocks are monochromatic, each block
/// weighted by that variable's cumulant of the block size.
pub fn free_mixed_moment<L, T>(word: &[L], fam: &FreeFamily<L, T>) -> Result<T, CumulantError>
where
    L: Ord + Clone + Debug,
    T: Scalar,
{
    if word.is_empty() {
        return Ok(T::one());
    }
    let sequences: Vec<&CumulantSequence<T>> = word
        .iter()
        .map(|l| fam.cumulants(l))
        .collect::<Result<_, _>>()?;
    let order = fam.order().unwrap_or(0);
    if word.len() > order {
        return Err(CumulantError::Truncation {
            needed: word.len(),
            available: order,
        });
    }
    if word.len() > u8::MAX as usize {
        return Err(CumulantError::Truncation {
            needed: word.len(),
            available: u8::MAX as usize,
        });
    }
    let mut sum = T::zero();
    walk_noncrossing(
        word.len(),
        |i, b, labels| {
            let leader = labels.iter().position(|&l| l as usize == b).unwrap_or(0);
            word[leader] == word[i]
        },
        |labels| {
            let mut sizes: Vec<(usize, usize)> = Vec::new(); // (leader position, size)
            for (i, &l) in labels.iter().enumerate() {
                let l = l as usize;
                if l == sizes.len() {
                    sizes.push((i, 0));
                }
                sizes[l].1 += 1;
            }
            let term = sizes.iter().fold(T::one(), |acc, &(leader, size)| {
                acc * sequences[leader].as_slice()[size - 1].clone()
            });
            sum = sum.clone() + term;
        },
    );
    Ok(sum)
}

/// `φ(Π (x_i^{p_i} − φ(x_i^{p_i})))` for factors `(x_i, p_i)`, expanded
/// multilinearly into [`free_mixed_moment`] evaluations.
pub fn centered_word_moment<L, T>(factors: &[(L, usize)], fam: &FreeFamily<L, T>) -> Result<T, CumulantError>
where
    L: Ord + Clone + Debug,
    T: Scalar,
{
    if factors.iter().any(|&(_, p)| p == 0) {
        return Err(CumulantError::ZeroExponent);
    }
    let total: usize = factors.iter().map(|&(_, p)| p).sum();
    let order = fam.order().unwrap_or(0);
    if total > order {
        return Err(CumulantError::Truncation {
            needed: total,
            available: order,
        });
    }
    let power_word = |label: &L, p: usize| vec![label.clone(); p];
    let centers: Vec<T> = factors
        .iter()
        .map(|(l, p)| free_mixed_moment(&power_word(l, *p), fam))
        .collect::<Result<_, _>>()?;

    let k = factors.len();
    let mut sum = T::zero();
    for mask in 0u64..(1u64 << k) {
        let mut word = Vec::new();
        let mut coeff = T::one();
        for (i, (l, p)) in factors.iter().enumerate() {
            if mask & (1 << i) != 0 {
                word.extend(power_word(l, *p));
            } else {
                coeff = coeff * -centers[i].clone();
            }
        }
        if coeff.is_zero() {
            continue;
        }
        sum = sum + coeff * free_mixed_moment(&word, fam)?;
    }
    Ok(sum)
}

/// Alternating centered word `(a^{n_1} − ·)(b^{m_1} − ·)⋯(a^{n_k} − ·)(b^{m_k} − ·)`
/// with `powers = [n_1, m_1, …, n_k, m_k]`.
pub fn centered_alternating_moment<L, T>(
    a: &L,
    b: &L,
    powers: &[usize],
    fam: &FreeFamily<L, T>,
) -> Result<T, CumulantError>
where
    L: Ord + Clone + Debug,
    T: Scalar,
{
    let factors: Vec<(L, usize)> = powers
        .iter()
        .enumerate()
        .map(|(i, &p)| (if i % 2 == 0 { a.clone() } else { b.clone() }, p))
        .collect();
    centered_word_moment(&factors, fam)
}
