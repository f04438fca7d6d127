//! Fixed-dimension tensors of jets and of plain numbers, stored row-major.

use std::sync::Arc;

use crate::error::Result;
use crate::jet::{Jet, JetLayout};
use crate::scalar::Real;

fn offset(n: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| {
        debug_assert!(i < n);
        acc * n + i
    })
}

fn for_each_index(n: usize, rank: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; rank];
    let total = n.pow(rank as u32);
    for _ in 0..total {
        f(&idx);
        for p in (0..rank).rev() {
            idx[p] += 1;
            if idx[p] < n {
                break;
            }
            idx[p] = 0;
        }
    }
}

/// Rank-`rank` tensor over an `n`-dimensional space with jet components.
#[derive(Clone, Debug)]
pub struct JTensor<T> {
    n: usize,
    rank: usize,
    data: Vec<Jet<T>>,
}

impl<T: Real> JTensor<T> {
    pub fn zeros(layout: &Arc<JetLayout>, n: usize, rank: usize) -> Self {
        Self { n, rank, data: vec![Jet::zero(layout); n.pow(rank as u32)] }
    }

    pub fn from_fn(n: usize, rank: usize, mut f: impl FnMut(&[usize]) -> Jet<T>) -> Self {
        let mut data = Vec::with_capacity(n.pow(rank as u32));
        for_each_index(n, rank, |i| data.push(f(i)));
        Self { n, rank, data }
    }

    pub fn try_from_fn(n: usize, rank: usize, mut f: impl FnMut(&[usize]) -> Result<Jet<T>>) -> Result<Self> {
        let mut data = Vec::with_capacity(n.pow(rank as u32));
        let mut err = None;
        for_each_index(n, rank, |i| {
            if err.is_none() {
                match f(i) {
                    Ok(j) => data.push(j),
                    Err(e) => err = Some(e),
                }
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(Self { n, rank, data }),
        }
    }

    /// Constant tensor lifted into `layout`.
    pub fn constant(layout: &Arc<JetLayout>, t: &Tensor<T>) -> Self {
        Self { n: t.n, rank: t.rank, data: t.data.iter().map(|&v| Jet::constant(layout, v)).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> usize {
        self.data[0].order()
    }

    pub fn layout(&self) -> &Arc<JetLayout> {
        self.data[0].layout()
    }

    #[inline]
    pub fn at(&self, idx: &[usize]) -> &Jet<T> {
        &self.data[offset(self.n, idx)]
    }

    #[inline]
    pub fn at_mut(&mut self, idx: &[usize]) -> &mut Jet<T> {
        let o = offset(self.n, idx);
        &mut self.data[o]
    }

    pub fn set(&mut self, idx: &[usize], v: Jet<T>) {
        *self.at_mut(idx) = v;
    }

    pub fn data(&self) -> &[Jet<T>] {
        &self.data
    }

    pub fn values(&self) -> Tensor<T> {
        Tensor { n: self.n, rank: self.rank, data: self.data.iter().map(|j| j.value()).collect() }
    }

    pub fn truncate(&self, k: usize) -> Self {
        Self { n: self.n, rank: self.rank, data: self.data.iter().map(|j| j.truncate(k)).collect() }
    }

    /// Componentwise partial derivative (one jet order lower).
    pub fn derivative(&self, var: usize) -> Result<Self> {
        let data = self.data.iter().map(|j| j.derivative(var)).collect::<Result<Vec<_>>>()?;
        Ok(Self { n: self.n, rank: self.rank, data })
    }

    /// Partial derivatives stacked in a new leading index: `out[m, ...] = d_m self[...]`.
    pub fn gradient(&self) -> Result<Self> {
        let mut data = Vec::with_capacity(self.data.len() * self.n);
        for m in 0..self.n {
            for j in &self.data {
                data.push(j.derivative(m)?);
            }
        }
        Ok(Self { n: self.n, rank: self.rank + 1, data })
    }

    pub fn scale(&self, s: T) -> Self {
        Self { n: self.n, rank: self.rank, data: self.data.iter().map(|j| j.scale(s)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            rank: self.rank,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            rank: self.rank,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn max_abs_coeff(&self) -> T {
        self.data.iter().fold(T::zero(), |m, j| m.max(j.max_abs_coeff()))
    }
}

/// Rank-`rank` tensor of plain numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<T> {
    n: usize,
    rank: usize,
    data: Vec<T>,
}

impl<T: Real> Tensor<T> {
    pub fn zeros(n: usize, rank: usize) -> Self {
        Self { n, rank, data: vec![T::zero(); n.pow(rank as u32)] }
    }

    pub fn from_fn(n: usize, rank: usize, mut f: impl FnMut(&[usize]) -> T) -> Self {
        let mut data = Vec::with_capacity(n.pow(rank as u32));
        for_each_index(n, rank, |i| data.push(f(i)));
        Self { n, rank, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, 2, |i| if i[0] == i[1] { T::one() } else { T::zero() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    #[inline]
    pub fn at(&self, idx: &[usize]) -> T {
        self.data[offset(self.n, idx)]
    }

    #[inline]
    pub fn set(&mut self, idx: &[usize], v: T) {
        let o = offset(self.n, idx);
        self.data[o] = v;
    }

    #[inline]
    pub fn add_at(&mut self, idx: &[usize], v: T) {
        let o = offset(self.n, idx);
        self.data[o] += v;
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data.iter().zip(&other.data).fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    pub fn scale(&self, s: T) -> Self {
        Self { n: self.n, rank: self.rank, data: self.data.iter().map(|&v| v * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { n: self.n, rank: self.rank, data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { n: self.n, rank: self.rank, data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect() }
    }

    pub fn to_f64(&self) -> Tensor<f64> {
        Tensor { n: self.n, rank: self.rank, data: self.data.iter().map(|v| v.to_f64_lossy()).collect() }
    }

    /// Rows of a rank-2 tensor.
    pub fn rows(&self) -> Vec<Vec<T>> {
        assert_eq!(self.rank, 2);
        self.data.chunks(self.n).map(|c| c.to_vec()).collect()
    }
}

/// Visits every multi-index of an `n`-dimensional rank-`rank` tensor in storage order.
pub fn multi_indices(n: usize, rank: usize, f: impl FnMut(&[usize])) {
    for_each_index(n, rank, f)
}
