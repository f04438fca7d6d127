//! Dense exterior algebra on ℝⁿ (n <= 8): a form is a coefficient per subset bitmask.

use crate::scalar::Real;
use crate::tensor::Tensor;

#[derive(Clone, Debug, PartialEq)]
pub struct Form<T> {
    n: usize,
    coeffs: Vec<T>,
}

fn wedge_sign(a: u32, b: u32) -> bool {
    // parity of #{(i in a, j in b) : i > j}
    let mut count = 0u32;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        count += (a >> (j + 1)).count_ones();
        bb &= bb - 1;
    }
    count % 2 == 1
}

impl<T: Real> Form<T> {
    pub fn zero(n: usize) -> Self {
        assert!(n <= 8);
        Self { n, coeffs: vec![T::zero(); 1 << n] }
    }

    pub fn scalar(n: usize, v: T) -> Self {
        let mut f = Self::zero(n);
        f.coeffs[0] = v;
        f
    }

    pub fn one_form(v: &[T]) -> Self {
        let mut f = Self::zero(v.len());
        for (i, &c) in v.iter().enumerate() {
            f.coeffs[1 << i] = c;
        }
        f
    }

    /// From antisymmetric components `β_ij`: `β = Σ_{i<j} β_ij dx^i ∧ dx^j`.
    pub fn two_form(b: &Tensor<T>) -> Self {
        let n = b.n();
        let mut f = Self::zero(n);
        for i in 0..n {
            for j in (i + 1)..n {
                f.coeffs[(1 << i) | (1 << j)] = b.at(&[i, j]);
            }
        }
        f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Coefficient of `dx^{i_1} ∧ ... ∧ dx^{i_k}` for increasing indices in `mask`.
    pub fn coeff(&self, mask: u32) -> T {
        self.coeffs[mask as usize]
    }

    pub fn top(&self) -> T {
        self.coeffs[(1usize << self.n) - 1]
    }

    pub fn wedge(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n);
        for (a, &ca) in self.coeffs.iter().enumerate() {
            if ca == T::zero() {
                continue;
            }
            for (b, &cb) in other.coeffs.iter().enumerate() {
                if cb == T::zero() || a & b != 0 {
                    continue;
                }
                let v = ca * cb;
                if wedge_sign(a as u32, b as u32) {
                    out.coeffs[a | b] -= v;
                } else {
                    out.coeffs[a | b] += v;
                }
            }
        }
        out
    }

    pub fn power(&self, k: usize) -> Self {
        let mut acc = Self::scalar(self.n, T::one());
        for _ in 0..k {
            acc = acc.wedge(self);
        }
        acc
    }

    /// Components `η^i` with `η = Σ_i η^i (∂_i ⌟ dx^1∧...∧dx^n)` for an (n-1)-form.
    pub fn hodge_flux_components(&self) -> Vec<T> {
        let full = (1u32 << self.n) - 1;
        (0..self.n)
            .map(|i| {
                let c = self.coeff(full & !(1 << i));
                if i % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
            .collect()
    }
}
