//! Gauss rules, product rules on spheres, and deterministic summation.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{GeomError, Result};

/// `Γ(k/2)` for a positive integer `k`.
pub fn gamma_half(k: usize) -> f64 {
    assert!(k > 0, "gamma_half(0)");
    let mut v = if k % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut x = if k % 2 == 0 { 1.0 } else { 0.5 };
    while 2.0 * x < k as f64 - 1e-9 {
        v *= x;
        x += 1.0;
    }
    v
}

/// `Vol(S^{n-1}) = 2π^{n/2}/Γ(n/2)`.
pub fn sphere_volume(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n)
}

/// Neumaier-compensated sum in iteration order.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in it {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Evaluates `f` at every item in parallel and sums in input order, so the
/// result does not depend on the thread count.
pub fn ordered_par_sum<X: Sync, F: Fn(&X) -> Result<f64> + Sync>(items: &[X], f: F) -> Result<f64> {
    let vals: Vec<f64> = items.par_iter().map(&f).collect::<Result<Vec<_>>>()?;
    Ok(neumaier_sum(vals))
}

/// Gauss rule with `k` nodes for the weight `(1 - t²)^a` on `[-1, 1]`, `a > -1`
/// (Golub-Welsch on the symmetric Jacobi matrix).
pub fn gauss_gegenbauer(k: usize, a: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(k > 0 && a > -1.0);
    // monic Jacobi recurrence with α = β = a
    let mut jm = DMatrix::<f64>::zeros(k, k);
    for j in 1..k {
        let jf = j as f64;
        let num = 4.0 * jf * (jf + 2.0 * a) * (jf + a) * (jf + a);
        let d = 2.0 * jf + 2.0 * a;
        let den = d * d * (d + 1.0) * (d - 1.0);
        let b = (num / den).sqrt();
        jm[(j, j - 1)] = b;
        jm[(j - 1, j)] = b;
    }
    let mu0 = PI.sqrt() * gamma_ratio(a);
    let eig = SymmetricEigen::new(jm);
    let mut pairs: Vec<(f64, f64)> = (0..k)
        .map(|i| {
            let v = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v * v)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    // symmetrize to kill rounding asymmetry
    for i in 0..k / 2 {
        let j = k - 1 - i;
        let t = 0.5 * (pairs[j].0 - pairs[i].0);
        let w = 0.5 * (pairs[i].1 + pairs[j].1);
        pairs[i] = (-t, w);
        pairs[j] = (t, w);
    }
    if k % 2 == 1 {
        pairs[k / 2].0 = 0.0;
    }
    pairs.into_iter().unzip()
}

/// `Γ(a + 1)/Γ(a + 3/2)` for `a` a non-negative multiple of ½.
fn gamma_ratio(a: f64) -> f64 {
    let twice = (2.0 * a).round();
    if (twice - 2.0 * a).abs() < 1e-12 && twice >= 0.0 {
        let t = twice as usize;
        gamma_half(t + 2) / gamma_half(t + 3)
    } else {
        panic!("gauss_gegenbauer: exponent {a} is not a half-integer");
    }
}

pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    gauss_gegenbauer(k, 0.0)
}

/// Gauss-Legendre on `[lo, hi]`.
pub fn gauss_legendre_interval(k: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(k);
    let h = 0.5 * (hi - lo);
    (x.iter().map(|t| lo + h * (t + 1.0)).collect(), w.iter().map(|v| v * h).collect())
}

/// Product rule on the unit sphere `S^{n-1} ⊂ ℝ^n`, exact for polynomials of
/// total degree `<= degree`.
#[derive(Clone, Debug)]
pub struct SphereQuadrature {
    pub n: usize,
    pub degree: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

pub const MAX_SPHERE_DEGREE: usize = 30;

impl SphereQuadrature {
    pub fn new(n: usize, degree: usize) -> Result<Self> {
        if !(2..=8).contains(&n) {
            return Err(GeomError::Usage(format!("sphere quadrature supports n in 2..=8, got {n}")));
        }
        if degree > MAX_SPHERE_DEGREE {
            return Err(GeomError::Usage(format!("sphere quadrature degree {degree} exceeds {MAX_SPHERE_DEGREE}")));
        }
        let (nodes, weights) = rule(n, degree);
        Ok(Self { n, degree, nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        neumaier_sum(self.weights.iter().copied())
    }

    /// `∫_{S^{n-1}} f dσ`, evaluated in parallel with an ordered sum.
    pub fn integrate<F: Fn(&[f64]) -> Result<f64> + Sync>(&self, f: F) -> Result<f64> {
        let idx: Vec<usize> = (0..self.len()).collect();
        ordered_par_sum(&idx, |&i| Ok(self.weights[i] * f(&self.nodes[i])?))
    }
}

fn rule(n: usize, degree: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    if n == 2 {
        let k = degree + 1;
        let h = 2.0 * PI / k as f64;
        let nodes = (0..k).map(|j| vec![(j as f64 * h).cos(), (j as f64 * h).sin()]).collect();
        return (nodes, vec![h; k]);
    }
    let (sub_nodes, sub_w) = rule(n - 1, degree);
    let (t, w) = gauss_gegenbauer(degree / 2 + 1, (n as f64 - 3.0) / 2.0);
    let mut nodes = Vec::with_capacity(t.len() * sub_w.len());
    let mut weights = Vec::with_capacity(t.len() * sub_w.len());
    for (ti, wi) in t.iter().zip(&w) {
        let s = (1.0 - ti * ti).max(0.0).sqrt();
        for (y, wy) in sub_nodes.iter().zip(&sub_w) {
            let mut x = Vec::with_capacity(n);
            x.push(*ti);
            x.extend(y.iter().map(|v| v * s));
            nodes.push(x);
            weights.push(wi * wy);
        }
    }
    (nodes, weights)
}
