//! Truncated multivariate Taylor jets (order <= 3) with exact truncated arithmetic.
//!
//! A [`Jet`] stores Taylor coefficients `f^(alpha)(p) / alpha!` for every
//! multi-index of total degree at most the context order. All arithmetic is the
//! exact truncation of the corresponding polynomial operation, so derivatives
//! of composite expressions are exact up to rounding.

mod layout;
pub mod fd;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

pub use layout::{JetLayout, MAX_DIM, MAX_ORDER};

use crate::error::{GeomError, Result};
use crate::scalar::Real;

/// Evaluation context: number of variables, truncation order and seed point.
#[derive(Clone, Debug)]
pub struct JetContext<T> {
    layout: Arc<JetLayout>,
    seed: Vec<T>,
}

impl<T: Real> JetContext<T> {
    pub fn new(seed: &[T], order: usize) -> Result<Self> {
        let layout = JetLayout::get(seed.len(), order)?;
        Ok(Self { layout, seed: seed.to_vec() })
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn order(&self) -> usize {
        self.layout.order()
    }

    pub fn seed(&self) -> &[T] {
        &self.seed
    }

    pub fn layout(&self) -> &Arc<JetLayout> {
        &self.layout
    }

    /// Jet of the `i`-th coordinate function at the seed point.
    pub fn lift_coordinate(&self, i: usize) -> Result<Jet<T>> {
        if i >= self.dim() {
            return Err(GeomError::Usage(format!(
                "coordinate index {i} out of range for dimension {}",
                self.dim()
            )));
        }
        let mut j = Jet::constant(&self.layout, self.seed[i]);
        if self.order() > 0 {
            j.coeffs[1 + i] = T::one();
        }
        Ok(j)
    }

    /// All coordinate jets.
    pub fn coordinates(&self) -> Vec<Jet<T>> {
        (0..self.dim()).map(|i| self.lift_coordinate(i).unwrap()).collect()
    }

    pub fn constant(&self, v: T) -> Jet<T> {
        Jet::constant(&self.layout, v)
    }
}

/// Operation selector for [`jet_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JetOp {
    Add,
    Sub,
    Mul,
    Div,
    Sqrt,
    Pow,
    Exp,
    Log,
    Sin,
    Cos,
    Atan2,
}

/// Truncated Taylor expansion of a scalar field.
#[derive(Clone)]
pub struct Jet<T> {
    layout: Arc<JetLayout>,
    coeffs: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Jet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("dim", &self.layout.dim())
            .field("order", &self.layout.order())
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl<T: Real> PartialEq for Jet<T> {
    fn eq(&self, other: &Self) -> bool {
        self.same_layout(other) && self.coeffs == other.coeffs
    }
}

impl<T: Real> Jet<T> {
    pub fn constant(layout: &Arc<JetLayout>, v: T) -> Self {
        let mut coeffs = vec![T::zero(); layout.len()];
        coeffs[0] = v;
        Self { layout: layout.clone(), coeffs }
    }

    pub fn zero(layout: &Arc<JetLayout>) -> Self {
        Self::constant(layout, T::zero())
    }

    /// Builds a jet from raw Taylor coefficients in layout order.
    pub fn from_coeffs(layout: &Arc<JetLayout>, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != layout.len() {
            return Err(GeomError::Usage(format!(
                "expected {} coefficients, got {}",
                layout.len(),
                coeffs.len()
            )));
        }
        Ok(Self { layout: layout.clone(), coeffs })
    }

    pub fn layout(&self) -> &Arc<JetLayout> {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn order(&self) -> usize {
        self.layout.order()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    #[inline]
    pub fn value(&self) -> T {
        self.coeffs[0]
    }

    /// Taylor coefficient of the monomial with the given exponents (0 if absent).
    pub fn coeff(&self, exps: &[u8]) -> T {
        self.layout.index_of(exps).map_or(T::zero(), |i| self.coeffs[i])
    }

    /// Partial derivative `d^k f / dx_{vars[0]} ... dx_{vars[k-1]}` at the seed.
    pub fn partial(&self, vars: &[usize]) -> T {
        let mut e = vec![0u8; self.dim()];
        for &v in vars {
            e[v] += 1;
        }
        match self.layout.index_of(&e) {
            Some(i) => self.coeffs[i] * T::lit(self.layout.factorial(i)),
            None => T::zero(),
        }
    }

    /// Gradient at the seed.
    pub fn gradient(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.partial(&[i])).collect()
    }

    fn same_layout(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.layout, &other.layout)
    }

    fn check(&self, other: &Self) {
        assert!(
            self.same_layout(other),
            "jet layout mismatch: ({}, {}) vs ({}, {})",
            self.dim(),
            self.order(),
            other.dim(),
            other.order()
        );
    }

    /// `d/dx_var`, one order lower.
    pub fn derivative(&self, var: usize) -> Result<Jet<T>> {
        let lower = self
            .layout
            .lower()
            .ok_or(GeomError::JetOrder { needed: 1, have: 0 })?
            .clone();
        let mut coeffs = vec![T::zero(); lower.len()];
        for &(src, dst, m) in self.layout.derivative_map(var) {
            coeffs[dst as usize] = self.coeffs[src as usize] * T::lit(m);
        }
        Ok(Jet { layout: lower, coeffs })
    }

    /// Drops all terms above total degree `k`.
    pub fn truncate(&self, k: usize) -> Jet<T> {
        if k >= self.order() {
            return self.clone();
        }
        let layout = self.layout.truncated(k);
        let coeffs = self.coeffs[..layout.len()].to_vec();
        Jet { layout, coeffs }
    }

    /// Truncates to the layout of `other` (which must have the same dimension and lower order).
    pub fn truncate_like(&self, other: &Jet<T>) -> Jet<T> {
        self.truncate(other.order())
    }

    pub fn scale(&self, s: T) -> Jet<T> {
        Jet { layout: self.layout.clone(), coeffs: self.coeffs.iter().map(|&c| c * s).collect() }
    }

    pub fn add_scalar(&self, s: T) -> Jet<T> {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    /// `self += a * b` without allocating a temporary product.
    pub fn fma_assign(&mut self, a: &Jet<T>, b: &Jet<T>) {
        self.check(a);
        self.check(b);
        for &(i, j, k) in self.layout.products() {
            self.coeffs[k as usize] += a.coeffs[i as usize] * b.coeffs[j as usize];
        }
    }

    pub fn add_assign_scaled(&mut self, a: &Jet<T>, s: T) {
        self.check(a);
        for (c, &x) in self.coeffs.iter_mut().zip(&a.coeffs) {
            *c += x * s;
        }
    }

    fn domain_err(&self, op: &'static str, detail: impl Into<String>) -> GeomError {
        GeomError::Domain { op, point: vec![self.value().to_f64_lossy()], detail: detail.into() }
    }

    /// Applies a univariate function given its Taylor coefficients
    /// `[f(a), f'(a), f''(a)/2, f'''(a)/6]` at `a = self.value()`.
    fn compose(&self, taylor: [T; 4]) -> Jet<T> {
        let order = self.order();
        let mut h = self.clone();
        h.coeffs[0] = T::zero();
        let mut out = Jet::constant(&self.layout, taylor[0]);
        if order == 0 {
            return out;
        }
        out.add_assign_scaled(&h, taylor[1]);
        if order >= 2 {
            let h2 = &h * &h;
            out.add_assign_scaled(&h2, taylor[2]);
            if order >= 3 {
                let h3 = &h2 * &h;
                out.add_assign_scaled(&h3, taylor[3]);
            }
        }
        out
    }

    pub fn recip(&self) -> Result<Jet<T>> {
        let a = self.value();
        if a == T::zero() || !a.is_finite() {
            return Err(self.domain_err("div", "reciprocal of zero-valued jet"));
        }
        let r = a.recip();
        Ok(self.compose([r, -r * r, r * r * r, -r * r * r * r]))
    }

    pub fn try_div(&self, other: &Jet<T>) -> Result<Jet<T>> {
        self.check(other);
        Ok(self * &other.recip()?)
    }

    pub fn sqrt(&self) -> Result<Jet<T>> {
        let a = self.value();
        if a <= T::zero() || !a.is_finite() {
            return Err(self.domain_err("sqrt", "square root of nonpositive value"));
        }
        let s = a.sqrt();
        let half = T::lit(0.5);
        let d1 = half / s;
        let d2 = -T::lit(0.125) / (s * a);
        let d3 = T::lit(1.0 / 16.0) / (s * a * a);
        Ok(self.compose([s, d1, d2, d3]))
    }

    /// `self^p` for real `p`; requires a positive value unless `p` is a nonnegative integer.
    pub fn powf(&self, p: T) -> Result<Jet<T>> {
        let a = self.value();
        let int_p = p.fract() == T::zero() && p >= T::zero();
        if int_p {
            let n = p.to_i32().unwrap_or(0);
            return Ok(self.powi(n as u32));
        }
        if a <= T::zero() {
            return Err(self.domain_err("pow", "non-integer power of nonpositive value"));
        }
        let one = T::one();
        let two = T::lit(2.0);
        let six = T::lit(6.0);
        let f0 = a.powf(p);
        let f1 = p * a.powf(p - one);
        let f2 = p * (p - one) * a.powf(p - two) / two;
        let f3 = p * (p - one) * (p - two) * a.powf(p - T::lit(3.0)) / six;
        Ok(self.compose([f0, f1, f2, f3]))
    }

    pub fn powi(&self, n: u32) -> Jet<T> {
        let mut acc = Jet::constant(&self.layout, T::one());
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn exp(&self) -> Jet<T> {
        let e = self.value().exp();
        self.compose([e, e, e / T::lit(2.0), e / T::lit(6.0)])
    }

    pub fn ln(&self) -> Result<Jet<T>> {
        let a = self.value();
        if a <= T::zero() || !a.is_finite() {
            return Err(self.domain_err("log", "logarithm of nonpositive value"));
        }
        let r = a.recip();
        Ok(self.compose([a.ln(), r, -r * r / T::lit(2.0), r * r * r / T::lit(3.0)]))
    }

    pub fn sin(&self) -> Jet<T> {
        let (s, c) = self.value().sin_cos();
        self.compose([s, c, -s / T::lit(2.0), -c / T::lit(6.0)])
    }

    pub fn cos(&self) -> Jet<T> {
        let (s, c) = self.value().sin_cos();
        self.compose([c, -s, -c / T::lit(2.0), s / T::lit(6.0)])
    }

    /// Four-quadrant arctangent of `self / x`.
    pub fn atan2(&self, x: &Jet<T>) -> Result<Jet<T>> {
        self.check(x);
        let (y0, x0) = (self.value(), x.value());
        let r2 = x0 * x0 + y0 * y0;
        if r2 == T::zero() {
            return Err(self.domain_err("atan2", "atan2 at the origin"));
        }
        // theta = theta0 + atan(t), t = (x0*y - y0*x) / (x0*x + y0*y), t(seed) = 0
        let num = &x.scale(-y0) + &self.scale(x0);
        let den = &x.scale(x0) + &self.scale(y0);
        let t = num.try_div(&den)?;
        let mut out = t.compose([T::zero(), T::one(), T::zero(), -T::one() / T::lit(3.0)]);
        out.coeffs[0] = y0.atan2(x0);
        Ok(out)
    }

    pub fn max_abs_coeff(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }
}

/// Binary/unary jet arithmetic by operation tag; unary ops ignore `b`.
pub fn jet_arith<T: Real>(a: &Jet<T>, b: &Jet<T>, op: JetOp) -> Result<Jet<T>> {
    if a.dim() != b.dim() || a.order() != b.order() {
        return Err(GeomError::Usage(format!(
            "jet shape mismatch: ({}, {}) vs ({}, {})",
            a.dim(),
            a.order(),
            b.dim(),
            b.order()
        )));
    }
    match op {
        JetOp::Add => Ok(a + b),
        JetOp::Sub => Ok(a - b),
        JetOp::Mul => Ok(a * b),
        JetOp::Div => a.try_div(b),
        JetOp::Sqrt => a.sqrt(),
        JetOp::Pow => {
            if a.value() <= T::zero() {
                return Err(a.domain_err("pow", "jet power requires a positive base"));
            }
            Ok((&a.ln()? * b).exp())
        }
        JetOp::Exp => Ok(a.exp()),
        JetOp::Log => a.ln(),
        JetOp::Sin => Ok(a.sin()),
        JetOp::Cos => Ok(a.cos()),
        JetOp::Atan2 => a.atan2(b),
    }
}

impl<'a, T: Real> Add<&'a Jet<T>> for &'a Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: &'a Jet<T>) -> Jet<T> {
        self.check(rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(&a, &b)| a + b).collect();
        Jet { layout: self.layout.clone(), coeffs }
    }
}

impl<'a, T: Real> Sub<&'a Jet<T>> for &'a Jet<T> {
    type Output = Jet<T>;
    fn sub(self, rhs: &'a Jet<T>) -> Jet<T> {
        self.check(rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(&a, &b)| a - b).collect();
        Jet { layout: self.layout.clone(), coeffs }
    }
}

impl<'a, T: Real> Mul<&'a Jet<T>> for &'a Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: &'a Jet<T>) -> Jet<T> {
        let mut out = Jet::zero(&self.layout);
        out.fma_assign(self, rhs);
        out
    }
}

impl<T: Real> Neg for &Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        self.scale(-T::one())
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl<T: Real> $tr<Jet<T>> for Jet<T> {
            type Output = Jet<T>;
            fn $m(self, rhs: Jet<T>) -> Jet<T> {
                (&self).$m(&rhs)
            }
        }
        impl<'a, T: Real> $tr<&'a Jet<T>> for Jet<T> {
            type Output = Jet<T>;
            fn $m(self, rhs: &'a Jet<T>) -> Jet<T> {
                (&self).$m(rhs)
            }
        }
        impl<'a, T: Real> $tr<Jet<T>> for &'a Jet<T> {
            type Output = Jet<T>;
            fn $m(self, rhs: Jet<T>) -> Jet<T> {
                self.$m(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl<T: Real> Neg for Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        self.scale(-T::one())
    }
}

impl<T: Real> Add<T> for Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: T) -> Jet<T> {
        self.add_scalar(rhs)
    }
}

impl<T: Real> Add<T> for &Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: T) -> Jet<T> {
        self.add_scalar(rhs)
    }
}

impl<T: Real> Mul<T> for Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: T) -> Jet<T> {
        self.scale(rhs)
    }
}

impl<T: Real> Mul<T> for &Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: T) -> Jet<T> {
        self.scale(rhs)
    }
}
