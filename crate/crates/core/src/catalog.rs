//! Explicit test geometries and a seeded generator of almost-Kähler structures.

use std::f64::consts::PI;
use std::marker::PhantomData;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::jet::{Jet, JetLayout};
use crate::linalg;
use crate::riemann::{MetricChart, StructureFlag};
use crate::scalar::Real;
use crate::tensor::{JTensor, Tensor};

fn delta<T: Real>(layout: &Arc<JetLayout>, n: usize) -> JTensor<T> {
    JTensor::from_fn(n, 2, |i| Jet::constant(layout, if i[0] == i[1] { T::one() } else { T::zero() }))
}

fn radius_sq<T: Real>(x: &[Jet<T>]) -> Jet<T> {
    let mut acc = Jet::zero(x[0].layout());
    for xi in x {
        acc.fma_assign(xi, xi);
    }
    acc
}

fn norm_sq<T: Real>(p: &[T]) -> T {
    p.iter().map(|&v| v * v).sum()
}

/// The standard constant structure: `J ∂_{2a} = ∂_{2a+1}` (0-based coordinates).
pub fn standard_j_values<T: Real>(n: usize) -> Tensor<T> {
    Tensor::from_fn(n, 2, |i| {
        let (r, c) = (i[0], i[1]);
        if c % 2 == 0 && r == c + 1 {
            T::one()
        } else if c % 2 == 1 && r + 1 == c {
            -T::one()
        } else {
            T::zero()
        }
    })
}

/// Standard symplectic form `Ω_ij = ω₀(∂_i, ∂_j)`, `ω₀ = Σ dx^{2a} ∧ dx^{2a+1}`.
pub fn standard_omega_values<T: Real>(n: usize) -> Tensor<T> {
    Tensor::from_fn(n, 2, |i| {
        let (r, c) = (i[0], i[1]);
        if r % 2 == 0 && c == r + 1 {
            T::one()
        } else if c % 2 == 0 && r == c + 1 {
            -T::one()
        } else {
            T::zero()
        }
    })
}

/// Euclidean space; even dimensions carry the standard Kähler structure.
#[derive(Clone, Debug)]
pub struct Euclidean<T> {
    pub n: usize,
    _t: PhantomData<T>,
}

impl<T> Euclidean<T> {
    pub fn new(n: usize) -> Self {
        Self { n, _t: PhantomData }
    }
}

impl<T: Real> MetricChart<T> for Euclidean<T> {
    fn name(&self) -> String {
        format!("euclidean{}", self.n)
    }
    fn dim(&self) -> usize {
        self.n
    }
    fn metric(&self, x: &[Jet<T>]) -> Result<JTensor<T>> {
        Ok(delta(x[0].layout(), self.n))
    }
    fn complex_structure(&self, x: &[Jet<T>]) -> Result<Option<JTensor<T>>> {
        if self.n % 2 == 1 {
            return Ok(None);
        }
        Ok(Some(JTensor::constant(x[0].layout(), &standard_j_values(self.n))))
    }
    fn structure(&self) -> StructureFlag {
        if self.n % 2 == 0 {
            StructureFlag::Kahler
        } else {
            StructureFlag::MetricOnly
        }
    }
}

/// Unit round sphere `S^n` in stereographic coordinates, `g = 4|dx|²/(1+|x|²)²`.
#[derive(Clone, Debug)]
pub struct RoundSphere<T> {
    pub n: usize,
    _t: PhantomData<T>,
}

impl<T> RoundSphere<T> {
    pub fn new(n: usize) -> Self {
        Self { n, _t: PhantomData }
    }
}

impl<T: Real> MetricChart<T> for RoundSphere<T> {
    fn name(&self) -> String {
        format!("sphere{}", self.n)
    }
    fn dim(&self) -> usize {
        self.n
    }
    fn metric(&self, x: &[Jet<T>]) -> Result<JTensor<T>> {
        let f = (radius_sq(x) + T::one()).powi(2).recip()?.scale(T::lit(4.0));
        let l = x[0].layout().clone();
        Ok(JTensor::from_fn(self.n, 2, |i| if i[0] == i[1] { f.clone() } else { Jet::zero(&l) }))
    }
}

/// Unit 2-sphere in polar coordinates `(θ, φ)`: `g = dθ² + sin²θ dφ²`.
#[derive(Clone, Debug, Default)]
pub struct SpherePolar<T>(PhantomData<T>);

impl<T> SpherePolar<T> {
    pub fn new() -> Self {
        Self(PhantomData)
    }
}

impl<T: Real> MetricChart<T> for SpherePolar<T> {
    fn name(&self) -> String {
        "sphere2_polar".into()
    }
    fn dim(&self) -> usize {
        2
    }
    fn in_domain(&self, p: &[T]) -> bool {
        p[0] > T::zero() && p[0] < T::PI()
    }
    fn metric(&self, x: &[Jet<T>]) -> Result<JTensor<T>> {
        let l = x[0].layout().clone();
        let s = x[0].sin();
        let s2 = &s * &s;
        Ok(JTensor::from_fn(2, 2, |i| match (i[0], i[1]) {
            (0, 0) => Jet::constant(&l, T::one()),
            (1, 1) => s2.clone(),
            _ => Jet::zero(&l),
        }))
    }
}

/// Flat plane in polar coordinates `(r, θ)`.
#[derive(Clone, Debug, Default)]
pub struct PolarPlane<T>(PhantomData<T>);

impl<T> PolarPlane<T> {
    pub fn new() -> Self {
        Self(PhantomData)
    }
}

impl<T: Real> MetricChart<T> for PolarPlane<T> {
    fn name(&self) -> String {
        "polar_plane".into()
    }
    fn dim(&self) -> usize {
        2
    }
    fn in_domain(&self, p: &[T]) -> bool {
        p[0] > T::zero()
    }
    fn metric(&self, x: &[Jet<T>]) -> Result<JTensor<T>> {
        let l = x[0].layout().clone();
        let r2 = &x[0] * &x[0];
        Ok(JTensor::from_fn(2, 2, |i| match (i[0], i[1]) {
            (0, 0) => Jet::constant(&l, T::one()),
            (1, 1) => r2.clone(),
            _ => Jet::zero(&l),
        }))
    }
}

/// Conformally flat metric `ψ(r)^k δ` with `ψ = 1 + c / r^p`.
#[derive(Clone, Debug)]
pub struct ConformallyFlat<T> {
    pub n: usize,
    pub c: f64,
    pub p: i32,
    pub k: i32,
    pub with_j: bool,
    pub label: String,
    _t: PhantomData<T>,
}

impl<T> ConformallyFlat<T> {
    /// Time-symmetric Schwarzschild slice `(1 + m/2r)^4 δ` in dimension 3.
    pub fn schwarzschild(mass: f64) -> Self {
        Self { n: 3, c: mass / 2.0, p: 1, k: 4, with_j: false, label: "schwarzschild".into(), _t: PhantomData }
    }

    /// `(1 + m/2r²)² δ` on ℝ⁴ with the standard constant J (almost-Hermitian, not almost-Kähler).
    pub fn conformal4(mass: f64) -> Self {
        Self { n: 4, c: mass / 2.0, p: 2, k: 2, with_j: true, label: "conformal4".into(), _t: PhantomData }
    }
}

impl<T: Real> MetricChart<T> for ConformallyFlat<T> {
    fn name(&self) -> String {
        self.label.clone()
    }
    fn dim(&self) -> usize {
        self.n
    }
    fn in_domain(&self, p: &[T]) -> bool {
        norm_sq(p) > T::lit(1e-12)
    }
    fn metric(&self, x: &[Jet<T>]) -> Result<JTensor<T>> {
        let r2 = radius_sq(x);
        let rp = r2.powf(T::lit(self.p as f64 / 2.0))?;
        let psi = rp.recip()?.scale(T::lit(self.c)) + T::one();
        let f = psi.powi(self.k as u32);
        let l = x[0].layout().clone();
        Ok(JTensor::from_fn(self.n, 2, |i| if i[0] == i[1] { f.clone() } else { Jet::zero(&l) }))
    }
    fn complex_structure(&self, x: &[Jet<T>]) -> Result<Option<JTensor<T>>> {
        Ok(self.with_j.then(|| JTensor::constant(x[0].layout(), &standard_j_values(self.n))))
    }
    fn structure(&self) -> StructureFlag {
        if self.with_j {
            StructureFlag::Unknown
        } else {
            StructureFlag::MetricOnly
        }
    }
}

/// Radial profile of a `U(m)`-invariant Kähler potential `Φ(u)`, `u = |z|²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Potential {
    /// `Φ' = sqrt(u² + a⁴)/u`.
    EguchiHanson { a: f64 },
    /// `Φ = u + c log u`.
    Burns { c: f64 },
    /// `Φ = log(1 + u)`.
    FubiniStudy,
    /// `Φ = u`.
    Flat,
}

impl Potential {
    /// `(Φ'(u), Φ''(u))` as jets.
    pub fn derivatives<T: Real>(&self, u: &Jet<T>) -> Result<(Jet<T>, Jet<T>)> {
        match *self {
            Potential::EguchiHanson { a } => {
                let a4 = T::lit(a.powi(4));
                let w = (u * u + a4).sqrt()?;
                let ui = u.recip()?;
                let d1 = &w * &ui;
                let d2 = (&(&ui * &ui) * &w.recip()?).scale(-a4);
                Ok((d1, d2))
            }
            Potential::Burns { c } => {
                let ui = u.recip()?;
                let c = T::lit(c);
                Ok((ui.scale(c) + T::one(), (&ui * &ui).scale(-c)))
            }
            Potential::FubiniStudy => {
                let w = (u + T::one()).recip()?;
                let w2 = &w * &w;
                Ok((w, -w2))
            }
            Potential::Flat => {
                let l = u.layout();
                Ok((Jet::constant(l, T::one()), Jet::zero(l)))
            }
        }
    }

    /// `(Φ', Φ'')` at a plain value.
    pub fn derivatives_f64(&self, u: f64) -> (f64, f64) {
        match *self {
            Potential::EguchiHanson { a } => {
                let w = (u * u + a.powi(4)).sqrt();
                (w / u, -a.powi(4) / (u * u * w))
            }
            Potential::Burns { c } => (1.0 + c / u, -c / (u * u)),
            Potential::FubiniStudy => (1.0 / (1.0 + u), -1.0 / ((1.0 + u) * (1.0 + u))),
            Potential::Flat => (1.0, 0.0),
        }
    }
}

/// Kähler metric on (a domain of) ℂ^m from a `U(m)`-invariant potential, with
/// `z_a = x_{2a} + i x_{2a+1}` and the standard constant J.
#[derive(Clone, Debug)]
pub struct UnitaryKahler<T> {
    pub m: usize,
    pub potential: Potential,
    /// Domain guard `|z|² > u_min`.
    pub u_min: f64,
    pub label: String,
    _t: PhantomData<T>,
}

impl<T> UnitaryKahler<T> {
    pub fn new(m: usize, potential: Potential, u_min: f64, label: impl Into<String>) -> Self {
        Self { m, potential, u_min, label: label.into(), _t: PhantomData }
    }
}

impl<T: Real> MetricChart<T> for UnitaryKahler<T> {
    fn name(&self) -> String {
        self.label.clone()
    }
    fn dim(&self) -> usize {
        2 * self.m
    }
    fn in_domain(&self, p: &[T]) -> bool {
        norm_sq(p).to_f64_lossy() > self.u_min
    }
    fn metric(&self, x: &[Jet<T>]) -> Result<JTensor<T>> {
        let m = self.m;
        let u = radius_sq(x);
        let (d1, d2) = self.potential.derivatives(&u)?;
        // h_{a b̄} = Φ' δ_ab + Φ'' z̄_a z_b = p_ab + i q_ab
        let mut p = vec![vec![Jet::zero(u.layout()); m]; m];
        let mut q = vec![vec![Jet::zero(u.layout()); m]; m];
        for a in 0..m {
            for b in 0..m {
                let (xa, ya, xb, yb) = (&x[2 * a], &x[2 * a + 1], &x[2 * b], &x[2 * b + 1]);
                // z̄_a z_b = (xa xb + ya yb) + i (xa yb - ya xb)
                let re = &(xa * xb) + &(ya * yb);
                let im = &(xa * yb) - &(ya * xb);
                p[a][b] = &d2 * &re;
                q[a][b] = &d2 * &im;
                if a == b {
                    p[a][b] = &p[a][b] + &d1;
                }
            }
        }
        Ok(JTensor::from_fn(2 * m, 2, |i| {
            let (a, ra) = (i[0] / 2, i[0] % 2);
            let (b, rb) = (i[1] / 2, i[1] % 2);
            match (ra, rb) {
                (0, 0) | (1, 1) => p[a][b].clone(),
                (0, 1) => q[a][b].clone(),
                _ => -&q[a][b],
            }
        }))
    }
    fn complex_structure(&self, x: &[Jet<T>]) -> Result<Option<JTensor<T>>> {
        Ok(Some(JTensor::constant(x[0].layout(), &standard_j_values(2 * self.m))))
    }
    fn structure(&self) -> StructureFlag {
        StructureFlag::Kahler
    }
}

/// Seeded smooth perturbation `h = δ + ε Σ_t S_t env(x) cos(k_t·x + φ_t)` turned into a
/// compatible pair `(g, J)` for the standard symplectic form by the polar construction.
#[derive(Clone, Debug)]
pub struct RandomAlmostKahler<T> {
    pub n: usize,
    pub seed: u64,
    pub eps: f64,
    /// Envelope `(1 + |x|²)^{-decay/2}`.
    pub decay: f64,
    terms: Vec<(Tensor<f64>, Vec<f64>, f64)>,
    _t: PhantomData<T>,
}

impl<T> RandomAlmostKahler<T> {
    pub fn new(m: usize, seed: u64) -> Self {
        Self::with_params(m, seed, 0.15, 3, 0.0)
    }

    pub fn with_params(m: usize, seed: u64, eps: f64, count: usize, decay: f64) -> Self {
        let n = 2 * m;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut terms = Vec::with_capacity(count);
        for _ in 0..count {
            let mut s = Tensor::<f64>::zeros(n, 2);
            for i in 0..n {
                for j in i..n {
                    let v: f64 = rng.gen_range(-1.0..1.0);
                    s.set(&[i, j], v);
                    s.set(&[j, i], v);
                }
            }
            let fro = s.data().iter().map(|v| v * v).sum::<f64>().sqrt();
            let s = s.scale(1.0 / fro);
            let k: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let phase = rng.gen_range(0.0..2.0 * PI);
            terms.push((s, k, phase));
        }
        Self { n, seed, eps, decay, terms, _t: PhantomData }
    }
}

impl<T: Real> RandomAlmostKahler<T> {
    fn background(&self, x: &[Jet<T>]) -> Result<JTensor<T>> {
        let n = self.n;
        let layout = x[0].layout().clone();
        let env = if self.decay == 0.0 {
            Jet::constant(&layout, T::one())
        } else {
            (radius_sq(x) + T::one()).powf(T::lit(-self.decay / 2.0))?
        };
        let mut h = delta(&layout, n);
        for (s, k, phase) in &self.terms {
            let mut arg = Jet::constant(&layout, T::lit(*phase));
            for (xi, &ki) in x.iter().zip(k) {
                arg.add_assign_scaled(xi, T::lit(ki));
            }
            let w = (&arg.cos() * &env).scale(T::lit(self.eps));
            for i in 0..n {
                for j in 0..n {
                    h.at_mut(&[i, j]).add_assign_scaled(&w, T::lit(s.at(&[i, j])));
                }
            }
        }
        Ok(h)
    }
}

/// `(g, J)` compatible with the constant form `omega` built from the positive metric `h`:
/// `ω(u,v) = h(Au,v)`, `J = A(-A²)^{-1/2}`, `g(u,v) = ω(u, -J v)`... i.e. `g = -Jᵀ Ω`.
pub fn polar_compatible_structure<T: Real>(h: &JTensor<T>, omega: &Tensor<T>) -> Result<(JTensor<T>, JTensor<T>)> {
    let layout = h.layout().clone();
    let om = JTensor::constant(&layout, omega);
    let hi = linalg::jet_inverse(h)?;
    let a = linalg::jet_matmul(&hi, &om).scale(-T::one());
    let b = linalg::jet_matmul(&a, &a).scale(-T::one());
    let (_, b_isqrt) = linalg::jet_sqrt_pair(&b)?;
    let j = linalg::jet_matmul(&a, &b_isqrt);
    let g = linalg::jet_matmul(&linalg::jet_transpose(&j), &om).scale(-T::one());
    let g = g.add(&linalg::jet_transpose(&g)).scale(T::lit(0.5));
    Ok((g, j))
}

impl<T: Real> MetricChart<T> for RandomAlmostKahler<T> {
    fn name(&self) -> String {
        format!("random_ak{}_seed{}", self.n, self.seed)
    }
    fn dim(&self) -> usize {
        self.n
    }
    fn metric(&self, x: &[Jet<T>]) -> Result<JTensor<T>> {
        Ok(self.fields(x)?.0)
    }
    fn complex_structure(&self, x: &[Jet<T>]) -> Result<Option<JTensor<T>>> {
        Ok(self.fields(x)?.1)
    }
    fn fields(&self, x: &[Jet<T>]) -> Result<(JTensor<T>, Option<JTensor<T>>)> {
        let h = self.background(x)?;
        let (g, j) = polar_compatible_structure(&h, &standard_omega_values(self.n))?;
        Ok((g, Some(j)))
    }
    fn structure(&self) -> StructureFlag {
        StructureFlag::AlmostKahlerNonkahler
    }
}

/// Asymptotic data of an ALE end.
#[derive(Clone, Debug, Serialize)]
pub struct AleEnd {
    /// Order of the group at infinity.
    pub gamma_order: usize,
    /// Claimed decay order τ.
    pub tau: f64,
    /// The asymptotic chart is valid for `|x| > r0`.
    pub r0: f64,
    /// Generators of Γ acting linearly on the chart.
    #[serde(skip)]
    pub generators: Vec<Tensor<f64>>,
}

/// A value with a note on where it comes from.
#[derive(Clone, Debug, Serialize)]
pub struct Known {
    pub value: f64,
    pub provenance: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct KnownValues {
    pub expected_mass: Option<Known>,
    pub c1_pairing: Option<Known>,
    pub einstein: bool,
    pub scalar_flat: bool,
}

/// How an entry's bulk integrals are organised.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntegrationScheme {
    /// Radial x sphere product around the origin; `U(m)` radial profile available.
    /// Bulk integrals skip `|x| < r_inner`, where the chart is too ill-conditioned
    /// for second derivatives.
    Radial { potential: Potential, r_inner: f64 },
    /// Product rule on the cube `[0, period)^n`.
    Torus { period: f64 },
    None,
}

/// Region sampled for pointwise checks.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sampler {
    Ball { radius: f64 },
    Shell { r_min: f64, r_max: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl Sampler {
    pub fn sample(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            Sampler::Ball { radius } => loop {
                let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-*radius..*radius)).collect();
                if norm_sq(&p) <= radius * radius {
                    return p;
                }
            },
            Sampler::Shell { r_min, r_max } => {
                let dir = loop {
                    let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let r2 = norm_sq(&v);
                    if r2 <= 1.0 && r2 > 1e-4 {
                        break v;
                    }
                };
                let r = rng.gen_range(*r_min..*r_max) / norm_sq(&dir).sqrt();
                dir.into_iter().map(|v| v * r).collect()
            }
            Sampler::Box { lo, hi } => lo.iter().zip(hi).map(|(&a, &b)| rng.gen_range(a..b)).collect(),
        }
    }

    pub fn sample_many(&self, n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.sample(n, &mut rng)).collect()
    }
}

/// A named geometry with metadata.
#[derive(Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub n: usize,
    pub structure: StructureFlag,
    pub chart: Arc<dyn MetricChart<f64>>,
    pub end: Option<AleEnd>,
    pub compact: bool,
    pub known: KnownValues,
    pub scheme: IntegrationScheme,
    pub sampler: Sampler,
    pub params: Vec<(String, f64)>,
}

impl std::fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CatalogEntry")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("structure", &self.structure)
            .finish()
    }
}

/// Summary row for listings.
#[derive(Clone, Debug, Serialize)]
pub struct EntrySummary {
    pub name: String,
    pub n: usize,
    pub structure: StructureFlag,
    pub compact: bool,
    pub ale: bool,
    pub gamma_order: Option<usize>,
    pub tau: Option<f64>,
    pub einstein: bool,
    pub scalar_flat: bool,
    pub expected_mass: Option<f64>,
}

impl CatalogEntry {
    pub fn summary(&self) -> EntrySummary {
        EntrySummary {
            name: self.name.clone(),
            n: self.n,
            structure: self.structure,
            compact: self.compact,
            ale: self.end.is_some(),
            gamma_order: self.end.as_ref().map(|e| e.gamma_order),
            tau: self.end.as_ref().map(|e| e.tau),
            einstein: self.known.einstein,
            scalar_flat: self.known.scalar_flat,
            expected_mass: self.known.expected_mass.as_ref().map(|k| k.value),
        }
    }

    pub fn is_kahler(&self) -> bool {
        self.structure == StructureFlag::Kahler
    }
}

fn trivial_end(n: usize, tau: f64, r0: f64) -> AleEnd {
    AleEnd { gamma_order: 1, tau, r0, generators: vec![Tensor::identity(n)] }
}

pub fn euclidean(n: usize) -> CatalogEntry {
    CatalogEntry {
        name: format!("euclidean{n}"),
        n,
        structure: if n % 2 == 0 { StructureFlag::Kahler } else { StructureFlag::MetricOnly },
        chart: Arc::new(Euclidean::<f64>::new(n)),
        end: Some(trivial_end(n, f64::INFINITY, 0.0)),
        compact: false,
        known: KnownValues {
            expected_mass: Some(Known { value: 0.0, provenance: "flat metric: integrand vanishes identically".into() }),
            c1_pairing: Some(Known { value: 0.0, provenance: "flat: curvature form vanishes".into() }),
            einstein: true,
            scalar_flat: true,
        },
        scheme: IntegrationScheme::Radial { potential: Potential::Flat, r_inner: 0.0 },
        sampler: Sampler::Ball { radius: 3.0 },
        params: vec![],
    }
}

pub fn flat_torus_kahler(n: usize) -> CatalogEntry {
    CatalogEntry {
        name: format!("flat_torus{n}"),
        n,
        structure: StructureFlag::Kahler,
        chart: Arc::new(Euclidean::<f64>::new(n)),
        end: None,
        compact: true,
        known: KnownValues {
            expected_mass: None,
            c1_pairing: Some(Known { value: 0.0, provenance: "flat torus: trivial canonical bundle".into() }),
            einstein: true,
            scalar_flat: true,
        },
        scheme: IntegrationScheme::Torus { period: 2.0 * PI },
        sampler: Sampler::Box { lo: vec![0.0; n], hi: vec![2.0 * PI; n] },
        params: vec![],
    }
}

pub fn round_sphere(n: usize) -> CatalogEntry {
    CatalogEntry {
        name: format!("sphere{n}"),
        n,
        structure: StructureFlag::MetricOnly,
        chart: Arc::new(RoundSphere::<f64>::new(n)),
        end: None,
        compact: true,
        known: KnownValues { einstein: true, ..Default::default() },
        scheme: IntegrationScheme::None,
        sampler: Sampler::Ball { radius: 2.0 },
        params: vec![],
    }
}

pub fn schwarzschild_slice(mass: f64) -> CatalogEntry {
    CatalogEntry {
        name: "schwarzschild".into(),
        n: 3,
        structure: StructureFlag::MetricOnly,
        chart: Arc::new(ConformallyFlat::<f64>::schwarzschild(mass)),
        end: Some(trivial_end(3, 1.0, 0.5 * mass.abs() + 1e-9)),
        compact: false,
        known: KnownValues {
            expected_mass: Some(Known { value: mass, provenance: "mass parameter of the time-symmetric slice".into() }),
            c1_pairing: None,
            einstein: false,
            scalar_flat: true,
        },
        scheme: IntegrationScheme::None,
        sampler: Sampler::Shell { r_min: 0.5 + mass.abs(), r_max: 5.0 + 2.0 * mass.abs() },
        params: vec![("m".into(), mass)],
    }
}

pub fn conformal4(mass: f64) -> CatalogEntry {
    CatalogEntry {
        name: "conformal4".into(),
        n: 4,
        structure: StructureFlag::Unknown,
        chart: Arc::new(ConformallyFlat::<f64>::conformal4(mass)),
        end: Some(trivial_end(4, 2.0, 1e-6)),
        compact: false,
        known: KnownValues::default(),
        scheme: IntegrationScheme::None,
        sampler: Sampler::Shell { r_min: 1.0, r_max: 4.0 },
        params: vec![("m".into(), mass)],
    }
}

/// Eguchi-Hanson on the double cover ℂ²∖{0} of the end, from its Kähler potential.
pub fn eguchi_hanson(a: f64) -> CatalogEntry {
    let minus = Tensor::identity(4).scale(-1.0);
    CatalogEntry {
        name: "eguchi_hanson".into(),
        n: 4,
        structure: StructureFlag::Kahler,
        chart: Arc::new(UnitaryKahler::<f64>::new(2, Potential::EguchiHanson { a }, 1e-3 * a * a, "eguchi_hanson")),
        end: Some(AleEnd { gamma_order: 2, tau: 4.0, r0: 2.0 * a, generators: vec![minus] }),
        compact: false,
        known: KnownValues {
            expected_mass: Some(Known { value: 0.0, provenance: "hyperkähler ALE: Ricci-flat Kähler with c1 = 0".into() }),
            c1_pairing: Some(Known { value: 0.0, provenance: "Ricci form vanishes identically".into() }),
            einstein: true,
            scalar_flat: true,
        },
        scheme: IntegrationScheme::Radial { potential: Potential::EguchiHanson { a }, r_inner: 0.4 * a },
        sampler: Sampler::Shell { r_min: 0.5 * a, r_max: 4.0 * a },
        params: vec![("a".into(), a)],
    }
}

/// Burns' scalar-flat Kähler metric on the blow-up of ℂ², potential `|z|² + c log|z|²`.
pub fn burns(c: f64) -> CatalogEntry {
    CatalogEntry {
        name: "burns".into(),
        n: 4,
        structure: StructureFlag::Kahler,
        chart: Arc::new(UnitaryKahler::<f64>::new(2, Potential::Burns { c }, 1e-6 * c, "burns")),
        end: Some(trivial_end(4, 2.0, c.sqrt())),
        compact: false,
        known: KnownValues {
            expected_mass: None,
            c1_pairing: None,
            einstein: false,
            scalar_flat: true,
        },
        scheme: IntegrationScheme::Radial { potential: Potential::Burns { c }, r_inner: 0.15 * c.sqrt() },
        sampler: Sampler::Shell { r_min: 0.3 * c.sqrt(), r_max: 4.0 * c.sqrt() },
        params: vec![("c".into(), c)],
    }
}

/// Fubini-Study on the affine chart ℂ^m ⊂ ℂP^m, normalised so lines have area π.
pub fn fubini_study(m: usize) -> CatalogEntry {
    CatalogEntry {
        name: format!("fubini_study{m}"),
        n: 2 * m,
        structure: StructureFlag::Kahler,
        chart: Arc::new(UnitaryKahler::<f64>::new(m, Potential::FubiniStudy, -1.0, format!("fubini_study{m}"))),
        end: None,
        compact: true,
        known: KnownValues {
            expected_mass: None,
            c1_pairing: Some(Known {
                value: (m as f64 + 1.0) * PI.powi(m as i32 - 1),
                provenance: "c1 = (m+1)H and ⟨H^{m-1},[ω]^{m-1}⟩ with [ω](line) = π".into(),
            }),
            einstein: true,
            scalar_flat: false,
        },
        scheme: IntegrationScheme::Radial { potential: Potential::FubiniStudy, r_inner: 0.0 },
        sampler: Sampler::Ball { radius: 2.0 },
        params: vec![],
    }
}

pub fn random_ak(m: usize, seed: u64) -> CatalogEntry {
    CatalogEntry {
        name: "random_ak".into(),
        n: 2 * m,
        structure: StructureFlag::AlmostKahlerNonkahler,
        chart: Arc::new(RandomAlmostKahler::<f64>::new(m, seed)),
        end: None,
        compact: false,
        known: KnownValues::default(),
        scheme: IntegrationScheme::None,
        sampler: Sampler::Ball { radius: 1.5 },
        params: vec![("m".into(), m as f64), ("seed".into(), seed as f64)],
    }
}

/// All built-in entries with default parameters.
pub fn builtin_entries() -> Vec<CatalogEntry> {
    vec![
        euclidean(3),
        euclidean(4),
        euclidean(6),
        flat_torus_kahler(4),
        round_sphere(2),
        round_sphere(3),
        round_sphere(4),
        schwarzschild_slice(2.0),
        conformal4(1.0),
        eguchi_hanson(1.0),
        burns(1.0),
        fubini_study(1),
        fubini_study(2),
        random_ak(2, 7),
    ]
}

/// Named lookup with parameter overrides (`m`, `a`, `c`, `seed`, `n`).
pub fn lookup(name: &str, params: &[(String, f64)]) -> Result<CatalogEntry> {
    let get = |k: &str, d: f64| params.iter().find(|(n, _)| n == k).map_or(d, |(_, v)| *v);
    let entry = match name {
        "euclidean" => euclidean(get("n", 4.0) as usize),
        "euclidean3" => euclidean(3),
        "euclidean4" => euclidean(4),
        "euclidean6" => euclidean(6),
        "flat_torus" | "flat_torus4" | "torus" => flat_torus_kahler(4),
        "sphere" => round_sphere(get("n", 2.0) as usize),
        "sphere2" => round_sphere(2),
        "sphere3" => round_sphere(3),
        "sphere4" => round_sphere(4),
        "schwarzschild" => schwarzschild_slice(get("m", 2.0)),
        "conformal4" => conformal4(get("m", 1.0)),
        "eguchi_hanson" | "eh" => eguchi_hanson(get("a", 1.0)),
        "burns" => burns(get("c", 1.0)),
        "fubini_study" => fubini_study(get("m", 1.0) as usize),
        "fubini_study1" => fubini_study(1),
        "fubini_study2" => fubini_study(2),
        "random_ak" => random_ak(get("m", 2.0) as usize, get("seed", 7.0) as u64),
        _ => {
            return Err(GeomError::Usage(format!(
                "unknown metric `{name}`; valid: euclidean[3|4|6], flat_torus, sphere[2|3|4], schwarzschild, conformal4, eguchi_hanson, burns, fubini_study[1|2], random_ak"
            )))
        }
    };
    if let Some(d) = entry_dim_limits(&entry) {
        return Err(d);
    }
    Ok(entry)
}

fn entry_dim_limits(e: &CatalogEntry) -> Option<GeomError> {
    if e.n < 2 || e.n > crate::jet::MAX_DIM {
        Some(GeomError::Usage(format!("dimension {} outside 2..={}", e.n, crate::jet::MAX_DIM)))
    } else {
        None
    }
}

/// The chart `y ↦ g(Ry)` pulled back by a rigid rotation `x = R y`.
pub struct RotatedChart<T> {
    pub inner: Arc<dyn MetricChart<T>>,
    pub rotation: Tensor<T>,
}

impl<T: Real> RotatedChart<T> {
    fn push(&self, y: &[Jet<T>]) -> Vec<Jet<T>> {
        let n = y.len();
        (0..n)
            .map(|i| {
                let mut acc = Jet::zero(y[0].layout());
                for (k, yk) in y.iter().enumerate() {
                    acc.add_assign_scaled(yk, self.rotation.at(&[i, k]));
                }
                acc
            })
            .collect()
    }

    fn pull(&self, t: &JTensor<T>) -> JTensor<T> {
        let n = t.n();
        let r = &self.rotation;
        JTensor::from_fn(n, 2, |ij| {
            let mut acc = Jet::zero(t.layout());
            for a in 0..n {
                for b in 0..n {
                    acc.add_assign_scaled(t.at(&[a, b]), r.at(&[a, ij[0]]) * r.at(&[b, ij[1]]));
                }
            }
            acc
        })
    }
}

impl<T: Real> MetricChart<T> for RotatedChart<T> {
    fn name(&self) -> String {
        format!("{} (rotated)", self.inner.name())
    }
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn in_domain(&self, p: &[T]) -> bool {
        let n = p.len();
        let x: Vec<T> = (0..n).map(|i| (0..n).map(|k| self.rotation.at(&[i, k]) * p[k]).sum()).collect();
        self.inner.in_domain(&x)
    }
    fn metric(&self, y: &[Jet<T>]) -> Result<JTensor<T>> {
        Ok(self.pull(&self.inner.metric(&self.push(y))?))
    }
    fn fields(&self, y: &[Jet<T>]) -> Result<(JTensor<T>, Option<JTensor<T>>)> {
        let (g, j) = self.inner.fields(&self.push(y))?;
        // J' = Rᵀ J R for orthogonal R, same index pattern as the metric pull-back
        Ok((self.pull(&g), j.map(|j| self.pull(&j))))
    }
    fn complex_structure(&self, y: &[Jet<T>]) -> Result<Option<JTensor<T>>> {
        Ok(self.fields(y)?.1)
    }
    fn structure(&self) -> StructureFlag {
        self.inner.structure()
    }
}
