//! The canonical spin^c bundle `Λ^{0,•}` at a point, in an adapted unitary frame
//! `(e_1, .., e_m, Je_1, .., Je_m)`.
//!
//! A spinor is a vector of length `2^m` indexed by bitmasks `S ⊆ {0..m-1}`
//! (basis `ē^S`, declared orthonormal). With `a†_α = ē^α ∧` and `a_α` its
//! adjoint (Jordan-Wigner signs), the Clifford action of a real 1-form is
//! `cl(e^α) = a†_α - a_α`, `cl(Je^α) = i(a†_α + a_α)`, which is
//! `√2(α^{0,1} ∧ ξ - ᾱ^{1,0} ⌟ ξ)` with `ē^α = (e^α + i Je^α)/√2`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::almost_kahler::AlmostHermitian;
use crate::error::{GeomError, Result};
use crate::jet::Jet;
use crate::riemann::MetricChart;
use crate::scalar::Real;
use crate::tensor::{JTensor, Tensor};

pub type C<T> = Complex<T>;

/// Element of `Λ^{0,•}` at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct FockSpinor<T> {
    m: usize,
    coeffs: Vec<C<T>>,
}

impl<T: Real> FockSpinor<T> {
    pub fn zero(m: usize) -> Self {
        Self { m, coeffs: vec![C::new(T::zero(), T::zero()); 1 << m] }
    }

    /// `ψ₀`, the constant function 1 in `Λ^{0,0}`.
    pub fn vacuum(m: usize) -> Self {
        Self::basis(m, 0)
    }

    /// The basis spinor `ē^S`.
    pub fn basis(m: usize, mask: usize) -> Self {
        let mut s = Self::zero(m);
        s.coeffs[mask] = C::new(T::one(), T::zero());
        s
    }

    pub fn from_coeffs(m: usize, coeffs: Vec<C<T>>) -> Result<Self> {
        if coeffs.len() != 1 << m {
            return Err(GeomError::Dimension(format!("spinor of length {} for m = {m}", coeffs.len())));
        }
        Ok(Self { m, coeffs })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn coeffs(&self) -> &[C<T>] {
        &self.coeffs
    }

    /// Hermitian product, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> C<T> {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.conj() * b).fold(C::new(T::zero(), T::zero()), |x, y| x + y)
    }

    pub fn norm_sq(&self) -> T {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self { m: self.m, coeffs: self.coeffs.iter().map(|c| *c * s).collect() }
    }

    /// Splits into the even (`S₊`) and odd (`S₋`) parts.
    pub fn parity_split(&self) -> (Self, Self) {
        let mut even = Self::zero(self.m);
        let mut odd = Self::zero(self.m);
        for (mask, c) in self.coeffs.iter().enumerate() {
            if mask.count_ones() % 2 == 0 {
                even.coeffs[mask] = *c;
            } else {
                odd.coeffs[mask] = *c;
            }
        }
        (even, odd)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.m != other.m {
            return Err(GeomError::Dimension(format!("spinors for m = {} and m = {}", self.m, other.m)));
        }
        Ok(())
    }
}

impl<T: Real> Add for &FockSpinor<T> {
    type Output = FockSpinor<T>;
    fn add(self, o: Self) -> FockSpinor<T> {
        self.check(o).expect("frame mismatch");
        FockSpinor { m: self.m, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl<T: Real> Sub for &FockSpinor<T> {
    type Output = FockSpinor<T>;
    fn sub(self, o: Self) -> FockSpinor<T> {
        self.check(o).expect("frame mismatch");
        FockSpinor { m: self.m, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect() }
    }
}

/// Dense complex square matrix acting on spinors.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    dim: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![C::new(T::zero(), T::zero()); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            out.data[i * dim + i] = C::new(T::one(), T::zero());
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, i: usize, j: usize) -> C<T> {
        self.data[i * self.dim + j]
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|c| *c * s).collect() }
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.data[j * d + i] = self.data[i * d + j].conj();
            }
        }
        out
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |a, c| a.max(c.norm()))
    }

    pub fn apply(&self, v: &FockSpinor<T>) -> FockSpinor<T> {
        assert_eq!(v.coeffs.len(), self.dim, "frame mismatch");
        let d = self.dim;
        let mut out = FockSpinor::zero(v.m);
        for i in 0..d {
            let mut acc = C::new(T::zero(), T::zero());
            for j in 0..d {
                acc = acc + self.data[i * d + j] * v.coeffs[j];
            }
            out.coeffs[i] = acc;
        }
        out
    }
}

impl<T: Real> Add for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn add(self, o: Self) -> CMatrix<T> {
        CMatrix { dim: self.dim, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }
}

impl<T: Real> Sub for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn sub(self, o: Self) -> CMatrix<T> {
        CMatrix { dim: self.dim, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, o: Self) -> CMatrix<T> {
        let d = self.dim;
        let mut out = CMatrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] = out.data[i * d + j] + a * o.data[k * d + j];
                }
            }
        }
        out
    }
}

/// `a†_α` on `Λ^{0,•}` (wedge with `ē^α` from the left).
pub fn creation<T: Real>(m: usize, alpha: usize) -> CMatrix<T> {
    let d = 1usize << m;
    let mut out = CMatrix::zeros(d);
    for s in 0..d {
        if s & (1 << alpha) == 0 {
            let sign = if (s & ((1 << alpha) - 1)).count_ones() % 2 == 0 { T::one() } else { -T::one() };
            out.data[(s | (1 << alpha)) * d + s] = C::new(sign, T::zero());
        }
    }
    out
}

pub fn annihilation<T: Real>(m: usize, alpha: usize) -> CMatrix<T> {
    creation::<T>(m, alpha).adjoint()
}

/// `cl` of the real frame covectors: index `α < m` is `e^α`, `m + α` is `(Je_α)^♭`.
pub fn clifford_generators<T: Real>(m: usize) -> Vec<CMatrix<T>> {
    let i = C::new(T::zero(), T::one());
    let mut out = Vec::with_capacity(2 * m);
    for a in 0..m {
        out.push(&creation::<T>(m, a) - &annihilation::<T>(m, a));
    }
    for a in 0..m {
        out.push((&creation::<T>(m, a) + &annihilation::<T>(m, a)).scale(i));
    }
    out
}

/// `cl(α)ξ` for a complexified 1-form given by its components in the adapted
/// coframe (`α = Σ x_α e^α + y_α Je^α`), extended complex-linearly.
pub fn clifford_one_form<T: Real>(alpha: &[C<T>], xi: &FockSpinor<T>) -> Result<FockSpinor<T>> {
    let m = xi.m;
    if alpha.len() != 2 * m {
        return Err(GeomError::Dimension(format!("1-form with {} components for m = {m}", alpha.len())));
    }
    let i = C::new(T::zero(), T::one());
    let mut out = FockSpinor::zero(m);
    for a in 0..m {
        let (x, y) = (alpha[a], alpha[m + a]);
        let up = creation::<T>(m, a).apply(xi).scale(x + i * y);
        let down = annihilation::<T>(m, a).apply(xi).scale(x - i * y);
        out = &(&out + &up) - &down;
    }
    Ok(out)
}

/// Matrix of `cl(β)` for a real 2-form given in the adapted coframe, with
/// `cl(e^i ∧ e^j) = cl(e^i) cl(e^j)` over strict pairs.
pub fn clifford_two_form_matrix<T: Real>(beta: &Tensor<T>) -> Result<CMatrix<T>> {
    let n = beta.n();
    if n % 2 != 0 {
        return Err(GeomError::Dimension(format!("odd dimension {n}")));
    }
    let gens = clifford_generators::<T>(n / 2);
    let mut out = CMatrix::zeros(1 << (n / 2));
    for i in 0..n {
        for j in (i + 1)..n {
            let b = beta.at(&[i, j]);
            if b != T::zero() {
                out = &out + &(&gens[i] * &gens[j]).scale(C::new(b, T::zero()));
            }
        }
    }
    Ok(out)
}

pub fn clifford_two_form<T: Real>(beta: &Tensor<T>, xi: &FockSpinor<T>) -> Result<FockSpinor<T>> {
    if beta.n() != 2 * xi.m {
        return Err(GeomError::Dimension("2-form and spinor frames differ".into()));
    }
    Ok(clifford_two_form_matrix(beta)?.apply(xi))
}

/// ω in the adapted coframe.
pub fn frame_omega<T: Real>(m: usize) -> Tensor<T> {
    Tensor::from_fn(2 * m, 2, |t| {
        if t[1] == t[0] + m && t[0] < m {
            T::one()
        } else if t[0] == t[1] + m && t[1] < m {
            -T::one()
        } else {
            T::zero()
        }
    })
}

/// Adapted orthonormal frame at a point: rows `0..m` are `e_α`, rows `m..2m` are `J e_α`.
#[derive(Clone, Debug)]
pub struct UnitaryFrame<T> {
    pub point: Vec<T>,
    pub vectors: Tensor<T>,
    pub coframe: Tensor<T>,
}

/// Frame vector fields near the point, as jets (`[i][a]`: component `a` of `E_i`).
#[derive(Clone, Debug)]
pub struct FrameJets<T> {
    pub vectors: JTensor<T>,
}

/// Relative squared-norm threshold below which a projected seed axis is skipped.
pub const FRAME_SKIP_TOL: f64 = 1e-2;

fn jet_inner<T: Real>(g: &JTensor<T>, u: &[Jet<T>], v: &[Jet<T>]) -> Jet<T> {
    let n = g.n();
    let mut acc = Jet::zero(g.layout());
    for a in 0..n {
        for b in 0..n {
            let w = &u[a] * &v[b];
            acc.fma_assign(g.at(&[a, b]), &w);
        }
    }
    acc
}

/// Gram-Schmidt over the seed vectors (rows of `seed`, coordinate axes when
/// `None`), adding `v` and `Jv` for each accepted seed.
pub fn adapted_frame_jets<T: Real>(ah: &AlmostHermitian<T>, seed: Option<&Tensor<T>>) -> Result<FrameJets<T>> {
    let n = ah.dim();
    let m = n / 2;
    let g = ah.geometry().metric();
    let j = ah.j();
    let layout = g.layout().clone();
    let seeds: Vec<Vec<T>> = match seed {
        Some(s) => s.rows(),
        None => (0..n).map(|a| (0..n).map(|b| if a == b { T::one() } else { T::zero() }).collect()).collect(),
    };
    let mut es: Vec<Vec<Jet<T>>> = Vec::with_capacity(m);
    let mut jes: Vec<Vec<Jet<T>>> = Vec::with_capacity(m);
    for s in seeds {
        if es.len() == m {
            break;
        }
        let mut v: Vec<Jet<T>> = s.iter().map(|c| Jet::constant(&layout, *c)).collect();
        let raw = jet_inner(g, &v, &v).value();
        for e in es.iter().chain(jes.iter()) {
            let c = jet_inner(g, &v, e);
            for a in 0..n {
                v[a] = &v[a] - &(&c * &e[a]);
            }
        }
        let nn = jet_inner(g, &v, &v);
        if nn.value() <= T::lit(FRAME_SKIP_TOL) * raw {
            continue;
        }
        let r = nn.sqrt()?.recip()?;
        let v: Vec<Jet<T>> = v.iter().map(|c| c * &r).collect();
        let jv: Vec<Jet<T>> = (0..n)
            .map(|a| {
                let mut acc = Jet::zero(&layout);
                for b in 0..n {
                    acc.fma_assign(j.at(&[a, b]), &v[b]);
                }
                acc
            })
            .collect();
        es.push(v);
        jes.push(jv);
    }
    if es.len() < m {
        return Err(GeomError::Numerical("no adapted frame: every seed axis degenerated".into()));
    }
    let rows: Vec<Vec<Jet<T>>> = es.into_iter().chain(jes).collect();
    Ok(FrameJets { vectors: JTensor::from_fn(n, 2, |t| rows[t[0]][t[1]].clone()) })
}

impl<T: Real> FrameJets<T> {
    pub fn at_point(&self, ah: &AlmostHermitian<T>) -> UnitaryFrame<T> {
        let e = self.vectors.values();
        let g = ah.geometry().metric().values();
        let n = e.n();
        let coframe = Tensor::from_fn(n, 2, |t| (0..n).map(|b| g.at(&[t[1], b]) * e.at(&[t[0], b])).sum());
        UnitaryFrame { point: ah.geometry().point().to_vec(), vectors: e, coframe }
    }
}

pub fn adapted_frame<T: Real, C2: MetricChart<T> + ?Sized>(chart: &C2, p: &[T]) -> Result<UnitaryFrame<T>> {
    let ah = AlmostHermitian::new(chart, p, 2)?;
    Ok(adapted_frame_jets(&ah, None)?.at_point(&ah))
}

/// Residuals `max|g(e_i, e_j) - δ_ij|` and `max|J e_α - e_{m+α}|`.
pub fn frame_residuals<T: Real>(ah: &AlmostHermitian<T>, f: &UnitaryFrame<T>) -> (T, T) {
    let n = ah.dim();
    let m = n / 2;
    let g = ah.geometry().metric().values();
    let j = ah.j().values();
    let mut ortho = T::zero();
    let mut adapted = T::zero();
    for a in 0..n {
        for b in 0..n {
            let mut ip = T::zero();
            for p in 0..n {
                for q in 0..n {
                    ip += g.at(&[p, q]) * f.vectors.at(&[a, p]) * f.vectors.at(&[b, q]);
                }
            }
            let d = if a == b { T::one() } else { T::zero() };
            ortho = ortho.max((ip - d).abs());
        }
    }
    for a in 0..m {
        for p in 0..n {
            let je: T = (0..n).map(|q| j.at(&[p, q]) * f.vectors.at(&[a, q])).sum();
            adapted = adapted.max((je - f.vectors.at(&[m + a, p])).abs());
        }
    }
    (ortho, adapted)
}

/// Connection data of the adapted frame.
#[derive(Clone, Debug)]
pub struct SpinConnectionData<T> {
    pub frame: UnitaryFrame<T>,
    /// `w_kl(e_j)` stored `[j][k][l]`.
    pub w: Tensor<T>,
    /// `θ(e_j)`, with `A_s = -iθ`.
    pub theta: Vec<T>,
}

impl<T: Real> SpinConnectionData<T> {
    pub fn m(&self) -> usize {
        self.theta.len() / 2
    }

    /// `A_s(e_j)`, purely imaginary.
    pub fn a_s(&self, j: usize) -> C<T> {
        C::new(T::zero(), -self.theta[j])
    }

    pub fn skew_residual(&self) -> T {
        let n = self.theta.len();
        let mut r = T::zero();
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    r = r.max((self.w.at(&[j, k, l]) + self.w.at(&[j, l, k])).abs());
                }
            }
        }
        r
    }
}

/// `W[i][k][l] = g(∇_{∂_i} E_k, E_l)` as jets of order `order - 1`.
pub fn coordinate_connection_forms<T: Real>(ah: &AlmostHermitian<T>, fj: &FrameJets<T>) -> Result<JTensor<T>> {
    let n = ah.dim();
    let e = &fj.vectors;
    let de = e.gradient()?; // [i][k][a]
    let k = de.order();
    let gam = ah.geometry().christoffel().truncate(k);
    let g = ah.geometry().metric().truncate(k);
    let e = e.truncate(k);
    // ∇_i E_k^a
    let ne = JTensor::from_fn(n, 3, |t| {
        let (i, kk, a) = (t[0], t[1], t[2]);
        let mut acc = de.at(&[i, kk, a]).clone();
        for b in 0..n {
            acc.fma_assign(gam.at(&[a, i, b]), e.at(&[kk, b]));
        }
        acc
    });
    Ok(JTensor::from_fn(n, 3, |t| {
        let (i, kk, l) = (t[0], t[1], t[2]);
        let mut acc = Jet::zero(gam.layout());
        for a in 0..n {
            for b in 0..n {
                let w = ne.at(&[i, kk, a]) * e.at(&[l, b]);
                acc.fma_assign(g.at(&[a, b]), &w);
            }
        }
        acc
    }))
}

/// `θ_i = -Σ_α g(∇_{∂_i} e_α, J e_α)` in coordinates, jets of order `order - 1`.
/// `dθ` is the Chern-Ricci form `iF`.
pub fn theta_coordinate_jets<T: Real>(ah: &AlmostHermitian<T>, fj: &FrameJets<T>) -> Result<JTensor<T>> {
    let w = coordinate_connection_forms(ah, fj)?;
    let m = ah.complex_dim();
    Ok(JTensor::from_fn(ah.dim(), 1, |t| {
        let mut acc = Jet::zero(w.layout());
        for a in 0..m {
            acc = &acc - w.at(&[t[0], a, m + a]);
        }
        acc
    }))
}

pub fn spin_connection_data<T: Real>(ah: &AlmostHermitian<T>, seed: Option<&Tensor<T>>) -> Result<SpinConnectionData<T>> {
    let fj = adapted_frame_jets(ah, seed)?;
    let frame = fj.at_point(ah);
    let wc = coordinate_connection_forms(ah, &fj)?.values();
    let n = ah.dim();
    let m = n / 2;
    let e = &frame.vectors;
    let w = Tensor::from_fn(n, 3, |t| (0..n).map(|i| e.at(&[t[0], i]) * wc.at(&[i, t[1], t[2]])).sum());
    let theta = (0..n).map(|j| -(0..m).map(|a| w.at(&[j, a, m + a])).sum::<T>()).collect();
    Ok(SpinConnectionData { frame, w, theta })
}

/// `∇_X ψ = dψ(X) + ½ Σ_{k<l} w_kl(X) cl_k cl_l ψ + ½ A_s(X) ψ` for `X = Σ x_j e_j`
/// (frame components), with `dψ(X)` supplied by the caller (zero for a constant spinor).
pub fn spinor_covariant_derivative<T: Real>(
    data: &SpinConnectionData<T>,
    psi: &FockSpinor<T>,
    dpsi: Option<&FockSpinor<T>>,
    x: &[T],
) -> Result<FockSpinor<T>> {
    let n = data.theta.len();
    if psi.m * 2 != n || x.len() != n {
        return Err(GeomError::Dimension("spinor, direction and frame sizes differ".into()));
    }
    let gens = clifford_generators::<T>(psi.m);
    let half = T::lit(0.5);
    let mut op = CMatrix::zeros(1 << psi.m);
    let mut a = C::new(T::zero(), T::zero());
    for j in 0..n {
        if x[j] == T::zero() {
            continue;
        }
        for k in 0..n {
            for l in (k + 1)..n {
                let c = data.w.at(&[j, k, l]) * x[j] * half;
                if c != T::zero() {
                    op = &op + &(&gens[k] * &gens[l]).scale(C::new(c, T::zero()));
                }
            }
        }
        a = a + data.a_s(j) * x[j] * half;
    }
    let mut out = &op.apply(psi) + &psi.scale(a);
    if let Some(d) = dpsi {
        out = &out + d;
    }
    Ok(out)
}

fn unit<T: Real>(n: usize, j: usize) -> Vec<T> {
    (0..n).map(|i| if i == j { T::one() } else { T::zero() }).collect()
}

/// `∇_{e_j} ψ₀` for every frame direction.
pub fn vacuum_derivatives<T: Real>(data: &SpinConnectionData<T>) -> Result<Vec<FockSpinor<T>>> {
    let n = data.theta.len();
    let psi = FockSpinor::vacuum(n / 2);
    (0..n).map(|j| spinor_covariant_derivative(data, &psi, None, &unit(n, j))).collect()
}

/// `|Σ_i cl(e_i) ∇_{e_i} ψ₀|`.
pub fn dirac_residual_from<T: Real>(data: &SpinConnectionData<T>) -> Result<T> {
    let n = data.theta.len();
    let gens = clifford_generators::<T>(n / 2);
    let d = vacuum_derivatives(data)?;
    let mut acc = FockSpinor::zero(n / 2);
    for (g, di) in gens.iter().zip(&d) {
        acc = &acc + &g.apply(di);
    }
    Ok(acc.norm_sq().sqrt())
}

pub fn dirac_constant_spinor_residual<T: Real, C2: MetricChart<T> + ?Sized>(chart: &C2, p: &[T]) -> Result<T> {
    let ah = AlmostHermitian::new(chart, p, 2)?;
    dirac_residual_from(&spin_connection_data(&ah, None)?)
}

/// `(|∇ψ₀|², ⅛|∇ω|²)`.
pub fn norm_equality_sides<T: Real>(ah: &AlmostHermitian<T>, data: &SpinConnectionData<T>) -> Result<(T, T)> {
    let lhs = vacuum_derivatives(data)?.iter().map(|d| d.norm_sq()).sum();
    Ok((lhs, ah.nabla_omega_norm_sq_jet().value() / T::lit(8.0)))
}

/// Both sides of the boundary integrand `Σ_i ⟨ψ₀, L_i ψ₀⟩ ν^i` and its printed
/// simplified metric form.
#[derive(Clone, Debug)]
pub struct WittenIntegrand<T> {
    /// From the Fock-space matrices.
    pub spinor_side: C<T>,
    /// From frame connection forms through the vacuum two-point function
    /// `⟨ψ₀, cl_a cl_b ψ₀⟩ = -δ_ab - iω_ab` and Wick's rule.
    pub metric_side: C<T>,
    /// `¼ Σ_{i≠j} (w_ji(e_j) - w_jj(e_i)) ν^i - ½ θ(Jν)`, the printed reduction.
    pub reduced_form: T,
    pub connection_scale: T,
}

impl<T: Real> WittenIntegrand<T> {
    pub fn residual(&self) -> T {
        (self.spinor_side - self.metric_side).norm()
    }

    /// Residual relative to the larger side, floored by the size `max|w_kl(e_j)|`
    /// of the connection coefficients (both sides vanish on almost-Kähler metrics).
    pub fn relative_residual(&self) -> T {
        let scale = self.spinor_side.norm().max(self.metric_side.norm()).max(self.connection_scale);
        self.residual() / scale.max(T::min_positive_value())
    }
}

/// `normal` is a coordinate vector; it is converted to frame components with the coframe.
pub fn witten_integrand_from<T: Real>(data: &SpinConnectionData<T>, normal: &[T]) -> Result<WittenIntegrand<T>> {
    let n = data.theta.len();
    let m = n / 2;
    if normal.len() != n {
        return Err(GeomError::Dimension("normal vector size".into()));
    }
    let nu: Vec<T> = (0..n).map(|i| (0..n).map(|a| data.frame.coframe.at(&[i, a]) * normal[a]).sum()).collect();
    let gens = clifford_generators::<T>(m);
    let psi = FockSpinor::vacuum(m);
    let d = vacuum_derivatives(data)?;
    let zero = C::new(T::zero(), T::zero());
    let mut spinor = zero;
    for i in 0..n {
        let mut li = d[i].clone();
        for j in 0..n {
            li = &li + &(&gens[i] * &gens[j]).apply(&d[j]);
        }
        spinor = spinor + psi.inner(&li) * nu[i];
    }
    let om = frame_omega::<T>(m);
    let g2 = |a: usize, b: usize| -> C<T> {
        let re = if a == b { -T::one() } else { T::zero() };
        C::new(re, -om.at(&[a, b]))
    };
    let half = T::lit(0.5);
    let one = C::new(T::one(), T::zero());
    let mut metric = zero;
    for i in 0..n {
        let mut ti = zero;
        for j in 0..n {
            let dij = if i == j { one } else { zero };
            for k in 0..n {
                for l in (k + 1)..n {
                    let w = data.w.at(&[j, k, l]);
                    if w == T::zero() {
                        continue;
                    }
                    let four = g2(i, j) * g2(k, l) - g2(i, k) * g2(j, l) + g2(i, l) * g2(j, k);
                    ti = ti + (four + dij * g2(k, l)) * (w * half);
                }
            }
            ti = ti + data.a_s(j) * (dij + g2(i, j)) * half;
        }
        metric = metric + ti * nu[i];
    }
    let mut reduced = T::zero();
    for i in 0..n {
        let mut acc = T::zero();
        for j in 0..n {
            if j != i {
                acc += data.w.at(&[j, j, i]) - data.w.at(&[i, j, j]);
            }
        }
        // Jν in frame components: J e_α = e_{m+α}, J e_{m+α} = -e_α
        let jnu_theta = if i < m { nu[i] * data.theta[m + i] } else { -nu[i] * data.theta[i - m] };
        reduced += T::lit(0.25) * acc * nu[i] - half * jnu_theta;
    }
    let connection_scale = data.w.max_abs().max(data.theta.iter().fold(T::zero(), |a, t| a.max(t.abs())));
    Ok(WittenIntegrand { spinor_side: spinor, metric_side: metric, reduced_form: reduced, connection_scale })
}

pub fn witten_integrand_identity_residual<T: Real, C2: MetricChart<T> + ?Sized>(
    chart: &C2,
    p: &[T],
    normal: &[T],
) -> Result<WittenIntegrand<T>> {
    let ah = AlmostHermitian::new(chart, p, 2)?;
    witten_integrand_from(&spin_connection_data(&ah, None)?, normal)
}
