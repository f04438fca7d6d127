//! Levi-Civita connection and curvature from metric jets.
//!
//! Conventions: `R(X,Y)Z = [∇_X, ∇_Y]Z - ∇_[X,Y] Z`, `R_ijkl = g(R(∂_i,∂_j)∂_k, ∂_l)`,
//! `Ric_jk = g^il R_ijkl`, so the unit sphere has `R_ijji > 0` and `s > 0`.
//! The Laplacian and co-differential use the geometer's sign: on Euclidean
//! space `Δf = -Σ ∂²f/∂x_i²`.

use std::sync::Arc;

use crate::error::{GeomError, Result};
use crate::jet::{Jet, JetContext, JetLayout};
use crate::linalg;
use crate::scalar::Real;
use crate::tensor::{multi_indices, JTensor, Tensor};

/// What a chart claims about its (g, J) pair. Claims are re-verified by the tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureFlag {
    MetricOnly,
    Kahler,
    AlmostKahlerNonkahler,
    Unknown,
}

/// A coordinate chart carrying a Riemannian metric and optionally an almost complex structure.
pub trait MetricChart<T: Real>: Send + Sync {
    fn name(&self) -> String;

    fn dim(&self) -> usize;

    fn in_domain(&self, p: &[T]) -> bool {
        let _ = p;
        true
    }

    /// Metric components `g_ij` as jets in the coordinate jets `x`.
    fn metric(&self, x: &[Jet<T>]) -> Result<JTensor<T>>;

    /// Components `J^i_j` (`(JX)^i = J^i_j X^j`), if the chart carries a structure.
    fn complex_structure(&self, x: &[Jet<T>]) -> Result<Option<JTensor<T>>> {
        let _ = x;
        Ok(None)
    }

    /// Both fields at once; charts that derive g and J together override this.
    fn fields(&self, x: &[Jet<T>]) -> Result<(JTensor<T>, Option<JTensor<T>>)> {
        Ok((self.metric(x)?, self.complex_structure(x)?))
    }

    fn structure(&self) -> StructureFlag {
        StructureFlag::MetricOnly
    }
}

impl<T: Real, C: MetricChart<T> + ?Sized> MetricChart<T> for Arc<C> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn in_domain(&self, p: &[T]) -> bool {
        (**self).in_domain(p)
    }
    fn metric(&self, x: &[Jet<T>]) -> Result<JTensor<T>> {
        (**self).metric(x)
    }
    fn complex_structure(&self, x: &[Jet<T>]) -> Result<Option<JTensor<T>>> {
        (**self).complex_structure(x)
    }
    fn fields(&self, x: &[Jet<T>]) -> Result<(JTensor<T>, Option<JTensor<T>>)> {
        (**self).fields(x)
    }
    fn structure(&self) -> StructureFlag {
        (**self).structure()
    }
}

fn to_f64<T: Real>(p: &[T]) -> Vec<f64> {
    p.iter().map(|v| v.to_f64_lossy()).collect()
}

/// Metric (and structure) jets at a point together with the Levi-Civita connection.
#[derive(Clone, Debug)]
pub struct LocalGeometry<T> {
    point: Vec<T>,
    ctx: JetContext<T>,
    g: JTensor<T>,
    ginv: JTensor<T>,
    j: Option<JTensor<T>>,
    gamma: JTensor<T>,
}

impl<T: Real> LocalGeometry<T> {
    /// Evaluates the chart at `p` with jets of order `order` (>= 1).
    pub fn new<C: MetricChart<T> + ?Sized>(chart: &C, p: &[T], order: usize) -> Result<Self> {
        if p.len() != chart.dim() {
            return Err(GeomError::Dimension(format!(
                "point has {} coordinates, chart `{}` has dimension {}",
                p.len(),
                chart.name(),
                chart.dim()
            )));
        }
        if order == 0 {
            return Err(GeomError::JetOrder { needed: 1, have: 0 });
        }
        if !chart.in_domain(p) {
            return Err(GeomError::OutOfDomain { point: to_f64(p) });
        }
        let ctx = JetContext::new(p, order)?;
        let (g, j) = chart.fields(&ctx.coordinates())?;
        Self::from_fields(p, ctx, g, j)
    }

    /// Builds the geometry from externally supplied metric and structure jets.
    pub fn from_fields(p: &[T], ctx: JetContext<T>, g: JTensor<T>, j: Option<JTensor<T>>) -> Result<Self> {
        let n = ctx.dim();
        let g0 = g.values();
        let scale = g0.max_abs();
        let asym = g0.max_abs_diff(&linalg::transpose(&g0));
        if asym > scale * T::epsilon() * T::lit(1e3) {
            return Err(GeomError::Structure { invariant: "metric symmetry", residual: asym.to_f64_lossy() });
        }
        let half = T::lit(0.5);
        let g = JTensor::from_fn(n, 2, |i| (g.at(&[i[0], i[1]]) + g.at(&[i[1], i[0]])).scale(half));
        linalg::cholesky(&g.values()).map_err(|e| match e {
            GeomError::DegenerateMetric { detail, .. } => GeomError::DegenerateMetric { point: to_f64(p), detail },
            e => e,
        })?;
        let ginv = linalg::jet_inverse(&g).map_err(|e| match e {
            GeomError::DegenerateMetric { detail, .. } => GeomError::DegenerateMetric { point: to_f64(p), detail },
            e => e,
        })?;
        let dg = g.gradient()?; // dg[l][i][j] = d_l g_ij
        let k1 = ctx.order() - 1;
        let first_kind = JTensor::from_fn(n, 3, |t| {
            let (l, i, j) = (t[0], t[1], t[2]);
            (&(dg.at(&[i, j, l]) + dg.at(&[j, i, l])) - dg.at(&[l, i, j])).scale(half)
        });
        let ginv1 = ginv.truncate(k1);
        let gamma = JTensor::from_fn(n, 3, |t| {
            let (k, i, j) = (t[0], t[1], t[2]);
            let mut acc = Jet::zero(ginv1.layout());
            for l in 0..n {
                acc.fma_assign(ginv1.at(&[k, l]), first_kind.at(&[l, i, j]));
            }
            acc
        });
        Ok(Self { point: p.to_vec(), ctx, g, ginv, j, gamma })
    }

    pub fn dim(&self) -> usize {
        self.ctx.dim()
    }

    pub fn order(&self) -> usize {
        self.ctx.order()
    }

    pub fn point(&self) -> &[T] {
        &self.point
    }

    pub fn point_f64(&self) -> Vec<f64> {
        to_f64(&self.point)
    }

    pub fn context(&self) -> &JetContext<T> {
        &self.ctx
    }

    pub fn layout(&self) -> &Arc<JetLayout> {
        self.ctx.layout()
    }

    pub fn metric(&self) -> &JTensor<T> {
        &self.g
    }

    pub fn inverse_metric(&self) -> &JTensor<T> {
        &self.ginv
    }

    pub fn structure(&self) -> Option<&JTensor<T>> {
        self.j.as_ref()
    }

    /// `Γ^k_ij` stored as `[k][i][j]`, one jet order below the metric.
    pub fn christoffel(&self) -> &JTensor<T> {
        &self.gamma
    }

    /// Riemann tensor jets (order - 2).
    pub fn curvature_jets(&self) -> Result<CurvatureJets<T>> {
        CurvatureJets::from_geometry(self)
    }
}

/// `R^l_ijk` (stored `[l][i][j][k]`) of an arbitrary affine connection with
/// coefficients `∇_{∂_i} ∂_k = Γ^l_ik ∂_l` stored `[l][i][k]`.
pub fn connection_curvature<T: Real>(gamma: &JTensor<T>) -> Result<JTensor<T>> {
    let n = gamma.n();
    if gamma.order() == 0 {
        return Err(GeomError::JetOrder { needed: 2, have: 1 });
    }
    let k = gamma.order() - 1;
    let dgam = gamma.gradient()?; // [i][l][j][k] = d_i Γ^l_jk
    let gam = gamma.truncate(k);
    let layout = gam.layout().clone();
    let mut out = JTensor::zeros(&layout, n, 4);
    for l in 0..n {
        for i in 0..n {
            for j in (i + 1)..n {
                for kk in 0..n {
                    let mut acc = dgam.at(&[i, l, j, kk]) - dgam.at(&[j, l, i, kk]);
                    for m in 0..n {
                        acc.fma_assign(gam.at(&[l, i, m]), gam.at(&[m, j, kk]));
                        let neg = -gam.at(&[l, j, m]);
                        acc.fma_assign(&neg, gam.at(&[m, i, kk]));
                    }
                    out.set(&[l, j, i, kk], -&acc);
                    out.set(&[l, i, j, kk], acc);
                }
            }
        }
    }
    Ok(out)
}

/// Jets of the curvature quantities (one order below the Christoffel symbols).
#[derive(Clone, Debug)]
pub struct CurvatureJets<T> {
    /// `R^l_ijk` as `[l][i][j][k]`.
    pub riemann_up: JTensor<T>,
    /// `R_ijkl` as `[i][j][k][l]`.
    pub riemann: JTensor<T>,
    pub ricci: JTensor<T>,
    pub scalar: Jet<T>,
}

impl<T: Real> CurvatureJets<T> {
    pub fn from_geometry(geom: &LocalGeometry<T>) -> Result<Self> {
        let n = geom.dim();
        let up = connection_curvature(geom.christoffel())?;
        let k = up.order();
        let g = geom.metric().truncate(k);
        let gi = geom.inverse_metric().truncate(k);
        let layout = g.layout().clone();
        let riemann = JTensor::from_fn(n, 4, |t| {
            let mut acc = Jet::zero(&layout);
            for m in 0..n {
                acc.fma_assign(g.at(&[t[3], m]), up.at(&[m, t[0], t[1], t[2]]));
            }
            acc
        });
        let ricci = JTensor::from_fn(n, 2, |t| {
            let mut acc = Jet::zero(&layout);
            for i in 0..n {
                acc = acc + up.at(&[i, i, t[0], t[1]]);
            }
            acc
        });
        let mut scalar = Jet::zero(&layout);
        for a in 0..n {
            for b in 0..n {
                scalar.fma_assign(gi.at(&[a, b]), ricci.at(&[a, b]));
            }
        }
        Ok(Self { riemann_up: up, riemann, ricci, scalar })
    }
}

/// Pointwise curvature data.
#[derive(Clone, Debug)]
pub struct CurvaturePacket<T> {
    pub point: Vec<T>,
    pub christoffel: Tensor<T>,
    pub riemann: Tensor<T>,
    pub ricci: Tensor<T>,
    pub scalar: T,
    pub weyl: Tensor<T>,
    /// Self-dual and anti-self-dual Weyl blocks (dimension 4 only).
    pub w_plus: Option<Tensor<T>>,
    pub w_minus: Option<Tensor<T>>,
}

pub fn christoffel<T: Real, C: MetricChart<T> + ?Sized>(chart: &C, p: &[T]) -> Result<Tensor<T>> {
    Ok(LocalGeometry::new(chart, p, 1)?.christoffel().values())
}

pub fn curvature_packet<T: Real, C: MetricChart<T> + ?Sized>(chart: &C, p: &[T]) -> Result<CurvaturePacket<T>> {
    packet_from_geometry(&LocalGeometry::new(chart, p, 2)?)
}

pub fn packet_from_geometry<T: Real>(geom: &LocalGeometry<T>) -> Result<CurvaturePacket<T>> {
    let cj = geom.curvature_jets()?;
    let g = geom.metric().values();
    let riemann = cj.riemann.values();
    let ricci = cj.ricci.values();
    let scalar = cj.scalar.value();
    let weyl = weyl_tensor(&riemann, &ricci, scalar, &g);
    let (w_plus, w_minus) = if geom.dim() == 4 {
        let frame = linalg::orthonormal_frame(&g)?;
        let wf = to_frame(&weyl, &frame);
        let blocks = lambda2_blocks(&wf);
        (Some(blocks.plus), Some(blocks.minus))
    } else {
        (None, None)
    };
    Ok(CurvaturePacket {
        point: geom.point().to_vec(),
        christoffel: geom.christoffel().values(),
        riemann,
        ricci,
        scalar,
        weyl,
        w_plus,
        w_minus,
    })
}

/// Kulkarni-Nomizu style curvature tensor `(h ∧ k)_ijkl` matching the sign of `R`:
/// `h_jk k_il - h_ik k_jl + h_il k_jk - h_jl k_ik`.
pub fn kulkarni_nomizu<T: Real>(h: &Tensor<T>, k: &Tensor<T>) -> Tensor<T> {
    Tensor::from_fn(h.n(), 4, |t| {
        let (i, j, a, b) = (t[0], t[1], t[2], t[3]);
        h.at(&[j, a]) * k.at(&[i, b]) - h.at(&[i, a]) * k.at(&[j, b]) + h.at(&[i, b]) * k.at(&[j, a])
            - h.at(&[j, b]) * k.at(&[i, a])
    })
}

/// Weyl tensor; zero in dimension 2 and 3 by convention of the formula's vanishing.
pub fn weyl_tensor<T: Real>(riemann: &Tensor<T>, ricci: &Tensor<T>, s: T, g: &Tensor<T>) -> Tensor<T> {
    let n = g.n();
    if n < 3 {
        return Tensor::zeros(n, 4);
    }
    let nf = T::lit(n as f64);
    let two = T::lit(2.0);
    let ric_part = kulkarni_nomizu(ricci, g).scale((nf - two).recip());
    let s_part = kulkarni_nomizu(g, g).scale(s / ((nf - T::one()) * (nf - two) * two));
    riemann.sub(&ric_part).add(&s_part)
}

/// Components of a covariant rank-`r` tensor in the frame whose rows are `frame`.
pub fn to_frame<T: Real>(t: &Tensor<T>, frame: &Tensor<T>) -> Tensor<T> {
    let n = t.n();
    let r = t.rank();
    let mut cur = t.clone();
    for slot in 0..r {
        cur = Tensor::from_fn(n, r, |idx| {
            let mut acc = T::zero();
            let mut src = idx.to_vec();
            for i in 0..n {
                src[slot] = i;
                acc += frame.at(&[idx[slot], i]) * cur.at(&src);
            }
            acc
        });
    }
    cur
}

/// Bilinear form induced on 2-forms by a curvature-type tensor:
/// `T(α, β) = Σ_{i<j, k<l} α^{ij} β^{kl} T_{ijlk}` for contravariant 2-forms `α, β`.
pub fn curvature_bilinear<T: Real>(t: &Tensor<T>, a: &Tensor<T>, b: &Tensor<T>) -> T {
    let n = t.n();
    let mut acc = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            let aij = a.at(&[i, j]);
            if aij == T::zero() {
                continue;
            }
            for k in 0..n {
                for l in (k + 1)..n {
                    acc += aij * b.at(&[k, l]) * t.at(&[i, j, l, k]);
                }
            }
        }
    }
    acc
}

/// Orthonormal bases of Λ⁺ and Λ⁻ in an oriented orthonormal 4-frame.
pub fn lambda_basis<T: Real>(sign: T) -> [Tensor<T>; 3] {
    let r = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    let mk = |pairs: [(usize, usize, T); 2]| {
        let mut m = Tensor::zeros(4, 2);
        for (i, j, v) in pairs {
            m.set(&[i, j], v);
            m.set(&[j, i], -v);
        }
        m
    };
    [
        mk([(0, 1, r), (2, 3, sign * r)]),
        mk([(0, 2, r), (3, 1, sign * r)]),
        mk([(0, 3, r), (1, 2, sign * r)]),
    ]
}

/// The 3x3 blocks of a curvature-type operator on `Λ² = Λ⁺ ⊕ Λ⁻`.
#[derive(Clone, Debug)]
pub struct Lambda2Blocks<T> {
    pub plus: Tensor<T>,
    pub minus: Tensor<T>,
    /// `T(σ⁺_A, σ⁻_B)`.
    pub mixed: Tensor<T>,
}

pub fn lambda2_blocks<T: Real>(t_frame: &Tensor<T>) -> Lambda2Blocks<T> {
    let p = lambda_basis(T::one());
    let m = lambda_basis(-T::one());
    Lambda2Blocks {
        plus: Tensor::from_fn(3, 2, |i| curvature_bilinear(t_frame, &p[i[0]], &p[i[1]])),
        minus: Tensor::from_fn(3, 2, |i| curvature_bilinear(t_frame, &m[i[0]], &m[i[1]])),
        mixed: Tensor::from_fn(3, 2, |i| curvature_bilinear(t_frame, &p[i[0]], &m[i[1]])),
    }
}

/// Curvature-type tensor in an orthonormal 4-frame whose 2-form operator has the given blocks.
pub fn tensor_from_blocks<T: Real>(b: &Lambda2Blocks<T>) -> Tensor<T> {
    let p = lambda_basis(T::one());
    let m = lambda_basis(-T::one());
    let mut out = Tensor::zeros(4, 4);
    let mut add = |op: &Tensor<T>, u: &[Tensor<T>; 3], v: &[Tensor<T>; 3], sym: bool| {
        for a in 0..3 {
            for c in 0..3 {
                let w = op.at(&[a, c]);
                multi_indices(4, 4, |t| {
                    let mut val = u[a].at(&[t[0], t[1]]) * v[c].at(&[t[3], t[2]]);
                    if sym {
                        val += v[c].at(&[t[0], t[1]]) * u[a].at(&[t[3], t[2]]);
                    }
                    out.add_at(t, w * val);
                });
            }
        }
    };
    add(&b.plus, &p, &p, false);
    add(&b.minus, &m, &m, false);
    add(&b.mixed, &p, &m, true);
    out
}

/// Index position of a tensor slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Up,
    Down,
}

/// Levi-Civita covariant derivative; the new (derivative) index is placed first.
pub fn covariant_derivative<T: Real>(t: &JTensor<T>, slots: &[Slot], gamma: &JTensor<T>) -> Result<JTensor<T>> {
    if slots.len() != t.rank() {
        return Err(GeomError::Usage(format!(
            "valence mismatch: {} slots for a rank-{} tensor",
            slots.len(),
            t.rank()
        )));
    }
    if t.order() == 0 {
        return Err(GeomError::JetOrder { needed: 1, have: 0 });
    }
    let n = t.n();
    let k = t.order() - 1;
    let gam = gamma.truncate(k.min(gamma.order()));
    let gam = if gam.order() > k { gam.truncate(k) } else { gam };
    let tk = t.truncate(k);
    let r = t.rank();
    JTensor::try_from_fn(n, r + 1, |idx| {
        let m = idx[0];
        let rest = &idx[1..];
        let mut acc = t.at(rest).derivative(m)?;
        let mut src = rest.to_vec();
        for (p, slot) in slots.iter().enumerate() {
            let a = rest[p];
            for q in 0..n {
                src[p] = q;
                match slot {
                    Slot::Up => acc.fma_assign(gam.at(&[a, m, q]), tk.at(&src)),
                    Slot::Down => {
                        let neg = -gam.at(&[q, m, a]);
                        acc.fma_assign(&neg, tk.at(&src));
                    }
                }
            }
            src[p] = a;
        }
        Ok(acc)
    })
}

/// Co-differential on the first (covariant) slot: `(δT)_{...} = -g^{ij} ∇_i T_{j...}`.
pub fn divergence<T: Real>(geom: &LocalGeometry<T>, t: &JTensor<T>, slots: &[Slot]) -> Result<JTensor<T>> {
    let n = t.n();
    let nt = covariant_derivative(t, slots, geom.christoffel())?;
    let gi = geom.inverse_metric().truncate(nt.order());
    let r = t.rank();
    Ok(JTensor::from_fn(n, r - 1, |rest| {
        let mut acc = Jet::zero(gi.layout());
        let mut idx = vec![0usize; r + 1];
        idx[2..].copy_from_slice(rest);
        for i in 0..n {
            for j in 0..n {
                idx[0] = i;
                idx[1] = j;
                acc.fma_assign(gi.at(&[i, j]), nt.at(&idx));
            }
        }
        -acc
    }))
}

/// Scalar Laplacian with the geometer's sign: `Δf = -g^{ij}(∂_i∂_j f - Γ^k_ij ∂_k f)`.
pub fn laplacian<T: Real>(geom: &LocalGeometry<T>, f: &Jet<T>) -> Result<Jet<T>> {
    if f.order() < 2 {
        return Err(GeomError::JetOrder { needed: 2, have: f.order() });
    }
    let n = geom.dim();
    let grad = JTensor::try_from_fn(n, 1, |i| f.derivative(i[0]))?;
    let d = divergence(geom, &grad, &[Slot::Down])?;
    Ok(d.at(&[]).clone())
}

/// Largest relative violation of the algebraic Riemann symmetries and first Bianchi identity.
pub fn riemann_symmetry_residual<T: Real>(r: &Tensor<T>) -> T {
    let n = r.n();
    let scale = r.max_abs().max(T::one());
    let mut worst = T::zero();
    multi_indices(n, 4, |t| {
        let (i, j, k, l) = (t[0], t[1], t[2], t[3]);
        let v = r.at(t);
        let cands = [
            v + r.at(&[j, i, k, l]),
            v + r.at(&[i, j, l, k]),
            v - r.at(&[k, l, i, j]),
            v + r.at(&[j, k, i, l]) + r.at(&[k, i, j, l]),
        ];
        for c in cands {
            worst = worst.max(c.abs());
        }
    });
    worst / scale
}

/// Largest cyclic sum `∇_m R_ijkl + ∇_i R_jmkl + ∇_j R_mikl` (needs metric jets of order 3).
pub fn second_bianchi_residual<T: Real>(geom: &LocalGeometry<T>) -> Result<T> {
    if geom.order() < 3 {
        return Err(GeomError::JetOrder { needed: 3, have: geom.order() });
    }
    let n = geom.dim();
    let cj = geom.curvature_jets()?;
    let nr = covariant_derivative(&cj.riemann, &[Slot::Down; 4], geom.christoffel())?;
    let mut worst = T::zero();
    multi_indices(n, 5, |t| {
        let (m, i, j, k, l) = (t[0], t[1], t[2], t[3], t[4]);
        let c = nr.at(&[m, i, j, k, l]).value() + nr.at(&[i, j, m, k, l]).value() + nr.at(&[j, m, i, k, l]).value();
        worst = worst.max(c.abs());
    });
    Ok(worst)
}

/// Max sectional-curvature deviation from `k` over coordinate 2-planes and the given extra planes.
pub fn sectional_curvature<T: Real>(r: &Tensor<T>, g: &Tensor<T>, u: &[T], v: &[T]) -> T {
    let n = g.n();
    let mut num = T::zero();
    multi_indices(n, 4, |t| {
        num += r.at(t) * u[t[0]] * v[t[1]] * v[t[2]] * u[t[3]];
    });
    let gg = |a: &[T], b: &[T]| -> T {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                s += g.at(&[i, j]) * a[i] * b[j];
            }
        }
        s
    };
    num / (gg(u, u) * gg(v, v) - gg(u, v) * gg(u, v))
}
