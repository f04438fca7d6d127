//! Almost-Hermitian quantities: ω, ∇J, s*, the Chern connection and its Ricci
//! form, the anti-invariant curvature pieces and the 4-dimensional identities.
//!
//! Conventions: `ω(u, v) = g(Ju, v)`, so `ω_ij = g_kj J^k_i`. Two-form norms
//! sum over increasing index pairs (`|ω|² = m`); endomorphism norms use the
//! full contraction. With these, `|∇ω|² = ½|∇J|²` holds identically.

use crate::error::{GeomError, Result};
use crate::forms::Form;
use crate::jet::Jet;
use crate::linalg;
use crate::riemann::{
    connection_curvature, covariant_derivative, curvature_bilinear, lambda_basis, laplacian, to_frame,
    CurvatureJets, LocalGeometry, MetricChart, Slot, StructureFlag,
};
use crate::scalar::Real;
use crate::tensor::{multi_indices, JTensor, Tensor};

/// Factor `c` in `iF_ij = c J^k_l R'^l_ijk` (trace of the Chern curvature on
/// `K^{-1}`), fixed by the wedge identity on Fubini-Study.
pub const CHERN_RICCI_NORMALIZATION: f64 = 0.5;

/// Tolerances for the pointwise structure invariants.
pub const J_SQUARED_TOL: f64 = 1e-10;
pub const COMPATIBILITY_TOL: f64 = 1e-10;
pub const CLOSEDNESS_TOL: f64 = 1e-9;
pub const EINSTEIN_TOL: f64 = 1e-8;

/// Jets of an almost-Hermitian structure at a point.
#[derive(Clone, Debug)]
pub struct AlmostHermitian<T> {
    geom: LocalGeometry<T>,
    j: JTensor<T>,
    omega: JTensor<T>,
    omega_up: JTensor<T>,
    nabla_j: JTensor<T>,
    nabla_omega: JTensor<T>,
    curv: CurvatureJets<T>,
}

/// Residuals of `J² = -1`, `g(J·,J·) = g` and `dω = 0` (the last relative to `max(1, max|∂ω|)`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StructureResiduals {
    pub j_squared: f64,
    pub compatibility: f64,
    pub d_omega: f64,
}

fn lower_j<T: Real>(g: &JTensor<T>, j: &JTensor<T>) -> JTensor<T> {
    let n = g.n();
    JTensor::from_fn(n, 2, |t| {
        let mut acc = Jet::zero(g.layout());
        for k in 0..n {
            acc.fma_assign(g.at(&[k, t[1]]), j.at(&[k, t[0]]));
        }
        acc
    })
}

fn raise2<T: Real>(gi: &JTensor<T>, b: &JTensor<T>) -> JTensor<T> {
    let n = b.n();
    let k = b.order().min(gi.order());
    let gi = gi.truncate(k);
    let b = b.truncate(k);
    JTensor::from_fn(n, 2, |t| {
        let mut acc = Jet::zero(gi.layout());
        for a in 0..n {
            for c in 0..n {
                let w = gi.at(&[t[0], a]) * gi.at(&[t[1], c]);
                acc.fma_assign(&w, b.at(&[a, c]));
            }
        }
        acc
    })
}

/// Strict-pair inner product of two covariant 2-forms: `½ g^ik g^jl α_ij β_kl`.
pub fn form_inner<T: Real>(gi: &Tensor<T>, a: &Tensor<T>, b: &Tensor<T>) -> T {
    let n = gi.n();
    let mut acc = T::zero();
    multi_indices(n, 4, |t| {
        acc += gi.at(&[t[0], t[2]]) * gi.at(&[t[1], t[3]]) * a.at(&[t[0], t[1]]) * b.at(&[t[2], t[3]]);
    });
    acc * T::lit(0.5)
}

/// Jet version of [`form_inner`].
fn form_inner_jet<T: Real>(gi: &JTensor<T>, a: &JTensor<T>, b: &JTensor<T>) -> Jet<T> {
    let n = gi.n();
    let k = gi.order().min(a.order()).min(b.order());
    let (gi, a, b) = (gi.truncate(k), a.truncate(k), b.truncate(k));
    let ua = raise2(&gi, &a);
    let mut acc = Jet::zero(gi.layout());
    for i in 0..n {
        for j in 0..n {
            acc.fma_assign(ua.at(&[i, j]), b.at(&[i, j]));
        }
    }
    acc.scale(T::lit(0.5))
}

/// `(dβ)_ijk = ∂_i β_jk + ∂_j β_ki + ∂_k β_ij` at the base point.
pub fn exterior_derivative_2form<T: Real>(b: &JTensor<T>) -> Result<Tensor<T>> {
    let d = b.gradient()?.values();
    Ok(Tensor::from_fn(b.n(), 3, |t| {
        let (i, j, k) = (t[0], t[1], t[2]);
        d.at(&[i, j, k]) + d.at(&[j, k, i]) + d.at(&[k, i, j])
    }))
}

/// Slice `t[m, ..]` of a rank-3 tensor as a rank-2 tensor.
fn slice3<T: Real>(t: &Tensor<T>, m: usize) -> Tensor<T> {
    Tensor::from_fn(t.n(), 2, |i| t.at(&[m, i[0], i[1]]))
}

fn slice3_jet<T: Real>(t: &JTensor<T>, m: usize) -> JTensor<T> {
    JTensor::from_fn(t.n(), 2, |i| t.at(&[m, i[0], i[1]]).clone())
}

impl<T: Real> AlmostHermitian<T> {
    /// Evaluates the chart's (g, J) at `p` with jets of order `order` (>= 2) and
    /// checks the structure invariants.
    pub fn new<C: MetricChart<T> + ?Sized>(chart: &C, p: &[T], order: usize) -> Result<Self> {
        if order < 2 {
            return Err(GeomError::JetOrder { needed: 2, have: order });
        }
        let geom = LocalGeometry::new(chart, p, order)?;
        let out = Self::from_geometry(geom)?;
        if matches!(chart.structure(), StructureFlag::Kahler | StructureFlag::AlmostKahlerNonkahler) {
            let d = out.structure_residuals().d_omega;
            if d > CLOSEDNESS_TOL {
                return Err(GeomError::Structure { invariant: "dω = 0", residual: d });
            }
        }
        Ok(out)
    }

    pub fn from_geometry(geom: LocalGeometry<T>) -> Result<Self> {
        let j = geom
            .structure()
            .cloned()
            .ok_or_else(|| GeomError::Unsupported("chart carries no almost complex structure".into()))?;
        if geom.dim() % 2 != 0 {
            return Err(GeomError::Dimension(format!("odd dimension {}", geom.dim())));
        }
        let omega = lower_j(geom.metric(), &j);
        let omega_up = raise2(geom.inverse_metric(), &omega);
        let nabla_j = covariant_derivative(&j, &[Slot::Up, Slot::Down], geom.christoffel())?;
        let nabla_omega = covariant_derivative(&omega, &[Slot::Down, Slot::Down], geom.christoffel())?;
        let curv = geom.curvature_jets()?;
        let out = Self { geom, j, omega, omega_up, nabla_j, nabla_omega, curv };
        let r = out.structure_residuals();
        if r.j_squared > J_SQUARED_TOL {
            return Err(GeomError::Structure { invariant: "J∘J = -Id", residual: r.j_squared });
        }
        if r.compatibility > COMPATIBILITY_TOL {
            return Err(GeomError::Structure { invariant: "g(J·,J·) = g", residual: r.compatibility });
        }
        Ok(out)
    }

    pub fn geometry(&self) -> &LocalGeometry<T> {
        &self.geom
    }

    pub fn dim(&self) -> usize {
        self.geom.dim()
    }

    pub fn complex_dim(&self) -> usize {
        self.geom.dim() / 2
    }

    pub fn j(&self) -> &JTensor<T> {
        &self.j
    }

    pub fn omega(&self) -> &JTensor<T> {
        &self.omega
    }

    pub fn curvature(&self) -> &CurvatureJets<T> {
        &self.curv
    }

    /// `(∇_m J)^a_b` stored `[m][a][b]`.
    pub fn nabla_j(&self) -> &JTensor<T> {
        &self.nabla_j
    }

    /// `∇_m ω_ij` stored `[m][i][j]`.
    pub fn nabla_omega(&self) -> &JTensor<T> {
        &self.nabla_omega
    }

    pub fn structure_residuals(&self) -> StructureResiduals {
        let n = self.dim();
        let j0 = self.j.values();
        let g0 = self.geom.metric().values();
        let jj = linalg::matmul(&j0, &j0).add(&Tensor::identity(n));
        let gjj = linalg::matmul(&linalg::matmul(&linalg::transpose(&j0), &g0), &j0).sub(&g0);
        let scale = g0.max_abs().max(T::one());
        StructureResiduals {
            j_squared: jj.max_abs().to_f64_lossy(),
            compatibility: (gjj.max_abs() / scale).to_f64_lossy(),
            d_omega: (self.d_omega().max_abs() / self.omega.gradient().map_or(T::one(), |d| d.values().max_abs().max(T::one()))).to_f64_lossy(),
        }
    }

    /// `(dω)_ijk = ∂_i ω_jk + ∂_j ω_ki + ∂_k ω_ij`.
    pub fn d_omega(&self) -> Tensor<T> {
        exterior_derivative_2form(&self.omega).expect("order >= 1")
    }

    /// `|∇ω|²` with strict pairs on the form slots, as a jet of order `order - 1`.
    pub fn nabla_omega_norm_sq_jet(&self) -> Jet<T> {
        let n = self.dim();
        let gi = self.geom.inverse_metric().truncate(self.nabla_omega.order());
        let mut acc = Jet::zero(gi.layout());
        for m in 0..n {
            for l in 0..n {
                let inner = form_inner_jet(&gi, &slice3_jet(&self.nabla_omega, m), &slice3_jet(&self.nabla_omega, l));
                acc.fma_assign(gi.at(&[m, l]), &inner);
            }
        }
        acc
    }

    /// `|∇J|²` with full contraction of all slots.
    pub fn nabla_j_full_norm_sq(&self) -> T {
        let n = self.dim();
        let g = self.geom.metric().values();
        let gi = self.geom.inverse_metric().values();
        let nj = self.nabla_j.values();
        let mut acc = T::zero();
        multi_indices(n, 6, |t| {
            let (m, a, c, l, b, d) = (t[0], t[1], t[2], t[3], t[4], t[5]);
            acc += gi.at(&[m, l]) * g.at(&[a, b]) * gi.at(&[c, d]) * nj.at(&[m, a, c]) * nj.at(&[l, b, d]);
        });
        acc
    }

    /// `s* = 2 R(ω, ω)` as a jet of order `order - 2`.
    pub fn star_scalar_jet(&self) -> Jet<T> {
        let n = self.dim();
        let r = &self.curv.riemann;
        let k = r.order();
        let w = self.omega_up.truncate(k);
        let mut acc = Jet::zero(r.layout());
        multi_indices(n, 4, |t| {
            let (i, j, kk, l) = (t[0], t[1], t[2], t[3]);
            if i < j && kk < l {
                let ww = w.at(&[i, j]) * w.at(&[kk, l]);
                acc.fma_assign(&ww, r.at(&[i, j, l, kk]));
            }
        });
        acc.scale(T::lit(2.0))
    }

    pub fn scalar(&self) -> T {
        self.curv.scalar.value()
    }

    pub fn star_scalar(&self) -> T {
        self.star_scalar_jet().value()
    }

    /// `ρ*_kl = R(ω)_kl = ½ ω^ij R_ijlk`, jets of order `order - 2`.
    pub fn twisted_ricci_jet(&self) -> JTensor<T> {
        let n = self.dim();
        let r = &self.curv.riemann;
        let w = self.omega_up.truncate(r.order());
        JTensor::from_fn(n, 2, |t| {
            let mut acc = Jet::zero(r.layout());
            for i in 0..n {
                for j in 0..n {
                    acc.fma_assign(w.at(&[i, j]), r.at(&[i, j, t[1], t[0]]));
                }
            }
            acc.scale(T::lit(0.5))
        })
    }

    /// Chern connection coefficients `Γ'^l_ik = Γ^l_ik - ½ J^l_a (∇_i J)^a_k` (`[l][i][k]`).
    pub fn chern_christoffel(&self) -> JTensor<T> {
        let n = self.dim();
        let k = self.nabla_j.order();
        let gam = self.geom.christoffel().truncate(k);
        let j = self.j.truncate(k);
        let half = T::lit(0.5);
        JTensor::from_fn(n, 3, |t| {
            let (l, i, kk) = (t[0], t[1], t[2]);
            let mut corr = Jet::zero(gam.layout());
            for a in 0..n {
                corr.fma_assign(j.at(&[l, a]), self.nabla_j.at(&[i, a, kk]));
            }
            gam.at(&[l, i, kk]) - &corr.scale(half)
        })
    }

    /// `R'^l_ijk` of the Chern connection (`[l][i][j][k]`).
    pub fn chern_curvature(&self) -> Result<JTensor<T>> {
        connection_curvature(&self.chern_christoffel())
    }

    /// `iF_ij = c J^k_l R'^l_ijk`, jets of order `order - 2`.
    pub fn chern_ricci_jet(&self) -> Result<JTensor<T>> {
        let n = self.dim();
        let rc = self.chern_curvature()?;
        let j = self.j.truncate(rc.order());
        let c = T::lit(CHERN_RICCI_NORMALIZATION);
        Ok(JTensor::from_fn(n, 2, |t| {
            let mut acc = Jet::zero(rc.layout());
            for k in 0..n {
                for l in 0..n {
                    acc.fma_assign(j.at(&[k, l]), rc.at(&[l, t[0], t[1], k]));
                }
            }
            acc.scale(c)
        }))
    }

    /// `β''(X,Y) = ½(β(X,Y) - β(JX,JY))`.
    pub fn double_prime(&self, b: &Tensor<T>) -> Tensor<T> {
        let jb = self.j_transform(b);
        b.sub(&jb).scale(T::lit(0.5))
    }

    /// `β'(X,Y) = ½(β(X,Y) + β(JX,JY))`.
    pub fn single_prime(&self, b: &Tensor<T>) -> Tensor<T> {
        let jb = self.j_transform(b);
        b.add(&jb).scale(T::lit(0.5))
    }

    /// `β(J·, J·)`.
    fn j_transform(&self, b: &Tensor<T>) -> Tensor<T> {
        let j = self.j.values();
        linalg::matmul(&linalg::matmul(&linalg::transpose(&j), b), &j)
    }

    /// The anti-invariant curvature component `W''`. All four mixed terms carry a
    /// minus sign; with `+R(JX, Y, JZ, T)` the tensor is not anti-invariant and
    /// does not vanish on Kähler metrics.
    pub fn w_double_prime(&self) -> Tensor<T> {
        let n = self.dim();
        let r = self.curv.riemann.values();
        let j = self.j.values();
        // R with selected slots hit by J: R(J^{s0} X, J^{s1} Y, J^{s2} Z, J^{s3} T)
        let rj = |mask: [bool; 4]| -> Tensor<T> {
            let mut cur = r.clone();
            for (slot, &on) in mask.iter().enumerate() {
                if !on {
                    continue;
                }
                cur = Tensor::from_fn(n, 4, |idx| {
                    let mut src = idx.to_vec();
                    let mut acc = T::zero();
                    for q in 0..n {
                        src[slot] = q;
                        acc += j.at(&[q, idx[slot]]) * cur.at(&src);
                    }
                    acc
                });
            }
            cur
        };
        let terms: [([bool; 4], f64); 8] = [
            ([false, false, false, false], 1.0),
            ([true, true, false, false], -1.0),
            ([false, false, true, true], -1.0),
            ([true, true, true, true], 1.0),
            ([false, true, false, true], -1.0),
            ([true, false, false, true], -1.0),
            ([false, true, true, false], -1.0),
            ([true, false, true, false], -1.0),
        ];
        let mut out = Tensor::zeros(n, 4);
        for (mask, w) in terms {
            out = out.add(&rj(mask).scale(T::lit(w / 8.0)));
        }
        out
    }

    /// `φ(X,Y) = ⟨∇_{JX} ω, ∇_Y ω⟩`.
    pub fn phi(&self) -> Tensor<T> {
        let n = self.dim();
        let gi = self.geom.inverse_metric().values();
        let j = self.j.values();
        let no = self.nabla_omega.values();
        let slices: Vec<Tensor<T>> = (0..n).map(|m| slice3(&no, m)).collect();
        let inner = Tensor::from_fn(n, 2, |t| form_inner(&gi, &slices[t[0]], &slices[t[1]]));
        Tensor::from_fn(n, 2, |t| (0..n).map(|a| j.at(&[a, t[0]]) * inner.at(&[a, t[1]])).sum())
    }

    /// Rough Laplacian `∇*∇ω = -g^{ab} ∇_a ∇_b ω`, jets of order `order - 2`.
    pub fn rough_laplacian_omega_jet(&self) -> Result<JTensor<T>> {
        let n = self.dim();
        let nno = covariant_derivative(&self.nabla_omega, &[Slot::Down; 3], self.geom.christoffel())?;
        let gi = self.geom.inverse_metric().truncate(nno.order());
        Ok(JTensor::from_fn(n, 2, |t| {
            let mut acc = Jet::zero(gi.layout());
            for a in 0..n {
                for b in 0..n {
                    acc.fma_assign(gi.at(&[a, b]), nno.at(&[a, b, t[0], t[1]]));
                }
            }
            -acc
        }))
    }

    pub fn inverse_metric(&self) -> Tensor<T> {
        self.geom.inverse_metric().values()
    }
}

/// Pointwise almost-Hermitian data.
#[derive(Clone, Debug)]
pub struct AKPointData<T> {
    pub point: Vec<T>,
    pub omega: Tensor<T>,
    pub nabla_omega: Tensor<T>,
    pub nabla_j: Tensor<T>,
    pub s: T,
    pub s_star: T,
    pub hermitian_s: T,
    pub chern_ricci: Tensor<T>,
    pub w_double_prime: Tensor<T>,
    pub rho_star: Tensor<T>,
    pub rho_star_double_prime: Tensor<T>,
    pub phi: Tensor<T>,
}

pub fn point_data<T: Real>(ah: &AlmostHermitian<T>) -> Result<AKPointData<T>> {
    let s = ah.scalar();
    let s_star = ah.star_scalar();
    let rho = ah.twisted_ricci_jet().values();
    Ok(AKPointData {
        point: ah.geometry().point().to_vec(),
        omega: ah.omega().values(),
        nabla_omega: ah.nabla_omega().values(),
        nabla_j: ah.nabla_j().values(),
        s,
        s_star,
        hermitian_s: hermitian_scalar(s, s_star),
        chern_ricci: ah.chern_ricci_jet()?.values(),
        w_double_prime: ah.w_double_prime(),
        rho_star_double_prime: ah.double_prime(&rho),
        rho_star: rho,
        phi: ah.phi(),
    })
}

/// ω at `p`, after checking J² = -1 and compatibility.
pub fn fundamental_form<T: Real, C: MetricChart<T> + ?Sized>(chart: &C, p: &[T]) -> Result<Tensor<T>> {
    Ok(AlmostHermitian::new(chart, p, 2)?.omega().values())
}

/// `(∇J, ∇ω, |∇ω|²_form, |∇J|²_full)` at a point.
#[derive(Clone, Debug)]
pub struct NablaStructure<T> {
    pub nabla_j: Tensor<T>,
    pub nabla_omega: Tensor<T>,
    pub norm_form: T,
    pub norm_full: T,
}

pub fn nabla_structure<T: Real, C: MetricChart<T> + ?Sized>(chart: &C, p: &[T]) -> Result<NablaStructure<T>> {
    let ah = AlmostHermitian::new(chart, p, 2)?;
    Ok(NablaStructure {
        nabla_j: ah.nabla_j().values(),
        nabla_omega: ah.nabla_omega().values(),
        norm_form: ah.nabla_omega_norm_sq_jet().value(),
        norm_full: ah.nabla_j_full_norm_sq(),
    })
}

pub fn star_scalar<T: Real, C: MetricChart<T> + ?Sized>(chart: &C, p: &[T]) -> Result<T> {
    Ok(AlmostHermitian::new(chart, p, 2)?.star_scalar())
}

/// `(s + s*)/2`.
pub fn hermitian_scalar<T: Real>(s: T, s_star: T) -> T {
    (s + s_star) * T::lit(0.5)
}

/// Chern connection coefficients with the Hermitian-property residuals `|∇'g|`, `|∇'J|`.
#[derive(Clone, Debug)]
pub struct ChernConnection<T> {
    pub coefficients: Tensor<T>,
    pub metric_residual: T,
    pub j_residual: T,
}

pub const CHERN_HERMITIAN_TOL: f64 = 1e-10;

pub fn chern_connection_at<T: Real>(ah: &AlmostHermitian<T>) -> Result<ChernConnection<T>> {
    let gc = ah.chern_christoffel();
    let ng = covariant_derivative(ah.geometry().metric(), &[Slot::Down, Slot::Down], &gc)?;
    let nj = covariant_derivative(ah.j(), &[Slot::Up, Slot::Down], &gc)?;
    let scale = ah.geometry().metric().values().max_abs().max(T::one());
    let out = ChernConnection {
        coefficients: gc.values(),
        metric_residual: ng.values().max_abs() / scale,
        j_residual: nj.values().max_abs(),
    };
    let worst = out.metric_residual.max(out.j_residual).to_f64_lossy();
    if worst > CHERN_HERMITIAN_TOL {
        return Err(GeomError::Structure { invariant: "Chern connection preserves g and J", residual: worst });
    }
    Ok(out)
}

pub fn chern_connection<T: Real, C: MetricChart<T> + ?Sized>(chart: &C, p: &[T]) -> Result<ChernConnection<T>> {
    chern_connection_at(&AlmostHermitian::new(chart, p, 2)?)
}

/// Top-degree coefficients of `iF ∧ ω^{m-1}` and `(s+s*)/(4m) ω^m`.
pub fn wedge_identity_sides<T: Real>(ah: &AlmostHermitian<T>, chern_ricci: &Tensor<T>) -> (T, T) {
    let m = ah.complex_dim();
    let om = Form::two_form(&ah.omega().values());
    let lhs = Form::two_form(chern_ricci).wedge(&om.power(m - 1)).top();
    let rhs = om.power(m).top() * (ah.scalar() + ah.star_scalar()) / T::lit(4.0 * m as f64);
    (lhs, rhs)
}

pub const WEDGE_IDENTITY_TOL: f64 = 1e-8;

/// The Chern-Ricci form `iF`; fails with a calibration error if the wedge identity is violated.
pub fn chern_ricci_form<T: Real, C: MetricChart<T> + ?Sized>(chart: &C, p: &[T]) -> Result<Tensor<T>> {
    let ah = AlmostHermitian::new(chart, p, 2)?;
    let f = ah.chern_ricci_jet()?.values();
    let (l, r) = wedge_identity_sides(&ah, &f);
    let scale = l.abs().max(r.abs()).max(T::one());
    let res = ((l - r).abs() / scale).to_f64_lossy();
    if res > WEDGE_IDENTITY_TOL {
        return Err(GeomError::Calibration { what: "iF ∧ ω^{m-1} = (s+s*)/(4m) ω^m", residual: res });
    }
    Ok(f)
}

/// `(W'', ρ*, (ρ*)'', φ)`.
#[derive(Clone, Debug)]
pub struct AntiInvariantParts<T> {
    pub w_double_prime: Tensor<T>,
    pub rho_star: Tensor<T>,
    pub rho_star_double_prime: Tensor<T>,
    pub phi: Tensor<T>,
}

pub fn anti_invariant_parts<T: Real, C: MetricChart<T> + ?Sized>(chart: &C, p: &[T]) -> Result<AntiInvariantParts<T>> {
    let ah = AlmostHermitian::new(chart, p, 2)?;
    let rho = ah.twisted_ricci_jet().values();
    Ok(AntiInvariantParts {
        w_double_prime: ah.w_double_prime(),
        rho_star_double_prime: ah.double_prime(&rho),
        rho_star: rho,
        phi: ah.phi(),
    })
}

/// Residuals of the four-dimensional identities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LebrunResiduals {
    /// `|½|∇ω|² - W₊(ω,ω) + s/3|`.
    pub norm_identity: f64,
    /// Pointwise residual of `⟨W₊, ∇*∇(ω⊗ω)⟩ = W₊(ω,ω)² + 4|W₊(ω)|² - s W₊(ω,ω)`.
    pub laplacian_identity: f64,
    /// Value of `4|W₊|² - 4|W₊(ω)|² + ½ W₊(ω,ω)²` (must be >= 0).
    pub weyl_lower_bound: f64,
    /// Needs fourth derivatives of the metric; not evaluated.
    pub fourth_order: Option<f64>,
}

/// Self-dual Weyl data in an oriented orthonormal frame.
struct SelfDual<T> {
    /// 3x3 block.
    w: Tensor<T>,
    frame: Tensor<T>,
}

impl<T: Real> SelfDual<T> {
    fn new(ah: &AlmostHermitian<T>) -> Result<Self> {
        let g = ah.geometry().metric().values();
        let frame = linalg::orthonormal_frame(&g)?;
        let cj = ah.curvature();
        let weyl = crate::riemann::weyl_tensor(&cj.riemann.values(), &cj.ricci.values(), cj.scalar.value(), &g);
        let wf = to_frame(&weyl, &frame);
        let basis = lambda_basis(T::one());
        let w = Tensor::from_fn(3, 2, |i| curvature_bilinear(&wf, &basis[i[0]], &basis[i[1]]));
        Ok(Self { w, frame })
    }

    /// Components `⟨β, σ⁺_A⟩` of a covariant coordinate 2-form.
    fn coords(&self, b: &Tensor<T>) -> [T; 3] {
        let bf = to_frame(b, &self.frame);
        let basis = lambda_basis(T::one());
        let mut out = [T::zero(); 3];
        for (a, s) in basis.iter().enumerate() {
            let mut acc = T::zero();
            for i in 0..4 {
                for j in (i + 1)..4 {
                    acc += bf.at(&[i, j]) * s.at(&[i, j]);
                }
            }
            out[a] = acc;
        }
        out
    }

    fn bilinear(&self, a: &[T; 3], b: &[T; 3]) -> T {
        let mut acc = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                acc += a[i] * self.w.at(&[i, j]) * b[j];
            }
        }
        acc
    }

    fn apply(&self, a: &[T; 3]) -> [T; 3] {
        let mut out = [T::zero(); 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|j| self.w.at(&[i, j]) * a[j]).sum();
        }
        out
    }
}

pub fn lebrun_residuals_at<T: Real>(ah: &AlmostHermitian<T>) -> Result<LebrunResiduals> {
    if ah.dim() != 4 {
        return Err(GeomError::Dimension(format!("the four-dimensional identities need n = 4, got {}", ah.dim())));
    }
    let sd = SelfDual::new(ah)?;
    let s = ah.scalar();
    let om = sd.coords(&ah.omega().values());
    let w_oo = sd.bilinear(&om, &om);
    let half_norm = ah.nabla_omega_norm_sq_jet().value() * T::lit(0.5);
    let norm_identity = (half_norm - w_oo + s / T::lit(3.0)).abs();
    let wom = sd.apply(&om);
    let wom_sq: T = wom.iter().map(|v| *v * *v).sum();
    let w_sq: T = sd.w.data().iter().map(|v| *v * *v).sum();
    let weyl_lower_bound = T::lit(4.0) * w_sq - T::lit(4.0) * wom_sq + T::lit(0.5) * w_oo * w_oo;
    let laplacian_identity = if ah.geometry().order() >= 3 {
        let lap = sd.coords(&ah.rough_laplacian_omega_jet()?.values());
        let gi = ah.inverse_metric();
        let no = ah.nabla_omega().values();
        let slices: Vec<[T; 3]> = (0..4).map(|m| sd.coords(&slice3(&no, m))).collect();
        let mut grad_term = T::zero();
        for a in 0..4 {
            for b in 0..4 {
                grad_term += gi.at(&[a, b]) * sd.bilinear(&slices[a], &slices[b]);
            }
        }
        let lhs = T::lit(2.0) * sd.bilinear(&lap, &om) - T::lit(2.0) * grad_term;
        let rhs = w_oo * w_oo + T::lit(4.0) * wom_sq - s * w_oo;
        (lhs - rhs).abs().to_f64_lossy()
    } else {
        f64::NAN
    };
    Ok(LebrunResiduals { norm_identity: norm_identity.to_f64_lossy(), laplacian_identity, weyl_lower_bound: weyl_lower_bound.to_f64_lossy(), fourth_order: None })
}

pub fn lebrun_identity_residuals<T: Real, C: MetricChart<T> + ?Sized>(chart: &C, p: &[T]) -> Result<LebrunResiduals> {
    if chart.dim() != 4 {
        return Err(GeomError::Dimension(format!("the four-dimensional identities need n = 4, got {}", chart.dim())));
    }
    lebrun_residuals_at(&AlmostHermitian::new(chart, p, 3)?)
}

/// Terms of the Einstein almost-Kähler integral formula.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SekigawaTerms {
    pub codiff_term: f64,
    pub laplacian_term: f64,
    pub w_dd: f64,
    pub rho_dd: f64,
    pub rough: f64,
    pub phi: f64,
    pub scalar_term: f64,
}

impl SekigawaTerms {
    pub fn lhs(&self) -> f64 {
        8.0 * self.codiff_term - self.laplacian_term
    }
    pub fn rhs(&self) -> f64 {
        8.0 * self.w_dd + 4.0 * self.rho_dd + self.rough + self.phi + self.scalar_term
    }
    pub fn residual(&self) -> f64 {
        (self.lhs() - self.rhs()).abs()
    }
}

/// Relative Einstein residual `max|Ric - (s/n) g| / max(1, max|g|)`.
pub fn einstein_residual<T: Real>(geom: &LocalGeometry<T>, cj: &CurvatureJets<T>) -> f64 {
    let g = geom.metric().values();
    let n = T::lit(geom.dim() as f64);
    let r = cj.ricci.values().sub(&g.scale(cj.scalar.value() / n));
    (r.max_abs() / g.max_abs().max(T::one())).to_f64_lossy()
}

pub fn sekigawa_terms_at<T: Real>(ah: &AlmostHermitian<T>) -> Result<SekigawaTerms> {
    let geom = ah.geometry();
    if geom.order() < 3 {
        return Err(GeomError::JetOrder { needed: 3, have: geom.order() });
    }
    let ein = einstein_residual(geom, ah.curvature());
    if ein > EINSTEIN_TOL {
        return Err(GeomError::Precondition { what: "Einstein metric (Ric = (s/n) g)", residual: ein });
    }
    let n = ah.dim();
    let gi_j = geom.inverse_metric();
    let rho = ah.twisted_ricci_jet();
    // v_k = ⟨ρ*, ∇_k ω⟩
    let v = JTensor::from_fn(n, 1, |t| form_inner_jet(gi_j, &rho, &slice3_jet(ah.nabla_omega(), t[0])));
    let dv = crate::riemann::divergence(geom, &v, &[Slot::Down])?.at(&[]).value();
    let lap = laplacian(geom, &ah.nabla_omega_norm_sq_jet())?.value();
    let gi = geom.inverse_metric().values();
    let wdd = ah.w_double_prime();
    let mut wdd_sq = T::zero();
    multi_indices(n, 8, |t| {
        wdd_sq += gi.at(&[t[0], t[4]]) * gi.at(&[t[1], t[5]]) * gi.at(&[t[2], t[6]]) * gi.at(&[t[3], t[7]])
            * wdd.at(&t[0..4])
            * wdd.at(&t[4..8]);
    });
    let rho_v = rho.values();
    let rho_dd = ah.double_prime(&rho_v);
    let rough = ah.single_prime(&ah.rough_laplacian_omega_jet()?.values());
    let phi = ah.phi();
    let s = ah.scalar();
    let f = |x: T| x.to_f64_lossy();
    Ok(SekigawaTerms {
        codiff_term: f(dv),
        laplacian_term: f(lap),
        w_dd: f(wdd_sq * T::lit(0.25)),
        rho_dd: f(form_inner(&gi, &rho_dd, &rho_dd)),
        rough: f(form_inner(&gi, &rough, &rough)),
        phi: f(form_inner(&gi, &phi, &phi)),
        scalar_term: f(s / T::lit(n as f64) * ah.nabla_omega_norm_sq_jet().value()),
    })
}

pub fn sekigawa_apostolov_residual<T: Real, C: MetricChart<T> + ?Sized>(chart: &C, p: &[T]) -> Result<f64> {
    if chart.dim() % 2 != 0 {
        return Err(GeomError::Dimension("odd dimension".into()));
    }
    Ok(sekigawa_terms_at(&AlmostHermitian::new(chart, p, 3)?)?.residual())
}
