//! ADM mass on ALE ends, the θ∧ω^{m-1} mass, bulk Hermitian scalar integrals,
//! the c₁ pairing, and the two sides of the mass formula.
//!
//! Every pipeline integrates over the chart's full coordinate sphere or shell and
//! divides by `|Γ|`. The ADM constant is `Γ(n/2)/(4(n-1)π^{n/2})` (`1/(16π)` for
//! `n = 3`) applied to `∮ (∂_i g_ij - ∂_j g_ii) ν^j dA` with the Euclidean area
//! element of the coordinate sphere.

use std::f64::consts::PI;

use serde::Serialize;

use crate::almost_kahler::AlmostHermitian;
use crate::catalog::{AleEnd, CatalogEntry, IntegrationScheme, Potential};
use crate::clifford::{adapted_frame_jets, theta_coordinate_jets};
use crate::error::{GeomError, Result};
use crate::forms::Form;
use crate::jet::JetContext;
use crate::linalg;
use crate::quadrature::{gamma_half, gauss_legendre_interval, neumaier_sum, ordered_par_sum, SphereQuadrature};
use crate::riemann::MetricChart;
use crate::tensor::Tensor;

pub type Chart = dyn MetricChart<f64>;

/// Default polynomial degree of the sphere rules.
pub const DEFAULT_SPHERE_DEGREE: usize = 20;

/// Tolerance of the Γ-invariance spot check.
pub const GAMMA_INVARIANCE_TOL: f64 = 1e-9;

pub fn adm_constant(n: usize) -> f64 {
    gamma_half(n) / (4.0 * (n as f64 - 1.0) * PI.powf(n as f64 / 2.0))
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn check_outside(end: &AleEnd, x: &[f64]) -> Result<()> {
    if norm(x) <= end.r0 {
        return Err(GeomError::OutOfDomain { point: x.to_vec() });
    }
    Ok(())
}

/// `Σ_ij (∂_i g_ij - ∂_j g_ii) x^j/|x|` at `x`.
pub fn adm_integrand(chart: &Chart, end: &AleEnd, x: &[f64]) -> Result<f64> {
    check_outside(end, x)?;
    if !chart.in_domain(x) {
        return Err(GeomError::OutOfDomain { point: x.to_vec() });
    }
    let n = chart.dim();
    let ctx = JetContext::new(x, 1)?;
    let dg = chart.metric(&ctx.coordinates())?.gradient()?.values(); // [k][i][j]
    let r = norm(x);
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (dg.at(&[i, i, j]) - dg.at(&[j, i, i])) * x[j] / r;
        }
    }
    Ok(acc)
}

/// Largest `|f(γx) - f(x)|` over the generators and the given points.
pub fn gamma_invariance_residual<F: Fn(&[f64]) -> Result<f64>>(end: &AleEnd, points: &[Vec<f64>], f: F) -> Result<f64> {
    let mut worst = 0.0f64;
    for x in points {
        let fx = f(x)?;
        for gen in &end.generators {
            let gx = linalg::mat_vec(gen, x);
            worst = worst.max((f(&gx)? - fx).abs());
        }
    }
    Ok(worst)
}

/// `max |g_ij - δ_ij| · r^τ` over sample directions, per radius.
pub fn decay_profile(chart: &Chart, end: &AleEnd, radii: &[f64], quad: &SphereQuadrature) -> Result<Vec<f64>> {
    let tau = if end.tau.is_finite() { end.tau } else { 0.0 };
    radii
        .iter()
        .map(|&r| {
            let mut worst = 0.0f64;
            for s in quad.nodes.iter().step_by((quad.len() / 64).max(1)) {
                let x: Vec<f64> = s.iter().map(|v| v * r).collect();
                let ctx = JetContext::new(&x, 0)?;
                let g = chart.metric(&ctx.coordinates())?.values();
                worst = worst.max(g.sub(&Tensor::identity(g.n())).max_abs());
            }
            Ok(worst * r.powf(tau))
        })
        .collect()
}

/// Per-radius values with a fitted limit `a + b r^{-q}`.
#[derive(Clone, Debug, Serialize)]
pub struct MassEstimate {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub extrapolated: f64,
    pub fit_exponent: f64,
    pub error_bar: f64,
    pub fit_residuals: Vec<f64>,
    pub warning: Option<String>,
}

/// Least-squares fit of `values ≈ a + b r^{-q}` with `q` free.
/// Returns `(a, b, q, residuals)`.
pub fn fit_power_tail(radii: &[f64], values: &[f64], q0: f64) -> (f64, f64, f64, Vec<f64>) {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let spread = values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)) - values.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    if scale == 0.0 || spread <= 1e-14 * scale {
        let a = neumaier_sum(values.iter().copied()) / values.len() as f64;
        return (a, 0.0, q0, values.iter().map(|v| v - a).collect());
    }
    let solve = |q: f64| -> (f64, f64, f64) {
        // normal equations for [1, r^-q]
        let t: Vec<f64> = radii.iter().map(|r| r.powf(-q)).collect();
        let k = radii.len() as f64;
        let st = neumaier_sum(t.iter().copied());
        let stt = neumaier_sum(t.iter().map(|v| v * v));
        let sy = neumaier_sum(values.iter().copied());
        let sty = neumaier_sum(t.iter().zip(values).map(|(a, b)| a * b));
        let det = k * stt - st * st;
        let b = (k * sty - st * sy) / det;
        let a = (sy - b * st) / k;
        let ssr = neumaier_sum(t.iter().zip(values).map(|(ti, y)| (y - a - b * ti).powi(2)));
        (a, b, ssr)
    };
    // coarse scan, then golden-section refinement
    let (lo, hi) = (0.05f64, 12.0f64);
    let steps = 240;
    let mut best = (q0.clamp(lo, hi), f64::INFINITY);
    for s in 0..=steps {
        let q = lo * (hi / lo).powf(s as f64 / steps as f64);
        let ssr = solve(q).2;
        if ssr < best.1 {
            best = (q, ssr);
        }
    }
    let ratio = (hi / lo).powf(1.0 / steps as f64);
    let (mut a, mut b) = ((best.0 / ratio).max(lo), (best.0 * ratio).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if solve(c).2 <= solve(d).2 {
            b = d;
        } else {
            a = c;
        }
    }
    let q = 0.5 * (a + b);
    let (a0, b0, _) = solve(q);
    let res = radii.iter().zip(values).map(|(r, y)| y - a0 - b0 * r.powf(-q)).collect();
    (a0, b0, q, res)
}

/// Builds the estimate: fit on all radii, error bar = RMS residual plus the shift
/// of the limit when the innermost radius is dropped, plus 64 ulp of the largest value.
pub fn estimate_from_values(radii: Vec<f64>, values: Vec<f64>, q0: f64) -> MassEstimate {
    let (a, _b, q, res) = fit_power_tail(&radii, &values, q0);
    let rms = (neumaier_sum(res.iter().map(|v| v * v)) / res.len() as f64).sqrt();
    let drop = if radii.len() >= 4 { (fit_power_tail(&radii[1..], &values[1..], q0).0 - a).abs() } else { 0.0 };
    let vmax = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let dist: Vec<f64> = values.iter().map(|v| (v - a).abs()).collect();
    let tol = 1e-12 * vmax;
    let monotone = dist.windows(2).all(|w| w[1] <= w[0] + tol);
    let warning = (!monotone).then(|| "per-radius values do not approach the fitted limit monotonically".to_string());
    MassEstimate { radii, values, extrapolated: a, fit_exponent: q, error_bar: rms + drop + 64.0 * f64::EPSILON * vmax, fit_residuals: res, warning }
}

fn check_radii(end: &AleEnd, radii: &[f64]) -> Result<()> {
    if radii.len() < 3 {
        return Err(GeomError::Usage("at least three radii are needed".into()));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(GeomError::Usage("radii must be strictly increasing".into()));
    }
    if radii[0] <= end.r0 {
        return Err(GeomError::OutOfDomain { point: vec![radii[0]] });
    }
    Ok(())
}

fn require_end(entry: &CatalogEntry) -> Result<&AleEnd> {
    entry.end.as_ref().ok_or_else(|| GeomError::Unsupported(format!("`{}` has no ALE end", entry.name)))
}

/// Normalized ADM value on the sphere of radius `r`.
pub fn adm_sphere_value(chart: &Chart, end: &AleEnd, r: f64, quad: &SphereQuadrature) -> Result<f64> {
    let n = chart.dim();
    let flux = quad.integrate(|s| {
        let x: Vec<f64> = s.iter().map(|v| v * r).collect();
        adm_integrand(chart, end, &x)
    })?;
    Ok(adm_constant(n) * r.powi(n as i32 - 1) * flux / end.gamma_order as f64)
}

fn gamma_spot_points(n: usize, r: f64) -> Vec<Vec<f64>> {
    (0..4)
        .map(|k| {
            let v: Vec<f64> = (0..n).map(|i| ((i * 7 + k * 3) as f64 * 0.37 + 0.2).sin()).collect();
            let s = norm(&v);
            v.iter().map(|c| c * r / s).collect()
        })
        .collect()
}

pub fn adm_mass_with(chart: &Chart, end: &AleEnd, radii: &[f64], degree: usize) -> Result<MassEstimate> {
    check_radii(end, radii)?;
    let n = chart.dim();
    let spot = gamma_invariance_residual(end, &gamma_spot_points(n, radii[0]), |x| adm_integrand(chart, end, x))?;
    if spot > GAMMA_INVARIANCE_TOL {
        return Err(GeomError::Structure { invariant: "Γ-invariant ADM integrand", residual: spot });
    }
    let quad = SphereQuadrature::new(n, degree)?;
    let values = radii.iter().map(|&r| adm_sphere_value(chart, end, r, &quad)).collect::<Result<Vec<_>>>()?;
    Ok(estimate_from_values(radii.to_vec(), values, initial_exponent(end, n)))
}

fn initial_exponent(end: &AleEnd, n: usize) -> f64 {
    if end.tau.is_finite() {
        (2.0 * end.tau + 2.0 - n as f64).max(0.5)
    } else {
        1.0
    }
}

pub fn adm_mass(entry: &CatalogEntry, radii: &[f64]) -> Result<MassEstimate> {
    adm_mass_with(entry.chart.as_ref(), require_end(entry)?, radii, DEFAULT_SPHERE_DEGREE)
}

/// How θ with `dθ = iF` is produced on the end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaMethod {
    /// `U(m)`-invariant ends: `θ = P(u) Σ_a (x_a dy_a - y_a dx_a)` with `P(u) = ½ iF(∂_{x_1}, ∂_{y_1})`
    /// read off on the ray `(√u, 0, ..)`.
    RadialProfile,
    /// `θ(X) = -Σ_α g(∇_X e_α, J e_α)` for the adapted frame built from the coordinate axes
    /// (`A_s = -iθ`).
    Frame,
}

/// θ on the end of an entry.
pub struct ThetaPotential<'a> {
    entry: &'a CatalogEntry,
    method: ThetaMethod,
}

pub fn theta_potential(entry: &CatalogEntry, method: ThetaMethod) -> Result<ThetaPotential<'_>> {
    if entry.n % 2 != 0 {
        return Err(GeomError::Dimension("θ needs an even-dimensional entry".into()));
    }
    if method == ThetaMethod::RadialProfile {
        match entry.scheme {
            IntegrationScheme::Radial { .. } if entry.n >= 4 => {}
            _ => {
                return Err(GeomError::Unsupported(format!(
                    "`{}` is not cohomogeneity-one in complex dimension >= 2; supply θ analytically or use the frame method",
                    entry.name
                )))
            }
        }
    }
    Ok(ThetaPotential { entry, method })
}

impl ThetaPotential<'_> {
    pub fn method(&self) -> ThetaMethod {
        self.method
    }

    /// `P(u)` of the radial profile.
    pub fn profile(&self, u: f64) -> Result<f64> {
        let n = self.entry.n;
        let mut p = vec![0.0; n];
        p[0] = u.sqrt();
        let ah = AlmostHermitian::new(self.entry.chart.as_ref(), &p, 2)?;
        Ok(0.5 * ah.chern_ricci_jet()?.values().at(&[2, 3]))
    }

    /// Coordinate components `θ_i` at `x`.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self.method {
            ThetaMethod::RadialProfile => {
                let u: f64 = x.iter().map(|v| v * v).sum();
                let p = self.profile(u)?;
                let m = x.len() / 2;
                let mut th = vec![0.0; x.len()];
                for a in 0..m {
                    th[2 * a] = -p * x[2 * a + 1];
                    th[2 * a + 1] = p * x[2 * a];
                }
                Ok(th)
            }
            ThetaMethod::Frame => {
                let ah = AlmostHermitian::new(self.entry.chart.as_ref(), x, 2)?;
                let fj = adapted_frame_jets(&ah, None)?;
                Ok(theta_coordinate_jets(&ah, &fj)?.values().data().to_vec())
            }
        }
    }

    /// `max |dθ - iF|` at `x`, with `dθ` from central differences of step `h`.
    pub fn exactness_residual(&self, x: &[f64], h: f64) -> Result<f64> {
        let n = x.len();
        let mut d = vec![vec![0.0; n]; n]; // d[k][i] = ∂_k θ_i
        for k in 0..n {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            let mut xp2 = x.to_vec();
            let mut xm2 = x.to_vec();
            xp[k] += h;
            xm[k] -= h;
            xp2[k] += 2.0 * h;
            xm2[k] -= 2.0 * h;
            let (a, b, c, e) = (self.eval(&xp)?, self.eval(&xm)?, self.eval(&xp2)?, self.eval(&xm2)?);
            for i in 0..n {
                d[k][i] = (8.0 * (a[i] - b[i]) - (c[i] - e[i])) / (12.0 * h);
            }
        }
        let ah = AlmostHermitian::new(self.entry.chart.as_ref(), x, 2)?;
        let f = ah.chern_ricci_jet()?.values();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((d[i][j] - d[j][i] - f.at(&[i, j])).abs());
            }
        }
        Ok(worst)
    }
}

/// `Σ_i η^i x^i/|x|` for `η = θ ∧ ω^{m-1}` at `x`.
pub fn theta_wedge_flux_density(theta: &ThetaPotential<'_>, x: &[f64]) -> Result<f64> {
    let n = x.len();
    let m = n / 2;
    let th = theta.eval(x)?;
    let ah = AlmostHermitian::new(theta.entry.chart.as_ref(), x, 2)?;
    let om = Form::two_form(&ah.omega().values());
    let eta = Form::one_form(&th).wedge(&om.power(m - 1)).hodge_flux_components();
    let r = norm(x);
    Ok((0..n).map(|i| eta[i] * x[i] / r).sum())
}

/// `∫_{S_r} θ ∧ ω^{m-1}` over the full coordinate sphere (no Γ division).
pub fn theta_wedge_flux(theta: &ThetaPotential<'_>, r: f64, quad: &SphereQuadrature) -> Result<f64> {
    let n = theta.entry.n;
    let flux = quad.integrate(|s| {
        let x: Vec<f64> = s.iter().map(|v| v * r).collect();
        theta_wedge_flux_density(theta, &x)
    })?;
    Ok(flux * r.powi(n as i32 - 1))
}

pub fn theta_mass_constant(m: usize) -> f64 {
    1.0 / (2.0 * (2.0 * m as f64 - 1.0) * PI.powi(m as i32))
}

pub fn mass_via_theta_with(entry: &CatalogEntry, radii: &[f64], method: ThetaMethod, degree: usize) -> Result<MassEstimate> {
    let end = require_end(entry)?;
    check_radii(end, radii)?;
    let theta = theta_potential(entry, method)?;
    let m = entry.n / 2;
    let quad = SphereQuadrature::new(entry.n, degree)?;
    let values = radii
        .iter()
        .map(|&r| Ok(theta_mass_constant(m) * theta_wedge_flux(&theta, r, &quad)? / end.gamma_order as f64))
        .collect::<Result<Vec<_>>>()?;
    Ok(estimate_from_values(radii.to_vec(), values, initial_exponent(end, entry.n)))
}

pub fn mass_via_theta(entry: &CatalogEntry, radii: &[f64]) -> Result<MassEstimate> {
    mass_via_theta_with(entry, radii, ThetaMethod::RadialProfile, 8)
}

/// Radius where radial integrals on compact entries switch to a fitted tail. The
/// affine charts lose precision in second derivatives far beyond it.
pub const COMPACT_R_MAX: f64 = 40.0;

/// Radial panel layout for bulk integrals.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BulkOptions {
    pub sphere_degree: usize,
    pub nodes_per_panel: usize,
    /// Ratio between successive panel ends.
    pub panel_ratio: f64,
}

impl Default for BulkOptions {
    fn default() -> Self {
        Self { sphere_degree: 4, nodes_per_panel: 8, panel_ratio: 2.0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BulkEstimate {
    /// Integral over the chart region, divided by `|Γ|`, tail included.
    pub value: f64,
    pub tail: f64,
    /// Radius of the excluded core around the origin (0 when nothing is skipped).
    pub r_inner: f64,
    pub r_max: f64,
    pub tail_exponent: Option<f64>,
    pub warning: Option<String>,
}

/// `r^{n-1} ∫_{S} f(rσ) √det g dσ`.
fn shell_density<F: Fn(&[f64]) -> Result<f64> + Sync>(entry: &CatalogEntry, quad: &SphereQuadrature, r: f64, f: &F) -> Result<f64> {
    let n = entry.n;
    let v = quad.integrate(|s| {
        let x: Vec<f64> = s.iter().map(|c| c * r).collect();
        let val = f(&x)?;
        if val == 0.0 {
            return Ok(0.0);
        }
        let ctx = JetContext::new(&x, 0)?;
        let g = entry.chart.metric(&ctx.coordinates())?.values();
        let (_, det) = linalg::inverse_det(&g)?;
        Ok(val * det.sqrt())
    })?;
    Ok(v * r.powi(n as i32 - 1))
}

fn panels(lo: f64, hi: f64, ratio: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut a = lo;
    let first = if lo > 0.0 { lo * ratio } else { (hi / ratio.powi(8)).min(hi) };
    let mut b = first.min(hi);
    loop {
        out.push((a, b));
        if b >= hi {
            break;
        }
        a = b;
        b = (b * ratio).min(hi);
    }
    out
}

fn radial_integral<F: Fn(&[f64]) -> Result<f64> + Sync>(
    entry: &CatalogEntry,
    lo: f64,
    hi: f64,
    opts: &BulkOptions,
    f: &F,
) -> Result<f64> {
    let quad = SphereQuadrature::new(entry.n, opts.sphere_degree)?;
    let mut parts = Vec::new();
    for (a, b) in panels(lo, hi, opts.panel_ratio) {
        let (rs, ws) = gauss_legendre_interval(opts.nodes_per_panel, a, b);
        for (r, w) in rs.iter().zip(&ws) {
            parts.push(w * shell_density(entry, &quad, *r, f)?);
        }
    }
    Ok(neumaier_sum(parts))
}

fn hermitian_density(entry: &CatalogEntry) -> impl Fn(&[f64]) -> Result<f64> + Sync + '_ {
    move |x: &[f64]| {
        let ah = AlmostHermitian::new(entry.chart.as_ref(), x, 2)?;
        Ok(0.5 * (ah.scalar() + ah.star_scalar()))
    }
}

fn gamma_order(entry: &CatalogEntry) -> f64 {
    entry.end.as_ref().map_or(1.0, |e| e.gamma_order as f64)
}

/// `∫ (s + s*)/2 dv_g` over the chart region `r_inner < |x| < r_max` plus a fitted tail.
pub fn bulk_hermitian_integral_with(entry: &CatalogEntry, r_max: f64, opts: &BulkOptions) -> Result<BulkEstimate> {
    let density = hermitian_density(entry);
    match &entry.scheme {
        IntegrationScheme::Radial { r_inner, .. } => {
            let r_max = if r_max.is_finite() { r_max } else { COMPACT_R_MAX };
            let inner = radial_integral(entry, *r_inner, r_max, opts, &density)?;
            let quad = SphereQuadrature::new(entry.n, opts.sphere_degree)?;
            let d1 = shell_density(entry, &quad, 0.5 * r_max, &density)?;
            let d2 = shell_density(entry, &quad, r_max, &density)?;
            let (tail, exponent, warning) = power_tail(d1, d2, r_max, entry.n, inner);
            Ok(BulkEstimate { value: (inner + tail) / gamma_order(entry), tail: tail / gamma_order(entry), r_inner: *r_inner, r_max, tail_exponent: exponent, warning })
        }
        IntegrationScheme::Torus { period } => {
            let n = entry.n;
            let k = 4usize;
            let h = period / k as f64;
            let pts: Vec<Vec<f64>> = (0..k.pow(n as u32))
                .map(|mut idx| {
                    (0..n)
                        .map(|_| {
                            let c = idx % k;
                            idx /= k;
                            (c as f64 + 0.5) * h
                        })
                        .collect()
                })
                .collect();
            let vol = h.powi(n as i32);
            let value = ordered_par_sum(&pts, |x| {
                let ctx = JetContext::new(x, 0)?;
                let g = entry.chart.metric(&ctx.coordinates())?.values();
                Ok(density(x)? * linalg::inverse_det(&g)?.1.sqrt() * vol)
            })?;
            Ok(BulkEstimate { value, tail: 0.0, r_inner: 0.0, r_max: f64::INFINITY, tail_exponent: None, warning: None })
        }
        IntegrationScheme::None => Err(GeomError::Unsupported(format!("`{}` has no integration scheme", entry.name))),
    }
}

pub fn bulk_hermitian_integral(entry: &CatalogEntry, r_max: f64) -> Result<BulkEstimate> {
    bulk_hermitian_integral_with(entry, r_max, &BulkOptions::default())
}

/// Tail `∫_{r_max}^∞ D(r) dr` for `D(r) = K r^{n-1-p}` fitted through two shells.
/// Shells whose contribution is below `1e-10 · max(1, |inner|)` are treated as zero.
fn power_tail(d1: f64, d2: f64, r_max: f64, n: usize, inner: f64) -> (f64, Option<f64>, Option<String>) {
    let scale = d1.abs().max(d2.abs());
    if scale * r_max <= 1e-10 * inner.abs().max(1.0) || d1 * d2 <= 0.0 {
        return (0.0, None, None);
    }
    let slope = (d2 / d1).ln() / 2f64.ln(); // D ~ r^slope
    let p = n as f64 - 1.0 - slope;
    if p <= n as f64 {
        return (0.0, Some(p), Some(format!("integrand decays like r^-{p:.3}, not integrable beyond r_max")));
    }
    (-d2 * r_max / (slope + 1.0), Some(p), None)
}

/// C² smooth step, 0 for `r <= r1` and 1 for `r >= r2`.
pub fn cutoff(r: f64, r1: f64, r2: f64) -> (f64, f64) {
    if r <= r1 {
        return (0.0, 0.0);
    }
    if r >= r2 {
        return (1.0, 0.0);
    }
    let t = (r - r1) / (r2 - r1);
    let f = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
    let df = 30.0 * t * t * (1.0 - t) * (1.0 - t) / (r2 - r1);
    (f, df)
}

#[derive(Clone, Debug, Serialize)]
pub struct PairingEstimate {
    pub value: f64,
    pub strategy: String,
    /// Spread between two cutoff windows (0 for exact values).
    pub spread: f64,
}

/// `⟨ι^{-1} c₁, [ω]^{m-1}⟩` (divided by `|Γ|`): the entry's exact value when it has
/// one, otherwise `∫ ξ ∧ ω^{m-1}/(2π)` with `ξ = iF - d(fθ)`, i.e.
/// `2π·pairing = ((m-1)!/4)∫(1-f)(s+s*)dv - ∫ f'(r) dr ∧ θ ∧ ω^{m-1}`.
pub fn topological_pairing(entry: &CatalogEntry, prefer_exact: bool) -> Result<PairingEstimate> {
    if prefer_exact {
        if let Some(k) = &entry.known.c1_pairing {
            return Ok(PairingEstimate { value: k.value, strategy: format!("exact ({})", k.provenance), spread: 0.0 });
        }
    }
    let end = require_end(entry)?;
    let scale = end.r0.max(1.0);
    let a = cutoff_pairing(entry, 2.0 * scale, 4.0 * scale)?;
    let b = cutoff_pairing(entry, 4.0 * scale, 8.0 * scale)?;
    Ok(PairingEstimate { value: a, strategy: "cutoff: iF - d(fθ) with radial θ".into(), spread: (a - b).abs() })
}

fn cutoff_pairing(entry: &CatalogEntry, r1: f64, r2: f64) -> Result<f64> {
    let m = entry.n / 2;
    let opts = BulkOptions::default();
    let fact = (1..m).product::<usize>() as f64;
    let density = hermitian_density(entry);
    let weighted = |x: &[f64]| -> Result<f64> {
        let (f, _) = cutoff(norm(x), r1, r2);
        if f >= 1.0 {
            return Ok(0.0);
        }
        Ok((1.0 - f) * 2.0 * density(x)?)
    };
    let r_inner = match entry.scheme {
        IntegrationScheme::Radial { r_inner, .. } => r_inner,
        _ => return Err(GeomError::Unsupported(format!("`{}` has no radial scheme", entry.name))),
    };
    let bulk = radial_integral(entry, r_inner, r2, &opts, &weighted)?;
    let theta = theta_potential(entry, ThetaMethod::RadialProfile)?;
    let quad = SphereQuadrature::new(entry.n, 6)?;
    let (rs, ws) = gauss_legendre_interval(8, r1, r2);
    let mut shell = Vec::new();
    for (r, w) in rs.iter().zip(&ws) {
        shell.push(w * cutoff(*r, r1, r2).1 * theta_wedge_flux(&theta, *r, &quad)?);
    }
    let total = fact / 4.0 * bulk - neumaier_sum(shell);
    Ok(total / (2.0 * PI) / gamma_order(entry))
}

#[derive(Clone, Debug, Serialize)]
pub struct MassFormulaReport {
    pub lhs: f64,
    pub lhs_error: f64,
    pub rhs_bulk: f64,
    pub rhs_topological: f64,
    pub discrepancy: f64,
    pub combined_error: f64,
    pub pairing: PairingEstimate,
    pub bulk: BulkEstimate,
    pub adm: MassEstimate,
}

impl MassFormulaReport {
    pub fn rhs(&self) -> f64 {
        self.rhs_bulk + self.rhs_topological
    }
}

/// Both sides of `m = ((m-1)!/(4(2m-1)π^m)) ∫(s+s*)dv - ⟨c₁,[ω]^{m-1}⟩/((2m-1)π^{m-1})`.
pub fn mass_formula_check(entry: &CatalogEntry, radii: &[f64], r_max: f64) -> Result<MassFormulaReport> {
    if entry.n % 2 != 0 {
        return Err(GeomError::Dimension("mass formula needs an even-dimensional entry".into()));
    }
    let m = entry.n / 2;
    let adm = adm_mass(entry, radii)?;
    let bulk = bulk_hermitian_integral(entry, r_max)?;
    let pairing = topological_pairing(entry, false)?;
    let fact = (1..m).product::<usize>() as f64;
    let mf = m as f64;
    // ∫(s+s*)dv = 2·bulk
    let rhs_bulk = fact / (4.0 * (2.0 * mf - 1.0) * PI.powi(m as i32)) * 2.0 * bulk.value;
    let rhs_topological = -pairing.value / ((2.0 * mf - 1.0) * PI.powi(m as i32 - 1));
    let discrepancy = (adm.extrapolated - rhs_bulk - rhs_topological).abs();
    let combined_error = adm.error_bar
        + fact / (4.0 * (2.0 * mf - 1.0) * PI.powi(m as i32)) * 2.0 * bulk.tail.abs()
        + pairing.spread / ((2.0 * mf - 1.0) * PI.powi(m as i32 - 1));
    Ok(MassFormulaReport { lhs: adm.extrapolated, lhs_error: adm.error_bar, rhs_bulk, rhs_topological, discrepancy, combined_error, pairing, bulk, adm })
}

/// Area of the exceptional curve of a `U(2)`-invariant potential on the blown-up chart,
/// `A(ε) = π[R²Φ'(R²) - ∫_ε^{R²} (Φ' + uΦ'') du]`, extrapolated to `ε → 0`.
pub fn exceptional_area(potential: Potential, r: f64) -> f64 {
    let r2 = r * r;
    let area = |eps: f64| {
        let (us, ws) = gauss_legendre_interval(40, eps.ln(), r2.ln());
        // substitute u = e^t to resolve the inner end
        let integral = neumaier_sum(us.iter().zip(&ws).map(|(t, w)| {
            let u = t.exp();
            let (d1, d2) = potential.derivatives_f64(u);
            w * u * (d1 + u * d2)
        }));
        PI * (r2 * potential.derivatives_f64(r2).0 - integral)
    };
    let eps = [1e-4 * r2, 0.5e-4 * r2, 0.25e-4 * r2];
    let a: Vec<f64> = eps.iter().map(|&e| area(e)).collect();
    // A(ε) ≈ A₀ + k ε: Richardson on the two smallest ε, checked against the third
    2.0 * a[2] - a[1]
}

/// `(mass, area/(3π))` for the Penrose equality on a blown-up potential entry.
#[derive(Clone, Debug, Serialize)]
pub struct PenroseReport {
    pub mass: MassEstimate,
    pub area: f64,
    pub bound: f64,
    pub relative_gap: f64,
}

pub fn penrose_check(entry: &CatalogEntry, radii: &[f64]) -> Result<PenroseReport> {
    let potential = match entry.scheme {
        IntegrationScheme::Radial { potential, .. } => potential,
        _ => return Err(GeomError::Unsupported(format!("`{}` has no radial potential", entry.name))),
    };
    let mass = adm_mass(entry, radii)?;
    let area = exceptional_area(potential, radii[0]);
    let bound = area / (3.0 * PI);
    let relative_gap = (mass.extrapolated - bound).abs() / bound.abs().max(f64::MIN_POSITIVE);
    Ok(PenroseReport { mass, area, bound, relative_gap })
}

/// Both sides of `∫ (s+s*)/2 dv = (4π/(m-1)!) ⟨c₁, [ω]^{m-1}⟩` on a compact entry.
#[derive(Clone, Debug, Serialize)]
pub struct BlairReport {
    pub lhs: f64,
    /// With the pairing `∫ iF ∧ ω^{m-1}/(2π)` evaluated numerically as a top form.
    pub rhs: f64,
    /// With the entry's topological pairing value, when known.
    pub rhs_known: Option<f64>,
    pub ratio: f64,
    pub ratio_known: Option<f64>,
}

pub fn blair_check(entry: &CatalogEntry) -> Result<BlairReport> {
    if !entry.compact {
        return Err(GeomError::Precondition { what: "compact entry", residual: f64::INFINITY });
    }
    let m = entry.n / 2;
    let fact = (1..m).product::<usize>() as f64;
    let lhs = bulk_hermitian_integral(entry, f64::INFINITY)?.value;
    // pairing integrand: top coefficient of iF ∧ ω^{m-1} in dx^1..dx^n, integrated in coordinates
    let wedge_entry = CatalogEntry { ..entry.clone() };
    let top = |x: &[f64]| -> Result<f64> {
        let ah = AlmostHermitian::new(wedge_entry.chart.as_ref(), x, 2)?;
        let f = Form::two_form(&ah.chern_ricci_jet()?.values());
        let om = Form::two_form(&ah.omega().values());
        let ctx = JetContext::new(x, 0)?;
        let g = wedge_entry.chart.metric(&ctx.coordinates())?.values();
        // shell_density multiplies by √det g; divide it back out
        Ok(f.wedge(&om.power(m - 1)).top() / linalg::inverse_det(&g)?.1.sqrt())
    };
    let integral = match entry.scheme {
        IntegrationScheme::Torus { .. } => {
            let zero_density = |x: &[f64]| -> Result<f64> { top(x) };
            torus_sum(entry, &zero_density)?
        }
        IntegrationScheme::Radial { .. } => compact_radial(entry, &top)?,
        IntegrationScheme::None => return Err(GeomError::Unsupported("no integration scheme".into())),
    };
    let pairing = integral / (2.0 * PI);
    let rhs = 4.0 * PI / fact * pairing;
    let rhs_known = entry.known.c1_pairing.as_ref().map(|k| 4.0 * PI / fact * k.value);
    let ratio = lhs / rhs;
    let ratio_known = rhs_known.map(|r| lhs / r);
    Ok(BlairReport { lhs, rhs, rhs_known, ratio, ratio_known })
}

fn torus_sum<F: Fn(&[f64]) -> Result<f64> + Sync>(entry: &CatalogEntry, f: &F) -> Result<f64> {
    let IntegrationScheme::Torus { period } = entry.scheme else { unreachable!() };
    let n = entry.n;
    let k = 4usize;
    let h = period / k as f64;
    let pts: Vec<Vec<f64>> = (0..k.pow(n as u32))
        .map(|mut idx| {
            (0..n)
                .map(|_| {
                    let c = idx % k;
                    idx /= k;
                    (c as f64 + 0.5) * h
                })
                .collect()
        })
        .collect();
    ordered_par_sum(&pts, |x| Ok(f(x)? * h.powi(n as i32)))
}

fn compact_radial<F: Fn(&[f64]) -> Result<f64> + Sync>(entry: &CatalogEntry, f: &F) -> Result<f64> {
    let opts = BulkOptions::default();
    let inner = radial_integral(entry, 0.0, COMPACT_R_MAX, &opts, f)?;
    let quad = SphereQuadrature::new(entry.n, opts.sphere_degree)?;
    let d1 = shell_density(entry, &quad, 0.5 * COMPACT_R_MAX, f)?;
    let d2 = shell_density(entry, &quad, COMPACT_R_MAX, f)?;
    Ok(inner + power_tail(d1, d2, COMPACT_R_MAX, entry.n, inner).0)
}
