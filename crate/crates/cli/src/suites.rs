//! Residual suites behind `verify curvature` and `verify identities`.

use akmass::almost_kahler::{
    chern_connection_at, lebrun_residuals_at, sekigawa_terms_at, wedge_identity_sides, AlmostHermitian,
};
use akmass::catalog::CatalogEntry;
use akmass::clifford::{
    clifford_generators, clifford_two_form_matrix, dirac_residual_from, frame_omega, norm_equality_sides,
    spin_connection_data, witten_integrand_from, CMatrix, FockSpinor,
};
use akmass::riemann::{packet_from_geometry, riemann_symmetry_residual, second_bianchi_residual, LocalGeometry, StructureFlag};
use num_complex::Complex;
use rayon::prelude::*;

use crate::anchors;
use crate::config::Tolerances;
use crate::error::CliError;
use crate::report::{CheckRecord, VerificationReport};

fn par_points<R: Send, F: Fn(&[f64]) -> Result<R, CliError> + Sync>(points: &[Vec<f64>], f: F) -> Result<Vec<R>, CliError> {
    points.par_iter().map(|p| f(p)).collect::<Vec<_>>().into_iter().collect()
}

fn max_of(v: impl Iterator<Item = f64>) -> f64 {
    v.fold(0.0f64, |m, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) })
}

/// Riemann symmetries at every sample, second Bianchi with order-3 jets at up to ten,
/// and the unit-sphere scalar curvature when the entry is a round sphere.
pub fn curvature_suite(entry: &CatalogEntry, samples: usize, seed: u64, tol: &Tolerances, timings: bool) -> Result<VerificationReport, CliError> {
    let pts = entry.sampler.sample_many(entry.n, samples, seed);
    let chart = entry.chart.as_ref();
    let mut rep = VerificationReport::new(timings);
    let mut scalars = Vec::new();
    rep.timed(|| {
        let out = par_points(&pts, |p| {
            let pk = packet_from_geometry(&LocalGeometry::new(chart, p, 2)?)?;
            Ok((riemann_symmetry_residual(&pk.riemann), pk.scalar))
        })?;
        scalars = out.iter().map(|o| o.1).collect();
        Ok(CheckRecord::new("curvature.symmetries", anchors::SCALAR_CURVATURES, max_of(out.iter().map(|o| o.0)), tol.symmetry, pts.len()))
    })?;
    let few = &pts[..pts.len().min(10)];
    rep.timed(|| {
        let out = par_points(few, |p| Ok(second_bianchi_residual(&LocalGeometry::new(chart, p, 3)?)?))?;
        Ok(CheckRecord::new("curvature.second_bianchi", anchors::SCALAR_CURVATURES, max_of(out.into_iter()), tol.derived, few.len()))
    })?;
    if entry.name.starts_with("sphere") {
        let n = entry.n as f64;
        let res = max_of(scalars.iter().map(|s| (s - n * (n - 1.0)).abs()));
        rep.push(CheckRecord::new("curvature.sphere_scalar", anchors::SCALAR_CURVATURES, res, tol.pointwise, scalars.len()));
    }
    Ok(rep)
}

/// Exhaustive Clifford relations and the `cl(ω)` spectrum for complex dimension `m`.
pub fn clifford_algebra_suite(m: usize, tol: &Tolerances) -> Result<VerificationReport, CliError> {
    let mut rep = VerificationReport::new(false);
    let g = clifford_generators::<f64>(m);
    let dim = 1usize << m;
    let id = CMatrix::<f64>::identity(dim);
    let mut worst = 0.0f64;
    for i in 0..2 * m {
        for j in 0..2 * m {
            let ac = &(&g[i] * &g[j]) + &(&g[j] * &g[i]);
            let want = if i == j { id.scale(Complex::new(-2.0, 0.0)) } else { CMatrix::zeros(dim) };
            worst = worst.max((&ac - &want).max_abs());
        }
    }
    rep.push(CheckRecord::new("spin.clifford_relations", anchors::CLIFFORD_ACTION, worst, tol.algebraic, 4 * m * m));
    let cw = clifford_two_form_matrix(&frame_omega::<f64>(m))?;
    let v = FockSpinor::<f64>::vacuum(m);
    let vac = (&cw.apply(&v) - &v.scale(Complex::new(0.0, -(m as f64)))).norm_sq().sqrt();
    rep.push(CheckRecord::new("spin.vacuum_eigenvalue", anchors::VACUUM_EIGENSPACE, vac, tol.algebraic, 1));
    if m >= 2 {
        // Ω^{0,2}: eigenvalue i(4 - m)
        let mut res = 0.0f64;
        let mut count = 0;
        for mask in (0..dim).filter(|k: &usize| k.count_ones() == 2) {
            let b = FockSpinor::<f64>::basis(m, mask);
            res = res.max((&cw.apply(&b) - &b.scale(Complex::new(0.0, 4.0 - m as f64))).norm_sq().sqrt());
            count += 1;
        }
        rep.push(CheckRecord::new("spin.omega02_eigenvalue", anchors::OMEGA_02_EIGENVALUE, res, tol.algebraic, count));
    }
    Ok(rep)
}

#[derive(Default)]
struct PointResiduals {
    star: f64,
    ratio: f64,
    wedge: f64,
    chern: f64,
    norm_identity: Option<f64>,
    laplacian_identity: Option<f64>,
    weyl_negative_part: Option<f64>,
    sekigawa: Option<f64>,
    dirac: f64,
    norm_equality: f64,
    witten: f64,
}

fn point_residuals(entry: &CatalogEntry, p: &[f64], einstein: bool) -> Result<PointResiduals, CliError> {
    let ah = AlmostHermitian::new(entry.chart.as_ref(), p, 3)?;
    let s = ah.scalar();
    let norm = ah.nabla_omega_norm_sq_jet().value();
    let mut r = PointResiduals {
        star: (ah.star_scalar() - s - norm).abs(),
        ratio: (norm - 0.5 * ah.nabla_j_full_norm_sq()).abs(),
        ..Default::default()
    };
    let f = ah.chern_ricci_jet()?.values();
    let (l, rr) = wedge_identity_sides(&ah, &f);
    r.wedge = (l - rr).abs() / l.abs().max(rr.abs()).max(1.0);
    let c = chern_connection_at(&ah)?;
    r.chern = c.metric_residual.max(c.j_residual);
    if entry.n == 4 {
        let lb = lebrun_residuals_at(&ah)?;
        r.norm_identity = Some(lb.norm_identity);
        r.laplacian_identity = Some(lb.laplacian_identity);
        r.weyl_negative_part = Some((-lb.weyl_lower_bound).max(0.0));
    }
    if einstein {
        r.sekigawa = Some(sekigawa_terms_at(&ah)?.residual());
    }
    let d = spin_connection_data(&ah, None)?;
    r.dirac = dirac_residual_from(&d)?;
    let (a, b) = norm_equality_sides(&ah, &d)?;
    r.norm_equality = (a - b).abs();
    let rad = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    let normal: Vec<f64> = if rad > 0.0 { p.iter().map(|x| x / rad).collect() } else { (0..p.len()).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect() };
    r.witten = witten_integrand_from(&d, &normal)?.relative_residual();
    Ok(r)
}

/// The almost-Kähler and spin^c residual suites at sampled points.
pub fn identities_suite(entry: &CatalogEntry, samples: usize, seed: u64, tol: &Tolerances, timings: bool) -> Result<VerificationReport, CliError> {
    if !matches!(entry.structure, StructureFlag::Kahler | StructureFlag::AlmostKahlerNonkahler) {
        return Err(CliError::Usage(format!("`{}` carries no almost-Kähler structure", entry.name)));
    }
    let pts = entry.sampler.sample_many(entry.n, samples, seed);
    let einstein = entry.known.einstein;
    let mut rep = VerificationReport::new(timings);
    let mut res = Vec::new();
    rep.timed(|| {
        res = par_points(&pts, |p| point_residuals(entry, p, einstein))?;
        Ok(CheckRecord::new("almost_kahler.star_scalar", anchors::STRUCTURE_IDENTITY, max_of(res.iter().map(|r| r.star)), tol.pointwise, pts.len()))
    })?;
    let k = pts.len();
    let col = |f: &dyn Fn(&PointResiduals) -> f64| max_of(res.iter().map(f));
    rep.push(CheckRecord::new("almost_kahler.norm_ratio", anchors::STRUCTURE_IDENTITY, col(&|r| r.ratio), tol.ratio, k));
    rep.push(CheckRecord::new("almost_kahler.chern_hermitian", anchors::HERMITIAN_CONNECTIONS, col(&|r| r.chern), tol.pointwise, k));
    rep.push(CheckRecord::new("almost_kahler.wedge_identity", anchors::WEDGE_IDENTITY, col(&|r| r.wedge), tol.pointwise, k));
    if entry.n == 4 {
        rep.push(CheckRecord::new("four_d.norm_identity", anchors::FOUR_D_IDENTITIES, col(&|r| r.norm_identity.unwrap_or(f64::NAN)), tol.derived, k));
        rep.push(CheckRecord::new("four_d.laplacian_identity", anchors::FOUR_D_IDENTITIES, col(&|r| r.laplacian_identity.unwrap_or(f64::NAN)), tol.derived, k));
        rep.push(CheckRecord::new("four_d.weyl_lower_bound", anchors::FOUR_D_IDENTITIES, col(&|r| r.weyl_negative_part.unwrap_or(f64::NAN)), tol.slack, k));
    }
    if einstein {
        rep.push(CheckRecord::new("almost_kahler.einstein_relation", anchors::EINSTEIN_RELATION, col(&|r| r.sekigawa.unwrap_or(f64::NAN)), tol.derived, k));
    }
    rep.extend(clifford_algebra_suite(entry.n / 2, tol)?);
    rep.push(CheckRecord::new("spin.dirac", anchors::DIRAC_EQUATION, col(&|r| r.dirac), tol.spinor, k));
    rep.push(CheckRecord::new("spin.norm_equality", anchors::NORM_EQUALITY, col(&|r| r.norm_equality), tol.derived, k));
    rep.push(CheckRecord::new("spin.boundary_integrand", anchors::THETA_MASS, col(&|r| r.witten), tol.derived, k));
    Ok(rep)
}
