//! End-to-end acceptance criteria. Prints one PASS/FAIL line per criterion and
//! exits non-zero when any fails.

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use akmass::ale_mass;
use akmass::almost_kahler::{lebrun_residuals_at, sekigawa_apostolov_residual, AlmostHermitian};
use akmass::catalog::{self, CatalogEntry, IntegrationScheme};
use akmass::clifford::{dirac_residual_from, norm_equality_sides, spin_connection_data, witten_integrand_from};
use akmass::quadrature::SphereQuadrature;
use akmass::riemann::{packet_from_geometry, riemann_symmetry_residual, second_bianchi_residual, LocalGeometry};
use akmass_cli::config::Tolerances;
use akmass_cli::suites::clifford_algebra_suite;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn points(e: &CatalogEntry, count: usize, seed: u64) -> Vec<Vec<f64>> {
    e.sampler.sample_many(e.n, count, seed)
}

fn curvature_oracles() -> Outcome {
    let mut sphere = 0.0f64;
    for n in 2..=4 {
        let e = catalog::round_sphere(n);
        for p in points(&e, 100, 1) {
            let pk = packet_from_geometry(&LocalGeometry::new(e.chart.as_ref(), &p, 2).unwrap()).unwrap();
            sphere = sphere.max((pk.scalar - (n * (n - 1)) as f64).abs());
        }
    }
    let mut sym = 0.0f64;
    let mut bianchi = 0.0f64;
    let entries = catalog::builtin_entries();
    for e in &entries {
        for p in points(e, 100, 2) {
            let pk = packet_from_geometry(&LocalGeometry::new(e.chart.as_ref(), &p, 2).unwrap()).unwrap();
            sym = sym.max(riemann_symmetry_residual(&pk.riemann));
        }
        for p in points(e, 5, 3) {
            bianchi = bianchi.max(second_bianchi_residual(&LocalGeometry::new(e.chart.as_ref(), &p, 3).unwrap()).unwrap());
        }
    }
    check(
        sphere < 1e-8 && sym < 1e-9 && bianchi < 1e-7,
        format!("sphere scalar {sphere:.1e}, symmetries {sym:.1e} over {} entries, second Bianchi {bianchi:.1e}", entries.len()),
    )
}

fn adm_anchor() -> Outcome {
    let e = catalog::schwarzschild_slice(2.0);
    let est = ale_mass::adm_mass_with(e.chart.as_ref(), e.end.as_ref().unwrap(), &[50.0, 100.0, 200.0, 400.0], 20).unwrap();
    let rel = (est.extrapolated - 2.0).abs() / 2.0;
    check(rel < 0.005 && (ale_mass::adm_constant(3) * 16.0 * PI - 1.0).abs() < 1e-15, format!("extrapolated {:.6}, relative error {rel:.1e}", est.extrapolated))
}

fn structure_identity() -> Outcome {
    let (mut star, mut ratio) = (0.0f64, 0.0f64);
    let mut min_full = f64::INFINITY;
    for seed in 0..20u64 {
        let e = catalog::random_ak(2 + seed as usize % 2, 1000 + seed);
        for p in points(&e, 100, seed) {
            let ah = AlmostHermitian::new(e.chart.as_ref(), &p, 2).unwrap();
            let norm = ah.nabla_omega_norm_sq_jet().value();
            let full = ah.nabla_j_full_norm_sq();
            star = star.max((ah.star_scalar() - ah.scalar() - norm).abs());
            ratio = ratio.max((norm / full - 0.5).abs());
            min_full = min_full.min(full);
        }
    }
    check(star < 1e-8 && ratio < 1e-10 && min_full > 0.0, format!("s*-s-|∇ω|² {star:.1e}, ratio-½ {ratio:.1e}, min |∇J|² {min_full:.1e}"))
}

fn blair() -> Outcome {
    let t = ale_mass::blair_check(&catalog::flat_torus_kahler(4)).unwrap();
    let mut ok = t.lhs.abs() < 1e-9 && t.rhs.abs() < 1e-9;
    let mut detail = format!("torus lhs {:.1e} rhs {:.1e}", t.lhs, t.rhs);
    for m in [1, 2] {
        let r = ale_mass::blair_check(&catalog::fubini_study(m)).unwrap();
        let known = r.ratio_known.unwrap();
        ok &= (r.ratio - 1.0).abs() < 0.005 && (known - 1.0).abs() < 0.005;
        detail += &format!("; FS m={m} ratio {:.6} (exact pairing {:.6})", r.ratio, known);
    }
    check(ok, detail)
}

fn mass_formula() -> Outcome {
    let a = 1.0;
    let radii = [10.0, 20.0, 40.0, 80.0];
    let eh = ale_mass::mass_formula_check(&catalog::eguchi_hanson(a), &radii, 60.0).unwrap();
    let eh_ok = eh.lhs.abs() < 1e-3 * a * a && eh.rhs_bulk.abs() < 1e-3 * a * a && eh.rhs_topological.abs() < 1e-3 * a * a && eh.discrepancy < 2e-3 * a * a;
    let b = catalog::burns(1.0);
    let bf = ale_mass::mass_formula_check(&b, &radii, 60.0).unwrap();
    let theta = ale_mass::mass_via_theta(&b, &radii).unwrap().extrapolated;
    let (boundary, wedge, bulk) = (bf.lhs, theta, bf.rhs());
    let spread = [boundary, wedge, bulk].iter().fold(0.0f64, |m, x| m.max((x - boundary).abs())).max((wedge - bulk).abs());
    let burns_ok = bf.discrepancy < 0.01 * bf.lhs.abs() && spread < 0.01 * boundary.abs();
    check(
        eh_ok && burns_ok,
        format!(
            "EH lhs {:.1e} bulk {:.1e} top {:.1e} disc {:.1e}; Burns boundary {boundary:.6} θ-wedge {wedge:.6} bulk+pairing {bulk:.6}",
            eh.lhs, eh.rhs_bulk, eh.rhs_topological, eh.discrepancy
        ),
    )
}

fn pipeline_equality() -> Outcome {
    let radii = [10.0, 20.0, 40.0, 80.0];
    let mut ok = true;
    let mut detail = Vec::new();
    for e in [catalog::euclidean(4), catalog::eguchi_hanson(1.0), catalog::burns(1.0)] {
        let adm = ale_mass::adm_mass(&e, &radii).unwrap();
        let th = ale_mass::mass_via_theta(&e, &radii).unwrap();
        let d = (adm.extrapolated - th.extrapolated).abs();
        let bar = adm.error_bar + th.error_bar;
        ok &= d <= bar;
        detail.push(format!("{} |Δ| {d:.1e} ≤ {bar:.1e}", e.name));
    }
    check(ok, detail.join("; "))
}

fn penrose() -> Outcome {
    let c = 1.0;
    let b = catalog::burns(c);
    let IntegrationScheme::Radial { potential, .. } = b.scheme else { unreachable!() };
    let area = ale_mass::exceptional_area(potential, 10.0);
    let r = ale_mass::penrose_check(&b, &[10.0, 20.0, 40.0, 80.0]).unwrap();
    let gap = (r.mass.extrapolated - area / (3.0 * PI)).abs() / (area / (3.0 * PI));
    check(gap < 0.01, format!("mass {:.6}, area/(3π) {:.6}, gap {gap:.1e}", r.mass.extrapolated, area / (3.0 * PI)))
}

fn spin_suite() -> Outcome {
    let tol = Tolerances::default();
    let mut alg_ok = true;
    for m in 1..=4 {
        let rep = clifford_algebra_suite(m, &tol).unwrap();
        alg_ok &= rep.records.iter().filter(|r| r.check_id != "spin.omega02_eigenvalue" || m >= 2).all(|r| r.pass && r.max_residual <= 1e-12);
    }
    let (mut dirac, mut norm) = (0.0f64, 0.0f64);
    for seed in 0..4u64 {
        let e = catalog::random_ak(2 + seed as usize % 2, 200 + seed);
        for p in points(&e, 25, seed) {
            let ah = AlmostHermitian::new(e.chart.as_ref(), &p, 2).unwrap();
            let d = spin_connection_data(&ah, None).unwrap();
            dirac = dirac.max(dirac_residual_from(&d).unwrap());
            let (l, r) = norm_equality_sides(&ah, &d).unwrap();
            norm = norm.max((l - r).abs());
        }
    }
    check(alg_ok && dirac < 1e-6 && norm < 1e-7, format!("Clifford/eigenvalues m≤4 exact: {alg_ok}; Dirac {dirac:.1e}; norm equality {norm:.1e}"))
}

fn witten_two_routes() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for (e, r_lo, r_hi) in [(catalog::conformal4(1.0), 5.0, 50.0), (catalog::random_ak(2, 31), 0.2, 1.0)] {
        let quad = SphereQuadrature::new(4, 4).unwrap();
        let mut worst = 0.0f64;
        let mut largest = 0.0f64;
        for k in 0..50 {
            let dir = &quad.nodes[(k * 7) % quad.len()];
            let r = r_lo + (r_hi - r_lo) * k as f64 / 49.0;
            let p: Vec<f64> = dir.iter().map(|v| v * r).collect();
            let ah = AlmostHermitian::new(e.chart.as_ref(), &p, 2).unwrap();
            let w = witten_integrand_from(&spin_connection_data(&ah, None).unwrap(), dir).unwrap();
            worst = worst.max(w.relative_residual());
            largest = largest.max(w.spinor_side.norm());
        }
        ok &= worst < 1e-7;
        detail.push(format!("{} relative {worst:.1e} (max |integrand| {largest:.1e})", e.name));
    }
    check(ok, detail.join("; "))
}

fn four_d_identities() -> Outcome {
    let (mut norm, mut bound) = (0.0f64, f64::INFINITY);
    for seed in 0..10u64 {
        let e = catalog::random_ak(2, 500 + seed);
        for p in points(&e, 100, seed) {
            let r = lebrun_residuals_at(&AlmostHermitian::new(e.chart.as_ref(), &p, 2).unwrap()).unwrap();
            norm = norm.max(r.norm_identity);
            bound = bound.min(r.weyl_lower_bound);
        }
    }
    let mut einstein = 0.0f64;
    for e in [catalog::euclidean(4), catalog::flat_torus_kahler(4), catalog::eguchi_hanson(1.0)] {
        for p in points(&e, 20, 4) {
            einstein = einstein.max(sekigawa_apostolov_residual(e.chart.as_ref(), &p).unwrap());
        }
    }
    check(norm < 1e-7 && bound >= -1e-9 && einstein < 1e-7, format!("norm identity {norm:.1e}, min lower-bound value {bound:.1e}, Einstein relation {einstein:.1e}"))
}

fn determinism() -> Outcome {
    let run = |threads: &str, args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_akmass")).env("AKMASS_THREADS", threads).args(args).output().unwrap()
    };
    let cases: [&[&str]; 2] = [
        &["verify", "identities", "--metric", "random_ak", "--samples", "40", "--seed", "3"],
        &["mass", "--metric", "burns", "--radii", "10,20,40,80", "--method", "both", "--format", "json"],
    ];
    let mut ok = true;
    for args in cases {
        let a = run("1", args);
        let b = run("4", args);
        ok &= a.status.success() && a.stdout == b.stdout && !a.stdout.is_empty();
    }
    check(ok, "1 vs 4 threads, identities suite and mass run".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("curvature oracles", curvature_oracles),
        ("ADM anchor", adm_anchor),
        ("structure identity", structure_identity),
        ("Blair formula", blair),
        ("mass formula", mass_formula),
        ("θ-wedge pipeline equality", pipeline_equality),
        ("Penrose equality", penrose),
        ("spin^c suite", spin_suite),
        ("boundary integrand two routes", witten_two_routes),
        ("4d identities", four_d_identities),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag} {name}: {detail} [{:.1}s]", i + 1, t.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
