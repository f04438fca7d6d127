use akmass::almost_kahler::*;
use akmass::catalog;
use akmass::tensor::Tensor;
use akmass::GeomError;
use proptest::prelude::*;

fn at(entry: &catalog::CatalogEntry, count: usize, seed: u64, order: usize) -> Vec<AlmostHermitian<f64>> {
    entry
        .sampler
        .sample_many(entry.n, count, seed)
        .iter()
        .map(|p| AlmostHermitian::new(entry.chart.as_ref(), p, order).unwrap())
        .collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

#[test]
fn fubini_study_fixes_curvature_and_chern_ricci_signs() {
    for m in [1, 2] {
        let fs = catalog::fubini_study(m);
        for ah in at(&fs, 5, 11, 2) {
            let s = ah.scalar();
            assert!(rel(s, (2 * m * (2 * m + 2)) as f64) < 1e-10, "s = {s}");
            assert!(rel(ah.star_scalar(), s) < 1e-10);
            let f = ah.chern_ricci_jet().unwrap().values();
            let (l, r) = wedge_identity_sides(&ah, &f);
            assert!(r > 0.0);
            assert!(rel(l, r) < 1e-10, "{l} vs {r}");
            // on a Kähler-Einstein metric iF is the Ricci form Ric(J·,·) = (s/2m) ω
            let lam = s / (2 * m) as f64;
            assert!(f.sub(&ah.omega().values().scale(lam)).max_abs() / lam < 1e-10);
        }
    }
}

#[test]
fn star_scalar_identity_and_convention_lock() {
    for seed in 0..20u64 {
        let e = catalog::random_ak(2 + (seed as usize % 2), seed);
        for ah in at(&e, 10, 100 + seed, 2) {
            let norm = ah.nabla_omega_norm_sq_jet().value();
            assert!((ah.star_scalar() - ah.scalar() - norm).abs() < 1e-8);
            assert!((norm - 0.5 * ah.nabla_j_full_norm_sq()).abs() < 1e-10);
        }
    }
}

#[test]
fn nonkahler_random_structures_have_nonzero_torsion() {
    let e = catalog::random_ak(2, 4);
    let ns = nabla_structure(e.chart.as_ref(), &[0.2, -0.1, 0.3, 0.05]).unwrap();
    assert!(ns.norm_form > 1e-4);
    assert!(ns.nabla_omega.max_abs() > 1e-3);
}

#[test]
fn kahler_entries_have_parallel_structure() {
    for e in [catalog::eguchi_hanson(1.0), catalog::burns(1.0), catalog::fubini_study(1), catalog::fubini_study(2), catalog::flat_torus_kahler(4)] {
        assert!(e.is_kahler());
        for ah in at(&e, 20, 5, 2) {
            assert!(ah.nabla_j().values().max_abs() < 1e-8, "{}", e.name);
            assert!(ah.structure_residuals().d_omega < 1e-9);
        }
    }
}

#[test]
fn chern_connection_preserves_metric_and_structure() {
    for e in [catalog::random_ak(2, 1), catalog::random_ak(3, 2), catalog::burns(0.5)] {
        for ah in at(&e, 5, 9, 2) {
            let c = chern_connection_at(&ah).unwrap();
            assert!(c.metric_residual < 1e-12 && c.j_residual < 1e-12);
        }
    }
}

#[test]
fn chern_ricci_form_satisfies_wedge_identity_and_is_closed() {
    for e in [catalog::random_ak(2, 6), catalog::random_ak(3, 7), catalog::eguchi_hanson(1.0)] {
        for p in e.sampler.sample_many(e.n, 5, 3) {
            chern_ricci_form(e.chart.as_ref(), &p).unwrap();
            let ah = AlmostHermitian::new(e.chart.as_ref(), &p, 3).unwrap();
            let d = exterior_derivative_2form(&ah.chern_ricci_jet().unwrap()).unwrap();
            assert!(d.max_abs() < 1e-6, "{}: |d iF| = {}", e.name, d.max_abs());
        }
    }
}

#[test]
fn anti_invariant_projections() {
    let e = catalog::random_ak(2, 8);
    for ah in at(&e, 10, 1, 2) {
        let rho = ah.twisted_ricci_jet().values();
        let sum = ah.single_prime(&rho).add(&ah.double_prime(&rho));
        assert!(sum.sub(&rho).max_abs() < 1e-12);
        let w = ah.w_double_prime();
        let j = ah.j().values();
        let n = ah.dim();
        let jfirst = Tensor::from_fn(n, 4, |t| {
            let mut a = 0.0;
            for p in 0..n {
                for q in 0..n {
                    a += j.at(&[p, t[0]]) * j.at(&[q, t[1]]) * w.at(&[p, q, t[2], t[3]]);
                }
            }
            a
        });
        assert!(jfirst.add(&w).max_abs() < 1e-12);
        assert!(w.max_abs() > 1e-6);
    }
    for e in [catalog::fubini_study(2), catalog::eguchi_hanson(1.0)] {
        for ah in at(&e, 5, 2, 2) {
            assert!(ah.w_double_prime().max_abs() < 1e-10);
        }
    }
}

#[test]
fn euclidean_anti_invariant_parts_vanish() {
    let e = catalog::euclidean(4);
    let c = anti_invariant_parts(e.chart.as_ref(), &[0.1, 0.2, 0.3, 0.4]).unwrap();
    assert_eq!(c.w_double_prime.max_abs(), 0.0);
    assert_eq!(c.rho_star.max_abs(), 0.0);
    assert_eq!(c.rho_star_double_prime.max_abs(), 0.0);
    assert_eq!(c.phi.max_abs(), 0.0);
}

#[test]
fn four_dimensional_identities() {
    let e = catalog::euclidean(4);
    let r = lebrun_identity_residuals(e.chart.as_ref(), &[0.1, 0.2, 0.3, 0.4]).unwrap();
    assert_eq!((r.norm_identity, r.laplacian_identity, r.weyl_lower_bound), (0.0, 0.0, 0.0));
    assert!(r.fourth_order.is_none());
    for e in [catalog::eguchi_hanson(1.0), catalog::random_ak(2, 12), catalog::random_ak(2, 13)] {
        for ah in at(&e, 20, 4, 3) {
            let r = lebrun_residuals_at(&ah).unwrap();
            assert!(r.norm_identity < 1e-8, "{}", e.name);
            assert!(r.laplacian_identity < 1e-8, "{}", e.name);
            assert!(r.weyl_lower_bound >= -1e-9);
        }
    }
    let six = catalog::euclidean(6);
    assert!(matches!(lebrun_identity_residuals(six.chart.as_ref(), &[0.0; 6]), Err(GeomError::Dimension(_))));
}

#[test]
fn sekigawa_formula_on_einstein_entries() {
    for e in [catalog::euclidean(4), catalog::flat_torus_kahler(4), catalog::eguchi_hanson(1.0), catalog::fubini_study(2)] {
        for p in e.sampler.sample_many(e.n, 10, 21) {
            let r = sekigawa_apostolov_residual(e.chart.as_ref(), &p).unwrap();
            assert!(r < 1e-7, "{}: {r}", e.name);
        }
    }
    let b = catalog::burns(1.0);
    match sekigawa_apostolov_residual(b.chart.as_ref(), &[0.7, 0.1, -0.3, 0.4]) {
        Err(GeomError::Precondition { residual, .. }) => assert!(residual > 1e-3),
        other => panic!("{other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn star_scalar_identity_holds_for_any_seed(seed in 0u64..10_000, x in prop::array::uniform4(-1.0f64..1.0)) {
        let e = catalog::random_ak(2, seed);
        let ah = AlmostHermitian::new(e.chart.as_ref(), &x, 2).unwrap();
        let norm = ah.nabla_omega_norm_sq_jet().value();
        prop_assert!((ah.star_scalar() - ah.scalar() - norm).abs() < 1e-8);
        let r = lebrun_residuals_at(&ah).unwrap();
        prop_assert!(r.norm_identity < 1e-7);
        prop_assert!(r.weyl_lower_bound >= -1e-9);
    }
}
