use akmass::catalog::{self, PolarPlane, RoundSphere, SpherePolar};
use akmass::jet::Jet;
use akmass::riemann::{
    christoffel, covariant_derivative, curvature_packet, kulkarni_nomizu, lambda2_blocks, packet_from_geometry,
    riemann_symmetry_residual, second_bianchi_residual, sectional_curvature, tensor_from_blocks, to_frame,
    LocalGeometry, MetricChart, Slot,
};
use akmass::linalg;
use akmass::tensor::{JTensor, Tensor};
use approx::assert_abs_diff_eq;
use std::f64::consts::FRAC_PI_4;

#[test]
fn euclidean_is_flat() {
    for n in [3, 4, 6] {
        let e = catalog::euclidean(n);
        let p: Vec<f64> = (0..n).map(|i| 0.3 * i as f64 - 0.4).collect();
        let pk = curvature_packet(e.chart.as_ref(), &p).unwrap();
        assert_eq!(pk.christoffel.max_abs(), 0.0);
        assert_eq!(pk.riemann.max_abs(), 0.0);
        assert_eq!(pk.scalar, 0.0);
        if n == 4 {
            assert_eq!(pk.w_plus.unwrap().max_abs(), 0.0);
        }
    }
}

#[test]
fn polar_and_spherical_christoffels() {
    let g = christoffel(&PolarPlane::<f64>::new(), &[2.0, 0.0]).unwrap();
    assert_abs_diff_eq!(g.at(&[0, 1, 1]), -2.0, epsilon = 1e-14);
    assert_abs_diff_eq!(g.at(&[1, 0, 1]), 0.5, epsilon = 1e-14);
    let g = christoffel(&SpherePolar::<f64>::new(), &[FRAC_PI_4, 0.3]).unwrap();
    assert_abs_diff_eq!(g.at(&[0, 1, 1]), -FRAC_PI_4.sin() * FRAC_PI_4.cos(), epsilon = 1e-14);
    assert_abs_diff_eq!(g.at(&[1, 0, 1]), 1.0 / FRAC_PI_4.tan(), epsilon = 1e-14);
}

#[test]
fn unit_spheres_have_constant_curvature_one() {
    for n in 2..=5 {
        let chart = RoundSphere::<f64>::new(n);
        let pts = catalog::Sampler::Ball { radius: 2.0 }.sample_many(n, 20, 3 + n as u64);
        for p in pts {
            let pk = curvature_packet(&chart, &p).unwrap();
            let expect = (n * (n - 1)) as f64;
            assert!((pk.scalar - expect).abs() < 1e-8 * expect, "n={n} s={}", pk.scalar);
            let g = LocalGeometry::new(&chart, &p, 2).unwrap().metric().values();
            for a in 0..n {
                for b in 0..n {
                    if a == b {
                        continue;
                    }
                    let mut u = vec![0.0; n];
                    let mut v = vec![0.0; n];
                    u[a] = 1.0;
                    v[b] = 1.0;
                    v[a] = 0.37;
                    assert!((sectional_curvature(&pk.riemann, &g, &u, &v) - 1.0).abs() < 1e-8);
                }
            }
            assert!(pk.weyl.max_abs() < 1e-9 * pk.riemann.max_abs().max(1.0));
        }
    }
    let pk = curvature_packet(&SpherePolar::<f64>::new(), &[1.1, 0.2]).unwrap();
    assert!((pk.scalar - 2.0).abs() < 1e-12);
}

#[test]
fn f32_sphere_scalar_curvature() {
    let chart = RoundSphere::<f32>::new(3);
    let pk = curvature_packet(&chart, &[0.2f32, -0.1, 0.3]).unwrap();
    assert!((pk.scalar - 6.0).abs() < 1e-3, "{}", pk.scalar);
}

#[test]
fn catalog_symmetries_hold_at_random_points() {
    for e in catalog::builtin_entries() {
        let pts = e.sampler.sample_many(e.n, 100, 42);
        for p in pts {
            let pk = curvature_packet(e.chart.as_ref(), &p).unwrap();
            let r = riemann_symmetry_residual(&pk.riemann);
            assert!(r < 1e-9, "{}: {r}", e.name);
        }
    }
}

#[test]
fn scalar_flat_and_ricci_flat_entries() {
    let eh = catalog::eguchi_hanson(1.0);
    let mut biggest: f64 = 0.0;
    for p in eh.sampler.sample_many(4, 100, 5) {
        let pk = curvature_packet(eh.chart.as_ref(), &p).unwrap();
        assert!(pk.ricci.max_abs() < 1e-8, "EH Ric {}", pk.ricci.max_abs());
        biggest = biggest.max(pk.riemann.max_abs());
    }
    assert!(biggest > 1.0, "{biggest}");
    let b = catalog::burns(1.0);
    for p in b.sampler.sample_many(4, 100, 6) {
        let pk = curvature_packet(b.chart.as_ref(), &p).unwrap();
        assert!(pk.scalar.abs() < 1e-8, "burns s {}", pk.scalar);
    }
    let s = catalog::schwarzschild_slice(2.0);
    for p in s.sampler.sample_many(3, 50, 7) {
        let pk = curvature_packet(s.chart.as_ref(), &p).unwrap();
        assert!(pk.scalar.abs() < 1e-8, "schwarzschild s {}", pk.scalar);
    }
    let fs = catalog::fubini_study(2);
    let pts = fs.sampler.sample_many(4, 100, 8);
    for p in pts {
        let pk = curvature_packet(fs.chart.as_ref(), &p).unwrap();
        assert!((pk.scalar - 24.0).abs() < 1e-9 * 24.0);
        let g = LocalGeometry::new(fs.chart.as_ref(), &p, 2).unwrap().metric().values();
        assert!(pk.ricci.sub(&g.scale(6.0)).max_abs() < 1e-8);
    }
}

#[test]
fn eguchi_hanson_weyl_is_one_sided() {
    // Kähler Ricci-flat with the complex orientation: W₊ = s/12-type block vanishes
    let eh = catalog::eguchi_hanson(1.0);
    let pk = curvature_packet(eh.chart.as_ref(), &[1.3, 0.4, -0.5, 0.9]).unwrap();
    let wp = pk.w_plus.unwrap().max_abs();
    let wm = pk.w_minus.unwrap().max_abs();
    assert!(wp < 1e-8 && wm > 1e-2, "W+ {wp} W- {wm}");
}

#[test]
fn four_dimensional_reconstruction_from_blocks() {
    for e in [catalog::eguchi_hanson(1.0), catalog::fubini_study(2), catalog::random_ak(2, 3), catalog::conformal4(1.0)] {
        for p in e.sampler.sample_many(4, 10, 9) {
            let geom = LocalGeometry::new(e.chart.as_ref(), &p, 2).unwrap();
            let pk = packet_from_geometry(&geom).unwrap();
            let g = geom.metric().values();
            let frame = linalg::orthonormal_frame(&g).unwrap();
            let rf = to_frame(&pk.riemann, &frame);
            let ricf = to_frame(&pk.ricci, &frame);
            let wf = to_frame(&pk.weyl, &frame);
            let blocks = lambda2_blocks(&wf);
            // Weyl commutes with the Hodge star: no mixed block, trace-free blocks
            assert!(blocks.mixed.max_abs() < 1e-10 * rf.max_abs().max(1.0));
            let tr = |m: &Tensor<f64>| m.at(&[0, 0]) + m.at(&[1, 1]) + m.at(&[2, 2]);
            assert!(tr(&blocks.plus).abs() < 1e-10 && tr(&blocks.minus).abs() < 1e-10);
            let id = Tensor::identity(4);
            let ric0 = ricf.sub(&id.scale(pk.scalar / 4.0));
            let rebuilt = tensor_from_blocks(&blocks)
                .add(&kulkarni_nomizu(&ric0, &id).scale(0.5))
                .add(&kulkarni_nomizu(&id, &id).scale(pk.scalar / 24.0));
            let scale = rf.max_abs().max(1.0);
            assert!(rebuilt.max_abs_diff(&rf) < 1e-9 * scale, "{}: {}", e.name, rebuilt.max_abs_diff(&rf));
        }
    }
}

#[test]
fn second_bianchi_with_order_three_jets() {
    for e in [catalog::round_sphere(2), catalog::round_sphere(3), catalog::eguchi_hanson(1.0), catalog::random_ak(2, 5)] {
        for p in e.sampler.sample_many(e.n, 10, 10) {
            let geom = LocalGeometry::new(e.chart.as_ref(), &p, 3).unwrap();
            let r = second_bianchi_residual(&geom).unwrap();
            assert!(r < 1e-7, "{}: {r}", e.name);
        }
    }
    let e = catalog::euclidean(4);
    let geom = LocalGeometry::new(e.chart.as_ref(), &[0.1, 0.2, 0.3, 0.4], 3).unwrap();
    assert_eq!(second_bianchi_residual(&geom).unwrap(), 0.0);
}

#[test]
fn metricity_and_leibniz() {
    for e in [catalog::eguchi_hanson(1.0), catalog::random_ak(2, 1), catalog::fubini_study(2), catalog::schwarzschild_slice(1.0)] {
        for p in e.sampler.sample_many(e.n, 25, 11) {
            let geom = LocalGeometry::new(e.chart.as_ref(), &p, 2).unwrap();
            let ng = covariant_derivative(geom.metric(), &[Slot::Down, Slot::Down], geom.christoffel()).unwrap();
            assert!(ng.max_abs_coeff() < 1e-10, "{}", ng.max_abs_coeff());
            // ∇(f g) = df ⊗ g + f ∇g
            let x = geom.context().coordinates();
            let f = (&x[0] * &x[1]).sin() + 2.0;
            let fg = JTensor::from_fn(e.n, 2, |i| &f * geom.metric().at(i));
            let nfg = covariant_derivative(&fg, &[Slot::Down, Slot::Down], geom.christoffel()).unwrap();
            let expect = JTensor::from_fn(e.n, 3, |i| {
                &f.derivative(i[0]).unwrap() * &geom.metric().at(&[i[1], i[2]]).truncate(1)
            });
            assert!(nfg.sub(&expect).max_abs_coeff() < 1e-9);
        }
    }
}

#[test]
fn degenerate_metric_is_reported() {
    struct Bad;
    impl MetricChart<f64> for Bad {
        fn name(&self) -> String {
            "bad".into()
        }
        fn dim(&self) -> usize {
            2
        }
        fn metric(&self, x: &[Jet<f64>]) -> akmass::Result<JTensor<f64>> {
            let l = x[0].layout().clone();
            Ok(JTensor::from_fn(2, 2, |_| Jet::constant(&l, 1.0)))
        }
    }
    assert!(matches!(curvature_packet(&Bad, &[0.0, 0.0]), Err(akmass::GeomError::DegenerateMetric { .. })));
}
