use akmass::ale_mass::*;
use akmass::catalog::*;
use akmass::quadrature::SphereQuadrature;
use akmass::tensor::Tensor;
use proptest::prelude::*;
use std::f64::consts::PI;

fn radial_potential(e: &CatalogEntry) -> Potential {
    match e.scheme {
        IntegrationScheme::Radial { potential, .. } => potential,
        _ => panic!("no radial scheme"),
    }
}

#[test]
fn adm_constant_specializes() {
    assert!((adm_constant(3) - 1.0 / (16.0 * PI)).abs() < 1e-16);
    // n = 4: Γ(2)/(12π²)
    assert!((adm_constant(4) - 1.0 / (12.0 * PI * PI)).abs() < 1e-16);
}

#[test]
fn euclidean_mass_vanishes() {
    let e = euclidean(4);
    let est = adm_mass(&e, &[2.0, 4.0, 8.0]).unwrap();
    assert!(est.values.iter().all(|v| *v == 0.0));
    assert_eq!(est.extrapolated, 0.0);
    assert!(est.warning.is_none());
}

#[test]
fn schwarzschild_per_radius_and_limit() {
    let m = 2.0;
    let e = schwarzschild_slice(m);
    let radii = [50.0, 100.0, 200.0, 400.0];
    let est = adm_mass(&e, &radii).unwrap();
    for (r, v) in radii.iter().zip(&est.values) {
        // closed-form sphere flux of (1 + m/2r)^4 δ
        let oracle = m * (1.0 + m / (2.0 * r)).powi(3);
        assert!((v - oracle).abs() < 1e-10 * oracle, "r={r}");
    }
    assert!((est.extrapolated - m).abs() < 0.005 * m);
    assert!(est.warning.is_none());
}

#[test]
fn eguchi_hanson_mass_is_negligible() {
    let a = 1.3;
    let e = eguchi_hanson(a);
    let end = e.end.as_ref().unwrap();
    let quad = SphereQuadrature::new(4, DEFAULT_SPHERE_DEGREE).unwrap();
    let v = adm_sphere_value(e.chart.as_ref(), end, 10.0 * a, &quad).unwrap();
    assert!(v.abs() < 1e-3 * a * a);
    let est = adm_mass(&e, &[10.0 * a, 20.0 * a, 40.0 * a, 80.0 * a]).unwrap();
    assert!(est.extrapolated.abs() < 1e-3 * a * a);
    let decay = decay_profile(e.chart.as_ref(), end, &[10.0 * a, 20.0 * a, 40.0 * a], &quad).unwrap();
    assert!(decay.iter().all(|d| *d < 10.0 * a.powi(4)));
}

#[test]
fn integrand_inside_core_is_rejected() {
    let e = eguchi_hanson(1.0);
    let end = e.end.as_ref().unwrap();
    assert!(adm_integrand(e.chart.as_ref(), end, &[0.5, 0.0, 0.0, 0.0]).is_err());
    assert!(adm_mass(&e, &[1.0, 10.0, 20.0]).is_err());
    assert!(adm_mass(&e, &[10.0, 20.0]).is_err());
    assert!(adm_mass(&e, &[20.0, 10.0, 40.0]).is_err());
}

#[test]
fn gamma_invariance_on_eguchi_hanson() {
    let e = eguchi_hanson(1.0);
    let end = e.end.as_ref().unwrap();
    let pts = vec![vec![3.0, 1.0, -2.0, 0.5], vec![-0.3, 4.0, 1.0, 2.0]];
    let res = gamma_invariance_residual(end, &pts, |x| adm_integrand(e.chart.as_ref(), end, x)).unwrap();
    assert!(res < GAMMA_INVARIANCE_TOL);
}

#[test]
fn fit_recovers_synthetic_limit() {
    let radii = vec![5.0, 10.0, 20.0, 40.0, 80.0];
    let values: Vec<f64> = radii.iter().map(|r: &f64| 0.7 + 3.0 * r.powf(-1.7)).collect();
    let est = estimate_from_values(radii.clone(), values, 2.0);
    assert!((est.extrapolated - 0.7).abs() < 1e-9);
    assert!((est.fit_exponent - 1.7).abs() < 1e-5);
    assert!(est.warning.is_none());

    let zig: Vec<f64> = radii.iter().enumerate().map(|(i, r)| 1.0 + (if i % 2 == 0 { 1.0 } else { -0.2 }) / r).collect();
    assert!(estimate_from_values(radii.clone(), zig, 1.0).warning.is_some());

    let zero = estimate_from_values(radii, vec![0.0; 5], 1.0);
    assert_eq!(zero.extrapolated, 0.0);
    assert_eq!(zero.error_bar, 0.0);
}

#[test]
fn theta_profile_matches_potential_oracle() {
    let c = 0.8;
    let e = burns(c);
    let th = theta_potential(&e, ThetaMethod::RadialProfile).unwrap();
    // P = -L' with L = log(Φ'^{m-1}(Φ' + uΦ'')); Φ' = 1 + c/u, Φ' + uΦ'' = 1
    for u in [0.3, 1.0, 4.0, 25.0] {
        let oracle = c / (u * (u + c));
        assert!((th.profile(u).unwrap() - oracle).abs() < 1e-10 * oracle.max(1.0), "u={u}");
    }
    assert!(th.exactness_residual(&[0.7, 0.3, -0.4, 0.5], 1e-3).unwrap() < 1e-6);
    assert!(th.exactness_residual(&[2.0, -1.0, 0.5, 1.5], 1e-3).unwrap() < 1e-6);
}

#[test]
fn frame_theta_is_also_a_potential() {
    let e = burns(1.0);
    let th = theta_potential(&e, ThetaMethod::Frame).unwrap();
    assert!(th.exactness_residual(&[0.7, 0.3, -0.4, 0.5], 1e-3).unwrap() < 1e-6);
}

#[test]
fn theta_vanishes_on_flat_and_hyperkahler() {
    for e in [euclidean(4), eguchi_hanson(1.0)] {
        let th = theta_potential(&e, ThetaMethod::RadialProfile).unwrap();
        for x in [[1.0, 2.0, 0.5, -1.0], [3.0, 0.0, 0.0, 4.0]] {
            assert!(th.eval(&x).unwrap().iter().all(|v| v.abs() < 1e-8), "{}", e.name);
        }
    }
}

#[test]
fn theta_needs_a_radial_profile() {
    assert!(theta_potential(&conformal4(1.0), ThetaMethod::RadialProfile).is_err());
    assert!(theta_potential(&schwarzschild_slice(1.0), ThetaMethod::RadialProfile).is_err());
}

#[test]
fn theta_mass_agrees_with_adm() {
    let radii = [10.0, 20.0, 40.0, 80.0];
    for e in [euclidean(4), eguchi_hanson(1.0), burns(1.0)] {
        let adm = adm_mass(&e, &radii).unwrap();
        let th = mass_via_theta(&e, &radii).unwrap();
        let bar = adm.error_bar + th.error_bar + 1e-12;
        assert!((adm.extrapolated - th.extrapolated).abs() <= bar.max(0.01 * adm.extrapolated.abs()), "{}", e.name);
    }
}

#[test]
fn burns_mass_is_a_third_of_c() {
    let c = 1.0;
    let est = mass_via_theta(&burns(c), &[10.0, 20.0, 40.0]).unwrap();
    assert!((est.extrapolated - c / 3.0).abs() < 1e-3 * c);
}

#[test]
fn bulk_integrals_of_scalar_flat_entries_vanish() {
    assert_eq!(bulk_hermitian_integral(&euclidean(4), 20.0).unwrap().value, 0.0);
    assert!(bulk_hermitian_integral(&eguchi_hanson(1.0), 40.0).unwrap().value.abs() < 1e-8);
    let b = bulk_hermitian_integral(&burns(1.0), 40.0).unwrap();
    assert!(b.value.is_finite() && b.value.abs() < 1e-8);
}

#[test]
fn pairings() {
    assert_eq!(topological_pairing(&euclidean(4), false).unwrap().value, 0.0);
    assert!(topological_pairing(&eguchi_hanson(1.0), false).unwrap().value.abs() < 1e-8);
    let c = 1.0;
    let b = burns(c);
    let area = exceptional_area(radial_potential(&b), 3.0);
    // closed form: Φ' = 1 + c/u gives A = πc
    assert!((area - PI * c).abs() < 1e-8);
    let p = topological_pairing(&b, false).unwrap();
    assert!((p.value + area).abs() < 1e-3 * area);
}

#[test]
fn mass_formula_on_eguchi_hanson_and_burns() {
    let a = 1.0;
    let eh = mass_formula_check(&eguchi_hanson(a), &[10.0, 20.0, 40.0, 80.0], 60.0).unwrap();
    assert!(eh.lhs.abs() < 1e-3 && eh.rhs_bulk.abs() < 1e-3 && eh.rhs_topological.abs() < 1e-3);
    assert!(eh.discrepancy < 2e-3 * a * a);

    let b = mass_formula_check(&burns(1.0), &[10.0, 20.0, 40.0, 80.0], 60.0).unwrap();
    assert!(b.discrepancy < 0.01 * b.lhs.abs());
}

#[test]
fn penrose_equality_for_burns() {
    let r = penrose_check(&burns(0.6), &[10.0, 20.0, 40.0, 80.0]).unwrap();
    assert!(r.relative_gap < 0.01);
}

#[test]
fn blair_formula() {
    let t = blair_check(&flat_torus_kahler(4)).unwrap();
    assert!(t.lhs.abs() < 1e-9 && t.rhs.abs() < 1e-9);
    for m in [1, 2] {
        let r = blair_check(&fubini_study(m)).unwrap();
        assert!((r.ratio - 1.0).abs() < 0.005, "m={m}");
        assert!((r.ratio_known.unwrap() - 1.0).abs() < 0.005, "m={m}");
    }
    assert!(blair_check(&burns(1.0)).is_err());
}

fn rotation(angles: &[f64; 6]) -> Tensor<f64> {
    let mut r = Tensor::identity(4);
    let mut k = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            let (s, c) = angles[k].sin_cos();
            let mut g = Tensor::identity(4);
            g.set(&[i, i], c);
            g.set(&[j, j], c);
            g.set(&[i, j], -s);
            g.set(&[j, i], s);
            r = akmass::linalg::matmul(&r, &g);
            k += 1;
        }
    }
    r
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]
    #[test]
    fn adm_value_is_coordinate_invariant(angles in prop::array::uniform6(-3.1f64..3.1)) {
        let e = burns(1.0);
        let end = e.end.clone().unwrap();
        let rotated = RotatedChart { inner: e.chart.clone(), rotation: rotation(&angles) };
        let quad = SphereQuadrature::new(4, 12).unwrap();
        let a = adm_sphere_value(e.chart.as_ref(), &end, 15.0, &quad).unwrap();
        let b = adm_sphere_value(&rotated, &end, 15.0, &quad).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn cutoff_is_a_monotone_step(r in 0.0f64..10.0) {
        let (f, df) = cutoff(r, 2.0, 5.0);
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!(df >= 0.0);
    }
}
