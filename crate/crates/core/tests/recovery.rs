mod common;

use common::{disc, homogeneous_case, kernel_fd_error, manufactured_field, manufactured_recovery_error, stress, Poly3};
use lamina::bspline::SpanSide;
use lamina::iga::{assemble, DiscretizationScheme, DisplacementField};
use lamina::laminate::{PlateCase, PlyAngle};
use lamina::quadrature::GaussRule;
use lamina::recovery::{
    error_metric, inplane_stress_derivatives, inplane_stress_derivatives_in_layer, recover_profile, stress_at,
    stress_in_layer, NoBodyForce, RecoveryMode, SampleGrid, TopTraction, UniformBodyForce,
};
use lamina::Error;

fn check_manufactured(angle: PlyAngle, scheme: DiscretizationScheme, seed: u64) {
    let err = manufactured_recovery_error(angle, scheme, seed);
    assert!(err < 1e-10, "{angle:?} {scheme:?}: relative error {err:e}");
}

#[test]
fn manufactured_exactness_zero_degree_stack() {
    check_manufactured(PlyAngle::Deg0, DiscretizationScheme::single_element(4, 3, 3, 2), 1);
    check_manufactured(PlyAngle::Deg0, DiscretizationScheme::layerwise(4, 2, 3), 2);
}

#[test]
fn manufactured_exactness_ninety_degree_stack() {
    check_manufactured(PlyAngle::Deg90, DiscretizationScheme::single_element(4, 3, 3, 2), 3);
    check_manufactured(PlyAngle::Deg90, DiscretizationScheme::layerwise(5, 2, 3), 4);
}

#[test]
fn uniform_body_force_is_integrated() {
    // u3 = c z^2 gives σ33 = 2 c C33 z and div σ = (0, 0, 2 c C33)
    let case = homogeneous_case(2, PlyAngle::Deg0, 5.0);
    let c = 0.3;
    let c33 = case.layup.stiffness(0).matrix()[(2, 2)];
    let u = [Poly3::default(), Poly3::default(), Poly3::new(&[(c, [0, 0, 2])])];
    let field = manufactured_field(&case, DiscretizationScheme::default(), &u);
    let zs: Vec<f64> = (0..=10).map(|j| 0.2 * j as f64).collect();
    let l = case.length();
    let body = UniformBodyForce([0.0, 0.0, 2.0 * c * c33]);
    let rec = recover_profile(&field, 0.3 * l, 0.4 * l, &zs, &body, RecoveryMode::FromBottom, None).unwrap();
    for (z, s33) in zs.iter().zip(&rec.sigma33) {
        assert!((s33 - 2.0 * c * c33 * z).abs() < 1e-12);
    }
    assert!(rec.sigma13.iter().chain(&rec.sigma23).all(|v| v.abs() < 1e-12));
    // without the body force the same field is not in equilibrium
    let rec = recover_profile(&field, 0.3 * l, 0.4 * l, &zs, &NoBodyForce, RecoveryMode::FromBottom, None).unwrap();
    assert!(rec.sigma33.iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn constant_stress_field_recovers_zero() {
    let case = homogeneous_case(3, PlyAngle::Deg90, 10.0);
    let u = [
        Poly3::new(&[(1e-3, [1, 0, 0]), (2e-3, [0, 1, 0])]),
        Poly3::new(&[(-1e-3, [0, 1, 0]), (5e-4, [0, 0, 1])]),
        Poly3::new(&[(3e-3, [1, 0, 0]), (1e-3, [0, 0, 1])]),
    ];
    let field = manufactured_field(&case, DiscretizationScheme::default(), &u);
    let l = case.length();
    let zs: Vec<f64> = (0..=12).map(|j| 0.25 * j as f64).collect();
    let rec = recover_profile(&field, 0.4 * l, 0.7 * l, &zs, &NoBodyForce, RecoveryMode::FromBottom, None).unwrap();
    for v in rec.sigma13.iter().chain(&rec.sigma23).chain(&rec.sigma33) {
        assert!(v.abs() < 1e-14, "{v}");
    }
    let raw = stress_at(&field, [0.4 * l, 0.7 * l, 1.3]).unwrap();
    let want = stress(case.layup.stiffness(1), &u);
    for i in 0..6 {
        assert!((raw.sigma[i] - want[i].eval([0.0; 3])).abs() < 1e-14);
    }
    let d = inplane_stress_derivatives(&field, [0.4 * l, 0.7 * l, 1.3], 2).unwrap();
    let s = d.second.unwrap();
    for v in [d.s11_1, d.s12_2, d.s12_1, d.s22_2, s.s11_11, s.s22_22, s.s12_12] {
        assert!(v.abs() < 1e-13);
    }
}

#[test]
fn rigid_translation_is_stress_free() {
    let case = homogeneous_case(2, PlyAngle::Deg0, 4.0);
    let u = [Poly3::new(&[(0.5, [0, 0, 0])]), Poly3::new(&[(-2.0, [0, 0, 0])]), Poly3::new(&[(1.0, [0, 0, 0])])];
    let field = manufactured_field(&case, DiscretizationScheme::default(), &u);
    let s = stress_at(&field, [1.0, 2.0, 0.5]).unwrap();
    assert!(s.sigma.iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn cubic_displacement_gives_linear_stress_slope() {
    let case = homogeneous_case(2, PlyAngle::Deg0, 4.0);
    let u = [Poly3::new(&[(1.0, [3, 0, 0])]), Poly3::default(), Poly3::default()];
    let field = manufactured_field(&case, DiscretizationScheme::default(), &u);
    let c11 = case.layup.stiffness(0).matrix()[(0, 0)];
    for x in [0.3, 1.7, 4.2, 7.9] {
        let d = inplane_stress_derivatives(&field, [x, 3.1, 0.8], 2).unwrap();
        assert!((d.s11_1 - 6.0 * c11 * x).abs() < 1e-10 * c11 * x.max(1.0));
        assert!((d.second.unwrap().s11_11 - 6.0 * c11).abs() < 1e-9 * c11);
    }
    let s = stress_at(&field, [2.0, 1.0, 0.5]).unwrap();
    assert!((s.sigma[0] - c11 * 12.0).abs() < 1e-10 * c11 * 12.0);
}

#[test]
fn derivative_kernels_match_finite_differences() {
    let err = kernel_fd_error(17, 1000);
    assert!(err < 1e-5, "relative error {err:e}");
}

fn default_solution() -> DisplacementField {
    let case = PlateCase::benchmark(11, 10.0).unwrap();
    let d = disc(&case, DiscretizationScheme::default());
    d.solve(&assemble(&d)).unwrap()
}

#[test]
fn recovered_shear_is_the_integral_of_the_kernels() {
    let field = default_solution();
    let case = field.case().clone();
    let l = case.length();
    let (x, y) = (0.25 * l, 0.25 * l);
    let zs = case.layup.interfaces().to_vec();
    let rec = recover_profile(&field, x, y, &zs, &NoBodyForce, RecoveryMode::FromBottom, None).unwrap();
    // independent literal nested integration of the kernels, ply by ply
    // with an over-accurate rule
    let rule = GaussRule::new(8);
    let g = |z: f64, k: usize| {
        let s = inplane_stress_derivatives_in_layer(&field, [x, y, z], k, 2, SpanSide::Above)
            .unwrap()
            .second
            .unwrap();
        s.s11_11 + s.s22_22 + 2.0 * s.s12_12
    };
    let scale = rec.sigma33.iter().chain(&rec.sigma13).fold(0.0f64, |m, v| m.max(v.abs()));
    let (mut f13, mut f23, mut g_full, mut h) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..case.layup.n_layers() {
        let (a, b) = (zs[k], zs[k + 1]);
        for (z, w) in rule.mapped(a, b) {
            let d = inplane_stress_derivatives_in_layer(&field, [x, y, z], k, 1, SpanSide::Above).unwrap();
            f13 += w * (d.s11_1 + d.s12_2);
            f23 += w * (d.s12_1 + d.s22_2);
            let inner: f64 = rule.mapped(a, z).map(|(xi, wi)| wi * g(xi, k)).sum();
            h += w * (g_full + inner);
        }
        g_full += rule.mapped(a, b).map(|(xi, wi)| wi * g(xi, k)).sum::<f64>();
        assert!((rec.sigma13[k + 1] + f13).abs() < 1e-8 * scale, "ply {k}");
        assert!((rec.sigma23[k + 1] + f23).abs() < 1e-8 * scale, "ply {k}");
        assert!((rec.sigma33[k + 1] - h).abs() < 1e-8 * scale, "ply {k}: {} vs {h}", rec.sigma33[k + 1]);
    }
}

#[test]
fn recovered_normal_stress_balances_recovered_shear() {
    // σ33(z) = -∫ (σ13,1 + σ23,2) with the shear slopes taken by finite
    // differences of recovered profiles at neighbouring stations
    let field = default_solution();
    let case = field.case().clone();
    let l = case.length();
    let (x, y) = (0.25 * l, 0.25 * l);
    let zs = case.layup.interfaces().to_vec();
    let rule = GaussRule::new(6);
    let mut heights = Vec::new();
    for k in 0..case.layup.n_layers() {
        heights.extend(rule.mapped(zs[k], zs[k + 1]).map(|(z, _)| z));
    }
    let rec = |px: f64, py: f64| {
        recover_profile(&field, px, py, &heights, &NoBodyForce, RecoveryMode::FromBottom, None).unwrap()
    };
    let h = 1e-3 * l;
    let s13: Vec<_> = [-2.0, -1.0, 1.0, 2.0].iter().map(|o| rec(x + o * h, y).sigma13).collect();
    let s23: Vec<_> = [-2.0, -1.0, 1.0, 2.0].iter().map(|o| rec(x, y + o * h).sigma23).collect();
    let slope = |v: &Vec<Vec<f64>>, i: usize| (v[0][i] - 8.0 * v[1][i] + 8.0 * v[2][i] - v[3][i]) / (12.0 * h);
    let at_tops = recover_profile(&field, x, y, &zs, &NoBodyForce, RecoveryMode::FromBottom, None).unwrap();
    let scale = at_tops.sigma33.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut acc = 0.0;
    let mut i = 0;
    for k in 0..case.layup.n_layers() {
        for (_, w) in rule.mapped(zs[k], zs[k + 1]) {
            acc -= w * (slope(&s13, i) + slope(&s23, i));
            i += 1;
        }
        let err = (at_tops.sigma33[k + 1] - acc).abs() / scale;
        assert!(err < 1e-6, "ply {k}: {} vs {acc} ({err:e})", at_tops.sigma33[k + 1]);
    }
}

#[test]
fn bottom_values_are_exactly_zero() {
    let field = default_solution();
    let l = field.case().length();
    let zs = [0.0, 0.5, 1.0];
    let rec = recover_profile(&field, 0.3 * l, 0.6 * l, &zs, &NoBodyForce, RecoveryMode::FromBottom, None).unwrap();
    assert_eq!(rec.sigma13[0], 0.0);
    assert_eq!(rec.sigma23[0], 0.0);
    assert_eq!(rec.sigma33[0], 0.0);
    assert_eq!(rec.z, zs);
}

#[test]
fn recovered_profile_is_continuous_and_raw_is_not() {
    let field = default_solution();
    let case = field.case().clone();
    let l = case.length();
    let (x, y) = (0.25 * l, 0.25 * l);
    let inner = &case.layup.interfaces()[1..case.layup.n_layers()];
    let mut zs = Vec::new();
    for &z in inner {
        zs.extend([z - 1e-9, z, z + 1e-9]);
    }
    let rec = recover_profile(&field, x, y, &zs, &NoBodyForce, RecoveryMode::FromBottom, None).unwrap();
    let scale = rec.sigma13.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for c in zs.chunks(3).enumerate().map(|(i, _)| 3 * i) {
        assert!((rec.sigma13[c] - rec.sigma13[c + 2]).abs() < 1e-6 * scale);
    }

    // raw constitutive σ13 jumps by at least 10% of its profile maximum
    let grid = SampleGrid::new(&case, 1, 20).unwrap();
    let raw_max = grid
        .heights
        .iter()
        .map(|&(z, k)| stress_in_layer(&field, [x, y, z], k, SpanSide::Below).unwrap().sigma[4].abs())
        .fold(0.0, f64::max);
    let jump = inner
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            let below = stress_in_layer(&field, [x, y, z], i, SpanSide::Below).unwrap().sigma[4];
            let above = stress_in_layer(&field, [x, y, z], i + 1, SpanSide::Above).unwrap().sigma[4];
            (below - above).abs()
        })
        .fold(0.0, f64::max);
    assert!(jump >= 0.1 * raw_max, "largest jump {jump} vs max {raw_max}");
}

#[test]
fn top_normal_stress_approaches_pressure_under_refinement() {
    let case = PlateCase::benchmark(11, 10.0).unwrap();
    let grid = SampleGrid::standard(&case).unwrap();
    let mut errs = Vec::new();
    for n_el in [2, 4, 9, 18] {
        let d = disc(&case, DiscretizationScheme::single_element(4, n_el, 3, 4));
        let field = d.solve(&assemble(&d)).unwrap();
        let mut worst: f64 = 0.0;
        for &[x, y] in &grid.stations {
            let p = case.pressure(x, y);
            let rec = recover_profile(&field, x, y, &[case.thickness()], &NoBodyForce, RecoveryMode::FromBottom, None)
                .unwrap();
            worst = worst.max((rec.sigma33[0] + p).abs() / case.sigma0);
        }
        errs.push(worst);
    }
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    assert!(errs[3] < 1e-2, "{errs:?}");
}

#[test]
fn two_sided_mode_hits_the_top_traction() {
    let field = default_solution();
    let case = field.case().clone();
    let l = case.length();
    let (x, y) = (0.25 * l, 0.25 * l);
    let top = TopTraction::pressure(case.pressure(x, y));
    let zs = [0.0, case.thickness()];
    let rec = recover_profile(&field, x, y, &zs, &NoBodyForce, RecoveryMode::TwoSidedAverage, Some(top)).unwrap();
    let bottom_only = recover_profile(&field, x, y, &zs, &NoBodyForce, RecoveryMode::FromBottom, None).unwrap();
    // at either face the average is half way between the imposed value and
    // the one-sided result
    assert!((rec.sigma33[1] - 0.5 * (bottom_only.sigma33[1] + top.sigma33)).abs() < 1e-12);
    assert!((rec.sigma13[1] - 0.5 * bottom_only.sigma13[1]).abs() < 1e-12);
}

#[test]
fn invalid_requests_are_rejected() {
    let field = default_solution();
    let case = field.case().clone();
    let (l, t) = (case.length(), case.thickness());
    let run = |x: f64, zs: &[f64], mode| recover_profile(&field, x, 0.5 * l, zs, &NoBodyForce, mode, None);
    assert!(matches!(run(0.5 * l, &[0.0, t + 0.1], RecoveryMode::FromBottom), Err(Error::InvalidSampling(_))));
    assert!(matches!(run(0.5 * l, &[-0.1], RecoveryMode::FromBottom), Err(Error::InvalidSampling(_))));
    assert!(matches!(run(0.5 * l, &[2.0, 1.0], RecoveryMode::FromBottom), Err(Error::InvalidSampling(_))));
    assert!(matches!(run(1.5 * l, &[1.0], RecoveryMode::FromBottom), Err(Error::InvalidSampling(_))));
    assert!(matches!(run(0.5 * l, &[1.0], RecoveryMode::TwoSidedAverage), Err(Error::Recovery(_))));
    assert!(matches!(
        inplane_stress_derivatives(&field, [1.0, 1.0, 1.0], 3),
        Err(Error::DerivativeOrder { .. })
    ));
    assert!(stress_at(&field, [1.0, 1.0, t + 1.0]).is_err());

    let d = disc(&case, DiscretizationScheme::single_element(2, 4, 3, 2));
    let quadratic = d.field(vec![0.0; d.total_dofs()]).unwrap();
    assert!(matches!(
        recover_profile(&quadratic, 1.0, 1.0, &[1.0], &NoBodyForce, RecoveryMode::FromBottom, None),
        Err(Error::DerivativeOrder { .. })
    ));
    assert!(inplane_stress_derivatives(&quadratic, [1.0, 1.0, 1.0], 1).is_ok());

    assert_eq!(error_metric(&[1.0], &[0.0]), Err(Error::ZeroReference));
    assert_eq!(error_metric(&[1.0, 2.0], &[1.0]), Err(Error::LengthMismatch(2, 1)));
    assert_eq!(error_metric(&[1.0, -2.0], &[1.0, -2.0]), Ok(0.0));
    let shifted = [0.9, 1.9, -0.1];
    assert!((error_metric(&shifted, &[1.0, 2.0, 0.0]).unwrap() - 0.05).abs() < 1e-15);
}
