use eiconal::cartan::{build_cartan, build_f0};
use eiconal::recognize::{
    classify, max_on_sphere, normal_form_reduce, random_orthogonal, ClassifyOptions, CubicClass,
    FloatCubic,
};
use nalgebra::DVector;

fn float(f: &eiconal::Polynomial) -> FloatCubic {
    FloatCubic::from_polynomial(f).unwrap()
}

#[test]
fn classification_is_rotation_invariant() {
    let mut cubics: Vec<FloatCubic> = (5..=8).map(|n| float(&build_f0(n).unwrap())).collect();
    cubics.push(float(&build_cartan(1).unwrap()));
    cubics.push(float(&build_cartan(2).unwrap()));
    for (k, f) in cubics.iter().enumerate() {
        let base = classify(f, &ClassifyOptions::default());
        assert_ne!(base.class, CubicClass::Indeterminate, "{:?}", base.notes);
        for seed in 0..3u64 {
            let m = random_orthogonal(f.nvars(), 1000 * k as u64 + seed);
            let g = f.rotate(&m).unwrap();
            let report = classify(
                &g,
                &ClassifyOptions {
                    seed,
                    ..Default::default()
                },
            );
            assert_eq!(report.class, base.class);
            assert_eq!((report.p, report.q), (base.p, base.q));
            assert_eq!(report.p + report.q, f.nvars() - 1);
            for (a, b) in report.eigenvalues.iter().zip(&base.eigenvalues) {
                assert!((a - b).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn rotated_cartan_maximum_is_one() {
    let f = float(&build_cartan(1).unwrap())
        .rotate(&random_orthogonal(5, 3))
        .unwrap();
    let best = max_on_sphere(&f, 32, 9).unwrap();
    assert!((best.value - 1.0).abs() < 1e-9);
    assert!(best.stationarity < 1e-10);
}

#[test]
fn rotated_f2_spectrum() {
    let f = float(&build_cartan(2).unwrap())
        .rotate(&random_orthogonal(8, 21))
        .unwrap();
    let best = max_on_sphere(&f, 32, 4).unwrap();
    let nf = normal_form_reduce(&f, &best.point, 1e-8).unwrap();
    let mut eig: Vec<f64> = nf.a.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    let expected = [-1.0, -1.0, -1.0, 0.5, 0.5, 0.5, 0.5];
    for (a, b) in eig.iter().zip(expected) {
        assert!((a - b).abs() < 1e-6, "{eig:?}");
    }
}

#[test]
fn large_cartan_cubics() {
    for (d, p, q) in [(4u32, 8, 5), (8, 16, 9)] {
        let f = float(&build_cartan(d as usize).unwrap());
        let g = f.rotate(&random_orthogonal(f.nvars(), d as u64)).unwrap();
        let report = classify(&g, &ClassifyOptions::default());
        assert_eq!(report.class, CubicClass::Cartan(d));
        assert_eq!((report.p, report.q), (p, q));
    }
}

#[test]
fn perturbed_cubic_is_rejected() {
    let f = float(&build_cartan(1).unwrap());
    let mut terms = f.terms();
    terms.push(([0, 0, 0], 1e-3));
    let g = FloatCubic::from_terms(5, &terms).unwrap();
    let report = classify(&g, &ClassifyOptions::default());
    assert_eq!(report.class, CubicClass::NotEiconal);
    assert!(report.residuals["eiconal"] > 1e-5);
}

#[test]
fn report_residuals_are_nonnegative() {
    let f = float(&build_cartan(2).unwrap());
    let report = classify(&f, &ClassifyOptions::default());
    assert!(report.residuals.values().all(|&v| v >= 0.0));
    let w = &report.rotation;
    assert!((w.transpose() * w - nalgebra::DMatrix::identity(8, 8)).amax() < 1e-12);
    let x = DVector::from_element(8, 0.3);
    assert!((f.value(&(w * &x)) - f.rotate(w).unwrap().value(&x)).abs() < 1e-12);
}
