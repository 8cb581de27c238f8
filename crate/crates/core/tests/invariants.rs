use core::f64::consts::PI;

use ekverify_core::expr::Expr;
use ekverify_core::functionals::{Evaluator, Scenario, Status};
use ekverify_core::geometry::{metric_and_ricci, Perturbation, Polytope, PotentialSpec, Reference, ToricGeometry};
use ekverify_core::invariants::{check_prop32, check_theorem3, gauge_shift, theta_of_field, MetricChoice, ToricField};

fn blowup(eps: f64) -> Scenario {
    let pert = (eps != 0.0).then(|| Perturbation::Moment { f: Expr::var(0).mul(Expr::var(1)), eps });
    Scenario::new(Reference::Guillemin(Polytope::blowup_p2()), pert)
}

fn cp2(eps: f64) -> Scenario {
    let pert = (eps != 0.0).then(|| Perturbation::Moment { f: Expr::var(0).mul(Expr::var(1)), eps });
    Scenario::new(Reference::FubiniStudy(2), pert)
}

#[test]
fn futaki_vanishes_on_projective_plane() {
    let s = cp2(0.2);
    let geo = ToricGeometry::new(s.reference.clone()).unwrap();
    let ev = Evaluator::new(&geo, &s).unwrap();
    let v = ev.volume().value;
    for field in [vec![1.0, 0.0], vec![0.3, -1.7], vec![0.0, 0.0]] {
        for which in [MetricChoice::Reference, MetricChoice::Perturbed] {
            let iv = ev.invariants(&ToricField::new(field.clone()), which).unwrap();
            assert!(iv.values.iter().all(|f| f.value.abs() <= 1e-6 * v), "{field:?} {iv:?}");
            for c in check_theorem3(&iv, 1e-3, 2e-6 * v) {
                assert_eq!(c.status(), Status::Pass, "{c:?}");
            }
        }
    }
}

#[test]
fn blowup_futaki_matches_polytope_formula() {
    // 𝓕_0 = (2π)ⁿ n! ∫_Δ ∂_v h dμ = -2 (2π)ⁿ n! vol(Δ) ⟨v, barycenter - c⟩,
    // with vol(Δ) = 4, barycenter (1/12, 1/12), c = 0, v = (1, 1).
    let oracle = -32.0 * PI * PI / 3.0;
    let s = blowup(0.2);
    let geo = ToricGeometry::new(s.reference.clone()).unwrap();
    let ev = Evaluator::new(&geo, &s).unwrap();
    let v = ev.volume().value;
    let field = ToricField::new(vec![1.0, 1.0]);
    let reference = ev.invariants(&field, MetricChoice::Reference).unwrap();
    let perturbed = ev.invariants(&field, MetricChoice::Perturbed).unwrap();
    let f0 = reference.futaki().value;
    assert!((f0 - oracle).abs() < 1e-8 * oracle.abs(), "{f0}");
    assert!(f0.abs() > 1e-3 * v);
    for (a, b) in reference.values.iter().zip(&perturbed.values) {
        assert!((a.value - b.value).abs() <= 1e-4 * v.max(a.value.abs()));
    }
    for iv in [&reference, &perturbed] {
        for c in check_theorem3(iv, 1e-3, 0.0) {
            assert_eq!(c.status(), Status::Pass, "{c:?}");
        }
    }
}

#[test]
fn invariants_are_gauge_invariant_and_linear() {
    let s = blowup(0.1);
    let geo = ToricGeometry::new(s.reference.clone()).unwrap();
    let ev = Evaluator::new(&geo, &s).unwrap();
    let v = ev.volume().value;
    let a = ToricField::new(vec![1.0, 0.0]);
    let b = ToricField::new(vec![-0.5, 2.0]);
    let ab = ToricField::new(vec![0.5, 2.0]);
    for which in [MetricChoice::Reference, MetricChoice::Perturbed] {
        assert!(gauge_shift(&ev, &a, which).unwrap().iter().all(|d| d.value.abs() < 1e-6 * v));
        let fa = ev.invariants(&a, which).unwrap();
        let fb = ev.invariants(&b, which).unwrap();
        let fab = ev.invariants(&ab, which).unwrap();
        for k in 0..=2 {
            let sum = fa.values[k].value + fb.values[k].value;
            assert!((fab.values[k].value - sum).abs() < 1e-9 * v);
        }
    }
    let zero = ev.invariants(&ToricField { v: vec![0.0, 0.0], constant: 3.0 }, MetricChoice::Reference).unwrap();
    assert!(zero.values.iter().all(|f| f.value.abs() < 1e-6 * v));
}

#[test]
fn theta_hessian_is_flow_derivative_of_metric() {
    let spec = PotentialSpec { reference: Reference::Guillemin(Polytope::blowup_p2()), perturbation: None };
    let field = ToricField::new(vec![0.7, -0.4]);
    let x = [0.3, -0.2];
    let (_, dd) = theta_of_field(&spec, &field, &x).unwrap();
    let h = 1e-3;
    let at = |s: f64| metric_and_ricci(&spec, &[x[0] + s * field.v[0], x[1] + s * field.v[1]]).unwrap().0;
    let fd = &(&at(h) - &at(-h)).scale(1.0 / (2.0 * h));
    // Fourth-order correction from the half step.
    let fd2 = &(&at(h / 2.0) - &at(-h / 2.0)).scale(1.0 / h);
    let rich = &(&fd2.scale(4.0) - fd).scale(1.0 / 3.0);
    assert!((&dd - rich).max_abs() < 1e-7, "{dd:?} {rich:?}");
}

#[test]
fn theta_on_projective_line_is_monotone_moment() {
    let spec = PotentialSpec { reference: Reference::FubiniStudy(1), perturbation: None };
    let field = ToricField::new(vec![1.0]);
    let vals: Vec<f64> = (-10..=10).map(|i| theta_of_field(&spec, &field, &[i as f64]).unwrap().0).collect();
    assert!(vals.windows(2).all(|w| w[1] > w[0]));
    // θ = ⟨v, ∇Φ⟩ = 2μ with μ ∈ (0, 2).
    assert!(vals[0] > 0.0 && vals[20] < 4.0 && vals[20] > 3.99);
    let zero = theta_of_field(&spec, &ToricField::new(vec![0.0]), &[1.3]).unwrap();
    assert_eq!(zero.0, 0.0);
}

#[test]
fn flow_derivative_matches_invariant() {
    for s in [cp2(0.0), blowup(0.0)] {
        for v in [vec![1.0, 1.0], vec![0.0, 0.0]] {
            let out = check_prop32(&s, &ToricField::new(v.clone()), &[0, 1, 2], 1e-3).unwrap();
            for d in out {
                assert_eq!(d.check.status(), Status::Pass, "{v:?} {:?}", d.check);
            }
        }
    }
}
