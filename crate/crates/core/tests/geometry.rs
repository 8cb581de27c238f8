use core::f64::consts::PI;

use ekverify_core::expr::Expr;
use ekverify_core::geometry::{
    metric_and_ricci, potential_jet, wedge_density, FormMatrix, Perturbation, Polytope, PotentialSpec, Reference, ToricGeometry,
};
use ekverify_core::linalg::Matrix;
use ekverify_core::quad::{integrate, Domain, GridSpec};
use proptest::prelude::*;

fn fs(n: usize, pert: Option<Perturbation>) -> PotentialSpec {
    PotentialSpec { reference: Reference::FubiniStudy(n), perturbation: pert }
}

fn moment(f: Expr, eps: f64) -> Option<Perturbation> {
    Some(Perturbation::Moment { f, eps })
}

fn mu12() -> Expr {
    Expr::var(0).mul(Expr::var(1))
}

fn volume(reference: Reference, grid: GridSpec) -> f64 {
    let geo = ToricGeometry::new(reference).unwrap();
    let n = geo.dim();
    let nf = (1..=n).product::<usize>() as f64;
    integrate(&geo, &grid, |x| {
        let rp = geo.ref_point_from_x(x)?;
        Ok(nf * geo.metric(&rp.potential, x)?.g.det())
    })
    .unwrap()
    .value
}

#[test]
fn calibrated_volumes() {
    let v1 = volume(Reference::FubiniStudy(1), GridSpec::default_for(1));
    assert!((v1 / (4.0 * PI) - 1.0).abs() < 1e-8, "{v1}");
    let v2 = volume(Reference::FubiniStudy(2), GridSpec::default_for(2));
    assert!((v2 / (36.0 * PI * PI) - 1.0).abs() < 1e-8, "{v2}");
    let vb = volume(Reference::Guillemin(Polytope::blowup_p2()), GridSpec::default_for(2));
    assert!((vb / (32.0 * PI * PI) - 1.0).abs() < 1e-8, "{vb}");
}

#[test]
fn box_volume_is_insensitive_to_truncation() {
    let grid = |l: f64| GridSpec { domain: Domain::Box, half_width: l, nodes_per_axis: 512, t_nodes: 16 };
    let a = volume(Reference::FubiniStudy(1), grid(20.0));
    let b = volume(Reference::FubiniStudy(1), grid(30.0));
    assert!(((a - b) / a).abs() < 1e-10, "{a} {b}");
}

#[test]
fn einstein_residual_on_quadrature_nodes() {
    for n in 1..=2 {
        let geo = ToricGeometry::new(Reference::FubiniStudy(n)).unwrap();
        let mut worst = 0.0f64;
        integrate(&geo, &GridSpec::default_for(n), |x| {
            let rp = geo.ref_point_from_x(x)?;
            let m = geo.metric(&rp.potential, x)?;
            worst = worst.max((&m.ric - &m.g).max_abs());
            Ok(0.0)
        })
        .unwrap();
        assert!(worst <= 1e-8, "n={n} residual {worst}");
    }
}

#[test]
fn spec_jet_example() {
    // Φ = 2 log(1 + e^x) has Φ''(0) = 1/2.
    let alg = ekverify_core::jet::JetAlgebra::new(1, 4);
    let phi = Expr::Const(1.0).add(Expr::var(0).exp()).ln().mul(Expr::Const(2.0));
    let j = phi.eval(&[alg.variable(0, 0.0)]);
    assert!((j.partial(&[2]) - 0.5).abs() < 1e-15);
}

const FD8: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

fn fd_check(spec: &PotentialSpec, points: &[Vec<f64>]) {
    let h = 1e-2;
    let n = spec.reference.dim();
    for x in points {
        let base = potential_jet(spec, x).unwrap();
        let shifted: Vec<Vec<_>> = (0..n)
            .map(|i| {
                (1..=4)
                    .flat_map(|s| [s as f64, -(s as f64)])
                    .map(|s| {
                        let mut y = x.clone();
                        y[i] += s * h;
                        potential_jet(spec, &y).unwrap()
                    })
                    .collect()
            })
            .collect();
        let mut multi = vec![Vec::<usize>::new()];
        for _order in 1..=3 {
            multi = multi
                .iter()
                .flat_map(|m| (m.last().copied().unwrap_or(0)..n).map(move |i| [m.clone(), vec![i]].concat()))
                .collect();
            for lower in &multi {
                for (i, sh) in shifted.iter().enumerate() {
                    let fd: f64 =
                        FD8.iter().enumerate().map(|(s, c)| c * (sh[2 * s].partial(lower) - sh[2 * s + 1].partial(lower))).sum::<f64>() / h;
                    let mut idx = lower.clone();
                    idx.push(i);
                    let exact = base.partial(&idx);
                    assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0), "x={x:?} idx={idx:?} fd={fd} jet={exact}");
                }
            }
        }
        // First derivatives from values.
        for (i, sh) in shifted.iter().enumerate() {
            let fd: f64 = FD8.iter().enumerate().map(|(s, c)| c * (sh[2 * s].partial(&[]) - sh[2 * s + 1].partial(&[]))).sum::<f64>() / h;
            let exact = base.partial(&[i]);
            assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0), "x={x:?} i={i}");
        }
    }
}

fn sample_points(n: usize, count: usize, seed: u64, spread: f64) -> Vec<Vec<f64>> {
    let mut state = seed;
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0) * spread
    };
    (0..count).map(|_| (0..n).map(|_| next()).collect()).collect()
}

#[test]
fn jets_match_finite_differences() {
    fd_check(&fs(1, moment(Expr::var(0).pow(2), 0.2)), &sample_points(1, 20, 1, 3.0));
    fd_check(&fs(2, moment(mu12(), 0.2)), &sample_points(2, 20, 2, 3.0));
    fd_check(&PotentialSpec { reference: Reference::Guillemin(Polytope::blowup_p2()), perturbation: None }, &sample_points(2, 20, 3, 3.0));
}

#[test]
fn jets_are_symmetric_and_unperturbed_at_zero_amplitude() {
    let x = [0.3, -0.7];
    let d = potential_jet(&fs(2, moment(mu12(), 0.2)), &x).unwrap();
    assert_eq!(d.partial(&[0, 1, 1]), d.partial(&[1, 0, 1]));
    let a = potential_jet(&fs(2, moment(mu12(), 0.0)), &x).unwrap();
    let b = potential_jet(&fs(2, None), &x).unwrap();
    assert_eq!(a, b);
}

#[test]
fn guillemin_simplex_matches_fubini_study() {
    for n in 1..=2 {
        let g = PotentialSpec { reference: Reference::Guillemin(Polytope::projective_space(n)), perturbation: None };
        for x in sample_points(n, 10, 7 + n as u64, 6.0) {
            let (ga, ra) = metric_and_ricci(&g, &x).unwrap();
            let (gb, _) = metric_and_ricci(&fs(n, None), &x).unwrap();
            assert!((&ga - &gb).max_abs() < 1e-8, "x={x:?}");
            assert!((&ra - &ga).max_abs() < 1e-8);
        }
    }
}

#[test]
fn ricci_deviation_is_first_order_in_amplitude() {
    let x = [0.4, -0.2];
    let dev = |eps: f64| {
        let (g, r) = metric_and_ricci(&fs(2, moment(mu12(), eps)), &x).unwrap();
        (&r - &g).max_abs()
    };
    let ratio = dev(0.1) / dev(0.05);
    assert!((ratio - 2.0).abs() < 0.1, "ratio {ratio}");
}

fn sym(v: &[f64; 3]) -> FormMatrix {
    Matrix::from_rows(2, vec![v[0], v[1], v[1], v[2]])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn wedge_density_is_multilinear(a in prop::array::uniform3(-2.0f64..2.0), b in prop::array::uniform3(-2.0f64..2.0), c in prop::array::uniform3(-2.0f64..2.0)) {
        let (a, b, c) = (sym(&a), sym(&b), sym(&c));
        let lhs = wedge_density(&[(&(&a + &b), 1), (&c, 1)]).unwrap();
        let rhs = wedge_density(&[(&a, 1), (&c, 1)]).unwrap() + wedge_density(&[(&b, 1), (&c, 1)]).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }
}
