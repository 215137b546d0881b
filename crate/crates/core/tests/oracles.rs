mod common;

use common::*;

fn assert_tally(name: &str, t: Tally) {
    assert!(t.all_agree(), "{name}: {}/{} agree, worst gap {:e}", t.agree, t.total, t.worst);
}

#[test]
fn lp_matches_planar_grid() {
    assert_tally("lp", lp_vs_grid(150, 11));
}

#[test]
fn l1_matches_vertex_enumeration() {
    assert_tally("l1", l1_vs_vertices(150, 12));
}

#[test]
fn hinge_matches_polar_grid() {
    assert_tally("hinge", hinge_vs_grid(100, 13, 1000));
}

#[test]
fn threshold_matches_interval_scan() {
    assert_tally("threshold", threshold_vs_scan(200, 14));
}

#[test]
fn projection_matches_reference() {
    assert_tally("projection", projection_vs_reference(120, 15));
}

#[test]
fn sector_projection_example() {
    use halfspace_core::geometry::{project_cone_cap, ConeCap, Hyperplane};
    let k = ConeCap::new(Hyperplane::basis(2, 0), std::f64::consts::FRAC_PI_4).unwrap();
    let p = project_cone_cap(&[0.0, 1.0], &k);
    let q = sector_projection([0.0, 1.0], [1.0, 0.0], std::f64::consts::FRAC_PI_4);
    for (a, b) in p.iter().zip([0.5, 0.5]) {
        assert!((a - b).abs() < 1e-9);
    }
    assert!((q[0] - 0.5).abs() < 1e-12 && (q[1] - 0.5).abs() < 1e-12);
}

#[test]
fn single_sample_hinge_direction() {
    use halfspace_core::geometry::{angle_between, ConeCap, Hyperplane, Instance, Label};
    use halfspace_core::solvers::{minimize_hinge, HingeConfig, HingeProblem};
    use halfspace_core::synthdata::LabeledSample;
    let x = [0.8 * 0.6f64.cos(), 0.8 * 0.6f64.sin()];
    let samples = [LabeledSample::new(Instance::new(x.to_vec()).unwrap(), Label::Pos)];
    let cone = ConeCap::new(Hyperplane::basis(2, 0), std::f64::consts::FRAC_PI_2).unwrap();
    let sol = minimize_hinge(
        &HingeProblem { samples: &samples, tau: 1.0, cone },
        &HingeConfig::default(),
    )
    .unwrap();
    let (obj, v) = hinge_grid_oracle(&samples, 1.0, [1.0, 0.0], std::f64::consts::FRAC_PI_2);
    assert!((obj - 0.2).abs() < 1e-4);
    assert!(angle_between(&sol.v, &v) <= 0.02);
}

#[test]
fn three_separable_points() {
    use halfspace_core::solvers::{lp_feasible, LinearConstraintSystem};
    let pts = [([1.0, 0.5], 1.0), ([0.3, 2.0], 1.0), ([-1.0, -0.2], -1.0)];
    let rows: Vec<Vec<f64>> = pts.iter().map(|(x, y)| vec![y * x[0], y * x[1]]).collect();
    assert!(lp_grid_margin(&rows) > 0.0);
    let sys = LinearConstraintSystem::new(2, rows.into_iter().map(|a| (a, 1.0)).collect()).unwrap();
    let v = lp_feasible(&sys).unwrap().unwrap();
    for (x, y) in pts {
        assert!(y * (v[0] * x[0] + v[1] * x[1]) >= 1.0 - 1e-7);
    }
}

#[test]
fn l1_twenty_by_three() {
    use halfspace_core::solvers::l1_fit;
    let mut r = rng(20);
    let feats: Vec<Vec<f64>> = (0..20)
        .map(|_| {
            let mut f = gaussian_vec(&mut r, 3);
            f[0] = 1.0;
            f
        })
        .collect();
    let ys: Vec<f64> = feats.iter().map(|f| 0.5 + f[1] - 2.0 * f[2] + gaussian_vec(&mut r, 1)[0]).collect();
    let fit = l1_fit(&feats, &ys).unwrap();
    assert!((fit.objective - l1_vertex_oracle(&feats, &ys)).abs() <= 1e-4);
}
