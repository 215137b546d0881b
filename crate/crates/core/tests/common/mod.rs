//! Brute-force reference solvers for small instances.
#![allow(dead_code)]

use std::f64::consts::PI;

use halfspace_core::geometry::{dot, norm, Label};
use halfspace_core::solvers::hinge_objective;
use halfspace_core::synthdata::LabeledSample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(r: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| r.sample::<f64, _>(rand_distr::StandardNormal)).collect()
}

pub fn unit_vec(r: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v = gaussian_vec(r, d);
        let n = norm(&v);
        if n > 1e-6 {
            return v.iter().map(|c| c / n).collect();
        }
    }
}

/// Best normalized margin `max_u min_i a_i·u / ‖a_i‖` over unit `u` in the
/// plane, by an angular grid refined twice around its best cell.
///
/// The homogeneous system `a_i·v ≥ 1` is feasible iff this is positive.
pub fn lp_grid_margin(rows: &[Vec<f64>]) -> f64 {
    let score = |phi: f64| {
        let u = [phi.cos(), phi.sin()];
        rows.iter()
            .map(|a| dot(a, &u) / norm(a))
            .fold(f64::INFINITY, f64::min)
    };
    let (mut lo, mut hi) = (-PI, PI);
    let mut best = (f64::NEG_INFINITY, 0.0);
    for _ in 0..3 {
        let steps = 4000;
        let h = (hi - lo) / steps as f64;
        best = (f64::NEG_INFINITY, 0.0);
        for i in 0..=steps {
            let phi = lo + h * i as f64;
            let s = score(phi);
            if s > best.0 {
                best = (s, phi);
            }
        }
        lo = best.1 - 2.0 * h;
        hi = best.1 + 2.0 * h;
    }
    best.0
}

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting; `None` when (numerically) singular.
pub fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut dyn FnMut(&[usize])) {
    if cur.len() == k {
        out(cur);
        return;
    }
    for i in start..n {
        if n - i < k - cur.len() {
            break;
        }
        cur.push(i);
        subsets(n, k, i + 1, cur, out);
        cur.pop();
    }
}

/// Minimum of `(1/n)Σ|Φc − y|` by enumerating the vertices: an optimum
/// interpolates `p` rows whenever `Φ` has full column rank.
pub fn l1_vertex_oracle(features: &[Vec<f64>], targets: &[f64]) -> f64 {
    let n = features.len();
    let p = features[0].len();
    let mut best = f64::INFINITY;
    subsets(n, p, 0, &mut Vec::new(), &mut |idx| {
        let a: Vec<Vec<f64>> = idx.iter().map(|&i| features[i].clone()).collect();
        let b: Vec<f64> = idx.iter().map(|&i| targets[i]).collect();
        if let Some(c) = solve_square(a, b) {
            let obj = features
                .iter()
                .zip(targets)
                .map(|(f, y)| (dot(f, &c) - y).abs())
                .sum::<f64>()
                / n as f64;
            best = best.min(obj);
        }
    });
    best
}

/// Two-stage polar grid minimum of the hinge objective over the planar
/// sector `{r(cos φ, sin φ) : r ≤ 1, |φ − φ_axis| ≤ α}`.
pub fn hinge_grid_oracle(samples: &[LabeledSample], tau: f64, axis: [f64; 2], alpha: f64) -> (f64, [f64; 2]) {
    let phi0 = axis[1].atan2(axis[0]);
    let eval = |r: f64, phi: f64| {
        let v = [r * phi.cos(), r * phi.sin()];
        (hinge_objective(&v, samples, tau), v)
    };
    let steps = 200;
    let (mut r_lo, mut r_hi, mut p_lo, mut p_hi) = (0.0, 1.0, phi0 - alpha, phi0 + alpha);
    let mut best = (f64::INFINITY, [0.0, 0.0], 0.0, 0.0);
    for _ in 0..3 {
        let (hr, hp) = ((r_hi - r_lo) / steps as f64, (p_hi - p_lo) / steps as f64);
        for i in 0..=steps {
            for j in 0..=steps {
                let (r, phi) = (r_lo + hr * i as f64, p_lo + hp * j as f64);
                let (obj, v) = eval(r, phi);
                if obj < best.0 {
                    best = (obj, v, r, phi);
                }
            }
        }
        r_lo = (best.2 - 3.0 * hr).max(0.0);
        r_hi = (best.2 + 3.0 * hr).min(1.0);
        p_lo = (best.3 - 3.0 * hp).max(phi0 - alpha);
        p_hi = (best.3 + 3.0 * hp).min(phi0 + alpha);
    }
    (best.0, best.1)
}

/// Fewest errors of `sign(value − θ)` over every interval between sorted
/// values, including below all and above all.
pub fn threshold_scan_oracle(values: &[f64], labels: &[Label]) -> usize {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut cands = vec![sorted[0] - 1.0, sorted[sorted.len() - 1] + 1.0];
    cands.extend(sorted.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    cands
        .iter()
        .map(|&t| {
            values
                .iter()
                .zip(labels)
                .filter(|(v, y)| Label::from_sign(*v - t) != **y)
                .count()
        })
        .min()
        .expect("nonempty")
}

/// Exact projection onto a planar sector of radius 1: the nearest of the
/// interior point itself, the clipped boundary rays, the arc and the apex.
pub fn sector_projection(v: [f64; 2], axis: [f64; 2], alpha: f64) -> [f64; 2] {
    let phi0 = axis[1].atan2(axis[0]);
    let inside = |p: [f64; 2]| {
        let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
        if r <= 1e-12 {
            return true;
        }
        let mut d = p[1].atan2(p[0]) - phi0;
        d = (d + PI).rem_euclid(2.0 * PI) - PI;
        r <= 1.0 + 1e-12 && d.abs() <= alpha + 1e-12
    };
    if inside(v) {
        return v;
    }
    let mut cands = vec![[0.0, 0.0]];
    for s in [-1.0, 1.0] {
        let u = [(phi0 + s * alpha).cos(), (phi0 + s * alpha).sin()];
        let t = (v[0] * u[0] + v[1] * u[1]).clamp(0.0, 1.0);
        cands.push([t * u[0], t * u[1]]);
    }
    let r = (v[0] * v[0] + v[1] * v[1]).sqrt();
    let arc = [v[0] / r, v[1] / r];
    if inside(arc) {
        cands.push(arc);
    }
    let dist = |p: &[f64; 2]| (p[0] - v[0]).hypot(p[1] - v[1]);
    *cands
        .iter()
        .min_by(|a, b| dist(a).total_cmp(&dist(b)))
        .expect("apex is always a candidate")
}

/// Smallest distance from `v` to a polar grid over the cap
/// `{q : ‖q‖ ≤ 1, angle(q, e_1) ≤ α}` in three dimensions.
pub fn cap_grid_distance_3d(v: &[f64; 3], alpha: f64) -> f64 {
    let (nr, nb, na) = (60, 60, 120);
    let mut best = norm(v);
    for i in 1..=nr {
        let r = i as f64 / nr as f64;
        for j in 0..=nb {
            let beta = alpha * j as f64 / nb as f64;
            for k in 0..na {
                let psi = 2.0 * PI * k as f64 / na as f64;
                let q = [r * beta.cos(), r * beta.sin() * psi.cos(), r * beta.sin() * psi.sin()];
                let dd = ((q[0] - v[0]).powi(2) + (q[1] - v[1]).powi(2) + (q[2] - v[2]).powi(2)).sqrt();
                best = best.min(dd);
            }
        }
    }
    best
}

pub fn sign_labels(xs: &[Vec<f64>], w: &[f64]) -> Vec<Label> {
    xs.iter().map(|x| Label::from_sign(dot(x, w))).collect()
}

/// Agreement of one solver with its reference over random instances.
#[derive(Debug)]
pub struct Tally {
    pub agree: usize,
    pub total: usize,
    /// Largest gap to the reference seen, in the solver's own units.
    pub worst: f64,
}

impl Tally {
    fn new() -> Tally {
        Tally { agree: 0, total: 0, worst: 0.0 }
    }

    fn record(&mut self, ok: bool, gap: f64) {
        self.total += 1;
        self.agree += usize::from(ok);
        self.worst = self.worst.max(gap);
    }

    pub fn all_agree(&self) -> bool {
        self.total > 0 && self.agree == self.total
    }
}

/// Homogeneous planar separation systems; instances whose best margin is
/// within 1e-3 of zero are skipped as undecidable by the grid.
pub fn lp_vs_grid(count: usize, seed: u64) -> Tally {
    use halfspace_core::solvers::{lp_feasible, LinearConstraintSystem};
    let mut r = rng(seed);
    let mut t = Tally::new();
    while t.total < count {
        let n = r.random_range(2..=8);
        let xs: Vec<Vec<f64>> = (0..n).map(|_| gaussian_vec(&mut r, 2)).collect();
        let ys: Vec<f64> = if r.random_bool(0.5) {
            let w = unit_vec(&mut r, 2);
            xs.iter().map(|x| Label::from_sign(dot(x, &w)).as_f64()).collect()
        } else {
            (0..n).map(|_| if r.random_bool(0.5) { 1.0 } else { -1.0 }).collect()
        };
        let rows: Vec<Vec<f64>> = xs.iter().zip(&ys).map(|(x, y)| vec![y * x[0], y * x[1]]).collect();
        let margin = lp_grid_margin(&rows);
        if margin.abs() < 1e-3 {
            continue;
        }
        let sys = LinearConstraintSystem::new(2, rows.iter().map(|a| (a.clone(), 1.0)).collect()).unwrap();
        match lp_feasible(&sys).unwrap() {
            Some(v) => {
                let slack = sys.min_slack(&v);
                t.record(margin > 0.0 && slack >= -1e-7, (-slack).max(0.0));
            }
            None => t.record(margin < 0.0, 0.0),
        }
    }
    t
}

pub fn random_l1_instance(r: &mut ChaCha8Rng, max_n: usize, max_p: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let p = r.random_range(1..=max_p);
    let n = r.random_range(p + 1..=max_n);
    let feats: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let mut f = gaussian_vec(r, p);
            f[0] = 1.0;
            f
        })
        .collect();
    let ys: Vec<f64> = (0..n)
        .map(|_| {
            let y: f64 = r.sample(rand_distr::StandardNormal);
            if r.random_bool(0.2) {
                5.0 * y
            } else {
                y
            }
        })
        .collect();
    (feats, ys)
}

pub fn l1_vs_vertices(count: usize, seed: u64) -> Tally {
    use halfspace_core::solvers::l1_fit;
    let mut r = rng(seed);
    let mut t = Tally::new();
    for _ in 0..count {
        let (feats, ys) = random_l1_instance(&mut r, 16, 3);
        let fit = l1_fit(&feats, &ys).unwrap();
        let gap = (fit.objective - l1_vertex_oracle(&feats, &ys)).abs();
        t.record(gap <= 1e-6, gap);
    }
    t
}

pub fn random_hinge_instance(r: &mut ChaCha8Rng, d: usize) -> (Vec<LabeledSample>, f64, Vec<f64>, f64) {
    use halfspace_core::geometry::Instance;
    let n = r.random_range(1..=10);
    let w = unit_vec(r, d);
    let noisy = r.random_bool(0.5);
    let samples = (0..n)
        .map(|_| {
            let x = gaussian_vec(r, d);
            let mut y = Label::from_sign(dot(&x, &w));
            if noisy && r.random_bool(0.3) {
                y = y.flip();
            }
            LabeledSample::new(Instance::new(x).unwrap(), y)
        })
        .collect();
    let tau = r.random_range(0.2..1.0);
    let axis = unit_vec(r, d);
    let alpha = r.random_range(0.05..=PI / 2.0);
    (samples, tau, axis, alpha)
}

pub fn hinge_vs_grid(count: usize, seed: u64, iters: usize) -> Tally {
    use halfspace_core::geometry::{ConeCap, Hyperplane};
    use halfspace_core::solvers::{minimize_hinge, HingeConfig, HingeProblem};
    let mut r = rng(seed);
    let mut t = Tally::new();
    for _ in 0..count {
        let (samples, tau, axis, alpha) = random_hinge_instance(&mut r, 2);
        let cone = ConeCap::new(Hyperplane::new(axis.clone()).unwrap(), alpha).unwrap();
        let sol = minimize_hinge(
            &HingeProblem { samples: &samples, tau, cone },
            &HingeConfig { iters, step_radius: 1.0 },
        )
        .unwrap();
        let (grid, _) = hinge_grid_oracle(&samples, tau, [axis[0], axis[1]], alpha);
        let gap = sol.objective - grid;
        t.record(gap <= 5e-3, gap.max(0.0));
    }
    t
}

pub fn threshold_vs_scan(count: usize, seed: u64) -> Tally {
    use halfspace_core::learners::select_threshold;
    let mut r = rng(seed);
    let mut t = Tally::new();
    for _ in 0..count {
        let n = r.random_range(1..=50);
        let values: Vec<f64> = (0..n).map(|_| r.random_range(-0.99..0.99)).collect();
        let flip = r.random_range(0.0..0.5);
        let labels: Vec<Label> = values
            .iter()
            .map(|v| {
                let y = Label::from_sign(*v - 0.2);
                if r.random_bool(flip) {
                    y.flip()
                } else {
                    y
                }
            })
            .collect();
        let got = select_threshold(&values, &labels).unwrap().errors;
        let want = threshold_scan_oracle(&values, &labels);
        t.record(got == want, got.abs_diff(want) as f64);
    }
    t
}

/// Planar instances against the exact sector projection, spatial ones
/// against a polar grid over the cap.
pub fn projection_vs_reference(count: usize, seed: u64) -> Tally {
    use halfspace_core::geometry::{project_cone_cap, ConeCap, Hyperplane};
    let mut r = rng(seed);
    let mut t = Tally::new();
    for i in 0..count {
        let alpha = r.random_range(0.01..=PI / 2.0);
        let scale = r.random_range(0.1..3.0);
        if i % 2 == 0 {
            let axis = unit_vec(&mut r, 2);
            let v: Vec<f64> = gaussian_vec(&mut r, 2).iter().map(|c| c * scale).collect();
            let k = ConeCap::new(Hyperplane::new(axis.clone()).unwrap(), alpha).unwrap();
            let p = project_cone_cap(&v, &k);
            let q = sector_projection([v[0], v[1]], [axis[0], axis[1]], alpha);
            let gap = ((p[0] - v[0]).hypot(p[1] - v[1]) - (q[0] - v[0]).hypot(q[1] - v[1])).max(0.0);
            t.record(gap <= 1e-6 && k.contains(&p, 1e-7, 1e-6), gap);
        } else {
            let v: Vec<f64> = gaussian_vec(&mut r, 3).iter().map(|c| c * scale).collect();
            let k = ConeCap::new(Hyperplane::basis(3, 0), alpha).unwrap();
            let p = project_cone_cap(&v, &k);
            let dist = norm(&[p[0] - v[0], p[1] - v[1], p[2] - v[2]]);
            let gap = (dist - cap_grid_distance_3d(&[v[0], v[1], v[2]], alpha)).max(0.0);
            t.record(gap <= 1e-6 && k.contains(&p, 1e-7, 1e-6), gap);
        }
    }
    t
}

/// A unit vector at angle exactly `theta` from `w`, in a random direction.
pub fn rotate(w: &halfspace_core::geometry::Hyperplane, theta: f64, seed: u64) -> halfspace_core::geometry::Hyperplane {
    let mut r = rng(seed);
    let d = w.dim();
    let u = loop {
        let g = gaussian_vec(&mut r, d);
        let c = dot(&g, w);
        let o: Vec<f64> = g.iter().zip(w.iter()).map(|(a, b)| a - c * b).collect();
        let n = norm(&o);
        if n > 1e-6 {
            break o.iter().map(|v| v / n).collect::<Vec<f64>>();
        }
    };
    let v: Vec<f64> = w.iter().zip(&u).map(|(a, b)| theta.cos() * a + theta.sin() * b).collect();
    halfspace_core::geometry::Hyperplane::new(v).unwrap()
}
