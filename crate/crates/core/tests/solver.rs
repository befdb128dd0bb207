use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use utm_core::datum::{builtin_datum, ProblemId};
use utm_core::solver::{backward_first_derivative, solve_heat_sine, HeatOptions, PointSolver, SolverOptions};
use utm_core::C64;

fn point(p: ProblemId, name: &str, delta: Option<f64>, radius: f64) -> PointSolver<f64> {
    let f = Arc::new(builtin_datum::<f64>(name).unwrap());
    PointSolver::new(p, f, SolverOptions { delta, radius, ..Default::default() }).unwrap()
}

#[test]
fn boundary_conditions_hold() {
    let s = point(ProblemId::FiniteIntervalKdV, "fi_poly1", None, 40.0);
    for t in [0.01, 0.05, 0.1] {
        let t0 = Instant::now();
        let q0 = s.eval(0.0, t).unwrap().0;
        let q1 = s.eval(1.0, t).unwrap().0;
        let h = 0.01;
        let col: [C64; 5] = std::array::from_fn(|k| s.eval(1.0 - k as f64 * h, t).unwrap().0);
        let qx = backward_first_derivative(col, h);
        eprintln!("t={t}: q(0)={:e} q(1)={:e} qx(1)={:e} ({:?})", q0.norm(), q1.norm(), qx.norm(), t0.elapsed());
        assert!(q0.norm() < 1e-6 && q1.norm() < 1e-6 && qx.norm() < 1e-4);
    }
    let h = point(ProblemId::HalfLineKdV, "hl_exp1", None, 40.0);
    for t in [0.01, 0.05, 0.1] {
        let q0 = h.eval(0.0, t).unwrap().0;
        eprintln!("hl t={t}: q(0)={:e}", q0.norm());
        assert!(q0.norm() < 1e-6);
    }
}

#[test]
fn deformation_and_truncation_invariance() {
    for (p, name, xs) in [
        (ProblemId::FiniteIntervalKdV, "fi_poly1", [0.2, 0.5, 0.8]),
        (ProblemId::HalfLineKdV, "hl_exp1", [0.5, 1.0, 3.0]),
    ] {
        for t in [0.01, 0.1] {
            for x in xs {
                let t0 = Instant::now();
                let mut vals = vec![];
                for d in [0.0, PI / 48.0, PI / 24.0] {
                    for r in [40.0, 80.0] {
                        vals.push(point(p, name, Some(d), r).eval(x, t).unwrap().0);
                    }
                }
                let spread = vals.iter().map(|v| (v - vals[5]).norm()).fold(0.0, f64::max);
                eprintln!("{name} x={x} t={t} q={:.12} spread={spread:e} ({:?})", vals[5], t0.elapsed());
                assert!(spread < 1e-7);
            }
        }
    }
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50)
}

fn image_oracle(x: f64, t: f64) -> f64 {
    let g = |z: f64| (-z * z / (4.0 * t)).exp() / (4.0 * PI * t).sqrt();
    let f = |y: f64| (g(x - y) - g(x + y)) * y * (-y).exp();
    // split at x so the narrow Gaussian peak is resolved
    let w = 12.0 * (t.sqrt() + 0.1);
    let a = (x - w).max(0.0);
    simpson(&f, 0.0, a.max(1e-9), 1e-13) + simpson(&f, a.max(1e-9), x + w, 1e-13) + simpson(&f, x + w, x + w + 60.0, 1e-13)
}

#[test]
fn heat_baseline_matches_images() {
    let f = Arc::new(builtin_datum::<f64>("heat_exp").unwrap());
    let opts = HeatOptions::default();
    let (v, _) = solve_heat_sine(&f, 1.0, 0.0, &opts).unwrap();
    assert!((v.re - (-1.0f64).exp()).abs() < 1e-6);
    for t in [0.01, 0.1, 0.5] {
        let t0 = Instant::now();
        let mut worst: f64 = 0.0;
        for k in 0..40 {
            let x = 0.1 + 3.9 * k as f64 / 39.0;
            let (v, _) = solve_heat_sine(&f, x, t, &opts).unwrap();
            worst = worst.max((v.re - image_oracle(x, t)).abs());
        }
        eprintln!("heat t={t} worst={worst:e} {:?}", t0.elapsed());
        assert!(worst < 1e-6);
    }
}

#[test]
fn pde_residual_spot_checks() {
    use utm_core::solver::residual_at_centers;
    let s = point(ProblemId::HalfLineKdV, "hl_exp1", None, 40.0);
    let t0 = Instant::now();
    let r = residual_at_centers(&s, &[0.56, 1.0, 2.0, 2.94], &[0.051, 0.1, 0.199], 0.02, 0.001).unwrap();
    eprintln!("hl residual {:?} {:?}", r, t0.elapsed());
    assert!(r.max_residual <= 5e-3);
    let s = point(ProblemId::FiniteIntervalKdV, "fi_poly1", None, 40.0);
    let r = residual_at_centers(&s, &[0.2, 0.5, 0.8], &[0.05, 0.1], 0.02, 0.001).unwrap();
    eprintln!("fi residual {:?} {:?}", r, t0.elapsed());
    assert!(r.max_residual <= 5e-3);
}

#[test]
fn library_image_solution_agrees_with_simpson() {
    let f = builtin_datum::<f64>("heat_exp").unwrap();
    for t in [0.01, 0.1, 0.5] {
        for x in [0.1, 1.0, 3.7] {
            let a = utm_core::solver::heat_image_solution(&f, x, t).unwrap();
            assert!((a - image_oracle(x, t)).abs() < 1e-10, "{x} {t}");
        }
    }
}
