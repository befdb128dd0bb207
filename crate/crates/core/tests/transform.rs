use std::sync::Arc;

use utm_core::datum::{builtin_datum, ProblemId};
use utm_core::solver::{solve_utm, SolutionQuery, SolverOptions};
use utm_core::transform::{real_axis_fourier_inversion, TransformOptions, TransformPair};

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

#[test]
fn inversion_reproduces_builtin_data() {
    for (p, name, g) in [
        (ProblemId::FiniteIntervalKdV, "fi_poly1", grid(0.05, 0.95, 19)),
        (ProblemId::FiniteIntervalKdV, "fi_poly2", grid(0.05, 0.95, 19)),
        (ProblemId::HalfLineKdV, "hl_exp1", grid(0.1, 5.0, 50)),
        (ProblemId::HalfLineKdV, "hl_exp2", grid(0.1, 5.0, 50)),
    ] {
        let f = Arc::new(builtin_datum::<f64>(name).unwrap());
        let pair = TransformPair::for_datum(p, &f, TransformOptions::default()).unwrap();
        let t = std::time::Instant::now();
        let r = pair.verify_inversion(&f, &g, 1e-5).unwrap();
        eprintln!("{name}: sup {:e} nodes {} tail {:e} {:?}", r.sup_error, r.nodes, r.tail_estimate, t.elapsed());
        assert!(r.pass, "{name}: {}", r.sup_error);
    }
}

#[test]
fn real_axis_inversion_recovers_interval_data() {
    // on [0,1] the two contour integrals collapse to classical Fourier inversion
    let f = Arc::new(builtin_datum::<f64>("fi_poly1").unwrap());
    for x in [0.2, 0.5, 0.8] {
        let r = real_axis_fourier_inversion(&f, x, 1e-10).unwrap();
        assert!((r.value - f.value(x)).norm() < 1e-6, "x = {x}: {}", r.value);
    }
}

#[test]
fn solver_at_t0_is_the_inversion() {
    let f = Arc::new(builtin_datum::<f64>("hl_exp2").unwrap());
    let g = grid(0.1, 5.0, 50);
    let pair = TransformPair::for_datum(ProblemId::HalfLineKdV, &f, TransformOptions::default()).unwrap();
    let report = pair.verify_inversion(&f, &g, 1e-5).unwrap();
    let query = SolutionQuery {
        problem: ProblemId::HalfLineKdV,
        datum: f.clone(),
        x_grid: g.clone(),
        t_grid: vec![0.0],
        horizon: 1.0,
        options: SolverOptions::default(),
    };
    let field = solve_utm(&query).unwrap();
    for (i, p) in report.points.iter().enumerate() {
        let v = field.values[i][0];
        assert!((v.re - p.reconstructed.0).abs() <= 1e-12 && (v.im - p.reconstructed.1).abs() <= 1e-12, "x = {}", p.x);
    }
}
