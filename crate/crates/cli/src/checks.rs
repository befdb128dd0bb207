//! Verification suites. Each check yields one record with the measured
//! magnitude, its tolerance and the verdict.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use utm_core::augeig::{
    diagonalised_inverse_check, eigen_relation_residual, type_i_failure_probe, type_ii_vanishing, AugOptions,
};
use utm_core::contour::{build_contour, ContourOptions};
use utm_core::datum::ProblemId;
use utm_core::solver::{
    backward_first_derivative, default_delta, generalized_eig_check, heat_image_solution, residual_at_centers,
    solve_heat_sine, solve_utm, HeatOptions, PointSolver, SolutionQuery, SolverOptions,
};
use utm_core::spectral::{Sign, SpectralContext};
use utm_core::transform::{TransformOptions, TransformPair};
use utm_core::zeros::{certify_contour_clearance, count_zeros, find_zeros, rotation_defect, Rect, RegionTag};
use utm_core::{Datum, C64};

pub const SUITES: [&str; 7] = ["inversion", "identity", "solution", "deformation", "augeig", "zeros", "heat"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check_id: String,
    pub problem: String,
    pub datum: String,
    pub params: Value,
    pub magnitude: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct CheckContext {
    pub problem: ProblemId,
    pub datum: Arc<Datum>,
    pub radius: f64,
    pub indent_radius: Option<f64>,
    pub below_axis: bool,
    pub seed: u64,
}

impl CheckContext {
    pub fn new(problem: ProblemId, datum: Datum) -> Self {
        CheckContext { problem, datum: Arc::new(datum), radius: 60.0, indent_radius: None, below_axis: false, seed: 1 }
    }

    fn record(&self, id: &str, params: Value, magnitude: f64, tolerance: f64) -> CheckRecord {
        CheckRecord {
            check_id: id.to_string(),
            problem: self.problem.short_name().to_string(),
            datum: self.datum.label().to_string(),
            params,
            magnitude,
            tolerance,
            pass: magnitude.is_finite() && magnitude <= tolerance,
        }
    }

    fn failed(&self, id: &str, err: &dyn std::fmt::Display, tolerance: f64) -> CheckRecord {
        CheckRecord { pass: false, ..self.record(id, json!({ "error": err.to_string() }), f64::NAN, tolerance) }
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(salt))
    }

    fn fi(&self) -> bool {
        self.problem == ProblemId::FiniteIntervalKdV
    }
}

pub fn applicable(suite: &str, problem: ProblemId) -> bool {
    use ProblemId::*;
    match suite {
        "inversion" | "solution" | "deformation" | "augeig" => problem != HalfLineHeat,
        "identity" | "zeros" => problem == FiniteIntervalKdV,
        "heat" => problem == HalfLineHeat,
        _ => false,
    }
}

/// Runs `suite` (or every applicable suite for "all").
pub fn run_suite(ctx: &CheckContext, suite: &str) -> anyhow::Result<Vec<CheckRecord>> {
    if suite == "all" {
        let mut out = Vec::new();
        for s in SUITES.iter().filter(|s| applicable(s, ctx.problem)) {
            out.extend(run_suite(ctx, s)?);
        }
        return Ok(out);
    }
    if !SUITES.contains(&suite) {
        anyhow::bail!(crate::ConfigError(format!("unknown suite {suite:?}")));
    }
    if !applicable(suite, ctx.problem) {
        anyhow::bail!(crate::ConfigError(format!("suite {suite} does not apply to problem {}", ctx.problem.short_name())));
    }
    Ok(match suite {
        "inversion" => vec![inversion(ctx)],
        "identity" => vec![identity(ctx)],
        "solution" => solution(ctx),
        "deformation" => vec![deformation(ctx)],
        "augeig" => augeig(ctx),
        "zeros" => zeros(ctx),
        _ => heat(ctx),
    })
}

pub fn inversion_grid(problem: ProblemId) -> Vec<f64> {
    match problem {
        ProblemId::FiniteIntervalKdV => (1..=19).map(|k| k as f64 * 0.05).collect(),
        _ => (1..=50).map(|k| k as f64 * 0.1).collect(),
    }
}

fn transform_options(ctx: &CheckContext) -> TransformOptions<f64> {
    TransformOptions { radius: ctx.radius, indent_radius: ctx.indent_radius, ..TransformOptions::default() }
}

pub fn inversion(ctx: &CheckContext) -> CheckRecord {
    let id = "inversion";
    let grid = inversion_grid(ctx.problem);
    let run = || -> utm_core::Result<_> {
        TransformPair::for_datum(ctx.problem, &ctx.datum, transform_options(ctx))?.verify_inversion(&ctx.datum, &grid, 1e-5)
    };
    match run() {
        Ok(r) => ctx.record(
            id,
            json!({
                "radius": ctx.radius,
                "x_min": grid[0],
                "x_max": grid[grid.len() - 1],
                "points": grid.len(),
                "nodes": r.nodes,
                "tail_estimate": r.tail_estimate,
            }),
            r.sup_error,
            1e-5,
        ),
        Err(e) => ctx.failed(id, &e, 1e-5),
    }
}

pub fn identity(ctx: &CheckContext) -> CheckRecord {
    let id = "zeta_identity";
    let mut rng = ctx.rng(2);
    let mut run = || -> utm_core::Result<f64> {
        let sc = SpectralContext::new(ctx.problem, ctx.datum.clone())?;
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let r = 30.0 * rng.gen::<f64>().sqrt();
            let th = 2.0 * PI * rng.gen::<f64>();
            worst = worst.max(sc.identity_defect(C64::from_polar(r, th))?);
        }
        Ok(worst)
    };
    match run() {
        Ok(m) => ctx.record(id, json!({ "samples": 50, "max_modulus": 30.0, "seed": ctx.seed }), m, 1e-10),
        Err(e) => ctx.failed(id, &e, 1e-10),
    }
}

fn point_solver(ctx: &CheckContext, delta: Option<f64>, radius: f64) -> utm_core::Result<PointSolver<f64>> {
    let opts = SolverOptions { radius, delta, indent_radius: ctx.indent_radius, ..SolverOptions::default() };
    PointSolver::new(ctx.problem, ctx.datum.clone(), opts)
}

const BOUNDARY_TIMES: [f64; 3] = [0.01, 0.05, 0.1];

pub fn solution(ctx: &CheckContext) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let grid = inversion_grid(ctx.problem);
    let query = SolutionQuery {
        problem: ctx.problem,
        datum: ctx.datum.clone(),
        x_grid: grid.clone(),
        t_grid: vec![0.0],
        horizon: 1.0,
        options: SolverOptions {
            radius: ctx.radius,
            indent_radius: ctx.indent_radius,
            transform: transform_options(ctx),
            ..SolverOptions::default()
        },
    };
    out.push(match solve_utm(&query) {
        Ok(field) => {
            let err = grid.iter().enumerate().map(|(i, &x)| (field.values[i][0] - ctx.datum.value(x)).norm()).fold(0.0, f64::max);
            ctx.record("t0_reproduction", json!({ "points": grid.len(), "radius": ctx.radius }), err, 1e-5)
        }
        Err(e) => ctx.failed("t0_reproduction", &e, 1e-5),
    });

    let solver = match point_solver(ctx, None, 40.0) {
        Ok(s) => s,
        Err(e) => {
            for (id, tol) in [("boundary_q0", 1e-6), ("pde_residual", 5e-3), ("reality", 1e-6)] {
                out.push(ctx.failed(id, &e, tol));
            }
            return out;
        }
    };
    let params = json!({ "t": BOUNDARY_TIMES, "radius": 40.0, "delta": solver.delta });
    let at = |x: f64, t: f64| solver.eval(x, t).map(|v| v.0);
    let max_over = |f: &dyn Fn(f64) -> utm_core::Result<f64>| -> utm_core::Result<f64> {
        BOUNDARY_TIMES.iter().try_fold(0.0f64, |m, &t| Ok(m.max(f(t)?)))
    };
    let q0 = max_over(&|t| Ok(at(0.0, t)?.norm()));
    out.push(match q0 {
        Ok(m) => ctx.record("boundary_q0", params.clone(), m, 1e-6),
        Err(e) => ctx.failed("boundary_q0", &e, 1e-6),
    });
    if ctx.fi() {
        let q1 = max_over(&|t| Ok(at(1.0, t)?.norm()));
        out.push(match q1 {
            Ok(m) => ctx.record("boundary_q1", params.clone(), m, 1e-6),
            Err(e) => ctx.failed("boundary_q1", &e, 1e-6),
        });
        let h = 0.01;
        let qx1 = max_over(&|t| {
            let mut col = [C64::new(0.0, 0.0); 5];
            for (k, c) in col.iter_mut().enumerate() {
                *c = at(1.0 - k as f64 * h, t)?;
            }
            Ok(backward_first_derivative(col, h).norm())
        });
        out.push(match qx1 {
            Ok(m) => ctx.record("boundary_qx1", json!({ "t": BOUNDARY_TIMES, "h": h, "delta": solver.delta }), m, 1e-4),
            Err(e) => ctx.failed("boundary_qx1", &e, 1e-4),
        });
    }

    let (xs, ts): (Vec<f64>, Vec<f64>) = if ctx.fi() {
        (vec![0.2, 0.35, 0.5, 0.65, 0.8], vec![0.05, 0.075, 0.1])
    } else {
        (vec![0.56, 0.96, 1.36, 1.76, 2.16, 2.56, 2.94], vec![0.051, 0.08, 0.11, 0.14, 0.17, 0.199])
    };
    out.push(match residual_at_centers(&solver, &xs, &ts, 0.02, 0.001) {
        Ok(r) => ctx.record(
            "pde_residual",
            json!({ "h_x": 0.02, "h_t": 0.001, "x_centres": xs, "t_centres": ts, "worst_at": [r.at.0, r.at.1] }),
            r.max_residual,
            5e-3,
        ),
        Err(e) => ctx.failed("pde_residual", &e, 5e-3),
    });

    let imag = xs.iter().try_fold(0.0f64, |m, &x| max_over(&|t| Ok(at(x, t)?.im.abs())).map(|v| m.max(v)));
    out.push(match imag {
        Ok(m) => ctx.record("reality", json!({ "x": xs, "t": BOUNDARY_TIMES }), m, 1e-6),
        Err(e) => ctx.failed("reality", &e, 1e-6),
    });
    out
}

pub fn deformation(ctx: &CheckContext) -> CheckRecord {
    let id = "deformation_invariance";
    let xs: [f64; 3] = if ctx.fi() { [0.2, 0.5, 0.8] } else { [0.5, 1.0, 3.0] };
    let deltas = [0.0, PI / 48.0, PI / 24.0];
    let radii = [40.0, 80.0];
    let times = [0.01, 0.1];
    let run = || -> utm_core::Result<f64> {
        let mut solvers = Vec::new();
        for d in deltas {
            for r in radii {
                solvers.push(point_solver(ctx, Some(d), r)?);
            }
        }
        let mut worst: f64 = 0.0;
        for t in times {
            for x in xs {
                let vals = solvers.iter().map(|s| s.eval(x, t).map(|v| v.0)).collect::<utm_core::Result<Vec<_>>>()?;
                worst = vals.iter().map(|v| (v - vals[0]).norm()).fold(worst, f64::max);
            }
        }
        Ok(worst)
    };
    let params = json!({ "x": xs, "t": times, "delta": deltas, "radius": radii });
    match run() {
        Ok(m) => ctx.record(id, params, m, 1e-7),
        Err(e) => ctx.failed(id, &e, 1e-7),
    }
}

fn contour_samples(ctx: &CheckContext, sign: Sign, n: usize, rng: &mut ChaCha8Rng) -> utm_core::Result<Vec<C64>> {
    let indent = if ctx.fi() { None } else { Some(ctx.indent_radius.unwrap_or(0.25)) };
    let path = build_contour(ctx.problem, sign, 10.0, ContourOptions { indent_radius: indent, ..ContourOptions::default() })?;
    let segs: Vec<_> = path.segments().collect();
    Ok((0..n)
        .map(|_| {
            let s = segs[rng.gen_range(0..segs.len())];
            let (a, b) = s.param_range();
            s.point(a + (b - a) * rng.gen::<f64>())
        })
        .collect())
}

pub fn interior_points(problem: ProblemId) -> Vec<f64> {
    match problem {
        ProblemId::FiniteIntervalKdV => (1..=10).map(|k| k as f64 / 11.0).collect(),
        _ => (1..=10).map(|k| k as f64 * 0.5).collect(),
    }
}

pub fn augeig(ctx: &CheckContext) -> Vec<CheckRecord> {
    let mut out = vec![eigen_relation(ctx)];
    let xs = interior_points(ctx.problem);
    let aopts = AugOptions { radius: ctx.radius, indent_radius: ctx.indent_radius, below_axis: ctx.below_axis, ..AugOptions::default() };
    for sign in [Sign::Plus, Sign::Minus] {
        let id = format!("type2_vanishing_{}", if sign == Sign::Plus { "plus" } else { "minus" });
        let run = || xs.iter().try_fold(0.0f64, |m, &x| Ok::<_, utm_core::UtmError>(m.max(type_ii_vanishing(ctx.problem, &ctx.datum, sign, x, &aopts)?.norm())));
        out.push(match run() {
            Ok(m) => ctx.record(&id, json!({ "x": xs, "radius": ctx.radius, "below_axis": ctx.below_axis }), m, 1e-6),
            Err(e) => ctx.failed(&id, &e, 1e-6),
        });
    }
    let run = || xs.iter().try_fold(0.0f64, |m, &x| {
        Ok::<_, utm_core::UtmError>(m.max(diagonalised_inverse_check(ctx.problem, &ctx.datum, x, transform_options(ctx))?.gap()))
    });
    out.push(match run() {
        Ok(m) => ctx.record("diagonalised_inverse", json!({ "x": xs, "radius": ctx.radius }), m, 1e-5),
        Err(e) => ctx.failed("diagonalised_inverse", &e, 1e-5),
    });
    out.push(type_i_probe(ctx));
    out
}

pub fn eigen_relation(ctx: &CheckContext) -> CheckRecord {
    let id = "eigen_relation";
    let mut rng = ctx.rng(5);
    let mut run = || -> utm_core::Result<f64> {
        let mut worst: f64 = 0.0;
        for sign in [Sign::Plus, Sign::Minus] {
            for z in contour_samples(ctx, sign, 20, &mut rng)? {
                worst = worst.max(eigen_relation_residual(ctx.problem, &ctx.datum, z, sign)?.norm());
            }
        }
        Ok(worst)
    };
    match run() {
        Ok(m) => ctx.record(id, json!({ "samples_per_branch": 20, "max_modulus": 10.0, "seed": ctx.seed }), m, 1e-9),
        Err(e) => ctx.failed(id, &e, 1e-9),
    }
}

pub const PROBE_RADII: [f64; 4] = [20.0, 40.0, 80.0, 160.0];

/// With f'(0) != 0 the magnitude is the largest drop after the first entry
/// (tolerance 0); otherwise it is the largest magnitude (tolerance 1e-8).
pub fn type_i_probe(ctx: &CheckContext) -> CheckRecord {
    let id = "type1_probe";
    let x = 0.3;
    let slope = match ctx.datum.derivative(1, 0.0) {
        Ok(v) => v.norm(),
        Err(e) => return ctx.failed(id, &e, 0.0),
    };
    let growing = slope > 0.0;
    // the lambda term is non-integrable only on a branch through the real axis
    let sign = if growing && !ctx.fi() { Sign::Minus } else { Sign::Plus };
    match type_i_failure_probe(ctx.problem, &ctx.datum, sign, x, &PROBE_RADII) {
        Ok(m) => {
            let params = json!({ "x": x, "branch": sign.to_string(), "radii": PROBE_RADII, "magnitudes": m, "mode": if growing { "growth" } else { "vanishing" } });
            if growing {
                let drop = m[1..].windows(2).map(|w| (w[0] - w[1]).max(0.0)).fold(0.0, f64::max);
                ctx.record(id, params, drop, 0.0)
            } else {
                ctx.record(id, params, m.iter().copied().fold(0.0, f64::max), 1e-8)
            }
        }
        Err(e) => ctx.failed(id, &e, 0.0),
    }
}

pub fn zeros(ctx: &CheckContext) -> Vec<CheckRecord> {
    let radius = 40.0;
    let zs = match find_zeros::<f64>(radius) {
        Ok(z) => z,
        Err(e) => return vec![ctx.failed("zeros_location", &e, 0.0)],
    };
    let mut out = Vec::new();
    let bad = zs
        .iter()
        .filter(|z| {
            let origin_ok = z.region_tag == RegionTag::Origin && z.multiplicity == 2;
            let c = z.location * z.location * z.location;
            !(origin_ok || (c.im > 0.0 && z.location.norm() > 1.0 && z.region_tag != RegionTag::Elsewhere))
        })
        .count();
    let origin = zs.iter().filter(|z| z.region_tag == RegionTag::Origin && z.multiplicity == 2).count();
    out.push(ctx.record(
        "zeros_location",
        json!({ "radius": radius, "zeros": zs.len(), "origin_double": origin == 1 }),
        (bad + (1 - origin.min(1))) as f64,
        0.0,
    ));
    let worst_res = zs.iter().map(|z| z.residual).fold(0.0, f64::max);
    out.push(ctx.record("zeros_residual", json!({ "radius": radius }), worst_res, 1e-10));
    let side = 40.0;
    out.push(match (count_zeros(Rect::new(-side, side, -side, side)), find_zeros::<f64>(side * 2f64.sqrt() + 1.0)) {
        (Ok(c), Ok(wide)) => {
            let inside: usize = wide
                .iter()
                .filter(|z| c.used.re_lo < z.location.re && z.location.re < c.used.re_hi && c.used.im_lo < z.location.im && z.location.im < c.used.im_hi)
                .map(|z| z.multiplicity)
                .sum();
            ctx.record(
                "zeros_count",
                json!({ "box": [-side, side, -side, side], "winding": c.count, "refined": inside, "perturbed": c.perturbed }),
                (c.count as f64 - inside as f64).abs(),
                0.0,
            )
        }
        (Err(e), _) | (_, Err(e)) => ctx.failed("zeros_count", &e, 0.0),
    });
    out.push(ctx.record("zeros_rotation", json!({ "radius": radius }), rotation_defect(&zs), 1e-8));
    let margin = 0.1;
    for (id, delta) in [("zeros_clearance", 0.0), ("zeros_clearance_deformed", default_delta::<f64>())] {
        out.push(match certify_contour_clearance(&zs, radius, margin, delta) {
            Ok(r) => CheckRecord {
                pass: r.pass,
                ..ctx.record(
                    id,
                    json!({ "radius": radius, "margin": margin, "delta": delta, "swept": r.swept.len(), "closest": r.closest }),
                    r.min_distance,
                    margin,
                )
            },
            Err(e) => ctx.failed(id, &e, margin),
        });
    }
    out
}

pub const HEAT_LAMBDAS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
pub const HEAT_TIMES: [f64; 3] = [0.01, 0.1, 0.5];

pub fn heat(ctx: &CheckContext) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let run = || HEAT_LAMBDAS.iter().try_fold(0.0f64, |m, &l| Ok::<_, utm_core::UtmError>(m.max(generalized_eig_check(&ctx.datum, l)?)));
    out.push(match run() {
        Ok(m) => ctx.record("generalized_eig", json!({ "lambda": HEAT_LAMBDAS }), m, 1e-10),
        Err(e) => ctx.failed("generalized_eig", &e, 1e-10),
    });
    let xs: Vec<f64> = (0..40).map(|k| 0.1 + 3.9 * k as f64 / 39.0).collect();
    let opts = HeatOptions::default();
    let run = || -> utm_core::Result<f64> {
        let mut worst: f64 = 0.0;
        for &t in &HEAT_TIMES {
            for &x in &xs {
                let (v, _) = solve_heat_sine(&ctx.datum, x, t, &opts)?;
                worst = worst.max((v.re - heat_image_solution(&ctx.datum, x, t)?).abs().max(v.im.abs()));
            }
        }
        Ok(worst)
    };
    out.push(match run() {
        Ok(m) => ctx.record("image_oracle", json!({ "x_min": 0.1, "x_max": 4.0, "points": xs.len(), "t": HEAT_TIMES }), m, 1e-6),
        Err(e) => ctx.failed("image_oracle", &e, 1e-6),
    });
    out
}
