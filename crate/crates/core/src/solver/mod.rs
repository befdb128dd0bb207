//! Solutions q(x, t) from the contour-integral representations, the PDE
//! residual check, and the half-line heat baseline.

mod heat;

use std::sync::Arc;

use serde::Serialize;

pub use heat::{generalized_eig_check, heat_image_solution, heat_sine_transform, solve_heat_sine, HeatOptions};

use crate::contour::{build_contour_deformed, integrate, ContourOptions, ContourPath, IntegrateOptions, PhaseHint, TailPolicy};
use crate::datum::{check_compatibility, InitialDatum, ProblemId};
use crate::error::{Result, UtmError};
use crate::scalar::{i_unit, Cx, Real};
use crate::spectral::{Sign, SpectralContext};
use crate::transform::{TransformOptions, TransformPair};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions<T: Real> {
    pub radius: T,
    /// Ray rotation for t > 0; `None` picks pi/24 when the datum allows it.
    pub delta: Option<T>,
    pub indent_radius: Option<T>,
    pub abs_tol: T,
    pub max_tail_radius: T,
    pub nodes_per_wavelength: T,
    /// Options for the t = 0 column, which goes through the transform pair.
    pub transform: TransformOptions<T>,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        SolverOptions {
            radius: T::lit(40.0),
            delta: None,
            indent_radius: None,
            abs_tol: T::lit(1e-11),
            max_tail_radius: T::lit(1e4),
            nodes_per_wavelength: T::lit(8.0),
            transform: TransformOptions::default(),
        }
    }
}

pub fn default_delta<T: Real>() -> T {
    T::PI() / T::lit(24.0)
}

#[derive(Debug, Clone)]
pub struct SolutionQuery<T: Real> {
    pub problem: ProblemId,
    pub datum: Arc<InitialDatum<T>>,
    pub x_grid: Vec<T>,
    pub t_grid: Vec<T>,
    pub horizon: T,
    pub options: SolverOptions<T>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionField<T: Real> {
    pub x_grid: Vec<T>,
    pub t_grid: Vec<T>,
    /// `values[i][j]` is q(x_i, t_j).
    pub values: Vec<Vec<Cx<T>>>,
    pub errors: Vec<Vec<T>>,
    /// Grid indices whose quadrature did not meet tolerance.
    pub flagged: Vec<(usize, usize)>,
    pub delta: T,
}

impl<T: Real> SolutionField<T> {
    pub fn max_imag(&self) -> T {
        self.values.iter().flatten().map(|v| v.im.abs()).fold(T::zero(), T::max)
    }
}

/// Per-problem evaluator for t > 0 on fixed (possibly deformed) contours.
#[derive(Debug, Clone)]
pub struct PointSolver<T: Real> {
    ctx: SpectralContext<T>,
    paths: [ContourPath<T>; 2],
    opts: SolverOptions<T>,
    pub delta: T,
    rotate: bool,
}

impl<T: Real> PointSolver<T> {
    pub fn new(problem: ProblemId, datum: Arc<InitialDatum<T>>, opts: SolverOptions<T>) -> Result<Self> {
        let hl = problem == ProblemId::HalfLineKdV;
        let delta = match opts.delta {
            Some(d) => d,
            None if hl && !datum.supports_continuation() => T::zero(),
            None => default_delta(),
        };
        let rotate = !hl || datum.supports_continuation();
        let ctx = SpectralContext::new(problem, datum.clone())?.with_continuation(hl && rotate)?;
        let indent = match opts.indent_radius {
            Some(r) => Some(r),
            None if hl => Some((datum.decay_rate().unwrap_or(T::one()) / T::lit(2.0)).min(T::lit(0.5))),
            None => None,
        };
        let copts = ContourOptions { indent_radius: indent, below_axis: false, nodes_per_wavelength: opts.nodes_per_wavelength };
        let paths = [
            build_contour_deformed(problem, Sign::Plus, opts.radius, copts, delta)?,
            build_contour_deformed(problem, Sign::Minus, opts.radius, copts, delta)?,
        ];
        Ok(PointSolver { ctx, paths, opts, delta, rotate })
    }

    /// q(x, t) for t > 0 with its error estimate and convergence flag.
    pub fn eval(&self, x: T, t: T) -> Result<(Cx<T>, T, bool)> {
        let i = i_unit::<T>();
        let tail = if self.delta > T::zero() {
            TailPolicy::Truncate
        } else if self.rotate {
            TailPolicy::Rotate { angle: default_delta(), max_radius: self.opts.max_tail_radius }
        } else {
            TailPolicy::Extend { max_radius: self.opts.max_tail_radius }
        };
        let iopts = IntegrateOptions {
            abs_tol: self.opts.abs_tol,
            phase: PhaseHint { x, t },
            tail,
            ..IntegrateOptions::default()
        };
        let mut total = Cx::new(T::zero(), T::zero());
        let mut err = T::zero();
        let mut ok = true;
        for (k, sign) in [Sign::Plus, Sign::Minus].into_iter().enumerate() {
            let r = integrate(
                &self.paths[k],
                |z| self.ctx.forward_weighted(sign, z, i * z * x + i * z * z * z * t),
                &iopts,
            )?;
            total = total + r.value;
            err = err + r.abs_error_estimate + r.tail_bound;
            ok &= r.converged;
        }
        Ok((total, err, ok))
    }
}

pub fn solve_utm<T: Real>(query: &SolutionQuery<T>) -> Result<SolutionField<T>> {
    let compat = check_compatibility(query.datum.as_ref(), query.problem, T::lit(1e-12))?;
    if !compat.passed {
        return Err(UtmError::Incompatible(format!("{} fails {:?}", query.datum.label(), compat.satisfied)));
    }
    if query.t_grid.iter().any(|&t| t < T::zero() || t > query.horizon) {
        return Err(UtmError::Unsupported("every t must lie in [0, T]".into()));
    }
    let domain_hi = if query.problem == ProblemId::FiniteIntervalKdV { T::one() } else { T::infinity() };
    if query.x_grid.iter().any(|&x| x < T::zero() || x > domain_hi) {
        return Err(UtmError::Unsupported("x outside the spatial domain".into()));
    }
    let nx = query.x_grid.len();
    let nt = query.t_grid.len();
    let mut values = vec![vec![Cx::new(T::zero(), T::zero()); nt]; nx];
    let mut errors = vec![vec![T::zero(); nt]; nx];
    let mut flagged = Vec::new();

    let needs_initial = query.t_grid.iter().any(|&t| t == T::zero());
    if needs_initial && nx > 0 {
        let mut topts = query.options.transform;
        topts.indent_radius = topts.indent_radius.or(query.options.indent_radius);
        let pair = TransformPair::for_datum(query.problem, &query.datum, topts)?;
        let lo = query.x_grid.iter().copied().fold(T::infinity(), T::min);
        let hi = query.x_grid.iter().copied().fold(T::neg_infinity(), T::max);
        let data = pair.spectral_data(&query.datum, (lo, hi))?;
        for (j, &t) in query.t_grid.iter().enumerate() {
            if t != T::zero() {
                continue;
            }
            for (i, &x) in query.x_grid.iter().enumerate() {
                let v = pair.inverse(&data, x);
                values[i][j] = v.value;
                errors[i][j] = v.error_estimate;
                if !data.converged {
                    flagged.push((i, j));
                }
            }
        }
    }
    let solver = PointSolver::new(query.problem, query.datum.clone(), query.options)?;
    for (j, &t) in query.t_grid.iter().enumerate() {
        if t == T::zero() {
            continue;
        }
        for (i, &x) in query.x_grid.iter().enumerate() {
            let (v, e, ok) = solver.eval(x, t)?;
            values[i][j] = v;
            errors[i][j] = e;
            if !ok {
                flagged.push((i, j));
            }
        }
    }
    Ok(SolutionField { x_grid: query.x_grid.clone(), t_grid: query.t_grid.clone(), values, errors, flagged, delta: solver.delta })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max_residual: f64,
    pub at: (f64, f64),
    pub points_checked: usize,
}

fn uniform_step<T: Real>(grid: &[T], h: T, what: &str) -> Result<()> {
    for w in grid.windows(2) {
        if ((w[1] - w[0]) - h).abs() > T::lit(1e-9) * h.abs().max(T::one()) {
            return Err(UtmError::GridTooCoarse(format!("{what} grid is not uniform with step {h}")));
        }
    }
    Ok(())
}

/// Third derivative from the 4th-order central stencil over x - 3h .. x + 3h.
pub fn central_third_derivative<T: Real>(q: [Cx<T>; 7], h: T) -> Cx<T> {
    let c = [-1.0, 8.0, -13.0, 0.0, 13.0, -8.0, 1.0];
    let mut acc = Cx::new(T::zero(), T::zero());
    for k in 0..7 {
        // q[k] sits at x + (k - 3) h; coefficients run from x - 3h upward
        acc = acc + q[k] * T::lit(c[6 - k]);
    }
    acc / (T::lit(8.0) * h * h * h)
}

/// First derivative at x from samples q(x), q(x - h), ..., q(x - 4h).
pub fn backward_first_derivative<T: Real>(q: [Cx<T>; 5], h: T) -> Cx<T> {
    (q[0] * T::lit(25.0) - q[1] * T::lit(48.0) + q[2] * T::lit(36.0) - q[3] * T::lit(16.0) + q[4] * T::lit(3.0))
        / (T::lit(12.0) * h)
}

/// max |q_t + q_xxx| over interior stencil points of a uniform field.
pub fn residual_check<T: Real>(field: &SolutionField<T>, h_x: T, h_t: T) -> Result<ResidualReport> {
    let nx = field.x_grid.len();
    let nt = field.t_grid.len();
    if nx < 7 || nt < 3 {
        return Err(UtmError::GridTooCoarse(format!("need at least 7 x points and 3 t points, got {nx} and {nt}")));
    }
    uniform_step(&field.x_grid, h_x, "x")?;
    uniform_step(&field.t_grid, h_t, "t")?;
    let q = &field.values;
    let mut worst = (0.0f64, (0.0, 0.0));
    let mut count = 0;
    for i in 3..nx - 3 {
        for j in 1..nt - 1 {
            let qt = (q[i][j + 1] - q[i][j - 1]) / (T::lit(2.0) * h_t);
            let col = [q[i - 3][j], q[i - 2][j], q[i - 1][j], q[i][j], q[i + 1][j], q[i + 2][j], q[i + 3][j]];
            let r = (qt + central_third_derivative(col, h_x)).norm().as_f64();
            count += 1;
            if r > worst.0 {
                worst = (r, (field.x_grid[i].as_f64(), field.t_grid[j].as_f64()));
            }
        }
    }
    Ok(ResidualReport { max_residual: worst.0, at: worst.1, points_checked: count })
}

/// Same residual as [`residual_check`] evaluated only at the given stencil
/// centres, so sparse spot checks keep the full-resolution steps.
pub fn residual_at_centers<T: Real>(solver: &PointSolver<T>, xs: &[T], ts: &[T], h_x: T, h_t: T) -> Result<ResidualReport> {
    let mut worst = (0.0f64, (0.0, 0.0));
    for &x in xs {
        if x - T::lit(3.0) * h_x < T::zero() {
            return Err(UtmError::GridTooCoarse(format!("stencil at x = {x} leaves the domain")));
        }
        for &t in ts {
            if t - h_t <= T::zero() {
                return Err(UtmError::GridTooCoarse(format!("stencil at t = {t} reaches t = 0")));
            }
            let mut vals = [Cx::new(T::zero(), T::zero()); 7];
            for (k, v) in vals.iter_mut().enumerate() {
                *v = solver.eval(x + T::lit(k as f64 - 3.0) * h_x, t)?.0;
            }
            let qt = (solver.eval(x, t + h_t)?.0 - solver.eval(x, t - h_t)?.0) / (T::lit(2.0) * h_t);
            let r = (qt + central_third_derivative(vals, h_x)).norm().as_f64();
            if r > worst.0 {
                worst = (r, (x.as_f64(), t.as_f64()));
            }
        }
    }
    Ok(ResidualReport { max_residual: worst.0, at: worst.1, points_checked: xs.len() * ts.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::re;

    fn field(xs: Vec<f64>, ts: Vec<f64>, q: impl Fn(f64, f64) -> f64) -> SolutionField<f64> {
        let values = xs.iter().map(|&x| ts.iter().map(|&t| re(q(x, t))).collect()).collect();
        let errors = vec![vec![0.0; ts.len()]; xs.len()];
        SolutionField { x_grid: xs, t_grid: ts, values, errors, flagged: vec![], delta: 0.0 }
    }

    #[test]
    fn residual_of_trivial_fields() {
        let xs: Vec<f64> = (0..10).map(|k| k as f64 * 0.1).collect();
        let ts: Vec<f64> = (0..5).map(|k| k as f64 * 0.01).collect();
        assert_eq!(residual_check(&field(xs.clone(), ts.clone(), |_, _| 0.0), 0.1, 0.01).unwrap().max_residual, 0.0);
        assert!(residual_check(&field(xs.clone(), ts.clone(), |x, _| x), 0.1, 0.01).unwrap().max_residual < 1e-12);
        // x^3 - 6t solves q_t + q_xxx = 0 exactly
        let r = residual_check(&field(xs.clone(), ts.clone(), |x, t| x * x * x - 6.0 * t), 0.1, 0.01).unwrap();
        assert!(r.max_residual < 1e-9);
        assert!(matches!(residual_check(&field(xs[..5].to_vec(), ts, |_, _| 0.0), 0.1, 0.01), Err(UtmError::GridTooCoarse(_))));
    }

    #[test]
    fn stencils_are_exact_on_low_degree_polynomials() {
        let h = 0.05;
        let x0 = 0.4;
        let p = |x: f64| 2.0 * x.powi(5) - x.powi(3) + 0.5;
        let col: [Cx<f64>; 7] = std::array::from_fn(|k| re(p(x0 + (k as f64 - 3.0) * h)));
        let exact = 120.0 * x0 * x0 - 6.0;
        assert!((central_third_derivative(col, h).re - exact).abs() < 1e-9);
        let q: [Cx<f64>; 5] = std::array::from_fn(|k| re((x0 - k as f64 * h).powi(4)));
        assert!((backward_first_derivative(q, h).re - 4.0 * x0.powi(3)).abs() < 1e-12);
    }
}
