//! Forward transform F_lambda, inverse contour integral f_x, spectral data on
//! a shared node schedule, and the inversion check.

use std::sync::Arc;

use serde::Serialize;

use crate::contour::{build_contour, initial_panels, ContourOptions, ContourPath, IntegrateOptions, PhaseHint, Segment};
use crate::datum::{check_compatibility, Domain, InitialDatum, ProblemId};
use crate::error::{Result, UtmError};
use crate::quadrature::{adaptive, gk21_nodes};
use crate::scalar::{i_unit, re, Cx, Real};
use crate::spectral::{Sign, SpectralContext};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformOptions<T: Real> {
    pub radius: T,
    /// Half-line Gamma^- indentation; defaults to half the datum's decay rate.
    pub indent_radius: Option<T>,
    pub below_axis: bool,
    pub nodes_per_wavelength: T,
    /// Target for the estimated contribution of the ray tails beyond the last node.
    pub tail_tol: T,
    pub max_tail_radius: T,
    /// Per-panel Kronrod-Gauss tolerance when refining the node schedule.
    pub panel_tol: T,
}

impl<T: Real> Default for TransformOptions<T> {
    fn default() -> Self {
        TransformOptions {
            radius: T::lit(60.0),
            indent_radius: None,
            below_axis: false,
            nodes_per_wavelength: T::lit(8.0),
            tail_tol: T::lit(1e-9),
            max_tail_radius: T::lit(2e5),
            panel_tol: T::lit(1e-12),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TransformPair<T: Real> {
    pub problem: ProblemId,
    pub gamma_plus: ContourPath<T>,
    pub gamma_minus: ContourPath<T>,
    pub options: TransformOptions<T>,
}

/// One quadrature node of the inverse transform with its sampled value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralNode<T: Real> {
    pub contour: Sign,
    pub panel: usize,
    pub lambda: Cx<T>,
    /// Kronrod weight including d(lambda)/ds and orientation.
    pub weight: Cx<T>,
    /// Embedded Gauss weight (zero on Kronrod-only nodes).
    pub gauss_weight: Cx<T>,
    pub value: Cx<T>,
}

#[derive(Debug, Clone)]
pub struct SpectralData<T: Real> {
    pub problem: ProblemId,
    pub nodes: Vec<SpectralNode<T>>,
    pub x_range: (T, T),
    /// Estimated contribution of the discarded ray tails.
    pub tail_estimate: T,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InverseValue<T: Real> {
    pub value: Cx<T>,
    pub error_estimate: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InversionReport {
    pub points: Vec<InversionPoint>,
    pub sup_error: f64,
    pub tolerance: f64,
    pub nodes: usize,
    pub tail_estimate: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InversionPoint {
    pub x: f64,
    pub reconstructed: (f64, f64),
    pub exact: (f64, f64),
    pub error: f64,
}

fn exp_times<T: Real>(z: Cx<T>, v: Cx<T>) -> Cx<T> {
    // e^z v without overflow when e^z is huge and v tiny.
    if v.re == T::zero() && v.im == T::zero() {
        return v;
    }
    if z.re.abs() < T::lit(300.0) {
        z.exp() * v
    } else {
        (z + v.ln()).exp()
    }
}

impl<T: Real> TransformPair<T> {
    pub fn new(problem: ProblemId, options: TransformOptions<T>) -> Result<Self> {
        let copts = ContourOptions {
            indent_radius: options.indent_radius,
            below_axis: options.below_axis,
            nodes_per_wavelength: options.nodes_per_wavelength,
        };
        Ok(TransformPair {
            problem,
            gamma_plus: build_contour(problem, Sign::Plus, options.radius, copts)?,
            gamma_minus: build_contour(problem, Sign::Minus, options.radius, copts)?,
            options,
        })
    }

    /// Pair whose half-line indentation defaults to half the datum's decay rate.
    pub fn for_datum(problem: ProblemId, f: &InitialDatum<T>, mut options: TransformOptions<T>) -> Result<Self> {
        if options.indent_radius.is_none() && problem == ProblemId::HalfLineKdV {
            let eps = f.decay_rate().unwrap_or(T::one());
            options.indent_radius = Some((eps / T::lit(2.0)).min(T::lit(0.5)));
        }
        if let (Some(r), Some(eps)) = (options.indent_radius, f.decay_rate()) {
            if problem == ProblemId::HalfLineKdV && r >= eps {
                return Err(UtmError::InvalidContour(format!("indentation radius {r} must be below the decay rate {eps}")));
            }
        }
        Self::new(problem, options)
    }

    pub fn path(&self, sign: Sign) -> &ContourPath<T> {
        match sign {
            Sign::Plus => &self.gamma_plus,
            Sign::Minus => &self.gamma_minus,
        }
    }

    pub fn context(&self, f: &Arc<InitialDatum<T>>) -> Result<SpectralContext<T>> {
        SpectralContext::new(self.problem, f.clone())
    }

    /// F^{sign}_lambda(f) through the zeta/Delta representation.
    pub fn forward(&self, f: &Arc<InitialDatum<T>>, lambda: Cx<T>, sign: Sign) -> Result<Cx<T>> {
        self.context(f)?.forward(sign, lambda)
    }

    /// F^{sign}_lambda(f) by direct quadrature of the kernel against f.
    pub fn forward_by_kernel_quadrature(&self, f: &Arc<InitialDatum<T>>, lambda: Cx<T>, sign: Sign) -> Result<Cx<T>> {
        let ctx = self.context(f)?;
        let end = match f.domain() {
            Domain::UnitInterval => T::one(),
            Domain::HalfLine => {
                let eps = f.decay_rate().unwrap_or(T::one());
                let a = crate::scalar::alpha::<T>();
                let growth = lambda.im.max((a * lambda).im).max((a * a * lambda).im);
                if growth >= eps {
                    return Err(UtmError::TransformUndefined { re: lambda.re.as_f64(), im: lambda.im.as_f64(), epsilon: eps.as_f64() });
                }
                T::lit(40.0) / (eps - growth)
            }
        };
        let waves = (lambda.norm() * end).ceil().max(T::one()).to_usize().unwrap_or(1).min(100_000);
        let h = end / T::lit(waves as f64);
        let panels: Vec<(T, T)> = (0..waves).map(|k| (h * T::lit(k as f64), h * T::lit((k + 1) as f64))).collect();
        let mut g = |x: T| Ok(ctx.kernel_phi(sign, x, lambda)? * f.value(x));
        Ok(adaptive(&mut g, &panels, T::lit(1e-14), T::lit(1e-13), 100_000)?.value)
    }

    fn rate_floor(&self, x_range: (T, T)) -> T {
        let floor = x_range.0.max(T::lit(1e-3));
        match self.problem {
            ProblemId::FiniteIntervalKdV => floor.min((T::one() - x_range.1).max(T::lit(1e-3))),
            _ => floor,
        }
    }

    /// Samples F on the inverse-transform nodes. The schedule resolves
    /// `e^{i lambda x} F(lambda)` for x across `x_range` and continues every
    /// ray past the truncation radius until the estimated tail is below
    /// `tail_tol`.
    pub fn spectral_data(&self, f: &Arc<InitialDatum<T>>, x_range: (T, T)) -> Result<SpectralData<T>> {
        let ctx = self.context(f)?;
        let mut eval = |sign: Sign, z: Cx<T>| ctx.forward(sign, z);
        self.build_spectral_data(&mut eval, x_range)
    }

    fn build_spectral_data<F>(&self, eval: &mut F, x_range: (T, T)) -> Result<SpectralData<T>>
    where
        F: FnMut(Sign, Cx<T>) -> Result<Cx<T>>,
    {
        let (x_lo, x_hi) = x_range;
        let xs = [x_lo, (x_lo + x_hi) / T::lit(2.0), x_hi];
        let rate = self.rate_floor(x_range);
        let opts = IntegrateOptions {
            phase: PhaseHint { x: x_hi.abs().max(x_lo.abs()), t: T::zero() },
            extra_frequency: T::one(),
            ..IntegrateOptions::default()
        };
        let mut nodes = Vec::new();
        let mut panel_id = 0;
        let mut tail_estimate = T::zero();
        let mut converged = true;
        for sign in [Sign::Plus, Sign::Minus] {
            let path = self.path(sign);
            for seg in path.segments() {
                let (s0, s1) = seg.param_range();
                let orient = if s1 >= s0 { T::one() } else { -T::one() };
                let (lo, hi) = (s0.min(s1), s0.max(s1));
                let add = |a: T, b: T, nodes: &mut Vec<SpectralNode<T>>, panel_id: &mut usize, eval: &mut F| -> Result<bool> {
                    let panels = initial_panels(seg, a, b, path.nodes_per_wavelength, &opts);
                    let mut ok = true;
                    for (pa, pb) in panels {
                        ok &= self.refine_panel(seg, sign, pa, pb, orient, &xs, eval, nodes, panel_id, 0)?;
                    }
                    Ok(ok)
                };
                converged &= add(lo, hi, &mut nodes, &mut panel_id, eval)?;
                if let Segment::Ray { infinite: true, .. } = seg {
                    let mut rho = hi;
                    loop {
                        let z = seg.point(rho);
                        let fz = eval(sign, z)?;
                        let env = xs.iter().map(|&x| exp_times(i_unit::<T>() * z * x, fz).norm()).fold(T::zero(), T::max);
                        let remainder = env / rate;
                        if remainder <= self.options.tail_tol {
                            tail_estimate = tail_estimate + remainder;
                            break;
                        }
                        if rho >= self.options.max_tail_radius {
                            tail_estimate = tail_estimate + remainder;
                            converged = false;
                            break;
                        }
                        let next = (rho * T::lit(1.5)).min(self.options.max_tail_radius);
                        converged &= add(rho, next, &mut nodes, &mut panel_id, eval)?;
                        rho = next;
                    }
                }
            }
        }
        Ok(SpectralData { problem: self.problem, nodes, x_range, tail_estimate, converged })
    }

    #[allow(clippy::too_many_arguments)]
    fn refine_panel<F>(
        &self,
        seg: &Segment<T>,
        sign: Sign,
        a: T,
        b: T,
        orient: T,
        xs: &[T],
        eval: &mut F,
        nodes: &mut Vec<SpectralNode<T>>,
        panel_id: &mut usize,
        depth: usize,
    ) -> Result<bool>
    where
        F: FnMut(Sign, Cx<T>) -> Result<Cx<T>>,
    {
        let half = (b - a) / T::lit(2.0);
        let mid = (a + b) / T::lit(2.0);
        let mut local = Vec::with_capacity(21);
        for (u, wk, wg) in gk21_nodes() {
            let s = mid + half * T::lit(u);
            let z = seg.point(s);
            let jac = seg.tangent(s) * half * orient;
            let v = eval(sign, z)?;
            local.push(SpectralNode {
                contour: sign,
                panel: 0,
                lambda: z,
                weight: jac * T::lit(wk),
                gauss_weight: jac * T::lit(wg),
                value: v,
            });
        }
        let err = xs
            .iter()
            .map(|&x| panel_error(&local, x))
            .fold(T::zero(), T::max);
        if err > self.options.panel_tol && depth < 30 && half > T::lit(1e-12) {
            let ok1 = self.refine_panel(seg, sign, a, mid, orient, xs, eval, nodes, panel_id, depth + 1)?;
            let ok2 = self.refine_panel(seg, sign, mid, b, orient, xs, eval, nodes, panel_id, depth + 1)?;
            return Ok(ok1 && ok2);
        }
        for mut n in local {
            n.panel = *panel_id;
            nodes.push(n);
        }
        *panel_id += 1;
        Ok(err <= self.options.panel_tol)
    }

    /// `{int_{Gamma+} + int_{Gamma-}} e^{i lambda x} F(lambda) d lambda`.
    pub fn inverse(&self, data: &SpectralData<T>, x: T) -> InverseValue<T> {
        self.inverse_weighted(data, x, |_| re(T::one()))
    }

    /// Inverse of `w(lambda) F(lambda)` on the same nodes.
    pub fn inverse_weighted(&self, data: &SpectralData<T>, x: T, w: impl Fn(Cx<T>) -> Cx<T>) -> InverseValue<T> {
        let i = i_unit::<T>();
        let mut value = re(T::zero());
        let mut error = T::zero();
        let mut panel_k = re(T::zero());
        let mut panel_g = re(T::zero());
        let mut current = None;
        for n in &data.nodes {
            if current != Some(n.panel) {
                error = error + (panel_k - panel_g).norm();
                panel_k = re(T::zero());
                panel_g = re(T::zero());
                current = Some(n.panel);
            }
            let g = exp_times(i * n.lambda * x, n.value * w(n.lambda));
            value = value + g * n.weight;
            panel_k = panel_k + g * n.weight;
            panel_g = panel_g + g * n.gauss_weight;
        }
        error = error + (panel_k - panel_g).norm() + data.tail_estimate;
        InverseValue { value, error_estimate: error }
    }

    /// Re-samples another datum's transform on the nodes of `data`.
    pub fn resample(&self, data: &SpectralData<T>, f: &Arc<InitialDatum<T>>) -> Result<SpectralData<T>> {
        let ctx = self.context(f)?;
        let nodes = data
            .nodes
            .iter()
            .map(|n| Ok(SpectralNode { value: ctx.forward(n.contour, n.lambda)?, ..*n }))
            .collect::<Result<Vec<_>>>()?;
        Ok(SpectralData { nodes, ..data.clone() })
    }

    /// Sup-norm inversion error of `f` over `grid`; requires compatibility.
    pub fn verify_inversion(&self, f: &Arc<InitialDatum<T>>, grid: &[T], tol: T) -> Result<InversionReport> {
        let compat = check_compatibility(f.as_ref(), self.problem, T::lit(1e-12))?;
        if !compat.passed {
            return Err(UtmError::Incompatible(format!("{} fails {:?}", f.label(), compat.satisfied)));
        }
        if grid.is_empty() {
            return Err(UtmError::GridTooCoarse("empty grid".into()));
        }
        let lo = grid.iter().copied().fold(T::infinity(), T::min);
        let hi = grid.iter().copied().fold(T::neg_infinity(), T::max);
        let data = self.spectral_data(f, (lo, hi))?;
        let mut points = Vec::with_capacity(grid.len());
        let mut sup = 0.0f64;
        for &x in grid {
            let r = self.inverse(&data, x).value;
            let e = f.value(x);
            let err = (r - e).norm().as_f64();
            sup = sup.max(err);
            points.push(InversionPoint { x: x.as_f64(), reconstructed: (r.re.as_f64(), r.im.as_f64()), exact: (e.re.as_f64(), e.im.as_f64()), error: err });
        }
        Ok(InversionReport {
            points,
            sup_error: sup,
            tolerance: tol.as_f64(),
            nodes: data.nodes.len(),
            tail_estimate: data.tail_estimate.as_f64(),
            pass: sup <= tol.as_f64() && data.converged,
        })
    }
}

fn panel_error<T: Real>(nodes: &[SpectralNode<T>], x: T) -> T {
    let i = i_unit::<T>();
    let mut k = re(T::zero());
    let mut g = re(T::zero());
    for n in nodes {
        let v = exp_times(i * n.lambda * x, n.value);
        k = k + v * n.weight;
        g = g + v * n.gauss_weight;
    }
    (k - g).norm()
}

/// Classical Fourier inversion `(1/2 pi) int_R e^{i lambda x} q0_hat(lambda) d lambda`
/// along the real axis, the reduced form of the inverse on the deformation contour.
pub fn real_axis_fourier_inversion<T: Real>(f: &Arc<InitialDatum<T>>, x: T, tol: T) -> Result<crate::contour::QuadratureResult<T>> {
    use crate::contour::{integrate, TailPolicy};
    let zero = re(T::zero());
    let path = ContourPath::from_segments(
        vec![vec![
            Segment::Ray { base: zero, angle: T::PI(), from: T::lit(60.0), to: T::zero(), infinite: true },
            Segment::Ray { base: zero, angle: T::zero(), from: T::zero(), to: T::lit(60.0), infinite: true },
        ]],
        T::lit(60.0),
    );
    let i = i_unit::<T>();
    let opts = IntegrateOptions {
        abs_tol: tol,
        phase: PhaseHint { x, t: T::zero() },
        tail: TailPolicy::Extend { max_radius: T::lit(1e7) },
        ..IntegrateOptions::default()
    };
    let tp = crate::scalar::two_pi::<T>();
    integrate(&path, |z| Ok((i * z * x).exp() * f.transform_scaled(z, re(T::zero()))? / tp), &opts)
}
