use std::sync::Arc;

use crate::contour::{integrate, ContourPath, IntegrateOptions, PhaseHint, Segment, TailPolicy};
use crate::datum::{check_compatibility, Domain, InitialDatum, ProblemId};
use crate::error::{Result, UtmError};
use crate::quadrature::adaptive;
use crate::scalar::{i_unit, re, two_pi, Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatOptions<T: Real> {
    pub abs_tol: T,
    pub radius: T,
    pub max_tail_radius: T,
}

impl<T: Real> Default for HeatOptions<T> {
    fn default() -> Self {
        HeatOptions { abs_tol: T::lit(1e-11), radius: T::lit(60.0), max_tail_radius: T::lit(1e7) }
    }
}

/// `F_lambda(f) = (1/2 pi) int_0^inf sin(lambda y) f(y) dy` for real lambda.
pub fn heat_sine_transform<T: Real>(f: &InitialDatum<T>, lambda: T) -> Result<Cx<T>> {
    let zero = re(T::zero());
    let s = if f.has_closed_form() {
        let plus = f.transform_scaled(re(lambda), zero)?;
        let minus = f.transform_scaled(re(-lambda), zero)?;
        (minus - plus) / (i_unit::<T>() * T::lit(2.0))
    } else {
        sine_quadrature(f, lambda, |y| Ok(f.value(y)))?
    };
    Ok(s / two_pi::<T>())
}

fn sine_quadrature<T: Real>(f: &InitialDatum<T>, lambda: T, g: impl Fn(T) -> Result<Cx<T>>) -> Result<Cx<T>> {
    let end = T::lit(60.0) / f.decay_rate().unwrap_or(T::one());
    let n = ((lambda.abs() * end).ceil().to_usize().unwrap_or(1)).clamp(64, 200_000);
    let h = end / T::lit(n as f64);
    let panels: Vec<(T, T)> = (0..n).map(|k| (h * T::lit(k as f64), h * T::lit((k + 1) as f64))).collect();
    let mut integrand = |y: T| Ok(g(y)? * (lambda * y).sin());
    Ok(adaptive(&mut integrand, &panels, T::lit(1e-15), T::lit(1e-14), 400_000)?.value)
}

/// `q(x, t) = 4 int_0^inf sin(lambda x) e^{-lambda^2 t} F_lambda(q0) d lambda`
/// for the Dirichlet heat problem on the half-line; returns the value and
/// its error estimate.
pub fn solve_heat_sine<T: Real>(f: &Arc<InitialDatum<T>>, x: T, t: T, opts: &HeatOptions<T>) -> Result<(Cx<T>, T)> {
    let compat = check_compatibility(f.as_ref(), ProblemId::HalfLineHeat, T::lit(1e-12))?;
    if !compat.passed {
        return Err(UtmError::Incompatible(format!("{} has f(0) != 0", f.label())));
    }
    if t < T::zero() {
        return Err(UtmError::Unsupported("t must be nonnegative".into()));
    }
    if x == T::zero() {
        return Ok((re(T::zero()), T::zero()));
    }
    let path = ContourPath::from_segments(
        vec![vec![Segment::Ray { base: re(T::zero()), angle: T::zero(), from: T::zero(), to: opts.radius, infinite: true }]],
        opts.radius,
    );
    let iopts = IntegrateOptions {
        abs_tol: opts.abs_tol,
        phase: PhaseHint { x, t: T::zero() },
        extra_frequency: T::zero(),
        tail: TailPolicy::Extend { max_radius: opts.max_tail_radius },
        ..IntegrateOptions::default()
    };
    let r = integrate(
        &path,
        |z| {
            let l = z.re;
            Ok(heat_sine_transform(f, l)? * ((l * x).sin() * (-l * l * t).exp() * T::lit(4.0)))
        },
        &iopts,
    )?;
    if !r.converged {
        return Err(UtmError::Unsupported(format!("heat quadrature did not converge (tail {:e})", r.tail_bound.as_f64())));
    }
    Ok((r.value, r.abs_error_estimate + r.tail_bound))
}

/// `|F_lambda(-f'') - lambda^2 F_lambda(f)|` with both transforms by quadrature.
pub fn generalized_eig_check<T: Real>(f: &InitialDatum<T>, lambda: T) -> Result<T> {
    if f.domain() != Domain::HalfLine {
        return Err(UtmError::DomainMismatch { datum: f.domain().to_string(), problem: Domain::HalfLine.to_string() });
    }
    f.derivative(2, T::zero())?;
    let lhs = sine_quadrature(f, lambda, |y| Ok(-f.derivative(2, y)?))?;
    let rhs = sine_quadrature(f, lambda, |y| Ok(f.value(y)))?;
    Ok(((lhs - rhs * (lambda * lambda)) / two_pi::<T>()).norm())
}

/// Method-of-images solution `int_0^inf [G(x-y,t) - G(x+y,t)] q0(y) dy` with
/// the Gaussian heat kernel, by adaptive quadrature split at the peak.
pub fn heat_image_solution<T: Real>(f: &InitialDatum<T>, x: T, t: T) -> Result<T> {
    if t <= T::zero() {
        return Ok(f.value(x).re);
    }
    let four_t = T::lit(4.0) * t;
    let norm = (T::PI() * four_t).sqrt();
    let g = |z: T| (-(z * z) / four_t).exp() / norm;
    let w = T::lit(12.0) * t.sqrt();
    let end = x + w + T::lit(60.0) / f.decay_rate().unwrap_or(T::one());
    let mut cuts = vec![T::zero(), (x - w).max(T::zero()), x, x + w, end];
    cuts.dedup_by(|a, b| (*a - *b).abs() < T::lit(1e-14));
    let panels: Vec<(T, T)> = cuts
        .windows(2)
        .flat_map(|c| {
            let h = (c[1] - c[0]) / T::lit(16.0);
            (0..16).map(move |k| (c[0] + h * T::lit(k as f64), c[0] + h * T::lit((k + 1) as f64)))
        })
        .collect();
    let mut integrand = |y: T| Ok(f.value(y) * (g(x - y) - g(x + y)));
    Ok(adaptive(&mut integrand, &panels, T::lit(1e-14), T::lit(1e-13), 200_000)?.value.re)
}
