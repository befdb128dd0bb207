//! Oriented contours Gamma^{+-}, their numerical deformations, and adaptive
//! integration along them.

use serde::Serialize;

use crate::datum::ProblemId;
use crate::error::{Result, UtmError};
use crate::quadrature::adaptive;
use crate::scalar::{cis, i_unit, is_finite, re, two_pi, Cx, Real};
use crate::spectral::Sign;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment<T: Real> {
    /// `base + rho e^{i angle}` for rho running from `from` to `to`. When
    /// `infinite` is set the far end continues to infinity.
    Ray { base: Cx<T>, angle: T, from: T, to: T, infinite: bool },
    /// `center + radius e^{i phi}` for phi running from `start` to `end`.
    Arc { center: Cx<T>, radius: T, start: T, end: T },
    /// Straight segment from `a` to `b`.
    Line { a: Cx<T>, b: Cx<T> },
}

impl<T: Real> Segment<T> {
    /// Parameter values at the start and end, in path orientation.
    pub fn param_range(&self) -> (T, T) {
        match *self {
            Segment::Ray { from, to, .. } => (from, to),
            Segment::Arc { start, end, .. } => (start, end),
            Segment::Line { .. } => (T::zero(), T::one()),
        }
    }

    pub fn point(&self, s: T) -> Cx<T> {
        match *self {
            Segment::Ray { base, angle, .. } => base + cis(angle) * s,
            Segment::Arc { center, radius, .. } => center + cis(s) * radius,
            Segment::Line { a, b } => a + (b - a) * s,
        }
    }

    /// d(lambda)/ds
    pub fn tangent(&self, s: T) -> Cx<T> {
        match *self {
            Segment::Ray { angle, .. } => cis(angle),
            Segment::Arc { radius, .. } => i_unit::<T>() * cis(s) * radius,
            Segment::Line { a, b } => b - a,
        }
    }

    pub fn start_point(&self) -> Cx<T> {
        self.point(self.param_range().0)
    }

    pub fn end_point(&self) -> Cx<T> {
        self.point(self.param_range().1)
    }

    pub fn reversed(&self) -> Self {
        match *self {
            Segment::Ray { base, angle, from, to, infinite } => Segment::Ray { base, angle, from: to, to: from, infinite },
            Segment::Arc { center, radius, start, end } => Segment::Arc { center, radius, start: end, end: start },
            Segment::Line { a, b } => Segment::Line { a: b, b: a },
        }
    }

    /// The same segment with any ray end beyond the truncation radius dropped.
    pub fn truncated(&self) -> Self {
        match *self {
            Segment::Ray { base, angle, from, to, .. } => Segment::Ray { base, angle, from, to, infinite: false },
            other => other,
        }
    }

    /// Euclidean distance from `z` to the (truncated) segment.
    pub fn distance_to(&self, z: Cx<T>) -> T {
        match *self {
            Segment::Ray { base, angle, from, to, .. } => {
                let u = cis(angle);
                let proj = ((z - base) * u.conj()).re;
                let rho = proj.max(from.min(to)).min(from.max(to));
                (z - base - u * rho).norm()
            }
            Segment::Arc { center, radius, start, end } => {
                let w = z - center;
                let (lo, hi) = (start.min(end), start.max(end));
                let phi = w.im.atan2(w.re);
                let tp = two_pi::<T>();
                let mut inside = false;
                for k in -2..=2 {
                    let p = phi + tp * T::lit(k as f64);
                    if p >= lo && p <= hi {
                        inside = true;
                    }
                }
                let ends = (w - cis(start) * radius).norm().min((w - cis(end) * radius).norm());
                if inside {
                    (w.norm() - radius).abs().min(ends)
                } else {
                    ends
                }
            }
            Segment::Line { a, b } => {
                let d = b - a;
                let len2 = d.norm_sqr();
                let s = if len2 == T::zero() { T::zero() } else { ((z - a) * d.conj()).re / len2 };
                (z - a - d * s.max(T::zero()).min(T::one())).norm()
            }
        }
    }

    fn is_infinite_ray(&self) -> bool {
        matches!(self, Segment::Ray { infinite: true, .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourOptions<T: Real> {
    /// Half-line Gamma^- indentation radius; must be below the datum's decay rate.
    pub indent_radius: Option<T>,
    /// Detour the half-line Gamma^- below the origin (negative control only).
    pub below_axis: bool,
    pub nodes_per_wavelength: T,
}

impl<T: Real> Default for ContourOptions<T> {
    fn default() -> Self {
        ContourOptions { indent_radius: None, below_axis: false, nodes_per_wavelength: T::lit(8.0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec<T: Real> {
    pub problem: ProblemId,
    pub sign: Sign,
    pub radius: T,
    pub options: ContourOptions<T>,
    pub delta: T,
}

/// Oriented piecewise path made of connected components.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourPath<T: Real> {
    pub spec: Option<ContourSpec<T>>,
    pub components: Vec<Vec<Segment<T>>>,
    pub nodes_per_wavelength: T,
    pub truncation_radius: T,
}

fn rotation_direction<T: Real>(angle: T) -> T {
    // Rotating a boundary ray toward Im(lambda^3) > 0.
    if (T::lit(3.0) * angle).cos() >= T::zero() {
        T::one()
    } else {
        -T::one()
    }
}

fn sector_boundary<T: Real>(first: T, second: T, radius: T, r: T, delta: T) -> Vec<Segment<T>> {
    let a1 = first + rotation_direction(first) * delta;
    let a2 = second + rotation_direction(second) * delta;
    let zero = re(T::zero());
    vec![
        Segment::Ray { base: zero, angle: a1, from: radius, to: r, infinite: true },
        Segment::Arc { center: zero, radius: r, start: a1, end: a2 },
        Segment::Ray { base: zero, angle: a2, from: r, to: radius, infinite: true },
    ]
}

pub fn max_deformation<T: Real>() -> T {
    T::PI() / T::lit(12.0)
}

/// Contour Gamma^{sign} of the problem, truncated at radius `R`, with ray
/// angles rotated by `delta` toward `Im(lambda^3) > 0`.
pub fn build_contour_deformed<T: Real>(
    problem: ProblemId,
    sign: Sign,
    radius: T,
    options: ContourOptions<T>,
    delta: T,
) -> Result<ContourPath<T>> {
    if !(radius > T::one()) || !radius.is_finite() {
        return Err(UtmError::InvalidContour(format!("truncation radius {radius} must exceed 1")));
    }
    if delta < T::zero() || delta > max_deformation::<T>() {
        return Err(UtmError::InvalidDeformation { delta: delta.as_f64(), max: max_deformation::<f64>() });
    }
    let pi = T::PI();
    let third = pi / T::lit(3.0);
    let components = match (problem, sign) {
        (ProblemId::HalfLineKdV, Sign::Plus) => vec![sector_boundary(T::lit(2.0) * third, third, radius, T::one(), delta)],
        (ProblemId::HalfLineKdV, Sign::Minus) => {
            let r = options
                .indent_radius
                .ok_or_else(|| UtmError::InvalidContour("half-line Gamma^- needs an indentation radius".into()))?;
            if !(r > T::zero()) || r >= T::one() {
                return Err(UtmError::InvalidContour(format!("indentation radius {r} must lie in (0, 1)")));
            }
            let mut segs = sector_boundary(pi, T::zero(), radius, r, delta);
            if options.below_axis {
                if let Segment::Arc { start, end, .. } = &mut segs[1] {
                    *end = *end + two_pi::<T>();
                    let _ = start;
                }
            }
            vec![segs]
        }
        (ProblemId::FiniteIntervalKdV, Sign::Plus) => vec![
            sector_boundary(third, T::zero(), radius, T::one(), delta),
            sector_boundary(pi, T::lit(2.0) * third, radius, T::one(), delta),
        ],
        (ProblemId::FiniteIntervalKdV, Sign::Minus) => vec![sector_boundary(-third, -T::lit(2.0) * third, radius, T::one(), delta)],
        (ProblemId::HalfLineHeat, _) => {
            return Err(UtmError::Unsupported("the heat problem uses the real half-line, not Gamma contours".into()))
        }
    };
    Ok(ContourPath {
        spec: Some(ContourSpec { problem, sign, radius, options, delta }),
        components,
        nodes_per_wavelength: options.nodes_per_wavelength,
        truncation_radius: radius,
    })
}

pub fn build_contour<T: Real>(problem: ProblemId, sign: Sign, radius: T, options: ContourOptions<T>) -> Result<ContourPath<T>> {
    build_contour_deformed(problem, sign, radius, options, T::zero())
}

/// Rotates the rays of a built contour by a further `delta` into the region
/// where `e^{i lambda^3 t}` decays.
pub fn deform<T: Real>(path: &ContourPath<T>, delta: T, problem: ProblemId, sign: Sign) -> Result<ContourPath<T>> {
    let spec = path
        .spec
        .ok_or_else(|| UtmError::InvalidContour("only contours from build_contour can be deformed".into()))?;
    if spec.problem != problem || spec.sign != sign {
        return Err(UtmError::InvalidContour("deformation requested for a different contour".into()));
    }
    if delta == T::zero() {
        return Ok(path.clone());
    }
    build_contour_deformed(problem, sign, spec.radius, spec.options, spec.delta + delta)
}

impl<T: Real> ContourPath<T> {
    pub fn from_segments(components: Vec<Vec<Segment<T>>>, truncation_radius: T) -> Self {
        ContourPath { spec: None, components, nodes_per_wavelength: T::lit(8.0), truncation_radius }
    }

    pub fn segments(&self) -> impl Iterator<Item = &Segment<T>> {
        self.components.iter().flatten()
    }

    pub fn reversed(&self) -> Self {
        let components = self
            .components
            .iter()
            .rev()
            .map(|c| c.iter().rev().map(|s| s.reversed()).collect())
            .collect();
        ContourPath { spec: None, components, ..self.clone() }
    }

    /// Largest end-to-start gap between consecutive segments of a component.
    pub fn max_gap(&self) -> T {
        let mut gap = T::zero();
        for c in &self.components {
            for w in c.windows(2) {
                gap = gap.max((w[0].end_point() - w[1].start_point()).norm());
            }
        }
        gap
    }

    pub fn distance_to(&self, z: Cx<T>) -> T {
        self.segments().map(|s| s.distance_to(z)).fold(T::infinity(), T::min)
    }

    /// Polyline samples `(seg_index, t_param, re, im)` with `t_param` in [0, 1].
    pub fn polyline(&self, per_segment: usize) -> Vec<(usize, T, T, T)> {
        let n = per_segment.max(2);
        let mut out = Vec::new();
        for (idx, seg) in self.segments().enumerate() {
            let (s0, s1) = seg.param_range();
            for k in 0..n {
                let tp = T::lit(k as f64 / (n - 1) as f64);
                let z = seg.point(s0 + (s1 - s0) * tp);
                out.push((idx, tp, z.re, z.im));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailPolicy<T: Real> {
    /// Stop at the truncation radius; `tail_bound` extrapolates the last decade.
    Truncate,
    /// Continue infinite rays over geometric panels until the estimated
    /// remainder is below tolerance or `max_radius` is reached.
    Extend { max_radius: T },
    /// Replace the ray end beyond the truncation radius by an arc and a ray
    /// turned by `angle` toward `Im(lambda^3) > 0`, cut where the evolution
    /// factor has decayed. Falls back to `Extend` when `t = 0`.
    Rotate { angle: T, max_radius: T },
}

/// Local phase `lambda x + lambda^3 t` used to size panels, plus the decay of
/// `e^{i lambda x + i lambda^3 t}` used to drop negligible ray ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseHint<T: Real> {
    pub x: T,
    pub t: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions<T: Real> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_panels: usize,
    pub phase: PhaseHint<T>,
    /// Oscillation rate of the integrand beyond the phase hint.
    pub extra_frequency: T,
    /// Assumed bound `e^{growth |lambda|}` on the non-evolution factors.
    pub growth: T,
    pub tail: TailPolicy<T>,
}

impl<T: Real> Default for IntegrateOptions<T> {
    fn default() -> Self {
        IntegrateOptions {
            abs_tol: T::lit(1e-12),
            rel_tol: T::zero(),
            max_panels: 50_000,
            phase: PhaseHint { x: T::zero(), t: T::zero() },
            extra_frequency: T::one(),
            growth: T::one(),
            tail: TailPolicy::Truncate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult<T: Real> {
    pub value: Cx<T>,
    pub abs_error_estimate: T,
    pub nodes_used: usize,
    pub tail_bound: T,
    pub converged: bool,
}


fn local_frequency<T: Real>(seg: &Segment<T>, s: T, opts: &IntegrateOptions<T>) -> T {
    let z = seg.point(s);
    let d = seg.tangent(s).norm();
    let phase = (re(opts.phase.x) + z * z * (T::lit(3.0) * opts.phase.t)).norm();
    d * (phase + opts.extra_frequency) + T::lit(1e-3)
}

/// Initial panels resolving the local phase with the requested node density.
pub fn initial_panels<T: Real>(seg: &Segment<T>, lo: T, hi: T, npw: T, opts: &IntegrateOptions<T>) -> Vec<(T, T)> {
    let per_panel = two_pi::<T>() * T::lit(21.0) / npw;
    let cap = |s: T| match seg {
        Segment::Ray { base, .. } => (base.norm() + s.abs()).max(T::one()) * T::lit(0.5),
        Segment::Arc { .. } => T::PI() / T::lit(8.0),
        Segment::Line { .. } => T::lit(0.125),
    };
    let mut out = Vec::new();
    let mut s = lo;
    while s < hi {
        let mut len = (per_panel / local_frequency(seg, s, opts)).min(cap(s));
        let ahead = (per_panel / local_frequency(seg, (s + len).min(hi), opts)).min(cap(s));
        len = len.min(ahead).min(hi - s);
        if out.len() >= 1_000_000 {
            len = hi - s;
        }
        out.push((s, s + len));
        s = s + len;
    }
    out
}

/// Radius beyond which `|e^{i lambda x + i lambda^3 t}| e^{growth rho}` drops
/// below `e^{-60}` along a ray from the origin at `angle`.
pub fn decay_cutoff<T: Real>(angle: T, opts: &IntegrateOptions<T>) -> Option<T> {
    let t = opts.phase.t;
    let s3 = (T::lit(3.0) * angle).sin();
    if t <= T::zero() || s3 <= T::lit(1e-3) {
        return None;
    }
    let lin = opts.phase.x * angle.sin() - opts.growth;
    // t s3 rho^3 + lin rho >= 60
    let mut rho = T::one();
    while t * s3 * rho * rho * rho + lin * rho < T::lit(60.0) {
        rho = rho * T::lit(1.1);
        if rho > T::lit(1e8) {
            return None;
        }
    }
    Some(rho)
}

struct SegmentOutcome<T: Real> {
    value: Cx<T>,
    error: T,
    nodes: usize,
    tail: T,
    converged: bool,
}

fn integrate_param<T, F>(
    seg: &Segment<T>,
    lo: T,
    hi: T,
    npw: T,
    f: &mut F,
    opts: &IntegrateOptions<T>,
    tol: T,
) -> Result<(Cx<T>, T, usize, bool)>
where
    T: Real,
    F: FnMut(Cx<T>) -> Result<Cx<T>>,
{
    let panels = initial_panels(seg, lo, hi, npw, opts);
    let mut g = |s: T| {
        let z = seg.point(s);
        let v = f(z)?;
        if !is_finite(v) {
            return Err(UtmError::NonFinite { re: z.re.as_f64(), im: z.im.as_f64() });
        }
        Ok(v * seg.tangent(s))
    };
    let max = opts.max_panels.max(panels.len() * 4);
    let out = adaptive(&mut g, &panels, tol, opts.rel_tol, max)?;
    Ok((out.value, out.error, out.evaluations, out.converged))
}

fn truncation_tail_bound<T, F>(seg: &Segment<T>, far: T, f: &mut F) -> Result<T>
where
    T: Real,
    F: FnMut(Cx<T>) -> Result<Cx<T>>,
{
    // Envelope fits over the last decade of radii.
    let n = 16;
    let mut pts = Vec::with_capacity(n);
    for k in 0..n {
        let rho = far * T::lit(10f64.powf(-1.0 + k as f64 / (n - 1) as f64));
        let v = f(seg.point(rho))?.norm();
        if v > T::zero() && v.is_finite() {
            pts.push((rho, v));
        }
    }
    if pts.len() < n / 2 {
        return Ok(T::zero());
    }
    let fit = |xs: &dyn Fn(T) -> T| {
        let m = T::lit(pts.len() as f64);
        let (mut sx, mut sy, mut sxx, mut sxy) = (T::zero(), T::zero(), T::zero(), T::zero());
        for &(rho, v) in &pts {
            let x = xs(rho);
            let y = v.ln();
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        (m * sxy - sx * sy) / (m * sxx - sx * sx)
    };
    let end = pts.last().map(|p| p.1).unwrap_or(T::zero());
    let p = fit(&|r: T| r.ln());
    let kappa = fit(&|r: T| r);
    let mut bound = T::infinity();
    if p < -T::one() {
        bound = bound.min(end * far / (-p - T::one()));
    }
    if kappa < T::zero() {
        bound = bound.min(end / (-kappa));
    }
    Ok(bound)
}

fn integrate_segment<T, F>(seg: &Segment<T>, npw: T, f: &mut F, opts: &IntegrateOptions<T>, tol: T) -> Result<SegmentOutcome<T>>
where
    T: Real,
    F: FnMut(Cx<T>) -> Result<Cx<T>>,
{
    let (s0, s1) = seg.param_range();
    let orient = if s1 >= s0 { T::one() } else { -T::one() };
    let (lo, hi) = (s0.min(s1), s0.max(s1));
    let cutoff = match seg {
        Segment::Ray { base, angle, .. } if base.norm() == T::zero() => decay_cutoff(*angle, opts),
        _ => None,
    };
    let body_hi = cutoff.map_or(hi, |c| c.min(hi).max(lo));
    let (value, error, nodes, converged) = integrate_param(seg, lo, body_hi, npw, f, opts, tol)?;
    let mut out = SegmentOutcome { value: value * orient, error, nodes, tail: T::zero(), converged };
    if !seg.is_infinite_ray() {
        return Ok(out);
    }
    if cutoff.is_some_and(|c| c <= hi) {
        out.tail = T::lit(60.0).neg().exp();
        return Ok(out);
    }
    let mut policy = opts.tail;
    if let (TailPolicy::Rotate { angle, max_radius }, Segment::Ray { base, angle: a, .. }) = (policy, seg) {
        let turned = *a + rotation_direction(*a) * angle;
        match decay_cutoff(turned, opts) {
            Some(c) if base.norm() == T::zero() => {
                let zero = re(T::zero());
                let arc = Segment::Arc { center: zero, radius: hi, start: *a, end: turned };
                let (v, e, n, ok) = integrate_param(&arc, a.min(turned), a.max(turned), npw, f, opts, tol)?;
                let arc_v = if turned >= *a { v } else { -v };
                out.value = out.value + arc_v * orient;
                out.error = out.error + e;
                out.nodes += n;
                out.converged &= ok;
                if c > hi {
                    let ray = Segment::Ray { base: zero, angle: turned, from: hi, to: c, infinite: false };
                    let (v, e, n, ok) = integrate_param(&ray, hi, c, npw, f, opts, tol)?;
                    out.value = out.value + v * orient;
                    out.error = out.error + e;
                    out.nodes += n;
                    out.converged &= ok;
                }
                out.tail = T::lit(60.0).neg().exp();
                return Ok(out);
            }
            _ => policy = TailPolicy::Extend { max_radius },
        }
    }
    match policy {
        TailPolicy::Rotate { .. } => unreachable!(),
        TailPolicy::Truncate => {
            let mut h = |z: Cx<T>| f(z);
            out.tail = truncation_tail_bound(seg, hi, &mut h)?;
        }
        TailPolicy::Extend { max_radius } => {
            let mut rho = hi;
            let mut prev: Option<T> = None;
            loop {
                let mut next = rho * T::lit(2.0);
                let cut = cutoff.filter(|c| *c < next);
                if let Some(c) = cut {
                    next = c;
                }
                let (v, e, n, c) = integrate_param(seg, rho, next, npw, f, opts, tol)?;
                out.value = out.value + v * orient;
                out.error = out.error + e;
                out.nodes += n;
                out.converged &= c;
                if cut.is_some() {
                    out.tail = T::lit(60.0).neg().exp();
                    break;
                }
                let mag = v.norm();
                let ratio_est = match prev {
                    Some(p) if p > T::zero() && mag < T::lit(0.9) * p => {
                        let q = mag / p;
                        mag * q / (T::one() - q)
                    }
                    _ => mag,
                };
                let z = seg.point(next);
                let env = f(z)?.norm();
                let omega = local_frequency(seg, next, &IntegrateOptions { extra_frequency: T::zero(), ..*opts });
                let env_est = env / omega.max(T::one() / next);
                let remainder = ratio_est.max(env_est);
                prev = Some(mag);
                rho = next;
                if remainder <= tol {
                    out.tail = remainder;
                    break;
                }
                if rho >= max_radius {
                    out.tail = remainder;
                    out.converged = false;
                    break;
                }
            }
        }
    }
    Ok(out)
}

/// Integrates `integrand(lambda) d lambda` along the path.
pub fn integrate<T, F>(path: &ContourPath<T>, mut integrand: F, opts: &IntegrateOptions<T>) -> Result<QuadratureResult<T>>
where
    T: Real,
    F: FnMut(Cx<T>) -> Result<Cx<T>>,
{
    let count = path.segments().count().max(1);
    let tol = opts.abs_tol / T::lit(count as f64);
    let mut value = re(T::zero());
    let mut error = T::zero();
    let mut nodes = 0;
    let mut tail = T::zero();
    let mut converged = true;
    for seg in path.segments() {
        let o = integrate_segment(seg, path.nodes_per_wavelength, &mut integrand, opts, tol)?;
        value = value + o.value;
        error = error + o.error;
        nodes += o.nodes;
        tail = tail + o.tail;
        converged &= o.converged;
    }
    if !tail.is_finite() {
        converged = false;
    }
    Ok(QuadratureResult { value, abs_error_estimate: error, nodes_used: nodes, tail_bound: tail, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    #[test]
    fn unit_circle_residue() {
        let pi = std::f64::consts::PI;
        let path = ContourPath::from_segments(
            vec![vec![
                Segment::Arc { center: re(0.0), radius: 1.0, start: 0.0, end: pi },
                Segment::Arc { center: re(0.0), radius: 1.0, start: pi, end: 2.0 * pi },
            ]],
            2.0,
        );
        let r = integrate(&path, |z: Cx<f64>| Ok(z.inv()), &IntegrateOptions::default()).unwrap();
        assert!((r.value - cx(0.0, 2.0 * pi)).norm() < 1e-12);
        let zero = integrate(&path, |_| Ok(re(0.0)), &IntegrateOptions::default()).unwrap();
        assert_eq!(zero.value, re(0.0));
        assert_eq!(zero.abs_error_estimate, 0.0);
    }

    #[test]
    fn example_shapes() {
        let o = ContourOptions { indent_radius: Some(0.25), ..Default::default() };
        let p = build_contour::<f64>(ProblemId::HalfLineKdV, Sign::Plus, 50.0, o).unwrap();
        assert_eq!(p.segments().count(), 3);
        let m = build_contour::<f64>(ProblemId::HalfLineKdV, Sign::Minus, 50.0, o).unwrap();
        let segs: Vec<_> = m.segments().collect();
        assert!((segs[0].start_point() - re(-50.0)).norm() < 1e-12);
        assert!((segs[0].end_point() - re(-0.25)).norm() < 1e-12);
        assert!(segs[1].point(std::f64::consts::FRAC_PI_2).im > 0.0);
        assert!((segs[2].end_point() - re(50.0)).norm() < 1e-12);
        for p in [p, m] {
            assert!(p.max_gap() < 1e-12);
        }
        assert!(build_contour::<f64>(ProblemId::HalfLineKdV, Sign::Plus, 0.5, o).is_err());
        assert!(build_contour::<f64>(ProblemId::HalfLineKdV, Sign::Minus, 50.0, ContourOptions::default()).is_err());
    }

    #[test]
    fn deformation_range_enforced() {
        let p = build_contour::<f64>(ProblemId::FiniteIntervalKdV, Sign::Minus, 40.0, ContourOptions::default()).unwrap();
        assert_eq!(deform(&p, 0.0, ProblemId::FiniteIntervalKdV, Sign::Minus).unwrap(), p);
        assert!(deform(&p, 0.3, ProblemId::FiniteIntervalKdV, Sign::Minus).is_err());
        let d = deform(&p, std::f64::consts::PI / 24.0, ProblemId::FiniteIntervalKdV, Sign::Minus).unwrap();
        assert!(d.max_gap() < 1e-12);
    }
}
