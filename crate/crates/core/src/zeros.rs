//! Zeros of Delta by the argument principle, Newton refinement, and the
//! clearance between zeros and the finite-interval contours.

use std::fmt;

use serde::Serialize;

use crate::contour::{build_contour_deformed, ContourOptions};
use crate::datum::ProblemId;
use crate::error::{Result, UtmError};
use crate::scalar::{alpha, cx, Cx, Real};
use crate::spectral::{delta_prime_scaled, delta_scaled, dominant_sector, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionTag {
    /// arg in (0, pi/3), |lambda| > 1.
    Sector1,
    /// arg in (2pi/3, pi), |lambda| > 1.
    Sector2,
    /// arg in (-2pi/3, -pi/3), |lambda| > 1.
    GammaMinus,
    Origin,
    Elsewhere,
}

impl RegionTag {
    pub fn of<T: Real>(z: Cx<T>) -> Self {
        let r = z.norm();
        if r < T::lit(1e-8) {
            return RegionTag::Origin;
        }
        if r <= T::one() {
            return RegionTag::Elsewhere;
        }
        let th = z.im.atan2(z.re).as_f64();
        let third = std::f64::consts::FRAC_PI_3;
        if th > 0.0 && th < third {
            RegionTag::Sector1
        } else if th > 2.0 * third && th < 3.0 * third {
            RegionTag::Sector2
        } else if th > -2.0 * third && th < -third {
            RegionTag::GammaMinus
        } else {
            RegionTag::Elsewhere
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            RegionTag::Sector1 => "sector1",
            RegionTag::Sector2 => "sector2",
            RegionTag::GammaMinus => "gamma_minus",
            RegionTag::Origin => "origin",
            RegionTag::Elsewhere => "elsewhere",
        }
    }
}

impl fmt::Display for RegionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroRecord<T: Real> {
    pub location: Cx<T>,
    pub multiplicity: usize,
    /// |Delta| in the scaled form at the refined location.
    pub residual: T,
    pub region_tag: RegionTag,
    /// False when Newton did not converge and the location is a box centre.
    pub resolved: bool,
}

/// Axis-aligned rectangle `[re_lo, re_hi] x [im_lo, im_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect<T: Real> {
    pub re_lo: T,
    pub re_hi: T,
    pub im_lo: T,
    pub im_hi: T,
}

impl<T: Real> Rect<T> {
    pub fn new(re_lo: T, re_hi: T, im_lo: T, im_hi: T) -> Self {
        Rect { re_lo, re_hi, im_lo, im_hi }
    }

    pub fn centered(c: Cx<T>, half: T) -> Self {
        Rect::new(c.re - half, c.re + half, c.im - half, c.im + half)
    }

    fn corners(&self) -> [Cx<T>; 4] {
        [
            cx(self.re_lo, self.im_lo),
            cx(self.re_hi, self.im_lo),
            cx(self.re_hi, self.im_hi),
            cx(self.re_lo, self.im_hi),
        ]
    }

    fn side(&self) -> T {
        (self.re_hi - self.re_lo).max(self.im_hi - self.im_lo)
    }

    fn contains(&self, z: Cx<T>, slack: T) -> bool {
        z.re >= self.re_lo - slack && z.re <= self.re_hi + slack && z.im >= self.im_lo - slack && z.im <= self.im_hi + slack
    }

    fn grown(&self, by: T) -> Self {
        Rect::new(self.re_lo - by, self.re_hi + by, self.im_lo - by, self.im_hi + by)
    }

    fn center(&self) -> Cx<T> {
        cx((self.re_lo + self.re_hi) / T::lit(2.0), (self.im_lo + self.im_hi) / T::lit(2.0))
    }

    fn quarters(&self, fx: T, fy: T) -> [Self; 4] {
        let m = cx(self.re_lo + (self.re_hi - self.re_lo) * fx, self.im_lo + (self.im_hi - self.im_lo) * fy);
        [
            Rect::new(self.re_lo, m.re, self.im_lo, m.im),
            Rect::new(m.re, self.re_hi, self.im_lo, m.im),
            Rect::new(m.re, self.re_hi, m.im, self.im_hi),
            Rect::new(self.re_lo, m.re, m.im, self.im_hi),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroCount<T: Real> {
    pub count: usize,
    /// The box actually used, after any perturbation away from boundary zeros.
    pub used: Rect<T>,
    pub perturbed: bool,
}

const BOUNDARY_FLOOR: f64 = 1e-7;

/// Change of arg Delta along `a -> b`. Steps are limited by the local phase
/// speed |Delta'/Delta| at both ends, so a nearby zero cannot be skipped.
fn edge_phase<T: Real>(a: Cx<T>, b: Cx<T>) -> Option<T> {
    let len = (b - a).norm();
    let dir = (b - a) / len;
    let speed = |z: Cx<T>| -> Option<T> {
        let j = dominant_sector(z);
        let g = delta_scaled(z, j);
        if g.norm() < T::lit(BOUNDARY_FLOOR) {
            return None;
        }
        Some((delta_prime_scaled(z, j) / g).norm())
    };
    let mut s = T::zero();
    let mut total = T::zero();
    let mut v = speed(a)?;
    while s < len {
        let mut h = (T::lit(0.3) / v).min(T::lit(0.5)).min(len - s);
        loop {
            let z1 = a + dir * s;
            let z2 = a + dir * (s + h);
            let v2 = speed(z2)?;
            if h * v2 > T::lit(0.3) && h > T::lit(1e-12) {
                h = h / T::lit(2.0);
                continue;
            }
            let j = dominant_sector((z1 + z2) / T::lit(2.0));
            let aj = crate::scalar::alpha_pow::<T>(j);
            // arg Delta = arg Delta_s - Re(alpha^j lambda)
            total += (delta_scaled(z2, j) / delta_scaled(z1, j)).arg() - (aj * (z2 - z1)).re;
            s = s + h;
            v = v2;
            break;
        }
    }
    Some(total)
}

fn winding<T: Real>(r: &Rect<T>) -> Option<usize> {
    let c = r.corners();
    let mut total = T::zero();
    for k in 0..4 {
        total += edge_phase(c[k], c[(k + 1) % 4])?;
    }
    let w = total / crate::scalar::two_pi::<T>();
    let n = w.round();
    if (w - n).abs() > T::lit(0.05) || n < T::zero() {
        return None;
    }
    n.to_usize()
}

/// Number of zeros of Delta inside the box by the argument principle. A box
/// with a zero on (or numerically at) its boundary is grown slightly.
pub fn count_zeros<T: Real>(rect: Rect<T>) -> Result<ZeroCount<T>> {
    if !(rect.re_hi > rect.re_lo && rect.im_hi > rect.im_lo) {
        return Err(UtmError::InvalidContour("empty box".into()));
    }
    let mut used = rect;
    for attempt in 0..8 {
        if let Some(count) = winding(&used) {
            return Ok(ZeroCount { count, used, perturbed: attempt > 0 });
        }
        let bump = rect.side() * T::lit(1e-3 * 1.618f64.powi(attempt));
        used = rect.grown(bump);
    }
    Err(UtmError::GridTooCoarse("argument principle did not settle after perturbing the box".into()))
}

fn newton<T: Real>(start: Cx<T>, m: usize) -> Option<Cx<T>> {
    let mut z = start;
    for _ in 0..100 {
        let j = dominant_sector(z);
        let d = delta_prime_scaled(z, j);
        if d.norm() == T::zero() {
            return None;
        }
        let step = delta_scaled(z, j) / d * T::lit(m as f64);
        z = z - step;
        if !crate::scalar::is_finite(z) {
            return None;
        }
        if step.norm() <= T::lit(1e-15) * z.norm().max(T::one()) {
            return Some(z);
        }
    }
    None
}

fn record<T: Real>(z: Cx<T>, multiplicity: usize, resolved: bool) -> ZeroRecord<T> {
    let residual = delta_scaled(z, dominant_sector(z)).norm();
    ZeroRecord { location: z, multiplicity, residual, region_tag: RegionTag::of(z), resolved }
}

fn search<T: Real>(rect: Rect<T>, count: usize, out: &mut Vec<ZeroRecord<T>>) -> Result<()> {
    if count == 0 {
        return Ok(());
    }
    let side = rect.side();
    if count == 1 || side < T::lit(0.25) {
        if let Some(z) = newton(rect.center(), count) {
            if rect.contains(z, side * T::lit(1e-9)) {
                let half = (side / T::lit(4.0)).min(T::lit(0.05));
                let mult = count_zeros(Rect::centered(z, half))?.count;
                if mult == count {
                    out.push(record(z, mult, true));
                    return Ok(());
                }
            }
        }
        if side < T::lit(1e-6) {
            out.push(record(rect.center(), count, false));
            return Ok(());
        }
    }
    for (fx, fy) in SPLITS {
        let quarters = rect.quarters(T::lit(fx), T::lit(fy));
        let counts: Option<Vec<usize>> = quarters.iter().map(winding).collect();
        if let Some(counts) = counts.filter(|c| c.iter().sum::<usize>() == count) {
            for (q, n) in quarters.into_iter().zip(counts) {
                search(q, n, out)?;
            }
            return Ok(());
        }
    }
    Err(UtmError::GridTooCoarse(format!("no clean subdivision of a box holding {count} zeros")))
}

// Cut positions, slightly off centre so symmetric zero sets avoid the cuts.
const SPLITS: [(f64, f64); 4] = [(0.5137, 0.4871), (0.4619, 0.5383), (0.5521, 0.4417), (0.4283, 0.5729)];

/// All zeros of Delta with `|lambda| <= R`, sorted by modulus then argument.
pub fn find_zeros<T: Real>(radius: T) -> Result<Vec<ZeroRecord<T>>> {
    if !(radius > T::one()) {
        return Err(UtmError::InvalidContour(format!("search radius {radius} must exceed 1")));
    }
    let pad = T::one();
    let rect = Rect::new(-radius - pad * T::lit(0.37), radius + pad * T::lit(0.41), -radius - pad * T::lit(0.29), radius + pad * T::lit(0.53));
    let total = count_zeros(rect)?;
    let mut out = Vec::new();
    search(total.used, total.count, &mut out)?;
    let found: usize = out.iter().map(|z| z.multiplicity).sum();
    if found != total.count {
        return Err(UtmError::GridTooCoarse(format!("box count {} but {} zeros refined", total.count, found)));
    }
    out.retain(|z| z.location.norm() <= radius);
    for z in out.iter_mut() {
        if z.region_tag == RegionTag::Origin {
            z.location = cx(T::zero(), T::zero());
            z.residual = delta_scaled(z.location, 0).norm();
        }
    }
    out.sort_by(|a, b| {
        let ka = (a.location.norm().as_f64(), a.location.im.atan2(a.location.re).as_f64());
        let kb = (b.location.norm().as_f64(), b.location.im.atan2(b.location.re).as_f64());
        ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

/// Largest distance from `alpha z` to the zero set over all zeros `z`.
pub fn rotation_defect<T: Real>(zeros: &[ZeroRecord<T>]) -> T {
    let a = alpha::<T>();
    zeros
        .iter()
        .map(|z| {
            let w = a * z.location;
            zeros.iter().map(|y| (y.location - w).norm()).fold(T::infinity(), T::min)
        })
        .fold(T::zero(), T::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClearanceReport {
    pub radius: f64,
    pub margin: f64,
    pub delta: f64,
    pub min_distance: f64,
    pub closest: Option<(f64, f64)>,
    /// Zeros inside the region swept by rotating the rays by `delta`.
    pub swept: Vec<(f64, f64)>,
    pub pass: bool,
}

/// Distance from every non-origin zero to the finite-interval contours at
/// deformation `delta`, and the zeros crossed while deforming.
pub fn certify_contour_clearance<T: Real>(zeros: &[ZeroRecord<T>], radius: T, margin: T, delta: T) -> Result<ClearanceReport> {
    let opts = ContourOptions::default();
    let paths = [
        build_contour_deformed(ProblemId::FiniteIntervalKdV, Sign::Plus, radius, opts, delta)?,
        build_contour_deformed(ProblemId::FiniteIntervalKdV, Sign::Minus, radius, opts, delta)?,
    ];
    let base = [
        build_contour_deformed(ProblemId::FiniteIntervalKdV, Sign::Plus, radius, opts, T::zero())?,
        build_contour_deformed(ProblemId::FiniteIntervalKdV, Sign::Minus, radius, opts, T::zero())?,
    ];
    let mut min_distance = T::infinity();
    let mut closest = None;
    let mut swept = Vec::new();
    for z in zeros.iter().filter(|z| z.region_tag != RegionTag::Origin) {
        let d = paths.iter().map(|p| p.distance_to(z.location)).fold(T::infinity(), T::min);
        if d < min_distance {
            min_distance = d;
            closest = Some((z.location.re.as_f64(), z.location.im.as_f64()));
        }
        let th = z.location.im.atan2(z.location.re);
        for (p, b) in paths.iter().zip(&base) {
            for (s, s0) in p.segments().zip(b.segments()) {
                if let (crate::contour::Segment::Ray { angle: a1, .. }, crate::contour::Segment::Ray { angle: a0, .. }) = (s, s0) {
                    let (lo, hi) = (a0.min(*a1), a0.max(*a1));
                    let inside = z.location.norm() >= T::one() && angle_between(th, lo, hi);
                    if inside && hi > lo {
                        swept.push((z.location.re.as_f64(), z.location.im.as_f64()));
                    }
                }
            }
        }
    }
    let pass = swept.is_empty() && (min_distance >= margin || closest.is_none());
    Ok(ClearanceReport {
        radius: radius.as_f64(),
        margin: margin.as_f64(),
        delta: delta.as_f64(),
        min_distance: if closest.is_some() { min_distance.as_f64() } else { f64::INFINITY },
        closest,
        swept,
        pass,
    })
}

fn angle_between<T: Real>(th: T, lo: T, hi: T) -> bool {
    let tau = crate::scalar::two_pi::<T>();
    [th - tau, th, th + tau].iter().any(|&t| t >= lo && t <= hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_box_counts_two() {
        let c = count_zeros(Rect::new(-0.5, 0.5, -0.5, 0.5)).unwrap();
        assert_eq!(c.count, 2);
        assert!(!c.perturbed);
    }

    #[test]
    fn empty_box_counts_zero() {
        assert_eq!(count_zeros(Rect::new(2.0, 3.0, 0.1, 0.5)).unwrap().count, 0);
    }

    #[test]
    fn tags() {
        assert_eq!(RegionTag::of(cx(0.0, 0.0)), RegionTag::Origin);
        assert_eq!(RegionTag::of(cx(3.0, 1.0)), RegionTag::Sector1);
        assert_eq!(RegionTag::of(cx(-3.0, 1.0)), RegionTag::Sector2);
        assert_eq!(RegionTag::of(cx(0.0, -3.0)), RegionTag::GammaMinus);
        assert_eq!(RegionTag::of(cx(0.0, 3.0)), RegionTag::Elsewhere);
    }
}
