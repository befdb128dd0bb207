//! Augmented eigenfunctions of the third-order operators: remainder
//! functionals, the eigen-relation, type-II vanishing integrals, the type-I
//! failure probe and the diagonalised inverse.

use std::sync::Arc;

use serde::Serialize;

use crate::contour::{build_contour, integrate, ContourOptions, ContourPath, IntegrateOptions, PhaseHint, TailPolicy};
use crate::datum::{check_compatibility, Custom, InitialDatum, ProblemId, Profile, RealFn};
use crate::error::{Result, UtmError};
use crate::scalar::{i_unit, re, two_pi, Cx, Real};
use crate::spectral::{Sign, SpectralContext};
use crate::transform::{TransformOptions, TransformPair};

/// Boundary traces entering the remainders, taken from the datum's analytic
/// derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryTraces<T: Real> {
    pub d1_at_0: Cx<T>,
    pub d2_at_0: Cx<T>,
    pub d2_at_1: Cx<T>,
}

impl<T: Real> BoundaryTraces<T> {
    pub fn of(f: &InitialDatum<T>, problem: ProblemId) -> Result<Self> {
        let d2_at_1 = match problem {
            ProblemId::FiniteIntervalKdV => f.derivative(2, T::one())?,
            _ => re(T::zero()),
        };
        Ok(BoundaryTraces { d1_at_0: f.derivative(1, T::zero())?, d2_at_0: f.derivative(2, T::zero())?, d2_at_1 })
    }

    pub fn is_zero(&self) -> bool {
        [self.d1_at_0, self.d2_at_0, self.d2_at_1].iter().all(|v| v.norm() == T::zero())
    }
}

/// Remainders `R^{+-}_lambda` with `F(Sf) = lambda^3 F(f) + R(f)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderFamily {
    pub problem: ProblemId,
}

impl RemainderFamily {
    pub fn new(problem: ProblemId) -> Result<Self> {
        if problem == ProblemId::HalfLineHeat {
            return Err(UtmError::Unsupported("the heat operator has a true generalised eigenfunction".into()));
        }
        Ok(RemainderFamily { problem })
    }

    pub fn z<T: Real>(&self, lambda: Cx<T>) -> Cx<T> {
        lambda * lambda * lambda
    }

    pub fn remainder<T: Real>(&self, sign: Sign, lambda: Cx<T>, tr: &BoundaryTraces<T>) -> Cx<T> {
        self.remainder_weighted(sign, lambda, tr, re(T::zero()))
    }

    /// `e^{log_weight} R(lambda)`, with the weight merged into any exponential.
    pub fn remainder_weighted<T: Real>(&self, sign: Sign, lambda: Cx<T>, tr: &BoundaryTraces<T>, log_weight: Cx<T>) -> Cx<T> {
        let i = i_unit::<T>();
        let tp = two_pi::<T>();
        let w = || log_weight.exp();
        match (self.problem, sign) {
            (ProblemId::FiniteIntervalKdV, Sign::Plus) => (-i * tr.d2_at_0 + lambda * tr.d1_at_0) / tp * w(),
            (ProblemId::FiniteIntervalKdV, Sign::Minus) => {
                if tr.d2_at_1.norm() == T::zero() {
                    return re(T::zero());
                }
                -(log_weight - i * lambda).exp() * i * tr.d2_at_1 / tp
            }
            (ProblemId::HalfLineKdV, Sign::Plus) => (i * tr.d2_at_0 - lambda * tr.d1_at_0) / tp * w(),
            (ProblemId::HalfLineKdV, Sign::Minus) => (-i * tr.d2_at_0 + lambda * tr.d1_at_0) / tp * w(),
            (ProblemId::HalfLineHeat, _) => re(T::zero()),
        }
    }
}

/// `Sf = i f'''`, so that `S e^{-i lambda x} = lambda^3 e^{-i lambda x}`.
pub fn apply_s<T: Real>(f: &InitialDatum<T>) -> Result<InitialDatum<T>> {
    let i = i_unit::<T>();
    let label = format!("S({})", f.label());
    match f.profile() {
        Profile::ExpPoly(p) => Ok(InitialDatum::exp_poly(label, f.domain(), f.decay_rate(), p.nth_derivative(3).scale(i))),
        Profile::Tabulated(_) => {
            let g = f.clone();
            let value: RealFn<T> = Arc::new(move |x| g.derivative(3, x).map(|v| v * i_unit::<T>()).unwrap_or(re(T::zero())));
            Ok(InitialDatum::custom(label, f.domain(), f.decay_rate(), Custom { value, derivatives: vec![], transform: None }))
        }
        Profile::Custom(c) => {
            if c.derivatives.len() < 3 {
                return Err(UtmError::MissingDerivative { order: 3, available: c.derivatives.len() });
            }
            let scaled = |d: &RealFn<T>| -> RealFn<T> {
                let d = d.clone();
                Arc::new(move |x| d(x) * i_unit::<T>())
            };
            let value = scaled(&c.derivatives[2]);
            let derivatives = c.derivatives[3..].iter().map(scaled).collect();
            Ok(InitialDatum::custom(label, f.domain(), f.decay_rate(), Custom { value, derivatives, transform: None }))
        }
    }
}

fn contexts<T: Real>(problem: ProblemId, f: &InitialDatum<T>) -> Result<(SpectralContext<T>, SpectralContext<T>)> {
    let sf = apply_s(f)?;
    let hl = problem == ProblemId::HalfLineKdV;
    let a = SpectralContext::new(problem, Arc::new(f.clone()))?.with_continuation(hl && f.supports_continuation())?;
    let b = SpectralContext::new(problem, Arc::new(sf.clone()))?.with_continuation(hl && sf.supports_continuation())?;
    Ok((a, b))
}

/// `F(Sf) - lambda^3 F(f) - R(f)` at one spectral point.
pub fn eigen_relation_residual<T: Real>(problem: ProblemId, f: &InitialDatum<T>, lambda: Cx<T>, sign: Sign) -> Result<Cx<T>> {
    let fam = RemainderFamily::new(problem)?;
    let tr = BoundaryTraces::of(f, problem)?;
    let (cf, csf) = contexts(problem, f)?;
    Ok(csf.forward(sign, lambda)? - fam.z(lambda) * cf.forward(sign, lambda)? - fam.remainder(sign, lambda, &tr))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugOptions<T: Real> {
    pub radius: T,
    pub indent_radius: Option<T>,
    /// Detour the half-line `Gamma^-` below the origin instead of above.
    pub below_axis: bool,
    pub abs_tol: T,
    pub max_tail_radius: T,
}

impl<T: Real> Default for AugOptions<T> {
    fn default() -> Self {
        AugOptions {
            radius: T::lit(60.0),
            indent_radius: None,
            below_axis: false,
            abs_tol: T::lit(1e-10),
            max_tail_radius: T::lit(1e6),
        }
    }
}

fn branch_path<T: Real>(problem: ProblemId, f: &InitialDatum<T>, sign: Sign, radius: T, opts: &AugOptions<T>) -> Result<ContourPath<T>> {
    let indent = match (problem, opts.indent_radius) {
        (ProblemId::HalfLineKdV, None) => Some((f.decay_rate().unwrap_or(T::one()) / T::lit(2.0)).min(T::lit(0.5))),
        (_, r) => r,
    };
    let copts = ContourOptions { indent_radius: indent, below_axis: opts.below_axis, ..ContourOptions::default() };
    build_contour(problem, sign, radius, copts)
}

fn check_interior<T: Real>(problem: ProblemId, x: T) -> Result<()> {
    let inside = match problem {
        ProblemId::FiniteIntervalKdV => x > T::zero() && x < T::one(),
        _ => x > T::zero(),
    };
    if inside {
        Ok(())
    } else {
        Err(UtmError::Unsupported(format!("x = {x} is not interior to the domain")))
    }
}

/// `int_{Gamma^sign} e^{i lambda x} R(lambda) / lambda^3 d lambda`, with ray
/// ends continued until the tail is below tolerance.
pub fn type_ii_vanishing<T: Real>(problem: ProblemId, f: &InitialDatum<T>, sign: Sign, x: T, opts: &AugOptions<T>) -> Result<Cx<T>> {
    check_interior(problem, x)?;
    let fam = RemainderFamily::new(problem)?;
    let tr = BoundaryTraces::of(f, problem)?;
    if tr.is_zero() {
        return Ok(re(T::zero()));
    }
    let path = branch_path(problem, f, sign, opts.radius, opts)?;
    let i = i_unit::<T>();
    let iopts = IntegrateOptions {
        abs_tol: opts.abs_tol,
        phase: PhaseHint { x, t: T::zero() },
        tail: TailPolicy::Extend { max_radius: opts.max_tail_radius },
        ..IntegrateOptions::default()
    };
    let out = integrate(&path, |z| Ok(fam.remainder_weighted(sign, z, &tr, i * z * x) / (z * z * z)), &iopts)?;
    Ok(out.value)
}

/// Truncated `int_{Gamma^sign, |lambda| <= R} e^{i lambda x} R(lambda) d lambda`
/// magnitudes for each radius.
pub fn type_i_failure_probe<T: Real>(
    problem: ProblemId,
    f: &InitialDatum<T>,
    sign: Sign,
    x: T,
    radii: &[T],
) -> Result<Vec<T>> {
    check_interior(problem, x)?;
    let fam = RemainderFamily::new(problem)?;
    let tr = BoundaryTraces::of(f, problem)?;
    let i = i_unit::<T>();
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        if tr.is_zero() {
            out.push(T::zero());
            continue;
        }
        let path = branch_path(problem, f, sign, r, &AugOptions::default())?;
        let truncated = ContourPath::from_segments(
            path.components
                .iter()
                .map(|c| c.iter().map(|s| s.truncated()).collect())
                .collect(),
            r,
        );
        let iopts = IntegrateOptions { abs_tol: T::lit(1e-10), phase: PhaseHint { x, t: T::zero() }, ..IntegrateOptions::default() };
        let v = integrate(&truncated, |z| Ok(fam.remainder_weighted(sign, z, &tr, i * z * x)), &iopts)?;
        out.push(v.value.norm());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagonalisedInverse<T: Real> {
    /// `int e^{i lambda x} lambda^{-3} F(Sf)` over both contours.
    pub lhs: Cx<T>,
    /// `int e^{i lambda x} F(f)` over both contours.
    pub rhs: Cx<T>,
}

impl<T: Real> DiagonalisedInverse<T> {
    pub fn gap(&self) -> T {
        (self.lhs - self.rhs).norm()
    }
}

/// Both sides of the diagonalised-inverse identity on the inverse-transform
/// nodes of `f`.
pub fn diagonalised_inverse_check<T: Real>(
    problem: ProblemId,
    f: &InitialDatum<T>,
    x: T,
    opts: TransformOptions<T>,
) -> Result<DiagonalisedInverse<T>> {
    check_interior(problem, x)?;
    let compat = check_compatibility(f, problem, T::lit(1e-12))?;
    if !compat.passed {
        return Err(UtmError::Incompatible(format!("{} fails {:?}", f.label(), compat.satisfied)));
    }
    let pair = TransformPair::for_datum(problem, f, opts)?;
    let f = Arc::new(f.clone());
    let sf = Arc::new(apply_s(f.as_ref())?);
    let data = pair.spectral_data(&f, (x, x))?;
    let sdata = pair.resample(&data, &sf)?;
    let rhs = pair.inverse(&data, x).value;
    let lhs = pair.inverse_weighted(&sdata, x, |z| (z * z * z).inv()).value;
    Ok(DiagonalisedInverse { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datum::{builtin_datum, Domain};
    use crate::scalar::cx;

    #[test]
    fn s_of_examples() {
        let f = builtin_datum::<f64>("hl_exp1").unwrap();
        let s = apply_s(&f).unwrap();
        for x in [0.0, 0.4, 2.0] {
            let want = cx(0.0, (3.0 - x) * (-x as f64).exp());
            assert!((s.value(x) - want).norm() < 1e-14);
        }
        let g = builtin_datum::<f64>("fi_poly1").unwrap();
        assert!((apply_s(&g).unwrap().value(0.3) - cx(0.0, 6.0)).norm() < 1e-13);
        assert_eq!(apply_s(&InitialDatum::<f64>::zero(Domain::HalfLine)).unwrap().value(1.0), re(0.0));
    }

    #[test]
    fn zero_datum_has_zero_residual() {
        let z = InitialDatum::<f64>::zero(Domain::UnitInterval);
        let r = eigen_relation_residual(ProblemId::FiniteIntervalKdV, &z, cx(2.0, 1.0), Sign::Plus).unwrap();
        assert_eq!(r, re(0.0));
    }

    #[test]
    fn remainder_is_entire() {
        let fam = RemainderFamily::new(ProblemId::FiniteIntervalKdV).unwrap();
        let f = builtin_datum::<f64>("fi_poly1").unwrap();
        let tr = BoundaryTraces::of(&f, fam.problem).unwrap();
        let h = 1e-5;
        for sign in [Sign::Plus, Sign::Minus] {
            let z = cx(0.7, -0.3);
            let dx = (fam.remainder(sign, z + h, &tr) - fam.remainder(sign, z - h, &tr)) / (2.0 * h);
            let dy = (fam.remainder(sign, z + cx(0.0, h), &tr) - fam.remainder(sign, z - cx(0.0, h), &tr)) / (2.0 * h);
            // d/d(lambda bar) = (d/dx + i d/dy) / 2
            assert!((dx + cx(0.0, 1.0) * dy).norm() < 1e-8);
        }
    }
}
