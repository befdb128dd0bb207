//! Initial data, boundary compatibility and the built-in test corpus.

mod profile;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use profile::{Custom, ExpPoly, ExpPolyTerm, Profile, RealFn, SpectralFn, Tabulated};

use crate::error::{Result, UtmError};
use crate::quadrature::adaptive;
use crate::scalar::{cx, re, Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProblemId {
    FiniteIntervalKdV,
    HalfLineKdV,
    HalfLineHeat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Domain {
    UnitInterval,
    HalfLine,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::UnitInterval => write!(f, "[0,1]"),
            Domain::HalfLine => write!(f, "[0,inf)"),
        }
    }
}

impl ProblemId {
    pub const ALL: [ProblemId; 3] = [ProblemId::FiniteIntervalKdV, ProblemId::HalfLineKdV, ProblemId::HalfLineHeat];

    pub fn domain(self) -> Domain {
        match self {
            ProblemId::FiniteIntervalKdV => Domain::UnitInterval,
            _ => Domain::HalfLine,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            ProblemId::FiniteIntervalKdV => "fi",
            ProblemId::HalfLineKdV => "hl",
            ProblemId::HalfLineHeat => "heat",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "fi" | "finite-interval" | "FiniteIntervalKdV" => Some(ProblemId::FiniteIntervalKdV),
            "hl" | "half-line" | "HalfLineKdV" => Some(ProblemId::HalfLineKdV),
            "heat" | "HalfLineHeat" => Some(ProblemId::HalfLineHeat),
            _ => None,
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

#[derive(Debug, Clone)]
pub struct InitialDatum<T: Real> {
    label: String,
    domain: Domain,
    decay_rate: Option<T>,
    profile: Profile<T>,
}

impl<T: Real> InitialDatum<T> {
    pub fn exp_poly(label: impl Into<String>, domain: Domain, decay_rate: Option<T>, f: ExpPoly<T>) -> Self {
        InitialDatum { label: label.into(), domain, decay_rate, profile: Profile::ExpPoly(f) }
    }

    pub fn tabulated(label: impl Into<String>, domain: Domain, decay_rate: Option<T>, table: Tabulated<T>) -> Result<Self> {
        let (a, b) = table.x_range();
        let tol = T::lit(1e-12);
        if a.abs() > tol {
            return Err(UtmError::BadTable("samples must start at x = 0".into()));
        }
        if domain == Domain::UnitInterval && (b - T::one()).abs() > tol {
            return Err(UtmError::BadTable("interval data must end at x = 1".into()));
        }
        Ok(InitialDatum { label: label.into(), domain, decay_rate, profile: Profile::Tabulated(table) })
    }

    pub fn custom(label: impl Into<String>, domain: Domain, decay_rate: Option<T>, profile: Custom<T>) -> Self {
        InitialDatum { label: label.into(), domain, decay_rate, profile: Profile::Custom(profile) }
    }

    pub fn zero(domain: Domain) -> Self {
        let decay = if domain == Domain::HalfLine { Some(T::one()) } else { None };
        InitialDatum::exp_poly("zero", domain, decay, ExpPoly::default())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn decay_rate(&self) -> Option<T> {
        self.decay_rate
    }

    pub fn profile(&self) -> &Profile<T> {
        &self.profile
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn value(&self, x: T) -> Cx<T> {
        if x < T::zero() || (self.domain == Domain::UnitInterval && x > T::one()) {
            return re(T::zero());
        }
        match &self.profile {
            Profile::ExpPoly(p) => p.value(x),
            Profile::Tabulated(t) => re(t.derivative(0, x)),
            Profile::Custom(c) => (c.value)(x),
        }
    }

    /// Highest derivative order available; `None` means unlimited.
    pub fn max_derivative_order(&self) -> Option<usize> {
        match &self.profile {
            Profile::ExpPoly(_) => None,
            Profile::Tabulated(_) => Some(3),
            Profile::Custom(c) => Some(c.derivatives.len()),
        }
    }

    pub fn derivative(&self, k: usize, x: T) -> Result<Cx<T>> {
        if k == 0 {
            return Ok(self.value(x));
        }
        if let Some(max) = self.max_derivative_order() {
            if k > max {
                return Err(UtmError::MissingDerivative { order: k, available: max });
            }
        }
        Ok(match &self.profile {
            Profile::ExpPoly(p) => p.nth_derivative(k).value(x),
            Profile::Tabulated(t) => re(t.derivative(k, x)),
            Profile::Custom(c) => (c.derivatives[k - 1])(x),
        })
    }

    pub fn has_closed_form(&self) -> bool {
        match &self.profile {
            Profile::ExpPoly(_) | Profile::Tabulated(_) => true,
            Profile::Custom(c) => c.transform.is_some(),
        }
    }

    /// Whether the transform may be evaluated beyond `Im lambda < epsilon` by
    /// analytic continuation without losing accuracy. Tabulated half-line data
    /// have an entire transform that grows like `e^{L Im lambda}` over the
    /// support length `L`, which makes it unusable there.
    pub fn supports_continuation(&self) -> bool {
        match &self.profile {
            Profile::ExpPoly(_) => true,
            Profile::Tabulated(_) => self.domain == Domain::UnitInterval,
            Profile::Custom(c) => c.transform.is_some(),
        }
    }

    pub fn closed_form_transform(&self, mu: Cx<T>) -> Option<Cx<T>> {
        match &self.profile {
            Profile::Custom(c) => c.transform.as_ref().map(|t| t(mu)),
            _ => Some(self.closed_form_scaled(mu, re(T::zero()))),
        }
    }

    fn closed_form_scaled(&self, mu: Cx<T>, shift: Cx<T>) -> Cx<T> {
        let interval = self.domain == Domain::UnitInterval;
        match &self.profile {
            Profile::ExpPoly(p) => p.transform_scaled(mu, shift, interval),
            Profile::Tabulated(t) => t.transform_scaled(mu, shift),
            Profile::Custom(c) => c.transform.as_ref().map(|t| t(mu) * shift.exp()).unwrap_or(re(T::zero())),
        }
    }

    /// `e^{shift} * q0_hat(mu)` with no domain check, from the closed form when
    /// there is one and otherwise by quadrature.
    pub fn transform_scaled(&self, mu: Cx<T>, shift: Cx<T>) -> Result<Cx<T>> {
        if self.has_closed_form() {
            return Ok(self.closed_form_scaled(mu, shift));
        }
        self.transform_by_quadrature(mu, shift).map(|(v, _)| v)
    }

    /// Adaptive quadrature of `e^{shift - i mu x} q0(x)`; returns the value and
    /// its error estimate. The half-line integral is truncated at
    /// `40 / (epsilon - Im mu)`.
    pub fn transform_by_quadrature(&self, mu: Cx<T>, shift: Cx<T>) -> Result<(Cx<T>, T)> {
        let i = cx(T::zero(), T::one());
        let (end, tol) = match self.domain {
            Domain::UnitInterval => {
                let growth = (shift.re + mu.im.max(T::zero())).exp().max(shift.re.exp());
                (T::one(), T::lit(1e-13) * growth.max(T::one()))
            }
            Domain::HalfLine => {
                let eps = self.decay_rate.unwrap_or(T::one());
                let gap = eps - mu.im;
                if gap <= T::zero() {
                    return Err(UtmError::TransformUndefined { re: mu.re.as_f64(), im: mu.im.as_f64(), epsilon: eps.as_f64() });
                }
                (T::lit(40.0) / gap, T::lit(1e-13) * shift.re.exp().max(T::lit(1e-300)))
            }
        };
        let waves = (mu.norm() * end / crate::scalar::two_pi::<T>()).ceil().max(T::one());
        let n = (waves.to_usize().unwrap_or(1)).clamp(1, 100_000);
        let h = end / T::lit(n as f64);
        let panels: Vec<(T, T)> = (0..n).map(|k| (h * T::lit(k as f64), h * T::lit((k + 1) as f64))).collect();
        let mut f = |x: T| Ok(self.value(x) * (shift - i * mu * x).exp());
        let out = adaptive(&mut f, &panels, tol, T::zero(), 200_000)?;
        if !out.converged {
            return Err(UtmError::Unsupported(format!(
                "transform quadrature did not converge (estimate {:e})",
                out.error.as_f64()
            )));
        }
        Ok((out.value, out.error))
    }

    /// `sup |f(x)| e^{epsilon x}` over samples of `[0, 50/epsilon]`; `None` for
    /// interval data. Finite for data in the decaying class.
    pub fn decay_bound(&self, samples: usize) -> Option<T> {
        let eps = self.decay_rate?;
        if self.domain != Domain::HalfLine {
            return None;
        }
        let end = T::lit(50.0) / eps;
        let mut sup = T::zero();
        for k in 0..=samples {
            let x = end * T::lit(k as f64 / samples as f64);
            sup = sup.max(self.value(x).norm() * (eps * x).exp());
        }
        Some(sup)
    }

    /// L1 norm over the domain (half-line truncated at `60 / epsilon`).
    pub fn l1_norm(&self) -> Result<T> {
        let end = match self.domain {
            Domain::UnitInterval => T::one(),
            Domain::HalfLine => T::lit(60.0) / self.decay_rate.unwrap_or(T::one()),
        };
        let n = 64;
        let h = end / T::lit(n as f64);
        let panels: Vec<(T, T)> = (0..n).map(|k| (h * T::lit(k as f64), h * T::lit((k + 1) as f64))).collect();
        let mut f = |x: T| Ok(re(self.value(x).norm()));
        Ok(adaptive(&mut f, &panels, T::lit(1e-12), T::lit(1e-10), 10_000)?.value.re)
    }

    /// Linear combination `a f + b g` of two exponential-polynomial data.
    pub fn combine(a: Cx<T>, f: &Self, b: Cx<T>, g: &Self) -> Result<Self> {
        match (&f.profile, &g.profile) {
            (Profile::ExpPoly(p), Profile::ExpPoly(q)) if f.domain == g.domain => {
                let decay = match (f.decay_rate, g.decay_rate) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    (x, y) => x.or(y),
                };
                Ok(InitialDatum::exp_poly(
                    format!("{}*{}+{}*{}", a, f.label, b, g.label),
                    f.domain,
                    decay,
                    p.scale(a).plus(&q.scale(b)),
                ))
            }
            _ => Err(UtmError::Unsupported("combination needs exponential-polynomial data on one domain".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompatibilityReport {
    pub satisfied: Vec<(String, f64)>,
    pub passed: bool,
}

pub fn check_compatibility<T: Real>(datum: &InitialDatum<T>, problem: ProblemId, tol: T) -> Result<CompatibilityReport> {
    if datum.domain() != problem.domain() {
        return Err(UtmError::DomainMismatch { datum: datum.domain().to_string(), problem: problem.domain().to_string() });
    }
    let mut satisfied = vec![("f(0)".to_string(), datum.value(T::zero()).norm().as_f64())];
    if problem == ProblemId::FiniteIntervalKdV {
        satisfied.push(("f(1)".to_string(), datum.value(T::one()).norm().as_f64()));
        satisfied.push(("f'(1)".to_string(), datum.derivative(1, T::one())?.norm().as_f64()));
    }
    let passed = satisfied.iter().all(|(_, r)| *r <= tol.as_f64());
    Ok(CompatibilityReport { satisfied, passed })
}

pub const BUILTIN_NAMES: [&str; 9] =
    ["fi_poly1", "fi_poly2", "hl_exp1", "hl_exp2", "heat_exp", "fi_sine", "fi_unit", "hl_decay", "fi_poly3"];

/// Built-in test corpus. `fi_sine` (sin(pi x)), `fi_unit` (1 on [0,1]) and
/// `hl_decay` (e^{-x}) violate the boundary conditions and exist for rejection
/// tests. `fi_poly3` = x^3 (1-x)^2 has f'(0) = f''(0) = 0.
pub fn builtin_datum<T: Real>(name: &str) -> Result<InitialDatum<T>> {
    let half = Some(T::lit(0.5));
    let fi = Domain::UnitInterval;
    let hl = Domain::HalfLine;
    let datum = match name {
        // x - 2x^2 + x^3
        "fi_poly1" => InitialDatum::exp_poly(name, fi, None, ExpPoly::new(vec![ExpPolyTerm::real(&[0.0, 1.0, -2.0, 1.0], 0.0)])),
        // x^2 - 3x^3 + 3x^4 - x^5
        "fi_poly2" => InitialDatum::exp_poly(
            name,
            fi,
            None,
            ExpPoly::new(vec![ExpPolyTerm::real(&[0.0, 0.0, 1.0, -3.0, 3.0, -1.0], 0.0)]),
        ),
        "fi_poly3" => InitialDatum::exp_poly(
            name,
            fi,
            None,
            ExpPoly::new(vec![ExpPolyTerm::real(&[0.0, 0.0, 0.0, 1.0, -2.0, 1.0], 0.0)]),
        ),
        "hl_exp1" | "heat_exp" => InitialDatum::exp_poly(name, hl, half, ExpPoly::new(vec![ExpPolyTerm::real(&[0.0, 1.0], 1.0)])),
        "hl_exp2" => InitialDatum::exp_poly(name, hl, half, ExpPoly::new(vec![ExpPolyTerm::real(&[0.0, 0.0, 1.0], 1.0)])),
        "hl_decay" => InitialDatum::exp_poly(name, hl, half, ExpPoly::new(vec![ExpPolyTerm::real(&[1.0], 1.0)])),
        "fi_unit" => InitialDatum::exp_poly(name, fi, None, ExpPoly::new(vec![ExpPolyTerm::real(&[1.0], 0.0)])),
        "fi_sine" => {
            // (e^{i pi x} - e^{-i pi x}) / 2i
            let pi = T::PI();
            let c = cx(T::zero(), T::lit(-0.5));
            InitialDatum::exp_poly(
                name,
                fi,
                None,
                ExpPoly::new(vec![
                    ExpPolyTerm::new(vec![c], cx(T::zero(), -pi)),
                    ExpPolyTerm::new(vec![-c], cx(T::zero(), pi)),
                ]),
            )
        }
        _ => return Err(UtmError::UnknownDatum(name.to_string())),
    };
    Ok(datum)
}

/// Wraps closures as a datum; convenient for tests and user code.
pub fn datum_from_fn<T: Real>(
    label: &str,
    domain: Domain,
    decay_rate: Option<T>,
    value: impl Fn(T) -> Cx<T> + Send + Sync + 'static,
    derivatives: Vec<RealFn<T>>,
) -> InitialDatum<T> {
    InitialDatum::custom(label, domain, decay_rate, Custom { value: Arc::new(value), derivatives, transform: None })
}
