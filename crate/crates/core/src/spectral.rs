//! Root of unity, the characteristic function Delta, spectral functions
//! zeta^{+-} and the transform kernels phi^{+-}, with scaled forms that stay
//! finite for large |lambda|.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::datum::{Domain, InitialDatum, ProblemId};
use crate::error::{Result, UtmError};
use crate::scalar::{alpha, alpha_pow, i_unit, re, two_pi, Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Index `j` maximising `Im(alpha^j lambda)`, i.e. the dominant exponential
/// `e^{-i alpha^j lambda}` in Delta.
pub fn dominant_sector<T: Real>(lambda: Cx<T>) -> usize {
    (0..3)
        .map(|j| (j, (alpha_pow::<T>(j) * lambda).im))
        .fold((0, T::neg_infinity()), |best, (j, v)| if v > best.1 { (j, v) } else { best })
        .0
}

pub fn delta<T: Real>(lambda: Cx<T>) -> Cx<T> {
    let i = i_unit::<T>();
    (0..3).fold(re(T::zero()), |acc, k| {
        let a = alpha_pow::<T>(k);
        acc + a * (-i * a * lambda).exp()
    })
}

/// `Delta(lambda) * e^{i alpha^sector lambda}`.
pub fn delta_scaled<T: Real>(lambda: Cx<T>, sector: usize) -> Cx<T> {
    let i = i_unit::<T>();
    let aj = alpha_pow::<T>(sector);
    (0..3).fold(re(T::zero()), |acc, k| {
        let a = alpha_pow::<T>(k);
        acc + a * (-i * (a - aj) * lambda).exp()
    })
}

/// `Delta'(lambda) * e^{i alpha^sector lambda}`.
pub fn delta_prime_scaled<T: Real>(lambda: Cx<T>, sector: usize) -> Cx<T> {
    let i = i_unit::<T>();
    let aj = alpha_pow::<T>(sector);
    (0..3).fold(re(T::zero()), |acc, k| {
        let a = alpha_pow::<T>(k);
        acc - i * a * a * (-i * (a - aj) * lambda).exp()
    })
}

/// Logarithm of the scale factor removed by `delta_scaled`.
pub fn sector_log_scale<T: Real>(lambda: Cx<T>, sector: usize) -> Cx<T> {
    i_unit::<T>() * alpha_pow::<T>(sector) * lambda
}

/// Problem-specific bundle of transform, spectral functions and kernels for
/// one initial datum.
#[derive(Debug, Clone)]
pub struct SpectralContext<T: Real> {
    problem: ProblemId,
    datum: Arc<InitialDatum<T>>,
    continuation: bool,
}

impl<T: Real> SpectralContext<T> {
    pub fn new(problem: ProblemId, datum: Arc<InitialDatum<T>>) -> Result<Self> {
        if problem == ProblemId::HalfLineHeat {
            return Err(UtmError::Unsupported("the heat problem has no zeta/Delta structure".into()));
        }
        if datum.domain() != problem.domain() {
            return Err(UtmError::DomainMismatch { datum: datum.domain().to_string(), problem: problem.domain().to_string() });
        }
        Ok(SpectralContext { problem, datum, continuation: false })
    }

    /// Allow half-line transforms beyond `Im lambda < epsilon` through the
    /// datum's analytic continuation (needed on deformed half-line contours).
    pub fn with_continuation(mut self, on: bool) -> Result<Self> {
        if on && self.problem == ProblemId::HalfLineKdV && !self.datum.supports_continuation() {
            return Err(UtmError::Unsupported(format!(
                "datum '{}' has no usable analytic continuation of its transform",
                self.datum.label()
            )));
        }
        self.continuation = on;
        Ok(self)
    }

    pub fn problem(&self) -> ProblemId {
        self.problem
    }

    pub fn datum(&self) -> &Arc<InitialDatum<T>> {
        &self.datum
    }

    pub fn continuation(&self) -> bool {
        self.continuation
    }

    fn check_transform_domain(&self, mu: Cx<T>) -> Result<()> {
        if self.datum.domain() == Domain::HalfLine && !self.continuation {
            let eps = self.datum.decay_rate().unwrap_or(T::one());
            if mu.im >= eps {
                return Err(UtmError::TransformUndefined { re: mu.re.as_f64(), im: mu.im.as_f64(), epsilon: eps.as_f64() });
            }
        }
        Ok(())
    }

    /// `e^{shift} q0_hat(mu)`.
    fn qhat(&self, mu: Cx<T>, shift: Cx<T>) -> Result<Cx<T>> {
        self.check_transform_domain(mu)?;
        self.datum.transform_scaled(mu, shift)
    }

    pub fn fourier_transform(&self, lambda: Cx<T>) -> Result<Cx<T>> {
        self.qhat(lambda, re(T::zero()))
    }

    /// `zeta^{sign}(lambda) * e^{log_weight}`, unscaled in Delta.
    pub fn zeta_weighted(&self, sign: Sign, lambda: Cx<T>, log_weight: Cx<T>) -> Result<Cx<T>> {
        let i = i_unit::<T>();
        let a = alpha::<T>();
        let a2 = a * a;
        let w = log_weight;
        match (self.problem, sign) {
            (ProblemId::HalfLineKdV, Sign::Plus) => Ok(a * self.qhat(a * lambda, w)? + a2 * self.qhat(a2 * lambda, w)?),
            (ProblemId::HalfLineKdV, Sign::Minus) => self.qhat(lambda, w),
            (_, Sign::Plus) => {
                let s = |k: usize| w - i * alpha_pow::<T>(k) * lambda;
                Ok(a * self.qhat(lambda, s(1))? + a2 * self.qhat(lambda, s(2))?
                    - a * self.qhat(a * lambda, s(0))?
                    - a2 * self.qhat(a2 * lambda, s(0))?)
            }
            (_, Sign::Minus) => {
                Ok(-(self.qhat(lambda, w)? + a * self.qhat(a * lambda, w)? + a2 * self.qhat(a2 * lambda, w)?))
            }
        }
    }

    pub fn zeta(&self, sign: Sign, lambda: Cx<T>) -> Result<Cx<T>> {
        self.zeta_weighted(sign, lambda, re(T::zero()))
    }

    /// `zeta^{sign}(lambda) * e^{i alpha^sector lambda}`.
    pub fn zeta_scaled(&self, sign: Sign, lambda: Cx<T>, sector: usize) -> Result<Cx<T>> {
        self.zeta_weighted(sign, lambda, sector_log_scale(lambda, sector))
    }

    fn scaled_delta_checked(&self, lambda: Cx<T>) -> Result<(Cx<T>, usize)> {
        let j = dominant_sector(lambda);
        let d = delta_scaled(lambda, j);
        if d.norm() < T::lit(1e-13) || !d.re.is_finite() {
            return Err(UtmError::KernelPole { re: lambda.re.as_f64(), im: lambda.im.as_f64() });
        }
        Ok((d, j))
    }

    /// `e^{log_weight} F^{sign}_lambda(q0)` where F is the forward transform
    /// (kernels phi^{+-}). For the finite interval, `F^- = e^{-i lambda}
    /// zeta^- / (2 pi Delta)`, so that `e^{i lambda x} F^-` carries the
    /// factor `e^{i lambda (x-1)}`.
    pub fn forward_weighted(&self, sign: Sign, lambda: Cx<T>, log_weight: Cx<T>) -> Result<Cx<T>> {
        let tp = two_pi::<T>();
        let v = match self.problem {
            ProblemId::FiniteIntervalKdV => {
                let (d, j) = self.scaled_delta_checked(lambda)?;
                let mut w = log_weight + sector_log_scale(lambda, j);
                if sign == Sign::Minus {
                    w = w - i_unit::<T>() * lambda;
                }
                self.zeta_weighted(sign, lambda, w)? / (d * tp)
            }
            _ => self.zeta_weighted(sign, lambda, log_weight)? / tp,
        };
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(UtmError::NonFinite { re: lambda.re.as_f64(), im: lambda.im.as_f64() });
        }
        Ok(v)
    }

    /// `|zeta+ - e^{-i lambda} zeta- - q0_hat Delta| / (1 + |q0_hat Delta|)`,
    /// evaluated with every term scaled by the dominant exponential.
    pub fn identity_defect(&self, lambda: Cx<T>) -> Result<T> {
        if self.problem != ProblemId::FiniteIntervalKdV {
            return Err(UtmError::Unsupported("the zeta identity is a finite-interval statement".into()));
        }
        let j = dominant_sector(lambda);
        let w = sector_log_scale(lambda, j);
        let qd = self.qhat(lambda, re(T::zero()))? * delta_scaled(lambda, j);
        let lhs = self.zeta_weighted(Sign::Plus, lambda, w)? - self.zeta_weighted(Sign::Minus, lambda, w - i_unit::<T>() * lambda)?;
        let scale = w.re.exp();
        Ok((lhs - qd).norm() / (scale + qd.norm()))
    }

    pub fn forward(&self, sign: Sign, lambda: Cx<T>) -> Result<Cx<T>> {
        self.forward_weighted(sign, lambda, re(T::zero()))
    }

    /// Kernel phi^{sign}(x, lambda) of the forward transform.
    pub fn kernel_phi(&self, sign: Sign, x: T, lambda: Cx<T>) -> Result<Cx<T>> {
        let i = i_unit::<T>();
        let a = alpha::<T>();
        let a2 = a * a;
        let tp = two_pi::<T>();
        let e = |z: Cx<T>| z.exp();
        match (self.problem, sign) {
            (ProblemId::HalfLineKdV, Sign::Plus) => Ok((a * e(-i * a * lambda * x) + a2 * e(-i * a2 * lambda * x)) / tp),
            (ProblemId::HalfLineKdV, Sign::Minus) => Ok(e(-i * lambda * x) / tp),
            (_, s) => {
                if lambda.norm() == T::zero() {
                    return Err(UtmError::KernelPole { re: 0.0, im: 0.0 });
                }
                let (d, j) = self.scaled_delta_checked(lambda)?;
                let sc = sector_log_scale(lambda, j);
                let num = match s {
                    Sign::Plus => {
                        a * e(-i * lambda * x - i * a * lambda + sc) + a2 * e(-i * lambda * x - i * a2 * lambda + sc)
                            - a * e(-i * a * lambda * x - i * lambda + sc)
                            - a2 * e(-i * a2 * lambda * x - i * lambda + sc)
                    }
                    Sign::Minus => -(0..3).fold(re(T::zero()), |acc, k| {
                        let ak = alpha_pow::<T>(k);
                        acc + ak * e(-i * ak * lambda * x - i * lambda + sc)
                    }),
                };
                Ok(num / (d * tp))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datum::builtin_datum;
    use crate::scalar::cx;

    fn ctx(p: ProblemId, name: &str) -> SpectralContext<f64> {
        SpectralContext::new(p, Arc::new(builtin_datum(name).unwrap())).unwrap()
    }

    #[test]
    fn unity_root_identities() {
        let a = alpha::<f64>();
        assert!((a * a * a - re(1.0)).norm() < 1e-15);
        assert!((re(1.0) + a + a * a).norm() < 1e-15);
    }

    #[test]
    fn delta_vanishes_at_origin_and_matches_taylor() {
        assert!(delta::<f64>(re(0.0)).norm() < 1e-15);
        let l = cx(1e-3, 2e-3);
        let taylor = l * l * (-1.5);
        assert!((delta(l) - taylor).norm() < 1e-12 * taylor.norm() * 1e3);
    }

    #[test]
    fn scaled_delta_consistent() {
        for l in [cx(5.0f64, 0.0), cx(3.0, 7.0), cx(-20.0, -15.0), cx(0.3, 0.1)] {
            for j in 0..3 {
                let back = delta_scaled(l, j) * (-sector_log_scale(l, j)).exp();
                assert!((back - delta(l)).norm() <= 1e-13 * delta(l).norm().max(1e-300) * 10.0);
            }
        }
    }

    #[test]
    fn hl_kernel_examples() {
        let c = ctx(ProblemId::HalfLineKdV, "hl_exp1");
        let l = cx(1.3, -0.2);
        assert!((c.kernel_phi(Sign::Minus, 0.0, l).unwrap() - re(1.0 / two_pi::<f64>())).norm() < 1e-15);
        assert!((c.kernel_phi(Sign::Plus, 0.0, l).unwrap() + re(1.0 / two_pi::<f64>())).norm() < 1e-15);
    }

    #[test]
    fn fi_rejects_origin() {
        let c = ctx(ProblemId::FiniteIntervalKdV, "fi_poly1");
        assert!(matches!(c.kernel_phi(Sign::Plus, 0.5, re(0.0)), Err(UtmError::KernelPole { .. })));
        assert!(c.zeta(Sign::Minus, re(0.0)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn hl_transform_domain_is_enforced() {
        let c = ctx(ProblemId::HalfLineKdV, "hl_exp1");
        assert!(matches!(c.fourier_transform(cx(0.0, 0.5)), Err(UtmError::TransformUndefined { .. })));
        assert!(c.fourier_transform(cx(0.0, 0.49)).is_ok());
        let z = c.zeta(Sign::Minus, cx(2.0, 0.1)).unwrap();
        assert_eq!(z, c.fourier_transform(cx(2.0, 0.1)).unwrap());
        let c = c.with_continuation(true).unwrap();
        let v = c.fourier_transform(cx(0.0, 0.5)).unwrap();
        assert!((v - re(4.0)).norm() < 1e-12);
    }
}
