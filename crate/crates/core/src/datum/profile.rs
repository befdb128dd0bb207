use std::fmt;
use std::sync::Arc;

use crate::error::{Result, UtmError};
use crate::quadrature::{poly_derivative, poly_eval, poly_exp_integral};
use crate::scalar::{re, Cx, Real};

/// `P(x) e^{-rate x}` with `P` given by ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpPolyTerm<T: Real> {
    pub poly: Vec<Cx<T>>,
    pub rate: Cx<T>,
}

impl<T: Real> ExpPolyTerm<T> {
    pub fn new(poly: Vec<Cx<T>>, rate: Cx<T>) -> Self {
        ExpPolyTerm { poly, rate }
    }

    pub fn real(poly: &[f64], rate: f64) -> Self {
        ExpPolyTerm {
            poly: poly.iter().map(|&c| re(T::lit(c))).collect(),
            rate: re(T::lit(rate)),
        }
    }

    fn derivative(&self) -> Self {
        let dp = poly_derivative(&self.poly);
        let mut poly: Vec<Cx<T>> = self.poly.iter().map(|c| -*c * self.rate).collect();
        for (k, c) in dp.into_iter().enumerate() {
            poly[k] = poly[k] + c;
        }
        while poly.last().is_some_and(|c| c.norm() == T::zero()) {
            poly.pop();
        }
        ExpPolyTerm { poly, rate: self.rate }
    }

    fn value(&self, x: T) -> Cx<T> {
        poly_eval(&self.poly, x) * (-self.rate * x).exp()
    }
}

/// Finite sum of exponential-polynomial terms. Derivatives of every order and
/// the Fourier transform (with its analytic continuation) are exact.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpPoly<T: Real> {
    pub terms: Vec<ExpPolyTerm<T>>,
}

impl<T: Real> ExpPoly<T> {
    pub fn new(terms: Vec<ExpPolyTerm<T>>) -> Self {
        ExpPoly { terms }
    }

    pub fn value(&self, x: T) -> Cx<T> {
        self.terms.iter().fold(re(T::zero()), |acc, t| acc + t.value(x))
    }

    pub fn derivative(&self) -> Self {
        ExpPoly { terms: self.terms.iter().map(|t| t.derivative()).collect() }
    }

    pub fn nth_derivative(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |acc, _| acc.derivative())
    }

    pub fn scale(&self, c: Cx<T>) -> Self {
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|t| ExpPolyTerm { poly: t.poly.iter().map(|v| *v * c).collect(), rate: t.rate })
                .collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        ExpPoly { terms }
    }

    /// `e^{shift} * int e^{-i mu x} f(x) dx` over `[0, 1]` (`interval`) or `[0, inf)`.
    pub fn transform_scaled(&self, mu: Cx<T>, shift: Cx<T>, interval: bool) -> Cx<T> {
        let i = Cx::new(T::zero(), T::one());
        let h = if interval { Some(T::one()) } else { None };
        self.terms
            .iter()
            .fold(re(T::zero()), |acc, t| acc + poly_exp_integral(&t.poly, t.rate + i * mu, h, shift))
    }

    /// Smallest real part of the exponential rates; the half-line transform
    /// integral converges for `Im mu` below it.
    pub fn min_rate(&self) -> Option<T> {
        self.terms.iter().map(|t| t.rate.re).reduce(T::min)
    }
}

/// Sampled data `x, f, f', f'', f'''` with cubic Hermite interpolation between
/// samples. Outside the sampled range the profile is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated<T: Real> {
    x: Vec<T>,
    cols: [Vec<T>; 4],
    // Local cubic for the value on each interval, in powers of (x - x_i).
    value_cubics: Vec<[Cx<T>; 4]>,
}

fn hermite<T: Real>(h: T, y0: T, y1: T, d0: T, d1: T) -> [T; 4] {
    let c2 = (T::lit(3.0) * (y1 - y0) / h - T::lit(2.0) * d0 - d1) / h;
    let c3 = (d0 + d1 - T::lit(2.0) * (y1 - y0) / h) / (h * h);
    [y0, d0, c2, c3]
}

impl<T: Real> Tabulated<T> {
    pub fn new(x: Vec<T>, f: Vec<T>, f1: Vec<T>, f2: Vec<T>, f3: Vec<T>) -> Result<Self> {
        let n = x.len();
        if n < 2 {
            return Err(UtmError::BadTable("need at least two samples".into()));
        }
        if [f.len(), f1.len(), f2.len(), f3.len()].iter().any(|&m| m != n) {
            return Err(UtmError::BadTable("columns have different lengths".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(UtmError::BadTable("x must be strictly increasing".into()));
        }
        let all_finite = x.iter().chain(&f).chain(&f1).chain(&f2).chain(&f3).all(|v| v.is_finite());
        if !all_finite {
            return Err(UtmError::BadTable("non-finite entry".into()));
        }
        let value_cubics = (0..n - 1)
            .map(|i| {
                let c = hermite(x[i + 1] - x[i], f[i], f[i + 1], f1[i], f1[i + 1]);
                [re(c[0]), re(c[1]), re(c[2]), re(c[3])]
            })
            .collect();
        Ok(Tabulated { x, cols: [f, f1, f2, f3], value_cubics })
    }

    pub fn x_range(&self) -> (T, T) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    fn locate(&self, x: T) -> Option<usize> {
        let (a, b) = self.x_range();
        if x < a || x > b {
            return None;
        }
        let idx = self.x.partition_point(|&v| v <= x);
        Some(idx.saturating_sub(1).min(self.x.len() - 2))
    }

    /// Derivative of order `k <= 3` of the interpolant family: order k is the
    /// Hermite cubic of columns (k, k+1); order 3 is linear in the last column.
    pub fn derivative(&self, k: usize, x: T) -> T {
        let Some(i) = self.locate(x) else { return T::zero() };
        let h = self.x[i + 1] - self.x[i];
        let u = x - self.x[i];
        if k >= 3 {
            let w = u / h;
            return self.cols[3][i] * (T::one() - w) + self.cols[3][i + 1] * w;
        }
        let y = &self.cols[k];
        let d = &self.cols[k + 1];
        let c = hermite(h, y[i], y[i + 1], d[i], d[i + 1]);
        ((c[3] * u + c[2]) * u + c[1]) * u + c[0]
    }

    /// Exact transform of the piecewise-cubic value interpolant.
    pub fn transform_scaled(&self, mu: Cx<T>, shift: Cx<T>) -> Cx<T> {
        let s = Cx::new(T::zero(), T::one()) * mu;
        let mut acc = re(T::zero());
        for (i, c) in self.value_cubics.iter().enumerate() {
            let a = self.x[i];
            let h = self.x[i + 1] - a;
            acc = acc + poly_exp_integral(c, s, Some(h), shift - s * a);
        }
        acc
    }
}

pub type RealFn<T> = Arc<dyn Fn(T) -> Cx<T> + Send + Sync>;
pub type SpectralFn<T> = Arc<dyn Fn(Cx<T>) -> Cx<T> + Send + Sync>;

/// Closure-backed profile: value, derivatives `1..=derivatives.len()`, and an
/// optional closed-form transform.
#[derive(Clone)]
pub struct Custom<T: Real> {
    pub value: RealFn<T>,
    pub derivatives: Vec<RealFn<T>>,
    pub transform: Option<SpectralFn<T>>,
}

impl<T: Real> fmt::Debug for Custom<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Custom")
            .field("derivatives", &self.derivatives.len())
            .field("transform", &self.transform.is_some())
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum Profile<T: Real> {
    ExpPoly(ExpPoly<T>),
    Tabulated(Tabulated<T>),
    Custom(Custom<T>),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_poly_derivative_matches_hand_computation() {
        // x e^{-x}: f' = (1 - x) e^{-x}, f'' = (x - 2) e^{-x}, f''' = (3 - x) e^{-x}
        let f = ExpPoly::new(vec![ExpPolyTerm::<f64>::real(&[0.0, 1.0], 1.0)]);
        let x = 0.7;
        let e = (-x as f64).exp();
        assert!((f.nth_derivative(1).value(x).re - (1.0 - x) * e).abs() < 1e-15);
        assert!((f.nth_derivative(2).value(x).re - (x - 2.0) * e).abs() < 1e-15);
        assert!((f.nth_derivative(3).value(x).re - (3.0 - x) * e).abs() < 1e-15);
    }

    #[test]
    fn hermite_reproduces_cubics() {
        // f = x^3 - x sampled with exact derivatives is reproduced exactly.
        let xs: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        let f: Vec<f64> = xs.iter().map(|x| x * x * x - x).collect();
        let f1: Vec<f64> = xs.iter().map(|x| 3.0 * x * x - 1.0).collect();
        let f2: Vec<f64> = xs.iter().map(|x| 6.0 * x).collect();
        let f3 = vec![6.0; xs.len()];
        let t = Tabulated::new(xs, f, f1, f2, f3).unwrap();
        for x in [0.03, 0.5, 0.77, 1.0] {
            assert!((t.derivative(0, x) - (x * x * x - x)).abs() < 1e-14);
            assert!((t.derivative(1, x) - (3.0 * x * x - 1.0)).abs() < 1e-14);
            assert!((t.derivative(2, x) - 6.0 * x).abs() < 1e-14);
            assert!((t.derivative(3, x) - 6.0).abs() < 1e-14);
        }
        // transform at mu = 0 is the integral of x^3 - x over [0, 1]
        let v = t.transform_scaled(re(0.0), re(0.0));
        assert!((v.re - (0.25 - 0.5)).abs() < 1e-14);
    }
}
