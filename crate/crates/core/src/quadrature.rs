//! Gauss-Kronrod and Gauss-Legendre rules plus a globally adaptive driver.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::{Mutex, OnceLock};

use crate::error::Result;
use crate::scalar::{re, Cx, Real};

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208745027766,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

// Gauss weights for the odd-indexed Kronrod abscissae.
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// One node of the 21-point Kronrod rule on [-1, 1]: (abscissa, kronrod weight, gauss weight).
pub fn gk21_nodes() -> [(f64, f64, f64); 21] {
    let mut out = [(0.0, 0.0, 0.0); 21];
    for j in 0..10 {
        let wg = if j % 2 == 1 { WG[j / 2] } else { 0.0 };
        out[2 * j] = (-XGK[j], WGK[j], wg);
        out[2 * j + 1] = (XGK[j], WGK[j], wg);
    }
    out[20] = (0.0, WGK[10], 0.0);
    out
}

/// Kronrod estimate and |Kronrod - Gauss| on [a, b].
pub fn gk21<T, F>(f: &mut F, a: T, b: T) -> Result<(Cx<T>, T)>
where
    T: Real,
    F: FnMut(T) -> Result<Cx<T>>,
{
    let half = (b - a) / T::lit(2.0);
    let mid = (a + b) / T::lit(2.0);
    let mut k = re(T::zero());
    let mut g = re(T::zero());
    for (x, wk, wg) in gk21_nodes() {
        let v = f(mid + half * T::lit(x))?;
        k = k + v * T::lit(wk);
        if wg != 0.0 {
            g = g + v * T::lit(wg);
        }
    }
    Ok((k * half, ((k - g) * half).norm()))
}

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOutcome<T: Real> {
    pub value: Cx<T>,
    pub error: T,
    pub evaluations: usize,
    pub converged: bool,
}

struct Panel<T: Real> {
    a: T,
    b: T,
    value: Cx<T>,
    error: T,
}

impl<T: Real> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real> Eq for Panel<T> {}
impl<T: Real> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// Globally adaptive 21-point Gauss-Kronrod integration over a union of
/// initial panels. Panels with the largest error estimate are bisected until
/// the total estimate is below `max(abs_tol, rel_tol * |I|)`.
pub fn adaptive<T, F>(
    f: &mut F,
    initial: &[(T, T)],
    abs_tol: T,
    rel_tol: T,
    max_panels: usize,
) -> Result<AdaptiveOutcome<T>>
where
    T: Real,
    F: FnMut(T) -> Result<Cx<T>>,
{
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for &(a, b) in initial {
        if a == b {
            continue;
        }
        let (value, error) = gk21(f, a, b)?;
        evaluations += 21;
        heap.push(Panel { a, b, value, error });
    }
    let totals = |heap: &BinaryHeap<Panel<T>>| {
        heap.iter().fold((re(T::zero()), T::zero()), |(v, e), p| (v + p.value, e + p.error))
    };
    let (mut value, mut error) = totals(&heap);
    let mut converged = true;
    while error > abs_tol.max(rel_tol * value.norm()) {
        if heap.len() >= max_panels {
            converged = false;
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = (worst.a + worst.b) / T::lit(2.0);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // Panel cannot be split further at this precision.
            heap.push(worst);
            converged = false;
            break;
        }
        let (v1, e1) = gk21(f, worst.a, mid)?;
        let (v2, e2) = gk21(f, mid, worst.b)?;
        evaluations += 42;
        value = value - worst.value + v1 + v2;
        error = error - worst.error + e1 + e2;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
        if heap.len() % 64 == 0 {
            (value, error) = totals(&heap);
        }
    }
    let (value, error) = totals(&heap);
    Ok(AdaptiveOutcome { value, error, evaluations, converged })
}

/// Gauss-Legendre abscissae and weights on [-1, 1], computed once per order.
pub fn gauss_legendre(n: usize) -> &'static [(f64, f64)] {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static [(f64, f64)]>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("gauss-legendre cache poisoned");
    map.entry(n).or_insert_with(|| Box::leak(legendre_rule(n).into_boxed_slice()))
}

fn legendre_rule(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.reverse();
    out
}

/// Coefficients (ascending powers) of the derivative of a polynomial.
pub fn poly_derivative<T: Real>(c: &[Cx<T>]) -> Vec<Cx<T>> {
    c.iter().enumerate().skip(1).map(|(k, v)| *v * T::lit(k as f64)).collect()
}

pub fn poly_eval<T: Real>(c: &[Cx<T>], x: T) -> Cx<T> {
    c.iter().rev().fold(re(T::zero()), |acc, v| acc * x + *v)
}

/// `e^{shift} * int_0^h p(u) e^{-s u} du` for a polynomial `p`; `h = None`
/// means the half-line, where the result is the analytic continuation
/// `sum_k p^{(k)}(0) / s^{k+1}`.
pub fn poly_exp_integral<T: Real>(p: &[Cx<T>], s: Cx<T>, h: Option<T>, shift: Cx<T>) -> Cx<T> {
    if p.is_empty() {
        return re(T::zero());
    }
    match h {
        None => {
            let mut acc = re(T::zero());
            let mut d = p.to_vec();
            let mut spow = s;
            let e0 = shift.exp();
            while !d.is_empty() {
                acc = acc + d[0] * e0 / spow;
                d = poly_derivative(&d);
                spow = spow * s;
            }
            acc
        }
        Some(h) => {
            if s.norm() * h <= T::lit(8.0) {
                let half = h / T::lit(2.0);
                let mut acc = re(T::zero());
                for &(x, w) in gauss_legendre(32) {
                    let u = half + half * T::lit(x);
                    acc = acc + poly_eval(p, u) * (shift - s * u).exp() * T::lit(w);
                }
                acc * half
            } else {
                let e0 = shift.exp();
                let eh = (shift - s * h).exp();
                let mut acc = re(T::zero());
                let mut d = p.to_vec();
                let mut spow = s;
                while !d.is_empty() {
                    acc = acc + (d[0] * e0 - poly_eval(&d, h) * eh) / spow;
                    d = poly_derivative(&d);
                    spow = spow * s;
                }
                acc
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [5, 10, 32] {
            let rule = gauss_legendre(n);
            let total: f64 = rule.iter().map(|&(_, w)| w).sum();
            assert!((total - 2.0).abs() < 1e-14);
            // x^{2n-2} integrates to 2/(2n-1)
            let m = 2 * n - 2;
            let v: f64 = rule.iter().map(|&(x, w)| w * x.powi(m as i32)).sum();
            assert!((v - 2.0 / (m as f64 + 1.0)).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn kronrod_weights_sum_to_two() {
        let nodes = gk21_nodes();
        let k: f64 = nodes.iter().map(|n| n.1).sum();
        let g: f64 = nodes.iter().map(|n| n.2).sum();
        assert!((k - 2.0).abs() < 1e-14);
        assert!((g - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_oscillation() {
        // int_0^50 cos(10 x) e^{-x/10} dx
        let mut f = |x: f64| Ok(re((10.0 * x).cos() * (-x / 10.0).exp()));
        let out = adaptive(&mut f, &[(0.0, 50.0)], 1e-13, 0.0, 10_000).unwrap();
        let a: f64 = 0.1;
        let b: f64 = 10.0;
        let exact = (a + (-50.0 * a).exp() * (b * (50.0 * b).sin() - a * (50.0 * b).cos())) / (a * a + b * b);
        assert!((out.value.re - exact).abs() < 1e-12, "{} vs {}", out.value.re, exact);
        assert!(out.converged);
    }

    #[test]
    fn poly_exp_branches_agree() {
        // p(u) = 1 - 3u + u^3 on [0, 1]
        let p = vec![re(1.0), re(-3.0), re(0.0), re(1.0)];
        for s in [Cx::new(0.3, 2.0), Cx::new(-1.0, 7.9), Cx::new(5.0, -6.5), Cx::new(-2.0, 30.0)] {
            let closed = poly_exp_integral(&p, s, Some(1.0), re(0.0));
            let mut f = |u: f64| Ok(poly_eval(&p, u) * (-s * u).exp());
            let num = adaptive(&mut f, &[(0.0, 1.0)], 1e-15, 0.0, 1000).unwrap().value;
            assert!((closed - num).norm() < 1e-12 * (1.0 + num.norm()), "s={s}");
        }
    }
}
