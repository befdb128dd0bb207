use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use serde::Serialize;

/// Real scalar the numerical core is generic over.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Default + Serialize + Send + Sync + 'static
{
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal fits the scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type Cx<T> = Complex<T>;

pub fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

pub fn re<T: Real>(v: T) -> Cx<T> {
    Complex::new(v, T::zero())
}

pub fn i_unit<T: Real>() -> Cx<T> {
    Complex::new(T::zero(), T::one())
}

/// e^{i theta}
pub fn cis<T: Real>(theta: T) -> Cx<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Principal cube root of unity e^{2 pi i / 3} and its powers.
pub fn alpha<T: Real>() -> Cx<T> {
    Complex::new(T::lit(-0.5), T::lit(3.0).sqrt() / T::lit(2.0))
}

pub fn alpha_pow<T: Real>(k: usize) -> Cx<T> {
    match k % 3 {
        0 => re(T::one()),
        1 => alpha(),
        _ => alpha::<T>().conj(),
    }
}

pub fn two_pi<T: Real>() -> T {
    T::lit(2.0) * T::PI()
}

pub fn is_finite<T: Real>(z: Cx<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
