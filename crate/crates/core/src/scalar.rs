//! Coordinate scalars shared by the real and exact stages.
//!
//! Exact stages use [`Rat`]; the real stage uses [`RealScalar`], whose sign
//! test absorbs decimal rounding with an absolute tolerance of 1e-9.

use std::fmt::Debug;

use crate::exactmath::{Rat, RealScalar};

/// Absolute tolerance used for every real-stage zero test.
pub const REAL_TOLERANCE: f64 = 1e-9;

/// A scalar value at a specific numeric stage, used when converting between
/// scalar types.
#[derive(Clone, Debug)]
pub enum AnyNum {
    Float(f64),
    Exact(Rat),
}

pub trait Scalar: Clone + Debug + Send + Sync + 'static {
    /// True for exact arithmetic (rational/integral stages).
    const EXACT: bool;

    fn zero() -> Self;
    fn from_i64(n: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// -1, 0 or 1; within tolerance for inexact scalars.
    fn sign(&self) -> i8;
    fn to_f64(&self) -> f64;
    fn to_any(&self) -> AnyNum;
    fn from_any(n: &AnyNum) -> Self;

    fn is_zero(&self) -> bool {
        self.sign() == 0
    }

    fn approx_eq(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }

    fn convert<T: Scalar>(&self) -> T {
        T::from_any(&self.to_any())
    }
}

impl Scalar for Rat {
    const EXACT: bool = true;

    fn zero() -> Rat {
        Rat::zero()
    }
    fn from_i64(n: i64) -> Rat {
        Rat::from(n)
    }
    fn add(&self, o: &Rat) -> Rat {
        self + o
    }
    fn sub(&self, o: &Rat) -> Rat {
        self - o
    }
    fn mul(&self, o: &Rat) -> Rat {
        self * o
    }
    fn div(&self, o: &Rat) -> Rat {
        self / o
    }
    fn neg(&self) -> Rat {
        -self
    }
    fn sign(&self) -> i8 {
        self.signum()
    }
    fn to_f64(&self) -> f64 {
        Rat::to_f64(self)
    }
    fn to_any(&self) -> AnyNum {
        AnyNum::Exact(self.clone())
    }
    fn from_any(n: &AnyNum) -> Rat {
        match n {
            AnyNum::Exact(r) => r.clone(),
            AnyNum::Float(x) => Rat::from_f64_exact(*x).expect("finite real scalar"),
        }
    }
}

fn real(v: f64) -> RealScalar {
    RealScalar::new(v).expect("real-stage arithmetic overflowed")
}

impl Scalar for RealScalar {
    const EXACT: bool = false;

    fn zero() -> RealScalar {
        real(0.0)
    }
    fn from_i64(n: i64) -> RealScalar {
        real(n as f64)
    }
    fn add(&self, o: &RealScalar) -> RealScalar {
        real(self.value() + o.value())
    }
    fn sub(&self, o: &RealScalar) -> RealScalar {
        real(self.value() - o.value())
    }
    fn mul(&self, o: &RealScalar) -> RealScalar {
        real(self.value() * o.value())
    }
    fn div(&self, o: &RealScalar) -> RealScalar {
        real(self.value() / o.value())
    }
    fn neg(&self) -> RealScalar {
        real(-self.value())
    }
    fn sign(&self) -> i8 {
        let v = self.value();
        if v.abs() <= REAL_TOLERANCE {
            0
        } else if v > 0.0 {
            1
        } else {
            -1
        }
    }
    fn to_f64(&self) -> f64 {
        self.value()
    }
    fn to_any(&self) -> AnyNum {
        AnyNum::Float(self.value())
    }
    fn from_any(n: &AnyNum) -> RealScalar {
        match n {
            AnyNum::Float(x) => real(*x),
            AnyNum::Exact(r) => real(r.to_f64()),
        }
    }
}

/// A point or displacement in the plane.
#[derive(Clone, Debug)]
pub struct Vec2<S> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> Vec2<S> {
    pub fn new(x: S, y: S) -> Vec2<S> {
        Vec2 { x, y }
    }

    pub fn zero() -> Vec2<S> {
        Vec2::new(S::zero(), S::zero())
    }

    pub fn from_i64(x: i64, y: i64) -> Vec2<S> {
        Vec2::new(S::from_i64(x), S::from_i64(y))
    }

    pub fn add(&self, o: &Vec2<S>) -> Vec2<S> {
        Vec2::new(self.x.add(&o.x), self.y.add(&o.y))
    }

    pub fn sub(&self, o: &Vec2<S>) -> Vec2<S> {
        Vec2::new(self.x.sub(&o.x), self.y.sub(&o.y))
    }

    pub fn neg(&self) -> Vec2<S> {
        Vec2::new(self.x.neg(), self.y.neg())
    }

    pub fn scale(&self, k: &S) -> Vec2<S> {
        Vec2::new(self.x.mul(k), self.y.mul(k))
    }

    pub fn cross(&self, o: &Vec2<S>) -> S {
        self.x.mul(&o.y).sub(&self.y.mul(&o.x))
    }

    pub fn dot(&self, o: &Vec2<S>) -> S {
        self.x.mul(&o.x).add(&self.y.mul(&o.y))
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn approx_eq(&self, o: &Vec2<S>) -> bool {
        self.x.approx_eq(&o.x) && self.y.approx_eq(&o.y)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }

    pub fn convert<T: Scalar>(&self) -> Vec2<T> {
        Vec2::new(self.x.convert(), self.y.convert())
    }
}

impl<S: Scalar> PartialEq for Vec2<S> {
    /// Exact equality at exact stages, tolerance-based at the real stage.
    fn eq(&self, o: &Vec2<S>) -> bool {
        self.approx_eq(o)
    }
}

/// Orientation of `c` relative to the directed line `a -> b`.
pub fn orient<S: Scalar>(a: &Vec2<S>, b: &Vec2<S>, c: &Vec2<S>) -> i8 {
    b.sub(a).cross(&c.sub(a)).sign()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_sign_uses_tolerance() {
        let tiny = RealScalar::new(5e-10).unwrap();
        assert_eq!(tiny.sign(), 0);
        assert_eq!(RealScalar::new(2e-9).unwrap().sign(), 1);
    }

    #[test]
    fn conversion_between_stages() {
        let half = RealScalar::new(0.5).unwrap();
        let r: Rat = half.convert();
        assert_eq!(r, Rat::new(1, 2));
        let back: RealScalar = r.convert();
        assert_eq!(back.value(), 0.5);
    }

    #[test]
    fn orientation_of_points() {
        let a = Vec2::<Rat>::from_i64(0, 0);
        let b = Vec2::from_i64(1, 0);
        assert_eq!(orient(&a, &b, &Vec2::from_i64(0, 1)), 1);
        assert_eq!(orient(&a, &b, &Vec2::from_i64(0, -1)), -1);
        assert_eq!(orient(&a, &b, &Vec2::from_i64(5, 0)), 0);
    }
}
