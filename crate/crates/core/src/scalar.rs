//! Scalar abstraction shared by every geometric routine.
//!
//! Coordinates are generic over [`Scalar`], implemented for `f32` and `f64`.
//! Weights, densities and error values stay `f64` regardless of the
//! coordinate type.

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::{de::DeserializeOwned, Serialize};
use std::fmt::{Debug, Display};

/// Floating point coordinate type: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Default
    + Debug
    + Display
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Default relative tolerance used by [`Tolerance::default`].
    const DEFAULT_REL_TOL: f64;
    /// Default absolute tolerance used by [`Tolerance::default`].
    const DEFAULT_ABS_TOL: f64;
    /// Slope used for near-vertical cuts (vertical lines are not representable).
    const STEEP_SLOPE: f64;

    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal fits scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }
}

impl Scalar for f64 {
    const DEFAULT_REL_TOL: f64 = 1e-9;
    const DEFAULT_ABS_TOL: f64 = 1e-12;
    const STEEP_SLOPE: f64 = 1e6;
}

impl Scalar for f32 {
    const DEFAULT_REL_TOL: f64 = 1e-5;
    const DEFAULT_ABS_TOL: f64 = 1e-7;
    const STEEP_SLOPE: f64 = 1e3;
}

/// Relative/absolute closeness used for every float comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct Tolerance<T> {
    pub rel_tol: T,
    pub abs_tol: T,
}

impl<T: Scalar> Default for Tolerance<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(T::DEFAULT_REL_TOL),
            abs_tol: T::lit(T::DEFAULT_ABS_TOL),
        }
    }
}

impl<T: Scalar> Tolerance<T> {
    /// Both values must be strictly positive.
    pub fn new(rel_tol: T, abs_tol: T) -> Option<Self> {
        (rel_tol > T::zero() && abs_tol > T::zero()).then_some(Self { rel_tol, abs_tol })
    }

    /// `|u - v| <= max(rel_tol * max(|u|, |v|), abs_tol)`.
    #[inline]
    pub fn eq(&self, u: T, v: T) -> bool {
        if u == v {
            return true;
        }
        if u.is_infinite() || v.is_infinite() {
            return false;
        }
        let scale = u.abs().max(v.abs());
        (u - v).abs() <= (self.rel_tol * scale).max(self.abs_tol)
    }

    /// Sign of `u - v` with a zero band given by [`Self::eq`].
    #[inline]
    pub fn cmp(&self, u: T, v: T) -> i8 {
        if self.eq(u, v) {
            0
        } else if u > v {
            1
        } else {
            -1
        }
    }
}

/// Free-function form of [`Tolerance::eq`].
#[inline]
pub fn approx_eq<T: Scalar>(u: T, v: T, tol: &Tolerance<T>) -> bool {
    tol.eq(u, v)
}
