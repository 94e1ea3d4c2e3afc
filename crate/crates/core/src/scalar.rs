//! Scalar abstraction: the whole library is generic over the floating-point
//! type through [`Real`], with `f64` as the default instantiation.

use std::fmt;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, Exp1, OpenClosed01, StandardNormal, StandardUniform};

/// Floating-point scalar usable throughout the library: `f32` or `f64`.
///
/// Beyond the `num-traits` bundle, a `Real` knows how to draw the few
/// primitive random variates the samplers need, so that sampling code can
/// stay generic without threading distribution bounds everywhere.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + std::iter::Sum<Self>
    + fmt::Debug
    + fmt::Display
    + fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Uniform draw on `[0, 1)`.
    fn sample_standard<G: Rng + ?Sized>(rng: &mut G) -> Self;

    /// Uniform draw on `(0, 1]` (safe to feed into `ln`).
    fn sample_open_closed<G: Rng + ?Sized>(rng: &mut G) -> Self;

    /// Unit-mean exponential draw.
    fn sample_exp1<G: Rng + ?Sized>(rng: &mut G) -> Self;

    /// Standard normal draw.
    fn sample_std_normal<G: Rng + ?Sized>(rng: &mut G) -> Self;
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn sample_standard<G: Rng + ?Sized>(rng: &mut G) -> Self {
                StandardUniform.sample(rng)
            }
            #[inline]
            fn sample_open_closed<G: Rng + ?Sized>(rng: &mut G) -> Self {
                OpenClosed01.sample(rng)
            }
            #[inline]
            fn sample_exp1<G: Rng + ?Sized>(rng: &mut G) -> Self {
                Exp1.sample(rng)
            }
            #[inline]
            fn sample_std_normal<G: Rng + ?Sized>(rng: &mut G) -> Self {
                StandardNormal.sample(rng)
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Lift an `f64` literal into the scalar type.
///
/// Panics only if the literal is not representable (e.g. 1e300 into `f32`),
/// which for the constants used here would be a programming error.
#[inline]
pub fn real<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("literal not representable in scalar type")
}
