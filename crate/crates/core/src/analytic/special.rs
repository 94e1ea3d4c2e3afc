//! Small special-function toolkit: log-gamma, the falling-factorial form of
//! the gamma ratio, and compensated summation.

use crate::scalar::{real, Real};

/// Lanczos coefficients, g = 7, n = 9.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Gamma(x)` for `x > 0` (Lanczos approximation, ~1e-13 relative).
pub fn ln_gamma<R: Real>(x: R) -> R {
    if !(x > R::zero()) {
        return R::nan();
    }
    let half = real::<R>(0.5);
    if x < half {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        let pi = real::<R>(std::f64::consts::PI);
        return (pi / (pi * x).sin()).ln() - ln_gamma(R::one() - x);
    }
    let x = x - R::one();
    let mut acc = real::<R>(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += real::<R>(c) / (x + real(i as f64));
    }
    let g = real::<R>(7.5);
    let t = x + g;
    let half_ln_two_pi = real::<R>(0.918_938_533_204_672_74); // ln(2 pi)/2
    half_ln_two_pi + (x + half) * t.ln() - t + acc.ln()
}

/// Gamma ratio `Gamma(a + 1) / Gamma(a - n + 1)` as the falling factorial
/// `a (a-1) ... (a-n+1)`.
///
/// This is exact for every real `a` and integer `n >= 0`, and vanishes
/// automatically when the denominator argument `a - n + 1` is a non-positive
/// integer (a pole of Gamma, i.e. the reciprocal-gamma convention), because
/// one factor of the product is then zero.
pub fn falling_factorial<R: Real>(a: R, n: usize) -> R {
    let mut acc = R::one();
    for i in 0..n {
        acc *= a - real(i as f64);
    }
    acc
}

/// Kahan compensated accumulator.
#[derive(Debug, Clone, Copy)]
pub struct KahanSum<R: Real> {
    sum: R,
    c: R,
}

impl<R: Real> KahanSum<R> {
    pub fn new() -> Self {
        Self {
            sum: R::zero(),
            c: R::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: R) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> R {
        self.sum
    }
}

impl<R: Real> Default for KahanSum<R> {
    fn default() -> Self {
        Self::new()
    }
}
