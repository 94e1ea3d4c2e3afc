//! Channel model: power-law path loss, Rayleigh and Rician fading power
//! samplers with their distribution functions, and dBm/linear conversions.
//!
//! Everything downstream works in linear milliwatts; dBm appears only at
//! configuration boundaries.

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// Transmit power carried as linear milliwatts.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PowerLevel<R: Real> {
    mw: R,
}

impl<R: Real> PowerLevel<R> {
    /// Construct from linear milliwatts; must be strictly positive.
    pub fn from_mw(mw: R) -> Result<Self> {
        if !(mw > R::zero()) || !mw.is_finite() {
            return Err(Error::invalid("power_mw", format!("{mw} is not > 0")));
        }
        Ok(Self { mw })
    }

    /// Construct from a dBm figure: `10^(dbm/10)` mW.
    pub fn from_dbm(dbm: R) -> Self {
        Self {
            mw: real::<R>(10.0).powf(dbm / real(10.0)),
        }
    }

    #[inline]
    pub fn mw(self) -> R {
        self.mw
    }

    pub fn dbm(self) -> R {
        real::<R>(10.0) * self.mw.log10()
    }
}

/// `10^(dbm/10)` milliwatts.
pub fn dbm_to_linear<R: Real>(dbm: R) -> PowerLevel<R> {
    PowerLevel::from_dbm(dbm)
}

/// Inverse of [`dbm_to_linear`].
pub fn linear_to_dbm<R: Real>(p: PowerLevel<R>) -> R {
    p.dbm()
}

/// Small-scale fading model for one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FadingModel<R: Real> {
    /// Unit-mean exponential power (Rayleigh amplitude).
    Rayleigh,
    /// Non-central chi-squared power with linear K-factor; mean `K + 1`.
    Rician { k: R },
}

/// One realized fading power gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingDraw<R: Real> {
    pub value: R,
    pub model: FadingModel<R>,
}

/// Distance power law `d^(-alpha)`.
///
/// `d = 0` is rejected: interference sums must floor distances before
/// calling this (see the link evaluators).
pub fn path_loss<R: Real>(d: R, alpha: R) -> Result<R> {
    if !(alpha > real(2.0)) {
        return Err(Error::invalid("alpha", format!("{alpha} must be > 2")));
    }
    if d == R::zero() {
        return Err(Error::Singularity(
            "path loss at zero distance; enforce a minimum separation".into(),
        ));
    }
    if !(d > R::zero()) {
        return Err(Error::invalid("d", format!("{d} must be > 0")));
    }
    Ok(d.powf(-alpha))
}

/// Path gain from a squared distance, with a fast path for `alpha = 4`.
///
/// Agrees with `path_loss(sqrt(d2), alpha)`; used in interference loops
/// where distances are produced as squares.
#[inline]
pub(crate) fn gain_from_d2<R: Real>(d2: R, alpha: R) -> R {
    if alpha == real(4.0) {
        (d2 * d2).recip()
    } else {
        d2.powf(-alpha / real(2.0))
    }
}

/// Unit-mean exponential power draw (Rayleigh fading).
pub fn sample_rayleigh_power<R: Real, G: Rng + ?Sized>(rng: &mut G) -> FadingDraw<R> {
    FadingDraw {
        value: R::sample_exp1(rng),
        model: FadingModel::Rayleigh,
    }
}

/// Rician power draw: `(sqrt(K) + a)^2 + b^2` with `a, b ~ N(0, 1/2)`.
///
/// The scattered component has variance 1/2 per dimension, so the mean
/// power is `K + 1`. `K = 0` degenerates to the Rayleigh sampler's law.
pub fn sample_rician_power<R: Real, G: Rng + ?Sized>(k: R, rng: &mut G) -> Result<FadingDraw<R>> {
    if !(k >= R::zero()) {
        return Err(Error::invalid("k", format!("{k} must be >= 0")));
    }
    let sigma = real::<R>(0.5).sqrt();
    let a = R::sample_std_normal(rng) * sigma;
    let b = R::sample_std_normal(rng) * sigma;
    let los = k.sqrt() + a;
    Ok(FadingDraw {
        value: los * los + b * b,
        model: FadingModel::Rician { k },
    })
}

/// CDF of the Rician power law at `x`, evaluated as the truncated series
///
/// `F(x) = sum_j K^j e^-K / (j!)^2 * int_0^x t^j e^-t dt`
///       `= sum_j [K^j e^-K / j!] * (1 - e^-x sum_{n<=j} x^n / n!)`,
///
/// i.e. the Bessel-function expansion of the non-central chi-squared CDF
/// under the `P_avg = K + 1` normalization. Returns the value clamped to
/// `[0, 1]` plus a convergence flag: `true` when the last Poisson weight at
/// `j = j_max` still exceeds `1e-12`.
pub fn rician_power_cdf<R: Real>(x: R, k: R, j_max: usize) -> Result<(R, bool)> {
    if !(x >= R::zero()) {
        return Err(Error::invalid("x", format!("{x} must be >= 0")));
    }
    if !(k >= R::zero()) {
        return Err(Error::invalid("k", format!("{k} must be >= 0")));
    }
    if j_max < 1 {
        return Err(Error::invalid("j_max", "must be >= 1"));
    }

    // Poisson(K) weights via multiplicative recurrence; inner partial sums
    // of x^n/n! likewise, so nothing overflows at j_max = 70.
    let emx = (-x).exp();
    let mut weight = (-k).exp(); // K^j e^-K / j!
    let mut weight_sum = R::zero();
    let mut xpow_sum = R::one(); // sum_{n<=j} x^n / n!
    let mut xterm = R::one(); // x^j / j!
    let mut acc = R::zero();
    for j in 0..=j_max {
        if j > 0 {
            weight *= k / real(j as f64);
            xterm *= x / real(j as f64);
            xpow_sum += xterm;
        }
        weight_sum += weight;
        acc += weight * (R::one() - emx * xpow_sum);
    }
    // the Poisson mass beyond j_max bounds the truncation error
    let truncated = R::one() - weight_sum > real(1e-12);
    Ok((acc.max(R::zero()).min(R::one()), truncated))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn path_loss_values() {
        assert_relative_eq!(path_loss(1.0, 4.0).unwrap(), 1.0);
        assert_relative_eq!(path_loss(1.0, 3.2).unwrap(), 1.0);
        assert_relative_eq!(path_loss(5.0, 4.0).unwrap(), 1.6e-3, max_relative = 1e-12);
        // independent check: 50^-3.5 computed via exp/ln
        assert_relative_eq!(
            path_loss(50.0, 3.5).unwrap(),
            (-3.5f64 * 50f64.ln()).exp(),
            max_relative = 1e-12
        );
        assert_relative_eq!(path_loss(50.0, 3.5).unwrap(), 1.131_370_849_898e-6, max_relative = 1e-9);
    }

    #[test]
    fn path_loss_rejects_degenerate_input() {
        assert!(matches!(path_loss(0.0, 4.0), Err(Error::Singularity(_))));
        assert!(path_loss(1.0, 2.0).is_err());
        assert!(path_loss(-1.0, 4.0).is_err());
    }

    #[test]
    fn gain_from_d2_matches_path_loss() {
        for &d in &[0.3, 1.0, 17.0, 412.0] {
            for &a in &[3.0f64, 3.5, 4.0] {
                assert_relative_eq!(
                    gain_from_d2(d * d, a),
                    path_loss(d, a).unwrap(),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn rayleigh_moments() {
        let mut g = rng(7);
        let n = 1_000_000;
        let mut sum = 0.0f64;
        let mut sum2 = 0.0f64;
        let mut above_ln2 = 0usize;
        for _ in 0..n {
            let v = sample_rayleigh_power::<f64, _>(&mut g).value;
            sum += v;
            sum2 += v * v;
            if v > std::f64::consts::LN_2 {
                above_ln2 += 1;
            }
        }
        let mean = sum / n as f64;
        let var = sum2 / n as f64 - mean * mean;
        assert!(mean > 0.997 && mean < 1.003, "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "var {var}");
        let p = above_ln2 as f64 / n as f64;
        assert!((p - 0.5).abs() < 0.002, "median check {p}");
    }

    #[test]
    fn rician_mean_is_k_plus_one() {
        for &k in &[0.0, 1.0, 1.584_893_192_461_113, 10.0] {
            let mut g = rng(11);
            let n = 1_000_000;
            let mut sum = 0.0f64;
            for _ in 0..n {
                sum += sample_rician_power(k, &mut g).unwrap().value;
            }
            let mean = sum / n as f64;
            assert!(
                (mean - (k + 1.0)).abs() / (k + 1.0) < 0.01,
                "k={k} mean={mean}"
            );
        }
    }

    #[test]
    fn rician_rejects_negative_k() {
        let mut g = rng(1);
        assert!(sample_rician_power(-0.5, &mut g).is_err());
    }

    #[test]
    fn rician_k0_is_exponential() {
        // KS distance between 1e5 K=0 draws and the exp(1) CDF.
        let mut g = rng(13);
        let n = 100_000;
        let mut xs: Vec<f64> = (0..n)
            .map(|_| sample_rician_power(0.0, &mut g).unwrap().value)
            .collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut ks = 0.0f64;
        for (i, x) in xs.iter().enumerate() {
            let f = 1.0 - (-x).exp();
            let lo = i as f64 / n as f64;
            let hi = (i + 1) as f64 / n as f64;
            ks = ks.max((f - lo).abs()).max((f - hi).abs());
        }
        assert!(ks < 0.01, "KS = {ks}");
    }

    #[test]
    fn rician_cdf_edge_cases() {
        assert_eq!(rician_power_cdf(0.0, 1.0, 70).unwrap().0, 0.0);
        // K = 0 reduces to 1 - e^-x
        for &x in &[0.01, 0.3, 1.0, 4.0, 20.0] {
            let (v, trunc) = rician_power_cdf(x, 0.0, 70).unwrap();
            assert!(!trunc);
            assert_relative_eq!(v, 1.0 - (-x as f64).exp(), epsilon = 1e-9);
        }
    }

    #[test]
    fn rician_cdf_matches_sampler() {
        // Monte Carlo oracle: empirical CDF from 1e6 draws at K = 2 dB.
        let k = 10f64.powf(0.2);
        let x = k + 1.0;
        let mut g = rng(17);
        let n = 1_000_000;
        let mut below = 0usize;
        for _ in 0..n {
            if sample_rician_power(k, &mut g).unwrap().value <= x {
                below += 1;
            }
        }
        let emp = below as f64 / n as f64;
        let (v, _) = rician_power_cdf(x, k, 70).unwrap();
        assert!((v - emp).abs() < 0.005, "cdf {v} vs empirical {emp}");
    }

    #[test]
    fn rician_cdf_monotone_in_x() {
        let k = 1.585;
        let mut prev = -1.0;
        let mut x = 1e-4;
        while x <= 1e3 {
            let (v, _) = rician_power_cdf(x, k, 70).unwrap();
            assert!((0.0..=1.0).contains(&v));
            assert!(v >= prev, "not monotone at {x}");
            prev = v;
            x *= 1.6;
        }
    }

    #[test]
    fn rician_cdf_truncation_flag() {
        // Huge K with tiny j_max: Poisson weights still large at the cutoff.
        let (_, trunc) = rician_power_cdf(1.0, 50.0, 5).unwrap();
        assert!(trunc);
    }

    #[test]
    fn dbm_conversions() {
        assert_relative_eq!(dbm_to_linear(0.0f64).mw(), 1.0);
        assert_relative_eq!(dbm_to_linear(45.0f64).mw(), 31_622.776_601_683_792, max_relative = 1e-12);
        assert_relative_eq!(dbm_to_linear(3.0f64).mw(), 1.995_262_314_968_879_5, max_relative = 1e-12);
        for &dbm in &[-31.4, 0.0, 3.0, 23.0, 45.0] {
            let p = dbm_to_linear(dbm);
            assert_relative_eq!(linear_to_dbm(p), dbm, epsilon = 1e-12);
        }
    }

    #[test]
    fn power_level_rejects_nonpositive() {
        assert!(PowerLevel::from_mw(0.0).is_err());
        assert!(PowerLevel::from_mw(-3.0).is_err());
        assert!(PowerLevel::from_mw(f64::NAN).is_err());
    }
}
