//! Numeric evaluation of the closed-form and integral results: backhaul,
//! downlink and access-link success probabilities, the AL power-control
//! law, and the three ergodic rates.
//!
//! The tractable forms hold for the non-LOS exponent `alpha_i = 4`; the
//! evaluators reject other exponents rather than mis-evaluate. The Monte
//! Carlo path (see `montecarlo`) has no such restriction.

pub mod quad;
pub mod special;

use std::cell::Cell;
use std::f64::consts::PI;

use crate::channel::PowerLevel;
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::scalar::{real, Real};
use quad::{integrate_unit, QuadOutcome};
use special::KahanSum;

/// Tolerances for the adaptive quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<R: Real> {
    pub abs_tol: R,
    pub rel_tol: R,
    pub max_subdivisions: usize,
}

impl<R: Real> Default for QuadratureSpec<R> {
    fn default() -> Self {
        Self {
            abs_tol: real(1e-9),
            rel_tol: real(1e-7),
            max_subdivisions: 2000,
        }
    }
}

/// Non-fatal evaluation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Warning {
    /// Series terms at the configured (J, Q) truncation were still above
    /// 1e-10.
    SeriesTruncation,
    /// The result is dominated by enormous SIRs (interference nearly
    /// absent); the value is finite but extremely sensitive.
    NearInterferenceFree,
    /// A quadrature did not meet its tolerance; the value is the best
    /// estimate reached.
    QuadratureNotConverged,
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::SeriesTruncation => write!(f, "series-truncation"),
            Warning::NearInterferenceFree => write!(f, "near-interference-free"),
            Warning::QuadratureNotConverged => write!(f, "quadrature-not-converged"),
        }
    }
}

/// A probability or rate value plus its evaluation diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticResult<R: Real> {
    pub value: R,
    /// Quadrature error bound or series tail bound.
    pub est_error: R,
    /// `(j, q)` truncation actually reached (zero for pure quadratures).
    pub terms_used: (usize, usize),
    /// Adaptive subdivisions spent (zero for pure series).
    pub subdivisions: usize,
    pub warnings: Vec<Warning>,
}

impl<R: Real> AnalyticResult<R> {
    fn from_quad(out: QuadOutcome<R>, mut warnings: Vec<Warning>) -> Self {
        if !out.converged {
            warnings.push(Warning::QuadratureNotConverged);
        }
        AnalyticResult {
            value: out.value,
            est_error: out.abs_error,
            terms_used: (0, 0),
            subdivisions: out.subdivisions,
            warnings,
        }
    }
}

/// Clamp a raw probability to `[0, 1]`, rejecting values that exceed the
/// admissible range by more than 1e-6.
fn clamp_probability<R: Real>(raw: R) -> Result<R> {
    let slack = real::<R>(1e-6);
    if !(raw >= -slack && raw <= R::one() + slack) {
        return Err(Error::Numerical(format!(
            "probability {raw} outside [-1e-6, 1+1e-6]"
        )));
    }
    Ok(raw.max(R::zero()).min(R::one()))
}

fn require_alpha4<R: Real>(alpha_i: R, context: &'static str) -> Result<()> {
    if alpha_i != real(4.0) {
        return Err(Error::UnsupportedExponent {
            alpha: alpha_i.to_f64().unwrap_or(f64::NAN),
            context,
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// kernels
// ---------------------------------------------------------------------------

/// `rho(theta, alpha) = theta^{2/a} * int_{theta^{-2/a}}^inf dL/(1+L^{a/2})`,
/// evaluated after the substitution `L = theta^{-2/a}/u` as
/// `int_0^1 u^{a/2-2} / (u^{a/2} + 1/theta) du`.
///
/// At `alpha = 4` this equals `sqrt(theta) (pi/2 - arctan(1/sqrt(theta)))`.
pub fn rho_kernel<R: Real>(theta: R, alpha: R, quad: &QuadratureSpec<R>) -> Result<R> {
    if !(theta > R::zero()) {
        return Err(Error::invalid("theta", format!("{theta} must be > 0")));
    }
    if !(alpha > real(2.0)) {
        return Err(Error::invalid("alpha", format!("{alpha} must be > 2")));
    }
    let half_a = alpha / real(2.0);
    let inv_theta = theta.recip();
    let out = integrate_unit(
        |u: R| u.powf(half_a - real(2.0)) / (u.powf(half_a) + inv_theta),
        quad.abs_tol,
        quad.rel_tol,
        quad.max_subdivisions,
    );
    if !out.converged {
        return Err(Error::Quadrature(format!(
            "rho kernel at theta={theta}, alpha={alpha}: error {} after {} subdivisions",
            out.abs_error, out.subdivisions
        )));
    }
    Ok(out.value)
}

/// Closed form of `rho(theta, 4)`.
#[inline]
pub fn rho4_closed<R: Real>(theta: R) -> R {
    let pi_half = real::<R>(PI / 2.0);
    let st = theta.sqrt();
    st * (pi_half - st.recip().atan())
}

/// `beta(alpha) = (2 pi / alpha) / sin(2 pi / alpha)`; finite for every
/// `alpha > 2`, diverging at the `alpha -> 2` pole.
pub fn beta_kernel<R: Real>(alpha: R) -> Result<R> {
    if !(alpha > real(2.0)) {
        return Err(Error::DivergentInterference {
            alpha: alpha.to_f64().unwrap_or(f64::NAN),
        });
    }
    let x = real::<R>(2.0 * PI) / alpha;
    Ok(x / x.sin())
}

// ---------------------------------------------------------------------------
// backhaul success probability (Theorem 1)
// ---------------------------------------------------------------------------

/// BH success-link coefficient for the small-cells-active case:
/// `Y1 = g e th P_a / (P_M pi^2 lam_M^2 r_am^4)`.
pub fn y1_coefficient<R: Real>(params: &SystemParams<R>, p_a_mw: R) -> R {
    let pi2 = real::<R>(PI * PI);
    params.gamma * params.epsilon * params.theta * p_a_mw
        / (params.p_m.mw() * pi2 * params.lambda_m * params.lambda_m * params.r_am.powi(4))
}

/// BH success-link coefficient for the silent-small-cells case:
/// `Y2 = g e th P_a / (P_M r_am^4)`.
pub fn y2_coefficient<R: Real>(params: &SystemParams<R>, p_a_mw: R) -> R {
    params.gamma * params.epsilon * params.theta * p_a_mw
        / (params.p_m.mw() * params.r_am.powi(4))
}

fn big_z<R: Real>(params: &SystemParams<R>) -> R {
    let pi_half = real::<R>(PI / 2.0);
    rho4_closed(params.theta)
        + params.lambda_s / params.lambda_m
            * pi_half
            * (params.p_s.mw() * params.theta / params.p_m.mw()).sqrt()
        + R::one()
}

/// Backhaul success probability with all small cells transmitting, with an
/// explicit success-link coefficient (power control substitutes its own).
pub fn p_bh_kappa1_with_y1<R: Real>(
    params: &SystemParams<R>,
    y1: R,
    quad: &QuadratureSpec<R>,
) -> Result<AnalyticResult<R>> {
    require_alpha4(params.alpha_i, "backhaul success probability, kappa = 1")?;
    let z = big_z(params);
    let cutoff = real::<R>(745.0);
    let out = integrate_unit(
        |w: R| {
            let u = w.recip() - R::one();
            let e = u * z;
            if e > cutoff {
                return R::zero();
            }
            (-e).exp() / (w * w * (R::one() + y1 * u * u))
        },
        quad.abs_tol,
        quad.rel_tol,
        quad.max_subdivisions,
    );
    if !out.converged {
        return Err(Error::Quadrature(format!(
            "p_bh (kappa=1): error {} after {} subdivisions",
            out.abs_error, out.subdivisions
        )));
    }
    let mut res = AnalyticResult::from_quad(out, vec![]);
    res.value = clamp_probability(res.value)?;
    Ok(res)
}

/// Backhaul success probability, all small cells transmitting on the shared
/// sub-channel (Theorem 1, kappa = 1).
pub fn p_bh_kappa1<R: Real>(
    params: &SystemParams<R>,
    quad: &QuadratureSpec<R>,
) -> Result<AnalyticResult<R>> {
    if !params.kappa {
        return Err(Error::invalid("kappa", "kappa = 1 evaluator with kappa = 0 params"));
    }
    p_bh_kappa1_with_y1(params, y1_coefficient(params, params.p_a.mw()), quad)
}

/// Backhaul success probability with an explicit `Y2` coefficient.
pub fn p_bh_kappa0_with_y2<R: Real>(
    params: &SystemParams<R>,
    y2: R,
    quad: &QuadratureSpec<R>,
) -> Result<AnalyticResult<R>> {
    require_alpha4(params.alpha_i, "backhaul success probability, kappa = 0")?;
    let z_prime = real::<R>(PI) * params.lambda_m * (R::one() + rho4_closed(params.theta));
    let two_pi_lam = real::<R>(2.0 * PI) * params.lambda_m;
    let cutoff = real::<R>(745.0);
    let out = integrate_unit(
        |z: R| {
            let u = z.recip() - R::one();
            let e = z_prime * u * u;
            if e > cutoff {
                return R::zero();
            }
            let u2 = u * u;
            two_pi_lam * u * (-e).exp() / (z * z * (R::one() + y2 * u2 * u2))
        },
        quad.abs_tol,
        quad.rel_tol,
        quad.max_subdivisions,
    );
    if !out.converged {
        return Err(Error::Quadrature(format!(
            "p_bh (kappa=0): error {} after {} subdivisions",
            out.abs_error, out.subdivisions
        )));
    }
    let mut res = AnalyticResult::from_quad(out, vec![]);
    res.value = clamp_probability(res.value)?;
    Ok(res)
}

/// Backhaul success probability, silent small-cell tier (Theorem 1,
/// kappa = 0).
pub fn p_bh_kappa0<R: Real>(
    params: &SystemParams<R>,
    quad: &QuadratureSpec<R>,
) -> Result<AnalyticResult<R>> {
    if params.kappa {
        return Err(Error::invalid("kappa", "kappa = 0 evaluator with kappa = 1 params"));
    }
    p_bh_kappa0_with_y2(params, y2_coefficient(params, params.p_a.mw()), quad)
}

/// Backhaul success probability for whichever small-cell case the
/// parameters select.
pub fn p_bh<R: Real>(
    params: &SystemParams<R>,
    quad: &QuadratureSpec<R>,
) -> Result<AnalyticResult<R>> {
    if params.kappa {
        p_bh_kappa1(params, quad)
    } else {
        p_bh_kappa0(params, quad)
    }
}

// ---------------------------------------------------------------------------
// shared cellular downlink (Theorem 2)
// ---------------------------------------------------------------------------

/// Success probability of the shared cellular downlink, exactly the
/// closed form of Theorem 2 (fourth-power AL term including epsilon).
pub fn p_dl<R: Real>(params: &SystemParams<R>) -> Result<AnalyticResult<R>> {
    require_alpha4(params.alpha_i, "shared downlink success probability")?;
    let pi = real::<R>(PI);
    let expo = -(pi * params.r_u * params.r_u / real(2.0))
        * (params.theta / params.p_m.mw()).sqrt()
        * (params.lambda_m * params.p_m.mw().sqrt()
            + params.kappa_scalar() * params.lambda_s * params.p_s.mw().sqrt());
    let ratio = params.r_u / params.r_mu;
    let ratio4 = ratio * ratio * ratio * ratio;
    let raw = expo.exp()
        / (R::one() + params.theta * params.epsilon / params.p_m.mw() * ratio4);
    Ok(AnalyticResult {
        value: clamp_probability(raw)?,
        est_error: R::zero(),
        terms_used: (0, 0),
        subdivisions: 0,
        warnings: vec![],
    })
}

// ---------------------------------------------------------------------------
// access link (Theorem 3) and its series machinery
// ---------------------------------------------------------------------------

/// The transmit-power-independent interference coefficient of Theorem 3:
/// `Omega = pi (g e r_av^{a_o})^{2/a_i} (lam_M P_M^{2/a_i} + k lam_S
/// P_S^{2/a_i}) beta(a_i)`.
pub fn omega_kappa<R: Real>(params: &SystemParams<R>) -> Result<R> {
    let beta = beta_kernel(params.alpha_i)?;
    let two_over_ai = real::<R>(2.0) / params.alpha_i;
    let pi = real::<R>(PI);
    Ok(pi
        * (params.gamma * params.epsilon * params.r_av_max.powf(params.alpha_o))
            .powf(two_over_ai)
        * (params.lambda_m * params.p_m.mw().powf(two_over_ai)
            + params.kappa_scalar() * params.lambda_s * params.p_s.mw().powf(two_over_ai))
        * beta)
}

/// Pre-tabulated pieces of the double series: gamma-ratio table
/// `psi[n][q] = Gamma(2q/a + 1)/Gamma(2q/a - n + 1)` and Poisson weights.
struct AlSeries<R: Real> {
    psi: Vec<Vec<R>>,
    max_abs_psi: Vec<R>,
    poisson: Vec<R>,
    inv_factorial: Vec<R>,
    j_max: usize,
    q_max: usize,
}

struct SeriesEval<R: Real> {
    value: R,
    /// Largest term magnitude (cancellation scale).
    max_term: R,
    /// Largest term magnitude seen in any row's final configured q slot.
    tail_term: R,
    /// Highest q actually accumulated.
    q_used: usize,
}

impl<R: Real> AlSeries<R> {
    fn new(k: R, alpha_i: R, j_max: usize, q_max: usize) -> Self {
        // psi by the falling-factorial recurrence over n
        let a_of_q: Vec<R> = (0..=q_max)
            .map(|q| real::<R>(2.0 * q as f64) / alpha_i)
            .collect();
        let mut psi = Vec::with_capacity(j_max + 1);
        psi.push(vec![R::one(); q_max + 1]);
        for n in 1..=j_max {
            let prev = &psi[n - 1];
            let row: Vec<R> = (0..=q_max)
                .map(|q| prev[q] * (a_of_q[q] - real((n - 1) as f64)))
                .collect();
            psi.push(row);
        }
        let max_abs_psi = psi
            .iter()
            .map(|row| row.iter().fold(R::zero(), |m, &v| m.max(v.abs())))
            .collect();
        // Poisson(K) weights K^j e^-K / j!
        let mut poisson = Vec::with_capacity(j_max + 1);
        poisson.push((-k).exp());
        for j in 1..=j_max {
            let prev = poisson[j - 1];
            poisson.push(prev * k / real(j as f64));
        }
        let mut inv_factorial = Vec::with_capacity(j_max + 1);
        inv_factorial.push(R::one());
        for n in 1..=j_max {
            let prev = inv_factorial[n - 1];
            inv_factorial.push(prev / real(n as f64));
        }
        AlSeries {
            psi,
            max_abs_psi,
            poisson,
            inv_factorial,
            j_max,
            q_max,
        }
    }

    /// Evaluate the double-truncated series of Theorem 3 at
    /// `x = Omega theta^{2/a} / P_a`, in the canonical order (j outer, m
    /// middle, q inner) with compensated accumulation.
    fn eval(&self, x: R) -> SeriesEval<R> {
        let mut sum = KahanSum::new();
        let mut max_term = R::zero();
        let mut tail_term = R::zero();
        let mut q_used = 0usize;
        let drop_below = real::<R>(1e-22);
        for j in 0..=self.j_max {
            let wj = self.poisson[j];
            for m in 0..=j {
                let n = j - m;
                let mut row = wj * self.inv_factorial[n];
                if n % 2 == 1 {
                    row = -row;
                }
                let psi_row = &self.psi[n];
                let bound = self.max_abs_psi[n] * row.abs();
                // vq = (-x)^q / q!
                let mut vq = R::one();
                let mut q = 0usize;
                loop {
                    let term = row * vq * psi_row[q];
                    sum.add(term);
                    let mag = term.abs();
                    if mag > max_term {
                        max_term = mag;
                    }
                    if q == self.q_max && mag > tail_term {
                        tail_term = mag;
                    }
                    if q > q_used {
                        q_used = q;
                    }
                    if q == self.q_max {
                        break;
                    }
                    vq *= -x / real((q + 1) as f64);
                    // once q exceeds x the factorial dominates and |vq| only
                    // shrinks; the remaining row tail is bounded by a
                    // geometric series under twice the next term's bound
                    if real::<R>(q as f64 + 1.0) > x + x && vq.abs() * bound < drop_below {
                        break;
                    }
                    q += 1;
                }
            }
        }
        SeriesEval {
            value: sum.value(),
            max_term,
            tail_term,
            q_used,
        }
    }
}

/// Access-link success probability (Theorem 3): the double-truncated
/// series at the configured `(j_max, q_max)`.
pub fn p_al<R: Real>(params: &SystemParams<R>) -> Result<AnalyticResult<R>> {
    params.validate()?;
    let omega = omega_kappa(params)?;
    let series = AlSeries::new(params.k_factor, params.alpha_i, params.j_max, params.q_max);
    let x = omega * params.theta.powf(real::<R>(2.0) / params.alpha_i) / params.p_a.mw();
    let ev = series.eval(x);
    let mut warnings = vec![];
    if ev.tail_term > real(1e-10) {
        warnings.push(Warning::SeriesTruncation);
    }
    Ok(AnalyticResult {
        value: clamp_probability(ev.value)?,
        est_error: ev.tail_term.max(ev.max_term * R::epsilon()),
        terms_used: (params.j_max, ev.q_used),
        subdivisions: 0,
        warnings,
    })
}

// ---------------------------------------------------------------------------
// access-link power control
// ---------------------------------------------------------------------------

/// The series constant of the power-control inversion, exactly as the
/// exponential-form rearrangement defines it (no 1/q! in the inner sum, so
/// its value is tied to the configured truncation).
pub fn xi_value<R: Real>(params: &SystemParams<R>) -> Result<R> {
    require_alpha4(params.alpha_i, "power-control series constant")?;
    let series = AlSeries::new(params.k_factor, params.alpha_i, params.j_max, params.q_max);
    let mut sum = KahanSum::new();
    for j in 0..=params.j_max {
        let wj = series.poisson[j];
        for m in 0..=j {
            let n = j - m;
            let mut row_sum = KahanSum::new();
            for q in 0..=params.q_max {
                row_sum.add(series.psi[n][q]);
            }
            let mut c = wj * series.inv_factorial[n];
            if n % 2 == 1 {
                c = -c;
            }
            sum.add(c * row_sum.value());
        }
    }
    Ok(sum.value())
}

/// AL transmit power achieving a target AL success probability:
/// `P_a = Omega sqrt(theta) / (ln Xi - ln target)`.
pub fn al_transmit_power<R: Real>(
    p_al_target: R,
    params: &SystemParams<R>,
) -> Result<PowerLevel<R>> {
    require_alpha4(params.alpha_i, "access-link power control")?;
    if !(p_al_target > R::zero()) {
        return Err(Error::invalid(
            "p_al_target",
            format!("{p_al_target} must be > 0"),
        ));
    }
    let xi = xi_value(params)?;
    if !(p_al_target < xi) {
        return Err(Error::Infeasible {
            target: p_al_target.to_f64().unwrap_or(f64::NAN),
            limit: xi.to_f64().unwrap_or(f64::NAN),
        });
    }
    let omega = omega_kappa(params)?;
    if omega == R::zero() {
        return Err(Error::invalid(
            "gamma",
            "power-control law degenerates at gamma * epsilon = 0 (no AL interference)",
        ));
    }
    PowerLevel::from_mw(omega * params.theta.sqrt() / (xi.ln() - p_al_target.ln()))
}

/// AL success probability in the exponential form the power-control law
/// inverts: `Xi exp(-Omega sqrt(theta) / P_a)`. Unclamped: the form is an
/// approximation and may exceed 1 away from its operating range.
pub fn p_al_exponential_form<R: Real>(
    p_a: PowerLevel<R>,
    params: &SystemParams<R>,
) -> Result<R> {
    require_alpha4(params.alpha_i, "access-link exponential form")?;
    let xi = xi_value(params)?;
    let omega = omega_kappa(params)?;
    Ok(xi * (-omega * params.theta.sqrt() / p_a.mw()).exp())
}

/// BH success-link coefficients `(Y1, Y2)` under AL power control at the
/// given target probability.
pub fn success_link_params<R: Real>(
    params: &SystemParams<R>,
    p_al_target: R,
) -> Result<(R, R)> {
    let p_a = al_transmit_power(p_al_target, params)?;
    Ok((
        y1_coefficient(params, p_a.mw()),
        y2_coefficient(params, p_a.mw()),
    ))
}

// ---------------------------------------------------------------------------
// ergodic rates
// ---------------------------------------------------------------------------

/// `sqrt(e^tau - 1)` with overflow care.
#[inline]
fn sqrt_expm1<R: Real>(tau: R) -> R {
    if tau > real(700.0) {
        (tau / real(2.0)).exp()
    } else {
        tau.exp_m1().max(R::zero()).sqrt()
    }
}

/// Ergodic backhaul rate in nats/s/Hz: the (g, sigma) double integral over
/// the unit square, with the small-cell term carrying its beta(4) = pi/2
/// factor (consistent with Theorem 1).
pub fn ergodic_rate_bh<R: Real>(
    params: &SystemParams<R>,
    quad: &QuadratureSpec<R>,
) -> Result<AnalyticResult<R>> {
    require_alpha4(params.alpha_i, "ergodic backhaul rate")?;
    let pi_half = real::<R>(PI / 2.0);
    let senb = params.kappa_scalar() * params.lambda_s / params.lambda_m
        * pi_half
        * (params.p_s.mw() / params.p_m.mw()).sqrt();
    let f_coef = params.p_a.mw() * params.gamma * params.epsilon
        / (params.p_m.mw() * params.r_am.powi(4));
    let c_coef = f_coef / (real::<R>(PI * PI) * params.lambda_m * params.lambda_m);
    let cutoff = real::<R>(745.0);
    let inner_bad = Cell::new(false);

    let inner = |g: R| -> R {
        let tau = g.recip() - R::one();
        let st = sqrt_expm1(tau);
        if !st.is_finite() {
            return R::zero();
        }
        let big_b = if st == R::zero() {
            R::one()
        } else {
            R::one() + st * (pi_half - st.recip().atan()) + senb * st
        };
        let c = c_coef * st * st;
        if !big_b.is_finite() || !c.is_finite() {
            return R::zero();
        }
        let out = integrate_unit(
            |s: R| {
                let u = s.recip() - R::one();
                let e = u * big_b;
                if e > cutoff {
                    return R::zero();
                }
                (-e).exp() / (s * s * (R::one() + c * u * u))
            },
            quad.abs_tol,
            quad.rel_tol,
            quad.max_subdivisions,
        );
        if !out.converged {
            inner_bad.set(true);
        }
        out.value
    };

    let out = integrate_unit(
        |g: R| inner(g) / (g * g),
        quad.abs_tol,
        quad.rel_tol,
        quad.max_subdivisions,
    );
    let mut warnings = vec![];
    if inner_bad.get() {
        warnings.push(Warning::QuadratureNotConverged);
    }
    let res = AnalyticResult::from_quad(out, warnings);
    if !res.value.is_finite() || res.value < -real::<R>(1e-9) {
        return Err(Error::Numerical(format!("ergodic BH rate {}", res.value)));
    }
    Ok(res)
}

/// Ergodic rate of the shared cellular downlink, nats/s/Hz. The Laplace
/// exponent carries its beta(4) = pi/2 factor; the AL term is the printed
/// `(r_u/r_mu)^2 / P_M` form.
pub fn ergodic_rate_dl<R: Real>(
    params: &SystemParams<R>,
    quad: &QuadratureSpec<R>,
) -> Result<AnalyticResult<R>> {
    require_alpha4(params.alpha_i, "ergodic downlink rate")?;
    // Laplace functional of the two PPP tiers at a fixed serving distance:
    // exponent (pi^2/2) r_u^2 (lam_M + k lam_S sqrt(P_S/P_M)) sqrt(theta').
    let a_coef = real::<R>(PI * PI / 2.0)
        * params.r_u
        * params.r_u
        * (params.lambda_m
            + params.lambda_s
                * params.kappa_scalar()
                * (params.p_s.mw() / params.p_m.mw()).sqrt());
    let ratio = params.r_u / params.r_mu;
    let b_coef = ratio * ratio / params.p_m.mw();
    let cutoff = real::<R>(745.0);
    let out = integrate_unit(
        |g: R| {
            let tau = g.recip() - R::one();
            let sx = sqrt_expm1(tau);
            if !sx.is_finite() {
                return R::zero();
            }
            let e = a_coef * sx;
            if e > cutoff {
                return R::zero();
            }
            let x = sx * sx;
            (-e).exp() / (g * g * (R::one() + b_coef * x))
        },
        quad.abs_tol,
        quad.rel_tol,
        quad.max_subdivisions,
    );
    let mut res = AnalyticResult::from_quad(out, vec![]);
    if !res.value.is_finite() || res.value < -real::<R>(1e-9) {
        return Err(Error::Numerical(format!("ergodic DL rate {}", res.value)));
    }
    if res.value > real(10.0) {
        res.warnings.push(Warning::NearInterferenceFree);
    }
    Ok(res)
}

/// Ergodic access-link rate, nats/s/Hz: the unit-interval integral of the
/// Theorem 3 series (including its constant q = 0 term, so the integrand
/// is the survival probability itself). The series is evaluated only where
/// `Omega sqrt(theta')/P_a <= 15`; beyond that the survival is below
/// `e^-15` and the truncated alternating series is pure cancellation
/// noise, so the integrand is taken as zero.
pub fn ergodic_rate_al<R: Real>(
    params: &SystemParams<R>,
    quad: &QuadratureSpec<R>,
) -> Result<AnalyticResult<R>> {
    params.validate()?;
    let omega = omega_kappa(params)?;
    if omega == R::zero() {
        return Err(Error::Numerical(
            "ergodic AL rate diverges: gamma * epsilon = 0 leaves no interference".into(),
        ));
    }
    let series = AlSeries::new(params.k_factor, params.alpha_i, params.j_max, params.q_max);
    let two_over_ai = real::<R>(2.0) / params.alpha_i;
    let x_limit = real::<R>(15.0);
    let truncated = Cell::new(false);
    let out = integrate_unit(
        |g: R| {
            let tau = g.recip() - R::one();
            let theta_p = if tau > real(700.0) {
                R::infinity()
            } else {
                tau.exp_m1()
            };
            if !theta_p.is_finite() {
                return R::zero();
            }
            let x = omega * theta_p.powf(two_over_ai) / params.p_a.mw();
            if !(x <= x_limit) {
                return R::zero();
            }
            let ev = series.eval(x);
            if ev.tail_term > real(1e-10) {
                truncated.set(true);
            }
            ev.value.max(R::zero()).min(R::one()) / (g * g)
        },
        quad.abs_tol,
        quad.rel_tol,
        quad.max_subdivisions,
    );
    let mut warnings = vec![];
    if truncated.get() {
        warnings.push(Warning::SeriesTruncation);
    }
    let mut res = AnalyticResult::from_quad(out, warnings);
    res.terms_used = (params.j_max, params.q_max);
    if !res.value.is_finite() || res.value < -real::<R>(1e-9) {
        return Err(Error::Numerical(format!("ergodic AL rate {}", res.value)));
    }
    if res.value > real(10.0) {
        res.warnings.push(Warning::NearInterferenceFree);
    }
    Ok(res)
}

#[cfg(test)]
mod tests;
