//! Per-snapshot SIR evaluation for the three shared links, with every
//! interference term decomposed.
//!
//! Fading is drawn fresh for every term on every call, and all terms are
//! drawn regardless of whether `kappa`/`gamma` gate them out of the
//! denominator: toggling an indicator then changes the combination but not
//! the draw sequence, so estimates produced from the same stream stay
//! pathwise comparable across such toggles.

use rand::Rng;

use crate::channel::{gain_from_d2, sample_rayleigh_power, sample_rician_power};
use crate::error::{Error, Result};
use crate::geometry::{NetworkSnapshot, Point2D, PppField};
use crate::params::SystemParams;
use crate::scalar::{real, Real};

/// Minimum interferer distance; closer points are snapped here and counted.
pub const MIN_INTERFERER_DISTANCE: f64 = 0.1;

/// Which of the three shared links a sample describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LinkKind {
    /// A-MeNB to the mobile cell's roof antenna.
    Backhaul,
    /// A-MeNB to the selected out-of-vehicle cellular user.
    CellularDl,
    /// AL antenna to the in-vehicle user.
    AccessLink,
}

/// One evaluated link: received power, raw interference terms and the SIR.
///
/// `i_m`, `i_s`, `i_a` are the unweighted sums; the SIR applies the
/// `kappa`/`gamma`/`epsilon` weights of the link's formula. An empty
/// denominator yields an infinite-SIR sentinel that compares greater than
/// any threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSample<R: Real> {
    pub link: LinkKind,
    /// Received signal power, mW scale.
    pub signal: R,
    /// Aggregate macrocell interference (serving cell excluded for BH/DL,
    /// included for AL).
    pub i_m: R,
    /// Aggregate small-cell interference (unweighted by kappa).
    pub i_s: R,
    /// AL-antenna self/cross term (unweighted by gamma/epsilon); zero for
    /// the access link itself.
    pub i_a: R,
    pub sir: R,
    /// Interferers closer than the 0.1 m floor, snapped to it.
    pub floored_interferers: u32,
}

impl<R: Real> LinkSample<R> {
    /// `1` when the SIR clears the threshold.
    #[inline]
    pub fn success(&self, theta: R) -> bool {
        self.sir > theta
    }
}

/// Sum `P * d^-alpha * h` over a field, excluding `skip` (if any), with
/// fresh unit-mean exponential fading per point.
fn field_interference<R: Real, G: Rng + ?Sized>(
    field: &PppField<R>,
    receiver: &Point2D<R>,
    power_mw: R,
    alpha: R,
    skip: Option<usize>,
    rng: &mut G,
) -> (R, u32) {
    let floor2 = real::<R>(MIN_INTERFERER_DISTANCE * MIN_INTERFERER_DISTANCE);
    let mut total = R::zero();
    let mut floored = 0u32;
    for (idx, p) in field.points.iter().enumerate() {
        let h = sample_rayleigh_power::<R, _>(rng).value;
        if Some(idx) == skip {
            continue;
        }
        let mut d2 = p.dist2(receiver);
        if d2 < floor2 {
            d2 = floor2;
            floored += 1;
        }
        total += power_mw * gain_from_d2(d2, alpha) * h;
    }
    (total, floored)
}

#[inline]
fn finish<R: Real>(
    link: LinkKind,
    signal: R,
    i_m: R,
    i_s: R,
    i_a: R,
    denom: R,
    floored: u32,
) -> LinkSample<R> {
    let sir = if denom > R::zero() {
        signal / denom
    } else {
        R::infinity()
    };
    LinkSample {
        link,
        signal,
        i_m,
        i_s,
        i_a,
        sir,
        floored_interferers: floored,
    }
}

/// Backhaul SIR: `P_M r_m^-a h / (I_M + k I_S + I_a g e)`, the serving
/// macrocell excluded from `I_M`.
pub fn sir_backhaul<R: Real, G: Rng + ?Sized>(
    snap: &NetworkSnapshot<R>,
    params: &SystemParams<R>,
    rng: &mut G,
) -> Result<LinkSample<R>> {
    if snap.menbs.points.is_empty() {
        return Err(Error::Snapshot("backhaul needs at least one macrocell".into()));
    }
    let alpha = params.alpha_i;
    let rx = snap.mc_position;
    let r_m2 = snap.amenb().dist2(&rx);
    if r_m2 == R::zero() {
        return Err(Error::Singularity("mobile cell coincides with its macrocell".into()));
    }
    let h = sample_rayleigh_power::<R, _>(rng).value;
    let signal = params.p_m.mw() * gain_from_d2(r_m2, alpha) * h;

    let (i_m, f1) = field_interference(
        &snap.menbs,
        &rx,
        params.p_m.mw(),
        alpha,
        Some(snap.amenb_index),
        rng,
    );
    let (i_s, f2) = field_interference(&snap.senbs, &rx, params.p_s.mw(), alpha, None, rng);
    if snap.r_am == R::zero() {
        return Err(Error::Singularity("zero BH/AL antenna separation".into()));
    }
    let i_a = params.p_a.mw()
        * gain_from_d2(snap.r_am * snap.r_am, alpha)
        * sample_rayleigh_power::<R, _>(rng).value;

    let denom = i_m + params.kappa_scalar() * i_s + params.gamma * params.epsilon * i_a;
    Ok(finish(LinkKind::Backhaul, signal, i_m, i_s, i_a, denom, f1 + f2))
}

/// Shared cellular downlink SIR at the selected CUE:
/// `P_M r_u^-a h / (I_M + k I_S + I'_a e)` with `I'_a = P_a h r_mu^-a`.
pub fn sir_cellular_dl<R: Real, G: Rng + ?Sized>(
    snap: &NetworkSnapshot<R>,
    params: &SystemParams<R>,
    rng: &mut G,
) -> Result<LinkSample<R>> {
    let cue = *snap
        .cues
        .first()
        .ok_or_else(|| Error::Snapshot("no cellular user in snapshot".into()))?;
    let alpha = params.alpha_i;
    let r_u2 = cue.dist2(&snap.amenb());
    if r_u2 == R::zero() {
        return Err(Error::Singularity("cellular user coincides with its macrocell".into()));
    }
    let h = sample_rayleigh_power::<R, _>(rng).value;
    let signal = params.p_m.mw() * gain_from_d2(r_u2, alpha) * h;

    let (i_m, f1) = field_interference(
        &snap.menbs,
        &cue,
        params.p_m.mw(),
        alpha,
        Some(snap.amenb_index),
        rng,
    );
    let (i_s, f2) = field_interference(&snap.senbs, &cue, params.p_s.mw(), alpha, None, rng);
    let r_mu2 = cue.dist2(&snap.mc_position);
    if r_mu2 == R::zero() {
        return Err(Error::Singularity("cellular user coincides with the mobile cell".into()));
    }
    let i_a = params.p_a.mw()
        * gain_from_d2(r_mu2, alpha)
        * sample_rayleigh_power::<R, _>(rng).value;

    let denom = i_m + params.kappa_scalar() * i_s + params.epsilon * i_a;
    Ok(finish(LinkKind::CellularDl, signal, i_m, i_s, i_a, denom, f1 + f2))
}

/// Access-link SIR at the in-vehicle user:
/// `P_a r_av^-a_o h_ric / (e (I_M + k I_S))`, every macrocell (the serving
/// one included) contributing to the cellular interference.
///
/// The link is budgeted at the worst-case service distance `r_av_max` (the
/// vehicle radius, which is what the symbol r_av denotes in the model); the
/// drawn in-vehicle position only moves the receiver for the interferer
/// geometry, where the few-meter offset is immaterial.
pub fn sir_access_link<R: Real, G: Rng + ?Sized>(
    snap: &NetworkSnapshot<R>,
    params: &SystemParams<R>,
    rng: &mut G,
) -> Result<LinkSample<R>> {
    if !(snap.mue_offset > R::zero()) || !(params.r_av_max > R::zero()) {
        return Err(Error::Singularity("in-vehicle user at zero offset".into()));
    }
    let h = sample_rician_power(params.k_factor, rng)?.value;
    let signal = params.p_a.mw() * params.r_av_max.powf(-params.alpha_o) * h;

    let rx = snap.mue_position;
    let alpha = params.alpha_i;
    let (i_m, f1) = field_interference(&snap.menbs, &rx, params.p_m.mw(), alpha, None, rng);
    let (i_s, f2) = field_interference(&snap.senbs, &rx, params.p_s.mw(), alpha, None, rng);

    let denom = params.epsilon * (i_m + params.kappa_scalar() * i_s);
    Ok(finish(
        LinkKind::AccessLink,
        signal,
        i_m,
        i_s,
        R::zero(),
        denom,
        f1 + f2,
    ))
}
