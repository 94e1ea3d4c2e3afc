//! Dynamic resource sharing: sub-channel assignment between backhaul,
//! cellular downlink and access link, plus reuse-factor accounting.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Who shares the sub-channel with the access link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignmentMode {
    /// Backhaul data pending: the AL shares with the MC backhaul.
    ShareWithBackhaul,
    /// The AL shares with the cellular downlink of the indexed user.
    ShareWithCue(usize),
    /// No qualifying user: the AL keeps the sub-channel unshared.
    ExclusiveAl,
}

/// Outcome of one assignment decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assignment<R: Real> {
    pub mode: AssignmentMode,
    /// `r_u / r_mu` of the selected user (present only in the CUE branch;
    /// always the minimum over all candidates).
    pub chosen_ratio: Option<R>,
}

/// Sub-channel reuse accounting under one macrocell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReuseReport<R: Real> {
    /// `max(2, 2 + number of active small cells)`.
    pub q_omega: u32,
    pub active_senb_count: u32,
    /// Area bound around the serving macrocell the count refers to, m^2.
    pub area_bound: R,
}

/// Pick the cellular user minimizing `r_u / r_mu`, subject to the ratio
/// being below one. Candidates are `(r_u_i, r_mu_i)` pairs; an empty list
/// falls through to [`AssignmentMode::ExclusiveAl`].
pub fn select_cue<R: Real>(cue_distances: &[(R, R)]) -> Result<Assignment<R>> {
    let mut best: Option<(usize, R)> = None;
    for (i, &(r_u, r_mu)) in cue_distances.iter().enumerate() {
        if !(r_u > R::zero()) || !(r_mu > R::zero()) {
            return Err(Error::invalid(
                "cue_distances",
                format!("candidate {i} has non-positive distance"),
            ));
        }
        let ratio = r_u / r_mu;
        match best {
            Some((_, b)) if ratio >= b => {}
            _ => best = Some((i, ratio)),
        }
    }
    match best {
        Some((i, ratio)) if ratio < R::one() => Ok(Assignment {
            mode: AssignmentMode::ShareWithCue(i),
            chosen_ratio: Some(ratio),
        }),
        _ => Ok(Assignment {
            mode: AssignmentMode::ExclusiveAl,
            chosen_ratio: None,
        }),
    }
}

/// Assignment step: pending backhaul data always wins the sub-channel;
/// otherwise the best-ratio cellular user shares it.
pub fn assign_subchannel<R: Real>(
    backhaul_has_data: bool,
    cue_distances: &[(R, R)],
) -> Result<Assignment<R>> {
    if backhaul_has_data {
        Ok(Assignment {
            mode: AssignmentMode::ShareWithBackhaul,
            chosen_ratio: None,
        })
    } else {
        select_cue(cue_distances)
    }
}

/// Reuse factor `Q = max(2, 2 + sum of flags)` over the small cells inside
/// the given area bound.
pub fn reuse_factor<R: Real>(senb_active_flags: &[bool], area_bound: R) -> ReuseReport<R> {
    let active = senb_active_flags.iter().filter(|&&f| f).count() as u32;
    ReuseReport {
        q_omega: (2 + active).max(2),
        active_senb_count: active,
        area_bound,
    }
}
