//! Membership predicate for the constructed set S.
//!
//! For n = q^m n' with n' coprime to q, membership of n is decided entirely
//! by n' (so S is exactly invariant under multiplication by q, with q-powers
//! themselves always members):
//!
//! - q = 3 (sign form): n in S iff chi(n') * sign(Re(n'^{i T_ell})) > 0,
//! - general q (arc form): n in S iff the phase of chi(n') n'^{i T_ell}
//!   avoids a fixed forbidden arc of length 1/(q-1) turns,
//!
//! where ell = k or k+1 is the branch selected by the gate condition
//! Re(n'^{i t_k}) >= alpha(n'). The forbidden arc is [1/4, 1/4 + 1/(q-1));
//! anchoring it at a quarter turn makes the q = 3 arc form coincide with the
//! sign form everywhere off the decision boundary (the sign form excludes
//! exactly the phases of chi(n) n^{iT} in [1/4, 3/4)). Any anchor yields the
//! same densities; this one keeps the two formulations interchangeable.

use crate::dirichlet::{ChiValue, DirichletCharacter};
use crate::phase::{self, Arc, Logarithm, Phase};
use crate::schedule::{BranchInfo, Schedule};
use crate::tsearch::TargetMode;
use crate::{Error, Result};

/// Parameters of one constructed set: a CONJ_CHI schedule, the faithful
/// character mod its q, and the forbidden arc.
#[derive(Clone, Debug)]
pub struct StableSetParams {
    schedule: Schedule,
    chi: DirichletCharacter,
    forbidden_arc: Arc,
}

/// Anchor of the forbidden arc, in turns.
pub const FORBIDDEN_ARC_LO: f64 = 0.25;

impl StableSetParams {
    pub fn new(schedule: Schedule) -> Result<StableSetParams> {
        if schedule.mode != TargetMode::ConjChi {
            return Err(Error::Domain(format!(
                "stable set needs a conj_chi schedule, got {}",
                schedule.mode.label()
            )));
        }
        let chi = DirichletCharacter::mod_q(schedule.q)?;
        let forbidden_arc = Arc::new(FORBIDDEN_ARC_LO, 1.0 / (schedule.q - 1) as f64)?;
        Ok(StableSetParams {
            schedule,
            chi,
            forbidden_arc,
        })
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn chi(&self) -> &DirichletCharacter {
        &self.chi
    }

    pub fn forbidden_arc(&self) -> &Arc {
        &self.forbidden_arc
    }

    pub fn q(&self) -> u64 {
        self.schedule.q
    }

    /// Largest end (exclusive) of a scan range on which `contains` is total:
    /// every n < terminal strips to n' <= n < terminal.
    pub fn supported_end(&self) -> u64 {
        self.schedule.terminal
    }

    /// Largest hi such that a dilation scan `n -> p n` over [lo, hi) stays
    /// inside the predicate's domain.
    pub fn dilation_scan_end(&self, p: u64) -> u64 {
        self.schedule.terminal / p
    }
}

/// q-adic valuation split: n = q^m * n' with q not dividing n'.
pub fn strip_q(q: u64, n: u64) -> (u32, u64) {
    debug_assert!(q >= 2 && n >= 1);
    let mut m = 0;
    let mut rest = n;
    while rest.is_multiple_of(q) {
        rest /= q;
        m += 1;
    }
    (m, rest)
}

fn branch_of(params: &StableSetParams, nprime: u64) -> Result<(Logarithm, BranchInfo)> {
    let log = Logarithm::of(nprime)?;
    let info = params.schedule.select_branch(&log).map_err(|e| match e {
        Error::OutOfRange { n, .. } => Error::OutOfRange {
            what: "membership",
            n,
            end: params.schedule.terminal,
        },
        other => other,
    })?;
    Ok((log, info))
}

/// The branch (ell, T_ell) a stripped n' uses, ell in {k, k+1}.
pub fn selected_t(params: &StableSetParams, nprime: u64) -> Result<(u32, f64)> {
    let (_, info) = branch_of(params, nprime)?;
    Ok((info.level(), info.t_selected))
}

/// chi(n') as turns; n' must be coprime to q.
fn chi_turns(params: &StableSetParams, nprime: u64) -> f64 {
    match params.chi.chi_phase(nprime) {
        ChiValue::Root(p) => p.turns(),
        ChiValue::Zero => unreachable!("q-part stripped before character evaluation"),
    }
}

/// Membership of n in S. Pre: the stripped part n' must lie below the
/// schedule's terminal boundary.
pub fn contains(params: &StableSetParams, n: u64) -> Result<bool> {
    if n == 0 {
        return Err(Error::Domain("membership needs n >= 1".into()));
    }
    let (_, nprime) = strip_q(params.q(), n);
    if nprime == 1 {
        return Ok(true); // q^m in S for all m
    }
    if params.q() == 3 {
        membership_by_sign(params, nprime)
    } else {
        membership_by_arc(params, nprime)
    }
}

/// Sign formulation (q = 3): chi(n') * sign(Re(n'^{i T_ell})) > 0.
pub fn membership_by_sign(params: &StableSetParams, nprime: u64) -> Result<bool> {
    debug_assert_eq!(params.q(), 3);
    debug_assert!(!nprime.is_multiple_of(3) && nprime > 1);
    let (log, info) = branch_of(params, nprime)?;
    let re = phase::re_value_of(&log.phase(info.t_selected)?);
    let chi = params.chi.chi_real(nprime);
    Ok(chi as i32 * phase::sign_with_tie(re) as i32 > 0)
}

/// Arc formulation (any q): the phase of chi(n') n'^{i T_ell} avoids the
/// forbidden arc.
pub fn membership_by_arc(params: &StableSetParams, nprime: u64) -> Result<bool> {
    debug_assert!(!nprime.is_multiple_of(params.q()) && nprime > 1);
    let (log, info) = branch_of(params, nprime)?;
    let combined = log
        .phase(info.t_selected)?
        .rotated_by(&Phase::exact(chi_turns(params, nprime)));
    Ok(!phase::in_arc(&combined, &params.forbidden_arc))
}

/// Distance (in turns) of the deciding quantities from their decision
/// boundaries; +inf when membership is unconditional (n' = 1) and for gate
/// comparisons pinned by the ramp.
///
/// The gate distance is rescaled by min(1, T_ell / t_k), so a single bound
/// `margin(n) > delta` simultaneously certifies that a phase perturbation of
/// delta turns at frequency T_ell (and the correspondingly larger one at
/// t_k) flips neither the arc/sign condition nor the branch choice.
pub fn margin(params: &StableSetParams, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("margin needs n >= 1".into()));
    }
    let (_, nprime) = strip_q(params.q(), n);
    if nprime == 1 {
        return Ok(f64::INFINITY);
    }
    let (log, info) = branch_of(params, nprime)?;
    margin_with_arc(
        &params.forbidden_arc,
        chi_turns(params, nprime),
        &log,
        &info,
    )
}

/// Shared margin geometry: used by the set and by the signed function (whose
/// sign boundaries are the q = 3 arc endpoints).
pub(crate) fn margin_with_arc(
    arc: &Arc,
    chi_turns: f64,
    log: &Logarithm,
    info: &BranchInfo,
) -> Result<f64> {
    let combined = log
        .phase(info.t_selected)?
        .rotated_by(&Phase::exact(chi_turns));
    let lo = Phase::exact(arc.lo());
    let hi = Phase::exact(arc.hi());
    let d_arc = combined
        .circular_distance(&lo)
        .min(combined.circular_distance(&hi));
    let d_gate = match info.gate_phase {
        None => f64::INFINITY,
        Some(gp) => {
            // Re(z) = alpha on the circle at +/- arccos(alpha) radians
            let boundary = info.alpha.acos() / std::f64::consts::TAU;
            let d = gp
                .circular_distance(&Phase::exact(boundary))
                .min(gp.circular_distance(&Phase::exact(1.0 - boundary)));
            d * (info.t_selected / info.t_gate).min(1.0)
        }
    };
    Ok(d_arc.min(d_gate))
}
