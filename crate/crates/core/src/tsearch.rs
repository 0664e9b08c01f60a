//! Search for frequencies T > T0 placing every prime's character p^{iT}
//! within a chordal tolerance of a prescribed unit-circle target.
//!
//! Such T exist for every tolerance because {log p} is linearly independent
//! over Q, so (T log 2, T log 3, ...) equidistributes in the torus; the
//! search is a uniform grid scan with verified acceptance. The step guard
//! makes the scan complete: a step never jumps across an eps/2-shrunk target
//! window, so budget exhaustion is a resource statement, not a mathematical
//! one. Returned values are re-verified by direct evaluation before being
//! accepted.

use crate::dirichlet::{ChiValue, DirichletCharacter};
use crate::phase::{self, chord_to_turns, Logarithm, Phase};
use crate::{Error, Result};
use rayon::prelude::*;

/// What p^{iT} should approximate for each prime p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetMode {
    /// p^{iT} near conj(chi(p)), i.e. |chi(p) p^{iT} - 1| small.
    ConjChi,
    /// p^{iT} near 1.
    One,
    /// p^{iT} near -conj(chi(p)), i.e. |chi(p) p^{iT} + 1| small.
    /// For a real character (q = 3) this is p^{iT} near -chi(p).
    NegChi,
}

impl TargetMode {
    pub fn label(&self) -> &'static str {
        match self {
            TargetMode::ConjChi => "conj_chi",
            TargetMode::One => "one",
            TargetMode::NegChi => "neg_chi",
        }
    }
}

/// A verified-search request: distinct ascending primes (the character's
/// modulus excluded), their targets, a chordal tolerance and a lower bound.
#[derive(Clone, Debug)]
pub struct TargetSpec {
    pub primes: Vec<u64>,
    pub targets: Vec<Phase>,
    pub eps: f64,
    pub t0: f64,
}

impl TargetSpec {
    pub fn new(primes: Vec<u64>, targets: Vec<Phase>, eps: f64, t0: f64) -> Result<TargetSpec> {
        if primes.len() != targets.len() {
            return Err(Error::Domain("primes and targets must pair up".into()));
        }
        if !primes.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Domain(
                "primes must be distinct and ascending".into(),
            ));
        }
        if eps.is_nan() || eps <= 0.0 || eps > 2.0 {
            return Err(Error::Domain(format!("eps must be in (0, 2], got {eps}")));
        }
        if !t0.is_finite() || t0 < 0.0 {
            return Err(Error::Domain(format!("T0 must be >= 0, got {t0}")));
        }
        Ok(TargetSpec {
            primes,
            targets,
            eps,
            t0,
        })
    }
}

/// Target phases for a mode: turns of conj(chi(p)), 1, or -conj(chi(p)).
pub fn targets_for_mode(
    chi: &DirichletCharacter,
    primes: &[u64],
    mode: TargetMode,
) -> Result<Vec<Phase>> {
    primes
        .iter()
        .map(|&p| {
            if p % chi.q() == 0 {
                return Err(Error::Domain(format!(
                    "prime {p} is not coprime to the modulus {}",
                    chi.q()
                )));
            }
            let e = match chi.chi_phase(p) {
                ChiValue::Root(ph) => ph.turns(),
                ChiValue::Zero => unreachable!("coprimality checked above"),
            };
            Ok(match mode {
                TargetMode::ConjChi => Phase::exact(-e),
                TargetMode::One => Phase::exact(0.0),
                TargetMode::NegChi => Phase::exact(0.5 - e),
            })
        })
        .collect()
}

/// Largest scan step for which no eps/2-shrunk window can be jumped over,
/// with a factor-2 safety margin: step * ln(max prime) <= asin(eps/4).
pub fn max_safe_step(primes: &[u64], eps: f64) -> f64 {
    match primes.last() {
        None => 1.0,
        Some(&p) => (eps / 4.0).asin() / (p as f64).ln(),
    }
}

/// Planning heuristic: expected number of target windows to inspect,
/// (2pi / (2 asin(eps/2)))^{#primes}. Carries no correctness contract.
pub fn search_cost_estimate(num_primes: usize, eps: f64) -> f64 {
    let width = 2.0 * (eps / 2.0).asin();
    (std::f64::consts::TAU / width).powi(num_primes as i32)
}

const CHUNK: u64 = 1 << 15;

/// Smallest scanned T = t0 + i*step (i >= 1) with
/// chordal(p^{iT}, target_p) <= eps for every prime, verified by direct
/// evaluation before returning. The scan grid only affects *which* valid T
/// is found, never whether the returned one is valid.
pub fn find_t(spec: &TargetSpec, step: f64, max_steps: u64) -> Result<f64> {
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::Domain(format!("step must be positive, got {step}")));
    }
    if max_steps < 1 {
        return Err(Error::Domain("max_steps must be >= 1".into()));
    }
    let guard = max_safe_step(&spec.primes, spec.eps);
    if step > guard {
        return Err(Error::Domain(format!(
            "step {step} exceeds the completeness guard {guard:.6e} = asin(eps/4)/ln(max prime)"
        )));
    }

    let logs: Vec<Logarithm> = spec
        .primes
        .iter()
        .map(|&p| Logarithm::of(p))
        .collect::<Result<_>>()?;
    let t_max = spec.t0 + max_steps as f64 * step;
    for log in &logs {
        log.phase(t_max)?; // whole scan range obeys the precision contract
    }
    let delta = chord_to_turns(spec.eps);

    let accept = |i: u64| -> Option<f64> {
        let t = spec.t0 + i as f64 * step;
        if t <= spec.t0 {
            return None; // guards against step underflow at huge t0
        }
        for (log, target) in logs.iter().zip(&spec.targets) {
            let ph = log.phase(t).expect("contract pre-checked up to t_max");
            if ph.circular_distance(target) > delta {
                return None;
            }
        }
        // direct chordal verification, the contract the caller relies on
        for (log, target) in logs.iter().zip(&spec.targets) {
            let ph = log.phase(t).expect("contract pre-checked");
            if phase::chordal_distance(&ph, target) > spec.eps {
                return None;
            }
        }
        Some(t)
    };

    let n_chunks = max_steps.div_ceil(CHUNK);
    let hit = (0..n_chunks).into_par_iter().find_map_first(|c| {
        let start = c * CHUNK + 1;
        let end = ((c + 1) * CHUNK).min(max_steps);
        (start..=end).find_map(accept)
    });
    hit.ok_or(Error::BudgetExhausted {
        steps: max_steps,
        t_reached: t_max,
    })
}

/// Per-prime verification row for a found T.
#[derive(Clone, Debug)]
pub struct VerifyRow {
    pub prime: u64,
    pub target_turns: f64,
    pub phase_turns: f64,
    pub chordal_error: f64,
}

/// Re-derive the per-prime chordal errors of a candidate T from scratch.
pub fn verify_t(spec: &TargetSpec, t: f64) -> Result<Vec<VerifyRow>> {
    spec.primes
        .iter()
        .zip(&spec.targets)
        .map(|(&p, target)| {
            let ph = phase::phase(p, t)?;
            Ok(VerifyRow {
                prime: p,
                target_turns: target.turns(),
                phase_turns: ph.turns(),
                chordal_error: phase::chordal_distance(&ph, target),
            })
        })
        .collect()
}
