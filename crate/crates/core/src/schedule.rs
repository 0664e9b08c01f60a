//! The parameter schedule: K epochs of (eps_k, D_k, J_k, T_k, t_k) plus
//! interval boundaries N_{k,0..J_k} and a terminal frequency/boundary.
//!
//! Epoch k carries two verified frequencies: `t_main` (T_k), whose character
//! signs decide membership, and `t_gate` (t_k), whose real part against the
//! ramp alpha(n) = eps_k * j - 1 selects whether a number uses T_k or
//! T_{k+1}. Boundaries grow geometrically, every consecutive ratio at least
//! max(D_k, 2, growth), so multiplying by any p <= D_k moves a number at
//! most one cell forward. The chain
//!     D_k, 1/eps_k << T_k << t_k << T_{k+1} << N_{k,0} << ... << N_{k,J_k}
//! is made concrete by a single growth factor, except that t_k additionally
//! satisfies t_k >= (k+1) T_k ln T_k so the per-epoch error budget
//!     B_k = 1/T_k + T_k ln T_k / t_k + T_k ln T_{k+1} / N_{k,0}
//! strictly decreases; a bare constant factor cannot deliver that.
//!
//! Schedules serialize to JSON with reals as decimal strings (Rust's shortest
//! round-trip form), so a searched schedule can be stored and reused without
//! precision drift.

use crate::dirichlet::{self, DirichletCharacter};
use crate::phase::{self, Logarithm, Phase};
use crate::tsearch::{self, TargetMode, TargetSpec};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// One epoch of the chain.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Epoch {
    /// k, 1-based.
    pub k: u32,
    #[serde(with = "real_str")]
    pub eps: f64,
    pub d_max: u64,
    /// J_k = ceil(2/eps_k) + 1.
    pub j_max: u32,
    /// T_k: the sign frequency (mode targets at eps_k for p <= d_max).
    #[serde(with = "real_str")]
    pub t_main: f64,
    /// t_k: the gate frequency (p^{i t_k} near 1 at eps_k for p <= d_max).
    #[serde(with = "real_str")]
    pub t_gate: f64,
    /// N_{k,0..J_k}, length j_max + 1.
    pub cuts: Vec<u64>,
}

/// The full schedule: q, target mode, K epochs, and the terminal frequency
/// T_{K+1} with the terminal boundary N_{K+1,0}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Schedule {
    pub q: u64,
    pub mode: TargetMode,
    #[serde(with = "real_str")]
    pub growth: f64,
    pub epochs: Vec<Epoch>,
    /// T_{K+1}, used by last-epoch numbers whose gate condition fails.
    #[serde(with = "real_str")]
    pub t_final: f64,
    /// Tolerance the terminal frequency was searched at.
    #[serde(with = "real_str")]
    pub eps_final: f64,
    pub d_final: u64,
    /// N_{K+1,0}: exclusive end of the schedule's domain.
    pub terminal: u64,
}

mod real_str {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{x}"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        let s = String::deserialize(d)?;
        s.parse::<f64>().map_err(serde::de::Error::custom)
    }
}

/// Where a number sits in the partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    /// n < N_{1,0}: membership uses epoch-1 parameters with alpha = -1.
    PreEpoch,
    /// N_{k,j} <= n < next cut (1-based k, 0-based j).
    Cell { k: u32, j: u32 },
}

/// Branch data for one n coprime to q: which frequency decides its sign
/// condition and everything needed to reason about stability of that choice.
#[derive(Clone, Copy, Debug)]
pub struct BranchInfo {
    pub location: Location,
    /// Epoch whose parameters apply (1 for PreEpoch).
    pub k: u32,
    pub alpha: f64,
    /// ell = k+1 (gate condition failed) rather than ell = k.
    pub uses_next: bool,
    /// T_ell, the frequency whose sign/arc condition decides membership.
    pub t_selected: f64,
    /// t_k, the gate frequency of the governing epoch.
    pub t_gate: f64,
    /// Phase of n^{i t_k}; None when the ramp pins the branch and the gate
    /// was not evaluated.
    pub gate_phase: Option<Phase>,
}

impl BranchInfo {
    /// ell as an epoch index: k or k + 1.
    pub fn level(&self) -> u32 {
        if self.uses_next {
            self.k + 1
        } else {
            self.k
        }
    }
}

/// Inputs to `build_schedule`. `eps` and `d_max` give the K per-epoch rules;
/// the terminal frequency is searched at `eps_final`/`d_final` (defaults:
/// 0.4 * eps_K and D_K).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BuildParams {
    pub q: u64,
    pub mode: TargetMode,
    pub eps: Vec<f64>,
    pub d_max: Vec<u64>,
    pub eps_final: Option<f64>,
    pub d_final: Option<u64>,
    pub growth: f64,
    pub t0: f64,
    pub search_budget: u64,
}

impl BuildParams {
    pub fn desk(q: u64, mode: TargetMode) -> BuildParams {
        BuildParams {
            q,
            mode,
            eps: vec![0.5, 0.3],
            d_max: vec![7, 11],
            eps_final: Some(0.05),
            d_final: None,
            growth: 2.0,
            t0: 0.0,
            search_budget: 2_000_000_000,
        }
    }
}

impl Schedule {
    pub fn k_epochs(&self) -> u32 {
        self.epochs.len() as u32
    }

    /// First boundary N_{1,0}.
    pub fn first_cut(&self) -> u64 {
        self.epochs[0].cuts[0]
    }

    /// [N_{k,0}, N_{k+1,0}) for 1-based k; the last epoch ends at terminal.
    pub fn epoch_window(&self, k: u32) -> (u64, u64) {
        let idx = (k - 1) as usize;
        let lo = self.epochs[idx].cuts[0];
        let hi = if (k as usize) < self.epochs.len() {
            self.epochs[idx + 1].cuts[0]
        } else {
            self.terminal
        };
        (lo, hi)
    }

    /// Unique cell with N_{k,j} <= n < next boundary, or PreEpoch below
    /// N_{1,0}. Numbers at or past the terminal are out of range.
    pub fn locate(&self, n: u64) -> Result<Location> {
        if n == 0 {
            return Err(Error::Domain("locate needs n >= 1".into()));
        }
        if n >= self.terminal {
            return Err(Error::OutOfRange {
                what: "locate",
                n,
                end: self.terminal,
            });
        }
        if n < self.first_cut() {
            return Ok(Location::PreEpoch);
        }
        // epochs are few; scan for the epoch, then binary-search its cuts
        let mut k = self.epochs.len();
        for (i, ep) in self.epochs.iter().enumerate() {
            if n < ep.cuts[0] {
                k = i;
                break;
            }
        }
        let ep = &self.epochs[k - 1];
        let j = match ep.cuts.binary_search(&n) {
            Ok(j) => j,
            Err(ins) => ins - 1,
        };
        Ok(Location::Cell {
            k: k as u32,
            j: j as u32,
        })
    }

    /// alpha(n) = eps_k * j - 1 (PreEpoch: -1).
    pub fn alpha(&self, n: u64) -> Result<f64> {
        Ok(match self.locate(n)? {
            Location::PreEpoch => -1.0,
            Location::Cell { k, j } => self.epochs[(k - 1) as usize].eps * j as f64 - 1.0,
        })
    }

    /// Branch selection for n coprime to q (callers strip q-powers first):
    /// ell = k iff Re(n^{i t_k}) >= alpha(n); the ramp pins the branch
    /// outright when alpha <= -1 (always ell = k) or alpha > 1 (never).
    pub fn select_branch(&self, log: &Logarithm) -> Result<BranchInfo> {
        let location = self.locate(log.n())?;
        let (k, alpha) = match location {
            Location::PreEpoch => (1u32, -1.0),
            Location::Cell { k, j } => (k, self.epochs[(k - 1) as usize].eps * j as f64 - 1.0),
        };
        let ep = &self.epochs[(k - 1) as usize];
        let (uses_next, gate_phase) = if alpha <= -1.0 {
            (false, None)
        } else if alpha > 1.0 {
            (true, None)
        } else {
            let gp = log.phase(ep.t_gate)?;
            (phase::re_value_of(&gp) < alpha, Some(gp))
        };
        let t_selected = if !uses_next {
            ep.t_main
        } else if (k as usize) < self.epochs.len() {
            self.epochs[k as usize].t_main
        } else {
            self.t_final
        };
        Ok(BranchInfo {
            location,
            k,
            alpha,
            uses_next,
            t_selected,
            t_gate: ep.t_gate,
            gate_phase,
        })
    }

    /// Primes governed by epoch k's tolerances (q excluded).
    pub fn epoch_primes(&self, k: u32) -> Vec<u64> {
        let d = self.epochs[(k - 1) as usize].d_max;
        dirichlet::primes_up_to(d)
            .into_iter()
            .filter(|&p| p != self.q)
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Schedule> {
        serde_json::from_str(s).map_err(|e| Error::Serialization(e.to_string()))
    }
}

fn j_for_eps(eps: f64) -> u32 {
    (2.0 / eps).ceil() as u32 + 1
}

/// Build the full chain: searched frequencies, then boundaries, smallest
/// values satisfying every separation. Deterministic; no randomness anywhere.
pub fn build_schedule(p: &BuildParams) -> Result<Schedule> {
    let kk = p.eps.len();
    if kk == 0 || p.d_max.len() != kk {
        return Err(Error::InfeasibleRule(
            "need K >= 1 epochs with matching eps and d_max lists".into(),
        ));
    }
    if p.growth.is_nan() || p.growth < 2.0 {
        return Err(Error::InfeasibleRule(format!(
            "growth must be >= 2, got {}",
            p.growth
        )));
    }
    let eps_final = p.eps_final.unwrap_or(0.4 * p.eps[kk - 1]);
    let d_final = p.d_final.unwrap_or(p.d_max[kk - 1]);
    for w in p.eps.windows(2) {
        if w[1].is_nan() || w[1] >= w[0] {
            return Err(Error::InfeasibleRule(
                "eps sequence must be decreasing".into(),
            ));
        }
    }
    if eps_final.is_nan() || eps_final >= p.eps[kk - 1] || eps_final <= 0.0 {
        return Err(Error::InfeasibleRule(
            "eps_final must be in (0, eps_K)".into(),
        ));
    }
    if p.eps.iter().any(|&e| e.is_nan() || e <= 0.0 || e > 1.0) {
        return Err(Error::InfeasibleRule(
            "eps values must lie in (0, 1]".into(),
        ));
    }
    for w in p.d_max.windows(2) {
        if w[1] < w[0] {
            return Err(Error::InfeasibleRule(
                "d_max sequence must be nondecreasing".into(),
            ));
        }
    }
    if d_final < p.d_max[kk - 1] {
        return Err(Error::InfeasibleRule("d_final must be >= D_K".into()));
    }
    if p.d_max[0] < 2 {
        return Err(Error::InfeasibleRule("d_max values must be >= 2".into()));
    }
    let chi = DirichletCharacter::mod_q(p.q)?;

    let search = |d: u64, eps: f64, mode: TargetMode, t0: f64| -> Result<f64> {
        let primes: Vec<u64> = dirichlet::primes_up_to(d)
            .into_iter()
            .filter(|&x| x != p.q)
            .collect();
        let targets = tsearch::targets_for_mode(&chi, &primes, mode)?;
        let step = tsearch::max_safe_step(&primes, eps);
        let spec = TargetSpec::new(primes, targets, eps, t0)?;
        tsearch::find_t(&spec, step, p.search_budget)
    };

    // frequencies, chained by monotone restart
    let mut t_main = Vec::with_capacity(kk);
    let mut t_gate = Vec::with_capacity(kk);
    let mut prev = p.t0.max(0.0);
    for k in 1..=kk {
        let (eps, d) = (p.eps[k - 1], p.d_max[k - 1]);
        let floor = p.growth * (d as f64).max(1.0 / eps).max(prev);
        let tm = search(d, eps, p.mode, floor)?;
        // t_k >= (k+1) T_k ln T_k keeps the budget B_k strictly decreasing
        let gate_floor = (p.growth * tm).max((k as f64 + 1.0) * tm * tm.ln().max(1.0));
        let tg = search(d, eps, TargetMode::One, gate_floor)?;
        t_main.push(tm);
        t_gate.push(tg);
        prev = tg;
    }
    let t_final = search(d_final, eps_final, p.mode, p.growth * prev)?;

    // boundaries: smallest integers obeying every separation
    let next_main = |k: usize| -> f64 {
        if k < kk {
            t_main[k] // T_{k+1} for epoch k (1-based)
        } else {
            t_final
        }
    };
    let ceil_plus = |x: f64| -> Result<u64> {
        if !x.is_finite() || x >= (1u64 << 63) as f64 {
            return Err(Error::InfeasibleRule(
                "boundary exceeds the phase domain 2^63".into(),
            ));
        }
        Ok(x.floor() as u64 + 1)
    };
    let mut epochs = Vec::with_capacity(kk);
    let mut carry: Option<u64> = None; // lower bound from previous epoch joint
    for k in 1..=kk {
        let (eps, d) = (p.eps[k - 1], p.d_max[k - 1]);
        let j_max = j_for_eps(eps);
        let mult = d.max(2).max(p.growth.ceil() as u64);
        let mut cuts = Vec::with_capacity(j_max as usize + 1);
        let from_chain = ceil_plus(p.growth * next_main(k))?;
        cuts.push(carry.map_or(from_chain, |c| c.max(from_chain)));
        for _ in 0..j_max {
            let prev_cut = *cuts.last().unwrap();
            let next = prev_cut
                .checked_mul(mult)
                .and_then(|v| v.checked_add(1))
                .ok_or_else(|| Error::InfeasibleRule("boundary overflow in u64".into()))?;
            cuts.push(next);
        }
        let joint = cuts
            .last()
            .unwrap()
            .checked_mul(mult)
            .and_then(|v| v.checked_add(1))
            .ok_or_else(|| Error::InfeasibleRule("boundary overflow in u64".into()))?;
        carry = Some(joint);
        epochs.push(Epoch {
            k: k as u32,
            eps,
            d_max: d,
            j_max,
            t_main: t_main[k - 1],
            t_gate: t_gate[k - 1],
            cuts,
        });
    }
    let terminal = carry.unwrap();
    if terminal > (1u64 << 63) {
        return Err(Error::InfeasibleRule(format!(
            "terminal boundary {terminal} exceeds the phase domain 2^63"
        )));
    }

    Ok(Schedule {
        q: p.q,
        mode: p.mode,
        growth: p.growth,
        epochs,
        t_final,
        eps_final,
        d_final,
        terminal,
    })
}

/// One validation line: an invariant name, verdict, and the measured values.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub details: String,
}

fn check(out: &mut Vec<CheckResult>, name: impl Into<String>, pass: bool, details: String) {
    out.push(CheckResult {
        name: name.into(),
        pass,
        details,
    });
}

/// Numerically re-check every schedule invariant, re-deriving the frequency
/// target properties through the phase engine from scratch. Failures are
/// reported, never thrown.
pub fn validate(s: &Schedule) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let kk = s.epochs.len();

    let eps_ok = s.epochs.windows(2).all(|w| w[1].eps < w[0].eps)
        && s.eps_final < s.epochs[kk - 1].eps
        && s.epochs.iter().all(|e| e.eps > 0.0 && e.eps <= 1.0);
    check(
        &mut out,
        "eps_decreasing",
        eps_ok,
        format!(
            "eps = [{}] then final {}",
            s.epochs
                .iter()
                .map(|e| e.eps.to_string())
                .collect::<Vec<_>>()
                .join(", "),
            s.eps_final
        ),
    );

    let d_ok = s.epochs.windows(2).all(|w| w[1].d_max >= w[0].d_max)
        && s.d_final >= s.epochs[kk - 1].d_max;
    check(
        &mut out,
        "d_nondecreasing",
        d_ok,
        format!(
            "D = [{}] then final {}",
            s.epochs
                .iter()
                .map(|e| e.d_max.to_string())
                .collect::<Vec<_>>()
                .join(", "),
            s.d_final
        ),
    );

    for ep in &s.epochs {
        check(
            &mut out,
            format!("j_formula_epoch_{}", ep.k),
            ep.j_max == j_for_eps(ep.eps) && ep.cuts.len() == ep.j_max as usize + 1,
            format!(
                "J = {} for eps = {}, {} cuts",
                ep.j_max,
                ep.eps,
                ep.cuts.len()
            ),
        );
    }

    // boundaries: strictly increasing with ratio > max(D_k, 2) within an
    // epoch and across the joint into the next epoch
    for (i, ep) in s.epochs.iter().enumerate() {
        let next_start = if i + 1 < kk {
            s.epochs[i + 1].cuts[0]
        } else {
            s.terminal
        };
        let mut all_cuts = ep.cuts.clone();
        all_cuts.push(next_start);
        let need = ep.d_max.max(2) as u128;
        let mono = all_cuts.windows(2).all(|w| w[0] < w[1]);
        let mult_ok = all_cuts
            .windows(2)
            .all(|w| (w[1] as u128) > need * w[0] as u128);
        check(
            &mut out,
            format!("cut_growth_epoch_{}", ep.k),
            mono && mult_ok,
            format!(
                "{} boundaries from {} to {next_start}, every ratio > {}",
                all_cuts.len(),
                ep.cuts[0],
                need
            ),
        );
    }

    // chain separations by the growth factor
    for (i, ep) in s.epochs.iter().enumerate() {
        let g = s.growth;
        let t_next = if i + 1 < kk {
            s.epochs[i + 1].t_main
        } else {
            s.t_final
        };
        let base = (ep.d_max as f64).max(1.0 / ep.eps);
        let sep = ep.t_main >= g * base
            && ep.t_gate >= g * ep.t_main
            && t_next >= g * ep.t_gate
            && (ep.cuts[0] as f64) >= g * t_next;
        check(
            &mut out,
            format!("chain_separation_epoch_{}", ep.k),
            sep,
            format!(
                "max(D, 1/eps) = {base}, T = {}, t = {}, T_next = {t_next}, N0 = {}",
                ep.t_main, ep.t_gate, ep.cuts[0]
            ),
        );
    }

    // frequency targets, re-derived from scratch through the phase engine
    let chi = match DirichletCharacter::mod_q(s.q) {
        Ok(c) => c,
        Err(e) => {
            check(&mut out, "character", false, e.to_string());
            return out;
        }
    };
    let mut verify_targets = |name: String, d: u64, eps: f64, mode: TargetMode, t: f64| {
        let primes: Vec<u64> = dirichlet::primes_up_to(d)
            .into_iter()
            .filter(|&x| x != s.q)
            .collect();
        match tsearch::targets_for_mode(&chi, &primes, mode) {
            Err(e) => check(&mut out, name, false, e.to_string()),
            Ok(targets) => {
                let mut worst = 0.0f64;
                let mut ok = true;
                for (&p, target) in primes.iter().zip(&targets) {
                    match phase::phase(p, t) {
                        Err(e) => {
                            ok = false;
                            check(&mut out, format!("{name}_p{p}"), false, e.to_string());
                        }
                        Ok(ph) => {
                            worst = worst.max(phase::chordal_distance(&ph, target));
                        }
                    }
                }
                ok &= worst <= eps;
                check(
                    &mut out,
                    name,
                    ok,
                    format!("worst chordal error {worst:.6} vs eps {eps} at T = {t}"),
                );
            }
        }
    };
    for ep in &s.epochs {
        verify_targets(
            format!("t_main_targets_epoch_{}", ep.k),
            ep.d_max,
            ep.eps,
            s.mode,
            ep.t_main,
        );
        verify_targets(
            format!("t_gate_targets_epoch_{}", ep.k),
            ep.d_max,
            ep.eps,
            TargetMode::One,
            ep.t_gate,
        );
    }
    verify_targets(
        "t_final_targets".into(),
        s.d_final,
        s.eps_final,
        s.mode,
        s.t_final,
    );

    // error budgets B_k strictly decreasing
    let budget = |i: usize| -> f64 {
        let ep = &s.epochs[i];
        let t_next = if i + 1 < kk {
            s.epochs[i + 1].t_main
        } else {
            s.t_final
        };
        1.0 / ep.t_main
            + ep.t_main * ep.t_main.ln() / ep.t_gate
            + ep.t_main * t_next.ln() / ep.cuts[0] as f64
    };
    let budgets: Vec<f64> = (0..kk).map(budget).collect();
    check(
        &mut out,
        "error_budget_decreasing",
        budgets.windows(2).all(|w| w[1] < w[0]),
        format!("B = {budgets:?}"),
    );

    check(
        &mut out,
        "terminal_in_phase_domain",
        s.terminal <= (1u64 << 63),
        format!("terminal = {}", s.terminal),
    );

    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn toy_params() -> BuildParams {
        BuildParams {
            q: 3,
            mode: TargetMode::ConjChi,
            eps: vec![0.5],
            d_max: vec![2],
            eps_final: Some(0.25),
            d_final: None,
            growth: 2.0,
            t0: 0.0,
            search_budget: 50_000_000,
        }
    }

    #[test]
    fn toy_schedule_builds_and_validates() {
        let s = build_schedule(&toy_params()).unwrap();
        assert_eq!(s.epochs[0].j_max, 5, "ceil(2/0.5) + 1");
        assert_eq!(s.epochs[0].cuts.len(), 6);
        let report = validate(&s);
        for r in &report {
            assert!(r.pass, "{}: {}", r.name, r.details);
        }
        assert!(
            s.terminal < 1_000_000,
            "toy stays desk-size, got {}",
            s.terminal
        );
    }

    #[test]
    fn rebuild_is_bit_identical() {
        let a = build_schedule(&toy_params()).unwrap();
        let b = build_schedule(&toy_params()).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }

    #[test]
    fn json_roundtrip_preserves_reals_exactly() {
        let s = build_schedule(&toy_params()).unwrap();
        let back = Schedule::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(s.t_final.to_bits(), back.t_final.to_bits());
        for (a, b) in s.epochs.iter().zip(&back.epochs) {
            assert_eq!(a.t_main.to_bits(), b.t_main.to_bits());
            assert_eq!(a.t_gate.to_bits(), b.t_gate.to_bits());
            assert_eq!(a.cuts, b.cuts);
        }
    }

    #[test]
    fn locate_boundaries() {
        let s = build_schedule(&toy_params()).unwrap();
        let n0 = s.first_cut();
        assert_eq!(s.locate(n0).unwrap(), Location::Cell { k: 1, j: 0 });
        assert_eq!(
            s.locate(s.epochs[0].cuts[1] - 1).unwrap(),
            Location::Cell { k: 1, j: 0 }
        );
        assert_eq!(
            s.locate(s.epochs[0].cuts[1]).unwrap(),
            Location::Cell { k: 1, j: 1 }
        );
        assert_eq!(s.locate(1).unwrap(), Location::PreEpoch);
        assert!(matches!(
            s.locate(s.terminal),
            Err(Error::OutOfRange { .. })
        ));
        assert!(s.locate(0).is_err());
    }

    #[test]
    fn locate_is_a_partition_of_the_domain() {
        let s = build_schedule(&toy_params()).unwrap();
        // exhaustive: cell starts reconstruct the boundaries exactly
        let mut prev = s.locate(1).unwrap();
        let mut starts = Vec::new();
        for n in 2..s.terminal {
            let here = s.locate(n).unwrap();
            if here != prev {
                starts.push(n);
                prev = here;
            }
        }
        let mut expected: Vec<u64> = s.epochs.iter().flat_map(|e| e.cuts.clone()).collect();
        expected.retain(|&c| c > 1);
        assert_eq!(starts, expected);
    }

    #[test]
    fn alpha_ramp() {
        let s = build_schedule(&toy_params()).unwrap();
        let ep = &s.epochs[0];
        assert_eq!(s.alpha(ep.cuts[0]).unwrap(), -1.0, "j = 0");
        assert_eq!(s.alpha(ep.cuts[4]).unwrap(), 1.0, "eps 0.5, j = 4");
        assert!(
            s.alpha(ep.cuts[5]).unwrap() > 1.0,
            "top cell pins the branch off"
        );
        assert_eq!(s.alpha(1).unwrap(), -1.0, "pre-epoch");
    }

    #[test]
    fn branch_selection_matches_direct_evaluation() {
        let s = build_schedule(&toy_params()).unwrap();
        let ep = &s.epochs[0];
        for n in (ep.cuts[2]..ep.cuts[2] + 200).filter(|n| n % 3 != 0) {
            let log = Logarithm::of(n).unwrap();
            let info = s.select_branch(&log).unwrap();
            let re = phase::re_value(n, ep.t_gate).unwrap();
            let expect_next = re < s.alpha(n).unwrap();
            assert_eq!(info.uses_next, expect_next, "n = {n}");
            assert_eq!(
                info.t_selected,
                if expect_next { s.t_final } else { ep.t_main }
            );
        }
    }

    #[test]
    fn two_epoch_budgets_decrease() {
        let p = BuildParams {
            q: 3,
            mode: TargetMode::ConjChi,
            eps: vec![0.5, 0.25],
            d_max: vec![2, 3],
            eps_final: Some(0.1),
            d_final: None,
            growth: 2.0,
            t0: 0.0,
            search_budget: 100_000_000,
        };
        let s = build_schedule(&p).unwrap();
        assert_eq!(s.epochs[1].j_max, 9, "ceil(2/0.25) + 1");
        let report = validate(&s);
        let budget = report
            .iter()
            .find(|r| r.name == "error_budget_decreasing")
            .unwrap();
        assert!(budget.pass, "B_2 < B_1 must hold: {}", budget.details);
    }

    #[test]
    fn tampered_schedule_fails_exactly_the_right_checks() {
        let mut s = build_schedule(&toy_params()).unwrap();
        s.epochs[0].cuts[1] = s.epochs[0].cuts[0] + 1; // breaks ratio > D
        let report = validate(&s);
        let growth = report
            .iter()
            .find(|r| r.name == "cut_growth_epoch_1")
            .unwrap();
        assert!(!growth.pass);
        let others_reported = report.iter().filter(|r| r.pass).count();
        assert!(others_reported > 3, "other checks still run and pass");

        let mut s2 = build_schedule(&toy_params()).unwrap();
        s2.epochs[0].t_gate = s2.epochs[0].t_main - 1.0; // t_k < T_k
        let report2 = validate(&s2);
        assert!(
            !report2
                .iter()
                .find(|r| r.name == "chain_separation_epoch_1")
                .unwrap()
                .pass
        );
    }

    #[test]
    fn infeasible_rules_are_rejected() {
        let mut p = toy_params();
        p.eps = vec![0.5, 0.5];
        p.d_max = vec![2, 2];
        assert!(matches!(build_schedule(&p), Err(Error::InfeasibleRule(_))));
        let mut p2 = toy_params();
        p2.growth = 1.0;
        assert!(build_schedule(&p2).is_err());
        let mut p3 = toy_params();
        p3.d_max = vec![0];
        assert!(build_schedule(&p3).is_err());
    }
}
