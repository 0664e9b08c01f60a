//! The almost-multiplicative sign function f.
//!
//! On numbers coprime to 3, f(n) = sign(Re(chi(n) n^{i T_ell})) with the
//! branch ell chosen exactly as for the stable set; powers of 3 alternate:
//! f(3^m n) = (-1)^m f(n). The schedule's frequencies satisfy the negated
//! targets |chi(p) p^{i T_k} + 1| <= eps_k, so multiplying by a small prime
//! flips the sign of the deciding real part, and f(pn) = -f(n) away from the
//! decision boundaries while f still carries strong shift correlations.

use crate::dirichlet::DirichletCharacter;
use crate::phase::{self, Arc, Logarithm};
use crate::schedule::Schedule;
use crate::stable_set::{self, strip_q};
use crate::tsearch::TargetMode;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct SignedParams {
    schedule: Schedule,
    chi: DirichletCharacter,
    /// Sign boundaries of Re(chi(n) n^{iT}): the quarter-turn arc endpoints.
    sign_arc: Arc,
}

impl SignedParams {
    pub fn new(schedule: Schedule) -> Result<SignedParams> {
        if schedule.q != 3 {
            return Err(Error::Domain(format!(
                "the signed construction is defined mod 3, got q = {}",
                schedule.q
            )));
        }
        if schedule.mode != TargetMode::NegChi {
            return Err(Error::Domain(format!(
                "the signed construction needs a neg_chi schedule, got {}",
                schedule.mode.label()
            )));
        }
        let chi = DirichletCharacter::mod_q(3)?;
        let sign_arc = Arc::new(0.25, 0.5)?;
        Ok(SignedParams {
            schedule,
            chi,
            sign_arc,
        })
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    /// Scan ranges on which `eval` is total.
    pub fn supported_end(&self) -> u64 {
        self.schedule.terminal
    }

    pub fn dilation_scan_end(&self, p: u64) -> u64 {
        self.schedule.terminal / p
    }

    /// f(n) in {+1, -1}; never 0 (ties go to +1).
    pub fn eval(&self, n: u64) -> Result<i8> {
        if n == 0 {
            return Err(Error::Domain("f needs n >= 1".into()));
        }
        let (m, nprime) = strip_q(3, n);
        let base = if nprime == 1 {
            1
        } else {
            let log = Logarithm::of(nprime)?;
            let info = self.schedule.select_branch(&log).map_err(|e| match e {
                Error::OutOfRange { n, .. } => Error::OutOfRange {
                    what: "signed function",
                    n,
                    end: self.schedule.terminal,
                },
                other => other,
            })?;
            let re = phase::re_value_of(&log.phase(info.t_selected)?);
            phase::sign_with_tie(self.chi.chi_real(nprime) as f64 * re)
        };
        Ok(if m % 2 == 0 { base } else { -base })
    }

    /// Decision-boundary distance of n' in turns, same geometry and gate
    /// rescaling as the stable set's margin; +inf when n' = 1.
    pub fn margin(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::Domain("margin needs n >= 1".into()));
        }
        let (_, nprime) = strip_q(3, n);
        if nprime == 1 {
            return Ok(f64::INFINITY);
        }
        let log = Logarithm::of(nprime)?;
        let info = self.schedule.select_branch(&log)?;
        let chi_turns = if nprime % 3 == 1 { 0.0 } else { 0.5 };
        stable_set::margin_with_arc(&self.sign_arc, chi_turns, &log, &info)
    }

    /// The branch (ell, T_ell) used by a stripped n', as for the stable set.
    pub fn selected_t(&self, nprime: u64) -> Result<(u32, f64)> {
        let log = Logarithm::of(nprime)?;
        let info = self.schedule.select_branch(&log)?;
        Ok((info.level(), info.t_selected))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{build_schedule, BuildParams};

    fn toy() -> SignedParams {
        let p = BuildParams {
            q: 3,
            mode: TargetMode::NegChi,
            eps: vec![0.5],
            d_max: vec![2],
            eps_final: Some(0.25),
            d_final: None,
            growth: 2.0,
            t0: 0.0,
            search_budget: 50_000_000,
        };
        SignedParams::new(build_schedule(&p).unwrap()).unwrap()
    }

    #[test]
    fn powers_of_three_alternate() {
        let f = toy();
        assert_eq!(f.eval(1).unwrap(), 1);
        assert_eq!(f.eval(3).unwrap(), -1);
        assert_eq!(f.eval(9).unwrap(), 1);
        assert_eq!(f.eval(27).unwrap(), -1);
    }

    #[test]
    fn exact_antisymmetry_at_three() {
        let f = toy();
        for n in 1..f.supported_end() {
            assert_eq!(f.eval(3 * n).unwrap(), -f.eval(n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn range_is_plus_minus_one() {
        let f = toy();
        for n in 1..f.supported_end() {
            assert!(f.eval(n).unwrap().abs() == 1);
        }
    }

    #[test]
    fn schedule_mode_is_enforced() {
        let p = BuildParams {
            q: 3,
            mode: TargetMode::ConjChi,
            eps: vec![0.5],
            d_max: vec![2],
            eps_final: Some(0.25),
            d_final: None,
            growth: 2.0,
            t0: 0.0,
            search_budget: 50_000_000,
        };
        assert!(SignedParams::new(build_schedule(&p).unwrap()).is_err());
    }

    #[test]
    fn neg_chi_targets_flip_signs_under_dilation() {
        // Sign-flip soundness: margin clear of the tolerance plus matching
        // cell/branch selections force f(pn) = -f(n) exactly.
        let f = toy();
        let s = f.schedule();
        let p = 2u64;
        let delta = phase::chord_to_turns(s.epochs[0].eps);
        let mut tested = 0u64;
        for n in 2..f.dilation_scan_end(p) {
            if n % 3 == 0 {
                continue;
            }
            let (la, lb) = (s.locate(n), s.locate(p * n));
            let same_epoch = match (la.unwrap(), lb.unwrap()) {
                (
                    crate::schedule::Location::Cell { k: ka, .. },
                    crate::schedule::Location::Cell { k: kb, .. },
                ) => ka == kb,
                (crate::schedule::Location::PreEpoch, crate::schedule::Location::PreEpoch) => true,
                _ => false,
            };
            if same_epoch
                && f.selected_t(n).unwrap().0 == f.selected_t(p * n).unwrap().0
                && f.margin(n).unwrap() > delta + 1e-7
            {
                assert_eq!(f.eval(p * n).unwrap(), -f.eval(n).unwrap(), "n = {n}");
                tested += 1;
            }
        }
        assert!(tested > 100, "sign-flip core exercised on {tested} numbers");
    }

    #[test]
    fn adjacent_pairs_anticorrelate_on_residue_one() {
        // For n = 1 mod 3 with margin clear of the shift perturbation and no
        // cell boundary in between, f(n) f(n+1) = -1 exactly.
        let f = toy();
        let s = f.schedule();
        let mut tested = 0u64;
        for n in (s.first_cut()..f.supported_end() - 1).filter(|n| n % 3 == 1) {
            let (_, t_sel) = f.selected_t(n).unwrap();
            let threshold = t_sel / n as f64;
            let same_cell = s.locate(n).unwrap() == s.locate(n + 1).unwrap();
            if same_cell && f.margin(n).unwrap() > threshold + 1e-7 {
                assert_eq!(
                    f.eval(n).unwrap() as i32 * f.eval(n + 1).unwrap() as i32,
                    -1,
                    "pair at n = {n}"
                );
                tested += 1;
            }
        }
        assert!(tested > 50, "pair law exercised on {tested} numbers");
    }
}
