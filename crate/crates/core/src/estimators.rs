//! Finite-scale measurements: densities, dilation-stability defects, shifted
//! intersections, correlations, local averages, and the two-frequency joint
//! arc counts.
//!
//! Everything here is deterministic. Sampling is stride sampling at fixed
//! arithmetic-progression points (never random), counts are integer
//! reductions, and parallel execution partitions the index range so merged
//! counts equal the serial ones bit for bit.

use crate::phase::{self, Arc, Logarithm};
use crate::stable_set::{self, StableSetParams};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

/// A counted frequency with the exact integers behind it.
#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub label: String,
    pub numerator: u64,
    pub denominator: u64,
    pub frequency: f64,
    pub lo: u64,
    pub hi: u64,
    pub stride: u64,
    pub context: String,
}

impl DensityReport {
    fn new(
        label: String,
        num: u64,
        den: u64,
        lo: u64,
        hi: u64,
        stride: u64,
        context: String,
    ) -> DensityReport {
        DensityReport {
            label,
            numerator: num,
            denominator: den,
            frequency: num as f64 / den as f64,
            lo,
            hi,
            stride,
            context,
        }
    }
}

/// A set-like predicate, total on [1, supported_end()).
pub trait Indicator: Sync {
    fn test(&self, n: u64) -> bool;
    fn supported_end(&self) -> u64 {
        u64::MAX
    }
}

impl<F: Fn(u64) -> bool + Sync> Indicator for F {
    fn test(&self, n: u64) -> bool {
        self(n)
    }
}

impl Indicator for StableSetParams {
    fn test(&self, n: u64) -> bool {
        stable_set::contains(self, n).expect("scan range validated against supported_end")
    }
    fn supported_end(&self) -> u64 {
        StableSetParams::supported_end(self)
    }
}

/// A +/-1 function, total on [1, supported_end()).
pub trait SignFn: Sync {
    fn eval(&self, n: u64) -> i8;
    fn supported_end(&self) -> u64 {
        u64::MAX
    }
}

impl<F: Fn(u64) -> i8 + Sync> SignFn for F {
    fn eval(&self, n: u64) -> i8 {
        self(n)
    }
}

impl SignFn for crate::signed::SignedParams {
    fn eval(&self, n: u64) -> i8 {
        crate::signed::SignedParams::eval(self, n)
            .expect("scan range validated against supported_end")
    }
    fn supported_end(&self) -> u64 {
        crate::signed::SignedParams::supported_end(self)
    }
}

/// Deterministic stride aiming at ~`target_samples` points over [lo, hi),
/// bumped to stay coprime to the given moduli so arithmetic-progression
/// sampling cannot alias a residue class of interest.
pub fn coprime_stride(lo: u64, hi: u64, avoid: &[u64], target_samples: u64) -> u64 {
    debug_assert!(hi > lo && target_samples > 0);
    let mut stride = ((hi - lo) / target_samples).max(1);
    while avoid.iter().any(|&b| b > 1 && stride.is_multiple_of(b)) {
        stride += 1;
    }
    stride
}

fn validate_range(lo: u64, hi: u64, stride: u64) -> Result<u64> {
    if lo < 1 || hi <= lo {
        return Err(Error::Domain(format!(
            "need 1 <= lo < hi, got [{lo}, {hi})"
        )));
    }
    if stride < 1 {
        return Err(Error::Domain("stride must be >= 1".into()));
    }
    Ok((hi - lo).div_ceil(stride))
}

/// Count sample points of [lo, hi) with the given stride satisfying `pred`;
/// returns (hits, samples). The parallel and serial paths produce identical
/// integers.
pub fn count_samples<P: Fn(u64) -> bool + Sync>(
    lo: u64,
    hi: u64,
    stride: u64,
    parallel: bool,
    pred: P,
) -> Result<(u64, u64)> {
    let samples = validate_range(lo, hi, stride)?;
    let hits = if parallel {
        (0..samples as usize)
            .into_par_iter()
            .with_min_len(1 << 12)
            .filter(|&i| pred(lo + i as u64 * stride))
            .count() as u64
    } else {
        (0..samples).filter(|&i| pred(lo + i * stride)).count() as u64
    };
    Ok((hits, samples))
}

/// Frequency of `set` over the stride samples of [lo, hi).
pub fn density<I: Indicator>(set: &I, lo: u64, hi: u64, stride: u64) -> Result<DensityReport> {
    if hi > set.supported_end() {
        return Err(Error::OutOfRange {
            what: "density scan",
            n: hi,
            end: set.supported_end(),
        });
    }
    let (num, den) = count_samples(lo, hi, stride, true, |n| set.test(n))?;
    Ok(DensityReport::new(
        "density".into(),
        num,
        den,
        lo,
        hi,
        stride,
        String::new(),
    ))
}

/// Frequency of 1_{n in S} != 1_{pn in S}: the measurable dilation-stability
/// defect at p. The scan is rejected up front if p*hi leaves the predicate's
/// supported range.
pub fn stability_defect<I: Indicator>(
    set: &I,
    p: u64,
    lo: u64,
    hi: u64,
    stride: u64,
) -> Result<DensityReport> {
    if p < 2 {
        return Err(Error::Domain(format!("defect prime must be >= 2, got {p}")));
    }
    let end = set.supported_end();
    if hi.checked_mul(p).is_none() || hi.saturating_mul(p) > end {
        return Err(Error::OutOfRange {
            what: "stability defect scan (p * hi)",
            n: hi,
            end: end / p,
        });
    }
    let (num, den) = count_samples(lo, hi, stride, true, |n| set.test(n) != set.test(p * n))?;
    Ok(DensityReport::new(
        format!("stability_defect_p{p}"),
        num,
        den,
        lo,
        hi,
        stride,
        format!("p={p}"),
    ))
}

/// Frequency of n lying in every shifted copy: n - h in S for all h in
/// `shifts` (n - h < 1 counts as a miss).
pub fn shifted_intersection_density<I: Indicator>(
    set: &I,
    shifts: &[u64],
    lo: u64,
    hi: u64,
    stride: u64,
) -> Result<DensityReport> {
    let mut sorted = shifts.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != shifts.len() {
        return Err(Error::Domain("shifts must be distinct".into()));
    }
    if hi > set.supported_end() {
        return Err(Error::OutOfRange {
            what: "intersection scan",
            n: hi,
            end: set.supported_end(),
        });
    }
    let (num, den) = count_samples(lo, hi, stride, true, |n| {
        shifts.iter().all(|&h| n > h && set.test(n - h))
    })?;
    let label = format!(
        "intersection_{}",
        shifts
            .iter()
            .map(|h| h.to_string())
            .collect::<Vec<_>>()
            .join("_")
    );
    Ok(DensityReport::new(
        label,
        num,
        den,
        lo,
        hi,
        stride,
        format!("shifts={shifts:?}"),
    ))
}

/// Correlation statistics with the exact integer sum behind the average.
#[derive(Clone, Debug, Serialize)]
pub struct CorrelationReport {
    pub sum: i64,
    pub samples: u64,
    pub value: f64,
    pub lo: u64,
    pub hi: u64,
    pub stride: u64,
}

/// Average of f(n) f(n+1) over the stride samples of [lo, hi).
pub fn pair_correlation<F: SignFn>(
    f: &F,
    lo: u64,
    hi: u64,
    stride: u64,
) -> Result<CorrelationReport> {
    let samples = validate_range(lo, hi, stride)?;
    if hi.saturating_add(1) > f.supported_end() {
        return Err(Error::OutOfRange {
            what: "pair correlation scan (hi + 1)",
            n: hi,
            end: f.supported_end() - 1,
        });
    }
    let sum: i64 = (0..samples as usize)
        .into_par_iter()
        .with_min_len(1 << 11)
        .map(|i| {
            let n = lo + i as u64 * stride;
            f.eval(n) as i64 * f.eval(n + 1) as i64
        })
        .sum();
    Ok(CorrelationReport {
        sum,
        samples,
        value: sum as f64 / samples as f64,
        lo,
        hi,
        stride,
    })
}

/// Local average report; `value` = mean over sampled n of
/// |(1/H) sum_{h<=H} f(n+h) 1_{n+h = 1 mod 3}|, kept exact as an integer
/// total of |inner sums| over H * samples.
#[derive(Clone, Debug, Serialize)]
pub struct LocalAverageReport {
    pub h: u64,
    pub abs_sum_total: u64,
    pub samples: u64,
    pub value: f64,
    pub lo: u64,
    pub hi: u64,
    pub stride: u64,
}

pub fn local_average<F: SignFn>(
    f: &F,
    lo: u64,
    hi: u64,
    h: u64,
    stride: u64,
) -> Result<LocalAverageReport> {
    if h < 1 {
        return Err(Error::Domain("H must be >= 1".into()));
    }
    let samples = validate_range(lo, hi, stride)?;
    if hi.saturating_add(h) > f.supported_end() {
        return Err(Error::OutOfRange {
            what: "local average scan (hi + H)",
            n: hi,
            end: f.supported_end().saturating_sub(h),
        });
    }
    let abs_sum_total: u64 = (0..samples as usize)
        .into_par_iter()
        .with_min_len(1 << 8)
        .map(|i| {
            let n = lo + i as u64 * stride;
            // only offsets with n + h0 = 1 mod 3 contribute
            let first = match n % 3 {
                0 => 1,
                1 => 3,
                _ => 2,
            };
            let mut inner = 0i64;
            let mut off = first;
            while off <= h {
                inner += f.eval(n + off) as i64;
                off += 3;
            }
            inner.unsigned_abs()
        })
        .sum();
    Ok(LocalAverageReport {
        h,
        abs_sum_total,
        samples,
        value: abs_sum_total as f64 / (h as f64 * samples as f64),
        lo,
        hi,
        stride,
    })
}

fn arc_cell(m: u64, a: u64) -> Result<Arc> {
    Arc::new(a as f64 / m as f64, 1.0 / m as f64)
}

fn check_two_freq(t1: f64, t2: f64, n_max: u64) -> Result<()> {
    if t1.is_nan() || t2.is_nan() || t1 <= 2.0 || t2 <= 2.0 {
        return Err(Error::Domain(format!("need T1, T2 > 2, got {t1}, {t2}")));
    }
    if n_max < 2 {
        return Err(Error::Domain("need N >= 2".into()));
    }
    Ok(())
}

/// Joint frequency over n <= N of phase(n, T1) in [a1/m, (a1+1)/m) and
/// phase(n, T2) in [a2/m, (a2+1)/m).
pub fn arc_pair_frequency(
    t1: f64,
    t2: f64,
    m: u64,
    a1: u64,
    a2: u64,
    n_max: u64,
) -> Result<DensityReport> {
    check_two_freq(t1, t2, n_max)?;
    if m < 1 || a1 >= m || a2 >= m {
        return Err(Error::Domain(format!(
            "need 0 <= a_i < m, got m={m}, a1={a1}, a2={a2}"
        )));
    }
    let (c1, c2) = (arc_cell(m, a1)?, arc_cell(m, a2)?);
    let (num, den) = count_samples(1, n_max + 1, 1, true, |n| {
        let log = Logarithm::of(n).expect("n <= N within phase domain");
        let p1 = log.phase(t1).expect("T1 within contract");
        let p2 = log.phase(t2).expect("T2 within contract");
        phase::in_arc(&p1, &c1) && phase::in_arc(&p2, &c2)
    })?;
    Ok(DensityReport::new(
        format!("arc_pair_{a1}_{a2}"),
        num,
        den,
        1,
        n_max + 1,
        1,
        format!("T1={t1} T2={t2} m={m}"),
    ))
}

/// All m x m joint cell frequencies over n <= N in a single pass; the cell
/// counts partition N exactly.
pub fn arc_pair_grid(t1: f64, t2: f64, m: u64, n_max: u64) -> Result<Vec<DensityReport>> {
    check_two_freq(t1, t2, n_max)?;
    if m < 1 {
        return Err(Error::Domain("need m >= 1".into()));
    }
    let cells = (m * m) as usize;
    let counts = (0..n_max as usize)
        .into_par_iter()
        .with_min_len(1 << 13)
        .fold(
            || vec![0u64; cells],
            |mut acc, i| {
                let n = i as u64 + 1;
                let log = Logarithm::of(n).expect("n <= N within phase domain");
                let p1 = log.phase(t1).expect("T1 within contract");
                let p2 = log.phase(t2).expect("T2 within contract");
                let c1 = (p1.turns() * m as f64) as u64;
                let c2 = (p2.turns() * m as f64) as u64;
                acc[(c1.min(m - 1) * m + c2.min(m - 1)) as usize] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; cells],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok((0..m)
        .flat_map(|a1| (0..m).map(move |a2| (a1, a2)))
        .map(|(a1, a2)| {
            DensityReport::new(
                format!("arc_pair_{a1}_{a2}"),
                counts[(a1 * m + a2) as usize],
                n_max,
                1,
                n_max + 1,
                1,
                format!("T1={t1} T2={t2} m={m}"),
            )
        })
        .collect())
}

/// Joint frequency for arbitrary arcs I1, I2 (expected near |I1| |I2| in the
/// regime T1 << T2 << N).
pub fn arc_pair_frequency_real(
    t1: f64,
    t2: f64,
    i1: &Arc,
    i2: &Arc,
    n_max: u64,
) -> Result<DensityReport> {
    check_two_freq(t1, t2, n_max)?;
    let (num, den) = count_samples(1, n_max + 1, 1, true, |n| {
        let log = Logarithm::of(n).expect("n <= N within phase domain");
        let p1 = log.phase(t1).expect("T1 within contract");
        let p2 = log.phase(t2).expect("T2 within contract");
        phase::in_arc(&p1, i1) && phase::in_arc(&p2, i2)
    })?;
    Ok(DensityReport::new(
        "arc_pair_real".into(),
        num,
        den,
        1,
        n_max + 1,
        1,
        format!(
            "T1={t1} T2={t2} I1=[{},+{}) I2=[{},+{})",
            i1.lo(),
            i1.length(),
            i2.lo(),
            i2.length()
        ),
    ))
}

/// Upper-half-plane frequency of n^{iT} at T = pi/ln 2 for each checkpoint
/// N: at this frequency the fraction oscillates between ~1/3 and ~2/3
/// forever, exhibiting the fixed-T non-convergence.
pub fn fixed_t_oscillation(n_list: &[u64]) -> Result<Vec<(u64, f64)>> {
    if n_list.is_empty() || !n_list.windows(2).all(|w| w[0] < w[1]) || n_list[0] < 1 {
        return Err(Error::Domain(
            "checkpoints must be ascending and >= 1".into(),
        ));
    }
    let t = std::f64::consts::PI / std::f64::consts::LN_2;
    let upper = Arc::new(0.0, 0.5)?;
    // count each segment between checkpoints in parallel, then prefix-sum
    let mut bounds = vec![0u64];
    bounds.extend_from_slice(n_list);
    let segment_counts: Vec<u64> = bounds
        .windows(2)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|w| {
            let (num, _) = count_samples(w[0] + 1, w[1] + 1, 1, true, |n| {
                let p = phase::phase(n, t).expect("toy frequency within contract");
                phase::in_arc(&p, &upper)
            })
            .expect("segment ranges are valid");
            num
        })
        .collect();
    let mut acc = 0u64;
    Ok(n_list
        .iter()
        .zip(segment_counts)
        .map(|(&n, c)| {
            acc += c;
            (n, acc as f64 / n as f64)
        })
        .collect())
}

/// Constant-free diagnostic 1/T1 + T1 ln T1 / T2 + T2 ln T1 / N for the
/// two-frequency counts; meaningful in the regime T1 << T2 << N and large
/// otherwise.
pub fn lemma_error_bound(t1: f64, t2: f64, n: u64) -> Result<f64> {
    check_two_freq(t1, t2, n)?;
    Ok(1.0 / t1 + t1 * t1.ln() / t2 + t2 * t1.ln() / n as f64)
}
