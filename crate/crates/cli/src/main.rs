//! Command-line driver: every construction and estimator behind one binary
//! with reproducible CSV/JSON outputs.

mod config;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use config::{obtain_schedule, parse_count, parse_range, OutputFormat, RunConfig};
use stable_sets::dirichlet::{self, DirichletCharacter};
use stable_sets::estimators::{self, DensityReport};
use stable_sets::report;
use stable_sets::schedule::{self, BuildParams, Schedule};
use stable_sets::signed::SignedParams;
use stable_sets::stable_set::{self, StableSetParams};
use stable_sets::tsearch::{self, TargetMode, TargetSpec};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "stable-sets",
    version,
    about = "Builds dilation-stable set counterexamples from parameter schedules and verifies their statistics at desk scale"
)]
struct Cli {
    /// Worker threads for parallel counting (default: available parallelism;
    /// results do not depend on this).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Cache directory for built schedules.
    #[arg(long, global = true, default_value = ".schedule-cache")]
    cache_dir: PathBuf,

    /// Omit the timestamp comment line from CSV output.
    #[arg(long, global = true)]
    no_timestamp: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ScheduleSource {
    /// Schedule JSON produced by build-schedule (alternative to inline
    /// build flags).
    #[arg(long)]
    schedule: Option<PathBuf>,

    /// Modulus q (odd prime) for an inline build.
    #[arg(long)]
    q: Option<u64>,

    /// Number of epochs K; must match the eps and d-max list lengths.
    #[arg(long)]
    epochs: Option<usize>,

    /// Target mode for the sign frequencies: conj_chi | one | neg_chi.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<TargetMode>,

    /// Comma-separated eps_k list, decreasing.
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,

    /// Comma-separated D_k list, nondecreasing.
    #[arg(long = "d-max", value_delimiter = ',')]
    d_max: Vec<u64>,

    /// Tolerance for the terminal frequency (default 0.4 * eps_K).
    #[arg(long)]
    eps_final: Option<f64>,

    /// Prime bound for the terminal frequency (default D_K).
    #[arg(long)]
    d_final: Option<u64>,

    /// Growth factor applied to every separation in the chain.
    #[arg(long, default_value_t = 4.0)]
    growth: f64,

    /// Lower bound for the first frequency search.
    #[arg(long, default_value_t = 0.0)]
    t0: f64,

    /// Scan-step budget per frequency search.
    #[arg(long, default_value_t = 2_000_000_000)]
    budget: u64,
}

impl ScheduleSource {
    fn build_params(&self, default_mode: TargetMode) -> Result<Option<BuildParams>> {
        let Some(q) = self.q else {
            return Ok(None);
        };
        if let Some(k) = self.epochs {
            if self.eps.len() != k || self.d_max.len() != k {
                bail!(
                    "--epochs {k} does not match the eps/d-max lists ({} and {} entries)",
                    self.eps.len(),
                    self.d_max.len()
                );
            }
        }
        Ok(Some(BuildParams {
            q,
            mode: self.mode.unwrap_or(default_mode),
            eps: self.eps.clone(),
            d_max: self.d_max.clone(),
            eps_final: self.eps_final,
            d_final: self.d_final,
            growth: self.growth,
            t0: self.t0,
            search_budget: self.budget,
        }))
    }

    fn obtain(&self, cache_dir: &Path, default_mode: TargetMode) -> Result<Schedule> {
        let params = self.build_params(default_mode)?;
        obtain_schedule(self.schedule.as_deref(), params.as_ref(), cache_dir)
    }
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output format.
    #[arg(long, default_value = "csv")]
    format: OutputFormat,

    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Search for T > T0 with every p^{iT} (p <= D, p != q) within eps of
    /// its mode target; prints T and a per-prime verification table.
    FindT {
        #[arg(long, default_value_t = 3)]
        q: u64,
        #[arg(long, value_parser = parse_mode, default_value = "conj_chi")]
        mode: TargetMode,
        #[arg(long = "d-max")]
        d_max: u64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        /// Scan step (default: the completeness guard asin(eps/4)/ln pmax).
        #[arg(long)]
        step: Option<f64>,
        #[arg(long, default_value_t = 2_000_000_000)]
        budget: u64,
        #[command(flatten)]
        output: OutputArgs,
    },

    /// Build a schedule from inline parameters, validate it, and write the
    /// JSON document.
    BuildSchedule {
        #[command(flatten)]
        source: ScheduleSource,
        #[command(flatten)]
        output: OutputArgs,
    },

    /// Run the full claim suite for a stable set: density, stability defects
    /// for all p <= D_1, the q-fold consecutive intersection, and the
    /// schedule's own invariants.
    Verify {
        #[command(flatten)]
        source: ScheduleSource,
        /// Measurement window LO..HI (default: first boundary to terminal).
        #[arg(long, value_parser = parse_range)]
        range: Option<(u64, u64)>,
        /// Sampling stride (default: aims at ~1e7 samples, coprime to the
        /// small primes in play).
        #[arg(long)]
        stride: Option<u64>,
        /// Start the window at 1 instead of the first boundary.
        #[arg(long)]
        include_pre_epoch: bool,
        /// Drop sample points within 3 of any boundary N_{k,j}.
        #[arg(long)]
        exclude_boundaries: bool,
        #[command(flatten)]
        output: OutputArgs,
    },

    /// Pair correlation and local-average sweep for the signed function.
    Liouville {
        #[command(flatten)]
        source: ScheduleSource,
        #[arg(long, value_parser = parse_range)]
        range: Option<(u64, u64)>,
        #[arg(long)]
        stride: Option<u64>,
        /// Largest window length H in the local-average sweep.
        #[arg(long = "h-max", default_value_t = 300)]
        h_max: u64,
        #[command(flatten)]
        output: OutputArgs,
    },

    /// Two-frequency joint arc grid, its error diagnostic, and the fixed-T
    /// oscillation demonstration.
    Lemma {
        #[arg(long, default_value_t = 100.0)]
        t1: f64,
        #[arg(long, default_value_t = 1e5)]
        t2: f64,
        #[arg(long, default_value_t = 4)]
        m: u64,
        /// Scan length N for the grid.
        #[arg(long = "n-max", value_parser = parse_count, default_value = "1e7")]
        n_max: u64,
        /// Oscillation checkpoints 4^k and 2*4^k for k in this range.
        #[arg(long, default_value_t = 5)]
        osc_from: u32,
        #[arg(long, default_value_t = 11)]
        osc_to: u32,
        #[command(flatten)]
        output: OutputArgs,
    },

    /// Locate n in the schedule partition.
    Locate {
        #[command(flatten)]
        source: ScheduleSource,
        n: u64,
    },

    /// Membership, branch, and margin of one n.
    Member {
        #[command(flatten)]
        source: ScheduleSource,
        n: u64,
    },

    /// Execute a run described by a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn parse_mode(s: &str) -> Result<TargetMode> {
    match s {
        "conj_chi" => Ok(TargetMode::ConjChi),
        "one" => Ok(TargetMode::One),
        "neg_chi" => Ok(TargetMode::NegChi),
        other => bail!("unknown mode {other:?}, expected conj_chi | one | neg_chi"),
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .context("initializing worker pool")?;
    }
    let timestamp = if cli.no_timestamp {
        None
    } else {
        Some(chrono::Utc::now().to_rfc3339())
    };
    match cli.command {
        Command::FindT {
            q,
            mode,
            d_max,
            eps,
            t0,
            step,
            budget,
            output,
        } => cmd_find_t(
            q,
            mode,
            d_max,
            eps,
            t0,
            step,
            budget,
            &output,
            timestamp.as_deref(),
        ),
        Command::BuildSchedule { source, output } => {
            cmd_build_schedule(&source, &cli.cache_dir, &output)
        }
        Command::Verify {
            source,
            range,
            stride,
            include_pre_epoch,
            exclude_boundaries,
            output,
        } => {
            let s = source.obtain(&cli.cache_dir, TargetMode::ConjChi)?;
            cmd_verify(
                s,
                range,
                stride,
                include_pre_epoch,
                exclude_boundaries,
                &output,
                timestamp.as_deref(),
            )
        }
        Command::Liouville {
            source,
            range,
            stride,
            h_max,
            output,
        } => {
            let s = source.obtain(&cli.cache_dir, TargetMode::NegChi)?;
            cmd_liouville(s, range, stride, h_max, &output, timestamp.as_deref())
        }
        Command::Lemma {
            t1,
            t2,
            m,
            n_max,
            osc_from,
            osc_to,
            output,
        } => cmd_lemma(
            t1,
            t2,
            m,
            n_max,
            osc_from,
            osc_to,
            &output,
            timestamp.as_deref(),
        ),
        Command::Locate { source, n } => {
            let s = source.obtain(&cli.cache_dir, TargetMode::ConjChi)?;
            cmd_locate(&s, n)
        }
        Command::Member { source, n } => {
            let s = source.obtain(&cli.cache_dir, TargetMode::ConjChi)?;
            cmd_member(s, n)
        }
        Command::Run { config } => {
            let cfg = RunConfig::load(&config)?;
            run_from_config(cfg, &cli.cache_dir, timestamp.as_deref())
        }
    }
}

fn write_output(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
        Some(p) => {
            std::fs::write(p, content).with_context(|| format!("writing {}", p.display()))?;
            eprintln!("wrote {}", p.display());
            Ok(())
        }
    }
}

fn density_csv(rows: &[DensityReport], timestamp: Option<&str>, extra: &[String]) -> String {
    let mut buf = Vec::new();
    if let Some(ts) = timestamp {
        writeln!(buf, "# generated {ts}").unwrap();
    }
    for line in extra {
        writeln!(buf, "# {line}").unwrap();
    }
    report::write_density_csv(&mut buf, rows, None).unwrap();
    String::from_utf8(buf).unwrap()
}

#[allow(clippy::too_many_arguments)]
fn cmd_find_t(
    q: u64,
    mode: TargetMode,
    d_max: u64,
    eps: f64,
    t0: f64,
    step: Option<f64>,
    budget: u64,
    output: &OutputArgs,
    timestamp: Option<&str>,
) -> Result<()> {
    let chi = DirichletCharacter::mod_q(q)?;
    let primes: Vec<u64> = dirichlet::primes_up_to(d_max)
        .into_iter()
        .filter(|&p| p != q)
        .collect();
    let targets = tsearch::targets_for_mode(&chi, &primes, mode)?;
    let step = step.unwrap_or_else(|| tsearch::max_safe_step(&primes, eps));
    let spec = TargetSpec::new(primes, targets, eps, t0)?;
    let estimate = tsearch::search_cost_estimate(spec.primes.len(), eps);
    eprintln!(
        "searching {} primes, eps {eps}, step {step:.6e} (~{estimate:.3e} windows expected)",
        spec.primes.len()
    );
    let started = std::time::Instant::now();
    let t = tsearch::find_t(&spec, step, budget)?;
    eprintln!("found T = {t} in {:.2?}", started.elapsed());
    let rows = tsearch::verify_t(&spec, t)?;
    let content = match output.format {
        OutputFormat::Json => {
            let body: Vec<_> = rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "prime": r.prime,
                        "target_turns": r.target_turns,
                        "phase_turns": r.phase_turns,
                        "chordal_error": r.chordal_error,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&serde_json::json!({
                "t": t,
                "mode": mode.label(),
                "eps": eps,
                "verification": body,
            }))? + "\n"
        }
        OutputFormat::Csv => {
            let mut buf = String::new();
            if let Some(ts) = timestamp {
                buf.push_str(&format!("# generated {ts}\n"));
            }
            buf.push_str(&format!("# T = {t} (mode {}, eps {eps})\n", mode.label()));
            buf.push_str("prime,target_turns,phase_turns,chordal_error\n");
            for r in rows {
                buf.push_str(&format!(
                    "{},{},{},{}\n",
                    r.prime,
                    report::fmt_real(r.target_turns),
                    report::fmt_real(r.phase_turns),
                    report::fmt_real(r.chordal_error)
                ));
            }
            buf
        }
    };
    write_output(output.out.as_deref(), &content)
}

fn cmd_build_schedule(
    source: &ScheduleSource,
    cache_dir: &Path,
    output: &OutputArgs,
) -> Result<()> {
    let Some(params) = source.build_params(TargetMode::ConjChi)? else {
        bail!("build-schedule needs inline parameters (--q, --eps, --d-max)");
    };
    let started = std::time::Instant::now();
    let s = config::build_cached(&params, cache_dir)?;
    eprintln!(
        "schedule ready in {:.2?}: K = {}, terminal = {}",
        started.elapsed(),
        s.k_epochs(),
        s.terminal
    );
    let checks = schedule::validate(&s);
    let mut failed = 0;
    for c in &checks {
        eprintln!(
            "[{}] {} - {}",
            if c.pass { "pass" } else { "FAIL" },
            c.name,
            c.details
        );
        failed += (!c.pass) as u32;
    }
    if failed > 0 {
        eprintln!("{failed} validation checks failed");
    }
    write_output(output.out.as_deref(), &(s.to_json()? + "\n"))
}

fn pick_stride(lo: u64, hi: u64, q: u64, target_samples: u64) -> u64 {
    estimators::coprime_stride(lo, hi, &[2, 3, 5, 7, 11, q], target_samples)
}

fn sorted_cuts(s: &Schedule) -> Vec<u64> {
    let mut cuts: Vec<u64> = s.epochs.iter().flat_map(|e| e.cuts.clone()).collect();
    cuts.push(s.terminal);
    cuts.sort_unstable();
    cuts
}

fn near_boundary(cuts: &[u64], n: u64) -> bool {
    let i = cuts.partition_point(|&c| c < n);
    let before = if i > 0 { cuts[i - 1] } else { 0 };
    let after = cuts.get(i).copied().unwrap_or(u64::MAX);
    n.saturating_sub(before) < 3 || after.saturating_sub(n) < 3
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    s: Schedule,
    range: Option<(u64, u64)>,
    stride: Option<u64>,
    include_pre_epoch: bool,
    exclude_boundaries: bool,
    output: &OutputArgs,
    timestamp: Option<&str>,
) -> Result<()> {
    let q = s.q;
    let d1 = s.epochs[0].d_max;
    let checks = schedule::validate(&s);
    for c in &checks {
        eprintln!(
            "[{}] {} - {}",
            if c.pass { "pass" } else { "FAIL" },
            c.name,
            c.details
        );
    }
    let params = StableSetParams::new(s)?;
    let sched = params.schedule();
    let default_lo = if include_pre_epoch {
        1
    } else {
        sched.first_cut()
    };
    let (lo, hi) = range.unwrap_or((default_lo, sched.terminal));
    let stride = stride.unwrap_or_else(|| pick_stride(lo, hi, q, 10_000_000));
    eprintln!("window [{lo}, {hi}), stride {stride}");
    let cuts = sorted_cuts(sched);
    let exclude = |n: u64| exclude_boundaries && near_boundary(&cuts, n);

    let mut rows = Vec::new();

    // density of S
    let (num, den) = estimators::count_samples(lo, hi, stride, true, |n| {
        !exclude(n) && stable_set::contains(&params, n).unwrap()
    })?;
    let (_, eligible) = if exclude_boundaries {
        estimators::count_samples(lo, hi, stride, true, |n| !exclude(n))?
    } else {
        (0, den)
    };
    let mk = |label: String, num: u64, den: u64| DensityReport {
        label,
        numerator: num,
        denominator: den,
        frequency: num as f64 / den as f64,
        lo,
        hi,
        stride,
        context: format!("q={q} terminal={}", sched.terminal),
    };
    rows.push(mk("density".into(), num, eligible));

    // stability defect for every p <= D_1 (the dilation scan caps hi at
    // terminal / p so p*n stays in the predicate's domain)
    for p in dirichlet::primes_up_to(d1) {
        let hi_p = hi.min(params.dilation_scan_end(p));
        let (num, den) = estimators::count_samples(lo, hi_p, stride, true, |n| {
            !exclude(n)
                && stable_set::contains(&params, n).unwrap()
                    != stable_set::contains(&params, p * n).unwrap()
        })?;
        let den = if exclude_boundaries {
            estimators::count_samples(lo, hi_p, stride, true, |n| !exclude(n))?.1
        } else {
            den
        };
        let mut row = mk(format!("stability_defect_p{p}"), num, den);
        row.hi = hi_p;
        rows.push(row);
    }

    // q-fold consecutive intersection
    let shifts: Vec<u64> = (0..q).collect();
    let ilo = lo.max(q);
    let (num, den) = estimators::count_samples(ilo, hi, stride, true, |n| {
        !exclude(n)
            && shifts
                .iter()
                .all(|&h| stable_set::contains(&params, n - h).unwrap())
    })?;
    let den = if exclude_boundaries {
        estimators::count_samples(ilo, hi, stride, true, |n| !exclude(n))?.1
    } else {
        den
    };
    let mut row = mk(
        format!(
            "intersection_{}",
            shifts
                .iter()
                .map(|h| h.to_string())
                .collect::<Vec<_>>()
                .join("_")
        ),
        num,
        den,
    );
    row.lo = ilo;
    rows.push(row);

    let content = match output.format {
        OutputFormat::Csv => {
            let extra: Vec<String> = checks
                .iter()
                .map(|c| {
                    format!(
                        "check {} {} {}",
                        c.name,
                        if c.pass { "pass" } else { "FAIL" },
                        c.details
                    )
                })
                .collect();
            density_csv(&rows, timestamp, &extra)
        }
        OutputFormat::Json => {
            serde_json::to_string_pretty(&serde_json::json!({
                "validation": checks,
                "reports": rows,
            }))? + "\n"
        }
    };
    write_output(output.out.as_deref(), &content)
}

fn cmd_liouville(
    s: Schedule,
    range: Option<(u64, u64)>,
    stride: Option<u64>,
    h_max: u64,
    output: &OutputArgs,
    timestamp: Option<&str>,
) -> Result<()> {
    let f = SignedParams::new(s)?;
    let sched = f.schedule();
    let (lo, hi) = range.unwrap_or((sched.first_cut(), sched.terminal - 1));
    let hi = hi.min(sched.terminal - 1);
    let stride = stride.unwrap_or_else(|| pick_stride(lo, hi, 3, 5_000_000));
    eprintln!("window [{lo}, {hi}), stride {stride}");

    let corr = estimators::pair_correlation(&f, lo, hi, stride)?;
    let lines = vec![report::correlation_row("pair_correlation", &corr)];
    let mut h = 3;
    let mut sweeps = Vec::new();
    while h <= h_max {
        let hi_h = hi.min(sched.terminal.saturating_sub(h));
        let r = estimators::local_average(&f, lo, hi_h, h, stride)?;
        sweeps.push(r);
        h *= 10;
    }
    let content = match output.format {
        OutputFormat::Csv => {
            let mut buf = String::new();
            if let Some(ts) = timestamp {
                buf.push_str(&format!("# generated {ts}\n"));
            }
            buf.push_str(report::CORRELATION_HEADER);
            buf.push('\n');
            for l in &lines {
                buf.push_str(l);
                buf.push('\n');
            }
            buf.push_str(report::LOCAL_AVERAGE_HEADER);
            buf.push('\n');
            for r in &sweeps {
                buf.push_str(&report::local_average_row("local_average", r));
                buf.push('\n');
            }
            buf
        }
        OutputFormat::Json => {
            serde_json::to_string_pretty(&serde_json::json!({
                "pair_correlation": corr,
                "local_average": sweeps,
            }))? + "\n"
        }
    };
    write_output(output.out.as_deref(), &content)
}

#[allow(clippy::too_many_arguments)]
fn cmd_lemma(
    t1: f64,
    t2: f64,
    m: u64,
    n_max: u64,
    osc_from: u32,
    osc_to: u32,
    output: &OutputArgs,
    timestamp: Option<&str>,
) -> Result<()> {
    let started = std::time::Instant::now();
    let rows = estimators::arc_pair_grid(t1, t2, m, n_max)?;
    eprintln!(
        "grid of {} cells over n <= {n_max} in {:.2?}",
        rows.len(),
        started.elapsed()
    );
    let bound = estimators::lemma_error_bound(t1, t2, n_max)?;
    let target = 1.0 / (m * m) as f64;
    let worst = rows
        .iter()
        .map(|r| (r.frequency - target).abs())
        .fold(0.0f64, f64::max);
    eprintln!("worst cell deviation {worst:.6e} vs error bound {bound:.6e}");

    let mut checkpoints = Vec::new();
    for k in osc_from..=osc_to {
        checkpoints.push(1u64 << (2 * k));
        checkpoints.push(2u64 << (2 * k));
    }
    checkpoints.sort_unstable();
    let osc = estimators::fixed_t_oscillation(&checkpoints)?;
    let mut all_rows = rows;
    for (n, freq) in &osc {
        all_rows.push(DensityReport {
            label: "fixed_t_upper_half".into(),
            numerator: (freq * *n as f64).round() as u64,
            denominator: *n,
            frequency: *freq,
            lo: 1,
            hi: n + 1,
            stride: 1,
            context: "T = pi/ln 2".into(),
        });
    }
    let content = match output.format {
        OutputFormat::Csv => {
            let extra = vec![
                format!(
                    "lemma_error_bound(T1={t1}, T2={t2}, N={n_max}) = {}",
                    report::fmt_real(bound)
                ),
                format!("worst_cell_deviation = {}", report::fmt_real(worst)),
            ];
            density_csv(&all_rows, timestamp, &extra)
        }
        OutputFormat::Json => {
            serde_json::to_string_pretty(&serde_json::json!({
                "t1": t1, "t2": t2, "m": m, "n_max": n_max,
                "lemma_error_bound": bound,
                "worst_cell_deviation": worst,
                "cells": all_rows,
            }))? + "\n"
        }
    };
    write_output(output.out.as_deref(), &content)
}

fn cmd_locate(s: &Schedule, n: u64) -> Result<()> {
    let loc = s.locate(n)?;
    let alpha = s.alpha(n)?;
    match loc {
        schedule::Location::PreEpoch => {
            println!(
                "n = {n}: pre-epoch region [1, {}), alpha = {alpha}",
                s.first_cut()
            );
        }
        schedule::Location::Cell { k, j } => {
            let ep = &s.epochs[(k - 1) as usize];
            let cell_end = if (j as usize) < ep.cuts.len() - 1 {
                ep.cuts[j as usize + 1]
            } else if (k as usize) < s.epochs.len() {
                s.epochs[k as usize].cuts[0]
            } else {
                s.terminal
            };
            println!(
                "n = {n}: epoch {k}, cell {j} = [{}, {cell_end}), alpha = {alpha}",
                ep.cuts[j as usize]
            );
        }
    }
    Ok(())
}

fn cmd_member(s: Schedule, n: u64) -> Result<()> {
    let params = StableSetParams::new(s)?;
    let (m, nprime) = stable_set::strip_q(params.q(), n);
    let member = stable_set::contains(&params, n)?;
    let margin = stable_set::margin(&params, n)?;
    println!("n = {n} = {}^{m} * {nprime}", params.q());
    if nprime > 1 {
        let (level, t) = stable_set::selected_t(&params, nprime)?;
        println!("branch: level {level}, T = {t}");
    }
    println!("member: {member}");
    println!("margin: {margin} turns");
    Ok(())
}

fn run_from_config(cfg: RunConfig, cache_dir: &Path, timestamp: Option<&str>) -> Result<()> {
    let timestamp = if cfg.no_timestamp { None } else { timestamp };
    let output = OutputArgs {
        format: cfg.format.unwrap_or(OutputFormat::Csv),
        out: cfg.out.clone(),
    };
    let source = |mode: TargetMode| -> Result<Schedule> {
        let s = obtain_schedule(cfg.schedule_file.as_deref(), cfg.build.as_ref(), cache_dir)?;
        if s.mode != mode {
            eprintln!(
                "note: schedule mode {} for a {} run",
                s.mode.label(),
                mode.label()
            );
        }
        Ok(s)
    };
    match cfg.command.as_str() {
        "verify" => cmd_verify(
            source(TargetMode::ConjChi)?,
            cfg.range,
            cfg.stride,
            cfg.include_pre_epoch,
            cfg.exclude_boundaries,
            &output,
            timestamp,
        ),
        "liouville" => cmd_liouville(
            source(TargetMode::NegChi)?,
            cfg.range,
            cfg.stride,
            cfg.h_max.unwrap_or(300),
            &output,
            timestamp,
        ),
        "lemma" => {
            let l = cfg.lemma.context("lemma run needs a lemma section")?;
            cmd_lemma(l.t1, l.t2, l.m, l.n_max, 5, 11, &output, timestamp)
        }
        "build-schedule" => {
            let s = obtain_schedule(cfg.schedule_file.as_deref(), cfg.build.as_ref(), cache_dir)?;
            for c in schedule::validate(&s) {
                eprintln!(
                    "[{}] {} - {}",
                    if c.pass { "pass" } else { "FAIL" },
                    c.name,
                    c.details
                );
            }
            write_output(output.out.as_deref(), &(s.to_json()? + "\n"))
        }
        "locate" => cmd_locate(
            &source(TargetMode::ConjChi)?,
            cfg.n.context("locate needs n")?,
        ),
        "member" => cmd_member(
            source(TargetMode::ConjChi)?,
            cfg.n.context("member needs n")?,
        ),
        other => bail!("unknown command in config: {other:?}"),
    }
}
