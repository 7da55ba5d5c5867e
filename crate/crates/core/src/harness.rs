//! Experiment sweeps, CSV persistence, config ingestion, and the CLI.
//!
//! Presets pin the reference geometry: S and D 1000 m apart at 1.8 GHz,
//! the monitor on the same line, half-wavelength ULAs, reference SNR
//! gamma0 = 10 dB where stated. Axis semantics per preset:
//!   fig3: monitor position d_SE (3000 m -> 100 m, 200 log-spaced
//!         points); rows record the channel power ratio alpha in dB.
//!   fig4: relay power ratio P_E/P_S in dB (-15..10, 0.1 dB steps).
//!   fig5/fig6: reference SNR gamma0 in dB (0..20) with the relay
//!         budget fixed at P_E |h_SD|^2 / sigma^2 = 10 dB.
//!   fig7: equal antenna counts M = N = 2..10 at d_SE = 2800 m.

use crate::baselines::{jamming_rate, passive_rate};
use crate::channel::{free_space_gain, project, synthesize, ChannelError, Scenario};
use crate::oracle;
use crate::solver::{solve, SpoofMode, SpoofSolution};
use clap::error::ErrorKind as ClapErrorKind;
use clap::{Parser, Subcommand};
use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

pub const REFERENCE_D_SD_M: f64 = 1000.0;
pub const REFERENCE_FREQ_HZ: f64 = 1.8e9;

/// Sentinel written to the `rho_star` column for infeasible points.
pub const INFEASIBLE_RHO_SENTINEL: f64 = -0.1;

#[derive(Debug)]
pub enum HarnessError {
    Config(String),
    Channel(ChannelError),
    Io(io::Error),
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(why) => write!(f, "config error: {why}"),
            Self::Channel(e) => write!(f, "channel error: {e}"),
            Self::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl From<ChannelError> for HarnessError {
    fn from(e: ChannelError) -> Self {
        Self::Channel(e)
    }
}

impl From<io::Error> for HarnessError {
    fn from(e: io::Error) -> Self {
        Self::Io(e)
    }
}

// ───────────────────────── sweep specification ─────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig3Alpha,
    Fig4Pe,
    Fig5Ps,
    Fig6PsFar,
    Fig7Antennas,
    Custom,
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Fig3Alpha => "fig3",
            Self::Fig4Pe => "fig4",
            Self::Fig5Ps => "fig5",
            Self::Fig6PsFar => "fig6",
            Self::Fig7Antennas => "fig7",
            Self::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// A parameter sweep: which scalar to vary, the values to visit, and
/// the base scenario every point starts from.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub preset: Preset,
    /// One of `d_se_m`, `pe_over_ps_db`, `gamma0_db`, `n_bar`.
    pub axis: String,
    pub values: Vec<f64>,
    pub base: Scenario,
    pub seed: u64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.values.is_empty() {
            return Err(HarnessError::Config("sweep needs at least one axis value".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(HarnessError::Config("axis values must be finite".into()));
        }
        let increasing = self.values.windows(2).all(|w| w[1] > w[0]);
        let decreasing = self.values.windows(2).all(|w| w[1] < w[0]);
        if self.values.len() > 1 && !increasing && !decreasing {
            return Err(HarnessError::Config("axis values must be strictly monotone".into()));
        }
        Ok(())
    }
}

/// Reference-SNR helper: the source transmit SNR that produces
/// `gamma0_db` at D across the fixed 1000 m suspicious link.
pub fn p_s_for_gamma0_db(gamma0_db: f64) -> f64 {
    let a2 = free_space_gain(REFERENCE_D_SD_M, REFERENCE_FREQ_HZ)
        .expect("reference geometry is valid")
        .powi(2);
    10f64.powf(gamma0_db / 10.0) / a2
}

fn reference_scenario(d_se_m: f64, m: usize, n: usize, p_s: f64, p_e: f64) -> Scenario {
    Scenario {
        d_sd_m: REFERENCE_D_SD_M,
        d_se_m,
        frequency_hz: REFERENCE_FREQ_HZ,
        m_rx: m,
        n_tx: n,
        p_s_over_sigma2: p_s,
        p_e_over_sigma2: p_e,
        gamma_gap: 1.0,
    }
}

fn log_spaced(from: f64, to: f64, n: usize) -> Vec<f64> {
    let (lf, lt) = (from.ln(), to.ln());
    (0..n)
        .map(|k| (lf + (lt - lf) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

fn lin_spaced(from: f64, to: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| from + (to - from) * k as f64 / (n - 1) as f64)
        .collect()
}

/// Monitor walks from 3000 m to 100 m: alpha rises from about -10 dB
/// to 20 dB. gamma0 = 10 dB, P_E = P_S, M = 1, N = 2.
pub fn fig3_alpha() -> SweepSpec {
    let p_s = p_s_for_gamma0_db(10.0);
    SweepSpec {
        preset: Preset::Fig3Alpha,
        axis: "d_se_m".into(),
        values: log_spaced(3000.0, 100.0, 200),
        base: reference_scenario(3000.0, 1, 2, p_s, p_s),
        seed: 0,
    }
}

/// Relay power budget sweep at fixed gamma0 = 10 dB.
pub fn fig4_pe(d_se_m: f64) -> SweepSpec {
    let p_s = p_s_for_gamma0_db(10.0);
    SweepSpec {
        preset: Preset::Fig4Pe,
        axis: "pe_over_ps_db".into(),
        values: lin_spaced(-15.0, 10.0, 251),
        base: reference_scenario(d_se_m, 1, 2, p_s, p_s),
        seed: 0,
    }
}

fn ps_sweep(preset: Preset, d_se_m: f64) -> SweepSpec {
    let p_s = p_s_for_gamma0_db(10.0);
    let p_e = p_s_for_gamma0_db(10.0); // P_E |h_SD|^2 / sigma^2 = 10 dB
    SweepSpec {
        preset,
        axis: "gamma0_db".into(),
        values: lin_spaced(0.0, 20.0, 81),
        base: reference_scenario(d_se_m, 1, 2, p_s, p_e),
        seed: 0,
    }
}

/// Source power sweep with the monitor close to the source (400 m).
pub fn fig5_ps() -> SweepSpec {
    ps_sweep(Preset::Fig5Ps, 400.0)
}

/// Source power sweep with the monitor far beyond D (2800 m).
pub fn fig6_ps_far() -> SweepSpec {
    ps_sweep(Preset::Fig6PsFar, 2800.0)
}

/// Equal antenna counts M = N = 2..10 at d_SE = 2800 m, gamma0 = 10 dB,
/// P_E = P_S.
pub fn fig7_antennas() -> SweepSpec {
    let p_s = p_s_for_gamma0_db(10.0);
    SweepSpec {
        preset: Preset::Fig7Antennas,
        axis: "n_bar".into(),
        values: (2..=10).map(|n| n as f64).collect(),
        base: reference_scenario(2800.0, 2, 2, p_s, p_s),
        seed: 0,
    }
}

// ───────────────────────── sweep execution ─────────────────────────

/// One sweep point. `jam_power_used` is the jamming baseline's spent
/// power; the spoofing columns come from the solver output, with
/// `rho_star` set to the -0.1 sentinel when the point is infeasible.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub rate_spoof: f64,
    pub rate_passive: f64,
    pub rate_jamming: f64,
    pub mode: SpoofMode,
    pub rho_star: f64,
    pub gamma_d: f64,
    pub gamma_e: f64,
    pub jam_power_used: f64,
}

pub const CSV_HEADER: &str =
    "axis_value,rate_spoof,rate_passive,rate_jamming,mode,rho_star,gamma_d,gamma_e,jam_power_used";

fn apply_axis(base: &Scenario, axis: &str, value: f64) -> Result<Scenario, HarnessError> {
    let mut sc = base.clone();
    match axis {
        "d_se_m" => sc.d_se_m = value,
        "pe_over_ps_db" => sc.p_e_over_sigma2 = sc.p_s_over_sigma2 * 10f64.powf(value / 10.0),
        "gamma0_db" => sc.p_s_over_sigma2 = p_s_for_gamma0_db(value),
        "n_bar" => {
            let n = value as usize;
            if n < 1 || (value - n as f64).abs() > 1e-9 {
                return Err(HarnessError::Config(format!("n_bar must be a positive integer, got {value}")));
            }
            sc.m_rx = n;
            sc.n_tx = n;
        }
        other => return Err(HarnessError::Config(format!("unknown sweep axis `{other}`"))),
    }
    Ok(sc)
}

/// Runs the sweep: synthesize, project, solve, and benchmark each
/// point. Per-point infeasibility is recorded in the row; only a
/// malformed spec aborts the sweep.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, HarnessError> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.values.len());
    for &value in &spec.values {
        let sc = apply_axis(&spec.base, &spec.axis, value)?;
        sc.validate().map_err(HarnessError::Channel)?;
        let cs = synthesize(&sc, spec.seed)?;
        let alpha = cs.h_se.norm_sq() / cs.h_sd.norm_sqr();
        let axis_value = match spec.preset {
            Preset::Fig3Alpha => 10.0 * alpha.log10(),
            _ => value,
        };
        let passive = passive_rate(&cs);
        let row = match project(&cs) {
            Ok(pc) => {
                let jamming = jamming_rate(&cs, &pc);
                let sol = solve(&cs, &pc).expect("projection guarantees r0 >= 1");
                let infeasible = sol.mode == SpoofMode::Infeasible;
                SweepRow {
                    axis_value,
                    rate_spoof: sol.rate_bps_hz,
                    rate_passive: passive.rate_bps_hz,
                    rate_jamming: jamming.rate_bps_hz,
                    mode: sol.mode,
                    rho_star: if infeasible {
                        INFEASIBLE_RHO_SENTINEL
                    } else {
                        sol.rho_star.ratios()[0]
                    },
                    gamma_d: sol.gamma_d,
                    gamma_e: sol.gamma_e,
                    jam_power_used: jamming.jam_power_used,
                }
            }
            // trivial null space: the only legal precoder is zero, so
            // every scheme degenerates to passive listening
            Err(ChannelError::ZfInfeasible) => {
                let g = cs.p_s * cs.h_sd.norm_sqr();
                let x = cs.p_s * cs.h_se.norm_sq();
                let decodable = x >= g;
                SweepRow {
                    axis_value,
                    rate_spoof: passive.rate_bps_hz,
                    rate_passive: passive.rate_bps_hz,
                    rate_jamming: passive.rate_bps_hz,
                    mode: if decodable { SpoofMode::JammingOnly } else { SpoofMode::Infeasible },
                    rho_star: if decodable { 0.0 } else { INFEASIBLE_RHO_SENTINEL },
                    gamma_d: if decodable { g } else { 0.0 },
                    gamma_e: x,
                    jam_power_used: 0.0,
                }
            }
            Err(e) => return Err(e.into()),
        };
        rows.push(row);
    }
    Ok(rows)
}

// ───────────────────────── CSV persistence ─────────────────────────

/// 17 significant digits: enough for every f64 to round-trip bit-exactly.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn emit_csv(rows: &[SweepRow], out: &mut impl Write) -> io::Result<()> {
    out.write_all(CSV_HEADER.as_bytes())?;
    out.write_all(b"\n")?;
    for r in rows {
        let line = format!(
            "{},{},{},{},{},{},{},{},{}\n",
            fmt_f64(r.axis_value),
            fmt_f64(r.rate_spoof),
            fmt_f64(r.rate_passive),
            fmt_f64(r.rate_jamming),
            r.mode,
            fmt_f64(r.rho_star),
            fmt_f64(r.gamma_d),
            fmt_f64(r.gamma_e),
            fmt_f64(r.jam_power_used),
        );
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn emit_csv_path(rows: &[SweepRow], path: &Path) -> io::Result<()> {
    let mut buf = Vec::new();
    emit_csv(rows, &mut buf)?;
    fs::write(path, buf)
}

fn mode_from_str(s: &str) -> Option<SpoofMode> {
    match s {
        "constructive_relay" => Some(SpoofMode::ConstructiveRelay),
        "jamming_only" => Some(SpoofMode::JammingOnly),
        "jamming_plus_destructive" => Some(SpoofMode::JammingPlusDestructive),
        "infeasible" => Some(SpoofMode::Infeasible),
        _ => None,
    }
}

/// Parses a CSV produced by [`emit_csv`]; the round trip is bit-exact.
pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>, HarnessError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        _ => return Err(HarnessError::Config("missing or wrong CSV header".into())),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 9 {
            return Err(HarnessError::Config(format!("row {i}: expected 9 columns")));
        }
        let f = |s: &str| -> Result<f64, HarnessError> {
            s.parse::<f64>().map_err(|e| HarnessError::Config(format!("row {i}: {e}")))
        };
        rows.push(SweepRow {
            axis_value: f(parts[0])?,
            rate_spoof: f(parts[1])?,
            rate_passive: f(parts[2])?,
            rate_jamming: f(parts[3])?,
            mode: mode_from_str(parts[4])
                .ok_or_else(|| HarnessError::Config(format!("row {i}: bad mode `{}`", parts[4])))?,
            rho_star: f(parts[5])?,
            gamma_d: f(parts[6])?,
            gamma_e: f(parts[7])?,
            jam_power_used: f(parts[8])?,
        });
    }
    Ok(rows)
}

// ───────────────────────── config ingestion ─────────────────────────

/// Parses the key-value scenario config. Keys: d_sd_m, d_se_m, freq_hz,
/// m_rx, n_tx, ps_db, pe_db, gamma_gap_db (optional, default 0), seed
/// (optional, default 0). Lines are `key = value`; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<(Scenario, u64), HarnessError> {
    let mut d_sd_m = None;
    let mut d_se_m = None;
    let mut freq_hz = None;
    let mut m_rx = None;
    let mut n_tx = None;
    let mut ps_db = None;
    let mut pe_db = None;
    let mut gamma_gap_db = 0.0;
    let mut seed = 0u64;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| HarnessError::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim();
        let value = value.trim();
        let parse_f = || -> Result<f64, HarnessError> {
            value
                .parse::<f64>()
                .map_err(|e| HarnessError::Config(format!("line {}: {e}", lineno + 1)))
        };
        match key {
            "d_sd_m" => d_sd_m = Some(parse_f()?),
            "d_se_m" => d_se_m = Some(parse_f()?),
            "freq_hz" => freq_hz = Some(parse_f()?),
            "m_rx" => {
                m_rx = Some(value.parse::<usize>().map_err(|e| {
                    HarnessError::Config(format!("line {}: {e}", lineno + 1))
                })?)
            }
            "n_tx" => {
                n_tx = Some(value.parse::<usize>().map_err(|e| {
                    HarnessError::Config(format!("line {}: {e}", lineno + 1))
                })?)
            }
            "ps_db" => ps_db = Some(parse_f()?),
            "pe_db" => pe_db = Some(parse_f()?),
            "gamma_gap_db" => gamma_gap_db = parse_f()?,
            "seed" => {
                seed = value.parse::<u64>().map_err(|e| {
                    HarnessError::Config(format!("line {}: {e}", lineno + 1))
                })?
            }
            other => {
                return Err(HarnessError::Config(format!("line {}: unknown key `{other}`", lineno + 1)))
            }
        }
    }

    let miss = |name: &str| HarnessError::Config(format!("missing key `{name}`"));
    let sc = Scenario {
        d_sd_m: d_sd_m.ok_or_else(|| miss("d_sd_m"))?,
        d_se_m: d_se_m.ok_or_else(|| miss("d_se_m"))?,
        frequency_hz: freq_hz.ok_or_else(|| miss("freq_hz"))?,
        m_rx: m_rx.ok_or_else(|| miss("m_rx"))?,
        n_tx: n_tx.ok_or_else(|| miss("n_tx"))?,
        p_s_over_sigma2: 10f64.powf(ps_db.ok_or_else(|| miss("ps_db"))? / 10.0),
        p_e_over_sigma2: 10f64.powf(pe_db.ok_or_else(|| miss("pe_db"))? / 10.0),
        gamma_gap: 10f64.powf(gamma_gap_db / 10.0),
    };
    sc.validate()
        .map_err(|e| HarnessError::Config(format!("{e}")))?;
    Ok((sc, seed))
}

// ───────────────────────── JSON rendering ─────────────────────────

fn json_f64(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v)
        .map(serde_json::Value::Number)
        .unwrap_or(serde_json::Value::Null)
}

pub fn solution_json(sol: &SpoofSolution) -> serde_json::Value {
    let mat = |m: &crate::numerics::CMat| -> serde_json::Value {
        let rows: Vec<serde_json::Value> = (0..m.rows())
            .map(|i| {
                (0..m.cols())
                    .map(|j| {
                        let z = m.get(i, j);
                        serde_json::json!([z.re, z.im])
                    })
                    .collect::<Vec<_>>()
                    .into()
            })
            .collect();
        rows.into()
    };
    serde_json::json!({
        "mode": sol.mode.to_string(),
        "rho_star": sol.rho_star.ratios(),
        "gamma_d": json_f64(sol.gamma_d),
        "gamma_e": json_f64(sol.gamma_e),
        "rate_bps_hz": json_f64(sol.rate_bps_hz),
        "jam_gain": json_f64(sol.jam_gain),
        "w_star": mat(&sol.w_star),
        "w_hat_star": mat(&sol.w_hat_star),
        "breakpoints": {
            "rho1": json_f64(sol.breakpoints.rho1),
            "rho2": json_f64(sol.breakpoints.rho2),
            "rho3": json_f64(sol.breakpoints.rho3),
            "c2": json_f64(sol.breakpoints.c2),
            "alpha": json_f64(sol.breakpoints.alpha),
            "mu_star": json_f64(sol.breakpoints.mu_star),
        },
    })
}

fn row_json(r: &SweepRow) -> serde_json::Value {
    serde_json::json!({
        "axis_value": json_f64(r.axis_value),
        "rate_spoof": json_f64(r.rate_spoof),
        "rate_passive": json_f64(r.rate_passive),
        "rate_jamming": json_f64(r.rate_jamming),
        "mode": r.mode.to_string(),
        "rho_star": json_f64(r.rho_star),
        "gamma_d": json_f64(r.gamma_d),
        "gamma_e": json_f64(r.gamma_e),
        "jam_power_used": json_f64(r.jam_power_used),
    })
}

// ───────────────────────── CLI ─────────────────────────

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_VERIFY_FAILED: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "spoofrelay",
    about = "Spoofing-relay eavesdropping-rate optimizer and experiment harness",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one scenario from a config file and print the solution.
    Solve {
        config: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Print the passive and jamming-only benchmark rates for a scenario.
    Baselines {
        config: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run a preset or custom sweep and write the rows as CSV.
    Sweep {
        /// One of fig3, fig4, fig5, fig6, fig7, custom.
        preset: String,
        /// Base scenario config (required for `custom`).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Sweep axis for `custom`: d_se_m | pe_over_ps_db | gamma0_db | n_bar.
        #[arg(long)]
        axis: Option<String>,
        /// Comma-separated axis values for `custom` (negative values allowed).
        #[arg(long, allow_hyphen_values = true)]
        points: Option<String>,
        /// Monitor distance override for fig4 (default 400 m).
        #[arg(long)]
        d_se_m: Option<f64>,
        /// Channel synthesis seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Emit JSON rows instead of CSV.
        #[arg(long)]
        json: bool,
    },
    /// Run the brute-force oracle suite against the closed forms.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// 1-D oracle grid size (the 2-D grid uses grid/10 per axis).
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
        #[arg(long, default_value_t = 200)]
        instances: usize,
    },
}

fn load_config(path: &Path) -> Result<(Scenario, u64), HarnessError> {
    let text = fs::read_to_string(path)
        .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

fn print_solution_text(sol: &SpoofSolution) {
    println!("mode          = {}", sol.mode);
    println!("rho_star      = {:?}", sol.rho_star.ratios());
    println!("gamma_d       = {:.12e}", sol.gamma_d);
    println!("gamma_e       = {:.12e}", sol.gamma_e);
    println!("rate_bps_hz   = {:.12}", sol.rate_bps_hz);
    println!("jam_gain      = {:.12e}", sol.jam_gain);
    let bp = &sol.breakpoints;
    println!(
        "breakpoints   = rho1 {:.6} rho2 {:.6} rho3 {:.6} c2 {:.6e} alpha {:.6} mu {:.6e}",
        bp.rho1, bp.rho2, bp.rho3, bp.c2, bp.alpha, bp.mu_star
    );
}

fn run_solve(config: &Path, json: bool) -> i32 {
    let (sc, seed) = match load_config(config) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
    };
    let cs = match synthesize(&sc, seed) {
        Ok(cs) => cs,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
    };
    let sol = match project(&cs) {
        Ok(pc) => solve(&cs, &pc).expect("projection guarantees r0 >= 1"),
        Err(ChannelError::ZfInfeasible) => {
            eprintln!("zero-forcing infeasible: the loop channel fills the transmit space");
            return EXIT_INFEASIBLE;
        }
        Err(e) => {
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&solution_json(&sol)).expect("valid json"));
    } else {
        print_solution_text(&sol);
    }
    if sol.mode == SpoofMode::Infeasible {
        EXIT_INFEASIBLE
    } else {
        EXIT_OK
    }
}

fn run_baselines(config: &Path, json: bool) -> i32 {
    let (sc, seed) = match load_config(config) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
    };
    let cs = match synthesize(&sc, seed) {
        Ok(cs) => cs,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
    };
    let passive = passive_rate(&cs);
    let jamming = match project(&cs) {
        Ok(pc) => jamming_rate(&cs, &pc),
        // no transmit null space: jamming degenerates to listening
        Err(_) => crate::baselines::BaselineResult {
            scheme: crate::baselines::Scheme::JammingOnly,
            rate_bps_hz: passive.rate_bps_hz,
            jam_power_used: 0.0,
        },
    };
    if json {
        let v = serde_json::json!({
            "passive": { "rate_bps_hz": json_f64(passive.rate_bps_hz) },
            "jamming_only": {
                "rate_bps_hz": json_f64(jamming.rate_bps_hz),
                "jam_power_used": json_f64(jamming.jam_power_used),
            },
        });
        println!("{}", serde_json::to_string_pretty(&v).expect("valid json"));
    } else {
        println!("passive       rate = {:.12} bps/Hz", passive.rate_bps_hz);
        println!(
            "jamming_only  rate = {:.12} bps/Hz (power {:.6e})",
            jamming.rate_bps_hz, jamming.jam_power_used
        );
    }
    EXIT_OK
}

#[allow(clippy::too_many_arguments)]
fn run_sweep_cmd(
    preset: &str,
    config: Option<&Path>,
    axis: Option<&str>,
    points: Option<&str>,
    d_se_m: Option<f64>,
    seed: u64,
    out: Option<&Path>,
    json: bool,
) -> i32 {
    let spec = match preset {
        "fig3" => Ok(fig3_alpha()),
        "fig4" => Ok(fig4_pe(d_se_m.unwrap_or(400.0))),
        "fig5" => Ok(fig5_ps()),
        "fig6" => Ok(fig6_ps_far()),
        "fig7" => Ok(fig7_antennas()),
        "custom" => {
            let missing = |what: &str| {
                HarnessError::Config(format!("custom sweep requires --{what}"))
            };
            (|| {
                let config = config.ok_or_else(|| missing("config"))?;
                let axis = axis.ok_or_else(|| missing("axis"))?.to_string();
                let points = points.ok_or_else(|| missing("points"))?;
                let values: Result<Vec<f64>, _> =
                    points.split(',').map(|p| p.trim().parse::<f64>()).collect();
                let values = values
                    .map_err(|e| HarnessError::Config(format!("bad --points: {e}")))?;
                let (base, cfg_seed) = load_config(config)?;
                Ok(SweepSpec {
                    preset: Preset::Custom,
                    axis,
                    values,
                    base,
                    seed: if seed != 0 { seed } else { cfg_seed },
                })
            })()
        }
        other => Err(HarnessError::Config(format!("unknown preset `{other}`"))),
    };
    let mut spec = match spec {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
    };
    if preset != "custom" {
        spec.seed = seed;
    }
    let rows = match run_sweep(&spec) {
        Ok(rows) => rows,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
    };
    let payload: Vec<u8> = if json {
        let arr: Vec<serde_json::Value> = rows.iter().map(row_json).collect();
        let mut s = serde_json::to_string_pretty(&serde_json::Value::Array(arr))
            .expect("valid json");
        s.push('\n');
        s.into_bytes()
    } else {
        let mut buf = Vec::new();
        emit_csv(&rows, &mut buf).expect("writing to memory cannot fail");
        buf
    };
    match out {
        Some(path) => {
            if let Err(e) = fs::write(path, payload) {
                eprintln!("cannot write {}: {e}", path.display());
                return EXIT_CONFIG;
            }
        }
        None => {
            io::stdout().write_all(&payload).expect("stdout");
        }
    }
    EXIT_OK
}

fn run_verify(seed: u64, grid: usize, instances: usize) -> i32 {
    let report = oracle::verify(seed, grid, instances);
    println!("{report}");
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    }
}

/// Command-line entry point; returns the process exit code. The first
/// argument is the program name, as in `std::env::args()`.
pub fn cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_CONFIG,
            };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Solve { config, json } => run_solve(&config, json),
        Command::Baselines { config, json } => run_baselines(&config, json),
        Command::Sweep { preset, config, axis, points, d_se_m, seed, out, json } => run_sweep_cmd(
            &preset,
            config.as_deref(),
            axis.as_deref(),
            points.as_deref(),
            d_se_m,
            seed,
            out.as_deref(),
            json,
        ),
        Command::Verify { seed, grid, instances } => run_verify(seed, grid, instances),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_only_for_empty_rows() {
        let mut buf = Vec::new();
        emit_csv(&[], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn csv_one_row_is_two_lines() {
        let row = SweepRow {
            axis_value: 1.5,
            rate_spoof: 2.0,
            rate_passive: 0.5,
            rate_jamming: 0.75,
            mode: SpoofMode::ConstructiveRelay,
            rho_star: 0.42,
            gamma_d: 36.25,
            gamma_e: 36.25,
            jam_power_used: 0.0,
        };
        let mut buf = Vec::new();
        emit_csv(&[row], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.ends_with('\n'));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let spec = fig4_pe(400.0);
        let short = SweepSpec { values: spec.values[..8].to_vec(), ..spec };
        let rows = run_sweep(&short).unwrap();
        let mut buf = Vec::new();
        emit_csv(&rows, &mut buf).unwrap();
        let parsed = parse_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(rows.len(), parsed.len());
        for (a, b) in rows.iter().zip(parsed.iter()) {
            assert_eq!(a.axis_value.to_bits(), b.axis_value.to_bits());
            assert_eq!(a.rate_spoof.to_bits(), b.rate_spoof.to_bits());
            assert_eq!(a.rate_passive.to_bits(), b.rate_passive.to_bits());
            assert_eq!(a.rate_jamming.to_bits(), b.rate_jamming.to_bits());
            assert_eq!(a.mode, b.mode);
            assert_eq!(a.rho_star.to_bits(), b.rho_star.to_bits());
            assert_eq!(a.gamma_d.to_bits(), b.gamma_d.to_bits());
            assert_eq!(a.gamma_e.to_bits(), b.gamma_e.to_bits());
            assert_eq!(a.jam_power_used.to_bits(), b.jam_power_used.to_bits());
        }
    }

    #[test]
    fn sweep_output_is_reproducible() {
        let spec = SweepSpec { values: fig3_alpha().values[..12].to_vec(), ..fig3_alpha() };
        let a = run_sweep(&spec).unwrap();
        let b = run_sweep(&spec).unwrap();
        let mut ba = Vec::new();
        let mut bb = Vec::new();
        emit_csv(&a, &mut ba).unwrap();
        emit_csv(&b, &mut bb).unwrap();
        assert_eq!(ba, bb);
    }

    #[test]
    fn config_parses_and_converts_db() {
        let text = "\
# reference scenario
d_sd_m = 1000
d_se_m = 400
freq_hz = 1.8e9
m_rx = 1
n_tx = 2
ps_db = 107.55
pe_db = 117.55
gamma_gap_db = 0
seed = 5
";
        let (sc, seed) = parse_config(text).unwrap();
        assert_eq!(seed, 5);
        assert_eq!(sc.m_rx, 1);
        assert!((sc.p_s_over_sigma2 - 10f64.powf(10.755)).abs() <= 1e-3 * sc.p_s_over_sigma2);
        assert_eq!(sc.gamma_gap, 1.0);
    }

    #[test]
    fn config_rejects_unknown_and_missing_keys() {
        assert!(matches!(
            parse_config("bogus = 1"),
            Err(HarnessError::Config(_))
        ));
        assert!(matches!(parse_config("d_sd_m = 1000"), Err(HarnessError::Config(_))));
    }

    #[test]
    fn fig3_axis_is_monotone_alpha() {
        let spec = fig3_alpha();
        assert_eq!(spec.values.len(), 200);
        let short = SweepSpec { values: spec.values[..20].to_vec(), ..spec };
        let rows = run_sweep(&short).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].axis_value > w[0].axis_value, "alpha column must increase");
        }
    }

    #[test]
    fn single_transmit_antenna_degenerates_to_passive_rows() {
        // N = 1 leaves no null space for the rank-one loop channel
        let p_s = p_s_for_gamma0_db(10.0);
        let spec = SweepSpec {
            preset: Preset::Custom,
            axis: "d_se_m".into(),
            values: vec![400.0, 2800.0],
            base: reference_scenario(400.0, 1, 1, p_s, p_s),
            seed: 0,
        };
        let rows = run_sweep(&spec).unwrap();
        let near = &rows[0];
        assert_eq!(near.mode, SpoofMode::JammingOnly);
        assert_eq!(near.rho_star, 0.0);
        assert!((near.rate_spoof - 11.0_f64.log2()).abs() <= 1e-9);
        assert_eq!(near.rate_spoof, near.rate_passive);
        assert_eq!(near.rate_spoof, near.rate_jamming);
        let far = &rows[1];
        assert_eq!(far.mode, SpoofMode::Infeasible);
        assert_eq!(far.rho_star, INFEASIBLE_RHO_SENTINEL);
        assert_eq!(far.rate_spoof, 0.0);
    }

    #[test]
    fn sweep_rejects_non_monotone_values() {
        let mut spec = fig4_pe(400.0);
        spec.values = vec![0.0, 1.0, 0.5];
        assert!(run_sweep(&spec).is_err());
    }

    #[test]
    fn fig6_spoofing_dies_off_beyond_a_source_power_threshold() {
        let rows = run_sweep(&fig6_ps_far()).unwrap();
        // the far monitor never decodes with the benchmarks
        for row in &rows {
            assert_eq!(row.rate_passive, 0.0);
            assert_eq!(row.rate_jamming, 0.0);
        }
        assert!(rows[0].rate_spoof > 0.0, "spoofing must work at low source power");
        let die_off = rows.iter().position(|r| r.rate_spoof == 0.0);
        if let Some(k) = die_off {
            for row in &rows[k..] {
                assert_eq!(row.rate_spoof, 0.0, "no recovery past the threshold");
                assert_eq!(row.rho_star, INFEASIBLE_RHO_SENTINEL);
            }
        }
    }

    #[test]
    fn fig5_all_schemes_grow_and_spoofing_leads() {
        let rows = run_sweep(&fig5_ps()).unwrap();
        for (k, row) in rows.iter().enumerate() {
            assert!(row.rate_spoof > row.rate_passive.max(row.rate_jamming));
            if k > 0 {
                assert!(row.rate_spoof > rows[k - 1].rate_spoof);
                assert!(row.rate_passive > rows[k - 1].rate_passive);
            }
        }
    }

    #[test]
    fn sweep_dominance_holds_rowwise() {
        let spec = SweepSpec { values: fig3_alpha().values[..40].to_vec(), ..fig3_alpha() };
        for row in run_sweep(&spec).unwrap() {
            let bench = row.rate_passive.max(row.rate_jamming);
            assert!(row.rate_spoof >= bench - 1e-9, "axis {}", row.axis_value);
        }
    }
}
