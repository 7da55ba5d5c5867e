//! Problem-instance synthesis from physical scenarios and the
//! zero-forcing null-space reduction.
//!
//! Geometry: source S and destination D sit on a line `d_sd_m` apart;
//! the monitor E sits on the same line at `d_se_m` from S (possibly
//! beyond D). All links are line-of-sight with free-space amplitude
//! gain `lambda / (4 pi d)` and propagation phase `exp(-j 2 pi d / lambda)`.
//! E carries half-wavelength uniform linear arrays. Every reported
//! quantity depends only on channel norms and the phase of the direct
//! link, so the array orientation defaults below are a documented
//! convention, not a derived fact.

use crate::numerics::{null_space_basis, CMat, CVec};
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelError {
    InvalidScenario(String),
    /// `d <= 0` passed to the path-loss model.
    NonPositiveDistance(f64),
    /// The loop channel has a trivial null space (`r0 == 0`), so no
    /// transmit precoder can satisfy the self-interference constraint.
    ZfInfeasible,
    DimensionMismatch { expected: (usize, usize), got: (usize, usize) },
}

impl fmt::Display for ChannelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidScenario(why) => write!(f, "invalid scenario: {why}"),
            Self::NonPositiveDistance(d) => write!(f, "distance must be positive, got {d}"),
            Self::ZfInfeasible => write!(f, "zero-forcing infeasible: loop channel has full column rank"),
            Self::DimensionMismatch { expected, got } => {
                write!(f, "expected {}x{} matrix, got {}x{}", expected.0, expected.1, got.0, got.1)
            }
        }
    }
}

impl std::error::Error for ChannelError {}

/// Physical geometry and radio parameters from which a [`ChannelSet`]
/// is synthesized. Powers are linear SNRs already normalized by the
/// receiver noise power.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub d_sd_m: f64,
    pub d_se_m: f64,
    pub frequency_hz: f64,
    /// Receive antennas at the monitor.
    pub m_rx: usize,
    /// Transmit antennas at the monitor.
    pub n_tx: usize,
    /// Linear transmit SNR of the source, P_S / sigma^2.
    pub p_s_over_sigma2: f64,
    /// Linear power budget of the monitor, P_E / sigma^2.
    pub p_e_over_sigma2: f64,
    /// Linear modulation gap Gamma >= 1; 1 means Shannon-capacity rates.
    pub gamma_gap: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ChannelError> {
        let err = |why: &str| Err(ChannelError::InvalidScenario(why.to_string()));
        let bad = |v: f64| !v.is_finite();
        if bad(self.d_sd_m) || self.d_sd_m <= 0.0 {
            return err("d_sd_m must be > 0");
        }
        if bad(self.d_se_m) || self.d_se_m <= 0.0 {
            return err("d_se_m must be > 0");
        }
        if self.d_se_m == self.d_sd_m {
            return err("d_se_m == d_sd_m puts the monitor on top of the destination");
        }
        if bad(self.frequency_hz) || self.frequency_hz <= 0.0 {
            return err("freq_hz must be > 0");
        }
        if self.m_rx < 1 {
            return err("m_rx must be >= 1");
        }
        if self.n_tx < 1 {
            return err("n_tx must be >= 1");
        }
        if bad(self.p_s_over_sigma2) || self.p_s_over_sigma2 <= 0.0 {
            return err("source transmit SNR must be > 0");
        }
        if bad(self.p_e_over_sigma2) || self.p_e_over_sigma2 < 0.0 {
            return err("monitor power budget must be >= 0");
        }
        if bad(self.gamma_gap) || self.gamma_gap < 1.0 {
            return err("gamma_gap must be >= 1");
        }
        Ok(())
    }

    pub fn d_ed_m(&self) -> f64 {
        (self.d_sd_m - self.d_se_m).abs()
    }

    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT_M_S / self.frequency_hz
    }
}

/// Array-orientation convention for the monitor. Angles are steering
/// angles measured from broadside. Defaults: both arrays broadside to
/// the S-D line (links to S and D steer at 0), while the transmit-to-
/// receive loop path runs endfire, which keeps the projected relay
/// channel close to full strength for every array size.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    pub rx_steer_rad: f64,
    pub tx_steer_rad: f64,
    pub loop_rx_rad: f64,
    pub loop_tx_rad: f64,
    pub loop_sep_m: f64,
}

impl Default for ArrayGeometry {
    fn default() -> Self {
        Self {
            rx_steer_rad: 0.0,
            tx_steer_rad: 0.0,
            loop_rx_rad: FRAC_PI_2,
            loop_tx_rad: FRAC_PI_2,
            loop_sep_m: 0.5,
        }
    }
}

/// The four channel objects plus normalized powers: a complete problem
/// instance. All magnitudes are linear amplitude gains.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// Direct suspicious link S -> D.
    pub h_sd: Complex64,
    /// Eavesdropping link S -> E (length M).
    pub h_se: CVec,
    /// Relay link E -> D (length N; the MISO channel is its Hermitian).
    pub h_ed: CVec,
    /// Loop channel from E's transmitter into its own receiver (M x N).
    pub h_ee: CMat,
    /// Linear source transmit SNR.
    pub p_s: f64,
    /// Linear monitor power budget.
    pub p_e: f64,
    /// Linear modulation gap applied as an SNR divisor at rate time.
    pub gamma_gap: f64,
}

impl ChannelSet {
    pub fn m_rx(&self) -> usize {
        self.h_se.len()
    }

    pub fn n_tx(&self) -> usize {
        self.h_ed.len()
    }
}

/// Null-space basis of the loop channel and the relay channel projected
/// onto it; the precoder search space after the ZF reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedChannels {
    /// N x r0 orthonormal basis of the null space of `h_ee`.
    pub v0: CMat,
    /// Projected relay channel, `v0^H h_ed` (length r0).
    pub h_ed_hat: CVec,
    pub r0: usize,
}

/// Half-wavelength ULA steering vector: entries `exp(j pi k sin(angle))`.
pub fn ula_steering(angle_rad: f64, n: usize) -> CVec {
    assert!(n >= 1, "steering vector needs at least one element");
    let s = angle_rad.sin();
    CVec::new((0..n).map(|k| Complex64::from_polar(1.0, PI * k as f64 * s)).collect())
}

/// Free-space amplitude gain `lambda / (4 pi d)`.
pub fn free_space_gain(d_m: f64, frequency_hz: f64) -> Result<f64, ChannelError> {
    if !d_m.is_finite() || d_m <= 0.0 {
        return Err(ChannelError::NonPositiveDistance(d_m));
    }
    if !frequency_hz.is_finite() || frequency_hz <= 0.0 {
        return Err(ChannelError::InvalidScenario("frequency must be > 0".into()));
    }
    let lambda = SPEED_OF_LIGHT_M_S / frequency_hz;
    Ok(lambda / (4.0 * PI * d_m))
}

fn propagation(d_m: f64, lambda: f64) -> Complex64 {
    Complex64::from_polar(1.0, -2.0 * PI * d_m / lambda)
}

/// Synthesizes the LoS channels with the default array geometry.
pub fn synthesize(scenario: &Scenario, seed: u64) -> Result<ChannelSet, ChannelError> {
    synthesize_with(scenario, seed, &ArrayGeometry::default())
}

/// Synthesizes the LoS channels. The seed randomizes only the loop
/// channel's global phase, which never survives the ZF projection but
/// keeps the rank handling honest. Deterministic per (scenario, seed).
pub fn synthesize_with(
    scenario: &Scenario,
    seed: u64,
    geom: &ArrayGeometry,
) -> Result<ChannelSet, ChannelError> {
    scenario.validate()?;
    let lambda = scenario.wavelength_m();
    let f = scenario.frequency_hz;
    let d_ed = scenario.d_ed_m();
    if d_ed == 0.0 {
        return Err(ChannelError::InvalidScenario("d_ed == 0".into()));
    }

    let h_sd = free_space_gain(scenario.d_sd_m, f)? * propagation(scenario.d_sd_m, lambda);

    let g_se = free_space_gain(scenario.d_se_m, f)?;
    let h_se = ula_steering(geom.rx_steer_rad, scenario.m_rx)
        .scaled(g_se * propagation(scenario.d_se_m, lambda));

    let g_ed = free_space_gain(d_ed, f)?;
    let h_ed = ula_steering(geom.tx_steer_rad, scenario.n_tx)
        .scaled(g_ed * propagation(d_ed, lambda));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let loop_phase = 2.0 * PI * uniform_unit(&mut rng);
    let g_loop = free_space_gain(geom.loop_sep_m, f)?;
    let loop_coeff = g_loop
        * propagation(geom.loop_sep_m, lambda)
        * Complex64::from_polar(1.0, loop_phase);
    let h_ee = CMat::outer(
        &ula_steering(geom.loop_rx_rad, scenario.m_rx),
        &ula_steering(geom.loop_tx_rad, scenario.n_tx),
    )
    .scaled(loop_coeff);

    Ok(ChannelSet {
        h_sd,
        h_se,
        h_ed,
        h_ee,
        p_s: scenario.p_s_over_sigma2,
        p_e: scenario.p_e_over_sigma2,
        gamma_gap: scenario.gamma_gap,
    })
}

pub(crate) fn uniform_unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// ZF reduction: null-space basis of the loop channel and the projected
/// relay channel. Fails when the null space is trivial.
pub fn project(cs: &ChannelSet) -> Result<ProjectedChannels, ChannelError> {
    let v0 = null_space_basis(&cs.h_ee);
    let r0 = v0.cols();
    if r0 == 0 {
        return Err(ChannelError::ZfInfeasible);
    }
    let h_ed_hat = v0.hermitian().mul_vec(&cs.h_ed);
    Ok(ProjectedChannels { v0, h_ed_hat, r0 })
}

/// Lifts a reduced precoder `W` (r0 x M) back to the full transmit
/// precoder `V0 W` (N x M). Isometric: Frobenius norm is preserved.
pub fn lift_precoder(pc: &ProjectedChannels, w: &CMat) -> Result<CMat, ChannelError> {
    if w.rows() != pc.r0 {
        return Err(ChannelError::DimensionMismatch {
            expected: (pc.r0, w.cols()),
            got: (w.rows(), w.cols()),
        });
    }
    Ok(pc.v0.mul(w))
}
