//! Benchmark schemes: passive eavesdropping and jamming-only proactive
//! eavesdropping. The spoofing solver must dominate both.

use crate::channel::{ChannelSet, ProjectedChannels};
use crate::solver::rate_of;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Passive,
    JammingOnly,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Passive => f.write_str("passive"),
            Self::JammingOnly => f.write_str("jamming_only"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineResult {
    pub scheme: Scheme,
    pub rate_bps_hz: f64,
    /// Linear relay power spent on jamming (0 for the passive scheme).
    pub jam_power_used: f64,
}

/// Passive eavesdropping: listen only. Decodable (and then worth the
/// full suspicious-link rate) exactly when the eavesdropping channel
/// is at least as strong as the suspicious one.
pub fn passive_rate(cs: &ChannelSet) -> BaselineResult {
    let g = cs.p_s * cs.h_sd.norm_sqr();
    let x = cs.p_s * cs.h_se.norm_sq();
    let rate = if x >= g { rate_of(g, cs.gamma_gap) } else { 0.0 };
    BaselineResult { scheme: Scheme::Passive, rate_bps_hz: rate, jam_power_used: 0.0 }
}

/// Jamming-only proactive eavesdropping: amplify noise toward D (MRT
/// along the projected relay channel) with just enough power to pull
/// the suspicious-link SNR down to the eavesdropping SNR.
pub fn jamming_rate(cs: &ChannelSet, pc: &ProjectedChannels) -> BaselineResult {
    let g = cs.p_s * cs.h_sd.norm_sqr();
    let x = cs.p_s * cs.h_se.norm_sq();
    let e_raw = pc.h_ed_hat.norm_sq();
    let j = cs.p_e * e_raw;

    let (rate, jam) = if x >= g {
        // already decodable, no jamming needed
        (rate_of(g, cs.gamma_gap), 0.0)
    } else if j > 0.0 && x * (1.0 + j) >= g {
        let jam = (((g / x) - 1.0) / e_raw).clamp(0.0, cs.p_e);
        (rate_of(x, cs.gamma_gap), jam)
    } else {
        (0.0, 0.0)
    };
    BaselineResult { scheme: Scheme::JammingOnly, rate_bps_hz: rate, jam_power_used: jam }
}
