//! The optimization chain: SNR evaluators, closed-form max/min relay
//! SNR at the destination for a fixed power split, the reduction to a
//! single uniform splitting ratio, the three-case solver, and the
//! single-power-splitter (binary splitting) construction.
//!
//! Internally everything is expressed in three dimensionless SNR-level
//! quantities:
//!   g  = P_S |h_SD|^2 / sigma^2      direct-link SNR at D,
//!   x  = P_S ||h_SE||^2 / sigma^2    full eavesdropping SNR at E,
//!   j  = P_E ||hed_hat||^2 / sigma^2 full-power noise-amplification
//!                                     seen at D through the null space.
//! Raw channel quantities only reappear when a precoder matrix has to
//! be materialized.

use crate::channel::{lift_precoder, ChannelSet, ProjectedChannels};
use crate::numerics::{bisect_root, poly_roots_real_in_unit, CMat, CVec, BISECT_TOLERANCE};
use num_complex::Complex64;
use std::fmt;

/// Relative tolerance for classifying an instance into one of the
/// three solver cases; ties resolve to the lower-numbered case.
const CASE_TIE_TOLERANCE: f64 = 1e-12;

/// Residual tolerance (relative to the eavesdropping SNR scale) for
/// accepting a candidate crossing in the destructive-relaying case.
const CROSSING_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub enum SolverError {
    InvalidSplit(String),
    ZfInfeasible,
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidSplit(why) => write!(f, "invalid power-splitting vector: {why}"),
            Self::ZfInfeasible => write!(f, "projected channels have r0 == 0"),
        }
    }
}

impl std::error::Error for SolverError {}

// ───────────────────────── power splitting ─────────────────────────

/// Per-antenna receive power-splitting ratios, each in [0, 1]. The
/// fraction `rho_m` of antenna m's signal feeds the relaying chain and
/// `1 - rho_m` feeds the information decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitVector {
    rho: Vec<f64>,
}

impl SplitVector {
    pub fn new(rho: Vec<f64>) -> Result<Self, SolverError> {
        if rho.is_empty() {
            return Err(SolverError::InvalidSplit("empty".into()));
        }
        for &r in &rho {
            if !(0.0..=1.0).contains(&r) {
                return Err(SolverError::InvalidSplit(format!("ratio {r} outside [0, 1]")));
            }
        }
        Ok(Self { rho })
    }

    /// Uniform splitting: the same ratio on all `m` antennas.
    pub fn uniform(rho: f64, m: usize) -> Result<Self, SolverError> {
        Self::new(vec![rho; m])
    }

    pub fn ratios(&self) -> &[f64] {
        &self.rho
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    /// Split signal power `sum_m rho_m |h_m|^2`; the single scalar the
    /// relay-side SNRs depend on.
    pub fn split_power(&self, h_se: &CVec) -> f64 {
        assert_eq!(self.len(), h_se.len());
        self.rho
            .iter()
            .zip(h_se.entries().iter())
            .map(|(&r, h)| r * h.norm_sqr())
            .sum()
    }

    /// Effective relayed channel `diag(sqrt(rho)) h_SE`.
    pub fn effective_channel(&self, h_se: &CVec) -> CVec {
        assert_eq!(self.len(), h_se.len());
        CVec::new(
            self.rho
                .iter()
                .zip(h_se.entries().iter())
                .map(|(&r, h)| h * r.sqrt())
                .collect(),
        )
    }
}

// ───────────────────────── SNR evaluators ─────────────────────────

/// SNR of the information decoder at the monitor (MRC over the decoder
/// branches): `sum_m (1 - rho_m) |h_SE,m|^2 * P_S/sigma^2`.
pub fn snr_e(rho: &SplitVector, cs: &ChannelSet) -> f64 {
    assert_eq!(rho.len(), cs.m_rx());
    let kept: f64 = rho
        .ratios()
        .iter()
        .zip(cs.h_se.entries().iter())
        .map(|(&r, h)| (1.0 - r) * h.norm_sqr())
        .sum();
    kept * cs.p_s
}

/// Effective SNR at the destination for a given split and reduced
/// precoder `w` (r0 x M):
/// `|h_SD + hed_hat^H W diag(sqrt(rho)) h_SE|^2 P_S / (1 + ||hed_hat^H W||^2)`.
pub fn snr_d(rho: &SplitVector, w: &CMat, cs: &ChannelSet, pc: &ProjectedChannels) -> f64 {
    snr_d_with_jam(rho, w, 0.0, cs, pc)
}

/// `snr_d` with an extra noise-only relay branch of power `jam_gain`
/// beamformed toward D. This realizes the jamming component when a
/// single receive chain leaves no orthogonal combining direction; it
/// only adds `||hed_hat||^2 * jam_gain` amplified noise at D.
pub fn snr_d_with_jam(
    rho: &SplitVector,
    w: &CMat,
    jam_gain: f64,
    cs: &ChannelSet,
    pc: &ProjectedChannels,
) -> f64 {
    assert_eq!(w.rows(), pc.r0, "precoder must act on the null-space coordinates");
    assert_eq!(w.cols(), cs.m_rx());
    let h_hat_se = rho.effective_channel(&cs.h_se);
    // row vector hed_hat^H W, stored as its conjugate transpose W^H hed_hat
    let wh_hed = w.hermitian().mul_vec(&pc.h_ed_hat);
    let mut forwarded = Complex64::new(0.0, 0.0);
    for m in 0..cs.m_rx() {
        forwarded += wh_hed[m].conj() * h_hat_se[m];
    }
    let signal = cs.h_sd + forwarded;
    let noise_amp = wh_hed.norm_sq() + pc.h_ed_hat.norm_sq() * jam_gain;
    signal.norm_sqr() * cs.p_s / (1.0 + noise_amp)
}

/// Relay transmit power spent by `(rho, w, jam_gain)`:
/// `P_S ||W diag(sqrt(rho)) h_SE||^2 + ||W||_F^2 + jam_gain`.
pub fn relay_power(rho: &SplitVector, w: &CMat, jam_gain: f64, cs: &ChannelSet) -> f64 {
    let h_hat_se = rho.effective_channel(&cs.h_se);
    cs.p_s * w.mul_vec(&h_hat_se).norm_sq() + w.frobenius_norm_sq() + jam_gain
}

// ───────────────────────── reduced quantities ─────────────────────────

#[derive(Debug, Clone, Copy)]
struct Reduced {
    /// Direct-link SNR at D.
    g: f64,
    /// Full (rho = 0) eavesdropping SNR at E.
    x: f64,
    /// Full-power amplified-noise level at D.
    j: f64,
    /// Raw squared norm of the projected relay channel.
    e_raw: f64,
    /// Raw |h_SD|.
    a: f64,
}

fn reduced(cs: &ChannelSet, pc: &ProjectedChannels) -> Reduced {
    let a2 = cs.h_sd.norm_sqr();
    let e_raw = pc.h_ed_hat.norm_sq();
    Reduced {
        g: cs.p_s * a2,
        x: cs.p_s * cs.h_se.norm_sq(),
        j: cs.p_e * e_raw,
        e_raw,
        a: a2.sqrt(),
    }
}

/// Stable form of `(-1 + sqrt(1 + 4ab)) / 2`.
fn half_quadratic_root(ab: f64) -> f64 {
    2.0 * ab / (1.0 + (1.0 + 4.0 * ab).sqrt())
}

// ───────────────────────── max SNR at D ─────────────────────────

/// Closed-form maximizer of the destination SNR over all power-feasible
/// precoders at a fixed split.
#[derive(Debug, Clone)]
pub struct MaxSnrResult {
    pub gamma: f64,
    /// Optimal rank-one precoder (r0 x M).
    pub w: CMat,
    /// Power weight of the rank-one precoder.
    pub mu: f64,
}

/// Maximum achievable destination SNR at split `rho`: MRC combining of
/// the splitter outputs, maximal-ratio transmission toward D, phase
/// aligned with the direct link so both paths add constructively.
pub fn max_snr_d(rho: &SplitVector, cs: &ChannelSet, pc: &ProjectedChannels) -> MaxSnrResult {
    let r = reduced(cs, pc);
    let s2 = rho.split_power(&cs.h_se);
    let xs = cs.p_s * s2;
    if r.e_raw == 0.0 || s2 == 0.0 || cs.p_e == 0.0 {
        // nothing to forward or no way to reach D: passive value
        return MaxSnrResult { gamma: r.g, w: CMat::zeros(pc.r0, cs.m_rx()), mu: 0.0 };
    }
    let mu_cap = cs.p_e / (cs.p_s * s2 + 1.0);
    // branch test: unconstrained optimum within the power budget?
    let (gamma, mu) = if xs * (xs + 1.0) <= r.g * r.j {
        (r.g + xs, s2 / (r.a * r.a * r.e_raw))
    } else {
        let num = (r.g * (1.0 + xs)).sqrt() + (xs * r.j).sqrt();
        (num * num / (1.0 + xs + r.j), mu_cap)
    };
    let h_tilde_ed = pc.h_ed_hat.normalized();
    let h_tilde_se = rho.effective_channel(&cs.h_se).normalized();
    let w = CMat::outer(&h_tilde_ed, &h_tilde_se)
        .scaled(Complex64::from_polar(mu.sqrt(), cs.h_sd.arg()));
    MaxSnrResult { gamma, w, mu }
}

// ───────────────────────── min SNR at D ─────────────────────────

/// Intermediates of the destination-SNR minimization: the chosen
/// weights and the closed-form interior candidate.
#[derive(Debug, Clone, Copy)]
pub struct MinSnrAux {
    /// Chosen destructive-combining weight.
    pub z1: f64,
    /// Chosen jamming weight.
    pub z2: f64,
    /// Interior critical point on the power-tight boundary.
    pub z1_interior: f64,
    pub z2_interior: f64,
    /// Curvature discriminant deciding whether the interior point wins.
    pub c1: f64,
}

#[derive(Debug, Clone)]
pub struct MinSnrResult {
    pub gamma: f64,
    /// Rank-one destructive/jamming precoder (r0 x M).
    pub w: CMat,
    /// Noise-only relay power not representable inside `w` (only
    /// nonzero for a single receive chain with a nonzero split).
    pub jam_gain: f64,
    pub aux: MinSnrAux,
}

/// Minimum achievable destination SNR at split `rho`: destructive
/// information forwarding plus noise amplification, phase anti-aligned
/// with the direct link. The candidate set covers full cancellation,
/// the interior critical point on the power-tight boundary, and the
/// all-power-to-forwarding corner; boundary ties take the smaller value.
pub fn min_snr_d(rho: &SplitVector, cs: &ChannelSet, pc: &ProjectedChannels) -> MinSnrResult {
    let r = reduced(cs, pc);
    let m = cs.m_rx();
    let zero_aux = MinSnrAux { z1: 0.0, z2: 0.0, z1_interior: 0.0, z2_interior: 0.0, c1: 0.0 };
    if r.e_raw == 0.0 || cs.p_e == 0.0 {
        return MinSnrResult {
            gamma: r.g,
            w: CMat::zeros(pc.r0, m),
            jam_gain: 0.0,
            aux: zero_aux,
        };
    }

    let s2 = rho.split_power(&cs.h_se);
    let xs = cs.p_s * s2;
    let budget_z1 = cs.p_e / (1.0 + xs);
    let c1 = cs.p_s * (r.g * r.j - (1.0 + r.j) * (1.0 + r.j));

    // interior critical point on the power-tight boundary
    let (z1_interior, z2_interior) = if r.a > 0.0 && s2 > 0.0 {
        let z1i = (1.0 + r.j) * (1.0 + r.j) / (cs.p_s * cs.p_s * r.a * r.a * r.e_raw * s2);
        (z1i, cs.p_e - (1.0 + xs) * z1i)
    } else {
        (f64::INFINITY, f64::NEG_INFINITY)
    };

    // candidate list: (z1, z2, gamma)
    let mut best: Option<(f64, f64, f64)> = None;
    let mut consider = |z1: f64, z2: f64, gamma: f64| {
        if gamma.is_finite() && gamma >= -1e-12 {
            let gamma = gamma.max(0.0);
            if best.is_none_or(|(_, _, g)| gamma < g) {
                best = Some((z1, z2, gamma));
            }
        }
    };

    if s2 > 0.0 {
        // full cancellation, if the budget allows it
        let z1_cancel = r.a * r.a / (r.e_raw * s2);
        if (1.0 + xs) * z1_cancel <= cs.p_e * (1.0 + 1e-12) {
            consider(z1_cancel.min(budget_z1), 0.0, 0.0);
        }
        // interior critical point (a genuine minimum only below full
        // cancellation strength, i.e. when its value is nonnegative)
        if z2_interior >= 0.0 && r.g >= 1.0 + r.j {
            consider(z1_interior, z2_interior, r.g / (1.0 + r.j) - 1.0);
        }
        // all power to destructive forwarding
        let num = (r.g * (1.0 + xs)).sqrt() - (xs * r.j).sqrt();
        consider(budget_z1, 0.0, num * num / (1.0 + xs + r.j));
    } else {
        // nothing split for relaying: pure noise amplification
        consider(0.0, cs.p_e, r.g / (1.0 + r.j));
    }

    let (z1, z2, gamma) = best.expect("candidate set is never empty");
    let (w, jam_gain) = build_min_precoder(rho, cs, pc, s2, z1, z2);
    MinSnrResult {
        gamma,
        w,
        jam_gain,
        aux: MinSnrAux { z1, z2, z1_interior, z2_interior, c1 },
    }
}

/// Materializes the destructive precoder: anti-phased MRT along the
/// projected relay channel with the combining vector
/// `sqrt(z1) h_tilde_SE + sqrt(z2) h_tilde_SE_perp`. With a single
/// receive chain and a nonzero split the orthogonal direction does
/// not exist, so the z2 share is carried as a separate noise-only
/// gain instead.
fn build_min_precoder(
    rho: &SplitVector,
    cs: &ChannelSet,
    pc: &ProjectedChannels,
    s2: f64,
    z1: f64,
    z2: f64,
) -> (CMat, f64) {
    let m = cs.m_rx();
    let h_tilde_ed = pc.h_ed_hat.normalized();
    let anti_phase = Complex64::from_polar(1.0, cs.h_sd.arg() + std::f64::consts::PI);

    if s2 == 0.0 {
        // no signal is forwarded whatever the combining direction
        let total = z1 + z2;
        if total == 0.0 {
            return (CMat::zeros(pc.r0, m), 0.0);
        }
        let dir = jam_direction(&cs.h_se);
        let w = CMat::outer(&h_tilde_ed, &dir).scaled(anti_phase * total.sqrt());
        return (w, 0.0);
    }

    let h_tilde_se = rho.effective_channel(&cs.h_se).normalized();
    let mut combine = h_tilde_se.scaled(Complex64::new(z1.sqrt(), 0.0));
    let mut jam_gain = 0.0;
    if z2 > 0.0 {
        if m >= 2 {
            let perp = unit_orthogonal(&h_tilde_se);
            combine = CVec::new(
                (0..m)
                    .map(|k| combine[k] + perp[k] * z2.sqrt())
                    .collect(),
            );
        } else {
            jam_gain = z2;
        }
    }
    let w = CMat::outer(&h_tilde_ed, &combine).scaled(anti_phase);
    (w, jam_gain)
}

/// Deterministic unit vector orthogonal to the given unit vector
/// (length >= 2): Gram-Schmidt on the basis vector with the smallest
/// overlap.
fn unit_orthogonal(unit: &CVec) -> CVec {
    let m = unit.len();
    assert!(m >= 2);
    let k = (0..m)
        .min_by(|&i, &j| unit[i].norm_sqr().partial_cmp(&unit[j].norm_sqr()).unwrap())
        .unwrap();
    let overlap = unit[k].conj();
    let v = CVec::new(
        (0..m)
            .map(|i| {
                let e = if i == k { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                e - unit[i] * overlap
            })
            .collect(),
    );
    v.normalized()
}

/// Combining direction for a pure-jamming precoder: orthogonal to the
/// eavesdropping channel when possible so that no signal is forwarded
/// even with a nonzero split.
fn jam_direction(h_se: &CVec) -> CVec {
    let m = h_se.len();
    if m == 1 || h_se.norm_sq() == 0.0 {
        CVec::basis(m, 0)
    } else {
        unit_orthogonal(&h_se.normalized())
    }
}

// ───────────────────────── univariate reductions ─────────────────────────

/// Eavesdropping SNR under uniform splitting: `(1 - rho) x`.
pub fn ups_gamma_e(rho_scalar: f64, cs: &ChannelSet) -> f64 {
    debug_assert!((0.0..=1.0).contains(&rho_scalar));
    (1.0 - rho_scalar) * cs.p_s * cs.h_se.norm_sq()
}

/// Breakpoints of the univariate max/min destination-SNR curves plus
/// instance-level diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct Breakpoints {
    /// Split ratio above which the max curve becomes power limited.
    pub rho1: f64,
    /// Split ratio above which full cancellation is possible (only
    /// meaningful when `j > g`, else 1).
    pub rho2: f64,
    /// Split ratio above which the min curve floors at its interior
    /// value (only meaningful when `j <= g`, else 1).
    pub rho3: f64,
    /// Raw interior-floor threshold before clamping into [0, 1].
    pub c2: f64,
    /// Channel power ratio `||h_SE||^2 / |h_SD|^2`.
    pub alpha: f64,
    /// Power weight of the returned precoder, when one exists.
    pub mu_star: f64,
}

pub fn breakpoints(cs: &ChannelSet, pc: &ProjectedChannels) -> Breakpoints {
    let r = reduced(cs, pc);
    let rho1 = if r.x > 0.0 { (half_quadratic_root(r.g * r.j) / r.x).min(1.0) } else { 1.0 };
    let rho2 = if r.j > r.g && r.x > 0.0 {
        (r.g / (r.x * (r.j - r.g))).min(1.0)
    } else {
        1.0
    };
    let c1_reduced = r.g * r.j - (1.0 + r.j) * (1.0 + r.j);
    let c2 = if r.x > 0.0 && c1_reduced != 0.0 {
        (1.0 + r.j) * (1.0 + r.j) / (r.x * c1_reduced)
    } else {
        f64::INFINITY
    };
    let rho3 = if (0.0..=1.0).contains(&c2) { c2 } else { 1.0 };
    let alpha = if r.g > 0.0 { r.x / r.g } else { f64::INFINITY };
    Breakpoints { rho1, rho2, rho3, c2, alpha, mu_star: f64::NAN }
}

/// Univariate maximum destination SNR under uniform splitting: linear
/// in rho up to `rho1`, then the power-limited expression.
pub fn ups_gamma_d_max(rho_scalar: f64, cs: &ChannelSet, pc: &ProjectedChannels) -> f64 {
    debug_assert!((0.0..=1.0).contains(&rho_scalar));
    let r = reduced(cs, pc);
    let bp = breakpoints(cs, pc);
    if rho_scalar <= bp.rho1 {
        r.g + rho_scalar * r.x
    } else {
        let xs = rho_scalar * r.x;
        let num = (r.g * (1.0 + xs)).sqrt() + (xs * r.j).sqrt();
        num * num / (1.0 + xs + r.j)
    }
}

/// Univariate minimum destination SNR under uniform splitting: the
/// destructive-forwarding expression until it floors at zero (strong
/// relay) or at the interior value (weak relay).
pub fn ups_gamma_d_min(rho_scalar: f64, cs: &ChannelSet, pc: &ProjectedChannels) -> f64 {
    debug_assert!((0.0..=1.0).contains(&rho_scalar));
    let r = reduced(cs, pc);
    if r.j > r.g {
        let rho2 = if r.x > 0.0 { (r.g / (r.x * (r.j - r.g))).min(1.0) } else { 1.0 };
        if rho_scalar > rho2 {
            return 0.0;
        }
    } else {
        let c1_reduced = r.g * r.j - (1.0 + r.j) * (1.0 + r.j);
        if c1_reduced > 0.0 && r.x > 0.0 {
            let c2 = (1.0 + r.j) * (1.0 + r.j) / (r.x * c1_reduced);
            let rho3 = if (0.0..=1.0).contains(&c2) { c2 } else { 1.0 };
            if rho_scalar > rho3 {
                return r.g / (1.0 + r.j) - 1.0;
            }
        }
    }
    let xs = rho_scalar * r.x;
    let num = (r.g * (1.0 + xs)).sqrt() - (xs * r.j).sqrt();
    num * num / (1.0 + xs + r.j)
}

// ───────────────────────── the three-case solver ─────────────────────────

/// Which relaying strategy the solver chose.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpoofMode {
    /// Eavesdropping link stronger than the suspicious link: forward
    /// the source signal in phase to raise the source rate.
    ConstructiveRelay,
    /// Weaker, but full-power jamming suffices: amplify noise only.
    JammingOnly,
    /// Much weaker: jam and forward the source signal in antiphase.
    JammingPlusDestructive,
    /// The source rate cannot be degraded far enough with this budget.
    Infeasible,
}

impl fmt::Display for SpoofMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::ConstructiveRelay => "constructive_relay",
            Self::JammingOnly => "jamming_only",
            Self::JammingPlusDestructive => "jamming_plus_destructive",
            Self::Infeasible => "infeasible",
        };
        f.write_str(s)
    }
}

/// Solver output: the chosen strategy, the optimal split and precoder
/// (reduced and lifted), the achieved SNR pair, and the eavesdropping
/// rate. `jam_gain` carries the noise-only relay power that cannot be
/// expressed inside `w_star` when only one receive chain exists.
#[derive(Debug, Clone)]
pub struct SpoofSolution {
    pub mode: SpoofMode,
    pub rho_star: SplitVector,
    pub w_star: CMat,
    pub w_hat_star: CMat,
    pub jam_gain: f64,
    pub gamma_d: f64,
    pub gamma_e: f64,
    pub rate_bps_hz: f64,
    pub breakpoints: Breakpoints,
}

impl SpoofSolution {
    /// Relay power actually spent by the returned solution.
    pub fn power_used(&self, cs: &ChannelSet) -> f64 {
        relay_power(&self.rho_star, &self.w_star, self.jam_gain, cs)
    }
}

/// Effective rate `log2(1 + gamma / gap)` with the modulation gap as
/// an SNR divisor.
pub fn rate_of(gamma: f64, gap: f64) -> f64 {
    debug_assert!(gamma >= 0.0 && gap >= 1.0);
    (1.0 + gamma / gap).log2()
}

/// Closed-form shortcut for the constructive case with an ample power
/// budget: if `alpha > 1` and `p_e >= alpha (1 + x) / ||hed_hat||^2`
/// the optimal split is `(1 - 1/alpha) / 2` with both SNRs equal to
/// `(x + g) / 2`. Returns `None` when the precondition fails.
pub fn ample_power_fast_path(cs: &ChannelSet, pc: &ProjectedChannels) -> Option<(f64, f64)> {
    let r = reduced(cs, pc);
    if r.g <= 0.0 || r.x <= r.g {
        return None;
    }
    let alpha = r.x / r.g;
    if r.j < alpha * (1.0 + r.x) {
        return None;
    }
    Some((0.5 * (1.0 - 1.0 / alpha), 0.5 * (r.x + r.g)))
}

/// Solves the joint split/precoder problem by case dispatch on the
/// endpoint SNR comparisons, per the univariate reduction.
pub fn solve(cs: &ChannelSet, pc: &ProjectedChannels) -> Result<SpoofSolution, SolverError> {
    if pc.r0 == 0 {
        return Err(SolverError::ZfInfeasible);
    }
    let r = reduced(cs, pc);
    let m = cs.m_rx();
    let mut bp = breakpoints(cs, pc);
    let gap = cs.gamma_gap;

    // degenerate relay: D is out of reach, only the passive comparison remains
    if r.j == 0.0 {
        return Ok(if r.x >= r.g * (1.0 - CASE_TIE_TOLERANCE) {
            SpoofSolution {
                mode: SpoofMode::JammingOnly,
                rho_star: SplitVector::uniform(0.0, m)?,
                w_star: CMat::zeros(pc.r0, m),
                w_hat_star: CMat::zeros(cs.n_tx(), m),
                jam_gain: 0.0,
                gamma_d: r.g,
                gamma_e: r.x,
                rate_bps_hz: rate_of(r.g, gap),
                breakpoints: bp,
            }
        } else {
            infeasible_solution(cs, pc, bp)
        });
    }

    let tie = |a: f64, b: f64| (a - b).abs() <= CASE_TIE_TOLERANCE * a.abs().max(b.abs());

    // Case 1: the monitor's channel beats the suspicious link.
    if r.g < r.x || tie(r.g, r.x) {
        let f = |rho: f64| ups_gamma_e(rho, cs) - ups_gamma_d_max(rho, cs, pc);
        let rho_star = if f(0.0) <= 0.0 {
            0.0
        } else {
            bisect_root(f, 0.0, 1.0, BISECT_TOLERANCE)
                .expect("case-1 crossing is bracketed by construction")
        };
        let split = SplitVector::uniform(rho_star, m)?;
        let max = max_snr_d(&split, cs, pc);
        bp.mu_star = max.mu;
        let w_hat = lift_precoder(pc, &max.w).expect("closed-form precoder has reduced shape");
        return Ok(SpoofSolution {
            mode: SpoofMode::ConstructiveRelay,
            rho_star: split,
            gamma_d: max.gamma,
            gamma_e: ups_gamma_e(rho_star, cs),
            rate_bps_hz: rate_of(max.gamma, gap),
            w_star: max.w,
            w_hat_star: w_hat,
            jam_gain: 0.0,
            breakpoints: bp,
        });
    }

    // Case 2: full-power jamming can push D down to E's level.
    let gamma_min0 = r.g / (1.0 + r.j);
    if r.x > gamma_min0 || tie(r.x, gamma_min0) {
        let jam_power = (((r.g / r.x) - 1.0) / r.e_raw).clamp(0.0, cs.p_e);
        let dir = jam_direction(&cs.h_se);
        let w = CMat::outer(&pc.h_ed_hat.normalized(), &dir)
            .scaled(Complex64::new(jam_power.sqrt(), 0.0));
        let w_hat = lift_precoder(pc, &w).expect("jamming precoder has reduced shape");
        return Ok(SpoofSolution {
            mode: SpoofMode::JammingOnly,
            rho_star: SplitVector::uniform(0.0, m)?,
            w_star: w,
            w_hat_star: w_hat,
            jam_gain: 0.0,
            gamma_d: r.x,
            gamma_e: r.x,
            rate_bps_hz: rate_of(r.x, gap),
            breakpoints: bp,
        });
    }

    // Case 3: jam and destructively forward; the optimal split is the
    // smallest crossing of the min curve with the eavesdropping line.
    match case3_smallest_crossing(cs, pc, r) {
        Some(rho_star) => {
            let split = SplitVector::uniform(rho_star, m)?;
            let min = min_snr_d(&split, cs, pc);
            let w_hat = lift_precoder(pc, &min.w).expect("closed-form precoder has reduced shape");
            Ok(SpoofSolution {
                mode: SpoofMode::JammingPlusDestructive,
                rho_star: split,
                gamma_d: min.gamma,
                gamma_e: ups_gamma_e(rho_star, cs),
                rate_bps_hz: rate_of(min.gamma, gap),
                w_star: min.w,
                w_hat_star: w_hat,
                jam_gain: min.jam_gain,
                breakpoints: bp,
            })
        }
        None => Ok(infeasible_solution(cs, pc, bp)),
    }
}

fn infeasible_solution(cs: &ChannelSet, pc: &ProjectedChannels, bp: Breakpoints) -> SpoofSolution {
    let m = cs.m_rx();
    SpoofSolution {
        mode: SpoofMode::Infeasible,
        rho_star: SplitVector::uniform(0.0, m).expect("m >= 1"),
        w_star: CMat::zeros(pc.r0, m),
        w_hat_star: CMat::zeros(cs.n_tx(), m),
        jam_gain: 0.0,
        gamma_d: 0.0,
        gamma_e: cs.p_s * cs.h_se.norm_sq(),
        rate_bps_hz: 0.0,
        breakpoints: bp,
    }
}

/// Collects every crossing of `ups_gamma_d_min` with `ups_gamma_e` in
/// [0, 1]: the quartic from the destructive-forwarding branch plus the
/// crossings of the two constant branches. Squaring introduces
/// spurious candidates, so each one is re-verified against the
/// original equation and polished before the smallest is chosen.
fn case3_smallest_crossing(cs: &ChannelSet, pc: &ProjectedChannels, r: Reduced) -> Option<f64> {
    let (g, x, j) = (r.g, r.x, r.j);
    let c2 = x * x;
    let c1 = x * (g + 2.0 * j + 1.0 - x);
    let c0 = g - x * (1.0 + j);
    let quartic = [
        c0 * c0,
        2.0 * c1 * c0 - 4.0 * g * x * j,
        c1 * c1 + 2.0 * c2 * c0 - 4.0 * g * x * x * j,
        2.0 * c2 * c1,
        c2 * c2,
    ];
    let mut candidates = poly_roots_real_in_unit(&quartic).unwrap_or_default();

    if j > g {
        // the min curve hits zero beyond rho2; gamma_e only reaches
        // zero at rho = 1
        let rho2 = if x > 0.0 { (g / (x * (j - g))).min(1.0) } else { 1.0 };
        if rho2 < 1.0 {
            candidates.push(1.0);
        }
    } else {
        let c1_reduced = g * j - (1.0 + j) * (1.0 + j);
        if c1_reduced > 0.0 && x > 0.0 {
            let floor = g / (1.0 + j) - 1.0;
            let rho_c = 1.0 - floor / x;
            if (0.0..=1.0).contains(&rho_c) {
                candidates.push(rho_c);
            }
        }
    }

    let h = |rho: f64| ups_gamma_e(rho, cs) - ups_gamma_d_min(rho, cs, pc);
    let scale = x.max(1.0);
    let mut verified: Vec<f64> = Vec::new();
    for cand in candidates {
        let mut rho = cand.clamp(0.0, 1.0);
        // polish on the unsquared equation (central-difference Newton)
        for _ in 0..3 {
            let step = 1e-7;
            let lo = (rho - step).max(0.0);
            let hi = (rho + step).min(1.0);
            let d = (h(hi) - h(lo)) / (hi - lo);
            if !d.is_finite() || d.abs() < 1e-12 * scale {
                break;
            }
            let next = (rho - h(rho) / d).clamp(0.0, 1.0);
            if !next.is_finite() {
                break;
            }
            rho = next;
        }
        if h(rho).abs() <= CROSSING_TOLERANCE * scale {
            verified.push(rho);
        }
    }
    verified.sort_by(|a, b| a.partial_cmp(b).unwrap());
    verified.dedup_by(|a, b| (*a - *b).abs() <= 1e-7);

    // the chosen root must leave the eavesdropping line inside the
    // achievable SNR interval; fall through to the next root otherwise
    verified
        .into_iter()
        .find(|&rho| ups_gamma_e(rho, cs) <= ups_gamma_d_max(rho, cs, pc) * (1.0 + 1e-9) + 1e-30)
}

// ───────────────────────── binary power splitting ─────────────────────────

/// Converts an optimal uniform split into an equivalent vector with at
/// most one fractional entry: the strongest antennas split fully, one
/// antenna splits partially, the rest not at all. The split signal
/// power `sum rho_m |h_SE,m|^2` is preserved, so every SNR is too.
pub fn bps_construct(rho_ups: f64, cs: &ChannelSet) -> SplitVector {
    debug_assert!((0.0..=1.0).contains(&rho_ups));
    let m = cs.m_rx();
    if m == 1 {
        return SplitVector::uniform(rho_ups, 1).expect("scalar split is valid");
    }
    let powers: Vec<f64> = cs.h_se.entries().iter().map(|h| h.norm_sqr()).collect();
    let total: f64 = powers.iter().sum();
    let mut rho = vec![0.0; m];
    if total <= 0.0 {
        rho[0] = rho_ups;
        return SplitVector::new(rho).expect("ratios in range");
    }
    let target = rho_ups * total;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| powers[j].partial_cmp(&powers[i]).unwrap().then(i.cmp(&j)));

    let mut cum = 0.0;
    for &idx in &order {
        let p = powers[idx];
        if p <= 0.0 {
            break;
        }
        if cum + p >= target {
            rho[idx] = ((target - cum) / p).clamp(0.0, 1.0);
            break;
        }
        rho[idx] = 1.0;
        cum += p;
    }
    SplitVector::new(rho).expect("ratios in range")
}
