//! Monte-Carlo experiments on the BPSK/AWGN channel, mutual-information
//! tools and convergence analysis.

mod ber;
mod exit;
mod quadrature;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

pub use ber::{
    ber_curve, gaussian_q, wilson_interval, BerOptions, BerPoint, BerTarget, SimReport, StopRule,
};
pub use exit::METHODOLOGY as EXIT_METHODOLOGY;
pub use exit::{
    exit_curves, inner_exit_curve, outer_exit_curve, threshold_search, tunnel_is_open,
    tunnel_margin, ActivationSensitivity, ExitComponent, ExitCurve, ExitOptions, ThresholdReport,
    TunnelCheck, DEFAULT_EXIT_GRID,
};

use crate::codec::LlrFrame;
use crate::logmath::softplus;
use crate::{Error, Result};

/// BPSK over real AWGN at a given `Eb/N0` and code rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelSpec {
    pub ebn0_db: f64,
    pub rate: f64,
}

impl ChannelSpec {
    pub fn new(ebn0_db: f64, rate: f64) -> Result<Self> {
        if !ebn0_db.is_finite() {
            return Err(Error::out_of_range("Eb/N0", ebn0_db, "finite dB"));
        }
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::out_of_range("rate", rate, "(0, 1]"));
        }
        Ok(Self { ebn0_db, rate })
    }

    /// `σ² = 1 / (2 R · 10^{Eb/N0 / 10})`.
    pub fn noise_variance(&self) -> f64 {
        1.0 / (2.0 * self.rate * 10f64.powf(self.ebn0_db / 10.0))
    }

    /// Channel LLR is `llr_scale · y`.
    pub fn llr_scale(&self) -> f64 {
        2.0 / self.noise_variance()
    }
}

/// Transmits `+1` for bit 0 and `−1` for bit 1 and returns `L = 2y/σ²`.
pub fn bpsk_awgn_llrs<R: Rng + ?Sized>(
    frame: &[u8],
    channel: &ChannelSpec,
    rng: &mut R,
) -> LlrFrame {
    let mut out = vec![0.0; frame.len()];
    bpsk_awgn_into(frame, channel, rng, &mut out);
    LlrFrame::new(out).expect("finite LLRs")
}

pub(crate) fn bpsk_awgn_into<R: Rng + ?Sized>(
    frame: &[u8],
    channel: &ChannelSpec,
    rng: &mut R,
    out: &mut [f64],
) {
    let sigma = channel.noise_variance().sqrt();
    let scale = channel.llr_scale();
    for (o, &b) in out.iter_mut().zip(frame) {
        let s = if b == 0 { 1.0 } else { -1.0 };
        let z: f64 = rng.sample(StandardNormal);
        *o = scale * (s + sigma * z);
    }
}

/// Consistent Gaussian LLRs with spread `sigma_l` for the given bits:
/// mean `±σ_L²/2`, variance `σ_L²`.
pub(crate) fn gaussian_apriori_into<R: Rng + ?Sized>(
    bits: &[u8],
    sigma_l: f64,
    rng: &mut R,
    out: &mut [f64],
) {
    let mu = sigma_l * sigma_l / 2.0;
    for (o, &b) in out.iter_mut().zip(bits) {
        let s = if b == 0 { 1.0 } else { -1.0 };
        let z: f64 = rng.sample(StandardNormal);
        *o = s * mu + sigma_l * z;
    }
}

/// Time-average estimate `1 − mean log₂(1 + e^{−L̃})`, with `L̃` the LLR
/// signed so that it is positive when it favors the true bit.
pub fn mi_estimate(llrs: &[f64], true_bits: &[u8]) -> Result<f64> {
    if llrs.is_empty() {
        return Err(Error::InvalidParameter("empty LLR sequence".into()));
    }
    if llrs.len() != true_bits.len() {
        return Err(Error::LengthMismatch {
            expected: llrs.len(),
            got: true_bits.len(),
        });
    }
    if llrs.iter().any(|x| x.is_nan()) {
        return Err(Error::NanInput("LLRs"));
    }
    Ok(mi_estimate_unchecked(llrs, true_bits))
}

pub(crate) fn mi_estimate_unchecked(llrs: &[f64], true_bits: &[u8]) -> f64 {
    let loss: f64 = llrs
        .iter()
        .zip(true_bits)
        .map(|(&l, &b)| softplus(if b == 0 { -l } else { l }))
        .sum();
    1.0 - loss / (llrs.len() as f64 * std::f64::consts::LN_2)
}

const J_TOL: f64 = 1e-10;

/// `J(σ_L) = 1 − E[log₂(1 + e^{−X})]`, `X ~ N(σ_L²/2, σ_L²)`.
pub fn j_function(sigma_l: f64) -> f64 {
    if !(sigma_l > 0.0) {
        return 0.0;
    }
    if sigma_l.is_infinite() {
        return 1.0;
    }
    let mu = sigma_l * sigma_l / 2.0;
    let norm = 1.0 / (sigma_l * (2.0 * std::f64::consts::PI).sqrt());
    let integrand = |x: f64| {
        let z = (x - mu) / sigma_l;
        norm * (-0.5 * z * z).exp() * softplus(-x)
    };
    let expected =
        quadrature::integrate(integrand, mu - 14.0 * sigma_l, mu + 14.0 * sigma_l, J_TOL);
    (1.0 - expected / std::f64::consts::LN_2).clamp(0.0, 1.0)
}

/// Inverse of [`j_function`] by bisection; `I` in `[0, 1)`.
pub fn j_inverse(mi: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&mi) {
        return Err(Error::out_of_range("mutual information", mi, "[0, 1)"));
    }
    if mi == 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while j_function(hi) < mi {
        hi *= 2.0;
        if hi > 1e4 {
            return Err(Error::NoBracket(format!("J^-1({mi})")));
        }
    }
    while hi - lo > 1e-11 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if j_function(mid) < mi {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// BPSK-constrained capacity (bits per channel use) at noise variance `σ²`.
pub fn bpsk_capacity(noise_variance: f64) -> f64 {
    j_function(2.0 / noise_variance.sqrt())
}

/// `Eb/N0` (dB) at which the BPSK-constrained capacity equals `R`.
pub fn bpsk_capacity_threshold(rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::out_of_range("rate", rate, "(0, 1)"));
    }
    let sigma_l = j_inverse(rate)?;
    let sigma = 2.0 / sigma_l;
    let ebn0 = 1.0 / (2.0 * rate * sigma * sigma);
    Ok(10.0 * ebn0.log10())
}

/// SplitMix64 finalizer, used to derive independent per-task seeds.
pub(crate) fn mix_seed(parts: &[u64]) -> u64 {
    let mut h = 0x9E37_79B9_7F4A_7C15u64;
    for &p in parts {
        let mut z = h ^ p.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        h = z ^ (z >> 31);
    }
    h
}

/// Runs `f` on a dedicated pool of `workers` threads (0 = rayon default).
pub(crate) fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
