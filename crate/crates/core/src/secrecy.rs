//! Secrecy rate of the nulling-noise system and a signal-level Monte Carlo check.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::channel::ChannelVector;
use crate::error::{Error, Result};
use crate::jamming::{sample_noise, NullSpaceDesign};

/// Bob-side residual allowed per sample, relative to `Σ‖h_r‖·‖n_r‖`.
pub const NULLING_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerConfig {
    pub source_power: f64,
    pub noise_floor: f64,
    pub helper_budgets: Vec<f64>,
}

impl PowerConfig {
    pub fn validate(&self) -> Result<()> {
        let all = [self.source_power, self.noise_floor]
            .into_iter()
            .chain(self.helper_budgets.iter().copied());
        for v in all {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "powers must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    /// Signed secrecy rate in bits per channel use.
    pub secrecy_rate: f64,
    /// `log₂(1 + Bob SNR)`.
    pub rate_supremum: f64,
    /// `P_s|h_A|²/N₀`.
    pub bob_snr_term: f64,
    /// `P_s|g_A|²/(Σ|w_r|²φ_r + N₀)`.
    pub eve_sinr_term: f64,
    /// `Σ|w_r|²φ_r`.
    pub total_leakage: f64,
}

impl RateReport {
    /// Secrecy rate floored at zero.
    pub fn clamped_rate(&self) -> f64 {
        self.secrecy_rate.max(0.0)
    }
}

/// Secrecy rate for a given Eve-side jamming power.
pub fn rate_with_leakage(
    power: &PowerConfig,
    h_a: Complex64,
    g_a: Complex64,
    total_leakage: f64,
) -> RateReport {
    let bob_snr_term = power.source_power * h_a.norm_sqr() / power.noise_floor;
    let eve_sinr_term = power.source_power * g_a.norm_sqr() / (total_leakage + power.noise_floor);
    let rate_supremum = (1.0 + bob_snr_term).log2();
    RateReport {
        secrecy_rate: rate_supremum - (1.0 + eve_sinr_term).log2(),
        rate_supremum,
        bob_snr_term,
        eve_sinr_term,
        total_leakage,
    }
}

pub fn secrecy_rate(
    power: &PowerConfig,
    h_a: Complex64,
    g_a: Complex64,
    designs: &[NullSpaceDesign],
) -> RateReport {
    let leakage = designs.iter().map(NullSpaceDesign::leakage_power).sum();
    rate_with_leakage(power, h_a, g_a, leakage)
}

/// `Σ β_r φ_r`: the position-dependent objective once weights sit at their bounds.
pub fn jamming_objective(designs: &[NullSpaceDesign]) -> f64 {
    designs.iter().map(|d| d.beta * d.leakage_phi).sum()
}

/// One draw of the received signals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalSample {
    pub y_bob: Complex64,
    pub y_eve: Complex64,
}

/// Monte Carlo summary of [`simulate_reception`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceptionStats {
    pub n_samples: usize,
    /// Mean of `|Σ g_rᵀ n_r|²`.
    pub eve_interference: f64,
    /// Standard error of that mean.
    pub eve_interference_std_err: f64,
    /// Mean of `|y_E − √P_s·g_A·x|²`; estimates `Σ|w_r|²φ_r + N₀`.
    pub eve_disturbance: f64,
    /// Largest `|Σ h_rᵀ n_r| / Σ‖h_r‖·‖n_r‖` seen.
    pub max_bob_residual: f64,
}

fn circular<R: Rng + ?Sized>(variance: f64, rng: &mut R) -> Complex64 {
    let sd = (variance / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(sd * re, sd * im)
}

fn dot_t(a: &ChannelVector, b: &nalgebra::DVector<Complex64>) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// One draw with its hidden parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalDraw {
    pub sample: SignalSample,
    /// Information symbol `x ~ CN(0, 1)`.
    pub symbol: Complex64,
    /// `Σ h_rᵀ n_r`.
    pub bob_jamming: Complex64,
    /// `Σ g_rᵀ n_r`.
    pub eve_jamming: Complex64,
    /// `Σ ‖h_r‖·‖n_r‖`, the scale for the nulling residual.
    pub residual_scale: f64,
}

/// Draws one `(y_B, y_E)` pair.
pub fn draw_signals<R: Rng + ?Sized>(
    power: &PowerConfig,
    h_a: Complex64,
    g_a: Complex64,
    channels: &[(ChannelVector, ChannelVector)],
    designs: &[NullSpaceDesign],
    rng: &mut R,
) -> SignalDraw {
    let x = circular(1.0, rng);
    let mut bob_jam = Complex64::new(0.0, 0.0);
    let mut eve_jam = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for ((h, g), d) in channels.iter().zip(designs) {
        let n = sample_noise(d, rng).vector;
        bob_jam += dot_t(h, &n);
        eve_jam += dot_t(g, &n);
        scale += h.norm() * n.norm();
    }
    let n_b = circular(power.noise_floor, rng);
    let n_e = circular(power.noise_floor, rng);
    let s = power.source_power.sqrt();
    SignalDraw {
        sample: SignalSample {
            y_bob: h_a * s * x + bob_jam + n_b,
            y_eve: g_a * s * x + eve_jam + n_e,
        },
        symbol: x,
        bob_jamming: bob_jam,
        eve_jamming: eve_jam,
        residual_scale: scale,
    }
}

/// Simulates reception and measures the jamming power reaching Eve.
///
/// Fails if any sample leaks jamming to Bob beyond [`NULLING_TOLERANCE`].
pub fn simulate_reception<R: Rng + ?Sized>(
    power: &PowerConfig,
    h_a: Complex64,
    g_a: Complex64,
    channels: &[(ChannelVector, ChannelVector)],
    designs: &[NullSpaceDesign],
    n_samples: usize,
    rng: &mut R,
) -> Result<ReceptionStats> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be positive".into()));
    }
    if channels.len() != designs.len() {
        return Err(Error::InvalidParameter(format!(
            "{} channel pairs for {} designs",
            channels.len(),
            designs.len()
        )));
    }
    let s = power.source_power.sqrt();
    let (mut sum, mut sum_sq, mut disturbance, mut worst) = (0.0, 0.0, 0.0, 0.0f64);
    for _ in 0..n_samples {
        let draw = draw_signals(power, h_a, g_a, channels, designs, rng);
        let residual = if draw.residual_scale > 0.0 {
            draw.bob_jamming.norm() / draw.residual_scale
        } else {
            0.0
        };
        if residual > NULLING_TOLERANCE {
            return Err(Error::NullingViolation {
                residual,
                tolerance: NULLING_TOLERANCE,
            });
        }
        worst = worst.max(residual);
        let p = draw.eve_jamming.norm_sqr();
        sum += p;
        sum_sq += p * p;
        disturbance += (draw.sample.y_eve - g_a * s * draw.symbol).norm_sqr();
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
    Ok(ReceptionStats {
        n_samples,
        eve_interference: mean,
        eve_interference_std_err: (var / n).sqrt(),
        eve_disturbance: disturbance / n,
        max_bob_residual: worst,
    })
}
