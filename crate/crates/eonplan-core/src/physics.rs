//! Physical-layer feasibility: incoherent Gaussian-noise nonlinearity,
//! amplifier ASE noise and the resulting GSNR filter over the channel
//! catalog.
//!
//! Nonlinear interference is summed span by span as a power-independent
//! coefficient `eta` with NLI power `eta * P^3`; launch power sits at the
//! per-channel optimum `(P_ase / (2 * eta))^(1/3)`.

use std::path::Path;

use serde::Deserialize;

use crate::channel::{ChannelConfig, Modulation};
use crate::error::{Error, Result};
use crate::topology::Span;

const PLANCK_J_S: f64 = 6.62607015e-34;
const LN10: f64 = std::f64::consts::LN_10;

/// Required SNR per modulation at the FEC limit (pre-FEC BER 2.4e-2),
/// derived from the square/cross-constellation BER approximations.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct RequiredSnrDb {
    pub qpsk: f64,
    pub qam8: f64,
    pub qam16: f64,
    pub qam32: f64,
    pub qam64: f64,
}

impl Default for RequiredSnrDb {
    fn default() -> Self {
        RequiredSnrDb {
            qpsk: 5.921752,
            qam8: 9.443577,
            qam16: 12.343363,
            qam32: 15.207311,
            qam64: 18.021065,
        }
    }
}

/// Fiber constants, grid geometry and the feasibility margin. Everything is
/// overridable through a JSON file (`--phy-config`); span length, loss and
/// amplifier noise figure come from the topology file instead.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default)]
pub struct PhyParams {
    pub slot_width_ghz: f64,
    pub slots_per_fiber: usize,
    pub rolloff: f64,
    pub fec_overhead: f64,
    pub extra_fec_overheads: Vec<f64>,
    /// |beta2| group velocity dispersion, ps^2/km.
    pub beta2_ps2_per_km: f64,
    /// Kerr nonlinearity, 1/W/km.
    pub gamma_nl_per_w_km: f64,
    pub center_frequency_thz: f64,
    pub snr_margin_db: f64,
    pub required_snr: RequiredSnrDb,
}

impl Default for PhyParams {
    fn default() -> Self {
        PhyParams {
            slot_width_ghz: 12.5,
            slots_per_fiber: 384,
            rolloff: 0.1,
            fec_overhead: 0.28,
            extra_fec_overheads: Vec::new(),
            beta2_ps2_per_km: 21.7,
            gamma_nl_per_w_km: 1.3,
            center_frequency_thz: 193.4,
            snr_margin_db: 0.0,
            required_snr: RequiredSnrDb::default(),
        }
    }
}

impl PhyParams {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn required_snr_db(&self, modulation: Modulation) -> f64 {
        match modulation {
            Modulation::Qpsk => self.required_snr.qpsk,
            Modulation::Qam8 => self.required_snr.qam8,
            Modulation::Qam16 => self.required_snr.qam16,
            Modulation::Qam32 => self.required_snr.qam32,
            Modulation::Qam64 => self.required_snr.qam64,
        }
    }

    /// Single-span nonlinearity coefficient at signal bandwidth `b_hz`.
    fn span_eta(&self, span: &Span, b_hz: f64) -> f64 {
        // power attenuation coefficient, 1/m
        let alpha = span.loss_db_per_km * LN10 / 10.0 / 1000.0;
        let length_m = span.length_km * 1000.0;
        let l_eff = (1.0 - (-alpha * length_m).exp()) / alpha;
        let l_asym = 1.0 / alpha;
        let beta2 = self.beta2_ps2_per_km * 1e-27; // s^2/m
        let gamma = self.gamma_nl_per_w_km * 1e-3; // 1/W/m
        let num = (8.0 / 27.0)
            * gamma.powi(2)
            * l_eff.powi(2)
            * (std::f64::consts::PI.powi(2) * beta2 * l_asym * b_hz.powi(2) / 2.0).asinh();
        let den = std::f64::consts::PI * beta2 * b_hz.powi(2) * l_asym;
        num / den
    }

    /// ASE noise power of one span's amplifier in the signal bandwidth; the
    /// gain exactly compensates the span loss.
    fn span_ase_w(&self, span: &Span, b_hz: f64) -> f64 {
        let gain = 10f64.powf(span.loss_db() / 10.0);
        let noise_factor = 10f64.powf(span.nf_db / 10.0);
        (gain - 1.0) * noise_factor * PLANCK_J_S * (self.center_frequency_thz * 1e12) * b_hz
    }

    /// Power-independent NLI coefficient of a path, 1/W^2. Incoherent
    /// accumulation: a plain sum over spans.
    pub fn eta_nli(&self, spans: &[Span], config: &ChannelConfig) -> Result<f64> {
        if spans.is_empty() {
            return Err(Error::EmptyPath);
        }
        let b_hz = config.signal_bandwidth_hz();
        if b_hz <= 0.0 {
            return Err(Error::ZeroBandwidth);
        }
        Ok(spans.iter().map(|s| self.span_eta(s, b_hz)).sum())
    }

    /// Total amplifier noise power over a path, W.
    pub fn ase_power_w(&self, spans: &[Span], config: &ChannelConfig) -> Result<f64> {
        if spans.is_empty() {
            return Err(Error::EmptyPath);
        }
        let b_hz = config.signal_bandwidth_hz();
        if b_hz <= 0.0 {
            return Err(Error::ZeroBandwidth);
        }
        Ok(spans.iter().map(|s| self.span_ase_w(s, b_hz)).sum())
    }

    /// GSNR in dB at the GN-optimal launch power.
    pub fn gsnr_db(&self, spans: &[Span], config: &ChannelConfig) -> Result<f64> {
        Ok(PathMetrics::compute(self, spans, config)?.gsnr_db)
    }

    /// Catalog entries whose GSNR on the path clears the required SNR plus
    /// margin.
    pub fn valid_configs(&self, spans: &[Span], catalog: &[ChannelConfig]) -> Vec<ChannelConfig> {
        self.valid_config_indices(spans, catalog)
            .into_iter()
            .map(|i| catalog[i].clone())
            .collect()
    }

    /// Indices into `catalog` of the configs feasible on the path.
    pub fn valid_config_indices(&self, spans: &[Span], catalog: &[ChannelConfig]) -> Vec<usize> {
        catalog
            .iter()
            .enumerate()
            .filter(|(_, cfg)| {
                self.gsnr_db(spans, cfg)
                    .map(|gsnr| gsnr >= cfg.required_snr_db + self.snr_margin_db)
                    .unwrap_or(false)
            })
            .map(|(i, _)| i)
            .collect()
    }
}

/// Noise budget of one channel on one path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathMetrics {
    pub total_length_km: f64,
    pub eta_nli: f64,
    pub ase_power_w: f64,
    pub launch_power_w: f64,
    pub gsnr_db: f64,
}

impl PathMetrics {
    pub fn compute(phy: &PhyParams, spans: &[Span], config: &ChannelConfig) -> Result<Self> {
        let eta_nli = phy.eta_nli(spans, config)?;
        let ase_power_w = phy.ase_power_w(spans, config)?;
        let launch_power_w = (ase_power_w / (2.0 * eta_nli)).powf(1.0 / 3.0);
        let gsnr = launch_power_w / (ase_power_w + eta_nli * launch_power_w.powi(3));
        Ok(PathMetrics {
            total_length_km: spans.iter().map(|s| s.length_km).sum(),
            eta_nli,
            ase_power_w,
            launch_power_w,
            gsnr_db: 10.0 * gsnr.log10(),
        })
    }
}
