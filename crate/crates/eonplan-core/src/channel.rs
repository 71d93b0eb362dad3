//! Transponder operating points: `{datarate, modulation}` pairs with the
//! derived symbol rate, channel bandwidth and flex-grid footprint.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::physics::PhyParams;

/// Dual-polarization modulation formats supported by the transponders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Modulation {
    Qpsk,
    Qam8,
    Qam16,
    Qam32,
    Qam64,
}

impl Modulation {
    pub const ALL: [Modulation; 5] = [
        Modulation::Qpsk,
        Modulation::Qam8,
        Modulation::Qam16,
        Modulation::Qam32,
        Modulation::Qam64,
    ];

    pub fn bits_per_symbol(self) -> u32 {
        match self {
            Modulation::Qpsk => 2,
            Modulation::Qam8 => 3,
            Modulation::Qam16 => 4,
            Modulation::Qam32 => 5,
            Modulation::Qam64 => 6,
        }
    }

    pub fn constellation_size(self) -> u32 {
        1 << self.bits_per_symbol()
    }

    pub fn label(self) -> &'static str {
        match self {
            Modulation::Qpsk => "QPSK",
            Modulation::Qam8 => "8QAM",
            Modulation::Qam16 => "16QAM",
            Modulation::Qam32 => "32QAM",
            Modulation::Qam64 => "64QAM",
        }
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One catalog entry. Everything besides `(datarate, modulation, overhead)`
/// is derived at construction time.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    pub datarate_gbps: u32,
    pub modulation: Modulation,
    /// FEC + framing overhead used for this entry.
    pub fec_overhead: f64,
    /// GBd, dual polarization: DR * (1 + OH) / (2 * bits_per_symbol).
    pub symbol_rate_gbd: f64,
    /// GHz, symbol rate widened by the pulse roll-off.
    pub bandwidth_ghz: f64,
    /// Whole 12.5 GHz slots covering the channel.
    pub slot_count: usize,
    pub required_snr_db: f64,
}

impl ChannelConfig {
    pub fn new(
        datarate_gbps: u32,
        modulation: Modulation,
        fec_overhead: f64,
        phy: &PhyParams,
    ) -> Self {
        let symbol_rate_gbd = f64::from(datarate_gbps) * (1.0 + fec_overhead)
            / (2.0 * f64::from(modulation.bits_per_symbol()));
        let bandwidth_ghz = symbol_rate_gbd * (1.0 + phy.rolloff);
        let slot_count = (bandwidth_ghz / phy.slot_width_ghz).ceil() as usize;
        ChannelConfig {
            datarate_gbps,
            modulation,
            fec_overhead,
            symbol_rate_gbd,
            bandwidth_ghz,
            slot_count,
            required_snr_db: phy.required_snr_db(modulation),
        }
    }

    /// Signal bandwidth in Hz used by the noise model.
    pub fn signal_bandwidth_hz(&self) -> f64 {
        self.symbol_rate_gbd * 1e9
    }
}

/// Datarates offered by the transponders: 100-600 Gbps in 50 Gbps steps.
pub const DATARATES_GBPS: [u32; 11] = [100, 150, 200, 250, 300, 350, 400, 450, 500, 550, 600];

/// The full datarate x modulation cross product, sorted by
/// (datarate, modulation order, overhead). Extra overhead values in the
/// physics parameters enlarge the catalog with additional symbol rates.
pub fn generate_configs(phy: &PhyParams) -> Vec<ChannelConfig> {
    let mut overheads = vec![phy.fec_overhead];
    overheads.extend(phy.extra_fec_overheads.iter().copied());
    let mut catalog = Vec::new();
    for &datarate in &DATARATES_GBPS {
        for modulation in Modulation::ALL {
            for &oh in &overheads {
                catalog.push(ChannelConfig::new(datarate, modulation, oh, phy));
            }
        }
    }
    catalog
}
