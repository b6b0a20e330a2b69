//! IEEE 802.11a physical layer.
//!
//! The eight OFDM modes, frame airtimes on the 4 µs symbol grid, the AWGN
//! bit/packet error model behind the frame success probabilities, and the
//! mapping from transmission power to receiver SNR.

mod channel;
mod error_model;
mod spectrum;

use std::fmt;

use crate::error::{Error, Result};

pub use channel::{path_loss, snr_from_txp, ChannelModel, TxPower};
pub use error_model::{
    bit_error_rate, first_event_probability, packet_error_rate, packet_error_rate_with,
    q_function, union_bound,
};
pub use spectrum::{CodeSpectrum, SpectrumTable, SPECTRA_FORMAT};

/// Largest MSDU accepted by [`t_data`] (octets).
pub const MAX_PAYLOAD: usize = 2304;

/// Length of an ACK control frame (octets).
pub const ACK_FRAME_OCTETS: usize = 14;

/// Number of OFDM data subcarriers.
pub const DATA_SUBCARRIERS: u32 = 48;

/// Subcarrier constellation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Modulation {
    Bpsk,
    Qpsk,
    Qam16,
    Qam64,
}

impl Modulation {
    /// Coded bits carried by one subcarrier per symbol.
    pub fn bits_per_subcarrier(self) -> u32 {
        match self {
            Modulation::Bpsk => 1,
            Modulation::Qpsk => 2,
            Modulation::Qam16 => 4,
            Modulation::Qam64 => 6,
        }
    }

    /// Constellation size.
    pub fn order(self) -> u32 {
        1 << self.bits_per_subcarrier()
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Modulation::Bpsk => "BPSK",
            Modulation::Qpsk => "QPSK",
            Modulation::Qam16 => "16-QAM",
            Modulation::Qam64 => "64-QAM",
        };
        f.write_str(s)
    }
}

/// Convolutional code rate after puncturing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CodeRate {
    Half,
    TwoThirds,
    ThreeQuarters,
}

impl CodeRate {
    pub const ALL: [CodeRate; 3] = [CodeRate::Half, CodeRate::TwoThirds, CodeRate::ThreeQuarters];

    pub fn numerator(self) -> u32 {
        match self {
            CodeRate::Half => 1,
            CodeRate::TwoThirds => 2,
            CodeRate::ThreeQuarters => 3,
        }
    }

    pub fn denominator(self) -> u32 {
        match self {
            CodeRate::Half => 2,
            CodeRate::TwoThirds => 3,
            CodeRate::ThreeQuarters => 4,
        }
    }

    /// Free distance of the punctured K=7 code at this rate.
    pub fn free_distance(self) -> u32 {
        match self {
            CodeRate::Half => 10,
            CodeRate::TwoThirds => 6,
            CodeRate::ThreeQuarters => 5,
        }
    }

    pub fn parse(s: &str) -> Option<CodeRate> {
        match s.trim() {
            "1/2" => Some(CodeRate::Half),
            "2/3" => Some(CodeRate::TwoThirds),
            "3/4" => Some(CodeRate::ThreeQuarters),
            _ => None,
        }
    }
}

impl fmt::Display for CodeRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator(), self.denominator())
    }
}

/// One of the eight 802.11a PHY modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mode {
    index: u8,
    rate_mbps: u32,
    modulation: Modulation,
    code_rate: CodeRate,
    data_bits_per_symbol: u32,
}

const fn mode(
    index: u8,
    rate_mbps: u32,
    modulation: Modulation,
    code_rate: CodeRate,
    data_bits_per_symbol: u32,
) -> Mode {
    Mode {
        index,
        rate_mbps,
        modulation,
        code_rate,
        data_bits_per_symbol,
    }
}

static MODES: [Mode; 8] = [
    mode(1, 6, Modulation::Bpsk, CodeRate::Half, 24),
    mode(2, 9, Modulation::Bpsk, CodeRate::ThreeQuarters, 36),
    mode(3, 12, Modulation::Qpsk, CodeRate::Half, 48),
    mode(4, 18, Modulation::Qpsk, CodeRate::ThreeQuarters, 72),
    mode(5, 24, Modulation::Qam16, CodeRate::Half, 96),
    mode(6, 36, Modulation::Qam16, CodeRate::ThreeQuarters, 144),
    mode(7, 48, Modulation::Qam64, CodeRate::TwoThirds, 192),
    mode(8, 54, Modulation::Qam64, CodeRate::ThreeQuarters, 216),
];

impl Mode {
    /// All modes in increasing rate order.
    pub fn all() -> &'static [Mode; 8] {
        &MODES
    }

    pub fn from_index(index: u8) -> Result<Mode> {
        match index {
            1..=8 => Ok(MODES[usize::from(index - 1)]),
            _ => Err(Error::UnknownMode(index)),
        }
    }

    /// Mode with the given nominal rate, if any.
    pub fn from_rate(rate_mbps: u32) -> Option<Mode> {
        MODES.iter().copied().find(|m| m.rate_mbps == rate_mbps)
    }

    pub fn index(self) -> u8 {
        self.index
    }

    /// Nominal data rate (Mbps).
    pub fn rate_mbps(self) -> u32 {
        self.rate_mbps
    }

    pub fn modulation(self) -> Modulation {
        self.modulation
    }

    pub fn code_rate(self) -> CodeRate {
        self.code_rate
    }

    /// Data bits per OFDM symbol (N_DBPS).
    pub fn data_bits_per_symbol(self) -> u32 {
        self.data_bits_per_symbol
    }

    /// Whether this is one of the mandatory rates used for control responses.
    pub fn is_mandatory(self) -> bool {
        matches!(self.index, 1 | 3 | 5)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "mode {} ({} Mbps, {} {})",
            self.index, self.rate_mbps, self.modulation, self.code_rate
        )
    }
}

/// OFDM frame timing constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfdmTiming {
    /// PLCP preamble (µs).
    pub preamble_us: f64,
    /// SIGNAL field (µs).
    pub signal_us: f64,
    /// OFDM symbol duration (µs).
    pub symbol_us: f64,
    pub service_bits: u32,
    pub tail_bits: u32,
}

impl OfdmTiming {
    pub const IEEE_802_11A: OfdmTiming = OfdmTiming {
        preamble_us: 16.0,
        signal_us: 4.0,
        symbol_us: 4.0,
        service_bits: 16,
        tail_bits: 6,
    };

    /// Only the 802.11a values are accepted.
    pub fn new(
        preamble_us: f64,
        signal_us: f64,
        symbol_us: f64,
        service_bits: u32,
        tail_bits: u32,
    ) -> Result<OfdmTiming> {
        let t = OfdmTiming {
            preamble_us,
            signal_us,
            symbol_us,
            service_bits,
            tail_bits,
        };
        if t != Self::IEEE_802_11A {
            return Err(Error::invalid(
                "ofdm_timing",
                "only the 802.11a constants (16/4/4 µs, 16 service bits, 6 tail bits) are supported",
            ));
        }
        Ok(t)
    }

    /// Number of OFDM data symbols needed for `payload` octets at `mode`.
    pub fn symbols(&self, payload: usize, mode: Mode) -> u64 {
        let bits = u64::from(self.service_bits + self.tail_bits) + 8 * payload as u64;
        bits.div_ceil(u64::from(mode.data_bits_per_symbol))
    }

    fn airtime(&self, payload: usize, mode: Mode) -> f64 {
        self.preamble_us + self.signal_us + self.symbol_us * self.symbols(payload, mode) as f64
    }
}

impl Default for OfdmTiming {
    fn default() -> Self {
        Self::IEEE_802_11A
    }
}

pub(crate) fn check_payload(payload: usize) -> Result<()> {
    if payload == 0 || payload > MAX_PAYLOAD {
        return Err(Error::InvalidPayload(payload));
    }
    Ok(())
}

/// Airtime of a data frame carrying `payload` octets at `mode` (µs).
pub fn t_data(payload: usize, mode: Mode) -> Result<f64> {
    check_payload(payload)?;
    Ok(OfdmTiming::IEEE_802_11A.airtime(payload, mode))
}

/// Airtime of an ACK sent at the mandatory rate `ack_mode` (µs).
pub fn t_ack(ack_mode: Mode) -> Result<f64> {
    if !ack_mode.is_mandatory() {
        return Err(Error::NonMandatoryAckMode(ack_mode.index()));
    }
    Ok(OfdmTiming::IEEE_802_11A.airtime(ACK_FRAME_OCTETS, ack_mode))
}

/// Control-response mode for a data frame sent at `data_mode`: the highest
/// mandatory rate not above the data rate.
pub fn ack_mode_for(data_mode: Mode) -> Mode {
    MODES
        .iter()
        .rev()
        .copied()
        .find(|m| m.is_mandatory() && m.rate_mbps <= data_mode.rate_mbps)
        .unwrap_or(MODES[0])
}

/// ACK airtime for a data frame sent at `data_mode` (µs).
pub fn ack_duration_for(data_mode: Mode) -> f64 {
    OfdmTiming::IEEE_802_11A.airtime(ACK_FRAME_OCTETS, ack_mode_for(data_mode))
}
