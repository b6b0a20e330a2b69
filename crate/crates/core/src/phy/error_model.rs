//! AWGN bit and packet error model.
//!
//! Raw bit errors come from the closed-form constellation error rates with the
//! per-subcarrier Es/N0 equal to the link SNR. The decoded error rate is the
//! hard-decision Viterbi union bound over the code's distance spectrum.

use std::f64::consts::SQRT_2;

use super::{check_payload, CodeSpectrum, Mode, Modulation, SpectrumTable};
use crate::error::Result;

/// Gaussian tail probability `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Raw (pre-decoding) bit error probability at `snr_db` for `mode`.
pub fn bit_error_rate(snr_db: f64, mode: Mode) -> f64 {
    let es_n0 = 10f64.powf(snr_db / 10.0);
    let bits = f64::from(mode.modulation().bits_per_subcarrier());
    let eb_n0 = es_n0 / bits;
    match mode.modulation() {
        Modulation::Bpsk | Modulation::Qpsk => q_function((2.0 * eb_n0).sqrt()),
        Modulation::Qam16 | Modulation::Qam64 => {
            let m = f64::from(mode.modulation().order());
            let scale = (4.0 / bits) * (1.0 - 1.0 / m.sqrt());
            scale * q_function((3.0 * bits * eb_n0 / (m - 1.0)).sqrt())
        }
    }
}

fn ln_binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    let mut c = 1.0f64;
    for i in 0..k {
        c = c * f64::from(n - i) / f64::from(i + 1);
    }
    c.ln()
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Natural log of the pairwise error probability of a weight-`d` path.
fn ln_first_event(d: u32, ln_p: f64, ln_q: f64) -> f64 {
    let mut terms = Vec::with_capacity(d as usize / 2 + 2);
    for k in (d / 2 + 1)..=d {
        terms.push(ln_binomial(d, k) + f64::from(k) * ln_p + f64::from(d - k) * ln_q);
    }
    if d % 2 == 0 {
        let h = d / 2;
        terms.push((0.5f64).ln() + ln_binomial(d, h) + f64::from(h) * (ln_p + ln_q));
    }
    log_sum_exp(&terms)
}

/// Probability that hard-decision Viterbi decoding selects a specific
/// weight-`d` error path when raw bits flip with probability `ber`.
pub fn first_event_probability(d: u32, ber: f64) -> f64 {
    if ber <= 0.0 {
        return 0.0;
    }
    ln_first_event(d, ber.ln(), (-ber).ln_1p()).exp()
}

/// Union bound on the decoded first-event error probability, clamped to 1.
pub fn union_bound(ber: f64, spectrum: &CodeSpectrum) -> f64 {
    if ber <= 0.0 {
        return 0.0;
    }
    let (ln_p, ln_q) = (ber.ln(), (-ber).ln_1p());
    let terms: Vec<f64> = spectrum
        .weights()
        .iter()
        .filter(|(_, a)| *a > 0)
        .map(|&(d, a)| (a as f64).ln() + ln_first_event(d, ln_p, ln_q))
        .collect();
    let ln_pu = log_sum_exp(&terms);
    if ln_pu >= 0.0 {
        1.0
    } else {
        ln_pu.exp()
    }
}

/// Probability that a `payload`-octet frame at `mode` is received in error,
/// using the bundled code spectra.
pub fn packet_error_rate(payload: usize, snr_db: f64, mode: Mode) -> Result<f64> {
    packet_error_rate_with(SpectrumTable::bundled(), payload, snr_db, mode)
}

/// [`packet_error_rate`] with an explicit spectrum table.
pub fn packet_error_rate_with(
    table: &SpectrumTable,
    payload: usize,
    snr_db: f64,
    mode: Mode,
) -> Result<f64> {
    check_payload(payload)?;
    let spectrum = table.get(mode.code_rate())?;
    let pu = union_bound(bit_error_rate(snr_db, mode), spectrum);
    if pu >= 1.0 {
        return Ok(1.0);
    }
    let bits = 8.0 * payload as f64;
    Ok(-(bits * (-pu).ln_1p()).exp_m1())
}
