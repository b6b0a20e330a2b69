//! 802.11a DCF transmission-attempt model.
//!
//! A frame is attempted up to `retry_limit` times. Attempt `i` costs a mean
//! backoff and the data airtime; a failed attempt is followed by the ACK
//! timeout window before the next contention, a successful one by
//! SIFS + ACK + DIFS. Attempt outcomes are independent Bernoulli trials with
//! success probability `1 − PER`.

use crate::error::{Error, Result};
use crate::phy::{self, ack_duration_for, packet_error_rate_with, Mode, SpectrumTable};

/// DCF timing and retry parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcfParams {
    /// Slot time (µs).
    pub slot_us: f64,
    /// Short inter-frame space (µs).
    pub sifs_us: f64,
    /// DCF inter-frame space (µs).
    pub difs_us: f64,
    pub cw_min: u32,
    pub cw_max: u32,
    /// Maximum number of transmission attempts per frame.
    pub retry_limit: usize,
}

impl Default for DcfParams {
    fn default() -> Self {
        DcfParams {
            slot_us: 9.0,
            sifs_us: 16.0,
            difs_us: 34.0,
            cw_min: 15,
            cw_max: 1023,
            retry_limit: 7,
        }
    }
}

impl DcfParams {
    pub fn with_retry_limit(self, retry_limit: usize) -> Result<DcfParams> {
        let p = DcfParams { retry_limit, ..self };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.retry_limit < 1 {
            return Err(Error::invalid("retry_limit", "must be at least 1"));
        }
        for (name, cw) in [("cw_min", self.cw_min), ("cw_max", self.cw_max)] {
            if !(cw + 1).is_power_of_two() {
                return Err(Error::invalid(name, format!("{cw} is not of the form 2^k - 1")));
            }
        }
        if self.cw_min >= self.cw_max {
            return Err(Error::invalid("cw_min", "must be below cw_max"));
        }
        for (name, v) in [
            ("slot_us", self.slot_us),
            ("sifs_us", self.sifs_us),
            ("difs_us", self.difs_us),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::invalid(name, "must be a non-negative duration"));
            }
        }
        Ok(())
    }

    fn check_attempt(&self, attempt: usize) -> Result<()> {
        if attempt < 1 || attempt > self.retry_limit {
            return Err(Error::AttemptOutOfRange {
                index: attempt,
                min: 1,
                max: self.retry_limit,
            });
        }
        Ok(())
    }

    /// Contention window before attempt `attempt` (1-based), in slots.
    pub fn contention_window(&self, attempt: usize) -> Result<u32> {
        self.check_attempt(attempt)?;
        Ok(self.window(attempt))
    }

    fn window(&self, attempt: usize) -> u32 {
        let doublings = (attempt - 1).min(31) as u32;
        let grown = u64::from(self.cw_min + 1) << doublings;
        (grown.min(u64::from(self.cw_max) + 1) - 1) as u32
    }
}

/// Mean backoff before attempt `attempt` (µs).
pub fn mean_backoff(attempt: usize, p: &DcfParams) -> Result<f64> {
    Ok(p.slot_us * f64::from(p.contention_window(attempt)?) / 2.0)
}

/// Channel and mode used by each attempt of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct AttemptPlan {
    payload: usize,
    snr_db: Vec<f64>,
    modes: Vec<Mode>,
}

impl AttemptPlan {
    pub fn new(payload: usize, snr_db: Vec<f64>, modes: Vec<Mode>) -> Result<AttemptPlan> {
        phy::check_payload(payload)?;
        if modes.is_empty() {
            return Err(Error::invalid("plan", "needs at least one attempt"));
        }
        if snr_db.len() != modes.len() {
            return Err(Error::invalid(
                "plan",
                format!("{} SNR values for {} modes", snr_db.len(), modes.len()),
            ));
        }
        Ok(AttemptPlan {
            payload,
            snr_db,
            modes,
        })
    }

    /// Same channel and mode on every attempt.
    pub fn constant(payload: usize, snr_db: f64, mode: Mode, attempts: usize) -> Result<AttemptPlan> {
        AttemptPlan::new(payload, vec![snr_db; attempts], vec![mode; attempts])
    }

    pub fn payload(&self) -> usize {
        self.payload
    }

    pub fn snr_db(&self) -> &[f64] {
        &self.snr_db
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    /// Attach per-attempt success probabilities from the bundled PER model.
    pub fn resolve(&self) -> Result<ResolvedPlan> {
        self.resolve_with(SpectrumTable::bundled())
    }

    pub fn resolve_with(&self, table: &SpectrumTable) -> Result<ResolvedPlan> {
        let success = self
            .modes
            .iter()
            .zip(&self.snr_db)
            .map(|(&m, &s)| packet_error_rate_with(table, self.payload, s, m).map(|per| 1.0 - per))
            .collect::<Result<Vec<_>>>()?;
        Ok(ResolvedPlan {
            payload: self.payload,
            modes: self.modes.clone(),
            success,
        })
    }
}

/// An attempt plan with the success probability of every attempt fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedPlan {
    payload: usize,
    modes: Vec<Mode>,
    success: Vec<f64>,
}

impl ResolvedPlan {
    pub fn new(payload: usize, modes: Vec<Mode>, success: Vec<f64>) -> Result<ResolvedPlan> {
        phy::check_payload(payload)?;
        if modes.is_empty() || modes.len() != success.len() {
            return Err(Error::invalid(
                "plan",
                "needs one success probability per attempt and at least one attempt",
            ));
        }
        if let Some(q) = success.iter().find(|q| !(0.0..=1.0).contains(*q)) {
            return Err(Error::invalid("success_probability", format!("{q} is not in [0, 1]")));
        }
        Ok(ResolvedPlan {
            payload,
            modes,
            success,
        })
    }

    pub fn constant(payload: usize, mode: Mode, success: f64, attempts: usize) -> Result<ResolvedPlan> {
        ResolvedPlan::new(payload, vec![mode; attempts], vec![success; attempts])
    }

    pub fn payload(&self) -> usize {
        self.payload
    }

    /// Payload size in bits.
    pub fn payload_bits(&self) -> f64 {
        8.0 * self.payload as f64
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn success_probabilities(&self) -> &[f64] {
        &self.success
    }

    pub fn attempts(&self) -> usize {
        self.modes.len()
    }

    pub(crate) fn check_against(&self, p: &DcfParams) -> Result<()> {
        p.validate()?;
        if self.attempts() != p.retry_limit {
            return Err(Error::invalid(
                "plan",
                format!("{} attempts but retry limit is {}", self.attempts(), p.retry_limit),
            ));
        }
        Ok(())
    }
}

/// Mean wait before attempt `attempt` (µs), for `attempt` in `2..=retry_limit + 1`.
///
/// This is the ACK-timeout window that follows the failed attempt
/// `attempt − 1`: SIFS, the ACK duration at that attempt's response rate, DIFS.
pub fn mean_wait(attempt: usize, modes: &[Mode], p: &DcfParams) -> Result<f64> {
    if attempt < 2 || attempt > p.retry_limit + 1 || attempt > modes.len() + 1 {
        return Err(Error::AttemptOutOfRange {
            index: attempt,
            min: 2,
            max: p.retry_limit + 1,
        });
    }
    Ok(p.sifs_us + ack_duration_for(modes[attempt - 2]) + p.difs_us)
}

/// Distribution of the attempt on which a frame is delivered.
#[derive(Debug, Clone, PartialEq)]
pub struct SuccessDistribution {
    /// Probability that some attempt succeeds.
    pub p_succ: f64,
    /// `p_succ_at_n[n - 1]` is the probability that attempt `n` is the first success.
    pub p_succ_at_n: Vec<f64>,
    /// Probability that every attempt fails.
    pub p_fail: f64,
}

pub fn p_success(plan: &ResolvedPlan) -> SuccessDistribution {
    let mut all_failed = 1.0;
    let mut at_n = Vec::with_capacity(plan.attempts());
    for &q in &plan.success {
        at_n.push(all_failed * q);
        all_failed *= 1.0 - q;
    }
    SuccessDistribution {
        p_succ: 1.0 - all_failed,
        p_succ_at_n: at_n,
        p_fail: all_failed,
    }
}

/// Per-state weights applied to the timeline: 1 for durations, power for energy.
pub(crate) trait StateWeights {
    fn idle(&self) -> f64;
    fn tx(&self, mode: Mode) -> f64;
    fn rx(&self, mode: Mode) -> f64;
}

struct Airtime;

impl StateWeights for Airtime {
    fn idle(&self) -> f64 {
        1.0
    }
    fn tx(&self, _: Mode) -> f64 {
        1.0
    }
    fn rx(&self, _: Mode) -> f64 {
        1.0
    }
}

/// Expected weighted cost of the success and failure branches.
pub(crate) struct BranchCosts {
    pub success: SuccessDistribution,
    /// Conditional on delivery; `None` when delivery is impossible.
    pub succ: Option<f64>,
    pub fail: f64,
}

pub(crate) fn branch_costs(plan: &ResolvedPlan, p: &DcfParams, w: &impl StateWeights) -> Result<BranchCosts> {
    plan.check_against(p)?;
    let idle = w.idle();

    // `prefix` is the cost of attempts 1..n-1 failing, including their timeouts.
    let mut prefix = 0.0;
    let mut fail = 0.0;
    let mut succ_weighted = 0.0;
    let success = p_success(plan);
    for (i, &mode) in plan.modes.iter().enumerate() {
        let backoff = idle * p.slot_us * f64::from(p.window(i + 1)) / 2.0;
        let data = w.tx(mode) * phy::t_data(plan.payload, mode)?;
        let ack = ack_duration_for(mode);
        let timeout = idle * (p.sifs_us + ack + p.difs_us);
        let response = idle * (p.sifs_us + p.difs_us) + w.rx(mode) * ack;

        let through_data = prefix + backoff + data;
        succ_weighted += success.p_succ_at_n[i] * (through_data + response);
        prefix = through_data + timeout;
        fail += backoff + data + timeout;
    }
    let succ = (success.p_succ > 0.0).then(|| succ_weighted / success.p_succ);
    Ok(BranchCosts { success, succ, fail })
}

/// Mean duration of a delivered frame, conditioned on delivery (µs).
pub fn duration_success(plan: &ResolvedPlan, p: &DcfParams) -> Result<f64> {
    branch_costs(plan, p, &Airtime)?
        .succ
        .ok_or(Error::Degenerate("success duration is undefined when delivery probability is 0"))
}

/// Time spent on a frame that exhausts every attempt (µs).
pub fn duration_fail(plan: &ResolvedPlan, p: &DcfParams) -> Result<f64> {
    Ok(branch_costs(plan, p, &Airtime)?.fail)
}

/// Expected effective goodput and its constituent terms.
#[derive(Debug, Clone, PartialEq)]
pub struct GoodputBreakdown {
    pub p_succ: f64,
    pub p_succ_at_n: Vec<f64>,
    /// Conditional mean duration of a delivered frame (µs); `None` if `p_succ == 0`.
    pub d_succ: Option<f64>,
    /// Duration of an undelivered frame (µs).
    pub d_fail: f64,
    /// Expected time spent per frame (µs).
    pub e_d_data: f64,
    /// Expected effective goodput (Mbps).
    pub goodput_mbps: f64,
}

pub fn goodput(plan: &ResolvedPlan, p: &DcfParams) -> Result<GoodputBreakdown> {
    let costs = branch_costs(plan, p, &Airtime)?;
    let p_succ = costs.success.p_succ;
    let e_d_data = match costs.succ {
        Some(d_succ) => (1.0 - p_succ) * costs.fail + p_succ * d_succ,
        None => costs.fail,
    };
    Ok(GoodputBreakdown {
        p_succ,
        p_succ_at_n: costs.success.p_succ_at_n,
        d_succ: costs.succ,
        d_fail: costs.fail,
        e_d_data,
        goodput_mbps: p_succ * plan.payload_bits() / e_d_data,
    })
}
