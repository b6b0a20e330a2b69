//! Per-frame energy accounting.
//!
//! The DCF timeline is weighted by device power: idle intervals (backoff,
//! waits, SIFS, DIFS) by `rho_id`, data airtime by `rho_tx(MCS, TXP)` and ACK
//! reception by `rho_rx(MCS)`. A per-frame generation toll `gamma_xg` is added
//! on top. The reception toll `gamma_xr` only enters the average-power model:
//! ACKs are handled inside the wireless card.

use std::fmt::Write as _;
use std::path::Path;

use crate::dcf::{branch_costs, DcfParams, ResolvedPlan, StateWeights};
use crate::error::{Error, Result};
use crate::kv::KvRecords;
use crate::phy::{Mode, TxPower};

/// Transmit power model `alpha0 + alpha1·MCS + alpha2·TXP`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TxPowerModel {
    /// Intercept (W).
    pub alpha0_w: f64,
    /// W per Mbps.
    pub alpha1_w_per_mbps: f64,
    /// W per mW of transmission power.
    pub alpha2_w_per_mw: f64,
}

/// Receive power model `beta0 + beta1·MCS`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RxPowerModel {
    /// Intercept (W).
    pub beta0_w: f64,
    /// W per Mbps.
    pub beta1_w_per_mbps: f64,
}

/// Lowest and highest MCS covered by the power models (Mbps).
pub const MCS_RANGE_MBPS: (f64, f64) = (6.0, 54.0);
/// TXP range over which the power models must stay positive (mW).
pub const TXP_RANGE_MW: (f64, f64) = (1.0, 1000.0);

/// Energy parameters of one device.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceProfile {
    pub name: String,
    /// Idle power (W).
    pub rho_id_w: f64,
    /// Per-frame generation toll (mJ).
    pub gamma_xg_mj: f64,
    /// Per-frame reception toll (mJ).
    pub gamma_xr_mj: f64,
    pub tx: TxPowerModel,
    pub rx: RxPowerModel,
    /// `rho_id_w` and `gamma_xg_mj` are stand-in values, not measurements.
    pub placeholder_constants: bool,
}

const PROFILE_KEYS: [&str; 9] = [
    "name",
    "rho_id_w",
    "gamma_xg_mj",
    "gamma_xr_mj",
    "alpha0_w",
    "alpha1_w_per_mbps",
    "alpha2_w_per_mw",
    "beta0_w",
    "beta1_w_per_mbps",
];

impl DeviceProfile {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho_id_w > 0.0) {
            return Err(Error::invalid("rho_id_w", "must be positive"));
        }
        if !(self.gamma_xg_mj >= 0.0) {
            return Err(Error::invalid("gamma_xg_mj", "must be non-negative"));
        }
        if !(self.gamma_xr_mj >= 0.0) {
            return Err(Error::invalid("gamma_xr_mj", "must be non-negative"));
        }
        // Both models are affine, so positivity at the corners covers the box.
        let (lo_mcs, hi_mcs) = MCS_RANGE_MBPS;
        let (lo_txp, hi_txp) = TXP_RANGE_MW;
        for mcs in [lo_mcs, hi_mcs] {
            for txp in [lo_txp, hi_txp] {
                let p = self.tx_power_w(mcs, txp);
                if !(p > 0.0) {
                    return Err(Error::invalid(
                        "alpha0_w",
                        format!("transmit power {p} W is not positive at {mcs} Mbps, {txp} mW"),
                    ));
                }
            }
            let p = self.rx_power_w(mcs);
            if !(p > 0.0) {
                return Err(Error::invalid(
                    "beta0_w",
                    format!("receive power {p} W is not positive at {mcs} Mbps"),
                ));
            }
        }
        Ok(())
    }

    fn tx_power_w(&self, mcs_mbps: f64, txp_mw: f64) -> f64 {
        self.tx.alpha0_w + self.tx.alpha1_w_per_mbps * mcs_mbps + self.tx.alpha2_w_per_mw * txp_mw
    }

    fn rx_power_w(&self, mcs_mbps: f64) -> f64 {
        self.rx.beta0_w + self.rx.beta1_w_per_mbps * mcs_mbps
    }

    /// Parse a profile file. Every key is required and unknown keys are rejected.
    pub fn parse(text: &str, source_name: &str) -> Result<DeviceProfile> {
        let kv = KvRecords::parse(text, source_name, &PROFILE_KEYS)?;
        let profile = DeviceProfile {
            name: kv.require("name")?.to_string(),
            rho_id_w: kv.require_f64("rho_id_w")?,
            gamma_xg_mj: kv.require_f64("gamma_xg_mj")?,
            gamma_xr_mj: kv.require_f64("gamma_xr_mj")?,
            tx: TxPowerModel {
                alpha0_w: kv.require_f64("alpha0_w")?,
                alpha1_w_per_mbps: kv.require_f64("alpha1_w_per_mbps")?,
                alpha2_w_per_mw: kv.require_f64("alpha2_w_per_mw")?,
            },
            rx: RxPowerModel {
                beta0_w: kv.require_f64("beta0_w")?,
                beta1_w_per_mbps: kv.require_f64("beta1_w_per_mbps")?,
            },
            placeholder_constants: false,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<DeviceProfile> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Render in the profile file format.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        if self.placeholder_constants {
            out.push_str("# rho_id_w and gamma_xg_mj are placeholders, not measured values\n");
        }
        let _ = writeln!(out, "name = {}", self.name);
        let values = [
            ("rho_id_w", self.rho_id_w),
            ("gamma_xg_mj", self.gamma_xg_mj),
            ("gamma_xr_mj", self.gamma_xr_mj),
            ("alpha0_w", self.tx.alpha0_w),
            ("alpha1_w_per_mbps", self.tx.alpha1_w_per_mbps),
            ("alpha2_w_per_mw", self.tx.alpha2_w_per_mw),
            ("beta0_w", self.rx.beta0_w),
            ("beta1_w_per_mbps", self.rx.beta1_w_per_mbps),
        ];
        for (k, v) in values {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// Copy of this profile with one energy parameter multiplied by `factor`.
    pub fn scaled(&self, parameter: EnergyParameter, factor: f64) -> Result<DeviceProfile> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::invalid("factor", format!("must be positive, got {factor}")));
        }
        let mut p = self.clone();
        match parameter {
            EnergyParameter::RhoId => p.rho_id_w *= factor,
            EnergyParameter::RhoTx => {
                p.tx.alpha0_w *= factor;
                p.tx.alpha1_w_per_mbps *= factor;
                p.tx.alpha2_w_per_mw *= factor;
            }
            EnergyParameter::RhoRx => {
                p.rx.beta0_w *= factor;
                p.rx.beta1_w_per_mbps *= factor;
            }
            EnergyParameter::GammaXg => p.gamma_xg_mj *= factor,
        }
        Ok(p)
    }
}

/// Energy parameters that can be scaled in a sensitivity study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnergyParameter {
    RhoId,
    RhoTx,
    RhoRx,
    GammaXg,
}

impl EnergyParameter {
    pub const ALL: [EnergyParameter; 4] = [
        EnergyParameter::RhoId,
        EnergyParameter::RhoTx,
        EnergyParameter::RhoRx,
        EnergyParameter::GammaXg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EnergyParameter::RhoId => "rho_id",
            EnergyParameter::RhoTx => "rho_tx",
            EnergyParameter::RhoRx => "rho_rx",
            EnergyParameter::GammaXg => "gamma_xg",
        }
    }

    pub fn parse(s: &str) -> Option<EnergyParameter> {
        Self::ALL.into_iter().find(|p| p.name() == s)
    }
}

fn check_mcs(mcs_mbps: f64) -> Result<()> {
    let (lo, hi) = MCS_RANGE_MBPS;
    if !(lo..=hi).contains(&mcs_mbps) {
        return Err(Error::invalid("mcs", format!("{mcs_mbps} Mbps outside {lo}..={hi}")));
    }
    Ok(())
}

/// Transmit power draw (W) at `mcs_mbps` and `txp`.
pub fn rho_tx(profile: &DeviceProfile, mcs_mbps: f64, txp: TxPower) -> Result<f64> {
    check_mcs(mcs_mbps)?;
    Ok(profile.tx_power_w(mcs_mbps, txp.mw()))
}

/// Receive power draw (W) at `mcs_mbps`.
pub fn rho_rx(profile: &DeviceProfile, mcs_mbps: f64) -> Result<f64> {
    check_mcs(mcs_mbps)?;
    Ok(profile.rx_power_w(mcs_mbps))
}

struct PowerWeights<'a> {
    profile: &'a DeviceProfile,
    txp_mw: f64,
}

impl StateWeights for PowerWeights<'_> {
    fn idle(&self) -> f64 {
        self.profile.rho_id_w
    }

    fn tx(&self, mode: Mode) -> f64 {
        self.profile.tx_power_w(f64::from(mode.rate_mbps()), self.txp_mw)
    }

    // The ACK is received while the session MCS is the data mode's.
    fn rx(&self, mode: Mode) -> f64 {
        self.profile.rx_power_w(f64::from(mode.rate_mbps()))
    }
}

const UJ_TO_MJ: f64 = 1e-3;

/// Mean energy of a delivered frame, conditioned on delivery (mJ).
pub fn energy_success(
    plan: &ResolvedPlan,
    p: &DcfParams,
    profile: &DeviceProfile,
    txp: TxPower,
) -> Result<f64> {
    let w = PowerWeights {
        profile,
        txp_mw: txp.mw(),
    };
    branch_costs(plan, p, &w)?
        .succ
        .map(|uj| uj * UJ_TO_MJ)
        .ok_or(Error::Degenerate("success energy is undefined when delivery probability is 0"))
}

/// Energy spent on a frame that exhausts every attempt (mJ).
pub fn energy_fail(
    plan: &ResolvedPlan,
    p: &DcfParams,
    profile: &DeviceProfile,
    txp: TxPower,
) -> Result<f64> {
    let w = PowerWeights {
        profile,
        txp_mw: txp.mw(),
    };
    Ok(branch_costs(plan, p, &w)?.fail * UJ_TO_MJ)
}

/// Expected per-frame energy and the resulting efficiency.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyBreakdown {
    pub p_succ: f64,
    /// Conditional energy of a delivered frame (mJ); `None` if `p_succ == 0`.
    pub e_succ_mj: Option<f64>,
    /// Energy of an undelivered frame (mJ).
    pub e_fail_mj: f64,
    /// Expected energy per frame including the generation toll (mJ).
    pub e_frame_mj: f64,
    /// Expected delivered bits per Joule.
    pub efficiency_bpj: f64,
}

pub fn energy_per_frame(
    plan: &ResolvedPlan,
    p: &DcfParams,
    profile: &DeviceProfile,
    txp: TxPower,
) -> Result<EnergyBreakdown> {
    profile.validate()?;
    let w = PowerWeights {
        profile,
        txp_mw: txp.mw(),
    };
    let costs = branch_costs(plan, p, &w)?;
    let p_succ = costs.success.p_succ;
    let e_fail_mj = costs.fail * UJ_TO_MJ;
    let e_succ_mj = costs.succ.map(|uj| uj * UJ_TO_MJ);
    let e_frame_mj = profile.gamma_xg_mj
        + match e_succ_mj {
            Some(e_succ) => (1.0 - p_succ) * e_fail_mj + p_succ * e_succ,
            None => e_fail_mj,
        };
    Ok(EnergyBreakdown {
        p_succ,
        e_succ_mj,
        e_fail_mj,
        e_frame_mj,
        efficiency_bpj: p_succ * plan.payload_bits() / (e_frame_mj * 1e-3),
    })
}

/// Traffic-dependent inputs of the average-power model.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrafficLoad {
    /// Fraction of airtime spent transmitting.
    pub tau_tx: f64,
    /// Fraction of airtime spent receiving.
    pub tau_rx: f64,
    /// Frames generated per second.
    pub lambda_g: f64,
    /// Frames received per second.
    pub lambda_r: f64,
}

impl TrafficLoad {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tau_tx", self.tau_tx),
            ("tau_rx", self.tau_rx),
            ("lambda_g", self.lambda_g),
            ("lambda_r", self.lambda_r),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::invalid(name, "must be non-negative"));
            }
        }
        if self.tau_tx + self.tau_rx > 1.0 {
            return Err(Error::invalid("tau_tx", "airtime fractions exceed 1"));
        }
        Ok(())
    }
}

/// Average device power (W) under `load`.
pub fn average_power(
    profile: &DeviceProfile,
    load: &TrafficLoad,
    mcs_mbps: f64,
    txp: TxPower,
) -> Result<f64> {
    load.validate()?;
    let tx = rho_tx(profile, mcs_mbps, txp)?;
    let rx = rho_rx(profile, mcs_mbps)?;
    Ok(profile.rho_id_w
        + tx * load.tau_tx
        + rx * load.tau_rx
        + profile.gamma_xg_mj * 1e-3 * load.lambda_g
        + profile.gamma_xr_mj * 1e-3 * load.lambda_r)
}
