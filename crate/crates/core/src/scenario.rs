//! Link scenarios: channel, payload, MAC parameters and the TXP sweep range.

use std::path::Path;

use crate::dcf::DcfParams;
use crate::error::{Error, Result};
use crate::kv::KvRecords;
use crate::phy::{self, ChannelModel, TxPower};

/// Inclusive TXP range in dBm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TxpRange {
    pub min_dbm: f64,
    pub max_dbm: f64,
    pub step_db: f64,
}

impl Default for TxpRange {
    fn default() -> Self {
        TxpRange {
            min_dbm: 0.0,
            max_dbm: 30.0,
            step_db: 0.1,
        }
    }
}

/// Static single-link setting shared by every sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkScenario {
    pub channel: ChannelModel,
    pub payload: usize,
    pub dcf: DcfParams,
    pub txp_range: TxpRange,
}

impl Default for LinkScenario {
    fn default() -> Self {
        LinkScenario {
            channel: ChannelModel::default(),
            payload: 1500,
            dcf: DcfParams::default(),
            txp_range: TxpRange::default(),
        }
    }
}

const SCENARIO_KEYS: [&str; 8] = [
    "noise_floor_dbm",
    "frequency_mhz",
    "distance_m",
    "payload_octets",
    "retry_limit",
    "txp_min_dbm",
    "txp_max_dbm",
    "txp_step_db",
];

impl LinkScenario {
    pub fn validate(&self) -> Result<()> {
        phy::check_payload(self.payload)?;
        self.dcf.validate()?;
        phy::path_loss(&self.channel)?;
        let r = self.txp_range;
        if !(r.step_db > 0.0) || !r.step_db.is_finite() {
            return Err(Error::invalid("txp_step_db", "must be positive"));
        }
        if !(r.min_dbm <= r.max_dbm) || !r.max_dbm.is_finite() || !r.min_dbm.is_finite() {
            return Err(Error::invalid("txp_max_dbm", "range is empty"));
        }
        Ok(())
    }

    /// Parse a scenario file. Missing keys take the default scenario's values.
    pub fn parse(text: &str, source_name: &str) -> Result<LinkScenario> {
        let kv = KvRecords::parse(text, source_name, &SCENARIO_KEYS)?;
        let d = LinkScenario::default();
        let ch = d.channel;
        let channel = ChannelModel::new(
            kv.f64_or("noise_floor_dbm", ch.noise_floor_dbm())?,
            kv.f64_or("frequency_mhz", ch.frequency_mhz())?,
            kv.f64_or("distance_m", ch.distance_m())?,
            ch.distance_power_coefficient(),
            ch.floor_penetration_db(),
        )?;
        let scenario = LinkScenario {
            channel,
            payload: kv.usize_or("payload_octets", d.payload)?,
            dcf: d.dcf.with_retry_limit(kv.usize_or("retry_limit", d.dcf.retry_limit)?)?,
            txp_range: TxpRange {
                min_dbm: kv.f64_or("txp_min_dbm", d.txp_range.min_dbm)?,
                max_dbm: kv.f64_or("txp_max_dbm", d.txp_range.max_dbm)?,
                step_db: kv.f64_or("txp_step_db", d.txp_range.step_db)?,
            },
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<LinkScenario> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Path loss plus noise floor: `snr = txp − link_budget_db`.
    pub fn link_budget_db(&self) -> Result<f64> {
        Ok(phy::path_loss(&self.channel)? + self.channel.noise_floor_dbm())
    }

    pub fn snr_at(&self, txp: TxPower) -> Result<f64> {
        phy::snr_from_txp(txp.dbm(), &self.channel)
    }

    /// Transmission power that yields `snr_db` at the receiver.
    pub fn txp_for_snr(&self, snr_db: f64) -> Result<TxPower> {
        Ok(TxPower::from_dbm(snr_db + self.link_budget_db()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let s = LinkScenario::parse("", "s").unwrap();
        assert_eq!(s, LinkScenario::default());
        let text = "distance_m = 9\npayload_octets = 500 # short\nretry_limit = 4\ntxp_step_db = 0.5\n";
        let s = LinkScenario::parse(text, "s").unwrap();
        assert_eq!(s.channel.distance_m(), 9.0);
        assert_eq!(s.payload, 500);
        assert_eq!(s.dcf.retry_limit, 4);
        assert_eq!(s.txp_range.step_db, 0.5);
    }

    #[test]
    fn shipped_scenario_is_the_default() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/scenarios/default.scenario");
        assert_eq!(LinkScenario::load(path).unwrap(), LinkScenario::default());
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(LinkScenario::parse("colour = red", "s"), Err(Error::Parse { line: 1, .. })));
        assert!(LinkScenario::parse("payload_octets = 0", "s").is_err());
        assert!(LinkScenario::parse("payload_octets = -3", "s").is_err());
        assert!(LinkScenario::parse("txp_step_db = 0", "s").is_err());
        assert!(LinkScenario::parse("txp_min_dbm = 10\ntxp_max_dbm = 5", "s").is_err());
        assert!(LinkScenario::parse("distance_m = 0.5", "s").is_err());
        let e = LinkScenario::parse("retry_limit = 0", "s").unwrap_err();
        assert!(e.to_string().contains("retry_limit"), "{e}");
    }

    #[test]
    fn txp_snr_round_trip() {
        let s = LinkScenario::default();
        for snr in [-5.0, 0.0, 12.5, 35.0] {
            let txp = s.txp_for_snr(snr).unwrap();
            assert!((s.snr_at(txp).unwrap() - snr).abs() < 1e-12);
        }
        assert!((s.link_budget_db().unwrap() - 0.23).abs() < 0.01);
    }
}
