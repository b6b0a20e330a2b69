use crate::error::{Error, Result};

/// Transmission power.
///
/// Radio configuration and channel math use dBm while the transmit power
/// model is fitted in mW; this type is the single conversion point.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct TxPower {
    dbm: f64,
}

impl TxPower {
    pub fn from_dbm(dbm: f64) -> TxPower {
        TxPower { dbm }
    }

    pub fn from_mw(mw: f64) -> Result<TxPower> {
        if !(mw > 0.0) || !mw.is_finite() {
            return Err(Error::invalid("txp_mw", format!("must be positive, got {mw}")));
        }
        Ok(TxPower {
            dbm: 10.0 * mw.log10(),
        })
    }

    pub fn dbm(self) -> f64 {
        self.dbm
    }

    pub fn mw(self) -> f64 {
        10f64.powf(self.dbm / 10.0)
    }
}

/// Static indoor link: noise floor plus ITU indoor path-loss inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    noise_floor_dbm: f64,
    frequency_mhz: f64,
    distance_m: f64,
    distance_power_coefficient: f64,
    floor_penetration_db: f64,
}

impl ChannelModel {
    pub fn new(
        noise_floor_dbm: f64,
        frequency_mhz: f64,
        distance_m: f64,
        distance_power_coefficient: f64,
        floor_penetration_db: f64,
    ) -> Result<ChannelModel> {
        if !(frequency_mhz > 0.0) {
            return Err(Error::invalid("frequency_mhz", "must be positive"));
        }
        if !(distance_m > 0.0) {
            return Err(Error::invalid("distance_m", "must be positive"));
        }
        for (name, v) in [
            ("noise_floor_dbm", noise_floor_dbm),
            ("distance_power_coefficient", distance_power_coefficient),
            ("floor_penetration_db", floor_penetration_db),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        Ok(ChannelModel {
            noise_floor_dbm,
            frequency_mhz,
            distance_m,
            distance_power_coefficient,
            floor_penetration_db,
        })
    }

    pub fn noise_floor_dbm(&self) -> f64 {
        self.noise_floor_dbm
    }

    pub fn frequency_mhz(&self) -> f64 {
        self.frequency_mhz
    }

    pub fn distance_m(&self) -> f64 {
        self.distance_m
    }

    pub fn distance_power_coefficient(&self) -> f64 {
        self.distance_power_coefficient
    }

    pub fn floor_penetration_db(&self) -> f64 {
        self.floor_penetration_db
    }
}

impl Default for ChannelModel {
    /// Office link at 5.2 GHz over 18 m with a −85 dBm noise floor.
    fn default() -> Self {
        ChannelModel {
            noise_floor_dbm: -85.0,
            frequency_mhz: 5200.0,
            distance_m: 18.0,
            distance_power_coefficient: 31.0,
            floor_penetration_db: 0.0,
        }
    }
}

/// ITU indoor path loss (dB). Defined for distances of at least 1 m.
pub fn path_loss(ch: &ChannelModel) -> Result<f64> {
    if ch.distance_m < 1.0 {
        return Err(Error::invalid(
            "distance_m",
            format!("indoor path-loss model needs distance >= 1 m, got {}", ch.distance_m),
        ));
    }
    Ok(20.0 * ch.frequency_mhz.log10()
        + ch.distance_power_coefficient * ch.distance_m.log10()
        + ch.floor_penetration_db
        - 28.0)
}

/// Receiver SNR (dB) for a transmission power in dBm.
pub fn snr_from_txp(txp_dbm: f64, ch: &ChannelModel) -> Result<f64> {
    Ok(txp_dbm - path_loss(ch)? - ch.noise_floor_dbm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_path_loss() {
        let l = path_loss(&ChannelModel::default()).unwrap();
        assert!((l - 85.2).abs() < 0.05, "{l}");
        let one_m = ChannelModel::new(-85.0, 5200.0, 1.0, 31.0, 0.0).unwrap();
        // 20·log10(5200) − 28, the distance term vanishes
        assert!((path_loss(&one_m).unwrap() - 46.32).abs() < 0.005);
    }

    #[test]
    fn doubling_distance() {
        let a = ChannelModel::new(-85.0, 5200.0, 9.0, 31.0, 0.0).unwrap();
        let b = ChannelModel::new(-85.0, 5200.0, 18.0, 31.0, 0.0).unwrap();
        let d = path_loss(&b).unwrap() - path_loss(&a).unwrap();
        assert_relative_eq!(d, 31.0 * 2f64.log10(), epsilon = 1e-12);
        assert!((d - 9.33).abs() < 0.01);
    }

    #[test]
    fn rejects_out_of_domain() {
        assert!(ChannelModel::new(-85.0, 5200.0, 0.0, 31.0, 0.0).is_err());
        assert!(ChannelModel::new(-85.0, 0.0, 10.0, 31.0, 0.0).is_err());
        let close = ChannelModel::new(-85.0, 5200.0, 0.5, 31.0, 0.0).unwrap();
        assert!(path_loss(&close).is_err());
        assert!(snr_from_txp(10.0, &close).is_err());
    }

    #[test]
    fn snr_mapping() {
        let ch = ChannelModel::default();
        assert!((snr_from_txp(15.0, &ch).unwrap() - 14.8).abs() < 0.05);
        assert!((snr_from_txp(0.0, &ch).unwrap() + 0.2).abs() < 0.05);
        let intercept = -(path_loss(&ch).unwrap() + ch.noise_floor_dbm());
        for txp in [-10.0, 0.0, 3.0, 17.5, 30.0] {
            let s = snr_from_txp(txp, &ch).unwrap();
            assert_relative_eq!(s, txp + intercept, epsilon = 1e-12);
            assert_relative_eq!(snr_from_txp(txp + 3.0, &ch).unwrap() - s, 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn power_units() {
        assert_relative_eq!(TxPower::from_dbm(20.0).mw(), 100.0, max_relative = 1e-12);
        assert_relative_eq!(TxPower::from_dbm(0.0).mw(), 1.0);
        assert_relative_eq!(TxPower::from_mw(1000.0).unwrap().dbm(), 30.0, epsilon = 1e-12);
        assert!(TxPower::from_mw(0.0).is_err());
        assert!(TxPower::from_mw(-1.0).is_err());
    }
}
