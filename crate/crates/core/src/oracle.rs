//! Monte Carlo replay of the DCF retry process.
//!
//! Each frame draws an integer backoff uniformly from `0..=CW(i)` slots and a
//! Bernoulli outcome per attempt, then charges the same timeline and power
//! states as the closed form. Attempt success probabilities come from the
//! plan, so the packet error model is taken as given.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dcf::{DcfParams, ResolvedPlan};
use crate::energy::{self, DeviceProfile};
use crate::error::{Error, Result};
use crate::phy::{self, TxPower};

pub const DEFAULT_FRAMES: u64 = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub frames: u64,
    pub seed: u64,
    pub plan: ResolvedPlan,
    pub dcf: DcfParams,
    pub profile: DeviceProfile,
    pub txp: TxPower,
}

impl SimConfig {
    pub fn new(plan: ResolvedPlan, dcf: DcfParams, profile: DeviceProfile, txp: TxPower) -> SimConfig {
        SimConfig {
            frames: DEFAULT_FRAMES,
            seed: 0,
            plan,
            dcf,
            profile,
            txp,
        }
    }

    pub fn with_frames(self, frames: u64) -> SimConfig {
        SimConfig { frames, ..self }
    }

    pub fn with_seed(self, seed: u64) -> SimConfig {
        SimConfig { seed, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    pub frames: u64,
    /// Delivered bits over elapsed time (Mbps).
    pub goodput_est: f64,
    /// Mean energy per frame (mJ).
    pub e_frame_est: f64,
    pub stderr_goodput: f64,
    pub stderr_e: f64,
    pub p_succ_est: f64,
}

struct Attempt {
    window: u32,
    data_us: f64,
    ack_us: f64,
    tx_w: f64,
    rx_w: f64,
    success: f64,
}

pub fn simulate(config: &SimConfig) -> Result<SimResult> {
    if config.frames < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: config.frames as usize,
        });
    }
    let p = &config.dcf;
    p.validate()?;
    config.profile.validate()?;
    let plan = &config.plan;
    if plan.attempts() != p.retry_limit {
        return Err(Error::invalid(
            "plan",
            format!("{} attempts for a retry limit of {}", plan.attempts(), p.retry_limit),
        ));
    }
    let attempts = plan
        .modes()
        .iter()
        .zip(plan.success_probabilities())
        .enumerate()
        .map(|(i, (&mode, &q))| {
            let mcs = f64::from(mode.rate_mbps());
            Ok(Attempt {
                window: p.contention_window(i + 1)?,
                data_us: phy::t_data(plan.payload(), mode)?,
                ack_us: phy::ack_duration_for(mode),
                tx_w: energy::rho_tx(&config.profile, mcs, config.txp)?,
                rx_w: energy::rho_rx(&config.profile, mcs)?,
                success: q,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let idle_w = config.profile.rho_id_w;
    let bits = plan.payload_bits();
    let n = config.frames as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    // (delivered bits, µs, mJ) per frame
    let mut samples: Vec<(f64, f64, f64)> = Vec::with_capacity(n);
    let mut delivered = 0u64;

    for _ in 0..n {
        let (mut t, mut e_uj, mut b) = (0.0, 0.0, 0.0);
        for a in &attempts {
            let backoff = f64::from(rng.random_range(0..=a.window)) * p.slot_us;
            t += backoff + a.data_us;
            e_uj += idle_w * backoff + a.tx_w * a.data_us;
            if rng.random::<f64>() < a.success {
                t += p.sifs_us + a.ack_us + p.difs_us;
                e_uj += idle_w * (p.sifs_us + p.difs_us) + a.rx_w * a.ack_us;
                b = bits;
                delivered += 1;
                break;
            }
            let timeout = p.sifs_us + a.ack_us + p.difs_us;
            t += timeout;
            e_uj += idle_w * timeout;
        }
        samples.push((b, t, config.profile.gamma_xg_mj + e_uj * 1e-3));
    }

    let nf = n as f64;
    let mean = |f: fn(&(f64, f64, f64)) -> f64| samples.iter().map(f).sum::<f64>() / nf;
    let (mb, mt, me) = (mean(|s| s.0), mean(|s| s.1), mean(|s| s.2));
    let ratio = mb / mt;
    // Delta method for a ratio of means.
    let var_resid = samples.iter().map(|s| (s.0 - ratio * s.1).powi(2)).sum::<f64>() / (nf - 1.0);
    let var_e = samples.iter().map(|s| (s.2 - me).powi(2)).sum::<f64>() / (nf - 1.0);
    Ok(SimResult {
        frames: config.frames,
        goodput_est: ratio,
        e_frame_est: me,
        stderr_goodput: (var_resid / nf).sqrt() / mt,
        stderr_e: (var_e / nf).sqrt(),
        p_succ_est: delivered as f64 / nf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dcf::{self, AttemptPlan};
    use crate::phy::Mode;
    use crate::profiles::builtin;

    fn config(plan: ResolvedPlan) -> SimConfig {
        SimConfig::new(
            plan,
            DcfParams::default(),
            builtin("raspberrypi-example").unwrap(),
            TxPower::from_dbm(15.0),
        )
    }

    fn closed_form(c: &SimConfig) -> (f64, f64) {
        let g = dcf::goodput(&c.plan, &c.dcf).unwrap().goodput_mbps;
        let e = energy::energy_per_frame(&c.plan, &c.dcf, &c.profile, c.txp).unwrap().e_frame_mj;
        (g, e)
    }

    fn m(i: u8) -> Mode {
        Mode::from_index(i).unwrap()
    }

    #[test]
    fn same_seed_same_result() {
        let c = config(ResolvedPlan::constant(1500, m(5), 0.6, 7).unwrap()).with_frames(5000).with_seed(9);
        assert_eq!(simulate(&c).unwrap(), simulate(&c).unwrap());
        let other = simulate(&c.clone().with_seed(10)).unwrap();
        assert_ne!(simulate(&c).unwrap(), other);
    }

    #[test]
    fn clean_channel() {
        let c = config(ResolvedPlan::constant(1500, m(8), 1.0, 7).unwrap()).with_seed(1);
        let r = simulate(&c).unwrap();
        let (g, e) = closed_form(&c);
        assert_eq!(r.p_succ_est, 1.0);
        assert!((r.goodput_est - g).abs() <= 3.0 * r.stderr_goodput, "{r:?} vs {g}");
        assert!((r.e_frame_est - e).abs() <= 3.0 * r.stderr_e, "{r:?} vs {e}");
    }

    #[test]
    fn dead_channel() {
        let c = config(ResolvedPlan::constant(1500, m(3), 0.0, 7).unwrap()).with_seed(2);
        let r = simulate(&c).unwrap();
        assert_eq!((r.p_succ_est, r.goodput_est, r.stderr_goodput), (0.0, 0.0, 0.0));
        let (_, e) = closed_form(&c);
        assert!((r.e_frame_est - e).abs() <= 3.0 * r.stderr_e);
    }

    #[test]
    fn agrees_at_mode_5_and_12_db() {
        let plan = AttemptPlan::constant(1500, 12.0, m(5), 7).unwrap().resolve().unwrap();
        let q = plan.success_probabilities()[0];
        assert!(q > 0.05 && q < 0.95, "{q}");
        let c = config(plan).with_seed(42);
        let r = simulate(&c).unwrap();
        let (g, e) = closed_form(&c);
        assert!((r.goodput_est - g).abs() <= 3.0 * r.stderr_goodput, "{r:?} vs {g}");
        assert!((r.e_frame_est - e).abs() <= 3.0 * r.stderr_e, "{r:?} vs {e}");
    }

    #[test]
    fn stderr_halves_with_four_times_the_frames() {
        let base = config(ResolvedPlan::constant(1500, m(4), 0.5, 7).unwrap());
        for seed in 0..4 {
            let a = simulate(&base.clone().with_frames(20_000).with_seed(seed)).unwrap();
            let b = simulate(&base.clone().with_frames(80_000).with_seed(seed + 100)).unwrap();
            for ratio in [a.stderr_goodput / b.stderr_goodput, a.stderr_e / b.stderr_e] {
                assert!((ratio / 2.0 - 1.0).abs() < 0.2, "seed {seed}: {ratio}");
            }
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let c = config(ResolvedPlan::constant(1500, m(1), 0.5, 7).unwrap());
        assert!(simulate(&c.clone().with_frames(1)).is_err());
        let short = config(ResolvedPlan::constant(1500, m(1), 0.5, 3).unwrap());
        assert!(simulate(&short).is_err());
    }
}
