//! Sweeps over the link parameter space.
//!
//! SNR is the internal axis. A TXP grid is mapped through the scenario's link
//! budget, so every point carries both coordinates and energy is always
//! charged at the transmission power that produced the SNR.

use rayon::prelude::*;

use crate::dcf::{self, AttemptPlan};
use crate::energy::{self, DeviceProfile, EnergyParameter};
use crate::error::{Error, Result};
use crate::phy::{Mode, TxPower};
use crate::scenario::LinkScenario;

/// Relative goodput margin a higher mode needs to displace a lower one.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Width (dB) of the bracket around a mode transition before the crossing
/// itself is solved for.
pub const TRANSITION_RESOLUTION_DB: f64 = 0.01;

const MIN_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Transmission power in dBm.
    Txp,
    /// Receiver SNR in dB.
    Snr,
}

/// An evenly spaced sweep over TXP or SNR and a subset of modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    axis: Axis,
    start: f64,
    stop: f64,
    step: f64,
    modes: Vec<Mode>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid {
            axis: Axis::Txp,
            start: 0.0,
            stop: 30.0,
            step: 0.1,
            modes: Mode::all().to_vec(),
        }
    }
}

impl SweepGrid {
    pub fn new(axis: Axis, start: f64, stop: f64, step: f64) -> Result<SweepGrid> {
        if !(step >= MIN_STEP) || !step.is_finite() {
            return Err(Error::invalid("step", format!("must be at least {MIN_STEP}, got {step}")));
        }
        if !(start <= stop) || !start.is_finite() || !stop.is_finite() {
            return Err(Error::invalid("range", format!("[{start}, {stop}] is empty")));
        }
        Ok(SweepGrid {
            axis,
            start,
            stop,
            step,
            modes: Mode::all().to_vec(),
        })
    }

    pub fn txp(min_dbm: f64, max_dbm: f64, step_db: f64) -> Result<SweepGrid> {
        Self::new(Axis::Txp, min_dbm, max_dbm, step_db)
    }

    pub fn snr(min_db: f64, max_db: f64, step_db: f64) -> Result<SweepGrid> {
        Self::new(Axis::Snr, min_db, max_db, step_db)
    }

    /// The scenario's TXP range.
    pub fn for_scenario(scenario: &LinkScenario) -> Result<SweepGrid> {
        let r = scenario.txp_range;
        Self::txp(r.min_dbm, r.max_dbm, r.step_db)
    }

    /// Restrict the sweep to `modes`, kept in index order.
    pub fn with_modes(mut self, mut modes: Vec<Mode>) -> Result<SweepGrid> {
        if modes.is_empty() {
            return Err(Error::invalid("modes", "at least one mode is required"));
        }
        modes.sort_by_key(|m| m.index());
        modes.dedup();
        self.modes = modes;
        Ok(self)
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    /// Grid values on the sweep axis. Values are rounded to 1e−9 so that
    /// decimal steps print as written.
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| {
                let v = self.start + i as f64 * self.step;
                (v * 1e9).round() / 1e9
            })
            .collect()
    }

    /// `(snr_db, txp)` for every grid value.
    pub fn operating_points(&self, scenario: &LinkScenario) -> Result<Vec<(f64, TxPower)>> {
        let budget = scenario.link_budget_db()?;
        Ok(self
            .values()
            .into_iter()
            .map(|v| match self.axis {
                Axis::Snr => (v, TxPower::from_dbm(v + budget)),
                Axis::Txp => (v - budget, TxPower::from_dbm(v)),
            })
            .collect())
    }
}

/// Closed-form metrics of one (mode, SNR) configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkMetrics {
    pub mode: Mode,
    pub snr_db: f64,
    pub txp_dbm: f64,
    pub p_succ: f64,
    pub goodput_mbps: f64,
    pub e_frame_mj: f64,
    pub efficiency_bpj: f64,
}

fn goodput_at(scenario: &LinkScenario, mode: Mode, snr_db: f64) -> Result<f64> {
    let plan = AttemptPlan::constant(scenario.payload, snr_db, mode, scenario.dcf.retry_limit)?.resolve()?;
    Ok(dcf::goodput(&plan, &scenario.dcf)?.goodput_mbps)
}

/// Metrics for `mode` at `snr_db`, with energy charged at the TXP that yields
/// that SNR. The same retransmission mode is used on every attempt.
pub fn link_metrics(
    scenario: &LinkScenario,
    profile: &DeviceProfile,
    mode: Mode,
    snr_db: f64,
) -> Result<LinkMetrics> {
    let txp = scenario.txp_for_snr(snr_db)?;
    let plan = AttemptPlan::constant(scenario.payload, snr_db, mode, scenario.dcf.retry_limit)?.resolve()?;
    let g = dcf::goodput(&plan, &scenario.dcf)?;
    let e = energy::energy_per_frame(&plan, &scenario.dcf, profile, txp)?;
    Ok(LinkMetrics {
        mode,
        snr_db,
        txp_dbm: txp.dbm(),
        p_succ: g.p_succ,
        goodput_mbps: g.goodput_mbps,
        e_frame_mj: e.e_frame_mj,
        efficiency_bpj: e.efficiency_bpj,
    })
}

/// Goodput-maximising mode among `modes` (ascending) and its goodput.
pub fn best_mode(scenario: &LinkScenario, modes: &[Mode], snr_db: f64) -> Result<(Mode, f64)> {
    let mut best: Option<(Mode, f64)> = None;
    for &m in modes {
        let g = goodput_at(scenario, m, snr_db)?;
        best = match best {
            Some((_, bg)) if g > bg + TIE_TOLERANCE * bg.abs() => Some((m, g)),
            None => Some((m, g)),
            keep => keep,
        };
    }
    best.ok_or(Error::Degenerate("no modes to choose from"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopePoint {
    pub snr_db: f64,
    pub txp_dbm: f64,
    pub best_mode: Mode,
    pub goodput_mbps: f64,
    /// Efficiency of the goodput-optimal configuration (bits/J).
    pub efficiency_at_best: f64,
    pub e_frame_mj: f64,
}

fn envelope_points(grid: &SweepGrid, scenario: &LinkScenario, profile: &DeviceProfile) -> Result<Vec<EnvelopePoint>> {
    scenario.validate()?;
    profile.validate()?;
    let modes = grid.modes();
    grid.operating_points(scenario)?
        .into_par_iter()
        .map(|(snr, _)| {
            let (mode, _) = best_mode(scenario, modes, snr)?;
            let m = link_metrics(scenario, profile, mode, snr)?;
            Ok(EnvelopePoint {
                snr_db: snr,
                txp_dbm: m.txp_dbm,
                best_mode: mode,
                goodput_mbps: m.goodput_mbps,
                efficiency_at_best: m.efficiency_bpj,
                e_frame_mj: m.e_frame_mj,
            })
        })
        .collect()
}

/// Goodput-optimal mode per grid point.
pub fn optimal_envelope(grid: &SweepGrid, scenario: &LinkScenario, profile: &DeviceProfile) -> Result<Vec<EnvelopePoint>> {
    envelope_points(grid, scenario, profile)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePoint {
    pub mode: Mode,
    pub txp_dbm: f64,
    pub snr_db: f64,
    pub p_succ: f64,
    pub e_frame_mj: f64,
}

/// Expected energy per frame for every (mode, grid point), grouped by mode.
pub fn energy_surface(grid: &SweepGrid, scenario: &LinkScenario, profile: &DeviceProfile) -> Result<Vec<SurfacePoint>> {
    scenario.validate()?;
    profile.validate()?;
    let points = grid.operating_points(scenario)?;
    let cells: Vec<(Mode, f64)> = grid
        .modes()
        .iter()
        .flat_map(|&m| points.iter().map(move |&(snr, _)| (m, snr)))
        .collect();
    cells
        .into_par_iter()
        .map(|(mode, snr)| {
            let m = link_metrics(scenario, profile, mode, snr)?;
            Ok(SurfacePoint {
                mode,
                txp_dbm: m.txp_dbm,
                snr_db: snr,
                p_succ: m.p_succ,
                e_frame_mj: m.e_frame_mj,
            })
        })
        .collect()
}

/// Efficiency along the goodput envelope, with the inputs needed to locate
/// its mode transitions precisely.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffCurve {
    pub scenario: LinkScenario,
    pub profile: DeviceProfile,
    pub modes: Vec<Mode>,
    pub points: Vec<EnvelopePoint>,
}

pub fn efficiency_vs_goodput(grid: &SweepGrid, scenario: &LinkScenario, profile: &DeviceProfile) -> Result<TradeoffCurve> {
    Ok(TradeoffCurve {
        scenario: scenario.clone(),
        profile: profile.clone(),
        modes: grid.modes().to_vec(),
        points: envelope_points(grid, scenario, profile)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TxpCurvePoint {
    pub mode: Mode,
    pub txp_dbm: f64,
    pub snr_db: f64,
    pub goodput_mbps: f64,
    pub efficiency_bpj: f64,
    /// Goodput-optimal mode at this TXP.
    pub best_mode: Mode,
}

/// Efficiency against TXP for each mode, grouped by mode.
pub fn efficiency_vs_txp(grid: &SweepGrid, scenario: &LinkScenario, profile: &DeviceProfile) -> Result<Vec<TxpCurvePoint>> {
    scenario.validate()?;
    profile.validate()?;
    let modes = grid.modes();
    let points = grid.operating_points(scenario)?;
    let best: Vec<Mode> = points
        .par_iter()
        .map(|&(snr, _)| best_mode(scenario, modes, snr).map(|(m, _)| m))
        .collect::<Result<_>>()?;
    let cells: Vec<(Mode, usize)> = modes
        .iter()
        .flat_map(|&m| (0..points.len()).map(move |i| (m, i)))
        .collect();
    cells
        .into_par_iter()
        .map(|(mode, i)| {
            let m = link_metrics(scenario, profile, mode, points[i].0)?;
            Ok(TxpCurvePoint {
                mode,
                txp_dbm: m.txp_dbm,
                snr_db: m.snr_db,
                goodput_mbps: m.goodput_mbps,
                efficiency_bpj: m.efficiency_bpj,
                best_mode: best[i],
            })
        })
        .collect()
}

/// Efficiency leap where the goodput-optimal mode changes.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionDrop {
    pub from_mode: Mode,
    pub to_mode: Mode,
    /// SNR at which both modes give the same goodput.
    pub snr_at_transition: f64,
    /// `µ(to) − µ(from)` at the transition SNR (bits/J).
    pub delta_efficiency: f64,
    /// Goodput gained across the located transition bracket (Mbps).
    pub delta_goodput: f64,
}

/// Locate every mode change along `curve` and measure its efficiency leap.
///
/// A change between neighbouring grid points is bracketed by bisection to
/// [`TRANSITION_RESOLUTION_DB`]; a mode that wins only inside the bracket
/// yields its own records. The crossing of the two goodput curves is then
/// solved to machine precision and both modes are evaluated there.
pub fn transition_drops(curve: &TradeoffCurve) -> Result<Vec<TransitionDrop>> {
    let mut brackets = Vec::new();
    for w in curve.points.windows(2) {
        if w[0].best_mode != w[1].best_mode {
            bracket(curve, (w[0].snr_db, w[0].best_mode), (w[1].snr_db, w[1].best_mode), &mut brackets)?;
        }
    }
    brackets
        .into_par_iter()
        .map(|((a, from), (b, to))| measure_drop(curve, from, to, a, b))
        .collect()
}

type Bracket = ((f64, Mode), (f64, Mode));

fn bracket(curve: &TradeoffCurve, lo: (f64, Mode), hi: (f64, Mode), out: &mut Vec<Bracket>) -> Result<()> {
    if hi.0 - lo.0 <= TRANSITION_RESOLUTION_DB {
        out.push((lo, hi));
        return Ok(());
    }
    let mid = 0.5 * (lo.0 + hi.0);
    let (m, _) = best_mode(&curve.scenario, &curve.modes, mid)?;
    if m == lo.1 {
        bracket(curve, (mid, m), hi, out)
    } else if m == hi.1 {
        bracket(curve, lo, (mid, m), out)
    } else {
        bracket(curve, lo, (mid, m), out)?;
        bracket(curve, (mid, m), hi, out)
    }
}

fn measure_drop(curve: &TradeoffCurve, from: Mode, to: Mode, a: f64, b: f64) -> Result<TransitionDrop> {
    let sc = &curve.scenario;
    let gap = |s: f64| -> Result<f64> { Ok(goodput_at(sc, to, s)? - goodput_at(sc, from, s)?) };
    let (mut lo, mut hi) = (a, b);
    let (mut f_lo, mut f_hi) = (gap(lo)?, gap(hi)?);
    if f_lo <= 0.0 && f_hi > 0.0 {
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let f = gap(mid)?;
            if f > 0.0 {
                (hi, f_hi) = (mid, f);
            } else {
                (lo, f_lo) = (mid, f);
            }
        }
    }
    let s = if f_lo.abs() <= f_hi.abs() { lo } else { hi };
    let mu_from = link_metrics(sc, &curve.profile, from, s)?.efficiency_bpj;
    let mu_to = link_metrics(sc, &curve.profile, to, s)?.efficiency_bpj;
    Ok(TransitionDrop {
        from_mode: from,
        to_mode: to,
        snr_at_transition: s,
        delta_efficiency: mu_to - mu_from,
        delta_goodput: goodput_at(sc, to, b)? - goodput_at(sc, from, a)?,
    })
}

/// Trade-off curve and drops recomputed under a scaled energy parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityRun {
    pub parameter: EnergyParameter,
    pub factor: f64,
    pub curve: TradeoffCurve,
    pub drops: Vec<TransitionDrop>,
}

pub fn sensitivity_scan(
    profile: &DeviceProfile,
    parameter: EnergyParameter,
    factor: f64,
    grid: &SweepGrid,
    scenario: &LinkScenario,
) -> Result<SensitivityRun> {
    let scaled = profile.scaled(parameter, factor)?;
    let curve = efficiency_vs_goodput(grid, scenario, &scaled)?;
    let drops = transition_drops(&curve)?;
    Ok(SensitivityRun {
        parameter,
        factor,
        curve,
        drops,
    })
}
