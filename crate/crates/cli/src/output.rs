//! CSV tables and gnuplot scripts. Floats use Rust's shortest round-trip
//! formatting so identical runs give identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use dot11ee::dcf::GoodputBreakdown;
use dot11ee::energy::EnergyBreakdown;
use dot11ee::explorer::{EnvelopePoint, SensitivityRun, SurfacePoint, TradeoffCurve, TransitionDrop, TxpCurvePoint};
use dot11ee::oracle::SimResult;
use dot11ee::{DeviceProfile, Mode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Envelope,
    Surface,
    Tradeoff,
    TxpCurves,
    Sensitivity,
}

pub fn envelope_csv(points: &[EnvelopePoint]) -> String {
    let mut s = String::from("snr_db,best_mode,goodput_mbps,efficiency_bpj,e_frame_mj\n");
    for p in points {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            p.snr_db,
            p.best_mode.index(),
            p.goodput_mbps,
            p.efficiency_at_best,
            p.e_frame_mj
        );
    }
    s
}

pub fn surface_csv(points: &[SurfacePoint]) -> String {
    let mut s = String::from("mode,txp_dbm,e_frame_mj\n");
    for p in points {
        let _ = writeln!(s, "{},{},{}", p.mode.index(), p.txp_dbm, p.e_frame_mj);
    }
    s
}

pub fn tradeoff_csv(curve: &TradeoffCurve) -> String {
    let mut s = String::from("goodput_mbps,efficiency_bpj,best_mode\n");
    for p in &curve.points {
        let _ = writeln!(s, "{},{},{}", p.goodput_mbps, p.efficiency_at_best, p.best_mode.index());
    }
    s
}

pub fn txp_curves_csv(points: &[TxpCurvePoint]) -> String {
    let mut s = String::from("mode,txp_dbm,efficiency_bpj,goodput_mbps,best_mode\n");
    for p in points {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            p.mode.index(),
            p.txp_dbm,
            p.efficiency_bpj,
            p.goodput_mbps,
            p.best_mode.index()
        );
    }
    s
}

const DROPS_HEADER: &str = "from_mode,to_mode,snr_db,delta_efficiency_bpj";

fn drop_row(d: &TransitionDrop) -> String {
    format!(
        "{},{},{},{}",
        d.from_mode.index(),
        d.to_mode.index(),
        d.snr_at_transition,
        d.delta_efficiency
    )
}

pub fn drops_csv(drops: &[TransitionDrop]) -> String {
    let mut s = format!("{DROPS_HEADER}\n");
    for d in drops {
        let _ = writeln!(s, "{}", drop_row(d));
    }
    s
}

const BASELINE: &str = "baseline";

pub fn sensitivity_csv(baseline: &TradeoffCurve, runs: &[SensitivityRun]) -> String {
    let mut s = String::from("param,factor,snr_db,efficiency_bpj\n");
    let mut block = |name: &str, factor: f64, curve: &TradeoffCurve| {
        for p in &curve.points {
            let _ = writeln!(s, "{name},{factor},{},{}", p.snr_db, p.efficiency_at_best);
        }
    };
    block(BASELINE, 1.0, baseline);
    for r in runs {
        block(r.parameter.name(), r.factor, &r.curve);
    }
    s
}

pub fn sensitivity_drops_csv(baseline: &[TransitionDrop], runs: &[SensitivityRun]) -> String {
    let mut s = format!("param,factor,{DROPS_HEADER}\n");
    for d in baseline {
        let _ = writeln!(s, "{BASELINE},1,{}", drop_row(d));
    }
    for r in runs {
        for d in &r.drops {
            let _ = writeln!(s, "{},{},{}", r.parameter.name(), r.factor, drop_row(d));
        }
    }
    s
}

pub struct SimulateRow<'a> {
    pub mode: Mode,
    pub snr_db: f64,
    pub txp_dbm: f64,
    pub seed: u64,
    pub goodput: &'a GoodputBreakdown,
    pub energy: &'a EnergyBreakdown,
    pub sim: &'a SimResult,
}

pub fn simulate_csv(r: &SimulateRow) -> String {
    let mut s = String::from(
        "mode,snr_db,txp_dbm,p_succ,goodput_mbps,e_frame_mj,efficiency_bpj,\
         frames,seed,p_succ_est,goodput_est,e_frame_est,stderr_goodput,stderr_e\n",
    );
    let _ = writeln!(
        s,
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.mode.index(),
        r.snr_db,
        r.txp_dbm,
        r.goodput.p_succ,
        r.goodput.goodput_mbps,
        r.energy.e_frame_mj,
        r.energy.efficiency_bpj,
        r.sim.frames,
        r.seed,
        r.sim.p_succ_est,
        r.sim.goodput_est,
        r.sim.e_frame_est,
        r.sim.stderr_goodput,
        r.sim.stderr_e
    );
    s
}

pub fn profiles_csv<'a>(profiles: &[DeviceProfile], slugs: impl Iterator<Item = &'a str>) -> String {
    let mut s = String::from(
        "slug,name,rho_id_w,gamma_xg_mj,gamma_xr_mj,alpha0_w,alpha1_w_per_mbps,alpha2_w_per_mw,\
         beta0_w,beta1_w_per_mbps,placeholder_constants\n",
    );
    for (p, slug) in profiles.iter().zip(slugs) {
        let _ = writeln!(
            s,
            "{slug},{},{},{},{},{},{},{},{},{},{}",
            p.name,
            p.rho_id_w,
            p.gamma_xg_mj,
            p.gamma_xr_mj,
            p.tx.alpha0_w,
            p.tx.alpha1_w_per_mbps,
            p.tx.alpha2_w_per_mw,
            p.rx.beta0_w,
            p.rx.beta1_w_per_mbps,
            p.placeholder_constants
        );
    }
    s
}

fn modes_in(csv: &str, column: usize) -> Vec<String> {
    let mut modes: Vec<String> = csv
        .lines()
        .skip(1)
        .filter_map(|l| l.split(',').nth(column).map(str::to_string))
        .collect();
    modes.sort();
    modes.dedup();
    modes
}

/// Gnuplot script that plots `csv_path`; `csv` is the table's content.
pub fn gnuplot(kind: Figure, csv_path: &Path, csv: &str) -> String {
    let data = csv_path.display().to_string().replace('\'', "''");
    let mut s = String::from("set datafile separator ','\nset key outside right\nset grid\n");
    match kind {
        Figure::Envelope => {
            s.push_str("set xlabel 'SNR [dB]'\nset ylabel 'Optimal goodput [Mbps]'\n");
            let _ = writeln!(s, "plot '{data}' using 1:3 with lines linewidth 2 title 'envelope'");
        }
        Figure::Surface => {
            s.push_str("set xlabel 'TXP [dBm]'\nset ylabel 'Energy per frame [mJ]'\nset logscale y\n");
            let modes = modes_in(csv, 0);
            let parts: Vec<String> = modes
                .iter()
                .map(|m| format!("'{data}' using ($1=={m} ? $2 : 1/0):3 with lines title 'mode {m}'"))
                .collect();
            let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
        }
        Figure::Tradeoff => {
            s.push_str("set xlabel 'Optimal goodput [Mbps]'\nset ylabel 'Energy efficiency [bits/J]'\n");
            let _ = writeln!(s, "plot '{data}' using 1:2 with lines linewidth 2 title 'efficiency'");
        }
        Figure::TxpCurves => {
            s.push_str("set xlabel 'TXP [dBm]'\nset ylabel 'Energy efficiency [bits/J]'\n");
            let modes = modes_in(csv, 0);
            let parts: Vec<String> = modes
                .iter()
                .map(|m| format!("'{data}' using ($1=={m} ? $2 : 1/0):3 with lines title 'mode {m}'"))
                .collect();
            let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
        }
        Figure::Sensitivity => {
            s.push_str("set xlabel 'SNR [dB]'\nset ylabel 'Energy efficiency [bits/J]'\n");
            let mut runs: Vec<(String, String)> = Vec::new();
            for line in csv.lines().skip(1) {
                let mut f = line.split(',');
                if let (Some(p), Some(k)) = (f.next(), f.next()) {
                    let key = (p.to_string(), k.to_string());
                    if !runs.contains(&key) {
                        runs.push(key);
                    }
                }
            }
            let parts: Vec<String> = runs
                .iter()
                .map(|(p, k)| {
                    format!(
                        "'{data}' using (strcol(1) eq '{p}' && strcol(2) eq '{k}' ? $3 : 1/0):4 with lines title '{p} x{k}'"
                    )
                })
                .collect();
            let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
        }
    }
    s
}
