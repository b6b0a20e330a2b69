use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use dot11ee::explorer::{self, SweepGrid};
use dot11ee::oracle::{self, SimConfig};
use dot11ee::profiles;
use dot11ee::{dcf, energy, AttemptPlan, DeviceProfile, EnergyParameter, LinkScenario, Mode, TxPower};

mod output;

use output::Figure;

/// Goodput, per-frame energy and energy efficiency of an 802.11a link.
///
/// Every figure command writes CSV to --out (or standard output) and can add a
/// gnuplot script with --plot.
#[derive(Parser, Debug)]
#[command(name = "dot11ee", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Goodput-optimal mode per SNR point, with its efficiency and energy per frame.
    ///
    /// Sweeps SNR from -5 to 35 dB in 0.1 dB steps unless a range is given.
    Envelope(FigureArgs),
    /// Expected energy per frame for every mode across the TXP sweep.
    Surface(FigureArgs),
    /// Energy efficiency against optimal goodput.
    Tradeoff {
        #[command(flatten)]
        fig: FigureArgs,
        /// Also write the mode-transition drops to this CSV file.
        #[arg(long, value_name = "PATH")]
        drops: Option<PathBuf>,
    },
    /// Energy efficiency against TXP for every mode.
    TxpCurves(FigureArgs),
    /// Trade-off curves with one energy parameter scaled.
    Sensitivity {
        #[command(flatten)]
        fig: FigureArgs,
        /// Parameter to scale (default: all four).
        #[arg(long, value_enum)]
        param: Option<Param>,
        /// Scaling factor (default: 3 and 1/3).
        #[arg(long)]
        factor: Option<f64>,
        /// Also write the mode-transition drops of every run to this CSV file.
        #[arg(long, value_name = "PATH")]
        drops: Option<PathBuf>,
    },
    /// Fit a power model to measurement records.
    Fit {
        /// CSV with header mcs_mbps,txp_mw,rho_tx_w,rho_rx_w.
        #[arg(long, value_name = "PATH")]
        measurements: PathBuf,
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimate for one configuration next to the closed form.
    Simulate {
        #[command(flatten)]
        link: LinkArgs,
        /// Builtin profile name or profile file.
        #[arg(long, default_value = "raspberrypi-example")]
        profile: String,
        /// Mode index (1-8).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=8))]
        mode: u8,
        /// Receiver SNR in dB.
        #[arg(long, allow_hyphen_values = true, required_unless_present = "txp", conflicts_with = "txp")]
        snr: Option<f64>,
        /// Transmission power in dBm.
        #[arg(long, allow_hyphen_values = true)]
        txp: Option<f64>,
        #[arg(long, default_value_t = oracle::DEFAULT_FRAMES)]
        frames: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// List the builtin device profiles, or print one in profile-file format.
    Profiles {
        /// Profile to print.
        #[arg(long, value_name = "NAME")]
        show: Option<String>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct LinkArgs {
    /// Scenario file (key = value records).
    #[arg(long, value_name = "PATH")]
    scenario: Option<PathBuf>,
    /// Payload length in octets (overrides the scenario).
    #[arg(long)]
    payload: Option<usize>,
    /// Attempts per frame (overrides the scenario).
    #[arg(long)]
    retry_limit: Option<usize>,
}

#[derive(Args, Debug)]
struct FigureArgs {
    #[command(flatten)]
    link: LinkArgs,
    /// Builtin profile name or profile file.
    #[arg(long, default_value = "raspberrypi-example")]
    profile: String,
    /// TXP sweep in dBm (default: the scenario's range; SNR -5:35:0.1 for envelope).
    #[arg(long, value_name = "MIN:MAX:STEP", value_parser = parse_range, allow_hyphen_values = true, conflicts_with = "snr_range")]
    txp_range: Option<(f64, f64, f64)>,
    /// SNR sweep in dB instead of a TXP sweep.
    #[arg(long, value_name = "MIN:MAX:STEP", value_parser = parse_range, allow_hyphen_values = true)]
    snr_range: Option<(f64, f64, f64)>,
    /// Comma-separated mode indices (default: all eight).
    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u8).range(1..=8))]
    modes: Option<Vec<u8>>,
    /// Output CSV (default: standard output).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Companion gnuplot script for the CSV.
    #[arg(long, value_name = "PATH", requires = "out")]
    plot: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Param {
    RhoId,
    RhoTx,
    RhoRx,
    GammaXg,
}

impl From<Param> for EnergyParameter {
    fn from(p: Param) -> Self {
        match p {
            Param::RhoId => EnergyParameter::RhoId,
            Param::RhoTx => EnergyParameter::RhoTx,
            Param::RhoRx => EnergyParameter::RhoRx,
            Param::GammaXg => EnergyParameter::GammaXg,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Model {
    Tx,
    Rx,
}

fn parse_range(s: &str) -> Result<(f64, f64, f64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected MIN:MAX:STEP, got `{s}`"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.trim().parse().map_err(|_| format!("`{p}` is not a number"))?;
    }
    Ok((v[0], v[1], v[2]))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_scenario(args: &LinkArgs) -> Result<LinkScenario> {
    let mut sc = match &args.scenario {
        Some(path) => LinkScenario::load(path)?,
        None => LinkScenario::default(),
    };
    if let Some(payload) = args.payload {
        sc.payload = payload;
    }
    if let Some(n) = args.retry_limit {
        sc.dcf = sc.dcf.with_retry_limit(n)?;
    }
    sc.validate()?;
    Ok(sc)
}

fn load_profile(name: &str) -> Result<DeviceProfile> {
    let path = Path::new(name);
    let profile = if path.is_file() {
        DeviceProfile::load(path)?
    } else {
        profiles::builtin(name).with_context(|| {
            let known: Vec<&str> = profiles::builtin_slugs().collect();
            format!("`{name}` is neither a profile file nor a builtin ({})", known.join(", "))
        })?
    };
    if profile.placeholder_constants {
        eprintln!(
            "warning: profile `{}` uses placeholder rho_id_w = {} and gamma_xg_mj = {} (not measured values)",
            profile.name, profile.rho_id_w, profile.gamma_xg_mj
        );
    }
    Ok(profile)
}

/// SNR sweep used by `envelope` when no range is given.
const ENVELOPE_SNR_RANGE: (f64, f64, f64) = (-5.0, 35.0, 0.1);

fn build_grid(fig: &FigureArgs, sc: &LinkScenario, default_snr: Option<(f64, f64, f64)>) -> Result<SweepGrid> {
    let grid = match (fig.txp_range, fig.snr_range.or(if fig.txp_range.is_none() { default_snr } else { None })) {
        (_, Some((a, b, s))) => SweepGrid::snr(a, b, s)?,
        (Some((a, b, s)), None) => SweepGrid::txp(a, b, s)?,
        (None, None) => SweepGrid::for_scenario(sc)?,
    };
    Ok(match &fig.modes {
        Some(idx) => grid.with_modes(idx.iter().map(|&i| Mode::from_index(i)).collect::<Result<_, _>>()?)?,
        None => grid,
    })
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn emit_figure(fig: &FigureArgs, kind: Figure, csv: &str) -> Result<()> {
    write_out(fig.out.as_deref(), csv)?;
    if let (Some(plot), Some(out)) = (&fig.plot, &fig.out) {
        write_out(Some(plot), &output::gnuplot(kind, out, csv))?;
    }
    Ok(())
}

struct Figures {
    scenario: LinkScenario,
    profile: DeviceProfile,
    grid: SweepGrid,
}

fn prepare(fig: &FigureArgs) -> Result<Figures> {
    prepare_with(fig, None)
}

fn prepare_with(fig: &FigureArgs, default_snr: Option<(f64, f64, f64)>) -> Result<Figures> {
    let scenario = load_scenario(&fig.link)?;
    let profile = load_profile(&fig.profile)?;
    let grid = build_grid(fig, &scenario, default_snr)?;
    Ok(Figures { scenario, profile, grid })
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Envelope(fig) => {
            let f = prepare_with(&fig, Some(ENVELOPE_SNR_RANGE))?;
            let env = explorer::optimal_envelope(&f.grid, &f.scenario, &f.profile)?;
            emit_figure(&fig, Figure::Envelope, &output::envelope_csv(&env))
        }
        Command::Surface(fig) => {
            let f = prepare(&fig)?;
            let surf = explorer::energy_surface(&f.grid, &f.scenario, &f.profile)?;
            emit_figure(&fig, Figure::Surface, &output::surface_csv(&surf))
        }
        Command::Tradeoff { fig, drops } => {
            let f = prepare(&fig)?;
            let curve = explorer::efficiency_vs_goodput(&f.grid, &f.scenario, &f.profile)?;
            emit_figure(&fig, Figure::Tradeoff, &output::tradeoff_csv(&curve))?;
            if let Some(path) = drops {
                write_out(Some(&path), &output::drops_csv(&explorer::transition_drops(&curve)?))?;
            }
            Ok(())
        }
        Command::TxpCurves(fig) => {
            let f = prepare(&fig)?;
            let curves = explorer::efficiency_vs_txp(&f.grid, &f.scenario, &f.profile)?;
            emit_figure(&fig, Figure::TxpCurves, &output::txp_curves_csv(&curves))
        }
        Command::Sensitivity {
            fig,
            param,
            factor,
            drops,
        } => {
            let f = prepare(&fig)?;
            let params: Vec<EnergyParameter> = match param {
                Some(p) => vec![p.into()],
                None => EnergyParameter::ALL.to_vec(),
            };
            let factors = match factor {
                Some(k) => vec![k],
                None => vec![3.0, 1.0 / 3.0],
            };
            let baseline = explorer::efficiency_vs_goodput(&f.grid, &f.scenario, &f.profile)?;
            let mut runs = Vec::new();
            for &p in &params {
                for &k in &factors {
                    runs.push(explorer::sensitivity_scan(&f.profile, p, k, &f.grid, &f.scenario)?);
                }
            }
            emit_figure(&fig, Figure::Sensitivity, &output::sensitivity_csv(&baseline, &runs))?;
            if let Some(path) = drops {
                let base_drops = explorer::transition_drops(&baseline)?;
                write_out(Some(&path), &output::sensitivity_drops_csv(&base_drops, &runs))?;
            }
            Ok(())
        }
        Command::Fit {
            measurements,
            model,
            out,
        } => {
            let records = profiles::load_measurements(&measurements)?;
            let fit = match model {
                Model::Tx => profiles::fit_tx(&records)?,
                Model::Rx => profiles::fit_rx(&records)?,
            };
            write_out(out.as_deref(), &fit.to_csv())
        }
        Command::Simulate {
            link,
            profile,
            mode,
            snr,
            txp,
            frames,
            seed,
            out,
        } => {
            let sc = load_scenario(&link)?;
            let profile = load_profile(&profile)?;
            let mode = Mode::from_index(mode)?;
            let (snr, txp) = match (snr, txp) {
                (Some(s), _) => (s, sc.txp_for_snr(s)?),
                (None, Some(t)) => (sc.snr_at(TxPower::from_dbm(t))?, TxPower::from_dbm(t)),
                (None, None) => unreachable!("clap requires --snr or --txp"),
            };
            let plan = AttemptPlan::constant(sc.payload, snr, mode, sc.dcf.retry_limit)?.resolve()?;
            let g = dcf::goodput(&plan, &sc.dcf)?;
            let e = energy::energy_per_frame(&plan, &sc.dcf, &profile, txp)?;
            let config = SimConfig::new(plan, sc.dcf, profile, txp).with_frames(frames).with_seed(seed);
            let sim = oracle::simulate(&config)?;
            let row = output::SimulateRow {
                mode,
                snr_db: snr,
                txp_dbm: txp.dbm(),
                seed,
                goodput: &g,
                energy: &e,
                sim: &sim,
            };
            write_out(out.as_deref(), &output::simulate_csv(&row))
        }
        Command::Profiles { show, out } => {
            let text = match show {
                Some(name) => load_profile(&name)?.to_file_string(),
                None => output::profiles_csv(&profiles::builtin_profiles(), profiles::builtin_slugs()),
            };
            write_out(out.as_deref(), &text)
        }
    }
}
