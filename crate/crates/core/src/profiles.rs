//! Device energy profiles.
//!
//! Five measured devices ship with the crate. Their transmit and receive
//! power models are the published linear regressions; the idle power and
//! generation toll are stand-ins (see [`DeviceProfile::placeholder_constants`]).
//! The same linear models can be refitted from raw measurement records by
//! ordinary least squares.

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use crate::energy::{DeviceProfile, RxPowerModel, TxPowerModel};
use crate::error::{Error, Result};

struct Builtin {
    slug: &'static str,
    name: &'static str,
    alpha: [f64; 3],
    beta: [f64; 2],
    rho_id_w: f64,
    gamma_xg_mj: f64,
}

// rho_id_w / gamma_xg_mj are placeholders; alpha / beta are the published fits.
const BUILTINS: [Builtin; 5] = [
    Builtin {
        slug: "htc-legend-example",
        name: "HTC Legend",
        alpha: [0.354, 0.0052, 0.021],
        beta: [0.013, 0.00643],
        rho_id_w: 0.7,
        gamma_xg_mj: 0.1,
    },
    Builtin {
        slug: "linksys-wrt54g-example",
        name: "Linksys WRT54G",
        alpha: [0.540, 0.0028, 0.075],
        beta: [0.14, 0.0130],
        rho_id_w: 3.0,
        gamma_xg_mj: 0.8,
    },
    Builtin {
        slug: "raspberrypi-example",
        name: "Raspberry Pi",
        alpha: [0.478, 0.0008, 0.044],
        beta: [-0.0062, 0.00146],
        rho_id_w: 2.0,
        gamma_xg_mj: 0.25,
    },
    Builtin {
        slug: "galaxy-note-10.1-example",
        name: "Galaxy Note 10.1",
        alpha: [0.572, 0.0017, 0.0105],
        beta: [0.0409, 0.00173],
        rho_id_w: 0.5,
        gamma_xg_mj: 0.05,
    },
    Builtin {
        slug: "soekris-net4826-48-example",
        name: "Soekris net4826-48",
        alpha: [0.17, 0.0170, 0.101],
        beta: [0.010, 0.0237],
        rho_id_w: 3.5,
        gamma_xg_mj: 0.9,
    },
];

impl Builtin {
    fn profile(&self) -> DeviceProfile {
        DeviceProfile {
            name: self.name.to_string(),
            rho_id_w: self.rho_id_w,
            gamma_xg_mj: self.gamma_xg_mj,
            gamma_xr_mj: 0.0,
            tx: TxPowerModel {
                alpha0_w: self.alpha[0],
                alpha1_w_per_mbps: self.alpha[1],
                alpha2_w_per_mw: self.alpha[2],
            },
            rx: RxPowerModel {
                beta0_w: self.beta[0],
                beta1_w_per_mbps: self.beta[1],
            },
            placeholder_constants: true,
        }
    }
}

/// The five bundled device profiles, in table order.
pub fn builtin_profiles() -> Vec<DeviceProfile> {
    BUILTINS.iter().map(Builtin::profile).collect()
}

/// Short identifiers accepted by [`builtin`].
pub fn builtin_slugs() -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().map(|b| b.slug)
}

/// Look up a bundled profile by slug (`raspberrypi-example`) or device name.
pub fn builtin(name: &str) -> Result<DeviceProfile> {
    let want = name.trim();
    let profile = BUILTINS
        .iter()
        .find(|b| b.slug.eq_ignore_ascii_case(want) || b.name.eq_ignore_ascii_case(want))
        .map(Builtin::profile)
        .ok_or_else(|| Error::UnknownProfile(name.to_string()))?;
    log::warn!(
        "profile `{}` uses placeholder idle power ({} W) and generation toll ({} mJ)",
        profile.name,
        profile.rho_id_w,
        profile.gamma_xg_mj
    );
    Ok(profile)
}

/// One power measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementRecord {
    pub mcs_mbps: f64,
    pub txp_mw: f64,
    pub rho_tx_w: f64,
    pub rho_rx_w: Option<f64>,
}

/// Measurement CSV header.
pub const MEASUREMENT_HEADER: [&str; 4] = ["mcs_mbps", "txp_mw", "rho_tx_w", "rho_rx_w"];

/// Read measurement records from CSV. `rho_rx_w` may be empty on any row.
pub fn read_measurements(reader: impl Read, source_name: &str) -> Result<Vec<MeasurementRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Csv(format!("{source_name}: {e}")))?;
    if headers.iter().ne(MEASUREMENT_HEADER) {
        return Err(Error::Parse {
            source_name: source_name.to_string(),
            line: 1,
            message: format!("expected header `{}`", MEASUREMENT_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::Csv(format!("{source_name}: {e}")))?;
        let field = |idx: usize| -> Result<Option<f64>> {
            let raw = row.get(idx).unwrap_or("");
            if raw.is_empty() {
                return Ok(None);
            }
            let v: f64 = raw.parse().map_err(|_| Error::Parse {
                source_name: source_name.to_string(),
                line,
                message: format!("`{}`: expected a number, got `{raw}`", MEASUREMENT_HEADER[idx]),
            })?;
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Parse {
                    source_name: source_name.to_string(),
                    line,
                    message: format!("`{}` must be positive, got {v}", MEASUREMENT_HEADER[idx]),
                });
            }
            Ok(Some(v))
        };
        let required = |idx: usize| -> Result<f64> {
            field(idx)?.ok_or_else(|| Error::Parse {
                source_name: source_name.to_string(),
                line,
                message: format!("`{}` is required", MEASUREMENT_HEADER[idx]),
            })
        };
        out.push(MeasurementRecord {
            mcs_mbps: required(0)?,
            txp_mw: required(1)?,
            rho_tx_w: required(2)?,
            rho_rx_w: field(3)?,
        });
    }
    Ok(out)
}

pub fn load_measurements(path: impl AsRef<Path>) -> Result<Vec<MeasurementRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_measurements(file, &path.display().to_string())
}

/// Noiseless records generated from a profile's power models.
pub fn synthetic_records(profile: &DeviceProfile, mcs_mbps: &[f64], txp_mw: &[f64]) -> Vec<MeasurementRecord> {
    let mut out = Vec::with_capacity(mcs_mbps.len() * txp_mw.len());
    for &mcs in mcs_mbps {
        for &txp in txp_mw {
            out.push(MeasurementRecord {
                mcs_mbps: mcs,
                txp_mw: txp,
                rho_tx_w: profile.tx.alpha0_w + profile.tx.alpha1_w_per_mbps * mcs + profile.tx.alpha2_w_per_mw * txp,
                rho_rx_w: Some(profile.rx.beta0_w + profile.rx.beta1_w_per_mbps * mcs),
            });
        }
    }
    out
}

/// One estimated coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
}

/// Least-squares fit of one power model.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub coefficients: Vec<Coefficient>,
    pub adjusted_r2: f64,
}

impl FitResult {
    pub fn estimate(&self, name: &str) -> Option<f64> {
        self.coefficients.iter().find(|c| c.name == name).map(|c| c.estimate)
    }

    /// `coefficient,estimate,stderr` rows followed by `adjusted_r2,<value>`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("coefficient,estimate,stderr\n");
        for c in &self.coefficients {
            let _ = writeln!(out, "{},{},{}", c.name, c.estimate, c.std_error);
        }
        let _ = writeln!(out, "adjusted_r2,{}", self.adjusted_r2);
        out
    }
}

/// Fit `rho_tx = alpha0 + alpha1·MCS + alpha2·TXP`.
pub fn fit_tx(records: &[MeasurementRecord]) -> Result<FitResult> {
    let mut pairs: Vec<(f64, f64)> = records.iter().map(|r| (r.mcs_mbps, r.txp_mw)).collect();
    pairs.sort_by(|a, b| a.partial_cmp(b).expect("finite measurements"));
    pairs.dedup();
    if pairs.len() < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            got: pairs.len(),
        });
    }
    let rows: Vec<Vec<f64>> = records.iter().map(|r| vec![1.0, r.mcs_mbps, r.txp_mw]).collect();
    let y: Vec<f64> = records.iter().map(|r| r.rho_tx_w).collect();
    ols(&rows, &y, &["alpha0", "alpha1", "alpha2"], &["intercept", "mcs_mbps", "txp_mw"])
}

/// Fit `rho_rx = beta0 + beta1·MCS` on the records that carry `rho_rx_w`.
pub fn fit_rx(records: &[MeasurementRecord]) -> Result<FitResult> {
    let used: Vec<(f64, f64)> = records
        .iter()
        .filter_map(|r| r.rho_rx_w.map(|rx| (r.mcs_mbps, rx)))
        .collect();
    if used.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: used.len(),
        });
    }
    let rows: Vec<Vec<f64>> = used.iter().map(|&(mcs, _)| vec![1.0, mcs]).collect();
    let y: Vec<f64> = used.iter().map(|&(_, rx)| rx).collect();
    ols(&rows, &y, &["beta0", "beta1"], &["intercept", "mcs_mbps"])
}

/// Ordinary least squares via Householder QR.
fn ols(rows: &[Vec<f64>], y: &[f64], names: &[&str], regressors: &[&str]) -> Result<FitResult> {
    let n = rows.len();
    let k = names.len();
    // Column-major copy of the design matrix.
    let mut a: Vec<Vec<f64>> = (0..k).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let norms: Vec<f64> = a.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    let mut b = y.to_vec();

    for j in 0..k {
        let alpha = {
            let s: f64 = a[j][j..].iter().map(|v| v * v).sum::<f64>().sqrt();
            if a[j][j] > 0.0 {
                -s
            } else {
                s
            }
        };
        if alpha.abs() <= 1e-10 * norms[j].max(f64::MIN_POSITIVE) {
            return Err(Error::RankDeficient(regressors[j].to_string()));
        }
        let mut v: Vec<f64> = a[j][j..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        let reflect = |col: &mut [f64]| {
            let dot: f64 = v.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot / vnorm2;
            for (c, vi) in col.iter_mut().zip(&v) {
                *c -= f * vi;
            }
        };
        for col in a.iter_mut().skip(j) {
            reflect(&mut col[j..]);
        }
        reflect(&mut b[j..]);
    }

    // R is a[j][i] for i <= j; solve R·beta = Qᵀy.
    let r = |i: usize, j: usize| a[j][i];
    let mut beta = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = ((i + 1)..k).map(|j| r(i, j) * beta[j]).sum();
        beta[i] = (b[i] - s) / r(i, i);
    }

    let rss: f64 = rows
        .iter()
        .zip(y)
        .map(|(row, &yi)| {
            let fit: f64 = row.iter().zip(&beta).map(|(x, c)| x * c).sum();
            (yi - fit).powi(2)
        })
        .sum();
    let mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let dof = (n - k) as f64;
    let sigma2 = rss / dof;

    // (RᵀR)⁻¹ = R⁻¹R⁻ᵀ
    let mut rinv = vec![vec![0.0; k]; k];
    for j in 0..k {
        rinv[j][j] = 1.0 / r(j, j);
        for i in (0..j).rev() {
            let s: f64 = ((i + 1)..=j).map(|m| r(i, m) * rinv[m][j]).sum();
            rinv[i][j] = -s / r(i, i);
        }
    }
    let coefficients = (0..k)
        .map(|i| {
            let var: f64 = (i..k).map(|j| rinv[i][j] * rinv[i][j]).sum::<f64>() * sigma2;
            Coefficient {
                name: names[i].to_string(),
                estimate: beta[i],
                std_error: var.max(0.0).sqrt(),
            }
        })
        .collect();

    let r2 = if tss > 0.0 { 1.0 - rss / tss } else { 1.0 };
    let adjusted_r2 = 1.0 - (1.0 - r2) * (n as f64 - 1.0) / dof;
    Ok(FitResult {
        coefficients,
        adjusted_r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};

    const RATES: [f64; 8] = [6.0, 9.0, 12.0, 18.0, 24.0, 36.0, 48.0, 54.0];

    #[test]
    fn table_values() {
        let all = builtin_profiles();
        assert_eq!(all.len(), 5);
        let names: Vec<&str> = all.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(
            names,
            ["HTC Legend", "Linksys WRT54G", "Raspberry Pi", "Galaxy Note 10.1", "Soekris net4826-48"]
        );
        let rpi = builtin("raspberrypi-example").unwrap();
        assert_eq!(
            (rpi.tx.alpha0_w, rpi.tx.alpha1_w_per_mbps, rpi.tx.alpha2_w_per_mw),
            (0.478, 0.0008, 0.044)
        );
        assert_eq!((rpi.rx.beta0_w, rpi.rx.beta1_w_per_mbps), (-0.0062, 0.00146));
        assert_eq!((rpi.rho_id_w, rpi.gamma_xg_mj), (2.0, 0.25));
        let soekris = builtin("Soekris net4826-48").unwrap();
        assert_eq!(
            (soekris.tx.alpha0_w, soekris.tx.alpha1_w_per_mbps, soekris.tx.alpha2_w_per_mw),
            (0.17, 0.0170, 0.101)
        );
        assert_eq!((soekris.rx.beta0_w, soekris.rx.beta1_w_per_mbps), (0.010, 0.0237));
        assert_eq!(builtin("galaxy-note-10.1-example").unwrap().tx.alpha1_w_per_mbps, 0.0017);
        assert!(all.iter().all(|p| p.placeholder_constants && p.validate().is_ok()));
        assert!(matches!(builtin("nokia"), Err(Error::UnknownProfile(_))));
    }

    #[test]
    fn noiseless_refit_recovers_every_profile() {
        for p in builtin_profiles() {
            let recs = synthetic_records(&p, &RATES, &[1.0, 10.0, 100.0]);
            let tx = fit_tx(&recs).unwrap();
            assert!((tx.estimate("alpha0").unwrap() - p.tx.alpha0_w).abs() < 1e-9);
            assert!((tx.estimate("alpha1").unwrap() - p.tx.alpha1_w_per_mbps).abs() < 1e-9);
            assert!((tx.estimate("alpha2").unwrap() - p.tx.alpha2_w_per_mw).abs() < 1e-9);
            assert!((tx.adjusted_r2 - 1.0).abs() < 1e-9);
            let rx = fit_rx(&recs).unwrap();
            assert!((rx.estimate("beta0").unwrap() - p.rx.beta0_w).abs() < 1e-9);
            assert!((rx.estimate("beta1").unwrap() - p.rx.beta1_w_per_mbps).abs() < 1e-9);
            assert!((rx.adjusted_r2 - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_response() {
        let recs: Vec<MeasurementRecord> = [(6.0, 1.0), (12.0, 5.0), (24.0, 1.0), (54.0, 50.0), (36.0, 20.0)]
            .iter()
            .map(|&(mcs, txp)| MeasurementRecord {
                mcs_mbps: mcs,
                txp_mw: txp,
                rho_tx_w: 1.25,
                rho_rx_w: None,
            })
            .collect();
        let fit = fit_tx(&recs).unwrap();
        assert!((fit.estimate("alpha0").unwrap() - 1.25).abs() < 1e-12);
        assert!(fit.estimate("alpha1").unwrap().abs() < 1e-12);
        assert!(fit.estimate("alpha2").unwrap().abs() < 1e-12);
        assert!(matches!(fit_rx(&recs), Err(Error::InsufficientData { needed: 3, got: 0 })));
    }

    #[test]
    fn underdetermined_and_collinear() {
        let p = builtin_profiles().remove(0);
        let two = synthetic_records(&p, &[6.0, 54.0], &[10.0]);
        assert!(matches!(fit_tx(&two), Err(Error::InsufficientData { needed: 4, got: 2 })));
        let one_txp = synthetic_records(&p, &RATES, &[10.0]);
        match fit_tx(&one_txp) {
            Err(Error::RankDeficient(name)) => assert_eq!(name, "txp_mw"),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
        let one_mcs = synthetic_records(&p, &[24.0], &[1.0, 10.0, 30.0, 100.0]);
        match fit_rx(&one_mcs) {
            Err(Error::RankDeficient(name)) => assert_eq!(name, "mcs_mbps"),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn fit_ignores_record_order() {
        let p = builtin("soekris-net4826-48-example").unwrap();
        let mut recs = synthetic_records(&p, &RATES, &[1.0, 3.0, 10.0, 30.0]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let noise = Normal::new(0.0, 0.01).unwrap();
        for r in &mut recs {
            r.rho_tx_w += noise.sample(&mut rng);
        }
        let a = fit_tx(&recs).unwrap();
        recs.reverse();
        recs.rotate_left(5);
        let b = fit_tx(&recs).unwrap();
        for (x, y) in a.coefficients.iter().zip(&b.coefficients) {
            assert_relative_eq!(x.estimate, y.estimate, max_relative = 1e-10);
            assert_relative_eq!(x.std_error, y.std_error, max_relative = 1e-8);
        }
    }

    #[test]
    fn noisy_estimates_within_three_standard_errors() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2016);
        let noise = Normal::new(0.0, 0.01).unwrap();
        for p in builtin_profiles() {
            let mut recs = synthetic_records(&p, &RATES, &[1.0, 10.0, 100.0]);
            for r in &mut recs {
                r.rho_tx_w += noise.sample(&mut rng);
                r.rho_rx_w = r.rho_rx_w.map(|v| v + noise.sample(&mut rng));
            }
            let tx = fit_tx(&recs).unwrap();
            let truth = [p.tx.alpha0_w, p.tx.alpha1_w_per_mbps, p.tx.alpha2_w_per_mw];
            for (c, t) in tx.coefficients.iter().zip(truth) {
                assert!((c.estimate - t).abs() <= 3.0 * c.std_error, "{}: {c:?} vs {t}", p.name);
                assert!(c.std_error > 0.0);
            }
            assert!(tx.adjusted_r2 <= 1.0);
            let rx = fit_rx(&recs).unwrap();
            for (c, t) in rx.coefficients.iter().zip([p.rx.beta0_w, p.rx.beta1_w_per_mbps]) {
                assert!((c.estimate - t).abs() <= 3.0 * c.std_error, "{}: {c:?} vs {t}", p.name);
            }
        }
    }

    #[test]
    fn standard_errors_match_closed_form_for_a_line() {
        // Simple regression: se(slope) = sigma / sqrt(Sxx).
        let xs = [6.0, 12.0, 24.0, 36.0, 54.0];
        let ys = [0.2, 0.31, 0.45, 0.6, 0.9];
        let recs: Vec<MeasurementRecord> = xs
            .iter()
            .zip(ys)
            .map(|(&x, y)| MeasurementRecord {
                mcs_mbps: x,
                txp_mw: 1.0,
                rho_tx_w: 1.0,
                rho_rx_w: Some(y),
            })
            .collect();
        let fit = fit_rx(&recs).unwrap();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let slope = sxy / sxx;
        let icpt = my - slope * mx;
        let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum();
        let sigma = (rss / (n - 2.0)).sqrt();
        let tss: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        assert_relative_eq!(fit.coefficients[1].estimate, slope, max_relative = 1e-12);
        assert_relative_eq!(fit.coefficients[1].std_error, sigma / sxx.sqrt(), max_relative = 1e-10);
        assert_relative_eq!(
            fit.coefficients[0].std_error,
            sigma * (1.0 / n + mx * mx / sxx).sqrt(),
            max_relative = 1e-10
        );
        let adj = 1.0 - (rss / tss) * (n - 1.0) / (n - 2.0);
        assert_relative_eq!(fit.adjusted_r2, adj, max_relative = 1e-12);
    }

    #[test]
    fn measurement_csv() {
        let text = "mcs_mbps,txp_mw,rho_tx_w,rho_rx_w\n6,10,0.5,0.1\n54, 100 ,2.0,\n";
        let recs = read_measurements(text.as_bytes(), "m.csv").unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[1].rho_rx_w, None);
        assert_eq!(recs[1].txp_mw, 100.0);
        let bad_header = "mcs,txp_mw,rho_tx_w,rho_rx_w\n";
        assert!(read_measurements(bad_header.as_bytes(), "m.csv").is_err());
        let negative = "mcs_mbps,txp_mw,rho_tx_w,rho_rx_w\n6,-1,0.5,\n";
        let e = read_measurements(negative.as_bytes(), "m.csv").unwrap_err();
        assert!(e.to_string().contains("txp_mw"), "{e}");
        let missing = "mcs_mbps,txp_mw,rho_tx_w,rho_rx_w\n6,1,,\n";
        assert!(read_measurements(missing.as_bytes(), "m.csv").is_err());
    }

    #[test]
    fn shipped_profile_file_matches_builtin() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/profiles/raspberrypi-example.profile");
        let mut loaded = DeviceProfile::load(path).unwrap();
        assert!(!loaded.placeholder_constants);
        loaded.placeholder_constants = true;
        assert_eq!(loaded, builtin("raspberrypi-example").unwrap());
    }

    #[test]
    fn report_format() {
        let fit = FitResult {
            coefficients: vec![Coefficient {
                name: "beta0".into(),
                estimate: 0.5,
                std_error: 0.25,
            }],
            adjusted_r2: 0.98,
        };
        assert_eq!(fit.to_csv(), "coefficient,estimate,stderr\nbeta0,0.5,0.25\nadjusted_r2,0.98\n");
    }
}
