use std::path::Path;
use std::sync::OnceLock;

use super::CodeRate;
use crate::error::{Error, Result};

/// Format tag that must open every spectrum data file.
pub const SPECTRA_FORMAT: &str = "spectra-v1";

/// Minimum number of distance-spectrum terms required per code rate.
pub const MIN_TERMS: usize = 10;

const BUNDLED: &str = include_str!("../../data/spectra-v1.txt");

/// Distance spectrum of one (punctured) convolutional code.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpectrum {
    code_rate: CodeRate,
    /// `(d, a_d)` pairs with strictly increasing `d`.
    weights: Vec<(u32, u64)>,
}

impl CodeSpectrum {
    pub fn new(code_rate: CodeRate, weights: Vec<(u32, u64)>) -> Result<CodeSpectrum> {
        let fail = |message: String| Error::SpectrumFormat { line: 0, message };
        if weights.len() < MIN_TERMS {
            return Err(fail(format!(
                "rate {code_rate}: {} terms, need at least {MIN_TERMS}",
                weights.len()
            )));
        }
        if weights[0].0 != code_rate.free_distance() {
            return Err(fail(format!(
                "rate {code_rate}: first distance {} is not the free distance {}",
                weights[0].0,
                code_rate.free_distance()
            )));
        }
        if weights.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(fail(format!("rate {code_rate}: distances not strictly increasing")));
        }
        Ok(CodeSpectrum { code_rate, weights })
    }

    pub fn code_rate(&self) -> CodeRate {
        self.code_rate
    }

    pub fn free_distance(&self) -> u32 {
        self.weights[0].0
    }

    pub fn weights(&self) -> &[(u32, u64)] {
        &self.weights
    }
}

/// The set of code spectra used by the packet error model, one per code rate.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    spectra: Vec<CodeSpectrum>,
}

impl SpectrumTable {
    /// Parse a `spectra-v1` table.
    ///
    /// Blank lines and `#` comments are ignored. The first record must be
    /// `format spectra-v1`; every following record is `<rate> <d> <a_d>`.
    pub fn parse(text: &str) -> Result<SpectrumTable> {
        let mut header_seen = false;
        let mut rows: Vec<(CodeRate, Vec<(u32, u64)>)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::SpectrumFormat {
                line: line_no,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if !header_seen {
                match fields.as_slice() {
                    ["format", tag] if *tag == SPECTRA_FORMAT => {
                        header_seen = true;
                        continue;
                    }
                    ["format", tag] => return Err(err(format!("unsupported format `{tag}`"))),
                    _ => return Err(err(format!("expected `format {SPECTRA_FORMAT}` header"))),
                }
            }
            let [rate, d, a] = fields.as_slice() else {
                return Err(err(format!("expected `<rate> <d> <a_d>`, got `{line}`")));
            };
            let rate = CodeRate::parse(rate).ok_or_else(|| err(format!("unknown code rate `{rate}`")))?;
            let d: u32 = d.parse().map_err(|_| err(format!("bad distance `{d}`")))?;
            let a: u64 = a.parse().map_err(|_| err(format!("bad multiplicity `{a}`")))?;
            match rows.iter_mut().find(|(r, _)| *r == rate) {
                Some((_, w)) => w.push((d, a)),
                None => rows.push((rate, vec![(d, a)])),
            }
        }
        if !header_seen {
            return Err(Error::SpectrumFormat {
                line: 0,
                message: format!("missing `format {SPECTRA_FORMAT}` header"),
            });
        }
        let spectra = rows
            .into_iter()
            .map(|(rate, w)| CodeSpectrum::new(rate, w))
            .collect::<Result<Vec<_>>>()?;
        Ok(SpectrumTable { spectra })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<SpectrumTable> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Table shipped with the crate, parsed once.
    pub fn bundled() -> &'static SpectrumTable {
        static TABLE: OnceLock<SpectrumTable> = OnceLock::new();
        TABLE.get_or_init(|| SpectrumTable::parse(BUNDLED).expect("bundled spectra-v1 table is valid"))
    }

    pub fn get(&self, rate: CodeRate) -> Result<&CodeSpectrum> {
        self.spectra
            .iter()
            .find(|s| s.code_rate == rate)
            .ok_or_else(|| Error::MissingSpectrum(rate.to_string()))
    }

    pub fn spectra(&self) -> &[CodeSpectrum] {
        &self.spectra
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table_covers_all_rates() {
        let t = SpectrumTable::bundled();
        for rate in CodeRate::ALL {
            let s = t.get(rate).unwrap();
            assert_eq!(s.free_distance(), rate.free_distance());
            assert!(s.weights().len() >= MIN_TERMS);
        }
        assert_eq!(t.get(CodeRate::Half).unwrap().weights()[0], (10, 11));
        assert_eq!(t.get(CodeRate::ThreeQuarters).unwrap().weights()[0], (5, 8));
    }

    #[test]
    fn header_is_required() {
        let body = "1/2 10 11\n";
        assert!(matches!(SpectrumTable::parse(body), Err(Error::SpectrumFormat { line: 1, .. })));
        assert!(SpectrumTable::parse("format spectra-v2\n").is_err());
        assert!(SpectrumTable::parse("# only comments\n").is_err());
    }

    #[test]
    fn rejects_malformed_records() {
        let bad_rate = "format spectra-v1\n5/6 3 1\n";
        assert!(matches!(SpectrumTable::parse(bad_rate), Err(Error::SpectrumFormat { line: 2, .. })));
        assert!(SpectrumTable::parse("format spectra-v1\n1/2 10\n").is_err());
        assert!(SpectrumTable::parse("format spectra-v1\n1/2 ten 11\n").is_err());
    }

    #[test]
    fn rejects_short_or_unordered_spectra() {
        let short = "format spectra-v1\n1/2 10 11\n1/2 12 38\n";
        assert!(SpectrumTable::parse(short).is_err());

        let mut unordered = String::from("format spectra-v1\n");
        for d in [5, 7, 6, 8, 9, 10, 11, 12, 13, 14] {
            unordered.push_str(&format!("3/4 {d} 1\n"));
        }
        assert!(SpectrumTable::parse(&unordered).is_err());

        let mut wrong_free = String::from("format spectra-v1\n");
        for d in 6..16 {
            wrong_free.push_str(&format!("3/4 {d} 1\n"));
        }
        assert!(SpectrumTable::parse(&wrong_free).is_err());
    }

    #[test]
    fn missing_rate_is_a_configuration_error() {
        let mut text = String::from("format spectra-v1\n");
        for d in 5..15 {
            text.push_str(&format!("3/4 {d} 1\n"));
        }
        let t = SpectrumTable::parse(&text).unwrap();
        assert!(t.get(CodeRate::ThreeQuarters).is_ok());
        assert!(matches!(t.get(CodeRate::Half), Err(Error::MissingSpectrum(_))));
    }
}
