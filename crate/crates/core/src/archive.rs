//! Plain-text archive of per-realization Green amplitudes.
//!
//! ```text
//! # realization-archive v1
//! # config: {"format_version":1,...}
//! # capture: injection
//! # columns: delta_over_C z realization re(G) im(G) [re(G) im(G) ...]
//! 1.5000000000000000e0 5.0000000000000000e0 0 3.1415926535897931e-1 -2.7182818284590451e-1
//! ```
//!
//! Reals are written with 17 significant digits, which round-trips every f64.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::config::ExperimentConfig;
use crate::ensemble::{ArchiveCapture, RealizationRecord};
use crate::error::{Error, Result};

const MAGIC: &str = "# realization-archive v1";
const CONFIG_PREFIX: &str = "# config: ";
const CAPTURE_PREFIX: &str = "# capture: ";
const COLUMNS: &str = "# columns: delta_over_C z realization re(G) im(G) [re(G) im(G) ...]";

#[derive(Debug, Clone, PartialEq)]
pub struct RealizationArchive {
    pub config: ExperimentConfig,
    pub capture: ArchiveCapture,
    pub records: Vec<RealizationRecord>,
}

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        what: "realization archive",
        line,
        reason: reason.into(),
    }
}

impl RealizationArchive {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(MAGIC);
        out.push('\n');
        let _ = writeln!(out, "{CONFIG_PREFIX}{}", self.config.to_json());
        let _ = writeln!(out, "{CAPTURE_PREFIX}{}", self.capture.as_str());
        out.push_str(COLUMNS);
        out.push('\n');
        for rec in &self.records {
            let _ = write!(
                out,
                "{:.16e} {:.16e} {}",
                rec.delta_over_c, rec.z, rec.realization_index
            );
            for v in &rec.values {
                let _ = write!(out, " {:.16e} {:.16e}", v.re, v.im);
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut header = |expect: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some((n, l)) if l.starts_with(expect) => Ok((n, l[expect.len()..].to_string())),
                Some((n, _)) => Err(parse_err(n, format!("expected `{expect}`"))),
                None => Err(parse_err(0, "truncated header")),
            }
        };
        header(MAGIC)?;
        let (n, json) = header(CONFIG_PREFIX)?;
        let config = ExperimentConfig::from_json(&json).map_err(|e| parse_err(n, e.to_string()))?;
        let (n, cap) = header(CAPTURE_PREFIX)?;
        let capture: ArchiveCapture = cap.trim().parse().map_err(|e: Error| parse_err(n, e.to_string()))?;
        header("# columns:")?;

        let width = match capture {
            ArchiveCapture::None => 0,
            ArchiveCapture::Injection => 1,
            ArchiveCapture::FullRow => config.lattice.guide_count,
        };
        let mut records = Vec::new();
        for (n, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_ascii_whitespace().collect();
            if fields.len() != 3 + 2 * width {
                return Err(parse_err(
                    n,
                    format!("expected {} fields, found {}", 3 + 2 * width, fields.len()),
                ));
            }
            let real = |s: &str| -> Result<f64> {
                s.parse::<f64>().map_err(|e| parse_err(n, format!("`{s}`: {e}")))
            };
            let realization_index = fields[2]
                .parse::<u64>()
                .map_err(|e| parse_err(n, format!("`{}`: {e}", fields[2])))?;
            let values = fields[3..]
                .chunks(2)
                .map(|p| Ok(Complex64::new(real(p[0])?, real(p[1])?)))
                .collect::<Result<Vec<_>>>()?;
            records.push(RealizationRecord {
                realization_index,
                delta_over_c: real(fields[0])?,
                z: real(fields[1])?,
                values,
            });
        }
        Ok(Self {
            config,
            capture,
            records,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }

    /// G_{j0,j0}(z) for every realization at (Δ/C, z), in realization order.
    pub fn injection_amplitudes(&self, delta_over_c: f64, z: f64) -> Result<Vec<Complex64>> {
        let j0 = match self.capture {
            ArchiveCapture::None => {
                return Err(Error::config(
                    "capture.archive",
                    "archive holds no amplitudes; rerun with archive = \"injection\" or \"full-row\"",
                ))
            }
            ArchiveCapture::Injection => 0,
            ArchiveCapture::FullRow => self.config.lattice.injection_index - 1,
        };
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
        let picked: Vec<Complex64> = self
            .records
            .iter()
            .filter(|r| close(r.delta_over_c, delta_over_c) && close(r.z, z))
            .map(|r| r.values[j0])
            .collect();
        if picked.is_empty() {
            return Err(Error::config(
                "delta_over_c/z",
                format!("archive has no records at Δ/C = {delta_over_c}, z = {z}"),
            ));
        }
        Ok(picked)
    }
}
