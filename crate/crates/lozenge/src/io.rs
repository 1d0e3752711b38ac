//! File formats: hole systems and limit configurations as JSON, CSV tables, atomic writes.

use crate::error::{CliError, Result};
use lozenge_core::continuum::{LimitConfig, LimitProbe, NegativeCharge, PositiveCharge};
use lozenge_core::lattice::{HoleKind, HoleSystem, MultiHole, ObliqueCoord};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoleFile {
    pub multiholes: Vec<MultiHoleRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiHoleRecord {
    pub kind: String,
    /// Slope as "p/q" or "p".
    pub q: String,
    pub indices: Vec<i64>,
    pub anchor: [i64; 2],
}

pub fn format_ratio(r: &Ratio<i64>) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_ratio(s: &str) -> Result<Ratio<i64>> {
    let bad = || CliError::config("bad_rational", format!("not a rational number: {s:?}"));
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: i64 = n.parse().map_err(|_| bad())?;
    let d: i64 = d.parse().map_err(|_| bad())?;
    if d == 0 {
        return Err(bad());
    }
    Ok(Ratio::new(n, d))
}

impl HoleFile {
    pub fn from_system(hs: &HoleSystem) -> Self {
        HoleFile {
            multiholes: hs
                .multiholes
                .iter()
                .map(|m| MultiHoleRecord {
                    kind: match m.kind {
                        HoleKind::E => "E".into(),
                        HoleKind::W => "W".into(),
                    },
                    q: format_ratio(&m.q),
                    indices: m.indices.clone(),
                    anchor: [m.anchor.x, m.anchor.y],
                })
                .collect(),
        }
    }

    /// Converts to a hole system and checks that its holes are well formed and disjoint.
    pub fn to_system(&self) -> Result<HoleSystem> {
        let mut out = Vec::with_capacity(self.multiholes.len());
        for (i, m) in self.multiholes.iter().enumerate() {
            let kind = match m.kind.as_str() {
                "E" => HoleKind::E,
                "W" => HoleKind::W,
                k => return Err(CliError::config("bad_hole_kind", format!("multihole {i}: kind {k:?} is not E or W"))),
            };
            if m.indices.is_empty() {
                return Err(CliError::config("empty_multihole", format!("multihole {i} has no indices")));
            }
            out.push(MultiHole {
                kind,
                q: parse_ratio(&m.q)?,
                indices: m.indices.clone(),
                anchor: ObliqueCoord::new(m.anchor[0], m.anchor[1]),
            });
        }
        let hs = HoleSystem::new(out);
        lozenge_core::lattice::validate_system(&hs, &[])?;
        Ok(hs)
    }
}

pub fn parse_holes(text: &str) -> Result<HoleSystem> {
    let f: HoleFile =
        serde_json::from_str(text).map_err(|e| CliError::config("config_parse", format!("hole file: {e}")))?;
    f.to_system()
}

pub fn holes_to_json(hs: &HoleSystem) -> String {
    serde_json::to_string_pretty(&HoleFile::from_system(hs)).expect("hole records always serialize")
}

pub fn read_holes(path: &Path) -> Result<HoleSystem> {
    parse_holes(&read_text(path)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositiveRecord {
    pub x: f64,
    pub y: f64,
    pub s: u32,
    #[serde(default)]
    pub alpha: i64,
    #[serde(default)]
    pub beta: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NegativeRecord {
    pub z: f64,
    pub w: f64,
    pub t: u32,
    #[serde(default)]
    pub gamma: i64,
    #[serde(default)]
    pub delta: i64,
}

/// Scaled charges for the continuum commands; the probe comes from the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitFile {
    #[serde(default = "one")]
    pub q: String,
    pub positives: Vec<PositiveRecord>,
    #[serde(default)]
    pub negatives: Vec<NegativeRecord>,
}

fn one() -> String {
    "1".into()
}

impl LimitFile {
    pub fn to_config(&self, probe: LimitProbe) -> Result<LimitConfig> {
        let cfg = LimitConfig {
            positives: self
                .positives
                .iter()
                .map(|p| PositiveCharge { x: p.x, y: p.y, s: p.s, alpha: p.alpha, beta: p.beta })
                .collect(),
            negatives: self
                .negatives
                .iter()
                .map(|n| NegativeCharge { z: n.z, w: n.w, t: n.t, gamma: n.gamma, delta: n.delta })
                .collect(),
            q: parse_ratio(&self.q)?,
            probe,
        };
        if cfg.positives.iter().any(|p| p.s == 0) || cfg.negatives.iter().any(|n| n.t == 0) {
            return Err(CliError::config("empty_multihole", "charge multiplicities must be positive"));
        }
        Ok(cfg)
    }
}

pub fn read_limit_file(path: &Path) -> Result<LimitFile> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::config("config_parse", format!("{}: {e}", path.display())))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// Seventeen significant digits, enough to round-trip any f64.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV table built in memory so it can be written in one atomic step.
#[derive(Clone, Debug, Default)]
pub struct Csv {
    text: String,
    width: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Csv { text, width: header.len() }
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: &[S]) {
        debug_assert_eq!(cells.len(), self.width);
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            self.text.push_str(c.as_ref());
        }
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

/// Writes through a temporary sibling and a rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io_err = |source| CliError::Io { path: path.display().to_string(), source };
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(io_err)?;
    f.write_all(bytes).and_then(|_| f.sync_all()).map_err(io_err)?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io_err(e)
    })
}

/// Sends an artifact to `out`, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

/// Parses a comma-separated list of `n` integers.
pub fn parse_ints(s: &str, n: usize, what: &str) -> Result<Vec<i64>> {
    let v: std::result::Result<Vec<i64>, _> = s.split(',').map(|t| t.trim().parse::<i64>()).collect();
    match v {
        Ok(v) if v.len() == n => Ok(v),
        _ => Err(CliError::config("bad_list", format!("{what}: expected {n} comma-separated integers, got {s:?}"))),
    }
}

pub fn parse_floats(s: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let v: std::result::Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    match v {
        Ok(v) if v.len() == n && v.iter().all(|x| x.is_finite()) => Ok(v),
        _ => Err(CliError::config("bad_list", format!("{what}: expected {n} comma-separated numbers, got {s:?}"))),
    }
}
