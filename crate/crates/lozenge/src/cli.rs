//! Argument parsing and subcommand dispatch.

use crate::cache::{covering_table, worker_pool, CouplingCache};
use crate::error::{CliError, Result};
use crate::io::{self, float, Csv};
use crate::verify::{self, VerifyReport};
use clap::{Parser, Subcommand};
use lozenge_core::continuum::{
    coulomb_field, coulomb_field_polar, LimitConfig, LimitProbe, NegativeCharge, PositiveCharge,
};
use lozenge_core::correlation::{
    discrete_field, hole_triangles, placement_probability, CorrelationOptions, FieldSample, FloatCorrelator,
};
use lozenge_core::coupling::{CouplingTable, UFitConfig};
use lozenge_core::exact::rat_to_f64;
use lozenge_core::lattice::{l, mod3, r, HoleKind, HoleSystem, LozengeDir, LozengeLocation, Monomer, ObliqueCoord};
use lozenge_core::oracle::{count_tilings, oracle_probability, torus_count, torus_ratio, Region, TorusSpec};
use lozenge_core::surface::{
    average_surface, compare_to_helicoids, hole_helicoids, obj_mesh, surface_lozenges, CutFamily, EdgeModel,
    MultiSheetSurface, Window,
};
use lozenge_core::Error;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

/// Exact and asymptotic lozenge tiling correlations with holes.
#[derive(Debug, Parser)]
#[command(name = "lozenge", version, args_override_self = true)]
pub struct RunConfig {
    /// JSON object of flag values; its entries override the same flags on the command line.
    #[arg(long, global = true, value_name = "FILE")]
    pub run: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact coupling value P(x, y) = p + r·(√3/π).
    #[command(args_override_self = true)]
    Coupling {
        #[arg(long, allow_hyphen_values = true)]
        x: i64,
        #[arg(long, allow_hyphen_values = true)]
        y: i64,
        /// Print only the exact pair.
        #[arg(long, conflicts_with = "float")]
        exact: bool,
        /// Print only the float value.
        #[arg(long)]
        float: bool,
    },
    /// Exact coupling values on the box |x|, |y| ≤ N as CSV.
    #[command(args_override_self = true)]
    CouplingTable {
        #[arg(long)]
        range: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Covering probabilities and the discrete field on a grid of probe triangles.
    #[command(args_override_self = true)]
    Field {
        #[arg(long)]
        holes: PathBuf,
        /// grid:x0,y0,x1,y1 (inclusive, both orientations at every position).
        #[arg(long, allow_hyphen_values = true)]
        probes: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Use the floating-point bordered solver instead of exact determinants.
        #[arg(long)]
        float: bool,
    },
    /// The limiting Coulomb field of scaled charges on a grid.
    #[command(args_override_self = true)]
    Coulomb {
        #[arg(long)]
        config: PathBuf,
        /// x0,y0,x1,y1,nx,ny in scaled oblique coordinates.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long = "R", default_value_t = 1.0)]
        r: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Discrete field against the Coulomb limit over a list of scales.
    #[command(args_override_self = true)]
    Converge {
        /// Holes with anchors in scaled units; anchors are multiplied by each R.
        #[arg(long)]
        holes: PathBuf,
        /// Scaled probe position x,y; the lattice probe is the left triangle nearest to R·(x,y).
        #[arg(long, allow_hyphen_values = true)]
        probe: String,
        #[arg(long = "R-list")]
        r_list: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Average height surface as an OBJ mesh, optionally compared with the helicoid sum.
    #[command(args_override_self = true)]
    Surface {
        #[arg(long)]
        holes: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        /// Scale of the comparison: holes are excluded within 0.75·R lattice units.
        #[arg(long = "R", default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 1)]
        sheets: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print a JSON report comparing the sheet with the helicoid sum.
        #[arg(long)]
        compare: bool,
        /// Where to write the comparison report instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Executable checks; exit status 1 on any violation.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Independent tiling counts by enumeration and Kasteleyn determinants.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    #[command(args_override_self = true)]
    Identity31 {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    #[command(args_override_self = true)]
    Lemma33 {
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    #[command(args_override_self = true)]
    Lemma34 {
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    #[command(args_override_self = true)]
    Symmetries {
        #[arg(long, default_value_t = 30)]
        range: i64,
    },
    #[command(args_override_self = true)]
    Circulation {
        #[arg(long)]
        holes: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        /// Spacing of the loop corners.
        #[arg(long, default_value_t = 1)]
        stride: i64,
    },
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Number of tilings of a hexagon, minus holes if given.
    #[command(args_override_self = true)]
    Count {
        /// hex:a,b,c
        #[arg(long)]
        region: String,
        #[arg(long)]
        holes: Option<PathBuf>,
    },
    /// Exact finite-region probability of a lozenge against the whole-plane correlation.
    #[command(args_override_self = true)]
    Compare {
        #[arg(long)]
        region: String,
        #[arg(long)]
        holes: PathBuf,
        /// x,y,dir with dir one of 0, 120, 240.
        #[arg(long, allow_hyphen_values = true)]
        lozenge: String,
    },
    /// Tilings of the N×N torus, and the ratio with and without holes.
    #[command(args_override_self = true)]
    Torus {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        holes: Option<PathBuf>,
    },
}

/// Parses, runs, reports errors on stderr and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match apply_run_file(args) {
        Ok(a) => a,
        Err(e) => return report(&e),
    };
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cfg) {
        Ok(()) => 0,
        Err(e) => report(&e),
    }
}

fn report(e: &CliError) -> i32 {
    eprintln!("error[{}]: {}", e.code(), e);
    e.exit_code()
}

/// Appends `--key value` for every entry of the `--run` file; later flags win.
fn apply_run_file(mut args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(pos) = args.iter().position(|a| a == "--run" || a.to_string_lossy().starts_with("--run=")) else {
        return Ok(args);
    };
    let path = match args[pos].to_string_lossy().strip_prefix("--run=") {
        Some(p) => PathBuf::from(p),
        None => match args.get(pos + 1) {
            Some(p) => PathBuf::from(p),
            None => return Err(CliError::config("config_parse", "--run needs a file")),
        },
    };
    let text = io::read_text(&path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::config("config_parse", format!("{}: {e}", path.display())))?;
    let serde_json::Value::Object(map) = value else {
        return Err(CliError::config("config_parse", "run file must be a JSON object"));
    };
    for (k, v) in map {
        let flag = OsString::from(format!("--{k}"));
        match v {
            serde_json::Value::Bool(true) => args.push(flag),
            serde_json::Value::Bool(false) | serde_json::Value::Null => {}
            serde_json::Value::String(s) => args.extend([flag, s.into()]),
            serde_json::Value::Number(n) => args.extend([flag, n.to_string().into()]),
            serde_json::Value::Array(items) => {
                let parts: Vec<String> = items
                    .iter()
                    .map(|i| match i {
                        serde_json::Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                args.extend([flag, parts.join(",").into()]);
            }
            serde_json::Value::Object(_) => {
                return Err(CliError::config("config_parse", format!("run file entry {k:?} must not be an object")))
            }
        }
    }
    Ok(args)
}

pub fn dispatch(cfg: &RunConfig) -> Result<()> {
    match &cfg.command {
        Command::Coupling { x, y, exact, float: only_float } => {
            let v = lozenge_core::coupling::coupling_p(*x, *y);
            let mut s = String::new();
            if !only_float {
                s.push_str(&format!("{v}\n"));
            }
            if !exact {
                s.push_str(&format!("{}\n", float(v.to_f64_auto())));
            }
            io::emit(None, &s)
        }
        Command::CouplingTable { range, out } => io::emit(out.as_deref(), coupling_table(*range as i64).as_str()),
        Command::Field { holes, probes, out, float: use_float } => {
            let hs = io::read_holes(holes)?;
            let csv = field_table(&hs, &parse_grid(probes)?, *use_float)?;
            io::emit(out.as_deref(), csv.as_str())
        }
        Command::Coulomb { config, grid, r, out } => {
            let file = io::read_limit_file(config)?;
            let g = io::parse_floats(grid, 6, "--grid")?;
            let csv = coulomb_table(&file, &g, *r)?;
            io::emit(out.as_deref(), csv.as_str())
        }
        Command::Converge { holes, probe, r_list, out } => {
            let text = io::read_text(holes)?;
            let hs = io::parse_holes(&text)?;
            let p = io::parse_floats(probe, 2, "--probe")?;
            let rs: Vec<i64> = r_list
                .split(',')
                .map(|t| t.trim().parse::<i64>().ok().filter(|&v| v > 0))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| {
                    CliError::config("bad_list", format!("--R-list: expected positive integers, got {r_list:?}"))
                })?;
            let csv = converge_table(&hs, (p[0], p[1]), &rs)?;
            io::emit(out.as_deref(), csv.as_str())
        }
        Command::Surface { holes, window, r, sheets, out, compare, report } => {
            if *compare && out.is_none() && report.is_none() {
                return Err(CliError::config(
                    "config_parse",
                    "--compare with the mesh on stdout needs --out or --report",
                ));
            }
            let hs = io::read_holes(holes)?;
            let w = io::parse_ints(window, 4, "--window")?;
            let s = surface_run(&hs, &Window::new(w[0], w[1], w[2], w[3]), *r, *sheets, *compare)?;
            io::emit(out.as_deref(), &s.obj)?;
            if let Some(rep) = s.report {
                let mut text = serde_json::to_string_pretty(&rep).expect("report serializes");
                text.push('\n');
                io::emit(report.as_deref(), &text)?;
            }
            Ok(())
        }
        Command::Verify(v) => {
            let rep = match v {
                VerifyCommand::Identity31 { trials, seed } => verify::identity31(*trials, *seed)?,
                VerifyCommand::Lemma33 { trials, seed } => verify::lemma33(*trials, *seed),
                VerifyCommand::Lemma34 { trials, seed } => verify::lemma34(*trials, *seed),
                VerifyCommand::Symmetries { range } => verify::symmetries(*range),
                VerifyCommand::Circulation { holes, window, stride } => {
                    let hs = io::read_holes(holes)?;
                    let w = io::parse_ints(window, 4, "--window")?;
                    verify::circulation(&hs, &Window::new(w[0], w[1], w[2], w[3]), *stride)?
                }
            };
            finish_verify(&rep)
        }
        Command::Oracle(o) => io::emit(None, &oracle_run(o)?),
    }
}

fn finish_verify(rep: &VerifyReport) -> Result<()> {
    io::emit(None, &format!("{}\n", rep.summary()))?;
    if rep.passed() {
        Ok(())
    } else {
        Err(CliError::Verification(format!("{} failed", rep.name)))
    }
}

pub fn coupling_table(range: i64) -> Csv {
    let t = CouplingTable::new(-range, range, -range, range);
    let mut csv = Csv::new(&["x", "y", "p_num", "p_den", "r_num", "r_den", "float"]);
    for x in -range..=range {
        for y in -range..=range {
            let v = t.get(x, y).expect("inside the table");
            csv.row(&[
                x.to_string(),
                y.to_string(),
                v.p.numer().to_string(),
                v.p.denom().to_string(),
                v.r.numer().to_string(),
                v.r.denom().to_string(),
                float(v.to_f64_auto()),
            ]);
        }
    }
    csv
}

/// Probe triangles of `grid:x0,y0,x1,y1`, row by row, left before right at each position.
pub fn parse_grid(spec: &str) -> Result<Vec<Monomer>> {
    let Some(body) = spec.strip_prefix("grid:") else {
        return Err(CliError::config("bad_probes", format!("probe spec {spec:?} must start with grid:")));
    };
    let g = io::parse_ints(body, 4, "--probes")?;
    let (x0, x1) = (g[0].min(g[2]), g[0].max(g[2]));
    let (y0, y1) = (g[1].min(g[3]), g[1].max(g[3]));
    if (x1 - x0 + 1) * (y1 - y0 + 1) > 1_000_000 {
        return Err(CliError::config("bad_probes", "probe grid larger than 10^6 positions"));
    }
    let mut out = Vec::new();
    for y in y0..=y1 {
        for x in x0..=x1 {
            out.push(l(x, y));
            out.push(r(x, y));
        }
    }
    Ok(out)
}

/// One row per probe not inside a hole, in probe order whatever the worker count.
pub fn field_table(hs: &HoleSystem, probes: &[Monomer], use_float: bool) -> Result<Csv> {
    let tris = hole_triangles(hs)?;
    let probes: Vec<Monomer> = probes.iter().copied().filter(|m| !tris.contains(m)).collect();
    let pool = worker_pool();
    let samples: Vec<std::result::Result<FieldSample, Error>> = if use_float {
        let (mut x0, mut y0, mut x1, mut y1) = (0, 0, 0, 0);
        for (i, m) in probes.iter().enumerate() {
            if i == 0 {
                (x0, y0, x1, y1) = (m.pos.x, m.pos.y, m.pos.x, m.pos.y);
            }
            (x0, y0) = (x0.min(m.pos.x), y0.min(m.pos.y));
            (x1, y1) = (x1.max(m.pos.x), y1.max(m.pos.y));
        }
        let table = covering_table(hs, x0, y0, x1, y1)?;
        let fc = FloatCorrelator::new(|x, y| table.value(x, y), hs, UFitConfig::default())?;
        pool.install(|| probes.par_iter().map(|&m| fc.field(m, &tris)).collect())
    } else {
        let cache = CouplingCache::new();
        let opts = CorrelationOptions::default();
        pool.install(|| probes.par_iter().map(|&m| discrete_field(&cache, m, hs, &opts)).collect())
    };
    let mut csv =
        Csv::new(&["index", "x", "y", "orientation", "p1", "p2", "p3", "fx", "fy", "exactness", "sum_is_one"]);
    for (i, s) in samples.into_iter().enumerate() {
        let s = s?;
        csv.row(&[
            i.to_string(),
            s.probe.pos.x.to_string(),
            s.probe.pos.y.to_string(),
            if s.probe.is_left() { "L".into() } else { "R".into() },
            float(s.p[0]),
            float(s.p[1]),
            float(s.p[2]),
            float(s.fx),
            float(s.fy),
            s.exactness.as_str().into(),
            match s.exact_sum_is_one {
                Some(b) => b.to_string(),
                None => "na".into(),
            },
        ]);
    }
    Ok(csv)
}

fn grid_axis(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Oblique projections and the Cartesian vector of the limit field; `nan` where the probe sits on a charge.
pub fn coulomb_table(file: &io::LimitFile, g: &[f64], r: f64) -> Result<Csv> {
    if !(r > 0.0) || g[4] < 1.0 || g[5] < 1.0 || g[4].fract() != 0.0 || g[5].fract() != 0.0 {
        return Err(CliError::config("bad_grid", "--R must be positive and nx, ny positive integers"));
    }
    let mut csv = Csv::new(&["x", "y", "fx", "fy", "ex", "ey"]);
    for y in grid_axis(g[1], g[3], g[5] as usize) {
        for x in grid_axis(g[0], g[2], g[4] as usize) {
            let cfg = file.to_config(LimitProbe { x, y, alpha: 0, beta: 0 })?;
            let cells = match (coulomb_field(&cfg, r), coulomb_field_polar(&cfg, r)) {
                (Ok(f), Ok(e)) => [f.0, f.1, e.0, e.1].map(float),
                (Err(Error::CoincidentPoints), _) | (_, Err(Error::CoincidentPoints)) => {
                    ["nan", "nan", "nan", "nan"].map(String::from)
                }
                (Err(e), _) | (_, Err(e)) => return Err(e.into()),
            };
            csv.row(&[float(x), float(y), cells[0].clone(), cells[1].clone(), cells[2].clone(), cells[3].clone()]);
        }
    }
    Ok(csv)
}

/// The limit configuration of a hole system whose anchors are scaled positions.
pub fn limit_config(hs: &HoleSystem, probe: (f64, f64)) -> Result<LimitConfig> {
    let mut q = None;
    let mut cfg = LimitConfig {
        positives: Vec::new(),
        negatives: Vec::new(),
        q: num_rational::Ratio::from_integer(1),
        probe: LimitProbe { x: probe.0, y: probe.1, alpha: 0, beta: 0 },
    };
    for m in &hs.multiholes {
        if m.len() > 1 {
            match q {
                None => q = Some(m.q),
                Some(q0) if q0 != m.q => {
                    return Err(CliError::config(
                        "mixed_slopes",
                        "multiholes with several constituents must share one slope",
                    ))
                }
                _ => {}
            }
        }
        let (x, y) = (m.anchor.x as f64, m.anchor.y as f64);
        let (ra, rb) = (mod3(m.anchor.x), mod3(m.anchor.y));
        match m.kind {
            HoleKind::E => cfg.positives.push(PositiveCharge { x, y, s: m.len() as u32, alpha: ra, beta: rb }),
            HoleKind::W => cfg.negatives.push(NegativeCharge { z: x, w: y, t: m.len() as u32, gamma: ra, delta: rb }),
        }
    }
    if let Some(q) = q {
        cfg.q = q;
    }
    Ok(cfg)
}

fn scale_anchors(hs: &HoleSystem, r: i64) -> HoleSystem {
    let mut out = hs.clone();
    for m in &mut out.multiholes {
        m.anchor = ObliqueCoord::new(m.anchor.x * r, m.anchor.y * r);
    }
    out
}

/// R, R·F at the lattice probe nearest R·probe, the Coulomb limit there, and the relative error.
pub fn converge_table(hs: &HoleSystem, probe: (f64, f64), rs: &[i64]) -> Result<Csv> {
    let cache = CouplingCache::new();
    let opts = CorrelationOptions::default();
    let rows: Vec<Result<Vec<String>>> = worker_pool().install(|| {
        rs.par_iter()
            .map(|&rr| {
                let scaled = scale_anchors(hs, rr);
                let e = l((probe.0 * rr as f64).round() as i64, (probe.1 * rr as f64).round() as i64);
                let f = discrete_field(&cache, e, &scaled, &opts)?;
                let at = (e.pos.x as f64 / rr as f64, e.pos.y as f64 / rr as f64);
                let c = coulomb_field(&limit_config(hs, at)?, 1.0)?;
                let (fx, fy) = (rr as f64 * f.fx, rr as f64 * f.fy);
                let err = ((fx - c.0).powi(2) + (fy - c.1).powi(2)).sqrt() / (c.0.powi(2) + c.1.powi(2)).sqrt();
                Ok(vec![
                    rr.to_string(),
                    e.pos.x.to_string(),
                    e.pos.y.to_string(),
                    float(fx),
                    float(fy),
                    float(c.0),
                    float(c.1),
                    float(err),
                    f.exactness.as_str().into(),
                ])
            })
            .collect()
    });
    let mut csv =
        Csv::new(&["R", "probe_x", "probe_y", "R_fx", "R_fy", "limit_fx", "limit_fy", "rel_err", "exactness"]);
    for row in rows {
        csv.row(&row?);
    }
    Ok(csv)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurfaceReport {
    pub max_abs: f64,
    pub mean_abs: f64,
    pub grad_max_rel: f64,
    pub grad_rms_rel: f64,
    pub samples: usize,
    pub exclusion: f64,
    pub residual: f64,
}

pub struct SurfaceOutput {
    pub obj: String,
    pub report: Option<SurfaceReport>,
}

pub fn surface_run(hs: &HoleSystem, window: &Window, r: f64, sheets: usize, compare: bool) -> Result<SurfaceOutput> {
    if !(r > 0.0) || sheets == 0 {
        return Err(CliError::config("config_parse", "--R and --sheets must be positive"));
    }
    let tris = hole_triangles(hs)?;
    let cuts = CutFamily::eastward(hs)?;
    let table = covering_table(hs, window.x0 - 1, window.y0 - 1, window.x1 + 1, window.y1 + 1)?;
    let fc = FloatCorrelator::new(|x, y| table.value(x, y), hs, UFitConfig::default())?;
    let lozenges = surface_lozenges(hs, window)?;
    let probs: Vec<std::result::Result<f64, Error>> =
        worker_pool().install(|| lozenges.par_iter().map(|&lz| fc.probability(lz)).collect());
    let mut known: HashMap<LozengeLocation, f64> = HashMap::with_capacity(lozenges.len());
    for (lz, p) in lozenges.iter().zip(probs) {
        known.insert(*lz, p?);
    }
    let prob = |lz: LozengeLocation| match known.get(&lz) {
        Some(p) => *p,
        None => fc.probability(lz).unwrap_or(f64::NAN),
    };
    let sheet = average_surface(hs, window, &cuts, prob)?;
    let report = if compare {
        let model = EdgeModel::new(&prob, &tris);
        let exclusion = 0.75 * r;
        let c = compare_to_helicoids(&sheet, &hole_helicoids(hs)?, exclusion, &model)?;
        Some(SurfaceReport {
            max_abs: c.max_abs,
            mean_abs: c.mean_abs,
            grad_max_rel: c.grad_max_rel,
            grad_rms_rel: c.grad_rms_rel,
            samples: c.samples,
            exclusion,
            residual: sheet.residual,
        })
    } else {
        None
    };
    let obj = obj_mesh(&MultiSheetSurface::new(sheet), sheets, &tris, &cuts);
    Ok(SurfaceOutput { obj, report })
}

fn parse_hexagon(spec: &str) -> Result<(i64, i64, i64)> {
    let Some(body) = spec.strip_prefix("hex:") else {
        return Err(CliError::config("bad_region", format!("region {spec:?} must be hex:a,b,c")));
    };
    let v = io::parse_ints(body, 3, "--region")?;
    if v.iter().any(|&s| s < 1) {
        return Err(CliError::config("bad_region", "hexagon sides must be positive"));
    }
    Ok((v[0], v[1], v[2]))
}

/// The hexagon, centered on the mean hole centroid when there are holes, with the holes removed.
fn oracle_region(spec: &str, hs: Option<&HoleSystem>) -> Result<Region> {
    let (a, b, c) = parse_hexagon(spec)?;
    let Some(hs) = hs.filter(|h| !h.multiholes.is_empty()) else {
        return Ok(Region::hexagon(a, b, c));
    };
    let holes = hs.holes()?;
    let n = holes.len() as f64;
    let center = holes.iter().fold((0.0, 0.0), |acc, h| {
        let p = h.centroid_cartesian();
        (acc.0 + p.0 / n, acc.1 + p.1 / n)
    });
    Ok(Region::hexagon_centered(a, b, c, center).remove_holes(hs)?)
}

fn parse_lozenge(spec: &str) -> Result<LozengeLocation> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let bad = || CliError::config("bad_lozenge", format!("lozenge {spec:?} must be x,y,dir with dir 0, 120 or 240"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let x: i64 = parts[0].parse().map_err(|_| bad())?;
    let y: i64 = parts[1].parse().map_err(|_| bad())?;
    let dir = match parts[2] {
        "0" | "D0" => LozengeDir::D0,
        "120" | "D120" => LozengeDir::D120,
        "240" | "D240" => LozengeDir::D240,
        _ => return Err(bad()),
    };
    Ok(LozengeLocation::new(x, y, dir))
}

fn load_optional(p: &Option<PathBuf>) -> Result<Option<HoleSystem>> {
    p.as_deref().map(|p: &Path| io::read_holes(p)).transpose()
}

fn oracle_run(cmd: &OracleCommand) -> Result<String> {
    match cmd {
        OracleCommand::Count { region, holes } => {
            let hs = load_optional(holes)?;
            let reg = oracle_region(region, hs.as_ref())?;
            Ok(format!("triangles {}\ntilings {}\n", reg.len(), count_tilings(&reg)))
        }
        OracleCommand::Compare { region, holes, lozenge } => {
            let hs = io::read_holes(holes)?;
            let lz = parse_lozenge(lozenge)?;
            let reg = oracle_region(region, Some(&hs))?;
            let q = oracle_probability(lz, &reg)?;
            let qf = rat_to_f64(&q);
            let p = placement_probability(&CouplingCache::new(), lz, &hs, &CorrelationOptions::default())?;
            Ok(format!(
                "oracle {} {}\nplane {} {}\ngap {}\n",
                q,
                float(qf),
                float(p.value),
                p.exactness.as_str(),
                float((qf - p.value).abs())
            ))
        }
        OracleCommand::Torus { n, holes } => {
            let hs = load_optional(holes)?.unwrap_or_default();
            let count = torus_count(&TorusSpec { n: *n, holes: hs.clone() })?;
            let mut s = format!("tilings {count}\n");
            if !hs.multiholes.is_empty() {
                let ratio = torus_ratio(*n, &hs)?;
                s.push_str(&format!("ratio {} {}\n", ratio, float(rat_to_f64(&ratio))));
            }
            Ok(s)
        }
    }
}
