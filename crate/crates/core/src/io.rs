//! Run configuration files, snapshot output and the time-stepping driver.
//!
//! Configuration files are flat `key = value` lists; `#` starts a comment.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};

use crate::decomposition::Region;
use crate::error::{Error, Result};
use crate::hybrid::{HybridState, Mode};
use crate::real::Real;
use crate::scenarios::{build, ScenarioKind, ScenarioOverrides, ScenarioSpec};

/// Header line of every snapshot file.
pub const SNAPSHOT_HEADER: &str = "t,x,y,rho,u1,u2,T,p,region";
/// Header line of the diagnostics file.
pub const DIAGNOSTICS_HEADER: &str = "step,t,mass,momentum_x,momentum_y,energy,kinetic_fraction";

pub const KNOWN_KEYS: [&str; 16] = [
    "scenario",
    "epsilon",
    "nx",
    "ny",
    "nv",
    "vcut",
    "order",
    "dt",
    "t_final",
    "eta0",
    "delta0",
    "forced_band",
    "mode",
    "output_dir",
    "snapshot_interval",
    "deterministic",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioKind,
    pub overrides: ScenarioOverrides,
    pub output_dir: PathBuf,
    /// Steps between snapshots; `0` writes only the initial and final states.
    pub snapshot_interval: usize,
    /// Run on a single thread.
    pub deterministic: bool,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| Error::Validation {
        key: key.into(),
        message: format!("cannot parse `{value}`: {e}"),
    })
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::Validation {
            key: key.into(),
            message: format!("expected a boolean, got `{value}`"),
        }),
    }
}

/// Splits `key = value` text into a map, rejecting duplicates and unknown keys.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        let (k, v) = (k.trim(), v.trim());
        if !KNOWN_KEYS.contains(&k) {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("unknown key `{k}`"),
            });
        }
        if v.is_empty() {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("missing value for `{k}`"),
            });
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("duplicate key `{k}`"),
            });
        }
    }
    Ok(out)
}

impl RunConfig {
    pub fn from_pairs(pairs: &BTreeMap<String, String>) -> Result<Self> {
        let scenario: ScenarioKind = pairs
            .get("scenario")
            .ok_or_else(|| Error::Validation {
                key: "scenario".into(),
                message: "missing".into(),
            })?
            .parse()?;
        let mut cfg = RunConfig {
            scenario,
            overrides: ScenarioOverrides::default(),
            output_dir: PathBuf::from(format!("output/{scenario}")),
            snapshot_interval: 0,
            deterministic: false,
        };
        for (k, v) in pairs {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let o = &mut self.overrides;
        match key {
            "scenario" => self.scenario = value.parse()?,
            "epsilon" => o.epsilon = Some(parse_value(key, value)?),
            "nx" => o.nx = Some(parse_value(key, value)?),
            "ny" => o.ny = Some(parse_value(key, value)?),
            "nv" => o.nv = Some(parse_value(key, value)?),
            "vcut" => o.vcut = Some(parse_value(key, value)?),
            "order" => o.order = Some(parse_value(key, value)?),
            "dt" => o.dt = Some(parse_value(key, value)?),
            "t_final" => o.t_final = Some(parse_value(key, value)?),
            "eta0" => o.eta0 = Some(parse_value(key, value)?),
            "delta0" => o.delta0 = Some(parse_value(key, value)?),
            "forced_band" => o.forced_band = Some(parse_value(key, value)?),
            "mode" => o.mode = Some(value.parse()?),
            "output_dir" => self.output_dir = PathBuf::from(value),
            "snapshot_interval" => self.snapshot_interval = parse_value(key, value)?,
            "deterministic" => self.deterministic = parse_bool(key, value)?,
            _ => {
                return Err(Error::Validation {
                    key: key.into(),
                    message: "unknown key".into(),
                })
            }
        }
        Ok(())
    }

    /// Applies a `key=value` override given on the command line.
    pub fn apply_override(&mut self, text: &str) -> Result<()> {
        let (k, v) = text.split_once('=').ok_or_else(|| Error::Validation {
            key: text.into(),
            message: "overrides must look like key=value".into(),
        })?;
        self.set(k.trim(), v.trim())
    }

    /// Builds the scenario so that every setting is checked.
    pub fn scenario_spec<R: Real>(&self) -> Result<ScenarioSpec<R>> {
        build(self.scenario, &self.overrides)
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg = RunConfig::from_pairs(&parse_pairs(text)?)?;
    cfg.scenario_spec::<f64>()?;
    Ok(cfg)
}

pub fn read_config(path: &Path) -> Result<RunConfig> {
    parse_config(&fs::read_to_string(path)?)
}

/// One row of a snapshot file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotRow<R> {
    pub t: R,
    pub x: R,
    pub y: R,
    pub rho: R,
    pub u1: R,
    pub u2: R,
    pub temp: R,
    pub p: R,
    pub region: Region,
}

/// Nodal rows of the current state.
pub fn snapshot_rows<R: Real>(spec: &ScenarioSpec<R>, state: &HybridState<R>) -> Result<Vec<SnapshotRow<R>>> {
    let space = &spec.problem.space;
    let moments = state.moments()?;
    let mut rows = Vec::with_capacity(moments.len());
    for cell in 0..space.num_cells() {
        for node in 0..space.nodes_per_cell() {
            let m = &moments[cell * space.nodes_per_cell() + node];
            let [x, y] = space.point(cell, node);
            rows.push(SnapshotRow {
                t: state.time,
                x,
                y,
                rho: m.rho,
                u1: m.u[0],
                u2: m.u[1],
                temp: m.temp,
                p: m.pressure(),
                region: state.regions.label(cell),
            });
        }
    }
    Ok(rows)
}

pub fn write_snapshot<R: Real, W: Write>(out: W, rows: &[SnapshotRow<R>]) -> Result<()> {
    let mut w = BufWriter::new(out);
    writeln!(w, "{SNAPSHOT_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.t,
            r.x,
            r.y,
            r.rho,
            r.u1,
            r.u2,
            r.temp,
            r.p,
            r.region.letter()
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_snapshot<R: Real>(path: &Path) -> Result<Vec<SnapshotRow<R>>> {
    let mut lines = BufReader::new(File::open(path)?).lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != SNAPSHOT_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header `{header}`"),
        });
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let bad = |message: String| Error::Parse { line: i + 2, message };
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 9 {
            return Err(bad(format!("expected 9 fields, got {}", fields.len())));
        }
        let mut v = [R::zero(); 8];
        for (slot, s) in v.iter_mut().zip(&fields) {
            *slot = R::from_str_radix(s, 10).map_err(|_| bad(format!("bad number `{s}`")))?;
        }
        let region = match fields[8] {
            "K" => Region::Kinetic,
            "F" => Region::Fluid,
            other => return Err(bad(format!("bad region `{other}`"))),
        };
        rows.push(SnapshotRow {
            t: v[0],
            x: v[1],
            y: v[2],
            rho: v[3],
            u1: v[4],
            u2: v[5],
            temp: v[6],
            p: v[7],
            region,
        });
    }
    Ok(rows)
}

/// What a finished run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub steps: usize,
    pub final_time: f64,
    pub snapshots: Vec<PathBuf>,
    pub diagnostics: PathBuf,
}

struct Writer {
    dir: PathBuf,
    snapshots: Vec<PathBuf>,
    diagnostics: BufWriter<File>,
}

impl Writer {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let path = dir.join("diagnostics.csv");
        let mut diagnostics = BufWriter::new(File::create(path)?);
        writeln!(diagnostics, "{DIAGNOSTICS_HEADER}")?;
        Ok(Self {
            dir: dir.to_path_buf(),
            snapshots: Vec::new(),
            diagnostics,
        })
    }

    fn record<R: Real>(&mut self, spec: &ScenarioSpec<R>, state: &HybridState<R>, snapshot: bool) -> Result<()> {
        let [m, mx, my, e] = state.totals(&spec.problem);
        writeln!(
            self.diagnostics,
            "{},{},{},{},{},{},{}",
            state.step,
            state.time,
            m,
            mx,
            my,
            e,
            state.regions.kinetic_fraction()
        )?;
        if snapshot {
            let path = self.dir.join(format!("snapshot_{:05}.csv", self.snapshots.len()));
            write_snapshot(File::create(&path)?, &snapshot_rows(spec, state)?)?;
            self.snapshots.push(path);
        }
        Ok(())
    }
}

/// Integrates a built scenario to its final time, writing output to `dir`.
pub fn run_spec<R: Real>(spec: &ScenarioSpec<R>, dir: &Path, snapshot_interval: usize) -> Result<RunSummary> {
    let mut state = HybridState::new(&spec.problem, &spec.initial, spec.mode, spec.decomposition)?;
    let mut writer = Writer::new(dir)?;
    writer.record(spec, &state, true)?;
    let tol = spec.dt * R::lit(1e-9);
    while state.time < spec.t_final - tol {
        let dt = spec.dt.min(spec.t_final - state.time);
        state.step(&spec.problem, dt)?;
        let last = state.time >= spec.t_final - tol;
        let snap = last || (snapshot_interval > 0 && state.step % snapshot_interval == 0);
        writer.record(spec, &state, snap)?;
        if state.step % 1000 == 0 {
            info!(
                "step {} t = {} kinetic fraction {}",
                state.step,
                state.time,
                state.regions.kinetic_fraction()
            );
        }
    }
    writer.diagnostics.flush()?;
    Ok(RunSummary {
        steps: state.step,
        final_time: state.time.to_f64_lossy(),
        snapshots: writer.snapshots,
        diagnostics: dir.join("diagnostics.csv"),
    })
}

/// Builds and runs a configuration in double precision.
pub fn run(cfg: &RunConfig) -> Result<RunSummary> {
    let spec = cfg.scenario_spec::<f64>()?;
    if spec.mode == Mode::Hybrid && spec.problem.epsilon() >= 0.1 {
        warn!(
            "epsilon = {} is large for hybrid mode; the fluid model is unlikely to be valid anywhere",
            spec.problem.epsilon()
        );
    }
    info!(
        "{}: {} cells, {} velocities, dt = {}, t_final = {}, mode {}",
        cfg.scenario,
        spec.problem.space.num_cells(),
        spec.problem.grid.len(),
        spec.dt,
        spec.t_final,
        spec.mode
    );
    if cfg.deterministic {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .map_err(|e| Error::config(format!("thread pool: {e}")))?;
        pool.install(|| run_spec(&spec, &cfg.output_dir, cfg.snapshot_interval))
    } else {
        run_spec(&spec, &cfg.output_dir, cfg.snapshot_interval)
    }
}
