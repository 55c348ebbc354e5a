//! End-to-end evaluation of operating points and (L, a, γ) sweeps.
//!
//! Result tables have one row per [`E2eRecord`]; the CSV header is
//!
//! ```text
//! cavity_length_m,reflector_radius_m,gamma,delta,epsilon,p_out_w,lasing,p_e_w,c_nats,c_bits,eta_e2e,converged,iterations,status
//! ```
//!
//! JSON output is an array of flat objects with the same keys. Points that
//! failed carry `status = "error: ..."` and NaN in every computed column
//! (an empty field in CSV, `null` in JSON).

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beam_power::{e2e_efficiency, output_beam_power, pump_optical_power};
use crate::config::Config;
use crate::diffraction::{fox_li_solve, ComplexField, ModeSolution};
use crate::error::{Error, Result};
use crate::params::{validate_gamma, CavityGeometry, FoxLiSettings, GridSpec};
use crate::receiver::{photo_current, solve_pv_operating_point, spectral_efficiency, split};

pub const STATUS_OK: &str = "ok";

/// One fully evaluated operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct E2eRecord {
    pub cavity_length_m: f64,
    pub reflector_radius_m: f64,
    pub gamma: f64,
    /// One-pass diffraction loss, as a fraction.
    #[serde(with = "nan_as_null")]
    pub delta: f64,
    /// 1 - delta.
    #[serde(with = "nan_as_null")]
    pub epsilon: f64,
    #[serde(with = "nan_as_null")]
    pub p_out_w: f64,
    pub lasing: bool,
    #[serde(with = "nan_as_null")]
    pub p_e_w: f64,
    #[serde(with = "nan_as_null")]
    pub c_nats: f64,
    #[serde(with = "nan_as_null")]
    pub c_bits: f64,
    #[serde(with = "nan_as_null")]
    pub eta_e2e: f64,
    pub converged: bool,
    pub iterations: usize,
    pub status: String,
}

impl E2eRecord {
    pub fn is_ok(&self) -> bool {
        self.status == STATUS_OK
    }

    fn failed(cavity_length_m: f64, reflector_radius_m: f64, gamma: f64, err: &dyn std::fmt::Display) -> Self {
        E2eRecord {
            cavity_length_m,
            reflector_radius_m,
            gamma,
            delta: f64::NAN,
            epsilon: f64::NAN,
            p_out_w: f64::NAN,
            lasing: false,
            p_e_w: f64::NAN,
            c_nats: f64::NAN,
            c_bits: f64::NAN,
            eta_e2e: f64::NAN,
            converged: false,
            iterations: 0,
            status: format!("error: {err}"),
        }
    }
}

/// Cartesian product of cavity lengths, reflector radii and split ratios.
/// Grid, wavelength and every other parameter come from the config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub lengths_m: Vec<f64>,
    pub radii_m: Vec<f64>,
    pub gammas: Vec<f64>,
}

impl SweepSpec {
    /// 1-5 m by 1-5 mm by γ in {0.1, 0.3, 0.5, 0.7, 0.9}.
    pub fn paper() -> Self {
        SweepSpec {
            lengths_m: vec![1.0, 2.0, 3.0, 4.0, 5.0],
            radii_m: vec![1e-3, 2e-3, 3e-3, 4e-3, 5e-3],
            gammas: vec![0.1, 0.3, 0.5, 0.7, 0.9],
        }
    }

    pub fn single(cavity_length_m: f64, radius_m: f64, gamma: f64) -> Self {
        SweepSpec {
            lengths_m: vec![cavity_length_m],
            radii_m: vec![radius_m],
            gammas: vec![gamma],
        }
    }

    pub fn len(&self) -> usize {
        self.lengths_m.len() * self.radii_m.len() * self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        for (name, values) in [("lengths_m", &self.lengths_m), ("radii_m", &self.radii_m), ("gammas", &self.gammas)] {
            if values.is_empty() {
                return Err(Error::Parameter(format!("sweep list `{name}` is empty")));
            }
        }
        for &l in &self.lengths_m {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::Parameter(format!("cavity length {l} m must be positive")));
            }
        }
        for &a in &self.radii_m {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::Parameter(format!("reflector radius {a} m must be positive")));
            }
        }
        for &g in &self.gammas {
            validate_gamma(g)?;
        }
        Ok(())
    }
}

/// Parameters shared by every point of a run.
struct Stages<'a> {
    config: &'a Config,
    pump_optical_power_w: f64,
}

impl<'a> Stages<'a> {
    fn new(config: &'a Config) -> Result<Self> {
        config.validate()?;
        Ok(Stages {
            config,
            pump_optical_power_w: pump_optical_power(&config.pump()),
        })
    }

    fn record(&self, geom: &CavityGeometry, mode: &ModeSolution, gamma: f64) -> Result<E2eRecord> {
        let delta = mode.one_pass_loss;
        let epsilon = 1.0 - delta;
        let gain = self.config.gain_for(geom);
        let (p_out, lasing) = output_beam_power(&gain, &self.config.coupler(), &self.config.pump(), epsilon, epsilon)?;
        let (p_pv, p_apd) = split(p_out, gamma)?;
        let pv = self.config.pv();
        let op = solve_pv_operating_point(photo_current(p_pv, &pv), &pv)?;
        let link = spectral_efficiency(p_apd, &self.config.apd())?;
        Ok(E2eRecord {
            cavity_length_m: geom.cavity_length_m,
            reflector_radius_m: geom.reflector_radius_in_m,
            gamma,
            delta,
            epsilon,
            p_out_w: p_out,
            lasing,
            p_e_w: op.electric_power_w,
            c_nats: link.spectral_efficiency,
            c_bits: link.spectral_efficiency_bits(),
            eta_e2e: e2e_efficiency(p_out, self.pump_optical_power_w)?,
            converged: mode.converged,
            iterations: mode.iterations_run,
            status: STATUS_OK.to_string(),
        })
    }
}

fn at_point(cavity_length_m: f64, radius_m: f64, gamma: f64) -> impl FnOnce(Error) -> Error {
    move |source| Error::AtPoint {
        length_m: cavity_length_m,
        radius_m,
        gamma,
        source: Box::new(source),
    }
}

/// Full chain for one symmetric cavity: mode solve, output power, split,
/// PV operating point, capacity and efficiency.
pub fn run_point(config: &Config, cavity_length_m: f64, radius_m: f64, gamma: f64) -> Result<E2eRecord> {
    let tag = at_point(cavity_length_m, radius_m, gamma);
    let run = || {
        validate_gamma(gamma)?;
        let stages = Stages::new(config)?;
        let geom = config.geometry_at(cavity_length_m, radius_m);
        let mode = fox_li_solve(&geom, &config.grid_for(&geom), &config.fox_li())?;
        stages.record(&geom, &mode, gamma)
    };
    run().map_err(tag)
}

/// Downstream chain for an already solved mode.
pub fn evaluate_mode(config: &Config, geom: &CavityGeometry, mode: &ModeSolution, gamma: f64) -> Result<E2eRecord> {
    let tag = at_point(geom.cavity_length_m, geom.reflector_radius_in_m, gamma);
    let run = || {
        validate_gamma(gamma)?;
        Stages::new(config)?.record(geom, mode, gamma)
    };
    run().map_err(tag)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct CavityKey([u64; 9]);

impl CavityKey {
    fn new(geom: &CavityGeometry, grid: &GridSpec, settings: &FoxLiSettings) -> Self {
        CavityKey([
            geom.cavity_length_m.to_bits(),
            geom.reflector_radius_in_m.to_bits(),
            geom.reflector_radius_out_m.to_bits(),
            geom.wavelength_m.to_bits(),
            grid.samples_per_side as u64,
            grid.window_half_width_m.to_bits(),
            settings.max_iterations as u64,
            settings.tolerance.to_bits(),
            settings.require_field_reproduction as u64,
        ])
    }

    fn file_name(&self) -> String {
        let hex: Vec<String> = self.0.iter().map(|w| format!("{w:016x}")).collect();
        format!("mode-{}.bin", hex.join(""))
    }
}

type Slot = Arc<OnceLock<std::result::Result<Arc<ModeSolution>, String>>>;

/// Cavity solutions keyed by geometry, grid and iteration settings.
///
/// Each key is solved at most once even under concurrent lookups. With a
/// memo directory, solutions are also written to and read back from
/// binary files (see [`write_mode_memo`]).
#[derive(Debug, Default)]
pub struct ModeCache {
    slots: Mutex<HashMap<CavityKey, Slot>>,
    memo_dir: Option<PathBuf>,
    solves: AtomicUsize,
}

impl ModeCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_memo_dir(dir: impl Into<PathBuf>) -> Self {
        ModeCache {
            memo_dir: Some(dir.into()),
            ..Self::default()
        }
    }

    /// Number of Fox-Li solves actually run (memo hits are not counted).
    pub fn solve_count(&self) -> usize {
        self.solves.load(Ordering::SeqCst)
    }

    pub fn len(&self) -> usize {
        self.slots.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Returns the cached mode, solving it if needed. Failures are cached
    /// too, as their message.
    pub fn get_or_solve(
        &self,
        geom: &CavityGeometry,
        grid: &GridSpec,
        settings: &FoxLiSettings,
    ) -> std::result::Result<Arc<ModeSolution>, String> {
        let key = CavityKey::new(geom, grid, settings);
        let slot = self.slots.lock().expect("cache lock").entry(key).or_default().clone();
        slot.get_or_init(|| self.solve(key, geom, grid, settings).map(Arc::new).map_err(|e| e.to_string()))
            .clone()
    }

    fn solve(&self, key: CavityKey, geom: &CavityGeometry, grid: &GridSpec, settings: &FoxLiSettings) -> Result<ModeSolution> {
        let memo = self.memo_dir.as_ref().map(|dir| dir.join(key.file_name()));
        if let Some(path) = &memo {
            if path.exists() {
                if let Ok(mode) = read_mode_memo(path, geom, grid, settings) {
                    return Ok(mode);
                }
            }
        }
        self.solves.fetch_add(1, Ordering::SeqCst);
        let mode = fox_li_solve(geom, grid, settings)?;
        if let Some(path) = &memo {
            write_mode_memo(path, &mode, geom, settings)?;
        }
        Ok(mode)
    }
}

/// Evaluates every (L, a, γ) combination, solving each cavity once.
///
/// Records come back in spec order: lengths outermost, gammas innermost.
/// A point that fails is reported through its `status` rather than
/// aborting the sweep; only an invalid spec or config is an error.
pub fn run_sweep(spec: &SweepSpec, config: &Config) -> Result<Vec<E2eRecord>> {
    run_sweep_with_cache(spec, config, &ModeCache::new())
}

pub fn run_sweep_with_cache(spec: &SweepSpec, config: &Config, cache: &ModeCache) -> Result<Vec<E2eRecord>> {
    spec.validate()?;
    let stages = Stages::new(config)?;
    let settings = config.fox_li();

    let cavities: Vec<(f64, f64)> = spec
        .lengths_m
        .iter()
        .flat_map(|&l| spec.radii_m.iter().map(move |&a| (l, a)))
        .collect();

    let per_cavity: Vec<Vec<E2eRecord>> = cavities
        .par_iter()
        .map(|&(l, a)| {
            let geom = config.geometry_at(l, a);
            let grid = config.grid_for(&geom);
            let mode = cache.get_or_solve(&geom, &grid, &settings);
            spec.gammas
                .iter()
                .map(|&gamma| {
                    match &mode {
                        Ok(mode) => stages
                            .record(&geom, mode, gamma)
                            .unwrap_or_else(|err| E2eRecord::failed(l, a, gamma, &err)),
                        Err(msg) => E2eRecord::failed(l, a, gamma, msg),
                    }
                })
                .collect()
        })
        .collect();

    Ok(per_cavity.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResultFormat {
    Csv,
    Json,
}

impl ResultFormat {
    /// Picks the format from a file extension, defaulting to CSV.
    pub fn from_path(path: impl AsRef<Path>) -> Self {
        match path.as_ref().extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => ResultFormat::Json,
            _ => ResultFormat::Csv,
        }
    }
}

pub const CSV_HEADER: &str = "cavity_length_m,reflector_radius_m,gamma,delta,epsilon,p_out_w,lasing,p_e_w,c_nats,c_bits,eta_e2e,converged,iterations,status";

pub fn records_to_csv(records: &[E2eRecord]) -> Result<String> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for record in records {
        writer
            .serialize(record)
            .map_err(|e| Error::Numeric(format!("CSV encoding failed: {e}")))?;
    }
    let body = writer
        .into_inner()
        .map_err(|e| Error::Numeric(format!("CSV encoding failed: {e}")))?;
    let mut out = String::with_capacity(CSV_HEADER.len() + 1 + body.len());
    out.push_str(CSV_HEADER);
    out.push('\n');
    out.push_str(std::str::from_utf8(&body).expect("CSV output is UTF-8"));
    Ok(out)
}

pub fn records_from_csv(text: &str) -> std::result::Result<Vec<E2eRecord>, String> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| e.to_string())?;
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err("unexpected CSV header".into());
    }
    reader
        .deserialize()
        .map(|row| row.map_err(|e| e.to_string()))
        .collect()
}

pub fn records_to_json(records: &[E2eRecord]) -> Result<String> {
    let mut text = serde_json::to_string_pretty(records).map_err(|e| Error::Numeric(format!("JSON encoding failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

pub fn records_from_json(text: &str) -> std::result::Result<Vec<E2eRecord>, String> {
    serde_json::from_str(text).map_err(|e| e.to_string())
}

pub fn write_results(records: &[E2eRecord], format: ResultFormat, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = match format {
        ResultFormat::Csv => records_to_csv(records)?,
        ResultFormat::Json => records_to_json(records)?,
    };
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_results(format: ResultFormat, path: impl AsRef<Path>) -> Result<Vec<E2eRecord>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    match format {
        ResultFormat::Csv => records_from_csv(&text),
        ResultFormat::Json => records_from_json(&text),
    }
    .map_err(|msg| Error::format(path, msg))
}

mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
        if value.is_nan() {
            s.serialize_none()
        } else {
            s.serialize_f64(*value)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

const MEMO_MAGIC: &[u8; 8] = b"RBSWMODE";
const MEMO_VERSION: u32 = 1;

/// Writes a solved mode to `path`.
///
/// Layout, little-endian:
///
/// | field                  | type            |
/// |------------------------|-----------------|
/// | magic `RBSWMODE`       | [u8; 8]         |
/// | version (1)            | u32             |
/// | N                      | u32             |
/// | window half-width (m)  | f64             |
/// | L, a_in, a_out, λ (m)  | f64 × 4         |
/// | max iterations         | u64             |
/// | tolerance              | f64             |
/// | field reproduction     | u8              |
/// | converged              | u8              |
/// | reproduction error     | f64             |
/// | transits recorded      | u64             |
/// | loss history           | f64 × transits  |
/// | S1 field (re, im)      | f64 × 2N²       |
/// | S2 field (re, im)      | f64 × 2N²       |
pub fn write_mode_memo(path: impl AsRef<Path>, mode: &ModeSolution, geom: &CavityGeometry, settings: &FoxLiSettings) -> Result<()> {
    let path = path.as_ref();
    let grid = mode.field_s1.grid();
    let mut out = Vec::new();
    out.extend_from_slice(MEMO_MAGIC);
    out.extend_from_slice(&MEMO_VERSION.to_le_bytes());
    out.extend_from_slice(&(grid.samples_per_side as u32).to_le_bytes());
    for v in [
        grid.window_half_width_m,
        geom.cavity_length_m,
        geom.reflector_radius_in_m,
        geom.reflector_radius_out_m,
        geom.wavelength_m,
    ] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&(settings.max_iterations as u64).to_le_bytes());
    out.extend_from_slice(&settings.tolerance.to_le_bytes());
    out.push(settings.require_field_reproduction as u8);
    out.push(mode.converged as u8);
    out.extend_from_slice(&mode.reproduction_error.to_le_bytes());
    out.extend_from_slice(&(mode.loss_history.len() as u64).to_le_bytes());
    for v in &mode.loss_history {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for field in [&mode.field_s1, &mode.field_s2] {
        for c in field.amplitude() {
            out.extend_from_slice(&c.re.to_le_bytes());
            out.extend_from_slice(&c.im.to_le_bytes());
        }
    }
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&out).map_err(|e| Error::io(path, e))
}

/// Reads a memo written by [`write_mode_memo`], checking that it was solved
/// for exactly this geometry, grid and settings.
pub fn read_mode_memo(path: impl AsRef<Path>, geom: &CavityGeometry, grid: &GridSpec, settings: &FoxLiSettings) -> Result<ModeSolution> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut r = ByteReader { bytes: &bytes, pos: 0 };
    let bad = |msg: &str| Error::format(path, msg.to_string());

    if r.take(8).ok_or_else(|| bad("truncated header"))? != MEMO_MAGIC {
        return Err(bad("not a mode memo"));
    }
    if r.u32().ok_or_else(|| bad("truncated header"))? != MEMO_VERSION {
        return Err(bad("unsupported memo version"));
    }
    let n = r.u32().ok_or_else(|| bad("truncated header"))? as usize;
    let mut header = [0.0; 5];
    for v in &mut header {
        *v = r.f64().ok_or_else(|| bad("truncated header"))?;
    }
    let max_iterations = r.u64().ok_or_else(|| bad("truncated header"))? as usize;
    let tolerance = r.f64().ok_or_else(|| bad("truncated header"))?;
    let reproduction = r.take(1).ok_or_else(|| bad("truncated header"))?[0] != 0;
    let expected = [
        grid.window_half_width_m,
        geom.cavity_length_m,
        geom.reflector_radius_in_m,
        geom.reflector_radius_out_m,
        geom.wavelength_m,
    ];
    let matches = n == grid.samples_per_side
        && header.iter().zip(expected).all(|(a, b)| a.to_bits() == b.to_bits())
        && max_iterations == settings.max_iterations
        && tolerance.to_bits() == settings.tolerance.to_bits()
        && reproduction == settings.require_field_reproduction;
    if !matches {
        return Err(bad("memo was solved for a different cavity or grid"));
    }
    let converged = r.take(1).ok_or_else(|| bad("truncated header"))?[0] != 0;
    let reproduction_error = r.f64().ok_or_else(|| bad("truncated header"))?;
    let transits = r.u64().ok_or_else(|| bad("truncated history"))? as usize;
    if transits == 0 || transits > max_iterations {
        return Err(bad("implausible transit count"));
    }
    let history = (0..transits)
        .map(|_| r.f64())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| bad("truncated history"))?;
    let mut fields = Vec::with_capacity(2);
    for _ in 0..2 {
        let amplitude = (0..n * n)
            .map(|_| Some(Complex64::new(r.f64()?, r.f64()?)))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| bad("truncated field"))?;
        fields.push(ComplexField::new(*grid, amplitude)?);
    }
    if r.pos != bytes.len() {
        return Err(bad("trailing bytes"));
    }
    let field_s2 = fields.pop().expect("two fields");
    let field_s1 = fields.pop().expect("two fields");
    Ok(ModeSolution {
        field_s1,
        field_s2,
        one_pass_loss: *history.last().expect("non-empty"),
        iterations_run: transits,
        reproduction_error,
        loss_history: history,
        converged,
    })
}

struct ByteReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    fn take(&mut self, len: usize) -> Option<&'a [u8]> {
        let end = self.pos.checked_add(len)?;
        let slice = self.bytes.get(self.pos..end)?;
        self.pos = end;
        Some(slice)
    }

    fn u32(&mut self) -> Option<u32> {
        self.take(4).map(|b| u32::from_le_bytes(b.try_into().unwrap()))
    }

    fn u64(&mut self) -> Option<u64> {
        self.take(8).map(|b| u64::from_le_bytes(b.try_into().unwrap()))
    }

    fn f64(&mut self) -> Option<f64> {
        self.take(8).map(|b| f64::from_le_bytes(b.try_into().unwrap()))
    }
}
