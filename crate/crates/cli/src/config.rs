//! Line-oriented `key=value` suite configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sha2::{Digest, Sha256};
use warplab_core::elliptic::{BoundaryData, DEFAULT_K_MAX};
use warplab_core::format::{num, parse_numeric_csv};
use warplab_core::geometry::{
    make_profile, ModelBall, RadialGrid, SpacingPolicy, WarpingProfile, DEFAULT_H_MAX_FRACTION,
};
use warplab_core::parabolic::{BoundaryCondition, HeatProblem, InitialData, ScanWindow};
use warplab_core::ProfileDescriptor;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SuiteId {
    ChengYau,
    LiYau,
    Harnack,
    Green,
    BFunction,
    ComparisonDeficits,
    Sweep,
}

impl SuiteId {
    pub const ALL: [SuiteId; 7] = [
        SuiteId::ChengYau,
        SuiteId::LiYau,
        SuiteId::Harnack,
        SuiteId::Green,
        SuiteId::BFunction,
        SuiteId::ComparisonDeficits,
        SuiteId::Sweep,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteId::ChengYau => "cheng-yau",
            SuiteId::LiYau => "li-yau",
            SuiteId::Harnack => "harnack",
            SuiteId::Green => "green",
            SuiteId::BFunction => "b-function",
            SuiteId::ComparisonDeficits => "comparison-deficits",
            SuiteId::Sweep => "sweep",
        }
    }

    fn allowed() -> String {
        Self::ALL.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| format!("unknown suite '{s}' (allowed: {})", Self::allowed()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unsupported format '{other}' (supported: json, csv)")),
        }
    }
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Kappa,
    Alpha,
    Grid,
    KMax,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::Kappa => "kappa",
            SweepParam::Alpha => "alpha",
            SweepParam::Grid => "grid",
            SweepParam::KMax => "k_max",
        }
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "kappa" => Ok(SweepParam::Kappa),
            "alpha" => Ok(SweepParam::Alpha),
            "grid" => Ok(SweepParam::Grid),
            "k_max" | "K_max" => Ok(SweepParam::KMax),
            other => Err(format!("unknown sweep parameter '{other}' (allowed: kappa, alpha, grid, k_max)")),
        }
    }
}

/// Boundary data for the harmonic-function suites.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSpec {
    Poisson { pole: f64 },
    Fourier(Vec<(usize, f64, f64)>),
    Loaded(BoundaryData),
}

impl DataSpec {
    pub fn boundary_data(&self) -> BoundaryData {
        match self {
            DataSpec::Poisson { pole } => BoundaryData::PoissonKernel { pole: *pole },
            DataSpec::Fourier(terms) => BoundaryData::fourier(terms),
            DataSpec::Loaded(d) => d.clone(),
        }
    }

    pub fn is_poisson(&self) -> bool {
        matches!(self, DataSpec::Poisson { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatSpec {
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
    pub intervals: usize,
    pub boundary: BoundaryCondition,
    pub initial: InitialData,
    pub time_origin: Option<f64>,
    pub window: ScanWindow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub target: SuiteId,
    pub param: SweepParam,
    pub values: Vec<f64>,
    /// Expected power of the trend quantities in the swept parameter.
    pub expected_exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Equality cases (flat Poisson quotient on its ray).
    pub equality: f64,
    /// Required strict margin below the sharp bound on curved balls; unchecked when absent.
    pub margin: Option<f64>,
    /// Flat-model identities.
    pub flat: f64,
    /// Allowed deviation of observed convergence orders from 2.
    pub order: f64,
    /// Allowed deviation of fitted sweep exponents.
    pub exponent: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { equality: 1e-6, margin: None, flat: 1e-10, order: 0.3, exponent: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub suite: SuiteId,
    pub geometry: ProfileDescriptor,
    pub n: usize,
    pub radius: f64,
    pub grid: usize,
    pub h_max: Option<f64>,
    pub k_max: usize,
    pub n_theta: usize,
    pub data: DataSpec,
    pub heat: HeatSpec,
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub sweep: Option<SweepSpec>,
    pub format: ReportFormat,
    pub out: Option<PathBuf>,
}

const KEYS: &[&str] = &[
    "suite",
    "kind",
    "kappa",
    "alpha",
    "width",
    "profile_path",
    "n",
    "R",
    "radius",
    "grid",
    "h_max",
    "k_max",
    "K_max",
    "n_theta",
    "data",
    "pole",
    "coefficients",
    "data_path",
    "t_start",
    "t_end",
    "steps",
    "intervals",
    "boundary",
    "initial",
    "amplitude",
    "bump_width",
    "floor",
    "mass",
    "time_origin",
    "window",
    "window_margin",
    "samples",
    "seed",
    "tol_equality",
    "margin",
    "tol_flat",
    "tol_order",
    "tol_exponent",
    "target",
    "param",
    "values",
    "expected_exponent",
    "format",
    "out",
];

struct Entries {
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let s = raw.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            let (k, v) =
                s.split_once('=').ok_or_else(|| CliError::at(line, format!("expected key=value, got '{s}'")))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(CliError::at(line, format!("unknown key '{k}'")));
            }
            let canonical = match k {
                "R" => "radius",
                "K_max" => "k_max",
                other => other,
            };
            if let Some((first, _)) = map.insert(canonical.to_string(), (line, v.to_string())) {
                return Err(CliError::at(line, format!("duplicate key '{k}' (first set on line {first})")));
            }
        }
        Ok(Self { map })
    }

    fn line(&self, key: &str) -> usize {
        self.map.get(key).map_or(0, |(l, _)| *l)
    }

    fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.map.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| CliError::at(line, format!("malformed value for {key}: '{v}' ({e})"))),
        }
    }

    fn positive(&self, key: &str, default: Option<f64>) -> Result<Option<f64>> {
        let v = self.get::<f64>(key)?.or(default);
        if let Some(x) = v {
            if !(x > 0.0 && x.is_finite()) {
                return Err(CliError::at(self.line(key), format!("{key} must be > 0")));
            }
        }
        Ok(v)
    }

    fn count(&self, key: &str, default: usize, min: usize) -> Result<usize> {
        let v = self.get::<usize>(key)?.unwrap_or(default);
        if v < min {
            return Err(CliError::at(self.line(key), format!("{key} must be ≥ {min}")));
        }
        Ok(v)
    }
}

fn parse_list(line: usize, key: &str, v: &str) -> Result<Vec<f64>> {
    let vals: std::result::Result<Vec<f64>, _> = v.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let vals = vals.map_err(|e| CliError::at(line, format!("malformed value for {key}: {e}")))?;
    if vals.is_empty() {
        return Err(CliError::at(line, format!("{key} must list at least one value")));
    }
    Ok(vals)
}

fn parse_coefficients(line: usize, v: &str) -> Result<Vec<(usize, f64, f64)>> {
    v.split(',')
        .map(|term| {
            let parts: Vec<&str> = term.trim().split(':').collect();
            let bad = || CliError::at(line, format!("coefficient '{term}' must be k:a:b"));
            if parts.len() != 3 {
                return Err(bad());
            }
            Ok((
                parts[0].parse().map_err(|_| bad())?,
                parts[1].parse().map_err(|_| bad())?,
                parts[2].parse().map_err(|_| bad())?,
            ))
        })
        .collect()
}

fn read_file(base: &Path, rel: &str) -> Result<String> {
    let path = base.join(rel);
    std::fs::read_to_string(&path).map_err(|source| CliError::Io { path, source })
}

fn load_custom_profile(line: usize, text: &str) -> Result<ProfileDescriptor> {
    let rows = parse_numeric_csv(text).map_err(|e| CliError::at(line, format!("profile table: {e}")))?;
    let width = rows.first().map_or(0, |(_, r)| r.len());
    if !(2..=4).contains(&width) || rows.iter().any(|(_, r)| r.len() != width) {
        return Err(CliError::at(line, "profile table must have 2 to 4 consistent columns: r, f[, df[, d2f]]"));
    }
    let col = |c: usize| rows.iter().map(|(_, r)| r[c]).collect::<Vec<f64>>();
    Ok(ProfileDescriptor::Custom {
        r: col(0),
        f: col(1),
        df: (width > 2).then(|| col(2)),
        d2f: (width > 3).then(|| col(3)),
    })
}

/// Parse config text; relative paths resolve against `base`.
pub fn parse_config_str(text: &str, base: &Path) -> Result<SuiteConfig> {
    let e = Entries::parse(text)?;
    let suite: SuiteId = match e.raw("suite") {
        None => return Err(CliError::at(0, format!("missing key 'suite' (allowed: {})", SuiteId::allowed()))),
        Some((line, v)) => v.parse().map_err(|m: String| CliError::at(line, m))?,
    };

    let kind = e.raw("kind").map_or("euclidean", |(_, v)| v);
    let geometry = match kind {
        "euclidean" => ProfileDescriptor::Euclidean,
        "sphere" => ProfileDescriptor::Sphere { kappa: e.positive("kappa", Some(1.0))?.unwrap() },
        "smoothed-cone" => {
            let alpha = e.positive("alpha", Some(0.5))?.unwrap();
            if alpha > 1.0 {
                return Err(CliError::at(e.line("alpha"), "alpha must be in (0, 1]"));
            }
            ProfileDescriptor::SmoothedCone { alpha, width: e.positive("width", Some(0.3))?.unwrap() }
        }
        "custom" => {
            let (line, p) =
                e.raw("profile_path").ok_or_else(|| CliError::at(e.line("kind"), "kind=custom needs profile_path"))?;
            load_custom_profile(line, &read_file(base, p)?)?
        }
        other => {
            return Err(CliError::at(
                e.line("kind"),
                format!("unknown kind '{other}' (allowed: euclidean, sphere, smoothed-cone, custom)"),
            ))
        }
    };
    for (key, needs) in
        [("kappa", "sphere"), ("alpha", "smoothed-cone"), ("width", "smoothed-cone"), ("profile_path", "custom")]
    {
        if e.raw(key).is_some() && kind != needs {
            return Err(CliError::at(e.line(key), format!("{key} only applies to kind={needs}")));
        }
    }
    make_profile(&geometry).map_err(|err| CliError::at(e.line("kind"), err.to_string()))?;

    let default_n = if suite == SuiteId::BFunction { 3 } else { 2 };
    let n = e.count("n", default_n, 2)?;
    let radius = e.positive("radius", Some(1.0))?.unwrap();
    let grid = e.count("grid", 1024, 16)?;
    let h_max = e.positive("h_max", None)?;
    let k_max = e.count("k_max", DEFAULT_K_MAX, 0)?;
    let n_theta = e.count("n_theta", 128, 8)?;
    if n_theta % 4 != 0 {
        return Err(CliError::at(e.line("n_theta"), "n_theta must be divisible by 4"));
    }

    let data = match e.raw("data").map_or("poisson", |(_, v)| v) {
        "poisson" => DataSpec::Poisson { pole: e.get("pole")?.unwrap_or(0.0) },
        "constant" => DataSpec::Fourier(vec![(0, e.positive("amplitude", Some(1.0))?.unwrap(), 0.0)]),
        "fourier" => {
            let (line, v) =
                e.raw("coefficients").ok_or_else(|| CliError::at(e.line("data"), "data=fourier needs coefficients"))?;
            DataSpec::Fourier(parse_coefficients(line, v)?)
        }
        "csv" => {
            let (line, p) =
                e.raw("data_path").ok_or_else(|| CliError::at(e.line("data"), "data=csv needs data_path"))?;
            DataSpec::Loaded(
                BoundaryData::from_csv(&read_file(base, p)?).map_err(|err| CliError::at(line, err.to_string()))?,
            )
        }
        other => {
            return Err(CliError::at(
                e.line("data"),
                format!("unknown data '{other}' (allowed: poisson, constant, fourier, csv)"),
            ))
        }
    };

    let t_start = e.get::<f64>("t_start")?.unwrap_or(0.1);
    if !(t_start > 0.0) {
        return Err(CliError::at(e.line("t_start"), "t_start must be > 0 (the estimates involve n/(2t))"));
    }
    let t_end = e.get::<f64>("t_end")?.unwrap_or(0.5);
    if !(t_end > t_start) {
        return Err(CliError::at(e.line("t_end"), "t_end must exceed t_start"));
    }
    let boundary = match e.raw("boundary").map_or("whole-space", |(_, v)| v) {
        "whole-space" => BoundaryCondition::WholeSpace,
        "neumann" => BoundaryCondition::Neumann,
        "dirichlet" => BoundaryCondition::Dirichlet,
        other => {
            return Err(CliError::at(
                e.line("boundary"),
                format!("unknown boundary '{other}' (allowed: whole-space, neumann, dirichlet)"),
            ))
        }
    };
    let amplitude = e.get::<f64>("amplitude")?;
    let initial =
        match e.raw("initial").map_or("kernel", |(_, v)| v) {
            "kernel" => InitialData::HeatKernel { mass: e.positive("mass", Some(1.0))?.unwrap() },
            "kernel-floor" => InitialData::KernelOverFloor { floor: e.positive("floor", Some(0.05))?.unwrap() },
            "constant" => InitialData::Constant(e.positive("amplitude", Some(1.0))?.unwrap()),
            "ripple" => InitialData::CosineRipple { amplitude: amplitude.unwrap_or(0.5) },
            "cosine-bump" => InitialData::CosineBump,
            "bump" => InitialData::GaussianBump {
                amplitude: amplitude.unwrap_or(2.0),
                width: e.positive("bump_width", Some(0.2))?.unwrap(),
            },
            other => return Err(CliError::at(
                e.line("initial"),
                format!(
                    "unknown initial '{other}' (allowed: kernel, kernel-floor, constant, ripple, cosine-bump, bump)"
                ),
            )),
        };
    if let InitialData::CosineRipple { amplitude } = initial {
        if amplitude.abs() >= 1.0 {
            return Err(CliError::at(e.line("amplitude"), "ripple amplitude must be in (-1, 1) for positive data"));
        }
    }
    let time_origin = e.get::<f64>("time_origin")?;
    if let Some(o) = time_origin {
        if !(o <= t_start && o >= 0.0) {
            return Err(CliError::at(e.line("time_origin"), "time_origin must lie in [0, t_start]"));
        }
    }
    let window = match e.raw("window").map_or("auto", |(_, v)| v) {
        "auto" => ScanWindow::Auto,
        "gaussian" => ScanWindow::Gaussian,
        "ball" => ScanWindow::Ball { margin: e.get::<f64>("window_margin")?.unwrap_or(0.0) },
        other => {
            return Err(CliError::at(
                e.line("window"),
                format!("unknown window '{other}' (allowed: auto, gaussian, ball)"),
            ))
        }
    };
    let heat = HeatSpec {
        t_start,
        t_end,
        steps: e.count("steps", 40, 4)?,
        intervals: e.count("intervals", 128, 8)?,
        boundary,
        initial,
        time_origin,
        window,
    };

    let tolerances = Tolerances {
        equality: e.positive("tol_equality", Some(1e-6))?.unwrap(),
        margin: e.positive("margin", None)?,
        flat: e.positive("tol_flat", Some(1e-10))?.unwrap(),
        order: e.positive("tol_order", Some(0.3))?.unwrap(),
        exponent: e.positive("tol_exponent", Some(0.1))?.unwrap(),
    };

    let sweep = if suite == SuiteId::Sweep {
        let (tl, t) =
            e.raw("target").ok_or_else(|| CliError::at(0, "suite=sweep needs 'target' (the suite to sweep)"))?;
        let target: SuiteId = t.parse().map_err(|m: String| CliError::at(tl, m))?;
        if target == SuiteId::Sweep {
            return Err(CliError::at(tl, "target cannot itself be 'sweep'"));
        }
        let (pl, p) = e.raw("param").ok_or_else(|| CliError::at(0, "suite=sweep needs 'param'"))?;
        let param: SweepParam = p.parse().map_err(|m: String| CliError::at(pl, m))?;
        let (vl, v) = e.raw("values").ok_or_else(|| CliError::at(0, "suite=sweep needs 'values'"))?;
        Some(SweepSpec {
            target,
            param,
            values: parse_list(vl, "values", v)?,
            expected_exponent: e.get("expected_exponent")?,
        })
    } else {
        for key in ["target", "param", "values", "expected_exponent"] {
            if e.raw(key).is_some() {
                return Err(CliError::at(e.line(key), format!("{key} only applies to suite=sweep")));
            }
        }
        None
    };

    let format = match e.raw("format") {
        None => ReportFormat::Json,
        Some((line, v)) => v.parse().map_err(|m: String| CliError::at(line, m))?,
    };
    let out = e.raw("out").map(|(_, v)| base.join(v));
    let samples = e.count("samples", 50, 1)?;
    let seed = e.get::<u64>("seed")?.unwrap_or(20_240_601);

    let cfg = SuiteConfig {
        suite,
        geometry,
        n,
        radius,
        grid,
        h_max,
        k_max,
        n_theta,
        data,
        heat,
        samples,
        seed,
        tolerances,
        sweep,
        format,
        out,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Read and parse a config file.
pub fn parse_config(path: &Path) -> Result<SuiteConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    parse_config_str(&text, path.parent().unwrap_or(Path::new(".")))
}

impl SuiteConfig {
    /// Suite actually executed per run (the sweep target for sweeps).
    pub fn effective_suite(&self) -> SuiteId {
        self.sweep.as_ref().map_or(self.suite, |s| s.target)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let suite = self.effective_suite();
        if matches!(suite, SuiteId::ChengYau) && self.n != 2 {
            return Err(CliError::Invalid("cheng-yau runs on 2-dimensional balls only (n = 2)".into()));
        }
        if matches!(suite, SuiteId::BFunction) && self.n < 3 {
            return Err(CliError::Invalid("b-function needs n ≥ 3".into()));
        }
        if matches!(suite, SuiteId::Green | SuiteId::BFunction) && (self.radius - 1.0).abs() > 1e-14 {
            return Err(CliError::Invalid(format!("{suite} compares against the flat unit ball and needs R = 1")));
        }
        if let Some(s) = &self.sweep {
            match s.param {
                SweepParam::Kappa if !matches!(self.geometry, ProfileDescriptor::Sphere { .. }) => {
                    return Err(CliError::Invalid("param=kappa needs kind=sphere".into()))
                }
                SweepParam::Alpha if !matches!(self.geometry, ProfileDescriptor::SmoothedCone { .. }) => {
                    return Err(CliError::Invalid("param=alpha needs kind=smoothed-cone".into()))
                }
                SweepParam::Grid | SweepParam::KMax if matches!(s.target, SuiteId::LiYau | SuiteId::Harnack) => {
                    return Err(CliError::Invalid(format!("param={} does not apply to {}", s.param.as_str(), s.target)))
                }
                _ => {}
            }
            for &v in &s.values {
                let ok = match s.param {
                    SweepParam::Kappa => v > 0.0,
                    SweepParam::Alpha => v > 0.0 && v <= 1.0,
                    SweepParam::Grid => v >= 16.0 && v.fract() == 0.0,
                    SweepParam::KMax => v >= 0.0 && v.fract() == 0.0,
                };
                if !ok {
                    return Err(CliError::Invalid(format!(
                        "value {v} is not admissible for param={}",
                        s.param.as_str()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn profile(&self) -> Result<WarpingProfile> {
        Ok(make_profile(&self.geometry)?)
    }

    /// The model ball on a uniform grid with the configured `h_max`.
    pub fn ball(&self) -> Result<ModelBall> {
        let h_max = self.h_max.unwrap_or(self.radius * DEFAULT_H_MAX_FRACTION);
        let grid = RadialGrid::with_policy(self.radius, self.grid, SpacingPolicy::Uniform, h_max)?;
        Ok(ModelBall::new(self.profile()?, self.n, grid)?)
    }

    pub fn heat_problem(&self) -> Result<HeatProblem> {
        let h = &self.heat;
        Ok(HeatProblem {
            profile: self.profile()?,
            n: self.n,
            radius: self.radius,
            boundary: h.boundary,
            initial: h.initial.clone(),
            t_start: h.t_start,
            t_end: h.t_end,
            steps: h.steps,
            intervals: h.intervals,
            time_origin: h.time_origin,
        })
    }

    /// Copy with one sweep parameter replaced.
    pub fn with_param(&self, param: SweepParam, value: f64) -> SuiteConfig {
        let mut c = self.clone();
        c.suite = self.effective_suite();
        c.sweep = None;
        match (param, &mut c.geometry) {
            (SweepParam::Kappa, ProfileDescriptor::Sphere { kappa }) => *kappa = value,
            (SweepParam::Alpha, ProfileDescriptor::SmoothedCone { alpha, .. }) => *alpha = value,
            (SweepParam::Grid, _) => c.grid = value as usize,
            (SweepParam::KMax, _) => c.k_max = value as usize,
            _ => {}
        }
        c
    }

    /// Normalized `key=value` listing of every setting that affects results.
    pub fn canonical(&self) -> String {
        let mut kv: Vec<(String, String)> = vec![
            ("suite".into(), self.suite.to_string()),
            ("geometry".into(), warplab_core::format::to_json(&self.geometry).split_whitespace().collect()),
            ("n".into(), self.n.to_string()),
            ("radius".into(), num(self.radius)),
            ("grid".into(), self.grid.to_string()),
            ("h_max".into(), self.h_max.map_or("default".into(), num)),
            ("k_max".into(), self.k_max.to_string()),
            ("n_theta".into(), self.n_theta.to_string()),
            ("data".into(), format!("{:?}", self.data)),
            ("heat".into(), format!("{:?}", self.heat)),
            ("samples".into(), self.samples.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("tolerances".into(), format!("{:?}", self.tolerances)),
            ("sweep".into(), format!("{:?}", self.sweep)),
        ];
        kv.sort();
        kv.into_iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// SHA-256 of [`SuiteConfig::canonical`], hex-encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<SuiteConfig> {
        parse_config_str(text, Path::new("."))
    }

    #[test]
    fn green_sphere_config() {
        let c = parse("suite=green\nkind=sphere\nkappa=1\nn=2\nR=1\ngrid=1024").unwrap();
        assert_eq!(c.suite, SuiteId::Green);
        assert_eq!(c.geometry, ProfileDescriptor::Sphere { kappa: 1.0 });
        assert_eq!((c.n, c.grid), (2, 1024));
        assert_eq!(c.hash().len(), 64);
    }

    #[test]
    fn negative_kappa_reports_line() {
        let err = parse("suite=green\nkind=sphere\nkappa=-1").unwrap_err();
        assert_eq!(err.to_string(), "line 3: kappa must be > 0");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn missing_suite_lists_allowed() {
        let err = parse("kind=euclidean").unwrap_err().to_string();
        for s in SuiteId::ALL {
            assert!(err.contains(s.as_str()), "{err}");
        }
    }

    #[test]
    fn rejects_unknown_duplicate_and_malformed() {
        assert!(parse("suite=green\nfoo=1").unwrap_err().to_string().contains("unknown key 'foo'"));
        assert!(parse("suite=green\nn=2\nn=3").unwrap_err().to_string().starts_with("line 3"));
        assert!(parse("suite=green\ngrid=abc").unwrap_err().to_string().contains("malformed"));
        assert!(parse("suite=li-yau\nt_start=0").unwrap_err().to_string().contains("t_start must be > 0"));
        assert!(parse("suite=green\nformat=xml").unwrap_err().to_string().contains("json, csv"));
        assert!(parse("suite=green\nR=2").is_err());
    }

    #[test]
    fn comments_and_defaults() {
        let c = parse("# a comment\n\nsuite=b-function\n").unwrap();
        assert_eq!(c.n, 3);
        assert_eq!(c.geometry, ProfileDescriptor::Euclidean);
    }

    #[test]
    fn hash_ignores_output_settings() {
        let a = parse("suite=green\nformat=csv\nout=x").unwrap();
        let b = parse("suite=green").unwrap();
        let c = parse("suite=green\ngrid=512").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(b.hash(), c.hash());
    }

    #[test]
    fn sweep_config() {
        let c = parse("suite=sweep\ntarget=green\nkind=sphere\nparam=kappa\nvalues=0.01,0.1,1").unwrap();
        let s = c.sweep.as_ref().unwrap();
        assert_eq!((s.target, s.param, s.values.len()), (SuiteId::Green, SweepParam::Kappa, 3));
        assert_eq!(c.with_param(SweepParam::Kappa, 0.1).geometry, ProfileDescriptor::Sphere { kappa: 0.1 });
        assert!(parse("suite=sweep\ntarget=green\nparam=kappa\nvalues=1").is_err());
        assert!(parse("suite=sweep\ntarget=green\nkind=sphere\nparam=kappa\nvalues=").is_err());
    }
}
