//! Experiment runner: JSON configs, flag overrides, CSV/JSON output.
//!
//! A config is one JSON document. Flags given on the command line replace
//! the corresponding config fields, and the resolved config (minus output
//! location and format) is hashed into the `config_digest` column, so a row
//! can always be traced back to the run that produced it.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::expr::Vars;
use crate::fock::{build_planar_region_with, fock_norming_constant, fock_space, planar_rule, PlanarRule};
use crate::geometry::{make_quadrature, QuadratureRule, SpherePoint};
use crate::regions::{
    build_measure_with, build_region_with, digest_json, point_at, point_to_json, probe_count_for_scale,
    probe_grid, relative_density, MeasureSpec, Region,
};
use crate::sections::{make_space, peak_section, peak_tail_mass, Section};
use crate::spectra::{
    ball_mass_sup, berezin_sup, carleson_constant, exceptional_mass_ratio, kernel_lower_bound,
    norming_constant,
};

/// Column order of every CSV file.
pub const CSV_HEADER: &str = "command,k,R,eps,delta,inf_ratio,lambda_min,lambda_max,norming_constant,\
carleson_constant,berezin_sup,ball_mass_sup,tail_mass,leak,seed,quad_radial,quad_azimuthal,config_digest,version";

/// Written to the `version` column; the suffix counts header revisions.
pub const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "+schema.1");

const DEFAULT_PROBES: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Density,
    Norming,
    Carleson,
    Berezin,
    Peak,
    Lemma32,
    Lemma34,
    Equivalence,
    Sweep,
    Fock,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Density => "density",
            Command::Norming => "norming",
            Command::Carleson => "carleson",
            Command::Berezin => "berezin",
            Command::Peak => "peak",
            Command::Lemma32 => "lemma32",
            Command::Lemma34 => "lemma34",
            Command::Equivalence => "equivalence",
            Command::Sweep => "sweep",
            Command::Fock => "fock",
        }
    }

    fn parse(s: &str, path: &str) -> Result<Self> {
        <Command as ValueEnum>::from_str(s, false).map_err(|_| Error::Parse {
            path: path.to_string(),
            message: format!("unknown command `{s}`"),
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParameter {
    RadiusFactor,
    Delta,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub command: Command,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub k_list: Vec<usize>,
    pub radius_factor: f64,
    pub eps: f64,
    pub delta: Option<f64>,
    /// Region template (sphere region, or planar region for `fock`).
    pub region: Option<Value>,
    pub measure: Option<Value>,
    /// Section for `lemma32`; a seeded random unit section when absent.
    pub section: Option<Value>,
    /// Peak center for `peak`.
    pub center: SpherePoint,
    /// Explicit quadrature orders; chosen per `k` when absent.
    pub quad: Option<(usize, usize)>,
    pub probes: Option<usize>,
    pub seed: u64,
    pub sweep: Option<Sweep>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: Command::Density,
            k_list: vec![4, 8, 16],
            radius_factor: 2.0,
            eps: 1.0,
            delta: None,
            region: None,
            measure: None,
            section: None,
            center: SpherePoint::origin(),
            quad: None,
            probes: None,
            seed: 0,
            sweep: None,
            output: None,
            format: Format::Csv,
        }
    }
}

fn parse_err(path: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        message: message.into(),
    }
}

fn invalid(path: &str, message: impl Into<String>) -> Error {
    Error::Validation {
        path: path.to_string(),
        message: message.into(),
    }
}

fn get_f64(v: &Value, path: &str) -> Result<f64> {
    let x = v.as_f64().ok_or_else(|| parse_err(path, "expected a number"))?;
    if !x.is_finite() {
        return Err(invalid(path, "must be finite"));
    }
    Ok(x)
}

fn get_usize(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| parse_err(path, "expected a nonnegative integer"))
}

/// `"128x256"` or `[128, 256]`.
pub fn parse_quad(v: &Value, path: &str) -> Result<(usize, usize)> {
    let pair = match v {
        Value::String(s) => {
            let (a, b) = s
                .split_once(['x', 'X'])
                .ok_or_else(|| parse_err(path, "expected `RADIALxAZIMUTHAL`"))?;
            let a = a.trim().parse::<usize>().map_err(|_| parse_err(path, "bad radial order"))?;
            let b = b.trim().parse::<usize>().map_err(|_| parse_err(path, "bad azimuthal order"))?;
            (a, b)
        }
        Value::Array(a) if a.len() == 2 => (
            get_usize(&a[0], &format!("{path}[0]"))?,
            get_usize(&a[1], &format!("{path}[1]"))?,
        ),
        _ => return Err(parse_err(path, "expected `RADIALxAZIMUTHAL` or [radial, azimuthal]")),
    };
    if pair.0 == 0 || pair.1 == 0 {
        return Err(invalid(path, "quadrature orders must be positive"));
    }
    Ok(pair)
}

fn parse_k_list(v: &Value, path: &str) -> Result<Vec<usize>> {
    match v {
        Value::Array(a) => a
            .iter()
            .enumerate()
            .map(|(i, x)| get_usize(x, &format!("{path}[{i}]")))
            .collect(),
        Value::Number(_) => Ok(vec![get_usize(v, path)?]),
        _ => Err(parse_err(path, "expected an integer or an array of integers")),
    }
}

impl ExperimentConfig {
    /// Reads a config document. Unknown keys are rejected.
    pub fn from_json(doc: &Value) -> Result<Self> {
        let obj = doc.as_object().ok_or_else(|| parse_err("$", "expected an object"))?;
        let mut cfg = Self::default();
        for (key, v) in obj {
            let path = format!("$.{key}");
            let path = path.as_str();
            match key.as_str() {
                "command" => {
                    cfg.command = Command::parse(v.as_str().ok_or_else(|| parse_err(path, "expected a string"))?, path)?
                }
                "k" | "k_list" | "N" => cfg.k_list = parse_k_list(v, path)?,
                "R" => cfg.radius_factor = get_f64(v, path)?,
                "eps" => cfg.eps = get_f64(v, path)?,
                "delta" => cfg.delta = Some(get_f64(v, path)?),
                "region" => cfg.region = Some(v.clone()),
                "measure" => cfg.measure = Some(v.clone()),
                "section" => cfg.section = Some(v.clone()),
                "center" => cfg.center = point_at(v, path)?,
                "quad" => cfg.quad = Some(parse_quad(v, path)?),
                "probes" => cfg.probes = Some(get_usize(v, path)?),
                "seed" => cfg.seed = v.as_u64().ok_or_else(|| parse_err(path, "expected an unsigned integer"))?,
                "sweep" => cfg.sweep = Some(parse_sweep(v, path)?),
                "output" => {
                    cfg.output = Some(PathBuf::from(
                        v.as_str().ok_or_else(|| parse_err(path, "expected a string"))?,
                    ))
                }
                "format" => {
                    cfg.format = match v.as_str() {
                        Some("csv") => Format::Csv,
                        Some("json") => Format::Json,
                        _ => return Err(parse_err(path, "expected \"csv\" or \"json\"")),
                    }
                }
                other => return Err(parse_err(path, format!("unknown field `{other}`"))),
            }
        }
        Ok(cfg)
    }

    /// Resolved config as JSON; `with_output` adds the output location.
    pub fn to_json(&self, with_output: bool) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), json!(self.command.name()));
        m.insert("k".into(), json!(self.k_list));
        m.insert("R".into(), json!(self.radius_factor));
        m.insert("eps".into(), json!(self.eps));
        if let Some(d) = self.delta {
            m.insert("delta".into(), json!(d));
        }
        for (key, v) in [("region", &self.region), ("measure", &self.measure), ("section", &self.section)] {
            if let Some(v) = v {
                m.insert(key.into(), v.clone());
            }
        }
        m.insert("center".into(), point_to_json(&self.center));
        if let Some((a, b)) = self.quad {
            m.insert("quad".into(), json!(format!("{a}x{b}")));
        }
        if let Some(p) = self.probes {
            m.insert("probes".into(), json!(p));
        }
        m.insert("seed".into(), json!(self.seed));
        if let Some(s) = &self.sweep {
            m.insert(
                "sweep".into(),
                json!({
                    "parameter": match s.parameter {
                        SweepParameter::RadiusFactor => "R",
                        SweepParameter::Delta => "delta",
                    },
                    "values": s.values,
                    "command": s.command.name(),
                }),
            );
        }
        if with_output {
            if let Some(o) = &self.output {
                m.insert("output".into(), json!(o.to_string_lossy()));
            }
            m.insert(
                "format".into(),
                json!(match self.format {
                    Format::Csv => "csv",
                    Format::Json => "json",
                }),
            );
        }
        Value::Object(m)
    }

    /// Digest of everything that affects computed values.
    pub fn digest(&self) -> String {
        digest_json(&self.to_json(false))
    }

    /// Checks the config and every per-`k` instantiation of its templates
    /// without computing anything.
    pub fn validate(&self) -> Result<()> {
        if self.k_list.is_empty() {
            return Err(invalid("$.k", "at least one degree is required"));
        }
        if self.eps.is_nan() || self.eps <= 0.0 {
            return Err(invalid("$.eps", format!("must be positive, got {}", self.eps)));
        }
        if self.radius_factor.is_nan() || self.radius_factor < 0.0 {
            return Err(invalid("$.R", format!("must be nonnegative, got {}", self.radius_factor)));
        }
        if self.command == Command::Sweep {
            let sweep = self.sweep.as_ref().ok_or_else(|| invalid("$", "sweep needs a `sweep` block"))?;
            for &v in &sweep.values {
                let mut inner = self.clone();
                inner.command = sweep.command;
                inner.sweep = None;
                inner.apply_sweep_value(sweep.parameter, v);
                inner.validate()?;
            }
            return Ok(());
        }
        for &k in &self.k_list {
            self.instantiate(k)?;
        }
        Ok(())
    }

    fn apply_sweep_value(&mut self, p: SweepParameter, v: f64) {
        match p {
            SweepParameter::RadiusFactor => self.radius_factor = v,
            SweepParameter::Delta => self.delta = Some(v),
        }
    }

    fn vars(&self, k: usize) -> Vars {
        Vars {
            k: Some(k as f64),
            radius_factor: Some(self.radius_factor),
            delta: self.delta,
            eps: Some(self.eps),
        }
    }

    fn sphere_rule(&self, k: usize) -> Result<QuadratureRule> {
        let (a, b) = self.quad.unwrap_or(((k + 2).max(32), (4 * k + 1).max(128)));
        make_quadrature(a, b)
    }

    fn planar_rule(&self, n: usize) -> Result<PlanarRule> {
        let (a, b) = self.quad.unwrap_or((n + 2, (4 * n + 1).max(1024)));
        planar_rule(a, b)
    }

    fn instantiate(&self, k: usize) -> Result<Job> {
        let vars = self.vars(k);
        let region = |required: bool| -> Result<Option<Region>> {
            match &self.region {
                Some(spec) => build_region_with(spec, &vars).map(Some),
                None if required => Err(invalid("$", format!("`{}` needs a `region`", self.command.name()))),
                None => Ok(None),
            }
        };
        let measure = |required: bool| -> Result<Option<MeasureSpec>> {
            match &self.measure {
                Some(spec) => build_measure_with(spec, &vars).map(Some).map_err(|e| prefix(e, "$.measure")),
                None if required => Err(invalid("$", format!("`{}` needs a `measure`", self.command.name()))),
                None => Ok(None),
            }
        };
        let region = |req| region(req).map_err(|e| prefix(e, "$.region"));
        Ok(match self.command {
            Command::Density => Job::Density(region(true)?.expect("required")),
            Command::Norming => Job::Norming(region(true)?.expect("required")),
            Command::Carleson => Job::Carleson(measure(true)?.expect("required")),
            Command::Berezin => Job::Berezin(measure(true)?.expect("required")),
            Command::Peak => {
                make_space(k)?;
                Job::Peak
            }
            Command::Lemma32 => Job::Lemma32(self.section_for(k)?),
            Command::Lemma34 => Job::Lemma34,
            Command::Equivalence => match (region(false)?, measure(false)?) {
                (Some(g), None) => Job::EquivalenceRegion(g),
                (None, Some(mu)) => Job::EquivalenceMeasure(mu),
                _ => return Err(invalid("$", "equivalence needs exactly one of `region` and `measure`")),
            },
            Command::Fock => {
                let spec = self
                    .region
                    .as_ref()
                    .ok_or_else(|| invalid("$", "`fock` needs a planar `region`"))?;
                let g = build_planar_region_with(spec, &vars).map_err(|e| prefix(e, "$.region"))?;
                fock_space(k)?;
                Job::Fock(g)
            }
            Command::Sweep => return Err(invalid("$.command", "nested sweeps are not supported")),
        })
    }

    fn section_for(&self, k: usize) -> Result<Section> {
        let path = "$.section";
        let Some(spec) = &self.section else {
            return Ok(Section::random_unit(k, self.seed));
        };
        let obj = spec.as_object().ok_or_else(|| parse_err(path, "expected an object"))?;
        let kind = obj
            .get("type")
            .and_then(Value::as_str)
            .ok_or_else(|| parse_err(path, "missing string field `type`"))?;
        match kind {
            "random" => {
                let seed = match obj.get("seed") {
                    Some(v) => v.as_u64().ok_or_else(|| parse_err("$.section.seed", "expected an unsigned integer"))?,
                    None => self.seed,
                };
                Ok(Section::random_unit(k, seed))
            }
            "peak" => {
                let c = obj.get("center").ok_or_else(|| parse_err(path, "missing field `center`"))?;
                Ok(peak_section(&make_space(k)?, &point_at(c, "$.section.center")?))
            }
            "basis" => {
                let j = get_usize(
                    obj.get("index").ok_or_else(|| parse_err(path, "missing field `index`"))?,
                    "$.section.index",
                )?;
                if j > k {
                    return Err(invalid("$.section.index", format!("index {j} exceeds degree {k}")));
                }
                Ok(Section::basis(k, j))
            }
            "basis_sum" => {
                // Sum of the listed basis elements, e.g. e_0 + e_k.
                let list = obj
                    .get("indices")
                    .and_then(Value::as_array)
                    .ok_or_else(|| parse_err(path, "missing array field `indices`"))?;
                let mut s = Section::zero(k);
                for (i, v) in list.iter().enumerate() {
                    let p = format!("$.section.indices[{i}]");
                    let j = match v {
                        Value::String(t) => crate::expr::eval(t, &self.vars(k), &p)?,
                        _ => get_usize(v, &p)? as f64,
                    };
                    if j < 0.0 || j.fract() != 0.0 || j as usize > k {
                        return Err(invalid(&p, format!("index {j} is not in 0..={k}")));
                    }
                    s.coeffs[j as usize] += 1.0;
                }
                Ok(s)
            }
            other => Err(parse_err("$.section.type", format!("unknown section type `{other}`"))),
        }
    }
}

fn prefix(e: Error, at: &str) -> Error {
    let join = |p: String| if p == "$" { at.to_string() } else { format!("{at}{}", &p[1..]) };
    match e {
        Error::Parse { path, message } => Error::Parse { path: join(path), message },
        Error::Validation { path, message } => Error::Validation { path: join(path), message },
        other => other,
    }
}

fn parse_sweep(v: &Value, path: &str) -> Result<Sweep> {
    let obj = v.as_object().ok_or_else(|| parse_err(path, "expected an object"))?;
    let parameter = match obj.get("parameter").and_then(Value::as_str) {
        Some("R") => SweepParameter::RadiusFactor,
        Some("delta") => SweepParameter::Delta,
        _ => return Err(parse_err(&format!("{path}.parameter"), "expected \"R\" or \"delta\"")),
    };
    let values = obj
        .get("values")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err(&format!("{path}.values"), "expected an array of numbers"))?
        .iter()
        .enumerate()
        .map(|(i, x)| get_f64(x, &format!("{path}.values[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(invalid(&format!("{path}.values"), "at least one value is required"));
    }
    let command = Command::parse(
        obj.get("command")
            .and_then(Value::as_str)
            .ok_or_else(|| parse_err(&format!("{path}.command"), "expected a command name"))?,
        &format!("{path}.command"),
    )?;
    if command == Command::Sweep {
        return Err(invalid(&format!("{path}.command"), "nested sweeps are not supported"));
    }
    Ok(Sweep {
        parameter,
        values,
        command,
    })
}

enum Job {
    Density(Region),
    Norming(Region),
    Carleson(MeasureSpec),
    Berezin(MeasureSpec),
    Peak,
    Lemma32(Section),
    Lemma34,
    EquivalenceRegion(Region),
    EquivalenceMeasure(MeasureSpec),
    Fock(crate::fock::PlanarRegion),
}

/// One output line. `None` prints as an empty CSV cell or JSON `null`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultRow {
    pub command: String,
    /// Degree `k`; for `fock` rows this is the truncation degree `N`.
    pub k: usize,
    pub radius_factor: Option<f64>,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub inf_ratio: Option<f64>,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub norming_constant: Option<f64>,
    pub carleson_constant: Option<f64>,
    /// Also carries `M(k, eps)` for `lemma34` rows.
    pub berezin_sup: Option<f64>,
    pub ball_mass_sup: Option<f64>,
    /// Peak tail mass; the exceptional-mass ratio for `lemma32` rows.
    pub tail_mass: Option<f64>,
    pub leak: Option<f64>,
    pub seed: u64,
    pub quad_radial: Option<usize>,
    pub quad_azimuthal: Option<usize>,
    pub config_digest: String,
    pub version: String,
}

fn probes_for(cfg: &ExperimentConfig, k: usize, radius_factor: f64, extra: &[SpherePoint]) -> Result<Vec<SpherePoint>> {
    let count = match cfg.probes {
        Some(p) => p,
        None => probe_count_for_scale(k, radius_factor, DEFAULT_PROBES)?,
    };
    let mut probes = probe_grid(count);
    probes.extend_from_slice(extra);
    Ok(probes)
}

/// Runs `cfg` and returns rows in config order.
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let digest = cfg.digest();
    if cfg.command == Command::Sweep {
        let sweep = cfg.sweep.as_ref().expect("validated");
        let mut rows = Vec::new();
        for &v in &sweep.values {
            let mut inner = cfg.clone();
            inner.command = sweep.command;
            inner.sweep = None;
            inner.apply_sweep_value(sweep.parameter, v);
            for mut row in run_plain(&inner, &digest)? {
                row.command = format!("sweep:{}", row.command);
                if sweep.parameter == SweepParameter::Delta {
                    row.delta = Some(v);
                }
                rows.push(row);
            }
        }
        return Ok(rows);
    }
    run_plain(cfg, &digest)
}

fn run_plain(cfg: &ExperimentConfig, digest: &str) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::with_capacity(cfg.k_list.len());
    for &k in &cfg.k_list {
        let job = cfg.instantiate(k)?;
        let mut row = ResultRow {
            command: cfg.command.name().to_string(),
            k,
            delta: cfg.delta,
            seed: cfg.seed,
            config_digest: digest.to_string(),
            version: VERSION.to_string(),
            ..ResultRow::default()
        };
        let set_quad = |row: &mut ResultRow, rule: &QuadratureRule| {
            row.quad_radial = Some(rule.radial_order);
            row.quad_azimuthal = Some(rule.azimuthal_order);
        };
        match job {
            Job::Density(g) => {
                let rule = cfg.sphere_rule(k)?;
                let probes = probes_for(cfg, k, cfg.radius_factor, &[])?;
                row.radius_factor = Some(cfg.radius_factor);
                row.inf_ratio = Some(relative_density(&g, k, cfg.radius_factor, &probes, &rule)?.inf_ratio);
                set_quad(&mut row, &rule);
            }
            Job::Norming(g) => {
                let rule = cfg.sphere_rule(k)?;
                let r = norming_constant(k, &g, &rule)?;
                row.lambda_min = Some(r.lambda_min);
                row.lambda_max = Some(r.lambda_max);
                row.norming_constant = Some(r.norming_constant);
                set_quad(&mut row, &rule);
            }
            Job::Carleson(mu) => {
                let rule = cfg.sphere_rule(k)?;
                let r = carleson_constant(k, &mu, &rule)?;
                row.lambda_min = Some(r.lambda_min);
                row.lambda_max = Some(r.lambda_max);
                row.carleson_constant = Some(r.carleson_constant);
                set_quad(&mut row, &rule);
            }
            Job::Berezin(mu) => {
                let rule = cfg.sphere_rule(k)?;
                let probes = probes_for(cfg, k, 1.0, &mu.landmarks())?;
                row.berezin_sup = Some(berezin_sup(k, &mu, &probes, &rule)?);
                set_quad(&mut row, &rule);
            }
            Job::Peak => {
                let rule = cfg.sphere_rule(k)?;
                row.radius_factor = Some(cfg.radius_factor);
                row.tail_mass = Some(peak_tail_mass(&make_space(k)?, &cfg.center, cfg.radius_factor, &rule)?);
                set_quad(&mut row, &rule);
            }
            Job::Lemma32(s) => {
                // The nested rule is expensive; default to a modest outer rule.
                let (a, b) = cfg.quad.unwrap_or(((k + 2).max(24), (2 * k + 1).max(48)));
                let rule = make_quadrature(a, b)?;
                row.radius_factor = Some(cfg.radius_factor);
                row.eps = Some(cfg.eps);
                row.tail_mass = Some(exceptional_mass_ratio(k, &s, cfg.radius_factor, cfg.eps, &rule)?);
                set_quad(&mut row, &rule);
            }
            Job::Lemma34 => {
                row.eps = Some(cfg.eps);
                row.berezin_sup = Some(kernel_lower_bound(k, cfg.eps)?);
            }
            Job::EquivalenceRegion(g) => {
                let rule = cfg.sphere_rule(k)?;
                let probes = probes_for(cfg, k, cfg.radius_factor, &[])?;
                let r = norming_constant(k, &g, &rule)?;
                row.radius_factor = Some(cfg.radius_factor);
                row.inf_ratio = Some(relative_density(&g, k, cfg.radius_factor, &probes, &rule)?.inf_ratio);
                row.lambda_min = Some(r.lambda_min);
                row.lambda_max = Some(r.lambda_max);
                row.norming_constant = Some(r.norming_constant);
                set_quad(&mut row, &rule);
            }
            Job::EquivalenceMeasure(mu) => {
                let rule = cfg.sphere_rule(k)?;
                let probes = probes_for(cfg, k, 1.0, &mu.landmarks())?;
                let r = carleson_constant(k, &mu, &rule)?;
                row.lambda_min = Some(r.lambda_min);
                row.lambda_max = Some(r.lambda_max);
                row.carleson_constant = Some(r.carleson_constant);
                row.berezin_sup = Some(berezin_sup(k, &mu, &probes, &rule)?);
                row.ball_mass_sup = Some(ball_mass_sup(k, &mu, &probes, &rule)?);
                set_quad(&mut row, &rule);
            }
            Job::Fock(g) => {
                let rule = cfg.planar_rule(k)?;
                let r = fock_norming_constant(&fock_space(k)?, &g, &rule)?;
                row.lambda_min = Some(r.lambda_min);
                row.lambda_max = Some(r.lambda_max);
                row.norming_constant = Some(r.norming_constant);
                row.leak = Some(r.leak);
                row.quad_radial = Some(rule.radial_order);
                row.quad_azimuthal = Some(rule.azimuthal_order);
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// `printf("%.12g")`, with `inf`/`-inf`/`nan` spelled out.
pub fn format_number(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..DIGITS).contains(&exp) {
        let fixed = format!("{:.*}", (DIGITS - 1 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_cell(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

fn json_cell(x: Option<f64>) -> Value {
    x.map(crate::spectra::json_number).unwrap_or(Value::Null)
}

impl ResultRow {
    pub fn to_csv_line(&self) -> String {
        let mut line = String::new();
        let _ = write!(
            line,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.command,
            self.k,
            csv_cell(self.radius_factor),
            csv_cell(self.eps),
            csv_cell(self.delta),
            csv_cell(self.inf_ratio),
            csv_cell(self.lambda_min),
            csv_cell(self.lambda_max),
            csv_cell(self.norming_constant),
            csv_cell(self.carleson_constant),
            csv_cell(self.berezin_sup),
            csv_cell(self.ball_mass_sup),
            csv_cell(self.tail_mass),
            csv_cell(self.leak),
            self.seed,
            self.quad_radial.map(|q| q.to_string()).unwrap_or_default(),
            self.quad_azimuthal.map(|q| q.to_string()).unwrap_or_default(),
            self.config_digest,
            self.version,
        );
        line
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "k": self.k,
            "R": json_cell(self.radius_factor),
            "eps": json_cell(self.eps),
            "delta": json_cell(self.delta),
            "inf_ratio": json_cell(self.inf_ratio),
            "lambda_min": json_cell(self.lambda_min),
            "lambda_max": json_cell(self.lambda_max),
            "norming_constant": json_cell(self.norming_constant),
            "carleson_constant": json_cell(self.carleson_constant),
            "berezin_sup": json_cell(self.berezin_sup),
            "ball_mass_sup": json_cell(self.ball_mass_sup),
            "tail_mass": json_cell(self.tail_mass),
            "leak": json_cell(self.leak),
            "seed": self.seed,
            "quad_radial": self.quad_radial,
            "quad_azimuthal": self.quad_azimuthal,
            "config_digest": self.config_digest,
            "version": self.version,
        })
    }
}

/// Rows rendered in `format`, LF line endings, trailing newline.
pub fn render(rows: &[ResultRow], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for r in rows {
                out.push_str(&r.to_csv_line());
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let arr = Value::Array(rows.iter().map(ResultRow::to_json).collect());
            let mut out = serde_json::to_string_pretty(&arr).expect("JSON values always serialize");
            out.push('\n');
            out
        }
    }
}

/// Writes rows to `path`, or to stdout when `path` is `None`.
pub fn write_output(rows: &[ResultRow], path: Option<&Path>, format: Format) -> Result<()> {
    let text = render(rows, format);
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| Error::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| Error::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

/// Command-line flags. Flags override the config file.
#[derive(Debug, Parser)]
#[command(name = "normset", version, about = "Norming-set and Carleson-measure experiments on CP1")]
pub struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    pub command: Command,
    /// JSON config document.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Degrees, comma separated (truncation degrees for `fock`).
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    /// Radius factor: balls have radius R/sqrt(k).
    #[arg(long = "R", alias = "r")]
    pub radius_factor: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Quadrature orders as RADIALxAZIMUTHAL.
    #[arg(long)]
    pub quad: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub probes: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Validate and print the resolved plan without computing.
    #[arg(long)]
    pub dry_run: bool,
}

/// Loads the config file (if any) and applies flag overrides.
pub fn resolve(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| Error::Io {
                path: p.display().to_string(),
                source,
            })?;
            let doc: Value = serde_json::from_str(&text).map_err(|e| Error::Parse {
                path: format!("{}:{}:{}", p.display(), e.line(), e.column()),
                message: e.to_string(),
            })?;
            ExperimentConfig::from_json(&doc)?
        }
        None => ExperimentConfig::default(),
    };
    cfg.command = cli.command;
    if let Some(k) = &cli.k {
        cfg.k_list = k.clone();
    }
    if let Some(r) = cli.radius_factor {
        cfg.radius_factor = r;
    }
    if let Some(e) = cli.eps {
        cfg.eps = e;
    }
    if let Some(d) = cli.delta {
        cfg.delta = Some(d);
    }
    if let Some(q) = &cli.quad {
        cfg.quad = Some(parse_quad(&json!(q), "--quad")?);
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(p) = cli.probes {
        cfg.probes = Some(p);
    }
    if let Some(o) = &cli.out {
        cfg.output = Some(o.clone());
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    Ok(cfg)
}

/// The plan printed by `--dry-run`.
pub fn plan(cfg: &ExperimentConfig) -> Value {
    let jobs: Vec<Value> = match &cfg.sweep {
        Some(s) if cfg.command == Command::Sweep => s
            .values
            .iter()
            .flat_map(|v| {
                cfg.k_list
                    .iter()
                    .map(move |k| json!({"command": s.command.name(), "k": k, "value": v}))
            })
            .collect(),
        _ => cfg
            .k_list
            .iter()
            .map(|k| json!({"command": cfg.command.name(), "k": k}))
            .collect(),
    };
    json!({
        "config": cfg.to_json(true),
        "config_digest": cfg.digest(),
        "jobs": jobs,
        "columns": CSV_HEADER.split(',').collect::<Vec<_>>(),
    })
}

/// Entry point shared by the binary and tests; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    let cfg = resolve(cli)?;
    if cli.dry_run {
        cfg.validate()?;
        let text = serde_json::to_string_pretty(&plan(&cfg)).expect("JSON values always serialize");
        println!("{text}");
        return Ok(());
    }
    let rows = run(&cfg)?;
    write_output(&rows, cfg.output.as_deref(), cfg.format)
}
