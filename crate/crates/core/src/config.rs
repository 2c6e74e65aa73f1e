//! Config files for the `denselab` binary.
//!
//! A config is a TOML document with the optional sections `[kernel]`,
//! `[schedule]`, `[target]`, `[study]`, `[fit]`, `[data]`, `[psi]` and
//! `[report]`. Every key has a default except the target parameters, so each
//! command only needs the sections it reads. Parsing resolves the defaults
//! and checks every invariant; errors carry the line of the offending key
//! (or section header). [`Config::emit`] writes a fully resolved document
//! that parses back to an equal [`Config`].

use std::collections::HashMap;
use std::path::Path;

use toml::de::DeTable;
use toml::{Table, Value};

use crate::erm::{Dataset, FitConfig, LossFunction, PairwiseLoss};
use crate::error::{Error, Result};
use crate::kernels::{Kernel, Point};
use crate::lab::{
    Domain, KernelFamily, SamplerKind, Schedule, Step, StudyConfig, TargetFunction, TargetKind,
    DEFAULT_GRID_RESOLUTION, DEFAULT_SAMPLE_SIZES,
};
use crate::metrics::{validate_psi, PsiFunction, DEFAULT_PSI_GRID_MAX, DEFAULT_PSI_GRID_N};

const SECTIONS: &[&str] = &["kernel", "schedule", "target", "study", "fit", "data", "psi", "report"];

const KERNEL_KEYS: &[&str] = &["family", "gamma", "support_radius"];
const SCHEDULE_KEYS: &[&str] = &[
    "bandwidth_scale",
    "bandwidth_exponent",
    "lambda_scale",
    "lambda_exponent",
];
const TARGET_KEYS: &[&str] = &["kind", "lo", "hi", "a", "b", "steps", "offset", "frequency"];
const STUDY_KEYS: &[&str] = &[
    "sample_sizes",
    "replicates",
    "eval_sample_size",
    "grid_resolution",
    "seed",
    "noise_std",
    "record_wall_time",
    "sampler",
    "sampler_mean",
    "sampler_std",
];
const FIT_KEYS: &[&str] = &[
    "method",
    "loss",
    "tau",
    "bound",
    "lambda",
    "max_iters",
    "step_size0",
    "tol",
    "seed",
];
const DATA_KEYS: &[&str] = &["inputs", "outputs", "path"];
const PSI_KEYS: &[&str] = &["kind", "xs", "ys", "grid_max", "grid_n"];
const REPORT_KEYS: &[&str] = &["input", "lipschitz"];

/// Fixed-width kernel for `kernel-eval` and `fit`; studies take the family
/// and scale the width by `[schedule]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSection {
    pub family: KernelFamily,
    pub gamma: f64,
    pub support_radius: f64,
}

impl KernelSection {
    pub fn kernel(&self) -> Result<Kernel> {
        match self.family {
            KernelFamily::Gaussian => Kernel::gaussian(self.gamma),
            KernelFamily::Wendland => Kernel::wendland(self.support_radius),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleSection {
    pub bandwidth: Schedule,
    pub lambda: Schedule,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudySection {
    pub sample_sizes: Vec<usize>,
    pub replicates: usize,
    pub eval_sample_size: Option<usize>,
    pub grid_resolution: usize,
    pub seed: u64,
    pub noise_std: f64,
    pub record_wall_time: bool,
    pub sampler: SamplerKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMethod {
    /// Closed-form kernel ridge regression.
    Ridge,
    /// Projected subgradient descent for a pointwise Lipschitz loss.
    Erm,
    /// Gradient descent for a pairwise loss.
    Pairwise,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitLoss {
    Squared { bound: f64 },
    Absolute,
    Pinball { tau: f64 },
    RankingSquared,
}

impl FitLoss {
    /// The pointwise loss, `None` for pairwise losses.
    pub fn pointwise(&self) -> Result<Option<LossFunction>> {
        Ok(match *self {
            FitLoss::Squared { bound } => Some(LossFunction::squared(bound)?),
            FitLoss::Absolute => Some(LossFunction::absolute()),
            FitLoss::Pinball { tau } => Some(LossFunction::pinball(tau)?),
            FitLoss::RankingSquared => None,
        })
    }

    pub fn pairwise(&self) -> Option<PairwiseLoss> {
        match self {
            FitLoss::RankingSquared => Some(PairwiseLoss::RankingSquared),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitSection {
    pub method: FitMethod,
    pub loss: FitLoss,
    pub solver: FitConfig,
}

/// Points and labels, given inline or as a CSV file (`x1,…,xd,y` with a
/// header row) whose path is relative to the config file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DataSection {
    pub inputs: Vec<Vec<f64>>,
    pub outputs: Vec<f64>,
    pub path: Option<String>,
}

impl DataSection {
    /// Inputs and outputs, reading `path` relative to `base_dir` if set.
    /// Outputs may be empty when only points are needed.
    pub fn load(&self, base_dir: &Path) -> Result<(Vec<Point>, Vec<f64>)> {
        let Some(rel) = &self.path else {
            let pts = self
                .inputs
                .iter()
                .map(|c| Point::new(c.clone()))
                .collect::<Result<Vec<_>>>()?;
            return Ok((pts, self.outputs.clone()));
        };
        let file = base_dir.join(rel);
        let mut reader = csv::Reader::from_path(&file)
            .map_err(|e| Error::Io(format!("{}: {e}", file.display())))?;
        let mut pts = Vec::new();
        let mut ys = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| Error::Io(format!("{}: {e}", file.display())))?;
            let row: Vec<f64> = rec
                .iter()
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Config(format!("{}: row {}: {e}", file.display(), i + 2)))?;
            if row.len() < 2 {
                return Err(Error::Config(format!(
                    "{}: row {} needs at least one input column and an output column",
                    file.display(),
                    i + 2
                )));
            }
            ys.push(row[row.len() - 1]);
            pts.push(Point::new(row[..row.len() - 1].to_vec())?);
        }
        Ok((pts, ys))
    }

    pub fn dataset(&self, base_dir: &Path) -> Result<Dataset> {
        let (pts, ys) = self.load(base_dir)?;
        Dataset::new(pts, ys)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsiSection {
    pub psi: PsiFunction,
    pub grid_max: f64,
    pub grid_n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportSection {
    /// Study CSV summarized by the `report` command, relative to the config.
    pub input: Option<String>,
    /// Lipschitz constant for the risk check.
    pub lipschitz: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub kernel: KernelSection,
    pub schedule: ScheduleSection,
    pub target: Option<TargetFunction>,
    pub study: StudySection,
    pub fit: FitSection,
    pub data: DataSection,
    pub psi: PsiSection,
    pub report: ReportSection,
}

impl Config {
    /// Parse and validate a config document.
    pub fn parse(src: &str) -> Result<Config> {
        let doc = Doc::new(src)?;
        doc.check_sections()?;

        let target_sec = doc.section("target", TARGET_KEYS)?;
        let target = parse_target(&target_sec)?;
        let dim = target.as_ref().map_or(1, |t| t.domain.dim());

        let kernel = parse_kernel(&doc.section("kernel", KERNEL_KEYS)?)?;
        let schedule = parse_schedule(&doc.section("schedule", SCHEDULE_KEYS)?, dim)?;
        let study_sec = doc.section("study", STUDY_KEYS)?;
        let study = parse_study(&study_sec)?;
        let fit = parse_fit(&doc.section("fit", FIT_KEYS)?)?;
        let data = parse_data(&doc.section("data", DATA_KEYS)?)?;
        let psi = parse_psi(&doc.section("psi", PSI_KEYS)?)?;
        let report = parse_report(&doc.section("report", REPORT_KEYS)?)?;

        let cfg = Config {
            kernel,
            schedule,
            target,
            study,
            fit,
            data,
            psi,
            report,
        };
        if cfg.target.is_some() {
            cfg.study_config().map_err(|e| study_sec.section_err(&e))?;
        }
        Ok(cfg)
    }

    /// Study settings; requires a `[target]` section.
    pub fn study_config(&self) -> Result<StudyConfig> {
        let target = self
            .target
            .clone()
            .ok_or_else(|| Error::Config("missing [target] section required for a study".into()))?;
        let s = &self.study;
        let cfg = StudyConfig {
            target,
            kernel_family: self.kernel.family,
            bandwidth: self.schedule.bandwidth,
            lambda: self.schedule.lambda,
            sample_sizes: s.sample_sizes.clone(),
            psi: self.psi.psi.clone(),
            eval_sample_size: s.eval_sample_size,
            grid_resolution: s.grid_resolution,
            seed: s.seed,
            replicates: s.replicates,
            sampler: s.sampler.clone(),
            noise_std: s.noise_std,
            record_wall_time: s.record_wall_time,
        };
        cfg.validate().map_err(to_config)?;
        if !validate_psi(&cfg.psi, self.psi.grid_max, self.psi.grid_n).passed() {
            return Err(Error::Config(
                "[psi] table violates the psi axioms; run validate-psi for details".into(),
            ));
        }
        Ok(cfg)
    }

    /// Fully resolved TOML document.
    pub fn emit(&self) -> String {
        let mut root = Table::new();

        let mut t = Table::new();
        t.insert("family".into(), family_name(self.kernel.family).into());
        t.insert("gamma".into(), self.kernel.gamma.into());
        t.insert("support_radius".into(), self.kernel.support_radius.into());
        root.insert("kernel".into(), t.into());

        let mut t = Table::new();
        t.insert("bandwidth_scale".into(), self.schedule.bandwidth.scale.into());
        t.insert("bandwidth_exponent".into(), self.schedule.bandwidth.exponent.into());
        t.insert("lambda_scale".into(), self.schedule.lambda.scale.into());
        t.insert("lambda_exponent".into(), self.schedule.lambda.exponent.into());
        root.insert("schedule".into(), t.into());

        if let Some(target) = &self.target {
            root.insert("target".into(), emit_target(target).into());
        }

        let s = &self.study;
        let mut t = Table::new();
        t.insert("sample_sizes".into(), int_array(&s.sample_sizes));
        t.insert("replicates".into(), int(s.replicates as u64));
        if let Some(m) = s.eval_sample_size {
            t.insert("eval_sample_size".into(), int(m as u64));
        }
        t.insert("grid_resolution".into(), int(s.grid_resolution as u64));
        t.insert("seed".into(), int(s.seed));
        t.insert("noise_std".into(), s.noise_std.into());
        t.insert("record_wall_time".into(), s.record_wall_time.into());
        match &s.sampler {
            SamplerKind::Uniform => {
                t.insert("sampler".into(), "uniform".into());
            }
            SamplerKind::TruncatedGaussian { mean, std } => {
                t.insert("sampler".into(), "truncated-gaussian".into());
                t.insert("sampler_mean".into(), (*mean).into());
                t.insert("sampler_std".into(), (*std).into());
            }
        }
        root.insert("study".into(), t.into());

        let f = &self.fit;
        let mut t = Table::new();
        let method = match f.method {
            FitMethod::Ridge => "ridge",
            FitMethod::Erm => "erm",
            FitMethod::Pairwise => "pairwise",
        };
        t.insert("method".into(), method.into());
        match f.loss {
            FitLoss::Squared { bound } => {
                t.insert("loss".into(), "squared".into());
                t.insert("bound".into(), bound.into());
            }
            FitLoss::Absolute => {
                t.insert("loss".into(), "absolute".into());
            }
            FitLoss::Pinball { tau } => {
                t.insert("loss".into(), "pinball".into());
                t.insert("tau".into(), tau.into());
            }
            FitLoss::RankingSquared => {
                t.insert("loss".into(), "ranking-squared".into());
            }
        }
        t.insert("lambda".into(), f.solver.lambda.into());
        t.insert("max_iters".into(), int(f.solver.max_iters as u64));
        t.insert("step_size0".into(), f.solver.step_size0.into());
        t.insert("tol".into(), f.solver.tol.into());
        t.insert("seed".into(), int(f.solver.seed));
        root.insert("fit".into(), t.into());

        let mut t = Table::new();
        t.insert(
            "inputs".into(),
            Value::Array(self.data.inputs.iter().map(|r| float_array(r)).collect()),
        );
        t.insert("outputs".into(), float_array(&self.data.outputs));
        if let Some(p) = &self.data.path {
            t.insert("path".into(), p.clone().into());
        }
        root.insert("data".into(), t.into());

        let mut t = Table::new();
        match &self.psi.psi {
            PsiFunction::Psi1 => {
                t.insert("kind".into(), "psi1".into());
            }
            PsiFunction::Psi2 => {
                t.insert("kind".into(), "psi2".into());
            }
            PsiFunction::Custom { xs, ys } => {
                t.insert("kind".into(), "custom".into());
                t.insert("xs".into(), float_array(xs));
                t.insert("ys".into(), float_array(ys));
            }
        }
        t.insert("grid_max".into(), self.psi.grid_max.into());
        t.insert("grid_n".into(), int(self.psi.grid_n as u64));
        root.insert("psi".into(), t.into());

        let mut t = Table::new();
        if let Some(p) = &self.report.input {
            t.insert("input".into(), p.clone().into());
        }
        t.insert("lipschitz".into(), self.report.lipschitz.into());
        root.insert("report".into(), t.into());

        toml::to_string(&root).expect("config tables always serialize")
    }
}

/// Read and parse a config file.
pub fn parse_config(path: &Path) -> Result<Config> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read config {}: {e}", path.display())))?;
    Config::parse(&src).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn to_config(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        Error::Input(m) | Error::Variant(m) => Error::Config(m),
        other => Error::Config(other.to_string()),
    }
}

fn family_name(f: KernelFamily) -> &'static str {
    match f {
        KernelFamily::Gaussian => "gaussian",
        KernelFamily::Wendland => "wendland",
    }
}

fn int(v: u64) -> Value {
    Value::Integer(i64::try_from(v).expect("integers are range-checked at parse time"))
}

fn int_array(v: &[usize]) -> Value {
    Value::Array(v.iter().map(|&x| int(x as u64)).collect())
}

fn float_array(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| Value::Float(x)).collect())
}

fn emit_target(target: &TargetFunction) -> Table {
    let mut t = Table::new();
    t.insert("lo".into(), float_array(target.domain.lo()));
    t.insert("hi".into(), float_array(target.domain.hi()));
    match &target.kind {
        TargetKind::IndicatorInterval { a, b } => {
            t.insert("kind".into(), "indicator".into());
            t.insert("a".into(), (*a).into());
            t.insert("b".into(), (*b).into());
        }
        TargetKind::StepCombination(steps) => {
            t.insert("kind".into(), "steps".into());
            let rows = steps
                .iter()
                .map(|s| float_array(&[s.a, s.b, s.level]))
                .collect();
            t.insert("steps".into(), Value::Array(rows));
        }
        TargetKind::Sign { offset } => {
            t.insert("kind".into(), "sign".into());
            t.insert("offset".into(), (*offset).into());
        }
        TargetKind::ContinuousSine { frequency } => {
            t.insert("kind".into(), "sine".into());
            t.insert("frequency".into(), (*frequency).into());
        }
    }
    t
}

/// Parsed document plus the source line of every section and key.
struct Doc {
    values: Table,
    section_lines: HashMap<String, usize>,
    key_lines: HashMap<(String, String), usize>,
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

/// Closest candidate within edit distance 2.
fn suggest<'a>(key: &str, known: &[&'a str]) -> Option<&'a str> {
    known
        .iter()
        .map(|k| (strsim::levenshtein(key, k), *k))
        .filter(|(d, _)| *d <= 2)
        .min_by_key(|(d, _)| *d)
        .map(|(_, k)| k)
}

fn unknown(what: &str, key: &str, known: &[&str]) -> String {
    match suggest(key, known) {
        Some(s) => format!("unknown {what} `{key}`; did you mean `{s}`?"),
        None => format!("unknown {what} `{key}`; expected one of: {}", known.join(", ")),
    }
}

impl Doc {
    fn new(src: &str) -> Result<Doc> {
        let spanned = DeTable::parse(src).map_err(|e| {
            let line = e.span().map_or(1, |s| line_of(src, s.start));
            Error::Config(format!("line {line}: {}", e.message().trim()))
        })?;
        let mut section_lines = HashMap::new();
        let mut key_lines = HashMap::new();
        for (k, v) in spanned.get_ref().iter() {
            section_lines.insert(k.get_ref().to_string(), line_of(src, k.span().start));
            if let Some(t) = v.get_ref().as_table() {
                for (kk, _) in t.iter() {
                    key_lines.insert(
                        (k.get_ref().to_string(), kk.get_ref().to_string()),
                        line_of(src, kk.span().start),
                    );
                }
            }
        }
        let values: Table = src.parse().map_err(|e: toml::de::Error| {
            let line = e.span().map_or(1, |s| line_of(src, s.start));
            Error::Config(format!("line {line}: {}", e.message().trim()))
        })?;
        Ok(Doc {
            values,
            section_lines,
            key_lines,
        })
    }

    fn check_sections(&self) -> Result<()> {
        for (name, v) in &self.values {
            let line = self.section_lines.get(name).copied().unwrap_or(1);
            if !SECTIONS.contains(&name.as_str()) {
                return Err(Error::Config(format!(
                    "line {line}: {}",
                    unknown("section", name, SECTIONS)
                )));
            }
            if !v.is_table() {
                return Err(Error::Config(format!(
                    "line {line}: `{name}` must be a [{name}] section"
                )));
            }
        }
        Ok(())
    }

    fn section<'a>(&'a self, name: &'static str, known: &[&str]) -> Result<Section<'a>> {
        let table = self.values.get(name).and_then(Value::as_table);
        let sec = Section {
            name,
            table,
            doc: self,
        };
        if let Some(t) = table {
            for key in t.keys() {
                if !known.contains(&key.as_str()) {
                    return Err(sec.err(key, &unknown(&format!("key in [{name}]"), key, known)));
                }
            }
        }
        Ok(sec)
    }
}

struct Section<'a> {
    name: &'static str,
    table: Option<&'a Table>,
    doc: &'a Doc,
}

impl<'a> Section<'a> {
    fn header_line(&self) -> usize {
        self.doc.section_lines.get(self.name).copied().unwrap_or(1)
    }

    fn err(&self, key: &str, msg: &str) -> Error {
        let line = self
            .doc
            .key_lines
            .get(&(self.name.to_string(), key.to_string()))
            .copied()
            .unwrap_or_else(|| self.header_line());
        Error::Config(format!("line {line}: {msg}"))
    }

    fn key_err(&self, key: &str, msg: &str) -> Error {
        self.err(key, &format!("[{}] {key} {msg}", self.name))
    }

    fn section_err(&self, e: &Error) -> Error {
        let msg = match e {
            Error::Config(m) | Error::Input(m) | Error::Variant(m) => m.clone(),
            other => other.to_string(),
        };
        Error::Config(format!("line {}: [{}] {msg}", self.header_line(), self.name))
    }

    fn missing(&self, key: &str, context: &str) -> Error {
        Error::Config(format!(
            "line {}: [{}] missing required key `{key}` {context}",
            self.header_line(),
            self.name
        ))
    }

    fn get(&self, key: &str) -> Option<&'a Value> {
        self.table.and_then(|t| t.get(key))
    }

    fn float_value(&self, key: &str, v: &Value) -> Result<f64> {
        let x = match v {
            Value::Float(f) => *f,
            Value::Integer(i) => *i as f64,
            other => {
                return Err(self.key_err(key, &format!("must be a number, got {}", other.type_str())))
            }
        };
        if !x.is_finite() {
            return Err(self.key_err(key, &format!("must be finite, got {x}")));
        }
        Ok(x)
    }

    fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| self.float_value(key, v)).transpose()
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.opt_f64(key)?.unwrap_or(default))
    }

    fn positive_f64_or(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.f64_or(key, default)?;
        if v <= 0.0 {
            return Err(self.key_err(key, &format!("must be > 0, got {v}")));
        }
        Ok(v)
    }

    fn opt_u64(&self, key: &str) -> Result<Option<u64>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
            Some(Value::Integer(i)) => Err(self.key_err(key, &format!("must be >= 0, got {i}"))),
            Some(other) => Err(self.key_err(
                key,
                &format!("must be a non-negative integer, got {}", other.type_str()),
            )),
        }
    }

    fn opt_positive_usize(&self, key: &str) -> Result<Option<usize>> {
        match self.opt_u64(key)? {
            Some(0) => Err(self.key_err(key, "must be >= 1, got 0")),
            v => Ok(v.map(|x| x as usize)),
        }
    }

    fn bool_or(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some(Value::Boolean(b)) => Ok(*b),
            Some(other) => Err(self.key_err(key, &format!("must be true or false, got {}", other.type_str()))),
        }
    }

    fn opt_str(&self, key: &str) -> Result<Option<&'a str>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.as_str())),
            Some(other) => Err(self.key_err(key, &format!("must be a string, got {}", other.type_str()))),
        }
    }

    fn choice(&self, key: &str, default: &'static str, allowed: &[&'static str]) -> Result<&'static str> {
        let Some(v) = self.opt_str(key)? else {
            return Ok(default);
        };
        allowed.iter().copied().find(|a| *a == v).ok_or_else(|| {
            let hint = match suggest(v, allowed) {
                Some(s) => format!("; did you mean \"{s}\"?"),
                None => String::new(),
            };
            self.key_err(
                key,
                &format!("must be one of {}, got \"{v}\"{hint}", allowed.join(", ")),
            )
        })
    }

    fn array(&self, key: &str) -> Result<Option<&'a Vec<Value>>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Array(a)) => Ok(Some(a)),
            Some(other) => Err(self.key_err(key, &format!("must be an array, got {}", other.type_str()))),
        }
    }

    fn opt_f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.array(key)?
            .map(|a| a.iter().map(|v| self.float_value(key, v)).collect())
            .transpose()
    }

    /// Array of rows; a bare number counts as a one-element row.
    fn rows(&self, key: &str) -> Result<Vec<Vec<f64>>> {
        let Some(a) = self.array(key)? else {
            return Ok(Vec::new());
        };
        a.iter()
            .map(|v| match v {
                Value::Array(row) => row.iter().map(|x| self.float_value(key, x)).collect(),
                scalar => Ok(vec![self.float_value(key, scalar)?]),
            })
            .collect()
    }
}

fn parse_kernel(s: &Section) -> Result<KernelSection> {
    let family = match s.choice("family", "gaussian", &["gaussian", "wendland"])? {
        "wendland" => KernelFamily::Wendland,
        _ => KernelFamily::Gaussian,
    };
    Ok(KernelSection {
        family,
        gamma: s.positive_f64_or("gamma", 1.0)?,
        support_radius: s.positive_f64_or("support_radius", 1.0)?,
    })
}

fn parse_schedule(s: &Section, dim: usize) -> Result<ScheduleSection> {
    let bw = Schedule::default_bandwidth(dim);
    let lam = Schedule::default_lambda();
    let lambda_exponent = s.f64_or("lambda_exponent", lam.exponent)?;
    if lambda_exponent > 0.0 {
        return Err(s.key_err(
            "lambda_exponent",
            &format!("must be <= 0 so that lambda does not grow with n, got {lambda_exponent}"),
        ));
    }
    Ok(ScheduleSection {
        bandwidth: Schedule {
            scale: s.positive_f64_or("bandwidth_scale", bw.scale)?,
            exponent: s.f64_or("bandwidth_exponent", bw.exponent)?,
        },
        lambda: Schedule {
            scale: s.positive_f64_or("lambda_scale", lam.scale)?,
            exponent: lambda_exponent,
        },
    })
}

fn parse_target(s: &Section) -> Result<Option<TargetFunction>> {
    if s.table.is_none() {
        return Ok(None);
    }
    if s.get("kind").is_none() {
        return Err(s.missing("kind", "(indicator, steps, sign or sine)"));
    }
    let kind_name = s.choice("kind", "indicator", &["indicator", "steps", "sign", "sine"])?;
    let lo = s.opt_f64_list("lo")?.unwrap_or_else(|| vec![0.0]);
    let hi = s.opt_f64_list("hi")?.unwrap_or_else(|| vec![1.0]);
    let domain = Domain::new(lo, hi).map_err(|e| s.section_err(&e))?;
    let need = |key: &str| -> Result<f64> {
        s.opt_f64(key)?
            .ok_or_else(|| s.missing(key, &format!("for kind = \"{kind_name}\"")))
    };
    let kind = match kind_name {
        "indicator" => TargetKind::IndicatorInterval {
            a: need("a")?,
            b: need("b")?,
        },
        "steps" => {
            if s.get("steps").is_none() {
                return Err(s.missing("steps", "for kind = \"steps\""));
            }
            let steps = s
                .rows("steps")?
                .into_iter()
                .map(|r| match r.as_slice() {
                    [a, b, level] => Ok(Step {
                        a: *a,
                        b: *b,
                        level: *level,
                    }),
                    _ => Err(s.key_err("steps", "rows must be [a, b, level]")),
                })
                .collect::<Result<Vec<_>>>()?;
            TargetKind::StepCombination(steps)
        }
        "sign" => TargetKind::Sign {
            offset: need("offset")?,
        },
        _ => TargetKind::ContinuousSine {
            frequency: need("frequency")?,
        },
    };
    TargetFunction::new(kind, domain)
        .map(Some)
        .map_err(|e| s.section_err(&e))
}

fn parse_study(s: &Section) -> Result<StudySection> {
    let sample_sizes = match s.array("sample_sizes")? {
        None => DEFAULT_SAMPLE_SIZES.to_vec(),
        Some(a) => a
            .iter()
            .map(|v| match v {
                Value::Integer(i) if *i >= 1 => Ok(*i as usize),
                _ => Err(s.key_err("sample_sizes", "entries must be integers >= 1")),
            })
            .collect::<Result<Vec<_>>>()?,
    };
    if sample_sizes.is_empty() || sample_sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(s.key_err("sample_sizes", "must be nonempty and strictly increasing"));
    }
    let grid_resolution = s
        .opt_positive_usize("grid_resolution")?
        .unwrap_or(DEFAULT_GRID_RESOLUTION);
    if grid_resolution < 2 {
        return Err(s.key_err("grid_resolution", "must be >= 2"));
    }
    let noise_std = s.f64_or("noise_std", 0.0)?;
    if noise_std < 0.0 {
        return Err(s.key_err("noise_std", &format!("must be >= 0, got {noise_std}")));
    }
    let sampler = match s.choice("sampler", "uniform", &["uniform", "truncated-gaussian"])? {
        "truncated-gaussian" => {
            let ctx = "for sampler = \"truncated-gaussian\"";
            let mean = s.opt_f64("sampler_mean")?.ok_or_else(|| s.missing("sampler_mean", ctx))?;
            let std = s.opt_f64("sampler_std")?.ok_or_else(|| s.missing("sampler_std", ctx))?;
            if std <= 0.0 {
                return Err(s.key_err("sampler_std", &format!("must be > 0, got {std}")));
            }
            SamplerKind::TruncatedGaussian { mean, std }
        }
        _ => SamplerKind::Uniform,
    };
    Ok(StudySection {
        sample_sizes,
        replicates: s.opt_positive_usize("replicates")?.unwrap_or(1),
        eval_sample_size: s.opt_positive_usize("eval_sample_size")?,
        grid_resolution,
        seed: s.opt_u64("seed")?.unwrap_or(0),
        noise_std,
        record_wall_time: s.bool_or("record_wall_time", false)?,
        sampler,
    })
}

fn parse_fit(s: &Section) -> Result<FitSection> {
    let method = match s.choice("method", "ridge", &["ridge", "erm", "pairwise"])? {
        "erm" => FitMethod::Erm,
        "pairwise" => FitMethod::Pairwise,
        _ => FitMethod::Ridge,
    };
    let default_loss = match method {
        FitMethod::Pairwise => "ranking-squared",
        _ => "squared",
    };
    let loss = match s.choice(
        "loss",
        default_loss,
        &["squared", "absolute", "pinball", "ranking-squared"],
    )? {
        "absolute" => FitLoss::Absolute,
        "pinball" => {
            let tau = s
                .opt_f64("tau")?
                .ok_or_else(|| s.missing("tau", "for loss = \"pinball\""))?;
            if !(tau > 0.0 && tau < 1.0) {
                return Err(s.key_err("tau", &format!("must lie in (0, 1), got {tau}")));
            }
            FitLoss::Pinball { tau }
        }
        "ranking-squared" => FitLoss::RankingSquared,
        _ => {
            let bound = s.f64_or("bound", 1.0)?;
            if bound < 0.0 {
                return Err(s.key_err("bound", &format!("must be >= 0, got {bound}")));
            }
            FitLoss::Squared { bound }
        }
    };
    let compatible = match method {
        FitMethod::Ridge => matches!(loss, FitLoss::Squared { .. }),
        FitMethod::Erm => !matches!(loss, FitLoss::RankingSquared),
        FitMethod::Pairwise => matches!(loss, FitLoss::RankingSquared),
    };
    if !compatible {
        return Err(s.key_err("loss", "is not supported by the chosen method"));
    }
    let d = FitConfig::default();
    let solver = FitConfig {
        lambda: s.positive_f64_or("lambda", d.lambda)?,
        max_iters: s.opt_positive_usize("max_iters")?.unwrap_or(d.max_iters),
        step_size0: s.positive_f64_or("step_size0", d.step_size0)?,
        tol: s.positive_f64_or("tol", d.tol)?,
        seed: s.opt_u64("seed")?.unwrap_or(d.seed),
    };
    Ok(FitSection {
        method,
        loss,
        solver,
    })
}

fn parse_data(s: &Section) -> Result<DataSection> {
    let inputs = s.rows("inputs")?;
    if let Some(r) = inputs.iter().find(|r| r.is_empty() || r.len() != inputs[0].len()) {
        return Err(s.key_err(
            "inputs",
            &format!("rows must be nonempty with a common dimension, found a row of length {}", r.len()),
        ));
    }
    let outputs = s.opt_f64_list("outputs")?.unwrap_or_default();
    if !outputs.is_empty() && outputs.len() != inputs.len() {
        return Err(s.key_err(
            "outputs",
            &format!("has {} entries but inputs has {}", outputs.len(), inputs.len()),
        ));
    }
    let path = s.opt_str("path")?.map(str::to_string);
    if path.is_some() && !inputs.is_empty() {
        return Err(s.key_err("path", "cannot be combined with inline inputs"));
    }
    Ok(DataSection {
        inputs,
        outputs,
        path,
    })
}

fn parse_psi(s: &Section) -> Result<PsiSection> {
    let psi = match s.choice("kind", "psi2", &["psi1", "psi2", "custom"])? {
        "psi1" => PsiFunction::Psi1,
        "custom" => {
            let ctx = "for kind = \"custom\"";
            let xs = s.opt_f64_list("xs")?.ok_or_else(|| s.missing("xs", ctx))?;
            let ys = s.opt_f64_list("ys")?.ok_or_else(|| s.missing("ys", ctx))?;
            PsiFunction::tabulated(xs, ys).map_err(|e| s.section_err(&e))?
        }
        _ => PsiFunction::Psi2,
    };
    let grid_n = s.opt_positive_usize("grid_n")?.unwrap_or(DEFAULT_PSI_GRID_N);
    if grid_n < 2 {
        return Err(s.key_err("grid_n", "must be >= 2"));
    }
    Ok(PsiSection {
        psi,
        grid_max: s.positive_f64_or("grid_max", DEFAULT_PSI_GRID_MAX)?,
        grid_n,
    })
}

fn parse_report(s: &Section) -> Result<ReportSection> {
    let lipschitz = s.f64_or("lipschitz", 1.0)?;
    if lipschitz < 0.0 {
        return Err(s.key_err("lipschitz", &format!("must be >= 0, got {lipschitz}")));
    }
    Ok(ReportSection {
        input: s.opt_str("input")?.map(str::to_string),
        lipschitz,
    })
}
