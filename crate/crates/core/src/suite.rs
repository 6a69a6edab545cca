//! Check suites: JSON descriptions, parallel execution and report output.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::calculus::function::{BoxField, GridFunction, Modulus, Region};
use crate::calculus::mollify::mollify;
use crate::error::{invalid, Error, Result};
use crate::expr::Expr;
use crate::geometry::spec::DomainSpec;
use crate::lab::checks::{
    check_brunn_minkowski, check_bv_bound, check_extended_sobolev, check_isoperimetric, check_mazya,
    check_mazya_l2, check_perimeter_iso, check_sobolev, L2Constant, MazyaMode,
};
use crate::lab::report::{InequalityId, Report};
use crate::hausdorff::{estimate_hm, HmEstimate};
use crate::lab::trace::{proof_trace, TraceReport};
use crate::lab::tolerances::DEFAULT_K_LIST;

/// The function an entry is checked on.
#[derive(Clone, Debug, PartialEq)]
pub enum FunctionSpec {
    /// The constant one on the domain (the domain's indicator).
    Indicator,
    /// An expression in `x`, `y`, `z`, with an optional Lipschitz constant.
    Expr { expr: String, lipschitz: Option<f64> },
    /// The domain's indicator convolved with the mollifier of radius `1/k`.
    MollifiedIndicator { k: f64 },
}

impl FunctionSpec {
    /// Parses `"indicator"`, `{"expr": ..., "lipschitz": ...}` or `{"mollified_indicator": k}`.
    pub fn from_value(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) if s == "indicator" => Ok(FunctionSpec::Indicator),
            Value::String(s) => Err(invalid(format!("unknown function `{s}`"))),
            Value::Object(m) => {
                if let Some(unknown) = m.keys().find(|k| !["expr", "lipschitz", "mollified_indicator"].contains(&k.as_str())) {
                    return Err(invalid(format!("unknown function key `{unknown}`")));
                }
                if let Some(k) = m.get("mollified_indicator") {
                    if m.len() != 1 {
                        return Err(invalid("`mollified_indicator` takes no other keys"));
                    }
                    let k = k.as_f64().filter(|k| *k > 0.0).ok_or_else(|| invalid("mollifier index must be a positive number"))?;
                    return Ok(FunctionSpec::MollifiedIndicator { k });
                }
                let expr = m
                    .get("expr")
                    .and_then(Value::as_str)
                    .ok_or_else(|| invalid("function object needs a string `expr`"))?
                    .to_owned();
                Expr::parse(&expr)?;
                let lipschitz = match m.get("lipschitz") {
                    None | Some(Value::Null) => None,
                    Some(l) => Some(l.as_f64().filter(|l| *l >= 0.0).ok_or_else(|| invalid("`lipschitz` must be a non-negative number"))?),
                };
                Ok(FunctionSpec::Expr { expr, lipschitz })
            }
            _ => Err(invalid("function must be a string or an object")),
        }
    }

    /// Parses a standalone function file.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("function JSON: {e}")))?;
        Self::from_value(&v)
    }

    pub fn to_value(&self) -> Value {
        match self {
            FunctionSpec::Indicator => Value::String("indicator".into()),
            FunctionSpec::Expr { expr, lipschitz: None } => serde_json::json!({ "expr": expr }),
            FunctionSpec::Expr { expr, lipschitz: Some(l) } => serde_json::json!({ "expr": expr, "lipschitz": l }),
            FunctionSpec::MollifiedIndicator { k } => serde_json::json!({ "mollified_indicator": k }),
        }
    }

    pub fn label(&self) -> String {
        match self {
            FunctionSpec::Indicator => "indicator".into(),
            FunctionSpec::Expr { expr, .. } => expr.clone(),
            FunctionSpec::MollifiedIndicator { k } => format!("mollified_indicator(k={k})"),
        }
    }

    /// The function on a region, with trace.
    pub fn grid_function(&self, region: &std::sync::Arc<Region>) -> Result<GridFunction> {
        match self {
            FunctionSpec::Indicator => GridFunction::constant(region, 1.0),
            FunctionSpec::Expr { expr, lipschitz } => {
                let e = Expr::parse(expr)?;
                let u = GridFunction::from_fn(region, |p| e.eval(p))?;
                match lipschitz {
                    Some(l) => u.with_modulus(Modulus::Lipschitz(*l)),
                    None => Ok(u),
                }
            }
            FunctionSpec::MollifiedIndicator { k } => mollify(&BoxField::indicator(region.domain()), *k)?.restrict(region),
        }
    }

    /// The function as a field on the whole grid box.
    pub fn box_field(&self, region: &std::sync::Arc<Region>) -> Result<BoxField> {
        match self {
            FunctionSpec::Indicator => Ok(BoxField::indicator(region.domain())),
            FunctionSpec::Expr { .. } => Ok(self.grid_function(region)?.extend_by_zero()),
            FunctionSpec::MollifiedIndicator { k } => mollify(&BoxField::indicator(region.domain()), *k),
        }
    }
}

impl Serialize for FunctionSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_value().serialize(s)
    }
}

impl<'de> Deserialize<'de> for FunctionSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        FunctionSpec::from_value(&v).map_err(serde::de::Error::custom)
    }
}

/// Per-entry numerical parameters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_list: Option<Vec<f64>>,
    /// Accuracy for a proof trace; runs one together with `s`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Ramp width for a proof trace.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    /// Scale for a boundary measure estimate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

impl EntryParams {
    fn is_empty(&self) -> bool {
        *self == EntryParams::default()
    }
}

fn default_function() -> FunctionSpec {
    FunctionSpec::Indicator
}

/// One domain/function pair and the checks to run on it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteEntry {
    pub domain: DomainSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_b: Option<DomainSpec>,
    #[serde(default = "default_function")]
    pub function: FunctionSpec,
    pub checks: Vec<InequalityId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<MazyaMode>,
    #[serde(default, skip_serializing_if = "EntryParams::is_empty")]
    pub params: EntryParams,
}

/// A named list of entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSpec {
    #[serde(default)]
    pub name: String,
    pub entries: Vec<SuiteEntry>,
}

impl SuiteSpec {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("suite serializes")
    }

    /// SHA-256 of the compact JSON form.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(serde_json::to_string(self).expect("suite serializes").as_bytes()))
    }
}

/// Problems reading a suite.
#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid suite: {0}")]
    Validation(String),
}

/// Parses suite JSON text.
pub fn parse_suite_str(text: &str) -> Result<SuiteSpec, SuiteError> {
    let v: Value = serde_json::from_str(text).map_err(|e| SuiteError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if let Some(entries) = v.get("entries").and_then(Value::as_array) {
        for (i, e) in entries.iter().enumerate() {
            for c in e.get("checks").and_then(Value::as_array).into_iter().flatten() {
                let id = c.as_str().unwrap_or_default();
                if id.parse::<InequalityId>().is_err() {
                    return Err(SuiteError::Validation(format!("entry {i}: unknown check id `{}`", c.as_str().map_or_else(|| c.to_string(), str::to_owned))));
                }
            }
        }
    }
    let spec: SuiteSpec = serde_json::from_value(v).map_err(|e| SuiteError::Validation(e.to_string()))?;
    for (i, e) in spec.entries.iter().enumerate() {
        e.domain.validate().map_err(|err| SuiteError::Validation(format!("entry {i}: {err}")))?;
        if let Some(b) = &e.domain_b {
            b.validate().map_err(|err| SuiteError::Validation(format!("entry {i}: domain_b: {err}")))?;
        }
        if e.checks.is_empty() {
            return Err(SuiteError::Validation(format!("entry {i}: no checks listed")));
        }
        if e.params.eps.is_some() != e.params.s.is_some() {
            return Err(SuiteError::Validation(format!("entry {i}: `eps` and `s` go together")));
        }
        if let Some(h) = e.params.h {
            if !(h > 0.0 && h.is_finite()) {
                return Err(SuiteError::Validation(format!("entry {i}: h must be positive")));
            }
        }
    }
    Ok(spec)
}

/// Reads and validates a suite file.
pub fn parse_suite(path: &Path) -> Result<SuiteSpec, SuiteError> {
    let text = std::fs::read_to_string(path).map_err(|source| SuiteError::Io { path: path.to_owned(), source })?;
    parse_suite_str(&text)
}

/// Overrides applied to every entry.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub h: Option<f64>,
    pub tol: Option<f64>,
}

/// A failure inside one entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckError {
    /// The check that failed, or `None` when the entry could not be set up.
    pub check: Option<InequalityId>,
    pub message: String,
}

/// Results of one entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryOutcome {
    pub index: usize,
    pub domain: String,
    pub function: String,
    pub h: f64,
    pub reports: Vec<Report>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub traces: Vec<TraceReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_measure: Option<HmEstimate>,
    pub errors: Vec<CheckError>,
}

impl EntryOutcome {
    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.reports.iter().all(|r| r.holds)
    }
}

/// A named table of numbers for plotting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotSeries {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Everything a run produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// Wall-clock time of the run; the only field that varies between identical runs.
    pub timestamp: Option<String>,
    pub tool: String,
    pub version: String,
    pub suite: String,
    pub input_sha256: String,
    pub options: RunOptions,
    pub pass: bool,
    pub entries: Vec<EntryOutcome>,
    pub warnings: Vec<String>,
    pub series: Vec<PlotSeries>,
}

impl RunManifest {
    /// An empty manifest for single-command runs.
    pub fn new(suite: &str, input_sha256: &str) -> Self {
        Self {
            timestamp: None,
            tool: "gmtlab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            suite: suite.into(),
            input_sha256: input_sha256.into(),
            options: RunOptions::default(),
            pass: true,
            entries: Vec::new(),
            warnings: Vec::new(),
            series: Vec::new(),
        }
    }

    /// Process exit status: zero exactly when every check ran and held.
    pub fn exit_code(&self) -> i32 {
        if self.pass && self.entries.iter().all(EntryOutcome::passed) {
            0
        } else {
            1
        }
    }

    pub fn failures(&self) -> usize {
        self.entries
            .iter()
            .map(|e| e.errors.len() + e.reports.iter().filter(|r| !r.holds).count())
            .sum()
    }
}

/// Row label of a report: the inequality id, with the constant mode for the covering-factor variant.
pub fn report_label(r: &Report) -> String {
    match r.constant_mode {
        crate::lab::report::ConstantMode::PaperFactor if r.inequality_id == InequalityId::Mazya => "mazya:paper_factor".into(),
        _ => r.inequality_id.to_string(),
    }
}

/// Swaps the sides of a report and re-evaluates it.
fn swapped(r: Report) -> Report {
    Report::new(InequalityId::SwapTest, r.rhs, r.lhs, r.constant_mode, r.constant_value, r.tol, r.relation)
        .meta("swapped_from", r.inequality_id.as_str())
}

fn run_entry(entry: &SuiteEntry, opts: RunOptions, warnings: &mut Vec<String>) -> EntryOutcome {
    let h = opts.h.or(entry.params.h).unwrap_or(entry.domain.h);
    let mut out = EntryOutcome {
        index: 0,
        domain: entry.domain.label(),
        function: entry.function.label(),
        h,
        reports: Vec::new(),
        traces: Vec::new(),
        boundary_measure: None,
        errors: Vec::new(),
    };
    let region = match entry.domain.with_h(h).build().and_then(Region::new) {
        Ok(r) => r,
        Err(e) => {
            out.errors.push(CheckError { check: None, message: e.to_string() });
            return out;
        }
    };
    let tol = opts.tol.or(entry.params.tol);
    let mut u_cache: Option<Result<GridFunction>> = None;
    let mut field_cache: Option<Result<BoxField>> = None;
    for &check in &entry.checks {
        let mut u = || -> Result<GridFunction> {
            u_cache
                .get_or_insert_with(|| entry.function.grid_function(&region))
                .as_ref()
                .map(Clone::clone)
                .map_err(|e| invalid(e.to_string()))
        };
        let result: Result<Vec<Report>> = match check {
            InequalityId::Mazya => {
                let modes = if entry.modes.is_empty() { vec![MazyaMode::Optimal, MazyaMode::PaperFactor] } else { entry.modes.clone() };
                u().and_then(|u| modes.iter().map(|&m| check_mazya(&u, m)).collect())
            }
            InequalityId::MazyaL2 => {
                let c1 = entry.params.c1.map_or(L2Constant::Auto, L2Constant::Value);
                if c1 == L2Constant::Auto {
                    warnings.push("mazya_l2 uses c1 derived from the domain volume".to_owned());
                }
                u().and_then(|u| check_mazya_l2(&u, c1)).map(|r| vec![r])
            }
            InequalityId::BvBound => u().and_then(|u| check_bv_bound(&u)).map(|r| vec![r]),
            InequalityId::SwapTest => u().and_then(|u| check_mazya(&u, MazyaMode::PaperFactor)).map(|r| vec![swapped(r)]),
            InequalityId::Isoperimetric => check_isoperimetric(&region).map(|r| vec![r]),
            InequalityId::PerimeterIso => check_perimeter_iso(region.domain()).map(|r| vec![r]),
            InequalityId::Sobolev | InequalityId::SobolevExtended => {
                let field = field_cache
                    .get_or_insert_with(|| entry.function.box_field(&region))
                    .as_ref()
                    .map(Clone::clone)
                    .map_err(|e| invalid(e.to_string()));
                field.and_then(|f| {
                    if check == InequalityId::Sobolev {
                        check_sobolev(&f).map(|r| vec![r])
                    } else {
                        let ks: Vec<f64> = entry
                            .params
                            .k_list
                            .clone()
                            .unwrap_or_else(|| DEFAULT_K_LIST.to_vec())
                            .into_iter()
                            .filter(|k| 1.0 / k >= 2.0 * h)
                            .collect();
                        check_extended_sobolev(&f, &ks).map(|r| vec![r])
                    }
                })
            }
            InequalityId::BrunnMinkowski => {
                let b = match &entry.domain_b {
                    Some(spec) => spec.with_h(h).build(),
                    None => Ok(region.domain().clone()),
                };
                b.and_then(|b| check_brunn_minkowski(region.domain(), &b)).map(|r| vec![r])
            }
        };
        match result {
            Ok(reports) => out.reports.extend(reports.into_iter().map(|r| match tol {
                Some(t) => r.with_tol(t),
                None => r,
            })),
            Err(e) => out.errors.push(CheckError { check: Some(check), message: e.to_string() }),
        }
    }
    if let (Some(eps), Some(s)) = (entry.params.eps, entry.params.s) {
        let trace = u_cache
            .get_or_insert_with(|| entry.function.grid_function(&region))
            .as_ref()
            .map_err(|e| invalid(e.to_string()))
            .and_then(|u| proof_trace(u, eps, s));
        match trace {
            Ok(t) => out.traces.push(t),
            Err(e) => out.errors.push(CheckError { check: None, message: format!("proof trace: {e}") }),
        }
    }
    if let Some(delta) = entry.params.delta {
        let d = region.dim() as f64 - 1.0;
        match region.calibrated_cloud().and_then(|c| estimate_hm(&c, d, delta)) {
            Ok(est) => out.boundary_measure = Some(est),
            Err(e) => out.errors.push(CheckError { check: None, message: format!("boundary measure: {e}") }),
        }
    }
    out
}

/// One plot series per trace step, each a single `(eps, s, lhs, rhs, ratio)` row.
pub fn trace_series(trace: &TraceReport, prefix: &str) -> Vec<PlotSeries> {
    trace
        .steps
        .iter()
        .map(|st| PlotSeries {
            name: format!("{prefix}{}", st.step.label()),
            columns: ["eps", "s", "lhs", "rhs", "ratio"].map(String::from).to_vec(),
            rows: vec![vec![trace.eps, trace.s, st.lhs, st.rhs, st.ratio]],
        })
        .collect()
}

/// Runs every entry, in parallel across entries.
pub fn run_suite(spec: &SuiteSpec, opts: RunOptions) -> RunManifest {
    let results: Vec<(EntryOutcome, Vec<String>)> = spec
        .entries
        .par_iter()
        .enumerate()
        .map(|(i, e)| {
            let mut w = Vec::new();
            let o = run_entry(e, opts, &mut w);
            let o = EntryOutcome { index: i, ..o };
            (o, w)
        })
        .collect();
    let mut m = RunManifest::new(&spec.name, &spec.digest());
    m.options = opts;
    if spec.entries.is_empty() {
        m.warnings.push("suite has no entries".into());
    }
    let mut trace_plots = Vec::new();
    let mut ratio_rows = Vec::new();
    let mut flagged: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (o, w) in results {
        for warning in w {
            flagged.entry(warning).or_default().push(o.index);
        }
        for (j, r) in o.reports.iter().enumerate() {
            ratio_rows.push(vec![o.index as f64, j as f64, r.ratio, if r.holds { 1.0 } else { 0.0 }]);
        }
        for t in &o.traces {
            trace_plots.extend(trace_series(t, &format!("entry{}_", o.index)));
        }
        m.entries.push(o);
    }
    for (warning, entries) in flagged {
        let list: Vec<String> = entries.iter().map(usize::to_string).collect();
        let text = format!("{warning} (entries {})", list.join(", "));
        log::debug!("{text}");
        m.warnings.push(text);
    }
    m.series.push(PlotSeries {
        name: "ratios".into(),
        columns: vec!["entry".into(), "report".into(), "ratio".into(), "holds".into()],
        rows: ratio_rows,
    });
    m.series.extend(trace_plots);
    m.pass = m.entries.iter().all(EntryOutcome::passed);
    m
}

/// Output formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    /// A directory with one tab-separated file per plot series.
    TsvPlots,
}

impl Format {
    /// Picks a format from a path: `.json`, `.csv`, anything else is a plot directory.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            Some("csv") => Format::Csv,
            _ => Format::TsvPlots,
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::TsvPlots => "tsv-plots",
        })
    }
}

/// Renders the CSV table of reports (no timestamp, byte-identical across identical runs).
pub fn csv_string(m: &RunManifest) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(["inequality_id", "domain", "function", "h", "lhs", "rhs", "ratio", "holds"]).map_err(err)?;
    for e in &m.entries {
        for r in &e.reports {
            w.write_record([
                report_label(r),
                e.domain.clone(),
                e.function.clone(),
                e.h.to_string(),
                r.lhs.to_string(),
                r.rhs.to_string(),
                r.ratio.to_string(),
                r.holds.to_string(),
            ])
            .map_err(err)?;
        }
        for ce in &e.errors {
            let id = ce.check.map_or_else(|| "setup".to_owned(), |c| c.to_string());
            w.write_record([id, e.domain.clone(), e.function.clone(), e.h.to_string(), String::new(), String::new(), String::new(), "error".into()])
                .map_err(err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

/// Renders one plot series as tab-separated text.
pub fn tsv_string(s: &PlotSeries) -> String {
    let mut out = s.columns.join("\t");
    out.push('\n');
    for row in &s.rows {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    out
}

/// Writes the manifest in the chosen format.
pub fn emit(m: &RunManifest, format: Format, path: &Path) -> Result<()> {
    match format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(m).map_err(|e| invalid(e.to_string()))?;
            text.push('\n');
            std::fs::write(path, text)?;
        }
        Format::Csv => std::fs::write(path, csv_string(m)?)?,
        Format::TsvPlots => {
            std::fs::create_dir_all(path)?;
            for s in &m.series {
                std::fs::write(path.join(format!("{}.tsv", s.name)), tsv_string(s))?;
            }
        }
    }
    Ok(())
}

/// Flattens manifest metadata for quick inspection.
pub fn summary(m: &RunManifest) -> BTreeMap<String, Value> {
    let mut out = BTreeMap::new();
    out.insert("entries".into(), Value::from(m.entries.len()));
    out.insert("failures".into(), Value::from(m.failures()));
    out.insert("pass".into(), Value::from(m.pass));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
        "name": "small",
        "entries": [
            {"domain": {"kind": "ball", "params": {"r": 1}, "h": 0.0625},
             "function": {"expr": "1 - (x*x + y*y)", "lipschitz": 2},
             "checks": ["mazya", "bv_bound"]}
        ]
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let s = parse_suite_str(SMALL).unwrap();
        assert_eq!(s.entries[0].checks, vec![InequalityId::Mazya, InequalityId::BvBound]);
        assert_eq!(parse_suite_str(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn unknown_check_is_named() {
        let bad = SMALL.replace("bv_bound", "bogus");
        let e = parse_suite_str(&bad).unwrap_err();
        assert!(matches!(e, SuiteError::Validation(_)));
        assert!(e.to_string().contains("bogus"));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let e = parse_suite_str("{\n  \"entries\": [,]\n}").unwrap_err();
        match e {
            SuiteError::Syntax { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = SMALL.replace("\"checks\"", "\"colour\": 1, \"checks\"");
        assert!(parse_suite_str(&bad).is_err());
        let bad = SMALL.replace("\"lipschitz\"", "\"slope\"");
        assert!(parse_suite_str(&bad).is_err());
    }

    #[test]
    fn function_specs_round_trip() {
        for text in [r#""indicator""#, r#"{"expr":"x"}"#, r#"{"expr":"x","lipschitz":1.0}"#, r#"{"mollified_indicator":8.0}"#] {
            let f = FunctionSpec::from_json(text).unwrap();
            assert_eq!(FunctionSpec::from_value(&f.to_value()).unwrap(), f);
        }
        assert!(FunctionSpec::from_json(r#"{"expr":"x +"}"#).is_err());
        assert!(FunctionSpec::from_json(r#""constant""#).is_err());
    }

    #[test]
    fn small_suite_passes() {
        let m = run_suite(&parse_suite_str(SMALL).unwrap(), RunOptions::default());
        assert_eq!(m.exit_code(), 0, "{m:#?}");
        assert_eq!(m.entries[0].reports.len(), 3);
    }

    #[test]
    fn empty_suite_passes_with_warning() {
        let m = run_suite(&parse_suite_str(r#"{"name":"empty","entries":[]}"#).unwrap(), RunOptions::default());
        assert!(m.pass);
        assert_eq!(m.exit_code(), 0);
        assert_eq!(m.warnings.len(), 1);
    }

    #[test]
    fn trace_params_add_step_series() {
        let s = parse_suite_str(&SMALL
            .replace("1 - (x*x + y*y)", "max(0, 1 - (x*x + y*y))")
            .replace("\"checks\"", "\"params\": {\"h\": 0.0078125, \"eps\": 0.2, \"s\": 0.02}, \"checks\"")).unwrap();
        let m = run_suite(&s, RunOptions::default());
        assert_eq!(m.entries[0].traces.len(), 1, "{:?}", m.entries[0].errors);
        assert_eq!(m.series.len(), 7);
        assert!(m.series.iter().any(|p| p.name == "entry0_main5"));
    }

    #[test]
    fn swap_fixture_fails() {
        let s = parse_suite_str(&SMALL.replace("\"bv_bound\"", "\"swap_test\"")).unwrap();
        let m = run_suite(&s, RunOptions::default());
        assert_eq!(m.exit_code(), 1);
        assert_eq!(m.failures(), 1);
    }
}
