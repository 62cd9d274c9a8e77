use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::expansion::{parity_check, ExpansionResult, TruncatedSeries};
use crate::flow::FlowReport;

pub const FLOW_CSV_HEADER: &str = "t,weighted_dev,min_lapse,as_defect_2,residual_sup";

/// Writes `contents` to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Indices of the monitor samples kept when thinning by `every`.
fn kept_rows(len: usize, every: usize) -> impl Iterator<Item = usize> {
    (0..len).filter(move |i| i % every == 0 || i + 1 == len)
}

pub fn flow_csv(report: &FlowReport, every: usize) -> String {
    let mut out = String::from(FLOW_CSV_HEADER);
    out.push('\n');
    for i in kept_rows(report.len(), every.max(1)) {
        writeln!(
            out,
            "{},{},{},{},{}",
            report.times[i],
            report.weighted_dev[i],
            report.min_lapse[i],
            report.as_defect[i],
            report.residual_norms[i]
        )
        .expect("writing to a String");
    }
    out
}

pub fn emit_flow_csv(report: &FlowReport, path: &Path) -> Result<(), CliError> {
    write_atomic(path, flow_csv(report, 1).as_bytes())
}

/// On-disk form of an expansion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionRecord {
    pub n: usize,
    pub scal: f64,
    pub max_order: usize,
    pub c: TruncatedSeries,
    pub u: TruncatedSeries,
    pub determinants: Vec<f64>,
    pub parity_ok: bool,
}

impl ExpansionRecord {
    pub fn new(res: &ExpansionResult) -> Self {
        Self {
            n: res.n,
            scal: res.scal,
            max_order: res.max_order,
            c: res.c.clone(),
            u: res.u.clone(),
            determinants: res.determinants.clone(),
            parity_ok: parity_check(res),
        }
    }

    pub fn into_result(self) -> ExpansionResult {
        ExpansionResult {
            n: self.n,
            scal: self.scal,
            max_order: self.max_order,
            c: self.c,
            u: self.u,
            determinants: self.determinants,
        }
    }
}

pub fn expansion_json(res: &ExpansionResult) -> String {
    let mut s = serde_json::to_string_pretty(&ExpansionRecord::new(res)).expect("finite coefficients");
    s.push('\n');
    s
}

pub fn emit_expansion_json(res: &ExpansionResult, path: &Path) -> Result<(), CliError> {
    write_atomic(path, expansion_json(res).as_bytes())
}

pub fn read_expansion_json(path: &Path) -> Result<ExpansionRecord, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}
