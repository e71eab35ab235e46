//! Result serialization: the fixed-schema CSV, gnuplot-ready column dumps
//! and the run manifest that makes a sweep reproducible.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::powermodel::CATALOG_VERSION;
use crate::scalar::Scalar;
use crate::scenarios::{ResultRow, SolverKind};

pub const CSV_HEADER: &str = "scenario,demand_mips,traffic_gbps,K,solver,total_w,network_w,\
processing_w,iot_w,accessfog_w,edgefog_w,metro_w,core_w,cloud_w,baseline_w,\
savings_vs_cloud_pct,savings_vs_k1_pct,optimal,wall_ms";

pub const ARTIFACT_VERSION: &str = "fogsplit-rows-v1";

/// Six significant digits, no exponent, trailing zeros trimmed.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs().log10().floor() as i32;
    let dec = (5 - mag).max(0) as usize;
    let s = format!("{v:.dec$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Serializes rows under the fixed header. Wall times are reported as 0
/// unless `timings` is set, so repeated runs produce byte-identical files.
pub fn rows_to_csv<T: Scalar>(rows: &[ResultRow<T>], timings: bool) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let wall_ms = if timings {
            r.wall.as_secs_f64() * 1e3
        } else {
            0.0
        };
        let f = |v: T| fmt_sig(v.as_f64());
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.scenario,
            f(r.demand_mips),
            f(r.traffic_gbps),
            r.k,
            r.solver.label(),
            f(r.total),
            f(r.network),
            f(r.processing),
            f(r.layer[0]),
            f(r.layer[1]),
            f(r.layer[2]),
            f(r.layer[3]),
            f(r.layer[4]),
            f(r.layer[5]),
            f(r.baseline),
            f(r.savings_vs_cloud_pct),
            f(r.savings_vs_k1_pct),
            r.optimal,
            fmt_sig(wall_ms),
        ));
    }
    out
}

/// Parses a file produced by [`rows_to_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<ResultRow<f64>>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(Error::InvalidParameter(format!(
                "unexpected CSV header: {other:?}"
            )))
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 19 {
            return Err(Error::InvalidParameter(format!(
                "CSV row {} has {} cells, expected 19",
                idx + 2,
                cells.len()
            )));
        }
        let num = |i: usize| -> Result<f64> {
            cells[i].parse().map_err(|_| {
                Error::InvalidParameter(format!(
                    "CSV row {}: '{}' is not a number",
                    idx + 2,
                    cells[i]
                ))
            })
        };
        rows.push(ResultRow {
            scenario: cells[0].to_string(),
            demand_mips: num(1)?,
            traffic_gbps: num(2)?,
            k: num(3)? as usize,
            solver: cells[4].parse::<SolverKind>()?,
            total: num(5)?,
            network: num(6)?,
            processing: num(7)?,
            layer: [num(8)?, num(9)?, num(10)?, num(11)?, num(12)?, num(13)?],
            baseline: num(14)?,
            savings_vs_cloud_pct: num(15)?,
            savings_vs_k1_pct: num(16)?,
            optimal: cells[17].parse().map_err(|_| {
                Error::InvalidParameter(format!("CSV row {}: bad optimal flag", idx + 2))
            })?,
            wall: std::time::Duration::from_secs_f64(num(18)? / 1e3),
        });
    }
    Ok(rows)
}

/// One gnuplot data block per traffic level: `K total_w savings_pct`
/// columns, blank-line separated, ready for `plot ... index N`.
pub fn rows_to_gnuplot<T: Scalar>(rows: &[ResultRow<T>]) -> String {
    let mut out = String::from("# K total_w savings_vs_cloud_pct\n");
    let mut current: Option<f64> = None;
    for r in rows {
        let t = r.traffic_gbps.as_f64();
        if current.is_some() && current != Some(t) {
            out.push('\n');
        }
        if current != Some(t) {
            out.push_str(&format!("# traffic_gbps = {}\n", fmt_sig(t)));
            current = Some(t);
        }
        out.push_str(&format!(
            "{} {} {}\n",
            r.k,
            fmt_sig(r.total.as_f64()),
            fmt_sig(r.savings_vs_cloud_pct.as_f64()),
        ));
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let digest = h.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Everything needed to reproduce a sweep, written next to the CSV.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub config_sha256: String,
    pub catalog_version: String,
    pub solver: SolverKind,
    pub max_nodes: u64,
    pub min_alloc: f64,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub artifact_version: String,
}

impl RunManifest {
    pub fn new(config_text: &str, solver: SolverKind, max_nodes: u64, min_alloc: f64) -> Self {
        RunManifest {
            config_sha256: sha256_hex(config_text.as_bytes()),
            catalog_version: CATALOG_VERSION.to_string(),
            solver,
            max_nodes,
            min_alloc,
            started_unix_ms: now_unix_ms(),
            finished_unix_ms: 0,
            artifact_version: ARTIFACT_VERSION.to_string(),
        }
    }

    pub fn finish(&mut self) {
        self.finished_unix_ms = now_unix_ms();
    }

    pub fn to_text(&self) -> String {
        format!(
            "config_sha256: {}\ncatalog_version: {}\nsolver: {}\nmax_nodes: {}\n\
min_alloc: {}\nstarted_unix_ms: {}\nfinished_unix_ms: {}\nartifact_version: {}\n",
            self.config_sha256,
            self.catalog_version,
            self.solver.label(),
            self.max_nodes,
            fmt_sig(self.min_alloc),
            self.started_unix_ms,
            self.finished_unix_ms,
            self.artifact_version,
        )
    }
}

fn now_unix_ms() -> u128 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}
