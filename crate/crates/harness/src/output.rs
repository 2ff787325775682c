//! Fixed-schema CSV rows and the run-metadata sidecar.

use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use tracerec_core::{ProbReport, RngSpec};

use crate::error::Result;

pub const CSV_HEADER: [&str; 12] = [
    "estimator", "n", "p", "T_or_c", "a", "value", "ln_value", "ci_low", "ci_high", "trials", "seed", "method",
];

/// The trace-count column: an integer `T`, or `c` with its exponent `a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TraceColumn {
    Count(u64),
    Exponent { c: f64, a: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateRow {
    pub estimator: String,
    pub n: usize,
    pub p: f64,
    pub traces: TraceColumn,
    pub value: f64,
    pub ln_value: f64,
    pub ci: Option<(f64, f64)>,
    /// `(trials, seed)` for sampled rows.
    pub sampling: Option<(u64, u64)>,
    pub method: String,
}

impl EstimateRow {
    pub fn analytic(estimator: impl Into<String>, n: usize, p: f64, traces: TraceColumn, report: &ProbReport) -> Self {
        Self {
            estimator: estimator.into(),
            n,
            p,
            traces,
            value: report.value,
            ln_value: report.ln_value,
            ci: report.ci,
            sampling: None,
            method: report.method.tag().to_string(),
        }
    }

    fn record(&self) -> [String; 12] {
        let opt = |x: Option<String>| x.unwrap_or_default();
        let (t_or_c, a) = match self.traces {
            TraceColumn::Count(t) => (t.to_string(), String::new()),
            TraceColumn::Exponent { c, a } => (c.to_string(), a.to_string()),
        };
        [
            self.estimator.clone(),
            self.n.to_string(),
            self.p.to_string(),
            t_or_c,
            a,
            self.value.to_string(),
            self.ln_value.to_string(),
            opt(self.ci.map(|c| c.0.to_string())),
            opt(self.ci.map(|c| c.1.to_string())),
            opt(self.sampling.map(|s| s.0.to_string())),
            opt(self.sampling.map(|s| s.1.to_string())),
            self.method.clone(),
        ]
    }
}

pub fn write_csv<W: Write>(out: W, rows: &[EstimateRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.txt");
    PathBuf::from(name)
}

pub fn config_hash(canonical_json: &str) -> String {
    Sha256::digest(canonical_json.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn metadata_text(canonical_json: &str, seed: u64) -> String {
    format!(
        "tool: tracerec {}\nrng: {}\nseed: {}\nconfig_sha256: {}\nconfig: {}\n",
        env!("CARGO_PKG_VERSION"),
        RngSpec::ALGORITHM,
        seed,
        config_hash(canonical_json),
        canonical_json,
    )
}

/// Writes the CSV to `path` and its metadata sidecar next to it.
pub fn write_outputs(path: &Path, rows: &[EstimateRow], canonical_json: &str, seed: u64) -> Result<()> {
    write_csv(std::fs::File::create(path)?, rows)?;
    std::fs::write(sidecar_path(path), metadata_text(canonical_json, seed))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let row = EstimateRow {
            estimator: "E2bar".into(),
            n: 10,
            p: 0.3,
            traces: TraceColumn::Count(8),
            value: 0.0,
            ln_value: f64::NEG_INFINITY,
            ci: Some((0.0, 0.25)),
            sampling: Some((100, 7)),
            method: "monte-carlo".into(),
        };
        let mut buf = Vec::new();
        write_csv(&mut buf, &[row]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "estimator,n,p,T_or_c,a,value,ln_value,ci_low,ci_high,trials,seed,method\n\
             E2bar,10,0.3,8,,0,-inf,0,0.25,100,7,monte-carlo\n"
        );
    }

    #[test]
    fn hash_is_sha256() {
        assert_eq!(
            config_hash("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_eq!(sidecar_path(Path::new("out/run.csv")), PathBuf::from("out/run.csv.meta.txt"));
    }
}
