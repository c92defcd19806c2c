//! Result tables: CSV (one row per grid point) plus a JSON sidecar holding
//! the resolved config and provenance.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::Result;

pub const CSV_HEADER: &str = "osnr_db,dgd_ps,linewidth_hz,ber,failures,trials,bits,required_osnr_db,seed";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub osnr_db: Option<f64>,
    pub dgd_ps: f64,
    pub linewidth_hz: f64,
    pub ber: Option<f64>,
    pub failures: usize,
    pub trials: usize,
    pub bits: usize,
    pub required_osnr_db: Option<f64>,
    pub seed: u64,
    /// Linewidth sweeps: required-OSNR penalty against the reference.
    pub penalty_db: Option<f64>,
    pub note: Option<String>,
}

impl ResultRow {
    pub fn failure_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.failures as f64 / self.trials as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub kind: String,
    pub config_hash: String,
    pub seed: u64,
    pub code_version: String,
    pub config: ExperimentConfig,
    pub rows: Vec<ResultRow>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ExperimentResult {
    pub fn new(kind: &str, config: &ExperimentConfig, rows: Vec<ResultRow>) -> Self {
        Self {
            kind: kind.to_string(),
            config_hash: config.hash(),
            seed: config.master_seed,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            rows,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# {} config_hash={} seed={} version={}\n{CSV_HEADER}\n",
            self.kind, self.config_hash, self.seed, self.code_version
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                opt(r.osnr_db),
                r.dgd_ps,
                r.linewidth_hz,
                opt(r.ber),
                r.failures,
                r.trials,
                r.bits,
                opt(r.required_osnr_db),
                r.seed
            );
        }
        out
    }

    /// Sidecar document; carries a generation timestamp, so unlike the CSV
    /// it is not byte-stable across runs.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            #[serde(flatten)]
            result: &'a ExperimentResult,
            generated_unix_s: u64,
        }
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        serde_json::to_string_pretty(&Doc {
            result: self,
            generated_unix_s: now,
        })
        .expect("result serializes")
    }

    pub fn sidecar_path(csv_path: &Path) -> PathBuf {
        csv_path.with_extension("json")
    }

    /// Writes the CSV and its JSON sidecar.
    pub fn write(&self, csv_path: &Path) -> Result<()> {
        std::fs::write(csv_path, self.to_csv())?;
        std::fs::write(Self::sidecar_path(csv_path), self.to_json())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let cfg = ExperimentConfig::default();
        let rows = vec![
            ResultRow {
                osnr_db: Some(20.0),
                dgd_ps: 10.0,
                linewidth_hz: 10000.0,
                ber: Some(0.0125),
                failures: 1,
                trials: 4,
                bits: 240000,
                required_osnr_db: None,
                seed: 1,
                penalty_db: None,
                note: None,
            },
            ResultRow {
                osnr_db: None,
                dgd_ps: 3.0,
                linewidth_hz: 0.0,
                ber: None,
                failures: 0,
                trials: 8,
                bits: 0,
                required_osnr_db: Some(17.25),
                seed: 1,
                penalty_db: Some(0.5),
                note: None,
            },
        ];
        let res = ExperimentResult::new("ber-sweep", &cfg, rows);
        let csv = res.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# ber-sweep config_hash="));
        assert_eq!(lines[1], CSV_HEADER);
        assert_eq!(lines[2], "20,10,10000,0.0125,1,4,240000,,1");
        assert_eq!(lines[3], ",3,0,,0,8,0,17.25,1");
        assert_eq!(res.rows[0].failure_rate(), 0.25);
        let json: serde_json::Value = serde_json::from_str(&res.to_json()).unwrap();
        assert_eq!(json["config"]["format"], 16);
        assert!(json["generated_unix_s"].as_u64().is_some());
    }
}
