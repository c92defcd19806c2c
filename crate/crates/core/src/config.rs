//! Experiment configuration, read from JSON. Every field has a default, so a
//! config file only needs the values it changes; unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::{ChannelConfig, ObpfShape};
use crate::equalizer::{Algorithm, EqConfig, TapInit, DEFAULT_TAPS};
use crate::error::{Error, Result};
use crate::framing::FrameSchedule;
use crate::qam::CandidateMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinkMode {
    /// 28.5 GHz pulses at 32 GBd with precoding.
    Ftn,
    /// 32 GHz pulses, precoder bypassed.
    Nyquist,
}

/// How a swept laser linewidth is assigned to the lasers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinewidthModel {
    /// Each transmitter laser and the LO get the full value.
    PerLaser,
    /// Transmitter lasers carry the full value, the LO is ideal.
    Combined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThpSettings {
    pub n_fbf: usize,
    pub n_ffe: usize,
    /// OSNR (dB, 0.1 nm) at which the MMSE filters are designed. Unset
    /// means 20 dB, or 26 dB for 64-QAM whose residual ISI at 20 dB already
    /// causes errors without noise.
    pub design_osnr_db: Option<f64>,
    /// Optional filter file (as written by `derive-thp`) overriding the
    /// design above.
    pub filters_path: Option<String>,
}

impl Default for ThpSettings {
    fn default() -> Self {
        Self {
            n_fbf: 8,
            n_ffe: 21,
            design_osnr_db: None,
            filters_path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EqSettings {
    pub n_taps: usize,
    pub mu_taps: f64,
    pub mu_phase: f64,
    pub convergence_threshold: f64,
    pub tap_init: TapInit,
    pub normalized_taps: bool,
}

impl Default for EqSettings {
    fn default() -> Self {
        let d = EqConfig::default();
        Self {
            n_taps: DEFAULT_TAPS,
            mu_taps: d.mu_taps,
            mu_phase: d.mu_phase,
            convergence_threshold: d.convergence_threshold,
            tap_init: d.tap_init,
            normalized_taps: d.normalized_taps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// QAM order: 4, 16 or 64.
    pub format: usize,
    pub mode: LinkMode,
    pub n_channels: usize,
    pub algorithm: Algorithm,
    pub candidate_mode: CandidateMode,
    /// Training-symbol type; unset picks Type I, or Type III for 64-QAM.
    pub ts_type: Option<usize>,
    pub osnr_db: Vec<f64>,
    pub dgd_ps: Vec<f64>,
    pub linewidth_hz: Vec<f64>,
    pub n_trials: usize,
    pub n_payload_blocks: usize,
    pub master_seed: u64,
    pub target_ber: f64,
    /// Trials above this BER count as convergence failures.
    pub failure_ber: f64,
    pub min_bits_per_probe: usize,
    pub osnr_resolution_db: f64,
    pub symbol_rate_hz: f64,
    pub channel_spacing_hz: f64,
    pub rrc_taps: usize,
    pub rolloff: f64,
    pub ftn_bandwidth_hz: f64,
    pub nyquist_bandwidth_hz: f64,
    pub aggregate_oversampling: usize,
    pub sop_angle_deg: f64,
    pub obpf_bw_hz: f64,
    pub obpf_shape: ObpfShape,
    pub linewidth_model: LinewidthModel,
    pub point_spacing: f64,
    pub modulo_factor: f64,
    pub preamble_len: usize,
    pub pilot_len: usize,
    pub payload_block: usize,
    pub trailing_pilot: bool,
    pub repeat_pilots: bool,
    /// Zero symbols around each frame so circular spectral operations do not
    /// wrap frame edges into each other.
    pub guard_symbols: usize,
    pub thp: ThpSettings,
    pub equalizer: EqSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            format: 16,
            mode: LinkMode::Ftn,
            n_channels: 5,
            algorithm: Algorithm::MtsLms,
            candidate_mode: CandidateMode::Inward,
            ts_type: None,
            osnr_db: vec![16.0, 18.0, 20.0, 22.0, 24.0],
            dgd_ps: vec![10.0],
            linewidth_hz: vec![10e3],
            n_trials: 200,
            n_payload_blocks: 10,
            master_seed: 1,
            target_ber: 2.42e-2,
            failure_ber: 0.1,
            min_bits_per_probe: 100_000,
            osnr_resolution_db: 0.1,
            symbol_rate_hz: 32e9,
            channel_spacing_hz: 30e9,
            rrc_taps: 73,
            rolloff: 0.1,
            ftn_bandwidth_hz: 28.5e9,
            nyquist_bandwidth_hz: 32e9,
            aggregate_oversampling: 8,
            sop_angle_deg: 45.0,
            obpf_bw_hz: 50e9,
            obpf_shape: ObpfShape::Rectangular,
            linewidth_model: LinewidthModel::PerLaser,
            point_spacing: 1.0,
            modulo_factor: 0.3,
            preamble_len: 1000,
            pilot_len: 24,
            payload_block: 1000,
            trailing_pilot: true,
            repeat_pilots: false,
            guard_symbols: 64,
            thp: ThpSettings::default(),
            equalizer: EqSettings::default(),
        }
    }
}

impl ExperimentConfig {
    /// Parses a JSON document. Errors carry serde's line/column anchor.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(serde_json::to_vec(self).expect("config serializes"));
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if ![4, 16, 64].contains(&self.format) {
            return bad(format!("format must be 4, 16 or 64, got {}", self.format));
        }
        if self.n_channels == 0 || self.n_channels.is_multiple_of(2) {
            return bad(format!("n_channels must be odd, got {}", self.n_channels));
        }
        if self.osnr_db.is_empty() || self.dgd_ps.is_empty() || self.linewidth_hz.is_empty() {
            return bad("grids must be non-empty".into());
        }
        if self.osnr_db.iter().any(|v| v.is_nan()) {
            return bad("OSNR grid contains NaN".into());
        }
        if self.dgd_ps.iter().chain(&self.linewidth_hz).any(|v| !(*v >= 0.0)) {
            return bad("DGD and linewidth grids must be non-negative".into());
        }
        if self.n_trials == 0 {
            return bad("n_trials must be at least 1".into());
        }
        let ts = self.ts_type_index();
        if ts == 0 || ts > (self.format as f64).sqrt() as usize / 2 {
            return bad(format!("no training-symbol type {ts} for {}-QAM", self.format));
        }
        if !self.thp_design_osnr_db().is_finite() {
            return bad("thp.design_osnr_db must be finite".into());
        }
        if !(self.target_ber > 0.0 && self.target_ber < 1.0) {
            return bad(format!("target_ber must lie in (0, 1), got {}", self.target_ber));
        }
        if !(self.osnr_resolution_db > 0.0) {
            return bad("osnr_resolution_db must be positive".into());
        }
        if self.rrc_taps.is_multiple_of(2) {
            return bad("rrc_taps must be odd".into());
        }
        if self.payload_block == 0 {
            return bad("payload_block must be positive".into());
        }
        self.channel_config(0.0, 0.0, f64::INFINITY)
            .validate()
            .or_else(|e| bad(e.to_string()))?;
        self.eq_config().validate().or_else(|e| bad(e.to_string()))
    }

    pub fn thp_design_osnr_db(&self) -> f64 {
        self.thp
            .design_osnr_db
            .unwrap_or(if self.format == 64 { 26.0 } else { 20.0 })
    }

    pub fn ts_type_index(&self) -> usize {
        self.ts_type.unwrap_or(if self.format == 64 { 3 } else { 1 })
    }

    pub fn uses_thp(&self) -> bool {
        self.mode == LinkMode::Ftn
    }

    pub fn shaping_bandwidth(&self) -> f64 {
        match self.mode {
            LinkMode::Ftn => self.ftn_bandwidth_hz,
            LinkMode::Nyquist => self.nyquist_bandwidth_hz,
        }
    }

    pub fn schedule(&self) -> FrameSchedule {
        FrameSchedule {
            preamble_len: self.preamble_len,
            pilot_len: self.pilot_len,
            payload_block: self.payload_block,
            n_blocks: self.n_payload_blocks,
            trailing_pilot: self.trailing_pilot,
        }
    }

    pub fn eq_config(&self) -> EqConfig {
        EqConfig {
            n_taps: self.equalizer.n_taps,
            mu_taps: self.equalizer.mu_taps,
            mu_phase: self.equalizer.mu_phase,
            algorithm: self.algorithm,
            candidate_mode: self.candidate_mode,
            extended_lattice: self.uses_thp(),
            convergence_threshold: self.equalizer.convergence_threshold,
            tap_init: self.equalizer.tap_init,
            normalized_taps: self.equalizer.normalized_taps,
        }
    }

    pub fn channel_config(&self, dgd_ps: f64, linewidth_hz: f64, osnr_db: f64) -> ChannelConfig {
        let lo = match self.linewidth_model {
            LinewidthModel::PerLaser => linewidth_hz,
            LinewidthModel::Combined => 0.0,
        };
        ChannelConfig {
            n_channels: self.n_channels,
            spacing_hz: self.channel_spacing_hz,
            symbol_rate: self.symbol_rate_hz,
            occupied_bw_hz: self.shaping_bandwidth() * (1.0 + self.rolloff),
            dgd_s: dgd_ps * 1e-12,
            sop_angle_deg: self.sop_angle_deg,
            tx_linewidth_hz: linewidth_hz,
            lo_linewidth_hz: lo,
            osnr_db,
            obpf_bw_hz: self.obpf_bw_hz,
            obpf_shape: self.obpf_shape,
            aggregate_oversampling: self.aggregate_oversampling,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_and_validate() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
        assert_eq!(cfg.hash().len(), 64);
    }

    #[test]
    fn partial_documents_take_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"format": 64, "ts_type": 3, "mode": "nyquist"}"#).unwrap();
        assert_eq!(cfg.format, 64);
        assert_eq!(cfg.ts_type_index(), 3);
        assert_eq!(ExperimentConfig::from_json(r#"{"format": 64}"#).unwrap().ts_type_index(), 3);
        assert_eq!(ExperimentConfig::default().ts_type_index(), 1);
        assert!(!cfg.uses_thp());
        assert!(!cfg.eq_config().extended_lattice);
        assert_eq!(cfg.shaping_bandwidth(), 32e9);
    }

    #[test]
    fn rejects_unknown_keys_with_position() {
        let err = ExperimentConfig::from_json("{\n  \"format\": 16,\n  \"bogus\": 1\n}").unwrap_err();
        let Error::Config(msg) = err else { panic!("wrong error kind") };
        assert!(msg.contains("bogus"), "{msg}");
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn rejects_bad_values() {
        for doc in [
            r#"{"format": 8}"#,
            r#"{"osnr_db": []}"#,
            r#"{"n_trials": 0}"#,
            r#"{"ts_type": 3}"#,
            r#"{"n_channels": 4}"#,
            r#"{"dgd_ps": [-1]}"#,
            r#"{"aggregate_oversampling": 3}"#,
        ] {
            assert!(matches!(ExperimentConfig::from_json(doc), Err(Error::Config(_))), "{doc}");
        }
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::default();
        let b = ExperimentConfig {
            master_seed: 2,
            ..a.clone()
        };
        assert_ne!(a.hash(), b.hash());
    }
}
