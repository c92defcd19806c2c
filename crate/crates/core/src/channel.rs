//! The optical path: WDM aggregation, laser phase noise, first-order PMD,
//! OSNR-referenced noise loading, optical band-pass filtering and the
//! coherent receiver front end.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{
    add_awgn_in_place, bin_frequency, downsample, fft_in_place, fir_filter, frequency_shift,
    ifft_in_place, interpolate, upsample, FirFilter, SampledSignal, C64,
};

/// OSNR reference bandwidth (0.1 nm at 1550 nm).
pub const OSNR_REF_BW_HZ: f64 = 12.5e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObpfShape {
    Rectangular,
    /// Second-order super-Gaussian, -3 dB at the band edges.
    SuperGaussian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    pub n_channels: usize,
    pub spacing_hz: f64,
    pub symbol_rate: f64,
    /// Two-sided occupied bandwidth of one channel, used for alias checks.
    pub occupied_bw_hz: f64,
    pub dgd_s: f64,
    pub sop_angle_deg: f64,
    pub tx_linewidth_hz: f64,
    pub lo_linewidth_hz: f64,
    /// `f64::INFINITY` disables noise loading.
    pub osnr_db: f64,
    pub obpf_bw_hz: f64,
    pub obpf_shape: ObpfShape,
    pub aggregate_oversampling: usize,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            n_channels: 5,
            spacing_hz: 30e9,
            symbol_rate: 32e9,
            occupied_bw_hz: 28.5e9 * 1.1,
            dgd_s: 0.0,
            sop_angle_deg: 45.0,
            tx_linewidth_hz: 0.0,
            lo_linewidth_hz: 0.0,
            osnr_db: f64::INFINITY,
            obpf_bw_hz: 50e9,
            obpf_shape: ObpfShape::Rectangular,
            aggregate_oversampling: 8,
        }
    }
}

impl ChannelConfig {
    pub fn aggregate_rate(&self) -> f64 {
        self.symbol_rate * self.aggregate_oversampling as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_channels == 0 || self.n_channels.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "channel count must be odd, got {}",
                self.n_channels
            )));
        }
        if self.aggregate_oversampling < 2 || !self.aggregate_oversampling.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "aggregate oversampling must be even, got {}",
                self.aggregate_oversampling
            )));
        }
        if self.dgd_s < 0.0 || self.tx_linewidth_hz < 0.0 || self.lo_linewidth_hz < 0.0 {
            return Err(Error::InvalidParameter(
                "DGD and linewidths must be non-negative".into(),
            ));
        }
        let span = (self.n_channels - 1) as f64 * self.spacing_hz + self.occupied_bw_hz;
        if span > self.aggregate_rate() {
            return Err(Error::Aliasing {
                shift_hz: (self.n_channels / 2) as f64 * self.spacing_hz,
                sample_rate: self.aggregate_rate(),
            });
        }
        Ok(())
    }

    pub fn jones(&self) -> JonesState {
        JonesState::new(self.dgd_s, self.sop_angle_deg.to_radians())
    }
}

/// First-order PMD: `R(theta) diag(e^{+j w tau/2}, e^{-j w tau/2}) R(-theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesState {
    pub dgd_s: f64,
    pub angle_rad: f64,
}

impl JonesState {
    pub fn new(dgd_s: f64, angle_rad: f64) -> Self {
        Self { dgd_s, angle_rad }
    }

    /// 2x2 transfer matrix at baseband frequency `f_hz`, row-major.
    pub fn transfer(&self, f_hz: f64) -> [[C64; 2]; 2] {
        let (s, c) = self.angle_rad.sin_cos();
        let half = PI * f_hz * self.dgd_s; // w tau / 2
        let p = C64::from_polar(1.0, half);
        let m = C64::from_polar(1.0, -half);
        // R diag(p, m) R^T with R = [[c, -s], [s, c]]
        [
            [p * c * c + m * s * s, (p - m) * c * s],
            [(p - m) * c * s, p * s * s + m * c * c],
        ]
    }
}

/// Wiener phase path with increments of variance `2 pi linewidth / fs`,
/// starting at zero.
pub fn wiener_phase<R: Rng + ?Sized>(n: usize, linewidth: f64, sample_rate: f64, rng: &mut R) -> Vec<f64> {
    let sigma = (2.0 * PI * linewidth / sample_rate).sqrt();
    let mut phase = Vec::with_capacity(n);
    let mut acc = 0.0;
    for _ in 0..n {
        phase.push(acc);
        let z: f64 = rng.sample(StandardNormal);
        acc += sigma * z;
    }
    phase
}

/// One laser's phase noise, common to both polarizations.
pub fn apply_phase_noise<R: Rng + ?Sized>(
    signal: &SampledSignal,
    linewidth: f64,
    rng: &mut R,
) -> Result<SampledSignal> {
    rotate_by_phase_noise(signal, linewidth, 1.0, rng)
}

fn rotate_by_phase_noise<R: Rng + ?Sized>(
    signal: &SampledSignal,
    linewidth: f64,
    sign: f64,
    rng: &mut R,
) -> Result<SampledSignal> {
    if !(linewidth >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "linewidth must be non-negative, got {linewidth}"
        )));
    }
    if linewidth == 0.0 {
        return Ok(signal.clone());
    }
    let phase = wiener_phase(signal.len(), linewidth, signal.sample_rate(), rng);
    let rot: Vec<C64> = phase.iter().map(|&p| C64::from_polar(1.0, sign * p)).collect();
    Ok(signal.map_pols(signal.sample_rate(), |pol| {
        pol.iter().zip(&rot).map(|(s, r)| s * r).collect()
    }))
}

/// Places channel `i` at `(i - (n-1)/2) * spacing` and sums.
pub fn wdm_mux(channels: &[SampledSignal], config: &ChannelConfig) -> Result<SampledSignal> {
    if channels.is_empty() || channels.len().is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "need an odd, non-zero number of channels, got {}",
            channels.len()
        )));
    }
    let rate = config.aggregate_rate();
    for ch in channels {
        if (ch.sample_rate() - rate).abs() > 1e-6 * rate {
            return Err(Error::RateMismatch(rate, ch.sample_rate()));
        }
    }
    let cfg = ChannelConfig {
        n_channels: channels.len(),
        ..config.clone()
    };
    cfg.validate()?;
    let half = (channels.len() / 2) as isize;
    let mut agg: Option<SampledSignal> = None;
    for (i, ch) in channels.iter().enumerate() {
        let offset = (i as isize - half) as f64 * config.spacing_hz;
        let shifted = frequency_shift(&ch.clone().with_center_offset(0.0), offset)?;
        match agg.as_mut() {
            None => agg = Some(shifted.with_center_offset(0.0)),
            Some(a) => a.accumulate(&shifted.with_center_offset(0.0))?,
        }
    }
    Ok(agg.expect("at least one channel"))
}

/// Applies the PMD transfer in the frequency domain (circularly over the
/// frame).
pub fn apply_pmd(aggregate: &SampledSignal, jones: &JonesState) -> Result<SampledSignal> {
    if !aggregate.is_dual() {
        return Err(Error::NotDualPol);
    }
    let n = aggregate.len();
    let fs = aggregate.sample_rate();
    if jones.dgd_s * fs * 100.0 > n as f64 {
        return Err(Error::InvalidParameter(format!(
            "frame of {n} samples is shorter than 100x the DGD"
        )));
    }
    if jones.dgd_s == 0.0 {
        return Ok(aggregate.clone());
    }
    let mut x = aggregate.pol(0).to_vec();
    let mut y = aggregate.pol(1).to_vec();
    fft_in_place(&mut x);
    fft_in_place(&mut y);
    for k in 0..n {
        let j = jones.transfer(bin_frequency(k, n, fs));
        let (a, b) = (x[k], y[k]);
        x[k] = j[0][0] * a + j[0][1] * b;
        y[k] = j[1][0] * a + j[1][1] * b;
    }
    ifft_in_place(&mut x);
    ifft_in_place(&mut y);
    Ok(SampledSignal::dual(x, y, fs)?.with_center_offset(aggregate.center_offset()))
}

/// Total (both polarizations) noise power over the simulation bandwidth for
/// the requested OSNR.
pub fn osnr_noise_power(osnr_db: f64, signal_power_ref: f64, sample_rate: f64) -> f64 {
    if osnr_db.is_infinite() && osnr_db > 0.0 {
        return 0.0;
    }
    signal_power_ref / 10f64.powf(osnr_db / 10.0) * (sample_rate / OSNR_REF_BW_HZ)
}

/// Adds white Gaussian noise so that the signal-to-noise ratio in a 12.5 GHz
/// reference band (both noise polarizations) equals `osnr_db`.
/// `signal_power_ref` is the total (both-polarization) channel power.
pub fn load_osnr_noise<R: Rng + ?Sized>(
    aggregate: &SampledSignal,
    osnr_db: f64,
    signal_power_ref: f64,
    rng: &mut R,
) -> Result<SampledSignal> {
    if osnr_db.is_nan() || (osnr_db.is_infinite() && osnr_db < 0.0) {
        return Err(Error::InvalidParameter(format!("invalid OSNR {osnr_db}")));
    }
    let total = osnr_noise_power(osnr_db, signal_power_ref, aggregate.sample_rate());
    let mut out = aggregate.clone();
    add_awgn_in_place(&mut out, total / aggregate.n_pols() as f64, rng);
    Ok(out)
}

/// Optical band-pass filter centered at `center_hz` with total width `bw_hz`.
pub fn obpf(aggregate: &SampledSignal, bw_hz: f64, shape: ObpfShape, center_hz: f64) -> Result<SampledSignal> {
    let fs = aggregate.sample_rate();
    if !(bw_hz > 0.0) || bw_hz > fs {
        return Err(Error::InvalidParameter(format!(
            "OBPF bandwidth {bw_hz} Hz outside (0, {fs}] Hz"
        )));
    }
    if shape == ObpfShape::Rectangular && bw_hz == fs && center_hz == 0.0 {
        return Ok(aggregate.clone());
    }
    let n = aggregate.len();
    let response: Vec<f64> = (0..n)
        .map(|k| {
            let f = bin_frequency(k, n, fs) - center_hz;
            match shape {
                ObpfShape::Rectangular => {
                    if f.abs() <= bw_hz / 2.0 {
                        1.0
                    } else {
                        0.0
                    }
                }
                ObpfShape::SuperGaussian => {
                    let x = 2.0 * f / bw_hz;
                    (-0.5 * 2f64.ln() * x.powi(4)).exp()
                }
            }
        })
        .collect();
    Ok(spectral_filter(aggregate, &response))
}

fn spectral_filter(signal: &SampledSignal, response: &[f64]) -> SampledSignal {
    signal.map_pols(signal.sample_rate(), |p| {
        let mut buf = p.to_vec();
        fft_in_place(&mut buf);
        for (b, h) in buf.iter_mut().zip(response) {
            *b *= *h;
        }
        ifft_in_place(&mut buf);
        buf
    })
}

/// Transmit DSP and ideal DAC/modulator for one dual-polarization channel:
/// 2x zero-stuffing, pulse shaping at 2 samples/symbol, then band-limited
/// interpolation up to the aggregate rate.
pub fn modulate(
    symbols: [&[C64]; 2],
    pulse: &FirFilter,
    config: &ChannelConfig,
) -> Result<SampledSignal> {
    let sym = SampledSignal::dual(symbols[0].to_vec(), symbols[1].to_vec(), config.symbol_rate)?;
    let shaped = fir_filter(&upsample(&sym, 2)?, pulse)?;
    interpolate(&shaped, config.aggregate_oversampling / 2)
}

/// Coherent receiver: OBPF on the central channel, LO phase noise, ideal 90
/// degree hybrid and ADC at 2 samples/symbol, matched filter.
pub fn coherent_rx_frontend<R: Rng + ?Sized>(
    aggregate: &SampledSignal,
    config: &ChannelConfig,
    matched: &FirFilter,
    rng: &mut R,
) -> Result<SampledSignal> {
    if !config.aggregate_oversampling.is_multiple_of(2) {
        return Err(Error::InvalidParameter(
            "aggregate oversampling must be even to reach 2 samples/symbol".into(),
        ));
    }
    let decim = config.aggregate_oversampling / 2;
    let rx_rate = 2.0 * config.symbol_rate;
    let mut filtered = obpf(aggregate, config.obpf_bw_hz.min(aggregate.sample_rate()), config.obpf_shape, 0.0)?;
    if config.obpf_bw_hz > rx_rate && decim > 1 {
        // ADC anti-aliasing at the 2 samples/symbol Nyquist band.
        filtered = obpf(&filtered, rx_rate, ObpfShape::Rectangular, 0.0)?;
    }
    let lo = rotate_by_phase_noise(&filtered, config.lo_linewidth_hz, -1.0, rng)?;
    let sampled = downsample(&lo, decim, 0)?;
    fir_filter(&sampled, matched)
}
