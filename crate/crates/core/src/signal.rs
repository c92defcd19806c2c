//! Complex baseband containers and the generic DSP primitives the rest of the
//! chain is built from.
//!
//! Every filtering stage here is length-preserving: linear convolution with
//! zero padding, group delay removed, output cropped to the input length. That
//! keeps symbol indices valid from the transmitter all the way to the
//! equalizer.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// A sampled complex baseband waveform, single- or dual-polarization.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    pols: Vec<Vec<C64>>,
    sample_rate: f64,
    center_offset: f64,
}

impl SampledSignal {
    pub fn single(samples: Vec<C64>, sample_rate: f64) -> Result<Self> {
        Self::from_pols(vec![samples], sample_rate)
    }

    pub fn dual(x: Vec<C64>, y: Vec<C64>, sample_rate: f64) -> Result<Self> {
        Self::from_pols(vec![x, y], sample_rate)
    }

    pub fn from_pols(pols: Vec<Vec<C64>>, sample_rate: f64) -> Result<Self> {
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sample rate must be positive, got {sample_rate}"
            )));
        }
        match pols.len() {
            1 => {}
            2 => {
                if pols[0].len() != pols[1].len() {
                    return Err(Error::LengthMismatch {
                        expected: pols[0].len(),
                        actual: pols[1].len(),
                    });
                }
            }
            n => {
                return Err(Error::InvalidParameter(format!(
                    "a signal carries 1 or 2 polarizations, got {n}"
                )))
            }
        }
        Ok(Self {
            pols,
            sample_rate,
            center_offset: 0.0,
        })
    }

    /// All-zero signal with the same shape as `self`.
    pub fn zeros_like(&self) -> Self {
        Self {
            pols: self.pols.iter().map(|p| vec![C64::new(0.0, 0.0); p.len()]).collect(),
            sample_rate: self.sample_rate,
            center_offset: self.center_offset,
        }
    }

    pub fn with_center_offset(mut self, offset: f64) -> Self {
        self.center_offset = offset;
        self
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn center_offset(&self) -> f64 {
        self.center_offset
    }

    pub fn n_pols(&self) -> usize {
        self.pols.len()
    }

    pub fn is_dual(&self) -> bool {
        self.pols.len() == 2
    }

    pub fn len(&self) -> usize {
        self.pols[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.pols[0].is_empty()
    }

    pub fn pol(&self, p: usize) -> &[C64] {
        &self.pols[p]
    }

    pub fn pol_mut(&mut self, p: usize) -> &mut Vec<C64> {
        &mut self.pols[p]
    }

    pub fn pols(&self) -> &[Vec<C64>] {
        &self.pols
    }

    pub fn pols_mut(&mut self) -> &mut [Vec<C64>] {
        &mut self.pols
    }

    pub fn into_pols(self) -> Vec<Vec<C64>> {
        self.pols
    }

    pub(crate) fn map_pols<F>(&self, sample_rate: f64, mut f: F) -> Self
    where
        F: FnMut(&[C64]) -> Vec<C64>,
    {
        Self {
            pols: self.pols.iter().map(|p| f(p)).collect(),
            sample_rate,
            center_offset: self.center_offset,
        }
    }

    /// Adds `other` sample by sample. Both must have the same shape and rate.
    pub fn accumulate(&mut self, other: &SampledSignal) -> Result<()> {
        if other.sample_rate != self.sample_rate {
            return Err(Error::RateMismatch(self.sample_rate, other.sample_rate));
        }
        if other.n_pols() != self.n_pols() {
            return Err(Error::NotDualPol);
        }
        if other.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        for (dst, src) in self.pols.iter_mut().zip(&other.pols) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += s;
            }
        }
        Ok(())
    }
}

/// FIR filter with an explicit group delay (in samples).
#[derive(Debug, Clone, PartialEq)]
pub struct FirFilter {
    pub taps: Vec<C64>,
    pub group_delay_samples: usize,
}

impl FirFilter {
    /// Linear-phase style filter: group delay is the center tap.
    pub fn new(taps: Vec<C64>) -> Self {
        let group_delay_samples = taps.len().saturating_sub(1) / 2;
        Self {
            taps,
            group_delay_samples,
        }
    }

    pub fn from_real(taps: &[f64]) -> Self {
        Self::new(taps.iter().map(|&t| C64::new(t, 0.0)).collect())
    }

    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|t| t.norm_sqr()).sum()
    }
}

/// Root-raised-cosine impulse response, unit energy, centered.
///
/// `shaping_rate` is the pulse design rate (its two-sided 3 dB bandwidth), which
/// is deliberately decoupled from the symbol rate so the same routine produces
/// both Nyquist and faster-than-Nyquist pulses.
pub fn design_rrc(
    num_taps: usize,
    rolloff: f64,
    shaping_rate: f64,
    sample_rate: f64,
) -> Result<FirFilter> {
    if num_taps == 0 || num_taps.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "RRC tap count must be odd, got {num_taps}"
        )));
    }
    if !(0.0..=1.0).contains(&rolloff) {
        return Err(Error::InvalidParameter(format!(
            "rolloff must lie in [0, 1], got {rolloff}"
        )));
    }
    if !(shaping_rate > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "shaping rate must be positive, got {shaping_rate}"
        )));
    }
    if sample_rate < shaping_rate * (1.0 + rolloff) {
        return Err(Error::InvalidParameter(format!(
            "sample rate {sample_rate} Hz below (1 + rolloff) x shaping rate"
        )));
    }

    let center = (num_taps - 1) / 2;
    let beta = rolloff;
    let samples_per_period = sample_rate / shaping_rate;
    let mut taps: Vec<f64> = (0..num_taps)
        .map(|i| {
            let x = (i as f64 - center as f64) / samples_per_period;
            rrc_value(x, beta)
        })
        .collect();
    let energy: f64 = taps.iter().map(|t| t * t).sum();
    let norm = energy.sqrt();
    taps.iter_mut().for_each(|t| *t /= norm);
    // Enforce exact symmetry against rounding in the x computation.
    for i in 0..center {
        let avg = 0.5 * (taps[i] + taps[num_taps - 1 - i]);
        taps[i] = avg;
        taps[num_taps - 1 - i] = avg;
    }
    Ok(FirFilter::from_real(&taps))
}

/// RRC at normalized time `x = t / T` (unnormalized amplitude).
fn rrc_value(x: f64, beta: f64) -> f64 {
    const EPS: f64 = 1e-9;
    if x.abs() < EPS {
        return 1.0 - beta + 4.0 * beta / PI;
    }
    if beta > 0.0 && ((4.0 * beta * x).abs() - 1.0).abs() < EPS {
        let a = PI / (4.0 * beta);
        return beta / 2f64.sqrt() * ((1.0 + 2.0 / PI) * a.sin() + (1.0 - 2.0 / PI) * a.cos());
    }
    let num = (PI * x * (1.0 - beta)).sin() + 4.0 * beta * x * (PI * x * (1.0 + beta)).cos();
    let den = PI * x * (1.0 - (4.0 * beta * x).powi(2));
    num / den
}

/// Length-preserving, delay-compensated convolution of one sample stream.
pub fn filter_samples(input: &[C64], filter: &FirFilter) -> Vec<C64> {
    let n = input.len();
    let taps = &filter.taps;
    let delay = filter.group_delay_samples as isize;
    let mut out = vec![C64::new(0.0, 0.0); n];
    // Real-valued taps are by far the common case; skip the complex multiply.
    let all_real = taps.iter().all(|t| t.im == 0.0);
    for (i, o) in out.iter_mut().enumerate() {
        // out[i] = sum_k taps[k] * input[i + delay - k]
        let base = i as isize + delay;
        let k_lo = (base - n as isize + 1).max(0) as usize;
        let k_hi = ((base + 1).min(taps.len() as isize)).max(0) as usize;
        let mut acc = C64::new(0.0, 0.0);
        if all_real {
            for k in k_lo..k_hi {
                acc += input[(base - k as isize) as usize] * taps[k].re;
            }
        } else {
            for k in k_lo..k_hi {
                acc += input[(base - k as isize) as usize] * taps[k];
            }
        }
        *o = acc;
    }
    out
}

/// Applies `filter` to every polarization of `signal`.
pub fn fir_filter(signal: &SampledSignal, filter: &FirFilter) -> Result<SampledSignal> {
    if signal.is_empty() {
        return Err(Error::EmptySignal);
    }
    Ok(signal.map_pols(signal.sample_rate, |p| filter_samples(p, filter)))
}

/// Zero-stuffing upsampler.
pub fn upsample(signal: &SampledSignal, factor: usize) -> Result<SampledSignal> {
    if factor < 1 {
        return Err(Error::InvalidParameter("upsampling factor must be >= 1".into()));
    }
    Ok(signal.map_pols(signal.sample_rate * factor as f64, |p| {
        let mut out = vec![C64::new(0.0, 0.0); p.len() * factor];
        for (i, &s) in p.iter().enumerate() {
            out[i * factor] = s;
        }
        out
    }))
}

/// Keeps samples at indices congruent to `phase` modulo `factor`.
pub fn downsample(signal: &SampledSignal, factor: usize, phase: usize) -> Result<SampledSignal> {
    if factor < 1 {
        return Err(Error::InvalidParameter("downsampling factor must be >= 1".into()));
    }
    if phase >= factor {
        return Err(Error::InvalidParameter(format!(
            "phase {phase} out of range for factor {factor}"
        )));
    }
    Ok(signal.map_pols(signal.sample_rate / factor as f64, |p| {
        p.iter().skip(phase).step_by(factor).copied().collect()
    }))
}

/// Multiplies by a complex tone, moving the signal `delta_f` Hz up in frequency.
pub fn frequency_shift(signal: &SampledSignal, delta_f: f64) -> Result<SampledSignal> {
    let fs = signal.sample_rate;
    let new_center = signal.center_offset + delta_f;
    if new_center.abs() >= fs / 2.0 {
        return Err(Error::Aliasing {
            shift_hz: delta_f,
            sample_rate: fs,
        });
    }
    if delta_f == 0.0 {
        return Ok(signal.clone());
    }
    let w = 2.0 * PI * delta_f / fs;
    let tone: Vec<C64> = (0..signal.len())
        .map(|n| C64::from_polar(1.0, w * n as f64))
        .collect();
    let mut out = signal.map_pols(fs, |p| p.iter().zip(&tone).map(|(s, t)| s * t).collect());
    out.center_offset = new_center;
    Ok(out)
}

/// Adds circular complex Gaussian noise of the given variance per sample and
/// polarization.
pub fn add_awgn<R: Rng + ?Sized>(
    signal: &SampledSignal,
    noise_power_per_pol: f64,
    rng: &mut R,
) -> Result<SampledSignal> {
    if !(noise_power_per_pol >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "noise power must be non-negative, got {noise_power_per_pol}"
        )));
    }
    let mut out = signal.clone();
    add_awgn_in_place(&mut out, noise_power_per_pol, rng);
    Ok(out)
}

pub(crate) fn add_awgn_in_place<R: Rng + ?Sized>(
    signal: &mut SampledSignal,
    noise_power_per_pol: f64,
    rng: &mut R,
) {
    if noise_power_per_pol == 0.0 {
        return;
    }
    let sigma = (noise_power_per_pol / 2.0).sqrt();
    for p in signal.pols.iter_mut() {
        for s in p.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *s += C64::new(re * sigma, im * sigma);
        }
    }
}

/// Mean of |sample|^2, one value per polarization.
pub fn mean_power(signal: &SampledSignal) -> Result<Vec<f64>> {
    if signal.is_empty() {
        return Err(Error::EmptySignal);
    }
    Ok(signal.pols.iter().map(|p| power_of(p)).collect())
}

pub(crate) fn power_of(samples: &[C64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / samples.len() as f64
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn fft_forward(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

pub(crate) fn fft_inverse(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

/// In-place forward FFT, unnormalized.
pub(crate) fn fft_in_place(buf: &mut [C64]) {
    fft_forward(buf.len()).process(buf);
}

/// In-place inverse FFT, normalized by 1/N.
pub(crate) fn ifft_in_place(buf: &mut [C64]) {
    let n = buf.len();
    fft_inverse(n).process(buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|s| *s *= scale);
}

/// Frequency in Hz of FFT bin `k` for a transform of length `n`.
pub(crate) fn bin_frequency(k: usize, n: usize, sample_rate: f64) -> f64 {
    let k = k as f64;
    let n_f = n as f64;
    let signed = if k < n_f / 2.0 { k } else { k - n_f };
    signed * sample_rate / n_f
}

/// Band-limited (ideal DAC) interpolation by an integer factor via spectral
/// zero padding. Treats the input as one period of a periodic sequence, so
/// callers should leave quiet guard intervals at both ends.
pub fn interpolate(signal: &SampledSignal, factor: usize) -> Result<SampledSignal> {
    if factor < 1 {
        return Err(Error::InvalidParameter("interpolation factor must be >= 1".into()));
    }
    if signal.is_empty() {
        return Err(Error::EmptySignal);
    }
    if factor == 1 {
        return Ok(signal.clone());
    }
    let n = signal.len();
    let big = n * factor;
    Ok(signal.map_pols(signal.sample_rate * factor as f64, |p| {
        let mut spec = p.to_vec();
        fft_in_place(&mut spec);
        let mut padded = vec![C64::new(0.0, 0.0); big];
        let half = n / 2;
        if n.is_multiple_of(2) {
            padded[..half].copy_from_slice(&spec[..half]);
            padded[big - half + 1..].copy_from_slice(&spec[half + 1..]);
            // split the Nyquist bin between both edges
            padded[half] = spec[half] * 0.5;
            padded[big - half] = spec[half] * 0.5;
        } else {
            padded[..=half].copy_from_slice(&spec[..=half]);
            padded[big - half..].copy_from_slice(&spec[half + 1..]);
        }
        ifft_in_place(&mut padded);
        let gain = factor as f64;
        padded.iter_mut().for_each(|s| *s *= gain);
        padded
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_signal(n: usize, seed: u64) -> SampledSignal {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = SampledSignal::single(vec![c(0.0, 0.0); n], 1.0).unwrap();
        add_awgn(&z, 1.0, &mut rng).unwrap()
    }

    #[test]
    fn rrc_rejects_bad_parameters() {
        assert!(design_rrc(72, 0.1, 1.0, 2.0).is_err());
        assert!(design_rrc(73, 1.5, 1.0, 2.0).is_err());
        assert!(design_rrc(73, -0.1, 1.0, 2.0).is_err());
        assert!(design_rrc(73, 0.1, 1.0, 1.05).is_err());
        assert!(design_rrc(73, 0.1, 28.5e9, 64e9).is_ok());
    }

    #[test]
    fn rrc_is_symmetric_and_unit_energy() {
        for &(om, fs) in &[(28.5e9, 64e9), (32e9, 64e9), (1.0, 2.0), (1.0, 4.0)] {
            let f = design_rrc(73, 0.1, om, fs).unwrap();
            assert!((f.energy() - 1.0).abs() < 1e-12);
            for i in 0..36 {
                assert_eq!(f.taps[i], f.taps[72 - i]);
            }
            assert_eq!(f.group_delay_samples, 36);
        }
    }

    #[test]
    fn rrc_zero_rolloff_is_truncated_sinc() {
        let f = design_rrc(41, 0.0, 1.0, 3.0).unwrap();
        let raw: Vec<f64> = (0..41)
            .map(|i| {
                let x = (i as f64 - 20.0) / 3.0;
                if x == 0.0 {
                    1.0
                } else {
                    (PI * x).sin() / (PI * x)
                }
            })
            .collect();
        let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        for (t, r) in f.taps.iter().zip(&raw) {
            assert!((t.re - r / norm).abs() < 1e-12);
        }
    }

    #[test]
    fn rrc_singular_points_are_continuous() {
        // rolloff 0.25 puts the removable singularity at x = +-1 exactly.
        let beta = 0.25;
        let at = rrc_value(1.0, beta);
        let near = rrc_value(1.0 + 1e-6, beta);
        assert!((at - near).abs() < 1e-5);
        let at0 = rrc_value(0.0, beta);
        let near0 = rrc_value(1e-7, beta);
        assert!((at0 - near0).abs() < 1e-6);
    }

    #[test]
    fn rrc_three_db_point_at_half_shaping_rate() {
        // Frequency response of the (long) filter at f = shaping_rate / 2.
        let f = design_rrc(401, 0.1, 1.0, 4.0).unwrap();
        let resp = |freq: f64| -> f64 {
            f.taps
                .iter()
                .enumerate()
                .map(|(n, t)| t * C64::from_polar(1.0, -2.0 * PI * freq * n as f64 / 4.0))
                .sum::<C64>()
                .norm()
        };
        let ratio = resp(0.5) / resp(0.0);
        assert!((ratio - 0.5f64.sqrt()).abs() < 0.02, "ratio {ratio}");
    }

    #[test]
    fn identity_filter_is_identity() {
        let s = random_signal(100, 1);
        let out = fir_filter(&s, &FirFilter::from_real(&[1.0])).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn impulse_response_is_the_taps() {
        let f = design_rrc(73, 0.1, 28.5e9, 64e9).unwrap();
        let mut x = vec![c(0.0, 0.0); 201];
        x[100] = c(1.0, 0.0);
        let s = SampledSignal::single(x, 64e9).unwrap();
        let out = fir_filter(&s, &f).unwrap();
        for k in 0..73 {
            assert!((out.pol(0)[100 - 36 + k] - f.taps[k]).norm() < 1e-15);
        }
        assert_eq!(out.pol(0)[50], c(0.0, 0.0));
    }

    #[test]
    fn white_noise_power_preserved_by_unit_energy_filter() {
        let s = random_signal(200_000, 7);
        let f = design_rrc(73, 0.1, 28.5e9, 64e9).unwrap();
        let out = fir_filter(&s, &f).unwrap();
        let pin = mean_power(&s).unwrap()[0];
        let pout = mean_power(&out).unwrap()[0];
        assert!((pout / pin - 1.0).abs() < 0.01, "{pin} {pout}");
    }

    #[test]
    fn filter_is_linear() {
        let x = random_signal(300, 2);
        let y = random_signal(300, 3);
        let f = design_rrc(73, 0.1, 28.5e9, 64e9).unwrap();
        let a = c(0.3, -1.2);
        let b = c(2.0, 0.5);
        let mix: Vec<C64> = x.pol(0).iter().zip(y.pol(0)).map(|(u, v)| a * u + b * v).collect();
        let lhs = fir_filter(&SampledSignal::single(mix, 1.0).unwrap(), &f).unwrap();
        let fx = fir_filter(&x, &f).unwrap();
        let fy = fir_filter(&y, &f).unwrap();
        for i in 0..300 {
            let rhs = a * fx.pol(0)[i] + b * fy.pol(0)[i];
            assert!((lhs.pol(0)[i] - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn empty_signal_rejected() {
        let s = SampledSignal::single(vec![], 1.0).unwrap();
        assert_eq!(fir_filter(&s, &FirFilter::from_real(&[1.0])), Err(Error::EmptySignal));
        assert_eq!(mean_power(&s), Err(Error::EmptySignal));
    }

    #[test]
    fn up_and_down_sampling() {
        let a = c(1.0, 2.0);
        let b = c(-3.0, 0.5);
        let s = SampledSignal::single(vec![a, b], 10.0).unwrap();
        let up = upsample(&s, 2).unwrap();
        assert_eq!(up.pol(0), &[a, c(0.0, 0.0), b, c(0.0, 0.0)]);
        assert_eq!(up.sample_rate(), 20.0);
        assert_eq!(downsample(&up, 2, 0).unwrap(), s);

        let d = c(4.0, 4.0);
        let s4 = SampledSignal::single(vec![a, b, c(0.0, 1.0), d], 10.0).unwrap();
        let ds = downsample(&s4, 2, 1).unwrap();
        assert_eq!(ds.pol(0), &[b, d]);
        assert_eq!(ds.sample_rate(), 5.0);

        assert!(upsample(&s, 0).is_err());
        assert!(downsample(&s, 2, 2).is_err());
        assert!(downsample(&s, 0, 0).is_err());
    }

    #[test]
    fn frequency_shift_cases() {
        let ones = SampledSignal::single(vec![c(1.0, 0.0); 8], 4.0).unwrap();
        assert_eq!(frequency_shift(&ones, 0.0).unwrap(), ones);

        let q = frequency_shift(&ones, 1.0).unwrap();
        let expected = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for (i, s) in q.pol(0).iter().enumerate() {
            assert!((s - expected[i % 4]).norm() < 1e-12);
        }
        assert_eq!(q.center_offset(), 1.0);

        let s = random_signal(50_000, 5);
        let s = SampledSignal::single(s.pol(0).to_vec(), 256e9).unwrap();
        let back = frequency_shift(&frequency_shift(&s, 30e9).unwrap(), -30e9).unwrap();
        for (u, v) in back.pol(0).iter().zip(s.pol(0)) {
            assert!((u - v).norm() < 1e-12);
        }
        assert_eq!(back.center_offset(), 0.0);

        let shifted = frequency_shift(&s, 60e9).unwrap();
        let p0 = mean_power(&s).unwrap()[0];
        let p1 = mean_power(&shifted).unwrap()[0];
        assert!((p0 - p1).abs() < 1e-12 * p0);

        assert!(matches!(frequency_shift(&s, 130e9), Err(Error::Aliasing { .. })));
    }

    #[test]
    fn awgn_cases() {
        let zero = SampledSignal::dual(vec![c(0.0, 0.0); 500_000], vec![c(0.0, 0.0); 500_000], 1.0)
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        assert_eq!(add_awgn(&zero, 0.0, &mut rng).unwrap(), zero);

        let noisy = add_awgn(&zero, 1.0, &mut rng).unwrap();
        for p in mean_power(&noisy).unwrap() {
            assert!((p - 1.0).abs() < 0.02, "{p}");
        }
        // real and imaginary parts share the variance
        let re: f64 = noisy.pol(0).iter().map(|s| s.re * s.re).sum::<f64>() / 500_000.0;
        assert!((re - 0.5).abs() < 0.01);

        let a = add_awgn(&zero, 1.0, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = add_awgn(&zero, 1.0, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a, b);

        assert!(add_awgn(&zero, -1.0, &mut rng).is_err());
    }

    #[test]
    fn mean_power_cases() {
        let ones = SampledSignal::single(vec![c(1.0, 0.0); 10], 1.0).unwrap();
        assert_eq!(mean_power(&ones).unwrap(), vec![1.0]);
        let alt: Vec<C64> = (0..10).map(|i| c(if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).collect();
        assert_eq!(mean_power(&SampledSignal::single(alt, 1.0).unwrap()).unwrap(), vec![1.0]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let qpsk = vec![c(s, s), c(-s, s), c(-s, -s), c(s, -s)];
        let p = mean_power(&SampledSignal::single(qpsk, 1.0).unwrap()).unwrap()[0];
        assert!((p - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dual_pol_lengths_must_match() {
        assert!(SampledSignal::dual(vec![c(0.0, 0.0); 3], vec![c(0.0, 0.0); 4], 1.0).is_err());
        assert!(SampledSignal::single(vec![c(0.0, 0.0); 3], 0.0).is_err());
    }

    #[test]
    fn interpolation_preserves_original_samples_of_bandlimited_input() {
        // Low-pass content with quiet edges.
        let n = 256;
        let x: Vec<C64> = (0..n)
            .map(|i| {
                let t = i as f64;
                let env = (PI * t / n as f64).sin().powi(8);
                C64::from_polar(env, 2.0 * PI * 0.05 * t) + env * 0.3
            })
            .collect();
        let s = SampledSignal::single(x.clone(), 2.0).unwrap();
        let up = interpolate(&s, 4).unwrap();
        assert_eq!(up.len(), 4 * n);
        assert_eq!(up.sample_rate(), 8.0);
        for i in 0..n {
            assert!((up.pol(0)[4 * i] - x[i]).norm() < 1e-12);
        }
    }
}
