//! Tomlinson-Harashima precoding.
//!
//! The transmitter runs the feedback part `B(z) = 1 + sum b(k) z^-k` of a
//! decision-feedback equalizer through a 2-D modulo, the receiver runs the
//! feedforward part. Both tap sets come from a finite-length, unbiased MMSE-DFE
//! design against the symbol-spaced end-to-end channel.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qam::Constellation;
use crate::signal::{filter_samples, FirFilter, SampledSignal, C64};

/// Precoder and receiver filters plus the modulo cell they were built for.
#[derive(Debug, Clone, PartialEq)]
pub struct ThpFilters {
    /// b(1..=N_b); the implied lag-0 tap is 1.
    pub fbf_taps: Vec<C64>,
    /// Symbol-spaced feedforward taps, applied with center-tap delay
    /// compensation.
    pub ffe_taps: Vec<C64>,
    pub modulo_half_size: f64,
    pub metadata: ThpMetadata,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThpMetadata {
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub noise_variance: Option<f64>,
    #[serde(default)]
    pub mse: Option<f64>,
}

impl ThpFilters {
    pub fn new(fbf_taps: Vec<C64>, ffe_taps: Vec<C64>, modulo_half_size: f64) -> Result<Self> {
        if !(modulo_half_size > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "modulo half-size must be positive, got {modulo_half_size}"
            )));
        }
        if ffe_taps.is_empty() {
            return Err(Error::InvalidParameter("feedforward filter has no taps".into()));
        }
        Ok(Self {
            fbf_taps,
            ffe_taps,
            modulo_half_size,
            metadata: ThpMetadata::default(),
        })
    }

    /// No precoding: empty feedback, unit feedforward.
    pub fn identity(modulo_half_size: f64) -> Self {
        Self {
            fbf_taps: Vec::new(),
            ffe_taps: vec![C64::new(1.0, 0.0)],
            modulo_half_size,
            metadata: ThpMetadata::default(),
        }
    }

    /// Coefficients of the monic feedback polynomial, lag 0 first.
    pub fn feedback_polynomial(&self) -> Vec<C64> {
        let mut p = vec![C64::new(1.0, 0.0)];
        p.extend_from_slice(&self.fbf_taps);
        p
    }

    /// Roots of `z^N B(z)`; all must lie strictly inside the unit circle for a
    /// stable precoder.
    pub fn feedback_roots(&self) -> Vec<C64> {
        polynomial_roots(&self.feedback_polynomial())
    }

    pub fn is_minimum_phase(&self, margin: f64) -> bool {
        self.feedback_roots().iter().all(|r| r.norm() < 1.0 - margin)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ThpFiltersDoc::from(self)).expect("filters serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ThpFiltersDoc =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut f = Self::new(
            doc.fbf_taps.iter().map(|[re, im]| C64::new(*re, *im)).collect(),
            doc.ffe_taps.iter().map(|[re, im]| C64::new(*re, *im)).collect(),
            doc.modulo_half_size,
        )?;
        f.metadata = doc.metadata;
        Ok(f)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThpFiltersDoc {
    fbf_taps: Vec<[f64; 2]>,
    ffe_taps: Vec<[f64; 2]>,
    modulo_half_size: f64,
    #[serde(default)]
    metadata: ThpMetadata,
}

impl From<&ThpFilters> for ThpFiltersDoc {
    fn from(f: &ThpFilters) -> Self {
        Self {
            fbf_taps: f.fbf_taps.iter().map(|c| [c.re, c.im]).collect(),
            ffe_taps: f.ffe_taps.iter().map(|c| [c.re, c.im]).collect(),
            modulo_half_size: f.modulo_half_size,
            metadata: f.metadata.clone(),
        }
    }
}

fn wrap(v: f64, m: f64) -> f64 {
    let two_m = 2.0 * m;
    let mut out = v - two_m * ((v + m) / two_m).floor();
    // guard the half-open interval against rounding at the edges
    if out >= m {
        out -= two_m;
    } else if out < -m {
        out += two_m;
    }
    out
}

/// Wraps real and imaginary parts independently into `[-M, M)`.
pub fn modulo_2d(x: C64, m: f64) -> Result<C64> {
    if !(m > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "modulo half-size must be positive, got {m}"
        )));
    }
    Ok(C64::new(wrap(x.re, m), wrap(x.im, m)))
}

/// Output of the precoder: the transmitted sequence and the lattice
/// corrections the modulo applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Precoded {
    pub transmitted: Vec<C64>,
    /// e(n) in 2M(Z + jZ); the receiver sees `a(n) + e(n)`.
    pub corrections: Vec<C64>,
}

/// Runs the feedback precoder from a zero state.
pub fn precode(symbols: &[C64], filters: &ThpFilters) -> Precoded {
    let m = filters.modulo_half_size;
    let b = &filters.fbf_taps;
    let mut v: Vec<C64> = Vec::with_capacity(symbols.len());
    let mut corrections = Vec::with_capacity(symbols.len());
    for (n, &a) in symbols.iter().enumerate() {
        let mut fb = C64::new(0.0, 0.0);
        for (k, bk) in b.iter().enumerate() {
            if n > k {
                fb += bk * v[n - 1 - k];
            }
        }
        let pre = a - fb;
        let out = C64::new(wrap(pre.re, m), wrap(pre.im, m));
        corrections.push(out - pre);
        v.push(out);
    }
    Precoded {
        transmitted: v,
        corrections,
    }
}

/// Symbol-spaced feedforward filtering, delay-compensated about the center tap.
pub fn ffe_apply(signal: &SampledSignal, filters: &ThpFilters) -> SampledSignal {
    let f = FirFilter::new(filters.ffe_taps.clone());
    let pols = signal.pols().iter().map(|p| filter_samples(p, &f)).collect();
    SampledSignal::from_pols(pols, signal.sample_rate())
        .expect("shape preserved")
        .with_center_offset(signal.center_offset())
}

/// Derives the filters for a white-noise channel. `noise_variance` is relative
/// to unit symbol power.
pub fn derive_thp_filters(
    channel_ir: &[C64],
    n_fbf: usize,
    n_ffe: usize,
    noise_variance: f64,
    modulo_half_size: f64,
) -> Result<ThpFilters> {
    derive_thp_filters_colored(channel_ir, &[1.0], n_fbf, n_ffe, noise_variance, modulo_half_size)
}

/// Finite-length MMSE-DFE design with colored noise.
///
/// `channel_ir` is the symbol-spaced response; its largest tap is the cursor.
/// `noise_acf` holds the noise autocorrelation at lags 0, 1, ... (scaled by
/// `noise_variance`); a matched-filtered receiver passes the channel's own
/// autocorrelation here.
///
/// The result is unbiased: the feedforward output has a unit cursor and the
/// feedback taps equal its post-cursor response.
pub fn derive_thp_filters_colored(
    channel_ir: &[C64],
    noise_acf: &[f64],
    n_fbf: usize,
    n_ffe: usize,
    noise_variance: f64,
    modulo_half_size: f64,
) -> Result<ThpFilters> {
    if n_fbf < 1 || n_ffe < 1 {
        return Err(Error::InvalidParameter("filter lengths must be >= 1".into()));
    }
    if !(noise_variance >= 0.0) {
        return Err(Error::InvalidParameter("noise variance must be >= 0".into()));
    }
    let cursor = channel_ir
        .iter()
        .enumerate()
        .fold((0usize, 0.0f64), |best, (i, h)| {
            if h.norm() > best.1 {
                (i, h.norm())
            } else {
                best
            }
        });
    if cursor.1 == 0.0 {
        return Err(Error::ZeroChannel);
    }
    let cursor = cursor.0 as isize;
    let h = |l: isize| -> C64 {
        let i = l + cursor;
        if i >= 0 && (i as usize) < channel_ir.len() {
            channel_ir[i as usize]
        } else {
            C64::new(0.0, 0.0)
        }
    };
    let pre_len = cursor;
    let post_len = channel_ir.len() as isize - 1 - cursor;
    let c = ((n_ffe - 1) / 2) as isize;

    // Lags j of x[n - j] reachable through the FFE window.
    let j_min = -(c + post_len);
    let j_max = (n_ffe as isize - 1 - c) + pre_len;
    let j_max = j_max.max(n_fbf as isize);
    let n_lags = (j_max - j_min + 1) as usize;

    // y[n + c - k] = sum_j H[k, j] x[n - j]
    let hmat = DMatrix::from_fn(n_ffe, n_lags, |k, jj| {
        let j = jj as isize + j_min;
        h(j - k as isize + c)
    });
    let acf = |lag: usize| -> f64 { noise_acf.get(lag).copied().unwrap_or(0.0) };
    let cov = DMatrix::from_fn(n_ffe, n_ffe, |r, s| C64::new(acf(r.abs_diff(s)), 0.0));

    let ryy = &hmat * hmat.adjoint() + cov * C64::new(noise_variance, 0.0);
    let chol = Cholesky::new(ryy).ok_or_else(|| {
        Error::Factorization("received-signal covariance is not positive definite".into())
    })?;
    // Q = I - H^H R^-1 H: error covariance of the best linear estimate of X.
    let rinv_h = chol.solve(&hmat);
    let q = DMatrix::<C64>::identity(n_lags, n_lags) - hmat.adjoint() * &rinv_h;

    let idx0 = (0 - j_min) as usize;
    // Light diagonal loading keeps the noiseless, perfectly equalizable case
    // (Q = 0) well posed.
    let qs = q.view((idx0, idx0), (n_fbf + 1, n_fbf + 1)).into_owned()
        + DMatrix::<C64>::identity(n_fbf + 1, n_fbf + 1) * C64::new(1e-12, 0.0);
    let qs_chol = Cholesky::new(qs).ok_or_else(|| {
        Error::Factorization("target error covariance is not positive definite".into())
    })?;
    let mut e0 = DVector::<C64>::zeros(n_fbf + 1);
    e0[0] = C64::new(1.0, 0.0);
    let u = qs_chol.solve(&e0);
    let g_conj = &u / u[0];

    let mut g_full_conj = DVector::<C64>::zeros(n_lags);
    for i in 0..=n_fbf {
        g_full_conj[idx0 + i] = g_conj[i];
    }
    let mse = (g_full_conj.adjoint() * &q * &g_full_conj)[(0, 0)].re;
    // conj(w) = R^-1 H conj(g)
    let w_conj = &rinv_h * &g_full_conj;
    let w: Vec<C64> = w_conj.iter().map(|v| v.conj()).collect();

    // Combined response q[j] = sum_k w[k] H[k, j]; remove the MMSE bias.
    let combined: Vec<C64> = (0..n_lags)
        .map(|jj| (0..n_ffe).map(|k| w[k] * hmat[(k, jj)]).sum())
        .collect();
    let main = combined[idx0];
    if main.norm() < 1e-12 {
        return Err(Error::Factorization("feedforward cursor vanished".into()));
    }
    let ffe_taps: Vec<C64> = w.iter().map(|t| t / main).collect();
    let fbf_taps: Vec<C64> = (1..=n_fbf).map(|i| combined[idx0 + i] / main).collect();

    let mut filters = ThpFilters::new(fbf_taps, ffe_taps, modulo_half_size)?;
    filters.metadata = ThpMetadata {
        description: format!("unbiased MMSE-DFE, {n_fbf} feedback / {n_ffe} feedforward taps"),
        noise_variance: Some(noise_variance),
        mse: Some(mse),
    };
    Ok(filters)
}

/// Cascade of `channel_ir` (cursor at its largest tap) with the FFE, indexed
/// by lag relative to the cursor. Returns `(first_lag, response)`.
pub fn combined_response(channel_ir: &[C64], filters: &ThpFilters) -> (isize, Vec<C64>) {
    let cursor = channel_ir
        .iter()
        .enumerate()
        .fold((0usize, 0.0f64), |b, (i, h)| if h.norm() > b.1 { (i, h.norm()) } else { b })
        .0 as isize;
    let w = &filters.ffe_taps;
    let c = ((w.len() - 1) / 2) as isize;
    // full convolution, then shift so the cursor sits at lag 0
    let mut conv = vec![C64::new(0.0, 0.0); channel_ir.len() + w.len() - 1];
    for (i, hi) in channel_ir.iter().enumerate() {
        for (k, wk) in w.iter().enumerate() {
            conv[i + k] += hi * wk;
        }
    }
    (-(cursor + c), conv)
}

/// Transmit-power increase of precoding, in dB, for uniform random symbols.
pub fn precoding_loss_db<R: Rng + ?Sized>(
    filters: &ThpFilters,
    constellation: &Constellation,
    n_symbols: usize,
    rng: &mut R,
) -> Result<f64> {
    if n_symbols < 10_000 {
        return Err(Error::InvalidParameter(format!(
            "precoding loss needs at least 10^4 symbols, got {n_symbols}"
        )));
    }
    let pts = constellation.points();
    let symbols: Vec<C64> = (0..n_symbols).map(|_| pts[rng.random_range(0..pts.len())]).collect();
    let v = precode(&symbols, filters).transmitted;
    let pv = v.iter().map(|s| s.norm_sqr()).sum::<f64>() / n_symbols as f64;
    Ok(10.0 * (pv / constellation.mean_energy()).log10())
}

/// Roots of `p[0] z^n + p[1] z^(n-1) + ... + p[n]` via companion-matrix
/// eigenvalues.
pub fn polynomial_roots(p: &[C64]) -> Vec<C64> {
    let first = p.iter().position(|c| c.norm() > 0.0);
    let Some(first) = first else { return Vec::new() };
    let p = &p[first..];
    let n = p.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = p[0];
    let companion = DMatrix::from_fn(n, n, |r, c| {
        if r == 0 {
            -p[c + 1] / lead
        } else if r == c + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    companion
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .unwrap_or_default()
}
