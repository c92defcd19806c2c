//! 2x2 butterfly equalizer with normalized-LMS carrier-phase tracking and
//! training (TS-LMS / MTS-LMS) or decision-directed tap adaptation.
//!
//! Windows are newest-first: for output symbol `n` the window holds
//! `r[n + c], r[n + c - 1], ..., r[n + c - (L - 1)]` with `c = L / 2`, so the
//! center tap sees `r[n]`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framing::Frame;
use crate::qam::{CandidateMode, Constellation};
use crate::signal::C64;

pub const DEFAULT_TAPS: usize = 11;

/// Smallest phase-accumulator magnitude kept before renormalizing.
const PHI_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    TsLms,
    MtsLms,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqMode {
    Training,
    DecisionDirected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TapInit {
    CenterSpike,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EqConfig {
    pub n_taps: usize,
    /// Tap step as seen by a unit-energy constellation: the applied step is
    /// `mu_taps / E_s`, or `mu_taps / (window energy)` with `normalized_taps`.
    pub mu_taps: f64,
    pub mu_phase: f64,
    pub algorithm: Algorithm,
    pub candidate_mode: CandidateMode,
    /// Decide over the modulo-extended lattice in DD mode (THP links).
    pub extended_lattice: bool,
    /// Mean |error|^2 over the final 20% of the frame, in units of the
    /// squared point spacing.
    pub convergence_threshold: f64,
    pub tap_init: TapInit,
    /// Divide the tap step by the current window energy (normalized LMS)
    /// instead of the mean symbol energy.
    pub normalized_taps: bool,
}

impl Default for EqConfig {
    fn default() -> Self {
        Self {
            n_taps: DEFAULT_TAPS,
            mu_taps: 3e-3,
            mu_phase: 0.03,
            algorithm: Algorithm::MtsLms,
            candidate_mode: CandidateMode::Inward,
            extended_lattice: true,
            convergence_threshold: 0.5,
            tap_init: TapInit::CenterSpike,
            normalized_taps: false,
        }
    }
}

impl EqConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_taps == 0 || self.n_taps.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "equalizer length must be odd, got {}",
                self.n_taps
            )));
        }
        if !(self.mu_taps >= 0.0) || !(self.mu_phase >= 0.0) || self.mu_phase > 1.0 {
            return Err(Error::InvalidParameter(
                "step sizes must satisfy mu_taps >= 0 and 0 <= mu_phase <= 1".into(),
            ));
        }
        Ok(())
    }
}

/// What the adaptation is referenced to at one symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference {
    /// Scheduled training points (unprecoded originals) per polarization.
    Training([C64; 2]),
    DecisionDirected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    /// Phase-corrected equalizer outputs.
    pub outputs: [C64; 2],
    /// References used, in the phase-corrected frame.
    pub decisions: [C64; 2],
    /// Squared tap errors.
    pub errors: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ButterflyEqualizer {
    /// `taps[p][q]` maps input polarization `q` to output `p`.
    taps: [[Vec<C64>; 2]; 2],
    phi: [C64; 2],
    config: EqConfig,
}

impl ButterflyEqualizer {
    pub fn new(config: EqConfig) -> Result<Self> {
        config.validate()?;
        let n = config.n_taps;
        let mut taps = [
            [vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n]],
            [vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n]],
        ];
        if config.tap_init == TapInit::CenterSpike {
            taps[0][0][n / 2] = C64::new(1.0, 0.0);
            taps[1][1][n / 2] = C64::new(1.0, 0.0);
        }
        Ok(Self {
            taps,
            phi: [C64::new(1.0, 0.0); 2],
            config,
        })
    }

    pub fn config(&self) -> &EqConfig {
        &self.config
    }

    pub fn taps(&self) -> &[[Vec<C64>; 2]; 2] {
        &self.taps
    }

    pub fn set_taps(&mut self, p: usize, q: usize, taps: Vec<C64>) -> Result<()> {
        if taps.len() != self.config.n_taps {
            return Err(Error::LengthMismatch {
                expected: self.config.n_taps,
                actual: taps.len(),
            });
        }
        self.taps[p][q] = taps;
        Ok(())
    }

    pub fn phase(&self) -> [C64; 2] {
        self.phi
    }

    pub fn set_phase(&mut self, phi: [C64; 2]) -> Result<()> {
        if phi.iter().any(|p| !(p.norm() > 0.0)) {
            return Err(Error::InvalidParameter("phase estimate must be nonzero".into()));
        }
        self.phi = phi;
        Ok(())
    }

    /// Raw butterfly outputs `E'` for one pair of windows.
    pub fn equalize_symbol(&self, wx: &[C64], wy: &[C64]) -> Result<[C64; 2]> {
        let n = self.config.n_taps;
        for w in [wx, wy] {
            if w.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: w.len(),
                });
            }
        }
        Ok([self.output(0, wx, wy), self.output(1, wx, wy)])
    }

    fn output(&self, p: usize, wx: &[C64], wy: &[C64]) -> C64 {
        let dot = |h: &[C64], r: &[C64]| h.iter().zip(r).map(|(a, b)| a * b).sum::<C64>();
        dot(&self.taps[p][0], wx) + dot(&self.taps[p][1], wy)
    }

    /// One adaptation step. Returns phase-corrected outputs and references.
    pub fn update_step(
        &mut self,
        wx: &[C64],
        wy: &[C64],
        reference: Reference,
        constellation: &Constellation,
    ) -> Result<Step> {
        let raw = self.equalize_symbol(wx, wy)?;
        let step_scale = if self.config.normalized_taps {
            let energy: f64 = wx.iter().chain(wy).map(|r| r.norm_sqr()).sum();
            1.0 / (energy + 1e-12)
        } else {
            1.0 / constellation.mean_energy()
        };
        let mut step = Step {
            outputs: [C64::new(0.0, 0.0); 2],
            decisions: [C64::new(0.0, 0.0); 2],
            errors: [0.0; 2],
        };
        for p in 0..2 {
            let e = raw[p];
            let phi = self.phi[p];
            let unit = phi / phi.norm();
            let corrected = e * unit.conj();
            let d = match reference {
                Reference::Training(orig) => match self.config.algorithm {
                    Algorithm::TsLms => orig[p],
                    Algorithm::MtsLms => {
                        let cands = constellation.expanded_candidates(orig[p], self.config.candidate_mode)?;
                        cands[mts_select(&cands, phi, e)?]
                    }
                },
                Reference::DecisionDirected => {
                    if self.config.extended_lattice {
                        constellation.extended_decision(corrected).point
                    } else {
                        constellation.points()[constellation.nearest_index(corrected)]
                    }
                }
            };
            let d2 = d.norm_sqr();
            if d2 == 0.0 {
                return Err(Error::InvalidParameter("zero reference symbol".into()));
            }
            let mu_phi = self.config.mu_phase;
            let mut next = phi + (e * d.conj() / d2 - phi) * mu_phi;
            if !(next.norm() > PHI_FLOOR) {
                next = unit * PHI_FLOOR;
            }
            self.phi[p] = next;
            let eps = d * (next / next.norm()) - e;
            let mu = self.config.mu_taps * step_scale;
            if mu != 0.0 {
                let g = eps * mu;
                for (q, w) in [wx, wy].into_iter().enumerate() {
                    for (h, r) in self.taps[p][q].iter_mut().zip(w) {
                        *h += g * r.conj();
                    }
                }
            }
            step.outputs[p] = corrected;
            step.decisions[p] = d;
            step.errors[p] = eps.norm_sqr();
        }
        Ok(step)
    }
}

/// Index of the candidate closest to `e` once rotated into the received
/// frame by the unit phasor of `phi`. The first candidate (the original
/// point) wins ties, then list order.
pub fn mts_select(candidates: &[C64], phi: C64, e: C64) -> Result<usize> {
    if !(phi.norm() > 0.0) {
        return Err(Error::InvalidParameter("phase estimate is zero".into()));
    }
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("empty candidate list".into()));
    }
    let unit = phi / phi.norm();
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, s) in candidates.iter().enumerate() {
        let d = (s * unit - e).norm_sqr();
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EqOutput {
    /// Phase-corrected equalizer outputs per polarization.
    pub symbols: [Vec<C64>; 2],
    pub decisions: [Vec<C64>; 2],
    pub converged: bool,
    /// Squared tap error per symbol and polarization.
    pub mse_trace: [Vec<f64>; 2],
    /// Mean squared error over the final 20% of the frame.
    pub final_mse: f64,
}

impl EqOutput {
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("index,err2_x,err2_y\n");
        for (i, (a, b)) in self.mse_trace[0].iter().zip(&self.mse_trace[1]).enumerate() {
            let _ = writeln!(out, "{i},{a:e},{b:e}");
        }
        out
    }
}

impl ButterflyEqualizer {
    pub fn taps_csv(&self) -> String {
        let mut out = String::from("tap,hxx_re,hxx_im,hxy_re,hxy_im,hyx_re,hyx_im,hyy_re,hyy_im\n");
        for k in 0..self.config.n_taps {
            let _ = write!(out, "{k}");
            for p in 0..2 {
                for q in 0..2 {
                    let t = self.taps[p][q][k];
                    let _ = write!(out, ",{:e},{:e}", t.re, t.im);
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Runs the equalizer over a symbol-spaced, frame-aligned dual-polarization
/// stream: training mode on the preamble and pilots, decision-directed on the
/// payload.
pub fn run_equalizer(
    eq: &mut ButterflyEqualizer,
    received: [&[C64]; 2],
    frame: &Frame,
    constellation: &Constellation,
) -> Result<EqOutput> {
    let n = frame.len();
    for r in received {
        if r.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: r.len(),
            });
        }
    }
    let l = eq.config.n_taps;
    let c = l / 2;
    let zero = C64::new(0.0, 0.0);
    // zero-padded copies so every window is a plain slice
    let pad = |r: &[C64]| -> Vec<C64> {
        let mut v = vec![zero; n + 2 * c];
        v[c..c + n].copy_from_slice(r);
        v
    };
    let px = pad(received[0]);
    let py = pad(received[1]);
    let mut wx = vec![zero; l];
    let mut wy = vec![zero; l];

    let mut out = EqOutput {
        symbols: [Vec::with_capacity(n), Vec::with_capacity(n)],
        decisions: [Vec::with_capacity(n), Vec::with_capacity(n)],
        converged: false,
        mse_trace: [Vec::with_capacity(n), Vec::with_capacity(n)],
        final_mse: f64::NAN,
    };
    for i in 0..n {
        // padded index of r[i + c] is i + 2c; newest first
        for k in 0..l {
            wx[k] = px[i + 2 * c - k];
            wy[k] = py[i + 2 * c - k];
        }
        let reference = if frame.ts_mask[i] {
            Reference::Training([frame.symbols[0][i], frame.symbols[1][i]])
        } else {
            Reference::DecisionDirected
        };
        let step = eq.update_step(&wx, &wy, reference, constellation)?;
        for p in 0..2 {
            out.symbols[p].push(step.outputs[p]);
            out.decisions[p].push(step.decisions[p]);
            out.mse_trace[p].push(step.errors[p]);
        }
    }
    let tail = (n / 5).max(1).min(n);
    let final_mse = if n == 0 {
        f64::NAN
    } else {
        (0..2)
            .map(|p| out.mse_trace[p][n - tail..].iter().sum::<f64>())
            .sum::<f64>()
            / (2 * tail) as f64
    };
    let d2 = constellation.spacing().powi(2);
    out.final_mse = final_mse;
    out.converged = final_mse.is_finite() && final_mse < eq.config.convergence_threshold * d2;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framing::{build_frame, random_bits, FrameSchedule};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn window(rng: &mut ChaCha8Rng) -> Vec<C64> {
        (0..11).map(|_| c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0))).collect()
    }

    #[test]
    fn center_and_swap_spikes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut eq = ButterflyEqualizer::new(EqConfig::default()).unwrap();
        let wx = window(&mut rng);
        let wy = window(&mut rng);
        assert_eq!(eq.equalize_symbol(&wx, &wy).unwrap(), [wx[5], wy[5]]);
        let mut spike = vec![c(0.0, 0.0); 11];
        spike[5] = c(1.0, 0.0);
        let zeros = vec![c(0.0, 0.0); 11];
        eq.set_taps(0, 0, zeros.clone()).unwrap();
        eq.set_taps(1, 1, zeros).unwrap();
        eq.set_taps(0, 1, spike.clone()).unwrap();
        eq.set_taps(1, 0, spike).unwrap();
        assert_eq!(eq.equalize_symbol(&wx, &wy).unwrap(), [wy[5], wx[5]]);
        assert!(eq.equalize_symbol(&wx[1..], &wy).is_err());
    }

    #[test]
    fn butterfly_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut eq = ButterflyEqualizer::new(EqConfig::default()).unwrap();
        for p in 0..2 {
            for q in 0..2 {
                eq.set_taps(p, q, window(&mut rng)).unwrap();
            }
        }
        let (a, b, x, y) = (window(&mut rng), window(&mut rng), window(&mut rng), window(&mut rng));
        let k = c(0.3, -1.7);
        let mix = |u: &[C64], v: &[C64]| -> Vec<C64> { u.iter().zip(v).map(|(s, t)| s * k + t).collect() };
        let lhs = eq.equalize_symbol(&mix(&a, &x), &mix(&b, &y)).unwrap();
        let ea = eq.equalize_symbol(&a, &b).unwrap();
        let ex = eq.equalize_symbol(&x, &y).unwrap();
        for p in 0..2 {
            assert!((lhs[p] - (ea[p] * k + ex[p])).norm() < 1e-12);
        }
    }

    #[test]
    fn mts_select_exact_matches() {
        let cons = Constellation::new(16, 1.0, 0.3).unwrap();
        let o = c(1.0, 1.0);
        let cands = cons.expanded_candidates(o, CandidateMode::Inward).unwrap();
        assert_eq!(mts_select(&cands, c(1.0, 0.0), o).unwrap(), 0);
        for (i, t) in cands.iter().enumerate() {
            assert_eq!(mts_select(&cands, c(1.0, 0.0), *t).unwrap(), i);
        }
        assert!(mts_select(&cands, c(0.0, 0.0), o).is_err());
        // equidistant between O and a replica resolves to O
        let mid = (cands[0] + cands[1]) / 2.0;
        assert_eq!(mts_select(&cands, c(1.0, 0.0), mid).unwrap(), 0);
    }

    #[test]
    fn mts_select_matches_brute_force_and_is_equivariant() {
        let cons = Constellation::new(64, 1.0, 0.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for mode in [CandidateMode::Outward, CandidateMode::Inward, CandidateMode::Full] {
            for _ in 0..10_000 {
                let t = cons.ts_type(rng.random_range(1..=4)).unwrap();
                let o = t.base_points[rng.random_range(0..4)];
                let cands = cons.expanded_candidates(o, mode).unwrap();
                let phi = C64::from_polar(rng.random_range(0.1..3.0), rng.random_range(-3.2..3.2));
                let e = c(rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0));
                let got = mts_select(&cands, phi, e).unwrap();
                // brute force in the de-rotated frame
                let dists: Vec<f64> = cands.iter().map(|s| (s - e * phi.norm() / phi).norm()).collect();
                let min = dists.iter().cloned().fold(f64::INFINITY, f64::min);
                assert!(dists[got] <= min + 1e-9);

                let rho = C64::from_polar(1.0, rng.random_range(-3.2..3.2));
                assert_eq!(mts_select(&cands, phi * rho, e * rho).unwrap(), got);
            }
        }
    }

    #[test]
    fn fixed_point_does_not_move() {
        let cons = Constellation::new(16, 1.0, 0.3).unwrap();
        let mut eq = ButterflyEqualizer::new(EqConfig::default()).unwrap();
        let before = eq.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut wx = window(&mut rng);
        let mut wy = window(&mut rng);
        wx[5] = c(1.0, 3.0);
        wy[5] = c(-3.0, -1.0);
        let step = eq
            .update_step(&wx, &wy, Reference::Training([c(1.0, 3.0), c(-3.0, -1.0)]), &cons)
            .unwrap();
        assert_eq!(step.errors, [0.0, 0.0]);
        assert_eq!(eq, before);
    }

    #[test]
    fn phase_estimate_converges_to_static_rotation() {
        let cons = Constellation::new(16, 1.0, 0.3).unwrap();
        let t = cons.ts_type(1).unwrap();
        let rot = C64::from_polar(1.0, 10f64.to_radians());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut eq = ButterflyEqualizer::new(EqConfig {
            algorithm: Algorithm::TsLms,
            mu_taps: 0.0,
            ..EqConfig::default()
        })
        .unwrap();
        let mu = eq.config().mu_phase;
        // independent scalar recursion: with taps held at identity the
        // estimate follows phi <- phi + mu (rot - phi)
        let mut scalar = c(1.0, 0.0);
        let mut zeros = vec![c(0.0, 0.0); 11];
        for _ in 0..500 {
            let ox = t.base_points[rng.random_range(0..4)];
            let oy = t.base_points[rng.random_range(0..4)];
            zeros[5] = ox * rot;
            let wx = zeros.clone();
            zeros[5] = oy * rot;
            let wy = zeros.clone();
            eq.update_step(&wx, &wy, Reference::Training([ox, oy]), &cons).unwrap();
            scalar += (rot - scalar) * mu;
        }
        for p in 0..2 {
            let deg = eq.phase()[p].arg().to_degrees();
            assert!((deg - 10.0).abs() < 0.5, "{deg}");
        }
        assert!((scalar.arg().to_degrees() - 10.0).abs() < 0.5);
    }

    fn frame_16(n_blocks: usize, seed: u64) -> (Frame, Constellation) {
        let cons = Constellation::new(16, 1.0, 0.3).unwrap();
        let t = cons.ts_type(1).unwrap();
        let s = FrameSchedule::with_blocks(n_blocks);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bx = random_bits(s.n_payload() * 4, &mut rng);
        let by = random_bits(s.n_payload() * 4, &mut rng);
        (build_frame([&bx, &by], &t, &s, &cons, false, &mut rng).unwrap(), cons)
    }

    #[test]
    fn polarization_rotation_is_undone_in_preamble() {
        let (frame, cons) = frame_16(2, 6);
        let a = 45f64.to_radians();
        let (s, co) = a.sin_cos();
        let rx: [Vec<C64>; 2] = [
            frame.symbols[0].iter().zip(&frame.symbols[1]).map(|(x, y)| x * co - y * s).collect(),
            frame.symbols[0].iter().zip(&frame.symbols[1]).map(|(x, y)| x * s + y * co).collect(),
        ];
        let mut eq = ButterflyEqualizer::new(EqConfig {
            extended_lattice: false,
            mu_taps: 0.03,
            ..EqConfig::default()
        })
        .unwrap();
        let out = run_equalizer(&mut eq, [&rx[0], &rx[1]], &frame, &cons).unwrap();
        let tail: f64 = (900..1000)
            .map(|i| (out.mse_trace[0][i] + out.mse_trace[1][i]) / 2.0)
            .sum::<f64>()
            / 100.0;
        let mse_db = 10.0 * (tail / cons.mean_energy()).log10();
        assert!(mse_db < -20.0, "{mse_db} dB");
        assert!(out.converged);
        for p in 0..2 {
            assert_eq!(
                cons.hard_demap(&frame.payload_symbols(p)),
                cons.hard_demap(&payload(&out.symbols[p], &frame))
            );
        }
    }

    fn payload(v: &[C64], frame: &Frame) -> Vec<C64> {
        v.iter().zip(&frame.ts_mask).filter(|(_, &t)| !t).map(|(s, _)| *s).collect()
    }

    #[test]
    fn identity_channel_converges() {
        let (frame, cons) = frame_16(3, 7);
        let mut eq = ButterflyEqualizer::new(EqConfig::default()).unwrap();
        let out = run_equalizer(&mut eq, [&frame.symbols[0], &frame.symbols[1]], &frame, &cons).unwrap();
        assert!(out.converged);
        assert_eq!(out.final_mse, 0.0);
        assert!(run_equalizer(&mut eq, [&frame.symbols[0][1..], &frame.symbols[1]], &frame, &cons).is_err());
    }

    #[test]
    fn ts_lms_equals_mts_with_original_candidate_only() {
        let (frame, cons) = frame_16(2, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rx: Vec<Vec<C64>> = frame
            .symbols
            .iter()
            .map(|p| {
                p.iter()
                    .map(|s| s * C64::from_polar(1.0, 0.2) + c(rng.random_range(-0.4..0.4), rng.random_range(-0.4..0.4)))
                    .collect()
            })
            .collect();
        let run = |cfg: EqConfig| {
            let mut eq = ButterflyEqualizer::new(cfg).unwrap();
            let out = run_equalizer(&mut eq, [&rx[0], &rx[1]], &frame, &cons).unwrap();
            (out, eq)
        };
        let ts = run(EqConfig {
            algorithm: Algorithm::TsLms,
            ..EqConfig::default()
        });
        let mts = run(EqConfig {
            algorithm: Algorithm::MtsLms,
            candidate_mode: CandidateMode::Original,
            ..EqConfig::default()
        });
        assert!(ts.0 == mts.0, "outputs differ");
        assert!(ts.1.taps() == mts.1.taps() && ts.1.phase() == mts.1.phase());
    }

    #[test]
    fn frozen_steps_give_a_fixed_linear_map() {
        let (frame, cons) = frame_16(1, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rx: Vec<Vec<C64>> = (0..2)
            .map(|_| (0..frame.len()).map(|_| c(rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0))).collect())
            .collect();
        let cfg = EqConfig {
            mu_taps: 0.0,
            mu_phase: 0.0,
            ..EqConfig::default()
        };
        let mut eq = ButterflyEqualizer::new(cfg.clone()).unwrap();
        let out = run_equalizer(&mut eq, [&rx[0], &rx[1]], &frame, &cons).unwrap();
        assert_eq!(eq, ButterflyEqualizer::new(cfg).unwrap());
        assert_eq!(out.symbols[0], rx[0]);
        assert_eq!(out.symbols[1], rx[1]);
    }

    #[test]
    fn dd_decisions_are_extended_decisions_of_outputs() {
        let (frame, cons) = frame_16(2, 12);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let rx: Vec<Vec<C64>> = frame
            .symbols
            .iter()
            .map(|p| p.iter().map(|s| s + c(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3))).collect())
            .collect();
        let mut eq = ButterflyEqualizer::new(EqConfig::default()).unwrap();
        let out = run_equalizer(&mut eq, [&rx[0], &rx[1]], &frame, &cons).unwrap();
        for p in 0..2 {
            for i in 0..frame.len() {
                if !frame.ts_mask[i] {
                    assert_eq!(out.decisions[p][i], cons.extended_decision(out.symbols[p][i]).point);
                }
            }
        }
    }

    #[test]
    fn csv_exports() {
        let (frame, cons) = frame_16(0, 14);
        let mut eq = ButterflyEqualizer::new(EqConfig::default()).unwrap();
        let out = run_equalizer(&mut eq, [&frame.symbols[0], &frame.symbols[1]], &frame, &cons).unwrap();
        let csv = out.trace_csv();
        assert_eq!(csv.lines().count(), 1001);
        assert!(csv.starts_with("index,err2_x,err2_y\n"));
        assert_eq!(eq.taps_csv().lines().count(), 12);
    }
}
