//! Quick invariant checks run by `ftnsim selftest` and the C API.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::JonesState;
use crate::config::ExperimentConfig;
use crate::equalizer::mts_select;
use crate::harness::{run_trial, symbol_spaced_cascade, GridPoint, LinkSetup};
use crate::qam::{CandidateMode, Constellation};
use crate::signal::{design_rrc, C64};
use crate::thp::modulo_2d;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

pub fn run() -> Vec<Check> {
    let mut out = vec![modulo_laws(), mts_oracle(), jones_unitary(), matched_filter_isi()];
    for m in [4, 16, 64] {
        out.push(loopback(m));
    }
    out
}

fn modulo_laws() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let m = 4.3;
    let mut bad = 0;
    for _ in 0..10_000 {
        let x = C64::new(rng.random_range(-40.0..40.0), rng.random_range(-40.0..40.0));
        let a = modulo_2d(x, m).expect("positive M");
        let inside = (-m..m).contains(&a.re) && (-m..m).contains(&a.im);
        if !inside || modulo_2d(a, m).expect("positive M") != a {
            bad += 1;
        }
    }
    check("modulo idempotent", bad == 0, format!("{bad} violations in 10000"))
}

fn mts_oracle() -> Check {
    let cons = Constellation::new(64, 1.0, 0.3).expect("valid constellation");
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut bad = 0;
    for _ in 0..10_000 {
        let t = cons.ts_type(rng.random_range(1..=4)).expect("type exists");
        let o = t.base_points[rng.random_range(0..4)];
        let cands = cons.expanded_candidates(o, CandidateMode::Full).expect("point in constellation");
        let phi = C64::from_polar(rng.random_range(0.2..2.0), rng.random_range(-3.1..3.1));
        let e = C64::new(rng.random_range(-30.0..30.0), rng.random_range(-30.0..30.0));
        let got = mts_select(&cands, phi, e).expect("nonzero phase");
        let unit = phi / phi.norm();
        let best = cands
            .iter()
            .map(|s| (s * unit - e).norm())
            .fold(f64::INFINITY, f64::min);
        if ((cands[got] * unit - e).norm() - best).abs() > 1e-12 {
            bad += 1;
        }
    }
    check("mts_select brute force", bad == 0, format!("{bad} mismatches in 10000"))
}

fn jones_unitary() -> Check {
    let j = JonesState::new(10e-12, 45f64.to_radians());
    let mut worst = 0.0f64;
    for k in -64..64 {
        let t = j.transfer(k as f64 * 2e9);
        for r in 0..2 {
            for s in 0..2 {
                let v: C64 = (0..2).map(|i| t[i][r].conj() * t[i][s]).sum();
                let want = if r == s { 1.0 } else { 0.0 };
                worst = worst.max((v - want).norm());
            }
        }
    }
    check("jones unitary", worst <= 1e-10, format!("max deviation {worst:.1e}"))
}

fn matched_filter_isi() -> Check {
    let pulse = design_rrc(73, 0.1, 32e9, 64e9).expect("valid RRC");
    let h = symbol_spaced_cascade(&pulse, 2);
    let c = h.len() / 2;
    let main = h[c].norm_sqr();
    let isi: f64 = h.iter().enumerate().filter(|(i, _)| *i != c).map(|(_, v)| v.norm_sqr()).sum();
    let db = 10.0 * (isi / main).log10();
    check("matched RRC ISI", db <= -30.0, format!("{db:.1} dB"))
}

fn loopback(format: usize) -> Check {
    let cfg = ExperimentConfig {
        format,
        n_channels: 1,
        n_payload_blocks: 2,
        ..ExperimentConfig::default()
    };
    let name = match format {
        4 => "noiseless loopback 4-QAM",
        16 => "noiseless loopback 16-QAM",
        _ => "noiseless loopback 64-QAM",
    };
    let setup = match LinkSetup::new(&cfg) {
        Ok(s) => s,
        Err(e) => return check(name, false, e.to_string()),
    };
    let point = GridPoint {
        osnr_db: f64::INFINITY,
        dgd_ps: 0.0,
        linewidth_hz: 0.0,
    };
    let t = run_trial(&setup, point, 7);
    check(
        name,
        t.error.is_none() && t.bit_errors == 0,
        format!("{} errors in {} bits", t.bit_errors, t.bits),
    )
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_pass() {
        for c in super::run() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
