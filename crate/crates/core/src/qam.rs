//! Square mQAM constellations on the odd-integer lattice, Gray labeling,
//! training-symbol types and decisions over the modulo-extended lattice.
//!
//! A precoded receiver never folds its input back into the modulo cell, so
//! every decision here runs over the extended set
//! `{point + 2M(k1 + j k2) : k1, k2 in {-1, 0, 1}}`. The lattice is a Cartesian
//! product, so all searches are done per dimension.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::C64;

/// Replica offsets searched by the extended-lattice decisions.
pub const REPLICA_RANGE: [i32; 3] = [-1, 0, 1];

#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    order: usize,
    side: usize,
    bits_per_dim: usize,
    spacing: f64,
    modulo_half_size: f64,
    /// Per-dimension amplitude levels, ascending.
    levels: Vec<f64>,
    points: Vec<C64>,
    labels: Vec<u32>,
}

impl Constellation {
    /// Builds the m-point square constellation with point spacing `spacing`
    /// (points at odd multiples of `spacing`) and modulo half-size
    /// `sqrt(m) * spacing + modulo_factor * spacing`.
    pub fn new(order: usize, spacing: f64, modulo_factor: f64) -> Result<Self> {
        let side: usize = match order {
            4 => 2,
            16 => 4,
            64 => 8,
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unsupported QAM order {order} (expected 4, 16 or 64)"
                )))
            }
        };
        if !(spacing > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "point spacing must be positive, got {spacing}"
            )));
        }
        if !(modulo_factor > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "modulo factor must be positive, got {modulo_factor}"
            )));
        }
        let bits_per_dim = side.trailing_zeros() as usize;
        let levels: Vec<f64> = (0..side)
            .map(|i| (2.0 * i as f64 - (side as f64 - 1.0)) * spacing)
            .collect();
        let mut points = Vec::with_capacity(order);
        let mut labels = Vec::with_capacity(order);
        for i in 0..side {
            for q in 0..side {
                points.push(C64::new(levels[i], levels[q]));
                labels.push((gray(i as u32) << bits_per_dim) | gray(q as u32));
            }
        }
        Ok(Self {
            order,
            side,
            bits_per_dim,
            spacing,
            modulo_half_size: side as f64 * spacing + modulo_factor * spacing,
            levels,
            points,
            labels,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        2 * self.bits_per_dim
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn modulo_half_size(&self) -> f64 {
        self.modulo_half_size
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    /// Gray label of point `idx`; the in-phase bits are the high bits.
    pub fn label(&self, idx: usize) -> u32 {
        self.labels[idx]
    }

    pub fn mean_energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.order as f64
    }

    pub fn index_of(&self, point: C64) -> Option<usize> {
        let tol = 1e-9 * self.spacing;
        self.points.iter().position(|p| (p - point).norm() < tol)
    }

    fn point_index(&self, i_re: usize, i_im: usize) -> usize {
        i_re * self.side + i_im
    }

    fn label_bits(&self, idx: usize) -> impl Iterator<Item = bool> + '_ {
        let nbits = self.bits_per_symbol();
        let label = self.labels[idx];
        (0..nbits).map(move |b| (label >> (nbits - 1 - b)) & 1 == 1)
    }

    /// Gray-maps a bit stream, `bits_per_symbol` bits per symbol, MSB first.
    pub fn map_bits(&self, bits: &[bool]) -> Result<Vec<C64>> {
        let nb = self.bits_per_symbol();
        if !bits.len().is_multiple_of(nb) {
            return Err(Error::InvalidParameter(format!(
                "{} bits is not a multiple of {nb} bits per symbol",
                bits.len()
            )));
        }
        Ok(bits
            .chunks(nb)
            .map(|chunk| {
                let word = |bs: &[bool]| bs.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32);
                let i = gray_inverse(word(&chunk[..self.bits_per_dim])) as usize;
                let q = gray_inverse(word(&chunk[self.bits_per_dim..])) as usize;
                self.points[self.point_index(i, q)]
            })
            .collect())
    }

    /// Minimum-distance decision against the base points only.
    pub fn hard_demap(&self, symbols: &[C64]) -> Vec<bool> {
        let mut bits = Vec::with_capacity(symbols.len() * self.bits_per_symbol());
        for s in symbols {
            let i = self.nearest_level(s.re);
            let q = self.nearest_level(s.im);
            bits.extend(self.label_bits(self.point_index(i, q)));
        }
        bits
    }

    /// Index of the nearest base point (no modulo replicas).
    pub fn nearest_index(&self, s: C64) -> usize {
        self.point_index(self.nearest_level(s.re), self.nearest_level(s.im))
    }

    fn nearest_level(&self, v: f64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, &l) in self.levels.iter().enumerate() {
            let d = (v - l).abs();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Diagonal training-symbol classes, innermost first.
    pub fn ts_catalog(&self) -> Vec<TsType> {
        (1..=self.side / 2)
            .map(|k| TsType::new(k, (2 * k - 1) as f64 * self.spacing))
            .collect()
    }

    /// Looks up a training-symbol type by its 1-based index.
    pub fn ts_type(&self, type_index: usize) -> Result<TsType> {
        self.ts_catalog()
            .into_iter()
            .find(|t| t.type_index == type_index)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "training-symbol type {type_index} does not exist for {}-QAM",
                    self.order
                ))
            })
    }

    /// The candidate positions a precoded training symbol may occupy at the
    /// receiver: the original point first, then its modulo replicas.
    pub fn expanded_candidates(&self, base: C64, mode: CandidateMode) -> Result<Vec<C64>> {
        if self.index_of(base).is_none() {
            return Err(Error::NotAConstellationPoint(format!("{base}")));
        }
        let two_m = 2.0 * self.modulo_half_size;
        let si = base.re.signum();
        let sq = base.im.signum();
        let out = match mode {
            CandidateMode::Outward => vec![
                base,
                base + C64::new(two_m * si, 0.0),
                base + C64::new(0.0, two_m * sq),
                base + C64::new(two_m * si, two_m * sq),
            ],
            CandidateMode::Inward => vec![
                base,
                base - C64::new(two_m * si, 0.0),
                base - C64::new(0.0, two_m * sq),
                base - C64::new(two_m * si, two_m * sq),
            ],
            CandidateMode::Full => {
                let mut v = vec![base];
                for &k1 in &REPLICA_RANGE {
                    for &k2 in &REPLICA_RANGE {
                        if k1 != 0 || k2 != 0 {
                            v.push(base + C64::new(two_m * k1 as f64, two_m * k2 as f64));
                        }
                    }
                }
                v
            }
            CandidateMode::Original => vec![base],
        };
        Ok(out)
    }

    /// Nearest point of the extended lattice. Ties go to the smaller replica
    /// offset `|k1| + |k2|`, then the lexicographically smaller `(k1, k2)`,
    /// then the lower point index.
    pub fn extended_decision(&self, received: C64) -> ExtendedDecision {
        let (i, k1) = self.nearest_extended_level(received.re);
        let (q, k2) = self.nearest_extended_level(received.im);
        let index = self.point_index(i, q);
        ExtendedDecision {
            index,
            base: self.points[index],
            replica: (k1, k2),
            point: self.points[index] + self.replica_shift(k1, k2),
        }
    }

    pub fn replica_shift(&self, k1: i32, k2: i32) -> C64 {
        let two_m = 2.0 * self.modulo_half_size;
        C64::new(two_m * k1 as f64, two_m * k2 as f64)
    }

    /// Per-dimension extended nearest level; key is (distance, |k|, k, index).
    fn nearest_extended_level(&self, v: f64) -> (usize, i32) {
        let two_m = 2.0 * self.modulo_half_size;
        let mut best = (0usize, 0i32);
        let mut best_d = f64::INFINITY;
        // Visit in (|k|, k, index) order so strict < keeps the tie-break.
        for &k in &[0i32, -1, 1] {
            for (i, &l) in self.levels.iter().enumerate() {
                let d = (v - l - two_m * k as f64).abs();
                if d < best_d {
                    best_d = d;
                    best = (i, k);
                }
            }
        }
        best
    }

    /// Max-log LLRs over the extended lattice, one per bit (MSB first).
    /// Positive values favor bit 0.
    pub fn soft_demap(&self, received: C64, noise_variance: f64) -> Result<Vec<f64>> {
        if !(noise_variance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "noise variance must be positive, got {noise_variance}"
            )));
        }
        let mut llrs = Vec::with_capacity(self.bits_per_symbol());
        self.dim_llrs(received.re, noise_variance, &mut llrs);
        self.dim_llrs(received.im, noise_variance, &mut llrs);
        Ok(llrs)
    }

    fn dim_llrs(&self, v: f64, noise_variance: f64, out: &mut Vec<f64>) {
        let two_m = 2.0 * self.modulo_half_size;
        let nb = self.bits_per_dim;
        let mut min0 = [f64::INFINITY; 3];
        let mut min1 = [f64::INFINITY; 3];
        for (i, &l) in self.levels.iter().enumerate() {
            let d = REPLICA_RANGE
                .iter()
                .map(|&k| (v - l - two_m * k as f64).powi(2))
                .fold(f64::INFINITY, f64::min);
            let g = gray(i as u32);
            for b in 0..nb {
                if (g >> (nb - 1 - b)) & 1 == 1 {
                    min1[b] = min1[b].min(d);
                } else {
                    min0[b] = min0[b].min(d);
                }
            }
        }
        for b in 0..nb {
            out.push((min1[b] - min0[b]) / noise_variance);
        }
    }

    /// Demaps a block of symbols through the soft demapper and slices the LLRs.
    pub fn soft_demap_hard_bits(&self, symbols: &[C64], noise_variance: f64) -> Result<Vec<bool>> {
        let mut bits = Vec::with_capacity(symbols.len() * self.bits_per_symbol());
        for &s in symbols {
            bits.extend(self.soft_demap(s, noise_variance)?.into_iter().map(|l| l < 0.0));
        }
        Ok(bits)
    }

    /// Bits carried by the base point of an extended decision.
    pub fn bits_of(&self, idx: usize) -> Vec<bool> {
        self.label_bits(idx).collect()
    }
}

/// Result of a decision over the extended lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedDecision {
    pub index: usize,
    pub base: C64,
    pub replica: (i32, i32),
    /// `base` shifted by the replica offset.
    pub point: C64,
}

/// Which modulo replicas of a training symbol are considered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateMode {
    /// Replicas pushed further away from the origin: `O + 2M sign(O)`.
    Outward,
    /// Replicas across the nearest modulo boundaries: `O - 2M sign(O)`.
    Inward,
    /// All nine replicas.
    Full,
    /// The original point alone; reduces MTS-LMS to TS-LMS.
    Original,
}

/// One diagonal training-symbol class: four points related by 90 degree
/// rotations.
#[derive(Debug, Clone, PartialEq)]
pub struct TsType {
    pub type_index: usize,
    pub base_points: [C64; 4],
}

impl TsType {
    fn new(type_index: usize, a: f64) -> Self {
        Self {
            type_index,
            base_points: [
                C64::new(a, a),
                C64::new(-a, a),
                C64::new(-a, -a),
                C64::new(a, -a),
            ],
        }
    }
}

pub fn gray(i: u32) -> u32 {
    i ^ (i >> 1)
}

pub fn gray_inverse(mut g: u32) -> u32 {
    let mut i = g;
    while g > 0 {
        g >>= 1;
        i ^= g;
    }
    i
}

/// Hamming distance between two bit streams and the resulting ratio.
pub fn count_errors(tx: &[bool], rx: &[bool]) -> Result<(usize, f64)> {
    if tx.len() != rx.len() {
        return Err(Error::LengthMismatch {
            expected: tx.len(),
            actual: rx.len(),
        });
    }
    let errors = tx.iter().zip(rx).filter(|(a, b)| a != b).count();
    let ber = if tx.is_empty() {
        0.0
    } else {
        errors as f64 / tx.len() as f64
    };
    Ok((errors, ber))
}
