//! Training-symbol scheduling.
//!
//! Layout: a training preamble, then `n_blocks` repetitions of
//! `payload_block` data symbols followed by `pilot_len` training symbols. The
//! trailing pilot after the final payload block can be dropped.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qam::{Constellation, TsType};
use crate::signal::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSchedule {
    pub preamble_len: usize,
    pub pilot_len: usize,
    pub payload_block: usize,
    pub n_blocks: usize,
    #[serde(default = "default_true")]
    pub trailing_pilot: bool,
}

fn default_true() -> bool {
    true
}

impl Default for FrameSchedule {
    fn default() -> Self {
        Self {
            preamble_len: 1000,
            pilot_len: 24,
            payload_block: 1000,
            n_blocks: 10,
            trailing_pilot: true,
        }
    }
}

impl FrameSchedule {
    pub fn with_blocks(n_blocks: usize) -> Self {
        Self {
            n_blocks,
            ..Self::default()
        }
    }

    fn pilot_count(&self) -> usize {
        if self.n_blocks == 0 {
            0
        } else if self.trailing_pilot {
            self.n_blocks
        } else {
            self.n_blocks - 1
        }
    }

    pub fn frame_len(&self) -> usize {
        self.preamble_len + self.n_blocks * self.payload_block + self.pilot_count() * self.pilot_len
    }

    pub fn n_training(&self) -> usize {
        self.preamble_len + self.pilot_count() * self.pilot_len
    }

    pub fn n_payload(&self) -> usize {
        self.n_blocks * self.payload_block
    }

    /// Training mask over the whole frame (true = training symbol).
    pub fn ts_mask(&self) -> Vec<bool> {
        let mut mask = vec![true; self.preamble_len];
        for b in 0..self.n_blocks {
            mask.extend(std::iter::repeat_n(false, self.payload_block));
            if b + 1 < self.n_blocks || self.trailing_pilot {
                mask.extend(std::iter::repeat_n(true, self.pilot_len));
            }
        }
        mask
    }

    pub fn ts_positions(&self) -> Vec<usize> {
        self.ts_mask()
            .iter()
            .enumerate()
            .filter_map(|(i, &t)| t.then_some(i))
            .collect()
    }

    pub fn payload_positions(&self) -> Vec<usize> {
        self.ts_mask()
            .iter()
            .enumerate()
            .filter_map(|(i, &t)| (!t).then_some(i))
            .collect()
    }
}

/// One polarization-multiplexed transmit frame, before precoding.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub schedule: FrameSchedule,
    /// Symbols per polarization.
    pub symbols: [Vec<C64>; 2],
    pub ts_mask: Vec<bool>,
    /// Payload bits per polarization.
    pub tx_bits: [Vec<bool>; 2],
    pub ts_type: usize,
}

impl Frame {
    pub fn len(&self) -> usize {
        self.ts_mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts_mask.is_empty()
    }

    /// Payload symbols of polarization `p` in transmission order.
    pub fn payload_symbols(&self, p: usize) -> Vec<C64> {
        self.symbols[p]
            .iter()
            .zip(&self.ts_mask)
            .filter_map(|(s, &t)| (!t).then_some(*s))
            .collect()
    }
}

/// I.i.d. uniform draws from the four points of a training-symbol type.
pub fn generate_ts_sequence<R: Rng + ?Sized>(ts_type: &TsType, length: usize, rng: &mut R) -> Vec<C64> {
    (0..length)
        .map(|_| ts_type.base_points[rng.random_range(0..4)])
        .collect()
}

/// Interleaves mapped payload and training symbols for both polarizations.
///
/// With `repeat_pilots` every pilot block of a polarization reuses one draw;
/// otherwise each block is drawn fresh.
pub fn build_frame<R: Rng + ?Sized>(
    payload_bits: [&[bool]; 2],
    ts_type: &TsType,
    schedule: &FrameSchedule,
    constellation: &Constellation,
    repeat_pilots: bool,
    rng: &mut R,
) -> Result<Frame> {
    let needed = schedule.n_payload() * constellation.bits_per_symbol();
    for bits in payload_bits {
        if bits.len() != needed {
            return Err(Error::LengthMismatch {
                expected: needed,
                actual: bits.len(),
            });
        }
    }
    let mask = schedule.ts_mask();
    let mut symbols: [Vec<C64>; 2] = [Vec::with_capacity(mask.len()), Vec::with_capacity(mask.len())];
    for p in 0..2 {
        let payload = constellation.map_bits(payload_bits[p])?;
        let mut payload_iter = payload.into_iter();
        let fixed_pilot = repeat_pilots.then(|| generate_ts_sequence(ts_type, schedule.pilot_len, rng));
        let out = &mut symbols[p];
        out.extend(generate_ts_sequence(ts_type, schedule.preamble_len, rng));
        for b in 0..schedule.n_blocks {
            out.extend(payload_iter.by_ref().take(schedule.payload_block));
            if b + 1 < schedule.n_blocks || schedule.trailing_pilot {
                match &fixed_pilot {
                    Some(pilot) => out.extend_from_slice(pilot),
                    None => out.extend(generate_ts_sequence(ts_type, schedule.pilot_len, rng)),
                }
            }
        }
        debug_assert_eq!(out.len(), mask.len());
    }
    Ok(Frame {
        schedule: *schedule,
        symbols,
        ts_mask: mask,
        tx_bits: [payload_bits[0].to_vec(), payload_bits[1].to_vec()],
        ts_type: ts_type.type_index,
    })
}

/// Uniform random bits.
pub fn random_bits<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<bool> {
    (0..n).map(|_| rng.random::<bool>()).collect()
}
