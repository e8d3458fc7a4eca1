//! Coordinate-addressed uniform draws.
//!
//! Every random number consumed by the optimizer is a pure function of a
//! [`DrawAddress`]: the master seed, the run index, the iteration, the particle
//! and the slot the draw fills. The value is produced by the Philox4x32-10
//! counter-based generator (Salmon et al., "Parallel random numbers: as easy as
//! 1, 2, 3"), with the address packed into the 128-bit counter and the seed
//! used as the 64-bit key. Because no generator state is carried between draws,
//! results cannot depend on evaluation order or on how work is split between
//! threads.

use thiserror::Error;

/// Master seed used when none is given.
pub const DEFAULT_SEED: u64 = 42;

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;

// Slot families occupy the top two bits of the fourth counter word.
const FAMILY_SHIFT: u32 = 30;
const MAX_SLOT_INDEX: u32 = (1 << FAMILY_SHIFT) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum RngError {
    #[error("lower bound {lower} exceeds upper bound {upper} in dimension {dimension}")]
    BoundsInverted {
        dimension: usize,
        lower: f64,
        upper: f64,
    },
    #[error("lower and upper bound vectors differ in length ({lower} vs {upper})")]
    LengthMismatch { lower: usize, upper: usize },
}

/// Which draw of a particle's update a value feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    /// Cognitive coefficient r1.
    R1,
    /// Social coefficient r2.
    R2,
    /// Modulation coefficient r3.
    R3,
    /// Initial position, coordinate `k`.
    InitDim(u32),
    /// Per-dimension cognitive coefficient, coordinate `k`.
    R1Dim(u32),
    /// Per-dimension social coefficient, coordinate `k`.
    R2Dim(u32),
}

impl Slot {
    /// Packs the slot into one counter word. Scalar slots use family 0,
    /// the per-coordinate families 1..=3 with the coordinate in the low 30 bits.
    fn code(self) -> u32 {
        let indexed = |family: u32, k: u32| {
            debug_assert!(k <= MAX_SLOT_INDEX, "coordinate index {k} out of range");
            (family << FAMILY_SHIFT) | (k & MAX_SLOT_INDEX)
        };
        match self {
            Slot::R1 => 0,
            Slot::R2 => 1,
            Slot::R3 => 2,
            Slot::InitDim(k) => indexed(1, k),
            Slot::R1Dim(k) => indexed(2, k),
            Slot::R2Dim(k) => indexed(3, k),
        }
    }
}

/// Full coordinates of a single draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DrawAddress {
    pub master_seed: u64,
    pub run_index: u32,
    pub iteration: u32,
    pub particle: u32,
    pub slot: Slot,
}

impl DrawAddress {
    fn counter(&self) -> [u32; 4] {
        [self.run_index, self.iteration, self.particle, self.slot.code()]
    }

    fn key(&self) -> [u32; 2] {
        [self.master_seed as u32, (self.master_seed >> 32) as u32]
    }
}

/// The pair `(master_seed, run_index)` shared by every draw of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RunStream {
    pub master_seed: u64,
    pub run_index: u32,
}

impl Default for RunStream {
    fn default() -> Self {
        Self::new(DEFAULT_SEED, 0)
    }
}

impl RunStream {
    pub fn new(master_seed: u64, run_index: u32) -> Self {
        Self {
            master_seed,
            run_index,
        }
    }

    pub fn address(&self, iteration: u32, particle: u32, slot: Slot) -> DrawAddress {
        DrawAddress {
            master_seed: self.master_seed,
            run_index: self.run_index,
            iteration,
            particle,
            slot,
        }
    }

    #[inline]
    pub fn uniform01(&self, iteration: u32, particle: u32, slot: Slot) -> f64 {
        uniform01(&self.address(iteration, particle, slot))
    }
}

#[inline]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let product = u64::from(a) * u64::from(b);
    ((product >> 32) as u32, product as u32)
}

/// The Philox4x32 bijection with ten rounds.
pub fn philox4x32_10(counter: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut ctr = counter;
    let mut key = key;
    for round in 0..10 {
        if round > 0 {
            key[0] = key[0].wrapping_add(PHILOX_W0);
            key[1] = key[1].wrapping_add(PHILOX_W1);
        }
        let (hi0, lo0) = mulhilo(PHILOX_M0, ctr[0]);
        let (hi1, lo1) = mulhilo(PHILOX_M1, ctr[2]);
        ctr = [hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0];
    }
    ctr
}

/// Uniform value in `[0, 1)` with 53 bits of resolution.
#[inline]
pub fn uniform01(addr: &DrawAddress) -> f64 {
    let out = philox4x32_10(addr.counter(), addr.key());
    let bits = (u64::from(out[0]) << 32) | u64::from(out[1]);
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform point in the box `[lb, ub]`, coordinate `k` drawn at slot
/// `InitDim(k)` of iteration 0 for the given particle.
pub fn uniform_box(
    stream: &RunStream,
    particle: u32,
    lb: &[f64],
    ub: &[f64],
) -> Result<Vec<f64>, RngError> {
    if lb.len() != ub.len() {
        return Err(RngError::LengthMismatch {
            lower: lb.len(),
            upper: ub.len(),
        });
    }
    lb.iter()
        .zip(ub)
        .enumerate()
        .map(|(k, (&lo, &hi))| {
            if lo > hi {
                return Err(RngError::BoundsInverted {
                    dimension: k,
                    lower: lo,
                    upper: hi,
                });
            }
            let u = stream.uniform01(0, particle, Slot::InitDim(k as u32));
            Ok(lo + u * (hi - lo))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    // Known-answer vectors published with the Random123 reference library.
    #[test]
    fn philox_known_answers() {
        assert_eq!(
            philox4x32_10([0, 0, 0, 0], [0, 0]),
            [0x6627_e8d5, 0xe169_c58d, 0xbc57_ac4c, 0x9b00_dbd8]
        );
        assert_eq!(
            philox4x32_10([u32::MAX; 4], [u32::MAX; 2]),
            [0x408f_276d, 0x41c8_3b0e, 0xa20b_c7c6, 0x6d54_51fd]
        );
        assert_eq!(
            philox4x32_10(
                [0x243f_6a88, 0x85a3_08d3, 0x1319_8a2e, 0x0370_7344],
                [0xa409_3822, 0x299f_31d0]
            ),
            [0xd16c_fe09, 0x94fd_cceb, 0x5001_e420, 0x2412_6ea1]
        );
    }

    #[test]
    fn slot_codes_are_distinct() {
        let mut codes = HashSet::new();
        for slot in [Slot::R1, Slot::R2, Slot::R3] {
            assert!(codes.insert(slot.code()));
        }
        for k in 0..64 {
            for slot in [Slot::InitDim(k), Slot::R1Dim(k), Slot::R2Dim(k)] {
                assert!(codes.insert(slot.code()), "{slot:?}");
            }
        }
    }

    #[test]
    fn same_address_same_value() {
        let addr = RunStream::new(42, 3).address(17, 5, Slot::R2);
        assert_eq!(uniform01(&addr).to_bits(), uniform01(&addr).to_bits());
    }

    #[test]
    fn slot_only_differences_rarely_collide() {
        let stream = RunStream::new(DEFAULT_SEED, 0);
        let mut collisions = 0usize;
        let pairs = 100_000u32;
        for n in 0..pairs {
            let (t, i) = (n / 40, n % 40);
            let a = stream.uniform01(t, i, Slot::R1);
            let b = stream.uniform01(t, i, Slot::R3);
            if a == b {
                collisions += 1;
            }
        }
        assert!((collisions as f64) / (pairs as f64) < 1e-3);
    }

    #[test]
    fn run_streams_are_disjoint() {
        let a = RunStream::new(42, 0);
        let b = RunStream::new(42, 1);
        let same = (0..1000)
            .filter(|&t| a.uniform01(t, 0, Slot::R1) == b.uniform01(t, 0, Slot::R1))
            .count();
        assert_eq!(same, 0);
    }

    #[test]
    fn degenerate_box_returns_lower_bound() {
        let lb = [1.5, -2.0, 0.0];
        let x = uniform_box(&RunStream::default(), 7, &lb, &lb).unwrap();
        assert_eq!(x, lb);
    }

    #[test]
    fn box_draws_stay_in_range_and_repeat() {
        let stream = RunStream::new(9, 2);
        let lb = vec![-1.0; 25];
        let ub = vec![1.0; 25];
        for particle in 0..200 {
            let x = uniform_box(&stream, particle, &lb, &ub).unwrap();
            assert!(x.iter().all(|&v| (-1.0..1.0).contains(&v)));
            assert_eq!(x, uniform_box(&stream, particle, &lb, &ub).unwrap());
        }
    }

    #[test]
    fn inverted_box_is_rejected() {
        let err = uniform_box(&RunStream::default(), 0, &[0.0, 1.0], &[1.0, 0.0]).unwrap_err();
        assert!(matches!(err, RngError::BoundsInverted { dimension: 1, .. }));
        let err = uniform_box(&RunStream::default(), 0, &[0.0], &[1.0, 2.0]).unwrap_err();
        assert!(matches!(err, RngError::LengthMismatch { .. }));
    }
}
