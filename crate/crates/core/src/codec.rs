//! Spinal encoding: message segmentation, sequential hashing into spine
//! values, counter-mode RNG expansion into c-bit symbols, and constellation
//! mapping.
//!
//! Bit-ordering conventions (fixed for cross-implementation determinism):
//! message bits are consumed MSB-first into k-bit segments, and c-bit symbol
//! words index constellation points MSB-first (for the complex flavor the
//! upper c/2 bits select the in-phase level, the lower c/2 bits the
//! quadrature level).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::TransmissionPattern;

/// Initial spine value s_0, known to encoder and decoder.
pub const SEED_SPINE: u64 = 0;

const HASH_KEY_STATE: u64 = 0x9e37_79b9_7f4a_7c15;
const HASH_KEY_SEGMENT: u64 = 0xff51_afd7_ed55_8ccd;
const HASH_KEY_FINAL: u64 = 0x2545_f491_4f6c_dd1d;
const RNG_KEY_SPINE: u64 = 0x6a09_e667_f3bc_c909;
const RNG_KEY_BLOCK: u64 = 0xbb67_ae85_84ca_a73b;

/// 64-bit finalizer (splitmix64 style). Bijective on u64 with strong
/// avalanche; also used to derive disjoint per-trial RNG streams.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn truncate(word: u64, bits: u32) -> u64 {
    if bits >= 64 {
        word
    } else {
        word & ((1u64 << bits) - 1)
    }
}

/// Real mapping emits one PAM level per symbol; complex emits an I/Q grid
/// point per symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Real,
    Complex,
}

/// The (n, k, c, v) tuple plus constellation flavor defining a Spinal code
/// instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    /// Message length in bits.
    pub n: u32,
    /// Segment size in bits; k divides n.
    pub k: u32,
    /// Symbol width in bits.
    pub c: u32,
    /// Spine width in bits; collisions occur at rate ~2^-v.
    pub v: u32,
    pub flavor: Flavor,
}

impl CodeParams {
    pub fn new(n: u32, k: u32, c: u32, v: u32, flavor: Flavor) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::InvalidParams(format!("n = {n} must be in 1..=64")));
        }
        if k == 0 || k > n {
            return Err(Error::InvalidParams(format!("k = {k} must be in 1..=n")));
        }
        if !n.is_multiple_of(k) {
            return Err(Error::InvalidParams(format!("k = {k} must divide n = {n}")));
        }
        if c == 0 || c > 32 {
            return Err(Error::InvalidParams(format!("c = {c} must be in 1..=32")));
        }
        if flavor == Flavor::Complex && !c.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!(
                "c = {c} must be even for the complex flavor (c/2 bits per I/Q dimension)"
            )));
        }
        if v == 0 || v > 64 {
            return Err(Error::InvalidParams(format!("v = {v} must be in 1..=64")));
        }
        Ok(CodeParams { n, k, c, v, flavor })
    }

    /// Number of segments / spine values, n/k.
    pub fn segments(&self) -> usize {
        (self.n / self.k) as usize
    }

    /// Bitmask selecting an n-bit message word.
    pub fn message_mask(&self) -> u64 {
        if self.n >= 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    /// k-bit segment at 1-based index `i`, MSB-first.
    pub fn segment(&self, message: u64, i: usize) -> u64 {
        let shift = self.n - (i as u32) * self.k;
        truncate(message >> shift, self.k)
    }
}

/// One hash-chain step: v-bit state + k-bit segment -> v-bit state.
///
/// Fixed-key 64-bit mixing; full-width collisions cannot occur when only one
/// input differs (the segment multiplier is odd, the state path is a
/// bijection), so the observable collision rate is the ~2^-v truncation rate.
#[inline]
pub fn hash_step(state: u64, segment: u64, v: u32) -> u64 {
    let h = mix64(mix64(state ^ HASH_KEY_STATE) ^ segment.wrapping_mul(HASH_KEY_SEGMENT) ^ HASH_KEY_FINAL);
    truncate(h, v)
}

/// The ordered chain of v-bit spine values for one message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpineChain {
    pub spines: Vec<u64>,
}

impl SpineChain {
    /// Derives spines[i] = hash(spines[i-1], segment_i) from `SEED_SPINE`.
    pub fn derive(params: &CodeParams, message: u64) -> Result<Self> {
        if message & !params.message_mask() != 0 {
            return Err(Error::MessageRange { n: params.n });
        }
        let mut spines = Vec::with_capacity(params.segments());
        let mut state = SEED_SPINE;
        for i in 1..=params.segments() {
            state = hash_step(state, params.segment(message, i), params.v);
            spines.push(state);
        }
        Ok(SpineChain { spines })
    }
}

/// c-bit word `j` (0-based) of the pseudo-random stream seeded by `spine`.
///
/// Counter-mode: 64-bit block b = mix(spine, b), chopped MSB-first into
/// floor(64/c) words per block. O(1) random access, so extending a pass never
/// recomputes earlier symbols.
#[inline]
pub fn symbol_word(spine: u64, j: usize, c: u32) -> u64 {
    let per_block = (64 / c) as usize;
    let block_index = (j / per_block) as u64;
    let offset = (j % per_block) as u32;
    let block = mix64(mix64(spine ^ RNG_KEY_SPINE) ^ block_index.wrapping_mul(RNG_KEY_BLOCK));
    truncate(block >> (64 - c * (offset + 1)), c)
}

/// First `count` c-bit words of the stream seeded by `spine`.
pub fn expand_symbols(spine: u64, count: usize, c: u32) -> Vec<u64> {
    (0..count).map(|j| symbol_word(spine, j, c)).collect()
}

/// The (i, j)-indexed matrix of c-bit symbol words for one message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolStream {
    pub symbols: Vec<Vec<u64>>,
}

impl SymbolStream {
    pub fn generate(chain: &SpineChain, pattern: &TransmissionPattern, c: u32) -> Result<Self> {
        if pattern.len() != chain.spines.len() {
            return Err(Error::PatternLength {
                got: pattern.len(),
                want: chain.spines.len(),
            });
        }
        let symbols = chain
            .spines
            .iter()
            .zip(pattern.ells())
            .map(|(&s, &ell)| expand_symbols(s, ell as usize, c))
            .collect();
        Ok(SymbolStream { symbols })
    }
}

/// A normalized uniform-grid constellation: 2^c points with unit average
/// energy, symmetric about the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct Constellation {
    c: u32,
    flavor: Flavor,
    points: Vec<Complex64>,
    /// Levels per dimension (2^c real, 2^{c/2} complex).
    levels: u32,
    /// Half the distance between adjacent levels in one dimension.
    spacing: f64,
    avg_energy: f64,
}

/// Builds the uniform PAM (real) or square-grid QAM (complex) constellation
/// for c-bit symbols, normalized to unit average energy.
pub fn build_constellation(c: u32, flavor: Flavor) -> Result<Constellation> {
    if c == 0 || c > 32 {
        return Err(Error::InvalidParams(format!("c = {c} must be in 1..=32")));
    }
    if flavor == Flavor::Complex && !c.is_multiple_of(2) {
        return Err(Error::InvalidParams(format!(
            "c = {c} must be even for the complex flavor"
        )));
    }
    let (levels, spacing) = match flavor {
        Flavor::Real => {
            let m = 1u32 << c;
            // E[(2i - (m-1))^2] over uniform i equals (m^2 - 1)/3.
            let m2 = (m as f64) * (m as f64);
            (m, (3.0 / (m2 - 1.0)).sqrt())
        }
        Flavor::Complex => {
            let m = 1u32 << (c / 2);
            let m2 = (m as f64) * (m as f64);
            (m, (3.0 / (2.0 * (m2 - 1.0))).sqrt())
        }
    };
    let level = |idx: u32| (2.0 * idx as f64 - (levels as f64 - 1.0)) * spacing;
    let points: Vec<Complex64> = match flavor {
        Flavor::Real => (0..levels).map(|i| Complex64::new(level(i), 0.0)).collect(),
        Flavor::Complex => (0..1u32 << c)
            .map(|w| {
                let hi = w >> (c / 2);
                let lo = w & ((1u32 << (c / 2)) - 1);
                Complex64::new(level(hi), level(lo))
            })
            .collect(),
    };
    let avg_energy = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / points.len() as f64;
    Ok(Constellation {
        c,
        flavor,
        points,
        levels,
        spacing,
        avg_energy,
    })
}

impl Constellation {
    /// Channel point for a c-bit symbol word.
    #[inline]
    pub fn map(&self, word: u64) -> Complex64 {
        self.points[word as usize]
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn c(&self) -> u32 {
        self.c
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn avg_energy(&self) -> f64 {
        self.avg_energy
    }

    pub(crate) fn check_compatible(&self, params: &CodeParams) -> Result<()> {
        if self.c != params.c || self.flavor != params.flavor {
            return Err(Error::ConstellationMismatch(
                format!("c = {}, {:?}", self.c, self.flavor),
                format!("c = {}, {:?}", params.c, params.flavor),
            ));
        }
        Ok(())
    }
}

/// Spinal encoding: emits the `sum(ell_i)` channel points for `message`
/// under the given transmission pattern, spine-major then pass-major.
pub fn encode(
    params: &CodeParams,
    message: u64,
    pattern: &TransmissionPattern,
    constellation: &Constellation,
) -> Result<Vec<Complex64>> {
    constellation.check_compatible(params)?;
    if pattern.len() != params.segments() {
        return Err(Error::PatternLength {
            got: pattern.len(),
            want: params.segments(),
        });
    }
    // ell_i = 0 is allowed mid-pattern (optimizer generality), but a zero
    // tail sum leaves some segment unprotected and the bound vacuous.
    if let Some(a) = pattern.first_empty_tail() {
        return Err(Error::EmptyTail { a });
    }
    let chain = SpineChain::derive(params, message)?;
    let mut out = Vec::with_capacity(pattern.total() as usize);
    for (spine, &ell) in chain.spines.iter().zip(pattern.ells()) {
        for j in 0..ell as usize {
            out.push(constellation.map(symbol_word(*spine, j, params.c)));
        }
    }
    Ok(out)
}
