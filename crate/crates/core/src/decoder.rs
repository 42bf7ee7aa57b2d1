//! Exact maximum-likelihood decoding with perfect CSI over the full 2^n
//! candidate space. Ground truth for BLER estimation; guarded to small n.
//!
//! Candidates are enumerated depth-first over segments in ascending order,
//! so messages sharing a k-bit prefix share spine computations and partial
//! costs, and the first minimum found is the numerically smallest message.

use crate::codec::{hash_step, symbol_word, CodeParams, Constellation, SEED_SPINE};
use crate::channel::ChannelObservation;
use crate::error::{Error, Result};
use crate::pattern::TransmissionPattern;

/// Exhaustive-search guard: 2^n candidate evaluations.
pub const MAX_EXHAUSTIVE_N: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecodeResult {
    pub message: u64,
    /// The minimizing decoding cost sum_{i,j} |y - h f(x)|^2.
    pub cost: f64,
    /// Set when the argmin was not unique; the smallest message is kept.
    pub tie: bool,
}

fn check_inputs(
    observations: &[ChannelObservation],
    params: &CodeParams,
    pattern: &TransmissionPattern,
    constellation: &Constellation,
) -> Result<()> {
    constellation.check_compatible(params)?;
    if pattern.len() != params.segments() {
        return Err(Error::PatternLength {
            got: pattern.len(),
            want: params.segments(),
        });
    }
    if observations.len() != pattern.total() as usize {
        return Err(Error::ObservationLength {
            got: observations.len(),
            want: pattern.total() as usize,
        });
    }
    Ok(())
}

/// Cost contribution of one spine: sum_j |y_{i,j} - h_{i,j} f(x_{i,j})|^2.
#[inline]
fn spine_cost(
    spine: u64,
    obs: &[ChannelObservation],
    c: u32,
    constellation: &Constellation,
) -> f64 {
    let mut acc = 0.0f64;
    for (j, o) in obs.iter().enumerate() {
        let x = constellation.map(symbol_word(spine, j, c));
        acc += (o.y - o.h * x).norm_sqr();
    }
    acc
}

/// Decoding cost of one candidate message against the observations.
pub fn decoding_cost(
    candidate: u64,
    observations: &[ChannelObservation],
    params: &CodeParams,
    pattern: &TransmissionPattern,
    constellation: &Constellation,
) -> Result<f64> {
    check_inputs(observations, params, pattern, constellation)?;
    if candidate & !params.message_mask() != 0 {
        return Err(Error::MessageRange { n: params.n });
    }
    let mut state = SEED_SPINE;
    let mut offset = 0usize;
    let mut cost = 0.0f64;
    for (i, &ell) in pattern.ells().iter().enumerate() {
        state = hash_step(state, params.segment(candidate, i + 1), params.v);
        cost += spine_cost(state, &observations[offset..offset + ell as usize], params.c, constellation);
        offset += ell as usize;
    }
    Ok(cost)
}

struct Search<'a> {
    params: &'a CodeParams,
    constellation: &'a Constellation,
    observations: &'a [ChannelObservation],
    /// Observation range start per segment.
    offsets: Vec<usize>,
    ells: &'a [u32],
    best_cost: f64,
    best_message: u64,
    tie: bool,
}

impl Search<'_> {
    fn run(&mut self) {
        self.descend(0, SEED_SPINE, 0.0, 0);
    }

    fn descend(&mut self, depth: usize, state: u64, partial: f64, prefix: u64) {
        let nk = self.params.segments();
        let k = self.params.k;
        for seg in 0..(1u64 << k) {
            let spine = hash_step(state, seg, self.params.v);
            let ell = self.ells[depth] as usize;
            let off = self.offsets[depth];
            let cost = partial
                + spine_cost(
                    spine,
                    &self.observations[off..off + ell],
                    self.params.c,
                    self.constellation,
                );
            // Strictly-greater pruning keeps tie detection exact: a pruned
            // branch can only produce costs strictly above the incumbent.
            if cost > self.best_cost {
                continue;
            }
            let message = (prefix << k) | seg;
            if depth + 1 == nk {
                if cost < self.best_cost {
                    self.best_cost = cost;
                    self.best_message = message;
                    self.tie = false;
                } else if cost == self.best_cost && message != self.best_message {
                    // Ascending enumeration: the incumbent is smaller.
                    self.tie = true;
                }
            } else {
                self.descend(depth + 1, spine, cost, message);
            }
        }
    }
}

/// Global argmin of the decoding cost over all 2^n candidates. Ties break
/// toward the numerically smallest message word with the tie flag set.
pub fn ml_decode(
    observations: &[ChannelObservation],
    params: &CodeParams,
    pattern: &TransmissionPattern,
    constellation: &Constellation,
) -> Result<DecodeResult> {
    if params.n > MAX_EXHAUSTIVE_N {
        return Err(Error::ExhaustiveGuard {
            n: params.n,
            max: MAX_EXHAUSTIVE_N,
        });
    }
    check_inputs(observations, params, pattern, constellation)?;
    let mut offsets = Vec::with_capacity(pattern.len());
    let mut acc = 0usize;
    for &ell in pattern.ells() {
        offsets.push(acc);
        acc += ell as usize;
    }
    let mut search = Search {
        params,
        constellation,
        observations,
        offsets,
        ells: pattern.ells(),
        best_cost: f64::INFINITY,
        best_message: 0,
        tie: false,
    };
    search.run();
    Ok(DecodeResult {
        message: search.best_message,
        cost: search.best_cost,
        tie: search.tie,
    })
}
