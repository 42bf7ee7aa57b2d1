//! Spinal-code BLER analysis toolkit: closed-form upper bounds over fading
//! channels, exact-ML Monte Carlo validation, and transmission-pattern
//! optimization.

pub mod bounds;
pub mod channel;
pub mod cli;
pub mod codec;
pub mod decoder;
pub mod error;
pub mod numeric;
pub mod optimizer;
pub mod pattern;
pub mod sim;
pub mod verify;

pub use bounds::{bler_bound, craig_q, BlerBoundReport, BoundEngine, BoundKind, PairwiseDistanceSpectrum, ThetaPartition};
pub use channel::{fading_modulus_pdf, sample_fading, transmit, ChannelObservation, FadingFamily, FadingModel, NoiseSpec};
pub use codec::{build_constellation, encode, expand_symbols, hash_step, CodeParams, Constellation, Flavor, SpineChain, SymbolStream};
pub use decoder::{decoding_cost, ml_decode, DecodeResult, MAX_EXHAUSTIVE_N};
pub use error::{Error, Result};
pub use optimizer::{brute_force_best_pattern, greedy_pattern, greedy_pattern_with, ttp_pattern};
pub use pattern::TransmissionPattern;
pub use sim::{estimate_bler, sweep, SimConfig, SimPoint, SimResult};
