//! Monte Carlo BLER estimation: encode -> fading channel -> exact ML decode
//! per trial, aggregated with Wilson confidence intervals and paired with
//! the two bound values at every SNR point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::{BoundEngine, BoundKind, ThetaPartition};
use crate::channel::{sample_fading, transmit, ChannelObservation, FadingModel, NoiseSpec};
use crate::codec::{build_constellation, encode, mix64, CodeParams};
use crate::decoder::{ml_decode, MAX_EXHAUSTIVE_N};
use crate::error::{Error, Result};
use crate::pattern::TransmissionPattern;

/// z for a two-sided 95% interval.
const WILSON_Z95: f64 = 1.959963984540054;

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub params: CodeParams,
    pub pattern: TransmissionPattern,
    pub model: FadingModel,
    pub snr_db_grid: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    /// Theta resolution for the paired refined bound.
    pub theta_n: usize,
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidSimConfig("trials must be >= 1".into()));
        }
        if self.snr_db_grid.is_empty() {
            return Err(Error::InvalidSimConfig("SNR grid must be nonempty".into()));
        }
        if self.params.n > MAX_EXHAUSTIVE_N {
            return Err(Error::ExhaustiveGuard {
                n: self.params.n,
                max: MAX_EXHAUSTIVE_N,
            });
        }
        if self.params.flavor != self.model.flavor {
            return Err(Error::FlavorMismatch {
                code: self.params.flavor,
                channel: self.model.flavor,
            });
        }
        if self.pattern.len() != self.params.segments() {
            return Err(Error::PatternLength {
                got: self.pattern.len(),
                want: self.params.segments(),
            });
        }
        if let Some(a) = self.pattern.first_empty_tail() {
            return Err(Error::EmptyTail { a });
        }
        if self.theta_n == 0 {
            return Err(Error::InvalidSimConfig("theta_n must be >= 1".into()));
        }
        Ok(())
    }
}

/// One SNR point: error counts, Wilson 95% interval, and the paired bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimPoint {
    pub snr_db: f64,
    pub sigma2: f64,
    pub errors: u64,
    pub trials: u64,
    pub bler: f64,
    pub ci95_lo: f64,
    pub ci95_hi: f64,
    pub bound_refined: f64,
    pub bound_gallager: f64,
    /// Wilson upper limit <= refined bound.
    pub dominance_ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimResult {
    pub config: SimConfig,
    pub points: Vec<SimPoint>,
}

/// Wilson score interval for `errors` successes in `trials`. The lower
/// limit is exactly 0 at zero errors and the upper exactly 1 at all errors
/// (the score interval endpoints coincide there up to rounding).
pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

fn trial_seed(seed: u64, snr_index: usize, trial: u64) -> u64 {
    let point = mix64(seed ^ mix64(0x534e_5250 + snr_index as u64));
    mix64(point ^ (trial + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Runs `trials` independent trials per SNR point: a fresh uniform message
/// each trial, one channel use per coded symbol, exact ML decode. A trial is
/// an error iff the decoded message differs from the transmitted one (a tie
/// that keeps the true message counts as correct).
pub fn estimate_bler(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let constellation = build_constellation(config.params.c, config.params.flavor)?;
    let partition = ThetaPartition::uniform(config.theta_n);
    let mask = config.params.message_mask();
    let mut points = Vec::with_capacity(config.snr_db_grid.len());
    for (si, &snr_db) in config.snr_db_grid.iter().enumerate() {
        let noise = NoiseSpec::from_snr_db(snr_db, config.model.omega())?;
        let engine = BoundEngine::new(&config.params, &config.model, &noise, Some(&partition))?;
        let bound_refined = engine.evaluate(BoundKind::Refined, &config.pattern)?.p_e;
        let bound_gallager = engine.evaluate(BoundKind::Gallager, &config.pattern)?.p_e;

        // Noiseless replay self-check: the decoder must return the
        // transmitted message when no noise is applied.
        {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(config.seed, si, u64::MAX >> 1));
            let message = rng.random::<u64>() & mask;
            let clean: Vec<ChannelObservation> =
                encode(&config.params, message, &config.pattern, &constellation)?
                    .into_iter()
                    .map(|x| {
                        let h = sample_fading(&config.model, &mut rng);
                        ChannelObservation { y: h * x, h }
                    })
                    .collect();
            let dec = ml_decode(&clean, &config.params, &config.pattern, &constellation)?;
            if dec.message != message {
                return Err(Error::InvalidSimConfig(format!(
                    "noiseless replay self-check failed at {snr_db} dB"
                )));
            }
        }

        let errors: u64 = (0..config.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(config.seed, si, t));
                let message = rng.random::<u64>() & mask;
                let points = encode(&config.params, message, &config.pattern, &constellation)
                    .expect("validated config");
                let obs = transmit(&points, &config.model, &noise, &mut rng);
                let dec = ml_decode(&obs, &config.params, &config.pattern, &constellation)
                    .expect("validated config");
                u64::from(dec.message != message)
            })
            .sum();

        let bler = errors as f64 / config.trials as f64;
        let (ci95_lo, ci95_hi) = wilson_interval(errors, config.trials, WILSON_Z95);
        points.push(SimPoint {
            snr_db,
            sigma2: noise.sigma2(),
            errors,
            trials: config.trials,
            bler,
            ci95_lo,
            ci95_hi,
            bound_refined,
            bound_gallager,
            dominance_ok: ci95_hi <= bound_refined,
        });
    }
    Ok(SimResult {
        config: config.clone(),
        points,
    })
}

/// Runs a batch of configs in order; per-config failures are reported
/// without aborting the rest. Each config's `seed` is treated as the global
/// seed: the trial streams are derived from (seed, config index), so
/// configs sharing one global seed still get independent draws.
pub fn sweep(configs: &[SimConfig]) -> Vec<Result<SimResult>> {
    configs
        .iter()
        .enumerate()
        .map(|(index, config)| {
            let mut derived = config.clone();
            derived.seed = mix64(config.seed ^ mix64(index as u64));
            estimate_bler(&derived)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::Flavor;

    fn config(model: FadingModel, snr_db_grid: Vec<f64>, trials: u64) -> SimConfig {
        SimConfig {
            params: CodeParams::new(8, 2, 8, 32, model.flavor).unwrap(),
            pattern: TransmissionPattern::uniform(6, 4),
            model,
            snr_db_grid,
            trials,
            seed: 7,
            theta_n: 20,
        }
    }

    #[test]
    fn awgn_high_snr_is_error_free() {
        let cfg = config(FadingModel::awgn(Flavor::Complex), vec![40.0], 1000);
        let res = estimate_bler(&cfg).unwrap();
        assert_eq!(res.points[0].errors, 0);
        assert_eq!(res.points[0].bler, 0.0);
        assert!(res.points[0].ci95_lo == 0.0);
    }

    #[test]
    fn same_seed_reproduces_identical_result() {
        let model = FadingModel::rayleigh(1.0, Flavor::Complex).unwrap();
        let cfg = config(model, vec![8.0], 400);
        let a = estimate_bler(&cfg).unwrap();
        let b = estimate_bler(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn result_is_independent_of_thread_count() {
        let model = FadingModel::rician(1.0, 1.0, Flavor::Complex).unwrap();
        let cfg = config(model, vec![9.0], 300);
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| estimate_bler(&cfg))
            .unwrap();
        let parallel = estimate_bler(&cfg).unwrap();
        assert_eq!(single, parallel);
    }

    #[test]
    fn wilson_interval_basics() {
        let (lo, hi) = wilson_interval(0, 10_000, WILSON_Z95);
        assert_eq!(lo, 0.0);
        // Zero-error upper limit is z^2 / (n + z^2).
        let z2 = WILSON_Z95 * WILSON_Z95;
        let expect = z2 / (10_000.0 + z2);
        assert!((hi - expect).abs() < 1e-12);
        let (lo, hi) = wilson_interval(50, 100, WILSON_Z95);
        assert!(lo < 0.5 && 0.5 < hi);
    }

    #[test]
    fn config_validation_errors() {
        let model = FadingModel::rayleigh(1.0, Flavor::Complex).unwrap();
        let mut cfg = config(model, vec![10.0], 0);
        assert!(matches!(
            estimate_bler(&cfg),
            Err(Error::InvalidSimConfig(_))
        ));
        cfg.trials = 10;
        cfg.snr_db_grid.clear();
        assert!(matches!(
            estimate_bler(&cfg),
            Err(Error::InvalidSimConfig(_))
        ));
        cfg.snr_db_grid = vec![10.0];
        cfg.params = CodeParams::new(26, 2, 8, 32, Flavor::Complex).unwrap();
        cfg.pattern = TransmissionPattern::uniform(2, 13);
        assert!(matches!(
            estimate_bler(&cfg),
            Err(Error::ExhaustiveGuard { .. })
        ));
    }

    #[test]
    fn sweep_preserves_order_and_isolates_errors() {
        let ok = config(
            FadingModel::rayleigh(1.0, Flavor::Complex).unwrap(),
            vec![12.0],
            50,
        );
        let mut bad = ok.clone();
        bad.trials = 0;
        let results = sweep(&[ok.clone(), bad, ok]);
        assert_eq!(results.len(), 3);
        assert!(results[0].is_ok());
        assert!(results[1].is_err());
        assert!(results[2].is_ok());
    }

    #[test]
    fn bound_curves_nonincreasing_in_nakagami_m() {
        // Bound pairing only; tiny trial count keeps this fast.
        let snrs = vec![5.0, 10.0];
        let mut prev: Option<Vec<f64>> = None;
        for m in [1.0, 2.0, 5.0] {
            let model = FadingModel::nakagami(1.0, m, Flavor::Complex).unwrap();
            let res = estimate_bler(&config(model, snrs.clone(), 1)).unwrap();
            let bounds: Vec<f64> = res.points.iter().map(|p| p.bound_refined).collect();
            if let Some(prev) = &prev {
                for (b, p) in bounds.iter().zip(prev) {
                    assert!(b <= p, "m = {m}: {b} > {p}");
                }
            }
            prev = Some(bounds);
        }
    }
}
