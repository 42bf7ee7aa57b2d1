//! Transmission-pattern optimization: the greedy incremental search, the
//! direct tail-transmission-pattern (TTP) construction, and a brute-force
//! composition oracle for optimality checks.

use crate::bounds::{BoundEngine, BoundKind, ThetaPartition};
use crate::channel::{FadingModel, NoiseSpec};
use crate::codec::CodeParams;
use crate::error::{Error, Result};
use crate::pattern::TransmissionPattern;

/// Composition-count guard for the brute-force oracle.
pub const MAX_COMPOSITIONS: u128 = 1_000_000;

/// Greedy search: start from `p_ini` symbols per spine and repeatedly add
/// the one symbol whose placement minimizes the refined bound, until the
/// budget is spent. Returns the final pattern and the full trajectory of
/// intermediate patterns (initialization included).
///
/// Ties go to the largest spine index, which is also the provably optimal
/// tail placement, so the search is deterministic.
pub fn greedy_pattern(
    params: &CodeParams,
    model: &FadingModel,
    sigma2: f64,
    partition: &ThetaPartition,
    p_ini: u32,
    budget: u64,
) -> Result<(TransmissionPattern, Vec<Vec<u32>>)> {
    greedy_pattern_with(BoundKind::Refined, params, model, sigma2, partition, p_ini, budget)
}

/// Greedy search with an explicit bound kind (the Gallager variant is useful
/// for comparison studies; the refined bound is the default).
pub fn greedy_pattern_with(
    kind: BoundKind,
    params: &CodeParams,
    model: &FadingModel,
    sigma2: f64,
    partition: &ThetaPartition,
    p_ini: u32,
    budget: u64,
) -> Result<(TransmissionPattern, Vec<Vec<u32>>)> {
    let nk = params.segments();
    let need = p_ini as u64 * nk as u64;
    if p_ini == 0 || need > budget {
        return Err(Error::InfeasibleBudget { need, budget });
    }
    let noise = NoiseSpec::new(sigma2)?;
    let engine = BoundEngine::new(params, model, &noise, Some(partition))?;
    let mut pattern = TransmissionPattern::uniform(p_ini, nk);
    let mut trajectory = vec![pattern.ells().to_vec()];
    for _ in need..budget {
        let mut best_index = 0usize;
        let mut best_pe = f64::INFINITY;
        for i in 0..nk {
            let candidate = pattern.with_increment(i);
            let pe = engine.evaluate(kind, &candidate)?.p_e;
            // <= keeps the largest index among equal minima.
            if pe <= best_pe {
                best_pe = pe;
                best_index = i;
            }
        }
        pattern = pattern.with_increment(best_index);
        trajectory.push(pattern.ells().to_vec());
    }
    Ok((pattern, trajectory))
}

/// The tail transmission pattern: all `extra` symbols appended to the last
/// spine.
pub fn ttp_pattern(base: &TransmissionPattern, extra: u32) -> TransmissionPattern {
    base.with_extra_tail(extra)
}

impl TransmissionPattern {
    fn with_extra_tail(&self, extra: u32) -> TransmissionPattern {
        let mut ells = self.ells().to_vec();
        *ells.last_mut().expect("pattern is nonempty") += extra;
        TransmissionPattern::new(ells).expect("nonempty")
    }
}

fn compositions_count(budget: u64, parts: u64) -> u128 {
    // C(budget - 1, parts - 1)
    let n = (budget - 1) as u128;
    let k = (parts - 1).min(budget - parts) as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
        if acc > MAX_COMPOSITIONS * 1000 {
            return acc; // already far past the guard
        }
    }
    acc
}

/// True when `a`'s tail is lexicographically larger than `b`'s, comparing
/// from the last spine backwards. Used to break exact bound ties toward the
/// TTP-most pattern.
fn tail_lex_greater(a: &[u32], b: &[u32]) -> bool {
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        if x != y {
            return x > y;
        }
    }
    false
}

/// Exhaustively evaluates the refined bound over every composition of
/// `budget` into n/k parts with ell_i >= 1, returning the minimizer and its
/// bound value. Guarded to `MAX_COMPOSITIONS` compositions.
pub fn brute_force_best_pattern(
    params: &CodeParams,
    model: &FadingModel,
    sigma2: f64,
    partition: &ThetaPartition,
    budget: u64,
) -> Result<(TransmissionPattern, f64)> {
    let nk = params.segments() as u64;
    if budget < nk {
        return Err(Error::InfeasibleBudget { need: nk, budget });
    }
    let count = compositions_count(budget, nk);
    if count > MAX_COMPOSITIONS {
        return Err(Error::EnumerationGuard {
            count,
            max: MAX_COMPOSITIONS,
        });
    }
    let noise = NoiseSpec::new(sigma2)?;
    let engine = BoundEngine::new(params, model, &noise, Some(partition))?;
    let mut current = vec![1u32; nk as usize];
    let mut best: Option<(Vec<u32>, f64)> = None;
    enumerate_compositions(&mut current, 0, budget - nk, &engine, &mut best)?;
    let (ells, value) = best.expect("at least one composition exists");
    Ok((TransmissionPattern::new(ells)?, value))
}

fn enumerate_compositions(
    current: &mut Vec<u32>,
    index: usize,
    remaining: u64,
    engine: &BoundEngine,
    best: &mut Option<(Vec<u32>, f64)>,
) -> Result<()> {
    if index + 1 == current.len() {
        current[index] += remaining as u32;
        let pattern = TransmissionPattern::new(current.clone())?;
        let pe = engine.evaluate(BoundKind::Refined, &pattern)?.p_e;
        let take = match best {
            None => true,
            Some((ells, val)) => pe < *val || (pe == *val && tail_lex_greater(current, ells)),
        };
        if take {
            *best = Some((current.clone(), pe));
        }
        current[index] -= remaining as u32;
        return Ok(());
    }
    for extra in 0..=remaining {
        current[index] += extra as u32;
        enumerate_compositions(current, index + 1, remaining - extra, engine, best)?;
        current[index] -= extra as u32;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::Flavor;

    fn fig2_setup() -> (CodeParams, FadingModel, f64, ThetaPartition) {
        let params = CodeParams::new(8, 2, 8, 32, Flavor::Complex).unwrap();
        let model = FadingModel::rayleigh(1.0, Flavor::Complex).unwrap();
        let sigma2 = 0.1; // 10 dB
        (params, model, sigma2, ThetaPartition::uniform(20))
    }

    #[test]
    fn greedy_reproduces_tail_only_trajectory() {
        let (params, model, sigma2, partition) = fig2_setup();
        let (pattern, trajectory) =
            greedy_pattern(&params, &model, sigma2, &partition, 3, 19).unwrap();
        assert_eq!(pattern.ells(), &[3, 3, 3, 10]);
        let expected: Vec<Vec<u32>> = (3..=10).map(|t| vec![3, 3, 3, t]).collect();
        assert_eq!(trajectory, expected);
    }

    #[test]
    fn greedy_zero_iterations_returns_initialization() {
        let (params, model, sigma2, partition) = fig2_setup();
        let (pattern, trajectory) =
            greedy_pattern(&params, &model, sigma2, &partition, 3, 12).unwrap();
        assert_eq!(pattern.ells(), &[3, 3, 3, 3]);
        assert_eq!(trajectory.len(), 1);
    }

    #[test]
    fn greedy_rejects_infeasible_budget() {
        let (params, model, sigma2, partition) = fig2_setup();
        assert_eq!(
            greedy_pattern(&params, &model, sigma2, &partition, 3, 11).unwrap_err(),
            Error::InfeasibleBudget { need: 12, budget: 11 }
        );
    }

    #[test]
    fn greedy_matches_direct_ttp() {
        let (params, model, _, partition) = fig2_setup();
        for sigma2 in [1.0, 0.1, 0.01] {
            let (pattern, _) =
                greedy_pattern(&params, &model, sigma2, &partition, 2, 15).unwrap();
            let ttp = ttp_pattern(&TransmissionPattern::uniform(2, 4), 7);
            assert_eq!(pattern, ttp, "sigma2 = {sigma2}");
        }
    }

    #[test]
    fn ttp_examples() {
        let base = TransmissionPattern::new(vec![3, 3, 3, 3]).unwrap();
        assert_eq!(ttp_pattern(&base, 7).ells(), &[3, 3, 3, 10]);
        assert_eq!(ttp_pattern(&base, 0), base);
    }

    #[test]
    fn ttp_tails_dominate_any_same_budget_pattern() {
        // L*_a - L_a = sum_{i < a} delta_i >= 0, pure arithmetic.
        let base = TransmissionPattern::new(vec![2, 2, 2, 2]).unwrap();
        let ttp = ttp_pattern(&base, 6);
        let others = [
            vec![4, 4, 4, 2],
            vec![2, 6, 2, 4],
            vec![8, 2, 2, 2],
            vec![2, 2, 2, 8],
        ];
        for ells in others {
            let other = TransmissionPattern::new(ells).unwrap();
            assert_eq!(other.total(), ttp.total());
            for (ta, tb) in ttp.tails().iter().zip(other.tails()) {
                assert!(*ta >= tb, "{ttp} vs {other}");
            }
        }
    }

    #[test]
    fn brute_force_prefers_ttp() {
        let (params, model, sigma2, partition) = fig2_setup();
        let (best, value) =
            brute_force_best_pattern(&params, &model, sigma2, &partition, 12).unwrap();
        assert_eq!(best.ells(), &[1, 1, 1, 9]);
        assert!(value > 0.0 && value < 1.0);
    }

    #[test]
    fn brute_force_unique_composition_at_minimum_budget() {
        let (params, model, sigma2, partition) = fig2_setup();
        let (best, _) = brute_force_best_pattern(&params, &model, sigma2, &partition, 4).unwrap();
        assert_eq!(best.ells(), &[1, 1, 1, 1]);
    }

    #[test]
    fn brute_force_guard_trips() {
        let params = CodeParams::new(24, 2, 4, 32, Flavor::Complex).unwrap();
        let model = FadingModel::rayleigh(1.0, Flavor::Complex).unwrap();
        let partition = ThetaPartition::uniform(5);
        // C(199, 11) is astronomically beyond the guard.
        let err = brute_force_best_pattern(&params, &model, 0.1, &partition, 200).unwrap_err();
        assert!(matches!(err, Error::EnumerationGuard { .. }));
    }

    #[test]
    fn brute_force_at_most_greedy() {
        let (params, model, sigma2, partition) = fig2_setup();
        let noise = NoiseSpec::new(sigma2).unwrap();
        let engine = BoundEngine::new(&params, &model, &noise, Some(&partition)).unwrap();
        let (greedy, _) = greedy_pattern(&params, &model, sigma2, &partition, 1, 12).unwrap();
        let greedy_pe = engine.evaluate(BoundKind::Refined, &greedy).unwrap().p_e;
        let (_, brute_pe) =
            brute_force_best_pattern(&params, &model, sigma2, &partition, 12).unwrap();
        assert!(brute_pe <= greedy_pe);
    }

    #[test]
    fn segmentwise_epsilon_dominance_of_ttp() {
        let (params, model, sigma2, partition) = fig2_setup();
        let noise = NoiseSpec::new(sigma2).unwrap();
        let engine = BoundEngine::new(&params, &model, &noise, Some(&partition)).unwrap();
        let ttp = ttp_pattern(&TransmissionPattern::uniform(1, 4), 8);
        let other = TransmissionPattern::new(vec![3, 3, 3, 3]).unwrap();
        let e_ttp = engine.evaluate(BoundKind::Refined, &ttp).unwrap().epsilons;
        let e_other = engine.evaluate(BoundKind::Refined, &other).unwrap().epsilons;
        for (a, (x, y)) in e_ttp.iter().zip(&e_other).enumerate() {
            assert!(x <= y, "a = {}: {x} > {y}", a + 1);
        }
    }
}
