//! Predicates equivalent to the socle being central, the extremal corner
//! dimension predicates, and a harness checking that they agree.

use std::borrow::Cow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{mix_seed, Algebra, Element, RandomProfile};
use crate::error::Result;
use crate::ideal::{center_dim, corner_dim};
use crate::spectral::{rank, riesz_projection};
use crate::wedderburn::attach_decomposition;

/// Default sample count of the sampled predicates.
pub const TRIALS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremalMode {
    /// `dim pAp = rank(p)`.
    Lower,
    /// `dim pAp = rank(p)^2`.
    Upper,
}

#[derive(Debug, Clone, Serialize)]
pub struct PredicateResult {
    pub name: &'static str,
    pub value: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HarnessReport {
    pub blocks: usize,
    pub predicates: Vec<PredicateResult>,
    pub lower_unanimous: bool,
    pub upper_matches_single_block: bool,
    pub consistent: bool,
}

fn result(name: &'static str, value: bool, witness: Option<Value>) -> PredicateResult {
    PredicateResult { name, value, witness }
}

/// `Z(A) = A`.
pub fn pred_central(alg: &Algebra) -> PredicateResult {
    let value = center_dim(alg) == alg.dim();
    let witness = if value { None } else { noncommuting_pair(alg) };
    result("central", value, witness)
}

fn noncommuting_pair(alg: &Algebra) -> Option<Value> {
    let basis = alg.basis_elements();
    let bound = alg.tol().residual_tol * alg.mult_bound();
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            let c = alg.commutator(&basis[i], &basis[j]).norm();
            if c > bound && best.is_none_or(|b| c > b.2) {
                best = Some((i, j, c));
            }
        }
    }
    best.map(|(i, j, c)| json!({"basis_pair": [i, j], "commutator_norm": c}))
}

/// `[e_i, e_j] = 0` for every basis pair.
pub fn pred_commutators_trivial(alg: &Algebra) -> PredicateResult {
    let w = noncommuting_pair(alg);
    result("commutators_trivial", w.is_none(), w)
}

/// No nonzero square-zero element: every block is `1x1`.
pub fn pred_square_zero(alg: &Algebra) -> Result<PredicateResult> {
    let iso = alg.iso()?;
    match iso.sizes.iter().position(|&n| n >= 2) {
        None => Ok(result("no_square_zero", true, None)),
        Some(b) => {
            let x = iso.unit(b, 0, 1);
            let square = alg.mul(&x, &x).norm();
            Ok(result(
                "no_square_zero",
                false,
                Some(json!({"element": x, "block": b, "norm": x.norm(), "square_norm": square})),
            ))
        }
    }
}

fn corner_rank_violation(alg: &Algebra, a: &Element) -> Result<Option<Value>> {
    let dim = corner_dim(alg, a)?;
    let r = rank(alg, a)?;
    Ok((dim != r).then(|| json!({"element": a, "corner_dim": dim, "rank": r})))
}

/// `dim aAa = rank(a)` over basis elements and random dense and low-rank
/// samples.
pub fn pred_corner_rank(alg: &Algebra, trials: usize, seed: u64) -> Result<PredicateResult> {
    for e in alg.basis_elements() {
        if let Some(w) = corner_rank_violation(alg, &e)? {
            return Ok(result("corner_rank", false, Some(w)));
        }
    }
    let sizes = alg.block_sizes()?;
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 31));
    for t in 0..trials {
        let dense = alg.random_element(mix_seed(seed, 2 * t as u64), RandomProfile::Dense);
        let ranks: Vec<usize> = sizes.iter().map(|&n| rng.random_range(0..=n.min(1))).collect();
        let low = alg.random_element_with_ranks(mix_seed(seed, 2 * t as u64 + 1), &ranks)?;
        for a in [dense, low] {
            if let Some(w) = corner_rank_violation(alg, &a)? {
                return Ok(result("corner_rank", false, Some(w)));
            }
        }
    }
    Ok(result("corner_rank", true, None))
}

/// Sampled projections: Riesz projections of random elements at random
/// subsets of their nonzero spectrum, always including the full set.
pub fn sample_projections(alg: &Algebra, trials: usize, seed: u64) -> Result<Vec<Element>> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 77));
    let mut out = Vec::with_capacity(2 * trials);
    for t in 0..trials {
        let a = alg.random_element(mix_seed(seed, 5000 + t as u64), RandomProfile::Dense);
        let values = alg.spectrum(&a)?.nonzero_values();
        if values.is_empty() {
            continue;
        }
        out.push(riesz_projection(alg, &a, &values)?);
        let subset: Vec<_> = values.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
        if !subset.is_empty() && subset.len() < values.len() {
            out.push(riesz_projection(alg, &a, &subset)?);
        }
    }
    Ok(out)
}

/// `dim pAp = rank(p)` (lower) or `rank(p)^2` (upper) over sampled
/// projections.
pub fn pred_extremal_dims(alg: &Algebra, mode: ExtremalMode, trials: usize, seed: u64) -> Result<PredicateResult> {
    let name = match mode {
        ExtremalMode::Lower => "extremal_lower",
        ExtremalMode::Upper => "extremal_upper",
    };
    for p in sample_projections(alg, trials, seed)? {
        let dim = corner_dim(alg, &p)?;
        let r = rank(alg, &p)?;
        let expected = match mode {
            ExtremalMode::Lower => r,
            ExtremalMode::Upper => r * r,
        };
        if dim != expected {
            return Ok(result(name, false, Some(json!({"projection": p, "corner_dim": dim, "rank": r}))));
        }
    }
    Ok(result(name, true, None))
}

/// Evaluates every predicate and checks the expected equivalence pattern.
/// Structure presentations are decomposed first.
pub fn equivalence_harness(alg: &Algebra, seed: u64) -> Result<HarnessReport> {
    let alg: Cow<'_, Algebra> = if alg.has_iso() {
        Cow::Borrowed(alg)
    } else {
        let mut owned = alg.clone();
        attach_decomposition(&mut owned, seed)?;
        Cow::Owned(owned)
    };
    let alg = alg.as_ref();
    let blocks = alg.block_sizes()?.len();
    let lower = vec![
        pred_central(alg),
        pred_square_zero(alg)?,
        pred_corner_rank(alg, TRIALS, seed)?,
        pred_commutators_trivial(alg),
        pred_extremal_dims(alg, ExtremalMode::Lower, TRIALS, seed)?,
    ];
    let upper = pred_extremal_dims(alg, ExtremalMode::Upper, TRIALS, seed)?;
    let lower_unanimous = lower.iter().all(|p| p.value == lower[0].value);
    let upper_matches_single_block = upper.value == (blocks == 1);
    let mut predicates = lower;
    predicates.push(upper);
    Ok(HarnessReport {
        blocks,
        predicates,
        lower_unanimous,
        upper_matches_single_block,
        consistent: lower_unanimous && upper_matches_single_block,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::scramble;
    use crate::linalg::Tolerance;

    fn blocks(sizes: &[usize]) -> Algebra {
        Algebra::blocks(sizes, Tolerance::default()).unwrap()
    }

    #[test]
    fn central_examples() {
        assert!(pred_central(&blocks(&[1, 1, 1])).value);
        assert!(!pred_central(&blocks(&[2])).value);
        let r = pred_central(&blocks(&[2, 1]));
        assert!(!r.value && r.witness.is_some());
    }

    #[test]
    fn square_zero_examples() {
        assert!(pred_square_zero(&blocks(&[1, 1])).unwrap().value);
        let m2 = blocks(&[2]);
        let r = pred_square_zero(&m2).unwrap();
        assert!(!r.value);
        let (mut s, _, _) = scramble(&blocks(&[3, 1]), 4).unwrap();
        attach_decomposition(&mut s, 4).unwrap();
        let r = pred_square_zero(&s).unwrap();
        assert!(!r.value);
        let w = r.witness.unwrap();
        assert!(w["square_norm"].as_f64().unwrap() < 1e-8 * w["norm"].as_f64().unwrap());
    }

    #[test]
    fn corner_rank_examples() {
        assert!(pred_corner_rank(&blocks(&[1, 1]), 16, 0).unwrap().value);
        assert!(!pred_corner_rank(&blocks(&[2]), 16, 0).unwrap().value);
        let m2 = blocks(&[2]);
        assert!(corner_rank_violation(&m2, &m2.zero()).unwrap().is_none());
    }

    #[test]
    fn commutator_examples() {
        assert!(pred_commutators_trivial(&blocks(&[1, 1, 1])).value);
        assert!(!pred_commutators_trivial(&blocks(&[2])).value);
        let (s, _, _) = scramble(&blocks(&[1, 1]), 2).unwrap();
        assert!(pred_commutators_trivial(&s).value);
    }

    #[test]
    fn extremal_examples() {
        let a = blocks(&[1, 1]);
        assert!(pred_extremal_dims(&a, ExtremalMode::Lower, 8, 0).unwrap().value);
        assert!(!pred_extremal_dims(&a, ExtremalMode::Upper, 8, 0).unwrap().value);
        let m2 = blocks(&[2]);
        assert!(pred_extremal_dims(&m2, ExtremalMode::Upper, 8, 0).unwrap().value);
        assert!(!pred_extremal_dims(&blocks(&[2, 2]), ExtremalMode::Upper, 8, 0).unwrap().value);
    }

    #[test]
    fn harness_examples() {
        for (sizes, lower, upper) in [(vec![1, 1], true, false), (vec![2], false, true), (vec![2, 1], false, false)] {
            let r = equivalence_harness(&blocks(&sizes), 0).unwrap();
            assert!(r.consistent, "{sizes:?}: {r:?}");
            assert!(r.predicates[..5].iter().all(|p| p.value == lower));
            assert_eq!(r.predicates[5].value, upper);
        }
    }
}
