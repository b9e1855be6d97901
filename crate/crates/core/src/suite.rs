//! Seeded property sweeps behind `socle check`.

use std::ops::Range;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::algebra::{mix_seed, Algebra, Element, RandomProfile};
use crate::central::equivalence_harness;
use crate::error::{Result, SocleError};
use crate::ideal::{ideal_basis, is_minimal_projection, tensor_model_check};
use crate::instance::generate;
use crate::linalg::{CMatrix, Tolerance, C64};
use crate::report::Check;
use crate::shoda::{in_commutator_space, shoda_socle};
use crate::spectral::{
    block_traces, diagonalize_maximal, rank_direct, riesz_projection, riesz_projection_contour, spectral_data,
    spectral_rank, trace, RANK_SAMPLES,
};
use crate::wedderburn::{
    dual_bases, dual_bases_residual, harvest_minimal_projections, matrix_units, verify_iso, wedderburn_decompose,
};

/// Agreement required between the two Riesz projection paths.
pub const RIESZ_PATH_TOL: f64 = 1e-6;
/// Quadrature nodes of the contour path.
pub const CONTOUR_NODES: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Spectral,
    Ideals,
    Wedderburn,
    Shoda,
    Central,
    All,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "spectral" => Suite::Spectral,
            "ideals" => Suite::Ideals,
            "wedderburn" => Suite::Wedderburn,
            "shoda" => Suite::Shoda,
            "central" => Suite::Central,
            "all" => Suite::All,
            _ => return Err(format!("unknown suite {s:?}")),
        })
    }
}

impl Suite {
    fn parts(self) -> &'static [Suite] {
        match self {
            Suite::All => &[Suite::Spectral, Suite::Ideals, Suite::Wedderburn, Suite::Shoda, Suite::Central],
            Suite::Spectral => &[Suite::Spectral],
            Suite::Ideals => &[Suite::Ideals],
            Suite::Wedderburn => &[Suite::Wedderburn],
            Suite::Shoda => &[Suite::Shoda],
            Suite::Central => &[Suite::Central],
        }
    }
}

/// One JSON line of a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct InstanceReport {
    pub suite: Suite,
    pub sizes: Vec<usize>,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// Parses `"2,2;2,1"` into size profiles.
pub fn parse_profiles(s: &str) -> std::result::Result<Vec<Vec<usize>>, String> {
    s.split(';')
        .map(|profile| {
            let sizes = profile
                .split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|e| format!("bad size {t:?}: {e}")))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            if sizes.is_empty() || sizes.contains(&0) {
                return Err(format!("sizes must be positive in {profile:?}"));
            }
            Ok(sizes)
        })
        .collect()
}

/// Parses `"A..B"` (half open) or a single seed.
pub fn parse_seeds(s: &str) -> std::result::Result<Range<u64>, String> {
    let num = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("bad seed {t:?}: {e}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b)?);
            if a >= b {
                return Err(format!("empty seed range {s:?}"));
            }
            Ok(a..b)
        }
        None => {
            let a = num(s)?;
            Ok(a..a + 1)
        }
    }
}

/// Runs `suite` over every (profile, seed) in parallel; output order is
/// deterministic.
pub fn sweep(suite: Suite, profiles: &[Vec<usize>], seeds: Range<u64>, tol: Tolerance) -> Vec<InstanceReport> {
    let jobs: Vec<(Vec<usize>, u64)> =
        profiles.iter().flat_map(|p| seeds.clone().map(move |s| (p.clone(), s))).collect();
    jobs.into_par_iter().map(|(sizes, seed)| run_instance(suite, &sizes, seed, tol)).collect()
}

pub fn run_instance(suite: Suite, sizes: &[usize], seed: u64, tol: Tolerance) -> InstanceReport {
    let mut checks = Vec::new();
    for part in suite.parts() {
        let name = format!("{part:?}").to_lowercase();
        let outcome = match part {
            Suite::Spectral => spectral_checks(sizes, seed, tol),
            Suite::Ideals => ideal_checks(sizes, seed, tol),
            Suite::Wedderburn => wedderburn_checks(sizes, seed, tol),
            Suite::Shoda => shoda_checks(sizes, seed, tol),
            Suite::Central => central_checks(sizes, seed, tol),
            Suite::All => unreachable!(),
        };
        match outcome {
            Ok(mut c) => checks.append(&mut c),
            Err(e) => checks.push(Check::errored(name, &e)),
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    InstanceReport { suite, sizes: sizes.to_vec(), seed, checks, pass }
}

/// `a` minus its per-block trace, so every component is traceless.
pub fn traceless_part(alg: &Algebra, a: &Element) -> Result<Element> {
    let blocks: Vec<CMatrix> = alg
        .to_blocks(a)?
        .into_iter()
        .map(|b| {
            let t = b.trace() / b.rows() as f64;
            b.shifted(t)
        })
        .collect();
    alg.from_blocks(&blocks)
}

/// Random element with a random rank in every block.
pub fn random_low_rank(alg: &Algebra, seed: u64) -> Result<Element> {
    let sizes = alg.block_sizes()?;
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 404));
    let ranks: Vec<usize> = sizes.iter().map(|&n| rng.random_range(0..=n)).collect();
    alg.random_element_with_ranks(mix_seed(seed, 405), &ranks)
}

fn spectral_checks(sizes: &[usize], seed: u64, tol: Tolerance) -> Result<Vec<Check>> {
    let alg = Algebra::blocks(sizes, tol)?;
    let dense = alg.random_element(seed, RandomProfile::Dense);
    let low = random_low_rank(&alg, seed)?;
    let mut checks = Vec::new();
    for (label, a) in [("dense", &dense), ("low_rank", &low)] {
        let direct = rank_direct(&alg, a)?;
        let sampled = spectral_rank(&alg, a, RANK_SAMPLES, seed)?;
        checks.push(Check::new(
            format!("rank_oracle/{label}"),
            direct == sampled,
            None,
            || json!({"element": a, "direct": direct, "sampled": sampled}),
        ));
        let data = spectral_data(&alg, a)?;
        let total: usize = data.distinct.iter().map(|t| t.multiplicity).sum();
        let expected = data.rank + usize::from(data.includes_zero);
        checks.push(Check::new(
            format!("multiplicity_sum/{label}"),
            total == expected,
            None,
            || json!({"element": a, "sum": total, "expected": expected}),
        ));
        let tr = trace(&alg, a)?;
        let classical: C64 = block_traces(&alg, a)?.into_iter().sum();
        let gap = (tr - classical).norm() / a.norm().max(1.0);
        checks.push(Check::bounded(
            format!("trace/{label}"),
            gap,
            tol.cluster_tol * alg.dim() as f64,
            || json!({"element": a, "spectral": tr, "classical": classical}),
        ));
    }
    // dense elements are diagonalizable almost surely
    let values = alg.spectrum(&dense)?.nonzero_values();
    let mut worst: f64 = 0.0;
    for &lambda in &values {
        let schur = riesz_projection(&alg, &dense, &[lambda])?;
        let contour = riesz_projection_contour(&alg, &dense, &[lambda], CONTOUR_NODES)?;
        worst = worst.max(schur.distance(&contour));
    }
    checks.push(Check::bounded("riesz_dual_path", worst, RIESZ_PATH_TOL, || json!({"element": dense})));
    let (residual, orth, minimal) = diagonalization_residuals(&alg, &dense)?;
    checks.push(Check::bounded(
        "diagonalization/reconstruction",
        residual,
        tol.residual_tol,
        || json!({"element": dense}),
    ));
    checks.push(Check::bounded("diagonalization/orthogonality", orth, tol.residual_tol, || json!({"element": dense})));
    checks.push(Check::new("diagonalization/minimal", minimal, None, || json!({"element": dense})));
    Ok(checks)
}

/// Relative reconstruction residual, worst `|p_i p_j|` over `i != j`, and
/// whether every projection is minimal.
pub fn diagonalization_residuals(alg: &Algebra, a: &Element) -> Result<(f64, f64, bool)> {
    let terms = diagonalize_maximal(alg, a)?;
    let mut rebuilt = alg.zero();
    for (lambda, p) in &terms {
        rebuilt = rebuilt.plus(&p.scaled(*lambda));
    }
    let residual = rebuilt.distance(a) / a.norm().max(1.0);
    let mut orth: f64 = 0.0;
    let mut minimal = true;
    for (i, (_, p)) in terms.iter().enumerate() {
        minimal &= is_minimal_projection(alg, p)?;
        for (j, (_, q)) in terms.iter().enumerate() {
            if i != j {
                orth = orth.max(alg.mul(p, q).norm() / (p.norm() * q.norm()).max(1.0));
            }
        }
    }
    Ok((residual, orth, minimal))
}

fn ideal_checks(sizes: &[usize], seed: u64, tol: Tolerance) -> Result<Vec<Check>> {
    let alg = Algebra::blocks(sizes, tol)?;
    let mut checks = Vec::new();
    for (i, p) in harvest_minimal_projections(&alg, seed)?.iter().enumerate() {
        let t = tensor_model_check(&alg, p)?;
        checks.push(Check::new(
            format!("tensor_model/{i}"),
            t.pass,
            Some(t.product_residual),
            || json!({"projection": p, "report": t}),
        ));
        let cert = ideal_basis(&alg, p)?;
        let n = cert.block_index.map(|b| alg.block_sizes().map(|s| s[b])).transpose()?;
        let ok = cert.minimal && n.is_some_and(|n| cert.basis.dim() == n * n);
        checks.push(Check::new(
            format!("ideal_minimal/{i}"),
            ok,
            None,
            || json!({"projection": p, "dim": cert.basis.dim(), "block": cert.block_index}),
        ));
    }
    Ok(checks)
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

fn wedderburn_checks(sizes: &[usize], seed: u64, tol: Tolerance) -> Result<Vec<Check>> {
    let file = generate(sizes, seed, true, tol)?;
    let alg = file.algebra(tol)?;
    let iso = wedderburn_decompose(&alg, seed)?;
    let mut checks = vec![Check::new(
        "sizes_recovered",
        sorted(&iso.sizes) == sorted(sizes),
        None,
        || json!({"expected": sizes, "recovered": iso.sizes}),
    )];
    let report = verify_iso(&alg, &iso, seed)?;
    checks.push(Check::bounded("iso_multiplicative", report.worst(), tol.residual_tol, || json!(report)));
    for (i, p) in harvest_minimal_projections(&alg, mix_seed(seed, 1))?.iter().enumerate() {
        let d = dual_bases(&alg, p)?;
        let r = dual_bases_residual(&alg, &d);
        checks.push(Check::bounded(format!("dual_bases/{i}"), r, tol.residual_tol, || json!({"projection": p})));
        let mu = matrix_units(&alg, p, seed)?;
        checks.push(Check::bounded(
            format!("matrix_units/{i}"),
            mu.relation_residual,
            tol.residual_tol,
            || json!({"projection": p}),
        ));
    }
    Ok(checks)
}

fn shoda_checks(sizes: &[usize], seed: u64, tol: Tolerance) -> Result<Vec<Check>> {
    let alg = Algebra::blocks(sizes, tol)?;
    let mut checks = Vec::new();
    let x = traceless_part(&alg, &alg.random_element(seed, RandomProfile::Dense))?;
    let y = traceless_part(&alg, &random_low_rank(&alg, seed)?)?;
    let combo = x.plus(&y.scaled(C64::new(0.5, -1.5)));
    for (label, a) in [("dense", &x), ("low_rank", &y), ("combination", &combo)] {
        let member = in_commutator_space(&alg, a)?.member;
        let cert = shoda_socle(&alg, a, seed)?;
        let ok = member && cert.rank_bound_holds;
        checks.push(Check::new(
            format!("shoda/{label}"),
            ok && cert.residual <= tol.residual_tol,
            Some(cert.residual),
            || json!({"element": a, "member": member, "certificate": cert}),
        ));
    }
    let obstruction = obstruction_element(&alg)?;
    let member = in_commutator_space(&alg, &obstruction)?;
    let rejected = match shoda_socle(&alg, &obstruction, seed) {
        Err(SocleError::NotInCommutatorSpace(_)) => true,
        Err(e) => return Err(e),
        Ok(_) => false,
    };
    checks.push(Check::new(
        "obstruction_rejected",
        !member.member && rejected,
        None,
        || json!({"element": obstruction, "traces": member.traces}),
    ));
    Ok(checks)
}

/// `(e11, -e11, 0, ..)`: traceless overall but not per ideal. A single
/// block gets `e11`.
pub fn obstruction_element(alg: &Algebra) -> Result<Element> {
    let sizes = alg.block_sizes()?;
    let blocks: Vec<CMatrix> = sizes
        .iter()
        .enumerate()
        .map(|(b, &n)| {
            let s = match b {
                0 => 1.0,
                1 => -1.0,
                _ => 0.0,
            };
            CMatrix::from_fn(n, n, |i, j| if i == 0 && j == 0 { C64::new(s, 0.0) } else { C64::new(0.0, 0.0) })
        })
        .collect();
    alg.from_blocks(&blocks)
}

fn central_checks(sizes: &[usize], seed: u64, tol: Tolerance) -> Result<Vec<Check>> {
    let alg = Algebra::blocks(sizes, tol)?;
    let r = equivalence_harness(&alg, seed)?;
    Ok(vec![Check::new("equivalence_pattern", r.consistent, None, || json!(r))])
}
