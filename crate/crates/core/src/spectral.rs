//! Spectral rank, Riesz projections, multiplicities, trace and the
//! diagonalization of maximal finite-rank elements.

use serde::Serialize;

use crate::algebra::{mix_seed, Algebra, Element, RandomProfile};
use crate::error::{Result, SocleError};
use crate::linalg::{
    cluster_spectrum, contour_resolvent_integral, numerical_rank_scaled, spectral_projector, ContourWeight,
    SpectralCluster, C64, ZERO,
};
use crate::subspace::Subspace;

/// Default number of random multipliers in [`spectral_rank`].
pub const RANK_SAMPLES: usize = 32;
/// Retry cap of [`socle_decompose`].
pub const DECOMPOSE_RETRIES: usize = 32;

#[derive(Debug, Clone, Serialize)]
pub struct SpectralTerm {
    pub value: C64,
    pub multiplicity: usize,
    #[serde(skip)]
    pub riesz: Element,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralData {
    pub distinct: Vec<SpectralTerm>,
    pub includes_zero: bool,
    pub rank: usize,
}

#[derive(Debug, Clone)]
pub struct Diagonalization {
    /// Invertible element with `a = sum lambda_i u p_i`.
    pub u: Element,
    /// `u^{-1}`, the perturbation that made `v a` maximal.
    pub v: Element,
    pub terms: Vec<(C64, Element)>,
}

impl Diagonalization {
    pub fn reconstruct(&self, alg: &Algebra) -> Element {
        let mut acc = alg.zero();
        for (lambda, p) in &self.terms {
            acc = acc.plus(&alg.mul(&self.u, p).scaled(*lambda));
        }
        acc
    }
}

fn zero_radius(alg: &Algebra, a: &Element) -> f64 {
    alg.tol().cluster_tol * a.norm().max(1.0)
}

/// Number of distinct nonzero spectral values.
pub fn nonzero_spectrum_count(alg: &Algebra, a: &Element) -> Result<usize> {
    Ok(alg.spectrum(a)?.nonzero.len())
}

/// Sum of classical block ranks. Needs a decomposition for structure
/// presentations.
pub fn rank_direct(alg: &Algebra, a: &Element) -> Result<usize> {
    let blocks = alg.to_blocks(a)?;
    let scale = blocks.iter().map(|b| b.norm_fro().powi(2)).sum::<f64>().sqrt();
    Ok(blocks.iter().map(|b| numerical_rank_scaled(b, alg.tol().rank_tol, scale)).sum())
}

fn sampled_rank(alg: &Algebra, a: &Element, samples: usize, seed: u64) -> Result<usize> {
    let n = a.norm();
    if n == 0.0 {
        return Ok(0);
    }
    let a_hat = a.scaled(C64::new(1.0 / n, 0.0));
    let mut best = 0;
    for s in 0..samples {
        let x = alg.random_element(mix_seed(seed, s as u64), RandomProfile::Dense);
        let x = x.scaled(C64::new(1.0 / x.norm(), 0.0));
        best = best.max(nonzero_spectrum_count(alg, &alg.mul(&x, &a_hat))?);
    }
    Ok(best)
}

/// `max_x #sigma'(x a)` over `samples` random multipliers, cross-checked
/// against [`rank_direct`] whenever block structure is available.
pub fn spectral_rank(alg: &Algebra, a: &Element, samples: usize, seed: u64) -> Result<usize> {
    alg.check(a)?;
    if samples == 0 {
        return Err(SocleError::Precondition("samples must be at least 1".into()));
    }
    let sampled = sampled_rank(alg, a, samples, seed)?;
    if alg.has_iso() {
        let direct = rank_direct(alg, a)?;
        if direct != sampled {
            return Err(SocleError::RankSamplingFailed { sampled, direct });
        }
    }
    Ok(sampled)
}

/// Rank through the cheapest certified route.
pub fn rank(alg: &Algebra, a: &Element) -> Result<usize> {
    alg.check(a)?;
    if alg.has_iso() {
        rank_direct(alg, a)
    } else {
        sampled_rank(alg, a, RANK_SAMPLES, 0)
    }
}

pub fn is_in_e(alg: &Algebra, a: &Element, x: &Element) -> Result<bool> {
    Ok(nonzero_spectrum_count(alg, &alg.mul(x, a))? == rank(alg, a)?)
}

pub fn is_maximal_rank(alg: &Algebra, a: &Element) -> Result<bool> {
    is_in_e(alg, a, &alg.one())
}

/// Clusters of the raw eigenvalues and the indices of the requested ones.
fn select_clusters(alg: &Algebra, a: &Element, lambdas: &[C64]) -> Result<(Vec<SpectralCluster>, Vec<bool>)> {
    let (values, _) = alg.raw_eigenvalues(a)?;
    let clusters = cluster_spectrum(&values, alg.tol());
    let zr = zero_radius(alg, a);
    let mut chosen = vec![false; clusters.len()];
    for &lambda in lambdas {
        let hit = clusters
            .iter()
            .enumerate()
            .filter(|(_, c)| c.value.norm() > zr)
            .map(|(i, c)| (i, (c.value - lambda).norm()))
            .filter(|&(_, d)| d <= alg.tol().cluster_tol)
            .min_by(|x, y| x.1.total_cmp(&y.1));
        match hit {
            Some((i, _)) if lambda.norm() > zr => chosen[i] = true,
            _ => return Err(SocleError::BadSpectralValue(lambda)),
        }
    }
    Ok((clusters, chosen))
}

fn nearest_cluster(clusters: &[SpectralCluster], mu: C64) -> usize {
    (0..clusters.len())
        .min_by(|&i, &j| (clusters[i].value - mu).norm().total_cmp(&(clusters[j].value - mu).norm()))
        .unwrap_or(0)
}

/// Riesz projection of `a` at a set of nonzero spectral values, computed
/// from ordered Schur forms (per block, or of the left regular matrix
/// applied to the unit).
pub fn riesz_projection(alg: &Algebra, a: &Element, lambdas: &[C64]) -> Result<Element> {
    alg.check(a)?;
    let (clusters, chosen) = select_clusters(alg, a, lambdas)?;
    let select = |mu: C64| chosen[nearest_cluster(&clusters, mu)];
    let p = if alg.is_blocks() {
        let blocks = alg.to_blocks(a)?.iter().map(|b| spectral_projector(b, select)).collect::<Result<Vec<_>>>()?;
        alg.from_blocks(&blocks)?
    } else {
        let proj = spectral_projector(&alg.left_regular_matrix(a), select)?;
        Element::from_coords(proj.matvec(alg.one().coords())?)
    };
    let residual = alg.mul(&p, &p).distance(&p);
    let scale = p.norm().max(1.0).powi(2) * alg.mult_bound();
    if residual > alg.tol().residual_tol * scale {
        return Err(SocleError::Numeric(format!("Riesz projection idempotency residual {residual:.3e}")));
    }
    Ok(p)
}

/// Riesz projection by trapezoid contour integration of the resolvent
/// (independent of the Schur path).
pub fn riesz_projection_contour(alg: &Algebra, a: &Element, lambdas: &[C64], nodes: usize) -> Result<Element> {
    alg.check(a)?;
    let (clusters, chosen) = select_clusters(alg, a, lambdas)?;
    let mut acc = alg.zero();
    for (i, c) in clusters.iter().enumerate() {
        if !chosen[i] {
            continue;
        }
        let gap = clusters
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, o)| (o.value - c.value).norm())
            .chain(std::iter::once(c.value.norm()))
            .fold(f64::INFINITY, f64::min);
        let radius = if gap.is_finite() { gap / 2.0 } else { 1.0 };
        let part = if alg.is_blocks() {
            let blocks = alg
                .to_blocks(a)?
                .iter()
                .map(|b| contour_resolvent_integral(b, c.value, radius, ContourWeight::One, nodes, alg.tol()))
                .collect::<Result<Vec<_>>>()?;
            alg.from_blocks(&blocks)?
        } else {
            let l = alg.left_regular_matrix(a);
            let r = contour_resolvent_integral(&l, c.value, radius, ContourWeight::One, nodes, alg.tol())?;
            Element::from_coords(r.matvec(alg.one().coords())?)
        };
        acc = acc.plus(&part);
    }
    Ok(acc)
}

/// Multiplicity `m(lambda, a)`: Riesz rank for nonzero values, and the
/// bookkeeping remainder `rank + 1 - sum` at zero.
pub fn multiplicity(alg: &Algebra, a: &Element, lambda: C64) -> Result<usize> {
    let data = spectral_data(alg, a)?;
    let zr = zero_radius(alg, a);
    data.distinct
        .iter()
        .find(|t| {
            if lambda.norm() <= zr {
                t.value == ZERO
            } else {
                t.value != ZERO && (t.value - lambda).norm() <= alg.tol().cluster_tol
            }
        })
        .map(|t| t.multiplicity)
        .ok_or(SocleError::BadSpectralValue(lambda))
}

/// Distinct spectral values with multiplicities and Riesz projections.
pub fn spectral_data(alg: &Algebra, a: &Element) -> Result<SpectralData> {
    let spec = alg.spectrum(a)?;
    let r = rank(alg, a)?;
    let mut distinct = Vec::with_capacity(spec.nonzero.len() + 1);
    let mut total = 0;
    let mut sum_p = alg.zero();
    for c in &spec.nonzero {
        let p = riesz_projection(alg, a, &[c.value])?;
        let m = rank(alg, &p)?;
        if m == 0 {
            return Err(SocleError::Numeric(format!("Riesz projection at {} has rank 0", c.value)));
        }
        total += m;
        sum_p = sum_p.plus(&p);
        distinct.push(SpectralTerm { value: c.value, multiplicity: m, riesz: p });
    }
    if spec.includes_zero {
        if total > r {
            return Err(SocleError::Numeric(format!("nonzero multiplicities sum to {total} > rank {r}")));
        }
        distinct.push(SpectralTerm { value: ZERO, multiplicity: r + 1 - total, riesz: alg.one().minus(&sum_p) });
    } else if total != r {
        return Err(SocleError::Numeric(format!("invertible element: multiplicities sum to {total}, rank is {r}")));
    }
    Ok(SpectralData { distinct, includes_zero: spec.includes_zero, rank: r })
}

/// Per-block classical traces (via the decomposition for structures).
pub fn block_traces(alg: &Algebra, a: &Element) -> Result<Vec<C64>> {
    Ok(alg.to_blocks(a)?.iter().map(|b| b.trace()).collect())
}

/// `Tr(a) = sum lambda m(lambda, a)`, cross-checked against the classical
/// block traces when they are available.
pub fn trace(alg: &Algebra, a: &Element) -> Result<C64> {
    let data = spectral_data(alg, a)?;
    let tr: C64 = data.distinct.iter().map(|t| t.value * t.multiplicity as f64).sum();
    if alg.has_iso() {
        let classical: C64 = block_traces(alg, a)?.into_iter().sum();
        let scale = data.distinct.iter().map(|t| t.value.norm() * t.multiplicity as f64).sum::<f64>().max(1.0);
        let gap = (classical - tr).norm();
        // clustering error is bounded by cluster_tol per merged eigenvalue
        let allowance = alg.tol().residual_tol * scale + alg.tol().cluster_tol * alg.dim() as f64;
        if gap > allowance {
            return Err(SocleError::Numeric(format!("spectral trace {tr} disagrees with block trace {classical}")));
        }
    }
    Ok(tr)
}

/// Checks that `p` is a minimal projection (`dim pAp = 1`).
pub(crate) fn corner_is_line(alg: &Algebra, p: &Element) -> bool {
    corner_space(alg, p).dim() == 1
}

/// `span{a e_k a}` with a rounding-aware threshold.
pub fn corner_space(alg: &Algebra, a: &Element) -> Subspace {
    let prods: Vec<Element> = alg.basis_elements().iter().map(|x| alg.mul3(a, x, a)).collect();
    let scale = a.norm().powi(2) * alg.mult_bound().powi(2);
    Subspace::span_scaled(alg.dim(), &prods, alg.tol().rank_tol, scale)
}

/// `a = sum lambda_i p_i` for a maximal finite-rank element.
pub fn diagonalize_maximal(alg: &Algebra, a: &Element) -> Result<Vec<(C64, Element)>> {
    alg.check(a)?;
    if a.norm() == 0.0 {
        return Err(SocleError::Precondition("cannot diagonalize the zero element".into()));
    }
    let spec = alg.spectrum(a)?;
    let r = rank(alg, a)?;
    if spec.nonzero.len() != r {
        return Err(SocleError::Precondition(format!(
            "element is not of maximal rank (#nonzero spectrum {} < rank {r})",
            spec.nonzero.len()
        )));
    }
    let mut terms = Vec::with_capacity(r);
    for c in &spec.nonzero {
        let p = riesz_projection(alg, a, &[c.value])?;
        if !corner_is_line(alg, &p) {
            return Err(SocleError::Numeric(format!("Riesz projection at {} is not minimal", c.value)));
        }
        terms.push((c.value, p));
    }
    let mut rebuilt = alg.zero();
    let mut scale = a.norm();
    for (lambda, p) in &terms {
        rebuilt = rebuilt.plus(&p.scaled(*lambda));
        scale = scale.max(lambda.norm() * p.norm());
    }
    let residual = rebuilt.distance(a);
    if residual > alg.tol().residual_tol * scale.max(1.0) {
        return Err(SocleError::Numeric(format!("diagonalization residual {residual:.3e}")));
    }
    Ok(terms)
}

/// Finds `v` near 1 with `v a` maximal of the same rank and returns
/// `a = sum lambda_i u p_i` with `u = v^{-1}`.
pub fn socle_decompose(alg: &Algebra, a: &Element, seed: u64) -> Result<Diagonalization> {
    alg.check(a)?;
    if a.norm() == 0.0 {
        return Err(SocleError::Precondition("cannot decompose the zero element".into()));
    }
    let r = rank(alg, a)?;
    let mut eps = 0.1;
    let mut last_err = String::from("no attempt succeeded");
    for attempt in 0..DECOMPOSE_RETRIES {
        let v = alg.random_element(mix_seed(seed, 1000 + attempt as u64), RandomProfile::NearIdentity(eps));
        eps /= 2.0;
        let va = alg.mul(&v, a);
        let attempt_result = (|| -> Result<Option<Diagonalization>> {
            if rank(alg, &va)? != r || !is_maximal_rank(alg, &va)? {
                return Ok(None);
            }
            let Some(u) = alg.is_invertible(&v)? else { return Ok(None) };
            let terms = diagonalize_maximal(alg, &va)?;
            let d = Diagonalization { u, v: v.clone(), terms };
            let residual = d.reconstruct(alg).distance(a);
            let scale = d
                .terms
                .iter()
                .map(|(l, p)| l.norm() * p.norm() * d.u.norm() * alg.mult_bound())
                .fold(a.norm(), f64::max);
            if residual > alg.tol().residual_tol * scale.max(1.0) {
                return Err(SocleError::Numeric(format!("reconstruction residual {residual:.3e}")));
            }
            Ok(Some(d))
        })();
        match attempt_result {
            Ok(Some(d)) => return Ok(d),
            Ok(None) => last_err = "perturbed element was not maximal".into(),
            Err(e) => last_err = e.to_string(),
        }
    }
    Err(SocleError::DecompositionFailed(format!("no maximal perturbation in {DECOMPOSE_RETRIES} attempts: {last_err}")))
}

/// `x` with `a x a = a`.
pub fn vn_regular_witness(alg: &Algebra, a: &Element, seed: u64) -> Result<Element> {
    alg.check(a)?;
    if a.norm() == 0.0 {
        return Ok(alg.zero());
    }
    let d = socle_decompose(alg, a, seed)?;
    let mut inv = alg.zero();
    for (lambda, p) in &d.terms {
        inv = inv.plus(&p.scaled(lambda.inv()));
    }
    let x = alg.mul(&inv, &d.v);
    let residual = alg.mul3(a, &x, a).distance(a);
    let scale = a.norm().powi(2) * x.norm() * alg.mult_bound().powi(2);
    if residual > alg.tol().residual_tol * scale.max(a.norm()) {
        return Err(SocleError::Numeric(format!("regularity residual {residual:.3e}")));
    }
    Ok(x)
}
