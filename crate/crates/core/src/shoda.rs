//! Commutators: the classical matrix construction, per-ideal membership in
//! the commutator space, and commutator factorizations of socle elements.

use serde::Serialize;

use crate::algebra::{Algebra, Element};
use crate::error::{Result, SocleError};
use crate::ideal::corner_dim;
use crate::linalg::{eigenvalues, inverse, CMatrix, Tolerance, C64, ONE, ZERO};
use crate::spectral::{block_traces, rank, socle_decompose, trace};

#[derive(Debug, Clone, Serialize)]
pub struct CommutatorCert {
    pub x: Element,
    pub y: Element,
    pub target: Element,
    pub residual: f64,
    pub rank_x: usize,
    pub rank_y: usize,
    pub rank_target: usize,
    /// `rank_x, rank_y <= rank(target)`.
    pub rank_bound_holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Membership {
    pub member: bool,
    /// Trace of each block component.
    pub traces: Vec<C64>,
}

fn commutator(x: &CMatrix, y: &CMatrix) -> CMatrix {
    &(x * y) - &(y * x)
}

/// Index of the column with the largest off-diagonal mass.
fn best_column(m: &CMatrix) -> (usize, f64) {
    let n = m.rows();
    (0..n)
        .map(|j| {
            let mass: f64 = (0..n).filter(|&i| i != j).map(|i| m[(i, j)].norm_sqr()).sum();
            (j, mass.sqrt())
        })
        .fold((0, -1.0), |best, c| if c.1 > best.1 { c } else { best })
}

/// Completes `vs` to a basis of `C^n` with standard vectors, greedily by
/// largest residual.
fn complete_basis(vs: Vec<Vec<C64>>, n: usize) -> CMatrix {
    let mut cols = vs;
    let mut ortho: Vec<Vec<C64>> = Vec::new();
    let orth = |v: &[C64], ortho: &[Vec<C64>]| -> Vec<C64> {
        let mut r = v.to_vec();
        for q in ortho {
            let c: C64 = q.iter().zip(&r).map(|(a, b)| a.conj() * b).sum();
            r.iter_mut().zip(q).for_each(|(x, qi)| *x -= c * qi);
        }
        r
    };
    for v in &cols {
        let r = orth(v, &ortho);
        let nr = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        ortho.push(r.into_iter().map(|z| z / nr).collect());
    }
    while cols.len() < n {
        let (k, r) = (0..n)
            .map(|k| {
                let mut e = vec![ZERO; n];
                e[k] = ONE;
                (k, orth(&e, &ortho))
            })
            .max_by(|a, b| {
                let na: f64 = a.1.iter().map(|z| z.norm_sqr()).sum();
                let nb: f64 = b.1.iter().map(|z| z.norm_sqr()).sum();
                na.total_cmp(&nb)
            })
            .expect("n > 0");
        let nr = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        ortho.push(r.into_iter().map(|z| z / nr).collect());
        let mut e = vec![ZERO; n];
        e[k] = ONE;
        cols.push(e);
    }
    CMatrix::from_columns(n, &cols)
}

/// Invertible `S` such that `S m S^{-1}` has zero diagonal (`m` traceless).
pub fn zero_diagonal_similarity(m: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(SocleError::Dimension("zero-diagonal similarity needs a square matrix".into()));
    }
    let n = m.rows();
    let norm = m.norm_fro();
    if m.trace().norm() > tol.residual_tol * norm.max(f64::MIN_POSITIVE) {
        return Err(SocleError::Precondition(format!("matrix has nonzero trace {}", m.trace())));
    }
    let s = zero_diag_rec(m, tol, norm)?;
    let z = &(&s * m) * &inverse(&s, tol)?.ok_or(SocleError::Singular)?;
    let worst = (0..n).map(|i| z[(i, i)].norm()).fold(0.0, f64::max);
    if worst > tol.residual_tol * norm.max(1.0) {
        return Err(SocleError::Numeric(format!("zero-diagonal similarity left {worst:.3e} on the diagonal")));
    }
    Ok(s)
}

fn zero_diag_rec(m: &CMatrix, tol: &Tolerance, scale: f64) -> Result<CMatrix> {
    let n = m.rows();
    let small = tol.residual_tol * scale.max(f64::MIN_POSITIVE) * 1e-2;
    if n == 0 || (0..n).all(|i| m[(i, i)].norm() <= small) {
        return Ok(CMatrix::identity(n));
    }
    let mean = m.trace() / n as f64;
    let dev = m.shifted(mean).norm_fro();
    if dev <= small {
        // traceless scalar: numerically zero
        return Ok(CMatrix::identity(n));
    }
    let (j, mass) = best_column(m);
    let v: Vec<C64> = if mass > small {
        let mut e = vec![ZERO; n];
        e[j] = ONE;
        e
    } else {
        // diagonal, not scalar: mix the two most different diagonal entries
        let (mut bi, mut bj, mut gap) = (0, 1, -1.0);
        for i in 0..n {
            for k in (i + 1)..n {
                let g = (m[(i, i)] - m[(k, k)]).norm();
                if g > gap {
                    (bi, bj, gap) = (i, k, g);
                }
            }
        }
        let mut e = vec![ZERO; n];
        e[bi] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        e[bj] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        e
    };
    let mv = m.matvec(&v)?;
    let nmv = mv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let w: Vec<C64> = mv.iter().map(|z| z / nmv).collect();
    let p = complete_basis(vec![v, w], n);
    let pinv = inverse(&p, tol)?.ok_or(SocleError::Singular)?;
    let c = &(&pinv * m) * &p;
    let inner = zero_diag_rec(&c.submatrix(1, n, 1, n), tol, scale)?;
    let mut lift = CMatrix::identity(n);
    for i in 1..n {
        for k in 1..n {
            lift[(i, k)] = inner[(i - 1, k - 1)];
        }
    }
    Ok(&lift * &pinv)
}

/// `(X, Y)` with `XY - YX = m` for a traceless square matrix.
pub fn shoda_matrix(m: &CMatrix, tol: &Tolerance) -> Result<(CMatrix, CMatrix)> {
    if !m.is_square() || m.rows() == 0 {
        return Err(SocleError::Dimension("Shoda needs a nonempty square matrix".into()));
    }
    let n = m.rows();
    let norm = m.norm_fro();
    if norm == 0.0 {
        return Ok((CMatrix::zeros(n, n), CMatrix::zeros(n, n)));
    }
    if m.trace().norm() > tol.residual_tol * norm {
        return Err(SocleError::Precondition(format!("matrix has nonzero trace {}", m.trace())));
    }
    let s = zero_diagonal_similarity(m, tol)?;
    let sinv = inverse(&s, tol)?.ok_or(SocleError::Singular)?;
    let z = &(&s * m) * &sinv;
    let x0 = CMatrix::diag(&(1..=n).map(|i| C64::new(i as f64, 0.0)).collect::<Vec<_>>());
    let y0 = CMatrix::from_fn(n, n, |i, j| if i == j { ZERO } else { z[(i, j)] / (i as f64 - j as f64) });
    let x = &(&sinv * &x0) * &s;
    let y = &(&sinv * &y0) * &s;
    let residual = commutator(&x, &y).try_sub(m)?.norm_fro();
    if residual > tol.residual_tol * norm.max(1.0) {
        return Err(SocleError::Numeric(format!("Shoda residual {residual:.3e}")));
    }
    Ok((x, y))
}

/// Membership in the commutator space: every block component traceless.
pub fn in_commutator_space(alg: &Algebra, a: &Element) -> Result<Membership> {
    alg.check(a)?;
    let iso = alg.iso()?;
    let mut traces = Vec::with_capacity(iso.sizes.len());
    for b in 0..iso.sizes.len() {
        let comp = alg.mul(a, &iso.block_identity(b));
        traces.push(trace(alg, &comp)?);
    }
    let bound = alg.tol().residual_tol * a.norm().max(1.0);
    let member = traces.iter().all(|t| t.norm() <= bound);
    Ok(Membership { member, traces })
}

/// Coordinates of the corner `pAp` for `p = p_1 + ... + p_k` (orthogonal
/// minimal projections of one block): matrix units with `e_jj = p_j`.
fn corner_units(alg: &Algebra, ps: &[Element]) -> Result<Vec<Vec<Element>>> {
    let k = ps.len();
    let basis = alg.basis_elements();
    let pick = |l: &Element, r: &Element| -> Element {
        basis.iter().map(|x| alg.mul3(l, x, r)).max_by(|a, b| a.norm().total_cmp(&b.norm())).expect("nonempty basis")
    };
    let p1 = &ps[0];
    let mut first_row = vec![p1.clone()];
    let mut first_col = vec![p1.clone()];
    for pj in &ps[1..] {
        let w1j = pick(p1, pj);
        let wj1 = pick(pj, p1);
        let c = inner_coef(p1, &alg.mul(&w1j, &wj1));
        if w1j.norm() == 0.0 || c.norm() <= alg.tol().rank_tol * w1j.norm() * wj1.norm() {
            return Err(SocleError::Numeric("projections do not share a block".into()));
        }
        first_row.push(w1j);
        first_col.push(wj1.scaled(c.inv()));
    }
    Ok((0..k).map(|i| (0..k).map(|j| alg.mul(&first_col[i], &first_row[j])).collect()).collect())
}

fn inner_coef(p: &Element, x: &Element) -> C64 {
    let num: C64 = p.coords().iter().zip(x.coords()).map(|(a, b)| a.conj() * b).sum();
    num / p.norm().powi(2)
}

fn combine(alg: &Algebra, units: &[Vec<Element>], m: &CMatrix) -> Element {
    let mut acc = alg.zero();
    for (i, row) in units.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            acc = acc.plus(&e.scaled(m[(i, j)]));
        }
    }
    acc
}

/// `[x, y] = a` for `a` supported in a single minimal ideal, by the corner
/// construction around `p = sum p_j` from a diagonalization of `a`.
fn corner_factor(alg: &Algebra, a: &Element, seed: u64) -> Result<(Element, Element)> {
    let d = socle_decompose(alg, a, seed)?;
    let ps: Vec<Element> = d.terms.iter().map(|(_, p)| p.clone()).collect();
    let units = corner_units(alg, &ps)?;
    let k = ps.len();
    let p = ps.iter().fold(alg.zero(), |acc, q| acc.plus(q));
    let pap = alg.mul3(&p, a, &p);
    let coeffs = CMatrix::from_fn(k, k, |i, j| inner_coef(&units[0][0], &alg.mul3(&units[0][i], &pap, &units[j][0])));
    // membership already certified Tr(pap) = Tr(a) = 0; drop the rounding
    let coeffs = coeffs.shifted(coeffs.trace() / k as f64);
    let tol = alg.tol();
    let (xm, ym) = shoda_matrix(&coeffs, tol)?;
    let rho = eigenvalues(&ym)?.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let lambda = C64::new(2.0 * (1.0 + rho), 0.0);
    let shifted = ym.try_add(&CMatrix::identity(k).scale(lambda))?;
    let w = inverse(&shifted, tol)?.ok_or(SocleError::Singular)?;
    let r = a.minus(&pap);
    let x = combine(alg, &units, &xm).plus(&alg.mul(&r, &combine(alg, &units, &w)));
    let y = combine(alg, &units, &shifted);
    Ok((x, y))
}

fn certify(alg: &Algebra, a: &Element, x: Element, y: Element) -> Result<CommutatorCert> {
    let residual = alg.commutator(&x, &y).distance(a);
    let rank_x = rank(alg, &x)?;
    let rank_y = rank(alg, &y)?;
    let rank_target = rank(alg, a)?;
    if residual > alg.tol().residual_tol * a.norm().max(1.0) {
        return Err(SocleError::Numeric(format!("commutator residual {residual:.3e}")));
    }
    Ok(CommutatorCert {
        x,
        y,
        target: a.clone(),
        residual,
        rank_x,
        rank_y,
        rank_target,
        rank_bound_holds: rank_x <= rank_target && rank_y <= rank_target,
    })
}

/// Commutator factorization of a member of the commutator space, assembled
/// from one corner construction per minimal ideal.
pub fn shoda_socle(alg: &Algebra, a: &Element, seed: u64) -> Result<CommutatorCert> {
    let membership = in_commutator_space(alg, a)?;
    if !membership.member {
        return Err(SocleError::NotInCommutatorSpace(membership.traces));
    }
    let iso = alg.iso()?;
    let mut x = alg.zero();
    let mut y = alg.zero();
    let floor = alg.tol().residual_tol * a.norm();
    for b in 0..iso.sizes.len() {
        let comp = alg.mul(a, &iso.block_identity(b));
        if comp.norm() <= floor {
            continue;
        }
        let (xb, yb) = corner_factor(alg, &comp, seed.wrapping_add(b as u64))?;
        if rank(alg, &xb)? > rank(alg, &comp)? || rank(alg, &yb)? > rank(alg, &comp)? {
            return Err(SocleError::Numeric(format!("rank bound violated in block {b}")));
        }
        x = x.plus(&xb);
        y = y.plus(&yb);
    }
    certify(alg, a, x, y)
}

/// The single-corner route, available when `dim aAa = rank(a)^2`.
pub fn corner_square_route(alg: &Algebra, a: &Element, seed: u64) -> Result<Option<CommutatorCert>> {
    alg.check(a)?;
    if a.norm() == 0.0 {
        return certify(alg, a, alg.zero(), alg.zero()).map(Some);
    }
    let tr = trace(alg, a)?;
    if tr.norm() > alg.tol().residual_tol * a.norm().max(1.0) {
        return Err(SocleError::Precondition(format!("element has nonzero trace {tr}")));
    }
    let r = rank(alg, a)?;
    if corner_dim(alg, a)? != r * r {
        return Ok(None);
    }
    let (x, y) = corner_factor(alg, a, seed)?;
    certify(alg, a, x, y).map(Some)
}

/// Per-block classical traces, exposed for reports.
pub fn component_traces(alg: &Algebra, a: &Element) -> Result<Vec<C64>> {
    block_traces(alg, a)
}
