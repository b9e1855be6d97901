//! Minimal projections and the two-sided ideals they generate.

use serde::Serialize;

use crate::algebra::{Algebra, Element};
use crate::error::{Result, SocleError};
use crate::linalg::{numerical_rank_scaled, CMatrix};
use crate::spectral::{corner_space, rank, trace};
use crate::subspace::Subspace;

#[derive(Debug, Clone)]
pub struct IdealCert {
    pub generator: Element,
    pub basis: Subspace,
    pub minimal: bool,
    pub block_index: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TensorReport {
    pub dim_ap: usize,
    pub dim_pa: usize,
    pub dim_jp: usize,
    /// Largest relative residual of the product rule over all basis pairs.
    pub product_residual: f64,
    pub pass: bool,
}

fn product_scale(alg: &Algebra, norms: &[f64]) -> f64 {
    norms.iter().product::<f64>() * alg.mult_bound().powi(norms.len() as i32 - 1)
}

/// Errors unless `p` is idempotent to tolerance.
pub fn check_projection(alg: &Algebra, p: &Element) -> Result<()> {
    alg.check(p)?;
    let residual = alg.mul(p, p).distance(p);
    let scale = product_scale(alg, &[p.norm(), p.norm()]).max(1.0);
    if residual > alg.tol().residual_tol * scale {
        return Err(SocleError::NotAProjection(residual));
    }
    Ok(())
}

/// `pAp = C p`.
pub fn is_minimal_projection(alg: &Algebra, p: &Element) -> Result<bool> {
    check_projection(alg, p)?;
    Ok(corner_space(alg, p).dim() == 1)
}

/// `dim aAa`.
pub fn corner_dim(alg: &Algebra, a: &Element) -> Result<usize> {
    alg.check(a)?;
    Ok(corner_space(alg, a).dim())
}

/// `dim pAq` for projections `p`, `q`.
pub fn pairwise_dim(alg: &Algebra, p: &Element, q: &Element) -> Result<usize> {
    check_projection(alg, p)?;
    check_projection(alg, q)?;
    let prods: Vec<Element> = alg.basis_elements().iter().map(|x| alg.mul3(p, x, q)).collect();
    let scale = product_scale(alg, &[p.norm(), 1.0, q.norm()]);
    Ok(Subspace::span_scaled(alg.dim(), &prods, alg.tol().rank_tol, scale).dim())
}

/// `span{e_k x}`, the left ideal `Ax`.
pub fn left_span(alg: &Algebra, x: &Element) -> Subspace {
    let v: Vec<Element> = alg.basis_elements().iter().map(|e| alg.mul(e, x)).collect();
    Subspace::span_scaled(alg.dim(), &v, alg.tol().rank_tol, product_scale(alg, &[x.norm(), 1.0]))
}

/// `span{x e_k}`, the right ideal `xA`.
pub fn right_span(alg: &Algebra, x: &Element) -> Subspace {
    let v: Vec<Element> = alg.basis_elements().iter().map(|e| alg.mul(x, e)).collect();
    Subspace::span_scaled(alg.dim(), &v, alg.tol().rank_tol, product_scale(alg, &[x.norm(), 1.0]))
}

/// Dimension of the center of the algebra spanned by `basis` inside `alg`
/// (elements of the span commuting with every algebra basis element).
fn central_dim(alg: &Algebra, basis: &[Element]) -> usize {
    if basis.is_empty() {
        return 0;
    }
    let d = alg.dim();
    let gens = alg.basis_elements();
    let mut m = CMatrix::zeros(d * d, basis.len());
    let mut scale = 0.0f64;
    for (col, b) in basis.iter().enumerate() {
        scale = scale.max(b.norm());
        for (k, e) in gens.iter().enumerate() {
            let c = alg.commutator(b, e);
            for (i, z) in c.coords().iter().enumerate() {
                m[(k * d + i, col)] = *z;
            }
        }
    }
    let r = numerical_rank_scaled(&m, alg.tol().rank_tol, scale * alg.mult_bound());
    basis.len() - r
}

/// Dimension of the center `Z(A)`.
pub fn center_dim(alg: &Algebra) -> usize {
    central_dim(alg, &alg.basis_elements())
}

/// Basis of `J_p = span{e_i p e_j}`, with a minimality certificate: the
/// ideal is minimal exactly when its center is one-dimensional.
pub fn ideal_basis(alg: &Algebra, p: &Element) -> Result<IdealCert> {
    check_projection(alg, p)?;
    let gens = alg.basis_elements();
    let left: Vec<Element> = gens.iter().map(|e| alg.mul(e, p)).collect();
    let mut prods = Vec::with_capacity(gens.len() * gens.len());
    for l in &left {
        for e in &gens {
            prods.push(alg.mul(l, e));
        }
    }
    let scale = product_scale(alg, &[1.0, p.norm(), 1.0]);
    let basis = Subspace::span_scaled(alg.dim(), &prods, alg.tol().rank_tol, scale);
    let minimal = basis.dim() > 0 && central_dim(alg, &basis.orthonormal()) == 1;
    let block_index = if alg.is_blocks() && basis.dim() > 0 { single_block_support(alg, &basis)? } else { None };
    Ok(IdealCert { generator: p.clone(), basis, minimal, block_index })
}

fn single_block_support(alg: &Algebra, s: &Subspace) -> Result<Option<usize>> {
    let mut found = None;
    for v in s.basis() {
        for (b, m) in alg.to_blocks(v)?.iter().enumerate() {
            if m.max_abs() > alg.tol().residual_tol * v.norm() {
                match found {
                    None => found = Some(b),
                    Some(f) if f != b => return Ok(None),
                    _ => {}
                }
            }
        }
    }
    Ok(found)
}

/// `J_p J_q = J_q J_p = 0` for rank-one projections.
pub fn ideals_orthogonal(alg: &Algebra, p: &Element, q: &Element) -> Result<bool> {
    for x in [p, q] {
        check_projection(alg, x)?;
        if rank(alg, x)? != 1 {
            return Err(SocleError::Precondition("ideal orthogonality needs rank-one projections".into()));
        }
    }
    let jp = ideal_basis(alg, p)?.basis;
    let jq = ideal_basis(alg, q)?.basis;
    let tol = alg.tol().residual_tol;
    for x in jp.orthonormal() {
        for y in jq.orthonormal() {
            let bound = tol * alg.mult_bound();
            if alg.mul(&x, &y).norm() > bound || alg.mul(&y, &x).norm() > bound {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Checks `J_p = Ap (x) pA` with the product rule
/// `(x1 y1)(x2 y2) = Tr(y1 x2) x1 y2` for `x_i` in `Ap`, `y_i` in `pA`.
pub fn tensor_model_check(alg: &Algebra, p: &Element) -> Result<TensorReport> {
    check_projection(alg, p)?;
    if corner_space(alg, p).dim() != 1 {
        return Err(SocleError::Precondition("tensor model needs a rank-one projection".into()));
    }
    let ap = left_span(alg, p);
    let pa = right_span(alg, p);
    let xs = ap.basis();
    let ys = pa.basis();
    let jp = ideal_basis(alg, p)?.basis;
    let mut taus = vec![vec![crate::linalg::ZERO; xs.len()]; ys.len()];
    for (j, y) in ys.iter().enumerate() {
        for (i, x) in xs.iter().enumerate() {
            taus[j][i] = trace(alg, &alg.mul(y, x))?;
        }
    }
    let prods: Vec<Vec<Element>> = xs.iter().map(|x| ys.iter().map(|y| alg.mul(x, y)).collect()).collect();
    let span_xy = Subspace::span_scaled(
        alg.dim(),
        &prods.iter().flatten().cloned().collect::<Vec<_>>(),
        alg.tol().rank_tol,
        product_scale(alg, &[p.norm(), p.norm()]),
    );
    let mut worst = 0.0f64;
    for (i1, row1) in prods.iter().enumerate() {
        for (j1, xy1) in row1.iter().enumerate() {
            for (i2, row2) in prods.iter().enumerate() {
                for (j2, xy2) in row2.iter().enumerate() {
                    let lhs = alg.mul(xy1, xy2);
                    let rhs = prods[i1][j2].scaled(taus[j1][i2]);
                    let scale = product_scale(alg, &[xy1.norm(), xy2.norm()]).max(f64::MIN_POSITIVE);
                    worst = worst.max(lhs.distance(&rhs) / scale);
                }
            }
        }
    }
    let pass = ap.dim() == pa.dim()
        && jp.dim() == ap.dim() * pa.dim()
        && span_xy.dim() == jp.dim()
        && jp.contains_subspace(&span_xy, alg.tol())
        && worst <= alg.tol().residual_tol;
    Ok(TensorReport { dim_ap: ap.dim(), dim_pa: pa.dim(), dim_jp: jp.dim(), product_residual: worst, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Tolerance, ONE};

    fn blocks(sizes: &[usize]) -> Algebra {
        Algebra::blocks(sizes, Tolerance::default()).unwrap()
    }

    fn e11_in(alg: &Algebra, block: usize) -> Element {
        let sizes = alg.block_sizes().unwrap();
        let mats: Vec<CMatrix> = sizes
            .iter()
            .enumerate()
            .map(|(b, &n)| {
                let mut m = CMatrix::zeros(n, n);
                if b == block {
                    m[(0, 0)] = ONE;
                }
                m
            })
            .collect();
        alg.from_blocks(&mats).unwrap()
    }

    #[test]
    fn minimality() {
        let m2 = blocks(&[2]);
        assert!(is_minimal_projection(&m2, &m2.basis(0)).unwrap());
        assert!(!is_minimal_projection(&m2, &m2.one()).unwrap());
        let alg = blocks(&[2, 2]);
        let p = e11_in(&alg, 0).plus(&e11_in(&alg, 1));
        assert!(!is_minimal_projection(&alg, &p).unwrap());
        assert_eq!(corner_dim(&alg, &p).unwrap(), 2);
        assert!(matches!(is_minimal_projection(&m2, &m2.basis(1)), Err(SocleError::NotAProjection(_))));
    }

    #[test]
    fn ideal_bases() {
        let m2 = blocks(&[2]);
        let cert = ideal_basis(&m2, &m2.basis(0)).unwrap();
        assert_eq!(cert.basis.dim(), 4);
        assert!(cert.minimal);
        let alg = blocks(&[2, 2]);
        let cert = ideal_basis(&alg, &e11_in(&alg, 0)).unwrap();
        assert_eq!(cert.basis.dim(), 4);
        assert_eq!(cert.block_index, Some(0));
        assert!(cert.minimal);
        assert_eq!(ideal_basis(&alg, &alg.zero()).unwrap().basis.dim(), 0);
        assert!(!ideal_basis(&alg, &alg.one()).unwrap().minimal);
    }

    #[test]
    fn orthogonality() {
        let alg = blocks(&[2, 2]);
        assert!(ideals_orthogonal(&alg, &e11_in(&alg, 0), &e11_in(&alg, 1)).unwrap());
        let m2 = blocks(&[2]);
        assert!(!ideals_orthogonal(&m2, &m2.basis(0), &m2.basis(3)).unwrap());
        assert!(!ideals_orthogonal(&m2, &m2.basis(0), &m2.basis(0)).unwrap());
        assert!(ideals_orthogonal(&m2, &m2.one(), &m2.basis(0)).is_err());
    }

    #[test]
    fn tensor_models() {
        let m2 = blocks(&[2]);
        let r = tensor_model_check(&m2, &m2.basis(0)).unwrap();
        assert_eq!((r.dim_ap, r.dim_pa, r.dim_jp), (2, 2, 4));
        assert!(r.pass, "{r:?}");
        let c = blocks(&[1]);
        let r = tensor_model_check(&c, &c.one()).unwrap();
        assert_eq!((r.dim_ap, r.dim_pa, r.dim_jp), (1, 1, 1));
        assert!(r.pass);
        let alg = blocks(&[2, 1]);
        let r = tensor_model_check(&alg, &e11_in(&alg, 0)).unwrap();
        assert_eq!(r.dim_jp, 4);
        assert!(r.pass);
    }

    #[test]
    fn pairwise_dims() {
        let m2 = blocks(&[2]);
        assert_eq!(pairwise_dim(&m2, &m2.basis(0), &m2.basis(0)).unwrap(), 1);
        assert_eq!(pairwise_dim(&m2, &m2.basis(0), &m2.basis(3)).unwrap(), 1);
        let alg = blocks(&[2, 2]);
        assert_eq!(pairwise_dim(&alg, &e11_in(&alg, 0), &e11_in(&alg, 1)).unwrap(), 0);
    }

    #[test]
    fn corner_dims() {
        let alg = blocks(&[2, 2]);
        let d = CMatrix::diag(&[ONE, -ONE]);
        let a = alg.from_blocks(&[d.clone(), d]).unwrap();
        assert_eq!(corner_dim(&alg, &a).unwrap(), 8);
        let m2 = blocks(&[2]);
        assert_eq!(corner_dim(&m2, &m2.one()).unwrap(), 4);
        assert_eq!(corner_dim(&m2, &m2.basis(0)).unwrap(), 1);
    }

    #[test]
    fn centers() {
        assert_eq!(center_dim(&blocks(&[2, 1])), 2);
        assert_eq!(center_dim(&blocks(&[1, 1, 1])), 3);
        assert_eq!(center_dim(&blocks(&[3])), 1);
    }
}
