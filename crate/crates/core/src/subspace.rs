//! Linear subspaces of an algebra, kept with an orthonormal companion basis.

use crate::algebra::Element;
use crate::linalg::{inner, vec_norm, Tolerance, C64};

#[derive(Debug, Clone)]
pub struct Subspace {
    ambient_dim: usize,
    /// Selected spanning vectors (linearly independent).
    basis: Vec<Element>,
    /// Orthonormal basis of the same span.
    ortho: Vec<Vec<C64>>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: Vec::new(), ortho: Vec::new() }
    }

    /// Span of `vectors`; a vector counts as new when its residual against
    /// the current span exceeds `rank_tol * max(largest input norm, scale)`.
    pub fn span_scaled(ambient_dim: usize, vectors: &[Element], rank_tol: f64, scale: f64) -> Self {
        let mut s = Subspace::zero(ambient_dim);
        s.absorb(vectors, rank_tol, scale);
        s
    }

    pub fn span(ambient_dim: usize, vectors: &[Element], tol: &Tolerance) -> Self {
        Self::span_scaled(ambient_dim, vectors, tol.rank_tol, 0.0)
    }

    /// Greedy pivoted Gram-Schmidt: adds the candidate with the largest
    /// residual until all residuals fall under the threshold.
    pub fn absorb(&mut self, vectors: &[Element], rank_tol: f64, scale: f64) {
        let largest = vectors.iter().map(Element::norm).chain(self.basis.iter().map(Element::norm)).fold(0.0, f64::max);
        let threshold = rank_tol * largest.max(scale);
        let mut residuals: Vec<Vec<C64>> = vectors.iter().map(|v| self.residual_vec(v.coords())).collect();
        let mut used = vec![false; vectors.len()];
        loop {
            let best = (0..vectors.len())
                .rev()
                .filter(|&i| !used[i])
                .max_by(|&i, &j| vec_norm(&residuals[i]).total_cmp(&vec_norm(&residuals[j])));
            let Some(i) = best else { break };
            if vec_norm(&residuals[i]) <= threshold {
                break;
            }
            used[i] = true;
            let mut q = self.residual_vec(&residuals[i]);
            let n = vec_norm(&q);
            if n <= threshold {
                continue;
            }
            q.iter_mut().for_each(|z| *z /= n);
            for (j, r) in residuals.iter_mut().enumerate() {
                if used[j] {
                    continue;
                }
                let c = inner(&q, r);
                r.iter_mut().zip(&q).for_each(|(x, qi)| *x -= c * qi);
            }
            self.ortho.push(q);
            self.basis.push(vectors[i].clone());
        }
    }

    fn residual_vec(&self, v: &[C64]) -> Vec<C64> {
        let mut r = v.to_vec();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &self.ortho {
                let c = inner(q, &r);
                r.iter_mut().zip(q).for_each(|(x, qi)| *x -= c * qi);
            }
        }
        r
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Element] {
        &self.basis
    }

    pub fn orthonormal(&self) -> Vec<Element> {
        self.ortho.iter().map(|q| Element::from_coords(q.clone())).collect()
    }

    /// Distance from `v` to the subspace.
    pub fn residual(&self, v: &Element) -> f64 {
        vec_norm(&self.residual_vec(v.coords()))
    }

    pub fn project(&self, v: &Element) -> Element {
        Element::from_coords(v.coords().iter().zip(self.residual_vec(v.coords())).map(|(a, r)| a - r).collect())
    }

    pub fn contains(&self, v: &Element, tol: &Tolerance) -> bool {
        self.residual(v) <= tol.residual_tol * v.norm().max(f64::MIN_POSITIVE)
    }

    /// True when every basis vector of `other` lies in `self`.
    pub fn contains_subspace(&self, other: &Subspace, tol: &Tolerance) -> bool {
        other.basis.iter().all(|v| self.contains(v, tol))
    }

    /// Coordinates of `v` in the selected (non-orthonormal) basis, by least
    /// squares.
    pub fn coordinates(&self, v: &Element) -> crate::Result<Vec<C64>> {
        if self.basis.is_empty() {
            return Ok(Vec::new());
        }
        let a = crate::linalg::CMatrix::from_columns(
            self.ambient_dim,
            &self.basis.iter().map(|b| b.coords().to_vec()).collect::<Vec<_>>(),
        );
        let b = crate::linalg::CMatrix::from_fn(self.ambient_dim, 1, |i, _| v.coords()[i]);
        let (x, _) = crate::linalg::least_squares(&a, &b)?;
        Ok(x.into_vec())
    }
}
