use super::{CMatrix, Tolerance, C64, ZERO};

/// Result of a Householder QR with column pivoting, `A P = Q R`.
///
/// Only `R` and the permutation are kept; callers here never need `Q`.
#[derive(Debug, Clone)]
pub struct PivotedQr {
    pub r: CMatrix,
    /// `perm[k]` is the original column placed at position `k`.
    pub perm: Vec<usize>,
}

impl PivotedQr {
    /// Magnitudes of the diagonal of `R`, non-increasing up to rounding.
    pub fn pivots(&self) -> Vec<f64> {
        let k = self.r.rows().min(self.r.cols());
        (0..k).map(|i| self.r[(i, i)].norm()).collect()
    }
}

pub fn pivoted_qr(m: &CMatrix) -> PivotedQr {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..cols).collect();
    let steps = rows.min(cols);

    for k in 0..steps {
        // Recomputing column norms each step is cheap at this size and avoids
        // the cancellation issues of downdating.
        let (best, best_norm) = (k..cols)
            .map(|j| {
                let n: f64 = (k..rows).map(|i| a[(i, j)].norm_sqr()).sum();
                (j, n)
            })
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best != k {
            for i in 0..rows {
                let tmp = a[(i, k)];
                a[(i, k)] = a[(i, best)];
                a[(i, best)] = tmp;
            }
            perm.swap(k, best);
        }
        let norm = best_norm.sqrt();
        if norm == 0.0 {
            break;
        }
        let x0 = a[(k, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * norm;
        let mut v: Vec<C64> = (k..rows).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k..cols {
            let dot: C64 = v.iter().enumerate().map(|(t, vi)| vi.conj() * a[(k + t, j)]).sum();
            let f = dot * (2.0 / vnorm2);
            for (t, vi) in v.iter().enumerate() {
                a[(k + t, j)] -= f * vi;
            }
        }
        for i in (k + 1)..rows {
            a[(i, k)] = ZERO;
        }
    }
    PivotedQr { r: a, perm }
}

/// Number of pivots of a column-pivoted QR exceeding `rank_tol` times the
/// largest pivot (itself the largest column norm).
pub fn numerical_rank(m: &CMatrix, tol: &Tolerance) -> usize {
    numerical_rank_scaled(m, tol.rank_tol, 0.0)
}

/// Like [`numerical_rank`] but with the cutoff `rank_tol * max(pivot_0, scale)`,
/// for matrices whose entries are known to be built from quantities of size
/// `scale` (so pure rounding noise is not mistaken for rank).
pub(crate) fn numerical_rank_scaled(m: &CMatrix, rank_tol: f64, scale: f64) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    let qr = pivoted_qr(m);
    let pivots = qr.pivots();
    let top = pivots.first().copied().unwrap_or(0.0);
    let reference = top.max(scale);
    if reference == 0.0 {
        return 0;
    }
    pivots.iter().filter(|&&p| p > rank_tol * reference).count()
}
