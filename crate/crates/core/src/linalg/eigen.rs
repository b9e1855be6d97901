//! Complex Schur decomposition by Householder reduction to Hessenberg form
//! followed by Wilkinson-shifted QR sweeps, plus Schur reordering and the
//! spectral projectors built from it.

use super::{CMatrix, C64, ONE, ZERO};
use crate::error::{Result, SocleError};

/// `m = q * t * q^H` with `t` upper triangular and `q` unitary.
#[derive(Debug, Clone)]
pub struct Schur {
    pub t: CMatrix,
    pub q: CMatrix,
}

impl Schur {
    pub fn eigenvalues(&self) -> Vec<C64> {
        (0..self.t.rows()).map(|i| self.t[(i, i)]).collect()
    }
}

fn check_square(m: &CMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(SocleError::Dimension(format!(
            "eigenproblem needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if m.rows() == 0 {
        return Err(SocleError::Dimension("eigenproblem needs dimension >= 1".into()));
    }
    Ok(())
}

/// Eigenvalues with algebraic multiplicity, in no particular order.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    Ok(schur(m)?.eigenvalues())
}

fn hessenberg(m: &CMatrix) -> (CMatrix, CMatrix) {
    let n = m.rows();
    let mut h = m.clone();
    let mut q = CMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let norm: f64 = ((k + 1)..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        let mut v: Vec<C64> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        v[0] += phase * norm;
        let vn: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vn == 0.0 {
            continue;
        }
        let s = 2.0 / vn;
        // H <- P H
        for j in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(t, vi)| vi.conj() * h[(k + 1 + t, j)]).sum();
            for (t, vi) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= dot * s * vi;
            }
        }
        // H <- H P, Q <- Q P
        for mat in [&mut h, &mut q] {
            for i in 0..n {
                let dot: C64 = v.iter().enumerate().map(|(t, vi)| mat[(i, k + 1 + t)] * vi).sum();
                for (t, vi) in v.iter().enumerate() {
                    mat[(i, k + 1 + t)] -= dot * s * vi.conj();
                }
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, q)
}

/// Givens rotation `[c, s; -conj(s), c]` (c real) with
/// `G [a; b] = [r; 0]`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, ZERO);
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = an.hypot(bn);
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s)
}

fn rotate_rows(m: &mut CMatrix, i: usize, c: f64, s: C64, cols: std::ops::Range<usize>) {
    for j in cols {
        let x = m[(i, j)];
        let y = m[(i + 1, j)];
        m[(i, j)] = x * c + s * y;
        m[(i + 1, j)] = -s.conj() * x + y * c;
    }
}

/// Right-multiplies columns `(j, j+1)` by the adjoint of the rotation.
fn rotate_cols(m: &mut CMatrix, j: usize, c: f64, s: C64, rows: std::ops::Range<usize>) {
    for i in rows {
        let x = m[(i, j)];
        let y = m[(i, j + 1)];
        m[(i, j)] = x * c + y * s.conj();
        m[(i, j + 1)] = -x * s + y * c;
    }
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let l1 = mean + disc;
    let l2 = mean - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Complex Schur decomposition. Iteration is capped at `50 * n` QR sweeps.
pub fn schur(m: &CMatrix) -> Result<Schur> {
    check_square(m)?;
    let n = m.rows();
    let (mut h, mut q) = hessenberg(m);
    if n == 1 {
        return Ok(Schur { t: h, q });
    }
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let max_sweeps = 50 * n;
    let mut sweeps = 0usize;
    let mut hi = n - 1;
    let mut since_deflation = 0usize;

    while hi > 0 {
        // Find the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if diag == 0.0 {
                diag = scale;
            }
            if sub <= eps * diag || sub <= f64::MIN_POSITIVE * 16.0 {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if sweeps >= max_sweeps {
            return Err(SocleError::NoConvergence(n));
        }
        sweeps += 1;
        since_deflation += 1;

        let shift = if since_deflation.is_multiple_of(11) {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + C64::new(0.75, 0.4) * h[(hi, hi - 1)].norm()
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for i in lo..=hi {
            h[(i, i)] -= shift;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            rotate_rows(&mut h, k, c, s, k..n);
            h[(k + 1, k)] = ZERO;
            rots.push((k, c, s));
        }
        for &(k, c, s) in &rots {
            rotate_cols(&mut h, k, c, s, 0..(k + 2).min(hi + 1));
            rotate_cols(&mut q, k, c, s, 0..n);
        }
        for i in lo..=hi {
            h[(i, i)] += shift;
        }
    }
    for j in 0..n {
        for i in (j + 1)..n {
            h[(i, j)] = ZERO;
        }
    }
    Ok(Schur { t: h, q })
}

/// Swaps the adjacent diagonal entries `k` and `k+1` of a Schur form.
fn swap_adjacent(s: &mut Schur, k: usize) {
    let n = s.t.rows();
    let t1 = s.t[(k, k)];
    let t2 = s.t[(k + 1, k + 1)];
    let b = s.t[(k, k + 1)];
    // Eigenvector of the 2x2 block for t2 is (b, t2 - t1).
    let (c, sn) = givens(b, t2 - t1);
    rotate_rows(&mut s.t, k, c, sn, k..n);
    rotate_cols(&mut s.t, k, c, sn, 0..(k + 2));
    rotate_cols(&mut s.q, k, c, sn, 0..n);
    s.t[(k + 1, k)] = ZERO;
    s.t[(k, k)] = t2;
    s.t[(k + 1, k + 1)] = t1;
}

/// Moves every diagonal entry satisfying `select` to the leading block,
/// returning the size of that block.
fn reorder(s: &mut Schur, select: &impl Fn(C64) -> bool) -> usize {
    let n = s.t.rows();
    let mut leading = 0;
    for j in 0..n {
        if select(s.t[(j, j)]) {
            for i in (leading..j).rev() {
                swap_adjacent(s, i);
            }
            leading += 1;
        }
    }
    leading
}

/// Spectral projector of `m` onto the invariant subspace belonging to the
/// eigenvalues accepted by `select`, along the complementary invariant
/// subspace. The selected and rejected eigenvalues must be separated.
pub fn spectral_projector(m: &CMatrix, select: impl Fn(C64) -> bool) -> Result<CMatrix> {
    let mut s = schur(m)?;
    let n = m.rows();
    let k = reorder(&mut s, &select);
    if k == 0 {
        return Ok(CMatrix::zeros(n, n));
    }
    if k == n {
        return Ok(CMatrix::identity(n));
    }
    let t = &s.t;
    // Solve T11 X - X T22 = -T12 column by column.
    let r = n - k;
    let mut x = CMatrix::zeros(k, r);
    for j in 0..r {
        let mu = t[(k + j, k + j)];
        let mut rhs: Vec<C64> = (0..k).map(|i| -t[(i, k + j)]).collect();
        for l in 0..j {
            let tl = t[(k + l, k + j)];
            for (i, v) in rhs.iter_mut().enumerate() {
                *v += x[(i, l)] * tl;
            }
        }
        for i in (0..k).rev() {
            let mut acc = rhs[i];
            for l in (i + 1)..k {
                acc -= t[(i, l)] * x[(l, j)];
            }
            let d = t[(i, i)] - mu;
            if d.norm() == 0.0 {
                return Err(SocleError::Numeric(
                    "spectral projector: selected and rejected eigenvalues coincide".into(),
                ));
            }
            x[(i, j)] = acc / d;
        }
    }
    let mut pt = CMatrix::zeros(n, n);
    for i in 0..k {
        pt[(i, i)] = ONE;
        for j in 0..r {
            pt[(i, k + j)] = -x[(i, j)];
        }
    }
    let tmp = s.q.matmul(&pt)?;
    tmp.matmul(&s.q.adjoint())
}
