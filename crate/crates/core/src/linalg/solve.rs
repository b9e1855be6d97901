use super::qr::numerical_rank_scaled;
use super::{CMatrix, Tolerance, C64, ONE, ZERO};
use crate::error::{Result, SocleError};

/// Outcome of [`solve_linear`].
#[derive(Debug, Clone)]
pub enum Solve {
    Solution(CMatrix),
    Singular,
}

impl Solve {
    pub fn ok(self) -> Result<CMatrix> {
        match self {
            Solve::Solution(x) => Ok(x),
            Solve::Singular => Err(SocleError::Singular),
        }
    }
}

/// Solves `a x = b` by LU with partial pivoting. Returns [`Solve::Singular`]
/// when `a` is numerically rank deficient.
pub fn solve_linear(a: &CMatrix, b: &CMatrix, tol: &Tolerance) -> Result<Solve> {
    if !a.is_square() {
        return Err(SocleError::Dimension(format!("solve needs a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    if b.rows() != a.rows() {
        return Err(SocleError::Dimension(format!("right-hand side has {} rows, matrix has {}", b.rows(), a.rows())));
    }
    let n = a.rows();
    if numerical_rank_scaled(a, tol.rank_tol, 0.0) < n {
        return Ok(Solve::Singular);
    }
    let mut lu = a.clone();
    let mut x = b.clone();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| lu[(i, k)].norm().total_cmp(&lu[(j, k)].norm())).unwrap_or(k);
        if lu[(p, k)] == ZERO {
            return Ok(Solve::Singular);
        }
        if p != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = t;
            }
            for j in 0..x.cols() {
                let t = x[(k, j)];
                x[(k, j)] = x[(p, j)];
                x[(p, j)] = t;
            }
        }
        let pivot = lu[(k, k)];
        for i in (k + 1)..n {
            let f = lu[(i, k)] / pivot;
            if f == ZERO {
                continue;
            }
            lu[(i, k)] = f;
            for j in (k + 1)..n {
                let u = lu[(k, j)];
                lu[(i, j)] -= f * u;
            }
            for j in 0..x.cols() {
                let u = x[(k, j)];
                x[(i, j)] -= f * u;
            }
        }
    }
    for j in 0..x.cols() {
        for i in (0..n).rev() {
            let mut s = x[(i, j)];
            for k in (i + 1)..n {
                s -= lu[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = s / lu[(i, i)];
        }
    }
    Ok(Solve::Solution(x))
}

pub fn inverse(a: &CMatrix, tol: &Tolerance) -> Result<Option<CMatrix>> {
    match solve_linear(a, &CMatrix::identity(a.rows()), tol)? {
        Solve::Solution(x) => Ok(Some(x)),
        Solve::Singular => Ok(None),
    }
}

/// Least-squares solution of an overdetermined full-column-rank system via
/// Householder QR. Returns the solution and the residual norm per column of `b`.
pub fn least_squares(a: &CMatrix, b: &CMatrix) -> Result<(CMatrix, Vec<f64>)> {
    let (m, n) = (a.rows(), a.cols());
    if b.rows() != m {
        return Err(SocleError::Dimension(format!("right-hand side has {} rows, matrix has {m}", b.rows())));
    }
    if n > m {
        return Err(SocleError::Dimension(format!("least squares needs rows >= cols, got {m}x{n}")));
    }
    let mut r = a.clone();
    let mut rhs = b.clone();
    for k in 0..n {
        let norm: f64 = (k..m).map(|i| r[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(SocleError::Singular);
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        let alpha = -phase * norm;
        let mut v: Vec<C64> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vn: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let reflect = |mat: &mut CMatrix, j: usize| {
            let dot: C64 = v.iter().enumerate().map(|(t, vi)| vi.conj() * mat[(k + t, j)]).sum();
            let f = dot * (2.0 / vn);
            for (t, vi) in v.iter().enumerate() {
                mat[(k + t, j)] -= f * vi;
            }
        };
        for j in k..n {
            reflect(&mut r, j);
        }
        for j in 0..rhs.cols() {
            reflect(&mut rhs, j);
        }
    }
    let mut x = CMatrix::zeros(n, b.cols());
    for j in 0..b.cols() {
        for i in (0..n).rev() {
            let mut s = rhs[(i, j)];
            for k in (i + 1)..n {
                s -= r[(i, k)] * x[(k, j)];
            }
            if r[(i, i)] == ZERO {
                return Err(SocleError::Singular);
            }
            x[(i, j)] = s / r[(i, i)];
        }
    }
    let residuals = (0..b.cols()).map(|j| (n..m).map(|i| rhs[(i, j)].norm_sqr()).sum::<f64>().sqrt()).collect();
    Ok((x, residuals))
}

/// Minimum-norm solution of an underdetermined system `t y = rhs`
/// (`t` has full row rank).
pub(crate) fn min_norm_solve(t: &CMatrix, rhs: &[C64], tol: &Tolerance) -> Result<Vec<C64>> {
    let gram = t.matmul(&t.adjoint())?;
    let b = CMatrix::from_fn(rhs.len(), 1, |i, _| rhs[i]);
    let z = solve_linear(&gram, &b, tol)?.ok()?;
    Ok(t.adjoint().matmul(&z)?.into_vec())
}
