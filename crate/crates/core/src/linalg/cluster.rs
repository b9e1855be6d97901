use serde::{Deserialize, Serialize};

use super::{Tolerance, C64};

/// A group of numerically coincident spectral values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralCluster {
    /// Cluster mean.
    pub value: C64,
    pub count: usize,
}

/// Single-linkage clustering at radius `cluster_tol`.
///
/// Output is sorted by decreasing real part, then decreasing imaginary part,
/// so that results are deterministic regardless of eigensolver ordering.
pub fn cluster_spectrum(values: &[C64], tol: &Tolerance) -> Vec<SpectralCluster> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (values[i] - values[j]).norm() <= tol.cluster_tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj] = ri;
                }
            }
        }
    }
    let mut groups: Vec<(usize, C64, usize)> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += v;
                g.2 += 1;
            }
            None => groups.push((r, v, 1)),
        }
    }
    let mut out: Vec<SpectralCluster> =
        groups.into_iter().map(|(_, sum, count)| SpectralCluster { value: sum / count as f64, count }).collect();
    out.sort_by(|a, b| b.value.re.total_cmp(&a.value.re).then(b.value.im.total_cmp(&a.value.im)));
    out
}
