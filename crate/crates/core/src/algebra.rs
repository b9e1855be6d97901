//! Finite-dimensional unital complex algebras and their elements.
//!
//! An [`Algebra`] is either an explicit direct sum of full matrix blocks or a
//! structure-constant table over an abstract basis with a distinguished unit.
//! Elements are always stored as coordinate vectors over the algebra basis;
//! for the block presentation the basis is the concatenation of the standard
//! matrix units of each block, in row-major order.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SocleError};
use crate::linalg::{
    cluster_spectrum, eigenvalues, inverse, numerical_rank, solve_linear, vec_norm, CMatrix, Solve, SpectralCluster,
    Tolerance, C64, ONE, ZERO,
};
use crate::wedderburn::WedderburnIso;

/// Largest supported algebra dimension.
pub const MAX_DIM: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum Presentation {
    /// `M_{n_1}(C) + ... + M_{n_k}(C)`.
    Blocks { sizes: Vec<usize> },
    /// Basis `e_0..e_{d-1}` with `e_i e_j = sum_k table[(i*d + j)*d + k] e_k`.
    Structure { dim: usize, table: Vec<C64>, unit: Vec<C64> },
}

/// A member of an [`Algebra`], as coordinates over its basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Element(Vec<C64>);

impl Element {
    pub fn from_coords(coords: Vec<C64>) -> Self {
        Element(coords)
    }

    pub fn coords(&self) -> &[C64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<C64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Euclidean norm of the coordinates (Frobenius norm for blocks).
    pub fn norm(&self) -> f64 {
        vec_norm(&self.0)
    }

    pub fn plus(&self, other: &Element) -> Element {
        Element(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn minus(&self, other: &Element) -> Element {
        Element(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scaled(&self, s: C64) -> Element {
        Element(self.0.iter().map(|a| a * s).collect())
    }

    pub fn distance(&self, other: &Element) -> f64 {
        self.minus(other).norm()
    }
}

impl Serialize for Element {
    /// Coordinates as `[re, im]` pairs.
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|z| [z.re, z.im]))
    }
}

/// Sampling profile for [`Algebra::random_element`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RandomProfile {
    /// i.i.d. standard complex Gaussian coordinates.
    Dense,
    /// Hermitian blocks (block presentation, or structure with a known
    /// decomposition); real Gaussian coordinates otherwise.
    HermitianLike,
    /// `1 + eps * dense`.
    NearIdentity(f64),
}

/// Clustered spectrum of an element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Distinct nonzero spectral values.
    pub nonzero: Vec<SpectralCluster>,
    pub includes_zero: bool,
    /// Eigenvalue count attached to zero (0 when zero is not in the spectrum).
    pub zero_count: usize,
    /// False when the counts come from the left regular representation and
    /// therefore are not algebra multiplicities.
    pub counts_are_multiplicities: bool,
}

impl Spectrum {
    pub fn nonzero_values(&self) -> Vec<C64> {
        self.nonzero.iter().map(|c| c.value).collect()
    }

    pub fn contains(&self, lambda: C64, tol: &Tolerance) -> bool {
        if lambda.norm() <= tol.cluster_tol {
            return self.includes_zero;
        }
        self.nonzero.iter().any(|c| (c.value - lambda).norm() <= tol.cluster_tol)
    }
}

#[derive(Debug, Clone)]
pub struct Algebra {
    presentation: Presentation,
    tol: Tolerance,
    iso: Option<Arc<WedderburnIso>>,
    /// Upper bound for `|xy| / (|x| |y|)` in coordinate norms.
    mult_bound: f64,
}

impl Algebra {
    pub fn blocks(sizes: &[usize], tol: Tolerance) -> Result<Self> {
        tol.validate()?;
        if sizes.is_empty() {
            return Err(SocleError::InvalidAlgebra("at least one block is required".into()));
        }
        if sizes.contains(&0) {
            return Err(SocleError::InvalidAlgebra("block sizes must be positive".into()));
        }
        let dim: usize = sizes.iter().map(|n| n * n).sum();
        if dim > MAX_DIM {
            return Err(SocleError::InvalidAlgebra(format!(
                "algebra dimension {dim} exceeds the supported maximum {MAX_DIM}"
            )));
        }
        let iso = WedderburnIso::canonical(sizes);
        Ok(Algebra {
            presentation: Presentation::Blocks { sizes: sizes.to_vec() },
            tol,
            iso: Some(Arc::new(iso)),
            mult_bound: 1.0,
        })
    }

    /// Structure-constant presentation. Validates table shape, finiteness,
    /// associativity on all basis triples and the two-sided unit.
    pub fn structure(dim: usize, table: Vec<C64>, unit: Vec<C64>, tol: Tolerance) -> Result<Self> {
        tol.validate()?;
        if dim == 0 || dim > MAX_DIM {
            return Err(SocleError::InvalidAlgebra(format!("dimension must be in 1..={MAX_DIM}, got {dim}")));
        }
        if table.len() != dim * dim * dim {
            return Err(SocleError::InvalidAlgebra(format!(
                "structure table has {} entries, expected {}",
                table.len(),
                dim * dim * dim
            )));
        }
        if unit.len() != dim {
            return Err(SocleError::InvalidAlgebra(format!("unit has {} coordinates, expected {dim}", unit.len())));
        }
        if table.iter().chain(&unit).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SocleError::InvalidAlgebra("non-finite structure data".into()));
        }
        let mut alg =
            Algebra { presentation: Presentation::Structure { dim, table, unit }, tol, iso: None, mult_bound: 1.0 };
        let left: Vec<CMatrix> = (0..dim).map(|i| alg.left_regular_matrix(&alg.basis(i))).collect();
        alg.mult_bound = left.iter().map(|l| l.norm_fro().powi(2)).sum::<f64>().sqrt().max(1e-300);
        let table_scale = left.iter().map(CMatrix::max_abs).fold(0.0, f64::max).max(1.0);

        // (e_i e_j) e_k = e_i (e_j e_k)  <=>  L_{e_i e_j} = L_{e_i} L_{e_j}
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let prod = alg.mul(&alg.basis(i), &alg.basis(j));
                let lhs = alg.left_regular_matrix(&prod);
                let rhs = left[i].matmul(&left[j])?;
                worst = worst.max(lhs.try_sub(&rhs)?.max_abs());
            }
        }
        if worst > tol.residual_tol * table_scale * table_scale {
            return Err(SocleError::InvalidAlgebra(format!(
                "multiplication is not associative (residual {worst:.3e})"
            )));
        }
        let one = alg.one();
        let mut worst = 0.0f64;
        for i in 0..dim {
            let e = alg.basis(i);
            worst = worst.max(alg.mul(&one, &e).distance(&e));
            worst = worst.max(alg.mul(&e, &one).distance(&e));
        }
        if worst > tol.residual_tol * table_scale * one.norm().max(1.0) {
            return Err(SocleError::InvalidAlgebra(format!("unit is not a two-sided identity (residual {worst:.3e})")));
        }
        Ok(alg)
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn tol(&self) -> &Tolerance {
        &self.tol
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Result<Self> {
        tol.validate()?;
        self.tol = tol;
        Ok(self)
    }

    pub fn is_blocks(&self) -> bool {
        matches!(self.presentation, Presentation::Blocks { .. })
    }

    pub fn dim(&self) -> usize {
        match &self.presentation {
            Presentation::Blocks { sizes } => sizes.iter().map(|n| n * n).sum(),
            Presentation::Structure { dim, .. } => *dim,
        }
    }

    pub(crate) fn mult_bound(&self) -> f64 {
        self.mult_bound
    }

    /// Attaches a decomposition so block-level operations become available.
    pub fn set_iso(&mut self, iso: WedderburnIso) -> Result<()> {
        if iso.dim() != self.dim() {
            return Err(SocleError::Dimension(format!(
                "isomorphism of dimension {} for an algebra of dimension {}",
                iso.dim(),
                self.dim()
            )));
        }
        self.iso = Some(Arc::new(iso));
        Ok(())
    }

    pub fn iso(&self) -> Result<&WedderburnIso> {
        self.iso.as_deref().ok_or(SocleError::NeedsDecomposition)
    }

    pub fn has_iso(&self) -> bool {
        self.iso.is_some()
    }

    /// Block sizes: exact for the block presentation, from the attached
    /// decomposition otherwise.
    pub fn block_sizes(&self) -> Result<Vec<usize>> {
        Ok(self.iso()?.sizes.clone())
    }

    pub fn zero(&self) -> Element {
        Element(vec![ZERO; self.dim()])
    }

    pub fn one(&self) -> Element {
        match &self.presentation {
            Presentation::Blocks { sizes } => {
                let mut v = Vec::with_capacity(self.dim());
                for &n in sizes {
                    for i in 0..n {
                        for j in 0..n {
                            v.push(if i == j { ONE } else { ZERO });
                        }
                    }
                }
                Element(v)
            }
            Presentation::Structure { unit, .. } => Element(unit.clone()),
        }
    }

    pub fn basis(&self, i: usize) -> Element {
        let mut v = vec![ZERO; self.dim()];
        v[i] = ONE;
        Element(v)
    }

    pub fn basis_elements(&self) -> Vec<Element> {
        (0..self.dim()).map(|i| self.basis(i)).collect()
    }

    /// Validates and wraps a coordinate vector.
    pub fn element(&self, coords: Vec<C64>) -> Result<Element> {
        let e = Element(coords);
        self.check(&e)?;
        Ok(e)
    }

    pub fn check(&self, a: &Element) -> Result<()> {
        if a.len() != self.dim() {
            return Err(SocleError::AlgebraMismatch);
        }
        if a.0.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SocleError::Dimension("element entries must be finite".into()));
        }
        Ok(())
    }

    /// Element from one matrix per block (through the decomposition for
    /// structure presentations).
    pub fn from_blocks(&self, blocks: &[CMatrix]) -> Result<Element> {
        let iso = self.iso()?;
        if blocks.len() != iso.sizes.len()
            || blocks.iter().zip(&iso.sizes).any(|(m, &n)| m.rows() != n || m.cols() != n)
        {
            return Err(SocleError::Dimension(format!("block shapes do not match sizes {:?}", iso.sizes)));
        }
        let flat: Vec<C64> = blocks.iter().flat_map(|m| m.as_slice().iter().copied()).collect();
        if iso.is_canonical() {
            return self.element(flat);
        }
        self.element(iso.backward.matvec(&flat)?)
    }

    /// The block matrices of `a` (through the decomposition for structure
    /// presentations).
    pub fn to_blocks(&self, a: &Element) -> Result<Vec<CMatrix>> {
        self.check(a)?;
        let iso = self.iso()?;
        let flat = if iso.is_canonical() { a.0.clone() } else { iso.forward.matvec(&a.0)? };
        let mut out = Vec::with_capacity(iso.sizes.len());
        let mut off = 0;
        for &n in &iso.sizes {
            out.push(CMatrix::from_row_major(n, n, flat[off..off + n * n].to_vec())?);
            off += n * n;
        }
        Ok(out)
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        match &self.presentation {
            Presentation::Blocks { sizes } => {
                let mut out = vec![ZERO; a.len()];
                let mut off = 0;
                for &n in sizes {
                    for i in 0..n {
                        for k in 0..n {
                            let x = a.0[off + i * n + k];
                            if x == ZERO {
                                continue;
                            }
                            for j in 0..n {
                                out[off + i * n + j] += x * b.0[off + k * n + j];
                            }
                        }
                    }
                    off += n * n;
                }
                Element(out)
            }
            Presentation::Structure { dim, table, .. } => {
                let d = *dim;
                let mut out = vec![ZERO; d];
                for i in 0..d {
                    let x = a.0[i];
                    if x == ZERO {
                        continue;
                    }
                    for j in 0..d {
                        let xy = x * b.0[j];
                        if xy == ZERO {
                            continue;
                        }
                        let row = &table[(i * d + j) * d..(i * d + j + 1) * d];
                        for (o, c) in out.iter_mut().zip(row) {
                            *o += xy * c;
                        }
                    }
                }
                Element(out)
            }
        }
    }

    pub fn mul3(&self, a: &Element, b: &Element, c: &Element) -> Element {
        self.mul(&self.mul(a, b), c)
    }

    pub fn commutator(&self, a: &Element, b: &Element) -> Element {
        self.mul(a, b).minus(&self.mul(b, a))
    }

    /// Checked binary ring operation.
    pub fn ring_op(&self, op: RingOp, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(match op {
            RingOp::Add => a.plus(b),
            RingOp::Sub => a.minus(b),
            RingOp::Mul => self.mul(a, b),
            RingOp::Commutator => self.commutator(a, b),
        })
    }

    /// Matrix of `x -> a x` in the algebra basis.
    pub fn left_regular_matrix(&self, a: &Element) -> CMatrix {
        let d = self.dim();
        match &self.presentation {
            Presentation::Structure { table, .. } => {
                let mut m = CMatrix::zeros(d, d);
                for i in 0..d {
                    let x = a.0[i];
                    if x == ZERO {
                        continue;
                    }
                    for j in 0..d {
                        for k in 0..d {
                            m[(k, j)] += x * table[(i * d + j) * d + k];
                        }
                    }
                }
                m
            }
            Presentation::Blocks { .. } => {
                let cols: Vec<Vec<C64>> = (0..d).map(|j| self.mul(a, &self.basis(j)).0).collect();
                CMatrix::from_columns(d, &cols)
            }
        }
    }

    /// Matrix of `x -> x a` in the algebra basis.
    pub fn right_regular_matrix(&self, a: &Element) -> CMatrix {
        let d = self.dim();
        let cols: Vec<Vec<C64>> = (0..d).map(|j| self.mul(&self.basis(j), a).0).collect();
        CMatrix::from_columns(d, &cols)
    }

    /// Invertibility test with witness. Blocks: every block has full
    /// numerical rank. Structure: the left regular matrix is nonsingular.
    pub fn is_invertible(&self, a: &Element) -> Result<Option<Element>> {
        self.check(a)?;
        let witness = match &self.presentation {
            Presentation::Blocks { sizes } => {
                let blocks = self.to_blocks(a)?;
                let mut inv_blocks = Vec::with_capacity(sizes.len());
                for b in &blocks {
                    if numerical_rank(b, &self.tol) < b.rows() {
                        return Ok(None);
                    }
                    match inverse(b, &self.tol)? {
                        Some(x) => inv_blocks.push(x),
                        None => return Ok(None),
                    }
                }
                self.from_blocks(&inv_blocks)?
            }
            Presentation::Structure { .. } => {
                let l = self.left_regular_matrix(a);
                let one = self.one();
                let rhs = CMatrix::from_fn(self.dim(), 1, |i, _| one.0[i]);
                match solve_linear(&l, &rhs, &self.tol)? {
                    Solve::Solution(x) => Element(x.into_vec()),
                    Solve::Singular => return Ok(None),
                }
            }
        };
        let one = self.one();
        let residual = self.mul(a, &witness).distance(&one).max(self.mul(&witness, a).distance(&one));
        let scale = (a.norm() * witness.norm() * self.mult_bound).max(1.0);
        if residual > self.tol.residual_tol * scale {
            return Err(SocleError::Numeric(format!("inverse witness residual {residual:.3e} too large")));
        }
        Ok(Some(witness))
    }

    /// Spectral radius of `a`.
    pub fn spectral_radius(&self, a: &Element) -> Result<f64> {
        let s = self.spectrum(a)?;
        Ok(s.nonzero.iter().map(|c| c.value.norm()).fold(0.0, f64::max))
    }

    /// Raw eigenvalues backing [`Algebra::spectrum`]: the union of the block
    /// eigenvalues, or the eigenvalues of the left regular matrix.
    pub(crate) fn raw_eigenvalues(&self, a: &Element) -> Result<(Vec<C64>, bool)> {
        match &self.presentation {
            Presentation::Blocks { .. } => {
                let mut all = Vec::with_capacity(self.dim());
                let mut singular = false;
                for b in self.to_blocks(a)? {
                    all.extend(eigenvalues(&b)?);
                    singular |= numerical_rank(&b, &self.tol) < b.rows();
                }
                Ok((all, singular))
            }
            Presentation::Structure { .. } => {
                let l = self.left_regular_matrix(a);
                let singular = numerical_rank(&l, &self.tol) < l.rows();
                Ok((eigenvalues(&l)?, singular))
            }
        }
    }

    /// Clustered spectrum. Values within `cluster_tol * max(1, |a|)` of the
    /// origin are treated as zero.
    pub fn spectrum(&self, a: &Element) -> Result<Spectrum> {
        self.check(a)?;
        let (values, singular) = self.raw_eigenvalues(a)?;
        let zero_radius = self.tol.cluster_tol * a.norm().max(1.0);
        let mut nonzero = Vec::new();
        let mut zero_count = 0;
        for c in cluster_spectrum(&values, &self.tol) {
            if c.value.norm() <= zero_radius {
                zero_count += c.count;
            } else {
                nonzero.push(c);
            }
        }
        let includes_zero = zero_count > 0 || singular;
        Ok(Spectrum { nonzero, includes_zero, zero_count, counts_are_multiplicities: self.is_blocks() })
    }

    /// Deterministic random element for a given seed and profile.
    pub fn random_element(&self, seed: u64, profile: RandomProfile) -> Element {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = self.dim();
        let mut gauss = || {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        };
        match profile {
            RandomProfile::Dense => Element((0..d).map(|_| gauss()).collect()),
            RandomProfile::NearIdentity(eps) => {
                let dense = Element((0..d).map(|_| gauss()).collect());
                if eps == 0.0 {
                    return self.one();
                }
                self.one().plus(&dense.scaled(C64::new(eps, 0.0)))
            }
            RandomProfile::HermitianLike => match &self.iso {
                Some(iso) => {
                    let blocks: Vec<CMatrix> = iso
                        .sizes
                        .iter()
                        .map(|&n| {
                            let g = CMatrix::from_fn(n, n, |_, _| gauss());
                            g.try_add(&g.adjoint()).expect("square").scale(C64::new(0.5, 0.0))
                        })
                        .collect();
                    self.from_blocks(&blocks).expect("shapes from the decomposition")
                }
                None => Element((0..d).map(|_| C64::new(gauss().re, 0.0)).collect()),
            },
        }
    }

    /// Random element whose block `b` has rank `ranks[b]` (almost surely).
    pub fn random_element_with_ranks(&self, seed: u64, ranks: &[usize]) -> Result<Element> {
        let sizes = self.block_sizes()?;
        if ranks.len() != sizes.len() || ranks.iter().zip(&sizes).any(|(r, n)| r > n) {
            return Err(SocleError::Precondition(format!("ranks {ranks:?} incompatible with block sizes {sizes:?}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gauss = || {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        };
        let blocks: Vec<CMatrix> = sizes
            .iter()
            .zip(ranks)
            .map(|(&n, &r)| {
                let left = CMatrix::from_fn(n, r, |_, _| gauss());
                let right = CMatrix::from_fn(r, n, |_, _| gauss());
                left.matmul(&right).expect("inner dimensions agree")
            })
            .collect();
        self.from_blocks(&blocks)
    }
}

/// Binary operations accepted by [`Algebra::ring_op`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
    Commutator,
}

/// Deterministic sub-seed derivation.
pub(crate) fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
