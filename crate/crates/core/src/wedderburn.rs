//! Matrix-unit decompositions: separating elements, dual bases, matrix
//! units, the isomorphism with a direct sum of full matrix algebras, and
//! enveloping matrix subalgebras.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::algebra::{mix_seed, Algebra, Element, RandomProfile};
use crate::error::{Result, SocleError};
use crate::ideal::{check_projection, pairwise_dim};
use crate::linalg::{inner, inverse, min_norm_solve, CMatrix, C64, ONE, ZERO};
use crate::spectral::{corner_space, riesz_projection, trace};
use crate::subspace::Subspace;

/// Retry cap for drawing a splitting element.
pub const HARVEST_RETRIES: usize = 16;
/// Random pairs used to certify multiplicativity.
pub const MULTIPLICATIVE_PAIRS: usize = 20;

/// Isomorphism between an algebra and `M_{n_1} + ... + M_{n_k}`.
///
/// `backward` maps concatenated row-major block coordinates to algebra
/// coordinates; its columns are the matrix units. `forward` is its inverse.
#[derive(Debug, Clone)]
pub struct WedderburnIso {
    pub sizes: Vec<usize>,
    pub forward: CMatrix,
    pub backward: CMatrix,
    canonical: bool,
}

impl WedderburnIso {
    /// The identity isomorphism of a block presentation.
    pub fn canonical(sizes: &[usize]) -> Self {
        let d: usize = sizes.iter().map(|n| n * n).sum();
        WedderburnIso {
            sizes: sizes.to_vec(),
            forward: CMatrix::identity(d),
            backward: CMatrix::identity(d),
            canonical: true,
        }
    }

    pub fn new(sizes: Vec<usize>, forward: CMatrix, backward: CMatrix) -> Self {
        WedderburnIso { sizes, forward, backward, canonical: false }
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    pub fn dim(&self) -> usize {
        self.backward.rows()
    }

    pub fn offset(&self, block: usize) -> usize {
        self.sizes[..block].iter().map(|n| n * n).sum()
    }

    /// Matrix unit `e^{(block)}_{ij}`.
    pub fn unit(&self, block: usize, i: usize, j: usize) -> Element {
        let n = self.sizes[block];
        Element::from_coords(self.backward.column(self.offset(block) + i * n + j))
    }

    /// Identity of one block (a central idempotent).
    pub fn block_identity(&self, block: usize) -> Element {
        let n = self.sizes[block];
        let mut acc = Element::from_coords(vec![ZERO; self.dim()]);
        for i in 0..n {
            acc = acc.plus(&self.unit(block, i, i));
        }
        acc
    }

    pub fn to_file(&self) -> IsoFile {
        let pairs = |m: &CMatrix| -> Vec<Vec<Pair>> {
            (0..m.rows()).map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
        };
        let mut unit = vec![ZERO; self.dim()];
        for b in 0..self.sizes.len() {
            unit.iter_mut().zip(self.block_identity(b).coords()).for_each(|(u, e)| *u += e);
        }
        IsoFile {
            sizes: self.sizes.clone(),
            unit: unit.iter().map(|z| [z.re, z.im]).collect(),
            forward: pairs(&self.forward),
            backward: pairs(&self.backward),
        }
    }

    pub fn from_file(file: &IsoFile) -> Result<Self> {
        let d: usize = file.sizes.iter().map(|n| n * n).sum();
        let matrix = |rows: &Vec<Vec<Pair>>| -> Result<CMatrix> {
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return Err(SocleError::Dimension(format!("isomorphism matrices must be {d}x{d}")));
            }
            Ok(CMatrix::from_fn(d, d, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
        };
        Ok(WedderburnIso::new(file.sizes.clone(), matrix(&file.forward)?, matrix(&file.backward)?))
    }
}

type Pair = [f64; 2];

/// JSON form of a [`WedderburnIso`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsoFile {
    pub sizes: Vec<usize>,
    pub unit: Vec<Pair>,
    pub forward: Vec<Vec<Pair>>,
    pub backward: Vec<Vec<Pair>>,
}

/// Dual bases of `Ap` and `pA` beyond `p` itself: `v_i u_j = delta_ij p`.
#[derive(Debug, Clone)]
pub struct DualBases {
    pub p: Element,
    pub us: Vec<Element>,
    pub vs: Vec<Element>,
}

impl DualBases {
    /// `dim Ap = dim pA`.
    pub fn n(&self) -> usize {
        self.us.len() + 1
    }
}

#[derive(Debug, Clone)]
pub struct MatrixUnits {
    pub n: usize,
    /// `units[i][j] = e_{ij}`.
    pub units: Vec<Vec<Element>>,
    pub relation_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IsoReport {
    pub sizes: Vec<usize>,
    pub relation_residual: f64,
    pub unit_residual: f64,
    pub roundtrip_residual: f64,
    pub multiplicative_residual: f64,
}

impl IsoReport {
    pub fn worst(&self) -> f64 {
        self.relation_residual.max(self.unit_residual).max(self.roundtrip_residual).max(self.multiplicative_residual)
    }
}

#[derive(Debug, Clone)]
pub struct EnvelopingReport {
    pub subalgebra: Subspace,
    pub sizes: Vec<usize>,
    pub contains_generators: bool,
    pub contains_corners: bool,
    pub closed: bool,
}

fn rel(alg: &Algebra, residual: f64, norms: &[f64]) -> f64 {
    let scale = norms.iter().product::<f64>() * alg.mult_bound().powi(norms.len() as i32 - 1);
    residual / scale.max(f64::MIN_POSITIVE)
}

/// Coefficient of `x` along the minimal projection `p` (`x` in `C p`).
fn coef(p: &Element, x: &Element) -> C64 {
    inner(p.coords(), x.coords()) / p.norm().powi(2)
}

/// `tau_c(x)` for a rank-one `c`, read off from `c x c = tau_c(x) c`.
pub fn tau(alg: &Algebra, c: &Element, x: &Element) -> C64 {
    coef(c, &alg.mul3(c, x, c))
}

/// Largest relative residual of `c x c = Tr(c x) c` over the basis.
pub fn characteristic_functional_check(alg: &Algebra, c: &Element) -> Result<f64> {
    let mut worst = 0.0f64;
    for x in alg.basis_elements() {
        let t = trace(alg, &alg.mul(c, &x))?;
        let r = alg.mul3(c, &x, c).distance(&c.scaled(t));
        worst = worst.max(rel(alg, r, &[c.norm(), 1.0, c.norm()]));
    }
    Ok(worst)
}

/// `y` with `Tr(b y) = 1` and `Tr(a_i y) = 0`, so that `sigma(b y) != {0}`
/// while each `a_i y` is quasinilpotent.
pub fn separating_element(alg: &Algebra, b: &Element, others: &[Element]) -> Result<Element> {
    alg.check(b)?;
    let mut all = vec![b.clone()];
    all.extend(others.iter().cloned());
    let span = Subspace::span(alg.dim(), &all, alg.tol());
    if span.dim() != all.len() {
        return Err(SocleError::Precondition("separating element needs linearly independent inputs".into()));
    }
    let gens = alg.basis_elements();
    let t = CMatrix::from_fn(all.len(), alg.dim(), |r, k| tau(alg, &all[r], &gens[k]));
    let mut rhs = vec![ZERO; all.len()];
    rhs[0] = ONE;
    let y = Element::from_coords(
        min_norm_solve(&t, &rhs, alg.tol())
            .map_err(|_| SocleError::Precondition("trace functionals are dependent".into()))?,
    );
    if alg.spectrum(&alg.mul(b, &y))?.nonzero.is_empty() {
        return Err(SocleError::Numeric("separating element leaves sigma(by) = {0}".into()));
    }
    for a in others {
        if !alg.spectrum(&alg.mul(a, &y))?.nonzero.is_empty() {
            return Err(SocleError::Numeric("separating element leaves nonzero spectrum on a_i y".into()));
        }
    }
    Ok(y)
}

fn normalized(x: &Element) -> Element {
    x.scaled(C64::new(1.0 / x.norm(), 0.0))
}

/// Grows dual families `us` in `(1-p)Ap`, `vs` in `pA(1-p)` until their
/// spans contain the given candidates, keeping `v_i u_j = delta_ij p`.
fn extend_duals(
    alg: &Algebra,
    p: &Element,
    us: &mut Vec<Element>,
    vs: &mut Vec<Element>,
    s_cands: &[Element],
    t_cands: &[Element],
) -> Result<()> {
    let one_minus_p = alg.one().minus(p);
    let s0: Vec<Element> = s_cands.iter().map(|s| alg.mul(&one_minus_p, s)).collect();
    let t0: Vec<Element> = t_cands.iter().map(|t| alg.mul(t, &one_minus_p)).collect();
    let tol = alg.tol();
    let ref_scale = |v: &[Element]| v.iter().map(Element::norm).fold(0.0, f64::max) * alg.mult_bound();
    let s_basis = Subspace::span_scaled(alg.dim(), &s0, tol.rank_tol, ref_scale(s_cands)).basis().to_vec();
    let t_basis = Subspace::span_scaled(alg.dim(), &t0, tol.rank_tol, ref_scale(t_cands)).basis().to_vec();

    for s in s_basis {
        let mut s = normalized(&s);
        for (u, v) in us.iter().zip(vs.iter()) {
            s = s.minus(&u.scaled(coef(p, &alg.mul(v, &s))));
        }
        if s.norm() <= tol.residual_tol.sqrt() {
            continue;
        }
        let s = normalized(&s);
        let y = separating_element(alg, &s, us)?;
        let w = alg.mul3(p, &y, &one_minus_p);
        us.push(s);
        vs.push(w);
    }
    for t in t_basis {
        let mut t = normalized(&t);
        for (u, v) in us.iter().zip(vs.iter()) {
            t = t.minus(&v.scaled(coef(p, &alg.mul(&t, u))));
        }
        if t.norm() <= tol.residual_tol.sqrt() {
            continue;
        }
        let t = normalized(&t);
        let y = separating_element(alg, &t, vs)?;
        let w = alg.mul3(&one_minus_p, &y, p);
        us.push(w);
        vs.push(t);
    }
    Ok(())
}

/// Worst relative residual of the dual-basis identities.
pub fn dual_bases_residual(alg: &Algebra, d: &DualBases) -> f64 {
    let p = &d.p;
    let mut worst = 0.0f64;
    let zero = alg.zero();
    let mut check = |lhs: Element, rhs: &Element, norms: &[f64]| {
        worst = worst.max(rel(alg, lhs.distance(rhs), norms));
    };
    for (i, (u, v)) in d.us.iter().zip(&d.vs).enumerate() {
        check(alg.mul(p, u), &zero, &[p.norm(), u.norm()]);
        check(alg.mul(v, p), &zero, &[v.norm(), p.norm()]);
        check(alg.mul(u, u), &zero, &[u.norm(), u.norm()]);
        check(alg.mul(v, v), &zero, &[v.norm(), v.norm()]);
        check(alg.mul(u, p), u, &[u.norm(), p.norm()]);
        check(alg.mul(p, v), v, &[p.norm(), v.norm()]);
        for (j, uj) in d.us.iter().enumerate() {
            let expected = if i == j { p.clone() } else { zero.clone() };
            check(alg.mul(v, uj), &expected, &[v.norm(), uj.norm()]);
        }
    }
    worst
}

/// Dual bases `{p, u_2..u_n}` of `Ap` and `{p, v_2..v_n}` of `pA`.
pub fn dual_bases(alg: &Algebra, p: &Element) -> Result<DualBases> {
    check_projection(alg, p)?;
    if corner_space(alg, p).dim() != 1 {
        return Err(SocleError::Precondition("dual bases need a minimal projection".into()));
    }
    let cands: Vec<Element> = alg.basis_elements().iter().map(|e| alg.mul(e, p)).collect();
    let mut us = Vec::new();
    let mut vs = Vec::new();
    extend_duals(alg, p, &mut us, &mut vs, &cands, &[])?;
    let d = DualBases { p: p.clone(), us, vs };
    let r = dual_bases_residual(alg, &d);
    if r > alg.tol().residual_tol {
        return Err(SocleError::Numeric(format!("dual basis residual {r:.3e}")));
    }
    Ok(d)
}

fn units_from_duals(alg: &Algebra, p: &Element, us: &[Element], vs: &[Element]) -> Vec<Vec<Element>> {
    let col: Vec<Element> = std::iter::once(p.clone()).chain(us.iter().cloned()).collect();
    let row: Vec<Element> = std::iter::once(p.clone()).chain(vs.iter().cloned()).collect();
    col.iter().map(|u| row.iter().map(|v| alg.mul(u, v)).collect()).collect()
}

fn relation_residual(alg: &Algebra, units: &[Vec<Element>]) -> f64 {
    let n = units.len();
    let zero = alg.zero();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let prod = alg.mul(&units[i][j], &units[k][l]);
                    let expected = if j == k { &units[i][l] } else { &zero };
                    let r = prod.distance(expected);
                    worst = worst.max(rel(alg, r, &[units[i][j].norm(), units[k][l].norm()]));
                }
            }
        }
    }
    worst
}

/// Matrix units of `J_p` with `e_11 = p`.
pub fn matrix_units(alg: &Algebra, p: &Element, seed: u64) -> Result<MatrixUnits> {
    let d = dual_bases(alg, p)?;
    let units = units_from_duals(alg, p, &d.us, &d.vs);
    let n = units.len();
    let relation = relation_residual(alg, &units);
    if relation > alg.tol().residual_tol {
        return Err(SocleError::Numeric(format!("matrix unit residual {relation:.3e}")));
    }
    // phi multiplicative on random pairs of J_p
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = || C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
    let combine = |m: &CMatrix| {
        let mut acc = alg.zero();
        for i in 0..n {
            for j in 0..n {
                acc = acc.plus(&units[i][j].scaled(m[(i, j)]));
            }
        }
        acc
    };
    for _ in 0..4 {
        let x = CMatrix::from_fn(n, n, |_, _| gauss());
        let y = CMatrix::from_fn(n, n, |_, _| gauss());
        let lhs = alg.mul(&combine(&x), &combine(&y));
        let rhs = combine(&(&x * &y));
        let r = rel(alg, lhs.distance(&rhs), &[combine(&x).norm(), combine(&y).norm()]);
        if r > alg.tol().residual_tol {
            return Err(SocleError::Numeric(format!("matrix units not multiplicative ({r:.3e})")));
        }
    }
    Ok(MatrixUnits { n, units, relation_residual: relation })
}

/// Minimal projections harvested from the Riesz projections of one random
/// element; retried until they sum to the identity.
pub fn harvest_minimal_projections(alg: &Algebra, seed: u64) -> Result<Vec<Element>> {
    let one = alg.one();
    let mut last = String::new();
    for attempt in 0..HARVEST_RETRIES {
        let a = alg.random_element(mix_seed(seed, attempt as u64), RandomProfile::Dense);
        let attempt_result = (|| -> Result<Option<Vec<Element>>> {
            let spec = alg.spectrum(&a)?;
            let mut kept = Vec::new();
            for c in &spec.nonzero {
                let p = riesz_projection(alg, &a, &[c.value])?;
                if corner_space(alg, &p).dim() == 1 {
                    kept.push(p);
                }
            }
            let sum = kept.iter().fold(alg.zero(), |acc, p| acc.plus(p));
            let scale = kept.iter().map(Element::norm).fold(one.norm(), f64::max);
            if sum.distance(&one) <= alg.tol().residual_tol * scale {
                Ok(Some(kept))
            } else {
                Ok(None)
            }
        })();
        match attempt_result {
            Ok(Some(kept)) => return Ok(kept),
            Ok(None) => last = "minimal projections did not sum to 1".into(),
            Err(e) => last = e.to_string(),
        }
    }
    Err(SocleError::DecompositionFailed(format!("no splitting element in {HARVEST_RETRIES} draws: {last}")))
}

/// Groups projections into classes connected by `dim pAq != 0`.
pub fn group_classes(alg: &Algebra, projections: &[Element]) -> Result<Vec<Vec<usize>>> {
    let m = projections.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..m {
        for j in (i + 1)..m {
            if find(&mut parent, i) == find(&mut parent, j) {
                continue;
            }
            if pairwise_dim(alg, &projections[i], &projections[j])? != 0 {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[rj] = ri;
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut roots: Vec<usize> = Vec::new();
    for i in 0..m {
        let r = find(&mut parent, i);
        match roots.iter().position(|&x| x == r) {
            Some(k) => classes[k].push(i),
            None => {
                roots.push(r);
                classes.push(vec![i]);
            }
        }
    }
    Ok(classes)
}

/// Checks every invariant of `iso` against `alg`.
pub fn verify_iso(alg: &Algebra, iso: &WedderburnIso, seed: u64) -> Result<IsoReport> {
    let d = alg.dim();
    if iso.dim() != d || iso.sizes.iter().map(|n| n * n).sum::<usize>() != d {
        return Err(SocleError::Dimension("isomorphism does not match the algebra".into()));
    }
    let mut relation = 0.0f64;
    let mut unit_sum = alg.zero();
    for (b, &n) in iso.sizes.iter().enumerate() {
        let units: Vec<Vec<Element>> = (0..n).map(|i| (0..n).map(|j| iso.unit(b, i, j)).collect()).collect();
        relation = relation.max(relation_residual(alg, &units));
        unit_sum = unit_sum.plus(&iso.block_identity(b));
        // cross-block products vanish
        for (c, &m) in iso.sizes.iter().enumerate().skip(b + 1) {
            for i in 0..n {
                for k in 0..m {
                    let x = iso.unit(b, i, i);
                    let y = iso.unit(c, k, k);
                    let r = alg.mul(&x, &y).norm().max(alg.mul(&y, &x).norm());
                    relation = relation.max(rel(alg, r, &[x.norm(), y.norm()]));
                }
            }
        }
    }
    let one = alg.one();
    let unit_residual = unit_sum.distance(&one) / one.norm().max(1.0);
    let roundtrip_residual = iso.forward.matmul(&iso.backward)?.try_sub(&CMatrix::identity(d))?.max_abs();

    let mut mult = 0.0f64;
    for k in 0..MULTIPLICATIVE_PAIRS {
        let x = alg.random_element(mix_seed(seed, 7000 + 2 * k as u64), RandomProfile::Dense);
        let y = alg.random_element(mix_seed(seed, 7001 + 2 * k as u64), RandomProfile::Dense);
        let fx = blocks_of(iso, &iso.forward.matvec(x.coords())?)?;
        let fy = blocks_of(iso, &iso.forward.matvec(y.coords())?)?;
        let fxy = blocks_of(iso, &iso.forward.matvec(alg.mul(&x, &y).coords())?)?;
        let mut num = 0.0f64;
        let mut nx = 0.0f64;
        let mut ny = 0.0f64;
        for ((a, b), c) in fx.iter().zip(&fy).zip(&fxy) {
            num += (a * b).try_sub(c)?.norm_fro().powi(2);
            nx += a.norm_fro().powi(2);
            ny += b.norm_fro().powi(2);
        }
        mult = mult.max(num.sqrt() / (nx.sqrt() * ny.sqrt()).max(f64::MIN_POSITIVE));
    }
    Ok(IsoReport {
        sizes: iso.sizes.clone(),
        relation_residual: relation,
        unit_residual,
        roundtrip_residual,
        multiplicative_residual: mult,
    })
}

fn blocks_of(iso: &WedderburnIso, flat: &[C64]) -> Result<Vec<CMatrix>> {
    let mut out = Vec::with_capacity(iso.sizes.len());
    let mut off = 0;
    for &n in &iso.sizes {
        out.push(CMatrix::from_row_major(n, n, flat[off..off + n * n].to_vec())?);
        off += n * n;
    }
    Ok(out)
}

/// Decomposes a semisimple algebra into full matrix blocks.
pub fn wedderburn_decompose(alg: &Algebra, seed: u64) -> Result<WedderburnIso> {
    let fail = |e: SocleError| match e {
        SocleError::DecompositionFailed(_) => e,
        other => SocleError::DecompositionFailed(other.to_string()),
    };
    let projections = harvest_minimal_projections(alg, seed)?;
    let classes = group_classes(alg, &projections).map_err(fail)?;
    let mut blocks: Vec<MatrixUnits> = Vec::with_capacity(classes.len());
    for (k, class) in classes.iter().enumerate() {
        let mu = matrix_units(alg, &projections[class[0]], mix_seed(seed, 500 + k as u64)).map_err(fail)?;
        if mu.n != class.len() {
            return Err(SocleError::DecompositionFailed(format!(
                "class of {} minimal projections spans a {}x{} block",
                class.len(),
                mu.n,
                mu.n
            )));
        }
        blocks.push(mu);
    }
    // larger blocks first; ties keep harvest order
    blocks.sort_by_key(|b| std::cmp::Reverse(b.n));
    let sizes: Vec<usize> = blocks.iter().map(|b| b.n).collect();
    let d = alg.dim();
    if sizes.iter().map(|n| n * n).sum::<usize>() != d {
        return Err(SocleError::DecompositionFailed(format!(
            "blocks {sizes:?} do not fill dimension {d} (algebra not semisimple?)"
        )));
    }
    let columns: Vec<Vec<C64>> =
        blocks.iter().flat_map(|b| b.units.iter().flatten().map(|e| e.coords().to_vec())).collect();
    let backward = CMatrix::from_columns(d, &columns);
    let forward = inverse(&backward, alg.tol())
        .map_err(fail)?
        .ok_or_else(|| SocleError::DecompositionFailed("matrix units are linearly dependent".into()))?;
    let iso = WedderburnIso::new(sizes, forward, backward);
    let report = verify_iso(alg, &iso, seed).map_err(fail)?;
    if report.worst() > alg.tol().residual_tol {
        return Err(SocleError::DecompositionFailed(format!("isomorphism residual {:.3e}", report.worst())));
    }
    Ok(iso)
}

/// Decomposes and attaches the result, enabling block-level operations.
pub fn attach_decomposition(alg: &mut Algebra, seed: u64) -> Result<()> {
    if alg.has_iso() {
        return Ok(());
    }
    let iso = wedderburn_decompose(alg, seed)?;
    alg.set_iso(iso)
}

/// A matrix subalgebra `B` containing each `z_j` and each corner `z_j A z_j`,
/// built per block from dual families around the block's first minimal
/// projection.
pub fn enveloping_subalgebra(alg: &Algebra, zs: &[Element]) -> Result<EnvelopingReport> {
    if zs.is_empty() {
        return Err(SocleError::Precondition("need at least one generator".into()));
    }
    for z in zs {
        alg.check(z)?;
    }
    let iso = alg.iso()?;
    let gens = alg.basis_elements();
    let mut spanning = Vec::new();
    let mut sizes = Vec::new();
    for b in 0..iso.sizes.len() {
        let c = iso.block_identity(b);
        let parts: Vec<Element> = zs.iter().map(|z| alg.mul(z, &c)).collect();
        let scale = zs.iter().map(Element::norm).fold(0.0, f64::max) * alg.mult_bound();
        if parts.iter().all(|z| z.norm() <= alg.tol().residual_tol * scale.max(1.0)) {
            continue;
        }
        let p = iso.unit(b, 0, 0);
        let mut s_cands = Vec::new();
        let mut t_cands = Vec::new();
        for z in &parts {
            for e in &gens {
                s_cands.push(alg.mul3(z, e, &p));
                t_cands.push(alg.mul3(&p, e, z));
            }
        }
        let mut us = Vec::new();
        let mut vs = Vec::new();
        extend_duals(alg, &p, &mut us, &mut vs, &s_cands, &t_cands)?;
        let units = units_from_duals(alg, &p, &us, &vs);
        sizes.push(units.len());
        spanning.extend(units.into_iter().flatten());
    }
    if spanning.is_empty() {
        let p = iso.unit(0, 0, 0);
        spanning.push(p);
        sizes.push(1);
    }
    let sub = Subspace::span(alg.dim(), &spanning, alg.tol());
    let tol = alg.tol();
    let contains_generators = zs.iter().all(|z| sub.contains(z, tol));
    let contains_corners = zs.iter().all(|z| gens.iter().all(|x| sub.contains(&alg.mul3(z, x, z), tol)));
    let basis = sub.orthonormal();
    let closed = basis.iter().all(|x| basis.iter().all(|y| sub.contains(&alg.mul(x, y), tol)));
    Ok(EnvelopingReport { subalgebra: sub, sizes, contains_generators, contains_corners, closed })
}
