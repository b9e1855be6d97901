//! JSON instance files and the seeded instance generator.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::algebra::{mix_seed, Algebra, Element, Presentation, RandomProfile};
use crate::error::{Result, SocleError};
use crate::linalg::{inverse, CMatrix, Tolerance, C64};

pub type Pair = [f64; 2];

/// Largest accepted condition estimate for a scrambling basis.
pub const SCRAMBLE_COND_CAP: f64 = 1e3;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AlgebraSpec {
    Blocks {
        sizes: Vec<usize>,
    },
    Structure {
        dim: usize,
        /// `table[i][j][k]` is the coefficient of `e_k` in `e_i e_j`.
        table: Vec<Vec<Vec<Pair>>>,
        unit: Vec<Pair>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementSpec {
    Blocks(Vec<Vec<Vec<Pair>>>),
    Coords(Vec<Pair>),
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    pub rank: Option<f64>,
    pub cluster: Option<f64>,
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub algebra: AlgebraSpec,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub elements: BTreeMap<String, ElementSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceSpec>,
}

fn c(p: &Pair) -> C64 {
    C64::new(p[0], p[1])
}

fn pair(z: C64) -> Pair {
    [z.re, z.im]
}

impl ToleranceSpec {
    pub fn apply(&self, base: Tolerance) -> Result<Tolerance> {
        let t = Tolerance {
            rank_tol: self.rank.unwrap_or(base.rank_tol),
            cluster_tol: self.cluster.unwrap_or(base.cluster_tol),
            residual_tol: self.residual.unwrap_or(base.residual_tol),
        };
        t.validate()?;
        Ok(t)
    }
}

impl InstanceFile {
    pub fn parse(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance files serialize")
    }

    /// Builds the algebra; `base` is overridden by the file's tolerances.
    pub fn algebra(&self, base: Tolerance) -> Result<Algebra> {
        let tol = match &self.tolerances {
            Some(t) => t.apply(base)?,
            None => base,
        };
        match &self.algebra {
            AlgebraSpec::Blocks { sizes } => Algebra::blocks(sizes, tol),
            AlgebraSpec::Structure { dim, table, unit } => {
                let d = *dim;
                if table.len() != d || table.iter().any(|r| r.len() != d || r.iter().any(|t| t.len() != d)) {
                    return Err(SocleError::InvalidAlgebra(format!("structure table must be {d}x{d}x{d}")));
                }
                let flat: Vec<C64> = table.iter().flatten().flatten().map(c).collect();
                Algebra::structure(d, flat, unit.iter().map(c).collect(), tol)
            }
        }
    }

    pub fn element(&self, alg: &Algebra, name: &str) -> Result<Element> {
        let spec = self
            .elements
            .get(name)
            .ok_or_else(|| SocleError::Precondition(format!("instance has no element named {name:?}")))?;
        match spec {
            ElementSpec::Coords(v) => alg.element(v.iter().map(c).collect()),
            ElementSpec::Blocks(blocks) => {
                let mats = blocks
                    .iter()
                    .map(|rows| {
                        let n = rows.len();
                        if rows.iter().any(|r| r.len() != n) {
                            return Err(SocleError::Dimension("element blocks must be square".into()));
                        }
                        Ok(CMatrix::from_fn(n, n, |i, j| c(&rows[i][j])))
                    })
                    .collect::<Result<Vec<_>>>()?;
                alg.from_blocks(&mats)
            }
        }
    }

    /// Serializable description of an algebra.
    pub fn from_algebra(alg: &Algebra) -> Self {
        let algebra = match alg.presentation() {
            Presentation::Blocks { sizes } => AlgebraSpec::Blocks { sizes: sizes.clone() },
            Presentation::Structure { dim, table, unit } => {
                let d = *dim;
                AlgebraSpec::Structure {
                    dim: d,
                    table: (0..d)
                        .map(|i| (0..d).map(|j| (0..d).map(|k| pair(table[(i * d + j) * d + k])).collect()).collect())
                        .collect(),
                    unit: unit.iter().map(|&z| pair(z)).collect(),
                }
            }
        };
        InstanceFile { algebra, elements: BTreeMap::new(), tolerances: None }
    }

    pub fn insert_coords(&mut self, name: &str, a: &Element) {
        self.elements.insert(name.to_string(), ElementSpec::Coords(a.coords().iter().map(|&z| pair(z)).collect()));
    }

    pub fn insert_blocks(&mut self, name: &str, blocks: &[CMatrix]) {
        let spec = blocks
            .iter()
            .map(|m| (0..m.rows()).map(|i| (0..m.cols()).map(|j| pair(m[(i, j)])).collect()).collect())
            .collect();
        self.elements.insert(name.to_string(), ElementSpec::Blocks(spec));
    }
}

/// Structure constants of any algebra in its own basis.
pub fn structure_table(alg: &Algebra) -> Vec<C64> {
    let d = alg.dim();
    let mut table = vec![C64::new(0.0, 0.0); d * d * d];
    let basis = alg.basis_elements();
    for i in 0..d {
        for j in 0..d {
            let prod = alg.mul(&basis[i], &basis[j]);
            table[(i * d + j) * d..(i * d + j + 1) * d].copy_from_slice(prod.coords());
        }
    }
    table
}

/// Random change of basis `B` (columns are the new basis vectors in old
/// coordinates) together with `B^{-1}`.
pub fn scrambling_basis(d: usize, seed: u64, tol: &Tolerance) -> Result<(CMatrix, CMatrix)> {
    for attempt in 0..64u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 9000 + attempt));
        let b = CMatrix::from_fn(d, d, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im)
        });
        let Some(inv) = inverse(&b, tol)? else { continue };
        let cond = b.norm_fro() * inv.norm_fro() / d as f64;
        if cond <= SCRAMBLE_COND_CAP {
            return Ok((b, inv));
        }
    }
    Err(SocleError::Numeric("no well-conditioned scrambling basis found".into()))
}

/// The same algebra in a random basis, as structure constants.
pub fn scramble(alg: &Algebra, seed: u64) -> Result<(Algebra, CMatrix, CMatrix)> {
    let d = alg.dim();
    let (b, binv) = scrambling_basis(d, seed, alg.tol())?;
    let fs: Vec<Element> = (0..d).map(|i| Element::from_coords(b.column(i))).collect();
    let mut table = vec![C64::new(0.0, 0.0); d * d * d];
    for i in 0..d {
        for j in 0..d {
            let prod = binv.matvec(alg.mul(&fs[i], &fs[j]).coords())?;
            table[(i * d + j) * d..(i * d + j + 1) * d].copy_from_slice(&prod);
        }
    }
    let unit = binv.matvec(alg.one().coords())?;
    let scrambled = Algebra::structure(d, table, unit, *alg.tol())?;
    Ok((scrambled, b, binv))
}

/// Seeded instance: the block algebra (optionally scrambled) with a dense
/// random element `a`.
pub fn generate(sizes: &[usize], seed: u64, scrambled: bool, tol: Tolerance) -> Result<InstanceFile> {
    let alg = Algebra::blocks(sizes, tol)?;
    let a = alg.random_element(seed, RandomProfile::Dense);
    if !scrambled {
        let mut file = InstanceFile::from_algebra(&alg);
        file.insert_blocks("a", &alg.to_blocks(&a)?);
        return Ok(file);
    }
    let (s, _, binv) = scramble(&alg, seed)?;
    let mut file = InstanceFile::from_algebra(&s);
    file.insert_coords("a", &Element::from_coords(binv.matvec(a.coords())?));
    Ok(file)
}
