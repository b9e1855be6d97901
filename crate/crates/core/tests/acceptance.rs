//! Acceptance suite: one line per criterion, nonzero exit on any failure.
//!
//! Every derived quantity is compared against an oracle written here
//! (elimination ranks, projectors known by construction, a determinant
//! root finder, a structure-table contraction) rather than against the
//! library's own answer.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde_json::Value;

use socle::central::equivalence_harness;
use socle::ideal::{corner_dim, is_minimal_projection, tensor_model_check};
use socle::instance::scramble;
use socle::linalg::{eigenvalues, CMatrix};
use socle::shoda::{corner_square_route, in_commutator_space, shoda_socle};
use socle::spectral::{
    diagonalize_maximal, is_maximal_rank, rank_direct, riesz_projection, riesz_projection_contour, spectral_data,
    spectral_rank, trace,
};
use socle::wedderburn::{attach_decomposition, dual_bases, harvest_minimal_projections, matrix_units};
use socle::{Algebra, Element, SocleError, Tolerance};

// Pinned tolerances.
const RESIDUAL: f64 = 1e-8;
const RIESZ_AGREEMENT: f64 = 1e-6;
const EIGEN_RELATIVE: f64 = 1e-8;
/// Relative pivot cutoff of the elimination oracle.
const ORACLE_RANK_TOL: f64 = 1e-9;
const CONTOUR_NODES: usize = 128;
const RANK_SAMPLES: usize = 32;
const PAIRS_PER_INSTANCE: usize = 20;

const CORPUS: [&[usize]; 8] = [&[1], &[1, 1], &[2], &[2, 1], &[2, 2], &[3], &[1, 1, 1], &[3, 2, 1]];
const CORPUS_SEEDS: u64 = 25;

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

// ---------------------------------------------------------------------------
// oracle helpers

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ stream)
}

fn gauss(r: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(r);
    let im: f64 = StandardNormal.sample(r);
    C64::new(re, im)
}

fn random_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<C64> {
    (0..rows * cols).map(|_| gauss(r)).collect()
}

/// Row-major product of `m x k` and `k x n`.
fn mm(a: &[C64], b: &[C64], m: usize, k: usize, n: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); m * n];
    for i in 0..m {
        for l in 0..k {
            let x = a[i * k + l];
            for j in 0..n {
                out[i * n + j] += x * b[l * n + j];
            }
        }
    }
    out
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Rank by Gaussian elimination with complete pivoting.
fn gauss_rank(m: &[C64], rows: usize, cols: usize) -> usize {
    let mut a = m.to_vec();
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let mut rank = 0;
    for step in 0..rows.min(cols) {
        let (mut pi, mut pj, mut best) = (step, step, 0.0);
        for i in step..rows {
            for j in step..cols {
                if a[i * cols + j].norm() > best {
                    (pi, pj, best) = (i, j, a[i * cols + j].norm());
                }
            }
        }
        if best <= ORACLE_RANK_TOL * scale {
            break;
        }
        for j in 0..cols {
            a.swap(step * cols + j, pi * cols + j);
        }
        for i in 0..rows {
            a.swap(i * cols + step, i * cols + pj);
        }
        let piv = a[step * cols + step];
        for i in step + 1..rows {
            let f = a[i * cols + step] / piv;
            for j in step..cols {
                let t = a[step * cols + j];
                a[i * cols + j] -= f * t;
            }
        }
        rank += 1;
    }
    rank
}

/// Gauss-Jordan inverse with partial pivoting.
fn invert(m: &[C64], n: usize) -> Option<Vec<C64>> {
    let mut a = m.to_vec();
    let mut inv: Vec<C64> = (0..n * n).map(|k| c(f64::from(u8::from(k / n == k % n)))).collect();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm()))?;
        if a[p * n + col].norm() < 1e-300 {
            return None;
        }
        for j in 0..n {
            a.swap(col * n + j, p * n + j);
            inv.swap(col * n + j, p * n + j);
        }
        let d = a[col * n + col];
        for j in 0..n {
            a[col * n + j] /= d;
            inv[col * n + j] /= d;
        }
        for i in 0..n {
            if i != col {
                let f = a[i * n + col];
                for j in 0..n {
                    let (t, u) = (a[col * n + j], inv[col * n + j]);
                    a[i * n + j] -= f * t;
                    inv[i * n + j] -= f * u;
                }
            }
        }
    }
    Some(inv)
}

fn blocks(sizes: &[usize]) -> Algebra {
    Algebra::blocks(sizes, Tolerance::default()).expect("valid sizes")
}

/// Block matrices of an element as row-major vectors.
fn block_parts(alg: &Algebra, a: &Element) -> Vec<(usize, Vec<C64>)> {
    alg.to_blocks(a).unwrap().into_iter().map(|m| (m.rows(), m.as_slice().to_vec())).collect()
}

fn element_from_parts(alg: &Algebra, parts: &[Vec<C64>]) -> Element {
    let sizes = alg.block_sizes().unwrap();
    let mats: Vec<CMatrix> =
        sizes.iter().zip(parts).map(|(&n, v)| CMatrix::from_row_major(n, n, v.clone()).unwrap()).collect();
    alg.from_blocks(&mats).unwrap()
}

/// Classical rank summed over the blocks.
fn oracle_rank(alg: &Algebra, a: &Element) -> usize {
    block_parts(alg, a).iter().map(|(n, m)| gauss_rank(m, *n, *n)).sum()
}

/// `sqrt(sum_ij |e_i e_j|^2)`: bounds `|xy| <= M |x| |y|` in coordinates.
fn mult_bound(alg: &Algebra) -> f64 {
    let basis = alg.basis_elements();
    let mut s = 0.0;
    for x in &basis {
        for y in &basis {
            s += alg.mul(x, y).norm().powi(2);
        }
    }
    s.sqrt()
}

/// Relative residual of `lhs = rhs` where `lhs` is a product of elements
/// with the given norms.
fn rel(residual: f64, norms: &[f64], m: f64) -> f64 {
    let scale = norms.iter().product::<f64>() * m.powi(norms.len() as i32 - 1);
    residual / scale.max(1e-300)
}

/// Random element with a random (possibly zero) rank in every block; the
/// ranks are returned as the oracle.
fn element_with_ranks(alg: &Algebra, seed: u64) -> (Element, Vec<usize>) {
    let sizes = alg.block_sizes().unwrap();
    let mut r = rng(seed, 11);
    let ranks: Vec<usize> = sizes.iter().map(|&n| r.random_range(0..=n)).collect();
    let parts: Vec<Vec<C64>> = sizes
        .iter()
        .zip(&ranks)
        .map(|(&n, &k)| mm(&random_matrix(&mut r, n, k), &random_matrix(&mut r, k, n), n, k, n))
        .collect();
    (element_from_parts(alg, &parts), ranks)
}

/// Traceless in every block. With `low_rank`, each block of size >= 2 has a
/// random rank in `2..=n` (traceless via a weighted middle factor).
fn traceless_element(alg: &Algebra, seed: u64, low_rank: bool) -> Element {
    let sizes = alg.block_sizes().unwrap();
    let mut r = rng(seed, 23);
    let parts: Vec<Vec<C64>> = sizes
        .iter()
        .map(|&n| {
            if n == 1 {
                return vec![c(0.0)];
            }
            let k = if low_rank { r.random_range(2..=n) } else { n };
            let left = random_matrix(&mut r, n, k);
            let right = random_matrix(&mut r, k, n);
            let rl = mm(&right, &left, k, n, k);
            let mut w: Vec<C64> = (0..k).map(|_| gauss(&mut r)).collect();
            let partial: C64 = (0..k - 1).map(|i| w[i] * rl[i * k + i]).sum();
            w[k - 1] = -partial / rl[(k - 1) * k + (k - 1)];
            let mid: Vec<C64> = (0..k * k).map(|t| if t / k == t % k { w[t / k] } else { c(0.0) }).collect();
            mm(&mm(&left, &mid, n, k, k), &right, n, k, n)
        })
        .collect();
    element_from_parts(alg, &parts)
}

/// Corpus instance: block presentation for even seeds, scrambled structure
/// constants (decomposed) for odd seeds.
fn corpus_algebra(sizes: &[usize], seed: u64) -> Algebra {
    let base = blocks(sizes);
    if seed.is_multiple_of(2) {
        return base;
    }
    let (mut s, _, _) = scramble(&base, seed).unwrap();
    attach_decomposition(&mut s, seed).unwrap();
    s
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

// ---------------------------------------------------------------------------
// criteria

fn worked_example() -> Outcome {
    let alg = blocks(&[2, 2]);
    let d = CMatrix::diag(&[c(1.0), c(-1.0)]);
    let a = alg.from_blocks(&[d.clone(), d]).unwrap();
    let mut notes = Vec::new();
    let sampled = spectral_rank(&alg, &a, RANK_SAMPLES, 0).unwrap();
    let direct = rank_direct(&alg, &a).unwrap();
    notes.push((sampled == 4 && direct == 4, format!("rank {sampled}/{direct}")));
    let dim = corner_dim(&alg, &a).unwrap();
    notes.push((dim == 8, format!("dim aAa {dim}")));
    let tr = trace(&alg, &a).unwrap();
    notes.push((tr.norm() <= RESIDUAL, format!("trace {tr:.1e}")));
    match shoda_socle(&alg, &a, 0) {
        Ok(cert) => {
            let check = alg.commutator(&cert.x, &cert.y).distance(&a) / a.norm();
            let rx = oracle_rank(&alg, &cert.x);
            let ry = oracle_rank(&alg, &cert.y);
            notes.push((
                cert.residual <= RESIDUAL && check <= RESIDUAL && rx <= 4 && ry <= 4,
                format!("commutator residual {check:.1e}, ranks {rx}/{ry}"),
            ));
        }
        Err(e) => notes.push((false, format!("shoda error {e}"))),
    }
    let corner = corner_square_route(&alg, &a, 0).unwrap();
    notes.push((
        corner.is_none(),
        format!("corner route {}", if corner.is_none() { "n/a (8 != 16)" } else { "applied" }),
    ));
    let pass = notes.iter().all(|n| n.0);
    outcome(pass, notes.into_iter().map(|n| n.1).collect::<Vec<_>>().join(", "))
}

fn rank_oracle_equivalence() -> Outcome {
    let mut discrepancies = 0;
    let mut total = 0;
    for sizes in [&[2][..], &[3], &[2, 1], &[2, 2], &[3, 2, 1]] {
        let alg = blocks(sizes);
        for seed in 0..100 {
            let (a, ranks) = element_with_ranks(&alg, seed);
            let expected: usize = ranks.iter().sum();
            let sampled = spectral_rank(&alg, &a, RANK_SAMPLES, seed).unwrap_or(usize::MAX);
            let direct = rank_direct(&alg, &a).unwrap();
            total += 1;
            if sampled != direct || direct != expected {
                discrepancies += 1;
            }
        }
    }
    outcome(discrepancies == 0, format!("{total} elements, {discrepancies} discrepancies"))
}

fn multiplicity_bookkeeping() -> Outcome {
    let profiles: [&[usize]; 4] = [&[2, 1], &[3], &[2, 2], &[3, 2, 1]];
    let mut bad = 0;
    for seed in 0..200u64 {
        let alg = blocks(profiles[seed as usize % profiles.len()]);
        let sizes = alg.block_sizes().unwrap();
        let (a, ranks) = element_with_ranks(&alg, 1000 + seed);
        let singular = ranks.iter().zip(&sizes).any(|(r, n)| r < n);
        let expected = ranks.iter().sum::<usize>() + usize::from(singular);
        let got = spectral_data(&alg, &a).map(|d| d.distinct.iter().map(|t| t.multiplicity).sum::<usize>());
        if got.ok() != Some(expected) {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("200 elements, {bad} mismatches"))
}

fn riesz_dual_path() -> Outcome {
    let profiles: [&[usize]; 6] = [&[2], &[3], &[4], &[2, 1], &[2, 2], &[4, 3]];
    let pool = [c(1.0), c(-2.0), C64::new(0.0, 0.5), C64::new(3.0, 1.0), c(0.0)];
    let (mut worst_paths, mut worst_exact) = (0.0f64, 0.0f64);
    let mut failures = 0;
    for seed in 0..50u64 {
        let alg = blocks(profiles[seed as usize % profiles.len()]);
        let sizes = alg.block_sizes().unwrap();
        let mut r = rng(seed, 41);
        let mut parts = Vec::new();
        let mut frames = Vec::new();
        for &n in &sizes {
            let s = loop {
                let s = random_matrix(&mut r, n, n);
                if let Some(inv) = invert(&s, n) {
                    break (s, inv);
                }
            };
            let d: Vec<C64> = (0..n).map(|_| pool[r.random_range(0..pool.len())]).collect();
            let dm: Vec<C64> = (0..n * n).map(|t| if t / n == t % n { d[t / n] } else { c(0.0) }).collect();
            parts.push(mm(&mm(&s.0, &dm, n, n, n), &s.1, n, n, n));
            frames.push((n, s, d));
        }
        let a = element_from_parts(&alg, &parts);
        let mut values: Vec<C64> = frames.iter().flat_map(|f| f.2.clone()).filter(|v| v.norm() > 0.0).collect();
        values.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        values.dedup();
        for &lambda in &values {
            // exact projector S E S^{-1}
            let exact_parts: Vec<Vec<C64>> = frames
                .iter()
                .map(|(n, (s, sinv), d)| {
                    let n = *n;
                    let e: Vec<C64> =
                        (0..n * n).map(|t| c(f64::from(u8::from(t / n == t % n && d[t / n] == lambda)))).collect();
                    mm(&mm(s, &e, n, n, n), sinv, n, n, n)
                })
                .collect();
            let exact = element_from_parts(&alg, &exact_parts);
            let (Ok(schur), Ok(contour)) =
                (riesz_projection(&alg, &a, &[lambda]), riesz_projection_contour(&alg, &a, &[lambda], CONTOUR_NODES))
            else {
                failures += 1;
                continue;
            };
            worst_paths = worst_paths.max(schur.distance(&contour));
            worst_exact = worst_exact.max(schur.distance(&exact).max(contour.distance(&exact)));
        }
    }
    let pass = failures == 0 && worst_paths <= RIESZ_AGREEMENT && worst_exact <= RIESZ_AGREEMENT;
    outcome(
        pass,
        format!("50 elements, paths differ by {worst_paths:.1e}, vs exact {worst_exact:.1e}, {failures} errors"),
    )
}

fn diagonalization() -> Outcome {
    let profiles: [&[usize]; 4] = [&[2, 1], &[3], &[2, 2], &[3, 2, 1]];
    let (mut worst_rec, mut worst_orth) = (0.0f64, 0.0f64);
    let (mut nonminimal, mut errors, mut done, mut seed) = (0, 0, 0, 0u64);
    while done < 100 {
        let alg = blocks(profiles[seed as usize % profiles.len()]);
        let (a, ranks) = element_with_ranks(&alg, 5000 + seed);
        seed += 1;
        // maximality is generic; nonmaximal draws are not part of the sample
        if ranks.iter().sum::<usize>() == 0 || !is_maximal_rank(&alg, &a).unwrap() {
            continue;
        }
        done += 1;
        let Ok(terms) = diagonalize_maximal(&alg, &a) else {
            errors += 1;
            continue;
        };
        let mut rebuilt = alg.zero();
        let mut scale = a.norm();
        for (l, p) in &terms {
            rebuilt = rebuilt.plus(&p.scaled(*l));
            scale = scale.max(l.norm() * p.norm());
        }
        worst_rec = worst_rec.max(rebuilt.distance(&a) / scale);
        for (i, (_, p)) in terms.iter().enumerate() {
            if oracle_rank(&alg, p) != 1 || !is_minimal_projection(&alg, p).unwrap() {
                nonminimal += 1;
            }
            for (j, (_, q)) in terms.iter().enumerate() {
                if i != j {
                    worst_orth = worst_orth.max(alg.mul(p, q).norm() / (p.norm() * q.norm()));
                }
            }
        }
    }
    let pass = errors == 0 && nonminimal == 0 && worst_rec <= RESIDUAL && worst_orth <= RESIDUAL;
    outcome(
        pass,
        format!(
            "100 elements ({} draws), reconstruction {worst_rec:.1e}, orthogonality {worst_orth:.1e}, {nonminimal} non-minimal, {errors} errors",
            seed
        ),
    )
}

/// Harvested minimal projections of every corpus instance.
fn corpus_projections() -> Vec<(Algebra, Vec<Element>)> {
    let mut out = Vec::new();
    for sizes in CORPUS {
        for seed in 0..CORPUS_SEEDS {
            let alg = corpus_algebra(sizes, seed);
            let ps = harvest_minimal_projections(&alg, seed).unwrap();
            out.push((alg, ps));
        }
    }
    out
}

fn column_rank(vectors: &[Element]) -> usize {
    let d = vectors[0].len();
    let mut m = vec![c(0.0); d * vectors.len()];
    for (j, v) in vectors.iter().enumerate() {
        for (i, z) in v.coords().iter().enumerate() {
            m[i * vectors.len() + j] = *z;
        }
    }
    gauss_rank(&m, d, vectors.len())
}

fn tensor_model(corpus: &[(Algebra, Vec<Element>)]) -> Outcome {
    let (mut count, mut bad) = (0, 0);
    let mut worst = 0.0f64;
    for (alg, ps) in corpus {
        let sizes = alg.block_sizes().unwrap();
        let basis = alg.basis_elements();
        for p in ps {
            count += 1;
            let Ok(t) = tensor_model_check(alg, p) else {
                bad += 1;
                continue;
            };
            let left: Vec<Element> = basis.iter().map(|e| alg.mul(e, p)).collect();
            let right: Vec<Element> = basis.iter().map(|e| alg.mul(p, e)).collect();
            let (ap, pa) = (column_rank(&left), column_rank(&right));
            worst = worst.max(t.product_residual);
            let ok = t.dim_ap == ap
                && t.dim_pa == pa
                && ap == pa
                && t.dim_jp == ap * ap
                && sizes.contains(&ap)
                && t.product_residual <= RESIDUAL;
            bad += usize::from(!ok);
        }
    }
    outcome(bad == 0, format!("{count} projections, worst product rule residual {worst:.1e}, {bad} failures"))
}

fn socle_bin() -> &'static str {
    env!("CARGO_BIN_EXE_socle")
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(socle_bin()).args(args).output().expect("socle binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn pairs(v: &Value) -> Vec<C64> {
    v.as_array().unwrap().iter().map(|p| C64::new(p[0].as_f64().unwrap(), p[1].as_f64().unwrap())).collect()
}

fn wedderburn_roundtrip(dir: &Path) -> Outcome {
    let profiles: [&[usize]; 6] = [&[2], &[2, 1], &[2, 2], &[3, 1], &[1, 1, 1], &[3, 2, 1]];
    let (mut count, mut bad) = (0, 0);
    let mut worst = 0.0f64;
    for sizes in profiles {
        let arg = sizes.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",");
        for seed in 0..25u64 {
            count += 1;
            let s = seed.to_string();
            let (code, text) = run_cli(&["gen", "--sizes", &arg, "--seed", &s, "--scramble"]);
            let inst = dir.join(format!("inst-{arg}-{seed}.json"));
            let iso_path = dir.join(format!("iso-{arg}-{seed}.json"));
            std::fs::write(&inst, &text).unwrap();
            let (dcode, _) =
                run_cli(&["decompose", inst.to_str().unwrap(), "--seed", &s, "-o", iso_path.to_str().unwrap()]);
            if code != 0 || dcode != 0 {
                bad += 1;
                continue;
            }
            let file: Value = serde_json::from_str(&text).unwrap();
            let iso: Value = serde_json::from_str(&std::fs::read_to_string(&iso_path).unwrap()).unwrap();
            let got: Vec<usize> = serde_json::from_value(iso["sizes"].clone()).unwrap();
            if sorted(&got) != sorted(sizes) {
                bad += 1;
                continue;
            }
            // x y from the raw table; forward maps coordinates to blocks
            let d = file["algebra"]["dim"].as_u64().unwrap() as usize;
            let table: Vec<C64> = file["algebra"]["table"]
                .as_array()
                .unwrap()
                .iter()
                .flat_map(|row| row.as_array().unwrap().iter().flat_map(pairs).collect::<Vec<_>>())
                .collect();
            let forward: Vec<C64> = iso["forward"].as_array().unwrap().iter().flat_map(pairs).collect();
            let mut r = rng(seed, 71);
            for _ in 0..PAIRS_PER_INSTANCE {
                let x: Vec<C64> = (0..d).map(|_| gauss(&mut r)).collect();
                let y: Vec<C64> = (0..d).map(|_| gauss(&mut r)).collect();
                let mut xy = vec![c(0.0); d];
                for i in 0..d {
                    for j in 0..d {
                        let w = x[i] * y[j];
                        for k in 0..d {
                            xy[k] += w * table[(i * d + j) * d + k];
                        }
                    }
                }
                let (fx, fy, fxy) = (mm(&forward, &x, d, d, 1), mm(&forward, &y, d, d, 1), mm(&forward, &xy, d, d, 1));
                let mut prod = Vec::with_capacity(d);
                let mut off = 0;
                for &n in &got {
                    prod.extend(mm(&fx[off..off + n * n], &fy[off..off + n * n], n, n, n));
                    off += n * n;
                }
                let rel = dist(&prod, &fxy) / (norm(&fx) * norm(&fy)).max(1e-300);
                worst = worst.max(rel);
            }
        }
    }
    let pass = bad == 0 && worst <= RESIDUAL;
    outcome(pass, format!("{count} instances via the CLI, worst multiplicative residual {worst:.1e}, {bad} failures"))
}

fn dual_bases_and_units(corpus: &[(Algebra, Vec<Element>)]) -> Outcome {
    let (mut count, mut units, mut bad) = (0, 0, 0);
    let (mut worst_dual, mut worst_units) = (0.0f64, 0.0f64);
    for (seed, (alg, ps)) in corpus.iter().enumerate() {
        let m = mult_bound(alg);
        let basis = alg.basis_elements();
        for p in ps {
            let left: Vec<Element> = basis.iter().map(|e| alg.mul(e, p)).collect();
            let n = column_rank(&left);
            if n >= 2 {
                count += 1;
                let Ok(db) = dual_bases(alg, p) else {
                    bad += 1;
                    continue;
                };
                let pn = p.norm();
                let mut w = 0.0f64;
                let zero = alg.zero();
                for (i, u) in db.us.iter().enumerate() {
                    let v = &db.vs[i];
                    let (un, vn) = (u.norm(), v.norm());
                    // (i)
                    w = w.max(rel(alg.mul(p, u).norm(), &[pn, un], m));
                    w = w.max(rel(alg.mul(v, p).norm(), &[vn, pn], m));
                    w = w.max(rel(alg.mul(u, u).distance(&zero), &[un, un], m));
                    w = w.max(rel(alg.mul(v, v).distance(&zero), &[vn, vn], m));
                    // (ii)
                    w = w.max(rel(alg.mul(u, p).distance(u), &[un, pn], m));
                    w = w.max(rel(alg.mul(p, v).distance(v), &[pn, vn], m));
                    // (iii)
                    for (j, u2) in db.us.iter().enumerate() {
                        let target = if i == j { p.clone() } else { zero.clone() };
                        w = w.max(rel(alg.mul(v, u2).distance(&target), &[vn, u2.norm()], m));
                    }
                }
                let mut sp = vec![p.clone()];
                sp.extend(db.us.iter().cloned());
                let mut tp = vec![p.clone()];
                tp.extend(db.vs.iter().cloned());
                let spans = column_rank(&sp) == n && column_rank(&tp) == n && db.n() == n;
                worst_dual = worst_dual.max(w);
                bad += usize::from(!spans || w > RESIDUAL);
            }
            units += 1;
            let Ok(mu) = matrix_units(alg, p, seed as u64) else {
                bad += 1;
                continue;
            };
            let mut w = alg.mul(&mu.units[0][0], &mu.units[0][0]).distance(p) / pn_max(p);
            for i in 0..mu.n {
                for j in 0..mu.n {
                    for k in 0..mu.n {
                        for l in 0..mu.n {
                            let (a, b) = (&mu.units[i][j], &mu.units[k][l]);
                            let target = if j == k { mu.units[i][l].clone() } else { alg.zero() };
                            w = w.max(rel(alg.mul(a, b).distance(&target), &[a.norm(), b.norm()], m));
                        }
                    }
                }
            }
            w = w.max(mu.units[0][0].distance(p) / pn_max(p));
            worst_units = worst_units.max(w);
            bad += usize::from(mu.n != n || w > RESIDUAL);
        }
    }
    outcome(
        bad == 0,
        format!(
            "{count} dual bases (worst {worst_dual:.1e}), {units} matrix-unit systems (worst {worst_units:.1e}), {bad} failures"
        ),
    )
}

fn pn_max(p: &Element) -> f64 {
    p.norm().max(1.0)
}

/// Checks a certificate against an independent commutator and rank count.
fn certificate_ok(alg: &Algebra, a: &Element, seed: u64, worst: &mut f64) -> bool {
    let Ok(cert) = shoda_socle(alg, a, seed) else { return false };
    let residual = alg.commutator(&cert.x, &cert.y).distance(a) / a.norm().max(1.0);
    *worst = worst.max(residual);
    let ra = oracle_rank(alg, a);
    // per-component bound: each block of x and y has rank at most that of a
    let per_block = block_parts(alg, a)
        .iter()
        .zip(block_parts(alg, &cert.x).iter().zip(block_parts(alg, &cert.y).iter()))
        .all(|((n, ab), ((_, xb), (_, yb)))| {
            let r = gauss_rank(ab, *n, *n);
            r == 0 || (gauss_rank(xb, *n, *n) <= r && gauss_rank(yb, *n, *n) <= r)
        });
    residual <= RESIDUAL && oracle_rank(alg, &cert.x) <= ra && oracle_rank(alg, &cert.y) <= ra && per_block
}

fn shoda_suite() -> Outcome {
    let mut worst = 0.0f64;
    let mut single_bad = 0;
    for seed in 0..100u64 {
        let alg = blocks(&[2 + seed as usize % 3]);
        let a = traceless_element(&alg, seed, seed % 2 == 1);
        single_bad += usize::from(!certificate_ok(&alg, &a, seed, &mut worst));
    }
    let multi: [&[usize]; 4] = [&[2, 2], &[2, 1], &[3, 1], &[2, 2, 1]];
    let (mut multi_bad, mut obstruction_bad) = (0, 0);
    for seed in 0..40u64 {
        let alg = blocks(multi[seed as usize % multi.len()]);
        let sizes = alg.block_sizes().unwrap();
        let a = traceless_element(&alg, 300 + seed, seed % 2 == 0);
        let gated = in_commutator_space(&alg, &a).map(|m| m.member).unwrap_or(false);
        multi_bad += usize::from(!gated || !certificate_ok(&alg, &a, seed, &mut worst));
        // t (e11, -e11) on two blocks, plus a traceless part
        let t = C64::new(1.0 + seed as f64 / 10.0, 0.5);
        let (i, j) = (0, 1 + seed as usize % (sizes.len() - 1));
        let parts: Vec<Vec<C64>> = sizes
            .iter()
            .enumerate()
            .map(|(b, &n)| {
                let s = if b == i {
                    t
                } else if b == j {
                    -t
                } else {
                    c(0.0)
                };
                (0..n * n).map(|k| if k == 0 { s } else { c(0.0) }).collect()
            })
            .collect();
        let b = element_from_parts(&alg, &parts).plus(&a);
        let traces_ok = |traces: &[C64]| {
            traces.iter().enumerate().all(|(k, tr)| {
                let want = if k == i {
                    t
                } else if k == j {
                    -t
                } else {
                    c(0.0)
                };
                (tr - want).norm() <= RESIDUAL * b.norm().max(1.0)
            })
        };
        let member = in_commutator_space(&alg, &b).unwrap();
        let rejected = match shoda_socle(&alg, &b, seed) {
            Err(SocleError::NotInCommutatorSpace(tr)) => traces_ok(&tr),
            _ => false,
        };
        obstruction_bad += usize::from(member.member || !traces_ok(&member.traces) || !rejected);
    }
    let pass = single_bad == 0 && multi_bad == 0 && obstruction_bad == 0 && worst <= RESIDUAL;
    outcome(
        pass,
        format!(
            "100 single-block, 40 multi-block, 40 obstructions; worst residual {worst:.1e}, failures {single_bad}/{multi_bad}/{obstruction_bad}"
        ),
    )
}

fn commutator_closure() -> Outcome {
    let profiles: [&[usize]; 4] = [&[2, 2], &[3, 1], &[2, 2, 1], &[3, 2, 1]];
    let mut worst = 0.0f64;
    let mut bad = 0;
    for seed in 0..50u64 {
        let alg = blocks(profiles[seed as usize % profiles.len()]);
        let x = traceless_element(&alg, 700 + seed, seed % 2 == 0);
        let y = traceless_element(&alg, 900 + seed, seed % 3 == 0);
        let mut r = rng(seed, 97);
        let (alpha, beta) = (gauss(&mut r), gauss(&mut r));
        for z in [x.plus(&y), x.scaled(alpha), x.scaled(alpha).plus(&y.scaled(beta))] {
            let member = in_commutator_space(&alg, &z).map(|m| m.member).unwrap_or(false);
            bad += usize::from(!member || !certificate_ok(&alg, &z, seed, &mut worst));
        }
    }
    outcome(bad == 0, format!("150 combinations of 50 pairs, worst residual {worst:.1e}, {bad} failures"))
}

fn equivalence() -> Outcome {
    let (mut count, mut bad) = (0, 0);
    let mut first_bad = String::new();
    for sizes in CORPUS {
        for seed in 0..CORPUS_SEEDS {
            count += 1;
            let base = blocks(sizes);
            // odd seeds go through a scrambled presentation without a decomposition
            let alg = if seed % 2 == 1 { scramble(&base, seed).unwrap().0 } else { base };
            let ok = match equivalence_harness(&alg, seed) {
                Ok(r) => {
                    let lower = r.predicates[..5].iter().all(|p| p.value == r.predicates[0].value);
                    let commutative = sizes.iter().all(|&n| n == 1);
                    lower && r.predicates[0].value == commutative && r.predicates[5].value == (sizes.len() == 1)
                }
                Err(_) => false,
            };
            if !ok {
                bad += 1;
                if first_bad.is_empty() {
                    first_bad = format!(", first {sizes:?}/{seed}");
                }
            }
        }
    }
    outcome(bad == 0, format!("{count} instances, {bad} disagreements{first_bad}"))
}

/// Roots of `det(A - zI)` by Aberth iteration, with `f'/f = -tr((A - zI)^{-1})`.
fn determinant_roots(a: &[C64], n: usize) -> Vec<C64> {
    let radius = norm(a).max(1e-3);
    let mut z: Vec<C64> =
        (0..n).map(|k| C64::from_polar(radius, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64)).collect();
    let log_derivative = |w: C64| -> Option<C64> {
        let shifted: Vec<C64> = (0..n * n).map(|t| if t / n == t % n { a[t] - w } else { a[t] }).collect();
        let inv = invert(&shifted, n)?;
        Some(-(0..n).map(|i| inv[i * n + i]).sum::<C64>())
    };
    for _ in 0..500 {
        let mut moved: f64 = 0.0;
        for i in 0..n {
            let Some(g) = log_derivative(z[i]) else { continue };
            let repulsion: C64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = (g - repulsion).inv();
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved <= 1e-15 * radius {
            break;
        }
    }
    z
}

/// Smallest worst-case distance over all matchings.
fn best_matching(a: &[C64], b: &[C64]) -> f64 {
    fn rec(a: &[C64], b: &[C64], used: &mut Vec<bool>, i: usize, cur: f64, best: &mut f64) {
        if cur >= *best {
            return;
        }
        if i == a.len() {
            *best = cur;
            return;
        }
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                rec(a, b, used, i + 1, cur.max((a[i] - b[j]).norm()), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    rec(a, b, &mut vec![false; b.len()], 0, 0.0, &mut best);
    best
}

fn numeric_kernels() -> Outcome {
    let mut worst = 0.0f64;
    let mut bad = 0;
    for seed in 0..100u64 {
        let n = 1 + seed as usize % 6;
        let mut r = rng(seed, 131);
        let a = random_matrix(&mut r, n, n);
        let m = CMatrix::from_row_major(n, n, a.clone()).unwrap();
        let Ok(ev) = eigenvalues(&m) else {
            bad += 1;
            continue;
        };
        let roots = determinant_roots(&a, n);
        let rho = ev.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let err = best_matching(&ev, &roots) / rho;
        worst = worst.max(err);
        bad += usize::from(ev.len() != n || err > EIGEN_RELATIVE);
    }
    outcome(bad == 0, format!("100 matrices, worst relative eigenvalue error {worst:.1e}, {bad} failures"))
}

fn main() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let corpus = corpus_projections();
    let criteria: Vec<Criterion> = vec![
        ("worked example M2+M2", Box::new(worked_example)),
        ("rank oracle equivalence", Box::new(rank_oracle_equivalence)),
        ("multiplicity bookkeeping", Box::new(multiplicity_bookkeeping)),
        ("Riesz dual path", Box::new(riesz_dual_path)),
        ("diagonalization", Box::new(diagonalization)),
        ("tensor model", Box::new(|| tensor_model(&corpus))),
        ("Wedderburn round-trip", Box::new(|| wedderburn_roundtrip(dir.path()))),
        ("dual bases and matrix units", Box::new(|| dual_bases_and_units(&corpus))),
        ("Shoda suite", Box::new(shoda_suite)),
        ("commutator subspace closure", Box::new(commutator_closure)),
        ("central-socle equivalence", Box::new(equivalence)),
        ("numeric kernels", Box::new(numeric_kernels)),
    ];
    let mut failed = BTreeMap::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {} [{:.1}s]", i + 1, o.detail, t.elapsed().as_secs_f64());
        if !o.pass {
            failed.insert(i + 1, *name);
        }
    }
    println!("acceptance: {}/12 passed in {:.1}s", 12 - failed.len(), start.elapsed().as_secs_f64());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
