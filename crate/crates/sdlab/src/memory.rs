//! Quantum memory requirements for perfect prediction.
//!
//! A measurement instrument predicts perfectly with q qubits of memory iff
//! every POVM operator has rank ≤ 2^q and commutes with all support
//! projectors P_yb. The admissible operators therefore live in the commutant
//! of the projector family, whose structure theory splits the Hilbert space
//! as H = ⊕_j J_j ⊗ K_j with the generated algebra acting as B(J_j) ⊗ I; the
//! minimal memory dimension is max_j dim J_j. For two bases an SVD pairing
//! argument caps every block at dimension two (one qubit always suffices);
//! for three specially crafted bases the commutant collapses to scalars and
//! all qubits must be kept.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ensembles::{Ensemble, FunctionSpec};
use crate::numkit::{hermitian_eig, svd, tensor_product, CMatrix};
use crate::optimize::Povm;
use crate::{Error, Result};

const COMMUTANT_MAX_DIM: usize = 256;
const CLUSTER_GAP: f64 = 1e-7;
const DECOMPOSE_SEED: u64 = 0x5d1ab;

/// Support projectors P_yb indexed by (output, basis).
#[derive(Debug, Clone)]
pub struct ProjectorFamily {
    pub dim: usize,
    pub projectors: Vec<(usize, usize, CMatrix)>,
}

fn projector_defect(p: &CMatrix) -> f64 {
    p.hermitian_defect().max(p.matmul(p).sub(p).max_abs())
}

impl ProjectorFamily {
    pub fn new(dim: usize, projectors: Vec<(usize, usize, CMatrix)>) -> Result<Self> {
        let mut by_basis: BTreeMap<usize, Vec<&CMatrix>> = BTreeMap::new();
        for (_, b, p) in &projectors {
            if p.rows() != dim || p.cols() != dim {
                return Err(Error::DimensionMismatch { context: "family projector", left: p.rows(), right: dim });
            }
            let defect = projector_defect(p);
            if defect > 1e-9 {
                return Err(Error::NotProjector { defect });
            }
            by_basis.entry(*b).or_default().push(p);
        }
        for (b, ps) in by_basis {
            let mut sum = CMatrix::zeros(dim, dim);
            for p in &ps {
                sum = sum.add(p);
            }
            let defect = sum.max_dist_to_scaled_identity(1.0);
            if defect > 1e-9 {
                return Err(Error::InvariantViolation(format!(
                    "projectors of basis {b} sum to I with defect {defect:.3e}"
                )));
            }
            for i in 0..ps.len() {
                for j in (i + 1)..ps.len() {
                    let cross = ps[i].matmul(ps[j]).frobenius_norm();
                    if cross > 1e-9 {
                        return Err(Error::InvariantViolation(format!(
                            "projectors of basis {b} overlap with norm {cross:.3e}"
                        )));
                    }
                }
            }
        }
        Ok(Self { dim, projectors })
    }

    pub fn from_ensemble(ensemble: &Ensemble) -> Result<Self> {
        let mut projectors = Vec::new();
        for y in 0..ensemble.y_count() {
            for b in 0..ensemble.basis_count() {
                let p = ensemble.state(y, b).support.clone();
                if p.max_abs() > 1e-12 {
                    projectors.push((y, b, p));
                }
            }
        }
        Self::new(ensemble.dim(), projectors)
    }

    /// Family {P_yb = U_b·(Σ_{x∈f⁻¹(y)} |x⟩⟨x|)·U_b†} for explicit basis
    /// unitaries (include the identity if the computational basis is wanted).
    pub fn from_function_bases(function: &FunctionSpec, unitaries: &[CMatrix]) -> Result<Self> {
        let d = 1usize << function.n;
        let mut projectors = Vec::new();
        for (b, u) in unitaries.iter().enumerate() {
            if u.rows() != d || u.cols() != d {
                return Err(Error::DimensionMismatch { context: "basis unitary", left: u.rows(), right: d });
            }
            let defect = u.unitary_defect();
            if defect > 1e-9 {
                return Err(Error::NotUnitary { defect });
            }
            for y in 0..function.num_outputs {
                let preimage = function.preimage(y);
                if preimage.is_empty() {
                    continue;
                }
                let mut half = CMatrix::zeros(d, d);
                for &x in &preimage {
                    for i in 0..d {
                        half.set(i, x, u.get(i, x));
                    }
                }
                projectors.push((y, b, half.matmul(&u.dagger())));
            }
        }
        Self::new(d, projectors)
    }
}

/// Verdict on whether a POVM can drive a perfect q-qubit protocol.
#[derive(Debug, Clone, serde::Serialize)]
pub struct InstrumentCheck {
    pub rank_ok: bool,
    pub commute_ok: bool,
    pub max_commutator_norm: f64,
}

/// Rank condition (each element rank ≤ 2^q) and commutation condition
/// ([M_i, P_yb] = 0) for every POVM element; both together certify a perfect
/// strategy.
pub fn check_perfect_instrument(
    povm: &Povm,
    family: &ProjectorFamily,
    q: usize,
) -> Result<InstrumentCheck> {
    if povm.dim() != family.dim {
        return Err(Error::DimensionMismatch { context: "instrument check", left: povm.dim(), right: family.dim });
    }
    let rank_cap = 1usize << q;
    let mut rank_ok = true;
    let mut max_comm: f64 = 0.0;
    for (_, m) in povm.elements() {
        let eig = hermitian_eig(m)?;
        let rank = eig.eigenvalues.iter().filter(|l| **l > 1e-9).count();
        if rank > rank_cap {
            rank_ok = false;
        }
        for (_, _, p) in &family.projectors {
            max_comm = max_comm.max(m.commutator(p).frobenius_norm());
        }
    }
    Ok(InstrumentCheck { rank_ok, commute_ok: max_comm <= 1e-8, max_commutator_norm: max_comm })
}

/// Hilbert–Schmidt-orthonormal basis of {M : [P, M] = 0 for all P in the
/// family}, via the null space of the stacked commutator constraints
/// (realized through its Gram matrix; singular values below 1e-9 count as
/// zero).
pub fn commutant_basis(family: &ProjectorFamily) -> Result<Vec<CMatrix>> {
    let d = family.dim;
    if d > COMMUTANT_MAX_DIM {
        return Err(Error::SizeLimit { context: "commutant dimension", value: d, limit: COMMUTANT_MAX_DIM });
    }
    let d2 = d * d;
    // Gram matrix Σ_P L_P†L_P of the stacked map M ↦ [P, M]; L_P is Hermitian
    // for Hermitian P, so this is Σ_P L_P².
    let mut gram = CMatrix::zeros(d2, d2);
    let id = CMatrix::identity(d);
    for (_, _, p) in &family.projectors {
        let lp = tensor_product(p, &id)?.sub(&tensor_product(&id, &transpose(p))?);
        gram = gram.add(&lp.matmul(&lp));
    }
    // Kernel of the Gram matrix. The squared singular values sit at the
    // eigensolver's noise floor, so candidates are selected relative to the
    // spectrum and then verified against the commutator condition directly.
    let eig = hermitian_eig(&gram)?;
    let lam_max = eig.eigenvalues.first().copied().unwrap_or(0.0).max(1.0);
    let coarse = 1e-12 * lam_max;
    let mut basis = Vec::new();
    let mut smallest_kept = f64::INFINITY;
    for (k, lambda) in eig.eigenvalues.iter().enumerate() {
        if *lambda < coarse {
            let m = unvec(&eig.eigenvectors.column(k), d);
            let worst = family
                .projectors
                .iter()
                .map(|(_, _, p)| m.commutator(p).frobenius_norm())
                .fold(0.0, f64::max);
            if worst > 1e-9 {
                return Err(Error::NumericalRankAmbiguity(format!(
                    "commutant kernel candidate has commutator norm {worst:.3e}"
                )));
            }
            basis.push(m);
        } else {
            smallest_kept = smallest_kept.min(*lambda);
        }
    }
    if smallest_kept.is_finite() && smallest_kept < 1e-8 * lam_max {
        return Err(Error::NumericalRankAmbiguity(format!(
            "commutant rank boundary is ambiguous (eigenvalue {smallest_kept:.3e})"
        )));
    }
    Ok(basis)
}

fn transpose(a: &CMatrix) -> CMatrix {
    CMatrix::from_fn(a.cols(), a.rows(), |i, j| a.get(j, i))
}

fn unvec(v: &CMatrix, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| v.get(i * d + j, 0))
}

/// One J ⊗ K factor of the decomposition, with an isometry whose columns are
/// ordered J-major: column k·dim_k + l is the basis vector j_k ⊗ e_l.
#[derive(Debug, Clone)]
pub struct Block {
    pub dim_j: usize,
    pub dim_k: usize,
    pub isometry: CMatrix,
}

/// H = ⊕_j J_j ⊗ K_j with the generated algebra acting as B(J_j) ⊗ I.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    pub blocks: Vec<Block>,
    pub min_memory_dim: usize,
}

impl BlockDecomposition {
    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim_j * b.dim_k).sum()
    }

    /// Smallest number of qubits carrying the biggest J factor.
    pub fn min_memory_qubits(&self) -> usize {
        let mut q = 0;
        while (1usize << q) < self.min_memory_dim {
            q += 1;
        }
        q
    }

    /// Σ_j (dim K_j)²: the dimension of the commutant.
    pub fn commutant_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim_k * b.dim_k).sum()
    }
}

fn cluster_descending(values: &[f64], gap: f64) -> Vec<Vec<usize>> {
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..values.len() {
        if i == 0 || (values[i - 1] - values[i]).abs() > gap {
            clusters.push(vec![i]);
        } else {
            clusters.last_mut().unwrap().push(i);
        }
    }
    clusters
}

fn random_hermitian_combo(basis: &[CMatrix], d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let mut t = CMatrix::zeros(d, d);
    for c in basis {
        let herm = c.hermitian_part();
        let anti = c.sub(&c.dagger()).scale_c(Complex64::new(0.0, 0.5));
        t = t.add(&herm.scale(rng.gen_range(-1.0..1.0)));
        t = t.add(&anti.scale(rng.gen_range(-1.0..1.0)));
    }
    let norm = t.frobenius_norm();
    if norm > 0.0 {
        t = t.scale((d as f64).sqrt() / norm);
    }
    t
}

/// Compute H = ⊕_j J_j ⊗ K_j for the algebra generated by the family:
/// eigenvalue clusters of a generic commutant element are the J_j ⊗ (unit
/// vector) slices, and a second generic element glues the slices belonging to
/// the same central block.
pub fn decompose_algebra(family: &ProjectorFamily) -> Result<BlockDecomposition> {
    let d = family.dim;
    let commutant = commutant_basis(family)?;
    if commutant.is_empty() {
        return Err(Error::InvariantViolation("empty commutant (the identity always commutes)".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(DECOMPOSE_SEED);
    let t1 = random_hermitian_combo(&commutant, d, &mut rng);
    let t2 = random_hermitian_combo(&commutant, d, &mut rng);
    if t1.frobenius_norm() < 1e-9 {
        return Err(Error::NumericalRankAmbiguity("generic commutant element vanished".into()));
    }

    let eig = hermitian_eig(&t1)?;
    let clusters = cluster_descending(&eig.eigenvalues, CLUSTER_GAP);
    let v = &eig.eigenvectors;

    // Cross-cluster blocks of the second generic element.
    let y = v.dagger().matmul(&t2.matmul(v));
    let nc = clusters.len();
    let mut link = vec![vec![0.0f64; nc]; nc];
    for (a, ca) in clusters.iter().enumerate() {
        for (b, cb) in clusters.iter().enumerate() {
            let mut norm2 = 0.0;
            for &i in ca {
                for &j in cb {
                    norm2 += y.get(i, j).norm_sqr();
                }
            }
            link[a][b] = norm2.sqrt();
        }
    }

    // Union-find over clusters.
    let mut parent: Vec<usize> = (0..nc).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for a in 0..nc {
        for b in (a + 1)..nc {
            if link[a][b] > 1e-6 {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra] = rb;
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for a in 0..nc {
        let r = find(&mut parent, a);
        groups.entry(r).or_default().push(a);
    }

    let mut blocks = Vec::new();
    for group in groups.values() {
        let dim_j = clusters[group[0]].len();
        if group.iter().any(|&g| clusters[g].len() != dim_j) {
            return Err(Error::NumericalRankAmbiguity(
                "linked eigenvalue clusters have unequal dimensions".into(),
            ));
        }
        let dim_k = group.len();

        // Matched bases: cluster coordinates are columns of V; W_g holds each
        // cluster's J-basis expressed in its own coordinates.
        let mut bases: BTreeMap<usize, CMatrix> = BTreeMap::new();
        bases.insert(group[0], CMatrix::identity(dim_j));
        let mut pending: Vec<usize> = group[1..].to_vec();
        while !pending.is_empty() {
            // strongest link into the already-based set
            let (pos, &g, parent_g) = pending
                .iter()
                .enumerate()
                .filter_map(|(pos, g)| {
                    bases
                        .keys()
                        .map(|&p| (link[*g][p], p))
                        .max_by(|x, y| x.0.total_cmp(&y.0))
                        .map(|(w, p)| (pos, g, (w, p)))
                })
                .max_by(|a, b| a.2 .0.total_cmp(&b.2 .0))
                .expect("pending cluster exists");
            let (weight, p) = parent_g;
            if weight < 1e-8 {
                return Err(Error::NumericalRankAmbiguity(
                    "could not link a cluster to its central block".into(),
                ));
            }
            // Shift the parent's basis through T2: rows cluster g, cols cluster p.
            let rows = &clusters[g];
            let cols = &clusters[p];
            let shift = CMatrix::from_fn(rows.len(), cols.len(), |i, j| y.get(rows[i], cols[j]));
            let images = shift.matmul(bases.get(&p).expect("parent has a basis"));
            let mut w = CMatrix::zeros(dim_j, dim_j);
            for k in 0..dim_j {
                let col = images.column(k);
                let norm = col.frobenius_norm();
                if norm < 1e-8 {
                    return Err(Error::NumericalRankAmbiguity(
                        "degenerate shift while matching cluster bases".into(),
                    ));
                }
                w.set_column(k, &col.scale(1.0 / norm));
            }
            if w.unitary_defect() > 1e-7 {
                return Err(Error::NumericalRankAmbiguity(
                    "matched cluster basis is not orthonormal".into(),
                ));
            }
            bases.insert(g, w);
            pending.remove(pos);
        }

        // Assemble the isometry: column (k·dim_k + l) = j_k ⊗ e_l where e_l is
        // the l-th cluster in index order.
        let mut iso = CMatrix::zeros(d, dim_j * dim_k);
        for (l, &g) in group.iter().enumerate() {
            let w = &bases[&g];
            for k in 0..dim_j {
                let mut col = CMatrix::zeros(d, 1);
                for (row_idx, &vcol) in clusters[g].iter().enumerate() {
                    col = col.add(&v.column(vcol).scale_c(w.get(row_idx, k)));
                }
                iso.set_column(k * dim_k + l, &col);
            }
        }
        blocks.push(Block { dim_j, dim_k, isometry: iso });
    }

    let decomposition = BlockDecomposition {
        min_memory_dim: blocks.iter().map(|b| b.dim_j).max().unwrap_or(1),
        blocks,
    };
    if decomposition.total_dim() != d {
        return Err(Error::NumericalRankAmbiguity(format!(
            "block dimensions sum to {} instead of {d}",
            decomposition.total_dim()
        )));
    }
    verify_tensor_structure(family, &decomposition)?;
    Ok(decomposition)
}

/// Check that every family member, conjugated into block coordinates, is
/// (operator on J) ⊗ I_K within 1e-8.
fn verify_tensor_structure(family: &ProjectorFamily, dec: &BlockDecomposition) -> Result<()> {
    for block in &dec.blocks {
        let (dj, dk) = (block.dim_j, block.dim_k);
        for (_, _, p) in &family.projectors {
            let b = block.isometry.dagger().matmul(&p.matmul(&block.isometry));
            // averaged J-factor
            let mut a = CMatrix::zeros(dj, dj);
            for k in 0..dj {
                for kp in 0..dj {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for l in 0..dk {
                        acc += b.get(k * dk + l, kp * dk + l);
                    }
                    a.set(k, kp, acc / Complex64::new(dk as f64, 0.0));
                }
            }
            let mut defect: f64 = 0.0;
            for k in 0..dj {
                for kp in 0..dj {
                    for l in 0..dk {
                        for lp in 0..dk {
                            let want = if l == lp { a.get(k, kp) } else { Complex64::new(0.0, 0.0) };
                            defect = defect.max((b.get(k * dk + l, kp * dk + lp) - want).norm());
                        }
                    }
                }
            }
            if defect > 1e-8 {
                return Err(Error::NumericalRankAmbiguity(format!(
                    "block fails the ⊗-identity structure check by {defect:.3e}"
                )));
            }
        }
    }
    Ok(())
}

/// The SVD pairing construction for exactly two projectors: split H into
/// blocks of dimension ≤ 2 such that both projectors are block-diagonal.
pub fn two_projector_blocks(p00: &CMatrix, p01: &CMatrix) -> Result<BlockDecomposition> {
    for p in [p00, p01] {
        let defect = projector_defect(p);
        if defect > 1e-9 {
            return Err(Error::NotProjector { defect });
        }
    }
    let d = p00.rows();
    if p01.rows() != d {
        return Err(Error::DimensionMismatch { context: "projector pair", left: p01.rows(), right: d });
    }

    // Basis ordering: range of P00 first, kernel second.
    let eig = hermitian_eig(p00)?;
    for l in &eig.eigenvalues {
        if l.abs() > 1e-7 && (l - 1.0).abs() > 1e-7 {
            return Err(Error::NotProjector { defect: l.min(1.0 - l).abs() });
        }
    }
    let n0 = eig.eigenvalues.iter().filter(|l| **l > 0.5).count();
    let n1 = d - n0;
    let w = &eig.eigenvectors; // columns sorted descending: range then kernel
    let pt = w.dagger().matmul(&p01.matmul(w));
    let a01 = CMatrix::from_fn(n0, n1, |i, j| pt.get(i, n0 + j));

    let dec = svd(&a01)?;
    let mut u = dec.u;
    let mut vv = dec.v;
    let s = dec.singular_values;

    // Diagonalize the diagonal blocks inside degenerate singular clusters.
    // Within a nonzero cluster A11's compression equals I − A00's, so the
    // rotation computed on the u-side is applied verbatim to the v-side.
    let a00 = CMatrix::from_fn(n0, n0, |i, j| pt.get(i, j));
    let a11 = CMatrix::from_fn(n1, n1, |i, j| pt.get(n0 + i, n0 + j));
    let paired: Vec<usize> = (0..s.len()).filter(|&k| s[k] > 1e-9).collect();
    for cluster in cluster_descending(&s, CLUSTER_GAP) {
        let cluster: Vec<usize> = cluster.into_iter().filter(|&k| s[k] > 1e-9).collect();
        if cluster.len() > 1 {
            let rotation = rotate_cluster(&mut u, &a00, &cluster)?;
            apply_rotation(&mut vv, &cluster, &rotation);
        }
    }
    // Independent rotations on the zero sides.
    let u_zero: Vec<usize> = (0..n0).filter(|&k| k >= s.len() || s[k] <= 1e-9).collect();
    if u_zero.len() > 1 {
        rotate_cluster(&mut u, &a00, &u_zero)?;
    }
    let v_zero: Vec<usize> = (0..n1).filter(|&k| k >= s.len() || s[k] <= 1e-9).collect();
    if v_zero.len() > 1 {
        rotate_cluster(&mut vv, &a11, &v_zero)?;
    }

    // Assemble blocks in the original coordinates.
    let embed_top = |col: &CMatrix| -> CMatrix {
        let mut full = CMatrix::zeros(d, 1);
        for i in 0..n0 {
            full.set(i, 0, col.get(i, 0));
        }
        w.matmul(&full)
    };
    let embed_bottom = |col: &CMatrix| -> CMatrix {
        let mut full = CMatrix::zeros(d, 1);
        for i in 0..n1 {
            full.set(n0 + i, 0, col.get(i, 0));
        }
        w.matmul(&full)
    };

    let mut blocks = Vec::new();
    for &k in &paired {
        let mut iso = CMatrix::zeros(d, 2);
        iso.set_column(0, &embed_top(&u.column(k)));
        iso.set_column(1, &embed_bottom(&vv.column(k)));
        blocks.push(Block { dim_j: 2, dim_k: 1, isometry: iso });
    }
    for &k in &u_zero {
        blocks.push(Block { dim_j: 1, dim_k: 1, isometry: embed_top(&u.column(k)) });
    }
    for &k in &v_zero {
        blocks.push(Block { dim_j: 1, dim_k: 1, isometry: embed_bottom(&vv.column(k)) });
    }

    let decomposition = BlockDecomposition {
        min_memory_dim: blocks.iter().map(|b| b.dim_j).max().unwrap_or(1),
        blocks,
    };
    if decomposition.total_dim() != d {
        return Err(Error::NumericalRankAmbiguity(format!(
            "pair blocks sum to {} instead of {d}",
            decomposition.total_dim()
        )));
    }

    // Both inputs must reconstruct from their block-diagonal compressions.
    for p in [p00, p01] {
        let mut recon = CMatrix::zeros(d, d);
        for b in &decomposition.blocks {
            let pi = b.isometry.matmul(&b.isometry.dagger());
            recon = recon.add(&pi.matmul(&p.matmul(&pi)));
        }
        if recon.sub(p).max_abs() > 1e-8 {
            return Err(Error::NumericalRankAmbiguity(
                "projector does not reconstruct from its block compression".into(),
            ));
        }
    }
    Ok(decomposition)
}

/// Replace the `cluster` columns of `m` by the eigenbasis of the compressed
/// operator col† A col (makes A diagonal on that cluster). Returns the
/// applied rotation.
fn rotate_cluster(m: &mut CMatrix, a: &CMatrix, cluster: &[usize]) -> Result<CMatrix> {
    let c = cluster.len();
    let cols = CMatrix::from_fn(m.rows(), c, |i, j| m.get(i, cluster[j]));
    let compressed = cols.dagger().matmul(&a.matmul(&cols));
    let eig = hermitian_eig(&compressed.hermitian_part())?;
    let rotated = cols.matmul(&eig.eigenvectors);
    for (j, &k) in cluster.iter().enumerate() {
        for i in 0..m.rows() {
            m.set(i, k, rotated.get(i, j));
        }
    }
    Ok(eig.eigenvectors)
}

fn apply_rotation(m: &mut CMatrix, cluster: &[usize], rotation: &CMatrix) {
    let c = cluster.len();
    let cols = CMatrix::from_fn(m.rows(), c, |i, j| m.get(i, cluster[j]));
    let rotated = cols.matmul(rotation);
    for (j, &k) in cluster.iter().enumerate() {
        for i in 0..m.rows() {
            m.set(i, k, rotated.get(i, j));
        }
    }
}

/// Simulate the one-qubit protocol: measure the ≤2-dimensional blocks of
/// (P₀₀, U P₀₀ U†), keep the posterior, then read out {P_0b, P_1b} once the
/// basis is known. Returns the average success probability over inputs and
/// the two bases (provably 1).
pub fn one_qubit_protocol_sim(function: &FunctionSpec, u: &CMatrix) -> Result<f64> {
    let per_basis = protocol_success_per_basis(function, u)?;
    Ok((per_basis[0] + per_basis[1]) / 2.0)
}

/// Per-basis success of the two-basis block protocol on bases {I, u}.
pub fn protocol_success_per_basis(function: &FunctionSpec, u: &CMatrix) -> Result<[f64; 2]> {
    let n = function.n;
    if n > 8 {
        return Err(Error::SizeLimit { context: "protocol simulation n", value: n, limit: 8 });
    }
    let d = 1usize << n;
    if u.rows() != d || u.cols() != d {
        return Err(Error::DimensionMismatch { context: "protocol unitary", left: u.rows(), right: d });
    }
    let defect = u.unitary_defect();
    if defect > 1e-9 {
        return Err(Error::NotUnitary { defect });
    }
    if function.num_outputs != 2 {
        return Err(Error::Usage("the block protocol is defined for Boolean functions".into()));
    }

    let mut p00 = CMatrix::zeros(d, d);
    for &x in &function.preimage(0) {
        p00.set(x, x, Complex64::new(1.0, 0.0));
    }
    let p01 = p00.conjugate_by(&u.dagger()); // u · P00 · u†
    let dec = two_projector_blocks(&p00, &p01)?;

    let projectors: Vec<CMatrix> =
        dec.blocks.iter().map(|b| b.isometry.matmul(&b.isometry.dagger())).collect();

    // Block-diagonal compression of each P_yb.
    let p10 = CMatrix::identity(d).sub(&p00);
    let p11 = CMatrix::identity(d).sub(&p01);
    let compress = |p: &CMatrix| -> CMatrix {
        let mut z = CMatrix::zeros(d, d);
        for pi in &projectors {
            z = z.add(&pi.matmul(&p.matmul(pi)));
        }
        z
    };
    let z = [[compress(&p00), compress(&p01)], [compress(&p10), compress(&p11)]];

    let mut totals = [0.0f64; 2];
    for b in 0..2 {
        for x in 0..d {
            let psi = if b == 0 {
                CMatrix::basis_vector(d, x)
            } else {
                u.column(x)
            };
            let y = function.value(x);
            let zyb = &z[y][b];
            let success = CMatrix::inner(&psi, &zyb.matmul(&psi));
            totals[b] += success.re;
        }
        totals[b] /= d as f64;
    }
    Ok(totals)
}

/// Value of the partial strategy against three bases {I, u, ·}: run the
/// two-basis block protocol on the first two and flip a coin when the third
/// is announced. 2/3 · 1 + 1/3 · 1/2 = 5/6 for balanced functions.
pub fn partial_strategy_value(function: &FunctionSpec, u: &CMatrix) -> Result<f64> {
    let per_basis = protocol_success_per_basis(function, u)?;
    Ok((per_basis[0] + per_basis[1] + 0.5) / 3.0)
}

/// The three-basis construction forcing full quantum memory: U₁ rotates each
/// pair (|x⟩, |s_x⟩) by a distinct angle, U₂ does the same on Fourier bases
/// of the two preimage subspaces.
pub fn adversarial_bases(function: &FunctionSpec) -> Result<(CMatrix, CMatrix)> {
    if function.num_outputs != 2 || !function.is_balanced() {
        return Err(Error::NotBalanced);
    }
    let d = 1usize << function.n;
    if d > 64 {
        return Err(Error::SizeLimit { context: "adversarial dimension", value: d, limit: 64 });
    }
    let zeros = function.preimage(0);
    let ones = function.preimage(1);
    let h = d / 2;
    debug_assert_eq!(zeros.len(), h);

    // strictly distinct rotation coefficients in (0, 1)
    let a: Vec<f64> = (0..h).map(|i| (i + 1) as f64 / (h + 1) as f64).collect();

    let mut u1 = CMatrix::zeros(d, d);
    for i in 0..h {
        let (x, sx) = (zeros[i], ones[i]);
        let b = (1.0 - a[i] * a[i]).sqrt();
        u1.set(x, x, Complex64::new(a[i], 0.0));
        u1.set(sx, sx, Complex64::new(a[i], 0.0));
        u1.set(x, sx, Complex64::new(b, 0.0));
        u1.set(sx, x, Complex64::new(-b, 0.0));
    }

    // Fourier bases of the preimage subspaces.
    let omega = 2.0 * std::f64::consts::PI / h as f64;
    let scale = 1.0 / (h as f64).sqrt();
    let fourier_col = |support: &[usize], j: usize| -> CMatrix {
        let mut v = CMatrix::zeros(d, 1);
        for (k, &row) in support.iter().enumerate() {
            let angle = omega * (j as f64) * (k as f64);
            v.set(row, 0, Complex64::new(angle.cos() * scale, angle.sin() * scale));
        }
        v
    };
    let mut u2 = CMatrix::zeros(d, d);
    for j in 0..h {
        let uj = fourier_col(&zeros, j);
        let vj = fourier_col(&ones, j);
        let b = (1.0 - a[j] * a[j]).sqrt();
        let term = CMatrix::outer(&uj, &uj)
            .add(&CMatrix::outer(&vj, &vj))
            .scale(a[j])
            .add(&CMatrix::outer(&uj, &vj).sub(&CMatrix::outer(&vj, &uj)).scale(b));
        u2 = u2.add(&term);
    }

    for u in [&u1, &u2] {
        let defect = u.unitary_defect();
        if defect > 1e-9 {
            return Err(Error::NotUnitary { defect });
        }
    }
    Ok((u1, u2))
}

/// True iff `m` is diagonal in both (mutually unbiased) bases; a Hermitian
/// matrix diagonal in two MUBs must be a multiple of the identity, which is
/// asserted before returning true.
pub fn prop_identity_check(m: &CMatrix, basis1: &CMatrix, basis2: &CMatrix) -> Result<bool> {
    m.ensure_hermitian("prop_identity_check input")?;
    let d = m.rows();
    for u in [basis1, basis2] {
        if u.rows() != d || u.cols() != d {
            return Err(Error::DimensionMismatch { context: "basis", left: u.rows(), right: d });
        }
        let defect = u.unitary_defect();
        if defect > 1e-9 {
            return Err(Error::NotUnitary { defect });
        }
    }
    // the two bases must form a MUB pair
    let overlaps = basis1.dagger().matmul(basis2);
    let target = 1.0 / d as f64;
    for i in 0..d {
        for j in 0..d {
            if (overlaps.get(i, j).norm_sqr() - target).abs() > 1e-9 {
                return Err(Error::NotMub);
            }
        }
    }

    let off_mass = |a: &CMatrix| -> f64 {
        let mut total = 0.0;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    total += a.get(i, j).norm_sqr();
                }
            }
        }
        total.sqrt()
    };
    for u in [basis1, basis2] {
        if off_mass(&m.conjugate_by(u)) > 1e-9 {
            return Ok(false);
        }
    }
    let mean = m.trace().re / d as f64;
    let defect = m.max_dist_to_scaled_identity(mean);
    if defect > 1e-8 {
        return Err(Error::InvariantViolation(format!(
            "diagonal in two MUBs but {defect:.3e} away from a multiple of I"
        )));
    }
    Ok(true)
}
