//! Singular value decomposition built on the Hermitian eigensolver: right
//! singular vectors from A†A, left ones from A·v/s with the A A† kernel
//! filling the rank-deficient tail. Phases are fixed so that each right
//! singular vector's first nonzero entry is real positive, which removes the
//! gauge freedom and keeps downstream tests reproducible.

use num_complex::Complex64;

use super::{hermitian_eig, CMatrix};
use crate::Result;

/// A = U · diag(s) · V† with unitary U (r×r), V (c×c) and s descending.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

impl SvdResult {
    /// ‖A − U diag(s) V†‖_F for a given A.
    pub fn reconstruction_error(&self, a: &CMatrix) -> f64 {
        let r = self.u.rows();
        let c = self.v.rows();
        let mut sigma = CMatrix::zeros(r, c);
        for (k, s) in self.singular_values.iter().enumerate() {
            sigma.set(k, k, Complex64::new(*s, 0.0));
        }
        self.u.matmul(&sigma).matmul(&self.v.dagger()).sub(a).frobenius_norm()
    }
}

const PHASE_TOL: f64 = 1e-10;

fn phase_fix_columns(m: &mut CMatrix) {
    for j in 0..m.cols() {
        let mut pivot = None;
        for i in 0..m.rows() {
            if m.get(i, j).norm() > PHASE_TOL {
                pivot = Some(m.get(i, j));
                break;
            }
        }
        if let Some(p) = pivot {
            let phase = p.conj() / p.norm();
            for i in 0..m.rows() {
                let v = m.get(i, j) * phase;
                m.set(i, j, v);
            }
        }
    }
}

pub fn svd(a: &CMatrix) -> Result<SvdResult> {
    let (r, c) = (a.rows(), a.cols());
    let k = r.min(c);

    let gram_right = a.dagger().matmul(a); // c×c
    let eig_v = hermitian_eig(&gram_right)?;
    let mut v = eig_v.eigenvectors;
    phase_fix_columns(&mut v);

    let mut singular_values: Vec<f64> = eig_v
        .eigenvalues
        .iter()
        .take(k)
        .map(|l| l.max(0.0).sqrt())
        .collect();
    let smax = singular_values.first().copied().unwrap_or(0.0);
    let rank_tol = 1e-12 * smax.max(1.0);

    // Left vectors: A·v/s where s is meaningfully nonzero, A A† kernel vectors
    // for the rest.
    let mut u = CMatrix::zeros(r, r);
    let mut filled = 0;
    for j in 0..k {
        if singular_values[j] > rank_tol {
            let col = a.matmul(&v.column(j)).scale(1.0 / singular_values[j]);
            u.set_column(j, &col);
            filled = j + 1;
        } else {
            singular_values[j] = 0.0;
        }
    }
    if filled < r {
        let gram_left = a.matmul(&a.dagger()); // r×r
        let eig_u = hermitian_eig(&gram_left)?;
        // Tail eigenvectors span the cokernel; re-orthogonalize against the
        // computed range basis for safety at degeneracy boundaries.
        let mut next = filled;
        for j in (0..r).rev() {
            if next >= r {
                break;
            }
            let mut cand = eig_u.eigenvectors.column(j);
            for l in 0..next {
                let overlap = CMatrix::inner(&u.column(l), &cand);
                cand = cand.sub(&u.column(l).scale_c(overlap));
            }
            let norm = cand.frobenius_norm();
            if norm > 1e-8 {
                u.set_column(next, &cand.scale(1.0 / norm));
                next += 1;
            }
        }
        debug_assert_eq!(next, r, "failed to complete the left singular basis");
    }
    phase_fix_columns(&mut u);
    // Re-fix the paired columns: phases of U on the range are locked to V.
    for j in 0..k {
        if singular_values[j] > 0.0 {
            let col = a.matmul(&v.column(j)).scale(1.0 / singular_values[j]);
            u.set_column(j, &col);
        }
    }

    Ok(SvdResult { u, singular_values, v })
}

/// Hilbert–Schmidt-orthonormal basis of the null space of `a`, as column
/// vectors. Singular values below `sv_tol` are treated as zero; since the
/// squares are what the Gram eigensolve produces, the effective floor also
/// tracks the numerical noise of the largest singular value.
pub fn null_space(a: &CMatrix, sv_tol: f64) -> Result<Vec<CMatrix>> {
    let gram = a.dagger().matmul(a);
    let eig = hermitian_eig(&gram)?;
    let smax = eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    let tol = sv_tol.max(1e-7 * smax);
    let mut out = Vec::new();
    for (j, lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.max(0.0).sqrt() < tol {
            out.push(eig.eigenvectors.column(j));
        }
    }
    Ok(out)
}
