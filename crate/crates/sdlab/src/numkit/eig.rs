//! Hermitian eigendecomposition: unitary Householder reduction to a real
//! symmetric tridiagonal matrix, then implicit-shift QL iteration with
//! eigenvector accumulation (the classic EISPACK/Jama scheme, carried over
//! to complex arithmetic). Fully deterministic: identical input bits give
//! identical output bits.

use num_complex::Complex64;

use super::CMatrix;
use crate::{max_dim, Error, Result};

/// Spectral decomposition of a Hermitian matrix.
///
/// Eigenvalues are real and sorted descending; the columns of `eigenvectors`
/// are the matching orthonormal eigenvectors. Within a degenerate cluster the
/// column order is deterministic but otherwise arbitrary.
#[derive(Debug, Clone)]
pub struct EigResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

const QL_MAX_ITER: usize = 50;

pub fn hermitian_eig(a: &CMatrix) -> Result<EigResult> {
    a.ensure_hermitian("hermitian_eig")?;
    let n = a.rows();
    if n > max_dim() {
        return Err(Error::SizeLimit { context: "hermitian_eig dimension", value: n, limit: max_dim() });
    }
    if n == 0 {
        return Ok(EigResult { eigenvalues: vec![], eigenvectors: CMatrix::zeros(0, 0) });
    }

    // Work on the symmetrized copy so tiny asymmetries cannot bias the sweep.
    let mut work: Vec<Complex64> = a.hermitian_part().data().to_vec();
    let mut q = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        q[i * n + i] = Complex64::new(1.0, 0.0);
    }

    let (mut d, mut e) = tridiagonalize(&mut work, &mut q, n);
    ql_implicit(&mut d, &mut e, &mut q, n)?;

    // Stable descending sort keeps intra-cluster order deterministic.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |i, j| q[i * n + order[j]]);
    Ok(EigResult { eigenvalues, eigenvectors })
}

/// Reduce an n×n Hermitian `work` to real tridiagonal form, accumulating the
/// unitary transform into `q` (column-wise, so original = Q·T·Q†). Returns the
/// diagonal and the (real, non-negative) subdiagonal.
fn tridiagonalize(work: &mut [Complex64], q: &mut [Complex64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let idx = |i: usize, j: usize| i * n + j;

    for k in 0..n.saturating_sub(2) {
        // Householder vector for column k below the diagonal.
        let mut xnorm_sq = 0.0;
        for i in (k + 1)..n {
            xnorm_sq += work[idx(i, k)].norm_sqr();
        }
        // Deflate negligible columns outright: rank-deficient inputs cascade
        // remaining column norms toward the subnormal range, where 2/‖v‖²
        // would overflow.
        if xnorm_sq < 1e-280 {
            continue;
        }
        let xnorm = xnorm_sq.sqrt();
        let x0 = work[idx(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let beta = -phase * xnorm;

        // v = x − β e₁ stored in place of the column entries.
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        for i in (k + 1)..n {
            v[i] = work[idx(i, k)];
        }
        v[k + 1] -= beta;
        let vnorm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm_sq < 1e-280 {
            continue;
        }
        let tau = 2.0 / vnorm_sq;

        // p = τ·A·v restricted to the active block.
        let mut p = vec![Complex64::new(0.0, 0.0); n];
        for i in k..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in (k + 1)..n {
                acc += work[idx(i, j)] * v[j];
            }
            p[i] = acc * tau;
        }
        // w = p − (τ/2)(v†p)·v
        let vtp: Complex64 = ((k + 1)..n).map(|i| v[i].conj() * p[i]).sum();
        let kappa = vtp * (tau / 2.0);
        for i in k..n {
            p[i] -= kappa * v[i];
        }
        // A ← A − v·w† − w·v†  (rows/cols k.. only; v is zero at index k)
        for i in k..n {
            let vi = v[i];
            let wi = p[i];
            for j in k..n {
                let delta = vi * p[j].conj() + wi * v[j].conj();
                work[idx(i, j)] -= delta;
            }
        }
        // Q ← Q·H = Q − τ·(Q·v)·v†
        for r in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in (k + 1)..n {
                acc += q[idx(r, j)] * v[j];
            }
            acc *= tau;
            for j in (k + 1)..n {
                q[idx(r, j)] -= acc * v[j].conj();
            }
        }
    }

    // Phase similarity making the subdiagonal real non-negative, folded into Q.
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut carry = Complex64::new(1.0, 0.0);
    for i in 0..n {
        d[i] = work[idx(i, i)].re;
        if i + 1 < n {
            let sub = work[idx(i + 1, i)];
            let mag = sub.norm();
            e[i + 1] = mag;
            let step = if mag > 0.0 { sub / mag } else { Complex64::new(1.0, 0.0) };
            carry *= step;
            for r in 0..n {
                q[idx(r, i + 1)] *= carry;
            }
        }
    }
    (d, e)
}

/// Implicit-shift QL on the real tridiagonal (d, e) with complex eigenvector
/// accumulation, following the tql2 control flow.
fn ql_implicit(d: &mut [f64], e: &mut [f64], q: &mut [Complex64], n: usize) -> Result<()> {
    let idx = |i: usize, j: usize| i * n + j;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = 2.0_f64.powi(-52);
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > n - 1 {
            m = n - 1;
        }

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > QL_MAX_ITER {
                    return Err(Error::NoConvergence { algorithm: "tridiagonal QL", limit: QL_MAX_ITER });
                }

                // Implicit shift.
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for i in (l + 2)..n {
                    d[i] -= h;
                }
                f += h;

                // Implicit QL sweep.
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    for k in 0..n {
                        let tmp = q[idx(k, i + 1)];
                        q[idx(k, i + 1)] = tmp * c + q[idx(k, i)] * s;
                        q[idx(k, i)] = q[idx(k, i)] * c - tmp * s;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

