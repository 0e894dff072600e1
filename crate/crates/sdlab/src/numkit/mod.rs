//! Self-contained dense complex linear algebra, sized for dimensions ≤ 1024.
//!
//! [`CMatrix`] is the carrier for every operator in the crate: states ρ,
//! support projectors P, basis unitaries U, POVM elements M and dual
//! certificates Q. The heavy primitives are [`hermitian_eig`], [`svd`],
//! [`trace_norm`], [`tensor_product`] and [`psd_check`]; all of them are pure
//! functions over immutable inputs and deterministic for identical input bits.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{max_dim, Error, Result};

mod eig;
mod svd;

pub use eig::{hermitian_eig, EigResult};
pub use svd::{null_space, svd, SvdResult};

/// Max-entry symmetry defect allowed before an input is rejected as
/// non-Hermitian.
pub const HERM_TOL: f64 = 1e-10;

/// Dense complex matrix in row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows*cols");
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Column vector from real amplitudes.
    pub fn col_from_reals(v: &[f64]) -> Self {
        Self::from_fn(v.len(), 1, |i, _| Complex64::new(v[i], 0.0))
    }

    /// Standard basis column vector e_k in dimension d.
    pub fn basis_vector(d: usize, k: usize) -> Self {
        let mut m = Self::zeros(d, 1);
        m.set(k, 0, Complex64::new(1.0, 0.0));
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Conjugate transpose A†.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        self.scale_c(Complex64::new(s, 0.0))
    }

    pub fn scale_c(&self, s: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in add");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in sub");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in matmul");
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![Complex64::new(0.0, 0.0); n * m];
        for i in 0..n {
            for l in 0..k {
                let a = self.data[i * k + l];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let src = &other.data[l * m..(l + 1) * m];
                let dst = &mut out[i * m..(i + 1) * m];
                for (d, b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Self { rows: n, cols: m, data: out }
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Tr(self · other) without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += self.get(i, j) * other.get(j, i);
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-entry norm of A − A†.
    pub fn hermitian_defect(&self) -> f64 {
        assert!(self.is_square());
        let mut defect: f64 = 0.0;
        for i in 0..self.rows {
            defect = defect.max(self.get(i, i).im.abs());
            for j in (i + 1)..self.cols {
                defect = defect.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        defect
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermitian_defect() <= tol
    }

    /// (A + A†)/2.
    pub fn hermitian_part(&self) -> Self {
        self.add(&self.dagger()).scale(0.5)
    }

    /// j-th column as a column vector.
    pub fn column(&self, j: usize) -> Self {
        Self::from_fn(self.rows, 1, |i, _| self.get(i, j))
    }

    pub fn set_column(&mut self, j: usize, col: &Self) {
        assert_eq!(col.rows, self.rows);
        for i in 0..self.rows {
            self.set(i, j, col.get(i, 0));
        }
    }

    /// Outer product |u⟩⟨v| of two column vectors.
    pub fn outer(u: &Self, v: &Self) -> Self {
        assert_eq!(u.cols, 1);
        assert_eq!(v.cols, 1);
        Self::from_fn(u.rows, v.rows, |i, j| u.get(i, 0) * v.get(j, 0).conj())
    }

    /// Inner product ⟨u|v⟩ of two column vectors.
    pub fn inner(u: &Self, v: &Self) -> Complex64 {
        assert_eq!(u.cols, 1);
        assert_eq!(v.cols, 1);
        assert_eq!(u.rows, v.rows);
        (0..u.rows).map(|i| u.get(i, 0).conj() * v.get(i, 0)).sum()
    }

    /// Commutator [A, B] = AB − BA.
    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    /// U† · self · U.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.dagger().matmul(&self.matmul(u))
    }

    /// Max-entry distance to the identity scaled by `s`.
    pub fn max_dist_to_scaled_identity(&self, s: f64) -> f64 {
        assert!(self.is_square());
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let target = if i == j { Complex64::new(s, 0.0) } else { Complex64::new(0.0, 0.0) };
                worst = worst.max((self.get(i, j) - target).norm());
            }
        }
        worst
    }

    /// Max-entry norm of U†U − I.
    pub fn unitary_defect(&self) -> f64 {
        self.dagger().matmul(self).max_dist_to_scaled_identity(1.0)
    }

    pub(crate) fn ensure_hermitian(&self, context: &'static str) -> Result<()> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch { context: "square matrix expected", left: self.rows, right: self.cols });
        }
        let defect = self.hermitian_defect();
        if defect > HERM_TOL {
            let _ = context;
            return Err(Error::NotHermitian { defect, tol: HERM_TOL });
        }
        Ok(())
    }
}

impl std::ops::Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix::add(self, rhs)
    }
}

impl std::ops::Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        CMatrix::sub(self, rhs)
    }
}

impl std::ops::Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl std::ops::Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale(-1.0)
    }
}

// JSON form: {"rows": r, "cols": c, "data": [[re, im], ...]} row-major.
#[derive(Serialize, Deserialize)]
struct CMatrixJson {
    rows: usize,
    cols: usize,
    data: Vec<(f64, f64)>,
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CMatrixJson {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| (z.re, z.im)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = CMatrixJson::deserialize(deserializer)?;
        if raw.data.len() != raw.rows * raw.cols {
            return Err(D::Error::custom(format!(
                "matrix data length {} does not match {}x{}",
                raw.data.len(),
                raw.rows,
                raw.cols
            )));
        }
        Ok(CMatrix {
            rows: raw.rows,
            cols: raw.cols,
            data: raw.data.into_iter().map(|(re, im)| Complex64::new(re, im)).collect(),
        })
    }
}

/// Trace norm ‖A‖₁ = Σ|λ_i| of a Hermitian matrix.
pub fn trace_norm(a: &CMatrix) -> Result<f64> {
    let eig = hermitian_eig(a)?;
    Ok(eig.eigenvalues.iter().map(|l| l.abs()).sum())
}

/// Kronecker product with the left index major, so
/// `(A⊗B)[(i_a·rb + i_b), (j_a·cb + j_b)] = A[i_a,j_a]·B[i_b,j_b]`.
pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let cap = max_dim();
    if rows > cap || cols > cap {
        return Err(Error::DimensionOverflow { rows, cols, cap });
    }
    let mut out = CMatrix::zeros(rows, cols);
    for ia in 0..a.rows {
        for ja in 0..a.cols {
            let av = a.get(ia, ja);
            if av.re == 0.0 && av.im == 0.0 {
                continue;
            }
            for ib in 0..b.rows {
                for jb in 0..b.cols {
                    out.set(ia * b.rows + ib, ja * b.cols + jb, av * b.get(ib, jb));
                }
            }
        }
    }
    Ok(out)
}

/// n-fold Kronecker power.
pub fn tensor_power(a: &CMatrix, n: usize) -> Result<CMatrix> {
    assert!(n >= 1);
    let mut out = a.clone();
    for _ in 1..n {
        out = tensor_product(&out, a)?;
    }
    Ok(out)
}

/// True iff the minimum eigenvalue of a Hermitian matrix is ≥ −tol.
pub fn psd_check(a: &CMatrix, tol: f64) -> Result<bool> {
    Ok(min_eigenvalue(a)? >= -tol)
}

pub fn min_eigenvalue(a: &CMatrix) -> Result<f64> {
    let eig = hermitian_eig(a)?;
    Ok(*eig.eigenvalues.last().expect("nonempty spectrum"))
}

/// Seeded random Hermitian matrix with entries of order one.
pub fn random_hermitian(n: usize, rng: &mut impl rand::Rng) -> CMatrix {
    let mut a = CMatrix::zeros(n, n);
    for i in 0..n {
        a.set(i, i, Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
        for j in (i + 1)..n {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            a.set(i, j, z);
            a.set(j, i, z.conj());
        }
    }
    a
}

/// Seeded random unitary: the eigenvector matrix of a random Hermitian.
pub fn random_unitary(n: usize, rng: &mut impl rand::Rng) -> CMatrix {
    let h = random_hermitian(n, rng);
    hermitian_eig(&h).expect("random Hermitian decomposes").eigenvectors
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        super::random_hermitian(n, &mut rng)
    }

    fn pauli_x() -> CMatrix {
        CMatrix::from_fn(2, 2, |i, j| {
            if i != j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
        })
    }

    #[test]
    fn eig_identity_and_pauli() {
        let eig = hermitian_eig(&CMatrix::identity(2)).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 1.0]);

        let eig = hermitian_eig(&pauli_x()).unwrap();
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((eig.eigenvalues[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_two_basis_bit_difference_spectrum() {
        // ½(|0⟩⟨0| + H|0⟩⟨0|H) − ½(|1⟩⟨1| + H|1⟩⟨1|H) has eigenvalues ±1/√2.
        let h = crate::ensembles::hadamard();
        let e0 = CMatrix::basis_vector(2, 0);
        let e1 = CMatrix::basis_vector(2, 1);
        let rho0 = CMatrix::outer(&e0, &e0).add(&CMatrix::outer(&h.column(0), &h.column(0))).scale(0.5);
        let rho1 = CMatrix::outer(&e1, &e1).add(&CMatrix::outer(&h.column(1), &h.column(1))).scale(0.5);
        let eig = hermitian_eig(&rho0.sub(&rho1)).unwrap();
        let s = 1.0 / 2.0_f64.sqrt();
        assert!((eig.eigenvalues[0] - s).abs() < 1e-12);
        assert!((eig.eigenvalues[1] + s).abs() < 1e-12);
    }

    #[test]
    fn eig_residuals_and_unitarity_random() {
        for &n in &[3usize, 8, 17, 40] {
            let a = random_hermitian(n, 71 + n as u64);
            let norm = a.frobenius_norm();
            let eig = hermitian_eig(&a).unwrap();
            for i in 0..n {
                let v = eig.eigenvectors.column(i);
                let resid = a.matmul(&v).sub(&v.scale(eig.eigenvalues[i])).frobenius_norm();
                assert!(resid <= 1e-9 * norm, "residual {resid} too big at n={n}, i={i}");
            }
            assert!(eig.eigenvectors.unitary_defect() <= 1e-10);
            // descending order
            for w in eig.eigenvalues.windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn eig_trace_identities_random() {
        let a = random_hermitian(24, 5);
        let norm = a.frobenius_norm();
        let eig = hermitian_eig(&a).unwrap();
        let tr: f64 = eig.eigenvalues.iter().sum();
        assert!((tr - a.trace().re).abs() <= 1e-9 * norm);
        let tr2: f64 = eig.eigenvalues.iter().map(|l| l * l).sum();
        assert!((tr2 - a.matmul(&a).trace().re).abs() <= 1e-9 * norm);
    }

    #[test]
    fn eig_diagonal_is_exact() {
        let diag = [0.25, -1.5, 3.0, 0.25, 2.0];
        let a = CMatrix::from_fn(5, 5, |i, j| {
            if i == j { Complex64::new(diag[i], 0.0) } else { Complex64::new(0.0, 0.0) }
        });
        let eig = hermitian_eig(&a).unwrap();
        let mut sorted = diag.to_vec();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (got, want) in eig.eigenvalues.iter().zip(&sorted) {
            assert!((got - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let mut a = CMatrix::identity(2);
        a.set(0, 1, Complex64::new(1.0, 0.0));
        assert!(matches!(hermitian_eig(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn trace_norm_examples() {
        assert!((trace_norm(&CMatrix::identity(7)).unwrap() - 7.0).abs() < 1e-12);

        let h = crate::ensembles::hadamard();
        let e0 = CMatrix::basis_vector(2, 0);
        let e1 = CMatrix::basis_vector(2, 1);
        let rho0 = CMatrix::outer(&e0, &e0).add(&CMatrix::outer(&h.column(0), &h.column(0))).scale(0.5);
        let rho1 = CMatrix::outer(&e1, &e1).add(&CMatrix::outer(&h.column(1), &h.column(1))).scale(0.5);
        let tn = trace_norm(&rho0.sub(&rho1)).unwrap();
        assert!((tn - 2.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn trace_norm_matches_singular_values() {
        let a = random_hermitian(12, 99);
        let tn = trace_norm(&a).unwrap();
        let sv: f64 = svd(&a).unwrap().singular_values.iter().sum();
        assert!((tn - sv).abs() < 1e-8);
    }

    #[test]
    fn tensor_product_examples() {
        let i2 = CMatrix::identity(2);
        assert_eq!(tensor_product(&i2, &i2).unwrap(), CMatrix::identity(4));

        // σx ⊗ σx maps |00⟩ to |11⟩.
        let xx = tensor_product(&pauli_x(), &pauli_x()).unwrap();
        let v = xx.matmul(&CMatrix::basis_vector(4, 0));
        assert!((v.get(3, 0).re - 1.0).abs() < 1e-15);
        assert!(v.get(0, 0).norm() < 1e-15 && v.get(1, 0).norm() < 1e-15 && v.get(2, 0).norm() < 1e-15);

        // H ⊗ H column 0 is the uniform vector with entries 1/2.
        let h = crate::ensembles::hadamard();
        let hh = tensor_product(&h, &h).unwrap();
        for i in 0..4 {
            assert!((hh.get(i, 0).re - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn tensor_product_associative_bitwise() {
        // Dyadic entries multiply exactly, so association order cannot matter.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut dyadic = |r: usize, c: usize| {
            CMatrix::from_fn(r, c, |_, _| {
                Complex64::new(
                    rng.gen_range(-8..8i32) as f64 / 16.0,
                    rng.gen_range(-8..8i32) as f64 / 16.0,
                )
            })
        };
        let a = dyadic(2, 3);
        let b = dyadic(3, 2);
        let c = dyadic(2, 2);
        let left = tensor_product(&tensor_product(&a, &b).unwrap(), &c).unwrap();
        let right = tensor_product(&a, &tensor_product(&b, &c).unwrap()).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn tensor_product_overflow() {
        let big = CMatrix::identity(64);
        let res = tensor_product(&big, &big); // 4096 exceeds the 1024 cap
        assert!(matches!(res, Err(Error::DimensionOverflow { .. })));
    }

    #[test]
    fn psd_check_examples() {
        assert!(psd_check(&CMatrix::identity(2), 1e-9).unwrap());
        assert!(!psd_check(&CMatrix::identity(2).scale(-1.0), 1e-9).unwrap());
    }

    #[test]
    fn svd_zero_and_unitary() {
        let z = CMatrix::zeros(3, 2);
        let s = svd(&z).unwrap();
        assert_eq!(s.singular_values, vec![0.0, 0.0]);

        let h = crate::ensembles::hadamard();
        let s = svd(&h).unwrap();
        for v in &s.singular_values {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn svd_reconstructs_random_rectangular() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &(r, c) in &[(5usize, 3usize), (3, 5), (6, 6), (1, 4)] {
            let a = CMatrix::from_fn(r, c, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let s = svd(&a).unwrap();
            assert!(s.u.unitary_defect() <= 1e-10);
            assert!(s.v.unitary_defect() <= 1e-10);
            assert!(s.reconstruction_error(&a) <= 1e-9 * a.frobenius_norm().max(1.0));
            for w in s.singular_values.windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn svd_cross_checked_against_gram_eigenvalues() {
        // off-diagonal block of the Hadamard-conjugated AND-zero projector:
        // singular values must be the square roots of the A·A† spectrum
        let h = crate::ensembles::hadamard();
        let u = tensor_power(&h, 2).unwrap();
        let mut p00 = CMatrix::zeros(4, 4);
        for x in 0..3 {
            p00.set(x, x, Complex64::new(1.0, 0.0));
        }
        let p01 = u.matmul(&p00.matmul(&u.dagger()));
        let a01 = CMatrix::from_fn(3, 1, |i, _| p01.get(i, 3));
        let s = svd(&a01).unwrap();
        let gram = a01.matmul(&a01.dagger());
        let eig = hermitian_eig(&gram).unwrap();
        for (k, sv) in s.singular_values.iter().enumerate() {
            assert!((sv - eig.eigenvalues[k].max(0.0).sqrt()).abs() < 1e-12);
        }
        assert!(s.singular_values[0] > 1e-3); // the pair is genuinely tilted
    }

    #[test]
    fn values_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<CMatrix>();
        assert_send_sync::<EigResult>();
        assert_send_sync::<SvdResult>();
    }

    #[test]
    fn null_space_of_rank_one() {
        let u = CMatrix::col_from_reals(&[1.0, 1.0, 1.0]).scale(1.0 / 3.0_f64.sqrt());
        let a = CMatrix::outer(&u, &u);
        let ns = null_space(&a, 1e-9).unwrap();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(a.matmul(v).frobenius_norm() < 1e-10);
        }
    }

    #[test]
    fn cmatrix_json_roundtrip() {
        let a = random_hermitian(3, 1);
        let s = serde_json::to_string(&a).unwrap();
        assert!(s.starts_with("{\"rows\":3,\"cols\":3,\"data\":[["));
        let b: CMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }
}
