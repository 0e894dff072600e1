//! State discrimination *without* post-measurement information: the Helstrom
//! two-hypothesis optimum, the trivial guessing bound, the universal upper
//! bound ½ + 1/(2√m) for balanced Boolean functions, and the closed-form
//! AND/XOR optima, each cross-checked against an explicitly constructed
//! Helstrom instance.

use serde::{Deserialize, Serialize};

use crate::ensembles::{
    boolean_function, build_ensemble, qubit_mub_bases, standard_prior, tensor_power_bases,
    FunctionKind,
};
use crate::numkit::{hermitian_eig, psd_check, CMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Helstrom,
    Sdp,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::ClosedForm => "closed_form",
            Method::Helstrom => "helstrom",
            Method::Sdp => "sdp",
        };
        f.write_str(s)
    }
}

/// Optimal (or certified) success probability with an optional measurement
/// witness: the projector onto the positive eigenspace of the Helstrom
/// operator.
#[derive(Debug, Clone)]
pub struct StarResult {
    pub value: f64,
    pub method: Method,
    pub witness: Option<CMatrix>,
}

/// Guess the basis, then measure: 1/m + (1 − 1/m)/|Y|.
pub fn guessing_bound(m: usize, y_count: usize) -> f64 {
    assert!(m >= 1 && y_count >= 1);
    let m = m as f64;
    1.0 / m + (1.0 - 1.0 / m) / y_count as f64
}

fn ensure_density(rho: &CMatrix, name: &str) -> Result<()> {
    rho.ensure_hermitian("density matrix")
        .map_err(|_| Error::NotDensityMatrix(format!("{name} is not Hermitian")))?;
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
        return Err(Error::NotDensityMatrix(format!("{name} has trace {tr}")));
    }
    if !psd_check(rho, 1e-9)? {
        return Err(Error::NotDensityMatrix(format!("{name} is not PSD")));
    }
    Ok(())
}

/// Two-hypothesis optimum p = ½(1 + ‖qρ₀ − (1−q)ρ₁‖₁).
///
/// The witness M₀ keeps eigenvalues strictly above 1e-12; boundary ties go to
/// M₁ = I − M₀, which leaves the value unchanged.
pub fn helstrom(q: f64, rho0: &CMatrix, rho1: &CMatrix) -> Result<StarResult> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Usage(format!("prior weight q = {q} outside [0,1]")));
    }
    ensure_density(rho0, "rho0")?;
    ensure_density(rho1, "rho1")?;
    if rho0.rows() != rho1.rows() {
        return Err(Error::DimensionMismatch { context: "helstrom states", left: rho0.rows(), right: rho1.rows() });
    }
    let gamma = rho0.scale(q).sub(&rho1.scale(1.0 - q));
    let eig = hermitian_eig(&gamma)?;
    let trace_norm: f64 = eig.eigenvalues.iter().map(|l| l.abs()).sum();
    let d = gamma.rows();
    let mut witness = CMatrix::zeros(d, d);
    for (k, lambda) in eig.eigenvalues.iter().enumerate() {
        if *lambda > 1e-12 {
            let v = eig.eigenvectors.column(k);
            witness = witness.add(&CMatrix::outer(&v, &v));
        }
    }
    Ok(StarResult { value: 0.5 * (1.0 + trace_norm), method: Method::Helstrom, witness: Some(witness) })
}

/// Universal optimum ½ + 1/(2√m) for balanced Boolean functions; independent
/// of the input length.
pub fn boolean_star_upper_bound(_n: usize, m: usize) -> f64 {
    assert!(m >= 1);
    0.5 + 0.5 / (m as f64).sqrt()
}

/// The two averaged AND hypothesis states over the bases {I, H}^{⊗n}:
/// ρ₁ concentrates on |1…1⟩ and its Hadamard twin, ρ₀ on their complements.
pub fn and_states(n: usize) -> Result<(CMatrix, CMatrix)> {
    let d = 1usize << n;
    let c1 = CMatrix::basis_vector(d, d - 1);
    let scale = 1.0 / (d as f64).sqrt();
    let h1 = CMatrix::from_fn(d, 1, |i, _| {
        let sign = if (i.count_ones() & 1) == 0 { 1.0 } else { -1.0 };
        num_complex::Complex64::new(sign * scale, 0.0)
    });
    let pc = CMatrix::outer(&c1, &c1);
    let ph = CMatrix::outer(&h1, &h1);
    let rho1 = pc.add(&ph).scale(0.5);
    let id = CMatrix::identity(d);
    let inv = 1.0 / (d as f64 - 1.0);
    let rho0 = id.sub(&pc).add(&id.sub(&ph)).scale(0.5 * inv);
    Ok((rho0, rho1))
}

/// Closed-form STAR optimum for AND on n bits with two bases, re-derived via
/// the explicit Helstrom instance.
pub fn and_star_optimum(n: usize) -> Result<StarResult> {
    if !(1..=9).contains(&n) {
        return Err(Error::SizeLimit { context: "and_star_optimum n", value: n, limit: 9 });
    }
    let closed = if n == 1 {
        0.5 + 0.5 / 2.0_f64.sqrt()
    } else {
        1.0 - 0.5 / ((1u64 << n) as f64 - 1.0)
    };
    let (rho0, rho1) = and_states(n)?;
    let hel = helstrom(0.5, &rho0, &rho1)?;
    if (hel.value - closed).abs() > 1e-8 {
        return Err(Error::InvariantViolation(format!(
            "AND closed form {closed} disagrees with Helstrom value {}",
            hel.value
        )));
    }
    Ok(StarResult { value: closed, method: Method::ClosedForm, witness: hel.witness })
}

/// Basis-averaged XOR states σ^n_y for m ∈ {2,3} tensor-power MUBs.
pub fn xor_sigma_states(n: usize, m: usize) -> Result<(CMatrix, CMatrix)> {
    if !(1..=8).contains(&n) {
        return Err(Error::SizeLimit { context: "xor state construction n", value: n, limit: 8 });
    }
    let f = boolean_function(FunctionKind::Xor, n, None)?;
    let bases = tensor_power_bases(&qubit_mub_bases(m)?, n)?;
    let prior = standard_prior(&f, m)?;
    let ens = build_ensemble(&f, &bases, &prior)?;
    Ok((ens.averaged_state(0), ens.averaged_state(1)))
}

/// Closed-form STAR optimum for XOR on n bits with m ∈ {2,3} bases:
/// 3/4 for even n, ½(1 + 1/√m) for odd n. For n ≤ 6 the value is recomputed
/// from the explicitly built averaged states.
pub fn xor_star_optimum(n: usize, m: usize) -> Result<StarResult> {
    if !(1..=9).contains(&n) {
        return Err(Error::SizeLimit { context: "xor_star_optimum n", value: n, limit: 9 });
    }
    if !(m == 2 || m == 3) {
        return Err(Error::Usage(format!("xor_star_optimum supports 2 or 3 bases, got {m}")));
    }
    let closed =
        if n % 2 == 0 { 0.75 } else { 0.5 * (1.0 + 1.0 / (m as f64).sqrt()) };
    let mut witness = None;
    if n <= 6 {
        let (sigma0, sigma1) = xor_sigma_states(n, m)?;
        let hel = helstrom(0.5, &sigma0, &sigma1)?;
        if (hel.value - closed).abs() > 1e-8 {
            return Err(Error::InvariantViolation(format!(
                "XOR closed form {closed} disagrees with Helstrom value {} (n={n}, m={m})",
                hel.value
            )));
        }
        witness = hel.witness;
    }
    Ok(StarResult { value: closed, method: Method::ClosedForm, witness })
}

/// Helstrom value for guessing the XOR of two bits over the three MUBs when
/// the prior puts weight q on XOR = 0. Minimized at q = 1/3 with value 2/3,
/// where measuring cannot beat always answering 1.
pub fn xor_two_bit_prior(q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Usage(format!("prior weight q = {q} outside [0,1]")));
    }
    let (sigma0, sigma1) = xor_sigma_states(2, 3)?;
    Ok(helstrom(q, &sigma0, &sigma1)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::hadamard;

    pub(crate) fn one_bit_states(m: usize) -> (CMatrix, CMatrix) {
        // Single encoded bit over m qubit MUBs.
        let bases = qubit_mub_bases(m).unwrap();
        let f = boolean_function(FunctionKind::Table, 1, Some(&[0, 1])).unwrap();
        let prior = standard_prior(&f, m).unwrap();
        let ens = build_ensemble(&f, &bases, &prior).unwrap();
        (ens.averaged_state(0), ens.averaged_state(1))
    }

    #[test]
    fn guessing_bound_values() {
        assert!((guessing_bound(2, 2) - 0.75).abs() < 1e-15);
        assert!((guessing_bound(1, 7) - 1.0).abs() < 1e-15);
        assert!((guessing_bound(3, 2) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn helstrom_identical_states() {
        let rho = CMatrix::identity(2).scale(0.5);
        let r = helstrom(0.5, &rho, &rho).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn helstrom_one_qubit_mub_instances() {
        let (rho0, rho1) = one_bit_states(2);
        let r = helstrom(0.5, &rho0, &rho1).unwrap();
        assert!((r.value - (0.5 + 0.5 / 2.0_f64.sqrt())).abs() < 1e-12);

        let (rho0, rho1) = one_bit_states(3);
        let r = helstrom(0.5, &rho0, &rho1).unwrap();
        assert!((r.value - (0.5 + 0.5 / 3.0_f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn helstrom_witness_achieves_value() {
        let (rho0, rho1) = one_bit_states(2);
        let r = helstrom(0.5, &rho0, &rho1).unwrap();
        let m0 = r.witness.unwrap();
        // projector
        assert!(m0.matmul(&m0).sub(&m0).max_abs() < 1e-10);
        let achieved = 0.5 * rho0.trace_product(&m0).re
            + 0.5 * rho1.trace_product(&CMatrix::identity(2).sub(&m0)).re;
        assert!((achieved - r.value).abs() < 1e-10);
    }

    #[test]
    fn helstrom_rejects_junk() {
        let not_density = CMatrix::identity(2);
        let rho = CMatrix::identity(2).scale(0.5);
        assert!(matches!(helstrom(0.5, &not_density, &rho), Err(Error::NotDensityMatrix(_))));
    }

    #[test]
    fn upper_bound_values() {
        assert!((boolean_star_upper_bound(4, 2) - 0.8535533905932737).abs() < 1e-12);
        assert!((boolean_star_upper_bound(4, 3) - 0.7886751345948129).abs() < 1e-12);
        assert!((boolean_star_upper_bound(1, 1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn and_optimum_small_cases() {
        assert!((and_star_optimum(1).unwrap().value - (0.5 + 0.5 / 2.0_f64.sqrt())).abs() < 1e-12);
        assert!((and_star_optimum(2).unwrap().value - 5.0 / 6.0).abs() < 1e-12);
        assert!((and_star_optimum(3).unwrap().value - 13.0 / 14.0).abs() < 1e-12);
        assert!(matches!(and_star_optimum(10), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn xor_optimum_small_cases() {
        assert!((xor_star_optimum(2, 2).unwrap().value - 0.75).abs() < 1e-12);
        assert!((xor_star_optimum(2, 3).unwrap().value - 0.75).abs() < 1e-12);
        let odd3 = 0.5 * (1.0 + 1.0 / 3.0_f64.sqrt());
        assert!((xor_star_optimum(3, 3).unwrap().value - odd3).abs() < 1e-12);
    }

    #[test]
    fn xor_prior_examples() {
        assert!((xor_two_bit_prior(1.0 / 3.0).unwrap() - 2.0 / 3.0).abs() < 1e-9);
        assert!((xor_two_bit_prior(0.0).unwrap() - 1.0).abs() < 1e-9);
        assert!((xor_two_bit_prior(0.5).unwrap() - 0.75).abs() < 1e-9);
    }

    #[test]
    fn xor_prior_grid_minimum_at_one_third() {
        // Sample the 0.05 grid plus the interior optimum itself.
        let mut qs: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
        qs.push(1.0 / 3.0);
        let mut best = (f64::INFINITY, 0.0);
        for &q in &qs {
            let v = xor_two_bit_prior(q).unwrap();
            if v < best.0 {
                best = (v, q);
            }
        }
        assert!((best.1 - 1.0 / 3.0).abs() < 1e-12);
        assert!((best.0 - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn helstrom_never_below_blind_guessing() {
        let (rho0, rho1) = one_bit_states(2);
        for &q in &[0.0, 0.2, 0.5, 0.9, 1.0] {
            let v = helstrom(q, &rho0, &rho1).unwrap().value;
            assert!(v >= q.max(1.0 - q) - 1e-12);
            assert!(v <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn trace_distance_induction_first_step() {
        // ‖σ³₀ − σ³₁‖₁ = ‖σ¹₀ − σ¹₁‖₁ for both basis counts.
        for m in [2, 3] {
            let (a0, a1) = xor_sigma_states(1, m).unwrap();
            let (b0, b1) = xor_sigma_states(3, m).unwrap();
            let t1 = crate::numkit::trace_norm(&a0.sub(&a1)).unwrap();
            let t3 = crate::numkit::trace_norm(&b0.sub(&b1)).unwrap();
            assert!((t1 - t3).abs() < 1e-10, "m={m}: {t1} vs {t3}");
        }
    }

    #[test]
    fn balanced_samples_respect_upper_bound() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for m in [2usize, 3] {
            for _ in 0..5 {
                let f = crate::ensembles::random_balanced_function(3, &mut rng);
                let bases = tensor_power_bases(&qubit_mub_bases(m).unwrap(), 3).unwrap();
                let prior = standard_prior(&f, m).unwrap();
                let ens = build_ensemble(&f, &bases, &prior).unwrap();
                let v = helstrom(0.5, &ens.averaged_state(0), &ens.averaged_state(1))
                    .unwrap()
                    .value;
                assert!(v <= boolean_star_upper_bound(3, m) + 1e-8);
            }
        }
    }

    #[test]
    fn hadamard_consistency() {
        // |h₁⟩ built sign-by-sign equals the last column of H^{⊗n}.
        let h = hadamard();
        let hh = crate::numkit::tensor_power(&h, 3).unwrap();
        let (_, rho1) = and_states(3).unwrap();
        let col = hh.column(7);
        let expect = CMatrix::outer(&CMatrix::basis_vector(8, 7), &CMatrix::basis_vector(8, 7))
            .add(&CMatrix::outer(&col, &col))
            .scale(0.5);
        assert!(rho1.sub(&expect).max_abs() < 1e-12);
    }
}
