//! Zero-memory discrimination *with* post-measurement information.
//!
//! Bob measures once, keeps |Y|^m classical outcome labels (one intended
//! output per basis), and answers with the component matching the announced
//! basis. This module provides the tuple-indexed strategy space, the
//! square-root-type measurement achieving the universal lower bound, the
//! optimal AND measurement with its dual certificate, and the Bell-basis XOR
//! strategies (perfect for even lengths, certified optimal for odd ones).

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::ensembles::{
    bell_basis, boolean_function, build_ensemble, qubit_mub_bases, standard_prior,
    tensor_power_bases, Ensemble, FunctionKind,
};
use crate::numkit::{hermitian_eig, min_eigenvalue, tensor_product, CMatrix};
use crate::optimize::{DiscriminationProblem, DualCertificate, Povm, ProblemTerm};
use crate::star::{guessing_bound, helstrom};
use crate::{Error, Result};

/// POVM indexed by output tuples (o_1,…,o_m) ∈ Y^m. Tuples without an entry
/// are zero operators.
#[derive(Debug, Clone)]
pub struct StrategyPI0 {
    pub m: usize,
    pub y_count: usize,
    elements: BTreeMap<Vec<u8>, CMatrix>,
}

impl StrategyPI0 {
    pub fn new(m: usize, y_count: usize, elements: BTreeMap<Vec<u8>, CMatrix>) -> Result<Self> {
        let dim = elements
            .values()
            .next()
            .map(|e| e.rows())
            .ok_or_else(|| Error::Usage("strategy needs at least one element".into()))?;
        let mut sum = CMatrix::zeros(dim, dim);
        for (tuple, el) in &elements {
            if tuple.len() != m || tuple.iter().any(|&o| o as usize >= y_count) {
                return Err(Error::LabelMismatch(format!("bad outcome tuple {tuple:?}")));
            }
            if el.rows() != dim || el.cols() != dim {
                return Err(Error::DimensionMismatch { context: "strategy element", left: el.rows(), right: dim });
            }
            el.ensure_hermitian("strategy element")?;
            let min = min_eigenvalue(el)?;
            if min < -1e-9 {
                return Err(Error::InvariantViolation(format!(
                    "strategy element {tuple:?} has eigenvalue {min:.3e}"
                )));
            }
            sum = sum.add(el);
        }
        let defect = sum.max_dist_to_scaled_identity(1.0);
        if defect > 1e-9 {
            return Err(Error::InvariantViolation(format!(
                "strategy completeness defect {defect:.3e}"
            )));
        }
        Ok(Self { m, y_count, elements })
    }

    pub fn elements(&self) -> &BTreeMap<Vec<u8>, CMatrix> {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements.values().next().map(|e| e.rows()).unwrap_or(0)
    }

    pub fn tuple_label(tuple: &[u8]) -> String {
        tuple.iter().map(|o| o.to_string()).collect()
    }

    /// Flatten into a labeled POVM, including explicit zero elements for
    /// absent tuples.
    pub fn to_povm(&self) -> Result<Povm> {
        let d = self.dim();
        let mut elements = Vec::new();
        for tuple in all_tuples(self.m, self.y_count) {
            let label = Self::tuple_label(&tuple);
            match self.elements.get(&tuple) {
                Some(el) => elements.push((label, el.clone())),
                None => elements.push((label, CMatrix::zeros(d, d))),
            }
        }
        Povm::new(elements)
    }
}

fn all_tuples(m: usize, y_count: usize) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..m {
        let mut next = Vec::with_capacity(out.len() * y_count);
        for t in &out {
            for o in 0..y_count {
                let mut t2 = t.clone();
                t2.push(o as u8);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

/// Success probability Σ_tuple Σ_b p_{o_b,b} · Tr(M_tuple · ρ_{o_b,b}).
pub fn strategy_value(ensemble: &Ensemble, strategy: &StrategyPI0) -> Result<f64> {
    if strategy.dim() != ensemble.dim() {
        return Err(Error::DimensionMismatch { context: "strategy_value", left: strategy.dim(), right: ensemble.dim() });
    }
    if strategy.m != ensemble.basis_count() || strategy.y_count != ensemble.y_count() {
        return Err(Error::LabelMismatch(format!(
            "strategy is ({}, {}) but ensemble is ({}, {})",
            strategy.m,
            strategy.y_count,
            ensemble.basis_count(),
            ensemble.y_count()
        )));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (tuple, el) in &strategy.elements {
        for (b, &o_b) in tuple.iter().enumerate() {
            let entry = ensemble.state(o_b as usize, b);
            if entry.weight > 0.0 {
                acc += entry.rho.trace_product(el) * Complex64::new(entry.weight, 0.0);
            }
        }
    }
    if acc.im.abs() > 1e-9 {
        return Err(Error::InvariantViolation(format!(
            "strategy value has imaginary residue {:.3e}",
            acc.im
        )));
    }
    Ok(acc.re)
}

/// The tuple-indexed discrimination SDP of an ensemble with uniform (y,b)
/// weights: scale 1/(m|Y|) and operators B_T = Σ_b ρ_{o_b b}.
pub fn tuple_problem(ensemble: &Ensemble) -> Result<DiscriminationProblem> {
    let m = ensemble.basis_count();
    let y_count = ensemble.y_count();
    let uniform = 1.0 / (m * y_count) as f64;
    for y in 0..y_count {
        for b in 0..m {
            if (ensemble.state(y, b).weight - uniform).abs() > 1e-9 {
                return Err(Error::Usage(
                    "tuple problem requires uniform weights over (y, b)".into(),
                ));
            }
        }
    }
    let tuples = all_tuples(m, y_count);
    if tuples.len() > 4096 {
        return Err(Error::SizeLimit { context: "tuple count", value: tuples.len(), limit: 4096 });
    }
    let d = ensemble.dim();
    let mut terms = Vec::with_capacity(tuples.len());
    for tuple in tuples {
        let mut op = CMatrix::zeros(d, d);
        for (b, &o_b) in tuple.iter().enumerate() {
            op = op.add(&ensemble.state(o_b as usize, b).rho);
        }
        terms.push(ProblemTerm { label: StrategyPI0::tuple_label(&tuple), weight: 1.0, op });
    }
    DiscriminationProblem::new(uniform, d, terms)
}

// ---------------------------------------------------------------------------
// Square-root type measurement
// ---------------------------------------------------------------------------

/// Pieces of the square-root-type measurement: the normalizer S (a multiple
/// c_m of the identity for MUB ensembles) and the combinatorial G_m values
/// behind the closed-form bound.
#[derive(Debug, Clone)]
pub struct SrmComponents {
    pub s: CMatrix,
    pub c_m: f64,
    pub g_values: [f64; 4],
}

/// G_m(i) = m!/(m−i)! · |Y|^{m−i} · Π_{j=2}^{i−1} [m ≠ j].
fn g_value(m: usize, y_count: usize, i: usize) -> f64 {
    if i > m {
        return 0.0;
    }
    let mut falling = 1.0;
    for k in 0..i {
        falling *= (m - k) as f64;
    }
    let mut delta = 1.0;
    for j in 2..i {
        if m == j {
            delta = 0.0;
        }
    }
    falling * (y_count as f64).powi((m - i) as i32) * delta
}

/// Build M_T = S^{−1/2} (Σ_b P_{o_b b})³ S^{−1/2} for every outcome tuple.
pub fn srm_build(ensemble: &Ensemble) -> Result<(StrategyPI0, SrmComponents)> {
    if !ensemble.function.is_balanced() {
        return Err(Error::NotBalanced);
    }
    if !ensemble.bases.mub {
        return Err(Error::NotMub);
    }
    let m = ensemble.basis_count();
    let y_count = ensemble.y_count();
    let uniform_x = 1.0 / ensemble.function.domain_size() as f64;
    if ensemble.prior.p_x.iter().any(|&p| (p - uniform_x).abs() > 1e-12)
        || ensemble.prior.p_b.iter().any(|&p| (p - 1.0 / m as f64).abs() > 1e-12)
    {
        return Err(Error::Usage("square-root measurement requires uniform priors".into()));
    }
    let tuples = all_tuples(m, y_count);
    if tuples.len() > 4096 {
        return Err(Error::SizeLimit { context: "tuple count", value: tuples.len(), limit: 4096 });
    }

    let d = ensemble.dim();
    let mut cubes: Vec<(Vec<u8>, CMatrix)> = Vec::with_capacity(tuples.len());
    let mut s = CMatrix::zeros(d, d);
    for tuple in tuples {
        let mut r = CMatrix::zeros(d, d);
        for (b, &o_b) in tuple.iter().enumerate() {
            r = r.add(&ensemble.state(o_b as usize, b).support);
        }
        let r3 = r.matmul(&r).matmul(&r);
        s = s.add(&r3);
        cubes.push((tuple, r3));
    }

    let g_values = [
        g_value(m, y_count, 1),
        g_value(m, y_count, 2),
        g_value(m, y_count, 3),
        g_value(m, y_count, 4),
    ];
    let c_m = g_values[0] + 3.0 * g_values[1] + g_values[2];
    let s_defect = s.max_dist_to_scaled_identity(c_m);
    if s_defect > 1e-8 {
        return Err(Error::InvariantViolation(format!(
            "S deviates from c_m·I by {s_defect:.3e}"
        )));
    }

    let eig = hermitian_eig(&s)?;
    let mut inv_sqrt = CMatrix::zeros(d, d);
    for (k, lambda) in eig.eigenvalues.iter().enumerate() {
        if *lambda <= 0.0 {
            return Err(Error::InvariantViolation("S is not positive definite".into()));
        }
        let v = eig.eigenvectors.column(k);
        inv_sqrt = inv_sqrt.add(&CMatrix::outer(&v, &v).scale(1.0 / lambda.sqrt()));
    }

    let mut elements = BTreeMap::new();
    for (tuple, r3) in cubes {
        elements.insert(tuple, inv_sqrt.matmul(&r3).matmul(&inv_sqrt));
    }
    let strategy = StrategyPI0::new(m, y_count, elements)?;
    Ok((strategy, SrmComponents { s, c_m, g_values }))
}

/// The published three-case lower bound achieved by the square-root-type
/// measurement (the m ≥ 4 branch is evaluated as printed and is not
/// independently cross-checked by a construction here).
pub fn srm_bound_formula(m: usize, y_count: usize) -> f64 {
    assert!(m >= 2, "the square-root bound needs at least two bases");
    let y = y_count as f64;
    let bonus = match m {
        2 => (y - 1.0) / (y * (y + 3.0)),
        3 => 4.0 * (y * y - 1.0) / (3.0 * y * (2.0 + y * (y + 6.0))),
        _ => {
            let mf = m as f64;
            -2.0 / (2.0 * y)
                + 2.0 * (y + mf - 1.0)
                    / (y * y + 3.0 * y * (mf - 1.0) + mf * mf - 3.0 * mf + 2.0)
        }
    };
    guessing_bound(m, y_count) + bonus
}

// ---------------------------------------------------------------------------
// AND with two bases
// ---------------------------------------------------------------------------

/// The AND ensemble: bases {I, H}^{⊗n} and the prior putting weight ½ on the
/// all-ones string.
pub fn and_ensemble(n: usize) -> Result<Ensemble> {
    let f = boolean_function(FunctionKind::And, n, None)?;
    let bases = tensor_power_bases(&qubit_mub_bases(2)?, n)?;
    let prior = standard_prior(&f, 2)?;
    build_ensemble(&f, &bases, &prior)
}

/// The four-outcome AND discrimination SDP (scale 1/4).
pub fn and_tuple_problem(n: usize) -> Result<DiscriminationProblem> {
    tuple_problem(&and_ensemble(n)?)
}

/// Span vectors of the two-dimensional "all ones" subspace H₂ and their
/// in-plane orthogonal complements: (c₁, h₁, c₀, h₀).
fn and_vectors(n: usize) -> (CMatrix, CMatrix, CMatrix, CMatrix) {
    let d = 1usize << n;
    let c1 = CMatrix::basis_vector(d, d - 1);
    let scale = 1.0 / (d as f64).sqrt();
    let h1 = CMatrix::from_fn(d, 1, |i, _| {
        let sign = if (i.count_ones() & 1) == 0 { 1.0 } else { -1.0 };
        Complex64::new(sign * scale, 0.0)
    });
    let sign = if n % 2 == 0 { -1.0 } else { 1.0 }; // (−1)^{n+1}
    let denom = 1.0 / ((d as f64) - 1.0).sqrt();
    let root_d = (d as f64).sqrt();
    let c0 = c1.scale(sign).add(&h1.scale(root_d)).scale(denom);
    let h0 = c1.scale(root_d).add(&h1.scale(sign)).scale(denom);
    (c1, h1, c0, h0)
}

/// β = (−1)^n / √(2^{2n} + 2^{3n/2+1} − 2^{n/2+1}).
fn and_beta(n: usize) -> f64 {
    let nf = n as f64;
    let denom = (2.0f64.powf(2.0 * nf) + 2.0f64.powf(1.5 * nf + 1.0)
        - 2.0f64.powf(0.5 * nf + 1.0))
    .sqrt();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    sign / denom
}

/// The printed closed form for η = |⟨ψ₁₀|ψ₀₁⟩|.
pub fn and_eta_closed_form(n: usize) -> f64 {
    let beta = and_beta(n);
    let alpha = (1.0 - beta * beta).sqrt();
    let sign = if n % 2 == 0 { -1.0 } else { 1.0 }; // (−1)^{n+1}
    let d = (1u64 << n) as f64;
    ((1.0 - 2.0 * beta * beta + sign * 2.0 * beta * alpha * (d - 1.0).sqrt()) / d.sqrt()).abs()
}

/// The explicit optimal four-outcome AND measurement: outcome 00 is the
/// projector onto the complement of H₂ (impossible when AND(x) = 1), 01/10
/// are scaled rank-one elements tilted by β, and 11 takes the rest.
pub fn and_pistar_measurement(n: usize) -> Result<StrategyPI0> {
    if !(1..=9).contains(&n) {
        return Err(Error::SizeLimit { context: "and_pistar_measurement n", value: n, limit: 9 });
    }
    let d = 1usize << n;
    let (c1, h1, c0, h0) = and_vectors(n);
    let par = CMatrix::outer(&c0, &c0).add(&CMatrix::outer(&c1, &c1));
    let perp = CMatrix::identity(d).sub(&par);

    let beta = and_beta(n);
    let alpha = (1.0 - beta * beta).sqrt();
    let psi01 = c0.scale(alpha).add(&c1.scale(beta));
    let psi10 = h0.scale(alpha).add(&h1.scale(beta));
    let eta = CMatrix::inner(&psi10, &psi01).norm();
    let lambda = 1.0 / (1.0 + eta);

    let m00 = perp;
    let m01 = CMatrix::outer(&psi01, &psi01).scale(lambda);
    let m10 = CMatrix::outer(&psi10, &psi10).scale(lambda);
    let m11 = CMatrix::identity(d).sub(&m00).sub(&m01).sub(&m10);

    let mut elements = BTreeMap::new();
    elements.insert(vec![0, 0], m00);
    elements.insert(vec![0, 1], m01);
    elements.insert(vec![1, 0], m10);
    elements.insert(vec![1, 1], m11);
    StrategyPI0::new(2, 2, elements)
}

/// Closed-form optimum p = ½[2 + 1/(2^n + 2^{n/2} − 2) − 1/(2^n − 1)].
pub fn and_pistar_value(n: usize) -> f64 {
    let d = (1u64 << n) as f64;
    0.5 * (2.0 + 1.0 / (d + d.sqrt() - 2.0) - 1.0 / (d - 1.0))
}

/// The dual certificate matching [`and_pistar_measurement`]: feasible for the
/// constraints Q ⪰ B_T/4 with Tr(Q) equal to the optimum. The printed cross
/// term is completed Hermitianly (|c₁⟩⟨h₁| + |h₁⟩⟨c₁|).
pub fn and_pistar_certificate(n: usize) -> Result<DualCertificate> {
    if !(1..=9).contains(&n) {
        return Err(Error::SizeLimit { context: "and_pistar_certificate n", value: n, limit: 9 });
    }
    let d = 1usize << n;
    let df = d as f64;
    let nf = n as f64;
    let (c1, h1, c0, _) = and_vectors(n);
    let par = CMatrix::outer(&c0, &c0).add(&CMatrix::outer(&c1, &c1));
    let perp = CMatrix::identity(d).sub(&par);

    let diag_coeff = 0.25 * (2.0 - 2.0f64.powf(1.0 + nf / 2.0) + 2.0f64.powf(1.5 * nf))
        / (2.0 - 3.0 * 2.0f64.powf(nf / 2.0) + 2.0f64.powf(1.5 * nf));
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 }; // (−1)^n
    let cross_coeff = -sign / (4.0 * (2.0f64.powf(1.0 - nf / 2.0) + df - 3.0));

    let q = perp
        .scale(0.5 / (df - 1.0))
        .add(&CMatrix::outer(&c1, &c1).add(&CMatrix::outer(&h1, &h1)).scale(diag_coeff))
        .add(
            &CMatrix::outer(&c1, &h1)
                .add(&CMatrix::outer(&h1, &c1))
                .scale(cross_coeff),
        );
    let claimed_value = q.trace().re;
    Ok(DualCertificate { q, claimed_value, constraint_scale: 0.25 })
}

// ---------------------------------------------------------------------------
// XOR with two or three bases
// ---------------------------------------------------------------------------

/// The XOR ensemble over m ∈ {2,3} tensor-power MUBs with uniform priors.
pub fn xor_ensemble(n: usize, m: usize) -> Result<Ensemble> {
    let f = boolean_function(FunctionKind::Xor, n, None)?;
    let bases = tensor_power_bases(&qubit_mub_bases(m)?, n)?;
    let prior = standard_prior(&f, m)?;
    build_ensemble(&f, &bases, &prior)
}

/// The 2^m-outcome XOR discrimination SDP (scale 1/(2m)).
pub fn xor_tuple_problem(n: usize, m: usize) -> Result<DiscriminationProblem> {
    tuple_problem(&xor_ensemble(n, m)?)
}

/// Per-basis parity decoding of the four Bell outcomes (Φ⁺, Φ⁻, Ψ⁺, Ψ⁻):
/// computational {Φ⁺,Φ⁻}→0, Hadamard {Φ⁺,Ψ⁺}→0, K-basis {Φ⁻,Ψ⁺}→0.
const BELL_DECODE: [[u8; 4]; 3] = [
    [0, 0, 1, 1], // +
    [0, 1, 0, 1], // ×
    [1, 0, 0, 1], // ⊙
];

/// Measure each pair of qubits in the Bell basis and XOR the per-pair
/// decodings: computes the parity of an even-length string perfectly.
pub fn xor_bell_strategy(n: usize, m: usize) -> Result<StrategyPI0> {
    if n % 2 != 0 {
        return Err(Error::OddLength { n });
    }
    if !(2..=8).contains(&n) {
        return Err(Error::SizeLimit { context: "xor_bell_strategy n", value: n, limit: 8 });
    }
    if !(m == 2 || m == 3) {
        return Err(Error::Usage(format!("xor_bell_strategy supports 2 or 3 bases, got {m}")));
    }
    let bell = bell_basis();
    let pair_projs: Vec<CMatrix> = bell.iter().map(|v| CMatrix::outer(v, v)).collect();
    let pairs = n / 2;

    let mut elements: BTreeMap<Vec<u8>, CMatrix> = BTreeMap::new();
    let mut outcome = vec![0usize; pairs];
    loop {
        // composite projector and decoded tuple for this outcome pattern
        let mut proj = pair_projs[outcome[0]].clone();
        for &o in &outcome[1..] {
            proj = tensor_product(&proj, &pair_projs[o])?;
        }
        let mut tuple = vec![0u8; m];
        for &o in &outcome {
            for (b, slot) in tuple.iter_mut().enumerate() {
                *slot ^= BELL_DECODE[b][o];
            }
        }
        elements
            .entry(tuple)
            .and_modify(|acc| *acc = acc.add(&proj))
            .or_insert(proj);

        // next mixed-radix pattern
        let mut k = pairs;
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            outcome[k] += 1;
            if outcome[k] < 4 {
                break;
            }
            outcome[k] = 0;
        }
        if outcome.iter().all(|&o| o == 0) {
            break;
        }
    }
    let strategy = StrategyPI0::new(m, 2, elements)?;

    let value = strategy_value(&xor_ensemble(n, m)?, &strategy)?;
    if (value - 1.0).abs() > 1e-10 {
        return Err(Error::InvariantViolation(format!(
            "Bell strategy value {value} is not 1 (n={n}, m={m})"
        )));
    }
    Ok(strategy)
}

/// The single-bit strategy used for the leftover qubit of odd-length XOR:
/// the Helstrom measurement of the one-qubit m-basis instance, answering the
/// same bit for every basis.
fn single_bit_strategy(m: usize) -> Result<StrategyPI0> {
    let f = boolean_function(FunctionKind::Table, 1, Some(&[0, 1]))?;
    let bases = qubit_mub_bases(m)?;
    let ens = build_ensemble(&f, &bases, &standard_prior(&f, m)?)?;
    let hel = helstrom(0.5, &ens.averaged_state(0), &ens.averaged_state(1))?;
    let m0 = hel.witness.expect("helstrom always returns a witness");
    let m1 = CMatrix::identity(2).sub(&m0);
    let mut elements = BTreeMap::new();
    elements.insert(vec![0u8; m], m0);
    elements.insert(vec![1u8; m], m1);
    StrategyPI0::new(m, 2, elements)
}

/// XOR-compose two tuple strategies on a tensor product of their spaces.
fn compose_xor(a: &StrategyPI0, b: &StrategyPI0) -> Result<StrategyPI0> {
    assert_eq!(a.m, b.m);
    assert_eq!(a.y_count, 2);
    assert_eq!(b.y_count, 2);
    let mut elements: BTreeMap<Vec<u8>, CMatrix> = BTreeMap::new();
    for (ta, ma) in &a.elements {
        for (tb, mb) in &b.elements {
            let tuple: Vec<u8> = ta.iter().zip(tb).map(|(x, y)| x ^ y).collect();
            let prod = tensor_product(ma, mb)?;
            elements
                .entry(tuple)
                .and_modify(|acc| *acc = acc.add(&prod))
                .or_insert(prod);
        }
    }
    StrategyPI0::new(a.m, 2, elements)
}

/// Constructive strategy for odd-length XOR: perfect Bell pairs on the first
/// n−1 bits composed with the single-bit Helstrom measurement on the last.
pub fn xor_odd_constructive_strategy(n: usize, m: usize) -> Result<StrategyPI0> {
    if n % 2 == 0 {
        return Err(Error::EvenLength { n });
    }
    if !(1..=7).contains(&n) {
        return Err(Error::SizeLimit { context: "xor odd strategy n", value: n, limit: 7 });
    }
    let single = single_bit_strategy(m)?;
    if n == 1 {
        return Ok(single);
    }
    let bell = xor_bell_strategy(n - 1, m)?;
    compose_xor(&bell, &single)
}

/// Inductive dual certificate for odd-length XOR: Q¹ = m·p·I₂ and
/// Q^{k+2} = Q^k ⊗ ¼I₄, feasible for Q ⪰ B_T with value Tr(Q)/(2m) =
/// ½(1 + 1/√m) independent of n.
pub fn xor_pistar_certificate(n: usize, m: usize) -> Result<DualCertificate> {
    if n % 2 == 0 {
        return Err(Error::EvenLength { n });
    }
    if !(1..=7).contains(&n) {
        return Err(Error::SizeLimit { context: "xor_pistar_certificate n", value: n, limit: 7 });
    }
    if !(m == 2 || m == 3) {
        return Err(Error::Usage(format!("xor_pistar_certificate supports 2 or 3 bases, got {m}")));
    }
    let p = 0.5 * (1.0 + 1.0 / (m as f64).sqrt());
    let mut q = CMatrix::identity(2).scale(m as f64 * p);
    let quarter = CMatrix::identity(4).scale(0.25);
    let mut k = 1;
    while k < n {
        q = tensor_product(&q, &quarter)?;
        k += 2;
    }
    let claimed_value = q.trace().re / (2.0 * m as f64);

    // feasibility against every tuple operator
    let problem = xor_tuple_problem(n, m)?;
    for term in &problem.terms {
        let slack = min_eigenvalue(&q.sub(&term.op))?;
        if slack < -1e-8 {
            return Err(Error::InvariantViolation(format!(
                "XOR dual certificate infeasible: slack {slack:.3e} on tuple {}",
                term.label
            )));
        }
    }
    Ok(DualCertificate { q, claimed_value, constraint_scale: 1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimize::{povm_success, solve_discrimination, verify_certificate};

    #[test]
    fn concentrated_strategy_scores_one() {
        // Constant function: all weight sits on y = 0 for the single basis.
        let f = boolean_function(FunctionKind::Table, 1, Some(&[0, 0])).unwrap();
        let bases =
            crate::ensembles::BasisSet::new(vec![CMatrix::identity(2)], false).unwrap();
        let prior = crate::ensembles::Prior::new(vec![0.5, 0.5], vec![1.0]).unwrap();
        let ens = build_ensemble(&f, &bases, &prior).unwrap();
        let mut elements = BTreeMap::new();
        elements.insert(vec![0u8], CMatrix::identity(2));
        let strat = StrategyPI0::new(1, 1, elements).unwrap();
        assert!((strategy_value(&ens, &strat).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn srm_single_bit_two_bases() {
        let f = boolean_function(FunctionKind::Table, 1, Some(&[0, 1])).unwrap();
        let bases = qubit_mub_bases(2).unwrap();
        let ens = build_ensemble(&f, &bases, &standard_prior(&f, 2).unwrap()).unwrap();
        let (strategy, parts) = srm_build(&ens).unwrap();
        assert!(parts.s.max_dist_to_scaled_identity(parts.c_m) <= 1e-8);
        let v = strategy_value(&ens, &strategy).unwrap();
        assert!(v >= 0.85 - 1e-9, "SRM value {v}");
        assert!(v >= srm_bound_formula(2, 2) - 1e-8);
        assert!(v > guessing_bound(2, 2));
    }

    #[test]
    fn srm_rejects_unbalanced() {
        let ens = and_ensemble(2).unwrap();
        assert!(matches!(srm_build(&ens), Err(Error::NotBalanced)));
    }

    #[test]
    fn srm_bound_values() {
        assert!((srm_bound_formula(2, 2) - 0.85).abs() < 1e-12);
        assert!((srm_bound_formula(2, 4) - (0.625 + 3.0 / 28.0)).abs() < 1e-12);
        assert!((srm_bound_formula(3, 2) - 7.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn srm_four_outputs_meets_bound() {
        // Identity on two bits: |Y| = 4, m = 2.
        let f = boolean_function(FunctionKind::Table, 2, Some(&[0, 1, 2, 3])).unwrap();
        let bases = tensor_power_bases(&qubit_mub_bases(2).unwrap(), 2).unwrap();
        let ens = build_ensemble(&f, &bases, &standard_prior(&f, 2).unwrap()).unwrap();
        let (strategy, _) = srm_build(&ens).unwrap();
        let v = strategy_value(&ens, &strategy).unwrap();
        assert!(v >= srm_bound_formula(2, 4) - 1e-8, "value {v}");
    }

    #[test]
    fn and_values_and_measurement_agree() {
        assert!((and_pistar_value(1) - (0.5 + 0.5 / 2.0_f64.sqrt())).abs() < 1e-12);
        assert!((and_pistar_value(2) - 23.0 / 24.0).abs() < 1e-12);
        for n in 1..=3 {
            let strat = and_pistar_measurement(n).unwrap();
            let v = strategy_value(&and_ensemble(n).unwrap(), &strat).unwrap();
            assert!((v - and_pistar_value(n)).abs() < 1e-9, "n={n}: {v}");
        }
    }

    #[test]
    fn and_perp_outcome_never_fires_on_ones() {
        for n in [1usize, 2, 3] {
            let strat = and_pistar_measurement(n).unwrap();
            let m00 = strat.elements().get(&vec![0u8, 0]).unwrap();
            let ens = and_ensemble(n).unwrap();
            for b in 0..2 {
                let prod = m00.matmul(&ens.state(1, b).rho);
                assert!(prod.max_abs() < 1e-9, "n={n} b={b}");
            }
        }
    }

    #[test]
    fn and_eta_matches_closed_form() {
        for n in 1..=9 {
            let (c1, h1, c0, h0) = and_vectors(n);
            let beta = and_beta(n);
            let alpha = (1.0 - beta * beta).sqrt();
            let psi01 = c0.scale(alpha).add(&c1.scale(beta));
            let psi10 = h0.scale(alpha).add(&h1.scale(beta));
            let eta = CMatrix::inner(&psi10, &psi01).norm();
            assert!((eta - and_eta_closed_form(n)).abs() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn and_certificate_trace_and_feasibility() {
        let cert = and_pistar_certificate(1).unwrap();
        assert!((cert.claimed_value - (0.5 + 0.5 / 2.0_f64.sqrt())).abs() < 1e-10);

        let problem = and_tuple_problem(2).unwrap();
        let povm = and_pistar_measurement(2).unwrap().to_povm().unwrap();
        let cert = and_pistar_certificate(2).unwrap();
        let report = verify_certificate(&problem, &povm, &cert, 1e-8).unwrap();
        assert!(report.feasible, "min slack {}", report.min_slack);
        assert!(report.gap.abs() <= 1e-8, "gap {}", report.gap);

        // n = 3: every constraint slack is PSD within 1e-8
        let problem = and_tuple_problem(3).unwrap();
        let cert = and_pistar_certificate(3).unwrap();
        for term in &problem.terms {
            let slack = min_eigenvalue(&cert.q.sub(&term.op.scale(0.25))).unwrap();
            assert!(slack >= -1e-8, "tuple {} slack {slack}", term.label);
        }
    }

    #[test]
    fn bell_strategy_is_perfect() {
        for (n, m) in [(2usize, 2usize), (2, 3), (4, 3)] {
            let strat = xor_bell_strategy(n, m).unwrap();
            let v = strategy_value(&xor_ensemble(n, m).unwrap(), &strat).unwrap();
            assert!((v - 1.0).abs() < 1e-10, "n={n} m={m}: {v}");
        }
        assert!(matches!(xor_bell_strategy(3, 2), Err(Error::OddLength { .. })));
    }

    #[test]
    fn bell_povm_matches_tuple_problem() {
        let strat = xor_bell_strategy(2, 2).unwrap();
        let problem = xor_tuple_problem(2, 2).unwrap();
        let v = povm_success(&problem, &strat.to_povm().unwrap()).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn xor_certificates_and_constructive_match() {
        let cert = xor_pistar_certificate(1, 2).unwrap();
        assert!((cert.claimed_value - (0.5 + 0.5 / 2.0_f64.sqrt())).abs() < 1e-10);

        let cert = xor_pistar_certificate(3, 3).unwrap();
        let p3 = 0.5 * (1.0 + 1.0 / 3.0_f64.sqrt());
        assert!((cert.claimed_value - p3).abs() < 1e-10);

        // constructive strategy on n = 3, two bases, matches the certificate
        let cert = xor_pistar_certificate(3, 2).unwrap();
        let strat = xor_odd_constructive_strategy(3, 2).unwrap();
        let v = strategy_value(&xor_ensemble(3, 2).unwrap(), &strat).unwrap();
        assert!((v - cert.claimed_value).abs() < 1e-8, "{v} vs {}", cert.claimed_value);
    }

    #[test]
    fn and_measurement_value_via_povm_success() {
        // same number through the SDP objective path
        let problem = and_tuple_problem(1).unwrap();
        let povm = and_pistar_measurement(1).unwrap().to_povm().unwrap();
        let v = povm_success(&problem, &povm).unwrap();
        assert!((v - (0.5 + 0.5 / 2.0_f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn solver_reaches_and_optimum() {
        let problem = and_tuple_problem(2).unwrap();
        let res = solve_discrimination(&problem, 1e-6).unwrap();
        assert!((res.value - 23.0 / 24.0).abs() < 1e-6, "value {}", res.value);
    }
}
