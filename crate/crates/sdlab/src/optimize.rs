//! Small-scale semidefinite programming for POVM optimization.
//!
//! The primal form is
//!   maximize  c · Σ_i w_i · Tr(B_i M_i)
//!   s.t.      M_i ⪰ 0,  Σ_i M_i = I,
//! solved by projected gradient ascent with Dykstra-style alternating
//! projections onto the PSD cone and the completeness affine space. The dual
//! is  minimize Tr(Q)  s.t.  Q ⪰ c·w_i·B_i;  [`verify_certificate`] checks a
//! hand-built Q exactly (up to an explicit constraint scale, since the source
//! certificates come in two normalization conventions).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numkit::{hermitian_eig, min_eigenvalue, CMatrix};
use crate::{Error, Result};

/// One objective/constraint operator of a discrimination SDP.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemTerm {
    pub label: String,
    pub weight: f64,
    pub op: CMatrix,
}

/// Weighted multi-hypothesis discrimination instance with an overall
/// prefactor `scale` (e.g. 1/4 in the four-outcome AND program).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscriminationProblem {
    pub scale: f64,
    pub dim: usize,
    pub terms: Vec<ProblemTerm>,
}

impl DiscriminationProblem {
    pub fn new(scale: f64, dim: usize, terms: Vec<ProblemTerm>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for t in &terms {
            if t.op.rows() != dim || t.op.cols() != dim {
                return Err(Error::DimensionMismatch { context: "problem operator", left: t.op.rows(), right: dim });
            }
            t.op.ensure_hermitian("problem operator")?;
            if !t.weight.is_finite() {
                return Err(Error::Usage(format!("weight for label {} is not finite", t.label)));
            }
            if !seen.insert(t.label.clone()) {
                return Err(Error::LabelMismatch(format!("duplicate label {}", t.label)));
            }
        }
        Ok(Self { scale, dim, terms })
    }
}

/// A positive operator-valued measure: PSD elements summing to the identity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Povm {
    elements: Vec<(String, CMatrix)>,
}

pub const POVM_TOL: f64 = 1e-9;

impl Povm {
    pub fn new(elements: Vec<(String, CMatrix)>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Usage("a POVM needs at least one element".into()));
        }
        let d = elements[0].1.rows();
        let mut sum = CMatrix::zeros(d, d);
        let mut seen = std::collections::BTreeSet::new();
        for (label, m) in &elements {
            if m.rows() != d || m.cols() != d {
                return Err(Error::DimensionMismatch { context: "POVM element", left: m.rows(), right: d });
            }
            m.ensure_hermitian("POVM element")?;
            let min = min_eigenvalue(m)?;
            if min < -POVM_TOL {
                return Err(Error::InvariantViolation(format!(
                    "POVM element {label} has eigenvalue {min:.3e}"
                )));
            }
            if !seen.insert(label.clone()) {
                return Err(Error::LabelMismatch(format!("duplicate POVM label {label}")));
            }
            sum = sum.add(m);
        }
        let defect = sum.max_dist_to_scaled_identity(1.0);
        if defect > POVM_TOL {
            return Err(Error::InvariantViolation(format!(
                "POVM completeness defect {defect:.3e}"
            )));
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[(String, CMatrix)] {
        &self.elements
    }

    pub fn get(&self, label: &str) -> Option<&CMatrix> {
        self.elements.iter().find(|(l, _)| l == label).map(|(_, m)| m)
    }

    pub fn dim(&self) -> usize {
        self.elements[0].1.rows()
    }
}

/// Hermitian dual variable Q claiming Q ⪰ constraint_scale·w_i·B_i for all i.
///
/// `constraint_scale` keeps the two source conventions intact: the AND dual
/// uses Q ⪰ B/4 with value Tr(Q), the XOR duals use Q ⪰ B with value
/// Tr(Q)/(2m).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualCertificate {
    pub q: CMatrix,
    pub claimed_value: f64,
    pub constraint_scale: f64,
}

/// Outcome of checking a dual certificate against a problem and a primal POVM.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertReport {
    pub feasible: bool,
    pub min_slack: f64,
    #[serde(rename = "primal")]
    pub primal_value: f64,
    #[serde(rename = "dual")]
    pub dual_value: f64,
    pub gap: f64,
    #[serde(skip)]
    pub constraint_scale: f64,
}

/// Success probability c·Σ_i w_i·Tr(B_i·M_i) of a POVM on a problem.
pub fn povm_success(problem: &DiscriminationProblem, povm: &Povm) -> Result<f64> {
    if povm.dim() != problem.dim {
        return Err(Error::DimensionMismatch { context: "povm_success", left: povm.dim(), right: problem.dim });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for term in &problem.terms {
        let m = povm
            .get(&term.label)
            .ok_or_else(|| Error::LabelMismatch(format!("POVM missing label {}", term.label)))?;
        acc += term.op.trace_product(m) * Complex64::new(term.weight, 0.0);
    }
    let value = acc * Complex64::new(problem.scale, 0.0);
    if value.im.abs() > 1e-9 {
        return Err(Error::InvariantViolation(format!(
            "success probability has imaginary residue {:.3e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// Solver output: the POVM, its value, and the internally generated
/// optimality certificate (Q̂ built from the converged iterate).
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub povm: Povm,
    pub value: f64,
    pub certified: bool,
    pub certificate_slack: f64,
    pub iterations: usize,
}

const SOLVE_MAX_DIM: usize = 64;
const SOLVE_MAX_OUTCOMES: usize = 16;
const SOLVE_MAX_ITER: usize = 200_000;

/// Projected gradient ascent over the POVM simplex.
pub fn solve_discrimination(problem: &DiscriminationProblem, tol: f64) -> Result<SolveResult> {
    let d = problem.dim;
    if d > SOLVE_MAX_DIM {
        return Err(Error::SizeLimit { context: "solver dimension", value: d, limit: SOLVE_MAX_DIM });
    }
    let n = problem.terms.len();
    if n > SOLVE_MAX_OUTCOMES {
        return Err(Error::SizeLimit { context: "solver outcomes", value: n, limit: SOLVE_MAX_OUTCOMES });
    }
    if n == 0 {
        return Err(Error::Usage("problem has no outcomes".into()));
    }

    let grads: Vec<CMatrix> =
        problem.terms.iter().map(|t| t.op.scale(problem.scale * t.weight)).collect();
    let gnorm = grads.iter().map(|g| g.frobenius_norm()).fold(0.0, f64::max);

    let objective = |ms: &[CMatrix]| -> f64 {
        ms.iter().zip(&grads).map(|(m, g)| g.trace_product(m).re).sum()
    };

    let mut ms: Vec<CMatrix> = vec![CMatrix::identity(d).scale(1.0 / n as f64); n];
    let mut value = objective(&ms);
    let mut iterations = 0;

    if gnorm > 0.0 {
        let mut step = 1.0 / gnorm;
        let mut window_start = value;
        for it in 0..SOLVE_MAX_ITER {
            iterations = it + 1;
            let stepped: Vec<CMatrix> =
                ms.iter().zip(&grads).map(|(m, g)| m.add(&g.scale(step))).collect();
            let cand = project_onto_povm_set(&stepped, d)?;
            let cand_value = objective(&cand);
            if cand_value > value {
                ms = cand;
                value = cand_value;
            } else {
                step *= 0.5;
                if step * gnorm < 1e-15 {
                    break;
                }
            }
            if iterations % 50 == 0 {
                if value - window_start < tol / 10.0 {
                    break;
                }
                window_start = value;
            }
        }
    }

    // Internal optimality certificate: Q̂ = Herm(Σ_i c·w_i·B_i·M_i); the
    // optimality conditions make exactly this operator dual feasible at the
    // optimum.
    let mut qhat = CMatrix::zeros(d, d);
    for (m, g) in ms.iter().zip(&grads) {
        qhat = qhat.add(&g.matmul(m));
    }
    let qhat = qhat.hermitian_part();
    let mut slack = f64::INFINITY;
    for g in &grads {
        slack = slack.min(min_eigenvalue(&qhat.sub(g))?);
    }
    let certified = slack >= -10.0 * tol;

    let labels = problem.terms.iter().map(|t| t.label.clone());
    let povm = Povm::new(labels.zip(ms).collect())?;
    Ok(SolveResult { povm, value, certified, certificate_slack: slack, iterations })
}

/// Dykstra-style alternating projection onto {all M_i PSD} ∩ {Σ M_i = I}.
/// Ends on the affine step so completeness holds exactly.
fn project_onto_povm_set(ms: &[CMatrix], d: usize) -> Result<Vec<CMatrix>> {
    let n = ms.len();
    let mut xs = ms.to_vec();
    let mut corrections = vec![CMatrix::zeros(d, d); n];
    let mut previous: Option<Vec<CMatrix>> = None;
    for _ in 0..200 {
        for i in 0..n {
            let shifted = xs[i].add(&corrections[i]);
            let projected = psd_project(&shifted)?;
            corrections[i] = shifted.sub(&projected);
            xs[i] = projected;
        }
        let mut sum = CMatrix::zeros(d, d);
        for x in &xs {
            sum = sum.add(x);
        }
        let defect = sum.sub(&CMatrix::identity(d)).scale(1.0 / n as f64);
        for x in xs.iter_mut() {
            *x = x.sub(&defect);
        }
        if let Some(prev) = &previous {
            let delta =
                xs.iter().zip(prev).map(|(a, b)| a.sub(b).max_abs()).fold(0.0, f64::max);
            if delta < 1e-12 {
                break;
            }
        }
        previous = Some(xs.clone());
    }
    Ok(xs)
}

/// Nearest PSD matrix in Frobenius norm: clamp negative eigenvalues.
fn psd_project(a: &CMatrix) -> Result<CMatrix> {
    let eig = hermitian_eig(&a.hermitian_part())?;
    let d = a.rows();
    let mut out = CMatrix::zeros(d, d);
    for (k, lambda) in eig.eigenvalues.iter().enumerate() {
        if *lambda > 0.0 {
            let v = eig.eigenvectors.column(k);
            out = out.add(&CMatrix::outer(&v, &v).scale(*lambda));
        }
    }
    Ok(out)
}

/// Check dual feasibility of `cert` against every constraint operator and
/// report the duality gap against the POVM's primal value.
pub fn verify_certificate(
    problem: &DiscriminationProblem,
    povm: &Povm,
    cert: &DualCertificate,
    tol: f64,
) -> Result<CertReport> {
    if cert.q.rows() != problem.dim {
        return Err(Error::DimensionMismatch { context: "certificate dimension", left: cert.q.rows(), right: problem.dim });
    }
    cert.q.ensure_hermitian("dual certificate")?;
    let s = cert.constraint_scale;
    let mut min_slack = f64::INFINITY;
    for term in &problem.terms {
        let slackop = cert.q.sub(&term.op.scale(s * term.weight));
        min_slack = min_slack.min(min_eigenvalue(&slackop)?);
    }
    let feasible = min_slack >= -tol;
    let primal_value = povm_success(problem, povm)?;
    let dual_value = (problem.scale / s) * cert.q.trace().re;
    Ok(CertReport {
        feasible,
        min_slack,
        primal_value,
        dual_value,
        gap: dual_value - primal_value,
        constraint_scale: s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::hadamard;

    fn qubit_pair_problem(q: f64) -> DiscriminationProblem {
        // Two-state Helstrom instance: ρ₀/ρ₁ averaged over {I, H} encodings of
        // a single bit.
        let h = hadamard();
        let e0 = CMatrix::basis_vector(2, 0);
        let e1 = CMatrix::basis_vector(2, 1);
        let rho0 =
            CMatrix::outer(&e0, &e0).add(&CMatrix::outer(&h.column(0), &h.column(0))).scale(0.5);
        let rho1 =
            CMatrix::outer(&e1, &e1).add(&CMatrix::outer(&h.column(1), &h.column(1))).scale(0.5);
        DiscriminationProblem::new(
            1.0,
            2,
            vec![
                ProblemTerm { label: "0".into(), weight: q, op: rho0 },
                ProblemTerm { label: "1".into(), weight: 1.0 - q, op: rho1 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn povm_success_trivial_identity() {
        let e0 = CMatrix::basis_vector(2, 0);
        let rho = CMatrix::outer(&e0, &e0);
        let problem = DiscriminationProblem::new(
            1.0,
            2,
            vec![ProblemTerm { label: "only".into(), weight: 1.0, op: rho }],
        )
        .unwrap();
        let povm = Povm::new(vec![("only".into(), CMatrix::identity(2))]).unwrap();
        assert!((povm_success(&problem, &povm).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn solve_orthogonal_states_perfectly() {
        let e0 = CMatrix::basis_vector(2, 0);
        let e1 = CMatrix::basis_vector(2, 1);
        let problem = DiscriminationProblem::new(
            1.0,
            2,
            vec![
                ProblemTerm { label: "0".into(), weight: 0.5, op: CMatrix::outer(&e0, &e0) },
                ProblemTerm { label: "1".into(), weight: 0.5, op: CMatrix::outer(&e1, &e1) },
            ],
        )
        .unwrap();
        let res = solve_discrimination(&problem, 1e-6).unwrap();
        assert!((res.value - 1.0).abs() < 1e-6, "value {}", res.value);
        assert!(res.certified, "slack {}", res.certificate_slack);
    }

    #[test]
    fn solve_single_outcome_returns_identity() {
        let e0 = CMatrix::basis_vector(2, 0);
        let problem = DiscriminationProblem::new(
            1.0,
            2,
            vec![ProblemTerm { label: "only".into(), weight: 1.0, op: CMatrix::outer(&e0, &e0) }],
        )
        .unwrap();
        let res = solve_discrimination(&problem, 1e-6).unwrap();
        let m = res.povm.get("only").unwrap();
        assert!(m.max_dist_to_scaled_identity(1.0) < 1e-9);
    }

    #[test]
    fn solve_two_mub_bit_reaches_closed_form() {
        let problem = qubit_pair_problem(0.5);
        let res = solve_discrimination(&problem, 1e-6).unwrap();
        let expect = 0.5 + 0.5 / 2.0_f64.sqrt();
        assert!((res.value - expect).abs() < 1e-6, "value {} vs {expect}", res.value);
        assert!(res.certified && res.certificate_slack > -1e-5);
    }

    #[test]
    fn zero_certificate_is_infeasible() {
        let problem = qubit_pair_problem(0.5);
        let povm = Povm::new(vec![
            ("0".into(), CMatrix::identity(2).scale(0.5)),
            ("1".into(), CMatrix::identity(2).scale(0.5)),
        ])
        .unwrap();
        let cert = DualCertificate {
            q: CMatrix::zeros(2, 2),
            claimed_value: 0.0,
            constraint_scale: 1.0,
        };
        let report = verify_certificate(&problem, &povm, &cert, 1e-8).unwrap();
        assert!(!report.feasible);
        assert!(report.min_slack < -0.1);
    }

    #[test]
    fn weak_duality_on_feasible_pairs() {
        let problem = qubit_pair_problem(0.3);
        let res = solve_discrimination(&problem, 1e-7).unwrap();
        // Any comfortably feasible Q upper-bounds any feasible POVM's value.
        let cert = DualCertificate {
            q: CMatrix::identity(2),
            claimed_value: 2.0,
            constraint_scale: 1.0,
        };
        let report = verify_certificate(&problem, &res.povm, &cert, 1e-8).unwrap();
        assert!(report.feasible);
        assert!(report.dual_value >= report.primal_value - 1e-8);
    }

    #[test]
    fn povm_validation_rejects_incomplete_sets() {
        let bad = Povm::new(vec![("a".into(), CMatrix::identity(2).scale(0.5))]);
        assert!(matches!(bad, Err(Error::InvariantViolation(_))));
    }
}
