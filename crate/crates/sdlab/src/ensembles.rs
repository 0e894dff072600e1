//! Discrimination problem instances: qubit MUB unitaries and their tensor
//! powers, Boolean truth tables, priors, the encoded states ρ_yb with their
//! support projectors, and the Bell basis.
//!
//! Bit convention: a string x = (x₁,…,x_n) maps to the basis index with x₁
//! most significant. All tensor splits ("first n bits ⊗ last two bits") rely
//! on this fixed ordering.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numkit::{tensor_power, CMatrix};
use crate::{max_dim, Error, Result};

/// Truth table of f: {0,1}^n → Y.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub n: usize,
    pub num_outputs: usize,
    pub table: Vec<usize>,
    is_balanced: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionKind {
    And,
    Xor,
    Table,
}

impl FunctionSpec {
    pub fn value(&self, x: usize) -> usize {
        self.table[x]
    }

    /// True iff every output label has the same preimage count 2^n/|Y|.
    pub fn is_balanced(&self) -> bool {
        self.is_balanced
    }

    pub fn preimage(&self, y: usize) -> Vec<usize> {
        (0..self.table.len()).filter(|&x| self.table[x] == y).collect()
    }

    pub fn domain_size(&self) -> usize {
        self.table.len()
    }
}

/// Build AND, XOR or an explicit truth table on n bits.
pub fn boolean_function(kind: FunctionKind, n: usize, table: Option<&[usize]>) -> Result<FunctionSpec> {
    let size = 1usize << n;
    let (num_outputs, table) = match kind {
        FunctionKind::And => (2, (0..size).map(|x| usize::from(x == size - 1)).collect::<Vec<_>>()),
        FunctionKind::Xor => (2, (0..size).map(|x| (x.count_ones() as usize) % 2).collect()),
        FunctionKind::Table => {
            let t = table.ok_or_else(|| Error::BadTable("TABLE kind requires a table".into()))?;
            if t.len() != size {
                return Err(Error::BadTable(format!("table length {} != 2^{n}", t.len())));
            }
            let max = t.iter().copied().max().unwrap_or(0);
            (max + 1, t.to_vec())
        }
    };
    let mut counts = vec![0usize; num_outputs];
    for &y in &table {
        if y >= num_outputs {
            return Err(Error::BadTable(format!("label {y} out of range")));
        }
        counts[y] += 1;
    }
    let is_balanced = counts.iter().all(|&c| c == counts[0]) && size % num_outputs == 0;
    Ok(FunctionSpec { n, num_outputs, table, is_balanced })
}

/// Ordered basis unitaries U_b with U_0 = I.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisSet {
    pub dim: usize,
    pub unitaries: Vec<CMatrix>,
    pub mub: bool,
}

impl BasisSet {
    pub fn new(unitaries: Vec<CMatrix>, require_mub: bool) -> Result<Self> {
        let dim = unitaries.first().map(|u| u.rows()).unwrap_or(0);
        for u in &unitaries {
            if u.rows() != dim || u.cols() != dim {
                return Err(Error::DimensionMismatch { context: "basis unitaries", left: u.rows(), right: dim });
            }
            let defect = u.unitary_defect();
            if defect > 1e-10 {
                return Err(Error::NotUnitary { defect });
            }
        }
        let mut set = Self { dim, unitaries, mub: false };
        let mub = verify_mub(&set);
        if require_mub && !mub {
            return Err(Error::NotMub);
        }
        set.mub = mub;
        Ok(set)
    }

    pub fn count(&self) -> usize {
        self.unitaries.len()
    }
}

pub fn hadamard() -> CMatrix {
    let s = 1.0 / 2.0_f64.sqrt();
    CMatrix::new(
        2,
        2,
        vec![
            Complex64::new(s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(-s, 0.0),
        ],
    )
}

/// K = (I + iσ_x)/√2, the third qubit MUB unitary.
pub fn k_unitary() -> CMatrix {
    let s = 1.0 / 2.0_f64.sqrt();
    CMatrix::new(
        2,
        2,
        vec![
            Complex64::new(s, 0.0),
            Complex64::new(0.0, s),
            Complex64::new(0.0, s),
            Complex64::new(s, 0.0),
        ],
    )
}

/// The qubit MUB sets {I, H} or {I, H, K}.
pub fn qubit_mub_bases(count: usize) -> Result<BasisSet> {
    let mut unitaries = vec![CMatrix::identity(2), hadamard()];
    match count {
        2 => {}
        3 => unitaries.push(k_unitary()),
        _ => return Err(Error::Usage(format!("qubit MUB count must be 2 or 3, got {count}"))),
    }
    BasisSet::new(unitaries, true)
}

/// Replace every basis unitary by its n-fold tensor power.
pub fn tensor_power_bases(base: &BasisSet, n: usize) -> Result<BasisSet> {
    if n < 1 {
        return Err(Error::Usage("tensor power requires n ≥ 1".into()));
    }
    let dim = base.dim.checked_pow(n as u32).unwrap_or(usize::MAX);
    if dim > max_dim() {
        return Err(Error::DimensionOverflow { rows: dim, cols: dim, cap: max_dim() });
    }
    let unitaries: Result<Vec<_>> = base.unitaries.iter().map(|u| tensor_power(u, n)).collect();
    let set = BasisSet::new(unitaries?, false)?;
    if base.mub && !set.mub {
        return Err(Error::InvariantViolation(
            "tensor powers of MUB bases failed the unbiasedness re-check".into(),
        ));
    }
    Ok(set)
}

/// True iff all cross-basis overlaps satisfy |⟨φ_i|ψ_j⟩|² = 1/d within 1e-9.
pub fn verify_mub(bases: &BasisSet) -> bool {
    let d = bases.dim;
    if d == 0 || bases.unitaries.len() < 2 {
        return bases.unitaries.len() >= 2;
    }
    let target = 1.0 / d as f64;
    for a in 0..bases.unitaries.len() {
        for b in (a + 1)..bases.unitaries.len() {
            let overlaps = bases.unitaries[a].dagger().matmul(&bases.unitaries[b]);
            for i in 0..d {
                for j in 0..d {
                    if (overlaps.get(i, j).norm_sqr() - target).abs() > 1e-9 {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Input and basis distributions P_X, P_B.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Prior {
    pub p_x: Vec<f64>,
    pub p_b: Vec<f64>,
}

impl Prior {
    pub fn new(p_x: Vec<f64>, p_b: Vec<f64>) -> Result<Self> {
        for (name, v) in [("P_X", &p_x), ("P_B", &p_b)] {
            if v.iter().any(|&p| p < 0.0) {
                return Err(Error::Usage(format!("{name} has a negative entry")));
            }
            let sum: f64 = v.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::Usage(format!("{name} sums to {sum}, not 1")));
            }
        }
        Ok(Self { p_x, p_b })
    }
}

/// P_X(x) = 1/(|Y|·|f⁻¹(f(x))|) and P_B uniform: every output value equally
/// likely, uniform within each preimage.
pub fn standard_prior(function: &FunctionSpec, m: usize) -> Result<Prior> {
    let mut counts = vec![0usize; function.num_outputs];
    for &y in &function.table {
        counts[y] += 1;
    }
    if let Some(label) = counts.iter().position(|&c| c == 0) {
        return Err(Error::EmptyPreimage { label });
    }
    let y_count = function.num_outputs as f64;
    let p_x = function.table.iter().map(|&y| 1.0 / (y_count * counts[y] as f64)).collect();
    let p_b = vec![1.0 / m as f64; m];
    Prior::new(p_x, p_b)
}

/// One encoded hypothesis (y, b): its total probability, normalized state and
/// support projector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateEntry {
    pub weight: f64,
    pub rho: CMatrix,
    pub support: CMatrix,
}

/// A full discrimination instance {(y,b) → (p_yb, ρ_yb, P_yb)}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Ensemble {
    pub function: FunctionSpec,
    pub bases: BasisSet,
    pub prior: Prior,
    states: Vec<Vec<StateEntry>>, // indexed [y][b]
}

impl Ensemble {
    pub fn state(&self, y: usize, b: usize) -> &StateEntry {
        &self.states[y][b]
    }

    pub fn y_count(&self) -> usize {
        self.function.num_outputs
    }

    pub fn basis_count(&self) -> usize {
        self.bases.count()
    }

    pub fn dim(&self) -> usize {
        self.bases.dim
    }

    /// Basis-averaged state σ_y = Σ_b P_B(b)·ρ_yb / P_Y(y)-normalisation.
    pub fn averaged_state(&self, y: usize) -> CMatrix {
        let mut acc = CMatrix::zeros(self.dim(), self.dim());
        let p_y: f64 = (0..self.basis_count()).map(|b| self.states[y][b].weight).sum();
        for b in 0..self.basis_count() {
            let entry = &self.states[y][b];
            acc = acc.add(&entry.rho.scale(entry.weight / p_y));
        }
        acc
    }

    /// Marginal probability of output y.
    pub fn output_weight(&self, y: usize) -> f64 {
        (0..self.basis_count()).map(|b| self.states[y][b].weight).sum()
    }
}

/// Populate ρ_yb = Σ_{x∈f⁻¹(y)} P_X(x)·U_b|x⟩⟨x|U_b† (normalized) together
/// with the exact preimage support projectors.
pub fn build_ensemble(function: &FunctionSpec, bases: &BasisSet, prior: &Prior) -> Result<Ensemble> {
    let d = 1usize << function.n;
    if bases.dim != d {
        return Err(Error::DimensionMismatch { context: "ensemble dimension", left: bases.dim, right: d });
    }
    if prior.p_x.len() != d {
        return Err(Error::DimensionMismatch { context: "prior length", left: prior.p_x.len(), right: d });
    }
    if prior.p_b.len() != bases.count() {
        return Err(Error::DimensionMismatch {
            context: "basis prior length",
            left: prior.p_b.len(),
            right: bases.count(),
        });
    }

    let mut states = Vec::with_capacity(function.num_outputs);
    for y in 0..function.num_outputs {
        let preimage = function.preimage(y);
        let p_y: f64 = preimage.iter().map(|&x| prior.p_x[x]).sum();
        let mut row = Vec::with_capacity(bases.count());
        for (b, u) in bases.unitaries.iter().enumerate() {
            // Scale the selected columns of U, then multiply by U†: this is
            // U·diag(w)·U† in two passes.
            let mut rho_half = CMatrix::zeros(d, d);
            let mut proj_half = CMatrix::zeros(d, d);
            for &x in &preimage {
                let w = if p_y > 0.0 { prior.p_x[x] / p_y } else { 0.0 };
                for i in 0..d {
                    let v = u.get(i, x);
                    rho_half.set(i, x, v * Complex64::new(w, 0.0));
                    proj_half.set(i, x, v);
                }
            }
            let udag = u.dagger();
            let rho = rho_half.matmul(&udag);
            let support = proj_half.matmul(&udag);
            let weight = prior.p_b[b] * p_y;
            let trace = rho.trace().re;
            if weight > 0.0 && (trace - 1.0).abs() > 1e-10 {
                return Err(Error::InvariantViolation(format!(
                    "state ({y},{b}) has trace {trace}, expected 1"
                )));
            }
            row.push(StateEntry { weight, rho, support });
        }
        states.push(row);
    }

    let total: f64 = states.iter().flatten().map(|e| e.weight).sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvariantViolation(format!("ensemble weights sum to {total}")));
    }

    Ok(Ensemble { function: function.clone(), bases: bases.clone(), prior: prior.clone(), states })
}

/// Seeded random balanced Boolean function on n bits.
pub fn random_balanced_function(n: usize, rng: &mut impl rand::Rng) -> FunctionSpec {
    let size = 1usize << n;
    let mut table: Vec<usize> = (0..size).map(|x| usize::from(x >= size / 2)).collect();
    for i in (1..size).rev() {
        let j = rng.gen_range(0..=i);
        table.swap(i, j);
    }
    boolean_function(FunctionKind::Table, n, Some(&table)).expect("balanced table is valid")
}

/// The four Bell vectors Φ⁺, Φ⁻, Ψ⁺, Ψ⁻ in that fixed order.
pub fn bell_basis() -> [CMatrix; 4] {
    let s = 1.0 / 2.0_f64.sqrt();
    let mk = |a: usize, b: usize, sign: f64| {
        let mut v = CMatrix::zeros(4, 1);
        v.set(a, 0, Complex64::new(s, 0.0));
        v.set(b, 0, Complex64::new(sign * s, 0.0));
        v
    };
    [mk(0, 3, 1.0), mk(0, 3, -1.0), mk(1, 2, 1.0), mk(1, 2, -1.0)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::tensor_product;

    #[test]
    fn qubit_bases_columns() {
        let two = qubit_mub_bases(2).unwrap();
        assert!(two.mub);
        let col = two.unitaries[1].column(0);
        let s = 1.0 / 2.0_f64.sqrt();
        assert!((col.get(0, 0).re - s).abs() < 1e-15);
        assert!((col.get(1, 0).re - s).abs() < 1e-15);

        let three = qubit_mub_bases(3).unwrap();
        let col = three.unitaries[2].column(0);
        assert!((col.get(0, 0) - Complex64::new(s, 0.0)).norm() < 1e-15);
        assert!((col.get(1, 0) - Complex64::new(0.0, s)).norm() < 1e-15);
        assert!(verify_mub(&three));
    }

    #[test]
    fn verify_mub_rejects_identical_bases() {
        let set =
            BasisSet::new(vec![CMatrix::identity(2), CMatrix::identity(2)], false).unwrap();
        assert!(!verify_mub(&set));
    }

    #[test]
    fn tensor_power_bases_behaviour() {
        let base = qubit_mub_bases(2).unwrap();
        let squared = tensor_power_bases(&base, 2).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((squared.unitaries[1].get(i, j).re.abs() - 0.5).abs() < 1e-15);
            }
        }
        let same = tensor_power_bases(&base, 1).unwrap();
        assert_eq!(same.unitaries[1], base.unitaries[1]);

        let three = tensor_power_bases(&qubit_mub_bases(3).unwrap(), 2).unwrap();
        assert!(three.mub && verify_mub(&three));
    }

    #[test]
    fn boolean_tables() {
        let xor = boolean_function(FunctionKind::Xor, 3, None).unwrap();
        assert_eq!(xor.table, vec![0, 1, 1, 0, 1, 0, 0, 1]);
        assert!(xor.is_balanced());

        let and = boolean_function(FunctionKind::And, 2, None).unwrap();
        assert_eq!(and.table, vec![0, 0, 0, 1]);
        assert!(!and.is_balanced());

        let id = boolean_function(FunctionKind::Table, 1, Some(&[0, 1])).unwrap();
        assert!(id.is_balanced());

        assert!(boolean_function(FunctionKind::Table, 2, Some(&[0, 1])).is_err());
    }

    #[test]
    fn standard_priors() {
        let and = boolean_function(FunctionKind::And, 2, None).unwrap();
        let prior = standard_prior(&and, 2).unwrap();
        assert!((prior.p_x[3] - 0.5).abs() < 1e-15);
        for x in 0..3 {
            assert!((prior.p_x[x] - 1.0 / 6.0).abs() < 1e-15);
        }

        let xor = boolean_function(FunctionKind::Xor, 2, None).unwrap();
        let prior = standard_prior(&xor, 2).unwrap();
        for p in &prior.p_x {
            assert!((p - 0.25).abs() < 1e-15);
        }

        // constant function: empty preimage for label 1 only when declared
        let c = boolean_function(FunctionKind::Table, 1, Some(&[1, 1])).unwrap();
        assert!(matches!(standard_prior(&c, 2), Err(Error::EmptyPreimage { label: 0 })));
    }

    #[test]
    fn ensemble_states_match_closed_forms() {
        // identity function, n = 1: ρ_{0,1} = H|0⟩⟨0|H
        let id = boolean_function(FunctionKind::Table, 1, Some(&[0, 1])).unwrap();
        let bases = qubit_mub_bases(2).unwrap();
        let prior = standard_prior(&id, 2).unwrap();
        let ens = build_ensemble(&id, &bases, &prior).unwrap();
        let h = hadamard();
        let expected = CMatrix::outer(&h.column(0), &h.column(0));
        assert!(ens.state(0, 1).rho.sub(&expected).max_abs() < 1e-12);

        // AND, n = 2: ρ_{1,0} = |11⟩⟨11|
        let and = boolean_function(FunctionKind::And, 2, None).unwrap();
        let bases2 = tensor_power_bases(&qubit_mub_bases(2).unwrap(), 2).unwrap();
        let ens = build_ensemble(&and, &bases2, &standard_prior(&and, 2).unwrap()).unwrap();
        let e3 = CMatrix::basis_vector(4, 3);
        assert!(ens.state(1, 0).rho.sub(&CMatrix::outer(&e3, &e3)).max_abs() < 1e-12);

        // XOR, n = 2: ρ_{0,0} = (|00⟩⟨00| + |11⟩⟨11|)/2
        let xor = boolean_function(FunctionKind::Xor, 2, None).unwrap();
        let ens = build_ensemble(&xor, &bases2, &standard_prior(&xor, 2).unwrap()).unwrap();
        let e0 = CMatrix::basis_vector(4, 0);
        let expected = CMatrix::outer(&e0, &e0).add(&CMatrix::outer(&e3, &e3)).scale(0.5);
        assert!(ens.state(0, 0).rho.sub(&expected).max_abs() < 1e-12);
    }

    #[test]
    fn ensemble_support_completeness_and_orthogonality() {
        let xor = boolean_function(FunctionKind::Xor, 3, None).unwrap();
        let bases = tensor_power_bases(&qubit_mub_bases(3).unwrap(), 3).unwrap();
        let ens = build_ensemble(&xor, &bases, &standard_prior(&xor, 3).unwrap()).unwrap();
        for b in 0..3 {
            let sum = ens.state(0, b).support.add(&ens.state(1, b).support);
            assert!(sum.max_dist_to_scaled_identity(1.0) < 1e-9);
            let cross = ens.state(0, b).support.matmul(&ens.state(1, b).support);
            assert!(cross.frobenius_norm() < 1e-9);
        }
    }

    #[test]
    fn cross_basis_projector_overlap_is_k_squared_over_x() {
        // Tr(P_yb P_zb') = k²/|X| for MUB bases and balanced f.
        let xor = boolean_function(FunctionKind::Xor, 2, None).unwrap();
        let bases = tensor_power_bases(&qubit_mub_bases(3).unwrap(), 2).unwrap();
        let ens = build_ensemble(&xor, &bases, &standard_prior(&xor, 3).unwrap()).unwrap();
        let expect = (2.0f64).powi(2) / 4.0; // k = 2, |X| = 4
        for b in 0..3 {
            for bp in 0..3 {
                if b == bp {
                    continue;
                }
                for y in 0..2 {
                    for z in 0..2 {
                        let t = ens.state(y, b).support.trace_product(&ens.state(z, bp).support);
                        assert!((t.re - expect).abs() < 1e-8, "Tr = {}", t.re);
                        assert!(t.im.abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn averaged_state_purity_gap() {
        // Tr[(ρ₀−ρ₁)²] = 4/(2^n·m) for balanced Boolean f under uniform priors.
        for (n, m) in [(2usize, 2usize), (3, 2), (2, 3), (3, 3)] {
            let xor = boolean_function(FunctionKind::Xor, n, None).unwrap();
            let bases = tensor_power_bases(&qubit_mub_bases(m).unwrap(), n).unwrap();
            let ens = build_ensemble(&xor, &bases, &standard_prior(&xor, m).unwrap()).unwrap();
            let diff = ens.averaged_state(0).sub(&ens.averaged_state(1));
            let tr2 = diff.trace_product(&diff).re;
            let expect = 4.0 / ((1 << n) as f64 * m as f64);
            assert!((tr2 - expect).abs() < 1e-9, "n={n} m={m}: {tr2} vs {expect}");
        }
    }

    #[test]
    fn ensemble_json_round_trip() {
        let xor = boolean_function(FunctionKind::Xor, 2, None).unwrap();
        let bases = tensor_power_bases(&qubit_mub_bases(2).unwrap(), 2).unwrap();
        let ens = build_ensemble(&xor, &bases, &standard_prior(&xor, 2).unwrap()).unwrap();
        let text = serde_json::to_string(&ens).unwrap();
        for key in ["\"function\"", "\"bases\"", "\"prior\"", "\"states\""] {
            assert!(text.contains(key), "missing {key}");
        }
        let back: Ensemble = serde_json::from_str(&text).unwrap();
        assert!(back.state(0, 1).rho.sub(&ens.state(0, 1).rho).max_abs() < 1e-15);
        assert_eq!(back.state(1, 0).weight, ens.state(1, 0).weight);
    }

    #[test]
    fn bell_vectors() {
        let bell = bell_basis();
        let s = 1.0 / 2.0_f64.sqrt();
        assert!((bell[0].get(0, 0).re - s).abs() < 1e-15);
        assert!((bell[0].get(3, 0).re - s).abs() < 1e-15);
        for i in 0..4 {
            for j in 0..4 {
                let ip = CMatrix::inner(&bell[i], &bell[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip.re - expect).abs() < 1e-12 && ip.im.abs() < 1e-12);
            }
        }
        // H⊗H|00⟩ = (Φ⁺ + Ψ⁺)/√2
        let h = hadamard();
        let hh = tensor_product(&h, &h).unwrap();
        let lhs = hh.column(0);
        let rhs = bell[0].add(&bell[2]).scale(s);
        assert!(lhs.sub(&rhs).max_abs() < 1e-12);
    }
}
