use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, I};
use crate::spin::{
    build_nonclassical_hamiltonian, build_product_hamiltonian, build_spin_operators, effective_omega,
    qubit_lowering, qubit_operator, qubit_raising, CollectiveOperator, DensityMatrix, OperatorLabel,
    SpinQuantumNumber, MAX_FULL_SPACE_QUBITS,
};

/// Largest qubit count accepted in the symmetric-subspace representation.
pub const MAX_DICKE_QUBITS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// `2j + 1` dimensional symmetric subspace, index 0 = all up.
    Dicke,
    /// `2^N` dimensional product space, qubit 0 most significant, bit 0 = up.
    Full,
}

/// Whether the environment acts through one summed operator or `N` local ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OperatorMode {
    #[default]
    Collective,
    /// One operator per qubit; only meaningful in the full representation.
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Environment {
    Closed,
    Dephasing { gamma_dp: f64 },
    Thermal { gamma_th: f64, n_bar: f64 },
}

#[derive(Debug, Clone)]
pub struct LindbladModel {
    hamiltonian: CollectiveOperator,
    lindblad_ops: Vec<CollectiveOperator>,
    environment: Environment,
    representation: Representation,
    n_qubits: usize,
    omega: f64,
}

fn check_size(n: usize, repr: Representation) -> Result<()> {
    let max = match repr {
        Representation::Dicke => MAX_DICKE_QUBITS,
        Representation::Full => MAX_FULL_SPACE_QUBITS,
    };
    if n == 0 || n > max {
        return Err(Error::OutOfRange(format!("{n} qubits outside 1..={max} for {repr:?} representation")));
    }
    Ok(())
}

fn check_rate(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(Error::InvalidArgument(format!("{name} must be non-negative, got {v}")));
    }
    Ok(())
}

fn hamiltonian(n: usize, omega: f64, repr: Representation) -> Result<CollectiveOperator> {
    match repr {
        Representation::Dicke => {
            let spin = SpinQuantumNumber::from_qubits(n)?;
            build_nonclassical_hamiltonian(spin, effective_omega(n, omega))
        }
        Representation::Full => build_product_hamiltonian(n, omega),
    }
}

fn lindblad(m: CMat) -> CollectiveOperator {
    CollectiveOperator::new(m, OperatorLabel::Lindblad).expect("square")
}

fn local_terms(n: usize, single: &CMat, mode: OperatorMode) -> Vec<CMat> {
    let terms: Vec<CMat> = (0..n).map(|k| qubit_operator(n, k, single)).collect();
    match mode {
        OperatorMode::Local => terms,
        OperatorMode::Collective => {
            let dim = 1usize << n;
            vec![terms.into_iter().fold(CMat::zeros(dim, dim), |acc, t| acc + t)]
        }
    }
}

fn check_mode(mode: OperatorMode, repr: Representation) -> Result<()> {
    if mode == OperatorMode::Local && repr == Representation::Dicke {
        return Err(Error::InvalidArgument(
            "local Lindblad operators break permutation symmetry; use the full representation".into(),
        ));
    }
    Ok(())
}

/// Dephasing environment `L = γ Σ σᵢ⁺σᵢ⁻`. In the Dicke basis this is
/// `4γ(J_z + j)`.
pub fn build_dephasing_model(
    n: usize,
    omega: f64,
    gamma_dp: f64,
    repr: Representation,
    mode: OperatorMode,
) -> Result<LindbladModel> {
    check_size(n, repr)?;
    check_rate("gamma_dp", gamma_dp)?;
    check_mode(mode, repr)?;
    let h = hamiltonian(n, omega, repr)?;
    let ops = match repr {
        Representation::Dicke => {
            let spin = SpinQuantumNumber::from_qubits(n)?;
            let jz = build_spin_operators(spin).jz.into_matrix();
            let d = spin.dim();
            vec![(jz + CMat::identity(d, d) * c(spin.j(), 0.0)) * c(4.0 * gamma_dp, 0.0)]
        }
        Representation::Full => {
            let single = qubit_raising() * qubit_lowering() * c(gamma_dp, 0.0);
            local_terms(n, &single, mode)
        }
    };
    LindbladModel::assemble(h, ops, Environment::Dephasing { gamma_dp }, repr, n, omega)
}

/// Thermal environment `L = ½ γ_th Σ [(n̄+1)σᵢ⁻ − n̄σᵢ⁺]`. In the Dicke basis
/// this is `γ_th[(n̄+1)J⁻ − n̄J⁺]`.
pub fn build_thermal_model(
    n: usize,
    omega: f64,
    gamma_th: f64,
    n_bar: f64,
    repr: Representation,
    mode: OperatorMode,
) -> Result<LindbladModel> {
    check_size(n, repr)?;
    check_rate("gamma_th", gamma_th)?;
    check_rate("n_bar", n_bar)?;
    check_mode(mode, repr)?;
    let h = hamiltonian(n, omega, repr)?;
    let ops = match repr {
        Representation::Dicke => {
            let ops = build_spin_operators(SpinQuantumNumber::from_qubits(n)?);
            vec![
                (ops.jminus.into_matrix() * c(n_bar + 1.0, 0.0) - ops.jplus.into_matrix() * c(n_bar, 0.0))
                    * c(gamma_th, 0.0),
            ]
        }
        Representation::Full => {
            let single = (qubit_lowering() * c(n_bar + 1.0, 0.0) - qubit_raising() * c(n_bar, 0.0))
                * c(0.5 * gamma_th, 0.0);
            local_terms(n, &single, mode)
        }
    };
    LindbladModel::assemble(h, ops, Environment::Thermal { gamma_th, n_bar }, repr, n, omega)
}

pub fn build_closed_model(n: usize, omega: f64, repr: Representation) -> Result<LindbladModel> {
    check_size(n, repr)?;
    let h = hamiltonian(n, omega, repr)?;
    LindbladModel::assemble(h, Vec::new(), Environment::Closed, repr, n, omega)
}

impl LindbladModel {
    fn assemble(
        hamiltonian: CollectiveOperator,
        ops: Vec<CMat>,
        environment: Environment,
        representation: Representation,
        n_qubits: usize,
        omega: f64,
    ) -> Result<Self> {
        let lindblad_ops: Vec<CollectiveOperator> = ops.into_iter().map(lindblad).collect();
        Self::validate(&hamiltonian, &lindblad_ops)?;
        Ok(Self { hamiltonian, lindblad_ops, environment, representation, n_qubits, omega })
    }

    fn validate(h: &CollectiveOperator, ops: &[CollectiveOperator]) -> Result<()> {
        if h.label() != OperatorLabel::Hamiltonian {
            return Err(Error::InvalidArgument("hamiltonian must carry the Hamiltonian label".into()));
        }
        for op in ops {
            if op.dim() != h.dim() {
                return Err(Error::DimensionMismatch { expected: h.dim(), found: op.dim() });
            }
        }
        Ok(())
    }

    /// A Dicke-space model from explicit operators.
    pub fn custom(hamiltonian: CollectiveOperator, lindblad_ops: Vec<CMat>) -> Result<Self> {
        let spin = SpinQuantumNumber::from_twice(hamiltonian.dim().saturating_sub(1) as u32)?;
        let ops = lindblad_ops.into_iter().map(lindblad).collect::<Vec<_>>();
        Self::validate(&hamiltonian, &ops)?;
        Ok(Self {
            hamiltonian,
            lindblad_ops: ops,
            environment: Environment::Closed,
            representation: Representation::Dicke,
            n_qubits: spin.n_qubits(),
            omega: f64::NAN,
        })
    }

    pub fn hamiltonian(&self) -> &CollectiveOperator {
        &self.hamiltonian
    }

    pub fn lindblad_ops(&self) -> &[CollectiveOperator] {
        &self.lindblad_ops
    }

    pub fn environment(&self) -> Environment {
        self.environment
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// The single-qubit frequency the model was built with (NaN for custom models).
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn spin(&self) -> SpinQuantumNumber {
        SpinQuantumNumber::from_qubits(self.n_qubits).expect("validated at construction")
    }

    /// `m_z = ½ Σ σᵢᶻ`, diagonal in both representations.
    pub fn magnetization_values(&self) -> Vec<f64> {
        match self.representation {
            Representation::Dicke => {
                let spin = self.spin();
                (0..spin.dim()).map(|i| spin.m(i)).collect()
            }
            Representation::Full => (0..self.dim())
                .map(|x: usize| 0.5 * self.n_qubits as f64 - x.count_ones() as f64)
                .collect(),
        }
    }

    pub fn magnetization(&self) -> CMat {
        CMat::from_diagonal(&self.magnetization_values().iter().map(|&m| c(m, 0.0)).collect::<Vec<_>>().into())
    }

    /// Projector onto the all-up state.
    pub fn north_projector(&self) -> CMat {
        let mut p = CMat::zeros(self.dim(), self.dim());
        p[(0, 0)] = c(1.0, 0.0);
        p
    }

    /// `|↑…↑⟩⟨↑…↑|` in the model's representation.
    pub fn all_up(&self) -> DensityMatrix {
        let mut psi = crate::linalg::CVec::zeros(self.dim());
        psi[0] = c(1.0, 0.0);
        DensityMatrix::from_pure(&psi)
    }

    pub fn hamiltonian_norm(&self) -> f64 {
        linalg::operator_norm(self.hamiltonian.matrix())
    }

    /// `max_k ‖L_k†L_k‖`.
    pub fn max_dissipator_norm(&self) -> f64 {
        self.lindblad_ops
            .iter()
            .map(|l| linalg::operator_norm(&(l.matrix().adjoint() * l.matrix())))
            .fold(0.0, f64::max)
    }

    /// `‖½ Σ_k L_k†L_k‖`.
    pub fn decay_norm(&self) -> f64 {
        linalg::operator_norm(&self.effective_decay())
    }

    fn effective_decay(&self) -> CMat {
        let d = self.dim();
        self.lindblad_ops
            .iter()
            .fold(CMat::zeros(d, d), |acc, l| acc + l.matrix().adjoint() * l.matrix())
            * c(0.5, 0.0)
    }

    /// `K = −iH − ½ Σ L†L`, the generator of the no-jump evolution.
    pub fn non_hermitian_generator(&self) -> CMat {
        self.hamiltonian.matrix() * (-I) - self.effective_decay()
    }

    /// `dρ/dt = −i[H, ρ] + Σ (LρL† − ½{L†L, ρ})`.
    pub fn rhs(&self, rho: &CMat) -> CMat {
        LindbladRhs::new(self).eval(rho)
    }
}

/// Precomputed generator pieces for repeated right-hand-side evaluation.
pub(crate) struct LindbladRhs {
    k: CMat,
    ops: Vec<(CMat, CMat)>,
}

impl LindbladRhs {
    pub(crate) fn new(model: &LindbladModel) -> Self {
        Self {
            k: model.non_hermitian_generator(),
            ops: model
                .lindblad_ops
                .iter()
                .map(|l| (l.matrix().clone(), l.matrix().adjoint()))
                .collect(),
        }
    }

    /// Assumes Hermitian `ρ` and returns an exactly Hermitian result, so the
    /// integrated state never acquires an anti-Hermitian part (which the
    /// `Kρ + (Kρ)†` form would amplify).
    pub(crate) fn eval(&self, rho: &CMat) -> CMat {
        let mut acc = &self.k * rho;
        for (l, ld) in &self.ops {
            acc += (l * rho * ld) * c(0.5, 0.0);
        }
        let mut out = acc.adjoint();
        out += acc;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{dicke_project, SymmetricEmbedding};

    #[test]
    fn single_qubit_dephasing_operator() {
        let m = build_dephasing_model(1, 1.0, 1.0, Representation::Full, OperatorMode::Collective).unwrap();
        let l = m.lindblad_ops()[0].matrix();
        // 2(1 + σz) = diag(4, 0) with up first.
        assert_eq!(l[(0, 0)], c(4.0, 0.0));
        assert_eq!(l[(1, 1)], c(0.0, 0.0));
        assert_eq!(l[(0, 1)], c(0.0, 0.0));
        let d = build_dephasing_model(1, 1.0, 1.0, Representation::Dicke, OperatorMode::Collective).unwrap();
        assert!(linalg::max_abs_diff(d.lindblad_ops()[0].matrix(), l) < 1e-15);
    }

    fn permutation(n: usize, a: usize, b: usize) -> CMat {
        let dim = 1usize << n;
        let bit = |q: usize| n - 1 - q;
        CMat::from_fn(dim, dim, |r, col| {
            let (xa, xb) = ((col >> bit(a)) & 1, (col >> bit(b)) & 1);
            let mut y = col & !(1 << bit(a)) & !(1 << bit(b));
            y |= xa << bit(b);
            y |= xb << bit(a);
            if r == y { c(1.0, 0.0) } else { c(0.0, 0.0) }
        })
    }

    #[test]
    fn collective_operators_are_permutation_symmetric() {
        let n = 4;
        let models = [
            build_dephasing_model(n, 1.0, 1.0, Representation::Full, OperatorMode::Collective).unwrap(),
            build_thermal_model(n, 1.0, 0.1, 10.0, Representation::Full, OperatorMode::Collective).unwrap(),
        ];
        for (a, b) in [(0, 1), (1, 3), (0, 2)] {
            let p = permutation(n, a, b);
            for m in &models {
                let l = m.lindblad_ops()[0].matrix();
                assert!(linalg::max_abs_diff(&(&p * l), &(l * &p)) < 1e-14);
                let h = m.hamiltonian().matrix();
                assert!(linalg::max_abs_diff(&(&p * h), &(h * &p)) < 1e-14);
            }
        }
    }

    #[test]
    fn dicke_operators_are_restrictions() {
        for n in 1..=5 {
            let emb = SymmetricEmbedding::new(n).unwrap();
            let pairs = [
                (
                    build_dephasing_model(n, 0.7, 1.0, Representation::Full, OperatorMode::Collective).unwrap(),
                    build_dephasing_model(n, 0.7, 1.0, Representation::Dicke, OperatorMode::Collective).unwrap(),
                ),
                (
                    build_thermal_model(n, 0.7, 0.1, 10.0, Representation::Full, OperatorMode::Collective).unwrap(),
                    build_thermal_model(n, 0.7, 0.1, 10.0, Representation::Dicke, OperatorMode::Collective).unwrap(),
                ),
            ];
            for (full, dicke) in &pairs {
                let v = emb.isometry();
                let lf = full.lindblad_ops()[0].matrix();
                let ld = dicke.lindblad_ops()[0].matrix();
                // The collective operators leave the symmetric subspace invariant.
                assert!(linalg::max_abs_diff(&(lf * v), &(v * ld)) < 1e-12, "n = {n}");
                let hd = emb.project_operator(full.hamiltonian().matrix()).unwrap();
                assert!(linalg::max_abs_diff(&hd, dicke.hamiltonian().matrix()) < 1e-12);
            }
        }
    }

    #[test]
    fn comparable_norms_at_ten_qubits() {
        let m = build_dephasing_model(10, 1.0, 1.0, Representation::Dicke, OperatorMode::Collective).unwrap();
        let h = m.hamiltonian_norm();
        let d = m.decay_norm();
        assert!((h - 512.0).abs() < 1e-9);
        assert!((d - 800.0).abs() < 1e-9);
        assert!(d / h < 2.0 && h / d < 2.0);
    }

    #[test]
    fn rhs_is_trace_free_and_hermitian() {
        let m = build_thermal_model(3, 1.0, 0.1, 10.0, Representation::Full, OperatorMode::Local).unwrap();
        assert_eq!(m.lindblad_ops().len(), 3);
        let rho = DensityMatrix::maximally_mixed(8);
        let mut r = rho.matrix().clone();
        r[(0, 3)] = c(0.01, 0.02);
        r[(3, 0)] = c(0.01, -0.02);
        let d = m.rhs(&r);
        assert!(linalg::trace(&d).norm() < 1e-13);
        assert!(linalg::hermiticity_deviation(&d) < 1e-13);
    }

    #[test]
    fn local_mode_rejected_for_dicke() {
        assert!(build_dephasing_model(4, 1.0, 1.0, Representation::Dicke, OperatorMode::Local).is_err());
        assert!(build_dephasing_model(13, 1.0, 1.0, Representation::Full, OperatorMode::Collective).is_err());
        assert!(build_dephasing_model(20, 1.0, 1.0, Representation::Dicke, OperatorMode::Collective).is_ok());
    }

    #[test]
    fn magnetization_conventions() {
        let full = build_closed_model(3, 1.0, Representation::Full).unwrap();
        let m = full.magnetization_values();
        assert_eq!(m[0], 1.5);
        assert_eq!(m[7], -1.5);
        assert_eq!(m[0b010], 0.5);
        let rho = full.all_up();
        let p = dicke_project(&rho, 3, 1e-12).unwrap();
        assert!((p.rho.population(0) - 1.0).abs() < 1e-14);
    }
}
