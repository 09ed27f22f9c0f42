//! Explicit isometry realizing a cloning machine, reconstructed from the
//! Gram matrix of its machine states.

use super::CloningMachine;
use crate::error::{Error, Result};
use crate::numerics::{c64, herm_eigen, partial_trace, ComplexMatrix, C64};
use crate::states::{DensityMatrix, PureState};

/// Eigenvalues of the Gram matrix above this are kept as machine directions;
/// anything in `[-GRAM_CLIP, GRAM_CLIP]` is treated as zero.
pub const GRAM_CLIP: f64 = 1e-12;

/// A post-cloning machine state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MachineVector {
    /// `X_ii`, attached to `|ii⟩`.
    X(usize),
    /// `Y_ij` with `i ≠ j`, attached to `|ij⟩ + |ji⟩` for input `i`.
    Y(usize, usize),
}

impl MachineVector {
    pub fn input(self) -> usize {
        match self {
            MachineVector::X(i) | MachineVector::Y(i, _) => i,
        }
    }
}

fn machine_vectors(dim: usize) -> Vec<MachineVector> {
    let mut v: Vec<_> = (0..dim).map(MachineVector::X).collect();
    for i in 0..dim {
        v.extend((0..dim).filter(|&j| j != i).map(|j| MachineVector::Y(i, j)));
    }
    v
}

fn overlap(m: &CloningMachine, p: MachineVector, q: MachineVector) -> f64 {
    use MachineVector::{X, Y};
    let n = m.dim() as f64;
    match *m {
        // X_ii = c e_i and Y_ij = d e_j on an M-dimensional orthonormal basis
        CloningMachine::Orthogonal { d, .. } => {
            let (c, _) = m.orthogonal_coefficients().unwrap();
            match (p, q) {
                (X(i), X(k)) => if i == k { c * c } else { 0.0 },
                (Y(_, j), Y(_, l)) => if j == l { d * d } else { 0.0 },
                (X(k), Y(_, j)) | (Y(_, j), X(k)) => if k == j { c * d } else { 0.0 },
            }
        }
        CloningMachine::NonOrthogonal { lambda, mu, .. } => match (p, q) {
            (X(i), X(k)) => if i == k { 1.0 - 2.0 * (n - 1.0) * lambda } else { 0.0 },
            (Y(..), Y(..)) => if p == q { lambda } else { 0.0 },
            (X(i), Y(j, _)) | (Y(j, _), X(i)) => if i != j { mu / 2.0 } else { 0.0 },
        },
    }
}

/// Machine-state labels and their Gram matrix, ordered
/// `X_00 … X_{M−1,M−1}` then `Y_ij` (`i ≠ j`) row by row.
pub fn gram_matrix(m: &CloningMachine) -> (Vec<MachineVector>, ComplexMatrix) {
    let labels = machine_vectors(m.dim());
    let g = ComplexMatrix::from_fn(labels.len(), labels.len(), |p, q| c64(overlap(m, labels[p], labels[q]), 0.0));
    (labels, g)
}

/// The linear map `|i⟩ ↦ |ii⟩|X_ii⟩ + Σ_{j≠i} (|ij⟩+|ji⟩)|Y_ij⟩` as an
/// `(M·M·r) × M` matrix, with the output space ordered (clone a, clone b,
/// machine) and `r` the rank of the Gram matrix.
#[derive(Clone, Debug)]
pub struct Isometry {
    pub map: ComplexMatrix,
    pub dim: usize,
    pub ancilla: usize,
}

impl Isometry {
    /// `max |V†V − I|`.
    pub fn isometry_defect(&self) -> f64 {
        (&self.map.adjoint() * &self.map).max_abs_diff(&ComplexMatrix::identity(self.dim))
    }

    /// Output dims `[M, M, r]`.
    pub fn output_dims(&self) -> [usize; 3] {
        [self.dim, self.dim, self.ancilla]
    }

    pub fn apply_pure(&self, psi: &PureState) -> Vec<C64> {
        let out = &self.map * &ComplexMatrix::column(psi.amplitudes());
        (0..out.rows()).map(|i| out[(i, 0)]).collect()
    }
}

pub fn build_isometry(m: &CloningMachine) -> Result<Isometry> {
    let n = m.dim();
    let (labels, g) = gram_matrix(m);
    let (vals, vecs) = herm_eigen(&g)?;
    if vals[0] < -GRAM_CLIP {
        return Err(Error::InfeasibleMachine(format!(
            "{m:?}: machine-state Gram matrix has eigenvalue {:.3e}",
            vals[0]
        )));
    }
    // G = U diag(w) U†; rows sqrt(w_k) u_k† for w_k > 0 give V with V†V = G
    let kept: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] > GRAM_CLIP).collect();
    let r = kept.len().max(1);
    let component = |p: usize, slot: usize| -> C64 {
        kept.get(slot).map_or(C64::default(), |&k| vecs[(p, k)].conj() * vals[k].sqrt())
    };

    let mut map = ComplexMatrix::zeros(n * n * r, n);
    for (p, &label) in labels.iter().enumerate() {
        let kets: Vec<usize> = match label {
            MachineVector::X(i) => vec![i * n + i],
            MachineVector::Y(i, j) => vec![i * n + j, j * n + i],
        };
        for ket in kets {
            for slot in 0..r {
                map[(ket * r + slot, label.input())] += component(p, slot);
            }
        }
    }

    let iso = Isometry { map, dim: n, ancilla: r };
    let defect = iso.isometry_defect();
    if defect > 1e-10 {
        return Err(Error::InfeasibleMachine(format!("{m:?}: output Gram deviates from identity by {defect:.3e}")));
    }
    Ok(iso)
}

/// Joint clone state through the explicit isometry.
pub fn oracle_clone_joint(m: &CloningMachine, psi: &PureState) -> Result<DensityMatrix> {
    if psi.dim() != m.dim() {
        return Err(Error::Dimension(format!(
            "input of dimension {} for a machine on dimension {}",
            psi.dim(),
            m.dim()
        )));
    }
    let iso = build_isometry(m)?;
    let out = ComplexMatrix::outer(&iso.apply_pure(psi));
    let n = m.dim();
    DensityMatrix::new(partial_trace(&out, &iso.output_dims(), &[0, 1])?, vec![n, n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloner::{clone_joint, realizable_mu_max, schwartz_mu_max, si_params, MachineKind};
    use crate::numerics::herm_eigenvalues;
    use crate::random::{random_pure, seeded_rng};
    use proptest::prelude::*;

    #[test]
    fn si_orthogonal_columns_are_orthonormal() {
        let iso = build_isometry(&si_params(MachineKind::Orthogonal, 2).unwrap()).unwrap();
        assert!(iso.isometry_defect() < 1e-14);
        assert_eq!(iso.ancilla, 2);
        let iso4 = build_isometry(&si_params(MachineKind::Orthogonal, 4).unwrap()).unwrap();
        assert_eq!(iso4.ancilla, 4);
    }

    #[test]
    fn schwartz_boundary_is_rank_deficient() {
        let m = CloningMachine::non_orthogonal(2, 0.25, schwartz_mu_max(0.25, 2)).unwrap();
        let ev = herm_eigenvalues(&gram_matrix(&m).1).unwrap();
        assert!(ev[0].abs() < 1e-14);
        assert!(build_isometry(&m).unwrap().ancilla < 4);
        let interior = CloningMachine::non_orthogonal(2, 0.25, 0.5).unwrap();
        assert_eq!(build_isometry(&interior).unwrap().ancilla, 4);
    }

    #[test]
    fn overlap_violation_is_infeasible() {
        let bad = CloningMachine::NonOrthogonal { dim: 2, lambda: 0.25, mu: 0.9 };
        assert!(matches!(build_isometry(&bad), Err(Error::InfeasibleMachine(_))));
    }

    #[test]
    fn m4_realizability_threshold() {
        let l = 1.0 / 12.0;
        let edge = realizable_mu_max(l, 4);
        assert!((edge - 2.0 * (l * 0.5 / 27.0).sqrt()).abs() < 1e-15);
        let g = |mu| herm_eigenvalues(&gram_matrix(&CloningMachine::NonOrthogonal { dim: 4, lambda: l, mu }).1).unwrap()[0];
        assert!(g(edge).abs() < 1e-12);
        assert!(g(edge * 1.01) < -1e-6);
        assert!(g(0.4) < -0.5);
        assert!(build_isometry(&CloningMachine::non_orthogonal(4, l, 0.4).unwrap()).is_err());
        assert!(build_isometry(&CloningMachine::non_orthogonal(4, l, edge).unwrap()).is_ok());
    }

    #[test]
    fn basis_inputs_copy_perfectly_without_d() {
        let m = CloningMachine::orthogonal(3, 0.0).unwrap();
        for i in 0..3 {
            let rho = oracle_clone_joint(&m, &PureState::basis(3, i)).unwrap();
            let mut diag = vec![0.0; 9];
            diag[i * 3 + i] = 1.0;
            assert!(rho.matrix().max_abs_diff(&ComplexMatrix::from_real_diagonal(&diag)) < 1e-12);
        }
    }

    #[test]
    fn oracle_matches_closed_form_for_si_machines() {
        let mut rng = seeded_rng(11);
        for m in [
            si_params(MachineKind::Orthogonal, 2).unwrap(),
            si_params(MachineKind::NonOrthogonal, 2).unwrap(),
            si_params(MachineKind::Orthogonal, 4).unwrap(),
        ] {
            for _ in 0..20 {
                let psi = random_pure(&mut rng, m.dim());
                let a = oracle_clone_joint(&m, &psi).unwrap();
                let b = clone_joint(&m, &psi).unwrap();
                assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-10);
            }
        }
    }

    fn realizable(dim: usize) -> impl Strategy<Value = CloningMachine> {
        let hi = super::super::max_weight(dim);
        prop_oneof![
            (0.0..=hi.sqrt()).prop_map(move |d| CloningMachine::orthogonal(dim, d).unwrap()),
            (0.0..=hi, -1.0f64..=1.0).prop_map(move |(l, t)| {
                CloningMachine::non_orthogonal(dim, l, t * realizable_mu_max(l, dim)).unwrap()
            }),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn oracle_equals_closed_form(
            (m, seed) in prop_oneof![Just(2usize), Just(3), Just(4)].prop_flat_map(|n| (realizable(n), any::<u64>()))
        ) {
            let psi = random_pure(&mut seeded_rng(seed), m.dim());
            let a = oracle_clone_joint(&m, &psi).unwrap();
            let b = clone_joint(&m, &psi).unwrap();
            prop_assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-10);
            prop_assert!((a.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }
}
