//! Pure states, density matrices, the two-qubit Bloch/correlation form and
//! the Bell-diagonal family.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{c64, herm_eigenvalues, pauli, tensor, ComplexMatrix, C64, HERMITICITY_TOL};

pub const NORM_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-9;
/// Smallest eigenvalue tolerated in a density matrix.
pub const PSD_TOL: f64 = -1e-9;
/// Smallest mixing weight tolerated in a Bell-diagonal state.
pub const BDS_WEIGHT_TOL: f64 = -1e-12;

/// Normalized state vector in a `dim`-dimensional space.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("empty amplitude vector".into()));
        }
        let norm: f64 = amplitudes.iter().map(C64::norm_sqr).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm} is not 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Self::new(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut a = vec![C64::default(); dim];
        a[index] = c64(1.0, 0.0);
        Self { amplitudes: a }
    }

    /// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
    pub fn qubit(theta: f64, phi: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Self {
            amplitudes: vec![c64(c, 0.0), C64::from_polar(s, phi)],
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes)
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: self.projector(),
            dims: vec![self.dim()],
        }
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, a: &ComplexMatrix) -> C64 {
        let n = self.dim();
        let mut acc = C64::default();
        for i in 0..n {
            for j in 0..n {
                acc += self.amplitudes[i].conj() * a[(i, j)] * self.amplitudes[j];
            }
        }
        acc
    }
}

/// A trace-one positive semidefinite Hermitian matrix with its tensor
/// factorization.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() || dims.iter().product::<usize>() != matrix.rows() {
            return Err(Error::Dimension(format!(
                "matrix {}x{} does not factor as {dims:?}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let herm = matrix.hermiticity_deviation();
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = herm_eigenvalues(&matrix)?[0];
        if min < PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { matrix, dims })
    }

    pub fn two_qubit(matrix: ComplexMatrix) -> Result<Self> {
        Self::new(matrix, vec![2, 2])
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        Self {
            matrix: ComplexMatrix::identity(n).scale_real(1.0 / n as f64),
            dims,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        herm_eigenvalues(&self.matrix).expect("density matrices are Hermitian")
    }

    /// `ρ ⊗ σ` with concatenated subsystem dims.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix {
            matrix: tensor(&self.matrix, &other.matrix),
            dims,
        }
    }
}

/// Two-qubit state in Bloch form: local Bloch vectors `x` (qubit 1) and `y`
/// (qubit 2) and correlation matrix `t[u][v] = Tr[ρ σ_u ⊗ σ_v]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitBloch {
    pub x: [f64; 3],
    pub y: [f64; 3],
    pub t: [[f64; 3]; 3],
}

impl TwoQubitBloch {
    /// Validated constructor: the triple must describe a physical state.
    pub fn new(x: [f64; 3], y: [f64; 3], t: [[f64; 3]; 3]) -> Result<Self> {
        let s = Self { x, y, t };
        density_from_bloch(&s)?;
        Ok(s)
    }

    /// Raw triple with no physicality check, e.g. a printed channel formula.
    pub fn unchecked(x: [f64; 3], y: [f64; 3], t: [[f64; 3]; 3]) -> Self {
        Self { x, y, t }
    }

    pub fn zero() -> Self {
        Self::unchecked([0.0; 3], [0.0; 3], [[0.0; 3]; 3])
    }

    /// `{0, 0, diag(c)}`.
    pub fn diagonal(c: [f64; 3]) -> Self {
        let mut t = [[0.0; 3]; 3];
        for u in 0..3 {
            t[u][u] = c[u];
        }
        Self::unchecked([0.0; 3], [0.0; 3], t)
    }

    /// `¼[I + Σ x_u σ_u⊗I + Σ y_u I⊗σ_u + Σ t_uv σ_u⊗σ_v]`, unvalidated.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let id = pauli::identity();
        let mut m = ComplexMatrix::identity(4);
        for u in 0..3 {
            let s = pauli::sigma(u);
            m = &m + &tensor(&s, &id).scale_real(self.x[u]);
            m = &m + &tensor(&id, &s).scale_real(self.y[u]);
            for v in 0..3 {
                m = &m + &tensor(&s, &pauli::sigma(v)).scale_real(self.t[u][v]);
            }
        }
        m.scale_real(0.25)
    }

    /// Largest componentwise difference across `x`, `y` and `t`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for u in 0..3 {
            d = d.max((self.x[u] - other.x[u]).abs());
            d = d.max((self.y[u] - other.y[u]).abs());
            for v in 0..3 {
                d = d.max((self.t[u][v] - other.t[u][v]).abs());
            }
        }
        d
    }

    /// Exchanges the roles of the two qubits.
    pub fn swapped(&self) -> Self {
        let mut t = [[0.0; 3]; 3];
        for u in 0..3 {
            for v in 0..3 {
                t[u][v] = self.t[v][u];
            }
        }
        Self::unchecked(self.y, self.x, t)
    }
}

pub fn density_from_bloch(s: &TwoQubitBloch) -> Result<DensityMatrix> {
    DensityMatrix::two_qubit(s.to_matrix())
}

/// Bloch coordinates of any 4×4 matrix through the trace formulas.
pub fn bloch_of_matrix(rho: &ComplexMatrix) -> Result<TwoQubitBloch> {
    if !rho.is_square() || rho.dim() != 4 {
        return Err(Error::Dimension(format!(
            "Bloch form needs a 4x4 matrix, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    let id = pauli::identity();
    let tr = |op: &ComplexMatrix| (rho * op).trace().re;
    let mut out = TwoQubitBloch::zero();
    for u in 0..3 {
        let s = pauli::sigma(u);
        out.x[u] = tr(&tensor(&s, &id));
        out.y[u] = tr(&tensor(&id, &s));
        for v in 0..3 {
            out.t[u][v] = tr(&tensor(&s, &pauli::sigma(v)));
        }
    }
    Ok(out)
}

pub fn bloch_from_density(rho: &DensityMatrix) -> Result<TwoQubitBloch> {
    bloch_of_matrix(rho.matrix())
}

/// The four Bell vectors in the fixed order used for mixing weights:
/// `(|01⟩+|10⟩)/√2`, `(|01⟩−|10⟩)/√2`, `(|00⟩+|11⟩)/√2`, `(|00⟩−|11⟩)/√2`.
pub fn bell_vectors() -> [[C64; 4]; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (p, m, o) = (c64(s, 0.0), c64(-s, 0.0), C64::default());
    [[o, p, p, o], [o, p, m, o], [p, o, o, p], [p, o, o, m]]
}

/// Bell-diagonal state `{0, 0, diag(c1, c2, c3)}`; coefficients in `[-1, 1]`.
///
/// Coefficients outside the physical tetrahedron are representable so that
/// scans can report them; [`BellDiagonal::is_valid`] decides physicality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellDiagonal {
    pub c: [f64; 3],
}

impl BellDiagonal {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        let c = [c1, c2, c3];
        if c.iter().any(|v| !(-1.0..=1.0).contains(v)) {
            return Err(Error::InvalidState(format!("correlation {c:?} outside [-1, 1]")));
        }
        Ok(Self { c })
    }

    pub fn bloch(&self) -> TwoQubitBloch {
        TwoQubitBloch::diagonal(self.c)
    }

    pub fn probs(&self) -> [f64; 4] {
        bds_probs(self)
    }

    pub fn is_valid(&self) -> bool {
        self.probs().iter().all(|&p| p >= BDS_WEIGHT_TOL)
    }

    pub fn density(&self) -> Result<DensityMatrix> {
        if !self.is_valid() {
            return Err(Error::InvalidState(format!(
                "Bell-diagonal coefficients {:?} give weights {:?}",
                self.c,
                self.probs()
            )));
        }
        density_from_bloch(&self.bloch())
    }
}

/// Mixing weights of the reconstructed Bell-diagonal matrix on the Bell
/// vectors of [`bell_vectors`], in that order. They sum to one; a negative
/// weight marks an unphysical triple.
pub fn bds_probs(s: &BellDiagonal) -> [f64; 4] {
    let rho = s.bloch().to_matrix();
    bell_vectors().map(|b| {
        let mut acc = C64::default();
        for i in 0..4 {
            for j in 0..4 {
                acc += b[i].conj() * rho[(i, j)] * b[j];
            }
        }
        acc.re
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::herm_eigen;
    use proptest::prelude::*;

    fn phi_plus() -> ComplexMatrix {
        ComplexMatrix::outer(&bell_vectors()[2])
    }

    #[test]
    fn pure_state_normalization() {
        assert!(PureState::new(vec![c64(1.0, 0.0), c64(1.0, 0.0)]).is_err());
        let s = PureState::normalized(vec![c64(1.0, 0.0), c64(0.0, 1.0)]).unwrap();
        assert!((s.amplitudes()[1].im - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(PureState::normalized(vec![C64::default(); 2]).is_err());
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::two_qubit(ComplexMatrix::identity(4)).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::identity(4), vec![2, 3]).is_err());
        let neg = ComplexMatrix::from_real_diagonal(&[1.1, -0.1]);
        assert!(matches!(DensityMatrix::new(neg, vec![2]), Err(Error::InvalidState(_))));
    }

    #[test]
    fn maximally_mixed_bloch_round_trip() {
        let rho = density_from_bloch(&TwoQubitBloch::zero()).unwrap();
        assert!(rho.matrix().max_abs_diff(&ComplexMatrix::identity(4).scale_real(0.25)) < 1e-15);
        let s = bloch_from_density(&DensityMatrix::maximally_mixed(vec![2, 2])).unwrap();
        assert!(s.max_abs_diff(&TwoQubitBloch::zero()) < 1e-15);
    }

    #[test]
    fn phi_plus_from_correlations() {
        // expanding ¼[I + XX − YY + ZZ] entry by entry gives the projector
        let rho = density_from_bloch(&TwoQubitBloch::diagonal([1.0, -1.0, 1.0])).unwrap();
        assert!(rho.matrix().max_abs_diff(&phi_plus()) < 1e-15);
        assert!(matches!(
            density_from_bloch(&TwoQubitBloch::diagonal([1.0, 1.0, 1.0])),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn basis_state_bloch() {
        let s = bloch_from_density(&PureState::basis(4, 0).density_two_qubit()).unwrap();
        let expected = TwoQubitBloch::unchecked(
            [0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0],
            [[0.0; 3], [0.0; 3], [0.0, 0.0, 1.0]],
        );
        assert!(s.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn product_state_correlations_factor() {
        let a = PureState::qubit(0.7, 1.1).density();
        let b = PureState::qubit(2.1, -0.4).density();
        let mixed = DensityMatrix::new(
            &a.matrix().scale_real(0.8) + &ComplexMatrix::identity(2).scale_real(0.1),
            vec![2],
        )
        .unwrap();
        let s = bloch_from_density(&mixed.tensor(&b)).unwrap();
        for u in 0..3 {
            for v in 0..3 {
                assert!((s.t[u][v] - s.x[u] * s.y[v]).abs() < 1e-12);
            }
        }
        assert!(bloch_of_matrix(&ComplexMatrix::identity(2)).is_err());
    }

    #[test]
    fn bds_weights() {
        let w = bds_probs(&BellDiagonal::new(0.0, 0.0, 0.0).unwrap());
        assert!(w.iter().all(|p| (p - 0.25).abs() < 1e-15));

        let w = bds_probs(&BellDiagonal::new(1.0, -1.0, 1.0).unwrap());
        assert!((w[2] - 1.0).abs() < 1e-15);
        assert!(w.iter().enumerate().all(|(i, p)| i == 2 || p.abs() < 1e-15));

        let bad = BellDiagonal::new(1.0, 1.0, 1.0).unwrap();
        assert!(bad.probs().iter().any(|&p| p < -0.1));
        assert!(!bad.is_valid());
        assert!(BellDiagonal::new(1.2, 0.0, 0.0).is_err());
    }

    #[test]
    fn bds_weights_match_eigendecomposition() {
        // oracle: eigendecompose the reconstructed matrix and pair each
        // eigenvector with the Bell vector it overlaps
        let s = BellDiagonal::new(0.3, -0.5, 0.2).unwrap();
        let (vals, vecs) = herm_eigen(&s.bloch().to_matrix()).unwrap();
        let weights = s.probs();
        for (k, &val) in vals.iter().enumerate() {
            let overlaps: Vec<f64> = bell_vectors()
                .iter()
                .map(|b| (0..4).map(|i| b[i].conj() * vecs[(i, k)]).sum::<C64>().norm())
                .collect();
            let best = (0..4).max_by(|&a, &b| overlaps[a].total_cmp(&overlaps[b])).unwrap();
            assert!((overlaps[best] - 1.0).abs() < 1e-12);
            assert!((weights[best] - val).abs() < 1e-12);
        }
    }

    #[test]
    fn tetrahedron_corners() {
        let mut rank_one = 0;
        let mut invalid = 0;
        for signs in 0..8u32 {
            let c: Vec<f64> = (0..3).map(|k| if signs >> k & 1 == 1 { -1.0 } else { 1.0 }).collect();
            let s = BellDiagonal::new(c[0], c[1], c[2]).unwrap();
            if s.is_valid() {
                let ev = s.density().unwrap().eigenvalues();
                assert!((ev[3] - 1.0).abs() < 1e-12);
                rank_one += 1;
            } else {
                invalid += 1;
            }
        }
        assert_eq!((rank_one, invalid), (4, 4));
    }

    impl PureState {
        fn density_two_qubit(&self) -> DensityMatrix {
            DensityMatrix::two_qubit(self.projector()).unwrap()
        }
    }

    fn arb_two_qubit() -> impl Strategy<Value = ComplexMatrix> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16).prop_map(|v| {
            let g = ComplexMatrix::from_fn(4, 4, |i, j| c64(v[i * 4 + j].0, v[i * 4 + j].1));
            let m = &g * &g.adjoint();
            let tr = m.trace().re;
            m.scale_real(1.0 / tr)
        })
    }

    proptest! {
        #[test]
        fn bloch_round_trip(m in arb_two_qubit()) {
            let rho = DensityMatrix::two_qubit(m).unwrap();
            let s = bloch_from_density(&rho).unwrap();
            let back = density_from_bloch(&s).unwrap();
            prop_assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-12);
            prop_assert!(bloch_from_density(&back).unwrap().max_abs_diff(&s) < 1e-12);
        }

        #[test]
        fn physical_bds_stays_diagonal(c1 in -1.0f64..1.0, c2 in -1.0f64..1.0, c3 in -1.0f64..1.0) {
            let s = BellDiagonal::new(c1, c2, c3).unwrap();
            prop_assert!((s.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            if s.is_valid() {
                let back = bloch_from_density(&s.density().unwrap()).unwrap();
                prop_assert!(back.max_abs_diff(&s.bloch()) < 1e-12);
            }
        }
    }
}
