//! Seeded samplers for test and verification states.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numerics::{c64, ComplexMatrix, C64};
use crate::states::{DensityMatrix, PureState};

pub type StateRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> StateRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state.
pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> PureState {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
        if let Ok(s) = PureState::normalized(v) {
            return s;
        }
    }
}

/// `GG†/Tr(GG†)` for a `dim × rank` complex Gaussian `G`; Hilbert–Schmidt
/// distributed when `rank = dim`.
pub fn random_density_rank<R: Rng + ?Sized>(rng: &mut R, dims: Vec<usize>, rank: usize) -> DensityMatrix {
    let n: usize = dims.iter().product();
    let g = ComplexMatrix::from_fn(n, rank, |_, _| gaussian(rng));
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::new(w.scale_real(1.0 / tr).hermitian_part(), dims).expect("Gram matrices are states")
}

pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dims: Vec<usize>) -> DensityMatrix {
    let n = dims.iter().product();
    random_density_rank(rng, dims, n)
}

/// Hilbert–Schmidt random two-qubit state.
pub fn random_two_qubit<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    random_density(rng, vec![2, 2])
}

/// `ρ_A ⊗ ρ_B` with independent Hilbert–Schmidt random qubits.
pub fn random_product<R: Rng + ?Sized>(rng: &mut R) -> (DensityMatrix, DensityMatrix) {
    (random_density(rng, vec![2]), random_density(rng, vec![2]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_from_seed() {
        let a = random_two_qubit(&mut seeded_rng(9));
        let b = random_two_qubit(&mut seeded_rng(9));
        assert_eq!(a, b);
        assert_ne!(a, random_two_qubit(&mut seeded_rng(10)));
    }

    #[test]
    fn samples_are_states() {
        let mut rng = seeded_rng(1);
        for _ in 0..50 {
            let rho = random_two_qubit(&mut rng);
            assert!(rho.eigenvalues()[0] > -1e-12);
            assert!(random_density_rank(&mut rng, vec![2, 2], 1).eigenvalues()[2].abs() < 1e-12);
            let psi = random_pure(&mut rng, 3);
            let norm: f64 = psi.amplitudes().iter().map(|a| a.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-14);
        }
    }
}
