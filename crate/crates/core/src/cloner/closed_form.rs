use super::CloningMachine;
use crate::error::{Error, Result};
use crate::numerics::{c64, hs_norm_sq, tensor, ComplexMatrix, C64};
use crate::states::{DensityMatrix, PureState};

fn check_input(m: &CloningMachine, psi: &PureState) -> Result<()> {
    if psi.dim() != m.dim() {
        return Err(Error::Dimension(format!(
            "input of dimension {} for a machine on dimension {}",
            psi.dim(),
            m.dim()
        )));
    }
    Ok(())
}

fn wrap(m: &CloningMachine, rho: ComplexMatrix, dims: Vec<usize>) -> Result<DensityMatrix> {
    DensityMatrix::new(rho, dims).map_err(|e| match e {
        Error::InvalidState(msg) => Error::InvalidMachine(format!("{m:?} gives a non-physical output: {msg}")),
        other => other,
    })
}

/// Joint two-clone state `ρ_ab` after tracing out the machine.
pub fn clone_joint(m: &CloningMachine, psi: &PureState) -> Result<DensityMatrix> {
    check_input(m, psi)?;
    let n = m.dim();
    let a = psi.amplitudes();
    let at = |i: usize, j: usize| i * n + j;
    let mut rho = ComplexMatrix::zeros(n * n, n * n);

    match *m {
        CloningMachine::Orthogonal { .. } => {
            let (c, d) = m.orthogonal_coefficients().unwrap();
            // machine direction e_m collects c α_m |mm⟩ and every d α_i |Φ_im⟩
            for k in 0..n {
                let mut w = vec![C64::default(); n * n];
                w[at(k, k)] += a[k] * c;
                for i in (0..n).filter(|&i| i != k) {
                    w[at(i, k)] += a[i] * d;
                    w[at(k, i)] += a[i] * d;
                }
                rho = &rho + &ComplexMatrix::outer(&w);
            }
        }
        CloningMachine::NonOrthogonal { lambda, mu, .. } => {
            let x_norm = 1.0 - 2.0 * (n as f64 - 1.0) * lambda;
            for i in 0..n {
                let p = a[i].norm_sqr();
                rho[(at(i, i), at(i, i))] += x_norm * p;
                for j in (0..n).filter(|&j| j != i) {
                    for (r, s) in [(at(i, j), at(i, j)), (at(i, j), at(j, i)), (at(j, i), at(i, j)), (at(j, i), at(j, i))] {
                        rho[(r, s)] += lambda * p;
                    }
                }
            }
            // |ii⟩⟨Φ_kl| coherences for k ≠ i, l ≠ k, and their adjoints
            for i in 0..n {
                for k in (0..n).filter(|&k| k != i) {
                    let coeff = a[i] * a[k].conj() * (mu / 2.0);
                    for l in (0..n).filter(|&l| l != k) {
                        for col in [at(k, l), at(l, k)] {
                            rho[(at(i, i), col)] += coeff;
                            rho[(col, at(i, i))] += coeff.conj();
                        }
                    }
                }
            }
        }
    }
    wrap(m, rho, vec![n, n])
}

/// `(a, b, w)` such that each clone is `ρ_ii = a|α_i|² + w`,
/// `ρ_ij = b α_i α_j*` for `i ≠ j`.
pub fn reduced_coefficients(m: &CloningMachine) -> (f64, f64, f64) {
    let n = m.dim() as f64;
    match *m {
        CloningMachine::Orthogonal { d, .. } => {
            let (c, _) = m.orthogonal_coefficients().unwrap();
            (c * c + (n - 2.0) * d * d, 2.0 * c * d + (n - 2.0) * d * d, d * d)
        }
        CloningMachine::NonOrthogonal { lambda, mu, .. } => (1.0 - n * lambda, mu, lambda),
    }
}

/// Single-clone state; both clones coincide.
pub fn clone_reduced(m: &CloningMachine, psi: &PureState) -> Result<DensityMatrix> {
    check_input(m, psi)?;
    let (diag, off, floor) = reduced_coefficients(m);
    let a = psi.amplitudes();
    let n = m.dim();
    let rho = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            c64(diag * a[i].norm_sqr() + floor, 0.0)
        } else {
            a[i] * a[j].conj() * off
        }
    });
    wrap(m, rho, vec![n])
}

/// `⟨ψ|ρ_a|ψ⟩`.
pub fn fidelity(m: &CloningMachine, psi: &PureState) -> Result<f64> {
    let rho = clone_reduced(m, psi)?;
    Ok(psi.expectation(rho.matrix()).re)
}

/// `Tr[(ρ_a − |ψ⟩⟨ψ|)²]`.
pub fn distortion_single(m: &CloningMachine, psi: &PureState) -> Result<f64> {
    let rho = clone_reduced(m, psi)?;
    Ok(hs_norm_sq(&(rho.matrix() - &psi.projector())))
}

/// `Tr[(ρ_ab − |ψ⟩⟨ψ| ⊗ |ψ⟩⟨ψ|)²]`.
pub fn distortion_joint(m: &CloningMachine, psi: &PureState) -> Result<f64> {
    let rho = clone_joint(m, psi)?;
    let p = psi.projector();
    Ok(hs_norm_sq(&(rho.matrix() - &tensor(&p, &p))))
}
