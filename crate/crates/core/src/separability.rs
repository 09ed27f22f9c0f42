//! Two-qubit entanglement tests: partial transposition and its determinant
//! form, plus the broadcasting predicate over four output pairs.

use serde::Serialize;

use crate::channels::BroadcastOutputs;
use crate::error::{Error, Result};
use crate::numerics::{determinant, herm_eigenvalues, leading_minor, partial_transpose, ComplexMatrix};
use crate::states::DensityMatrix;

/// A partial-transpose eigenvalue below this marks an entangled state.
pub const PT_NEGATIVITY_TOL: f64 = -1e-10;
/// Determinants closer to zero than this are too small to carry a verdict.
pub const DET_BAND: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeparabilityVerdict {
    pub inseparable: bool,
    pub min_pt_eigenvalue: f64,
    pub w2: f64,
    pub w3: f64,
    pub w4: f64,
}

fn pt_second(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !rho.is_square() || rho.dim() != 4 {
        return Err(Error::Dimension(format!(
            "separability tests need a 4x4 matrix, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    partial_transpose(rho, &[2, 2], 1)
}

/// Leading principal minors of orders 2, 3 and 4 of the partial transpose
/// in the basis `|00⟩, |01⟩, |10⟩, |11⟩`.
pub fn w_determinants(rho: &DensityMatrix) -> Result<(f64, f64, f64)> {
    w_of_matrix(rho.matrix())
}

fn w_of_matrix(rho: &ComplexMatrix) -> Result<(f64, f64, f64)> {
    let pt = pt_second(rho)?;
    Ok((leading_minor(&pt, 2).re, leading_minor(&pt, 3).re, determinant(&pt).re))
}

/// Peres–Horodecki test on any Hermitian 4×4 matrix.
pub fn ppt_test_matrix(rho: &ComplexMatrix) -> Result<SeparabilityVerdict> {
    let pt = pt_second(rho)?;
    let min = herm_eigenvalues(&pt)?[0];
    let (w2, w3, w4) = w_of_matrix(rho)?;
    Ok(SeparabilityVerdict { inseparable: min < PT_NEGATIVITY_TOL, min_pt_eigenvalue: min, w2, w3, w4 })
}

pub fn ppt_test(rho: &DensityMatrix) -> Result<SeparabilityVerdict> {
    ppt_test_matrix(rho.matrix())
}

/// Outcome of the determinant criterion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DeterminantVerdict {
    /// `W₂ ≥ 0` and `W₃ < 0` or `W₄ < 0`.
    Inseparable,
    /// All three nonnegative.
    Separable,
    /// Some determinant lies inside the `±DET_BAND` band.
    Undecided,
}

pub fn determinant_verdict(w2: f64, w3: f64, w4: f64) -> DeterminantVerdict {
    if [w2, w3, w4].iter().any(|w| w.abs() < DET_BAND) {
        return DeterminantVerdict::Undecided;
    }
    if w2 >= 0.0 && (w3 < 0.0 || w4 < 0.0) {
        DeterminantVerdict::Inseparable
    } else if w2 >= 0.0 && w3 >= 0.0 && w4 >= 0.0 {
        DeterminantVerdict::Separable
    } else {
        DeterminantVerdict::Undecided
    }
}

impl SeparabilityVerdict {
    pub fn determinant_verdict(&self) -> DeterminantVerdict {
        determinant_verdict(self.w2, self.w3, self.w4)
    }

    /// `None` inside the tolerance band, otherwise whether both criteria agree.
    pub fn criteria_agree(&self) -> Option<bool> {
        match self.determinant_verdict() {
            DeterminantVerdict::Undecided => None,
            DeterminantVerdict::Inseparable => Some(self.inseparable),
            DeterminantVerdict::Separable => Some(!self.inseparable),
        }
    }
}

/// Separability data for the four broadcast outputs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BroadcastVerdict {
    pub local: [SeparabilityVerdict; 2],
    pub nonlocal: [SeparabilityVerdict; 2],
}

impl BroadcastVerdict {
    pub fn local_separable(&self) -> bool {
        self.local.iter().all(|v| !v.inseparable)
    }

    pub fn nonlocal_inseparable(&self) -> bool {
        self.nonlocal.iter().all(|v| v.inseparable)
    }

    pub fn broadcast(&self) -> bool {
        self.local_separable() && self.nonlocal_inseparable()
    }

    /// The smaller local minimum; at or above the threshold iff both local
    /// pairs are separable.
    pub fn min_pt_local(&self) -> f64 {
        self.local[0].min_pt_eigenvalue.min(self.local[1].min_pt_eigenvalue)
    }

    /// The larger non-local minimum; below the threshold iff both non-local
    /// pairs are entangled.
    pub fn min_pt_nonlocal(&self) -> f64 {
        self.nonlocal[0].min_pt_eigenvalue.max(self.nonlocal[1].min_pt_eigenvalue)
    }
}

pub fn broadcast_verdict(outputs: &BroadcastOutputs) -> Result<BroadcastVerdict> {
    Ok(BroadcastVerdict {
        local: [ppt_test(&outputs.local.0)?, ppt_test(&outputs.local.1)?],
        nonlocal: [ppt_test(&outputs.nonlocal.0)?, ppt_test(&outputs.nonlocal.1)?],
    })
}

/// Both non-local pairs entangled and both local pairs separable.
pub fn is_broadcast(outputs: &BroadcastOutputs) -> Result<bool> {
    Ok(broadcast_verdict(outputs)?.broadcast())
}
