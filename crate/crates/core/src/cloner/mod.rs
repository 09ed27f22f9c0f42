//! Symmetric 1→2 cloning machines on an `M`-dimensional system.
//!
//! Two families share one representation. The orthogonal machine copies
//! `|i⟩ → c|ii⟩|X_ii⟩ + d Σ_{j≠i} (|ij⟩+|ji⟩)|Y_ij⟩` with orthonormal machine
//! states and `c² = 1 − 2(M−1)d²`. The non-orthogonal machine drops `c, d`
//! and moves the weights into machine-state overlaps:
//! `⟨X_ii|X_ii⟩ = 1 − 2(M−1)λ`, `⟨Y_ij|Y_ij⟩ = λ`, `⟨X_ii|Y_jk⟩ = μ/2` for `i ≠ j`.

mod closed_form;
mod isometry;

pub use closed_form::{
    clone_joint, clone_reduced, distortion_joint, distortion_single, fidelity,
    reduced_coefficients,
};
pub use isometry::{build_isometry, gram_matrix, oracle_clone_joint, Isometry, MachineVector};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack on the overlap inequality `(μ/2)² ≤ λ(1 − 2(M−1)λ)`.
pub const SCHWARTZ_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MachineKind {
    Orthogonal,
    NonOrthogonal,
}

impl MachineKind {
    pub fn label(self) -> &'static str {
        match self {
            MachineKind::Orthogonal => "orthogonal",
            MachineKind::NonOrthogonal => "non-orthogonal",
        }
    }
}

/// A validated cloning machine. Construct through [`CloningMachine::orthogonal`],
/// [`CloningMachine::non_orthogonal`] or [`si_params`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum CloningMachine {
    Orthogonal { dim: usize, d: f64 },
    NonOrthogonal { dim: usize, lambda: f64, mu: f64 },
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidMachine(format!("system dimension {dim} < 2")));
    }
    Ok(())
}

/// Upper end of the allowed `d²` (orthogonal) or `λ` (non-orthogonal) range.
pub fn max_weight(dim: usize) -> f64 {
    1.0 / (2.0 * (dim as f64 - 1.0))
}

impl CloningMachine {
    pub fn orthogonal(dim: usize, d: f64) -> Result<Self> {
        check_dim(dim)?;
        if !d.is_finite() || d < 0.0 {
            return Err(Error::InvalidMachine(format!("d = {d} must be a nonnegative real")));
        }
        let c2 = 1.0 - 2.0 * (dim as f64 - 1.0) * d * d;
        if c2 < -SCHWARTZ_TOL {
            return Err(Error::InvalidMachine(format!(
                "d² = {} exceeds 1/(2(M−1)) = {} at M = {dim}",
                d * d,
                max_weight(dim)
            )));
        }
        Ok(CloningMachine::Orthogonal { dim, d })
    }

    pub fn non_orthogonal(dim: usize, lambda: f64, mu: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(lambda.is_finite() && mu.is_finite()) {
            return Err(Error::InvalidMachine("non-finite λ or μ".into()));
        }
        if !schwartz_feasible(lambda, mu, dim) {
            return Err(Error::InvalidMachine(format!(
                "(λ, μ) = ({lambda}, {mu}) violates 0 ≤ λ ≤ {} or (μ/2)² ≤ λ(1−2(M−1)λ) at M = {dim}",
                max_weight(dim)
            )));
        }
        Ok(CloningMachine::NonOrthogonal { dim, lambda, mu })
    }

    pub fn kind(&self) -> MachineKind {
        match self {
            CloningMachine::Orthogonal { .. } => MachineKind::Orthogonal,
            CloningMachine::NonOrthogonal { .. } => MachineKind::NonOrthogonal,
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            CloningMachine::Orthogonal { dim, .. } | CloningMachine::NonOrthogonal { dim, .. } => dim,
        }
    }

    /// `(c, d)` of an orthogonal machine.
    pub fn orthogonal_coefficients(&self) -> Option<(f64, f64)> {
        match *self {
            CloningMachine::Orthogonal { dim, d } => {
                let c2 = 1.0 - 2.0 * (dim as f64 - 1.0) * d * d;
                Some((c2.max(0.0).sqrt(), d))
            }
            CloningMachine::NonOrthogonal { .. } => None,
        }
    }

    /// `(λ, μ)` of a non-orthogonal machine.
    pub fn overlap_parameters(&self) -> Option<(f64, f64)> {
        match *self {
            CloningMachine::NonOrthogonal { lambda, mu, .. } => Some((lambda, mu)),
            CloningMachine::Orthogonal { .. } => None,
        }
    }
}

/// `0 ≤ λ ≤ 1/(2(M−1))` and `(μ/2)² ≤ λ(1 − 2(M−1)λ)` up to [`SCHWARTZ_TOL`].
pub fn schwartz_feasible(lambda: f64, mu: f64, dim: usize) -> bool {
    if dim < 2 || !(0.0..=max_weight(dim)).contains(&lambda) {
        return false;
    }
    (mu / 2.0).powi(2) <= lambda * (1.0 - 2.0 * (dim as f64 - 1.0) * lambda) + SCHWARTZ_TOL
}

/// Largest `|μ|` allowed by the overlap inequality at this `λ`.
pub fn schwartz_mu_max(lambda: f64, dim: usize) -> f64 {
    2.0 * (lambda * (1.0 - 2.0 * (dim as f64 - 1.0) * lambda)).max(0.0).sqrt()
}

/// Largest `|μ|` for which the machine-state Gram matrix is positive
/// semidefinite, i.e. for which the machine vectors exist at all.
///
/// Each `X_kk` overlaps `(M−1)²` of the `Y` vectors, and the coupling block
/// has top singular value `(μ/2)²(M−1)³`, so this is the overlap bound
/// divided by `(M−1)^{3/2}`. It coincides with [`schwartz_mu_max`] at `M = 2`.
pub fn realizable_mu_max(lambda: f64, dim: usize) -> f64 {
    schwartz_mu_max(lambda, dim) / (dim as f64 - 1.0).powf(1.5)
}

/// Margin `λ(1 − 2(M−1)λ) − ((1 − Mλ)/2)²` of the overlap inequality along
/// the state-independence line `μ = 1 − Mλ`. Nonnegative iff feasible.
pub fn si_margin(lambda: f64, dim: usize) -> f64 {
    let m = dim as f64;
    lambda * (1.0 - 2.0 * (m - 1.0) * lambda) - ((1.0 - m * lambda) / 2.0).powi(2)
}

/// Maximizer and maximum of [`si_margin`] over `[0, 1/(2(M−1))]`.
pub fn si_margin_peak(dim: usize) -> (f64, f64) {
    let lam = crate::scan::golden_section_min(|l| -si_margin(l, dim), 0.0, max_weight(dim), 1e-14);
    (lam, si_margin(lam, dim))
}

/// The `λ` values on `samples` evenly spaced points of `[0, 1/(2(M−1))]`
/// that satisfy the overlap inequality with `μ = 1 − Mλ`.
pub fn si_feasible_sweep(dim: usize, samples: usize) -> Vec<f64> {
    let hi = max_weight(dim);
    (0..samples)
        .map(|k| hi * k as f64 / (samples - 1).max(1) as f64)
        .filter(|&l| schwartz_feasible(l, 1.0 - dim as f64 * l, dim))
        .collect()
}

/// The state-independent machine of the given kind.
///
/// Orthogonal: `d² = 1/(2(M+1))`. Non-orthogonal: the smallest `λ` with
/// `μ = 1 − Mλ` inside the overlap inequality, which minimizes the
/// distortion `M(M−1)λ²`. The inequality along that line reduces to
/// `(M² + 8M − 8)λ² − (2M + 4)λ + 1 ≤ 0`, whose discriminant `48 − 16M` is
/// negative for `M ≥ 4`.
pub fn si_params(kind: MachineKind, dim: usize) -> Result<CloningMachine> {
    check_dim(dim)?;
    let m = dim as f64;
    match kind {
        MachineKind::Orthogonal => CloningMachine::orthogonal(dim, (1.0 / (2.0 * (m + 1.0))).sqrt()),
        MachineKind::NonOrthogonal => {
            let disc = 48.0 - 16.0 * m;
            if disc < 0.0 {
                return Err(Error::NoUniversalMachine { dim });
            }
            let lambda = ((2.0 * m + 4.0) - disc.sqrt()) / (2.0 * (m * m + 8.0 * m - 8.0));
            CloningMachine::non_orthogonal(dim, lambda, 1.0 - m * lambda)
        }
    }
}
