use std::str::FromStr;

use serde::Serialize;

use super::ensemble::{distortion_at, fidelity_at, EnsembleMode, EnsembleSpec, PuritySummary};
use super::{golden_section_min, grid_then_golden};
use crate::cloner::{max_weight, schwartz_mu_max, CloningMachine, MachineKind};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
pub enum Objective {
    #[default]
    MeanDistortion,
    WorstDistortion,
    MeanFidelity,
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "mean" | "mean-distortion" => Ok(Objective::MeanDistortion),
            "worst" | "worst-distortion" => Ok(Objective::WorstDistortion),
            "fidelity" | "mean-fidelity" => Ok(Objective::MeanFidelity),
            _ => Err(format!("unknown objective `{s}` (expected mean, worst or fidelity)")),
        }
    }
}

impl Objective {
    /// Value to minimize. Distortion and fidelity are affine in the input
    /// purity, so the worst case sits at an extreme of its range.
    fn score(self, m: &CloningMachine, p: &PuritySummary) -> f64 {
        match self {
            Objective::MeanDistortion => distortion_at(m, p.mean),
            Objective::WorstDistortion => distortion_at(m, p.min).max(distortion_at(m, p.max)),
            Objective::MeanFidelity => -fidelity_at(m, p.mean),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Optimum {
    pub machine: CloningMachine,
    /// Mean single-clone distortion of `machine` over the ensemble.
    pub distortion: f64,
    pub objective: Objective,
    /// Objective value at the optimum (negated fidelity for `MeanFidelity`).
    pub score: f64,
}

const GRID: usize = 201;
const TOL: f64 = 1e-10;

/// Best machine of the given kind for the default ensemble grid at `z`,
/// minimizing mean distortion.
pub fn optimize_machine(kind: MachineKind, mode: EnsembleMode, z: f64) -> Result<Optimum> {
    optimize_with(kind, &EnsembleSpec::new(mode, z)?, Objective::MeanDistortion)
}

/// Searches `d ∈ [0, 1/√(2(M−1))]` for orthogonal machines, and `λ` with an
/// inner search over `|μ| ≤ 2√(λ(1−2(M−1)λ))` for non-orthogonal ones.
pub fn optimize_with(kind: MachineKind, spec: &EnsembleSpec, objective: Objective) -> Result<Optimum> {
    spec.validate()?;
    let dim = spec.mode.machine_dim();
    let p = spec.purity_summary();
    let score = |m: CloningMachine| objective.score(&m, &p);

    let machine = match kind {
        MachineKind::Orthogonal => {
            let hi = max_weight(dim).sqrt();
            let d = grid_then_golden(|d| score(CloningMachine::Orthogonal { dim, d }), 0.0, hi, GRID, TOL);
            CloningMachine::orthogonal(dim, d.clamp(0.0, hi))?
        }
        MachineKind::NonOrthogonal => {
            let best_mu = |lambda: f64| {
                let mu_max = schwartz_mu_max(lambda, dim);
                golden_section_min(|mu| score(CloningMachine::NonOrthogonal { dim, lambda, mu }), -mu_max, mu_max, TOL)
            };
            let inner = |lambda: f64| score(CloningMachine::NonOrthogonal { dim, lambda, mu: best_mu(lambda) });
            let lambda = grid_then_golden(inner, 0.0, max_weight(dim), GRID, TOL).clamp(0.0, max_weight(dim));
            CloningMachine::non_orthogonal(dim, lambda, best_mu(lambda))?
        }
    };
    Ok(Optimum { machine, distortion: distortion_at(&machine, p.mean), objective, score: score(machine) })
}
