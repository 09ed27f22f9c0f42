use std::f64::consts::PI;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cloner::{distortion_single, fidelity, reduced_coefficients, CloningMachine};
use crate::error::{Error, Result};
use crate::numerics::{c64, C64};
use crate::states::PureState;

/// Which prior-information family a machine is tuned for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleMode {
    /// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩` with `θ ∈ [z, π − z]`.
    LocalQubit,
    /// `α|00⟩ + √(1−α²)|11⟩` with `α² ∈ [z, 1 − z]`.
    NonlocalTwoQubit,
}

impl EnsembleMode {
    pub fn machine_dim(self) -> usize {
        match self {
            EnsembleMode::LocalQubit => 2,
            EnsembleMode::NonlocalTwoQubit => 4,
        }
    }

    pub fn max_z(self) -> f64 {
        match self {
            EnsembleMode::LocalQubit => PI / 2.0,
            EnsembleMode::NonlocalTwoQubit => 0.5,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EnsembleMode::LocalQubit => "local",
            EnsembleMode::NonlocalTwoQubit => "nonlocal",
        }
    }
}

impl FromStr for EnsembleMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "local" => Ok(EnsembleMode::LocalQubit),
            "nonlocal" | "non-local" => Ok(EnsembleMode::NonlocalTwoQubit),
            _ => Err(format!("unknown mode `{s}` (expected local or nonlocal)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub mode: EnsembleMode,
    pub z: f64,
    pub theta_samples: usize,
    pub phi_samples: usize,
    pub alpha_samples: usize,
}

/// `z` may overshoot its bound by this much, so that `π/2` typed as a
/// decimal is accepted.
const Z_SLACK: f64 = 1e-12;

impl EnsembleSpec {
    pub fn new(mode: EnsembleMode, z: f64) -> Result<Self> {
        let spec = Self { mode, z, theta_samples: 61, phi_samples: 61, alpha_samples: 101 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let hi = self.mode.max_z();
        if !(self.z >= 0.0 && self.z <= hi + Z_SLACK) {
            return Err(Error::InvalidEnsemble(format!("z = {} outside [0, {hi}] for {} mode", self.z, self.mode.label())));
        }
        let counts = match self.mode {
            EnsembleMode::LocalQubit => [self.theta_samples, self.phi_samples],
            EnsembleMode::NonlocalTwoQubit => [self.alpha_samples, self.alpha_samples],
        };
        if counts.contains(&0) {
            return Err(Error::InvalidEnsemble("sample counts must be positive".into()));
        }
        Ok(())
    }

    fn z_clamped(&self) -> f64 {
        self.z.min(self.mode.max_z())
    }

    /// Grid states with normalized quadrature weights.
    ///
    /// The θ grid carries trapezoid weights times `sin θ`, so the local
    /// family is uniform over the band of the Bloch sphere; φ and α² are
    /// equally weighted.
    pub fn states(&self) -> Vec<(PureState, f64)> {
        let z = self.z_clamped();
        let mut out = Vec::new();
        match self.mode {
            EnsembleMode::LocalQubit => {
                let thetas = linspace(z, PI - z, self.theta_samples);
                let span = PI - 2.0 * z;
                let n = thetas.len();
                for (k, &th) in thetas.iter().enumerate() {
                    let end = if n > 1 && (k == 0 || k == n - 1) { 0.5 } else { 1.0 };
                    let w = if span > 1e-12 { end * th.sin() } else { 1.0 };
                    for j in 0..self.phi_samples {
                        let phi = 2.0 * PI * j as f64 / self.phi_samples as f64;
                        out.push((PureState::qubit(th, phi), w));
                    }
                }
            }
            EnsembleMode::NonlocalTwoQubit => {
                for a2 in linspace(z, 1.0 - z, self.alpha_samples) {
                    let o = C64::default();
                    let amps = vec![c64(a2.sqrt(), 0.0), o, o, c64((1.0 - a2).max(0.0).sqrt(), 0.0)];
                    out.push((PureState::normalized(amps).expect("unit vector"), 1.0));
                }
            }
        }
        let total: f64 = out.iter().map(|(_, w)| w).sum();
        for (_, w) in &mut out {
            *w /= total;
        }
        out
    }

    /// Statistics of `S = Σ|α_i|⁴` over the grid. Single-clone distortion
    /// and fidelity depend on the input only through `S`.
    pub fn purity_summary(&self) -> PuritySummary {
        let mut s = PuritySummary { mean: 0.0, min: f64::INFINITY, max: f64::NEG_INFINITY };
        for (psi, w) in self.states() {
            if w == 0.0 {
                continue;
            }
            let v: f64 = psi.amplitudes().iter().map(|a| a.norm_sqr().powi(2)).sum();
            s.mean += w * v;
            s.min = s.min.min(v);
            s.max = s.max.max(v);
        }
        s
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (a + b)];
    }
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PuritySummary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

fn check_dim(m: &CloningMachine, e: &EnsembleSpec) -> Result<()> {
    e.validate()?;
    if m.dim() != e.mode.machine_dim() {
        return Err(Error::InvalidEnsemble(format!(
            "{} ensemble needs a machine on dimension {}, got {}",
            e.mode.label(),
            e.mode.machine_dim(),
            m.dim()
        )));
    }
    Ok(())
}

/// Weighted mean of the single-clone distortion over the ensemble grid.
pub fn ensemble_distortion(m: &CloningMachine, e: &EnsembleSpec) -> Result<f64> {
    check_dim(m, e)?;
    e.states().iter().map(|(psi, w)| Ok(w * distortion_single(m, psi)?)).sum()
}

pub fn ensemble_worst_distortion(m: &CloningMachine, e: &EnsembleSpec) -> Result<f64> {
    check_dim(m, e)?;
    e.states()
        .iter()
        .filter(|(_, w)| *w > 0.0)
        .map(|(psi, _)| distortion_single(m, psi))
        .try_fold(0.0f64, |acc, d| Ok(acc.max(d?)))
}

pub fn ensemble_fidelity(m: &CloningMachine, e: &EnsembleSpec) -> Result<f64> {
    check_dim(m, e)?;
    e.states().iter().map(|(psi, w)| Ok(w * fidelity(m, psi)?)).sum()
}

/// Single-clone distortion of any input with `Σ|α_i|⁴ = s`.
pub fn distortion_at(m: &CloningMachine, s: f64) -> f64 {
    let (a, b, w) = reduced_coefficients(m);
    let n = m.dim() as f64;
    (a - 1.0).powi(2) * s + 2.0 * (a - 1.0) * w + n * w * w + (1.0 - b).powi(2) * (1.0 - s)
}

/// Fidelity of any input with `Σ|α_i|⁴ = s`.
pub fn fidelity_at(m: &CloningMachine, s: f64) -> f64 {
    let (a, b, w) = reduced_coefficients(m);
    a * s + w + b * (1.0 - s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{ClonerVariant, VariantName};
    use crate::cloner::{si_params, MachineKind};

    #[test]
    fn validation() {
        assert!(EnsembleSpec::new(EnsembleMode::LocalQubit, PI / 2.0).is_ok());
        assert!(EnsembleSpec::new(EnsembleMode::LocalQubit, 1.6).is_err());
        assert!(EnsembleSpec::new(EnsembleMode::NonlocalTwoQubit, 0.6).is_err());
        assert!(EnsembleSpec::new(EnsembleMode::NonlocalTwoQubit, -0.1).is_err());
        let m = si_params(MachineKind::Orthogonal, 4).unwrap();
        let e = EnsembleSpec::new(EnsembleMode::LocalQubit, 0.0).unwrap();
        assert!(matches!(ensemble_distortion(&m, &e), Err(Error::InvalidEnsemble(_))));
    }

    #[test]
    fn weights_are_normalized() {
        for (mode, z) in [(EnsembleMode::LocalQubit, 0.0), (EnsembleMode::LocalQubit, PI / 2.0), (EnsembleMode::NonlocalTwoQubit, 0.5)] {
            let e = EnsembleSpec::new(mode, z).unwrap();
            let total: f64 = e.states().iter().map(|(_, w)| w).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn state_independent_values() {
        let no = si_params(MachineKind::NonOrthogonal, 2).unwrap();
        for z in [0.0, 0.4, 1.2, PI / 2.0] {
            let e = EnsembleSpec::new(EnsembleMode::LocalQubit, z).unwrap();
            assert!((ensemble_distortion(&no, &e).unwrap() - 1.0 / 18.0).abs() < 1e-12);
        }
        let osinl = ClonerVariant::new(VariantName::Osinl).machine;
        for z in [0.0, 0.25, 0.5] {
            let e = EnsembleSpec::new(EnsembleMode::NonlocalTwoQubit, z).unwrap();
            assert!((ensemble_distortion(&osinl, &e).unwrap() - 0.12).abs() < 1e-12);
            assert!((ensemble_worst_distortion(&osinl, &e).unwrap() - 0.12).abs() < 1e-12);
        }
    }

    #[test]
    fn purity_reduction_matches_grid() {
        let machines = [
            CloningMachine::orthogonal(2, 0.3).unwrap(),
            CloningMachine::non_orthogonal(2, 0.2, -0.4).unwrap(),
            CloningMachine::orthogonal(4, 0.2).unwrap(),
            CloningMachine::non_orthogonal(4, 0.05, 0.3).unwrap(),
        ];
        for m in machines {
            let mode = if m.dim() == 2 { EnsembleMode::LocalQubit } else { EnsembleMode::NonlocalTwoQubit };
            let e = EnsembleSpec::new(mode, 0.3).unwrap();
            let s = e.purity_summary();
            assert!((distortion_at(&m, s.mean) - ensemble_distortion(&m, &e).unwrap()).abs() < 1e-12);
            assert!((fidelity_at(&m, s.mean) - ensemble_fidelity(&m, &e).unwrap()).abs() < 1e-12);
            let worst = distortion_at(&m, s.min).max(distortion_at(&m, s.max));
            assert!((worst - ensemble_worst_distortion(&m, &e).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn full_sphere_purity() {
        let s = EnsembleSpec::new(EnsembleMode::LocalQubit, 0.0).unwrap().purity_summary();
        assert!((s.mean - 2.0 / 3.0).abs() < 1e-3);
        let eq = EnsembleSpec::new(EnsembleMode::LocalQubit, PI / 2.0).unwrap().purity_summary();
        assert!((eq.mean - 0.5).abs() < 1e-12 && (eq.max - 0.5).abs() < 1e-12);
    }
}
