//! The seven named broadcast channels.
//!
//! Local variants clone each party's qubit with its own `M = 2` machine;
//! non-local variants clone the pair with one `M = 4` machine. Qubits are
//! labelled as in the broadcasting setup: inputs 1 (Alice) and 2 (Bob),
//! Alice ends with 1 and 3, Bob with 2 and 4. Every two-qubit output is
//! ordered Alice first.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cloner::{build_isometry, realizable_mu_max, si_params, CloningMachine, Isometry, MachineKind};
use crate::error::{Error, Result};
use crate::numerics::{partial_trace, tensor, ComplexMatrix};
use crate::states::{bloch_of_matrix, density_from_bloch, DensityMatrix, TwoQubitBloch};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum VariantName {
    Osil,
    Nosil,
    Osdl,
    Nosdl,
    Osinl,
    Osdnl,
    Nosdnl,
}

impl VariantName {
    pub const ALL: [VariantName; 7] = [
        VariantName::Osil,
        VariantName::Nosil,
        VariantName::Osdl,
        VariantName::Nosdl,
        VariantName::Osinl,
        VariantName::Osdnl,
        VariantName::Nosdnl,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            VariantName::Osil => "OSIL",
            VariantName::Nosil => "NOSIL",
            VariantName::Osdl => "OSDL",
            VariantName::Nosdl => "NOSDL",
            VariantName::Osinl => "OSINL",
            VariantName::Osdnl => "OSDNL",
            VariantName::Nosdnl => "NOSDNL",
        }
    }

    pub fn is_local(self) -> bool {
        matches!(self, VariantName::Osil | VariantName::Nosil | VariantName::Osdl | VariantName::Nosdl)
    }

    pub fn is_state_independent(self) -> bool {
        matches!(self, VariantName::Osil | VariantName::Nosil | VariantName::Osinl)
    }

    pub fn kind(self) -> MachineKind {
        match self {
            VariantName::Nosil | VariantName::Nosdl | VariantName::Nosdnl => MachineKind::NonOrthogonal,
            _ => MachineKind::Orthogonal,
        }
    }

    /// Dimension of the system each machine copies.
    pub fn machine_dim(self) -> usize {
        if self.is_local() {
            2
        } else {
            4
        }
    }

    pub fn default_machine(self) -> CloningMachine {
        let built = match self {
            VariantName::Osil | VariantName::Nosil | VariantName::Osinl => si_params(self.kind(), self.machine_dim()),
            VariantName::Osdl => CloningMachine::orthogonal(2, (10.0f64 / 55.0).sqrt()),
            VariantName::Nosdl => CloningMachine::non_orthogonal(2, 0.25, 0.7),
            VariantName::Osdnl => CloningMachine::orthogonal(4, (1.0f64 / 15.0).sqrt()),
            VariantName::Nosdnl => {
                let lambda = 1.0 / 12.0;
                CloningMachine::non_orthogonal(4, lambda, realizable_mu_max(lambda, 4))
            }
        };
        built.expect("default parameters are valid")
    }
}

impl fmt::Display for VariantName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VariantName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        VariantName::ALL
            .into_iter()
            .find(|v| v.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown variant `{s}` (expected one of OSIL, NOSIL, OSDL, NOSDL, OSINL, OSDNL, NOSDNL)"))
    }
}

/// Which cross pairs count as the non-local outputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    /// `(ρ₁₄, ρ₂₃)`.
    Diagonal,
    /// `(ρ₁₂, ρ₃₄)`.
    Horizontal,
}

impl Pairing {
    pub fn default_for(name: VariantName) -> Self {
        if name.is_local() {
            Pairing::Diagonal
        } else {
            Pairing::Horizontal
        }
    }

    pub fn labels(self) -> [&'static str; 2] {
        match self {
            Pairing::Diagonal => ["rho14", "rho23"],
            Pairing::Horizontal => ["rho12", "rho34"],
        }
    }
}

impl FromStr for Pairing {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "diagonal" => Ok(Pairing::Diagonal),
            "horizontal" => Ok(Pairing::Horizontal),
            _ => Err(format!("unknown pairing `{s}` (expected diagonal or horizontal)")),
        }
    }
}

const LOCAL_LABELS: [&str; 2] = ["rho13", "rho24"];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClonerVariant {
    pub name: VariantName,
    pub machine: CloningMachine,
    pub pairing: Pairing,
}

impl ClonerVariant {
    pub fn new(name: VariantName) -> Self {
        Self { name, machine: name.default_machine(), pairing: Pairing::default_for(name) }
    }

    /// A variant with overridden machine parameters. State-independent
    /// variants only accept their own universal machine.
    pub fn with_machine(name: VariantName, machine: CloningMachine) -> Result<Self> {
        if machine.dim() != name.machine_dim() || machine.kind() != name.kind() {
            return Err(Error::InvalidMachine(format!(
                "{name} needs a {} machine on dimension {}, got {machine:?}",
                name.kind().label(),
                name.machine_dim()
            )));
        }
        if name.is_state_independent() {
            let si = name.default_machine();
            let same = match (si, machine) {
                (CloningMachine::Orthogonal { d: a, .. }, CloningMachine::Orthogonal { d: b, .. }) => (a - b).abs() < 1e-12,
                (
                    CloningMachine::NonOrthogonal { lambda: l1, mu: m1, .. },
                    CloningMachine::NonOrthogonal { lambda: l2, mu: m2, .. },
                ) => (l1 - l2).abs() < 1e-12 && (m1 - m2).abs() < 1e-12,
                _ => false,
            };
            if !same {
                return Err(Error::InvalidMachine(format!("{name} is fixed to its state-independent machine {si:?}")));
            }
        }
        Ok(Self { name, machine, pairing: Pairing::default_for(name) })
    }

    pub fn with_pairing(mut self, pairing: Pairing) -> Self {
        self.pairing = pairing;
        self
    }

    pub fn oracle(&self) -> Result<OracleChannel> {
        OracleChannel::new(*self)
    }
}

/// Local pairs `(ρ₁₃, ρ₂₄)` and the two non-local pairs selected by `pairing`.
#[derive(Clone, Debug, PartialEq)]
pub struct BroadcastOutputs {
    pub local: (DensityMatrix, DensityMatrix),
    pub nonlocal: (DensityMatrix, DensityMatrix),
    pub pairing: Pairing,
}

impl BroadcastOutputs {
    pub fn matrices(&self) -> [&ComplexMatrix; 4] {
        [self.local.0.matrix(), self.local.1.matrix(), self.nonlocal.0.matrix(), self.nonlocal.1.matrix()]
    }

    pub fn labels(&self) -> [&'static str; 4] {
        let [a, b] = self.pairing.labels();
        [LOCAL_LABELS[0], LOCAL_LABELS[1], a, b]
    }
}

fn scale(v: [f64; 3], s: [f64; 3]) -> [f64; 3] {
    [v[0] * s[0], v[1] * s[1], v[2] * s[2]]
}

fn scale_t(t: [[f64; 3]; 3], f: impl Fn(usize, usize) -> f64) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for u in 0..3 {
        for v in 0..3 {
            out[u][v] = f(u, v) * t[u][v];
        }
    }
    out
}

fn diag3(d: [f64; 3]) -> [[f64; 3]; 3] {
    TwoQubitBloch::diagonal(d).t
}

/// Bloch triples of `[ρ₁₃, ρ₂₄, A, B]` from the printed channel formulas,
/// with `(A, B)` the variant's default pair. No physicality check.
pub fn closed_form_bloch(v: &ClonerVariant, s: &TwoQubitBloch) -> Result<[TwoQubitBloch; 4]> {
    if v.pairing != Pairing::default_for(v.name) {
        return Err(Error::NoClosedForm { variant: v.name.to_string(), pairing: format!("{:?}", v.pairing) });
    }
    let b = TwoQubitBloch::unchecked;
    let (x, y, t) = (s.x, s.y, s.t);
    let out = match (v.name.is_local(), v.machine) {
        (true, CloningMachine::NonOrthogonal { lambda, mu, .. }) => {
            let tl = diag3([2.0 * lambda, 2.0 * lambda, 1.0 - 4.0 * lambda]);
            let m = [mu; 3];
            let cross = b(scale(x, m), scale(y, m), scale_t(t, |_, _| mu * mu));
            [b(scale(x, m), scale(x, m), tl), b(scale(y, m), scale(y, m), tl), cross, cross]
        }
        (true, CloningMachine::Orthogonal { d, .. }) => {
            let (c, _) = v.machine.orthogonal_coefficients().unwrap();
            let chi = [2.0 * c * d, 2.0 * c * d, 1.0 - 4.0 * d * d];
            let tl = diag3([2.0 * d * d, 2.0 * d * d, 1.0 - 4.0 * d * d]);
            let tnl = scale_t(t, |u, w| match (u == 2, w == 2) {
                (false, false) => 4.0 * c * c * d * d,
                (true, true) => c.powi(4),
                _ => 2.0 * c.powf(1.5) * d,
            });
            let cross = b(scale(x, chi), scale(y, chi), tnl);
            [b(scale(x, chi), scale(x, chi), tl), b(scale(y, chi), scale(y, chi), tl), cross, cross]
        }
        (false, CloningMachine::NonOrthogonal { lambda, mu, .. }) => {
            let tl = diag3([2.0 * lambda, 2.0 * lambda, 1.0 - 8.0 * lambda]);
            let m = [mu; 3];
            let pair = b(scale(x, m), scale(y, m), scale_t(t, |_, _| mu));
            [b(scale(x, m), scale(x, m), tl), b(scale(y, m), scale(y, m), tl), pair, pair]
        }
        (false, CloningMachine::Orthogonal { d, .. }) => {
            let (c, _) = v.machine.orthogonal_coefficients().unwrap();
            let k = 2.0 * d * (c + d);
            let z = 1.0 - 4.0 * d * d;
            let chi = [k, k, z];
            let tl = diag3([2.0 * d * d, 2.0 * d * d, 1.0 - 8.0 * d * d]);
            let pair = b(scale(x, chi), scale(y, chi), scale_t(t, |u, w| if u == 2 && w == 2 { z } else { k }));
            [b(scale(x, chi), scale(x, chi), tl), b(scale(y, chi), scale(y, chi), tl), pair, pair]
        }
    };
    Ok(out)
}

/// The printed channel formulas as density matrices.
pub fn apply_closed_form(v: &ClonerVariant, s: &TwoQubitBloch) -> Result<BroadcastOutputs> {
    let blochs = closed_form_bloch(v, s)?;
    let [na, nb] = v.pairing.labels();
    let labels = [LOCAL_LABELS[0], LOCAL_LABELS[1], na, nb];
    let mut mats = Vec::with_capacity(4);
    for (bloch, label) in blochs.iter().zip(labels) {
        let m = density_from_bloch(bloch).map_err(|e| Error::ClosedFormInconsistency {
            variant: v.name.to_string(),
            output: label,
            reason: e.to_string(),
            matrix: Box::new(bloch.to_matrix()),
        })?;
        mats.push(m);
    }
    let mut it = mats.into_iter();
    let mut next = || it.next().unwrap();
    Ok(BroadcastOutputs { local: (next(), next()), nonlocal: (next(), next()), pairing: v.pairing })
}

fn swap_qubits(rho: &ComplexMatrix) -> ComplexMatrix {
    let perm = |i: usize| ((i & 1) << 1) | (i >> 1);
    ComplexMatrix::from_fn(4, 4, |i, j| rho[(perm(i), perm(j))])
}

/// A variant with its isometry built once, for repeated application.
#[derive(Clone, Debug)]
pub struct OracleChannel {
    pub variant: ClonerVariant,
    map: ComplexMatrix,
    dims: Vec<usize>,
}

impl OracleChannel {
    pub fn new(variant: ClonerVariant) -> Result<Self> {
        let iso: Isometry = build_isometry(&variant.machine)?;
        let r = iso.ancilla;
        let (map, dims) = if variant.name.is_local() {
            (tensor(&iso.map, &iso.map), vec![2, 2, r, 2, 2, r])
        } else {
            (iso.map, vec![2, 2, 2, 2, r])
        };
        Ok(Self { variant, map, dims })
    }

    /// `[ρ₁₃, ρ₂₄, A, B]` as raw matrices.
    pub fn apply_raw(&self, rho12: &ComplexMatrix) -> Result<[ComplexMatrix; 4]> {
        if !rho12.is_square() || rho12.dim() != 4 {
            return Err(Error::Dimension(format!("two-qubit input expected, got {}x{}", rho12.rows(), rho12.cols())));
        }
        let out = &(&self.map * rho12) * &self.map.adjoint();
        let keep = |k: &[usize]| partial_trace(&out, &self.dims, k);
        // local:     a1 b1 m1 a2 b2 m2 = qubits 1 3 · 2 4 ·
        // non-local: q1 q2 q3 q4 m
        Ok(if self.variant.name.is_local() {
            let (a, b) = match self.variant.pairing {
                Pairing::Diagonal => (keep(&[0, 4])?, keep(&[1, 3])?),
                Pairing::Horizontal => (keep(&[0, 3])?, keep(&[1, 4])?),
            };
            [keep(&[0, 1])?, keep(&[3, 4])?, a, b]
        } else {
            let (a, b) = match self.variant.pairing {
                Pairing::Diagonal => (keep(&[0, 3])?, swap_qubits(&keep(&[1, 2])?)),
                Pairing::Horizontal => (keep(&[0, 1])?, keep(&[2, 3])?),
            };
            [keep(&[0, 2])?, keep(&[1, 3])?, a, b]
        })
    }

    pub fn apply(&self, rho12: &DensityMatrix) -> Result<BroadcastOutputs> {
        let [l1, l2, n1, n2] = self.apply_raw(rho12.matrix())?;
        let wrap = |m: ComplexMatrix| DensityMatrix::two_qubit(m.hermitian_part());
        Ok(BroadcastOutputs {
            local: (wrap(l1)?, wrap(l2)?),
            nonlocal: (wrap(n1)?, wrap(n2)?),
            pairing: self.variant.pairing,
        })
    }
}

/// Full isometric pipeline on a two-qubit input.
pub fn apply_oracle(v: &ClonerVariant, rho12: &DensityMatrix) -> Result<BroadcastOutputs> {
    v.oracle()?.apply(rho12)
}

/// Entrywise deviation between the printed formulas and the oracle for the
/// four outputs `[ρ₁₃, ρ₂₄, A, B]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub variant: VariantName,
    pub input: TwoQubitBloch,
    pub deviations: [f64; 4],
}

impl DiscrepancyReport {
    pub fn max(&self) -> f64 {
        self.deviations.iter().copied().fold(0.0, f64::max)
    }

    pub fn nonlocal_max(&self) -> f64 {
        self.deviations[2].max(self.deviations[3])
    }

    /// `variant<TAB>x1,x2,x3;y1,y2,y3;t11,…,t33<TAB>max deviation`.
    pub fn log_line(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|e| format!("{e:.12e}")).collect::<Vec<_>>().join(",");
        let t: Vec<f64> = self.input.t.iter().flatten().copied().collect();
        format!(
            "{}\t{};{};{}\t{:.6e}",
            self.variant,
            join(&self.input.x),
            join(&self.input.y),
            join(&t),
            self.max()
        )
    }
}

pub fn reconcile_with(oracle: &OracleChannel, s: &TwoQubitBloch) -> Result<DiscrepancyReport> {
    let rho = density_from_bloch(s)?;
    let printed = closed_form_bloch(&oracle.variant, s)?;
    let exact = oracle.apply_raw(rho.matrix())?;
    let mut deviations = [0.0; 4];
    for k in 0..4 {
        deviations[k] = printed[k].to_matrix().max_abs_diff(&exact[k]);
    }
    Ok(DiscrepancyReport { variant: oracle.variant.name, input: *s, deviations })
}

pub fn reconcile(v: &ClonerVariant, s: &TwoQubitBloch) -> Result<DiscrepancyReport> {
    reconcile_with(&v.oracle()?, s)
}

pub fn write_discrepancy_log<W: Write>(mut w: W, reports: &[DiscrepancyReport]) -> io::Result<()> {
    for r in reports {
        writeln!(w, "{}", r.log_line())?;
    }
    w.flush()
}

/// Bloch coordinates of each oracle output.
pub fn oracle_bloch(oracle: &OracleChannel, s: &TwoQubitBloch) -> Result<[TwoQubitBloch; 4]> {
    let exact = oracle.apply_raw(density_from_bloch(s)?.matrix())?;
    let mut out = [TwoQubitBloch::zero(); 4];
    for k in 0..4 {
        out[k] = bloch_of_matrix(&exact[k])?;
    }
    Ok(out)
}
