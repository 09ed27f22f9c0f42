//! Bell-diagonal grid classification and machine optimization over
//! restricted input ensembles.

mod ensemble;
mod optimize;

pub use ensemble::{
    distortion_at, ensemble_distortion, ensemble_fidelity, ensemble_worst_distortion, fidelity_at,
    EnsembleMode, EnsembleSpec, PuritySummary,
};
pub use optimize::{optimize_machine, optimize_with, Objective, Optimum};

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{apply_closed_form, ClonerVariant, OracleChannel, Pairing, VariantName};
use crate::error::{Error, Result};
use crate::separability::broadcast_verdict;
use crate::states::BellDiagonal;

pub const DEFAULT_STEP: f64 = 0.05;

/// Verdict for one grid point. The PT minima are absent for points outside
/// the Bell-diagonal tetrahedron.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRecord {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub variant: VariantName,
    pub valid_bds: bool,
    pub local_separable: bool,
    pub nonlocal_inseparable: bool,
    pub broadcast: bool,
    pub min_pt_local: Option<f64>,
    pub min_pt_nonlocal: Option<f64>,
}

impl ScanRecord {
    pub fn coords(&self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }

    pub fn validate(&self) -> Result<()> {
        if self.broadcast && !(self.valid_bds && self.local_separable && self.nonlocal_inseparable) {
            return Err(Error::InvalidGrid(format!("record at {:?} claims broadcast without its components", self.coords())));
        }
        if self.valid_bds != self.min_pt_local.is_some() || self.valid_bds != self.min_pt_nonlocal.is_some() {
            return Err(Error::InvalidGrid(format!("record at {:?} has inconsistent PT minima", self.coords())));
        }
        Ok(())
    }
}

/// How a scan evaluates the channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChannelPath {
    /// Printed formulas for state-independent variants on their default
    /// pairing, the oracle everywhere else.
    Certified,
    Oracle,
    ClosedForm,
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

/// `{−1, −1+step, …}` up to 1, rounded to 12 decimals.
pub fn bds_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::InvalidGrid(format!("step {step} outside (0, 0.5]")));
    }
    let n = (2.0 / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| round12(-1.0 + i as f64 * step)).collect())
}

pub fn scan_bds(variant: &ClonerVariant, step: f64) -> Result<Vec<ScanRecord>> {
    scan_bds_with(variant, step, ChannelPath::Certified)
}

pub fn scan_bds_with(variant: &ClonerVariant, step: f64, path: ChannelPath) -> Result<Vec<ScanRecord>> {
    let grid = bds_grid(step)?;
    let use_closed = match path {
        ChannelPath::ClosedForm => true,
        ChannelPath::Oracle => false,
        ChannelPath::Certified => {
            variant.name.is_state_independent() && variant.pairing == Pairing::default_for(variant.name)
        }
    };
    let oracle = if use_closed { None } else { Some(OracleChannel::new(*variant)?) };
    let g = &grid;
    let points: Vec<[f64; 3]> = g
        .iter()
        .flat_map(|&a| g.iter().flat_map(move |&b| g.iter().map(move |&c| [a, b, c])))
        .collect();

    points
        .par_iter()
        .map(|&[c1, c2, c3]| {
            let bds = BellDiagonal { c: [c1, c2, c3] };
            let mut rec = ScanRecord {
                c1,
                c2,
                c3,
                variant: variant.name,
                valid_bds: bds.is_valid(),
                local_separable: false,
                nonlocal_inseparable: false,
                broadcast: false,
                min_pt_local: None,
                min_pt_nonlocal: None,
            };
            if !rec.valid_bds {
                return Ok(rec);
            }
            let outputs = match &oracle {
                Some(o) => o.apply(&bds.density()?)?,
                None => apply_closed_form(variant, &bds.bloch())?,
            };
            let v = broadcast_verdict(&outputs)?;
            rec.local_separable = v.local_separable();
            rec.nonlocal_inseparable = v.nonlocal_inseparable();
            rec.broadcast = v.broadcast();
            rec.min_pt_local = Some(v.min_pt_local());
            rec.min_pt_nonlocal = Some(v.min_pt_nonlocal());
            Ok(rec)
        })
        .collect()
}

/// Broadcastable points over valid Bell-diagonal points.
pub fn region_fraction(records: &[ScanRecord]) -> f64 {
    let valid = records.iter().filter(|r| r.valid_bds).count();
    if valid == 0 {
        return 0.0;
    }
    records.iter().filter(|r| r.broadcast).count() as f64 / valid as f64
}

fn check_same_grid(a: &[ScanRecord], b: &[ScanRecord]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!("{} vs {} records", a.len(), b.len())));
    }
    if let Some((ra, rb)) = a.iter().zip(b).find(|(ra, rb)| ra.coords() != rb.coords()) {
        return Err(Error::GridMismatch(format!("{:?} vs {:?}", ra.coords(), rb.coords())));
    }
    Ok(())
}

/// Points broadcastable in `b` but not in `a`.
pub fn region_difference(a: &[ScanRecord], b: &[ScanRecord]) -> Result<Vec<[f64; 3]>> {
    check_same_grid(a, b)?;
    Ok(a.iter().zip(b).filter(|(ra, rb)| rb.broadcast && !ra.broadcast).map(|(_, rb)| rb.coords()).collect())
}

/// Every broadcastable point of `b` is broadcastable in `a`.
pub fn region_contains(a: &[ScanRecord], b: &[ScanRecord]) -> Result<bool> {
    Ok(region_difference(a, b)?.is_empty())
}

/// Minimizer of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while (b - a).abs() > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (a + b);
    [lo, hi, mid].into_iter().min_by(|&p, &q| f(p).total_cmp(&f(q))).unwrap()
}

/// Grid search followed by golden refinement inside the best bracket.
pub(crate) fn grid_then_golden(f: impl Fn(f64) -> f64, lo: f64, hi: f64, samples: usize, tol: f64) -> f64 {
    if hi <= lo {
        return lo;
    }
    let h = (hi - lo) / (samples - 1) as f64;
    let best = (0..samples)
        .min_by(|&i, &j| f(lo + i as f64 * h).total_cmp(&f(lo + j as f64 * h)))
        .unwrap();
    let a = (lo + (best as f64 - 1.0) * h).max(lo);
    let b = (lo + (best as f64 + 1.0) * h).min(hi);
    golden_section_min(&f, a, b, tol)
}
