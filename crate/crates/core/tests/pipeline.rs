use clonecast::channels::{apply_closed_form, apply_oracle, ClonerVariant, Pairing, VariantName};
use clonecast::cloner::{clone_joint, clone_reduced, realizable_mu_max, CloningMachine};
use clonecast::numerics::partial_trace;
use clonecast::random::{random_pure, random_two_qubit, seeded_rng};
use clonecast::scan::{scan_bds_with, ChannelPath};
use clonecast::separability::{broadcast_verdict, ppt_test};
use clonecast::states::{bloch_from_density, BellDiagonal};
use proptest::prelude::*;

fn machine(dim: usize, orthogonal: bool, t: f64, s: f64) -> CloningMachine {
    let hi = 1.0 / (2.0 * (dim as f64 - 1.0));
    if orthogonal {
        CloningMachine::orthogonal(dim, (t * hi).sqrt()).unwrap()
    } else {
        let l = t * hi;
        CloningMachine::non_orthogonal(dim, l, s * realizable_mu_max(l, dim)).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn clones_are_symmetric_and_physical(seed in any::<u64>(), t in 0.0..=1.0f64, s in -1.0..=1.0f64, o in any::<bool>(), four in any::<bool>()) {
        let dim = if four { 4 } else { 2 };
        let m = machine(dim, o, t, s);
        let psi = random_pure(&mut seeded_rng(seed), dim);
        let joint = clone_joint(&m, &psi).unwrap();
        let a = partial_trace(joint.matrix(), &[dim, dim], &[0]).unwrap();
        let b = partial_trace(joint.matrix(), &[dim, dim], &[1]).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-12);
        prop_assert!(a.max_abs_diff(clone_reduced(&m, &psi).unwrap().matrix()) < 1e-12);
        prop_assert!(joint.eigenvalues().iter().all(|&e| e > -1e-10));
    }

    #[test]
    fn channel_outputs_are_states(seed in any::<u64>(), v in 0usize..7) {
        let name = VariantName::ALL[v];
        let rho = random_two_qubit(&mut seeded_rng(seed));
        let out = apply_oracle(&ClonerVariant::new(name), &rho).unwrap();
        for m in out.matrices() {
            prop_assert!((m.trace().re - 1.0).abs() < 1e-10);
            prop_assert!(m.hermiticity_deviation() < 1e-10);
        }
    }

    #[test]
    fn pairing_only_relabels_local_outputs(c in prop::array::uniform3(-1.0..=1.0f64)) {
        let bds = BellDiagonal { c };
        prop_assume!(bds.is_valid());
        let v = ClonerVariant::new(VariantName::Osil);
        let rho = bds.density().unwrap();
        let d = apply_oracle(&v, &rho).unwrap();
        let h = apply_oracle(&v.with_pairing(Pairing::Horizontal), &rho).unwrap();
        prop_assert!(d.local.0.matrix().max_abs_diff(h.local.0.matrix()) < 1e-12);
        prop_assert!(d.local.1.matrix().max_abs_diff(h.local.1.matrix()) < 1e-12);
    }
}

#[test]
fn separable_input_never_broadcasts_under_local_cloning() {
    let mut rng = seeded_rng(11);
    let mut checked = 0;
    while checked < 200 {
        let rho = random_two_qubit(&mut rng);
        if ppt_test(&rho).unwrap().inseparable {
            continue;
        }
        checked += 1;
        for name in VariantName::ALL.into_iter().filter(|v| v.is_local()) {
            let v = broadcast_verdict(&apply_oracle(&ClonerVariant::new(name), &rho).unwrap()).unwrap();
            assert!(!v.nonlocal_inseparable(), "{name}");
        }
    }
}

#[test]
fn closed_form_matches_oracle_on_bds_for_si_variants() {
    let mut rng = seeded_rng(5);
    for name in [VariantName::Osil, VariantName::Nosil, VariantName::Osinl] {
        let v = ClonerVariant::new(name);
        for _ in 0..50 {
            let rho = random_two_qubit(&mut rng);
            let s = bloch_from_density(&rho).unwrap();
            let diag = BellDiagonal { c: [s.t[0][0], s.t[1][1], s.t[2][2]] };
            if !diag.is_valid() {
                continue;
            }
            let a = apply_closed_form(&v, &diag.bloch()).unwrap();
            let b = apply_oracle(&v, &diag.density().unwrap()).unwrap();
            for (x, y) in a.matrices().iter().zip(b.matrices()) {
                assert!(x.max_abs_diff(y) < 1e-10, "{name}");
            }
        }
    }
}

#[test]
fn scan_paths_agree_for_state_independent_variants() {
    for name in [VariantName::Osil, VariantName::Osinl] {
        let v = ClonerVariant::new(name);
        let a = scan_bds_with(&v, 0.2, ChannelPath::Certified).unwrap();
        let b = scan_bds_with(&v, 0.2, ChannelPath::Oracle).unwrap();
        let flips = a.iter().zip(&b).filter(|(x, y)| x.broadcast != y.broadcast).count();
        assert_eq!(flips, 0, "{name}");
    }
}
