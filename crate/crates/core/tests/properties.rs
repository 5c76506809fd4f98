mod common;

use common::AvoidedCrossing;
use dressed_core::labeling::{self, Levels, Provenance};
use dressed_core::observables::{self, DetectorConfig};
use dressed_core::{spectrum, SystemSpec};
use proptest::prelude::*;

fn small_spec(n_g: f64, charge_cutoff: usize, fock_cutoff: usize) -> SystemSpec {
    let mut spec = SystemSpec::new(0.05, 1.6, 0.025, n_g);
    spec.charge_cutoff = charge_cutoff;
    spec.fock_cutoff = fock_cutoff;
    spec
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn spectrum_is_even_in_offset_charge(n_g in -0.5f64..0.5, g in 0.0f64..0.05) {
        let mut a = small_spec(n_g, 3, 15);
        a.g = g;
        let mut b = a.clone();
        b.n_g = -n_g;
        let (ea, eb) = (spectrum::solve(&a).unwrap(), spectrum::solve(&b).unwrap());
        for (x, y) in ea.energies().iter().zip(eb.energies()) {
            prop_assert!((x - y).abs() < 1e-9, "{x} vs {y}");
        }
    }

    #[test]
    fn low_spectrum_is_periodic_in_offset_charge(n_g in -0.5f64..0.5) {
        let a = spectrum::solve(&small_spec(n_g, 10, 8)).unwrap();
        let b = spectrum::solve(&small_spec(n_g + 1.0, 10, 8)).unwrap();
        for (x, y) in a.energies().iter().zip(b.energies()).take(20) {
            prop_assert!((x - y).abs() < 1e-6, "{x} vs {y}");
        }
    }

    #[test]
    fn product_state_overlaps_sum_to_one(n_g in 0.0f64..0.5, level in 0usize..4, photons in 0usize..12) {
        let sol = spectrum::solve(&small_spec(n_g, 3, 12)).unwrap();
        let total: f64 = sol.product_state_overlaps(level, photons).unwrap().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }
}

proptest! {
    #[test]
    fn frequencies_telescope(steps in prop::collection::vec(0.9f64..1.1, 2..60), occ in prop::collection::vec(0.0f64..1.0, 61)) {
        let mut energies = vec![0.0];
        for s in &steps {
            energies.push(energies.last().unwrap() + s);
        }
        let occupancy = &occ[..energies.len()];
        let levels = Levels::new(&energies, occupancy);
        let ladder = labeling::label_continuity_levels(&levels, Provenance::Synthetic("random".into()), 0, &[0], 0.3, steps.len());
        let curve = observables::cavity_frequency_curve(&ladder).unwrap();
        let total: f64 = curve.values().iter().sum();
        let span = ladder.entries.last().unwrap().energy - ladder.entries[0].energy;
        prop_assert!((total - span).abs() < 1e-9);
    }

    #[test]
    fn detector_ignores_offsets(
        values in prop::collection::vec(-1e-3f64..1e-3, 10..120),
        shift in -0.5f64..0.5,
        start in 0usize..50,
    ) {
        let cfg = DetectorConfig::default();
        let base: Vec<(usize, f64)> = values.iter().enumerate().map(|(n, &v)| (n, 1.0 + v)).collect();
        let moved: Vec<(usize, f64)> = base.iter().map(|&(n, v)| (n + start, v + shift)).collect();
        let a = observables::detect_in_series(&base, &cfg);
        let b = observables::detect_in_series(&moved, &cfg);
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.kind, y.kind);
            prop_assert_eq!(x.n_location + start, y.n_location);
            prop_assert!((x.magnitude - y.magnitude).abs() < 1e-9);
        }
    }

    #[test]
    fn repulsion_bound_contains_the_gap(
        detuning in -0.02f64..0.02,
        coupling in 1e-4f64..0.02,
        kerr in 0.0f64..0.02,
        d1 in 0.002f64..0.06,
        d2 in 0.002f64..0.06,
    ) {
        let model = AvoidedCrossing::new(5, 12, detuning, coupling, kerr);
        let a = model.ladder(d1, 8);
        let b = model.ladder(d2, 8);
        let cmp = labeling::compare_ladders(&a, &b).unwrap();
        if let Some(bound) = cmp.bound {
            prop_assert_eq!(bound.divergence_n, model.n_star);
            prop_assert!(bound.contains(model.gap), "gap {} outside {:?}", model.gap, bound);
        }
    }
}

#[test]
fn narrow_and_wide_windows_split_at_the_crossing() {
    let model = AvoidedCrossing::new(5, 12, 0.01, 0.002, 0.012);
    let narrow = model.ladder(0.005, 8);
    let wide = model.ladder(0.03, 8);
    let bound = labeling::compare_ladders(&narrow, &wide).unwrap().bound.expect("windows should split");
    assert_eq!(bound.divergence_n, 5);
    assert!(bound.contains(model.gap));
}
