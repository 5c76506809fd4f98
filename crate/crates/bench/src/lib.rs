//! Benchmark fixtures. Run with `cargo bench -p dressed-bench`.

use dressed_core::SystemSpec;

/// Reduced-cutoff version of the standard transmon-cavity parameters.
pub fn bench_spec(charge_cutoff: usize, fock_cutoff: usize) -> SystemSpec {
    let mut spec = SystemSpec::new(0.05, 1.6, 0.025, 0.1);
    spec.charge_cutoff = charge_cutoff;
    spec.fock_cutoff = fock_cutoff;
    spec
}
