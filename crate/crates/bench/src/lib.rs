//! Shared fixtures for the benchmark suite: deterministic, pre-validated
//! inputs so the benches measure solver work, not setup or I/O.

use bayeslab_core::families::ModelFamily;
use bayeslab_core::rdtheory::DiscreteRDProblem;
use bayeslab_core::rng::Streams;

/// Grid discretisation of the threshold family, the rate-distortion
/// solver's typical workload.
#[must_use]
pub fn interval_grid(grid: usize) -> DiscreteRDProblem {
    DiscreteRDProblem::from_threshold_family(&ModelFamily::Interval1D, grid)
        .expect("threshold grids are valid problems")
}

/// Fixed stream tree so every bench iteration does identical work.
#[must_use]
pub fn bench_streams() -> Streams {
    Streams::new(0xB_EEF)
}
