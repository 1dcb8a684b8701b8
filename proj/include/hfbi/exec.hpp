#pragma once

namespace hfbi {

// Execution policy for the data-parallel kernels (bootstrap replicates,
// calibration grids, per-node sweeps, evidence tallies). Every kernel
// derives one RNG seed per task, so Serial and Parallel produce identical
// results; Serial is the reference implementation kept for testing.
enum class Exec { Serial, Parallel };

}  // namespace hfbi
