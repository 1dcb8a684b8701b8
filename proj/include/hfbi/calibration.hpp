#pragma once

#include <cstdint>
#include <vector>

#include "hfbi/event_log.hpp"
#include "hfbi/exec.hpp"
#include "hfbi/model.hpp"
#include "hfbi/powerlaw.hpp"
#include "hfbi/rng.hpp"

namespace hfbi {

struct CalibrationOptions {
    double grid_step = 0.01;           // alpha grid spacing over [0, 1]
    int runs = 5;                      // simulations per grid point
    std::uint64_t seed = kDefaultSeed;
    InertiaKernel kernel = InertiaKernel::Reciprocal;
    Exec exec = Exec::Parallel;
};

struct AlphaCalibration {
    std::vector<double> grid;            // alpha values tried
    std::vector<double> mean_p;          // mean two-sample KS p per alpha
    std::vector<std::vector<double>> run_p;  // per-run p values, [grid][run]
    double best_alpha = 0.0;
    double best_mean_p = 0.0;
    int runs = 0;
    InertiaKernel kernel = InertiaKernel::Reciprocal;
    std::uint64_t seed = 0;
};

// Grid search for the habit weight: for each alpha, simulate `runs`
// frequency sequences at the log's derived (c, m, n) and score each against
// the observed frequencies with a two-sample KS test. Best alpha maximizes
// the mean p-value.
AlphaCalibration calibrate_alpha(const ActivityLog& log, const CalibrationOptions& opts = {});
AlphaCalibration calibrate_alpha(const FrequencySequence& observed, const HfbiParams& base,
                                 const CalibrationOptions& opts = {});

struct NodeFit {
    std::int64_t upto = 0;        // last activity id included
    std::int64_t users = 0;       // distinct users in the prefix
    PowerLawFit fit;
};

struct NodeFitOptions {
    std::int64_t population_threshold = 1000;  // first node: prefix reaching this many users
    std::int64_t stride = 1;                   // analyse every stride-th activity after that
    SelectXminOptions fit;
    Exec exec = Exec::Parallel;
};

// Sliding-prefix fits: one power-law fit per analysed growth stage of the
// log. Nodes where no x_min passes are skipped.
std::vector<NodeFit> per_node_fits(const ActivityLog& log, const NodeFitOptions& opts = {});

struct NodeCalibration {
    std::int64_t upto = 0;
    std::int64_t users = 0;
    double best_alpha = 0.0;
    double best_mean_p = 0.0;
};

// calibrate_alpha on each analysed prefix. Each node receives the same
// master seed so a node's result does not depend on which other nodes run.
std::vector<NodeCalibration> per_node_calibration(const ActivityLog& log,
                                                  const NodeFitOptions& nodes,
                                                  const CalibrationOptions& cal);

}  // namespace hfbi
