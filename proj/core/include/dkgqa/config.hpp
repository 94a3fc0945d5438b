#pragma once
// Run configuration shared by the train/eval/explain commands. Flags mirror
// these fields in kebab-case; a flat key=value config file can set any of
// them, with command-line flags taking precedence.

#include <cstddef>
#include <cstdint>
#include <string>

namespace dkgqa {

struct RunConfig {
    // Paths.
    std::string kg;           // serialized knowledge-graph store
    std::string dataset;      // training or evaluation samples
    std::string dev;          // dev split for checkpoint selection
    std::string checkpoint;   // model checkpoint path
    std::string report;       // evaluation report output
    std::string metrics_log;  // training metrics log output

    // Model.
    std::string variant = "intersect";
    std::size_t dim = 32;
    std::size_t max_hops = 2;
    double eps = 1e-6;

    // Execution.
    std::size_t shards = 1;

    // Training.
    std::size_t batch_size = 4;
    std::size_t grad_accum = 32;
    std::size_t steps = 2000;
    double learning_rate = 1e-4;
    std::uint64_t seed = 1;
    std::size_t eval_interval = 100;

    // Explain.
    std::size_t index = 0;
};

// Throws std::invalid_argument on out-of-range values (zero sizes, bad
// variant, eps outside (0, 0.5)).
void validate_run_config(const RunConfig& config);

}  // namespace dkgqa
