#include "dkgqa/config.hpp"

#include <stdexcept>

#include "dkgqa/model.hpp"

namespace dkgqa {

void validate_run_config(const RunConfig& config) {
    if (config.variant != kVariantBaseline && config.variant != kVariantIntersect) {
        throw std::invalid_argument("config: unknown variant '" + config.variant +
                                    "' (expected baseline or intersect)");
    }
    if (config.dim == 0) throw std::invalid_argument("config: dim must be positive");
    if (config.max_hops == 0) throw std::invalid_argument("config: max-hops must be positive");
    if (config.shards == 0) throw std::invalid_argument("config: shards must be positive");
    if (config.batch_size == 0) {
        throw std::invalid_argument("config: batch-size must be positive");
    }
    if (config.grad_accum == 0) {
        throw std::invalid_argument("config: grad-accum must be positive");
    }
    if (config.eval_interval == 0) {
        throw std::invalid_argument("config: eval-interval must be positive");
    }
    if (!(config.learning_rate > 0.0)) {
        throw std::invalid_argument("config: learning-rate must be positive");
    }
    if (!(config.eps > 0.0 && config.eps < 0.5)) {
        throw std::invalid_argument("config: eps must lie in (0, 0.5)");
    }
}

}  // namespace dkgqa
