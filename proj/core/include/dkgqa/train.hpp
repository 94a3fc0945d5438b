#pragma once
// Training loop: forward, loss, backward, gradient accumulation, Adam.
//
// One optimizer step consumes batch_size * grad_accum samples drawn from a
// reshuffled epoch permutation; each sample's backward pass is seeded with
// 1 / (batch_size * grad_accum) so the accumulated gradient is the gradient
// of the step's mean loss. The metrics log gets one line per eval interval:
//   step=<n> loss=<f> dev_hits1=<f>
// and the returned parameters are the best-dev-Hits@1 snapshot.

#include <cstddef>
#include <string>
#include <vector>

#include "dkgqa/config.hpp"
#include "dkgqa/dataset.hpp"
#include "dkgqa/model.hpp"
#include "dkgqa/reified.hpp"
#include "dkgqa/triple_store.hpp"

namespace dkgqa {

struct TrainResult {
    ModelParams best_params;           // highest dev Hits@1 snapshot
    double best_dev_hits1 = 0.0;
    std::size_t best_step = 0;
    std::vector<double> step_losses;   // mean loss per optimizer step
    std::vector<std::string> log_lines;
};

std::string format_metrics_line(std::size_t step, double loss, double dev_hits1);

// Throws std::runtime_error naming the step if the loss turns non-finite.
TrainResult train(const RunConfig& config, const TripleStore& store, const ShardedMatrices& kg,
                  const TokenVocab& vocab, const std::vector<QuestionSample>& train_set,
                  const std::vector<QuestionSample>& dev_set);

}  // namespace dkgqa
