#include "dkgqa/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <stdexcept>

#include "dkgqa/eval.hpp"
#include "dkgqa/tape.hpp"

namespace dkgqa {

std::string format_metrics_line(std::size_t step, double loss, double dev_hits1) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "step=%zu loss=%.6f dev_hits1=%.6f", step, loss, dev_hits1);
    return buf;
}

namespace {

void zero_params(ModelParams& p) {
    for_each_tensor(p, [](const std::string&, Matrix& m) { m.zero(); });
}

}  // namespace

TrainResult train(const RunConfig& config, const TripleStore& store, const ShardedMatrices& kg,
                  const TokenVocab& vocab, const std::vector<QuestionSample>& train_set,
                  const std::vector<QuestionSample>& dev_set) {
    validate_run_config(config);
    if (train_set.empty()) throw std::invalid_argument("train: empty training set");

    ModelConfig mc;
    mc.variant = config.variant;
    mc.dim = config.dim;
    mc.max_hops = config.max_hops;
    mc.n_entities = kg.n_entities;
    mc.n_relations = kg.n_relations;
    mc.vocab_size = vocab.size();
    mc.eps = config.eps;

    ModelParams params = init_params(mc, config.seed);
    ModelParams grads = make_params(mc);
    AdamState adam = make_adam_state(mc);

    // Separate stream from parameter init so adding steps never changes the
    // initial weights.
    std::mt19937_64 order_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> perm(train_set.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t cursor = perm.size();  // forces a shuffle before the first draw

    const std::size_t samples_per_step = config.batch_size * config.grad_accum;
    const double seed_weight = 1.0 / static_cast<double>(samples_per_step);

    TrainResult result;
    result.best_params = params;
    result.best_dev_hits1 =
        dev_set.empty() ? 0.0
                        : evaluate(params, kg, store, vocab, dev_set).overall.hits_at_1();
    result.best_step = 0;

    for (std::size_t step = 1; step <= config.steps; ++step) {
        zero_params(grads);
        double loss_sum = 0.0;
        for (std::size_t i = 0; i < samples_per_step; ++i) {
            if (cursor == perm.size()) {
                std::shuffle(perm.begin(), perm.end(), order_rng);
                cursor = 0;
            }
            const QuestionSample& sample = train_set[perm[cursor++]];
            GradTape tape;
            const ForwardTrace trace = forward_sample(tape, params, &grads, kg, vocab, sample);
            const NodeId loss =
                tape.multilabel_loss(answer_targets(kg.n_entities, sample), trace.y);
            loss_sum += tape.value(loss)[0];
            tape.backward(loss, seed_weight);
        }
        const double mean_loss = loss_sum * seed_weight;
        if (!std::isfinite(mean_loss)) {
            throw std::runtime_error("train: non-finite loss at step " + std::to_string(step));
        }
        adam_step(params, grads, adam, config.learning_rate);
        result.step_losses.push_back(mean_loss);

        if (step % config.eval_interval == 0 || step == config.steps) {
            const double dev_hits1 =
                dev_set.empty() ? 0.0
                                : evaluate(params, kg, store, vocab, dev_set).overall.hits_at_1();
            result.log_lines.push_back(format_metrics_line(step, mean_loss, dev_hits1));
            // Without a dev set the final parameters win.
            const bool improved = dev_set.empty() ? step == config.steps
                                                  : dev_hits1 > result.best_dev_hits1;
            if (improved) {
                result.best_dev_hits1 = dev_hits1;
                result.best_step = step;
                result.best_params = params;
            }
        }
    }
    return result;
}

}  // namespace dkgqa
