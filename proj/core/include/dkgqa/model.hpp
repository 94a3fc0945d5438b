#pragma once
// Model parameters, the one- and two-branch forward passes, and Adam.
//
// Architecture per branch, for hop t in 1..T_h (0-based storage index t-1):
//   h_q  = mean(embed(question tokens)) + mean(embed(mention tokens))
//   z_t  = concat(h_q, r_{t-1}, ..., r_1)          (newest relation first)
//   r_t  = softmax(w_dec[t-1] * z_t)
//   c_t  = w_att[t-1] * z_t                        (scalar score)
//   x_t  = follow(x_{t-1}, r_t)
//   a    = softmax([c_1 .. c_T])
//   y_b  = sum_t a_t * x_t
// The encoding is entity-specific: each branch encodes with its own entity's
// mention tokens. Two-branch inference takes the element-wise minimum of the
// branch outputs; the final prediction is clamped into (0, 1) before loss.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dkgqa/dataset.hpp"
#include "dkgqa/matrix.hpp"
#include "dkgqa/reified.hpp"
#include "dkgqa/tape.hpp"

namespace dkgqa {

inline constexpr const char* kVariantBaseline = "baseline";
inline constexpr const char* kVariantIntersect = "intersect";

struct ModelConfig {
    std::string variant = kVariantIntersect;
    std::size_t dim = 32;       // d
    std::size_t max_hops = 2;   // T_h
    std::size_t n_entities = 0; // N_E
    std::size_t n_relations = 0;// N_R
    std::size_t vocab_size = 0; // |V|
    double eps = 1e-6;          // clamp margin
};

void validate_config(const ModelConfig& config);

struct ModelParams {
    ModelConfig config;
    Matrix token_embeddings;      // |V| x d
    std::vector<Matrix> w_dec;    // w_dec[t]: N_R x (d + t*N_R)
    std::vector<Matrix> w_att;    // w_att[t]: 1  x (d + t*N_R)
};

// Zero-filled parameters with shapes derived from config.
ModelParams make_params(const ModelConfig& config);

// Uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per tensor, fan_in = cols.
ModelParams init_params(const ModelConfig& config, std::uint64_t seed);

// Visits tensors in declaration order: token_embeddings, w_dec[0..], w_att[0..].
// The order fixes checkpoint layout, optimizer traversal, and flat indexing.
void for_each_tensor(ModelParams& p,
                     const std::function<void(const std::string&, Matrix&)>& fn);
void for_each_tensor(const ModelParams& p,
                     const std::function<void(const std::string&, const Matrix&)>& fn);

struct AdamState {
    std::size_t step = 0;
    ModelParams m;  // first moments
    ModelParams v;  // second moments
};

AdamState make_adam_state(const ModelConfig& config);

// Bias-corrected Adam update. Throws std::invalid_argument naming the tensor
// if any gradient entry is non-finite.
void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, double lr,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

// Per-branch tape nodes kept for inspection: explanation output, attention,
// and the pre-aggregation hop states.
struct BranchTrace {
    std::uint32_t entity = 0;
    NodeId h_q = 0;
    std::vector<NodeId> relations;   // r_1..r_T
    std::vector<NodeId> hop_states;  // x_1..x_T
    NodeId attention = 0;            // a, length T_h
    NodeId y_branch = 0;             // pre-intersection, pre-clamp
};

struct ForwardTrace {
    std::vector<BranchTrace> branches;  // one or two
    NodeId y_pre_clamp = 0;
    NodeId y = 0;                       // clamped prediction
};

// Runs the variant named in params.config on a sample. Baseline uses the
// first entity; intersect uses the first two and falls back to the baseline
// path on one-entity samples. grads may be null for inference.
ForwardTrace forward_sample(GradTape& tape, const ModelParams& params, ModelParams* grads,
                            const ShardedMatrices& kg, const TokenVocab& vocab,
                            const QuestionSample& sample);

// Single branch from a given start entity and mention; used by forward_sample
// and directly by tests.
BranchTrace forward_branch(GradTape& tape, const ModelParams& params, ModelParams* grads,
                           const ShardedMatrices& kg, const TokenVocab& vocab,
                           std::uint32_t entity,
                           const std::vector<std::string>& question_tokens,
                           const std::vector<std::string>& mention_tokens);

// Plain (tape-free) views of the individual stages; each runs a scratch tape
// over the same builders as forward_sample so the paths cannot drift.
std::vector<double> encode_question(const ModelParams& params, const TokenVocab& vocab,
                                    const std::vector<std::string>& question_tokens,
                                    const std::vector<std::string>& mention_tokens);
std::vector<double> decode_relation(const ModelParams& params, const std::vector<double>& h_q,
                                    const std::vector<std::vector<double>>& prev);
// relations must hold exactly T_h entries; returns the attention weights a.
std::vector<double> hop_attention(const ModelParams& params, const std::vector<double>& h_q,
                                  const std::vector<std::vector<double>>& relations);

// Checkpoint format `DKM1`: magic, version, variant, sizes, eps, token
// vocabulary, then little-endian f64 tensors in declaration order.
void save_checkpoint(const ModelParams& params, const TokenVocab& vocab, std::ostream& out);
void save_checkpoint_file(const ModelParams& params, const TokenVocab& vocab,
                          const std::string& path);
std::pair<ModelParams, TokenVocab> load_checkpoint(std::istream& in);
std::pair<ModelParams, TokenVocab> load_checkpoint_file(const std::string& path);

}  // namespace dkgqa
