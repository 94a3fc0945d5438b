#pragma once
// Inference-chain extraction and formatting.
//
// The chain for a branch is the argmax relation per hop with its probability,
// truncated to the hop count the attention picked (hop k wins when a_k is the
// first maximum). Output lines look like
//   NataliePortman → played [0.97]
//   StarWarsII → character [0.95]
//   Intersection → Padme
// for two-branch runs; a single-branch run prints one chain line ending in
// `→ answer` and no Intersection line.

#include <cstdint>
#include <string>
#include <vector>

#include "dkgqa/dataset.hpp"
#include "dkgqa/model.hpp"
#include "dkgqa/reified.hpp"
#include "dkgqa/triple_store.hpp"

namespace dkgqa {

struct ChainStep {
    std::uint32_t relation = 0;
    double prob = 0.0;  // probability of the argmax relation at this hop
};

struct BranchChain {
    std::uint32_t entity = 0;
    std::vector<ChainStep> steps;  // length = attention-selected hop count
};

struct Explanation {
    std::vector<BranchChain> branches;
    std::uint32_t predicted = 0;  // argmax entity after question-entity masking
};

// Lowest index wins ties; this is the shared argmax rule for answers,
// relations, and attention.
std::size_t argmax_lowest(const std::vector<double>& v);

// Masked prediction: question-entity coordinates are zeroed before argmax.
std::uint32_t predict_entity(const std::vector<double>& y, const QuestionSample& sample);

Explanation explain_sample(const ModelParams& params, const ShardedMatrices& kg,
                           const TokenVocab& vocab, const QuestionSample& sample);

// Extracts the chain from an existing trace (shares the forward pass with
// evaluation).
Explanation explain_trace(const GradTape& tape, const ForwardTrace& trace,
                          const QuestionSample& sample);

std::vector<std::string> format_explanation(const Explanation& ex, const TripleStore& store);

}  // namespace dkgqa
