#pragma once
// Hits@1 evaluation with an entity-count breakdown.
//
// A sample is a hit when the masked argmax of the prediction is one of its
// labeled answers. Buckets split samples into one-entity and multi-entity
// groups; unanswerable samples simply never hit.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dkgqa/dataset.hpp"
#include "dkgqa/explain.hpp"
#include "dkgqa/model.hpp"
#include "dkgqa/reified.hpp"
#include "dkgqa/triple_store.hpp"

namespace dkgqa {

struct BucketStats {
    std::size_t count = 0;
    std::size_t hits = 0;

    double hits_at_1() const {
        return count == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(count);
    }
};

struct SampleRecord {
    std::size_t index = 0;
    std::uint32_t predicted = 0;
    bool correct = false;
    std::size_t entity_count = 0;
    std::vector<std::string> chain;  // formatted explanation lines
};

struct EvalReport {
    BucketStats overall;
    BucketStats one_entity;
    BucketStats multi_entity;
    std::vector<SampleRecord> samples;
};

EvalReport evaluate(const ModelParams& params, const ShardedMatrices& kg,
                    const TripleStore& store, const TokenVocab& vocab,
                    const std::vector<QuestionSample>& samples);

// JSON rendering with deterministic key order.
std::string report_to_json(const EvalReport& report, const TripleStore& store);

}  // namespace dkgqa
