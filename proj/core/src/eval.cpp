#include "dkgqa/eval.hpp"

#include <json.hpp>

namespace dkgqa {

EvalReport evaluate(const ModelParams& params, const ShardedMatrices& kg,
                    const TripleStore& store, const TokenVocab& vocab,
                    const std::vector<QuestionSample>& samples) {
    EvalReport report;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& sample = samples[i];
        GradTape tape;
        const ForwardTrace trace = forward_sample(tape, params, nullptr, kg, vocab, sample);
        const Explanation ex = explain_trace(tape, trace, sample);

        SampleRecord rec;
        rec.index = i;
        rec.predicted = ex.predicted;
        rec.entity_count = sample.entities.size();
        for (auto a : sample.answers) rec.correct = rec.correct || a == ex.predicted;
        rec.chain = format_explanation(ex, store);

        report.overall.count += 1;
        report.overall.hits += rec.correct ? 1 : 0;
        BucketStats& bucket = rec.entity_count == 1 ? report.one_entity : report.multi_entity;
        bucket.count += 1;
        bucket.hits += rec.correct ? 1 : 0;
        report.samples.push_back(std::move(rec));
    }
    return report;
}

namespace {

nlohmann::json bucket_json(const BucketStats& b) {
    return {{"count", b.count}, {"hits", b.hits}, {"hits_at_1", b.hits_at_1()}};
}

}  // namespace

std::string report_to_json(const EvalReport& report, const TripleStore& store) {
    nlohmann::json j;
    j["overall"] = bucket_json(report.overall);
    j["buckets"] = {{"one_entity", bucket_json(report.one_entity)},
                    {"multi_entity", bucket_json(report.multi_entity)}};
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& rec : report.samples) {
        samples.push_back({{"index", rec.index},
                           {"predicted", store.entity_name(rec.predicted)},
                           {"correct", rec.correct},
                           {"entity_count", rec.entity_count},
                           {"chain", rec.chain}});
    }
    j["samples"] = std::move(samples);
    return j.dump(2) + "\n";
}

}  // namespace dkgqa
