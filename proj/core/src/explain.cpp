#include "dkgqa/explain.hpp"

#include <cstdio>
#include <stdexcept>

namespace dkgqa {

std::size_t argmax_lowest(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("argmax over empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

std::uint32_t predict_entity(const std::vector<double>& y, const QuestionSample& sample) {
    std::vector<double> masked = y;
    for (const auto& e : sample.entities) {
        if (e.id < masked.size()) masked[e.id] = 0.0;
    }
    return static_cast<std::uint32_t>(argmax_lowest(masked));
}

Explanation explain_trace(const GradTape& tape, const ForwardTrace& trace,
                          const QuestionSample& sample) {
    Explanation ex;
    for (const auto& branch : trace.branches) {
        BranchChain chain;
        chain.entity = branch.entity;
        const auto& attention = tape.value(branch.attention);
        const std::size_t hop_count = argmax_lowest(attention) + 1;
        for (std::size_t t = 0; t < hop_count; ++t) {
            const auto& r = tape.value(branch.relations[t]);
            const std::size_t rel = argmax_lowest(r);
            chain.steps.push_back({static_cast<std::uint32_t>(rel), r[rel]});
        }
        ex.branches.push_back(std::move(chain));
    }
    ex.predicted = predict_entity(tape.value(trace.y), sample);
    return ex;
}

Explanation explain_sample(const ModelParams& params, const ShardedMatrices& kg,
                           const TokenVocab& vocab, const QuestionSample& sample) {
    GradTape tape;
    const ForwardTrace trace = forward_sample(tape, params, nullptr, kg, vocab, sample);
    return explain_trace(tape, trace, sample);
}

namespace {

std::string format_prob(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", p);
    return buf;
}

std::string format_chain(const BranchChain& chain, const TripleStore& store) {
    std::string line = store.entity_name(chain.entity);
    for (const auto& step : chain.steps) {
        line += " → " + store.relation_name(step.relation) + " [" + format_prob(step.prob) +
                "]";
    }
    return line;
}

}  // namespace

std::vector<std::string> format_explanation(const Explanation& ex, const TripleStore& store) {
    if (ex.branches.empty()) throw std::invalid_argument("format_explanation: no branches");
    std::vector<std::string> lines;
    const std::string answer = store.entity_name(ex.predicted);
    if (ex.branches.size() == 1) {
        lines.push_back(format_chain(ex.branches[0], store) + " → " + answer);
    } else {
        for (const auto& b : ex.branches) lines.push_back(format_chain(b, store));
        lines.push_back("Intersection → " + answer);
    }
    return lines;
}

}  // namespace dkgqa
