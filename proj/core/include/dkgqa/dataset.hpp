#pragma once
// Question samples, tokenization, and the line-oriented dataset format.
//
// A dataset file holds one JSON record per line with fields `question`
// (string), `entities` (list of {id, mention}), `answers` (list of ids), and
// `hops` (integer). Ids are entity names resolved against the knowledge
// graph at load time; question and mention text is tokenized at load time,
// so the in-memory sample carries token lists plus resolved indices.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "dkgqa/triple_store.hpp"

namespace dkgqa {

// Lowercases ASCII letters and splits on every non-alphanumeric character.
std::vector<std::string> tokenize(const std::string& text);

// Token vocabulary with the unknown token fixed at index 0.
class TokenVocab {
public:
    TokenVocab();

    std::size_t intern(const std::string& token);
    // Returns 0 (the unknown index) for absent tokens.
    std::size_t lookup(const std::string& token) const;
    std::vector<std::size_t> lookup_all(const std::vector<std::string>& tokens) const;

    std::size_t size() const { return tokens_.size(); }
    const std::vector<std::string>& tokens() const { return tokens_; }

    static const std::string& unk_token();

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, std::size_t> ids_;
};

struct QuestionEntity {
    std::uint32_t id = 0;
    std::vector<std::string> mention_tokens;

    bool operator==(const QuestionEntity&) const = default;
};

struct QuestionSample {
    std::vector<std::string> question_tokens;
    std::vector<QuestionEntity> entities;  // length >= 1; the model uses at most two
    std::vector<std::uint32_t> answers;    // nonempty, deduplicated, file order
    std::uint32_t hops = 1;                // generator metadata, unused by the model

    bool operator==(const QuestionSample&) const = default;
};

std::vector<QuestionSample> load_dataset(std::istream& in, const TripleStore& store);
std::vector<QuestionSample> load_dataset_file(const std::string& path, const TripleStore& store);

void save_dataset(const std::vector<QuestionSample>& samples, const TripleStore& store,
                  std::ostream& out);
void save_dataset_file(const std::vector<QuestionSample>& samples, const TripleStore& store,
                       const std::string& path);

// Interns question tokens then mention tokens of every sample, in order.
TokenVocab build_vocab(const std::vector<QuestionSample>& samples);

// Multi-hot target vector over entities: 1.0 at each answer index.
std::vector<double> answer_targets(std::size_t n_entities, const QuestionSample& sample);

}  // namespace dkgqa
