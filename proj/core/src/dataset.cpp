#include "dkgqa/dataset.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dkgqa {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

const std::string& TokenVocab::unk_token() {
    static const std::string unk = "<unk>";
    return unk;
}

TokenVocab::TokenVocab() { intern(unk_token()); }

std::size_t TokenVocab::intern(const std::string& token) {
    auto it = ids_.find(token);
    if (it != ids_.end()) return it->second;
    const std::size_t id = tokens_.size();
    tokens_.push_back(token);
    ids_.emplace(token, id);
    return id;
}

std::size_t TokenVocab::lookup(const std::string& token) const {
    auto it = ids_.find(token);
    return it == ids_.end() ? 0 : it->second;
}

std::vector<std::size_t> TokenVocab::lookup_all(const std::vector<std::string>& tokens) const {
    std::vector<std::size_t> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(lookup(t));
    return out;
}

namespace {

using nlohmann::json;

std::uint32_t resolve_entity(const TripleStore& store, const std::string& id,
                             std::size_t line_no, const char* role) {
    const auto idx = store.entity_id(id);
    if (idx < 0) {
        throw std::runtime_error("dataset line " + std::to_string(line_no) + ": " + role +
                                 " id '" + id + "' not in the knowledge graph");
    }
    return static_cast<std::uint32_t>(idx);
}

QuestionSample parse_sample(const std::string& line, std::size_t line_no,
                            const TripleStore& store) {
    json rec;
    try {
        rec = json::parse(line);
    } catch (const json::exception& e) {
        throw std::runtime_error("dataset line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!rec.is_object() || !rec.contains("question") || !rec.contains("entities") ||
        !rec.contains("answers") || !rec.contains("hops")) {
        throw std::runtime_error("dataset line " + std::to_string(line_no) +
                                 ": record needs question, entities, answers, hops");
    }

    QuestionSample s;
    s.question_tokens = tokenize(rec.at("question").get<std::string>());
    if (s.question_tokens.empty()) {
        throw std::runtime_error("dataset line " + std::to_string(line_no) +
                                 ": question has no tokens");
    }

    for (const auto& ent : rec.at("entities")) {
        QuestionEntity qe;
        qe.id = resolve_entity(store, ent.at("id").get<std::string>(), line_no, "entity");
        qe.mention_tokens = tokenize(ent.at("mention").get<std::string>());
        if (qe.mention_tokens.empty()) {
            throw std::runtime_error("dataset line " + std::to_string(line_no) +
                                     ": entity mention has no tokens");
        }
        s.entities.push_back(std::move(qe));
    }
    if (s.entities.empty()) {
        throw std::runtime_error("dataset line " + std::to_string(line_no) +
                                 ": at least one entity is required");
    }

    for (const auto& ans : rec.at("answers")) {
        const auto idx = resolve_entity(store, ans.get<std::string>(), line_no, "answer");
        bool seen = false;
        for (auto a : s.answers) seen = seen || a == idx;
        if (!seen) s.answers.push_back(idx);
    }
    if (s.answers.empty()) {
        throw std::runtime_error("dataset line " + std::to_string(line_no) + ": empty answer set");
    }

    s.hops = rec.at("hops").get<std::uint32_t>();
    return s;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

}  // namespace

std::vector<QuestionSample> load_dataset(std::istream& in, const TripleStore& store) {
    std::vector<QuestionSample> samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        samples.push_back(parse_sample(line, line_no, store));
    }
    return samples;
}

std::vector<QuestionSample> load_dataset_file(const std::string& path, const TripleStore& store) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset: " + path);
    return load_dataset(in, store);
}

void save_dataset(const std::vector<QuestionSample>& samples, const TripleStore& store,
                  std::ostream& out) {
    for (const auto& s : samples) {
        json rec;
        rec["question"] = join_tokens(s.question_tokens);
        json ents = json::array();
        for (const auto& e : s.entities) {
            ents.push_back({{"id", store.entity_name(e.id)},
                            {"mention", join_tokens(e.mention_tokens)}});
        }
        rec["entities"] = std::move(ents);
        json answers = json::array();
        for (auto a : s.answers) answers.push_back(store.entity_name(a));
        rec["answers"] = std::move(answers);
        rec["hops"] = s.hops;
        out << rec.dump() << '\n';
    }
}

void save_dataset_file(const std::vector<QuestionSample>& samples, const TripleStore& store,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    save_dataset(samples, store, out);
    if (!out) throw std::runtime_error("write failed: " + path);
}

TokenVocab build_vocab(const std::vector<QuestionSample>& samples) {
    TokenVocab vocab;
    for (const auto& s : samples) {
        for (const auto& t : s.question_tokens) vocab.intern(t);
        for (const auto& e : s.entities) {
            for (const auto& t : e.mention_tokens) vocab.intern(t);
        }
    }
    return vocab;
}

std::vector<double> answer_targets(std::size_t n_entities, const QuestionSample& sample) {
    std::vector<double> y(n_entities, 0.0);
    for (auto a : sample.answers) {
        if (a >= n_entities) throw std::invalid_argument("answer_targets: answer index out of range");
        y[a] = 1.0;
    }
    return y;
}

}  // namespace dkgqa
