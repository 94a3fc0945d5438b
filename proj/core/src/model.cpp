#include "dkgqa/model.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "dkgqa/io.hpp"

namespace dkgqa {

void validate_config(const ModelConfig& config) {
    if (config.variant != kVariantBaseline && config.variant != kVariantIntersect) {
        throw std::invalid_argument("model config: unknown variant '" + config.variant +
                                    "' (expected baseline or intersect)");
    }
    if (config.dim == 0 || config.max_hops == 0 || config.n_entities == 0 ||
        config.n_relations == 0 || config.vocab_size == 0) {
        throw std::invalid_argument("model config: all sizes must be positive");
    }
    if (!(config.eps > 0.0 && config.eps < 0.5)) {
        throw std::invalid_argument("model config: eps must lie in (0, 0.5)");
    }
}

ModelParams make_params(const ModelConfig& config) {
    validate_config(config);
    ModelParams p;
    p.config = config;
    p.token_embeddings = Matrix(config.vocab_size, config.dim);
    p.w_dec.reserve(config.max_hops);
    p.w_att.reserve(config.max_hops);
    for (std::size_t t = 0; t < config.max_hops; ++t) {
        const std::size_t width = config.dim + t * config.n_relations;
        p.w_dec.emplace_back(config.n_relations, width);
        p.w_att.emplace_back(1, width);
    }
    return p;
}

void for_each_tensor(ModelParams& p,
                     const std::function<void(const std::string&, Matrix&)>& fn) {
    fn("token_embeddings", p.token_embeddings);
    for (std::size_t t = 0; t < p.w_dec.size(); ++t) {
        fn("w_dec[" + std::to_string(t) + "]", p.w_dec[t]);
    }
    for (std::size_t t = 0; t < p.w_att.size(); ++t) {
        fn("w_att[" + std::to_string(t) + "]", p.w_att[t]);
    }
}

void for_each_tensor(const ModelParams& p,
                     const std::function<void(const std::string&, const Matrix&)>& fn) {
    for_each_tensor(const_cast<ModelParams&>(p),
                    [&fn](const std::string& name, Matrix& m) { fn(name, m); });
}

ModelParams init_params(const ModelConfig& config, std::uint64_t seed) {
    ModelParams p = make_params(config);
    std::mt19937_64 rng(seed);
    for_each_tensor(p, [&rng](const std::string&, Matrix& m) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(m.cols));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (auto& v : m.data) v = dist(rng);
    });
    return p;
}

AdamState make_adam_state(const ModelConfig& config) {
    AdamState s;
    s.m = make_params(config);
    s.v = make_params(config);
    return s;
}

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, double lr,
               double beta1, double beta2, double eps) {
    state.step += 1;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));

    std::vector<Matrix*> param_ts, m_ts, v_ts;
    std::vector<const Matrix*> grad_ts;
    std::vector<std::string> names;
    for_each_tensor(params, [&](const std::string& n, Matrix& t) {
        names.push_back(n);
        param_ts.push_back(&t);
    });
    for_each_tensor(grads, [&](const std::string&, const Matrix& t) { grad_ts.push_back(&t); });
    for_each_tensor(state.m, [&](const std::string&, Matrix& t) { m_ts.push_back(&t); });
    for_each_tensor(state.v, [&](const std::string&, Matrix& t) { v_ts.push_back(&t); });
    if (grad_ts.size() != param_ts.size()) {
        throw std::invalid_argument("adam_step: gradient tensor count mismatch");
    }

    for (std::size_t k = 0; k < param_ts.size(); ++k) {
        Matrix& w = *param_ts[k];
        const Matrix& g = *grad_ts[k];
        if (!w.same_shape(g)) {
            throw std::invalid_argument("adam_step: shape mismatch in " + names[k]);
        }
        Matrix& m = *m_ts[k];
        Matrix& v = *v_ts[k];
        for (std::size_t i = 0; i < w.data.size(); ++i) {
            const double gi = g.data[i];
            if (!std::isfinite(gi)) {
                throw std::invalid_argument("adam_step: non-finite gradient in " + names[k]);
            }
            m.data[i] = beta1 * m.data[i] + (1.0 - beta1) * gi;
            v.data[i] = beta2 * v.data[i] + (1.0 - beta2) * gi * gi;
            const double m_hat = m.data[i] / bc1;
            const double v_hat = v.data[i] / bc2;
            w.data[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
        }
    }
}

namespace {

NodeId build_encoding(GradTape& tape, const ModelParams& params, Matrix* d_emb,
                      const TokenVocab& vocab,
                      const std::vector<std::string>& question_tokens,
                      const std::vector<std::string>& mention_tokens) {
    if (question_tokens.empty()) {
        throw std::invalid_argument("encode: question token list is empty");
    }
    if (mention_tokens.empty()) {
        throw std::invalid_argument("encode: mention token list is empty");
    }
    const auto q_rows = vocab.lookup_all(question_tokens);
    const auto m_rows = vocab.lookup_all(mention_tokens);
    const NodeId q_mean = tape.embedding_mean(params.token_embeddings, q_rows, d_emb);
    const NodeId m_mean = tape.embedding_mean(params.token_embeddings, m_rows, d_emb);
    return tape.add(q_mean, m_mean);
}

struct GradSinks {
    Matrix* emb = nullptr;
    std::vector<Matrix*> w_dec;
    std::vector<Matrix*> w_att;
};

GradSinks make_sinks(ModelParams* grads, std::size_t max_hops) {
    GradSinks s;
    s.w_dec.assign(max_hops, nullptr);
    s.w_att.assign(max_hops, nullptr);
    if (grads != nullptr) {
        s.emb = &grads->token_embeddings;
        for (std::size_t t = 0; t < max_hops; ++t) {
            s.w_dec[t] = &grads->w_dec[t];
            s.w_att[t] = &grads->w_att[t];
        }
    }
    return s;
}

BranchTrace build_branch(GradTape& tape, const ModelParams& params, const GradSinks& sinks,
                         const ShardedMatrices& kg, NodeId h_q, std::uint32_t entity) {
    const auto& cfg = params.config;
    if (entity >= cfg.n_entities) {
        throw std::invalid_argument("forward: entity index out of range");
    }

    BranchTrace b;
    b.entity = entity;
    b.h_q = h_q;

    std::vector<double> x0(cfg.n_entities, 0.0);
    x0[entity] = 1.0;
    NodeId x = tape.constant(std::move(x0));

    std::vector<NodeId> scores;  // c_1..c_T, each a size-1 node
    for (std::size_t t = 0; t < cfg.max_hops; ++t) {
        NodeId z = h_q;
        if (t > 0) {
            std::vector<NodeId> parts;
            parts.push_back(h_q);
            for (std::size_t k = t; k-- > 0;) parts.push_back(b.relations[k]);
            z = tape.concat(parts);
        }
        const NodeId r = tape.softmax(tape.matvec(params.w_dec[t], z, sinks.w_dec[t]));
        scores.push_back(tape.matvec(params.w_att[t], z, sinks.w_att[t]));
        x = tape.follow(kg, x, r);
        b.relations.push_back(r);
        b.hop_states.push_back(x);
    }
    b.attention = tape.softmax(tape.concat(scores));
    b.y_branch = tape.weighted_sum(b.attention, b.hop_states);
    return b;
}

void check_kg_shapes(const ModelConfig& cfg, const ShardedMatrices& kg) {
    if (kg.n_entities != cfg.n_entities || kg.n_relations != cfg.n_relations) {
        throw std::invalid_argument(
            "forward: knowledge graph has " + std::to_string(kg.n_entities) + " entities / " +
            std::to_string(kg.n_relations) + " relations, model expects " +
            std::to_string(cfg.n_entities) + " / " + std::to_string(cfg.n_relations));
    }
}

void check_vocab(const ModelConfig& cfg, const TokenVocab& vocab) {
    if (vocab.size() != cfg.vocab_size) {
        throw std::invalid_argument("forward: vocabulary size " + std::to_string(vocab.size()) +
                                    " does not match model (" +
                                    std::to_string(cfg.vocab_size) + ")");
    }
}

}  // namespace

BranchTrace forward_branch(GradTape& tape, const ModelParams& params, ModelParams* grads,
                           const ShardedMatrices& kg, const TokenVocab& vocab,
                           std::uint32_t entity,
                           const std::vector<std::string>& question_tokens,
                           const std::vector<std::string>& mention_tokens) {
    check_kg_shapes(params.config, kg);
    check_vocab(params.config, vocab);
    const GradSinks sinks = make_sinks(grads, params.config.max_hops);
    const NodeId h_q =
        build_encoding(tape, params, sinks.emb, vocab, question_tokens, mention_tokens);
    return build_branch(tape, params, sinks, kg, h_q, entity);
}

ForwardTrace forward_sample(GradTape& tape, const ModelParams& params, ModelParams* grads,
                            const ShardedMatrices& kg, const TokenVocab& vocab,
                            const QuestionSample& sample) {
    if (sample.entities.empty()) {
        throw std::invalid_argument("forward: sample has no question entities");
    }
    const auto& cfg = params.config;
    const bool two_branch = cfg.variant == kVariantIntersect && sample.entities.size() >= 2;

    ForwardTrace trace;
    trace.branches.push_back(forward_branch(tape, params, grads, kg, vocab,
                                            sample.entities[0].id, sample.question_tokens,
                                            sample.entities[0].mention_tokens));
    if (two_branch) {
        trace.branches.push_back(forward_branch(tape, params, grads, kg, vocab,
                                                sample.entities[1].id, sample.question_tokens,
                                                sample.entities[1].mention_tokens));
        trace.y_pre_clamp =
            tape.intersect_min(trace.branches[0].y_branch, trace.branches[1].y_branch);
    } else {
        trace.y_pre_clamp = trace.branches[0].y_branch;
    }
    trace.y = tape.clamp_unit(trace.y_pre_clamp, cfg.eps);
    return trace;
}

std::vector<double> encode_question(const ModelParams& params, const TokenVocab& vocab,
                                    const std::vector<std::string>& question_tokens,
                                    const std::vector<std::string>& mention_tokens) {
    check_vocab(params.config, vocab);
    GradTape tape;
    const NodeId h_q =
        build_encoding(tape, params, nullptr, vocab, question_tokens, mention_tokens);
    return tape.value(h_q);
}

std::vector<double> decode_relation(const ModelParams& params, const std::vector<double>& h_q,
                                    const std::vector<std::vector<double>>& prev) {
    const auto& cfg = params.config;
    if (h_q.size() != cfg.dim) throw std::invalid_argument("decode_relation: bad h_q size");
    if (prev.size() >= cfg.max_hops) {
        throw std::invalid_argument("decode_relation: hop index " +
                                    std::to_string(prev.size() + 1) + " exceeds max hops " +
                                    std::to_string(cfg.max_hops));
    }
    GradTape tape;
    NodeId z = tape.constant(h_q);
    if (!prev.empty()) {
        std::vector<NodeId> parts{z};
        // prev holds r_1..r_{t-1}; the decoder consumes them newest first.
        for (std::size_t k = prev.size(); k-- > 0;) {
            if (prev[k].size() != cfg.n_relations) {
                throw std::invalid_argument("decode_relation: bad relation size");
            }
            parts.push_back(tape.constant(prev[k]));
        }
        z = tape.concat(parts);
    }
    return tape.value(tape.softmax(tape.matvec(params.w_dec[prev.size()], z, nullptr)));
}

std::vector<double> hop_attention(const ModelParams& params, const std::vector<double>& h_q,
                                  const std::vector<std::vector<double>>& relations) {
    const auto& cfg = params.config;
    if (h_q.size() != cfg.dim) throw std::invalid_argument("hop_attention: bad h_q size");
    if (relations.size() != cfg.max_hops) {
        throw std::invalid_argument("hop_attention: expected " + std::to_string(cfg.max_hops) +
                                    " relation distributions, got " +
                                    std::to_string(relations.size()));
    }
    GradTape tape;
    const NodeId h = tape.constant(h_q);
    std::vector<NodeId> rel_nodes;
    for (const auto& r : relations) {
        if (r.size() != cfg.n_relations) {
            throw std::invalid_argument("hop_attention: bad relation size");
        }
        rel_nodes.push_back(tape.constant(r));
    }
    std::vector<NodeId> scores;
    for (std::size_t t = 0; t < cfg.max_hops; ++t) {
        NodeId z = h;
        if (t > 0) {
            std::vector<NodeId> parts{h};
            for (std::size_t k = t; k-- > 0;) parts.push_back(rel_nodes[k]);
            z = tape.concat(parts);
        }
        scores.push_back(tape.matvec(params.w_att[t], z, nullptr));
    }
    return tape.value(tape.softmax(tape.concat(scores)));
}

void save_checkpoint(const ModelParams& params, const TokenVocab& vocab, std::ostream& out) {
    const auto& cfg = params.config;
    if (vocab.size() != cfg.vocab_size) {
        throw std::invalid_argument("save_checkpoint: vocabulary size mismatch");
    }
    write_magic(out, "DKM1");
    write_u64(out, 1);  // format version
    write_string(out, cfg.variant);
    write_u64(out, cfg.dim);
    write_u64(out, cfg.max_hops);
    write_u64(out, cfg.n_entities);
    write_u64(out, cfg.n_relations);
    write_f64(out, cfg.eps);
    write_u64(out, vocab.size());
    for (const auto& t : vocab.tokens()) write_string(out, t);
    for_each_tensor(params, [&out](const std::string&, const Matrix& m) {
        write_f64_array(out, m.data);
    });
}

void save_checkpoint_file(const ModelParams& params, const TokenVocab& vocab,
                          const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    save_checkpoint(params, vocab, out);
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::pair<ModelParams, TokenVocab> load_checkpoint(std::istream& in) {
    expect_magic(in, "DKM1", "model checkpoint");
    const auto version = read_u64(in);
    if (version != 1) {
        throw std::runtime_error("model checkpoint: unsupported version " +
                                 std::to_string(version));
    }
    ModelConfig cfg;
    cfg.variant = read_string(in);
    cfg.dim = read_u64(in);
    cfg.max_hops = read_u64(in);
    cfg.n_entities = read_u64(in);
    cfg.n_relations = read_u64(in);
    cfg.eps = read_f64(in);
    const auto vocab_count = read_u64(in);
    if (vocab_count == 0) throw std::runtime_error("model checkpoint: empty vocabulary");
    TokenVocab vocab;
    for (std::uint64_t i = 0; i < vocab_count; ++i) {
        const std::string token = read_string(in);
        if (i == 0 && token != TokenVocab::unk_token()) {
            throw std::runtime_error("model checkpoint: vocabulary must start with " +
                                     TokenVocab::unk_token());
        }
        vocab.intern(token);
    }
    if (vocab.size() != vocab_count) {
        throw std::runtime_error("model checkpoint: duplicate vocabulary tokens");
    }
    cfg.vocab_size = vocab.size();
    ModelParams params = make_params(cfg);
    for_each_tensor(params,
                    [&in](const std::string&, Matrix& m) { read_f64_array(in, m.data); });
    return {std::move(params), std::move(vocab)};
}

std::pair<ModelParams, TokenVocab> load_checkpoint_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model checkpoint: " + path);
    return load_checkpoint(in);
}

}  // namespace dkgqa
