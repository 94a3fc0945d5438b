#include "dkgqa/reified.hpp"

#include <future>
#include <stdexcept>

namespace dkgqa {

namespace {

// Shards at or above this row count are dispatched to std::async workers.
constexpr std::size_t kAsyncRowThreshold = 8192;

void check_follow_args(std::size_t n_entities, std::size_t n_relations,
                       const std::vector<double>& x, const std::vector<double>& r) {
    if (x.size() != n_entities) {
        throw std::invalid_argument("follow: entity vector has size " +
                                    std::to_string(x.size()) + ", expected " +
                                    std::to_string(n_entities));
    }
    if (r.size() != n_relations) {
        throw std::invalid_argument("follow: relation vector has size " +
                                    std::to_string(r.size()) + ", expected " +
                                    std::to_string(n_relations));
    }
}

}  // namespace

ReifiedMatrices reify(const TripleStore& store) {
    ReifiedMatrices m;
    m.n_entities = store.n_entities();
    m.n_relations = store.n_relations();
    m.subject.reserve(store.n_triples());
    m.relation.reserve(store.n_triples());
    m.object.reserve(store.n_triples());
    for (const auto& t : store.triples()) {
        m.subject.push_back(t.s);
        m.relation.push_back(t.p);
        m.object.push_back(t.o);
    }
    return m;
}

std::vector<std::pair<std::size_t, std::size_t>> partition_rows(std::size_t n_rows,
                                                                std::size_t k) {
    if (k == 0) throw std::invalid_argument("partition_rows: k must be positive");
    if (n_rows == 0) {
        if (k == 1) return {{0, 0}};
        throw std::invalid_argument("partition_rows: cannot split 0 rows into more than 1 range");
    }
    if (k > n_rows) {
        throw std::invalid_argument("partition_rows: k=" + std::to_string(k) + " exceeds " +
                                    std::to_string(n_rows) + " rows");
    }
    const std::size_t base = n_rows / k;
    const std::size_t extra = n_rows % k;
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    ranges.reserve(k);
    std::size_t start = 0;
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t len = base + (j < extra ? 1 : 0);
        ranges.emplace_back(start, start + len);
        start += len;
    }
    return ranges;
}

ShardedMatrices shard(const ReifiedMatrices& m, std::size_t k) {
    ShardedMatrices s;
    s.n_entities = m.n_entities;
    s.n_relations = m.n_relations;
    s.n_triples = m.n_triples();
    const auto ranges = partition_rows(m.n_triples(), k);
    s.shards.reserve(ranges.size());
    for (const auto& [lo, hi] : ranges) {
        ReifiedMatrices piece;
        piece.n_entities = m.n_entities;
        piece.n_relations = m.n_relations;
        piece.subject.assign(m.subject.begin() + lo, m.subject.begin() + hi);
        piece.relation.assign(m.relation.begin() + lo, m.relation.begin() + hi);
        piece.object.assign(m.object.begin() + lo, m.object.begin() + hi);
        s.shards.push_back(std::move(piece));
    }
    return s;
}

void follow(const ReifiedMatrices& m, const std::vector<double>& x,
            const std::vector<double>& r, std::vector<double>& out) {
    check_follow_args(m.n_entities, m.n_relations, x, r);
    out.assign(m.n_entities, 0.0);
    const std::size_t n = m.n_triples();
    for (std::size_t i = 0; i < n; ++i) {
        out[m.object[i]] += x[m.subject[i]] * r[m.relation[i]];
    }
}

std::vector<double> follow(const ReifiedMatrices& m, const std::vector<double>& x,
                           const std::vector<double>& r) {
    std::vector<double> out;
    follow(m, x, r, out);
    return out;
}

void follow(const ShardedMatrices& m, const std::vector<double>& x,
            const std::vector<double>& r, std::vector<double>& out) {
    check_follow_args(m.n_entities, m.n_relations, x, r);
    const std::size_t k = m.shards.size();
    if (k == 1) {
        follow(m.shards[0], x, r, out);
        return;
    }
    std::vector<std::vector<double>> partials(k);
    std::vector<std::future<void>> pending;
    for (std::size_t j = 0; j < k; ++j) {
        const ReifiedMatrices& piece = m.shards[j];
        auto* dst = &partials[j];
        if (piece.n_triples() >= kAsyncRowThreshold) {
            pending.push_back(std::async(std::launch::async,
                                         [&piece, &x, &r, dst] { follow(piece, x, r, *dst); }));
        } else {
            follow(piece, x, r, *dst);
        }
    }
    for (auto& f : pending) f.get();
    out.assign(m.n_entities, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t e = 0; e < m.n_entities; ++e) out[e] += partials[j][e];
    }
}

std::vector<double> follow(const ShardedMatrices& m, const std::vector<double>& x,
                           const std::vector<double>& r) {
    std::vector<double> out;
    follow(m, x, r, out);
    return out;
}

void follow_vjp_x(const ReifiedMatrices& m, const std::vector<double>& r,
                  const std::vector<double>& grad, std::vector<double>& dx) {
    if (grad.size() != m.n_entities || dx.size() != m.n_entities || r.size() != m.n_relations) {
        throw std::invalid_argument("follow_vjp_x: vector size mismatch");
    }
    const std::size_t n = m.n_triples();
    for (std::size_t i = 0; i < n; ++i) {
        dx[m.subject[i]] += grad[m.object[i]] * r[m.relation[i]];
    }
}

void follow_vjp_r(const ReifiedMatrices& m, const std::vector<double>& x,
                  const std::vector<double>& grad, std::vector<double>& dr) {
    if (grad.size() != m.n_entities || x.size() != m.n_entities || dr.size() != m.n_relations) {
        throw std::invalid_argument("follow_vjp_r: vector size mismatch");
    }
    const std::size_t n = m.n_triples();
    for (std::size_t i = 0; i < n; ++i) {
        dr[m.relation[i]] += grad[m.object[i]] * x[m.subject[i]];
    }
}

void follow_vjp_x(const ShardedMatrices& m, const std::vector<double>& r,
                  const std::vector<double>& grad, std::vector<double>& dx) {
    for (const auto& piece : m.shards) follow_vjp_x(piece, r, grad, dx);
}

void follow_vjp_r(const ShardedMatrices& m, const std::vector<double>& x,
                  const std::vector<double>& grad, std::vector<double>& dr) {
    for (const auto& piece : m.shards) follow_vjp_r(piece, x, grad, dr);
}

}  // namespace dkgqa
