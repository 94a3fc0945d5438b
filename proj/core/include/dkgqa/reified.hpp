#pragma once
// Reified triple matrices and the follow kernel.
//
// A knowledge graph with N_T triples is held as three indicator matrices of
// shape N_T x N_E (subject, object) and N_T x N_R (relation), each with
// exactly one nonzero per row. Only the column index of that nonzero is
// stored, so row i of the graph is the triple
// (subject[i], relation[i], object[i]).
//
// follow(x, r) computes M_o^T (M_s x * M_p r): for each triple row,
// x[subject[i]] * r[relation[i]] is accumulated into out[object[i]].

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "dkgqa/triple_store.hpp"

namespace dkgqa {

struct ReifiedMatrices {
    std::size_t n_entities = 0;
    std::size_t n_relations = 0;
    // Column indices, one per triple row. All three share the same length.
    std::vector<std::uint32_t> subject;
    std::vector<std::uint32_t> relation;
    std::vector<std::uint32_t> object;

    std::size_t n_triples() const { return subject.size(); }
};

ReifiedMatrices reify(const TripleStore& store);

// Splits [0, n_rows) into k contiguous ranges whose sizes differ by at most
// one, larger ranges first. Throws std::invalid_argument if k == 0 or
// k > n_rows (unless both are zero).
std::vector<std::pair<std::size_t, std::size_t>> partition_rows(std::size_t n_rows,
                                                                std::size_t k);

struct ShardedMatrices {
    std::size_t n_entities = 0;
    std::size_t n_relations = 0;
    std::size_t n_triples = 0;
    // shards[j] holds the triple rows of the j-th contiguous range.
    std::vector<ReifiedMatrices> shards;
};

ShardedMatrices shard(const ReifiedMatrices& m, std::size_t k);

// out must have size n_entities; overwritten, not accumulated into.
void follow(const ReifiedMatrices& m, const std::vector<double>& x,
            const std::vector<double>& r, std::vector<double>& out);
std::vector<double> follow(const ReifiedMatrices& m, const std::vector<double>& x,
                           const std::vector<double>& r);

// Each shard is evaluated into its own buffer; buffers are summed in shard
// order, so the result is reproducible for a fixed shard count. Shards above
// a size threshold run on std::async workers; scheduling cannot change the
// value because the reduction order is fixed.
void follow(const ShardedMatrices& m, const std::vector<double>& x,
            const std::vector<double>& r, std::vector<double>& out);
std::vector<double> follow(const ShardedMatrices& m, const std::vector<double>& x,
                           const std::vector<double>& r);

// Vector-Jacobian products for follow. grad is d(loss)/d(out); dx and dr are
// accumulated into (callers zero them when starting a fresh backward pass).
void follow_vjp_x(const ReifiedMatrices& m, const std::vector<double>& r,
                  const std::vector<double>& grad, std::vector<double>& dx);
void follow_vjp_r(const ReifiedMatrices& m, const std::vector<double>& x,
                  const std::vector<double>& grad, std::vector<double>& dr);
void follow_vjp_x(const ShardedMatrices& m, const std::vector<double>& r,
                  const std::vector<double>& grad, std::vector<double>& dx);
void follow_vjp_r(const ShardedMatrices& m, const std::vector<double>& x,
                  const std::vector<double>& grad, std::vector<double>& dr);

}  // namespace dkgqa
