#pragma once
// Reverse-mode gradient tape, define-by-run.
//
// Each builder method computes its value immediately and records a closure
// that propagates gradients backwards. Parameter-backed nodes (embedding_mean,
// matvec) take an optional sink matrix; during backward() the parameter
// gradient is accumulated there, which is what lets one sink collect grads
// across many tapes for gradient accumulation.
//
// Lifetime: matrices and reified graphs passed by reference must outlive the
// tape; the tape stores pointers, not copies.

#include <cstddef>
#include <functional>
#include <vector>

#include "dkgqa/matrix.hpp"
#include "dkgqa/reified.hpp"

namespace dkgqa {

using NodeId = std::size_t;

class GradTape {
public:
    NodeId constant(std::vector<double> value);

    // Mean of the embedding rows listed in `rows` (with multiplicity).
    // d_emb may be null when the embedding table is frozen.
    NodeId embedding_mean(const Matrix& emb, const std::vector<std::size_t>& rows,
                          Matrix* d_emb);

    // w * value(v). d_w may be null for a frozen weight.
    NodeId matvec(const Matrix& w, NodeId v, Matrix* d_w);

    NodeId add(NodeId a, NodeId b);
    NodeId concat(const std::vector<NodeId>& parts);
    NodeId softmax(NodeId z);

    NodeId follow(const ReifiedMatrices& m, NodeId x, NodeId r);
    NodeId follow(const ShardedMatrices& m, NodeId x, NodeId r);

    // sum_t value(weights)[t] * value(xs[t]); weights size must equal xs size.
    NodeId weighted_sum(NodeId weights, const std::vector<NodeId>& xs);

    NodeId intersect_min(NodeId a, NodeId b);
    NodeId clamp_unit(NodeId x, double eps);

    // Scalar (size-1) node holding the mean binary cross-entropy of value(p)
    // against targets y.
    NodeId multilabel_loss(std::vector<double> y, NodeId p);

    const std::vector<double>& value(NodeId id) const;
    // Valid after backward(); zeroed vectors for nodes the root does not reach.
    const std::vector<double>& grad(NodeId id) const;

    std::size_t size() const { return values_.size(); }

    // Seeds every coordinate of root's grad with `seed` and runs all recorded
    // ops in reverse. Throws std::logic_error when called on an empty tape.
    void backward(NodeId root, double seed = 1.0);

private:
    NodeId push(std::vector<double> value, std::function<void(GradTape&)> back);
    NodeId check(NodeId id) const;

    std::vector<std::vector<double>> values_;
    std::vector<std::vector<double>> grads_;
    std::vector<std::function<void(GradTape&)>> backward_fns_;
};

}  // namespace dkgqa
