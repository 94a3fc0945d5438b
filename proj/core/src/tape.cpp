#include "dkgqa/tape.hpp"

#include <stdexcept>
#include <string>
#include <utility>

#include "dkgqa/ops.hpp"

namespace dkgqa {

NodeId GradTape::push(std::vector<double> value, std::function<void(GradTape&)> back) {
    values_.push_back(std::move(value));
    backward_fns_.push_back(std::move(back));
    return values_.size() - 1;
}

NodeId GradTape::check(NodeId id) const {
    if (id >= values_.size()) {
        throw std::invalid_argument("tape: node id " + std::to_string(id) + " out of range");
    }
    return id;
}

const std::vector<double>& GradTape::value(NodeId id) const { return values_[check(id)]; }

const std::vector<double>& GradTape::grad(NodeId id) const {
    check(id);
    if (grads_.size() != values_.size()) {
        throw std::logic_error("tape: grad() before backward()");
    }
    return grads_[id];
}

NodeId GradTape::constant(std::vector<double> value) {
    return push(std::move(value), nullptr);
}

NodeId GradTape::embedding_mean(const Matrix& emb, const std::vector<std::size_t>& rows,
                                Matrix* d_emb) {
    if (rows.empty()) throw std::invalid_argument("embedding_mean: empty row list");
    std::vector<double> out(emb.cols, 0.0);
    for (auto r : rows) {
        if (r >= emb.rows) throw std::invalid_argument("embedding_mean: row out of range");
        const auto row = emb.row(r);
        for (std::size_t j = 0; j < emb.cols; ++j) out[j] += row[j];
    }
    const double inv_n = 1.0 / static_cast<double>(rows.size());
    for (auto& v : out) v *= inv_n;
    const NodeId id = push(std::move(out), nullptr);
    if (d_emb != nullptr) {
        backward_fns_[id] = [rows, inv_n, d_emb, id](GradTape& t) {
            const auto& g = t.grads_[id];
            for (auto r : rows) {
                auto row = d_emb->row(r);
                for (std::size_t j = 0; j < g.size(); ++j) row[j] += inv_n * g[j];
            }
        };
    }
    return id;
}

NodeId GradTape::matvec(const Matrix& w, NodeId v, Matrix* d_w) {
    check(v);
    std::vector<double> out(w.rows);
    dkgqa::matvec(w, values_[v], out);
    const NodeId id = push(std::move(out), nullptr);
    backward_fns_[id] = [&w, v, d_w, id](GradTape& t) {
        const auto& g = t.grads_[id];
        matvec_transpose_acc(w, g, t.grads_[v]);
        if (d_w != nullptr) outer_acc(g, t.values_[v], *d_w);
    };
    return id;
}

NodeId GradTape::add(NodeId a, NodeId b) {
    check(a);
    check(b);
    if (values_[a].size() != values_[b].size()) {
        throw std::invalid_argument("tape add: size mismatch");
    }
    std::vector<double> out(values_[a].size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[a][i] + values_[b][i];
    const NodeId id = push(std::move(out), nullptr);
    backward_fns_[id] = [a, b, id](GradTape& t) {
        const auto& g = t.grads_[id];
        for (std::size_t i = 0; i < g.size(); ++i) {
            t.grads_[a][i] += g[i];
            t.grads_[b][i] += g[i];
        }
    };
    return id;
}

NodeId GradTape::concat(const std::vector<NodeId>& parts) {
    if (parts.empty()) throw std::invalid_argument("tape concat: empty part list");
    std::vector<double> out;
    for (auto p : parts) {
        check(p);
        out.insert(out.end(), values_[p].begin(), values_[p].end());
    }
    const NodeId id = push(std::move(out), nullptr);
    backward_fns_[id] = [parts, id](GradTape& t) {
        const auto& g = t.grads_[id];
        std::size_t off = 0;
        for (auto p : parts) {
            auto& dst = t.grads_[p];
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g[off + i];
            off += dst.size();
        }
    };
    return id;
}

NodeId GradTape::softmax(NodeId z) {
    check(z);
    const NodeId id = push(dkgqa::softmax(values_[z]), nullptr);
    backward_fns_[id] = [z, id](GradTape& t) {
        softmax_vjp(t.values_[id], t.grads_[id], t.grads_[z]);
    };
    return id;
}

NodeId GradTape::follow(const ReifiedMatrices& m, NodeId x, NodeId r) {
    check(x);
    check(r);
    const NodeId id = push(dkgqa::follow(m, values_[x], values_[r]), nullptr);
    backward_fns_[id] = [&m, x, r, id](GradTape& t) {
        follow_vjp_x(m, t.values_[r], t.grads_[id], t.grads_[x]);
        follow_vjp_r(m, t.values_[x], t.grads_[id], t.grads_[r]);
    };
    return id;
}

NodeId GradTape::follow(const ShardedMatrices& m, NodeId x, NodeId r) {
    check(x);
    check(r);
    const NodeId id = push(dkgqa::follow(m, values_[x], values_[r]), nullptr);
    backward_fns_[id] = [&m, x, r, id](GradTape& t) {
        follow_vjp_x(m, t.values_[r], t.grads_[id], t.grads_[x]);
        follow_vjp_r(m, t.values_[x], t.grads_[id], t.grads_[r]);
    };
    return id;
}

NodeId GradTape::weighted_sum(NodeId weights, const std::vector<NodeId>& xs) {
    check(weights);
    if (xs.empty()) throw std::invalid_argument("tape weighted_sum: empty term list");
    if (values_[weights].size() != xs.size()) {
        throw std::invalid_argument("tape weighted_sum: weight count does not match term count");
    }
    const std::size_t n = values_[check(xs[0])].size();
    std::vector<double> out(n, 0.0);
    for (std::size_t t = 0; t < xs.size(); ++t) {
        check(xs[t]);
        if (values_[xs[t]].size() != n) {
            throw std::invalid_argument("tape weighted_sum: term size mismatch");
        }
        const double w = values_[weights][t];
        for (std::size_t i = 0; i < n; ++i) out[i] += w * values_[xs[t]][i];
    }
    const NodeId id = push(std::move(out), nullptr);
    backward_fns_[id] = [weights, xs, id](GradTape& t) {
        const auto& g = t.grads_[id];
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const auto& xv = t.values_[xs[k]];
            double dot = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) dot += g[i] * xv[i];
            t.grads_[weights][k] += dot;
            const double w = t.values_[weights][k];
            auto& dx = t.grads_[xs[k]];
            for (std::size_t i = 0; i < g.size(); ++i) dx[i] += w * g[i];
        }
    };
    return id;
}

NodeId GradTape::intersect_min(NodeId a, NodeId b) {
    check(a);
    check(b);
    const NodeId id = push(dkgqa::intersect_min(values_[a], values_[b]), nullptr);
    backward_fns_[id] = [a, b, id](GradTape& t) {
        intersect_min_vjp(t.values_[a], t.values_[b], t.grads_[id], t.grads_[a], t.grads_[b]);
    };
    return id;
}

NodeId GradTape::clamp_unit(NodeId x, double eps) {
    check(x);
    const NodeId id = push(dkgqa::clamp_unit(values_[x], eps), nullptr);
    backward_fns_[id] = [x, eps, id](GradTape& t) {
        clamp_unit_vjp(t.values_[x], eps, t.grads_[id], t.grads_[x]);
    };
    return id;
}

NodeId GradTape::multilabel_loss(std::vector<double> y, NodeId p) {
    check(p);
    const double loss = dkgqa::multilabel_loss(y, values_[p]);
    const NodeId id = push({loss}, nullptr);
    backward_fns_[id] = [y = std::move(y), p, id](GradTape& t) {
        multilabel_loss_vjp(y, t.values_[p], t.grads_[id][0], t.grads_[p]);
    };
    return id;
}

void GradTape::backward(NodeId root, double seed) {
    if (values_.empty()) throw std::logic_error("tape: backward called before any forward");
    check(root);
    grads_.assign(values_.size(), {});
    for (std::size_t i = 0; i < values_.size(); ++i) {
        grads_[i].assign(values_[i].size(), 0.0);
    }
    for (auto& g : grads_[root]) g = seed;
    for (std::size_t i = values_.size(); i-- > 0;) {
        if (backward_fns_[i]) backward_fns_[i](*this);
    }
}

}  // namespace dkgqa
