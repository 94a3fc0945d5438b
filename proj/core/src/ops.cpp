#include "dkgqa/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dkgqa {

namespace {

void check_same_size(const std::vector<double>& a, const std::vector<double>& b,
                     const char* what) {
    if (a.size() != b.size()) {
        throw std::invalid_argument(std::string(what) + ": size mismatch (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    }
}

}  // namespace

std::vector<double> softmax(const std::vector<double>& z) {
    if (z.empty()) throw std::invalid_argument("softmax: empty input");
    const double zmax = *std::max_element(z.begin(), z.end());
    std::vector<double> s(z.size());
    double total = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        s[i] = std::exp(z[i] - zmax);
        total += s[i];
    }
    for (auto& v : s) v /= total;
    return s;
}

void softmax_vjp(const std::vector<double>& s, const std::vector<double>& grad,
                 std::vector<double>& dz) {
    check_same_size(s, grad, "softmax_vjp");
    check_same_size(s, dz, "softmax_vjp");
    double dot = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) dot += s[i] * grad[i];
    for (std::size_t i = 0; i < s.size(); ++i) dz[i] += s[i] * (grad[i] - dot);
}

std::vector<double> intersect_min(const std::vector<double>& a, const std::vector<double>& b) {
    check_same_size(a, b, "intersect_min");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::min(a[i], b[i]);
    return out;
}

void intersect_min_vjp(const std::vector<double>& a, const std::vector<double>& b,
                       const std::vector<double>& grad, std::vector<double>& da,
                       std::vector<double>& db) {
    check_same_size(a, b, "intersect_min_vjp");
    check_same_size(a, grad, "intersect_min_vjp");
    check_same_size(a, da, "intersect_min_vjp");
    check_same_size(a, db, "intersect_min_vjp");
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) {
            da[i] += grad[i];
        } else if (b[i] < a[i]) {
            db[i] += grad[i];
        } else {
            da[i] += 0.5 * grad[i];
            db[i] += 0.5 * grad[i];
        }
    }
}

std::vector<double> clamp_unit(const std::vector<double>& x, double eps) {
    if (!(eps > 0.0 && eps < 0.5)) {
        throw std::invalid_argument("clamp_unit: eps must lie in (0, 0.5), got " +
                                    std::to_string(eps));
    }
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = std::min(std::max(x[i], eps), 1.0 - eps);
    }
    return out;
}

void clamp_unit_vjp(const std::vector<double>& x, double eps,
                    const std::vector<double>& grad, std::vector<double>& dx) {
    check_same_size(x, grad, "clamp_unit_vjp");
    check_same_size(x, dx, "clamp_unit_vjp");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > eps && x[i] < 1.0 - eps) dx[i] += grad[i];
    }
}

double multilabel_loss(const std::vector<double>& y, const std::vector<double>& p) {
    check_same_size(y, p, "multilabel_loss");
    if (p.empty()) throw std::invalid_argument("multilabel_loss: empty input");
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] > 0.0 && p[i] < 1.0)) {
            throw std::invalid_argument(
                "multilabel_loss: prediction " + std::to_string(p[i]) + " at index " +
                std::to_string(i) + " outside (0, 1); clamp was skipped");
        }
        total += y[i] * std::log(p[i]) + (1.0 - y[i]) * std::log(1.0 - p[i]);
    }
    return -total / static_cast<double>(p.size());
}

void multilabel_loss_vjp(const std::vector<double>& y, const std::vector<double>& p,
                         double grad, std::vector<double>& dp) {
    check_same_size(y, p, "multilabel_loss_vjp");
    check_same_size(y, dp, "multilabel_loss_vjp");
    const double inv_n = 1.0 / static_cast<double>(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        dp[i] += grad * inv_n * (p[i] - y[i]) / (p[i] * (1.0 - p[i]));
    }
}

}  // namespace dkgqa
