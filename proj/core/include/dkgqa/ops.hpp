#pragma once
// Differentiable primitives shared by the tape and the plain forward path.
// Each op comes with its vector-Jacobian product; VJPs accumulate into the
// destination so a node feeding several consumers sums its incoming grads.

#include <cstddef>
#include <vector>

namespace dkgqa {

std::vector<double> softmax(const std::vector<double>& z);
// dz += (diag(s) - s s^T) grad, with s = softmax(z).
void softmax_vjp(const std::vector<double>& s, const std::vector<double>& grad,
                 std::vector<double>& dz);

// Element-wise minimum. Sizes must match.
std::vector<double> intersect_min(const std::vector<double>& a, const std::vector<double>& b);
// Gradient flows to the smaller input per coordinate; an exact tie sends half
// to each side so the op stays commutative under differentiation.
void intersect_min_vjp(const std::vector<double>& a, const std::vector<double>& b,
                       const std::vector<double>& grad, std::vector<double>& da,
                       std::vector<double>& db);

// Clamps every coordinate into [eps, 1 - eps]. Requires 0 < eps < 0.5.
std::vector<double> clamp_unit(const std::vector<double>& x, double eps);
// Identity gradient strictly inside the open interval, zero where clamped.
void clamp_unit_vjp(const std::vector<double>& x, double eps,
                    const std::vector<double>& grad, std::vector<double>& dx);

// Mean binary cross-entropy over entities:
//   -(1/N) sum_j [ y_j log p_j + (1 - y_j) log(1 - p_j) ].
// Throws std::invalid_argument if any p_j lies outside (0, 1); predictions
// must pass through clamp_unit first.
double multilabel_loss(const std::vector<double>& y, const std::vector<double>& p);
// dp += grad * (1/N) (p - y) / (p (1 - p)).
void multilabel_loss_vjp(const std::vector<double>& y, const std::vector<double>& p,
                         double grad, std::vector<double>& dp);

}  // namespace dkgqa
