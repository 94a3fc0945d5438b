#pragma once
// Dense row-major matrix of doubles. Holds parameter tensors and embedding
// tables; all model math is 64-bit.

#include <cstddef>
#include <span>
#include <vector>

namespace dkgqa {

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }

    std::size_t size() const { return data.size(); }
    void zero() { data.assign(data.size(), 0.0); }
    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

// out = W v
void matvec(const Matrix& w, std::span<const double> v, std::span<double> out);

// dv += W^T g
void matvec_transpose_acc(const Matrix& w, std::span<const double> g, std::span<double> dv);

// dW += g v^T
void outer_acc(std::span<const double> g, std::span<const double> v, Matrix& dw);

}  // namespace dkgqa
