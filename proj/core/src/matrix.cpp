#include "dkgqa/matrix.hpp"

#include <stdexcept>

namespace dkgqa {

void matvec(const Matrix& w, std::span<const double> v, std::span<double> out) {
    if (v.size() != w.cols || out.size() != w.rows) {
        throw std::invalid_argument("matvec: dimension mismatch");
    }
    for (std::size_t i = 0; i < w.rows; ++i) {
        const double* wr = w.data.data() + i * w.cols;
        double acc = 0.0;
        for (std::size_t j = 0; j < w.cols; ++j) acc += wr[j] * v[j];
        out[i] = acc;
    }
}

void matvec_transpose_acc(const Matrix& w, std::span<const double> g, std::span<double> dv) {
    if (g.size() != w.rows || dv.size() != w.cols) {
        throw std::invalid_argument("matvec_transpose_acc: dimension mismatch");
    }
    for (std::size_t i = 0; i < w.rows; ++i) {
        const double gi = g[i];
        if (gi == 0.0) continue;
        const double* wr = w.data.data() + i * w.cols;
        for (std::size_t j = 0; j < w.cols; ++j) dv[j] += wr[j] * gi;
    }
}

void outer_acc(std::span<const double> g, std::span<const double> v, Matrix& dw) {
    if (g.size() != dw.rows || v.size() != dw.cols) {
        throw std::invalid_argument("outer_acc: dimension mismatch");
    }
    for (std::size_t i = 0; i < dw.rows; ++i) {
        const double gi = g[i];
        if (gi == 0.0) continue;
        double* dr = dw.data.data() + i * dw.cols;
        for (std::size_t j = 0; j < dw.cols; ++j) dr[j] += gi * v[j];
    }
}

}  // namespace dkgqa
