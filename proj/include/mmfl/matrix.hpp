#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "mmfl/common.hpp"

namespace mmfl {

// Dense row-major matrix of doubles. Batches are rows, features are columns.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    const double& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
    bool empty() const { return rows == 0 || cols == 0; }
};

inline bool all_finite(const Matrix& m) {
    for (double v : m.data)
        if (!std::isfinite(v)) return false;
    return true;
}

inline void ensure_finite(const Matrix& m, const char* context) {
    if (!all_finite(m))
        throw InternalError(std::string("non-finite value produced in ") + context);
}

// c = a * b
inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) throw UsageError("matmul: inner dimensions differ");
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ai = a.data.data() + i * a.cols;
        double* ci = c.data.data() + i * c.cols;
        for (std::size_t k = 0; k < a.cols; ++k) {
            double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = b.data.data() + k * b.cols;
            for (std::size_t j = 0; j < b.cols; ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

// c = a^T * b
inline Matrix matmul_at(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows) throw UsageError("matmul_at: row counts differ");
    Matrix c(a.cols, b.cols);
    for (std::size_t k = 0; k < a.rows; ++k) {
        const double* ak = a.data.data() + k * a.cols;
        const double* bk = b.data.data() + k * b.cols;
        for (std::size_t i = 0; i < a.cols; ++i) {
            double aki = ak[i];
            if (aki == 0.0) continue;
            double* ci = c.data.data() + i * c.cols;
            for (std::size_t j = 0; j < b.cols; ++j) ci[j] += aki * bk[j];
        }
    }
    return c;
}

// c = a * b^T
inline Matrix matmul_bt(const Matrix& a, const Matrix& b) {
    if (a.cols != b.cols) throw UsageError("matmul_bt: column counts differ");
    Matrix c(a.rows, b.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ai = a.data.data() + i * a.cols;
        for (std::size_t j = 0; j < b.rows; ++j) {
            const double* bj = b.data.data() + j * b.cols;
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) s += ai[k] * bj[k];
            c(i, j) = s;
        }
    }
    return c;
}

inline Matrix take_rows(const Matrix& m, const std::vector<std::size_t>& idx) {
    Matrix out(idx.size(), m.cols);
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < m.cols; ++j) out(i, j) = m(idx[i], j);
    return out;
}

// Rows [begin, begin+count) as a copy.
inline Matrix slice_rows(const Matrix& m, std::size_t begin, std::size_t count) {
    Matrix out(count, m.cols);
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) out(i, j) = m(begin + i, j);
    return out;
}

inline Matrix vstack(const Matrix& top, const Matrix& bottom) {
    if (!top.empty() && !bottom.empty() && top.cols != bottom.cols)
        throw UsageError("vstack: column counts differ");
    if (top.empty()) return bottom;
    if (bottom.empty()) return top;
    Matrix out(top.rows + bottom.rows, top.cols);
    std::copy(top.data.begin(), top.data.end(), out.data.begin());
    std::copy(bottom.data.begin(), bottom.data.end(), out.data.begin() + top.data.size());
    return out;
}

}  // namespace mmfl
