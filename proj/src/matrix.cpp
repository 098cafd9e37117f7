#include "rinmf/matrix.hpp"

#include <cmath>
#include <utility>

namespace rinmf {

namespace {

std::string shape_of(std::size_t r, std::size_t c) {
    return std::to_string(r) + "x" + std::to_string(c);
}

void require_finite(const std::vector<double>& values) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw domain_error("matrix: non-finite value in input");
        }
    }
}

} // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
    if (data_.size() != rows_ * cols_) {
        throw shape_error("matrix: " + std::to_string(data_.size()) +
                          " values for shape " + shape_of(rows_, cols_));
    }
    require_finite(data_);
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            throw shape_error("matrix: ragged initializer, row of " +
                              std::to_string(r.size()) + " in " + shape_of(rows_, cols_));
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
    require_finite(data_);
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::constant(std::size_t rows, std::size_t cols, double value) {
    Matrix m(rows, cols);
    for (double& v : m.data_) v = value;
    require_finite(m.data_);
    return m;
}

double& Matrix::at(std::size_t i, std::size_t j) {
    if (i >= rows_ || j >= cols_) {
        throw shape_error("matrix: index (" + std::to_string(i) + "," +
                          std::to_string(j) + ") out of range for " + shape());
    }
    return data_[i * cols_ + j];
}

double Matrix::at(std::size_t i, std::size_t j) const {
    return const_cast<Matrix*>(this)->at(i, j);
}

std::string Matrix::shape() const { return shape_of(rows_, cols_); }

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw shape_error("matmul: shapes " + a.shape() + " and " + b.shape() +
                          " do not conform");
    }
    Matrix out(a.rows(), b.cols());
    // i-l-j order: row of the output accumulated in sequence, deterministic.
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t l = 0; l < a.cols(); ++l) {
            const double ail = a(i, l);
            if (ail == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out(i, j) += ail * b(l, j);
            }
        }
    }
    return out;
}

Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw shape_error("matmul_at_b: shapes " + a.shape() + " and " + b.shape() +
                          " do not conform");
    }
    Matrix out(a.cols(), b.cols());
    for (std::size_t l = 0; l < a.rows(); ++l) {
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double ali = a(l, i);
            if (ali == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out(i, j) += ali * b(l, j);
            }
        }
    }
    return out;
}

Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw shape_error("matmul_a_bt: shapes " + a.shape() + " and " + b.shape() +
                          " do not conform");
    }
    Matrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.rows(); ++j) {
            double acc = 0.0;
            for (std::size_t l = 0; l < a.cols(); ++l) {
                acc += a(i, l) * b(j, l);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out(j, i) = a(i, j);
        }
    }
    return out;
}

double frobenius_norm(const Matrix& a) {
    double acc = 0.0;
    for (double v : a.data()) acc += v * v;
    return std::sqrt(acc);
}

double frobenius_distance(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw shape_error("frobenius_distance: shapes " + a.shape() + " and " +
                          b.shape() + " differ");
    }
    double acc = 0.0;
    const auto da = a.data();
    const auto db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) {
        const double d = da[i] - db[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

void scale_column_pair(Matrix& f, Matrix& g, std::size_t j, double s) {
    if (j >= f.cols() || j >= g.cols()) {
        throw shape_error("scale_column_pair: column " + std::to_string(j) +
                          " out of range for " + f.shape() + " / " + g.shape());
    }
    if (!std::isfinite(s) || !(s > 0.0)) {
        throw domain_error("scale_column_pair: scale must be finite and positive");
    }
    for (std::size_t i = 0; i < f.rows(); ++i) f(i, j) /= s;
    for (std::size_t i = 0; i < g.rows(); ++i) g(i, j) *= s;
}

} // namespace rinmf
