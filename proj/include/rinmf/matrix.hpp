#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "rinmf/errors.hpp"

namespace rinmf {

// Dense row-major matrix of doubles.
//
// All kernels below run fixed, size-independent summation orders and the
// library is compiled with FP contraction off, so results are reproducible
// across machines. Construction from external data validates finiteness;
// in-solver arithmetic is guarded by the objective checks in solve().
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix constant(std::size_t rows, std::size_t cols, double value);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) noexcept {
        return data_[i * cols_ + j];
    }
    double operator()(std::size_t i, std::size_t j) const noexcept {
        return data_[i * cols_ + j];
    }
    double& at(std::size_t i, std::size_t j);
    double at(std::size_t i, std::size_t j) const;

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }

    std::string shape() const; // "3x4", used in error messages

    bool same_shape(const Matrix& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    friend bool operator==(const Matrix& a, const Matrix& b) noexcept {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// a * b; throws shape_error naming both shapes when inner dims differ.
Matrix matmul(const Matrix& a, const Matrix& b);
// transpose(a) * b without materializing the transpose
Matrix matmul_at_b(const Matrix& a, const Matrix& b);
// a * transpose(b) without materializing the transpose
Matrix matmul_a_bt(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);

// sqrt of the sum of squares in row-major order; 0 for empty matrices
double frobenius_norm(const Matrix& a);
// ||a - b||_F without the temporary
double frobenius_distance(const Matrix& a, const Matrix& b);

// Divides column j of f by s and multiplies column j of g by s, leaving
// f * transpose(g) unchanged up to rounding. s must be finite and positive.
void scale_column_pair(Matrix& f, Matrix& g, std::size_t j, double s);

} // namespace rinmf
