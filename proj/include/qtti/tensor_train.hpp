#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace qtti {

/// Largest number of entries any dense materialization may allocate.
inline constexpr std::size_t kMaxDenseElements = std::size_t{1} << 26;

/// Singular values below this fraction of the largest one count as numerical zeros.
inline constexpr double kRankCutoff = 1e-13;

/**
 * Truncation control for TT-SVD and rounding.
 *
 * relative_epsilon bounds the relative Frobenius error of the whole
 * approximation; it is spread evenly over the d-1 bonds. An epsilon of zero
 * with no rank cap keeps every numerically nonzero singular value.
 */
struct Tolerance {
    double relative_epsilon = 0.0;
    std::optional<std::size_t> max_rank;

    static Tolerance exact() { return {}; }
    static Tolerance relative(double eps) { return {eps, std::nullopt}; }
};

/// Dense row-major tensor; the first index varies slowest.
struct DenseTensor {
    std::vector<std::size_t> dims;
    std::vector<double> values;

    DenseTensor() = default;
    DenseTensor(std::vector<std::size_t> dims_, std::vector<double> values_);
    explicit DenseTensor(std::vector<std::size_t> dims_);

    std::size_t size() const { return values.size(); }
    std::size_t flat_index(std::span<const std::size_t> index) const;
    double& at(std::span<const std::size_t> index) { return values[flat_index(index)]; }
    double at(std::span<const std::size_t> index) const { return values[flat_index(index)]; }
};

/// Product of dims with overflow and capacity checks.
std::size_t checked_volume(std::span<const std::size_t> dims,
                           std::size_t limit = kMaxDenseElements);

/// Three-way TT core of shape (left, mode, right), stored row-major.
class Core {
public:
    Core() = default;
    Core(std::size_t left, std::size_t mode, std::size_t right);
    Core(std::size_t left, std::size_t mode, std::size_t right, std::vector<double> data);

    std::size_t left() const { return left_; }
    std::size_t mode() const { return mode_; }
    std::size_t right() const { return right_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t l, std::size_t i, std::size_t r) {
        return data_[(l * mode_ + i) * right_ + r];
    }
    double operator()(std::size_t l, std::size_t i, std::size_t r) const {
        return data_[(l * mode_ + i) * right_ + r];
    }

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

private:
    std::size_t left_ = 0;
    std::size_t mode_ = 0;
    std::size_t right_ = 0;
    std::vector<double> data_;
};

/// Four-way operator core of shape (left, rows, cols, right), stored row-major.
class OperatorCore {
public:
    OperatorCore() = default;
    OperatorCore(std::size_t left, std::size_t rows, std::size_t cols, std::size_t right);
    OperatorCore(std::size_t left, std::size_t rows, std::size_t cols, std::size_t right,
                 std::vector<double> data);

    std::size_t left() const { return left_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t right() const { return right_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t l, std::size_t i, std::size_t j, std::size_t r) {
        return data_[((l * rows_ + i) * cols_ + j) * right_ + r];
    }
    double operator()(std::size_t l, std::size_t i, std::size_t j, std::size_t r) const {
        return data_[((l * rows_ + i) * cols_ + j) * right_ + r];
    }

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

private:
    std::size_t left_ = 0;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t right_ = 0;
    std::vector<double> data_;
};

/**
 * Tensor train: entry (i_1..i_d) is the matrix product G_1(i_1)...G_d(i_d)
 * with open boundary ranks r_0 = r_d = 1.
 */
class TensorTrain {
public:
    TensorTrain() = default;
    explicit TensorTrain(std::vector<Core> cores);

    /// All-rank-1 cores of zeros.
    static TensorTrain zeros(std::span<const std::size_t> dims);
    static TensorTrain constant(std::span<const std::size_t> dims, double value);
    static TensorTrain ones(std::span<const std::size_t> dims) { return constant(dims, 1.0); }
    /// QTT of `cores` binary legs holding a constant.
    static TensorTrain qtt_constant(std::size_t cores, double value);

    std::size_t order() const { return cores_.size(); }
    bool empty() const { return cores_.empty(); }
    const Core& core(std::size_t k) const { return cores_[k]; }
    Core& core(std::size_t k) { return cores_[k]; }
    const std::vector<Core>& cores() const { return cores_; }
    std::vector<Core>& cores() { return cores_; }

    std::vector<std::size_t> dims() const;
    /// r_0..r_d.
    std::vector<std::size_t> ranks() const;
    std::size_t max_rank() const;
    std::size_t parameter_count() const;

private:
    std::vector<Core> cores_;
};

/// Tensor-train operator (MPO) with per-core row and column dimensions.
class TTOperator {
public:
    TTOperator() = default;
    explicit TTOperator(std::vector<OperatorCore> cores);

    static TTOperator identity(std::span<const std::size_t> dims);

    std::size_t order() const { return cores_.size(); }
    const OperatorCore& core(std::size_t k) const { return cores_[k]; }
    OperatorCore& core(std::size_t k) { return cores_[k]; }
    const std::vector<OperatorCore>& cores() const { return cores_; }
    std::vector<OperatorCore>& cores() { return cores_; }

    std::vector<std::size_t> row_dims() const;
    std::vector<std::size_t> col_dims() const;
    std::vector<std::size_t> ranks() const;
    std::size_t max_rank() const;

private:
    std::vector<OperatorCore> cores_;
};

// ---- construction and dense conversion ----

/// Sequential TT-SVD; ranks are the epsilon-ranks of the sequential unfoldings.
TensorTrain tt_from_dense(const DenseTensor& data, const Tolerance& tol = {});
DenseTensor tt_to_dense(const TensorTrain& tt);
/// Single entry in O(d r^2) without densifying.
double tt_eval(const TensorTrain& tt, std::span<const std::size_t> index);

// ---- algebra ----

TensorTrain round(const TensorTrain& tt, const Tolerance& tol);
TensorTrain add(const TensorTrain& a, const TensorTrain& b);
TensorTrain scale(const TensorTrain& a, double c);
TensorTrain hadamard(const TensorTrain& a, const TensorTrain& b);
double dot(const TensorTrain& a, const TensorTrain& b);
double norm2(const TensorTrain& a);
/// Sum of all entries.
double sum(const TensorTrain& a);
/// Chain b after a: (a ⊗ b)(i, j) = a(i) b(j).
TensorTrain kron(const TensorTrain& a, const TensorTrain& b);

/// Whether core k has orthonormal columns in its (left*mode) x right unfolding.
bool is_left_orthogonal(const Core& core, double tolerance = 1e-12);

// ---- operators ----

/// Core-wise contraction without rounding: ranks multiply.
TensorTrain contract(const TTOperator& op, const TensorTrain& v);
TensorTrain apply_operator(const TTOperator& op, const TensorTrain& v, const Tolerance& tol);
TTOperator op_add(const TTOperator& a, const TTOperator& b);
TTOperator op_scale(const TTOperator& a, double c);
/// Matrix product a * b.
TTOperator op_compose(const TTOperator& a, const TTOperator& b);
TTOperator op_round(const TTOperator& op, const Tolerance& tol);
TTOperator op_kron(const TTOperator& a, const TTOperator& b);
TTOperator op_transpose(const TTOperator& a);
/// Dense matrix with prod(row_dims) rows, row-major.
DenseTensor op_to_dense(const TTOperator& op);

namespace detail {
// Chain-level primitives shared by rounding variants (tt, tti, encoders).
void left_orthogonalize(std::vector<Core>& cores, std::size_t k);
void right_orthogonalize(std::vector<Core>& cores, std::size_t k);
/// SVD across bond (k-1, k) from the right; returns the discarded tail norm.
double truncate_bond(std::vector<Core>& cores, std::size_t k, double delta,
                     std::optional<std::size_t> max_rank);
std::size_t choose_rank(std::span<const double> singular_values, double delta,
                        std::optional<std::size_t> max_rank);
Core as_core(const OperatorCore& core);
OperatorCore as_operator_core(const Core& core, std::size_t rows, std::size_t cols);
} // namespace detail

} // namespace qtti
