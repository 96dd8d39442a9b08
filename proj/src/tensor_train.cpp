#include "qtti/tensor_train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "qtti/errors.hpp"

namespace qtti {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<RowMatrix>;
using ConstRowMap = Eigen::Map<const RowMatrix>;

// Left unfolding (left*mode) x right.
ConstRowMap left_unfolding(const Core& c) {
    return {c.data().data(), static_cast<Eigen::Index>(c.left() * c.mode()),
            static_cast<Eigen::Index>(c.right())};
}

// Right unfolding left x (mode*right).
ConstRowMap right_unfolding(const Core& c) {
    return {c.data().data(), static_cast<Eigen::Index>(c.left()),
            static_cast<Eigen::Index>(c.mode() * c.right())};
}

Core core_from_left(const RowMatrix& m, std::size_t left, std::size_t mode) {
    Core c(left, mode, static_cast<std::size_t>(m.cols()));
    RowMap(c.data().data(), m.rows(), m.cols()) = m;
    return c;
}

Core core_from_right(const RowMatrix& m, std::size_t mode, std::size_t right) {
    Core c(static_cast<std::size_t>(m.rows()), mode, right);
    RowMap(c.data().data(), m.rows(), m.cols()) = m;
    return c;
}

void check_same_dims(const TensorTrain& a, const TensorTrain& b, const char* what) {
    if (a.dims() != b.dims()) {
        throw DimensionError(std::string(what) + ": physical dimensions differ");
    }
}

// Thin SVD; Jacobi for small problems keeps tiny singular values accurate.
struct Svd {
    RowMatrix u;
    Eigen::VectorXd s;
    RowMatrix v;
};

Svd thin_svd(const RowMatrix& m) {
    Svd out;
    if (std::min(m.rows(), m.cols()) <= 64) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        out.u = svd.matrixU();
        out.s = svd.singularValues();
        out.v = svd.matrixV();
    } else {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        out.u = svd.matrixU();
        out.s = svd.singularValues();
        out.v = svd.matrixV();
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// DenseTensor

DenseTensor::DenseTensor(std::vector<std::size_t> dims_, std::vector<double> values_)
    : dims(std::move(dims_)), values(std::move(values_)) {
    if (checked_volume(dims, std::numeric_limits<std::size_t>::max()) != values.size()) {
        throw DimensionError("DenseTensor: value count does not match dims");
    }
}

DenseTensor::DenseTensor(std::vector<std::size_t> dims_) : dims(std::move(dims_)) {
    values.assign(checked_volume(dims), 0.0);
}

std::size_t DenseTensor::flat_index(std::span<const std::size_t> index) const {
    if (index.size() != dims.size()) {
        throw DimensionError("DenseTensor: index order mismatch");
    }
    std::size_t flat = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        if (index[k] >= dims[k]) {
            throw DimensionError("DenseTensor: index out of range");
        }
        flat = flat * dims[k] + index[k];
    }
    return flat;
}

std::size_t checked_volume(std::span<const std::size_t> dims, std::size_t limit) {
    std::size_t n = 1;
    for (std::size_t d : dims) {
        if (d == 0) {
            throw DimensionError("zero-sized dimension");
        }
        if (n > limit / d) {
            throw CapacityError("dense size exceeds capacity (" + std::to_string(limit) +
                                " elements)");
        }
        n *= d;
    }
    return n;
}

// ---------------------------------------------------------------------------
// Cores

Core::Core(std::size_t left, std::size_t mode, std::size_t right)
    : left_(left), mode_(mode), right_(right), data_(left * mode * right, 0.0) {}

Core::Core(std::size_t left, std::size_t mode, std::size_t right, std::vector<double> data)
    : left_(left), mode_(mode), right_(right), data_(std::move(data)) {
    if (data_.size() != left * mode * right) {
        throw DimensionError("Core: data size does not match shape");
    }
}

OperatorCore::OperatorCore(std::size_t left, std::size_t rows, std::size_t cols,
                           std::size_t right)
    : left_(left), rows_(rows), cols_(cols), right_(right),
      data_(left * rows * cols * right, 0.0) {}

OperatorCore::OperatorCore(std::size_t left, std::size_t rows, std::size_t cols,
                           std::size_t right, std::vector<double> data)
    : left_(left), rows_(rows), cols_(cols), right_(right), data_(std::move(data)) {
    if (data_.size() != left * rows * cols * right) {
        throw DimensionError("OperatorCore: data size does not match shape");
    }
}

// ---------------------------------------------------------------------------
// TensorTrain

TensorTrain::TensorTrain(std::vector<Core> cores) : cores_(std::move(cores)) {
    if (cores_.empty()) {
        return;
    }
    if (cores_.front().left() != 1 || cores_.back().right() != 1) {
        throw DimensionError("TensorTrain: boundary ranks must be 1");
    }
    for (std::size_t k = 0; k + 1 < cores_.size(); ++k) {
        if (cores_[k].right() != cores_[k + 1].left()) {
            throw DimensionError("TensorTrain: rank mismatch between cores " +
                                 std::to_string(k) + " and " + std::to_string(k + 1));
        }
    }
}

TensorTrain TensorTrain::zeros(std::span<const std::size_t> dims) {
    return constant(dims, 0.0);
}

TensorTrain TensorTrain::constant(std::span<const std::size_t> dims, double value) {
    std::vector<Core> cores;
    cores.reserve(dims.size());
    for (std::size_t k = 0; k < dims.size(); ++k) {
        cores.emplace_back(1, dims[k], 1,
                           std::vector<double>(dims[k], k == 0 ? value : 1.0));
    }
    return TensorTrain(std::move(cores));
}

TensorTrain TensorTrain::qtt_constant(std::size_t cores, double value) {
    const std::vector<std::size_t> dims(cores, 2);
    return constant(dims, value);
}

std::vector<std::size_t> TensorTrain::dims() const {
    std::vector<std::size_t> out;
    out.reserve(cores_.size());
    for (const auto& c : cores_) {
        out.push_back(c.mode());
    }
    return out;
}

std::vector<std::size_t> TensorTrain::ranks() const {
    std::vector<std::size_t> out;
    if (cores_.empty()) {
        return out;
    }
    out.push_back(cores_.front().left());
    for (const auto& c : cores_) {
        out.push_back(c.right());
    }
    return out;
}

std::size_t TensorTrain::max_rank() const {
    const auto r = ranks();
    return r.empty() ? 0 : *std::max_element(r.begin(), r.end());
}

std::size_t TensorTrain::parameter_count() const {
    std::size_t n = 0;
    for (const auto& c : cores_) {
        n += c.size();
    }
    return n;
}

// ---------------------------------------------------------------------------
// TTOperator

TTOperator::TTOperator(std::vector<OperatorCore> cores) : cores_(std::move(cores)) {
    if (cores_.empty()) {
        return;
    }
    if (cores_.front().left() != 1 || cores_.back().right() != 1) {
        throw DimensionError("TTOperator: boundary ranks must be 1");
    }
    for (std::size_t k = 0; k + 1 < cores_.size(); ++k) {
        if (cores_[k].right() != cores_[k + 1].left()) {
            throw DimensionError("TTOperator: rank mismatch between cores " +
                                 std::to_string(k) + " and " + std::to_string(k + 1));
        }
    }
}

TTOperator TTOperator::identity(std::span<const std::size_t> dims) {
    std::vector<OperatorCore> cores;
    for (std::size_t n : dims) {
        OperatorCore c(1, n, n, 1);
        for (std::size_t i = 0; i < n; ++i) {
            c(0, i, i, 0) = 1.0;
        }
        cores.push_back(std::move(c));
    }
    return TTOperator(std::move(cores));
}

std::vector<std::size_t> TTOperator::row_dims() const {
    std::vector<std::size_t> out;
    for (const auto& c : cores_) {
        out.push_back(c.rows());
    }
    return out;
}

std::vector<std::size_t> TTOperator::col_dims() const {
    std::vector<std::size_t> out;
    for (const auto& c : cores_) {
        out.push_back(c.cols());
    }
    return out;
}

std::vector<std::size_t> TTOperator::ranks() const {
    std::vector<std::size_t> out;
    if (cores_.empty()) {
        return out;
    }
    out.push_back(cores_.front().left());
    for (const auto& c : cores_) {
        out.push_back(c.right());
    }
    return out;
}

std::size_t TTOperator::max_rank() const {
    const auto r = ranks();
    return r.empty() ? 0 : *std::max_element(r.begin(), r.end());
}

// ---------------------------------------------------------------------------
// detail primitives

namespace detail {

std::size_t choose_rank(std::span<const double> sv, double delta,
                        std::optional<std::size_t> max_rank) {
    if (sv.empty() || sv[0] <= 0.0) {
        return 1;
    }
    const double floor = sv[0] * kRankCutoff;
    std::size_t rank = sv.size();
    while (rank > 1 && sv[rank - 1] <= floor) {
        --rank;
    }
    // Drop the longest tail whose norm stays within delta.
    double tail = 0.0;
    for (std::size_t r = sv.size(); r > 0; --r) {
        tail += sv[r - 1] * sv[r - 1];
        if (std::sqrt(tail) > delta) {
            rank = std::min(rank, r);
            break;
        }
        if (r == 1) {
            rank = 1;
        }
    }
    rank = std::max<std::size_t>(rank, 1);
    if (max_rank) {
        rank = std::min(rank, std::max<std::size_t>(*max_rank, 1));
    }
    return rank;
}

void left_orthogonalize(std::vector<Core>& cores, std::size_t k) {
    Core& c = cores[k];
    const RowMatrix m = left_unfolding(c);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    const auto rank = std::min(m.rows(), m.cols());
    RowMatrix q = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), rank);
    RowMatrix r = qr.matrixQR().topRows(rank).triangularView<Eigen::Upper>();
    const std::size_t left = c.left();
    const std::size_t mode = c.mode();
    c = core_from_left(q, left, mode);
    Core& next = cores[k + 1];
    const RowMatrix merged = r * right_unfolding(next);
    next = core_from_right(merged, next.mode(), next.right());
}

void right_orthogonalize(std::vector<Core>& cores, std::size_t k) {
    Core& c = cores[k];
    const RowMatrix mt = right_unfolding(c).transpose();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(mt);
    const auto rank = std::min(mt.rows(), mt.cols());
    RowMatrix q = qr.householderQ() * Eigen::MatrixXd::Identity(mt.rows(), rank);
    RowMatrix r = qr.matrixQR().topRows(rank).triangularView<Eigen::Upper>();
    const std::size_t mode = c.mode();
    const std::size_t right = c.right();
    c = core_from_right(q.transpose(), mode, right);
    Core& prev = cores[k - 1];
    const RowMatrix merged = left_unfolding(prev) * r.transpose();
    prev = core_from_left(merged, prev.left(), prev.mode());
}

double truncate_bond(std::vector<Core>& cores, std::size_t k, double delta,
                     std::optional<std::size_t> max_rank) {
    Core& c = cores[k];
    const Svd svd = thin_svd(right_unfolding(c));
    const std::span<const double> sv(svd.s.data(), static_cast<std::size_t>(svd.s.size()));
    const std::size_t rank = choose_rank(sv, delta, max_rank);
    double tail = 0.0;
    for (std::size_t i = rank; i < sv.size(); ++i) {
        tail += sv[i] * sv[i];
    }
    const auto r = static_cast<Eigen::Index>(rank);
    const std::size_t mode = c.mode();
    const std::size_t right = c.right();
    c = core_from_right(svd.v.leftCols(r).transpose(), mode, right);
    Core& prev = cores[k - 1];
    const RowMatrix us = svd.u.leftCols(r) * svd.s.head(r).asDiagonal();
    const RowMatrix merged = left_unfolding(prev) * us;
    prev = core_from_left(merged, prev.left(), prev.mode());
    return std::sqrt(tail);
}

Core as_core(const OperatorCore& core) {
    return Core(core.left(), core.rows() * core.cols(), core.right(),
                std::vector<double>(core.data().begin(), core.data().end()));
}

OperatorCore as_operator_core(const Core& core, std::size_t rows, std::size_t cols) {
    return OperatorCore(core.left(), rows, cols, core.right(),
                        std::vector<double>(core.data().begin(), core.data().end()));
}

} // namespace detail

// ---------------------------------------------------------------------------
// Dense conversion

TensorTrain tt_from_dense(const DenseTensor& data, const Tolerance& tol) {
    if (data.dims.empty() || data.values.empty()) {
        throw DimensionError("tt_from_dense: empty tensor");
    }
    checked_volume(data.dims);
    const std::size_t d = data.dims.size();
    const double total = Eigen::Map<const Eigen::VectorXd>(
                             data.values.data(), static_cast<Eigen::Index>(data.values.size()))
                             .norm();
    if (total == 0.0) {
        return TensorTrain::zeros(data.dims);
    }
    const double delta =
        d > 1 ? tol.relative_epsilon * total / std::sqrt(static_cast<double>(d - 1)) : 0.0;

    std::vector<Core> cores;
    cores.reserve(d);
    std::size_t rank = 1;
    std::size_t rest = data.values.size();
    RowMatrix c = ConstRowMap(data.values.data(), 1, static_cast<Eigen::Index>(rest));
    for (std::size_t k = 0; k + 1 < d; ++k) {
        const std::size_t n = data.dims[k];
        rest /= n;
        const RowMatrix unfold = Eigen::Map<const RowMatrix>(
            c.data(), static_cast<Eigen::Index>(rank * n), static_cast<Eigen::Index>(rest));
        const Svd svd = thin_svd(unfold);
        const std::span<const double> sv(svd.s.data(), static_cast<std::size_t>(svd.s.size()));
        const std::size_t r = detail::choose_rank(sv, delta, tol.max_rank);
        const auto ri = static_cast<Eigen::Index>(r);
        cores.push_back(core_from_left(svd.u.leftCols(ri), rank, n));
        c = svd.s.head(ri).asDiagonal() * svd.v.leftCols(ri).transpose();
        rank = r;
    }
    cores.push_back(core_from_right(c, data.dims.back(), 1));
    return TensorTrain(std::move(cores));
}

DenseTensor tt_to_dense(const TensorTrain& tt) {
    if (tt.empty()) {
        throw DimensionError("tt_to_dense: empty tensor train");
    }
    const auto dims = tt.dims();
    checked_volume(dims);
    // Running product as a (prefix_count) x rank matrix.
    RowMatrix acc = RowMatrix::Ones(1, 1);
    for (const Core& c : tt.cores()) {
        const RowMatrix next = acc * right_unfolding(c);
        acc = Eigen::Map<const RowMatrix>(next.data(),
                                          next.rows() * static_cast<Eigen::Index>(c.mode()),
                                          static_cast<Eigen::Index>(c.right()));
    }
    return DenseTensor(dims, std::vector<double>(acc.data(), acc.data() + acc.size()));
}

double tt_eval(const TensorTrain& tt, std::span<const std::size_t> index) {
    if (index.size() != tt.order()) {
        throw DimensionError("tt_eval: index order mismatch");
    }
    std::vector<double> v{1.0};
    std::vector<double> next;
    for (std::size_t k = 0; k < tt.order(); ++k) {
        const Core& c = tt.core(k);
        if (index[k] >= c.mode()) {
            throw DimensionError("tt_eval: index out of range at core " + std::to_string(k));
        }
        next.assign(c.right(), 0.0);
        for (std::size_t l = 0; l < c.left(); ++l) {
            const double vl = v[l];
            if (vl == 0.0) {
                continue;
            }
            const double* row = &c.data()[(l * c.mode() + index[k]) * c.right()];
            for (std::size_t r = 0; r < c.right(); ++r) {
                next[r] += vl * row[r];
            }
        }
        v.swap(next);
    }
    return v[0];
}

// ---------------------------------------------------------------------------
// Algebra

TensorTrain round(const TensorTrain& tt, const Tolerance& tol) {
    if (tt.order() <= 1) {
        return tt;
    }
    std::vector<Core> cores = tt.cores();
    const std::size_t d = cores.size();
    for (std::size_t k = 0; k + 1 < d; ++k) {
        detail::left_orthogonalize(cores, k);
    }
    const double nrm = Eigen::Map<const Eigen::VectorXd>(
                           cores.back().data().data(),
                           static_cast<Eigen::Index>(cores.back().size()))
                           .norm();
    if (nrm == 0.0) {
        return TensorTrain::zeros(tt.dims());
    }
    const double delta = tol.relative_epsilon * nrm / std::sqrt(static_cast<double>(d - 1));
    for (std::size_t k = d - 1; k > 0; --k) {
        detail::truncate_bond(cores, k, delta, tol.max_rank);
    }
    for (std::size_t k = 0; k + 1 < d; ++k) {
        detail::left_orthogonalize(cores, k);
    }
    return TensorTrain(std::move(cores));
}

TensorTrain add(const TensorTrain& a, const TensorTrain& b) {
    check_same_dims(a, b, "add");
    const std::size_t d = a.order();
    if (d == 1) {
        Core c(1, a.core(0).mode(), 1);
        for (std::size_t i = 0; i < c.mode(); ++i) {
            c(0, i, 0) = a.core(0)(0, i, 0) + b.core(0)(0, i, 0);
        }
        return TensorTrain({std::move(c)});
    }
    std::vector<Core> cores;
    cores.reserve(d);
    for (std::size_t k = 0; k < d; ++k) {
        const Core& ca = a.core(k);
        const Core& cb = b.core(k);
        const bool first = k == 0;
        const bool last = k + 1 == d;
        const std::size_t left = first ? 1 : ca.left() + cb.left();
        const std::size_t right = last ? 1 : ca.right() + cb.right();
        Core c(left, ca.mode(), right);
        const std::size_t lo_b = first ? 0 : ca.left();
        const std::size_t ro_b = last ? 0 : ca.right();
        for (std::size_t l = 0; l < ca.left(); ++l) {
            for (std::size_t i = 0; i < ca.mode(); ++i) {
                for (std::size_t r = 0; r < ca.right(); ++r) {
                    c(l, i, r) = ca(l, i, r);
                }
            }
        }
        for (std::size_t l = 0; l < cb.left(); ++l) {
            for (std::size_t i = 0; i < cb.mode(); ++i) {
                for (std::size_t r = 0; r < cb.right(); ++r) {
                    c(lo_b + l, i, ro_b + r) += cb(l, i, r);
                }
            }
        }
        cores.push_back(std::move(c));
    }
    return TensorTrain(std::move(cores));
}

TensorTrain scale(const TensorTrain& a, double c) {
    TensorTrain out = a;
    if (out.empty()) {
        return out;
    }
    for (double& x : out.core(0).data()) {
        x *= c;
    }
    return out;
}

TensorTrain hadamard(const TensorTrain& a, const TensorTrain& b) {
    check_same_dims(a, b, "hadamard");
    std::vector<Core> cores;
    cores.reserve(a.order());
    for (std::size_t k = 0; k < a.order(); ++k) {
        const Core& ca = a.core(k);
        const Core& cb = b.core(k);
        Core c(ca.left() * cb.left(), ca.mode(), ca.right() * cb.right());
        for (std::size_t la = 0; la < ca.left(); ++la) {
            for (std::size_t lb = 0; lb < cb.left(); ++lb) {
                for (std::size_t i = 0; i < ca.mode(); ++i) {
                    for (std::size_t ra = 0; ra < ca.right(); ++ra) {
                        const double x = ca(la, i, ra);
                        for (std::size_t rb = 0; rb < cb.right(); ++rb) {
                            c(la * cb.left() + lb, i, ra * cb.right() + rb) = x * cb(lb, i, rb);
                        }
                    }
                }
            }
        }
        cores.push_back(std::move(c));
    }
    return TensorTrain(std::move(cores));
}

double dot(const TensorTrain& a, const TensorTrain& b) {
    check_same_dims(a, b, "dot");
    // Environment E (ra x rb), contracted left to right.
    RowMatrix env = RowMatrix::Ones(1, 1);
    for (std::size_t k = 0; k < a.order(); ++k) {
        const Core& ca = a.core(k);
        const Core& cb = b.core(k);
        RowMatrix next = RowMatrix::Zero(static_cast<Eigen::Index>(ca.right()),
                                         static_cast<Eigen::Index>(cb.right()));
        for (std::size_t i = 0; i < ca.mode(); ++i) {
            RowMatrix sa(ca.left(), ca.right());
            RowMatrix sb(cb.left(), cb.right());
            for (std::size_t l = 0; l < ca.left(); ++l) {
                for (std::size_t r = 0; r < ca.right(); ++r) {
                    sa(l, r) = ca(l, i, r);
                }
            }
            for (std::size_t l = 0; l < cb.left(); ++l) {
                for (std::size_t r = 0; r < cb.right(); ++r) {
                    sb(l, r) = cb(l, i, r);
                }
            }
            next.noalias() += sa.transpose() * env * sb;
        }
        env = std::move(next);
    }
    return env(0, 0);
}

double norm2(const TensorTrain& a) {
    if (a.empty()) {
        return 0.0;
    }
    // Orthogonalize a copy so the norm is read off the last core without cancellation.
    std::vector<Core> cores = a.cores();
    for (std::size_t k = 0; k + 1 < cores.size(); ++k) {
        detail::left_orthogonalize(cores, k);
    }
    return Eigen::Map<const Eigen::VectorXd>(cores.back().data().data(),
                                             static_cast<Eigen::Index>(cores.back().size()))
        .norm();
}

double sum(const TensorTrain& a) {
    std::vector<double> v{1.0};
    for (const Core& c : a.cores()) {
        std::vector<double> next(c.right(), 0.0);
        for (std::size_t l = 0; l < c.left(); ++l) {
            for (std::size_t i = 0; i < c.mode(); ++i) {
                for (std::size_t r = 0; r < c.right(); ++r) {
                    next[r] += v[l] * c(l, i, r);
                }
            }
        }
        v.swap(next);
    }
    return v.empty() ? 0.0 : v[0];
}

TensorTrain kron(const TensorTrain& a, const TensorTrain& b) {
    std::vector<Core> cores = a.cores();
    cores.insert(cores.end(), b.cores().begin(), b.cores().end());
    return TensorTrain(std::move(cores));
}

bool is_left_orthogonal(const Core& core, double tolerance) {
    const RowMatrix m = left_unfolding(core);
    const RowMatrix gram = m.transpose() * m;
    return (gram - RowMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <=
           tolerance;
}

// ---------------------------------------------------------------------------
// Operators

TensorTrain contract(const TTOperator& op, const TensorTrain& v) {
    if (op.col_dims() != v.dims()) {
        throw DimensionError("apply_operator: operator columns do not match vector dims");
    }
    std::vector<Core> cores;
    cores.reserve(v.order());
    for (std::size_t k = 0; k < v.order(); ++k) {
        const OperatorCore& o = op.core(k);
        const Core& c = v.core(k);
        Core out(o.left() * c.left(), o.rows(), o.right() * c.right());
        for (std::size_t lo = 0; lo < o.left(); ++lo) {
            for (std::size_t i = 0; i < o.rows(); ++i) {
                for (std::size_t j = 0; j < o.cols(); ++j) {
                    for (std::size_t ro = 0; ro < o.right(); ++ro) {
                        const double w = o(lo, i, j, ro);
                        if (w == 0.0) {
                            continue;
                        }
                        for (std::size_t lv = 0; lv < c.left(); ++lv) {
                            const double* src = &c.data()[(lv * c.mode() + j) * c.right()];
                            double* dst = &out(lo * c.left() + lv, i, ro * c.right());
                            for (std::size_t rv = 0; rv < c.right(); ++rv) {
                                dst[rv] += w * src[rv];
                            }
                        }
                    }
                }
            }
        }
        cores.push_back(std::move(out));
    }
    return TensorTrain(std::move(cores));
}

TensorTrain apply_operator(const TTOperator& op, const TensorTrain& v, const Tolerance& tol) {
    return round(contract(op, v), tol);
}

TTOperator op_add(const TTOperator& a, const TTOperator& b) {
    if (a.row_dims() != b.row_dims() || a.col_dims() != b.col_dims()) {
        throw DimensionError("op_add: operator shapes differ");
    }
    std::vector<Core> ca, cb;
    for (const auto& c : a.cores()) {
        ca.push_back(detail::as_core(c));
    }
    for (const auto& c : b.cores()) {
        cb.push_back(detail::as_core(c));
    }
    const TensorTrain s = add(TensorTrain(std::move(ca)), TensorTrain(std::move(cb)));
    std::vector<OperatorCore> out;
    for (std::size_t k = 0; k < s.order(); ++k) {
        out.push_back(detail::as_operator_core(s.core(k), a.core(k).rows(), a.core(k).cols()));
    }
    return TTOperator(std::move(out));
}

TTOperator op_scale(const TTOperator& a, double c) {
    TTOperator out = a;
    if (out.order() > 0) {
        for (double& x : out.core(0).data()) {
            x *= c;
        }
    }
    return out;
}

TTOperator op_compose(const TTOperator& a, const TTOperator& b) {
    if (a.col_dims() != b.row_dims()) {
        throw DimensionError("op_compose: inner dimensions differ");
    }
    std::vector<OperatorCore> cores;
    for (std::size_t k = 0; k < a.order(); ++k) {
        const OperatorCore& x = a.core(k);
        const OperatorCore& y = b.core(k);
        OperatorCore c(x.left() * y.left(), x.rows(), y.cols(), x.right() * y.right());
        for (std::size_t lx = 0; lx < x.left(); ++lx) {
            for (std::size_t ly = 0; ly < y.left(); ++ly) {
                for (std::size_t i = 0; i < x.rows(); ++i) {
                    for (std::size_t j = 0; j < y.cols(); ++j) {
                        for (std::size_t rx = 0; rx < x.right(); ++rx) {
                            for (std::size_t ry = 0; ry < y.right(); ++ry) {
                                double s = 0.0;
                                for (std::size_t m = 0; m < x.cols(); ++m) {
                                    s += x(lx, i, m, rx) * y(ly, m, j, ry);
                                }
                                c(lx * y.left() + ly, i, j, rx * y.right() + ry) = s;
                            }
                        }
                    }
                }
            }
        }
        cores.push_back(std::move(c));
    }
    return TTOperator(std::move(cores));
}

TTOperator op_round(const TTOperator& op, const Tolerance& tol) {
    std::vector<Core> cores;
    for (const auto& c : op.cores()) {
        cores.push_back(detail::as_core(c));
    }
    const TensorTrain r = round(TensorTrain(std::move(cores)), tol);
    std::vector<OperatorCore> out;
    for (std::size_t k = 0; k < r.order(); ++k) {
        out.push_back(detail::as_operator_core(r.core(k), op.core(k).rows(), op.core(k).cols()));
    }
    return TTOperator(std::move(out));
}

TTOperator op_kron(const TTOperator& a, const TTOperator& b) {
    std::vector<OperatorCore> cores = a.cores();
    cores.insert(cores.end(), b.cores().begin(), b.cores().end());
    return TTOperator(std::move(cores));
}

TTOperator op_transpose(const TTOperator& a) {
    std::vector<OperatorCore> cores;
    for (const auto& c : a.cores()) {
        OperatorCore t(c.left(), c.cols(), c.rows(), c.right());
        for (std::size_t l = 0; l < c.left(); ++l) {
            for (std::size_t i = 0; i < c.rows(); ++i) {
                for (std::size_t j = 0; j < c.cols(); ++j) {
                    for (std::size_t r = 0; r < c.right(); ++r) {
                        t(l, j, i, r) = c(l, i, j, r);
                    }
                }
            }
        }
        cores.push_back(std::move(t));
    }
    return TTOperator(std::move(cores));
}

DenseTensor op_to_dense(const TTOperator& op) {
    const auto rows = op.row_dims();
    const auto cols = op.col_dims();
    const std::size_t nr = checked_volume(rows);
    const std::size_t nc = checked_volume(cols);
    checked_volume(std::vector<std::size_t>{nr, nc});
    DenseTensor out(std::vector<std::size_t>{nr, nc});
    // Walk all (row, col) multi-indices through the cores with a running vector.
    const std::size_t d = op.order();
    std::vector<std::size_t> ri(d), ci(d);
    for (std::size_t row = 0; row < nr; ++row) {
        std::size_t t = row;
        for (std::size_t k = d; k-- > 0;) {
            ri[k] = t % rows[k];
            t /= rows[k];
        }
        for (std::size_t col = 0; col < nc; ++col) {
            std::size_t u = col;
            for (std::size_t k = d; k-- > 0;) {
                ci[k] = u % cols[k];
                u /= cols[k];
            }
            std::vector<double> v{1.0};
            for (std::size_t k = 0; k < d && !v.empty(); ++k) {
                const OperatorCore& c = op.core(k);
                std::vector<double> next(c.right(), 0.0);
                for (std::size_t l = 0; l < c.left(); ++l) {
                    if (v[l] == 0.0) {
                        continue;
                    }
                    for (std::size_t r = 0; r < c.right(); ++r) {
                        next[r] += v[l] * c(l, ri[k], ci[k], r);
                    }
                }
                v.swap(next);
            }
            out.values[row * nc + col] = v[0];
        }
    }
    return out;
}

} // namespace qtti
