#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "qtti/tensor_train.hpp"

namespace qtti::testing {

inline TensorTrain random_tt(const std::vector<std::size_t>& dims, std::size_t rank,
                             std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    std::vector<Core> cores;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        const std::size_t l = k == 0 ? 1 : rank;
        const std::size_t r = k + 1 == dims.size() ? 1 : rank;
        Core c(l, dims[k], r);
        for (double& x : c.data()) {
            x = normal(gen);
        }
        cores.push_back(std::move(c));
    }
    return TensorTrain(std::move(cores));
}

inline TTOperator random_operator(const std::vector<std::size_t>& rows,
                                  const std::vector<std::size_t>& cols, std::size_t rank,
                                  std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    std::vector<OperatorCore> cores;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const std::size_t l = k == 0 ? 1 : rank;
        const std::size_t r = k + 1 == rows.size() ? 1 : rank;
        OperatorCore c(l, rows[k], cols[k], r);
        for (double& x : c.data()) {
            x = normal(gen);
        }
        cores.push_back(std::move(c));
    }
    return TTOperator(std::move(cores));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return a.size() == b.size() ? m : INFINITY;
}

inline double frob(const std::vector<double>& a) {
    double s = 0.0;
    for (double x : a) {
        s += x * x;
    }
    return std::sqrt(s);
}

inline double max_abs(const std::vector<double>& a) {
    double m = 0.0;
    for (double x : a) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

} // namespace qtti::testing
