#pragma once

#include <cstddef>
#include <vector>

#include "qtti/tensor_train.hpp"

namespace qtti {

/// Monomial coefficients c_0..c_p; trailing zeros are allowed.
struct Polynomial {
    std::vector<double> coefficients;

    std::size_t degree() const { return coefficients.empty() ? 0 : coefficients.size() - 1; }
    double operator()(double x) const;
    Polynomial derivative() const;
};

enum class PolynomialBasis { monomial, abel };

/// Samples poly(i / 2^N), i MSB-first over N binary cores, ranks <= p + 1.
TensorTrain polynomial_qtt(const Polynomial& poly, std::size_t N,
                           PolynomialBasis basis = PolynomialBasis::monomial);

/// Abel parameter that keeps the last core O(1) for N cores.
double abel_parameter(std::size_t N);
/// Coefficients d with poly(x) = sum d_n A_n(x), A_n(x) = x (x - a n)^(n-1).
std::vector<double> abel_coefficients(const Polynomial& poly, double a);
double abel_polynomial(std::size_t n, double a, double x);

enum class ShiftKind {
    cyclic, ///< (S f)_a = f_{(a + k) mod 2^N}
    right,  ///< (R f)_a = f_{a - k}, zero for a < k
    left,   ///< (L f)_a = f_{a + k}, zero past the end
};

/// Rank-2 MPO over N binary legs, built from a bitwise carry chain.
TTOperator shift_mpo(ShiftKind kind, std::size_t k, std::size_t N);

/// Periodic central difference (S^(1) - S^(2^N - 1)) / (2h).
TTOperator derivative_mpo(std::size_t N, double h);

double binomial(std::size_t n, std::size_t k);

namespace detail {
// Same as polynomial_qtt but also accepts a single core (N = 1).
TensorTrain polynomial_qtt_any(const Polynomial& poly, std::size_t N, PolynomialBasis basis);
} // namespace detail

} // namespace qtti
