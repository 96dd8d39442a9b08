#include "qtti/construct.hpp"

#include <array>
#include <cmath>
#include <string>

#include "qtti/errors.hpp"

namespace qtti {

double Polynomial::operator()(double x) const {
    double y = 0.0;
    for (std::size_t k = coefficients.size(); k-- > 0;) {
        y = y * x + coefficients[k];
    }
    return y;
}

Polynomial Polynomial::derivative() const {
    Polynomial d;
    for (std::size_t k = 1; k < coefficients.size(); ++k) {
        d.coefficients.push_back(static_cast<double>(k) * coefficients[k]);
    }
    if (d.coefficients.empty()) {
        d.coefficients.push_back(0.0);
    }
    return d;
}

double binomial(std::size_t n, std::size_t k) {
    if (k > n) {
        return 0.0;
    }
    // Pascal row; exact in double for the small degrees used here.
    std::vector<double> row(n + 1, 0.0);
    row[0] = 1.0;
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = i; j > 0; --j) {
            row[j] += row[j - 1];
        }
    }
    return row[k];
}

double abel_parameter(std::size_t N) {
    const double full = std::ldexp(1.0, static_cast<int>(N));
    return (1.0 - full) / full;
}

double abel_polynomial(std::size_t n, double a, double x) {
    if (n == 0) {
        return 1.0;
    }
    return x * std::pow(x - a * static_cast<double>(n), static_cast<double>(n - 1));
}

std::vector<double> abel_coefficients(const Polynomial& poly, double a) {
    const std::size_t p = poly.degree();
    // Column n holds the monomial expansion of A_n; unit upper triangular.
    std::vector<std::vector<double>> basis(p + 1, std::vector<double>(p + 1, 0.0));
    basis[0][0] = 1.0;
    for (std::size_t n = 1; n <= p; ++n) {
        // x (x - a n)^(n-1) = sum_j C(n-1, j) (-a n)^(n-1-j) x^(j+1)
        const double shift = -a * static_cast<double>(n);
        for (std::size_t j = 0; j < n; ++j) {
            basis[j + 1][n] = binomial(n - 1, j) * std::pow(shift, static_cast<double>(n - 1 - j));
        }
    }
    std::vector<double> d(p + 1, 0.0);
    for (std::size_t row = p + 1; row-- > 0;) {
        double s = row < poly.coefficients.size() ? poly.coefficients[row] : 0.0;
        for (std::size_t n = row + 1; n <= p; ++n) {
            s -= basis[row][n] * d[n];
        }
        d[row] = s / basis[row][row];
    }
    return d;
}

namespace detail {

TensorTrain polynomial_qtt_any(const Polynomial& poly, std::size_t N, PolynomialBasis basis) {
    if (N == 0) {
        throw DimensionError("polynomial_qtt: need at least one core");
    }
    if (poly.coefficients.empty()) {
        return TensorTrain::qtt_constant(N, 0.0);
    }
    if (N == 1) {
        Core c(1, 2, 1);
        c(0, 0, 0) = poly(0.0);
        c(0, 1, 0) = poly(0.5);
        return TensorTrain({std::move(c)});
    }
    const std::size_t p = poly.degree();
    const bool abel = basis == PolynomialBasis::abel;
    const double a = abel_parameter(N);
    const std::vector<double> coeff = abel ? abel_coefficients(poly, a) : poly.coefficients;
    // Basis function P_n of the binomial-type family.
    auto basis_fn = [&](std::size_t n, double x) {
        return abel ? abel_polynomial(n, a, x) : std::pow(x, static_cast<double>(n));
    };

    std::vector<Core> cores;
    Core first(1, 2, p + 1);
    for (std::size_t bit = 0; bit < 2; ++bit) {
        const double t = 0.5 * static_cast<double>(bit);
        for (std::size_t s = 0; s <= p; ++s) {
            double phi = 0.0;
            for (std::size_t k = s; k <= p; ++k) {
                phi += coeff[k] * binomial(k, s) * basis_fn(k - s, t);
            }
            first(0, bit, s) = phi;
        }
    }
    cores.push_back(std::move(first));
    for (std::size_t m = 2; m < N; ++m) {
        Core mid(p + 1, 2, p + 1);
        const double step = std::ldexp(1.0, -static_cast<int>(m));
        for (std::size_t bit = 0; bit < 2; ++bit) {
            const double t = step * static_cast<double>(bit);
            for (std::size_t i = 0; i <= p; ++i) {
                for (std::size_t j = 0; j <= i; ++j) {
                    mid(i, bit, j) = binomial(i, i - j) * basis_fn(i - j, t);
                }
            }
        }
        cores.push_back(std::move(mid));
    }
    Core last(p + 1, 2, 1);
    const double step = std::ldexp(1.0, -static_cast<int>(N));
    for (std::size_t bit = 0; bit < 2; ++bit) {
        for (std::size_t i = 0; i <= p; ++i) {
            last(i, bit, 0) = basis_fn(i, step * static_cast<double>(bit));
        }
    }
    cores.push_back(std::move(last));
    return TensorTrain(std::move(cores));
}

} // namespace detail

TensorTrain polynomial_qtt(const Polynomial& poly, std::size_t N, PolynomialBasis basis) {
    if (N < 2) {
        throw DimensionError("polynomial_qtt: N must be at least 2");
    }
    return detail::polynomial_qtt_any(poly, N, basis);
}

TTOperator shift_mpo(ShiftKind kind, std::size_t k, std::size_t N) {
    if (N == 0 || N >= 63) {
        throw DimensionError("shift_mpo: unsupported number of cores");
    }
    if (k >= (std::size_t{1} << N)) {
        throw DimensionError("shift_mpo: shift " + std::to_string(k) + " out of range");
    }
    // Binary addition a' = a + k (R: a = a' + k), least significant bit at
    // the last core. Right bond carries in from the less significant core,
    // left bond carries out towards the more significant one.
    const bool swap = kind == ShiftKind::right;
    std::vector<OperatorCore> cores;
    for (std::size_t j = 0; j < N; ++j) {
        const std::size_t kappa = (k >> (N - 1 - j)) & 1U;
        const bool first = j == 0;
        const bool last = j + 1 == N;
        OperatorCore c(first ? 1 : 2, 2, 2, last ? 1 : 2);
        for (std::size_t row = 0; row < 2; ++row) {
            for (std::size_t col = 0; col < 2; ++col) {
                const std::size_t src = swap ? col : row;
                const std::size_t dst = swap ? row : col;
                for (std::size_t cin = 0; cin < (last ? 1U : 2U); ++cin) {
                    const std::size_t total = src + kappa + cin;
                    if ((total & 1U) != dst) {
                        continue;
                    }
                    const std::size_t cout = total >> 1;
                    if (first) {
                        if (cout == 0 || kind == ShiftKind::cyclic) {
                            c(0, row, col, cin) = 1.0;
                        }
                    } else {
                        c(cout, row, col, cin) = 1.0;
                    }
                }
            }
        }
        cores.push_back(std::move(c));
    }
    return TTOperator(std::move(cores));
}

TTOperator derivative_mpo(std::size_t N, double h) {
    if (N < 2) {
        throw DimensionError("derivative_mpo: N must be at least 2");
    }
    const std::size_t full = std::size_t{1} << N;
    const TTOperator fwd = shift_mpo(ShiftKind::cyclic, 1, N);
    const TTOperator bwd = shift_mpo(ShiftKind::cyclic, full - 1, N);
    return op_scale(op_add(fwd, op_scale(bwd, -1.0)), 1.0 / (2.0 * h));
}

} // namespace qtti
